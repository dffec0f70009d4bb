"""Time evolution of Gaussian states, trajectories and QSL times."""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Union

import numpy as np
import scipy.linalg
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import bisect

from gqsl.errors import (
    BoundViolation,
    InconsistentTrajectory,
    IntegrationFailure,
    InvalidArgument,
)
from gqsl.metric import log_fidelity_arrays, theta_from_fidelity
from gqsl.models import OpenDynamics
from gqsl.speed import SpeedReport, speed_open
from gqsl.states import GaussianState, physicality_tolerance
from gqsl.symplectic import GeneratorLike, omega, propagator

BOUND_TOL = 1e-8
ERROR_PER_UNIT_TIME = 1e-8
CSV_HEADER = "t,purity,v2_total,v2_cov,v2_mean,theta_from_start,path_length"


class IntegrationWarning(UserWarning):
    """Step-halving error estimate above the target accuracy."""


def evolve_unitary(state: GaussianState, G: GeneratorLike, t: float) -> GaussianState:
    """Exact evolution Sigma -> S Sigma S^T, u -> S u with S = exp(Omega G t)."""
    S = propagator(G, t)
    Sigma = S @ state.Sigma @ S.T
    return GaussianState(0.5 * (Sigma + Sigma.T), S @ state.u, state.hbar)


def _lyapunov_generator(dyn: OpenDynamics) -> np.ndarray:
    """Matrix of the affine map vec(Sigma) -> vec(B Sigma + Sigma B^T) (row-major)."""
    dim = 2 * dyn.n
    eye = np.eye(dim)
    return np.kron(dyn.B, eye) + np.kron(eye, dyn.B)


def _affine_generator(dyn: OpenDynamics) -> np.ndarray:
    """Generator of y = (vec Sigma, u, 1) as one linear system."""
    dim = 2 * dyn.n
    m = dim * dim
    L = np.zeros((m + dim + 1, m + dim + 1))
    L[:m, :m] = _lyapunov_generator(dyn)
    L[:m, -1] = dyn.D.reshape(-1)
    L[m:m + dim, m:m + dim] = dyn.B
    return L


def _pack(state: GaussianState) -> np.ndarray:
    return np.concatenate([state.Sigma.reshape(-1), state.u, [1.0]])


def _unpack(y: np.ndarray, dim: int):
    m = dim * dim
    Sigma = y[..., :m].reshape(y.shape[:-1] + (dim, dim))
    Sigma = 0.5 * (Sigma + np.swapaxes(Sigma, -1, -2))
    return Sigma, y[..., m:m + dim]


def evolve_open_exact(state: GaussianState, dyn: OpenDynamics, t: float) -> GaussianState:
    """Closed-form solution of the affine moment equations via one matrix exponential."""
    if not np.isfinite(t):
        raise InvalidArgument(f"time must be finite, got {t!r}")
    if state.n != dyn.n:
        raise InvalidArgument("state and dynamics have different mode counts")
    y = scipy.linalg.expm(_affine_generator(dyn) * t) @ _pack(state)
    Sigma, u = _unpack(y, 2 * dyn.n)
    return GaussianState(Sigma, u, state.hbar)


def rk4_step_matrix(L: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step for the linear system dy/dt = L y.

    For a constant linear right-hand side the four stages compose to the
    degree-four Taylor polynomial of exp(hL); building it once lets the time
    loop cost a single matrix-vector product per step.
    """
    hL = h * L
    eye = np.eye(L.shape[0])
    hL2 = hL @ hL
    return eye + hL + hL2 / 2 + hL2 @ hL / 6 + hL2 @ hL2 / 24


def _march(y0: np.ndarray, P: np.ndarray, steps: int) -> np.ndarray:
    ys = np.empty((steps + 1, y0.size))
    ys[0] = y0
    y = y0
    for k in range(steps):
        y = P @ y
        ys[k + 1] = y
    return ys


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered samples of an evolution.

    ``theta_from_start`` holds Theta(rho_0, rho_t) = 2 arccos sqrt(F) and
    ``path_length`` holds 2 * int_0^t V dt' (cumulative Simpson rule), so
    the endpoint bound reads ``theta_from_start <= path_length``.
    """

    times: np.ndarray
    Sigmas: np.ndarray
    us: np.ndarray
    hbar: float
    dynamics: OpenDynamics
    v2_cov: np.ndarray
    v2_mean: np.ndarray
    theta_from_start: np.ndarray
    path_length: np.ndarray
    error_estimate: float = 0.0
    v2_total: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "v2_total", self.v2_cov + self.v2_mean)

    def __len__(self):
        return len(self.times)

    @property
    def speed(self) -> np.ndarray:
        return np.sqrt(np.maximum(self.v2_total, 0.0))

    @property
    def states(self) -> List[GaussianState]:
        return [GaussianState(S, u, self.hbar) for S, u in zip(self.Sigmas, self.us)]

    @cached_property
    def speeds(self) -> List[SpeedReport]:
        """Full per-sample reports (including the one-mode split)."""
        return [speed_open(s, self.dynamics) for s in self.states]

    @property
    def purity(self) -> np.ndarray:
        _, logdet = np.linalg.slogdet(self.Sigmas / self.hbar)
        return np.exp(-0.5 * logdet)

    @property
    def speed_integral(self) -> np.ndarray:
        """int_0^t V dt' at every sample."""
        return 0.5 * self.path_length

    def to_csv(self) -> str:
        columns = [self.times, self.purity, self.v2_total, self.v2_cov,
                   self.v2_mean, self.theta_from_start, self.path_length]
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        for row in zip(*columns):
            buf.write(",".join(f"{x:.17g}" for x in row) + "\n")
        return buf.getvalue()


def _batched_open_speeds(Sigmas, us, dyn: OpenDynamics):
    B, D = dyn.B, dyn.D
    dS = B @ Sigmas + Sigmas @ B.T + D
    du = us @ B.T
    X = np.linalg.solve(Sigmas, dS)
    v2_cov = np.einsum("kij,kji->k", X, X) / 16.0
    w = np.linalg.solve(Sigmas, du[..., None])[..., 0]
    v2_mean = 0.5 * np.einsum("ki,ki->k", du, w)
    return v2_cov, v2_mean


def _check_physical(times, Sigmas, hbar):
    n = Sigmas.shape[-1] // 2
    H = Sigmas + 1j * hbar * omega(n)
    low = np.linalg.eigvalsh(H)[:, 0] / hbar
    bad = np.flatnonzero(low < -physicality_tolerance(Sigmas, hbar))
    if bad.size:
        k = bad[0]
        raise IntegrationFailure(
            f"state left the physical set at t={times[k]:.6g} "
            f"(min eigenvalue of Sigma + i hbar Omega = {low[k] * hbar:.3g})",
            time=float(times[k]))


def evolve_open(state: GaussianState, dyn: Union[OpenDynamics, GeneratorLike],
                t: float, dt: float, method: str = "rk4") -> Trajectory:
    """Sample the evolution on [0, t] every ``dt``.

    ``method="rk4"`` integrates with fixed-step classical RK4 and estimates
    the global error by repeating the run at dt/2; ``method="exact"`` uses
    the matrix-exponential step instead. A bare generator is treated as
    unitary dynamics. Every sample is symmetrized and checked for
    physicality.
    """
    if not isinstance(dyn, OpenDynamics):
        dyn = OpenDynamics.unitary(dyn)
    if state.n != dyn.n:
        raise InvalidArgument("state and dynamics have different mode counts")
    if not dt > 0 or not t >= 0 or not np.isfinite(t):
        raise InvalidArgument(f"need dt > 0 and finite t >= 0, got t={t!r}, dt={dt!r}")
    steps = max(int(round(t / dt)), 0)
    if steps and abs(steps * dt - t) > 1e-9 * max(t, 1.0):
        raise InvalidArgument(f"t={t} is not a whole number of steps dt={dt}")
    if method not in ("rk4", "exact"):
        raise InvalidArgument(f"unknown method {method!r}")

    L = _affine_generator(dyn)
    y0 = _pack(state)
    dim = 2 * dyn.n
    if method == "exact":
        P = scipy.linalg.expm(L * dt)
    else:
        P = rk4_step_matrix(L, dt)
    ys = _march(y0, P, steps)
    Sigmas, us = _unpack(ys, dim)
    times = np.arange(steps + 1) * dt

    error = 0.0
    if method == "rk4" and steps:
        fine = np.linalg.matrix_power(rk4_step_matrix(L, dt / 2), 2)
        y_half = _march(y0, fine, steps)[-1]
        Sigma_half, u_half = _unpack(y_half, dim)
        diff = np.concatenate([(Sigma_half - Sigmas[-1]).ravel(), u_half - us[-1]])
        ref = max(np.abs(Sigmas).max(), np.abs(us).max(initial=0.0), 1.0)
        error = float(np.linalg.norm(diff) / 15.0 / ref)
        if error > ERROR_PER_UNIT_TIME * max(t, 1.0):
            warnings.warn(
                f"RK4 step-halving error {error:.3g} exceeds "
                f"{ERROR_PER_UNIT_TIME:g} per unit time; reduce dt", IntegrationWarning)

    _check_physical(times, Sigmas, state.hbar)
    v2_cov, v2_mean = _batched_open_speeds(Sigmas, us, dyn)
    S0 = np.broadcast_to(Sigmas[0], Sigmas.shape)
    u0 = np.broadcast_to(us[0], us.shape)
    theta = theta_from_fidelity(np.exp(log_fidelity_arrays(S0, u0, Sigmas, us)))
    V = np.sqrt(np.maximum(v2_cov + v2_mean, 0.0))
    if steps:
        path = 2.0 * cumulative_simpson(V, x=times, initial=0.0)
    else:
        path = np.zeros(1)
    return Trajectory(times, Sigmas, us, state.hbar, dyn, v2_cov, v2_mean,
                      theta, path, error)


@dataclass(frozen=True)
class QslTimes:
    """QSL times at sample time ``t``.

    The endpoint distance used here is the half angle arccos sqrt(F), i.e.
    Theta/2, which is what makes both tau_1 and tau_2 bounded by ``t``.
    """

    t: float
    tau_q: float
    tau_1: float
    tau_2: float


def _sample_index(traj: Trajectory, t: float) -> int:
    times = traj.times
    if t < times[0] - 1e-12 or t > times[-1] + 1e-12:
        raise InvalidArgument(f"t={t} outside trajectory range [{times[0]}, {times[-1]}]")
    return int(np.argmin(np.abs(times - t)))


def qsl_times(traj: Trajectory, t: float) -> QslTimes:
    """tau_Q = 1/V(0), tau_1 = half_angle * t / int_0^t V, tau_2 solving int_0^s V = half_angle.

    ``t`` is snapped to the nearest sample.
    """
    k = _sample_index(traj, t)
    t_k = float(traj.times[k])
    V = traj.speed
    tau_q = 1.0 / float(V[0]) if V[0] > 0 else math.inf
    half_angle = 0.5 * float(traj.theta_from_start[k])
    integral = traj.speed_integral
    if half_angle == 0.0:
        return QslTimes(t_k, tau_q, 0.0, 0.0)
    if integral[k] <= 0.0:
        raise InconsistentTrajectory(
            f"speed vanishes on [0, {t_k}] while the state moved by Theta={2 * half_angle:.3g}")
    tau_1 = half_angle * t_k / float(integral[k])
    if half_angle > integral[k] + 0.5 * BOUND_TOL:
        raise BoundViolation(
            f"endpoint distance {half_angle:.12g} exceeds int V = {integral[k]:.12g} at t={t_k}")
    if half_angle >= integral[k]:
        return QslTimes(t_k, tau_q, tau_1, t_k)
    j = int(np.searchsorted(integral[:k + 1], half_angle, side="left"))
    j = max(j, 1)
    spline = CubicHermiteSpline(traj.times[j - 1:j + 1], integral[j - 1:j + 1], V[j - 1:j + 1])
    lo, hi = float(traj.times[j - 1]), float(traj.times[j])
    f = lambda s: float(spline(s)) - half_angle
    if f(lo) >= 0:
        tau_2 = lo
    elif f(hi) <= 0:
        tau_2 = hi
    else:
        tau_2 = bisect(f, lo, hi, xtol=1e-10)
    return QslTimes(t_k, tau_q, tau_1, min(tau_2, t_k))


@dataclass(frozen=True)
class BoundReport:
    """Slack path_length - Theta along a trajectory."""

    holds: bool
    min_slack: float
    t_min_slack: float
    max_slack: float
    t_max_slack: float


def check_bound(traj: Trajectory, tol: float = BOUND_TOL, strict: bool = True) -> BoundReport:
    """Verify Theta(rho_0, rho_t) <= 2 int_0^t V at every sample.

    With ``strict`` a violation raises :class:`BoundViolation`; such a
    violation points at an inconsistency between fidelity and speed code.
    """
    if len(traj) < 3:
        raise InvalidArgument("bound check needs at least three samples")
    slack = traj.path_length - traj.theta_from_start
    i_min, i_max = int(np.argmin(slack)), int(np.argmax(slack))
    report = BoundReport(bool(slack[i_min] >= -tol), float(slack[i_min]),
                         float(traj.times[i_min]), float(slack[i_max]),
                         float(traj.times[i_max]))
    if strict and not report.holds:
        raise BoundViolation(
            f"Theta exceeds path length by {-report.min_slack:.3g} at t={report.t_min_slack:.6g}")
    return report


def qbm_speed_closed_form(beta_S: float, beta_B: float, omega_: float, gamma: float) -> float:
    """(gamma^2/2)(1 - x + x^2/2) with x = tanh(beta_S*omega/2)/beta_B, unsqueezed state.

    The O(beta_B) remainder is dropped.
    """
    for name, value in (("beta_S", beta_S), ("beta_B", beta_B), ("omega", omega_), ("gamma", gamma)):
        if not value > 0:
            raise InvalidArgument(f"{name} must be positive, got {value!r}")
    x = math.tanh(0.5 * beta_S * omega_) / beta_B
    return 0.5 * gamma**2 * (1.0 - x + 0.5 * x * x)
