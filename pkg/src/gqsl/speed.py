"""Closed-form quantum speeds for Gaussian states.

Every evaluator returns the squared speed V^2 defined by
F(rho_t, rho_{t+dt}) = 1 - V^2 dt^2, split into the part coming from the
covariance matrix and the part coming from the mean vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from gqsl.errors import (
    DegenerateGenerator,
    InvalidArgument,
    NumericalFailure,
    PreconditionViolation,
    Unsupported,
)
from gqsl.models import OpenDynamics
from gqsl.states import GaussianState, SqueezeSpec
from gqsl.symplectic import GeneratorLike, as_generator, omega, symplectic_eigenvalues

PURE_TOL = 1e-8
SPLIT_TOL = 1e-8


@dataclass(frozen=True)
class SpeedReport:
    """Squared speed and its decomposition.

    ``v2_unitary`` and ``chi_nu`` are ``None`` when the unitary/nonunitary
    split is not available (open dynamics with more than one mode).
    ``tau_q`` is 1/V, or ``inf`` for a stationary state.
    """

    v2_cov: float
    v2_mean: float
    v2_unitary: Optional[float] = None
    chi_nu: Optional[float] = None
    v2_total: float = field(init=False)
    tau_q: float = field(init=False)

    def __post_init__(self):
        total = float(self.v2_cov + self.v2_mean)
        object.__setattr__(self, "v2_total", total)
        object.__setattr__(self, "tau_q", 1.0 / math.sqrt(total) if total > 0 else math.inf)

    def to_dict(self) -> dict:
        """JSON-ready mapping; an infinite ``tau_q`` becomes the string ``"inf"``."""
        return {
            "v2_total": self.v2_total,
            "v2_cov": self.v2_cov,
            "v2_mean": self.v2_mean,
            "v2_unitary": self.v2_unitary,
            "chi_nu": self.chi_nu,
            "tau_q": "inf" if math.isinf(self.tau_q) else self.tau_q,
        }


def _check_dims(state: GaussianState, n: int) -> None:
    if state.n != n:
        raise InvalidArgument(f"state has {state.n} modes but the dynamics has {n}")


def _inv(Sigma: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.inv(Sigma)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("covariance matrix is singular") from exc


def speed_unitary(state: GaussianState, G: GeneratorLike) -> SpeedReport:
    """Speed under H = z^T G z / 2 for any (mixed, multimode) state."""
    gen = as_generator(G)
    _check_dims(state, gen.n)
    A = gen.drift
    Sigma, u = state.Sigma, state.u
    Si = _inv(Sigma)
    v2_cov = (np.trace(Si @ A @ Sigma @ A.T) + np.trace(A @ A)) / 8.0
    Au = A @ u
    v2_mean = 0.5 * Au @ Si @ Au
    return SpeedReport(float(v2_cov), float(v2_mean), float(v2_cov), 0.0)


def speed_unitary_pure(state: GaussianState, G: GeneratorLike) -> SpeedReport:
    """Pure-state form, written through G Sigma G instead of Sigma^-1."""
    gen = as_generator(G)
    _check_dims(state, gen.n)
    nu = symplectic_eigenvalues(state.Sigma, state.hbar)
    excess = float(np.max(np.abs(nu - 1.0)))
    if excess > PURE_TOL:
        raise PreconditionViolation(
            f"state is not pure: max |nu_k - 1| = {excess:.3g}")
    G_, Sigma, u, hbar = gen.G, state.Sigma, state.u, state.hbar
    A = gen.drift
    GS = G_ @ Sigma
    v2_cov = (np.trace(GS @ GS) + hbar**2 * np.trace(A @ A)) / (8.0 * hbar**2)
    v2_mean = u @ G_ @ Sigma @ G_ @ u / (2.0 * hbar**2)
    return SpeedReport(float(v2_cov), float(v2_mean), float(v2_cov), 0.0)


def speed_harmonic(spec: SqueezeSpec, v, omega_: float, hbar: float = 1.0) -> SpeedReport:
    """Pure squeezed state under G = omega*I; ``v`` holds the rotated-frame means O^T u."""
    if not omega_ > 0 or not hbar > 0:
        raise InvalidArgument("omega and hbar must be positive")
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (2 * spec.n,):
        raise InvalidArgument(f"v must have length {2 * spec.n}")
    d = np.exp(np.ravel([[r, -r] for r in spec.r]))
    v2_cov = omega_**2 / 8.0 * (np.sum(d**2) - 2 * spec.n)
    v2_mean = omega_**2 / (2.0 * hbar) * np.sum(d * v**2)
    return SpeedReport(float(v2_cov), float(v2_mean), float(v2_cov), 0.0)


def speed_single_mode(r, delta, g0: float, gS: float):
    """Single-mode, undisplaced speed as a function of delta = theta - phi.

    Vectorized over ``r`` and ``delta``.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise InvalidArgument("squeezing r must be >= 0")
    s2 = np.sin(2 * np.asarray(delta, dtype=float))
    c2 = np.cos(2 * np.asarray(delta, dtype=float))
    out = 0.5 * ((g0 * np.sinh(r) - gS * s2 * np.cosh(r)) ** 2 + gS**2 * c2**2)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ExtremaReport:
    """Critical angles of the single-mode speed on [0, pi].

    ``branch`` is True when |g0/gS| <= tanh r, i.e. the two extra minima
    delta_c(+-) exist. ``delta_max`` is 3*pi/4 whenever g0*gS >= 0.
    """

    delta_critical: List[float]
    v2_max: float
    v2_min: float
    branch: bool
    delta_max: float
    delta_min: List[float]


def single_mode_extrema(r: float, g0: float, gS: float) -> ExtremaReport:
    """Analytic maximum and minimum of :func:`speed_single_mode` over delta.

    Writing s = sin(2 delta), V^2 is a convex quadratic in s, so the
    maximum sits at s = +-1 and the minimum at s* = (g0/gS) coth r when
    |s*| <= 1.
    """
    if r < 0:
        raise InvalidArgument("squeezing r must be >= 0")
    if g0 == 0 and gS == 0:
        raise DegenerateGenerator("g0 = gS = 0 generates no dynamics")
    a = g0 * math.sinh(r)
    b = gS * math.cosh(r)
    quarter, three_quarter = math.pi / 4, 3 * math.pi / 4
    critical = [quarter, three_quarter]

    v2_max = 0.5 * (abs(a) + abs(b)) ** 2
    delta_max = three_quarter if a * b >= 0 else quarter

    branch = gS != 0 and r > 0 and abs(g0) <= abs(gS) * math.tanh(r)
    if branch:
        s_star = max(-1.0, min(1.0, (g0 / gS) / math.tanh(r)))
        base = math.asin(s_star)
        extra = sorted(x % (2 * math.pi) / 2 for x in (base, math.pi - base))
        critical = sorted(set(critical + extra))
        v2_min = 0.5 * (gS**2 - g0**2)
        delta_min = extra
    else:
        v2_min = 0.5 * (abs(a) - abs(b)) ** 2
        delta_min = [quarter if a * b >= 0 else three_quarter]
    return ExtremaReport(critical, v2_max, v2_min, bool(branch), delta_max, delta_min)


def covariance_rate(state: GaussianState, dyn: OpenDynamics):
    """(dSigma/dt, du/dt) for the general open generator."""
    B = dyn.B
    Sigma = state.Sigma
    return B @ Sigma + Sigma @ B.T + dyn.D, B @ state.u


def speed_open_split(state: GaussianState, dyn: OpenDynamics):
    """Unitary part and nonunitary correction of the covariance speed (one mode only).

    Returns ``(v2_unitary, chi_nu)`` with eta = sqrt(det Sigma).
    """
    if state.n != 1 or dyn.n != 1:
        raise Unsupported("the unitary/nonunitary split is only defined for one mode")
    if dyn.dissipation_rate is None:
        raise Unsupported("the split requires dynamics in rate form (G, g, M)")
    Sigma = state.Sigma
    G = dyn.generator.G
    M = dyn.M
    g = dyn.dissipation_rate
    Om = omega(1)
    eta2 = np.linalg.det(Sigma)
    if not eta2 > 0:
        raise NumericalFailure("covariance determinant is not positive")
    GS = G @ Sigma
    v2_unitary = (np.trace(GS @ GS) / eta2 + np.trace(Om @ G @ Om @ G)) / 8.0
    SiM = _inv(Sigma) @ M
    chi = (g**2 / 8.0 * (1.0 - np.trace(SiM) + 0.5 * np.trace(SiM @ SiM))
           + g / (8.0 * eta2) * np.trace(Sigma @ (G @ M @ Om - Om @ M @ G)))
    return float(v2_unitary), float(chi)


def speed_open(state: GaussianState, dyn: OpenDynamics) -> SpeedReport:
    """Speed under open Gaussian dynamics.

    The covariance part is tr((Sigma^-1 dSigma/dt)^2)/16. For one mode in
    rate form the split into unitary and nonunitary parts is filled in and
    checked against the trace formula.
    """
    _check_dims(state, dyn.n)
    Si = _inv(state.Sigma)
    dSigma, du = covariance_rate(state, dyn)
    X = Si @ dSigma
    v2_cov = float(np.trace(X @ X) / 16.0)
    v2_mean = float(0.5 * du @ Si @ du)
    if state.n != 1 or dyn.dissipation_rate is None:
        return SpeedReport(v2_cov, v2_mean)
    v2_u, chi = speed_open_split(state, dyn)
    scale = max(abs(v2_u), abs(chi), abs(v2_cov), 1.0)
    if abs(v2_u + chi - v2_cov) > SPLIT_TOL * scale:
        raise NumericalFailure(
            f"speed split inconsistent: {v2_u} + {chi} != {v2_cov}")
    return SpeedReport(v2_cov, v2_mean, v2_u, chi)


def chi_nu_high_temp(state: GaussianState, dyn: OpenDynamics) -> float:
    """Nonunitary correction with the O(1/eta^2) term dropped.

    The state is read as Sigma = eta * P with eta = sqrt(det Sigma) and
    det P = 1, so P^-1 = O D^-1 O^T and P = O D O^T.
    """
    if state.n != 1 or dyn.n != 1 or dyn.dissipation_rate is None:
        raise Unsupported("high-temperature expansion needs one mode in rate form")
    Sigma = state.Sigma
    eta = math.sqrt(np.linalg.det(Sigma))
    P = Sigma / eta
    G, M, g = dyn.generator.G, dyn.M, dyn.dissipation_rate
    Om = omega(1)
    noise = 1.0 - np.trace(np.linalg.inv(P) @ M) / eta
    if g == 0:
        return 0.0
    cross = np.trace(P @ (G @ M @ Om - Om @ M @ G)) / (g * eta)
    return float(g**2 / 8.0 * (noise + cross))


@dataclass(frozen=True)
class LargeNEquivalence:
    """Single-mode stand-in for an n-mode harmonic evolution.

    ``q_tilde`` and ``p_tilde`` are the displacement components of the
    emulating mode; ``hbar_eff`` is hbar/n without squeezing and
    hbar/(n cosh r) after rescaling the displacement by 1/cosh r.
    """

    r_equivalent: float
    hbar_eff: float
    q_tilde: float
    p_tilde: float


def large_n_equivalents(spec: SqueezeSpec, means: Optional[Sequence] = None,
                        hbar: float = 1.0) -> LargeNEquivalence:
    """Map n squeezed, displaced modes onto one mode with the same speed terms.

    ``means`` is a sequence of rotated-frame (q_k, p_k) pairs, one per mode;
    omitted means are zero.
    """
    n = spec.n
    r_k = np.asarray(spec.r, dtype=float)
    if means is None:
        means = np.zeros((n, 2))
    means = np.asarray(means, dtype=float).reshape(n, 2)
    r = float(np.arcsinh(np.sqrt(np.sum(np.sinh(r_k) ** 2))))
    q = float(np.exp(-r) / n * np.sum(np.exp(r_k) * means[:, 0] ** 2))
    p = float(np.exp(r) / n * np.sum(np.exp(-r_k) * means[:, 1] ** 2))
    hbar_eff = hbar / n if np.all(r_k == 0) else hbar / (n * math.cosh(r))
    return LargeNEquivalence(r, hbar_eff, q, p)
