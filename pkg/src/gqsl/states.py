"""Gaussian states described by a mean vector, a covariance matrix and hbar.

Covariances follow Sigma = tr(rho {dz, dz^T}), so the vacuum has Sigma = hbar*I
and a state is physical iff Sigma + i*hbar*Omega is positive semidefinite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np
import scipy.linalg

from gqsl.errors import InvalidArgument, InvalidState
from gqsl.symplectic import omega, rotation

SYMMETRY_TOL = 1e-12
PHYSICALITY_TOL = 1e-10
PURITY_TOL = 1e-10
ETA_CLAMP = 1e-15


@dataclass(frozen=True)
class GaussianState:
    """Immutable (Sigma, u, hbar) triple.

    Construction only checks shapes and hbar > 0; use :func:`validate` or
    :meth:`check` for the physical invariants.
    """

    Sigma: np.ndarray
    u: np.ndarray
    hbar: float = 1.0
    n: int = field(init=False)

    def __post_init__(self):
        Sigma = np.array(self.Sigma, dtype=float)
        if Sigma.ndim != 2 or Sigma.shape[0] != Sigma.shape[1] or Sigma.shape[0] % 2:
            raise InvalidArgument(f"covariance must be 2n x 2n, got shape {Sigma.shape}")
        dim = Sigma.shape[0]
        u = np.zeros(dim) if self.u is None else np.array(self.u, dtype=float).reshape(-1)
        if u.shape != (dim,):
            raise InvalidArgument(f"mean vector must have length {dim}, got {u.shape}")
        if not self.hbar > 0:
            raise InvalidArgument(f"hbar must be positive, got {self.hbar!r}")
        Sigma.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "Sigma", Sigma)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "hbar", float(self.hbar))
        object.__setattr__(self, "n", dim // 2)

    def check(self) -> "GaussianState":
        """Raise :class:`InvalidState` if any invariant fails; return self otherwise."""
        violation = validate(self)
        if violation is not None:
            raise InvalidState(str(violation))
        return self

    def with_sigma(self, Sigma) -> "GaussianState":
        return GaussianState(Sigma, self.u, self.hbar)


@dataclass(frozen=True)
class SqueezeSpec:
    """Per-mode squeezing r_k >= 0 and rotation angles theta_k."""

    r: Sequence[float]
    theta: Optional[Sequence[float]] = None

    def __post_init__(self):
        r = tuple(float(x) for x in np.atleast_1d(self.r))
        theta = (0.0,) * len(r) if self.theta is None else tuple(
            float(x) for x in np.atleast_1d(self.theta))
        if len(theta) != len(r):
            raise InvalidArgument("r and theta must have the same length")
        if not r:
            raise InvalidArgument("at least one mode is required")
        if any(x < 0 for x in r):
            raise InvalidArgument(f"squeezing parameters must be >= 0, got {r}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "theta", theta)

    @property
    def n(self) -> int:
        return len(self.r)

    def rotation_matrix(self) -> np.ndarray:
        """Block-diagonal O = R(theta_1) + ... + R(theta_n)."""
        return scipy.linalg.block_diag(*(rotation(t) for t in self.theta))

    def squeeze_matrix(self) -> np.ndarray:
        """D = diag(e^r1, e^-r1, ..., e^rn, e^-rn)."""
        return np.diag(np.exp(np.ravel([[r, -r] for r in self.r])))

    def shape(self) -> np.ndarray:
        """O D O^T, the covariance of the pure state in units of hbar."""
        O = self.rotation_matrix()
        return O @ self.squeeze_matrix() @ O.T


@dataclass(frozen=True)
class Violation:
    invariant: str
    value: float
    message: str

    def __str__(self):
        return f"{self.invariant} violated: {self.message} (value={self.value:.6g})"


def make_vacuum(n: int, hbar: float = 1.0) -> GaussianState:
    if int(n) != n or n < 1:
        raise InvalidArgument(f"mode count must be a positive integer, got {n!r}")
    if not hbar > 0:
        raise InvalidArgument(f"hbar must be positive, got {hbar!r}")
    return GaussianState(hbar * np.eye(2 * int(n)), np.zeros(2 * int(n)), hbar)


def make_pure_squeezed(spec: SqueezeSpec, hbar: float = 1.0) -> GaussianState:
    if not hbar > 0:
        raise InvalidArgument(f"hbar must be positive, got {hbar!r}")
    return GaussianState(hbar * spec.shape(), np.zeros(2 * spec.n), hbar)


def thermal_eta(beta_s: float, omega_: float) -> float:
    """eta = 2*nbar + 1 = coth(beta_s*omega/2), clamped to exactly 1 near zero temperature."""
    if not beta_s > 0 or not omega_ > 0:
        raise InvalidArgument(
            f"beta_s and omega must be positive, got beta_s={beta_s!r}, omega={omega_!r}")
    eta = 1.0 / np.tanh(0.5 * beta_s * omega_)
    return 1.0 if eta <= 1.0 + ETA_CLAMP else float(eta)


def make_thermal_squeezed(beta_s: float, omega_: float, spec: SqueezeSpec,
                          hbar: float = 1.0) -> GaussianState:
    """Sigma = hbar * eta(beta_s) * O D O^T, the same eta on every mode."""
    eta = thermal_eta(beta_s, omega_)
    pure = make_pure_squeezed(spec, hbar)
    return pure.with_sigma(eta * pure.Sigma)


def displace(state: GaussianState, du) -> GaussianState:
    du = np.asarray(du, dtype=float).reshape(-1)
    if du.shape != state.u.shape:
        raise InvalidArgument(
            f"displacement must have length {state.u.size}, got {du.size}")
    return GaussianState(state.Sigma, state.u + du, state.hbar)


def purity(state: GaussianState) -> float:
    """tr(rho^2) = 1 / sqrt(det(Sigma / hbar))."""
    sign, logdet = np.linalg.slogdet(state.Sigma / state.hbar)
    if sign <= 0:
        raise InvalidState("covariance determinant is not positive")
    return float(np.exp(-0.5 * logdet))


def physicality_margin(state: GaussianState) -> float:
    """Smallest eigenvalue of Sigma + i hbar Omega, in units of hbar."""
    H = state.Sigma + 1j * state.hbar * omega(state.n)
    return float(np.linalg.eigvalsh(H)[0]) / state.hbar


def physicality_tolerance(Sigma, hbar: float):
    """PHYSICALITY_TOL scaled by max(1, |Sigma|/hbar): rounding grows with the entries."""
    scale = np.linalg.norm(Sigma, ord=2, axis=(-2, -1)) / hbar
    return PHYSICALITY_TOL * np.maximum(scale, 1.0)


def validate(state: GaussianState) -> Optional[Violation]:
    """Return the first violated invariant, or ``None`` for a valid state.

    Checks run in order: symmetry, physicality, purity. The physicality
    tolerance is applied to the smallest eigenvalue in units of hbar, so
    rescaling (Sigma, hbar) together never changes the verdict.
    """
    Sigma = state.Sigma
    asym = float(np.linalg.norm(Sigma - Sigma.T))
    if asym > SYMMETRY_TOL * max(np.linalg.norm(Sigma), 1.0):
        return Violation("symmetry", asym, "Sigma differs from its transpose")
    margin = physicality_margin(state)
    if margin < -physicality_tolerance(Sigma, state.hbar):
        return Violation(
            "physicality", margin * state.hbar,
            "Sigma + i*hbar*Omega has a negative eigenvalue")
    sign, logdet = np.linalg.slogdet(Sigma / state.hbar)
    if sign <= 0:
        return Violation("purity", float("nan"), "det(Sigma/hbar) is not positive")
    mu = float(np.exp(-0.5 * logdet))
    if mu > 1 + PURITY_TOL:
        return Violation("purity", mu, "purity exceeds 1")
    return None


_DESCRIPTOR_KEYS = {"n", "hbar", "r", "theta", "beta_s", "omega", "u"}


def state_from_descriptor(desc: Mapping) -> GaussianState:
    """Build a state from the JSON descriptor used by the command line.

    Keys: ``n``, ``hbar``, ``r``, ``theta``, ``beta_s``, ``omega``, ``u``.
    ``beta_s`` and ``omega`` must appear together and select a squeezed
    thermal state. Missing ``r``/``theta``/``u`` default to zeros.
    """
    unknown = set(desc) - _DESCRIPTOR_KEYS
    if unknown:
        raise InvalidArgument(f"unknown state keys: {sorted(unknown)}")
    hbar = float(desc.get("hbar", 1.0))
    r = desc.get("r")
    n = desc.get("n", len(r) if r is not None else 1)
    if r is None:
        r = [0.0] * n
    if len(r) != n:
        raise InvalidArgument(f"state has n={n} but {len(r)} squeezing values")
    spec = SqueezeSpec(r, desc.get("theta"))
    if ("beta_s" in desc) != ("omega" in desc):
        raise InvalidArgument("beta_s and omega must be given together")
    if "beta_s" in desc:
        state = make_thermal_squeezed(float(desc["beta_s"]), float(desc["omega"]), spec, hbar)
    else:
        state = make_pure_squeezed(spec, hbar)
    if "u" in desc:
        state = displace(state, desc["u"])
    return state
