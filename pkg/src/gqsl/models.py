"""Parameters of Markovian Gaussian-preserving dynamics.

The general generator is

    dSigma/dt = B Sigma + Sigma B^T + D,    du/dt = B u,

with B = Omega (G + F), G symmetric and F antisymmetric. The rate form
uses F = (g/2) Omega on every mode, which gives B = A - (g/2) I and D = g M.

``g`` also names a Hamiltonian scale elsewhere, so the damping rate is
always called ``dissipation_rate`` here.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from gqsl.errors import InvalidArgument
from gqsl.symplectic import GeneratorLike, QuadraticGenerator, as_generator, omega

CP_TOL = 1e-10


class DynamicsWarning(UserWarning):
    """Dynamics parameters violate complete positivity."""


@dataclass(frozen=True)
class OpenDynamics:
    """Drift ``B`` and diffusion ``D`` of an open Gaussian evolution.

    Build with :meth:`from_rate` (rate form) or :meth:`general`.
    ``dissipation_rate`` and ``M`` are set whenever the antisymmetric part
    of the drift is a multiple of Omega; otherwise they are ``None``.
    """

    B: np.ndarray
    D: np.ndarray
    generator: QuadraticGenerator
    dissipation_rate: Optional[float] = None
    M: Optional[np.ndarray] = None
    n: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "n", self.generator.n)
        for name in ("B", "D", "M"):
            value = getattr(self, name)
            if value is not None:
                value = np.array(value, dtype=float)
                value.setflags(write=False)
                object.__setattr__(self, name, value)
        for message in self.cp_violations():
            warnings.warn(message, DynamicsWarning, stacklevel=3)

    @classmethod
    def from_rate(cls, G: GeneratorLike, dissipation_rate: float = 0.0,
                  M=None) -> "OpenDynamics":
        gen = as_generator(G)
        dim = 2 * gen.n
        M = np.zeros((dim, dim)) if M is None else np.asarray(M, dtype=float)
        if M.shape != (dim, dim):
            raise InvalidArgument(f"M must be {dim}x{dim}, got {M.shape}")
        if np.linalg.norm(M - M.T) > 1e-12 * max(np.linalg.norm(M), 1.0):
            raise InvalidArgument("M must be symmetric")
        if not np.isfinite(dissipation_rate) or dissipation_rate < 0:
            raise InvalidArgument(
                f"dissipation rate must be finite and >= 0, got {dissipation_rate!r}")
        g = float(dissipation_rate)
        B = gen.drift - 0.5 * g * np.eye(dim)
        return cls(B, g * 0.5 * (M + M.T), gen, g, 0.5 * (M + M.T))

    @classmethod
    def unitary(cls, G: GeneratorLike) -> "OpenDynamics":
        return cls.from_rate(G, 0.0)

    @classmethod
    def general(cls, B, D) -> "OpenDynamics":
        B = np.asarray(B, dtype=float)
        D = np.asarray(D, dtype=float)
        if B.ndim != 2 or B.shape != D.shape or B.shape[0] != B.shape[1] or B.shape[0] % 2:
            raise InvalidArgument("B and D must be square 2n x 2n matrices of equal shape")
        n = B.shape[0] // 2
        Om = omega(n)
        K = Om.T @ B
        gen = QuadraticGenerator(0.5 * (K + K.T))
        F = 0.5 * (K - K.T)
        # F = (g/2) Omega recovers the rate form
        half_rate = np.trace(F.T @ Om) / (2 * n)
        rate, M = None, None
        is_rate_form = np.linalg.norm(F - half_rate * Om) <= 1e-12 * max(np.linalg.norm(F), 1.0)
        if is_rate_form and half_rate > 0:
            rate, M = 2.0 * half_rate, D / (2.0 * half_rate)
        return cls(B, D, gen, rate, M)

    def cp_violations(self) -> List[str]:
        """Human-readable list of failed complete-positivity conditions."""
        problems = []
        Om = omega(self.n)
        Ba = Om.T @ self.B - self.B.T @ Om
        H = self.D + 1j * Om @ Ba @ Om.T
        low = float(np.linalg.eigvalsh(0.5 * (H + H.conj().T))[0])
        if low < -CP_TOL:
            problems.append(
                f"D + i Omega B_a Omega^T has eigenvalue {low:.6g} < 0 "
                "(dynamics not completely positive)")
        if (self.n == 1 and self.M is not None and self.dissipation_rate
                and np.linalg.det(self.M) < 1 - CP_TOL):
            problems.append(f"det M = {np.linalg.det(self.M):.6g} < 1")
        return problems


@dataclass(frozen=True)
class QBMParams:
    """High-temperature quantum Brownian motion parameters."""

    omega: float
    gamma: float
    beta_B: float

    def __post_init__(self):
        for name in ("omega", "gamma", "beta_B"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise InvalidArgument(f"{name} must be positive, got {value!r}")

    @property
    def Delta(self) -> float:
        w, gam, b = self.omega, self.gamma, self.beta_B
        return gam / b + 12 * gam * (w**2 - gam**2) / b

    @property
    def Pi(self) -> float:
        return -self.gamma * self.beta_B / 12

    @property
    def M(self) -> np.ndarray:
        off = -self.Pi / 2
        return np.array([[self.Delta, off], [off, 0.0]]) / self.gamma

    @property
    def dissipation_rate(self) -> float:
        return 2 * self.gamma


def qbm_dynamics(params: QBMParams) -> OpenDynamics:
    """Map QBM onto the rate form: G = omega*I, rate 2*gamma, M as above.

    This M has negative determinant for every finite bath temperature, so a
    :class:`DynamicsWarning` is always emitted.
    """
    return OpenDynamics.from_rate(
        QuadraticGenerator.harmonic(params.omega), params.dissipation_rate, params.M)
