"""Real symplectic linear algebra in the (q1, p1, ..., qn, pn) ordering."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
import scipy.linalg

from gqsl.errors import InvalidArgument, InvalidState

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])

G0 = np.eye(2)
G1 = np.diag([1.0, -1.0])
G2 = np.array([[0.0, 1.0], [1.0, 0.0]])


def omega(n: int) -> np.ndarray:
    """Symplectic form for ``n`` modes: block diagonal with [[0, 1], [-1, 0]]."""
    if int(n) != n or n < 1:
        raise InvalidArgument(f"mode count must be a positive integer, got {n!r}")
    return np.kron(np.eye(int(n)), _J)


def rotation(theta: float) -> np.ndarray:
    """R(theta) = [[cos, sin], [-sin, cos]], equal to exp(theta * omega(1))."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def _mode_count(dim: int) -> int:
    if dim % 2:
        raise InvalidArgument(f"phase-space dimension must be even, got {dim}")
    return dim // 2


def symplectic_defect(S: np.ndarray) -> float:
    """Frobenius norm of S Omega S^T - Omega."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise InvalidArgument(f"expected a square matrix, got shape {S.shape}")
    Om = omega(_mode_count(S.shape[0]))
    return float(np.linalg.norm(S @ Om @ S.T - Om))


def is_symplectic(S: np.ndarray, tol: float = 1e-8) -> bool:
    return symplectic_defect(S) <= tol


@dataclass(frozen=True)
class QuadraticGenerator:
    """Symmetric matrix G of the Hamiltonian H = z^T G z / 2.

    ``g0``, ``gS`` and ``phi`` are kept when the generator was built from the
    single-mode parametrization, and are ``None`` otherwise.
    """

    G: np.ndarray
    g0: Optional[float] = None
    gS: Optional[float] = None
    phi: Optional[float] = None
    n: int = field(init=False)

    def __post_init__(self):
        G = np.array(self.G, dtype=float)
        if G.ndim != 2 or G.shape[0] != G.shape[1]:
            raise InvalidArgument(f"generator must be square, got shape {G.shape}")
        n = _mode_count(G.shape[0])
        scale = max(np.linalg.norm(G), 1.0)
        if np.linalg.norm(G - G.T) > 1e-12 * scale:
            raise InvalidArgument("generator matrix is not symmetric")
        G = 0.5 * (G + G.T)
        G.setflags(write=False)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "n", n)

    @property
    def drift(self) -> np.ndarray:
        """A = Omega G."""
        return omega(self.n) @ self.G

    @classmethod
    def harmonic(cls, omega_: float, n: int = 1) -> "QuadraticGenerator":
        """Uniform oscillator G = omega * I."""
        return cls(omega_ * np.eye(2 * n))


GeneratorLike = Union[QuadraticGenerator, np.ndarray]


def as_generator(G: GeneratorLike) -> QuadraticGenerator:
    if isinstance(G, QuadraticGenerator):
        return G
    return QuadraticGenerator(np.asarray(G, dtype=float))


def single_mode_generator(g0: float, gS: float, phi: float) -> QuadraticGenerator:
    """G = g0*G0 + gS*(sin(2 phi) G1 + cos(2 phi) G2).

    The squeezing part equals gS * R(phi) G2 R(phi)^T, so ``phi`` only
    matters modulo pi.
    """
    G = g0 * G0 + gS * (np.sin(2 * phi) * G1 + np.cos(2 * phi) * G2)
    return QuadraticGenerator(G, g0=float(g0), gS=float(gS), phi=float(np.mod(phi, np.pi)))


def propagator(G: GeneratorLike, t: float) -> np.ndarray:
    """Symplectic propagator S(t) = exp(Omega G t) for a time-independent G."""
    if not np.isfinite(t):
        raise InvalidArgument(f"time must be finite, got {t!r}")
    gen = as_generator(G)
    if t == 0:
        return np.eye(2 * gen.n)
    return scipy.linalg.expm(gen.drift * t)


def symplectic_eigenvalues(Sigma: np.ndarray, hbar: float = 1.0) -> np.ndarray:
    """Symplectic eigenvalues of ``Sigma`` in units of ``hbar``, descending.

    The eigenvalues of Omega Sigma / hbar come in pairs +-i nu_k; the moduli
    are sorted and every other one is kept, so degenerate values appear
    with their multiplicity.
    """
    Sigma = np.asarray(Sigma, dtype=float)
    if hbar <= 0:
        raise InvalidArgument(f"hbar must be positive, got {hbar!r}")
    if Sigma.ndim != 2 or Sigma.shape[0] != Sigma.shape[1]:
        raise InvalidState(f"covariance must be square, got shape {Sigma.shape}")
    n = _mode_count(Sigma.shape[0])
    scale = max(np.linalg.norm(Sigma), 1e-300)
    if np.linalg.norm(Sigma - Sigma.T) > 1e-12 * scale:
        raise InvalidState("covariance matrix is not symmetric")
    if np.linalg.eigvalsh(0.5 * (Sigma + Sigma.T))[0] <= 0:
        raise InvalidState("covariance matrix is not positive definite")

    moduli = np.sort(np.abs(np.linalg.eigvals(omega(n) @ Sigma / hbar)))[::-1]
    pairs = moduli.reshape(n, 2)
    mismatch = np.abs(pairs[:, 0] - pairs[:, 1])
    if np.any(mismatch > 1e-8 * np.maximum(pairs[:, 0], 1.0)):
        raise InvalidState("eigenvalues of Omega Sigma do not pair up")
    return pairs.mean(axis=1)
