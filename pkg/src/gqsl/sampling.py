"""Random states, generators and dynamics for oracle sweeps."""

from __future__ import annotations

import numpy as np
import scipy.linalg

from gqsl.models import OpenDynamics
from gqsl.states import GaussianState
from gqsl.symplectic import QuadraticGenerator, omega


def random_symmetric(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    X = rng.normal(scale=scale, size=(dim, dim))
    return 0.5 * (X + X.T)


def random_symplectic(n: int, rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    """exp(Omega H) for a random symmetric H; ``scale`` sets the squeezing spread."""
    return scipy.linalg.expm(omega(n) @ random_symmetric(2 * n, rng, scale))


def random_state(n: int, rng: np.random.Generator, *, pure: bool = False,
                 displaced: bool = True, hbar: float = 1.0,
                 nu_max: float = 3.0, scale: float = 0.5) -> GaussianState:
    """hbar * S K S^T with symplectic eigenvalues drawn from [1, nu_max]."""
    S = random_symplectic(n, rng, scale)
    nu = np.ones(n) if pure else rng.uniform(1.0, nu_max, size=n)
    K = np.diag(np.repeat(nu, 2))
    Sigma = hbar * S @ K @ S.T
    u = rng.normal(size=2 * n) if displaced else np.zeros(2 * n)
    return GaussianState(0.5 * (Sigma + Sigma.T), u, hbar)


def random_generator(n: int, rng: np.random.Generator, scale: float = 1.0) -> QuadraticGenerator:
    return QuadraticGenerator(random_symmetric(2 * n, rng, scale))


def random_rate_dynamics(rng: np.random.Generator) -> OpenDynamics:
    """Single-mode rate-form dynamics with det M >= 1 (completely positive)."""
    G = random_generator(1, rng)
    g = rng.uniform(0.1, 2.0)
    S = random_symplectic(1, rng, 0.4)
    M = rng.uniform(1.0, 4.0) * S @ S.T
    return OpenDynamics.from_rate(G, g, 0.5 * (M + M.T))
