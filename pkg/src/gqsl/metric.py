"""Relative-purity fidelity between Gaussian states and the derived angle.

For Gaussian states the trace ratio tr(rho sigma) / sqrt(tr rho^2 tr sigma^2)
reduces to

    F = (det S1 det S2)^(1/4) / det((S1 + S2)/2)^(1/2) * exp(-du^T (S1 + S2)^-1 du)

which is 1 for identical states. The determinant ratio is evaluated through
the eigenvalues of S1^-1 (S2 - S1) so that nearby states keep full relative
precision in 1 - F.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gqsl.errors import InvalidArgument, NumericalFailure, PrecisionFailure
from gqsl.states import GaussianState


@dataclass(frozen=True)
class FidelityValue:
    F: float
    theta: float


def _check_pair(a: GaussianState, b: GaussianState) -> None:
    if a.n != b.n:
        raise InvalidArgument(f"mode-count mismatch: {a.n} vs {b.n}")
    if a.hbar != b.hbar:
        raise InvalidArgument(f"hbar mismatch: {a.hbar} vs {b.hbar}")


def log_fidelity_arrays(S1, u1, S2, u2) -> np.ndarray:
    """log F for (stacks of) covariances and means; leading axes broadcast."""
    S1 = np.asarray(S1, dtype=float)
    S2 = np.asarray(S2, dtype=float)
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    S1, S2 = np.broadcast_arrays(S1, S2)
    try:
        L = np.linalg.cholesky(S1)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("covariance is not positive definite") from exc
    # X = L^-1 (S2 - S1) L^-T shares its spectrum with S1^-1 (S2 - S1)
    Y = np.linalg.solve(L, S2 - S1)
    X = np.linalg.solve(L, np.swapaxes(Y, -1, -2))
    lam = np.linalg.eigvalsh(0.5 * (X + np.swapaxes(X, -1, -2)))
    if np.any(lam <= -1):
        raise NumericalFailure("covariance is not positive definite")
    log_cov = np.sum(0.25 * np.log1p(lam) - 0.5 * np.log1p(0.5 * lam), axis=-1)

    du = u2 - u1
    try:
        w = np.linalg.solve(S1 + S2, du[..., None])[..., 0]
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("Sigma1 + Sigma2 is singular") from exc
    return log_cov - np.sum(du * w, axis=-1)


def theta_from_fidelity(F):
    """Theta = 2 arccos sqrt(F), with F clipped into [0, 1]."""
    return 2.0 * np.arccos(np.sqrt(np.clip(F, 0.0, 1.0)))


def fidelity(a: GaussianState, b: GaussianState) -> FidelityValue:
    _check_pair(a, b)
    F = float(np.exp(log_fidelity_arrays(a.Sigma, a.u, b.Sigma, b.u)))
    return FidelityValue(F, float(theta_from_fidelity(F)))


def infidelity(a: GaussianState, b: GaussianState) -> float:
    """1 - F computed without cancellation for nearby states."""
    _check_pair(a, b)
    return float(-np.expm1(log_fidelity_arrays(a.Sigma, a.u, b.Sigma, b.u)))


def distance_theta(a: GaussianState, b: GaussianState) -> float:
    return fidelity(a, b).theta


def differential_fidelity(Sigma, dSigma, du) -> float:
    """Second-order expansion 1 - tr((S^-1 dS)^2)/16 - du^T S^-1 du / 2."""
    Sigma = np.asarray(Sigma, dtype=float)
    dSigma = np.asarray(dSigma, dtype=float)
    du = np.asarray(du, dtype=float)
    if du.shape != (Sigma.shape[0],):
        raise InvalidArgument(f"du must have length {Sigma.shape[0]}")
    try:
        B = np.linalg.solve(Sigma, dSigma)
        w = np.linalg.solve(Sigma, du)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("Sigma is singular") from exc
    return float(1.0 - np.trace(B @ B) / 16.0 - 0.5 * du @ w)


def _gaussian_overlap_grid(u_a, C_a, u_b, C_b, X, Y, dx, dy):
    """Trapezoidal integral of N(z; u_a, C_a) N(z; u_b, C_b) over the grid."""

    def density(u, C):
        P = np.linalg.inv(C)
        zx, zy = X - u[0], Y - u[1]
        q = P[0, 0] * zx**2 + 2 * P[0, 1] * zx * zy + P[1, 1] * zy**2
        return np.exp(-0.5 * q) / (2 * np.pi * np.sqrt(np.linalg.det(C)))

    f = density(u_a, C_a) * density(u_b, C_b)
    wx = np.full(X.shape[1], dx)
    wx[[0, -1]] *= 0.5
    wy = np.full(X.shape[0], dy)
    wy[[0, -1]] *= 0.5
    return float(wy @ f @ wx)


def _grid_fidelity(a: GaussianState, b: GaussianState, points: int, width: float) -> float:
    Ca, Cb = a.Sigma / 2.0, b.Sigma / 2.0
    sigma = np.sqrt(max(np.linalg.eigvalsh(Ca)[-1], np.linalg.eigvalsh(Cb)[-1]))
    lo = np.minimum(a.u, b.u) - width * sigma
    hi = np.maximum(a.u, b.u) + width * sigma
    xs = np.linspace(lo[0], hi[0], points)
    ys = np.linspace(lo[1], hi[1], points)
    X, Y = np.meshgrid(xs, ys)
    dx, dy = xs[1] - xs[0], ys[1] - ys[0]
    I_ab = _gaussian_overlap_grid(a.u, Ca, b.u, Cb, X, Y, dx, dy)
    I_aa = _gaussian_overlap_grid(a.u, Ca, a.u, Ca, X, Y, dx, dy)
    I_bb = _gaussian_overlap_grid(b.u, Cb, b.u, Cb, X, Y, dx, dy)
    return I_ab / np.sqrt(I_aa * I_bb)


def oracle_phase_space_fidelity(a: GaussianState, b: GaussianState,
                                points: int = 401, width: float = 8.0,
                                tol: float = 1e-6) -> float:
    """Single-mode fidelity from Wigner-function overlaps on a 2-D grid.

    Test oracle only. Each Wigner function is a normalized Gaussian with
    covariance Sigma/2; the ratio I_ab / sqrt(I_aa I_bb) cancels all
    prefactors. The grid spans ``width`` standard deviations (of the widest
    direction) around both means. The result is compared against a grid
    with twice the resolution and :class:`PrecisionFailure` is raised if
    they differ by more than ``tol``.
    """
    _check_pair(a, b)
    if a.n != 1:
        raise InvalidArgument("phase-space oracle supports a single mode only")
    coarse = _grid_fidelity(a, b, points, width)
    fine = _grid_fidelity(a, b, 2 * points - 1, width)
    if abs(fine - coarse) > tol:
        raise PrecisionFailure(
            f"oracle grid unresolved: {coarse:.10g} vs {fine:.10g} on refinement")
    return fine
