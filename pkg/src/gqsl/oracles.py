"""Independent numerical checks used by the self-test and the test suite."""

from __future__ import annotations

from typing import Callable

from gqsl.errors import InvalidArgument
from gqsl.metric import infidelity
from gqsl.states import GaussianState

Stepper = Callable[[GaussianState, float], GaussianState]

# weights cancelling the O(h) and O(h^2) terms of (1 - F(h)) / h^2
_RICHARDSON = {
    1: (1.0,),
    2: (-1.0, 2.0),
    3: (1.0 / 3.0, -2.0, 8.0 / 3.0),
}


def finite_difference_speed(state: GaussianState, step: Stepper, dt: float = 1e-4,
                            levels: int = 2) -> float:
    """V^2 from 1 - F(rho, rho_h) = V^2 h^2 + O(h^3), Richardson-extrapolated.

    Uses h = dt, dt/2, ... (``levels`` values). ``step(state, h)`` must
    return the state evolved by ``h``; an exact propagator keeps the
    estimate free of integrator error.
    """
    if levels not in _RICHARDSON:
        raise InvalidArgument(f"levels must be 1, 2 or 3, got {levels}")
    total = 0.0
    for k, weight in enumerate(_RICHARDSON[levels]):
        h = dt / 2**k
        total += weight * infidelity(state, step(state, h)) / h**2
    return total
