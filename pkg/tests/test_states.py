import math

import numpy as np
import pytest

from gqsl.errors import InvalidArgument, InvalidState
from gqsl.states import (
    GaussianState,
    SqueezeSpec,
    displace,
    make_pure_squeezed,
    make_thermal_squeezed,
    make_vacuum,
    physicality_margin,
    purity,
    state_from_descriptor,
    thermal_eta,
    validate,
)

COTH_HALF = 2.16395341373865284877


def test_vacuum():
    s = make_vacuum(2, hbar=0.5)
    assert np.array_equal(s.Sigma, 0.5 * np.eye(4))
    assert purity(s) == pytest.approx(1.0)
    assert validate(s) is None


def test_thermal_eta_value_and_clamp():
    assert thermal_eta(1.0, 1.0) == pytest.approx(COTH_HALF, rel=1e-15)
    assert thermal_eta(200.0, 1.0) == 1.0
    with pytest.raises(InvalidArgument):
        thermal_eta(0.0, 1.0)


def test_thermal_squeezed_purity_is_inverse_eta():
    s = make_thermal_squeezed(1.0, 1.0, SqueezeSpec([0.7], [0.2]))
    assert purity(s) == pytest.approx(0.462117157260009758, rel=1e-12)


def test_squeezed_shape_has_unit_determinant():
    spec = SqueezeSpec([0.5, 1.2], [0.1, 2.0])
    assert np.linalg.det(spec.shape()) == pytest.approx(1.0)
    assert np.allclose(spec.squeeze_matrix().diagonal(),
                       [math.exp(0.5), math.exp(-0.5), math.exp(1.2), math.exp(-1.2)])


def test_squeeze_spec_validation():
    with pytest.raises(InvalidArgument):
        SqueezeSpec([-0.1])
    with pytest.raises(InvalidArgument):
        SqueezeSpec([0.1, 0.2], [0.0])


def test_validate_reports_first_violation():
    asym = GaussianState(np.array([[1.0, 0.1], [0.0, 1.0]]), None)
    assert validate(asym).invariant == "symmetry"
    too_pure = GaussianState(0.5 * np.eye(2), None)
    assert validate(too_pure).invariant == "physicality"
    assert physicality_margin(too_pure) == pytest.approx(-0.5)
    with pytest.raises(InvalidState):
        too_pure.check()


def test_physicality_scales_with_hbar():
    # the same shape is valid at any hbar
    for hbar in (1e-3, 1.0, 7.0):
        assert validate(make_pure_squeezed(SqueezeSpec([2.0], [0.4]), hbar)) is None


def test_construction_checks_shapes():
    with pytest.raises(InvalidArgument):
        GaussianState(np.eye(3), None)
    with pytest.raises(InvalidArgument):
        GaussianState(np.eye(2), [0.0])
    with pytest.raises(InvalidArgument):
        GaussianState(np.eye(2), None, hbar=0.0)


def test_state_is_immutable():
    s = make_vacuum(1)
    with pytest.raises(ValueError):
        s.Sigma[0, 0] = 3.0


def test_displace():
    s = displace(make_vacuum(1), [1.0, -2.0])
    assert np.array_equal(s.u, [1.0, -2.0])
    with pytest.raises(InvalidArgument):
        displace(s, [1.0])


def test_descriptor_round_trip():
    s = state_from_descriptor({"r": [0.3], "theta": [0.5], "beta_s": 1.0, "omega": 1.0,
                               "u": [0.1, 0.2], "hbar": 2.0})
    ref = displace(make_thermal_squeezed(1.0, 1.0, SqueezeSpec([0.3], [0.5]), 2.0), [0.1, 0.2])
    assert np.allclose(s.Sigma, ref.Sigma) and np.allclose(s.u, ref.u)
    assert s.hbar == 2.0


@pytest.mark.parametrize("desc", [
    {"r": [0.1], "colour": 1},
    {"n": 2, "r": [0.1]},
    {"beta_s": 1.0},
])
def test_descriptor_rejects(desc):
    with pytest.raises(InvalidArgument):
        state_from_descriptor(desc)
