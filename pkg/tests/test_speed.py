import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gqsl.dynamics import evolve_open_exact, evolve_unitary, qbm_speed_closed_form
from gqsl.errors import DegenerateGenerator, InvalidArgument, PreconditionViolation, Unsupported
from gqsl.models import DynamicsWarning, OpenDynamics, QBMParams, qbm_dynamics
from gqsl.oracles import finite_difference_speed
from gqsl.sampling import random_generator, random_rate_dynamics, random_state
from gqsl.speed import (
    SpeedReport,
    chi_nu_high_temp,
    large_n_equivalents,
    single_mode_extrema,
    speed_harmonic,
    speed_open,
    speed_open_split,
    speed_single_mode,
    speed_unitary,
    speed_unitary_pure,
)
from gqsl.states import SqueezeSpec, make_pure_squeezed, make_thermal_squeezed, make_vacuum
from gqsl.symplectic import QuadraticGenerator


def quiet_qbm(omega_, gamma, beta_B):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DynamicsWarning)
        return qbm_dynamics(QBMParams(omega_, gamma, beta_B))


def test_vacuum_is_stationary_under_oscillator():
    rep = speed_unitary(make_vacuum(2), QuadraticGenerator.harmonic(1.3, 2))
    assert rep.v2_total == pytest.approx(0.0, abs=1e-15)
    assert math.isinf(rep.tau_q)
    assert rep.to_dict()["tau_q"] == "inf"


@pytest.mark.parametrize("omega_, expected", [(1.0, 0.690548922770907865),
                                              (2.0, 2.76219569108363146)])
def test_harmonic_squeezed_speed(omega_, expected):
    rep = speed_harmonic(SqueezeSpec([1.0]), [0.0, 0.0], omega_)
    assert rep.v2_total == pytest.approx(expected, rel=1e-14)


def test_displacement_speed_scales_inverse_hbar():
    v = [0.3, -0.4]
    a = speed_harmonic(SqueezeSpec([0.0]), v, 1.0, hbar=1.0).v2_mean
    b = speed_harmonic(SqueezeSpec([0.0]), v, 1.0, hbar=0.01).v2_mean
    assert b == pytest.approx(100 * a, rel=1e-13)


def test_pure_form_rejects_mixed_state(rng):
    with pytest.raises(PreconditionViolation):
        speed_unitary_pure(random_state(1, rng), random_generator(1, rng))


def test_pure_form_hbar_covariance(rng):
    s = random_state(2, rng, pure=True, hbar=0.2)
    G = random_generator(2, rng)
    assert speed_unitary_pure(s, G).v2_total == pytest.approx(speed_unitary(s, G).v2_total,
                                                              rel=1e-10)


def test_dimension_mismatch(rng):
    with pytest.raises(InvalidArgument):
        speed_unitary(make_vacuum(1), QuadraticGenerator.harmonic(1.0, 2))


def test_speed_report_totals():
    rep = SpeedReport(0.5, 0.25)
    assert rep.v2_total == 0.75
    assert rep.tau_q == pytest.approx(1 / math.sqrt(0.75))
    assert rep.to_dict()["v2_unitary"] is None


def test_optimum_at_r_035():
    r = 0.35
    value = speed_single_mode(r, 3 * math.pi / 4, math.tanh(r), 1.0)
    assert value == pytest.approx(0.698594752217161119, rel=1e-14)


def test_extrema_frozen_values():
    g = 1 / math.sqrt(2)
    rep = single_mode_extrema(2.0, g, g)
    assert rep.v2_max == pytest.approx(13.6495375082860598, rel=1e-13)
    assert rep.v2_min == pytest.approx(0.00457890972218354507, rel=1e-11)
    assert not rep.branch
    assert rep.delta_max == pytest.approx(3 * math.pi / 4)


def test_zero_speed_hamiltonian():
    # gS/g0 = tanh r removes all motion at the minimizing angle
    r = 0.8
    rep = single_mode_extrema(r, 1.0, math.tanh(r))
    assert rep.v2_min == pytest.approx(0.0, abs=1e-15)
    assert speed_single_mode(r, rep.delta_min[0], 1.0, math.tanh(r)) == pytest.approx(0, abs=1e-15)


def test_opposite_ratio_minimum_is_independent_of_direction():
    r, gS = 0.8, 1.3
    rep = single_mode_extrema(r, gS * math.tanh(r), gS)
    assert rep.branch
    assert rep.v2_min == pytest.approx(gS**2 / (2 * math.cosh(r) ** 2), rel=1e-13)
    for d in rep.delta_min:
        assert speed_single_mode(r, d, gS * math.tanh(r), gS) == pytest.approx(rep.v2_min)


def test_extrema_degenerate_and_invalid():
    with pytest.raises(DegenerateGenerator):
        single_mode_extrema(1.0, 0.0, 0.0)
    with pytest.raises(InvalidArgument):
        single_mode_extrema(-1.0, 1.0, 1.0)


@given(st.floats(0.0, 3.0), st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=100, deadline=None)
def test_extrema_bracket_profile(r, g0, gS):
    if abs(g0) + abs(gS) < 1e-3:
        return
    rep = single_mode_extrema(r, g0, gS)
    profile = speed_single_mode(r, np.linspace(0, math.pi, 721), g0, gS)
    scale = max(rep.v2_max, 1e-12)
    assert profile.max() <= rep.v2_max + 1e-12 * scale
    assert profile.min() >= rep.v2_min - 1e-12 * scale
    assert speed_single_mode(r, rep.delta_max, g0, gS) == pytest.approx(rep.v2_max, rel=1e-10)


def test_open_split_consistency(rng):
    for _ in range(20):
        rep = speed_open(random_state(1, rng), random_rate_dynamics(rng))
        assert rep.v2_unitary + rep.chi_nu == pytest.approx(rep.v2_cov, rel=1e-10)


def test_open_reduces_to_unitary(rng):
    s = random_state(2, rng)
    G = random_generator(2, rng)
    a = speed_open(s, OpenDynamics.unitary(G))
    b = speed_unitary(s, G)
    assert a.v2_total == pytest.approx(b.v2_total, rel=1e-12)
    assert a.v2_unitary is None  # split is one-mode only


def test_split_multimode_unsupported(rng):
    with pytest.raises(Unsupported):
        speed_open_split(random_state(2, rng), OpenDynamics.unitary(random_generator(2, rng)))


def test_qbm_spot_value():
    state = make_thermal_squeezed(1.0, 1.0, SqueezeSpec([0.0]))
    rep = speed_open(state, quiet_qbm(1.0, 1.0, 0.1))
    assert rep.v2_unitary == pytest.approx(0.0, abs=1e-15)
    assert rep.v2_cov == pytest.approx(3.5283, abs=1e-3)
    assert qbm_speed_closed_form(1.0, 0.1, 1.0, 1.0) == pytest.approx(3.52822088955176595,
                                                                      rel=1e-14)


def test_qbm_closed_form_error_is_order_beta_B():
    state = make_thermal_squeezed(1.0, 1.0, SqueezeSpec([0.0]))
    errs = []
    for beta_B in (0.02, 0.01):
        exact = speed_open(state, quiet_qbm(1.0, 1.0, beta_B)).v2_cov
        errs.append(abs(exact - qbm_speed_closed_form(1.0, beta_B, 1.0, 1.0)) / exact)
    assert errs[1] < errs[0]


def test_qbm_speed_off_resonance_matches_finite_difference(rng):
    # large diffusion rates: the third Richardson level is needed here
    for _ in range(5):
        gamma = rng.uniform(0.5, 1.5)
        dyn = quiet_qbm(gamma * rng.uniform(1.5, 2.0), gamma, rng.uniform(0.1, 1.0))
        s = random_state(1, rng)
        fd = finite_difference_speed(s, lambda x, h: evolve_open_exact(x, dyn, h), levels=3)
        assert fd == pytest.approx(speed_open(s, dyn).v2_total, rel=1e-5)


def test_high_temperature_plateau():
    dyn = quiet_qbm(1.0, 1.0, 0.1)
    hot = make_thermal_squeezed(1e-6, 1.0, SqueezeSpec([0.0]))
    assert speed_open(hot, dyn).v2_cov == pytest.approx(0.5, rel=1e-5)
    assert chi_nu_high_temp(hot, dyn) == pytest.approx(speed_open(hot, dyn).chi_nu, rel=1e-5)


def test_finite_difference_oracle_unitary(rng):
    s = random_state(2, rng)
    G = random_generator(2, rng)
    fd = finite_difference_speed(s, lambda x, h: evolve_unitary(x, G, h))
    assert fd == pytest.approx(speed_unitary(s, G).v2_total, rel=1e-5)
    with pytest.raises(InvalidArgument):
        finite_difference_speed(s, lambda x, h: x, levels=4)


def test_large_n_equivalent_squeezing():
    eq = large_n_equivalents(SqueezeSpec([0.1] * 100))
    assert eq.r_equivalent == pytest.approx(0.882552196316519855, rel=1e-14)
    # small r: r_eq ~ sqrt(n) r
    tiny = large_n_equivalents(SqueezeSpec([1e-4] * 100))
    assert tiny.r_equivalent == pytest.approx(1e-3, rel=1e-6)


def test_large_n_equivalent_reproduces_speed():
    n, r, w = 9, 0.4, 1.7
    means = np.tile([0.3, -0.2], (n, 1))
    multi = speed_harmonic(SqueezeSpec([r] * n), means.ravel(), w)
    eq = large_n_equivalents(SqueezeSpec([r] * n), means)
    single = speed_harmonic(SqueezeSpec([eq.r_equivalent]), [0.0, 0.0], w)
    assert single.v2_cov == pytest.approx(multi.v2_cov, rel=1e-12)
    assert eq.hbar_eff == pytest.approx(1 / (n * math.cosh(eq.r_equivalent)))
    assert large_n_equivalents(SqueezeSpec([0.0] * n)).hbar_eff == pytest.approx(1 / n)


def test_squeezed_harmonic_speed_grows_like_cosh(rng):
    r = np.array([0.5, 1.0, 2.0])
    v2 = [speed_unitary(make_pure_squeezed(SqueezeSpec([x])), QuadraticGenerator.harmonic(1.0))
          .v2_total for x in r]
    assert np.allclose(v2, np.sinh(r) ** 2 / 2, rtol=1e-12)
