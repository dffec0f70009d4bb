import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gqsl.errors import InvalidArgument, PrecisionFailure
from gqsl.metric import (
    differential_fidelity,
    distance_theta,
    fidelity,
    infidelity,
    oracle_phase_space_fidelity,
    theta_from_fidelity,
)
from gqsl.sampling import random_state, random_symmetric
from gqsl.states import GaussianState, displace, make_vacuum

seeds = st.integers(0, 2**32 - 1)


def test_vacuum_vs_thermal_eta_3():
    thermal = GaussianState(3.0 * np.eye(2), None)
    fv = fidelity(make_vacuum(1), thermal)
    assert fv.F == pytest.approx(math.sqrt(3) / 2, rel=1e-14)
    assert fv.theta == pytest.approx(0.749468865417480150, rel=1e-13)


def test_displaced_vacuum_overlap():
    # coherent states: |<alpha|beta>|^2 = exp(-|alpha - beta|^2), alpha = (q + ip)/sqrt(2)
    a = make_vacuum(1)
    b = displace(a, [1.0, 1.0])
    assert fidelity(a, b).F == pytest.approx(math.exp(-1.0), rel=1e-14)


@given(seeds, st.integers(1, 3))
@settings(max_examples=50, deadline=None)
def test_symmetric_and_bounded(seed, n):
    rng = np.random.default_rng(seed)
    a, b = random_state(n, rng), random_state(n, rng)
    fab, fba = fidelity(a, b).F, fidelity(b, a).F
    assert fab == pytest.approx(fba, rel=1e-10)
    assert 0.0 <= fab <= 1.0 + 1e-12


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_infidelity_keeps_precision_for_close_states(seed):
    rng = np.random.default_rng(seed)
    s = random_state(2, rng)
    eps = 1e-9
    dS = random_symmetric(4, rng)
    du = rng.normal(size=4)
    t = GaussianState(s.Sigma + eps * dS, s.u + eps * du)
    expected = 1.0 - differential_fidelity(s.Sigma, eps * dS, eps * du)
    assert infidelity(s, t) == pytest.approx(expected, rel=1e-5)


def test_theta_from_fidelity_clips():
    assert theta_from_fidelity(1.0 + 1e-15) == 0.0
    assert theta_from_fidelity(-1e-15) == pytest.approx(math.pi)


def test_distance_mismatch_rejected():
    with pytest.raises(InvalidArgument):
        distance_theta(make_vacuum(1), make_vacuum(2))
    with pytest.raises(InvalidArgument):
        fidelity(make_vacuum(1, 1.0), make_vacuum(1, 2.0))


def test_oracle_matches_closed_form(rng):
    a = random_state(1, rng, scale=0.3)
    b = random_state(1, rng, scale=0.3)
    assert oracle_phase_space_fidelity(a, b) == pytest.approx(fidelity(a, b).F, abs=1e-6)


def test_oracle_refuses_coarse_grid(rng):
    a = random_state(1, rng, scale=0.3)
    b = random_state(1, rng, scale=0.3)
    with pytest.raises(PrecisionFailure):
        oracle_phase_space_fidelity(a, b, points=15)


def test_oracle_single_mode_only():
    with pytest.raises(InvalidArgument):
        oracle_phase_space_fidelity(make_vacuum(2), make_vacuum(2))
