import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gqsl.errors import InvalidArgument, InvalidState
from gqsl.sampling import random_state, random_symplectic
from gqsl.symplectic import (
    QuadraticGenerator,
    is_symplectic,
    omega,
    propagator,
    rotation,
    single_mode_generator,
    symplectic_defect,
    symplectic_eigenvalues,
)

angles = st.floats(-10, 10, allow_nan=False)


def test_omega_block_structure():
    Om = omega(2)
    assert np.array_equal(Om @ Om, -np.eye(4))
    assert Om[0, 1] == 1 and Om[1, 0] == -1 and Om[2, 3] == 1
    with pytest.raises(InvalidArgument):
        omega(0)


@given(angles)
def test_rotation_is_exp_of_omega(theta):
    import scipy.linalg

    assert np.allclose(rotation(theta), scipy.linalg.expm(theta * omega(1)), atol=1e-12)


def test_harmonic_propagator_is_clockwise_rotation():
    S = propagator(QuadraticGenerator.harmonic(1.0), 0.3)
    assert np.allclose(S, rotation(0.3))


@given(st.integers(1, 3), st.integers(0, 2**32 - 1), st.floats(-3, 3))
@settings(max_examples=40, deadline=None)
def test_propagators_are_symplectic(n, seed, t):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(2 * n, 2 * n))
    S = propagator(QuadraticGenerator(0.5 * (X + X.T)), t)
    assert symplectic_defect(S) <= 1e-10 * max(1.0, np.linalg.norm(S) ** 2)


def test_propagator_zero_and_nonfinite_time():
    G = QuadraticGenerator(np.diag([1.0, 2.0]))
    assert np.array_equal(propagator(G, 0.0), np.eye(2))
    with pytest.raises(InvalidArgument):
        propagator(G, math.nan)


def test_is_symplectic_rejects_plain_scaling():
    assert not is_symplectic(2 * np.eye(2))
    assert is_symplectic(np.diag([2.0, 0.5]))


def test_generator_symmetry_check_and_immutability():
    with pytest.raises(InvalidArgument):
        QuadraticGenerator(np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(InvalidArgument):
        QuadraticGenerator(np.eye(3))
    G = QuadraticGenerator(np.eye(2))
    with pytest.raises(ValueError):
        G.G[0, 0] = 5.0


def test_single_mode_generator_phi_is_mod_pi():
    a = single_mode_generator(0.4, 1.3, 0.2)
    b = single_mode_generator(0.4, 1.3, 0.2 + math.pi)
    assert np.allclose(a.G, b.G)
    assert b.phi == pytest.approx(0.2)


def test_single_mode_squeezing_part_rotates():
    phi = 0.37
    G2 = np.array([[0.0, 1.0], [1.0, 0.0]])
    expected = rotation(phi) @ G2 @ rotation(phi).T
    assert np.allclose(single_mode_generator(0.0, 1.0, phi).G, expected)


def test_symplectic_eigenvalues_invariant_under_symplectic_congruence(rng):
    nu = np.array([3.0, 1.5, 1.0])
    S = random_symplectic(3, rng)
    Sigma = S @ np.diag(np.repeat(nu, 2)) @ S.T
    assert np.allclose(symplectic_eigenvalues(Sigma), nu, rtol=1e-8)
    assert np.allclose(symplectic_eigenvalues(2 * Sigma, hbar=2.0), nu, rtol=1e-8)


def test_symplectic_eigenvalues_degenerate_multiplicity():
    assert np.allclose(symplectic_eigenvalues(np.eye(4)), [1.0, 1.0])


def test_symplectic_eigenvalues_reject_bad_input(rng):
    with pytest.raises(InvalidState):
        symplectic_eigenvalues(np.array([[1.0, 0.5], [0.0, 1.0]]))
    with pytest.raises(InvalidState):
        symplectic_eigenvalues(np.diag([1.0, -1.0]))


def test_random_states_respect_uncertainty(rng):
    for _ in range(20):
        s = random_state(2, rng)
        assert symplectic_eigenvalues(s.Sigma, s.hbar)[-1] >= 1 - 1e-10
