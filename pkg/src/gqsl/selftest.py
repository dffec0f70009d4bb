"""Oracle suites run by ``gqsl selftest``."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import List

import numpy as np

from gqsl.dynamics import check_bound, evolve_open, evolve_open_exact, evolve_unitary
from gqsl.errors import GqslError
from gqsl.metric import fidelity, oracle_phase_space_fidelity
from gqsl.models import DynamicsWarning, QBMParams, qbm_dynamics
from gqsl.oracles import finite_difference_speed
from gqsl.sampling import random_generator, random_rate_dynamics, random_state
from gqsl.speed import (
    speed_harmonic,
    speed_open,
    speed_single_mode,
    speed_unitary,
    speed_unitary_pure,
)
from gqsl.states import SqueezeSpec, displace, make_pure_squeezed
from gqsl.symplectic import QuadraticGenerator, single_mode_generator


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def suite_normalization(rng, trials=50):
    worst = 0.0
    for k in range(trials):
        s = random_state(1 + k % 3, rng, pure=bool(k % 2))
        worst = max(worst, abs(fidelity(s, s).F - 1.0))
    return worst <= 1e-12, f"max |F(rho,rho)-1| = {worst:.2e}"


def suite_phase_space(rng, trials=5, grid_points=401):
    worst = 0.0
    for _ in range(trials):
        a = random_state(1, rng, scale=0.3)
        b = random_state(1, rng, scale=0.3)
        worst = max(worst, abs(fidelity(a, b).F - oracle_phase_space_fidelity(a, b, grid_points)))
    return worst <= 1e-6, f"max |F - F_grid| = {worst:.2e}"


def suite_finite_difference(rng, trials=5):
    worst = 0.0
    for _ in range(trials):
        s = random_state(2, rng)
        G = random_generator(2, rng)
        v2 = speed_unitary(s, G).v2_total
        fd = finite_difference_speed(s, lambda x, h: evolve_unitary(x, G, h))
        worst = max(worst, _rel(fd, v2))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DynamicsWarning)
        for _ in range(trials):
            gamma = rng.uniform(0.5, 1.5)
            omega_ = gamma * rng.uniform(1.0, 1.5)
            dyn = qbm_dynamics(QBMParams(omega_, gamma, rng.uniform(0.1, 1.0)))
            s = random_state(1, rng)
            v2 = speed_open(s, dyn).v2_total
            # diffusion rates ~ 12 gamma omega^2 / beta_B need the third level
            fd = finite_difference_speed(s, lambda x, h: evolve_open_exact(x, dyn, h), levels=3)
            worst = max(worst, _rel(fd, v2))
    return worst <= 1e-5, f"max relative deviation = {worst:.2e}"


def suite_equivalences(rng, trials=50):
    worst = 0.0
    for _ in range(trials):
        s = random_state(2, rng, pure=True)
        G = random_generator(2, rng)
        worst = max(worst, _rel(speed_unitary_pure(s, G).v2_total, speed_unitary(s, G).v2_total))

        spec = SqueezeSpec(rng.uniform(0, 1.5, 2), rng.uniform(0, np.pi, 2))
        w = rng.uniform(0.5, 2.0)
        pure = make_pure_squeezed(spec)
        u = rng.normal(size=4)
        v = spec.rotation_matrix().T @ u
        ref = speed_unitary(displace(pure, u), QuadraticGenerator.harmonic(w, 2))
        worst = max(worst, _rel(speed_harmonic(spec, v, w).v2_total, ref.v2_total))

        r, th, ph = rng.uniform(0, 2), rng.uniform(0, np.pi), rng.uniform(0, np.pi)
        g0, gS = rng.normal(size=2)
        one = make_pure_squeezed(SqueezeSpec([r], [th]))
        ref = speed_unitary(one, single_mode_generator(g0, gS, ph)).v2_total
        worst = max(worst, _rel(speed_single_mode(r, th - ph, g0, gS), ref))

        s1 = random_state(1, rng)
        dyn = random_rate_dynamics(rng)
        rep = speed_open(s1, dyn)
        worst = max(worst, _rel(rep.v2_unitary + rep.chi_nu, rep.v2_cov))
    return worst <= 1e-10, f"max relative deviation = {worst:.2e}"


def suite_bound(rng, trials=3):
    worst = np.inf
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DynamicsWarning)
        for _ in range(trials):
            s = random_state(1, rng, pure=True)
            rep = check_bound(evolve_open(s, random_generator(1, rng), 2.0, 1e-3), strict=False)
            worst = min(worst, rep.min_slack)
            dyn = qbm_dynamics(QBMParams(1.0, 1.0, rng.uniform(0.05, 0.2)))
            rep = check_bound(evolve_open(s, dyn, 2.0, 1e-3), strict=False)
            worst = min(worst, rep.min_slack)
    return worst >= -1e-8, f"min slack = {worst:.2e}"


def run_selftest(seed: int = 20240611, grid_points: int = 401) -> List[SuiteResult]:
    suites = [
        ("fidelity normalization", lambda rng: suite_normalization(rng)),
        ("fidelity vs phase-space oracle",
         lambda rng: suite_phase_space(rng, grid_points=grid_points)),
        ("speed vs finite difference", lambda rng: suite_finite_difference(rng)),
        ("closed-form equivalences", lambda rng: suite_equivalences(rng)),
        ("path-length bound", lambda rng: suite_bound(rng)),
    ]
    results = []
    for name, run in suites:
        rng = np.random.default_rng(seed)
        try:
            passed, detail = run(rng)
        except GqslError as exc:
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(SuiteResult(name, bool(passed), detail))
    return results


def format_results(results: List[SuiteResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}" for r in results]
    return "\n".join(lines)
