"""Acceptance criteria: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Each criterion carries its stated tolerance and, where stated, a
wall-clock budget that is asserted as part of the criterion.
"""

import time
from dataclasses import replace
from math import fsum

import numpy as np
import pytest
from scipy.integrate import quad

from infogeom import (
    DiracCombination,
    GridFunction,
    IntervalPartition,
    Measure,
    MixedPoint,
    StepFunction,
    TangentDirection,
    amari_chentsov,
    bernoulli,
    categorical,
    chentsov_invariance_residual,
    contraction_report,
    converges_mixed,
    density_at,
    dirac_approximate,
    discrete_space,
    dyadic_partitions,
    exp_inverse_power,
    exponential_family,
    factorized,
    factorized_projection,
    fisher,
    fisher_metric_field,
    grid_function,
    holder_bound_check,
    integrability_norm,
    integrate,
    interval_space,
    kernel_two_tensor,
    lebesgue,
    lp_norm,
    monotonicity_check,
    pushforward_map_continuity_probe,
    relabel_statistic,
    scaled_product_tensor,
    score,
    sufficiency_check,
    uniqueness_limit_probe,
    with_rescaled_reference,
)
from infogeom.suites import permutation_embedding, random_embedding, simplex_point


class criterion:
    """Times a criterion body and prints its pass/fail line."""

    def __init__(self, number, name, budget=None):
        self.number = number
        self.name = name
        self.budget = budget

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        status = "PASS" if exc_type is None else "FAIL"
        budget = f" (budget {self.budget:g} s)" if self.budget else ""
        print(f"ACCEPTANCE {self.number:2d} {self.name}: {status} in {elapsed:.2f} s{budget}")
        if exc_type is None and self.budget is not None:
            assert elapsed < self.budget, f"criterion {self.number} exceeded {self.budget} s"
        return False


def surjection(rng, space, m):
    target = discrete_space(tuple(range(m)))
    while True:
        table = rng.integers(0, m, size=space.size)
        if np.unique(table).size == m:
            return relabel_statistic(space, target, [int(t) for t in table])


def test_criterion_01_bernoulli_fisher():
    with criterion(1, "two-outcome Fisher closed form", budget=1.0):
        m = bernoulli()
        for x in np.arange(0.1, 0.91, 0.1):
            got = fisher(m, [x], [1.0], [1.0])
            assert abs(got - 1.0 / (x * (1.0 - x))) <= 1e-12


def test_criterion_02_monotonicity_1000_trials():
    with criterion(2, "information loss non-negative (1000 trials)", budget=10.0):
        rng = np.random.default_rng(20240201)
        for _ in range(1000):
            n = int(rng.integers(2, 9))
            m_targets = int(rng.integers(2, n + 1))
            model = categorical(n)
            kappa = surjection(rng, model.space, m_targets)
            x = simplex_point(rng, n)
            v = rng.standard_normal(n)
            assert monotonicity_check(model, kappa, x, v).loss >= -1e-10


def test_criterion_03_contraction_1000_trials():
    with criterion(3, "fiber average contracts L^p (1000 trials)", budget=10.0):
        rng = np.random.default_rng(20240202)
        for _ in range(1000):
            n = int(rng.integers(2, 9))
            m_targets = int(rng.integers(2, n + 1))
            space = discrete_space(tuple(range(n)))
            kappa = surjection(rng, space, m_targets)
            mu = Measure(space, rng.exponential(size=n) + 0.05)
            f = GridFunction(space, 2.0 * rng.standard_normal(n))
            p = float(rng.choice([2.0, 3.0, 4.0]))
            rep = contraction_report(kappa, f, mu, p)
            assert rep.norm_after <= rep.norm_before + 1e-12


def test_criterion_04_sufficiency():
    with criterion(4, "no loss under sufficient statistics", budget=5.0):
        model = factorized([0.5, 0.5])
        kappa = factorized_projection(model)
        xs = [np.array([x]) for x in np.linspace(0.1, 0.9, 9)]
        vs = [np.array([v]) for v in (0.5, 1.0, 2.0)]
        assert sufficiency_check(model, kappa, xs, vs) <= 1e-10
        rng = np.random.default_rng(20240203)
        cat = categorical(6)
        for _ in range(50):
            perm = rng.permutation(6)
            bij = relabel_statistic(cat.space, cat.space, [int(p) for p in perm])
            x = simplex_point(rng, 6)
            v = rng.standard_normal(6)
            assert monotonicity_check(cat, bij, x, v).loss == 0.0


def test_criterion_05_dirac_approximation():
    with criterion(5, "constructive Dirac approximation"):
        sp = interval_space(0.0, 1.0)
        leb = lebesgue(sp)
        f = grid_function(sp, lambda t: t)
        rng = np.random.default_rng(20240204)
        for part in dyadic_partitions(0.0, 1.0, 1024):
            gen = StepFunction(part, rng.standard_normal(part.n_cells))
            nu = dirac_approximate(leb, [gen])
            # generator integrals reproduced, mass preserved exactly
            assert abs(integrate(gen, nu) - integrate(gen, leb)) <= 1e-12
            assert nu.mass == leb.mass
            # midpoint representatives bound the identity-integrand error
            half_width = 0.5 / part.n_cells
            assert abs(integrate(f, nu) - 0.5) <= half_width + 1e-15


def test_criterion_06_uniqueness_limit():
    with criterion(6, "limiting procedure separates the Fisher value", budget=5.0):
        sp = interval_space(0.0, 1.0)
        mu = lebesgue(sp)
        f = grid_function(sp, lambda t: t)
        parts = dyadic_partitions(0.0, 1.0, 1024)
        unit = uniqueness_limit_probe(fisher_metric_field(2), mu, f, parts, tol=1e-3)
        assert unit.cells[-1] == 1024
        assert abs(unit.final_value - 1.0 / 3.0) <= 1e-3
        assert unit.converged
        contrast = uniqueness_limit_probe(
            scaled_product_tensor(grid_function(sp, lambda t: t), 1.0, 2), mu, f, parts
        )
        assert abs(contrast.final_value - 0.25) <= 1e-3
        assert abs(contrast.final_value - unit.reference) > 0.05  # separated


def test_criterion_07_chentsov_invariance():
    with criterion(7, "invariance under congruent embeddings", budget=5.0):
        rng = np.random.default_rng(20240205)
        fish = fisher_metric_field(2)
        eucl = kernel_two_tensor(
            lambda f, m: GridFunction(m.space, f.values * m.values), label="euclidean"
        )
        separated = 0
        for _ in range(500):
            n = int(rng.integers(2, 7))
            space = discrete_space(tuple(range(n)))
            mu = Measure(space, simplex_point(rng, n))
            u = rng.standard_normal(n)
            u -= u.mean()
            u /= np.linalg.norm(u)
            emb = random_embedding(rng, n)
            perm = permutation_embedding(rng, n)
            assert abs(chentsov_invariance_residual(fish, emb, mu, u)) <= 1e-10
            assert abs(chentsov_invariance_residual(fish, perm, mu, u)) <= 1e-10
            if abs(chentsov_invariance_residual(eucl, emb, mu, u)) > 1e-2:
                separated += 1
        assert separated >= 0.99 * 500


def test_criterion_08_holder_embedding_bound():
    with criterion(8, "norm embedding bound"):
        rng = np.random.default_rng(20240206)
        for _ in range(1000):
            n = int(rng.integers(2, 7))
            space = discrete_space(tuple(range(n)))
            mu = Measure(space, rng.exponential(size=n) + 0.02)
            f = GridFunction(space, 3.0 * rng.standard_normal(n))
            p = int(rng.integers(1, 4))
            k = int(rng.integers(1, 3))
            assert holder_bound_check(f, mu, p, k).slack >= -1e-12
            const = GridFunction(space, np.full(n, float(rng.standard_normal())))
            assert abs(holder_bound_check(const, mu, p, k).slack) <= 1e-12


def test_criterion_09_heavy_tail_closed_form():
    with criterion(9, "heavy-tail family norm matches the tail integral"):
        for k in (2, 3):
            model = exp_inverse_power(k)
            # the stated score formula, verbatim: -2x / t^(1/k) per unit direction
            t = model.space.nodes
            x_probe = 0.4
            sc = score(model, TangentDirection([x_probe], [1.0]))
            assert np.allclose(sc.values, -2.0 * x_probe / t ** (1.0 / k), rtol=1e-14)
            for x in np.linspace(0.05, 1.0, 12):
                got = integrability_norm(model, TangentDirection([x], [1.0]), k) ** k
                tail, _ = quad(lambda u: np.exp(-u) / u, x * x, np.inf, limit=200)
                want = k * (2.0 * abs(x)) ** k * tail
                assert abs(got - want) <= 1e-6 * abs(want)


def test_criterion_10_reference_independence():
    with criterion(10, "reference measure independence"):
        rng = np.random.default_rng(20240207)
        bern = bernoulli()
        cat = categorical(4)
        for _ in range(10):
            phi_b = grid_function(bern.space, rng.uniform(0.25, 4.0, size=2))
            other_b = with_rescaled_reference(bern, phi_b)
            for x in (0.15, 0.5, 0.85):
                assert abs(
                    fisher(bern, [x], [1.0], [1.0]) - fisher(other_b, [x], [1.0], [1.0])
                ) <= 1e-10
                assert abs(
                    amari_chentsov(bern, [x], [1], [1], [1])
                    - amari_chentsov(other_b, [x], [1], [1], [1])
                ) <= 1e-10
            phi_c = grid_function(cat.space, rng.uniform(0.25, 4.0, size=4))
            other_c = with_rescaled_reference(cat, phi_c)
            x = simplex_point(rng, 4)
            v = rng.standard_normal(4)
            assert abs(fisher(cat, x, v, v) - fisher(other_c, x, v, v)) <= 1e-10
            assert abs(
                amari_chentsov(cat, x, v, v, v) - amari_chentsov(other_c, x, v, v, v)
            ) <= 1e-10


def _score_fidelity(model, x, v):
    """Relative L^2(p(x)) gap between the closed-form and finite-difference scores."""
    td = TangentDirection(x, v)
    analytic = score(model, td)
    fd = score(replace(model, analytic_score=None), td)
    px = density_at(model, x)
    gap = GridFunction(model.space, analytic.values - fd.values)
    return lp_norm(gap, px, 2) / max(1.0, lp_norm(analytic, px, 2))


def test_criterion_11_score_fidelity():
    with criterion(11, "closed-form vs finite-difference scores"):
        rng = np.random.default_rng(20240208)
        smooth = [
            (bernoulli(), lambda: ([rng.uniform(0.15, 0.85)], [1.0])),
            (categorical(4), lambda: (simplex_point(rng, 4), rng.standard_normal(4))),
            (factorized([0.3, 0.7], coupling=0.3), lambda: ([rng.uniform(0.2, 0.8)], [1.0])),
            (
                exponential_family(interval_space(0.0, 1.0, 256), lambda t: t),
                lambda: ([rng.uniform(-1.0, 1.0)], [1.0]),
            ),
            (exp_inverse_power(2, n_nodes=4096), lambda: ([rng.uniform(0.2, 0.9)], [1.0])),
        ]
        for model, draw in smooth:
            for _ in range(5):
                x, v = draw()
                assert _score_fidelity(model, x, v) <= 1e-6, model.name
        # statistical families: scores integrate to zero against p(x)
        for model, xs in (
            (bernoulli(), [[x] for x in np.linspace(0.1, 0.9, 9)]),
            (factorized([0.5, 0.5]), [[0.25], [0.5], [0.75]]),
            (exponential_family(interval_space(0.0, 1.0, 256), lambda t: t), [[-1.0], [0.0], [1.0]]),
        ):
            for x in xs:
                s = score(model, TangentDirection(x, [1.0]))
                assert abs(integrate(s, density_at(model, x))) <= 1e-8


def test_criterion_12_pushforward_continuity():
    with criterion(12, "image sequences of converged probes converge (200 seeds)"):
        rng = np.random.default_rng(20240209)
        converged_sources = 0
        for _ in range(200):
            n = int(rng.integers(3, 7))
            m = int(rng.integers(2, n))
            space = discrete_space(tuple(range(n)))
            kappa = surjection(rng, space, m)
            base = Measure(space, rng.exponential(size=n) + 0.05)
            f = GridFunction(space, rng.standard_normal(n))
            wobble = rng.uniform(-0.5, 0.5, size=n)
            z = rng.standard_normal(n)
            seq = [
                MixedPoint(
                    (GridFunction(space, f.values + 0.6 ** i * z),),
                    Measure(space, base.values * (1.0 + 0.6 ** i * wobble)),
                )
                for i in range(25)
            ]
            limit = MixedPoint((f,), base)
            bank = [GridFunction(space, np.eye(n)[i]) for i in range(n)]
            src = converges_mixed(seq, limit, (f,), bank)
            img = pushforward_map_continuity_probe(kappa, seq, limit, (f,), bank)
            if src.converged:
                converged_sources += 1
                assert img.converged
        assert converged_sources == 200  # every seeded source sequence converges
