"""Core measure, integration, and weak-neighborhood behavior."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infogeom import (
    DiracCombination,
    DiscretePartition,
    GridFunction,
    IntervalPartition,
    Measure,
    PartitionCoverageError,
    SpaceMismatchError,
    StepFunction,
    common_refinement,
    dirac_approximate,
    discrete_space,
    dyadic_partitions,
    grid_function,
    integrate,
    interval_space,
    lebesgue,
    log_interval_space,
    lp_norm,
    rescale_reference,
    weak_contains,
)

AB = discrete_space(("a", "b"))


def measure_ab(m0, m1):
    return Measure(AB, np.array([m0, m1], dtype=float))


# ---------------------------------------------------------------------------
# construction invariants
# ---------------------------------------------------------------------------

def test_discrete_space_rejects_duplicates():
    with pytest.raises(ValueError):
        discrete_space(("a", "a"))


def test_interval_space_invariants():
    with pytest.raises(ValueError):
        interval_space(1.0, 0.0)
    sp = interval_space(0.0, 1.0, 16)
    assert sp.size == 16
    assert np.all(np.diff(sp.nodes) > 0)
    assert np.all(sp.weights > 0)
    with pytest.raises(ValueError):
        # node outside the interval
        from infogeom import IntervalSpace
        IntervalSpace(0.0, 1.0, np.array([0.1, 1.5]), np.array([0.5, 0.5]))


def test_measure_invariants():
    with pytest.raises(ValueError):
        measure_ab(-0.1, 0.5)
    with pytest.raises(ValueError):
        measure_ab(0.0, 0.0)
    assert measure_ab(0.5, 0.5).mass == 1.0


def test_log_grid_integrates_lebesgue():
    sp = log_interval_space(1e-6, 1.0, 4096)
    # total weight approximates the interval length
    assert abs(lebesgue(sp).mass - (1.0 - 1e-6)) < 1e-6


# ---------------------------------------------------------------------------
# integrate
# ---------------------------------------------------------------------------

def test_integrate_two_atom_hand_sum():
    f = grid_function(AB, [1.0, 2.0])
    assert integrate(f, measure_ab(0.5, 0.5)) == 1.5


def test_integrate_identity_refines_to_half():
    # quadrature refinement against the closed form: integral of t over [0,1] is 1/2
    errs = []
    for n in (16, 64, 256, 1024):
        sp = interval_space(0.0, 1.0, n)
        errs.append(abs(integrate(grid_function(sp, lambda t: t), lebesgue(sp)) - 0.5))
    assert errs == sorted(errs, reverse=True) or max(errs) < 1e-12
    assert errs[-1] < 1e-12  # midpoint rule is exact for affine integrands


def test_integrate_constant_gives_mass():
    sp = interval_space(0.0, 2.0, 64)
    mu = Measure(sp, 0.5 + np.linspace(0, 1, 64))
    assert abs(integrate(grid_function(sp, lambda t: 1.0), mu) - mu.mass) < 1e-15


def test_integrate_space_mismatch():
    f = grid_function(discrete_space(("x", "y")), [1.0, 2.0])
    with pytest.raises(SpaceMismatchError):
        integrate(f, measure_ab(1.0, 1.0))


@given(
    fa=st.floats(-5, 5), fb=st.floats(-5, 5),
    ga=st.floats(-5, 5), gb=st.floats(-5, 5),
    a=st.floats(-3, 3), b=st.floats(-3, 3),
    m0=st.floats(0.01, 4), m1=st.floats(0.01, 4),
)
def test_integrate_bilinear(fa, fb, ga, gb, a, b, m0, m1):
    f = grid_function(AB, [fa, fb])
    g = grid_function(AB, [ga, gb])
    mu = measure_ab(m0, m1)
    combo = grid_function(AB, [a * fa + b * ga, a * fb + b * gb])
    assert integrate(combo, mu) == pytest.approx(
        a * integrate(f, mu) + b * integrate(g, mu), abs=1e-12
    )
    # linear in the measure as well
    nu = measure_ab(2 * m0, 2 * m1)
    assert integrate(f, nu) == pytest.approx(2 * integrate(f, mu), abs=1e-12)


# ---------------------------------------------------------------------------
# lp_norm
# ---------------------------------------------------------------------------

def test_lp_norm_hand_sums():
    assert lp_norm(grid_function(AB, [3.0, 4.0]), measure_ab(1, 1), 2) == 5.0
    assert lp_norm(grid_function(AB, [1.0, -1.0]), measure_ab(0.5, 0.5), 3) == 1.0


def test_lp_norm_constant():
    mu = measure_ab(0.7, 2.3)
    for p in (1.0, 2.0, 3.5):
        got = lp_norm(grid_function(AB, [-2.5, -2.5]), mu, p)
        assert got == pytest.approx(2.5 * mu.mass ** (1 / p), rel=1e-14)


def test_lp_norm_rejects_small_p():
    with pytest.raises(ValueError):
        lp_norm(grid_function(AB, [1.0, 2.0]), measure_ab(1, 1), 0.5)


@settings(max_examples=200)
@given(
    vals_f=st.lists(st.floats(-10, 10), min_size=4, max_size=4),
    vals_g=st.lists(st.floats(-10, 10), min_size=4, max_size=4),
    masses=st.lists(st.floats(0.01, 5), min_size=4, max_size=4),
    p=st.sampled_from([1, 2, 3, 4]),
)
def test_lp_norm_triangle_inequality(vals_f, vals_g, masses, p):
    sp = discrete_space(tuple(range(4)))
    mu = Measure(sp, np.array(masses))
    f = GridFunction(sp, np.array(vals_f))
    g = GridFunction(sp, np.array(vals_g))
    fg = GridFunction(sp, np.array(vals_f) + np.array(vals_g))
    assert lp_norm(fg, mu, p) <= lp_norm(f, mu, p) + lp_norm(g, mu, p) + 1e-10


# ---------------------------------------------------------------------------
# Dirac approximation
# ---------------------------------------------------------------------------

def test_dirac_two_cell_hand_example():
    sp = interval_space(0.0, 1.0)
    leb = lebesgue(sp)
    part = IntervalPartition(0.0, 1.0, np.array([0.0, 0.5, 1.0]))
    g = StepFunction(part, np.array([0.25, 0.75]))
    nu = dirac_approximate(leb, [g])
    assert nu.points == (0.25, 0.75)
    assert np.allclose(nu.coefficients, [0.5, 0.5])
    assert integrate(g, nu) == 0.5
    assert integrate(g, leb) == 0.5
    assert nu.mass == leb.mass


def test_dirac_atomic_fixed_point():
    sp = discrete_space(("only",))
    mu = Measure(sp, np.array([1.7]))
    part = DiscretePartition(sp, (("only",),))
    nu = dirac_approximate(mu, [StepFunction(part, np.array([3.0]))])
    assert nu.points == ("only",)
    assert nu.coefficients[0] == 1.7


def test_dirac_midpoint_error_bound():
    # f(t) = t is not a generator; midpoint placement still bounds the error
    sp = interval_space(0.0, 1.0)
    leb = lebesgue(sp)
    part = IntervalPartition(0.0, 1.0, np.linspace(0, 1, 5))
    nu = dirac_approximate(leb, [StepFunction(part, np.zeros(4))])
    f = grid_function(sp, lambda t: t)
    assert abs(integrate(f, nu) - integrate(f, leb)) <= 0.125


def test_dirac_drops_zero_cells():
    sp = interval_space(0.0, 1.0, 8)
    mu = Measure(sp, np.array([1, 1, 1, 1, 0, 0, 0, 0], dtype=float))
    part = IntervalPartition(0.0, 1.0, np.array([0.0, 0.5, 1.0]))
    nu = dirac_approximate(mu, [StepFunction(part, np.array([1.0, 2.0]))])
    assert nu.points == (0.25,)
    assert np.all(nu.coefficients > 0)


def test_dirac_partition_coverage_error():
    sp = interval_space(0.0, 1.0, 8)
    with pytest.raises(PartitionCoverageError):
        IntervalPartition(0.0, 1.0, np.array([0.0, 0.5]))
    half = IntervalPartition(0.0, 0.5, np.array([0.0, 0.5]))
    with pytest.raises(PartitionCoverageError):
        dirac_approximate(lebesgue(sp), [StepFunction(half, np.array([1.0]))])


def test_common_refinement_discrete():
    sp = discrete_space(("a", "b", "c", "d"))
    p1 = DiscretePartition(sp, (("a", "b"), ("c", "d")))
    p2 = DiscretePartition(sp, (("a",), ("b", "c"), ("d",)))
    ref = common_refinement([p1, p2])
    assert sorted(tuple(sorted(c)) for c in ref.cells) == [("a",), ("b",), ("c",), ("d",)]


def test_dirac_generator_integrals_multiple():
    rng = np.random.default_rng(5)
    sp = interval_space(0.0, 1.0)
    mu = Measure(sp, 0.2 + rng.random(sp.size))
    p1 = IntervalPartition(0.0, 1.0, np.array([0.0, 0.3, 1.0]))
    p2 = IntervalPartition(0.0, 1.0, np.array([0.0, 0.5, 0.8, 1.0]))
    g1 = StepFunction(p1, rng.standard_normal(2))
    g2 = StepFunction(p2, rng.standard_normal(3))
    nu = dirac_approximate(mu, [g1, g2])
    assert abs(integrate(g1, nu) - integrate(g1, mu)) <= 1e-12
    assert abs(integrate(g2, nu) - integrate(g2, mu)) <= 1e-12
    assert abs(nu.mass - mu.mass) <= 1e-14 * mu.mass


def test_dyadic_partitions_are_nested():
    parts = dyadic_partitions(0.0, 1.0, 16)
    assert [p.n_cells for p in parts] == [2, 4, 8, 16]
    for coarse, fine in zip(parts, parts[1:]):
        assert fine.refines(coarse)


# ---------------------------------------------------------------------------
# weak neighborhoods
# ---------------------------------------------------------------------------

def test_weak_contains_center_itself():
    sp = interval_space(0.0, 1.0, 32)
    leb = lebesgue(sp)
    tests = [grid_function(sp, lambda t: t), grid_function(sp, lambda t: t * t)]
    assert weak_contains(leb, tests, 1e-9, leb)


def test_weak_contains_dirac_hand_cases():
    sp = interval_space(0.0, 1.0)
    leb = lebesgue(sp)
    t_fn = [grid_function(sp, lambda t: t)]
    assert weak_contains(leb, t_fn, 0.1, DiracCombination((0.55,), np.array([1.0])))
    assert not weak_contains(leb, t_fn, 0.1, DiracCombination((0.0,), np.array([1.0])))


def test_weak_contains_eps_validation():
    with pytest.raises(ValueError):
        weak_contains(measure_ab(1, 1), [], 0.0, measure_ab(1, 1))


@given(
    eps=st.floats(0.01, 1.0),
    scale=st.floats(1.1, 10.0),
    shift=st.floats(-0.5, 0.5),
)
def test_weak_contains_monotone_in_eps(eps, scale, shift):
    f = grid_function(AB, [1.0, -1.0])
    center = measure_ab(1.0, 1.0)
    cand = measure_ab(1.0 + max(shift, -0.9), 1.0)
    inner = weak_contains(center, [f], eps, cand)
    if inner:
        assert weak_contains(center, [f], eps * scale, cand)


# ---------------------------------------------------------------------------
# reference rescaling
# ---------------------------------------------------------------------------

def test_rescale_identity_and_product():
    mu = measure_ab(1.0, 1.0)
    assert np.array_equal(rescale_reference(mu, grid_function(AB, [1.0, 1.0])).values, mu.values)
    out = rescale_reference(mu, grid_function(AB, [2.0, 0.5]))
    assert np.array_equal(out.values, [2.0, 0.5])


def test_rescale_mass_is_phi_integral():
    sp = interval_space(0.0, 1.0, 64)
    mu = Measure(sp, 0.3 + np.linspace(0, 1, 64))
    phi = grid_function(sp, lambda t: 1.0 + t * t)
    assert rescale_reference(mu, phi).mass == pytest.approx(integrate(phi, mu), abs=1e-13)


def test_rescale_rejects_nonpositive():
    with pytest.raises(ValueError):
        rescale_reference(measure_ab(1, 1), grid_function(AB, [1.0, 0.0]))


@given(
    f0=st.floats(-3, 3), f1=st.floats(-3, 3),
    p0=st.floats(0.1, 3), p1=st.floats(0.1, 3),
    m0=st.floats(0.1, 3), m1=st.floats(0.1, 3),
)
def test_rescale_then_integrate(f0, f1, p0, p1, m0, m1):
    mu = measure_ab(m0, m1)
    phi = grid_function(AB, [p0, p1])
    f = grid_function(AB, [f0, f1])
    f_phi = grid_function(AB, [f0 * p0, f1 * p1])
    assert integrate(f, rescale_reference(mu, phi)) == pytest.approx(
        integrate(f_phi, mu), abs=1e-12
    )
