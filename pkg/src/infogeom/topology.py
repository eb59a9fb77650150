"""Computable fragments of the mixed topology on function-measure pairs.

The fiber space under study consists of pairs [f_1..f_m, mu]: a tuple of
functions together with a base measure.  Its basic neighborhoods combine a
weak-topology neighborhood of the base with a product-L^p ball around a tuple
of bounded continuous center functions.  Full topological convergence is not
finitely checkable, so the convergence operations here are *probes*: they
decide membership only against a supplied approximant and finite test bank,
and every report records the banks it used.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum
from typing import Sequence

import numpy as np

from .measures import (
    DiracCombination,
    GridFunction,
    IntervalSpace,
    Measure,
    MeasureLike,
    lp_norm,
    weak_contains,
)
from .statistic import Statistic, pushforward_function, pushforward_measure
from ._defaults import DEFAULT_EPS_SCHEDULE

__all__ = [
    "ApproximantError",
    "MixedPoint",
    "WeakNeighborhood",
    "MixedNeighborhood",
    "mixed_contains",
    "HolderBoundReport",
    "holder_bound_check",
    "ConvergenceReport",
    "converges_mixed",
    "pushforward_map_continuity_probe",
]


class ApproximantError(ValueError):
    """The supplied continuous approximant does not certify the limit point."""


@dataclass(frozen=True, eq=False)
class MixedPoint:
    """A tuple of functions over a base measure.

    ``order`` is the exponent used for the fiber norm (the sum of L^order
    norms of the component functions).  It defaults to the number of
    functions, which is the tensor-slot case; a single function with
    ``order=k`` realizes the one-slot fragment used by integrability and
    regularity probes.
    """

    functions: tuple[GridFunction, ...]
    base: MeasureLike
    order: int = 0  # 0 means len(functions)

    def __post_init__(self):
        object.__setattr__(self, "functions", tuple(self.functions))
        if not self.functions:
            raise ValueError("a mixed point needs at least one function")
        if self.order == 0:
            object.__setattr__(self, "order", len(self.functions))
        if self.order < 1:
            raise ValueError("order must be a positive integer")
        space = self.functions[0].space
        if any(f.space != space for f in self.functions):
            raise ValueError("all functions of a mixed point must share one space")
        if isinstance(self.base, Measure) and self.base.space != space:
            raise ValueError("base measure must live on the functions' space")
        for f in self.functions:
            if not np.isfinite(lp_norm(f, self.base, self.order)):
                raise ValueError("every function must have finite norm under the base")


@dataclass(frozen=True, eq=False)
class WeakNeighborhood:
    """Weak neighborhood of a center measure: finitely many test integrals within eps.

    The center may itself be a Dirac combination (probes routinely center
    neighborhoods at Dirac limits).
    """

    center: MeasureLike
    tests: tuple[GridFunction, ...]
    eps: float

    def __post_init__(self):
        object.__setattr__(self, "tests", tuple(self.tests))
        if self.eps <= 0:
            raise ValueError("eps must be positive")

    def contains(self, candidate: MeasureLike) -> bool:
        return weak_contains(self.center, self.tests, self.eps, candidate)


@dataclass(frozen=True, eq=False)
class MixedNeighborhood:
    """Basic mixed neighborhood: weak constraint on the base, norm ball on the functions."""

    center: tuple[GridFunction, ...]
    weak: WeakNeighborhood
    eps: float
    order: int = 0

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(self.center))
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.order == 0:
            object.__setattr__(self, "order", len(self.center))
        for f in self.center:
            if not f.bounded:
                raise ValueError("neighborhood centers must be flagged bounded-continuous")


def _difference_norm(g: GridFunction, f: GridFunction, base: MeasureLike, p: int) -> float:
    """L^p(base) norm of g - f, evaluating f pointwise when grids differ."""
    if isinstance(base, DiracCombination):
        gv = np.array([g.value_at(q) for q in base.points])
        fv = np.array([f.value_at(q) for q in base.points])
        return fsum(np.abs(gv - fv) ** p * base.coefficients) ** (1.0 / p)
    if f.space == g.space:
        fv = f.values
    else:
        sites = base.space.nodes if isinstance(base.space, IntervalSpace) else base.space.atoms
        fv = f.values_at(sites)
    return fsum(np.abs(g.values - fv) ** p * base.atom_masses()) ** (1.0 / p)


def mixed_contains(nbhd: MixedNeighborhood, point: MixedPoint) -> bool:
    """Membership of a point in a mixed neighborhood.

    True iff the point's base lies in the weak part and the summed
    L^order(base) distances between the point's functions and the center
    functions stay below eps.  For a fixed base equal to the weak center
    this reduces to the plain product-norm ball test.
    """
    if len(nbhd.center) != len(point.functions) or nbhd.order != point.order:
        raise ValueError(
            f"order mismatch: neighborhood has {len(nbhd.center)} slots at order "
            f"{nbhd.order}, point has {len(point.functions)} at order {point.order}"
        )
    if not nbhd.weak.contains(point.base):
        return False
    total = fsum(
        _difference_norm(g, f, point.base, point.order)
        for g, f in zip(point.functions, nbhd.center)
    )
    return total < nbhd.eps


# ---------------------------------------------------------------------------
# norm embedding bound
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HolderBoundReport:
    lhs: float    # ||f||_{L^p(mu)}
    rhs: float    # mass(mu)^(k/(p(p+k))) * ||f||_{L^{p+k}(mu)}
    slack: float  # rhs - lhs, non-negative by Holder's inequality


def holder_bound_check(f: GridFunction, mu: MeasureLike, p: float, k: float) -> HolderBoundReport:
    """Check ||f||_p <= mass^(k/(p(p+k))) * ||f||_{p+k}, with equality for constants."""
    if p < 1 or k < 1:
        raise ValueError("p and k must both be >= 1")
    lhs = lp_norm(f, mu, p)
    mass = mu.mass
    rhs = mass ** (k / (p * (p + k))) * lp_norm(f, mu, p + k)
    return HolderBoundReport(lhs, rhs, rhs - lhs)


# ---------------------------------------------------------------------------
# convergence probes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceReport:
    """Bank-relative convergence verdict for a sequence of mixed points.

    ``first_indices[i]`` is the smallest index from which every later
    element lies in the eps_schedule[i] neighborhood of the approximant
    (None when even the final element is outside).  Membership is checked
    only against the recorded approximant and test bank, never against all
    bounded continuous functions, so "converged" always means converged at
    test scale.
    """

    eps_schedule: tuple[float, ...]
    first_indices: tuple[int | None, ...]
    converged: bool
    verdict: str
    failing_eps: float | None
    n_elements: int
    n_tests: int
    approximant_defect: float

    def to_dict(self) -> dict:
        return {
            "eps_schedule": list(self.eps_schedule),
            "first_indices": [i for i in self.first_indices],
            "converged": self.converged,
            "verdict": self.verdict,
            "failing_eps": self.failing_eps,
            "n_elements": self.n_elements,
            "n_tests": self.n_tests,
            "approximant_defect": self.approximant_defect,
        }


def _validate_schedule(eps_schedule: Sequence[float]) -> tuple[float, ...]:
    sched = tuple(float(e) for e in eps_schedule)
    if not sched or any(e <= 0 for e in sched):
        raise ValueError("eps schedule must be non-empty and positive")
    if any(b >= a for a, b in zip(sched, sched[1:])):
        raise ValueError("eps schedule must be strictly decreasing")
    return sched


def converges_mixed(
    seq: Sequence[MixedPoint],
    limit: MixedPoint,
    approximant: Sequence[GridFunction],
    test_bank: Sequence[GridFunction],
    eps_schedule: Sequence[float] = DEFAULT_EPS_SCHEDULE,
) -> ConvergenceReport:
    """Probe convergence of a sequence of mixed points toward a limit.

    The approximant is a tuple of bounded-continuous functions standing in
    for the limit functions; it must sit within half the finest eps of the
    limit in the fiber norm, otherwise an ApproximantError names the defect.
    For each eps the probe centers a mixed neighborhood at the approximant,
    with the weak part centered at the limit base over the given test bank,
    and records the first index from which the whole tail stays inside.
    """
    sched = _validate_schedule(eps_schedule)
    if len(approximant) != len(limit.functions):
        raise ApproximantError("approximant must supply one function per slot")
    for a in approximant:
        if not a.bounded:
            raise ApproximantError("approximant functions must be flagged bounded-continuous")
    defect = fsum(
        _difference_norm(a, f, limit.base, limit.order)
        for a, f in zip(approximant, limit.functions)
    )
    if not defect < sched[-1] / 2:
        raise ApproximantError(
            f"approximant sits {defect:.3e} from the limit in the fiber norm; "
            f"needs < {sched[-1] / 2:.3e} (half the finest eps)"
        )
    first_indices: list[int | None] = []
    failing = None
    for eps in sched:
        nbhd = MixedNeighborhood(
            center=tuple(approximant),
            weak=WeakNeighborhood(limit.base, tuple(test_bank), eps),
            eps=eps,
            order=limit.order,
        )
        first: int | None = None
        for i in range(len(seq) - 1, -1, -1):
            if not mixed_contains(nbhd, seq[i]):
                first = i + 1 if i + 1 < len(seq) else None
                break
        else:
            first = 0
        first_indices.append(first)
        if first is None and failing is None:
            failing = eps
    converged = failing is None
    verdict = (
        "converged (at test scale)"
        if converged
        else f"not converged at scale (eps={failing:g})"
    )
    return ConvergenceReport(
        eps_schedule=sched,
        first_indices=tuple(first_indices),
        converged=converged,
        verdict=verdict,
        failing_eps=failing,
        n_elements=len(seq),
        n_tests=len(test_bank),
        approximant_defect=defect,
    )


def _indicator_bank(space) -> tuple[GridFunction, ...]:
    eye = np.eye(space.size)
    return tuple(GridFunction(space, eye[i]) for i in range(space.size))


def pushforward_map_continuity_probe(
    kappa: Statistic,
    seq: Sequence[MixedPoint],
    limit: MixedPoint,
    approximant: Sequence[GridFunction],
    test_bank: Sequence[GridFunction],
    eps_schedule: Sequence[float] = DEFAULT_EPS_SCHEDULE,
) -> ConvergenceReport:
    """Probe continuity of the induced map on mixed points under a statistic.

    Every element [f_1..f_m, mu] is sent to [avg(f_1)..avg(f_m), image(mu)],
    where avg is the mu-weighted fiber average and image the pushforward
    measure.  The image probe is run with the fiber average of the source
    approximant (taken under the limit base) as its approximant, and the
    indicator functions of the target atoms as its test bank; on a finite
    target those indicators generate the whole weak topology.  When the
    source sequence converges against its banks, norm contraction of the
    fiber average makes the image sequence converge against these.
    """
    sched = _validate_schedule(eps_schedule)
    for a in approximant:
        if not a.bounded:
            raise ApproximantError("approximant functions must be flagged bounded-continuous")
    src_defect = fsum(
        _difference_norm(a, f, limit.base, limit.order)
        for a, f in zip(approximant, limit.functions)
    )
    if not src_defect < sched[-1] / 2:
        raise ApproximantError(
            f"source approximant sits {src_defect:.3e} from the source limit; "
            f"needs < {sched[-1] / 2:.3e}"
        )

    def image_of(point: MixedPoint) -> MixedPoint:
        return MixedPoint(
            tuple(pushforward_function(kappa, f, point.base) for f in point.functions),
            pushforward_measure(kappa, point.base),
            order=point.order,
        )

    image_limit = image_of(limit)
    image_approximant = tuple(
        pushforward_function(kappa, a, limit.base) for a in approximant
    )
    return converges_mixed(
        [image_of(pt) for pt in seq],
        image_limit,
        image_approximant,
        _indicator_bank(kappa.target),
        sched,
    )
