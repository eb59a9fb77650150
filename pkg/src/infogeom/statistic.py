"""Statistics (measurable maps between sample spaces) and their pushforwards.

A statistic is either a relabeling table between discrete spaces or an
interval-to-discrete binning rule.  It acts on measures by fiberwise mass
aggregation and on functions by the measure-weighted fiber average (the
conditional expectation).  Fiber sums use ``math.fsum`` and singleton fibers
short-circuit to the original value, so relabelings act exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum
from typing import Hashable, Sequence, Union

import numpy as np

from .measures import (
    DiracCombination,
    DiscreteSpace,
    GridFunction,
    IntervalSpace,
    Measure,
    MeasureLike,
    SampleSpace,
    SpaceMismatchError,
    lp_norm,
)

__all__ = [
    "Statistic",
    "relabel_statistic",
    "binning_statistic",
    "identity_statistic",
    "constant_statistic",
    "compose",
    "pushforward_measure",
    "pushforward_function",
    "zero_mass_fibers",
    "ContractionReport",
    "contraction_report",
]


@dataclass(frozen=True, eq=False)
class Statistic:
    """Total map from a source space onto atoms of a discrete target space.

    ``assignment`` holds one target-atom index per source atom (discrete
    source) or per binning cell (interval source, with ``edges`` delimiting
    the cells).  Use the ``relabel_statistic`` / ``binning_statistic``
    constructors rather than building instances directly.
    """

    source: SampleSpace
    target: DiscreteSpace
    assignment: np.ndarray          # target index per source atom / per cell
    edges: np.ndarray | None = None  # cell edges for interval sources

    def __post_init__(self):
        assignment = np.asarray(self.assignment, dtype=int)
        assignment.setflags(write=False)
        object.__setattr__(self, "assignment", assignment)
        if not isinstance(self.target, DiscreteSpace):
            raise SpaceMismatchError("statistics must land in a discrete space")
        if assignment.size and (assignment.min() < 0 or assignment.max() >= self.target.size):
            raise ValueError("assignment references atoms outside the target space")
        if isinstance(self.source, DiscreteSpace):
            if self.edges is not None:
                raise ValueError("edges are only meaningful for interval sources")
            if assignment.size != self.source.size:
                raise ValueError("assignment must be total on the source atoms")
        else:
            if self.edges is None:
                raise ValueError("an interval source requires binning edges")
            edges = np.asarray(self.edges, dtype=float)
            edges.setflags(write=False)
            object.__setattr__(self, "edges", edges)
            if edges[0] != self.source.lower or edges[-1] != self.source.upper:
                raise ValueError("binning edges must cover the source interval")
            if not np.all(np.diff(edges) > 0):
                raise ValueError("binning edges must be strictly increasing")
            if assignment.size != edges.size - 1:
                raise ValueError("one target per binning cell required")

    def apply(self, point) -> Hashable:
        """Image atom of a single source point."""
        if isinstance(self.source, DiscreteSpace):
            return self.target.atoms[self.assignment[self.source.index_of(point)]]
        j = int(np.clip(np.searchsorted(self.edges, point, side="right") - 1, 0, self.assignment.size - 1))
        return self.target.atoms[self.assignment[j]]

    def node_targets(self) -> np.ndarray:
        """Target index for every source atom/node."""
        if isinstance(self.source, DiscreteSpace):
            return np.asarray(self.assignment)
        cell = np.clip(
            np.searchsorted(self.edges, self.source.nodes, side="right") - 1,
            0,
            self.assignment.size - 1,
        )
        return np.asarray(self.assignment)[cell]


def relabel_statistic(source: DiscreteSpace, target: DiscreteSpace, mapping) -> Statistic:
    """Discrete-to-discrete statistic from a dict or per-atom sequence of target labels."""
    if isinstance(mapping, dict):
        labels = [mapping[a] for a in source.atoms]
    else:
        labels = list(mapping)
        if len(labels) != source.size:
            raise ValueError("need one target label per source atom")
    assignment = np.array([target.index_of(lb) for lb in labels], dtype=int)
    return Statistic(source, target, assignment)


def binning_statistic(
    source: IntervalSpace,
    target: DiscreteSpace,
    edges: Sequence[float],
    targets: Sequence[Hashable],
) -> Statistic:
    """Interval-to-discrete statistic sending cell [e_j, e_{j+1}) to a target atom."""
    assignment = np.array([target.index_of(lb) for lb in targets], dtype=int)
    return Statistic(source, target, assignment, edges=np.asarray(edges, dtype=float))


def identity_statistic(space: DiscreteSpace) -> Statistic:
    return Statistic(space, space, np.arange(space.size))


def constant_statistic(source: SampleSpace, target: DiscreteSpace, atom: Hashable) -> Statistic:
    idx = target.index_of(atom)
    if isinstance(source, DiscreteSpace):
        return Statistic(source, target, np.full(source.size, idx))
    return Statistic(source, target, np.array([idx]), edges=np.array([source.lower, source.upper]))


def compose(kappa2: Statistic, kappa1: Statistic) -> Statistic:
    """The composite map kappa2 after kappa1."""
    if kappa2.source != kappa1.target:
        raise SpaceMismatchError("target of the first statistic must be the source of the second")
    assignment = np.asarray(kappa2.assignment)[np.asarray(kappa1.assignment)]
    return Statistic(kappa1.source, kappa2.target, assignment, edges=kappa1.edges)


# ---------------------------------------------------------------------------
# pushforwards
# ---------------------------------------------------------------------------

def _fiber_indices(kappa: Statistic) -> list[np.ndarray]:
    node_targets = kappa.node_targets()
    return [np.flatnonzero(node_targets == y) for y in range(kappa.target.size)]


def pushforward_measure(kappa: Statistic, mu: MeasureLike) -> Measure:
    """Image measure: target atom y receives the total mass of its fiber."""
    if isinstance(mu, DiracCombination):
        per_target: list[list[float]] = [[] for _ in range(kappa.target.size)]
        for p, c in zip(mu.points, mu.coefficients):
            per_target[kappa.target.index_of(kappa.apply(p))].append(float(c))
        masses = np.array([fsum(parts) if parts else 0.0 for parts in per_target])
        return Measure(kappa.target, masses)
    if mu.space != kappa.source:
        raise SpaceMismatchError("measure does not live on the statistic's source")
    node_mass = mu.atom_masses()
    masses = np.empty(kappa.target.size)
    for y, fiber in enumerate(_fiber_indices(kappa)):
        if fiber.size == 1:
            masses[y] = node_mass[fiber[0]]
        else:
            masses[y] = fsum(node_mass[fiber])
    return Measure(kappa.target, masses)


def pushforward_function(kappa: Statistic, f: GridFunction, mu: MeasureLike) -> GridFunction:
    """Conditional expectation of f under mu, as a function on the target.

    Value at y is the mu-weighted average of f over the fiber of y.  Target
    atoms whose fiber carries zero mass are outside the support of the image
    measure; they are assigned the value 0 (see ``zero_mass_fibers``).
    Singleton fibers return the source value unchanged, so injective
    statistics act exactly.
    """
    if isinstance(mu, DiracCombination):
        vals = np.array([f.value_at(p) for p in mu.points])
        groups: list[list[int]] = [[] for _ in range(kappa.target.size)]
        for i, p in enumerate(mu.points):
            groups[kappa.target.index_of(kappa.apply(p))].append(i)
        out = np.zeros(kappa.target.size)
        for y, idx in enumerate(groups):
            if len(idx) == 1:
                out[y] = vals[idx[0]]
            elif idx:
                c = mu.coefficients[idx]
                out[y] = fsum(vals[idx] * c) / fsum(c)
        return GridFunction(kappa.target, out, bounded=f.bounded)
    if f.space != kappa.source or (isinstance(mu, Measure) and mu.space != kappa.source):
        raise SpaceMismatchError("function and measure must live on the statistic's source")
    node_mass = mu.atom_masses()
    out = np.zeros(kappa.target.size)
    for y, fiber in enumerate(_fiber_indices(kappa)):
        if fiber.size == 0:
            continue
        if fiber.size == 1:
            if node_mass[fiber[0]] > 0:
                out[y] = f.values[fiber[0]]
            continue
        d = fsum(node_mass[fiber])
        if d > 0:
            out[y] = fsum(f.values[fiber] * node_mass[fiber]) / d
    return GridFunction(kappa.target, out, bounded=f.bounded)


def zero_mass_fibers(kappa: Statistic, mu: MeasureLike) -> tuple[bool, ...]:
    """Flags, per target atom, marking fibers of zero mass (outside the image support)."""
    masses = pushforward_measure(kappa, mu).values
    return tuple(bool(m == 0) for m in masses)


# ---------------------------------------------------------------------------
# norm contraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContractionReport:
    """L^p norms of f and of its conditional expectation, and their gap.

    ``extrapolated`` marks p in [1, 2), outside the stated hypothesis of the
    contraction bound (which asks p >= 2); the quantities are still computed.
    """

    norm_before: float
    norm_after: float
    slack: float
    p: float
    extrapolated: bool


def contraction_report(kappa: Statistic, f: GridFunction, mu: MeasureLike, p: float) -> ContractionReport:
    """Compare the L^p(mu) norm of f with the L^p norm of its fiber average."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    before = lp_norm(f, mu, p)
    after = lp_norm(pushforward_function(kappa, f, mu), pushforward_measure(kappa, mu), p)
    return ContractionReport(before, after, before - after, p, extrapolated=p < 2)
