"""Sample spaces, finite positive measures, and integration at desk scale.

Two kinds of sample space are supported: finite discrete sets of labeled
atoms, and 1-D intervals discretized on a fixed quadrature grid.  Every
integral is a finite sum; ``math.fsum`` is used throughout so results are
correctly rounded and independent of summation order (relabeling a space
never changes an integral, not even in the last ulp).

All values are immutable after construction and every operation is a pure
function; everything here is safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import fsum, isfinite, log
from typing import Hashable, Iterable, Sequence, Union

import numpy as np

from ._defaults import DEFAULT_GRID_SIZE

__all__ = [
    "SpaceMismatchError",
    "PartitionCoverageError",
    "DiscreteSpace",
    "IntervalSpace",
    "SampleSpace",
    "discrete_space",
    "interval_space",
    "log_interval_space",
    "Measure",
    "lebesgue",
    "GridFunction",
    "grid_function",
    "DiracCombination",
    "IntervalPartition",
    "DiscretePartition",
    "Partition",
    "StepFunction",
    "common_refinement",
    "dyadic_partitions",
    "integrate",
    "lp_norm",
    "dirac_approximate",
    "weak_contains",
    "rescale_reference",
]


class SpaceMismatchError(ValueError):
    """Operands live on incompatible sample spaces."""


class PartitionCoverageError(ValueError):
    """A partition fails to cover its sample space."""


# ---------------------------------------------------------------------------
# sample spaces
# ---------------------------------------------------------------------------

def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiscreteSpace:
    """Finite set of pairwise-distinct, hashable atom labels."""

    atoms: tuple[Hashable, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.atoms) < 1:
            raise ValueError("a discrete space needs at least one atom")
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError("atom labels must be pairwise distinct")
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(self.atoms)})

    @property
    def size(self) -> int:
        return len(self.atoms)

    def index_of(self, atom: Hashable) -> int:
        try:
            return self._index[atom]
        except KeyError:
            raise KeyError(f"atom {atom!r} is not in this space") from None

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return isinstance(other, DiscreteSpace) and self.atoms == other.atoms

    def __hash__(self):
        return hash(self.atoms)


@dataclass(frozen=True, eq=False)
class IntervalSpace:
    """Interval [lower, upper] discretized on a fixed quadrature grid.

    ``nodes`` must be strictly increasing and lie inside the interval;
    ``weights`` are the strictly positive quadrature weights, so that
    ``sum(f(nodes) * weights)`` approximates the Lebesgue integral of f.
    """

    lower: float
    upper: float
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "nodes", _readonly(self.nodes))
        object.__setattr__(self, "weights", _readonly(self.weights))
        if self.lower >= self.upper:
            raise ValueError("interval bounds must satisfy lower < upper")
        if self.nodes.size < 2:
            raise ValueError("an interval space needs at least two nodes")
        if self.nodes.size != self.weights.size:
            raise ValueError("nodes and weights must have equal length")
        if not np.all(np.diff(self.nodes) > 0):
            raise ValueError("nodes must be strictly increasing")
        if self.nodes[0] < self.lower or self.nodes[-1] > self.upper:
            raise ValueError("nodes must lie inside [lower, upper]")
        if not np.all(self.weights > 0):
            raise ValueError("quadrature weights must be strictly positive")

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, IntervalSpace)
            and self.lower == other.lower
            and self.upper == other.upper
            and self.nodes.size == other.nodes.size
            and bool(np.array_equal(self.nodes, other.nodes))
            and bool(np.array_equal(self.weights, other.weights))
        )

    def __hash__(self):
        return hash((self.lower, self.upper, self.nodes.size))


SampleSpace = Union[DiscreteSpace, IntervalSpace]


def discrete_space(atoms: Iterable[Hashable]) -> DiscreteSpace:
    return DiscreteSpace(tuple(atoms))


def interval_space(lower: float, upper: float, n_nodes: int = DEFAULT_GRID_SIZE) -> IntervalSpace:
    """Composite-midpoint grid: nodes at cell midpoints, weights = cell width."""
    edges = np.linspace(lower, upper, n_nodes + 1)
    nodes = 0.5 * (edges[:-1] + edges[1:])
    weights = np.diff(edges)
    return IntervalSpace(lower, upper, nodes, weights)


def log_interval_space(lower: float, upper: float, n_nodes: int) -> IntervalSpace:
    """Midpoint grid in log coordinates, for integrands concentrated near 0.

    Requires 0 < lower < upper.  Nodes are exp of equispaced midpoints in
    log-space; weights carry the Jacobian, so plain node sums still
    approximate Lebesgue integrals.
    """
    if lower <= 0:
        raise ValueError("log grid needs lower > 0")
    s_edges = np.linspace(log(lower), log(upper), n_nodes + 1)
    s_mid = 0.5 * (s_edges[:-1] + s_edges[1:])
    nodes = np.exp(s_mid)
    weights = nodes * (s_edges[1] - s_edges[0])
    return IntervalSpace(lower, upper, nodes, weights)


# ---------------------------------------------------------------------------
# measures and functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Measure:
    """Finite positive measure: atom masses (discrete) or density values (interval)."""

    space: SampleSpace
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(self.values))
        if self.values.size != self.space.size:
            raise ValueError("value count does not match the space")
        if not np.all(self.values >= 0):
            raise ValueError("measure values must be non-negative")
        m = self.mass
        if not (m > 0 and isfinite(m)):
            raise ValueError("total mass must be positive and finite")

    @property
    def mass(self) -> float:
        if isinstance(self.space, IntervalSpace):
            return fsum(self.values * self.space.weights)
        return fsum(self.values)

    def atom_masses(self) -> np.ndarray:
        """Mass carried by each atom/node (density times quadrature weight)."""
        if isinstance(self.space, IntervalSpace):
            return self.values * self.space.weights
        return np.asarray(self.values)


def lebesgue(space: IntervalSpace) -> Measure:
    """Lebesgue measure on an interval grid (density identically one)."""
    return Measure(space, np.ones(space.size))


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real function realized by its values at the atoms/nodes of a space.

    ``bounded`` records the caller's claim that the function belongs to the
    bounded continuous functions on the underlying space; at desk scale the
    sampled values are always finite, so the flag is a membership claim, not
    a computed property.  Off-grid evaluation on intervals uses clamped
    linear interpolation (exact for affine functions).
    """

    space: SampleSpace
    values: np.ndarray
    bounded: bool = True

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(self.values))
        if self.values.size != self.space.size:
            raise ValueError("value count does not match the space")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("function values must be finite")

    def value_at(self, point) -> float:
        if isinstance(self.space, DiscreteSpace):
            return float(self.values[self.space.index_of(point)])
        return float(np.interp(point, self.space.nodes, self.values))

    def values_at(self, points) -> np.ndarray:
        if isinstance(self.space, DiscreteSpace):
            return np.array([self.values[self.space.index_of(p)] for p in points])
        return np.interp(np.asarray(points, dtype=float), self.space.nodes, self.values)


def grid_function(space: SampleSpace, fn_or_values, bounded: bool = True) -> GridFunction:
    """Build a GridFunction from a callable (sampled at nodes/atoms) or from values."""
    if callable(fn_or_values):
        if isinstance(space, IntervalSpace):
            values = np.asarray([fn_or_values(t) for t in space.nodes], dtype=float)
        else:
            values = np.asarray([fn_or_values(a) for a in space.atoms], dtype=float)
    else:
        values = np.asarray(fn_or_values, dtype=float)
    return GridFunction(space, values, bounded)


@dataclass(frozen=True, eq=False)
class DiracCombination:
    """Finite combination sum_i c_i * delta(point_i) with strictly positive c_i."""

    points: tuple
    coefficients: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "coefficients", _readonly(self.coefficients))
        if len(self.points) != self.coefficients.size:
            raise ValueError("points and coefficients must have equal length")
        if self.coefficients.size == 0:
            raise ValueError("a Dirac combination needs at least one point")
        if not np.all(self.coefficients > 0):
            raise ValueError("coefficients must be strictly positive")

    @property
    def mass(self) -> float:
        return fsum(self.coefficients)


#: Anything a weak-topology or mixed-topology check may integrate against.
MeasureLike = Union[Measure, DiracCombination]


# ---------------------------------------------------------------------------
# partitions and step functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class IntervalPartition:
    """Cells [e_0,e_1), ..., [e_{n-2}, e_{n-1}] covering [lower, upper]."""

    lower: float
    upper: float
    edges: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "edges", _readonly(self.edges))
        if self.edges.size < 2 or not np.all(np.diff(self.edges) > 0):
            raise ValueError("edges must be strictly increasing with >= 2 entries")
        if self.edges[0] != self.lower or self.edges[-1] != self.upper:
            raise PartitionCoverageError("partition edges do not cover [lower, upper]")

    @property
    def n_cells(self) -> int:
        return int(self.edges.size - 1)

    def locate(self, points) -> np.ndarray:
        idx = np.searchsorted(self.edges, np.asarray(points, dtype=float), side="right") - 1
        return np.clip(idx, 0, self.n_cells - 1)

    def representative(self, j: int) -> float:
        return float(0.5 * (self.edges[j] + self.edges[j + 1]))

    def refines(self, other: "IntervalPartition") -> bool:
        return bool(np.all(np.isin(other.edges, self.edges)))


@dataclass(frozen=True, eq=False)
class DiscretePartition:
    """Disjoint cells of atom labels covering a discrete space."""

    space: DiscreteSpace
    cells: tuple[tuple[Hashable, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(tuple(c) for c in self.cells))
        seen = [a for cell in self.cells for a in cell]
        if len(seen) != len(set(seen)):
            raise ValueError("partition cells must be disjoint")
        if set(seen) != set(self.space.atoms):
            raise PartitionCoverageError("partition cells do not cover the space")
        if any(len(c) == 0 for c in self.cells):
            raise ValueError("partition cells must be non-empty")

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    def locate(self, atom: Hashable) -> int:
        for j, cell in enumerate(self.cells):
            if atom in cell:
                return j
        raise KeyError(f"atom {atom!r} not covered by this partition")

    def representative(self, j: int) -> Hashable:
        return self.cells[j][0]


Partition = Union[IntervalPartition, DiscretePartition]


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Piecewise-constant function: one value per partition cell."""

    partition: Partition
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(self.values))
        if self.values.size != self.partition.n_cells:
            raise ValueError("one value per cell required")

    def value_at(self, point) -> float:
        if isinstance(self.partition, IntervalPartition):
            return float(self.values[int(self.partition.locate([point])[0])])
        return float(self.values[self.partition.locate(point)])

    def sample_on(self, space: SampleSpace, bounded: bool = True) -> GridFunction:
        if isinstance(space, IntervalSpace):
            vals = self.values[self.partition.locate(space.nodes)]
        else:
            vals = np.array([self.values[self.partition.locate(a)] for a in space.atoms])
        return GridFunction(space, vals, bounded)


def common_refinement(partitions: Sequence[Partition]) -> Partition:
    """Coarsest partition refining every input (intersection of cells)."""
    if not partitions:
        raise ValueError("need at least one partition")
    first = partitions[0]
    if isinstance(first, IntervalPartition):
        if not all(isinstance(p, IntervalPartition) for p in partitions):
            raise SpaceMismatchError("cannot mix interval and discrete partitions")
        if any(p.lower != first.lower or p.upper != first.upper for p in partitions):
            raise SpaceMismatchError("interval partitions cover different intervals")
        edges = np.unique(np.concatenate([p.edges for p in partitions]))
        return IntervalPartition(first.lower, first.upper, edges)
    if not all(isinstance(p, DiscretePartition) and p.space == first.space for p in partitions):
        raise SpaceMismatchError("discrete partitions must share one space")
    keys: dict[tuple, list] = {}
    for atom in first.space.atoms:
        key = tuple(p.locate(atom) for p in partitions)
        keys.setdefault(key, []).append(atom)
    return DiscretePartition(first.space, tuple(tuple(c) for c in keys.values()))


def dyadic_partitions(lower: float, upper: float, max_cells: int) -> list[IntervalPartition]:
    """Nested partitions with 2, 4, ..., max_cells equal cells (max_cells a power of two)."""
    if max_cells < 2 or max_cells & (max_cells - 1):
        raise ValueError("max_cells must be a power of two, at least 2")
    out = []
    cells = 2
    while cells <= max_cells:
        out.append(IntervalPartition(lower, upper, np.linspace(lower, upper, cells + 1)))
        cells *= 2
    return out


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------

def _require_same_space(f_space: SampleSpace, m_space: SampleSpace) -> None:
    if f_space != m_space:
        raise SpaceMismatchError("function and measure live on different sample spaces")


def _dirac_points_ok(f: GridFunction, nu: DiracCombination) -> None:
    if isinstance(f.space, DiscreteSpace):
        for p in nu.points:
            f.space.index_of(p)
    else:
        lo, hi = f.space.lower, f.space.upper
        for p in nu.points:
            if not (lo <= p <= hi):
                raise SpaceMismatchError(f"Dirac point {p!r} outside [{lo}, {hi}]")


def integrate(f: Union[GridFunction, StepFunction], mu: MeasureLike) -> float:
    """Integral of f against mu.

    Discrete measures: sum of f * mass.  Interval measures: quadrature sum
    f * density * weight.  Dirac combinations: sum of coefficients times the
    pointwise values of f at the support (interpolated on intervals).
    """
    if isinstance(mu, DiracCombination):
        if isinstance(f, StepFunction):
            vals = np.array([f.value_at(p) for p in mu.points])
        else:
            _dirac_points_ok(f, mu)
            vals = f.values_at(mu.points)
        return fsum(vals * mu.coefficients)
    if isinstance(f, StepFunction):
        f = f.sample_on(mu.space)
    _require_same_space(f.space, mu.space)
    return fsum(f.values * mu.atom_masses())


def lp_norm(f: Union[GridFunction, StepFunction], mu: MeasureLike, p: float) -> float:
    """The L^p(mu) norm (integral of |f|^p against mu) ** (1/p), p >= 1."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if isinstance(mu, DiracCombination):
        if isinstance(f, StepFunction):
            vals = np.array([f.value_at(q) for q in mu.points])
        else:
            _dirac_points_ok(f, mu)
            vals = f.values_at(mu.points)
        total = fsum(np.abs(vals) ** p * mu.coefficients)
    else:
        if isinstance(f, StepFunction):
            f = f.sample_on(mu.space)
        _require_same_space(f.space, mu.space)
        total = fsum(np.abs(f.values) ** p * mu.atom_masses())
    return total ** (1.0 / p)


# ---------------------------------------------------------------------------
# constructive Dirac approximation
# ---------------------------------------------------------------------------

def dirac_approximate(mu: Measure, generators: Sequence[StepFunction]) -> DiracCombination:
    """Replace mu by a finite Dirac combination matching all generator integrals.

    The generators' partitions are refined to a common partition {A_j}; the
    output puts coefficient mu(A_j) at a designated point of each cell (the
    midpoint for interval cells, the first atom for discrete cells).  Cells
    of zero mass are dropped, so all coefficients are strictly positive.
    Because every generator is constant on each refined cell, its integral
    against the output equals its integral against mu up to summation
    rounding, and the total mass is the same partition-regrouped sum.
    """
    if not generators:
        raise ValueError("need at least one generator")
    refinement = common_refinement([g.partition for g in generators])
    if isinstance(refinement, IntervalPartition):
        if not isinstance(mu.space, IntervalSpace):
            raise SpaceMismatchError("interval generators require an interval measure")
        if refinement.lower != mu.space.lower or refinement.upper != mu.space.upper:
            raise PartitionCoverageError("generator partition does not cover the measure's interval")
        cell_of_node = refinement.locate(mu.space.nodes)
        node_mass = mu.atom_masses()
        points, coeffs = [], []
        for j in range(refinement.n_cells):
            c = fsum(node_mass[cell_of_node == j])
            if c > 0:
                points.append(refinement.representative(j))
                coeffs.append(c)
    else:
        if mu.space != refinement.space:
            raise SpaceMismatchError("generator partition lives on a different discrete space")
        node_mass = mu.atom_masses()
        points, coeffs = [], []
        for j, cell in enumerate(refinement.cells):
            c = fsum(node_mass[mu.space.index_of(a)] for a in cell)
            if c > 0:
                points.append(refinement.representative(j))
                coeffs.append(c)
    return DiracCombination(tuple(points), np.asarray(coeffs))


# ---------------------------------------------------------------------------
# weak-topology neighborhoods and reference rescaling
# ---------------------------------------------------------------------------

def weak_contains(
    center: MeasureLike,
    tests: Sequence[GridFunction],
    eps: float,
    candidate: MeasureLike,
) -> bool:
    """Membership of candidate in the weak neighborhood of center.

    True iff |integral of f against center - integral against candidate| < eps
    for every test function f.  Either side may be a Dirac combination; its
    integrals use pointwise evaluation of the tests.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    for f in tests:
        if abs(integrate(f, center) - integrate(f, candidate)) >= eps:
            return False
    return True


def rescale_reference(mu: Measure, phi: GridFunction) -> Measure:
    """The measure phi * mu for strictly positive phi (pointwise product)."""
    _require_same_space(phi.space, mu.space)
    if not np.all(phi.values > 0):
        raise ValueError("rescaling density must be strictly positive everywhere")
    return Measure(mu.space, mu.values * phi.values)
