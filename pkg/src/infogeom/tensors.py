"""Covariant tensor fields on measures, their pullback onto models.

The workhorse family is the scaled product tensor: a bounded continuous
weight function g and a weakly continuous scalar weight c combine into
value = c(mu) * integral of g * f_1 * ... * f_n against mu.  With g = 1 and
c = 1 at order 2 its pullback onto a model is the Fisher quadratic form, and
at order 3 the symmetric third-moment tensor of the scores.

Kernel two-tensors wrap an arbitrary operator on (function, measure) pairs;
nothing is assumed about their continuity, so probes report rather than
assert for them.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum
from typing import Callable, Sequence

import numpy as np

from .measures import (
    DiracCombination,
    DiscreteSpace,
    GridFunction,
    Measure,
    MeasureLike,
    integrate,
    lp_norm,
)
from .models import ParametrizedModel, TangentDirection, density_at, score
from .topology import ConvergenceReport, MixedPoint

__all__ = [
    "WeakFunctional",
    "constant_weight",
    "mass_power_weight",
    "CovariantTensorField",
    "scaled_product_tensor",
    "kernel_two_tensor",
    "custom_tensor",
    "fisher_metric_field",
    "evaluate_tensor",
    "fisher",
    "amari_chentsov",
    "pullback",
    "StrongContinuityReport",
    "strong_continuity_probe",
]


@dataclass(frozen=True, eq=False)
class WeakFunctional:
    """Scalar functional of a measure built from finitely many integrals.

    Computes phi(mass(mu), int h_1 dmu, ..., int h_m dmu) for a smooth phi;
    continuity in each finite collection of integrals is exactly weak
    continuity at desk scale.
    """

    phi: Callable[..., float]
    probes: tuple[GridFunction, ...] = ()
    label: str = "weak-functional"

    def arguments(self, mu: MeasureLike) -> tuple[float, ...]:
        return (mu.mass,) + tuple(integrate(h, mu) for h in self.probes)

    def __call__(self, mu: MeasureLike) -> float:
        return float(self.phi(*self.arguments(mu)))

    def gradient_scale(self, mu: MeasureLike, h: float = 1e-6) -> float:
        """Sum of |d phi / d arg_j| at mu's argument vector (central differences)."""
        args = np.array(self.arguments(mu), dtype=float)
        total = 0.0
        for j in range(args.size):
            step = h * (1.0 + abs(args[j]))
            up, dn = args.copy(), args.copy()
            up[j] += step
            dn[j] -= step
            total += abs(self.phi(*up) - self.phi(*dn)) / (2.0 * step)
        return total


def constant_weight(value: float = 1.0) -> WeakFunctional:
    return WeakFunctional(lambda mass: value, (), label=f"constant{value:g}")


def mass_power_weight(exponent: float) -> WeakFunctional:
    return WeakFunctional(lambda mass: mass ** exponent, (), label=f"mass^{exponent:g}")


@dataclass(frozen=True, eq=False)
class CovariantTensorField:
    """Order-n multilinear functional on function tuples over a base measure.

    ``g`` may be a bare float, meaning the constant function with that value
    on every sample space.
    """

    order: int
    kind: str  # "scaled_product" | "kernel" | "custom"
    g: GridFunction | float | None = None
    weight: WeakFunctional | None = None
    operator: Callable[[GridFunction, MeasureLike], GridFunction] | None = None
    evaluator: Callable[[MixedPoint], float] | None = None
    label: str = ""

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be a positive integer")
        if self.kind == "scaled_product":
            if self.g is None or self.weight is None:
                raise ValueError("scaled product tensors need g and a weight")
            if isinstance(self.g, GridFunction) and not self.g.bounded:
                raise ValueError("g must be flagged bounded-continuous")
        elif self.kind == "kernel":
            if self.order != 2 or self.operator is None:
                raise ValueError("kernel tensors have order 2 and need an operator")
        elif self.kind == "custom":
            if self.evaluator is None:
                raise ValueError("custom tensors need an evaluator")
        else:
            raise ValueError(f"unknown tensor kind {self.kind!r}")


def scaled_product_tensor(
    g: GridFunction | float,
    weight: WeakFunctional | float,
    order: int,
    label: str = "",
) -> CovariantTensorField:
    """Tensor c(mu) * integral of g * f_1 * ... * f_n against mu."""
    if not isinstance(weight, WeakFunctional):
        weight = constant_weight(float(weight))
    return CovariantTensorField(
        order=order, kind="scaled_product", g=g, weight=weight,
        label=label or f"scaled_product(order={order})",
    )


def kernel_two_tensor(
    operator: Callable[[GridFunction, MeasureLike], GridFunction],
    label: str = "kernel",
) -> CovariantTensorField:
    """Order-2 tensor integral of L(f_1, mu) * f_2 against mu."""
    return CovariantTensorField(order=2, kind="kernel", operator=operator, label=label)


def custom_tensor(evaluator: Callable[[MixedPoint], float], order: int, label: str = "custom") -> CovariantTensorField:
    return CovariantTensorField(order=order, kind="custom", evaluator=evaluator, label=label)


def fisher_metric_field(order: int = 2) -> CovariantTensorField:
    """Unit-weight product tensor: Fisher form under pullback at order 2,
    the symmetric score third moment at order 3."""
    return scaled_product_tensor(1.0, 1.0, order, label=f"unit_product(order={order})")


def _g_values(T: CovariantTensorField, point: MixedPoint) -> np.ndarray:
    g = T.g
    n_sites = len(point.base.points) if isinstance(point.base, DiracCombination) else point.base.space.size
    if not isinstance(g, GridFunction):
        return np.full(n_sites, float(g))
    if isinstance(point.base, DiracCombination):
        return np.array([g.value_at(p) for p in point.base.points])
    if g.space == point.base.space:
        return np.asarray(g.values)
    sites = point.base.space.nodes if hasattr(point.base.space, "nodes") else point.base.space.atoms
    return g.values_at(sites)


def evaluate_tensor(T: CovariantTensorField, point: MixedPoint) -> float:
    """Value of the tensor on a mixed point (order must match the slot count)."""
    if len(point.functions) != T.order:
        raise ValueError(f"order mismatch: tensor has {T.order} slots, point has {len(point.functions)}")
    if T.kind == "scaled_product":
        gv = _g_values(T, point)
        if isinstance(point.base, DiracCombination):
            prod = gv * point.base.coefficients
            for f in point.functions:
                prod = prod * np.array([f.value_at(p) for p in point.base.points])
        else:
            prod = gv * point.base.atom_masses()
            for f in point.functions:
                prod = prod * f.values
        return T.weight(point.base) * fsum(prod)
    if T.kind == "kernel":
        image = T.operator(point.functions[0], point.base)
        if isinstance(point.base, DiracCombination):
            v1 = np.array([image.value_at(p) for p in point.base.points])
            v2 = np.array([point.functions[1].value_at(p) for p in point.base.points])
            return fsum(v1 * v2 * point.base.coefficients)
        return fsum(image.values * point.functions[1].values * point.base.atom_masses())
    return float(T.evaluator(point))


# ---------------------------------------------------------------------------
# pullback onto models
# ---------------------------------------------------------------------------

def fisher(model: ParametrizedModel, x, v, w) -> float:
    """Fisher quadratic form: integral of score_V * score_W against p(x)."""
    sv = score(model, TangentDirection(x, v))
    sw = score(model, TangentDirection(x, w))
    masses = density_at(model, x).atom_masses()
    return fsum(sv.values * sw.values * masses)


def amari_chentsov(model: ParametrizedModel, x, v, w, u) -> float:
    """Symmetric third moment of the scores against p(x)."""
    sv = score(model, TangentDirection(x, v))
    sw = score(model, TangentDirection(x, w))
    su = score(model, TangentDirection(x, u))
    masses = density_at(model, x).atom_masses()
    return fsum(sv.values * sw.values * su.values * masses)


def pullback(
    T: CovariantTensorField,
    model: ParametrizedModel,
    x,
    directions: Sequence,
) -> float:
    """Evaluate the tensor on [score(x, V_1), ..., score(x, V_n), p(x)]."""
    if len(directions) != T.order:
        raise ValueError(f"need {T.order} directions, got {len(directions)}")
    fns = tuple(score(model, TangentDirection(x, v)) for v in directions)
    return evaluate_tensor(T, MixedPoint(fns, density_at(model, x)))


# ---------------------------------------------------------------------------
# strong continuity probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StrongContinuityReport:
    """Tensor values along a convergent sequence versus its limit value.

    For each eps achieved by the base sequence (per the convergence report),
    ``tail_deviations`` holds the largest |value - limit| over the tail and
    ``within`` whether it stays below modulus * eps.  Deviations are reported
    for every eps; nothing is asserted here.
    """

    values: tuple[float, ...]
    limit_value: float
    eps_schedule: tuple[float, ...]
    tail_deviations: tuple[float | None, ...]
    within: tuple[bool | None, ...]
    max_tail_deviation: float | None
    modulus: float

    def to_dict(self) -> dict:
        return {
            "values": list(self.values),
            "limit_value": self.limit_value,
            "eps_schedule": list(self.eps_schedule),
            "tail_deviations": list(self.tail_deviations),
            "within": list(self.within),
            "max_tail_deviation": self.max_tail_deviation,
            "modulus": self.modulus,
        }


def continuity_modulus(T: CovariantTensorField, limit: MixedPoint) -> float:
    """Desk-scale sensitivity estimate of a scaled product tensor at a point.

    Combines the product-expansion bound for perturbing the function slots
    inside an eps ball (sup|g| * 2^n * (1 + sum of limit-norm powers), times
    the scalar weight) with a local linearization of the weight functional,
    plus a unit allowance for the base-measure part, which the neighborhood's
    test bank is assumed to control directly.  Doubled as a safety factor for
    the cross terms.  Returns 1.0 for kernel and custom tensors.
    """
    if T.kind != "scaled_product":
        return 1.0
    n = T.order
    gv = _g_values(T, limit)
    sup_g = float(np.max(np.abs(gv))) if gv.size else 0.0
    norm_powers = fsum(
        lp_norm(f, limit.base, n) ** k for f in limit.functions for k in range(1, n + 1)
    )
    c_val = abs(T.weight(limit.base))
    slot_part = c_val * sup_g * (2.0 ** n) * (1.0 + norm_powers)
    raw = evaluate_tensor(
        CovariantTensorField(order=n, kind="scaled_product", g=T.g, weight=constant_weight(1.0)),
        limit,
    )
    weight_part = abs(raw) * T.weight.gradient_scale(limit.base)
    base_part = max(c_val, 1.0)
    return 2.0 * (slot_part + weight_part + base_part)


def strong_continuity_probe(
    T: CovariantTensorField,
    seq: Sequence[MixedPoint],
    limit: MixedPoint,
    report: ConvergenceReport,
    modulus: float | None = None,
) -> StrongContinuityReport:
    """Track tensor values along a sequence already flagged by a convergence probe.

    ``report`` must be the ConvergenceReport of the sequence toward the
    limit; its per-eps first indices delimit the tails examined here.
    """
    values = tuple(evaluate_tensor(T, pt) for pt in seq)
    limit_value = evaluate_tensor(T, limit)
    if modulus is None:
        modulus = continuity_modulus(T, limit)
    tails: list[float | None] = []
    within: list[bool | None] = []
    for eps, first in zip(report.eps_schedule, report.first_indices):
        if first is None:
            tails.append(None)
            within.append(None)
            continue
        dev = max(abs(v - limit_value) for v in values[first:]) if first < len(values) else 0.0
        tails.append(dev)
        within.append(dev <= modulus * eps)
    finest = [d for d in tails if d is not None]
    return StrongContinuityReport(
        values=values,
        limit_value=limit_value,
        eps_schedule=report.eps_schedule,
        tail_deviations=tuple(tails),
        within=tuple(within),
        max_tail_deviation=finest[-1] if finest else None,
        modulus=modulus,
    )
