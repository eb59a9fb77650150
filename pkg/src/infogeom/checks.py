"""Theorem-level checks: information loss, sufficiency, invariance, limits.

Everything here computes both sides of an inequality or identity and reports
the gap.  The checks never round their own verdicts: callers (the test suite
and the CLI suites) decide pass/fail against explicit tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum
from typing import Sequence

import numpy as np

from .measures import (
    DiscreteSpace,
    GridFunction,
    IntervalPartition,
    IntervalSpace,
    Measure,
    StepFunction,
    dirac_approximate,
    integrate,
    lp_norm,
)
from .models import ParametrizedModel, TangentDirection, density_at, score, with_rescaled_reference
from .statistic import Statistic, pushforward_function, pushforward_measure
from .tensors import CovariantTensorField, evaluate_tensor, fisher, fisher_metric_field
from .topology import MixedPoint

__all__ = [
    "LossReport",
    "monotonicity_check",
    "sufficiency_check",
    "AcChainReport",
    "ac_monotonicity_probe",
    "CongruentEmbedding",
    "chentsov_invariance_residual",
    "UniquenessReport",
    "uniqueness_limit_probe",
    "reference_independence_check",
]


# ---------------------------------------------------------------------------
# information loss under a statistic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LossReport:
    """Fisher values before and after a statistic; loss = before - after."""

    before: float
    after: float
    loss: float
    context: dict

    def to_dict(self) -> dict:
        return {"before": self.before, "after": self.after, "loss": self.loss, **self.context}


def monotonicity_check(model: ParametrizedModel, kappa: Statistic, x, v) -> LossReport:
    """Fisher information lost by pushing a model through a statistic.

    The image model's score is the fiber average of the source score taken
    under p(x) itself (not under the reference), which is exactly the score
    of the image family; the loss is then non-negative by norm contraction
    of the fiber average.
    """
    px = density_at(model, x)
    s = score(model, TangentDirection(x, v))
    before = fsum(s.values * s.values * px.atom_masses())
    image_measure = pushforward_measure(kappa, px)
    if np.any(image_measure.values == 0):
        raise ValueError("a fiber carries zero mass under p(x); the image model is degenerate")
    image_score = pushforward_function(kappa, s, px)
    after = fsum(image_score.values * image_score.values * image_measure.atom_masses())
    return LossReport(
        before=before,
        after=after,
        loss=before - after,
        context={
            "model": model.name,
            "x": list(np.atleast_1d(np.asarray(x, dtype=float))),
            "v": list(np.atleast_1d(np.asarray(v, dtype=float))),
        },
    )


def sufficiency_check(
    model: ParametrizedModel,
    kappa: Statistic,
    xs: Sequence,
    vs: Sequence,
) -> float:
    """Largest |loss| over a grid of parameters and directions.

    Intended for families that factor through kappa (coordinate projections
    of product families, or any bijective relabeling), where the loss must
    vanish.
    """
    worst = 0.0
    for x in xs:
        for v in vs:
            worst = max(worst, abs(monotonicity_check(model, kappa, x, v).loss))
    return worst


# ---------------------------------------------------------------------------
# third-moment chain
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AcChainReport:
    """Third-moment magnitudes and cubic norms on both sides of a statistic.

    The two provable links are |ac_after| <= l3_after**3 and
    l3_after <= l3_before (norm contraction); ``abs_decreased`` reports the
    direct comparison |ac_after| <= |ac_before| without asserting it.
    """

    ac_before: float
    ac_after: float
    l3_before: float
    l3_after: float
    chain_cube_ok: bool
    chain_contract_ok: bool
    abs_decreased: bool

    def to_dict(self) -> dict:
        return {
            "ac_before": self.ac_before,
            "ac_after": self.ac_after,
            "l3_before": self.l3_before,
            "l3_after": self.l3_after,
            "chain_cube_ok": self.chain_cube_ok,
            "chain_contract_ok": self.chain_contract_ok,
            "abs_decreased": self.abs_decreased,
        }


def ac_monotonicity_probe(
    model: ParametrizedModel,
    kappa: Statistic,
    x,
    v,
    cube_tol: float = 1e-10,
    contract_tol: float = 1e-12,
) -> AcChainReport:
    """Chain check for the score third moment under a statistic."""
    px = density_at(model, x)
    s = score(model, TangentDirection(x, v))
    masses = px.atom_masses()
    ac_before = fsum(s.values ** 3 * masses)
    l3_before = lp_norm(s, px, 3)
    image_measure = pushforward_measure(kappa, px)
    image_score = pushforward_function(kappa, s, px)
    ac_after = fsum(image_score.values ** 3 * image_measure.atom_masses())
    l3_after = lp_norm(image_score, image_measure, 3)
    return AcChainReport(
        ac_before=ac_before,
        ac_after=ac_after,
        l3_before=l3_before,
        l3_after=l3_after,
        chain_cube_ok=abs(ac_after) <= l3_after ** 3 + cube_tol,
        chain_contract_ok=l3_after <= l3_before + contract_tol,
        abs_decreased=abs(ac_after) <= abs(ac_before),
    )


# ---------------------------------------------------------------------------
# congruent embeddings and invariance residuals
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CongruentEmbedding:
    """Mass-preserving split of simplex atoms into disjoint target blocks.

    ``split`` lists, per source atom, the pairs (target atom index, weight)
    with strictly positive weights summing to one; blocks must be pairwise
    disjoint.  It is the right inverse of the statistic merging each block
    back to its source atom, which is sufficient for the embedded family.
    """

    source_size: int
    target_size: int
    split: tuple[tuple[tuple[int, float], ...], ...]

    def __post_init__(self):
        if len(self.split) != self.source_size:
            raise ValueError("one split row per source atom required")
        seen: set[int] = set()
        for row in self.split:
            if not row:
                raise ValueError("every source atom needs at least one target")
            weights = [w for _, w in row]
            targets = [t for t, _ in row]
            if any(w <= 0 for w in weights):
                raise ValueError("conditional weights must be strictly positive")
            if abs(fsum(weights) - 1.0) > 1e-12:
                raise ValueError("conditional weights must sum to one per source atom")
            if any(t < 0 or t >= self.target_size for t in targets):
                raise ValueError("target index out of range")
            if seen.intersection(targets) or len(set(targets)) != len(targets):
                raise ValueError("target blocks must be pairwise disjoint")
            seen.update(targets)

    def push_vector(self, u: np.ndarray) -> np.ndarray:
        """Image of a (possibly signed) mass vector under the split table."""
        out = np.zeros(self.target_size)
        for i, row in enumerate(self.split):
            for t, w in row:
                out[t] = u[i] * w
        return out


def chentsov_invariance_residual(
    form: CovariantTensorField,
    embedding: CongruentEmbedding,
    mu: Measure,
    u: np.ndarray,
) -> float:
    """form(K u, K u) at K mu minus form(u, u) at mu.

    Tangent vectors are represented by their densities u / mu when the form
    is evaluated, matching the score representation used by pullbacks.  A
    zero residual on all congruent embeddings is the invariance that singles
    out the Fisher form; translation-invariant forms such as the Euclidean
    one leave visible residuals.
    """
    if form.order != 2:
        raise ValueError("invariance residuals are defined for order-2 forms")
    if not isinstance(mu.space, DiscreteSpace):
        raise ValueError("embeddings act on discrete simplices")
    u = np.asarray(u, dtype=float)
    if u.size != mu.space.size:
        raise ValueError("tangent vector length must match the atom count")
    if not np.all(mu.values > 0):
        raise ValueError("the base measure must be strictly positive")
    f = GridFunction(mu.space, u / mu.values)
    before = evaluate_tensor(form, MixedPoint((f, f), mu))
    target = DiscreteSpace(tuple(range(embedding.target_size)))
    nu_vals = embedding.push_vector(mu.values)
    keep = nu_vals > 0
    if not np.all(keep):
        raise ValueError("embedding produced empty target atoms")
    nu = Measure(target, nu_vals)
    ku = embedding.push_vector(u)
    g = GridFunction(target, ku / nu_vals)
    after = evaluate_tensor(form, MixedPoint((g, g), nu))
    return after - before


# ---------------------------------------------------------------------------
# limiting procedure over Dirac refinements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UniquenessReport:
    """Tensor values along nested Dirac refinements, against the unit-product value.

    ``reference`` is the order-2 unit-product value (the integral of f^2
    against mu); a strongly continuous form agreeing with the Fisher form on
    finite spaces must approach it, and any form converging elsewhere is
    thereby separated from the Fisher form.
    """

    cells: tuple[int, ...]
    values: tuple[float, ...]
    reference: float
    final_value: float
    converged: bool
    tol: float

    def to_dict(self) -> dict:
        return {
            "cells": list(self.cells),
            "values": list(self.values),
            "reference": self.reference,
            "final_value": self.final_value,
            "converged": self.converged,
            "tol": self.tol,
        }


def uniqueness_limit_probe(
    T: CovariantTensorField,
    mu: Measure,
    f: GridFunction,
    partitions: Sequence[IntervalPartition],
    tol: float = 1e-3,
) -> UniquenessReport:
    """Evaluate an order-2 tensor on Dirac approximations of mu at nested scales.

    Each partition yields the Dirac combination carrying mu's cell masses at
    cell midpoints (via dirac_approximate with the step approximant of f on
    that partition as generator); the tensor is evaluated at [f, f, nu].
    Reports convergence of the final level to the unit-product reference.
    """
    if T.order != 2:
        raise ValueError("the limiting probe is defined for order-2 tensors")
    if not isinstance(mu.space, IntervalSpace):
        raise ValueError("refinement probes need an interval measure")
    for coarse, fine in zip(partitions, partitions[1:]):
        if not fine.refines(coarse):
            raise ValueError("partitions must be strictly nested refinements")
    values = []
    cells = []
    for part in partitions:
        step = StepFunction(part, f.values_at([part.representative(j) for j in range(part.n_cells)]))
        nu = dirac_approximate(mu, [step])
        values.append(evaluate_tensor(T, MixedPoint((f, f), nu)))
        cells.append(part.n_cells)
    reference = evaluate_tensor(fisher_metric_field(order=2), MixedPoint((f, f), mu))
    final = values[-1]
    return UniquenessReport(
        cells=tuple(cells),
        values=tuple(values),
        reference=reference,
        final_value=final,
        converged=abs(final - reference) <= tol,
        tol=tol,
    )


# ---------------------------------------------------------------------------
# reference independence
# ---------------------------------------------------------------------------

def reference_independence_check(
    model: ParametrizedModel,
    phi: GridFunction,
    xs: Sequence,
    vs: Sequence,
) -> float:
    """Largest |Fisher difference| after re-presenting the model over phi * mu."""
    other = with_rescaled_reference(model, phi)
    worst = 0.0
    for x in xs:
        for v in vs:
            worst = max(worst, abs(fisher(model, x, v, v) - fisher(other, x, v, v)))
    return worst
