"""JSON encoding for spaces, measures, functions, statistics, and CLI specs.

Wire formats (documented in the README):

* space:     {"kind": "discrete", "atoms": [...]}
             {"kind": "interval", "lower": .., "upper": .., "nodes": [...], "weights": [...]}
* measure:   {"space": {...}, "values": [...]}
* function:  {"space": {...}, "values": [...], "bounded": true}
* dirac:     {"points": [...], "values": [...]}         (values = coefficients)
* statistic: {"source": {...}, "target": {...}, "assignment": [...]}
             (interval sources carry [lo, hi, target-label] rows in the assignment)

Spec dictionaries used by suite configs:

* model:  {"kind": "bernoulli" | "categorical" | "factorized" | "example512"
           | "laplace" | "expfam", "params": {...}}
* tensor: {"kind": "tgc" | "kernel_identity" | "euclidean", "order": n,
           "g": {...}, "c": {...}}
* g:      {"kind": "constant", "value": v} | {"kind": "identity"}
          | {"kind": "poly", "coeffs": [c0, c1, ...]}
* c:      {"kind": "constant", "value": v} | {"kind": "mass_power", "exponent": q}
"""

from __future__ import annotations

from typing import Any

import numpy as np

from .measures import (
    DiracCombination,
    DiscreteSpace,
    GridFunction,
    IntervalSpace,
    Measure,
    SampleSpace,
)
from .models import (
    ParametrizedModel,
    bernoulli,
    categorical,
    exp_inverse_power,
    exponential_family,
    factorized,
    laplace_location,
)
from .statistic import Statistic, binning_statistic, relabel_statistic
from .tensors import (
    CovariantTensorField,
    WeakFunctional,
    constant_weight,
    kernel_two_tensor,
    mass_power_weight,
    scaled_product_tensor,
)

__all__ = [
    "space_to_json",
    "space_from_json",
    "measure_to_json",
    "measure_from_json",
    "function_to_json",
    "function_from_json",
    "dirac_to_json",
    "dirac_from_json",
    "statistic_to_json",
    "statistic_from_json",
    "model_from_spec",
    "tensor_from_spec",
    "weight_from_spec",
]


def space_to_json(space: SampleSpace) -> dict:
    if isinstance(space, DiscreteSpace):
        return {"kind": "discrete", "atoms": list(space.atoms)}
    return {
        "kind": "interval",
        "lower": space.lower,
        "upper": space.upper,
        "nodes": space.nodes.tolist(),
        "weights": space.weights.tolist(),
    }


def space_from_json(data: dict) -> SampleSpace:
    if data["kind"] == "discrete":
        return DiscreteSpace(tuple(_label(a) for a in data["atoms"]))
    if data["kind"] == "interval":
        return IntervalSpace(
            float(data["lower"]),
            float(data["upper"]),
            np.asarray(data["nodes"], dtype=float),
            np.asarray(data["weights"], dtype=float),
        )
    raise ValueError(f"unknown space kind {data.get('kind')!r}")


def _label(a: Any):
    # JSON has no tuples; lists that arrived from tuple labels are restored
    return tuple(a) if isinstance(a, list) else a


def measure_to_json(mu: Measure) -> dict:
    return {"space": space_to_json(mu.space), "values": mu.values.tolist()}


def measure_from_json(data: dict) -> Measure:
    return Measure(space_from_json(data["space"]), np.asarray(data["values"], dtype=float))


def function_to_json(f: GridFunction) -> dict:
    return {
        "space": space_to_json(f.space),
        "values": f.values.tolist(),
        "bounded": f.bounded,
    }


def function_from_json(data: dict) -> GridFunction:
    return GridFunction(
        space_from_json(data["space"]),
        np.asarray(data["values"], dtype=float),
        bool(data.get("bounded", True)),
    )


def dirac_to_json(nu: DiracCombination) -> dict:
    return {"points": [list(p) if isinstance(p, tuple) else p for p in nu.points],
            "values": nu.coefficients.tolist()}


def dirac_from_json(data: dict) -> DiracCombination:
    return DiracCombination(
        tuple(_label(p) for p in data["points"]),
        np.asarray(data["values"], dtype=float),
    )


def statistic_to_json(kappa: Statistic) -> dict:
    src = space_to_json(kappa.source)
    tgt = space_to_json(kappa.target)
    if isinstance(kappa.source, DiscreteSpace):
        assignment = [kappa.target.atoms[i] for i in kappa.assignment]
        assignment = [list(a) if isinstance(a, tuple) else a for a in assignment]
    else:
        assignment = [
            [float(kappa.edges[j]), float(kappa.edges[j + 1]), kappa.target.atoms[i]]
            for j, i in enumerate(kappa.assignment)
        ]
    return {"source": src, "target": tgt, "assignment": assignment}


def statistic_from_json(data: dict) -> Statistic:
    source = space_from_json(data["source"])
    target = space_from_json(data["target"])
    assignment = data["assignment"]
    if isinstance(source, DiscreteSpace):
        return relabel_statistic(source, target, [_label(a) for a in assignment])
    edges = [row[0] for row in assignment] + [assignment[-1][1]]
    targets = [_label(row[2]) for row in assignment]
    return binning_statistic(source, target, edges, targets)


# ---------------------------------------------------------------------------
# CLI spec dictionaries
# ---------------------------------------------------------------------------

def model_from_spec(spec: dict) -> ParametrizedModel:
    kind = spec["kind"]
    params = dict(spec.get("params", {}))
    if kind == "bernoulli":
        return bernoulli()
    if kind == "categorical":
        return categorical(int(params.get("n_atoms", 4)))
    if kind == "factorized":
        return factorized(params.get("r", [0.5, 0.5]), float(params.get("coupling", 0.0)))
    if kind == "example512":
        return exp_inverse_power(
            int(params.get("k", 2)),
            int(params.get("n_nodes", 16384)),
            float(params.get("t_min", 1e-14)),
        )
    if kind == "laplace":
        return laplace_location(
            float(params.get("theta_min", -1.0)),
            float(params.get("theta_max", 1.0)),
            int(params.get("n_nodes", 4096)),
        )
    if kind == "expfam":
        from .measures import interval_space

        space = interval_space(
            float(params.get("lower", 0.0)),
            float(params.get("upper", 1.0)),
            int(params.get("n_nodes", 512)),
        )
        coeffs = params.get("statistic_coeffs", [0.0, 1.0])
        return exponential_family(
            space,
            lambda t: float(np.polyval(list(reversed(coeffs)), t)),
            tuple(params.get("domain", (-2.0, 2.0))),
        )
    raise ValueError(f"unknown model kind {kind!r}")


def _g_from_spec(spec: dict | None, space: SampleSpace | None):
    if spec is None:
        return 1.0
    kind = spec["kind"]
    if kind == "constant":
        return float(spec.get("value", 1.0))
    if space is None:
        raise ValueError(f"g spec {kind!r} needs a sample space to be realized on")
    if kind == "identity":
        if not isinstance(space, IntervalSpace):
            raise ValueError("identity g needs an interval space")
        return GridFunction(space, space.nodes.copy())
    if kind == "poly":
        coeffs = list(reversed(spec["coeffs"]))
        if isinstance(space, IntervalSpace):
            vals = np.polyval(coeffs, space.nodes)
        else:
            vals = np.polyval(coeffs, np.arange(space.size, dtype=float))
        return GridFunction(space, vals)
    raise ValueError(f"unknown g kind {kind!r}")


def weight_from_spec(spec: dict | None) -> WeakFunctional:
    if spec is None:
        return constant_weight(1.0)
    kind = spec["kind"]
    if kind == "constant":
        return constant_weight(float(spec.get("value", 1.0)))
    if kind == "mass_power":
        return mass_power_weight(float(spec.get("exponent", 1.0)))
    raise ValueError(f"unknown c kind {kind!r}")


def tensor_from_spec(spec: dict, space: SampleSpace | None = None) -> CovariantTensorField:
    kind = spec["kind"]
    if kind == "tgc":
        return scaled_product_tensor(
            _g_from_spec(spec.get("g"), space),
            weight_from_spec(spec.get("c")),
            int(spec.get("order", 2)),
        )
    if kind == "euclidean":
        return kernel_two_tensor(
            lambda f, mu: GridFunction(mu.space, f.values * mu.values),
            label="euclidean",
        )
    if kind == "kernel_identity":
        return kernel_two_tensor(lambda f, mu: f, label="kernel_identity")
    raise ValueError(f"unknown tensor kind {kind!r}")
