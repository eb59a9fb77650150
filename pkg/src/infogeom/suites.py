"""Verification suites behind the CLI: seeded trials, reports, plot data.

Random generation is fully documented so every trial can be reconstructed
from the suite seed: trial i uses ``numpy.random.default_rng`` seeded by the
i-th child of ``SeedSequence(seed)``.

* simplex points: exponential(1) draws normalized to unit sum, then mixed
  with the uniform vector (0.9 * draw + 0.1 / n) to stay inside the box;
* surjective statistics: uniform fiber assignment, redrawn until surjective;
* congruent embeddings: every source atom splits into 2 or 3 targets with
  conditional weights (draw + 0.1) / (1 + 0.1 * parts), bounding them away
  from degenerate splits;
* tangents: standard normal, projected and normalized where stated.

Reports are JSON (sorted keys, no timestamps) plus an RFC-4180 CSV with one
row per record; a fixed seed therefore reproduces byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import fsum
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .checks import (
    CongruentEmbedding,
    chentsov_invariance_residual,
    monotonicity_check,
    sufficiency_check,
    uniqueness_limit_probe,
)
from .measures import (
    GridFunction,
    Measure,
    discrete_space,
    dyadic_partitions,
    grid_function,
    interval_space,
    lebesgue,
)
from .models import (
    TangentDirection,
    categorical,
    density_at,
    exp_inverse_power,
    factorized,
    factorized_projection,
    integrability_norm,
    bernoulli,
)
from .serialize import model_from_spec, tensor_from_spec
from .statistic import contraction_report, relabel_statistic
from .tensors import fisher_metric_field, kernel_two_tensor, scaled_product_tensor
from .topology import MixedPoint, converges_mixed, pushforward_map_continuity_probe

__all__ = [
    "SuiteConfig",
    "TrialRecord",
    "SUITES",
    "run_suite",
    "emit_plot_data",
]

DEFAULT_TRIALS = {
    "monotonicity": 1000,
    "sufficiency": 25,
    "contraction": 1000,
    "chentsov": 500,
    "uniqueness": 1,
    "continuity": 200,
    "integrability": 1,
}

DEFAULT_TOLERANCES = {
    "loss": 1e-10,
    "contraction_slack": 1e-12,
    "fisher_residual": 1e-10,
    "euclidean_floor": 1e-2,
    "euclidean_fraction": 0.99,
    "uniqueness": 1e-3,
}


@dataclass
class SuiteConfig:
    suite: str
    trials: int = 0          # 0 means the suite default
    seed: int = 42
    jobs: int = 1
    out_dir: Path = Path("reports")
    tolerances: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    models: list = field(default_factory=list)
    tensors: list = field(default_factory=list)

    def tol(self, key: str) -> float:
        return float(self.tolerances.get(key, DEFAULT_TOLERANCES[key]))

    def n_trials(self) -> int:
        return self.trials if self.trials > 0 else DEFAULT_TRIALS[self.suite]


@dataclass
class TrialRecord:
    check: str
    trial: int
    digest: str
    quantities: dict
    slack: float | None
    verdict: str  # "pass" | "fail" | "info"

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "trial": self.trial,
            "digest": self.digest,
            "quantities": self.quantities,
            "slack": self.slack,
            "verdict": self.verdict,
        }


def _digest(payload) -> str:
    canon = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


# ---------------------------------------------------------------------------
# seeded random objects
# ---------------------------------------------------------------------------

def simplex_point(rng: np.random.Generator, n: int) -> np.ndarray:
    e = rng.exponential(size=n)
    return 0.9 * (e / e.sum()) + 0.1 / n


def positive_masses(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.exponential(size=n) + 0.05


def random_surjection(rng: np.random.Generator, source, m: int):
    target = discrete_space(tuple(range(m)))
    while True:
        assignment = rng.integers(0, m, size=source.size)
        if np.unique(assignment).size == m:
            return relabel_statistic(source, target, [target.atoms[i] for i in assignment])


def random_embedding(rng: np.random.Generator, n: int) -> CongruentEmbedding:
    split = []
    next_target = 0
    for _ in range(n):
        parts = int(rng.integers(2, 4))
        raw = rng.exponential(size=parts)
        q = (raw / raw.sum() + 0.1) / (1.0 + 0.1 * parts)
        q = q / fsum(q)
        split.append(tuple((next_target + j, float(q[j])) for j in range(parts)))
        next_target += parts
    return CongruentEmbedding(n, next_target, tuple(split))


def permutation_embedding(rng: np.random.Generator, n: int) -> CongruentEmbedding:
    perm = rng.permutation(n)
    return CongruentEmbedding(n, n, tuple(((int(perm[i]), 1.0),) for i in range(n)))


# ---------------------------------------------------------------------------
# individual suites
# ---------------------------------------------------------------------------

def _trial_monotonicity(cfg: SuiteConfig, trial: int, rng: np.random.Generator) -> TrialRecord:
    n = int(rng.integers(2, 9))
    m = int(rng.integers(2, n + 1))
    model = categorical(n)
    kappa = random_surjection(rng, model.space, m)
    x = simplex_point(rng, n)
    v = rng.standard_normal(n)
    rep = monotonicity_check(model, kappa, x, v)
    tol = cfg.tol("loss")
    return TrialRecord(
        check="monotonicity",
        trial=trial,
        digest=_digest({"x": x.tolist(), "v": v.tolist(), "kappa": kappa.assignment.tolist()}),
        quantities={"n_atoms": n, "n_targets": m, "before": rep.before, "after": rep.after, "loss": rep.loss},
        slack=rep.loss + tol,
        verdict="pass" if rep.loss >= -tol else "fail",
    )


def _trial_sufficiency(cfg: SuiteConfig, trial: int, rng: np.random.Generator) -> TrialRecord:
    n_z = int(rng.integers(2, 5))
    r = simplex_point(rng, n_z)
    model = factorized(r)
    kappa = factorized_projection(model)
    xs = [np.array([x]) for x in np.linspace(0.1, 0.9, 9)]
    vs = [np.array([v]) for v in (0.5, 1.0, 2.0)]
    worst = sufficiency_check(model, kappa, xs, vs)
    # a bijective relabeling must lose nothing, bit for bit
    n = int(rng.integers(2, 7))
    cat = categorical(n)
    perm = rng.permutation(n)
    bij = relabel_statistic(cat.space, cat.space, [int(p) for p in perm])
    bij_loss = monotonicity_check(cat, bij, simplex_point(rng, n), rng.standard_normal(n)).loss
    tol = cfg.tol("loss")
    ok = worst <= tol and bij_loss == 0.0
    return TrialRecord(
        check="sufficiency",
        trial=trial,
        digest=_digest({"r": r.tolist(), "perm": perm.tolist()}),
        quantities={"max_abs_loss": worst, "bijection_loss": bij_loss, "n_z": n_z},
        slack=tol - worst,
        verdict="pass" if ok else "fail",
    )


def _trial_contraction(cfg: SuiteConfig, trial: int, rng: np.random.Generator) -> TrialRecord:
    n = int(rng.integers(2, 9))
    m = int(rng.integers(2, n + 1))
    space = discrete_space(tuple(range(n)))
    mu = Measure(space, positive_masses(rng, n))
    f = GridFunction(space, 2.0 * rng.standard_normal(n))
    kappa = random_surjection(rng, space, m)
    p = float(rng.choice([2.0, 3.0, 4.0]))
    rep = contraction_report(kappa, f, mu, p)
    tol = cfg.tol("contraction_slack")
    return TrialRecord(
        check="contraction",
        trial=trial,
        digest=_digest({"mu": mu.values.tolist(), "f": f.values.tolist(), "p": p,
                        "kappa": kappa.assignment.tolist()}),
        quantities={"p": p, "norm_before": rep.norm_before, "norm_after": rep.norm_after,
                    "slack": rep.slack},
        slack=rep.slack + tol,
        verdict="pass" if rep.slack >= -tol else "fail",
    )


def _trial_chentsov(cfg: SuiteConfig, trial: int, rng: np.random.Generator) -> TrialRecord:
    n = int(rng.integers(2, 7))
    space = discrete_space(tuple(range(n)))
    mu = Measure(space, simplex_point(rng, n))
    u = rng.standard_normal(n)
    u -= u.mean()
    while np.linalg.norm(u) < 1e-9:
        u = rng.standard_normal(n)
        u -= u.mean()
    u /= np.linalg.norm(u)
    embedding = random_embedding(rng, n)
    perm = permutation_embedding(rng, n)
    fish = fisher_metric_field(2)
    eucl = kernel_two_tensor(lambda f, m: GridFunction(m.space, f.values * m.values), label="euclidean")
    res_f = chentsov_invariance_residual(fish, embedding, mu, u)
    res_f_perm = chentsov_invariance_residual(fish, perm, mu, u)
    res_e = chentsov_invariance_residual(eucl, embedding, mu, u)
    tol = cfg.tol("fisher_residual")
    ok = abs(res_f) <= tol and abs(res_f_perm) <= tol
    return TrialRecord(
        check="chentsov",
        trial=trial,
        digest=_digest({"mu": mu.values.tolist(), "u": u.tolist()}),
        quantities={
            "n_atoms": n,
            "fisher_residual": res_f,
            "fisher_residual_permutation": res_f_perm,
            "euclidean_residual": res_e,
            "euclidean_separates": bool(abs(res_e) > cfg.tol("euclidean_floor")),
        },
        slack=tol - max(abs(res_f), abs(res_f_perm)),
        verdict="pass" if ok else "fail",
    )


def _chentsov_aggregate(cfg: SuiteConfig, records: list[TrialRecord]) -> list[TrialRecord]:
    hits = [r.quantities["euclidean_separates"] for r in records if r.check == "chentsov"]
    frac = sum(hits) / len(hits) if hits else 0.0
    need = cfg.tol("euclidean_fraction")
    records.append(
        TrialRecord(
            check="chentsov_euclidean_contrast",
            trial=len(records),
            digest=_digest({"fraction": frac}),
            quantities={"separating_fraction": frac, "required_fraction": need},
            slack=frac - need,
            verdict="pass" if frac >= need else "fail",
        )
    )
    return records


def _trial_continuity(cfg: SuiteConfig, trial: int, rng: np.random.Generator) -> TrialRecord:
    n = int(rng.integers(3, 7))
    m = int(rng.integers(2, n))
    space = discrete_space(tuple(range(n)))
    kappa = random_surjection(rng, space, m)
    base = Measure(space, positive_masses(rng, n))
    f = GridFunction(space, rng.standard_normal(n))
    wobble = rng.uniform(-0.5, 0.5, size=n)
    z = rng.standard_normal(n)
    length = 25
    seq = []
    for i in range(length):
        d = 0.6 ** i
        seq.append(
            MixedPoint(
                (GridFunction(space, f.values + d * z),),
                Measure(space, base.values * (1.0 + d * wobble)),
            )
        )
    limit = MixedPoint((f,), base)
    bank = [GridFunction(space, np.eye(n)[i]) for i in range(n)]
    src = converges_mixed(seq, limit, (f,), bank)
    img = pushforward_map_continuity_probe(kappa, seq, limit, (f,), bank)
    ok = img.converged or not src.converged
    return TrialRecord(
        check="continuity",
        trial=trial,
        digest=_digest({"base": base.values.tolist(), "f": f.values.tolist(),
                        "kappa": kappa.assignment.tolist()}),
        quantities={
            "source_converged": src.converged,
            "image_converged": img.converged,
            "source_verdict": src.verdict,
            "image_verdict": img.verdict,
        },
        slack=None,
        verdict="pass" if ok else "fail",
    )


def _run_uniqueness(cfg: SuiteConfig) -> list[TrialRecord]:
    max_cells = int(cfg.params.get("max_cells", 1024))
    grid = int(cfg.params.get("grid_size", 512))
    space = interval_space(0.0, 1.0, grid)
    mu = lebesgue(space)
    f = grid_function(space, lambda t: t)
    parts = dyadic_partitions(0.0, 1.0, max_cells)
    tol = cfg.tol("uniqueness")
    tensors = cfg.tensors or [
        {"kind": "tgc", "order": 2, "label": "unit_product", "target": 1.0 / 3.0},
        {"kind": "tgc", "order": 2, "g": {"kind": "identity"}, "label": "identity_weighted",
         "target": 0.25},
    ]
    records: list[TrialRecord] = []
    for t_i, spec in enumerate(tensors):
        label = spec.get("label", f"tensor{t_i}")
        target = spec.get("target")
        tensor = tensor_from_spec({k: v for k, v in spec.items() if k not in ("label", "target")}, space)
        rep = uniqueness_limit_probe(tensor, mu, f, parts, tol=tol)
        for lvl, (cells, value) in enumerate(zip(rep.cells, rep.values)):
            final = lvl == len(rep.cells) - 1
            if final and target is not None:
                ok = abs(value - float(target)) <= tol
                verdict = "pass" if ok else "fail"
                slack = tol - abs(value - float(target))
            else:
                verdict = "info"
                slack = None
            records.append(
                TrialRecord(
                    check=f"uniqueness:{label}",
                    trial=len(records),
                    digest=_digest({"tensor": label, "cells": cells}),
                    quantities={
                        "cells": cells,
                        "value": value,
                        "reference": rep.reference,
                        "abs_error_vs_reference": abs(value - rep.reference),
                        **({"target": float(target)} if target is not None else {}),
                    },
                    slack=slack,
                    verdict=verdict,
                )
            )
    return records


def _run_integrability(cfg: SuiteConfig) -> list[TrialRecord]:
    records: list[TrialRecord] = []
    specs = cfg.models or [
        {"kind": "example512", "params": {"k": 3}, "norm_order": 2,
         "path": np.linspace(0.02, 0.6, 24).tolist()},
        {"kind": "bernoulli", "norm_order": 2, "path": np.linspace(0.1, 0.9, 17).tolist()},
    ]
    for spec in specs:
        model = model_from_spec(spec)
        k = float(spec.get("norm_order", 2))
        path = spec.get("path", np.linspace(0.1, 0.9, 9).tolist())
        for x in path:
            norm = integrability_norm(model, TangentDirection([float(x)], [1.0]), k)
            records.append(
                TrialRecord(
                    check=f"integrability:{model.name}",
                    trial=len(records),
                    digest=_digest({"model": model.name, "x": float(x), "k": k}),
                    quantities={"x": float(x), "k": k, "norm": norm},
                    slack=None,
                    verdict="info",
                )
            )
    return records


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------

_TRIAL_SUITES: dict[str, Callable[[SuiteConfig, int, np.random.Generator], TrialRecord]] = {
    "monotonicity": _trial_monotonicity,
    "sufficiency": _trial_sufficiency,
    "contraction": _trial_contraction,
    "chentsov": _trial_chentsov,
    "continuity": _trial_continuity,
}

SUITES = tuple(list(_TRIAL_SUITES) + ["uniqueness", "integrability"])


def _run_trials(cfg: SuiteConfig) -> list[TrialRecord]:
    fn = _TRIAL_SUITES[cfg.suite]
    n = cfg.n_trials()
    children = np.random.SeedSequence(cfg.seed).spawn(n)

    def one(i: int) -> TrialRecord:
        return fn(cfg, i, np.random.default_rng(children[i]))

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            records = list(pool.map(one, range(n)))
    else:
        records = [one(i) for i in range(n)]
    if cfg.suite == "chentsov":
        records = _chentsov_aggregate(cfg, records)
    return records


def run_suite(cfg: SuiteConfig) -> tuple[int, Path, Path]:
    """Run a named suite; write JSON report and CSV summary; return exit info.

    Exit status is 0 iff no asserted record failed.  Reports carry no
    timestamps, so a fixed seed gives byte-identical files.
    """
    if cfg.suite not in SUITES:
        raise ValueError(f"unknown suite {cfg.suite!r}; choose from {', '.join(SUITES)}")
    if cfg.suite == "uniqueness":
        records = _run_uniqueness(cfg)
    elif cfg.suite == "integrability":
        records = _run_integrability(cfg)
    else:
        records = _run_trials(cfg)
    violations = sum(1 for r in records if r.verdict == "fail")
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = {
        "suite": cfg.suite,
        "seed": cfg.seed,
        "trials": cfg.n_trials(),
        "tolerances": {**DEFAULT_TOLERANCES, **cfg.tolerances},
        "records": [r.to_dict() for r in records],
        "violations": violations,
    }
    json_path = out_dir / f"{cfg.suite}.json"
    json_path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    csv_path = out_dir / f"{cfg.suite}.csv"
    _write_csv(csv_path, records)
    return (0 if violations == 0 else 1), json_path, csv_path


def _write_csv(path: Path, records: Sequence[TrialRecord]) -> None:
    keys: list[str] = []
    for r in records:
        for k in r.quantities:
            if k not in keys:
                keys.append(k)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL)
        writer.writerow(["trial", "check", "digest"] + keys + ["slack", "verdict"])
        for r in records:
            writer.writerow(
                [r.trial, r.check, r.digest]
                + [r.quantities.get(k, "") for k in keys]
                + ["" if r.slack is None else r.slack, r.verdict]
            )


def emit_plot_data(report_path: Path, quantity: str, out_path: Path | None = None) -> Path:
    """Extract a two-column (index, value) CSV of one quantity from a report."""
    report = json.loads(Path(report_path).read_text())
    records = report.get("records", [])
    if not records:
        raise ValueError(f"report {report_path} contains no records")
    available = sorted({k for r in records for k in r.get("quantities", {})})
    if quantity not in available:
        raise ValueError(
            f"quantity {quantity!r} not in report; available: {', '.join(available)}"
        )
    rows = [
        (i, r["quantities"][quantity])
        for i, r in enumerate(records)
        if quantity in r.get("quantities", {})
    ]
    out = out_path or Path(report_path).with_suffix(f".{quantity}.csv")
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL)
        writer.writerow(["index", quantity])
        writer.writerows(rows)
    return out
