"""Seeded experiment runs: generate, solve, cluster with and without merging, score."""
from __future__ import annotations

import inspect
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .datagen import GENERATORS, add_noise, normalize_columns
from .diagnostics import check_theorem2_conditions
from .errors import DegenerateInput, InvalidParameter, SSCError, ValidationError
from .graph import connected_components, relative_violation, symmetrize
from .metrics import accuracy
from .pipeline import cluster_noiseless, cluster_noisy
from .solvers import self_expression_matrix
from .spectral import spectral_cluster

log = logging.getLogger(__name__)

ALGORITHMS = ("lasso", "basis_pursuit")
METRICS = ("acc1", "acc2", "rel_violation", "n_components")


@dataclass
class ExperimentConfig:
    """What to generate, how to cluster it, and for which seeds.

    ``algorithm`` keys: ``name`` (lasso or basis_pursuit), ``lambda``, ``L``,
    ``d`` and optionally ``oversegment`` (spectral pre-split used by the merging
    step instead of connected components) and ``span`` (sample or svd).
    """

    generator: dict
    algorithm: dict
    seeds: list
    outputs: dict = field(default_factory=dict)

    def __post_init__(self):
        name = self.generator.get("name")
        if name not in GENERATORS:
            raise InvalidParameter(f"unknown generator {name!r}; choose from {sorted(GENERATORS)}")
        if self.algorithm.get("name") not in ALGORITHMS:
            raise InvalidParameter(f"unknown algorithm {self.algorithm.get('name')!r}")
        if not self.seeds:
            raise InvalidParameter("seeds must be a nonempty list")
        self.seeds = [int(s) for s in self.seeds]
        if self.algorithm["name"] == "lasso" and not self.algorithm.get("lambda", 0) > 0:
            raise InvalidParameter("lasso needs a positive lambda")
        for key in ("L", "d"):
            if int(self.algorithm.get(key, 0)) < 1:
                raise InvalidParameter(f"algorithm.{key} must be a positive integer")

    @classmethod
    def from_dict(cls, obj):
        try:
            return cls(dict(obj["generator"]), dict(obj["algorithm"]), list(obj["seeds"]),
                       dict(obj.get("outputs") or {}))
        except (KeyError, TypeError) as err:
            raise ValidationError(f"malformed config: missing or bad {err}") from err

    def to_dict(self):
        return dict(generator=self.generator, algorithm=self.algorithm,
                    seeds=list(self.seeds), outputs=self.outputs)


@dataclass
class ExperimentReport:
    config_echo: dict
    per_seed: list
    aggregates: dict
    runtime_seconds: float

    def to_dict(self):
        return dict(config_echo=self.config_echo, per_seed=self.per_seed,
                    aggregates=self.aggregates, runtime_seconds=self.runtime_seconds)

    @classmethod
    def from_dict(cls, obj):
        return cls(obj["config_echo"], obj["per_seed"], obj["aggregates"],
                   obj["runtime_seconds"])


def generate(gen_cfg, seed):
    """Build the dataset for one seed; optional ``noise: {sigma}`` adds Gaussian noise."""
    fn = GENERATORS[gen_cfg["name"]]
    params = dict(gen_cfg.get("params") or {})
    if "seed" in inspect.signature(fn).parameters:
        params["seed"] = seed
    try:
        ds = fn(**params)
    except TypeError as err:
        raise InvalidParameter(f"bad parameters for {gen_cfg['name']}: {err}") from err
    noise = gen_cfg.get("noise")
    if noise:
        ds.Y, _ = add_noise(ds.Y, "gaussian", float(noise.get("sigma", 0.0)),
                            seed=np.random.default_rng([seed, 1]))
    return ds


def _clean(v):
    if isinstance(v, (float, np.floating)):
        return float(v) if np.isfinite(v) else None
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def run_seed(config: ExperimentConfig, seed, matrices_dir=None):
    alg = config.algorithm
    L, d = int(alg["L"]), int(alg["d"])
    lam = float(alg["lambda"]) if alg["name"] == "lasso" else None
    ds = generate(config.generator, seed)
    warnings = []

    Yn = normalize_columns(ds.Y)
    C = self_expression_matrix(Yn, alg["name"], lam=lam)
    G = symmetrize(C)
    try:
        rel = relative_violation(G, ds.labels)
    except DegenerateInput as err:
        rel = None
        warnings.append(f"relative violation undefined: {err}")
    comps = connected_components(G)
    spectral = spectral_cluster(G, L, seed=seed)
    acc1 = accuracy(spectral, ds.labels)

    if alg["name"] == "lasso":
        rec = cluster_noisy(ds.Y, L, d, lam, seed=seed, coefficients=C,
                            strict=bool(alg.get("strict", True)),
                            oversegment=alg.get("oversegment"), span=alg.get("span", "sample"))
    else:
        rec = cluster_noiseless(ds.Y)
    warnings.extend(rec.warnings)
    acc2 = accuracy(rec.labels, ds.labels)

    try:
        diag = check_theorem2_conditions(ds.X, ds.E, ds.labels, d)
        interval = None if diag.lambda_interval is None else list(diag.lambda_interval)
    except SSCError as err:
        interval = None
        warnings.append(f"diagnostics skipped: {err}")

    if matrices_dir is not None:
        from .plotting import plot_assignments, plot_similarity
        out = Path(matrices_dir)
        io.write_matrix(out / f"seed{seed}_similarity.csv", G.weights)
        io.write_labels(out / f"seed{seed}_truth.csv", ds.labels)
        io.write_labels(out / f"seed{seed}_acc1_labels.csv", spectral.labels)
        io.write_labels(out / f"seed{seed}_acc2_labels.csv", rec.labels)
        plot_similarity(G.weights, ds.labels, out / f"seed{seed}_similarity.png",
                        title=f"seed {seed} similarity")
        plot_assignments(rec.labels, ds.labels, out / f"seed{seed}_acc2_labels.png",
                         title=f"seed {seed} merged clusters")

    return dict(seed=seed, acc1=acc1, acc2=acc2, rel_violation=_clean(rel),
                n_components=len(comps), lambda_interval=interval, warnings=warnings)


def _aggregate(rows):
    agg = {"n_seeds": len(rows), "n_failed": sum("error" in r for r in rows)}
    for key in METRICS:
        vals = [r[key] for r in rows if r.get(key) is not None]
        agg[key] = (dict(mean=float(np.mean(vals)), min=float(np.min(vals)),
                         max=float(np.max(vals)), count=len(vals)) if vals else None)
    return agg


def run_experiment(config) -> ExperimentReport:
    """Run every seed; a seed that raises is recorded with its error, not fatal."""
    if not isinstance(config, ExperimentConfig):
        config = ExperimentConfig.from_dict(config)
    start = time.perf_counter()
    matrices_dir = config.outputs.get("matrices")
    rows = []
    for seed in config.seeds:
        try:
            rows.append(run_seed(config, seed, matrices_dir))
        except SSCError as err:
            log.warning("seed %d failed: %s", seed, err)
            rows.append(dict(seed=seed, acc1=None, acc2=None, rel_violation=None,
                             n_components=None, lambda_interval=None, warnings=[],
                             error=f"{type(err).__name__}: {err}"))
    report = ExperimentReport(config.to_dict(), rows, _aggregate(rows),
                              time.perf_counter() - start)
    if config.outputs.get("report"):
        io.write_json(config.outputs["report"], report.to_dict())
    return report


def nh_config(sigma, seeds=range(10), lam=1e-3):
    """The two-subspace hard configuration, merged from a 4-way spectral split."""
    return ExperimentConfig(
        generator=dict(name="nh", params=dict(n=5, m=11, delta=0.2, sigma_noise=sigma)),
        algorithm=dict(name="lasso", **{"lambda": lam}, L=2, d=4, oversegment=4, span="svd"),
        seeds=list(seeds))
