"""Command-line entry point.

Exit codes: 0 success, 1 invalid input, 2 solver failure.
"""
from __future__ import annotations

import argparse
import inspect
import json
import logging
import sys
from pathlib import Path

from . import io
from .datagen import GENERATORS, add_noise, normalize_columns
from .diagnostics import check_theorem2_conditions
from .errors import SolverError, ValidationError
from .experiment import ExperimentConfig, run_experiment
from .graph import connected_components, relative_violation, symmetrize
from .metrics import accuracy
from .pipeline import cluster_noiseless, cluster_noisy
from .solvers import SOLVERS, self_expression_matrix
from .spectral import spectral_cluster

log = logging.getLogger("noisyssc")


def _value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _params(pairs):
    out = {}
    for item in pairs or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise ValidationError(f"--set expects key=value, got {item!r}")
        out[key] = _value(val)
    return out


def cmd_gen(args):
    fn = GENERATORS.get(args.generator)
    if fn is None:
        raise ValidationError(f"unknown generator {args.generator!r}")
    params = _params(args.set)
    if args.seed is not None and "seed" in inspect.signature(fn).parameters:
        params["seed"] = args.seed
    try:
        ds = fn(**params)
    except TypeError as err:
        raise ValidationError(str(err)) from err
    Y = ds.Y
    if args.model == "gaussian" and args.sigma:
        Y, _ = add_noise(Y, "gaussian", args.sigma, seed=args.seed)
    elif args.model == "adversarial":
        if not args.noise:
            raise ValidationError("--model adversarial needs --noise FILE")
        Y, _ = add_noise(Y, "adversarial", E=io.read_matrix(args.noise))
    out = Path(args.out)
    io.write_matrix(out / "data.csv", Y)
    io.write_matrix(out / "clean.csv", ds.X)
    io.write_labels(out / "labels.csv", ds.labels)
    io.write_json(out / "meta.json", ds.meta)
    print(f"wrote {Y.shape[1]} points in R^{Y.shape[0]} to {out}")


def cmd_solve(args):
    Y = normalize_columns(io.read_matrix(args.data))
    C = self_expression_matrix(Y, args.model, lam=args.lam)
    io.write_matrix(args.out, C.coeffs)
    print(f"max KKT/equality residual {C.kkt_residuals.max():.3e}; "
          f"{len(C.zero_columns)} all-zero columns")


def cmd_cluster(args):
    Y = io.read_matrix(args.data)
    if args.model == "noiseless":
        rec = cluster_noiseless(Y)
    else:
        if args.L is None or args.d is None or args.lam is None:
            raise ValidationError("noisy clustering needs --L, --d and --lambda")
        rec = cluster_noisy(Y, args.L, args.d, args.lam, seed=args.seed or 0,
                            oversegment=args.oversegment, span=args.span)
    out = Path(args.out)
    io.write_labels(out, rec.labels)
    if rec.graph is not None:
        from .plotting import plot_similarity
        io.write_matrix(out.with_name(out.stem + "_similarity.csv"), rec.graph.weights)
        plot_similarity(rec.graph.weights, rec.labels,
                        out.with_name(out.stem + "_similarity.png"))
    print(f"{rec.assignment.L} clusters, {len(rec.components)} graph components")
    for w in rec.warnings:
        print(f"warning: {w}", file=sys.stderr)


def cmd_diagnose(args):
    Y = io.read_matrix(args.data)
    X = io.read_matrix(args.clean) if args.clean else Y
    if X.shape != Y.shape:
        raise ValidationError("--clean and --data differ in shape")
    labels = io.read_labels(args.labels)
    report = check_theorem2_conditions(X, Y - X, labels, args.d).to_dict()
    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)


def cmd_metrics(args):
    truth = io.read_labels(args.labels)
    result = {}
    if args.pred:
        result["accuracy"] = accuracy(io.read_labels(args.pred), truth)
    if args.similarity:
        G = symmetrize(io.read_matrix(args.similarity))
        result["rel_violation"] = relative_violation(G, truth)
        result["n_components"] = len(connected_components(G))
    if args.data:
        Y = normalize_columns(io.read_matrix(args.data))
        if args.lam is None:
            raise ValidationError("--data needs --lambda")
        G = symmetrize(self_expression_matrix(Y, "lasso", lam=args.lam))
        result["rel_violation"] = relative_violation(G, truth)
        result["n_components"] = len(connected_components(G))
        if args.L:
            result["acc1"] = accuracy(spectral_cluster(G, args.L, seed=args.seed or 0), truth)
    if not result:
        raise ValidationError("nothing to score: give --pred, --similarity or --data")
    print(json.dumps(result, indent=2))


def cmd_experiment(args):
    cfg = ExperimentConfig.from_dict(io.read_json(args.config))
    if args.out:
        cfg.outputs["report"] = args.out
    report = run_experiment(cfg)
    agg = report.aggregates
    for key in ("acc1", "acc2", "rel_violation"):
        if agg.get(key):
            print(f"{key}: mean {agg[key]['mean']:.4f} "
                  f"(min {agg[key]['min']:.4f}, max {agg[key]['max']:.4f})")
    print(f"{agg['n_seeds']} seeds, {agg['n_failed']} failed, "
          f"{report.runtime_seconds:.1f} s")
    if not cfg.outputs.get("report"):
        print(json.dumps(report.to_dict(), indent=2))


def build_parser():
    p = argparse.ArgumentParser(prog="noisyssc", description="Sparse subspace clustering tools")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic dataset")
    g.add_argument("generator", choices=sorted(GENERATORS))
    g.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="generator parameter (repeatable)")
    g.add_argument("--seed", type=int)
    g.add_argument("--model", choices=("none", "gaussian", "adversarial"), default="none",
                   help="extra noise on top of the generator's own")
    g.add_argument("--sigma", type=float, default=0.0)
    g.add_argument("--noise", help="perturbation matrix for --model adversarial")
    g.add_argument("--out", required=True, help="output directory")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="self-expression coefficients for every column")
    s.add_argument("--data", required=True)
    s.add_argument("--model", choices=SOLVERS, default="lasso")
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("cluster", help="cluster the columns of a data matrix")
    c.add_argument("--data", required=True)
    c.add_argument("--model", choices=("noisy", "noiseless"), default="noisy")
    c.add_argument("--L", type=int)
    c.add_argument("--d", type=int)
    c.add_argument("--lambda", dest="lam", type=float)
    c.add_argument("--seed", type=int)
    c.add_argument("--oversegment", type=int)
    c.add_argument("--span", choices=("sample", "svd"), default="sample")
    c.add_argument("--out", required=True, help="labels CSV; figures are written beside it")
    c.set_defaults(func=cmd_cluster)

    d = sub.add_parser("diagnose", help="inradius, restricted eigenvalue, lambda interval")
    d.add_argument("--data", required=True, help="observed matrix")
    d.add_argument("--clean", help="noiseless matrix (default: the observed one)")
    d.add_argument("--labels", required=True)
    d.add_argument("--d", type=int, required=True)
    d.add_argument("--out")
    d.set_defaults(func=cmd_diagnose)

    m = sub.add_parser("metrics", help="accuracy and SEP violation")
    m.add_argument("--labels", required=True, help="ground-truth labels")
    m.add_argument("--pred")
    m.add_argument("--similarity", help="coefficient or similarity matrix")
    m.add_argument("--data")
    m.add_argument("--lambda", dest="lam", type=float)
    m.add_argument("--L", type=int)
    m.add_argument("--seed", type=int)
    m.set_defaults(func=cmd_metrics)

    e = sub.add_parser("experiment", help="run a JSON-configured multi-seed experiment")
    e.add_argument("--config", required=True)
    e.add_argument("--out", help="report path (overrides outputs.report)")
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ValidationError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (OSError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except SolverError as err:
        print(f"solver failure: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
