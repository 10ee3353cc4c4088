"""Command-line entry point.

Subcommands::

    ocnn run      --config exp.cfg --seed 7 --out results/
    ocnn inspect  tests/data/glass5.dat
    ocnn tune     --data tests/data/glass5.dat --method jknn --fold 0 --seed 7
    ocnn project  --data tests/data/glass5.dat --mode rp --seed 7 --out proj.csv
    ocnn synth    --out fixture.csv --n-targets 100 --n-outliers 10 --seed 7

Exit codes: 0 success, 2 config/parse error, 3 protocol violation,
4 noise-budget error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .config import ExperimentConfig, load_config
from .core import RandomStream, apply_minmax, fit_minmax
from .datasets import (
    LabeledDataset,
    SyntheticSpec,
    generate_synthetic,
    load_dataset,
    write_csv_dataset,
)
from .ensemble import EnsembleConfig, apply_transform, draw_transform, train_ensemble
from .errors import (
    DimensionError,
    MetricError,
    NoiseBudgetError,
    ParameterError,
    ParseError,
    PlanError,
)
from .evaluation import format_cell, make_fold_plan, run_experiment
from .report import write_report
from .tuning import fit_tuned_model

log = logging.getLogger("ocnn")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PROTOCOL = 3
EXIT_NOISE = 4


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("experiment (override config file)")
    g.add_argument("--data")
    g.add_argument("--format", choices=["auto", "keel", "csv"])
    g.add_argument("--label-column")
    g.add_argument("--target", help="class string treated as target (default: majority)")
    g.add_argument("--method", help="comma list of 11nn, 11nn-theta, jknn")
    g.add_argument("--ensemble", help="comma list of single, rs50, rs75, rp")
    for name, typ in [("F", int), ("G", int), ("L", int), ("J-max", int), ("K-max", int),
                      ("omega", float), ("min-rejected", int), ("omega-decay", float),
                      ("omega-floor", float), ("p", int), ("jobs", int)]:
        g.add_argument(f"--{name}", type=typ, dest=name.replace("-", "_"))
    g.add_argument("--final-train", choices=["retained", "all"])
    g.add_argument("--no-lower-fence", dest="lower_fence", action="store_const", const=False)
    g.add_argument("--normalize-rp-rows", action="store_const", const=True)
    g.add_argument("--no-renormalize", dest="renormalize", action="store_const", const=False)
    g.add_argument("--include-noise-in-inner-train", dest="include_noise", action="store_const", const=True)
    g.add_argument("--seed", type=int)


def _overrides(args) -> dict:
    keys = ["data", "format", "label_column", "target", "F", "G", "L", "J_max", "K_max", "omega",
            "min_rejected", "omega_decay", "omega_floor", "p", "jobs", "final_train", "lower_fence",
            "normalize_rp_rows", "renormalize", "include_noise", "seed"]
    out = {k: getattr(args, k, None) for k in keys}
    for k in ("method", "ensemble"):
        v = getattr(args, k, None)
        if v is not None:
            out[k] = tuple(s.strip() for s in v.split(",") if s.strip())
    return out


def _config(args) -> ExperimentConfig:
    return load_config(getattr(args, "config", None), _overrides(args))


def _dataset(cfg: ExperimentConfig) -> LabeledDataset:
    if not cfg.data:
        raise ParseError("no dataset given (config key 'data' or --data)")
    return load_dataset(cfg.data, cfg.format, cfg.label_column, cfg.target)


def cmd_run(args) -> int:
    cfg = _config(args)
    if cfg.seed is None:
        raise ParseError("a master seed is required (--seed or config key 'seed')")
    ds = _dataset(cfg)
    out = Path(args.out)
    reports = []
    for spec in cfg.specs():
        log.info("running %s on %s (seed %d)", spec.label, ds.name, cfg.seed)
        rep = run_experiment(ds, spec, cfg.seed, jobs=cfg.jobs)
        reports.append(rep)
        s = rep.summary()
        print(f"{ds.name}\t{spec.label}\t" + "\t".join(f"{m}={format_cell(*s[m])}" for m in ("gmean", "tpr", "tnr")))
    write_report(reports, out / "results.csv", "csv")
    write_report(reports, out / "report.json", "json")
    if not args.no_figures:
        from .plotting import plot_metrics, plot_omega

        plot_metrics(reports, out / "metrics.png")
        if any(f.omega_used for r in reports for f in r.folds):
            plot_omega(reports, out / "omega.png")
    print(f"wrote {out / 'results.csv'}")
    return EXIT_OK


def cmd_inspect(args) -> int:
    ds = load_dataset(args.path, args.format, args.label_column, args.target)
    s = ds.summary()
    print(f"name             {s['name']}")
    print(f"rows             {s['rows']}")
    print(f"dims             {s['dims']}")
    for cls, n in s["classes"].items():
        mark = " (target)" if cls == ds.target_label else ""
        print(f"class {cls!s:<10} {n}{mark}")
    print(f"imbalance ratio  {s['imbalance_ratio']:.2f}")
    return EXIT_OK


def _fold_training(cfg: ExperimentConfig, ds: LabeledDataset, fold: int):
    if not 0 <= fold < cfg.F:
        raise ParameterError(f"fold {fold} outside [0, {cfg.F})")
    master = RandomStream(cfg.seed)
    plan = make_fold_plan(ds.is_target, cfg.F, master.child(0))
    tr = plan.train_rows(fold)
    tr = tr[ds.is_target[tr]]
    X = ds.features[tr]
    norm = fit_minmax(X)
    return apply_minmax(norm, X), master.child(1, fold)


def cmd_tune(args) -> int:
    cfg = _config(args)
    if cfg.seed is None:
        raise ParseError("a master seed is required (--seed)")
    ds = _dataset(cfg)
    Xn, stream = _fold_training(cfg, ds, args.fold)
    spec = cfg.specs()[0]
    if spec.ensemble == "single":
        res = fit_tuned_model(Xn, spec.method, spec.iqr, spec.G, spec.grid, stream,
                              spec.include_noise, spec.final_train)
        results = [(None, res.tuned, res.split, res.model)]
    else:
        ens = train_ensemble(Xn, spec.ensemble_config(), spec.iqr, spec.grid, stream, jobs=cfg.jobs)
        results = [(i, m.tuned, m.split, m.model) for i, m in enumerate(ens.members)]
    for i, tuned, split, model in results:
        rec = {"member": i, "J": model.params.J, "K": model.params.K, "theta": model.params.theta}
        if tuned is not None:
            rec["achieved_gmean"] = tuned.achieved_gmean
        if split is not None:
            rec.update(omega_used=split.omega_used, retained=len(split.retained), rejected=len(split.rejected))
        print(json.dumps(rec))
    return EXIT_OK


def cmd_project(args) -> int:
    cfg = _config(args)
    if cfg.seed is None:
        raise ParseError("a master seed is required (--seed)")
    ds = _dataset(cfg)
    norm = fit_minmax(ds.features[ds.is_target])
    Xn = apply_minmax(norm, ds.features)
    ecfg = EnsembleConfig(mode=args.mode, p=cfg.p, normalize_rp_rows=cfg.normalize_rp_rows)
    t = draw_transform(ecfg, ds.d, RandomStream(cfg.seed).child(args.member, 0))
    Z = apply_transform(t, Xn)
    out = LabeledDataset(Z, ds.labels, ds.target_label, f"{ds.name}-{args.mode}",
                         attributes=[f"z{i}" for i in range(Z.shape[1])])
    write_csv_dataset(out, args.out, cfg.label_column)
    print(f"wrote {Z.shape[0]}x{Z.shape[1]} {t.kind} view to {args.out}")
    return EXIT_OK


def cmd_synth(args) -> int:
    centers = ()
    if args.centers:
        centers = tuple(float(v) for v in args.centers.split(","))
        if len(centers) % args.d:
            raise ParseError(f"--centers needs a multiple of d={args.d} numbers")
    spec = SyntheticSpec(args.n_targets, args.n_outliers, args.d, args.sigma, args.radius,
                         centers, args.outlier_mode, args.copies)
    ds = generate_synthetic(spec, RandomStream(args.seed), name=Path(args.out).stem)
    write_csv_dataset(ds, args.out)
    print(f"wrote {ds.n} rows ({int(ds.is_target.sum())} target) to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ocnn", description="One-class nearest-neighbour experiments")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment config and write reports")
    p.add_argument("--config")
    p.add_argument("--out", default="results")
    p.add_argument("--no-figures", action="store_true")
    _add_experiment_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("inspect", help="summarise a dataset")
    p.add_argument("path")
    p.add_argument("--format", default="auto", choices=["auto", "keel", "csv"])
    p.add_argument("--label-column", default="label")
    p.add_argument("--target")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("tune", help="print tuned parameters for one outer fold")
    p.add_argument("--config")
    p.add_argument("--fold", type=int, default=0)
    _add_experiment_flags(p)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("project", help="write a transformed (RS/RP) view of a dataset")
    p.add_argument("--config")
    p.add_argument("--mode", default="rp", choices=["rp", "rs50", "rs75", "identity"])
    p.add_argument("--member", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_experiment_flags(p)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("synth", help="write a synthetic fixture as CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--n-targets", type=int, default=100)
    p.add_argument("--n-outliers", type=int, default=10)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--radius", type=float, default=10.0)
    p.add_argument("--centers", help="flattened comma list of cluster centres")
    p.add_argument("--outlier-mode", default="shell", choices=["shell", "uniform"])
    p.add_argument("--copies", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, ParameterError, DimensionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (PlanError, MetricError) as e:
        print(f"protocol violation: {e}", file=sys.stderr)
        return EXIT_PROTOCOL
    except NoiseBudgetError as e:
        print(f"noise budget: {e}", file=sys.stderr)
        return EXIT_NOISE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
