"""Command line front end for the correction-scheme toolkit.

Subcommands
-----------
optimize   split a labeled dataset, anneal a correction scheme on the large
           part, report dev metrics, write scheme + solve trace
apply      apply a saved scheme to a dataset, write predictions + report
compare    grid of (dataset x mode x seed) runs with a summary table
report     extract (task, N, search space, wall time, loops) from solve files
oracle     exhaustive search on a small problem, for certification
generate   write the built-in synthetic benchmark suite (or one profile)

Exit codes: 0 success, 2 validation error, 3 solver precondition error,
4 I/O error. All randomness is funneled through ``--seed``; ``optimize``
and ``compare`` refuse to run without it.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .annealing import AnnealConfig, SolveResult, anneal
from .corrections import FunctionSet, default_function_set, load_catalog
from .data import (
    LabeledDataset,
    load_dataset,
    save_dataset,
    save_predictions,
    split_dataset,
)
from .errors import PreconditionError, ValidationError
from .objective import EvalReport, ObjectiveWeights, evaluate, objective_value, predict
from .oracle import exhaustive_search
from .scheme import CorrectionScheme, load_scheme, save_scheme
from .synth import benchmark_suite, generate, load_profile, save_profile

MODES = ("dcs", "dnip", "furud")
OBJECTIVES = ("full", "err", "err+pmi")

# Selection-kind buckets for tally reporting. Don't Change is split out of
# the membership family so the tallies show how often a class is left alone.
KIND_BUCKETS = ("dont_change", "membership", "weight")


def mode_indices(fs: FunctionSet, mode: str) -> tuple[int, ...]:
    """Catalog indices searchable under ``mode``.

    dcs searches everything, dnip only weights plus Don't Change, furud
    only memberships (Don't Change is itself a membership).
    """
    if mode not in MODES:
        raise ValidationError(f"unknown mode {mode!r}, expected one of {MODES}")
    k0 = fs.dont_change_index
    if mode == "dcs":
        return tuple(range(1, fs.size + 1))
    if mode == "dnip":
        weights = range(len(fs.memberships) + 1, fs.size + 1)
        return (k0, *weights)
    return tuple(range(1, len(fs.memberships) + 1))


def kind_bucket(fs: FunctionSet, k: int) -> str:
    if k == fs.dont_change_index:
        return "dont_change"
    return fs.index_kind(k)


def _weights_from_args(args) -> ObjectiveWeights:
    return ObjectiveWeights.from_mode(args.objective, beta=args.beta, tau=args.tau)


def _config_from_args(args, seed: int) -> AnnealConfig:
    return AnnealConfig(
        seed=seed,
        initial_temperature=args.init_temp,
        cooling_rate=args.alpha,
        lambda1=args.lambda1,
        lambda2=args.lambda2,
        min_temperature=args.min_temp,
        max_outer_loops=args.max_outer,
    )


def _catalog_from_args(args) -> FunctionSet:
    if args.catalog is not None:
        return load_catalog(args.catalog)
    return default_function_set()


def _write_json(path: Path, payload: dict) -> None:
    with path.open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _write_trace_csv(path: Path, result: SolveResult) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["outer_loop", "temperature", "best_z", "generated", "accepted"]
        )
        for t, temp, z, g, a in result.trace_rows():
            writer.writerow([t, repr(temp), repr(z), g, a])


def _write_per_class_csv(
    path: Path,
    fs: FunctionSet,
    selection: tuple[int, ...],
    report: EvalReport,
) -> None:
    """Human-readable per-class table for one evaluation report."""
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["class", "n_true", "accuracy", "correction_kind", "correction_params"]
        )
        for c in range(len(selection)):
            k = selection[c]
            desc = fs.describe_index(k)
            params = ";".join(
                f"{key}={desc[key]}" for key in sorted(desc) if key != "kind"
            )
            acc = report.per_class_accuracy[c]
            writer.writerow(
                [
                    c + 1,
                    report.class_counts[c],
                    "" if acc is None else repr(acc),
                    kind_bucket(fs, k),
                    params,
                ]
            )


def _fmt(x: float) -> str:
    return f"{x:.4f}"


# ----------------------------------------------------------------- optimize


def cmd_optimize(args) -> int:
    ds = load_dataset(args.input, args.format)
    catalog = _catalog_from_args(args)
    weights = _weights_from_args(args)
    config = _config_from_args(args, args.seed)
    split = split_dataset(ds, args.dev_fraction, args.seed)
    allowed = mode_indices(catalog, args.mode)

    result = anneal(
        split.optimization_set, catalog, weights, config, allowed_indices=allowed
    )

    opt = split.optimization_set
    scheme = CorrectionScheme(
        catalog=catalog,
        selection=result.best_xi,
        objective=weights,
        anneal_config=config,
        best_z=result.best_z,
        dataset_num_instances=opt.num_instances,
        dataset_num_classes=opt.num_classes,
        dataset_sha256=opt.fingerprint(),
    )

    identity = (catalog.dont_change_index,) * ds.num_classes
    dev_corrected = evaluate(split.dev_set, catalog, result.best_xi, weights)
    dev_baseline = evaluate(split.dev_set, catalog, identity, weights)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_scheme(scheme, out / "scheme.json")
    solve_payload = {
        "task": Path(args.input).stem,
        "num_classes": ds.num_classes,
        "mode": args.mode,
        "objective": args.objective,
        "seed": args.seed,
        "search_space": ds.num_classes * catalog.size,
        "num_allowed": len(allowed),
        **result.to_dict(),
    }
    _write_json(out / "solve.json", solve_payload)
    _write_trace_csv(out / "trace.csv", result)
    save_dataset(opt, out / "optimization_set.json")
    save_dataset(split.dev_set, out / "dev_set.json")
    _write_json(out / "dev_report.json", dev_corrected.to_dict())
    _write_json(out / "dev_baseline.json", dev_baseline.to_dict())
    _write_per_class_csv(
        out / "dev_report.csv", catalog, result.best_xi, dev_corrected
    )

    print(
        f"optimize: {ds.num_instances} rows -> {opt.num_instances} optimization"
        f" + {split.dev_set.num_instances} dev, mode {args.mode},"
        f" {len(allowed)} of {catalog.size} functions searchable"
    )
    print(
        f"best_z {result.best_z:.6f} after {result.outer_loops_run} outer loops"
        f" ({result.wall_time:.2f}s)"
    )
    print(
        "dev accuracy "
        f"{_fmt(dev_baseline.overall_accuracy)} -> "
        f"{_fmt(dev_corrected.overall_accuracy)}"
    )
    if dev_baseline.cobias is not None and dev_corrected.cobias is not None:
        print(
            "dev cobias "
            f"{_fmt(dev_baseline.cobias)} -> {_fmt(dev_corrected.cobias)}"
        )
    print(f"wrote scheme.json solve.json trace.csv dev_report.json -> {out}")
    return 0


# -------------------------------------------------------------------- apply


def cmd_apply(args) -> int:
    scheme = load_scheme(args.scheme)
    ds = load_dataset(args.input, args.format)
    if ds.num_classes != scheme.num_classes:
        raise ValidationError(
            f"scheme covers {scheme.num_classes} classes but dataset has "
            f"{ds.num_classes}"
        )
    catalog = scheme.catalog
    preds = predict(ds, catalog, scheme.selection)
    corrected = evaluate(ds, catalog, scheme.selection, scheme.objective)
    identity = (catalog.dont_change_index,) * ds.num_classes
    baseline = evaluate(ds, catalog, identity, scheme.objective)

    match = scheme.matches_dataset(ds)
    recomputed = None
    if match:
        recomputed = objective_value(ds, catalog, scheme.selection, scheme.objective)
        if recomputed != scheme.best_z:
            raise PreconditionError(
                "scheme does not reproduce its recorded objective on its own "
                f"optimization set: recorded {scheme.best_z!r}, got {recomputed!r}"
            )

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_predictions(ds, preds, out / "predictions.csv")
    _write_json(
        out / "report.json",
        {
            "dataset": str(args.input),
            "num_instances": ds.num_instances,
            "num_classes": ds.num_classes,
            "optimization_set_match": match,
            "recorded_best_z": scheme.best_z,
            "recomputed_z": recomputed,
            "report": corrected.to_dict(),
            "baseline": baseline.to_dict(),
        },
    )
    _write_per_class_csv(
        out / "report.csv", catalog, scheme.selection, corrected
    )

    print(
        f"apply: {ds.num_instances} rows, accuracy "
        f"{_fmt(baseline.overall_accuracy)} -> {_fmt(corrected.overall_accuracy)}"
    )
    if baseline.cobias is not None and corrected.cobias is not None:
        print(
            f"cobias {_fmt(baseline.cobias)} -> {_fmt(corrected.cobias)}"
        )
    if match:
        print("input is the scheme's optimization set; recorded best_z reproduced")
    print(f"wrote predictions.csv report.json report.csv -> {out}")
    return 0


# ------------------------------------------------------------------ compare


def _run_cell(payload: tuple) -> dict:
    """One (dataset, mode, seed) grid cell. Top level so it pickles."""
    (name, train, eval_ds, mode, seed, catalog, weights, config_kw) = payload
    config = AnnealConfig(seed=seed, **config_kw)
    allowed = mode_indices(catalog, mode)
    result = anneal(train, catalog, weights, config, allowed_indices=allowed)
    identity = (catalog.dont_change_index,) * train.num_classes
    corrected = evaluate(eval_ds, catalog, result.best_xi, weights)
    baseline = evaluate(eval_ds, catalog, identity, weights)
    train_corrected = evaluate(train, catalog, result.best_xi, weights)

    buckets = {b: 0 for b in KIND_BUCKETS}
    for k in result.best_xi:
        buckets[kind_bucket(catalog, k)] += 1

    base_acc = baseline.per_class_accuracy
    present = [
        (acc, c + 1) for c, acc in enumerate(base_acc) if acc is not None
    ]
    weakest_acc, weakest_class = min(present)
    weakest_kind = kind_bucket(catalog, result.best_xi[weakest_class - 1])

    return {
        "dataset": name,
        "mode": mode,
        "seed": seed,
        "num_classes": train.num_classes,
        "best_z": result.best_z,
        "train_accuracy": train_corrected.overall_accuracy,
        "eval_accuracy": corrected.overall_accuracy,
        "eval_cobias": corrected.cobias,
        "baseline_eval_accuracy": baseline.overall_accuracy,
        "baseline_eval_cobias": baseline.cobias,
        "num_dont_change": buckets["dont_change"],
        "num_membership": buckets["membership"],
        "num_weight": buckets["weight"],
        "weakest_class": weakest_class,
        "weakest_class_baseline_accuracy": weakest_acc,
        "weakest_kind": weakest_kind,
        "wall_time": result.wall_time,
    }


def _thread_budget() -> int:
    raw = os.environ.get("DCS_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(
            f"DCS_THREADS must be a positive integer, got {raw!r}"
        ) from None
    if value < 1:
        raise ValidationError(
            f"DCS_THREADS must be a positive integer, got {raw!r}"
        )
    return value


def run_compare_grid(
    named_datasets: list[tuple[str, LabeledDataset, LabeledDataset]],
    modes: tuple[str, ...],
    seeds: tuple[int, ...],
    catalog: FunctionSet,
    weights: ObjectiveWeights,
    config_kw: dict,
) -> list[dict]:
    """Run every (dataset, mode, seed) cell; rows sorted deterministically.

    ``named_datasets`` holds (name, train, eval) triples; eval may be the
    train set itself when no held-out data exists. ``config_kw`` is the
    AnnealConfig fields minus seed. Concurrency is capped by DCS_THREADS
    (default 1, sequential); each cell is an independent chain, so every
    field except wall_time is identical at any thread count.
    """
    cells = [
        (name, train, eval_ds, mode, seed, catalog, weights, config_kw)
        for name, train, eval_ds in named_datasets
        for mode in modes
        for seed in seeds
    ]
    threads = _thread_budget()
    if threads > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(cells))) as pool:
            rows = list(pool.map(_run_cell, cells))
    else:
        rows = [_run_cell(cell) for cell in cells]
    rows.sort(key=lambda r: (r["dataset"], r["mode"], r["seed"]))
    return rows


RUNS_COLUMNS = (
    "dataset",
    "mode",
    "seed",
    "num_classes",
    "best_z",
    "train_accuracy",
    "eval_accuracy",
    "eval_cobias",
    "baseline_eval_accuracy",
    "baseline_eval_cobias",
    "num_dont_change",
    "num_membership",
    "num_weight",
    "weakest_class",
    "weakest_class_baseline_accuracy",
    "weakest_kind",
    "wall_time",
)

SUMMARY_COLUMNS = (
    "dataset",
    "mode",
    "num_seeds",
    "accuracy_mean",
    "accuracy_std",
    "cobias_mean",
    "cobias_std",
    "baseline_accuracy_mean",
    "baseline_cobias_mean",
    "dont_change_total",
    "membership_total",
    "weight_total",
    "kind_tally",
    "weakest_membership_seeds",
)


def summarize_rows(rows: list[dict]) -> list[dict]:
    """Per-(dataset, mode) mean/std table with selection-kind tallies."""
    groups: dict[tuple[str, str], list[dict]] = {}
    for row in rows:
        groups.setdefault((row["dataset"], row["mode"]), []).append(row)
    out = []
    for (dataset, mode), members in sorted(groups.items()):
        accs = np.array([r["eval_accuracy"] for r in members], dtype=np.float64)
        cobs = np.array(
            [r["eval_cobias"] for r in members if r["eval_cobias"] is not None],
            dtype=np.float64,
        )
        dc = sum(r["num_dont_change"] for r in members)
        mem = sum(r["num_membership"] for r in members)
        wgt = sum(r["num_weight"] for r in members)
        out.append(
            {
                "dataset": dataset,
                "mode": mode,
                "num_seeds": len(members),
                "accuracy_mean": float(accs.mean()),
                "accuracy_std": (
                    float(accs.std(ddof=1)) if len(accs) > 1 else 0.0
                ),
                "cobias_mean": float(cobs.mean()) if cobs.size else None,
                "cobias_std": (
                    float(cobs.std(ddof=1)) if cobs.size > 1 else 0.0
                ),
                "baseline_accuracy_mean": float(
                    np.mean([r["baseline_eval_accuracy"] for r in members])
                ),
                "baseline_cobias_mean": (
                    float(
                        np.mean(
                            [
                                r["baseline_eval_cobias"]
                                for r in members
                                if r["baseline_eval_cobias"] is not None
                            ]
                        )
                    )
                    if any(r["baseline_eval_cobias"] is not None for r in members)
                    else None
                ),
                "dont_change_total": dc,
                "membership_total": mem,
                "weight_total": wgt,
                "kind_tally": f"membership:weight:dont_change={mem}:{wgt}:{dc}",
                "weakest_membership_seeds": sum(
                    1 for r in members if r["weakest_kind"] == "membership"
                ),
            }
        )
    return out


def _write_rows_csv(path: Path, columns: tuple[str, ...], rows: list[dict]) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            record = []
            for col in columns:
                value = row[col]
                if value is None:
                    record.append("")
                elif isinstance(value, float):
                    record.append(repr(value))
                else:
                    record.append(value)
            writer.writerow(record)


def cmd_compare(args) -> int:
    if args.eval_input and len(args.eval_input) != len(args.input):
        raise ValidationError(
            f"got {len(args.input)} --input but {len(args.eval_input)} "
            "--eval-input; they pair one-to-one"
        )
    named = []
    for i, path in enumerate(args.input):
        train = load_dataset(path, args.format)
        if args.eval_input:
            eval_ds = load_dataset(args.eval_input[i], args.format)
            if eval_ds.num_classes != train.num_classes:
                raise ValidationError(
                    f"{args.eval_input[i]}: eval set has "
                    f"{eval_ds.num_classes} classes, train has "
                    f"{train.num_classes}"
                )
        else:
            eval_ds = train
        named.append((Path(path).stem, train, eval_ds))

    catalog = _catalog_from_args(args)
    weights = _weights_from_args(args)
    config_kw = {
        "initial_temperature": args.init_temp,
        "cooling_rate": args.alpha,
        "lambda1": args.lambda1,
        "lambda2": args.lambda2,
        "min_temperature": args.min_temp,
        "max_outer_loops": args.max_outer,
    }
    rows = run_compare_grid(
        named, tuple(args.mode), tuple(args.seed), catalog, weights, config_kw
    )
    summary = summarize_rows(rows)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_rows_csv(out / "runs.csv", RUNS_COLUMNS, rows)
    _write_rows_csv(out / "summary.csv", SUMMARY_COLUMNS, summary)

    print(
        f"compare: {len(named)} dataset(s) x {len(args.mode)} mode(s) x "
        f"{len(args.seed)} seed(s) = {len(rows)} runs"
    )
    for entry in summary:
        cb = entry["cobias_mean"]
        print(
            f"  {entry['dataset']:>12} {entry['mode']:>6}: "
            f"acc {_fmt(entry['accuracy_mean'])}"
            + (f", cobias {_fmt(cb)}" if cb is not None else "")
            + f"  [{entry['kind_tally']}]"
        )
    print(f"wrote runs.csv summary.csv -> {out}")
    return 0


# ------------------------------------------------------------------- report


def cmd_report(args) -> int:
    rows = []
    for path in args.solve_files:
        with Path(path).open(encoding="utf-8") as fh:
            try:
                payload = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: invalid JSON: {exc}") from None
        try:
            rows.append(
                (
                    payload["task"],
                    int(payload["num_classes"]),
                    int(payload["search_space"]),
                    float(payload["wall_time"]),
                    int(payload["outer_loops_run"]),
                )
            )
        except KeyError as exc:
            raise ValidationError(f"{path}: missing field {exc}") from None

    header = ["task", "num_classes", "search_space", "wall_time", "outer_loops"]
    if args.out is not None:
        out = Path(args.out)
        if out.parent != Path(""):
            out.parent.mkdir(parents=True, exist_ok=True)
        with out.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for task, n, space, wall, loops in rows:
                writer.writerow([task, n, space, repr(wall), loops])
        print(f"report: {len(rows)} run(s) -> {out}")
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        for task, n, space, wall, loops in rows:
            writer.writerow([task, n, space, repr(wall), loops])
    return 0


# ------------------------------------------------------------------- oracle


def cmd_oracle(args) -> int:
    ds = load_dataset(args.input, args.format)
    catalog = _catalog_from_args(args)
    weights = _weights_from_args(args)
    allowed = mode_indices(catalog, args.mode)
    result = exhaustive_search(
        ds, catalog, weights, limit=args.limit, allowed_indices=allowed
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(
        out / "oracle.json",
        {
            "task": Path(args.input).stem,
            "num_classes": ds.num_classes,
            "mode": args.mode,
            **result.to_dict(),
        },
    )
    print(
        f"oracle: evaluated {result.num_evaluated} selection vectors, "
        f"best_z {result.best_z:.6f}, {result.ties} tie(s) at the optimum"
    )
    print(f"wrote oracle.json -> {out}")
    return 0


# ----------------------------------------------------------------- generate


def cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fmt = args.dataset_format
    suffix = "json" if fmt == "json" else "csv"

    if args.profile is not None:
        profile = load_profile(args.profile)
        name = args.name or Path(args.profile).stem
        tasks = [(name, profile, args.train_size, args.eval_size)]
    else:
        tasks = [
            (t.name, t.profile, t.train_size, t.eval_size)
            for t in benchmark_suite()
        ]

    manifest = []
    for name, profile, train_size, eval_size in tasks:
        train = generate(profile, train_size, replica=0)
        eval_ds = generate(profile, eval_size, replica=1)
        train_path = out / f"{name}_train.{suffix}"
        eval_path = out / f"{name}_eval.{suffix}"
        profile_path = out / f"{name}_profile.json"
        save_dataset(train, train_path, fmt)
        save_dataset(eval_ds, eval_path, fmt)
        save_profile(profile, profile_path)
        manifest.append(
            {
                "name": name,
                "num_classes": profile.num_classes,
                "train_size": train_size,
                "eval_size": eval_size,
                "train": train_path.name,
                "eval": eval_path.name,
                "profile": profile_path.name,
            }
        )
        print(
            f"generate: {name} N={profile.num_classes} "
            f"train={train_size} eval={eval_size}"
        )
    _write_json(out / "suite.json", {"tasks": manifest})
    print(f"wrote {len(manifest)} task(s) + suite.json -> {out}")
    return 0


# ------------------------------------------------------------------- parser


def _seed_list(text: str) -> tuple[int, ...]:
    try:
        seeds = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        ) from None
    if not seeds:
        raise argparse.ArgumentTypeError("need at least one seed")
    return seeds


def _mode_list(text: str) -> tuple[str, ...]:
    modes = tuple(part.strip() for part in text.split(",") if part.strip())
    for mode in modes:
        if mode not in MODES:
            raise argparse.ArgumentTypeError(
                f"unknown mode {mode!r}, expected one of {MODES}"
            )
    if not modes:
        raise argparse.ArgumentTypeError("need at least one mode")
    return modes


def _add_objective_flags(sub) -> None:
    sub.add_argument(
        "--objective",
        choices=OBJECTIVES,
        default="full",
        help="objective variant: full, err only, or err+pmi (default full)",
    )
    sub.add_argument(
        "--beta", type=float, default=1.0, help="imbalance weight (default 1)"
    )
    sub.add_argument(
        "--tau", type=float, default=1.0, help="PMI weight (default 1)"
    )


def _add_schedule_flags(sub) -> None:
    sub.add_argument("--init-temp", type=float, default=200_000.0)
    sub.add_argument("--alpha", type=float, default=0.95)
    sub.add_argument("--lambda1", type=float, default=10.0)
    sub.add_argument("--lambda2", type=float, default=100.0)
    sub.add_argument("--min-temp", type=float, default=1e-2)
    sub.add_argument("--max-outer", type=int, default=150)


def _add_catalog_flag(sub) -> None:
    sub.add_argument(
        "--catalog",
        default=None,
        help="JSON catalog file (default: built-in 49-function set)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcs",
        description="Select per-class probability corrections by annealing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="anneal a correction scheme")
    p.add_argument("--input", required=True, help="labeled dataset (csv or json)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--mode", choices=MODES, default="dcs")
    _add_objective_flags(p)
    _add_schedule_flags(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument(
        "--dev-fraction",
        type=float,
        default=0.05,
        help="held-out fraction for dev metrics (default 0.05)",
    )
    _add_catalog_flag(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("apply", help="apply a saved scheme to a dataset")
    p.add_argument("--scheme", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("compare", help="grid of dataset x mode x seed runs")
    p.add_argument(
        "--input", action="append", required=True, help="repeatable train set"
    )
    p.add_argument(
        "--eval-input",
        action="append",
        default=None,
        help="held-out set paired with each --input (repeatable)",
    )
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument(
        "--mode",
        type=_mode_list,
        default=MODES,
        help="comma-separated modes (default dcs,dnip,furud)",
    )
    _add_objective_flags(p)
    _add_schedule_flags(p)
    p.add_argument(
        "--seed",
        type=_seed_list,
        required=True,
        help="comma-separated seeds, one run per seed",
    )
    _add_catalog_flag(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("report", help="summarize solve.json files as CSV")
    p.add_argument("solve_files", nargs="+")
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("oracle", help="exhaustive search on a small problem")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--mode", choices=MODES, default="dcs")
    _add_objective_flags(p)
    _add_catalog_flag(p)
    p.add_argument(
        "--limit",
        type=int,
        default=1_000_000,
        help="refuse search spaces larger than this (default 1e6)",
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("generate", help="write the synthetic benchmark suite")
    p.add_argument("--out", required=True)
    p.add_argument(
        "--profile", default=None, help="generate one profile instead of the suite"
    )
    p.add_argument("--name", default=None, help="task name for --profile")
    p.add_argument("--train-size", type=int, default=2000)
    p.add_argument("--eval-size", type=int, default=2000)
    p.add_argument(
        "--dataset-format",
        choices=("csv", "json"),
        default="csv",
        help="dataset file format (default csv)",
    )
    p.set_defaults(func=cmd_generate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
