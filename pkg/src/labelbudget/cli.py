"""Command-line pipeline: relatedness -> fit-beta -> allocate -> simulate.

Exit codes: 0 ok, 2 unreadable or malformed input, 3 incomplete probe log,
4 too few curve points, 5 exact solver forced on an oversized instance,
6 budget-split sweep requested for a world without exactly two tasks.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from importlib import resources
from pathlib import Path
from typing import Any

from . import allocator
from .betafit import fit_reduction_rate
from .core import (
    IncompleteLogError,
    InformationProfile,
    InsufficientDataError,
    LabelBudgetError,
    LearningCurve,
    ProbeRecord,
    ProblemTooLargeError,
    TaskSet,
)
from .infomodel import aggregate_informativeness, marginal
from .relatedness import estimate_transfer
from .simulator import SimWorld, compare_strategies

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INCOMPLETE = 3
EXIT_INSUFFICIENT = 4
EXIT_TOO_LARGE = 5
EXIT_SWEEP_K = 6

FIXTURES = ("pascal_voc", "taskonomy")


class InputError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _round_floats(obj: Any) -> Any:
    if isinstance(obj, float):
        return float(_fmt(obj)) if math.isfinite(obj) else obj
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def write_json(obj: Any, path: str | Path) -> None:
    """Write ``obj`` with insertion-ordered keys and floats at 9 significant digits."""
    text = json.dumps(_round_floats(obj), indent=2) + "\n"
    Path(path).write_text(text)


def _load(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _section(data: Any, key: str) -> Any:
    """Accept either a bare object or a fixture bundle holding it under ``key``."""
    if isinstance(data, dict) and key in data:
        return data[key]
    return data


def _parse(path: str | Path, key: str, build):
    data = _section(_load(path), key)
    try:
        return build(data)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"malformed {key} in {path}: {exc!r}") from exc


def load_task_set(path) -> TaskSet:
    ts = _parse(path, "task_set", TaskSet.from_dict)
    try:
        return ts.require_valid()
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def load_profile(path) -> InformationProfile:
    return _parse(path, "profile", InformationProfile.from_dict)


def load_world(path) -> SimWorld:
    return _parse(path, "world", SimWorld.from_dict)


def load_probe_log(path) -> list[ProbeRecord]:
    return _parse(path, "probe_log", lambda d: [ProbeRecord.from_dict(r) for r in d])


def load_curves(path) -> list[LearningCurve]:
    data = _section(_load(path), "curves")
    try:
        if isinstance(data, list):
            return [LearningCurve.from_dict(c) for c in data]
        return [LearningCurve.from_dict(data)]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed learning curve in {path}: {exc!r}") from exc


def _err(msg: str) -> None:
    print(f"labelbudget: {msg}", file=sys.stderr)


# -- stages -----------------------------------------------------------------


def cmd_relatedness(probe_log_path, k: int, out_path) -> int:
    try:
        log = load_probe_log(probe_log_path)
        m = estimate_transfer(log, k)
    except InputError as exc:
        _err(str(exc))
        return EXIT_PARSE
    except IncompleteLogError as exc:
        _err(f"incomplete probe log: pair {exc.pair[0]}->{exc.pair[1]} has no usable records")
        return EXIT_INCOMPLETE
    except LabelBudgetError as exc:
        _err(str(exc))
        return EXIT_PARSE
    info = aggregate_informativeness(m)
    write_json({"values": [list(r) for r in m.values], "informativeness": list(info)}, out_path)
    for i, v in enumerate(info):
        print(f"task {i}: informativeness {_fmt(v)}")
    return EXIT_OK


def _fit_curves(curves: list[LearningCurve]) -> list[dict]:
    out = []
    for c in curves:
        fit = fit_reduction_rate(c)
        out.append({"task": c.task, **fit.to_dict()})
    return out


def cmd_fit_beta(curve_path, out_path) -> int:
    try:
        curves = load_curves(curve_path)
        fits = _fit_curves(curves)
    except InputError as exc:
        _err(str(exc))
        return EXIT_PARSE
    except InsufficientDataError as exc:
        _err(str(exc))
        return EXIT_INSUFFICIENT
    except LabelBudgetError as exc:
        _err(str(exc))
        return EXIT_PARSE
    write_json(fits[0] if len(fits) == 1 else fits, out_path)
    for f in fits:
        print(f"{f['task']}: beta {_fmt(f['beta'])}  ds {_fmt(f['ds'])}  residual {_fmt(f['residual'])}")
    return EXIT_OK


def _print_allocation(ts: TaskSet, prof: InformationProfile, alloc) -> None:
    print(f"solver: {alloc.solver}")
    print(f"{'task':<20} {'count':>10} {'spent':>10} {'marginal':>14}")
    for i, t in enumerate(ts.tasks):
        m = marginal(prof.informativeness[i], prof.beta[i], alloc.counts[i])
        print(f"{t.id:<20} {alloc.counts[i]:>10d} {alloc.counts[i] * t.cost:>10d} {_fmt(m):>14}")
    print(f"{'total':<20} {'':>10} {alloc.spent:>10d}   of budget {ts.budget}")
    print(f"objective: {_fmt(alloc.objective)}")
    excluded = [t.id for t, v in zip(ts.tasks, prof.informativeness) if v <= 0.0]
    if excluded:
        print("non-positive informativeness, never purchased: " + ", ".join(excluded))
    if alloc.solver == "greedy":
        bound = allocator.continuous_upper_bound(ts, prof)
        print(f"bound gap: {_fmt(bound - alloc.objective)} (upper bound {_fmt(bound)})")


def _allocate(ts, prof, solver, cell_limit, out_path):
    alloc = allocator.solve(ts, prof, solver, cell_limit)
    write_json(alloc.to_dict(), out_path)
    _print_allocation(ts, prof, alloc)
    return alloc


def cmd_allocate(tasks_path, profile_path, solver: str, out_path, cell_limit: int = allocator.DEFAULT_DP_CELL_LIMIT) -> int:
    try:
        ts = load_task_set(tasks_path)
        prof = load_profile(profile_path)
        if prof.k != ts.k:
            raise InputError(f"profile has {prof.k} tasks, task set has {ts.k}")
        _allocate(ts, prof, solver, cell_limit, out_path)
    except InputError as exc:
        _err(str(exc))
        return EXIT_PARSE
    except ProblemTooLargeError as exc:
        _err(str(exc))
        return EXIT_TOO_LARGE
    except LabelBudgetError as exc:
        _err(str(exc))
        return EXIT_PARSE
    return EXIT_OK


def _sweep_csv_path(out_path, sweep_out) -> Path:
    if sweep_out:
        return Path(sweep_out)
    out = Path(out_path)
    return out.with_name(out.stem + "_sweep.csv")


def _simulate(world, prof, out_path, sweep, sweep_steps, sweep_out, solver, cell_limit) -> None:
    report = compare_strategies(world, prof, solver, cell_limit, sweep_steps if sweep else None)
    write_json(report.to_dict(), out_path)
    if report.sweep is not None:
        with open(_sweep_csv_path(out_path, sweep_out), "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["split_fraction", "delta_t"])
            for frac, val in report.sweep:
                w.writerow([_fmt(frac), _fmt(val)])
    ids = world.task_set.ids
    print(f"{'strategy':<28} {'delta_t':>10}  " + "  ".join(f"{i:>12}" for i in ids))
    for r in report.rows:
        print(f"{r.strategy:<28} {_fmt(r.delta_t):>10}  " + "  ".join(f"{_fmt(g):>12}" for g in r.gains))
    for note in report.notes:
        print(f"note: {note}")


def cmd_simulate(
    world_path,
    profile_path,
    out_path,
    sweep: bool = False,
    sweep_steps: int = 21,
    sweep_out=None,
    seed: int | None = None,
    solver: str = "auto",
    cell_limit: int = allocator.DEFAULT_DP_CELL_LIMIT,
) -> int:
    try:
        world = load_world(world_path)
        prof = load_profile(profile_path)
        if prof.k != world.task_set.k:
            raise InputError(f"profile has {prof.k} tasks, world has {world.task_set.k}")
    except (InputError, LabelBudgetError) as exc:
        _err(str(exc))
        return EXIT_PARSE
    if sweep and world.task_set.k != 2:
        _err(f"--sweep needs a two-task world, got {world.task_set.k} tasks")
        return EXIT_SWEEP_K
    if seed is not None:
        world = SimWorld.from_dict({**world.to_dict(), "seed": seed})
    try:
        _simulate(world, prof, out_path, sweep, sweep_steps, sweep_out, solver, cell_limit)
    except ProblemTooLargeError as exc:
        _err(str(exc))
        return EXIT_TOO_LARGE
    except LabelBudgetError as exc:
        _err(str(exc))
        return EXIT_PARSE
    return EXIT_OK


def cmd_run(args) -> int:
    """Chain every stage, writing one file per stage into ``--out-dir``."""
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        ts = load_task_set(args.tasks)
    except InputError as exc:
        _err(str(exc))
        return EXIT_PARSE

    code = cmd_relatedness(args.probe_log, ts.k, out_dir / "transfer.json")
    if code:
        return code
    info = _load(out_dir / "transfer.json")["informativeness"]

    try:
        curves = [c for path in args.curves for c in load_curves(path)]
        by_task = {c.task: c for c in curves}
        missing = [t for t in ts.ids if t not in by_task]
        if missing:
            raise InputError("no learning curve for task(s): " + ", ".join(missing))
        fits = _fit_curves([by_task[t] for t in ts.ids])
    except InputError as exc:
        _err(str(exc))
        return EXIT_PARSE
    except InsufficientDataError as exc:
        _err(str(exc))
        return EXIT_INSUFFICIENT
    write_json(fits, out_dir / "betas.json")
    for f in fits:
        print(f"{f['task']}: beta {_fmt(f['beta'])}")

    prof = InformationProfile(info, [f["beta"] for f in fits])
    write_json(prof.to_dict(), out_dir / "profile.json")

    code = cmd_allocate(args.tasks, out_dir / "profile.json", args.solver, out_dir / "allocation.json", args.dp_cell_limit)
    if code or not args.world:
        return code
    return cmd_simulate(
        args.world,
        out_dir / "profile.json",
        out_dir / "report.json",
        sweep=args.sweep,
        sweep_steps=args.sweep_steps,
        seed=args.seed,
        solver=args.solver,
        cell_limit=args.dp_cell_limit,
    )


def cmd_fixture(name: str, out_path) -> int:
    text = resources.files("labelbudget").joinpath("fixtures", f"{name}.json").read_text()
    Path(out_path).write_text(text)
    print(f"wrote {name} fixture to {out_path}")
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file")
    common.add_argument("--seed", type=int, default=None, help="override the simulation seed")
    common.add_argument("--solver", choices=("auto", "dp", "greedy"), default="auto")
    common.add_argument("--dp-cell-limit", type=int, default=allocator.DEFAULT_DP_CELL_LIMIT)
    common.add_argument("--sweep", action="store_true", help="also write a two-task budget-split sweep")
    common.add_argument("--sweep-steps", type=int, default=21)

    p = argparse.ArgumentParser(prog="labelbudget", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("relatedness", parents=[common], help="transfer matrix from a probe log")
    s.add_argument("probe_log")
    s.add_argument("--tasks", "-k", type=int, required=True, help="number of tasks")

    s = sub.add_parser("fit-beta", parents=[common], help="fit the reduction rate of a learning curve")
    s.add_argument("curve")

    s = sub.add_parser("allocate", parents=[common], help="solve the budget allocation")
    s.add_argument("tasks")
    s.add_argument("profile")

    s = sub.add_parser("simulate", parents=[common], help="compare strategies in a synthetic world")
    s.add_argument("world")
    s.add_argument("profile")
    s.add_argument("--sweep-out", help="CSV path for the sweep (default: <out>_sweep.csv)")

    s = sub.add_parser("run", parents=[common], help="run every stage in order")
    s.add_argument("--tasks", required=True, help="task set JSON")
    s.add_argument("--probe-log", required=True)
    s.add_argument("--curves", nargs="+", required=True, help="learning-curve JSON files, one or more curves each")
    s.add_argument("--world", help="optional world JSON for the simulation stage")
    s.add_argument("--out-dir", required=True)

    s = sub.add_parser("fixture", help="write a bundled example input file")
    s.add_argument("name", choices=FIXTURES)
    s.add_argument("--out", required=True)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cmd = args.command
    if cmd in ("relatedness", "fit-beta", "allocate", "simulate") and not args.out:
        _err(f"{cmd}: --out is required")
        return EXIT_PARSE
    if cmd == "relatedness":
        return cmd_relatedness(args.probe_log, args.tasks, args.out)
    if cmd == "fit-beta":
        return cmd_fit_beta(args.curve, args.out)
    if cmd == "allocate":
        return cmd_allocate(args.tasks, args.profile, args.solver, args.out, args.dp_cell_limit)
    if cmd == "simulate":
        return cmd_simulate(
            args.world,
            args.profile,
            args.out,
            sweep=args.sweep,
            sweep_steps=args.sweep_steps,
            sweep_out=args.sweep_out,
            seed=args.seed,
            solver=args.solver,
            cell_limit=args.dp_cell_limit,
        )
    if cmd == "run":
        return cmd_run(args)
    return cmd_fixture(args.name, args.out)


if __name__ == "__main__":
    sys.exit(main())
