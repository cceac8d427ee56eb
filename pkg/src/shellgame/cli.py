"""Command-line entry point: ``shellgame {run,grid,plot,eval}``."""

from __future__ import annotations

import argparse
import sys
from collections import defaultdict
from pathlib import Path
from typing import Optional, Sequence

from .config import Settings, load_config
from .geometry import Vec2
from .harness import (ExperimentGrid, GridTrial, HumanChoice, cell_id, read_trace_csv, run_grid,
                      write_summary_csv, write_trace_csv)
from .layer import Snapshot, decide
from .world import Button, ConfigError, Policy


def _policy(s: str) -> Policy:
    try:
        return Policy.parse(s)
    except ConfigError:
        raise argparse.ArgumentTypeError(
            f"invalid policy {s!r} (choose from ethical, egoistic, competitive, aggressive)") from None


def _vec(s: str) -> Vec2:
    try:
        x, y = (float(p) for p in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {s!r}") from None
    return Vec2(x, y)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shellgame", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")

    def trial_flags(sp, many: bool):
        action = "append" if many else "store"
        sp.add_argument("--policy", type=_policy, action=action)
        sp.add_argument("--human-choice", choices=[c.value for c in HumanChoice], action=action)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--correct", choices=["L", "R"], help="pin the correct button")
        sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--svg", action="store_true", help="also render one SVG per cell")

    run = sub.add_parser("run", parents=[common], help="run one cell")
    trial_flags(run, many=False)
    run.add_argument("--replications", type=int, default=1)

    grid = sub.add_parser("grid", parents=[common], help="run the full policy x choice grid")
    trial_flags(grid, many=True)
    grid.add_argument("--replications", type=int)
    grid.add_argument("--workers", type=int, default=1)

    plot = sub.add_parser("plot", parents=[common], help="render SVGs from stored traces")
    plot.add_argument("--out", required=True, help="directory holding traces/ from an earlier run")

    ev = sub.add_parser("eval", parents=[common], help="print the five scores for a frozen snapshot")
    ev.add_argument("--policy", type=_policy, default=Policy.ETHICAL)
    ev.add_argument("--human-pos", type=_vec, required=True, metavar="X,Y")
    ev.add_argument("--human-vel", type=_vec, default=None, metavar="VX,VY")
    ev.add_argument("--assistant-pos", type=_vec, default=None, metavar="X,Y")
    ev.add_argument("--correct", choices=["L", "R"], default="L")
    return p


def _grid_from(args, settings: Settings, many: bool) -> ExperimentGrid:
    run = settings.run

    def listed(flag, key, conv, default):
        if flag:
            return tuple(flag) if many else (flag,)
        if key in run:
            return tuple(conv(v.strip()) for v in run[key].split(","))
        return default

    policies = listed(args.policy, "policy", Policy.parse, tuple(Policy) if many else (Policy.ETHICAL,))
    choices = listed(args.human_choice, "human_choice", HumanChoice,
                     (HumanChoice.CORRECT, HumanChoice.INCORRECT) if many else (HumanChoice.CORRECT,))
    choices = tuple(HumanChoice(c) for c in choices)
    reps = args.replications if args.replications is not None else int(run.get("replications", 3))
    seed = args.seed if args.seed is not None else int(run.get("seed", 0))
    correct = args.correct or run.get("correct_button")
    return ExperimentGrid(policies, choices, reps, seed, Button(correct) if correct else None)


def write_outputs(trials: Sequence[GridTrial], settings: Settings, out: Path, svg: bool) -> None:
    for t in trials:
        write_trace_csv(t.summary.trial_id, t.result.trace, out / "traces" / f"{t.summary.trial_id}.csv")
    write_summary_csv([t.summary for t in trials], out / "summary.csv")
    if svg:
        cells = defaultdict(list)
        for t in trials:
            cells[cell_id(t.summary.policy, t.summary.human_choice)].append(
                (t.summary.trial_id, t.result.trace))
        _render_cells(cells, settings, out)


def _render_cells(cells, settings: Settings, out: Path) -> None:
    from .plotting import save_svg  # matplotlib import is slow; only pay for it when plotting

    (out / "figures").mkdir(parents=True, exist_ok=True)
    for cid, traces in cells.items():
        save_svg(traces, settings.arena, out / "figures" / f"{cid}.svg", title=cid)


def cmd_trials(args, settings: Settings, many: bool) -> int:
    grid = _grid_from(args, settings, many)
    trials = run_grid(grid, settings.arena, settings.sim, workers=getattr(args, "workers", 1))
    out = Path(args.out)
    write_outputs(trials, settings, out, args.svg)
    for t in trials:
        s = t.summary
        print(f"{s.trial_id}: human {s.human_button.value if s.human_button else '-'} ({s.human_score:+d}), "
              f"assistant {s.assistant_button.value if s.assistant_button else '-'} ({s.assistant_score:+d}), "
              f"{s.termination} after {s.duration_s:.2f} s")
    return 0


def cmd_plot(args, settings: Settings) -> int:
    files = sorted((Path(args.out) / "traces").glob("*.csv"))
    if not files:
        raise ConfigError(f"no trace CSVs under {Path(args.out) / 'traces'}")
    cells = defaultdict(list)
    for f in files:
        tid, trace = read_trace_csv(f)
        cells[tid.rsplit("_r", 1)[0]].append((tid, trace))
    _render_cells(cells, settings, Path(args.out))
    print(f"rendered {len(cells)} figure(s) to {Path(args.out) / 'figures'}")
    return 0


def cmd_eval(args, settings: Settings) -> int:
    arena = settings.arena
    snap = Snapshot(args.human_pos, args.human_vel, args.assistant_pos or arena.assistant_start,
                    Button(args.correct))
    evals, enforced = decide(snap, args.policy, arena, settings.sim.layer_params())
    print("alternative  q_h       q_e       q_n")
    for e in evals:
        print(f"{str(e.alternative):<11}  {e.q_h:.6f}  {e.q_e:.6f}  {e.q_n:+.6f}")
    print(f"enforced: {enforced if enforced is not None else 'none'}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = load_config(args.config)
        if args.command == "run":
            return cmd_trials(args, settings, many=False)
        if args.command == "grid":
            return cmd_trials(args, settings, many=True)
        if args.command == "plot":
            return cmd_plot(args, settings)
        return cmd_eval(args, settings)
    except (ConfigError, ValueError, OSError, RuntimeError) as exc:
        print(f"shellgame: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
