"""Batch experiment grid and CSV persistence of traces and summaries."""

from __future__ import annotations

import csv
import enum
import io
import random
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .engine import SimConfig, SimulationFault, TraceRecord, TrialResult, run_trial
from .geometry import Vec2, distance
from .layer import Alternative
from .world import AgentId, ArenaSpec, Button, ConfigError, Policy, RewardLedger, TrialSetup

TRACE_COLUMNS = [
    "trial_id", "tick", "time_s",
    "human_x", "human_y", "human_goal",
    "asst_x", "asst_y", "asst_goal", "asst_pointing",
    "enforced", "q1", "q2", "q3", "q4", "q5",
]


class HumanChoice(str, enum.Enum):
    CORRECT = "correct"
    INCORRECT = "incorrect"
    RANDOM = "random"


class GridError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentGrid:
    policies: tuple[Policy, ...] = tuple(Policy)
    human_choices: tuple[HumanChoice, ...] = (HumanChoice.CORRECT, HumanChoice.INCORRECT)
    replications: int = 3
    base_seed: int = 0
    # pin the correct button instead of drawing it from the trial seed
    correct_button: Optional[Button] = None

    def __post_init__(self):
        if not self.policies or not self.human_choices:
            raise ConfigError("grid needs at least one policy and one human choice")
        if self.replications < 1:
            raise ConfigError(f"replications must be >= 1, got {self.replications}")

    def cells(self) -> list[tuple[Policy, HumanChoice]]:
        return [(p, c) for p in self.policies for c in self.human_choices]


def cell_id(policy: Policy, choice: HumanChoice) -> str:
    return f"{policy.value}_{choice.value}"


def trial_id(policy: Policy, choice: HumanChoice, replication: int) -> str:
    return f"{cell_id(policy, choice)}_r{replication:02d}"


def trial_seed(base_seed: int, policy: Policy, choice: HumanChoice, replication: int) -> int:
    # crc32 rather than hash(): str hashing is salted per process
    return base_seed + zlib.crc32(f"{policy.value}|{choice.value}|{replication}".encode())


def make_setup(policy: Policy, choice: HumanChoice, seed: int,
               correct_button: Optional[Button] = None) -> TrialSetup:
    rng = random.Random(seed)
    correct = rng.choice(list(Button))
    if correct_button is not None:
        correct = correct_button
    if choice is HumanChoice.CORRECT:
        human = correct
    elif choice is HumanChoice.INCORRECT:
        human = correct.other
    else:
        human = rng.choice(list(Button))
    return TrialSetup(correct, human, policy, seed)


@dataclass(frozen=True)
class SummaryRow:
    trial_id: str
    policy: Policy
    human_choice: HumanChoice
    replication: int
    seed: int
    correct_button: Button
    human_button: Optional[Button]
    assistant_button: Optional[Button]
    human_score: int
    assistant_score: int
    termination: str
    duration_s: float

    def __post_init__(self):
        for s in (self.human_score, self.assistant_score):
            if s not in (-1, 0, 1):
                raise ValueError(f"per-trial score out of range: {s}")


SUMMARY_COLUMNS = [f.name for f in fields(SummaryRow)]


def summarize(result: TrialResult, choice: HumanChoice, replication: int) -> SummaryRow:
    s = result.setup
    return SummaryRow(
        trial_id(s.policy, choice, replication), s.policy, choice, replication, s.seed,
        s.correct_button,
        result.final_button(AgentId.HUMAN), result.final_button(AgentId.ASSISTANT),
        result.ledger.human, result.ledger.assistant,
        result.termination.value, result.duration,
    )


@dataclass
class GridTrial:
    result: TrialResult
    summary: SummaryRow


def run_grid(grid: ExperimentGrid, arena: ArenaSpec = ArenaSpec(), config: SimConfig = SimConfig(),
             workers: int = 1) -> list[GridTrial]:
    """Run every (policy, choice, replication) trial; output order never depends on ``workers``."""
    jobs = [(p, c, r) for p, c in grid.cells() for r in range(grid.replications)]

    def one(job):
        p, c, r = job
        setup = make_setup(p, c, trial_seed(grid.base_seed, p, c, r), grid.correct_button)
        try:
            res = run_trial(arena, setup, config)
        except SimulationFault as exc:
            raise GridError(f"trial {trial_id(p, c, r)} failed: {exc}") from exc
        return GridTrial(res, summarize(res, c, r))

    if workers <= 1:
        return [one(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, jobs))


# -- CSV ---------------------------------------------------------------------

def _num(v: float) -> str:
    return f"{v:.6f}"


def _opt(v) -> str:
    if v is None:
        return ""
    return v.value if isinstance(v, enum.Enum) else str(v)


def trace_rows(tid: str, trace: Sequence[TraceRecord]) -> list[list[str]]:
    rows = []
    for r in trace:
        q = [_num(x) for x in r.q] + [""] * (5 - len(r.q))
        rows.append([
            tid, str(r.tick), _num(r.time),
            _num(r.human_pos.x), _num(r.human_pos.y), _opt(r.human_goal),
            _num(r.asst_pos.x), _num(r.asst_pos.y), _opt(r.asst_goal), _opt(r.asst_pointing),
            _opt(r.enforced), *q,
        ])
    return rows


def _write_rows(destination: str | Path, header: list[str], rows: Iterable[list[str]]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    path = Path(destination)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(buf.getvalue())
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def write_trace_csv(tid: str, trace: Sequence[TraceRecord], destination: str | Path) -> None:
    _write_rows(destination, TRACE_COLUMNS, trace_rows(tid, trace))


def _button(s: str) -> Optional[Button]:
    return Button(s) if s else None


def read_trace_csv(source: str | Path) -> tuple[str, list[TraceRecord]]:
    """Inverse of :func:`write_trace_csv`; returns the trial id and the records."""
    with open(source, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != TRACE_COLUMNS:
            raise ValueError(f"{source}: unexpected trace header {reader.fieldnames}")
        tid, out = "", []
        for row in reader:
            tid = row["trial_id"]
            q = tuple(float(row[f"q{i}"]) for i in range(1, 6) if row[f"q{i}"])
            out.append(TraceRecord(
                int(row["tick"]), float(row["time_s"]),
                Vec2(float(row["human_x"]), float(row["human_y"])), _button(row["human_goal"]),
                Vec2(float(row["asst_x"]), float(row["asst_y"])),
                _button(row["asst_goal"]), _button(row["asst_pointing"]),
                Alternative(row["enforced"]) if row["enforced"] else None,
                q,
            ))
    return tid, out


def summary_rows(rows: Sequence[SummaryRow]) -> list[list[str]]:
    return [[
        r.trial_id, r.policy.value, r.human_choice.value, str(r.replication), str(r.seed),
        r.correct_button.value, _opt(r.human_button), _opt(r.assistant_button),
        str(r.human_score), str(r.assistant_score), r.termination, _num(r.duration_s),
    ] for r in rows]


def write_summary_csv(rows: Sequence[SummaryRow], destination: str | Path) -> None:
    _write_rows(destination, SUMMARY_COLUMNS, summary_rows(rows))


def read_summary_csv(source: str | Path) -> list[SummaryRow]:
    with open(source, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SUMMARY_COLUMNS:
            raise ValueError(f"{source}: unexpected summary header {reader.fieldnames}")
        return [SummaryRow(
            row["trial_id"], Policy(row["policy"]), HumanChoice(row["human_choice"]),
            int(row["replication"]), int(row["seed"]), Button(row["correct_button"]),
            _button(row["human_button"]), _button(row["assistant_button"]),
            int(row["human_score"]), int(row["assistant_score"]),
            row["termination"], float(row["duration_s"]),
        ) for row in reader]


def replay_scores(trace: Sequence[TraceRecord], arena: ArenaSpec, correct: Button) -> RewardLedger:
    """Recompute the ledger from recorded positions alone."""
    ledger = RewardLedger()
    done: set[str] = set()
    for r in trace:
        for agent, pos in (("human", r.human_pos), ("assistant", r.asst_pos)):
            if agent in done:
                continue
            for b in Button:
                if distance(pos, arena.button(b)) <= arena.press_radius:
                    done.add(agent)
                    ledger = ledger.credit(AgentId(agent), 1 if b is correct else -1)
                    break
    return ledger
