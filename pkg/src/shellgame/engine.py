"""Fixed-timestep trial execution and trace recording."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

from .controllers import AvoidanceRule, assistant_apply, estimate_velocity, human_step
from .geometry import Vec2
from .layer import (Alternative, EnforcementRule, Evaluation, LayerParams, SigmoidParams,
                    Snapshot, decide)
from .world import (AgentId, ArenaSpec, Button, RewardLedger, TrialSetup, WorldState,
                    detect_press, initial_world, score_press)


class SimulationFault(RuntimeError):
    pass


@dataclass(frozen=True)
class SimConfig:
    physics_dt: float = 1 / 30
    layer_period: int = 30
    agent_speed: float = 0.15
    timeout: float = 60.0
    avoidance_threshold: float = 0.5
    velocity_window: int = 5
    horizon: int = 600
    beta: float = 10.0
    t: float = 0.25
    spread_threshold: float = 0.2

    def __post_init__(self):
        if self.physics_dt <= 0:
            raise ValueError(f"physics_dt must be > 0, got {self.physics_dt}")
        if self.layer_period < 1:
            raise ValueError(f"layer_period must be >= 1, got {self.layer_period}")
        if self.timeout <= 0:
            raise ValueError(f"timeout must be > 0, got {self.timeout}")
        if self.velocity_window < 2:
            raise ValueError(f"velocity_window must be >= 2, got {self.velocity_window}")

    @property
    def max_ticks(self) -> int:
        return math.ceil(self.timeout / self.physics_dt - 1e-9)

    @property
    def avoidance(self) -> AvoidanceRule:
        return AvoidanceRule(self.avoidance_threshold)

    def layer_params(self) -> LayerParams:
        return LayerParams(
            dt=self.physics_dt,
            horizon=self.horizon,
            avoidance_threshold=self.avoidance_threshold,
            assistant_speed=self.agent_speed,
            sigmoid=SigmoidParams(self.beta, self.t),
            enforcement=EnforcementRule(self.spread_threshold),
        )


class Termination(str, enum.Enum):
    RUNNING = "running"
    HUMAN_PRESSED = "human_pressed"
    TIMEOUT = "timeout"


class TraceRecord(NamedTuple):
    """World state after tick ``tick`` has been applied."""

    tick: int
    time: float
    human_pos: Vec2
    human_goal: Optional[Button]
    asst_pos: Vec2
    asst_goal: Optional[Button]
    asst_pointing: Optional[Button]
    enforced: Optional[Alternative]
    q: tuple[float, ...]


@dataclass
class TrialResult:
    setup: TrialSetup
    presses: list[tuple[AgentId, Button, int]]
    ledger: RewardLedger
    termination: Termination
    trace: list[TraceRecord]
    # (tick, enforced) for every layer tick that enforced something
    enforcements: list[tuple[int, Alternative]]

    @property
    def duration(self) -> float:
        return self.trace[-1].time if self.trace else 0.0

    def final_button(self, agent: AgentId) -> Optional[Button]:
        for a, b, _ in self.presses:
            if a is agent:
                return b
        return None


def snapshot(world: WorldState, setup: TrialSetup, config: SimConfig) -> Snapshot:
    hist = world.human_history
    vel = estimate_velocity(hist, config.physics_dt) if len(hist) >= 2 else None
    return Snapshot(world.human.position, vel, world.assistant.position, setup.correct_button)


class StepOutput(NamedTuple):
    world: WorldState
    evaluations: Optional[list[Evaluation]]
    enforced: Optional[Alternative]


def step_world(world: WorldState, tick: int, config: SimConfig, setup: TrialSetup,
               arena: ArenaSpec) -> StepOutput:
    """Layer (on layer ticks), assistant motion, human motion, then press detection."""
    evals = enforced = None
    if tick % config.layer_period == 0:
        evals, enforced = decide(snapshot(world, setup, config), setup.policy, arena,
                                 config.layer_params())

    rule = config.avoidance
    world = replace(world, assistant=assistant_apply(world, arena, enforced, config.physics_dt, rule))
    human = human_step(world, arena, config.physics_dt, rule)
    hist = (world.human_history + (human.position,))[-config.velocity_window:]
    if len(hist) >= 2:
        human = replace(human, velocity_estimate=estimate_velocity(hist, config.physics_dt))
    world = replace(world, human=human, human_history=hist)

    while (press := detect_press(world, arena)) is not None:
        world = replace(
            world,
            ledger=score_press(setup, press, world.ledger),
            presses=world.presses + ((press[0], press[1], tick),),
        )
    return StepOutput(world, evals, enforced)


def termination_check(world: WorldState, tick: int, config: SimConfig) -> Termination:
    """Status after ``tick`` ticks have elapsed."""
    if world.has_pressed(AgentId.HUMAN):
        return Termination.HUMAN_PRESSED
    if tick * config.physics_dt >= config.timeout - 1e-12:
        return Termination.TIMEOUT
    return Termination.RUNNING


def _check_finite(world: WorldState, tick: int) -> None:
    for agent in (world.human, world.assistant):
        for v in (*agent.position, *agent.velocity_estimate):
            if not math.isfinite(v):
                raise SimulationFault(f"non-finite {agent.id.value} state at tick {tick}")


def run_trial(arena: ArenaSpec, setup: TrialSetup, config: SimConfig = SimConfig()) -> TrialResult:
    world = initial_world(arena, setup, config.agent_speed)
    trace: list[TraceRecord] = []
    enforcements: list[tuple[int, Alternative]] = []
    q: tuple[float, ...] = ()
    status = Termination.RUNNING
    tick = 0
    while status is Termination.RUNNING:
        try:
            world, evals, enforced = step_world(world, tick, config, setup, arena)
        except ValueError as exc:  # Vec2 rejects non-finite components
            raise SimulationFault(f"tick {tick}: {exc}") from exc
        _check_finite(world, tick)
        if evals is not None:
            q = tuple(e.q_n for e in evals)
        if enforced is not None:
            enforcements.append((tick, enforced))
        trace.append(TraceRecord(
            tick, tick * config.physics_dt,
            world.human.position, world.human.goal,
            world.assistant.position, world.assistant.goal, world.assistant.pointing_at,
            enforced, q,
        ))
        tick += 1
        status = termination_check(world, tick, config)
    return TrialResult(setup, list(world.presses), world.ledger, status, trace, enforcements)
