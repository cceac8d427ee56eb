"""Per-tick motion for the human proxy and the assistant."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .geometry import ORIGIN, Vec2, advance_toward, distance
from .layer import MIN_HEADING_SPEED, Action, Alternative
from .world import AgentState, ArenaSpec, WorldState

# below this the agent is treated as standing still
MIN_SPEED = MIN_HEADING_SPEED


class InsufficientHistoryError(ValueError):
    pass


@dataclass(frozen=True)
class AvoidanceRule:
    threshold: float = 0.5

    def __post_init__(self):
        if self.threshold <= 0:
            raise ValueError(f"avoidance threshold must be > 0, got {self.threshold}")


def estimate_velocity(history: Sequence[Vec2], dt: float) -> Vec2:
    """Finite difference over the whole window: (latest - oldest) / ((n - 1) dt)."""
    if len(history) < 2:
        raise InsufficientHistoryError(f"need at least 2 samples, got {len(history)}")
    v = (history[-1] - history[0]) * (1.0 / ((len(history) - 1) * dt))
    if v.norm() < MIN_SPEED:
        return ORIGIN
    return v


def avoidance_gate(self_pos: Vec2, other_pos: Vec2, proposed_next: Vec2, rule: AvoidanceRule) -> Vec2:
    if distance(proposed_next, other_pos) >= rule.threshold:
        return proposed_next
    return self_pos


def _move(agent: AgentState, goal_pos: Optional[Vec2], other_pos: Vec2, dt: float,
          rule: AvoidanceRule) -> AgentState:
    if goal_pos is None:
        return replace(agent, halted=False)
    proposed = advance_toward(agent.position, goal_pos, agent.speed * dt)
    nxt = avoidance_gate(agent.position, other_pos, proposed, rule)
    return replace(agent, position=nxt, halted=proposed != agent.position and nxt == agent.position)


def human_step(world: WorldState, arena: ArenaSpec, dt: float, rule: AvoidanceRule) -> AgentState:
    """Adopt any pointed-out button as the new goal, then take one gated step toward the goal."""
    human = world.human
    pointed = world.assistant.pointing_at
    if pointed is not None and pointed is not human.goal:
        human = replace(human, goal=pointed)
    goal_pos = arena.button(human.goal) if human.goal is not None else None
    return _move(human, goal_pos, world.assistant.position, dt, rule)


def assistant_apply(world: WorldState, arena: ArenaSpec, enforcement: Optional[Alternative], dt: float,
                    rule: AvoidanceRule) -> AgentState:
    """Switch to the enforced alternative (or keep the current one), then take one gated step."""
    asst = world.assistant
    if enforcement is not None:
        if enforcement.action is Action.NOTHING:
            asst = replace(asst, goal=None, pointing_at=None)
        elif enforcement.action is Action.GOTO:
            asst = replace(asst, goal=enforcement.button, pointing_at=None)
        else:
            asst = replace(asst, goal=None, pointing_at=enforcement.button)
    goal_pos = arena.button(asst.goal) if asst.goal is not None else None
    return _move(asst, goal_pos, world.human.position, dt, rule)
