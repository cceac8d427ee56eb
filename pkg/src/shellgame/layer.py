"""
Generate-and-test supervisory layer for the assistant.

One layer tick runs four stages over a frozen snapshot of the world:

1. generate the five behavioural alternatives in canonical order,
2. predict where the human and the assistant end up under each alternative,
3. score each predicted outcome with the desirability sigmoid, once for the
   human and once for the assistant,
4. fold the two scores with the active policy and enforce the best
   alternative if the scores are spread widely enough.

Stages 1-3 never look at the policy, so switching between the ethical,
egoistic and aggressive assistant changes nothing but the fold in stage 4.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .geometry import Vec2, angle_between, extrapolate, first_conflict, distance
from .world import ArenaSpec, Button, Policy

# human velocities slower than this carry no heading information
MIN_HEADING_SPEED = 0.01


class Action(enum.Enum):
    NOTHING = "nothing"
    GOTO = "goto"
    POINT = "point"


class Alternative(enum.Enum):
    """The five behavioural alternatives; definition order is the canonical order."""

    DO_NOTHING = "DoNothing"
    GOTO_L = "GoTo(L)"
    GOTO_R = "GoTo(R)"
    POINT_L = "Point(L)"
    POINT_R = "Point(R)"

    @property
    def action(self) -> Action:
        return _ACTIONS[self][0]

    @property
    def button(self) -> Optional[Button]:
        return _ACTIONS[self][1]

    @property
    def index(self) -> int:
        return _ORDER.index(self)

    @classmethod
    def goto(cls, b: Button) -> Alternative:
        return cls.GOTO_L if b is Button.L else cls.GOTO_R

    @classmethod
    def point(cls, b: Button) -> Alternative:
        return cls.POINT_L if b is Button.L else cls.POINT_R

    def __str__(self) -> str:
        return self.value


_ACTIONS = {
    Alternative.DO_NOTHING: (Action.NOTHING, None),
    Alternative.GOTO_L: (Action.GOTO, Button.L),
    Alternative.GOTO_R: (Action.GOTO, Button.R),
    Alternative.POINT_L: (Action.POINT, Button.L),
    Alternative.POINT_R: (Action.POINT, Button.R),
}
_ORDER = tuple(Alternative)


def generate_alternatives() -> list[Alternative]:
    return list(_ORDER)


@dataclass(frozen=True)
class SigmoidParams:
    beta: float = 10.0
    t: float = 0.25

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")


@dataclass(frozen=True)
class EnforcementRule:
    spread_threshold: float = 0.2

    def __post_init__(self):
        if self.spread_threshold < 0:
            raise ValueError(f"spread threshold must be >= 0, got {self.spread_threshold}")


@dataclass(frozen=True)
class LayerParams:
    """Everything the layer needs besides the snapshot and the policy."""

    dt: float = 1 / 30
    horizon: int = 600
    avoidance_threshold: float = 0.5
    assistant_speed: float = 0.15
    sigmoid: SigmoidParams = SigmoidParams()
    enforcement: EnforcementRule = EnforcementRule()


@dataclass(frozen=True)
class Snapshot:
    """What the assistant perceives at a layer tick."""

    human_pos: Vec2
    human_vel: Optional[Vec2]
    assistant_pos: Vec2
    correct_button: Button

    @property
    def incorrect_button(self) -> Button:
        return self.correct_button.other


class PredictedOutcome(NamedTuple):
    human_final: Vec2
    assistant_final: Vec2


class Evaluation(NamedTuple):
    alternative: Alternative
    outcome: PredictedOutcome
    q_h: float
    q_e: float
    q_n: float


class Assessment(NamedTuple):
    """Policy-free part of an evaluation."""

    alternative: Alternative
    outcome: PredictedOutcome
    q_h: float
    q_e: float


def infer_human_goal(human_pos: Vec2, human_vel: Optional[Vec2], arena: ArenaSpec) -> Optional[Button]:
    """Button whose bearing is closest to the human's heading; ties go to L."""
    if human_vel is None or human_vel.norm() < MIN_HEADING_SPEED:
        return None
    best, best_angle = None, math.inf
    for b in Button:
        to_button = arena.button(b) - human_pos
        if to_button.norm() == 0.0:
            return b
        a = angle_between(human_vel, to_button)
        if a < best_angle:
            best, best_angle = b, a
    return best


def predict_outcome(snap: Snapshot, alt: Alternative, inferred_goal: Optional[Button],
                    arena: ArenaSpec, params: LayerParams) -> PredictedOutcome:
    """Final positions of both agents if the assistant carried out ``alt``.

    A human whose goal cannot be inferred is predicted to stay put under every
    alternative, pointing included; she is not walking, so there is nothing
    to redirect.
    """
    if inferred_goal is None:
        human_goal = None
    elif alt.action is Action.POINT:
        human_goal = alt.button
    else:
        human_goal = inferred_goal
    asst_goal = alt.button if alt.action is Action.GOTO else None

    human_speed = snap.human_vel.norm() if snap.human_vel is not None else 0.0
    human_target = arena.button(human_goal) if human_goal is not None else None
    asst_target = arena.button(asst_goal) if asst_goal is not None else None
    ph = extrapolate(snap.human_pos, human_target, human_speed, params.dt, params.horizon)
    pa = extrapolate(snap.assistant_pos, asst_target, params.assistant_speed, params.dt, params.horizon)

    hit = first_conflict(ph, pa, params.avoidance_threshold)
    if hit is not None:
        return PredictedOutcome(hit.a, hit.b)
    return PredictedOutcome(
        human_target if human_target is not None else snap.human_pos,
        asst_target if asst_target is not None else snap.assistant_pos,
    )


def desirability(final_pos: Vec2, incorrect_button_pos: Vec2, params: SigmoidParams = SigmoidParams()) -> float:
    d = distance(final_pos, incorrect_button_pos)
    return 1.0 / (1.0 + math.exp(-params.beta * (d - params.t)))


def combine(q_e: float, q_h: float, policy: Policy) -> float:
    if policy is Policy.ETHICAL:
        return q_h
    if policy is Policy.EGOISTIC:
        return q_e
    if policy is Policy.AGGRESSIVE:
        return -q_h
    raise ValueError(f"unknown policy {policy!r}")


def select_enforcement(q_values: Sequence[float], rule: EnforcementRule = EnforcementRule()) -> Optional[Alternative]:
    """Canonical-order argmax, or None when max - min does not exceed the threshold."""
    if len(q_values) != len(_ORDER):
        raise ValueError(f"expected {len(_ORDER)} scores, got {len(q_values)}")
    if max(q_values) - min(q_values) <= rule.spread_threshold:
        return None
    best = max(range(len(q_values)), key=lambda i: (q_values[i], -i))
    return _ORDER[best]


def assess(snap: Snapshot, arena: ArenaSpec, params: LayerParams = LayerParams()) -> list[Assessment]:
    """Generate, predict and score every alternative; independent of the policy."""
    goal = infer_human_goal(snap.human_pos, snap.human_vel, arena)
    wrong = arena.button(snap.incorrect_button)
    out = []
    for alt in generate_alternatives():
        o = predict_outcome(snap, alt, goal, arena, params)
        out.append(Assessment(alt, o,
                              desirability(o.human_final, wrong, params.sigmoid),
                              desirability(o.assistant_final, wrong, params.sigmoid)))
    return out


def evaluate(snap: Snapshot, policy: Policy, arena: ArenaSpec,
             params: LayerParams = LayerParams()) -> list[Evaluation]:
    return [Evaluation(*a, combine(a.q_e, a.q_h, policy)) for a in assess(snap, arena, params)]


def decide(snap: Snapshot, policy: Policy, arena: ArenaSpec,
           params: LayerParams = LayerParams()) -> tuple[list[Evaluation], Optional[Alternative]]:
    evals = evaluate(snap, policy, arena, params)
    return evals, select_enforcement([e.q_n for e in evals], params.enforcement)


def layer_tick(snap: Snapshot, policy: Policy, arena: ArenaSpec,
               params: LayerParams = LayerParams()) -> Optional[Alternative]:
    return decide(snap, policy, arena, params)[1]
