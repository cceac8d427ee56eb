"""Arena, trial parameters, agent state and reward accounting for the shell game."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Optional

from .geometry import ORIGIN, Vec2, distance


class ConfigError(ValueError):
    """Invalid arena or trial configuration."""


class Button(str, enum.Enum):
    L = "L"
    R = "R"

    @property
    def other(self) -> Button:
        return Button.R if self is Button.L else Button.L


class AgentId(str, enum.Enum):
    HUMAN = "human"
    ASSISTANT = "assistant"


class Policy(str, enum.Enum):
    """How the assistant folds the two desirabilities into one score."""

    ETHICAL = "ethical"
    EGOISTIC = "egoistic"
    AGGRESSIVE = "aggressive"

    @classmethod
    def parse(cls, name: str) -> Policy:
        name = name.strip().lower()
        if name == "competitive":
            return cls.EGOISTIC
        try:
            return cls(name)
        except ValueError:
            raise ConfigError(f"unknown policy {name!r}") from None


@dataclass(frozen=True)
class ArenaSpec:
    """Rectangular arena centred on the origin.

    The default geometry puts the assistant 0.583 m from either button, which
    sits inside the discriminating band of the desirability sigmoid.
    """

    width: float = 3.0
    height: float = 2.5
    button_l: Vec2 = Vec2(-0.5, 0.6)
    button_r: Vec2 = Vec2(0.5, 0.6)
    press_radius: float = 0.1
    human_start: Vec2 = Vec2(0.0, -0.8)
    assistant_start: Vec2 = Vec2(0.0, 0.9)

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ConfigError(f"arena dimensions must be positive, got {self.width} x {self.height}")
        if self.press_radius <= 0:
            raise ConfigError(f"press_radius must be positive, got {self.press_radius}")
        for name in ("button_l", "button_r", "human_start", "assistant_start"):
            if not self.contains(getattr(self, name)):
                raise ConfigError(f"{name} {tuple(getattr(self, name))} lies outside the arena")
        sep = distance(self.button_l, self.button_r)
        if sep <= 2 * self.press_radius:
            raise ConfigError(
                f"buttons {sep:.3f} m apart overlap with press_radius {self.press_radius}"
            )

    def button(self, b: Button) -> Vec2:
        return self.button_l if b is Button.L else self.button_r

    @property
    def buttons(self) -> dict[Button, Vec2]:
        return {Button.L: self.button_l, Button.R: self.button_r}

    def contains(self, p: Vec2, tol: float = 1e-9) -> bool:
        return abs(p.x) <= self.width / 2 + tol and abs(p.y) <= self.height / 2 + tol


@dataclass(frozen=True)
class TrialSetup:
    correct_button: Button
    human_choice: Button
    policy: Policy
    seed: int = 0

    @property
    def incorrect_button(self) -> Button:
        return self.correct_button.other


@dataclass(frozen=True)
class AgentState:
    id: AgentId
    position: Vec2
    speed: float
    velocity_estimate: Vec2 = ORIGIN
    goal: Optional[Button] = None
    pointing_at: Optional[Button] = None
    halted: bool = False

    def __post_init__(self):
        if self.id is AgentId.HUMAN and self.pointing_at is not None:
            raise ValueError("the human agent never points")


@dataclass(frozen=True)
class RewardLedger:
    human: int = 0
    assistant: int = 0

    def score(self, agent: AgentId) -> int:
        return self.human if agent is AgentId.HUMAN else self.assistant

    def credit(self, agent: AgentId, delta: int) -> RewardLedger:
        if agent is AgentId.HUMAN:
            return replace(self, human=self.human + delta)
        return replace(self, assistant=self.assistant + delta)


Press = tuple[AgentId, Button]


@dataclass(frozen=True)
class WorldState:
    human: AgentState
    assistant: AgentState
    ledger: RewardLedger = RewardLedger()
    presses: tuple[tuple[AgentId, Button, int], ...] = ()
    # most recent human positions, oldest first, used for the velocity estimate
    human_history: tuple[Vec2, ...] = field(default_factory=tuple)

    def agent(self, agent: AgentId) -> AgentState:
        return self.human if agent is AgentId.HUMAN else self.assistant

    def has_pressed(self, agent: AgentId) -> bool:
        return any(a is agent for a, _, _ in self.presses)

    def pressed_button(self, agent: AgentId) -> Optional[Button]:
        for a, b, _ in self.presses:
            if a is agent:
                return b
        return None


def initial_world(arena: ArenaSpec, setup: TrialSetup, speed: float = 0.15) -> WorldState:
    """Both agents at their start positions; only the human has a goal."""
    if not isinstance(arena, ArenaSpec):
        raise ConfigError("arena must be an ArenaSpec")
    if speed <= 0:
        raise ConfigError(f"agent speed must be positive, got {speed}")
    human = AgentState(AgentId.HUMAN, arena.human_start, speed, goal=setup.human_choice)
    assistant = AgentState(AgentId.ASSISTANT, arena.assistant_start, speed)
    return WorldState(human, assistant, human_history=(arena.human_start,))


def detect_press(world: WorldState, arena: ArenaSpec) -> Optional[Press]:
    """First agent (human before assistant) standing on a button it has not pressed yet."""
    for agent in (AgentId.HUMAN, AgentId.ASSISTANT):
        if world.has_pressed(agent):
            continue
        pos = world.agent(agent).position
        for b in Button:
            if distance(pos, arena.button(b)) <= arena.press_radius:
                return agent, b
    return None


def score_press(setup: TrialSetup, press: Press, ledger: RewardLedger) -> RewardLedger:
    agent, b = press
    return ledger.credit(agent, 1 if b is setup.correct_button else -1)
