import itertools
from dataclasses import replace

import pytest

from shellgame.controllers import (AvoidanceRule, InsufficientHistoryError, assistant_apply, avoidance_gate,
                                   estimate_velocity, human_step)
from shellgame.geometry import Vec2, distance
from shellgame.layer import Alternative
from shellgame.world import ArenaSpec, Button, Policy, TrialSetup, initial_world

DT = 1 / 30
RULE = AvoidanceRule()


@pytest.fixture
def arena():
    return ArenaSpec()


@pytest.fixture
def world(arena):
    return initial_world(arena, TrialSetup(Button.R, Button.L, Policy.ETHICAL))


def test_estimate_velocity_stationary():
    assert estimate_velocity([Vec2(1, 1)] * 5, DT) == Vec2(0, 0)


def test_estimate_velocity_constant_speed():
    v = estimate_velocity([Vec2(0.005 * k, 0) for k in range(5)], DT)
    assert v.x == pytest.approx(0.15) and v.y == pytest.approx(0.0)


def test_estimate_velocity_needs_two_samples():
    with pytest.raises(InsufficientHistoryError):
        estimate_velocity([Vec2(0, 0)], DT)


def test_estimate_velocity_jitter_bound():
    # every single-sample perturbation of up to 1 mm per axis
    base = [Vec2(0.005 * k, 0) for k in range(5)]
    worst = 0.0
    for k, dx, dy in itertools.product(range(5), (-0.001, 0, 0.001), (-0.001, 0, 0.001)):
        hist = list(base)
        hist[k] = hist[k] + Vec2(dx, dy)
        worst = max(worst, abs(estimate_velocity(hist, DT).norm() - 0.15))
    assert worst == pytest.approx(0.0076785, abs=1e-6)
    assert worst <= 0.012


@pytest.mark.parametrize("other, expected", [
    (Vec2(2.0, 0), Vec2(0, 0)),
    (Vec2(0.49, 0), Vec2(-0.005, 0)),
    (Vec2(0.5, 0), Vec2(0, 0)),
])
def test_avoidance_gate(other, expected):
    assert avoidance_gate(Vec2(-0.005, 0), other, Vec2(0, 0), RULE) == expected


def test_human_steps_toward_goal(world, arena):
    h = human_step(world, arena, DT, RULE)
    assert distance(h.position, world.human.position) == pytest.approx(0.005)
    assert distance(h.position, arena.button_l) == pytest.approx(distance(arena.human_start, arena.button_l) - 0.005)
    assert h.goal is Button.L and not h.halted


def test_human_adopts_pointed_button(world, arena):
    w = replace(world, assistant=replace(world.assistant, pointing_at=Button.R))
    h = human_step(w, arena, DT, RULE)
    assert h.goal is Button.R
    assert distance(h.position, arena.button_r) < distance(arena.human_start, arena.button_r)


def test_pointing_at_current_goal_is_idempotent(world, arena):
    w = replace(world, assistant=replace(world.assistant, pointing_at=Button.L))
    assert human_step(w, arena, DT, RULE) == human_step(world, arena, DT, RULE)


def test_human_halts_when_blocked(world, arena):
    ahead = world.human.position + Vec2(0, 0.45)
    w = replace(world, human=replace(world.human, goal=Button.L),
                assistant=replace(world.assistant, position=ahead))
    h = human_step(w, arena, DT, RULE)
    assert h.position == world.human.position and h.halted


def test_assistant_point_stays_put(world, arena):
    a = assistant_apply(world, arena, Alternative.POINT_L, DT, RULE)
    assert a.position == arena.assistant_start
    assert a.pointing_at is Button.L and a.goal is None


def test_assistant_goto_moves(world, arena):
    a = assistant_apply(world, arena, Alternative.GOTO_R, DT, RULE)
    assert a.goal is Button.R and a.pointing_at is None
    assert distance(a.position, arena.button_r) == pytest.approx(distance(arena.assistant_start, arena.button_r) - 0.005)


def test_assistant_keeps_action_without_enforcement(world, arena):
    # tick 1 enforces GoTo(R); tick 2 has no layer run and must keep walking
    a1 = assistant_apply(world, arena, Alternative.GOTO_R, DT, RULE)
    a2 = assistant_apply(replace(world, assistant=a1), arena, None, DT, RULE)
    assert a2.goal is Button.R
    assert distance(a2.position, arena.button_r) == pytest.approx(
        distance(arena.assistant_start, arena.button_r) - 0.010)


def test_assistant_do_nothing_clears(world, arena):
    a = replace(world.assistant, goal=Button.L, pointing_at=None)
    a = assistant_apply(replace(world, assistant=a), arena, Alternative.DO_NOTHING, DT, RULE)
    assert a.goal is None and a.pointing_at is None and a.position == arena.assistant_start


def test_assistant_point_clears_goal(world, arena):
    a = replace(world.assistant, goal=Button.L)
    a = assistant_apply(replace(world, assistant=a), arena, Alternative.POINT_R, DT, RULE)
    assert a.goal is None and a.pointing_at is Button.R
