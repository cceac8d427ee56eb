import math

import pytest
from hypothesis import given, strategies as st

from shellgame.geometry import Vec2, angle_between, distance
from shellgame.layer import (Alternative, EnforcementRule, LayerParams, SigmoidParams, Snapshot, assess,
                             combine, decide, desirability, evaluate, generate_alternatives, infer_human_goal,
                             layer_tick, predict_outcome, select_enforcement)
from shellgame.world import ArenaSpec, Button, Policy

ARENA = ArenaSpec()
PARAMS = LayerParams()


def toward(src: Vec2, dst: Vec2, speed: float = 0.15) -> Vec2:
    return (dst - src) * (speed / distance(src, dst))


def eq1(d, beta=10.0, t=0.25):
    # scalar oracle, written independently of shellgame.layer
    return 1.0 / (1.0 + math.exp(-beta * (d - t)))


def test_generate_alternatives():
    alts = generate_alternatives()
    assert [str(a) for a in alts] == ["DoNothing", "GoTo(L)", "GoTo(R)", "Point(L)", "Point(R)"]
    assert alts == generate_alternatives()
    assert len(alts) == 5
    assert [a.index for a in alts] == list(range(5))


# -- goal inference ----------------------------------------------------------

def test_infer_goal_exact_heading():
    pos = ARENA.human_start
    assert infer_human_goal(pos, toward(pos, ARENA.button_l), ARENA) is Button.L
    assert infer_human_goal(pos, toward(pos, ARENA.button_r), ARENA) is Button.R


def test_infer_goal_stationary():
    assert infer_human_goal(ARENA.human_start, Vec2(0, 0), ARENA) is None
    assert infer_human_goal(ARENA.human_start, None, ARENA) is None
    assert infer_human_goal(ARENA.human_start, Vec2(0.005, 0), ARENA) is None


def test_infer_goal_tie_goes_left():
    pos, vel = ARENA.human_start, Vec2(0, 0.15)
    assert angle_between(vel, ARENA.button_l - pos) == angle_between(vel, ARENA.button_r - pos)
    assert infer_human_goal(pos, vel, ARENA) is Button.L


# -- prediction --------------------------------------------------------------

def _snap(human_goal=None, human_pos=None, asst=None, correct=Button.L):
    hp = human_pos or ARENA.human_start
    vel = toward(hp, ARENA.button(human_goal)) if human_goal else None
    return Snapshot(hp, vel, asst or ARENA.assistant_start, correct)


@pytest.mark.parametrize("goal", [Button.L, Button.R])
def test_predict_point_redirects_human(goal):
    o = predict_outcome(_snap(goal), Alternative.POINT_L, goal, ARENA, PARAMS)
    assert o.human_final == ARENA.button_l
    assert o.assistant_final == ARENA.assistant_start


def test_predict_do_nothing_independent_paths():
    o = predict_outcome(_snap(Button.R), Alternative.DO_NOTHING, Button.R, ARENA, PARAMS)
    assert o == (ARENA.button_r, ARENA.assistant_start)


def _brute_force_stop(h, a, goal_h, goal_a, step=0.005, thr=0.5):
    # tick-by-tick simulation of two straight walks that both freeze at the
    # first sub-threshold separation
    def adv(p, g):
        dx, dy = g[0] - p[0], g[1] - p[1]
        d = math.hypot(dx, dy)
        return g if d <= step else (p[0] + dx * step / d, p[1] + dy * step / d)
    for _ in range(2000):
        nh, na = adv(h, goal_h), adv(a, goal_a)
        if math.hypot(nh[0] - na[0], nh[1] - na[1]) < thr:
            return h, a
        h, a = nh, na
    return h, a


def test_predict_goto_same_button_stops_short():
    o = predict_outcome(_snap(Button.L), Alternative.GOTO_L, Button.L, ARENA, PARAMS)
    h, a = _brute_force_stop(tuple(ARENA.human_start), tuple(ARENA.assistant_start),
                             tuple(ARENA.button_l), tuple(ARENA.button_l))
    assert (o.human_final.x, o.human_final.y) == pytest.approx(h, abs=1e-9)
    assert (o.assistant_final.x, o.assistant_final.y) == pytest.approx(a, abs=1e-9)
    # the assistant arrives first, so the human freezes about 0.5 m short of L
    assert o.assistant_final == ARENA.button_l
    assert distance(o.human_final, ARENA.button_l) == pytest.approx(0.501607, abs=1e-6)


def test_predict_stationary_human_stays_put_under_pointing():
    o = predict_outcome(_snap(None), Alternative.POINT_R, None, ARENA, PARAMS)
    assert o.human_final == ARENA.human_start


# -- desirability ------------------------------------------------------------

@pytest.mark.parametrize("d, expected", [
    (0.25, 0.5),
    (0.0, 0.0758581800),
    (1.0, 0.9994472214),
])
def test_desirability_values(d, expected):
    q = desirability(Vec2(d, 0), Vec2(0, 0))
    assert q == pytest.approx(eq1(d), abs=1e-12)
    assert q == pytest.approx(expected, abs=1e-9)


def test_desirability_custom_params():
    q = desirability(Vec2(0.4, 0), Vec2(0, 0), SigmoidParams(beta=4, t=0.5))
    assert q == pytest.approx(eq1(0.4, 4, 0.5))


@given(st.floats(0, 3), st.floats(0, 3))
def test_desirability_monotone(d1, d2):
    q1 = desirability(Vec2(d1, 0), Vec2(0, 0))
    q2 = desirability(Vec2(d2, 0), Vec2(0, 0))
    assert 0.0 < q1 < 1.0
    if d1 < d2 - 1e-9:
        assert q1 <= q2


# -- combine / select --------------------------------------------------------

@pytest.mark.parametrize("policy, expected", [
    (Policy.ETHICAL, 0.9),
    (Policy.EGOISTIC, 0.1),
    (Policy.AGGRESSIVE, -0.9),
])
def test_combine(policy, expected):
    assert combine(0.1, 0.9, policy) == expected


@pytest.mark.parametrize("q, expected", [
    ([0.9, 0.5, 0.1, 0.5, 0.5], Alternative.DO_NOTHING),
    ([0.5] * 5, None),
    ([0.99945, 0.6, 0.6, 0.99945, 0.0759], Alternative.DO_NOTHING),
    ([0.3, 0.3, 0.3, 0.3, 0.5], None),
    ([0.3, 0.3, 0.3, 0.3, 0.51], Alternative.POINT_R),
])
def test_select_enforcement(q, expected):
    assert select_enforcement(q, EnforcementRule()) is expected


def test_select_enforcement_wrong_length():
    with pytest.raises(ValueError):
        select_enforcement([0.1, 0.2])


# -- full layer tick ---------------------------------------------------------

@pytest.mark.parametrize("correct", list(Button))
def test_ethical_points_out_correct_button(correct):
    snap = _snap(correct.other, correct=correct)
    assert layer_tick(snap, Policy.ETHICAL, ARENA) is Alternative.point(correct)


@pytest.mark.parametrize("correct", list(Button))
@pytest.mark.parametrize("heading", [None, "correct", "incorrect"])
def test_egoistic_goes_to_correct_button(correct, heading):
    goal = {None: None, "correct": correct, "incorrect": correct.other}[heading]
    snap = _snap(goal, correct=correct)
    assert layer_tick(snap, Policy.EGOISTIC, ARENA) is Alternative.goto(correct)


@pytest.mark.parametrize("correct", list(Button))
def test_aggressive_points_out_wrong_button(correct):
    snap = _snap(correct, correct=correct)
    assert layer_tick(snap, Policy.AGGRESSIVE, ARENA) is Alternative.point(correct.other)


def test_egoistic_scores_from_default_geometry():
    evals = evaluate(_snap(None), Policy.EGOISTIC, ARENA)
    q = [e.q_e for e in evals]
    assert q[0] == pytest.approx(eq1(distance(ARENA.assistant_start, ARENA.button_r)))
    assert q[0] == pytest.approx(0.965476, abs=1e-6)
    assert q[1] == pytest.approx(0.999447, abs=1e-6)
    assert q[1] > q[0]


def test_unknown_human_goal_leaves_human_scores_flat():
    for a in assess(_snap(None), ARENA):
        assert a.outcome.human_final == ARENA.human_start
    assert layer_tick(_snap(None), Policy.ETHICAL, ARENA) is None
    assert layer_tick(_snap(None), Policy.AGGRESSIVE, ARENA) is None


def test_layer_is_deterministic():
    snap = _snap(Button.R)
    for policy in Policy:
        assert decide(snap, policy, ARENA) == decide(snap, policy, ARENA)
