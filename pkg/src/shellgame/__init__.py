"""Two-agent shell-game simulator whose assistant picks actions by predicting and scoring their consequences."""

from .engine import SimConfig, TrialResult, run_trial
from .layer import Alternative, Snapshot, layer_tick
from .world import ArenaSpec, Button, Policy, TrialSetup

__all__ = [
    "Alternative", "ArenaSpec", "Button", "Policy", "SimConfig", "Snapshot", "TrialResult", "TrialSetup",
    "layer_tick", "run_trial",
]
