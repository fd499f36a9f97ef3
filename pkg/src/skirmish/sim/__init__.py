"""Deterministic, seedable 2D micro-battle simulator."""

from .engine import (
    BattleReport,
    EpisodeError,
    EpisodeOutcome,
    enemy_commands,
    render_report_text,
    run_episode,
    run_rollouts,
    simulate_episode,
    step,
)
from .state import ALLY, DT, ENEMY, BattleState, Observation, observe
from .units import (
    MapSpec,
    ScenarioLoadError,
    ScenarioSpec,
    UnitSpec,
    load_scenario,
    load_scenario_file,
    render_task_text,
)

__all__ = [
    "ALLY", "DT", "ENEMY",
    "BattleReport", "BattleState", "EpisodeError", "EpisodeOutcome",
    "MapSpec", "Observation", "ScenarioLoadError", "ScenarioSpec", "UnitSpec",
    "enemy_commands", "load_scenario", "load_scenario_file", "observe",
    "render_report_text", "render_task_text", "run_episode", "run_rollouts",
    "simulate_episode", "step",
]
