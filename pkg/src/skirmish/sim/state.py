"""Mutable battle state and per-unit observations.

Units get integer ids: allies first in roster order, then enemies. All
tie-breaks elsewhere in the simulator resolve toward the lowest unit id, so
this ordering is part of the deterministic contract.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from ..errors import ContractViolation
from .units import ScenarioSpec, UnitSpec

ALLY = 0
ENEMY = 1

DT = 0.125  # simulation timestep in seconds


class UnitState:
    """One unit's mutable in-battle state."""

    __slots__ = ("uid", "spec", "team", "x", "y", "health", "shield",
                 "weapon_cooldown", "since_damaged", "alive", "vars")

    def __init__(self, uid: int, spec: UnitSpec, team: int, x: float, y: float):
        self.uid = uid
        self.spec = spec
        self.team = team
        self.x = x
        self.y = y
        self.health = spec.max_health
        self.shield = spec.max_shield
        self.weapon_cooldown = 0.0
        self.since_damaged = 0.0
        self.alive = True
        self.vars: dict[str, float] = {}

    @property
    def pool(self) -> float:
        return self.health + self.shield

    def dist_to(self, other: "UnitState") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


class BattleState:
    """Full battle state: tick counter, all units, ledgers, and RNG stream."""

    __slots__ = ("scenario", "tick", "units", "rng",
                 "damage_taken_health", "damage_taken_shield")

    def __init__(self, scenario: ScenarioSpec, seed: int):
        self.scenario = scenario
        self.tick = 0
        self.rng = random.Random(seed)
        self.units: list[UnitState] = []
        j = scenario.spawn_jitter
        uid = 0
        for team, roster in ((ALLY, scenario.allies), (ENEMY, scenario.enemies)):
            for spec, (x, y) in roster:
                if j > 0:
                    x += self.rng.uniform(-j, j)
                    y += self.rng.uniform(-j, j)
                    x, y = scenario.map.clamp(x, y)
                self.units.append(UnitState(uid, spec, team, x, y))
                uid += 1
        self.damage_taken_health = 0.0
        self.damage_taken_shield = 0.0

    @property
    def time(self) -> float:
        return self.tick * DT

    def living(self, team: int) -> list[UnitState]:
        return [u for u in self.units if u.alive and u.team == team]

    def team_alive(self, team: int) -> bool:
        return any(u.alive and u.team == team for u in self.units)


@dataclass(slots=True)
class Observation:
    """What one unit's policy sees on a tick. Fractions are in [0, 1]."""

    health_frac: float
    shield_frac: float
    weapon_cooldown: float
    dist_to_closest_enemy: float
    dist_to_closest_ally: float
    num_allies: int
    num_enemies: int
    my_x: float
    my_y: float
    enemy_centroid_x: float
    enemy_centroid_y: float
    time: float
    status: dict


def make_observation(state: BattleState, unit: UnitState, *, copy_status: bool = True) -> Observation:
    foes = [u for u in state.units if u.alive and u.team != unit.team]
    friends = [u for u in state.units if u.alive and u.team == unit.team]
    if foes:
        d_enemy = min(unit.dist_to(f) for f in foes)
        cx = sum(f.x for f in foes) / len(foes)
        cy = sum(f.y for f in foes) / len(foes)
    else:
        d_enemy = math.inf
        cx, cy = unit.x, unit.y
    others = [f for f in friends if f.uid != unit.uid]
    d_ally = min((unit.dist_to(f) for f in others), default=math.inf)
    spec = unit.spec
    return Observation(
        health_frac=unit.health / spec.max_health,
        shield_frac=unit.shield / spec.max_shield if spec.max_shield > 0 else 1.0,
        weapon_cooldown=unit.weapon_cooldown,
        dist_to_closest_enemy=d_enemy,
        dist_to_closest_ally=d_ally,
        num_allies=len(friends),
        num_enemies=len(foes),
        my_x=unit.x,
        my_y=unit.y,
        enemy_centroid_x=cx,
        enemy_centroid_y=cy,
        time=state.time,
        status=dict(unit.vars) if copy_status else unit.vars,
    )


def observe(state: BattleState, unit_id: int) -> Observation:
    """Observation for a living unit; ContractViolation for dead or unknown ids."""
    if not (0 <= unit_id < len(state.units)):
        raise ContractViolation(f"unknown unit id {unit_id}")
    unit = state.units[unit_id]
    if not unit.alive:
        raise ContractViolation(f"unit {unit_id} is dead")
    return make_observation(state, unit)
