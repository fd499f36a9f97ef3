"""The battle engine: scripted enemy, lockstep resolution, episodes, rollouts.

Resolution order inside one tick is fixed so episodes are reproducible:

1. all commands are decided from the start-of-tick state (policy for allies,
   the scripted AI for enemies),
2. movement applies in unit-id order,
3. attacks apply in unit-id order (a unit killed by a lower id this tick
   neither acts nor can be hit),
4. shield regeneration and healing,
5. cooldown decay and time bookkeeping.

Commands are plain tuples:

    ("attack", uid, target_uid)   attack-move toward target, fire when in range
    ("move", uid, x, y)           move toward a point
    ("hold", uid)                 do nothing
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from ..errors import ContractViolation, PolicyRuntimeError
from .state import ALLY, DT, ENEMY, BattleState, UnitState, make_observation
from .units import ScenarioSpec, fmt_num

SIGHT_RANGE = 9.0
SHIELD_REGEN_RATE = 2.0      # hit-points per second
SHIELD_REGEN_DELAY = 10.0    # seconds without taking damage
HEAL_RANGE = 4.0
KILL_SCORE = 10.0
WIN_SCORE = 100.0
_EPS = 1e-9


class EpisodeError(Exception):
    """A policy failed at runtime during an episode."""

    def __init__(self, message: str, tick: int, span=None, episode_index: int | None = None):
        loc = f" at {span}" if span is not None else ""
        ep = f" (episode {episode_index})" if episode_index is not None else ""
        super().__init__(f"{message}{loc} on tick {tick}{ep}")
        self.message = message
        self.tick = tick
        self.span = span
        self.episode_index = episode_index


@dataclass(frozen=True)
class EpisodeOutcome:
    result: str  # "win" | "lose" | "tie"
    ticks_elapsed: int
    surviving_allies: int
    surviving_enemies: int
    damage_dealt: float
    damage_taken_health: float
    damage_taken_shield: float
    score: float
    seed: int

    def to_dict(self) -> dict:
        return {
            "result": self.result,
            "ticks_elapsed": self.ticks_elapsed,
            "surviving_allies": self.surviving_allies,
            "surviving_enemies": self.surviving_enemies,
            "damage_dealt": self.damage_dealt,
            "damage_taken_health": self.damage_taken_health,
            "damage_taken_shield": self.damage_taken_shield,
            "score": self.score,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class BattleReport:
    """Aggregated rollout outcomes; win_rate is wins / episodes."""

    episodes: int
    wins: int
    ties: int
    losses: int
    win_rate: float
    mean_score: float
    mean_damage_dealt: float
    mean_damage_taken_health: float
    mean_damage_taken_shield: float
    mean_surviving_allies: float
    mean_surviving_enemies: float
    outcomes: tuple[EpisodeOutcome, ...]

    def to_dict(self) -> dict:
        return {
            "episodes": self.episodes,
            "wins": self.wins,
            "ties": self.ties,
            "losses": self.losses,
            "win_rate": self.win_rate,
            "mean_score": self.mean_score,
            "mean_damage_dealt": self.mean_damage_dealt,
            "mean_damage_taken_health": self.mean_damage_taken_health,
            "mean_damage_taken_shield": self.mean_damage_taken_shield,
            "mean_surviving_allies": self.mean_surviving_allies,
            "mean_surviving_enemies": self.mean_surviving_enemies,
            "outcomes": [o.to_dict() for o in self.outcomes],
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent)

    @staticmethod
    def from_outcomes(outcomes) -> "BattleReport":
        outcomes = tuple(outcomes)
        n = len(outcomes)
        wins = sum(1 for o in outcomes if o.result == "win")
        ties = sum(1 for o in outcomes if o.result == "tie")
        losses = n - wins - ties
        mean = lambda f: sum(f(o) for o in outcomes) / n
        return BattleReport(
            episodes=n, wins=wins, ties=ties, losses=losses,
            win_rate=wins / n,
            mean_score=mean(lambda o: o.score),
            mean_damage_dealt=mean(lambda o: o.damage_dealt),
            mean_damage_taken_health=mean(lambda o: o.damage_taken_health),
            mean_damage_taken_shield=mean(lambda o: o.damage_taken_shield),
            mean_surviving_allies=mean(lambda o: o.surviving_allies),
            mean_surviving_enemies=mean(lambda o: o.surviving_enemies),
            outcomes=outcomes,
        )


def render_report_text(report: BattleReport) -> str:
    """The combat-result sentence fed to the prompts and printed by the CLI."""
    return (
        f"You win {report.wins} times, tie {report.ties} times, and lose "
        f"{report.losses} times out of {report.episodes} combats.\n"
        f"There are {fmt_num(report.mean_surviving_allies)} units and "
        f"{fmt_num(report.mean_surviving_enemies)} enemy units left.\n"
        f"You achieve {fmt_num(report.mean_score)} scores, give "
        f"{fmt_num(report.mean_damage_dealt)} damages to the enemy, take "
        f"{fmt_num(report.mean_damage_taken_health)} damage on health, and take "
        f"{fmt_num(report.mean_damage_taken_shield)} damage on the shield."
    )


def _closest_living_foe(state: BattleState, unit: UnitState) -> UnitState | None:
    best = None
    best_key = None
    for u in state.units:
        if not u.alive or u.team == unit.team:
            continue
        key = (unit.dist_to(u), u.uid)
        if best_key is None or key < best_key:
            best, best_key = u, key
    return best


def _weakest_living_foe(state: BattleState, team: int) -> UnitState | None:
    best = None
    best_key = None
    for u in state.units:
        if not u.alive or u.team == team:
            continue
        key = (u.pool, u.uid)
        if best_key is None or key < best_key:
            best, best_key = u, key
    return best


def enemy_commands(state: BattleState) -> list[tuple]:
    """Scripted enemy AI: attack the closest ally in sight, else rally.

    An enemy engages when any ally is within max(attack_range, sight); ties
    between equidistant allies break toward the lower unit id.
    """
    commands = []
    rally = state.scenario.enemy_rally
    for u in state.units:
        if not u.alive or u.team != ENEMY:
            continue
        target = _closest_living_foe(state, u)
        if target is not None and u.dist_to(target) <= max(u.spec.attack_range, SIGHT_RANGE):
            commands.append(("attack", u.uid, target.uid))
        elif math.hypot(u.x - rally[0], u.y - rally[1]) > _EPS and u.spec.speed > 0:
            commands.append(("move", u.uid, rally[0], rally[1]))
        else:
            commands.append(("hold", u.uid))
    return commands


def _cell_allowed(state: BattleState, unit: UnitState, x: float, y: float) -> bool:
    if unit.spec.can_traverse_cliffs:
        return True
    return (math.floor(x), math.floor(y)) not in state.scenario.map.cliff_cells


def _move_toward(state: BattleState, unit: UnitState, tx: float, ty: float) -> None:
    dx = tx - unit.x
    dy = ty - unit.y
    dist = math.hypot(dx, dy)
    if dist < _EPS or unit.spec.speed <= 0:
        return
    step = min(unit.spec.speed * DT, dist)
    nx = unit.x + dx / dist * step
    ny = unit.y + dy / dist * step
    nx, ny = state.scenario.map.clamp(nx, ny)
    # clamping per axis makes a unit pushed into a wall slide along it
    if _cell_allowed(state, unit, nx, ny):
        unit.x, unit.y = nx, ny
    elif _cell_allowed(state, unit, nx, unit.y):
        unit.x = nx
    elif _cell_allowed(state, unit, unit.x, ny):
        unit.y = ny


def _apply_hit(state: BattleState, attacker: UnitState, victim: UnitState) -> None:
    effective = max(1.0, attacker.spec.damage - victim.spec.defense)
    shield_loss = min(victim.shield, effective)
    victim.shield -= shield_loss
    health_loss = min(victim.health, effective - shield_loss)
    victim.health -= health_loss
    victim.since_damaged = 0.0
    if victim.health <= 0.0:
        victim.health = 0.0
        victim.alive = False
    if victim.team == ALLY:
        state.damage_taken_shield += shield_loss
        state.damage_taken_health += health_loss


def _resolve_attack(state: BattleState, attacker: UnitState, target: UnitState) -> None:
    attacker.weapon_cooldown = attacker.spec.attack_period
    victims = [target]
    if attacker.spec.splash_radius > 0:
        victims = [u for u in state.units
                   if u.alive and u.team == target.team
                   and u.dist_to(target) <= attacker.spec.splash_radius]
        victims.sort(key=lambda u: u.uid)
    for v in victims:
        _apply_hit(state, attacker, v)
    if attacker.spec.suicide_on_attack:
        attacker.shield = 0.0
        attacker.health = 0.0
        attacker.alive = False


def step(state: BattleState, ally_commands: list[tuple]) -> BattleState:
    """Advance the battle one tick. ally_commands must reference living allies."""
    for cmd in ally_commands:
        uid = cmd[1]
        if not (0 <= uid < len(state.units)):
            raise ContractViolation(f"command for unknown unit {uid}")
        u = state.units[uid]
        if not u.alive:
            raise ContractViolation(f"command for dead unit {uid}")
        if u.team != ALLY:
            raise ContractViolation(f"command for non-ally unit {uid}")
    commands = {cmd[1]: cmd for cmd in ally_commands}
    for cmd in enemy_commands(state):
        commands[cmd[1]] = cmd

    units = state.units
    # movement
    for uid in sorted(commands):
        u = units[uid]
        if not u.alive:
            continue
        cmd = commands[uid]
        if cmd[0] == "move":
            _move_toward(state, u, cmd[2], cmd[3])
        elif cmd[0] == "attack":
            t = units[cmd[2]]
            if t.alive and u.dist_to(t) > u.spec.attack_range:
                _move_toward(state, u, t.x, t.y)
    # attacks
    for uid in sorted(commands):
        u = units[uid]
        if not u.alive:
            continue
        cmd = commands[uid]
        if cmd[0] != "attack" or u.spec.dps <= 0:
            continue
        t = units[cmd[2]]
        if (t.alive and u.weapon_cooldown <= _EPS
                and u.dist_to(t) <= u.spec.attack_range + _EPS):
            _resolve_attack(state, u, t)
    # shield regeneration, gated on time-undamaged at the start of this tick
    for u in units:
        if (u.alive and u.spec.max_shield > 0 and u.shield < u.spec.max_shield
                and u.since_damaged >= SHIELD_REGEN_DELAY):
            u.shield = min(u.spec.max_shield, u.shield + SHIELD_REGEN_RATE * DT)
    # healers top up the most-injured teammate in range
    for u in units:
        if not u.alive or u.spec.heal_rate <= 0:
            continue
        best = None
        best_key = None
        for a in units:
            if (not a.alive or a.team != u.team or a.uid == u.uid
                    or a.health >= a.spec.max_health
                    or u.dist_to(a) > HEAL_RANGE):
                continue
            key = (a.health / a.spec.max_health, a.uid)
            if best_key is None or key < best_key:
                best, best_key = a, key
        if best is not None:
            best.health = min(best.spec.max_health, best.health + u.spec.heal_rate * DT)
    # time bookkeeping
    for u in units:
        if u.alive:
            if u.weapon_cooldown > 0.0:
                u.weapon_cooldown = max(0.0, u.weapon_cooldown - DT)
            u.since_damaged += DT
    state.tick += 1
    return state


def _translate_request(state: BattleState, unit: UnitState, request: tuple) -> tuple:
    kind = request[0]
    if kind == "attack_weakest_enemy" or kind == "attack_focus":
        t = _weakest_living_foe(state, unit.team)
        return ("attack", unit.uid, t.uid) if t else ("hold", unit.uid)
    if kind == "attack_closest_enemy":
        t = _closest_living_foe(state, unit)
        return ("attack", unit.uid, t.uid) if t else ("hold", unit.uid)
    if kind == "move_to":
        x, y = request[1], request[2]
        return ("move", unit.uid, float(x), float(y))
    if kind == "retreat_from_closest_enemy":
        d = float(request[1])
        t = _closest_living_foe(state, unit)
        if t is None:
            return ("hold", unit.uid)
        dx, dy = unit.x - t.x, unit.y - t.y
        norm = math.hypot(dx, dy)
        if norm < _EPS:
            dx, dy, norm = 1.0, 0.0, 1.0
        return ("move", unit.uid, unit.x + dx / norm * d, unit.y + dy / norm * d)
    if kind == "hold":
        return ("hold", unit.uid)
    raise ContractViolation(f"unknown action request {request!r}")


def simulate_episode(scenario: ScenarioSpec, policy, seed: int,
                     observer=None) -> tuple[EpisodeOutcome, BattleState]:
    """Run one episode and also return the final state (for invariant checks)."""
    state = BattleState(scenario, seed)
    for u in state.units:
        if u.team == ALLY:
            u.vars = dict(policy.initial_vars(u.spec.name))
    max_ticks = int(math.ceil(scenario.step_limit_seconds / DT))
    n_enemies = len(scenario.enemies)
    initial_enemy_pool = sum(u.pool for u in state.units if u.team == ENEMY)

    result = "tie"
    while True:
        if not state.team_alive(ENEMY):
            result = "win"
            break
        if not state.team_alive(ALLY):
            result = "lose"
            break
        if state.tick >= max_ticks:
            result = "tie"
            break
        ally_cmds = []
        for u in state.units:
            if not u.alive or u.team != ALLY:
                continue
            obs = make_observation(state, u, copy_status=False)
            try:
                request = policy.act(u.spec.name, obs, u.vars)
            except PolicyRuntimeError as e:
                raise EpisodeError(e.message, state.tick, e.span) from e
            cmd = _translate_request(state, u, request)
            if cmd[0] != "hold":
                ally_cmds.append(cmd)
        step(state, ally_cmds)
        if observer is not None:
            observer(state)

    surviving_allies = len(state.living(ALLY))
    surviving_enemies = len(state.living(ENEMY))
    final_enemy_pool = sum(u.pool for u in state.units if u.team == ENEMY)
    damage_dealt = initial_enemy_pool - final_enemy_pool
    kills = n_enemies - surviving_enemies
    score = damage_dealt + KILL_SCORE * kills + WIN_SCORE * (1 if result == "win" else 0)
    outcome = EpisodeOutcome(
        result=result,
        ticks_elapsed=state.tick,
        surviving_allies=surviving_allies,
        surviving_enemies=surviving_enemies,
        damage_dealt=damage_dealt,
        damage_taken_health=state.damage_taken_health,
        damage_taken_shield=state.damage_taken_shield,
        score=score,
        seed=seed,
    )
    return outcome, state


def run_episode(scenario: ScenarioSpec, policy, seed: int) -> EpisodeOutcome:
    """One episode of `policy` against the scenario's scripted enemy."""
    outcome, _state = simulate_episode(scenario, policy, seed)
    return outcome


def run_rollouts(scenario: ScenarioSpec, policy, episodes: int = 10,
                 base_seed: int = 0, jobs: int = 1) -> BattleReport:
    """Aggregate `episodes` episodes with seeds base_seed..base_seed+episodes-1.

    Episodes are pure functions of (scenario, policy, seed); with jobs > 1
    they evaluate on a thread pool and merge in seed order regardless of
    completion order. An EpisodeError in any episode aborts the report.
    """
    if episodes < 1:
        raise ContractViolation("episodes must be >= 1")
    seeds = range(base_seed, base_seed + episodes)
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_episode, scenario, policy, s) for s in seeds]
            outcomes = []
            for i, f in enumerate(futures):
                try:
                    outcomes.append(f.result())
                except EpisodeError as e:
                    raise EpisodeError(e.message, e.tick, e.span, episode_index=i) from e
    else:
        outcomes = []
        for i, s in enumerate(seeds):
            try:
                outcomes.append(run_episode(scenario, policy, s))
            except EpisodeError as e:
                raise EpisodeError(e.message, e.tick, e.span, episode_index=i) from e
    return BattleReport.from_outcomes(outcomes)
