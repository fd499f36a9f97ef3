"""Scenario documents: unit stats, maps, rosters, and task-text rendering.

A scenario is loaded from a UTF-8 JSON document with the shape::

    {
      "name": "2s_vs_1sc",
      "map": {
        "width": 32, "height": 32,
        "walkable_x": [4, 23], "walkable_y": [7, 30],
        "cliff_cells": [[x, y], ...],      # optional
        "choke_cells": [[x, y], ...]       # optional
      },
      "allies":  [{"unit": {...stats...}, "pos": [x, y]}, ...],
      "enemies": [{"unit": {...stats...}, "pos": [x, y]}, ...],
      "enemy_rally": [x, y],
      "step_limit_seconds": 240,           # optional, default 120
      "spawn_jitter": 0.8                  # optional, default 0 (off)
    }

``spawn_jitter`` is the half-width of a uniform per-axis offset applied to
every spawn position at episode start, drawn from the episode's seeded RNG.
With jitter 0 every episode of a scenario is identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace


class ScenarioLoadError(Exception):
    """A scenario document is malformed; the message names the offending field."""


@dataclass(frozen=True)
class UnitSpec:
    """Combat statistics for one unit type."""

    name: str
    max_health: float
    max_shield: float = 0.0
    defense: float = 0.0
    attack_range: float = 0.0
    speed: float = 0.0
    damage: float = 0.0
    dps: float = 0.0
    heal_rate: float = 0.0
    splash_radius: float = 0.0
    suicide_on_attack: bool = False
    can_traverse_cliffs: bool = False

    @property
    def attack_period(self) -> float:
        """Seconds between attacks; undefined (0) for units that never attack."""
        return self.damage / self.dps if self.dps > 0 else 0.0

    def validate(self, where: str) -> None:
        if not self.name or not isinstance(self.name, str):
            raise ScenarioLoadError(f"{where}.name must be a non-empty string")
        if self.max_health <= 0:
            raise ScenarioLoadError(f"{where}.max_health must be > 0")
        if self.max_shield < 0:
            raise ScenarioLoadError(f"{where}.max_shield must be >= 0")
        if self.dps <= 0 and self.heal_rate <= 0:
            raise ScenarioLoadError(f"{where}.dps must be > 0 unless heal_rate > 0")
        if self.dps > 0 and self.damage <= 0:
            raise ScenarioLoadError(f"{where}.damage must be > 0 when dps > 0")
        for fname in ("defense", "attack_range", "speed", "damage", "dps",
                      "heal_rate", "splash_radius"):
            if getattr(self, fname) < 0:
                raise ScenarioLoadError(f"{where}.{fname} must be >= 0")


@dataclass(frozen=True)
class MapSpec:
    """Map geometry: bounds, walkable box, cliff and choke annotations."""

    width: float
    height: float
    walkable_x: tuple[float, float]
    walkable_y: tuple[float, float]
    cliff_cells: frozenset[tuple[int, int]] = frozenset()
    choke_cells: frozenset[tuple[int, int]] = frozenset()

    def validate(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ScenarioLoadError("map.width and map.height must be > 0")
        for axis, (lo, hi), limit in (("walkable_x", self.walkable_x, self.width),
                                      ("walkable_y", self.walkable_y, self.height)):
            if not (0 <= lo <= hi <= limit):
                raise ScenarioLoadError(
                    f"map.{axis} must satisfy 0 <= lo <= hi <= map extent")
        for label, cells in (("cliff_cells", self.cliff_cells),
                             ("choke_cells", self.choke_cells)):
            for (cx, cy) in cells:
                if not self.contains(cx, cy) and not self.contains(cx + 1, cy + 1):
                    raise ScenarioLoadError(f"map.{label} cell {(cx, cy)} outside walkable area")

    def contains(self, x: float, y: float) -> bool:
        return (self.walkable_x[0] <= x <= self.walkable_x[1]
                and self.walkable_y[0] <= y <= self.walkable_y[1])

    def clamp(self, x: float, y: float) -> tuple[float, float]:
        cx = min(max(x, self.walkable_x[0]), self.walkable_x[1])
        cy = min(max(y, self.walkable_y[0]), self.walkable_y[1])
        return cx, cy


Position = tuple[float, float]


@dataclass(frozen=True)
class ScenarioSpec:
    """One micro-battle task: map, rosters, enemy behaviour, and task text."""

    name: str
    map: MapSpec
    allies: tuple[tuple[UnitSpec, Position], ...]
    enemies: tuple[tuple[UnitSpec, Position], ...]
    enemy_rally: Position
    step_limit_seconds: float = 120.0
    spawn_jitter: float = 0.0
    task_text: str = ""

    def validate(self) -> None:
        if not self.allies:
            raise ScenarioLoadError("allies empty")
        if not self.enemies:
            raise ScenarioLoadError("enemies empty")
        self.map.validate()
        for side, roster in (("allies", self.allies), ("enemies", self.enemies)):
            for i, (spec, pos) in enumerate(roster):
                spec.validate(f"{side}[{i}].unit")
                if not self.map.contains(*pos):
                    raise ScenarioLoadError(f"{side}[{i}].pos {pos} outside walkable area")
        if self.step_limit_seconds <= 0:
            raise ScenarioLoadError("step_limit_seconds must be > 0")
        if self.spawn_jitter < 0:
            raise ScenarioLoadError("spawn_jitter must be >= 0")


def _num(doc: dict, key: str, where: str, default=None) -> float:
    if key not in doc:
        if default is not None:
            return default
        raise ScenarioLoadError(f"{where}.{key} missing")
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioLoadError(f"{where}.{key} must be a number")
    return float(v)


def _pair(doc, key: str, where: str) -> tuple[float, float]:
    v = doc.get(key)
    if (not isinstance(v, (list, tuple)) or len(v) != 2
            or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in v)):
        raise ScenarioLoadError(f"{where}.{key} must be a pair of numbers")
    return float(v[0]), float(v[1])


def _unit_spec(doc, where: str) -> UnitSpec:
    if not isinstance(doc, dict):
        raise ScenarioLoadError(f"{where} must be an object")
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        raise ScenarioLoadError(f"{where}.name must be a non-empty string")
    spec = UnitSpec(
        name=name,
        max_health=_num(doc, "max_health", where),
        max_shield=_num(doc, "max_shield", where, 0.0),
        defense=_num(doc, "defense", where, 0.0),
        attack_range=_num(doc, "attack_range", where, 0.0),
        speed=_num(doc, "speed", where, 0.0),
        damage=_num(doc, "damage", where, 0.0),
        dps=_num(doc, "dps", where, 0.0),
        heal_rate=_num(doc, "heal_rate", where, 0.0),
        splash_radius=_num(doc, "splash_radius", where, 0.0),
        suicide_on_attack=bool(doc.get("suicide_on_attack", False)),
        can_traverse_cliffs=bool(doc.get("can_traverse_cliffs", False)),
    )
    spec.validate(where)
    return spec


def _roster(doc, key: str) -> tuple[tuple[UnitSpec, Position], ...]:
    rows = doc.get(key)
    if not isinstance(rows, list):
        raise ScenarioLoadError(f"{key} must be a list")
    if not rows:
        raise ScenarioLoadError(f"{key} empty")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, dict) or "unit" not in row:
            raise ScenarioLoadError(f"{key}[{i}] must be an object with a 'unit' field")
        spec = _unit_spec(row["unit"], f"{key}[{i}].unit")
        pos = _pair(row, "pos", f"{key}[{i}]")
        out.append((spec, pos))
    return tuple(out)


def _cells(doc, key: str) -> frozenset[tuple[int, int]]:
    rows = doc.get(key, [])
    if not isinstance(rows, list):
        raise ScenarioLoadError(f"map.{key} must be a list of [x, y] cells")
    cells = set()
    for i, row in enumerate(rows):
        if not isinstance(row, (list, tuple)) or len(row) != 2:
            raise ScenarioLoadError(f"map.{key}[{i}] must be an [x, y] cell")
        cells.add((int(row[0]), int(row[1])))
    return frozenset(cells)


def load_scenario(text: str) -> ScenarioSpec:
    """Parse a scenario document and render its task text.

    Raises ScenarioLoadError naming the offending field on any schema or
    invariant violation.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioLoadError(f"not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ScenarioLoadError("document must be a JSON object")
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        raise ScenarioLoadError("name must be a non-empty string")
    mdoc = doc.get("map")
    if not isinstance(mdoc, dict):
        raise ScenarioLoadError("map must be an object")
    map_spec = MapSpec(
        width=_num(mdoc, "width", "map"),
        height=_num(mdoc, "height", "map"),
        walkable_x=_pair(mdoc, "walkable_x", "map"),
        walkable_y=_pair(mdoc, "walkable_y", "map"),
        cliff_cells=_cells(mdoc, "cliff_cells"),
        choke_cells=_cells(mdoc, "choke_cells"),
    )
    spec = ScenarioSpec(
        name=name,
        map=map_spec,
        allies=_roster(doc, "allies"),
        enemies=_roster(doc, "enemies"),
        enemy_rally=_pair(doc, "enemy_rally", ""),
        step_limit_seconds=_num(doc, "step_limit_seconds", "", 120.0),
        spawn_jitter=_num(doc, "spawn_jitter", "", 0.0),
    )
    spec.validate()
    return replace(spec, task_text=render_task_text(spec))


def load_scenario_file(path) -> ScenarioSpec:
    with open(path, encoding="utf-8") as fh:
        return load_scenario(fh.read())


def fmt_num(x: float) -> str:
    """Render a number the way the task prompts do: no trailing zeros."""
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    s = f"{x:.4f}".rstrip("0").rstrip(".")
    return s


def _display_name(name: str) -> str:
    return " ".join(part.capitalize() for part in name.split("_"))


def _count_types(roster) -> list[tuple[UnitSpec, int]]:
    order: list[UnitSpec] = []
    counts: dict[str, int] = {}
    for spec, _pos in roster:
        if spec.name not in counts:
            order.append(spec)
            counts[spec.name] = 0
        counts[spec.name] += 1
    return [(spec, counts[spec.name]) for spec in order]


def _roster_phrase(roster) -> str:
    parts = []
    for spec, n in _count_types(roster):
        noun = "unit" if n == 1 else "units"
        parts.append(f"{n} {_display_name(spec.name)} {noun}")
    if len(parts) <= 1:
        return parts[0]
    return ", ".join(parts[:-1]) + " and " + parts[-1]


def _points_phrase(roster) -> str:
    pts = [f"({fmt_num(x)}, {fmt_num(y)})" for _spec, (x, y) in roster]
    if len(pts) == 1:
        return pts[0]
    if len(pts) <= 4:
        return ", ".join(pts[:-1]) + " and " + pts[-1]
    # big rosters spawn as a cluster; summarise around the first point
    return f"{pts[0]} (clustered)"


def _unit_stat_sentence(spec: UnitSpec) -> str:
    bits = (f"The {_display_name(spec.name)} unit has {fmt_num(spec.max_health)} health, "
            f"{fmt_num(spec.max_shield)} shield, {fmt_num(spec.defense)} defense, "
            f"{fmt_num(spec.attack_range)} attacking range, {fmt_num(spec.speed)} speed, "
            f"{fmt_num(spec.damage)} damage with {fmt_num(spec.dps)} DPS.")
    extras = []
    if spec.heal_rate > 0:
        extras.append(f"It heals allied units for {fmt_num(spec.heal_rate)} health per second.")
    if spec.splash_radius > 0:
        extras.append(f"Its attacks splash within a radius of {fmt_num(spec.splash_radius)}.")
    if spec.suicide_on_attack:
        extras.append("It dies when it attacks.")
    if spec.can_traverse_cliffs:
        extras.append("It can traverse cliffs.")
    if extras:
        return bits + " " + " ".join(extras)
    return bits


def render_task_text(spec: ScenarioSpec) -> str:
    """Render the natural-language task description used in the prompts."""
    m = spec.map
    lines = [
        f"The map is {spec.name}, a {fmt_num(m.width)}*{fmt_num(m.height)}-sized square map.",
        (f"The available area of the x-axis is from {fmt_num(m.walkable_x[0])} to "
         f"{fmt_num(m.walkable_x[1])}, and the y-axis is from {fmt_num(m.walkable_y[0])} "
         f"to {fmt_num(m.walkable_y[1])}."),
        (f"You can control {_roster_phrase(spec.allies)} individually, "
         f"and the enemy controls {_roster_phrase(spec.enemies)}."),
    ]
    seen: set[str] = set()
    for spec_, _n in _count_types(spec.allies) + _count_types(spec.enemies):
        if spec_.name not in seen:
            seen.add(spec_.name)
            lines.append(_unit_stat_sentence(spec_))
    lines.append(f"Your units are at {_points_phrase(spec.allies)} points initially, "
                 f"and the enemy units are at {_points_phrase(spec.enemies)} points.")
    rx, ry = spec.enemy_rally
    lines.append(f"The enemy controls all the units to move and attack "
                 f"({fmt_num(rx)}, {fmt_num(ry)}) points along the way.")
    terrain = []
    if m.cliff_cells:
        terrain.append(f"There are {len(m.cliff_cells)} cliff cells which only units "
                       f"that can traverse cliffs may enter.")
    if m.choke_cells:
        terrain.append(f"There are {len(m.choke_cells)} choke point cells on this map.")
    if not terrain:
        terrain.append("There are no terrain advantages or choke points in this map.")
    lines.extend(terrain)
    return "\n".join(lines)
