"""The skill history tree: running scores and usage counts per skill.

Each node keeps an incremental mean of the rollout outcomes of every
strategy that used the skill:

    score := (score * uses + g) / (uses + 1);  uses := uses + 1

so after updates g_1..g_k the score is exactly the arithmetic mean. A
strategy is a path from the root; evaluating it updates every node on the
path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ContractViolation


@dataclass
class SkillNode:
    name: str
    score: float = 0.0
    uses: int = 0
    children: dict[str, "SkillNode"] = field(default_factory=dict)

    def child(self, name: str) -> "SkillNode":
        node = self.children.get(name)
        if node is None:
            node = SkillNode(name)
            self.children[name] = node
        return node


def new_history() -> SkillNode:
    """Root sentinel; its children are the first skills of strategies."""
    return SkillNode(name="")


def update_skill_score(node: SkillNode, g: float) -> SkillNode:
    """Fold one rollout outcome g (a win rate in [0, 1]) into the node."""
    if not (0.0 <= g <= 1.0):
        raise ContractViolation(f"g must be in [0, 1], got {g}")
    node.score = (node.score * node.uses + g) / (node.uses + 1)
    node.uses += 1
    return node


def path_nodes(root: SkillNode, skill_names) -> list[SkillNode]:
    """The nodes for a strategy's skill path, created as needed."""
    nodes = []
    current = root
    for name in skill_names:
        current = current.child(name)
        nodes.append(current)
    return nodes


def update_path(root: SkillNode, skill_names, g: float) -> None:
    for node in path_nodes(root, skill_names):
        update_skill_score(node, g)


def serialize_history(root: SkillNode) -> str:
    """Depth-first "skill: score (uses)" lines for the planner prompt."""
    lines: list[str] = []

    def walk(node: SkillNode, depth: int) -> None:
        for child in node.children.values():
            lines.append(f"{'  ' * depth}{child.name}: {child.score:.3f} ({child.uses})")
            walk(child, depth + 1)

    walk(root, 0)
    return "\n".join(lines) if lines else "None."
