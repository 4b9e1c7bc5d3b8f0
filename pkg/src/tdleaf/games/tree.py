"""Hand-built game trees for search and learning fixtures.

Nodes are named strings. A node with no listed children is a horizon leaf:
it is not terminal (it has a single ``end`` move into a drawn terminal), so
a search that reaches it at depth 0 scores it with the evaluation function.
Leaf features default to one-hot vectors, so with weights equal to the leaf
scores the evaluation of leaf ``X`` is exactly the score of ``X``.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .base import Game, Role

END = "end"


class TreeNode(NamedTuple):
    name: str
    to_move: int
    result: int | None


class TreeGame(Game):
    name = "tree"

    def __init__(
        self,
        children: dict[str, list[str]],
        root: str,
        features: dict[str, tuple[float, ...]] | None = None,
        feature_names: tuple[str, ...] | None = None,
        rewards: dict[str, int] | None = None,
    ):
        self.children = children
        self.root = root
        self.rewards = dict(rewards or {})
        self.depth_of = {root: 0}
        stack = [root]
        while stack:
            node = stack.pop()
            for c in children.get(node, ()):
                self.depth_of[c] = self.depth_of[node] + 1
                stack.append(c)
        leaves = [n for n in self.depth_of if n not in children and n not in self.rewards]
        if features is None:
            names = tuple(sorted(leaves))
            eye = np.eye(len(names))
            features = {n: tuple(eye[i]) for i, n in enumerate(names)}
            feature_names = names
        self.feature_names = tuple(feature_names)
        self._features = {n: tuple(float(x) for x in v) for n, v in features.items()}
        self._zero = (0.0,) * len(self.feature_names)

    def initial_state(self, first: Role = Role.LEARNER, rng=None) -> TreeNode:
        return self._node(self.root, int(first))

    def _node(self, name: str, to_move: int) -> TreeNode:
        return TreeNode(name, to_move, self.rewards.get(name))

    def legal_actions(self, state: TreeNode) -> list[str]:
        if state.result is not None:
            return []
        return list(self.children.get(state.name, (END,)))

    def successor(self, state: TreeNode, action: str, event=None) -> TreeNode:
        if action == END:
            return TreeNode(f"{state.name}.{END}", -state.to_move, 0)
        return self._node(action, -state.to_move)

    def features(self, state: TreeNode) -> tuple[float, ...]:
        return self._features.get(state.name, self._zero)

    def serialize(self, state: TreeNode) -> str:
        return f"{state.name}|{Role(state.to_move).symbol}"

    def parse(self, text: str) -> TreeNode:
        name, _, mover = text.partition("|")
        side = int(Role.from_symbol(mover))
        if name.endswith(f".{END}"):
            return TreeNode(name, side, 0)
        if name not in self.depth_of:
            raise ValueError(f"unknown tree node {name!r}")
        return self._node(name, side)


FIGURE1_CHILDREN = {
    "A": ["B", "C"],
    "B": ["D", "E"],
    "C": ["F", "G"],
    "D": ["H", "I"],
    "E": ["J", "K"],
    "F": ["L", "M"],
    "G": ["N", "O"],
}
FIGURE1_SCORES = {"H": 3.0, "I": -9.0, "J": -5.0, "K": -6.0, "L": 4.0, "M": 2.0, "N": -9.0, "O": 5.0}


def figure1() -> tuple[TreeGame, np.ndarray]:
    """The full-breadth 3-ply tree of the classic minimax illustration.

    Returns the game and the weight vector that makes each leaf evaluate to
    its printed score (features are one-hot over leaves H..O).
    """
    game = TreeGame(FIGURE1_CHILDREN, "A")
    w = np.array([FIGURE1_SCORES[n] for n in game.feature_names])
    return game, w
