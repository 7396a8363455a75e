"""Named small graphs and seeded random generators for the CLI and tests."""

from __future__ import annotations

import random
import re
from typing import Optional

from .graphs import WeightedGraph

# Fixed labelings for the standard five-or-six vertex obstructions.
#   diamond: K4 minus the 2-3 edge (0 and 1 have degree 3)
#   gem:     path 0-1-2-3 plus apex 4 adjacent to all of it
#   house:   square 1-2-3-4 plus roof vertex 0 adjacent to 1 and 2
#   domino:  two squares 0-1-4-3 and 1-2-5-4 glued along the 1-4 edge
#   bull:    triangle 0-1-2 with horns 3 (at 0) and 4 (at 1)
#   dart:    diamond 0,1,2,3 plus a pendant 4 attached to 0
_FIXTURES: dict[str, tuple[int, list[tuple[int, int]]]] = {
    "diamond": (4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]),
    "gem": (5, [(0, 1), (1, 2), (2, 3), (0, 4), (1, 4), (2, 4), (3, 4)]),
    "house": (5, [(0, 1), (0, 2), (1, 2), (1, 4), (2, 3), (3, 4)]),
    "domino": (6, [(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)]),
    "bull": (5, [(0, 1), (0, 2), (1, 2), (0, 3), (1, 4)]),
    "dart": (5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (0, 4)]),
}


def fixture_names() -> list[str]:
    return sorted(_FIXTURES) + ["cycle<k>", "path<k>", "complete<k>"]


def fixture_graph(name: str) -> WeightedGraph:
    """Build a named fixture with unit weights.

    Accepts the six standard obstruction names plus ``cycle<k>``, ``path<k>``
    and ``complete<k>`` patterns (e.g. ``cycle5``).
    """
    key = name.strip().lower()
    if key in _FIXTURES:
        n, edges = _FIXTURES[key]
        return WeightedGraph(n, edges)
    m = re.fullmatch(r"(cycle|path|complete)(\d+)", key)
    if not m:
        raise ValueError(f"unknown fixture {name!r}; known: {', '.join(fixture_names())}")
    kind, k = m.group(1), int(m.group(2))
    if kind == "cycle":
        return cycle_graph(k)
    if kind == "path":
        return path_graph(k)
    return complete_graph(k)


def path_graph(k: int) -> WeightedGraph:
    return WeightedGraph(k, [(i, i + 1) for i in range(k - 1)])


def cycle_graph(k: int) -> WeightedGraph:
    if k < 3:
        raise ValueError("cycle needs at least 3 vertices")
    return WeightedGraph(k, [(i, (i + 1) % k) for i in range(k)])


def complete_graph(k: int) -> WeightedGraph:
    return WeightedGraph(k, [(i, j) for i in range(k) for j in range(i + 1, k)])


def erdos_renyi(
    n: int,
    p: float,
    seed: int,
    weight_range: Optional[tuple[float, float]] = None,
) -> WeightedGraph:
    """Seeded G(n, p) with unit or uniform-random weights."""
    rng = random.Random(seed)
    edges = [
        (u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p
    ]
    weights = None
    if weight_range is not None:
        lo, hi = weight_range
        weights = [rng.uniform(lo, hi) for _ in range(n)]
    return WeightedGraph(n, edges, weights)
