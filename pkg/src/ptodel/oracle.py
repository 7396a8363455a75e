"""Exact exponential-time reference solvers, used as ground truth in tests.

These deliberately favor obviously-correct enumeration over speed; budgets
cap the instance sizes.  The obstruction detectors here are independent of
the ones in ``graphs`` (plain degree-sequence checks over subsets) so the two
routes can validate each other.
"""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass
from typing import Iterator, Optional

from .fvsp import FvspInstance
from .graphs import VertexSet, WeightedGraph, is_ptolemaic, _bits_to_list


class BudgetExceededError(ValueError):
    """Instance is too large for the exact solver's budget."""


@dataclass(frozen=True)
class OracleBudget:
    max_graph_vertices: int = 14
    max_fvsp_nodes: int = 18
    time_cap_s: Optional[float] = None

    def __post_init__(self):
        if self.max_graph_vertices <= 0 or self.max_fvsp_nodes <= 0:
            raise ValueError("budget bounds must be positive")
        if self.time_cap_s is not None and self.time_cap_s <= 0:
            raise ValueError("time cap must be positive")


DEFAULT_BUDGET = OracleBudget()


class _Deadline:
    def __init__(self, cap: Optional[float]):
        self.until = None if cap is None else time.monotonic() + cap

    def check(self) -> None:
        if self.until is not None and time.monotonic() > self.until:
            raise BudgetExceededError("oracle time cap exceeded")


def _subsets_by_weight(
    weights: tuple[float, ...]
) -> Iterator[tuple[float, tuple[int, ...]]]:
    """All subsets of 0..n-1 in nondecreasing total weight (empty set
    first).  Classic heap scheme over the weight-sorted vertex order."""
    n = len(weights)
    yield 0.0, ()
    if n == 0:
        return
    order = sorted(range(n), key=lambda v: (weights[v], v))
    w = [weights[v] for v in order]
    heap: list[tuple[float, tuple[int, ...]]] = [(w[0], (0,))]
    while heap:
        total, idxs = heapq.heappop(heap)
        yield total, tuple(sorted(order[i] for i in idxs))
        last = idxs[-1]
        if last + 1 < n:
            heapq.heappush(heap, (total + w[last + 1], idxs + (last + 1,)))
            heapq.heappush(
                heap, (total - w[last] + w[last + 1], idxs[:-1] + (last + 1,))
            )


# ---------------------------------------------------------------------------
# independent obstruction scans (degree-sequence based)


def _induces_c4(g: WeightedGraph, quad: tuple[int, ...]) -> bool:
    degs = [sum(1 for y in quad if y != x and g.has_edge(x, y)) for x in quad]
    return degs == [2, 2, 2, 2]


def _induces_gem(g: WeightedGraph, quint: tuple[int, ...]) -> bool:
    degs = sorted(
        sum(1 for y in quint if y != x and g.has_edge(x, y)) for x in quint
    )
    return degs == [2, 2, 3, 3, 4]


def c4_gem_obstructions(g: WeightedGraph) -> list[VertexSet]:
    """Every 4-set inducing a C4 and 5-set inducing a gem, by subset scan."""
    out = [q for q in itertools.combinations(range(g.n), 4) if _induces_c4(g, q)]
    out += [q for q in itertools.combinations(range(g.n), 5) if _induces_gem(g, q)]
    return sorted(out)


# ---------------------------------------------------------------------------
# exact solvers


def exact_ptolemaic_deletion(
    g: WeightedGraph, budget: OracleBudget = DEFAULT_BUDGET
) -> tuple[float, VertexSet]:
    """Minimum-weight S with G - S ptolemaic, by weight-ordered subset
    enumeration.  Ties resolve to the lexicographically smallest set."""
    if g.n > budget.max_graph_vertices:
        raise BudgetExceededError(
            f"{g.n} vertices exceeds oracle budget {budget.max_graph_vertices}"
        )
    deadline = _Deadline(budget.time_cap_s)
    obstructions = [sum(1 << v for v in obs) for obs in c4_gem_obstructions(g)]

    def feasible(mask: int, subset: tuple[int, ...]) -> bool:
        if any(not (mask & ob) for ob in obstructions):
            return False  # cheap necessary condition
        remainder, _ = g.delete(subset)
        return is_ptolemaic(remainder)[0]

    best: Optional[tuple[float, VertexSet]] = None
    for total, subset in _subsets_by_weight(g.weights):
        deadline.check()
        if best is not None and total > best[0] + 1e-9:
            break
        mask = sum(1 << v for v in subset)
        if feasible(mask, subset):
            if best is None or (total, subset) < best:
                best = (total, subset)
    assert best is not None, "deleting everything is always feasible"
    return best


def exact_c4gem_hitting(
    g: WeightedGraph, budget: OracleBudget = DEFAULT_BUDGET
) -> tuple[float, VertexSet]:
    """Minimum-weight vertex set meeting every induced C4 and gem."""
    if g.n > budget.max_graph_vertices:
        raise BudgetExceededError(
            f"{g.n} vertices exceeds oracle budget {budget.max_graph_vertices}"
        )
    deadline = _Deadline(budget.time_cap_s)
    obstructions = [sum(1 << v for v in obs) for obs in c4_gem_obstructions(g)]
    best: Optional[tuple[float, VertexSet]] = None
    for total, subset in _subsets_by_weight(g.weights):
        deadline.check()
        if best is not None and total > best[0] + 1e-9:
            break
        mask = sum(1 << v for v in subset)
        if all(mask & ob for ob in obstructions):
            if best is None or (total, subset) < best:
                best = (total, subset)
    assert best is not None
    return best


def _undirected_cycle(
    adj: list[list[int]], remaining: list[int]
) -> Optional[list[int]]:
    """Some cycle of the undirected graph restricted to ``remaining``, as a
    node list, or None.  Deterministic (sorted roots and adjacency)."""
    alive = set(remaining)
    parent: dict[int, Optional[int]] = {}

    def dfs(root: int) -> Optional[list[int]]:
        parent[root] = None
        stack = [(root, iter(adj[root]))]
        while stack:
            u, it = stack[-1]
            advanced = False
            for w in it:
                if w not in alive:
                    continue
                if w not in parent:
                    parent[w] = u
                    stack.append((w, iter(adj[w])))
                    advanced = True
                    break
                if w != parent[u]:
                    cycle = [u]
                    a = u
                    while a != w:
                        a = parent[a]
                        cycle.append(a)
                    return cycle
            if not advanced:
                stack.pop()
        return None

    for root in remaining:
        if root not in parent:
            got = dfs(root)
            if got:
                return got
    return None


def exact_fvsp(
    inst: FvspInstance, budget: OracleBudget = DEFAULT_BUDGET
) -> tuple[float, tuple[int, ...]]:
    """Minimum-weight downward-closed set with forest remainder.

    Branch and bound over cycle vertices: a remaining cycle must lose some
    vertex together with its descendant closure, so branching on the cycle's
    vertices covers every feasible solution; visited deletion sets are
    memoized and branches at or above the incumbent weight are cut.
    """
    if inst.n > budget.max_fvsp_nodes:
        raise BudgetExceededError(
            f"{inst.n} nodes exceeds oracle budget {budget.max_fvsp_nodes}"
        )
    if inst.topo_order is None:
        raise ValueError("oracle needs an acyclic digraph")
    deadline = _Deadline(budget.time_cap_s)
    und: list[list[int]] = [[] for _ in range(inst.n)]
    for u, v in inst.arcs:
        und[u].append(v)
        und[v].append(u)
    und = [sorted(ws) for ws in und]
    full = (1 << inst.n) - 1
    best: list = [float("inf"), None]
    seen: set[int] = set()

    def weight_of_mask(mask: int) -> float:
        return float(sum(inst.weights[v] for v in _bits_to_list(mask)))

    def rec(del_mask: int) -> None:
        if del_mask in seen:
            return
        seen.add(del_mask)
        deadline.check()
        w = weight_of_mask(del_mask)
        if w >= best[0] - 1e-12 and best[1] is not None:
            return
        remaining = [v for v in range(inst.n) if not (del_mask >> v) & 1]
        cycle = _undirected_cycle(und, remaining)
        if cycle is None:
            if w < best[0]:
                best[0] = w
                best[1] = del_mask
            return
        for v in sorted(cycle):
            rec(del_mask | inst.des_masks[v])

    rec(0)
    assert best[1] is not None
    return float(best[0]), tuple(_bits_to_list(best[1]))
