"""Undirected vertex-weighted graphs and the recognizers the pipeline needs.

Vertices are dense integers ``0..n-1``.  Adjacency is stored both as
frozensets (for readable code) and as int bitmasks (for the subset-heavy
detectors).  All graphs are immutable after construction; every operation in
this module is a pure function of its inputs.

Obstruction terminology: a *hole* is an induced cycle of length >= 4, a *gem*
is an induced path on four vertices plus a fifth vertex adjacent to all four.
A graph is ptolemaic exactly when it is chordal (hole-free) and gem-free.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Optional

VertexSet = tuple[int, ...]


class GraphFormatError(ValueError):
    """Raised when a graph text file cannot be parsed."""


class CliqueGuardError(RuntimeError):
    """Raised when maximal-clique enumeration exceeds its declared guard."""


def vset(vertices: Iterable[int]) -> VertexSet:
    """Canonical vertex set: sorted, duplicate-free tuple."""
    return tuple(sorted(set(vertices)))


class WeightedGraph:
    """Simple undirected graph with nonnegative per-vertex weights."""

    __slots__ = ("n", "edges", "weights", "adj", "adj_bits")

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]],
        weights: Optional[Iterable[float]] = None,
    ):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        self.n = n
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            seen.add((min(u, v), max(u, v)))
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(seen))
        if weights is None:
            w = (1.0,) * n
        else:
            w = tuple(float(x) for x in weights)
            if len(w) != n:
                raise ValueError("weights length must equal vertex count")
            if not all(math.isfinite(x) and x >= 0 for x in w):
                raise ValueError("vertex weights must be finite and nonnegative")
        self.weights: tuple[float, ...] = w
        nbr: list[set[int]] = [set() for _ in range(n)]
        bits = [0] * n
        for u, v in self.edges:
            nbr[u].add(v)
            nbr[v].add(u)
            bits[u] |= 1 << v
            bits[v] |= 1 << u
        self.adj: tuple[frozenset[int], ...] = tuple(frozenset(s) for s in nbr)
        self.adj_bits: tuple[int, ...] = tuple(bits)

    @property
    def m(self) -> int:
        return len(self.edges)

    def vertices(self) -> range:
        return range(self.n)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def closed_bits(self, v: int) -> int:
        return self.adj_bits[v] | (1 << v)

    def weight_of(self, vertices: Iterable[int]) -> float:
        return float(sum(self.weights[v] for v in vertices))

    def total_weight(self) -> float:
        return float(sum(self.weights))

    def induced(self, keep: Iterable[int]) -> tuple["WeightedGraph", VertexSet]:
        """Induced subgraph on ``keep``; returns it plus the old ids of its
        vertices (new id i corresponds to old id ``mapping[i]``)."""
        old = vset(keep)
        pos = {v: i for i, v in enumerate(old)}
        edges = [
            (pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos
        ]
        sub = WeightedGraph(len(old), edges, [self.weights[v] for v in old])
        return sub, old

    def delete(self, remove: Iterable[int]) -> tuple["WeightedGraph", VertexSet]:
        gone = set(remove)
        return self.induced(v for v in range(self.n) if v not in gone)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.edges == other.edges
            and self.weights == other.weights
        )

    def __hash__(self) -> int:
        return hash((self.n, self.edges, self.weights))

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, m={self.m})"


# ---------------------------------------------------------------------------
# text format: `p <n> <m>`, optional `v <id> [<weight>]`, `e <u> <v>`, `#` comments


def parse_graph(text: str) -> WeightedGraph:
    """Parse the graph text format used by the CLI.

    Vertices without a ``v`` line default to weight 1.0.
    """
    n = None
    m = None
    weights: dict[int, float] = {}
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "p":
                if n is not None:
                    raise GraphFormatError(f"line {lineno}: duplicate header")
                n, m = int(parts[1]), int(parts[2])
            elif parts[0] == "v":
                if n is None:
                    raise GraphFormatError(f"line {lineno}: v before header")
                vid = int(parts[1])
                w = float(parts[2]) if len(parts) > 2 else 1.0
                if not 0 <= vid < n:
                    raise GraphFormatError(f"line {lineno}: vertex {vid} out of range")
                weights[vid] = w
            elif parts[0] == "e":
                if n is None:
                    raise GraphFormatError(f"line {lineno}: e before header")
                edges.append((int(parts[1]), int(parts[2])))
            else:
                raise GraphFormatError(f"line {lineno}: unknown record {parts[0]!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, GraphFormatError):
                raise
            raise GraphFormatError(f"line {lineno}: {raw!r}: {exc}") from exc
    if n is None:
        raise GraphFormatError("missing `p <n> <m>` header")
    if m is not None and m != len(edges):
        raise GraphFormatError(f"header declares {m} edges, file has {len(edges)}")
    try:
        return WeightedGraph(n, edges, [weights.get(v, 1.0) for v in range(n)])
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc


def format_graph(g: WeightedGraph) -> str:
    lines = [f"p {g.n} {g.m}"]
    lines += [f"v {v} {g.weights[v]!r}" for v in range(g.n)]
    lines += [f"e {u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# induced C4 / gem detection


def _c4_candidates(g: WeightedGraph):
    # A C4 is a non-adjacent pair {b, d} plus a non-adjacent pair of their
    # common neighbors; each square is seen from both diagonals.
    for b in range(g.n):
        for d in range(b + 1, g.n):
            if g.has_edge(b, d):
                continue
            common = g.adj_bits[b] & g.adj_bits[d]
            if bin(common).count("1") < 2:
                continue
            members = _bits_to_list(common)
            for i, a in enumerate(members):
                for c in members[i + 1 :]:
                    if not g.has_edge(a, c):
                        yield vset((a, b, c, d))


def find_induced_c4(g: WeightedGraph) -> Optional[VertexSet]:
    """First induced 4-cycle as a sorted vertex set, or None."""
    for quad in _c4_candidates(g):
        return quad
    return None


def all_induced_c4(g: WeightedGraph) -> list[VertexSet]:
    """Every vertex set inducing a C4, deduplicated and sorted."""
    return sorted(set(_c4_candidates(g)))


def _is_induced_p4(g: WeightedGraph, quad: tuple[int, ...]) -> bool:
    degs = []
    cnt = 0
    for x in quad:
        d = sum(1 for y in quad if y != x and g.has_edge(x, y))
        degs.append(d)
        cnt += d
    return cnt == 6 and sorted(degs) == [1, 1, 2, 2]


def _gem_candidates(g: WeightedGraph):
    # The apex of a gem is its unique degree-4 vertex, so anchoring the scan
    # at the apex enumerates each gem exactly once.
    for apex in range(g.n):
        nbrs = sorted(g.adj[apex])
        if len(nbrs) < 4:
            continue
        for quad in itertools.combinations(nbrs, 4):
            if _is_induced_p4(g, quad):
                yield vset(quad + (apex,))


def find_induced_gem(g: WeightedGraph) -> Optional[VertexSet]:
    """First induced gem as a sorted vertex set, or None."""
    for quint in _gem_candidates(g):
        return quint
    return None


def all_induced_gems(g: WeightedGraph) -> list[VertexSet]:
    return sorted(set(_gem_candidates(g)))


# ---------------------------------------------------------------------------
# chordality via lexicographic BFS, hole certificates by bounded search


def lexbfs_order(g: WeightedGraph) -> list[int]:
    """Lexicographic BFS visit order (ties broken by smallest id)."""
    labels: list[list[int]] = [[] for _ in range(g.n)]
    visited = [False] * g.n
    order: list[int] = []
    for step in range(g.n, 0, -1):
        best = -1
        for v in range(g.n):
            if not visited[v] and (best < 0 or labels[v] > labels[best]):
                best = v
        visited[best] = True
        order.append(best)
        for u in g.adj[best]:
            if not visited[u]:
                labels[u].append(step)
    return order


def _peo_from_lexbfs(g: WeightedGraph, order: list[int]) -> bool:
    # Reverse visit order is a perfect elimination ordering iff for each v the
    # earlier neighbors minus the latest one are all adjacent to that one.
    pos = {v: i for i, v in enumerate(order)}
    for v in order:
        earlier = [u for u in g.adj[v] if pos[u] < pos[v]]
        if not earlier:
            continue
        u = max(earlier, key=lambda w: pos[w])
        for w in earlier:
            if w != u and not g.has_edge(u, w):
                return False
    return True


def is_chordal(g: WeightedGraph) -> bool:
    return _peo_from_lexbfs(g, lexbfs_order(g))


def _hole_dfs(g: WeightedGraph, s: int, length: int) -> Optional[VertexSet]:
    bits = g.adj_bits
    stack: list[int] = [s]
    in_path = 1 << s

    def extend() -> Optional[VertexSet]:
        nonlocal in_path
        last = stack[-1]
        depth = len(stack)
        closing = depth == length - 1
        internal = 0
        for x in stack[1:-1]:
            internal |= 1 << x
        for w in _bits_to_list(bits[last]):
            if w <= s or (in_path >> w) & 1:
                continue
            if bits[w] & internal:
                continue  # chord to an internal path vertex
            adj_root = (bits[w] >> s) & 1
            if closing:
                if adj_root and stack[1] < w:
                    return tuple(stack) + (w,)
                continue
            if depth >= 2 and adj_root:
                continue  # premature chord back to the root
            stack.append(w)
            in_path |= 1 << w
            got = extend()
            stack.pop()
            in_path ^= 1 << w
            if got:
                return got
        return None

    return extend()


def _shortest_hole(g: WeightedGraph) -> Optional[VertexSet]:
    # Exhaustive search over induced cycles by increasing length.  Each cycle
    # is rooted at its minimum vertex with the smaller second vertex first,
    # so every hole is visited once.  Desk-scale inputs only.
    for length in range(4, g.n + 1):
        for s in range(g.n):
            found = _hole_dfs(g, s, length)
            if found:
                return found
    return None


def find_hole(g: WeightedGraph) -> Optional[VertexSet]:
    """Vertex sequence of some induced cycle of length >= 4, or None iff
    the graph is chordal."""
    if is_chordal(g):
        return None
    hole = _shortest_hole(g)
    assert hole is not None, "elimination check and hole search disagree"
    return hole


def is_ptolemaic(g: WeightedGraph) -> tuple[bool, Optional[VertexSet]]:
    """Ptolemaic = chordal and gem-free.  Returns (flag, obstruction)."""
    hole = find_hole(g)
    if hole is not None:
        return False, hole
    gem = find_induced_gem(g)
    if gem is not None:
        return False, gem
    return True, None


# ---------------------------------------------------------------------------
# twin classes and maximal cliques


def twin_classes(g: WeightedGraph) -> list[VertexSet]:
    """Partition of V into maximal groups with identical closed
    neighborhoods (true twin classes)."""
    groups: dict[int, list[int]] = {}
    for v in range(g.n):
        groups.setdefault(g.closed_bits(v), []).append(v)
    return sorted(vset(vs) for vs in groups.values())


def maximal_cliques(
    g: WeightedGraph, *, c4_free: bool = False, guard: Optional[int] = None
) -> list[VertexSet]:
    """All inclusion-maximal cliques, canonically sorted.

    When the caller declares the graph C4-free, the count is guarded by the
    n^2 bound; exceeding the guard raises CliqueGuardError (the declaration
    was wrong).
    """
    limit = guard
    if limit is None and c4_free:
        limit = g.n * g.n + 1
    out: list[int] = []
    bits = g.adj_bits
    full = (1 << g.n) - 1

    def expand(r: int, p: int, x: int) -> None:
        if p == 0 and x == 0:
            out.append(r)
            if limit is not None and len(out) >= limit:
                raise CliqueGuardError(
                    f"more than {limit - 1} maximal cliques on {g.n} vertices; "
                    "input is not C4-free"
                )
            return
        pool = p | x
        pivot = max(_bits_to_list(pool), key=lambda u: bin(p & bits[u]).count("1"))
        cand = p & ~bits[pivot]
        for v in _bits_to_list(cand):
            vb = 1 << v
            expand(r | vb, p & bits[v], x & bits[v])
            p &= ~vb
            x |= vb

    if g.n:
        expand(0, full, 0)
    return sorted(tuple(_bits_to_list(mask)) for mask in out)


def _bits_to_list(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out
