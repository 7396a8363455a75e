"""Feedback vertex set with precedence constraints (FVSP).

Instances are acyclic digraphs with nonnegative node weights in which, for
every node v, the subgraph induced by the ancestors of v (plus v) is an
in-tree rooted at v.  A feasible solution is a downward-closed node set whose
removal leaves an undirected forest; this module computes one of weight at
most 63 times the optimum.

The solver relaxes the problem to a linear program with a deletion variable
z_v per node and a pair of orientation variables per arc, then derandomizes a
threshold rounding: candidate thresholds are the arc breakpoints inside
[alpha, beta] plus midpoints, every candidate is rounded and cleaned up, and
the cheapest outcome wins.  After rounding, each remaining component contains
at most one cycle, which the cleanup stage breaks optimally.
"""

from __future__ import annotations

import math

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

import numpy as np
from scipy.optimize import linprog

from .graphs import _bits_to_list

PARAM_TOL = 2e-6  # admits published constants that round at the 6th decimal
STEP1_TOL = 1e-9
INTERVAL_TOL = 1e-12
LP_RESIDUAL_TOL = 1e-8


class FvspFormatError(ValueError):
    """Raised when an instance text file cannot be parsed."""


class LpSolveError(RuntimeError):
    """LP solver failed or returned an infeasible point."""


class StructureError(RuntimeError):
    """A structural invariant of the rounding pipeline was violated."""


@dataclass(frozen=True)
class FvspInstance:
    """Weighted digraph; acyclicity and the ancestor in-tree property are
    checked by validate_instance, not by the constructor."""

    n: int
    arcs: tuple[tuple[int, int], ...]
    weights: tuple[float, ...]

    def __init__(self, n: int, arcs: Iterable[tuple[int, int]], weights: Iterable[float]):
        arc_set = set()
        for u, v in arcs:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"arc ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-arc at node {u}")
            arc_set.add((u, v))
        w = tuple(float(x) for x in weights)
        if len(w) != n:
            raise ValueError("weights length must equal node count")
        if not all(math.isfinite(x) and x >= 0 for x in w):
            raise ValueError("node weights must be finite and nonnegative")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "arcs", tuple(sorted(arc_set)))
        object.__setattr__(self, "weights", w)

    @property
    def m(self) -> int:
        return len(self.arcs)

    @cached_property
    def out_adj(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.arcs:
            out[u].append(v)
        return tuple(tuple(sorted(vs)) for vs in out)

    @cached_property
    def in_adj(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.arcs:
            out[v].append(u)
        return tuple(tuple(sorted(us)) for us in out)

    @cached_property
    def topo_order(self) -> Optional[tuple[int, ...]]:
        """Topological order (smallest-id-first Kahn), or None if cyclic."""
        indeg = [len(self.in_adj[v]) for v in range(self.n)]
        ready = sorted((v for v in range(self.n) if indeg[v] == 0), reverse=True)
        order: list[int] = []
        while ready:
            v = ready.pop()
            order.append(v)
            for w in self.out_adj[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
            ready.sort(reverse=True)
        return tuple(order) if len(order) == self.n else None

    @cached_property
    def des_masks(self) -> tuple[int, ...]:
        """Bitmask of descendants including the node itself (acyclic only)."""
        order = self.topo_order
        assert order is not None, "descendant masks need an acyclic digraph"
        masks = [0] * self.n
        for v in reversed(order):
            m = 1 << v
            for w in self.out_adj[v]:
                m |= masks[w]
            masks[v] = m
        return tuple(masks)

    @cached_property
    def anc_masks(self) -> tuple[int, ...]:
        order = self.topo_order
        assert order is not None, "ancestor masks need an acyclic digraph"
        masks = [0] * self.n
        for v in order:
            m = 1 << v
            for u in self.in_adj[v]:
                m |= masks[u]
            masks[v] = m
        return tuple(masks)

    def descendants(self, v: int) -> frozenset[int]:
        return frozenset(_bits_to_list(self.des_masks[v]))

    def weight_of(self, nodes: Iterable[int]) -> float:
        return float(sum(self.weights[v] for v in sorted(nodes)))


@dataclass(frozen=True)
class InstanceViolation:
    kind: str  # "cycle" | "ancestors-not-in-tree"
    node: int

    def __str__(self) -> str:
        return f"{self.kind} at node {self.node}"


def validate_instance(inst: FvspInstance) -> Optional[InstanceViolation]:
    """None if the instance is a legal input (acyclic, every ancestor set an
    in-tree); otherwise the first violation found."""
    if inst.topo_order is None:
        in_order: set[int] = set()
        indeg = [len(inst.in_adj[v]) for v in range(inst.n)]
        ready = [v for v in range(inst.n) if indeg[v] == 0]
        while ready:
            v = ready.pop()
            in_order.add(v)
            for w in inst.out_adj[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
        witness = min(v for v in range(inst.n) if v not in in_order)
        return InstanceViolation("cycle", witness)
    child_masks = [0] * inst.n
    for u, v in inst.arcs:
        child_masks[u] |= 1 << v
    for v in range(inst.n):
        group = inst.anc_masks[v]
        for u in _bits_to_list(group):
            if u == v:
                continue
            if bin(child_masks[u] & group).count("1") != 1:
                return InstanceViolation("ancestors-not-in-tree", v)
    return None


# ---------------------------------------------------------------------------
# text format: `d <n> <m>`, `n <id> <weight>`, `a <u> <v>`, `#` comments


def parse_instance(text: str) -> FvspInstance:
    n = None
    m = None
    weights: dict[int, float] = {}
    arcs: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "d":
                if n is not None:
                    raise FvspFormatError(f"line {lineno}: duplicate header")
                n, m = int(parts[1]), int(parts[2])
            elif parts[0] == "n":
                if n is None:
                    raise FvspFormatError(f"line {lineno}: n before header")
                nid = int(parts[1])
                if not 0 <= nid < n:
                    raise FvspFormatError(f"line {lineno}: node {nid} out of range")
                weights[nid] = float(parts[2]) if len(parts) > 2 else 1.0
            elif parts[0] == "a":
                if n is None:
                    raise FvspFormatError(f"line {lineno}: a before header")
                arcs.append((int(parts[1]), int(parts[2])))
            else:
                raise FvspFormatError(f"line {lineno}: unknown record {parts[0]!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, FvspFormatError):
                raise
            raise FvspFormatError(f"line {lineno}: {raw!r}: {exc}") from exc
    if n is None:
        raise FvspFormatError("missing `d <n> <m>` header")
    if m is not None and m != len(arcs):
        raise FvspFormatError(f"header declares {m} arcs, file has {len(arcs)}")
    try:
        return FvspInstance(n, arcs, [weights.get(v, 1.0) for v in range(n)])
    except ValueError as exc:
        raise FvspFormatError(str(exc)) from exc


def format_instance(inst: FvspInstance) -> str:
    lines = [f"d {inst.n} {inst.m}"]
    lines += [f"n {v} {inst.weights[v]!r}" for v in range(inst.n)]
    lines += [f"a {u} {v}" for u, v in inst.arcs]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# rounding parameters


@dataclass(frozen=True)
class RoundingParams:
    """Threshold-rounding parameters.

    Constraints (checked with a small slack so that constants published to
    six decimals remain admissible):
        2*alpha >= 1 + epsilon
        3*(1 - beta) >= 1 + 8*epsilon
        0 < epsilon, alpha < beta < 1
    """

    epsilon: float = 0.0293258
    alpha: float = 0.514663
    beta: float = 0.588465

    def __post_init__(self):
        if not (0 < self.epsilon < 1 and 0 < self.alpha < 1 and 0 < self.beta < 1):
            raise ValueError("rounding parameters must lie in (0, 1)")
        if not self.alpha < self.beta:
            raise ValueError(f"alpha < beta violated: {self.alpha} >= {self.beta}")
        if 2 * self.alpha - (1 + self.epsilon) < -PARAM_TOL:
            raise ValueError(
                f"2*alpha >= 1 + epsilon violated: 2*{self.alpha} < 1 + {self.epsilon}"
            )
        if 3 * (1 - self.beta) - (1 + 8 * self.epsilon) < -PARAM_TOL:
            raise ValueError(
                f"3*(1-beta) >= 1 + 8*epsilon violated: "
                f"3*(1-{self.beta}) < 1 + 8*{self.epsilon}"
            )

    @property
    def ratio_bound(self) -> float:
        """Guaranteed approximation factor 1/eps + 2/(beta-alpha) + 1."""
        return 1.0 / self.epsilon + 2.0 / (self.beta - self.alpha) + 1.0


DEFAULT_PARAMS = RoundingParams()


# ---------------------------------------------------------------------------
# LP model


@dataclass(frozen=True)
class LpModel:
    """Variables: z_0..z_{n-1}, then (tail, head) orientation pair per arc."""

    inst: FvspInstance
    c: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    a_ub: np.ndarray
    b_ub: np.ndarray

    @property
    def n_vars(self) -> int:
        return len(self.c)

    def x_tail(self, arc_idx: int) -> int:
        return self.inst.n + 2 * arc_idx

    def x_head(self, arc_idx: int) -> int:
        return self.inst.n + 2 * arc_idx + 1


def build_lp(inst: FvspInstance) -> LpModel:
    """LP relaxation: per arc e=(u,v) an equality z_v + x_ue + x_ve = 1, per
    node a capacity z_v + sum of its incident x_ve <= 1, per arc the
    precedence z_u <= z_v, everything boxed to [0, 1]."""
    n, m = inst.n, inst.m
    nv = n + 2 * m
    c = np.zeros(nv)
    c[:n] = inst.weights
    a_eq = np.zeros((m, nv))
    b_eq = np.ones(m)
    a_ub = np.zeros((n + m, nv))
    b_ub = np.ones(n + m)
    for j, (u, v) in enumerate(inst.arcs):
        a_eq[j, v] = 1.0
        a_eq[j, n + 2 * j] = 1.0
        a_eq[j, n + 2 * j + 1] = 1.0
        a_ub[u, n + 2 * j] += 1.0
        a_ub[v, n + 2 * j + 1] += 1.0
        # precedence row: z_u - z_v <= 0
        a_ub[n + j, u] = 1.0
        a_ub[n + j, v] = -1.0
        b_ub[n + j] = 0.0
    for v in range(n):
        a_ub[v, v] = 1.0
    return LpModel(inst=inst, c=c, a_eq=a_eq, b_eq=b_eq, a_ub=a_ub, b_ub=b_ub)


@dataclass(frozen=True)
class FvspLpSolution:
    """Optimal fractional deletion/orientation values.

    ``x[j]`` holds the (tail, head) values of arc j.
    """

    z: tuple[float, ...]
    x: tuple[tuple[float, float], ...]
    objective: float
    max_residual: float

    def x_head(self, j: int) -> float:
        return self.x[j][1]

    def x_tail(self, j: int) -> float:
        return self.x[j][0]


def solve_lp(model: LpModel) -> FvspLpSolution:
    """Solve to optimality with the HiGHS backend; deterministic for a fixed
    model.  Raises LpSolveError on solver failure or residuals above 1e-8
    (the instance itself is always feasible: all-z=1 works)."""
    inst = model.inst
    if model.n_vars == 0:
        return FvspLpSolution(z=(), x=(), objective=0.0, max_residual=0.0)
    res = linprog(
        model.c,
        A_ub=model.a_ub if len(model.a_ub) else None,
        b_ub=model.b_ub if len(model.b_ub) else None,
        A_eq=model.a_eq if len(model.a_eq) else None,
        b_eq=model.b_eq if len(model.b_eq) else None,
        bounds=(0.0, 1.0),
        method="highs",
    )
    if not res.success:
        raise LpSolveError(f"LP solve failed: {res.message}")
    sol = np.clip(res.x, 0.0, 1.0)
    resid = 0.0
    if len(model.a_eq):
        resid = max(resid, float(np.max(np.abs(model.a_eq @ res.x - model.b_eq))))
    if len(model.a_ub):
        resid = max(resid, float(np.max(model.a_ub @ res.x - model.b_ub)))
    resid = max(resid, float(np.max(-res.x)), float(np.max(res.x - 1.0)))
    if resid > LP_RESIDUAL_TOL:
        raise LpSolveError(f"LP residual {resid:.3e} exceeds {LP_RESIDUAL_TOL:.0e}")
    z = tuple(float(sol[v]) for v in range(inst.n))
    x = tuple(
        (float(sol[model.x_tail(j)]), float(sol[model.x_head(j)]))
        for j in range(inst.m)
    )
    return FvspLpSolution(
        z=z, x=x, objective=float(res.fun), max_residual=resid
    )


# ---------------------------------------------------------------------------
# rounding


@dataclass(frozen=True)
class RoundingOutcome:
    """Result of rounding at one threshold.

    ``step1``: nodes with z above the deletion cutoff; ``step3``: additional
    nodes removed by arc firings (descendant closures); ``pointers`` maps a
    node to the arc indices it points to; ``fired_arcs`` are the arcs whose
    deletion interval contained theta.
    """

    step1: frozenset[int]
    step3: frozenset[int]
    pointers: dict[int, frozenset[int]]
    fired_arcs: frozenset[int]

    @property
    def deleted(self) -> frozenset[int]:
        return self.step1 | self.step3


def round_at(
    inst: FvspInstance,
    lp: FvspLpSolution,
    params: RoundingParams,
    theta: float,
) -> RoundingOutcome:
    """One pass of the threshold rounding at a fixed theta.

    Nodes with z_v >= epsilon go first (downward-closed by the precedence
    constraint).  Every arc between surviving endpoints is then examined
    against the original LP values: if theta falls in the arc's closed
    deletion interval the head and all its descendants are removed (deletion
    wins at breakpoints); otherwise each endpoint whose threshold is strictly
    exceeded points to the arc.
    """
    eps = params.epsilon
    step1_mask = 0
    for v in range(inst.n):
        if lp.z[v] >= eps - STEP1_TOL:
            # precedence makes descendants pass the threshold too, but close
            # explicitly so LP residuals can never break downward closure
            step1_mask |= inst.des_masks[v]
    step3_mask = 0
    pointers: dict[int, set[int]] = {}
    fired: set[int] = set()
    for j, (u, v) in enumerate(inst.arcs):
        if (step1_mask >> u) & 1 or (step1_mask >> v) & 1:
            continue
        xbar_v = 1.0 - lp.x_head(j)
        y = lp.z[v] - lp.z[u]
        if xbar_v - y - INTERVAL_TOL <= theta <= xbar_v + INTERVAL_TOL:
            fired.add(j)
            step3_mask |= inst.des_masks[v]
            continue
        if theta > xbar_v:
            pointers.setdefault(v, set()).add(j)
        if theta > 1.0 - lp.x_tail(j):
            pointers.setdefault(u, set()).add(j)
    step3_mask &= ~step1_mask
    return RoundingOutcome(
        step1=frozenset(_bits_to_list(step1_mask)),
        step3=frozenset(_bits_to_list(step3_mask)),
        pointers={v: frozenset(js) for v, js in pointers.items()},
        fired_arcs=frozenset(fired),
    )


def theta_candidates(
    inst: FvspInstance, lp: FvspLpSolution, params: RoundingParams
) -> tuple[float, ...]:
    """Breakpoints of the rounding inside [alpha, beta] plus midpoints of
    consecutive ones; at most 6m + 3 values."""
    lo, hi = params.alpha, params.beta
    breaks = {lo, hi}
    for j, (u, v) in enumerate(inst.arcs):
        xbar_v = 1.0 - lp.x_head(j)
        y = lp.z[v] - lp.z[u]
        for val in (xbar_v, xbar_v - y, 1.0 - lp.x_tail(j)):
            if lo <= val <= hi:
                breaks.add(val)
    ordered = sorted(breaks)
    mids = [
        (a + b) / 2.0 for a, b in zip(ordered, ordered[1:]) if a != b
    ]
    return tuple(sorted(set(ordered + mids)))


def cleanup_unicyclic(
    inst: FvspInstance, remaining: Iterable[int]
) -> frozenset[int]:
    """Break the single cycle of every remaining component optimally.

    For each component that still contains a cycle, the cycle vertex whose
    remaining descendant closure is lightest (ties to the smallest id) is
    removed together with that closure.  A component with two or more
    independent cycles trips StructureError: the rounding stage must not
    produce one.
    """
    rem = sorted(set(remaining))
    rem_mask = 0
    for v in rem:
        rem_mask |= 1 << v
    und: dict[int, list[int]] = {v: [] for v in rem}
    n_edges_in: dict[int, int] = {}
    comp_of: dict[int, int] = {}
    for u, v in inst.arcs:
        if (rem_mask >> u) & 1 and (rem_mask >> v) & 1:
            und[u].append(v)
            und[v].append(u)
    comp_id = 0
    for s in rem:
        if s in comp_of:
            continue
        stack = [s]
        comp_of[s] = comp_id
        members = [s]
        while stack:
            a = stack.pop()
            for b in und[a]:
                if b not in comp_of:
                    comp_of[b] = comp_id
                    members.append(b)
                    stack.append(b)
        comp_id += 1
    comps: list[list[int]] = [[] for _ in range(comp_id)]
    for v in rem:
        comps[comp_of[v]].append(v)
    for u, v in inst.arcs:
        if (rem_mask >> u) & 1 and (rem_mask >> v) & 1:
            n_edges_in[comp_of[u]] = n_edges_in.get(comp_of[u], 0) + 1

    removed_mask = 0
    for cid, members in enumerate(comps):
        m_c = n_edges_in.get(cid, 0)
        n_c = len(members)
        if m_c < n_c:
            continue  # already a tree
        if m_c > n_c:
            raise StructureError(
                f"remainder component with {n_c} nodes and {m_c} edges has "
                "more than one cycle; rounding bug"
            )
        # peel leaves: what survives is exactly the unique cycle
        deg = {v: len([w for w in und[v] if comp_of[w] == cid]) for v in members}
        alive = set(members)
        frontier = [v for v in members if deg[v] <= 1]
        while frontier:
            v = frontier.pop()
            if v not in alive:
                continue
            alive.discard(v)
            for w in und[v]:
                if w in alive:
                    deg[w] -= 1
                    if deg[w] <= 1:
                        frontier.append(w)
        assert alive, "unicyclic component must have a nonempty 2-core"
        best_v = None
        best_w = None
        for v in sorted(alive):
            wv = sum(
                inst.weights[d] for d in _bits_to_list(inst.des_masks[v] & rem_mask)
            )
            if best_w is None or wv < best_w - 1e-15:
                best_v, best_w = v, wv
        removed_mask |= inst.des_masks[best_v] & rem_mask
    return frozenset(_bits_to_list(removed_mask))


@dataclass(frozen=True)
class RoundedSolution:
    theta: float
    step1: frozenset[int]
    step3: frozenset[int]
    cleanup: frozenset[int]

    @property
    def deleted(self) -> frozenset[int]:
        return self.step1 | self.step3 | self.cleanup


def derandomize(
    inst: FvspInstance, lp: FvspLpSolution, params: RoundingParams
) -> RoundedSolution:
    """Evaluate rounding plus cleanup at every candidate threshold; return
    the outcome of minimum weight (ties: lexicographically smallest deleted
    set, then smallest theta)."""
    best: Optional[tuple[float, tuple[int, ...], float, RoundedSolution]] = None
    all_nodes = set(range(inst.n))
    for theta in theta_candidates(inst, lp, params):
        outcome = round_at(inst, lp, params, theta)
        remaining = all_nodes - outcome.deleted
        extra = cleanup_unicyclic(inst, remaining)
        rs = RoundedSolution(
            theta=theta,
            step1=outcome.step1,
            step3=outcome.step3,
            cleanup=extra,
        )
        total = tuple(sorted(rs.deleted))
        weight = inst.weight_of(total)
        key = (weight, total, theta)
        if best is None or key < best[:3]:
            best = (weight, total, theta, rs)
    assert best is not None
    return best[3]


# ---------------------------------------------------------------------------
# end-to-end solve and verification


@dataclass(frozen=True)
class FvspSolution:
    deleted: tuple[int, ...]
    weight: float
    theta: float
    stage_weights: dict[str, float]
    lp_value: float


@dataclass(frozen=True)
class FvspViolation:
    kind: str  # "not-downward-closed" | "cycle"
    detail: tuple

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


def verify_fvsp_solution(
    inst: FvspInstance, deleted: Iterable[int]
) -> Optional[FvspViolation]:
    """Check downward closure and that the remainder's underlying graph is a
    forest; None when feasible, else the first violation."""
    sel = set(deleted)
    for v in sorted(sel):
        for c in inst.out_adj[v]:
            if c not in sel:
                return FvspViolation("not-downward-closed", (v, c))
    parent = list(range(inst.n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in inst.arcs:
        if u in sel or v in sel:
            continue
        ru, rv = find(u), find(v)
        if ru == rv:
            return FvspViolation("cycle", (u, v))
        parent[ru] = rv
    return None


def solve_fvsp(
    inst: FvspInstance, params: RoundingParams = DEFAULT_PARAMS
) -> FvspSolution:
    """Full pipeline: validate, solve the LP, derandomize the rounding, and
    verify the output.  The result is downward-closed, leaves a forest, and
    weighs at most (1/eps + 2/(beta-alpha) + 1) times the optimum."""
    violation = validate_instance(inst)
    if violation is not None:
        raise StructureError(f"invalid instance: {violation}")
    if inst.n == 0:
        return FvspSolution(
            deleted=(),
            weight=0.0,
            theta=params.alpha,
            stage_weights={"step1": 0.0, "step3": 0.0, "cleanup": 0.0},
            lp_value=0.0,
        )
    lp = solve_lp(build_lp(inst))
    rs = derandomize(inst, lp, params)
    deleted = tuple(sorted(rs.deleted))
    bad = verify_fvsp_solution(inst, deleted)
    if bad is not None:
        raise StructureError(f"rounded solution infeasible: {bad}")
    return FvspSolution(
        deleted=deleted,
        weight=inst.weight_of(deleted),
        theta=rs.theta,
        stage_weights={
            "step1": inst.weight_of(rs.step1),
            "step3": inst.weight_of(rs.step3),
            "cleanup": inst.weight_of(rs.cleanup),
        },
        lp_value=lp.objective,
    )


def solution_to_json(sol: FvspSolution) -> dict:
    return {
        "deleted": list(sol.deleted),
        "weight": sol.weight,
        "theta": sol.theta,
        "stages": {
            "step1": sol.stage_weights["step1"],
            "step3": sol.stage_weights["step3"],
            "cleanup": sol.stage_weights["cleanup"],
        },
    }
