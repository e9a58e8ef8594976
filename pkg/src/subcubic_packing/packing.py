"""Packing colorings: validation, maximum i-packings and an exact decision solver.

A coloring ``c`` is a packing coloring when ``c(u) == c(v) == i`` forces
``d(u, v) > i``. Colors are positive integers; ``colors[v]`` is the color of
vertex ``v``.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .graph import (
    UNREACHABLE,
    DisconnectedGraphError,
    Graph,
    GraphError,
    all_pairs_distances,
    bfs_distances,
    power_graph,
)

DEFAULT_TIME_LIMIT = 300.0


class PartialColoringError(GraphError):
    """Raised when a coloring leaves some vertex uncolored (or uses a non-positive color)."""


class SolverTimeout(RuntimeError):
    """Exact search hit a limit before settling the question."""

    def __init__(self, message: str, lower: int, upper: int | None, nodes: int):
        super().__init__(message)
        self.lower = lower
        self.upper = upper
        self.nodes = nodes


@dataclass(frozen=True)
class PackingColoring:
    colors: tuple[int, ...]

    @classmethod
    def of(cls, colors: Sequence[int] | Mapping[int, int], n: int | None = None) -> "PackingColoring":
        if isinstance(colors, Mapping):
            size = n if n is not None else (max(colors) + 1 if colors else 0)
            missing = [v for v in range(size) if v not in colors]
            if missing:
                raise PartialColoringError(f"vertices {missing[:5]} are uncolored")
            colors = [colors[v] for v in range(size)]
        return cls(tuple(int(c) for c in colors))

    @property
    def palette_size(self) -> int:
        return max(self.colors, default=0)

    def color_class(self, i: int) -> list[int]:
        return [v for v, c in enumerate(self.colors) if c == i]

    def to_list(self) -> list[int]:
        return list(self.colors)


class Validation(NamedTuple):
    valid: bool
    violations: list[tuple[int, int, int]]

    def __bool__(self) -> bool:
        return self.valid


def validate_packing_coloring(g: Graph, coloring: PackingColoring | Sequence[int]) -> Validation:
    """Check every color class; returns all violating triples ``(u, v, i)`` with ``u < v``."""
    colors = coloring.colors if isinstance(coloring, PackingColoring) else tuple(coloring)
    if len(colors) != g.n or any(c is None or c < 1 for c in colors):
        raise PartialColoringError("coloring must assign a positive color to every vertex")
    violations = []
    for u, i in enumerate(colors):
        # BFS limited to radius i finds every same-colored vertex that is too close
        seen = {u}
        frontier = [u]
        for _ in range(i):
            nxt = []
            for x in frontier:
                for y in g.adjacency[x]:
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            if not nxt:
                break
            frontier = nxt
        violations.extend((u, v, i) for v in sorted(seen) if v > u and colors[v] == i)
    return Validation(not violations, violations)


# --- maximum i-packings -----------------------------------------------------


class PackingResult(NamedTuple):
    size: int
    witness: tuple[int, ...]
    maximum_sets: list[tuple[int, ...]] | None


def max_i_packing(g: Graph, i: int, enumerate: bool = False) -> PackingResult:
    """Largest set with pairwise distance ``> i``: a maximum independent set of ``g^i``.

    With ``enumerate`` every maximum set is returned, sorted lexicographically.
    """
    if i < 1:
        raise GraphError("i must be a positive integer")
    if g.n == 0:
        return PackingResult(0, (), [()] if enumerate else None)
    p = power_graph(g, i)
    adj = [_mask(row) for row in p.adjacency]
    best, sets = _max_independent_sets(adj, g.n, enumerate)
    found = sorted(tuple(_bits(s)) for s in sets)
    return PackingResult(best, found[0], found if enumerate else None)


def _mask(vs) -> int:
    m = 0
    for v in vs:
        m |= 1 << v
    return m


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _clique_cover_bound(cand: int, adj: list[int]) -> int:
    """Number of cliques in a greedy clique cover of ``cand``; bounds any independent subset."""
    cliques = 0
    while cand:
        low = cand & -cand
        v = low.bit_length() - 1
        cand ^= low
        common = cand & adj[v]
        while common:
            lw = common & -common
            u = lw.bit_length() - 1
            cand ^= lw
            common &= adj[u]
            common &= ~lw
        cliques += 1
    return cliques


def _max_independent_sets(adj: list[int], n: int, enumerate: bool) -> tuple[int, list[int]]:
    best = 0
    found: list[int] = []

    def expand(cand: int, chosen: int, size: int) -> None:
        nonlocal best, found
        if not cand:
            if size > best:
                best, found = size, [chosen]
            elif size == best and (enumerate or not found):
                found.append(chosen)
            return
        bound = size + _clique_cover_bound(cand, adj)
        if bound < best or (bound == best and not enumerate and found):
            return
        # branch on the candidate with most candidate neighbours
        v = max(_bits(cand), key=lambda x: (bin(adj[x] & cand).count("1"), -x))
        bit = 1 << v
        expand(cand & ~adj[v] & ~bit, chosen | bit, size + 1)
        expand(cand & ~bit, chosen, size)

    expand((1 << n) - 1, 0, 0)
    return best, found


def packing_numbers(g: Graph, up_to: int) -> list[int]:
    """``[alpha_1, ..., alpha_up_to]``; values for ``i >= diam`` are 1 without search."""
    diam = _diameter_of(g)
    out = []
    for i in range(1, up_to + 1):
        out.append(1 if i >= diam and g.n else max_i_packing(g, i).size)
    return out


def _diameter_of(g: Graph) -> int:
    dm = all_pairs_distances(g)
    if dm.disconnected:
        raise DisconnectedGraphError("graph is disconnected")
    return dm.diameter


# --- counting bound ---------------------------------------------------------


class CountingVerdict(NamedTuple):
    refuted: bool
    capacities: list[int]
    total: int
    n: int


def counting_lower_bound(g: Graph, k: int) -> CountingVerdict:
    """Refutes ``k`` colors when the class-size ceilings cannot add up to ``|V|``."""
    caps = packing_numbers(g, k)
    total = sum(caps)
    return CountingVerdict(total < g.n, caps, total, g.n)


# --- exact decision solver --------------------------------------------------


class Status(str, enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    TIMEOUT = "TIMEOUT"


@dataclass(frozen=True)
class SolverConfig:
    """Search limits and pruning switches.

    ``forward_check`` (P1) clears a color from the domains of all vertices
    within that distance as soon as it is placed; switched off, conflicts are
    only caught when a vertex is colored. ``use_singleton_rule`` (P2) lets
    only the smallest unused color ``>= diam`` open a new class.
    ``use_packing_size_bounds`` (P3) prunes when the uncolored vertices
    outnumber the remaining class capacities: ``alpha_i`` minus the class
    size so far, further capped (under P1) by how many uncolored vertices
    can still take color ``i``. ``ordering`` is
    ``"power2-degree"`` (static) or ``"min-domain"`` (dynamic).
    """

    time_limit: float = DEFAULT_TIME_LIMIT
    node_limit: int = 10**9
    ordering: str = "min-domain"
    forward_check: bool = True
    use_singleton_rule: bool = True
    use_packing_size_bounds: bool = True

    def __post_init__(self) -> None:
        if self.time_limit <= 0 or self.node_limit <= 0:
            raise ValueError("solver limits must be positive")
        if self.ordering not in ("power2-degree", "min-domain"):
            raise ValueError(f"unknown ordering {self.ordering!r}")


@dataclass
class SolveResult:
    status: Status
    k: int
    witness: PackingColoring | None = None
    nodes: int = 0
    elapsed: float = 0.0
    config: SolverConfig = field(default_factory=SolverConfig)


def branching_order(g: Graph) -> list[int]:
    """Vertices by descending degree in the square of ``g``, ties by id."""
    sq = power_graph(g, 2)
    return sorted(range(g.n), key=lambda v: (-sq.degree(v), v))


class _Search:
    def __init__(self, g: Graph, k: int, cfg: SolverConfig, dist: np.ndarray, diam: int,
                 capacities: list[int] | None):
        self.n = g.n
        self.k = k
        self.cfg = cfg
        self.diam = diam
        self.capacities = capacities
        self.order = branching_order(g)
        full = (1 << (k + 1)) - 2  # colors 1..k
        self.domain = [full] * g.n
        self.colors = [0] * g.n
        self.used = [0] * (k + 1)
        # holders[c]: uncolored vertices whose domain still contains c
        self.holders = [0] + [g.n] * k
        self.track = cfg.forward_check and cfg.use_packing_size_bounds
        # near[c][u]: vertices other than u at distance <= c (for c < diam)
        dl = dist.tolist()
        top = min(k, max(diam - 1, 0))
        self.near = [None] + [
            [[v for v in range(g.n) if v != u and dl[u][v] <= c] for u in range(g.n)]
            for c in range(1, top + 1)
        ]
        self.nodes = 0
        self.deadline = time.perf_counter() + cfg.time_limit
        self.timed_out = False
        self.witness: list[int] | None = None

    def _close(self, u: int, c: int) -> list[int]:
        if c >= self.diam:
            return [v for v in range(self.n) if v != u]
        return self.near[c][u]

    def candidate_colors(self, v: int) -> list[int]:
        dom = self.domain[v]
        out = []
        opened_singleton = False
        for c in range(1, self.k + 1):
            if not dom >> c & 1:
                continue
            if not self.cfg.forward_check and any(self.colors[u] == c for u in self._close(v, c)):
                continue
            if self.cfg.use_singleton_rule and c >= self.diam and self.used[c] == 0:
                # unused colors >= diam are interchangeable: try only the first
                if opened_singleton or any(self.used[d] == 0 for d in range(self.diam, c)):
                    continue
                opened_singleton = True
            out.append(c)
        return out

    def capacity_ok(self, remaining: int) -> bool:
        room = 0
        for c in range(1, self.k + 1):
            left = max(self.capacities[c - 1] - self.used[c], 0)
            if self.track:
                # with live domains, only uncolored vertices still holding c can take it
                left = min(left, self.holders[c])
            room += left
            if room >= remaining:
                return True
        return False

    def pick(self, depth: int) -> int:
        if self.cfg.ordering == "power2-degree":
            return self.order[depth]
        best, best_key = -1, None
        for v in self.order:
            if self.colors[v]:
                continue
            key = bin(self.domain[v]).count("1")
            if best_key is None or key < best_key:
                best, best_key = v, key
        return best

    def run(self) -> bool | None:
        try:
            return self._solve(0)
        except _Abort:
            return None

    def _solve(self, depth: int) -> bool:
        if depth == self.n:
            self.witness = list(self.colors)
            return True
        if self.cfg.use_packing_size_bounds and not self.capacity_ok(self.n - depth):
            return False
        v = self.pick(depth)
        for c in self.candidate_colors(v):
            self.nodes += 1
            if self.nodes >= self.cfg.node_limit or (
                self.nodes & 1023 == 0 and time.perf_counter() > self.deadline
            ):
                raise _Abort
            self.colors[v] = c
            self.used[c] += 1
            trail = []
            wiped = False
            if self.track:
                self._count(self.domain[v], -1)
            if self.cfg.forward_check:
                bit = 1 << c
                for u in self._close(v, c):
                    if not self.colors[u] and self.domain[u] & bit:
                        self.domain[u] &= ~bit
                        trail.append(u)
                        if not self.domain[u]:
                            wiped = True
                if self.track:
                    self.holders[c] -= len(trail)
            if not wiped and self._solve(depth + 1):
                return True
            for u in trail:
                self.domain[u] |= 1 << c
            if self.track:
                self.holders[c] += len(trail)
                self._count(self.domain[v], 1)
            self.colors[v] = 0
            self.used[c] -= 1
        return False

    def _count(self, dom: int, delta: int) -> None:
        for c in range(1, self.k + 1):
            if dom >> c & 1:
                self.holders[c] += delta


class _Abort(Exception):
    pass


def decide_packing_colorable(g: Graph, k: int, cfg: SolverConfig | None = None) -> SolveResult:
    """Is there a packing coloring with colors ``1..k``? Exhaustive, so UNSAT is a proof."""
    cfg = cfg or SolverConfig()
    if k < 1:
        raise GraphError("k must be a positive integer")
    start = time.perf_counter()
    if g.n == 0:
        return SolveResult(Status.SAT, k, PackingColoring(()), 0, 0.0, cfg)
    dm = all_pairs_distances(g)
    if dm.disconnected:
        raise DisconnectedGraphError("graph is disconnected")
    caps = None
    if cfg.use_packing_size_bounds:
        caps = packing_numbers(g, k)
    search = _Search(g, k, cfg, dm.dist, dm.diameter, caps)
    outcome = search.run()
    elapsed = time.perf_counter() - start
    if outcome is None:
        return SolveResult(Status.TIMEOUT, k, None, search.nodes, elapsed, cfg)
    if outcome:
        witness = PackingColoring(tuple(search.witness))
        # every SAT answer is re-checked from scratch
        check = validate_packing_coloring(g, witness)
        if not check.valid:
            raise AssertionError(f"solver produced an invalid coloring: {check.violations[:3]}")
        return SolveResult(Status.SAT, k, witness, search.nodes, elapsed, cfg)
    return SolveResult(Status.UNSAT, k, None, search.nodes, elapsed, cfg)


def greedy_upper_bound(g: Graph) -> tuple[int, PackingColoring]:
    """First-fit coloring in vertex-id order; always valid, so it bounds ``chi_rho`` from above."""
    colors = [0] * g.n
    for v in range(g.n):
        dist = bfs_distances(g, v)
        blocked = {colors[u] for u in range(v) if dist[u] != UNREACHABLE and dist[u] <= colors[u]}
        c = 1
        while c in blocked:
            c += 1
        colors[v] = c
    coloring = PackingColoring(tuple(colors))
    return coloring.palette_size, coloring


class ChiRho(NamedTuple):
    value: int
    witness: PackingColoring
    results: list[SolveResult]


def packing_chromatic_number(g: Graph, cfg: SolverConfig | None = None) -> ChiRho:
    """Smallest ``k`` with a packing ``k``-coloring, scanning upward from the counting bound."""
    cfg = cfg or SolverConfig()
    if g.n == 0:
        return ChiRho(0, PackingColoring(()), [])
    upper, greedy = greedy_upper_bound(g)
    k = 1
    while k < upper and counting_lower_bound(g, k).refuted:
        k += 1
    results = []
    nodes = 0
    for k in range(k, upper):
        res = decide_packing_colorable(g, k, cfg)
        results.append(res)
        nodes += res.nodes
        if res.status is Status.SAT:
            return ChiRho(k, res.witness, results)
        if res.status is Status.TIMEOUT:
            raise SolverTimeout(f"decide(k={k}) timed out", lower=k, upper=upper, nodes=nodes)
    return ChiRho(upper, greedy, results)
