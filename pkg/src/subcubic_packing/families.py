"""Constructions of the gadget ``H``, the assembly ``G0``, perfect binary trees and ``G_k``.

Every builder returns a :class:`LabeledFamilyGraph`: the bare graph, a label
for every vertex, and a registry of the embedded copies (``H`` inside ``G0``,
``G0`` inside ``G_k`` and the two halves of ``G_k``) so that certificates can
re-check each copy independently.

Tree labels follow the "prepend a bit" convention: the children of
``T(l)`` are ``T(0l)`` and ``T(1l)``, so the rightmost bit of a leaf label
is the one chosen nearest the root.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

from .graph import Graph, GraphError, VertexMap, build_graph, check_map_isomorphism, induced_subgraph

H_NAMES = ("y1", "y2", "y3", "y4", "y5", "y6", "y7", "z1", "z2", "z3", "z4", "z5", "z6", "z7", "w")

H_EDGES = (
    ("y1", "y2"), ("y1", "y5"), ("y2", "y3"), ("y2", "y4"), ("y3", "y7"),
    ("y3", "z1"), ("y4", "y6"), ("y4", "w"), ("y5", "y6"), ("y5", "z7"),
    ("y6", "y7"), ("z1", "z2"), ("z1", "z5"), ("z2", "z3"), ("z2", "z4"),
    ("z3", "z7"), ("z4", "z6"), ("z4", "w"), ("z5", "z6"), ("z6", "z7"),
)

# How the two copies of H are named inside G0 (top copy primed, bottom copy double-primed).
PRIMED_NAMES = {
    "y1": "a'", "y2": "m'", "y3": "r'", "y4": "u'", "y5": "s'", "y6": "k'", "y7": "c'",
    "z1": "p'", "z2": "n'", "z3": "b'", "z4": "v'", "z5": "d'", "z6": "l'", "z7": "t'",
    "w": "x'",
}
DOUBLE_PRIMED_NAMES = {
    "y1": "a''", "y2": "k''", "y3": "r''", "y4": "u''", "y5": "s''", "y6": "m''", "y7": "d''",
    "z1": "p''", "z2": "l''", "z3": "b''", "z4": "v''", "z5": "c''", "z6": "n''", "z7": "t''",
    "w": "x''",
}

CONNECTORS = ("a", "b", "c", "d", "x")
TREES = ("A", "B", "C", "D", "X")

# connector -> (H vertex in the primed copy, H vertex in the double-primed copy)
CONNECTOR_ATTACHMENTS = {
    "a": ("y1", "y1"),
    "b": ("z3", "z3"),
    "c": ("y7", "z5"),
    "d": ("z5", "y7"),
    "x": ("w", "w"),
}

G0_NAMES = (
    tuple(PRIMED_NAMES[h] for h in H_NAMES)
    + tuple(DOUBLE_PRIMED_NAMES[h] for h in H_NAMES)
    + CONNECTORS
)

# Build requests above this k are refused before any allocation.
DEFAULT_MAX_K = 14


class ResourceCeilingError(GraphError):
    pass


class WrongFamilyError(GraphError):
    pass


@dataclass(frozen=True, order=True)
class Label:
    """Vertex label.

    ``kind`` is one of ``"H"`` (gadget vertex, ``name`` like ``y3``), ``"G0"``
    (non-connector vertex of a ``G0`` copy, ``name`` like ``s'``),
    ``"connector"`` (one of a, b, c, d, x in a stand-alone ``G0``) or
    ``"tree"`` (``name`` is the tree letter, ``path`` the bit suffix).
    ``path`` is the copy path ``b1..bk`` for ``G0`` vertices inside ``G_k``.
    """

    kind: str
    name: str
    path: str = ""

    def __str__(self) -> str:
        if self.kind == "tree":
            return f"{self.name}({self.path})"
        if self.path:
            return f"G0({self.path}):{self.name}"
        return self.name

    def extended(self, bit: str) -> "Label":
        """The label this vertex gets inside the half of ``G_{k+1}`` selected by ``bit``."""
        if self.kind == "connector":
            return Label("tree", self.name.upper(), bit)
        if self.kind in ("tree", "G0"):
            return Label(self.kind, self.name, self.path + bit)
        raise WrongFamilyError(f"label {self} has no counterpart in a larger G_k")


@dataclass(frozen=True)
class CopyRegistry:
    """Embedded copies, each with the map *from* the model graph *into* the host.

    ``h_copies`` holds ``(vertex set, map H -> host)``; ``g0_copies`` holds
    ``(path, vertex set, map G0 -> host)``; ``halves`` is
    ``(half0, half1, roots)`` for ``G_k`` with ``k >= 1``.
    """

    h_copies: tuple[tuple[frozenset[int], VertexMap], ...] = ()
    g0_copies: tuple[tuple[str, frozenset[int], VertexMap], ...] = ()
    halves: tuple[frozenset[int], frozenset[int], tuple[int, ...]] | None = None


@dataclass(frozen=True)
class LabeledFamilyGraph:
    graph: Graph
    labels: tuple[Label, ...]
    registry: CopyRegistry
    family: str
    k: int | None = None
    _index: dict[str, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.labels) != self.graph.n:
            raise GraphError("every vertex needs exactly one label")
        index = {str(lab): v for v, lab in enumerate(self.labels)}
        if len(index) != self.graph.n:
            raise GraphError("labels are not unique")
        self._index.update(index)
        if self.family == "Gk":
            # connectors of each G0 copy are the leaves of the trees
            for v, lab in enumerate(self.labels):
                if lab.kind == "tree" and len(lab.path) == self.k:
                    self._index[f"G0({lab.path}):{lab.name.lower()}"] = v

    def vertex(self, label: str | Label) -> int:
        """Vertex id for a label such as ``"y3"``, ``"s'"``, ``"A(01)"`` or ``"G0(01):k''"``."""
        try:
            return self._index[str(label)]
        except KeyError:
            raise KeyError(f"no vertex labelled {label!s} in {self.family_id}") from None

    def label(self, v: int) -> str:
        return str(self.labels[v])

    @property
    def family_id(self) -> str:
        if self.family == "Gk":
            return f"G{self.k}"
        if self.family == "tree":
            return f"tree({self.k})"
        return self.family


def _h_graph() -> Graph:
    index = {name: i for i, name in enumerate(H_NAMES)}
    return build_graph(len(H_NAMES), [(index[u], index[v]) for u, v in H_EDGES])


@lru_cache(maxsize=None)
def build_H() -> LabeledFamilyGraph:
    """The 15-vertex gadget on ``y1..y7, z1..z7, w``."""
    g = _h_graph()
    labels = tuple(Label("H", name) for name in H_NAMES)
    identity = VertexMap(tuple(range(g.n)))
    registry = CopyRegistry(h_copies=((frozenset(range(g.n)), identity),))
    return LabeledFamilyGraph(g, labels, registry, "H")


@lru_cache(maxsize=None)
def build_G0() -> LabeledFamilyGraph:
    """Two copies of ``H`` joined through the connectors ``a, b, c, d, x``.

    Ids 0..14 are the primed copy and 15..29 the double-primed copy, both in
    ``H_NAMES`` order; 30..34 are ``a, b, c, d, x``.
    """
    h = _h_graph()
    hn = len(H_NAMES)
    edges = [(u, v) for u, v in h.edges()]
    edges += [(u + hn, v + hn) for u, v in h.edges()]
    hidx = {name: i for i, name in enumerate(H_NAMES)}
    for j, conn in enumerate(CONNECTORS):
        top, bottom = CONNECTOR_ATTACHMENTS[conn]
        cid = 2 * hn + j
        edges.append((cid, hidx[top]))
        edges.append((cid, hidx[bottom] + hn))
    g = build_graph(2 * hn + len(CONNECTORS), edges)
    labels = tuple(Label("G0", name) for name in G0_NAMES[: 2 * hn]) + tuple(
        Label("connector", c) for c in CONNECTORS
    )
    registry = CopyRegistry(
        h_copies=(
            (frozenset(range(hn)), VertexMap(tuple(range(hn)))),
            (frozenset(range(hn, 2 * hn)), VertexMap(tuple(range(hn, 2 * hn)))),
        )
    )
    return LabeledFamilyGraph(g, labels, registry, "G0")


def _tree_levels(depth: int) -> list[list[str]]:
    """Suffixes per level, each level ordered left to right as drawn."""
    levels = [[""]]
    for _ in range(depth):
        levels.append(sorted((bit + s for s in levels[-1] for bit in "01"), key=lambda s: s[::-1]))
    return levels


def _tree_edges(suffixes: list[str], index: dict[str, int]) -> list[tuple[int, int]]:
    # a vertex's parent drops its leftmost bit
    return [(index[s[1:]], index[s]) for s in suffixes if s]


@lru_cache(maxsize=None)
def build_perfect_tree(depth: int) -> LabeledFamilyGraph:
    if depth < 0:
        raise GraphError("depth must be non-negative")
    suffixes = [s for level in _tree_levels(depth) for s in level]
    index = {s: i for i, s in enumerate(suffixes)}
    g = build_graph(len(suffixes), _tree_edges(suffixes, index))
    labels = tuple(Label("tree", "T", s) for s in suffixes)
    return LabeledFamilyGraph(g, labels, CopyRegistry(), "tree", depth)


def gk_order(k: int) -> tuple[int, int]:
    """``(vertices, edges)`` of ``G_k``."""
    return 40 * 2**k - 5, 60 * 2**k - 10


@lru_cache(maxsize=None)
def build_Gk(k: int, max_k: int = DEFAULT_MAX_K) -> LabeledFamilyGraph:
    """``2^k`` copies of ``G0`` whose connectors are the leaves of five depth-``k`` trees.

    Ids: the 30 non-connector vertices of each copy (copies in lexicographic
    path order), then the trees ``A, B, C, D, X`` level by level.
    """
    if k < 1:
        raise GraphError("G_k is defined for k >= 1 (use build_G0 for k = 0)")
    if k > max_k:
        n, _ = gk_order(k)
        raise ResourceCeilingError(f"G_{k} has {n} vertices; ceiling is k <= {max_k}")
    g0 = build_G0()
    inner = 2 * len(H_NAMES)
    paths = ["".join(p) for p in itertools.product("01", repeat=k)]
    labels: list[Label] = []
    for path in paths:
        labels.extend(Label("G0", name, path) for name in G0_NAMES[:inner])
    suffixes = [s for level in _tree_levels(k) for s in level]
    tree_index: dict[tuple[str, str], int] = {}
    for tree in TREES:
        for s in suffixes:
            tree_index[(tree, s)] = len(labels)
            labels.append(Label("tree", tree, s))

    edges: list[tuple[int, int]] = []
    copies = []
    for c, path in enumerate(paths):
        base = c * inner
        embed = [base + v for v in range(inner)]
        embed += [tree_index[(tree, path)] for tree in TREES]
        for u, v in g0.graph.edges():
            edges.append((embed[u], embed[v]))
        copies.append((path, frozenset(embed), VertexMap(tuple(embed))))
    for tree in TREES:
        idx = {s: tree_index[(tree, s)] for s in suffixes}
        edges.extend(_tree_edges(suffixes, idx))

    g = build_graph(len(labels), edges)
    roots = tuple(tree_index[(tree, "")] for tree in TREES)
    halves = tuple(
        frozenset(v for v, lab in enumerate(labels) if lab.path.endswith(bit)) for bit in "01"
    )
    registry = CopyRegistry(g0_copies=tuple(copies), halves=(halves[0], halves[1], roots))
    return LabeledFamilyGraph(g, tuple(labels), registry, "Gk", k)


def build_family(family: str, k: int | None = None, depth: int | None = None) -> LabeledFamilyGraph:
    """Dispatch on a family id: ``h``, ``g0``, ``tree`` (needs depth) or ``gk`` (needs k)."""
    family = family.lower()
    if family == "h":
        return build_H()
    if family == "g0":
        return build_G0()
    if family == "tree":
        if depth is None:
            raise GraphError("tree family needs a depth")
        return build_perfect_tree(depth)
    if family == "gk":
        if k is None:
            raise GraphError("gk family needs k")
        return build_G0() if k == 0 else build_Gk(k)
    raise GraphError(f"unknown family {family!r}")


class Halves(NamedTuple):
    half0: frozenset[int]
    half1: frozenset[int]
    roots: tuple[int, ...]


def decompose_halves(lg: LabeledFamilyGraph) -> Halves:
    """The two copies of ``G_{k-1}`` inside ``G_k`` and the five tree roots."""
    if lg.family != "Gk" or lg.registry.halves is None:
        raise WrongFamilyError(f"{lg.family_id} is not a G_k with k >= 1")
    return Halves(*lg.registry.halves)


def previous_level(lg: LabeledFamilyGraph) -> LabeledFamilyGraph:
    if lg.family != "Gk":
        raise WrongFamilyError(f"{lg.family_id} is not a G_k with k >= 1")
    return build_G0() if lg.k == 1 else build_Gk(lg.k - 1)


def half_maps(lg: LabeledFamilyGraph) -> tuple[VertexMap, VertexMap]:
    """Maps from ``G_{k-1}`` onto each half, obtained by appending the half's bit to every label."""
    prev = previous_level(lg)
    return tuple(
        VertexMap(tuple(lg.vertex(lab.extended(bit)) for lab in prev.labels)) for bit in "01"
    )


def check_registry(lg: LabeledFamilyGraph) -> list[str]:
    """Re-validate every registered copy; returns a list of failure messages (empty when sound)."""
    problems: list[str] = []
    reg = lg.registry
    if reg.h_copies:
        h = build_H().graph
        problems += _check_disjoint_copies(
            h, lg.graph, [(str(i), s, f) for i, (s, f) in enumerate(reg.h_copies)], "H"
        )
    if reg.g0_copies:
        g0 = build_G0().graph
        problems += _check_disjoint_copies(g0, lg.graph, list(reg.g0_copies), "G0")
    if reg.halves is not None:
        half0, half1, roots = reg.halves
        if half0 & half1:
            problems.append("halves overlap")
        if len(half0 | half1) + len(roots) != lg.graph.n or set(roots) & (half0 | half1):
            problems.append("halves and roots do not partition the vertex set")
        prev = previous_level(lg).graph
        for bit, half, f in zip("01", (half0, half1), half_maps(lg)):
            if f.image() != half:
                problems.append(f"half {bit}: map image differs from the registered vertex set")
            elif not check_map_isomorphism(prev, lg.graph, f):
                problems.append(f"half {bit}: not an induced copy of the previous level")
    return problems


def _check_disjoint_copies(model: Graph, host: Graph, copies, name: str) -> list[str]:
    problems = []
    seen: set[int] = set()
    for tag, verts, f in copies:
        if f.image() != verts:
            problems.append(f"{name} copy {tag}: map image differs from the registered vertex set")
        if seen & verts:
            problems.append(f"{name} copy {tag}: overlaps an earlier copy")
        seen |= verts
        if not check_map_isomorphism(model, host, f):
            problems.append(f"{name} copy {tag}: not an induced copy of {name}")
    return problems


def build_G1_by_subdivision() -> tuple[Graph, VertexMap]:
    """``G1`` assembled the other way: two ``G0`` copies joined by five subdivided edges.

    Returns the graph and a bijection from it onto ``build_Gk(1)`` that is
    built from labels alone, so the two constructions can be compared edge
    by edge.
    """
    g0 = build_G0()
    n0 = g0.graph.n
    edges = [(u, v) for u, v in g0.graph.edges()]
    edges += [(u + n0, v + n0) for u, v in g0.graph.edges()]
    for j, conn in enumerate(CONNECTORS):
        mid = 2 * n0 + j
        ci = g0.vertex(conn)
        edges += [(ci, mid), (mid, ci + n0)]
    g = build_graph(2 * n0 + len(CONNECTORS), edges)

    g1 = build_Gk(1)
    target = [g1.vertex(lab.extended(bit)) for bit in "01" for lab in g0.labels]
    target += [g1.vertex(Label("tree", t, "")) for t in TREES]
    return g, VertexMap(tuple(target))


def induced_copy(lg: LabeledFamilyGraph, verts) -> Graph:
    return induced_subgraph(lg.graph, verts)[0]


def random_connected_graph(n: int, p: float, seed: int) -> Graph:
    """Seeded random tree on ``n`` vertices plus each remaining pair with probability ``p``."""
    rng = random.Random(seed)
    edges = {(rng.randrange(v), v) for v in range(1, n)}
    for v in range(n):
        for u in range(v):
            if (u, v) not in edges and rng.random() < p:
                edges.add((u, v))
    return build_graph(n, sorted(edges))
