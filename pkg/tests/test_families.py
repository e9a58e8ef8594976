import networkx as nx
import pytest

from subcubic_packing.families import (
    CONNECTOR_ATTACHMENTS,
    DOUBLE_PRIMED_NAMES,
    H_EDGES,
    PRIMED_NAMES,
    TREES,
    Label,
    ResourceCeilingError,
    WrongFamilyError,
    build_family,
    build_G0,
    build_G1_by_subdivision,
    build_Gk,
    build_H,
    build_perfect_tree,
    check_registry,
    decompose_halves,
    gk_order,
    half_maps,
    induced_copy,
    random_connected_graph,
)
from subcubic_packing.graph import (
    GraphError,
    all_pairs_distances,
    bfs_distances,
    check_map_isomorphism,
    degree_profile,
    diameter,
    is_connected,
)


def to_nx(g):
    out = nx.Graph()
    out.add_nodes_from(range(g.n))
    out.add_edges_from(g.edges())
    return out


def test_h_basics():
    h = build_H()
    assert (h.graph.n, h.graph.m) == (15, 20)
    assert diameter(h.graph) == 4
    assert {h.label(v) for v in range(15) if h.graph.degree(v) == 2} == {"y1", "y7", "z3", "z5", "w"}


def test_g0_matches_named_edge_list():
    # rebuild G0 from names with networkx and compare up to isomorphism
    ref = nx.Graph()
    for names in (PRIMED_NAMES, DOUBLE_PRIMED_NAMES):
        ref.add_edges_from((names[u], names[v]) for u, v in H_EDGES)
    for conn, (top, bottom) in CONNECTOR_ATTACHMENTS.items():
        ref.add_edge(conn, PRIMED_NAMES[top])
        ref.add_edge(conn, DOUBLE_PRIMED_NAMES[bottom])
    g0 = build_G0()
    assert (g0.graph.n, g0.graph.m) == (35, 50)
    assert nx.is_isomorphic(ref, to_nx(g0.graph))
    # and the labels agree edge for edge
    labelled = {frozenset((g0.label(u), g0.label(v))) for u, v in g0.graph.edges()}
    assert labelled == {frozenset(e) for e in ref.edges()}


def test_g0_connector_names():
    g0 = build_G0()
    assert g0.graph.neighbors(g0.vertex("c")) == tuple(sorted((g0.vertex("c'"), g0.vertex("c''"))))
    assert g0.graph.neighbors(g0.vertex("d")) == tuple(sorted((g0.vertex("d'"), g0.vertex("d''"))))
    assert check_registry(g0) == []


@pytest.mark.parametrize("k", range(1, 9))
def test_gk_counts(k):
    lg = build_Gk(k)
    n, m = gk_order(k)
    assert (lg.graph.n, lg.graph.m) == (n, m) == (40 * 2**k - 5, 60 * 2**k - 10)
    prof = degree_profile(lg.graph)
    assert prof.max_degree == 3
    assert prof.counts[2] == 5
    assert sorted(lg.label(v) for v in range(n) if lg.graph.degree(v) == 2) == sorted(f"{t}()" for t in TREES)
    assert is_connected(lg.graph)


@pytest.mark.parametrize("k", range(1, 6))
def test_gk_registry_and_halves(k):
    lg = build_Gk(k)
    assert check_registry(lg) == []
    halves = decompose_halves(lg)
    assert len(halves.half0) == len(halves.half1) == gk_order(k - 1)[0]
    assert len(halves.roots) == 5
    assert all(lg.graph.degree(r) == 2 for r in halves.roots)
    # the only edges leaving a half go to the roots
    for half in (halves.half0, halves.half1):
        for u in half:
            for v in lg.graph.neighbors(u):
                assert v in half or v in halves.roots


def test_half_maps_are_label_suffix_maps():
    g2 = build_Gk(2)
    g1 = build_Gk(1)
    f0, f1 = half_maps(g2)
    assert g2.label(f0[g1.vertex("A(0)")]) == "A(00)"
    assert g2.label(f1[g1.vertex("G0(1):s'")]) == "G0(11):s'"
    assert g2.label(f1[g1.vertex("A()")]) == "A(1)"


def test_g1_two_constructions_agree():
    g, f = build_G1_by_subdivision()
    assert check_map_isomorphism(g, build_Gk(1).graph, f)
    assert nx.is_isomorphic(to_nx(g), to_nx(build_Gk(1).graph))


def test_labels_round_trip():
    lg = build_Gk(3)
    for v in range(lg.graph.n):
        assert lg.vertex(lg.label(v)) == v
    # a connector of a G0 copy is the leaf of its tree
    assert lg.vertex("G0(010):a") == lg.vertex("A(010)")
    assert Label("connector", "x").extended("1") == Label("tree", "X", "1")
    with pytest.raises(KeyError):
        lg.vertex("G0(0100):a")
    with pytest.raises(WrongFamilyError):
        Label("H", "y1").extended("0")


def test_leaves_within_2k_and_tree_shape():
    for depth in range(5):
        t = build_perfect_tree(depth)
        assert t.graph.n == 2 ** (depth + 1) - 1
        d = all_pairs_distances(t.graph)
        assert d.diameter == 2 * depth
        root = t.vertex("T()")
        assert max(bfs_distances(t.graph, root)) == depth
    lg = build_Gk(4)
    leaves = [lg.vertex(f"A({p})") for p in ("0000", "1111", "0101")]
    for u in leaves:
        dist = bfs_distances(lg.graph, u)
        for v in leaves:
            assert dist[v] <= 2 * 4


def test_copies_are_induced():
    lg = build_Gk(2)
    for path, verts, f in lg.registry.g0_copies:
        assert induced_copy(lg, verts).m == 50
        assert check_map_isomorphism(build_G0().graph, lg.graph, f)


def test_build_family_dispatch_and_errors():
    assert build_family("g0") is build_G0()
    assert build_family("gk", k=0) is build_G0()
    assert build_family("gk", k=2).family_id == "G2"
    assert build_family("tree", depth=2).graph.n == 7
    with pytest.raises(GraphError):
        build_family("nonsense")
    with pytest.raises(GraphError):
        build_family("tree")
    with pytest.raises(GraphError):
        build_Gk(0)
    with pytest.raises(ResourceCeilingError):
        build_Gk(15)
    with pytest.raises(WrongFamilyError):
        decompose_halves(build_G0())


def test_random_connected_graph_is_seeded_and_connected():
    a = random_connected_graph(12, 0.2, 5)
    assert a == random_connected_graph(12, 0.2, 5)
    for seed in range(30):
        assert is_connected(random_connected_graph(9, 0.1, seed))
