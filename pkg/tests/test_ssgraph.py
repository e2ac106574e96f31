import pytest

from heckedyn.errors import EvenEll, NotClosed, ScaleExceeded, UsageError
from heckedyn.curves import j_invariant
from heckedyn.padics import PadicNumber
from heckedyn.ssgraph import (WalkEndo, alpha_of_level, arrow_dual_kernel,
                              backtrack_endo, build_ssgraph, closed_walks,
                              graph_report,
                              is_rigid, is_solid, monoid_certificates,
                              sat_membership, self_dual_loop_count,
                              walk_char_poly)


def test_reference_instance_11_5_1(g_11_5_1):
    G = g_11_5_1
    assert len(G.vertices) == 2
    js = sorted(j_invariant(v.curve).enc() for v in G.vertices)
    assert js == [0, 1]
    rows = sorted(sorted(row) for row in G.adjacency)
    assert rows == [[2, 4], [3, 3]]
    # the normalized matrix is (1/6)[[3,3],[2,4]] up to labeling
    assert all(sum(row) == 6 for row in G.adjacency)


def test_single_vertex_13_5_1(g_13_5_1):
    G = g_13_5_1
    assert len(G.vertices) == 1
    assert G.adjacency == [[6]]


def test_rigid_11_3_4(g_11_3_4):
    G = g_11_3_4
    assert is_rigid(4, 11)
    rep = graph_report(G)
    assert set(rep["out_degrees"]) == {4}
    assert set(rep["in_degrees"]) == {4}
    assert rep["connected"] and not rep["bipartite"]
    for v in G.vertices:
        assert v.aut_order == 1


def test_rigid_and_solid_classification():
    assert not is_rigid(1, 13) and is_solid(1, 13)
    assert not is_solid(1, 11)
    assert not is_rigid(2, 13) and is_solid(2, 13)
    assert is_rigid(3, 13) and is_solid(3, 13)
    assert not is_solid(3, 11)
    assert is_rigid(5, 11) and is_rigid(37, 11)


def test_validation_errors():
    with pytest.raises(EvenEll):
        build_ssgraph(11, 2, 1)
    with pytest.raises(UsageError):
        build_ssgraph(11, 3, 33)
    with pytest.raises(UsageError):
        build_ssgraph(7, 3, 1)
    with pytest.raises(ScaleExceeded):
        build_ssgraph(11, 3, 991)


def test_vertex_counts_match_orbit_formula():
    # level-N vertex count = sum over curves of (orbit count of order-N pts)
    G = build_ssgraph(11, 3, 5)
    by_curve = {}
    for v in G.vertices:
        by_curve[v.curve_index] = by_curve.get(v.curve_index, 0) + 1
    # j = 0 has 6 automorphisms, j = 1728 has 4; 24 points of order 5
    counts = sorted(by_curve.values())
    assert counts == [4, 6]
    assert all(G.out_degree(v.id) == 4 for v in G.vertices)


def test_walk_char_poly_trivial_cases(g_11_3_1):
    G = g_11_3_1
    assert walk_char_poly(G, []) == WalkEndo(2, 1)
    # arrow followed by its exact dual label: the scalar ell
    for ar in G.arrows[:4]:
        e = backtrack_endo(G, ar.index)
        assert e.norm == 9
        assert e.trace * e.trace == 4 * e.norm


def test_walk_char_poly_length_two_bounds(g_11_3_1):
    G = g_11_3_1
    walks = closed_walks(G, 0, 2)
    for w in walks:
        if len(w) != 2:
            continue
        e = walk_char_poly(G, w)
        assert e.norm == 9
        assert e.trace * e.trace <= 4 * e.norm
        disc = e.trace ** 2 - 36
        assert disc == 0 or disc < 0


def test_walk_char_poly_rejects_open_walks(g_11_3_1):
    G = g_11_3_1
    ar = G.arrows[0]
    nxt = next(a for a in G.arrows if a.src == ar.dst and a.dst != ar.src)
    with pytest.raises(NotClosed):
        walk_char_poly(G, [ar.index, nxt.index])


def test_alpha_of_level():
    assert alpha_of_level(5, 1) == 1
    assert alpha_of_level(3, 5) == 4
    assert alpha_of_level(3, 4) == 2


def test_monoid_certificates_11_5_1(g_11_5_1):
    certs = monoid_certificates(g_11_5_1, budget=3)
    assert len(certs["odd_walk"]) % 2 == 1
    assert len(certs["odd_walk"]) in (1, 3)
    assert certs["alpha_check"]
    assert certs["noncommuting_pair"] is not None
    (w1, e1), (w2, e2) = certs["noncommuting_pair"]
    assert e1.squarefree_disc_kernel() != e2.squarefree_disc_kernel()


def test_monoid_certificates_alpha_reported_at_level_5():
    # closed walks fixing the marked point exist in every degree class mod N
    # (e.g. degree-3 loops fixing an order-5 point), so the congruence
    # ell^d = 1 mod N fails and the certificate reports it honestly
    G = build_ssgraph(11, 3, 5)
    assert alpha_of_level(3, 5) == 4
    certs = monoid_certificates(G, budget=4)
    assert certs["alpha_check"] is False
    # every reported walk still fixes the marked point exactly; the
    # violating loops are genuine endomorphisms of norm 3
    loops = [ar.index for ar in G.arrows if ar.src == ar.dst]
    assert loops
    for ai in loops:
        e = walk_char_poly(G, [ai])
        assert e.norm == 3


def test_closure_fixes_marked_point():
    G = build_ssgraph(11, 3, 5)
    walks = closed_walks(G, 0, 4)
    assert walks
    # walk_char_poly verifies the marked-point closure internally
    e = walk_char_poly(G, walks[0])
    assert e.norm == 3 ** len(walks[0])


def test_self_dual_loops_cross_checked_by_traces(g_13_5_1):
    G = g_13_5_1
    s = self_dual_loop_count(G)
    zero_traces = 0
    for ar in G.arrows:
        if ar.src == ar.dst and G.vertices[ar.src].aut_order == 2:
            if walk_char_poly(G, [ar.index]).trace == 0:
                zero_traces += 1
    assert s == zero_traces == 2


def test_graph_report_13_5_1(g_13_5_1):
    rep = graph_report(g_13_5_1)
    assert rep["connected"] and not rep["bipartite"]
    assert rep["girth"] == 1
    assert rep["self_dual_loops"] == 2
    assert rep["cycle_rank_ud"] == (6 + 2) // 2 - 1 + 1


def test_dual_kernel_is_involutive(g_13_5_1):
    # involutivity of the arrow duality needs Aut = {+-1}, i.e. p = 1 mod 12
    G = g_13_5_1
    for ar in G.arrows[:6]:
        dk = arrow_dual_kernel(G, ar)
        back = next(a for a in G.arrows
                    if a.src == ar.dst and a.dst == ar.src and a.kernel == dk)
        assert arrow_dual_kernel(G, back) == ar.kernel


def test_sat_membership_examples():
    assert sat_membership(PadicNumber(11, 6, 1), 5)
    assert sat_membership(PadicNumber(11, 6, 5), 5)      # 5 = 4^2 mod 11
    assert not sat_membership(PadicNumber(11, 6, 2), 5)  # 2, 2/5 non-residues


def test_sat_membership_square_table():
    for p, ell in ((3, 2), (5, 3), (11, 5), (13, 5)):
        m = p ** 3
        squares = {x * x % m for x in range(m) if x % p}
        for u in range(1, m):
            if u % p == 0:
                continue
            expected = u in squares or (u * pow(ell, -1, m) % m) in squares
            assert sat_membership(PadicNumber(p, 3, u), ell) == expected


def test_deterministic_rebuild(g_11_5_1):
    G2 = build_ssgraph(11, 5, 1)
    from heckedyn.graphio import ssgraph_structure
    assert ssgraph_structure(G2) == ssgraph_structure(g_11_5_1)


def test_mass_formula():
    # independent oracle on curve enumeration and automorphism orders:
    # sum over curve classes of 1/#Aut equals (p-1)/24
    from fractions import Fraction
    for p in (11, 13, 23, 31, 37):
        G = build_ssgraph(p, 3, 1)
        mass = sum(Fraction(1, v.aut_order) for v in G.vertices)
        assert mass == Fraction(p - 1, 24), p


def test_arrow_count_symmetry(g_11_5_1, g_11_3_1):
    # arrows i->j and j->i are in the ratio #Aut(E_i) / #Aut(E_j)
    for G in (g_11_5_1, g_11_3_1):
        n = len(G.vertices)
        for i in range(n):
            for j in range(n):
                lhs = G.adjacency[i][j] * G.vertices[j].aut_order
                rhs = G.adjacency[j][i] * G.vertices[i].aut_order
                assert lhs == rhs


def test_level_one_stationary_is_aut_weighted():
    # consequence of the arrow symmetry: the stationary vector of the
    # level-one chain is proportional to 1/#Aut
    from fractions import Fraction
    from heckedyn.markov import normalize, stationary
    for (p, ell) in ((11, 5), (11, 3), (13, 5), (23, 3), (31, 3)):
        G = build_ssgraph(p, ell, 1)
        pi = stationary(normalize(G))
        weights = [Fraction(1, v.aut_order) for v in G.vertices]
        total = sum(weights)
        assert tuple(w / total for w in weights) == pi, (p, ell)
