import random

import pytest

from heckedyn.discdyn import (DiscAutomorphism, DiscPoint, QuatUnit,
                              apply, classify_periodic,
                              identity_unit, mobius_apply, qc_count,
                              quat_embed, random_walk, serre_tate_multivar,
                              transitivity_witness)
from heckedyn.errors import NotAUnit, UsageError
from heckedyn.padics import PadicNumber, quadratic_roots, sqrt_unit, wq
from heckedyn.ssgraph import sat_membership


def test_apply_identity_and_scalar():
    t = PadicNumber(5, 10, 35)
    auto = DiscAutomorphism(PadicNumber(5, 10, 1))
    assert apply(auto, t) == t
    # integer endomorphisms give the identity exponent pair
    from heckedyn.volcano import lambda_of_endo
    pair = lambda_of_endo(2 * 7, 49, 5, 10)
    auto2 = DiscAutomorphism(pair[0])
    assert apply(auto2, t) == t


def test_apply_example():
    auto = DiscAutomorphism(PadicNumber(5, 3, 2))
    got = apply(auto, PadicNumber(5, 3, 5))
    assert got.val == 35  # (1+5)^2 - 1


def test_disc_automorphism_needs_unit():
    with pytest.raises(NotAUnit):
        DiscAutomorphism(PadicNumber(5, 4, 10))


def test_serre_tate_multivar_identity():
    p, M, g = 7, 10, 2
    one = PadicNumber(p, M, 1)
    zero = PadicNumber(p, M, 0)
    I = [[one, zero], [zero, one]]
    T = [[PadicNumber(p, M, 7), PadicNumber(p, M, 14)],
         [PadicNumber(p, M, 21), PadicNumber(p, M, 35)]]
    out = serre_tate_multivar(I, I, T)
    for i in range(g):
        for j in range(g):
            assert out[i][j] == T[i][j]


def test_serre_tate_multivar_g1_matches_apply():
    p, M = 5, 16
    r1, r2 = quadratic_roots(3, 2, p, M)
    t = PadicNumber(p, M, 35)
    out = serre_tate_multivar([[r1.inverse()]], [[r2]], [[t]])
    assert out[0][0] == apply(DiscAutomorphism(r2 / r1), t)


def test_serre_tate_multivar_composition_law():
    # (f1 f2)* = f1* f2*: exponent matrices multiply
    p, M, g = 7, 12, 2
    rng = random.Random(3)

    def rand_mat():
        return [[PadicNumber(p, M, rng.randrange(1, p ** 4) * (1 if (i == j) else p))
                 for j in range(g)] for i in range(g)]

    def mat_mul(A, B):
        return [[sum((A[i][k] * B[k][j] for k in range(g)),
                     PadicNumber(p, M, 0)) for j in range(g)] for i in range(g)]

    for _ in range(5):
        F1, G1 = rand_mat(), rand_mat()
        F2, G2 = rand_mat(), rand_mat()
        T = [[PadicNumber(p, M, rng.randrange(1, p ** 6) * p) for _ in range(g)]
             for _ in range(g)]
        inner = serre_tate_multivar(F2, G2, T)
        lhs = serre_tate_multivar(F1, G1, inner)
        rhs = serre_tate_multivar(mat_mul(F2, F1), mat_mul(G2, G1), T)
        for i in range(g):
            for j in range(g):
                assert (lhs[i][j] - rhs[i][j]).val % p ** (M - 2) == 0


def test_classify_periodic():
    assert classify_periodic(PadicNumber(5, 8, 3), 4, 0)
    lam = sqrt_unit(PadicNumber(5, 8, 6))
    assert lam is not None and (lam * lam).val == 6 % 5 ** 8
    assert classify_periodic(lam, 2, 1)      # lam^2 = 6, 5 | 5
    expects = (lam.val - 1) % 5 == 0
    assert classify_periodic(lam, 1, 1) == expects
    other = -lam
    assert classify_periodic(other, 1, 1) == ((other.val - 1) % 5 == 0)
    assert classify_periodic(lam, 1, 1) != classify_periodic(other, 1, 1)


def test_classify_periodic_monotone_in_a():
    lam = PadicNumber(5, 10, 1 + 25)
    for m in (1, 2, 3):
        results = [classify_periodic(lam, m, a) for a in range(0, 4)]
        # once false, stays false as a grows
        seen_false = False
        for r in results:
            if seen_false:
                assert not r
            if not r:
                seen_false = True


def test_qc_count_formula():
    for p in (3, 5, 7):
        assert qc_count(0, False, p) == 1
        assert qc_count(0, True, p) == 1
        for s in (1, 2, 3):
            assert qc_count(s, False, p) == (p + 1) * p ** (s - 1)
            assert qc_count(s, True, p) == p ** s


def test_mobius_identity_and_chart():
    p, M = 11, 20
    x = DiscPoint(wq(p, M, 22, 11))
    assert mobius_apply(identity_unit(p, M), x) == x


def test_mobius_isometry_random_units():
    p, M = 11, 18
    rng = random.Random(5)
    for _ in range(50):
        a = wq(p, M, rng.randrange(1, p ** 5), rng.randrange(p ** 5))
        b = wq(p, M, rng.randrange(p ** 5), rng.randrange(p ** 5))
        try:
            g = QuatUnit(a, b)
        except NotAUnit:
            continue
        u = DiscPoint(wq(p, M, p * rng.randrange(p ** 4), p * rng.randrange(p ** 4)))
        v = DiscPoint(wq(p, M, p * rng.randrange(p ** 4), p * rng.randrange(p ** 4)))
        gu, gv = mobius_apply(g, u), mobius_apply(g, v)
        d0 = u.w - v.w
        d1 = gu.w - gv.w
        if d0.a0.val == 0 and d0.a1.val == 0:
            assert d1.a0.val == 0 and d1.a1.val == 0
        else:
            assert d0.valuation() == d1.valuation()


def test_mobius_stays_in_disc():
    p, M = 5, 16
    rng = random.Random(6)
    for _ in range(100):
        a = wq(p, M, rng.randrange(1, p ** 5), rng.randrange(p ** 5))
        b = wq(p, M, rng.randrange(p ** 5), rng.randrange(p ** 5))
        try:
            g = QuatUnit(a, b)
        except NotAUnit:
            continue
        x = DiscPoint(wq(p, M, p * rng.randrange(p ** 3), p * rng.randrange(p ** 3)))
        y = mobius_apply(g, x)  # raises ChartEscape on violation
        assert y.w.a0.val % p == 0 and y.w.a1.val % p == 0


def test_mobius_group_action():
    p, M = 11, 16
    rng = random.Random(7)
    for _ in range(20):
        a1 = wq(p, M, rng.randrange(1, p ** 4), rng.randrange(p ** 4))
        b1 = wq(p, M, rng.randrange(p ** 4), rng.randrange(p ** 4))
        a2 = wq(p, M, rng.randrange(1, p ** 4), rng.randrange(p ** 4))
        b2 = wq(p, M, rng.randrange(p ** 4), rng.randrange(p ** 4))
        try:
            g1, g2 = QuatUnit(a1, b1), QuatUnit(a2, b2)
        except NotAUnit:
            continue
        x = DiscPoint(wq(p, M, p * rng.randrange(p ** 3), p * rng.randrange(p ** 3)))
        lhs = mobius_apply(g1 * g2, x)
        rhs = mobius_apply(g1, mobius_apply(g2, x))
        assert lhs.w.a0 == rhs.w.a0 and lhs.w.a1 == rhs.w.a1
        # inverse undoes the action
        back = mobius_apply(g1.inverse(), mobius_apply(g1, x))
        assert back == x


def test_transitivity_witness_roundtrip():
    p, M = 13, 24
    rng = random.Random(8)
    for _ in range(30):
        x = DiscPoint(wq(p, M, p * rng.randrange(p ** 5), p * rng.randrange(p ** 5)))
        g = transitivity_witness(x, 5)
        img = mobius_apply(g, DiscPoint(wq(p, g.a.a0.prec, 0)))
        assert img.w.a0 == x.w.a0 and img.w.a1 == x.w.a1
        assert sat_membership(g.det(), 5)


def test_transitivity_witness_zero():
    g = transitivity_witness(DiscPoint(wq(11, 10, 0, 0)), 5)
    assert g.is_identity()


def test_quat_embed_trace_and_det():
    cases = [(0, 5, 11), (3, 9, 11), (-1, 3, 11), (2, 3, 13), (5, 3, 13)]
    for t, n, p in cases:
        g = quat_embed(t, n, p, 20)
        assert g.trace() == PadicNumber(p, g.a.a0.prec, t)
        assert g.det() == PadicNumber(p, g.a.a0.prec, n)


def test_quat_embed_rejects_split_field():
    # disc -12 is a square mod 13: the quadratic field splits at p
    with pytest.raises(UsageError):
        quat_embed(0, 3, 13, 20)


def test_random_walk_identity_concentrates():
    p, M = 11, 16
    x0 = DiscPoint(wq(p, M, p, 0))
    m, _ = random_walk([identity_unit(p, M)], x0, 500, seed=1, k=1)
    assert len(m.counts) == 1 and m.total == 500


def test_random_walk_deterministic():
    p, M = 11, 16
    gens = [identity_unit(p, M), quat_embed(0, 5, p, M), quat_embed(3, 9, p, M)]
    x0 = DiscPoint(wq(p, M, p, 0))
    m1, _ = random_walk(gens, x0, 2000, seed=42, k=1)
    m2, _ = random_walk(gens, x0, 2000, seed=42, k=1)
    assert m1.counts == m2.counts
    m3, _ = random_walk(gens, x0, 2000, seed=43, k=1)
    assert m1.counts != m3.counts


def test_fixed_points_of_nontrivial_automorphism():
    # apply(t) = t at precision M - 2 forces ord(t) >= M - 2
    p, M = 5, 12
    lam = PadicNumber(p, M, 2)
    auto = DiscAutomorphism(lam)
    for v in range(1, M - 3):
        t = PadicNumber(p, M, p ** v)
        img = apply(auto, t)
        assert (img - t).val % p ** (M - 2) != 0
