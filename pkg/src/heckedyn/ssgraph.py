"""Supersingular level graphs: representatives, labeled arrows, walk traces.

Vertices are pairs (E, P) with E a canonical model over F_{p^2} (squared
Frobenius acting as the scalar p) and P a chosen representative of an
automorphism orbit of points of exact order N.  Arrows are kernel-labeled:
one per cyclic subgroup of order ell, targeted at the unique representative
of the quotient pair, with the connecting isomorphism stored so that walk
composition fixes marked points exactly.
"""

import math

from .curves import (all_points_of_order, automorphism_scalars,
                     canonical_ss_model, chain_eval, chain_trace,
                     dual_isogeny, ell_subgroups, iso_scalars, j_invariant,
                     scaled_point, supersingular_j_in_base, torsion_basis,
                     velu)
from .errors import (BudgetExhausted, EvenEll, InvariantBreach, NotAUnit,
                     NotClosed, ScaleExceeded, SharedCharacteristic,
                     UsageError)
from .fields import embedding, is_prime, make_field


def alpha_of_level(ell, N):
    """Multiplicative order of ell modulo N (1 when N = 1)."""
    if N == 1:
        return 1
    a, x = 1, ell % N
    while x != 1:
        x = x * ell % N
        a += 1
    return a


class SSVertex:
    __slots__ = ("id", "curve", "point", "aut_order", "curve_index")

    def __init__(self, vid, curve, point, aut_order, curve_index):
        self.id = vid
        self.curve = curve
        self.point = point
        self.aut_order = aut_order
        self.curve_index = curve_index

    def __repr__(self):
        return "SSVertex(%d: j=%d, aut=%d)" % (
            self.id, j_invariant(self.curve).enc(), self.aut_order)


class SSArrow:
    __slots__ = ("index", "src", "dst", "kernel", "isogeny", "post_scalar",
                 "label_orbit_size")

    def __init__(self, index, src, dst, kernel, isogeny, post_scalar, orbit):
        self.index = index
        self.src = src
        self.dst = dst
        self.kernel = kernel
        self.isogeny = isogeny
        self.post_scalar = post_scalar
        self.label_orbit_size = orbit

    def steps(self):
        return [self.isogeny, (None, self.post_scalar)]


class WalkEndo:
    """(trace, norm) of the endomorphism composed along a closed walk."""

    __slots__ = ("trace", "norm")

    def __init__(self, trace, norm):
        self.trace = trace
        self.norm = norm

    def disc(self):
        return self.trace * self.trace - 4 * self.norm

    def is_scalar(self):
        return self.disc() == 0

    def squarefree_disc_kernel(self):
        d = self.disc()
        if d == 0:
            return 0
        s = 1
        n = abs(d)
        f = 2
        while f * f <= n:
            while n % (f * f) == 0:
                n //= f * f
            f += 1
        return (d // abs(d)) * n

    def __repr__(self):
        return "WalkEndo(t=%d, n=%d)" % (self.trace, self.norm)

    def __eq__(self, other):
        return (self.trace, self.norm) == (other.trace, other.norm)


class SSGraph:
    def __init__(self, p, ell, N, vertices, arrows, curves):
        self.p = p
        self.ell = ell
        self.N = N
        self.rigid = is_rigid(N, p)
        self.solid = is_solid(N, p)
        self.vertices = vertices
        self.arrows = arrows
        self.curves = curves
        n = len(vertices)
        adj = [[0] * n for _ in range(n)]
        self.out_arrows = [[] for _ in range(n)]
        for ar in arrows:
            adj[ar.src][ar.dst] += 1
            self.out_arrows[ar.src].append(ar.index)
        self.adjacency = adj

    def out_degree(self, v):
        return sum(self.adjacency[v])

    def in_degree(self, v):
        return sum(row[v] for row in self.adjacency)


def is_rigid(N, p):
    """Trivial automorphisms for all marked supersingular pairs."""
    if N > 3:
        return True
    if N == 3:
        return p % 3 == 1
    return False


def is_solid(N, p):
    if is_rigid(N, p):
        return True
    if N == 1:
        return p % 12 == 1
    if N == 2:
        return p % 4 == 1
    if N == 3:
        return p % 3 == 1
    return True


def build_ssgraph(p, ell, N=1):
    """The level-N supersingular graph for the prime ell.

    Deterministic: curves ordered by j encoding, marked points are the lex
    smallest members of their automorphism orbits, arrows sorted by kernel.
    """
    if not is_prime(p) or p < 11:
        raise UsageError("p must be a prime >= 11, got %r" % (p,))
    if not is_prime(ell):
        raise UsageError("ell must be prime, got %r" % (ell,))
    if ell == 2:
        raise EvenEll("ell must be odd")
    if ell == p:
        raise SharedCharacteristic("ell must differ from p")
    if N < 1 or math.gcd(N, p * ell) != 1:
        raise UsageError("need N >= 1 with gcd(N, p*ell) = 1")
    est_curves = p // 12 + 2
    if est_curves * N * N > 100000:
        raise ScaleExceeded("instance too large: ~%d curves at level %d"
                            % (est_curves, N))

    Fp2 = make_field(p, 2)
    # discover every supersingular curve by closing under ell-isogenies
    seeds = [embedding(j.field, Fp2)(j) for j in supersingular_j_in_base(p)]
    if not seeds:
        raise InvariantBreach("no supersingular j in the base field")
    seen = {}
    queue = list(dict.fromkeys(j.enc() for j in seeds))
    while queue:
        enc = queue.pop(0)
        if enc in seen:
            continue
        E = canonical_ss_model(Fp2.from_enc(enc))
        seen[enc] = E
        for h in ell_subgroups(E, ell):
            j2 = j_invariant(velu(E, h).target).enc()
            if j2 not in seen:
                queue.append(j2)
    curves = [seen[enc] for enc in sorted(seen)]

    # vertex set: one per Aut-orbit of exact order-N points
    vertices = []
    point_index = {}
    for ci, E in enumerate(curves):
        auts = automorphism_scalars(E)
        if N == 1:
            v = SSVertex(len(vertices), E, E.infinity(), len(auts), ci)
            vertices.append(v)
            point_index[(ci, (-1, -1))] = v.id
            continue
        pts = all_points_of_order(E, N)
        big = pts[0].field
        emb = embedding(Fp2, big)
        auts_big = [emb(u) for u in auts]
        assigned = {}
        for P in pts:
            if P.key() in assigned:
                continue
            orbit = []
            for u in auts_big:
                img = scaled_point(P, u, E)
                if img.key() not in assigned:
                    orbit.append(img)
                    assigned[img.key()] = True
            rep = min(orbit, key=lambda Q: Q.key())
            stab = len(auts) // len({Q.key() for Q in orbit})
            v = SSVertex(len(vertices), E, rep, stab, ci)
            vertices.append(v)
            for Q in orbit:
                point_index[(ci, Q.key())] = v.id

    curve_index = {E.key(): i for i, E in enumerate(curves)}

    # arrows: one per cyclic subgroup of each source vertex
    arrows = []
    iso_cache = {}
    for v in vertices:
        E = v.curve
        for h in ell_subgroups(E, ell):
            cache_key = (v.curve_index, h.key())
            got = iso_cache.get(cache_key)
            if got is None:
                phi = velu(E, h)
                E1 = canonical_ss_model(j_invariant(phi.target))
                ci2 = curve_index[E1.key()]
                us = iso_scalars(phi.target, E1)
                if not us:
                    raise InvariantBreach("quotient not isomorphic to a representative")
                u0 = us[0]
                got = (phi, E1, ci2, u0)
                iso_cache[cache_key] = got
            phi, E1, ci2, u0 = got
            if N == 1:
                dst = point_index[(ci2, (-1, -1))]
                post = u0
                orbit = vertices[dst].aut_order
            else:
                P1 = scaled_point(phi(v.point), u0, E1)
                # adjust by an automorphism of E1 so the image is the stored
                # representative; the composite is then a genuine label
                big = P1.field
                dst = None
                post = None
                for w in automorphism_scalars(E1):
                    w_big = embedding(Fp2, big)(w)
                    Q = scaled_point(P1, w_big, E1)
                    vid = point_index.get((ci2, Q.key()))
                    if vid is not None and vertices[vid].point.key() == Q.key():
                        dst = vid
                        post = u0 * w
                        break
                if dst is None:
                    raise InvariantBreach("image point matches no representative")
                orbit = vertices[dst].aut_order
            arrows.append(SSArrow(len(arrows), v.id, dst, h, phi, post, orbit))

    G = SSGraph(p, ell, N, vertices, arrows, curves)
    for v in vertices:
        if G.out_degree(v.id) != ell + 1:
            raise InvariantBreach("out-degree %d != ell+1 at vertex %d"
                                  % (G.out_degree(v.id), v.id))
    return G


# ---------------------------------------------------------------------------
# structural report

def _bfs_dist(G, start, reverse=False):
    n = len(G.vertices)
    dist = [None] * n
    dist[start] = 0
    frontier = [start]
    while frontier:
        nxt = []
        for u in frontier:
            for ai in range(len(G.arrows)):
                ar = G.arrows[ai]
                a, b = (ar.dst, ar.src) if reverse else (ar.src, ar.dst)
                if a == u and dist[b] is None:
                    dist[b] = dist[u] + 1
                    nxt.append(b)
        frontier = nxt
    return dist


def _is_strongly_connected(G):
    fwd = _bfs_dist(G, 0)
    bwd = _bfs_dist(G, 0, reverse=True)
    return all(d is not None for d in fwd) and all(d is not None for d in bwd)


def _period(G):
    """gcd of closed-walk lengths (assumes strong connectivity)."""
    dist = _bfs_dist(G, 0)
    g = 0
    for ar in G.arrows:
        g = math.gcd(g, dist[ar.src] + 1 - dist[ar.dst])
    return abs(g)


def _girth(G):
    n = len(G.vertices)
    best = None
    out = [[] for _ in range(n)]
    for ar in G.arrows:
        out[ar.src].append(ar.dst)
    for s in range(n):
        dist = [None] * n
        frontier = [(s, 0)]
        found = None
        while frontier and found is None:
            nxt = []
            for (u, d) in frontier:
                for w in out[u]:
                    if w == s:
                        found = d + 1
                        break
                    if dist[w] is None:
                        dist[w] = d + 1
                        nxt.append((w, d + 1))
                if found is not None:
                    break
            frontier = nxt
        if found is not None and (best is None or found < best):
            best = found
    return best


def arrow_dual_kernel(G, ar):
    """Kernel polynomial (over F_{p^2}) of the dual arrow: the image of the
    source ell-torsion under the arrow's label, in target coordinates."""
    E = G.vertices[ar.src].curve
    E1 = G.vertices[ar.dst].curve
    ell = G.ell
    T1, T2 = torsion_basis(E, ell)
    big = T1.field
    u_big = embedding(E1.field, big)(ar.post_scalar)
    gen = None
    for T in (T1, T2, T1 + T2):
        img = scaled_point(ar.isogeny(T), u_big, E1)
        if not img.inf:
            gen = img
            break
    if gen is None:
        raise InvariantBreach("ell-torsion collapsed under a degree-ell map")
    sec = embedding(E1.field, big).section
    from .fields import Poly
    cur = gen
    coeffs = Poly(big, [1])
    for _ in range((ell - 1) // 2):
        coeffs = coeffs * Poly(big, [-cur.x, big.one()])
        cur = cur + gen
    return Poly(E1.field, [sec(c) for c in coeffs.coeffs])


def self_dual_loop_count(G):
    """Loops that coincide with their dual arrow (kernel image criterion)."""
    if G.N != 1:
        return None
    count = 0
    for ar in G.arrows:
        if ar.src != ar.dst:
            continue
        if arrow_dual_kernel(G, ar) == ar.kernel:
            count += 1
    return count


def graph_report(G):
    connected = _is_strongly_connected(G)
    period = _period(G) if connected else 0
    report = {
        "connected": connected,
        "bipartite": (period % 2 == 0),
        "girth": _girth(G),
        "out_degrees": [G.out_degree(v.id) for v in G.vertices],
        "in_degrees": [G.in_degree(v.id) for v in G.vertices],
        "rigid": G.rigid,
        "solid": G.solid,
        "self_dual_loops": None,
        "cycle_rank_ud": None,
    }
    if G.N == 1:
        s = self_dual_loop_count(G)
        report["self_dual_loops"] = s
        if G.p % 12 == 1:
            loops = sum(1 for ar in G.arrows if ar.src == ar.dst)
            edges = (len(G.arrows) + s) // 2 if (len(G.arrows) + s) % 2 == 0 else None
            if edges is None:
                raise InvariantBreach("dual pairing parity failure")
            report["cycle_rank_ud"] = edges - len(G.vertices) + 1
            report["ud_loops"] = loops
    return report


# ---------------------------------------------------------------------------
# walks and their endomorphisms

def _walk_steps(G, walk):
    steps = []
    for ai in walk:
        ar = G.arrows[ai]
        steps.append(ar.isogeny)
        steps.append((G.vertices[ar.dst].curve, ar.post_scalar))
    return steps


def validate_walk(G, walk):
    if not walk:
        return
    for i in range(len(walk) - 1):
        if G.arrows[walk[i]].dst != G.arrows[walk[i + 1]].src:
            raise NotClosed("arrow %d does not continue arrow %d" % (walk[i + 1], walk[i]))


def walk_char_poly(G, walk, base=None):
    """WalkEndo of a closed labeled walk (list of arrow indices).

    The trace is recovered from the action on auxiliary torsion and the
    marked-point closure is verified exactly.
    """
    if not walk:
        return WalkEndo(2, 1)
    validate_walk(G, walk)
    v0 = G.arrows[walk[0]].src
    if G.arrows[walk[-1]].dst != v0:
        raise NotClosed("walk does not return to its starting vertex")
    if base is not None and base != v0:
        raise NotClosed("walk does not start at the requested base")
    E = G.vertices[v0].curve
    steps = _walk_steps(G, walk)
    d = len(walk)
    skip = set()
    n = G.N
    f = 2
    while f * f <= n:
        if n % f == 0:
            skip.add(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        skip.add(n)
    t = chain_trace(steps, E, G.ell, d, skip_primes=tuple(skip))
    if G.N > 1:
        P = G.vertices[v0].point
        img = chain_eval(steps, P)
        if img != P:
            raise InvariantBreach("composed walk does not fix the marked point")
    return WalkEndo(t, G.ell ** d)


def backtrack_endo(G, arrow_index):
    """WalkEndo of an arrow followed by its exact dual label: multiplication
    by ell, recovered independently through the torsion action.

    The stored label of the dual arrow can differ from the exact dual by an
    automorphism at j in {0, 1728}; this helper always uses the exact dual.
    """
    ar = G.arrows[arrow_index]
    E = G.vertices[ar.src].curve
    psi, u2 = dual_isogeny(ar.isogeny)
    steps = [ar.isogeny, psi, (E, u2)]
    t = chain_trace(steps, E, G.ell, 2)
    return WalkEndo(t, G.ell ** 2)


def closed_walks(G, base, max_len, cap=20000):
    """All closed walks at ``base`` of length <= max_len (DFS, bounded)."""
    out = []
    stack = [(base, [])]
    while stack:
        v, path = stack.pop()
        if path and v == base:
            out.append(path)
            if len(out) >= cap:
                raise BudgetExhausted("too many closed walks")
        if len(path) < max_len:
            for ai in G.out_arrows[v]:
                stack.append((G.arrows[ai].dst, path + [ai]))
    out.sort(key=lambda w: (len(w), w))
    return out


def monoid_certificates(G, budget=4, base=0):
    """Search certificates: an odd closed walk, a pair of walk endomorphisms
    generating distinct quadratic fields, and the ell^d = 1 mod N congruence
    on every closed walk found."""
    odd_walk = None
    n = len(G.vertices)
    # BFS over (vertex, parity)
    prev = {(base, 0): None}
    frontier = [(base, 0)]
    while frontier and odd_walk is None:
        nxt = []
        for (v, par) in frontier:
            for ai in G.out_arrows[v]:
                w = G.arrows[ai].dst
                state = (w, 1 - par)
                if state not in prev:
                    prev[state] = ((v, par), ai)
                    nxt.append(state)
                if w == base and par == 0:
                    # arrived back with odd length
                    walk = [ai]
                    cur = (v, par)
                    while prev[cur] is not None:
                        cur, a2 = prev[cur]
                        walk.append(a2)
                    walk.reverse()
                    if len(walk) % 2 == 1 and len(walk) <= budget + n:
                        odd_walk = walk
                        break
            if odd_walk:
                break
        frontier = nxt
    if odd_walk is None:
        raise BudgetExhausted("no odd closed walk within budget")

    walks = closed_walks(G, base, budget)
    endos = []
    alpha_ok = True
    for w in walks:
        if G.ell ** len(w) % G.N != 1 % G.N:
            alpha_ok = False
        endos.append((w, walk_char_poly(G, w)))
    pair = None
    fields_seen = {}
    for w, e in endos:
        k = e.squarefree_disc_kernel()
        if k == 0:
            continue
        for k2, (w2, e2) in fields_seen.items():
            if k2 != k:
                pair = ((w2, e2), (w, e))
                break
        if pair:
            break
        fields_seen.setdefault(k, (w, e))
    return {
        "odd_walk": odd_walk,
        "noncommuting_pair": pair,
        "alpha_check": alpha_ok,
        "walks_examined": len(walks),
    }


# ---------------------------------------------------------------------------
# the square-class subgroup (Z_p^x)^2 <ell>

def sat_membership(u, ell):
    """True iff the unit u lies in (Z_p^x)^2 * <ell>."""
    p = u.p
    need = 5 if p == 2 else 3
    if u.prec < need:
        raise UsageError("need precision >= %d at p = %d" % (need, p))
    if not u.is_unit():
        raise NotAUnit("sat membership is about units")
    if p == 2:
        vals = (u.val % 8, u.val * pow(ell, -1, 2 ** u.prec) % 8)
        return any(v == 1 for v in vals)
    r1 = pow(u.val % p, (p - 1) // 2, p)
    if r1 == 1:
        return True
    u2 = u.val * pow(ell, -1, p ** u.prec) % p ** u.prec
    return pow(u2 % p, (p - 1) // 2, p) == 1
