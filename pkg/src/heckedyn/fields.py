"""Finite field towers F_p < F_{p^k} and univariate polynomial algebra.

Everything is exact and deterministic.  The modulus of F_{p^k} is the first
monic irreducible of degree k in the canonical coefficient order, elements
carry an integer encoding used for every lex tie-break in the package, and
the randomized factorization steps are driven by a caller-visible seed so
repeated runs produce identical output.

Scale: p < 2**31 with plain Python integers; no FFT multiplication.
"""

import random
import threading

from .errors import DegreeZero, NonPrime, ZeroPolynomial

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n):
    """Deterministic Miller-Rabin, valid far beyond the 2**31 design bound."""
    if n < 2:
        return False
    for w in _MR_WITNESSES:
        if n % w == 0:
            return n == w
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for w in _MR_WITNESSES:
        x = pow(w, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class FieldDesc:
    """F_{p^k} in polynomial basis over the monic irreducible ``modulus``.

    Do not construct directly; go through :func:`make_field`, which verifies
    primality and picks the canonical modulus.  Instances are immutable and
    shared, so identity comparison is safe.
    """

    __slots__ = ("p", "k", "modulus", "order", "_red", "_square_set",
                 "_root_tables", "_aut_cache")

    def __init__(self, p, k, modulus):
        self.p = p
        self.k = k
        self.modulus = tuple(modulus)  # length k+1, monic
        self.order = p ** k
        # reduction rows: x^j mod modulus for j in [k, 2k-2]
        red = {}
        red[k] = tuple((-c) % p for c in modulus[:k])
        for j in range(k + 1, 2 * k - 1):
            # multiply the previous row by x and reduce the overflow term
            prev = red[j - 1]
            row = [0] * k
            for i in range(k - 1):
                row[i + 1] = prev[i]
            top = prev[k - 1]
            if top:
                base = red[k]
                for i in range(k):
                    row[i] = (row[i] + top * base[i]) % p
            red[j] = tuple(row)
        self._red = red
        self._square_set = None
        self._root_tables = {}
        self._aut_cache = {}

    # ---- element constructors -------------------------------------------

    def elt(self, value):
        """Element from an integer (constant) or a coefficient sequence."""
        if isinstance(value, int):
            c = [0] * self.k
            c[0] = value % self.p
            return ExtFieldElement(self, tuple(c))
        c = [v % self.p for v in value]
        if len(c) > self.k:
            raise ValueError("too many coefficients")
        c += [0] * (self.k - len(c))
        return ExtFieldElement(self, tuple(c))

    def zero(self):
        return self.elt(0)

    def one(self):
        return self.elt(1)

    def from_enc(self, n):
        """Inverse of ExtFieldElement.enc()."""
        c = []
        for _ in range(self.k):
            n, r = divmod(n, self.p)
            c.append(r)
        return ExtFieldElement(self, tuple(c))

    def elements(self):
        """All field elements in canonical (encoding) order."""
        for n in range(self.order):
            yield self.from_enc(n)

    # ---- coefficient-level arithmetic ------------------------------------

    def _mulc(self, a, b):
        p, k = self.p, self.k
        if k == 1:
            return (a[0] * b[0] % p,)
        prod = [0] * (2 * k - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        red = self._red
        for j in range(2 * k - 2, k - 1, -1):
            c = prod[j] % p
            if c:
                row = red[j]
                for i in range(k):
                    prod[i] += c * row[i]
        return tuple(v % p for v in prod[:k])

    def _addc(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def _subc(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def _negc(self, a):
        p = self.p
        return tuple((-x) % p for x in a)

    def _smulc(self, s, a):
        p = self.p
        return tuple(s * x % p for x in a)

    def _powc(self, a, e):
        if e < 0:
            return self._powc(self._invc(a), -e)
        result = self.one().coeffs
        base = a
        while e:
            if e & 1:
                result = self._mulc(result, base)
            base = self._mulc(base, base)
            e >>= 1
        return result

    def _invc(self, a):
        # extended Euclid in F_p[x] against the modulus
        if not any(a):
            raise ZeroDivisionError("inversion of zero field element")
        p = self.p
        if self.k == 1:
            return (pow(a[0], -1, p),)
        r0 = list(self.modulus)
        r1 = [c for c in a]
        while r1 and r1[-1] == 0:
            r1.pop()
        t0, t1 = [0], [1]
        while True:
            if len(r1) == 1:
                inv = pow(r1[0], -1, p)
                res = [c * inv % p for c in t1]
                res += [0] * (self.k - len(res))
                return tuple(res[: self.k])
            # divide r0 by r1
            q = [0] * (len(r0) - len(r1) + 1)
            rem = list(r0)
            inv_lead = pow(r1[-1], -1, p)
            for sh in range(len(rem) - len(r1), -1, -1):
                coef = rem[sh + len(r1) - 1] * inv_lead % p
                if coef:
                    q[sh] = coef
                    for i, c in enumerate(r1):
                        rem[sh + i] = (rem[sh + i] - coef * c) % p
            while rem and rem[-1] == 0:
                rem.pop()
            # t0, t1 = t1, t0 - q*t1
            qt = [0] * (len(q) + len(t1) - 1)
            for i, qi in enumerate(q):
                if qi:
                    for j, tj in enumerate(t1):
                        qt[i + j] = (qt[i + j] + qi * tj) % p
            nt = [0] * max(len(t0), len(qt))
            for i, c in enumerate(t0):
                nt[i] = c
            for i, c in enumerate(qt):
                nt[i] = (nt[i] - c) % p
            while nt and nt[-1] == 0:
                nt.pop()
            r0, r1 = r1, rem
            t0, t1 = t1, nt if nt else [0]
            if not r1:
                raise ZeroDivisionError("element not invertible")

    # ---- cached per-field tables ------------------------------------------

    def square_set(self):
        """Set of encodings of nonzero squares; built once, O(q)."""
        if self._square_set is None:
            s = set()
            for n in range(1, self.order):
                z = self.from_enc(n)
                s.add((z * z).enc())
            self._square_set = s
        return self._square_set

    def power_table(self, e):
        """dict enc(z**e) -> sorted list of z, over nonzero z."""
        tab = self._root_tables.get(e)
        if tab is None:
            tab = {}
            for n in range(1, self.order):
                z = self.from_enc(n)
                key = (z ** e).enc()
                tab.setdefault(key, []).append(z)
            for lst in tab.values():
                lst.sort(key=lambda t: t.enc())
            self._root_tables[e] = tab
        return tab

    def __repr__(self):
        return "F_%d^%d" % (self.p, self.k)


class ExtFieldElement:
    """Element of F_{p^k} as a coefficient tuple in the polynomial basis."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        self.field = field
        self.coeffs = coeffs

    def enc(self):
        """Canonical integer encoding sum(c_i p^i); total order for ties."""
        n = 0
        for c in reversed(self.coeffs):
            n = n * self.field.p + c
        return n

    def is_zero(self):
        return not any(self.coeffs)

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field.elt(other)
        return self.field is other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((id(self.field), self.coeffs))

    def __add__(self, other):
        if isinstance(other, int):
            other = self.field.elt(other)
        return ExtFieldElement(self.field, self.field._addc(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = self.field.elt(other)
        return ExtFieldElement(self.field, self.field._subc(self.coeffs, other.coeffs))

    def __rsub__(self, other):
        return self.field.elt(other) - self

    def __neg__(self):
        return ExtFieldElement(self.field, self.field._negc(self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            return ExtFieldElement(self.field, self.field._smulc(other % self.field.p, self.coeffs))
        return ExtFieldElement(self.field, self.field._mulc(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e):
        return ExtFieldElement(self.field, self.field._powc(self.coeffs, e))

    def inverse(self):
        return ExtFieldElement(self.field, self.field._invc(self.coeffs))

    def __truediv__(self, other):
        if isinstance(other, int):
            other = self.field.elt(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.field.elt(other) * self.inverse()

    def frobenius(self, e=1):
        """Image under the p-power Frobenius applied e times."""
        return self ** (self.field.p ** e)

    def sqrt(self):
        """A square root, or None; Tonelli-Shanks on the cyclic unit group."""
        if self.is_zero():
            return self
        F = self.field
        q = F.order
        if q % 2 == 0:
            return self ** (q // 2)
        if (self ** ((q - 1) // 2)).enc() != 1:
            return None
        # write q-1 = 2^s * t
        t, s = q - 1, 0
        while t % 2 == 0:
            t //= 2
            s += 1
        # find a non-residue deterministically
        z = None
        for n in range(2, q):
            cand = F.from_enc(n)
            if cand.is_zero():
                continue
            if (cand ** ((q - 1) // 2)).enc() != 1:
                z = cand
                break
        c = z ** t
        x = self ** ((t + 1) // 2)
        b = self ** t
        m = s
        one = F.one()
        while b != one:
            i, bb = 0, b
            while bb != one:
                bb = bb * bb
                i += 1
            e = c
            for _ in range(m - i - 1):
                e = e * e
            x = x * e
            c = e * e
            b = b * c
            m = i
        return x

    def __repr__(self):
        return "%r(%s)" % (self.field, ",".join(str(c) for c in self.coeffs))


# ---------------------------------------------------------------------------
# field construction

_FIELD_CACHE = {}
_FIELD_LOCK = threading.Lock()


def _is_irreducible(field_p, coeffs):
    """Irreducibility of a monic polynomial over F_p via Frobenius gcds."""
    p = field_p
    k = len(coeffs) - 1
    tmp = _RawPoly(p, coeffs)
    x = _RawPoly(p, [0, 1])
    # x^(p^k) == x mod f
    xp = x.pow_mod(p ** k, tmp)
    if xp != x.mod(tmp):
        return False
    kk = k
    prime_divs = []
    d = 2
    while d * d <= kk:
        if kk % d == 0:
            prime_divs.append(d)
            while kk % d == 0:
                kk //= d
        d += 1
    if kk > 1:
        prime_divs.append(kk)
    for t in prime_divs:
        g = x.pow_mod(p ** (k // t), tmp) - x
        if tmp.gcd(g).degree() != 0:
            return False
    return True


class _RawPoly:
    """Monic-agnostic polynomial over F_p with plain int coefficients.

    Used only during modulus selection, before any FieldDesc exists.
    """

    def __init__(self, p, coeffs):
        self.p = p
        c = [x % p for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = c

    def degree(self):
        return len(self.c) - 1

    def __eq__(self, other):
        return self.c == other.c

    def __sub__(self, other):
        n = max(len(self.c), len(other.c))
        r = [0] * n
        for i, v in enumerate(self.c):
            r[i] = v
        for i, v in enumerate(other.c):
            r[i] = (r[i] - v) % self.p
        return _RawPoly(self.p, r)

    def mod(self, m):
        r = list(self.c)
        p = self.p
        inv = pow(m.c[-1], -1, p)
        while len(r) >= len(m.c):
            coef = r[-1] * inv % p
            sh = len(r) - len(m.c)
            if coef:
                for i, v in enumerate(m.c):
                    r[sh + i] = (r[sh + i] - coef * v) % p
            r.pop()
        while r and r[-1] == 0:
            r.pop()
        return _RawPoly(p, r)

    def mul_mod(self, other, m):
        p = self.p
        prod = [0] * (len(self.c) + len(other.c) - 1) if self.c and other.c else []
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    prod[i + j] += a * b
        return _RawPoly(p, [v % p for v in prod]).mod(m)

    def pow_mod(self, e, m):
        result = _RawPoly(self.p, [1])
        base = self.mod(m)
        while e:
            if e & 1:
                result = result.mul_mod(base, m)
            base = base.mul_mod(base, m)
            e >>= 1
        return result

    def gcd(self, other):
        a, b = self, other
        while b.c:
            a, b = b, a.mod(b)
        return a


def make_field(p, k):
    """F_{p^k} with the canonical modulus; cached, thread-safe.

    The modulus is the first monic irreducible of degree k when the vector
    of lower coefficients (c_0,...,c_{k-1}) is enumerated in encoding order,
    so the same (p, k) always yields the same field.
    """
    if not is_prime(p):
        raise NonPrime("p = %r is not prime" % (p,))
    if not isinstance(k, int) or k < 1:
        raise DegreeZero("extension degree must be >= 1, got %r" % (k,))
    key = (p, k)
    f = _FIELD_CACHE.get(key)
    if f is not None:
        return f
    if k == 1:
        field = FieldDesc(p, 1, (0, 1))
    else:
        field = None
        for n in range(p ** k):
            c = []
            m = n
            for _ in range(k):
                m, r = divmod(m, p)
                c.append(r)
            coeffs = c + [1]
            if _is_irreducible(p, coeffs):
                field = FieldDesc(p, k, tuple(coeffs))
                break
        if field is None:  # pragma: no cover - cannot happen
            raise RuntimeError("no irreducible polynomial found")
    with _FIELD_LOCK:
        return _FIELD_CACHE.setdefault(key, field)


# ---------------------------------------------------------------------------
# polynomials over a FieldDesc

class Poly:
    """Univariate polynomial over a FieldDesc, normalized (no zero tail).

    Coefficients are stored low-to-high as raw coefficient tuples; the
    ``coeffs`` property materializes ExtFieldElement views.
    """

    __slots__ = ("field", "_c")

    def __init__(self, field, coeffs, raw=False):
        self.field = field
        if raw:
            c = list(coeffs)
        else:
            c = []
            for v in coeffs:
                if isinstance(v, ExtFieldElement):
                    c.append(v.coeffs)
                elif isinstance(v, int):
                    c.append(field.elt(v).coeffs)
                else:
                    c.append(tuple(x % field.p for x in v))
        while c and not any(c[-1]):
            c.pop()
        self._c = c

    @property
    def coeffs(self):
        return [ExtFieldElement(self.field, t) for t in self._c]

    def degree(self):
        return len(self._c) - 1

    def is_zero(self):
        return not self._c

    def __eq__(self, other):
        return isinstance(other, Poly) and self.field is other.field and self._c == other._c

    def __hash__(self):
        return hash((id(self.field), tuple(self._c)))

    def key(self):
        """Deterministic sort key: degree, then coefficient encodings."""
        return (self.degree(), tuple(_enc(self.field, t) for t in self._c))

    def __add__(self, other):
        other = self._coerce(other)
        F = self.field
        n = max(len(self._c), len(other._c))
        zero = F.zero().coeffs
        r = []
        for i in range(n):
            a = self._c[i] if i < len(self._c) else zero
            b = other._c[i] if i < len(other._c) else zero
            r.append(F._addc(a, b))
        return Poly(F, r, raw=True)

    def __sub__(self, other):
        other = self._coerce(other)
        F = self.field
        n = max(len(self._c), len(other._c))
        zero = F.zero().coeffs
        r = []
        for i in range(n):
            a = self._c[i] if i < len(self._c) else zero
            b = other._c[i] if i < len(other._c) else zero
            r.append(F._subc(a, b))
        return Poly(F, r, raw=True)

    def __neg__(self):
        F = self.field
        return Poly(F, [F._negc(t) for t in self._c], raw=True)

    def __mul__(self, other):
        other = self._coerce(other)
        F = self.field
        if not self._c or not other._c:
            return Poly(F, [], raw=True)
        zero = F.zero().coeffs
        r = [zero] * (len(self._c) + len(other._c) - 1)
        for i, a in enumerate(self._c):
            if any(a):
                for j, b in enumerate(other._c):
                    if any(b):
                        r[i + j] = F._addc(r[i + j], F._mulc(a, b))
        return Poly(F, r, raw=True)

    def _coerce(self, other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, ExtFieldElement)):
            return Poly(self.field, [other])
        raise TypeError(other)

    def scale(self, s):
        if isinstance(s, int):
            s = self.field.elt(s)
        F = self.field
        return Poly(F, [F._mulc(s.coeffs, t) for t in self._c], raw=True)

    def divmod(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        F = self.field
        if self.degree() < other.degree():
            return Poly(F, [], raw=True), self
        inv_lead = F._invc(other._c[-1])
        rem = list(self._c)
        qlen = len(rem) - len(other._c) + 1
        zero = F.zero().coeffs
        q = [zero] * qlen
        for sh in range(qlen - 1, -1, -1):
            coef = F._mulc(rem[sh + len(other._c) - 1], inv_lead)
            if any(coef):
                q[sh] = coef
                for i, c in enumerate(other._c):
                    if any(c):
                        rem[sh + i] = F._subc(rem[sh + i], F._mulc(coef, c))
        return Poly(F, q, raw=True), Poly(F, rem[: len(other._c) - 1], raw=True)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self):
        if self.is_zero():
            return self
        F = self.field
        inv = F._invc(self._c[-1])
        return Poly(F, [F._mulc(inv, t) for t in self._c], raw=True)

    def gcd(self, other):
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def derivative(self):
        F = self.field
        r = [F._smulc(i, t) for i, t in enumerate(self._c)][1:]
        return Poly(F, r, raw=True)

    def pow_mod(self, e, m):
        F = self.field
        result = Poly(F, [1])
        base = self % m
        while e:
            if e & 1:
                result = (result * base) % m
            base = (base * base) % m
            e >>= 1
        return result

    def __call__(self, x):
        """Evaluate at an element of this field or an extension."""
        if isinstance(x, ExtFieldElement) and x.field is not self.field:
            # caller must pre-embed coefficients; see embed_poly
            raise ValueError("evaluate via embed_poly for extension fields")
        F = self.field
        acc = F.zero().coeffs
        for t in reversed(self._c):
            acc = F._addc(F._mulc(acc, x.coeffs), t)
        return ExtFieldElement(F, acc)

    def __repr__(self):
        if self.is_zero():
            return "Poly(0)"
        terms = []
        for i, t in enumerate(self._c):
            if any(t):
                terms.append("(%s)x^%d" % (",".join(map(str, t)), i))
        return "Poly[" + " + ".join(terms) + "]"


def _enc(field, coeff_tuple):
    n = 0
    for c in reversed(coeff_tuple):
        n = n * field.p + c
    return n


def x_poly(field):
    return Poly(field, [0, 1])


def poly_from_roots(field, roots):
    f = Poly(field, [1])
    for r in roots:
        f = f * Poly(field, [-r, field.one()])
    return f


# ---------------------------------------------------------------------------
# roots and factorization

def _frobenius_map_poly(f):
    """x^q mod f for q the field order."""
    F = f.field
    return x_poly(F).pow_mod(F.order, f)


def _split_equal_degree(f, d, rng):
    """Cantor-Zassenhaus split of f into irreducibles of degree d."""
    F = f.field
    q = F.order
    n = f.degree()
    if n == d:
        return [f.monic()]
    out = []
    stack = [f.monic()]
    while stack:
        g = stack.pop()
        if g.degree() == d:
            out.append(g)
            continue
        while True:
            r = Poly(F, [F.from_enc(rng.randrange(q)) for _ in range(g.degree())])
            if r.is_zero():
                continue
            if q % 2 == 1:
                h = r.pow_mod((q ** d - 1) // 2, g) - Poly(F, [1])
            else:
                # trace map for characteristic 2
                h = Poly(F, [])
                t = r % g
                bits = d * (F.k if F.p == 2 else 1)
                for _ in range(bits):
                    h = (h + t) % g
                    t = (t * t) % g
            s = g.gcd(h)
            if 0 < s.degree() < g.degree():
                stack.append(s)
                stack.append(g // s)
                break
    return out


def _pth_root_coeff(field, t):
    # c^(p^(k-1)) is the p-th root of c in F_{p^k}
    e = field.p ** (field.k - 1)
    return field._powc(t, e)


def poly_factor(f, seed=0):
    """Complete factorization into monic irreducibles with multiplicities.

    Output is sorted by (degree, coefficient encodings) and reproducible:
    the equal-degree splitting RNG is seeded from ``seed`` only.
    """
    if f.is_zero():
        raise ZeroPolynomial("cannot factor the zero polynomial")
    F = f.field
    rng = random.Random(seed)
    factors = {}

    def add(g, mult):
        key = g.key()
        if key in factors:
            factors[key] = (g, factors[key][1] + mult)
        else:
            factors[key] = (g, mult)

    def work(g, mult):
        g = g.monic()
        if g.degree() == 0:
            return
        d = g.derivative()
        if d.is_zero():
            # g is a p-th power: g = h(x^p)
            stride = F.p
            h_coeffs = [_pth_root_coeff(F, g._c[i]) for i in range(0, len(g._c), stride)]
            work(Poly(F, h_coeffs, raw=True), mult * F.p)
            return
        sqf = g.gcd(d)
        if sqf.degree() > 0:
            work(g // sqf, mult)
            work(sqf, mult)
            return
        # g squarefree: distinct-degree then equal-degree
        x = x_poly(F)
        h = x % g
        rest = g
        dd = 1
        while rest.degree() >= 2 * dd:
            h = h.pow_mod(F.order, rest)
            part = rest.gcd(h - x)
            if part.degree() > 0:
                for irr in _split_equal_degree(part, dd, rng):
                    add(irr, mult)
                rest = rest // part
                h = h % rest
            dd += 1
        if rest.degree() > 0:
            add(rest.monic(), mult)

    work(f, 1)
    items = sorted(factors.values(), key=lambda t: t[0].key())
    return items


def poly_roots(f):
    """All roots of f in its coefficient field (multiplicity discarded)."""
    if f.is_zero():
        raise ZeroPolynomial("root-finding needs a nonzero polynomial")
    F = f.field
    if f.degree() == 0:
        return set()
    lin = f.gcd(_frobenius_map_poly(f) - x_poly(F))
    if lin.degree() == 0:
        return set()
    roots = set()
    for g in _split_equal_degree(lin, 1, random.Random(0)):
        roots.add(-ExtFieldElement(F, g._c[0]))
    return roots


# ---------------------------------------------------------------------------
# tower embeddings

_EMBED_CACHE = {}
_EMBED_LOCK = threading.Lock()

_SECTION_BOUND = 1 << 16


class Embedding:
    """Field embedding F_{p^k} -> F_{p^{km}} via a chosen root of the modulus."""

    def __init__(self, small, big, root):
        self.small = small
        self.big = big
        self.root = root
        self._section = None

    def __call__(self, elt):
        if elt.field is self.big:
            return elt
        if elt.field is not self.small:
            raise ValueError("element not in the source field")
        B = self.big
        acc = B.zero()
        for c in reversed(elt.coeffs):
            acc = acc * self.root + c
        return acc

    def section(self, elt):
        """Preimage in the small field; raises KeyError if not in the image."""
        if self._section is None:
            if self.small.order > _SECTION_BOUND:
                raise ValueError("section table too large for this field pair")
            table = {}
            for n in range(self.small.order):
                s = self.small.from_enc(n)
                table[self(s).enc()] = s
            self._section = table
        return self._section[elt.enc()]


def embedding(small, big):
    """Cached embedding; the root of the small modulus is chosen lex-smallest."""
    if small is big:
        return Embedding(small, big, big.one())
    if small.p != big.p or big.k % small.k != 0:
        raise ValueError("no embedding %r -> %r" % (small, big))
    key = (id(small), id(big))
    emb = _EMBED_CACHE.get(key)
    if emb is not None:
        return emb
    if small.k == 1:
        emb = Embedding(small, big, big.one())
    else:
        mod_in_big = Poly(big, [big.elt(c) for c in small.modulus])
        roots = sorted(poly_roots(mod_in_big), key=lambda r: r.enc())
        emb = Embedding(small, big, roots[0])
    with _EMBED_LOCK:
        return _EMBED_CACHE.setdefault(key, emb)


def embed_poly(f, big):
    """Coefficientwise image of f under embedding(f.field, big)."""
    emb = embedding(f.field, big)
    return Poly(big, [emb(c) for c in f.coeffs])
