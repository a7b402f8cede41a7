#!/usr/bin/env python3
"""Generate fixtures/newforms.jsonl: weight-2 newform orbit data for Gamma0(N).

The database is computed from scratch with exact rational arithmetic so that
it can serve as an independent cross-check for the quaternionic side of the
test suite.  Pipeline, per level N:

  * Manin symbols indexed by P^1(Z/N) modulo the two- and three-term
    relations give the weight-2 modular symbol space for Gamma0(N).
  * The boundary map to cusp classes cuts out the cuspidal subspace, and
    the star involution cuts out its +1 part, whose dimension must equal
    the genus of X_0(N) (checked against the index/elliptic-point/cusp
    count formula at every level).
  * Hecke operators T_n act through Merel's universal matrices of
    determinant n (symbols whose image leaves P^1 are dropped, which also
    yields U_p at p | N).
  * The new part is split off by exact division of characteristic
    polynomials: each orbit of level M | N divides with multiplicity
    sigma_0(N/M).  Division is only performed at good primes; any nonzero
    remainder aborts the run.
  * Orbits are separated by factoring the characteristic polynomial of a
    squarefree combination of Hecke operators over Q, and each orbit
    records the traces of a_p for p <= 47 (bad primes included, i.e. U_p).
  * Local data at p | N (conductor exponent, representation kind, twist
    minimality) is decided by quadratic twist matching across the full
    database: an orbit at p-valuation e >= 2 that matches a quadratic
    twist of an orbit with p-valuation 0 is ramified principal series,
    with p-valuation 1 a twisted Steinberg, otherwise it is supercuspidal
    (minimal exactly when no twist lowers the valuation).

Self-checks, all fatal on failure: every space dimension against the genus
formula, every trace against the Hasse bound, exactness of all polynomial
divisions, and full eigenvalue agreement (good and bad primes) with the
classical eta-product expansions at levels 11, 14, 15, 20, 27, 32, 36,
plus the irreducible 2-dimensional orbit at level 23.

Usage: python3 tools/generate_fixtures.py [--out fixtures/newforms.jsonl]
"""

import argparse
import json
import sys
from fractions import Fraction
from math import gcd, isqrt

import sympy
from sympy import QQ, Poly, Symbol

X = Symbol("x")

AP_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]

LEVELS = list(range(1, 131)) + [343]


# ----------------------------------------------------------------------
# elementary number theory


def prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(n):
    r = n
    for p, _ in prime_factors(n):
        r = r // p * (p - 1)
    return r


def divisors(n):
    out = [1]
    for p, e in prime_factors(n):
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def kronecker(a, n):
    if n == 0:
        return 1 if abs(a) == 1 else 0
    if n < 0:
        return (-1 if a < 0 else 1) * kronecker(a, -n)
    t = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            t = -t
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                t = -t
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            t = -t
        a %= n
    return t if n == 1 else 0


def genus_data(N):
    """Return (mu, nu2, nu3, nuinf, genus) for X_0(N)."""
    mu = N
    for p, _ in prime_factors(N):
        mu = mu // p * (p + 1)
    if N % 4 == 0:
        nu2 = 0
    else:
        nu2 = 1
        for p, _ in prime_factors(N):
            if p == 2:
                continue
            nu2 *= 1 + kronecker(-1, p)
    if N % 9 == 0:
        nu3 = 0
    else:
        nu3 = 1
        for p, _ in prime_factors(N):
            if p == 3:
                continue
            nu3 *= 1 + kronecker(-3, p)
    nuinf = sum(euler_phi(gcd(d, N // d)) for d in divisors(N))
    g12 = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * nuinf
    assert g12 % 12 == 0, N
    return mu, nu2, nu3, nuinf, g12 // 12


def new_dimension(N):
    """Genus of the new part of X_0(N) via Dirichlet inversion of g."""
    total = 0
    for M in divisors(N):
        c = 1
        for _, e in prime_factors(N // M):
            c *= {1: -2, 2: 1}.get(e, 0)
        if c:
            total += c * genus_data(M)[4]
    return total


# ----------------------------------------------------------------------
# exact linear algebra, row-vector convention: operators act by v -> v * A

F0 = Fraction(0)
F1 = Fraction(1)


def mat_mul(A, B):
    n, m = len(A), len(B[0])
    k = len(B)
    Bt = list(zip(*B))
    return [[sum(A[i][t] * Bt[j][t] for t in range(k)) for j in range(m)] for i in range(n)]


def mat_identity(n):
    return [[F1 if i == j else F0 for j in range(n)] for i in range(n)]


def column_nullspace(A):
    """Basis (list of row vectors) of {x : A x = 0} for A given by rows."""
    if not A:
        return []
    rows = [list(r) for r in A]
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [u - f * v for u, v in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [F0] * ncols
        v[fc] = F1
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc]
        basis.append(v)
    return basis


def left_nullspace(A):
    return column_nullspace([list(col) for col in zip(*A)])


class SpanSolver:
    """Solve c * W = u for row vectors u in the row span of W."""

    def __init__(self, W):
        self.k = len(W)
        R = [list(r) for r in W]
        T = mat_identity(self.k)
        piv = []
        r = 0
        ncols = len(R[0]) if R else 0
        for c in range(ncols):
            pr = next((i for i in range(r, self.k) if R[i][c] != 0), None)
            if pr is None:
                continue
            R[r], R[pr] = R[pr], R[r]
            T[r], T[pr] = T[pr], T[r]
            inv = 1 / R[r][c]
            R[r] = [v * inv for v in R[r]]
            T[r] = [v * inv for v in T[r]]
            for i in range(self.k):
                if i != r and R[i][c] != 0:
                    f = R[i][c]
                    R[i] = [u - f * v for u, v in zip(R[i], R[r])]
                    T[i] = [u - f * v for u, v in zip(T[i], T[r])]
            piv.append(c)
            r += 1
            if r == self.k:
                break
        assert r == self.k, "basis rows are dependent"
        self.R, self.T, self.piv = R, T, piv

    def coords(self, u):
        u = list(u)
        lam = [F0] * self.k
        for i, pc in enumerate(self.piv):
            if u[pc] != 0:
                f = u[pc]
                lam[i] = f
                u = [a - f * b for a, b in zip(u, self.R[i])]
        assert all(a == 0 for a in u), "vector outside span"
        return [sum(lam[j] * self.T[j][i] for j in range(self.k)) for i in range(self.k)]


def restrict_operator(A, W):
    """Matrix of v -> v*A on the row span of W, in W-coordinates."""
    solver = SpanSolver(W)
    return [solver.coords(vec_mat(w, A)) for w in W]


def vec_mat(v, A):
    n = len(A[0])
    out = [F0] * n
    for i, vi in enumerate(v):
        if vi:
            row = A[i]
            for j in range(n):
                if row[j]:
                    out[j] += vi * row[j]
    return out


def poly_eval_matrix(coeffs_desc, A):
    """Evaluate a polynomial (descending coefficients) at a square matrix."""
    n = len(A)
    B = [[F0] * n for _ in range(n)]
    for c in coeffs_desc:
        B = mat_mul(B, A)
        if c:
            fc = Fraction(c)
            for i in range(n):
                B[i][i] += fc
    return B


# ----------------------------------------------------------------------
# polynomials via sympy, stored as tuples of ints in descending order


def charpoly_desc(A):
    if not A:
        return (1,)
    M = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in A])
    coeffs = M.charpoly(X).all_coeffs()
    out = []
    for c in coeffs:
        assert c.is_integer, "characteristic polynomial is not integral"
        out.append(int(c))
    return tuple(out)


def poly_from_desc(coeffs):
    return Poly(coeffs, X, domain=QQ)


def poly_divide_exact(num, den):
    q, r = num.div(den)
    assert r.is_zero, "inexact division"
    return q


def poly_is_squarefree(p):
    return sympy.gcd(p, p.diff(X)).degree() == 0


# ----------------------------------------------------------------------
# modular symbols for Gamma0(N)


def merel_set(n):
    mats = []
    for a in range(1, n + 1):
        for b in range(a):
            if b == 0:
                if n % a == 0:
                    d = n // a
                    mats.extend((a, 0, c, d) for c in range(d))
            else:
                dmax = (n - b) // (a - b)
                for d in range(1, dmax + 1):
                    num = a * d - n
                    if num >= 0 and num % b == 0:
                        c = num // b
                        if c < d:
                            mats.append((a, b, c, d))
    return mats


MEREL_CACHE = {}


def merel(n):
    if n not in MEREL_CACHE:
        MEREL_CACHE[n] = merel_set(n)
    return MEREL_CACHE[n]


def xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


class LevelSpace:
    """Weight-2 modular symbols for Gamma0(N) with exact arithmetic."""

    def __init__(self, N):
        self.N = N
        self.mu, self.nu2, self.nu3, self.nuinf, self.genus = genus_data(N)
        self._build_p1()
        self._build_quotient()
        self._build_boundary()
        self._build_plus_space()
        self._tn_cache = {}
        self._op_cache = {}

    # -- P^1(Z/N)

    def _build_p1(self):
        N = self.N
        units = [u for u in range(N) if gcd(u, N) == 1]
        index = {}
        reps = []
        for c in range(N):
            for d in range(N):
                if gcd(gcd(c, d), N) != 1:
                    continue
                if (c, d) in index:
                    continue
                k = len(reps)
                reps.append((c, d))
                for u in units:
                    index[(c * u) % N, (d * u) % N] = k
        self.p1 = reps
        self.p1_index = index

    # -- quotient by the two- and three-term relations

    def _build_quotient(self):
        N = self.N
        idx = self.p1_index
        npts = len(self.p1)
        rel_rows = {}

        def add_relation(terms):
            row = {}
            for j in terms:
                row[j] = row.get(j, F0) + F1
            row = {j: v for j, v in row.items() if v}
            if row:
                key = tuple(sorted(row.items()))
                rel_rows[key] = row

        for i, (c, d) in enumerate(self.p1):
            s = idx[d % N, (-c) % N]
            add_relation([i, s])
            t1 = idx[d % N, (-c - d) % N]
            t2 = idx[(-c - d) % N, c % N]
            add_relation([i, t1, t2])

        pivot_of = {}
        for row in rel_rows.values():
            row = dict(row)
            while row:
                c = min(row)
                if c in pivot_of:
                    f = row[c]
                    for cc, vv in pivot_of[c].items():
                        nv = row.get(cc, F0) - f * vv
                        if nv:
                            row[cc] = nv
                        else:
                            row.pop(cc, None)
                else:
                    inv = 1 / row[c]
                    pivot_of[c] = {cc: vv * inv for cc, vv in row.items()}
                    break

        for c in sorted(pivot_of, reverse=True):
            row = pivot_of[c]
            for cc in [k for k in row if k != c and k in pivot_of]:
                f = row[cc]
                for c3, v3 in pivot_of[cc].items():
                    if c3 == cc:
                        continue
                    nv = row.get(c3, F0) - f * v3
                    if nv:
                        row[c3] = nv
                    else:
                        row.pop(c3, None)
                row.pop(cc, None)

        free = [c for c in range(npts) if c not in pivot_of]
        free_pos = {c: i for i, c in enumerate(free)}
        self.dim = len(free)
        proj = []
        for c in range(npts):
            v = [F0] * self.dim
            if c in pivot_of:
                for cc, vv in pivot_of[c].items():
                    if cc != c:
                        v[free_pos[cc]] -= vv
            else:
                v[free_pos[c]] = F1
            proj.append(v)
        self.free = free
        self.proj = proj
        expected = 2 * self.genus + self.nuinf - 1
        assert self.dim == expected, (self.N, self.dim, expected)

    # -- boundary map and cusp classes

    def _lift_to_sl2(self, c, d):
        N = self.N
        if c % N == 0:
            c1, d1 = 0, 1
        elif d % N == 0:
            c1, d1 = 1, 0
        else:
            c1, d1 = c % N, d % N
            while gcd(c1, d1) != 1:
                d1 += N
        g, x, y = xgcd(d1, c1)
        assert g == 1
        a, b = x, -y
        assert a * d1 - b * c1 == 1
        return a, b, c1, d1

    def _cusp_class(self, p, q):
        if q < 0:
            p, q = -p, -q
        g = gcd(abs(p), q)
        if g:
            p, q = p // g, q // g
        if q == 0:
            p = 1
        for i, rep in enumerate(self.cusps):
            if self._cusps_equivalent(rep, (p, q)):
                return i
        self.cusps.append((p, q))
        return len(self.cusps) - 1

    def _cusps_equivalent(self, c1, c2):
        # p1/q1 ~ p2/q2 on X_0(N) iff s1*q2 == s2*q1 mod gcd(q1*q2, N),
        # where s_i inverts p_i mod q_i
        (p1, q1), (p2, q2) = c1, c2

        def inv(p, q):
            if q == 0:
                return 1
            if q == 1:
                return 0
            return pow(p % q, -1, q)

        m = gcd(q1 * q2, self.N)
        if m == 0:
            return True
        return (inv(p1, q1) * q2 - inv(p2, q2) * q1) % m == 0

    def _build_boundary(self):
        self.cusps = []
        bd_rows = []
        for c in self.free:
            cc, dd = self.p1[c]
            a, b, c1, d1 = self._lift_to_sl2(cc, dd)
            row = {}
            i1 = self._cusp_class(a, c1)
            row[i1] = row.get(i1, F0) + F1
            i2 = self._cusp_class(b, d1)
            row[i2] = row.get(i2, F0) - F1
            bd_rows.append(row)
        ncusp = len(self.cusps)
        assert ncusp == self.nuinf, (self.N, ncusp, self.nuinf)
        dense = [[row.get(j, F0) for j in range(ncusp)] for row in bd_rows]
        self.cuspidal = left_nullspace(dense) if self.dim else []
        assert len(self.cuspidal) == 2 * self.genus, (self.N, len(self.cuspidal))

    # -- star involution and the plus part

    def _build_plus_space(self):
        N = self.N
        star = []
        for c in self.free:
            cc, dd = self.p1[c]
            star.append(self.proj[self.p1_index[(-cc) % N, dd % N]])
        if not self.cuspidal:
            self.plus = []
            return
        R = restrict_operator(star, self.cuspidal)
        for i in range(len(R)):
            R[i][i] -= F1
        ker = left_nullspace(R)
        self.plus = mat_mul(ker, self.cuspidal) if ker else []
        assert len(self.plus) == self.genus, (self.N, len(self.plus), self.genus)

    # -- Hecke action

    def hecke_matrix(self, n):
        """Matrix of T_n on the full quotient space (row convention)."""
        if n in self._tn_cache:
            return self._tn_cache[n]
        N = self.N
        idx = self.p1_index
        proj = self.proj
        rows = []
        for c in self.free:
            u, v = self.p1[c]
            acc = [F0] * self.dim
            for a, b, c2, d2 in merel(n):
                uu = (u * a + v * c2) % N
                vv = (u * b + v * d2) % N
                j = idx.get((uu, vv))
                if j is None:
                    continue
                pv = proj[j]
                for t in range(self.dim):
                    if pv[t]:
                        acc[t] += pv[t]
            rows.append(acc)
        self._tn_cache[n] = rows
        return rows

    def plus_operator(self, n):
        """T_n restricted to the cuspidal plus subspace."""
        if n not in self._op_cache:
            self._op_cache[n] = restrict_operator(self.hecke_matrix(n), self.plus)
        return self._op_cache[n]


# ----------------------------------------------------------------------
# newform orbit extraction


class Orbit:
    def __init__(self, level, dim):
        self.level = level
        self.label = None
        self.dim = dim
        self.traces = {}
        self.charpolys = {}
        self.bad = {}

    def trace_vector(self, primes):
        return tuple(self.traces[p] for p in primes)


def hasse_ok(p, dim, trace):
    return trace * trace <= 4 * p * dim * dim


def extract_orbits(N, space, db):
    """Split the new part of the plus space at level N into Hecke orbits."""
    g = space.genus
    if g == 0:
        return []
    new_dim = new_dimension(N)
    good = [p for p in AP_PRIMES if N % p != 0]
    store_primes = AP_PRIMES + [p for p, _ in prime_factors(N) if p not in AP_PRIMES]

    old = []
    for M in divisors(N):
        if M == N:
            continue
        mult = len(divisors(N // M))
        for orb in db.get(M, []):
            old.append((orb, mult))

    new_polys = {}
    for p in good:
        cp = poly_from_desc(charpoly_desc(space.plus_operator(p)))
        for orb, mult in old:
            cp = poly_divide_exact(cp, poly_from_desc(orb.charpolys[p]) ** mult)
        assert cp.degree() == new_dim, (N, p, cp.degree(), new_dim)
        new_polys[p] = cp

    if new_dim == 0:
        return []

    # carve out the new subspace inside the plus part
    V = None
    for p in good:
        poly = new_polys[p]
        A = space.plus_operator(p)
        K = left_nullspace(poly_eval_matrix([int(c) for c in poly.all_coeffs()], A))
        if V is None:
            V = K
        else:
            # intersection of row spans: lam*V = -mu*K for (lam | mu) in the
            # left nullspace of the stacked matrix
            rels = left_nullspace(V + K)
            inter = [r[: len(V)] for r in rels]
            V = mat_mul(inter, V) if inter else []
        if len(V) == new_dim:
            break
    assert V is not None and len(V) == new_dim, (N, len(V) if V else 0, new_dim)

    # V lives in plus coordinates; restrict operators to it
    ops = {p: restrict_operator(space.plus_operator(p), V) for p in store_primes}

    # find a separating operator with squarefree characteristic polynomial
    combos = [[(p, 1)] for p in good]
    combos += [[(good[0], 1), (good[i], k)] for i in range(1, len(good)) for k in (1, 2, 3)]
    combos += [
        [(good[0], 1), (good[i], k), (good[j], m)]
        for i in range(1, min(4, len(good)))
        for j in range(i + 1, min(5, len(good)))
        for k in (1, 2)
        for m in (1, 3)
    ]
    sep = None
    for combo in combos:
        C = [[F0] * new_dim for _ in range(new_dim)]
        for p, k in combo:
            for i in range(new_dim):
                for j in range(new_dim):
                    C[i][j] += k * ops[p][i][j]
        cp = poly_from_desc(charpoly_desc(C))
        if poly_is_squarefree(cp):
            sep = (C, cp)
            break
    assert sep is not None, (N, "no squarefree separating operator found")
    C, cp = sep

    factors = sympy.factor_list(cp.as_expr(), X)[1]
    orbits = []
    for fac, mult in sorted(factors, key=lambda fm: (sympy.degree(fm[0], X), str(fm[0]))):
        assert mult == 1
        fp = Poly(fac, X, domain=QQ)
        coeffs = [int(c) for c in fp.all_coeffs()]
        U = left_nullspace(poly_eval_matrix(coeffs, C))
        assert len(U) == fp.degree(), (N, str(fac))
        orb = Orbit(N, len(U))
        for p in store_primes:
            R = restrict_operator(ops[p], U)
            poly = charpoly_desc(R)
            orb.charpolys[p] = poly
            tr = -poly[1] if len(poly) > 1 else 0
            assert hasse_ok(p, orb.dim, tr), (N, p, tr, "Hasse bound violated")
            orb.traces[p] = tr
        orbits.append(orb)

    assert sum(o.dim for o in orbits) == new_dim
    orbits.sort(key=lambda o: (o.dim, o.trace_vector(AP_PRIMES)))
    for i, orb in enumerate(orbits):
        assert i < 26, "orbit label overflow"
        orb.label = f"{N}{chr(ord('a') + i)}"
    return orbits


# ----------------------------------------------------------------------
# local classification by twist matching


def twisted_charpoly(coeffs, sign):
    """Characteristic polynomial with all roots scaled by sign (+1 or -1)."""
    if sign == 1:
        return tuple(coeffs)
    # descending coefficients: c_i multiplies x^(d-i); f(x) -> (-1)^d f(-x)
    return tuple(c if i % 2 == 0 else -c for i, c in enumerate(coeffs))


def twist_matches(f, g, disc):
    """Does f agree with g twisted by the quadratic character of disc?"""
    if f.dim != g.dim:
        return False
    checked = 0
    for p in AP_PRIMES:
        if f.level % p == 0 or g.level % p == 0 or (2 * disc) % p == 0:
            continue
        chi = kronecker(disc, p)
        if f.charpolys[p] != twisted_charpoly(g.charpolys[p], chi):
            return False
        checked += 1
    return checked >= 8


def classify_bad_primes(all_orbits):
    by_level = {}
    for orb in all_orbits:
        by_level.setdefault(orb.level, []).append(orb)

    for f in all_orbits:
        N = f.level
        for p, e in prime_factors(N):
            if e == 1:
                assert abs(f.traces[p]) == f.dim, (f.label, p, "Steinberg trace")
                f.bad[p] = {"c": 1, "kind": "steinberg", "minimal": True}
                continue
            assert f.traces[p] == 0, (f.label, p, "U_p trace at e >= 2")
            expected = tuple([1] + [0] * f.dim)
            assert f.charpolys[p] == expected, (f.label, p, "U_p nilpotent at e >= 2")

            if p == 2:
                chars = [-4, 8, -8]
            else:
                chars = [p if p % 4 == 1 else -p]

            best = None
            for disc in chars:
                for M, orbs in by_level.items():
                    vM = 0
                    t = M
                    while t % p == 0:
                        t //= p
                        vM += 1
                    if vM >= e or t != N // p**e:
                        continue
                    for g in orbs:
                        if twist_matches(f, g, disc):
                            if best is None or vM < best:
                                best = vM
            if best is None:
                kind, minimal = "supercuspidal", True
            elif best == 0:
                kind, minimal = "principal-series", False
            elif best == 1:
                kind, minimal = "special-twist", False
            else:
                kind, minimal = "supercuspidal", False
            if kind in ("principal-series", "special-twist"):
                # twists by quadratic characters of conductor p (odd) or 4, 8
                assert e in ({4, 6} if p == 2 else {2}), (f.label, p, kind, e)
            f.bad[p] = {"c": e, "kind": kind, "minimal": minimal}


# ----------------------------------------------------------------------
# eta product cross-validation


def eta_product(parts, prec):
    """Coefficients a_1..a_prec of prod_j eta(m_j z)^(e_j)."""
    off = sum(m * e for m, e in parts)
    assert off % 24 == 0
    off //= 24
    # eta(mz) = q^(m/24) prod_{k>=1} (1 - q^(mk))
    c = [0] * (prec + 1)
    c[0] = 1
    for m, e in parts:
        for _ in range(e):
            k = 1
            while m * k <= prec:
                j = m * k
                for i in range(prec, j - 1, -1):
                    c[i] -= c[i - j]
                k += 1
    return {n: (c[n - off] if 0 <= n - off <= prec else 0) for n in range(1, prec + 1)}


ETA_NEWFORMS = {
    11: [(1, 2), (11, 2)],
    14: [(1, 1), (2, 1), (7, 1), (14, 1)],
    15: [(1, 1), (3, 1), (5, 1), (15, 1)],
    20: [(2, 2), (10, 2)],
    27: [(3, 2), (9, 2)],
    32: [(4, 2), (8, 2)],
    36: [(6, 4)],
}


def validate_against_eta(db):
    for N, parts in ETA_NEWFORMS.items():
        orbs = db.get(N, [])
        assert len(orbs) == 1 and orbs[0].dim == 1, (N, "expected one rank-1 orbit")
        series = eta_product(parts, 50)
        for p in AP_PRIMES:
            assert orbs[0].traces[p] == series[p], (N, p, orbs[0].traces[p], series[p])
    # the first irreducible 2-dimensional orbit: level 23, T_2 has x^2 + x - 1
    orbs = db.get(23, [])
    assert len(orbs) == 1 and orbs[0].dim == 2
    assert orbs[0].charpolys[2] == (1, 1, -1), orbs[0].charpolys[2]


# ----------------------------------------------------------------------


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="fixtures/newforms.jsonl")
    args = ap.parse_args()

    db = {}
    total = 0
    for N in LEVELS:
        if N == 1:
            db[N] = []
            continue
        space = LevelSpace(N)
        orbits = extract_orbits(N, space, db)
        db[N] = orbits
        total += len(orbits)
        if orbits:
            dims = ",".join(str(o.dim) for o in orbits)
            print(f"level {N:>3}: genus {space.genus:>2}, new orbits [{dims}]")

    all_orbits = [o for N in LEVELS for o in db[N]]
    classify_bad_primes(all_orbits)
    validate_against_eta(db)

    with open(args.out, "w") as fh:
        for orb in all_orbits:
            rec = {
                "level": orb.level,
                "label": orb.label,
                "dim": orb.dim,
                "ap": {str(p): orb.traces[p] for p in sorted(orb.traces)},
                "bad": {
                    str(p): orb.bad[p] for p in sorted(orb.bad)
                },
            }
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    print(f"wrote {total} orbits to {args.out}")


if __name__ == "__main__":
    main()
