"""Hochschild homology of bimodule complexes and triply graded tables.

The Hochschild complex of a bimodule M is the Koszul complex M x Lambda[theta]
with delta = sum_i (x_i - x'_i) theta_i.  For a complex C this gives a
bicomplex (d_C, delta); HHH is the homology of d_C on the delta-homology.
Both steps are computed from exact ranks of finite slice matrices:

    dim H_delta        = dim V - rank delta_out - rank delta_in
    rank of induced d  = rank [[d, delta_in'], [delta_out, 0]] - rank delta_out - rank delta_in'

Internally theta has degree (a, q, t) = (2, -2, 0) so that delta is
homogeneous of degree (2, 0, 0); tables are regraded on output.
"""

from itertools import combinations

import sympy

from .gradedlinalg import (HMatrix, SliceSpace, TriGradedTable, Window, exact_rank, parallel_map,
                           slice_rows, stack_rank)
from .ring import Poly, variable, xvar
from .soergel import ring_vars, rouquier_complex

THETA_RAW = (2, -2, 0)
T_PER_THETA = 1


class Normalization:
    """Raw (internal) gradings <-> link-invariant gradings for a braid closure.

    Hochschild degree shift (n - e - c)/2, homological shift (n + e - c)/2 and
    quantum shift n - c; theta is regraded to q-degree 0 and carries
    homological degree T_PER_THETA per unit of normalized Hochschild degree.
    """

    def __init__(self, n, e, c):
        if (n - e - c) % 2:
            raise ValueError("parity violation: n - e - c must be even")
        self.n, self.e, self.c = n, e, c
        self.s = (n - e - c) // 2
        self.m = (n + e - c) // 2

    @staticmethod
    def of(beta):
        return Normalization(beta.n, beta.writhe(), beta.components())

    def to_norm(self, a, q, t):
        k = a // 2
        kn = k - self.s
        return (2 * kn, q + a + self.n - self.c, t + self.m + T_PER_THETA * kn)

    def to_raw(self, a, q, t):
        kn = a // 2
        k = kn + self.s
        ar = 2 * k
        return (ar, q - ar - (self.n - self.c), t - self.m - T_PER_THETA * kn)

    def as_dict(self):
        return {"n": self.n, "writhe": self.e, "components": self.c,
                "theta_degree": [2, 0, T_PER_THETA], "hochschild_shift": self.s, "homological_shift": self.m,
                "quantum_shift": self.n - self.c}


def _sign_insert(S, i):
    return -1 if sum(1 for s in S if s < i) % 2 else 1


class HHComplex:
    """C x Lambda[theta_i, i in odd] with the bicomplex differentials d and delta.

    split=True uses the exterior generators theta_i - theta_1 (i >= 2) only; the
    dropped factor Lambda[theta_1] splits off exactly because sum x_i = sum x'_i.
    reduce_x1=True additionally sets x_1 = 0 (translation invariance).
    """

    def __init__(self, C, split=False, reduce_x1=False):
        if C.curvature:
            raise ValueError("Hochschild complex of a curved complex is not formed here")
        n = C.n
        self.base = C
        self.n = n
        self.split = split
        self.reduce_x1 = reduce_x1
        self.odd = list(range(2, n + 1)) if split else list(range(1, n + 1))
        self.subsets = [S for r in range(len(self.odd) + 1) for S in combinations(self.odd, r)]
        self.sidx = {S: k for k, S in enumerate(self.subsets)}
        N = C.rank
        self.N = N
        sub = {}
        if reduce_x1:
            sub = {variable("x", 1).id: Poly()}
            self.ring = [v for v in ring_vars(n) if v != variable("x", 1).id]
        else:
            self.ring = ring_vars(n)
        self._sub = sub
        dC = self._s(C.d)
        right = {i: self._s(M) for i, M in C.right.items()}
        self.right = right
        degs = []
        for S in self.subsets:
            r = len(S)
            for g in C.degs:
                degs.append((g[0] + THETA_RAW[0] * r, g[1] + THETA_RAW[1] * r, g[2] + THETA_RAW[2] * r))
        self.degs = degs
        total = len(degs)
        d = HMatrix(total, total)
        for S in self.subsets:
            off = self.sidx[S] * N
            for i, j, p in dC.entries():
                d.set(off + i, off + j, p)
        delta = HMatrix(total, total)
        for S in self.subsets:
            for i in self.odd:
                if i in S:
                    continue
                T = tuple(sorted(S + (i,)))
                sg = _sign_insert(S, i)
                xi = xvar(i).subs(sub) if sub else xvar(i)
                M = HMatrix.identity(N, xi) - right[i]
                so, to = self.sidx[S] * N, self.sidx[T] * N
                for r, c, p in M.entries():
                    delta.add_to(to + r, so + c, p * sg)
        self.d = d
        self.delta = delta

    def _s(self, M):
        if not self._sub:
            return M
        return M.map_entries(lambda p: p.subs(self._sub))

    def extend(self, F, parity=0):
        """An endomorphism F of C (commuting with the right action) acting on V.

        The bicomplex uses commuting differentials, so F acts block-diagonally
        without signs.
        """
        F = self._s(F)
        out = HMatrix(len(self.degs), len(self.degs))
        for S in self.subsets:
            off = self.sidx[S] * self.N
            for i, j, p in F.entries():
                out.set(off + i, off + j, p)
        return out

    def theta_insert(self, i):
        """Left multiplication by theta_i on V (i in self.odd)."""
        total = len(self.degs)
        out = HMatrix(total, total)
        for S in self.subsets:
            if i in S:
                continue
            T = tuple(sorted(S + (i,)))
            sg = _sign_insert(S, i)
            so, to = self.sidx[S] * self.N, self.sidx[T] * self.N
            for g in range(self.N):
                out.set(to + g, so + g, sg)
        return out

    def check(self):
        d, delta = self.d, self.delta
        ok_d = (d @ d).is_zero()
        ok_delta = (delta @ delta).is_zero()
        ok_comm = (d @ delta - delta @ d).is_zero()
        return {"d2": ok_d, "delta2": ok_delta, "commute": ok_comm}

    def total_differential(self):
        """d + (-1)^t delta, a differential of the total complex."""
        total = len(self.degs)
        sgn = HMatrix(total, total)
        for k, g in enumerate(self.degs):
            sgn.set(k, k, -1 if g[2] % 2 else 1)
        return self.d + self.delta @ sgn


def hh_complex(C, split=False, reduce_x1=False):
    return HHComplex(C, split, reduce_x1)


class E2Engine:
    """Exact dimensions of H_D(H_delta) for commuting differentials on a free module.

    D has degree (0, 0, -1) and delta degree (2, 0, 0) on (a, q, t) slices.
    """

    def __init__(self, degs, ring, D, delta):
        self.space = SliceSpace(degs, ring)
        self.D = D
        self.delta = delta
        self._rank = {}
        self._rows = {}
        amax = max((g[0] for g in degs), default=0)
        self.amax = amax

    def rows(self, which, s):
        key = (which, s)
        r = self._rows.get(key)
        if r is None:
            M, dg = (self.D, (0, 0, -1)) if which == "D" else (self.delta, (2, 0, 0))
            r = slice_rows(M, self.space, self.space, s, dg)[0]
            self._rows[key] = r
        return r

    def dim(self, s):
        return self.space.dim(s)

    def rank_delta(self, s):
        key = ("delta", s)
        if key not in self._rank:
            self._rank[key] = 0 if s[0] < 0 or not self.dim(s) else exact_rank(self.rows("delta", s))
        return self._rank[key]

    def h_delta(self, s):
        a, q, t = s
        return self.dim(s) - self.rank_delta(s) - self.rank_delta((a - 2, q, t))

    def rank_dbar(self, s):
        """Rank of the induced D on delta-homology, from slice s to s - (0,0,1)."""
        key = ("dbar", s)
        if key in self._rank:
            return self._rank[key]
        a, q, t = s
        tgt = (a, q, t - 1)
        win = (a - 2, q, t - 1)
        out = (a + 2, q, t)
        if not self.dim(s) or not self.dim(tgt):
            self._rank[key] = 0
            return 0
        blocks = {(0, 0): self.rows("D", s), (1, 0): self.rows("delta", s)}
        if self.dim(win):
            blocks[(0, 1)] = self.rows("delta", win)
        r = stack_rank(blocks, [self.dim(tgt), self.dim(out)], [self.dim(s), self.dim(win)])
        val = r - self.rank_delta(s) - self.rank_delta(win)
        self._rank[key] = val
        return val

    def e2(self, s):
        a, q, t = s
        h = self.h_delta(s)
        if not h:
            return 0
        return h - self.rank_dbar(s) - self.rank_dbar((a, q, t + 1))

    def image_dim(self, s):
        """dim of Im delta + D(ker delta) inside the slice s."""
        a, q, t = s
        above = (a, q, t + 1)
        below = (a - 2, q, t)
        blocks = {}
        cols = [self.dim(below), self.dim(above)]
        if cols[0]:
            blocks[(0, 0)] = self.rows("delta", below)
        if cols[1]:
            blocks[(0, 1)] = self.rows("D", above)
            blocks[(1, 1)] = self.rows("delta", above)
        r = stack_rank(blocks, [self.dim(s), self.dim((a + 2, q, t + 1))], cols)
        return r - self.rank_delta(above)

    def induced_rank(self, G_rows, s, s2):
        """Rank of the map induced on E2 by G: V_s -> V_s2 (commuting with delta,
        and with D modulo delta-boundaries on delta-cycles)."""
        a, q, t = s
        a2, q2, t2 = s2
        w = (a - 2, q, t - 1)
        A = (a2 - 2, q2, t2)
        B = (a2, q2, t2 + 1)
        dims_c = [self.dim(s), self.dim(w), self.dim(A), self.dim(B)]
        dims_r = [self.dim(s2), self.dim((a + 2, q, t)), self.dim((a, q, t - 1)), self.dim((a2 + 2, q2, t2 + 1))]
        blocks = {(0, 0): G_rows}
        if dims_c[2]:
            blocks[(0, 2)] = self.rows("delta", A)
        if dims_c[3]:
            blocks[(0, 3)] = self.rows("D", B)
            blocks[(3, 3)] = self.rows("delta", B)
        if dims_c[0]:
            blocks[(1, 0)] = self.rows("delta", s)
            blocks[(2, 0)] = self.rows("D", s)
        if dims_c[1]:
            blocks[(2, 1)] = [{c: -v for c, v in r.items()} for r in self.rows("delta", w)]
        rM = stack_rank(blocks, dims_r, dims_c)
        psi = {}
        if dims_c[0]:
            psi[(0, 0)] = self.rows("delta", s)
            psi[(1, 0)] = self.rows("D", s)
        if dims_c[1]:
            psi[(1, 1)] = self.rows("delta", w)
        rPsi = stack_rank(psi, [dims_r[1], dims_r[2]], [dims_c[0], dims_c[1]])
        return rM - rPsi - self.rank_delta(B) - self.image_dim(s2)


def _column_job(args):
    engine, q, slices = args
    return [(s, engine.e2(s)) for s in slices]


def e2_table(engine, slices, jobs=None):
    by_q = {}
    for s in slices:
        by_q.setdefault(s[1], []).append(s)
    work = [(engine, q, by_q[q]) for q in sorted(by_q)]
    res = parallel_map(_column_job, work, jobs)
    out = {}
    for part in res:
        for s, v in part:
            if v:
                out[s] = v
    return out


def raw_slices_for_window(norm, window, kmax, tlo, thi):
    """Raw slices whose normalized image lies in the window."""
    out = []
    for k in range(0, kmax + 1):
        for qn in range(window.qmin, window.qmax + 1):
            for tn in range(window.tmin, window.tmax + 1):
                an = 2 * (k - norm.s)
                if window.amin is not None and an < window.amin:
                    continue
                if window.amax is not None and an > window.amax:
                    continue
                r = norm.to_raw(an, qn, tn)
                if tlo <= r[2] <= thi:
                    out.append(r)
    return out


def _normalize(norm, raw):
    return {norm.to_norm(*s): v for s, v in raw.items() if v}


def _tensor_unknot_factor(red, window, lam_sign=True):
    """Multiply a normalized table by Q[x] x Lambda[theta] and restrict to the window."""
    out = {}
    for (a, q, t), v in red.items():
        for eps in (0, 1):
            a2, t2 = a + 2 * eps, t + T_PER_THETA * eps
            m = 0
            while q + 2 * m <= window.qmax:
                key = (a2, q + 2 * m, t2)
                if window.contains(*key):
                    out[key] = out.get(key, 0) + v
                m += 1
    return out


def hhh_table(beta, window, method="split", reduced=False, jobs=None):
    """Normalized triply graded homology of the closure of beta inside the window.

    method "full" works with all theta's and variables; "split" factors off
    Lambda[theta_1] and sets x_1 = 0, then tensors back Q[x_1] x Lambda[theta_1].
    reduced=True returns the x_1 = 0 split homology itself.
    """
    if isinstance(window, str):
        window = Window.parse(window)
    norm = Normalization.of(beta)
    C = rouquier_complex(beta)
    tlo = min(g[2] for g in C.degs)
    thi = max(g[2] for g in C.degs)
    meta = {"braid": beta.word, "strands": beta.n, "normalization": norm.as_dict(), "method": method,
            "reduced": reduced, "certified": True}
    if method == "full" and not reduced:
        V = hh_complex(C)
        eng = E2Engine(V.degs, V.ring, V.d, V.delta)
        raw = e2_table(eng, raw_slices_for_window(norm, window, beta.n, tlo, thi), jobs)
        return TriGradedTable(_normalize(norm, raw), window, meta)
    V = hh_complex(C, split=True, reduce_x1=True)
    eng = E2Engine(V.degs, V.ring, V.d, V.delta)
    if reduced:
        raw = e2_table(eng, raw_slices_for_window(norm, window, beta.n - 1, tlo, thi), jobs)
        return TriGradedTable(_normalize(norm, raw), window, meta)
    # reduced part is needed below the window in q (x_1 powers raise q) and one theta lower in a
    qlow = min(g[1] for g in V.degs) + min(0, norm.to_norm(0, 0, 0)[1]) - 2 * beta.n - 4
    ext = Window(min(window.qmin, qlow), window.qmax, window.tmin - T_PER_THETA, window.tmax,
                 None if window.amin is None else window.amin - 2, window.amax)
    raw = e2_table(eng, raw_slices_for_window(norm, ext, beta.n - 1, tlo, thi), jobs)
    red = _normalize(norm, raw)
    return TriGradedTable(_tensor_unknot_factor(red, window), window, meta)


# ---------------------------------------------------------------------------
# HOMFLY-PT


A_SYM, Q_SYM = sympy.symbols("a q")


def homfly_euler(table):
    """Alternating sum over t: sum a^a q^q (-1)^t dim."""
    P = sympy.Integer(0)
    for (a, q, t), v in sorted(table.dims.items()):
        P += (-1) ** (t % 2) * v * A_SYM ** a * Q_SYM ** q
    return sympy.expand(P)


def unknot_series():
    """Normalized Euler characteristic of the unknot: (1 - a^2) / (1 - q^2)."""
    sign = -1 if T_PER_THETA % 2 else 1
    return (1 + sign * A_SYM ** 2) / (1 - Q_SYM ** 2)


class _Hecke:
    """Hecke algebra with g^2 = (q - q^-1) g + 1 in the basis T_w; coefficients sympy."""

    z = -1 / Q_SYM  # trace of x g_n y over trace of x y (raw gradings)

    @staticmethod
    def mul_gen(elem, i):
        out = {}
        c1 = Q_SYM - 1 / Q_SYM
        for w, c in elem.items():
            ws = list(w)
            ws[i - 1], ws[i] = ws[i], ws[i - 1]
            ws = tuple(ws)
            if w[i - 1] < w[i]:
                out[ws] = out.get(ws, 0) + c
            else:
                out[ws] = out.get(ws, 0) + c
                out[w] = out.get(w, 0) + c * c1
        return {w: sympy.expand(c) for w, c in out.items() if sympy.expand(c) != 0}

    @staticmethod
    def mul_inv(elem, i):
        # g^-1 = g - (q - q^-1)
        g = _Hecke.mul_gen(elem, i)
        c1 = Q_SYM - 1 / Q_SYM
        for w, c in elem.items():
            g[w] = sympy.expand(g.get(w, 0) - c * c1)
        return {w: c for w, c in g.items() if c != 0}


def _trace_perm(w, U, memo):
    """Markov trace of T_w (w a permutation tuple of length n)."""
    if w in memo:
        return memo[w]
    n = len(w)
    if n == 1:
        return U
    if w[-1] == n:
        val = U * _trace_perm(w[:-1], U, memo)
    else:
        m = w.index(n) + 1
        u = list(w)
        for p in range(m - 1, n - 1):
            u[p], u[p + 1] = u[p + 1], u[p]
        u = tuple(u)
        # T_w = T_u g_{n-1} ... g_m; the Markov property removes g_{n-1}
        elem = {u[:-1]: sympy.Integer(1)}
        for i in range(n - 2, m - 1, -1):
            elem = _Hecke.mul_gen(elem, i)
        val = _Hecke.z * sum((c * _trace_perm(v, U, memo) for v, c in elem.items()), sympy.Integer(0))
    val = sympy.expand(val)
    memo[w] = val
    return val


def _canonical_rotation(word):
    if not word:
        return ()
    rots = [tuple(word[k:] + word[:k]) for k in range(len(word))]
    return min(rots)


_SKEIN_MEMO = {}


def raw_trace(beta):
    """Hecke-algebra trace of the braid with raw gradings (theta at a^2 q^-2)."""
    key = (beta.n, _canonical_rotation(beta.word))
    if key in _SKEIN_MEMO:
        return _SKEIN_MEMO[key]
    U = sympy.Symbol("U")
    elem = {tuple(range(1, beta.n + 1)): sympy.Integer(1)}
    for s in beta.word:
        elem = _Hecke.mul_gen(elem, s) if s > 0 else _Hecke.mul_inv(elem, -s)
    memo = {}
    total = sum((c * _trace_perm(w, U, memo) for w, c in elem.items()), sympy.Integer(0))
    _SKEIN_MEMO[key] = sympy.expand(total)
    return _SKEIN_MEMO[key]


def homfly_skein(beta):
    """HOMFLY-PT of the closure from the Hecke-algebra skein recursion, unknot = 1,
    in the same (a, q) conventions as homfly_euler of normalized tables."""
    if len(beta.word) > 14 or beta.n > 6:
        raise RecursionError("skein recursion bound exceeded")
    U = sympy.Symbol("U")
    tr = raw_trace(beta)
    norm = Normalization.of(beta)
    tsign = -1 if T_PER_THETA % 2 else 1
    # regrade: a^2 -> a^2 q^2 * tsign; overall monomial from the normalization
    U_raw = (1 + A_SYM ** 2 / Q_SYM ** 2) / (1 - Q_SYM ** 2)
    expr = tr.subs(U, U_raw)
    expr = expr.subs(A_SYM, A_SYM * Q_SYM * (sympy.I if tsign < 0 else 1))
    sign = (-1) ** ((norm.m - T_PER_THETA * norm.s) % 2)
    expr = sign * A_SYM ** (-2 * norm.s) * Q_SYM ** (norm.n - norm.c) * expr
    return sympy.factor(sympy.simplify(expr / unknot_series()))


def series_agree(P, table, window):
    """Compare a rational function with a table's Euler characteristic inside the window.

    Only q-degrees inside the window are compared, after expanding P as a power
    series in q (all tables considered are bounded below in q).
    """
    E = homfly_euler(table)
    lo = window.qmin
    hi = window.qmax
    ser = sympy.series(P, Q_SYM, 0, hi + 1).removeO()
    ser = sympy.expand(ser)
    diff = sympy.expand(ser - E)
    bad = []
    for term in sympy.Add.make_args(diff):
        if term == 0:
            continue
        powers = sympy.Poly(term * Q_SYM ** 200 * A_SYM ** 200, Q_SYM, A_SYM).monoms()[0]
        qd, ad = powers[0] - 200, powers[1] - 200
        if lo <= qd <= hi and window.contains(ad, qd, window.tmin):
            bad.append(term)
    return not bad, bad


def cyclic_check(b1, b2, window, jobs=None):
    """Equal normalized tables for two braids related by cyclic rotation."""
    if b1.n != b2.n or not any(b1.rotate(k).word == b2.word for k in range(max(1, len(b1.word)))):
        raise ValueError("braids are not cyclic rotations of each other")
    t1 = hhh_table(b1, window, jobs=jobs)
    t2 = hhh_table(b2, window, jobs=jobs)
    return t1 == t2


def reduced_table(beta, window, jobs=None):
    """Reduced homology of a knot by dividing HY by the series of HY(unknot).

    HY(unknot) = Q[x, y] x Lambda[theta]; the quotient has finitely many
    nonnegative coefficients for a knot.
    """
    from .yify import hy_table

    if beta.components() != 1:
        raise ValueError("reduced_table needs a knot")
    if isinstance(window, str):
        window = Window.parse(window)
    hy = hy_table(beta, window, jobs=jobs).table
    return divide_unknot(hy, window)


def divide_unknot(hy, window):
    """Series division by (1 + a^2 t) / ((1 - q^2)(1 - q^-2 t^-2)) degree by degree.

    The y-variable has degree (0, -2, -2), so the division is run from the
    top homological degree and the lowest q upward within each (a, t) strand.
    """
    dims = dict(hy.dims)
    out = {}
    # peel classes: the generator of each remaining string is its minimal-(q) element
    # in the direction of x (q+2) and y (q-2, t-2); order by (a, t descending, q ascending)
    def order(k):
        a, q, t = k
        return (a, -t, q + t)

    while True:
        live = sorted((k for k, v in dims.items() if v), key=order)
        if not live:
            break
        a, q, t = live[0]
        v = dims[(a, q, t)]
        if v < 0:
            raise ValueError("negative coefficient at %s: window too small or convention error" % ((a, q, t),))
        out[(a, q, t)] = out.get((a, q, t), 0) + v
        for eps in (0, 1):
            for mx in range(0, (window.qmax - window.qmin) // 2 + 4):
                for my in range(0, (window.tmax - window.tmin) // 2 + 4):
                    key = (a + 2 * eps, q + 2 * mx - 2 * my, t - 2 * my + T_PER_THETA * eps)
                    if window.contains(*key):
                        dims[key] = dims.get(key, 0) - v
        if any(val < 0 for val in dims.values()):
            bad = [k for k, val in dims.items() if val < 0]
            raise ValueError("negative coefficient at %s: window too small or convention error" % (bad[0],))
    return TriGradedTable(out, window, {"reduced": True})
