"""y-ification, HY, the operators F_k and hard Lefschetz checks.

Operators on C x Q[y] are kept as differential operators sum_alpha M_alpha d^alpha
(matrix coefficients on the left, y-derivatives on the right), so that all
chain-level identities can be checked exactly.
"""

from math import comb

from .action import braid_action, transport_action, verify_action
from .gradedlinalg import HMatrix, TriGradedTable, Window, add3, gaussian_simplify, invert_perm, parallel_map
from .hochschild import (T_PER_THETA, E2Engine, HHComplex, Normalization, _normalize, _tensor_unknot_factor, e2_table,
                         raw_slices_for_window)
from .ring import Poly, complete_homogeneous, variable, xvar
from .soergel import ring_vars


def yvar(i):
    return variable("y", i)


# ---------------------------------------------------------------------------
# differential operators in y


def _alpha_add(a, b):
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted((v, e) for v, e in d.items() if e))


def _alpha_le(g, a):
    da = dict(a)
    return all(da.get(v, 0) >= e for v, e in g)


def _sub_alphas(a):
    out = [()]
    for v, e in a:
        out = [g + ((v, k),) if k else g for g in out for k in range(e + 1)]
    return out


def _alpha_minus(a, g):
    d = dict(a)
    for v, e in g:
        d[v] -= e
    return tuple(sorted((v, e) for v, e in d.items() if e))


def _dmat(M, g):
    out = M
    for v, e in g:
        for _ in range(e):
            out = out.map_entries(lambda p, v=v: p.diff(v))
    return out


class DiffOp:
    def __init__(self, size, terms=None):
        self.size = size
        self.terms = {a: M for a, M in (terms or {}).items() if not M.is_zero()}

    @staticmethod
    def matrix(M):
        return DiffOp(M.nrows, {(): M})

    @staticmethod
    def scalar(size, p):
        return DiffOp(size, {(): HMatrix.identity(size, p)})

    @staticmethod
    def deriv(v, coeff):
        vid = v.id if hasattr(v, "id") else v
        return DiffOp(coeff.nrows, {((vid, 1),): coeff})

    def __add__(self, other):
        t = dict(self.terms)
        for a, M in other.terms.items():
            t[a] = t[a] + M if a in t else M
        return DiffOp(self.size, t)

    def __neg__(self):
        return DiffOp(self.size, {a: M.scale(-1) for a, M in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other):
        t = {}
        for a, M in self.terms.items():
            for b, N in other.terms.items():
                for g in _sub_alphas(a):
                    c = 1
                    for v, e in g:
                        c *= comb(dict(a)[v], e)
                    dN = _dmat(N, g)
                    if dN.is_zero():
                        continue
                    key = _alpha_add(_alpha_minus(a, g), b)
                    val = (M @ dN).scale(c)
                    t[key] = t[key] + val if key in t else val
        return DiffOp(self.size, t)

    def is_zero(self):
        return all(M.is_zero() for M in self.terms.values())

    def __eq__(self, other):
        return (self - other).is_zero()

    def map(self, fn):
        return DiffOp(self.size, {a: fn(M) for a, M in self.terms.items()})


def supercomm(A, B, pa, pb):
    """A B - (-1)^{pa pb} B A."""
    return A @ B - (B @ A if not (pa and pb) else -(B @ A))


# ---------------------------------------------------------------------------
# strict y-ification


class CurvedYComplex:
    """C x Q[y_1..y_n] with d_y = d + sum xi_i y_i and its curvature matrix."""

    def __init__(self, action, dy, curvature, yvars):
        self.action = action
        self.base = action.complex
        self.dy = dy
        self.curvature = curvature
        self.yvars = yvars
        self.ring = ring_vars(self.base.n) + [v.id for v in yvars.values()]

    @property
    def n(self):
        return self.base.n

    def check_curvature(self):
        return (self.dy @ self.dy - self.curvature).is_zero()

    def op(self):
        return DiffOp.matrix(self.dy)


def yify(A, check=True):
    if check and not verify_action(A, 1)["ok"]:
        raise ValueError("action does not satisfy the defining identities")
    C = A.complex
    n = C.n
    ys = {i: yvar(i) for i in range(1, n + 1)}
    dy = C.d
    winv = invert_perm(A.perm)
    curv = HMatrix(C.rank, C.rank)
    for i in range(1, n + 1):
        yi = Poly.from_var(ys[i])
        dy = dy + A.xi[i].scale(yi)
        curv = curv + (HMatrix.identity(C.rank, xvar(i)) - C.right[winv[i - 1]]).scale(yi)
    return CurvedYComplex(A, dy, curv, ys)


class FkOperator:
    """F_k = sum_i h_{k-1}(x_i, x'_{w^-1 i}) d/dy_i + u_k, of tri-degree (0, 2k, 2)."""

    def __init__(self, k, op):
        self.k = k
        self.op = op
        self.degree = (0, 2 * k, 2)


def fk_operator(Y, k):
    A = Y.action
    ev = A.evaluator()
    op = DiffOp.matrix(A.u[k])
    for i, v in Y.yvars.items():
        op = op + DiffOp.deriv(v, A.twisted_h(k - 1, i, ev))
    return FkOperator(k, op)


def check_fk(Y, kmax=None):
    """Exact chain-level identities for F_1..F_kmax; returns {name: bool}."""
    A = Y.action
    kmax = A.kmax if kmax is None else kmax
    N = Y.base.rank
    D = Y.op()
    F = {k: fk_operator(Y, k).op for k in range(1, kmax + 1)}
    ev = A.evaluator()
    out = {}
    for k in F:
        out["[d_y,F_%d]" % k] = supercomm(D, F[k], 1, 0).is_zero()
        for m in F:
            if m > k:
                out["[F_%d,F_%d]" % (k, m)] = supercomm(F[k], F[m], 0, 0).is_zero()
        for i, v in Y.yvars.items():
            yi = DiffOp.scalar(N, Poly.from_var(v))
            lhs = supercomm(F[k], yi, 0, 0)
            out["[F_%d,y_%d]" % (k, i)] = lhs == DiffOp.matrix(A.twisted_h(k - 1, i, ev))
            xi = DiffOp.scalar(N, xvar(i))
            out["[F_%d,x_%d]" % (k, i)] = supercomm(F[k], xi, 0, 0).is_zero()
    return out


def extended_yify(A, kmax=None):
    """d_{y,nu} = d_y + sum_k nu_k F_k on C x Lambda[nu_1..nu_K] x Q[y].

    The nu_k are odd of tri-degree (0, -2k, -3).  Returns (op, degs, curvature
    op, report) where report records the exact check of d_{y,nu}^2 = curvature.
    """
    from itertools import combinations

    kmax = A.kmax if kmax is None else kmax
    Y = yify(A)
    C = Y.base
    N = C.rank
    ks = list(range(1, kmax + 1))
    subsets = [S for r in range(len(ks) + 1) for S in combinations(ks, r)]
    sidx = {S: j for j, S in enumerate(subsets)}
    total = N * len(subsets)
    degs = []
    for S in subsets:
        shift = (0, 0, 0)
        for k in S:
            shift = add3(shift, variable("nu", k).deg)
        degs.extend(add3(g, shift) for g in C.degs)

    def embed(op, S, T, sign):
        out = {}
        so, to = sidx[S] * N, sidx[T] * N
        for a, M in op.terms.items():
            big = HMatrix(total, total)
            for i, j, p in M.entries():
                big.set(to + i, so + j, p * sign)
            out[a] = big
        return DiffOp(total, out)

    D = DiffOp(total)
    curv = DiffOp(total)
    dy = Y.op()
    cop = DiffOp.matrix(Y.curvature)
    for S in subsets:
        D = D + embed(dy, S, S, -1 if len(S) % 2 else 1)
        curv = curv + embed(cop, S, S, 1)
        for k in ks:
            if k in S:
                continue
            T = tuple(sorted(S + (k,)))
            sign = -1 if sum(1 for s in S if s < k) % 2 else 1
            D = D + embed(fk_operator(Y, k).op, S, T, sign)
    ok = (D @ D - curv).is_zero()
    return {"op": D, "degs": degs, "curvature": curv, "ok": ok, "nu": ks}


# ---------------------------------------------------------------------------
# link quotient and HY


def action_cycles(perm):
    """Cycles of the twist, each listed from its minimum c_1 with c_{m+1} = w^-1(c_m)."""
    winv = invert_perm(perm)
    seen = set()
    out = []
    for i in range(1, len(perm) + 1):
        if i in seen:
            continue
        cyc = [i]
        seen.add(i)
        j = winv[i - 1]
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = winv[j - 1]
        out.append(cyc)
    return out


class HYComplex:
    """HH of a y-ified complex with one y per link component.

    D = d + sum_c y_c Xi_c and delta commute; D^2 = delta h + h delta for an
    explicit contraction h, so D squares to zero on delta-homology.
    """

    def __init__(self, Y, split=True, reduce_x1=False):
        A = Y.action
        self.Y = Y
        self.action = A
        self.hh = HHComplex(Y.base, split=split, reduce_x1=reduce_x1)
        self.cycles = action_cycles(A.perm)
        self.ycomp = {c[0]: yvar(c[0]) for c in self.cycles}
        sub = {}
        for c in self.cycles:
            for i in c:
                sub[Y.yvars[i].id] = Poly.from_var(self.ycomp[c[0]])
        self.sub = sub
        dy = Y.dy.map_entries(lambda p: p.subs(sub))
        self.D = self.hh.extend(dy)
        self.delta = self.hh.delta
        self.degs = self.hh.degs
        self.ring = self.hh.ring + [v.id for v in self.ycomp.values()]
        self.contraction = self._contraction()

    def _iota(self, m):
        hh = self.hh
        total = len(hh.degs)
        out = HMatrix(total, total)
        for S in hh.subsets:
            if m not in S:
                continue
            T = tuple(s for s in S if s != m)
            sign = -1 if sum(1 for s in S if s < m) % 2 else 1
            so, to = hh.sidx[S] * hh.N, hh.sidx[T] * hh.N
            for g in range(hh.N):
                out.set(to + g, so + g, sign)
        return out

    def _contraction(self):
        hh = self.hh
        total = len(hh.degs)
        h = HMatrix(total, total)
        for c in self.cycles:
            yc = Poly.from_var(self.ycomp[c[0]])
            for i in c:
                if i in hh.odd:
                    h = h + self._iota(i).scale(yc)
                else:
                    # theta_1 is absent in the split model: x_1 - x'_1 = -sum_{m>1} (x_m - x'_m)
                    for m in hh.odd:
                        h = h - self._iota(m).scale(yc)
        return h

    def check(self):
        D, dl, h = self.D, self.delta, self.contraction
        return {
            "delta2": (dl @ dl).is_zero(),
            "commute": (D @ dl - dl @ D).is_zero(),
            "D2_null_homotopic": (D @ D - dl @ h - h @ dl).is_zero(),
        }

    def engine(self):
        return E2Engine(self.degs, self.ring, self.D, self.delta)


def link_quotient(Y, split=True, reduce_x1=False):
    Q = HYComplex(Y, split, reduce_x1)
    rep = Q.check()
    if not all(rep.values()):
        raise ValueError("residual curvature on Hochschild homology: %s" % rep)
    return Q


def _prepared_action(beta, kmax, simplify):
    A = braid_action(beta, kmax)
    if simplify:
        S = gaussian_simplify(A.complex, preserve_right=True, depth=simplify)
        if S.complex.rank < A.complex.rank:
            B = transport_action(A, S)
            if verify_action(B)["ok"]:
                return B
    return A


class HYResult:
    def __init__(self, table, complex, norm):
        self.table = table
        self.complex = complex
        self.norm = norm


def hy_table(beta, window, jobs=None, simplify=0):
    """Normalized HY of the closure inside the window.

    Dimensions are computed on the x_1 = 0, theta_1-free model and tensored
    with Q[x_1] x Lambda[theta_1]; the y-differential only involves the xi's,
    which are translation invariant.
    """
    if isinstance(window, str):
        window = Window.parse(window)
    norm = Normalization.of(beta)
    A = _prepared_action(beta, 1, simplify)
    Y = yify(A)
    Q = link_quotient(Y, split=True, reduce_x1=True)
    eng = Q.engine()
    # y preserves q - t and x raises q, so q - t is bounded below by the generators
    qt = min(norm.to_norm(*g)[1] - norm.to_norm(*g)[2] for g in Q.degs)
    qlow = qt + window.tmin - T_PER_THETA - 2
    ext = Window(min(window.qmin, qlow), window.qmax, window.tmin - 1, window.tmax,
                 None if window.amin is None else window.amin - 2, window.amax)
    raw = e2_table(eng, raw_slices_for_window(norm, ext, beta.n - 1, -10 ** 6, 10 ** 6), jobs)
    red = _normalize(norm, raw)
    meta = {"braid": beta.word, "strands": beta.n, "normalization": norm.as_dict(), "y_variables": len(Q.cycles),
            "certified": True}
    return HYResult(TriGradedTable(_tensor_unknot_factor(red, window), window, meta), Q, norm)


# ---------------------------------------------------------------------------
# F_k on the link quotient


def correction(A, k):
    """sum over cycles of sum_m h_{k-2}(x_c1, x_cm, x_c(m+1)) xi_cm (xi_c(m+1) + ... + xi_cL)."""
    N = A.complex.rank
    out = HMatrix(N, N)
    if k < 2:
        return out
    for c in action_cycles(A.perm):
        L = len(c)
        for m in range(L - 1):
            h = complete_homogeneous(k - 2, [xvar(c[0]), xvar(c[m]), xvar(c[m + 1])])
            tail = HMatrix(N, N)
            for r in range(m + 1, L):
                tail = tail + A.xi[c[r]]
            out = out + (A.xi[c[m]] @ tail).scale(h)
    return out


class QuotientFk:
    """F_k = sum_c k x_{j_c}^{k-1} d/dY_c + u_k + correction, on the HY model."""

    def __init__(self, Q, k):
        self.Q = Q
        self.k = k
        A = Q.action
        self.matrix = Q.hh.extend(A.u[k] + correction(A, k))
        self.deriv = {}
        for c in Q.cycles:
            p = xvar(c[0]) ** (k - 1) * k
            if Q.hh.reduce_x1:
                p = p.subs({variable("x", 1).id: 0})
            self.deriv[Q.ycomp[c[0]].id] = p
        self.degree = (0, 2 * k, 2)

    def op(self):
        size = len(self.Q.degs)
        op = DiffOp.matrix(self.matrix)
        for v, p in self.deriv.items():
            op = op + DiffOp.deriv(v, HMatrix.identity(size, p))
        return op

    def commutes_with_delta(self):
        dl = self.Q.delta
        return (self.matrix @ dl - dl @ self.matrix).is_zero()

    def slice_rows(self, eng, s):
        """Rows (target-indexed) of F_k from slice s to s + degree."""
        return operator_slice_rows(eng.space, self.matrix, self.deriv, self.degree, s)


def operator_slice_rows(sp, matrix, deriv, degree, s):
    """Rows of (matrix + sum_v p_v d/dv) from slice s to s + degree on a SliceSpace."""
    from .gradedlinalg import slice_rows

    rows = slice_rows(matrix, sp, sp, s, degree)[0]
    sbasis, _ = sp.basis(s)
    _, tindex = sp.basis(add3(s, degree))
    for v, p in deriv.items():
        pos = sp.rpos[v]
        dense = sp.dense(p)
        for col, (m, g) in enumerate(sbasis):
            e = m[pos]
            if not e:
                continue
            base = list(m)
            base[pos] -= 1
            for ex, c in dense:
                key = (tuple(a + b for a, b in zip(base, ex)), g)
                r = tindex[key]
                rows[r][col] = rows[r].get(col, 0) + e * c
    return [{c: v for c, v in r.items() if v} for r in rows]


def compose_rows(B, A):
    """Rows of B o A for target-indexed sparse rows."""
    out = []
    for row in B:
        acc = {}
        for k, b in row.items():
            for c, a in A[k].items():
                acc[c] = acc.get(c, 0) + b * a
        out.append({c: v for c, v in acc.items() if v})
    return out


def commutator_certificate(eng, F, s):
    """[D, F] maps delta-cycles of slice s into delta-boundaries."""
    from .gradedlinalg import stack_rank

    a, q, t = s
    DF = compose_rows(eng.rows("D", add3(s, F.degree)), F.slice_rows(eng, s))
    FD = compose_rows(F.slice_rows(eng, (a, q, t - 1)), eng.rows("D", s))
    G = [{c: DF[r].get(c, 0) - FD[r].get(c, 0) for c in set(DF[r]) | set(FD[r])} for r in range(len(DF))]
    G = [{c: v for c, v in r.items() if v} for r in G]
    tgt = add3(add3(s, F.degree), (0, 0, -1))
    below = (tgt[0] - 2, tgt[1], tgt[2])
    out = (a + 2, q, t)
    dims_r = [eng.dim(tgt), eng.dim(out)]
    dims_c = [eng.dim(below), eng.dim(s)]
    if not dims_c[1] or not dims_r[0]:
        return True
    blocks = {(0, 1): G, (1, 1): eng.rows("delta", s)}
    if dims_c[0]:
        blocks[(0, 0)] = eng.rows("delta", below)
    r = stack_rank(blocks, dims_r, dims_c)
    return r == eng.rank_delta(below) + eng.rank_delta(s)


def _lefschetz_job(args):
    eng, F, norm, items = args
    out = []
    for (an, j, tn) in items:
        s = norm.to_raw(an, -2 * j, tn)
        s2 = norm.to_raw(an, 2 * j, tn + 2 * j)
        dsrc, dtgt = eng.e2(s), eng.e2(s2)
        if not dsrc and not dtgt:
            continue
        cert = True
        rows = None
        cur = s
        for _ in range(j):
            cert = cert and commutator_certificate(eng, F, cur)
            step = F.slice_rows(eng, cur)
            rows = step if rows is None else compose_rows(step, rows)
            cur = add3(cur, F.degree)
        rank = eng.induced_rank(rows, s, s2) if dsrc and dtgt else 0
        ok = cert and rank == dsrc == dtgt
        out.append({"i": an, "j": j, "k": tn, "rank": rank, "dim_source": dsrc, "dim_target": dtgt,
                    "certificate": cert, "ok": ok})
    return out


def lefschetz_check(beta, jmax, window, jobs=None, simplify=0):
    """Bijectivity of (F_2)^j : HY_{i,-2j,k} -> HY_{i,2j,k+2j} for 1 <= j <= jmax.

    Works on the theta_1-free model (HY is that times Lambda[theta_1] with F
    acting on the first factor); x_1 is kept since F_2 is not translation
    invariant.  Each verdict carries the certificate that [D, F_2] sends
    delta-cycles to delta-boundaries, which makes the induced map well defined.
    """
    if isinstance(window, str):
        window = Window.parse(window)
    norm = Normalization.of(beta)
    A = _prepared_action(beta, 2, simplify)
    Y = yify(A)
    Q = link_quotient(Y, split=True, reduce_x1=False)
    F = QuotientFk(Q, 2)
    if not F.commutes_with_delta():
        raise ValueError("F_2 does not commute with the Koszul differential")
    eng = Q.engine()
    amax = 2 * (beta.n - 1 - norm.s)
    amin = -2 * norm.s
    items = []
    for j in range(1, jmax + 1):
        if -2 * j < window.qmin or 2 * j > window.qmax:
            continue
        for an in range(amin, amax + 1, 2):
            if not (window.amin is None or window.amin <= an) or not (window.amax is None or an <= window.amax):
                continue
            for tn in range(window.tmin, window.tmax + 1):
                if tn + 2 * j > window.tmax:
                    continue
                items.append((an, j, tn))
    by_j = {}
    for it in items:
        by_j.setdefault((it[1], it[0]), []).append(it)
    res = parallel_map(_lefschetz_job, [(eng, F, norm, v) for _, v in sorted(by_j.items())], jobs)
    verdicts = sorted((v for part in res for v in part), key=lambda v: (v["j"], v["i"], v["k"]))
    return {"ok": all(v["ok"] for v in verdicts), "verdicts": verdicts, "braid": beta.word, "strands": beta.n}


def sl2_decompose(table, window=None):
    """Primitive (lowest weight) multiplicities of an F_2 string decomposition.

    Given Lefschetz, the primitive part at (a, -2j, t) has dimension
    dim(a, -2j, t) - dim(a, -2j-4, t-2); its string occupies
    (a, -2j + 4m, t + 2m) for m = 0..j.  Returns (primitives, reconstructed)
    where reconstructed is the sum of the strings.
    """
    dims = table.dims
    prim = {}
    for (a, q, t), v in dims.items():
        if q > 0 or q % 2:
            continue
        p = v - dims.get((a, q - 4, t - 2), 0)
        if p < 0:
            raise ValueError("Lefschetz failure: negative primitive part at %s" % ((a, q, t),))
        if p:
            prim[(a, q, t)] = p
    rec = {}
    for (a, q, t), p in prim.items():
        j = -q // 2
        for m in range(j + 1):
            key = (a, q + 4 * m, t + 2 * m)
            rec[key] = rec.get(key, 0) + p
    return prim, rec
