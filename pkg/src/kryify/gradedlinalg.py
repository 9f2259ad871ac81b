"""Free graded modules, homogeneous polynomial matrices, chain complexes and
exact slice-wise homology.

Conventions: a matrix stores the images of source generators, ``cols[j] =
{i: Poly}`` meaning ``f(g_j) = sum_i P_i * h_i``.  Differentials lower the
homological degree t by one.  Every rank is computed over Q on a finite
(a, q, t) slice whose basis is (monomial, generator) pairs.
"""

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from math import lcm

import flint

from .ring import Poly, mul_accumulate, poly_from_raw, var_info

ZERO = Poly()
ONE = Poly.const(1)


def add3(u, v):
    return (u[0] + v[0], u[1] + v[1], u[2] + v[2])


def sub3(u, v):
    return (u[0] - v[0], u[1] - v[1], u[2] - v[2])


class HMatrix:
    """Sparse matrix with polynomial entries, stored by columns."""

    __slots__ = ("nrows", "ncols", "cols")

    def __init__(self, nrows, ncols, cols=None):
        self.nrows = nrows
        self.ncols = ncols
        self.cols = cols if cols is not None else {}

    @staticmethod
    def identity(n, scale=ONE):
        return HMatrix(n, n, {j: {j: scale} for j in range(n)} if scale else {})

    @staticmethod
    def zero(nrows, ncols):
        return HMatrix(nrows, ncols)

    def copy(self):
        return HMatrix(self.nrows, self.ncols, {j: dict(c) for j, c in self.cols.items()})

    def get(self, i, j):
        return self.cols.get(j, {}).get(i, ZERO)

    def set(self, i, j, p):
        p = p if isinstance(p, Poly) else Poly.const(p)
        c = self.cols.setdefault(j, {})
        if p.is_zero():
            c.pop(i, None)
            if not c:
                del self.cols[j]
        else:
            c[i] = p

    def add_to(self, i, j, p):
        if not p:
            return
        self.set(i, j, self.get(i, j) + p)

    def entries(self):
        for j in sorted(self.cols):
            col = self.cols[j]
            for i in sorted(col):
                yield i, j, col[i]

    def is_zero(self):
        return not any(self.cols.values())

    def __eq__(self, other):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            return False
        return (self - other).is_zero()

    def __add__(self, other):
        out = self.copy()
        for i, j, p in other.entries():
            out.add_to(i, j, p)
        return out

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        c = c if isinstance(c, Poly) else Poly.const(c)
        if c.is_zero():
            return HMatrix(self.nrows, self.ncols)
        out = HMatrix(self.nrows, self.ncols)
        for j, col in self.cols.items():
            nc = {}
            for i, p in col.items():
                q = p * c
                if q:
                    nc[i] = q
            if nc:
                out.cols[j] = nc
        return out

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch %dx%d @ %dx%d" % (self.nrows, self.ncols, other.nrows, other.ncols))
        out = HMatrix(self.nrows, other.ncols)
        for j, bcol in other.cols.items():
            raw = {}
            for k, b in bcol.items():
                acol = self.cols.get(k)
                if not acol:
                    continue
                for i, a in acol.items():
                    mul_accumulate(raw.setdefault(i, {}), a, b)
            acc = {}
            for i, t in raw.items():
                p = poly_from_raw(t)
                if p:
                    acc[i] = p
            if acc:
                out.cols[j] = acc
        return out

    def map_entries(self, fn):
        out = HMatrix(self.nrows, self.ncols)
        for i, j, p in self.entries():
            out.set(i, j, fn(p))
        return out

    def submatrix(self, rows, cols):
        rpos = {r: a for a, r in enumerate(rows)}
        out = HMatrix(len(rows), len(cols))
        for b, c in enumerate(cols):
            for i, p in self.cols.get(c, {}).items():
                if i in rpos:
                    out.set(rpos[i], b, p)
        return out

    def variables(self):
        s = set()
        for _, _, p in self.entries():
            s |= p.variables()
        return s

    def to_lists(self):
        return [[self.get(i, j).to_str() for j in range(self.ncols)] for i in range(self.nrows)]


def block_matrix(blocks, row_sizes, col_sizes):
    """Assemble an HMatrix from a dict {(bi, bj): HMatrix}."""
    roff = [0]
    for s in row_sizes:
        roff.append(roff[-1] + s)
    coff = [0]
    for s in col_sizes:
        coff.append(coff[-1] + s)
    out = HMatrix(roff[-1], coff[-1])
    for (bi, bj), M in blocks.items():
        for i, j, p in M.entries():
            out.add_to(roff[bi] + i, coff[bj] + j, p)
    return out


def check_homogeneous(M, src_degs, tgt_degs, deg):
    """Every nonzero entry has degree src + deg - tgt; returns list of offenders."""
    bad = []
    for i, j, p in M.entries():
        want = sub3(add3(src_degs[j], deg), tgt_degs[i])
        for dg in p.degrees():
            if dg != want:
                bad.append((i, j, p, want))
                break
    return bad


# polynomial evaluation on commuting matrices


class MatrixEvaluator:
    """Evaluates polynomials in a fixed set of variables at commuting matrices."""

    def __init__(self, size, assign):
        self.size = size
        self.assign = dict(assign)  # var id -> HMatrix
        self._mono = {(): HMatrix.identity(size)}

    def monomial(self, m):
        if m in self._mono:
            return self._mono[m]
        # peel one variable power
        v, e = m[-1]
        rest = m[:-1] + (((v, e - 1),) if e > 1 else ())
        if v not in self.assign:
            raise KeyError("no matrix assigned to variable %s" % var_info(v).name)
        r = self.monomial(rest) @ self.assign[v]
        self._mono[m] = r
        return r

    def eval(self, p, passthrough=()):
        """Evaluate p; variables in passthrough stay as scalar polynomial factors."""
        out = HMatrix(self.size, self.size)
        for m, c in p.terms.items():
            keep = tuple((v, e) for v, e in m if v in passthrough)
            act = tuple((v, e) for v, e in m if v not in passthrough)
            M = self.monomial(act)
            coeff = Poly({keep: c})
            for i, j, q in M.entries():
                out.add_to(i, j, q * coeff)
        return out


class ChainComplex:
    """Finite complex of free graded left modules over a polynomial ring.

    degs: list of generator tri-degrees (a, q, t); d: HMatrix of degree
    (0, 0, -1) on the flat list of generators; right: optional dict mapping a
    strand index i to the matrix of the right action of x'_i; curvature: a
    scalar polynomial with d^2 = curvature * Id.
    """

    def __init__(self, degs, d, ring, right=None, n=None, curvature=ZERO, labels=None, perm=None):
        self.degs = [tuple(g) for g in degs]
        self.d = d
        self.ring = list(ring)
        self.right = right
        self.n = n
        self.curvature = curvature
        self.labels = labels
        self.perm = perm

    @property
    def rank(self):
        return len(self.degs)

    def tdegrees(self):
        return sorted({g[2] for g in self.degs})

    def gens_in(self, t):
        return [i for i, g in enumerate(self.degs) if g[2] == t]

    def check_d_squared(self):
        dd = self.d @ self.d
        if self.curvature:
            dd = dd - HMatrix.identity(self.rank, self.curvature)
        return dd.is_zero()

    def check_homogeneous(self):
        return not check_homogeneous(self.d, self.degs, self.degs, (0, 0, -1))

    def check_right_action(self):
        """Right actions commute with d and with each other."""
        if not self.right:
            return True
        keys = sorted(self.right)
        for i in keys:
            if not (self.right[i] @ self.d - self.d @ self.right[i]).is_zero():
                return False
            for j in keys:
                if j > i and not (self.right[i] @ self.right[j] - self.right[j] @ self.right[i]).is_zero():
                    return False
        return True

    def right_evaluator(self):
        n = self.n
        assign = {}
        for i in range(1, n + 1):
            xv = Poly.var("x", i).variables().pop()
            assign[xv] = self.right[i] if self.right else HMatrix.identity(self.rank, Poly.var("x", i))
        return MatrixEvaluator(self.rank, assign)

    def permuted(self, order):
        """Same complex with generators reordered (order[k] = old index at new position k)."""
        inv = {old: new for new, old in enumerate(order)}

        def pm(M):
            out = HMatrix(M.nrows, M.ncols)
            for i, j, p in M.entries():
                out.set(inv[i], inv[j], p)
            return out

        right = {k: pm(v) for k, v in self.right.items()} if self.right else None
        labels = [self.labels[o] for o in order] if self.labels else None
        return ChainComplex([self.degs[o] for o in order], pm(self.d), self.ring, right, self.n, self.curvature, labels, self.perm)


def unit_complex(n, ring):
    """R itself in degree 0 with the identity bimodule structure."""
    right = {i: HMatrix.identity(1, Poly.var("x", i)) for i in range(1, n + 1)}
    return ChainComplex([(0, 0, 0)], HMatrix(1, 1), ring, right, n, labels=["1"], perm=tuple(range(1, n + 1)))


def tensor_index(a, b, nb):
    return a * nb + b


def left_extend(F, C1, C2):
    """F (a map on C1, left-linear and commuting with the right action) as F x 1."""
    n2 = C2.rank
    out = HMatrix(C1.rank * n2, C1.rank * n2)
    for i, j, p in F.entries():
        for b in range(n2):
            out.set(i * n2 + b, j * n2 + b, p)
    return out


def right_extend(G, C1, C2, parity, ev1=None):
    """1 x G with Koszul sign (-1)^{parity * t(m)}; G's entries act through C1's right action."""
    ev1 = ev1 or C1.right_evaluator()
    n2 = C2.rank
    out = HMatrix(C1.rank * n2, C1.rank * n2)
    for dd, b, p in G.entries():
        E = ev1.eval(p)
        for m, a, q in E.entries():
            s = -1 if (parity % 2 and C1.degs[a][2] % 2) else 1
            out.add_to(m * n2 + dd, a * n2 + b, q * s)
    return out


def tensor_over_R(C1, C2):
    """Tensor product over the middle polynomial ring, with Koszul signs."""
    if C1.n != C2.n:
        raise ValueError("mismatched strand counts %s and %s" % (C1.n, C2.n))
    ev1 = C1.right_evaluator()
    degs = [add3(g, h) for g in C1.degs for h in C2.degs]
    d = left_extend(C1.d, C1, C2) + right_extend(C2.d, C1, C2, 1, ev1)
    right = None
    if C2.right:
        right = {i: right_extend(C2.right[i], C1, C2, 0, ev1) for i in C2.right}
    labels = None
    if C1.labels and C2.labels:
        labels = ["%s|%s" % (a, b) for a in C1.labels for b in C2.labels]
    perm = None
    if C1.perm and C2.perm:
        perm = compose_perm(C1.perm, C2.perm)
    return ChainComplex(degs, d, C1.ring, right, C1.n, C1.curvature + C2.curvature, labels, perm)


def compose_perm(v, w):
    """(v w)(i) = v(w(i)), permutations as 1-based tuples."""
    return tuple(v[w[i] - 1] for i in range(len(w)))


def invert_perm(w):
    inv = [0] * len(w)
    for i, wi in enumerate(w):
        inv[wi - 1] = i + 1
    return tuple(inv)


# ---------------------------------------------------------------------------
# exact linear algebra


def _row_to_ints(row):
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = lcm(den, v.denominator)
    if den == 1:
        return {k: int(v) for k, v in row.items()}
    return {k: int(v * den) for k, v in row.items()}


def exact_rank(rows, ncols=None):
    """Rank over Q of a sparse matrix given as a list of dict rows {col: value}."""
    rows = [_row_to_ints(r) for r in rows if r]
    if not rows:
        return 0
    # eliminate on unit pivots first; cheap and keeps integers exact
    colrows = {}
    for ri, r in enumerate(rows):
        for c in r:
            colrows.setdefault(c, set()).add(ri)
    alive = set(range(len(rows)))
    rank = 0
    changed = True
    while changed:
        changed = False
        for ri in sorted(alive):
            if ri not in alive:
                continue
            r = rows[ri]
            if not r:
                alive.discard(ri)
                continue
            piv = None
            best = None
            for c, v in r.items():
                if v == 1 or v == -1:
                    cnt = len(colrows[c])
                    if best is None or cnt < best:
                        best, piv = cnt, c
                        if cnt == 1:
                            break
            if piv is None:
                continue
            pv = r[piv]
            for oi in list(colrows[piv]):
                if oi == ri:
                    continue
                o = rows[oi]
                f = o[piv] * pv
                for c, v in r.items():
                    nv = o.get(c, 0) - f * v
                    if nv:
                        if c not in o:
                            colrows[c].add(oi)
                        o[c] = nv
                    else:
                        if c in o:
                            del o[c]
                            colrows[c].discard(oi)
            for c in r:
                colrows[c].discard(ri)
            rows[ri] = {}
            alive.discard(ri)
            rank += 1
            changed = True
    rest = [rows[i] for i in sorted(alive) if rows[i]]
    if not rest:
        return rank
    cols = sorted({c for r in rest for c in r})
    cpos = {c: k for k, c in enumerate(cols)}
    if len(rest) > len(cols):
        dense = [[0] * len(rest) for _ in cols]
        for k, r in enumerate(rest):
            for c, v in r.items():
                dense[cpos[c]][k] = v
    else:
        dense = []
        for r in rest:
            line = [0] * len(cols)
            for c, v in r.items():
                line[cpos[c]] = v
            dense.append(line)
    return rank + flint.fmpz_mat(dense).rank()


def stack_rank(blocks, row_sizes, col_sizes):
    """Rank of a block matrix given as {(bi, bj): list-of-dict rows (local indices)}."""
    coff = [0]
    for s in col_sizes:
        coff.append(coff[-1] + s)
    rows = []
    for bi, rs in enumerate(row_sizes):
        local = [dict() for _ in range(rs)]
        for (i, j), blk in blocks.items():
            if i != bi or blk is None:
                continue
            for r, row in enumerate(blk):
                base = coff[j]
                for c, v in row.items():
                    local[r][base + c] = local[r].get(base + c, 0) + v
        rows.extend({c: v for c, v in r.items() if v} for r in local)
    return exact_rank(rows)


# ---------------------------------------------------------------------------
# slices


def _monomials_of_degree(groups, deg):
    """Exponent tuples over the concatenated group variables with total degree deg.

    groups: list of (count, (a, q, t)) for variables sharing one degree.
    Only x-like (0,2,0) and y-like (0,-2,-2) groups occur, so the counts are
    determined by (q, t).
    """
    a, q, t = deg
    if a != 0:
        return []
    kinds = [g[1] for g in groups]
    xs = [k for k, g in enumerate(groups) if g[1] == (0, 2, 0)]
    ys = [k for k, g in enumerate(groups) if g[1] == (0, -2, -2)]
    if len(xs) + len(ys) != len(groups):
        raise ValueError("unsupported ring variable degrees %s" % kinds)
    if ys:
        if t % 2 or t > 0:
            return []
        m = -t // 2
    else:
        if t != 0:
            return []
        m = 0
    if (q + 2 * m) % 2:
        return []
    p = (q + 2 * m) // 2
    if p < 0 or (p > 0 and not xs):
        return []
    nx = sum(groups[k][0] for k in xs)
    ny = sum(groups[k][0] for k in ys)
    return [ex + ey for ex in _compositions(p, nx) for ey in _compositions(m, ny)]


_COMP_CACHE = {}


def _compositions(total, parts):
    key = (total, parts)
    if key in _COMP_CACHE:
        return _COMP_CACHE[key]
    if parts == 0:
        res = [()] if total == 0 else []
    elif parts == 1:
        res = [(total,)]
    else:
        res = []
        for first in range(total, -1, -1):
            for rest in _compositions(total - first, parts - 1):
                res.append((first,) + rest)
    _COMP_CACHE[key] = res
    return res


class SliceSpace:
    """Bases of (a, q, t) slices of a free module over a polynomial ring."""

    def __init__(self, degs, ring):
        self.degs = degs
        self.ring = list(ring)
        self.rpos = {v: k for k, v in enumerate(self.ring)}
        # ring variables grouped in order; each group has the same degree
        self.groups = []
        for v in self.ring:
            dg = var_info(v).deg
            if self.groups and self.groups[-1][1] == dg:
                self.groups[-1] = (self.groups[-1][0] + 1, dg)
            else:
                self.groups.append((1, dg))
        self._basis = {}
        self._by_deg = {}
        for i, g in enumerate(degs):
            self._by_deg.setdefault(g, []).append(i)
        self._dense_cache = {}

    def basis(self, deg):
        b = self._basis.get(deg)
        if b is not None:
            return b
        out = []
        for g, gens in sorted(self._by_deg.items()):
            monos = _monomials_of_degree(self.groups, sub3(deg, g))
            for i in gens:
                for m in monos:
                    out.append((m, i))
        index = {key: k for k, key in enumerate(out)}
        self._basis[deg] = (out, index)
        return self._basis[deg]

    def dim(self, deg):
        return len(self.basis(deg)[0])

    def dense(self, p):
        """Poly -> list of (exponent tuple over ring, coeff)."""
        key = id(p)
        hit = self._dense_cache.get(key)
        if hit is not None and hit[0] is p:
            return hit[1]
        out = []
        nr = len(self.ring)
        for m, c in p.terms.items():
            e = [0] * nr
            for v, k in m:
                pos = self.rpos.get(v)
                if pos is None:
                    raise ValueError("entry %s involves a variable outside the ring" % p)
                e[pos] = k
            out.append((tuple(e), c))
        self._dense_cache[key] = (p, out)
        return out


def slice_rows(M, src, tgt, deg_src, deg_map):
    """Slice of the map M: src -> tgt at source degree deg_src, as list of dict rows.

    Returns (rows, ncols) with rows indexed by the target slice basis.
    """
    sbasis, _ = src.basis(deg_src)
    tbasis, tindex = tgt.basis(add3(deg_src, deg_map))
    rows = [dict() for _ in tbasis]
    for col, (m, g) in enumerate(sbasis):
        colmap = M.cols.get(g)
        if not colmap:
            continue
        for h, p in colmap.items():
            for e, c in tgt.dense(p):
                key = (tuple(a + b for a, b in zip(m, e)), h)
                r = tindex.get(key)
                if r is None:
                    raise ValueError("matrix entry degree inconsistent with slice grading")
                row = rows[r]
                nv = row.get(col, 0) + c
                if nv:
                    row[col] = nv
                else:
                    row.pop(col, None)
    return rows, len(sbasis)


def slice_matrix(C, a, q, t):
    """Exact matrix (list of lists of Fractions) of d from the (a,q,t) slice to (a,q,t-1)."""
    S = SliceSpace(C.degs, C.ring)
    rows, ncols = slice_rows(C.d, S, S, (a, q, t), (0, 0, -1))
    return [[Fraction(r.get(j, 0)) for j in range(ncols)] for r in rows]


class Window:
    """Finite box in (a, q, t); a bounds optional (None means all)."""

    def __init__(self, qmin, qmax, tmin, tmax, amin=None, amax=None):
        self.qmin, self.qmax, self.tmin, self.tmax = qmin, qmax, tmin, tmax
        self.amin, self.amax = amin, amax
        if qmin > qmax or tmin > tmax:
            raise ValueError("empty window")

    def contains(self, a, q, t):
        if self.amin is not None and a < self.amin:
            return False
        if self.amax is not None and a > self.amax:
            return False
        return self.qmin <= q <= self.qmax and self.tmin <= t <= self.tmax

    def as_dict(self):
        return {"qmin": self.qmin, "qmax": self.qmax, "tmin": self.tmin, "tmax": self.tmax, "amin": self.amin, "amax": self.amax}

    @staticmethod
    def parse(s):
        parts = [int(p) for p in s.split(",")]
        if len(parts) not in (4, 6):
            raise ValueError("window must be qmin,qmax,tmin,tmax[,amin,amax]")
        return Window(*parts)


class TriGradedTable:
    def __init__(self, dims=None, window=None, meta=None):
        self.dims = {k: v for k, v in (dims or {}).items() if v}
        self.window = window
        self.meta = dict(meta or {})
        for k, v in self.dims.items():
            if v < 0:
                raise ValueError("negative dimension at %s" % (k,))

    def __eq__(self, other):
        return self.dims == other.dims

    def get(self, a, q, t):
        return self.dims.get((a, q, t), 0)

    def total(self):
        return sum(self.dims.values())

    def restrict(self, window):
        return TriGradedTable({k: v for k, v in self.dims.items() if window.contains(*k)}, window, self.meta)

    def shifted(self, da, dq, dt):
        return TriGradedTable({(a + da, q + dq, t + dt): v for (a, q, t), v in self.dims.items()}, self.window, self.meta)

    def rows(self):
        return [{"a": a, "q": q, "t": t, "dim": v} for (a, q, t), v in sorted(self.dims.items())]

    def to_json(self):
        meta = dict(self.meta)
        if self.window is not None:
            meta["window"] = self.window.as_dict()
        return json.dumps({"table": self.rows(), "meta": meta}, sort_keys=True, indent=1)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["a", "q", "t", "dim"])
        for r in self.rows():
            w.writerow([r["a"], r["q"], r["t"], r["dim"]])
        return buf.getvalue()

    @staticmethod
    def from_json(s):
        obj = json.loads(s)
        dims = {(r["a"], r["q"], r["t"]): r["dim"] for r in obj["table"]}
        meta = obj.get("meta", {})
        w = meta.get("window")
        window = Window(w["qmin"], w["qmax"], w["tmin"], w["tmax"], w.get("amin"), w.get("amax")) if w else None
        return TriGradedTable(dims, window, meta)


def default_jobs():
    try:
        return max(1, int(os.environ.get("KRYIFY_JOBS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items, jobs=None):
    """Order-preserving map; results are identical for any number of workers."""
    jobs = default_jobs() if jobs is None else jobs
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def slice_degrees(C, window):
    """(a, q) columns reachable from generators of C inside the window."""
    acols = sorted({g[0] for g in C.degs})
    out = []
    for a in acols:
        if window.amin is not None and a < window.amin:
            continue
        if window.amax is not None and a > window.amax:
            continue
        for q in range(window.qmin, window.qmax + 1):
            out.append((a, q))
    return out


def _column_homology(args):
    C, a, q, tmin, tmax = args
    S = SliceSpace(C.degs, C.ring)
    ranks = {}
    for t in range(tmin, tmax + 2):
        rows, _ = slice_rows(C.d, S, S, (a, q, t), (0, 0, -1))
        ranks[t] = exact_rank(rows)
    out = {}
    for t in range(tmin, tmax + 1):
        dim = S.dim((a, q, t)) - ranks[t] - ranks[t + 1]
        if dim:
            out[(a, q, t)] = dim
    return out


def homology_dims(C, window, jobs=None):
    """Slice-wise homology dimensions of an honest complex inside the window."""
    if C.curvature:
        raise ValueError("homology of a curved complex is undefined")
    cols = slice_degrees(C, window)
    res = parallel_map(_column_homology, [(C, a, q, window.tmin, window.tmax) for a, q in cols], jobs)
    dims = {}
    for part in res:
        dims.update(part)
    return TriGradedTable(dims, window, {"certified": True})


def chain_dims(C, window):
    S = SliceSpace(C.degs, C.ring)
    dims = {}
    for a, q in slice_degrees(C, window):
        for t in range(window.tmin, window.tmax + 1):
            v = S.dim((a, q, t))
            if v:
                dims[(a, q, t)] = v
    return TriGradedTable(dims, window)


def euler_columns(table):
    out = {}
    for (a, q, t), v in table.dims.items():
        out[(a, q)] = out.get((a, q), 0) + (-1) ** (t % 2) * v
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# Gaussian simplification


class Simplified:
    """Result of gaussian_simplify: the small complex and comparison maps.

    iota: small -> big, pi: big -> small, homotopy: big -> big of degree +1 with
    iota pi - 1 = d h + h d.
    """

    def __init__(self, complex, iota, pi, homotopy, kept):
        self.complex = complex
        self.iota = iota
        self.pi = pi
        self.homotopy = homotopy
        self.kept = kept

    def transport(self, F):
        return self.pi @ F @ self.iota


class _ElimState:
    """Working data of Gaussian elimination (row- and column-indexed d plus maps)."""

    def __init__(self, C, track):
        N = C.rank
        self.rows = {}
        self.cols = {}
        for i, j, p in C.d.entries():
            self.rows.setdefault(i, {})[j] = p
            self.cols.setdefault(j, {})[i] = p
        self.alive = set(range(N))
        self.track = track
        self.pi_rows = {k: {k: ONE} for k in range(N)}
        self.io_cols = {k: {k: ONE} for k in range(N)}
        self.hom = {}

    def copy(self):
        st = _ElimState.__new__(_ElimState)
        st.rows = {k: dict(v) for k, v in self.rows.items()}
        st.cols = {k: dict(v) for k, v in self.cols.items()}
        st.alive = set(self.alive)
        st.track = self.track
        st.pi_rows = {k: dict(v) for k, v in self.pi_rows.items()}
        st.io_cols = {k: dict(v) for k, v in self.io_cols.items()}
        st.hom = dict(self.hom)
        return st

    def pivots(self, pivot_filter=None):
        out = []
        for j in sorted(self.alive):
            for i, p in sorted(self.cols.get(j, {}).items()):
                if p and p.is_constant():
                    if pivot_filter is not None and not pivot_filter(i, j):
                        continue
                    cost = len(self.cols.get(j, {})) * len(self.rows.get(i, {}))
                    out.append((cost, i, j))
        out.sort()
        return out

    def eliminate(self, h, g):
        rows, cols = self.rows, self.cols
        u = cols[g][h]
        uinv = Fraction(1) / Fraction(u.constant_term())
        beta = {a: p for a, p in rows.get(h, {}).items() if a != g}
        gamma = {b: p for b, p in cols.get(g, {}).items() if b != h}
        for b, gb in gamma.items():
            for a, ba in beta.items():
                new = rows.get(b, {}).get(a, ZERO) + gb * ba * (-uinv)
                if new:
                    rows.setdefault(b, {})[a] = new
                    cols.setdefault(a, {})[b] = new
                else:
                    if b in rows:
                        rows[b].pop(a, None)
                    if a in cols:
                        cols[a].pop(b, None)
        if self.track:
            # the step's homotopy sends h to -u^{-1} g; pull it back to the original complex
            for ot, ct in self.io_cols[g].items():
                for os_, cs in self.pi_rows[h].items():
                    key = (ot, os_)
                    nv = self.hom.get(key, ZERO) + ct * cs * (-uinv)
                    if nv:
                        self.hom[key] = nv
                    else:
                        self.hom.pop(key, None)
            for b, gb in gamma.items():
                f = gb * (-uinv)
                pr = self.pi_rows[b]
                for orig, c in self.pi_rows[h].items():
                    nv = pr.get(orig, ZERO) + f * c
                    if nv:
                        pr[orig] = nv
                    else:
                        pr.pop(orig, None)
            for a, ba in beta.items():
                f = ba * (-uinv)
                ic = self.io_cols[a]
                for orig, c in self.io_cols[g].items():
                    nv = ic.get(orig, ZERO) + f * c
                    if nv:
                        ic[orig] = nv
                    else:
                        ic.pop(orig, None)
        for x in (g, h):
            for j in list(rows.get(x, {})):
                cols[j].pop(x, None)
            rows.pop(x, None)
            for i in list(cols.get(x, {})):
                rows[i].pop(x, None)
            cols.pop(x, None)
            self.alive.discard(x)
            self.pi_rows.pop(x, None)
            self.io_cols.pop(x, None)

    def result(self, C):
        N = C.rank
        kept = sorted(self.alive)
        pos = {k: n for n, k in enumerate(kept)}
        d = HMatrix(len(kept), len(kept))
        for i in kept:
            for j, p in self.rows.get(i, {}).items():
                d.set(pos[i], pos[j], p)
        iota = HMatrix(N, len(kept))
        pi = HMatrix(len(kept), N)
        hom = HMatrix(N, N)
        if self.track:
            for k in kept:
                for orig, c in self.io_cols[k].items():
                    iota.set(orig, pos[k], c)
                for orig, c in self.pi_rows[k].items():
                    pi.set(pos[k], orig, c)
            for (a, b), p in self.hom.items():
                hom.set(a, b, p)
        small = ChainComplex([C.degs[k] for k in kept], d, C.ring, None, C.n,
                             labels=[C.labels[k] for k in kept] if C.labels else None, perm=C.perm)
        res = Simplified(small, iota, pi, hom, kept)
        if self.track and C.right:
            small.right = {i: res.transport(M) for i, M in C.right.items()}
        return res


def _right_compatible(C, res):
    for i, rho in C.right.items():
        r2 = res.complex.right[i]
        if not (rho @ res.iota - res.iota @ r2).is_zero():
            return False
        if not (r2 @ res.pi - res.pi @ rho).is_zero():
            return False
    return True


def gaussian_simplify(C, track=True, pivot_filter=None, preserve_right=False, depth=4):
    """Cancel unit scalar entries of d repeatedly (homotopy equivalence).

    With preserve_right the comparison maps are required to commute with the
    right action, so the result is an equivalence of bimodule complexes; pivot
    sequences of length up to ``depth`` are searched for that purpose.
    """
    if C.curvature:
        raise ValueError("cannot simplify a curved complex")
    st = _ElimState(C, track or preserve_right)
    if not preserve_right or not C.right:
        while True:
            piv = st.pivots(pivot_filter)
            if not piv:
                break
            _, h, g = piv[0]
            st.eliminate(h, g)
        return st.result(C)

    def search(state, k):
        # iterative deepening: prefer the shortest compatible pivot sequence
        frontier = [state]
        for _ in range(k):
            nxt_frontier = []
            for cur in frontier:
                for _, h, g in cur.pivots(pivot_filter):
                    nxt = cur.copy()
                    nxt.eliminate(h, g)
                    if _right_compatible(C, nxt.result(C)):
                        return nxt
                    nxt_frontier.append(nxt)
            frontier = nxt_frontier
            if len(frontier) > 4000:
                break
        return None

    while True:
        nxt = search(st, depth)
        if nxt is None:
            break
        st = nxt
    return st.result(C)
