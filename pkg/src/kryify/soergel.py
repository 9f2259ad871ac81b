"""Soergel bimodules B_i, Rouquier complexes and Koszul objects.

All bimodules are free left modules over R = Q[x_1..x_n]; the right action of
x'_i is a matrix over R.  B_i uses the basis {1x1, 1x x_{i+1}}.
"""

from .gradedlinalg import ChainComplex, HMatrix, tensor_over_R, unit_complex
from .ring import Poly, variable, xvar


def ring_vars(n):
    return [variable("x", i).id for i in range(1, n + 1)]


def transposition(n, i, j):
    w = list(range(1, n + 1))
    w[i - 1], w[j - 1] = w[j - 1], w[i - 1]
    return tuple(w)


class BraidWord:
    """Signed generator indices on n strands (i for sigma_i, -i for its inverse)."""

    def __init__(self, n, word):
        self.n = int(n)
        self.word = [int(s) for s in word]
        for s in self.word:
            if s == 0 or not 1 <= abs(s) <= self.n - 1:
                raise ValueError("generator %d out of range for %d strands" % (s, self.n))

    @staticmethod
    def parse(text, n):
        text = text.strip()
        word = [int(tok) for tok in text.replace(",", " ").split()] if text else []
        return BraidWord(n, word)

    def permutation(self):
        w = tuple(range(1, self.n + 1))
        for s in self.word:
            i = abs(s)
            si = transposition(self.n, i, i + 1)
            w = tuple(w[si[k] - 1] for k in range(self.n))
        return w

    def writhe(self):
        return sum(1 if s > 0 else -1 for s in self.word)

    def cycles(self):
        w = self.permutation()
        seen = set()
        out = []
        for i in range(1, self.n + 1):
            if i in seen:
                continue
            cyc = []
            j = i
            while j not in seen:
                seen.add(j)
                cyc.append(j)
                j = w[j - 1]
            out.append(cyc)
        return out

    def components(self):
        return len(self.cycles())

    def rotate(self, k=1):
        k %= max(1, len(self.word))
        return BraidWord(self.n, self.word[k:] + self.word[:k])

    def mirror(self):
        return BraidWord(self.n, [-s for s in self.word])

    def stabilize(self, sign=1):
        return BraidWord(self.n + 1, self.word + [sign * self.n])

    def __repr__(self):
        return "BraidWord(%d, %s)" % (self.n, self.word)

    def key(self):
        return (self.n, tuple(self.word))


def bimodule_Bi(n, i):
    """B_i = R (x) over R^{s_i} R as a rank-2 free left module with right-action matrices.

    Returns (degs, right) where degs are the q-degrees of the basis {1x1, 1x x_{i+1}}
    before any shift and right[k] is the matrix of x'_k.
    """
    if not 1 <= i <= n - 1:
        raise ValueError("index %d out of range for %d strands" % (i, n))
    xi, xj = xvar(i), xvar(i + 1)
    right = {}
    for k in range(1, n + 1):
        right[k] = HMatrix.identity(2, xvar(k))
    # x'_{i+1}: e0 -> e1, e1 -> (x_i + x_{i+1}) e1 - x_i x_{i+1} e0
    m = HMatrix(2, 2)
    m.set(1, 0, 1)
    m.set(1, 1, xi + xj)
    m.set(0, 1, -(xi * xj))
    right[i + 1] = m
    right[i] = HMatrix.identity(2, xi + xj) - m
    return [(0, 0, 0), (0, 2, 0)], right


def _embed_right(right, n, blocks):
    """Assemble block-diagonal right actions from per-summand matrices."""
    out = {}
    size = sum(b[0] for b in blocks)
    for k in range(1, n + 1):
        M = HMatrix(size, size)
        off = 0
        for bsize, bright in blocks:
            if bright is None:
                for a in range(bsize):
                    M.set(off + a, off + a, xvar(k))
            else:
                for r, c, p in bright[k].entries():
                    M.set(off + r, off + c, p)
            off += bsize
        out[k] = M
    return out


def rouquier_generator(n, i, sign):
    """T_i = [B_i(1) -> R(1)] (sign +1) or T_i^{-1} = [R(-1) -> B_i(1)] (sign -1)."""
    if not 1 <= i <= n - 1:
        raise ValueError("index %d out of range for %d strands" % (i, n))
    _, bright = bimodule_Bi(n, i)
    xi = xvar(i)
    if sign > 0:
        degs = [(0, -1, 0), (0, 1, 0), (0, -1, -1)]
        d = HMatrix(3, 3)
        d.set(2, 0, 1)
        d.set(2, 1, xvar(i + 1))
        right = _embed_right(None, n, [(2, bright), (1, None)])
        labels = ["B%d.1" % i, "B%d.x" % i, "R"]
    else:
        degs = [(0, 1, 1), (0, -1, 0), (0, 1, 0)]
        d = HMatrix(3, 3)
        d.set(1, 0, xi)
        d.set(2, 0, -1)
        right = _embed_right(None, n, [(1, None), (2, bright)])
        labels = ["R", "B%d.1" % i, "B%d.x" % i]
    return ChainComplex(degs, d, ring_vars(n), right, n, labels=labels, perm=transposition(n, i, i + 1))


def rouquier_complex(beta):
    """Tensor product of the generator complexes of a braid word, left to right."""
    n = beta.n
    if not beta.word:
        return unit_complex(n, ring_vars(n))
    C = rouquier_generator(n, abs(beta.word[0]), 1 if beta.word[0] > 0 else -1)
    for s in beta.word[1:]:
        C = tensor_over_R(C, rouquier_generator(n, abs(s), 1 if s > 0 else -1))
    return C


def koszul_object(n, i, j):
    """K_ij = [R(-1) --(x_i - x_j)--> R(1)], generators eta and 1.

    The bimodule structure is the plain one (x'_k acts as x_k); the twist by
    the transposition (ij) enters only through the dg algebra action.
    """
    if i == j:
        raise ValueError("Koszul object needs i != j")
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError("index out of range")
    degs = [(0, 1, 1), (0, -1, 0)]
    d = HMatrix(2, 2)
    d.set(1, 0, xvar(i) - xvar(j))
    right = {k: HMatrix.identity(2, xvar(k)) for k in range(1, n + 1)}
    return ChainComplex(degs, d, ring_vars(n), right, n, labels=["eta", "1"], perm=transposition(n, i, j))


def koszul_product(n, pairs):
    if not pairs:
        return unit_complex(n, ring_vars(n))
    C = koszul_object(n, *pairs[0])
    for p in pairs[1:]:
        C = tensor_over_R(C, koszul_object(n, *p))
    return C


def b_map(n, i):
    """b_i: B_i -> R, 1x1 -> 1 (as a 1x2 matrix)."""
    M = HMatrix(1, 2)
    M.set(0, 0, 1)
    M.set(0, 1, xvar(i + 1))
    return M


def bstar_map(n, i):
    """b_i^*: R -> B_i, 1 -> x_i (1x1) - 1x x_{i+1} (as a 2x1 matrix)."""
    M = HMatrix(2, 1)
    M.set(0, 0, xvar(i))
    M.set(1, 0, -1)
    return M


def symmetric_check(C, n):
    """p_1 and p_2 act equally on the left and on the right."""
    ev = C.right_evaluator()
    xs = [xvar(k) for k in range(1, n + 1)]
    for power in (1, 2):
        p = sum((x ** power for x in xs), Poly())
        if not (ev.eval(p) - HMatrix.identity(C.rank, p)).is_zero():
            return False
    return True
