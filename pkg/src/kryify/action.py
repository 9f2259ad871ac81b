"""Twisted dg-algebra actions on Rouquier complexes and Koszul objects.

An action consists of odd endomorphisms xi_i (homological degree +1) and even
endomorphisms u_k (homological degree +2) of a bimodule complex twisted by a
permutation w, satisfying

    [d, xi_i] = x_i - x'_{w^-1(i)},      [d, u_k] = sum_i h_{k-1}(x_i, x'_{w^-1(i)}) xi_i,

with xi's anticommuting, and u's central.
"""

from .gradedlinalg import (HMatrix, MatrixEvaluator, compose_perm, invert_perm, left_extend,
                           right_extend, tensor_over_R, unit_complex)
from .ring import complete_homogeneous, variable, xvar
from .soergel import BraidWord, koszul_object, ring_vars, rouquier_generator

DEFAULT_KMAX = 3


class AModuleAction:
    def __init__(self, complex, perm, xi, u, kmax=DEFAULT_KMAX, elementary=False):
        self.complex = complex
        self.perm = tuple(perm)
        self.xi = xi  # i -> HMatrix
        self.u = u  # k -> HMatrix
        self.kmax = kmax
        self.elementary = elementary

    @property
    def n(self):
        return self.complex.n

    def zero(self):
        return HMatrix(self.complex.rank, self.complex.rank)

    def right_matrices(self, tier=1):
        """Assignment of x'-variables (given tier) to the right-action matrices."""
        C = self.complex
        return {variable("x", i, tier).id: C.right[i] for i in range(1, self.n + 1)}

    def evaluator(self):
        return MatrixEvaluator(self.complex.rank, self.right_matrices(1))

    def twisted_h(self, k, i, ev=None):
        """Operator h_k(x_i, x'_{w^-1(i)}) (left variable scalar, right variable a matrix)."""
        ev = ev or self.evaluator()
        winv = invert_perm(self.perm)
        p = complete_homogeneous(k, [xvar(i), xvar(winv[i - 1], 1)])
        return ev.eval(p, passthrough={variable("x", i).id})


def _zero_action(C, perm, kmax, elementary=True):
    n = C.n
    z = HMatrix(C.rank, C.rank)
    return AModuleAction(C, perm, {i: z for i in range(1, n + 1)}, {k: z for k in range(1, kmax + 1)}, kmax, elementary)


def unit_action(n, kmax=DEFAULT_KMAX):
    return _zero_action(unit_complex(n, ring_vars(n)), tuple(range(1, n + 1)), kmax)


def generator_action(n, i, sign, kmax=DEFAULT_KMAX):
    """Action on T_i^{+-1}: xi_i is b_i^* (resp. b_i), xi_{i+1} = -xi_i, u_k = 0."""
    C = rouquier_generator(n, i, sign)
    A = _zero_action(C, C.perm, kmax)
    X = HMatrix(3, 3)
    if sign > 0:
        # R (index 2) -> B: 1 -> x_i e0 - e1
        X.set(0, 2, xvar(i))
        X.set(1, 2, -1)
    else:
        # B -> R (index 0): e0 -> 1, e1 -> x_{i+1}
        X.set(0, 1, 1)
        X.set(0, 2, xvar(i + 1))
    A.xi = dict(A.xi)
    A.xi[i] = X
    A.xi[i + 1] = X.scale(-1)
    return A


def koszul_action(n, i, j, kmax=DEFAULT_KMAX):
    """Action on K_ij: xi_i multiplies by eta, xi_j = -xi_i, everything else zero."""
    C = koszul_object(n, i, j)
    A = _zero_action(C, C.perm, kmax)
    X = HMatrix(2, 2)
    X.set(0, 1, 1)
    A.xi = dict(A.xi)
    A.xi[i] = X
    A.xi[j] = X.scale(-1)
    return A


def _mid_and_right(C1, C2, T):
    """Matrices on C1 x C2 for the middle variables (tier 1) and right variables (tier 2)."""
    n = C1.n
    assign = {}
    for i in range(1, n + 1):
        assign[variable("x", i, 1).id] = left_extend(C1.right[i], C1, C2)
        assign[variable("x", i, 2).id] = T.right[i]
    return assign


def tensor_action(A1, A2):
    """Action of the product twist on A1 x A2 through the twisted coproduct."""
    if A1.n != A2.n:
        raise ValueError("strand counts differ")
    C1, C2 = A1.complex, A2.complex
    n = C1.n
    kmax = min(A1.kmax, A2.kmax)
    T = tensor_over_R(C1, C2)
    ev1 = C1.right_evaluator()
    v, w = A1.perm, A2.perm
    vinv, winv = invert_perm(v), invert_perm(w)
    X1 = {i: left_extend(A1.xi[i], C1, C2) for i in range(1, n + 1)}
    X2 = {i: right_extend(A2.xi[i], C1, C2, 1, ev1) for i in range(1, n + 1)}
    xi = {i: X1[i] + X2[vinv[i - 1]] for i in range(1, n + 1)}
    ev = MatrixEvaluator(T.rank, _mid_and_right(C1, C2, T))
    u = {}
    for k in range(1, kmax + 1):
        U = left_extend(A1.u[k], C1, C2) + right_extend(A2.u[k], C1, C2, 0, ev1)
        if k >= 2:
            for i in range(1, n + 1):
                j = vinv[i - 1]
                m = winv[j - 1]
                H = ev.eval(complete_homogeneous(k - 2, [xvar(i), xvar(j, 1), xvar(m, 2)]),
                            passthrough={variable("x", i).id})
                U = U + H @ X1[i] @ X2[j]
        u[k] = U
    return AModuleAction(T, compose_perm(v, w), xi, u, kmax)


def braid_action(beta, kmax=DEFAULT_KMAX):
    """Action on the Rouquier complex of a braid word (left-to-right coproduct assembly)."""
    n = beta.n
    if not beta.word:
        return unit_action(n, kmax)
    A = generator_action(n, abs(beta.word[0]), 1 if beta.word[0] > 0 else -1, kmax)
    for s in beta.word[1:]:
        A = tensor_action(A, generator_action(n, abs(s), 1 if s > 0 else -1, kmax))
    return A


def koszul_product_action(n, pairs, kmax=DEFAULT_KMAX):
    if not pairs:
        return unit_action(n, kmax)
    A = koszul_action(n, *pairs[0], kmax=kmax)
    for p in pairs[1:]:
        A = tensor_action(A, koszul_action(n, *p, kmax=kmax))
    return A


def u2_explicit(factors):
    """u_2 on X_1 x ... x X_m from the xi's of elementary factors.

    Sum over j and k < l of xi_j^{(k)} xi^{(l)}_{(w_k ... w_{l-1})^{-1}(j)}.
    """
    for A in factors:
        if not A.elementary:
            raise ValueError("u2_explicit needs elementary factors (all u_k = 0)")
    n = factors[0].n
    C = factors[0].complex
    ext = [dict(factors[0].xi)]
    for A in factors[1:]:
        ev = C.right_evaluator()
        ext = [{i: left_extend(M, C, A.complex) for i, M in e.items()} for e in ext]
        ext.append({i: right_extend(A.xi[i], C, A.complex, 1, ev) for i in range(1, n + 1)})
        C = tensor_over_R(C, A.complex)
    U = HMatrix(C.rank, C.rank)
    m = len(factors)
    for k in range(m):
        for l in range(k + 1, m):
            w = tuple(range(1, n + 1))
            for r in range(k, l):
                w = compose_perm(w, factors[r].perm)
            winv = invert_perm(w)
            for j in range(1, n + 1):
                U = U + ext[k][j] @ ext[l][winv[j - 1]]
    return U


def _anti(A, B):
    return A @ B + B @ A


def _comm(A, B):
    return A @ B - B @ A


def verify_action(A, kmax=None):
    """Check every defining identity exactly; returns a report dict."""
    kmax = A.kmax if kmax is None else min(kmax, A.kmax)
    C = A.complex
    n = A.n
    d = C.d
    N = C.rank
    ev = A.evaluator()
    winv = invert_perm(A.perm)
    failures = []
    checks = 0

    def check(name, M):
        nonlocal checks
        checks += 1
        if not M.is_zero():
            failures.append(name)

    check("d^2", d @ d)
    for i in range(1, n + 1):
        target = HMatrix.identity(N, xvar(i)) - C.right[winv[i - 1]]
        check("[d,xi_%d]" % i, _anti(d, A.xi[i]) - target)
        for j in range(i, n + 1):
            check("xi_%d xi_%d" % (i, j), _anti(A.xi[i], A.xi[j]))
        for r in range(1, n + 1):
            check("[xi_%d,x'_%d]" % (i, r), _comm(A.xi[i], C.right[r]))
    for k in range(1, kmax + 1):
        rhs = HMatrix(N, N)
        for i in range(1, n + 1):
            rhs = rhs + A.twisted_h(k - 1, i, ev) @ A.xi[i]
        check("[d,u_%d]" % k, _comm(d, A.u[k]) - rhs)
        for i in range(1, n + 1):
            check("[u_%d,xi_%d]" % (k, i), _comm(A.u[k], A.xi[i]))
        for m in range(k + 1, kmax + 1):
            check("[u_%d,u_%d]" % (k, m), _comm(A.u[k], A.u[m]))
        for r in range(1, n + 1):
            check("[u_%d,x'_%d]" % (k, r), _comm(A.u[k], C.right[r]))
    return {"ok": not failures, "checks": checks, "failures": failures, "rank": N, "perm": list(A.perm)}


def transport_action(A, simplified):
    """Push an action through the comparison maps of gaussian_simplify."""
    S = simplified
    xi = {i: S.transport(M) for i, M in A.xi.items()}
    u = {k: S.transport(M) for k, M in A.u.items()}
    return AModuleAction(S.complex, A.perm, xi, u, A.kmax)


def all_braid_words(max_len, max_strands):
    """Every braid word of length <= max_len on 2..max_strands strands."""
    out = []
    for n in range(2, max_strands + 1):
        gens = [s for i in range(1, n) for s in (i, -i)]
        layer = [[]]
        out.append(BraidWord(n, []))
        for _ in range(max_len):
            layer = [w + [g] for w in layer for g in gens]
            out.extend(BraidWord(n, w) for w in layer)
    return out
