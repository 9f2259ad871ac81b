"""Symbolic dg algebras A_w, CA_w, CA_{c,n} and their tensor powers.

Elements are super-polynomials: a commuting part (x^(t)_i, u^(f)_k) times an
ordered square-free product of odd generators.  Tensor factors are labelled by
f = 1, 2, ...; the variables x^(f-1) and x^(f) are the left and right
variables of factor f (x, x', x'', ... for f = 1, 2, 3).
"""

from itertools import permutations, product

from .gradedlinalg import compose_perm, invert_perm
from .ring import Poly, complete_homogeneous, power_sum, power_sum_jacobian, variable, var_info, xvar

_ZERO = Poly()
_ONE = Poly.const(1)


def uvar(k, f=1):
    return variable("u", k, f - 1)


def xi_key(i, f=1):
    return (f, "xi", i)


class SuperPolynomial:
    """Sum of Poly * (ordered odd monomial); odd keys are tuples sorted lexicographically."""

    def __init__(self, terms=None):
        self.terms = {}
        for S, p in (terms or {}).items():
            if p:
                self.terms[S] = self.terms.get(S, _ZERO) + p
        self.terms = {S: p for S, p in self.terms.items() if p}

    @staticmethod
    def even(p):
        return SuperPolynomial({(): p if isinstance(p, Poly) else Poly.const(p)})

    @staticmethod
    def odd(key):
        return SuperPolynomial({(key,): _ONE})

    @staticmethod
    def xi(i, f=1):
        return SuperPolynomial.odd(xi_key(i, f))

    @staticmethod
    def u(k, f=1):
        return SuperPolynomial.even(Poly.from_var(uvar(k, f)))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, SuperPolynomial):
            other = SuperPolynomial.even(other)
        return (self - other).is_zero()

    def __add__(self, other):
        if not isinstance(other, SuperPolynomial):
            other = SuperPolynomial.even(other)
        t = dict(self.terms)
        for S, p in other.terms.items():
            t[S] = t.get(S, _ZERO) + p
        return SuperPolynomial(t)

    __radd__ = __add__

    def __neg__(self):
        return SuperPolynomial({S: -p for S, p in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, SuperPolynomial):
            other = SuperPolynomial.even(other)
        t = {}
        for S, p in self.terms.items():
            for T, q in other.terms.items():
                merged = _merge(S, T)
                if merged is None:
                    continue
                sign, U = merged
                val = p * q if sign > 0 else -(p * q)
                t[U] = t.get(U, _ZERO) + val
        return SuperPolynomial(t)

    def __rmul__(self, other):
        return SuperPolynomial.even(other) * self

    def parity_terms(self):
        return {len(S) % 2 for S in self.terms}

    def map_coeffs(self, fn):
        return SuperPolynomial({S: fn(p) for S, p in self.terms.items()})

    def variables(self):
        vs = set()
        for p in self.terms.values():
            vs |= p.variables()
        return vs

    def odd_keys(self):
        return {k for S in self.terms for k in S}

    def hdegree_set(self):
        """Homological degrees of the terms (xi: 1, u: 2, x: 0)."""
        out = set()
        for S, p in self.terms.items():
            for m in p.terms:
                h = len(S)
                for v, e in m:
                    info = var_info(v)
                    if info.kind == "u":
                        h += 2 * e
                out.add(h)
        return out

    def to_str(self):
        if not self.terms:
            return "0"
        parts = []
        for S in sorted(self.terms):
            name = "*".join(_odd_name(k) for k in S)
            coeff = self.terms[S].to_str()
            parts.append("(%s)%s" % (coeff, ("*" + name) if name else ""))
        return " + ".join(parts)

    def __repr__(self):
        return "SuperPolynomial(%s)" % self.to_str()


def _odd_name(key):
    f, kind, i = key
    return "%s%d" % (kind, i) + ("" if f == 1 else "_(%d)" % f)


def _merge(S, T):
    if set(S) & set(T):
        return None
    inv = 0
    for a in S:
        for b in T:
            if a > b:
                inv += 1
    return (-1 if inv % 2 else 1), tuple(sorted(S + T))


def vanishes(e, n, s=None):
    """Whether e is zero over R x_{R^S} R x_{R^S} ... (s tensor factors).

    That ring embeds into a product of copies of R via x^(t) -> sigma_t(x), so e
    vanishes exactly when every such specialization does.
    """
    if e.is_zero():
        return True
    if s is None:
        tiers = {var_info(v).tier for v in e.variables() if var_info(v).kind == "x"}
        s = max(tiers | {0})
    perms = list(permutations(range(1, n + 1)))
    for choice in product(perms, repeat=s):
        sub = {}
        for t, sigma in enumerate(choice, start=1):
            for i in range(1, n + 1):
                sub[variable("x", i, t).id] = xvar(sigma[i - 1])
        if not e.map_coeffs(lambda p: p.subs(sub)).is_zero():
            return False
    return True


def apply_hom(e, even_map, odd_map):
    """Image of e under the algebra homomorphism given on generators.

    even_map: variable id -> SuperPolynomial (even); odd_map: key -> SuperPolynomial.
    Unlisted even variables are fixed; unlisted odd keys raise.
    """
    out = SuperPolynomial()
    cache = {}
    for S, p in e.terms.items():
        img = SuperPolynomial()
        for m, c in p.terms.items():
            term = SuperPolynomial.even(Poly.const(c))
            for v, k in m:
                key = (v, k)
                if key not in cache:
                    base = even_map.get(v)
                    if base is None:
                        base = SuperPolynomial.even(Poly({((v, 1),): 1}))
                    acc = SuperPolynomial.even(_ONE)
                    for _ in range(k):
                        acc = acc * base
                    cache[key] = acc
                term = term * cache[key]
            img = img + term
        for key in S:
            if key not in odd_map:
                raise KeyError("no image for odd generator %s" % (key,))
            img = img * odd_map[key]
        out = out + img
    return out


# ---------------------------------------------------------------------------
# algebra descriptions


class AlgebraSpec:
    """One of A_w, CA_w, CA_{c,n}.

    A_w:      d xi_i = x_i - x'_{w^-1(i)},  d u_k = sum_i h_{k-1}(x_i, x'_{w^-1(i)}) xi_i
    CA_w:     the same with x' replaced by x
    CA_{c,n}: d xi_i = 0 (i <= c), d u_k = k sum_i x_i^{k-1} xi_i (k <= n)
    """

    def __init__(self, n, w=None, flavor="A_w", c=None, kmax=None):
        self.n = n
        self.w = tuple(w) if w is not None else tuple(range(1, n + 1))
        if sorted(self.w) != list(range(1, n + 1)):
            raise ValueError("invalid permutation %s" % (self.w,))
        if flavor not in ("A_w", "CA_w", "CA_cn"):
            raise ValueError("unknown flavor %s" % flavor)
        self.flavor = flavor
        self.c = c
        if flavor == "CA_cn":
            if c is None or c > n:
                raise ValueError("CA_{c,n} needs c <= n")
        self.kmax = kmax if kmax is not None else (n if flavor == "CA_cn" else 8)

    def allowed(self):
        vs = set()
        if self.flavor == "CA_cn":
            vs |= {variable("x", i).id for i in range(1, self.c + 1)}
            vs |= {uvar(k).id for k in range(1, self.kmax + 1)}
            odd = {xi_key(i) for i in range(1, self.c + 1)}
        else:
            vs |= {variable("x", i).id for i in range(1, self.n + 1)}
            if self.flavor == "A_w":
                vs |= {variable("x", i, 1).id for i in range(1, self.n + 1)}
            vs |= {uvar(k).id for k in range(1, self.kmax + 1)}
            odd = {xi_key(i) for i in range(1, self.n + 1)}
        return vs, odd

    def d_odd(self, key):
        f, kind, i = key
        if self.flavor == "CA_cn":
            return SuperPolynomial()
        j = invert_perm(self.w)[i - 1]
        right = xvar(j, 1) if self.flavor == "A_w" else xvar(j)
        return SuperPolynomial.even(xvar(i) - right)

    def d_even(self, vid):
        info = var_info(vid)
        if info.kind != "u":
            return SuperPolynomial()
        k = info.index
        if self.flavor == "CA_cn":
            out = SuperPolynomial()
            for i in range(1, self.c + 1):
                out = out + SuperPolynomial.even(xvar(i) ** (k - 1) * k) * SuperPolynomial.xi(i)
            return out
        winv = invert_perm(self.w)
        out = SuperPolynomial()
        for i in range(1, self.n + 1):
            r = xvar(winv[i - 1], 1) if self.flavor == "A_w" else xvar(winv[i - 1])
            out = out + SuperPolynomial.even(complete_homogeneous(k - 1, [xvar(i), r])) * SuperPolynomial.xi(i)
        return out


class TensorSpec:
    """A_{w_1} x_R ... x_R A_{w_s}; factor f has left tier f-1 and right tier f."""

    def __init__(self, n, twists):
        self.n = n
        self.twists = [tuple(w) for w in twists]

    @staticmethod
    def untwisted(n, s):
        return TensorSpec(n, [tuple(range(1, n + 1))] * s)

    @property
    def s(self):
        return len(self.twists)

    def allowed(self):
        vs = {variable("x", i, t).id for i in range(1, self.n + 1) for t in range(self.s + 1)}
        vs |= {uvar(k, f).id for k in range(1, 12) for f in range(1, self.s + 1)}
        odd = {xi_key(i, f) for i in range(1, self.n + 1) for f in range(1, self.s + 1)}
        return vs, odd

    def d_odd(self, key):
        f, kind, i = key
        winv = invert_perm(self.twists[f - 1])
        return SuperPolynomial.even(xvar(i, f - 1) - xvar(winv[i - 1], f))

    def d_even(self, vid):
        info = var_info(vid)
        if info.kind != "u":
            return SuperPolynomial()
        k, f = info.index, info.tier + 1
        winv = invert_perm(self.twists[f - 1])
        out = SuperPolynomial()
        for i in range(1, self.n + 1):
            h = complete_homogeneous(k - 1, [xvar(i, f - 1), xvar(winv[i - 1], f)])
            out = out + SuperPolynomial.even(h) * SuperPolynomial.xi(i, f)
        return out


def differential(e, spec):
    """Graded Leibniz extension of the generator differentials (degree -1)."""
    vs, odd = spec.allowed()
    for v in e.variables():
        if v not in vs:
            raise ValueError("foreign generator %s" % var_info(v).name)
    for k in e.odd_keys():
        if k not in odd:
            raise ValueError("foreign generator %s" % _odd_name(k))
    out = SuperPolynomial()
    for S, p in e.terms.items():
        # d(p) xi_S
        for v in p.variables():
            dv = spec.d_even(v)
            if dv.is_zero():
                continue
            out = out + SuperPolynomial.even(p.diff(v)) * dv * SuperPolynomial({S: _ONE})
        # p d(xi_S)
        for j, key in enumerate(S):
            dk = spec.d_odd(key)
            if dk.is_zero():
                continue
            sign = -1 if j % 2 else 1
            rest = SuperPolynomial({S[:j]: _ONE}) * dk * SuperPolynomial({S[j + 1:]: _ONE})
            out = out + SuperPolynomial.even(p * sign) * rest
    return out


# ---------------------------------------------------------------------------
# coproducts


def _shift_map(n, s, a, add=1):
    """Relabelling for inserting `add` new factors after factor a of an s-fold tensor."""
    even = {}
    odd = {}
    for t in range(a, s + 1):
        for i in range(1, n + 1):
            even[variable("x", i, t).id] = SuperPolynomial.even(xvar(i, t + add))
    for f in range(a + 1, s + 1):
        for k in range(1, 12):
            even[uvar(k, f).id] = SuperPolynomial.u(k, f + add)
        for i in range(1, n + 1):
            odd[xi_key(i, f)] = SuperPolynomial.xi(i, f + add)
    for f in range(1, a):
        for i in range(1, n + 1):
            odd[xi_key(i, f)] = SuperPolynomial.xi(i, f)
    return even, odd


def coproduct_on_factor(e, n, s, a, v=None, w=None, kmax=8):
    """Delta applied to factor a of an s-fold tensor, splitting its twist vw into (v, w)."""
    ident = tuple(range(1, n + 1))
    v = tuple(v) if v is not None else ident
    w = tuple(w) if w is not None else ident
    vinv, winv = invert_perm(v), invert_perm(w)
    even, odd = _shift_map(n, s, a)
    for i in range(1, n + 1):
        odd[xi_key(i, a)] = SuperPolynomial.xi(i, a) + SuperPolynomial.xi(vinv[i - 1], a + 1)
    for k in range(1, kmax + 1):
        img = SuperPolynomial.u(k, a) + SuperPolynomial.u(k, a + 1)
        if k >= 2:
            for i in range(1, n + 1):
                j = vinv[i - 1]
                m = winv[j - 1]
                h = complete_homogeneous(k - 2, [xvar(i, a - 1), xvar(j, a), xvar(m, a + 1)])
                img = img + SuperPolynomial.even(h) * SuperPolynomial.xi(i, a) * SuperPolynomial.xi(j, a + 1)
        even[uvar(k, a).id] = img
    return apply_hom(e, even, odd)


def coproduct(e, v, w, kmax=8):
    """Delta: A_{vw} -> A_v x_R A_w on an element of A_{vw}."""
    n = len(v)
    return coproduct_on_factor(e, n, 1, 1, v, w, kmax)


def counit_on_factor(e, n, s, a):
    """epsilon on factor a (untwisted there): xi, u -> 0 and its right variables -> left ones."""
    even = {}
    odd = {}
    for i in range(1, n + 1):
        even[variable("x", i, a).id] = SuperPolynomial.even(xvar(i, a - 1))
        odd[xi_key(i, a)] = SuperPolynomial()
    for k in range(1, 12):
        even[uvar(k, a).id] = SuperPolynomial()
    for t in range(a + 1, s + 1):
        for i in range(1, n + 1):
            even[variable("x", i, t).id] = SuperPolynomial.even(xvar(i, t - 1))
    for f in range(a + 1, s + 1):
        for k in range(1, 12):
            even[uvar(k, f).id] = SuperPolynomial.u(k, f - 1)
        for i in range(1, n + 1):
            odd[xi_key(i, f)] = SuperPolynomial.xi(i, f - 1)
    for f in range(1, a):
        for i in range(1, n + 1):
            odd[xi_key(i, f)] = SuperPolynomial.xi(i, f)
    return apply_hom(e, even, odd)


def higher_coproduct(s, k, n):
    """delta^(s)(u_k) = sum_i h_{k-s}(x_i, x'_i, ..., x^(s)_i) xi_i^{x s} (zero if s > k)."""
    if s < 3:
        raise ValueError("higher coproducts start at s = 3")
    out = SuperPolynomial()
    if s > k:
        return out
    for i in range(1, n + 1):
        h = complete_homogeneous(k - s, [xvar(i, t) for t in range(s + 1)])
        term = SuperPolynomial.even(h)
        for f in range(1, s + 1):
            term = term * SuperPolynomial.xi(i, f)
        out = out + term
    return out


def delta_on_factor(sdeg, e, n, t, a):
    """delta^(sdeg) applied to factor a of a t-fold tensor (sdeg >= 3).

    Defined where factor a carries a single u and nothing else of its own; any
    other shape would need the product extension, which is left open.
    """
    out = SuperPolynomial()
    even_shift, odd_shift = _shift_map(n, t, a, sdeg - 1)
    for S, p in e.terms.items():
        has_xi = any(key[0] == a for key in S)
        for m, c in p.terms.items():
            us = [(v, ex) for v, ex in m if var_info(v).kind == "u" and var_info(v).tier + 1 == a]
            if not us:
                # delta^(s) kills x's, xi's and 1
                continue
            if has_xi:
                raise NotImplementedError("delta^(s) on products of u and xi")
            if len(us) > 1 or us[0][1] > 1:
                raise NotImplementedError("delta^(s) on products of u's")
            k = var_info(us[0][0]).index
            rest = Poly({tuple((v, ex) for v, ex in m if v != us[0][0]): c})
            core = higher_coproduct(sdeg, k, n)
            # core lives in factors 1..sdeg over tiers 0..sdeg; move it to factors a..a+sdeg-1
            cmap_even = {variable("x", i, r).id: SuperPolynomial.even(xvar(i, r + a - 1))
                         for i in range(1, n + 1) for r in range(sdeg + 1)}
            cmap_odd = {xi_key(i, f): SuperPolynomial.xi(i, f + a - 1) for i in range(1, n + 1) for f in range(1, sdeg + 1)}
            moved = apply_hom(core, cmap_even, cmap_odd)
            left = apply_hom(SuperPolynomial({(): rest}), even_shift, odd_shift)
            Sodd = SuperPolynomial({S: _ONE})
            pre = SuperPolynomial({tuple(k2 for k2 in S if k2[0] < a): _ONE})
            post = SuperPolynomial({tuple(k2 for k2 in S if k2[0] > a): _ONE})
            if (pre * post) != Sodd:
                raise AssertionError("odd ordering")
            post_img = apply_hom(post, {}, odd_shift)
            out = out + left * pre * moved * post_img
    return out


def _ordered_generators(S, mono):
    """x-part Poly and the ordered generator list (xi's, then u's by increasing k)."""
    xs, us = [], []
    for v, e in mono:
        info = var_info(v)
        if info.kind == "u":
            us.extend([info.index] * e)
        else:
            xs.append((v, e))
    gens = [("xi", key) for key in S] + [("u", k) for k in sorted(us)]
    return Poly({tuple(xs): 1}), gens


def delta3(e, n, koszul_sign=True):
    """delta^(3) on A (untwisted) by the inductive rule
    delta(a g) = delta(a) D1D(g) + (-1)^|a| D2D(a) delta(g), generators appended in order
    (xi's first, u's last by increasing k).  koszul_sign=False drops (-1)^|a|, which
    breaks the homotopy identity as soon as an odd prefix meets a u."""
    kmax = 12
    out = SuperPolynomial()

    def dd(x, first):
        D = coproduct_on_factor(x, n, 1, 1, kmax=kmax)
        return coproduct_on_factor(D, n, 2, 1 if first else 2, kmax=kmax)

    for S, p in e.terms.items():
        for mono, c in p.terms.items():
            P, gens = _ordered_generators(S, mono)
            val = SuperPolynomial()
            d1 = SuperPolynomial.even(_ONE)
            d2 = SuperPolynomial.even(_ONE)
            parity = 0
            for kind, g in gens:
                el = SuperPolynomial.odd(g) if kind == "xi" else SuperPolynomial.u(g)
                g1, g2 = dd(el, True), dd(el, False)
                new = val * g1
                if kind == "u":
                    sign = -1 if (koszul_sign and parity) else 1
                    new = new + d2 * higher_coproduct(3, g, n) * sign if g >= 3 else new
                val = new
                d1, d2 = d1 * g1, d2 * g2
                parity ^= 1 if kind == "xi" else 0
            out = out + dd(SuperPolynomial.even(P * c), True) * val
    return out


def delta3_homotopy_defect(e, n, koszul_sign=True):
    """D1D(e) - D2D(e) - (d delta3 + delta3 d)(e) on A (untwisted)."""
    kmax = 12
    D = coproduct_on_factor(e, n, 1, 1, kmax=kmax)
    lhs = coproduct_on_factor(D, n, 2, 1, kmax=kmax) - coproduct_on_factor(D, n, 2, 2, kmax=kmax)
    spec1 = AlgebraSpec(n, None, "A_w", kmax=kmax)
    spec3 = TensorSpec.untwisted(n, 3)
    rhs = differential(delta3(e, n, koszul_sign), spec3) + delta3(differential(e, spec1), n, koszul_sign)
    return lhs - rhs


def a_infty_sign(s, a):
    """Sign of delta^(s)_a in the A-infinity relation, fixed by exhaustive search."""
    return -1 if (s + (a - 1) * (s - 1)) % 2 else 1


def _relation_terms(m, k, n):
    """List of ((s, t, a), delta^(s)_a delta^(t)(u_k)) for s + t = m + 1, s, t >= 2."""
    terms = []
    u = SuperPolynomial.u(k)
    for s in range(2, m):
        t = m + 1 - s
        if t < 2:
            continue
        inner = coproduct(u, tuple(range(1, n + 1)), tuple(range(1, n + 1)), kmax=k) if t == 2 \
            else higher_coproduct(t, k, n)
        for a in range(1, t + 1):
            if s == 2:
                val = coproduct_on_factor(inner, n, t, a, kmax=k)
            else:
                val = delta_on_factor(s, inner, n, t, a)
            terms.append(((s, t, a), val))
    return terms


def _rhs(m, k, n):
    top = coproduct(SuperPolynomial.u(k), tuple(range(1, n + 1)), tuple(range(1, n + 1)), kmax=k) if m == 2 \
        else higher_coproduct(m, k, n)
    return differential(top, TensorSpec.untwisted(n, m))


def ainfty_defect(m, k, n, signs=None):
    """LHS - RHS of the A-infinity relation on u_k with the frozen (or given) signs."""
    if m < 3:
        raise ValueError("m >= 3")
    out = SuperPolynomial()
    for (s, t, a), val in _relation_terms(m, k, n):
        sg = signs[(s, t, a)] if signs is not None else a_infty_sign(s, a)
        out = out + (val if sg > 0 else -val)
    return out - _rhs(m, k, n)


def search_ainfty_signs(m, k, n):
    """All sign assignments zeroing the defect (exhaustive over 2^terms)."""
    terms = _relation_terms(m, k, n)
    rhs = _rhs(m, k, n)
    sols = []
    for choice in product((1, -1), repeat=len(terms)):
        acc = SuperPolynomial()
        for sg, (_, val) in zip(choice, terms):
            acc = acc + (val if sg > 0 else -val)
        if (acc - rhs).is_zero():
            sols.append({key: sg for sg, (key, _) in zip(choice, terms)})
    return sols


def coassociativity_defect(k, n):
    """Delta_1 Delta - Delta_2 Delta - d delta^(3) on u_k."""
    ident = tuple(range(1, n + 1))
    D = coproduct(SuperPolynomial.u(k), ident, ident, kmax=k)
    lhs = coproduct_on_factor(D, n, 2, 1, kmax=k) - coproduct_on_factor(D, n, 2, 2, kmax=k)
    rhs = differential(higher_coproduct(3, k, n), TensorSpec.untwisted(n, 3)) if k >= 3 else SuperPolynomial()
    return lhs - rhs


def coproduct_chain_defect(e, v, w, kmax=8):
    """Delta d e - d Delta e for e in A_{vw}."""
    n = len(v)
    vw = compose_perm(v, w)
    src = AlgebraSpec(n, vw, "A_w", kmax=kmax)
    tgt = TensorSpec(n, [v, w])
    # the right variable of A_{vw} becomes x'' in the tensor
    lhs = coproduct(differential(e, src), v, w, kmax)
    rhs = differential(coproduct(e, v, w, kmax), tgt)
    return lhs - rhs


def counit_defects(e, n, kmax=8):
    """(Id x eps) Delta e - e and (eps x Id) Delta e - e for e in A (untwisted)."""
    ident = tuple(range(1, n + 1))
    D = coproduct(e, ident, ident, kmax)
    left = counit_on_factor(D, n, 2, 2)
    right = counit_on_factor(D, n, 2, 1)
    return left - e, right - e


# ---------------------------------------------------------------------------
# CA_w <-> CA_{c,n}


def cycles_of(w):
    """Cycles listed from their minimum, c_{m+1} = w^-1(c_m)."""
    winv = invert_perm(w)
    seen, out = set(), []
    for i in range(1, len(w) + 1):
        if i in seen:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = winv[j - 1]
        out.append(cyc)
    return out


def beta_correction(w, k):
    """sum_cycles sum_m h_{k-2}(x_c1, x_cm, x_c(m+1)) xi_cm (xi_c(m+1) + ... + xi_cL) in CA_w."""
    out = SuperPolynomial()
    if k < 2:
        return out
    for c in cycles_of(w):
        for m in range(len(c) - 1):
            h = complete_homogeneous(k - 2, [xvar(c[0]), xvar(c[m]), xvar(c[m + 1])])
            tail = SuperPolynomial()
            for r in range(m + 1, len(c)):
                tail = tail + SuperPolynomial.xi(c[r])
            out = out + SuperPolynomial.even(h) * SuperPolynomial.xi(c[m]) * tail
    return out


class AlphaBeta:
    def __init__(self, w, kmax):
        self.w = tuple(w)
        self.n = len(w)
        self.kmax = kmax
        self.cycles = cycles_of(w)
        self.c = len(self.cycles)
        self.src = AlgebraSpec(self.n, w, "CA_w", kmax=kmax)
        self.tgt = AlgebraSpec(self.n, None, "CA_cn", c=self.c, kmax=kmax)
        # alpha: CA_w -> CA_{c,n}
        self.alpha_even = {}
        self.alpha_odd = {}
        for ci, cyc in enumerate(self.cycles, start=1):
            for j in cyc:
                self.alpha_even[variable("x", j).id] = SuperPolynomial.even(xvar(ci))
                self.alpha_odd[xi_key(j)] = SuperPolynomial.xi(ci) if j == cyc[0] else SuperPolynomial()
        # beta: CA_{c,n} -> CA_w
        self.beta_even = {}
        self.beta_odd = {}
        for ci, cyc in enumerate(self.cycles, start=1):
            self.beta_even[variable("x", ci).id] = SuperPolynomial.even(xvar(cyc[0]))
            img = SuperPolynomial()
            for j in cyc:
                img = img + SuperPolynomial.xi(j)
            self.beta_odd[xi_key(ci)] = img
        for k in range(1, kmax + 1):
            self.beta_even[uvar(k).id] = SuperPolynomial.u(k) + beta_correction(w, k)

    def alpha(self, e):
        return apply_hom(e, self.alpha_even, self.alpha_odd)

    def beta(self, e):
        # x_i of CA_{c,n} must be renamed simultaneously
        return apply_hom(e, self.beta_even, self.beta_odd)

    def generators(self):
        gens = [SuperPolynomial.even(xvar(i)) for i in range(1, self.c + 1)]
        gens += [SuperPolynomial.xi(i) for i in range(1, self.c + 1)]
        gens += [SuperPolynomial.u(k) for k in range(1, self.kmax + 1)]
        return gens

    def check(self):
        """alpha(beta(g)) = g, d beta = beta d, d alpha = alpha d on generators."""
        rep = {"alpha_beta_id": True, "beta_chain": True, "alpha_chain": True}
        for g in self.generators():
            if not self.alpha(self.beta(g)) == g:
                rep["alpha_beta_id"] = False
            if not differential(self.beta(g), self.src) == self.beta(differential(g, self.tgt)):
                rep["beta_chain"] = False
        gens_w = [SuperPolynomial.even(xvar(i)) for i in range(1, self.n + 1)]
        gens_w += [SuperPolynomial.xi(i) for i in range(1, self.n + 1)]
        gens_w += [SuperPolynomial.u(k) for k in range(1, self.kmax + 1)]
        for g in gens_w:
            if not differential(self.alpha(g), self.tgt) == self.alpha(differential(g, self.src)):
                rep["alpha_chain"] = False
        return rep


def alpha_beta(w, kmax):
    return AlphaBeta(w, kmax)


# ---------------------------------------------------------------------------
# stabilization Phi_mu^N


def _check_composition(mu):
    mu = tuple(int(m) for m in mu)
    if not mu or any(m <= 0 for m in mu):
        raise ValueError("invalid composition %s" % (mu,))
    return mu


def _x_mu_sub(mu):
    sub = {}
    pos = 1
    for ci, m in enumerate(mu, start=1):
        for _ in range(m):
            sub[variable("x", pos).id] = xvar(ci)
            pos += 1
    return sub


def phi_stabilize(mu, N, k):
    """Phi_mu^N(u_k) in CA_{c,n} via the power-sum Jacobian at x^mu."""
    mu = _check_composition(mu)
    n = sum(mu)
    if N < n or k > N or k < 1:
        raise ValueError("need N >= n and 1 <= k <= N")
    if k <= n:
        return SuperPolynomial.u(k)
    sub = _x_mu_sub(mu)
    out = SuperPolynomial()
    for l in range(1, n + 1):
        coeff = power_sum_jacobian(k, l, n).subs(sub)
        out = out + SuperPolynomial.even(coeff) * SuperPolynomial.u(l)
    return out


def phi_by_series(mu, N):
    """Phi_mu^N(u_k), k = 1..N, from the condition that
    (sum_k Phi(u_k) t^k / k) * prod (1 - t x_i)^mu_i has no t-terms above degree n."""
    mu = _check_composition(mu)
    n = sum(mu)
    # coefficients of prod (1 - t x_i)^mu_i
    poly = [Poly.const(1)]
    for ci, m in enumerate(mu, start=1):
        for _ in range(m):
            nxt = [Poly() for _ in range(len(poly) + 1)]
            for j, c in enumerate(poly):
                nxt[j] = nxt[j] + c
                nxt[j + 1] = nxt[j + 1] - c * xvar(ci)
            poly = nxt
    vals = {}
    for k in range(1, N + 1):
        if k <= n:
            vals[k] = SuperPolynomial.u(k)
            continue
        # coefficient of t^k: sum_{j} vals[k-j]/(k-j) * poly[j] = 0 (poly[0] = 1)
        acc = SuperPolynomial()
        for j in range(1, min(k - 1, n) + 1):
            acc = acc + vals[k - j].map_coeffs(lambda p, j=j, kk=k - j: p * poly[j] / kk)
        vals[k] = acc.map_coeffs(lambda p, k=k: -p * k)
    return vals


def phi_compose(mu, N, e):
    """Apply Phi_mu^N (on u's) to an element of CA_{c,N}."""
    even = {uvar(k).id: phi_stabilize(mu, N, k) for k in range(1, N + 1)}
    return apply_hom(e, even, {xi_key(i): SuperPolynomial.xi(i) for i in range(1, len(mu) + 1)})


def phi_composition_defect(mu, mu2, N2, k):
    """Phi_mu^N(Phi_mu2^N2(u_k)) - Phi_mu^N2(u_k) with N = |mu2|, mu2_i >= mu_i, N2 >= N."""
    mu, mu2 = _check_composition(mu), _check_composition(mu2)
    N = sum(mu2)
    if len(mu) != len(mu2) or any(a > b for a, b in zip(mu, mu2)) or N2 < N:
        raise ValueError("need mu2 >= mu part by part and N2 >= |mu2|")
    return phi_compose(mu, N, phi_stabilize(mu2, N2, k)) - phi_stabilize(mu, N2, k)


def phi_chain_defect(mu, N, k):
    """d Phi(u_k) - Phi(d u_k) in CA_{c,n}."""
    mu = _check_composition(mu)
    c, n = len(mu), sum(mu)
    lhs = differential(phi_stabilize(mu, N, k), AlgebraSpec(n, None, "CA_cn", c=c, kmax=n))
    du = differential(SuperPolynomial.u(k), AlgebraSpec(N, None, "CA_cn", c=c, kmax=N))
    return lhs - du


# ---------------------------------------------------------------------------
# corrections C_ij


def correction_Cij(f, g, n):
    """C^{f,g}_{ij} = 1/2 (int_0^1 dt int_0^t ds - int_0^1 ds int_0^s dt) f_i(s) g_j(t),
    with f_i(s) = df/dx_i at s x + (1 - s) x'."""
    from .ring import is_symmetric, path_point

    if not (is_symmetric(f, n) and is_symmetric(g, n)):
        raise ValueError("correction_Cij expects symmetric polynomials")
    s = variable("aux", 1)
    t = variable("aux", 0)
    S, T = Poly.from_var(s), Poly.from_var(t)
    out = {}
    for i in range(1, n + 1):
        fi = f.diff(variable("x", i)).subs(path_point(n, S))
        for j in range(1, n + 1):
            gj = g.diff(variable("x", j)).subs(path_point(n, T))
            P = fi * gj
            first = P.integrate(s, 0, T).integrate(t, 0, 1)
            second = P.integrate(t, 0, S).integrate(s, 0, 1)
            val = (first - second) / 2
            if val:
                out[(i, j)] = val
    return out


def _u_and_corrections(factors, n):
    """U(Q) and C^Q for Q = p_{k_1} ... p_{k_m} (left multiplication in the Leibniz rule)."""
    xs = [xvar(i) for i in range(1, n + 1)]
    if not factors:
        return SuperPolynomial(), {}, Poly.const(1)
    if len(factors) == 1:
        k = factors[0]
        return SuperPolynomial.u(k), {}, power_sum(k, xs)
    k, rest = factors[0], factors[1:]
    f = power_sum(k, xs)
    Ug, Cg, g = _u_and_corrections(rest, n)
    U = SuperPolynomial.u(k) * SuperPolynomial.even(g) + SuperPolynomial.even(f) * Ug
    C = {}
    for key, val in Cg.items():
        C[key] = C.get(key, Poly()) + f * val
    for key, val in correction_Cij(f, g, n).items():
        C[key] = C.get(key, Poly()) + val
    return U, C, f * g


def corrections_identity_defect(factors, n):
    """d(U(Q) + sum C_ij xi_i xi_j) - sum a_i^Q xi_i for Q a product of power sums."""
    from .ring import factorization_coeffs

    U, C, Q = _u_and_corrections(list(factors), n)
    spec = AlgebraSpec(n, None, "A_w", kmax=max(factors) if factors else 1)
    e = U
    for (i, j), val in C.items():
        e = e + SuperPolynomial.even(val) * SuperPolynomial.xi(i) * SuperPolynomial.xi(j)
    lhs = differential(e, spec)
    rhs = SuperPolynomial()
    for i, a in enumerate(factorization_coeffs(Q, n), start=1):
        rhs = rhs + SuperPolynomial.even(a) * SuperPolynomial.xi(i)
    return lhs - rhs, C


def all_perms(n):
    return [tuple(p) for p in permutations(range(1, n + 1))]


# ---------------------------------------------------------------------------
# identity suite


def _report(identity, params, defect, n=None, modulo=False):
    ok = vanishes(defect, n) if modulo else defect.is_zero()
    return {"identity": identity, "parameters": params, "status": "pass" if ok else "fail",
            "defect": "0" if ok else defect.to_str()}


def _generators(n, kmax, flavor="A_w"):
    gens = [SuperPolynomial.even(xvar(i)) for i in range(1, n + 1)]
    gens += [SuperPolynomial.xi(i) for i in range(1, n + 1)]
    gens += [SuperPolynomial.u(k) for k in range(1, kmax + 1)]
    return gens


def identity_suite(n, kmax, perm_n=None):
    """Every exact identity of the algebra layer on generators.

    n bounds the number of strands for the differential, coproduct and A-infinity
    checks; perm_n (default n) bounds the permutations for alpha/beta.  Each entry
    is {identity, parameters, status, defect} with the defect printed exactly.
    """
    perm_n = n if perm_n is None else perm_n
    out = []
    for m in range(1, n + 1):
        for w in all_perms(m):
            for flavor in ("A_w", "CA_w"):
                spec = AlgebraSpec(m, w, flavor, kmax=kmax)
                for g in _generators(m, kmax):
                    dd = differential(differential(g, spec), spec)
                    out.append(_report("d^2=0", {"n": m, "w": list(w), "flavor": flavor, "generator": g.to_str()},
                                       dd, m, modulo=flavor == "A_w"))
        for v in all_perms(m):
            for w in all_perms(m):
                for g in _generators(m, kmax):
                    out.append(_report("coproduct_chain", {"n": m, "v": list(v), "w": list(w), "generator": g.to_str()},
                                       coproduct_chain_defect(g, v, w, kmax), m, modulo=True))
        for g in _generators(m, kmax):
            left, right = counit_defects(g, m, kmax)
            out.append(_report("counit_left", {"n": m, "generator": g.to_str()}, left, m, modulo=True))
            out.append(_report("counit_right", {"n": m, "generator": g.to_str()}, right, m, modulo=True))
            out.append(_report("delta3_homotopy", {"n": m, "generator": g.to_str()},
                               delta3_homotopy_defect(g, m), m, modulo=True))
        for k in range(1, kmax + 1):
            out.append(_report("coassociativity", {"n": m, "k": k}, coassociativity_defect(k, m), m, modulo=True))
        for mm in range(3, kmax + 1):
            for k in range(mm, kmax + 1):
                out.append(_report("a_infinity", {"m": mm, "k": k, "n": m}, ainfty_defect(mm, k, m), m, modulo=True))
    for m in range(1, perm_n + 1):
        for w in all_perms(m):
            rep = AlphaBeta(w, kmax).check()
            for key in ("alpha_beta_id", "beta_chain", "alpha_chain"):
                out.append({"identity": key, "parameters": {"w": list(w), "kmax": kmax},
                            "status": "pass" if rep[key] else "fail", "defect": "0" if rep[key] else "nonzero"})
    for mu in _compositions(n):
        N = sum(mu)
        for k in range(1, kmax + 1):
            if k > N + 2:
                continue
            out.append(_report("phi_chain", {"mu": list(mu), "N": N + 2, "k": k}, phi_chain_defect(mu, N + 2, k)))
            for mu2 in _dominating(mu, n + 1):
                N2 = max(sum(mu2), k)
                out.append(_report("phi_composition", {"mu": list(mu), "mu2": list(mu2), "N2": N2, "k": k},
                                   phi_composition_defect(mu, mu2, N2, k)))
    return out


def _compositions(n):
    out = []
    for total in range(1, n + 1):
        for parts in range(1, total + 1):
            for mu in product(range(1, total + 1), repeat=parts):
                if sum(mu) == total:
                    out.append(mu)
    return out


def _dominating(mu, bound):
    return [mu2 for mu2 in product(*[range(m, bound + 1) for m in mu]) if sum(mu2) <= bound]
