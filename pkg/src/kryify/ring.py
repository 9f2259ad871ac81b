"""Sparse multivariate polynomials over the rationals with tri-graded variables.

Variables live in a process-wide registry.  A variable is identified by
``(kind, index, tier)``; ``tier`` distinguishes x, x', x'', ... (tier 0, 1, 2).
Each variable carries an (a, q, t) degree.  Monomials are tuples of
``(var_id, exponent)`` pairs sorted by var id, which keeps hashing cheap.
"""

from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
import re

# order of kinds in canonical output
KIND_ORDER = {"x": 0, "y": 1, "nu": 2, "u": 3, "p": 4, "aux": 5}


class Variable:
    __slots__ = ("id", "kind", "index", "tier", "deg", "name")

    def __init__(self, vid, kind, index, tier, deg, name):
        self.id = vid
        self.kind = kind
        self.index = index
        self.tier = tier
        self.deg = deg
        self.name = name

    def key(self):
        return (KIND_ORDER.get(self.kind, 9), self.tier, self.index, self.name)

    def __repr__(self):
        return self.name


_VARS = []
_LOOKUP = {}


def _default_name(kind, index, tier):
    if kind == "x":
        if tier <= 2:
            return "x" + "'" * tier + str(index)
        return "x^(%d)_%d" % (tier, index)
    if kind == "aux":
        return "t" if index == 0 else "s%d" % index
    return "%s%d" % (kind, index) if tier == 0 else "%s%d_%d" % (kind, index, tier)


def _default_degree(kind, index):
    if kind == "x":
        return (0, 2, 0)
    if kind == "y":
        return (0, -2, -2)
    if kind == "nu":
        return (0, -2 * index, -3)
    if kind == "u":
        return (0, 2 * index, 2)
    if kind == "p":
        return (0, 2 * index, 0)
    return (0, 0, 0)


def variable(kind, index, tier=0, deg=None, name=None):
    """Return the registered Variable, creating it on first use."""
    k = (kind, index, tier)
    vid = _LOOKUP.get(k)
    if vid is not None:
        return _VARS[vid]
    if deg is None:
        deg = _default_degree(kind, index)
    if name is None:
        name = _default_name(kind, index, tier)
    v = Variable(len(_VARS), kind, index, tier, tuple(deg), name)
    _VARS.append(v)
    _LOOKUP[k] = v.id
    return v


def var_info(vid):
    return _VARS[vid]


def lookup_name(name):
    for v in _VARS:
        if v.name == name:
            return v
    m = re.fullmatch(r"x('*)(\d+)", name)
    if m:
        return variable("x", int(m.group(2)), len(m.group(1)))
    m = re.fullmatch(r"x\^\((\d+)\)_(\d+)", name)
    if m:
        return variable("x", int(m.group(2)), int(m.group(1)))
    m = re.fullmatch(r"(y|nu|u|p)(\d+)", name)
    if m:
        return variable(m.group(1), int(m.group(2)))
    if name == "t":
        return variable("aux", 0)
    m = re.fullmatch(r"s(\d+)", name)
    if m:
        return variable("aux", int(m.group(1)))
    raise ValueError("unknown variable name %r" % name)


def normalize_coeff(c):
    if type(c) is int:
        return c
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


def _mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    return _mono_mul_cached(m1, m2)


@lru_cache(maxsize=1 << 18)
def _mono_mul_cached(m1, m2):
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def mul_accumulate(t, p1, p2):
    """Add the terms of p1 * p2 into the raw term dict t (zeros are left for the caller)."""
    get = t.get
    for m1, c1 in p1.terms.items():
        for m2, c2 in p2.terms.items():
            m = _mono_mul(m1, m2)
            t[m] = get(m, 0) + c1 * c2


def poly_from_raw(t):
    return Poly({m: normalize_coeff(c) for m, c in t.items() if c})


class Poly:
    """Immutable sparse polynomial: dict monomial -> nonzero rational."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        self.terms = terms
        self._hash = None

    # construction
    @staticmethod
    def const(c):
        c = normalize_coeff(c)
        return Poly({(): c}) if c != 0 else Poly()

    @staticmethod
    def var(kind, index, tier=0):
        v = variable(kind, index, tier)
        return Poly({((v.id, 1),): 1})

    @staticmethod
    def from_var(v):
        return Poly({((v.id, 1),): 1})

    @staticmethod
    def monomial(mono, coeff=1):
        return Poly({tuple(sorted(mono)): normalize_coeff(coeff)}) if coeff != 0 else Poly()

    # basic protocol
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = _coerce(other)
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        return self.to_str()

    # arithmetic
    def __add__(self, other):
        other = _coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        t = dict(self.terms)
        for m, c in other.terms.items():
            s = t.get(m, 0) + c
            if s == 0:
                t.pop(m, None)
            else:
                t[m] = normalize_coeff(s)
        return Poly(t)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)):
                if other == 0:
                    return Poly()
                if other == 1:
                    return self
                return Poly({m: normalize_coeff(c * other) for m, c in self.terms.items()})
            other = _coerce(other)
        if not self.terms or not other.terms:
            return Poly()
        if len(other.terms) == 1 and () in other.terms:
            return self * other.terms[()]
        if len(self.terms) == 1 and () in self.terms:
            return other * self.terms[()]
        t = {}
        get = t.get
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                t[m] = get(m, 0) + c1 * c2
        # cancellations are dropped once at the end
        return Poly({m: normalize_coeff(c) for m, c in t.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = Fraction(c)
        return Poly({m: normalize_coeff(Fraction(v) / c) for m, v in self.terms.items()})

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power")
        r = Poly.const(1)
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    # queries
    def variables(self):
        s = set()
        for m in self.terms:
            for v, _ in m:
                s.add(v)
        return s

    def constant_term(self):
        return self.terms.get((), 0)

    def is_constant(self):
        return all(m == () for m in self.terms)

    def total_degree(self):
        return max((sum(e for _, e in m) for m in self.terms), default=-1)

    def mono_degree(self, m):
        a = q = t = 0
        for v, e in m:
            d = _VARS[v].deg
            a += d[0] * e
            q += d[1] * e
            t += d[2] * e
        return (a, q, t)

    def degrees(self):
        return {self.mono_degree(m) for m in self.terms}

    def degree(self):
        """Tri-degree of a homogeneous polynomial (None for zero)."""
        ds = self.degrees()
        if not ds:
            return None
        if len(ds) > 1:
            raise ValueError("polynomial is not homogeneous: %s" % self)
        return ds.pop()

    def is_homogeneous(self):
        return len(self.degrees()) <= 1

    # calculus and substitution
    def diff(self, v):
        vid = v.id if isinstance(v, Variable) else v
        t = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(vid, 0)
            if e == 0:
                continue
            if e == 1:
                del d[vid]
            else:
                d[vid] = e - 1
            mm = tuple(sorted(d.items()))
            t[mm] = normalize_coeff(t.get(mm, 0) + c * e)
        return Poly({m: c for m, c in t.items() if c != 0})

    def subs(self, mapping):
        """Substitute variables (Variable or id -> Poly or number)."""
        mp = {}
        for k, val in mapping.items():
            vid = k.id if isinstance(k, Variable) else k
            mp[vid] = _coerce(val)
        acc = {}
        powcache = {}
        for m, c in self.terms.items():
            keep = []
            factor = Poly.const(c)
            for v, e in m:
                if v in mp:
                    key = (v, e)
                    if key not in powcache:
                        powcache[key] = mp[v] ** e
                    factor = factor * powcache[key]
                else:
                    keep.append((v, e))
            if keep:
                factor = factor * Poly({tuple(keep): 1})
            for mm, cc in factor.terms.items():
                s = acc.get(mm, 0) + cc
                acc[mm] = s
        return Poly({m: normalize_coeff(c) for m, c in acc.items() if c != 0})

    def rename(self, mapping):
        """Fast variable renaming (id -> id), no arithmetic expansion."""
        t = {}
        for m, c in self.terms.items():
            d = {}
            for v, e in m:
                w = mapping.get(v, v)
                d[w] = d.get(w, 0) + e
            key = tuple(sorted(d.items()))
            t[key] = t.get(key, 0) + c
        return Poly({m: normalize_coeff(c) for m, c in t.items() if c != 0})

    def integrate(self, v, lower, upper):
        """Definite integral in the variable v between polynomial bounds."""
        vid = v.id if isinstance(v, Variable) else v
        anti = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(vid, 0) + 1
            d[vid] = e
            mm = tuple(sorted(d.items()))
            anti[mm] = anti.get(mm, 0) + Fraction(c, e)
        F = Poly({m: normalize_coeff(c) for m, c in anti.items() if c != 0})
        return F.subs({vid: upper}) - F.subs({vid: lower})

    def coefficient_in(self, vid, e):
        """Coefficient of v^e (as a polynomial in the remaining variables)."""
        t = {}
        for m, c in self.terms.items():
            d = dict(m)
            if d.get(vid, 0) != e:
                continue
            d.pop(vid, None)
            t[tuple(sorted(d.items()))] = c
        return Poly(t)

    # serialization
    def sorted_terms(self):
        def key(item):
            m, _ = item
            tot = sum(e for _, e in m)
            ordered = sorted(((_VARS[v].key(), e) for v, e in m))
            return (-tot, [(k, -e) for k, e in ordered])

        return sorted(self.terms.items(), key=key)

    def to_str(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            factors = []
            for v, e in sorted(m, key=lambda ve: _VARS[ve[0]].key()):
                name = _VARS[v].name
                factors.append(name if e == 1 else "%s^%d" % (name, e))
            c = Fraction(c)
            mag = abs(c)
            cs = str(mag.numerator) if mag.denominator == 1 else "%d/%d" % (mag.numerator, mag.denominator)
            if factors:
                body = "*".join(factors) if mag == 1 else cs + "*" + "*".join(factors)
            else:
                body = cs
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)


def _coerce(x):
    if isinstance(x, Poly):
        return x
    if isinstance(x, Variable):
        return Poly.from_var(x)
    if isinstance(x, (int, Fraction)):
        return Poly.const(x)
    raise TypeError("cannot coerce %r to Poly" % (x,))




def parse_poly(s):
    """Inverse of Poly.to_str."""
    s = s.strip()
    if s == "0":
        return Poly()
    out = Poly()
    # split into signed terms
    terms = re.findall(r"([+-]?)\s*([^+-]+)", s.replace(" - ", " -").replace(" + ", " +"))
    for sign, body in terms:
        body = body.strip()
        if not body:
            continue
        coeff = Fraction(1)
        factors = body.split("*")
        rest = []
        for f in factors:
            if re.fullmatch(r"\d+(/\d+)?", f):
                coeff *= Fraction(f)
            else:
                rest.append(f)
        term = Poly.const(-coeff if sign == "-" else coeff)
        for f in rest:
            m = re.fullmatch(r"(.+?)\^(\d+)", f)
            if m and not f.startswith("x^("):
                name, e = m.group(1), int(m.group(2))
            elif f.startswith("x^(") and f.count("^") == 2:
                name, e = f.rsplit("^", 1)
                e = int(e)
            else:
                name, e = f, 1
            term = term * Poly.from_var(lookup_name(name)) ** e
        out = out + term
    return out


def xvar(i, tier=0):
    return Poly.var("x", i, tier)


def xvars(n, tier=0):
    return [xvar(i, tier) for i in range(1, n + 1)]


def complete_homogeneous(k, vars):
    """h_k of the given variables (Poly objects); h_0 = 1, h_k = 0 for k < 0."""
    if k < 0:
        return Poly()
    if not vars:
        raise ValueError("complete_homogeneous needs at least one variable")
    return _h_cached(k, tuple(vars))


@lru_cache(maxsize=None)
def _h_cached(k, vars):
    out = Poly()
    for combo in combinations_with_replacement(range(len(vars)), k):
        term = Poly.const(1)
        for i in combo:
            term = term * vars[i]
        out = out + term
    return out


def power_sum(k, vars):
    return sum((v ** k for v in vars), Poly())


@lru_cache(maxsize=None)
def _p_in_basis(k, n):
    """p_k written as a polynomial in the symbols P_1..P_n (kind 'p')."""
    P = [None] + [Poly.var("p", j) for j in range(1, n + 1)]
    # e_j in terms of P via Newton
    e = [Poly.const(1)]
    for j in range(1, n + 1):
        acc = Poly()
        for i in range(1, j + 1):
            acc = acc + e[j - i] * P[i] * ((-1) ** (i - 1))
        e.append(acc / j)
    ps = [None] + P[1:]
    for m in range(n + 1, k + 1):
        acc = Poly()
        for i in range(1, n + 1):
            acc = acc + e[i] * ps[m - i] * ((-1) ** (i - 1))
        ps.append(acc)
    return ps[k]


def power_sum_jacobian(k, l, n):
    """d p_k / d p_l in the ring of symmetric functions in n variables, as a polynomial in x."""
    if not 1 <= l <= n:
        raise ValueError("basis index l=%d out of range for n=%d" % (l, n))
    if k < 1:
        raise ValueError("k must be positive")
    expr = _p_in_basis(k, n).diff(variable("p", l))
    xs = xvars(n)
    return expr.subs({variable("p", j): power_sum(j, xs) for j in range(1, n + 1)})


def is_symmetric(Q, n, tier=0):
    xs = [variable("x", i, tier).id for i in range(1, n + 1)]
    for i in range(n - 1):
        sw = {xs[i]: xs[i + 1], xs[i + 1]: xs[i]}
        if Q.rename(sw) != Q:
            return False
    return True


def path_point(n, t, lo=1, hi=0):
    """Substitution x_i -> t*x^(hi)_i + (1-t)*x^(lo)_i; defaults to t*x + (1-t)*x'."""
    return {variable("x", i, 0).id: t * xvar(i, hi) + (1 - t) * xvar(i, lo) for i in range(1, n + 1)}


def factorization_coeffs(Q, n):
    """a_i with sum a_i (x_i - x'_i) = Q(x) - Q(x'), by integration along the straight path."""
    if not is_symmetric(Q, n):
        raise ValueError("factorization_coeffs expects a symmetric polynomial")
    t = Poly.var("aux", 0)
    tv = variable("aux", 0)
    sub = path_point(n, t)
    out = []
    for i in range(1, n + 1):
        g = Q.diff(variable("x", i)).subs(sub)
        out.append(g.integrate(tv, 0, 1))
    return out


def elementary(k, vars):
    if k == 0:
        return Poly.const(1)
    out = Poly()
    from itertools import combinations

    for combo in combinations(vars, k):
        term = Poly.const(1)
        for v in combo:
            term = term * v
        out = out + term
    return out
