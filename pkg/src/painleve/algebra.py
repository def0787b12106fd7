"""Exact multivariate polynomials and rational functions over Q.

Variables are interned :class:`Var` symbols carrying a fixed kind.  Polynomials
are sparse ``{monomial: coefficient}`` maps where a monomial is a tuple of
``(Var, exponent)`` pairs sorted by the global variable order
``t < y < x < other dependents < parameters (alphabetical)``.  Coefficients are
``int`` or ``fractions.Fraction``.

Rational functions are always stored in canonical form: numerator and
denominator coprime, denominator with leading coefficient 1 under the
graded-lexicographic term order.  Two equal rational functions therefore have
identical representations.
"""

from __future__ import annotations

import enum
import random
from fractions import Fraction
from math import gcd as igcd
from numbers import Rational
from typing import Iterable, Mapping

from .errors import DivisionByZero, SubstitutionPole, UnknownDerivative


class Kind(enum.Enum):
    TIME = "time"
    DEPENDENT = "dependent"
    PARAMETER = "parameter"
    TRANSCENDENTAL = "transcendental"


class Var:
    """An interned variable symbol.

    ``Var("tau", "transcendental")`` declares; ``Var("tau")`` looks up.  A name
    may only ever be declared with one kind.
    """

    __slots__ = ("name", "kind", "key", "rkey")
    _registry: dict = {}

    def __new__(cls, name: str, kind=None):
        v = cls._registry.get(name)
        if v is not None:
            if kind is not None and Kind(kind) is not v.kind:
                raise ValueError(f"{name!r} already declared as {v.kind.value}")
            return v
        if kind is None:
            raise KeyError(f"undeclared variable {name!r}")
        kind = Kind(kind)
        if kind is Kind.TIME:
            rank = 0
        elif kind is Kind.DEPENDENT:
            rank = {"y": 1, "x": 2}.get(name, 3)
        else:
            rank = 4
        self = object.__new__(cls)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "key", (rank, name))
        # reversed key: larger means earlier in the variable order
        object.__setattr__(self, "rkey", (-rank, tuple(-ord(c) for c in name) + (1,)))
        cls._registry[name] = self
        return self

    def __setattr__(self, name, value):
        raise AttributeError("Var is immutable")

    def __reduce__(self):
        return (Var, (self.name, self.kind.value))

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return f"Var({self.name!r}, {self.kind.value!r})"

    def __str__(self):
        return self.name

    @property
    def is_constant_symbol(self) -> bool:
        return self.kind in (Kind.PARAMETER, Kind.TRANSCENDENTAL)


def _pair_key(p):
    return p[0].key


def _mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items(), key=_pair_key))


def _mono_div(a, b):
    """a / b as a monomial, or None when b does not divide a."""
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        r = d.get(v, 0) - e
        if r < 0:
            return None
        if r:
            d[v] = r
        else:
            del d[v]
    return tuple(sorted(d.items(), key=_pair_key))


def _mono_gcd(a, b):
    db = dict(b)
    out = []
    for v, e in a:
        f = db.get(v)
        if f:
            out.append((v, min(e, f)))
    return tuple(out)


def _order_key(m):
    return (sum(e for _, e in m), tuple((v.rkey, e) for v, e in m))


def _qdiv(a, b):
    if isinstance(a, int) and isinstance(b, int) and a % b == 0:
        return a // b
    return Fraction(a) / b


def _tidy(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class Polynomial:
    """Sparse multivariate polynomial with rational coefficients."""

    __slots__ = ("_terms", "_hash", "_lead")

    def __init__(self, terms: Mapping | None = None):
        self._terms = {m: _tidy(c) for m, c in (terms or {}).items() if c != 0}
        self._hash = None
        self._lead = None

    @classmethod
    def _wrap(cls, terms: dict) -> "Polynomial":
        p = object.__new__(cls)
        p._terms = terms
        p._hash = None
        p._lead = None
        return p

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls._wrap({(): _tidy(c)} if c != 0 else {})

    @classmethod
    def var(cls, v: Var, power: int = 1) -> "Polynomial":
        return cls._wrap({((v, power),): 1} if power else {(): 1})

    # -- inspection ----------------------------------------------------

    @property
    def terms(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and () in self._terms)

    def constant_value(self):
        return self._terms.get((), 0)

    @property
    def variables(self) -> frozenset:
        return frozenset(v for m in self._terms for v, _ in m)

    def degree(self, v: Var) -> int:
        return max((e for m in self._terms for w, e in m if w is v), default=0)

    def total_degree(self) -> int:
        return max((sum(e for _, e in m) for m in self._terms), default=0)

    def leading_term(self):
        if self._lead is None:
            if not self._terms:
                raise ValueError("zero polynomial has no leading term")
            m = max(self._terms, key=_order_key)
            self._lead = (m, self._terms[m])
        return self._lead

    def leading_coefficient(self):
        return self.leading_term()[1]

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._wrap({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        if not self._terms or not other._terms:
            return ZERO_POLY
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (mb, cb), = b.items()
            if not mb:
                return Polynomial._wrap(a).scale(cb)
            return Polynomial._wrap({_mono_mul(ma, mb): ca * cb for ma, ca in a.items()})
        out: dict = {}
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = _mono_mul(ma, mb)
                out[m] = out.get(m, 0) + ca * cb
        return Polynomial._wrap({m: _tidy(c) for m, c in out.items() if c})

    __rmul__ = __mul__

    def scale(self, c) -> "Polynomial":
        if c == 0:
            return ZERO_POLY
        if c == 1:
            return self
        return Polynomial._wrap({m: _tidy(k * c) for m, k in self._terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result, base = ONE_POLY, self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def mul_monomial(self, m, c=1) -> "Polynomial":
        return Polynomial._wrap({_mono_mul(k, m): _tidy(v * c) for k, v in self._terms.items()})

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({(): other} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- structure -----------------------------------------------------

    def coeffs_in(self, v: Var) -> dict:
        """Coefficients of self viewed as a univariate polynomial in v."""
        out: dict = {}
        for m, c in self._terms.items():
            e = 0
            rest = m
            for i, (w, k) in enumerate(m):
                if w is v:
                    e = k
                    rest = m[:i] + m[i + 1:]
                    break
            out.setdefault(e, {})[rest] = c
        return {e: Polynomial._wrap(t) for e, t in out.items()}

    def lc_in(self, v: Var) -> "Polynomial":
        cs = self.coeffs_in(v)
        return cs[max(cs)]

    def diff(self, v: Var) -> "Polynomial":
        out: dict = {}
        for m, c in self._terms.items():
            for i, (w, k) in enumerate(m):
                if w is v:
                    rest = m[:i] + (((v, k - 1),) if k > 1 else ()) + m[i + 1:]
                    out[rest] = c * k
                    break
        return Polynomial._wrap(out)

    def evaluate(self, values: Mapping):
        """Numeric value with every variable bound in ``values`` (keys Var or name)."""
        total = 0
        for m, c in self._terms.items():
            term = c
            for v, e in m:
                x = values[v] if v in values else values[v.name]
                term = term * x ** e
            total = total + term
        return total

    def primitive(self):
        """Split as ``content * prim`` with prim integral, primitive, positive leading coefficient."""
        if not self._terms:
            return Fraction(0), self
        den = 1
        for c in self._terms.values():
            if isinstance(c, Fraction):
                den = den * c.denominator // igcd(den, c.denominator)
        ints = {m: int(c * den) for m, c in self._terms.items()}
        g = 0
        for c in ints.values():
            g = igcd(g, c)
            if g == 1:
                break
        lead = ints[self.leading_term()[0]]
        if lead < 0:
            g = -g
        prim = Polynomial._wrap({m: c // g for m, c in ints.items()})
        return Fraction(g, den), prim

    def monomial_content(self):
        it = iter(self._terms)
        d = dict(next(it))
        for m in it:
            if not d:
                break
            md = dict(m)
            for v in list(d):
                e = md.get(v, 0)
                if e == 0:
                    del d[v]
                elif e < d[v]:
                    d[v] = e
        return tuple(sorted(d.items(), key=_pair_key))

    def div_monomial(self, m) -> "Polynomial":
        return Polynomial._wrap({_mono_div(k, m): c for k, c in self._terms.items()})

    # -- printing --------------------------------------------------------

    def __repr__(self):
        return f"Polynomial({str(self)!r})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms, key=_order_key, reverse=True):
            c = self._terms[m]
            neg = c < 0
            a = -c if neg else c
            mono = "*".join(v.name if e == 1 else f"{v.name}^{e}" for v, e in m)
            if not mono:
                body = _fmt_rational(a)
            elif a == 1:
                body = mono
            else:
                body = f"{_fmt_rational(a)}*{mono}"
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)


def _fmt_rational(c) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _as_poly(x):
    if isinstance(x, Polynomial):
        return x
    if isinstance(x, (int, Fraction)):
        return Polynomial.constant(x)
    if isinstance(x, Var):
        return Polynomial.var(x)
    return NotImplemented


ZERO_POLY = Polynomial._wrap({})
ONE_POLY = Polynomial._wrap({(): 1})


# ---------------------------------------------------------------------------
# division and gcd

def div_exact(a: Polynomial, b: Polynomial) -> Polynomial | None:
    """Quotient a/b if b divides a exactly, else None."""
    if b.is_zero():
        raise DivisionByZero("polynomial division by zero")
    if a.is_zero():
        return ZERO_POLY
    if len(b) == 1:
        (mb, cb), = b.terms
        out = {}
        for m, c in a.terms:
            q = _mono_div(m, mb)
            if q is None:
                return None
            out[q] = _tidy(_qdiv(c, cb))
        return Polynomial._wrap(out)
    for v in b.variables:
        if b.degree(v) > a.degree(v):
            return None
    mb, cb = b.leading_term()
    bterms = list(b.terms)
    rem = dict(a._terms)
    quot: dict = {}
    while rem:
        mr = max(rem, key=_order_key)
        cr = rem[mr]
        mq = _mono_div(mr, mb)
        if mq is None:
            return None
        cq = _qdiv(cr, cb)
        quot[mq] = _tidy(cq)
        for m, c in bterms:
            k = _mono_mul(m, mq)
            s = rem.get(k, 0) - c * cq
            if s:
                rem[k] = s
            else:
                rem.pop(k, None)
    return Polynomial._wrap(quot)


_rng = random.Random(0x5eed)


def _univariate_at(p: Polynomial, v: Var, point: dict) -> dict:
    out: dict = {}
    for m, c in p.terms:
        e = 0
        val = Fraction(c)
        for w, k in m:
            if w is v:
                e = k
            else:
                val *= point[w] ** k
        out[e] = out.get(e, 0) + val
    return {e: c for e, c in out.items() if c}


def _uni_gcd_degree(a: dict, b: dict) -> int:
    def rem(f, g):
        f = dict(f)
        dg = max(g)
        lg = g[dg]
        while f and max(f) >= dg:
            df = max(f)
            q = f[df] / lg
            for e, c in g.items():
                k = e + df - dg
                s = f.get(k, 0) - q * c
                if s:
                    f[k] = s
                else:
                    f.pop(k, None)
        return f

    while b:
        a, b = b, rem(a, b)
    return max(a)


def _specialized_gcd_degree(a: Polynomial, b: Polynomial, v: Var):
    """Degree in v of gcd(a, b) after random specialisation of the other variables.

    The value is an upper bound for the true degree, and equals 0 only if the
    true gcd is free of v (leading coefficients are kept nonvanishing).
    """
    others = sorted((a.variables | b.variables) - {v}, key=lambda w: w.key)
    la, lb = a.lc_in(v), b.lc_in(v)
    for _ in range(6):
        point = {w: _rng.randint(2, 10 ** 6) for w in others}
        if la.evaluate(point) == 0 or lb.evaluate(point) == 0:
            continue
        return _uni_gcd_degree(_univariate_at(a, v, point), _univariate_at(b, v, point))
    return None


def _content_in(p: Polynomial, v: Var) -> Polynomial:
    g = ZERO_POLY
    for c in sorted(p.coeffs_in(v).values(), key=len):
        g = poly_gcd(g, c)
        if g.is_constant():
            return ONE_POLY
    return g


def _content_wrt(p: Polynomial, vs: frozenset) -> Polynomial:
    groups: dict = {}
    for m, c in p.terms:
        key = tuple(pair for pair in m if pair[0] in vs)
        rest = tuple(pair for pair in m if pair[0] not in vs)
        groups.setdefault(key, {})[rest] = c
    g = ZERO_POLY
    for t in sorted(groups.values(), key=len):
        g = poly_gcd(g, Polynomial._wrap(t))
        if g.is_constant():
            return ONE_POLY
    return g


def _prem(a: Polynomial, b: Polynomial, v: Var) -> Polynomial:
    da, db = a.degree(v), b.degree(v)
    lcb = b.lc_in(v)
    r = a
    e = da - db + 1
    while not r.is_zero():
        dr = r.degree(v)
        if dr < db:
            break
        t = r.lc_in(v).mul_monomial(((v, dr - db),) if dr > db else ())
        r = r * lcb - t * b
        e -= 1
    return r * lcb ** e if e > 0 else r


def _prs_gcd(a: Polynomial, b: Polynomial, v: Var) -> Polynomial:
    """gcd of two polynomials primitive in v, by the subresultant PRS."""
    if a.degree(v) < b.degree(v):
        a, b = b, a
    g = h = ONE_POLY
    while True:
        delta = a.degree(v) - b.degree(v)
        r = _prem(a, b, v)
        if r.is_zero():
            break
        if r.degree(v) == 0:
            return ONE_POLY
        a = b
        b = div_exact(r, g * h ** delta)
        g = a.lc_in(v)
        if delta == 1:
            h = g
        elif delta > 1:
            h = div_exact(g ** delta, h ** (delta - 1))
    return div_exact(b, _content_in(b, v)).primitive()[1]


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Greatest common divisor, normalised integral primitive with positive leading coefficient."""
    if a.is_zero():
        return b.primitive()[1] if not b.is_zero() else ZERO_POLY
    if b.is_zero():
        return a.primitive()[1]
    if a.is_constant() or b.is_constant():
        return ONE_POLY
    ma, mb = a.monomial_content(), b.monomial_content()
    m = _mono_gcd(ma, mb)
    if ma:
        a = a.div_monomial(ma)
    if mb:
        b = b.div_monomial(mb)
    g = _gcd_core(a.primitive()[1], b.primitive()[1])
    return g.mul_monomial(m) if m else g


def _gcd_core(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.is_constant() or b.is_constant():
        return ONE_POLY
    if a == b:
        return a
    va, vb = a.variables, b.variables
    if va != vb:
        common = va & vb
        if not common:
            return ONE_POLY
        if va - common:
            a = _content_wrt(a, va - common)
        if vb - common:
            b = _content_wrt(b, vb - common)
        return poly_gcd(a, b)
    if len(b) <= len(a) and div_exact(a, b) is not None:
        return b
    if len(a) <= len(b) and div_exact(b, a) is not None:
        return a
    v = min(va, key=lambda w: (min(a.degree(w), b.degree(w)), max(a.degree(w), b.degree(w)), w.key))
    if _specialized_gcd_degree(a, b, v) == 0:
        return poly_gcd(_content_in(a, v), _content_in(b, v))
    ca, cb = _content_in(a, v), _content_in(b, v)
    c = poly_gcd(ca, cb)
    pa = div_exact(a, ca) if not ca.is_constant() else a
    pb = div_exact(b, cb) if not cb.is_constant() else b
    return (c * _prs_gcd(pa, pb, v)).primitive()[1]


# ---------------------------------------------------------------------------
# rational functions

class RationalFunction:
    """Element of Q(variables) in canonical reduced form."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=0, den=1):
        n, d = _canonical(_coerce_poly(num), _coerce_poly(den))
        self.num, self.den, self._hash = n, d, None

    @classmethod
    def _raw(cls, num: Polynomial, den: Polynomial) -> "RationalFunction":
        r = object.__new__(cls)
        r.num, r.den, r._hash = num, den, None
        return r

    @classmethod
    def symbol(cls, name: str, kind=None) -> "RationalFunction":
        return cls._raw(Polynomial.var(Var(name, kind)), ONE_POLY)

    # -- inspection ------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return Fraction(self.num.constant_value())

    @property
    def variables(self) -> frozenset:
        return self.num.variables | self.den.variables

    def degree(self, v: Var) -> int:
        return max(self.num.degree(v), self.den.degree(v))

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return other
        a, b = self, other
        if a.num.is_zero():
            return b
        if b.num.is_zero():
            return a
        if a.den == ONE_POLY and b.den == ONE_POLY:
            return RationalFunction._raw(a.num + b.num, ONE_POLY)
        if a.den == b.den:
            return _from_unreduced(a.num + b.num, a.den)
        g = poly_gcd(a.den, b.den)
        if g == ONE_POLY:
            num = a.num * b.den + b.num * a.den
            return _monic_den(num, a.den * b.den)
        ad = div_exact(a.den, g)
        bd = div_exact(b.den, g)
        num = a.num * bd + b.num * ad
        den = a.den * bd
        g2 = poly_gcd(num, g)
        if g2 != ONE_POLY:
            num = div_exact(num, g2)
            den = div_exact(den, g2)
        return _monic_den(num, den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._raw(-self.num, self.den)

    def __sub__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return other
        a, b = self, other
        if a.num.is_zero() or b.num.is_zero():
            return ZERO
        if a.den == ONE_POLY and b.den == ONE_POLY:
            return RationalFunction._raw(a.num * b.num, ONE_POLY)
        an, ad, bn, bd = a.num, a.den, b.num, b.den
        g1 = poly_gcd(an, bd)
        if g1 != ONE_POLY:
            an, bd = div_exact(an, g1), div_exact(bd, g1)
        g2 = poly_gcd(bn, ad)
        if g2 != ONE_POLY:
            bn, ad = div_exact(bn, g2), div_exact(ad, g2)
        return _monic_den(an * bn, ad * bd)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.num.is_zero():
            raise DivisionByZero("inverse of zero")
        return _monic_den(self.den, self.num)

    def __truediv__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _as_rf(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction._raw(self.num ** n, self.den ** n)

    def __eq__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return other
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # -- calculus and substitution ----------------------------------------

    def partial(self, v: Var) -> "RationalFunction":
        n, d = self.num, self.den
        if v not in n.variables and v not in d.variables:
            return ZERO
        if d == ONE_POLY:
            return RationalFunction._raw(n.diff(v), ONE_POLY)
        return RationalFunction(n.diff(v) * d - n * d.diff(v), d * d)

    def subs(self, bindings: Mapping) -> "RationalFunction":
        return substitute(self, bindings)

    def evaluate(self, values: Mapping):
        d = self.den.evaluate(values)
        if d == 0:
            raise DivisionByZero(f"denominator of {self} vanishes")
        return self.num.evaluate(values) / d

    # -- printing ----------------------------------------------------------

    def __repr__(self):
        return f"RationalFunction({str(self)!r})"

    def __str__(self):
        if self.den == ONE_POLY:
            return str(self.num)
        ns = str(self.num)
        if len(self.num) > 1 or not _is_plain_product(self.num):
            ns = f"({ns})"
        ds = str(self.den)
        if not _is_single_factor(self.den):
            ds = f"({ds})"
        return f"{ns}/{ds}"


def _is_plain_product(p: Polynomial) -> bool:
    (m, c), = p.terms
    return Fraction(c).denominator == 1


def _is_single_factor(p: Polynomial) -> bool:
    if len(p) != 1:
        return False
    (m, c), = p.terms
    if not m:
        return Fraction(c).denominator == 1 and c > 0
    return c == 1 and len(m) == 1


def _coerce_poly(x) -> Polynomial:
    if isinstance(x, Polynomial):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a polynomial")
    if isinstance(x, int):
        return Polynomial.constant(x)
    if isinstance(x, Rational):
        return Polynomial.constant(Fraction(x))
    if isinstance(x, Var):
        return Polynomial.var(x)
    raise TypeError(f"cannot interpret {x!r} as a polynomial")


def _as_rf(x):
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, (int, Fraction, Polynomial, Var)) and not isinstance(x, bool):
        return RationalFunction._raw(_coerce_poly(x), ONE_POLY)
    return NotImplemented


def as_rf(x) -> RationalFunction:
    """Coerce ints, Fractions, Vars and Polynomials into rational functions."""
    r = _as_rf(x)
    if r is NotImplemented:
        raise TypeError(f"cannot interpret {x!r} as a rational function")
    return r


def _monic_den(num: Polynomial, den: Polynomial) -> RationalFunction:
    if den.is_zero():
        raise DivisionByZero("zero denominator")
    lc = den.leading_coefficient()
    if lc != 1:
        inv = 1 / Fraction(lc)
        num, den = num.scale(inv), den.scale(inv)
    return RationalFunction._raw(num, den)


def _from_unreduced(num: Polynomial, den: Polynomial) -> RationalFunction:
    if num.is_zero():
        return ZERO
    g = poly_gcd(num, den)
    if g != ONE_POLY:
        num, den = div_exact(num, g), div_exact(den, g)
    return _monic_den(num, den)


def _canonical(num: Polynomial, den: Polynomial):
    if den.is_zero():
        raise DivisionByZero("zero denominator")
    if num.is_zero():
        return ZERO_POLY, ONE_POLY
    if den.is_constant():
        return num.scale(1 / Fraction(den.constant_value())), ONE_POLY
    r = _from_unreduced(num, den)
    return r.num, r.den


ZERO = RationalFunction._raw(ZERO_POLY, ONE_POLY)
ONE = RationalFunction._raw(ONE_POLY, ONE_POLY)


def normalize(num, den) -> RationalFunction:
    """Canonical reduced form of num/den; raises DivisionByZero when den == 0."""
    return RationalFunction(num, den)


def arith(a, b, op: str) -> RationalFunction:
    a, b = as_rf(a), as_rf(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def symbol(name: str, kind=None) -> RationalFunction:
    return RationalFunction.symbol(name, kind)


def _lcm(a: Polynomial, b: Polynomial) -> Polynomial:
    if a == b or b == ONE_POLY:
        return a
    if a == ONE_POLY:
        return b
    return div_exact(a * b, poly_gcd(a, b))


def substitute(e, bindings: Mapping) -> RationalFunction:
    """Simultaneously replace variables by rational functions.

    Raises SubstitutionPole when the substituted denominator vanishes identically.
    """
    e = as_rf(e)
    binds = {}
    for k, val in bindings.items():
        v = k if isinstance(k, Var) else Var(k)
        binds[v] = as_rf(val)
    used = [v for v in sorted(e.variables, key=lambda w: w.key) if v in binds]
    if not used:
        return e
    top = {v: max(e.num.degree(v), e.den.degree(v)) for v in used}
    pow_cache: dict = {}

    def power(p: Polynomial, k: int) -> Polynomial:
        key = (id(p), k)
        if key not in pow_cache:
            pow_cache[key] = (p, p ** k)
        return pow_cache[key][1]

    def apply(poly: Polynomial) -> Polynomial:
        total = ZERO_POLY
        for m, c in poly.terms:
            kept = tuple(pair for pair in m if pair[0] not in binds)
            acc = Polynomial._wrap({kept: c})
            exps = dict(m)
            for v in used:
                img = binds[v]
                k = exps.get(v, 0)
                if k:
                    acc = acc * power(img.num, k)
                if top[v] - k and img.den != ONE_POLY:
                    acc = acc * power(img.den, top[v] - k)
            total = total + acc
        return total

    num, den = apply(e.num), apply(e.den)
    if den.is_zero():
        raise SubstitutionPole(f"denominator of {e} vanishes identically after substitution")
    return RationalFunction(num, den)


class Derivation:
    """A derivation on Q(variables) with d(t) = 1 and constant symbols killed.

    Images of dependent variables must be supplied explicitly; applying the
    derivation to an expression containing an unassigned dependent variable
    raises UnknownDerivative.
    """

    def __init__(self, images: Mapping | None = None):
        self._images = {}
        for k, val in (images or {}).items():
            v = k if isinstance(k, Var) else Var(k)
            if v.kind is not Kind.DEPENDENT:
                raise ValueError(f"image of {v.kind.value} variable {v} is fixed")
            self._images[v] = as_rf(val)

    def image(self, v: Var) -> RationalFunction:
        if v.kind is Kind.TIME:
            return ONE
        if v.kind in (Kind.PARAMETER, Kind.TRANSCENDENTAL):
            return ZERO
        try:
            return self._images[v]
        except KeyError:
            raise UnknownDerivative(v) from None

    @property
    def images(self) -> dict:
        return dict(self._images)

    def extended(self, images: Mapping) -> "Derivation":
        merged = dict(self._images)
        merged.update({(k if isinstance(k, Var) else Var(k)): as_rf(v) for k, v in images.items()})
        return Derivation(merged)

    def __call__(self, e) -> RationalFunction:
        return differentiate(e, self)


def differentiate(e, d: Derivation) -> RationalFunction:
    e = as_rf(e)
    variables = sorted(e.variables, key=lambda w: w.key)
    imgs = {v: d.image(v) for v in variables}
    imgs = {v: img for v, img in imgs.items() if not img.is_zero()}
    if not imgs:
        return ZERO
    common = ONE_POLY
    for img in imgs.values():
        common = _lcm(common, img.den)
    scaled = {v: img.num * div_exact(common, img.den) for v, img in imgs.items()}

    def push(p: Polynomial) -> Polynomial:
        total = ZERO_POLY
        for v, s in scaled.items():
            if v in p.variables:
                total = total + p.diff(v) * s
        return total

    n, dn = e.num, e.den
    if dn == ONE_POLY:
        return RationalFunction(push(n), common)
    return RationalFunction(push(n) * dn - n * push(dn), common * dn * dn)


def is_integer_constant(e) -> int | None:
    """The integer n when e is the constant n, otherwise None."""
    e = as_rf(e)
    if not e.is_constant():
        return None
    c = e.constant_value()
    return c.numerator if c.denominator == 1 else None


def _isqrt_exact(n: int) -> int | None:
    if n < 0:
        return None
    from math import isqrt
    r = isqrt(n)
    return r if r * r == n else None


def rational_sqrt(c) -> Fraction | None:
    """Nonnegative rational square root of c, if it exists."""
    c = Fraction(c)
    a, b = _isqrt_exact(c.numerator), _isqrt_exact(c.denominator)
    if a is None or b is None:
        return None
    return Fraction(a, b)


def poly_sqrt(p: Polynomial) -> Polynomial | None:
    """Square root of p over Q with positive leading coefficient, if p is a square."""
    if p.is_zero():
        return ZERO_POLY
    m, c = p.leading_term()
    rc = rational_sqrt(c)
    if rc is None or any(e % 2 for _, e in m):
        return None
    lead_m = tuple((v, e // 2) for v, e in m)
    root = Polynomial._wrap({lead_m: _tidy(rc)})
    two_lead = 2 * rc
    rem = p - root * root
    for _ in range(len(p) + 1):
        if rem.is_zero():
            return root
        mr, cr = rem.leading_term()
        q = _mono_div(mr, lead_m)
        if q is None:
            return None
        t = Polynomial._wrap({q: _tidy(Fraction(cr) / two_lead)})
        if _order_key(q) >= _order_key(lead_m):
            return None
        root = root + t
        rem = p - root * root
    return root if rem.is_zero() else None


def sqrt_in_field(e) -> RationalFunction | None:
    """A square root of e inside Q(variables), or None when e is not a square there."""
    e = as_rf(e)
    if e.is_zero():
        return ZERO
    d = poly_sqrt(e.den)
    if d is None:
        return None
    n = poly_sqrt(e.num)
    if n is None:
        return None
    return RationalFunction(n, d)


def variables_of(exprs: Iterable) -> frozenset:
    out: frozenset = frozenset()
    for x in exprs:
        out |= as_rf(x).variables
    return out
