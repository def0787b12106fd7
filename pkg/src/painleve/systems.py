"""The six Painlevé equations and the Hamiltonian systems S_II, S_III', S_VI.

Second-order equations carry their right-hand side as a rational function in
``t, y, y'`` and the parameters, with ``y'`` an ordinary dependent variable.
Hamiltonian systems carry the vector field ``(F1, F2) = (dy/dt, dx/dt)``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .algebra import (
    ONE,
    Derivation,
    Kind,
    RationalFunction,
    Var,
    as_rf,
    sqrt_in_field,
    substitute,
)
from .errors import ArityMismatch, ConstraintViolation, NotASquare, NotLiftable, NotReducible

T = Var("t", Kind.TIME)
Y = Var("y", Kind.DEPENDENT)
X = Var("x", Kind.DEPENDENT)
YP = Var("y'", Kind.DEPENDENT)

t, y, x, yp = (as_rf(v) for v in (T, Y, X, YP))


class Family(enum.Enum):
    P_I = "P_I"
    P_II = "P_II"
    P_III = "P_III"
    P_IV = "P_IV"
    P_V = "P_V"
    P_VI = "P_VI"
    S_II = "S_II"
    S_IIIp = "S_IIIp"
    S_VI = "S_VI"

    @classmethod
    def lookup(cls, name: "str | Family") -> "Family":
        if isinstance(name, Family):
            return name
        key = name.strip().lower().replace("-", "").replace("_", "").replace("'", "p")
        try:
            return _ALIASES[key]
        except KeyError:
            raise ArityMismatch(f"unknown family {name!r}") from None


_ALIASES = {
    "pi": Family.P_I, "pii": Family.P_II, "piii": Family.P_III, "piv": Family.P_IV,
    "pv": Family.P_V, "pvi": Family.P_VI, "sii": Family.S_II, "siiip": Family.S_IIIp,
    "siiiprime": Family.S_IIIp, "piiiprime": Family.S_IIIp, "piiip": Family.S_IIIp,
    "svi": Family.S_VI,
}

PARAM_NAMES = {
    Family.P_I: (),
    Family.P_II: ("alpha",),
    Family.S_II: ("alpha",),
    Family.S_IIIp: ("v1", "v2"),
    Family.P_III: ("alpha", "beta", "gamma", "delta"),
    Family.P_IV: ("alpha", "beta"),
    Family.P_V: ("alpha", "beta", "gamma", "delta"),
    Family.P_VI: ("alpha", "beta", "gamma", "delta"),
    Family.S_VI: ("a0", "a1", "a2", "a3", "a4"),
}

# second-order families are integrated as (y, y'); Hamiltonian ones as (y, x)
HAMILTONIAN = frozenset({Family.S_II, Family.S_IIIp, Family.S_VI})

FIXED_SINGULARITIES = {
    Family.P_I: (), Family.P_II: (), Family.S_II: (), Family.P_IV: (),
    Family.P_III: (0,), Family.P_V: (0,), Family.S_IIIp: (0,),
    Family.P_VI: (0, 1), Family.S_VI: (0, 1),
}


def param_symbol(name: str) -> RationalFunction:
    return as_rf(Var(name, Kind.PARAMETER))


def symbolic_params(family) -> dict:
    family = Family.lookup(family)
    if family is Family.S_VI:
        return ParamTuple.symbolic().as_dict()
    return {n: param_symbol(n) for n in PARAM_NAMES[family]}


# ---------------------------------------------------------------------------
# parameter tuples for S_VI

@dataclass(frozen=True)
class ParamTuple:
    """(a0, a1, a2, a3, a4) with a0 + a1 + 2 a2 + a3 + a4 = 1."""

    a5: tuple

    def __post_init__(self):
        vals = tuple(as_rf(v) for v in self.a5)
        if len(vals) != 5:
            raise ArityMismatch(f"expected 5 parameters, got {len(vals)}")
        object.__setattr__(self, "a5", vals)
        a0, a1, a2, a3, a4 = vals
        if a0 + a1 + 2 * a2 + a3 + a4 != ONE:
            raise ConstraintViolation("a0 + a1 + 2*a2 + a3 + a4 must equal 1")

    @classmethod
    def from_a4(cls, a0, a1, a3, a4) -> "ParamTuple":
        a0, a1, a3, a4 = (as_rf(v) for v in (a0, a1, a3, a4))
        return cls((a0, a1, (ONE - a0 - a1 - a3 - a4) / 2, a3, a4))

    @classmethod
    def from_watanabe(cls, w1, w2, w3, w4) -> "ParamTuple":
        w1, w2, w3, w4 = (as_rf(v) for v in (w1, w2, w3, w4))
        return cls.from_a4(ONE - w1 - w2, w1 - w2, w3 - w4, w3 + w4)

    @classmethod
    def symbolic(cls) -> "ParamTuple":
        return cls.from_a4(*(param_symbol(f"a{i}") for i in (0, 1, 3, 4)))

    @property
    def a4(self) -> tuple:
        a0, a1, _, a3, a4 = self.a5
        return (a0, a1, a3, a4)

    @property
    def pvi(self) -> tuple:
        a0, a1, _, a3, a4 = self.a5
        half = Fraction(1, 2)
        return (half * a1 ** 2, -half * a4 ** 2, half * a3 ** 2, half * (ONE - a0 ** 2))

    @property
    def watanabe(self) -> tuple:
        a0, a1, _, a3, a4 = self.a5
        return ((ONE - a0 + a1) / 2, (ONE - a0 - a1) / 2, (a4 + a3) / 2, (a4 - a3) / 2)

    def as_dict(self) -> dict:
        return {f"a{i}": v for i, v in enumerate(self.a5)}

    def __str__(self):
        return "(" + ", ".join(str(v) for v in self.a5) + ")"


def convert_params(p: ParamTuple, view: str) -> tuple:
    if view == "a5":
        return p.a5
    if view == "a4":
        return p.a4
    if view == "pvi":
        return p.pvi
    if view == "watanabe":
        return p.watanabe
    raise ValueError(f"unknown view {view!r}")


def invert_pvi(alpha, beta, gamma, delta) -> list:
    """Every ParamTuple whose P_VI view is (alpha, beta, gamma, delta), sign choices included."""
    alpha, beta, gamma, delta = (as_rf(v) for v in (alpha, beta, gamma, delta))
    roots = []
    for label, square in (("a0", ONE - 2 * delta), ("a1", 2 * alpha), ("a3", 2 * gamma), ("a4", -2 * beta)):
        r = sqrt_in_field(square)
        if r is None:
            raise NotASquare(f"{label}^2 = {square} has no root in the coefficient field")
        roots.append((r, -r) if not r.is_zero() else (r,))
    out, seen = [], set()
    for a0, a1, a3, a4 in itertools.product(*roots):
        p = ParamTuple.from_a4(a0, a1, a3, a4)
        if p.a5 not in seen:
            seen.add(p.a5)
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# equations

@dataclass(frozen=True)
class SecondOrderODE:
    family: Family
    params: dict = field(compare=False)
    rhs: RationalFunction

    def derivation(self) -> Derivation:
        return Derivation({Y: yp, YP: self.rhs})


@dataclass(frozen=True)
class HamiltonianSystem:
    family: Family
    params: dict = field(compare=False)
    f1: RationalFunction
    f2: RationalFunction
    hamiltonian: RationalFunction | None = None

    def derivation(self) -> Derivation:
        return Derivation({Y: self.f1, X: self.f2})


def _resolve_params(family: Family, params) -> dict:
    if params is None:
        return symbolic_params(family)
    if family is Family.S_VI:
        if isinstance(params, ParamTuple):
            return params.as_dict()
        if isinstance(params, (tuple, list)):
            if len(params) == 4:
                return ParamTuple.from_a4(*params).as_dict()
            return ParamTuple(tuple(params)).as_dict()
        keys = set(params)
        if keys == {"a0", "a1", "a3", "a4"}:
            return ParamTuple.from_a4(*(params[k] for k in ("a0", "a1", "a3", "a4"))).as_dict()
        if keys == set(PARAM_NAMES[family]):
            return ParamTuple(tuple(params[f"a{i}"] for i in range(5))).as_dict()
        raise ArityMismatch(f"S_VI takes a0..a4 (or a0, a1, a3, a4); got {sorted(keys)}")
    names = PARAM_NAMES[family]
    if isinstance(params, (tuple, list)):
        if len(params) != len(names):
            raise ArityMismatch(f"{family.value} takes {len(names)} parameters, got {len(params)}")
        params = dict(zip(names, params))
    if set(params) != set(names):
        raise ArityMismatch(f"{family.value} takes parameters {list(names)}, got {sorted(params)}")
    return {n: as_rf(params[n]) for n in names}


def svi_hamiltonian(p: ParamTuple) -> RationalFunction:
    a0, a1, a2, a3, a4 = p.a5
    inner = (y * (y - 1) * (y - t) * x ** 2
             - x * (a4 * (y - 1) * (y - t) + a3 * y * (y - t) + (a0 - 1) * y * (y - 1))
             + a2 * (a2 + a1) * (y - t))
    return inner / (t * (t - 1))


def build_equation(family, params=None):
    """The displayed equation of ``family`` at ``params`` (symbolic when omitted)."""
    family = Family.lookup(family)
    ps = _resolve_params(family, params)
    half = Fraction(1, 2)
    if family is Family.P_I:
        return SecondOrderODE(family, ps, 6 * y ** 2 + t)
    if family is Family.P_II:
        return SecondOrderODE(family, ps, 2 * y ** 3 + t * y + ps["alpha"])
    if family is Family.P_III:
        a, b, c, d = (ps[k] for k in ("alpha", "beta", "gamma", "delta"))
        rhs = yp ** 2 / y - yp / t + (a * y ** 2 + b) / t + c * y ** 3 + d / y
        return SecondOrderODE(family, ps, rhs)
    if family is Family.P_IV:
        a, b = ps["alpha"], ps["beta"]
        rhs = yp ** 2 / (2 * y) + half * 3 * y ** 3 + 4 * t * y ** 2 + 2 * (t ** 2 - a) * y + b / y
        return SecondOrderODE(family, ps, rhs)
    if family is Family.P_V:
        a, b, c, d = (ps[k] for k in ("alpha", "beta", "gamma", "delta"))
        rhs = ((1 / (2 * y) + 1 / (y - 1)) * yp ** 2 - yp / t
               + (y - 1) ** 2 / t ** 2 * (a * y + b / y) + c * y / t + d * y * (y + 1) / (y - 1))
        return SecondOrderODE(family, ps, rhs)
    if family is Family.P_VI:
        return SecondOrderODE(family, ps, pvi_rhs(*(ps[k] for k in ("alpha", "beta", "gamma", "delta"))))
    if family is Family.S_II:
        a = ps["alpha"]
        return HamiltonianSystem(family, ps, x - y ** 2 - t / 2, 2 * x * y + a + half)
    if family is Family.S_IIIp:
        v1, v2 = ps["v1"], ps["v2"]
        f1 = (2 * y ** 2 * x - y ** 2 + v1 * y + t) / t
        f2 = (-2 * y * x ** 2 + 2 * x * y - v1 * x + half * (v1 + v2)) / t
        return HamiltonianSystem(family, ps, f1, f2)
    p = ParamTuple(tuple(ps[f"a{i}"] for i in range(5)))
    h = svi_hamiltonian(p)
    return HamiltonianSystem(family, ps, h.partial(X), -h.partial(Y), h)


def pvi_rhs(a, b, c, d, *, shift: int = -1) -> RationalFunction:
    """P_VI right-hand side; ``shift`` is the constant in the ``1/(y + shift)`` term."""
    half = Fraction(1, 2)
    return (half * (1 / y + 1 / (y + shift) + 1 / (y - t)) * yp ** 2
            - (1 / t + 1 / (t - 1) + 1 / (y - t)) * yp
            + y * (y - 1) * (y - t) / (t ** 2 * (t - 1) ** 2)
            * (a + b * t / y ** 2 + c * (t - 1) / (y - 1) ** 2 + d * t * (t - 1) / (y - t) ** 2))


# ---------------------------------------------------------------------------
# residuals and conversions

_STANDARD = Derivation()


def residual_second_order(eq: SecondOrderODE, y_expr) -> RationalFunction:
    y_expr = as_rf(y_expr)
    dy = _STANDARD(y_expr)
    d2y = _STANDARD(dy)
    return d2y - substitute(eq.rhs, {Y: y_expr, YP: dy})


def residual_system(sys: HamiltonianSystem, y_expr, x_expr) -> tuple:
    y_expr, x_expr = as_rf(y_expr), as_rf(x_expr)
    point = {Y: y_expr, X: x_expr}
    return (_STANDARD(y_expr) - substitute(sys.f1, point),
            _STANDARD(x_expr) - substitute(sys.f2, point))


def _affine_in_x(f1: RationalFunction):
    coeff = f1.partial(X)
    rest = f1 - coeff * x
    if X in coeff.variables or X in rest.variables:
        return None
    return coeff, rest


def lift_to_hamiltonian(sys: HamiltonianSystem, y_expr) -> RationalFunction:
    """The unique x with dy/dt = F1(y, x) along the given y(t)."""
    split = _affine_in_x(sys.f1)
    if split is None:
        raise NotLiftable("F1 is not affine in x")
    y_expr = as_rf(y_expr)
    coeff = substitute(split[0], {Y: y_expr})
    if coeff.is_zero():
        raise NotLiftable(f"coefficient of x vanishes identically along y = {y_expr}")
    return (_STANDARD(y_expr) - substitute(split[1], {Y: y_expr})) / coeff


_REDUCED_FAMILY = {Family.S_II: Family.P_II, Family.S_VI: Family.P_VI}


def reduce_to_second_order(sys: HamiltonianSystem) -> SecondOrderODE:
    """Eliminate x: solve F1 = y' for x and substitute into d(F1)/dt."""
    split = _affine_in_x(sys.f1)
    if split is None or split[0].is_zero():
        raise NotReducible("x cannot be solved rationally from dy/dt = F1")
    coeff, rest = split
    x_of = (yp - rest) / coeff
    ypp = sys.derivation()(sys.f1)
    rhs = substitute(ypp, {X: x_of})
    return SecondOrderODE(_REDUCED_FAMILY.get(sys.family, sys.family), dict(sys.params), rhs)


def pvi_display_comparison(p: ParamTuple | None = None) -> dict:
    """Compare the reduced S_VI equation with the two candidate P_VI displays.

    Returns the difference against the printed form (``1/(y+1)``) and against
    the ``1/(y-1)`` form, both with the P_VI view of ``p`` as parameters.
    """
    p = p or ParamTuple.symbolic()
    reduced = reduce_to_second_order(build_equation(Family.S_VI, p)).rhs
    a, b, c, d = p.pvi
    printed = pvi_rhs(a, b, c, d, shift=1)
    corrected = pvi_rhs(a, b, c, d, shift=-1)
    diff_printed = reduced - printed
    diff_corrected = reduced - corrected
    return {
        "matches_printed_display": diff_printed.is_zero(),
        "matches_y_minus_1_form": diff_corrected.is_zero(),
        "difference_printed": str(diff_printed),
        "difference_y_minus_1": str(diff_corrected),
    }


__all__ = [
    "T", "Y", "X", "YP", "Family", "ParamTuple", "SecondOrderODE", "HamiltonianSystem",
    "build_equation", "residual_second_order", "residual_system", "lift_to_hamiltonian",
    "reduce_to_second_order", "convert_params", "invert_pvi", "pvi_rhs", "svi_hamiltonian",
    "pvi_display_comparison", "symbolic_params", "param_symbol",
]
