"""Existence and count of algebraic solutions, and which structural results apply.

All decisions are exact: parameters are elements of Q(symbols) and every
"there is an integer n with ..." clause is solved in closed form (square roots
in the coefficient field plus an integrality test), never by scanning.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    Kind,
    RationalFunction,
    as_rf,
    is_integer_constant,
    sqrt_in_field,
)
from .backlund import HyperplaneWitness, in_hyperplane_set, translation_coset_equal
from .errors import DeltaZero, UnsupportedParameterField
from .systems import PARAM_NAMES, Family, ParamTuple, build_equation, residual_second_order, t

EXISTS = ("yes", "no", "out-of-precondition")
COUNTS = ("exactly-one", "exactly-two", "at-least-one-uniqueness-unknown", "zero", "unknown")


def _jsonable(v):
    if isinstance(v, RationalFunction):
        if v.is_constant():
            c = v.constant_value()
            return c.numerator if c.denominator == 1 else str(c)
        return str(v)
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else str(v)
    return v


@dataclass(frozen=True)
class ClassificationVerdict:
    family: str
    params: dict
    exists: str
    count: str
    condition: str | None = None
    witnesses: dict = field(default_factory=dict)
    notes: tuple = ()

    def __post_init__(self):
        if self.exists not in EXISTS or self.count not in COUNTS:
            raise ValueError(f"bad verdict {self.exists}/{self.count}")
        if self.exists == "no" and self.count != "zero":
            raise ValueError("exists=no requires count=zero")

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "params": {k: _jsonable(v) for k, v in self.params.items()},
            "exists": self.exists,
            "count": self.count,
            "condition": self.condition,
            "witnesses": {k: _jsonable(v) for k, v in self.witnesses.items()},
            "notes": list(self.notes),
        }


def _int_sqrt(e) -> int | None:
    """Nonnegative integer k with k^2 = e, if e is such a constant."""
    n = is_integer_constant(e)
    if n is None or n < 0:
        return None
    from math import isqrt
    k = isqrt(n)
    return k if k * k == n else None


def _integer_pm_roots(p: RationalFunction, q: RationalFunction) -> list:
    """All integers k of the form ±sqrt(p) ± sqrt(q).

    These are the integer roots of k^4 - 2(p+q)k^2 + (p-q)^2.  An integer k^2
    forces sqrt(pq) into the field, so no root exists when pq is not a square.
    """
    s = sqrt_in_field(p * q)
    if s is None:
        return []
    found = set()
    for cand in (p + q + 2 * s, p + q - 2 * s):
        r = _int_sqrt(cand)
        if r is not None:
            found.update((r, -r))
    return sorted(k for k in found if (k ** 4 - 2 * (p + q) * k ** 2 + (p - q) ** 2).is_zero())


def _check_constants(**params):
    for name, v in params.items():
        bad = [w.name for w in v.variables if w.kind in (Kind.TIME, Kind.DEPENDENT)]
        if bad:
            raise UnsupportedParameterField(f"parameter {name} depends on {sorted(bad)}")


# ---------------------------------------------------------------------------
# P_II

_PII_SOLUTIONS = {0: "0", 1: "-1/t", -1: "1/t"}


def classify_PII(alpha) -> ClassificationVerdict:
    alpha = as_rf(alpha)
    _check_constants(alpha=alpha)
    ps = {"alpha": alpha}
    if is_integer_constant(alpha - Fraction(1, 2)) is not None:
        return ClassificationVerdict("P_II", ps, "out-of-precondition", "unknown", "PII-half-integer",
                                     notes=("classification stated only for alpha not in 1/2 + Z",))
    n = is_integer_constant(alpha)
    if n is None:
        return ClassificationVerdict("P_II", ps, "no", "zero", "PII-non-integer")
    witnesses = {"n": n}
    notes = []
    if n in _PII_SOLUTIONS:
        sol = {"0": as_rf(0), "-1/t": -1 / t, "1/t": 1 / t}[_PII_SOLUTIONS[n]]
        if residual_second_order(build_equation(Family.P_II, {"alpha": n}), sol).is_zero():
            witnesses["solution"] = sol
            notes.append("attached solution verified by exact residual")
    return ClassificationVerdict("P_II", ps, "yes", "exactly-one", "PII-integer", witnesses, tuple(notes))


# ---------------------------------------------------------------------------
# S_III'

def classify_SIIIp(v1, v2) -> ClassificationVerdict:
    v1, v2 = as_rf(v1), as_rf(v2)
    _check_constants(v1=v1, v2=v2)
    ps = {"v1": v1, "v2": v2}
    n = is_integer_constant(-v2 + v1 - 1)
    m = is_integer_constant(-v2 - v1 + 1)
    witnesses = {"alpha": 4 * v2, "beta": -4 * (v1 - 1)}
    if n is not None:
        witnesses["n"] = n
    if m is not None:
        witnesses["m"] = m
    if n is not None and m is not None:
        return ClassificationVerdict("S_IIIp", ps, "yes", "exactly-two", "SIIIp-both", witnesses)
    if n is not None:
        return ClassificationVerdict("S_IIIp", ps, "yes", "exactly-one", "SIIIp-first", witnesses)
    if m is not None:
        return ClassificationVerdict("S_IIIp", ps, "yes", "exactly-one", "SIIIp-second", witnesses)
    return ClassificationVerdict("S_IIIp", ps, "no", "zero", "SIIIp-none", witnesses)


# ---------------------------------------------------------------------------
# P_IV

def classify_PIV(alpha, beta) -> ClassificationVerdict:
    alpha, beta = as_rf(alpha), as_rf(beta)
    _check_constants(alpha=alpha, beta=beta)
    ps = {"alpha": alpha, "beta": beta}
    n1 = is_integer_constant(alpha)
    if n1 is not None:
        # beta = -2 k^2 with k = 1 + 2 n2 - n1
        k = _int_sqrt(-beta / 2)
        if k is not None:
            for kk in (k, -k):
                if (kk - 1 + n1) % 2 == 0:
                    n2 = (kk - 1 + n1) // 2
                    return ClassificationVerdict("P_IV", ps, "yes", "exactly-one", "PIV-case-1",
                                                 {"n1": n1, "n2": n2})
        # beta = -(2/9) k^2 with k = 6 n2 - 3 n1 + 1
        k = _int_sqrt(-beta * Fraction(9, 2))
        if k is not None:
            for kk in (k, -k):
                if (kk + 3 * n1 - 1) % 6 == 0:
                    n2 = (kk + 3 * n1 - 1) // 6
                    return ClassificationVerdict("P_IV", ps, "yes", "exactly-one", "PIV-case-2",
                                                 {"n1": n1, "n2": n2})
    return ClassificationVerdict("P_IV", ps, "no", "zero", "PIV-none")


# ---------------------------------------------------------------------------
# P_V

def _pv_clause_mixed(big: RationalFunction, other: RationalFunction, w2: RationalFunction, nonzero):
    """Clauses 1 and 2: big = (m + w)^2, other = n^2, n > 0, m + n odd, w^2 = w2.

    ``big`` is 2*alpha (clause 1) or -2*beta (clause 2); ``nonzero`` is the
    parameter that must not vanish when |m| < n.
    """
    n = _int_sqrt(other)
    if not n:
        return None
    for m in _integer_pm_roots(big, w2):
        if (m + n) % 2 == 0:
            continue
        if abs(m) < n and nonzero.is_zero():
            continue
        if m != 0:
            w = (big - m * m - w2) / (2 * m)
            if w * w != w2:
                continue
        else:
            if big != w2:
                continue
            w = sqrt_in_field(w2)
        out = {"m": m, "n": n}
        if w is not None:
            out["lambda0_gamma"] = w
        return out
    return None


def classify_PV(alpha, beta, gamma, delta) -> ClassificationVerdict:
    alpha, beta, gamma, delta = (as_rf(v) for v in (alpha, beta, gamma, delta))
    _check_constants(alpha=alpha, beta=beta, gamma=gamma, delta=delta)
    ps = {"alpha": alpha, "beta": beta, "gamma": gamma, "delta": delta}
    if delta.is_zero():
        raise DeltaZero("P_V classification requires delta != 0")
    # (lambda0 * gamma)^2 with lambda0^2 = -1/(2 delta)
    w2 = -gamma * gamma / (2 * delta)
    lam2 = -1 / (2 * delta)
    a2, b2 = 2 * alpha, -2 * beta

    def branch(w):
        if w is None:
            return None
        if not gamma.is_zero():
            return w / gamma
        return sqrt_in_field(lam2)

    matches = []
    hit = _pv_clause_mixed(a2, b2, w2, alpha)
    if hit:
        matches.append(("PV-case-1", hit))
    hit = _pv_clause_mixed(b2, a2, w2, beta)
    if hit:
        matches.append(("PV-case-2", hit))
    k = _int_sqrt(w2)
    if k is not None:
        for n in _integer_pm_roots(a2, b2):
            if (k + n) % 2:
                continue
            if n != 0:
                a = (b2 - a2 - n * n) / (2 * n)
            else:
                a = sqrt_in_field(a2)
            hit = {"m": k, "n": n, "lambda0_gamma": as_rf(k)}
            if a is not None:
                hit["a"] = a
            matches.append(("PV-case-3", hit))
            break
    ka, kb = _int_sqrt(8 * alpha), _int_sqrt(-8 * beta)
    if ka is not None and kb is not None and ka % 2 and kb % 2 and k is None:
        matches.append(("PV-case-4", {"m": (ka - 1) // 2, "n": (kb - 1) // 2}))
    if not matches:
        return ClassificationVerdict("P_V", ps, "no", "zero", "PV-none")
    condition, wit = matches[0]
    lam = branch(wit.get("lambda0_gamma"))
    if lam is not None:
        wit = dict(wit, lambda0=lam)
    notes = [f"also matches {c}" for c, _ in matches[1:]]
    count = "exactly-one" if condition == "PV-case-4" else "at-least-one-uniqueness-unknown"
    return ClassificationVerdict("P_V", ps, "yes", count, condition, wit, tuple(notes))


# ---------------------------------------------------------------------------
# P_VI

@dataclass(frozen=True)
class MinimalityVerdict:
    strongly_minimal: bool
    witness: HyperplaneWitness | None = None

    @property
    def label(self) -> str:
        return "strongly-minimal" if self.strongly_minimal else "condition-fails"

    def to_json(self) -> dict:
        return {"verdict": self.label, "witness": self.witness.to_json() if self.witness else None}


def strongly_minimal_PVI(p) -> MinimalityVerdict:
    w = in_hyperplane_set(p)
    return MinimalityVerdict(w is None, w)


BOALCH_POINT = (Fraction(1, 2), Fraction(-1, 5), Fraction(1, 3), Fraction(2, 5))


@dataclass(frozen=True)
class BoalchVerdict:
    member: bool

    @property
    def count(self):
        return 12 if self.member else None

    @property
    def annotation(self):
        return "exactly 12 algebraic solutions" if self.member else None

    def to_json(self) -> dict:
        return {"member": self.member, "count": self.count, "annotation": self.annotation}


def boalch_coset(p) -> BoalchVerdict:
    return BoalchVerdict(translation_coset_equal(p, BOALCH_POINT))


# ---------------------------------------------------------------------------
# genericity

@dataclass(frozen=True)
class GenericityReport:
    family: str
    property: str  # strictly-disintegrated | omega-categorical | not-covered
    bounds: dict = field(default_factory=dict)
    hypothesis: dict = field(default_factory=dict)
    reason: str | None = None

    def to_json(self) -> dict:
        return {"family": self.family, "property": self.property, "bounds": self.bounds,
                "hypothesis": self.hypothesis, "reason": self.reason}


def _rank(rows: list) -> int:
    m = [list(r) for r in rows]
    rank, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(rank + 1, len(m)):
            f = m[r][col] / m[rank][col]
            m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
        col += 1
    return rank


def algebraically_independent(values) -> bool:
    """Jacobian criterion over the transcendental symbols.

    Full rank at one point certifies independence; three rank-deficient random
    points are taken as dependence.
    """
    values = [as_rf(v) for v in values]
    if not values:
        return True
    symbols = sorted(frozenset().union(*(v.variables for v in values)), key=lambda w: w.key)
    if any(s.kind is not Kind.TRANSCENDENTAL for s in symbols) or len(symbols) < len(values):
        return False
    jac = [[v.partial(s) for s in symbols] for v in values]
    rng = random.Random(1)
    for _ in range(3):
        point = {s: Fraction(rng.randint(2, 10 ** 6), rng.randint(1, 1000)) for s in symbols}
        try:
            rows = [[entry.evaluate(point) for entry in row] for row in jac]
        except ZeroDivisionError:
            continue
        if _rank(rows) == len(values):
            return True
    return False


_STRICT = {Family.P_II, Family.S_II, Family.P_III, Family.S_IIIp, Family.P_IV, Family.P_V}


def _classify_for(family: Family, ps: dict):
    if family in (Family.P_II, Family.S_II):
        return classify_PII(ps["alpha"])
    if family is Family.S_IIIp:
        return classify_SIIIp(ps["v1"], ps["v2"])
    if family is Family.P_IV:
        return classify_PIV(ps["alpha"], ps["beta"])
    if family is Family.P_V and not as_rf(ps["delta"]).is_zero():
        return classify_PV(ps["alpha"], ps["beta"], ps["gamma"], ps["delta"])
    return None


def genericity_report(family, params) -> GenericityReport:
    family = Family.lookup(family)
    if family is Family.P_I:
        return GenericityReport(family.value, "not-covered", reason="P_I has no parameters")
    if isinstance(params, ParamTuple):
        params = dict(zip(("a0", "a1", "a3", "a4"), params.a4))
    elif isinstance(params, (tuple, list)):
        names = PARAM_NAMES[family] if family is not Family.S_VI else ("a0", "a1", "a3", "a4")
        params = dict(zip(names, params))
    ps = {k: as_rf(v) for k, v in params.items()}
    independent = algebraically_independent(ps.values())
    hyp = {"parameters": sorted(ps), "algebraically_independent_transcendentals": independent}
    if family in _STRICT:
        if independent:
            return GenericityReport(family.value, "strictly-disintegrated", hypothesis=hyp)
        verdict = _classify_for(family, ps)
        if verdict is not None and verdict.exists == "yes":
            reason = f"algebraic solution exists ({verdict.condition})"
        else:
            reason = "parameters are not algebraically independent transcendentals"
        return GenericityReport(family.value, "not-covered", hypothesis=hyp, reason=reason)
    # P_VI / S_VI
    if independent:
        bounds = {"acl_per_solution": 12, "exceptional_per_k": 11,
                  "statement": "at most 11k exceptional solutions given k mutually generic ones"}
        return GenericityReport(family.value, "omega-categorical", bounds=bounds, hypothesis=hyp)
    return GenericityReport(family.value, "not-covered", hypothesis=hyp,
                            reason="parameters are not algebraically independent transcendentals")


__all__ = [
    "ClassificationVerdict", "classify_PII", "classify_SIIIp", "classify_PIV", "classify_PV",
    "MinimalityVerdict", "strongly_minimal_PVI", "BoalchVerdict", "boalch_coset", "BOALCH_POINT",
    "GenericityReport", "genericity_report", "algebraically_independent",
]
