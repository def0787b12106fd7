"""Bäcklund generators s0..s4 of S_VI, Weyl words, translations and the hyperplane set.

Words are written as in ``s0 s2 (s1 s3 s4 s2)^2`` and act right to left: the
rightmost generator is applied first.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .algebra import as_rf, is_integer_constant, substitute
from .errors import IdenticallySingular, ParseError
from .systems import X, Y, Family, ParamTuple, build_equation, t, x, y


def _param_row(i: int, a):
    """Image of the 5-tuple ``a`` under s_i; works for any field-like entries."""
    a0, a1, a2, a3, a4 = a
    if i == 0:
        return (-a0, a1, a2 + a0, a3, a4)
    if i == 1:
        return (a0, -a1, a2 + a1, a3, a4)
    if i == 2:
        return (a0 + a2, a1 + a2, -a2, a3 + a2, a4 + a2)
    if i == 3:
        return (a0, a1, a2 + a3, -a3, a4)
    if i == 4:
        return (a0, a1, a2 + a4, a3, -a4)
    raise ValueError(f"no generator s{i}")


# pole of the solution rewrite of each generator, as a function of (y, x)
_SINGULAR_FACTOR = {
    0: lambda yv, xv: yv - t,
    2: lambda yv, xv: xv,
    3: lambda yv, xv: yv - 1,
    4: lambda yv, xv: yv,
}


@dataclass(frozen=True)
class Generator:
    index: int

    def __post_init__(self):
        if self.index not in range(5):
            raise ValueError(f"no generator s{self.index}")

    def __str__(self):
        return f"s{self.index}"


GENERATORS = tuple(Generator(i) for i in range(5))


def _gen_index(g) -> int:
    return g.index if isinstance(g, Generator) else int(g)


def act_params(g, p: ParamTuple) -> ParamTuple:
    return ParamTuple(_param_row(_gen_index(g), p.a5))


def act_solution(g, p: ParamTuple, y_val, x_val, step: int | None = None) -> tuple:
    """Table row of s_i applied to a solution (y, x) of S_VI(p)."""
    i = _gen_index(g)
    y_val, x_val = as_rf(y_val), as_rf(x_val)
    if i == 1:
        return y_val, x_val
    pole = _SINGULAR_FACTOR[i](y_val, x_val)
    if pole.is_zero():
        raise IdenticallySingular(f"s{i} is undefined: its denominator vanishes identically", step)
    a0, a1, a2, a3, a4 = p.a5
    if i == 0:
        return y_val, x_val - a0 / pole
    if i == 2:
        return y_val + a2 / pole, x_val
    if i == 3:
        return y_val, x_val - a3 / pole
    return y_val, x_val - a4 / pole


@dataclass(frozen=True)
class PreservationReport:
    generator: int
    residual: tuple

    @property
    def ok(self) -> bool:
        return all(r.is_zero() for r in self.residual)


def verify_solution_preservation(g, p: ParamTuple | None = None) -> PreservationReport:
    """Check that s_i maps the S_VI(p) flow onto the S_VI(s_i p) flow, as an identity in (t, y, x, p).

    With y, x indeterminates whose derivatives are the S_VI(p) vector field,
    the derivative of the transformed pair is compared with the target vector
    field evaluated at the transformed pair.
    """
    i = _gen_index(g)
    p = p or ParamTuple.symbolic()
    source = build_equation(Family.S_VI, p)
    target = build_equation(Family.S_VI, act_params(i, p))
    new_y, new_x = act_solution(i, p, y, x)
    d = source.derivation()
    point = {Y: new_y, X: new_x}
    res = (d(new_y) - substitute(target.f1, point), d(new_x) - substitute(target.f2, point))
    return PreservationReport(i, res)


# ---------------------------------------------------------------------------
# words

_WORD_TOKEN = re.compile(r"\s*(?:(s[0-4])|(t[0134])|(\()|(\))|(\^\s*\d+))")

TRANSLATION_WORDS = {
    0: "s0 s2 (s1 s3 s4 s2)^2",
    1: "s1 s2 (s0 s3 s4 s2)^2",
    3: "s3 s2 (s0 s1 s4 s2)^2",
    4: "s4 s2 (s0 s1 s3 s2)^2",
}


def parse_word(text: str) -> tuple:
    """Expand a word such as ``"s0 s2 (s1 s3 s4 s2)^2"`` into generator indices.

    ``t0, t1, t3, t4`` expand to the translation words.
    """
    stack: list = [[]]
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _WORD_TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"bad word syntax {text[pos:].strip()[:10]!r}", pos)
        gen, trans, lpar, rpar, power = m.groups()
        if gen:
            stack[-1].append(int(gen[1]))
        elif trans:
            stack[-1].extend(parse_word(TRANSLATION_WORDS[int(trans[1])]))
        elif lpar:
            stack.append([])
        elif rpar:
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", m.start(4))
            group = stack.pop()
            stack[-1].append(tuple(group))
        else:
            n = int(power.lstrip("^ \t"))
            if not stack[-1]:
                raise ParseError("'^' with nothing to repeat", m.start(5))
            last = stack[-1].pop()
            stack[-1].extend([last] * n)
        pos = m.end()
    if len(stack) != 1:
        raise ParseError("unbalanced '('", len(text))

    def flatten(items):
        for it in items:
            if isinstance(it, tuple):
                yield from flatten(it)
            else:
                yield it

    return tuple(flatten(stack[0]))


def format_word(word: Sequence[int]) -> str:
    return " ".join(f"s{i}" for i in word) if word else "1"


def _as_word(w) -> tuple:
    if isinstance(w, str):
        return parse_word(w)
    return tuple(_gen_index(g) for g in w)


def apply_word(w, p: ParamTuple, solution: tuple | None = None):
    """Apply a word right to left; returns ``(params, solution or None)``."""
    word = _as_word(w)
    sol = solution
    for pos in range(len(word) - 1, -1, -1):
        i = word[pos]
        if sol is not None:
            sol = act_solution(i, p, sol[0], sol[1], step=pos)
        p = act_params(i, p)
    return p, sol


def word_on_tuple(w, a: tuple) -> tuple:
    """Parameter action of a word on a raw 5-tuple of numbers or rational functions."""
    for i in reversed(_as_word(w)):
        a = _param_row(i, a)
    return a


def translation_word(i: int) -> tuple:
    return parse_word(TRANSLATION_WORDS[i])


# ---------------------------------------------------------------------------
# hyperplanes and orbits

SIGN_PATTERNS = tuple((s1, s3, s4) for s1 in (1, -1) for s3 in (1, -1) for s4 in (1, -1))


@dataclass(frozen=True)
class HyperplaneWitness:
    kind: str  # "coordinate" or "signed-sum"
    n: int
    index: int | None = None
    signs: tuple | None = None

    def describe(self) -> str:
        if self.kind == "coordinate":
            return f"a{self.index} = {self.n}"
        s = "".join("+" if k > 0 else "-" for k in self.signs)
        return f"a0 {s[0]} a1 {s[1]} a3 {s[2]} a4 = {2 * self.n + 1} (n = {self.n})"

    def to_json(self) -> dict:
        if self.kind == "coordinate":
            return {"kind": "coordinate", "index": self.index, "n": self.n}
        return {"kind": "signed-sum", "signs": "+" + "".join("+" if k > 0 else "-" for k in self.signs),
                "n": self.n}


def _four(p) -> tuple:
    if isinstance(p, ParamTuple):
        return p.a4
    vals = tuple(as_rf(v) for v in p)
    if len(vals) == 5:
        return (vals[0], vals[1], vals[3], vals[4])
    if len(vals) != 4:
        raise ValueError("expected (a0, a1, a3, a4)")
    return vals


def in_hyperplane_set(p) -> HyperplaneWitness | None:
    """A witness that (a0, a1, a3, a4) lies on a reflecting hyperplane, or None."""
    a0, a1, a3, a4 = _four(p)
    for idx, val in zip((0, 1, 3, 4), (a0, a1, a3, a4)):
        n = is_integer_constant(val)
        if n is not None:
            return HyperplaneWitness("coordinate", n, index=idx)
    for signs in SIGN_PATTERNS:
        s1, s3, s4 = signs
        k = is_integer_constant(a0 + s1 * a1 + s3 * a3 + s4 * a4)
        if k is not None and k % 2 == 1:
            return HyperplaneWitness("signed-sum", (k - 1) // 2, signs=signs)
    return None


def translation_coset_equal(p, q) -> bool:
    """True iff p - q lies in (2Z)^4."""
    for a, b in zip(_four(p), _four(q)):
        k = is_integer_constant(a - b)
        if k is None or k % 2:
            return False
    return True


def orbit_search(p, q, depth: int = 8) -> tuple | None:
    """Shortest word (length <= depth) carrying p to q, by breadth-first search.

    Tuples are compared on all five coordinates.  Returns None if not found.
    """
    start = p.a5 if isinstance(p, ParamTuple) else ParamTuple.from_a4(*_four(p)).a5
    goal = q.a5 if isinstance(q, ParamTuple) else ParamTuple.from_a4(*_four(q)).a5
    if all(v.is_constant() for v in start + goal):
        start = tuple(v.constant_value() for v in start)
        goal = tuple(v.constant_value() for v in goal)
    seen = {start: ()}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        word = seen[cur]
        if cur == goal:
            return word
        if len(word) >= depth:
            continue
        for i in range(5):
            if word and word[0] == i:
                continue
            nxt = _param_row(i, cur)
            if nxt not in seen:
                seen[nxt] = (i,) + word
                queue.append(nxt)
    return None


__all__ = [
    "Generator", "GENERATORS", "act_params", "act_solution", "verify_solution_preservation",
    "PreservationReport", "parse_word", "format_word", "apply_word", "word_on_tuple",
    "translation_word", "TRANSLATION_WORDS", "HyperplaneWitness", "in_hyperplane_set",
    "translation_coset_equal", "orbit_search",
]
