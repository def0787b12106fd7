import random
from fractions import Fraction

import pytest

from painleve.algebra import Kind, Var, as_rf
from painleve.backlund import (
    TRANSLATION_WORDS,
    act_params,
    act_solution,
    apply_word,
    format_word,
    in_hyperplane_set,
    orbit_search,
    parse_word,
    translation_coset_equal,
    verify_solution_preservation,
)
from painleve.errors import IdenticallySingular, ParseError
from painleve.systems import ParamTuple, t, x, y

F = Fraction
P = ParamTuple.symbolic()
a0, a1, a2, a3, a4 = P.a5


def test_param_rows():
    assert act_params(1, P).a5 == (a0, -a1, a2 + a1, a3, a4)
    assert act_params(2, P).a5 == (a0 + a2, a1 + a2, -a2, a3 + a2, a4 + a2)
    assert act_params(0, act_params(0, P)) == P


@pytest.mark.parametrize("i", range(5))
def test_involutions(i):
    assert act_params(i, act_params(i, P)) == P
    q = act_params(i, P)
    back = act_solution(i, q, *act_solution(i, P, y, x))
    assert back == (y, x)


def test_solution_rows():
    assert act_solution(1, P, y, x) == (y, x)
    assert act_solution(4, P, y, x) == (y, x - a4 / y)
    with pytest.raises(IdenticallySingular):
        act_solution(2, P, y, 0)


@pytest.mark.parametrize("i", range(5))
def test_preservation(i):
    rep = verify_solution_preservation(i)
    assert rep.ok, rep.residual


def test_words():
    assert len(parse_word(TRANSLATION_WORDS[0])) == 10
    assert parse_word("s0 s2 (s1 s3 s4 s2)^2") == parse_word("t0")
    assert format_word(parse_word("s1 (s2)^3")) == "s1 s2 s2 s2"
    with pytest.raises(ParseError):
        parse_word("s5")
    with pytest.raises(ParseError):
        parse_word("(s1 s2")


def test_translation_words():
    assert apply_word("t0", P)[0].a4 == (a0 - 2, a1, a3, a4)
    assert apply_word("t4", P)[0].a4 == (a0, a1, a3, a4 - 2)
    assert apply_word("t0 t1", P)[0].a4 == (a0 - 2, a1 - 2, a3, a4)


def test_word_failure_reports_step():
    with pytest.raises(IdenticallySingular) as info:
        apply_word("s1 s2", P, (y, as_rf(0)))
    assert info.value.step == 1


def test_hyperplane_examples():
    w = in_hyperplane_set((1, F(1, 2), F(1, 3), F(1, 5)))
    assert (w.kind, w.index, w.n) == ("coordinate", 0, 1)
    assert in_hyperplane_set((F(1, 2), F(4, 5), F(1, 3), F(2, 5))) is None
    w = in_hyperplane_set((F(1, 4),) * 4)
    assert (w.kind, w.signs, w.n) == ("signed-sum", (1, 1, 1), 0)
    taus = [as_rf(Var(f"tau{i}", Kind.TRANSCENDENTAL)) for i in range(4)]
    assert in_hyperplane_set(taus) is None


def test_coset_examples():
    p = (F(1, 2), F(-1, 5), F(1, 3), F(2, 5))
    assert translation_coset_equal(p, p)
    assert translation_coset_equal(p, (F(-3, 2), F(-1, 5), F(1, 3), F(22, 5)))
    assert not translation_coset_equal(p, (F(1, 2), F(-1, 5), F(1, 3), F(1, 5)))


def test_orbit_avoidance():
    rng = random.Random(11)
    checked = 0
    while checked < 100:
        p = tuple(F(rng.randint(-40, 40), rng.choice([3, 5, 7, 11])) for _ in range(4))
        if in_hyperplane_set(p) is not None:
            continue
        q = ParamTuple.from_a4(*p)
        for i in range(5):
            assert in_hyperplane_set(act_params(i, q)) is None
        checked += 1


def test_orbit_search():
    p = ParamTuple.from_a4(F(1, 2), F(1, 3), F(1, 5), F(1, 7))
    q = act_params(3, act_params(2, p))
    word = orbit_search(p, q, depth=4)
    assert word is not None and apply_word(word, p)[0] == q
    assert orbit_search(p, ParamTuple.from_a4(F(1, 2), F(1, 3), F(1, 5), F(2, 7)), depth=3) is None
