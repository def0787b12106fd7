import random
from fractions import Fraction

import pytest

from painleve.algebra import Var, as_rf
from painleve.errors import DivisionByZero, ParseError, TickError, UndeclaredIdentifier
from painleve.parser import BinOp, Int, Name, Neg, Pow, declare, format, lower, lower_solution, parse
from painleve.systems import Family, build_equation

CTX = declare({"t": "time", "y": "dependent", "y'": "dependent", "x": "dependent",
               "alpha": "parameter", "beta": "parameter", "gamma": "parameter", "delta": "parameter"})


def test_parse_pii_rhs():
    e = parse("2*y^3 + t*y + alpha")
    assert e == BinOp("+", BinOp("+", BinOp("*", Int(2), Pow(Name("y"), 3)),
                                 BinOp("*", Name("t"), Name("y"))), Name("alpha"))


def test_parse_nested():
    e = parse("(y-1)^2/t^2 * (alpha*y + beta/y)")
    assert isinstance(e, BinOp) and e.op == "*"
    assert e.left == BinOp("/", Pow(BinOp("-", Name("y"), Int(1)), 2), Pow(Name("t"), 2))


def test_syntax_error_offset():
    with pytest.raises(ParseError) as info:
        parse("y^^2")
    assert info.value.offset == 2
    with pytest.raises(ParseError):
        parse("y + $")
    with pytest.raises(ParseError):
        parse("y^t")
    with pytest.raises(ParseError):
        parse("(y + 1")


def test_format_examples():
    assert format(BinOp("*", Name("t"), Name("y"))) == "t*y"
    assert format(Neg(BinOp("+", Name("y"), Int(1)))) == "-(y + 1)"
    piv = parse("y'^2/(2*y) + 3/2*y^3 + 4*t*y^2 + 2*(t^2 - alpha)*y + beta/y")
    assert parse(format(piv)) == piv


def test_unary_minus_binds_to_base():
    # base := '-' base, so the minus sits under the power
    assert parse("-y^2") == Pow(Neg(Name("y")), 2)
    assert lower(parse("-y^2"), CTX) == as_rf(Var("y")) ** 2


def test_lower_examples():
    ctx = declare({"t": "time"})
    assert lower(parse("-1/t"), ctx) == -1 / as_rf(Var("t"))
    assert lower(parse("t/2"), ctx) == as_rf(Var("t")) / 2
    with pytest.raises(UndeclaredIdentifier):
        lower(parse("z+1"), ctx)
    with pytest.raises(TickError):
        lower(parse("t'"), CTX)
    with pytest.raises(TickError):
        lower_solution(parse("y''"), CTX)
    with pytest.raises(DivisionByZero):
        lower(parse("1/(t-t)"), ctx)


def test_tick_resolves_via_derivation():
    from painleve.algebra import Derivation
    ctx = declare({"t": "time", "y": "dependent"})
    d = Derivation({Var("y"): as_rf(Var("t"))})
    assert lower(parse("y''"), ctx, d) == as_rf(1)


def _random_ast(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        return rng.choice([Int(rng.randint(0, 9)), Name("t"), Name("y"), Name("alpha")])
    kind = rng.random()
    if kind < 0.12:
        return Neg(_random_ast(rng, depth - 1))
    if kind < 0.25:
        return Pow(_random_ast(rng, depth - 1), rng.randint(0, 3))
    return BinOp(rng.choice("+-*/"), _random_ast(rng, depth - 1), _random_ast(rng, depth - 1))


def test_round_trip_random_asts():
    rng = random.Random(7)
    done = 0
    while done < 1000:
        a = _random_ast(rng, 4)
        try:
            want = lower(a, CTX)
        except DivisionByZero:
            continue
        assert lower(parse(format(a)), CTX) == want
        done += 1


def test_precedence_property():
    rng = random.Random(3)
    for _ in range(50):
        env = {n: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for n in "abc"}
        ctx = declare({n: "parameter" for n in "abc"})
        vals = {Var(n): v for n, v in env.items()}
        assert lower(parse("a+b*c"), ctx).evaluate(vals) == lower(parse("a+(b*c)"), ctx).evaluate(vals)
        assert lower(parse("a-b-c"), ctx).evaluate(vals) == env["a"] - env["b"] - env["c"]


DISPLAYS = {
    Family.P_I: "6*y^2 + t",
    Family.P_II: "2*y^3 + t*y + alpha",
    Family.P_III: "1/y*y'^2 - 1/t*y' + 1/t*(alpha*y^2 + beta) + gamma*y^3 + delta/y",
    Family.P_IV: "1/(2*y)*y'^2 + 3/2*y^3 + 4*t*y^2 + 2*(t^2 - alpha)*y + beta/y",
    Family.P_V: "(1/(2*y) + 1/(y - 1))*y'^2 - 1/t*y' + (y - 1)^2/t^2*(alpha*y + beta/y) + gamma*y/t"
                " + delta*y*(y + 1)/(y - 1)",
}


@pytest.mark.parametrize("family", list(DISPLAYS))
def test_displays_lower_to_builtins(family):
    assert lower(parse(DISPLAYS[family]), CTX) == build_equation(family).rhs
