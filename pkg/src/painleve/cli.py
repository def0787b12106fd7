"""``painleve`` command line: classify, minimal, transform, orbit, verify, integrate, probe, convert.

Exit codes: 0 on a definite answer (including "no"), 2 on usage errors,
3 on computational errors.  ``--json`` prints exactly one object.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

from .algebra import Kind, RationalFunction, Var, as_rf
from .errors import PainleveError, UsageError
from .parser import declare, lower_solution, parse

log = logging.getLogger("painleve")

FAMILIES = ("pi", "pii", "piii", "piii-prime", "piv", "pv", "pvi", "sii", "siii-prime", "svi")
_GENERIC = tuple(f"g{i}" for i in range(1, 10))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# literals

class _Literals:
    """Parses exact literals; records which generic symbols g1..g9 were used."""

    def __init__(self):
        self.used: set = set()
        self.ctx = {"t": Var("t", Kind.TIME)}
        self.ctx.update(declare({g: Kind.TRANSCENDENTAL for g in _GENERIC}))

    def exact(self, text: str, flag: str) -> RationalFunction:
        text = text.strip()
        try:
            return as_rf(Fraction(text))
        except (ValueError, ZeroDivisionError):
            pass
        try:
            value = lower_solution(parse(text), {k: v for k, v in self.ctx.items() if k != "t"})
        except UsageError as exc:
            raise UsageError(f"{flag}: {exc}") from None
        self.used.update(v.name for v in value.variables)
        return value

    def solution(self, text: str, flag: str, params: dict) -> RationalFunction:
        ctx = dict(self.ctx)
        ctx.update(declare({k: Kind.PARAMETER for k in params if k not in ctx}))
        try:
            value = lower_solution(parse(text), ctx)
        except UsageError as exc:
            raise UsageError(f"{flag}: {exc}") from None
        subs = {Var(k): v for k, v in params.items() if Var(k) in value.variables}
        if subs:
            from .algebra import substitute
            value = substitute(value, subs)
        self.used.update(v.name for v in value.variables if v.kind is Kind.TRANSCENDENTAL)
        return value

    def tuple4(self, text: str, flag: str) -> tuple:
        parts = text.split(",")
        if len(parts) != 4:
            raise UsageError(f"{flag} takes four comma-separated values, got {len(parts)}")
        return tuple(self.exact(p, flag) for p in parts)

    def tuple5(self, text: str, flag: str) -> tuple:
        parts = text.split(",")
        if len(parts) != 5:
            raise UsageError(f"{flag} takes five comma-separated values, got {len(parts)}")
        return tuple(self.exact(p, flag) for p in parts)


def _float(text: str, flag: str) -> float:
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{flag}: expected a decimal or p/q literal, got {text!r}") from None


def _fmt(v):
    if isinstance(v, RationalFunction):
        if v.is_constant():
            c = v.constant_value()
            return c.numerator if c.denominator == 1 else str(c)
        return str(v)
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else str(v)
    if isinstance(v, (list, tuple)):
        return [_fmt(w) for w in v]
    if isinstance(v, dict):
        return {k: _fmt(w) for k, w in v.items()}
    return v


_FLAG_OF = {"alpha": "--alpha", "beta": "--beta", "gamma": "--gamma", "delta": "--delta",
            "v1": "--v1", "v2": "--v2"}


def _family_params(args, lits: _Literals, family, numeric=False):
    from .systems import PARAM_NAMES, Family, ParamTuple
    if family is Family.S_VI or (family is Family.P_VI and (args.alphabar or args.a5)):
        p = _param_tuple(args, lits)
        if family is Family.P_VI:
            return dict(zip(("alpha", "beta", "gamma", "delta"), p.pvi))
        return p.as_dict()
    out = {}
    for name in PARAM_NAMES[family]:
        text = getattr(args, name, None)
        if text is None:
            raise UsageError(f"{family.value} requires {_FLAG_OF[name]}")
        out[name] = _float(text, _FLAG_OF[name]) if numeric else lits.exact(text, _FLAG_OF[name])
    return out


def _param_tuple(args, lits: _Literals):
    from .systems import ParamTuple
    if args.a5:
        return ParamTuple(lits.tuple5(args.a5, "--a5"))
    if args.alphabar:
        return ParamTuple.from_a4(*lits.tuple4(args.alphabar, "--alphabar"))
    raise UsageError("expected --alphabar a0,a1,a3,a4 or --a5 a0,a1,a2,a3,a4")


def _family(args):
    from .systems import Family
    if not args.family:
        raise UsageError("--family is required")
    return Family.lookup(args.family)


# ---------------------------------------------------------------------------
# subcommands

def cmd_classify(args, lits):
    from .classify import (boalch_coset, classify_PII, classify_PIV, classify_PV, classify_SIIIp,
                           genericity_report, strongly_minimal_PVI)
    from .systems import Family
    fam = _family(args)
    if args.genericity:
        if fam in (Family.P_VI, Family.S_VI) and (args.alphabar or args.a5):
            params = _param_tuple(args, lits)
        else:
            params = _family_params(args, lits, fam)
        rep = genericity_report(fam, params)
        return rep.to_json(), f"{rep.family}: {rep.property}" + (f" ({rep.reason})" if rep.reason else "")
    if fam in (Family.P_II, Family.S_II):
        v = classify_PII(lits.exact(_need(args.alpha, "--alpha"), "--alpha"))
    elif fam is Family.S_IIIp:
        v = classify_SIIIp(lits.exact(_need(args.v1, "--v1"), "--v1"), lits.exact(_need(args.v2, "--v2"), "--v2"))
    elif fam is Family.P_IV:
        ps = _family_params(args, lits, fam)
        v = classify_PIV(ps["alpha"], ps["beta"])
    elif fam is Family.P_V:
        ps = _family_params(args, lits, fam)
        v = classify_PV(ps["alpha"], ps["beta"], ps["gamma"], ps["delta"])
    elif fam in (Family.P_VI, Family.S_VI):
        p = _param_tuple(args, lits)
        m, b = strongly_minimal_PVI(p), boalch_coset(p)
        out = {"family": fam.value, "alphabar": _fmt(p.a4), "minimality": m.to_json(), "boalch": b.to_json()}
        text = m.label + (f"; {b.annotation}" if b.member else "")
        return out, text
    else:
        raise UsageError(f"no classification available for {fam.value}")
    out = v.to_json()
    text = f"{v.family}: exists={v.exists} count={v.count} condition={v.condition}"
    return out, text


def _need(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


def cmd_minimal(args, lits):
    from .classify import boalch_coset, strongly_minimal_PVI
    p = _param_tuple(args, lits)
    m = strongly_minimal_PVI(p)
    b = boalch_coset(p)
    out = {"alphabar": _fmt(p.a4), "a2": _fmt(p.a5[2]), **m.to_json(), "boalch": b.to_json()}
    text = m.label if m.strongly_minimal else f"condition-fails: {m.witness.describe()}"
    if b.member:
        text += f"; {b.annotation}"
    return out, text


def cmd_transform(args, lits):
    from .backlund import apply_word, format_word, parse_word
    p = _param_tuple(args, lits)
    word = parse_word(_need(args.word, "--word"))
    sol = None
    if args.solution is not None:
        names = p.as_dict()
        ys = lits.solution(args.solution, "--solution", names)
        if args.xsolution is not None:
            xs = lits.solution(args.xsolution, "--xsolution", names)
        else:
            from .systems import Family, build_equation, lift_to_hamiltonian
            xs = lift_to_hamiltonian(build_equation(Family.S_VI, p), ys)
        sol = (ys, xs)
    q, new = apply_word(word, p, sol)
    out = {"word": format_word(word), "length": len(word), "alphabar": _fmt(q.a4), "a5": _fmt(q.a5)}
    text = f"a5 = {', '.join(str(v) for v in q.a5)}"
    if new is not None:
        out["solution"] = {"y": str(new[0]), "x": str(new[1])}
        text += f"\ny = {new[0]}\nx = {new[1]}"
    return out, text


def cmd_orbit(args, lits):
    from .backlund import format_word, orbit_search, translation_coset_equal
    from .systems import ParamTuple
    p = _param_tuple(args, lits)
    q = ParamTuple.from_a4(*lits.tuple4(_need(args.target, "--target"), "--target"))
    word = orbit_search(p, q, depth=args.depth)
    out = {"source": _fmt(p.a4), "target": _fmt(q.a4), "depth": args.depth,
           "found": word is not None, "word": format_word(word) if word is not None else None,
           "translation_coset_equal": translation_coset_equal(p, q)}
    text = format_word(word) if word is not None else f"no word of length <= {args.depth}"
    return out, text


def cmd_verify(args, lits):
    from .backlund import parse_word, verify_solution_preservation
    from .systems import (HAMILTONIAN, Family, build_equation, lift_to_hamiltonian,
                          residual_second_order, residual_system)
    if args.generator is not None:
        idx = parse_word(args.generator)
        if len(idx) != 1:
            raise UsageError("--generator takes a single generator s0..s4")
        p = _param_tuple(args, lits) if (args.alphabar or args.a5) else None
        rep = verify_solution_preservation(idx[0], p)
        out = {"generator": f"s{idx[0]}", "residual": [str(r) for r in rep.residual], "ok": rep.ok}
        return out, ("preserved" if rep.ok else f"residual {out['residual']}")
    fam = _family(args)
    ps = _family_params(args, lits, fam)
    eq = build_equation(fam, ps)
    ys = lits.solution(_need(args.solution, "--solution"), "--solution", ps)
    if fam in HAMILTONIAN:
        xs = (lits.solution(args.xsolution, "--xsolution", ps) if args.xsolution is not None
              else lift_to_hamiltonian(eq, ys))
        res = residual_system(eq, ys, xs)
        out = {"family": fam.value, "y": str(ys), "x": str(xs), "residual": [str(r) for r in res],
               "ok": all(r.is_zero() for r in res)}
        return out, f"residual ({res[0]}, {res[1]})"
    res = residual_second_order(eq, ys)
    out = {"family": fam.value, "y": str(ys), "residual": str(res), "ok": res.is_zero()}
    return out, f"residual {res}"


def _state0(args, fam):
    y0 = _float(_need(args.y0, "--y0"), "--y0")
    x0 = _float(_need(args.x0, "--x0"), "--x0")
    return [y0, x0]


def cmd_integrate(args, lits):
    from .numeric import integrate
    fam = _family(args)
    ps = _numeric_params_cli(args, lits, fam)
    t0, t1 = _float(_need(args.t_from, "--from"), "--from"), _float(_need(args.to, "--to"), "--to")
    tr = integrate(fam, ps, t0, _state0(args, fam), t1, args.tol)
    t_end, st = tr.end
    out = {"system": fam.value, "params": tr.params, "tol": tr.tol, "samples": len(tr.t),
           "t_end": t_end, "y_end": float(st[0]), "x_end": float(st[1]), "pole_abort": tr.pole_abort}
    if args.csv:
        out["sidecar"] = str(tr.to_csv(args.csv))
        out["csv"] = args.csv
    text = f"t={t_end:.12g} y={st[0]:.15g} x={st[1]:.15g} samples={len(tr.t)}"
    if tr.pole_abort is not None:
        text += f" (pole guard at t={tr.pole_abort:.12g})"
    return out, text


def _numeric_params_cli(args, lits, fam):
    from .systems import Family
    if fam is Family.S_VI:
        return [float(v.constant_value()) for v in _param_tuple(args, lits).a5]
    return _family_params(args, lits, fam, numeric=True)


def cmd_probe(args, lits):
    import numpy as np
    from .numeric import compile_rf, detect_relations, integrate, probe_trajectories, sample_columns
    from .systems import Family, T
    fam = _family(args)
    if fam is not Family.P_II:
        raise UsageError("probe supports --family pii")
    alpha = (_float(args.alpha, "--alpha") if args.alpha is not None
             else float(np.random.default_rng(args.seed).uniform(0.2, 0.9)))
    t0 = _float(args.t_from, "--from") if args.t_from is not None else -10.0
    t1 = _float(args.to, "--to") if args.to is not None else -60.0
    if args.y0 is not None or args.x0 is not None:
        trajs = [integrate(fam, [alpha], t0, _state0(args, fam), t1, args.tol)]
        trajs += probe_trajectories(alpha, max(args.count - 1, 0), args.seed, t0, t1, args.tol)
    else:
        trajs = probe_trajectories(alpha, args.count, args.seed, t0, t1, args.tol)
    if trajs:
        cols = sample_columns(trajs, args.samples, seed=args.seed)
    else:
        lo, hi = sorted((t0, t1))
        cols = {"t": np.sort(np.random.default_rng(args.seed).uniform(lo, hi, args.samples))}
    for k, text in enumerate(args.known or (), 1):
        expr = lits.solution(text, "--known", {"alpha": as_rf(Fraction(alpha))})
        f = compile_rf(expr, (T,))
        cols[f"k{k}"] = np.array([f(tv) for tv in cols["t"]])
    found = detect_relations(cols, args.degree, args.eps)
    cands = [{"relation": c.describe(), "score": c.score} for c in found]
    out = {"family": fam.value, "alpha": alpha, "count": len(trajs), "degree": args.degree,
           "eps": args.eps, "seed": args.seed, "columns": list(cols), "candidates": cands}
    text = "\n".join(f"{c['relation']}  (score {c['score']:.3e})" for c in cands) or f"none <= degree {args.degree}"
    return out, text


def cmd_convert(args, lits):
    from .systems import convert_params, invert_pvi
    if args.alphabar or args.a5:
        p = _param_tuple(args, lits)
        out = {view: _fmt(convert_params(p, view)) for view in ("a5", "a4", "pvi", "watanabe")}
        text = "\n".join(f"{k}: {', '.join(str(v) for v in vals)}" for k, vals in out.items())
        return out, text
    vals = [lits.exact(_need(getattr(args, n), f"--{n}"), f"--{n}") for n in ("alpha", "beta", "gamma", "delta")]
    tuples = invert_pvi(*vals)
    out = {"pvi": _fmt(vals), "alphabar": [_fmt(p.a4) for p in tuples], "count": len(tuples)}
    return out, "\n".join(", ".join(str(v) for v in p.a4) for p in tuples)


COMMANDS = {
    "classify": cmd_classify, "minimal": cmd_minimal, "transform": cmd_transform, "orbit": cmd_orbit,
    "verify": cmd_verify, "integrate": cmd_integrate, "probe": cmd_probe, "convert": cmd_convert,
}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="painleve", description="Exact and numeric tools for the Painlevé equations.")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="print one JSON object")
    common.add_argument("--family", choices=FAMILIES)
    for name in ("alpha", "beta", "gamma", "delta", "v1", "v2"):
        common.add_argument(f"--{name}")
    common.add_argument("--alphabar", help="a0,a1,a3,a4")
    common.add_argument("--a5", help="a0,a1,a2,a3,a4")
    helps = {
        "classify": "algebraic-solution verdicts",
        "minimal": "strong minimality test for P_VI",
        "transform": "apply a Bäcklund word",
        "orbit": "search for a word between parameter tuples",
        "verify": "exact residual of a closed-form solution",
        "integrate": "numeric integration",
        "probe": "numeric search for polynomial relations",
        "convert": "parameter views",
    }
    subs = {name: sub.add_parser(name, parents=[common], help=h) for name, h in helps.items()}
    subs["classify"].add_argument("--genericity", action="store_true", help="report which structure results apply")
    subs["transform"].add_argument("--word")
    for name in ("transform", "verify"):
        subs[name].add_argument("--solution")
        subs[name].add_argument("--xsolution")
    subs["verify"].add_argument("--generator", help="check s_i preserves S_VI solutions")
    subs["orbit"].add_argument("--target", help="a0,a1,a3,a4")
    subs["orbit"].add_argument("--depth", type=int, default=8)
    for name in ("integrate", "probe"):
        s = subs[name]
        s.add_argument("--from", dest="t_from")
        s.add_argument("--to")
        s.add_argument("--y0")
        s.add_argument("--x0")
        s.add_argument("--tol", type=float, default=1e-10)
    subs["integrate"].add_argument("--csv", help="write samples as CSV plus a JSON sidecar")
    p = subs["probe"]
    p.add_argument("--count", type=int, default=2)
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--samples", type=int, default=600)
    p.add_argument("--known", action="append", help="closed-form solution y(t) added as a column")
    p.set_defaults(tol=1e-11)
    return ap


def _setup_logging():
    level = os.environ.get("PAINLEVE_LOG", "error").upper()
    logging.basicConfig(level=getattr(logging, level, logging.ERROR), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _value_options(ap: argparse.ArgumentParser) -> set:
    opts = set()
    for action in ap._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sub in action.choices.values():
                opts |= _value_options(sub)
        elif action.option_strings and action.nargs is None and action.const is None:
            opts.update(o for o in action.option_strings if o.startswith("--"))
    return opts


def _attach_values(argv: list, opts: set) -> list:
    """Rewrite ``--flag -1/t`` as ``--flag=-1/t`` so negative literals are not read as flags."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in opts and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    _setup_logging()
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    want_json = "--json" in argv
    try:
        args = ap.parse_args(_attach_values(argv, _value_options(ap)))
        if not args.command:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        lits = _Literals()
        out, text = COMMANDS[args.command](args, lits)
    except UsageError as exc:
        _report(exc, "usage", want_json)
        return 2
    except PainleveError as exc:
        _report(exc, "error", want_json)
        return 3
    if args.json:
        if lits.used:
            out = dict(out, symbols=sorted(lits.used))
        print(json.dumps(out))
    else:
        print(text)
    return 0


def _report(exc, kind, want_json):
    msg = f"{type(exc).__name__}: {exc}"
    print(f"painleve: {kind}: {msg}", file=sys.stderr)
    if want_json:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))


if __name__ == "__main__":
    sys.exit(main())
