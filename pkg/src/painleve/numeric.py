"""Floating-point layer: integration, pointwise Bäcklund checks, relation detection, Taylor seeds.

Symbolic right-hand sides are compiled once into plain Python callables with
the parameters as trailing arguments, so numeric parameters may be any floats.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .algebra import Kind, Polynomial, RationalFunction, Var, as_rf
from .backlund import _as_word, _param_row, act_solution
from .errors import (
    InsufficientSamples,
    PathThroughFixedSingularity,
    PointwiseSingular,
    RhsSingularAtSeed,
    StepSizeUnderflow,
    UsageError,
)
from .systems import (
    FIXED_SINGULARITIES,
    HAMILTONIAN,
    PARAM_NAMES,
    T,
    X,
    Y,
    YP,
    Family,
    ParamTuple,
    SecondOrderODE,
    build_equation,
    x,
    y,
)

log = logging.getLogger(__name__)

POLE_GUARD = 1e8
_SVI_FREE = ("a0", "a1", "a3", "a4")


# ---------------------------------------------------------------------------
# compilation

def _poly_source(p: Polynomial, names: Mapping[Var, str]) -> str:
    if p.is_zero():
        return "0.0"
    parts = []
    for mono, c in p.terms:
        factors = [repr(float(c))]
        for v, e in mono:
            factors.append(names[v] if e == 1 else f"{names[v]}**{e}")
        parts.append("*".join(factors))
    return " + ".join(parts)


def compile_rf(rf, args: Sequence[Var]) -> Callable:
    """Compile a rational function into ``f(*values)`` with positional ``args``."""
    rf = as_rf(rf)
    names = {v: f"_v{i}" for i, v in enumerate(args)}
    missing = rf.variables - set(args)
    if missing:
        raise ValueError(f"unbound variables {sorted(v.name for v in missing)}")
    src = f"def _f({', '.join(names.values())}):\n"
    src += f"    return ({_poly_source(rf.num, names)}) / ({_poly_source(rf.den, names)})\n"
    scope: dict = {}
    exec(compile(src, "<painleve-rf>", "exec"), scope)
    return scope["_f"]


def _param_vars(family: Family) -> tuple:
    names = _SVI_FREE if family is Family.S_VI else PARAM_NAMES[family]
    return tuple(Var(n, Kind.PARAMETER) for n in names)


def _numeric_params(family: Family, params) -> dict:
    """Normalise numeric parameters to a float dict keyed by name."""
    if family is Family.S_VI:
        vals = params
        if isinstance(params, Mapping):
            vals = [params[k] for k in (PARAM_NAMES[family] if "a2" in params else _SVI_FREE)]
        vals = [float(v) for v in vals]
        if len(vals) == 5:
            a0, a1, a2, a3, a4 = vals
            if abs(a0 + a1 + 2 * a2 + a3 + a4 - 1) > 1e-12 * max(1.0, *map(abs, vals)):
                raise UsageError("a0 + a1 + 2*a2 + a3 + a4 must equal 1")
            vals = [a0, a1, a3, a4]
        if len(vals) != 4:
            raise UsageError("S_VI takes (a0, a1, a3, a4) or the full 5-tuple")
        out = dict(zip(_SVI_FREE, vals))
        out["a2"] = (1 - sum(vals)) / 2
        return out
    names = PARAM_NAMES[family]
    if isinstance(params, Mapping):
        vals = [params[n] for n in names]
    else:
        vals = list(params or ())
    if len(vals) != len(names):
        raise UsageError(f"{family.value} takes parameters {list(names)}")
    return {n: float(v) for n, v in zip(names, vals)}


@dataclass(frozen=True)
class NumericSystem:
    """First-order vector field of a family at fixed numeric parameters."""

    family: Family
    params: dict
    field: Callable

    def __call__(self, t, state):
        return self.field(t, state)


def numeric_system(family, params) -> NumericSystem:
    family = Family.lookup(family)
    ps = _numeric_params(family, params)
    pvars = _param_vars(family)
    pvals = tuple(ps[v.name] for v in pvars)
    eq = build_equation(family)
    if family in HAMILTONIAN:
        f1 = compile_rf(eq.f1, (T, Y, X) + pvars)
        f2 = compile_rf(eq.f2, (T, Y, X) + pvars)

        def vf(tv, s):
            return np.array([f1(tv, s[0], s[1], *pvals), f2(tv, s[0], s[1], *pvals)])
    else:
        g = compile_rf(eq.rhs, (T, Y, YP) + pvars)

        def vf(tv, s):
            return np.array([s[1], g(tv, s[0], s[1], *pvals)])
    return NumericSystem(family, ps, vf)


# ---------------------------------------------------------------------------
# integration

@dataclass
class Trajectory:
    family: Family
    params: dict
    t: np.ndarray
    states: np.ndarray  # shape (n, 2): (y, x) or (y, y')
    tol: float
    pole_abort: float | None = None
    dense: Callable | None = field(default=None, repr=False)

    @property
    def samples(self) -> list:
        return [(float(tv), float(a), float(b)) for tv, (a, b) in zip(self.t, self.states)]

    @property
    def end(self) -> tuple:
        return float(self.t[-1]), self.states[-1].copy()

    def __call__(self, tq):
        """Dense-output value of the state at ``tq``."""
        return self.dense(tq)

    def to_csv(self, path) -> Path:
        """Write ``t,y,x`` rows plus a JSON sidecar next to the file; returns the sidecar path.

        For second-order families the ``x`` column holds y'.
        """
        path = Path(path)
        data = np.column_stack([self.t, self.states])
        np.savetxt(path, data, delimiter=",", header="t,y,x", comments="", fmt="%.17g")
        side = path.with_suffix(path.suffix + ".json")
        side.write_text(json.dumps({
            "system": self.family.value,
            "params": self.params,
            "tol": self.tol,
            "pole_abort": self.pole_abort,
        }, indent=2))
        return side


def integrate(family, params, t0: float, state0, t1: float, tol: float = 1e-10) -> Trajectory:
    """Integrate from ``t0`` to ``t1`` with an embedded Runge-Kutta 5(4) pair.

    Stops cleanly at a movable pole (|y| or |x| above 1e8) and records where.
    """
    family = Family.lookup(family)
    t0, t1 = float(t0), float(t1)
    if t0 == t1:
        raise UsageError("t0 and t1 must differ")
    if not 1e-13 <= tol <= 1e-3:
        raise UsageError(f"tol must lie in [1e-13, 1e-3], got {tol}")
    lo, hi = min(t0, t1), max(t0, t1)
    for s in FIXED_SINGULARITIES[family]:
        if lo <= s <= hi:
            raise PathThroughFixedSingularity(f"path [{t0}, {t1}] meets the fixed singularity t = {s}")
    sysn = numeric_system(family, params)

    def pole(tv, s):
        return POLE_GUARD - max(abs(s[0]), abs(s[1]))

    pole.terminal = True
    pole.direction = -1
    with np.errstate(all="ignore"):
        sol = solve_ivp(sysn.field, (t0, t1), np.asarray(state0, dtype=float), method="RK45",
                        rtol=tol, atol=tol, dense_output=True, events=pole)
    if sol.status == -1:
        last = float(sol.t[-1]) if sol.t.size else t0
        raise StepSizeUnderflow(f"integration failed: {sol.message}", last)
    abort = None
    if sol.status == 1 and sol.t_events[0].size:
        abort = float(sol.t_events[0][0])
        log.info("pole guard tripped at t=%g", abort)
    return Trajectory(family, sysn.params, sol.t, sol.y.T.copy(), tol, abort, sol.sol)


# ---------------------------------------------------------------------------
# pointwise Bäcklund check

_GEN_CACHE: dict = {}


def _compiled_generator(i: int) -> tuple:
    """Per output coordinate of s_i: (value, d/dt, d/dy, d/dx, denominator) as callables."""
    if i not in _GEN_CACHE:
        ny, nx = act_solution(i, ParamTuple.symbolic(), y, x)
        args = (T, Y, X) + _param_vars(Family.S_VI)
        _GEN_CACHE[i] = tuple(
            tuple(compile_rf(r, args) for r in (e, e.partial(T), e.partial(Y), e.partial(X), RationalFunction(e.den)))
            for e in (ny, nx))
    return _GEN_CACHE[i]


def backlund_numeric_check(g, p, traj: Trajectory, singular_tol: float = 1e-10) -> float:
    """Max-norm residual of the target S_VI vector field along the transformed samples.

    ``g`` is a generator index or a word.  Each sample's velocity is the source
    vector field there (samples lie on the trajectory).  Point and velocity
    are pushed through the generators right to left by the chain rule, then
    compared with the target field at the image point.
    """
    word = _as_word([g] if isinstance(g, int) else g)
    src = numeric_system(Family.S_VI, p)
    a5 = tuple(src.params[f"a{i}"] for i in range(5))
    steps = []
    cur = a5
    for i in reversed(word):
        steps.append((i, (cur[0], cur[1], cur[3], cur[4])))
        cur = _param_row(i, cur)
    tgt = numeric_system(Family.S_VI, cur)
    gens = {i: _compiled_generator(i) for i in set(word)}
    worst = 0.0
    for k, (tv, st) in enumerate(zip(traj.t, traj.states)):
        pt = (float(st[0]), float(st[1]))
        vel = tuple(src.field(tv, st))
        for i, pv in steps:
            if i == 1:
                continue
            npt, nvel = [], []
            for value, dt, dy, dx, den in gens[i]:
                args = (tv, pt[0], pt[1]) + pv
                if abs(den(*args)) < singular_tol:
                    raise PointwiseSingular(k, f"s{i} denominator vanishes at t={tv:g}")
                npt.append(value(*args))
                nvel.append(dt(*args) + dy(*args) * vel[0] + dx(*args) * vel[1])
            pt, vel = tuple(npt), tuple(nvel)
        want = tgt.field(tv, np.array(pt))
        worst = max(worst, float(np.max(np.abs(np.array(vel) - want))))
    return worst


# ---------------------------------------------------------------------------
# relation detection

@dataclass(frozen=True)
class RelationCandidate:
    variables: tuple
    monomials: tuple  # exponent tuples aligned with ``variables``
    coefficients: np.ndarray
    score: float

    def terms(self, cutoff: float = 1e-8) -> list:
        return [(m, float(c)) for m, c in zip(self.monomials, self.coefficients) if abs(c) > cutoff]

    def describe(self, cutoff: float = 1e-8) -> str:
        out = []
        for m, c in self.terms(cutoff):
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in zip(self.variables, m) if e)
            out.append(f"{c:+.6g}" + (f"*{mono}" if mono else ""))
        return " ".join(out) if out else "0"

    def evaluate(self, columns) -> np.ndarray:
        data = _as_matrix(columns, self.variables)[1]
        return _monomial_matrix(data, self.monomials) @ self.coefficients


def monomial_exponents(nvars: int, degree: int) -> tuple:
    """Exponent vectors of total degree <= degree, graded."""
    out = []
    for d in range(degree + 1):
        for combo in combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return tuple(out)


def _monomial_matrix(data: np.ndarray, monomials) -> np.ndarray:
    cols = [np.prod(data ** np.array(m), axis=1) if any(m) else np.ones(len(data)) for m in monomials]
    return np.column_stack(cols)


def _as_matrix(columns, names=None):
    if isinstance(columns, Mapping):
        names = tuple(columns) if names is None else tuple(names)
        data = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
    else:
        data = np.asarray(columns, dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        names = tuple(names) if names is not None else tuple(f"c{i}" for i in range(data.shape[1]))
    return names, data


def detect_relations(columns, degree: int, eps: float = 1e-6, names=None) -> list:
    """Candidate polynomial relations of total degree <= ``degree`` among the columns.

    An empty result means no relation was detected up to that degree; it is a
    necessary-condition check, not a proof of independence.
    """
    names, data = _as_matrix(columns, names)
    if not np.all(np.isfinite(data)):
        raise UsageError("columns must be finite")
    monos = monomial_exponents(data.shape[1], degree)
    if data.shape[0] < 3 * len(monos):
        raise InsufficientSamples(f"need at least {3 * len(monos)} samples for {len(monos)} monomials, "
                                  f"got {data.shape[0]}")
    a = _monomial_matrix(data, monos)
    scale = np.linalg.norm(a, axis=0)
    scale[scale == 0] = 1.0
    a_s = a / scale
    _, sv, vt = np.linalg.svd(a_s, full_matrices=False)
    smax = sv[0] if sv[0] > 0 else 1.0
    null = [i for i, s in enumerate(sv) if s < eps * smax]
    if not null:
        return []
    basis = vt[null]
    if len(null) > 1:
        basis = _echelon(basis)
    found = []
    for v in basis:
        v = v / np.linalg.norm(v)
        score = float(np.linalg.norm(a_s @ v) / smax)
        c = v / scale
        c = c / np.linalg.norm(c)
        lead = np.argmax(np.abs(c) > 1e-12 * np.max(np.abs(c)))
        if c[lead] < 0:
            c = -c
        found.append(RelationCandidate(names, monos, c, score))
    found.sort(key=lambda r: r.score)
    return found


def _echelon(basis: np.ndarray) -> np.ndarray:
    """Reduced row echelon form of a null-space basis, pivoting from the highest monomial down."""
    m = basis[:, ::-1].copy()
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = r + int(np.argmax(np.abs(m[r:, c])))
        if abs(m[piv, c]) < 1e-9:
            continue
        m[[r, piv]] = m[[piv, r]]
        m[r] /= m[r, c]
        for k in range(rows):
            if k != r:
                m[k] -= m[k, c] * m[r]
        r += 1
    return m[:, ::-1]


def holdout_residual(candidate: RelationCandidate, columns) -> float:
    """Max absolute value of a candidate on (held-out) samples."""
    return float(np.max(np.abs(candidate.evaluate(columns))))


def sample_columns(trajs: Sequence[Trajectory], n: int, seed: int = 0, guard: float = 0.05) -> dict:
    """Seeded random samples ``t, y1, y1', y2, y2', ...`` from the dense outputs.

    All trajectories must share a t-range; a guard band at each end (and before
    any pole abort) is excluded.
    """
    lo = max(min(tr.t[0], tr.t[-1]) for tr in trajs)
    hi = min(max(tr.t[0], tr.t[-1]) for tr in trajs)
    for tr in trajs:
        if tr.pole_abort is not None:
            raise UsageError("trajectory hit a pole; resample on a pole-free range")
    width = hi - lo
    lo, hi = lo + guard * width, hi - guard * width
    rng = np.random.default_rng(seed)
    ts = np.sort(rng.uniform(lo, hi, n))
    cols = {"t": ts}
    for i, tr in enumerate(trajs, 1):
        st = tr(ts)
        cols[f"y{i}"] = st[0]
        cols[f"y{i}'"] = st[1]
    return cols


# amplitude bands (fractions of sqrt(|t0|/2)) alternated across probe solutions;
# separated bands keep the solutions from being near phase-shifted copies
PROBE_BANDS = ((0.3, 0.5), (0.75, 0.9))


def probe_trajectories(alpha: float, count: int, seed: int = 0, t0: float = -10.0, t1: float = -60.0,
                       tol: float = 1e-11, max_tries: int = 50) -> list:
    """Seeded pole-free P_II(alpha) solutions on the negative real axis.

    Initial values are drawn below the blow-up threshold |y| < sqrt(|t0|/2);
    a draw whose trajectory trips the pole guard is discarded and redrawn.
    """
    if t0 >= 0 or t1 >= t0:
        raise UsageError("probe range must run leftwards on the negative axis")
    rng = np.random.default_rng(seed)
    cap = np.sqrt(-t0 / 2)
    out = []
    for k in range(count):
        lo, hi = PROBE_BANDS[k % len(PROBE_BANDS)]
        for _ in range(max_tries):
            state = [rng.choice([-1.0, 1.0]) * rng.uniform(lo, hi) * cap, rng.uniform(-1.0, 1.0)]
            tr = integrate(Family.P_II, [alpha], t0, state, t1, tol)
            if tr.pole_abort is None:
                out.append(tr)
                break
        else:
            raise UsageError(f"no pole-free start found for solution {k + 1}")
    return out


# ---------------------------------------------------------------------------
# Taylor seeds

def _series_mul(a, b, n):
    return [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n)]


def _series_poly(p: Polynomial, series: Mapping[Var, list], n: int, zero):
    total = [zero] * n
    cache: dict = {}
    for mono, c in p.terms:
        term = [zero] * n
        term[0] = c
        for v, e in mono:
            key = (v, e)
            if key not in cache:
                s = series[v]
                acc = s
                for _ in range(e - 1):
                    acc = _series_mul(acc, s, n)
                cache[key] = acc
            term = _series_mul(term, cache[key], n)
        total = [u + w for u, w in zip(total, term)]
    return total


def _series_div(a, b, n):
    out = []
    for k in range(n):
        out.append((a[k] - sum(out[i] * b[k - i] for i in range(k))) / b[0])
    return out


def taylor_seed(eq: SecondOrderODE, t0, y0, yp0, order: int = 10) -> list:
    """Taylor coefficients c_0..c_order of the local solution in powers of (t - t0).

    Arithmetic is exact when the seed values and parameters are rational.
    """
    if order > 30:
        raise UsageError("order must be <= 30")
    rhs = as_rf(eq.rhs)
    extra = rhs.variables - {T, Y, YP}
    if extra:
        raise UsageError(f"rhs has unbound parameters {sorted(v.name for v in extra)}")
    exact = all(isinstance(v, (int, Fraction)) for v in (t0, y0, yp0))
    conv = Fraction if exact else float
    t0, y0, yp0 = conv(t0), conv(y0), conv(yp0)
    zero = conv(0)
    den0 = rhs.den.evaluate({T: t0, Y: y0, YP: yp0}) if rhs.den.variables else rhs.den.constant_value()
    if den0 == 0:
        raise RhsSingularAtSeed(f"rhs denominator vanishes at t={t0}, y={y0}, y'={yp0}")
    coeffs = [y0, yp0]
    for k in range(order - 1):
        n = k + 1
        ys = (coeffs + [zero] * n)[:n]
        yps = ([(i + 1) * coeffs[i + 1] for i in range(len(coeffs) - 1)] + [zero] * n)[:n]
        ts = ([t0, conv(1)] + [zero] * n)[:n]
        series = {T: ts, Y: ys, YP: yps}
        num = _series_poly(rhs.num, series, n, zero)
        den = _series_poly(rhs.den, series, n, zero)
        val = _series_div(num, den, n)[k]
        coeffs.append(val / ((k + 1) * (k + 2)))
    return [c.numerator if isinstance(c, Fraction) and c.denominator == 1 else c for c in coeffs[:order + 1]]


def taylor_eval(coeffs: Sequence, dt: float) -> float:
    return float(sum(float(c) * dt ** k for k, c in enumerate(coeffs)))


__all__ = [
    "compile_rf", "numeric_system", "NumericSystem", "integrate", "Trajectory",
    "backlund_numeric_check", "RelationCandidate", "detect_relations", "holdout_residual",
    "monomial_exponents", "sample_columns", "probe_trajectories", "PROBE_BANDS", "taylor_seed", "taylor_eval", "POLE_GUARD",
]
