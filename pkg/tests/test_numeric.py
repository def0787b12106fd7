import json
from fractions import Fraction

import numpy as np
import pytest

from painleve.errors import (
    InsufficientSamples,
    PathThroughFixedSingularity,
    PointwiseSingular,
    RhsSingularAtSeed,
    UsageError,
)
from painleve.numeric import (
    backlund_numeric_check,
    detect_relations,
    holdout_residual,
    integrate,
    probe_trajectories,
    sample_columns,
    taylor_eval,
    taylor_seed,
)
from painleve.systems import build_equation

SVI_P = (0.31, 0.17, 0.23, 0.42)


def test_sii_rational_solution():
    tol = 1e-10
    tr = integrate("S_II", [0], 1, [0, 0.5], 3, tol)
    assert abs(tr.states[-1, 0]) < 10 * tol and abs(tr.states[-1, 1] - 1.5) < 10 * tol
    tr = integrate("S_II", [0], 1, [0, 0.5], 5, tol)
    assert np.max(np.abs(tr.states[:, 0])) < 10 * tol
    assert np.max(np.abs(tr.states[:, 1] - tr.t / 2)) < 10 * tol
    assert np.all(np.diff(tr.t) > 0)


def test_pii_closed_form():
    tol = 1e-10
    tr = integrate("P_II", [1], 1, [-1, 1], 2, tol)
    assert abs(tr.states[-1, 0] + 0.5) < 10 * tol


def test_pi_against_taylor():
    tol = 1e-10
    coeffs = taylor_seed(build_equation("P_I"), 0, 0, 0, 10)
    tr = integrate("P_I", [], 0, [0, 0], 0.3, tol)
    assert abs(tr.states[-1, 0] - taylor_eval(coeffs, 0.3)) < 100 * tol


def test_tolerance_convergence():
    ref = taylor_eval(taylor_seed(build_equation("P_I"), 0, 0, 0, 30), 0.3)
    errs = [abs(integrate("P_I", [], 0, [0, 0], 0.3, tol).states[-1, 0] - ref) for tol in (1e-6, 5e-7, 2.5e-7)]
    assert errs[1] <= errs[0] and errs[2] <= errs[1]


def test_integrate_errors():
    with pytest.raises(PathThroughFixedSingularity):
        integrate("S_VI", SVI_P, -0.5, [0.3, 0.1], 0.5)
    with pytest.raises(PathThroughFixedSingularity):
        integrate("S_IIIp", [0.1, 0.2], 0.5, [0.3, 0.1], -0.5)
    with pytest.raises(UsageError):
        integrate("P_II", [0], 1, [0, 0], 1)
    with pytest.raises(UsageError):
        integrate("P_II", [0], 1, [0, 0], 2, tol=1e-2)


def test_pole_guard():
    tr = integrate("P_I", [], 0, [1, 1], 5, 1e-8)
    assert tr.pole_abort is not None and tr.pole_abort < 5
    assert np.all(np.abs(tr.states) <= 1.01e8)


def test_determinism():
    a = integrate("P_II", [0.3], 0, [0.1, 0.2], 1, 1e-10)
    b = integrate("P_II", [0.3], 0, [0.1, 0.2], 1, 1e-10)
    assert np.array_equal(a.t, b.t) and np.array_equal(a.states, b.states)


def test_csv_export(tmp_path):
    tr = integrate("S_II", [0], 1, [0, 0.5], 2, 1e-8)
    side = tr.to_csv(tmp_path / "traj.csv")
    lines = (tmp_path / "traj.csv").read_text().splitlines()
    assert lines[0] == "t,y,x" and len(lines) == len(tr.t) + 1
    meta = json.loads(side.read_text())
    assert set(meta) == {"system", "params", "tol", "pole_abort"} and meta["system"] == "S_II"


def test_backlund_numeric():
    tol = 1e-10
    tr = integrate("S_VI", SVI_P, 0.3, [0.6, 0.4], 0.7, tol)
    assert backlund_numeric_check(1, SVI_P, tr) <= 10 * tol
    assert backlund_numeric_check(4, SVI_P, tr) <= 1e-8
    assert backlund_numeric_check("t0", SVI_P, tr) <= 1e-7


def test_backlund_pointwise_singular():
    tr = integrate("S_VI", SVI_P, 0.3, [0.6, 0.0], 0.31, 1e-10)
    with pytest.raises(PointwiseSingular) as info:
        backlund_numeric_check(2, SVI_P, tr)
    assert info.value.index == 0


def test_detect_closed_form():
    ts = np.linspace(1, 3, 50)
    found = detect_relations({"t": ts, "y": -1 / ts}, 2)
    top = found[0]
    assert top.score < 1e-10
    terms = dict(top.terms(1e-6))
    assert set(terms) == {(0, 0), (1, 1)}
    assert abs(terms[(0, 0)] - terms[(1, 1)]) < 1e-9


def test_detect_zero_column():
    found = detect_relations({"y": np.zeros(10)}, 1)
    assert len(found) == 1 and dict(found[0].terms()) == {(1,): 1.0}


def test_detect_insufficient():
    with pytest.raises(InsufficientSamples):
        detect_relations({"t": np.arange(5.0), "y": np.arange(5.0)}, 2)


def test_detect_holdout_soundness():
    rng = np.random.default_rng(0)
    ts = np.sort(rng.uniform(1, 3, 200))
    cols = {"t": ts, "y": ts ** 2 - 1 / ts, "z": 1 / ts}
    fit = {k: v[::2] for k, v in cols.items()}
    held = {k: v[1::2] for k, v in cols.items()}
    eps = 1e-6
    found = detect_relations(fit, 3, eps)
    assert found
    a = np.column_stack(list(held.values()))
    scale = np.max(np.abs(a)) ** 3
    for c in found:
        assert holdout_residual(c, held) < 10 * eps * scale


def test_probe_independent_solutions_empty():
    trajs = probe_trajectories(0.7318, 2, seed=0)
    cols = sample_columns(trajs, 600, seed=0)
    assert detect_relations(cols, 2, 1e-6) == []


def test_taylor_examples():
    assert taylor_seed(build_equation("P_I"), 0, 0, 0, 4)[:4] == [0, 0, 0, Fraction(1, 6)]
    assert taylor_seed(build_equation("P_II", {"alpha": 0}), 0, 0, 0, 10) == [0] * 11
    assert taylor_seed(build_equation("P_II", {"alpha": 1}), 1, -1, 1, 8) == [(-1) ** (k + 1) for k in range(9)]
    with pytest.raises(RhsSingularAtSeed):
        taylor_seed(build_equation("P_III", {"alpha": 1, "beta": 1, "gamma": 1, "delta": 1}), 1, 0, 1, 5)
