"""Exit criteria for the package, one test per criterion.

Each test prints a PASS/FAIL line; the lines are repeated in the pytest
terminal summary under "acceptance criteria".
"""

import io
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from varbound.basisopt import BasisObjective, BasisParams, BoundKind, optimize
from varbound.bounds import full_report, mbp_bound, mbp_bound_literal
from varbound.cli import main
from varbound.oracle import (
    VerifyReport,
    _random_instance,
    check_sandwich_callebaut,
    check_sandwich_milne,
    random_basis_search,
)
from varbound.qcore import amplitudes, variance
from varbound.scenarios import SweepSpec, random_unitary, spin1_operators, sweep, theta_state

WEIGHTS = (1 / 3, 0.5)


def test_c1_spin1_fixtures(criterion):
    lx, ly, _ = spin1_operators()
    expected = {
        0.0: dict(product=0.25, robertson=0.25, schrodinger=0.25, mbp=0.25, milne=0.25, c3=0.25, c2=0.25),
        math.pi / 4: dict(product=0.1875, robertson=0.0625, schrodinger=0.0625, mbp=0.0625, c3=0.0625, c2=0.0625,
                          milne=0.125),
        math.pi / 2: dict(product=1.0, robertson=0.0, mbp=1.0, milne=1.0),
    }
    start = time.perf_counter()
    worst = 0.0
    for theta, want in expected.items():
        r = full_report(lx, ly, theta_state(theta), None, WEIGHTS)
        got = dict(product=r.product, robertson=r.robertson, schrodinger=r.schrodinger, mbp=r.mbp, milne=r.milne,
                   c3=r.callebaut[1 / 3], c2=r.callebaut[0.5])
        worst = max(worst, max(abs(got[k] - v) for k, v in want.items()))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 1.0
    criterion("C1 spin-1 fixtures", ok, f"max_err={worst:.2e} time={elapsed:.3f}s")
    assert ok


def test_c2_figure_structure(criterion):
    lx, ly, _ = spin1_operators()
    start = time.perf_counter()
    rows = sweep(lx, ly, theta_state, SweepSpec(0.0, math.pi, 181, WEIGHTS))
    elapsed = time.perf_counter() - start
    problems = []
    for r in rows:
        c2, c3 = r.callebaut[0.5], r.callebaut[1 / 3]
        # ordering within 1e-10 absolute
        if not (c2 >= c3 - 1e-10 and c3 >= r.mbp - 1e-10 and r.milne >= r.mbp - 1e-10):
            problems.append(("order", r.theta))
        if max(c2, c3, r.mbp, r.milne, r.robertson, r.schrodinger) > r.product + 1e-8:
            problems.append(("upper", r.theta))
    for idx in (0, 90):  # theta = 0 and pi/2
        r = rows[idx]
        if any(abs(v - r.product) > 1e-10 for v in (r.mbp, r.milne, *r.callebaut.values())):
            problems.append(("tight", r.theta))
    ok = not problems and len(rows) == 181 and elapsed < 2.0
    criterion("C2 figure-1 structure", ok, f"rows={len(rows)} problems={problems[:3]} time={elapsed:.3f}s")
    assert ok


def test_c3_inequality_sandwiches(criterion):
    grid = [k / 10 for k in range(11)]
    rep = VerifyReport()
    start = time.perf_counter()
    for n in range(2, 9):
        rng = np.random.default_rng(1000 + n)
        for _ in range(1000):
            a, b = rng.uniform(0, 10, n), rng.uniform(0, 10, n)
            # exercise the zero conventions on a fraction of the draws
            a[rng.uniform(size=n) < 0.1] = 0.0
            b[rng.uniform(size=n) < 0.1] = 0.0
            rep.merge(check_sandwich_callebaut(a, b, grid, tol=1e-10))
            rep.merge(check_sandwich_milne(a, b, tol=1e-10))
    elapsed = time.perf_counter() - start
    sandwich = [f for f in rep.failures if f[0].endswith(("_lower", "_upper"))]
    ok = not sandwich and elapsed < 10.0
    criterion("C3 Callebaut/Milne sandwiches", ok,
              f"checks={rep.checks_run} violations={len(sandwich)} worst_margin={rep.worst_margin:.2e} time={elapsed:.2f}s")
    assert ok
    assert rep.ok, rep.failures[:3]


def test_c4_mbp_literal_identity(criterion):
    start = time.perf_counter()
    worst = 0.0
    for i in range(200):
        A, B, psi, U = _random_instance(2 + i % 3, 50_000 + i)
        worst = max(worst, abs(mbp_bound_literal(A, B, psi, U) - mbp_bound(A, B, psi, U)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 10.0
    criterion("C4 MBP literal == simplified", ok, f"max_diff={worst:.2e} time={elapsed:.2f}s")
    assert ok


def test_c5_parseval(criterion):
    start = time.perf_counter()
    worst = 0.0
    for i in range(50):
        n = 2 + i % 5
        A, _, psi, _ = _random_instance(n, 70_000 + i)
        va = variance(A, psi)
        for j in range(100):
            U = random_unitary(n, 1_000_000 + 100 * i + j)
            worst = max(worst, abs(float(np.sum(np.abs(amplitudes(A, psi, U)) ** 2)) - va))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 5.0
    criterion("C5 Parseval / basis independence", ok, f"max_err={worst:.2e} time={elapsed:.2f}s")
    assert ok


def test_c6_optimizer_soundness_and_anchor(criterion):
    start = time.perf_counter()
    over, under, wins, worst_gap = 0, 0, 0, 0.0
    for i in range(100):
        A, B, psi, _ = _random_instance(3, 90_000 + i)
        kind = BoundKind.milne() if i % 2 == 0 else BoundKind.callebaut(0.5 if i % 4 == 1 else 1 / 3)
        obj = BasisObjective(A, B, psi, kind)
        res = optimize(A, B, psi, kind)
        standard = obj(BasisParams.zeros(3))
        sampled = random_basis_search(A, B, psi, kind, 1000, 90_000 + i)
        over += res.best_value > obj.product + 1e-8
        under += res.best_value < standard - 1e-12
        wins += res.best_value > sampled
        worst_gap = max(worst_gap, obj.product - res.best_value)
    elapsed = time.perf_counter() - start
    ok = over == 0 and under == 0 and wins >= 90 and elapsed < 60.0
    criterion("C6 optimizer soundness/anchor", ok,
              f"above_product={over} below_standard={under} beats_random={wins}/100 "
              f"max_gap_to_product={worst_gap:.2e} time={elapsed:.1f}s")
    assert ok


def test_c7_optimizer_tight_instances(criterion):
    lx, ly, _ = spin1_operators()
    psi = theta_state(0.0)
    start = time.perf_counter()
    values = {str(k): optimize(lx, ly, psi, k).best_value for k in (BoundKind.milne(), BoundKind.callebaut(0.5))}
    elapsed = time.perf_counter() - start
    ok = all(abs(v - 0.25) <= 1e-6 for v in values.values()) and elapsed < 5.0
    criterion("C7 optimizer reaches 0.25 at theta=0", ok, f"values={values} time={elapsed:.2f}s")
    assert ok


def test_c8_determinism(criterion, tmp_path):
    scen = tmp_path / "spin1.json"
    scen.write_text(
        '{"dimension": 3, "observable_a": {"preset": "spin1_lx"}, "observable_b": {"preset": "spin1_ly"},'
        ' "state": {"preset": "theta", "theta": 0.6}, "weights": [0.3333333333333333, 0.5]}'
    )
    outputs = []
    for k in range(2):
        csv_path = tmp_path / f"sweep{k}.csv"
        assert main(["sweep", "--scenario", str(scen), "--theta-start", "0", "--theta-end", repr(math.pi),
                     "--steps", "181", "--output", str(csv_path)], io.StringIO()) == 0
        buf = io.StringIO()
        assert main(["optimize", "--scenario", str(scen), "--kind", "callebaut", "--lambda", "0.5",
                     "--restarts", "6", "--seed", "123"], buf) == 0
        outputs.append((csv_path.read_bytes(), buf.getvalue().encode()))
    ok = outputs[0] == outputs[1]
    criterion("C8 byte-identical sweep/optimize", ok, f"csv_bytes={len(outputs[0][0])}")
    assert ok


def test_c9_verify_suite(criterion):
    start = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "varbound.cli", "verify"], capture_output=True, text=True)
    elapsed = time.perf_counter() - start
    ok = proc.returncode == 0 and elapsed < 60.0
    summary = " ".join(line for line in proc.stdout.splitlines()[:3])
    criterion("C9 varbound verify", ok, f"exit={proc.returncode} {summary} time={elapsed:.1f}s")
    assert ok, proc.stdout + proc.stderr
