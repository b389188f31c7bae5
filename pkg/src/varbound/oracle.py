"""Independent cross-checks for the bounds and the basis optimizer.

Reference sides never reuse the ``bounds`` kernels: sums are recomputed
elementwise with ``math.fsum`` so that a cancellation bug in the vectorized
code cannot hide behind an identical floating-point pipeline.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import bounds
from .basisopt import BasisObjective, BasisParams, BoundKind, OptimizerConfig, optimize
from .qcore import (
    OrthonormalBasis,
    PureState,
    ValidationError,
    amplitudes,
    expectation,
    variance,
)
from .scenarios import (
    pauli_operators,
    random_hermitian,
    random_state,
    random_unitary,
    spin1_operators,
    theta_state,
)

REL_TOL = 1e-10
LAMBDA_GRID = tuple(k / 10 for k in range(11))


@dataclass
class VerifyReport:
    checks_run: int = 0
    failures: list[tuple[str, str, dict]] = field(default_factory=list)
    worst_margin: float = math.inf
    counts: Counter = field(default_factory=Counter)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, name: str, instance: str, margin: float, tol: float, **observed) -> bool:
        """Register one check whose slack is ``margin`` (negative = violated)."""
        self.checks_run += 1
        self.counts[name] += 1
        self.worst_margin = min(self.worst_margin, margin)
        if margin < -tol or math.isnan(margin):
            self.failures.append((name, instance, dict(observed)))
            return False
        return True

    def merge(self, other: VerifyReport) -> VerifyReport:
        self.checks_run += other.checks_run
        self.failures.extend(other.failures)
        self.worst_margin = min(self.worst_margin, other.worst_margin)
        self.counts.update(other.counts)
        return self


def _fsum_pow(a, b, pa: float, pb: float) -> float:
    # same 0**0 == 1 convention as the code under test, spelled out termwise
    return math.fsum((x**pa if (x or pa) else 1.0) * (y**pb if (y or pb) else 1.0) for x, y in zip(a, b))


def reference_callebaut(a, b, lam: float) -> float:
    return _fsum_pow(a, b, 1 + lam, 1 - lam) * _fsum_pow(a, b, 1 - lam, 1 + lam)


def reference_milne(a, b) -> float:
    first = math.fsum(x * x + y * y for x, y in zip(a, b))
    second = math.fsum(x * x * y * y / (x * x + y * y) for x, y in zip(a, b) if x or y)
    return first * second


def reference_cauchy_schwarz(a, b) -> tuple[float, float]:
    """(sum a b)^2 and sum a^2 * sum b^2."""
    low = math.fsum(x * y for x, y in zip(a, b)) ** 2
    high = math.fsum(x * x for x in a) * math.fsum(y * y for y in b)
    return low, high


def _rel_margin(lo: float, hi: float) -> float:
    """Slack of lo <= hi, relative to the larger magnitude."""
    return (hi - lo) / max(abs(hi), abs(lo), 1.0)


def _describe(a, b) -> str:
    return f"a={list(np.round(a, 6))}, b={list(np.round(b, 6))}"


def check_sandwich_callebaut(a, b, lam_grid=LAMBDA_GRID, tol: float = REL_TOL) -> VerifyReport:
    """Check (sum ab)^2 <= C(lambda) <= sum a^2 sum b^2 along the grid.

    For strictly positive inputs also checks C is nondecreasing in lambda.
    With zero entries the lambda = 1 endpoint can jump (0**0 == 1), so the
    monotonicity step into lambda = 1 is skipped there.
    """
    a = [float(x) for x in a]
    b = [float(y) for y in b]
    if len(a) != len(b):
        raise ValueError("length mismatch")
    rep = VerifyReport()
    low, high = reference_cauchy_schwarz(a, b)
    positive = all(x > 0 for x in a) and all(y > 0 for y in b)
    inst = _describe(a, b)
    grid = sorted(lam_grid)
    prev = None
    for lam in grid:
        val = bounds.callebaut_product(a, b, lam)
        ref = reference_callebaut(a, b, lam)
        rep.record("callebaut_reference", inst, -abs(val - ref) / max(abs(ref), 1.0), tol, lam=lam, value=val, reference=ref)
        rep.record("callebaut_lower", inst, _rel_margin(low, val), tol, lam=lam, value=val, lower=low)
        rep.record("callebaut_upper", inst, _rel_margin(val, high), tol, lam=lam, value=val, upper=high)
        if prev is not None and (positive or lam < 1.0):
            rep.record("callebaut_monotone", inst, _rel_margin(prev, val), tol, lam=lam, value=val, previous=prev)
        prev = val
    return rep


def check_sandwich_milne(a, b, tol: float = REL_TOL) -> VerifyReport:
    a = [float(x) for x in a]
    b = [float(y) for y in b]
    if len(a) != len(b):
        raise ValueError("length mismatch")
    rep = VerifyReport()
    low, high = reference_cauchy_schwarz(a, b)
    val = bounds.milne_product(a, b)
    ref = reference_milne(a, b)
    inst = _describe(a, b)
    rep.record("milne_reference", inst, -abs(val - ref) / max(abs(ref), 1.0), tol, value=val, reference=ref)
    rep.record("milne_lower", inst, _rel_margin(low, val), tol, value=val, lower=low)
    rep.record("milne_upper", inst, _rel_margin(val, high), tol, value=val, upper=high)
    return rep


def random_basis_search(A, B, psi, kind: BoundKind, samples: int, seed: int) -> float:
    """Best objective over ``samples`` uniformly drawn Givens angle vectors.

    Draws are sequential from one stream, so a longer run with the same seed
    extends a shorter one.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    obj = BasisObjective(A, B, psi, kind)
    rng = np.random.default_rng(seed)
    best = -math.inf
    for _ in range(samples):
        best = max(best, obj(BasisParams.random(obj.n, rng)))
    return best


def _random_instance(n: int, seed: int):
    A = random_hermitian(n, seed)
    B = random_hermitian(n, seed + 1_000_003)
    psi = random_state(n, seed + 2_000_003)
    U = random_unitary(n, seed + 3_000_017)
    return A, B, psi, U


def _spin1_fixtures(rep: VerifyReport) -> None:
    lx, ly, _ = spin1_operators()
    expected = {
        0.0: dict(product=0.25, robertson=0.25, schrodinger=0.25, mbp=0.25, milne=0.25, c3=0.25, c2=0.25),
        math.pi / 4: dict(product=0.1875, robertson=0.0625, schrodinger=0.0625, mbp=0.0625, milne=0.125, c3=0.0625, c2=0.0625),
        math.pi / 2: dict(product=1.0, robertson=0.0, mbp=1.0, milne=1.0),
    }
    for theta, want in expected.items():
        r = bounds.full_report(lx, ly, theta_state(theta), None, (1 / 3, 0.5))
        got = dict(
            product=r.product, robertson=r.robertson, schrodinger=r.schrodinger, mbp=r.mbp,
            milne=r.milne, c3=r.callebaut[1 / 3], c2=r.callebaut[0.5],
        )
        for key, val in want.items():
            rep.record("spin1_fixture", f"theta={theta:.6f} {key}", -abs(got[key] - val), 1e-10, observed=got[key], expected=val)


def _negative_fixture(rep: VerifyReport) -> None:
    try:
        from .qcore import HermitianObservable

        HermitianObservable([[0.0, 1.0], [0.0, 0.0]])
    except ValidationError:
        rep.record("rejects_non_hermitian", "[[0,1],[0,0]]", 0.0, 0.0)
    else:
        rep.record("rejects_non_hermitian", "[[0,1],[0,0]]", -1.0, 0.0, accepted=True)


ANCHOR_CONFIG = OptimizerConfig(restarts=2, max_iterations=300, tolerance=1e-10)


def verify_suite(seed: int = 0, trials: int = 100, inject_fault: bool = False) -> VerifyReport:
    """Run every cross-check over ``trials`` seeded random instances."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rep = VerifyReport()
    _spin1_fixtures(rep)
    _negative_fixture(rep)
    X, Y, Z = pauli_operators()
    rep.record("pauli_robertson", "X,Y,(1,0)", -abs(bounds.robertson_bound(X, Y, PureState([1, 0])) - 1.0), 1e-12)

    rng = np.random.default_rng(seed)
    for t in range(trials):
        n = int(rng.integers(2, 5))
        s = int(rng.integers(0, 2**31))
        inst = f"trial={t} n={n} seed={s}"
        A, B, psi, U = _random_instance(n, s)
        va, vb = variance(A, psi), variance(B, psi)
        product = va * vb
        alpha = amplitudes(A, psi, U)
        beta = amplitudes(B, psi, U)

        parseval = math.fsum(abs(z) ** 2 for z in alpha)
        rep.record("parseval", inst, -abs(parseval - va), 1e-10, sum_sq=parseval, variance=va)

        # <alpha|beta> equals <psi|A_bar B_bar|psi>
        cross = complex(np.vdot(alpha, beta))
        a_bar = A.matrix - expectation(A, psi) * np.eye(n)
        b_bar = B.matrix - expectation(B, psi) * np.eye(n)
        direct = complex(np.vdot(psi.vector, a_bar @ b_bar @ psi.vector))
        rep.record("completeness", inst, -abs(cross - direct), 1e-10)

        lit = bounds.mbp_bound_literal(A, B, psi, U)
        simp = bounds.mbp_bound(A, B, psi, U)
        rep.record("mbp_literal_vs_simplified", inst, -abs(lit - simp), 1e-12, literal=lit, simplified=simp)

        a, b = np.abs(alpha), np.abs(beta)
        mbp_ref = math.fsum(x * y for x, y in zip(a, b)) ** 2
        for lam in (0.0, 1 / 3, 0.5, 1.0):
            c = reference_callebaut(a, b, lam)
            rep.record("dominates_mbp", inst, c - mbp_ref, 1e-10, kind=f"callebaut({lam:g})", value=c, mbp=mbp_ref)
            rep.record("below_product", inst, product - c, 1e-8, kind=f"callebaut({lam:g})", value=c, product=product)
        m = reference_milne(a, b)
        rep.record("dominates_mbp", inst, m - mbp_ref, 1e-10, kind="milne", value=m, mbp=mbp_ref)

        r = bounds.full_report(A, B, psi, U, (1 / 3, 0.5))
        bad = r.violations()
        rep.record("report_sound", inst, -float(len(bad)), 0.0, violations=bad)
        rep.record("robertson_le_schrodinger", inst, r.schrodinger - r.robertson, 1e-10)
        rep.record("schrodinger_le_product", inst, r.product - r.schrodinger, 1e-8)

        rep.merge(check_sandwich_callebaut(a, b))
        rep.merge(check_sandwich_milne(a, b))

        if t % 10 == 0:
            kind = BoundKind.milne() if t % 20 == 0 else BoundKind.callebaut(0.5)
            std = BasisObjective(A, B, psi, kind)(BasisParams.zeros(n))
            res = optimize(A, B, psi, kind, ANCHOR_CONFIG)
            rep.record("optimizer_anchor", inst, res.best_value - std, 1e-12, best=res.best_value, standard=std)
            rep.record("optimizer_sound", inst, product - res.best_value, 1e-8, best=res.best_value, product=product)

    if inject_fault:
        rep.record("injected_fault", "harness", -1.0, 0.0)
    return rep
