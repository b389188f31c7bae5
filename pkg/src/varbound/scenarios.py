"""Fixtures: spin-1 operators, the theta state family, Pauli matrices,
seeded random ensembles, and theta sweeps over the bound report."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .basisopt import BoundKind, OptimizerConfig, optimize
from .bounds import check_weight, full_report
from .qcore import HermitianObservable, OrthonormalBasis, PureState

_R2 = 1.0 / math.sqrt(2.0)


def spin1_operators() -> tuple[HermitianObservable, HermitianObservable, HermitianObservable]:
    """Spin-1 angular momentum (hbar = 1) in the L_z eigenbasis ordered m = 1, 0, -1."""
    lx = _R2 * np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=np.complex128)
    ly = _R2 * np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=np.complex128)
    lz = np.diag([1.0, 0.0, -1.0]).astype(np.complex128)
    return HermitianObservable(lx), HermitianObservable(ly), HermitianObservable(lz)


def theta_state(theta: float) -> PureState:
    """cos(theta)|m=1> - sin(theta)|m=0>."""
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    return PureState([math.cos(theta), -math.sin(theta), 0.0])


def pauli_operators() -> tuple[HermitianObservable, HermitianObservable, HermitianObservable]:
    x = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
    z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
    return HermitianObservable(x), HermitianObservable(y), HermitianObservable(z)


def random_hermitian(n: int, seed: int) -> HermitianObservable:
    """G + G^dagger with standard-normal complex G."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return HermitianObservable(g + g.conj().T)


def random_state(n: int, seed: int) -> PureState:
    if n < 1:
        raise ValueError("n must be positive")
    substream = 0
    while True:
        rng = np.random.default_rng([seed, substream])
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        norm = np.linalg.norm(v)
        if norm > 0:
            return PureState(v / norm)
        substream += 1


def random_unitary(n: int, seed: int) -> OrthonormalBasis:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return OrthonormalBasis(q * (d / np.abs(d)))


@dataclass(frozen=True)
class SweepSpec:
    theta_start: float = 0.0
    theta_end: float = math.pi
    steps: int = 181
    weights: tuple[float, ...] = (1 / 3, 0.5)
    basis_mode: str = "standard"
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 2:
            raise ValueError("steps must be an integer >= 2")
        if not self.theta_end > self.theta_start:
            raise ValueError("theta_end must exceed theta_start")
        if self.basis_mode not in ("standard", "optimized"):
            raise ValueError(f"unknown basis mode {self.basis_mode!r}")
        ws = tuple(sorted({check_weight(w) for w in self.weights}))
        if not ws:
            raise ValueError("weights must be nonempty")
        object.__setattr__(self, "weights", ws)

    def thetas(self) -> list[float]:
        span = self.theta_end - self.theta_start
        last = self.steps - 1
        return [self.theta_start + j * span / last for j in range(self.steps)]


@dataclass(frozen=True)
class SweepRow:
    theta: float
    variance_a: float
    variance_b: float
    product: float
    robertson: float
    schrodinger: float
    mbp: float
    milne: float
    callebaut: dict[float, float]
    # optimized values, present only for basis_mode == "optimized"
    l1: dict[float, float] | None = None
    l2: float | None = None


def sweep(A, B, state_family: Callable[[float], PureState], spec: SweepSpec) -> list[SweepRow]:
    rows = []
    for theta in spec.thetas():
        psi = state_family(theta)
        rep = full_report(A, B, psi, None, spec.weights)
        l1 = l2 = None
        if spec.basis_mode == "optimized":
            l1 = {w: optimize(A, B, psi, BoundKind.callebaut(w), spec.optimizer).best_value for w in spec.weights}
            l2 = optimize(A, B, psi, BoundKind.milne(), spec.optimizer).best_value
        rows.append(
            SweepRow(
                theta=theta,
                variance_a=rep.variance_a,
                variance_b=rep.variance_b,
                product=rep.product,
                robertson=rep.robertson,
                schrodinger=rep.schrodinger,
                mbp=rep.mbp,
                milne=rep.milne,
                callebaut=dict(rep.callebaut),
                l1=l1,
                l2=l2,
            )
        )
    return rows
