"""Maximize basis-dependent bounds over orthonormal bases.

A basis is parameterized as an ordered product of complex Givens rotations,
one per index pair (i, j), i < j, in lexicographic order. Each rotation has a
mixing angle theta in [0, pi/2] and a phase phi in [0, 2 pi). Column phases
are left out: the bounds only see |alpha_i| and |beta_i|, which they do not
change.

The search is a derivative-free Nelder-Mead simplex with random restarts.
Restart 0 starts from the standard basis, so the optimized value never falls
below the fixed-basis value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .bounds import callebaut_product, check_weight, milne_product
from .qcore import (
    DimensionError,
    HermitianObservable,
    OrthonormalBasis,
    PureState,
    ValidationError,
    _centered,
    project,
    variance,
)

HALF_PI = 0.5 * math.pi
TWO_PI = 2.0 * math.pi
_SEED_MOD = 2**64


def n_rotations(n: int) -> int:
    return n * (n - 1) // 2


def rotation_pairs(n: int) -> list[tuple[int, int]]:
    return list(combinations(range(n), 2))


def _fold_theta(x):
    # triangle wave with period pi: continuous map of R onto [0, pi/2]
    return HALF_PI - np.abs(np.mod(x, math.pi) - HALF_PI)


def canonical_vector(x) -> np.ndarray:
    """Map unconstrained interleaved angles onto theta in [0, pi/2], phi in [0, 2 pi)."""
    x = np.array(x, dtype=np.float64)
    x[0::2] = _fold_theta(x[0::2])
    phis = np.mod(x[1::2], TWO_PI)
    # mod can round up to exactly 2 pi for tiny negative inputs
    phis[phis >= TWO_PI] = 0.0
    x[1::2] = phis
    return x


@dataclass(frozen=True)
class BasisParams:
    """Givens angles for one basis; ``thetas[k]``, ``phis[k]`` belong to pair k."""

    thetas: tuple[float, ...]
    phis: tuple[float, ...]

    def __post_init__(self):
        if len(self.thetas) != len(self.phis):
            raise ValidationError("basis params: thetas and phis differ in length")
        for t in self.thetas:
            if not 0.0 <= t <= HALF_PI:
                raise ValidationError(f"basis params: theta {t} outside [0, pi/2]")
        for p in self.phis:
            if not 0.0 <= p < TWO_PI:
                raise ValidationError(f"basis params: phi {p} outside [0, 2 pi)")

    @property
    def dim(self) -> int:
        k = len(self.thetas)
        n = int(round((1 + math.sqrt(1 + 8 * k)) / 2))
        if n_rotations(n) != k:
            raise ValidationError(f"basis params: {k} rotations is not n(n-1)/2 for any n")
        return n

    @classmethod
    def zeros(cls, n: int) -> BasisParams:
        k = n_rotations(n)
        return cls((0.0,) * k, (0.0,) * k)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> BasisParams:
        k = n_rotations(n)
        thetas = rng.uniform(0.0, HALF_PI, k)
        phis = rng.uniform(0.0, TWO_PI, k)
        return cls(tuple(map(float, thetas)), tuple(map(float, np.mod(phis, TWO_PI))))

    @classmethod
    def from_vector(cls, x) -> BasisParams:
        """Canonicalize an unconstrained vector (theta_1, phi_1, theta_2, ...)."""
        x = canonical_vector(x)
        return cls(tuple(map(float, x[0::2])), tuple(map(float, x[1::2])))

    def to_vector(self) -> np.ndarray:
        x = np.empty(2 * len(self.thetas))
        x[0::2] = self.thetas
        x[1::2] = self.phis
        return x


def _givens_matrix(x: np.ndarray, n: int) -> np.ndarray:
    u = np.eye(n, dtype=np.complex128)
    for k, (i, j) in enumerate(rotation_pairs(n)):
        theta, phi = x[2 * k], x[2 * k + 1]
        c, s = math.cos(theta), math.sin(theta)
        e = complex(math.cos(phi), math.sin(phi))
        ri, rj = u[i].copy(), u[j]
        u[i] = c * ri - e.conjugate() * s * rj
        u[j] = e * s * ri + c * rj
    return u


def unitary_from_params(p: BasisParams, n: int) -> OrthonormalBasis:
    """Product G_K ... G_1 of the Givens rotations applied to the identity.

    G(i, j, theta, phi) acts on coordinates (i, j) as
    [[cos theta, -exp(-i phi) sin theta], [exp(i phi) sin theta, cos theta]].
    """
    if len(p.thetas) != n_rotations(n):
        raise DimensionError(f"expected {n_rotations(n)} rotations for n={n}, got {len(p.thetas)}")
    return OrthonormalBasis(_givens_matrix(p.to_vector(), n))


@dataclass(frozen=True)
class BoundKind:
    """Which bound to maximize: ``callebaut`` (needs a weight) or ``milne``."""

    name: str
    weight: float | None = None

    def __post_init__(self):
        if self.name == "callebaut":
            if self.weight is None:
                raise ValueError("callebaut bound requires a weight")
            object.__setattr__(self, "weight", check_weight(self.weight))
        elif self.name == "milne":
            if self.weight is not None:
                raise ValueError("milne bound takes no weight")
        else:
            raise ValueError(f"unknown bound kind {self.name!r}")

    @classmethod
    def callebaut(cls, weight: float) -> BoundKind:
        return cls("callebaut", weight)

    @classmethod
    def milne(cls) -> BoundKind:
        return cls("milne")

    def evaluate(self, a, b) -> float:
        if self.name == "milne":
            return milne_product(a, b)
        return callebaut_product(a, b, self.weight)

    def __str__(self):
        return "milne" if self.name == "milne" else f"callebaut({self.weight:g})"


class BasisObjective:
    """Bound value as a function of Givens angles, for fixed (A, B, psi)."""

    def __init__(self, A: HermitianObservable, B: HermitianObservable, psi: PureState, kind: BoundKind):
        if not A.dim == B.dim == psi.dim:
            raise DimensionError("observables and state must share a dimension")
        self.n = psi.dim
        self.kind = kind
        (ca, sa), (cb, sb) = _centered(A, psi), _centered(B, psi)
        self.centered = np.column_stack([ca, cb])
        self.scale = np.array([sa, sb])
        self.product = variance(A, psi) * variance(B, psi)

    def from_vector(self, x) -> float:
        u = _givens_matrix(np.asarray(x, dtype=np.float64), self.n)
        mags = np.abs(project(u, self.centered, self.scale))
        return self.kind.evaluate(mags[:, 0], mags[:, 1])

    def __call__(self, p: BasisParams) -> float:
        if len(p.thetas) != n_rotations(self.n):
            raise DimensionError(f"expected {n_rotations(self.n)} rotations for n={self.n}")
        return self.from_vector(p.to_vector())


def objective(p: BasisParams, A, B, psi, kind: BoundKind) -> float:
    return BasisObjective(A, B, psi, kind)(p)


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 16
    max_iterations: int = 2000
    tolerance: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if int(self.restarts) != self.restarts or self.restarts < 1:
            raise ValueError("restarts must be a positive integer")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ValueError("max_iterations must be a positive integer")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not 0 <= self.seed < _SEED_MOD:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class OptResult:
    best_value: float
    best_params: BasisParams
    best_basis: OrthonormalBasis
    evaluations: int
    per_restart_values: tuple[float, ...] = field(default_factory=tuple)


SIMPLEX_STEP = 0.5
DIAMETER_TOL = 1e-9


def nelder_mead(f, x0, max_iterations: int, ftol: float, step: float = SIMPLEX_STEP, xtol: float = DIAMETER_TOL):
    """Minimize ``f`` from ``x0``; returns (x_best, f_best, evaluations).

    Standard coefficients (reflection 1, expansion 2, contraction 1/2,
    shrink 1/2). Stops at max_iterations, or once the simplex diameter drops
    below ``xtol`` or the spread of vertex values drops below ``ftol``.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    dim = x0.size
    simplex = np.vstack([x0, x0 + step * np.eye(dim)])
    fvals = np.array([f(v) for v in simplex])
    nfev = dim + 1
    for _ in range(max_iterations):
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        if fvals[-1] - fvals[0] < ftol:
            break
        if np.max(np.abs(simplex[1:] - simplex[0])) < xtol:
            break
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + (centroid - worst)
        fr = f(xr)
        nfev += 1
        if fr < fvals[0]:
            xe = centroid + 2.0 * (centroid - worst)
            fe = f(xe)
            nfev += 1
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
        elif fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
        else:
            if fr < fvals[-1]:
                xc = centroid + 0.5 * (xr - centroid)
            else:
                xc = centroid + 0.5 * (worst - centroid)
            fc = f(xc)
            nfev += 1
            if fc < min(fr, fvals[-1]):
                simplex[-1], fvals[-1] = xc, fc
            else:
                simplex[1:] = simplex[0] + 0.5 * (simplex[1:] - simplex[0])
                fvals[1:] = [f(v) for v in simplex[1:]]
                nfev += dim
    best = int(np.argmin(fvals))
    return simplex[best], float(fvals[best]), nfev


def _restart_start(n: int, restart: int, seed: int) -> BasisParams:
    if restart == 0:
        return BasisParams.zeros(n)
    rng = np.random.default_rng((seed + restart) % _SEED_MOD)
    return BasisParams.random(n, rng)


def optimize(A, B, psi, kind: BoundKind, cfg: OptimizerConfig | None = None) -> OptResult:
    """Best bound found over ``cfg.restarts`` independent simplex searches."""
    cfg = cfg or OptimizerConfig()
    obj = BasisObjective(A, B, psi, kind)
    n = obj.n
    per_restart = []
    best_value, best_params = -math.inf, None
    evaluations = 0
    for r in range(cfg.restarts):
        start = _restart_start(n, r, cfg.seed)
        if n == 1:
            value, params, nfev = obj(start), start, 1
        else:
            x, _, nfev = nelder_mead(
                lambda v: -obj.from_vector(canonical_vector(v)),
                start.to_vector(),
                cfg.max_iterations,
                cfg.tolerance,
            )
            params = BasisParams.from_vector(x)
            # evaluate at the canonical angles so value and params agree exactly
            value = obj(params)
            nfev += 1
        evaluations += nfev
        per_restart.append(value)
        if value > best_value:
            best_value, best_params = value, params
    return OptResult(
        best_value=best_value,
        best_params=best_params,
        best_basis=unitary_from_params(best_params, n),
        evaluations=evaluations,
        per_restart_values=tuple(per_restart),
    )


def l1_l2_combined(A, B, psi, weights, cfg: OptimizerConfig | None = None) -> float:
    """max over optimized Milne and optimized Callebaut at each weight."""
    weights = [check_weight(w) for w in weights]
    if not weights:
        raise ValueError("weights must be nonempty")
    kinds = [BoundKind.milne()] + [BoundKind.callebaut(w) for w in weights]
    return max(optimize(A, B, psi, k, cfg).best_value for k in kinds)
