"""Lower bounds on the variance product (Delta A)^2 (Delta B)^2.

Basis-free bounds (Robertson, Schrodinger) take the observables and state
directly. The basis-dependent ones are evaluated from the magnitudes of the
centered amplitudes, so the inequality kernels ``callebaut_product`` and
``milne_product`` are plain functions of two nonnegative real sequences.

Zero conventions: ``0**0 == 1`` and ``0**x == 0`` for ``x > 0``; a Milne
term with ``a_i == b_i == 0`` contributes nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qcore import (
    DimensionError,
    HermitianObservable,
    OrthonormalBasis,
    PureState,
    amplitudes,
    anticommutator_expectation,
    commutator_expectation,
    expectation,
    variance,
)

UPPER_TOL = 1e-8


def _magnitudes(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or a.shape != b.shape:
        raise DimensionError(f"magnitude vectors have shapes {a.shape} and {b.shape}")
    if np.any(a < 0) or np.any(b < 0) or not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("magnitude vectors must be finite and nonnegative")
    return a, b


def check_weight(lam: float) -> float:
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"weight must lie in [0, 1], got {lam}")
    return lam


def callebaut_product(a, b, lam: float) -> float:
    """Weighted Callebaut product sum a^(1+l) b^(1-l) * sum a^(1-l) b^(1+l)."""
    a, b = _magnitudes(a, b)
    lam = check_weight(lam)
    # numpy already follows 0**0 == 1 and 0**x == 0 for x > 0
    s1 = np.sum(a ** (1.0 + lam) * b ** (1.0 - lam))
    s2 = np.sum(a ** (1.0 - lam) * b ** (1.0 + lam))
    return float(s1 * s2)


def milne_product(a, b) -> float:
    """Milne product sum (a^2 + b^2) * sum a^2 b^2 / (a^2 + b^2)."""
    a, b = _magnitudes(a, b)
    a2, b2 = a * a, b * b
    total = a2 + b2
    nz = total > 0
    harmonic = np.sum(a2[nz] * b2[nz] / total[nz])
    return float(np.sum(total) * harmonic)


def robertson_bound(A: HermitianObservable, B: HermitianObservable, psi: PureState) -> float:
    return 0.25 * abs(commutator_expectation(A, B, psi)) ** 2


def schrodinger_bound(A: HermitianObservable, B: HermitianObservable, psi: PureState) -> float:
    """Robertson term plus the squared symmetrized covariance.

    Uses the covariance 1/2 <{A, B}> - <A><B>.
    """
    cov = 0.5 * anticommutator_expectation(A, B, psi) - expectation(A, psi) * expectation(B, psi)
    return robertson_bound(A, B, psi) + cov * cov


def mbp_bound(A, B, psi, basis: OrthonormalBasis) -> float:
    """Mondal-Bagchi-Pati bound in amplitude form, (sum_n |alpha_n| |beta_n|)^2."""
    a = np.abs(amplitudes(A, psi, basis))
    b = np.abs(amplitudes(B, psi, basis))
    return float(np.sum(a * b) ** 2)


def mbp_bound_literal(A, B, psi, basis: OrthonormalBasis) -> float:
    """Mondal-Bagchi-Pati bound built from the projected operators.

    For each basis vector phi_n forms B_n = |phi_n><phi_n| B_bar and sums
    |<[A_bar, B_n]> + <{A_bar, B_n}>| over n before squaring and dividing by 4.
    """
    n = psi.dim
    if not A.dim == B.dim == basis.dim == n:
        raise DimensionError("observables, state and basis must share a dimension")
    eye = np.eye(n)
    a_bar = A.matrix - expectation(A, psi) * eye
    b_bar = B.matrix - expectation(B, psi) * eye
    v = psi.vector
    total = 0.0
    for k in range(n):
        phi = basis.matrix[:, k]
        b_n = np.outer(phi, phi.conj()) @ b_bar
        comm = a_bar @ b_n - b_n @ a_bar
        anti = a_bar @ b_n + b_n @ a_bar
        total += abs(np.vdot(v, comm @ v) + np.vdot(v, anti @ v))
    return 0.25 * total * total


@dataclass(frozen=True)
class BoundReport:
    variance_a: float
    variance_b: float
    product: float
    robertson: float
    schrodinger: float
    mbp: float
    callebaut: dict[float, float] = field(default_factory=dict)
    milne: float = 0.0
    combined: float = 0.0

    def bound_values(self) -> dict[str, float]:
        out = {
            "robertson": self.robertson,
            "schrodinger": self.schrodinger,
            "mbp": self.mbp,
            "milne": self.milne,
            "combined": self.combined,
        }
        for lam, val in self.callebaut.items():
            out[f"callebaut_{lam:.6f}"] = val
        return out

    def violations(self, tol: float = UPPER_TOL) -> list[str]:
        """Names of fields breaking the report invariants (empty when sound)."""
        bad = [k for k, v in self.bound_values().items() if v > self.product + tol or v < 0]
        bad += [k for k in ("variance_a", "variance_b", "product") if getattr(self, k) < 0]
        return bad


def _amplitude_magnitudes(A, B, psi, basis) -> tuple[np.ndarray, np.ndarray]:
    return np.abs(amplitudes(A, psi, basis)), np.abs(amplitudes(B, psi, basis))


def combined_bound(A, B, psi, basis: OrthonormalBasis, weights) -> float:
    weights = [check_weight(w) for w in weights]
    if not weights:
        raise ValueError("weights must be nonempty")
    a, b = _amplitude_magnitudes(A, B, psi, basis)
    return max([callebaut_product(a, b, w) for w in weights] + [milne_product(a, b)])


def full_report(A, B, psi, basis: OrthonormalBasis | None = None, weights=(1 / 3, 0.5)) -> BoundReport:
    if basis is None:
        basis = OrthonormalBasis.standard(psi.dim)
    weights = sorted({check_weight(w) for w in weights})
    if not weights:
        raise ValueError("weights must be nonempty")
    va, vb = variance(A, psi), variance(B, psi)
    a, b = _amplitude_magnitudes(A, B, psi, basis)
    callebaut = {w: callebaut_product(a, b, w) for w in weights}
    milne = milne_product(a, b)
    return BoundReport(
        variance_a=va,
        variance_b=vb,
        product=va * vb,
        robertson=robertson_bound(A, B, psi),
        schrodinger=schrodinger_bound(A, B, psi),
        mbp=float(np.sum(a * b) ** 2),
        callebaut=callebaut,
        milne=milne,
        combined=max(max(callebaut.values()), milne),
    )


__all__ = [
    "BoundReport",
    "callebaut_product",
    "check_weight",
    "combined_bound",
    "full_report",
    "mbp_bound",
    "mbp_bound_literal",
    "milne_product",
    "robertson_bound",
    "schrodinger_bound",
]
