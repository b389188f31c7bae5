"""Dense complex linear algebra for pure states and Hermitian observables.

States, observables and bases are validated once, at construction, and the
wrapped arrays are made read-only. Everything downstream trusts them.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-12
UNITARY_TOL = 1e-10
REAL_TOL = 1e-10
SNAP_TOL = 1e-13


class ValidationError(ValueError):
    """Input violates a construction invariant (hermiticity, norm, unitarity)."""


class DimensionError(ValueError):
    """Operands have incompatible dimensions."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


def _check_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what}: entries must be finite")


class PureState:
    """Unit-norm complex vector."""

    __slots__ = ("_vec",)

    def __init__(self, amplitudes):
        vec = np.asarray(amplitudes, dtype=np.complex128)
        if vec.ndim != 1 or vec.size < 1:
            raise ValidationError(f"state: expected a nonempty 1-d vector, got shape {vec.shape}")
        _check_finite(vec, "state")
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"state: norm is {norm!r}, expected 1 within {NORM_TOL}")
        self._vec = _frozen(vec)

    @classmethod
    def normalized(cls, amplitudes) -> PureState:
        vec = np.asarray(amplitudes, dtype=np.complex128)
        norm = np.linalg.norm(vec)
        if norm == 0.0 or not np.isfinite(norm):
            raise ValidationError("state: cannot normalize a zero or non-finite vector")
        return cls(vec / norm)

    @property
    def vector(self) -> np.ndarray:
        return self._vec

    @property
    def dim(self) -> int:
        return self._vec.shape[0]

    def __repr__(self):
        return f"PureState({self._vec!r})"


class HermitianObservable:
    """n x n complex matrix equal to its conjugate transpose."""

    __slots__ = ("_mat",)

    def __init__(self, entries):
        mat = np.asarray(entries, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 1:
            raise ValidationError(f"observable: expected a square matrix, got shape {mat.shape}")
        _check_finite(mat, "observable")
        dev = np.max(np.abs(mat - mat.conj().T))
        if dev > HERMITIAN_TOL:
            raise ValidationError(
                f"observable: hermiticity violated, max |A - A^dagger| = {dev:.3e} > {HERMITIAN_TOL}"
            )
        self._mat = _frozen(mat)

    @property
    def matrix(self) -> np.ndarray:
        return self._mat

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    def __repr__(self):
        return f"HermitianObservable({self._mat!r})"


class OrthonormalBasis:
    """Unitary matrix; column i is the basis vector phi_i."""

    __slots__ = ("_mat",)

    def __init__(self, columns):
        mat = np.asarray(columns, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 1:
            raise ValidationError(f"basis: expected a square matrix, got shape {mat.shape}")
        _check_finite(mat, "basis")
        n = mat.shape[0]
        dev = np.max(np.abs(mat.conj().T @ mat - np.eye(n)))
        if dev > UNITARY_TOL:
            raise ValidationError(
                f"basis: unitarity violated, max |U^dagger U - I| = {dev:.3e} > {UNITARY_TOL}"
            )
        self._mat = _frozen(mat)

    @classmethod
    def standard(cls, n: int) -> OrthonormalBasis:
        return cls(np.eye(n))

    @property
    def matrix(self) -> np.ndarray:
        return self._mat

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    def __repr__(self):
        return f"OrthonormalBasis({self._mat!r})"


def _require_dims(*objs) -> int:
    dims = {o.dim for o in objs}
    if len(dims) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def _real_part(z: complex, what: str) -> float:
    if abs(z.imag) > REAL_TOL:
        raise ValidationError(f"{what}: imaginary residue {z.imag:.3e} exceeds {REAL_TOL}")
    return float(z.real)


def inner(x, y) -> complex:
    """Return sum_i conj(x_i) y_i (conjugate-linear in ``x``)."""
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    if x.shape != y.shape or x.ndim != 1:
        raise DimensionError(f"inner: shapes {x.shape} and {y.shape} differ")
    return complex(np.vdot(x, y))


def expectation(A: HermitianObservable, psi: PureState) -> float:
    _require_dims(A, psi)
    return _real_part(inner(psi.vector, A.matrix @ psi.vector), "expectation")


def _centered(A: HermitianObservable, psi: PureState) -> tuple[np.ndarray, float]:
    # second value: magnitude scale of the cancellation in A psi - <A> psi
    v = psi.vector
    av = A.matrix @ v
    mean = _real_part(np.vdot(v, av), "expectation")
    return av - mean * v, float(np.linalg.norm(av)) + abs(mean)


def centered_apply(A: HermitianObservable, psi: PureState) -> np.ndarray:
    """Return (A - <A> I)|psi>."""
    _require_dims(A, psi)
    return _centered(A, psi)[0]


def project(u: np.ndarray, centered: np.ndarray, scale) -> np.ndarray:
    """Coordinates ``u^dagger @ centered`` with rounding residue snapped to 0.

    Entries with modulus below ``SNAP_TOL * scale`` are cancellation noise;
    fractional powers in the Callebaut sums would otherwise amplify them.
    """
    out = u.conj().T @ centered
    out[np.abs(out) <= SNAP_TOL * np.asarray(scale)] = 0.0
    return out


def variance(A: HermitianObservable, psi: PureState) -> float:
    c = centered_apply(A, psi)
    return max(float(np.real(np.vdot(c, c))), 0.0)


def amplitudes(A: HermitianObservable, psi: PureState, basis: OrthonormalBasis) -> np.ndarray:
    """Coordinates alpha_i = <phi_i|A_bar|psi> of the centered vector in ``basis``."""
    _require_dims(A, psi, basis)
    c, scale = _centered(A, psi)
    return project(basis.matrix, c, scale)


def commutator_expectation(A: HermitianObservable, B: HermitianObservable, psi: PureState) -> complex:
    _require_dims(A, B, psi)
    a, b = A.matrix, B.matrix
    return inner(psi.vector, (a @ b - b @ a) @ psi.vector)


def anticommutator_expectation(A: HermitianObservable, B: HermitianObservable, psi: PureState) -> float:
    _require_dims(A, B, psi)
    a, b = A.matrix, B.matrix
    return _real_part(inner(psi.vector, (a @ b + b @ a) @ psi.vector), "anticommutator expectation")
