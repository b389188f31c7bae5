import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varbound.basisopt import (
    BasisObjective,
    BasisParams,
    BoundKind,
    OptimizerConfig,
    canonical_vector,
    l1_l2_combined,
    nelder_mead,
    objective,
    optimize,
    unitary_from_params,
)
from varbound.bounds import callebaut_product, milne_product
from varbound.qcore import DimensionError, HermitianObservable, OrthonormalBasis, PureState, ValidationError, amplitudes
from varbound.scenarios import pauli_operators, random_hermitian, random_state, theta_state

FAST = OptimizerConfig(restarts=4, max_iterations=400)


class TestParams:
    def test_zero_params_identity(self):
        np.testing.assert_array_equal(unitary_from_params(BasisParams.zeros(4), 4).matrix, np.eye(4))

    def test_single_real_rotation(self):
        u = unitary_from_params(BasisParams((math.pi / 4,), (0.0,)), 2).matrix
        c = 1 / math.sqrt(2)
        np.testing.assert_allclose(u, [[c, -c], [c, c]], atol=1e-15)

    @pytest.mark.parametrize("seed", range(10))
    def test_random_params_unitary(self, seed):
        p = BasisParams.random(3, np.random.default_rng(seed))
        u = unitary_from_params(p, 3).matrix
        np.testing.assert_allclose(u.conj().T @ u, np.eye(3), atol=1e-10)

    def test_count_mismatch(self):
        with pytest.raises(DimensionError):
            unitary_from_params(BasisParams.zeros(3), 4)

    def test_range_validation(self):
        with pytest.raises(ValidationError):
            BasisParams((2.0,), (0.0,))
        with pytest.raises(ValidationError):
            BasisParams((0.1,), (7.0,))

    @given(st.lists(st.floats(-50, 50), min_size=6, max_size=6))
    def test_canonical_wrapping_in_range(self, xs):
        p = BasisParams.from_vector(xs)
        assert len(p.thetas) == 3 and p.dim == 3
        np.testing.assert_array_equal(p.to_vector(), canonical_vector(xs))


class TestObjective:
    def test_zero_params_match_bounds(self, spin1, psi_pi4):
        lx, ly, _ = spin1
        a = np.abs(amplitudes(lx, psi_pi4, OrthonormalBasis.standard(3)))
        b = np.abs(amplitudes(ly, psi_pi4, OrthonormalBasis.standard(3)))
        zero = BasisParams.zeros(3)
        assert objective(zero, lx, ly, psi_pi4, BoundKind.milne()) == milne_product(a, b)
        assert objective(zero, lx, ly, psi_pi4, BoundKind.callebaut(0.5)) == callebaut_product(a, b, 0.5)
        assert objective(zero, lx, ly, psi_pi4, BoundKind.milne()) == pytest.approx(0.125, abs=1e-12)

    def test_theta0_bounded_by_product(self, spin1):
        lx, ly, _ = spin1
        psi = theta_state(0.0)
        kind = BoundKind.callebaut(0.5)
        assert objective(BasisParams.zeros(3), lx, ly, psi, kind) == pytest.approx(0.25, abs=1e-12)
        rng = np.random.default_rng(0)
        for _ in range(200):
            assert objective(BasisParams.random(3, rng), lx, ly, psi, kind) <= 0.25 + 1e-8

    def test_phase_invariance(self, spin1, psi_pi4):
        lx, ly, _ = spin1
        obj = BasisObjective(lx, ly, psi_pi4, BoundKind.callebaut(1 / 3))
        res = optimize(lx, ly, psi_pi4, BoundKind.callebaut(1 / 3), FAST)
        u = res.best_basis.matrix
        rng = np.random.default_rng(5)
        for _ in range(10):
            twirled = OrthonormalBasis(u * np.exp(1j * rng.uniform(0, 2 * np.pi, 3)))
            a = np.abs(amplitudes(lx, psi_pi4, twirled))
            b = np.abs(amplitudes(ly, psi_pi4, twirled))
            assert callebaut_product(a, b, 1 / 3) == pytest.approx(obj(res.best_params), abs=1e-12)

    def test_continuity(self):
        rng = np.random.default_rng(3)
        for seed in range(20):
            A, B, psi = random_hermitian(3, seed), random_hermitian(3, seed + 50), random_state(3, seed + 99)
            obj = BasisObjective(A, B, psi, BoundKind.callebaut(0.5))
            x = canonical_vector(rng.uniform(0.2, 1.3, 6))
            assert abs(obj.from_vector(x + 1e-7 * rng.standard_normal(6)) - obj.from_vector(x)) < 1e-4

    def test_kind_validation(self):
        with pytest.raises(ValueError):
            BoundKind("callebaut")
        with pytest.raises(ValueError):
            BoundKind("milne", 0.5)
        with pytest.raises(ValueError):
            BoundKind("entropic")


def test_nelder_mead_quadratic():
    x, fx, nfev = nelder_mead(lambda v: float(np.sum((v - [1.0, -2.0]) ** 2)), [0.0, 0.0], 2000, 1e-14)
    np.testing.assert_allclose(x, [1.0, -2.0], atol=1e-6)
    assert fx < 1e-12 and nfev > 3


class TestOptimize:
    def test_tight_theta0(self, spin1):
        res = optimize(spin1[0], spin1[1], theta_state(0.0), BoundKind.callebaut(0.5))
        assert res.best_value == pytest.approx(0.25, abs=1e-6)

    def test_pi4_milne(self, spin1, psi_pi4):
        res = optimize(spin1[0], spin1[1], psi_pi4, BoundKind.milne(), FAST)
        assert 0.125 <= res.best_value <= 0.1875 + 1e-8
        assert res.per_restart_values[0] >= 0.125 - 1e-12

    def test_degenerate_pauli(self):
        X, _, Z = pauli_operators()
        res = optimize(X, Z, PureState([1, 0]), BoundKind.milne(), FAST)
        assert res.best_value == 0.0

    def test_result_invariants(self, spin1, psi_pi4):
        res = optimize(spin1[0], spin1[1], psi_pi4, BoundKind.callebaut(0.5), FAST)
        assert res.best_value == max(res.per_restart_values)
        assert len(res.per_restart_values) == FAST.restarts
        obj = BasisObjective(spin1[0], spin1[1], psi_pi4, BoundKind.callebaut(0.5))
        assert obj(res.best_params) == res.best_value
        np.testing.assert_allclose(res.best_basis.matrix, unitary_from_params(res.best_params, 3).matrix)

    def test_determinism(self, spin1, psi_pi4):
        r1 = optimize(spin1[0], spin1[1], psi_pi4, BoundKind.milne(), FAST)
        r2 = optimize(spin1[0], spin1[1], psi_pi4, BoundKind.milne(), FAST)
        assert r1.best_value == r2.best_value
        assert r1.evaluations == r2.evaluations
        assert r1.best_params == r2.best_params
        assert r1.per_restart_values == r2.per_restart_values

    def test_more_restarts_never_worse(self):
        A, B, psi = random_hermitian(3, 1), random_hermitian(3, 2), random_state(3, 3)
        kind = BoundKind.callebaut(0.3)
        few = optimize(A, B, psi, kind, OptimizerConfig(restarts=2, max_iterations=300))
        many = optimize(A, B, psi, kind, OptimizerConfig(restarts=5, max_iterations=300))
        assert many.per_restart_values[:2] == few.per_restart_values
        assert many.best_value >= few.best_value

    def test_soundness_of_every_evaluation(self, monkeypatch):
        A, B, psi = random_hermitian(3, 7), random_hermitian(3, 8), random_state(3, 9)
        seen = []
        orig = BasisObjective.from_vector

        def spy(self, x):
            v = orig(self, x)
            seen.append((v, self.product))
            return v

        monkeypatch.setattr(BasisObjective, "from_vector", spy)
        optimize(A, B, psi, BoundKind.milne(), FAST)
        assert seen and all(v <= p + 1e-8 for v, p in seen)

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            OptimizerConfig(restarts=0)
        with pytest.raises(ValueError):
            OptimizerConfig(tolerance=0)
        with pytest.raises(ValueError):
            OptimizerConfig(seed=-1)

    def test_dimension_mismatch(self, spin1):
        with pytest.raises(DimensionError):
            optimize(spin1[0], spin1[1], PureState([1, 0]), BoundKind.milne(), FAST)

    def test_one_dimensional(self):
        A = HermitianObservable([[2.0]])
        res = optimize(A, A, PureState([1.0]), BoundKind.milne(), FAST)
        assert res.best_value == 0.0


class TestCombined:
    def test_theta0(self, spin1):
        assert l1_l2_combined(spin1[0], spin1[1], theta_state(0.0), [0.5], FAST) == pytest.approx(0.25, abs=1e-6)

    def test_pi4(self, spin1, psi_pi4):
        v = l1_l2_combined(spin1[0], spin1[1], psi_pi4, [1 / 3, 0.5], FAST)
        assert 0.125 <= v <= 0.1875 + 1e-8

    def test_identity(self):
        I = HermitianObservable(np.eye(3))
        assert l1_l2_combined(I, I, theta_state(0.4), [0.5], FAST) == 0.0
