import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from setwise_cd import Quadratic
from setwise_cd.errors import DimensionMismatch
from setwise_cd.objective import quadratic_from_spec, quadratic_to_spec

from oracles import fd_quadratic_gradient


def random_quadratic(rng, d):
    a = rng.standard_normal((d, d))
    return Quadratic(
        a.T @ a + 0.3 * np.eye(d), rng.standard_normal(d), float(rng.standard_normal())
    )


class TestValue:
    def test_unit_scaled_identity(self):
        f = Quadratic.scaled_identity(2, 1.0)  # t' I t
        assert f.value([1.0, 1.0]) == pytest.approx(2.0)

    def test_hot_node_value(self):
        f = Quadratic.scaled_identity(5, 50.0)
        e1 = np.zeros(5)
        e1[0] = 1.0
        assert f.value(e1) == pytest.approx(50.0)

    def test_minimum_value(self):
        rng = np.random.default_rng(0)
        for d in (1, 2, 4):
            f = random_quadratic(rng, d)
            xmin = -f.Q_inv @ f.b
            expected = f.c0 - 0.5 * f.b @ f.Q_inv @ f.b
            assert f.value(xmin) == pytest.approx(expected, abs=1e-12)

    def test_dimension_mismatch(self):
        f = Quadratic.scaled_identity(3, 1.0)
        with pytest.raises(DimensionMismatch):
            f.value([1.0, 2.0])


class TestGradient:
    def test_identity(self):
        f = Quadratic(np.eye(3))
        x = np.array([1.0, -2.0, 0.5])
        assert np.allclose(f.gradient(x), x)

    def test_zero_at_minimum(self):
        rng = np.random.default_rng(1)
        f = random_quadratic(rng, 3)
        assert np.linalg.norm(f.gradient(-f.Q_inv @ f.b)) < 1e-12

    def test_finite_differences(self):
        rng = np.random.default_rng(2)
        for d in (1, 3, 5):
            f = random_quadratic(rng, d)
            x = rng.standard_normal(d)
            fd = fd_quadratic_gradient(f, x)
            assert np.linalg.norm(f.gradient(x) - fd) <= 1e-6 * (
                1 + np.linalg.norm(fd)
            )


class TestConjugate:
    def test_identity_map(self):
        f = Quadratic(np.eye(2))
        y = np.array([0.3, -0.7])
        assert np.allclose(f.conjugate_gradient(y), y)

    def test_scaled_inverse(self):
        f = Quadratic.scaled_identity(2, 50.0)  # Q = 100 I
        y = np.array([10.0, -4.0])
        assert np.allclose(f.conjugate_gradient(y), y / 100.0)

    def test_inversion_identity(self):
        rng = np.random.default_rng(3)
        f = random_quadratic(rng, 3)
        for _ in range(1000):
            x = rng.standard_normal(3)
            assert np.linalg.norm(f.conjugate_gradient(f.gradient(x)) - x) <= 1e-10
            y = rng.standard_normal(3)
            assert np.linalg.norm(f.gradient(f.conjugate_gradient(y)) - y) <= 1e-10

    def test_conjugate_value_halfnormsq(self):
        f = Quadratic(np.eye(2))
        assert f.conjugate_value([2.0, 0.0]) == pytest.approx(2.0)

    def test_conjugate_value_at_b(self):
        rng = np.random.default_rng(4)
        f = random_quadratic(rng, 2)
        assert f.conjugate_value(f.b) == pytest.approx(-f.c0, abs=1e-12)

    def test_fenchel_young_equality(self):
        rng = np.random.default_rng(5)
        f = random_quadratic(rng, 4)
        for _ in range(100):
            x = rng.standard_normal(4)
            y = f.gradient(x)
            assert abs(f.value(x) + f.conjugate_value(y) - y @ x) <= 1e-10

    def test_fenchel_young_inequality(self):
        rng = np.random.default_rng(6)
        f = random_quadratic(rng, 3)
        for _ in range(200):
            x, y = rng.standard_normal(3), rng.standard_normal(3)
            assert f.value(x) + f.conjugate_value(y) >= y @ x - 1e-12


class TestCurvature:
    def test_rayleigh_quotient_bounds(self):
        rng = np.random.default_rng(7)
        f = random_quadratic(rng, 4)
        for _ in range(200):
            u = rng.standard_normal(4)
            u /= np.linalg.norm(u)
            q = u @ f.Q @ u
            assert f.mu - 1e-10 <= q <= f.M_smooth + 1e-10

    def test_scaled_identity_curvature(self):
        f = Quadratic.scaled_identity(3, 50.0)
        assert f.mu == pytest.approx(100.0) and f.M_smooth == pytest.approx(100.0)


@settings(max_examples=50, deadline=None)
@given(
    c=st.floats(min_value=0.1, max_value=100.0),
    coords=st.lists(
        st.floats(min_value=-10, max_value=10, allow_nan=False), min_size=2, max_size=2
    ),
)
def test_conjugate_inversion_property(c, coords):
    f = Quadratic.scaled_identity(2, c)
    x = np.asarray(coords)
    back = f.conjugate_gradient(f.gradient(x))
    assert np.linalg.norm(back - x) <= 1e-9 * (1 + np.linalg.norm(x))


class TestValidation:
    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError, match="symmetric"):
            Quadratic(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError, match="positive definite"):
            Quadratic(np.array([[1.0, 0.0], [0.0, -1.0]]))

    def test_rejects_bad_b(self):
        with pytest.raises(DimensionMismatch):
            Quadratic(np.eye(2), np.ones(3))


def test_spec_roundtrip():
    spec = {"type": "quadratic", "d": 3, "Q": "scaled_identity", "c": 7.5}
    f = quadratic_from_spec(spec)
    assert f.mu == pytest.approx(15.0)
    f2 = quadratic_from_spec(quadratic_to_spec(f))
    assert np.allclose(f2.Q, f.Q) and np.allclose(f2.b, f.b) and f2.c0 == f.c0
