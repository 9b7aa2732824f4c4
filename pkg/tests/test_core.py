import numpy as np
import pytest

from hashinfer.core import (
    CodeMatrix,
    DenseMatrix,
    DimensionError,
    SolverReport,
    SymmetricMatrix,
    quadratic_form,
    symmetrize,
)


class TestDenseMatrix:
    def test_shape_properties(self):
        m = DenseMatrix(np.arange(6.0).reshape(2, 3))
        assert m.rows == 2
        assert m.cols == 3

    def test_rejects_non_2d(self):
        with pytest.raises(DimensionError):
            DenseMatrix(np.ones(3))

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            DenseMatrix(np.array([[1.0, np.nan]]))

    def test_rejects_inf(self):
        with pytest.raises(ValueError):
            DenseMatrix(np.array([[np.inf, 0.0]]))

    def test_immutable(self):
        m = DenseMatrix(np.ones((2, 2)))
        with pytest.raises(ValueError):
            m.data[0, 0] = 5.0

    def test_copies_input(self):
        src = np.ones((2, 2))
        m = DenseMatrix(src)
        src[0, 0] = 7.0
        assert m.data[0, 0] == 1.0


class TestSymmetricMatrix:
    def test_exact_symmetry_after_averaging(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            a = rng.standard_normal((7, 7))
            s = SymmetricMatrix(a)
            assert np.max(np.abs(s.data - s.data.T)) == 0.0

    def test_averaging_value(self):
        s = SymmetricMatrix(np.array([[1.0, 2.0], [4.0, 3.0]]))
        np.testing.assert_array_equal(s.data, [[1.0, 3.0], [3.0, 3.0]])

    def test_rejects_non_square(self):
        with pytest.raises(DimensionError):
            SymmetricMatrix(np.ones((2, 3)))

    def test_symmetric_input_unchanged(self):
        a = np.array([[2.0, -1.0], [-1.0, 5.0]])
        np.testing.assert_array_equal(SymmetricMatrix(a).data, a)


class TestCodeMatrix:
    def test_accepts_signs(self):
        z = CodeMatrix(np.array([[1, -1], [-1, 1]]))
        assert z.bits == 2
        assert z.samples == 2
        assert z.codes.dtype == np.int8

    def test_rejects_zero_entry(self):
        with pytest.raises(ValueError):
            CodeMatrix(np.array([[1, 0], [-1, 1]]))

    def test_rejects_other_values(self):
        with pytest.raises(ValueError):
            CodeMatrix(np.array([[2, -1]]))

    def test_accepts_float_signs(self):
        z = CodeMatrix(np.array([[1.0, -1.0]]))
        np.testing.assert_array_equal(z.codes, [[1, -1]])

    def test_as_float(self):
        z = CodeMatrix(np.array([[1, -1]]))
        f = z.as_float()
        assert f.dtype == np.float64
        np.testing.assert_array_equal(f, [[1.0, -1.0]])

    def test_rejects_empty(self):
        with pytest.raises(DimensionError):
            CodeMatrix(np.ones((0, 3)))


class TestSymmetrize:
    def test_fixture(self):
        m = DenseMatrix(np.array([[0.0, 2.0], [4.0, 6.0]]))
        s = symmetrize(m)
        np.testing.assert_array_equal(s.data, [[0.0, 3.0], [3.0, 6.0]])

    def test_plain_array_input(self):
        s = symmetrize(np.array([[1.0, 1.0], [3.0, 1.0]]))
        np.testing.assert_array_equal(s.data, [[1.0, 2.0], [2.0, 1.0]])

    def test_non_square_rejected(self):
        with pytest.raises(DimensionError):
            symmetrize(np.ones((1, 2)))


class TestQuadraticForm:
    def test_matches_scalar_expansion(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            n = int(rng.integers(1, 9))
            a = SymmetricMatrix(rng.standard_normal((n, n)))
            x = rng.standard_normal(n)
            ref = sum(a.data[i, j] * x[i] * x[j] for i in range(n) for j in range(n))
            np.testing.assert_allclose(quadratic_form(a, x), ref, rtol=1e-12, atol=1e-12)

    def test_dimension_mismatch(self):
        a = SymmetricMatrix(np.eye(3))
        with pytest.raises(DimensionError):
            quadratic_form(a, np.ones(4))


class TestSolverReport:
    def test_fields(self):
        r = SolverReport(objective=-1.0, iterations=3, feasibility_violation=0.0,
                         wall_time=0.01, converged=True)
        assert r.detail == {}

    def test_rejects_negative_iterations(self):
        with pytest.raises(ValueError):
            SolverReport(objective=0.0, iterations=-1, feasibility_violation=0.0,
                         wall_time=0.0, converged=False)

    def test_rejects_negative_violation(self):
        with pytest.raises(ValueError):
            SolverReport(objective=0.0, iterations=0, feasibility_violation=-0.1,
                         wall_time=0.0, converged=False)
