from fractions import Fraction

import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st

from cutpoint.errors.exceptions import DimensionMismatchError, PrecisionExhausted, ValidationError
from cutpoint.kernel.expressions import Const, add, cos, identically_zero, mul, neg, rational_value, sin, sub
from cutpoint.models.automata import QFA
from cutpoint.models.linalg import (
    Matrix,
    StateVector,
    VectorKind,
    characteristic_polynomial,
    is_column_stochastic,
    is_unitary,
    mat_pow,
    mat_vec,
    poly_eval,
    trace,
)
from cutpoint.services.constructions import fixed_rotation, matrix_Bx, matrix_Bxalpha, rotation_from_param

F = Fraction


def values(vector: StateVector):
    return [rational_value(e) for e in vector.entries]


@pytest.mark.unit
class TestMatrix:
    def test_entry_is_one_based(self):
        m = Matrix.from_rows([[1, 2], [3, 4]])
        assert m.entry(1, 2) == Const(F(2))
        assert m.column(1) == (Const(F(1)), Const(F(3)))
        with pytest.raises(DimensionMismatchError):
            m.entry(0, 1)

    def test_square_check(self):
        with pytest.raises(DimensionMismatchError):
            Matrix.from_rows([[1, 2], [3]])
        with pytest.raises(ValidationError):
            Matrix.from_rows([])

    def test_mat_vec(self, rabin):
        state = StateVector.basis(2, 1)
        assert values(mat_vec(rabin.matrices["1"], state)) == [F(1, 2), F(1, 2)]
        with pytest.raises(DimensionMismatchError):
            mat_vec(rabin.matrices["1"], StateVector.basis(3, 1))

    def test_mat_pow(self, rabin):
        cube = mat_pow(rabin.matrices["0"], 3)
        assert cube.exact_equals(Matrix.from_rows([[1, F(7, 8)], [0, F(1, 8)]]))
        assert mat_pow(rabin.matrices["0"], 0).exact_equals(Matrix.identity(2))
        with pytest.raises(ValidationError):
            mat_pow(rabin.matrices["0"], -1)

    def test_trace(self):
        assert rational_value(trace(matrix_Bx(F(1, 4)))) == F(1, 2)


@pytest.mark.unit
class TestStateVector:
    def test_basis_vectors(self):
        v = StateVector.basis(3, 2)
        assert values(v) == [0, 1, 0]
        assert v[2] == Const(F(1))
        with pytest.raises(DimensionMismatchError):
            StateVector.basis(2, 3)

    def test_validate_distribution(self):
        StateVector((F(1, 4), F(3, 4))).validate()
        with pytest.raises(ValidationError):
            StateVector((F(1, 2), F(1, 4))).validate()

    def test_validate_unit_norm(self):
        StateVector((F(3, 5), F(4, 5)), VectorKind.QUANTUM).validate()
        with pytest.raises(ValidationError):
            StateVector((F(1, 2), F(1, 2)), VectorKind.QUANTUM).validate()


@pytest.mark.unit
class TestMatrixPredicates:
    def test_column_stochastic(self, rabin):
        assert is_column_stochastic(rabin.matrices["0"])
        assert is_column_stochastic(matrix_Bx(F(1, 4)))
        assert not is_column_stochastic(Matrix.from_rows([[F(1, 2), 0], [F(1, 3), 1]]))

    def test_scaled_matrix_needs_the_cube(self):
        x, alpha = F(1, 16), F(19, 32)
        base = matrix_Bxalpha(x, alpha)
        assert not is_column_stochastic(base)
        assert is_column_stochastic(mat_pow(base, 3))

    def test_exact_unitary(self):
        assert is_unitary(fixed_rotation().matrix())
        assert not is_unitary(Matrix.from_rows([[1, 1], [0, 1]]))

    def test_symbolic_unitary(self, sqrt2_over_8):
        assert is_unitary(rotation_from_param(sqrt2_over_8).matrix())

    def test_pythagorean_identity_is_exact(self):
        c, s = cos(1), sin(1)
        assert identically_zero(sub(add(mul(c, c), mul(s, s)), 1))
        assert identically_zero(add(mul(c, neg(s)), mul(s, c)))
        assert not identically_zero(sub(cos(1), cos(2)))

    def test_visibly_non_unitary_symbolic_matrix(self):
        c, s = mul(cos(1), 1 + F(1, 2 ** 10)), sin(1)
        assert not is_unitary(Matrix.from_rows([[c, neg(s)], [s, c]]))

    def test_near_unitary_matrix_is_not_accepted(self):
        c, s = mul(cos(1), 1 + F(1, 2 ** 300)), sin(1)
        nearly = Matrix.from_rows([[c, neg(s)], [s, c]])
        with pytest.raises(PrecisionExhausted):
            is_unitary(nearly)
        with pytest.raises(PrecisionExhausted):
            QFA(2, ("0",), {"0": nearly}, accepting={1})

    def test_characteristic_polynomial(self):
        coefficients = characteristic_polynomial(matrix_Bx(F(1, 4)))
        # t^3 - (1 - 2x) t^2 - x t - x
        assert [rational_value(c) for c in coefficients] == [1, F(-1, 2), F(-1, 4), F(-1, 4)]
        assert rational_value(poly_eval(coefficients, 1)) == 0


stochastic_columns = st.fractions(min_value=0, max_value=1, max_denominator=16)


@pytest.mark.property
class TestLinalgProperties:
    @hypothesis_settings(max_examples=50, deadline=None)
    @given(stochastic_columns, stochastic_columns, st.integers(0, 6), st.integers(0, 6))
    def test_power_additivity(self, p, q, a, b):
        m = Matrix.from_rows([[p, q], [1 - p, 1 - q]])
        assert mat_pow(m, a + b).exact_equals(mat_pow(m, a) @ mat_pow(m, b))

    @hypothesis_settings(max_examples=50, deadline=None)
    @given(stochastic_columns, stochastic_columns, st.integers(0, 8))
    def test_powers_stay_stochastic(self, p, q, k):
        m = Matrix.from_rows([[p, q], [1 - p, 1 - q]])
        assert is_column_stochastic(mat_pow(m, k))
