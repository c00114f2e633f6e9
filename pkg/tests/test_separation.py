from fractions import Fraction

import pytest

from cutpoint.errors.exceptions import DigitBudgetExhausted, ParameterRangeError, ScanBudgetExhausted
from cutpoint.kernel.certify import Sign, certified_sign
from cutpoint.kernel.digits import IrrationalParam
from cutpoint.services.constructions import bin_reverse_oracle, fixed_rotation
from cutpoint.services.separation import (
    FIXED,
    QUADRANT_TABLE,
    VARIABLE,
    angle_drift_bounds,
    find_density_witness,
    first_diff_digit,
    qfa_density_witness,
    qfa_quadrant_witness,
    rabin_cutpoint_separation,
    scaled_pair_separation,
    unary_pfa_witness,
)
from cutpoint.services.verification import quadrant_pair

F = Fraction


@pytest.mark.unit
class TestDensityWitness:
    @pytest.mark.parametrize(
        "lambda1, lambda2, expected",
        [
            (F(5, 8), F(3, 4), "1101"),
            (F(3, 10), F(7, 10), "1"),
            (F(0), F(1), "1"),
            (F(1, 4), F(1, 2), "110"),
        ],
    )
    def test_examples(self, lambda1, lambda2, expected):
        z = find_density_witness(lambda1, lambda2)
        assert z == expected
        assert lambda1 < bin_reverse_oracle(z) < lambda2

    def test_bounds_must_be_ordered(self):
        with pytest.raises(ParameterRangeError):
            find_density_witness(F(1, 2), F(1, 2))


@pytest.mark.unit
class TestBinaryPfaSeparation:
    def test_scaled_pair(self):
        certificate = scaled_pair_separation(F(1, 4), F(1, 3), F(2, 3))
        assert certificate.word == "1"
        assert certificate.verdicts == (True, False)
        assert certificate.unary_length is None

    def test_scaled_pair_needs_lambda_below_alpha1(self):
        with pytest.raises(ParameterRangeError):
            scaled_pair_separation(F(1, 2), F(3, 10), F(7, 10))

    def test_two_cutpoints(self):
        certificate = rabin_cutpoint_separation(F(1, 4), F(1, 2))
        assert certificate.word == "110"
        assert certificate.verdicts == (True, False)
        assert certificate.enclosures[0].lower == F(3, 8)

    def test_summary_is_printable(self):
        summary = rabin_cutpoint_separation(F(5, 8), F(3, 4)).summary()
        assert summary["word"] == "1101"
        assert summary["cutpoints"] == ["5/8", "3/4"]
        assert summary["verdicts"] == [True, False]


@pytest.mark.unit
class TestDigits:
    def test_first_difference(self, sqrt2_over_8, sqrt3_over_8):
        context = first_diff_digit(sqrt2_over_8, sqrt3_over_8)
        assert context.j == 4
        assert (context.alpha_prev2, context.alpha_prev1) == (0, 1)
        assert (context.alpha_j, context.beta_j) == (0, 1)

    def test_equal_parameters_exhaust_the_budget(self, sqrt2_over_8):
        with pytest.raises(DigitBudgetExhausted):
            first_diff_digit(sqrt2_over_8, sqrt2_over_8, max_index=64)

    def test_rational_parameters_are_rejected(self, sqrt2_over_8):
        with pytest.raises(ParameterRangeError):
            first_diff_digit(IrrationalParam.rational(F(1, 8)), sqrt2_over_8)

    def test_parameters_must_be_below_a_quarter(self, sqrt2_over_8):
        with pytest.raises(ParameterRangeError):
            first_diff_digit(IrrationalParam.with_prefix("01", 2), sqrt2_over_8)


@pytest.mark.unit
class TestQfaSeparation:
    def test_quadrant_witness(self, sqrt2_over_8, sqrt3_over_8):
        certificate = qfa_quadrant_witness(sqrt2_over_8, sqrt3_over_8)
        assert certificate.unary_length == 2
        assert certificate.quadrant.quadrant == 2
        assert certificate.verdicts == (False, True)
        assert certificate.input_word() == "00"

    @pytest.mark.parametrize("prev2, prev1", [(0, 0), (0, 1), (1, 0), (1, 1)])
    @pytest.mark.parametrize("alpha_digit", [0, 1])
    def test_quadrant_table(self, prev2, prev1, alpha_digit):
        alpha, beta = quadrant_pair(6, prev2, prev1, alpha_digit)
        certificate = qfa_quadrant_witness(alpha, beta)
        quadrant = 1 + 2 * prev2 + prev1
        expected = QUADRANT_TABLE[quadrant]
        if alpha_digit == 0:
            expected = (expected[1], expected[0])
        assert certificate.quadrant.context.j == 6
        assert certificate.quadrant.quadrant == quadrant
        assert certificate.unary_length == 8
        assert certificate.verdicts == expected

    def test_quadrant_pair_needs_room_for_the_digits(self):
        with pytest.raises(ValueError):
            quadrant_pair(4, 0, 1, 1)

    def test_density_witness(self, sqrt2_over_8):
        assert qfa_density_witness(fixed_rotation(), F(1, 4), F(1, 2)) == 1
        assert qfa_density_witness(sqrt2_over_8, F(1, 4), F(1, 2)) == 2

    def test_density_scan_cap(self):
        with pytest.raises(ScanBudgetExhausted):
            qfa_density_witness(fixed_rotation(), F(1, 4), F(1, 2), scan_cap=0)


@pytest.mark.unit
class TestUnaryPfaSeparation:
    def test_drift_bounds(self):
        bounds = angle_drift_bounds(F(1, 4), F(1, 2))
        assert bounds.holds
        assert certified_sign(bounds.drift) is Sign.POSITIVE
        assert angle_drift_bounds(F(1, 100), F(1, 20), FIXED).holds

    def test_variable_cutpoint_witness(self):
        certificate = unary_pfa_witness(F(1, 4), F(1, 2), VARIABLE)
        assert certificate.verdicts[0] != certificate.verdicts[1]
        assert certificate.bracket_m is not None
        assert certificate.unary_length >= 1

    @pytest.mark.slow
    def test_fixed_cutpoint_witness(self):
        certificate = unary_pfa_witness(F(1, 100), F(1, 20), FIXED)
        assert certificate.verdicts[0] != certificate.verdicts[1]
        assert certificate.cutpoints[0] == certificate.cutpoints[1]

    def test_equal_parameters(self):
        with pytest.raises(ParameterRangeError):
            unary_pfa_witness(F(1, 4), F(1, 4))

    def test_fixed_mode_range(self):
        with pytest.raises(ParameterRangeError):
            unary_pfa_witness(F(1, 20), F(1, 10), FIXED)

    def test_unknown_mode(self):
        with pytest.raises(ParameterRangeError):
            angle_drift_bounds(F(1, 4), F(1, 2), "sideways")
