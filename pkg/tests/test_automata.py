from fractions import Fraction

import pytest

from cutpoint.errors.exceptions import AlphabetError, DimensionMismatchError, ParameterRangeError, PrecisionExhausted, ValidationError
from cutpoint.kernel.expressions import rational_value
from cutpoint.models.automata import PFA, QFA, CutpointAcceptor
from cutpoint.models.linalg import Matrix
from cutpoint.services.constructions import bin_reverse_oracle, rabin_alpha_pfa, unary_pfa_Bx
from cutpoint.services.simulation import (
    accept_prob,
    accept_prob_pfa,
    accept_prob_qfa,
    certify_member,
    final_state,
    language_slice,
    member,
    member_batch,
    words_up_to,
)

F = Fraction


@pytest.mark.unit
class TestAutomatonValidation:
    def test_matrix_per_symbol(self):
        identity = Matrix.identity(2)
        with pytest.raises(AlphabetError):
            PFA(2, ("0", "1"), {"0": identity}, accepting={1})

    def test_dimension_must_match(self):
        with pytest.raises(DimensionMismatchError):
            PFA(3, ("0",), {"0": Matrix.identity(2)}, accepting={1})

    def test_pfa_needs_stochastic_matrices(self):
        bad = Matrix.from_rows([[F(1, 2), 0], [F(1, 3), 1]])
        with pytest.raises(ValidationError) as exc_info:
            PFA(2, ("0",), {"0": bad}, accepting={1})
        assert not isinstance(exc_info.value, ParameterRangeError)
        assert exc_info.value.details["0"][0]["type"] == "not_stochastic"

    def test_qfa_needs_unitary_matrices(self):
        with pytest.raises(ValidationError) as exc_info:
            QFA(2, ("0",), {"0": Matrix.from_rows([[1, 1], [0, 1]])}, accepting={1})
        assert exc_info.value.details["0"][0]["type"] == "not_unitary"

    def test_accepting_set(self):
        with pytest.raises(ValidationError):
            PFA(2, ("0",), {"0": Matrix.identity(2)}, accepting=set())
        with pytest.raises(ValidationError):
            PFA(2, ("0",), {"0": Matrix.identity(2)}, accepting={3})

    def test_cutpoint_range(self, rabin):
        with pytest.raises(ParameterRangeError):
            CutpointAcceptor.of(rabin, 1)
        with pytest.raises(ParameterRangeError):
            CutpointAcceptor.of(rabin, F(-1, 2))
        assert rational_value(CutpointAcceptor.of(rabin, 0).cutpoint) == 0


@pytest.mark.unit
class TestAcceptanceProbability:
    def test_rabin_examples(self, rabin):
        assert rational_value(accept_prob(rabin, "110")) == F(3, 8)
        assert rational_value(accept_prob(rabin, "")) == 0
        assert rational_value(accept_prob(rabin, "1")) == F(1, 2)

    def test_rabin_matches_reverse_binary(self, rabin):
        for word in words_up_to("01", 6):
            assert rational_value(accept_prob_pfa(rabin, word)) == bin_reverse_oracle(word)

    def test_long_runs_use_powers(self, rabin):
        word = "1" * 40 + "0" * 3
        expected = bin_reverse_oracle(word)
        assert rational_value(accept_prob(rabin, word)) == expected

    def test_scaled_rabin(self):
        pfa = rabin_alpha_pfa(F(1, 3))
        assert rational_value(accept_prob(pfa, "110")) == F(1, 8)

    def test_rotation_qfa(self, fixed_qfa):
        assert rational_value(accept_prob_qfa(fixed_qfa, "")) == 1
        assert rational_value(accept_prob_qfa(fixed_qfa, "0")) == F(9, 25)
        # cos(2t) = 9/25 - 16/25
        assert rational_value(accept_prob_qfa(fixed_qfa, "00")) == F(49, 625)

    def test_unary_bx_first_steps(self):
        pfa = unary_pfa_Bx(F(1, 4))
        assert rational_value(accept_prob(pfa, "")) == 0
        assert rational_value(accept_prob(pfa, "0")) == 0
        assert rational_value(accept_prob(pfa, "00")) == 1

    def test_wrong_automaton_kind(self, rabin, fixed_qfa):
        with pytest.raises(ValidationError):
            accept_prob_qfa(rabin, "1")
        with pytest.raises(ValidationError):
            accept_prob_pfa(fixed_qfa, "0")

    def test_alphabet_is_checked(self, rabin, fixed_qfa):
        with pytest.raises(AlphabetError):
            final_state(rabin, "012")
        with pytest.raises(AlphabetError):
            accept_prob(fixed_qfa, "1")

    def test_final_state_is_a_distribution(self, rabin):
        final_state(rabin, "0110").validate()


@pytest.mark.unit
class TestMembership:
    def test_member_examples(self, rabin_half):
        assert member(rabin_half, "11")
        assert not member(rabin_half, "10")

    def test_probability_equal_to_cutpoint(self, rabin_half):
        with pytest.raises(PrecisionExhausted) as exc_info:
            member(rabin_half, "1")
        assert exc_info.value.message == "probability equals cutpoint"
        assert exc_info.value.details["word"] == "1"

    def test_qfa_probability_equal_to_cutpoint(self, fixed_qfa):
        acc = CutpointAcceptor.of(fixed_qfa, F(9, 25))
        with pytest.raises(PrecisionExhausted) as exc_info:
            member(acc, "0")
        assert exc_info.value.message == "probability equals cutpoint"

    def test_monotone_in_cutpoint(self, rabin):
        low = CutpointAcceptor.of(rabin, F(5, 32))
        high = CutpointAcceptor.of(rabin, F(27, 32))
        for word in ("011", "111", "0101", "1011"):
            if member(high, word):
                assert member(low, word)

    def test_certified_evidence(self, rabin_half):
        evidence = certify_member(rabin_half, "11")
        assert evidence.verdict
        assert evidence.enclosure.is_exact
        assert evidence.enclosure.lower == F(3, 4)

    def test_member_batch_keeps_order(self, rabin_half):
        words = ["11", "10", "011", "111", "0"]
        assert member_batch(rabin_half, words) == [True, False, True, True, False]

    def test_words_up_to(self):
        assert words_up_to("01", 2) == ["", "0", "1", "00", "01", "10", "11"]

    def test_language_slice(self, rabin):
        acc = CutpointAcceptor.of(rabin, F(11, 16))
        assert language_slice(acc, 3) == ["11", "011", "111"]
        with pytest.raises(ValidationError):
            language_slice(acc, -1)
