"""
Full claims suite. Slow: run with `pytest -m acceptance`.
"""
from fractions import Fraction

import pytest

from cutpoint.errors.exceptions import PrecisionExhausted
from cutpoint.kernel.expressions import rational_value
from cutpoint.models.automata import CutpointAcceptor
from cutpoint.services.constructions import bin_reverse_oracle, rabin_pfa
from cutpoint.services.simulation import accept_prob_pfa, member, words_up_to
from cutpoint.services.verification import CLAIMS, FIXED_PAIRS, VARIABLE_PAIRS, interval_claims, run_claim, run_claims

F = Fraction


@pytest.mark.acceptance
@pytest.mark.slow
class TestClaimsSuite:
    @pytest.mark.parametrize("name", sorted(CLAIMS))
    def test_claim_passes(self, name):
        result = run_claim(name, quick=False)
        assert result.passed, result.detail
        assert result.checked > 0

    def test_rabin_identity_covers_all_words(self):
        automaton = rabin_pfa()
        words = words_up_to("01", 12)
        assert len(words) == 8191
        for word in words:
            assert rational_value(accept_prob_pfa(automaton, word)) == bin_reverse_oracle(word)

    def test_quadrant_table_size(self):
        assert run_claim("quadrant-table").checked >= 50

    def test_drift_bounds_cover_twenty_pairs_per_mode(self):
        result = run_claim("drift-bounds")
        assert result.passed, result.detail
        assert result.checked == 40

    def test_boundary_honesty(self):
        with pytest.raises(PrecisionExhausted):
            member(CutpointAcceptor.of(rabin_pfa(), F(1, 2)), "1")


@pytest.mark.unit
class TestQuickClaims:
    def test_quick_suite_runs_every_claim(self):
        results = run_claims(quick=True, names=["rabin-identity", "displayed-cube", "primed-scaling"])
        assert [r.name for r in results] == ["rabin-identity", "displayed-cube", "primed-scaling"]
        assert all(r.passed for r in results)

    def test_drift_pairs_lie_in_their_ranges(self):
        assert len(set(VARIABLE_PAIRS)) == len(set(FIXED_PAIRS)) == 20
        assert all(0 < x1 < x2 <= F(1, 2) for x1, x2 in VARIABLE_PAIRS)
        assert all(0 < x1 < x2 < F(1, 10) for x1, x2 in FIXED_PAIRS)

    def test_interval_claims(self):
        assert all(interval_claims(F(1, 20)).values())
        assert set(interval_claims(F(1, 20))) == {"theta", "gamma", "theta_small_x", "gamma_small_x"}
        assert set(interval_claims(F(1, 4))) == {"theta", "gamma"}
        assert interval_claims(F(1, 2))["theta"]
