import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pressvote.core import HistoryLedger, RoundOutcome
from pressvote.errors import ConfigurationError, DomainError, ValidationError
from pressvote.trust import (BeliefReport, TrustParams, assign_peers, beta,
                             clip, cold_start_belief, expected_trust_components,
                             ic_check, posterior_belief, prior_belief, raw_score,
                             score_w, trustworthiness)


def ledger_from_history(ci, cr, ej):
    """Two-voter, one-candidate-of-interest ledger with given per-round
    choice flags for voters 0 (i) and 1 (r) on candidate 0 and election
    flags for candidate 0. Candidate count padded to keep K=1 exact."""
    rounds = len(ci)
    ledger = HistoryLedger(2, 3, 1)
    for k in range(1, rounds + 1):
        choices = np.zeros((2, 3), dtype=np.uint8)
        choices[0, 0] = ci[k - 1]
        choices[1, 0] = cr[k - 1]
        choices[0, 1] = 1 - ci[k - 1]
        choices[1, 1] = 1 - cr[k - 1]
        elected = np.zeros(3, dtype=bool)
        elected[0 if ej[k - 1] else 2] = True
        outcome = RoundOutcome(k, np.zeros(3), elected, np.zeros(3, dtype=bool),
                               np.zeros(2))
        ledger.append_round(outcome, choices, np.ones((2, 3)), np.zeros((2, 3)))
    return ledger


class TestPriorBelief:
    def test_hand_example(self):
        # c_i=[1,1,0], c_r=[1,1,0]: smoothed conditionals 3/4 and 1/3
        ledger = ledger_from_history([1, 1, 0], [1, 1, 0], [1, 1, 1])
        y = prior_belief(ledger, 0, 1, 0, 4, self_prob=0.6)
        assert y == pytest.approx(0.75 * 0.6 + (1 / 3) * 0.4)

    def test_self_prob_one_collapses(self):
        ledger = ledger_from_history([1, 0, 1], [1, 1, 0], [1, 1, 1])
        p_given_1 = (1 + 1) / (2 + 2)
        assert prior_belief(ledger, 0, 1, 0, 4, self_prob=1.0) == pytest.approx(p_given_1)

    def test_never_chose_smoothing_floor(self):
        ledger = ledger_from_history([0, 0, 0], [1, 0, 1], [1, 1, 1])
        y = prior_belief(ledger, 0, 1, 0, 4, self_prob=1.0)
        assert y == pytest.approx(0.5)  # (0+1)/(0+2)

    def test_round_one_rejected(self):
        ledger = ledger_from_history([1], [1], [1])
        with pytest.raises(ValidationError):
            prior_belief(ledger, 0, 1, 0, 1, self_prob=0.5)


class TestPosteriorBelief:
    def test_hand_example(self):
        # c_r=[1,1,0], e=[1,0,1]: P(c_r|h)=0.5, P(c_r|l)=2/3, pred=(0.8,0.2)
        ledger = ledger_from_history([1, 1, 0], [1, 1, 0], [1, 0, 1])
        y = posterior_belief(ledger, 0, 1, 0, 4, 1, (0.8, 0.2))
        assert y == pytest.approx(0.5 * 0.8 + (2 / 3) * 0.2)

    def test_pred_collapse(self):
        ledger = ledger_from_history([1, 1, 0], [1, 1, 0], [1, 0, 1])
        assert posterior_belief(ledger, 0, 1, 0, 4, 1, (1.0, 0.0)) == pytest.approx(0.5)

    def test_never_elected_floor(self):
        ledger = ledger_from_history([1, 1, 0], [1, 1, 0], [0, 0, 0])
        y = posterior_belief(ledger, 0, 1, 0, 4, 1, (1.0, 0.0))
        assert y == pytest.approx(0.5)  # (0+1)/(0+2)

    def test_bad_prediction_pair(self):
        ledger = ledger_from_history([1, 1], [1, 1], [1, 1])
        with pytest.raises(ValidationError):
            posterior_belief(ledger, 0, 1, 0, 3, 1, (0.8, 0.3))


def test_cold_start():
    assert cold_start_belief() == 0.5
    assert clip(cold_start_belief(), 0.01) == 0.5


class TestScoreW:
    def test_log_half(self):
        assert score_w(0.5, 1, "logarithmic") == pytest.approx(math.log(0.5))

    def test_quadratic_confident(self):
        delta = 1e-6
        assert score_w(1 - delta, 1, "quadratic", delta) == pytest.approx(1.0)
        assert score_w(delta, 0, "quadratic", delta) == pytest.approx(1.0)

    def test_outside_clip_range(self):
        with pytest.raises(DomainError):
            score_w(1e-9, 1, "logarithmic", 1e-6)

    def test_unknown_form(self):
        with pytest.raises(ValidationError):
            score_w(0.5, 1, "cubic")


def _report(prior, posterior, reporter=0, peer=1):
    return BeliefReport(reporter, peer, 0, 2, prior, posterior)


class TestBetaAndTrust:
    def test_peer_must_differ(self):
        with pytest.raises(ValidationError):
            _report(0.5, 0.5, reporter=1, peer=1)

    def test_hand_example_beta_and_t(self):
        # alpha=1, log form: raw = ln(prior); target raws -0.2, -0.4, -0.6
        raws = [-0.2, -0.4, -0.6]
        reports = [_report(math.exp(v), 0.5, reporter=i, peer=(i + 1) % 3)
                   for i, v in enumerate(raws)]
        b = beta(reports, [1, 1, 1], alpha=1.0, form="logarithmic")
        assert b == pytest.approx(0.4)
        params = TrustParams(alpha=1.0)
        ts = [trustworthiness(rep, 1, b, params) for rep in reports]
        assert ts == pytest.approx([0.2, 0.0, -0.2])
        assert sum(ts) == pytest.approx(0.0, abs=1e-12)

    def test_single_voter_centers_to_zero(self):
        rep = _report(0.7, 0.3)
        b = beta([rep], [1], alpha=0.5, form="quadratic")
        assert trustworthiness(rep, 1, b, TrustParams(form="quadratic")) == \
            pytest.approx(0.0)

    def test_missing_reports(self):
        with pytest.raises(ValidationError):
            beta([_report(0.5, 0.5)], [1, 0], alpha=0.5, form="logarithmic")

    def test_alpha_boundaries(self):
        # alpha=1: posterior has no effect; alpha=0: prior has none
        a = raw_score(0.7, 0.2, 1, alpha=1.0, form="logarithmic")
        b = raw_score(0.7, 0.9, 1, alpha=1.0, form="logarithmic")
        assert a == b
        a = raw_score(0.2, 0.7, 1, alpha=0.0, form="logarithmic")
        b = raw_score(0.9, 0.7, 1, alpha=0.0, form="logarithmic")
        assert a == b

    @given(st.lists(st.tuples(st.floats(0.05, 0.95), st.floats(0.05, 0.95),
                              st.integers(0, 1)), min_size=2, max_size=8),
           st.floats(0, 1), st.sampled_from(["logarithmic", "quadratic"]))
    @settings(max_examples=50)
    def test_zero_sum_property(self, data, alpha, form):
        reports = [_report(p, q, reporter=i, peer=(i + 1) % len(data))
                   for i, (p, q, _) in enumerate(data)]
        peer_choices = [c for _, _, c in data]
        b = beta(reports, peer_choices, alpha, form)
        params = TrustParams(alpha=alpha, form=form)
        total = sum(trustworthiness(rep, c, b, params)
                    for rep, c in zip(reports, peer_choices))
        assert abs(total) < 1e-9


class TestAssignPeers:
    def test_deterministic(self):
        assert np.array_equal(assign_peers(10, 3, 42), assign_peers(10, 3, 42))

    def test_never_self(self):
        for rnd in range(1, 30):
            peers = assign_peers(7, rnd, 1)
            assert np.all(peers != np.arange(7))
            assert np.all((0 <= peers) & (peers < 7))

    def test_two_voters_forced(self):
        assert assign_peers(2, 1, 0).tolist() == [1, 0]

    def test_too_few(self):
        with pytest.raises(ConfigurationError):
            assign_peers(1, 1, 0)

    def test_uniform_over_peers(self):
        counts = np.zeros(5)
        for rnd in range(1, 2001):
            counts[assign_peers(5, rnd, 9)[0]] += 1
        assert counts[0] == 0
        assert np.all(counts[1:] > 2000 / 4 * 0.8)


class TestIcCheck:
    def test_log_form_example(self):
        a1, a2 = ic_check(0.7, 0.4, alpha=0.5, form="logarithmic")
        assert a1 == pytest.approx(0.70, abs=0.011)
        assert a2 == pytest.approx(0.40, abs=0.011)

    def test_quadratic_midpoint(self):
        a1, a2 = ic_check(0.5, 0.5, alpha=0.5, form="quadratic")
        assert a1 == pytest.approx(0.50, abs=0.011)
        assert a2 == pytest.approx(0.50, abs=0.011)

    def test_alpha_one_posterior_unconstrained(self):
        a1, a2 = ic_check(0.7, 0.4, alpha=1.0, form="logarithmic")
        assert a1 == pytest.approx(0.70, abs=0.011)
        assert math.isnan(a2)

    def test_grid_too_coarse(self):
        with pytest.raises(ValidationError):
            ic_check(0.5, 0.5, 0.5, "logarithmic", grid_step=0.5)

    def test_strict_properness(self):
        for form in ("logarithmic", "quadratic"):
            for p in (0.2, 0.5, 0.8):
                truth = expected_trust_components(np.array([p]), p, form)[0]
                for off in (-0.2, 0.2):
                    y = min(max(p + off, 0.01), 0.99)
                    if y == p:
                        continue
                    lie = expected_trust_components(np.array([y]), p, form)[0]
                    assert lie < truth
