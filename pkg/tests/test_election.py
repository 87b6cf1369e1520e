import numpy as np
import pytest
from hypothesis import given, strategies as st

from pressvote.election import ScoreBoard, candidate_score, distribute_reward, elect
from pressvote.errors import ConfigurationError, ValidationError


class TestCandidateScore:
    def test_hand_example(self):
        assert candidate_score([1, 1], [0.5, -0.25], [1, 2]) == pytest.approx(0.0)

    def test_empty_support(self):
        assert candidate_score([0, 0, 0], [1.0, 1.0, 1.0], [1, 2, 3]) == 0.0

    def test_trust_off_reduces_to_stake_count(self):
        assert candidate_score([1, 0, 1], [1.0, 1.0, 1.0], [1, 2, 3]) == pytest.approx(4.0)

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            candidate_score([1, 0], [1.0], [1, 2])


class TestElect:
    def test_sort_example(self):
        board = ScoreBoard(1, np.array([0.0, 5.0, 3.0, 4.0]))
        assert elect(board, 2).tolist() == [1, 3]

    def test_all_equal_ties(self):
        board = ScoreBoard(1, np.full(5, 2.0))
        assert elect(board, 2).tolist() == [0, 1]

    def test_k_equals_m(self):
        board = ScoreBoard(1, np.array([1.0, -2.0, 0.0]))
        assert elect(board, 3).tolist() == [0, 1, 2]

    def test_k_too_big(self):
        with pytest.raises(ConfigurationError):
            elect(ScoreBoard(1, np.zeros(3)), 4)

    def test_negative_scores_still_elected(self):
        board = ScoreBoard(1, np.array([-5.0, -1.0, -3.0]))
        assert elect(board, 2).tolist() == [1, 2]

    @given(st.lists(st.floats(-50, 50), min_size=3, max_size=10), st.floats(0.1, 9))
    def test_scale_invariance(self, scores, c):
        k = len(scores) // 2 + 1
        a = elect(ScoreBoard(1, np.array(scores)), k)
        b = elect(ScoreBoard(1, np.array(scores) * c), k)
        assert a.tolist() == b.tolist()


class TestDistributeReward:
    def test_proportional_split(self):
        shares, degenerate = distribute_reward([1.0, 3.0], 12.5, available=True)
        assert shares.tolist() == pytest.approx([3.125, 9.375])
        assert not degenerate

    def test_unavailable_no_reward(self):
        shares, degenerate = distribute_reward([1.0, 3.0], 12.5, available=False)
        assert shares.tolist() == [0.0, 0.0]
        assert not degenerate

    def test_single_positive_supporter(self):
        shares, _ = distribute_reward([0.0, 2.0, -1.0], 12.5, available=True)
        assert shares.tolist() == pytest.approx([0.0, 12.5, 0.0])

    def test_negative_weights_excluded(self):
        shares, degenerate = distribute_reward([2.0, -2.0, 2.0], 10.0, available=True)
        assert shares.tolist() == pytest.approx([5.0, 0.0, 5.0])
        assert not degenerate

    def test_degenerate_escrow(self):
        shares, degenerate = distribute_reward([-1.0, 0.0], 12.5, available=True)
        assert shares.tolist() == [0.0, 0.0]
        assert degenerate

    def test_bad_reward(self):
        with pytest.raises(ValidationError):
            distribute_reward([1.0], 0.0, available=True)

    @given(st.lists(st.floats(-10, 10), min_size=1, max_size=12))
    def test_conservation_property(self, weights):
        shares, degenerate = distribute_reward(weights, 12.5, available=True)
        assert np.all(shares >= 0)
        if any(w > 0 for w in weights):
            assert shares.sum() == pytest.approx(12.5)
            assert not degenerate
        else:
            assert shares.sum() == 0.0

    def test_stake_monotonicity(self):
        # raising one positive supporter's weight never lowers her share
        lo, _ = distribute_reward([1.0, 2.0], 12.5, available=True)
        hi, _ = distribute_reward([1.5, 2.0], 12.5, available=True)
        assert hi[0] > lo[0]
