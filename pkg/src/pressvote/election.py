"""Score aggregation, super-node election and block reward distribution."""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ValidationError

REWARD_TOL = 1e-9


@dataclass(frozen=True)
class ScoreBoard:
    round: int
    entries: np.ndarray  # (M,) candidate scores


def candidate_score(choices, trust, stakes) -> float:
    """Stake- and trust-weighted vote total for one candidate; may be
    negative."""
    choices = np.asarray(choices, dtype=float)
    trust = np.asarray(trust, dtype=float)
    stakes = np.asarray(stakes, dtype=float)
    if not choices.shape == trust.shape == stakes.shape:
        raise ValidationError(
            f"length mismatch: choices {choices.shape}, trust {trust.shape}, "
            f"stakes {stakes.shape}"
        )
    return float(np.sum(stakes * trust * choices))


def elect(board: ScoreBoard, k: int) -> np.ndarray:
    """Ids of the K candidates with the highest scores, ties broken by
    ascending id; elected regardless of sign."""
    scores = np.asarray(board.entries, dtype=float)
    if k > scores.shape[0]:
        raise ConfigurationError(f"K={k} exceeds number of candidates {scores.shape[0]}")
    order = np.argsort(-scores, kind="stable")
    return np.sort(order[:k])


def distribute_reward(weights, block_reward: float, available: bool) -> tuple[np.ndarray, bool]:
    """Split one winner's block reward proportionally to positive
    supporter weights.

    Negative-weight supporters get zero and are excluded from the
    denominator. Returns (per-voter shares, degenerate flag); the flag is
    set when the candidate produced a block but no weight was positive,
    in which case the reward is escrowed as zero for everyone.
    """
    weights = np.asarray(weights, dtype=float)
    if block_reward <= 0:
        raise ValidationError(f"block_reward must be positive, got {block_reward}")
    shares = np.zeros_like(weights)
    if not available:
        return shares, False
    positive = weights > 0
    total = weights[positive].sum()
    if total <= 0:
        return shares, True
    shares[positive] = block_reward * weights[positive] / total
    return shares, False
