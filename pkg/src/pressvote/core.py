"""Domain types and the append-only round history.

The ledger is the single source of truth: every formula in the other
modules reads choices, merits, election and availability records from
here. Appending a round is the only mutation path.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import SequencingError, ValidationError

REWARD_TOL = 1e-9


@dataclass(frozen=True)
class VoterProfile:
    """A voter with a positive integer stake used as voting weight."""

    id: int
    stake: int

    def __post_init__(self):
        if self.stake < 1:
            raise ValidationError(f"voter {self.id}: stake must be >= 1, got {self.stake}")


@dataclass(frozen=True)
class CandidateProfile:
    """A candidate with ground-truth parameters used only by scenario
    generators and acceptance checks, never by voters."""

    id: int
    true_unavailability: float
    true_capability: int

    def __post_init__(self):
        if not 0.0 <= self.true_unavailability <= 1.0:
            raise ValidationError(
                f"candidate {self.id}: unavailability {self.true_unavailability} not in [0,1]"
            )


@dataclass(frozen=True)
class RoundOutcome:
    """Per-round election result.

    scores, elected and unavailable are length-M arrays; rewards is a
    length-N array of per-voter reward totals for the round.
    """

    round: int
    scores: np.ndarray
    elected: np.ndarray  # bool (M,)
    unavailable: np.ndarray  # bool (M,)
    rewards: np.ndarray  # float (N,)
    flags: tuple = ()


class HistoryLedger:
    """Append-only per-round history of choices, merits, elections,
    availability events and per-pair profits.

    Single-writer: one simulation run appends; readers are safe after
    each append returns.
    """

    def __init__(self, num_voters: int, num_candidates: int, k_supernodes: int,
                 block_reward: float | None = None):
        if not 1 <= k_supernodes <= num_candidates:
            raise ValidationError(
                f"k_supernodes {k_supernodes} must be in [1, {num_candidates}]"
            )
        self.num_voters = num_voters
        self.num_candidates = num_candidates
        self.k_supernodes = k_supernodes
        self.block_reward = block_reward
        self.rounds_completed = 0
        # per-round arrays, index 0 == round 1
        self._choices: list[np.ndarray] = []   # (N, M) uint8
        self._merits: list[np.ndarray] = []    # (N, M) float
        self._profits: list[np.ndarray] = []   # (N, M) float
        self._elected: list[np.ndarray] = []   # (M,) bool
        self._unavailable: list[np.ndarray] = []  # (M,) bool

    # -- accessors -------------------------------------------------------

    def choices(self, round: int) -> np.ndarray:
        return self._choices[round - 1]

    def merits(self, round: int) -> np.ndarray:
        return self._merits[round - 1]

    def profits(self, round: int) -> np.ndarray:
        return self._profits[round - 1]

    def elected(self, round: int) -> np.ndarray:
        return self._elected[round - 1]

    def unavailable(self, round: int) -> np.ndarray:
        return self._unavailable[round - 1]

    def choice_matrix(self, through_round: int) -> np.ndarray:
        """Stacked (rounds, N, M) choice history through the given round."""
        self._check_range(through_round)
        if through_round == 0:
            return np.zeros((0, self.num_voters, self.num_candidates), dtype=np.uint8)
        return np.stack(self._choices[:through_round])

    def elected_matrix(self, through_round: int) -> np.ndarray:
        self._check_range(through_round)
        if through_round == 0:
            return np.zeros((0, self.num_candidates), dtype=bool)
        return np.stack(self._elected[:through_round])

    def unavailable_matrix(self, through_round: int) -> np.ndarray:
        self._check_range(through_round)
        if through_round == 0:
            return np.zeros((0, self.num_candidates), dtype=bool)
        return np.stack(self._unavailable[:through_round])

    # -- mutation --------------------------------------------------------

    def append_round(self, outcome: RoundOutcome, choices, merits, profits) -> "HistoryLedger":
        """Append one completed round; validates every ledger invariant.

        Rejects out-of-sequence rounds and any invariant violation
        without mutating the ledger.
        """
        n, m, k = self.num_voters, self.num_candidates, self.k_supernodes
        if outcome.round != self.rounds_completed + 1:
            raise SequencingError(
                f"expected round {self.rounds_completed + 1}, got {outcome.round}"
            )
        choices = np.asarray(choices, dtype=np.uint8)
        merits = np.asarray(merits, dtype=float)
        profits = np.asarray(profits, dtype=float)
        elected = np.asarray(outcome.elected, dtype=bool)
        unavailable = np.asarray(outcome.unavailable, dtype=bool)
        rewards = np.asarray(outcome.rewards, dtype=float)
        if choices.shape != (n, m) or merits.shape != (n, m) or profits.shape != (n, m):
            raise ValidationError("choice/merit/profit maps must cover all (voter, candidate) pairs")
        if elected.shape != (m,) or unavailable.shape != (m,) or rewards.shape != (n,):
            raise ValidationError("elected/unavailable/rewards have wrong shape")
        per_voter = choices.sum(axis=1)
        if not np.all(per_voter == k):
            bad = int(np.argmax(per_voter != k))
            raise ValidationError(
                f"invariant 'exactly K choices per voter' failed: voter {bad} "
                f"chose {int(per_voter[bad])} of K={k}"
            )
        if int(elected.sum()) != k:
            raise ValidationError(
                f"invariant 'exactly K elected per round' failed: {int(elected.sum())} != {k}"
            )
        if np.any(unavailable & ~elected):
            raise ValidationError("invariant 'unavailable implies elected' failed")
        if np.any(merits < 0):
            raise ValidationError("invariant 'merits nonnegative' failed")
        if np.any(profits < 0):
            raise ValidationError("invariant 'profits nonnegative' failed")
        if not np.allclose(rewards, profits.sum(axis=1), atol=REWARD_TOL, rtol=0):
            raise ValidationError("rewards must equal per-voter profit totals")
        if self.block_reward is not None:
            produced = int((elected & ~unavailable).sum())
            expected = produced * self.block_reward
            paid = float(profits.sum())
            # degenerate rounds (no positive weights) may escrow to zero
            per_cand = profits.sum(axis=0)
            payable = per_cand[elected & ~unavailable]
            if not np.all(
                np.isclose(payable, self.block_reward, atol=REWARD_TOL, rtol=0)
                | np.isclose(payable, 0.0, atol=REWARD_TOL, rtol=0)
            ):
                raise ValidationError(
                    f"per-winner payout must be block_reward or escrowed zero "
                    f"(expected up to {expected}, saw total {paid})"
                )
        self._choices.append(choices)
        self._merits.append(merits)
        self._profits.append(profits)
        self._elected.append(elected)
        self._unavailable.append(unavailable)
        self.rounds_completed += 1
        return self

    # -- queries ---------------------------------------------------------

    def cumulative(self, voter: int, candidate: int, through_round: int) -> tuple[float, int]:
        """Exact (sum of merits, count of choices) for one pair through a round."""
        self._check_range(through_round)
        total_m = 0.0
        total_c = 0
        for k in range(through_round):
            total_m += float(self._merits[k][voter, candidate])
            total_c += int(self._choices[k][voter, candidate])
        return total_m, total_c

    def unavailability_counts(self, candidate: int, through_round: int) -> tuple[int, int]:
        """(unavailable events, times elected) for one candidate."""
        self._check_range(through_round)
        fails = sum(int(self._unavailable[k][candidate]) for k in range(through_round))
        wins = sum(int(self._elected[k][candidate]) for k in range(through_round))
        return fails, wins

    def _check_range(self, through_round: int):
        if not 0 <= through_round <= self.rounds_completed:
            raise ValidationError(
                f"through_round {through_round} beyond history ({self.rounds_completed})"
            )


@dataclass
class LdpParams:
    """Parameter bundle for the large-deviation formulas."""

    lam: float       # expectation of the merit process
    Lam: float       # expectation of the selection process
    b: float = 1.0   # valve slope, L = l * b
    l: float = 1.0   # scale
    epsilon: float = 0.1  # voting failure tolerance degree
    L: float = field(default=0.0)

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 1.0:
            raise ValidationError(f"epsilon {self.epsilon} not in (0, 1]")
