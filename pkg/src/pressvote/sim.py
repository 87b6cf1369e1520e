"""End-to-end scenario engine.

Wires selection, trust and election into the per-round protocol:
belief broadcast, pressure-based choice, optional bribery, trust
scoring with centering, election, availability sampling and reward
distribution, all appended to the ledger. Deterministic per seed.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .core import CandidateProfile, HistoryLedger, RoundOutcome, VoterProfile
from .election import ScoreBoard, distribute_reward, elect
from .errors import ConfigurationError
from .rng import stream
from .selection import AVAILABILITY_FNS, MeritParams, min_rho
from .trust import FORMS, assign_peers

ADVERSARY_MODES = ("override_choice", "inflate_belief")


@dataclass(frozen=True)
class AdversarySpec:
    """Scripted bribery: the briber buys a set of voters.

    override_choice swaps each bribed voter's lowest-pressure pick for
    the briber. inflate_belief additionally rewrites the bribed voters'
    reported beliefs to project their bought slate onto their peers.
    """

    briber_candidates: tuple[int, ...]
    bribed_voters: tuple[int, ...]
    mode: str = "override_choice"
    belief_high: float = 1.0  # clipped into [delta, 1-delta] when applied
    belief_low: float = 0.0

    def __post_init__(self):
        if self.mode not in ADVERSARY_MODES:
            raise ConfigurationError(
                f"adversary mode must be one of {ADVERSARY_MODES}, got {self.mode!r}"
            )


@dataclass(frozen=True)
class ScenarioConfig:
    num_voters: int
    k_supernodes: int
    rounds: int
    num_candidates: int = 50
    alpha: float = 0.5
    rho: float = 5.0
    availability_fn: str = "linear"
    block_reward: float = 12.5
    stake_choices: tuple[int, ...] = (1, 2, 3, 4)
    stakes: tuple[int, ...] | None = None
    unavailability: tuple[float, ...] | None = None
    trust_enabled: bool = True
    form: str = "logarithmic"
    clip_delta: float = 1e-6
    adversary: AdversarySpec | None = None
    seed: int = 0

    def __post_init__(self):
        if self.num_voters < 2:
            raise ConfigurationError("num_voters must be >= 2")
        if self.rounds < 0:
            raise ConfigurationError("rounds must be >= 0")
        if self.k_supernodes > self.num_candidates:
            raise ConfigurationError("k_supernodes exceeds num_candidates")
        if self.k_supernodes < 1:
            raise ConfigurationError("k_supernodes must be >= 1")
        if self.block_reward <= 0:
            raise ConfigurationError("block_reward must be positive")
        if self.availability_fn not in AVAILABILITY_FNS:
            raise ConfigurationError(f"unknown availability_fn {self.availability_fn!r}")
        if self.form not in FORMS:
            raise ConfigurationError(f"unknown scoring form {self.form!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigurationError("alpha must lie in [0, 1]")
        if self.stakes is not None and len(self.stakes) != self.num_voters:
            raise ConfigurationError("explicit stakes must cover every voter")
        if self.unavailability is not None and len(self.unavailability) != self.num_candidates:
            raise ConfigurationError("explicit unavailability must cover every candidate")
        if self.adversary is not None:
            adv = self.adversary
            if any(v >= self.num_voters or v < 0 for v in adv.bribed_voters):
                raise ConfigurationError("bribed_voters outside the electorate")
            if any(c >= self.num_candidates or c < 0 for c in adv.briber_candidates):
                raise ConfigurationError("briber_candidates outside the candidate set")
            if len(adv.briber_candidates) > self.k_supernodes:
                raise ConfigurationError("briber slate larger than a voter's ballot")

    def voter_profiles(self) -> list[VoterProfile]:
        if self.stakes is not None:
            stakes = self.stakes
        else:
            stakes = tuple(self.stake_choices[i % len(self.stake_choices)]
                           for i in range(self.num_voters))
        return [VoterProfile(i, s) for i, s in enumerate(stakes)]

    def candidate_profiles(self) -> list[CandidateProfile]:
        if self.unavailability is not None:
            u = list(self.unavailability)
        else:
            # rank r candidate gets u = 0.02 * r; best candidates stay most available
            u = [min(1.0, 0.02 * (j + 1)) for j in range(self.num_candidates)]
        ranks = capability_ranking_from_truth(u)
        return [CandidateProfile(j, u[j], ranks[j]) for j in range(self.num_candidates)]


def capability_ranking_from_truth(unavailability) -> list[int]:
    """1-based capability rank per candidate id: ascending ground-truth
    unavailability, ties by id."""
    order = sorted(range(len(unavailability)), key=lambda j: (unavailability[j], j))
    ranks = [0] * len(unavailability)
    for pos, j in enumerate(order):
        ranks[j] = pos + 1
    return ranks


def capability_ranking(candidates: list[CandidateProfile],
                       ledger: HistoryLedger | None = None) -> list[int]:
    """Candidate ids ranked best-first by (ascending true unavailability,
    descending historical mining success, ascending id).

    Used only by scenario setup and acceptance checks, never by voters.
    """
    def success_rate(j: int) -> float:
        if ledger is None or ledger.rounds_completed == 0:
            return 0.0
        fails, wins = ledger.unavailability_counts(j, ledger.rounds_completed)
        return (wins - fails) / wins if wins else 0.0

    return sorted((c.id for c in candidates),
                  key=lambda j: (candidates[j].true_unavailability, -success_rate(j), j))


def apply_bribery(choices: np.ndarray, pressures: np.ndarray,
                  spec: AdversarySpec) -> np.ndarray:
    """Swap each bribed voter's lowest-pressure pick for each briber not
    already chosen; the result still has exactly K choices per voter."""
    out = choices.copy()
    bribers = list(spec.briber_candidates)
    for i in spec.bribed_voters:
        for b in bribers:
            if out[i, b]:
                continue
            chosen = np.flatnonzero(out[i])
            swappable = [j for j in chosen if j not in bribers]
            if not swappable:
                break
            drop = min(swappable, key=lambda j: (pressures[i, j], -j))
            out[i, drop] = 0
            out[i, b] = 1
    return out


@dataclass
class ExperimentResult:
    config: ScenarioConfig
    outcomes: list[RoundOutcome]
    cumulative_rewards: np.ndarray      # (T, N)
    election_counts: np.ndarray         # (M,)
    elected_sets: list[frozenset]
    trust_series: list[np.ndarray]      # per round (N, M)
    capability_order: list[int]         # best-first candidate ids
    stakes: np.ndarray                  # (N,)
    flags: list[str] = field(default_factory=list)


class SimulationState:
    """Mutable per-run state: the ledger plus incremental counters used
    to evaluate beliefs without rescanning history each round."""

    def __init__(self, config: ScenarioConfig):
        self.config = config
        n, m = config.num_voters, config.num_candidates
        self.voters = config.voter_profiles()
        self.candidates = config.candidate_profiles()
        self.stakes = np.array([v.stake for v in self.voters], dtype=float)
        self.u_true = np.array([c.true_unavailability for c in self.candidates])
        self.merit_params = MeritParams(rho=config.rho,
                                        availability_fn=config.availability_fn,
                                        profit_cap=config.block_reward)
        self.ledger = HistoryLedger(n, m, config.k_supernodes,
                                    block_reward=config.block_reward)
        self.cum_choice = np.zeros((n, m), dtype=np.int64)
        self.cum_merit = np.zeros((n, m))
        self.co_choice = np.zeros((n, n, m), dtype=np.int32)  # pairwise co-vote counts
        self.cum_elected = np.zeros(m, dtype=np.int64)
        self.cum_unavailable = np.zeros(m, dtype=np.int64)
        self.cum_choice_elected = np.zeros((n, m), dtype=np.int64)  # sum c_ij * e_j
        self.last_trust: np.ndarray | None = None
        self._warned_rho = False

    # -- helpers ---------------------------------------------------------

    def unavailability_estimates(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            est = np.where(self.cum_elected > 0,
                           self.cum_unavailable / np.maximum(self.cum_elected, 1), 0.0)
        return est

    def _topk_mask(self, pressures: np.ndarray) -> np.ndarray:
        k = self.config.k_supernodes
        order = np.argsort(-pressures, axis=1, kind="stable")
        mask = np.zeros_like(pressures, dtype=np.uint8)
        rows = np.repeat(np.arange(pressures.shape[0]), k)
        mask[rows, order[:, :k].ravel()] = 1
        return mask

    def _beliefs(self, k: int, peers: np.ndarray, natural: np.ndarray,
                 final_choices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        cfg = self.config
        n, m = cfg.num_voters, cfg.num_candidates
        delta = cfg.clip_delta
        if k == 1:
            prior = np.full((n, m), 0.5)
            posterior = np.full((n, m), 0.5)
        else:
            hist = k - 1
            rows = np.arange(n)
            co = self.co_choice[rows, peers, :]            # (N, M) co-vote with own peer
            own = self.cum_choice                          # (N, M)
            peer_tot = self.cum_choice[peers, :]           # (N, M)
            p_given_1 = (co + 1) / (own + 2)
            p_given_0 = (peer_tot - co + 1) / (hist - own + 2)
            self_prob = np.where(natural == 1, 1.0 - delta, delta)
            prior = p_given_1 * self_prob + p_given_0 * (1.0 - self_prob)

            ce = self.cum_choice_elected                   # (N, M)
            pe1 = np.where(
                final_choices == 1,
                (ce + 1) / (own + 2),
                (self.cum_elected[None, :] - ce + 1) / (hist - own + 2),
            )
            peer_ce = self.cum_choice_elected[peers, :]
            p_high = (peer_ce + 1) / (self.cum_elected[None, :] + 2)
            p_low = (peer_tot - peer_ce + 1) / (hist - self.cum_elected[None, :] + 2)
            posterior = p_high * pe1 + p_low * (1.0 - pe1)
        prior = np.clip(prior, delta, 1.0 - delta)
        posterior = np.clip(posterior, delta, 1.0 - delta)

        adv = cfg.adversary
        if adv is not None and adv.mode == "inflate_belief":
            hi = min(max(adv.belief_high, delta), 1.0 - delta)
            lo = min(max(adv.belief_low, delta), 1.0 - delta)
            bribed = list(adv.bribed_voters)
            slate = final_choices[bribed, :] == 1
            prior[bribed, :] = np.where(slate, hi, lo)
            posterior[bribed, :] = np.where(slate, hi, lo)
        return prior, posterior

    def _score_w(self, y: np.ndarray, outcome: np.ndarray) -> np.ndarray:
        if self.config.form == "logarithmic":
            return np.where(outcome == 1, np.log(y), np.log1p(-y))
        return np.where(outcome == 1, 2.0 * y - y**2, 1.0 - y**2)

    # -- protocol --------------------------------------------------------

    def run_round(self) -> RoundOutcome:
        """Execute one full round and append it to the ledger.

        Any error raised before the append leaves the ledger unchanged.
        """
        cfg = self.config
        n, m, K = cfg.num_voters, cfg.num_candidates, cfg.k_supernodes
        k = self.ledger.rounds_completed + 1
        flags: list[str] = []

        peers = assign_peers(n, k, cfg.seed)
        u_hat = self.unavailability_estimates()
        merit_base = cfg.rho * np.asarray(self.merit_params.d(u_hat))
        pressures = (self.cum_merit - self.cum_choice).astype(float)

        natural = self._topk_mask(pressures)
        if cfg.adversary is not None:
            choices = apply_bribery(natural, pressures, cfg.adversary)
        else:
            choices = natural

        prior, posterior = self._beliefs(k, peers, natural, choices)

        if cfg.trust_enabled:
            peer_choices = choices[peers, :]
            raw = (cfg.alpha * self._score_w(prior, peer_choices)
                   + (1.0 - cfg.alpha) * self._score_w(posterior, peer_choices))
            trust_scores = raw - raw.mean(axis=0)[None, :]  # beta centering
        else:
            trust_scores = np.ones((n, m))

        weights = self.stakes[:, None] * trust_scores * choices
        scores = weights.sum(axis=0)
        elected_ids = elect(ScoreBoard(k, scores), K)
        elected = np.zeros(m, dtype=bool)
        elected[elected_ids] = True
        if scores[elected_ids].min() < 0:
            flags.append("negative-score-elected")

        # coupled availability draws: one uniform per (candidate, round),
        # consumed whether or not the candidate was elected
        fail_draw = stream(cfg.seed, "availability", k).random(m)
        unavailable = elected & (fail_draw < self.u_true)

        profits = np.zeros((n, m))
        for j in elected_ids:
            shares, degenerate = distribute_reward(weights[:, j], cfg.block_reward,
                                                   available=not unavailable[j])
            profits[:, j] = shares
            if degenerate:
                flags.append(f"degenerate-reward:candidate-{j}")

        merits = merit_base[None, :] + profits
        rewards = profits.sum(axis=1)
        outcome = RoundOutcome(round=k, scores=scores, elected=elected,
                               unavailable=unavailable, rewards=rewards,
                               flags=tuple(flags))
        self.ledger.append_round(outcome, choices, merits, profits)

        self.cum_choice += choices
        self.cum_merit += merits
        self.co_choice += choices[:, None, :].astype(np.int32) * choices[None, :, :]
        self.cum_elected += elected
        self.cum_unavailable += unavailable
        self.cum_choice_elected += choices * elected[None, :]
        self.last_trust = trust_scores
        return outcome


def run_experiment(config: ScenarioConfig) -> ExperimentResult:
    """Run a full scenario; bit-identical across runs with equal config."""
    state = SimulationState(config)
    flags: list[str] = []

    worst_d = float(np.min(state.merit_params.d(state.u_true)))
    if worst_d > 0:
        # conservative bound: one selection per round, no guaranteed profit
        bound = min_rho(1.0, 0.0, worst_d)
        if config.rho <= bound:
            flags.append(f"rho-below-stability-bound:{bound:.6g}")

    outcomes: list[RoundOutcome] = []
    elected_sets: list[frozenset] = []
    trust_series: list[np.ndarray] = []
    cumulative = np.zeros((config.rounds, config.num_voters))
    running = np.zeros(config.num_voters)
    counts = np.zeros(config.num_candidates, dtype=np.int64)

    for t in range(config.rounds):
        outcome = state.run_round()
        outcomes.append(outcome)
        running = running + outcome.rewards
        cumulative[t] = running
        counts += outcome.elected
        elected_sets.append(frozenset(np.flatnonzero(outcome.elected).tolist()))
        trust_series.append(state.last_trust.copy())
        flags.extend(outcome.flags)

    order = capability_ranking(state.candidates, state.ledger)
    return ExperimentResult(
        config=config,
        outcomes=outcomes,
        cumulative_rewards=cumulative,
        election_counts=counts,
        elected_sets=elected_sets,
        trust_series=trust_series,
        capability_order=order,
        stakes=state.stakes.copy(),
        flags=flags,
    )


def with_trust_disabled(config: ScenarioConfig) -> ScenarioConfig:
    """Same scenario with t == 1 for every pair (plurality weighting)."""
    return replace(config, trust_enabled=False)
