"""Peer-prediction trustworthiness: beliefs, scoring rule, centering.

A voter is scored on how well her reported prior and posterior beliefs
predict a random peer's realized vote; subtracting the round average
makes the scores zero-sum, and truthful reporting maximizes the
expected score (checked numerically by ic_check).
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import HistoryLedger
from .errors import ConfigurationError, DomainError, ValidationError
from .rng import stream

FORMS = ("logarithmic", "quadratic")


@dataclass(frozen=True)
class TrustParams:
    alpha: float = 0.5
    form: str = "logarithmic"
    clip_delta: float = 1e-6

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValidationError(f"alpha {self.alpha} not in [0,1]")
        if self.form not in FORMS:
            raise ValidationError(f"form must be one of {FORMS}, got {self.form!r}")
        if not 0.0 < self.clip_delta <= 0.01:
            raise ValidationError(f"clip_delta {self.clip_delta} not in (0, 0.01]")


@dataclass(frozen=True)
class BeliefReport:
    """One voter's prior/posterior beliefs about a peer's vote for one
    candidate in one round (beliefs already clipped)."""

    reporter: int
    peer: int
    candidate: int
    round: int
    prior: float
    posterior: float

    def __post_init__(self):
        if self.peer == self.reporter:
            raise ValidationError("peer must differ from reporter")


def clip(y: float, delta: float) -> float:
    return min(max(y, delta), 1.0 - delta)


def cold_start_belief() -> float:
    """Maximum-entropy default used by every voter in round 1."""
    return 0.5


def prior_belief(ledger: HistoryLedger, i: int, r: int, j: int, k: int,
                 self_prob: float, clip_delta: float = 1e-6) -> float:
    """Mixture of smoothed conditionals of the peer's past votes on the
    reporter's own past votes, weighted by the reporter's subjective
    choice probability."""
    if k < 2:
        raise ValidationError("prior_belief needs k >= 2; use cold_start_belief for round 1")
    hist = ledger.choice_matrix(k - 1)
    ci = hist[:, i, j].astype(int)
    cr = hist[:, r, j].astype(int)
    n1 = int(ci.sum())
    n0 = (k - 1) - n1
    p_given_1 = (int((cr * ci).sum()) + 1) / (n1 + 2)  # add-one smoothing
    p_given_0 = (int((cr * (1 - ci)).sum()) + 1) / (n0 + 2)
    y = p_given_1 * self_prob + p_given_0 * (1.0 - self_prob)
    return clip(y, clip_delta)


def posterior_belief(ledger: HistoryLedger, i: int, r: int, j: int, k: int,
                     own_choice: int, election_pred: tuple[float, float],
                     clip_delta: float = 1e-6) -> float:
    """Mixture of smoothed conditionals of the peer's past votes on the
    candidate's election record, weighted by the reporter's election
    prediction (P(elected | own choice), P(not elected | own choice))."""
    if k < 2:
        raise ValidationError("posterior_belief needs k >= 2; use cold_start_belief for round 1")
    pe1, pe0 = election_pred
    if abs(pe1 + pe0 - 1.0) > 1e-9:
        raise ValidationError(f"election prediction pair must sum to 1, got {pe1 + pe0}")
    hist = ledger.choice_matrix(k - 1)
    ej = ledger.elected_matrix(k - 1)[:, j].astype(int)
    cr = hist[:, r, j].astype(int)
    nh = int(ej.sum())
    nl = (k - 1) - nh
    p_high = (int((cr * ej).sum()) + 1) / (nh + 2)
    p_low = (int((cr * (1 - ej)).sum()) + 1) / (nl + 2)
    y = p_high * pe1 + p_low * pe0
    return clip(y, clip_delta)


def score_w(y: float, c: int, form: str, clip_delta: float = 1e-6) -> float:
    """Logarithmic or quadratic proper scoring of belief y against outcome c."""
    if form not in FORMS:
        raise ValidationError(f"form must be one of {FORMS}, got {form!r}")
    if not clip_delta <= y <= 1.0 - clip_delta:
        raise DomainError(f"belief {y} outside clipped range [{clip_delta}, {1 - clip_delta}]")
    if form == "logarithmic":
        return math.log(y) if c else math.log(1.0 - y)
    return 2.0 * y - y * y if c else 1.0 - y * y


def raw_score(prior: float, posterior: float, peer_choice: int,
              alpha: float, form: str, clip_delta: float = 1e-6) -> float:
    return (alpha * score_w(prior, peer_choice, form, clip_delta)
            + (1.0 - alpha) * score_w(posterior, peer_choice, form, clip_delta))


def beta(reports: list[BeliefReport], peer_choices, alpha: float, form: str,
         clip_delta: float = 1e-6) -> float:
    """Negated round average of the raw scores; added back per voter this
    makes trust scores zero-sum over the electorate."""
    peer_choices = list(peer_choices)
    if len(reports) != len(peer_choices) or not reports:
        raise ValidationError("need exactly one report and peer choice per voter")
    total = sum(
        raw_score(rep.prior, rep.posterior, c, alpha, form, clip_delta)
        for rep, c in zip(reports, peer_choices)
    )
    return -total / len(reports)


def trustworthiness(report: BeliefReport, peer_choice: int, beta_value: float,
                    params: TrustParams) -> float:
    """Centered score of one voter's report against the peer's realized vote."""
    return raw_score(report.prior, report.posterior, peer_choice,
                     params.alpha, params.form, params.clip_delta) + beta_value


def assign_peers(n: int, round: int, seed: int) -> np.ndarray:
    """Uniformly random peer != self for each voter, deterministic per
    (seed, round)."""
    if n < 2:
        raise ConfigurationError(f"need at least 2 voters, got {n}")
    rng = stream(seed, "peers", round)
    draws = rng.integers(0, n - 1, size=n)
    peers = np.where(draws >= np.arange(n), draws + 1, draws)
    return peers


def expected_trust_components(y_grid: np.ndarray, p: float, form: str):
    """Expected W(y, c) with c ~ Bernoulli(p), evaluated on a grid of
    reported beliefs (analytic over the peer's choice)."""
    if form == "logarithmic":
        return p * np.log(y_grid) + (1.0 - p) * np.log(1.0 - y_grid)
    return p * (2.0 * y_grid - y_grid**2) + (1.0 - p) * (1.0 - y_grid**2)


def ic_check(p1: float, p2: float, alpha: float, form: str,
             grid_step: float = 0.01) -> tuple[float, float]:
    """Grid-search the expected trust score over reported (prior,
    posterior) and return the maximizing grid points.

    Incentive compatibility means they land within one grid step of the
    truthful (p1, p2). The two terms separate, so each is maximized on
    its own. With alpha at a boundary the zero-weight term is flat and
    its argmax is reported as nan.
    """
    if grid_step > 0.01:
        raise ValidationError(f"grid_step {grid_step} too coarse; need <= 0.01")
    if not (0.0 < p1 < 1.0 and 0.0 < p2 < 1.0):
        raise DomainError("p1, p2 must lie in (0, 1)")
    grid = np.arange(grid_step, 1.0, grid_step)
    argmax_prior = float(grid[np.argmax(expected_trust_components(grid, p1, form))])
    argmax_posterior = float(grid[np.argmax(expected_trust_components(grid, p2, form))])
    if alpha == 0.0:
        argmax_prior = float("nan")
    if alpha == 1.0:
        argmax_posterior = float("nan")
    return argmax_prior, argmax_posterior
