"""Selection-pressure voting: merit, pressure, ranking queue, top-K choice.

Pressure for a pair is cumulative merit minus cumulative selections;
each voter elects the K candidates with the biggest pressure.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import HistoryLedger
from .errors import ConfigurationError, DomainError, ValidationError

_EXP_SCALE = 3.0


def d_power(u):
    return 1.0 - np.asarray(u, dtype=float) ** 2


def d_exponential(u):
    u = np.asarray(u, dtype=float)
    return (np.exp(-_EXP_SCALE * u) - math.exp(-_EXP_SCALE)) / (1.0 - math.exp(-_EXP_SCALE))


def d_linear(u):
    return 1.0 - np.asarray(u, dtype=float)


AVAILABILITY_FNS = {
    "power": d_power,
    "exponential": d_exponential,
    "linear": d_linear,
}


@dataclass(frozen=True)
class MeritParams:
    """Scaling parameter, availability function choice and profit cap."""

    rho: float = 5.0
    availability_fn: str = "linear"
    profit_cap: float = 12.5

    def __post_init__(self):
        if self.rho <= 0:
            raise ValidationError(f"rho must be positive, got {self.rho}")
        if self.availability_fn not in AVAILABILITY_FNS:
            raise ValidationError(
                f"unknown availability_fn {self.availability_fn!r}; "
                f"choose one of {sorted(AVAILABILITY_FNS)}"
            )

    def d(self, u):
        return AVAILABILITY_FNS[self.availability_fn](u)


@dataclass(frozen=True)
class PressureTable:
    """Per-pair selection pressure for one round."""

    round: int
    values: np.ndarray  # (N, M)


def estimate_unavailability(ledger: HistoryLedger, candidate: int, through_round: int) -> float:
    """Unavailable events over times elected; 0 for a never-elected candidate."""
    fails, wins = ledger.unavailability_counts(candidate, through_round)
    if wins == 0:
        return 0.0
    return fails / wins


def merit(u: float, profit: float, params: MeritParams) -> float:
    """Per-round merit rho * d(u) + profit."""
    if not 0.0 <= u <= 1.0:
        raise DomainError(f"unavailability {u} not in [0,1]")
    if profit < 0:
        raise ValidationError(f"profit must be nonnegative, got {profit}")
    if profit > params.profit_cap:
        raise ValidationError(f"profit {profit} exceeds cap {params.profit_cap}")
    return params.rho * float(params.d(u)) + profit


def pressure_table(ledger: HistoryLedger, round: int) -> PressureTable:
    """Pressure for every pair entering the given round.

    Round 1 is a cold start: all pressures are zero.
    """
    if round < 1:
        raise ValidationError(f"round must be >= 1, got {round}")
    n, m = ledger.num_voters, ledger.num_candidates
    if round == 1:
        return PressureTable(round, np.zeros((n, m)))
    through = round - 1
    merits = np.stack([ledger.merits(k) for k in range(1, through + 1)]).sum(axis=0)
    choices = np.stack([ledger.choices(k) for k in range(1, through + 1)]).sum(axis=0)
    return PressureTable(round, merits - choices.astype(float))


def ranking_queue(pressure: PressureTable) -> np.ndarray:
    """Virtual ranking queue: the negation of pressure."""
    return -pressure.values


def choose_topk(row, k: int) -> np.ndarray:
    """K candidates with maximal pressure, ties broken by ascending id.

    Returns sorted candidate ids.
    """
    row = np.asarray(row, dtype=float)
    if k > row.shape[0]:
        raise ConfigurationError(f"K={k} exceeds number of candidates {row.shape[0]}")
    order = np.argsort(-row, kind="stable")  # stable: equal values keep id order
    return np.sort(order[:k])


def min_rho(Lambda: float, profit_cap: float, d_value: float) -> float:
    """Stability bound Lambda * (1 - R) / d; set rho strictly above it."""
    if d_value <= 0:
        raise DomainError("d value must be positive; d = 0 is unstable for any rho")
    return Lambda * (1.0 - profit_cap) / d_value
