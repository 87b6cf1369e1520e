"""Large-deviation analysis of the ranking queue.

Closed-form rate function and its variational cross-checks, the
effective selection valve and effective expectation of merit, and Monte
Carlo validation of the voting failure rate for the Poisson queue model.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InsufficientReplicasError, StabilityError, ValidationError
from .rng import stream

__all__ = [
    "McEstimate", "theta_star", "cgf_objective", "legendre", "legendre_numeric",
    "rate_function", "rate_function_numeric", "small_b_regime",
    "effective_valve", "effective_merit", "mc_failure_rate", "verify_decay",
]


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo estimate of the voting failure rate P(sup Q > L)."""

    probability: float
    stderr: float
    replicas: int
    horizon: int


def _check_rates(lam: float, Lam: float):
    if not (lam > 0 and Lam > 0):
        raise DomainError(f"rates must be positive, got lambda={lam}, Lambda={Lam}")


def _check_stability(lam: float, Lam: float):
    if not (lam > Lam > 0):
        raise StabilityError(
            f"stability requires lambda > Lambda > 0, got lambda={lam}, Lambda={Lam}"
        )


def theta_star(x: float, lam: float, Lam: float) -> float:
    """Unique stationary point of the tilted-CGF objective G(theta)."""
    _check_rates(lam, Lam)
    if x <= 0:
        raise DomainError(f"x must be positive, got {x}")
    return math.log((x + math.sqrt(x * x + 4.0 * lam * Lam)) / (2.0 * Lam))


def cgf_objective(theta: float, x: float, lam: float, Lam: float) -> float:
    """G(theta) = theta*x - Lambda*(e^theta - 1) - lambda*(e^-theta - 1)."""
    return theta * x - Lam * (math.exp(theta) - 1.0) - lam * (math.exp(-theta) - 1.0)


def legendre(x: float, lam: float, Lam: float) -> float:
    """Closed-form convex conjugate psi*(x) of the queue increment CGF."""
    t = theta_star(x, lam, Lam)
    root = x + math.sqrt(x * x + 4.0 * lam * Lam)
    return x * t - root / 2.0 - 2.0 * Lam * lam / root + lam + Lam


def legendre_numeric(x: float, lam: float, Lam: float,
                     lo: float = -20.0, hi: float = 20.0, tol: float = 1e-10) -> float:
    """psi*(x) by golden-section maximization of G, independent of the
    closed form; used as the oracle in cross-checks."""
    _check_rates(lam, Lam)
    if x <= 0:
        raise DomainError(f"x must be positive, got {x}")
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = cgf_objective(c, x, lam, Lam)
    fd = cgf_objective(d, x, lam, Lam)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = cgf_objective(c, x, lam, Lam)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = cgf_objective(d, x, lam, Lam)
    mid = (a + b) / 2.0
    return cgf_objective(mid, x, lam, Lam)


def rate_function(b: float, lam: float, Lam: float) -> float:
    """Closed-form decay rate I(b) = b * log(lambda / Lambda)."""
    _check_stability(lam, Lam)
    if b < 0:
        raise DomainError(f"b must be nonnegative, got {b}")
    return b * math.log(lam / Lam)


def small_b_regime(b: float, lam: float, Lam: float) -> bool:
    """True when the closed-form minimizer t = b/(lambda-Lambda) falls
    below the queue's t >= 2 observation range; flagged in output."""
    return b < 2.0 * (lam - Lam)


def rate_function_numeric(b: float, lam: float, Lam: float,
                          grid_points: int = 2000) -> tuple[float, float]:
    """Variational rate: min over t > 0 of t * psi*(b/t), psi* evaluated
    by independent 1-D maximization. Returns (value, minimizing t).

    Grid search over a wide log-spaced t range followed by golden-section
    refinement around the best grid point.
    """
    _check_stability(lam, Lam)
    if b == 0:
        return 0.0, 0.0

    def objective(t):
        return t * legendre_numeric(b / t, lam, Lam)

    t_grid = np.geomspace(b / (lam * 100.0), b * 100.0 / max(lam - Lam, 1e-12), grid_points)
    vals = [objective(t) for t in t_grid]
    i = int(np.argmin(vals))
    a = t_grid[max(i - 1, 0)]
    c = t_grid[min(i + 1, grid_points - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = c - invphi * (c - a)
    x2 = a + invphi * (c - a)
    f1, f2 = objective(x1), objective(x2)
    while c - a > 1e-12 * (1.0 + c):
        if f1 < f2:
            c, x2, f2 = x2, x1, f1
            x1 = c - invphi * (c - a)
            f1 = objective(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (c - a)
            f2 = objective(x2)
    t_best = (a + c) / 2.0
    return objective(t_best), t_best


def effective_valve(epsilon: float, lam: float, Lam: float) -> float:
    """Smallest selection valve keeping the failure rate at most epsilon."""
    _check_stability(lam, Lam)
    if not 0.0 < epsilon <= 1.0:
        raise DomainError(f"epsilon {epsilon} not in (0, 1]")
    return -math.log(epsilon) / math.log(lam / Lam)


def effective_merit(epsilon: float, Lam: float, L: float) -> float:
    """Smallest merit expectation keeping the failure rate at most
    epsilon, given the valve L."""
    if Lam <= 0:
        raise DomainError(f"Lambda must be positive, got {Lam}")
    if L <= 0:
        raise DomainError(f"valve L must be positive, got {L}")
    if not 0.0 < epsilon <= 1.0:
        raise DomainError(f"epsilon {epsilon} not in (0, 1]")
    return Lam * math.exp(-math.log(epsilon) / L)


# -- Monte Carlo ---------------------------------------------------------

_CHUNK = 1 << 15
_PRUNE_EVERY = 64
_PRUNE_MARGIN = 60.0  # log-scale slack; recovery odds below e^-60 are ignored


def _sup_exceeds_count(lam, Lam, L, horizon, replicas, rng) -> int:
    """Count replicas whose running max of the queue walk exceeds L.

    The walk starts at 0 (the empty queue) and takes horizon - 1
    Poisson(Lambda) - Poisson(lambda) increments. Replicas that already
    exceeded L, or have drifted too low to plausibly recover, are retired
    as they are decided.
    """
    if L < 0:
        return replicas
    floor = L - _PRUNE_MARGIN / math.log(lam / Lam)
    q = np.zeros(replicas)
    hits = 0
    for step in range(horizon - 1):
        m = q.size
        if m == 0:
            break
        q += rng.poisson(Lam, m) - rng.poisson(lam, m)
        exceeded = q > L
        n_exceeded = int(exceeded.sum())
        if n_exceeded:
            hits += n_exceeded
            q = q[~exceeded]
        if (step + 1) % _PRUNE_EVERY == 0:
            q = q[q > floor]
    return hits


def mc_failure_rate(lam: float, Lam: float, L: float, horizon: int,
                    replicas: int, seed: int, jobs: int = 1) -> McEstimate:
    """Plain Monte Carlo estimate of P(sup_t Q_t > L) with binomial
    standard error; deterministic per (seed, params) and per-chunk
    substreams, independent of jobs."""
    _check_stability(lam, Lam)
    if horizon < 1 or replicas < 1:
        raise ValidationError("horizon and replicas must be >= 1")
    chunks = [(idx, min(_CHUNK, replicas - idx * _CHUNK))
              for idx in range((replicas + _CHUNK - 1) // _CHUNK)]

    def run_chunk(args):
        idx, size = args
        return _sup_exceeds_count(lam, Lam, L, horizon, size,
                                  stream(seed, "mc-chunk", idx))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            counts = list(pool.map(run_chunk, chunks))
    else:
        counts = [run_chunk(c) for c in chunks]
    hits = sum(counts)
    p = hits / replicas
    stderr = math.sqrt(max(p * (1.0 - p), 0.0) / replicas)
    return McEstimate(probability=p, stderr=stderr, replicas=replicas, horizon=horizon)


def verify_decay(lam: float, Lam: float, b: float, l_values, horizon: int,
                 replicas: int, seed: int, jobs: int = 1):
    """Estimate P(sup Q > l*b) along increasing l and fit the decay slope
    of log p-hat versus l by least squares.

    Returns (fitted slope, list of (l, estimate)); the slope approaches
    -I(b) as l grows. Zero-count estimates abort with guidance.
    """
    l_values = sorted(l_values)
    if len(l_values) < 2:
        raise ValidationError("need at least two l values to fit a slope")
    points = []
    for li, l in enumerate(l_values):
        est = mc_failure_rate(lam, Lam, l * b, horizon, replicas, seed + li, jobs=jobs)
        if est.probability == 0.0:
            raise InsufficientReplicasError(
                f"no exceedances at l={l} (L={l * b}); raise replicas above {replicas}"
            )
        points.append((l, est))
    ls = np.array([l for l, _ in points], dtype=float)
    logs = np.array([math.log(e.probability) for _, e in points])
    slope = float(np.polyfit(ls, logs, 1)[0])
    return slope, points
