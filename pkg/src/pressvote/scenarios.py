"""Canned scenario configurations and plot-ready data builders.

Everything here is deterministic given a seed: the baseline electorate,
the bribery stress scenarios, the reward demonstrations and the
closed-form curve grids exported by the reproduce command.
"""

import numpy as np

from .ldp import effective_merit, effective_valve, rate_function, small_b_regime
from .sim import AdversarySpec, ExperimentResult, ScenarioConfig, run_experiment

BRIBERY_TOP = 5
BRIBER_K5 = 9
BRIBERY_TOP_K21 = 21
BRIBER_K21 = 30
WHALE_VOTERS = (0, 1, 2, 3, 4, 5)
WHALE_STAKE = 4

AGREEMENT_THRESHOLD = 0.90   # elected-set agreement across availability functions
REWARD_REL_THRESHOLD = 0.15  # relative final-reward spread across availability functions


def baseline(num_voters: int = 20, k_supernodes: int = 5, rounds: int = 100,
             seed: int = 0, **overrides) -> ScenarioConfig:
    """Default electorate: cycled stakes 1..4, ramped candidate
    unavailability, trust scoring on, no adversary."""
    return ScenarioConfig(num_voters=num_voters, k_supernodes=k_supernodes,
                          rounds=rounds, seed=seed, **overrides)


def reward_demo(k_supernodes: int = 5, rounds: int = 100, seed: int = 0) -> ScenarioConfig:
    """Stake-monotone reward demonstration.

    Trust is off so voters differing only in stake behave identically and
    reward shares are exactly proportional to stake.
    """
    return ScenarioConfig(num_voters=8, k_supernodes=k_supernodes, rounds=rounds,
                          trust_enabled=False, seed=seed)


def _bribery_unavailability(num_candidates: int, top: int) -> tuple[float, ...]:
    """Top candidates nearly always available, the rest mostly not.

    The wide gap makes the capability top set unambiguous so election of
    anything else is attributable to the bribery, not to noise.
    """
    u = []
    for j in range(num_candidates):
        if j < top:
            u.append(round(0.001 * (j + 1), 10))
        else:
            u.append(0.6 + 0.4 * (j - top) / (num_candidates - top - 1))
    return tuple(u)


def bribery(k_supernodes: int = 5, rounds: int = 150, seed: int = 0,
            trust_enabled: bool = True) -> ScenarioConfig:
    """Bribery stress scenario: a mid-field candidate buys the whales.

    Six stake-4 voters (24 of 38 total stake, but only 30% of heads) are
    bought by a candidate outside the capability top set. The bribed
    voters both vote the briber and report fully confident beliefs in
    their bought slate. With trust scoring the lies are punished; with
    trust off the stake majority elects the briber.
    """
    if k_supernodes == 5:
        top, briber = BRIBERY_TOP, BRIBER_K5
    elif k_supernodes == 21:
        top, briber = BRIBERY_TOP_K21, BRIBER_K21
    else:
        top, briber = k_supernodes, min(2 * k_supernodes, 49)
    stakes = tuple(WHALE_STAKE if i in WHALE_VOTERS else 1 for i in range(20))
    adversary = AdversarySpec(briber_candidates=(briber,), bribed_voters=WHALE_VOTERS,
                              mode="inflate_belief")
    return ScenarioConfig(
        num_voters=20, k_supernodes=k_supernodes, rounds=rounds,
        stakes=stakes, unavailability=_bribery_unavailability(50, top),
        adversary=adversary, trust_enabled=trust_enabled, seed=seed,
    )


def bribery_top_set(k_supernodes: int = 5) -> frozenset:
    """Ground-truth capability top set of the bribery scenario."""
    top = BRIBERY_TOP if k_supernodes == 5 else BRIBERY_TOP_K21
    return frozenset(range(top))


def availability_demo(availability_fn: str = "linear", rounds: int = 300,
                      seed: int = 0) -> ScenarioConfig:
    """Availability-function comparison scenario.

    Five near-perfect candidates against five very unreliable ones, four
    equal-stake voters, plurality weighting. The capability gap keeps
    the elected set structural rather than noise-driven, so differences
    between availability functions are isolated from rotation dynamics.
    """
    u = tuple([0.002 * (j + 1) for j in range(5)] + [0.9 + 0.02 * j for j in range(5)])
    return ScenarioConfig(num_voters=4, num_candidates=10, k_supernodes=5,
                          rounds=rounds, unavailability=u, stakes=(1, 1, 1, 1),
                          trust_enabled=False, availability_fn=availability_fn,
                          seed=seed)


def availability_comparison(seed: int = 0, rounds: int = 300) -> dict:
    """Run the availability demo under all three availability functions
    with a shared seed and measure how much the choice matters."""
    results = {fn: run_experiment(availability_demo(fn, rounds=rounds, seed=seed))
               for fn in ("power", "exponential", "linear")}
    fns = list(results)
    ref = results[fns[0]]
    agree = 0
    for t in range(rounds):
        sets = {results[fn].elected_sets[t] for fn in fns}
        agree += len(sets) == 1
    finals = np.stack([results[fn].cumulative_rewards[-1] for fn in fns])
    ref_final = np.maximum(finals[0], 1e-12)
    max_rel = float(np.max(np.abs(finals - finals[0]) / ref_final))
    return {
        "results": results,
        "agreement": agree / rounds,
        "agreement_threshold": AGREEMENT_THRESHOLD,
        "max_reward_rel_diff": max_rel,
        "reward_rel_threshold": REWARD_REL_THRESHOLD,
        "pass": agree / rounds >= AGREEMENT_THRESHOLD and max_rel <= REWARD_REL_THRESHOLD,
    }


# -- plot-ready grids -----------------------------------------------------

def rate_surface() -> list[dict]:
    """I(b) over a (b, lambda - Lambda) grid with Lambda = 1."""
    rows = []
    Lam = 1.0
    for gap in np.round(np.arange(0.1, 3.01, 0.1), 10):
        lam = float(Lam + gap)
        for b in np.round(np.arange(0.1, 10.01, 0.1), 10):
            rows.append({
                "b": float(b), "lambda": float(lam), "Lambda": Lam,
                "rate": rate_function(float(b), lam, Lam),
                "small_b_regime": small_b_regime(float(b), lam, Lam),
            })
    return rows


def valve_grid() -> list[dict]:
    """Effective valve L*(epsilon) over epsilon and rate ratios."""
    rows = []
    Lam = 1.0
    for ratio in (1.1, 1.25, 1.5, 2.0, 3.0, 4.0):
        lam = Lam * ratio
        for eps in np.round(np.arange(0.01, 0.51, 0.01), 10):
            rows.append({
                "epsilon": float(eps), "lambda": lam, "Lambda": Lam,
                "L_star": effective_valve(float(eps), lam, Lam),
            })
    return rows


def merit_grid() -> list[dict]:
    """Effective merit lambda*(epsilon, L) with Lambda = 0.5."""
    rows = []
    Lam = 0.5
    for L in np.round(np.arange(1.0, 20.01, 0.5), 10):
        for eps in (0.01, 0.05, 0.1, 0.2, 0.3, 0.5):
            rows.append({
                "epsilon": eps, "L": float(L), "Lambda": Lam,
                "lambda_star": effective_merit(eps, Lam, float(L)),
            })
    return rows


def reward_series(k_supernodes: int, rounds: int = 100, seed: int = 0) -> list[dict]:
    """Cumulative reward per voter per round for the reward demo."""
    result = run_experiment(reward_demo(k_supernodes=k_supernodes, rounds=rounds, seed=seed))
    rows = []
    for t in range(rounds):
        for i in range(result.config.num_voters):
            rows.append({
                "round": t + 1, "voter": i, "stake": int(result.stakes[i]),
                "cumulative_reward": float(result.cumulative_rewards[t, i]),
            })
    return rows


def availability_rows(seed: int = 0, rounds: int = 300) -> tuple[list[dict], list[dict], dict]:
    """Election and reward rows across availability functions, plus the
    soft-threshold summary."""
    comp = availability_comparison(seed=seed, rounds=rounds)
    elections = []
    rewards = []
    for fn, result in comp["results"].items():
        for t, elected in enumerate(result.elected_sets):
            for j in sorted(elected):
                elections.append({"availability_fn": fn, "round": t + 1, "candidate": j})
        for i in range(result.config.num_voters):
            rewards.append({
                "availability_fn": fn, "voter": i, "stake": int(result.stakes[i]),
                "final_cumulative_reward": float(result.cumulative_rewards[-1, i]),
            })
    summary = {k: comp[k] for k in ("agreement", "agreement_threshold",
                                    "max_reward_rel_diff", "reward_rel_threshold", "pass")}
    return elections, rewards, summary


def _ranked_elected(result: ExperimentResult) -> list[int]:
    """Final-round elected candidates, best score first."""
    outcome = result.outcomes[-1]
    elected = sorted(np.flatnonzero(outcome.elected).tolist(),
                     key=lambda j: (-outcome.scores[j], j))
    return elected


def ranking_table(k_supernodes: int, seed: int = 0) -> list[dict]:
    """Capability top set next to the elected sets with and without
    trust scoring, under identical bribery."""
    with_trust = run_experiment(bribery(k_supernodes=k_supernodes, seed=seed))
    without = run_experiment(bribery(k_supernodes=k_supernodes, seed=seed,
                                     trust_enabled=False))
    top = sorted(bribery_top_set(k_supernodes))
    on = _ranked_elected(with_trust)
    off = _ranked_elected(without)
    return [
        {"rank": r + 1, "capability": top[r], "with_trust": on[r], "without_trust": off[r]}
        for r in range(k_supernodes)
    ]
