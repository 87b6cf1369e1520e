"""FastAPI application exposing simulation, large-deviation analysis,
incentive-compatibility checking and figure/table data reproduction."""

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from .. import ldp, scenarios
from ..errors import (ConfigurationError, DomainError, PressvoteError,
                      SequencingError, StabilityError, ValidationError)
from ..sim import AdversarySpec, ScenarioConfig, run_experiment
from ..trust import ic_check
from . import schemas

REPRODUCE_TARGETS = ("fig2", "fig3", "fig4", "fig5", "fig7", "fig8", "table1", "table2")

app = FastAPI(title="pressvote", version=__version__)

_CONFIG_ERRORS = (ConfigurationError, ValidationError, DomainError,
                  StabilityError, SequencingError)


@app.exception_handler(PressvoteError)
async def _pressvote_error(request: Request, exc: PressvoteError):
    status = 400 if isinstance(exc, _CONFIG_ERRORS) else 500
    return JSONResponse(status_code=status,
                        content={"detail": {"error": type(exc).__name__,
                                            "message": str(exc)}})


@app.get("/health", response_model=schemas.HealthResponse)
def health():
    return schemas.HealthResponse(status="ok", version=__version__)


def _to_config(req: schemas.SimulateRequest) -> ScenarioConfig:
    adversary = None
    if req.adversary is not None:
        adversary = AdversarySpec(
            briber_candidates=tuple(req.adversary.briber_candidates),
            bribed_voters=tuple(req.adversary.bribed_voters),
            mode=req.adversary.mode,
            belief_high=req.adversary.belief_high,
            belief_low=req.adversary.belief_low,
        )
    return ScenarioConfig(
        num_voters=req.num_voters, k_supernodes=req.k_supernodes, rounds=req.rounds,
        num_candidates=req.num_candidates, alpha=req.alpha, rho=req.rho,
        availability_fn=req.availability_fn, block_reward=req.block_reward,
        stake_choices=tuple(req.stake_choices),
        stakes=tuple(req.stakes) if req.stakes is not None else None,
        unavailability=tuple(req.unavailability) if req.unavailability is not None else None,
        trust_enabled=req.trust_enabled, form=req.form, clip_delta=req.clip_delta,
        adversary=adversary, seed=req.seed,
    )


@app.post("/simulate", response_model=schemas.SimulateResponse)
def simulate(req: schemas.SimulateRequest):
    result = run_experiment(_to_config(req))
    rounds = [
        schemas.RoundModel(
            round=o.round,
            scores=[float(s) for s in o.scores],
            elected=np.flatnonzero(o.elected).tolist(),
            unavailable=np.flatnonzero(o.unavailable).tolist(),
            rewards=[float(r) for r in o.rewards],
            flags=list(o.flags),
        )
        for o in result.outcomes
    ]
    return schemas.SimulateResponse(
        config=req,
        rounds=rounds,
        cumulative_rewards=result.cumulative_rewards.tolist(),
        trust=[t.tolist() for t in result.trust_series],
        election_counts=result.election_counts.tolist(),
        capability_order=result.capability_order,
        stakes=[int(s) for s in result.stakes],
        flags=result.flags,
    )


@app.post("/ldp/rate", response_model=schemas.RateResponse)
def ldp_rate(req: schemas.RateRequest):
    return schemas.RateResponse(
        rate=ldp.rate_function(req.b, req.lam, req.Lam),
        small_b_regime=ldp.small_b_regime(req.b, req.lam, req.Lam),
    )


@app.post("/ldp/valve", response_model=schemas.ValveResponse)
def ldp_valve(req: schemas.ValveRequest):
    return schemas.ValveResponse(L_star=ldp.effective_valve(req.epsilon, req.lam, req.Lam))


@app.post("/ldp/merit", response_model=schemas.MeritResponse)
def ldp_merit(req: schemas.MeritRequest):
    return schemas.MeritResponse(lambda_star=ldp.effective_merit(req.epsilon, req.Lam, req.L))


@app.post("/ldp/mc", response_model=schemas.McResponse)
def ldp_mc(req: schemas.McRequest):
    est = ldp.mc_failure_rate(req.lam, req.Lam, req.L, req.horizon,
                              req.replicas, req.seed, jobs=req.jobs)
    return schemas.McResponse(probability=est.probability, stderr=est.stderr,
                              replicas=est.replicas, horizon=est.horizon)


@app.post("/ldp/decay", response_model=schemas.DecayResponse)
def ldp_decay(req: schemas.DecayRequest):
    slope, points = ldp.verify_decay(req.lam, req.Lam, req.b, req.l_values,
                                     req.horizon, req.replicas, req.seed, jobs=req.jobs)
    expected = -ldp.rate_function(req.b, req.lam, req.Lam)
    return schemas.DecayResponse(
        slope=slope, expected_rate=expected,
        points=[schemas.DecayPoint(l=l, probability=e.probability, stderr=e.stderr)
                for l, e in points],
    )


@app.post("/ic-check", response_model=schemas.IcCheckResponse)
def run_ic_check(req: schemas.IcCheckRequest):
    lattice = [round(0.1 * i, 10) for i in range(1, 10)]
    cells = []
    max_dev = 0.0
    for p1 in lattice:
        for p2 in lattice:
            a1, a2 = ic_check(p1, p2, req.alpha, req.form, grid_step=req.grid_step)
            devs = [abs(a1 - p1)] if not np.isnan(a1) else []
            if not np.isnan(a2):
                devs.append(abs(a2 - p2))
            dev = max(devs) if devs else 0.0
            max_dev = max(max_dev, dev)
            cells.append(schemas.IcCell(p1=p1, p2=p2, argmax_prior=a1,
                                        argmax_posterior=a2, deviation=dev))
    return schemas.IcCheckResponse(max_deviation=max_dev,
                                   passed=max_dev <= req.grid_step + 1e-12,
                                   cells=cells)


def _table(rows: list[dict]) -> schemas.TableData:
    columns = list(rows[0].keys())
    return schemas.TableData(columns=columns,
                             rows=[[row[c] for c in columns] for row in rows])


@app.post("/reproduce", response_model=schemas.ReproduceResponse)
def reproduce(req: schemas.ReproduceRequest):
    target = req.target
    if target not in REPRODUCE_TARGETS:
        raise ConfigurationError(
            f"unknown target {target!r}; valid targets: {', '.join(REPRODUCE_TARGETS)}"
        )
    summary: dict = {}
    if target == "fig2":
        tables = {"fig2": _table(scenarios.rate_surface())}
    elif target == "fig3":
        tables = {"fig3": _table(scenarios.valve_grid())}
    elif target == "fig4":
        tables = {"fig4": _table(scenarios.merit_grid())}
    elif target == "fig5":
        tables = {"fig5": _table(scenarios.reward_series(5, seed=req.seed))}
    elif target == "fig7":
        tables = {"fig7": _table(scenarios.reward_series(21, seed=req.seed))}
    elif target == "fig8":
        elections, rewards, summary = scenarios.availability_rows(seed=req.seed)
        tables = {"fig8_elections": _table(elections), "fig8_rewards": _table(rewards)}
    elif target == "table1":
        tables = {"table1": _table(scenarios.ranking_table(5, seed=req.seed))}
    else:
        tables = {"table2": _table(scenarios.ranking_table(21, seed=req.seed))}
    return schemas.ReproduceResponse(target=target, tables=tables, summary=summary)
