"""Request/response models for the HTTP service."""

from pydantic import BaseModel, Field


class AdversaryModel(BaseModel):
    briber_candidates: list[int]
    bribed_voters: list[int]
    mode: str = "override_choice"
    belief_high: float = 1.0
    belief_low: float = 0.0


class SimulateRequest(BaseModel):
    num_voters: int = Field(ge=2)
    k_supernodes: int = Field(ge=1)
    rounds: int = Field(ge=0)
    num_candidates: int = 50
    alpha: float = 0.5
    rho: float = 5.0
    availability_fn: str = "linear"
    block_reward: float = 12.5
    stake_choices: list[int] = [1, 2, 3, 4]
    stakes: list[int] | None = None
    unavailability: list[float] | None = None
    trust_enabled: bool = True
    form: str = "logarithmic"
    clip_delta: float = 1e-6
    adversary: AdversaryModel | None = None
    seed: int = 0


class RoundModel(BaseModel):
    round: int
    scores: list[float]
    elected: list[int]
    unavailable: list[int]
    rewards: list[float]
    flags: list[str]


class SimulateResponse(BaseModel):
    config: SimulateRequest
    rounds: list[RoundModel]
    cumulative_rewards: list[list[float]]  # (T, N)
    trust: list[list[list[float]]]         # (T, N, M)
    election_counts: list[int]
    capability_order: list[int]
    stakes: list[int]
    flags: list[str]


class RateRequest(BaseModel):
    b: float
    lam: float = Field(alias="lambda")
    Lam: float = Field(alias="Lambda")
    model_config = {"populate_by_name": True}


class RateResponse(BaseModel):
    rate: float
    small_b_regime: bool


class ValveRequest(BaseModel):
    epsilon: float
    lam: float = Field(alias="lambda")
    Lam: float = Field(alias="Lambda")
    model_config = {"populate_by_name": True}


class ValveResponse(BaseModel):
    L_star: float


class MeritRequest(BaseModel):
    epsilon: float
    Lam: float = Field(alias="Lambda")
    L: float
    model_config = {"populate_by_name": True}


class MeritResponse(BaseModel):
    lambda_star: float


class McRequest(BaseModel):
    lam: float = Field(alias="lambda")
    Lam: float = Field(alias="Lambda")
    L: float
    horizon: int = Field(ge=1)
    replicas: int = Field(ge=1)
    seed: int = 0
    jobs: int = 1
    model_config = {"populate_by_name": True}


class McResponse(BaseModel):
    probability: float
    stderr: float
    replicas: int
    horizon: int


class DecayRequest(BaseModel):
    lam: float = Field(alias="lambda")
    Lam: float = Field(alias="Lambda")
    b: float
    l_values: list[float]
    horizon: int = Field(ge=1)
    replicas: int = Field(ge=1)
    seed: int = 0
    jobs: int = 1
    model_config = {"populate_by_name": True}


class DecayPoint(BaseModel):
    l: float
    probability: float
    stderr: float


class DecayResponse(BaseModel):
    slope: float
    expected_rate: float
    points: list[DecayPoint]


class IcCheckRequest(BaseModel):
    alpha: float = 0.5
    form: str = "logarithmic"
    grid_step: float = 0.01


class IcCell(BaseModel):
    p1: float
    p2: float
    argmax_prior: float
    argmax_posterior: float
    deviation: float


class IcCheckResponse(BaseModel):
    max_deviation: float
    passed: bool
    cells: list[IcCell]


class ReproduceRequest(BaseModel):
    target: str
    seed: int = 0


class TableData(BaseModel):
    columns: list[str]
    rows: list[list]


class ReproduceResponse(BaseModel):
    target: str
    tables: dict[str, TableData]
    summary: dict = {}


class HealthResponse(BaseModel):
    status: str
    version: str
