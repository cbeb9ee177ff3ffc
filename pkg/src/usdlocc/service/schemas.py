"""Request and response models for the HTTP service.

Complex amplitudes travel as [re, im] pairs; states are four such pairs
in the order a00, a01, a10, a11.
"""

from __future__ import annotations

from pydantic import BaseModel

ComplexPair = list[float]
StateVec = list[ComplexPair]


class PairSpec(BaseModel):
    """A state pair, either by family shortcut or explicit amplitudes."""

    family: str | None = None
    theta0: float | None = None
    theta1: float | None = None
    theta: float | None = None
    prior0: float = 0.5
    state0: StateVec | None = None
    state1: StateVec | None = None


class SchmidtRequest(BaseModel):
    state: StateVec


class SchmidtResponse(BaseModel):
    lam: list[float]
    basis_a: list[StateVec]
    basis_b: list[StateVec]
    degenerate: bool


class IdpResponse(BaseModel):
    overlap: ComplexPair
    overlap_magnitude: float
    p_fidp: float


class RatioSolutionModel(BaseModel):
    z1: ComplexPair
    z2: ComplexPair
    z3: ComplexPair
    z4: ComplexPair
    c0_mag: float
    d0_mag: float
    e0_mag: float
    f0_mag: float
    free_modulus: bool


class SchemeModel(BaseModel):
    kind: str
    ops_a: list[StateVec | None]
    ops_b: list[StateVec | None]
    outcome_map: dict[str, str]


class FailureReportModel(BaseModel):
    p_fail_given_0: float
    p_fail_given_1: float
    p_f: float
    p_fidp: float
    gap: float


class SolveTwoFailResponse(BaseModel):
    feasible: bool
    reason: str | None = None
    message: str | None = None
    scheme: SchemeModel | None = None
    solution: RatioSolutionModel | None = None
    report: FailureReportModel | None = None


class SolveOneFailResponse(BaseModel):
    feasible: bool
    residual: float
    message: str | None = None
    scheme: SchemeModel | None = None
    report: FailureReportModel | None = None


class SolveNoCommResponse(BaseModel):
    case: str
    detail: str
    detect_prob: float | None = None
    p_fail_0: float | None = None
    p_fail_1: float | None = None
    scheme: SchemeModel | None = None


class CurveRequest(BaseModel):
    steps: int = 200


class CurveResponse(BaseModel):
    header: str
    rows: list[list[float]]
    note: str | None = None


class McRequest(BaseModel):
    pair: PairSpec
    scheme: str = "two-fail"
    n: int = 100000
    seed: int = 0
    stream: int = 0


class McResponse(BaseModel):
    n: int
    counts: dict[str, dict[str, int]]
    error_count: int
    fail_rate: float
    fail_rate_stderr: float
    seed: int
    stream: int
    p_f: float
    p_fidp: float


class QssRequest(BaseModel):
    theta: float
    q_check: float = 0.25
    n_rounds: int = 10000
    adversary: str = "none"
    seed: int = 0
    stream: int = 0
    audit_fraction: float = 0.10
    return_rounds: bool = False


class RoundModel(BaseModel):
    round: int
    true_state: int
    alice_basis: str
    bob_basis: str
    alice_outcome: int
    bob_outcome: int
    label: str


class QssResponse(BaseModel):
    key_bits: int
    fail_rate_key_rounds: float
    check_disagreements: int
    state_mismatches: int
    fail_rate_expected: float
    verdict: str
    discr_rounds: int
    check_rounds: int
    audited_rounds: int
    theta: float
    q_check: float
    n_rounds: int
    adversary: str
    seed: int
    audit_fraction: float
    rounds: list[RoundModel] | None = None


class VerifyRequest(BaseModel):
    mc_rounds: int = 20000
    seed: int = 1
    only: str | None = None


class CheckModel(BaseModel):
    name: str
    passed: bool
    detail: str


class VerifyResponse(BaseModel):
    passed: bool
    checks: list[CheckModel]
