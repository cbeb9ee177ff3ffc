"""HTTP service wrapping the solvers, sampler, and session simulator.

Domain outcomes (infeasible pairs, always-fail classifications) come back
as structured 200 responses; invalid input maps to 400.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import nocomm, onefail, qlin, qss, sampler, states, twofail, verify
from ..errors import (
    ConfigError,
    DomainError,
    IdenticalStates,
    Infeasible,
    NotDetectorCase,
    ProductState,
    ResidualTooLarge,
    ZeroVector,
)
from . import schemas

_SOLVER_OUTCOMES = (IdenticalStates, ProductState, Infeasible, ResidualTooLarge)


def _c(z):
    z = complex(z)
    return [z.real, z.imag]


def _vec(v):
    return [_c(z) for z in v]


def _from_vec(pairs, what):
    if len(pairs) != 4 or any(len(p) != 2 for p in pairs):
        raise DomainError(f"{what} must be 4 amplitudes as [re, im] pairs")
    return states.make_state([complex(p[0], p[1]) for p in pairs])


def _to_pair(spec):
    explicit = spec.state0 is not None or spec.state1 is not None
    if spec.family and explicit:
        raise DomainError("give either a family shortcut or explicit states, not both")
    if spec.family:
        if spec.family == "same-basis":
            if spec.theta0 is None or spec.theta1 is None:
                raise DomainError("family same-basis needs theta0 and theta1")
            return states.same_basis_pair(spec.theta0, spec.theta1, spec.prior0)
        if spec.family == "xz-mixed":
            if spec.theta0 is None or spec.theta1 is None:
                raise DomainError("family xz-mixed needs theta0 and theta1")
            return states.xz_pair(spec.theta0, spec.theta1, spec.prior0)
        if spec.family == "qss":
            if spec.theta is None:
                raise DomainError("family qss needs theta")
            return states.qss_pair(spec.theta, spec.prior0)
        raise DomainError(f"unknown family {spec.family!r}")
    if spec.state0 is None or spec.state1 is None:
        raise DomainError("need either a family shortcut or both state0 and state1")
    return states.StatePair(
        _from_vec(spec.state0, "state0"),
        _from_vec(spec.state1, "state1"),
        spec.prior0,
        1.0 - spec.prior0,
    )


def _scheme_model(scheme):
    def op_vec(op):
        return None if op is None else _vec(op.in_bra)

    return schemas.SchemeModel(
        kind=getattr(scheme, "kind", "NoComm"),
        ops_a=[op_vec(op) for op in scheme.ops_a],
        ops_b=[op_vec(op) for op in scheme.ops_b],
        outcome_map={f"{j},{k}": lab.value for (j, k), lab in scheme.outcome_map.items()},
    )


def _report_model(report):
    return schemas.FailureReportModel(
        p_fail_given_0=report.p_fail_given_0,
        p_fail_given_1=report.p_fail_given_1,
        p_f=report.p_f,
        p_fidp=report.p_fidp,
        gap=report.gap,
    )


def _solution_model(sol):
    return schemas.RatioSolutionModel(
        z1=_c(sol.z1), z2=_c(sol.z2), z3=_c(sol.z3), z4=_c(sol.z4),
        c0_mag=sol.c0_mag, d0_mag=sol.d0_mag, e0_mag=sol.e0_mag, f0_mag=sol.f0_mag,
        free_modulus=sol.free_modulus,
    )


def _one_fail_scheme(bases):
    r_a, r_a_perp, r_b, r_b_perp = bases
    return twofail._projective_scheme(
        "OneFail", r_a, r_a_perp, r_b, r_b_perp, onefail.ONE_FAIL_OUTCOME_MAP
    )


def create_app():
    app = FastAPI(title="usdlocc", version="0.1.0")

    @app.exception_handler(DomainError)
    @app.exception_handler(ConfigError)
    @app.exception_handler(ZeroVector)
    def _bad_input(request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/schmidt", response_model=schemas.SchmidtResponse)
    def schmidt(req: schemas.SchmidtRequest):
        state = _from_vec(req.state, "state")
        dec = qlin.schmidt_decompose(state)
        return schemas.SchmidtResponse(
            lam=[float(x) for x in dec.lam],
            basis_a=[_vec(v) for v in dec.basis_a],
            basis_b=[_vec(v) for v in dec.basis_b],
            degenerate=dec.degenerate,
        )

    @app.post("/idp", response_model=schemas.IdpResponse)
    def idp(spec: schemas.PairSpec):
        bound = states.idp_bound(_to_pair(spec))
        return schemas.IdpResponse(
            overlap=_c(bound.overlap),
            overlap_magnitude=abs(bound.overlap),
            p_fidp=bound.p_fidp,
        )

    @app.post("/solve/two-fail", response_model=schemas.SolveTwoFailResponse)
    def solve_two_fail(spec: schemas.PairSpec):
        pair = _to_pair(spec)
        try:
            result = twofail.solve(pair)
        except _SOLVER_OUTCOMES as exc:
            return schemas.SolveTwoFailResponse(
                feasible=False, reason=type(exc).__name__, message=str(exc)
            )
        return schemas.SolveTwoFailResponse(
            feasible=True,
            scheme=_scheme_model(result.scheme),
            solution=_solution_model(result.solution),
            report=_report_model(result.report),
        )

    @app.post("/solve/one-fail", response_model=schemas.SolveOneFailResponse)
    def solve_one_fail(spec: schemas.PairSpec):
        if spec.family == "same-basis" and spec.theta1 is None:
            spec = spec.model_copy(update={"theta1": -np.pi / 4.0})
        pair = _to_pair(spec)
        feas = onefail.one_fail_feasible(pair)
        if not feas.feasible:
            return schemas.SolveOneFailResponse(
                feasible=False,
                residual=feas.residual,
                message="no bases satisfy the three single-failure conditions",
            )
        scheme = _one_fail_scheme(feas.bases)
        report = onefail.one_fail_report(scheme, pair)
        return schemas.SolveOneFailResponse(
            feasible=True,
            residual=feas.residual,
            scheme=_scheme_model(scheme),
            report=_report_model(report),
        )

    @app.post("/solve/no-comm", response_model=schemas.SolveNoCommResponse)
    def solve_no_comm(spec: schemas.PairSpec):
        pair = _to_pair(spec)
        cls = nocomm.classify(pair)
        if cls.case_label == nocomm.ALWAYS_FAIL:
            return schemas.SolveNoCommResponse(case=cls.case_label, detail=cls.detail)
        scheme = nocomm.build_detector(pair)
        p_detect, p_fail_0, p_fail_1 = nocomm.detection_probability(scheme, pair)
        return schemas.SolveNoCommResponse(
            case=cls.case_label,
            detail=cls.detail,
            detect_prob=p_detect,
            p_fail_0=p_fail_0,
            p_fail_1=p_fail_1,
            scheme=_scheme_model(scheme),
        )

    @app.post("/curve/fig1", response_model=schemas.CurveResponse)
    def curve_fig1(req: schemas.CurveRequest):
        rows = twofail.curve_fig1(req.steps)
        h = (np.pi / 2.0) / req.steps
        offset = any(
            abs(k * h - np.pi / 4.0) < 1e-12 for k in range(1, req.steps + 1)
        )
        note = None
        if offset:
            note = (
                "the theta1 = pi/4 grid point is shifted by half a step; "
                "the mixed-axis scheme is singular there"
            )
        return schemas.CurveResponse(
            header="theta1,p_f,p_fidp",
            rows=[[float(a), float(b), float(c)] for a, b, c in rows],
            note=note,
        )

    @app.post("/curve/fig2", response_model=schemas.CurveResponse)
    def curve_fig2(req: schemas.CurveRequest):
        rows = onefail.curve_fig2(req.steps)
        return schemas.CurveResponse(
            header="theta0,p_f,p_fidp",
            rows=[[float(a), float(b), float(c)] for a, b, c in rows],
        )

    @app.post("/mc", response_model=schemas.McResponse)
    def mc(req: schemas.McRequest):
        pair = _to_pair(req.pair)
        if req.n < 0:
            raise DomainError("n must be non-negative")
        if req.scheme == "two-fail":
            scheme = twofail.solve(pair).scheme
        elif req.scheme == "one-fail":
            feas = onefail.one_fail_feasible(pair)
            if not feas.feasible:
                raise DomainError(
                    "the pair admits no single-failure scheme "
                    f"(best residual {feas.residual:.3e})"
                )
            scheme = _one_fail_scheme(feas.bases)
        else:
            raise DomainError(f"unknown scheme {req.scheme!r}")
        stats = sampler.run_trials(
            scheme, pair, req.n, sampler.RngSpec(req.seed, req.stream)
        )
        nested = {}
        for (state, label), cnt in sorted(
            stats.counts.items(), key=lambda kv: (kv[0][0], kv[0][1].value)
        ):
            nested.setdefault(str(state), {})[label.value] = cnt
        report = sampler.verify_scheme(scheme, pair)
        return schemas.McResponse(
            n=stats.n_rounds,
            counts=nested,
            error_count=stats.error_count,
            fail_rate=stats.fail_rate,
            fail_rate_stderr=stats.fail_rate_stderr,
            seed=req.seed,
            stream=req.stream,
            p_f=report.p_f,
            p_fidp=report.p_fidp,
        )

    @app.post("/qss", response_model=schemas.QssResponse)
    def qss_session(req: schemas.QssRequest):
        cfg = qss.QssConfig(
            theta=req.theta,
            q_check=req.q_check,
            n_rounds=req.n_rounds,
            adversary=req.adversary,
            rng=sampler.RngSpec(req.seed, req.stream),
            audit_fraction=req.audit_fraction,
        )
        log = [] if req.return_rounds else None
        stats = qss.run_session(cfg, round_log=log)
        rounds = None
        if log is not None:
            rounds = [
                schemas.RoundModel(
                    round=r.round,
                    true_state=r.true_state,
                    alice_basis=r.alice_basis,
                    bob_basis=r.bob_basis,
                    alice_outcome=r.alice_outcome,
                    bob_outcome=r.bob_outcome,
                    label=r.label,
                )
                for r in log
            ]
        return schemas.QssResponse(
            key_bits=stats.key_bits,
            fail_rate_key_rounds=stats.fail_rate_key_rounds,
            check_disagreements=stats.check_disagreements,
            state_mismatches=stats.state_mismatches,
            fail_rate_expected=stats.fail_rate_expected,
            verdict=stats.verdict,
            discr_rounds=stats.discr_rounds,
            check_rounds=stats.check_rounds,
            audited_rounds=stats.audited_rounds,
            theta=req.theta,
            q_check=req.q_check,
            n_rounds=req.n_rounds,
            adversary=req.adversary,
            seed=req.seed,
            audit_fraction=req.audit_fraction,
            rounds=rounds,
        )

    @app.post("/verify", response_model=schemas.VerifyResponse)
    def run_verify(req: schemas.VerifyRequest):
        results = verify.run_verification_suite(
            mc_rounds=req.mc_rounds, seed=req.seed, only=req.only
        )
        return schemas.VerifyResponse(
            passed=all(r.passed for r in results),
            checks=[
                schemas.CheckModel(name=r.name, passed=r.passed, detail=r.detail)
                for r in results
            ],
        )

    return app
