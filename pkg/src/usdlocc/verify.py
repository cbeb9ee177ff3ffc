"""Bundled self-checks: closed-form agreement, scheme validity, Monte
Carlo bounds, and an honest secret-sharing session."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import nocomm, onefail, qss, sampler, states, twofail


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check_twofail_same_basis():
    worst = 0.0
    for theta1 in (0.3, 0.7, 1.2):
        pair = states.same_basis_pair(np.pi / 2 - theta1, theta1)
        result = twofail.solve(pair)
        target = np.sin(2.0 * theta1)
        worst = max(worst, abs(result.report.p_f - target))
        if not sampler.verify_scheme(result.scheme, pair).passed:
            return False, f"scheme validity failed at theta1={theta1}"
    return worst < 1e-9, f"max closed-form deviation {worst:.3e}"


def _check_twofail_mixed_axis():
    worst = 0.0
    for theta1 in (0.8, 1.2):
        pair = states.xz_pair(np.pi / 2, theta1)
        result = twofail.solve(pair)
        worst = max(worst, abs(result.report.p_f - twofail.fig1_p_fail(theta1)))
        if not sampler.verify_scheme(result.scheme, pair).passed:
            return False, f"scheme validity failed at theta1={theta1}"
    return worst < 1e-9, f"max closed-form deviation {worst:.3e}"


def _check_onefail_closed_form():
    worst = 0.0
    for theta0 in (0.5, np.pi / 4, 1.2):
        pair = states.same_basis_pair(theta0, -np.pi / 4)
        scheme = onefail.solve_one_fail_same_basis(theta0)
        report = onefail.one_fail_report(scheme, pair)
        worst = max(worst, abs(report.p_f - onefail.fig2_p_fail(theta0)))
        if not sampler.verify_scheme(scheme, pair).passed:
            return False, f"scheme validity failed at theta0={theta0}"
    return worst < 1e-9, f"max closed-form deviation {worst:.3e}"


def _check_nocomm_detector():
    pair = states.StatePair(
        states.make_state([1, 0, 0, 0]),
        states.make_state([1, 0, 0, 1]),
    )
    scheme = nocomm.build_detector(pair)
    p_detect, p_fail_0, _ = nocomm.detection_probability(scheme, pair)
    ok = abs(p_detect - 0.5) < 1e-12 and abs(p_fail_0 - 1.0) < 1e-12
    return ok, f"detect_prob={p_detect:.12f}, p_fail_0={p_fail_0:.12f}"


def _check_sampler_mc(mc_rounds, seed):
    pair = states.same_basis_pair(np.pi / 2 - np.pi / 3, np.pi / 3)
    result = twofail.solve(pair)
    stats = sampler.run_trials(result.scheme, pair, mc_rounds, sampler.RngSpec(seed))
    p = result.report.p_f
    bound = 4.0 * np.sqrt(p * (1.0 - p) / max(mc_rounds, 1))
    dev = abs(stats.fail_rate - p)
    ok = stats.error_count == 0 and dev <= bound
    return ok, f"errors={stats.error_count}, |fail_rate - p_f|={dev:.5f} (4 sigma {bound:.5f})"


def _check_qss_honest(seed):
    cfg = qss.QssConfig(theta=np.pi / 6, q_check=0.25, n_rounds=4000,
                        rng=sampler.RngSpec(seed))
    stats = qss.run_session(cfg)
    ok = (
        stats.check_disagreements == 0
        and stats.state_mismatches == 0
        and stats.verdict == qss.VERDICT_CLEAN
    )
    return ok, (
        f"disagreements={stats.check_disagreements}, "
        f"mismatches={stats.state_mismatches}, verdict={stats.verdict}"
    )


def run_verification_suite(mc_rounds=20000, seed=1, only=None):
    """Run the named checks; `only` filters by substring."""
    plan = [
        ("twofail.same-basis-optimum", _check_twofail_same_basis),
        ("twofail.mixed-axis-closed-form", _check_twofail_mixed_axis),
        ("onefail.closed-form", _check_onefail_closed_form),
        ("nocomm.detector-example", _check_nocomm_detector),
        ("sampler.monte-carlo-fail-rate", lambda: _check_sampler_mc(mc_rounds, seed)),
        ("qss.honest-session", lambda: _check_qss_honest(seed)),
    ]
    results = []
    for name, fn in plan:
        if only and only not in name:
            continue
        try:
            passed, detail = fn()
        except Exception as exc:
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(passed), detail))
    return results
