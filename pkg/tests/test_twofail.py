"""Two-failure-outcome solver: ratios, schemes, closed forms, curves."""

import numpy as np
import pytest

from usdlocc import qlin, states, twofail
from usdlocc.errors import IdenticalStates, Infeasible, ProductState
from usdlocc.twofail import Label

FIG1_PF_PI3 = 0.9040063509461097
FIG1_PFIDP_PI3 = 0.6830127018922194


def raw_condition_residuals(scheme, pair):
    """Zero-error residuals straight from the outcome map and state vectors."""
    worst = 0.0
    for (j, k), label in scheme.outcome_map.items():
        if label is Label.FAIL:
            continue
        bra_a = scheme.ops_a[j].in_bra
        bra_b = scheme.ops_b[k].in_bra
        wrong = pair.psi1 if label is Label.S0 else pair.psi0
        amp = np.vdot(qlin.tensor(bra_a, bra_b), wrong)
        worst = max(worst, abs(amp))
    return worst


def completeness_residual(scheme):
    worst = 0.0
    for ops in (scheme.ops_a, scheme.ops_b):
        total = np.zeros((2, 2), dtype=complex)
        for op in ops:
            if op is None:
                continue
            mat = op.matrix()
            total += mat.conj().T @ mat
        worst = max(worst, np.max(np.abs(total - np.eye(2))))
    return worst


def test_same_basis_family_hits_joint_limit():
    for theta1 in (0.3, 0.7, 1.0, 1.4):
        pair = states.same_basis_pair(np.pi / 2 - theta1, theta1)
        result = twofail.solve(pair)
        assert result.report.p_f == pytest.approx(np.sin(2 * theta1), abs=1e-9)
        assert result.report.p_f == pytest.approx(result.report.p_fidp, abs=1e-9)
        assert result.solution.free_modulus


def test_same_basis_modulus_matches_closed_form():
    for theta1 in (0.4, 0.8, 1.2):
        pair = states.same_basis_pair(np.pi / 2 - theta1, theta1)
        result = twofail.solve(pair)
        assert abs(result.solution.z1) ** 2 == pytest.approx(
            1 / np.tan(theta1), rel=1e-9
        )


def test_same_basis_profile_minimum():
    from scipy.optimize import minimize_scalar

    for theta1 in (0.3, 0.6, 1.1):
        k = 1 / np.tan(theta1)
        out = minimize_scalar(
            lambda w: twofail.same_basis_fail_profile(theta1, w),
            bounds=(1e-6, max(10.0, 10 * k * k)),
            method="bounded",
            options={"xatol": 1e-12},
        )
        assert out.x == pytest.approx(k, abs=1e-6)
        assert twofail.same_basis_fail_profile(theta1, k) == pytest.approx(
            np.sin(2 * theta1), abs=1e-12
        )


def test_same_basis_profile_worse_away_from_minimum():
    theta1 = 0.9
    k = 1 / np.tan(theta1)
    best = twofail.same_basis_fail_profile(theta1, k)
    for w in (0.2 * k, 0.7 * k, 1.5 * k, 4 * k):
        assert twofail.same_basis_fail_profile(theta1, w) >= best - 1e-15


def test_same_basis_constraint_violation():
    pair = states.same_basis_pair(0.4, 0.9)
    with pytest.raises(Infeasible):
        twofail.solve_ratios(pair)


def test_identical_pair_rejected():
    pair = states.same_basis_pair(0.8, 0.8)
    with pytest.raises(IdenticalStates):
        twofail.solve_ratios(pair)


def test_mixed_axis_solutions_satisfy_defining_conditions():
    for theta1 in (0.5, 0.8, 1.2):
        pair = states.xz_pair(np.pi / 2, theta1)
        solutions = twofail.solve_ratios(pair)
        assert solutions
        for sol in solutions:
            scheme = twofail.build_scheme(sol, pair)
            assert raw_condition_residuals(scheme, pair) < 1e-8
            assert completeness_residual(scheme) < 1e-12


def test_mixed_axis_closed_form_curve_values():
    assert twofail.fig1_p_fail(np.pi / 3) == pytest.approx(FIG1_PF_PI3, abs=1e-12)
    assert twofail.fig1_p_fidp(np.pi / 3) == pytest.approx(FIG1_PFIDP_PI3, abs=1e-12)
    assert twofail.fig1_p_fail(np.pi / 2) == pytest.approx(0.5, abs=1e-12)
    assert twofail.fig1_p_fidp(np.pi / 2) == pytest.approx(0.5, abs=1e-12)


def test_mixed_axis_solver_matches_closed_form():
    for theta1 in (0.6, 0.9, 1.3):
        pair = states.xz_pair(np.pi / 2, theta1)
        result = twofail.solve(pair)
        assert result.report.p_f == pytest.approx(
            twofail.fig1_p_fail(theta1), abs=1e-9
        )
        assert result.report.p_fidp == pytest.approx(
            twofail.fig1_p_fidp(theta1), abs=1e-12
        )


def test_solver_report_consistent_with_scheme_probabilities():
    pair = states.xz_pair(np.pi / 2, 0.8)
    result = twofail.solve(pair)
    report = twofail.failure_report(result.scheme, pair)
    assert report.p_f == pytest.approx(result.report.p_f, abs=1e-12)
    fail_mass_0 = sum(
        qlin.joint_probability(
            result.scheme.ops_a[j].in_bra, result.scheme.ops_b[k].in_bra, pair.psi0
        )
        for (j, k), label in result.scheme.outcome_map.items()
        if label is Label.FAIL
    )
    assert report.p_fail_given_0 == pytest.approx(fail_mass_0, abs=1e-12)


def test_zero_failure_feasible_iff_orthogonal():
    ortho = states.StatePair(
        states.make_state([1, 0, 0, 0]), states.make_state([0, 0, 0, 1])
    )
    assert twofail.zero_failure_feasible(ortho)
    slanted = states.same_basis_pair(0.3, 0.9)
    assert not twofail.zero_failure_feasible(slanted)


def test_both_product_pair_gets_projective_scheme():
    pair = states.StatePair(
        states.make_state([1, 0, 0, 0]), states.make_state([0, 0, 0, 1])
    )
    result = twofail.solve(pair)
    assert result.report.p_f == pytest.approx(0.0, abs=1e-12)
    assert completeness_residual(result.scheme) < 1e-12


def test_product_pair_nonorthogonal_rejected():
    pair = states.StatePair(
        states.make_state([1, 0, 0, 0]),
        states.make_state([np.cos(0.4), np.sin(0.4), 0, 0]),
    )
    with pytest.raises((ProductState, Infeasible)):
        twofail.solve(pair)


def test_unequal_priors_unlock_lower_failure():
    theta1 = 0.9
    even = states.same_basis_pair(np.pi / 2 - theta1, theta1)
    tilted = states.same_basis_pair(np.pi / 2 - theta1, theta1, prior0=0.9)
    result = twofail.solve(tilted)
    assert raw_condition_residuals(result.scheme, tilted) < 1e-8
    assert completeness_residual(result.scheme) < 1e-12
    report_even = twofail.solve(even).report
    assert result.report.p_f <= report_even.p_f + 1e-6


def test_curve_fig1_lattice_and_offset():
    rows = twofail.curve_fig1(steps=8)
    assert len(rows) == 8
    h = (np.pi / 2) / 8
    assert rows[3][0] == pytest.approx(np.pi / 4 + h / 2, abs=1e-12)
    assert rows[-1][0] == pytest.approx(np.pi / 2, abs=1e-12)
    for t, p_f, p_fidp in rows:
        assert p_f == pytest.approx(twofail.fig1_p_fail(t), abs=1e-12)
        assert p_fidp == pytest.approx(twofail.fig1_p_fidp(t), abs=1e-12)
        assert p_f >= p_fidp - 1e-12


def test_curve_fig1_rejects_tiny_step_count():
    from usdlocc.errors import DomainError

    with pytest.raises(DomainError):
        twofail.curve_fig1(steps=1)


def test_optimize_same_basis_returns_optimal_scheme():
    pair = states.same_basis_pair(np.pi / 2 - 0.7, 0.7)
    solutions = twofail.solve_ratios(pair)
    assert any(s.free_modulus for s in solutions)
    scheme = twofail.optimize_same_basis(pair)
    report = twofail.failure_report(scheme, pair)
    assert report.p_f == pytest.approx(np.sin(1.4), abs=1e-12)


def test_family_conditionals_coincide_off_optimum():
    theta1 = 0.7
    pair = states.same_basis_pair(np.pi / 2 - theta1, theta1)
    k = 1 / np.tan(theta1)
    for w in (0.3 * k, 1.8 * k):
        scheme = twofail.build_scheme(twofail._family_solution(theta1, w), pair)
        report = twofail.failure_report(scheme, pair)
        assert report.p_fail_given_0 == pytest.approx(report.p_fail_given_1, abs=1e-12)
        assert report.p_f == pytest.approx(
            twofail.same_basis_fail_profile(theta1, w), abs=1e-12
        )
