"""Deterministic RNG, Monte Carlo trials, and scheme verification."""

import numpy as np
import pytest

from usdlocc import onefail, sampler, states, twofail
from usdlocc.errors import ResidualTooLarge
from usdlocc.sampler import DrawStream, RngSpec
from usdlocc.twofail import Label


def solved_pair(theta1=np.pi / 3):
    pair = states.same_basis_pair(np.pi / 2 - theta1, theta1)
    return twofail.solve(pair).scheme, pair


def test_uniforms_deterministic_and_in_range():
    spec = RngSpec(seed=12345, stream=2)
    a = sampler.uniforms(spec, 0, 1000)
    b = sampler.uniforms(spec, 0, 1000)
    assert np.array_equal(a, b)
    assert np.all(a >= 0.0) and np.all(a < 1.0)
    assert len(np.unique(a)) > 990


def test_uniforms_offset_slices_match():
    spec = RngSpec(seed=7, stream=0)
    whole = sampler.uniforms(spec, 0, 64)
    tail = sampler.uniforms(spec, 40, 24)
    assert np.array_equal(whole[40:], tail)


def test_streams_and_seeds_differ():
    base = sampler.uniforms(RngSpec(1, 0), 0, 32)
    assert not np.array_equal(base, sampler.uniforms(RngSpec(2, 0), 0, 32))
    assert not np.array_equal(base, sampler.uniforms(RngSpec(1, 1), 0, 32))


def test_draw_stream_matches_vectorized_path():
    for seed, stream in ((0, 0), (9, 3), (123456789, 7)):
        spec = RngSpec(seed, stream)
        stream_obj = DrawStream(spec)
        scalar = [stream_obj.next() for _ in range(50)]
        vector = sampler.uniforms(spec, 0, 50)
        assert np.allclose(scalar, vector, atol=0, rtol=0)


def test_outcome_distribution_sums_to_one():
    scheme, pair = solved_pair()
    for state in (pair.psi0, pair.psi1):
        dist = sampler.outcome_distribution(scheme, state)
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)
        assert all(p >= -1e-15 for p in dist.values())


def test_run_trials_zero_errors_and_fail_rate():
    scheme, pair = solved_pair()
    stats = sampler.run_trials(scheme, pair, 200000, RngSpec(31))
    assert stats.error_count == 0
    assert stats.n_rounds == 200000
    assert sum(stats.counts.values()) == 200000
    p = np.sin(2 * np.pi / 3)
    sigma = np.sqrt(p * (1 - p) / 200000)
    assert abs(stats.fail_rate - p) < 5 * sigma
    assert stats.fail_rate_stderr == pytest.approx(
        np.sqrt(stats.fail_rate * (1 - stats.fail_rate) / 200000), rel=1e-6
    )


def test_run_trials_reproducible():
    scheme, pair = solved_pair()
    a = sampler.run_trials(scheme, pair, 5000, RngSpec(8, 1))
    b = sampler.run_trials(scheme, pair, 5000, RngSpec(8, 1))
    assert a.counts == b.counts
    c = sampler.run_trials(scheme, pair, 5000, RngSpec(8, 2))
    assert a.counts != c.counts


def test_run_trials_empirical_matches_distribution():
    scheme, pair = solved_pair(0.9)
    n = 100000
    stats = sampler.run_trials(scheme, pair, n, RngSpec(4))
    expected_fail = (
        pair.prior0 * sum(
            p for (cell, p) in sampler.outcome_distribution(scheme, pair.psi0).items()
            if scheme.outcome_map[cell] is Label.FAIL
        )
        + pair.prior1 * sum(
            p for (cell, p) in sampler.outcome_distribution(scheme, pair.psi1).items()
            if scheme.outcome_map[cell] is Label.FAIL
        )
    )
    sigma = np.sqrt(expected_fail * (1 - expected_fail) / n)
    assert abs(stats.fail_rate - expected_fail) < 5 * sigma


def test_run_trials_zero_rounds():
    scheme, pair = solved_pair()
    stats = sampler.run_trials(scheme, pair, 0, RngSpec(0))
    assert stats.n_rounds == 0
    assert stats.error_count == 0


def test_run_trials_respects_priors():
    theta1 = np.pi / 3
    pair = states.same_basis_pair(np.pi / 2 - theta1, theta1, prior0=0.8)
    scheme = twofail.solve(pair).scheme
    stats = sampler.run_trials(scheme, pair, 50000, RngSpec(77))
    state0_rounds = sum(v for (state, _), v in stats.counts.items() if state == 0)
    assert abs(state0_rounds / 50000 - 0.8) < 0.01


def test_run_trials_rejects_error_prone_scheme():
    scheme, pair = solved_pair()
    bad_map = dict(scheme.outcome_map)
    bad_map[(0, 1)] = Label.S1
    bad = twofail.Scheme(scheme.kind, scheme.ops_a, scheme.ops_b, bad_map)
    with pytest.raises(ResidualTooLarge):
        sampler.run_trials(bad, pair, 100, RngSpec(0))


def test_verify_scheme_passes_solver_output():
    scheme, pair = solved_pair()
    report = sampler.verify_scheme(scheme, pair)
    assert report.passed
    assert report.completeness_residual < 1e-12
    assert report.zero_error_residual < 1e-10
    assert report.p_f == pytest.approx(np.sin(2 * np.pi / 3), abs=1e-9)


def test_verify_scheme_flags_incomplete_povm():
    scheme, pair = solved_pair()
    crippled = twofail.Scheme(
        scheme.kind,
        (scheme.ops_a[0], twofail.KrausOp(scheme.ops_a[0].out, scheme.ops_a[0].in_bra)),
        scheme.ops_b,
        scheme.outcome_map,
    )
    report = sampler.verify_scheme(crippled, pair)
    assert not report.passed
    assert report.completeness_residual > 1e-6


def test_verify_scheme_one_fail_variant():
    theta0 = 0.9
    scheme = onefail.solve_one_fail_same_basis(theta0)
    pair = states.same_basis_pair(theta0, -np.pi / 4)
    report = sampler.verify_scheme(scheme, pair)
    assert report.passed
    assert report.p_f == pytest.approx(onefail.fig2_p_fail(theta0), abs=1e-12)
