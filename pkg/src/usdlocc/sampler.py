"""Outcome sampling, empirical statistics, and scheme verification.

The generator is a counter-based 64-bit mixer (SplitMix64 finalizer):
draw i of substream (seed, stream) is

    base = mix(mix(seed) xor (GAMMA * (stream + 1)))
    r_i  = mix(base + i * GAMMA)        (all arithmetic mod 2^64)
    u_i  = (r_i >> 11) * 2^-53

so identical (seed, stream) pairs reproduce identical sequences bit for
bit, substreams are independent, and any index can be computed directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qlin, states
from .errors import ResidualTooLarge
from .twofail import Label

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_SCALE = 2.0 ** -53


@dataclass(frozen=True)
class RngSpec:
    """Substream address: (seed, stream) fixes the whole sequence."""

    seed: int
    stream: int = 0


@dataclass(frozen=True)
class EmpiricalStats:
    n_rounds: int
    counts: dict
    error_count: int
    fail_rate: float
    fail_rate_stderr: float


@dataclass(frozen=True)
class VerifyReport:
    completeness_residual: float
    zero_error_residual: float
    p_f: float
    p_fidp: float
    passed: bool


def _mix64(x):
    x &= _MASK
    x ^= x >> 30
    x = (x * _M1) & _MASK
    x ^= x >> 27
    x = (x * _M2) & _MASK
    x ^= x >> 31
    return x


def _stream_base(spec):
    return _mix64(_mix64(spec.seed & _MASK) ^ ((_GAMMA * (spec.stream + 1)) & _MASK))


def uniforms(spec, start, count):
    """count uniforms in [0, 1) from positions start.. of the substream."""
    base = np.uint64(_stream_base(spec))
    gamma = np.uint64(_GAMMA)
    idx = np.arange(start, start + count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = base + idx * gamma
        x ^= x >> np.uint64(30)
        x *= np.uint64(_M1)
        x ^= x >> np.uint64(27)
        x *= np.uint64(_M2)
        x ^= x >> np.uint64(31)
    return (x >> np.uint64(11)).astype(np.float64) * _SCALE


class DrawStream:
    """Sequential view of a substream for round-by-round consumption."""

    def __init__(self, spec, pos=0):
        self._base = _stream_base(spec)
        self.pos = pos

    def next(self):
        r = _mix64(self._base + self.pos * _GAMMA)
        self.pos += 1
        return (r >> 11) * _SCALE


def outcome_distribution(scheme, state):
    """Probability of each (alice, bob) outcome cell on the given state."""
    dist = {}
    for cell in sorted(scheme.outcome_map):
        op_a, op_b = scheme.ops_a[cell[0]], scheme.ops_b[cell[1]]
        if op_a is None or op_b is None:
            dist[cell] = 0.0
        else:
            dist[cell] = qlin.joint_probability(op_a.in_bra, op_b.in_bra, state)
    return dist


def _is_error(label, state):
    return (label is Label.S0 and state == 1) or (label is Label.S1 and state == 0)


def run_trials(scheme, pair, n, rng):
    """n sampled rounds: true state by prior, outcome cell by inverse CDF
    over the lexicographically ordered cells (two draws per round)."""
    cells = sorted(scheme.outcome_map)
    dists = [outcome_distribution(scheme, psi) for psi in (pair.psi0, pair.psi1)]
    for state, dist in enumerate(dists):
        wrong = sum(p for cell, p in dist.items() if _is_error(scheme.outcome_map[cell], state))
        if wrong > qlin.ZERO_TOL:
            raise ResidualTooLarge(
                f"scheme assigns wrong-label probability {wrong:.3e} to state {state}"
            )
    if n == 0:
        return EmpiricalStats(0, {}, 0, 0.0, 0.0)
    u = uniforms(rng, 0, 2 * n)
    which = (u[0::2] >= pair.prior0).astype(np.int64)
    cdfs = np.cumsum(
        np.array([[dist[c] for c in cells] for dist in dists]), axis=1
    )
    cell_idx = np.empty(n, dtype=np.int64)
    for s in (0, 1):
        mask = which == s
        cell_idx[mask] = np.searchsorted(cdfs[s], u[1::2][mask], side="right")
    cell_idx = np.minimum(cell_idx, len(cells) - 1)
    binc = np.bincount(which * len(cells) + cell_idx, minlength=2 * len(cells))

    counts = {}
    error_count = 0
    fail_count = 0
    for s in (0, 1):
        for ci, cell in enumerate(cells):
            cnt = int(binc[s * len(cells) + ci])
            if cnt == 0:
                continue
            label = scheme.outcome_map[cell]
            counts[(s, label)] = counts.get((s, label), 0) + cnt
            if label is Label.FAIL:
                fail_count += cnt
            elif _is_error(label, s):
                error_count += cnt
    fail_rate = fail_count / n
    stderr = float(np.sqrt(fail_rate * (1.0 - fail_rate) / n))
    return EmpiricalStats(n, counts, error_count, float(fail_rate), stderr)


def verify_scheme(scheme, pair):
    """Completeness and zero-error residuals plus the failure numbers.

    Completeness is the max-norm deviation of each party's operator sum
    from the identity; the zero-error residual is the largest wrong-label
    amplitude (amplitude scale, so small basis rotations register)."""
    completeness = 0.0
    for ops in (scheme.ops_a, scheme.ops_b):
        total = np.zeros((2, 2), dtype=complex)
        for op in ops:
            if op is None:
                continue
            m = op.matrix()
            total += m.conj().T @ m
        completeness = max(completeness, float(np.abs(total - np.eye(2)).max()))
    zero_error = 0.0
    p_f = 0.0
    for state, psi, weight in (
        (0, pair.psi0, pair.prior0),
        (1, pair.psi1, pair.prior1),
    ):
        for cell, label in scheme.outcome_map.items():
            op_a, op_b = scheme.ops_a[cell[0]], scheme.ops_b[cell[1]]
            if op_a is None or op_b is None:
                continue
            if label is Label.FAIL:
                p_f += weight * qlin.joint_probability(op_a.in_bra, op_b.in_bra, psi)
            elif _is_error(label, state):
                amp = abs(qlin.inner(qlin.tensor(op_a.in_bra, op_b.in_bra), psi))
                zero_error = max(zero_error, amp)
    p_fidp = states.idp_bound(pair).p_fidp
    passed = completeness < qlin.RESIDUAL_TOL and zero_error < qlin.RESIDUAL_TOL
    return VerifyReport(completeness, zero_error, float(p_f), p_fidp, passed)
