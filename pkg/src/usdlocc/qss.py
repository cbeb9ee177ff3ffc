"""Secret-sharing protocol simulation.

Charlie sends one of two entangled pairs; Alice and Bob each measure in
the discrimination basis or, with probability q_check, in the {0,1}
check basis. Both-discrimination rounds yield key bits through the
two-failure outcome map; both-check rounds must agree because the states
have no |01> or |10> components; a fixed fraction of key rounds is
audited against Charlie's record.

Adversaries: an in-flight eavesdropper resending either products of the
measurement vectors or states from the {|00>,|11>} subspace, and a
receiving party capturing both particles. The sequential variant models
the countermeasure where Alice's particle travels first, forcing the
capturing party to substitute a guess before his joint measurement.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import qlin, sampler, states, twofail
from .errors import ConfigError
from .sampler import RngSpec
from .twofail import Label

ADVERSARIES = (
    "none",
    "eve-product-resend",
    "eve-subspace-resend",
    "bob-capture",
    "bob-capture-sequential",
)

VERDICT_CLEAN = "Clean"
VERDICT_EVE = "EavesdropperSuspected"
VERDICT_CHEAT = "CheatSuspected"

_CHECK = (qlin.KET0, qlin.KET1)
_MEAS_CACHE = {}


@dataclass(frozen=True)
class QssConfig:
    theta: float
    q_check: float
    n_rounds: int
    adversary: str = "none"
    rng: RngSpec = RngSpec(0)
    audit_fraction: float = 0.10


@dataclass(frozen=True)
class SessionStats:
    key_bits: int
    fail_rate_key_rounds: float
    check_disagreements: int
    state_mismatches: int
    fail_rate_expected: float
    verdict: str
    discr_rounds: int
    check_rounds: int
    audited_rounds: int


@dataclass(frozen=True)
class RoundRecord:
    round: int
    true_state: int
    alice_basis: str
    bob_basis: str
    alice_outcome: int
    bob_outcome: int
    label: str


def discrimination_bases(theta):
    """The protocol's measurement vectors: r_A propto |0> + sqrt(cot)|1>
    and r_B propto |0> - sqrt(cot)|1> with their complements."""
    c = np.sqrt(1.0 / np.tan(theta))
    r_a = qlin.normalize(np.array([1.0, c], dtype=complex))
    r_b = qlin.normalize(np.array([1.0, -c], dtype=complex))
    return (r_a, qlin.orth_complement(r_a)), (r_b, qlin.orth_complement(r_b))


def _measurement_cdf(theta, name_a, name_b, state):
    key = (round(theta, 12), name_a, name_b, state.tobytes())
    cdf = _MEAS_CACHE.get(key)
    if cdf is None:
        basis_a, basis_b = discrimination_bases(theta)
        va = _CHECK if name_a == "check" else basis_a
        vb = _CHECK if name_b == "check" else basis_b
        probs = [qlin.joint_probability(x, y, state) for x in va for y in vb]
        cdf = list(np.cumsum(probs))
        _MEAS_CACHE[key] = cdf
    return cdf


def _draw_cell(stream, cdf):
    u = stream.next()
    for idx, c in enumerate(cdf):
        if u < c:
            return divmod(idx, 2)
    return 1, 1


def _guess(stream):
    return 0 if stream.next() < 0.5 else 1


def adversary_transform(round_state, strategy, theta, rng, q_check=0.25, round_index=0):
    """Apply an attack to the pair in flight.

    Returns the state the parties' equipment will actually measure plus
    the adversary's knowledge. The eavesdropper strategies measure in the
    discrimination bases and resend; the capture strategies substitute a
    product encoding the captured party's planned announcements, so the
    knowledge includes his forced basis choice.
    """
    pair = states.qss_pair(theta)
    basis_a, basis_b = discrimination_bases(theta)
    if strategy in ("eve-product-resend", "eve-subspace-resend"):
        cell = _draw_cell(rng, _measurement_cdf(theta, "discr", "discr", round_state))
        label = twofail.TWO_FAIL_OUTCOME_MAP[cell]
        if label is Label.FAIL:
            idx = _guess(rng)
        else:
            idx = 0 if label is Label.S0 else 1
        if strategy == "eve-product-resend":
            resent = qlin.tensor(basis_a[idx], basis_b[idx])
        else:
            resent = pair.psi0 if idx == 0 else pair.psi1
        return resent, {"identified": label, "resent": idx}
    if strategy == "bob-capture" or (
        strategy == "bob-capture-sequential" and round_index % 2 == 0
    ):
        # receiver-first round: joint measurement before substituting
        if rng.next() < q_check:
            m = _guess(rng)
            return qlin.tensor(_CHECK[m], _CHECK[m]), {"bob_basis": "check"}
        cell = _draw_cell(rng, _measurement_cdf(theta, "discr", "discr", round_state))
        label = twofail.TWO_FAIL_OUTCOME_MAP[cell]
        if label is Label.FAIL:
            g = _guess(rng)
            sub = qlin.tensor(basis_a[g], basis_b[1 - g])
            return sub, {"bob_basis": "discr", "identified": label, "bit_known": False}
        idx = 0 if label is Label.S0 else 1
        sub = qlin.tensor(basis_a[idx], basis_b[idx])
        return sub, {"bob_basis": "discr", "identified": label, "bit_known": True}
    if strategy == "bob-capture-sequential":
        # Alice's particle travels first: substitute a guess now, measure
        # the captured genuine pair afterwards, reconcile by announcing
        # the failure cell whenever the guess was not confirmed
        if rng.next() < q_check:
            m = _guess(rng)
            return qlin.tensor(_CHECK[m], _CHECK[m]), {"bob_basis": "check"}
        g = _guess(rng)
        cell = _draw_cell(rng, _measurement_cdf(theta, "discr", "discr", round_state))
        label = twofail.TWO_FAIL_OUTCOME_MAP[cell]
        confirmed = label is (Label.S0 if g == 0 else Label.S1)
        announce = g if confirmed else 1 - g
        sub = qlin.tensor(basis_a[g], basis_b[announce])
        return sub, {"bob_basis": "discr", "identified": label, "substituted": g}
    raise ConfigError(f"unknown adversary strategy: {strategy}")


def _validate(cfg):
    if not (0.0 < cfg.theta < np.pi / 2.0) or abs(cfg.theta - np.pi / 4.0) < 1e-12:
        raise ConfigError("theta must lie in (0, pi/2) and differ from pi/4")
    if not (0.0 <= cfg.q_check < 1.0):
        raise ConfigError("q_check must lie in [0, 1)")
    if cfg.n_rounds < 0:
        raise ConfigError("n_rounds must be non-negative")
    if cfg.adversary not in ADVERSARIES:
        raise ConfigError(f"unknown adversary: {cfg.adversary}")
    if not (0.0 <= cfg.audit_fraction < 1.0):
        raise ConfigError("audit_fraction must lie in [0, 1)")


def run_session(cfg, round_log=None):
    """Simulate cfg.n_rounds protocol rounds; deterministic under cfg.rng.

    Per round the stream is consumed in a fixed order: Charlie's bit,
    adversary draws, Alice's basis, Bob's basis (honest rounds only),
    the joint outcome, and the audit decision on non-failure key rounds.
    """
    _validate(cfg)
    pair = states.qss_pair(cfg.theta)
    psis = (pair.psi0, pair.psi1)
    expected = float(np.sin(2.0 * cfg.theta))
    stream = sampler.DrawStream(cfg.rng)

    key_bits = 0
    discr_rounds = 0
    check_rounds = 0
    fail_count = 0
    check_disagreements = 0
    state_mismatches = 0
    audited_rounds = 0

    for i in range(cfg.n_rounds):
        bit = _guess(stream)
        state = psis[bit]
        bob_basis = None
        if cfg.adversary != "none":
            state, knowledge = adversary_transform(
                state, cfg.adversary, cfg.theta, stream,
                q_check=cfg.q_check, round_index=i,
            )
            bob_basis = knowledge.get("bob_basis")
        alice_basis = "check" if stream.next() < cfg.q_check else "discr"
        if bob_basis is None:
            bob_basis = "check" if stream.next() < cfg.q_check else "discr"
        cell = _draw_cell(
            stream, _measurement_cdf(cfg.theta, alice_basis, bob_basis, state)
        )
        label = None
        if alice_basis == "check" and bob_basis == "check":
            check_rounds += 1
            if cell[0] != cell[1]:
                check_disagreements += 1
        elif alice_basis == "discr" and bob_basis == "discr":
            discr_rounds += 1
            label = twofail.TWO_FAIL_OUTCOME_MAP[cell]
            if label is Label.FAIL:
                fail_count += 1
            else:
                key_bits += 1
                identified = 0 if label is Label.S0 else 1
                if stream.next() < cfg.audit_fraction:
                    audited_rounds += 1
                    if identified != bit:
                        state_mismatches += 1
        if round_log is not None:
            round_log.append(
                RoundRecord(
                    i, bit, alice_basis, bob_basis,
                    cell[0], cell[1], label.value if label else "",
                )
            )

    fail_rate = fail_count / discr_rounds if discr_rounds else 0.0
    draft = SessionStats(
        key_bits=key_bits,
        fail_rate_key_rounds=float(fail_rate),
        check_disagreements=check_disagreements,
        state_mismatches=state_mismatches,
        fail_rate_expected=expected,
        verdict="",
        discr_rounds=discr_rounds,
        check_rounds=check_rounds,
        audited_rounds=audited_rounds,
    )
    return replace(draft, verdict=analyze_session(draft, 3.0))


def analyze_session(stats, sigma_threshold=3.0):
    """Verdict by binomial significance: disagreements or audited
    mismatches first, then an elevated key-round failure rate."""
    for count, n in (
        (stats.check_disagreements, stats.check_rounds),
        (stats.state_mismatches, stats.audited_rounds),
    ):
        if n and count:
            p_hat = count / n
            sigma = np.sqrt(n * p_hat * (1.0 - p_hat))
            if count > sigma_threshold * sigma:
                return VERDICT_EVE
    if stats.discr_rounds:
        p = stats.fail_rate_expected
        sigma = np.sqrt(p * (1.0 - p) / stats.discr_rounds)
        if stats.fail_rate_key_rounds > p + sigma_threshold * sigma:
            return VERDICT_CHEAT
    return VERDICT_CLEAN
