"""The two candidate states: construction, comparison, and the joint-measurement
failure bound."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qlin
from .errors import DomainError, ZeroVector


@dataclass(frozen=True)
class StatePair:
    """Two normalized two-qubit states with prior probabilities."""

    psi0: np.ndarray
    psi1: np.ndarray
    prior0: float = 0.5
    prior1: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "psi0", np.asarray(self.psi0, dtype=complex))
        object.__setattr__(self, "psi1", np.asarray(self.psi1, dtype=complex))
        if abs(self.prior0 + self.prior1 - 1.0) > qlin.NORM_TOL:
            raise DomainError("priors must sum to 1")
        if not (0.0 <= self.prior0 <= 1.0):
            raise DomainError("prior0 must lie in [0, 1]")
        for psi in (self.psi0, self.psi1):
            if psi.shape != (4,):
                raise DomainError("states must be length-4 amplitude vectors")
            if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
                raise DomainError("states must be normalized")


@dataclass(frozen=True)
class IdpBound:
    """Overlap of the pair and the optimal joint-measurement failure rate."""

    overlap: complex
    p_fidp: float


@dataclass(frozen=True)
class BasisMatch:
    """Result of a per-party Schmidt-basis comparison."""

    match: bool
    degenerate0: bool
    degenerate1: bool

    def __bool__(self):
        return self.match


def make_state(amps):
    """Normalize a length-4 amplitude vector into a two-qubit state."""
    v = np.asarray(amps, dtype=complex)
    if v.shape != (4,):
        raise DomainError("expected 4 amplitudes (a00, a01, a10, a11)")
    return qlin.normalize(v)


def idp_bound(pair):
    """Overlap <psi0|psi1> and the equal-prior optimal failure probability
    |<psi0|psi1>| of a joint (both qubits together) unambiguous measurement."""
    ov = qlin.inner(pair.psi0, pair.psi1)
    return IdpBound(overlap=ov, p_fidp=abs(ov))


def _basis_sets_match(basis_u, basis_v):
    """True when two orthonormal one-qubit bases coincide as unordered sets
    up to phases."""
    direct = min(
        abs(qlin.inner(basis_u[0], basis_v[0])),
        abs(qlin.inner(basis_u[1], basis_v[1])),
    )
    crossed = min(
        abs(qlin.inner(basis_u[0], basis_v[1])),
        abs(qlin.inner(basis_u[1], basis_v[0])),
    )
    return max(direct, crossed) > 1.0 - qlin.BASIS_MATCH_TOL


def _partner_basis(state, alice_basis):
    """Bob's Schmidt partners of a state for a prescribed Alice basis."""
    amp = np.asarray(state, dtype=complex).reshape(2, 2)
    partners = []
    for j in range(2):
        w = amp.T @ alice_basis[j].conj()
        n = np.linalg.norm(w)
        partners.append(w / n if n > qlin.ZERO_TOL else None)
    if partners[0] is None:
        partners[0] = qlin.orth_complement(partners[1])
    if partners[1] is None:
        partners[1] = qlin.orth_complement(partners[0])
    return np.array(partners)


def same_schmidt_basis(pair):
    """Whether the two states share per-party Schmidt bases up to phases.

    A degenerate decomposition (equal Schmidt coefficients) leaves the basis
    free; the comparison then asks whether some choice matches, which always
    holds when both states are degenerate.
    """
    d0 = qlin.schmidt_decompose(pair.psi0)
    d1 = qlin.schmidt_decompose(pair.psi1)
    if d0.degenerate and d1.degenerate:
        return BasisMatch(True, True, True)
    if d0.degenerate or d1.degenerate:
        # Rewrite the degenerate state in the unique state's Alice basis and
        # compare the induced Bob partners.
        if d0.degenerate:
            fixed, free_state = d1, pair.psi0
        else:
            fixed, free_state = d0, pair.psi1
        partners = _partner_basis(free_state, fixed.basis_a)
        ok = _basis_sets_match(partners, fixed.basis_b)
        return BasisMatch(ok, d0.degenerate, d1.degenerate)
    ok = _basis_sets_match(d0.basis_a, d1.basis_a) and _basis_sets_match(
        d0.basis_b, d1.basis_b
    )
    return BasisMatch(ok, False, False)


def same_basis_pair(theta0, theta1, prior0=0.5):
    """The shared-basis family: psi_n = cos(theta_n)|00> + sin(theta_n)|11>."""

    def diag(t):
        return np.array([np.cos(t), 0.0, 0.0, np.sin(t)], dtype=complex)

    return StatePair(diag(theta0), diag(theta1), prior0, 1.0 - prior0)


def xz_pair(theta0, theta1, prior0=0.5):
    """The mixed-axis family: psi0 diagonal in the computational basis,
    psi1 diagonal in the x basis."""
    psi0 = np.array([np.cos(theta0), 0.0, 0.0, np.sin(theta0)], dtype=complex)
    psi1 = np.cos(theta1) * qlin.tensor(qlin.PLUS_X, qlin.PLUS_X) + np.sin(
        theta1
    ) * qlin.tensor(qlin.MINUS_X, qlin.MINUS_X)
    return StatePair(psi0, psi1, prior0, 1.0 - prior0)


def qss_pair(theta, prior0=0.5):
    """The secret-sharing pair: sin(t)|00> + cos(t)|11> versus
    cos(t)|00> + sin(t)|11>."""
    psi0 = np.array([np.sin(theta), 0.0, 0.0, np.cos(theta)], dtype=complex)
    psi1 = np.array([np.cos(theta), 0.0, 0.0, np.sin(theta)], dtype=complex)
    return StatePair(psi0, psi1, prior0, 1.0 - prior0)


def parse_state_literal(text):
    """Parse `re[+im i]` comma-separated amplitudes, order a00,a01,a10,a11."""
    parts = [tok.strip() for tok in text.split(",")]
    if len(parts) != 4:
        raise DomainError("state literal needs 4 comma-separated amplitudes")
    amps = []
    for tok in parts:
        try:
            amps.append(complex(tok.replace("i", "j").replace(" ", "")))
        except ValueError as exc:
            raise DomainError(f"bad amplitude {tok!r}") from exc
    try:
        return make_state(amps)
    except ZeroVector as exc:
        raise DomainError("state literal has zero norm") from exc
