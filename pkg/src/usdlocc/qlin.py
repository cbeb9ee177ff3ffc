"""Small fixed-dimension complex linear algebra for qubit pairs.

Vectors are numpy complex arrays: length 2 for a single qubit, length 4 for
a qubit pair with Alice's index major, i.e. component order
(|00>, |01>, |10>, |11>).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroVector

# Magnitudes below ZERO_TOL count as exact zeros in classification decisions
# (single tolerance shared repo-wide).
ZERO_TOL = 1e-10
# Normalization and POVM completeness checks.
NORM_TOL = 1e-12
# Zero-error condition residuals accepted from solvers.
RESIDUAL_TOL = 1e-8
# Basis coincidence: |<u|v>| > 1 - BASIS_MATCH_TOL.
BASIS_MATCH_TOL = 1e-9

KET0 = np.array([1.0, 0.0], dtype=complex)
KET1 = np.array([0.0, 1.0], dtype=complex)
PLUS_X = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
MINUS_X = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0)


def qubit(a0, a1):
    """One-qubit vector with amplitudes (a0, a1)."""
    return np.array([a0, a1], dtype=complex)


def tensor(a, b):
    """Kronecker product; component (i, j) of the result is a_i * b_j."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def inner(a, b):
    """Hermitian inner product <a|b> (conjugate on the first argument)."""
    return complex(np.vdot(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)))


def normalize(v):
    """Scale v to unit norm. Raises ZeroVector when the norm is ~0."""
    v = np.asarray(v, dtype=complex)
    n = np.linalg.norm(v)
    if n < NORM_TOL:
        raise ZeroVector("cannot normalize a numerically zero vector")
    return v / n


def phase_fix(v):
    """Rotate the global phase so the first component above ZERO_TOL in
    magnitude becomes real positive."""
    v = np.asarray(v, dtype=complex)
    for c in v:
        if abs(c) > ZERO_TOL:
            return v * (abs(c) / c)
    raise ZeroVector("cannot phase-fix a numerically zero vector")


def orth_complement(v):
    """The unit vector orthogonal to a one-qubit vector, phase-fixed."""
    v = normalize(v)
    return phase_fix(np.array([-np.conj(v[1]), np.conj(v[0])]))


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Biorthogonal form sum_j sqrt(lam[j]) basis_a[j] (x) basis_b[j].

    lam is sorted descending and sums to 1 for a normalized state. Alice's
    vectors are phase-fixed; the residual phases sit in Bob's vectors so
    the coefficients sqrt(lam) are real non-negative.
    """

    lam: np.ndarray
    basis_a: np.ndarray
    basis_b: np.ndarray
    degenerate: bool

    def reconstruct(self):
        out = np.zeros(4, dtype=complex)
        for j in range(2):
            out += np.sqrt(self.lam[j]) * tensor(self.basis_a[j], self.basis_b[j])
        return out


def _eig2_hermitian(rho):
    """Closed-form eigensystem of a 2x2 Hermitian matrix.

    Returns eigenvalues descending and phase-fixed orthonormal eigenvectors.
    """
    p = rho[0, 0].real
    q = rho[1, 1].real
    c = rho[0, 1]
    if abs(c) < ZERO_TOL:
        if p >= q:
            return (p, q), (KET0.copy(), KET1.copy())
        return (q, p), (KET1.copy(), KET0.copy())
    t = 0.5 * (p - q)
    r = np.hypot(t, abs(c))
    e0 = 0.5 * (p + q) + r
    e1 = 0.5 * (p + q) - r
    # (rho - e0 I) u0 = 0 with u0 = (c, e0 - p); the cancellation-free form
    # of e0 - p is |c|^2 / (r + t) when t > 0.
    gap = abs(c) ** 2 / (r + t) if t > 0 else r - t
    u0 = phase_fix(normalize(np.array([c, gap])))
    u1 = orth_complement(u0)
    return (e0, e1), (u0, u1)


def schmidt_decompose(state):
    """Schmidt decomposition of a normalized two-qubit state.

    Implemented as a closed-form 2x2 singular value decomposition of the
    amplitude matrix: Alice's vectors are the eigenvectors of the reduced
    density matrix, Bob's vectors absorb the residual phases. A product
    state returns lam = (1, 0) with the second Bob vector completed as the
    orthogonal complement of the first.
    """
    amp = np.asarray(state, dtype=complex).reshape(2, 2)
    rho_a = amp @ amp.conj().T
    _, (u0, u1) = _eig2_hermitian(rho_a)

    w0 = amp.T @ u0.conj()
    s0 = np.linalg.norm(w0)
    if s0 < ZERO_TOL:
        raise ZeroVector("cannot decompose a numerically zero state")
    b0 = w0 / s0
    w1 = amp.T @ u1.conj()
    s1 = np.linalg.norm(w1)
    if s1 < ZERO_TOL:
        s1 = 0.0
        b1 = orth_complement(b0)
    else:
        b1 = w1 / s1

    lam = np.array([s0 ** 2, s1 ** 2])
    degenerate = bool(abs(lam[0] - lam[1]) < ZERO_TOL)
    return SchmidtDecomposition(lam, np.array([u0, u1]), np.array([b0, b1]), degenerate)


def joint_probability(a, b, state):
    """|(<a| (x) <b|) |state>|^2 for unit vectors a and b."""
    amp = inner(tensor(a, b), state)
    return abs(amp) ** 2
