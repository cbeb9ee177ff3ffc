"""Two-failure-outcome discrimination schemes.

Each party measures a two-outcome local POVM; the outcome pair (0,0)
identifies state 0, (1,1) identifies state 1, and the mixed pairs mean
failure. The solver finds orthonormal local bases {r_A, r_A_perp},
{r_B, r_B_perp} with

    (<r_A| (x) <r_B|) |psi1> = 0        (the S0 cell never fires on psi1)
    (<r_A_perp| (x) <r_B_perp|) |psi0> = 0

expressed through the coefficient ratios z1..z4 of the basis vectors in
the Schmidt frames of the two states.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import optimize, qlin, states
from .errors import (
    ConstraintViolated,
    DomainError,
    IdenticalStates,
    Infeasible,
    ProductState,
    ResidualTooLarge,
)

# Coefficient ratios larger than this are treated as unrepresentable
# (the corresponding basis vector degenerates onto a frame axis).
_RATIO_CAP = 1e9
# Solvability constraint |cos(theta0 + theta1)| for the shared-basis family.
_CONSTRAINT_TOL = 1e-9
_PENALTY = 1e6


class Label(str, Enum):
    S0 = "S0"
    S1 = "S1"
    FAIL = "FAIL"


TWO_FAIL_OUTCOME_MAP = {
    (0, 0): Label.S0,
    (1, 1): Label.S1,
    (0, 1): Label.FAIL,
    (1, 0): Label.FAIL,
}


@dataclass(frozen=True)
class KrausOp:
    """Rank-1 measurement operator |out><in_bra|."""

    out: np.ndarray
    in_bra: np.ndarray

    def matrix(self):
        return np.outer(self.out, self.in_bra.conj())


@dataclass(frozen=True)
class Scheme:
    """Per-party measurement operators plus the outcome labeling."""

    kind: str
    ops_a: tuple
    ops_b: tuple
    outcome_map: dict


@dataclass(frozen=True)
class RatioSolution:
    """Basis-vector coefficient ratios in the two Schmidt frames.

    r_A  = c0* (v_A0 + z1 v_A1)      r_B      = d0* (v_B0 + z2 v_B1)
    r_A_perp = e0* (u_A0 + z3 u_A1)  r_B_perp = f0* (u_B0 + z4 u_B1)

    where u is state 0's frame and v state 1's. free_modulus marks the
    shared-basis family where |z1| is a free parameter.
    """

    z1: complex
    z2: complex
    z3: complex
    z4: complex
    c0_mag: float
    d0_mag: float
    e0_mag: float
    f0_mag: float
    free_modulus: bool = False


@dataclass(frozen=True)
class FailureReport:
    p_fail_given_0: float
    p_fail_given_1: float
    p_f: float
    p_fidp: float
    gap: float


@dataclass(frozen=True)
class SolveResult:
    scheme: Scheme
    report: FailureReport
    solution: RatioSolution


@dataclass(frozen=True)
class _Frames:
    lam0: np.ndarray
    u_a: np.ndarray
    u_b: np.ndarray
    lam1: np.ndarray
    v_a: np.ndarray
    v_b: np.ndarray


def _lex_key(v):
    return tuple(np.round([v[0].real, v[1].real, v[0].imag, v[1].imag], 9))


def _canonical(dec):
    """Deterministic frame labeling: a zero Schmidt coefficient goes first,
    otherwise Alice vectors sort in descending lexicographic order."""
    lam, va, vb = dec.lam, dec.basis_a, dec.basis_b
    if lam[1] < qlin.ZERO_TOL:
        order = (1, 0)
    elif _lex_key(va[0]) >= _lex_key(va[1]):
        order = (0, 1)
    else:
        order = (1, 0)
    return (
        np.array([lam[order[0]], lam[order[1]]]),
        np.array([va[order[0]], va[order[1]]]),
        np.array([vb[order[0]], vb[order[1]]]),
    )


def _frames(pair):
    lam0, u_a, u_b = _canonical(qlin.schmidt_decompose(pair.psi0))
    lam1, v_a, v_b = _canonical(qlin.schmidt_decompose(pair.psi1))
    return _Frames(lam0, u_a, u_b, lam1, v_a, v_b)


def _overlap_matrices(fr):
    a = fr.v_a.conj() @ fr.u_a.T  # a[j, k] = <v_Aj|u_Ak>
    b = fr.v_b.conj() @ fr.u_b.T
    return a, b


def _condition_residuals(z, fr):
    """Magnitudes of the four defining conditions at the given ratios."""
    z1, z2, z3, z4 = z
    a, b = _overlap_matrices(fr)
    s = np.sqrt
    r1 = abs(s(fr.lam1[0]) + s(fr.lam1[1]) * z1 * z2)
    r2 = abs(s(fr.lam0[0]) + s(fr.lam0[1]) * z3 * z4)
    r3 = abs(a[0, 0] + a[0, 1] * z3 + a[1, 0] * np.conj(z1) + a[1, 1] * np.conj(z1) * z3)
    r4 = abs(b[0, 0] + b[0, 1] * z4 + b[1, 0] * np.conj(z2) + b[1, 1] * np.conj(z2) * z4)
    return r1, r2, r3, r4


def _mags(z1, z2, z3, z4):
    return tuple(1.0 / np.sqrt(1.0 + abs(z) ** 2) for z in (z1, z2, z3, z4))


def _ratio(c0, c1):
    """c1 / c0, or None when the ratio is not representable."""
    if abs(c0) <= abs(c1) / _RATIO_CAP or abs(c0) == 0.0:
        return None
    return complex(c1 / c0)


def zero_failure_feasible(pair):
    """Whether a failure-free labeling is possible at all: only orthogonal
    pairs admit one."""
    return abs(qlin.inner(pair.psi0, pair.psi1)) < qlin.ZERO_TOL


def _biorthogonal_products(fr):
    """Both product states with per-party orthogonal factors. The canonical
    ordering puts the zero coefficient first, so index 1 carries the factor."""
    return (
        abs(qlin.inner(fr.u_a[1], fr.v_a[1])) < qlin.ZERO_TOL
        and abs(qlin.inner(fr.u_b[1], fr.v_b[1])) < qlin.ZERO_TOL
    )


def _shared_diagonal(pair, fr):
    """(theta0, theta1) when psi1 is diagonal with real non-negative
    coefficients in psi0's canonical frame, else None."""
    amp1 = pair.psi1.reshape(2, 2)
    m = fr.u_a.conj() @ amp1 @ fr.u_b.conj().T
    off = max(abs(m[0, 1]), abs(m[1, 0]))
    if off > qlin.BASIS_MATCH_TOL:
        return None
    d0, d1 = m[0, 0], m[1, 1]
    if max(abs(d0.imag), abs(d1.imag)) > qlin.BASIS_MATCH_TOL:
        return None
    if d0.real < -qlin.BASIS_MATCH_TOL or d1.real < -qlin.BASIS_MATCH_TOL:
        return None
    theta0 = np.arctan2(np.sqrt(fr.lam0[1]), np.sqrt(fr.lam0[0]))
    theta1 = np.arctan2(max(d1.real, 0.0), max(d0.real, 0.0))
    return theta0, theta1


def _family_solution(theta1, modulus_sq, free=False):
    """Shared-basis family ratios for a given squared modulus |z1|^2."""
    k = 1.0 / np.tan(theta1)
    z1 = complex(np.sqrt(modulus_sq))
    z2 = complex(-k / z1.real)
    z3 = complex(-1.0 / z1.real)
    z4 = complex(z1.real / k)
    return RatioSolution(z1, z2, z3, z4, *_mags(z1, z2, z3, z4), free_modulus=free)


def same_basis_fail_profile(theta1, modulus_sq):
    """Failure probability of the shared-basis family as a function of the
    free squared modulus |z1|^2 (equal priors)."""
    w = float(modulus_sq)
    k = 1.0 / np.tan(theta1)
    gain = (w / ((1.0 + w) * (w + k * k))) * (np.cos(2.0 * theta1) ** 2) / (
        np.sin(theta1) ** 2
    )
    return 1.0 - gain


def _quadratic_roots(fr):
    """Roots w = conj(z1) of the reduced single-variable quadratic."""
    a, b = _overlap_matrices(fr)
    l0, l1 = fr.lam0, fr.lam1
    s = np.sqrt
    q2 = b[0, 0] * s(l1[1] * l0[1]) * a[1, 0] + b[0, 1] * s(l1[1] * l0[0]) * a[1, 1]
    q1 = (
        b[0, 0] * s(l1[1] * l0[1]) * a[0, 0]
        + b[0, 1] * s(l1[1] * l0[0]) * a[0, 1]
        - b[1, 0] * s(l1[0] * l0[1]) * a[1, 0]
        - b[1, 1] * s(l1[0] * l0[0]) * a[1, 1]
    )
    q0 = -b[1, 0] * s(l1[0] * l0[1]) * a[0, 0] - b[1, 1] * s(l1[0] * l0[0]) * a[0, 1]
    scale = max(abs(q2), abs(q1), abs(q0))
    if scale < qlin.ZERO_TOL:
        raise Infeasible("the zero-error conditions are degenerate for this pair")
    q2, q1, q0 = q2 / scale, q1 / scale, q0 / scale
    roots = []
    if abs(q2) < qlin.ZERO_TOL:
        if abs(q1) >= qlin.ZERO_TOL:
            roots.append(-q0 / q1)
        # the projective second root sits at infinity: not representable
    else:
        disc = np.sqrt(q1 * q1 - 4.0 * q2 * q0 + 0j)
        big = q1 + disc if abs(q1 + disc) >= abs(q1 - disc) else q1 - disc
        if abs(big) < qlin.ZERO_TOL:
            roots.extend([0j, 0j])
        else:
            t = -0.5 * big
            roots.append(t / q2)
            roots.append(q0 / t)
    return roots


def _vectors_from_root(w, fr):
    """Solve the remaining conditions for a root w = conj(z1); returns the
    four basis vectors in computational coordinates, or None when the chain
    degenerates completely."""
    s = np.sqrt
    a, _ = _overlap_matrices(fr)
    gamma = np.array([1.0 + 0j, np.conj(w)])
    big_gamma = gamma.conj()
    delta = np.array([s(fr.lam1[1]) * gamma[1], -s(fr.lam1[0]) * gamma[0]])
    eps = np.array(
        [
            -(a[0, 1] * big_gamma[0] + a[1, 1] * big_gamma[1]),
            a[0, 0] * big_gamma[0] + a[1, 0] * big_gamma[1],
        ]
    )
    phi = np.array([s(fr.lam0[1]) * eps[1], -s(fr.lam0[0]) * eps[0]])

    r_a = qlin.normalize(gamma[0] * fr.v_a[0] + gamma[1] * fr.v_a[1])
    r_a_perp = qlin.normalize(eps[0] * fr.u_a[0] + eps[1] * fr.u_a[1])
    rb_raw = delta[0] * fr.v_b[0] + delta[1] * fr.v_b[1]
    rbp_raw = phi[0] * fr.u_b[0] + phi[1] * fr.u_b[1]
    nb, nbp = np.linalg.norm(rb_raw), np.linalg.norm(rbp_raw)
    if nb < qlin.ZERO_TOL and nbp < qlin.ZERO_TOL:
        return None
    if nb < qlin.ZERO_TOL:
        r_b_perp = rbp_raw / nbp
        r_b = qlin.orth_complement(r_b_perp)
    elif nbp < qlin.ZERO_TOL:
        r_b = rb_raw / nb
        r_b_perp = qlin.orth_complement(r_b)
    else:
        r_b, r_b_perp = rb_raw / nb, rbp_raw / nbp
    return r_a, r_a_perp, r_b, r_b_perp


def _solution_from_vectors(vectors, fr):
    """Project solved basis vectors back onto the Schmidt frames to recover
    the coefficient ratios; None when a ratio is unrepresentable."""
    r_a, r_a_perp, r_b, r_b_perp = vectors
    z1 = _ratio(qlin.inner(fr.v_a[0], r_a), qlin.inner(fr.v_a[1], r_a))
    z2 = _ratio(qlin.inner(fr.v_b[0], r_b), qlin.inner(fr.v_b[1], r_b))
    z3 = _ratio(qlin.inner(fr.u_a[0], r_a_perp), qlin.inner(fr.u_a[1], r_a_perp))
    z4 = _ratio(qlin.inner(fr.u_b[0], r_b_perp), qlin.inner(fr.u_b[1], r_b_perp))
    if None in (z1, z2, z3, z4):
        return None
    return RatioSolution(z1, z2, z3, z4, *_mags(z1, z2, z3, z4))


def _frames_real(fr):
    a, b = _overlap_matrices(fr)
    return max(np.abs(a.imag).max(), np.abs(b.imag).max()) < qlin.BASIS_MATCH_TOL


def _zero_error_residuals(vectors, pair):
    r_a, r_a_perp, r_b, r_b_perp = vectors
    c1 = abs(qlin.inner(qlin.tensor(r_a, r_b), pair.psi1))
    c2 = abs(qlin.inner(qlin.tensor(r_a_perp, r_b_perp), pair.psi0))
    return c1, c2


def _numeric_candidates(pair):
    """Penalized multistart search over local basis parameters; returns
    feasible candidates as (weighted p_f, vectors) sorted by p_f."""
    psi0, psi1 = pair.psi0, pair.psi1

    def residual_sq(params):
        vecs = optimize.param_bases(params)
        c1, c2 = _zero_error_residuals(vecs, pair)
        return c1 * c1 + c2 * c2

    def penalized(params):
        vecs = optimize.param_bases(params)
        r_a, r_a_perp, r_b, r_b_perp = vecs
        c1, c2 = _zero_error_residuals(vecs, pair)
        p_f = (
            1.0
            - pair.prior0 * qlin.joint_probability(r_a, r_b, psi0)
            - pair.prior1 * qlin.joint_probability(r_a_perp, r_b_perp, psi1)
        )
        return p_f + _PENALTY * (c1 * c1 + c2 * c2)

    stage1 = optimize.nelder_mead_multistart(
        penalized, optimize.default_starts(), maxiter=2000
    )
    candidates = []
    seen = []
    for _, x in stage1[:16]:
        polish = optimize.nelder_mead_multistart(residual_sq, [x], maxiter=2000)
        _, xp = polish[0]
        vecs = optimize.param_bases(xp)
        c1, c2 = _zero_error_residuals(vecs, pair)
        if max(c1, c2) > qlin.RESIDUAL_TOL:
            continue
        r_a, r_a_perp, r_b, r_b_perp = vecs
        p_f = (
            1.0
            - pair.prior0 * qlin.joint_probability(r_a, r_b, psi0)
            - pair.prior1 * qlin.joint_probability(r_a_perp, r_b_perp, psi1)
        )
        key = tuple(np.round([abs(qlin.inner(r_a, qlin.KET0)), abs(qlin.inner(r_b, qlin.KET0)), p_f], 7))
        if key in seen:
            continue
        seen.append(key)
        candidates.append((p_f, vecs))
    candidates.sort(key=lambda item: item[0])
    return candidates


def solve_ratios(pair):
    """All coefficient-ratio solutions of the four conditions.

    The shared-basis family returns one solution flagged free_modulus (its
    z values are prefilled with the optimal modulus); other pairs return
    every representable root of the reduced quadratic, residual-checked.
    """
    if abs(qlin.inner(pair.psi0, pair.psi1)) > 1.0 - qlin.NORM_TOL:
        raise IdenticalStates("the states coincide up to a global phase")
    fr = _frames(pair)
    prod0 = fr.lam0[0] < qlin.ZERO_TOL
    prod1 = fr.lam1[0] < qlin.ZERO_TOL
    if prod0 and prod1:
        if _biorthogonal_products(fr):
            return [RatioSolution(0j, 0j, 0j, 0j, 1.0, 1.0, 1.0, 1.0)]
        raise ProductState(
            "both states are product states without per-party orthogonality"
        )
    shared = _shared_diagonal(pair, fr)
    if shared is not None:
        theta0, theta1 = shared
        if abs(np.cos(theta0 + theta1)) > _CONSTRAINT_TOL:
            raise ConstraintViolated(
                "shared-basis solvability needs tan(theta0) tan(theta1) = 1; "
                f"got theta0={theta0:.6f}, theta1={theta1:.6f}"
            )
        return [_family_solution(theta1, 1.0 / np.tan(theta1), free=True)]

    solutions = []
    if _frames_real(fr):
        for w in _quadratic_roots(fr):
            vectors = _vectors_from_root(w, fr)
            if vectors is None:
                continue
            sol = _solution_from_vectors(vectors, fr)
            if sol is None:
                continue
            if max(_condition_residuals((sol.z1, sol.z2, sol.z3, sol.z4), fr)) > qlin.RESIDUAL_TOL:
                continue
            solutions.append(sol)
    else:
        for _, vectors in _numeric_candidates(pair):
            sol = _solution_from_vectors(vectors, fr)
            if sol is None:
                continue
            solutions.append(sol)

    unique = []
    seen = set()
    for sol in solutions:
        key = (round(sol.z1.real, 8), round(sol.z1.imag, 8))
        if key in seen:
            continue
        seen.add(key)
        unique.append(sol)
    unique.sort(key=lambda s: (round(abs(s.z1), 12), s.z1.real, s.z1.imag))
    if not unique:
        raise Infeasible("no representable ratio solution satisfies the conditions")
    return unique


def _projective_scheme(kind, r_a, r_a_perp, r_b, r_b_perp, outcome_map):
    ops_a = (KrausOp(r_a, r_a), KrausOp(r_a_perp, r_a_perp))
    ops_b = (KrausOp(r_b, r_b), KrausOp(r_b_perp, r_b_perp))
    return Scheme(kind, ops_a, ops_b, dict(outcome_map))


def build_scheme(sol, pair):
    """Projective scheme from a concrete ratio solution.

    The perpendicular vectors are completed as exact orthogonal complements
    so each party's operators sum to the identity to machine precision.
    """
    if sol.free_modulus:
        raise DomainError(
            "free-modulus solution: fix |z1| first (see optimize_same_basis)"
        )
    fr = _frames(pair)
    r_a = qlin.normalize(fr.v_a[0] + sol.z1 * fr.v_a[1])
    r_b = qlin.normalize(fr.v_b[0] + sol.z2 * fr.v_b[1])
    r_a_perp = qlin.orth_complement(r_a)
    r_b_perp = qlin.orth_complement(r_b)
    c1, c2 = _zero_error_residuals((r_a, r_a_perp, r_b, r_b_perp), pair)
    if max(c1, c2) > qlin.RESIDUAL_TOL:
        raise ResidualTooLarge(f"zero-error residual {max(c1, c2):.3e}")
    return _projective_scheme("TwoFail", r_a, r_a_perp, r_b, r_b_perp, TWO_FAIL_OUTCOME_MAP)


def failure_report(scheme, pair):
    """Failure probabilities of a scheme from its outcome distribution."""
    p_fail = [0.0, 0.0]
    for n, psi in enumerate((pair.psi0, pair.psi1)):
        total = 0.0
        for (ia, ib), label in scheme.outcome_map.items():
            if label is Label.FAIL:
                op_a, op_b = scheme.ops_a[ia], scheme.ops_b[ib]
                if op_a is None or op_b is None:
                    continue
                total += qlin.joint_probability(op_a.in_bra, op_b.in_bra, psi)
        p_fail[n] = total
    p_f = pair.prior0 * p_fail[0] + pair.prior1 * p_fail[1]
    bound = states.idp_bound(pair)
    return FailureReport(p_fail[0], p_fail[1], p_f, bound.p_fidp, p_f - bound.p_fidp)


def optimize_same_basis(pair):
    """Optimal scheme for a shared-basis pair: the free modulus is fixed at
    the minimum of the failure profile (|z1|^2 = cot(theta1) for equal
    priors; a golden-section scan otherwise)."""
    if abs(qlin.inner(pair.psi0, pair.psi1)) > 1.0 - qlin.NORM_TOL:
        raise IdenticalStates("the states coincide up to a global phase")
    fr = _frames(pair)
    shared = _shared_diagonal(pair, fr)
    if shared is None:
        raise DomainError("the states do not share a diagonal Schmidt frame")
    theta0, theta1 = shared
    if abs(np.cos(theta0 + theta1)) > _CONSTRAINT_TOL:
        raise ConstraintViolated(
            "shared-basis solvability needs tan(theta0) tan(theta1) = 1; "
            f"got theta0={theta0:.6f}, theta1={theta1:.6f}"
        )
    k = 1.0 / np.tan(theta1)
    if abs(pair.prior0 - 0.5) < 1e-12:
        modulus_sq = k
    else:
        # both conditional failure probabilities coincide along the family,
        # so the prior-weighted objective reduces to the profile itself
        modulus_sq, _ = optimize.golden_section_minimize(
            lambda w: same_basis_fail_profile(theta1, w),
            1e-8,
            max(10.0, 10.0 * k * k),
        )
    return build_scheme(_family_solution(theta1, modulus_sq), pair)


def fig1_p_fail(theta1):
    """Closed-form failure probability of the mixed-axis family scheme."""
    k = 1.0 / np.tan(theta1)
    num = (1.0 - k) ** 2 + (np.cos(theta1) * k - np.sin(theta1)) ** 2
    return 1.0 - num / (4.0 * (1.0 + k * k))


def fig1_p_fidp(theta1):
    """Joint-measurement bound for the mixed-axis family."""
    return 0.5 * (np.sin(theta1) + np.cos(theta1))


def curve_fig1(steps):
    """(theta1, p_f, p_fidp) rows on the lattice k*(pi/2)/steps, k=1..steps.

    The lattice point theta1 = pi/4, where the scheme degenerates
    (cot(theta1) = 1), is replaced by a half-step offset.
    """
    if steps < 2:
        raise DomainError("steps must be at least 2")
    h = (np.pi / 2.0) / steps
    rows = []
    for k in range(1, steps + 1):
        t = min(k * h, np.pi / 2.0)
        if abs(t - np.pi / 4.0) < 1e-12:
            t += 0.5 * h
        rows.append((t, fig1_p_fail(t), fig1_p_fidp(t)))
    return rows


def _solve_numeric(pair):
    candidates = _numeric_candidates(pair)
    fr = _frames(pair)
    for p_f, vectors in candidates:
        r_a, r_a_perp, r_b, r_b_perp = vectors
        r_a_perp = qlin.orth_complement(r_a)
        r_b_perp = qlin.orth_complement(r_b)
        c1, c2 = _zero_error_residuals((r_a, r_a_perp, r_b, r_b_perp), pair)
        if max(c1, c2) > qlin.RESIDUAL_TOL:
            continue
        scheme = _projective_scheme(
            "TwoFail", r_a, r_a_perp, r_b, r_b_perp, TWO_FAIL_OUTCOME_MAP
        )
        sol = _solution_from_vectors((r_a, r_a_perp, r_b, r_b_perp), fr)
        if sol is None:
            sol = RatioSolution(np.nan, np.nan, np.nan, np.nan, 0.0, 0.0, 0.0, 0.0)
        return SolveResult(scheme, failure_report(scheme, pair), sol)
    raise Infeasible("numeric search found no bases satisfying the conditions")


def solve(pair):
    """Best two-failure scheme for a pair: minimal failure probability,
    ties broken toward the smaller |z1|."""
    if abs(pair.prior0 - 0.5) > 1e-12:
        return _solve_numeric(pair)
    sols = solve_ratios(pair)
    if len(sols) == 1 and sols[0].free_modulus:
        scheme = optimize_same_basis(pair)
        return SolveResult(scheme, failure_report(scheme, pair), sols[0])
    best = None
    for sol in sols:
        try:
            scheme = build_scheme(sol, pair)
        except ResidualTooLarge:
            continue
        report = failure_report(scheme, pair)
        key = (round(report.p_f, 12), abs(sol.z1))
        if best is None or key < best[0]:
            best = (key, SolveResult(scheme, report, sol))
    if best is None:
        raise Infeasible("no ratio solution yields a valid scheme")
    return best[1]
