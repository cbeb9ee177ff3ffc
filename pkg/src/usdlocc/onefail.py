"""Single-failure-outcome discrimination schemes.

Here only the outcome pair (0,1) means failure: (0,0) and (1,1) both
identify state 0 and (1,0) identifies state 1. That asks for orthonormal
local bases with

    (<r_A| (x) <r_B|) |psi1> = 0
    (<r_A_perp| (x) <r_B_perp|) |psi1> = 0
    (<r_A_perp| (x) <r_B|) |psi0> = 0

which is generically overdetermined; the closed form exists for pairs
sharing a Schmidt frame with psi1 proportional to |00> - |11> there.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import optimize, qlin, twofail
from .errors import DomainError
from .twofail import Label

ONE_FAIL_OUTCOME_MAP = {
    (0, 0): Label.S0,
    (1, 1): Label.S0,
    (1, 0): Label.S1,
    (0, 1): Label.FAIL,
}

_BOUNDARY_WARN = 1e-6


@dataclass(frozen=True)
class Feasibility:
    """Outcome of the feasibility search: witness bases when feasible,
    otherwise the best residual reached."""

    feasible: bool
    residual: float
    bases: tuple | None


def _condition_residuals(vectors, pair):
    r_a, r_a_perp, r_b, r_b_perp = vectors
    c1 = abs(qlin.inner(qlin.tensor(r_a, r_b), pair.psi1))
    c2 = abs(qlin.inner(qlin.tensor(r_a_perp, r_b_perp), pair.psi1))
    c3 = abs(qlin.inner(qlin.tensor(r_a_perp, r_b), pair.psi0))
    return c1, c2, c3


def _same_basis_vectors(theta0):
    """Closed-form basis vectors in the shared frame: r_A propto
    |0> + sqrt(tan theta0)|1>, written tan-free as (sqrt(cos), sqrt(sin))."""
    c, s = np.cos(theta0), np.sin(theta0)
    r_a = qlin.normalize(np.array([np.sqrt(c), np.sqrt(s)], dtype=complex))
    r_b = qlin.normalize(np.array([np.sqrt(s), np.sqrt(c)], dtype=complex))
    return r_a, qlin.orth_complement(r_a), r_b, qlin.orth_complement(r_b)


def _shared_real_diagonal(pair, fr):
    """psi1's diagonal (d0, d1) in psi0's canonical frame when psi1 is
    diagonal there with real coefficients, else None."""
    amp1 = pair.psi1.reshape(2, 2)
    m = fr.u_a.conj() @ amp1 @ fr.u_b.conj().T
    if max(abs(m[0, 1]), abs(m[1, 0])) > qlin.BASIS_MATCH_TOL:
        return None
    if max(abs(m[0, 0].imag), abs(m[1, 1].imag)) > qlin.BASIS_MATCH_TOL:
        return None
    return m[0, 0].real, m[1, 1].real


def one_fail_feasible(pair):
    """Search for bases satisfying the three single-failure conditions.

    Uses the closed form when the pair shares a Schmidt frame with psi1
    proportional to |00> - |11> there; otherwise a penalized numeric
    search over basis angles. Infeasibility is reported, not raised.
    """
    fr = twofail._frames(pair)
    diag = _shared_real_diagonal(pair, fr)
    if diag is not None and abs(diag[0] + diag[1]) < qlin.BASIS_MATCH_TOL:
        theta0 = np.arctan2(np.sqrt(fr.lam0[1]), np.sqrt(fr.lam0[0]))
        fa, fap, fb, fbp = _same_basis_vectors(theta0)
        r_a = fa[0] * fr.u_a[0] + fa[1] * fr.u_a[1]
        r_b = fb[0] * fr.u_b[0] + fb[1] * fr.u_b[1]
        bases = (r_a, qlin.orth_complement(r_a), r_b, qlin.orth_complement(r_b))
        return Feasibility(True, max(_condition_residuals(bases, pair)), bases)

    def residual_sq(params):
        c1, c2, c3 = _condition_residuals(optimize.param_bases(params), pair)
        return c1 * c1 + c2 * c2 + c3 * c3

    results = optimize.nelder_mead_multistart(
        residual_sq, optimize.default_starts(), maxiter=2000
    )
    _, best_x = results[0]
    bases = optimize.param_bases(best_x)
    residual = max(_condition_residuals(bases, pair))
    if residual < qlin.RESIDUAL_TOL:
        return Feasibility(True, residual, bases)
    return Feasibility(False, residual, None)


def solve_one_fail_same_basis(theta0):
    """Projective single-failure scheme for the shared-basis family with
    psi1 = (|00> - |11>)/sqrt(2)."""
    if not 0.0 < theta0 <= np.pi / 2.0:
        raise DomainError("theta0 must lie in (0, pi/2)")
    if min(theta0, np.pi / 2.0 - theta0) < _BOUNDARY_WARN:
        warnings.warn(
            "theta0 is at the degenerate boundary: state 0 approaches a product state",
            RuntimeWarning,
            stacklevel=2,
        )
    r_a, r_a_perp, r_b, r_b_perp = _same_basis_vectors(theta0)
    return twofail._projective_scheme(
        "OneFail", r_a, r_a_perp, r_b, r_b_perp, ONE_FAIL_OUTCOME_MAP
    )


def one_fail_report(scheme, pair):
    """Failure report for a single-failure scheme."""
    return twofail.failure_report(scheme, pair)


def fig2_p_fail(theta0):
    """Closed-form failure probability of the shared-basis family."""
    return 0.5 * (np.cos(theta0) - np.sin(theta0)) ** 2 + 0.25


def fig2_p_fidp(theta0):
    """Joint-measurement bound for the shared-basis family."""
    return abs(np.cos(theta0) - np.sin(theta0)) / np.sqrt(2.0)


def curve_fig2(steps):
    """(theta0, p_f, p_fidp) rows on the lattice k*(pi/2)/steps, k=1..steps."""
    if steps < 2:
        raise DomainError("steps must be at least 2")
    h = (np.pi / 2.0) / steps
    grid = [min(k * h, np.pi / 2.0) for k in range(1, steps + 1)]
    return [(t, fig2_p_fail(t), fig2_p_fidp(t)) for t in grid]
