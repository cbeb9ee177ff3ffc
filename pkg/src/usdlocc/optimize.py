"""Small deterministic optimizers used by the solvers and their oracles."""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

from . import qlin

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section_minimize(f, lo, hi, tol=1e-10, max_iter=200):
    """Golden-section minimum of a unimodal scalar function on [lo, hi].

    Returns (x_min, f(x_min)).
    """
    a, b = float(lo), float(hi)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) < tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def param_bases(params):
    """Local orthonormal bases from (alpha_a, phi_a, alpha_b, phi_b).

    Returns (r_a, r_a_perp, r_b, r_b_perp) with
    r = (cos(alpha), e^{i phi} sin(alpha)).
    """
    aa, pa, ab, pb = params
    r_a = np.array([np.cos(aa), np.exp(1j * pa) * np.sin(aa)])
    r_b = np.array([np.cos(ab), np.exp(1j * pb) * np.sin(ab)])
    return r_a, qlin.orth_complement(r_a), r_b, qlin.orth_complement(r_b)


def default_starts():
    """Deterministic multistart lattice over the basis parameters."""
    starts = []
    for aa in (np.pi / 8, 3 * np.pi / 8):
        for ab in (np.pi / 8, 3 * np.pi / 8):
            for pa in (0.0, np.pi / 2, np.pi, 3 * np.pi / 2):
                for pb in (0.0, np.pi / 2, np.pi, 3 * np.pi / 2):
                    starts.append((aa, pa, ab, pb))
    return starts


def nelder_mead_multistart(objective, starts, xatol=1e-12, fatol=1e-14, maxiter=4000):
    """Nelder-Mead from every start; returns results sorted by objective."""
    results = []
    for x0 in starts:
        res = minimize(
            objective,
            np.asarray(x0, dtype=float),
            method="Nelder-Mead",
            options={"xatol": xatol, "fatol": fatol, "maxiter": maxiter},
        )
        results.append((float(res.fun), np.asarray(res.x, dtype=float)))
    results.sort(key=lambda item: item[0])
    return results
