"""Discrimination without classical communication.

When neither party can talk to the other, the outcome labels must agree
on their own. Classification by the Schmidt ranks of the two states:
both entangled means every identifying operator vanishes; both product
allows perfect discrimination only with per-party orthogonal factors;
exactly one product state allows a detector for the other state when the
cross conditions on the entangled state hold.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from . import qlin, twofail
from .errors import NotDetectorCase
from .twofail import KrausOp, Label

ALWAYS_FAIL = "AlwaysFail"
PERFECT = "PerfectOrthogonalProduct"
DETECTOR = "OneStateDetector"


@dataclass(frozen=True)
class NoCommClassification:
    case_label: str
    detail: str
    detected: int | None = None


@dataclass(frozen=True)
class NoCommScheme:
    """Three-outcome per-party operators labeled (0, 1, f); None stands
    for the zero operator."""

    ops_a: tuple
    ops_b: tuple
    detect_prob: float

    @property
    def detected(self):
        if self.ops_a[0] is None:
            return 1
        if self.ops_a[1] is None:
            return 0
        return None

    @property
    def outcome_map(self):
        table = {}
        for j, k in product(range(3), range(3)):
            if (j, k) == (0, 0):
                table[(j, k)] = Label.S0
            elif (j, k) == (1, 1):
                table[(j, k)] = Label.S1
            else:
                table[(j, k)] = Label.FAIL
        return table


def _product_frame(lam, basis_a, basis_b):
    """Frame of a product state reordered so index 0 carries the factor
    (the canonical solver order puts the zero coefficient first)."""
    if lam[0] < qlin.ZERO_TOL:
        return (basis_a[1], basis_a[0]), (basis_b[1], basis_b[0])
    return (basis_a[0], basis_a[1]), (basis_b[0], basis_b[1])


def _cross_conditions(frame_a, frame_b, psi):
    c1 = abs(qlin.inner(qlin.tensor(frame_a[1], frame_b[0]), psi))
    c2 = abs(qlin.inner(qlin.tensor(frame_a[0], frame_b[1]), psi))
    return max(c1, c2)


def classify(pair):
    """Which no-communication case the pair falls into."""
    fr = twofail._frames(pair)
    prod0 = fr.lam0[0] < qlin.ZERO_TOL
    prod1 = fr.lam1[0] < qlin.ZERO_TOL
    if not prod0 and not prod1:
        return NoCommClassification(ALWAYS_FAIL, "(i)&(iii)")
    if prod0 and prod1:
        same_a = abs(qlin.inner(fr.u_a[1], fr.v_a[1]))
        same_b = abs(qlin.inner(fr.u_b[1], fr.v_b[1]))
        if same_a < qlin.ZERO_TOL and same_b < qlin.ZERO_TOL:
            return NoCommClassification(PERFECT, "(ii)&(iv)")
        detail = "(ii)&(iv)"
        if max(same_a, same_b) > 1.0 - qlin.ZERO_TOL:
            detail += " coincident-factor branch"
        return NoCommClassification(ALWAYS_FAIL, detail)
    if prod0:
        frame_a, frame_b = _product_frame(fr.lam0, fr.u_a, fr.u_b)
        if _cross_conditions(frame_a, frame_b, pair.psi1) < qlin.ZERO_TOL:
            return NoCommClassification(DETECTOR, "(i)&(iv)", detected=1)
        return NoCommClassification(ALWAYS_FAIL, "(i)&(iv)")
    frame_a, frame_b = _product_frame(fr.lam1, fr.v_a, fr.v_b)
    if _cross_conditions(frame_a, frame_b, pair.psi0) < qlin.ZERO_TOL:
        return NoCommClassification(DETECTOR, "(ii)&(iii)", detected=0)
    return NoCommClassification(ALWAYS_FAIL, "(ii)&(iii)")


def build_detector(pair):
    """Detector scheme for the detector and perfect-product cases."""
    cls = classify(pair)
    if cls.case_label == ALWAYS_FAIL:
        raise NotDetectorCase(f"classification is {cls.case_label} {cls.detail}")
    fr = twofail._frames(pair)
    if cls.case_label == PERFECT:
        a0, b0 = fr.u_a[1], fr.u_b[1]
        a1, b1 = fr.v_a[1], fr.v_b[1]
        ops_a = (KrausOp(a0, a0), KrausOp(a1, a1), None)
        ops_b = (KrausOp(b0, b0), KrausOp(b1, b1), None)
        return NoCommScheme(ops_a, ops_b, 1.0)
    if cls.detected == 1:
        frame_a, frame_b = _product_frame(fr.lam0, fr.u_a, fr.u_b)
        other = pair.psi1
    else:
        frame_a, frame_b = _product_frame(fr.lam1, fr.v_a, fr.v_b)
        other = pair.psi0
    hit = KrausOp(frame_a[1], frame_a[1]), KrausOp(frame_b[1], frame_b[1])
    miss = KrausOp(frame_a[0], frame_a[0]), KrausOp(frame_b[0], frame_b[0])
    detect_prob = qlin.joint_probability(frame_a[1], frame_b[1], other)
    if cls.detected == 1:
        ops_a = (None, hit[0], miss[0])
        ops_b = (None, hit[1], miss[1])
    else:
        ops_a = (hit[0], None, miss[0])
        ops_b = (hit[1], None, miss[1])
    return NoCommScheme(ops_a, ops_b, float(detect_prob))


def detection_probability(scheme, pair):
    """(p_detect, p_fail_0, p_fail_1) of a no-communication scheme."""

    def cell(n, j):
        op_a, op_b = scheme.ops_a[j], scheme.ops_b[j]
        if op_a is None or op_b is None:
            return 0.0
        psi = pair.psi0 if n == 0 else pair.psi1
        return qlin.joint_probability(op_a.in_bra, op_b.in_bra, psi)

    p_fail_0 = max(0.0, 1.0 - cell(0, 0) - cell(0, 1))
    p_fail_1 = max(0.0, 1.0 - cell(1, 0) - cell(1, 1))
    d = scheme.detected
    if d is None:
        p_detect = min(cell(0, 0), cell(1, 1))
    else:
        p_detect = cell(d, d)
    return float(p_detect), float(p_fail_0), float(p_fail_1)
