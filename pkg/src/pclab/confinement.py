"""Confinement certificates, predicted versus measured determinant orders, verdicts.

Notation follows the block split of an n x n matrix with an r x r top-left
block ``A``: ``M = [[A, B], [C, D]]``.  Subscripts ``_{k,i}`` refer to the
``eps**i`` coefficient of ``beta_k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from pclab.dynamics import ModelParams, TrajectorySegment, run_backward, run_trajectory
from pclab.errors import BadPartition, DegenerateData, InsufficientTruncation, SingularD
from pclab.matrix import BlockPartition, Mat, blocks, det, inverse
from pclab.scalar import Scalar
from pclab.series import LaurentSeries, SeriesClass, classify, in_ak, ls_det_valuation

STEP_NAMES = ("Z1", "Z2", "Z3", "m+4")
CLASS_CHAIN = (SeriesClass.POLE_A_L, SeriesClass.POLE_A_L, SeriesClass.A_K, SeriesClass.REGULAR)
CONFINEMENT_TIME = 4


def expected_pattern(r: int) -> tuple[int, int, int, int]:
    return (-r, -r, r, 0)


@dataclass(frozen=True)
class ZTriple:
    z1: Mat
    z2: Mat | None
    z3: Mat | None
    dets: tuple[Scalar, Scalar | None, Scalar | None]

    @property
    def first_vanishing(self) -> str | None:
        for name, d in zip(STEP_NAMES, self.dets):
            if d is not None and not d:
                return name
        return None


@dataclass(frozen=True)
class _InitialBlocks:
    C0: Mat
    D0: Mat
    Dinv: Mat
    G: Mat  # D_{m,0}^-1 C_{m,0}
    B_prev: Mat
    D_prev: Mat
    a12: Mat
    a22: Mat


def _initial_blocks(prev: LaurentSeries, cur: LaurentSeries, p: BlockPartition,
                    params: ModelParams) -> _InitialBlocks:
    if p.maximal:
        raise BadPartition("certificates need r < n")
    if not in_ak(cur, p.r):
        raise DegenerateData("beta_m is not normalized: its order-0 top rows are nonzero")
    _, _, C0, D0 = blocks(cur.coeff(0), p)
    if not det(D0):
        raise SingularD("det D_{m,0} = 0: hypotheses void")
    Dinv = inverse(D0)
    _, B_prev, _, D_prev = blocks(prev.coeff(0), p)
    _, a12, _, a22 = blocks(params.alpha, p)
    return _InitialBlocks(C0, D0, Dinv, Dinv @ C0, B_prev, D_prev, a12, a22)


def compute_Z(prev: LaurentSeries, cur: LaurentSeries, p: BlockPartition,
              params: ModelParams) -> ZTriple:
    """Certificates from the order-0 data of ``beta_{m-1}``, ``beta_m`` and alpha.

    Stops at the first singular certificate: ``z2`` needs ``Z1^-1`` and ``z3``
    needs both inverses.
    """
    b = _initial_blocks(prev, cur, p, params)
    m = params.m
    z1 = b.Dinv.scale(m) - b.D_prev - b.D0 - b.a22 - b.G @ (b.B_prev + b.a12)
    d1 = det(z1)
    if not d1:
        return ZTriple(z1, None, None, (d1, None, None))
    z1inv = inverse(z1)
    z2 = z1inv.scale(m + 1) + b.G @ b.B_prev - b.Dinv.scale(m) + b.D_prev
    d2 = det(z2)
    if not d2:
        return ZTriple(z1, z2, None, (d1, d2, None))
    z3 = b.D0 - z1inv.scale(m + 1) + inverse(z2).scale(m + 2)
    return ZTriple(z1, z2, z3, (d1, d2, det(z3)))


@dataclass(frozen=True)
class Prediction:
    valuations: tuple[int, int, int, int] | None
    not_generic: str | None = None


def predict(z: ZTriple | None, p: BlockPartition) -> Prediction:
    """Expected det orders of beta_{m+1..m+4}, or the first vanishing certificate.

    ``z`` is None in the maximal-rank case, where no certificate exists.  The
    order at m+4 is predicted as 0 without a certificate of its own.
    """
    if z is not None:
        bad = z.first_vanishing
        if bad is not None:
            return Prediction(None, bad)
    return Prediction(expected_pattern(p.r))


@dataclass
class Measurement:
    valuations: list[int | None]
    lower_bounds: list[int | None]
    classes: list[SeriesClass | None]
    failing_step: int | None = None

    def matches(self, k: int, target: int) -> bool | None:
        """Whether the det order at step ``k`` (1..4) equals ``target``; None if unknown."""
        v = self.valuations[k - 1]
        if v is not None:
            return v == target
        lb = self.lower_bounds[k - 1]
        if lb is not None and lb > target:
            return False
        return None


def measure(segment: TrajectorySegment, p: BlockPartition) -> Measurement:
    """Det orders and ring classes of ``beta_{m+1} .. beta_{m+4}``."""
    vals: list[int | None] = [None] * 4
    bounds: list[int | None] = [None] * 4
    classes: list[SeriesClass | None] = [None] * 4
    failing = None
    for k in range(1, 5):
        if k + 1 >= len(segment.states):
            if failing is None:
                failing = k
            break
        state = segment.states[k + 1]
        classes[k - 1] = classify(state, p)
        try:
            vals[k - 1], _ = ls_det_valuation(state)
        except InsufficientTruncation as exc:
            bounds[k - 1] = exc.lower_bound
    return Measurement(vals, bounds, classes, failing)


@dataclass
class ConfinementReport:
    r: int
    predicted_valuations: tuple[int, ...] | None
    not_generic: str | None
    measured_valuations: list[int | None]
    lower_bounds: list[int | None]
    z_dets: tuple[Scalar | None, ...]
    verdict: str
    reason: str | None
    confinement_time: int | None
    failing_step: int | None
    class_trace: list[SeriesClass | None]

    @property
    def confined(self) -> bool:
        return self.verdict == "Confined"

    @property
    def label(self) -> str:
        if self.verdict == "NotConfined":
            return f"NotConfined:{self.reason}"
        return self.verdict


def _confinement_time(m: Measurement) -> int | None:
    for k in range(1, 5):
        cls = m.classes[k - 1]
        if m.valuations[k - 1] == 0 and cls in (SeriesClass.REGULAR, SeriesClass.A_K):
            return k
    return None


def verdict(predicted: Prediction, measured: Measurement, r: int,
            z: ZTriple | None = None) -> ConfinementReport:
    pattern = expected_pattern(r)
    result, reason, failing = "Confined", None, measured.failing_step
    for k in range(1, 5):
        ok = measured.matches(k, pattern[k - 1])
        if ok is None:
            result, reason, failing = "Indeterminate", None, k
            break
        if not ok:
            result, reason = "NotConfined", STEP_NAMES[k - 1]
            break
    time = _confinement_time(measured)
    if result == "Confined":
        if measured.classes[3] != SeriesClass.REGULAR:
            result, reason = "NotConfined", "class"
        elif time != CONFINEMENT_TIME:
            result, reason = "NotConfined", "time"
    return ConfinementReport(
        r=r,
        predicted_valuations=predicted.valuations,
        not_generic=predicted.not_generic,
        measured_valuations=list(measured.valuations),
        lower_bounds=list(measured.lower_bounds),
        z_dets=z.dets if z is not None else (),
        verdict=result,
        reason=reason,
        confinement_time=time if result == "Confined" else None,
        failing_step=failing,
        class_trace=list(measured.classes),
    )


@dataclass
class CertificateRecord:
    report: ConfinementReport
    z: ZTriple | None
    checks: dict[str, bool] = field(default_factory=dict)
    segment: TrajectorySegment | None = None

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def failed_checks(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]


def _order0_blocks(s: LaurentSeries, p: BlockPartition, order: int = 0):
    return blocks(s.coeff(order), p)


def verify_certificates(prev: LaurentSeries, cur: LaurentSeries, p: BlockPartition,
                    params: ModelParams, backward: bool = True) -> CertificateRecord:
    """Run the orbit and check every certificate statement against it.

    Checks recorded (when their hypotheses hold):

    * ``Z1<=>m+1``, ``Z2<=>m+2``, ``Z3<=>m+3``: nonvanishing certificate iff
      the measured det order is the generic one;
    * ``Z1=def``, ``Z2=def``, ``Z3=def``: the closed formulas agree with the
      blocks read off the orbit;
    * ``C_m+3``, ``schur_m+3``: structure of the order-0 and order-1
      coefficients of beta_{m+3};
    * ``class_chain`` and ``backward`` on confined orbits;
    * ``pattern`` in the maximal-rank case.
    """
    seg = run_trajectory(prev, cur, params, 4)
    meas = measure(seg, p)
    r, m = p.r, params.m
    pattern = expected_pattern(r)
    checks: dict[str, bool] = {}

    if p.maximal:
        z = None
        pred = predict(None, p)
        rep = verdict(pred, meas, r)
        checks["pattern"] = meas.valuations == list(pattern)
    else:
        z = compute_Z(prev, cur, p, params)
        pred = predict(z, p)
        rep = verdict(pred, meas, r, z)
        b = _initial_blocks(prev, cur, p, params)
        d1, d2, d3 = z.dets
        got = [meas.matches(k, pattern[k - 1]) for k in (1, 2, 3)]
        checks["Z1<=>m+1"] = got[0] is not None and bool(d1) == got[0]
        if d1:
            checks["Z2<=>m+2"] = got[1] is not None and bool(d2) == got[1]
        if d1 and d2:
            checks["Z3<=>m+3"] = got[2] is not None and bool(d3) == got[2]

        def have(k):
            return len(seg.states) > k + 1

        if have(1):
            _, B1, _, D1 = _order0_blocks(seg.states[2], p)
            checks["Z1=def"] = D1 + b.G @ B1 == z.z1
        if d1 and have(2):
            _, B2, _, D2 = _order0_blocks(seg.states[3], p)
            checks["Z2=def"] = D2 + b.G @ B2 == z.z2
        if d1 and d2 and have(3):
            s3 = seg.states[4]
            _, _, C30, D30 = _order0_blocks(s3, p)
            checks["Z3=def"] = D30 == z.z3
            checks["C_m+3"] = C30 == z.z3 @ b.G
            A31, B31, _, _ = _order0_blocks(s3, p, 1)
            Am1, Bm1, _, _ = _order0_blocks(cur, p, 1)
            sd1 = Am1 - Bm1 @ b.G
            checks["schur_m+3"] = A31 - B31 @ b.G == sd1.scale(Fraction(-(m + 3), m))

    if rep.confined:
        checks["class_chain"] = tuple(meas.classes) == CLASS_CHAIN
        if backward:
            checks["backward"] = backward_consistent(seg, params)
    return CertificateRecord(rep, z, checks, seg)


def backward_consistent(seg: TrajectorySegment, params: ModelParams) -> bool:
    """Four reversed steps from ``(beta_{m+4}, beta_{m+3})`` reproduce the orbit."""
    m = seg.m
    back = run_backward(seg.beta(m + 4), seg.beta(m + 3), m + 4, params, 4)
    forward = [seg.beta(m + 2), seg.beta(m + 1), seg.beta(m), seg.beta(m - 1)]
    return all(b.agrees_with(f) and b.window > 0 for b, f in zip(back, forward))


def analyze(prev: LaurentSeries, cur: LaurentSeries, p: BlockPartition,
            params: ModelParams) -> ConfinementReport:
    """Predict, run four steps, measure and judge."""
    seg = run_trajectory(prev, cur, params, 4)
    meas = measure(seg, p)
    z = None if p.maximal else compute_Z(prev, cur, p, params)
    return verdict(predict(z, p), meas, p.r, z)
