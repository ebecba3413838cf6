"""Torus-surgery bookkeeping and the symbolic surgery spinor.

The gluing data is an SL(3,Z) normal form (m, p, a, b) with mb - pa = 1
plus a positive rational area constant C.  The cut-off profile is a
formal constant parameter s ranging over [0,1]: every in-scope claim
reduces to exact statements about expressions affine in s.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from .chart import Chart
from .coeffs import CoeffExpr
from .complexes import (ExactSequenceProblem, SequenceSolution,
                        solve_exact_sequence)
from .errors import LogspinorError
from .forms import (DifferentialForm, exp_two_form, exterior_d,
                    form_imag_part)
from .scalars import I, QQi
from .spinors import even_pairing_dim4, pairing_volume_coeff


@dataclass(frozen=True)
class SurgeryData:
    """Unimodular gluing data; p = 0 means the boundary circle is
    null-homotopic and the operation is trivial."""

    m: int
    p: int
    a: int
    b: int
    C: Fraction = Fraction(1)

    def __post_init__(self):
        if self.m * self.b - self.p * self.a != 1:
            raise ValueError("gluing data must satisfy mb - pa = 1")
        if self.C <= 0:
            raise ValueError("area constant must be positive")

    @property
    def is_trivial(self) -> bool:
        return self.p == 0

    def shifted(self, l: int) -> "SurgeryData":
        return SurgeryData(self.m, self.p, self.a + self.m * l,
                           self.b + self.p * l, self.C)


def multiplicity(d: SurgeryData) -> int:
    """Degree of the boundary-circle projection: the top-left entry of
    the normal form."""
    return d.m


# ---------------------------------------------------------------------------
# The nonvanishing shift
# ---------------------------------------------------------------------------


@dataclass
class ShiftResult:
    l: int
    data: SurgeryData  # with the shifted (a, b)
    slope: int         # coefficient of s in  m*b*s - p*a
    constant: int      # the value at s = 0, i.e. -p*a

    def factor_at(self, s: Fraction) -> Fraction:
        return Fraction(self.slope) * s + self.constant


def _factor_has_root_in_unit_interval(slope: int, constant: int) -> bool:
    """Exact root location for slope*s + constant on [0,1]."""
    if slope == 0:
        return constant == 0
    root = Fraction(-constant, slope)
    return 0 <= root <= 1


def condition_shift(d: SurgeryData, bound: int = 50) -> ShiftResult:
    """Smallest |l| (positive first on ties) replacing (a, b) by
    (a+ml, b+pl) so that m*b*s - p*a has no zero for s in [0,1].  The
    replacement preserves unimodularity."""
    if d.p == 0:
        raise ValueError("shift needs p nonzero (nontrivial data)")
    candidates = [0]
    for k in range(1, bound + 1):
        candidates.extend((k, -k))
    for l in candidates:
        nd = d.shifted(l)
        slope = nd.m * nd.b
        constant = -nd.p * nd.a
        if slope == 0 and constant == 0:
            continue
        if not _factor_has_root_in_unit_interval(slope, constant):
            return ShiftResult(l, nd, slope, constant)
    raise LogspinorError(f"no admissible shift with |l| <= {bound}")


# ---------------------------------------------------------------------------
# The surgery spinor
# ---------------------------------------------------------------------------


def surgery_chart() -> Tuple[Chart, CoeffExpr]:
    """A 2-variable chart with logarithmic z1 and the cut-off parameter
    s (a real constant symbol); returns (chart, s)."""
    chart = Chart(("z1", "z2"), log_vars=("z1",))
    s = chart.add_symbol("s", derivatives={}, real=True)
    return chart, s


def surgery_two_form(d: SurgeryData, chart: Chart,
                     s: CoeffExpr) -> DifferentialForm:
    """The complex 2-form whose exponential (times z1) is the surgery
    spinor: a log-log cut-off term, a torus area term, and the mixed
    log term through w2 = C(a/2 - p) z2 - C(a/2 + p) z̄2."""
    C = d.C
    z1inv = CoeffExpr.var(chart, "z1", -1)
    z1binv = CoeffExpr.var(chart, "z1_bar", -1)
    dz1 = DifferentialForm.gen(chart, "z1")
    dz1b = DifferentialForm.gen(chart, "z1_bar")
    dz2 = DifferentialForm.gen(chart, "z2")
    dz2b = DifferentialForm.gen(chart, "z2_bar")
    dw2 = (dz2 * Fraction(C * (Fraction(d.a, 2) - d.p))
           - dz2b * Fraction(C * (Fraction(d.a, 2) + d.p)))
    log_log = (z1inv * dz1).wedge(z1binv * dz1b)
    return (log_log * s * Fraction(-d.m * C, 2)
            - dz2.wedge(dz2b) * Fraction(d.b * C)
            + (z1inv * dz1).wedge(dw2))


def surgery_spinor(d: SurgeryData) -> DifferentialForm:
    """z1 * exp of the surgery 2-form, built on a fresh chart whose
    cut-off symbol is named s."""
    chart, s = surgery_chart()
    w = surgery_two_form(d, chart, s)
    return exp_two_form(w) * CoeffExpr.var(chart, "z1")


def spinor_in_regime(phi: DifferentialForm, s_value) -> DifferentialForm:
    """Substitute the cut-off parameter: 0 inside the small disk, 1
    outside the transition annulus."""
    return phi.substitute_symbol("s", s_value)


# ---------------------------------------------------------------------------
# Pairing factor
# ---------------------------------------------------------------------------


@dataclass
class PairingFactor:
    factor: CoeffExpr              # affine in s
    constant_term: QQi             # value at s = 0
    slope: QQi                     # coefficient of s
    ratio: Fraction                # factor / (m b s - p a)
    nonvanishing_on_unit_interval: bool


def pairing_factor(d: SurgeryData) -> PairingFactor:
    """Top coefficient of the spinor paired against its conjugate,
    certified by exact division to be a nonzero rational multiple of
    m*b*s - p*a."""
    chart, s = surgery_chart()
    w = surgery_two_form(d, chart, s)
    phi = exp_two_form(w) * CoeffExpr.var(chart, "z1")
    pairing = even_pairing_dim4(phi, phi.conjugate())
    factor = pairing_volume_coeff(pairing)

    c0 = QQi(0)
    c1 = QQi(0)
    for mono, c in factor.terms.items():
        if any(mono.exps):
            raise LogspinorError("pairing factor kept chart variables")
        if mono.syms == ():
            c0 = c
        elif mono.syms == (("s", 1),):
            c1 = c
        else:
            raise LogspinorError("pairing factor is not affine in s")
    if not (c0.is_rational() and c1.is_rational()):
        raise LogspinorError("pairing factor is not real")

    slope_t = Fraction(d.m * d.b)
    const_t = Fraction(-d.p * d.a)
    # exact division of c1*s + c0 by slope_t*s + const_t
    if slope_t != 0:
        ratio = c1.re / slope_t
    elif const_t != 0:
        ratio = c0.re / const_t
    else:
        raise LogspinorError("target factor is identically zero")
    if c1.re != ratio * slope_t or c0.re != ratio * const_t:
        raise LogspinorError("pairing factor is not proportional to the "
                             "unimodular form")
    if ratio == 0:
        raise LogspinorError("pairing factor vanished identically")

    if c1.is_zero():
        nonvan = not c0.is_zero()
    else:
        root = -c0.re / c1.re
        nonvan = not (0 <= root <= 1)
    return PairingFactor(factor, c0, c1, ratio, nonvan)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass
class SurgeryReport:
    multiplicity: int
    shift_l: int
    shifted_a: int
    shifted_b: int
    pairing_factor: str
    pairing_ratio: str
    nonvanishing_on_unit_interval: bool
    closed_in_both_regimes: bool
    kappa_before: int
    kappa_after: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def surgery_report(d: SurgeryData, kappa_before: int = 0) -> SurgeryReport:
    if d.is_trivial:
        raise ValueError("trivial data: the boundary circle bounds")
    shift = condition_shift(d)
    nd = shift.data
    pf = pairing_factor(nd)
    phi = surgery_spinor(nd)
    chart = phi.chart
    z1inv = CoeffExpr.var(chart, "z1", -1)
    stripped = phi * z1inv
    closed = all(
        exterior_d(spinor_in_regime(stripped, v)).is_zero() for v in (0, 1)
    ) and exterior_d(stripped).is_zero()
    return SurgeryReport(
        multiplicity=multiplicity(d),
        shift_l=shift.l,
        shifted_a=nd.a,
        shifted_b=nd.b,
        pairing_factor=str(pf.factor),
        pairing_ratio=str(pf.ratio),
        nonvanishing_on_unit_interval=pf.nonvanishing_on_unit_interval,
        closed_in_both_regimes=closed,
        kappa_before=kappa_before,
        kappa_after=kappa_before + 1,
    )


def kappa_track(sequence: Sequence[SurgeryData], kappa0: int = 0) -> int:
    """Each nontrivial operation adds one type-changing component."""
    for d in sequence:
        if d.is_trivial:
            raise ValueError("trivial operation in the sequence")
    return kappa0 + len(sequence)


# ---------------------------------------------------------------------------
# Coordinate identity near the divisor
# ---------------------------------------------------------------------------


def log_coordinate_identity(cprime: Fraction,
                            rule_factor: int = 1) -> bool:
    """With w1 = E z1 for a symbol E whose w̄2-derivative is C'E, the
    form dw1/w1 ^ dw2 equals dz1/z1 ^ dw2 - C' dw2 ^ dw̄2.  rule_factor
    perturbs the registered rule (a negative control when != 1)."""
    chart = Chart(("z1", "w2"), log_vars=("z1",))
    cprime = Fraction(cprime)
    E = chart.add_symbol("E", derivatives={})
    chart.set_symbol_rules("E", derivatives={
        "w2_bar": E * QQi(rule_factor * cprime)})
    z1 = CoeffExpr.var(chart, "z1")
    w1 = E * z1
    dw1 = exterior_d(DifferentialForm.from_coeff(w1))
    lhs = dw1.map_coeffs(lambda c: c.div_unit(w1))
    dw2 = DifferentialForm.gen(chart, "w2")
    dw2b = DifferentialForm.gen(chart, "w2_bar")
    dz1 = DifferentialForm.gen(chart, "z1")
    z1inv = CoeffExpr.var(chart, "z1", -1)
    rhs = (z1inv * dz1).wedge(dw2) - dw2.wedge(dw2b) * cprime
    return lhs.wedge(dw2) == rhs


# ---------------------------------------------------------------------------
# Pullback of the area form in polar-type coordinates
# ---------------------------------------------------------------------------


def polar_area_lemma() -> bool:
    """For z = rho e^(i theta) (phase as a formal symbol P with
    dP = iP dtheta), dz ^ dz̄ equals the unit P P̄ times
    -i d(rho^2) ^ dtheta, and dz/z = drho/rho + i dtheta."""
    chart = Chart(("rho", "theta"), log_vars=("rho",))
    P = chart.add_symbol("P", opaque=False, derivatives={})
    Pb = chart.add_symbol("Pb", derivatives={})
    chart.set_symbol_rules("P", derivatives={"theta": P * I}, conjugate=Pb)
    chart.set_symbol_rules("Pb", derivatives={"theta": Pb * (-I)}, conjugate=P)
    rho = CoeffExpr.var(chart, "rho")
    z = rho * P
    zbar = rho * Pb
    dz = exterior_d(DifferentialForm.from_coeff(z))
    dzbar = exterior_d(DifferentialForm.from_coeff(zbar))
    lhs = dz.wedge(dzbar).map_coeffs(lambda c: c.div_unit(P * Pb))
    dtheta = DifferentialForm.gen(chart, "theta")
    rho_sq = DifferentialForm.from_coeff(rho * rho)
    rhs = exterior_d(rho_sq).wedge(dtheta) * (-I)
    ok_area = lhs == rhs
    log_lhs = dz.map_coeffs(lambda c: c.div_unit(z))
    drho = DifferentialForm.gen(chart, "rho")
    rhoinv = CoeffExpr.var(chart, "rho", -1)
    ok_log = log_lhs == (rhoinv * drho) + dtheta * I
    return ok_area and ok_log


def pullback_area_identity(d: SurgeryData) -> bool:
    """The gluing map pulls the product area form back to the imaginary
    part of the surgery 2-form (outer regime), verified in coordinates
    (r, theta1, theta2, theta3) with a symbol L for log(e r).

    Uses polar_area_lemma for the radial factor: with the glued radius
    squared equal to L, the first area term is C dL ^ (m dθ1 + a dθ3).
    """
    if not polar_area_lemma():
        return False
    chart = Chart(("r", "t1", "t2", "t3"), log_vars=("r",))
    rinv = CoeffExpr.var(chart, "r", -1)
    L = chart.add_symbol("L", derivatives={"r": rinv}, real=True)
    C = Fraction(d.C)
    dr = DifferentialForm.gen(chart, "r")
    dt1 = DifferentialForm.gen(chart, "t1")
    dt2 = DifferentialForm.gen(chart, "t2")
    dt3 = DifferentialForm.gen(chart, "t3")

    dL = exterior_d(DifferentialForm.from_coeff(L))
    dtheta1p = dt1 * d.m + dt3 * d.a  # angle of the glued first factor
    term1 = dL.wedge(dtheta1p) * C
    # second factor: z2' = t2 + i (p t1 + b t3), fully symbolic
    t2c = CoeffExpr.var(chart, "t2")
    lin = CoeffExpr.var(chart, "t1") * d.p + CoeffExpr.var(chart, "t3") * d.b
    z2p = DifferentialForm.from_coeff(t2c + lin * I)
    z2pbar = DifferentialForm.from_coeff(t2c - lin * I)
    term2 = exterior_d(z2p).wedge(exterior_d(z2pbar)) * (I * QQi(C))
    pullback = term1 + term2

    # imaginary part of the outer-regime 2-form in the same coordinates:
    # dz1/z1 -> dr/r + i dt1, dz2 -> dt2 + i dt3
    log1 = (rinv * dr) + dt1 * I
    log1bar = (rinv * dr) - dt1 * I
    dz2 = dt2 + dt3 * I
    dz2bar = dt2 - dt3 * I
    dw2 = (dz2 * Fraction(C * (Fraction(d.a, 2) - d.p))
           - dz2bar * Fraction(C * (Fraction(d.a, 2) + d.p)))
    w = (log1.wedge(log1bar) * Fraction(-d.m * C, 2)
         - dz2.wedge(dz2bar) * Fraction(d.b * C)
         + log1.wedge(dw2))
    return form_imag_part(w) == pullback


# ---------------------------------------------------------------------------
# Connected sums
# ---------------------------------------------------------------------------


def connected_sum_problem(k: int, m: int) -> ExactSequenceProblem:
    """Local cohomology of m disjoint tori against the elliptic-surface
    total space: ... -> C^m -> H2 -> H2 of the complement -> C^{2m} -> 0,
    with the first map of rank one (the fibre class)."""
    if k < 1 or m < 1:
        raise ValueError("k and m must be positive")
    return ExactSequenceProblem.from_dims(
        [("torus_h0", m), ("h2_total", 12 * k - 2), ("h2_complement", None),
         ("torus_h1", 2 * m), ("zero", 0)],
        ranks={0: 1})


def connected_sum_h2(k: int, m: int) -> Tuple[int, SequenceSolution]:
    problem = connected_sum_problem(k, m)
    sol = solve_exact_sequence(problem)
    if sol.status != "solved":
        raise LogspinorError(f"sequence did not solve: {sol.status}")
    return sol.dims["h2_complement"], sol


# ---------------------------------------------------------------------------
# Random data
# ---------------------------------------------------------------------------


def random_unimodular(rng, max_entry: int = 5,
                      C_range: Tuple[int, int] = (1, 4)) -> SurgeryData:
    """Random nontrivial unimodular data with small entries."""
    while True:
        m = rng.randint(-max_entry, max_entry)
        p = rng.randint(-max_entry, max_entry)
        if p != 0 and gcd(m, p) == 1:
            break
    # extended Euclid: m*x + p*y = 1, then b = x, a = -y
    old_r, r = m, p
    old_s, s_ = 1, 0
    old_t, t_ = 0, 1
    while r:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_s, s_ = s_, old_s - qt * s_
        old_t, t_ = t_, old_t - qt * t_
    assert old_r in (1, -1)
    x, y = old_s, old_t
    if old_r == -1:
        x, y = -x, -y
    b, a = x, -y
    shift = rng.randint(-3, 3)
    C = Fraction(rng.randint(*C_range), rng.randint(1, 3))
    return SurgeryData(m, p, a + m * shift, b + p * shift, C)
