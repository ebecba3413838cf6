"""Pure-spinor predicates and constructions on a chart.

Everything here is pointwise-exact: annihilator kernels are exact null
spaces over Q(i), purity and nondegeneracy in four real dimensions go
through the even spinor pairing, and integrability is decided by a
bounded-degree witness search certified by substitution.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .chart import Chart
from .coeffs import CoeffExpr, Monomial
from .errors import (ComplexStructureError, DegreeError, ExponentError,
                     LogspinorError, ZeroSpinorError)
from .forms import (DifferentialForm, GeneralizedVector, Polyvector,
                    clifford_act, coupling, exp_two_form, exterior_d, interior,
                    natural_pairing, schouten_bracket)
from .linalg import inverse, matmul, nullspace, rank_field, solve
from .scalars import I, QQi, ZERO, as_scalar

# ---------------------------------------------------------------------------
# Annihilator kernels
# ---------------------------------------------------------------------------


def generalized_basis(chart: Chart) -> List[GeneralizedVector]:
    """The 2N constant generators: all vector directions, then all
    1-form directions, in chart variable order."""
    out = []
    for v in chart.all_vars:
        out.append(GeneralizedVector.of(vector=Polyvector.gen(chart, v)))
    for v in chart.all_vars:
        out.append(GeneralizedVector.of(one_form=DifferentialForm.gen(chart, v)))
    return out


def _form_words(chart: Chart):
    idx = range(chart.nvars)
    words = []
    for k in range(chart.nvars + 1):
        words.extend(itertools.combinations(idx, k))
    return words


@dataclass(frozen=True)
class KernelBasis:
    """Constant generalized vectors spanning the annihilator of a spinor
    at a point; coordinates follow generalized_basis order."""

    chart: Chart
    point: dict
    vectors: Tuple[Tuple[QQi, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def elements(self) -> List[GeneralizedVector]:
        basis = generalized_basis(self.chart)
        out = []
        for vec in self.vectors:
            acc = None
            for c, e in zip(vec, basis):
                if c.is_zero():
                    continue
                t = e * c
                acc = t if acc is None else acc + t
            out.append(acc if acc is not None
                       else GeneralizedVector.of(chart=self.chart))
        return out


def kernel_basis(phi: DifferentialForm, point,
                 symbol_values=None) -> KernelBasis:
    """Exact null space of E . phi(point) = 0 over Q(i)."""
    chart = phi.chart
    val = phi.evaluate(point, symbol_values)
    words = _form_words(chart)
    word_index = {w: i for i, w in enumerate(words)}
    basis = generalized_basis(chart)
    cols = []
    for e in basis:
        acted = clifford_act(e, val)
        col = [ZERO] * len(words)
        for w, c in acted.terms.items():
            col[word_index[w]] = c.constant_value()
        cols.append(col)
    matrix = [list(row) for row in zip(*cols)]
    null = nullspace(matrix)
    return KernelBasis(chart, dict(point), tuple(tuple(v) for v in null))


def is_isotropic(kb: KernelBasis) -> bool:
    """All pairwise natural pairings of the kernel basis vanish."""
    els = kb.elements()
    for a in els:
        for b in els:
            if not natural_pairing(a, b).is_zero():
                return False
    return True


# ---------------------------------------------------------------------------
# Even spinor pairing in four real dimensions
# ---------------------------------------------------------------------------


def even_pairing_dim4(phi: DifferentialForm,
                      psi: DifferentialForm) -> DifferentialForm:
    """phi0^psi4 + phi4^psi0 - phi2^psi2, a 4-form (chart with two
    complex variables; even arguments)."""
    chart = phi.chart
    if chart.nvars != 4:
        raise DegreeError("the even pairing is defined on 2-variable charts")
    for a in (phi, psi):
        if any(d % 2 for d in a.degrees()):
            raise DegreeError("pairing arguments must be even forms")
    p0, p2, p4 = phi.component(0), phi.component(2), phi.component(4)
    q0, q2, q4 = psi.component(0), psi.component(2), psi.component(4)
    return p0.wedge(q4) + p4.wedge(q0) - p2.wedge(q2)


def pairing_volume_coeff(pairing: DifferentialForm) -> CoeffExpr:
    """Coefficient of the canonical volume word dz1^dz2^dz̄1^dz̄2."""
    chart = pairing.chart
    top = tuple(range(chart.nvars))
    return pairing.terms.get(top, CoeffExpr.zero(chart))


@dataclass
class SpinorReport:
    """Pointwise diagnosis of an even spinor in four real dimensions."""

    kernel_dim: int
    is_pure: bool
    pairing_value: Optional[CoeffExpr]
    is_nondegenerate_at_point: bool
    type_number: Optional[int]

    def to_json(self) -> dict:
        return {
            "kernel_dim": self.kernel_dim,
            "is_pure": self.is_pure,
            "pairing_value": str(self.pairing_value)
            if self.pairing_value is not None else None,
            "is_nondegenerate_at_point": self.is_nondegenerate_at_point,
            "type_number": self.type_number,
        }


def type_number(phi: DifferentialForm, point, symbol_values=None) -> int:
    """Minimal degree with a nonzero component at the point."""
    val = phi.evaluate(point, symbol_values)
    if val.is_zero():
        raise ZeroSpinorError("spinor vanishes at the point")
    return min(val.degrees())


def purity_report_dim4(phi: DifferentialForm, point,
                       symbol_values=None) -> SpinorReport:
    """Purity and nondegeneracy through the even pairing, cross-checked
    against the exact annihilator kernel."""
    chart = phi.chart
    self_pair = even_pairing_dim4(phi, phi)
    conj_pair = even_pairing_dim4(phi, phi.conjugate())
    pairing_value = pairing_volume_coeff(conj_pair)

    kb = kernel_basis(phi, point, symbol_values)
    is_pure = kb.dim == chart.nvars

    full = chart.extend_point(point)
    val = phi.evaluate(point, symbol_values)
    quadric_zero = pairing_volume_coeff(self_pair).evaluate(full, symbol_values
                                                            ).is_zero()
    if val.is_zero():
        tn = None
        nondeg = False
    else:
        tn = min(val.degrees())
        nondeg = not pairing_value.evaluate(full, symbol_values).is_zero()
        if (quadric_zero and not val.is_zero()) != is_pure:
            raise LogspinorError(
                "pairing purity test disagrees with the annihilator kernel")
    return SpinorReport(kb.dim, is_pure, pairing_value, nondeg, tn)


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------


def b_transform(b: DifferentialForm, phi: DifferentialForm) -> DifferentialForm:
    """Multiplication by exp(b) for a closed real 2-form b."""
    if not b.is_homogeneous(2):
        raise DegreeError("b must be a homogeneous 2-form")
    if not exterior_d(b).is_zero():
        raise DegreeError("b must be d-closed")
    if b.conjugate() != b:
        raise DegreeError("b must be real")
    return exp_two_form(b).wedge(phi)


def bivector_transform(beta: Polyvector,
                       phi: DifferentialForm) -> DifferentialForm:
    """Clifford exponential of a bivector: sum of (i_beta)^j / j!."""
    if not beta.is_homogeneous(2):
        raise DegreeError("beta must be a homogeneous bivector")
    out = phi
    term = phi
    j = 1
    while True:
        term = interior(beta, term) * Fraction(1, j)
        if term.is_zero():
            break
        out = out + term
        j += 1
    return out


# ---------------------------------------------------------------------------
# Integrability witness
# ---------------------------------------------------------------------------


def _poly_monomials(chart: Chart, degree_bound: int):
    n = chart.nvars
    out = []
    for total in range(degree_bound + 1):
        for combo in itertools.combinations_with_replacement(range(n), total):
            exps = [0] * n
            for i in combo:
                exps[i] += 1
            out.append(Monomial(tuple(exps), ()))
    return out


def integrability_witness(phi: DifferentialForm,
                          degree_bound: int = 2
                          ) -> Optional[GeneralizedVector]:
    """Solve d(phi) = e . phi for e with polynomial coefficients of total
    degree <= degree_bound.  A returned witness is certified by exact
    substitution; None means no witness exists within the bound."""
    chart = phi.chart
    target = exterior_d(phi)
    basis = generalized_basis(chart)
    monos = _poly_monomials(chart, degree_bound)

    columns = []
    keys: Dict[Tuple[tuple, Monomial], int] = {}

    def coords(formlike: DifferentialForm):
        pairs = []
        for w, c in formlike.terms.items():
            for mono, scal in c.terms.items():
                key = (w, mono)
                if key not in keys:
                    keys[key] = len(keys)
                pairs.append((key, scal))
        return pairs

    actions = []
    for e in basis:
        acted = clifford_act(e, phi)
        for mono in monos:
            mexpr = CoeffExpr(chart, {mono: QQi(1)}, _validate=False)
            actions.append(coords(acted * mexpr))
    rhs_pairs = coords(target)

    nrows = len(keys)
    matrix = [[ZERO] * len(actions) for _ in range(nrows)]
    for col, pairs in enumerate(actions):
        for key, scal in pairs:
            matrix[keys[key]][col] = matrix[keys[key]][col] + scal
    rhs = [ZERO] * nrows
    for key, scal in rhs_pairs:
        rhs[keys[key]] = rhs[keys[key]] + scal

    x = solve(matrix, rhs)
    if x is None:
        return None
    vec = Polyvector.zero(chart)
    one_form = DifferentialForm.zero(chart)
    col = 0
    for t, e in enumerate(basis):
        for mono in monos:
            c = x[col]
            col += 1
            if c.is_zero():
                continue
            mexpr = CoeffExpr(chart, {mono: c}, _validate=False)
            vec = vec + e.vector * mexpr
            one_form = one_form + e.one_form * mexpr
    witness = GeneralizedVector(vec, one_form)
    if clifford_act(witness, phi) != target:
        raise LogspinorError("witness failed substitution check")
    return witness


# ---------------------------------------------------------------------------
# Logarithmic models and deformations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogSymplecticModel:
    """The local model: a 2m-variable chart with divisor z1 = 0 and the
    closed complex 2-form with a single first-order log pole."""

    chart: Chart
    omega: DifferentialForm
    divisor_var: str = "z1"


def log_symplectic_model(m: int) -> LogSymplecticModel:
    if m < 1:
        raise ValueError("m must be at least 1")
    names = tuple(f"z{i}" for i in range(1, 2 * m + 1))
    chart = Chart(names, log_vars=("z1",))
    inv = CoeffExpr.var(chart, "z1", -1)
    omega = (inv * DifferentialForm.gen(chart, "z1")).wedge(
        DifferentialForm.gen(chart, "z2"))
    for i in range(1, m):
        omega = omega + DifferentialForm.gen(chart, names[2 * i]).wedge(
            DifferentialForm.gen(chart, names[2 * i + 1]))
    if not exterior_d(omega).is_zero():
        raise LogspinorError("model 2-form failed the closedness check")
    return LogSymplecticModel(chart, omega)


def _check_log_pole_shape(alpha: DifferentialForm, model: LogSymplecticModel):
    chart = alpha.chart
    i1 = chart.var_index(model.divisor_var)
    for w, c in alpha.terms.items():
        for mono in c.terms:
            for i, e in enumerate(mono.exps):
                if e >= 0:
                    continue
                if i != i1:
                    raise ExponentError(
                        f"pole on {chart.all_vars[i]!r}: only first-order "
                        f"poles on {model.divisor_var!r} are allowed")
                if e < -1 or i1 not in w:
                    raise ExponentError(
                        "pole must appear as a first-order log term "
                        "multiplying the divisor differential")


def divisor_spinor(model: LogSymplecticModel,
                   alpha: Optional[DifferentialForm] = None
                   ) -> DifferentialForm:
    """z1 * exp(omega + alpha), pole-free across the divisor."""
    chart = model.chart
    total = model.omega if alpha is None or alpha.is_zero() \
        else model.omega + alpha
    z1 = CoeffExpr.var(chart, model.divisor_var)
    out = exp_two_form(total) * z1
    for w, c in out.terms.items():
        for mono in c.terms:
            if any(e < 0 for e in mono.exps):
                raise ExponentError("divisor spinor kept an unexpected pole")
    return out


def deform_spinor(model: LogSymplecticModel, alpha: DifferentialForm,
                  point=None) -> SpinorReport:
    """Restrict z1 * exp(omega + alpha) to the divisor and report purity
    and nondegeneracy there."""
    chart = model.chart
    if not alpha.is_zero():
        if not alpha.is_homogeneous(2):
            raise DegreeError("deformation must be a 2-form")
        if not exterior_d(alpha).is_zero():
            raise DegreeError("deformation must be d-closed")
        _check_log_pole_shape(alpha, model)
    phi = divisor_spinor(model, alpha)
    dv = model.divisor_var
    restricted = phi.substitute({dv: 0, chart.conj_var_name(dv): 0})
    if point is None:
        point = {v: 0 for v in chart.complex_vars if v != dv}
    point = dict(point)
    point.setdefault(dv, 0)
    if chart.nvars == 4:
        return purity_report_dim4(restricted, point)
    kb = kernel_basis(restricted, point)
    val = restricted.evaluate(point)
    tn = None if val.is_zero() else min(val.degrees())
    pure = kb.dim == chart.nvars
    stacked = [list(v) for v in kb.vectors]
    stacked += [_conjugate_coordinates(chart, v) for v in kb.vectors]
    nondeg = (pure and not val.is_zero()
              and rank_field(stacked) == 2 * chart.nvars)
    return SpinorReport(kb.dim, pure, None, nondeg, tn)


def deform_scalar_sweep(model: LogSymplecticModel, alpha0: DifferentialForm,
                        scalars: Sequence, point=None) -> List:
    """Scalars c for which z1 exp(omega + c*alpha0) degenerates on the
    divisor."""
    failing = []
    for c in scalars:
        rep = deform_spinor(model, alpha0 * as_scalar(c), point)
        if not rep.is_nondegenerate_at_point:
            failing.append(c)
    return failing


# ---------------------------------------------------------------------------
# Poisson differential, lift of forms, divisor vector fields
# ---------------------------------------------------------------------------


def poisson_differential(beta: Polyvector, a: Polyvector) -> Polyvector:
    """delta_beta = bracket with beta; squares to zero exactly when
    [beta, beta] = 0."""
    return schouten_bracket(beta, a)


def bivector_lift(beta: Polyvector, a: DifferentialForm) -> Polyvector:
    """Factorwise lift of a p-form to a p-vector: each 1-form generator is
    contracted into beta, products multiply."""
    chart = a.chart
    lifted_gen = {}
    for j in range(chart.nvars):
        theta = DifferentialForm(chart, {(j,): CoeffExpr.one(chart)})
        lifted_gen[j] = coupling(theta, beta)
    out = Polyvector.zero(chart)
    for w, c in a.terms.items():
        piece = Polyvector.from_coeff(c)
        for j in w:
            piece = piece.wedge(lifted_gen[j])
            if piece.is_zero():
                break
        out = out + piece
    return out


def preserves_divisor_ideal(v: Polyvector, model: LogSymplecticModel) -> bool:
    """True when v(z1) and v(z̄1) lie in the monomial ideal (z1, z̄1)."""
    if not v.is_homogeneous(1):
        raise DegreeError("expected a vector field")
    chart = v.chart
    dv = model.divisor_var
    ideal = (dv, chart.conj_var_name(dv))
    for name in ideal:
        c = v.terms.get((chart.var_index(name),))
        if c is not None and not c.in_ideal_of(ideal):
            return False
    return True


# ---------------------------------------------------------------------------
# The induced orthogonal complex structure on T + T*
# ---------------------------------------------------------------------------


def _conjugate_coordinates(chart: Chart, vec: Sequence[QQi]) -> List[QQi]:
    n = chart.nvars
    out = [ZERO] * (2 * n)
    for t, c in enumerate(vec):
        if t < n:
            out[chart.conj_index(t)] = c.conjugate()
        else:
            out[n + chart.conj_index(t - n)] = c.conjugate()
    return out


def pairing_gram(chart: Chart) -> List[List[QQi]]:
    n = chart.nvars
    half = QQi(Fraction(1, 2))
    G = [[ZERO] * (2 * n) for _ in range(2 * n)]
    for j in range(n):
        G[j][n + j] = half
        G[n + j][j] = half
    return G


def structure_matrix(phi: DifferentialForm, point,
                     symbol_values=None) -> List[List[QQi]]:
    """The 2N x 2N matrix acting as +i on the annihilator of phi and -i
    on its conjugate, certified to square to -1 and to preserve the
    natural pairing.  Coordinates follow generalized_basis order."""
    chart = phi.chart
    n2 = 2 * chart.nvars
    kb = kernel_basis(phi, point, symbol_values)
    if kb.dim != chart.nvars:
        raise ComplexStructureError(
            f"spinor is not pure at the point (kernel dim {kb.dim})")
    cols = [list(v) for v in kb.vectors]
    cols += [_conjugate_coordinates(chart, v) for v in kb.vectors]
    W = [list(row) for row in zip(*cols)]
    if rank_field(W) != n2:
        raise ComplexStructureError(
            "degenerate spinor: kernel meets its conjugate")
    D = [[ZERO] * n2 for _ in range(n2)]
    for j in range(n2):
        D[j][j] = I if j < chart.nvars else -I
    J = matmul(matmul(W, D), inverse(W))

    minus_id = [[QQi(-1) if i == j else ZERO for j in range(n2)]
                for i in range(n2)]
    if matmul(J, J) != minus_id:
        raise LogspinorError("structure matrix failed J^2 = -1")
    G = pairing_gram(chart)
    Jt = [list(r) for r in zip(*J)]
    if matmul(matmul(Jt, G), J) != G:
        raise LogspinorError("structure matrix failed orthogonality")
    return J


# ---------------------------------------------------------------------------
# Nonvanishing policy
# ---------------------------------------------------------------------------


@dataclass
class NonvanishingCertificate:
    kind: str  # "zero" | "unit-monomial" | "sampled"
    nonvanishing: bool
    samples: int = 0
    counterexample: Optional[dict] = None


def nonvanishing_certificate(coeff: CoeffExpr, rng=None,
                             samples: int = 20) -> NonvanishingCertificate:
    """Unit monomials are certified nowhere-vanishing exactly; anything
    else is only sampled at rational points (log variables kept away
    from zero)."""
    if coeff.is_zero():
        return NonvanishingCertificate("zero", False)
    if coeff.is_unit_monomial():
        return NonvanishingCertificate("unit-monomial", True)
    import random

    rng = rng or random.Random(0)
    chart = coeff.chart
    for k in range(samples):
        point = {}
        for i, v in enumerate(chart.all_vars):
            if chart.is_log(i):
                point[v] = QQi(Fraction(rng.randint(1, 9),
                                        rng.randint(1, 5)))
            else:
                point[v] = QQi(Fraction(rng.randint(-5, 5),
                                        rng.randint(1, 5)))
        svals = {name: QQi(Fraction(rng.randint(1, 5), rng.randint(1, 5)))
                 for name in chart.symbols}
        if coeff.evaluate(point, svals).is_zero():
            return NonvanishingCertificate("sampled", False, k + 1,
                                           {k: str(v) for k, v in
                                            point.items()})
    return NonvanishingCertificate("sampled", True, samples)
