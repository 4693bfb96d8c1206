"""Topological indices of fields and forms at complete intersection germs.

The entry points combine the residue evaluators with the symmetric-power
pairing machinery: real vector fields, real 1-forms, distinguished linear
forms, and complex vector fields each get an index together with the full
term breakdown that produced it.  Fiber-side quantities (the index on a
nearby smooth fiber, Euler characteristics of nearby level sets) have
independent evaluation paths so the two sides can cross-check each other.

Conventions used throughout:

* the germ is cut out by m equations in n variables, of dimension d = n - m;
* the "chart determinant" is the minor of the Jacobian taken on the first m
  variables, and tangent-chart computations use the remaining d variables;
* linear-form and 1-form reductions instead solve along the *last* m
  variables, which introduces a sign (-1)^(d*m) when their chart residues
  are rewritten as ambient residues.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .errors import PreconditionError, ResourceCapError
from .localbasis import Budget, standard_monomials, std_basis
from .orders import local_order
from .poly import Context, Poly, SymElem
from .quadform import BilinearForm, SignatureReport
from .residues import (
    CompleteIntersection,
    GlobalResidueEvaluator,
    ResidueEvaluator,
    local_colength,
)
from .symbol import SymbolEvaluator, module_colength, pairing_space

# Composite index computations chain several evaluators; give them more
# room than a single-symbol run before the resource cap trips.
DEFAULT_OP_STEPS = 20_000_000


def _op_budget(budget: Optional[Budget]) -> Budget:
    return budget if budget is not None else Budget(DEFAULT_OP_STEPS)


# -- exact linear algebra over the rationals --------------------------


def _rat_det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        inv = 1 / a[c][c]
        for r in range(c + 1, n):
            if a[r][c]:
                f = a[r][c] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def _rat_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    a = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    ncols = len(a[0]) if a else 0
    row = 0
    for c in range(ncols):
        piv = next((r for r in range(row, len(a)) if a[r][c]), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = 1 / a[row][c]
        for r in range(len(a)):
            if r != row and a[r][c]:
                f = a[r][c] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        rank += 1
        row += 1
    return rank


def _rat_inv(rows: Sequence[Sequence[Fraction]]) -> List[List[Fraction]]:
    n = len(rows)
    a = [[Fraction(x) for x in r] + [Fraction(1 if i == j else 0) for j in range(n)]
         for i, r in enumerate(rows)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            raise PreconditionError("matrix is singular")
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [r[n:] for r in a]


def _perm_sign(perm: Sequence[int]) -> int:
    inv = 0
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                inv += 1
    return -1 if inv % 2 else 1


# -- small polynomial helpers -----------------------------------------


def _is_unit_constant(p: Poly) -> bool:
    if len(p.terms) != 1:
        return False
    mono, coef = next(iter(p.terms.items()))
    return mono.degree() == 0 and coef != 0


def _as_vec(p: Poly) -> Dict:
    return {(0, mono.z): coef for mono, coef in p.terms.items()}


def _monomials_of_degree(ctx: Context, deg: int) -> List[Poly]:
    if deg == 0:
        return [Poly.const(ctx, Fraction(1))]
    out = []
    for combo in itertools.combinations_with_replacement(range(ctx.nz), deg):
        exps = [0] * ctx.nz
        for i in combo:
            exps[i] += 1
        out.append(Poly.monomial(ctx, tuple(exps)))
    return out


def _jacobian_entries(ci: CompleteIntersection) -> List[List[Poly]]:
    return [[f.derivative(name) for name in ci.ctx.ambient] for f in ci.equations]


def _jacobian_columns(ci: CompleteIntersection) -> List[SymElem]:
    """Jacobian columns as degree-1 elements, one module variable per equation."""
    m = ci.n_equations
    if m < 1:
        raise PreconditionError("need at least one equation to form Jacobian columns")
    mctx = ci.ctx.with_module(m)
    entries = _jacobian_entries(ci)
    cols = []
    for j in range(ci.ctx.nz):
        p = Poly.zero(mctx)
        for i in range(m):
            e = entries[i][j]
            if not e.is_zero():
                p = p + e.shift_context(mctx) * Poly.var(mctx, mctx.modvars[i])
        cols.append(SymElem(p, 1))
    return cols


def _chart_determinant(ci: CompleteIntersection, budget: Budget,
                       head: Optional[Sequence[int]] = None) -> Poly:
    """Determinant of the Jacobian block on the leading m variables.

    `head` picks a different set of m solved variables; the empty germ has
    determinant 1 by convention.
    """
    m = ci.n_equations
    if m == 0:
        return Poly.const(ci.ctx, Fraction(1))
    entries = _jacobian_entries(ci)
    picks = list(range(m)) if head is None else list(head)
    rows = [[entries[i][j] for j in picks] for i in range(m)]
    return linalg.poly_det(rows, budget=budget)


def _restrict_last(p: Poly) -> Poly:
    """Set the last variable to zero and drop it from the context."""
    ctx = p.ctx
    if ctx.nz < 2:
        raise PreconditionError("cannot drop the only variable")
    last = ctx.ambient[-1]
    small = Context(ctx.ambient[:-1])
    return p.substitute({last: Poly.zero(ctx)}).shift_context(small)


def _empty_signature() -> SignatureReport:
    return SignatureReport(0, 0, 0, 0, 0, 0)


def _monomial_basis(ev) -> List[Poly]:
    return [Poly.monomial(ev.ctx, mo.z) for mo in ev.quotient_monomials()]


def _local_form_signature(denominators: Sequence[Poly], extra: Poly,
                          budget: Budget, sign: int = 1) -> SignatureReport:
    """Signature of <p, q> = residue of p*q*extra at the origin.

    A unit among the denominators collapses the quotient to zero; a
    denominator that vanishes identically cannot cut an isolated zero.
    """
    denoms = list(denominators)
    for p in denoms:
        if p.is_zero():
            raise PreconditionError(
                "a denominator vanishes identically; the common zero set "
                "cannot be isolated")
    if any(p.constant_value() != 0 for p in denoms):
        return _empty_signature()
    ev = ResidueEvaluator(denoms, budget=budget)
    basis = _monomial_basis(ev)
    sgn = Poly.const(ev.ctx, Fraction(sign))
    form = BilinearForm.from_pairing(
        basis, lambda p, q: ev.value(p * q * extra * sgn))
    return form.signature()


def _global_form_signature(denominators: Sequence[Poly], extra: Poly,
                           budget: Budget, sign: int = 1) -> SignatureReport:
    """Affine version of the signature form, summed over every fiber zero."""
    denoms = list(denominators)
    if any(_is_unit_constant(p) for p in denoms):
        return _empty_signature()
    for p in denoms:
        if p.is_zero():
            raise PreconditionError(
                "a denominator vanishes identically; the fiber zero set "
                "cannot be finite")
    ev = GlobalResidueEvaluator(denoms, budget=budget)
    basis = _monomial_basis(ev)
    sgn = Poly.const(ev.ctx, Fraction(sign))
    form = BilinearForm.from_pairing(
        basis, lambda p, q: ev.value(p * q * extra * sgn))
    return form.signature()


# -- problem and report types -----------------------------------------


@dataclass(frozen=True)
class VectorFieldProblem:
    """A vector field with a zero at the origin of a germ.

    `v` lists the n components.  `euler_char_input` optionally supplies the
    pair (reduced Euler characteristic of the nearby fiber, same for the
    fiber's last-coordinate hyperplane section); it is required whenever no
    rank-1 helper can compute them.  `t_sample` is the deformation
    parameter used by fiber-side diagnostics and cross-checks.
    """

    ci: CompleteIntersection
    v: Tuple[Poly, ...]
    euler_char_input: Optional[Tuple[Optional[int], Optional[int]]] = None
    t_sample: Fraction = Fraction(1, 7)

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(self.v))
        object.__setattr__(self, "t_sample", Fraction(self.t_sample))
        ctx = self.ci.ctx
        if len(self.v) != ctx.nz:
            raise PreconditionError(
                f"need {ctx.nz} components, got {len(self.v)}")
        for p in self.v:
            if p.ctx != ctx:
                raise PreconditionError("component context mismatch")
            if p.constant_value() != 0:
                raise PreconditionError("field components must vanish at the origin")
        if self.t_sample == 0:
            raise PreconditionError("t_sample must be nonzero")
        if self.euler_char_input is not None:
            pair = tuple(self.euler_char_input)
            if len(pair) != 2:
                raise PreconditionError(
                    "euler_char_input takes (fiber value, section value)")
            object.__setattr__(self, "euler_char_input", pair)

    @property
    def n(self) -> int:
        return self.ci.ctx.nz

    @property
    def m(self) -> int:
        return self.ci.n_equations

    @property
    def d(self) -> int:
        return self.ci.dim

    def tail(self) -> List[Poly]:
        """Components along the tangent-chart variables."""
        return list(self.v[self.m:])


@dataclass(frozen=True)
class OneFormProblem:
    """A 1-form u = sum u_j dz_j against a germ.

    Only germs of odd dimension are admitted (n - m - 1 even): the index
    form of the other parity can jump under deformation and is outside
    this calculus.
    """

    ci: CompleteIntersection
    u: Tuple[Poly, ...]
    euler_char_input: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(self.u))
        ctx = self.ci.ctx
        if len(self.u) != ctx.nz:
            raise PreconditionError(f"need {ctx.nz} coefficients, got {len(self.u)}")
        for p in self.u:
            if p.ctx != ctx:
                raise PreconditionError("coefficient context mismatch")
        if (ctx.nz - self.ci.n_equations - 1) % 2:
            raise PreconditionError(
                "the index form needs n - m - 1 even (germ of odd dimension); "
                "the other parity is not covered")

    @property
    def l(self) -> int:
        return (self.ci.ctx.nz - self.ci.n_equations - 1) // 2

    def extended_columns(self) -> List[SymElem]:
        """Jacobian columns extended by the form coefficients in a fresh slot."""
        ci = self.ci
        m = ci.n_equations
        mctx = ci.ctx.with_module(m + 1)
        entries = _jacobian_entries(ci)
        slot = Poly.var(mctx, mctx.modvars[m])
        cols = []
        for j in range(ci.ctx.nz):
            p = Poly.zero(mctx)
            for i in range(m):
                e = entries[i][j]
                if not e.is_zero():
                    p = p + e.shift_context(mctx) * Poly.var(mctx, mctx.modvars[i])
            if not self.u[j].is_zero():
                p = p + self.u[j].shift_context(mctx) * slot
            cols.append(SymElem(p, 1))
        return cols


@dataclass(frozen=True)
class IndexReport:
    """Final index plus the named terms it was combined from.

    `combination` fixes integer coefficients such that the index equals the
    corresponding weighted sum of breakdown values; the constructor
    recomputes that sum, so a report can never drift from its own terms.
    """

    index: int
    breakdown: Tuple[Tuple[str, int], ...]
    combination: Tuple[Tuple[str, int], ...]
    diagnostics: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "breakdown", tuple(self.breakdown))
        object.__setattr__(self, "combination", tuple(self.combination))
        vals = dict(self.breakdown)
        total = 0
        for name, coeff in self.combination:
            if name not in vals:
                raise ValueError(f"combination names unknown term {name!r}")
            total += coeff * vals[name]
        if total != self.index:
            raise ValueError(
                f"breakdown recombines to {total}, report says {self.index}")

    def term(self, name: str) -> int:
        return dict(self.breakdown)[name]


@dataclass(frozen=True)
class GenericityReport:
    """Outcome of the finite-colength checks a frame must pass."""

    checks: Tuple[Tuple[str, bool], ...]
    suggestion: Optional[str] = None

    @property
    def all_ok(self) -> bool:
        return all(ok for _, ok in self.checks)

    def failed(self) -> List[str]:
        return [name for name, ok in self.checks if not ok]


# -- Euler characteristics and the degree oracle ----------------------


def euler_char_real_fiber(f: Poly, sign_t: int, budget: Optional[Budget] = None) -> int:
    """Reduced Euler characteristic of a nearby real level set of f.

    Works for one equation only: the level {f = t} for small t of the given
    sign.  The value comes from the signature of the gradient's residue
    form against the Hessian determinant; with n variables the two signs
    agree whenever n is even.
    """
    if sign_t not in (1, -1):
        raise PreconditionError("sign_t must be +1 or -1")
    ctx = f.ctx
    if ctx.nx:
        raise PreconditionError("expected an ambient polynomial")
    n = ctx.nz
    if n < 1 or f.is_zero():
        raise PreconditionError("need a nonzero polynomial in at least one variable")
    budget = _op_budget(budget)
    grad = [f.derivative(name) for name in ctx.ambient]
    nonzero = [g for g in grad if not g.is_zero()]
    if not nonzero:
        raise PreconditionError("the polynomial is constant")
    col = local_colength(nonzero, budget)
    if col is None:
        raise PreconditionError(
            "the gradient does not have an isolated zero at the origin")
    if col == 0:
        ind = 0
    else:
        # index of the gradient by the signature of its residue pairing;
        # the residue functional is positive on the Jacobian class already
        ev = ResidueEvaluator(grad, budget=budget)
        basis = _monomial_basis(ev)
        form = BilinearForm.from_pairing(basis, lambda p, q: ev.value(p * q))
        ind = form.signature().signature
    return -((-sign_t) ** n) * ind


def degree_oracle(v: Sequence[Poly], zeros: Sequence[Sequence[Fraction]]) -> int:
    """Topological degree summed over explicitly supplied simple zeroes.

    Test plumbing, not a solver: root finding is out of scope, so callers
    list the rational common zeroes of the system and this verifies each
    one exactly, rejects any with singular Jacobian, and adds up the signs
    of the Jacobian determinants.
    """
    if not v:
        raise PreconditionError("empty system")
    ctx = v[0].ctx
    if len(v) != ctx.nz:
        raise PreconditionError(
            f"need {ctx.nz} components for {ctx.nz} variables, got {len(v)}")
    for p in v:
        if p.ctx != ctx:
            raise PreconditionError("component context mismatch")
    jac = [[p.derivative(name) for name in ctx.ambient] for p in v]
    total = 0
    for pt in zeros:
        if len(pt) != ctx.nz:
            raise PreconditionError("zero has the wrong number of coordinates")
        point = {name: Fraction(c) for name, c in zip(ctx.ambient, pt)}
        for p in v:
            if p.evaluate(point) != 0:
                raise PreconditionError(
                    f"({', '.join(str(Fraction(c)) for c in pt)}) is not a zero "
                    "of the system")
        rows = [[e.evaluate(point) for e in row] for row in jac]
        det = _rat_det(rows)
        if det == 0:
            raise PreconditionError(
                "non-simple zero at "
                f"({', '.join(str(Fraction(c)) for c in pt)})")
        total += 1 if det > 0 else -1
    return total


# -- index on the nearby smooth fiber ---------------------------------


def elk_index_smooth(vp: VectorFieldProblem, t, budget: Optional[Budget] = None,
                     head: Optional[Sequence[int]] = None) -> SignatureReport:
    """Total index of the field on the smooth fiber at parameter t.

    The field restricted to the fiber is read off in the tangent chart of
    the unsolved variables; the signature of the residue form of the chart
    determinant against the tail components adds up the local indices of
    every real fiber zero, conjugate pairs cancelling exactly.

    `head` picks which m variables are solved (default: the first m); a
    permuted choice carries the sign of the variable reordering.
    """
    t = Fraction(t)
    if t == 0:
        raise PreconditionError("t must be nonzero; the central fiber is singular")
    budget = _op_budget(budget)
    ci = vp.ci
    m, n = vp.m, vp.n
    if head is None:
        picks = list(range(m))
        sign = 1
    else:
        picks = list(head)
        if len(picks) != m or len(set(picks)) != m or \
                any(not 0 <= i < n for i in picks):
            raise PreconditionError("head must select m distinct variables")
        rest_ = [j for j in range(n) if j not in picks]
        sign = _perm_sign(picks + rest_)
    rest = [j for j in range(n) if j not in picks]
    delta = _chart_determinant(ci, budget, picks)
    if delta.is_zero():
        raise PreconditionError(
            "the chart determinant vanishes identically for this variable "
            "choice; pick another head or change coordinates")
    denoms = ci.fiber_equations(t) + [vp.v[j] for j in rest]
    try:
        return _global_form_signature(denoms, delta, budget, sign)
    except PreconditionError as e:
        raise PreconditionError(
            f"{e}; a random rational change of coordinates may make the "
            "tail components generic") from None


# -- the two-term breakdown and the telescoping chain -----------------


def theorem_terms(vp: VectorFieldProblem, t, budget: Optional[Budget] = None,
                  rng: Optional[random.Random] = None) -> Dict[str, object]:
    """Both signature terms and the telescoping chain at parameter t.

    At t = 0 the forms live on local quotients at the origin and the chain
    runs through the symmetric-power machinery.  At t != 0 everything
    collapses to affine residue forms on the whole fiber, which is only
    reachable for germs cut by a single equation.
    """
    t = Fraction(t)
    budget = _op_budget(budget)
    rng = rng or random.Random(0)
    d = vp.d
    if d < 1:
        raise PreconditionError("need a germ of positive dimension")
    k = (d - 1) // 2
    parity = "even" if (d - 1) % 2 == 0 else "odd"
    out: Dict[str, object] = {"parity": parity}
    if t == 0:
        out.update(_terms_at_origin(vp, k, parity, budget, rng))
    else:
        if vp.m > 1:
            raise PreconditionError(
                "fiber terms need a single defining equation; affine "
                "evaluation of deeper frames is not available")
        out.update(_terms_on_fiber(vp, t, k, parity, budget))
    return out


def _chain_shape(m: int, i: int):
    # plain columns 1..m+2i-3, one scaled column, scalars from m+2i on
    return m + 2 * i - 3, m + 2 * i - 2, m + 2 * i - 1


def _terms_at_origin(vp, k, parity, budget, rng):
    ci = vp.ci
    m, n = vp.m, vp.n
    eqs = list(ci.equations)
    v = list(vp.v)
    delta = _chart_determinant(ci, budget)
    first = _local_form_signature(eqs + v[m:], delta, budget)
    if m == 0:
        return {
            "first": first.signature, "second": 0, "chain": (),
            "initial_split": None, "first_dimension": first.dimension,
            "notes": ["no equations: the principal form already carries the index"],
        }
    cols = _jacobian_columns(ci)
    mctx = cols[0].poly.ctx
    if parity == "even":
        extra = v[n - 1].shift_context(mctx)
    else:
        extra = cols[n - 1].poly
    ev = SymbolEvaluator(ci, cols[:n - 1], (), budget=budget, rng=rng)
    basis = pairing_space(ci, cols[:n - 1], (), budget).basis(k)
    form = BilinearForm.from_pairing(
        list(basis),
        lambda a, b: ev.value(SymElem(a.poly * b.poly * extra, vp.d - 1)))
    second = form.signature()
    chain = []
    notes: List[str] = []
    for i in range(1, k + 2):
        try:
            chain.append(_chain_term_origin(vp, cols, mctx, i, budget, rng))
        except PreconditionError as e:
            chain.append(None)
            notes.append(f"chain term {i} undefined: {e}")
    try:
        split = _local_form_signature(
            eqs + [delta] + v[m + 1:], v[m], budget).signature
    except PreconditionError as e:
        split = None
        notes.append(f"initial split undefined: {e}")
    return {
        "first": first.signature, "second": second.signature,
        "chain": tuple(chain), "initial_split": split,
        "first_dimension": first.dimension, "notes": notes,
    }


def _chain_term_origin(vp, cols, mctx, i, budget, rng):
    ci = vp.ci
    v = list(vp.v)
    nplain, scaled_at, scal_from = _chain_shape(vp.m, i)
    factor = v[scaled_at - 1].shift_context(mctx)
    scaled = SymElem(cols[scaled_at - 1].poly * factor, 1)
    columns = list(cols[:nplain]) + [scaled]
    scalars = v[scal_from:]
    ev = SymbolEvaluator(ci, columns, scalars, budget=budget, rng=rng)
    basis = pairing_space(ci, columns, scalars, budget).basis(i - 1)
    form = BilinearForm.from_pairing(
        list(basis),
        lambda a, b: ev.value(SymElem(a.poly * b.poly, 2 * i - 2)))
    return form.signature().signature


def _terms_on_fiber(vp, t, k, parity, budget):
    ci = vp.ci
    m, n = vp.m, vp.n
    v = list(vp.v)
    eqs_t = ci.fiber_equations(t)
    if m == 0:
        one = Poly.const(ci.ctx, Fraction(1))
        first = _global_form_signature(v, one, budget)
        return {
            "first": first.signature, "second": 0, "chain": (),
            "initial_split": None, "first_dimension": first.dimension,
            "notes": ["no equations: the fiber is the ambient space"],
        }
    f = ci.equations[0]
    a = [f.derivative(name) for name in ci.ctx.ambient]
    first = _global_form_signature(eqs_t + v[1:], a[0], budget)
    extra = v[n - 1] if parity == "even" else a[n - 1]
    second = _global_form_signature(eqs_t + a[:n - 1], extra, budget)
    one = Poly.const(ci.ctx, Fraction(1))
    chain = []
    notes: List[str] = []
    for i in range(1, k + 2):
        nplain, scaled_at, scal_from = _chain_shape(1, i)
        denoms = eqs_t + a[:nplain] + [a[scaled_at - 1] * v[scaled_at]] + v[scal_from:]
        try:
            chain.append(_global_form_signature(denoms, one, budget).signature)
        except PreconditionError as e:
            chain.append(None)
            notes.append(f"chain term {i} undefined: {e}")
    try:
        split = _global_form_signature(
            eqs_t + [a[0]] + v[2:], v[1], budget).signature
    except PreconditionError as e:
        split = None
        notes.append(f"initial split undefined: {e}")
    return {
        "first": first.signature, "second": second.signature,
        "chain": tuple(chain), "initial_split": split,
        "first_dimension": first.dimension, "notes": notes,
    }


# -- the real index at the singular point -----------------------------


def _tangency_state(vp: VectorFieldProblem, budget: Budget) -> str:
    """How strictly the field is tangent to the deformation fibers."""
    ci = vp.ci
    if ci.n_equations == 0:
        return "exact"
    entries = _jacobian_entries(ci)
    pairings = []
    for i in range(ci.n_equations):
        w = Poly.zero(ci.ctx)
        for j in range(ci.ctx.nz):
            if not entries[i][j].is_zero() and not vp.v[j].is_zero():
                w = w + vp.v[j] * entries[i][j]
        pairings.append(w)
    if all(w.is_zero() for w in pairings):
        return "exact"
    gens = [_as_vec(f) for f in ci.equations if not f.is_zero()]
    sb = std_basis(gens, local_order(), ci.ctx.nz, budget)
    for w in pairings:
        if w.is_zero():
            continue
        nf = sb.reduce(_as_vec(w), budget)
        if nf.remainder:
            return "violated"
    return "modulo_equations"


def index_real_vector_field(vp: VectorFieldProblem,
                            budget: Optional[Budget] = None,
                            rng: Optional[random.Random] = None) -> IndexReport:
    """Index of a real vector field at the singular point of its germ.

    Combines the two signature terms at t = 0 with the Euler correction of
    the nearby fiber; which correction applies depends on the parity of
    d - 1.  The report's diagnostics carry the telescoping chain, the
    tangency and genericity checks, and (for one-equation germs with an
    exactly tangent field) the same terms recomputed on the sample fiber
    as a continuity check.
    """
    budget = _op_budget(budget)
    rng = rng or random.Random(0)
    ci = vp.ci
    m = vp.m
    terms = theorem_terms(vp, 0, budget, rng)
    parity = terms["parity"]
    sgn = 1 if vp.t_sample > 0 else -1
    chi_fiber = chi_section = None
    if vp.euler_char_input is not None:
        chi_fiber, chi_section = vp.euler_char_input
    if parity == "even":
        if chi_fiber is None:
            if m == 0:
                chi_fiber = 0
            elif m == 1:
                chi_fiber = euler_char_real_fiber(ci.equations[0], sgn, budget)
            else:
                raise PreconditionError(
                    "no Euler characteristic available for the nearby fiber; "
                    "pass euler_char_input")
        index = terms["first"] + terms["second"] - chi_fiber
        breakdown = (("principal_signature", terms["first"]),
                     ("secondary_signature", terms["second"]),
                     ("fiber_euler", chi_fiber))
        combination = (("principal_signature", 1),
                       ("secondary_signature", 1),
                       ("fiber_euler", -1))
    else:
        if chi_section is None:
            if m == 0:
                chi_section = 0
            elif m == 1:
                chi_section = euler_char_real_fiber(
                    _restrict_last(ci.equations[0]), sgn, budget)
            else:
                raise PreconditionError(
                    "no Euler characteristic available for the hyperplane "
                    "section; pass euler_char_input")
        index = terms["first"] - terms["second"] - chi_section
        breakdown = (("principal_signature", terms["first"]),
                     ("secondary_signature", terms["second"]),
                     ("section_euler", chi_section))
        combination = (("principal_signature", 1),
                       ("secondary_signature", -1),
                       ("section_euler", -1))
    diagnostics: Dict[str, object] = {
        "parity": parity,
        "signature_chain": terms["chain"],
        "initial_split": terms["initial_split"],
        "tangency": _tangency_state(vp, budget),
        "genericity": genericity_check(vp, budget),
        "notes": list(terms["notes"]),
    }
    if diagnostics["tangency"] == "exact":
        try:
            ft = theorem_terms(vp, vp.t_sample, budget, rng)
            diagnostics["signature_chain_fiber"] = ft["chain"]
            diagnostics["fiber_index"] = ft["first"]
            diagnostics["chain_continuous"] = all(
                s0 == st for s0, st in zip(terms["chain"], ft["chain"])
                if s0 is not None and st is not None)
            diagnostics["zero_conservation"] = (
                ft["first_dimension"] == terms["first_dimension"])
        except (PreconditionError, ResourceCapError) as e:
            diagnostics["fiber_terms"] = f"skipped: {e}"
    else:
        diagnostics["fiber_terms"] = (
            "skipped: the field is not exactly tangent to the deformation")
    return IndexReport(index, breakdown, combination, diagnostics)


# -- linear forms -----------------------------------------------------


def index_linear_form(ci: CompleteIntersection, coordinate: Optional[str] = None,
                      budget: Optional[Budget] = None,
                      rng: Optional[random.Random] = None) -> SignatureReport:
    """Index of the differential of one coordinate restricted to the germ.

    The germ must be solved along its trailing m variables (that Jacobian
    block invertible at the origin); the chosen coordinate (default: the
    last) is swapped into the last slot first.  The pairing-space signature
    is returned after an independent tangent-chart evaluation confirmed it:
    the chart form lives on the quotient by the bordered determinants, its
    residues carry the solved-block sign, and its signature must reproduce
    the primary one up to the dimension-parity sign.
    """
    budget = _op_budget(budget)
    rng = rng or random.Random(0)
    m = ci.n_equations
    if m < 1:
        raise PreconditionError("need at least one defining equation")
    n = ci.ctx.nz
    d = ci.dim
    if d < 1:
        raise PreconditionError("need a germ of positive dimension")
    names = ci.ctx.ambient
    if coordinate is not None and coordinate != names[-1]:
        if coordinate not in names:
            raise PreconditionError(f"unknown coordinate {coordinate!r}")
        swap = {coordinate: Poly.var(ci.ctx, names[-1]),
                names[-1]: Poly.var(ci.ctx, coordinate)}
        ci = CompleteIntersection(
            ci.ctx, tuple(f.substitute(swap) for f in ci.equations), ci.direction)
    entries = _jacobian_entries(ci)
    delta = linalg.poly_det(
        [[entries[i][j] for j in range(n - m, n)] for i in range(m)],
        budget=budget)
    if delta.constant_value() == 0:
        raise PreconditionError(
            "the trailing Jacobian block must be invertible at the origin")
    k = (d - 1) // 2
    parity_even = (d - 1) % 2 == 0
    cols = _jacobian_columns(ci)
    mctx = cols[0].poly.ctx
    ev = SymbolEvaluator(ci, cols[:n - 1], (), budget=budget, rng=rng)
    basis = pairing_space(ci, cols[:n - 1], (), budget).basis(k)
    extra = Poly.const(mctx, Fraction(1)) if parity_even else cols[n - 1].poly
    form = BilinearForm.from_pairing(
        list(basis),
        lambda a, b: ev.value(SymElem(a.poly * b.poly * extra, d - 1)))
    primary = form.signature()

    # independent path: bordered determinants cut the critical locus in the
    # chart of the leading d variables
    bordered = []
    for j in range(d):
        picks = list(range(n - m, n - 1)) + [j]
        bordered.append(linalg.poly_det(
            [[entries[i][c] for c in picks] for i in range(m)], budget=budget))
    if any(b.is_zero() for b in bordered):
        raise PreconditionError(
            "a bordered determinant vanishes identically; the coordinate is "
            "degenerate on this germ")
    power = delta ** (d + 1)
    cross = _local_form_signature(
        list(ci.equations) + bordered, power, budget,
        sign=(-1) ** (d * m)).signature
    if cross != (-1) ** d * primary.signature:
        raise ArithmeticError(
            f"tangent-chart cross-check disagrees: chart signature {cross}, "
            f"pairing signature {primary.signature}")
    return primary


# -- 1-forms ----------------------------------------------------------


def index_one_form(op: OneFormProblem, budget: Optional[Budget] = None,
                   rng: Optional[random.Random] = None) -> IndexReport:
    """Index of a 1-form with an isolated zero on an odd-dimensional germ.

    The Jacobian columns are extended by the form's coefficients in one
    extra module slot; the index is the middle-degree signature of that
    extended frame minus the fiber Euler correction.  When the germ is
    solved along its trailing block the chart evaluation through the
    reduced coefficients must agree and is run automatically.
    """
    budget = _op_budget(budget)
    rng = rng or random.Random(0)
    ci = op.ci
    m = ci.n_equations
    n = ci.ctx.nz
    d = ci.dim
    l = op.l
    cols = op.extended_columns()
    try:
        ev = SymbolEvaluator(ci, cols, (), budget=budget, rng=rng)
    except PreconditionError as e:
        raise PreconditionError(
            f"extended frame is degenerate: {e}") from None
    basis = pairing_space(ci, cols, (), budget).basis(l)
    form = BilinearForm.from_pairing(
        list(basis),
        lambda a, b: ev.value(SymElem(a.poly * b.poly, 2 * l)))
    sig = form.signature().signature
    if op.euler_char_input is not None:
        chi = op.euler_char_input
    elif m == 0:
        chi = 0
    elif m == 1:
        # d odd forces n even here, so the sign of t cannot matter
        chi = euler_char_real_fiber(ci.equations[0], 1, budget)
    else:
        raise PreconditionError(
            "no Euler characteristic available for the nearby fiber; "
            "pass euler_char_input")
    diagnostics: Dict[str, object] = {}
    entries = _jacobian_entries(ci)
    if m >= 1:
        delta = linalg.poly_det(
            [[entries[i][j] for j in range(n - m, n)] for i in range(m)],
            budget=budget)
        if delta.constant_value() != 0:
            diagnostics["smooth_cross_check"] = _one_form_cross_check(
                op, entries, delta, sig, budget)
        else:
            diagnostics["smooth_cross_check"] = (
                "skipped: germ is not solved along its trailing block")
    index = sig - chi
    return IndexReport(
        index,
        (("pairing_signature", sig), ("fiber_euler", chi)),
        (("pairing_signature", 1), ("fiber_euler", -1)),
        diagnostics)


def _one_form_cross_check(op, entries, delta, sig, budget) -> str:
    ci = op.ci
    m = ci.n_equations
    n = ci.ctx.nz
    d = ci.dim
    denoms = []
    for j in range(d):
        den = delta * op.u[j]
        for kk in range(n - m, n):
            if op.u[kk].is_zero():
                continue
            picks = [c if c != kk else j for c in range(n - m, n)]
            bordered = linalg.poly_det(
                [[entries[i][c] for c in picks] for i in range(m)],
                budget=budget)
            den = den - bordered * op.u[kk]
        denoms.append(den)
    power = delta ** (d + 1)
    try:
        cross = _local_form_signature(
            list(ci.equations) + denoms, power, budget,
            sign=(-1) ** (d * m)).signature
    except PreconditionError as e:
        return f"skipped: {e}"
    if cross != sig:
        raise ArithmeticError(
            f"tangent-chart cross-check disagrees: chart signature {cross}, "
            f"pairing signature {sig}")
    return "agrees"


def one_form_dimension_check(op: OneFormProblem,
                             budget: Optional[Budget] = None) -> Tuple[int, int]:
    """Two independent dimension counts of the extended frame's quotient.

    Returns (colength of the extended minor ideal, dimension of the top
    symmetric slice); the two must agree for a well-posed frame.
    """
    budget = _op_budget(budget)
    ci = op.ci
    d = ci.dim
    cols = op.extended_columns()
    mctx = cols[0].poly.ctx
    m1 = mctx.nx
    entries = [[c.poly.coefficient_of_x(
        tuple(1 if s == i else 0 for s in range(m1))).shift_context(ci.ctx)
        for c in cols] for i in range(m1)]
    minors = [p for p in linalg.poly_minors(entries, m1) if not p.is_zero()]
    gens = list(ci.equations) + minors
    col = local_colength(gens, budget) if gens else None
    if col is None:
        raise PreconditionError("extended minor ideal has infinite colength")
    dims = module_colength(cols, (), d - 1, ci.equations, budget)
    return col, dims[d - 1]


# -- complex vector fields --------------------------------------------


def index_complex_vector_field(vp: VectorFieldProblem,
                               budget: Optional[Budget] = None) -> IndexReport:
    """Index of a complex-analytic field as an alternating multiplicity sum.

    Term j replaces one more tail component by a Jacobian column; each is
    the colength of the matching symmetric-power slice.  The Euler
    correction of the complex nearby fiber is the Milnor number with the
    dimension-parity sign.
    """
    budget = _op_budget(budget)
    ci = vp.ci
    m, n, d = vp.m, vp.n, vp.d
    v = list(vp.v)
    multiplicities = []
    gens = [p for p in list(ci.equations) + v[m:]]
    if any(p.is_zero() for p in gens):
        raise PreconditionError("multiplicity_0 is infinite: a tail component "
                                "vanishes identically")
    e0 = local_colength(gens, budget)
    if e0 is None:
        raise PreconditionError("multiplicity_0 is infinite")
    multiplicities.append(e0)
    if m >= 1:
        cols = _jacobian_columns(ci)
        for j in range(1, d + 1):
            grade = j // 2
            try:
                dims = module_colength(
                    cols[:m + j - 1], v[m + j:], grade, ci.equations, budget)
            except PreconditionError as e:
                raise PreconditionError(f"multiplicity_{j} is infinite: {e}") from None
            multiplicities.append(dims[grade])
        chi = ((-1) ** d) * milnor_le_greuel(ci, budget=budget)
    else:
        chi = 0
    index = sum(((-1) ** j) * e for j, e in enumerate(multiplicities)) - chi
    breakdown = tuple((f"multiplicity_{j}", e)
                      for j, e in enumerate(multiplicities))
    breakdown += (("fiber_euler", chi),)
    combination = tuple((f"multiplicity_{j}", (-1) ** j)
                        for j in range(len(multiplicities)))
    combination += (("fiber_euler", -1),)
    return IndexReport(index, breakdown, combination, {})


def _principal_module_dim(x: Poly, gens: Sequence[Poly], budget: Budget) -> int:
    """Dimension of the image of multiplication by x on the local quotient."""
    live = [g for g in gens if not g.is_zero()]
    if any(_is_unit_constant(g) for g in live):
        return 0
    ctx = x.ctx
    sb = std_basis([_as_vec(g) for g in live], local_order(), ctx.nz, budget)
    mons = standard_monomials(sb.lts, ctx.nz, 1)
    if mons is None:
        raise PreconditionError("quotient is infinite dimensional")
    pos = {exps: i for i, (_, exps) in enumerate(mons)}
    rows = []
    for _, exps in mons:
        h = x * Poly.monomial(ctx, exps)
        nf = sb.reduce(_as_vec(h), budget)
        row = [Fraction(0)] * len(mons)
        for (_, e), coef in nf.remainder.items():
            row[pos[e]] = coef
        rows.append(row)
    return _rat_rank(rows)


def complex_nesting_check(vp: VectorFieldProblem,
                          budget: Optional[Budget] = None) -> Dict[str, object]:
    """Exact integer consistency of the principal-part decompositions.

    The dimension of the chart determinant's multiples inside the tail
    quotient is computed twice: once as a multiplication-operator rank and
    once through colength differences along the shorter frames.  Both the
    one-step and the two-step splittings must match.
    """
    budget = _op_budget(budget)
    ci = vp.ci
    m = vp.m
    if m < 1:
        raise PreconditionError("needs at least one equation")
    v = list(vp.v)
    eqs = list(ci.equations)
    delta = _chart_determinant(ci, budget)

    def length(extra_gens):
        col = local_colength(
            [g for g in eqs + list(extra_gens) if not g.is_zero()], budget)
        if col is None:
            raise PreconditionError("a nesting quotient is infinite dimensional")
        return col

    tail_len = length(v[m:])
    both_len = length([delta] + v[m:])
    short_len = length([delta] + v[m + 1:])
    principal = _principal_module_dim(delta, eqs + v[m:], budget)
    step = _principal_module_dim(v[m], eqs + [delta] + v[m + 1:], budget)
    ok = (principal == tail_len - both_len
          and step == short_len - both_len
          and principal == tail_len - short_len + step)
    return {
        "principal_rank": principal,
        "tail_length": tail_len,
        "joint_length": both_len,
        "short_length": short_len,
        "step_rank": step,
        "ok": ok,
    }


# -- Milnor numbers ---------------------------------------------------


def milnor_le_greuel(ci: CompleteIntersection,
                     flag: Optional[Sequence[str]] = None,
                     rng: Optional[random.Random] = None,
                     budget: Optional[Budget] = None,
                     tries: int = 6) -> int:
    """Milnor number of the germ by slicing off one variable at a time.

    Each level subtracts the Milnor number of the hyperplane section from
    the top multiplicity of the shortened column frame; the recursion
    bottoms out at dimension zero, where the number is the colength minus
    one.  `flag` optionally lists the variables in removal order.  A
    section that fails the isolated-singularity check triggers a random
    rational change of coordinates, up to `tries` attempts.
    """
    budget = _op_budget(budget)
    if ci.n_equations < 1:
        raise PreconditionError("need at least one defining equation")
    work = ci
    if flag is not None:
        flag = list(flag)
        if sorted(flag) != sorted(ci.ctx.ambient):
            raise PreconditionError(
                "flag must order exactly the ambient variables")
        ctxp = Context(tuple(reversed(flag)))
        work = CompleteIntersection(
            ctxp, tuple(f.shift_context(ctxp) for f in ci.equations))
    rng = rng or random.Random(5)
    last_err = None
    for attempt in range(max(1, tries)):
        try:
            return _milnor_chain(work, budget)
        except PreconditionError as e:
            last_err = e
            n = work.ctx.nz
            change = random_linear_change(n, rng)
            assignment = _linear_assignment(work.ctx, change)
            work = CompleteIntersection(
                work.ctx,
                tuple(f.substitute(assignment) for f in work.equations))
    raise PreconditionError(
        f"no flag produced isolated sections after {tries} attempts: {last_err}")


def _milnor_chain(ci: CompleteIntersection, budget: Budget) -> int:
    n = ci.ctx.nz
    d = ci.dim
    if d == 0:
        col = local_colength(list(ci.equations), budget)
        if col is None:
            raise PreconditionError(
                "zero-dimensional germ with infinite colength")
        return col - 1
    if not ci.has_isolated_singularity(budget):
        raise PreconditionError(
            "the germ (or a section along the flag) fails the "
            "isolated-singularity check")
    cols = _jacobian_columns(ci)
    grade = d // 2
    dims = module_colength(cols[:n - 1], (), grade, ci.equations, budget)
    restricted = []
    for f in ci.equations:
        g = _restrict_last(f)
        if g.is_zero():
            raise PreconditionError("the flag section degenerates an equation")
        restricted.append(g)
    section = CompleteIntersection(Context(ci.ctx.ambient[:-1]), tuple(restricted))
    return dims[grade] - _milnor_chain(section, budget)


# -- the remainder identity on fibers ---------------------------------


def remainder_identity_check(ci: CompleteIntersection, t_sample,
                             budget: Optional[Budget] = None) -> bool:
    """Equality of the fiber remainder form with the Euler-characteristic gap.

    Left side: signature of the last Jacobian entry paired over the fiber
    quotient of the first n-1 entries.  Right side: reduced Euler
    characteristic of the fiber minus that of its last-coordinate section,
    both through the gradient-index helper.  Works for one equation on a
    germ of even dimension.
    """
    budget = _op_budget(budget)
    if ci.n_equations != 1:
        raise PreconditionError("the identity is checked for a single equation")
    t = Fraction(t_sample)
    if t == 0:
        raise PreconditionError("t_sample must be nonzero")
    d = ci.dim
    if d % 2:
        raise PreconditionError(
            "the section comparison needs a germ of even dimension")
    f = ci.equations[0]
    a = [f.derivative(name) for name in ci.ctx.ambient]
    lhs = _global_form_signature(
        ci.fiber_equations(t) + a[:-1], a[-1], budget).signature
    sgn = 1 if t > 0 else -1
    rhs = (euler_char_real_fiber(f, sgn, budget)
           - euler_char_real_fiber(_restrict_last(f), sgn, budget))
    return lhs == rhs


# -- constructing deformable fields -----------------------------------


def construct_deformable_field(ci: CompleteIntersection, depth: int = 1,
                               rng: Optional[random.Random] = None,
                               budget: Optional[Budget] = None,
                               tries: int = 40,
                               require_generic: bool = True) -> List[Poly]:
    """A field exactly tangent to every deformation fiber, with an isolated zero.

    Each (m+1)-subset of Jacobian columns gives one alternating-minor
    relation; a random polynomial combination of these relations is drawn
    until the colength certificate (and, by default, the full genericity
    battery) passes.  `depth` forces every component into that power of
    the maximal ideal by raising the combination degrees.
    """
    budget = _op_budget(budget)
    rng = rng or random.Random(0)
    m = ci.n_equations
    n = ci.ctx.nz
    if m < 1:
        raise PreconditionError("need at least one defining equation")
    if ci.dim < 1:
        raise PreconditionError("a zero-dimensional germ has no tangent fields")
    if depth < 1:
        raise PreconditionError("depth must be at least 1")
    ctx = ci.ctx
    entries = _jacobian_entries(ci)
    relations = []
    for subset in itertools.combinations(range(n), m + 1):
        rel = [Poly.zero(ctx)] * n
        degenerate = True
        for i, pos in enumerate(subset):
            others = [c for c in subset if c != pos]
            minor = linalg.poly_det(
                [[entries[r][c] for c in others] for r in range(m)],
                budget=budget)
            if not minor.is_zero():
                degenerate = False
            sign = Fraction(-1 if i % 2 else 1)
            rel[pos] = Poly.const(ctx, sign) * minor
        if not degenerate:
            order = min(p.order_at_origin() for p in rel if not p.is_zero())
            relations.append((rel, order))
    if not relations:
        raise PreconditionError("all minor relations vanish; the frame is degenerate")
    last_reason = "no attempt made"
    for _ in range(max(1, tries)):
        v = [Poly.zero(ctx)] * n
        for rel, order in relations:
            shift = max(0, depth - order)
            coeff = Poly.zero(ctx)
            for mono in _monomials_of_degree(ctx, shift):
                c = rng.randint(-3, 3)
                if c:
                    coeff = coeff + Poly.const(ctx, Fraction(c)) * mono
            if coeff.is_zero():
                continue
            for j in range(n):
                if not rel[j].is_zero():
                    v[j] = v[j] + coeff * rel[j]
        live = [p for p in list(ci.equations) + v if not p.is_zero()]
        # independent meter per draw; the caller's budget still caps the
        # aggregate, so exhaustion surfaces as the usual resource error
        probe = Budget(budget.limit)
        accepted = False
        try:
            if local_colength(live, probe) is None:
                last_reason = "zero locus on the germ is not isolated"
            elif require_generic:
                report = genericity_check(
                    VectorFieldProblem(ci, tuple(v)), probe)
                if report.all_ok:
                    accepted = True
                else:
                    last_reason = ("genericity failed on " +
                                   ", ".join(report.failed()))
            else:
                accepted = True
        except PreconditionError as e:
            last_reason = str(e)
        finally:
            budget.spend(probe.used)
        if accepted:
            return v
    raise PreconditionError(
        f"no certified field after {tries} random draws ({last_reason})")


# -- genericity diagnostics -------------------------------------------


def genericity_check(vp: VectorFieldProblem,
                     budget: Optional[Budget] = None) -> GenericityReport:
    """Finite-colength battery for the frame of a vector-field problem.

    Never raises on a failing check; each named family reports a boolean
    and a remediation hint is attached when anything fails.
    """
    budget = _op_budget(budget)
    ci = vp.ci
    m, n = vp.m, vp.n
    v = list(vp.v)
    eqs = list(ci.equations)
    checks: List[Tuple[str, bool]] = []

    def finite(gens) -> bool:
        live = [g for g in gens if not g.is_zero()]
        if not live:
            return False
        try:
            return local_colength(live, budget) is not None
        except PreconditionError:
            return False

    checks.append(("tail_ideal", finite(eqs + v[m:])))
    if m >= 1:
        delta = _chart_determinant(ci, budget)
        checks.append(("chart_determinant_nonzero", not delta.is_zero()))
        checks.append(("principal_ideal", finite(eqs + [delta] + v[m + 1:])))
        entries = _jacobian_entries(ci)
        for l in range(m, n):
            minors = linalg.poly_minors(
                [row[:l] for row in entries], m)
            checks.append((f"chain_ideal_{l}", finite(eqs + minors + v[l + 1:])))
        cols = _jacobian_columns(ci)
        mctx = cols[0].poly.ctx
        weighted = []
        for j in range(n):
            factor = v[j].shift_context(mctx)
            weighted.append(SymElem(cols[j].poly * factor, 1))
        try:
            module_colength(weighted, (), 1, eqs, budget)
            checks.append(("weighted_column_module", True))
        except PreconditionError:
            checks.append(("weighted_column_module", False))
    ok = all(flag for _, flag in checks)
    suggestion = None if ok else (
        "apply a random rational linear change of coordinates and retry")
    return GenericityReport(tuple(checks), suggestion)


# -- coordinate changes -----------------------------------------------


def random_linear_change(n: int, rng: random.Random,
                         span: int = 2) -> List[List[Fraction]]:
    """Invertible matrix with small integer entries and determinant one."""
    lower = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    upper = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if i > j:
                lower[i][j] = Fraction(rng.randint(-span, span))
            elif i < j:
                upper[i][j] = Fraction(rng.randint(-span, span))
    return [[sum(lower[i][k] * upper[k][j] for k in range(n))
             for j in range(n)] for i in range(n)]


def _linear_assignment(ctx: Context, matrix) -> Dict[str, Poly]:
    out = {}
    for i, name in enumerate(ctx.ambient):
        img = Poly.zero(ctx)
        for l, other in enumerate(ctx.ambient):
            c = matrix[i][l]
            if c:
                img = img + Poly.const(ctx, Fraction(c)) * Poly.var(ctx, other)
        out[name] = img
    return out


def transform_vector_field(vp: VectorFieldProblem,
                           matrix: Sequence[Sequence[Fraction]]) -> VectorFieldProblem:
    """Apply the exact linear substitution z = C w to germ and field.

    Components transform with the inverse matrix, so indices are preserved;
    supplied Euler characteristics are dropped because the hyperplane
    section is not.
    """
    ctx = vp.ci.ctx
    n = ctx.nz
    inv = _rat_inv(matrix)
    assignment = _linear_assignment(ctx, matrix)
    eqs = tuple(f.substitute(assignment) for f in vp.ci.equations)
    pulled = [p.substitute(assignment) for p in vp.v]
    comps = []
    for l in range(n):
        w = Poly.zero(ctx)
        for j in range(n):
            c = inv[l][j]
            if c and not pulled[j].is_zero():
                w = w + Poly.const(ctx, Fraction(c)) * pulled[j]
        comps.append(w)
    ci = CompleteIntersection(ctx, eqs, vp.ci.direction)
    return VectorFieldProblem(ci, tuple(comps), None, vp.t_sample)
