"""Exact local and global residues of zero-dimensional systems.

The local residue of a numerator against n denominators with an isolated
common zero at the origin is computed through the transformation law:
each variable power z_i^N_i is expressed exactly as a unit times a
combination of the denominators, which reduces the problem to a monomial
denominator system where the residue is a single coefficient read off a
truncated product.

The global variant sums the residues over every common zero of the
system in affine space, via monic univariate eliminants and the trace
formula.  Both are exact over the rationals.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .errors import PreconditionError
from .localbasis import (
    Budget,
    SPoly,
    Vec,
    colength_of_lts,
    normal_form,
    sp_add,
    sp_mul,
    standard_monomials,
    std_basis,
)
from .orders import global_degrevlex_key, global_order, local_order
from .poly import Context, Monomial, Poly


def _require_ambient(p: Poly, role: str):
    if any(m.x_degree() for m in p.terms):
        raise PreconditionError(f"{role} must not involve module variables")


def to_spoly(p: Poly) -> SPoly:
    _require_ambient(p, "polynomial")
    return {m.z: c for m, c in p.terms.items()}


def from_spoly(ctx: Context, sp: SPoly) -> Poly:
    zero_x = (0,) * ctx.nx
    return Poly(ctx, {Monomial(e, zero_x): c for e, c in sp.items()})


def ideal_vec(p: Poly) -> Vec:
    return {(0, m.z): c for m, c in p.terms.items()}


def inv_unit_series(u: Poly, bound: int, budget: Optional[Budget] = None) -> Poly:
    """Inverse of a unit power series, exact through total degree `bound`."""
    c = u.constant_value()
    if c == 0:
        raise PreconditionError("series inversion needs a nonzero constant term")
    ctx = u.ctx
    q = Poly.const(ctx, 1) - u.scale(Fraction(1) / c)  # order >= 1
    q = q.truncate(bound)
    acc = Poly.const(ctx, 1)
    power = Poly.const(ctx, 1)
    for _ in range(bound):
        if budget is not None:
            budget.spend(len(power.terms) + len(q.terms))
        power = power.mul_trunc(q, bound)
        if power.is_zero():
            break
        acc = acc + power
    return acc.scale(Fraction(1) / c)


def local_colength(denominators: Sequence[Poly], budget: Optional[Budget] = None) -> Optional[int]:
    """dim_Q of local ring / ideal, None when infinite."""
    if not denominators:
        return None
    n = denominators[0].ctx.nz
    gens = [ideal_vec(g) for g in denominators]
    sb = std_basis(gens, local_order(), n, budget)
    return colength_of_lts(sb.lts, n, 1)


def global_colength(denominators: Sequence[Poly], budget: Optional[Budget] = None) -> Optional[int]:
    """dim_Q of polynomial ring / ideal, None when infinite."""
    if not denominators:
        return None
    n = denominators[0].ctx.nz
    gens = [ideal_vec(g) for g in denominators]
    sb = std_basis(gens, global_order(), n, budget)
    return colength_of_lts(sb.lts, n, 1)


def _power_certificates(
    denominators: Sequence[Poly], budget: Budget
):
    """For each variable find u_i * z_i^N_i = sum_j C_ij * g_j exactly.

    Returns (N list, unit list, C matrix, colength, standard basis).
    """
    ctx = denominators[0].ctx
    n = ctx.nz
    gens = [ideal_vec(g) for g in denominators]
    sb = std_basis(gens, local_order(), n, budget, want_reps=True)
    col = colength_of_lts(sb.lts, n, 1)
    if col is None:
        raise PreconditionError("denominators do not have an isolated common zero at the origin")
    Ns: List[int] = []
    units: List[SPoly] = []
    C: List[List[SPoly]] = []
    for i in range(n):
        hit = None
        for N in range(1, col + 2):
            exps = tuple(N if v == i else 0 for v in range(n))
            nf = sb.reduce({(0, exps): Fraction(1)}, budget, want_cofactors=True)
            if not nf.remainder:
                hit = (N, nf)
                break
        if hit is None:
            raise PreconditionError("variable power not found in the ideal; colength bookkeeping failed")
        N, nf = hit
        row: List[SPoly] = [{} for _ in denominators]
        for k, ck in enumerate(nf.cofactors):
            if not ck:
                continue
            for j, rep in enumerate(sb.reps[k]):
                if rep:
                    row[j] = sp_add(row[j], sp_mul(ck, rep))
        Ns.append(N)
        units.append(nf.unit)
        C.append(row)
    return Ns, units, C, col, sb


class ResidueEvaluator:
    """Local residues at the origin against one fixed denominator system.

    The power certificates are computed once, lazily, so that many
    numerators can be paired against the same denominators cheaply.
    """

    def __init__(
        self,
        denominators: Sequence[Poly],
        budget: Optional[Budget] = None,
        exponent_shift: int = 0,
    ):
        if not denominators:
            raise PreconditionError("need at least one denominator")
        ctx = denominators[0].ctx
        for g in denominators:
            _require_ambient(g, "residue denominator")
            if g.ctx != ctx:
                raise PreconditionError("denominator context mismatch")
            if g.constant_value() != 0:
                raise PreconditionError("denominators must vanish at the origin")
        if len(denominators) != ctx.nz:
            raise PreconditionError(
                f"need exactly {ctx.nz} denominators for {ctx.nz} variables,"
                f" got {len(denominators)}"
            )
        if exponent_shift < 0:
            raise PreconditionError("exponent shift must be nonnegative")
        self.ctx = ctx
        self.denominators = tuple(denominators)
        self.budget = budget or Budget()
        # bumping every certified power by a fixed amount must not change
        # any value; exposed so that independence of the choice is testable
        self.exponent_shift = exponent_shift
        self._kernel: Optional[Poly] = None

    def _prepare(self):
        if self._kernel is not None:
            return
        ctx = self.ctx
        Ns, units, C, col, sb = _power_certificates(self.denominators, self.budget)
        shift = self.exponent_shift
        if shift:
            for i in range(ctx.nz):
                exps = tuple(shift if v == i else 0 for v in range(ctx.nz))
                C[i] = [sp_mul({exps: Fraction(1)}, e) for e in C[i]]
            Ns = [N + shift for N in Ns]
        self._col = col
        self._sb = sb
        bound = sum(N - 1 for N in Ns)
        self._bound = bound
        self._target = Monomial(tuple(N - 1 for N in Ns), (0,) * ctx.nx)
        crows = [[from_spoly(ctx, e).truncate(bound) for e in row] for row in C]
        detc = linalg.poly_det(crows, trunc=bound, budget=self.budget)
        for u in units:
            inv = inv_unit_series(from_spoly(ctx, u), bound, self.budget)
            self.budget.spend(len(detc.terms) + len(inv.terms))
            detc = detc.mul_trunc(inv, bound)
        self._kernel = detc

    @property
    def colength(self) -> int:
        self._prepare()
        return self._col

    def quotient_monomials(self) -> List[Monomial]:
        """Monomial basis of the local quotient ring, ascending degrevlex."""
        self._prepare()
        terms = standard_monomials(self._sb.lts, self.ctx.nz, 1)
        exps = sorted((e for _, e in terms), key=global_degrevlex_key)
        return [Monomial(e, (0,) * self.ctx.nx) for e in exps]

    def value(self, numerator: Poly, unit: Optional[Poly] = None) -> Fraction:
        """Residue of numerator/unit; `unit` must be invertible at the origin."""
        if numerator.ctx != self.ctx:
            raise PreconditionError("numerator context mismatch")
        _require_ambient(numerator, "residue numerator")
        if unit is not None:
            _require_ambient(unit, "residue unit factor")
            if unit.ctx != self.ctx:
                raise PreconditionError("unit factor context mismatch")
            if unit.constant_value() == 0:
                raise PreconditionError("unit factor must not vanish at the origin")
        if numerator.is_zero():
            return Fraction(0)
        self._prepare()
        bound = self._bound
        self.budget.spend(len(numerator.terms) + len(self._kernel.terms))
        h = numerator.truncate(bound).mul_trunc(self._kernel, bound)
        if unit is not None and not h.is_zero():
            h = h.mul_trunc(inv_unit_series(unit, bound, self.budget), bound)
        return h.terms.get(self._target, Fraction(0))


def grothendieck_residue(
    numerator: Poly,
    denominators: Sequence[Poly],
    budget: Optional[Budget] = None,
    unit: Optional[Poly] = None,
) -> Fraction:
    """Local residue at the origin of `numerator` against the denominators.

    Requires as many denominators as ambient variables and an isolated
    common zero at the origin.  Rational-linear in the numerator,
    alternating in the denominators, and kills numerators inside the
    denominator ideal.  `unit` divides the numerator by a function that is
    invertible at the origin.
    """
    ctx = numerator.ctx
    if ctx.nz == 0:
        if denominators:
            raise PreconditionError("no variables, so no denominators allowed")
        c = numerator.constant_value()
        if unit is not None:
            u0 = unit.constant_value()
            if u0 == 0:
                raise PreconditionError("unit factor must not vanish at the origin")
            c = c / u0
        return c
    return ResidueEvaluator(denominators, budget).value(numerator, unit)


class GlobalResidueEvaluator:
    """Sums of local residues over all affine common zeros of one system.

    Requires the system to be zero dimensional globally.  Works through
    monic univariate eliminants p_i(z_i) in the ideal and the coefficient
    form of the trace formula; the eliminants and the conversion matrix
    are computed once, lazily.
    """

    def __init__(self, denominators: Sequence[Poly], budget: Optional[Budget] = None):
        if not denominators:
            raise PreconditionError("need at least one denominator")
        ctx = denominators[0].ctx
        for g in denominators:
            _require_ambient(g, "residue denominator")
            if g.ctx != ctx:
                raise PreconditionError("denominator context mismatch")
        if len(denominators) != ctx.nz:
            raise PreconditionError(
                f"need exactly {ctx.nz} denominators for {ctx.nz} variables,"
                f" got {len(denominators)}"
            )
        self.ctx = ctx
        self.denominators = tuple(denominators)
        self.budget = budget or Budget()
        self._ready = False

    def _prepare(self):
        if self._ready:
            return
        ctx = self.ctx
        n = ctx.nz
        budget = self.budget
        gens = [ideal_vec(g) for g in self.denominators]
        sb = std_basis(gens, global_order(), n, budget, want_reps=True)
        col = colength_of_lts(sb.lts, n, 1)
        if col is None:
            raise PreconditionError("system is not zero dimensional over affine space")
        self._col = col
        self._sb = sb

        eliminants: List[Poly] = []
        degs: List[int] = []
        C: List[List[SPoly]] = []
        for i in range(n):
            # canonical normal forms of successive powers of z_i
            nfs: List[Dict] = []
            cofs: List[List[SPoly]] = []
            dependence = None
            for t in range(col + 1):
                exps = tuple(t if v == i else 0 for v in range(n))
                nf = sb.reduce({(0, exps): Fraction(1)}, budget, want_cofactors=True)
                support = sorted({term for prev in nfs for term in prev} | set(nf.remainder))
                a_cols = [[Fraction(prev.get(s, 0)) for prev in nfs] for s in support]
                rhs = [Fraction(nf.remainder.get(s, 0)) for s in support]
                sol = linalg.solve(a_cols, rhs) if nfs else ([] if not nf.remainder else None)
                if sol is not None:
                    dependence = (t, sol, nf)
                    break
                nfs.append(dict(nf.remainder))
                cofs.append(nf.cofactors)
            if dependence is None:
                raise PreconditionError("no univariate eliminant found; colength bookkeeping failed")
            t, sol, nf_t = dependence
            coeffs = {t: Fraction(1)}
            for s, lam in enumerate(sol):
                if lam:
                    coeffs[s] = -lam
            poly = Poly(ctx, {
                Monomial(tuple(e if v == i else 0 for v in range(n)), (0,) * ctx.nx): c
                for e, c in coeffs.items()
            })
            eliminants.append(poly)
            degs.append(t)
            # p_i = z_i^t - sum lam_s z_i^s equals the matching cofactor combination
            row: List[SPoly] = [{} for _ in self.denominators]
            contributions = [(Fraction(1), nf_t.cofactors)] + [
                (-lam, cofs[s]) for s, lam in enumerate(sol) if lam
            ]
            for scale, cof in contributions:
                for k, ck in enumerate(cof):
                    if not ck:
                        continue
                    scaled = {e: c * scale for e, c in ck.items()}
                    for j, rep in enumerate(sb.reps[k]):
                        if rep:
                            row[j] = sp_add(row[j], sp_mul(scaled, rep))
            C.append(row)

        crows = [[from_spoly(ctx, e) for e in row] for row in C]
        self._detc = linalg.poly_det(crows, budget=budget)
        self._box = [ideal_vec(p) for p in eliminants]
        self._target = tuple(d - 1 for d in degs)
        self._ready = True

    @property
    def colength(self) -> int:
        self._prepare()
        return self._col

    def quotient_monomials(self) -> List[Monomial]:
        """Monomial basis of the global quotient ring, ascending degrevlex."""
        self._prepare()
        terms = standard_monomials(self._sb.lts, self.ctx.nz, 1)
        exps = sorted((e for _, e in terms), key=global_degrevlex_key)
        return [Monomial(e, (0,) * self.ctx.nx) for e in exps]

    def value(self, numerator: Poly) -> Fraction:
        if numerator.ctx != self.ctx:
            raise PreconditionError("numerator context mismatch")
        _require_ambient(numerator, "residue numerator")
        if numerator.is_zero():
            return Fraction(0)
        self._prepare()
        if self._col == 0:
            return Fraction(0)
        self.budget.spend(len(numerator.terms) + len(self._detc.terms))
        h = numerator * self._detc
        reduced = normal_form(
            ideal_vec(h), self._box, global_order(), self.ctx.nz,
            self.budget, want_cofactors=False,
        )
        return reduced.remainder.get((0, self._target), Fraction(0))


def global_residue(
    numerator: Poly, denominators: Sequence[Poly], budget: Optional[Budget] = None
) -> Fraction:
    """Sum of local residues over every common zero in affine space.

    Requires the system to be zero dimensional globally (an empty zero set
    counts, with all residues zero).
    """
    ctx = numerator.ctx
    if ctx.nz == 0:
        if denominators:
            raise PreconditionError("no variables, so no denominators allowed")
        return numerator.constant_value()
    return GlobalResidueEvaluator(denominators, budget).value(numerator)


@dataclass(frozen=True)
class CompleteIntersection:
    """Germ of a complete intersection: ambient context plus equations.

    An empty equation list means the ambient space itself.  `dim` is the
    complex (or algebraic) dimension of the germ.  `direction` selects the
    line along which the germ is deformed into nearby fibers; the fiber at
    parameter t is cut out by f_i - t*direction_i.
    """

    ctx: Context
    equations: Tuple[Poly, ...]
    direction: Optional[Tuple[Fraction, ...]] = None

    def __post_init__(self):
        if self.ctx.nx:
            raise PreconditionError("complete intersection context must be ambient only")
        for f in self.equations:
            if f.ctx != self.ctx:
                raise PreconditionError("equation context mismatch")
            _require_ambient(f, "equation")
            if f.constant_value() != 0:
                raise PreconditionError("equations must vanish at the origin")
        if self.direction is not None:
            if len(self.direction) != len(self.equations):
                raise PreconditionError("deformation direction must have one entry per equation")
            if all(c == 0 for c in self.direction):
                raise PreconditionError("deformation direction must be nonzero")

    @property
    def n_ambient(self) -> int:
        return self.ctx.nz

    @property
    def n_equations(self) -> int:
        return len(self.equations)

    @property
    def dim(self) -> int:
        return self.ctx.nz - len(self.equations)

    def fiber_equations(self, t: Fraction) -> List[Poly]:
        """Equations of the deformed fiber at parameter t.

        Default direction is (1, ..., 1); these do not vanish at the
        origin once t is nonzero, so fiber work is global by nature.
        """
        direction = self.direction or tuple(Fraction(1) for _ in self.equations)
        t = Fraction(t)
        return [
            f - Poly.const(self.ctx, t * c) if c else f
            for f, c in zip(self.equations, direction)
        ]

    def jacobian(self) -> List[List[Poly]]:
        return [
            [f.derivative(name) for name in self.ctx.ambient]
            for f in self.equations
        ]

    def singular_locus_gens(self) -> List[Poly]:
        """Equations plus maximal Jacobian minors; cuts out the singular set."""
        gens = list(self.equations)
        if self.equations:
            gens += linalg.poly_minors(self.jacobian(), len(self.equations))
        return gens

    def has_isolated_singularity(self, budget: Optional[Budget] = None) -> bool:
        """Smooth outside the origin, in the sense of finite colength.

        The empty-equation germ (ambient space) counts as smooth, hence True.
        """
        if not self.equations:
            return True
        gens = self.singular_locus_gens()
        nz = [g for g in gens if not g.is_zero()]
        if not nz:
            return False
        return local_colength(nz, budget) is not None

    def residue(
        self, numerator: Poly, denominators: Sequence[Poly], budget: Optional[Budget] = None
    ) -> Fraction:
        """Residue on the germ: denominators must number `dim`.

        Evaluated as the ambient residue against equations-then-denominators;
        the order of the concatenation is part of the sign convention.
        """
        if len(denominators) != self.dim:
            raise PreconditionError(
                f"need {self.dim} denominators on a germ of dimension {self.dim}, "
                f"got {len(denominators)}"
            )
        return grothendieck_residue(
            numerator, list(self.equations) + list(denominators), budget
        )


def ci_residue(
    ci: CompleteIntersection,
    numerator: Poly,
    denominators: Sequence[Poly],
    budget: Optional[Budget] = None,
) -> Fraction:
    return ci.residue(numerator, denominators, budget)


@dataclass(frozen=True)
class ResidueProblem:
    """A numerator against denominators, on a germ or on ambient space.

    With `ci` present the denominators live on the germ (one per germ
    dimension); without it they form a full ambient system.
    """

    numerator: Poly
    denominators: Tuple[Poly, ...]
    ci: Optional[CompleteIntersection] = None

    def __post_init__(self):
        ctx = self.numerator.ctx
        for g in self.denominators:
            if g.ctx != ctx:
                raise PreconditionError("denominator context mismatch")
        if self.ci is not None:
            if self.ci.ctx != ctx:
                raise PreconditionError("germ context mismatch")
            want = self.ci.dim
        else:
            want = ctx.nz
        if len(self.denominators) != want:
            raise PreconditionError(
                f"need {want} denominators, got {len(self.denominators)}"
            )

    def local_value(self, budget: Optional[Budget] = None) -> Fraction:
        eqs = list(self.ci.equations) if self.ci else []
        return grothendieck_residue(
            self.numerator, eqs + list(self.denominators), budget
        )


def residue_at_fiber(
    rp: ResidueProblem, t: Fraction, budget: Optional[Budget] = None
) -> Fraction:
    """Sum of residues over the zeroes of the deformed system at parameter t.

    The undeformed system must concentrate its zeroes at the origin: the
    global colength at t has to agree with the local colength at 0, which
    certifies that no zero escaped the computed chart and none entered it.
    """
    eqs0 = list(rp.ci.equations) if rp.ci else []
    eqs_t = rp.ci.fiber_equations(Fraction(t)) if rp.ci else []
    local_col = local_colength(eqs0 + list(rp.denominators), budget)
    if local_col is None:
        raise PreconditionError("system does not have finite colength at the origin")
    ev = GlobalResidueEvaluator(eqs_t + list(rp.denominators), budget)
    if ev.colength != local_col:
        raise PreconditionError(
            f"fiber multiplicity {ev.colength} differs from the local multiplicity "
            f"{local_col}; zeroes crossed the chart boundary"
        )
    return ev.value(rp.numerator)
