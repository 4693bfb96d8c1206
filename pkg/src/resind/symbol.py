"""Generalized residue symbols on complete intersection germs.

A symbol instance pairs a numerator from a symmetric power of a free
module with a frame of degree-1 columns and scalar functions on the
germ.  Its value is an exact rational, computed in three steps: resolve
the frame's quotient ring by a hybrid symmetric-exterior complex, lift
the Koszul complex of an auxiliary regular sequence inside the frame
ideal through that resolution, and read the answer off as an ordinary
local residue against the auxiliary sequence.

The rank-1 case collapses to ordinary residues and serves as the
independent oracle for the general machinery.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from . import linalg
from .errors import PreconditionError
from .localbasis import (
    Budget,
    SPoly,
    Vec,
    is_regular_sequence,
    sp_add,
    sp_mul,
    standard_monomials,
    std_basis,
)
from .orders import global_degrevlex_key, local_order
from .poly import Context, Monomial, Poly, SymElem
from .residues import (
    CompleteIntersection,
    ResidueEvaluator,
    grothendieck_residue,
    ideal_vec,
    local_colength,
    to_spoly,
)


def _exponent_tuples(length: int, total: int) -> List[Tuple[int, ...]]:
    """All exponent tuples of the given length summing to total, lex order."""
    if total < 0:
        return []
    if length == 0:
        return [()] if total == 0 else []
    out = []
    for head in range(total, -1, -1):
        for tail in _exponent_tuples(length - 1, total - head):
            out.append((head,) + tail)
    return sorted(out)


def _insert_sign(j: int, positions: Tuple[int, ...]) -> int:
    return -1 if sum(1 for l in positions if l < j) % 2 else 1


def _merge_sign(left: Tuple[int, ...], right: Tuple[int, ...]) -> int:
    inversions = sum(1 for a in left for b in right if b < a)
    return -1 if inversions % 2 else 1


def _vec_of(p: Poly, comp: int) -> Vec:
    return {(comp, mon.z): c for mon, c in p.terms.items()}


def _poly_of_vec_entry(ctx: Context, sp_dict) -> Poly:
    terms = {Monomial(e, (0,) * ctx.nx): c for e, c in sp_dict.items() if c}
    return Poly(ctx, terms)


def _is_one(p: Poly) -> bool:
    return p.is_constant() and p.constant_value() == 1


class TotalBasisElt(NamedTuple):
    """Basis element of one spot of the total complex.

    spot is the total cochain index, kdeg the scalar-side wedge degree.
    alpha is the symmetric exponent, cols the column subset, scal the
    scalar subset.  At the top column spot alpha is zero and cols is the
    full range.
    """

    spot: int
    kdeg: int
    alpha: Tuple[int, ...]
    cols: Tuple[int, ...]
    scal: Tuple[int, ...]


@dataclass(frozen=True)
class SymbolProblem:
    """One generalized residue symbol: germ, columns, scalars, numerator."""

    ci: CompleteIntersection
    columns: Tuple[SymElem, ...]
    scalars: Tuple[Poly, ...]
    numerator: SymElem

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "scalars", tuple(self.scalars))
        if not self.columns:
            raise PreconditionError("need at least one column")
        mctx = self.columns[0].poly.ctx
        if mctx.nx < 1:
            raise PreconditionError("columns must carry module variables")
        if mctx.ambient != self.ci.ctx.ambient:
            raise PreconditionError("column context does not extend the germ context")
        d = self.ci.dim
        k = len(self.scalars)
        if not 0 <= k <= d - 1:
            raise PreconditionError(
                f"{k} scalars given; a germ of dimension {d} admits 0..{max(d - 1, 0)}"
            )
        for c in self.columns:
            if c.poly.ctx != mctx:
                raise PreconditionError("column context mismatch")
            if not c.poly.is_zero() and c.degree != 1:
                raise PreconditionError("columns must be degree-1 module elements")
        expected = (d - k) + mctx.nx - 1
        if len(self.columns) != expected:
            raise PreconditionError(
                f"need {expected} columns for this shape, got {len(self.columns)}"
            )
        for a in self.scalars:
            if a.ctx != self.ci.ctx:
                raise PreconditionError("scalar context mismatch")
            if a.constant_value() != 0:
                raise PreconditionError("scalars must vanish at the origin")
        p = self.numerator
        if p.poly.ctx != mctx:
            raise PreconditionError("numerator context mismatch")
        if not p.poly.is_zero() and p.degree != d - k - 1:
            raise PreconditionError(
                f"numerator degree must be {d - k - 1}, got {p.degree}"
            )

    @property
    def m(self) -> int:
        return self.columns[0].poly.ctx.nx

    @property
    def d(self) -> int:
        return self.ci.dim

    @property
    def k(self) -> int:
        return len(self.scalars)

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    @property
    def module_ctx(self) -> Context:
        return self.columns[0].poly.ctx

    def matrix_entries(self) -> List[List[Poly]]:
        """Coefficient matrix of the columns: m rows, one column each."""
        amb = self.ci.ctx
        m = self.m
        rows = []
        for i in range(m):
            unit = tuple(1 if s == i else 0 for s in range(m))
            rows.append([
                c.poly.coefficient_of_x(unit).shift_context(amb) for c in self.columns
            ])
        return rows

    def maximal_minors(self) -> List[Poly]:
        return linalg.poly_minors(self.matrix_entries(), self.m)

    def ideal_gens(self) -> List[Poly]:
        """Ambient generators of the frame ideal defining the symbol's ring."""
        gens = list(self.ci.equations) + list(self.scalars) + self.maximal_minors()
        return [g for g in gens if not g.is_zero()]

    def is_defined(self, budget: Optional[Budget] = None) -> bool:
        """Finite colength of the frame ideal, with the scalars extending
        the equations to a regular sequence."""
        gens = self.ideal_gens()
        if not gens:
            return self.ci.ctx.nz == 0
        if local_colength(gens, budget) is None:
            return False
        if self.scalars:
            seq = [to_spoly(g) for g in list(self.ci.equations) + list(self.scalars)]
            if not is_regular_sequence(seq, self.ci.ctx.nz, local_order(), budget):
                return False
        return True


@dataclass
class ResolutionData:
    """Free complex whose final cokernel is the symbol's quotient ring.

    boundaries[c] maps spot c to spot c+1; entries are ambient polynomials
    and the composites vanish identically, not just modulo the equations.
    """

    problem: SymbolProblem
    bases: List[List[TotalBasisElt]]
    boundaries: List[List[List[Poly]]]

    def spot_rank(self, c: int) -> int:
        return len(self.bases[c])

    def verify_d2(self) -> bool:
        zero = Poly.zero(self.problem.ci.ctx)
        for c in range(len(self.boundaries) - 1):
            lo, up = self.boundaries[c], self.boundaries[c + 1]
            for r in range(len(up)):
                for s in range(len(self.bases[c])):
                    acc = zero
                    for t in range(len(lo)):
                        if not lo[t][s].is_zero() and not up[r][t].is_zero():
                            acc = acc + up[r][t] * lo[t][s]
                    if not acc.is_zero():
                        return False
        return True


def _minor_det(entries: List[List[Poly]], cols: Tuple[int, ...]) -> Poly:
    sub = [[entries[i][j] for j in cols] for i in range(len(entries))]
    return linalg.poly_det(sub)


def build_resolution(sp: SymbolProblem) -> ResolutionData:
    """Materialize the hybrid complex for one symbol frame.

    Spots run 0..d.  The column side carries symmetric-times-exterior
    pieces up to a final rank-1 exterior top reached by wedging all rows
    at once; the scalar side is an ordinary Koszul complex, glued with
    the sign (-1)^(column spot).
    """
    m, d, k, n = sp.m, sp.d, sp.k, sp.n_cols
    entries = sp.matrix_entries()
    top_l = d - k
    full = tuple(range(n))
    zero_alpha = (0,) * m

    bases: List[List[TotalBasisElt]] = []
    index: List[Dict[TotalBasisElt, int]] = []
    for c in range(d + 1):
        elts: List[TotalBasisElt] = []
        for kdeg in range(0, min(c, k) + 1):
            c1 = c - kdeg
            if c1 > top_l:
                continue
            for scal in itertools.combinations(range(k), kdeg):
                if c1 == top_l:
                    elts.append(TotalBasisElt(c, kdeg, zero_alpha, full, scal))
                else:
                    deg = d - k - 1 - c1
                    for alpha in _exponent_tuples(m, deg):
                        for cols in itertools.combinations(range(n), c1):
                            elts.append(TotalBasisElt(c, kdeg, alpha, cols, scal))
        bases.append(elts)
        index.append({b: i for i, b in enumerate(elts)})

    zero = Poly.zero(sp.ci.ctx)
    boundaries: List[List[List[Poly]]] = []
    for c in range(d):
        mat = [[zero for _ in bases[c]] for _ in bases[c + 1]]
        for s, b in enumerate(bases[c]):
            c1 = b.spot - b.kdeg
            if c1 == top_l - 1:
                # jump: wedge every row at once; coefficient is a maximal minor
                comp = tuple(sorted(set(full) - set(b.cols)))
                minor = _minor_det(entries, comp)
                if not minor.is_zero():
                    sgn = _merge_sign(comp, b.cols)
                    tgt = TotalBasisElt(c + 1, b.kdeg, zero_alpha, full, b.scal)
                    r = index[c + 1][tgt]
                    mat[r][s] = mat[r][s] + (minor if sgn > 0 else -minor)
            elif c1 < top_l - 1:
                for i in range(m):
                    if b.alpha[i] == 0:
                        continue
                    na = tuple(a - 1 if t == i else a for t, a in enumerate(b.alpha))
                    for j in range(n):
                        if j in b.cols:
                            continue
                        e = entries[i][j]
                        if e.is_zero():
                            continue
                        sgn = _insert_sign(j, b.cols)
                        tgt = TotalBasisElt(
                            c + 1, b.kdeg, na, tuple(sorted(b.cols + (j,))), b.scal
                        )
                        r = index[c + 1][tgt]
                        mat[r][s] = mat[r][s] + (e if sgn > 0 else -e)
            # scalar side, with the total-complex sign on the column spot
            ksign = -1 if c1 % 2 else 1
            for l in range(k):
                if l in b.scal:
                    continue
                a = sp.scalars[l]
                if a.is_zero():
                    continue
                sgn = ksign * _insert_sign(l, b.scal)
                tgt = TotalBasisElt(
                    c + 1, b.kdeg + 1, b.alpha, b.cols, tuple(sorted(b.scal + (l,)))
                )
                r = index[c + 1][tgt]
                mat[r][s] = mat[r][s] + (a if sgn > 0 else -a)
        boundaries.append(mat)

    return ResolutionData(sp, bases, boundaries)


def choose_aux_sequence(
    sp: SymbolProblem,
    rng: Optional[random.Random] = None,
    budget: Optional[Budget] = None,
    power_cap: int = 4,
    tries: int = 8,
) -> Tuple[Poly, ...]:
    """Random combinations of the frame ideal generators forming a regular
    sequence on the germ, with power escalation as a fallback."""
    rng = rng or random.Random(0)
    budget = budget or Budget()
    material = [
        g for g in (list(sp.scalars) + sp.maximal_minors()) if not g.is_zero()
    ]
    if not material:
        raise PreconditionError("frame ideal has no nonzero generators")
    eqs = list(sp.ci.equations)
    d = sp.d
    ctx = sp.ci.ctx
    for power in range(1, power_cap + 1):
        for _ in range(tries):
            cand: List[Poly] = []
            for _i in range(d):
                combo = Poly.zero(ctx)
                guard = 0
                while combo.is_zero() or combo.constant_value() != 0:
                    combo = Poly.zero(ctx)
                    for g in material:
                        c = rng.randint(-3, 3)
                        if c:
                            combo = combo + Poly.const(ctx, Fraction(c)) * g
                    guard += 1
                    if guard > 50:
                        raise PreconditionError(
                            "cannot draw a combination vanishing at the origin"
                        )
                cand.append(combo ** power)
            if local_colength(eqs + cand, budget) is not None:
                return tuple(cand)
    raise PreconditionError(
        f"no auxiliary regular sequence found within power cap {power_cap}"
    )


@dataclass
class ChainMap:
    """Lift of the auxiliary Koszul complex through the symbol resolution.

    components[c] maps each subset S of the auxiliary indices (|S| = c)
    to a pair (vector over bases[c], unit): the actual component is the
    vector divided by the unit, which is invertible at the origin.
    """

    problem: SymbolProblem
    z_aux: Tuple[Poly, ...]
    resolution: ResolutionData
    components: List[Dict[Tuple[int, ...], Tuple[List[Poly], Poly]]]

    @property
    def epsilon(self) -> Tuple[List[Poly], Poly]:
        """Bottom component: the symbol's kernel vector and its unit."""
        return self.components[0][()]

    def verify(self, budget: Optional[Budget] = None) -> bool:
        """Recheck commutation with the boundaries by brute multiplication.

        Cross-multiplies the stored units so every identity is polynomial,
        then reduces modulo the germ equations.  Raises on any defect.
        """
        budget = budget or Budget()
        sp = self.problem
        res = self.resolution
        ctx = sp.ci.ctx
        d = sp.d
        eq_basis = None
        if sp.ci.equations:
            eq_basis = std_basis(
                [ideal_vec(f) for f in sp.ci.equations], local_order(), ctx.nz, budget
            )
        def bmul(a: Poly, b: Poly) -> Poly:
            budget.spend(len(a.terms) + len(b.terms))
            return a * b

        for c in range(d):
            mat = res.boundaries[c]
            for S, (nvec, u) in self.components[c].items():
                others = [i for i in range(d) if i not in S]
                children = [
                    (i, self.components[c + 1][tuple(sorted(S + (i,)))]) for i in others
                ]
                cap = Poly.const(ctx, Fraction(1))
                for _i, (_nv, cu) in children:
                    if not _is_one(cu):
                        cap = bmul(cap, cu)
                for r in range(len(res.bases[c + 1])):
                    lhs = Poly.zero(ctx)
                    for s, p in enumerate(nvec):
                        if not p.is_zero() and not mat[r][s].is_zero():
                            lhs = lhs + bmul(mat[r][s], p)
                    lhs = bmul(lhs, cap)
                    rhs = Poly.zero(ctx)
                    for i, (nv, cu) in children:
                        p = nv[r]
                        if p.is_zero():
                            continue
                        term = bmul(self.z_aux[i], p)
                        for j, (nv2, cu2) in children:
                            if j != i and not _is_one(cu2):
                                term = bmul(term, cu2)
                        sgn = _insert_sign(i, S)
                        rhs = rhs + (term if sgn > 0 else -term)
                    delta = lhs - bmul(rhs, u)
                    if delta.is_zero():
                        continue
                    if eq_basis is None:
                        raise PreconditionError(
                            f"chain map fails to commute at spot {c}, subset {S}"
                        )
                    nf = eq_basis.reduce(_vec_of(delta, 0), budget)
                    if nf.remainder:
                        raise PreconditionError(
                            f"chain map fails to commute at spot {c}, subset {S}"
                        )
        return True


def comparison_map(
    sp: SymbolProblem,
    z_aux: Optional[Sequence[Poly]] = None,
    rng: Optional[random.Random] = None,
    budget: Optional[Budget] = None,
    resolution: Optional[ResolutionData] = None,
    verify: bool = True,
) -> ChainMap:
    """Build the chain map from the Koszul complex of z_aux into the
    symbol resolution, lifting spot by spot from the top down.

    Each lower component is produced by solving a membership system with
    cofactor witnesses over the germ; an unsolvable system means the
    auxiliary sequence does not sit inside the frame ideal, i.e. the data
    violate the symbol's definedness condition.
    """
    budget = budget or Budget()
    res = resolution or build_resolution(sp)
    ctx = sp.ci.ctx
    d = sp.d
    if z_aux is None:
        z_aux = choose_aux_sequence(sp, rng, budget)
    z_aux = tuple(z_aux)
    if len(z_aux) != d:
        raise PreconditionError(f"need {d} auxiliary elements, got {len(z_aux)}")
    for z in z_aux:
        if z.ctx != ctx:
            raise PreconditionError("auxiliary element context mismatch")
        if z.constant_value() != 0:
            raise PreconditionError("auxiliary elements must vanish at the origin")

    one = Poly.const(ctx, Fraction(1))

    def bmul(a: Poly, b: Poly) -> Poly:
        # unit products can snowball on degenerate data; charge them
        budget.spend(len(a.terms) + len(b.terms))
        return a * b

    components: List[Dict[Tuple[int, ...], Tuple[List[Poly], Poly]]] = [
        {} for _ in range(d + 1)
    ]
    components[d][tuple(range(d))] = ([one], one)

    eq_vecs = [to_spoly(f) for f in sp.ci.equations]
    for c in range(d - 1, -1, -1):
        mat = res.boundaries[c]
        nrows = len(res.bases[c + 1])
        ncols = len(res.bases[c])
        gens: List[Vec] = []
        for s in range(ncols):
            v: Vec = {}
            for r in range(nrows):
                p = mat[r][s]
                for mon, coeff in p.terms.items():
                    key = (r, mon.z)
                    acc = v.get(key, Fraction(0)) + coeff
                    if acc:
                        v[key] = acc
                    else:
                        v.pop(key, None)
            gens.append(v)
        for fvec in eq_vecs:
            for r in range(nrows):
                gens.append({(r, e): co for e, co in fvec.items()})
        sb = std_basis(gens, local_order(), ctx.nz, budget, want_reps=True)

        for S in itertools.combinations(range(d), c):
            others = [i for i in range(d) if i not in S]
            children = [
                (i, components[c + 1][tuple(sorted(S + (i,)))]) for i in others
            ]
            cap = one
            for _i, (_nv, cu) in children:
                if not _is_one(cu):
                    cap = bmul(cap, cu)
            target: Vec = {}
            for i, (nv, _cu) in children:
                scale = z_aux[i]
                for j, (_nv2, cu2) in children:
                    if j != i and not _is_one(cu2):
                        scale = bmul(scale, cu2)
                sgn = _insert_sign(i, S)
                if sgn < 0:
                    scale = -scale
                for r, p in enumerate(nv):
                    if p.is_zero():
                        continue
                    q = bmul(scale, p)
                    for mon, coeff in q.terms.items():
                        key = (r, mon.z)
                        acc = target.get(key, Fraction(0)) + coeff
                        if acc:
                            target[key] = acc
                        else:
                            target.pop(key, None)
            if not target:
                components[c][S] = ([Poly.zero(ctx)] * ncols, one)
                continue
            nf = sb.reduce(target, budget, want_cofactors=True)
            if nf.remainder:
                raise PreconditionError(
                    "auxiliary sequence does not lift through the resolution; "
                    "the symbol is not defined for these data"
                )
            # compose the basis cofactors back onto the original generators
            orig: List[SPoly] = [{} for _ in gens]
            for kk, ck in enumerate(nf.cofactors):
                if not ck:
                    continue
                for jj, rep in enumerate(sb.reps[kk]):
                    if rep:
                        budget.spend(len(ck) + len(rep))
                        orig[jj] = sp_add(orig[jj], sp_mul(ck, rep))
            nvec = [_poly_of_vec_entry(ctx, orig[s]) for s in range(ncols)]
            u = _poly_of_vec_entry(ctx, nf.unit)
            unit = u if _is_one(cap) else (cap if _is_one(u) else bmul(u, cap))
            components[c][S] = (nvec, unit)

    cm = ChainMap(sp, z_aux, res, components)
    if verify:
        cm.verify(budget)
    return cm


class SymbolEvaluator:
    """One symbol frame, many numerators.

    The chain map and residue certificates are computed once; each value()
    call is then a coefficient pairing plus one truncated-series residue.
    """

    def __init__(
        self,
        ci: CompleteIntersection,
        columns: Sequence[SymElem],
        scalars: Sequence[Poly] = (),
        z_aux: Optional[Sequence[Poly]] = None,
        rng: Optional[random.Random] = None,
        budget: Optional[Budget] = None,
        verify: bool = False,
        resolution: Optional[ResolutionData] = None,
    ):
        columns = tuple(columns)
        scalars = tuple(scalars)
        if not columns:
            raise PreconditionError("need at least one column")
        mctx = columns[0].poly.ctx
        deg = ci.dim - len(scalars) - 1
        placeholder = SymElem(Poly.zero(mctx), deg)
        self.problem = SymbolProblem(ci, columns, scalars, placeholder)
        self.budget = budget or Budget()
        gens = self.problem.ideal_gens()
        col = local_colength(gens, self.budget) if gens else None
        if col is None:
            raise PreconditionError("frame ideal does not have finite colength")
        # a unit in the frame ideal collapses the quotient; every value is 0
        self._trivial = col == 0
        if self._trivial:
            self.chain = None
            self.z_aux = ()
            return
        self.chain = comparison_map(
            self.problem, z_aux, rng=rng, budget=self.budget,
            resolution=resolution, verify=verify,
        )
        self.z_aux = self.chain.z_aux
        eps_vec, eps_unit = self.chain.epsilon
        self._eps = eps_vec
        self._unit = None if _is_one(eps_unit) else eps_unit
        self._alphas = [b.alpha for b in self.chain.resolution.bases[0]]
        self._resid = ResidueEvaluator(
            list(ci.equations) + list(self.z_aux), self.budget
        )

    def value(self, numerator: SymElem) -> Fraction:
        sp = self.problem
        p = numerator.poly
        if p.ctx != sp.module_ctx:
            raise PreconditionError("numerator context mismatch")
        if p.is_zero() or self._trivial:
            return Fraction(0)
        if numerator.degree != sp.d - sp.k - 1:
            raise PreconditionError(
                f"numerator degree must be {sp.d - sp.k - 1}, got {numerator.degree}"
            )
        amb = sp.ci.ctx
        h = Poly.zero(amb)
        for alpha, e in zip(self._alphas, self._eps):
            if e.is_zero():
                continue
            coeff = p.coefficient_of_x(alpha).shift_context(amb)
            if not coeff.is_zero():
                h = h + coeff * e
        if h.is_zero():
            return Fraction(0)
        return self._resid.value(h, unit=self._unit)


def symbol_evaluate(
    sp: SymbolProblem,
    z_aux: Optional[Sequence[Poly]] = None,
    rng: Optional[random.Random] = None,
    budget: Optional[Budget] = None,
) -> Fraction:
    """Value of the generalized residue symbol as an exact rational.

    Independent of the choice of auxiliary sequence; a fresh random one is
    drawn deterministically when none is supplied.
    """
    ev = SymbolEvaluator(
        sp.ci, sp.columns, sp.scalars, z_aux=z_aux, rng=rng, budget=budget
    )
    return ev.value(sp.numerator)


def ordinary_residue_value(sp: SymbolProblem, budget: Optional[Budget] = None) -> Fraction:
    """Rank-1 oracle: the symbol as an ordinary ambient residue.

    With one module variable the hybrid complex is the Koszul complex of
    the column entries and scalars, so the symbol is the residue of the
    numerator's coefficient against equations, entries, then scalars.
    """
    if sp.m != 1:
        raise PreconditionError("collapse oracle needs module rank 1")
    amb = sp.ci.ctx
    entries = sp.matrix_entries()[0]
    coeff = sp.numerator.poly.coefficient_of_x((sp.d - sp.k - 1,)).shift_context(amb)
    denoms = list(sp.ci.equations) + entries + list(sp.scalars)
    return grothendieck_residue(coeff, denoms, budget)


# ---------------------------------------------------------------------------
# graded quotient pieces and the duality pairing space


def _graded_piece(
    mctx: Context,
    amb: Context,
    entries: List[List[Poly]],
    ring_gens: Sequence[Poly],
    degree: int,
    budget: Budget,
) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Monomial basis (alpha, z-exponents) of one symmetric-degree slice of
    the quotient by ring generators and column shifts.  Raises when the
    slice has infinite dimension."""
    m = mctx.nx
    alphas = _exponent_tuples(m, degree)
    comp_of = {a: i for i, a in enumerate(alphas)}
    gens: List[Vec] = []
    ring_nz = [g for g in ring_gens if not g.is_zero()]
    for idx in range(len(alphas)):
        for g in ring_nz:
            gens.append(_vec_of(g, idx))
    if degree >= 1:
        ncols = len(entries[0]) if entries else 0
        for a2 in _exponent_tuples(m, degree - 1):
            for j in range(ncols):
                v: Vec = {}
                for i in range(m):
                    bumped = tuple(x + 1 if t == i else x for t, x in enumerate(a2))
                    comp = comp_of[bumped]
                    p = entries[i][j]
                    for mon, coeff in p.terms.items():
                        key = (comp, mon.z)
                        acc = v.get(key, Fraction(0)) + coeff
                        if acc:
                            v[key] = acc
                        else:
                            v.pop(key, None)
                if v:
                    gens.append(v)
    if not gens:
        if amb.nz == 0:
            return [(a, ()) for a in alphas]
        raise PreconditionError(f"graded piece {degree} is infinite dimensional")
    sb = std_basis(gens, local_order(), amb.nz, budget)
    terms = standard_monomials(sb.lts, amb.nz, len(alphas))
    if terms is None:
        raise PreconditionError(f"graded piece {degree} is infinite dimensional")
    out = [(alphas[comp], exps) for comp, exps in terms]
    out.sort(key=lambda t: (t[0], global_degrevlex_key(t[1])))
    return out


def module_colength(
    columns: Sequence[SymElem],
    scalars: Sequence[Poly] = (),
    top_degree: int = 0,
    equations: Sequence[Poly] = (),
    budget: Optional[Budget] = None,
) -> List[int]:
    """Dimensions of the symmetric-degree slices of the column quotient.

    Degree i counts monomials of S_i modulo the scalars, the equations,
    the column shifts from degree i-1, and the maximal minors of the
    column matrix (the minors only matter in degree 0, where the shifts
    are empty).
    """
    budget = budget or Budget()
    columns = tuple(columns)
    if not columns:
        raise PreconditionError("need at least one column")
    mctx = columns[0].poly.ctx
    if mctx.nx < 1:
        raise PreconditionError("columns must carry module variables")
    for c in columns:
        if c.poly.ctx != mctx:
            raise PreconditionError("column context mismatch")
        if not c.poly.is_zero() and c.degree != 1:
            raise PreconditionError("columns must be degree-1 module elements")
    amb = mctx.ambient_only()
    m = mctx.nx
    entries = []
    for i in range(m):
        unit = tuple(1 if s == i else 0 for s in range(m))
        entries.append([
            c.poly.coefficient_of_x(unit).shift_context(amb) for c in columns
        ])
    minors = linalg.poly_minors(entries, m)
    ring_gens = list(equations) + list(scalars) + minors
    for g in list(equations) + list(scalars):
        if g.ctx != amb:
            raise PreconditionError("scalar or equation context mismatch")
    dims = []
    for i in range(top_degree + 1):
        basis = _graded_piece(mctx, amb, entries, ring_gens, i, budget)
        dims.append(len(basis))
    return dims


@dataclass(frozen=True)
class PairingSpace:
    """Monomial bases of every symmetric-degree slice of the symbol's
    quotient module, the home of the duality pairing."""

    mctx: Context
    bases: Tuple[Tuple[SymElem, ...], ...]

    @property
    def dimensions(self) -> Tuple[int, ...]:
        return tuple(len(b) for b in self.bases)

    @property
    def dimension(self) -> int:
        return sum(self.dimensions)

    @property
    def top_degree(self) -> int:
        return len(self.bases) - 1

    def basis(self, degree: int) -> Tuple[SymElem, ...]:
        return self.bases[degree]


def pairing_space(
    ci: CompleteIntersection,
    columns: Sequence[SymElem],
    scalars: Sequence[Poly] = (),
    budget: Optional[Budget] = None,
) -> PairingSpace:
    """Quotient bases in degrees 0..d-k-1 for the symbol frame."""
    budget = budget or Budget()
    columns = tuple(columns)
    scalars = tuple(scalars)
    if not columns:
        raise PreconditionError("need at least one column")
    mctx = columns[0].poly.ctx
    placeholder = SymElem(Poly.zero(mctx), ci.dim - len(scalars) - 1)
    sp = SymbolProblem(ci, columns, scalars, placeholder)
    entries = sp.matrix_entries()
    ring_gens = sp.ideal_gens()
    amb = ci.ctx
    top = sp.d - sp.k - 1
    bases: List[Tuple[SymElem, ...]] = []
    for i in range(top + 1):
        raw = _graded_piece(mctx, amb, entries, ring_gens, i, budget)
        elems = tuple(
            SymElem(Poly.monomial(mctx, exps, alpha), i) for alpha, exps in raw
        )
        bases.append(elems)
    return PairingSpace(mctx, tuple(bases))


# ---------------------------------------------------------------------------
# rewrite rules


def apply_module_transform(elem: SymElem, mat: Sequence[Sequence[Fraction]]) -> SymElem:
    """Push a module automorphism through a symmetric element.

    The matrix acts on column vectors; on the symmetric algebra this is
    the substitution X_i -> sum_s mat[s][i] X_s.
    """
    mctx = elem.poly.ctx
    m = mctx.nx
    if len(mat) != m or any(len(row) != m for row in mat):
        raise PreconditionError("transform size must match the module rank")
    names = mctx.names[mctx.nz:]
    assignment = {}
    for i in range(m):
        acc = Poly.zero(mctx)
        for s in range(m):
            c = Fraction(mat[s][i])
            if c:
                acc = acc + Poly.const(mctx, c) * Poly.var(mctx, names[s])
        assignment[names[i]] = acc
    return SymElem(elem.poly.substitute(assignment), elem.degree)


def _scale_sym(elem: SymElem, factor: Poly) -> SymElem:
    lifted = factor.shift_context(elem.poly.ctx)
    return SymElem(lifted * elem.poly, elem.degree)


def _random_ambient_affine(rng: random.Random, ctx: Context, const_prob: float = 0.5) -> Poly:
    p = Poly.zero(ctx)
    for name in ctx.ambient:
        c = rng.randint(-2, 2)
        if c:
            p = p + Poly.const(ctx, Fraction(c)) * Poly.var(ctx, name)
    if rng.random() < const_prob:
        c = rng.choice([-2, -1, 1, 2])
        p = p + Poly.const(ctx, Fraction(c))
    return p


def _random_column(rng: random.Random, mctx: Context) -> SymElem:
    amb = mctx.ambient_only()
    acc = Poly.zero(mctx)
    names = mctx.names[mctx.nz:]
    for name in names:
        coeff = _random_ambient_affine(rng, amb, const_prob=0.2)
        if not coeff.is_zero():
            acc = acc + coeff.shift_context(mctx) * Poly.var(mctx, name)
    if acc.is_zero():
        acc = Poly.var(mctx, names[rng.randrange(len(names))])
    return SymElem(acc, 1)


def _random_vanishing_scalar(rng: random.Random, ctx: Context) -> Poly:
    p = Poly.zero(ctx)
    while p.is_zero():
        p = Poly.zero(ctx)
        for name in ctx.ambient:
            c = rng.randint(-2, 2)
            if c:
                p = p + Poly.const(ctx, Fraction(c)) * Poly.var(ctx, name)
        if rng.random() < 0.4:
            a = rng.choice(ctx.ambient)
            b = rng.choice(ctx.ambient)
            c = rng.randint(-2, 2)
            if c:
                p = p + Poly.const(ctx, Fraction(c)) * Poly.var(ctx, a) * Poly.var(ctx, b)
    return p


def random_symbol_instance(
    rng: random.Random,
    m: int,
    d: int,
    k: int,
    n_equations: int = 0,
    budget: Optional[Budget] = None,
    max_tries: int = 60,
) -> SymbolProblem:
    """Draw a random well-defined symbol instance of the given shape.

    Germs with equations are smooth graphs, which keeps the drawing cheap
    while still exercising the quotient-ring arithmetic.
    """
    budget = budget or Budget()
    n_amb = d + n_equations
    ctx = Context(tuple(f"z{i+1}" for i in range(n_amb)))
    equations = []
    for l in range(n_equations):
        g = Poly.var(ctx, f"z{d+l+1}")
        for _ in range(2):
            a = rng.randrange(d)
            b = rng.randrange(d)
            c = rng.randint(-2, 2)
            if c:
                g = g + Poly.const(ctx, Fraction(c)) * Poly.var(ctx, f"z{a+1}") * Poly.var(ctx, f"z{b+1}")
        equations.append(g)
    ci = CompleteIntersection(ctx, tuple(equations))
    mctx = ctx.with_module(m)
    ncols = (d - k) + m - 1
    for _ in range(max_tries):
        columns = tuple(_random_column(rng, mctx) for _ in range(ncols))
        scalars = tuple(_random_vanishing_scalar(rng, ctx) for _ in range(k))
        num = Poly.zero(mctx)
        for alpha in _exponent_tuples(m, d - k - 1):
            coeff = _random_ambient_affine(rng, ctx, const_prob=0.6)
            if not coeff.is_zero():
                num = num + coeff.shift_context(mctx) * Poly.monomial(mctx, (0,) * ctx.nz, alpha)
        numerator = SymElem(num, d - k - 1)
        try:
            sp = SymbolProblem(ci, columns, scalars, numerator)
        except PreconditionError:
            continue
        gens = sp.ideal_gens()
        if not gens:
            continue
        col = local_colength(gens, budget)
        if col is None or col == 0:
            continue  # want a nontrivial quotient so checks are not vacuous
        if sp.is_defined(budget):
            return sp
    raise PreconditionError(
        f"no defined instance found in {max_tries} draws for m={m}, d={d}, k={k}"
    )


@dataclass(frozen=True)
class RuleCheck:
    rule: str
    ok: bool
    witness: Dict[str, object]


def _eval(sp: SymbolProblem, rng: random.Random, budget: Budget) -> Fraction:
    return symbol_evaluate(sp, rng=rng, budget=budget)


def rule_check(
    rule: str,
    sp: SymbolProblem,
    rng: Optional[random.Random] = None,
    budget: Optional[Budget] = None,
) -> RuleCheck:
    """Check one rewrite rule on a concrete instance.

    Both sides are evaluated through the full machinery with independent
    auxiliary sequences.  Instances whose left side fails the definedness
    condition raise, so callers can skip and redraw.
    """
    rng = rng or random.Random(0)
    budget = budget or Budget()
    rule = rule.upper()
    handlers = {
        "R1": _check_scalar_cancel,
        "R2": _check_column_cancel,
        "R3": _check_antisymmetry,
        "R4": _check_column_absorb,
        "R5": _check_det_collapse,
        "R6": _check_duality,
        "TRANSFORM": _check_module_transform,
    }
    if rule not in handlers:
        raise PreconditionError(f"unknown rule {rule}")
    return handlers[rule](sp, rng, budget)


def _check_scalar_cancel(sp: SymbolProblem, rng, budget) -> RuleCheck:
    # multiply the first scalar and the numerator by a common factor
    if sp.k < 1:
        raise PreconditionError("rule needs at least one scalar")
    for _ in range(8):
        b = _random_ambient_affine(rng, sp.ci.ctx, const_prob=0.7)
        if b.is_zero():
            continue
        scalars = (b * sp.scalars[0],) + sp.scalars[1:]
        try:
            lhs_sp = SymbolProblem(
                sp.ci, sp.columns, scalars, _scale_sym(sp.numerator, b)
            )
        except PreconditionError:
            continue
        if not lhs_sp.is_defined(budget):
            continue
        lhs = _eval(lhs_sp, rng, budget)
        rhs = _eval(sp, rng, budget)
        return RuleCheck("R1", lhs == rhs, {"lhs": lhs, "rhs": rhs, "factor": str(b)})
    raise PreconditionError("no factor kept the left side defined")


def _check_column_cancel(sp: SymbolProblem, rng, budget) -> RuleCheck:
    # multiply the last column and the numerator by a common factor
    for _ in range(8):
        b = _random_ambient_affine(rng, sp.ci.ctx, const_prob=0.7)
        if b.is_zero():
            continue
        columns = sp.columns[:-1] + (_scale_sym(sp.columns[-1], b),)
        try:
            lhs_sp = SymbolProblem(
                sp.ci, columns, sp.scalars, _scale_sym(sp.numerator, b)
            )
        except PreconditionError:
            continue
        if not lhs_sp.is_defined(budget):
            continue
        lhs = _eval(lhs_sp, rng, budget)
        rhs = _eval(sp, rng, budget)
        return RuleCheck("R2", lhs == rhs, {"lhs": lhs, "rhs": rhs, "factor": str(b)})
    raise PreconditionError("no factor kept the left side defined")


def _check_antisymmetry(sp: SymbolProblem, rng, budget) -> RuleCheck:
    swap_scalars = sp.k >= 2 and (sp.n_cols < 2 or rng.random() < 0.5)
    if swap_scalars:
        i, j = rng.sample(range(sp.k), 2)
        scalars = list(sp.scalars)
        scalars[i], scalars[j] = scalars[j], scalars[i]
        lhs_sp = SymbolProblem(sp.ci, sp.columns, tuple(scalars), sp.numerator)
        what = f"scalars {i},{j}"
    else:
        if sp.n_cols < 2:
            raise PreconditionError("nothing to swap")
        i, j = rng.sample(range(sp.n_cols), 2)
        columns = list(sp.columns)
        columns[i], columns[j] = columns[j], columns[i]
        lhs_sp = SymbolProblem(sp.ci, tuple(columns), sp.scalars, sp.numerator)
        what = f"columns {i},{j}"
    lhs = _eval(lhs_sp, rng, budget)
    rhs = _eval(sp, rng, budget)
    return RuleCheck("R3", lhs == -rhs, {"lhs": lhs, "rhs": rhs, "swapped": what})


def _check_column_absorb(sp: SymbolProblem, rng, budget) -> RuleCheck:
    # trade the first scalar for an extra column scaled by it
    if sp.k < 1:
        raise PreconditionError("rule needs at least one scalar")
    a1 = sp.scalars[0]
    for _ in range(8):
        extra = _random_column(rng, sp.module_ctx)
        columns = sp.columns + (_scale_sym(extra, a1),)
        numerator = SymElem(
            extra.poly * sp.numerator.poly, sp.numerator.degree + 1
        )
        try:
            lhs_sp = SymbolProblem(sp.ci, columns, sp.scalars[1:], numerator)
        except PreconditionError:
            continue
        if not lhs_sp.is_defined(budget):
            continue
        lhs = _eval(lhs_sp, rng, budget)
        rhs = _eval(sp, rng, budget)
        return RuleCheck(
            "R4", lhs == rhs, {"lhs": lhs, "rhs": rhs, "extra": str(extra.poly)}
        )
    raise PreconditionError("no extra column kept the left side defined")


def _check_det_collapse(sp: SymbolProblem, rng, budget) -> RuleCheck:
    # square frame: symbol equals the classical residue with the column
    # determinant leading the scalar denominators
    if sp.k != sp.d - 1:
        raise PreconditionError("rule needs a square column frame")
    lhs = _eval(sp, rng, budget)
    delta = linalg.poly_det(sp.matrix_entries())
    coeff = sp.numerator.poly.coefficient_of_x((0,) * sp.m).shift_context(sp.ci.ctx)
    rhs = grothendieck_residue(
        coeff, list(sp.ci.equations) + [delta] + list(sp.scalars), budget
    )
    return RuleCheck("R5", lhs == rhs, {"lhs": lhs, "rhs": rhs, "det": str(delta)})


def _check_module_transform(sp: SymbolProblem, rng, budget) -> RuleCheck:
    m = sp.m
    det = Fraction(0)
    mat: List[List[Fraction]] = []
    while det == 0:
        mat = [
            [Fraction(rng.randint(-2, 2)) for _ in range(m)] for _ in range(m)
        ]
        det = linalg.det([row[:] for row in mat])
    columns = tuple(apply_module_transform(c, mat) for c in sp.columns)
    pushed = apply_module_transform(sp.numerator, mat)
    numerator = SymElem(
        Poly.const(sp.module_ctx, det) * pushed.poly, pushed.degree
    )
    lhs_sp = SymbolProblem(sp.ci, columns, sp.scalars, numerator)
    lhs = _eval(lhs_sp, rng, budget)
    rhs = _eval(sp, rng, budget)
    return RuleCheck(
        "TRANSFORM", lhs == rhs, {"lhs": lhs, "rhs": rhs, "det": det}
    )


def _check_duality(sp: SymbolProblem, rng, budget) -> RuleCheck:
    space = pairing_space(sp.ci, sp.columns, sp.scalars, budget)
    ev = SymbolEvaluator(
        sp.ci, sp.columns, sp.scalars, rng=rng, budget=budget
    )
    top = space.top_degree
    flat: List[Tuple[int, SymElem]] = []
    for i, basis in enumerate(space.bases):
        flat.extend((i, b) for b in basis)
    size = len(flat)
    rows: List[List[Fraction]] = []
    for i, p in flat:
        row = []
        for j, q in flat:
            if i + j == top:
                row.append(ev.value(SymElem(p.poly * q.poly, top)))
            else:
                row.append(Fraction(0))
        rows.append(row)
    rank = linalg.rank(rows) if size else 0
    ok = rank == size
    return RuleCheck(
        "R6", ok, {"rank": rank, "dimension": size, "dims": space.dimensions}
    )


# ---------------------------------------------------------------------------
# smooth-frame reduction oracle


@dataclass(frozen=True)
class SmoothReduction:
    """Frame reduction when the trailing square block is invertible.

    Stores the adjugate automorphism, the presentation determinants, and
    evaluates symbols over the leading columns as ordinary residues.
    """

    ci: CompleteIntersection
    columns: Tuple[SymElem, ...]
    automorphism: Tuple[Tuple[Poly, ...], ...]
    delta: Poly
    presentation: Tuple[Poly, ...]

    def value(self, numerator: SymElem, budget: Optional[Budget] = None) -> Fraction:
        mctx = self.columns[0].poly.ctx
        m = mctx.nx
        d = self.ci.dim
        if not numerator.poly.is_zero() and numerator.degree != d - 1:
            raise PreconditionError(f"numerator degree must be {d - 1}")
        names = mctx.names[mctx.nz:]
        assignment = {}
        for i in range(m):
            acc = Poly.zero(mctx)
            for s in range(m):
                a = self.automorphism[s][i]
                if not a.is_zero():
                    acc = acc + a.shift_context(mctx) * Poly.var(mctx, names[s])
            assignment[names[i]] = acc
        pushed = numerator.poly.substitute(assignment)
        target = tuple(0 for _ in range(m - 1)) + (d - 1,)
        coeff = pushed.coefficient_of_x(target).shift_context(self.ci.ctx)
        denoms = list(self.ci.equations) + list(self.presentation)
        return grothendieck_residue(coeff, denoms, budget)


def smooth_point_reduction(
    ci: CompleteIntersection,
    columns: Sequence[SymElem],
    budget: Optional[Budget] = None,
) -> SmoothReduction:
    """Reduce a full column frame whose trailing m-by-m block is a unit.

    Takes all d+m columns; the induced symbol frame drops the last one.
    The module automorphism is the adjugate of the trailing block, which
    turns the trailing columns into multiples of the unit determinant;
    the symbol over the leading columns then collapses onto the last
    module variable, presented by the border determinants that swap each
    leading column into the trailing block.
    """
    columns = tuple(columns)
    if not columns:
        raise PreconditionError("need at least one column")
    mctx = columns[0].poly.ctx
    m = mctx.nx
    d = ci.dim
    n = d + m
    if len(columns) != n:
        raise PreconditionError(
            f"need all {n} columns of the square-extended frame, got {len(columns)}"
        )
    placeholder = SymElem(Poly.zero(mctx), d - 1)
    SymbolProblem(ci, columns[:-1], (), placeholder)  # validate the induced frame
    entries_all = []
    amb = ci.ctx
    for i in range(m):
        unit = tuple(1 if s == i else 0 for s in range(m))
        entries_all.append([
            c.poly.coefficient_of_x(unit).shift_context(amb) for c in columns
        ])
    block = [[entries_all[i][n - m + j] for j in range(m)] for i in range(m)]
    delta = linalg.poly_det(block)
    if delta.constant_value() == 0:
        raise PreconditionError("trailing square block must have unit determinant")
    # adjugate via signed minors, transposed
    adj = [[Poly.zero(amb) for _ in range(m)] for _ in range(m)]
    for i in range(m):
        for j in range(m):
            sub = [
                [block[r][c] for c in range(m) if c != i]
                for r in range(m) if r != j
            ]
            minor = linalg.poly_det(sub) if sub else Poly.const(amb, Fraction(1))
            adj[i][j] = minor if (i + j) % 2 == 0 else -minor
    presentation = []
    for j in range(d):
        sub = [
            [entries_all[i][n - m + t] for t in range(m - 1)] + [entries_all[i][j]]
            for i in range(m)
        ]
        presentation.append(linalg.poly_det(sub))
    return SmoothReduction(
        ci,
        columns,
        tuple(tuple(row) for row in adj),
        delta,
        tuple(presentation),
    )
