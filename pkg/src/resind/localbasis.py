"""Standard bases for submodules of free modules over local and global rings.

The engine works on sparse vectors: a term is a pair (component, exponent
tuple), a vector maps terms to rational coefficients.  Callers encode
whatever structure they need (symmetric powers, wedge bases) into the
component index, so the engine itself never sees module gradings.

Local orders use Mora reduction with exact unit and cofactor tracking:
every normal form comes with a certificate u * target = sum c_i g_i + r
where u is a unit of the local ring.  Global orders reduce fully and the
unit is 1, so normal forms against a Groebner basis are canonical.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import ResourceCapError
from .orders import TermOrder

Exps = Tuple[int, ...]
Term = Tuple[int, Exps]
Vec = Dict[Term, Fraction]
SPoly = Dict[Exps, Fraction]


class Budget:
    """Shared step counter; one instance per top-level operation."""

    def __init__(self, limit: int = 10 ** 6):
        self.limit = limit
        self.used = 0

    def spend(self, amount: int = 1):
        self.used += amount
        if self.used > self.limit:
            raise ResourceCapError(
                f"step budget exceeded ({self.used} > {self.limit}); "
                "raise the step cap if the input really is this large"
            )


# -- scalar polynomial helpers (exponent dict -> coefficient) ---------


def sp_one(nvars: int) -> SPoly:
    return {(0,) * nvars: Fraction(1)}


def sp_term(coef, exps: Exps) -> SPoly:
    c = Fraction(coef)
    return {exps: c} if c else {}


def sp_add(a: SPoly, b: SPoly) -> SPoly:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e, Fraction(0)) + c
        if v:
            out[e] = v
        elif e in out:
            del out[e]
    return out


def sp_sub_scaled(a: SPoly, coef: Fraction, exps: Exps, b: SPoly) -> SPoly:
    """a - coef * z^exps * b."""
    out = dict(a)
    for e, c in b.items():
        key = tuple(i + j for i, j in zip(exps, e))
        v = out.get(key, Fraction(0)) - coef * c
        if v:
            out[key] = v
        elif key in out:
            del out[key]
    return out


def sp_mul(a: SPoly, b: SPoly) -> SPoly:
    out: SPoly = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            key = tuple(i + j for i, j in zip(e1, e2))
            v = out.get(key, Fraction(0)) + c1 * c2
            if v:
                out[key] = v
            elif key in out:
                del out[key]
    return out


def sp_is_unit(a: SPoly) -> bool:
    if not a:
        return False
    zero = next(iter(a))
    zero = tuple(0 for _ in zero)
    return a.get(zero, Fraction(0)) != 0


# -- vector helpers ---------------------------------------------------


def vec_is_zero(v: Vec) -> bool:
    return not v

def vec_add(a: Vec, b: Vec) -> Vec:
    out = dict(a)
    for t, c in b.items():
        s = out.get(t, Fraction(0)) + c
        if s:
            out[t] = s
        elif t in out:
            del out[t]
    return out


def vec_scale(v: Vec, coef) -> Vec:
    c = Fraction(coef)
    if c == 0:
        return {}
    return {t: cv * c for t, cv in v.items()}


def vec_sub_scaled(a: Vec, coef: Fraction, exps: Exps, b: Vec) -> Vec:
    """a - coef * z^exps * b."""
    out = dict(a)
    for (comp, e), c in b.items():
        key = (comp, tuple(i + j for i, j in zip(exps, e)))
        v = out.get(key, Fraction(0)) - coef * c
        if v:
            out[key] = v
        elif key in out:
            del out[key]
    return out


def sp_mul_vec(p: SPoly, v: Vec) -> Vec:
    out: Vec = {}
    for e1, c1 in p.items():
        for (comp, e2), c2 in v.items():
            key = (comp, tuple(i + j for i, j in zip(e1, e2)))
            s = out.get(key, Fraction(0)) + c1 * c2
            if s:
                out[key] = s
            elif key in out:
                del out[key]
    return out


def leading_term(v: Vec, order: TermOrder) -> Tuple[Term, Fraction]:
    t = max(v, key=lambda tc: order.key(tc[0], tc[1]))
    return t, v[t]


def _divides(a: Term, b: Term) -> bool:
    return a[0] == b[0] and all(i <= j for i, j in zip(a[1], b[1]))


def _ecart(v: Vec, lt: Term) -> int:
    top = max(sum(e) for _, e in v)
    return top - sum(lt[1])


# -- normal form ------------------------------------------------------


@dataclass
class NFResult:
    """Certificate u * target = sum(cofactors[i] * gens[i]) + remainder."""

    remainder: Vec
    unit: SPoly
    cofactors: Optional[List[SPoly]]


@dataclass
class _TEntry:
    vec: Vec
    lt: Term
    lc: Fraction
    ecart: int
    gen_index: int  # -1 for intermediate snapshots
    unit: Optional[SPoly] = None
    cof: Optional[List[SPoly]] = None


def normal_form(
    target: Vec,
    gens: Sequence[Vec],
    order: TermOrder,
    nvars: int,
    budget: Optional[Budget] = None,
    want_cofactors: bool = True,
) -> NFResult:
    """Weak normal form of `target` against `gens`.

    For a local order this is Mora reduction: the returned unit has a
    nonzero constant term and the certificate identity holds exactly.
    For a global order the unit is 1, reduction is carried through the
    tail, and against a Groebner basis the remainder is canonical.
    """
    budget = budget or Budget()
    track = want_cofactors
    ngens = len(gens)

    entries: List[_TEntry] = []
    for i, g in enumerate(gens):
        if g:
            lt, lc = leading_term(g, order)
            entries.append(_TEntry(g, lt, lc, _ecart(g, lt), i))

    unit = sp_one(nvars)
    cof: Optional[List[SPoly]] = [{} for _ in range(ngens)] if track else None
    h = dict(target)
    done: Vec = {}

    while h:
        budget.spend()
        lt_h, lc_h = leading_term(h, order)
        cands = [t for t in entries if _divides(t.lt, lt_h)]
        if not cands:
            if order.is_local:
                break
            # global order: retire the leading term and keep reducing
            done[lt_h] = lc_h
            del h[lt_h]
            continue
        ec_h = _ecart(h, lt_h)
        best = min(cands, key=lambda t: (t.ecart, t.gen_index < 0, t.gen_index))
        if order.is_local and best.ecart > ec_h:
            if track:
                budget.spend(len(h) + len(unit) + sum(len(c) for c in cof))
            entries.append(
                _TEntry(
                    dict(h), lt_h, lc_h, ec_h, -1,
                    dict(unit) if track else None,
                    [dict(c) for c in cof] if track else None,
                )
            )
        lam = lc_h / best.lc
        mu = tuple(i - j for i, j in zip(lt_h[1], best.lt[1]))
        # charge by operand size: the step counter alone does not bound the
        # cofactor bookkeeping, which can snowball on degenerate inputs
        work = len(h) + len(best.vec)
        if track and best.gen_index < 0:
            work += len(best.unit) + sum(len(b) for b in best.cof)
        # fat rational coefficients make every term operation expensive on
        # their own, so scale by the multiplier's size in machine words
        work *= 1 + (lam.numerator.bit_length() + lam.denominator.bit_length()) // 64
        budget.spend(work)
        h = vec_sub_scaled(h, lam, mu, best.vec)
        if track:
            if best.gen_index >= 0:
                cof[best.gen_index] = sp_add(cof[best.gen_index], sp_term(lam, mu))
            else:
                unit = sp_sub_scaled(unit, lam, mu, best.unit)
                cof = [
                    sp_sub_scaled(ci, lam, mu, bi)
                    for ci, bi in zip(cof, best.cof)
                ]

    remainder = vec_add(done, h) if done else h
    return NFResult(remainder, unit, cof)


# -- standard basis ---------------------------------------------------


@dataclass
class StdBasis:
    vecs: List[Vec]
    lts: List[Term]
    order: TermOrder
    nvars: int
    reps: Optional[List[List[SPoly]]]  # vecs[k] = sum reps[k][i] * gens[i]

    def reduce(
        self, target: Vec, budget: Optional[Budget] = None, want_cofactors: bool = False
    ) -> NFResult:
        return normal_form(target, self.vecs, self.order, self.nvars, budget, want_cofactors)


def std_basis(
    gens: Sequence[Vec],
    order: TermOrder,
    nvars: int,
    budget: Optional[Budget] = None,
    want_reps: bool = False,
) -> StdBasis:
    """Standard (local) or Groebner (global) basis of the generated submodule.

    With `want_reps` every basis vector carries an exact expression as a
    polynomial combination of the original generators; no units appear in
    these expressions.
    """
    budget = budget or Budget()
    G: List[Vec] = []
    reps: List[List[SPoly]] = []
    ngens = len(gens)
    scalar_case = all(all(comp == 0 for comp, _ in g) for g in gens)

    for i, g in enumerate(gens):
        if g:
            G.append(dict(g))
            if want_reps:
                reps.append([sp_one(nvars) if j == i else {} for j in range(ngens)])

    lts = [leading_term(g, order)[0] for g in G]
    lcs = [leading_term(g, order)[1] for g in G]

    def lcm_deg(i: int, j: int) -> int:
        return sum(max(a, b) for a, b in zip(lts[i][1], lts[j][1]))

    pairs = [(i, j) for j in range(len(G)) for i in range(j) if lts[i][0] == lts[j][0]]

    while pairs:
        pairs.sort(key=lambda ij: lcm_deg(*ij))
        i, j = pairs.pop(0)
        if scalar_case and all(
            min(a, b) == 0 for a, b in zip(lts[i][1], lts[j][1])
        ):
            continue  # product criterion, ideal case only
        budget.spend(1 + len(G[i]) + len(G[j]))
        lcm = tuple(max(a, b) for a, b in zip(lts[i][1], lts[j][1]))
        mi = tuple(a - b for a, b in zip(lcm, lts[i][1]))
        mj = tuple(a - b for a, b in zip(lcm, lts[j][1]))
        s = vec_sub_scaled(
            sp_mul_vec(sp_term(Fraction(1) / lcs[i], mi), G[i]),
            Fraction(1) / lcs[j],
            mj,
            G[j],
        )
        if not s:
            continue
        nf = normal_form(s, G, order, nvars, budget, want_cofactors=want_reps)
        r = nf.remainder
        if not r:
            continue
        if want_reps:
            budget.spend(sum(len(a) + len(b) for a, b in zip(reps[i], reps[j])))
            rep_s = [
                sp_sub_scaled(
                    sp_mul(sp_term(Fraction(1) / lcs[i], mi), reps_row_i),
                    Fraction(1) / lcs[j],
                    mj,
                    reps_row_j,
                )
                for reps_row_i, reps_row_j in zip(reps[i], reps[j])
            ]
            # r = unit * s - sum cof_k G_k, all exact
            budget.spend(len(nf.unit) * sum(len(c) for c in rep_s))
            rep_r = [sp_mul(nf.unit, c) for c in rep_s]
            for k, ck in enumerate(nf.cofactors):
                if ck:
                    budget.spend(len(ck) * max(1, sum(len(rk) for rk in reps[k])))
                    rep_r = [
                        sp_add(ri, {e: -c for e, c in sp_mul(ck, rk).items()})
                        for ri, rk in zip(rep_r, reps[k])
                    ]
            reps.append(rep_r)
        G.append(r)
        lt_r, lc_r = leading_term(r, order)
        lts.append(lt_r)
        lcs.append(lc_r)
        new = len(G) - 1
        pairs.extend((t, new) for t in range(new) if lts[t][0] == lt_r[0])

    return StdBasis(G, lts, order, nvars, reps if want_reps else None)


# -- staircases and numerical invariants ------------------------------


def _component_lts(lts: Sequence[Term], ncomps: int) -> List[List[Exps]]:
    per: List[List[Exps]] = [[] for _ in range(ncomps)]
    for comp, e in lts:
        per[comp].append(e)
    return per


def standard_monomials(
    lts: Sequence[Term], nvars: int, ncomps: int
) -> Optional[List[Term]]:
    """Monomial basis of the quotient module, or None if it is infinite.

    The quotient is finite iff every component's leading-term ideal
    contains a pure power of every variable.
    """
    out: List[Term] = []
    for comp, comp_lts in enumerate(_component_lts(lts, ncomps)):
        if any(all(e == 0 for e in l) for l in comp_lts):
            continue  # unit leading term kills the component
        if nvars == 0:
            out.append((comp, ()))
            continue
        bounds = []
        for v in range(nvars):
            pure = [
                l[v]
                for l in comp_lts
                if all(l[w] == 0 for w in range(nvars) if w != v)
            ]
            if not pure:
                return None
            bounds.append(min(pure))
        stack: List[List[int]] = [[]]
        while stack:
            pref = stack.pop()
            if len(pref) == nvars:
                e = tuple(pref)
                if not any(all(a <= b for a, b in zip(l, e)) for l in comp_lts):
                    out.append((comp, e))
                continue
            v = len(pref)
            for val in range(bounds[v]):
                stack.append(pref + [val])
    return out


def colength_of_lts(lts: Sequence[Term], nvars: int, ncomps: int) -> Optional[int]:
    sm = standard_monomials(lts, nvars, ncomps)
    return None if sm is None else len(sm)


def module_colength(
    gens: Sequence[Vec],
    order: TermOrder,
    nvars: int,
    ncomps: int,
    budget: Optional[Budget] = None,
) -> Optional[int]:
    """Vector-space dimension of free module / submodule, None if infinite."""
    sb = std_basis(gens, order, nvars, budget)
    return colength_of_lts(sb.lts, nvars, ncomps)


def monomial_ideal_dimension(lts: Sequence[Term], nvars: int) -> int:
    """Krull dimension of O/(monomial ideal), ideal case (component 0).

    Dimension = size of the largest variable subset S such that no leading
    term is supported inside S.  Returns -1 for the zero ring.
    """
    exps = [e for comp, e in lts if comp == 0]
    if any(all(v == 0 for v in e) for e in exps):
        return -1
    best = 0
    for mask in range(1 << nvars):
        size = bin(mask).count("1")
        if size <= best:
            continue
        ok = True
        for e in exps:
            if all(e[v] == 0 or (mask >> v) & 1 for v in range(nvars)):
                ok = False
                break
        if ok:
            best = size
    return best


def ideal_local_dimension(
    gens: Sequence[Vec], order: TermOrder, nvars: int, budget: Optional[Budget] = None
) -> int:
    sb = std_basis(gens, order, nvars, budget)
    return monomial_ideal_dimension(sb.lts, nvars)


def is_regular_sequence(
    seq: Sequence[SPoly], nvars: int, order: TermOrder, budget: Optional[Budget] = None
) -> bool:
    """Whether the scalars form a regular sequence in the local ring.

    Checked through successive dimension drops of the leading-term ideals;
    each prefix must cut the Krull dimension by exactly one.
    """
    gens: List[Vec] = []
    for i, p in enumerate(seq):
        if not p:
            return False
        gens.append({(0, e): c for e, c in p.items()})
        dim = ideal_local_dimension(gens, order, nvars, budget)
        expected = nvars - (i + 1)
        if dim != expected:
            return False
    return True
