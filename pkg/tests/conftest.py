"""Shared instance builders and randomized sweep drivers.

The unit test files run these with small instance counts; the acceptance
battery reruns the same drivers at the full advertised sizes.
"""
import itertools
import random
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from resind.errors import PreconditionError, ResourceCapError
from resind.localbasis import Budget
from resind.poly import Context, Poly, SymElem
from resind.residues import CompleteIntersection
from resind import symbol as sym


# shape tables per rewrite rule: (m, d, k) with m <= 2, d <= 3.
# R1/R4 need a scalar to cancel or absorb; R5 needs k = d - 1.
RULE_SHAPES: Dict[str, List[Tuple[int, int, int]]] = {
    "R1": [(1, 2, 1), (1, 3, 1), (1, 3, 2), (2, 2, 1), (2, 3, 1), (2, 3, 2)],
    "R2": [(1, 2, 0), (1, 2, 1), (1, 3, 1), (2, 2, 0), (2, 2, 1), (2, 3, 1)],
    "R3": [(1, 2, 0), (1, 3, 0), (1, 3, 1), (2, 2, 0), (2, 2, 1), (2, 3, 2)],
    "R4": [(1, 2, 1), (1, 3, 1), (1, 3, 2), (2, 2, 1), (2, 3, 2)],
    "R5": [(1, 2, 1), (1, 3, 2), (2, 2, 1), (2, 3, 2)],
    "TRANSFORM": [(1, 2, 0), (1, 3, 1), (2, 2, 0), (2, 2, 1), (2, 3, 1)],
    "R6": [(1, 2, 0), (1, 2, 1), (1, 3, 1), (2, 2, 0), (2, 2, 1)],
}


# Typical instances at the sweep shapes use well under 130k budget units
# end to end; rare degenerate draws blow up coefficient arithmetic without
# ever finishing, so each instance gets a cap and a blown cap counts as a
# skip, not a verdict.
INSTANCE_STEPS = 1_000_000


def rule_sweep(
    rule: str,
    total: int,
    seed: int,
    shapes: Optional[Sequence[Tuple[int, int, int]]] = None,
    with_equations: bool = True,
) -> dict:
    """Check one rewrite rule on `total` random defined instances."""
    rng = random.Random(seed)
    shapes = list(shapes or RULE_SHAPES[rule])
    tally = {"ok": 0, "fail": 0, "skip": 0, "nonzero": 0, "failures": []}
    i = 0
    while tally["ok"] + tally["fail"] < total:
        m, d, k = shapes[i % len(shapes)]
        n_eq = 1 if (with_equations and i % 4 == 3) else 0
        i += 1
        budget = Budget(INSTANCE_STEPS)
        try:
            inst = sym.random_symbol_instance(
                rng, m, d, k, n_equations=n_eq, budget=budget
            )
            rc = sym.rule_check(rule, inst, rng=rng, budget=budget)
        except (PreconditionError, ResourceCapError):
            tally["skip"] += 1
            if tally["skip"] > 4 * total + 20:
                raise
            continue
        if rc.ok:
            tally["ok"] += 1
        else:
            tally["fail"] += 1
            tally["failures"].append((m, d, k, rc.witness))
        if rule == "R6":
            if rc.witness.get("dimension", 0) > 0:
                tally["nonzero"] += 1
        elif rc.witness.get("rhs"):
            tally["nonzero"] += 1
    return tally


def collapse_sweep(total: int, seed: int) -> dict:
    """Rank-1 instances evaluated twice: hybrid chain vs ambient residue."""
    rng = random.Random(seed)
    shapes = [
        (1, 0, 0), (2, 0, 0), (2, 1, 0), (2, 1, 1),
        (3, 0, 0), (3, 1, 0), (3, 2, 0), (3, 2, 1),
    ]  # (d, k, n_equations)
    out = {"checked": 0, "nonzero": 0, "mismatches": []}
    i = 0
    while out["checked"] < total:
        d, k, n_eq = shapes[i % len(shapes)]
        i += 1
        budget = Budget(INSTANCE_STEPS)
        try:
            inst = sym.random_symbol_instance(
                rng, 1, d, k, n_equations=n_eq, budget=budget
            )
            got = sym.symbol_evaluate(inst, rng=rng, budget=budget)
        except (PreconditionError, ResourceCapError):
            continue
        want = sym.ordinary_residue_value(inst)
        assert isinstance(got, Fraction) and isinstance(want, Fraction)
        out["checked"] += 1
        if got != want:
            out["mismatches"].append((d, k, n_eq, got, want))
        elif got:
            out["nonzero"] += 1
    return out


def random_linear_form(rng: random.Random, ctx: Context, lo: int = -2, hi: int = 2) -> Poly:
    p = Poly.zero(ctx)
    for name in ctx.ambient:
        c = rng.randint(lo, hi)
        if c:
            p = p + Poly.const(ctx, Fraction(c)) * Poly.var(ctx, name)
    return p


def vanishing_column(rng: random.Random, mctx: Context) -> SymElem:
    """Column whose entries are random linear forms with no constant part."""
    amb = mctx.ambient_only()
    names = mctx.names[mctx.nz:]
    acc = Poly.zero(mctx)
    for name in names:
        coeff = random_linear_form(rng, amb)
        if not coeff.is_zero():
            acc = acc + coeff.shift_context(mctx) * Poly.var(mctx, name)
    if acc.is_zero():
        amb_var = Poly.var(amb, mctx.ambient[0]).shift_context(mctx)
        acc = amb_var * Poly.var(mctx, names[0])
    return SymElem(acc, 1)


def random_module_form(rng: random.Random, mctx: Context, degree: int) -> SymElem:
    """Random element of the degree-d piece with small integer coefficients."""
    names = mctx.names[mctx.nz:]
    acc = Poly.zero(mctx)
    for combo in itertools.combinations_with_replacement(range(len(names)), degree):
        c = rng.randint(-2, 2)
        if not c:
            continue
        mono = Poly.const(mctx, Fraction(c))
        for i in combo:
            mono = mono * Poly.var(mctx, names[i])
        acc = acc + mono
    return SymElem(acc, degree)


def smooth_frame_instance(
    rng: random.Random, m: int, d: int, max_tries: int = 40
) -> Tuple[sym.SymbolProblem, Tuple[SymElem, ...]]:
    """A full frame with invertible trailing block, plus the induced problem.

    The trailing block is the identity perturbed by vanishing columns, so
    the block determinant is a unit while the induced frame ideal stays
    nontrivial.  Degenerate draws (rank drop not isolated) are screened
    with a small budget and redrawn.
    """
    n = d + m
    ctx = Context(tuple(f"z{i+1}" for i in range(d)))
    ci = CompleteIntersection(ctx, ())
    mctx = ctx.with_module(m)
    names = mctx.names[mctx.nz:]
    for _ in range(max_tries):
        cols = [vanishing_column(rng, mctx) for _ in range(n - m)]
        for i in range(m):
            noise = vanishing_column(rng, mctx)
            cols.append(SymElem(Poly.var(mctx, names[i]) + noise.poly, 1))
        numerator = random_module_form(rng, mctx, d - 1)
        if numerator.poly.is_zero():
            continue
        problem = sym.SymbolProblem(ci, tuple(cols[:-1]), (), numerator)
        try:
            if problem.is_defined(budget=Budget(60000)):
                return problem, tuple(cols)
        except ResourceCapError:
            continue
    raise RuntimeError(f"no smooth frame found for m={m} d={d}")


def smooth_sweep(count: int, seed: int, shapes: Sequence[Tuple[int, int]]) -> dict:
    """Cross-evaluate symbols through the frame reduction and the chain map."""
    rng = random.Random(seed)
    out = {"checked": 0, "nonzero": 0, "mismatches": []}
    i = 0
    while out["checked"] < count:
        m, d = shapes[i % len(shapes)]
        i += 1
        problem, cols = smooth_frame_instance(rng, m, d)
        budget = Budget(3 * INSTANCE_STEPS)
        red = sym.smooth_point_reduction(problem.ci, cols)
        via_reduction = red.value(problem.numerator, budget)
        via_chain = sym.symbol_evaluate(problem, rng=rng, budget=budget)
        out["checked"] += 1
        if via_reduction != via_chain:
            out["mismatches"].append((m, d, via_reduction, via_chain))
        elif via_chain:
            out["nonzero"] += 1
    return out
