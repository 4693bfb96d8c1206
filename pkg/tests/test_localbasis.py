"""Standard bases of local and global orders, colengths, certificates."""
import random
from fractions import Fraction

import pytest

from resind.errors import ResourceCapError
from resind.localbasis import (
    Budget,
    colength_of_lts,
    sp_mul_vec,
    standard_monomials,
    std_basis,
    vec_add,
    vec_scale,
)
from resind.orders import global_order, local_order
from resind.poly import Context, Poly, parse_poly
from resind.residues import local_colength
from resind.symbol import module_colength
from resind.poly import SymElem


def vec_of(p):
    return {(0, mono.z): c for mono, c in p.terms.items()}


def polys(ctx, *texts):
    return [parse_poly(t, ctx) for t in texts]


def test_monomial_complete_intersection_colength():
    ctx = Context(("x", "y"))
    assert local_colength(polys(ctx, "x^2", "y^3")) == 6
    assert local_colength(polys(ctx, "x^3", "y^3")) == 9


def test_non_monomial_colength():
    # (y - x^2, x^4): substitute y = x^2, quotient is k[x]/(x^4)
    ctx = Context(("x", "y"))
    assert local_colength(polys(ctx, "y - x^2", "x^4")) == 4
    # cusp jacobian ideal
    assert local_colength(polys(ctx, "3*x^2", "2*y")) == 2


def test_infinite_colength_is_none():
    ctx = Context(("x", "y"))
    assert local_colength(polys(ctx, "x")) is None
    assert local_colength(polys(ctx, "x*y", "x^2")) is None


def test_unit_ideal_has_colength_zero():
    ctx = Context(("x", "y"))
    assert local_colength(polys(ctx, "1 + x", "y")) == 0


def test_local_vs_global_units():
    # 1 - x is a unit locally but not globally: global quotient is a point
    ctx = Context(("x",))
    assert local_colength(polys(ctx, "1 - x")) == 0
    sb = std_basis([vec_of(p) for p in polys(ctx, "1 - x")],
                   global_order(), 1)
    assert colength_of_lts(sb.lts, 1, 1) == 1


def test_colength_invariant_under_linear_change():
    rng = random.Random(7)
    ctx = Context(("x", "y"))
    base = polys(ctx, "x^2 - y^3", "x*y^2")
    reference = local_colength(base)
    assert reference is not None
    for _ in range(20):
        a, b, c, d = (rng.randint(-3, 3) for _ in range(4))
        if a * d - b * c == 0:
            continue
        images = {
            "x": parse_poly(f"{a}*x + {b}*y", ctx),
            "y": parse_poly(f"{c}*x + {d}*y", ctx),
        }
        changed = [p.substitute(images) for p in base]
        assert local_colength(changed) == reference


def test_standard_monomial_count_matches_colength():
    ctx = Context(("x", "y"))
    gens = polys(ctx, "x^2 + y^3", "x*y")
    sb = std_basis([vec_of(p) for p in gens], local_order(), 2)
    col = colength_of_lts(sb.lts, 2, 1)
    mons = standard_monomials(sb.lts, 2, 1)
    assert mons is not None and len(mons) == col


def test_reduction_certificate_and_idempotence():
    # u * target = sum cof_i * gen_i + remainder, exactly
    ctx = Context(("x", "y"))
    gens = polys(ctx, "x^2 - y^3", "x*y^2")
    sb = std_basis([vec_of(p) for p in gens], local_order(), 2,
                   want_reps=True)
    rng = random.Random(11)
    for _ in range(10):
        target = vec_of(parse_poly(
            " + ".join(f"{rng.randint(-4, 4)}*x^{rng.randint(0, 3)}"
                       f"*y^{rng.randint(0, 3)}" for _ in range(4)) or "0",
            ctx))
        nf = sb.reduce(target, want_cofactors=True)
        lhs = sp_mul_vec(nf.unit, target)
        rhs = dict(nf.remainder)
        for cof, g in zip(nf.cofactors, [vec_of(p) for p in gens]):
            rhs = vec_add(rhs, sp_mul_vec(cof, g))
        assert lhs == rhs
        again = sb.reduce(nf.remainder)
        assert again.remainder == nf.remainder


def test_module_colength_agrees_with_ideal_colength_in_rank_one():
    # one module variable: symmetric degree 0 is the plain quotient ring
    ctx = Context(("x", "y"))
    ci_eqs = polys(ctx, "x^2 + y^5")
    mctx = ctx.with_module(1)
    cols = [SymElem(parse_poly("2*x*X1", mctx), 1),
            SymElem(parse_poly("5*y^4*X1", mctx), 1)]
    dims = module_colength(cols, (), 0, ci_eqs)
    assert dims[0] == local_colength(
        ci_eqs + polys(ctx, "2*x", "5*y^4"))


def test_budget_cap_raises():
    ctx = Context(("x", "y"))
    gens = polys(ctx, "x^5 - y^7 + x^2*y^3", "x^3*y^2 - y^6")
    with pytest.raises(ResourceCapError):
        std_basis([vec_of(p) for p in gens], local_order(), 2, Budget(3))
