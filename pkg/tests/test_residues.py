"""Local and global residue evaluators and the germ-level wrappers."""
import itertools
import random
from fractions import Fraction

import pytest

from resind.errors import PreconditionError
from resind.localbasis import Budget
from resind.poly import Context, Poly, parse_poly
from resind.residues import (
    CompleteIntersection,
    GlobalResidueEvaluator,
    ResidueEvaluator,
    ResidueProblem,
    ci_residue,
    grothendieck_residue,
    local_colength,
    residue_at_fiber,
)


def ctx_named(n):
    return Context(tuple(f"z{i+1}" for i in range(n)))


def monomial_residue(n, powers, exps):
    ctx = ctx_named(n)
    denoms = [Poly.monomial(ctx, tuple(a if j == i else 0 for j in range(n)))
              for i, a in enumerate(powers)]
    num = Poly.monomial(ctx, tuple(exps))
    return grothendieck_residue(num, denoms)


def test_monomial_normalization_exhaustive():
    # res of z^b against (z1^a1, ..., zn^an) is 1 exactly when b = a - 1
    for n in (1, 2, 3):
        for powers in itertools.product((1, 2, 3), repeat=n):
            for exps in itertools.product(range(4), repeat=n):
                want = Fraction(
                    1 if all(b == a - 1 for a, b in zip(powers, exps)) else 0)
                assert monomial_residue(n, powers, exps) == want


def test_linearity_in_the_numerator():
    ctx = ctx_named(2)
    denoms = [parse_poly("z1^2 - z2^3", ctx), parse_poly("z1*z2", ctx)]
    rng = random.Random(0)
    ev = ResidueEvaluator(denoms)
    for _ in range(12):
        p = Poly.monomial(ctx, (rng.randint(0, 3), rng.randint(0, 3)))
        q = Poly.monomial(ctx, (rng.randint(0, 3), rng.randint(0, 3)))
        a, b = Fraction(rng.randint(-3, 3)), Fraction(rng.randint(-3, 3))
        combo = p.scale(a) + q.scale(b)
        assert ev.value(combo) == a * ev.value(p) + b * ev.value(q)


def test_exponent_shift_independence():
    ctx = ctx_named(2)
    denoms = [parse_poly("z1^3 + z2^4", ctx), parse_poly("z2^2 - z1^3", ctx)]
    nums = [Poly.monomial(ctx, (i, j)) for i in range(4) for j in range(4)]
    base = ResidueEvaluator(denoms)
    shifted = ResidueEvaluator(denoms, exponent_shift=2)
    for p in nums:
        assert base.value(p) == shifted.value(p)


def test_unit_factor_in_denominator():
    # res[h; u*g1, g2] = res[h/u; g1, g2] handled through the unit slot
    ctx = ctx_named(2)
    g = [parse_poly("z1^2", ctx), parse_poly("z2^2", ctx)]
    u = parse_poly("1 + z1 + z2", ctx)
    scaled = [g[0] * u, g[1]]
    ev = ResidueEvaluator(scaled)
    direct = ResidueEvaluator(g)
    num = parse_poly("z1*z2", ctx)
    assert ev.value(num * u) == direct.value(num)


def test_transformation_under_substitution():
    # pulling back through a polynomial map multiplies by its Jacobian
    ctx = ctx_named(2)
    g = [parse_poly("z1^2 + z2^2", ctx), parse_poly("z1*z2", ctx)]
    images = {"z1": parse_poly("z1 + z2^2", ctx),
              "z2": parse_poly("z2 - z1^2", ctx)}
    pulled = [p.substitute(images) for p in g]
    jac = [[images["z1"].derivative("z1"), images["z1"].derivative("z2")],
           [images["z2"].derivative("z1"), images["z2"].derivative("z2")]]
    det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0]
    rng = random.Random(3)
    for _ in range(8):
        num = Poly.monomial(
            ctx, (rng.randint(0, 2), rng.randint(0, 2)),
            coef=Fraction(rng.randint(1, 3)))
        lhs = grothendieck_residue(num.substitute(images) * det, pulled)
        rhs = grothendieck_residue(num, g)
        assert lhs == rhs


def test_quasi_homogeneous_euler_identity():
    # weighted-homogeneous f: res[hess; grad f] equals the Milnor number
    # of f through the quotient dimension, a classical sanity anchor
    ctx = ctx_named(2)
    f = parse_poly("z1^3 + z2^2", ctx)
    grad = [f.derivative("z1"), f.derivative("z2")]
    assert local_colength(grad) == 2
    ev = ResidueEvaluator(grad)
    hess = (grad[0].derivative("z1") * grad[1].derivative("z2")
            - grad[0].derivative("z2") * grad[1].derivative("z1"))
    assert ev.value(hess) == 2


def test_rejects_non_vanishing_and_wrong_count():
    ctx = ctx_named(2)
    with pytest.raises(PreconditionError):
        ResidueEvaluator([parse_poly("1 + z1", ctx), parse_poly("z2", ctx)])
    with pytest.raises(PreconditionError):
        ResidueEvaluator([parse_poly("z1", ctx)])


def test_non_isolated_zero_is_rejected_lazily():
    ctx = ctx_named(2)
    ev = ResidueEvaluator([parse_poly("z1*z2", ctx), parse_poly("z1^2", ctx)])
    with pytest.raises(PreconditionError):
        ev.value(Poly.const(ctx, Fraction(1)))


def test_germ_residue_via_equations():
    # on the parabola z1 = z2^2 the coordinate z2 generates the local ring;
    # equations come first in the orientation, so the head-solved germ
    # pairs 1 against z2 to give exactly 1
    ctx = ctx_named(2)
    ci = CompleteIntersection(ctx, (parse_poly("z1 - z2^2", ctx),))
    one = Poly.const(ctx, Fraction(1))
    assert ci_residue(ci, one, [parse_poly("z2", ctx)]) == 1
    assert ci_residue(ci, parse_poly("z2", ctx), [parse_poly("z2^2", ctx)]) == 1
    # flipping the equation sign flips the orientation
    flipped = CompleteIntersection(ctx, (parse_poly("z2^2 - z1", ctx),))
    assert ci_residue(flipped, one, [parse_poly("z2", ctx)]) == -1


def test_global_sums_over_rational_points():
    # z1^2 - 1 has zeros +-1; global residue of p/(derivative) is the sum
    # of p at the zeros over the derivative value, here by partial fractions
    ctx = ctx_named(1)
    g = parse_poly("z1^2 - 1", ctx)
    ev = GlobalResidueEvaluator([g])
    # sum over z in {1, -1} of z^2 / (2z) = 1/2 - 1/2 = 0; of z/(2z) = 1
    assert ev.value(parse_poly("z1^2", ctx)) == 0
    assert ev.value(parse_poly("z1", ctx)) == 1
    assert ev.value(Poly.const(ctx, Fraction(1))) == 0


def test_fiber_residue_constant_in_t():
    # deformation of the cusp: multiplicity of the critical scheme stays 2
    ctx = ctx_named(2)
    ci = CompleteIntersection(ctx, (parse_poly("z1^2 - z2^3", ctx),))
    rp = ResidueProblem(Poly.const(ctx, Fraction(1)),
                        (parse_poly("z2", ctx),), ci)
    base = rp.local_value()
    for t in (Fraction(1, 7), Fraction(2, 5), Fraction(-3, 4)):
        assert residue_at_fiber(rp, t) == base


def test_fiber_residue_detects_escaping_zeros():
    # against z1 - 1 the local system is empty but the fiber one is not
    ctx = ctx_named(1)
    ci = CompleteIntersection(ctx, ())
    rp = ResidueProblem(Poly.const(ctx, Fraction(1)),
                        (parse_poly("z1^2 - z1^3", ctx),))
    with pytest.raises(PreconditionError):
        residue_at_fiber(rp, Fraction(1, 2))


def test_budget_threads_through_evaluators():
    ctx = ctx_named(2)
    denoms = [parse_poly("z1^4 - z2^5", ctx), parse_poly("z1*z2^3", ctx)]
    from resind.errors import ResourceCapError
    with pytest.raises(ResourceCapError):
        ResidueEvaluator(denoms, budget=Budget(2)).value(
            Poly.const(ctx, Fraction(1)))
