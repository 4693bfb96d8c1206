"""Inertia arithmetic: diagonalization, Sylvester invariance, additivity."""

import random
from fractions import Fraction

import pytest

from resind.poly import Context, Poly
from resind.quadform import (
    BilinearForm,
    assemble_form,
    congruence_diagonalize,
    sig_additivity_check,
    signature,
)
from resind.residues import GlobalResidueEvaluator, ResidueEvaluator


def form(rows):
    rows = [[Fraction(v) for v in r] for r in rows]
    return BilinearForm(list(range(len(rows))), rows)


def test_unit_form_has_signature_one():
    rep = signature(form([[1]]))
    assert (rep.signature, rep.rank, rep.dimension) == (1, 1, 1)


def test_hyperbolic_plane_has_signature_zero_full_rank():
    rep = signature(form([[0, 1], [1, 0]]))
    assert rep.signature == 0
    assert rep.rank == 2
    assert (rep.positive, rep.negative) == (1, 1)


def test_empty_form():
    rep = signature(BilinearForm([], []))
    assert (rep.dimension, rep.rank, rep.signature) == (0, 0, 0)


def test_degenerate_form_reports_corank():
    rep = signature(form([[1, 0], [0, 0]]))
    assert rep.rank == 1
    assert rep.signature == 1
    assert rep.zero == 1


def test_conjugate_pair_blocks_have_signature_zero():
    rng = random.Random(7)
    for _ in range(40):
        a = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        b = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        if a == 0 and b == 0:
            continue
        rep = signature(form([[a, b], [b, -a]]))
        assert rep.signature == 0
        assert rep.rank == 2


def test_stacked_conjugate_blocks_still_cancel():
    # block-diagonal assemblies keep signature zero blockwise
    rng = random.Random(11)
    for _ in range(15):
        nblocks = rng.randint(1, 3)
        dim = 2 * nblocks
        rows = [[Fraction(0)] * dim for _ in range(dim)]
        for t in range(nblocks):
            a = Fraction(rng.randint(-6, 6))
            b = Fraction(rng.randint(1, 6))
            rows[2 * t][2 * t] = a
            rows[2 * t][2 * t + 1] = b
            rows[2 * t + 1][2 * t] = b
            rows[2 * t + 1][2 * t + 1] = -a
        assert signature(form(rows)).signature == 0


def _mat_mul(A, B):
    n, mid, m = len(A), len(B), len(B[0])
    return [
        [sum((A[i][t] * B[t][j] for t in range(mid)), Fraction(0)) for j in range(m)]
        for i in range(n)
    ]


def _random_invertible(rng, n):
    # unipotent lower times nonzero diagonal times unipotent upper
    L = [[Fraction(1 if i == j else (rng.randint(-3, 3) if i > j else 0))
          for j in range(n)] for i in range(n)]
    U = [[Fraction(1 if i == j else (rng.randint(-3, 3) if i < j else 0))
          for j in range(n)] for i in range(n)]
    D = [[Fraction(rng.choice([-3, -2, -1, 1, 2, 3]) if i == j else 0)
          for j in range(n)] for i in range(n)]
    return _mat_mul(_mat_mul(L, D), U)


def test_sylvester_invariance_under_congruence():
    rng = random.Random(23)
    for trial in range(6):
        n = rng.randint(1, 4)
        rows = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                v = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
                rows[i][j] = v
                rows[j][i] = v
        base = signature(form(rows))
        for _ in range(50):
            T = _random_invertible(rng, n)
            Tt = [[T[j][i] for j in range(n)] for i in range(n)]
            moved = _mat_mul(Tt, _mat_mul(rows, T))
            rep = signature(form(moved))
            assert rep.signature == base.signature
            assert rep.rank == base.rank


def test_diagonalize_rejects_ragged_input():
    with pytest.raises(ValueError):
        congruence_diagonalize([[Fraction(1), Fraction(0)]])


def test_form_construction_rejects_asymmetry():
    with pytest.raises(ValueError):
        BilinearForm([0, 1], [[Fraction(0), Fraction(1)], [Fraction(2), Fraction(0)]])


def test_morse_point_pairing_is_unit():
    # gradient of x^2 + y^2 with its Jacobian determinant as extra factor
    ctx = Context(("x", "y"))
    x, y = (Poly.var(ctx, s) for s in ("x", "y"))
    two = Poly.const(ctx, Fraction(2))
    ev = ResidueEvaluator([two * x, two * y])
    jac = Poly.const(ctx, Fraction(4))
    basis = [Poly.monomial(ctx, mo.z) for mo in ev.quotient_monomials()]
    assert len(basis) == 1
    B = assemble_form(basis, lambda p, q: ev.value(p * q * jac))
    assert B.matrix == [[Fraction(1)]]
    assert signature(B).signature == 1


def test_additivity_block_diagonal():
    B = form([[2, 0, 0], [0, -3, 0], [0, 0, 5]])
    ok, info = sig_additivity_check(B, [(1, 0, 0)], [(0, 1, 0), (0, 0, 1)])
    assert ok
    assert info["total"].signature == 1


def test_additivity_rejects_non_orthogonal_split():
    B = form([[1, 0], [0, 1]])
    ok, info = sig_additivity_check(B, [(1, 0)], [(1, 1)])
    assert not ok
    assert info["witness"] == (0, 0)
    assert info["value"] == 1


def test_additivity_on_fiber_residue_pairing():
    # pairing of p q (df/dx) against (f - 1, y) for f = x^2 - y^2: the
    # quotient splits into even and odd powers of x, each contributing 1
    ctx = Context(("x", "y"))
    x, y = (Poly.var(ctx, s) for s in ("x", "y"))
    f = x * x - y * y - Poly.const(ctx, Fraction(1))
    ev = GlobalResidueEvaluator([f, y])
    basis = [Poly.monomial(ctx, mo.z) for mo in ev.quotient_monomials()]
    assert len(basis) == 2
    dfx = x + x
    B = assemble_form(basis, lambda p, q: ev.value(p * q * dfx))
    assert B.matrix == [[Fraction(2), Fraction(0)], [Fraction(0), Fraction(2)]]
    ok, info = sig_additivity_check(B, [(1, 0)], [(0, 1)])
    assert ok
    assert info["total"].signature == 2
