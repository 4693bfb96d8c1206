"""Dense exact linear algebra over the rationals.

Small helper layer: everything is lists of lists of `Fraction`.  Sizes in
this library stay modest (form matrices, lifting systems), so Gaussian
elimination with exact pivoting is enough.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

Matrix = List[List[Fraction]]


def mat(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(v) for v in row] for row in rows]


def zeros(nrows: int, ncols: int) -> Matrix:
    return [[Fraction(0)] * ncols for _ in range(nrows)]


def identity(n: int) -> Matrix:
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = Fraction(1)
    return out


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, k = len(a), len(b)
    m = len(b[0]) if b else 0
    out = zeros(n, m)
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            c = ai[t]
            if c == 0:
                continue
            bt = b[t]
            for j in range(m):
                if bt[j] != 0:
                    oi[j] += c * bt[j]
    return out


def transpose(a: Matrix) -> Matrix:
    if not a:
        return []
    return [list(col) for col in zip(*a)]


def rref(a: Matrix) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and pivot column indices (copy, not in place)."""
    m = [row[:] for row in a]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = Fraction(1) / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                factor = m[i][c]
                m[i] = [vi - factor * vr for vi, vr in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def rank(a: Matrix) -> int:
    return len(rref(a)[1])


def solve(a: Matrix, b: Sequence[Fraction]) -> Optional[List[Fraction]]:
    """One solution of A x = b, or None if inconsistent."""
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    aug = [list(row) + [Fraction(b[i])] for i, row in enumerate(a)]
    red, pivots = rref(aug)
    for row in red:
        if all(v == 0 for v in row[:ncols]) and row[ncols] != 0:
            return None
    x = [Fraction(0)] * ncols
    for r, c in enumerate(pivots):
        if c < ncols:
            x[c] = red[r][ncols]
        elif red[r][ncols] != 0:
            return None
    return x


def nullspace(a: Matrix) -> List[List[Fraction]]:
    """Basis of the kernel of A (column vectors as flat lists)."""
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    if ncols == 0:
        return []
    if nrows == 0:
        return [[Fraction(1) if i == j else Fraction(0) for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(a)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -red[r][fc]
        basis.append(vec)
    return basis


def det(a: Matrix) -> Fraction:
    n = len(a)
    if n == 0:
        return Fraction(1)
    m = [row[:] for row in a]
    sign = 1
    result = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            sign = -sign
        result *= m[c][c]
        inv = Fraction(1) / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                factor = m[i][c] * inv
                m[i] = [vi - factor * vc for vi, vc in zip(m[i], m[c])]
    return result * sign


# -- polynomial matrices ---------------------------------------------


def poly_det(rows, trunc: Optional[int] = None, budget=None):
    """Determinant of a square matrix of Poly, cofactor expansion.

    With `trunc` every product is cut at that total degree; exact when the
    caller only needs coefficients up to the bound.  A budget, when given,
    is charged per product by operand size, so degenerate inputs abort
    instead of grinding through enormous series arithmetic.
    """
    from .poly import Poly

    n = len(rows)
    if n == 0:
        raise ValueError("poly_det of empty matrix needs a context")
    ctx = rows[0][0].ctx

    def mul(a: Poly, b: Poly) -> Poly:
        if budget is not None:
            budget.spend(len(a.terms) + len(b.terms))
        return a.mul_trunc(b, trunc) if trunc is not None else a * b

    def expand(r: List[int], cols: List[int]) -> Poly:
        if len(r) == 1:
            return rows[r[0]][cols[0]]
        total = Poly.zero(ctx)
        top = r[0]
        rest = r[1:]
        for pos, c in enumerate(cols):
            entry = rows[top][c]
            if entry.is_zero():
                continue
            sub = expand(rest, cols[:pos] + cols[pos + 1:])
            piece = mul(entry, sub)
            total = total + piece if pos % 2 == 0 else total - piece
        return total

    return expand(list(range(n)), list(range(n)))


def poly_minors(rows, size: int):
    """All size x size minors of a matrix of Poly, row-major subset order."""
    from itertools import combinations

    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    out = []
    for rsub in combinations(range(nrows), size):
        for csub in combinations(range(ncols), size):
            out.append(poly_det([[rows[i][j] for j in csub] for i in rsub]))
    return out
