"""Symmetric bilinear forms over the rationals and their exact inertia.

The index computations reduce to signatures of residue pairings on finite
dimensional quotient spaces.  Everything here is plain linear algebra over
Fraction: forms are assembled from a pairing callback on a chosen basis,
and signatures come from congruence diagonalization, so no eigenvalue or
root isolation is ever needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple


Row = List[Fraction]


@dataclass
class BilinearForm:
    """A symmetric matrix together with the basis labels it was built on."""

    basis: List[object]
    matrix: List[Row]

    def __post_init__(self):
        n = len(self.basis)
        if len(self.matrix) != n or any(len(r) != n for r in self.matrix):
            raise ValueError("matrix size must match the basis")
        self.matrix = [[Fraction(v) for v in row] for row in self.matrix]
        for i in range(n):
            for j in range(i):
                if self.matrix[i][j] != self.matrix[j][i]:
                    raise ValueError(
                        f"matrix is not symmetric at ({i}, {j})"
                    )

    @classmethod
    def from_pairing(
        cls, basis: Sequence[object], pairing: Callable[[object, object], Fraction]
    ) -> "BilinearForm":
        """Evaluate `pairing` on the upper triangle and mirror it.

        The pairings used here come from multiplication followed by a
        residue, which is symmetric in its two arguments, so only half the
        entries are ever computed.
        """
        n = len(basis)
        mat: List[Row] = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                v = Fraction(pairing(basis[i], basis[j]))
                mat[i][j] = v
                mat[j][i] = v
        return cls(list(basis), mat)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def restrict(self, vectors: Sequence[Sequence[Fraction]]) -> "BilinearForm":
        """Gram matrix of the form on a generating set of a subspace.

        Vectors are coordinate rows in the ambient basis.  The labels of
        the restricted form are the vectors themselves.
        """
        n = self.dimension
        vgs = [[Fraction(c) for c in v] for v in vectors]
        for v in vgs:
            if len(v) != n:
                raise ValueError("subspace vector length must match the basis")
        images = [
            [sum((self.matrix[a][b] * v[b] for b in range(n)), Fraction(0))
             for a in range(n)]
            for v in vgs
        ]
        gram = [
            [sum((u[a] * img[a] for a in range(n)), Fraction(0)) for img in images]
            for u in vgs
        ]
        return BilinearForm([tuple(v) for v in vgs], gram)

    def signature(self) -> "SignatureReport":
        return signature(self)


@dataclass(frozen=True)
class SignatureReport:
    dimension: int
    rank: int
    signature: int
    positive: int
    negative: int
    zero: int

    def __post_init__(self):
        if self.positive + self.negative != self.rank:
            raise ValueError("inertia counts must sum to the rank")
        if self.signature != self.positive - self.negative:
            raise ValueError("signature must equal positive minus negative")
        if not (abs(self.signature) <= self.rank <= self.dimension):
            raise ValueError("rank must lie between |signature| and dimension")
        if self.zero != self.dimension - self.rank:
            raise ValueError("zero count must be the corank")


def congruence_diagonalize(matrix: Sequence[Sequence[Fraction]]) -> List[Fraction]:
    """Diagonal of a congruence transform of a symmetric matrix.

    Pivots are chosen anywhere in the live block.  When every live
    diagonal entry vanishes but some off diagonal entry does not, that
    entry spans a hyperbolic plane and contributes one positive and one
    negative value at once.  Each update is a congruence by an invertible
    matrix, so the inertia of the result is the inertia of the input.
    """
    A = [[Fraction(v) for v in row] for row in matrix]
    n = len(A)
    if any(len(r) != n for r in A):
        raise ValueError("matrix must be square")
    diag: List[Fraction] = []
    live = list(range(n))

    def eliminate(r: int, coeffs: List[Tuple[Fraction, int]]):
        # row r minus sum of lam * row s, then the mirrored column update
        for lam, s in coeffs:
            if lam:
                for c in live:
                    A[r][c] -= lam * A[s][c]
        for lam, s in coeffs:
            if lam:
                for c in live:
                    A[c][r] -= lam * A[c][s]

    while live:
        piv = next((i for i in live if A[i][i]), None)
        if piv is not None:
            d = A[piv][piv]
            for r in live:
                if r != piv:
                    eliminate(r, [(A[r][piv] / d, piv)])
            diag.append(d)
            live.remove(piv)
            continue
        pair = next(
            ((i, j) for i in live for j in live if i < j and A[i][j]), None
        )
        if pair is None:
            diag.extend(Fraction(0) for _ in live)
            break
        i, j = pair
        b = A[i][j]
        for r in live:
            if r != i and r != j:
                eliminate(r, [(A[r][j] / b, i), (A[r][i] / b, j)])
        diag.extend([2 * b, -2 * b])
        live.remove(i)
        live.remove(j)
    return diag


def signature(form: BilinearForm) -> SignatureReport:
    """Exact inertia of a symmetric rational form.

    Degenerate forms are fine: the zero count records the radical and the
    signature is that of the induced form on the quotient by it.
    """
    diag = congruence_diagonalize(form.matrix)
    pos = sum(1 for d in diag if d > 0)
    neg = sum(1 for d in diag if d < 0)
    return SignatureReport(
        dimension=form.dimension,
        rank=pos + neg,
        signature=pos - neg,
        positive=pos,
        negative=neg,
        zero=form.dimension - (pos + neg),
    )


def assemble_form(
    basis: Sequence[object], pairing: Callable[[object, object], Fraction]
) -> BilinearForm:
    """Build the residue pairing matrix on a quotient basis.

    `pairing` receives two basis labels and must return the residue of
    their product times whatever fixed numerator factor the context
    prescribes; degree mismatches surface as errors from the evaluator
    it closes over.
    """
    return BilinearForm.from_pairing(basis, pairing)


def sig_additivity_check(
    form: BilinearForm,
    gens_a: Sequence[Sequence[Fraction]],
    gens_b: Sequence[Sequence[Fraction]],
) -> Tuple[bool, Dict[str, object]]:
    """Check that two generating sets split the form orthogonally.

    Returns (ok, info).  When some cross pairing is nonzero the check
    fails immediately and info carries the witness pair of indices and
    the offending value.  Otherwise the restricted signatures are
    compared against the total.
    """
    n = form.dimension
    ua = [[Fraction(c) for c in v] for v in gens_a]
    ub = [[Fraction(c) for c in v] for v in gens_b]
    for u in ua + ub:
        if len(u) != n:
            raise ValueError("subspace vector length must match the basis")
    for i, u in enumerate(ua):
        for j, v in enumerate(ub):
            val = sum(
                (u[a] * form.matrix[a][b] * v[b] for a in range(n) for b in range(n)),
                Fraction(0),
            )
            if val:
                return False, {"witness": (i, j), "value": val}
    sa = signature(form.restrict(ua))
    sb = signature(form.restrict(ub))
    total = signature(form)
    ok = sa.signature + sb.signature == total.signature
    return ok, {"parts": (sa, sb), "total": total}
