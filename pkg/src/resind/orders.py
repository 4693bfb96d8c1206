"""Monomial and module-term orders used by the division engine.

All orders are realized as key functions: a term with a larger key is
considered larger.  Ring orders act on exponent tuples; module orders
pair a ring key with the component index, term over position.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

Exps = Tuple[int, ...]


def global_degrevlex_key(exps: Exps) -> tuple:
    return (sum(exps), tuple(-e for e in reversed(exps)))


def local_negdegrevlex_key(exps: Exps) -> tuple:
    # Largest key = smallest total degree; this makes 1 the leading term of
    # a unit, as a local order must.
    return (-sum(exps), tuple(-e for e in reversed(exps)))


def elimination_key(block_sizes: Sequence[int], local_tail: bool = False) -> Callable[[Exps], tuple]:
    """Blockwise order: earlier blocks eliminated first, degrevlex inside.

    With `local_tail` the final block is compared by the local order, so
    the order is global in the eliminated variables and local in the rest.
    """
    bounds = []
    start = 0
    for size in block_sizes:
        bounds.append((start, start + size))
        start += size

    def key(exps: Exps) -> tuple:
        parts = []
        for idx, (lo, hi) in enumerate(bounds):
            block = exps[lo:hi]
            if local_tail and idx == len(bounds) - 1:
                parts.append(local_negdegrevlex_key(block))
            else:
                parts.append(global_degrevlex_key(block))
        return tuple(parts)

    return key


@dataclass(frozen=True)
class TermOrder:
    """Module-term order: ring order first, then component (term over position).

    `is_local` must reflect whether the ring key is a local order; division
    uses it to decide between Mora reduction and ordinary division.
    """

    ring_key: Callable[[Exps], tuple]
    is_local: bool

    def key(self, comp: int, exps: Exps) -> tuple:
        # Lower component wins ties, hence the negation.
        return (self.ring_key(exps), -comp)


def local_order() -> TermOrder:
    return TermOrder(local_negdegrevlex_key, True)


def global_order() -> TermOrder:
    return TermOrder(global_degrevlex_key, False)
