"""Exact evaluation of the K_0 rank sums and the identity ``g * 4**(g-1)``.

Every function here works with Python ints and :class:`fractions.Fraction`,
so nothing is ever rounded.
"""

from __future__ import annotations

import math
from fractions import Fraction

MAX_SUBSET_PAIRS_GENUS = 14


class ConsistencyError(ArithmeticError):
    """Two routes to the same exact quantity disagreed."""


def check_genus(g: int, minimum: int = 2) -> int:
    if not isinstance(g, int) or isinstance(g, bool):
        raise TypeError(f"genus must be an int, got {type(g).__name__}")
    if g < minimum:
        raise ValueError(f"genus must be >= {minimum}, got {g}")
    return g


def binomial(n: int, t: int) -> int:
    """``C(n, t)``, with the convention that it vanishes for ``t`` outside ``[0, n]``."""
    if n < 0:
        raise ValueError(f"binomial needs n >= 0, got {n}")
    if t < 0 or t > n:
        return 0
    return math.comb(n, t)


def r_direct(g: int) -> int:
    """Double sum over stacks ``k`` and subset sizes ``t``.

    This is the canonical value of the right-hand side rank used by the other
    modules.
    """
    check_genus(g)
    d = 2 * g + 1
    return sum(
        (k + 1 - t) * binomial(d, t)
        for k in range(g)
        for t in range(k + 1)
    )


def r_swapped(g: int) -> int:
    """Single sum with the inner sum over ``k`` collapsed to ``C(g+1-t, 2)``."""
    check_genus(g)
    d = 2 * g + 1
    return sum(binomial(g + 1 - t, 2) * binomial(d, t) for t in range(g))


def _r_reduced_half(g: int) -> int:
    return sum((g - t) ** 2 * binomial(2 * g, t) for t in range(g))


def _r_reduced_symmetric(g: int) -> int:
    total = sum((g - t) ** 2 * binomial(2 * g, t) for t in range(2 * g + 1))
    if total % 2:
        raise ConsistencyError(f"symmetrized sum {total} is odd for g={g}")
    return total // 2


def r_reduced(g: int) -> int:
    """Sum of ``(g-t)**2 * C(2g, t)``, computed both truncated and symmetrized.

    Raises :class:`ConsistencyError` if the two forms disagree.
    """
    check_genus(g)
    half = _r_reduced_half(g)
    sym = _r_reduced_symmetric(g)
    if half != sym:
        raise ConsistencyError(f"g={g}: truncated form {half} != symmetrized form {sym}")
    return half


def closed_form(g: int) -> int:
    check_genus(g, minimum=1)
    return g * 4 ** (g - 1)


def count_subset_pairs(g: int) -> int:
    """Brute-force count of triples ``(A, B, x)`` with ``A, B`` subsets of
    ``{1..g}`` and ``x`` in ``A & B``.

    Subsets are bitmasks, so this is ``sum(popcount(A & B))`` over all
    ``4**g`` pairs.
    """
    check_genus(g, minimum=1)
    if g > MAX_SUBSET_PAIRS_GENUS:
        raise OverflowError(
            f"count_subset_pairs(g={g}) would visit 4**{g} = {4 ** g} pairs; "
            f"cap is g <= {MAX_SUBSET_PAIRS_GENUS}"
        )
    size = 1 << g
    total = 0
    for a in range(size):
        total += sum((a & b).bit_count() for b in range(size))
    return total


def variance_identity(g: int) -> tuple[Fraction, Fraction]:
    """Both sides of ``Var(X) = g/2`` for ``X ~ Binomial(2g, 1/2)``.

    The left side is the exact expectation ``sum (g-t)**2 C(2g,t) / 4**g``.
    """
    check_genus(g, minimum=1)
    n = 2 * g
    weight = Fraction(1, 2) ** n
    lhs = sum((Fraction(g - t) ** 2 * binomial(n, t) * weight for t in range(n + 1)), Fraction(0))
    rhs = Fraction(n) * Fraction(1, 2) * (1 - Fraction(1, 2))
    return lhs, rhs
