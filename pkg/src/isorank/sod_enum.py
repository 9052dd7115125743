"""Components of the root-stack decompositions and the general-position check.

The stack over ``P^k`` obtained by extracting square roots of ``2g+1``
hyperplanes decomposes into one copy of ``D(P^{k-|I|})`` per subset ``I`` of
the hyperplanes with ``|I| <= k``.  We only track the indexing and the ranks of
``K_0``; nothing categorical is built.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import RepeatedParameterError
from .rank_formulas import binomial, check_genus


@dataclass(frozen=True)
class SODComponent:
    subset: tuple[int, ...]
    dim: int

    @property
    def rank(self) -> int:
        # K_0(P^n) has rank n + 1
        return self.dim + 1


@dataclass(frozen=True)
class HyperplaneSystem:
    """Hyperplanes in ``P^k``; row ``i`` holds the coefficients of ``H_i``."""

    k: int
    params: tuple[Fraction, ...]
    rows: tuple[tuple[Fraction, ...], ...]

    @property
    def d(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class GeneralPositionReport:
    passed: bool
    subsets_checked: int
    violation: tuple[int, ...] | None = None
    violation_rank: int | None = None


def _check_stack_index(g: int, k: int) -> None:
    check_genus(g)
    if not 0 <= k <= g - 1:
        raise ValueError(f"stack index k must satisfy 0 <= k <= g-1 = {g - 1}, got {k}")


def subsets_by_size(n: int, max_size: int) -> Iterator[tuple[int, ...]]:
    """1-based subsets of ``{1..n}`` of size ``<= max_size``, by size then lexicographically."""
    for size in range(min(max_size, n) + 1):
        yield from combinations(range(1, n + 1), size)


def enumerate_components(g: int, k: int) -> list[SODComponent]:
    _check_stack_index(g, k)
    return [SODComponent(subset, k - len(subset)) for subset in subsets_by_size(2 * g + 1, k)]


def component_count(g: int, k: int) -> int:
    _check_stack_index(g, k)
    return sum(binomial(2 * g + 1, t) for t in range(k + 1))


def rank_stack(g: int, k: int) -> int:
    _check_stack_index(g, k)
    d = 2 * g + 1
    return sum((k + 1 - t) * binomial(d, t) for t in range(k + 1))


def rank_rhs(g: int) -> int:
    """Total rank: ``O`` (the ``k = 0`` stack) plus every root stack up to ``k = g-1``."""
    check_genus(g)
    return sum(rank_stack(g, k) for k in range(g))


def build_hyperplanes(k: int, params: Sequence[Fraction | int | str]) -> HyperplaneSystem:
    """Moment-curve rows ``(1, a, a**2, ..., a**k)``, one per parameter."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    values = tuple(Fraction(a) for a in params)
    seen: dict[Fraction, int] = {}
    for idx, a in enumerate(values, start=1):
        if a in seen:
            raise RepeatedParameterError(
                f"duplicate parameter {a} at positions {seen[a]} and {idx}", (seen[a], idx)
            )
        seen[a] = idx
    rows = tuple(tuple(a**e for e in range(k + 1)) for a in values)
    return HyperplaneSystem(k, values, rows)


def exact_rank(rows: Iterable[Sequence[Fraction]]) -> int:
    """Rank over Q by Gaussian elimination on fractions."""
    work = [list(map(Fraction, r)) for r in rows]
    if not work:
        return 0
    ncols = len(work[0])
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(work)) if work[r][col] != 0), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        lead = work[rank][col]
        for r in range(rank + 1, len(work)):
            f = work[r][col]
            if f:
                factor = f / lead
                work[r] = [x - factor * y for x, y in zip(work[r], work[rank])]
        rank += 1
        if rank == len(work):
            break
    return rank


def check_general_position(system: HyperplaneSystem) -> GeneralPositionReport:
    """Every set of at most ``k+1`` rows must be linearly independent.

    Subsets are visited in (size, lexicographic) order and the first failure
    is reported with 1-based row indices.
    """
    checked = 0
    for subset in subsets_by_size(system.d, system.k + 1):
        if not subset:
            continue
        checked += 1
        r = exact_rank(system.rows[i - 1] for i in subset)
        if r != min(len(subset), system.k + 1):
            return GeneralPositionReport(False, checked, subset, r)
    return GeneralPositionReport(True, checked)


_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_params_text(text: str) -> list[Fraction]:
    """One rational per line (``num/den`` or integer); blank lines and ``#`` comments skipped."""
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not _RATIONAL.match(line):
            raise ValueError(f"line {lineno}: cannot parse {line!r} as a rational")
        try:
            values.append(Fraction(line))
        except ZeroDivisionError:
            raise ValueError(f"line {lineno}: zero denominator in {line!r}") from None
    return values


def read_params_file(path: str | Path) -> list[Fraction]:
    return parse_params_text(Path(path).read_text(encoding="utf-8"))
