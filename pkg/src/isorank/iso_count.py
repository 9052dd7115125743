"""Counting subspaces of ``F_p^{2g+1}`` that are totally isotropic for a pencil of diagonal quadrics.

The two forms are ``q_0 = sum a_i x_i^2`` and ``q_inf = -sum x_i^2``.  Over an
odd prime field a subspace is totally isotropic for a quadratic form iff the
associated bilinear form vanishes on it, and the overall sign of ``q_inf`` is
irrelevant, so everything below works with the two diagonal bilinear forms
with coefficients ``a`` and ``1``.

Two independent counters live here:

* :func:`count_isotropic` walks canonical RREF bases pivot set by pivot set
  and cuts a partial basis as soon as its Gram matrices stop vanishing.
* :func:`naive_count` never looks at echelon forms.  It scans the affine cone
  for isotropic points and, for planes, counts ordered pairs of mutually
  orthogonal isotropic points.
"""

from __future__ import annotations

import logging
from random import Random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, FieldError, RepeatedParameterError
from .flip_engine import poincare_polynomial
from .rank_formulas import check_genus

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**8
NAIVE_MAX_GENUS = 3
# rows of candidates materialized at once while filtering
_CHUNK = 1 << 18

Matrix = tuple[tuple[int, ...], ...]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of ``k``-dimensional subspaces of ``F_q^n``."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


@dataclass(frozen=True)
class IsotropyInstance:
    p: int
    g: int
    params: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.p == 2:
            raise FieldError("even characteristic: p = 2 is not supported for diagonal quadrics")
        if not is_prime(self.p):
            raise FieldError(f"p = {self.p} is not a prime")
        check_genus(self.g)
        if len(self.params) != 2 * self.g + 1:
            raise ValueError(f"expected {2 * self.g + 1} parameters for g={self.g}, got {len(self.params)}")
        reduced = tuple(int(a) % self.p for a in self.params)
        seen: dict[int, int] = {}
        for idx, a in enumerate(reduced, start=1):
            if a in seen:
                raise RepeatedParameterError(
                    f"repeated parameter: a_{seen[a]} = a_{idx} = {a} mod {self.p}", (seen[a], idx)
                )
            seen[a] = idx
        object.__setattr__(self, "params", reduced)

    @classmethod
    def consecutive(cls, p: int, g: int) -> "IsotropyInstance":
        """Parameters ``a_i = i`` for ``i = 1..2g+1``."""
        return cls(p, g, tuple(range(1, 2 * g + 2)))

    @classmethod
    def random(cls, p: int, g: int, rng: Random) -> "IsotropyInstance":
        return cls(p, g, tuple(rng.sample(range(p), 2 * g + 1)))

    @property
    def n(self) -> int:
        return 2 * self.g + 1

    @property
    def m(self) -> int:
        """Dimension of the subspaces being counted."""
        return self.g - 1

    def forms(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.params, (1,) * self.n


def gram(form: Sequence[int], u: Sequence[int], v: Sequence[int], p: int | None = None) -> int:
    """Diagonal bilinear form ``sum c_i u_i v_i``, reduced mod ``p`` when given."""
    s = sum(c * x * y for c, x, y in zip(form, u, v))
    return s % p if p is not None else s


def is_isotropic(inst: IsotropyInstance, basis: Sequence[Sequence[int]]) -> bool:
    """True iff both forms vanish identically on the span of ``basis``."""
    for form in inst.forms():
        for i, u in enumerate(basis):
            for v in basis[i:]:
                if gram(form, u, v, inst.p):
                    return False
    return True


def pivot_sets(inst: IsotropyInstance) -> list[tuple[int, ...]]:
    return list(combinations(range(inst.n), inst.m))


def _free_columns(n: int, pivots: Sequence[int], j: int) -> list[int]:
    return [c for c in range(pivots[j] + 1, n) if c not in pivots]


def candidate_work(inst: IsotropyInstance) -> int:
    """Candidate rows the pruned enumerator materializes (before filtering)."""
    total = 0
    for piv in pivot_sets(inst):
        total += sum(inst.p ** len(_free_columns(inst.n, piv, j)) for j in range(inst.m))
    return total


def _check_budget(inst: IsotropyInstance, work: int, budget: int, what: str) -> None:
    if work > budget:
        size = gaussian_binomial(inst.n, inst.m, inst.p)
        raise BudgetExceeded(
            f"{what}: {work} exceeds budget {budget} "
            f"(Gaussian binomial [{inst.n} choose {inst.m}]_{inst.p} = {size} RREF candidates)"
        )


def _isotropic_rows(inst: IsotropyInstance, pivots: Sequence[int], j: int) -> np.ndarray:
    """All RREF rows for slot ``j`` of ``pivots`` that are isotropic for both forms.

    Rows come out in free-entry lexicographic order.
    """
    p, n = inst.p, inst.n
    free = _free_columns(n, pivots, j)
    a = np.asarray(inst.params, dtype=np.int64)
    total = p ** len(free)
    kept = []
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        rows = np.zeros((idx.size, n), dtype=np.int64)
        rows[:, pivots[j]] = 1
        # most significant digit goes to the leftmost free column
        for col in reversed(free):
            rows[:, col] = idx % p
            idx //= p
        sq = rows * rows
        ok = ((sq @ a) % p == 0) & (sq.sum(axis=1) % p == 0)
        kept.append(rows[ok])
    return np.concatenate(kept) if kept else np.zeros((0, n), dtype=np.int64)


def _orthogonal(cands: np.ndarray, row: np.ndarray, a: np.ndarray, p: int) -> np.ndarray:
    return cands[((cands @ (a * row)) % p == 0) & ((cands @ row) % p == 0)]


def _count_pivot_set(inst: IsotropyInstance, pivots: tuple[int, ...]) -> int:
    a = np.asarray(inst.params, dtype=np.int64)
    levels = [_isotropic_rows(inst, pivots, j) for j in range(inst.m)]

    def walk(depth: int, pending: list[np.ndarray]) -> int:
        if depth == len(levels) - 1:
            return len(pending[0])
        total = 0
        for row in pending[0]:
            nxt = [_orthogonal(c, row, a, inst.p) for c in pending[1:]]
            if all(len(c) for c in nxt):
                total += walk(depth + 1, nxt)
        return total

    if any(len(level) == 0 for level in levels):
        return 0
    return walk(0, levels)


def count_by_pivots(inst: IsotropyInstance, budget: int = DEFAULT_BUDGET,
                    jobs: int = 1) -> dict[tuple[int, ...], int]:
    """Counts per pivot set; the partition used for parallel runs."""
    _check_budget(inst, candidate_work(inst), budget, "candidate rows")
    pivs = pivot_sets(inst)
    if jobs > 1 and len(pivs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            counts = list(pool.map(_count_pivot_set, [inst] * len(pivs), pivs))
    else:
        counts = [_count_pivot_set(inst, piv) for piv in pivs]
    return dict(zip(pivs, counts))


def count_isotropic(inst: IsotropyInstance, budget: int = DEFAULT_BUDGET, jobs: int = 1) -> int:
    """Exact number of totally isotropic ``(g-1)``-dimensional subspaces.

    ``budget`` caps the number of candidate rows generated before pruning;
    :class:`BudgetExceeded` is raised up front when it would be exceeded.
    """
    counts = count_by_pivots(inst, budget, jobs)
    total = sum(counts.values())
    log.debug("p=%d g=%d params=%s: %d subspaces", inst.p, inst.g, inst.params, total)
    return total


def iter_isotropic(inst: IsotropyInstance, budget: int = DEFAULT_BUDGET,
                   prune: bool = True) -> Iterator[Matrix]:
    """Yield every totally isotropic subspace as its RREF basis.

    Order: pivot sets lexicographically, then free entries lexicographically
    row by row.  With ``prune=False`` every RREF candidate is built in full
    and tested at the end; the budget then applies to the Gaussian binomial.
    """
    if prune:
        _check_budget(inst, candidate_work(inst), budget, "candidate rows")
        yield from _iter_pruned(inst)
    else:
        _check_budget(inst, gaussian_binomial(inst.n, inst.m, inst.p), budget, "RREF candidates")
        yield from _iter_unpruned(inst)


def _iter_pruned(inst: IsotropyInstance) -> Iterator[Matrix]:
    a = np.asarray(inst.params, dtype=np.int64)
    for piv in pivot_sets(inst):
        levels = [_isotropic_rows(inst, piv, j) for j in range(inst.m)]

        def walk(chosen: list[tuple[int, ...]], pending: list[np.ndarray]) -> Iterator[Matrix]:
            for row in pending[0]:
                basis = chosen + [tuple(int(x) for x in row)]
                if len(pending) == 1:
                    yield tuple(basis)
                    continue
                nxt = [_orthogonal(c, row, a, inst.p) for c in pending[1:]]
                if all(len(c) for c in nxt):
                    yield from walk(basis, nxt)

        yield from walk([], levels)


def _iter_unpruned(inst: IsotropyInstance) -> Iterator[Matrix]:
    p, n = inst.p, inst.n
    for piv in pivot_sets(inst):
        frees = [_free_columns(n, piv, j) for j in range(inst.m)]
        slots = [(j, c) for j in range(inst.m) for c in frees[j]]
        for values in product(range(p), repeat=len(slots)):
            rows = [[0] * n for _ in range(inst.m)]
            for j, c in enumerate(piv):
                rows[j][c] = 1
            for (j, c), v in zip(slots, values):
                rows[j][c] = v
            if is_isotropic(inst, rows):
                yield tuple(tuple(r) for r in rows)


def isotropic_points(inst: IsotropyInstance) -> np.ndarray:
    """Projective points of ``P^{2g}`` on both quadrics, scaled so the first nonzero coordinate is 1.

    Found by scanning every nonzero vector of ``F_p^{2g+1}``; the scaled
    representatives are then picked out of the affine solutions.
    """
    p, n = inst.p, inst.n
    a = np.asarray(inst.params, dtype=np.int64)
    head = min(2, n)
    tail = n - head
    tail_idx = np.arange(p**tail, dtype=np.int64)
    tail_vals = np.zeros((tail_idx.size, tail), dtype=np.int64)
    for col in range(tail - 1, -1, -1):
        tail_vals[:, col] = tail_idx % p
        tail_idx //= p
    tail_sq = tail_vals * tail_vals
    tail_q0 = tail_sq @ a[head:]
    tail_qi = tail_sq.sum(axis=1)
    found = []
    affine = 0
    for prefix in product(range(p), repeat=head):
        pre = np.asarray(prefix, dtype=np.int64)
        q0 = (tail_q0 + int(pre * pre @ a[:head])) % p
        qi = (tail_qi + int(pre @ pre)) % p
        ok = (q0 == 0) & (qi == 0)
        vecs = np.hstack([np.broadcast_to(pre, (tail_vals.shape[0], head)), tail_vals])[ok]
        nonzero = vecs.any(axis=1)
        vecs = vecs[nonzero]
        affine += len(vecs)
        lead = vecs[np.arange(len(vecs)), (vecs != 0).argmax(axis=1)] if len(vecs) else vecs[:, 0]
        found.append(vecs[lead == 1])
    pts = np.concatenate(found)
    if affine != len(pts) * (p - 1):
        raise ArithmeticError(f"affine cone has {affine} vectors, not {p - 1} x {len(pts)} points")
    return pts


def _orthogonal_pairs(points: np.ndarray, a: np.ndarray, p: int) -> int:
    """Ordered pairs of distinct points orthogonal for both forms."""
    n = points.shape[1]
    # BLAS matmul is exact while every Gram entry fits the float mantissa
    dtype = np.float32 if n * (p - 1) ** 3 < 2**24 else np.float64
    pts = points.astype(dtype)
    weighted = pts * a.astype(dtype)
    inv, pp = dtype(1.0 / p), dtype(p)
    step = 1024
    upper = 0
    for s in range(0, len(pts), step):
        e = min(s + step, len(pts))
        g_inf = pts[s:e] @ pts[s:].T
        hit = np.rint(g_inf * inv) * pp == g_inf
        g_0 = weighted[s:e] @ pts[s:].T
        hit &= np.rint(g_0 * inv) * pp == g_0
        hit[:, : e - s] &= np.triu(np.ones((e - s, e - s), dtype=bool), 1)
        upper += int(np.count_nonzero(hit))
    return 2 * upper


def naive_count(inst: IsotropyInstance, budget: int = DEFAULT_BUDGET) -> int:
    """Independent count by point scanning, for ``g <= 3``.

    ``g = 2``: lines are just isotropic points.  ``g = 3``: every isotropic
    plane contains ``p + 1`` pairwise orthogonal isotropic points, hence
    ``p (p + 1)`` ordered pairs of distinct ones, and conversely two distinct
    orthogonal isotropic points span an isotropic plane.
    """
    if inst.g > NAIVE_MAX_GENUS:
        raise BudgetExceeded(f"naive_count handles g <= {NAIVE_MAX_GENUS}, got g={inst.g}")
    scan = inst.p**inst.n
    if scan > budget:
        raise BudgetExceeded(f"naive scan of {inst.p}^{inst.n} = {scan} vectors exceeds budget {budget}")
    pts = isotropic_points(inst)
    if inst.m == 1:
        return len(pts)
    pairs = _orthogonal_pairs(pts, np.asarray(inst.params, dtype=np.int64), inst.p)
    per_plane = inst.p * (inst.p + 1)
    if pairs % per_plane:
        raise ArithmeticError(f"{pairs} ordered pairs is not a multiple of {per_plane}")
    return pairs // per_plane


@dataclass(frozen=True)
class ExperimentRow:
    p: int
    params: tuple[int, ...]
    count: int | None
    predicted: int
    error: str | None = None

    @property
    def difference(self) -> int | None:
        return None if self.count is None else self.count - self.predicted


@dataclass(frozen=True)
class ExperimentReport:
    g: int
    rule: str
    poly: str
    rows: tuple[ExperimentRow, ...]

    @property
    def all_zero(self) -> bool:
        return all(r.difference == 0 for r in self.rows)


def params_for_rule(rule: str, p: int, g: int) -> tuple[int, ...]:
    if rule == "consecutive":
        return tuple(range(1, 2 * g + 2))
    raise ValueError(f"unknown parameter rule {rule!r}")


def polynomial_experiment(g: int, primes: Sequence[int], rule: str = "consecutive",
                          budget: int = DEFAULT_BUDGET, jobs: int = 1) -> ExperimentReport:
    """Compare isotropic counts with the flip polynomial evaluated at ``p``.

    Resource and validation errors for one prime are recorded in its row and
    do not stop the batch.
    """
    poly = poincare_polynomial(g)
    rows = []
    for p in primes:
        params = params_for_rule(rule, p, g)
        predicted = poly(p)
        try:
            if p < 2 * g + 3:
                raise ValueError(f"p = {p} is below 2g+3 = {2 * g + 3}")
            inst = IsotropyInstance(p, g, params)
            rows.append(ExperimentRow(p, inst.params, count_isotropic(inst, budget, jobs), predicted))
        except (BudgetExceeded, ValueError) as exc:
            rows.append(ExperimentRow(p, params, None, predicted, str(exc)))
    return ExperimentReport(g, rule, str(poly), tuple(rows))
