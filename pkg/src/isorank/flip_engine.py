"""Rank and Poincaré-polynomial bookkeeping along the anti-flip chain ``M_0, ..., M_{g-1}``.

``M_0 = P^{2g-2}``.  Passing from ``M_i`` to ``M_{i+1}`` blows up ``n_i``
copies of ``P^i`` and blows the exceptional divisors down onto copies of
``P^{2g-3-i}``.  The polynomial refinement uses the smooth blowup formula: a
center ``Z`` of codimension ``c`` contributes ``P_Z(q) * (q + ... + q^{c-1})``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .rank_formulas import binomial, check_genus


class UniPoly:
    """Univariate polynomial in ``q`` with exact integer coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[int, ...] = tuple(c)

    @classmethod
    def geometric(cls, lo: int, hi: int) -> "UniPoly":
        """``q^lo + ... + q^hi``; zero when ``hi < lo``."""
        if hi < lo:
            return cls()
        return cls([0] * lo + [1] * (hi - lo + 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return UniPoly(x + y for x, y in zip(a, b))

    def __neg__(self) -> "UniPoly":
        return UniPoly(-x for x in self.coeffs)

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other: "UniPoly | int") -> "UniPoly":
        if isinstance(other, int):
            return UniPoly(other * x for x in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return UniPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return UniPoly(out)

    __rmul__ = __mul__

    def __call__(self, q: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * q + c
        return acc

    def __eq__(self, other: object) -> bool:
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def is_palindromic(self) -> bool:
        return self.coeffs == self.coeffs[::-1]

    def __repr__(self) -> str:
        return f"UniPoly({list(self.coeffs)})"

    def __str__(self) -> str:
        terms = []
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if j == 0 else ("q" if j == 1 else f"q^{j}")
            if j == 0:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{mono}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


@dataclass(frozen=True)
class FlipStep:
    i: int
    n_i: int
    blowup_center_dim: int
    blowdown_center_dim: int
    rank_delta: int
    # per-center K_0 changes: gain from one blowup, loss from one blowdown
    blowup_gain: int
    blowdown_loss: int


@dataclass
class FlipTrace:
    g: int
    steps: list[FlipStep] = field(default_factory=list)
    ranks: list[int] = field(default_factory=list)
    polys: list[UniPoly] = field(default_factory=list)

    @property
    def final_rank(self) -> int:
        return self.ranks[-1]


def n_i(g: int, i: int) -> int:
    """Number of ``P^i`` centers blown up at step ``i``: ``C(d,i+1) + C(d,i-1) + C(d,i-3) + ...``."""
    check_genus(g)
    if not 0 <= i <= g - 2:
        raise ValueError(f"flip index must satisfy 0 <= i <= g-2 = {g - 2}, got {i}")
    d = 2 * g + 1
    return sum(binomial(d, j) for j in range(i + 1, -1, -2))


def flip_step(g: int, i: int) -> FlipStep:
    """One anti-flip, with the rank change computed both ways.

    Raises ``ArithmeticError`` if the per-center bookkeeping disagrees with
    ``n_i * (2g - 3 - 2i)``.
    """
    n = n_i(g, i)
    up_dim, down_dim = i, 2 * g - 3 - i
    # blowing up P^i (codim 2g-2-i) adds (codim-1) copies of K_0(P^i)
    gain = (2 * g - 3 - i) * (i + 1)
    # blowing down onto P^{2g-3-i} (codim i+1) removes i copies of K_0(P^{2g-3-i})
    loss = i * (2 * g - 2 - i)
    delta = n * (2 * g - 3 - 2 * i)
    if delta != n * (gain - loss):
        raise ArithmeticError(f"g={g}, i={i}: delta {delta} != n_i*(gain-loss) {n * (gain - loss)}")
    return FlipStep(i, n, up_dim, down_dim, delta, gain, loss)


def rank_trace(g: int) -> FlipTrace:
    check_genus(g)
    trace = FlipTrace(g, ranks=[2 * g - 1])
    for i in range(g - 1):
        step = flip_step(g, i)
        trace.steps.append(step)
        trace.ranks.append(trace.ranks[-1] + step.rank_delta)
    return trace


def flip_poly_delta(g: int, i: int) -> UniPoly:
    """Change of the Poincaré polynomial from one blowup/blowdown pair at step ``i``."""
    top = 2 * g - 3 - i
    blowup = UniPoly.geometric(0, i) * UniPoly.geometric(1, top)
    blowdown = UniPoly.geometric(0, top) * UniPoly.geometric(1, i)
    return blowup - blowdown


def poincare_trace(g: int) -> FlipTrace:
    trace = rank_trace(g)
    poly = UniPoly.geometric(0, 2 * g - 2)
    trace.polys.append(poly)
    for step in trace.steps:
        poly = poly + step.n_i * flip_poly_delta(g, step.i)
        trace.polys.append(poly)
    return trace


def poincare_polynomial(g: int) -> UniPoly:
    """Polynomial of the last stage ``M_{g-1}``."""
    return poincare_trace(g).polys[-1]


def l_g(g: int) -> int:
    return rank_trace(g).final_rank
