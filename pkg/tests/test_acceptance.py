"""Exit criteria; one summary line per criterion is printed at the end of the run."""

import random
from fractions import Fraction

from isorank.flip_engine import UniPoly, flip_step, l_g, poincare_trace, rank_trace
from isorank.iso_count import IsotropyInstance, count_isotropic, naive_count, polynomial_experiment
from isorank.rank_formulas import (
    binomial,
    closed_form,
    count_subset_pairs,
    r_direct,
    r_reduced,
    r_swapped,
    variance_identity,
)
from isorank.sod_enum import (
    HyperplaneSystem,
    build_hyperplanes,
    check_general_position,
    enumerate_components,
    rank_rhs,
    rank_stack,
)

N1, N2, N3 = 56, 144, 10000


def test_01_proposition(criterion):
    with criterion(1, "r_direct = r_swapped = r_reduced = rank_rhs = l_g = g*4^(g-1), g in 2..60", 5):
        for g in range(2, 61):
            target = g * 4 ** (g - 1)
            assert r_direct(g) == r_swapped(g) == r_reduced(g) == rank_rhs(g) == l_g(g) == target, g


def test_02_subset_pairs(criterion):
    with criterion(2, "count_subset_pairs(g) = g*4^(g-1), g in 1..12", 30):
        for g in range(1, 13):
            assert count_subset_pairs(g) == closed_form(g), g


def test_03_variance(criterion):
    with criterion(3, "sum (g-t)^2 C(2g,t) / 4^g = g/2 exactly, g in 1..40", 1):
        for g in range(1, 41):
            lhs, rhs = variance_identity(g)
            assert lhs == rhs == Fraction(g, 2), g


def test_04_flip_traces(criterion):
    with criterion(4, "flip-trace fixtures and both delta routes for g <= 60", 5):
        assert rank_trace(2).ranks == [3, 8]
        assert rank_trace(3).ranks == [5, 26, 48]
        assert rank_trace(4).ranks == [7, 52, 163, 256]
        for g in range(2, 61):
            trace = rank_trace(g)
            assert trace.final_rank == closed_form(g)
            for i in range(g - 1):
                st = flip_step(g, i)
                assert st.rank_delta == st.n_i * (2 * g - 3 - 2 * i)
                assert st.rank_delta == st.n_i * ((2 * g - 3 - i) * (i + 1) - i * (2 * g - 2 - i))


def test_05_poincare(criterion):
    with criterion(5, "stage polynomials: degree, positivity, palindromy, P(1) = rank, g in 2..30", 10):
        for g in range(2, 31):
            trace = poincare_trace(g)
            for P, rank in zip(trace.polys, trace.ranks):
                assert P.degree == 2 * g - 2
                assert min(P.coeffs) >= 0
                assert P.coeffs[0] == 1
                assert P.is_palindromic()
                assert P(1) == rank
        assert poincare_trace(2).polys[-1] == UniPoly([1, 6, 1])
        assert poincare_trace(3).polys[-1] == UniPoly([1, 8, 30, 8, 1])


def test_06_sod_enumeration(criterion):
    with criterion(6, "component counts and ranks for g <= 8; rank_rhs = r_direct for g <= 30", 30):
        for g in range(2, 9):
            for k in range(g):
                comps = enumerate_components(g, k)
                assert len(comps) == sum(binomial(2 * g + 1, t) for t in range(k + 1))
                assert sum(c.rank for c in comps) == rank_stack(g, k)
        for g in range(2, 31):
            assert rank_rhs(g) == r_direct(g)


def test_07_general_position(criterion):
    with criterion(7, "moment-curve systems k=g-1, params 1..2g+1, g in 2..5; duplicate fails", 30):
        for g in range(2, 6):
            system = build_hyperplanes(g - 1, range(1, 2 * g + 2))
            assert check_general_position(system).passed, g
        good = build_hyperplanes(2, range(1, 6))
        rows = list(good.rows)
        rows[4] = rows[0]
        report = check_general_position(HyperplaneSystem(2, good.params, tuple(rows)))
        assert not report.passed and report.violation == (1, 5)


def test_08_oracle_equivalence(criterion):
    with criterion(8, "count_isotropic = naive_count on the g=2 and g=3 instance set", 120):
        rng = random.Random(20261015)
        for p in (5, 7, 11, 13):
            instances = [IsotropyInstance.consecutive(p, 2)]
            instances += [IsotropyInstance.random(p, 2, rng) for _ in range(3)]
            for inst in instances:
                assert count_isotropic(inst) == naive_count(inst), inst
        for p in (11, 13):
            inst = IsotropyInstance.consecutive(p, 3)
            assert count_isotropic(inst) == naive_count(inst), inst


def test_09_invariance(criterion):
    with criterion(9, "counts invariant under permutation and a -> u*a + v", 60):
        rng = random.Random(9)
        cases = [(7, 2), (11, 2), (13, 2), (13, 2), (11, 3)]
        for p, g in cases:
            inst = IsotropyInstance.random(p, g, rng)
            base = count_isotropic(inst)
            perm = list(inst.params)
            rng.shuffle(perm)
            assert count_isotropic(IsotropyInstance(p, g, tuple(perm))) == base
            u, v = rng.randrange(1, p), rng.randrange(p)
            moved = tuple((u * a + v) % p for a in inst.params)
            assert count_isotropic(IsotropyInstance(p, g, moved)) == base


def test_10_polynomial_experiment(criterion):
    with criterion(10, "experiment reports deterministic; fixtures N1, N2, N3 reproduced", 60):
        first = polynomial_experiment(2, [7, 11, 13])
        assert polynomial_experiment(2, [7, 11, 13]) == first
        assert [r.p for r in first.rows] == [7, 11, 13]
        assert all(r.error is None and r.difference is not None for r in first.rows)
        g3 = polynomial_experiment(3, [11])
        assert len(g3.rows) == 1 and g3.rows[0].count == N3
        assert first.rows[1].count == N2
        assert count_isotropic(IsotropyInstance(5, 2, (0, 1, 2, 3, 4))) == N1
