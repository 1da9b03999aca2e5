import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from polyquery.boolfn import SymmetricProfile, TruthTable, from_family, symmetric_profile
from polyquery.errors import DomainError, ParameterError
from polyquery.polynomial import (
    MultilinearPoly,
    UnivariatePoly,
    approx_degree,
    brute_force_symmetrization,
    degree,
    function_degree,
    interpolate,
    lp_min_error,
    markov_bound,
    restrict_blocks,
    symmetric_approx_degree,
    symmetric_lp_min_error,
    symmetrize,
)
from polyquery import simplex

F = Fraction


def poly(n, terms):
    return MultilinearPoly(n, {m: F(c) for m, c in terms.items()})


def lp_oracle(f: TruthTable, d: int) -> float:
    """Float LP (HiGHS) for min eps s.t. |p(x) - f(x)| <= eps, deg p <= d."""
    n = f.n
    masks = [m for m in range(1 << n) if bin(m).count("1") <= d]
    rows = np.array([[1.0 if m & x == m else 0.0 for m in masks] for x in range(1 << n)])
    k = len(masks)
    c = np.zeros(k + 1)
    c[-1] = 1
    A = np.block([[rows, -np.ones((1 << n, 1))], [-rows, -np.ones((1 << n, 1))]])
    b = np.concatenate([f.table, -f.table.astype(float)])
    res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * k + [(0, None)], method="highs")
    return res.fun


class TestInterpolate:
    def test_and2(self):
        assert interpolate(from_family("AND", 2)) == poly(2, {3: 1})

    def test_or2(self):
        assert interpolate(from_family("OR", 2)) == poly(2, {1: 1, 2: 1, 3: -1})

    def test_parity2(self):
        assert interpolate(from_family("PARITY", 2)) == poly(2, {1: 1, 2: 1, 3: -2})

    def test_or_product_form(self):
        # 1 - prod(1 - x_i): coefficient of S is (-1)^(|S|+1) for nonempty S
        p = interpolate(from_family("OR", 4))
        for m in range(1, 16):
            assert p.coeffs[m] == (-1) ** (bin(m).count("1") + 1)

    def test_roundtrip_all_n3(self):
        for v in range(256):
            f = TruthTable.from_int(3, v)
            assert interpolate(f).represents(f)

    def test_roundtrip_all_n4(self):
        for v in range(0, 1 << 16, 97):
            f = TruthTable.from_int(4, v)
            assert interpolate(f).represents(f)

    @pytest.mark.parametrize("n", [5, 8, 12])
    def test_roundtrip_families(self, n):
        for fam in ("OR", "AND", "PARITY", "MAJORITY"):
            f = from_family(fam, n)
            assert interpolate(f).represents(f)

    def test_moebius_formula(self):
        # c_S = sum over T subset S of (-1)^{|S \ T|} f(T)
        rng = np.random.default_rng(0)
        f = TruthTable(4, rng.integers(0, 2, 16))
        p = interpolate(f)
        for s in range(16):
            sub = [t for t in range(16) if t & s == t]
            c = sum((-1) ** bin(s ^ t).count("1") * int(f(t)) for t in sub)
            assert p.coeffs.get(s, 0) == c


class TestDegree:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_parity_and_or(self, n):
        assert degree(interpolate(from_family("PARITY", n))) == (n, False)
        assert degree(interpolate(from_family("OR", n))) == (n, False)

    def test_zero(self):
        assert degree(MultilinearPoly(3)) == (0, True)

    def test_constant(self):
        assert degree(MultilinearPoly.constant(3, 5)) == (0, False)


class TestArithmetic:
    def test_multilinear_reduction(self):
        x0 = MultilinearPoly.variable(2, 0)
        assert x0 * x0 == x0

    def test_evaluate_real_point(self):
        p = poly(2, {1: 1, 2: 1, 3: -2})
        assert p.evaluate([F(1, 2), F(1, 2)]) == F(1, 2)

    def test_json_roundtrip(self):
        p = poly(3, {0: F(1, 3), 5: F(-7, 2)})
        assert MultilinearPoly.from_json(p.to_json()) == p
        assert p.to_json()["terms"][0] == {"mask": 0, "num": "1", "den": "3"}

    def test_univariate_json(self):
        q = UnivariatePoly((F(0), F(-1, 2), F(1, 2)))
        assert q.to_json() == {"coeffs": [["0", "1"], ["-1", "2"], ["1", "2"]]}
        assert UnivariatePoly.from_json(q.to_json()) == q

    def test_no_zero_coefficients_stored(self):
        p = poly(2, {1: 1}) - poly(2, {1: 1})
        assert p.coeffs == {}


class TestSymmetrize:
    def test_difference_vanishes(self):
        assert symmetrize(poly(2, {1: 1, 2: -1})).is_zero()

    def test_x0x1(self):
        q = symmetrize(poly(2, {3: 1}))
        assert q == UnivariatePoly((F(0), F(-1, 2), F(1, 2)))
        assert [q(k) for k in range(3)] == [0, 0, 1]

    def test_or4(self):
        q = symmetrize(interpolate(from_family("OR", 4)))
        assert [q(k) for k in range(5)] == [0, 1, 1, 1, 1]

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 5).flatmap(lambda n: st.tuples(
        st.just(n), st.dictionaries(st.integers(0, (1 << n) - 1), st.integers(-5, 5), max_size=8))))
    def test_matches_permutation_average(self, args):
        n, terms = args
        p = poly(n, terms)
        q = symmetrize(p)
        for x in range(1 << n):
            assert q(bin(x).count("1")) == brute_force_symmetrization(p, x)

    def test_brute_force_oracle_by_hand(self):
        # average of x_0 over permutations at x = 100 is 1/3
        p = poly(3, {1: 1})
        assert brute_force_symmetrization(p, 1) == F(1, 3)

    def test_degree_never_grows(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            n = int(rng.integers(1, 7))
            masks = rng.integers(0, 1 << n, size=int(rng.integers(0, 6)))
            p = poly(n, {int(m): int(rng.integers(-3, 4)) for m in masks})
            if p.is_zero():
                continue
            assert symmetrize(p).degree() <= p.degree()


class TestApproximation:
    def test_and2_degree1(self):
        res = lp_min_error(from_family("AND", 2), 1)
        assert res.feasible and res.min_error <= F(1, 3)
        assert res.witness.degree() <= 1
        # the hand-written approximation (x0 + x1) / 3 also meets the bound
        hand = poly(2, {1: F(1, 3), 2: F(1, 3)})
        f = from_family("AND", 2)
        assert max(abs(hand.evaluate(x) - f(x)) for x in range(4)) == F(1, 3)
        assert not hand.represents(f)

    def test_and2_degree0(self):
        assert lp_min_error(from_family("AND", 2), 0).min_error == F(1, 2)

    def test_parity4_degree3(self):
        assert lp_min_error(from_family("PARITY", 4), 3).min_error >= F(1, 2)

    def test_approx_degree_examples(self):
        assert approx_degree(from_family("AND", 2)) == 1
        for n in (2, 3, 4):
            assert approx_degree(from_family("PARITY", n)) == n
        assert approx_degree(TruthTable(3, [1] * 8)) == 0

    def test_monotone_in_d_and_witness(self):
        rng = np.random.default_rng(5)
        for _ in range(6):
            f = TruthTable(3, rng.integers(0, 2, 8))
            errs = []
            for d in range(4):
                r = lp_min_error(f, d)
                errs.append(r.min_error)
                assert r.witness.degree() <= d
                assert r.witness_error(f.table) == r.min_error
            assert errs == sorted(errs, reverse=True)
            assert errs[-1] == 0

    def test_against_float_lp(self):
        rng = np.random.default_rng(8)
        fs = [TruthTable(4, rng.integers(0, 2, 16)) for _ in range(4)] + [from_family("OR", 4)]
        for f in fs:
            for d in range(5):
                exact = lp_min_error(f, d).min_error
                assert abs(float(exact) - lp_oracle(f, d)) < 1e-7

    def test_approx_at_most_degree_n3(self):
        for v in range(0, 256, 5):
            f = TruthTable.from_int(3, v)
            assert approx_degree(f) <= function_degree(f)

    def test_symmetric_examples(self):
        assert symmetric_approx_degree(symmetric_profile(from_family("OR", 4))) == 2
        assert approx_degree(from_family("OR", 4)) == 2
        assert symmetric_approx_degree(symmetric_profile(from_family("PARITY", 8))) == 8

    def test_majority4_above_gamma_floor(self):
        prof = symmetric_profile(from_family("MAJORITY", 4))
        v = symmetric_approx_degree(prof)
        # the gamma-based floor sqrt(n (n - gamma)) carries an unknown constant;
        # the LP value is checked against the general LP instead
        assert v == approx_degree(from_family("MAJORITY", 4))
        assert v >= 1

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_symmetric_agrees_with_general(self, n):
        for code in range(1 << (n + 1)):
            prof = SymmetricProfile(n, tuple((code >> k) & 1 for k in range(n + 1)))
            assert symmetric_approx_degree(prof) == approx_degree(prof.to_truth_table())

    def test_symmetric_witness(self):
        prof = symmetric_profile(from_family("MAJORITY", 6))
        r = symmetric_lp_min_error(prof, 3)
        assert all(abs(r.witness(k) - prof.values[k]) <= r.min_error for k in range(7))


class TestSimplex:
    def test_small_lp(self):
        # min -x - y s.t. x + 2y <= 4, 3x + y <= 6
        sol = simplex.solve([F(-1), F(-1)], [[1, 2], [3, 1]], [4, 6])
        assert sol.status == "optimal"
        assert sol.value == F(-14, 5)
        assert sol.x == [F(8, 5), F(6, 5)]

    def test_free_variable_and_negative_rhs(self):
        # min x s.t. -x <= 3  (x >= -3), x free
        sol = simplex.solve([F(1)], [[-1]], [3], free=(0,))
        assert sol.value == -3

    def test_infeasible(self):
        sol = simplex.solve([F(1)], [[1], [-1]], [-1, -1])
        assert sol.status == "infeasible"

    def test_unbounded(self):
        sol = simplex.solve([F(-1)], [[-1]], [0])
        assert sol.status == "unbounded"


class TestMarkov:
    def test_examples(self):
        for b in (4, 9, 16):
            assert markov_bound(0, 1, F(1, 3), b) == pytest.approx(math.sqrt(b / 4))
        assert markov_bound(0, 0, 1, 7) == pytest.approx(math.sqrt(7))
        assert markov_bound(0, 1, F(1, 3), 16) == pytest.approx(2)

    def test_errors(self):
        with pytest.raises(DomainError):
            markov_bound(0, 1, 0, 4)


class TestRestrictBlocks:
    def test_or_singletons(self):
        p = interpolate(from_family("OR", 4))
        q = restrict_blocks(p, "0000", [[0], [1], [2], [3]])
        assert q == p

    def test_empty_blocks(self):
        p = interpolate(from_family("MAJORITY", 3))
        q = restrict_blocks(p, "110", [])
        assert q == MultilinearPoly.constant(0, 1)

    def test_parity_pairs(self):
        p = interpolate(from_family("PARITY", 4))
        q = restrict_blocks(p, "0000", [[0, 1], [2, 3]])
        assert q.is_zero()

    def test_overlap(self):
        with pytest.raises(ParameterError):
            restrict_blocks(interpolate(from_family("OR", 3)), "000", [[0, 1], [1, 2]])

    def test_substitution_semantics(self):
        # q(Y) = p(Z) where block i is flipped exactly when y_i = 1
        rng = np.random.default_rng(2)
        for _ in range(10):
            f = TruthTable(5, rng.integers(0, 2, 32))
            p = interpolate(f)
            x = int(rng.integers(0, 32))
            blocks = [[0, 3], [1], [4]]
            q = restrict_blocks(p, x, blocks)
            assert q.degree() <= p.degree()
            for y in range(8):
                z = x
                for i, blk in enumerate(blocks):
                    if y >> i & 1:
                        for j in blk:
                            z ^= 1 << j
                assert q.evaluate(y) == f(z)
