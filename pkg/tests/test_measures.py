import itertools
import json

import numpy as np
import pytest

from polyquery.boolfn import TruthTable, from_family, restrict
from polyquery.errors import CapabilityError
from polyquery.measures import (
    CHECK_NAMES,
    AlgorithmContext,
    algorithm_A,
    block_sensitivity,
    block_sensitivity_at,
    bound_report,
    certificate_complexity,
    decision_tree_depth,
    inequality_flags,
    max_disjoint_packing,
)


# ---------------------------------------------------------------- oracles

def bs_oracle(f: TruthTable) -> int:
    """Largest family of disjoint sensitive blocks, searched over all blocks directly."""
    n = f.n
    best = 0
    for x in range(1 << n):
        sens = [b for b in range(1, 1 << n) if f(x ^ b) != f(x)]

        def grow(avail, start):
            top = 0
            for k in range(start, len(sens)):
                b = sens[k]
                if b & avail == b:
                    top = max(top, 1 + grow(avail & ~b, k + 1))
            return top

        best = max(best, grow((1 << n) - 1, 0))
    return best


def cert_oracle(f: TruthTable) -> tuple[int, int, int]:
    n = f.n
    sizes = []
    for x in range(1 << n):
        for size in range(n + 1):
            found = False
            for S in itertools.combinations(range(n), size):
                mask = sum(1 << i for i in S)
                if all(f(y) == f(x) for y in range(1 << n) if (y ^ x) & mask == 0):
                    found = True
                    break
            if found:
                sizes.append((int(f(x)), size))
                break
    c0 = max((s for v, s in sizes if v == 0), default=0)
    c1 = max((s for v, s in sizes if v == 1), default=0)
    return max(c0, c1), c0, c1


def dt_oracle(f: TruthTable) -> int:
    if f.is_constant():
        return 0
    return 1 + min(max(dt_oracle(restrict(f, i, b)) for b in (0, 1)) for i in range(f.n))


def random_tables(n, count, seed):
    rng = np.random.default_rng(seed)
    return [TruthTable(n, rng.integers(0, 2, 1 << n)) for _ in range(count)]


# ---------------------------------------------------------------- block sensitivity

class TestBlockSensitivity:
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 6])
    def test_or(self, n):
        w = block_sensitivity(from_family("OR", n))
        assert w.value == n
        assert w.input == "0" * n
        assert sorted(w.blocks) == [[i] for i in range(n)]

    def test_constant(self):
        assert block_sensitivity(TruthTable(3, [1] * 8)).value == 0

    def test_parity4(self):
        assert block_sensitivity(from_family("PARITY", 4)).value == 4
        assert bs_oracle(from_family("PARITY", 4)) == 4

    def test_against_oracle_n3_all(self):
        for v in range(256):
            f = TruthTable.from_int(3, v)
            assert block_sensitivity(f).value == bs_oracle(f)

    def test_against_oracle_n4_sample(self):
        for f in random_tables(4, 40, 1):
            w = block_sensitivity(f)
            assert w.value == bs_oracle(f)
            assert w.verify(f)

    def test_majority(self):
        # majority of 5 at weight 2: three single-bit flips are disjoint and sensitive
        assert block_sensitivity(from_family("MAJORITY", 5)).value == 3

    def test_packing(self):
        assert max_disjoint_packing([0b0011, 0b0110, 0b1100, 0b1000])[0] == 2

    def test_at_input(self):
        value, blocks = block_sensitivity_at(from_family("OR", 3), "100")
        assert value == 1

    def test_cap(self):
        with pytest.raises(CapabilityError):
            block_sensitivity(from_family("OR", 13))


# ---------------------------------------------------------------- certificates

class TestCertificates:
    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_or(self, n):
        r = certificate_complexity(from_family("OR", n))
        assert r.c1 == 1
        assert r.c == n
        assert r.c0 == n

    def test_parity4(self):
        r = certificate_complexity(from_family("PARITY", 4))
        assert (r.c, r.c0, r.c1) == (4, 4, 4)

    def test_against_oracle_n3_all(self):
        for v in range(256):
            f = TruthTable.from_int(3, v)
            r = certificate_complexity(f)
            assert (r.c, r.c0, r.c1) == cert_oracle(f)
            assert r.verify(f)

    def test_against_oracle_n4_sample(self):
        for f in random_tables(4, 25, 2):
            r = certificate_complexity(f)
            assert (r.c, r.c0, r.c1) == cert_oracle(f)

    def test_cap(self):
        with pytest.raises(CapabilityError):
            certificate_complexity(from_family("OR", 11))


# ---------------------------------------------------------------- decision trees

class TestDecisionTree:
    @pytest.mark.parametrize("n", [1, 3, 5, 8])
    def test_families(self, n):
        assert decision_tree_depth(from_family("OR", n)) == n
        assert decision_tree_depth(from_family("PARITY", n)) == n

    def test_constant(self):
        assert decision_tree_depth(TruthTable(4, [0] * 16)) == 0

    def test_dictator(self):
        f = TruthTable(3, [(x >> 1) & 1 for x in range(8)])
        assert decision_tree_depth(f) == 1

    def test_against_oracle(self):
        for v in range(256):
            f = TruthTable.from_int(3, v)
            assert decision_tree_depth(f) == dt_oracle(f)
        for f in random_tables(4, 30, 3):
            assert decision_tree_depth(f) == dt_oracle(f)

    def test_cap(self):
        with pytest.raises(CapabilityError):
            decision_tree_depth(from_family("OR", 13))


# ---------------------------------------------------------------- algorithm A

class TestAlgorithmA:
    def test_or4_zero(self):
        bit, q, transcript = algorithm_A(from_family("OR", 4), "0000")
        assert (bit, q) == (0, 4)
        stages = [t for t in transcript if "queried" in t]
        assert len(stages) == 4
        assert [s["queried"] for s in stages] == [[0], [1], [2], [3]]
        assert [s["certificate"] for s in stages] == [{0: 1}, {1: 1}, {2: 1}, {3: 1}]

    def test_or4_first_bit(self):
        bit, q, transcript = algorithm_A(from_family("OR", 4), "1000")
        assert bit == 1 and q == 1
        assert transcript[0]["certificate"] == {0: 1}

    def test_constant_one(self):
        bit, q, transcript = algorithm_A(TruthTable(3, [1] * 8), "101")
        assert (bit, q) == (1, 0)
        assert transcript[0]["certificate"] == {} and transcript[0]["queried"] == []

    def test_constant_zero(self):
        bit, q, _ = algorithm_A(TruthTable(2, [0] * 4), "11")
        assert (bit, q) == (0, 0)

    def test_all_n3(self):
        for v in range(256):
            f = TruthTable.from_int(3, v)
            ctx = AlgorithmContext.build(f)
            for x in range(8):
                bit, q, _ = algorithm_A(f, x, ctx)
                assert bit == f(x)
                assert q <= ctx.c1 * ctx.bs


# ---------------------------------------------------------------- bound report

class TestBoundReport:
    def test_or4(self):
        r = bound_report(from_family("OR", 4))
        assert r.all_pass
        assert r.d == r.c1 * r.bs == 4
        assert r.flags["monotone:bs==C"]

    def test_parity4(self):
        r = bound_report(from_family("PARITY", 4))
        assert r.q_bounded_lower == 2
        assert r.q_exact_lower == 2
        assert not r.monotone

    def test_all_n3(self):
        for v in range(256):
            r = bound_report(TruthTable.from_int(3, v))
            assert r.all_pass, (v, r.flags)
            assert set(r.flags) <= set(CHECK_NAMES)

    def test_flags_reproducible(self):
        r = bound_report(from_family("MAJORITY", 3))
        again = inequality_flags(r.n, r.deg, r.adeg, r.bs, r.c, r.c1, r.d, r.monotone)
        assert again == r.flags

    def test_lower_bound_formulas(self):
        r = bound_report(from_family("OR", 4))
        assert r.q_exact_lower == max(r.deg / 2, (r.bs / 8) ** 0.5)
        assert r.q_bounded_lower == max(r.adeg / 2, (r.bs / 16) ** 0.5)

    def test_serialization(self):
        r = bound_report(from_family("OR", 3))
        obj = json.loads(json.dumps(r.to_json()))
        assert obj["bs"] == 3 and obj["flags"]["D<=C1*bs"] is True
        assert r.markdown_row().startswith("| 3 |")

    def test_large_n_symmetric_adeg(self):
        r = bound_report(from_family("OR", 8))
        assert r.adeg is not None and r.all_pass

    def test_violation_detected(self):
        flags = inequality_flags(4, deg=1, adeg=1, bs=1, c=3, c1=1, d=4, monotone=False)
        assert not flags["C<=bs^2"] and not flags["D<=C1*bs"]

    def test_monotone_bs_equals_c_n4(self):
        count = 0
        for v in range(1 << 16):
            f = TruthTable.from_int(4, v)
            if not f.is_monotone():
                continue
            count += 1
            assert block_sensitivity(f).value == certificate_complexity(f, witnesses=False).c
        # monotone functions either way (increasing or decreasing)
        assert count > 0
