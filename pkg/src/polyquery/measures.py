"""Classical query measures: block sensitivity, certificate complexity, decision-tree
depth, the certificate-driven query algorithm A, and the derived quantum lower bounds.

Subcube bookkeeping: a subcube is (free mask F, point X); only the bits of X outside
F matter. ``_SubcubeTables.lo[F, X]`` / ``hi[F, X]`` are min / max of f over it.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .boolfn import TruthTable, format_bits, parse_bits, symmetric_profile
from .errors import CapabilityError
from .polynomial import (
    GENERAL_LP_MAX_N,
    SYMMETRIC_LP_MAX_N,
    approx_degree,
    function_degree,
    symmetric_approx_degree,
)

BS_MAX_N = 12
CERT_MAX_N = 10
DT_MAX_N = 12
ALG_A_MAX_N = 10


def _check_cap(f: TruthTable, cap: int, what: str):
    if f.n > cap:
        raise CapabilityError(f"{what} is capped at n <= {cap}, got n={f.n}")


def _bits_of(mask: int, n: int) -> list[int]:
    return [i for i in range(n) if mask >> i & 1]


class _SubcubeTables:
    def __init__(self, f: TruthTable):
        n = f.n
        size = 1 << n
        idx = np.arange(size)
        lo = np.empty((size, size), dtype=np.uint8)
        hi = np.empty((size, size), dtype=np.uint8)
        lo[0] = hi[0] = f.table
        for F in range(1, size):
            v = F & -F
            G = F ^ v
            lo[F] = np.minimum(lo[G], lo[G][idx ^ v])
            hi[F] = np.maximum(hi[G], hi[G][idx ^ v])
        self.n = n
        self.lo = lo
        self.hi = hi

    def constant(self) -> np.ndarray:
        return self.lo == self.hi


@lru_cache(maxsize=16)
def _tables(f: TruthTable) -> _SubcubeTables:
    return _SubcubeTables(f)


# ---------------------------------------------------------------- block sensitivity

@dataclass
class BsWitness:
    value: int
    input: str
    blocks: list[list[int]]

    def verify(self, f: TruthTable) -> bool:
        seen = set()
        x = parse_bits(self.input, f.n)
        for blk in self.blocks:
            if seen & set(blk) or not blk:
                return False
            seen |= set(blk)
            flip = sum(1 << j for j in blk)
            if f.table[x] == f.table[x ^ flip]:
                return False
        return len(self.blocks) == self.value


def minimal_sensitive_blocks(f: TruthTable) -> np.ndarray:
    """Boolean matrix M[X, S]: S is an inclusion-minimal sensitive block of f at X."""
    n, size = f.n, 1 << f.n
    idx = np.arange(size)
    t = f.table
    sens = t[idx[:, None] ^ idx[None, :]] != t[:, None]
    below = np.zeros_like(sens)
    # below[X, S]: some proper subset of S is sensitive at X
    sub = sens.copy()
    for i in range(n):
        bit = 1 << i
        has = (idx & bit) != 0
        sub[:, has] |= sub[:, idx[has] ^ bit]
    for i in range(n):
        bit = 1 << i
        has = (idx & bit) != 0
        below[:, has] |= sub[:, idx[has] ^ bit]
    return sens & ~below


def max_disjoint_packing(blocks: list[int]) -> tuple[int, tuple[int, ...]]:
    """Largest family of pairwise disjoint masks drawn from ``blocks`` (exact search)."""
    blocks = sorted(set(blocks))

    @lru_cache(maxsize=None)
    def go(avail: int) -> tuple[int, tuple[int, ...]]:
        cands = [b for b in blocks if b & ~avail == 0]
        if not cands:
            return 0, ()
        union = 0
        for b in cands:
            union |= b
        v = union & -union
        best = go(avail & ~v)
        for b in cands:
            if b & v:
                k, rest = go(avail & ~b)
                if k + 1 > best[0]:
                    best = (k + 1, (b,) + rest)
        return best

    full = 0
    for b in blocks:
        full |= b
    return go(full)


def block_sensitivity_at(f: TruthTable, x) -> tuple[int, list[int]]:
    xi = parse_bits(x, f.n)
    minimal = np.flatnonzero(minimal_sensitive_blocks(f)[xi])
    k, chosen = max_disjoint_packing([int(b) for b in minimal])
    return k, list(chosen)


def block_sensitivity(f: TruthTable) -> BsWitness:
    _check_cap(f, BS_MAX_N, "block_sensitivity")
    minimal = minimal_sensitive_blocks(f)
    best = (0, 0, ())
    for x in range(1 << f.n):
        cands = np.flatnonzero(minimal[x])
        if cands.size == 0:
            continue
        union = int(np.bitwise_or.reduce(cands))
        if bin(union).count("1") <= best[0]:
            continue
        k, chosen = max_disjoint_packing([int(b) for b in cands])
        if k > best[0]:
            best = (k, x, chosen)
    k, x, chosen = best
    blocks = [_bits_of(b, f.n) for b in sorted(chosen)]
    return BsWitness(k, format_bits(x, f.n), blocks)


# ---------------------------------------------------------------- certificates

@dataclass
class CertReport:
    c: int
    c0: int
    c1: int
    per_input: dict = field(default_factory=dict)  # bit string -> {index: value}

    def verify(self, f: TruthTable) -> bool:
        size = 1 << f.n
        for xs, cert in self.per_input.items():
            x = parse_bits(xs, f.n)
            want = f.table[x]
            for y in range(size):
                if all((y >> i & 1) == b for i, b in cert.items()) and f.table[y] != want:
                    return False
            if any((x >> i & 1) != b for i, b in cert.items()):
                return False
        return True


def certificate_sizes(f: TruthTable) -> np.ndarray:
    """C_X(f) for every X."""
    tabs = _tables(f)
    const = tabs.constant()
    n = f.n
    free_size = np.array([bin(F).count("1") for F in range(1 << n)])
    best_free = np.where(const, free_size[:, None], -1).max(axis=0)
    return n - best_free


def certificate_complexity(f: TruthTable, witnesses: bool = True) -> CertReport:
    _check_cap(f, CERT_MAX_N, "certificate_complexity")
    n = f.n
    sizes = certificate_sizes(f)
    ones = f.table == 1
    c1 = int(sizes[ones].max()) if ones.any() else 0
    c0 = int(sizes[~ones].max()) if (~ones).any() else 0
    per_input = {}
    if witnesses:
        const = _tables(f).constant()
        for x in range(1 << n):
            s = int(sizes[x])
            # lexicographically first fixed set of the minimum size
            fixed_sets = sorted(
                (_bits_of(((1 << n) - 1) ^ F, n) for F in range(1 << n)
                 if const[F, x] and bin(F).count("1") == n - s)
            )
            per_input[format_bits(x, n)] = {i: (x >> i) & 1 for i in fixed_sets[0]}
    return CertReport(max(c0, c1), c0, c1, per_input)


# ---------------------------------------------------------------- decision trees

def decision_tree_depth(f: TruthTable) -> int:
    """Exact D(f) by minimax over all subcubes, processed in order of free mask."""
    _check_cap(f, DT_MAX_N, "decision_tree_depth")
    n, size = f.n, 1 << f.n
    idx = np.arange(size)
    const = _tables(f).constant() if n <= CERT_MAX_N else _SubcubeTables(f).constant()
    depth = np.zeros((size, size), dtype=np.int8)
    for F in range(1, size):
        best = np.full(size, 127, dtype=np.int8)
        for v in _bits_of(F, n):
            G = F ^ (1 << v)
            best = np.minimum(best, np.maximum(depth[G], depth[G][idx ^ (1 << v)]))
        depth[F] = np.where(const[F], 0, best + 1)
    return int(depth[size - 1, 0])


# ---------------------------------------------------------------- algorithm A

@dataclass
class AlgorithmContext:
    """Per-function data reused across many runs of algorithm A."""

    f: TruthTable
    bs: int
    c1: int
    certificates: list  # (fixed mask, assignment bits) of 1-certificates in pick order

    @classmethod
    def build(cls, f: TruthTable, bs: Optional[int] = None, c1: Optional[int] = None):
        _check_cap(f, ALG_A_MAX_N, "algorithm_A")
        n, full = f.n, (1 << f.n) - 1
        lo = _tables(f).lo
        certs = set()
        for F in range(1 << n):
            S = full ^ F
            for x in np.flatnonzero(lo[F] == 1):
                certs.add((S, int(x) & S))

        def key(c):
            S, a = c
            pos = _bits_of(S, n)
            return (len(pos), pos, [a >> i & 1 for i in pos])

        if bs is None:
            bs = block_sensitivity(f).value
        if c1 is None:
            c1 = certificate_complexity(f, witnesses=False).c1
        return cls(f, bs, c1, sorted(certs, key=key))


def algorithm_A(f: TruthTable, x, context: Optional[AlgorithmContext] = None):
    """Deterministic query algorithm with at most C1(f) * bs(f) queries.

    Returns ``(f(x), queries, transcript)``. Each stage picks the first 1-certificate
    consistent with everything queried so far (smallest size, then variable set, then
    assignment), queries its unknown variables and accepts if they all agree. After
    bs(f) stages it answers with f of the smallest input consistent with the queries.
    """
    ctx = context if context is not None else AlgorithmContext.build(f)
    n = f.n
    xi = parse_bits(x, n)
    known = 0
    transcript = []
    # a constant function has bs = 0 but still gets one (query-free) stage
    for _ in range(max(ctx.bs, 1)):
        pick = next(((S, a) for S, a in ctx.certificates if (a ^ xi) & S & known == 0), None)
        if pick is None:
            transcript.append({"certificate": None, "queried": []})
            return 0, bin(known).count("1"), transcript
        S, a = pick
        new = S & ~known
        known |= new
        transcript.append({
            "certificate": {i: a >> i & 1 for i in _bits_of(S, n)},
            "queried": _bits_of(new, n),
        })
        if (a ^ xi) & S == 0:
            return 1, bin(known).count("1"), transcript
    y = xi & known
    transcript.append({"fallback": format_bits(y, n)})
    return int(f.table[y]), bin(known).count("1"), transcript


# ---------------------------------------------------------------- bound report

CHECK_NAMES = (
    "C1<=C",
    "C<=bs^2",
    "D<=C1*bs",
    "D<=bs^3",
    "deg<=D",
    "D<=n",
    "D<=2deg^4",
    "adeg<=deg",
    "adeg<=D",
    "bs<=6adeg^2",
    "D<=216adeg^6",
    "monotone:bs==C",
)


def inequality_flags(n, deg, adeg, bs, c, c1, d, monotone) -> dict:
    """Evaluate every checked inequality; entries needing a missing measure are omitted."""
    flags = {
        "C1<=C": c1 <= c,
        "C<=bs^2": c <= bs ** 2,
        "D<=C1*bs": d <= c1 * bs,
        "D<=bs^3": d <= bs ** 3,
        "deg<=D": deg <= d,
        "D<=n": d <= n,
        "D<=2deg^4": d <= 2 * deg ** 4,
    }
    if adeg is not None:
        flags["adeg<=deg"] = adeg <= deg
        flags["adeg<=D"] = adeg <= d
        flags["bs<=6adeg^2"] = bs <= 6 * adeg ** 2
        flags["D<=216adeg^6"] = d <= 216 * adeg ** 6
    if monotone:
        flags["monotone:bs==C"] = bs == c
    return flags


@dataclass
class BoundReport:
    n: int
    deg: int
    adeg: Optional[int]
    bs: int
    c: int
    c0: int
    c1: int
    d: int
    monotone: bool
    q_exact_lower: float
    q_bounded_lower: Optional[float]
    flags: dict
    derived: dict = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return all(self.flags.values())

    def to_json(self) -> dict:
        return asdict(self)

    MD_COLUMNS = ("n", "deg", "adeg", "bs", "c", "c0", "c1", "d", "q_exact_lower",
                  "q_bounded_lower", "all_pass")

    @classmethod
    def markdown_header(cls) -> str:
        return "| " + " | ".join(cls.MD_COLUMNS) + " |\n|" + "---|" * len(cls.MD_COLUMNS)

    def markdown_row(self) -> str:
        cells = []
        for col in self.MD_COLUMNS:
            v = getattr(self, col)
            if isinstance(v, float):
                v = f"{v:.4g}"
            cells.append("-" if v is None else str(v))
        return "| " + " | ".join(cells) + " |"


def adeg_if_available(f: TruthTable) -> Optional[int]:
    if f.n <= GENERAL_LP_MAX_N:
        return approx_degree(f)
    prof = symmetric_profile(f)
    if prof is not None and f.n <= SYMMETRIC_LP_MAX_N:
        return symmetric_approx_degree(prof)
    return None


def lower_bounds(deg: int, adeg: Optional[int], bs: int) -> tuple[float, Optional[float]]:
    q_exact = max(deg / 2, math.sqrt(bs / 8))
    q_bounded = None if adeg is None else max(adeg / 2, math.sqrt(bs / 16))
    return q_exact, q_bounded


def bound_report(f: TruthTable, adeg: Optional[int] = None, include_adeg: bool = True) -> BoundReport:
    deg = function_degree(f)
    if adeg is None and include_adeg:
        adeg = adeg_if_available(f)
    bs = block_sensitivity(f).value
    cert = certificate_complexity(f, witnesses=False)
    d = decision_tree_depth(f)
    mono = f.is_monotone()
    q_exact, q_bounded = lower_bounds(deg, adeg, bs)
    if q_bounded is None:
        q_bounded = math.sqrt(bs / 16)
    derived = {
        # reported arithmetic only: Q_E and Q_2 are not computed
        "Q_E>=(D/32)^(1/4)": (d / 32) ** 0.25,
    }
    if mono:
        derived["monotone:Q_2>=(D/256)^(1/4)"] = (d / 256) ** 0.25
    flags = inequality_flags(f.n, deg, adeg, bs, cert.c, cert.c1, d, mono)
    return BoundReport(f.n, deg, adeg, bs, cert.c, cert.c0, cert.c1, d, mono,
                       q_exact, q_bounded, flags, derived)
