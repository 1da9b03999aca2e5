"""Verification suites behind the command line: exhaustive/sampled enumeration of
measure inequalities, the algorithm-A sweep, the prime-size degree check, the
gamma table and the query-complexity table.
"""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import algorithms as alg
from .boolfn import FAMILIES, SymmetricProfile, TruthTable, from_family, gamma, symmetric_profile
from .errors import ParameterError
from .measures import CHECK_NAMES, AlgorithmContext, algorithm_A, bound_report
from .polynomial import GENERAL_LP_MAX_N, approx_degree, function_degree, symmetric_approx_degree
from .qsim.numeric import check_bounded_error, check_exact, check_zero_error
from .qsim.symbolic import zero_error_witness_poly

SOURCES = ("exhaustive", "families", "sampled")
EXHAUSTIVE_MAX_N = 4
CSV_COLUMNS = ("index", "n", "bits", "deg", "adeg", "bs", "c", "c0", "c1", "d", "monotone") + CHECK_NAMES


@dataclass
class SuiteConfig:
    n_values: tuple
    source: str = "exhaustive"
    include_adeg: bool = True
    sample_count: int = 1000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        self.n_values = tuple(int(n) for n in self.n_values)
        if self.source not in SOURCES:
            raise ParameterError(f"source must be one of {SOURCES}")
        if not self.n_values or min(self.n_values) < 1:
            raise ParameterError("n values must be >= 1")
        if self.source == "exhaustive" and max(self.n_values) > EXHAUSTIVE_MAX_N:
            raise ParameterError(f"exhaustive enumeration needs n <= {EXHAUSTIVE_MAX_N}")
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")


def default_workers() -> int:
    return os.cpu_count() or 1


# ---------------------------------------------------------------- NPN classes

def _transform_maps(n: int):
    """Position maps for every input permutation and input negation mask."""
    idx = np.arange(1 << n)
    bits = (idx[:, None] >> np.arange(n)) & 1
    for perm in itertools.permutations(range(n)):
        permuted = (bits[:, list(perm)] << np.arange(n)).sum(axis=1)
        for neg in range(1 << n):
            yield permuted ^ neg


def npn_canonical(n: int) -> np.ndarray:
    """Smallest table integer in the NPN orbit of every function of n <= 4 variables.

    Approximate degree is invariant under permuting inputs, negating inputs and
    negating the output, so it only has to be computed once per orbit.
    """
    if n > EXHAUSTIVE_MAX_N:
        raise ParameterError(f"NPN classes are enumerated for n <= {EXHAUSTIVE_MAX_N}")
    size = 1 << n
    values = np.arange(1 << size, dtype=np.int64)
    table_bits = ((values[:, None] >> np.arange(size)) & 1).astype(np.int64)
    weights = np.int64(1) << np.arange(size, dtype=np.int64)
    full = (np.int64(1) << size) - 1
    best = values.copy()
    for pos in _transform_maps(n):
        v = table_bits[:, pos] @ weights
        np.minimum(best, v, out=best)
        np.minimum(best, full ^ v, out=best)
    return best


def _adeg_of_int(args) -> int:
    n, value = args
    return approx_degree(TruthTable.from_int(n, int(value)))


def _pool_map(fn, items, workers: int) -> list:
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def exhaustive_adeg(n: int, workers: int = 1) -> np.ndarray:
    canon = npn_canonical(n)
    reps = np.unique(canon)
    degs = _pool_map(_adeg_of_int, [(n, int(r)) for r in reps], workers)
    lookup = dict(zip(reps.tolist(), degs))
    return np.array([lookup[c] for c in canon.tolist()], dtype=np.int64)


# ---------------------------------------------------------------- enumeration

def _row(index: int, f: TruthTable, adeg: Optional[int]) -> dict:
    r = bound_report(f, adeg=adeg, include_adeg=False)
    row = {"index": index, "n": f.n, "bits": f.to_json()["bits"], "deg": r.deg,
           "adeg": r.adeg, "bs": r.bs, "c": r.c, "c0": r.c0, "c1": r.c1, "d": r.d,
           "monotone": int(r.monotone)}
    for name in CHECK_NAMES:
        row[name] = None if name not in r.flags else int(r.flags[name])
    return row


def _rows_chunk(args) -> list:
    n, start, tables, adegs = args
    return [_row(start + k, TruthTable(n, t), None if a < 0 else int(a))
            for k, (t, a) in enumerate(zip(tables, adegs))]


def _functions(cfg: SuiteConfig, n: int):
    """(index base, list of tables, list of adeg or -1) for one n."""
    if cfg.source == "exhaustive":
        vals = np.arange(1 << (1 << n), dtype=np.int64)
        tables = ((vals[:, None] >> np.arange(1 << n)) & 1).astype(np.uint8)
        adegs = exhaustive_adeg(n, cfg.workers) if cfg.include_adeg else np.full(vals.size, -1)
        return tables, adegs
    if cfg.source == "sampled":
        rng = np.random.default_rng([cfg.seed, n])
        tables = rng.integers(0, 2, size=(cfg.sample_count, 1 << n), dtype=np.uint8)
        adegs = np.full(len(tables), -1)
        if cfg.include_adeg and n <= GENERAL_LP_MAX_N:
            adegs = np.array(_pool_map(_adeg_of_int, [(n, TruthTable(n, t).to_int()) for t in tables],
                                       cfg.workers))
        return tables, adegs
    fams = [from_family(fam, n) for fam in FAMILIES if fam != "THRESHOLD"]
    fams += [from_family("THRESHOLD", n, m) for m in range(1, n + 1)]
    tables = np.array([f.table for f in fams])
    adegs = np.full(len(fams), -1)
    if cfg.include_adeg:
        adegs = np.array([symmetric_approx_degree(symmetric_profile(f)) for f in fams])
    return tables, adegs


def enumerate_rows(cfg: SuiteConfig) -> list[dict]:
    """One row per function, ordered by n then function index (deterministic merge)."""
    rows = []
    for n in cfg.n_values:
        tables, adegs = _functions(cfg, n)
        step = max(1, math.ceil(len(tables) / (8 * cfg.workers)))
        chunks = [(n, s, tables[s:s + step], adegs[s:s + step]) for s in range(0, len(tables), step)]
        for part in _pool_map(_rows_chunk, chunks, cfg.workers):
            rows.extend(part)
    return rows


def violation_counts(rows: list[dict]) -> dict:
    return {name: sum(1 for r in rows if r[name] == 0) for name in CHECK_NAMES}


def checked_counts(rows: list[dict]) -> dict:
    return {name: sum(1 for r in rows if r[name] is not None) for name in CHECK_NAMES}


# ---------------------------------------------------------------- algorithm A sweep

@dataclass
class AlgorithmASweep:
    n: int
    pairs: int
    wrong: int
    over_budget: int
    max_ratio: float

    @property
    def passed(self) -> bool:
        return self.wrong == 0 and self.over_budget == 0


def _alg_a_chunk(args):
    n, values = args
    pairs = wrong = over = 0
    ratio = 0.0
    for v in values:
        f = TruthTable.from_int(n, int(v))
        ctx = AlgorithmContext.build(f)
        budget = ctx.c1 * ctx.bs
        for x in range(1 << n):
            bit, q, _ = algorithm_A(f, x, ctx)
            pairs += 1
            wrong += int(bit != f.table[x])
            over += q > budget
            if budget:
                ratio = max(ratio, q / budget)
    return pairs, wrong, over, ratio


def algorithm_a_sweep(n: int, workers: int = 1) -> AlgorithmASweep:
    """Run algorithm A on every (f, x) with f ranging over all functions of n bits."""
    if n > EXHAUSTIVE_MAX_N:
        raise ParameterError(f"the sweep enumerates all functions; n <= {EXHAUSTIVE_MAX_N}")
    vals = np.arange(1 << (1 << n))
    parts = np.array_split(vals, max(1, 8 * workers))
    res = _pool_map(_alg_a_chunk, [(n, p) for p in parts if p.size], workers)
    return AlgorithmASweep(n, sum(r[0] for r in res), sum(r[1] for r in res),
                           sum(r[2] for r in res), max(r[3] for r in res))


# ---------------------------------------------------------------- symmetric functions

def is_prime(k: int) -> bool:
    return k >= 2 and all(k % d for d in range(2, math.isqrt(k) + 1))


@dataclass
class PrimeCaseResult:
    n: int
    n_plus_1_prime: bool
    functions: int
    min_degree: int
    below_n: int

    @property
    def passed(self) -> bool:
        return self.below_n == 0


def symmetric_degree_check(n: int) -> PrimeCaseResult:
    """Degree of every non-constant symmetric function of n variables."""
    lowest, below, count = n, 0, 0
    for code in range(1, (1 << (n + 1)) - 1):
        prof = SymmetricProfile(n, tuple((code >> k) & 1 for k in range(n + 1)))
        d = function_degree(prof.to_truth_table())
        count += 1
        lowest = min(lowest, d)
        below += d < n
    return PrimeCaseResult(n, is_prime(n + 1), count, lowest, below)


def gamma_rows(n_values) -> list[dict]:
    """Gamma of the standard families plus the constant-free threshold bound."""
    rows = []
    for n in n_values:
        for fam in ("OR", "AND", "PARITY", "MAJORITY"):
            g = gamma(symmetric_profile(from_family(fam, n)))
            rows.append({"family": fam, "n": n, "m": None, "gamma": g,
                         "bound (constant-free)": math.sqrt(n * (n - g))})
        for m in range(1, n + 1):
            g = gamma(symmetric_profile(from_family("THRESHOLD", n, m)))
            rows.append({"family": "THRESHOLD", "n": n, "m": m, "gamma": g,
                         "bound (constant-free)": math.sqrt(m * (n - m + 1))})
    return rows


# ---------------------------------------------------------------- query-complexity table

@dataclass
class Table1Row:
    function: str
    n: int
    setting: str
    lower: Optional[float]
    lower_source: str
    upper: Optional[int]
    upper_source: str
    verified: Optional[bool] = None
    extra: dict = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        ok = self.verified is not False
        if self.lower is not None and self.upper is not None:
            ok = ok and self.lower <= self.upper + 1e-9
        return ok

    @property
    def tight(self) -> bool:
        return self.lower is not None and self.upper is not None and abs(self.lower - self.upper) < 1e-9

    def to_json(self) -> dict:
        d = asdict(self)
        d["tight"] = self.tight
        d["consistent"] = self.consistent
        return d


def _parity_rows(n: int) -> list[Table1Row]:
    f = from_family("PARITY", n)
    c = alg.parity_circuit(n)
    q = c.query_count()
    lower = function_degree(f) / 2
    adeg = symmetric_approx_degree(symmetric_profile(f))
    zc = alg.with_conclusive_flag(c)
    return [
        Table1Row("PARITY", n, "exact", lower, "deg/2", q, "parity circuit",
                  check_exact(c, f).passed),
        Table1Row("PARITY", n, "zero-error", adeg / 2, "adeg/2", q, "parity circuit + flag",
                  check_zero_error(zc, f).passed),
        Table1Row("PARITY", n, "bounded-error", adeg / 2, "adeg/2", q, "parity circuit",
                  check_bounded_error(c, f).passed),
    ]


def _or_zero_rows(n: int) -> list[Table1Row]:
    """Exact and zero-error OR need n queries; checked on the read-all circuit."""
    f = from_family("OR", n)
    zc = alg.or_zero_error_circuit(n)
    _, wdeg, _ = zero_error_witness_poly(zc, f)
    q = zc.query_count()
    lower = function_degree(f)
    return [
        Table1Row("OR", n, "exact", lower, "deg(OR)", q, "read-all circuit",
                  check_exact(zc, f).passed, {"witness_degree": wdeg}),
        Table1Row("OR", n, "zero-error", lower, "deg(OR), witness polynomial", q,
                  "read-all circuit", check_zero_error(zc, f).passed and wdeg == n,
                  {"witness_degree": wdeg}),
    ]


def _or_rows(n: int) -> list[Table1Row]:
    f = from_family("OR", n)
    rows = []
    adeg = symmetric_approx_degree(symmetric_profile(f))
    if n in alg.GROVER_SIZES:
        g = alg.grover_or(n)
        succ = g.success_probabilities()
        rows.append(Table1Row("OR", n, "bounded-error", adeg / 2, "adeg/2", g.schedule.budget,
                              f"Grover schedule {list(g.schedule.iterations)}",
                              bool(succ.min() >= 2 / 3 - 1e-9), {"min_success": float(succ.min())}))
    else:
        rows.append(Table1Row("OR", n, "bounded-error", adeg / 2, "adeg/2", None, "reported only"))
    return rows


def _majority_rows(n: int) -> list[Table1Row]:
    prof = symmetric_profile(from_family("MAJORITY", n))
    g = gamma(prof)
    adeg = symmetric_approx_degree(prof)
    return [Table1Row("MAJORITY", n, "bounded-error", adeg / 2, "adeg/2", None, "reported only",
                      None, {"gamma": g, "bound (constant-free)": math.sqrt(n * (n - g))})]


def table1(parity_n: int = 8, or_n: int = 8, majority_n: int = 8,
           or_zero_n: int = 4) -> list[Table1Row]:
    """Rows for PARITY, OR and MAJORITY. The OR exact/zero-error rows use the
    read-all circuit, whose symbolic expansion limits ``or_zero_n`` to 4."""
    if not 1 <= or_zero_n <= 4:
        raise ParameterError("or_zero_n must be in 1..4")
    return (_parity_rows(parity_n) + _or_zero_rows(or_zero_n) + _or_rows(or_n)
            + _majority_rows(majority_n))
