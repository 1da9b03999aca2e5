"""Exact multilinear / univariate polynomials, symmetrization and LP-based approximate degree.

Multilinear monomials are bitmasks over x_0..x_{n-1}. All arithmetic is on
``fractions.Fraction`` (the coefficient type of ``MultilinearPoly`` only needs
``+ - *`` and ``== 0``, so ring elements from :mod:`polyquery.qsim.ring` also work).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from . import simplex
from .boolfn import SymmetricProfile, TruthTable, popcounts
from .errors import CapabilityError, DomainError, ParameterError

ONE_THIRD = Fraction(1, 3)
GENERAL_LP_MAX_N = 4
SYMMETRIC_LP_MAX_N = 64


def _popcount(m: int) -> int:
    return bin(m).count("1")


class MultilinearPoly:
    """Sparse multilinear polynomial: ``{mask: coefficient}`` with no zero entries."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: Optional[dict] = None):
        self.n = n
        clean = {}
        for mask, c in (coeffs or {}).items():
            if mask >> n:
                raise ParameterError(f"monomial mask {mask:#x} uses variables beyond n={n}")
            if c != 0:
                clean[int(mask)] = c
        self.coeffs = clean

    @classmethod
    def constant(cls, n: int, c) -> "MultilinearPoly":
        return cls(n, {0: c})

    @classmethod
    def variable(cls, n: int, i: int) -> "MultilinearPoly":
        return cls(n, {1 << i: Fraction(1)})

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        return max((_popcount(m) for m in self.coeffs), default=0)

    def evaluate(self, x):
        """Value at a Boolean point (integer index or bit string) or a real vector."""
        if isinstance(x, (int, np.integer)):
            return sum((c for m, c in self.coeffs.items() if m & ~int(x) == 0), Fraction(0))
        if isinstance(x, str):
            x = [int(ch) for ch in x]
        if len(x) != self.n:
            raise ParameterError(f"expected {self.n} values, got {len(x)}")
        total = 0
        for m, c in self.coeffs.items():
            term = c
            for i in range(self.n):
                if m >> i & 1:
                    term = term * x[i]
            total = total + term
        return total

    def values(self) -> list:
        """Values on every Boolean point, by index (zeta transform)."""
        vals = [Fraction(0)] * (1 << self.n)
        for m, c in self.coeffs.items():
            vals[m] = vals[m] + c
        for i in range(self.n):
            bit = 1 << i
            for k in range(1 << self.n):
                if k & bit:
                    vals[k] = vals[k] + vals[k ^ bit]
        return vals

    def __add__(self, other):
        if not isinstance(other, MultilinearPoly):
            other = MultilinearPoly.constant(self.n, other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out[m] + c if m in out else c
        return MultilinearPoly(max(self.n, other.n), out)

    __radd__ = __add__

    def __neg__(self):
        return MultilinearPoly(self.n, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, MultilinearPoly) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultilinearPoly):
            return MultilinearPoly(self.n, {m: c * other for m, c in self.coeffs.items()})
        out: dict = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = m1 | m2  # x_i^2 = x_i on the cube
                out[m] = out[m] + c1 * c2 if m in out else c1 * c2
        return MultilinearPoly(max(self.n, other.n), out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, MultilinearPoly):
            keys = set(self.coeffs) | set(other.coeffs)
            return all(self.coeffs.get(k, 0) == other.coeffs.get(k, 0) for k in keys)
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs)))

    def map_coeffs(self, fn) -> "MultilinearPoly":
        return MultilinearPoly(self.n, {m: fn(c) for m, c in self.coeffs.items()})

    def represents(self, f: TruthTable) -> bool:
        return self.n == f.n and all(v == int(b) for v, b in zip(self.values(), f.table))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for m in sorted(self.coeffs, key=lambda m: (_popcount(m), m)):
            mono = "".join(f"x{i}" for i in range(self.n) if m >> i & 1) or "1"
            parts.append(f"({self.coeffs[m]})*{mono}" if m else f"({self.coeffs[m]})")
        return " + ".join(parts)

    def to_json(self) -> dict:
        terms = []
        for m in sorted(self.coeffs):
            c = Fraction(self.coeffs[m])
            terms.append({"mask": m, "num": str(c.numerator), "den": str(c.denominator)})
        return {"n": self.n, "terms": terms}

    @classmethod
    def from_json(cls, obj) -> "MultilinearPoly":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(
            int(obj["n"]),
            {int(t["mask"]): Fraction(int(t["num"]), int(t["den"])) for t in obj["terms"]},
        )


@dataclass(frozen=True)
class UnivariatePoly:
    coeffs: tuple = ()

    def __post_init__(self):
        cs = [Fraction(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def degree(self) -> int:
        return max(len(self.coeffs) - 1, 0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, k):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * k + c
        return acc

    def __add__(self, other: "UnivariatePoly") -> "UnivariatePoly":
        a, b = list(self.coeffs), list(other.coeffs)
        size = max(len(a), len(b))
        a += [Fraction(0)] * (size - len(a))
        b += [Fraction(0)] * (size - len(b))
        return UnivariatePoly(tuple(x + y for x, y in zip(a, b)))

    def __mul__(self, other):
        if not isinstance(other, UnivariatePoly):
            return UnivariatePoly(tuple(c * other for c in self.coeffs))
        if not self.coeffs or not other.coeffs:
            return UnivariatePoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UnivariatePoly(tuple(out))

    __rmul__ = __mul__

    def __repr__(self):
        return f"UnivariatePoly({[str(c) for c in self.coeffs]})"

    def to_json(self) -> dict:
        return {"coeffs": [[str(c.numerator), str(c.denominator)] for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj) -> "UnivariatePoly":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(tuple(Fraction(int(a), int(b)) for a, b in obj["coeffs"]))


@lru_cache(maxsize=None)
def binomial_poly(j: int) -> UnivariatePoly:
    """k -> C(k, j) in the monomial basis."""
    p = UnivariatePoly((Fraction(1),))
    for t in range(j):
        p = p * UnivariatePoly((Fraction(-t, t + 1), Fraction(1, t + 1)))
    return p


def from_binomial_basis(a: Sequence) -> UnivariatePoly:
    q = UnivariatePoly()
    for j, aj in enumerate(a):
        if aj:
            q = q + binomial_poly(j) * Fraction(aj)
    return q


def mobius_coefficients(f: TruthTable) -> np.ndarray:
    """Integer coefficients c_S = sum_{T subset S} (-1)^{|S - T|} f(T), indexed by S."""
    c = f.table.astype(np.int64)
    for i in range(f.n):
        c = c.reshape(-1, 2, 1 << i)
        c[:, 1, :] -= c[:, 0, :]
        c = c.reshape(-1)
    return c


def interpolate(f: TruthTable) -> MultilinearPoly:
    c = mobius_coefficients(f)
    return MultilinearPoly(f.n, {int(m): Fraction(int(c[m])) for m in np.flatnonzero(c)})


def degree(p: MultilinearPoly) -> tuple[int, bool]:
    """(degree, is_zero). The zero polynomial reports (0, True)."""
    return p.degree(), p.is_zero()


def function_degree(f: TruthTable) -> int:
    c = mobius_coefficients(f)
    nz = np.flatnonzero(c)
    return int(popcounts(f.n)[nz].max()) if nz.size else 0


def symmetrize(p: MultilinearPoly) -> UnivariatePoly:
    sums = [Fraction(0)] * (p.n + 1)
    for m, c in p.coeffs.items():
        sums[_popcount(m)] += c
    a = [s / math.comb(p.n, j) for j, s in enumerate(sums)]
    return from_binomial_basis(a)


def brute_force_symmetrization(p: MultilinearPoly, x: int) -> Fraction:
    """Average of p over all n! permutations of the point x (small n only)."""
    from itertools import permutations

    bits = [(x >> i) & 1 for i in range(p.n)]
    total, count = Fraction(0), 0
    for perm in permutations(range(p.n)):
        y = sum(bits[perm[i]] << i for i in range(p.n))
        total += p.evaluate(y)
        count += 1
    return total / count


@dataclass
class LpResult:
    feasible: bool
    min_error: Fraction
    witness: object = None
    degree_budget: int = 0

    def witness_error(self, target: Sequence[int]) -> Fraction:
        """Max |witness(point) - target(point)| recomputed from scratch."""
        if isinstance(self.witness, MultilinearPoly):
            vals = self.witness.values()
        else:
            vals = [self.witness(k) for k in range(len(target))]
        return max(abs(v - int(t)) for v, t in zip(vals, target))


def _min_error_lp(rows: list[list[int]], target: Sequence[int]) -> tuple[Fraction, list[Fraction]]:
    """min eps s.t. |rows[X].c - target[X]| <= eps; variables (c..., eps), c free."""
    nv = len(rows[0]) if rows else 0
    A, b = [], []
    for r, t in zip(rows, target):
        A.append(list(r) + [-1])
        b.append(t)
        A.append([-v for v in r] + [-1])
        b.append(-t)
    cost = [0] * nv + [1]
    sol = simplex.solve(cost, A, b, free=range(nv))
    if sol.status != "optimal":
        raise RuntimeError(f"approximation LP unexpectedly {sol.status}")
    return sol.value, sol.x[:nv]


def lp_min_error(f: TruthTable, d: int) -> LpResult:
    if f.n > GENERAL_LP_MAX_N:
        raise CapabilityError(f"general approximation LP is capped at n <= {GENERAL_LP_MAX_N}")
    if not 0 <= d <= f.n:
        raise ParameterError(f"degree budget must be in 0..{f.n}")
    masks = [m for m in range(1 << f.n) if _popcount(m) <= d]
    rows = [[1 if m & ~x == 0 else 0 for m in masks] for x in range(1 << f.n)]
    eps, coeffs = _min_error_lp(rows, [int(v) for v in f.table])
    witness = MultilinearPoly(f.n, dict(zip(masks, coeffs)))
    return LpResult(eps <= ONE_THIRD, eps, witness, d)


def approx_degree(f: TruthTable, eps: Fraction = ONE_THIRD) -> int:
    for d in range(f.n + 1):
        if lp_min_error(f, d).min_error <= eps:
            return d
    raise AssertionError("degree n always represents f exactly")


def symmetric_lp_min_error(p: SymmetricProfile, d: int) -> LpResult:
    """Best univariate q of degree <= d against the profile, solved in the binomial basis."""
    if p.n > SYMMETRIC_LP_MAX_N:
        raise CapabilityError(f"symmetric LP is capped at n <= {SYMMETRIC_LP_MAX_N}")
    if not 0 <= d <= p.n:
        raise ParameterError(f"degree budget must be in 0..{p.n}")
    rows = [[math.comb(k, j) for j in range(d + 1)] for k in range(p.n + 1)]
    eps, a = _min_error_lp(rows, p.values)
    return LpResult(eps <= ONE_THIRD, eps, from_binomial_basis(a), d)


def symmetric_approx_degree(p: SymmetricProfile, eps: Fraction = ONE_THIRD) -> int:
    for d in range(p.n + 1):
        if symmetric_lp_min_error(p, d).min_error <= eps:
            return d
    raise AssertionError("degree n interpolates the profile exactly")


def markov_bound(b1, b2, c, n) -> float:
    """Degree lower bound sqrt(c n / (c + b2 - b1)) for a polynomial bounded in [b1, b2]
    on 0..n whose derivative reaches c somewhere in [0, n]."""
    b1, b2, c = Fraction(b1), Fraction(b2), Fraction(c)
    if c <= 0:
        raise DomainError("derivative bound c must be positive")
    if b2 < b1:
        raise DomainError("need b2 >= b1")
    return math.sqrt(c * n / (c + b2 - b1))


def restrict_blocks(p: MultilinearPoly, x, blocks: Sequence[Sequence[int]]) -> MultilinearPoly:
    """Substitute z_j = y_i (x_j = 0) or 1 - y_i (x_j = 1) for j in block i; z_j = x_j elsewhere."""
    from .boolfn import parse_bits

    xi = parse_bits(x, p.n)
    owner = {}
    for i, blk in enumerate(blocks):
        if not blk:
            raise ParameterError("blocks must be nonempty")
        for j in blk:
            if not 0 <= j < p.n:
                raise ParameterError(f"block index {j} out of range")
            if j in owner:
                raise ParameterError(f"blocks overlap on variable {j}")
            owner[j] = i
    b = len(blocks)
    out = MultilinearPoly(b)
    for m, c in p.coeffs.items():
        term = MultilinearPoly.constant(b, c)
        plain, flipped = 0, 0  # per-block masks of y_i and (1 - y_i) factors
        dead = False
        for j in range(p.n):
            if not m >> j & 1:
                continue
            if j not in owner:
                if not xi >> j & 1:
                    dead = True
                    break
                continue
            if xi >> j & 1:
                flipped |= 1 << owner[j]
            else:
                plain |= 1 << owner[j]
        if dead or plain & flipped:  # y (1 - y) vanishes on the cube
            continue
        if plain:
            term = term * MultilinearPoly(b, {plain: Fraction(1)})
        for i in range(b):
            if flipped >> i & 1:
                term = term * MultilinearPoly(b, {0: Fraction(1), 1 << i: Fraction(-1)})
        out = out + term
    return out
