"""Boolean functions on {0,1}^n stored as truth tables.

Index convention: bit ``i`` of the integer index is ``x_i`` (little-endian).
A bit string ``"1101"`` lists ``x_0 x_1 x_2 x_3`` from left to right.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, ParameterError

MAX_N = 20
FAMILIES = ("OR", "AND", "PARITY", "MAJORITY", "THRESHOLD")


def popcounts(n: int) -> np.ndarray:
    """Hamming weight of every index in ``range(2**n)``."""
    idx = np.arange(1 << n, dtype=np.int64)
    w = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        w += (idx >> i) & 1
    return w


@dataclass(frozen=True, eq=False)
class TruthTable:
    n: int
    table: np.ndarray

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or not 0 <= self.n <= MAX_N:
            raise ParameterError(f"n must be in 0..{MAX_N}, got {self.n!r}")
        t = np.asarray(self.table, dtype=np.uint8).reshape(-1)
        if t.size != 1 << self.n:
            raise ParameterError(f"table has {t.size} entries, expected {1 << self.n}")
        if np.any(t > 1):
            raise ParameterError("table entries must be 0 or 1")
        t = t.copy()
        t.flags.writeable = False
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "table", t)

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "TruthTable":
        size = len(bits)
        n = size.bit_length() - 1
        if size == 0 or 1 << n != size:
            raise ParameterError("table length must be a power of two")
        return cls(n, np.array(bits, dtype=np.uint8))

    @classmethod
    def from_int(cls, n: int, value: int) -> "TruthTable":
        """Table whose entry at X is bit X of ``value``."""
        size = 1 << n
        bits = np.array([(value >> k) & 1 for k in range(size)], dtype=np.uint8)
        return cls(n, bits)

    def to_int(self) -> int:
        return sum(1 << int(k) for k in np.flatnonzero(self.table))

    def __eq__(self, other):
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.n, self.table.tobytes()))

    def __call__(self, x) -> int:
        return evaluate(self, x)

    def __repr__(self):
        if self.n <= 4:
            return f"TruthTable(n={self.n}, table={self.table.tolist()})"
        return f"TruthTable(n={self.n}, bits=0x{self.to_int():x})"

    def is_constant(self) -> bool:
        return bool(self.table.min() == self.table.max())

    def is_monotone(self) -> bool:
        """Monotone in either direction (non-decreasing or non-increasing in every x_i)."""
        idx = np.arange(1 << self.n)
        up = down = True
        t = self.table.astype(np.int8)
        for i in range(self.n):
            lo = idx[(idx >> i) & 1 == 0]
            diff = t[lo | (1 << i)] - t[lo]
            up = up and bool(np.all(diff >= 0))
            down = down and bool(np.all(diff <= 0))
        return up or down

    def negated(self) -> "TruthTable":
        return TruthTable(self.n, 1 - self.table)

    def to_json(self) -> dict:
        digits = max(1, ((1 << self.n) + 3) // 4)
        return {"n": self.n, "bits": format(self.to_int(), f"0{digits}x")}

    @classmethod
    def from_json(cls, obj) -> "TruthTable":
        if isinstance(obj, str):
            obj = json.loads(obj)
        if "family" in obj:
            return from_family(obj["family"], obj["n"], obj.get("m"))
        try:
            n, bits = int(obj["n"]), obj["bits"]
            value = int(bits, 16)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParameterError(f"malformed truth table JSON: {exc}") from exc
        if value >> (1 << n):
            raise ParameterError("hex string has bits beyond 2^n")
        return cls.from_int(n, value)


@dataclass(frozen=True)
class SymmetricProfile:
    n: int
    values: tuple

    def __post_init__(self):
        if len(self.values) != self.n + 1:
            raise ParameterError("profile must have n+1 entries")
        if any(v not in (0, 1) for v in self.values):
            raise ParameterError("profile entries must be bits")
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))

    def to_truth_table(self) -> TruthTable:
        w = popcounts(self.n)
        return TruthTable(self.n, np.array(self.values, dtype=np.uint8)[w])

    def is_constant(self) -> bool:
        return len(set(self.values)) == 1


def from_family(family: str, n: int, m: Optional[int] = None) -> TruthTable:
    fam = str(family).upper()
    if fam not in FAMILIES:
        raise ParameterError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_N:
        raise ParameterError(f"n must be in 1..{MAX_N}, got {n!r}")
    w = popcounts(n)
    if fam == "OR":
        t = w >= 1
    elif fam == "AND":
        t = w == n
    elif fam == "PARITY":
        t = w % 2 == 1
    elif fam == "MAJORITY":
        t = 2 * w > n
    else:
        if m is None or not 1 <= m <= n:
            raise ParameterError(f"THRESHOLD needs 1 <= m <= n, got m={m!r}")
        t = w >= m
    return TruthTable(n, t.astype(np.uint8))


def parse_bits(x, n: int) -> int:
    """Bit string / sequence (x_0 first) or integer index -> integer index."""
    if isinstance(x, (int, np.integer)):
        if not 0 <= x < 1 << n:
            raise ParameterError(f"index {x} out of range for n={n}")
        return int(x)
    if isinstance(x, str):
        x = x.strip()
        if any(ch not in "01" for ch in x):
            raise ParameterError(f"not a bit string: {x!r}")
        bits = [int(ch) for ch in x]
    else:
        bits = [int(b) for b in x]
        if any(b not in (0, 1) for b in bits):
            raise ParameterError("bits must be 0 or 1")
    if len(bits) != n:
        raise ParameterError(f"expected {n} bits, got {len(bits)}")
    return sum(b << i for i, b in enumerate(bits))


def format_bits(index: int, n: int) -> str:
    return "".join(str((index >> i) & 1) for i in range(n))


def evaluate(f: TruthTable, x) -> int:
    return int(f.table[parse_bits(x, f.n)])


def symmetric_profile(f: TruthTable) -> Optional[SymmetricProfile]:
    w = popcounts(f.n)
    values = []
    for k in range(f.n + 1):
        vals = f.table[w == k]
        if vals.min() != vals.max():
            return None
        values.append(int(vals[0]))
    return SymmetricProfile(f.n, tuple(values))


def jump_positions(p: SymmetricProfile) -> list[int]:
    return [k for k in range(p.n) if p.values[k] != p.values[k + 1]]


def gamma(p: SymmetricProfile) -> int:
    jumps = jump_positions(p)
    if not jumps:
        raise DomainError("gamma is undefined for a constant profile")
    return min(abs(2 * k - p.n + 1) for k in jumps)


def restrict(f: TruthTable, i: int, b: int) -> TruthTable:
    """Fix x_i := b; the remaining variables keep their order."""
    if not 0 <= i < f.n:
        raise ParameterError(f"index {i} out of range for n={f.n}")
    if b not in (0, 1):
        raise ParameterError("b must be 0 or 1")
    shaped = f.table.reshape((2,) * f.n)
    # reshape puts x_{n-1} on axis 0
    sub = np.take(shaped, b, axis=f.n - 1 - i)
    return TruthTable(f.n - 1, sub.reshape(-1))


@dataclass(frozen=True)
class PaddingMap:
    """Embeds an n-bit input into 2n-1 bits by prefixing ``fixed`` zeros."""

    n: int
    fixed: int

    def embed(self, x) -> str:
        y = format_bits(parse_bits(x, self.n), self.n)
        return "0" * self.fixed + y


def and_to_majority(n: int) -> tuple[TruthTable, PaddingMap]:
    if n < 1:
        raise ParameterError("n must be >= 1")
    return from_family("MAJORITY", 2 * n - 1), PaddingMap(n, n - 1)
