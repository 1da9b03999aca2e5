"""Query-network description and its JSON form.

Register layout: qubit 0 is the leftmost (most significant) bit of a basis-state
number. Qubits ``0..L-1`` hold the query index i with qubit t carrying weight 2**t,
qubit ``L`` is the oracle target b, the rest is workspace. The output bit is the
rightmost qubit ``m - 1``. ``L = ceil(log2 n)``.

For multi-qubit gates ``targets[0]`` is the most significant bit of the matrix
index; CNOT is ``[control, target]``, CCNOT ``[c1, c2, target]``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from ..errors import ValidationError

TOL = 1e-9

_S2 = 1 / np.sqrt(2)
GATE_MATRICES = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _S2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
    "S": np.diag([1, 1j]),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "CCNOT": np.eye(8, dtype=complex)[[0, 1, 2, 3, 4, 5, 7, 6]],
}
ARITY = {"H": 1, "X": 1, "Z": 1, "S": 1, "T": 1, "CNOT": 2, "CZ": 2, "CCNOT": 3}
EXACT_KINDS = frozenset(ARITY)


def index_qubits(n: int) -> int:
    return (n - 1).bit_length() if n > 1 else 0


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple
    matrix: Optional[np.ndarray] = field(default=None, compare=False)

    def unitary(self) -> np.ndarray:
        return self.matrix if self.kind == "CUSTOM" else GATE_MATRICES[self.kind]


@dataclass(frozen=True)
class Oracle:
    pass


Op = Union[Gate, Oracle]


@dataclass(frozen=True)
class Circuit:
    m: int
    n: int
    ops: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        self.validate()

    @property
    def index_qubits(self) -> int:
        return index_qubits(self.n)

    @property
    def target_qubit(self) -> int:
        return self.index_qubits

    def validate(self):
        if self.n < 1:
            raise ValidationError("n must be >= 1")
        if self.m < 1 or self.m > 22:
            raise ValidationError(f"m must be in 1..22, got {self.m}")
        for pos, op in enumerate(self.ops):
            if isinstance(op, Oracle):
                if self.m < self.index_qubits + 1:
                    raise ValidationError(
                        f"op {pos}: oracle needs m >= {self.index_qubits + 1} qubits for n={self.n}")
                continue
            if not isinstance(op, Gate):
                raise ValidationError(f"op {pos}: unknown element {op!r}")
            t = op.targets
            if len(set(t)) != len(t) or any(not 0 <= q < self.m for q in t):
                raise ValidationError(f"op {pos}: bad targets {t} for m={self.m}")
            if op.kind == "CUSTOM":
                mat = op.matrix
                k = len(t)
                if mat is None or mat.shape != (1 << k, 1 << k):
                    raise ValidationError(f"op {pos}: CUSTOM matrix must be {1 << k}x{1 << k}")
                if not np.allclose(mat.conj().T @ mat, np.eye(1 << k), atol=TOL, rtol=0):
                    raise ValidationError(f"op {pos}: CUSTOM matrix is not unitary")
            elif op.kind in ARITY:
                if len(t) != ARITY[op.kind]:
                    raise ValidationError(f"op {pos}: {op.kind} takes {ARITY[op.kind]} targets")
            else:
                raise ValidationError(f"op {pos}: unknown gate kind {op.kind!r}")

    def query_count(self) -> int:
        return sum(isinstance(op, Oracle) for op in self.ops)

    def is_exact_gate_set(self) -> bool:
        return all(isinstance(op, Oracle) or op.kind in EXACT_KINDS for op in self.ops)

    def __add__(self, other: "Circuit") -> "Circuit":
        if (self.m, self.n) != (other.m, other.n):
            raise ValidationError("cannot concatenate circuits of different shape")
        return Circuit(self.m, self.n, self.ops + other.ops)

    def remap(self, m: int, mapping) -> "Circuit":
        """Same ops on a wider register, qubit q moved to ``mapping[q]``."""
        ops = [op if isinstance(op, Oracle)
               else Gate(op.kind, tuple(mapping[q] for q in op.targets), op.matrix)
               for op in self.ops]
        return Circuit(m, self.n, ops)

    def to_json(self) -> dict:
        ops = []
        for op in self.ops:
            if isinstance(op, Oracle):
                ops.append({"oracle": True})
            elif op.kind == "CUSTOM":
                mat = [[[float(v.real), float(v.imag)] for v in row] for row in op.matrix]
                ops.append({"gate": "CUSTOM", "targets": list(op.targets), "matrix": mat})
            else:
                ops.append({"gate": op.kind, "targets": list(op.targets)})
        return {"m": self.m, "n": self.n, "ops": ops}

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, obj) -> "Circuit":
        if isinstance(obj, str):
            try:
                obj = json.loads(obj)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"circuit JSON line {exc.lineno}: {exc.msg}") from exc
        try:
            m, n, raw = int(obj["m"]), int(obj["n"]), obj["ops"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"circuit JSON needs m, n, ops: {exc}") from exc
        ops = []
        for pos, item in enumerate(raw):
            if item.get("oracle"):
                ops.append(Oracle())
                continue
            kind = str(item.get("gate", "")).upper()
            targets = tuple(int(q) for q in item.get("targets", ()))
            mat = None
            if kind == "CUSTOM":
                try:
                    mat = np.array([[complex(re, im) for re, im in row] for row in item["matrix"]])
                except (KeyError, TypeError, ValueError) as exc:
                    raise ValidationError(f"op {pos}: bad CUSTOM matrix: {exc}") from exc
            ops.append(Gate(kind, targets, mat))
        return cls(m, n, ops)


class CircuitBuilder:
    """Small helper for assembling circuits gate by gate."""

    def __init__(self, m: int, n: int):
        self.m, self.n = m, n
        self.ops: list = []

    def gate(self, kind: str, *targets: int, matrix=None) -> "CircuitBuilder":
        self.ops.append(Gate(kind, tuple(targets), matrix))
        return self

    def h(self, *qs):
        for q in qs:
            self.gate("H", q)
        return self

    def x(self, *qs):
        for q in qs:
            self.gate("X", q)
        return self

    def cnot(self, c, t):
        return self.gate("CNOT", c, t)

    def oracle(self):
        self.ops.append(Oracle())
        return self

    def extend(self, ops):
        self.ops.extend(ops)
        return self

    def build(self) -> Circuit:
        return Circuit(self.m, self.n, tuple(self.ops))
