"""Double-precision statevector execution, batched over oracle inputs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..boolfn import TruthTable, format_bits, parse_bits
from ..errors import InconsistencyError, ValidationError
from .circuit import TOL, Circuit, Gate, Oracle

BATCH = 4096


def input_matrix(n: int, indices) -> np.ndarray:
    """Rows of bits (x_0 first) for each input index."""
    idx = np.asarray(indices, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(bool)


def _apply_gate(psi: np.ndarray, gate: Gate, m: int) -> np.ndarray:
    k = len(gate.targets)
    axes = [1 + q for q in gate.targets]
    moved = np.moveaxis(psi, axes, list(range(m + 1 - k, m + 1)))
    shape = moved.shape
    flat = moved.reshape(shape[:-k] + (1 << k,))
    flat = flat @ gate.unitary().T
    return np.moveaxis(flat.reshape(shape), list(range(m + 1 - k, m + 1)), axes)


def _apply_oracle(psi: np.ndarray, xs: np.ndarray, c: Circuit) -> np.ndarray:
    L = c.index_qubits
    psi = np.ascontiguousarray(psi)
    # indices i >= n (n not a power of two) are left untouched
    for i in range(min(c.n, 1 << L)):
        rows = np.flatnonzero(xs[:, i])
        if rows.size == 0:
            continue
        prefix = tuple((i >> t) & 1 for t in range(L))
        i0 = (rows,) + prefix + (0,)
        i1 = (rows,) + prefix + (1,)
        tmp = psi[i0].copy()
        psi[i0] = psi[i1]
        psi[i1] = tmp
    return psi


def simulate_batch(c: Circuit, xs: np.ndarray, check_norm: bool = True) -> np.ndarray:
    """Final states for every row of ``xs`` (shape (batch, n) bits); returns (batch, 2**m)."""
    xs = np.asarray(xs, dtype=bool)
    if xs.ndim != 2 or xs.shape[1] != c.n:
        raise ValidationError(f"inputs must have {c.n} bits")
    batch, m = xs.shape[0], c.m
    psi = np.zeros((batch,) + (2,) * m, dtype=complex)
    psi[(slice(None),) + (0,) * m] = 1.0
    for pos, op in enumerate(c.ops):
        if isinstance(op, Oracle):
            psi = _apply_oracle(psi, xs, c)
        else:
            psi = _apply_gate(psi, op, m)
        if check_norm:
            norms = np.sum(np.abs(psi.reshape(batch, -1)) ** 2, axis=1)
            if np.any(np.abs(norms - 1) > TOL):
                raise InconsistencyError(f"norm drifted after op {pos}: {norms.max()}")
    return psi.reshape(batch, 1 << m)


def simulate(c: Circuit, x) -> np.ndarray:
    xi = parse_bits(x, c.n)
    return simulate_batch(c, input_matrix(c.n, [xi]))[0]


def probabilities(c: Circuit, indices=None) -> np.ndarray:
    """|amplitude|^2 for each requested input (default: all 2**n), shape (inputs, 2**m)."""
    if indices is None:
        indices = np.arange(1 << c.n)
    indices = np.asarray(indices)
    out = np.empty((indices.size, 1 << c.m))
    for start in range(0, indices.size, BATCH):
        chunk = indices[start:start + BATCH]
        psi = simulate_batch(c, input_matrix(c.n, chunk))
        out[start:start + BATCH] = np.abs(psi) ** 2
    return np.clip(out, 0.0, 1.0)


def bit_probability(probs: np.ndarray, m: int, qubit: int, value: int = 1) -> np.ndarray:
    """P(qubit == value) per row."""
    k = np.arange(1 << m)
    sel = ((k >> (m - 1 - qubit)) & 1) == value
    return np.clip(probs[:, sel].sum(axis=1), 0.0, 1.0)


# ---------------------------------------------------------------- output semantics

@dataclass
class CheckResult:
    semantics: str
    passed: bool
    worst_x: str
    value: float

    def to_json(self) -> dict:
        return {"semantics": self.semantics, "pass": bool(self.passed),
                "worst_x": self.worst_x, "value": float(self.value)}


def _same_n(c: Circuit, f: TruthTable):
    if c.n != f.n:
        raise ValidationError(f"circuit queries n={c.n} bits but f has n={f.n}")


def success_probabilities(c: Circuit, f: TruthTable) -> np.ndarray:
    """P(rightmost bit == f(x)) for every x."""
    _same_n(c, f)
    p1 = bit_probability(probabilities(c), c.m, c.m - 1, 1)
    t = f.table.astype(bool)
    return np.where(t, p1, 1.0 - p1)


def check_exact(c: Circuit, f: TruthTable) -> CheckResult:
    succ = success_probabilities(c, f)
    worst = int(np.argmin(succ))
    dev = float(1.0 - succ[worst])
    return CheckResult("exact", dev <= TOL, format_bits(worst, f.n), dev)


def check_bounded_error(c: Circuit, f: TruthTable, threshold: float = 2 / 3) -> CheckResult:
    succ = success_probabilities(c, f)
    worst = int(np.argmin(succ))
    return CheckResult("bounded", bool(succ[worst] >= threshold - TOL),
                       format_bits(worst, f.n), float(succ[worst]))


def zero_error_profile(c: Circuit, f: TruthTable) -> tuple[np.ndarray, np.ndarray]:
    """(P(conclusive and wrong), P(inconclusive)) per input; flag qubit m-2, answer m-1."""
    _same_n(c, f)
    if c.m < 2:
        raise ValidationError("zero-error semantics need two output qubits")
    probs = probabilities(c)
    k = np.arange(1 << c.m)
    flag = (k >> 1) & 1
    ans = k & 1
    t = f.table.astype(np.int64)[:, None]
    wrong = np.clip((probs * ((flag == 1) & (ans[None, :] != t))).sum(axis=1), 0, 1)
    inconclusive = np.clip(probs[:, flag == 0].sum(axis=1), 0, 1)
    return wrong, inconclusive


def check_zero_error(c: Circuit, f: TruthTable) -> CheckResult:
    wrong, inconclusive = zero_error_profile(c, f)
    ok = (wrong <= TOL) & (inconclusive < 0.5 + TOL)
    worst = int(np.argmax(inconclusive)) if ok.all() else int(np.argmin(ok))
    return CheckResult("zero", bool(ok.all()), format_bits(worst, f.n),
                       float(inconclusive.max()))
