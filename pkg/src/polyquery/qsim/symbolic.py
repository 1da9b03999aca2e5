"""Symbolic execution: every amplitude as a multilinear polynomial in x_0..x_{n-1}.

Coefficients live in Z[i, 1/sqrt2]. Internally the whole state shares one scale
exponent ``e`` and stores integer tensors ``A[k, S, j]`` where ``j`` indexes the
parts (a, b, c, d) of ``(a + b sqrt2) + (c + d sqrt2) i``, so the coefficient of
monomial S in the amplitude of basis state k is ``A[k, S] / sqrt2**e``.
Python ints (object dtype) keep everything exact.
"""
from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from ..boolfn import TruthTable, from_family
from ..errors import CapabilityError, InconsistencyError
from ..polynomial import MultilinearPoly
from .circuit import Circuit, Gate, Oracle
from .numeric import check_zero_error
from .ring import RingElem, qsqrt2_div


def _mul_sqrt2(A):
    return np.stack([2 * A[..., 1], A[..., 0], 2 * A[..., 3], A[..., 2]], axis=-1)


def _mul_i(A):
    return np.stack([-A[..., 2], -A[..., 3], A[..., 0], A[..., 1]], axis=-1)


def _mul_x(P, i: int, n: int):
    """Multiply each polynomial (mask axis = -2) by x_i, reducing x_i^2 = x_i."""
    out = np.zeros_like(P)
    masks = np.arange(1 << n)
    has = (masks >> i) & 1 == 1
    out[..., has, :] = P[..., has, :] + P[..., masks[has] ^ (1 << i), :]
    return out


def zeta(P: np.ndarray, n: int, axis: int) -> np.ndarray:
    """Coefficients -> values on the Boolean cube along ``axis`` (which has length 2**n)."""
    V = np.moveaxis(P, axis, 0).copy()
    for i in range(n):
        shape = V.shape
        V = V.reshape((-1, 2, 1 << i) + shape[1:])
        V[:, 1] = V[:, 1] + V[:, 0]
        V = V.reshape(shape)
    return np.moveaxis(V, 0, axis)


def mobius(V: np.ndarray, n: int, axis: int) -> np.ndarray:
    P = np.moveaxis(V, axis, 0).copy()
    for i in range(n):
        shape = P.shape
        P = P.reshape((-1, 2, 1 << i) + shape[1:])
        P[:, 1] = P[:, 1] - P[:, 0]
        P = P.reshape(shape)
    return np.moveaxis(P, 0, axis)


class SymbolicState:
    def __init__(self, m: int, n: int, amps: np.ndarray, scale: int, queries: int):
        self.m, self.n = m, n
        self.amps = amps  # (2**m, 2**n, 4) object ints
        self.scale = scale
        self.queries = queries

    def _poly(self, k: int, parts) -> MultilinearPoly:
        row = self.amps[k]
        coeffs = {}
        for mask in range(1 << self.n):
            a, b = (int(row[mask, j]) for j in parts)
            if a or b:
                coeffs[mask] = RingElem(a, b, 0, 0, self.scale)
        return MultilinearPoly(self.n, coeffs)

    def amplitude(self, k: int) -> tuple[MultilinearPoly, MultilinearPoly]:
        """(real part, imaginary part) of the amplitude polynomial of basis state k."""
        return self._poly(k, (0, 1)), self._poly(k, (2, 3))

    def amplitude_poly(self, k: int) -> MultilinearPoly:
        row = self.amps[k]
        coeffs = {}
        for mask in range(1 << self.n):
            a, b, c, d = (int(v) for v in row[mask])
            if a or b or c or d:
                coeffs[mask] = RingElem(a, b, c, d, self.scale)
        return MultilinearPoly(self.n, coeffs)

    def degrees(self) -> np.ndarray:
        masks = np.arange(1 << self.n)
        size = np.array([bin(s).count("1") for s in masks])
        nz = np.any(self.amps != 0, axis=2)
        return np.where(nz, size[None, :], 0).max(axis=1)

    def max_degree(self) -> int:
        return int(self.degrees().max())

    def numeric_values(self) -> np.ndarray:
        """Complex amplitudes at every Boolean input: shape (2**n, 2**m)."""
        V = zeta(self.amps, self.n, axis=1).astype(float)
        r2 = np.sqrt(2.0)
        scale = r2 ** -self.scale
        re = (V[..., 0] + V[..., 1] * r2) * scale
        im = (V[..., 2] + V[..., 3] * r2) * scale
        return (re + 1j * im).T


class _Engine:
    def __init__(self, c: Circuit):
        self.c = c
        m, n = c.m, c.n
        A = np.zeros((1 << m, 1 << n, 4), dtype=object)
        A[...] = 0
        A[0, 0, 0] = 1
        self.A = A
        self.e = 0
        self.queries = 0

    def _view(self):
        return self.A.reshape((2,) * self.c.m + self.A.shape[1:])

    def _sel(self, assign: dict):
        idx = [slice(None)] * self.c.m
        for q, v in assign.items():
            idx[q] = v
        return tuple(idx)

    def canonicalize(self):
        A = self.A
        while self.e > 0 and np.all(A[..., 0] % 2 == 0) and np.all(A[..., 2] % 2 == 0):
            A = np.stack([A[..., 1], A[..., 0] // 2, A[..., 3], A[..., 2] // 2], axis=-1)
            self.e -= 1
        self.A = A

    def gate(self, g: Gate):
        V = self._view()
        t = g.targets
        if g.kind == "X":
            s0, s1 = self._sel({t[0]: 0}), self._sel({t[0]: 1})
            V[s0], V[s1] = V[s1].copy(), V[s0].copy()
        elif g.kind == "Z":
            s1 = self._sel({t[0]: 1})
            V[s1] = -V[s1]
        elif g.kind == "S":
            s1 = self._sel({t[0]: 1})
            V[s1] = _mul_i(V[s1])
        elif g.kind == "T":
            s0, s1 = self._sel({t[0]: 0}), self._sel({t[0]: 1})
            one = V[s1]
            V[s1] = one + _mul_i(one)  # (1 + i) / sqrt2 after the rescale
            V[s0] = _mul_sqrt2(V[s0])
            self.e += 1
        elif g.kind == "H":
            s0, s1 = self._sel({t[0]: 0}), self._sel({t[0]: 1})
            a0, a1 = V[s0].copy(), V[s1].copy()
            V[s0], V[s1] = a0 + a1, a0 - a1
            self.e += 1
        elif g.kind == "CNOT":
            s0 = self._sel({t[0]: 1, t[1]: 0})
            s1 = self._sel({t[0]: 1, t[1]: 1})
            V[s0], V[s1] = V[s1].copy(), V[s0].copy()
        elif g.kind == "CCNOT":
            s0 = self._sel({t[0]: 1, t[1]: 1, t[2]: 0})
            s1 = self._sel({t[0]: 1, t[1]: 1, t[2]: 1})
            V[s0], V[s1] = V[s1].copy(), V[s0].copy()
        elif g.kind == "CZ":
            s = self._sel({t[0]: 1, t[1]: 1})
            V[s] = -V[s]
        else:
            raise CapabilityError(f"gate {g.kind} has no exact symbolic form")
        self.A = V.reshape(self.A.shape)
        self.canonicalize()

    def oracle(self):
        c = self.c
        L = c.index_qubits
        V = self._view()
        for i in range(min(c.n, 1 << L)):
            assign = {t: (i >> t) & 1 for t in range(L)}
            s0 = self._sel({**assign, L: 0})
            s1 = self._sel({**assign, L: 1})
            alpha, beta = V[s0].copy(), V[s1].copy()
            # |i,0>: (1 - x_i) alpha + x_i beta ; |i,1>: x_i alpha + (1 - x_i) beta
            delta = _mul_x(beta - alpha, i, c.n)
            V[s0] = alpha + delta
            V[s1] = beta - delta
        self.A = V.reshape(self.A.shape)
        self.queries += 1


def symbolic_run(c: Circuit) -> SymbolicState:
    if not c.is_exact_gate_set():
        raise CapabilityError("symbolic mode supports only H, X, Z, S, T, CNOT, CCNOT, CZ")
    eng = _Engine(c)
    for op in c.ops:
        if isinstance(op, Oracle):
            eng.oracle()
        else:
            eng.gate(op)
    return SymbolicState(c.m, c.n, eng.A, eng.e, eng.queries)


def output_bit_predicate(value: int = 1) -> Callable[[int, int], bool]:
    """Basis states whose rightmost bit equals ``value``."""
    return lambda k, m: (k & 1) == value


def acceptance_polynomial(c: Circuit, accept: Optional[Callable[[int, int], bool]] = None,
                          state: Optional[SymbolicState] = None) -> MultilinearPoly:
    """Sum over accepted basis states of |p_k|^2, reduced to multilinear form.

    Products of multilinear polynomials are formed pointwise on the cube and mapped
    back with the Moebius transform, which is exactly multilinear reduction.
    Coefficients are real :class:`RingElem` values.
    """
    st = state if state is not None else symbolic_run(c)
    accept = accept or output_bit_predicate(1)
    keep = [k for k in range(1 << c.m) if accept(k, c.m)]
    n = c.n
    if not keep:
        return MultilinearPoly(n)
    V = zeta(st.amps[keep], n, axis=1)  # (K, 2**n, 4) integer values
    a, b, cc, d = (V[..., j] for j in range(4))
    # |(a + b r) + (c + d r) i|^2 with r = sqrt2
    re = (a * a + 2 * b * b + cc * cc + 2 * d * d).sum(axis=0)
    rt = (2 * a * b + 2 * cc * d).sum(axis=0)
    P0 = mobius(re, n, axis=0)
    P1 = mobius(rt, n, axis=0)
    coeffs = {}
    for mask in range(1 << n):
        if P0[mask] or P1[mask]:
            coeffs[mask] = RingElem(int(P0[mask]), int(P1[mask]), 0, 0, 2 * st.scale)
    return MultilinearPoly(n, coeffs)


def to_rational(p: MultilinearPoly) -> MultilinearPoly:
    """Convert ring coefficients to Fractions; ValueError if any is irrational."""
    return MultilinearPoly(p.n, {m: RingElem.coerce(c).to_fraction() for m, c in p.coeffs.items()})


def to_qsqrt2_poly(p: MultilinearPoly) -> dict:
    return {m: RingElem.coerce(c).to_qsqrt2() for m, c in p.coeffs.items()}


def zero_error_witness_poly(c: Circuit, f: Optional[TruthTable] = None):
    """Real part of 1 - p_k'(X) / p_k'(0) for a basis state k' answering "conclusive, 0".

    Returns ``(polynomial, degree, k')``. For a zero-error OR network the polynomial
    represents OR, so its degree certifies the network's query count is at least n.
    """
    f = f if f is not None else from_family("OR", c.n)
    if not check_zero_error(c, f).passed:
        raise InconsistencyError("circuit is not zero-error for the given function")
    st = symbolic_run(c)
    for k in range(1 << c.m):
        if (k >> 1) & 1 != 1 or k & 1 != 0:
            continue
        poly = st.amplitude_poly(k)
        at_zero = poly.coeffs.get(0)
        if not at_zero:
            continue
        # Re(p / c0) = Re(p * conj(c0)) / |c0|^2, computed in Q(sqrt2)
        denom = at_zero.abs2().to_qsqrt2()
        conj0 = at_zero.conj()
        coeffs = {}
        for mask, coef in poly.coeffs.items():
            num = (coef * conj0).real.to_qsqrt2()
            r, s = qsqrt2_div(num, denom)
            if mask == 0:
                r = 1 - r
                s = -s
            else:
                r, s = -r, -s
            if s != 0:
                raise InconsistencyError("witness polynomial has an irrational coefficient")
            coeffs[mask] = r
        p = MultilinearPoly(c.n, coeffs)
        return p, p.degree(), k
    raise InconsistencyError("no basis state answers 'conclusive, 0' on the all-zeros input")
