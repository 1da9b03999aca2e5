"""Quantum query networks: numeric and symbolic execution, output-semantics checkers."""
from .circuit import Circuit, CircuitBuilder, Gate, Oracle, index_qubits
from .numeric import (
    CheckResult,
    bit_probability,
    check_bounded_error,
    check_exact,
    check_zero_error,
    probabilities,
    simulate,
    simulate_batch,
    success_probabilities,
    zero_error_profile,
)
from .ring import RingElem
from .symbolic import (
    SymbolicState,
    acceptance_polynomial,
    symbolic_run,
    to_rational,
    zero_error_witness_poly,
)


def query_count(c: Circuit) -> int:
    return c.query_count()
