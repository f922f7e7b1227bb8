"""Blind delegated quantum computation by iterated gate teleportation.

A desk-scale simulator of a client/server protocol family in which the
client teleports diagonal gates with dyadic phase angles onto the server's
register, never sends gate descriptions, and hides everything but size
parameters behind Pauli one-time pads.  Includes an exact statevector
backend, integer gate algebra, an exhaustive-branch verifier against
direct simulation, a blindness certifier, and communication-cost
accounting with the corresponding lower bounds.
"""

from .diagonal import DiagonalGate, random_gate, unitary_diag
from .errors import CapExceeded, SchemaError
from .protocol import (
    Channel,
    KeyLedger,
    Program,
    Transcript,
    direct_simulate,
    load_program,
    run_blind,
    run_computation,
    run_iterated,
    save_program,
    verify_program,
)
from .statevec import PauliString, StateVector, fidelity_up_to_phase
from .teleport import teleport_round

__version__ = "0.1.0"

__all__ = [
    "CapExceeded",
    "Channel",
    "DiagonalGate",
    "KeyLedger",
    "PauliString",
    "Program",
    "SchemaError",
    "StateVector",
    "Transcript",
    "direct_simulate",
    "fidelity_up_to_phase",
    "load_program",
    "random_gate",
    "run_blind",
    "run_computation",
    "run_iterated",
    "save_program",
    "teleport_round",
    "unitary_diag",
    "verify_program",
    "__version__",
]
