"""Blindness certification and communication-cost accounting.

Blindness is checked on the exact key-averaged density matrix of every
quantum message the client sends during a blind teleportation exchange:
all pad assignments and all server outcome branches are enumerated with
their exact weights (sampling cannot certify distances near 1e-9), and the
result is compared against the maximally mixed state.  Enumeration is the
reason for the hard m*rounds cap.

Cost accounting compares a run's measured transcript against the closed
forms for this protocol and against the qubit lower bound that applies to
any scheme restricted to sending gate descriptions.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .diagonal import DiagonalGate
from .errors import CapExceeded
from .protocol import (
    Channel,
    ClassicalBits,
    Program,
    QuantumPayload,
    ScriptedTape,
    Transcript,
    run_blind,
)
from .statevec import StateVector

BLINDNESS_QUBIT_CAP = 10  # joint message register size m*rounds

# documented tolerance of the hermitian eigen-solve behind trace_distance
EIGEN_TOL = 1e-12


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the sum of absolute eigenvalues of the (hermitian) difference."""
    diff = np.asarray(rho) - np.asarray(sigma)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def averaged_client_view(
    gate: DiagonalGate,
    rounds: int,
    *,
    input_state: StateVector | None = None,
) -> np.ndarray:
    """Exact server-side density matrix of all quantum messages, key-averaged.

    Enumerates every pad assignment (uniform weight) and every outcome
    branch (weighted by its measured Born probability), runs the real blind
    exchange for each, and averages the joint message state.
    """
    m = gate.m
    ml = m * rounds
    if ml > BLINDNESS_QUBIT_CAP:
        raise CapExceeded(
            f"joint message register of {ml} qubits exceeds the "
            f"{BLINDNESS_QUBIT_CAP}-qubit enumeration cap")
    psi = input_state if input_state is not None else StateVector.basis(m, (0,) * m)
    dim = 2**ml
    rho = np.zeros((dim, dim), dtype=np.complex128)
    pad_weight = 2.0**-ml
    for pads in range(2**ml):
        pad_bits = [(pads >> i) & 1 for i in range(ml)]
        for branch in range(2**ml):
            outcome_bits = [(branch >> i) & 1 for i in range(ml)]
            channel = Channel()
            result = run_blind(
                gate, psi, rounds,
                pad_tape=ScriptedTape(pad_bits),
                outcome_tape=ScriptedTape(outcome_bits),
                channel=channel,
            )
            joint = np.ones(1, dtype=np.complex128)
            for msg in channel.transcript.messages:
                if isinstance(msg.payload, QuantumPayload):
                    joint = np.kron(joint, msg.payload.state.amps)
            rho += (pad_weight * result.branch_prob) * np.outer(joint, joint.conj())
    return rho


def blindness_distance(gate: DiagonalGate, rounds: int) -> float:
    """Trace distance between the averaged server view and I/2^(m*rounds)."""
    rho = averaged_client_view(gate, rounds)
    dim = rho.shape[0]
    return trace_distance(rho, np.eye(dim) / dim)


def view_distance(gate_a: DiagonalGate, gate_b: DiagonalGate, rounds: int) -> float:
    """Distinguishability of two gates from the averaged server view."""
    return trace_distance(
        averaged_client_view(gate_a, rounds),
        averaged_client_view(gate_b, rounds),
    )


def averaged_program_view(program: Program) -> np.ndarray:
    """Key-averaged joint density matrix of every state a full run sends.

    The whole-computation analogue of :func:`averaged_client_view`: two
    programs of equal (n, m, x, J) must give the same matrix, since sizes
    are all the protocol leaks.
    """
    from .protocol import _exact_branch_messages, branch_bit_counts

    pad_bits, outcome_bits = branch_bit_counts(program)
    total_qubits = pad_bits  # one padded qubit sent per pad bit drawn
    if total_qubits > BLINDNESS_QUBIT_CAP:
        raise CapExceeded(
            f"joint message register of {total_qubits} qubits exceeds the "
            f"{BLINDNESS_QUBIT_CAP}-qubit enumeration cap")
    dim = 2**total_qubits
    rho = np.zeros((dim, dim), dtype=np.complex128)
    pad_weight = 2.0**-pad_bits
    for pads in range(2**pad_bits):
        pad_script = [(pads >> i) & 1 for i in range(pad_bits)]
        for branch in range(2**outcome_bits):
            outcome_script = [(branch >> i) & 1 for i in range(outcome_bits)]
            prob, states = _exact_branch_messages(program, pad_script, outcome_script)
            joint = np.ones(1, dtype=np.complex128)
            for state in states:
                joint = np.kron(joint, state.amps)
            rho += (pad_weight * prob) * np.outer(joint, joint.conj())
    return rho


# ---------------------------------------------------------------------------
# lower bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundParams:
    """Inputs of the communication lower bounds.

    J: number of delegated gates/phases; G: gate-set cardinality;
    B: measurement-basis count and d: qudit dimension available to a
    prepare-and-measure client; k: dyadic angle level; n: register width;
    N_C: number of distinguishable computations.
    """

    J: int = 1
    G: int = 1
    B: int = 2
    d: int = 2
    k: int = 1
    n: int = 1
    N_C: int = 1

    def __post_init__(self):
        for name in ("J", "G", "B", "d", "k", "n", "N_C"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")


def gate_family_size(n: int, k: int) -> int:
    """Number of distinct canonical angle tables on n qubits at level k."""
    return (2**k) ** (2**n - 1)


def no_programming_bound(params: BoundParams) -> int:
    """Qubits/bits any gate-description scheme must send: J * k * (2^n - 1)."""
    return params.J * params.k * (2**params.n - 1)


def pigeonhole_bound(params: BoundParams) -> float:
    """Qudit lower bound for prepare-and-measure clients: J*log(G)/log(B*d)."""
    if params.B * params.d < 2:
        raise ValueError("B*d must be at least 2")
    if params.G == 1:
        return 0.0
    return params.J * math.log(params.G) / math.log(params.B * params.d)


# ---------------------------------------------------------------------------
# cost accounting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CostReport:
    n: int
    m: int
    x: int
    J: int
    measured_qubits_to_server: int
    measured_bits_to_client: int
    expected_qubits: int       # n + (J-1)*n*x
    expected_bits: int         # (J-1)*n*x + n
    leading_order_qubits: int  # n*J*x
    no_programming_qubits: int  # J*x*(2^n - 1)
    bound_to_measured_ratio: float

    def to_dict(self) -> dict:
        return dict(vars(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_table(self) -> str:
        rows = [
            ("register width n", self.n),
            ("block size m", self.m),
            ("angle level x", self.x),
            ("phases J", self.J),
            ("qubits sent, measured", self.measured_qubits_to_server),
            ("qubits sent, closed form", self.expected_qubits),
            ("bits returned, measured", self.measured_bits_to_client),
            ("bits returned, closed form", self.expected_bits),
            ("leading order n*J*x", self.leading_order_qubits),
            ("gate-description bound J*x*(2^n-1)", self.no_programming_qubits),
            ("bound / measured qubits", f"{self.bound_to_measured_ratio:.4f}"),
        ]
        width = max(len(label) for label, _ in rows)
        return "\n".join(f"{label:<{width}}  {value}" for label, value in rows)


def expected_counts(n: int, x: int, J: int) -> tuple[int, int]:
    """Closed-form (qubits to server, bits to client) for one full run."""
    return n + (J - 1) * n * x, (J - 1) * n * x + n


def cost_report(transcript: Transcript, program: Program) -> CostReport:
    """Account a completed run's transcript against the closed forms."""
    params = transcript.params()
    if params is None:
        raise ValueError("incomplete transcript: missing the opening parameters")
    rounds = (program.J - 1) * program.blocks * program.x
    n_quantum = sum(isinstance(m.payload, QuantumPayload) for m in transcript.messages)
    n_classical = sum(isinstance(m.payload, ClassicalBits) for m in transcript.messages)
    last = transcript.messages[-1]
    if (n_quantum, n_classical) != (rounds + 1, rounds + 1) \
            or not isinstance(last.payload, ClassicalBits) \
            or len(last.payload.bits) != program.n:
        raise ValueError("incomplete transcript: missing protocol messages")
    qubits, bits = expected_counts(program.n, program.x, program.J)
    bound = no_programming_bound(
        BoundParams(J=program.J, k=program.x, n=program.n))
    return CostReport(
        n=program.n, m=program.m, x=program.x, J=program.J,
        measured_qubits_to_server=transcript.qubits_a2b,
        measured_bits_to_client=transcript.bits_b2a,
        expected_qubits=qubits,
        expected_bits=bits,
        leading_order_qubits=program.n * program.J * program.x,
        no_programming_qubits=bound,
        bound_to_measured_ratio=bound / transcript.qubits_a2b,
    )


def cost_trend(x: int, J: int, n_values: Sequence[int]) -> list[dict]:
    """Closed-form cost rows across register widths, for tables and figures."""
    rows = []
    for n in n_values:
        qubits, bits = expected_counts(n, x, J)
        bound = no_programming_bound(BoundParams(J=J, k=x, n=n))
        rows.append({
            "n": n,
            "protocol_qubits": qubits,
            "protocol_bits": bits,
            "leading_order_qubits": n * J * x,
            "no_programming_qubits": bound,
            "bound_to_protocol_ratio": bound / qubits,
        })
    return rows
