"""Two-party protocols for delegated diagonal gates and blind computation.

The client (Alice) owns the gates, the one-time-pad keys, and the key
ledger; the server (Bob) owns the simulated quantum register and sees only
the messages.  The two sides are separate state machines wired together by
a lock-step driver through a :class:`Channel`, which records every message
in a :class:`Transcript`.

Three drivers are exposed:

- :func:`run_iterated` -- repeated gate teleportation of one diagonal gate,
  leaving an X-string byproduct known to both sides (optionally halting
  early on an all-zero outcome);
- :func:`run_blind` -- the same with fresh Z one-time pads on every
  resource state, leaving a Z-string known only to Alice;
- :func:`run_computation` -- the full delegated computation: an opening
  padded register, alternating fixed server layers (CZ ladder on odd
  phases, Hadamards every phase) with teleported corrected gates, and a
  final X-basis readout that Alice decrypts.

:func:`direct_simulate` computes the target output distribution by plain
simulation and is the reference every protocol run is checked against;
:func:`enumerate_output_distribution` replays a protocol run over every
combination of pad and outcome bits to compare the two exactly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .diagonal import DiagonalGate, unitary_diag
from .errors import CapExceeded, SchemaError
from .statevec import (
    PauliString,
    StateVector,
    _bits_to_index,
    measure_x_all,
    x_distribution,
)
from .teleport import teleport_round

VERIFY_BRANCH_BITS_CAP = 18
PROGRAM_SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# messages, transcript, channel
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Params:
    """Public size parameters; the only thing the protocol leaks."""

    n: int
    m: int
    x: int
    J: int


@dataclass(frozen=True)
class QuantumPayload:
    state: StateVector

    @property
    def qubits(self) -> int:
        return self.state.num_qubits


@dataclass(frozen=True)
class ClassicalBits:
    bits: tuple[int, ...]


@dataclass(frozen=True)
class Message:
    direction: str  # "a2b" | "b2a"
    payload: Params | QuantumPayload | ClassicalBits


class Transcript:
    """Ordered message record with exact qubit/bit counts.

    Direction rules are enforced on append: quantum payloads flow only
    client to server, classical bits only server to client, and the Params
    header appears exactly once, first.  The Params header and counts of
    qubits/bits are the communication being accounted; the header itself is
    not counted.
    """

    def __init__(self):
        self.messages: list[Message] = []
        self._qubits_a2b = 0
        self._bits_b2a = 0

    def add(self, direction: str, payload) -> None:
        if direction not in ("a2b", "b2a"):
            raise ValueError(f"bad direction {direction!r}")
        if isinstance(payload, Params):
            if direction != "a2b" or self.messages:
                raise ValueError("Params must be the first message, client to server")
        elif isinstance(payload, QuantumPayload):
            if direction != "a2b":
                raise ValueError("quantum payloads flow client to server only")
            self._qubits_a2b += payload.qubits
        elif isinstance(payload, ClassicalBits):
            if direction != "b2a":
                raise ValueError("classical bits flow server to client only")
            self._bits_b2a += len(payload.bits)
        else:
            raise TypeError(f"unknown payload {type(payload).__name__}")
        self.messages.append(Message(direction, payload))

    @property
    def qubits_a2b(self) -> int:
        return self._qubits_a2b

    @property
    def bits_b2a(self) -> int:
        return self._bits_b2a

    def recount(self) -> tuple[int, int]:
        """Recompute both counts from the raw message list."""
        q = sum(m.payload.qubits for m in self.messages
                if isinstance(m.payload, QuantumPayload))
        b = sum(len(m.payload.bits) for m in self.messages
                if isinstance(m.payload, ClassicalBits))
        return q, b

    def params(self) -> Params | None:
        if self.messages and isinstance(self.messages[0].payload, Params):
            return self.messages[0].payload
        return None

    def jsonl_lines(self) -> list[str]:
        """One JSON object per message: direction, type, size."""
        lines = []
        for msg in self.messages:
            if isinstance(msg.payload, Params):
                rec = {"dir": msg.direction, "type": "params",
                       "params": vars(msg.payload)}
            elif isinstance(msg.payload, QuantumPayload):
                rec = {"dir": msg.direction, "type": "quantum",
                       "qubits": msg.payload.qubits}
            else:
                rec = {"dir": msg.direction, "type": "classical",
                       "bits": len(msg.payload.bits)}
            lines.append(json.dumps(rec, sort_keys=True))
        return lines

    def write_jsonl(self, path) -> None:
        with open(path, "w") as fp:
            fp.write("\n".join(self.jsonl_lines()) + "\n")


class Channel:
    """Ordered, reliable, in-process message passing that records itself."""

    def __init__(self, transcript: Transcript | None = None):
        self.transcript = transcript if transcript is not None else Transcript()

    def send_params(self, params: Params) -> Params:
        self.transcript.add("a2b", params)
        return params

    def send_state(self, state: StateVector) -> QuantumPayload:
        payload = QuantumPayload(state)
        self.transcript.add("a2b", payload)
        return payload

    def send_bits(self, bits: Sequence[int]) -> tuple[int, ...]:
        bits = tuple(int(b) for b in bits)
        self.transcript.add("b2a", ClassicalBits(bits))
        return bits


# ---------------------------------------------------------------------------
# bit sources
# ---------------------------------------------------------------------------


class RandomTape:
    """Uniform random bits from a generator."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def draw(self, k: int) -> tuple[int, ...]:
        return tuple(int(b) for b in self.rng.integers(0, 2, size=k))


class ScriptedTape:
    """Bits replayed from a fixed script (for branch enumeration and tests)."""

    def __init__(self, bits: Iterable[int]):
        self.bits = [int(b) & 1 for b in bits]
        self.pos = 0

    def draw(self, k: int) -> tuple[int, ...]:
        if self.pos + k > len(self.bits):
            raise ValueError("scripted tape exhausted")
        out = tuple(self.bits[self.pos:self.pos + k])
        self.pos += k
        return out


def resource_state(gate: DiagonalGate) -> StateVector:
    """The teleportation resource for a gate: its action on |+>^m."""
    return StateVector(gate.m, unitary_diag(gate) * 2.0 ** (-gate.m / 2.0))


# ---------------------------------------------------------------------------
# per-gate teleportation machines (client and server halves)
# ---------------------------------------------------------------------------


class _GateSender:
    """Client half of one iterated-teleportation exchange.

    Tracks the running gate (updated one level down per round), the
    accumulated X byproduct, and, when padding, the current and previous
    pad rows.
    """

    def __init__(self, gate: DiagonalGate, rounds: int, pad_tape=None):
        self.m = gate.m
        self.rounds = rounds
        self.current = gate
        self.pad_tape = pad_tape
        self.prev_pad = (0,) * gate.m
        self.last_pad = (0,) * gate.m
        self.byproduct = PauliString.identity(gate.m)

    def next_resource(self) -> StateVector:
        g = self.current
        if self.pad_tape is not None:
            pad = self.pad_tape.draw(self.m)
            mask = tuple(a ^ b for a, b in zip(pad, self.prev_pad))
            g = g.compose(DiagonalGate.zstring(mask))
            self.prev_pad = self.last_pad = pad
        return resource_state(g)

    def observe(self, s: Sequence[int]) -> None:
        self.byproduct = self.byproduct * PauliString.from_x(s)
        self.current = self.current.conjugate_update(s)


class _Teleporter:
    """Server half: holds the register and consumes resource payloads."""

    def __init__(self, register: StateVector, rng=None, outcome_tape=None):
        self.register = register
        self.rng = rng
        self.outcome_tape = outcome_tape
        self.branch_prob = 1.0

    def consume(self, payload: QuantumPayload, block_start: int = 1) -> tuple[int, ...]:
        forced = None
        if self.outcome_tape is not None:
            forced = self.outcome_tape.draw(payload.qubits)
        res = teleport_round(
            self.register, payload.state,
            block_start=block_start, rng=self.rng, forced_outcome=forced,
        )
        self.register = res.state
        self.branch_prob *= res.prob
        return res.outcome


# ---------------------------------------------------------------------------
# iterated teleportation of a single gate (plain and blind)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IteratedResult:
    byproduct: PauliString
    final: StateVector
    transcript: Transcript
    rounds: int
    branch_prob: float


@dataclass(frozen=True)
class BlindResult:
    byproduct: PauliString
    pad: PauliString  # Alice's secret
    final: StateVector
    transcript: Transcript
    branch_prob: float


def run_iterated(
    gate: DiagonalGate,
    psi: StateVector,
    rounds: int,
    *,
    rng: np.random.Generator | None = None,
    outcome_tape=None,
    channel: Channel | None = None,
    early_halt: bool = False,
) -> IteratedResult:
    """Teleport ``gate`` onto Bob's state over ``rounds`` teleportation rounds;
    the output is byproduct * gate * psi up to global phase.

    With ``early_halt`` the parties stop after any all-zero outcome (the
    running gate has collapsed to the identity, so nothing is left to send).
    """
    if gate.m != psi.num_qubits:
        raise ValueError("gate and state qubit counts differ")
    if not gate.in_family(rounds):
        raise ValueError(f"gate level {gate.level} exceeds declared level {rounds}")
    channel = channel or Channel()
    channel.send_params(Params(n=gate.m, m=gate.m, x=rounds, J=1))
    alice = _GateSender(gate, rounds)
    bob = _Teleporter(psi, rng=rng, outcome_tape=outcome_tape)
    done = 0
    for _ in range(rounds):
        payload = channel.send_state(alice.next_resource())
        s = channel.send_bits(bob.consume(payload))
        alice.observe(s)
        done += 1
        if early_halt and not any(s):
            break
    return IteratedResult(alice.byproduct, bob.register, channel.transcript,
                          done, bob.branch_prob)


def run_blind(
    gate: DiagonalGate,
    psi: StateVector,
    rounds: int,
    *,
    rng: np.random.Generator | None = None,
    pad_tape=None,
    outcome_tape=None,
    channel: Channel | None = None,
) -> BlindResult:
    """Blind variant: every resource carries a fresh Z one-time pad.

    The output is pad * byproduct * gate * psi up to global phase, where
    the pad (the last round's Z row) is known only to Alice.
    """
    if gate.m != psi.num_qubits:
        raise ValueError("gate and state qubit counts differ")
    if not gate.in_family(rounds):
        raise ValueError(f"gate level {gate.level} exceeds declared level {rounds}")
    if pad_tape is None:
        if rng is None:
            raise ValueError("need an rng or an explicit pad tape")
        pad_tape = RandomTape(rng)
    channel = channel or Channel()
    channel.send_params(Params(n=gate.m, m=gate.m, x=rounds, J=1))
    alice = _GateSender(gate, rounds, pad_tape=pad_tape)
    bob = _Teleporter(psi, rng=rng, outcome_tape=outcome_tape)
    for _ in range(rounds):
        payload = channel.send_state(alice.next_resource())
        s = channel.send_bits(bob.consume(payload))
        alice.observe(s)
    return BlindResult(alice.byproduct, PauliString.from_z(alice.last_pad),
                       bob.register, channel.transcript, bob.branch_prob)


# ---------------------------------------------------------------------------
# key ledger and correction frames
# ---------------------------------------------------------------------------


class KeyLedger:
    """Alice's private record of byproduct (x) and pad (z) bits per phase.

    Indices are 1-based; any out-of-range (j, k) reads as 0, which encodes
    both "no history before phase 1" and "no CZ neighbor beyond the chain
    ends".
    """

    def __init__(self, n: int, phases: int):
        self.n = n
        self.phases = phases
        self._x = [[0] * n for _ in range(phases + 1)]
        self._z = [[0] * n for _ in range(phases + 1)]

    def x_bit(self, j: int, k: int) -> int:
        if j < 1 or j > self.phases or k < 1 or k > self.n:
            return 0
        return self._x[j][k - 1]

    def z_bit(self, j: int, k: int) -> int:
        if j < 1 or j > self.phases or k < 1 or k > self.n:
            return 0
        return self._z[j][k - 1]

    def set_phase(self, j: int, x_bits: Sequence[int], z_bits: Sequence[int]) -> None:
        if not 1 <= j <= self.phases:
            raise ValueError(f"phase {j} out of range")
        if len(x_bits) != self.n or len(z_bits) != self.n:
            raise ValueError("ledger rows must cover all qubits")
        self._x[j] = [int(b) & 1 for b in x_bits]
        self._z[j] = [int(b) & 1 for b in z_bits]

    def x_row(self, j: int) -> tuple[int, ...]:
        return tuple(self.x_bit(j, k) for k in range(1, self.n + 1))

    def z_row(self, j: int) -> tuple[int, ...]:
        return tuple(self.z_bit(j, k) for k in range(1, self.n + 1))


def correction_bits(ledger: KeyLedger, j: int, k: int) -> tuple[int, int]:
    """Frame bits (flip, phase) for qubit k entering phase j.

    The flip bit is conjugated onto the gate as an X-string; the phase bit
    multiplies a Z.  They undo the previous phase's records after the
    Hadamard layer swapped X and Z roles, and on the appropriate parity
    they also pick up the records that the CZ ladder spread to the two
    chain neighbors one resp. two phases ago.
    """
    z, x = ledger.z_bit, ledger.x_bit
    neighbors = (k - 1, k + 1)
    if j % 2 == 0:
        flip = z(j - 1, k)
        phase = z(j - 2, k) ^ x(j - 1, k)
        for t in neighbors:
            phase ^= z(j - 3, t) ^ x(j - 2, t)
    else:
        flip = z(j - 1, k)
        for t in neighbors:
            flip ^= z(j - 2, t) ^ x(j - 1, t)
        phase = z(j - 2, k) ^ x(j - 1, k)
    return flip, phase


def simplified_correction(ledger: KeyLedger, j: int, gate: DiagonalGate) -> DiagonalGate:
    """Correction frame for the no-CZ variant where one block spans the register.

    Flip bits are last phase's pads, phase bits fold the pads of two phases
    ago with last phase's byproducts; this matches conjugating the gate with
    Hadamard-wrapped copies of the recorded Pauli rows.
    """
    if gate.m != ledger.n:
        raise ValueError("simplified correction requires a single full-width block")
    flip = ledger.z_row(j - 1)
    phase = tuple(zb ^ xb for zb, xb in zip(ledger.z_row(j - 2), ledger.x_row(j - 1)))
    return gate.correction_frame(flip, phase)


# ---------------------------------------------------------------------------
# programs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Program:
    """The client's private computation: sizes and the per-phase gate table.

    ``gates[j-1][p-1]`` is the block-p gate of phase j; each acts on m
    qubits at dyadic level at most x, with m dividing n and J even.
    """

    n: int
    m: int
    x: int
    J: int
    gates: tuple[tuple[DiagonalGate, ...], ...]

    def __post_init__(self):
        if self.m < 1 or self.n < 1 or self.n % self.m != 0:
            raise SchemaError("m must be >= 1 and divide n")
        if self.x < 2:
            raise SchemaError("dyadic level x must be at least 2")
        if self.J < 2 or self.J % 2 != 0:
            raise SchemaError("phase count J must be even and at least 2")
        if len(self.gates) != self.J:
            raise SchemaError(f"expected {self.J} phase rows, got {len(self.gates)}")
        for j, row in enumerate(self.gates, start=1):
            if len(row) != self.blocks:
                raise SchemaError(
                    f"gates[{j - 1}]: expected {self.blocks} blocks, got {len(row)}")
            for p, gate in enumerate(row, start=1):
                if gate.m != self.m:
                    raise SchemaError(f"gates[{j - 1}][{p - 1}].m: expected {self.m}")
                if not gate.in_family(self.x):
                    raise SchemaError(
                        f"gates[{j - 1}][{p - 1}].level: {gate.level} exceeds x={self.x}")

    @property
    def blocks(self) -> int:
        return self.n // self.m

    def phase_gate_diag(self, j: int) -> np.ndarray:
        """Diagonal of the full-width phase-j gate (blocks tensored in order)."""
        diag = np.ones(1, dtype=np.complex128)
        for gate in self.gates[j - 1]:
            diag = np.kron(diag, unitary_diag(gate))
        return diag

    def to_dict(self) -> dict:
        return {
            "version": PROGRAM_SCHEMA_VERSION,
            "n": self.n, "m": self.m, "x": self.x, "J": self.J,
            "gates": [[g.to_dict() for g in row] for row in self.gates],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "Program":
        if not isinstance(obj, dict):
            raise SchemaError(f"program: expected an object, got {type(obj).__name__}")
        version = obj.get("version", PROGRAM_SCHEMA_VERSION)
        if version != PROGRAM_SCHEMA_VERSION:
            raise SchemaError(f"version: unsupported schema version {version!r}")
        for key in ("n", "m", "x", "J", "gates"):
            if key not in obj:
                raise SchemaError(f"program: missing field '{key}'")
        for key in ("n", "m", "x", "J"):
            if not isinstance(obj[key], int):
                raise SchemaError(f"{key}: expected an integer")
        if not isinstance(obj["gates"], list):
            raise SchemaError("gates: expected a list of phase rows")
        rows = []
        for j, row in enumerate(obj["gates"]):
            if not isinstance(row, list):
                raise SchemaError(f"gates[{j}]: expected a list of gate objects")
            rows.append(tuple(
                DiagonalGate.from_dict(g, where=f"gates[{j}][{p}]")
                for p, g in enumerate(row)
            ))
        return cls(obj["n"], obj["m"], obj["x"], obj["J"], tuple(rows))


def load_program(path) -> Program:
    try:
        with open(path) as fp:
            obj = json.load(fp)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return Program.from_dict(obj)


def save_program(program: Program, path) -> None:
    with open(path, "w") as fp:
        json.dump(program.to_dict(), fp, indent=2, sort_keys=True)
        fp.write("\n")


# ---------------------------------------------------------------------------
# full delegated computation
# ---------------------------------------------------------------------------


class AliceClient:
    """Client state machine for the full protocol; sole owner of the ledger."""

    def __init__(self, program: Program, pad_tape):
        self.program = program
        self.pad_tape = pad_tape
        self.ledger = KeyLedger(program.n, program.J)
        self._phase_x: list[int] = []
        self._phase_z: list[int] = []

    def opening(self) -> tuple[Params, StateVector]:
        """Phase 1: the padded first-gate state and the public parameters."""
        prog = self.program
        pads = self.pad_tape.draw(prog.n)
        self.ledger.set_phase(1, (0,) * prog.n, pads)
        state = StateVector.plus(prog.n)
        state = state.apply_diagonal(prog.phase_gate_diag(1))
        state = state.apply_pauli(PauliString.from_z(pads))
        return Params(prog.n, prog.m, prog.x, prog.J), state

    def block_sender(self, j: int, p: int) -> _GateSender:
        """Pad-carrying sender for the corrected block gate of phase j."""
        prog = self.program
        lo = (p - 1) * prog.m + 1
        ks = range(lo, lo + prog.m)
        frame = [correction_bits(self.ledger, j, k) for k in ks]
        gate = prog.gates[j - 1][p - 1].correction_frame(
            [f for f, _ in frame], [z for _, z in frame])
        return _GateSender(gate, prog.x, pad_tape=self.pad_tape)

    def start_phase(self) -> None:
        self._phase_x = []
        self._phase_z = []

    def record_block(self, sender: _GateSender) -> None:
        self._phase_x.extend(sender.byproduct.x_bits)
        self._phase_z.extend(sender.last_pad)

    def finish_phase(self, j: int) -> None:
        self.ledger.set_phase(j, self._phase_x, self._phase_z)

    def decrypt(self, readout: Sequence[int]) -> tuple[int, ...]:
        """Final-phase pads XORed off the server's X-basis readout."""
        final_pads = self.ledger.z_row(self.program.J)
        return tuple(b ^ z for b, z in zip(readout, final_pads))


class BobServer:
    """Server state machine; sees only Params, payloads, and its own outcomes."""

    def __init__(self, rng=None, outcome_tape=None):
        self.rng = rng
        self.outcome_tape = outcome_tape
        self.params: Params | None = None
        self._teleporter: _Teleporter | None = None

    @property
    def register(self) -> StateVector:
        return self._teleporter.register

    @property
    def branch_prob(self) -> float:
        return self._teleporter.branch_prob

    def receive_opening(self, params: Params, payload: QuantumPayload) -> None:
        self.params = params
        self._teleporter = _Teleporter(payload.state, rng=self.rng,
                                       outcome_tape=self.outcome_tape)

    def begin_phase(self, j: int) -> None:
        reg = self._teleporter.register
        if j % 2 == 1:
            reg = reg.cz_ladder()
        self._teleporter.register = reg.hadamard_all()

    def teleport_block(self, p: int, payload: QuantumPayload) -> tuple[int, ...]:
        return self._teleporter.consume(payload, block_start=(p - 1) * self.params.m + 1)

    def readout_sample(self) -> tuple[int, ...]:
        return measure_x_all(self._teleporter.register, self.rng)

    def readout_distribution(self) -> np.ndarray:
        return x_distribution(self._teleporter.register)


@dataclass(frozen=True)
class ComputationResult:
    output: tuple[int, ...]
    transcript: Transcript
    ledger: KeyLedger


def _drive(program: Program, alice: AliceClient, bob: BobServer, channel: Channel) -> None:
    """Walk both machines through the opening and all teleportation phases."""
    params, state = alice.opening()
    channel.send_params(params)
    bob.receive_opening(params, channel.send_state(state))
    for j in range(2, program.J + 1):
        bob.begin_phase(j)
        alice.start_phase()
        for p in range(1, program.blocks + 1):
            sender = alice.block_sender(j, p)
            for _ in range(program.x):
                payload = channel.send_state(sender.next_resource())
                s = channel.send_bits(bob.teleport_block(p, payload))
                sender.observe(s)
            alice.record_block(sender)
        alice.finish_phase(j)


def run_computation(
    program: Program,
    *,
    rng: np.random.Generator | None = None,
    pad_tape=None,
    outcome_tape=None,
    channel: Channel | None = None,
) -> ComputationResult:
    """Run the full protocol once and return Alice's decrypted output bits."""
    if pad_tape is None:
        if rng is None:
            raise ValueError("need an rng or an explicit pad tape")
        pad_tape = RandomTape(rng)
    channel = channel or Channel()
    alice = AliceClient(program, pad_tape)
    bob = BobServer(rng=rng, outcome_tape=outcome_tape)
    _drive(program, alice, bob, channel)
    readout = channel.send_bits(bob.readout_sample())
    return ComputationResult(alice.decrypt(readout), channel.transcript, alice.ledger)


def direct_simulate(program: Program) -> np.ndarray:
    """Reference output distribution by straight-line simulation.

    Applies phase 1's gate to |+>^n, then per phase the CZ ladder on odd
    phases, the Hadamard layer, and the phase gate; returns the exact
    probability vector of the final X-basis readout.
    """
    state = StateVector.plus(program.n).apply_diagonal(program.phase_gate_diag(1))
    for j in range(2, program.J + 1):
        if j % 2 == 1:
            state = state.cz_ladder()
        state = state.hadamard_all().apply_diagonal(program.phase_gate_diag(j))
    return x_distribution(state)


# ---------------------------------------------------------------------------
# exhaustive verification
# ---------------------------------------------------------------------------


def branch_bit_counts(program: Program) -> tuple[int, int]:
    """(pad bits, outcome bits) one full protocol run consumes."""
    teleport_bits = (program.J - 1) * program.n * program.x
    return program.n + teleport_bits, teleport_bits


@dataclass(frozen=True)
class EnumerationResult:
    distribution: np.ndarray
    branches: int
    weight_total: float
    max_branch_deviation: float  # vs the reference, if one was given


def enumerate_output_distribution(
    program: Program,
    *,
    reference: np.ndarray | None = None,
    cap_bits: int = VERIFY_BRANCH_BITS_CAP,
) -> EnumerationResult:
    """Accumulate the decrypted output distribution over every branch.

    Every combination of pad bits and teleportation outcomes is replayed
    through the real two-party machinery; outcome branches are weighted by
    their measured Born probabilities and the final readout is folded in
    exactly.  Raises :class:`CapExceeded` when the branch space is too
    large to enumerate.
    """
    pad_bits, outcome_bits = branch_bit_counts(program)
    total_bits = pad_bits + outcome_bits
    if total_bits > cap_bits:
        raise CapExceeded(
            f"branch enumeration needs 2^{total_bits} runs (cap 2^{cap_bits}); "
            "use sampling instead")
    dist = np.zeros(2**program.n)
    weight_total = 0.0
    max_dev = 0.0
    pad_weight = 2.0**-pad_bits
    for branch in range(2**total_bits):
        bits = [(branch >> i) & 1 for i in range(total_bits)]
        weight, branch_dist = _exact_branch(
            program, ScriptedTape(bits[:pad_bits]), ScriptedTape(bits[pad_bits:]))
        weight *= pad_weight
        dist += weight * branch_dist
        weight_total += weight
        if reference is not None:
            max_dev = max(max_dev, float(np.max(np.abs(branch_dist - reference))))
    return EnumerationResult(dist, 2**total_bits, weight_total, max_dev)


def _exact_branch(program: Program, pad_tape, outcome_tape) -> tuple[float, np.ndarray]:
    """One scripted run; returns its outcome weight and exact decrypted
    readout distribution."""
    channel = Channel()
    alice = AliceClient(program, pad_tape)
    bob = BobServer(outcome_tape=outcome_tape)
    _drive(program, alice, bob, channel)
    readout_dist = bob.readout_distribution()
    pad_index = _bits_to_index(alice.ledger.z_row(program.J))
    decrypted = readout_dist[np.arange(len(readout_dist)) ^ pad_index]
    return bob.branch_prob, decrypted


def _exact_branch_messages(program: Program, pad_script, outcome_script):
    """One scripted run; returns its outcome weight and the sent states."""
    channel = Channel()
    alice = AliceClient(program, ScriptedTape(pad_script))
    bob = BobServer(outcome_tape=ScriptedTape(outcome_script))
    _drive(program, alice, bob, channel)
    states = [m.payload.state for m in channel.transcript.messages
              if isinstance(m.payload, QuantumPayload)]
    return bob.branch_prob, states


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    branches: int
    max_entry_error: float
    max_branch_error: float


def verify_program(program: Program, tol: float = 1e-9,
                   cap_bits: int = VERIFY_BRANCH_BITS_CAP) -> VerifyResult:
    """Exhaustively compare the protocol's output distribution to
    :func:`direct_simulate` (per entry, and per branch for diagnostics)."""
    reference = direct_simulate(program)
    res = enumerate_output_distribution(program, reference=reference, cap_bits=cap_bits)
    err = float(np.max(np.abs(res.distribution - reference)))
    err = max(err, abs(res.weight_total - 1.0))
    return VerifyResult(err <= tol, res.branches, err, res.max_branch_deviation)
