"""Dense statevector backend for small registers.

Conventions used throughout the package:

- Qubits are numbered 1..q and qubit 1 is the MOST significant bit of the
  basis index, i.e. basis state ``|b_1 b_2 ... b_q>`` has index
  ``sum(b_k * 2**(q-k))``.  Reshaping the amplitude vector to ``[2]*q``
  therefore puts qubit k on axis k-1.
- A StateVector is a value: every operation returns a fresh state and never
  mutates its input, so states can be cloned and shared freely.
- Global phase is never tracked; state comparisons go through
  :func:`fidelity_up_to_phase`.
- Registers are capped at 12 qubits (4096 amplitudes); this backend exists
  for desk-scale verification, not for large simulations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded

QUBIT_CAP = 12


@dataclass(frozen=True)
class PauliString:
    """Tensor product of X^x Z^z factors, one per qubit, up to global phase.

    Composition is bitwise XOR of the exponent vectors; the accumulated
    +/-1/i phases are deliberately dropped.
    """

    x_bits: tuple[int, ...]
    z_bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.x_bits) != len(self.z_bits):
            raise ValueError("x and z exponent vectors must have equal length")
        if any(b not in (0, 1) for b in self.x_bits + self.z_bits):
            raise ValueError("Pauli exponents must be 0 or 1")

    @property
    def n(self) -> int:
        return len(self.x_bits)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls((0,) * n, (0,) * n)

    @classmethod
    def from_x(cls, bits: Iterable[int]) -> "PauliString":
        bits = tuple(int(b) for b in bits)
        return cls(bits, (0,) * len(bits))

    @classmethod
    def from_z(cls, bits: Iterable[int]) -> "PauliString":
        bits = tuple(int(b) for b in bits)
        return cls((0,) * len(bits), bits)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n != other.n:
            raise ValueError("length mismatch")
        return PauliString(
            tuple(a ^ b for a, b in zip(self.x_bits, other.x_bits)),
            tuple(a ^ b for a, b in zip(self.z_bits, other.z_bits)),
        )

    def is_identity(self) -> bool:
        return not any(self.x_bits) and not any(self.z_bits)

    def __str__(self) -> str:
        if self.is_identity():
            return "I"
        parts = []
        for k, (x, z) in enumerate(zip(self.x_bits, self.z_bits), start=1):
            if x and z:
                parts.append(f"X{k}Z{k}")
            elif x:
                parts.append(f"X{k}")
            elif z:
                parts.append(f"Z{k}")
        return ".".join(parts)


@dataclass(frozen=True)
class StateVector:
    """Normalized amplitude vector over ``num_qubits`` qubits.

    ``num_qubits == 0`` (a single scalar amplitude) is allowed so that
    measuring out an entire register leaves a well-defined empty state.
    """

    num_qubits: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.num_qubits < 0:
            raise ValueError("negative qubit count")
        if self.num_qubits > QUBIT_CAP:
            raise CapExceeded(
                f"{self.num_qubits} qubits exceeds the {QUBIT_CAP}-qubit cap"
            )
        arr = np.asarray(self.amps, dtype=np.complex128)
        if arr.shape != (2**self.num_qubits,):
            raise ValueError(
                f"amplitude vector has shape {arr.shape}, expected ({2**self.num_qubits},)"
            )
        object.__setattr__(self, "amps", arr)

    # -- constructors ------------------------------------------------------

    @classmethod
    def plus(cls, q: int) -> "StateVector":
        """Uniform superposition |+>^q; every amplitude equals 2**(-q/2)."""
        if q < 1:
            raise CapExceeded("qubit count must be at least 1")
        if q > QUBIT_CAP:
            raise CapExceeded(f"{q} qubits exceeds the {QUBIT_CAP}-qubit cap")
        return cls(q, np.full(2**q, 2.0 ** (-q / 2.0), dtype=np.complex128))

    @classmethod
    def basis(cls, q: int, bits: Sequence[int]) -> "StateVector":
        """Computational basis state |b_1 ... b_q>."""
        if len(bits) != q:
            raise ValueError("bit string length must equal qubit count")
        amps = np.zeros(2**q, dtype=np.complex128)
        amps[_bits_to_index(bits)] = 1.0
        return cls(q, amps)

    # -- helpers -----------------------------------------------------------

    def _tensorized(self) -> np.ndarray:
        return self.amps.reshape([2] * self.num_qubits)

    def norm_error(self) -> float:
        return abs(float(np.sum(np.abs(self.amps) ** 2)) - 1.0)

    # -- unitary operations (all pure) ------------------------------------

    def apply_pauli(self, pauli: PauliString, start: int = 1) -> "StateVector":
        """Apply a Pauli string to qubits ``start .. start+len-1``.

        The exact action is (P psi)(b) = (-1)^(z.(b^x)) psi(b^x) on the
        targeted qubits; the norm is preserved.
        """
        if start < 1 or start + pauli.n - 1 > self.num_qubits:
            raise ValueError(
                f"Pauli of length {pauli.n} at qubit {start} does not fit in "
                f"{self.num_qubits} qubits"
            )
        arr = self._tensorized().copy()
        for k, z in enumerate(pauli.z_bits):
            if z:
                axis = start - 1 + k
                sign = np.array([1.0, -1.0]).reshape(
                    [2 if i == axis else 1 for i in range(self.num_qubits)]
                )
                arr = arr * sign
        for k, x in enumerate(pauli.x_bits):
            if x:
                arr = np.flip(arr, axis=start - 1 + k)
        return StateVector(self.num_qubits, arr.reshape(-1))

    def hadamard_all(self) -> "StateVector":
        """Hadamard on every qubit: normalized Walsh-Hadamard transform."""
        a = self.amps.copy()
        h = 1
        n = len(a)
        while h < n:
            a = a.reshape(-1, 2, h)
            top = a[:, 0, :] + a[:, 1, :]
            bot = a[:, 0, :] - a[:, 1, :]
            a = np.stack([top, bot], axis=1).reshape(-1)
            h *= 2
        return StateVector(self.num_qubits, a * 2.0 ** (-self.num_qubits / 2.0))

    def cz_ladder(self) -> "StateVector":
        """Controlled-Z between each neighboring pair (1,2), (2,3), ...

        Amplitude b picks up (-1)**(number of adjacent 11 pairs in b); a
        single qubit is the empty ladder and is left unchanged.
        """
        if self.num_qubits < 1:
            raise ValueError("cz_ladder needs at least one qubit")
        return StateVector(self.num_qubits, self.amps * _cz_ladder_signs(self.num_qubits))

    def apply_cnot(self, control: int, target: int) -> "StateVector":
        """CNOT with the given 1-based control and target qubits."""
        q = self.num_qubits
        if not (1 <= control <= q and 1 <= target <= q) or control == target:
            raise ValueError(f"bad CNOT qubits ({control}, {target}) on {q} qubits")
        arr = self._tensorized().copy()
        sel = [slice(None)] * q
        sel[control - 1] = 1
        sel = tuple(sel)
        arr[sel] = np.flip(arr[sel], axis=target - 1 if target < control else target - 2)
        return StateVector(q, arr.reshape(-1))

    def apply_diagonal(self, diag: np.ndarray, start: int = 1) -> "StateVector":
        """Multiply by a diagonal unitary acting on a contiguous qubit block."""
        m = int(np.log2(len(diag)))
        if 2**m != len(diag):
            raise ValueError("diagonal length must be a power of two")
        if start < 1 or start + m - 1 > self.num_qubits:
            raise ValueError("diagonal block out of range")
        pre = 2 ** (start - 1)
        post = 2 ** (self.num_qubits - start - m + 1)
        arr = self.amps.reshape(pre, 2**m, post) * np.asarray(diag).reshape(1, -1, 1)
        return StateVector(self.num_qubits, arr.reshape(-1))

    def tensor(self, other: "StateVector") -> "StateVector":
        """Combined register; ``other``'s qubits are appended after ours."""
        return StateVector(
            self.num_qubits + other.num_qubits, np.kron(self.amps, other.amps)
        )

    def permute(self, order: Sequence[int]) -> "StateVector":
        """Reorder qubits: new qubit i is old qubit ``order[i-1]`` (1-based)."""
        if sorted(order) != list(range(1, self.num_qubits + 1)):
            raise ValueError(f"{order} is not a permutation of 1..{self.num_qubits}")
        arr = self._tensorized().transpose([o - 1 for o in order])
        return StateVector(self.num_qubits, arr.reshape(-1).copy())


def _bits_to_index(bits: Sequence[int]) -> int:
    idx = 0
    for b in bits:
        idx = (idx << 1) | (int(b) & 1)
    return idx


def _index_to_bits(idx: int, n: int) -> tuple[int, ...]:
    return tuple((idx >> (n - 1 - k)) & 1 for k in range(n))


_CZ_SIGN_CACHE: dict[int, np.ndarray] = {}


def _cz_ladder_signs(q: int) -> np.ndarray:
    signs = _CZ_SIGN_CACHE.get(q)
    if signs is None:
        idx = np.arange(2**q, dtype=np.int64)
        pairs = idx & (idx >> 1)
        parity = np.zeros_like(idx)
        while pairs.any():
            parity ^= pairs & 1
            pairs >>= 1
        signs = np.where(parity & 1, -1.0, 1.0)
        signs.setflags(write=False)
        _CZ_SIGN_CACHE[q] = signs
    return signs


# -- measurement ----------------------------------------------------------


def _marginal_probs(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    axes = tuple(i for i in range(state.num_qubits) if i + 1 not in qubits)
    probs = np.abs(state._tensorized()) ** 2
    if axes:
        probs = probs.sum(axis=axes)
    # axes of the reduced tensor follow the qubits' original order, not the
    # caller's order; reorder to match the requested tuple.
    kept = sorted(qubits)
    perm = [kept.index(qb) for qb in qubits]
    return probs.transpose(perm).reshape(-1)


def _collapse(state: StateVector, qubits: Sequence[int], bits: Sequence[int]) -> tuple[float, StateVector]:
    """Project onto the given outcome bits and remove the measured qubits."""
    arr = state._tensorized()
    sel: list[object] = [slice(None)] * state.num_qubits
    for qb, b in zip(qubits, bits):
        sel[qb - 1] = int(b)
    sub = arr[tuple(sel)].reshape(-1)
    prob = float(np.sum(np.abs(sub) ** 2))
    if prob <= 0.0:
        return 0.0, StateVector(state.num_qubits - len(qubits), np.zeros_like(sub))
    return prob, StateVector(state.num_qubits - len(qubits), sub / np.sqrt(prob))


def _check_qubit_set(state: StateVector, qubits: Sequence[int]) -> None:
    if not qubits:
        raise ValueError("empty qubit set")
    if len(set(qubits)) != len(qubits):
        raise ValueError("duplicate qubits in measurement set")
    if any(qb < 1 or qb > state.num_qubits for qb in qubits):
        raise ValueError(f"qubits {qubits} out of range for {state.num_qubits}")


def measure(state: StateVector, qubits: Sequence[int], rng: np.random.Generator) -> tuple[tuple[int, ...], StateVector]:
    """Sample a computational-basis measurement of the given qubits.

    Returns the sampled bits (in the order of ``qubits``) and the
    renormalized post-measurement state with the measured qubits removed.
    """
    _check_qubit_set(state, qubits)
    probs = _marginal_probs(state, qubits)
    outcome = int(rng.choice(len(probs), p=probs / probs.sum()))
    bits = _index_to_bits(outcome, len(qubits))
    _, collapsed = _collapse(state, qubits, bits)
    return bits, collapsed


def measure_forced(state: StateVector, qubits: Sequence[int], bits: Sequence[int]) -> tuple[float, StateVector]:
    """Deterministic measurement: force the given outcome.

    Returns the branch probability along with the collapsed state.  Forcing
    an amplitude-zero branch raises, since no physical run produces it.
    """
    _check_qubit_set(state, qubits)
    if len(bits) != len(qubits):
        raise ValueError("outcome length must match qubit set")
    prob, collapsed = _collapse(state, qubits, bits)
    if prob <= 1e-14:
        raise ValueError(f"forced outcome {tuple(bits)} has zero probability")
    return prob, collapsed


def branch_measure(state: StateVector, qubits: Sequence[int]) -> list[tuple[tuple[int, ...], float, StateVector]]:
    """Enumerate all measurement branches with their exact weights.

    Zero-probability branches are omitted; the returned weights sum to 1.
    """
    _check_qubit_set(state, qubits)
    branches = []
    for outcome in range(2 ** len(qubits)):
        bits = _index_to_bits(outcome, len(qubits))
        prob, collapsed = _collapse(state, qubits, bits)
        if prob > 1e-14:
            branches.append((bits, prob, collapsed))
    return branches


def measure_x_all(state: StateVector, rng: np.random.Generator) -> tuple[int, ...]:
    """Measure every qubit in the X basis (Hadamard, then computational)."""
    bits, _ = measure(state.hadamard_all(), tuple(range(1, state.num_qubits + 1)), rng)
    return bits


def x_distribution(state: StateVector) -> np.ndarray:
    """Exact probability vector of an all-qubit X-basis measurement."""
    return np.abs(state.hadamard_all().amps) ** 2


# -- comparisons and randomness -------------------------------------------


def fidelity_up_to_phase(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, insensitive to global phase."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("dimension mismatch")
    return float(np.abs(np.vdot(a.amps, b.amps)) ** 2)


def random_state(q: int, rng: np.random.Generator) -> StateVector:
    """Haar-ish random state (normalized complex Gaussian vector)."""
    v = rng.normal(size=2**q) + 1j * rng.normal(size=2**q)
    return StateVector(q, v / np.linalg.norm(v))
