"""Exact algebra of diagonal gates with dyadic phase angles.

A gate on m qubits is stored as an integer angle table: ``numerators[j]``
(j in 0..2^m-1) is the coefficient r_j of the Z-string
``Z^{j_1} x ... x Z^{j_m}`` in the exponent, with angle ``r_j * pi / 2**level``.
Bit j_1 (qubit 1) is the most significant bit of j, matching
:mod:`itbqc.statevec`.

Canonical form, used for all stored gates:

- ``numerators[0] == 0``: the all-identity term is a pure global phase and
  gates are only meaningful up to global phase;
- every entry lies in ``[0, 2**level)``: adding pi to any single angle also
  changes only the global phase;
- the level is minimal: while every entry is even the table is rescaled to
  level-1.  Level 0 is the identity; level-1 gates are Z-strings up to
  phase.

Equality of two DiagonalGate values is equality of canonical tables.  Note
that distinct canonical tables can still describe the same operator up to
global phase (e.g. two level-1 tables whose Z-strings multiply out the same
way), so operator-level comparisons should go through :func:`unitary_diag`.

All arithmetic on numerators is exact integer arithmetic; phases are taken
mod 2*pi, i.e. numerators mod ``2**(level+1)``, with the global-phase
quotient applied at canonicalization.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import pi
from typing import Sequence

import numpy as np

from .errors import SchemaError
from .statevec import _bits_to_index


@dataclass(frozen=True)
class DiagonalGate:
    m: int
    level: int
    numerators: tuple[int, ...]

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("gate needs at least one qubit")
        if self.level < 0:
            raise ValueError("negative level")
        if len(self.numerators) != 2**self.m:
            raise ValueError(
                f"angle table has {len(self.numerators)} entries, expected {2**self.m}"
            )

    # -- construction -------------------------------------------------------

    @classmethod
    def create(cls, m: int, level: int, numerators: Sequence[int]) -> "DiagonalGate":
        """Build a gate from a raw angle table, canonicalizing it."""
        if len(numerators) != 2**m:
            raise ValueError(f"angle table must have {2**m} entries")
        r = [int(x) % 2**level if level > 0 else 0 for x in numerators]
        r[0] = 0
        while level > 0 and all(x % 2 == 0 for x in r):
            r = [x // 2 for x in r]
            level -= 1
        return cls(m, level, tuple(r))

    @classmethod
    def identity(cls, m: int) -> "DiagonalGate":
        return cls(m, 0, (0,) * 2**m)

    @classmethod
    def zstring(cls, z_bits: Sequence[int]) -> "DiagonalGate":
        """The Pauli-Z string with the given exponents, up to global phase."""
        m = len(z_bits)
        r = [0] * 2**m
        j = _bits_to_index(z_bits)
        if j:
            r[j] = 1
        return cls.create(m, 1, r)

    def is_identity(self) -> bool:
        return self.level == 0

    # -- representation conversions ------------------------------------------

    def phase_numerator(self, b: int) -> int:
        """Phase of diagonal entry b, in units of pi/2**level, mod 2**(level+1)."""
        if not 0 <= b < 2**self.m:
            raise ValueError(f"basis index {b} out of range")
        total = 0
        for j, r in enumerate(self.numerators):
            if r:
                total += -r if (j & b).bit_count() & 1 else r
        return total % 2 ** (self.level + 1)

    def phase_numerators(self) -> tuple[int, ...]:
        """All diagonal phases at once (integer Walsh-Hadamard transform)."""
        a = list(self.numerators)
        h = 1
        while h < len(a):
            for i in range(0, len(a), 2 * h):
                for j in range(i, i + h):
                    a[j], a[j + h] = a[j] + a[j + h], a[j] - a[j + h]
            h *= 2
        mod = 2 ** (self.level + 1)
        return tuple(x % mod for x in a)

    @classmethod
    def from_phase_numerators(cls, m: int, level: int, phases: Sequence[int]) -> "DiagonalGate":
        """Inverse of :meth:`phase_numerators`, up to global phase.

        Raises ValueError if the phase table is not realized by any gate at
        this level (entries are interpreted mod ``2**(level+1)``).
        """
        if len(phases) != 2**m:
            raise ValueError(f"phase table must have {2**m} entries")
        mod = 2 ** (level + 1)
        d = [(int(p) - int(phases[0])) % mod for p in phases]
        a = list(d)
        h = 1
        while h < len(a):
            for i in range(0, len(a), 2 * h):
                for j in range(i, i + h):
                    a[j], a[j + h] = a[j] + a[j + h], a[j] - a[j + h]
            h *= 2
        if any(s % 2**m for s in a):
            raise ValueError("not a dyadic phase table at this level")
        gate = cls.create(m, level, [(s // 2**m) % 2**level if level else 0 for s in a])
        back = gate.phase_numerators()
        if any((d[b] - back[b] + back[0]) % mod for b in range(2**m)):
            raise ValueError("phase table is not realized by a gate at this level")
        return gate

    # -- level bookkeeping ----------------------------------------------------

    def in_family(self, level: int) -> bool:
        """Whether the gate lies in the dyadic family at the given level."""
        return self.level <= level

    def at_level(self, level: int) -> tuple[int, ...]:
        """Angle table rescaled to a coarser-grained level >= the canonical one."""
        if level < self.level:
            raise ValueError(f"gate at level {self.level} not representable at {level}")
        scale = 2 ** (level - self.level)
        return tuple(r * scale for r in self.numerators)

    # -- algebra ---------------------------------------------------------------

    def compose(self, other: "DiagonalGate") -> "DiagonalGate":
        """Operator product (diagonal gates commute), up to global phase."""
        if self.m != other.m:
            raise ValueError("qubit count mismatch")
        level = max(self.level, other.level)
        a = self.at_level(level)
        b = other.at_level(level)
        return DiagonalGate.create(self.m, level, [x + y for x, y in zip(a, b)])

    def dagger(self) -> "DiagonalGate":
        return DiagonalGate.create(self.m, self.level, [-r for r in self.numerators])

    def conjugate_x(self, flip_bits: Sequence[int]) -> "DiagonalGate":
        """Conjugation by an X-string: negates terms that anticommute with it."""
        a = _bits_to_index(self._check_bits(flip_bits))
        return DiagonalGate.create(
            self.m,
            self.level,
            [-r if (j & a).bit_count() & 1 else r for j, r in enumerate(self.numerators)],
        )

    def conjugate_update(self, flip_bits: Sequence[int]) -> "DiagonalGate":
        """The iterated-teleportation update: X-string conj times own inverse.

        For a gate D at level L and X-string F this returns F D F D^dagger,
        which is always representable one level down: terms commuting with F
        cancel exactly and the rest double their angle.
        """
        a = _bits_to_index(self._check_bits(flip_bits))
        if self.level == 0:
            return DiagonalGate.identity(self.m)
        mod = 2 ** (self.level - 1)
        return DiagonalGate.create(
            self.m,
            self.level - 1,
            [(-r) % mod if (j & a).bit_count() & 1 and mod > 1 else 0
             for j, r in enumerate(self.numerators)],
        )

    def correction_frame(self, flip_bits: Sequence[int], phase_bits: Sequence[int]) -> "DiagonalGate":
        """Conjugate by an X-string and multiply by a Z-string.

        Returns (X^f) D (Z^p X^f) up to global phase; this is the frame
        adjustment that re-targets a gate around known Pauli records.  The
        result stays diagonal, at level max(level, 1).
        """
        self._check_bits(flip_bits)
        self._check_bits(phase_bits)
        level = max(self.level, 1)
        r = list(self.conjugate_x(flip_bits).at_level(level))
        zj = _bits_to_index(phase_bits)
        if zj:
            r[zj] += 2 ** (level - 1)
        return DiagonalGate.create(self.m, level, r)

    def _check_bits(self, bits: Sequence[int]) -> Sequence[int]:
        if len(bits) != self.m:
            raise ValueError(f"bit vector length {len(bits)} != {self.m} qubits")
        return bits

    # -- serialization -----------------------------------------------------------

    def to_dict(self) -> dict:
        """JSON form; ``numerators[j]`` indexed with qubit 1 as the MSB of j."""
        return {"m": self.m, "level": self.level, "numerators": list(self.numerators)}

    @classmethod
    def from_dict(cls, obj: dict, where: str = "gate") -> "DiagonalGate":
        if not isinstance(obj, dict):
            raise SchemaError(f"{where}: expected an object, got {type(obj).__name__}")
        for key in ("m", "level", "numerators"):
            if key not in obj:
                raise SchemaError(f"{where}: missing field '{key}'")
        m, level, nums = obj["m"], obj["level"], obj["numerators"]
        if not isinstance(m, int) or m < 1:
            raise SchemaError(f"{where}.m: expected a positive integer")
        if not isinstance(level, int) or level < 0:
            raise SchemaError(f"{where}.level: expected a non-negative integer")
        if not isinstance(nums, list) or len(nums) != 2**m:
            raise SchemaError(f"{where}.numerators: expected a list of {2**m} integers")
        if not all(isinstance(x, int) for x in nums):
            raise SchemaError(f"{where}.numerators: entries must be integers")
        return cls.create(m, level, nums)

    def __str__(self) -> str:
        return f"DiagonalGate(m={self.m}, level={self.level})"


def random_gate(m: int, level: int, rng: np.random.Generator) -> DiagonalGate:
    """Uniform random angle table at the given level (then canonicalized)."""
    return DiagonalGate.create(m, level, [_random_dyadic(level, rng) for _ in range(2**m)])


def _random_dyadic(level: int, rng: np.random.Generator) -> int:
    # power-of-two range, so masking raw bytes is exactly uniform
    if level == 0:
        return 0
    nbytes = (level + 7) // 8
    return int.from_bytes(rng.bytes(nbytes), "big") & (2**level - 1)


@lru_cache(maxsize=4096)
def unitary_diag(gate: DiagonalGate) -> np.ndarray:
    """Diagonal of the unitary as a complex vector (read-only, cached)."""
    unit = pi / 2**gate.level
    diag = np.exp(1j * np.array([float(p) for p in gate.phase_numerators()]) * unit)
    diag.setflags(write=False)
    return diag
