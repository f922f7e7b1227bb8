"""Single gate-teleportation round.

The server holds a register and receives a fresh m-qubit resource state.
One round entangles the resource onto a contiguous m-qubit block of the
register with transversal CNOTs (resource qubit k controls block qubit k),
measures the block qubits in the computational basis, and lets the
resource qubits take the block's place (the measured qubits are dropped
rather than materializing a swap).

When the resource is D|+>^m for a diagonal D, the round's net effect on
the block is D X^s, where s is the outcome string and every s occurs with
probability exactly 2**-m.  That postcondition is what the rest of the
package relies on; the circuit here is one concrete realization of it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .statevec import StateVector, measure, measure_forced


@dataclass(frozen=True)
class TeleportResult:
    outcome: tuple[int, ...]
    state: StateVector
    prob: float


def teleport_round(
    register: StateVector,
    resource: StateVector,
    *,
    block_start: int = 1,
    rng: np.random.Generator | None = None,
    forced_outcome: Sequence[int] | None = None,
) -> TeleportResult:
    """Run one teleportation round on the register block starting at ``block_start``.

    Outcomes are sampled from ``rng`` unless ``forced_outcome`` pins them;
    ``prob`` is the Born probability of the branch taken either way.
    """
    m = resource.num_qubits
    n = register.num_qubits
    if m < 1 or block_start < 1 or block_start + m - 1 > n:
        raise ValueError(
            f"resource of {m} qubits does not fit register of {n} at qubit {block_start}"
        )
    if forced_outcome is None and rng is None:
        raise ValueError("need an rng or a forced outcome")

    joint = register.tensor(resource)
    block = tuple(range(block_start, block_start + m))
    for k in range(m):
        joint = joint.apply_cnot(control=n + 1 + k, target=block_start + k)

    if forced_outcome is not None:
        if len(forced_outcome) != m:
            raise ValueError("forced outcome length must equal resource size")
        bits = tuple(int(b) for b in forced_outcome)
    else:
        bits, _ = measure(joint, block, rng)
    prob, collapsed = measure_forced(joint, block, bits)

    # collapsed qubit order: pre-block, post-block, resource; move the
    # resource qubits into the block position.
    order = (
        list(range(1, block_start))
        + list(range(n - m + 1, n + 1))
        + list(range(block_start, n - m + 1))
    )
    return TeleportResult(bits, collapsed.permute(order), prob)
