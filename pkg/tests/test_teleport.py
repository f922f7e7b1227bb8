import numpy as np
import pytest

import matrix_oracle as mo
from itbqc.diagonal import DiagonalGate, random_gate, unitary_diag
from itbqc.protocol import resource_state
from itbqc.statevec import PauliString, StateVector, fidelity_up_to_phase, random_state
from itbqc.teleport import teleport_round


def expected_output(register, gate, s, block_start=1):
    """Postcondition target: the gate times the outcome X-string on the block."""
    return register.apply_pauli(PauliString.from_x(s), start=block_start) \
                   .apply_diagonal(unitary_diag(gate), start=block_start)


class TestFrozenCases:
    def test_identity_resource_zero_outcome_is_noop(self):
        psi = random_state(2, np.random.default_rng(0))
        res = teleport_round(psi, resource_state(DiagonalGate.identity(2)),
                             forced_outcome=(0, 0))
        assert fidelity_up_to_phase(res.state, psi) > 1 - 1e-12

    def test_identity_resource_unit_outcome_is_pure_byproduct(self):
        psi = random_state(2, np.random.default_rng(1))
        res = teleport_round(psi, resource_state(DiagonalGate.identity(2)),
                             forced_outcome=(1, 0))
        want = psi.apply_pauli(PauliString.from_x((1, 0)))
        assert fidelity_up_to_phase(res.state, want) > 1 - 1e-12

    def test_quarter_turn_on_zero_against_dense_circuit(self):
        # independent oracle: explicit two-qubit circuit, CNOT then projector
        gate = DiagonalGate.create(1, 2, [0, 1])
        psi = StateVector.basis(1, [0])
        res = teleport_round(psi, resource_state(gate), forced_outcome=(1,))

        joint = np.kron(psi.amps, np.diag(mo.diag_gate_matrix(1, 2, [0, 1])) / np.sqrt(2))
        joint = mo.cnot_matrix(2, 2, 1) @ joint  # resource (qubit 2) controls
        branch = joint[2:]  # register qubit = 1
        branch = branch / np.linalg.norm(branch)
        assert mo.equal_up_to_phase(res.state.amps, branch)
        # which is exp(-i pi/4)|1> up to phase
        assert mo.equal_up_to_phase(res.state.amps, [0.0, np.exp(-1j * np.pi / 4)])


class TestPostcondition:
    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_every_outcome(self, m):
        rng = np.random.default_rng(100 + m)
        for _ in range(8):
            gate = random_gate(m, int(rng.integers(0, 5)), rng)
            psi = random_state(m, rng)
            for s_int in range(2**m):
                s = tuple((s_int >> (m - 1 - k)) & 1 for k in range(m))
                res = teleport_round(psi, resource_state(gate), forced_outcome=s)
                assert fidelity_up_to_phase(res.state, expected_output(psi, gate, s)) > 1 - 1e-10

    def test_block_offsets(self):
        rng = np.random.default_rng(200)
        for _ in range(10):
            m = int(rng.integers(1, 3))
            n = m + int(rng.integers(0, 3))
            start = int(rng.integers(1, n - m + 2))
            gate = random_gate(m, 3, rng)
            psi = random_state(n, rng)
            s = tuple(int(b) for b in rng.integers(0, 2, m))
            res = teleport_round(psi, resource_state(gate),
                                 block_start=start, forced_outcome=s)
            want = expected_output(psi, gate, s, block_start=start)
            assert fidelity_up_to_phase(res.state, want) > 1 - 1e-10

    def test_outcomes_are_uniform(self):
        rng = np.random.default_rng(300)
        for m in (1, 2):
            gate = random_gate(m, 4, rng)
            psi = random_state(m, rng)
            for s_int in range(2**m):
                s = tuple((s_int >> (m - 1 - k)) & 1 for k in range(m))
                res = teleport_round(psi, resource_state(gate), forced_outcome=s)
                assert abs(res.prob - 2.0**-m) < 1e-10

    def test_sampled_path_matches_forced(self):
        gate = random_gate(2, 3, np.random.default_rng(7))
        psi = random_state(2, np.random.default_rng(8))
        res = teleport_round(psi, resource_state(gate), rng=np.random.default_rng(9))
        redo = teleport_round(psi, resource_state(gate), forced_outcome=res.outcome)
        assert np.allclose(res.state.amps, redo.state.amps)
        assert abs(res.prob - redo.prob) < 1e-12


class TestErrors:
    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            teleport_round(StateVector.plus(1), StateVector.plus(2),
                           forced_outcome=(0, 0))

    def test_block_out_of_range(self):
        with pytest.raises(ValueError):
            teleport_round(StateVector.plus(2), StateVector.plus(2),
                           block_start=2, forced_outcome=(0, 0))

    def test_needs_rng_or_outcome(self):
        with pytest.raises(ValueError):
            teleport_round(StateVector.plus(1), StateVector.plus(1))

    def test_forced_length(self):
        with pytest.raises(ValueError):
            teleport_round(StateVector.plus(1), StateVector.plus(1),
                           forced_outcome=(0, 1))
