import json

import numpy as np
import pytest

from conftest import fixture_program
from itbqc.analysis import (
    BoundParams,
    averaged_client_view,
    blindness_distance,
    cost_report,
    cost_trend,
    expected_counts,
    gate_family_size,
    no_programming_bound,
    pigeonhole_bound,
    trace_distance,
    view_distance,
)
from itbqc.diagonal import DiagonalGate, random_gate
from itbqc.errors import CapExceeded
from itbqc.protocol import Transcript, run_computation
from itbqc.statevec import StateVector


class TestTraceDistance:
    def test_identical(self):
        rho = np.diag([0.5, 0.5])
        assert trace_distance(rho, rho) < 1e-15

    def test_pure_vs_mixed(self):
        pure = np.diag([1.0, 0.0])
        mixed = np.eye(2) / 2
        assert abs(trace_distance(pure, mixed) - 0.5) < 1e-12

    def test_orthogonal_pure_states(self):
        a = np.diag([1.0, 0.0])
        b = np.diag([0.0, 1.0])
        assert abs(trace_distance(a, b) - 1.0) < 1e-12


class TestBlindness:
    @pytest.mark.parametrize("m,rounds", [(1, 1), (1, 2), (2, 1), (2, 2)])
    def test_view_is_maximally_mixed(self, m, rounds):
        gate = random_gate(m, rounds, np.random.default_rng(m * 5 + rounds))
        assert blindness_distance(gate, rounds) < 1e-10

    def test_any_input_state(self):
        gate = DiagonalGate.create(1, 2, [0, 3])
        for bits in ((0,), (1,)):
            rho = averaged_client_view(gate, 2, input_state=StateVector.basis(1, bits))
            assert trace_distance(rho, np.eye(4) / 4) < 1e-10

    def test_view_independent_of_gate(self):
        a = DiagonalGate.create(1, 2, [0, 1])
        b = DiagonalGate.create(1, 2, [0, 3])
        assert view_distance(a, b, 2) < 1e-10

    def test_view_trace_is_one(self):
        gate = random_gate(2, 2, np.random.default_rng(9))
        rho = averaged_client_view(gate, 2)
        assert abs(np.trace(rho).real - 1.0) < 1e-10
        assert np.allclose(rho, rho.conj().T)

    def test_unpadded_messages_do_leak(self):
        # sanity check that the certifier can detect leakage: a nontrivial
        # gate without pads is far from maximally mixed
        from itbqc.protocol import Channel, QuantumPayload, ScriptedTape, run_iterated
        gate = DiagonalGate.create(1, 2, [0, 1])
        rho = np.zeros((4, 4), dtype=complex)
        for branch in range(4):
            chan = Channel()
            run_iterated(gate, StateVector.basis(1, (0,)), 2,
                         outcome_tape=ScriptedTape([(branch >> i) & 1 for i in range(2)]),
                         channel=chan)
            joint = np.ones(1, dtype=complex)
            for msg in chan.transcript.messages:
                if isinstance(msg.payload, QuantumPayload):
                    joint = np.kron(joint, msg.payload.state.amps)
            rho += 0.25 * np.outer(joint, joint.conj())
        assert trace_distance(rho, np.eye(4) / 4) > 0.3

    @pytest.mark.parametrize("m,rounds", [(2, 3), (1, 6)])
    def test_larger_joint_views(self, m, rounds):
        # the full m*rounds <= 6 range the certifier is relied on for
        gate = random_gate(m, rounds, np.random.default_rng(17 * m + rounds))
        assert blindness_distance(gate, rounds) < 1e-9

    def test_cap(self):
        gate = DiagonalGate.create(1, 1, [0, 1])
        with pytest.raises(CapExceeded):
            blindness_distance(gate, 11)


class TestProgramView:
    def test_equal_shapes_are_indistinguishable(self):
        from itbqc.analysis import averaged_program_view
        from conftest import random_program

        a = random_program(2, 2, 2, 2, seed=51)
        b = random_program(2, 2, 2, 2, seed=52)
        assert a.gates != b.gates
        rho_a = averaged_program_view(a)
        rho_b = averaged_program_view(b)
        assert trace_distance(rho_a, rho_b) < 1e-9
        # and each is itself maximally mixed
        dim = rho_a.shape[0]
        assert trace_distance(rho_a, np.eye(dim) / dim) < 1e-9

    def test_cap(self):
        from itbqc.analysis import averaged_program_view
        from conftest import random_program

        with pytest.raises(CapExceeded):
            averaged_program_view(random_program(3, 1, 2, 4, seed=53))


class TestBounds:
    def test_no_programming_values(self):
        assert no_programming_bound(BoundParams(J=1, k=1, n=1)) == 1
        assert no_programming_bound(BoundParams(J=2, k=2, n=3)) == 28
        # single qubit: the width factor degenerates to J*k
        for J, k in [(1, 5), (4, 2), (7, 3)]:
            assert no_programming_bound(BoundParams(J=J, k=k, n=1)) == J * k

    def test_pigeonhole_values(self):
        assert pigeonhole_bound(BoundParams(J=1, G=16, B=2, d=2)) == pytest.approx(2.0)
        assert pigeonhole_bound(BoundParams(G=1)) == 0.0

    def test_pigeonhole_monotone_in_gateset(self):
        vals = [pigeonhole_bound(BoundParams(J=2, G=g, B=2, d=2))
                for g in (1, 2, 16, 1024)]
        assert vals == sorted(vals)

    def test_pigeonhole_domain(self):
        with pytest.raises(ValueError):
            pigeonhole_bound(BoundParams(B=1, d=1))

    def test_bad_params(self):
        with pytest.raises(ValueError):
            BoundParams(J=0)

    def test_gate_family_size(self):
        assert gate_family_size(1, 2) == 4
        assert gate_family_size(2, 1) == 8
        # huge values stay exact integers
        assert gate_family_size(6, 3) == 2 ** (3 * 63)


class TestCostReport:
    def test_fixture_counts_and_ratio(self):
        prog = fixture_program("prog_n2_m2_J2")
        res = run_computation(prog, rng=np.random.default_rng(0))
        rep = cost_report(res.transcript, prog)
        assert rep.measured_qubits_to_server == 6  # 2 + 1*2*2
        assert rep.measured_bits_to_client == 6
        assert rep.expected_qubits == 6 and rep.expected_bits == 6
        assert rep.leading_order_qubits == 8
        assert rep.measured_qubits_to_server <= rep.leading_order_qubits + prog.n
        assert rep.no_programming_qubits == 12  # 2*2*(2^2-1)
        assert rep.bound_to_measured_ratio == pytest.approx(2.0)

    def test_report_serializes(self):
        prog = fixture_program("prog_n1_J2")
        res = run_computation(prog, rng=np.random.default_rng(1))
        rep = cost_report(res.transcript, prog)
        parsed = json.loads(rep.to_json())
        assert parsed["n"] == 1
        table = rep.to_table()
        assert "qubits sent, measured" in table

    def test_incomplete_transcripts(self):
        prog = fixture_program("prog_n1_J2")
        with pytest.raises(ValueError, match="incomplete"):
            cost_report(Transcript(), prog)
        res = run_computation(prog, rng=np.random.default_rng(2))
        truncated = Transcript()
        for msg in res.transcript.messages[:-1]:
            truncated.add(msg.direction, msg.payload)
        with pytest.raises(ValueError, match="incomplete"):
            cost_report(truncated, prog)

    def test_ratio_closed_form_grows(self):
        # at fixed J and x the bound/cost ratio tracks (2^n - 1) / n
        rows = cost_trend(2, 2, [1, 2, 3])
        ratios = [row["bound_to_protocol_ratio"] for row in rows]
        for n, ratio in zip((1, 2, 3), ratios):
            qubits, _ = expected_counts(n, 2, 2)
            assert ratio == pytest.approx(2 * 2 * (2**n - 1) / qubits)
        assert ratios[0] < ratios[1] < ratios[2]
