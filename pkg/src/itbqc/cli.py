"""Command-line front end.

Subcommands: ``demo`` (single-gate teleportation, plain or blind),
``run`` (sampled full-protocol runs), ``verify`` (exhaustive-branch
equality against the direct simulation), ``blindness`` (key-averaged
server-view certification), ``costs`` (communication accounting).

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 size cap exceeded.  All randomness derives from ``--seed`` through
labeled substreams, so equal seeds give byte-identical reports.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis, protocol
from .diagonal import random_gate, unitary_diag
from .errors import CapExceeded, SchemaError
from .rng import derive_rng
from .statevec import fidelity_up_to_phase, random_state
from .protocol import RandomTape, load_program

FIDELITY_GATE = 1e-8
BLINDNESS_TOL = 1e-9
VERIFY_TOL = 1e-9


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="itbqc",
        description="Blind delegated computation by iterated gate teleportation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    demo = sub.add_parser("demo", help="teleport one random diagonal gate")
    demo.add_argument("--protocol", type=int, choices=(1, 2), default=1,
                      help="1 = plain iterated teleportation, 2 = blind variant")
    demo.add_argument("--m", type=positive_int, required=True, help="block qubits")
    demo.add_argument("--l", type=positive_int, required=True, help="angle level / rounds")
    demo.add_argument("--seed", type=int, default=0)
    demo.add_argument("--early-halt", action="store_true",
                      help="stop after an all-zero outcome (protocol 1 only)")
    demo.add_argument("--json", action="store_true")

    run = sub.add_parser("run", help="sample full protocol runs of a program")
    run.add_argument("program", help="program JSON file")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--samples", type=positive_int, default=1000)
    run.add_argument("--out-dir", help="write histogram CSV/PNG and report here")
    run.add_argument("--transcript", help="write the first run's transcript (JSONL)")
    run.add_argument("--json", action="store_true")

    verify = sub.add_parser("verify", help="exhaustive-branch check against direct simulation")
    verify.add_argument("program")
    verify.add_argument("--json", action="store_true")

    blind = sub.add_parser("blindness", help="certify the key-averaged server view")
    blind.add_argument("--m", type=positive_int, required=True)
    blind.add_argument("--l", type=positive_int, required=True)
    blind.add_argument("--trials", type=positive_int, default=3,
                       help="random gates to certify")
    blind.add_argument("--seed", type=int, default=0)
    blind.add_argument("--json", action="store_true")

    costs = sub.add_parser("costs", help="communication accounting for a program")
    costs.add_argument("program")
    costs.add_argument("--seed", type=int, default=0)
    costs.add_argument("--out-dir", help="write trend CSV/PNG and report here")
    costs.add_argument("--json", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return {
            "demo": cmd_demo,
            "run": cmd_run,
            "verify": cmd_verify,
            "blindness": cmd_blindness,
            "costs": cmd_costs,
        }[args.command](args)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _emit(args, report: dict, text: str) -> None:
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(text)


def cmd_demo(args) -> int:
    gate = random_gate(args.m, args.l, derive_rng(args.seed, "gate"))
    psi = random_state(args.m, derive_rng(args.seed, "state"))
    target = psi.apply_diagonal(unitary_diag(gate))
    if args.protocol == 1:
        result = protocol.run_iterated(
            gate, psi, args.l, rng=derive_rng(args.seed, "bob"),
            early_halt=args.early_halt)
        target = target.apply_pauli(result.byproduct)
        rounds = result.rounds
        pad = None
    else:
        result = protocol.run_blind(
            gate, psi, args.l,
            pad_tape=RandomTape(derive_rng(args.seed, "alice")),
            rng=derive_rng(args.seed, "bob"))
        target = target.apply_pauli(result.byproduct).apply_pauli(result.pad)
        rounds = args.l
        pad = "".join(map(str, result.pad.z_bits))
    fidelity = fidelity_up_to_phase(result.final, target)
    transcript = result.transcript
    report = {
        "protocol": args.protocol,
        "m": args.m,
        "l": args.l,
        "seed": args.seed,
        "gate_level": gate.level,
        "rounds": rounds,
        "byproduct": "".join(map(str, result.byproduct.x_bits)),
        "pad": pad,
        "fidelity": fidelity,
        "qubits_to_server": transcript.qubits_a2b,
        "bits_to_client": transcript.bits_b2a,
        "ok": bool(fidelity >= 1 - FIDELITY_GATE),
    }
    lines = [
        f"protocol {args.protocol} demo: m={args.m} l={args.l} seed={args.seed}",
        f"rounds run        {rounds}",
        f"byproduct X bits  {report['byproduct']}",
    ]
    if pad is not None:
        lines.append(f"secret pad Z bits {pad}")
    lines += [
        f"fidelity          {fidelity:.12f}",
        f"qubits to server  {transcript.qubits_a2b}",
        f"bits to client    {transcript.bits_b2a}",
    ]
    _emit(args, report, "\n".join(lines))
    return 0 if report["ok"] else 1


def cmd_run(args) -> int:
    program = load_program(args.program)
    exact = protocol.direct_simulate(program)
    counts = np.zeros(2**program.n, dtype=np.int64)
    first_transcript = None
    for i in range(args.samples):
        result = protocol.run_computation(
            program,
            pad_tape=RandomTape(derive_rng(args.seed, "alice", i)),
            rng=derive_rng(args.seed, "bob", i))
        counts[_bits_int(result.output)] += 1
        if first_transcript is None:
            first_transcript = result.transcript
    freqs = counts / args.samples
    tv = 0.5 * float(np.sum(np.abs(freqs - exact)))
    labels = [format(i, f"0{program.n}b") for i in range(2**program.n)]
    report = {
        "program": str(args.program),
        "n": program.n, "m": program.m, "x": program.x, "J": program.J,
        "samples": args.samples,
        "seed": args.seed,
        "histogram": {lab: int(c) for lab, c in zip(labels, counts)},
        "tv_distance_to_exact": tv,
    }
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "histogram.csv", "w", newline="") as fp:
            writer = csv.writer(fp)
            writer.writerow(["output", "count", "frequency", "exact"])
            for i, lab in enumerate(labels):
                writer.writerow([lab, int(counts[i]), repr(float(freqs[i])),
                                 repr(float(exact[i]))])
        from .plotting import save_histogram_figure
        save_histogram_figure(labels, list(freqs), list(exact), out / "histogram.png")
        first_transcript.write_jsonl(out / "transcript.jsonl")
        (out / "report.json").write_text(
            json.dumps(report, indent=2, sort_keys=True) + "\n")
        report["files"] = sorted(p.name for p in out.iterdir())
    if args.transcript:
        first_transcript.write_jsonl(args.transcript)
    hist_lines = "\n".join(
        f"  {lab}  {int(c):>8}  {float(f):.4f}  (exact {float(e):.4f})"
        for lab, c, f, e in zip(labels, counts, freqs, exact) if c or e > 1e-12)
    text = (
        f"ran {args.samples} samples of {args.program} (seed {args.seed})\n"
        f"output histogram:\n{hist_lines}\n"
        f"total-variation distance to exact: {tv:.4f}"
    )
    _emit(args, report, text)
    return 0


def cmd_verify(args) -> int:
    program = load_program(args.program)
    if program.n > 3 or program.J > 4:
        raise CapExceeded(
            f"verify handles n <= 3 and J <= 4 (got n={program.n}, J={program.J}); "
            "use 'run' to sample instead")
    result = protocol.verify_program(program, tol=VERIFY_TOL)
    report = {
        "program": str(args.program),
        "branches": result.branches,
        "max_entry_error": result.max_entry_error,
        "max_branch_error": result.max_branch_error,
        "tolerance": VERIFY_TOL,
        "ok": result.ok,
    }
    _emit(args, report,
          f"enumerated {result.branches} branches\n"
          f"max output-distribution error: {result.max_entry_error:.3e}\n"
          f"max per-branch error:          {result.max_branch_error:.3e}\n"
          f"{'OK' if result.ok else 'MISMATCH'} (tolerance {VERIFY_TOL:.0e})")
    return 0 if result.ok else 1


def cmd_blindness(args) -> int:
    rng = derive_rng(args.seed, "gate")
    gates = [random_gate(args.m, args.l, rng) for _ in range(args.trials)]
    distances = [analysis.blindness_distance(g, args.l) for g in gates]
    pair = analysis.view_distance(gates[0], gates[-1], args.l) \
        if len(gates) > 1 else 0.0
    worst = max(distances)
    report = {
        "m": args.m, "l": args.l, "trials": args.trials, "seed": args.seed,
        "max_trace_distance_to_mixed": worst,
        "pairwise_view_distance": pair,
        "threshold": BLINDNESS_TOL,
        "ok": bool(worst <= BLINDNESS_TOL and pair <= BLINDNESS_TOL),
    }
    _emit(args, report,
          f"blindness at m={args.m}, l={args.l} over {args.trials} random gates\n"
          f"max trace distance to maximally mixed: {worst:.3e}\n"
          f"view distance between two gates:       {pair:.3e}\n"
          f"{'OK' if report['ok'] else 'LEAK'} (threshold {BLINDNESS_TOL:.0e})")
    return 0 if report["ok"] else 1


def cmd_costs(args) -> int:
    program = load_program(args.program)
    result = protocol.run_computation(
        program,
        pad_tape=RandomTape(derive_rng(args.seed, "alice")),
        rng=derive_rng(args.seed, "bob"))
    report = analysis.cost_report(result.transcript, program)
    trend = analysis.cost_trend(program.x, program.J,
                                list(range(1, max(6, program.n) + 1)))
    payload = {"report": report.to_dict(), "trend": trend}
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "costs.csv", "w", newline="") as fp:
            writer = csv.writer(fp)
            writer.writerow(list(trend[0].keys()) + ["measured_qubits"])
            for row in trend:
                measured = report.measured_qubits_to_server \
                    if row["n"] == program.n else ""
                writer.writerow([repr(v) if isinstance(v, float) else v
                                 for v in row.values()] + [measured])
        from .plotting import save_cost_figure
        save_cost_figure(
            trend,
            {"n": program.n, "qubits": report.measured_qubits_to_server},
            out / "costs.png")
        (out / "report.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n")
    trend_lines = "\n".join(
        f"  n={row['n']}: protocol {row['protocol_qubits']:>6} qubits   "
        f"bound {row['no_programming_qubits']:>8}   "
        f"ratio {row['bound_to_protocol_ratio']:.2f}"
        for row in trend)
    _emit(args, payload,
          report.to_table() + "\n\nclosed-form trend across n:\n" + trend_lines)
    return 0


def _bits_int(bits) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | (b & 1)
    return value


if __name__ == "__main__":
    sys.exit(main())
