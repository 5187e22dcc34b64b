"""Command-line entry point: ``zkcraft analyze`` and ``zkcraft verify``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .circuit.execute import execute
from .circuit.formats import load_circuit, parse_witness_json
from .driver.manifest import write_outputs
from .driver.pipeline import PipelineConfig, run_pipeline
from .errors import ModulusMismatch, ZkCraftError
from .extract import assemble_counterexample
from .ff import field_from_name
from .proofio import proof_from_bytes
from .slicer import SlicerConfig
from .viop.protocol import IopConfig, verify

EXIT_FOUND, EXIT_NONE, EXIT_ERROR = 0, 1, 2

log = logging.getLogger("zkcraft")


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zkcraft", description="Search R1CS circuits for under-constrained weak assignments.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="search for a diverging edit and emit a proof")
    an.add_argument("circuit", help="circuit file (.json or .r1cs)")
    an.add_argument("--sites", help="weak-site sidecar JSON")
    an.add_argument("--witness", help="original witness JSON")
    an.add_argument("--program", help="Circom source used for the mutated program")
    an.add_argument("--field", help="test101, bn254scalar or a decimal prime; must match the circuit")
    an.add_argument("--pool-size", type=int, default=32)
    an.add_argument("--t-max", type=int, default=3)
    an.add_argument("--lambda", dest="lam", type=Fraction, default=Fraction(1))
    an.add_argument("--mu", type=Fraction, default=Fraction(1, 2))
    an.add_argument("--score-convention", choices=("methodology", "toy"), default="methodology")
    an.add_argument("--backend", choices=("auto", "basefold", "hyperplonk"), default="auto")
    an.add_argument("--oracle", default="builtin", help="builtin, subprocess:<cmd> or http:<url>")
    an.add_argument("--oracle-seed", type=_u64, default=0)
    an.add_argument("--seed", type=_u64, default=0)
    an.add_argument("--repetitions", type=int, default=2)
    an.add_argument("--attach-witness", action="store_true")
    an.add_argument("--confirm-replay", action="store_true")
    an.add_argument("--emit-smt2", action="store_true")
    an.add_argument("--find-all", action="store_true")
    an.add_argument("--out-dir", default=".")

    ve = sub.add_parser("verify", help="re-verify a proof file and re-extract the edit")
    ve.add_argument("proof")
    ve.add_argument("circuit")
    ve.add_argument("--sites")
    ve.add_argument("--program")
    return ap


def _load(args):
    inst = load_circuit(args.circuit, args.sites)
    if getattr(args, "field", None):
        want = field_from_name(args.field)
        if want.q != inst.q:
            raise ModulusMismatch(f"--field {args.field} does not match the circuit modulus")
    program = Path(args.program).read_text() if args.program else None
    return inst, program


def cmd_analyze(args) -> int:
    inst, program = _load(args)
    witness = parse_witness_json(Path(args.witness).read_text(), inst.field) if args.witness else None
    cfg = PipelineConfig(
        slicer=SlicerConfig(args.lam, args.mu, args.pool_size, args.score_convention),
        t_max=args.t_max,
        iop=IopConfig(repetitions=args.repetitions),
        backend=args.backend,
        oracle=args.oracle,
        oracle_seed=args.oracle_seed,
        seed=args.seed,
        attach_witness=args.attach_witness,
        confirm_replay=args.confirm_replay,
        find_all=args.find_all,
    )
    result = run_pipeline(inst, program, cfg, witness)
    name = Path(args.circuit).stem
    written = write_outputs(result, inst, args.out_dir, name, args.emit_smt2)
    summary = {
        "result": result.manifest["result"],
        "mode": result.decision.mode,
        "fallback_reason": result.decision.fallback_reason,
        "files": {k: str(v) for k, v in sorted(written.items())},
    }
    if result.first is not None:
        summary["counterexample"] = result.first.counterexample.to_dict()
    print(json.dumps(summary, indent=1, sort_keys=True))
    return EXIT_FOUND if result.found else EXIT_NONE


def cmd_verify(args) -> int:
    inst, program = _load(args)
    proof = proof_from_bytes(Path(args.proof).read_bytes())
    # recompute the original outputs rather than trusting the proof's copy
    y_orig = proof.y_orig
    orig = execute(inst, proof.x_prime) if len(proof.x_prime) == len(inst.input_indices) else None
    if orig is not None and orig.ok:
        y_orig = tuple(orig.witness[i] for i in inst.public_outputs)
    if any(not 0 <= r < inst.m for r in proof.pool_rows):
        print(json.dumps({"accepted": False, "reason": "transcript_mismatch", "detail": "pool row out of range"}))
        return EXIT_NONE
    cfg = IopConfig(
        repetitions=proof.ell,
        output_points=proof.output_points,
        commit_domain=proof.commitment.domain_size,
        salt=proof.salt,
    )
    res = verify(proof, inst, proof.pool_rows, proof.plan, y_orig, cfg)
    doc = {"accepted": res.accepted, "reason": res.reason, "detail": res.detail}
    if res.accepted:
        cex = assemble_counterexample(inst, proof.pool_rows, res.edit, res.w_prime, y_orig, program)
        doc["counterexample"] = cex.to_dict()
        doc["extraction_source"] = res.edit.source
    print(json.dumps(doc, indent=1, sort_keys=True))
    return EXIT_FOUND if res.accepted else EXIT_NONE


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return cmd_analyze(args) if args.command == "analyze" else cmd_verify(args)
    except (ZkCraftError, OSError, ValueError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
