"""Run manifest: every input needed to reproduce a run bit-exactly.

Wall-clock timings live in a separate file so the manifest itself stays
byte-stable across identical runs.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from ..slicer import completeness_epsilon, diagnostics_report
from ..synth.smtlib import smtlib_emit
from ..viop.protocol import instance_digest, knowledge_error_bound
from ..vortex import SCHEME_ID

SCHEMA_VERSION = 1
WORKERS = 1
# generational-loop constants kept for the record; the loop itself is not run
GA_MUTATION_PROB = 0.3
GA_CROSSOVER_PROB = 0.5


def build_manifest(inst, cfg, result, budget_exhausted: bool) -> dict:
    q = inst.q
    k = len(result.pool_rows)
    m_out = len(inst.public_outputs)
    ell = cfg.iop.repetitions
    decision = result.decision
    doc = {
        "schema_version": SCHEMA_VERSION,
        "instance_digest": instance_digest(inst).hex(),
        "field": {"name": inst.field.name, "q": str(q)},
        "backend": decision.to_dict(),
        "fallback_reason": decision.fallback_reason,
        "scheme_id": SCHEME_ID,
        "node_plan": result.plan.to_dict(),
        "slicer": {
            "score_convention": cfg.slicer.score_convention,
            "lambda": str(cfg.slicer.score_lambda),
            "mu": str(cfg.slicer.score_mu),
            "pool_size": cfg.slicer.pool_size,
            "pool_ranked": list(result.pool.rows),
            "pool_rows": list(result.pool_rows),
            "diagnostics": diagnostics_report(result.pool),
        },
        "k": k,
        "t_max": cfg.t_max,
        "budget": {
            "max_calls": result.stats.max_calls,
            "subset_evaluations": result.stats.subset_evaluations,
            "candidates_tried": result.stats.candidates_tried,
            "prefilter_rejections": result.stats.prefilter_rejections,
            "exhausted": budget_exhausted,
            "greedy": result.stats.greedy,
        },
        "oracle": {
            "spec": cfg.oracle,
            "seed": cfg.oracle_seed,
            "batches": [result.batches[s].to_dict() for s in sorted(result.batches)],
        },
        "inputs": {
            "sample_count": cfg.sample_count,
            "exhaustive_limit": cfg.exhaustive_limit,
        },
        "iop": {
            "repetitions": ell,
            "security_bits": cfg.iop.security_bits,
            "attach_witness": cfg.attach_witness,
            "salt": cfg.iop.salt.hex(),
        },
        "seed": cfg.seed,
        "workers": WORKERS,
        "ga_constants": {"mutation": GA_MUTATION_PROB, "crossover": GA_CROSSOVER_PROB},
        "completeness_epsilon": completeness_epsilon(k, cfg.gamma, cfg.gamma_star),
        "result": "counterexample" if result.found else "none",
    }
    if decision.zk_native:
        linear, expo = knowledge_error_bound(q, m_out, decision.d, ell)
        doc["knowledge_error"] = {"linear": str(linear), "exponential": str(expo)}
    findings = []
    for f in result.findings:
        entry = {
            "delta": list(f.counterexample.edit.delta),
            "c": [str(v) for v in f.counterexample.edit.c],
            "x_prime": [str(v) for v in f.hit.x],
            "extraction_source": f.counterexample.edit.source,
            "satisfies_original": f.satisfies_original,
            "via_greedy": f.hit.via_greedy,
        }
        if f.proof is not None:
            entry["proof_digest"] = f.proof.digest.hex()
            entry["proof_mode"] = f.proof.mode
            entry["proof_bytes"] = len(f.proof_bytes)
        findings.append(entry)
    doc["findings"] = findings
    return doc


def manifest_json(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def write_manifest(path, doc: dict) -> Path:
    path = Path(path)
    path.write_text(manifest_json(doc))
    return path


def write_outputs(result, inst, out_dir, name: str, emit_smt2: bool = False) -> dict[str, Path]:
    """Write proof, counterexample, manifest and timings; returns the paths written."""
    out = Path(out_dir)
    os.makedirs(out, exist_ok=True)
    written = {}
    first = result.first
    if first is not None:
        if first.proof_bytes is not None:
            p = out / f"{name}.proof.bin"
            p.write_bytes(first.proof_bytes)
            written["proof"] = p
        p = out / f"{name}.counterexample.json"
        p.write_text(first.counterexample.to_json())
        written["counterexample"] = p
        p = out / f"{name}.mutated.circom"
        p.write_text(first.counterexample.mutated_source)
        written["mutated"] = p
    if emit_smt2:
        for t in range(1, min(result.manifest["t_max"], len(result.pool_rows)) + 1):
            p = out / f"{name}.t{t}.smt2"
            p.write_text(smtlib_emit(inst, result.pool_rows, t))
            written[f"smt2_t{t}"] = p
    written["manifest"] = write_manifest(out / f"{name}.manifest.json", result.manifest)
    p = out / f"{name}.timings.json"
    p.write_text(json.dumps(result.timings, indent=1, sort_keys=True) + "\n")
    written["timings"] = p
    return written
