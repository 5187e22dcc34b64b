"""The end-to-end search: pool selection, candidate discovery, proof and extraction.

Discovery is explicit.  For each cardinality t = 1..t_max and each t-subset
of the candidate pool (lexicographic), candidate constants come from the
template oracle, a seeded fallback constant and algebraic site solves;
inputs come from the original input, a biased sampler and exhaustive or
seeded enumeration.  The mutated system is run forward; the first candidate
whose outputs diverge is certified with a proof (or, when no backend fits,
checked directly).
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from math import comb
from typing import Iterator, Sequence

from ..circuit.execute import ExecutionResult, execute
from ..circuit.model import R1CSInstance, Witness, apply_edits, eval_residuals, is_satisfied
from ..errors import BudgetExhausted, DegreeTooHigh, ExtractionError, InvariantError, ProverStatementFalse
from ..extract import Counterexample, RecoveredEdit, assemble_counterexample
from ..oracle import (
    TemplateBatch,
    fallback_template,
    make_generator,
    mutation_templates,
    pattern_sampler,
    seeded_fallback_constant,
    uniform_sampler,
)
from ..proof import ViolationProof
from ..proofio import proof_to_bytes
from ..slicer import CandidatePool, SlicerConfig, completeness_epsilon, select_pool
from ..synth.circom import parse_program, site_signal
from ..synth.solve import ALL_FIELD, SiteEquation, _linear_in, site_equations, solve_site_constant
from ..viop.protocol import IopConfig, VerifyResult, knowledge_error_bound, prove, residual_degree_bound, verify
from ..viop.sumcheck import domain_log
from ..vortex import NodePlan, build_block_vandermonde, choose_nodes
from .backend import PROFILE_BY_NAME, PROFILES, BackendDecision, crypto_self_test, select_backend


@dataclass(frozen=True)
class PipelineConfig:
    slicer: SlicerConfig = SlicerConfig()
    t_max: int = 3
    iop: IopConfig = IopConfig()
    backend: str = "auto"
    oracle: str = "builtin"
    oracle_seed: int = 0
    seed: int = 0
    attach_witness: bool = False
    confirm_replay: bool = False
    find_all: bool = False
    d_row: int = 2
    plan_override: NodePlan | None = None
    sample_count: int = 16
    exhaustive_limit: int = 4096
    gamma: float | None = None
    gamma_star: float | None = None


def call_bound(k: int, t_max: int) -> int:
    """Maximum number of subset evaluations: sum_{t=1}^{t_max} C(k, t)."""
    return sum(comb(k, t) for t in range(1, min(t_max, k) + 1))


@dataclass
class SearchHit:
    subset: tuple[int, ...]  # pool positions
    delta: tuple[int, ...]
    c: tuple[int, ...]
    x: tuple[int, ...]
    w_prime: Witness
    y_orig: tuple[int, ...]
    via_greedy: bool = False


@dataclass
class SearchStats:
    subset_evaluations: int = 0
    max_calls: int = 0
    candidates_tried: int = 0
    prefilter_rejections: int = 0
    greedy: dict = field(default_factory=lambda: {"attempted": False})


@dataclass
class Finding:
    hit: SearchHit
    counterexample: Counterexample
    proof: ViolationProof | None
    proof_bytes: bytes | None
    verify_result: VerifyResult | None
    satisfies_original: bool


@dataclass
class PipelineResult:
    found: bool
    findings: list[Finding]
    pool: CandidatePool
    pool_rows: tuple[int, ...]
    plan: NodePlan
    decision: BackendDecision
    stats: SearchStats
    batches: dict[str, TemplateBatch]
    manifest: dict
    timings: dict

    @property
    def first(self) -> Finding | None:
        return self.findings[0] if self.findings else None


class _OriginalRuns:
    """Cached forward execution of the unedited system, keyed by input vector."""

    def __init__(self, inst: R1CSInstance, witness: Witness | None):
        self.inst = inst
        self.cache: dict[tuple[int, ...], ExecutionResult | None] = {}
        if witness is not None and is_satisfied(inst, witness):
            x = tuple(witness[i] for i in inst.input_indices)
            self.cache[x] = ExecutionResult("ok", witness)

    def get(self, x: tuple[int, ...]) -> ExecutionResult | None:
        if x not in self.cache:
            res = execute(self.inst, x)
            self.cache[x] = res if res.ok else None
        return self.cache[x]


def candidate_inputs(inst: R1CSInstance, witness: Witness | None, cfg: PipelineConfig) -> list[tuple[int, ...]]:
    """Original input first, then biased samples, then exhaustive or seeded enumeration."""
    q = inst.q
    n_in = len(inst.input_indices)
    x0 = tuple(witness[i] for i in inst.input_indices) if witness is not None else (0,) * n_in
    out = [x0]
    rng = random.Random(cfg.seed)
    if q ** n_in <= cfg.exhaustive_limit:
        out += list(itertools.product(range(q), repeat=n_in))
    else:
        sampler = pattern_sampler(x0, q, cfg.seed)
        out += [tuple(sampler.sample(rng, q)) for _ in range(cfg.sample_count)]
        uniform = uniform_sampler(n_in, cfg.seed)
        out += [tuple(uniform.sample(rng, q)) for _ in range(cfg.sample_count)]
    seen: set = set()
    unique = []
    for x in out:
        if x not in seen:
            seen.add(x)
            unique.append(x)
    return unique


def site_text(inst: R1CSInstance, row: int, program: str | None) -> str:
    site = inst.site_of_row[row]
    name = site_signal(site.site_id)
    if program is not None:
        for stmt in parse_program(program).statements:
            if stmt.kind == "assign" and stmt.name == name:
                return f"{name} <== {program[stmt.rhs_span[0]:stmt.rhs_span[1]]};"
    return f"{name} <== ...;"


def template_batches(inst, pool_rows, program, cfg: PipelineConfig) -> dict[str, TemplateBatch]:
    generator = make_generator(cfg.oracle)
    batches = {}
    for row in pool_rows:
        if not inst.is_mutable(row):
            continue
        site_id = inst.site_of_row[row].site_id
        if site_id not in batches:
            batches[site_id] = mutation_templates(site_text(inst, row, program), inst.q, generator, site_id)
    return batches


def _site_roots(inst: R1CSInstance, row: int, w_orig: Witness) -> list[int]:
    """Values of the row's target that keep the other rows touching it satisfied."""
    target = inst.target_of_row(row)
    site = inst.site_of_row[row]
    roots: list[int] = []
    for eq in site_equations(inst, site.site_id, target, w_orig.values, skip_rows=set(site.rows)):
        try:
            sol = solve_site_constant(eq, inst.field)
        except DegreeTooHigh:
            continue
        if sol is ALL_FIELD:
            continue
        roots.extend(sol)
    return roots


def row_constants(inst, row, batch: TemplateBatch, w_orig: Witness | None, cfg: PipelineConfig) -> list[int]:
    q = inst.q
    vals = list(batch.constants(q))
    vals.append(seeded_fallback_constant(cfg.oracle_seed, batch.site_id, q))
    if w_orig is not None:
        vals += _site_roots(inst, row, w_orig)
    seen: set = set()
    return [v for v in vals if not (v in seen or seen.add(v))]


def _try_edit(inst, pool_rows, subset, consts, x, orig: Witness, y_orig, stats: SearchStats):
    """Run the mutated system on x; return w' if the edit diverges, else None."""
    from ..circuit.model import differential_check

    k = len(pool_rows)
    delta = [0] * k
    c = [0] * k
    for pos, val in zip(subset, consts):
        delta[pos] = 1
        c[pos] = val
    stats.candidates_tried += 1
    edited = apply_edits(inst, pool_rows, delta, c)
    res = execute(edited, x)
    if not res.ok:
        return None
    w = res.witness
    q = inst.q
    dz = {i: (w[i] - orig[i]) % q for i in range(1, inst.n) if inst.var_classes[i] != "pub_out" and w[i] != orig[i]}
    dy = {i: (w[i] - orig[i]) % q for i in inst.public_outputs if w[i] != orig[i]}
    touched = [pool_rows[p] for p in subset]
    if not differential_check(edited, orig, dz, dy, extra_rows=touched):
        stats.prefilter_rejections += 1
        return None
    if any(eval_residuals(edited, w)):
        return None
    return tuple(delta), tuple(c), w


def fallback_search(
    inst: R1CSInstance,
    pool_rows: Sequence[int],
    batches: dict[str, TemplateBatch],
    inputs: Sequence[tuple[int, ...]],
    originals: _OriginalRuns,
    cfg: PipelineConfig,
    stats: SearchStats,
) -> Iterator[SearchHit]:
    """Bounded enumeration; yields hits in deterministic order."""
    k = len(pool_rows)
    stats.max_calls = call_bound(k, cfg.t_max)
    mutable = [inst.is_mutable(r) for r in pool_rows]
    for t in range(1, min(cfg.t_max, k) + 1):
        for subset in itertools.combinations(range(k), t):
            if stats.subset_evaluations >= stats.max_calls:
                raise BudgetExhausted("subset evaluation cap reached")
            stats.subset_evaluations += 1
            if not all(mutable[p] for p in subset):
                continue
            found_here = False
            for x in inputs:
                orig = originals.get(x)
                if orig is None:
                    continue
                w_orig = orig.witness
                y_orig = tuple(w_orig[i] for i in inst.public_outputs)
                per_row = [
                    row_constants(inst, pool_rows[p], batches[inst.site_of_row[pool_rows[p]].site_id], w_orig, cfg)
                    for p in subset
                ]
                for consts in itertools.product(*per_row):
                    hit = _try_edit(inst, pool_rows, subset, consts, x, w_orig, y_orig, stats)
                    if hit is not None:
                        delta, c, w = hit
                        yield SearchHit(subset, delta, c, x, w, y_orig)
                        found_here = True
                        break
                if found_here:
                    break


def _row_fixes(inst: R1CSInstance, row: int, target: int, values) -> list[int]:
    """Values of ``target`` that make ``row`` hold with every other variable at ``values``."""
    q = inst.q
    con = inst.constraints[row]
    (a0, a1), (b0, b1), (c0, c1) = (_linear_in(v, target, values, q) for v in (con.a, con.b, con.c))
    eq = SiteEquation("fix", ((a0 * b0 - c0) % q, (a0 * b1 + a1 * b0 - c1) % q, a1 * b1 % q))
    roots = solve_site_constant(eq, inst.field)
    return [] if roots is ALL_FIELD else list(roots)


def greedy_cover(
    inst: R1CSInstance,
    pool_rows: Sequence[int],
    batches: dict[str, TemplateBatch],
    inputs: Sequence[tuple[int, ...]],
    originals: _OriginalRuns,
    cfg: PipelineConfig,
    stats: SearchStats,
) -> SearchHit | None:
    """Grow one edit into a cover: each violated row is repaired by editing a
    pool row whose target it mentions, up to 2*t_max edits in total."""
    from ..circuit.execute import solve_witness

    bound = 2 * cfg.t_max
    stats.greedy = {"attempted": True, "bound": bound, "size": None, "evaluations": 0}
    k = len(pool_rows)
    targets = {p: inst.target_of_row(r) for p, r in enumerate(pool_rows) if inst.is_mutable(r)}
    for x in inputs[:1]:
        orig = originals.get(x)
        if orig is None:
            continue
        w_orig = orig.witness
        y_orig = tuple(w_orig[i] for i in inst.public_outputs)
        pinned = dict(zip(inst.input_indices, x))
        for p in sorted(targets):
            row = pool_rows[p]
            batch = batches[inst.site_of_row[row].site_id]
            for const in row_constants(inst, row, batch, w_orig, cfg):
                edits = {p: const}
                while len(edits) <= bound:
                    stats.greedy["evaluations"] += 1
                    delta = tuple(1 if i in edits else 0 for i in range(k))
                    c = tuple(edits.get(i, 0) for i in range(k))
                    res = solve_witness(apply_edits(inst, pool_rows, delta, c), pinned)
                    if res.ok:
                        w = res.witness
                        if tuple(w[i] for i in inst.public_outputs) != y_orig:
                            stats.greedy["size"] = len(edits)
                            return SearchHit(tuple(sorted(edits)), delta, c, x, w, y_orig, True)
                        break
                    bad = res.violated_rows[0]
                    support = inst.constraints[bad].support()
                    fix = None
                    for p2 in sorted(targets):
                        if p2 in edits or targets[p2] not in support:
                            continue
                        roots = _row_fixes(inst, bad, targets[p2], res.witness.values)
                        if roots:
                            fix = (p2, roots[0])
                            break
                    if fix is None:
                        break
                    edits[fix[0]] = fix[1]
    return None


def _plan_for(inst: R1CSInstance, pool: CandidatePool, cfg: PipelineConfig) -> NodePlan:
    if cfg.plan_override is not None:
        if cfg.plan_override.k != len(pool.rows):
            raise InvariantError("plan override does not match the pool size")
        return cfg.plan_override
    return choose_nodes(inst.field, len(pool.rows), cfg.d_row)


def certify(
    inst: R1CSInstance,
    pool_rows: Sequence[int],
    plan: NodePlan,
    hit: SearchHit,
    cfg: PipelineConfig,
    decision: BackendDecision,
    program: str | None,
    block=None,
) -> Finding:
    """Prove, verify and extract (zk_native) or check directly (fallback)."""
    proof = proof_bytes = vres = None
    if decision.zk_native:
        proof = prove(inst, pool_rows, plan, hit.delta, hit.c, hit.w_prime, hit.y_orig, cfg.iop, cfg.attach_witness)
        proof_bytes = proof_to_bytes(proof)
        vres = verify(proof, inst, pool_rows, plan, hit.y_orig, cfg.iop, block)
        if not vres.accepted:
            raise ExtractionError(f"honest proof rejected: {vres.reason} {vres.detail}")
        edit, w_prime = vres.edit, vres.w_prime
    else:
        edit, w_prime = RecoveredEdit(hit.delta, hit.c, "direct_search"), hit.w_prime
    edited = apply_edits(inst, pool_rows, edit.delta, edit.c)
    if any(eval_residuals(edited, w_prime)):
        raise ExtractionError("extracted witness violates the edited system")
    cex = assemble_counterexample(inst, pool_rows, edit, w_prime, hit.y_orig, program, cfg.confirm_replay)
    return Finding(hit, cex, proof, proof_bytes, vres, is_satisfied(inst, w_prime))


def run_pipeline(
    inst: R1CSInstance,
    program_text: str | None = None,
    cfg: PipelineConfig = PipelineConfig(),
    witness: Witness | None = None,
    crypto_check=crypto_self_test,
    seeded_edit: tuple[Sequence[int], Sequence[int], Sequence[int]] | None = None,
) -> PipelineResult:
    """Search for a diverging edit and certify it.

    ``seeded_edit = (delta, c, x)`` skips discovery and certifies that edit
    on inputs x directly.
    """
    from .manifest import build_manifest

    timings: dict[str, float] = {}
    clock = time.perf_counter()

    def lap(name):
        nonlocal clock
        now = time.perf_counter()
        timings[name] = round(now - clock, 6)
        clock = now

    pool = select_pool(inst, cfg.slicer)
    # encoding positions follow ascending row index, whatever the ranking order
    pool_rows = tuple(sorted(pool.rows))
    plan = _plan_for(inst, pool, cfg)
    k = len(pool_rows)
    d = residual_degree_bound(inst.n, k)
    domain = 1 << domain_log(inst.m)
    profiles = PROFILES if cfg.backend == "auto" else (PROFILE_BY_NAME[cfg.backend],)
    decision = select_backend(d, domain, profiles, crypto_check)
    block = build_block_vandermonde(plan, inst.field)
    lap("stage1_and_setup")

    batches = template_batches(inst, pool_rows, program_text, cfg)
    originals = _OriginalRuns(inst, witness)
    stats = SearchStats(max_calls=call_bound(k, cfg.t_max))
    findings: list[Finding] = []
    budget_exhausted = False

    if seeded_edit is not None:
        delta, c, x = (tuple(v) for v in seeded_edit)
        orig = originals.get(x)
        if orig is None:
            raise InvariantError("original system has no witness for the seeded inputs")
        edited = apply_edits(inst, pool_rows, delta, c)
        res = execute(edited, x)
        if not res.ok:
            raise ProverStatementFalse("seeded edit has no witness on the given inputs")
        y_orig = tuple(orig.witness[i] for i in inst.public_outputs)
        subset = tuple(i for i, v in enumerate(delta) if v)
        hits = iter([SearchHit(subset, delta, c, x, res.witness, y_orig)])
    else:
        inputs = candidate_inputs(inst, witness, cfg)
        hits = fallback_search(inst, pool_rows, batches, inputs, originals, cfg, stats)
    lap("templates_and_inputs")

    seen_edits = set()
    try:
        for hit in hits:
            key = (hit.delta, hit.c)
            if key in seen_edits:
                continue
            seen_edits.add(key)
            findings.append(certify(inst, pool_rows, plan, hit, cfg, decision, program_text, block))
            if not cfg.find_all:
                break
    except BudgetExhausted:
        budget_exhausted = True
    if not findings and seeded_edit is None and cfg.t_max < k:
        hit = greedy_cover(inst, pool_rows, batches, inputs, originals, cfg, stats)
        if hit is not None:
            findings.append(certify(inst, pool_rows, plan, hit, cfg, decision, program_text, block))
    lap("search_and_certify")

    result = PipelineResult(bool(findings), findings, pool, pool_rows, plan, decision, stats, batches, {}, timings)
    result.manifest = build_manifest(inst, cfg, result, budget_exhausted)
    return result
