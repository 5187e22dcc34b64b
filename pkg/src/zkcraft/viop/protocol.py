"""Prover and verifier for the violation statement.

The statement: there is an edit (delta, c) over the candidate pool and a
witness w' such that the edited system holds at w' while the public outputs
differ from ``y_orig``.  The proof commits to the Row-Vortex encoding of the
edit, runs ``ell`` independent sum-checks of Phi~ * Delta_out over the row
hypercube, opens the commitment once per run, and carries enough data
(R's coefficients, optionally W') for the verifier to extract the edit.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

from ..circuit.model import R1CSInstance, Witness, apply_edits, eval_residuals
from ..errors import (
    DegreeOverflow,
    ExtractionError,
    InvariantError,
    NoSolution,
    NonBooleanDelta,
    ProverStatementFalse,
    ShapeMismatch,
)
from ..extract import (
    RecoveredEdit,
    extract_selection,
    interpolate_witness,
    reconstruct_witness,
)
from ..ff import DensePoly, Field, lagrange_interpolate, mle_eval, poly_eval_int
from ..proof import (
    MODE_COEFFICIENTS,
    MODE_SLICES,
    RepetitionProof,
    ViolationProof,
    encode_witness_poly,
)
from ..slicer import canonical_row_bytes
from ..vortex import (
    SCHEME_ID,
    BlockVandermonde,
    NodePlan,
    build_block_vandermonde,
    commit,
    encode,
    encoding_polys,
    min_domain,
    open_at,
    verify_opening,
    _build_tree,
)
from .sumcheck import SumcheckProver, check_rounds, domain_log, iota
from .transcript import Transcript, encode_ints

REJECT_REASONS = (
    "transcript_mismatch",
    "round_inconsistent",
    "opening_invalid",
    "extraction_failed",
    "final_eval_mismatch",
    "residual_nonzero",
    "no_divergence",
)
MAX_NONCE = 256


@dataclass(frozen=True)
class IopConfig:
    """Protocol parameters.

    ``output_points`` default to 0..m_out-1; ``commit_domain`` defaults to the
    smallest power of two that holds R's X-degree.  ``salt`` separates
    otherwise identical statements (it is absorbed before any challenge).
    """

    repetitions: int = 2
    security_bits: int = 128
    output_points: tuple[int, ...] | None = None
    commit_domain: int | None = None
    salt: bytes = b""

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("at least one repetition is required")

    def points_for(self, m_out: int, q: int) -> tuple[int, ...]:
        pts = self.output_points if self.output_points is not None else tuple(range(m_out))
        pts = tuple(p % q for p in pts)
        if len(pts) != m_out:
            raise ShapeMismatch(f"need {m_out} output points, got {len(pts)}")
        if len(set(pts)) != m_out:
            raise InvariantError("output points must be distinct")
        return pts


@dataclass
class VerifyResult:
    accepted: bool
    reason: str | None = None
    detail: str = ""
    edit: RecoveredEdit | None = None
    w_prime: Witness | None = None
    underdetermined: bool = False

    def __bool__(self):
        return self.accepted


def residual_degree_bound(n: int, k: int) -> int:
    return 2 * n + k - 1


def knowledge_error_bound(q: int, m_out: int, d: int, ell: int) -> tuple[Fraction, Fraction]:
    """(linear, exponential) knowledge-error bounds."""
    if ell < 1 or q < 2 or d < 0 or m_out < 0:
        raise ValueError("parameters must be positive")
    linear = Fraction(max(m_out - 1, 0) + ell * d, q)
    exponential = Fraction(max(m_out - 1, 0) + d, q) ** ell
    return linear, exponential


def build_delta_out(
    y_prime: Sequence[int], y_orig: Sequence[int], u_points: Sequence[int], field: Field
) -> DensePoly:
    if not len(y_prime) == len(y_orig) == len(u_points):
        raise ShapeMismatch("y', y and the output points must have equal length")
    q = field.q
    diffs = [(a - b) % q for a, b in zip(y_prime, y_orig)]
    return lagrange_interpolate(list(zip(u_points, diffs)), field)


def instance_digest(inst: R1CSInstance) -> bytes:
    h = hashlib.sha256()
    h.update(encode_ints([inst.q, inst.n, inst.m]))
    h.update(json.dumps(list(inst.var_classes)).encode())
    for r in range(inst.m):
        h.update(canonical_row_bytes(inst, r))
    sites = [[s.site_id, list(s.rows), inst.target_of_row(s.rows[0]) if s.rows else None] for s in inst.weak_sites]
    h.update(json.dumps(sites, sort_keys=True).encode())
    return h.digest()


def phi_table(edited: R1CSInstance, w_prime: Sequence[int], t: int) -> list[int]:
    table = eval_residuals(edited, w_prime)
    return table + [0] * ((1 << t) - len(table))


def _statement(
    tr: Transcript,
    inst: R1CSInstance,
    pool_rows,
    plan: NodePlan,
    out_points,
    y_orig,
    x_prime,
    t: int,
    ell: int,
    salt: bytes,
    domain: int,
) -> None:
    tr.absorb_ints("q", [inst.q])
    tr.absorb("instance", instance_digest(inst))
    tr.absorb_ints("pool", pool_rows)
    tr.absorb("plan", json.dumps(plan.to_dict(), sort_keys=True).encode())
    tr.absorb_ints("output_points", out_points)
    tr.absorb_ints("y_orig", y_orig)
    tr.absorb_ints("x_prime", x_prime)
    tr.absorb_ints("shape", [t, ell, domain])
    tr.absorb("salt", salt)


def _witness_poly_bytes(wp) -> bytes:
    if wp is None:
        return b"absent"
    return wp.kind.encode() + encode_ints([wp.size]) + encode_ints(wp.coeffs)


def _divergence_points(tr: Transcript, nonce: int, ell: int, q: int) -> list[int]:
    tr.absorb_ints("nonce", [nonce])
    return [tr.challenge_field(f"divergence/{r}", q) for r in range(ell)]


def _diverges(delta_coeffs, points, q) -> bool:
    return any(poly_eval_int(delta_coeffs, z, q) for z in points)


def _copy(tr: Transcript) -> Transcript:
    clone = Transcript.__new__(Transcript)
    clone.state = tr.state
    return clone


def prove(
    inst: R1CSInstance,
    pool_rows: Sequence[int],
    plan: NodePlan,
    delta: Sequence[int],
    c: Sequence[int],
    w_prime: Witness | Sequence[int],
    y_orig: Sequence[int],
    cfg: IopConfig = IopConfig(),
    attach_witness: bool = False,
) -> ViolationProof:
    field = inst.field
    q = field.q
    pool_rows = tuple(pool_rows)
    values = tuple(w_prime.values if isinstance(w_prime, Witness) else w_prime)
    m_out = len(inst.public_outputs)
    if len(y_orig) != m_out:
        raise ShapeMismatch("y_orig does not match the public outputs")
    y_orig = tuple(v % q for v in y_orig)

    try:
        edited = apply_edits(inst, pool_rows, delta, c)
    except (InvariantError, ShapeMismatch) as exc:
        raise ProverStatementFalse(f"edit is not well formed: {exc}") from None
    if len(values) != inst.n or values[0] != 1:
        raise ProverStatementFalse("w' is not a witness for this instance")
    residuals = eval_residuals(edited, values)
    if any(residuals):
        bad = [i for i, v in enumerate(residuals) if v]
        raise ProverStatementFalse(f"edited rows {bad} are violated by w'")
    y_prime = tuple(values[i] for i in inst.public_outputs)
    if y_prime == y_orig:
        raise ProverStatementFalse("no output divergence: y' = y")

    out_points = cfg.points_for(m_out, q)
    delta_poly = build_delta_out(y_prime, y_orig, out_points, field)
    t = domain_log(inst.m)
    ell = cfg.repetitions
    d = residual_degree_bound(inst.n, len(pool_rows))
    x_prime = tuple(values[i] for i in inst.input_indices)

    enc = encode(pool_rows, plan, delta, c, inst)
    com = commit(enc, cfg.commit_domain)
    attach = attach_witness or ell == 1
    wp = encode_witness_poly(values, field) if attach else None

    tr = Transcript()
    _statement(tr, inst, pool_rows, plan, out_points, y_orig, x_prime, t, ell, cfg.salt, com.domain_size)
    tr.absorb("root", com.root)
    tr.absorb("witness_poly", _witness_poly_bytes(wp))

    table = phi_table(edited, values, t)
    reps = []
    for r in range(ell):
        prover = SumcheckProver(table, delta_poly.coeffs, field)
        rounds, zetas = [], []
        for k in range(t):
            g = prover.round_poly()
            tr.absorb_ints(f"g/{r}/{k}", g)
            zeta = tr.challenge_field(f"zeta/{r}/{k}", q)
            prover.fold(zeta)
            rounds.append(g)
            zetas.append(zeta)
        pos = tr.challenge_below(f"open/{r}", com.domain_size)
        opening = open_at(enc, com, pos)
        phi_claim = prover.final_value()
        delta_claim = poly_eval_int(delta_poly.coeffs, iota(zetas, q), q)
        tr.absorb_ints(f"opened/{r}", list(opening.claimed_value) + [phi_claim, delta_claim])
        reps.append(RepetitionProof(tuple(rounds), opening, phi_claim, delta_claim))

    for nonce in range(MAX_NONCE):
        trial = _copy(tr)
        if _diverges(delta_poly.coeffs, _divergence_points(trial, nonce, ell, q), q):
            tr = trial
            break
    else:
        raise ProverStatementFalse("output difference vanished at every divergence challenge")

    distinct = {rep.opening.point for rep in reps}
    mode = MODE_SLICES if len(distinct) >= enc.deg_x + 1 else MODE_COEFFICIENTS
    tr.absorb("mode", mode.encode())
    p_coeffs, s_coeffs = (enc.p_coeffs, enc.s_coeffs) if mode == MODE_COEFFICIENTS else ((), ())

    return ViolationProof(
        scheme_id=SCHEME_ID,
        q=q,
        t=t,
        ell=ell,
        m_out=m_out,
        d=d,
        salt=cfg.salt,
        pool_rows=pool_rows,
        plan=plan,
        output_points=out_points,
        x_prime=x_prime,
        y_orig=y_orig,
        commitment=com,
        mode=mode,
        p_coeffs=p_coeffs,
        s_coeffs=s_coeffs,
        repetitions=tuple(reps),
        nonce=nonce,
        witness_poly=wp,
        digest=tr.digest(),
    )


def _reject(reason: str, detail: str = "") -> VerifyResult:
    return VerifyResult(False, reason, detail)


def verify(
    proof: ViolationProof,
    inst: R1CSInstance,
    pool_rows: Sequence[int],
    plan: NodePlan,
    y_orig: Sequence[int],
    cfg: IopConfig | None = None,
    block: BlockVandermonde | None = None,
) -> VerifyResult:
    """Check ``proof`` against the verifier's own view of the statement.

    On acceptance the result carries the extracted edit and witness.
    """
    field = inst.field
    q = field.q
    pool_rows = tuple(pool_rows)
    k = len(pool_rows)
    m_out = len(inst.public_outputs)
    try:
        y_orig = tuple(v % q for v in y_orig)
        if len(y_orig) != m_out:
            raise ShapeMismatch("y_orig length")
        ell = cfg.repetitions if cfg is not None else proof.ell
        out_points = (cfg or IopConfig()).points_for(m_out, q)
        salt = cfg.salt if cfg is not None else proof.salt
    except (ShapeMismatch, InvariantError) as exc:
        return _reject("transcript_mismatch", str(exc))

    t = domain_log(inst.m)
    d = residual_degree_bound(inst.n, k)
    statement_ok = (
        proof.scheme_id == SCHEME_ID
        and proof.q == q
        and proof.t == t
        and proof.ell == ell
        and proof.m_out == m_out
        and proof.d == d
        and proof.salt == salt
        and proof.pool_rows == pool_rows
        and proof.plan == plan
        and proof.output_points == out_points
        and proof.y_orig == y_orig
        and len(proof.x_prime) == len(inst.input_indices)
        and len(proof.repetitions) == ell
        and proof.mode in (MODE_COEFFICIENTS, MODE_SLICES)
        and 0 <= proof.nonce < MAX_NONCE
    )
    if not statement_ok:
        return _reject("transcript_mismatch", "proof header does not match the statement")
    if ell == 1 and (proof.witness_poly is None or proof.mode != MODE_COEFFICIENTS):
        return _reject("transcript_mismatch", "single-repetition proofs must carry W' and R")

    com = proof.commitment
    tr = Transcript()
    _statement(tr, inst, pool_rows, plan, out_points, y_orig, proof.x_prime, t, ell, salt, com.domain_size)
    tr.absorb("root", com.root)
    tr.absorb("witness_poly", _witness_poly_bytes(proof.witness_poly))

    all_zetas = []
    for r, rep in enumerate(proof.repetitions):
        if len(rep.rounds) != t:
            return _reject("round_inconsistent", f"repetition {r} has {len(rep.rounds)} rounds")
        zetas = []
        for kk, g in enumerate(rep.rounds):
            tr.absorb_ints(f"g/{r}/{kk}", g)
            zetas.append(tr.challenge_field(f"zeta/{r}/{kk}", q))
        ok, final = check_rounds(rep.rounds, zetas, 0, d, q)
        if not ok:
            return _reject("round_inconsistent", f"repetition {r}")
        pos = tr.challenge_below(f"open/{r}", com.domain_size)
        if rep.opening.point != pos:
            return _reject("transcript_mismatch", f"repetition {r} opened the wrong position")
        if not verify_opening(com, rep.opening, q):
            return _reject("opening_invalid", f"repetition {r} opening does not verify")
        tr.absorb_ints(f"opened/{r}", list(rep.opening.claimed_value) + [rep.phi_claim, rep.delta_claim])
        all_zetas.append((zetas, final))
    div_points = _divergence_points(tr, proof.nonce, ell, q)
    tr.absorb("mode", proof.mode.encode())
    if tr.digest() != proof.digest:
        return _reject("transcript_mismatch", "transcript digest differs")

    # recover and re-derive the committed encoding
    if block is None:
        block = build_block_vandermonde(plan, field)
    try:
        edit = extract_selection(proof, plan, block, field)
    except (NonBooleanDelta, ExtractionError) as exc:
        return _reject("opening_invalid", str(exc))
    try:
        polys = encoding_polys(inst, pool_rows, plan)
        enc = encode(pool_rows, plan, edit.delta, edit.c, inst, polys)
        edited = apply_edits(inst, pool_rows, edit.delta, edit.c)
    except (InvariantError, ShapeMismatch, NonBooleanDelta) as exc:
        return _reject("opening_invalid", f"recovered edit is not admissible: {exc}")
    if com.domain_size < min_domain(enc):
        return _reject("opening_invalid", "commitment domain too small for the encoding")
    if proof.mode == MODE_COEFFICIENTS:
        if (enc.p_coeffs, enc.s_coeffs) != (proof.p_coeffs, proof.s_coeffs):
            return _reject("opening_invalid", "attached R is not a valid encoding")
        if _build_tree(enc, com.domain_size).root != com.root:
            return _reject("opening_invalid", "attached R does not match the commitment")
    for rep in proof.repetitions:
        if enc.slice_at(rep.opening.point) != rep.opening.claimed_value:
            return _reject("opening_invalid", "opened slice disagrees with the recovered encoding")

    # the witness: attached polynomial or reconstruction from x'
    underdetermined = False
    try:
        w = interpolate_witness(proof, inst.n, field)
        if w is not None:
            edit = RecoveredEdit(edit.delta, edit.c, "interpolated_witness")
            if tuple(w[i] for i in inst.input_indices) != proof.x_prime:
                return _reject("extraction_failed", "W' disagrees with x'")
        else:
            rec = reconstruct_witness(inst, pool_rows, edit, proof.x_prime)
            w, underdetermined = rec.witness, rec.underdetermined
            edit = RecoveredEdit(edit.delta, edit.c, "linear_reconstruction")
    except (DegreeOverflow, ExtractionError, NoSolution, ShapeMismatch) as exc:
        return _reject("extraction_failed", str(exc))

    table = phi_table(edited, w.values, t)
    y_prime = [w[i] for i in inst.public_outputs]
    delta_coeffs = build_delta_out(y_prime, y_orig, out_points, field).coeffs
    for r, (rep, (zetas, final)) in enumerate(zip(proof.repetitions, all_zetas)):
        phi = mle_eval(table, zetas, q)
        dv = poly_eval_int(delta_coeffs, iota(zetas, q), q)
        if (rep.phi_claim, rep.delta_claim) != (phi, dv):
            return _reject("final_eval_mismatch", f"repetition {r} claims differ from recomputation")
        if final != phi * dv % q:
            return _reject("final_eval_mismatch", f"repetition {r}: g_t(zeta_t) != Phi*Delta")
        if phi:
            return _reject("residual_nonzero", f"repetition {r}: Phi(zeta) != 0")
    if not _diverges(delta_coeffs, div_points, q):
        return _reject("no_divergence", "Delta_out vanished at every divergence challenge")
    return VerifyResult(True, None, "", edit, w, underdetermined)
