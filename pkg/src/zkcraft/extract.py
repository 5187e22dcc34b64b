"""Recover the edit and witness carried by an accepted proof and build the counterexample."""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .circuit.execute import solve_witness
from .circuit.model import ExecutionTrace, R1CSInstance, Witness, apply_edits, split_trace
from .errors import ExtractionError, InvariantError, NoSolution, ShapeMismatch
from .ff import Field, lagrange_interpolate
from .proof import MODE_COEFFICIENTS, ViolationProof, decode_witness_poly
from .vortex import BlockVandermonde, NodePlan, recover_edit


@dataclass(frozen=True)
class RecoveredEdit:
    delta: tuple[int, ...]
    c: tuple[int, ...]
    source: str = "interpolated_witness"  # or linear_reconstruction


@dataclass
class ReconstructedWitness:
    witness: Witness
    underdetermined: bool
    free_vars: list[int] = dc_field(default_factory=list)


@dataclass
class Counterexample:
    edit: RecoveredEdit
    w_prime: Witness
    trace: ExecutionTrace
    y_orig: tuple[int, ...]
    mutated_source: str
    replayed: bool = False

    def to_dict(self) -> dict:
        return {
            "delta": list(self.edit.delta),
            "c": [str(v) for v in self.edit.c],
            "x_prime": [str(v) for v in self.trace.x],
            "z_prime": [str(v) for v in self.trace.z],
            "y_prime": [str(v) for v in self.trace.y],
            "y_orig": [str(v) for v in self.y_orig],
            "mutated_source": self.mutated_source,
            "replayed": self.replayed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"


def recover_r_coeffs(proof: ViolationProof, field: Field) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The committed R(X,Y) as (P coefficients, S coefficients).

    In slices mode P is interpolated from the opened values R(x, 0) and S is
    read off the higher slice coefficients, which every slice shares.
    """
    if proof.mode == MODE_COEFFICIENTS:
        return proof.p_coeffs, proof.s_coeffs
    points: dict[int, int] = {}
    s_part = None
    for rep in proof.repetitions:
        sl = rep.opening.claimed_value
        if not sl:
            raise ExtractionError("empty opened slice")
        if points.get(rep.opening.point, sl[0]) != sl[0]:
            raise ExtractionError("conflicting openings at one position")
        points[rep.opening.point] = sl[0]
        tail = tuple(sl[1:])
        if s_part is not None and tail != s_part:
            raise ExtractionError("opened slices disagree on the Y part")
        s_part = tail
    p = lagrange_interpolate(sorted(points.items()), field).coeffs
    s = (0,) + (s_part or ())
    while s and s[-1] == 0:
        s = s[:-1]
    return p, s


def rho_from_coeffs(p: Sequence[int], s: Sequence[int], k: int) -> list[int]:
    def at(seq, j):
        return seq[j] if j < len(seq) else 0

    return [at(p, j) for j in range(k)] + [at(s, j + 1) for j in range(k)]


def extract_selection(proof: ViolationProof, plan: NodePlan, block: BlockVandermonde, field: Field) -> RecoveredEdit:
    """(delta, c) = M^-1 rho; raises NonBooleanDelta on an inconsistent proof."""
    p, s = recover_r_coeffs(proof, field)
    rho = rho_from_coeffs(p, s, plan.k)
    delta, c = recover_edit(rho, block, field.q)
    return RecoveredEdit(tuple(delta), tuple(c))


def interpolate_witness(proof: ViolationProof, n: int, field: Field) -> Witness | None:
    if proof.witness_poly is None:
        return None
    values = decode_witness_poly(proof.witness_poly, n, field)
    try:
        return Witness(tuple(values))
    except InvariantError as exc:
        raise ExtractionError(f"witness polynomial does not encode a witness: {exc}") from None


def reconstruct_witness(
    inst: R1CSInstance, pool_rows: Sequence[int], edit: RecoveredEdit, x_prime: Sequence[int]
) -> ReconstructedWitness:
    """Solve the edited system with the inputs pinned to ``x_prime``."""
    edited = apply_edits(inst, pool_rows, edit.delta, edit.c)
    if len(x_prime) != len(inst.input_indices):
        raise ShapeMismatch("x_prime does not match the instance inputs")
    res = solve_witness(edited, dict(zip(inst.input_indices, x_prime)))
    if not res.ok:
        raise NoSolution(f"edited system unsatisfiable at rows {res.violated_rows}")
    return ReconstructedWitness(res.witness, res.status == "underdetermined", res.free_vars)


def substitutions_for(inst: R1CSInstance, pool_rows: Sequence[int], edit: RecoveredEdit) -> dict[str, int]:
    subs = {}
    for row, d, c in zip(pool_rows, edit.delta, edit.c):
        if d:
            subs[inst.site_of_row[row].site_id] = c
    return subs


def assemble_counterexample(
    inst: R1CSInstance,
    pool_rows: Sequence[int],
    edit: RecoveredEdit,
    w_prime: Witness,
    y_orig: Sequence[int],
    program_text: str | None = None,
    replay: bool = False,
) -> Counterexample:
    from .synth.circom import emit_mutated_source, render_edit_listing, replay_program

    trace = split_trace(inst, w_prime)
    if tuple(trace.y) == tuple(v % inst.q for v in y_orig):
        raise ExtractionError("recovered outputs equal the original outputs")
    subs = substitutions_for(inst, pool_rows, edit)
    if program_text is not None:
        mutated = emit_mutated_source(program_text, subs).source_text
    else:
        mutated = render_edit_listing(inst, subs)
    replayed = False
    if replay and program_text is not None:
        names = [inst.name_of(i) for i in inst.input_indices]
        values = replay_program(mutated, dict(zip(names, trace.x)), inst.q)
        for idx in inst.public_outputs:
            if values.get(inst.name_of(idx)) != w_prime[idx]:
                raise ExtractionError(f"replay disagrees on output {inst.name_of(idx)}")
        replayed = True
    return Counterexample(edit, w_prime, trace, tuple(v % inst.q for v in y_orig), mutated, replayed)
