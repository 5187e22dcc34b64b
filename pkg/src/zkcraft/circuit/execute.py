"""Running a constraint system forward: derive a witness from its inputs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..errors import ShapeMismatch
from ..ff import solve_linear
from .model import R1CSInstance, Witness, eval_residuals


@dataclass
class ExecutionResult:
    """Outcome of :func:`solve_witness`.

    ``status`` is ``ok`` (all rows hold, every value forced),
    ``underdetermined`` (all rows hold, some free values set to 0) or
    ``violated`` (no assignment found; ``witness`` is the best attempt).
    """

    status: str
    witness: Witness | None
    free_vars: list[int] = field(default_factory=list)
    violated_rows: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status in ("ok", "underdetermined")


def _split(vec, known: dict[int, int], q: int) -> tuple[int, dict[int, int]]:
    """Constant part and unknown-variable coefficients of a sparse row."""
    const = 0
    coeffs: dict[int, int] = {}
    for idx, c in vec:
        if idx in known:
            const += c * known[idx]
        else:
            coeffs[idx] = c
    return const % q, coeffs


def _forward(inst: R1CSInstance, known: dict[int, int]) -> None:
    """Solve rows with a single unknown that enters linearly, until stuck."""
    q = inst.q
    pending = set(range(inst.m))
    progress = True
    while progress:
        progress = False
        for r in sorted(pending):
            con = inst.constraints[r]
            unknown = {i for i in con.support() if i not in known}
            if not unknown:
                pending.discard(r)
                continue
            if len(unknown) != 1:
                continue
            (u,) = unknown
            a0, a1 = _split(con.a, known, q)
            b0, b1 = _split(con.b, known, q)
            c0, c1 = _split(con.c, known, q)
            a1, b1, c1 = a1.get(u, 0), b1.get(u, 0), c1.get(u, 0)
            # (a0 + a1 u)(b0 + b1 u) - (c0 + c1 u) = 0
            quad = a1 * b1 % q
            lin = (a0 * b1 + a1 * b0 - c1) % q
            const = (a0 * b0 - c0) % q
            if quad or not lin:
                continue
            known[u] = -const * pow(lin, -1, q) % q
            pending.discard(r)
            progress = True


def _linear_fill(inst: R1CSInstance, known: dict[int, int]) -> list[int]:
    """Solve the rows that are linear in the remaining unknowns; returns free variables."""
    q = inst.q
    unknown = sorted(set(range(inst.n)) - set(known))
    if not unknown:
        return []
    col = {v: j for j, v in enumerate(unknown)}
    matrix, rhs = [], []
    for con in inst.constraints:
        a0, a1 = _split(con.a, known, q)
        b0, b1 = _split(con.b, known, q)
        c0, c1 = _split(con.c, known, q)
        if not (a1 or b1 or c1) or (a1 and b1):
            continue
        row = [0] * len(unknown)
        for v, c in a1.items():
            row[col[v]] += c * b0
        for v, c in b1.items():
            row[col[v]] += c * a0
        for v, c in c1.items():
            row[col[v]] -= c
        matrix.append([x % q for x in row])
        rhs.append((c0 - a0 * b0) % q)
    if not matrix:
        for v in unknown:
            known[v] = 0
        return unknown
    sol = solve_linear(matrix, rhs, inst.field)
    if not sol.consistent:
        for v in unknown:
            known.setdefault(v, 0)
        return []
    for v, j in col.items():
        known[v] = sol.solution[j]
    return [unknown[j] for j in sol.free_columns]


def solve_witness(inst: R1CSInstance, pinned: Mapping[int, int]) -> ExecutionResult:
    """Complete a partial assignment to a witness of ``inst``.

    Forward substitution first, then one linear solve over the rows that are
    linear in what remains; free variables are set to 0.
    """
    q = inst.q
    known = {0: 1}
    for idx, v in pinned.items():
        if not 0 <= idx < inst.n:
            raise ShapeMismatch(f"pinned index {idx} outside the instance")
        known[idx] = v % q
    _forward(inst, known)
    free = _linear_fill(inst, known)
    if free:
        # free values are fixed now; rows that were quadratic may have become solvable
        _forward(inst, known)
    values = tuple(known.get(i, 0) for i in range(inst.n))
    w = Witness(values)
    bad = [r for r, v in enumerate(eval_residuals(inst, w)) if v]
    if bad:
        return ExecutionResult("violated", w, free, bad)
    return ExecutionResult("underdetermined" if free else "ok", w, free)


def execute(inst: R1CSInstance, x: Sequence[int]) -> ExecutionResult:
    """Run the system on inputs ``x`` (public and private inputs, index order)."""
    idxs = inst.input_indices
    if len(x) != len(idxs):
        raise ShapeMismatch(f"expected {len(idxs)} inputs, got {len(x)}")
    return solve_witness(inst, dict(zip(idxs, x)))
