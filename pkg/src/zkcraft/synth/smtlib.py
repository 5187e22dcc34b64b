"""SMT-LIB2 query text for a fixed number of edits, plus an S-expression reader.

The query is written over Ints with explicit ``mod q`` congruences.  It
declares an original witness ``o_i`` and an edited witness ``e_i`` sharing
their inputs, selection bits ``d_j`` and constants ``c_j`` for the pool,
and asserts that the original system holds on ``o``, the edited system on
``e``, exactly ``t`` edits are selected and some public output differs.
Nothing here runs a solver.
"""

from __future__ import annotations

from typing import Sequence

from ..circuit.model import R1CSInstance, SparseRow
from ..errors import ReparseFailure


def _lin(vec: SparseRow, prefix: str) -> str:
    if not vec:
        return "0"
    terms = [f"(* {c} {prefix}{i})" for i, c in vec]
    return terms[0] if len(terms) == 1 else "(+ " + " ".join(terms) + ")"


def _residual(con, prefix: str) -> str:
    return f"(- (* {_lin(con.a, prefix)} {_lin(con.b, prefix)}) {_lin(con.c, prefix)})"


def _zero_mod(expr: str) -> str:
    return f"(assert (= (mod {expr} q) 0))"


def smtlib_emit(inst: R1CSInstance, pool_rows: Sequence[int], t: int) -> str:
    k = len(pool_rows)
    if not 0 <= t <= k:
        raise ValueError(f"cardinality t={t} must lie in 0..{k}")
    n = inst.n
    lines = [
        f"; edits over {k} candidate rows, exactly {t} selected",
        "(set-logic QF_NIA)",
        f"(define-fun q () Int {inst.q})",
    ]
    for prefix in ("o", "e"):
        for i in range(n):
            lines.append(f"(declare-const {prefix}{i} Int)")
            lines.append(f"(assert (and (<= 0 {prefix}{i}) (< {prefix}{i} q)))")
        lines.append(f"(assert (= {prefix}0 1))")
    for i in inst.input_indices:
        lines.append(f"(assert (= o{i} e{i}))")
    for r, con in enumerate(inst.constraints):
        lines.append(_zero_mod(_residual(con, "o")))

    pool_pos = {row: j for j, row in enumerate(pool_rows)}
    for j, row in enumerate(pool_rows):
        lines.append(f"(declare-const d{j} Int)")
        lines.append(f"(declare-const c{j} Int)")
        lines.append(f"(assert (or (= d{j} 0) (= d{j} 1)))")
        lines.append(f"(assert (and (<= 0 c{j}) (< c{j} q)))")
        if inst.target_of_row(row) is None:
            lines.append(f"(assert (= d{j} 0))")
        lines.append(f"(assert (=> (= d{j} 0) (= c{j} 0)))")
    for r, con in enumerate(inst.constraints):
        if r in pool_pos and inst.target_of_row(r) is not None:
            j = pool_pos[r]
            target = inst.target_of_row(r)
            edited = f"(- c{j} e{target})"
            lines.append(_zero_mod(f"(ite (= d{j} 1) {edited} {_residual(con, 'e')})"))
        else:
            lines.append(_zero_mod(_residual(con, "e")))
    if k:
        lines.append(f"(assert (= (+ 0 {' '.join(f'd{j}' for j in range(k))}) {t}))")
    outs = inst.public_outputs
    if outs:
        diffs = " ".join(f"(distinct o{i} e{i})" for i in outs)
        lines.append(f"(assert (or false {diffs}))")
    else:
        lines.append("(assert false)")
    lines += ["(check-sat)", "(get-model)"]
    return "\n".join(lines) + "\n"


def parse_sexprs(text: str) -> list:
    """Parse S-expressions into nested lists of atoms; ReparseFailure when unbalanced."""
    out: list = []
    stack: list[list] = [out]
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == ";":
            while i < len(text) and text[i] != "\n":
                i += 1
        elif ch == "(":
            stack.append([])
        elif ch == ")":
            if len(stack) == 1:
                raise ReparseFailure(f"unbalanced ')' at offset {i}")
            done = stack.pop()
            stack[-1].append(done)
        elif not ch.isspace():
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in "();":
                j += 1
            stack[-1].append(text[i:j])
            i = j
            continue
        i += 1
    if len(stack) != 1:
        raise ReparseFailure("unterminated S-expression")
    return out
