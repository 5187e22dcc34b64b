"""Seeded random circuits for tests, demos and scaling runs.

Chain circuits assign one fresh variable per row, ``v_r <== L1 * L2`` with
L1, L2 affine in earlier variables, so forward execution is always
determined and every row is a weak site.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .circuit.execute import execute
from .circuit.model import Constraint, R1CSInstance, WeakSite, Witness, apply_edits, sparse
from .ff import Field


@dataclass
class ChainCircuit:
    inst: R1CSInstance
    program: str
    rows_lin: list[tuple[dict[int, int], dict[int, int]]]

    def evaluate(self, x: Sequence[int], overrides: dict[int, int] | None = None) -> list[int]:
        """Direct evaluation, independent of the constraint solver; ``overrides`` maps row -> constant."""
        q = self.inst.q
        vals = [1, *(v % q for v in x)]
        for r, (l1, l2) in enumerate(self.rows_lin):
            if overrides and r in overrides:
                vals.append(overrides[r] % q)
                continue
            a = sum(c * vals[i] for i, c in l1.items()) % q
            b = sum(c * vals[i] for i, c in l2.items()) % q
            vals.append(a * b % q)
        return vals


def _affine(rng: random.Random, upto: int, q: int, density: float) -> dict[int, int]:
    terms = {}
    for i in range(upto):
        if i == 0 or rng.random() < density:
            v = rng.randrange(q)
            if v:
                terms[i] = v
    if not any(i for i in terms):  # keep at least one variable term
        terms[rng.randrange(1, upto)] = rng.randrange(1, q)
    return terms


def _expr(terms: dict[int, int], names: Sequence[str]) -> str:
    parts = []
    for i, c in sorted(terms.items()):
        if i == 0:
            parts.append(str(c))
        else:
            parts.append(names[i] if c == 1 else f"{c}*{names[i]}")
    return " + ".join(parts) if parts else "0"


def chain_circuit(
    field: Field,
    num_inputs: int,
    num_rows: int,
    num_outputs: int = 1,
    seed: int = 0,
    density: float = 0.5,
    weak_rows: Sequence[int] | None = None,
) -> ChainCircuit:
    """``weak_rows`` limits which rows are mutable ``<==`` sites (default: all)."""
    if num_inputs < 1 or num_rows < 1 or not 1 <= num_outputs <= num_rows:
        raise ValueError("need at least one input, one row and 1..rows outputs")
    rng = random.Random(seed)
    q = field.q
    n = 1 + num_inputs + num_rows
    names = ["one"] + [f"x{i}" for i in range(num_inputs)] + [f"v{r}" for r in range(num_rows)]
    classes = ["one"] + ["priv_in"] * num_inputs
    classes += ["intermediate"] * (num_rows - num_outputs) + ["pub_out"] * num_outputs
    rows, lin, sites = [], [], []
    lines = [f"signal private input x{i};" for i in range(num_inputs)]
    for r in range(num_rows):
        tgt = 1 + num_inputs + r
        if classes[tgt] == "pub_out":
            lines.append(f"signal output v{r};")
        else:
            lines.append(f"signal v{r};")
    lines.append("")
    for r in range(num_rows):
        tgt = 1 + num_inputs + r
        l1 = _affine(rng, tgt, q, density)
        l2 = _affine(rng, tgt, q, density) if rng.random() < 0.6 else {0: 1}
        rows.append(Constraint(sparse(l1, q), sparse(l2, q), sparse({tgt: 1}, q)))
        lin.append((l1, l2))
        rhs = _expr(l1, names) if l2 == {0: 1} else f"({_expr(l1, names)}) * ({_expr(l2, names)})"
        if weak_rows is None or r in weak_rows:
            sites.append(WeakSite(f"main.v{r}", (r,), tgt))
            lines.append(f"v{r} <== {rhs};")
        else:
            # a strong constraint: the value is assigned separately and checked
            lines.append(f"v{r} <-- {rhs};")
            lines.append(f"v{r} === {rhs};")
    inst = R1CSInstance(field, n, tuple(rows), tuple(classes), tuple(sites), tuple(names))
    return ChainCircuit(inst, "\n".join(lines) + "\n", lin)


@dataclass
class HonestStatement:
    inst: R1CSInstance
    pool_rows: tuple[int, ...]
    delta: tuple[int, ...]
    c: tuple[int, ...]
    w_prime: Witness
    y_orig: tuple[int, ...]
    x: tuple[int, ...]


def honest_statement(field: Field, rng: random.Random, max_m: int = 16, max_n: int = 12, tries: int = 64) -> HonestStatement:
    """A random chain circuit and a true violation statement for it."""
    for _ in range(tries):
        num_inputs = rng.randint(1, 3)
        num_rows = rng.randint(1, min(max_m, max_n - 1 - num_inputs))
        num_out = rng.randint(1, num_rows)
        circ = chain_circuit(field, num_inputs, num_rows, num_out, rng.randrange(1 << 30))
        inst = circ.inst
        pool = tuple(range(inst.m))
        x = tuple(rng.randrange(field.q) for _ in range(num_inputs))
        orig = execute(inst, x).witness
        y_orig = tuple(orig[i] for i in inst.public_outputs)
        t = rng.randint(1, min(3, inst.m))
        chosen = set(rng.sample(range(inst.m), t))
        delta = tuple(1 if j in chosen else 0 for j in pool)
        c = tuple(rng.randrange(field.q) if d else 0 for d in delta)
        res = execute(apply_edits(inst, pool, delta, c), x)
        if not res.ok:
            continue
        if tuple(res.witness[i] for i in inst.public_outputs) == y_orig:
            continue
        return HonestStatement(inst, pool, delta, c, res.witness, y_orig, x)
    raise RuntimeError("could not draw a diverging statement")
