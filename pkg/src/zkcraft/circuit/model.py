"""R1CS data model: instances, witnesses, traces and residuals."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

from ..errors import IndexOutOfRange, InvariantError, SchemaError, ShapeMismatch
from ..ff import Field

VAR_CLASSES = ("one", "pub_in", "pub_out", "priv_in", "intermediate")
# W: values the prover is free to choose; K: constant wire and public terms
WITNESS_CLASSES = frozenset({"priv_in", "intermediate"})
PUBLIC_CLASSES = frozenset({"one", "pub_in", "pub_out"})
INPUT_CLASSES = frozenset({"pub_in", "priv_in"})

SparseRow = tuple[tuple[int, int], ...]


def sparse(entries: Mapping[int, int] | Sequence[tuple[int, int]], q: int) -> SparseRow:
    """Canonical sparse vector: sorted by index, reduced, zeros dropped, duplicates summed."""
    items = entries.items() if isinstance(entries, Mapping) else entries
    acc: dict[int, int] = {}
    for idx, coeff in items:
        acc[int(idx)] = (acc.get(int(idx), 0) + int(coeff)) % q
    return tuple((i, v) for i, v in sorted(acc.items()) if v)


def dot(row: SparseRow, values: Sequence[int], q: int) -> int:
    return sum(coeff * values[idx] for idx, coeff in row) % q


@dataclass(frozen=True)
class Constraint:
    """One rank-1 constraint <a,w>*<b,w> = <c,w>."""

    a: SparseRow
    b: SparseRow
    c: SparseRow

    def support(self) -> set[int]:
        return {i for vec in (self.a, self.b, self.c) for i, _ in vec}

    def residual(self, values: Sequence[int], q: int) -> int:
        return (dot(self.a, values, q) * dot(self.b, values, q) - dot(self.c, values, q)) % q


@dataclass(frozen=True)
class WeakSite:
    """A weak-assignment source location and the R1CS rows it compiles to.

    ``target`` is the variable the assignment writes; when omitted it is
    inferred from a row whose C side touches a single variable.
    """

    site_id: str
    rows: tuple[int, ...]
    target: int | None = None


@dataclass(frozen=True)
class R1CSInstance:
    field: Field
    num_vars: int
    constraints: tuple[Constraint, ...]
    var_classes: tuple[str, ...]
    weak_sites: tuple[WeakSite, ...] = ()
    signal_names: tuple[str, ...] | None = None

    def __post_init__(self):
        n = self.num_vars
        if n < 1:
            raise InvariantError("num_vars must be at least 1 (the constant wire)")
        if len(self.var_classes) != n:
            raise InvariantError(f"var_classes has {len(self.var_classes)} entries, expected {n}")
        for cls in self.var_classes:
            if cls not in VAR_CLASSES:
                raise SchemaError(f"unknown var class {cls!r}")
        if self.var_classes[0] != "one":
            raise InvariantError("index 0 must be the constant-one wire")
        if "one" in self.var_classes[1:]:
            raise InvariantError("only index 0 may have class 'one'")
        for r, con in enumerate(self.constraints):
            for idx in con.support():
                if not 0 <= idx < n:
                    raise InvariantError(f"constraint {r} references variable {idx} >= {n}")
        seen: set[int] = set()
        site_ids: set[str] = set()
        for site in self.weak_sites:
            if site.site_id in site_ids:
                raise InvariantError(f"duplicate weak site {site.site_id!r}")
            site_ids.add(site.site_id)
            for r in site.rows:
                if not 0 <= r < self.m:
                    raise InvariantError(f"weak site {site.site_id!r} references row {r}")
                if r in seen:
                    raise InvariantError(f"row {r} belongs to more than one weak site")
                seen.add(r)
            if site.target is not None and not 0 < site.target < n:
                raise InvariantError(f"weak site {site.site_id!r} target out of range")
        if self.signal_names is not None and len(self.signal_names) != n:
            raise InvariantError("signal_names must name every variable")

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def m(self) -> int:
        return len(self.constraints)

    @property
    def n(self) -> int:
        return self.num_vars

    def indices_of(self, *classes: str) -> list[int]:
        return [i for i, c in enumerate(self.var_classes) if c in classes]

    @cached_property
    def public_outputs(self) -> tuple[int, ...]:
        return tuple(self.indices_of("pub_out"))

    @cached_property
    def input_indices(self) -> tuple[int, ...]:
        return tuple(self.indices_of("pub_in", "priv_in"))

    @cached_property
    def intermediate_indices(self) -> tuple[int, ...]:
        return tuple(self.indices_of("intermediate"))

    @cached_property
    def rows_touching(self) -> dict[int, tuple[int, ...]]:
        """Variable index -> rows whose support contains it."""
        out: dict[int, list[int]] = {}
        for r, con in enumerate(self.constraints):
            for idx in con.support():
                out.setdefault(idx, []).append(r)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def site_of_row(self) -> dict[int, WeakSite]:
        return {r: site for site in self.weak_sites for r in site.rows}

    def site(self, site_id: str) -> WeakSite:
        for s in self.weak_sites:
            if s.site_id == site_id:
                return s
        raise KeyError(site_id)

    def target_of_row(self, row: int) -> int | None:
        """Variable written by the weak assignment that owns ``row``, if any."""
        site = self.site_of_row.get(row)
        if site is None:
            return None
        if site.target is not None:
            return site.target
        for r in site.rows:
            c_vars = [i for i, _ in self.constraints[r].c if i != 0]
            if len(c_vars) == 1:
                return c_vars[0]
        return None

    def is_mutable(self, row: int) -> bool:
        return self.target_of_row(row) is not None

    def name_of(self, idx: int) -> str:
        if self.signal_names is not None:
            return self.signal_names[idx]
        return f"w{idx}"

    def with_constraints(self, constraints: Sequence[Constraint]) -> "R1CSInstance":
        return R1CSInstance(
            self.field,
            self.num_vars,
            tuple(constraints),
            self.var_classes,
            self.weak_sites,
            self.signal_names,
        )


@dataclass(frozen=True)
class Witness:
    """Full assignment w in F_q^n; ``values[0]`` is the constant 1."""

    values: tuple[int, ...]

    def __post_init__(self):
        if not self.values or self.values[0] != 1:
            raise InvariantError("witness must start with the constant 1")

    def __len__(self):
        return len(self.values)

    def __getitem__(self, idx):
        return self.values[idx]


@dataclass(frozen=True)
class ExecutionTrace:
    """Witness split by class: inputs x, intermediates z, public outputs y (index order)."""

    x: tuple[int, ...]
    z: tuple[int, ...]
    y: tuple[int, ...]


def _values(w) -> Sequence[int]:
    return w.values if isinstance(w, Witness) else w


def eval_residuals(inst: R1CSInstance, w: Witness | Sequence[int]) -> list[int]:
    vals = _values(w)
    if len(vals) != inst.n:
        raise ShapeMismatch(f"witness has {len(vals)} values, instance has {inst.n} variables")
    q = inst.q
    return [con.residual(vals, q) for con in inst.constraints]


def is_satisfied(inst: R1CSInstance, w) -> bool:
    return not any(eval_residuals(inst, w))


def split_trace(inst: R1CSInstance, w: Witness | Sequence[int]) -> ExecutionTrace:
    vals = _values(w)
    if len(vals) != inst.n:
        raise ShapeMismatch("witness length does not match the instance")
    return ExecutionTrace(
        tuple(vals[i] for i in inst.input_indices),
        tuple(vals[i] for i in inst.intermediate_indices),
        tuple(vals[i] for i in inst.public_outputs),
    )


def witness_from_trace(inst: R1CSInstance, trace: ExecutionTrace) -> Witness:
    groups = (
        (inst.input_indices, trace.x),
        (inst.intermediate_indices, trace.z),
        (inst.public_outputs, trace.y),
    )
    values = [0] * inst.n
    values[0] = 1
    for idxs, vals in groups:
        if len(idxs) != len(vals):
            raise ShapeMismatch("trace shape does not match var_classes")
        for i, v in zip(idxs, vals):
            values[i] = v % inst.q
    return Witness(tuple(values))


def check_tcct(inst: R1CSInstance, trace: ExecutionTrace, original_y: Sequence[int]) -> bool:
    """Trace satisfies the constraints yet produces different public outputs."""
    if len(original_y) != len(inst.public_outputs):
        raise ShapeMismatch("original_y has the wrong number of outputs")
    w = witness_from_trace(inst, trace)
    if any(eval_residuals(inst, w)):
        return False
    q = inst.q
    return any((a - b) % q for a, b in zip(trace.y, original_y))


def differential_check(
    inst: R1CSInstance,
    base: Witness | Sequence[int],
    delta_z: Mapping[int, int],
    delta_y: Mapping[int, int],
    extra_rows: Sequence[int] = (),
) -> bool:
    """Cheap recheck after additive deltas to a witness that already satisfies ``inst``.

    ``delta_z`` may shift any input or intermediate, ``delta_y`` only public
    outputs.  Only rows touching a shifted variable (plus ``extra_rows``) are
    evaluated, so the verdict equals a full recheck whenever ``base`` itself
    satisfies every untouched row.
    """
    vals = list(_values(base))
    if len(vals) != inst.n:
        raise ShapeMismatch("base witness length does not match the instance")
    q = inst.q
    for idx in delta_z:
        if not 0 < idx < inst.n or inst.var_classes[idx] == "pub_out":
            raise IndexOutOfRange(f"delta_z index {idx} is not an input/intermediate")
    for idx in delta_y:
        if not 0 < idx < inst.n or inst.var_classes[idx] != "pub_out":
            raise IndexOutOfRange(f"delta_y index {idx} is not a public output")
    if not any(v % q for v in delta_y.values()):
        return False
    touched = set(extra_rows)
    for idx, dv in list(delta_z.items()) + list(delta_y.items()):
        if dv % q:
            vals[idx] = (vals[idx] + dv) % q
            touched.update(inst.rows_touching.get(idx, ()))
    return all(inst.constraints[r].residual(vals, q) == 0 for r in sorted(touched))


def edited_constraint(inst: R1CSInstance, row: int, c_value: int) -> Constraint:
    """The weak-assignment substitution ``target <== c`` as an R1CS row."""
    target = inst.target_of_row(row)
    if target is None:
        raise InvariantError(f"row {row} is not a mutable weak-assignment row")
    q = inst.q
    return Constraint(sparse({0: c_value}, q), ((0, 1),), ((target, 1),))


def apply_edits(
    inst: R1CSInstance, rows: Sequence[int], delta: Sequence[int], c: Sequence[int]
) -> R1CSInstance:
    """Replace each selected pool row (delta_i = 1) by ``target <== c_i``.

    Unselected slots must carry c_i = 0 so the edit vector stays canonical.
    """
    if not len(rows) == len(delta) == len(c):
        raise ShapeMismatch("rows, delta and c must have equal length")
    q = inst.q
    constraints = list(inst.constraints)
    for row, d, ci in zip(rows, delta, c):
        if d not in (0, 1):
            raise InvariantError("delta entries must be 0 or 1")
        if d == 0:
            if ci % q:
                raise InvariantError("c must be zero on unselected slots")
            continue
        constraints[row] = edited_constraint(inst, row, ci)
    return inst.with_constraints(constraints)
