"""Row-Vortex encoding of a candidate edit and its hash-based commitment.

An edit over a pool of k rows is a selection vector delta in {0,1}^k and
substitution constants c in F_q^k.  It is encoded as

    R(X, Y) = sum_i delta_i * row_i(X) + sum_i c_i * sel_i(Y)

where, by default,

    row_i(X) = sum_{j<k} alpha_i^j X^j + X^k * content_i(X)
    sel_i(Y) = sum_{j=1..k} beta_i^(j-1) Y^j

so the low X-coefficients of R are V(alpha)·delta and the Y-coefficients
are V(beta)·c.  Stacked, they form rho = M·(delta || c) for the
block-diagonal Vandermonde matrix M, which is invertible because the node
tuples are distinct.  ``content_i`` ties the encoding to the actual row
coefficients.

The commitment is a Merkle tree whose leaf x holds the coefficient list of
the slice R(x, Y) for x in 0..N-1.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from typing import Sequence

from .circuit.model import R1CSInstance
from .errors import (
    DegreeBudgetExceeded,
    FieldTooSmall,
    InvariantError,
    NonBooleanDelta,
    PointOutsideDomain,
    ShapeMismatch,
    SingularMatrix,
    DomainTooSmall,
)
from .ff import DensePoly, Field, invert_matrix, lagrange_interpolate, mat_vec, poly_eval_int
from .merkle import MerkleTree, root_from_path, sha256

SCHEME_ID = "merkle_eval_v1"
DEFAULT_D_ROW = 2


@dataclass(frozen=True)
class NodePlan:
    """Interpolation nodes and degree budgets.

    ``row_override``/``sel_override`` replace the default row and selector
    encodings with explicit coefficient lists (used for hand-written
    examples); the affine map then comes from their low coefficients.
    """

    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    d_row: int
    d_sel: int
    row_override: tuple[tuple[int, ...], ...] | None = None
    sel_override: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        if len(self.alpha) != len(self.beta):
            raise InvariantError("alpha and beta must have the same length")
        if len(set(self.alpha)) != len(self.alpha) or len(set(self.beta)) != len(self.beta):
            raise InvariantError("nodes must be pairwise distinct")
        if set(self.alpha) & set(self.beta):
            raise InvariantError("alpha and beta must be disjoint")

    @property
    def k(self) -> int:
        return len(self.alpha)

    def to_dict(self) -> dict:
        doc = {
            "alpha": [str(a) for a in self.alpha],
            "beta": [str(b) for b in self.beta],
            "d_row": self.d_row,
            "d_sel": self.d_sel,
        }
        if self.row_override is not None:
            doc["row_override"] = [[str(v) for v in p] for p in self.row_override]
        if self.sel_override is not None:
            doc["sel_override"] = [[str(v) for v in p] for p in self.sel_override]
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "NodePlan":
        def polys(key):
            raw = doc.get(key)
            return None if raw is None else tuple(tuple(int(v) for v in p) for p in raw)

        return cls(
            tuple(int(a) for a in doc["alpha"]),
            tuple(int(b) for b in doc["beta"]),
            int(doc["d_row"]),
            int(doc["d_sel"]),
            polys("row_override"),
            polys("sel_override"),
        )


def choose_nodes(field: Field, k: int, d_row: int = DEFAULT_D_ROW, d_sel: int | None = None) -> NodePlan:
    """alpha = (1..k), beta = (k+1..2k)."""
    if k < 1:
        raise ValueError("k must be positive")
    if field.q <= 2 * k:
        raise FieldTooSmall(f"q={field.q} must exceed 2k={2 * k}")
    return NodePlan(
        tuple(range(1, k + 1)),
        tuple(range(k + 1, 2 * k + 1)),
        d_row,
        k if d_sel is None else d_sel,
    )


def custom_plan(field: Field, row_polys: Sequence[DensePoly], sel_polys: Sequence[DensePoly]) -> NodePlan:
    """Plan that uses explicit row/selector polynomials instead of the default encodings."""
    k = len(row_polys)
    if len(sel_polys) != k:
        raise ShapeMismatch("need one selector per row polynomial")
    base = choose_nodes(field, k)
    d_row = max(p.degree for p in row_polys)
    d_sel = max(p.degree for p in sel_polys)
    return NodePlan(
        base.alpha,
        base.beta,
        max(d_row, 0),
        max(d_sel, 0),
        tuple(p.coeffs for p in row_polys),
        tuple(p.coeffs for p in sel_polys),
    )


# ---------------------------------------------------------------------------
# the affine map
# ---------------------------------------------------------------------------


def _vandermonde(nodes: Sequence[int], q: int) -> list[list[int]]:
    k = len(nodes)
    return [[pow(a, j, q) for a in nodes] for j in range(k)]


def _block_diag(top: list[list[int]], bottom: list[list[int]]) -> list[list[int]]:
    k = len(top)
    rows = [row + [0] * k for row in top]
    rows += [[0] * k + row for row in bottom]
    return rows


def _vandermonde_det(nodes: Sequence[int], q: int) -> int:
    det = 1
    for j in range(len(nodes)):
        for i in range(j):
            det = det * (nodes[j] - nodes[i]) % q
    return det


@dataclass(frozen=True)
class BlockVandermonde:
    matrix: tuple[tuple[int, ...], ...]
    det: int
    inverse: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.matrix)

    def apply(self, v: Sequence[int], q: int) -> list[int]:
        return mat_vec(self.matrix, v, q)

    def solve(self, rho: Sequence[int], q: int) -> list[int]:
        return mat_vec(self.inverse, rho, q)


def _override_matrix(plan: NodePlan, q: int) -> list[list[int]]:
    k = plan.k

    def coeff(p, j):
        return p[j] % q if j < len(p) else 0

    rows = plan.row_override or ()
    sels = plan.sel_override or ()
    top = [[coeff(rows[i], j) for i in range(k)] for j in range(k)]
    bottom = [[coeff(sels[i], j + 1) for i in range(k)] for j in range(k)]
    return _block_diag(top, bottom)


def build_block_vandermonde(plan: NodePlan, field: Field) -> BlockVandermonde:
    q = field.q
    if plan.row_override is not None:
        matrix = _override_matrix(plan, q)
        inverse = invert_matrix(matrix, field)
        det = _det(matrix, q)
    else:
        matrix = _block_diag(_vandermonde(plan.alpha, q), _vandermonde(plan.beta, q))
        det = _vandermonde_det(plan.alpha, q) * _vandermonde_det(plan.beta, q) % q
        if det == 0:
            raise SingularMatrix("node plan produced a singular map")
        inverse = invert_matrix(matrix, field)
    return BlockVandermonde(
        tuple(tuple(r) for r in matrix), det, tuple(tuple(r) for r in inverse)
    )


def _det(matrix: list[list[int]], q: int) -> int:
    a = [row[:] for row in matrix]
    n = len(a)
    det = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det = det * a[col][col] % q
        inv = pow(a[col][col], -1, q)
        for r in range(col + 1, n):
            if a[r][col]:
                f = a[r][col] * inv % q
                a[r] = [(x - f * y) % q for x, y in zip(a[r], a[col])]
    return det % q


# ---------------------------------------------------------------------------
# encodings
# ---------------------------------------------------------------------------


def _hash_stream(payload: bytes, count: int, q: int) -> list[int]:
    """``count`` field elements derived from SHA-256(payload || LE32 counter), rejection-sampled."""
    nbytes = (q.bit_length() + 7) // 8 + 8
    out = []
    ctr = 0
    limit = (256 ** nbytes // q) * q
    while len(out) < count:
        stream = b""
        while len(stream) < nbytes:
            stream += hashlib.sha256(payload + struct.pack("<I", ctr)).digest()
            ctr += 1
        v = int.from_bytes(stream[:nbytes], "big")
        if v < limit:
            out.append(v % q)
    return out


def row_content_stream(inst: R1CSInstance, row: int, d_row: int) -> list[int]:
    """d_row+1 values summarising a row: its nonzero coefficients, or a hash of them."""
    from .slicer import canonical_row_bytes

    q = inst.q
    con = inst.constraints[row]
    coeffs = [v for vec in (con.a, con.b, con.c) for _, v in vec]
    width = d_row + 1
    if len(coeffs) <= width:
        return coeffs + [0] * (width - len(coeffs))
    return _hash_stream(b"row-content" + canonical_row_bytes(inst, row), width, q)


def default_row_poly(inst: R1CSInstance, row: int, alpha_i: int, plan: NodePlan) -> DensePoly:
    field = inst.field
    q = field.q
    k = plan.k
    stream = row_content_stream(inst, row, plan.d_row)
    nodes = list(range(1, plan.d_row + 2))
    content = lagrange_interpolate(list(zip(nodes, stream)), field)
    low = [pow(alpha_i, j, q) for j in range(k)]
    high = list(content.coeffs) + [0] * (plan.d_row + 1 - len(content.coeffs))
    return DensePoly(low + high, field)


def default_sel_poly(beta_i: int, k: int, field: Field) -> DensePoly:
    q = field.q
    return DensePoly([0] + [pow(beta_i, j, q) for j in range(k)], field)


@dataclass(frozen=True)
class RowVortexEncoding:
    field: Field
    pool_rows: tuple[int, ...]
    plan: NodePlan
    row_polys: tuple[DensePoly, ...]
    sel_polys: tuple[DensePoly, ...]
    delta: tuple[int, ...]
    c: tuple[int, ...]
    rho: tuple[int, ...]
    # R(X,Y) = P(X) + S(Y) with S(0) = 0
    p_coeffs: tuple[int, ...]
    s_coeffs: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.pool_rows)

    @property
    def deg_x(self) -> int:
        return max([p.degree for p in self.row_polys] + [0])

    @property
    def deg_y(self) -> int:
        return max([p.degree for p in self.sel_polys] + [0])

    def slice_at(self, x: int) -> tuple[int, ...]:
        """Coefficients of the univariate R(x, Y), length deg_y + 1."""
        q = self.field.q
        out = [0] * (self.deg_y + 1)
        out[0] = poly_eval_int(self.p_coeffs, x, q)
        for j, v in enumerate(self.s_coeffs):
            if j:
                out[j] = (out[j] + v) % q
        return tuple(out)

    def evaluate(self, x: int, y: int) -> int:
        q = self.field.q
        return (poly_eval_int(self.p_coeffs, x, q) + poly_eval_int(self.s_coeffs, y, q)) % q

    def as_polys(self) -> tuple[DensePoly, DensePoly]:
        return DensePoly(self.p_coeffs, self.field), DensePoly(self.s_coeffs, self.field)


def encoding_polys(inst: R1CSInstance, pool_rows: Sequence[int], plan: NodePlan):
    field = inst.field
    k = len(pool_rows)
    if k != plan.k:
        raise ShapeMismatch(f"plan is for k={plan.k}, pool has {k} rows")
    if plan.row_override is not None:
        rows = tuple(DensePoly(p, field) for p in plan.row_override)
        sels = tuple(DensePoly(p, field) for p in plan.sel_override or ())
        if len(rows) != k or len(sels) != k:
            raise ShapeMismatch("override polynomial count does not match the pool")
        if any(p.degree > plan.d_row for p in rows) or any(p.degree > plan.d_sel for p in sels):
            raise DegreeBudgetExceeded("override polynomial exceeds the plan's degree budget")
        if any(p.coeff(0) for p in sels):
            raise InvariantError("selector polynomials must vanish at Y = 0")
        return rows, sels
    if plan.d_sel < k:
        raise DegreeBudgetExceeded(f"selectors need degree {k}, budget is d_sel={plan.d_sel}")
    rows = tuple(default_row_poly(inst, r, a, plan) for r, a in zip(pool_rows, plan.alpha))
    sels = tuple(default_sel_poly(b, k, field) for b in plan.beta)
    return rows, sels


def encode(
    pool_rows: Sequence[int],
    plan: NodePlan,
    delta: Sequence[int],
    c: Sequence[int],
    inst: R1CSInstance,
    polys=None,
) -> RowVortexEncoding:
    field = inst.field
    q = field.q
    k = len(pool_rows)
    if len(delta) != k or len(c) != k:
        raise ShapeMismatch("delta and c must match the pool size")
    if any(d not in (0, 1) for d in delta):
        raise NonBooleanDelta("delta must be a 0/1 vector")
    rows, sels = polys if polys is not None else encoding_polys(inst, pool_rows, plan)
    p = DensePoly.zero(field)
    s = DensePoly.zero(field)
    for d, row in zip(delta, rows):
        if d:
            p = p + row
    for ci, sel in zip(c, sels):
        if ci % q:
            s = s + sel * (ci % q)
    p_coeffs = p.coeffs
    s_coeffs = s.coeffs
    rho = tuple(
        [p.coeff(j) for j in range(k)] + [s.coeff(j + 1) for j in range(k)]
    )
    return RowVortexEncoding(
        field,
        tuple(pool_rows),
        plan,
        rows,
        sels,
        tuple(delta),
        tuple(ci % q for ci in c),
        rho,
        p_coeffs,
        s_coeffs,
    )


def recover_edit(rho: Sequence[int], block: BlockVandermonde, q: int) -> tuple[list[int], list[int]]:
    """(delta, c) = M^-1 rho (offset t = 0); delta must come out boolean."""
    v = block.solve(rho, q)
    k = len(v) // 2
    delta, c = v[:k], v[k:]
    if any(d not in (0, 1) for d in delta):
        raise NonBooleanDelta(f"recovered selection {delta} is not a 0/1 vector")
    return delta, c


# ---------------------------------------------------------------------------
# commitment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Commitment:
    root: bytes
    domain_size: int
    scheme_id: str = SCHEME_ID


@dataclass(frozen=True)
class OpeningProof:
    """Opening of leaf ``point``; ``claimed_value`` is the slice R(point, Y)."""

    point: int
    claimed_value: tuple[int, ...]
    auth_path: tuple[bytes, ...]


def leaf_bytes(x: int, slice_coeffs: Sequence[int], q: int) -> bytes:
    width = (q.bit_length() + 7) // 8
    body = b"".join((v % q).to_bytes(width, "big") for v in slice_coeffs)
    return sha256(struct.pack("<Q", x) + body)


def min_domain(enc: RowVortexEncoding) -> int:
    n = 1
    while n < enc.deg_x + 1:
        n <<= 1
    return n


_TREE_CACHE: dict[tuple[bytes, int], MerkleTree] = {}


def _build_tree(enc: RowVortexEncoding, domain_size: int) -> MerkleTree:
    q = enc.field.q
    return MerkleTree([leaf_bytes(x, enc.slice_at(x), q) for x in range(domain_size)])


def commit(enc: RowVortexEncoding, domain_size: int | None = None) -> Commitment:
    need = min_domain(enc)
    if domain_size is None:
        domain_size = need
    if domain_size & (domain_size - 1) or domain_size < need:
        raise DomainTooSmall(
            f"domain {domain_size} must be a power of two of at least {need}"
        )
    tree = _build_tree(enc, domain_size)
    if len(_TREE_CACHE) > 8:
        _TREE_CACHE.clear()
    _TREE_CACHE[(tree.root, domain_size)] = tree
    return Commitment(tree.root, domain_size)


def open_at(enc: RowVortexEncoding, commitment: Commitment, point: int) -> OpeningProof:
    if not 0 <= point < commitment.domain_size:
        raise PointOutsideDomain(f"{point} outside 0..{commitment.domain_size - 1}")
    key = (commitment.root, commitment.domain_size)
    tree = _TREE_CACHE.get(key)
    if tree is None:
        tree = _build_tree(enc, commitment.domain_size)
        if tree.root != commitment.root:
            raise InvariantError("encoding does not match the commitment")
        _TREE_CACHE[key] = tree
    return OpeningProof(point, enc.slice_at(point), tuple(tree.path(point)))


def verify_opening(commitment: Commitment, proof: OpeningProof, q: int) -> bool:
    size = commitment.domain_size
    if not 0 <= proof.point < size or (1 << len(proof.auth_path)) != size:
        return False
    if any(not 0 <= v < q for v in proof.claimed_value):
        return False
    leaf = leaf_bytes(proof.point, proof.claimed_value, q)
    return root_from_path(leaf, proof.point, proof.auth_path) == commitment.root
