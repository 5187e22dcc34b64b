"""Prime-field arithmetic, dense univariate polynomials and small linear algebra.

Field values are plain Python ints kept in ``[0, q)``; :class:`FieldElement`
wraps one together with its :class:`Field` for element-level code and for the
public API.  Hot loops elsewhere in the package work on raw ints and reduce
with ``% q`` directly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

from .errors import (
    DivisionByZero,
    DuplicateNode,
    ModulusMismatch,
    NotPrime,
    SingularMatrix,
)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_probable_prime(n: int, rounds: int = 16) -> bool:
    """Miller-Rabin; deterministic below 3.3e24, probabilistic above."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    bases = list(_SMALL_PRIMES[:13])
    if n >= 3317044064679887385961981:
        rng = random.Random(n)
        bases += [rng.randrange(2, n - 1) for _ in range(rounds)]
    for a in bases:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Field:
    """The prime field F_q (the spec's FieldModulus)."""

    q: int
    name: str = dc_field(default="", compare=False)

    def __post_init__(self):
        if not isinstance(self.q, int) or self.q < 3:
            raise NotPrime(f"modulus must be an integer >= 3, got {self.q!r}")
        if not is_probable_prime(self.q):
            raise NotPrime(f"{self.q} is not prime")

    def __repr__(self):
        return f"Field({self.name or self.q})"

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(value, self)

    @property
    def byte_len(self) -> int:
        return (self.q.bit_length() + 7) // 8

    def reduce(self, value: int) -> int:
        return value % self.q

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return pow(a, -1, self.q)

    def random(self, rng: random.Random) -> int:
        return rng.randrange(self.q)

    def to_bytes(self, value: int) -> bytes:
        return (value % self.q).to_bytes(self.byte_len, "big")

    def two_adicity(self) -> int:
        s, r = 0, self.q - 1
        while r % 2 == 0:
            r //= 2
            s += 1
        return s

    def root_of_unity(self, order: int) -> int:
        """A primitive root of unity of power-of-two ``order``."""
        if order & (order - 1) or order < 1:
            raise ValueError("order must be a power of two")
        if (self.q - 1) % order:
            raise ValueError(f"F_{self.q} has no subgroup of order {order}")
        exponent = (self.q - 1) // order
        for g in range(2, self.q):
            w = pow(g, exponent, self.q)
            if order == 1 or pow(w, order // 2, self.q) != 1:
                return w
        raise ValueError("no root of unity found")


TEST101 = Field(101, "test101")
BN254_SCALAR = Field(
    21888242871839275222246405745257275088548364400416034343698204186575808495617,
    "bn254scalar",
)
PRESETS = {"test101": TEST101, "bn254scalar": BN254_SCALAR}


def field_from_name(spec: str | int) -> Field:
    """Resolve a preset name or a decimal modulus."""
    if isinstance(spec, int):
        return Field(spec)
    if spec in PRESETS:
        return PRESETS[spec]
    try:
        return Field(int(spec))
    except ValueError as exc:
        if isinstance(exc, NotPrime):
            raise
        raise ValueError(f"unknown field {spec!r}") from None


class FieldElement:
    """Canonical element of a prime field."""

    __slots__ = ("value", "field")

    def __init__(self, value: int, field: Field):
        self.value = int(value) % field.q
        self.field = field

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field.q != self.field.q:
                raise ModulusMismatch(f"F_{self.field.q} vs F_{other.field.q}")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.value + o, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.value - o, self.field)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(o - self.value, self.field)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.value * o, self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.field)

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field.inv(self.value), self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.value * self.field.inv(o), self.field)

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return FieldElement(pow(self.value, exponent, self.field.q), self.field)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field.q == other.field.q and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.q
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.field.q))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"FieldElement({self.value}, q={self.field.q})"

    def __str__(self):
        return str(self.value)


def field_arith(a: FieldElement, b: FieldElement | None, op: str) -> FieldElement:
    """Apply ``op`` in {add, sub, mul, inv, neg}; unary ops ignore ``b``."""
    if op == "inv":
        return a.inverse()
    if op == "neg":
        return -a
    if b is None:
        raise TypeError(f"{op} needs two operands")
    if a.field.q != b.field.q:
        raise ModulusMismatch(f"F_{a.field.q} vs F_{b.field.q}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


def _trim(coeffs: Iterable[int], q: int) -> tuple[int, ...]:
    out = [c % q for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class DensePoly:
    """Univariate polynomial; ``coeffs[i]`` multiplies ``X**i``.

    Trailing zeros are trimmed so the zero polynomial has no coefficients;
    its degree is reported as -1 (standing in for minus infinity).
    """

    coeffs: tuple[int, ...]
    field: Field

    def __init__(self, coeffs: Iterable[int], field: Field):
        object.__setattr__(self, "coeffs", _trim((int(c) for c in coeffs), field.q))
        object.__setattr__(self, "field", field)

    @classmethod
    def zero(cls, field: Field) -> "DensePoly":
        return cls((), field)

    @classmethod
    def constant(cls, value: int, field: Field) -> "DensePoly":
        return cls((value,), field)

    @classmethod
    def x(cls, field: Field) -> "DensePoly":
        return cls((0, 1), field)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def _check(self, other: "DensePoly"):
        if other.field.q != self.field.q:
            raise ModulusMismatch(f"F_{self.field.q} vs F_{other.field.q}")

    def __add__(self, other: "DensePoly") -> "DensePoly":
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return DensePoly((self.coeff(i) + other.coeff(i) for i in range(n)), self.field)

    def __sub__(self, other: "DensePoly") -> "DensePoly":
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return DensePoly((self.coeff(i) - other.coeff(i) for i in range(n)), self.field)

    def __neg__(self) -> "DensePoly":
        return DensePoly((-c for c in self.coeffs), self.field)

    def __mul__(self, other) -> "DensePoly":
        if isinstance(other, int):
            return DensePoly((c * other for c in self.coeffs), self.field)
        self._check(other)
        if self.is_zero() or other.is_zero():
            return DensePoly.zero(self.field)
        q = self.field.q
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return DensePoly((c % q for c in out), self.field)

    __rmul__ = __mul__

    def __call__(self, x) -> int:
        return poly_eval_int(self.coeffs, int(x), self.field.q)

    def evaluate(self, x) -> FieldElement:
        return FieldElement(self(x), self.field)

    def __repr__(self):
        return f"DensePoly({list(self.coeffs)}, q={self.field.q})"


def poly_eval_int(coeffs: Sequence[int], x: int, q: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % q
    return acc


def poly_eval(p: DensePoly, x: FieldElement | int) -> FieldElement:
    """Horner evaluation of ``p`` at ``x``."""
    if isinstance(x, FieldElement) and x.field.q != p.field.q:
        raise ModulusMismatch(f"F_{p.field.q} vs F_{x.field.q}")
    return p.evaluate(int(x))


def lagrange_interpolate(points, field: Field | None = None) -> DensePoly:
    """Unique polynomial of degree < len(points) through ``points``.

    ``points`` holds ``(x, y)`` pairs of FieldElements or ints; plain ints
    need ``field``.
    """
    pts = list(points)
    if field is None:
        if not pts:
            raise ValueError("field required for an empty point set")
        field = pts[0][0].field
    q = field.q
    xs, ys = [], []
    for x, y in pts:
        for v in (x, y):
            if isinstance(v, FieldElement) and v.field.q != q:
                raise ModulusMismatch(f"F_{q} vs F_{v.field.q}")
        xs.append(int(x) % q)
        ys.append(int(y) % q)
    if len(set(xs)) != len(xs):
        raise DuplicateNode("interpolation nodes must be pairwise distinct")
    n = len(xs)
    if n == 0:
        return DensePoly.zero(field)
    # master = prod (X - x_i), low-to-high coefficients
    master = [1]
    for xi in xs:
        nxt = [0] * (len(master) + 1)
        for j, c in enumerate(master):
            nxt[j] = (nxt[j] - xi * c) % q
            nxt[j + 1] = (nxt[j + 1] + c) % q
        master = nxt
    result = [0] * n
    for i, xi in enumerate(xs):
        if ys[i] == 0:
            continue
        # synthetic division master / (X - xi)
        quot = [0] * n
        carry = 0
        for j in range(n, 0, -1):
            carry = (master[j] + carry * xi) % q
            quot[j - 1] = carry
        denom = poly_eval_int(quot, xi, q)
        scale = ys[i] * pow(denom, -1, q) % q
        for j in range(n):
            result[j] += scale * quot[j]
    return DensePoly((c % q for c in result), field)


# ---------------------------------------------------------------------------
# Radix-2 NTT, used where the field has enough two-adicity
# ---------------------------------------------------------------------------


def _bit_reverse(values: list[int]) -> None:
    n = len(values)
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j |= bit
        if i < j:
            values[i], values[j] = values[j], values[i]


def ntt(coeffs: Sequence[int], field: Field, size: int) -> list[int]:
    """Evaluate a polynomial on the order-``size`` subgroup, ordered by powers of its generator."""
    q = field.q
    if len(coeffs) > size:
        raise ValueError("polynomial does not fit the transform size")
    values = [c % q for c in coeffs] + [0] * (size - len(coeffs))
    _bit_reverse(values)
    omega = field.root_of_unity(size)
    length = 2
    while length <= size:
        w_len = pow(omega, size // length, q)
        half = length // 2
        twiddles = [1] * half
        for i in range(1, half):
            twiddles[i] = twiddles[i - 1] * w_len % q
        for start in range(0, size, length):
            for i in range(half):
                u = values[start + i]
                v = values[start + i + half] * twiddles[i] % q
                values[start + i] = (u + v) % q
                values[start + i + half] = (u - v) % q
        length <<= 1
    return values


def intt(values: Sequence[int], field: Field) -> list[int]:
    """Inverse of :func:`ntt`; returns coefficients low-to-high."""
    size = len(values)
    q = field.q
    # evaluating at omega^{-1} is the same as reversing indices 1..size-1
    forward = ntt(list(values), field, size)
    inv_n = pow(size, -1, q)
    out = [forward[0] * inv_n % q]
    out += [forward[size - i] * inv_n % q for i in range(1, size)]
    return out


def mle_eval(table: Sequence[int], point: Sequence[int], q: int) -> int:
    """Multilinear extension of ``table`` (length 2**len(point)) at ``point``.

    Variable j corresponds to bit j of the table index (least significant first).
    """
    cur = [v % q for v in table]
    for r in point:
        cur = [(cur[2 * i] + r * (cur[2 * i + 1] - cur[2 * i])) % q for i in range(len(cur) // 2)]
    return cur[0] if cur else 0


# ---------------------------------------------------------------------------
# Linear algebra
# ---------------------------------------------------------------------------


@dataclass
class LinearSolution:
    """Outcome of :func:`solve_linear`.

    ``status`` is ``"unique"``, ``"underdetermined"`` or ``"inconsistent"``.
    For the first two, ``solution`` is a particular solution with free
    variables set to zero and ``basis`` spans the null space.
    """

    status: str
    solution: list[int] | None
    rank: int
    free_columns: list[int]
    basis: list[list[int]]

    @property
    def consistent(self) -> bool:
        return self.status != "inconsistent"


def _to_int_matrix(matrix, q: int) -> list[list[int]]:
    rows = []
    for row in matrix:
        out = []
        for v in row:
            if isinstance(v, FieldElement) and v.field.q != q:
                raise ModulusMismatch(f"F_{q} vs F_{v.field.q}")
            out.append(int(v) % q)
        rows.append(out)
    return rows


def _rref(aug: list[list[int]], ncols: int, q: int) -> list[int]:
    """Row-reduce ``aug`` in place over its first ``ncols`` columns; return pivot columns."""
    pivots = []
    r = 0
    nrows = len(aug)
    for col in range(ncols):
        pivot = next((i for i in range(r, nrows) if aug[i][col]), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = pow(aug[r][col], -1, q)
        aug[r] = [v * inv % q for v in aug[r]]
        prow = aug[r]
        for i in range(nrows):
            if i != r and aug[i][col]:
                f = aug[i][col]
                row = aug[i]
                aug[i] = [(a - f * b) % q for a, b in zip(row, prow)]
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    return pivots


def solve_linear(matrix, rhs, field: Field) -> LinearSolution:
    """Gaussian elimination over F_q (pivot = first nonzero entry)."""
    q = field.q
    a = _to_int_matrix(matrix, q)
    b = [int(v) % q for v in rhs]
    m = len(a)
    if len(b) != m:
        raise ValueError("rhs length does not match matrix rows")
    n = len(a[0]) if a else 0
    aug = [row + [bv] for row, bv in zip(a, b)]
    pivots = _rref(aug, n, q)
    rank = len(pivots)
    for i in range(rank, m):
        if aug[i][n]:
            return LinearSolution("inconsistent", None, rank, [], [])
    x = [0] * n
    for i, col in enumerate(pivots):
        x[col] = aug[i][n]
    pivot_set = set(pivots)
    free = [c for c in range(n) if c not in pivot_set]
    basis = []
    for fcol in free:
        vec = [0] * n
        vec[fcol] = 1
        for i, col in enumerate(pivots):
            vec[col] = -aug[i][fcol] % q
        basis.append(vec)
    status = "unique" if not free else "underdetermined"
    return LinearSolution(status, x, rank, free, basis)


def invert_matrix(matrix, field: Field) -> list[list[int]]:
    """Gauss-Jordan inverse of a square matrix; raises SingularMatrix."""
    q = field.q
    a = _to_int_matrix(matrix, q)
    n = len(a)
    aug = [row + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(a)]
    pivots = _rref(aug, n, q)
    if len(pivots) != n:
        raise SingularMatrix("matrix is not invertible")
    return [row[n:] for row in aug]


def mat_vec(matrix: Sequence[Sequence[int]], vec: Sequence[int], q: int) -> list[int]:
    return [sum(a * b for a, b in zip(row, vec)) % q for row in matrix]


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], q: int) -> list[list[int]]:
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) % q for col in cols] for row in a]
