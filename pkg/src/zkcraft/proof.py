"""Proof objects for the violation IOP and the witness-polynomial encoding."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DegreeOverflow, ExtractionError
from .ff import Field, intt, lagrange_interpolate, ntt, poly_eval_int
from .vortex import Commitment, NodePlan, OpeningProof

MODE_COEFFICIENTS = "coefficients"
MODE_SLICES = "slices"


@dataclass(frozen=True)
class RepetitionProof:
    """One independent sum-check run and its opening."""

    rounds: tuple[tuple[int, ...], ...]
    opening: OpeningProof
    phi_claim: int
    delta_claim: int


@dataclass(frozen=True)
class WitnessPoly:
    """W'(X) with W'(domain[i]) = w'_i.

    ``kind`` is ``subgroup`` (powers of a root of unity of order ``size``,
    entries past n are zero) or ``range`` (the points 0..n-1, size = n).
    """

    kind: str
    size: int
    coeffs: tuple[int, ...]


@dataclass(frozen=True)
class ViolationProof:
    scheme_id: str
    q: int
    t: int
    ell: int
    m_out: int
    d: int
    salt: bytes
    pool_rows: tuple[int, ...]
    plan: NodePlan
    output_points: tuple[int, ...]
    x_prime: tuple[int, ...]
    y_orig: tuple[int, ...]
    commitment: Commitment
    mode: str
    p_coeffs: tuple[int, ...]
    s_coeffs: tuple[int, ...]
    repetitions: tuple[RepetitionProof, ...]
    nonce: int
    witness_poly: WitnessPoly | None
    digest: bytes


def witness_domain(field: Field, n: int) -> tuple[str, int]:
    size = 1
    while size < n:
        size <<= 1
    if field.two_adicity() >= size.bit_length() - 1:
        return "subgroup", size
    return "range", n


def encode_witness_poly(values: Sequence[int], field: Field) -> WitnessPoly:
    n = len(values)
    kind, size = witness_domain(field, n)
    if kind == "subgroup":
        coeffs = intt(list(values) + [0] * (size - n), field)
    else:
        if n > field.q:
            raise DegreeOverflow(f"n={n} exceeds the field size, no interpolation domain")
        coeffs = lagrange_interpolate(list(zip(range(n), values)), field).coeffs
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    return WitnessPoly(kind, size, tuple(coeffs))


def decode_witness_poly(wp: WitnessPoly, n: int, field: Field) -> list[int]:
    """Evaluate W' back on its domain; DegreeOverflow if it is too large to be canonical."""
    expected_kind, expected_size = witness_domain(field, n)
    if (wp.kind, wp.size) != (expected_kind, expected_size):
        raise DegreeOverflow(f"witness domain {wp.kind}/{wp.size} does not fit n={n}")
    if len(wp.coeffs) > wp.size:
        raise DegreeOverflow(f"deg W' = {len(wp.coeffs) - 1} >= domain size {wp.size}")
    if wp.kind == "subgroup":
        evals = ntt(list(wp.coeffs), field, wp.size)
        if any(evals[n:]):
            raise ExtractionError("W' is nonzero on the padding points of its domain")
        return evals[:n]
    return [poly_eval_int(wp.coeffs, i, field.q) for i in range(n)]
