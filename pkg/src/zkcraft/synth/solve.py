"""Per-site constant solving over F_q."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from ..circuit.model import R1CSInstance
from ..errors import DegreeTooHigh
from ..ff import Field, poly_eval_int

SCAN_LIMIT = 1 << 16
MAX_DEGREE = 4


class _AllField:
    """Sentinel: every field element is a root (the equation is identically zero)."""

    def __repr__(self):
        return "ALL_FIELD"


ALL_FIELD = _AllField()


@dataclass(frozen=True)
class SiteEquation:
    """sum_j coeffs[j] * c^j = 0 for the constant c at ``site_id``.

    The affine case alpha*c + beta = 0 is ``coeffs = (beta, alpha)``.
    """

    site_id: str
    coeffs: tuple[int, ...]

    @classmethod
    def affine(cls, site_id: str, alpha: int, beta: int) -> "SiteEquation":
        return cls(site_id, (beta, alpha))

    @property
    def alpha(self) -> int:
        return self.coeffs[1] if len(self.coeffs) > 1 else 0

    @property
    def beta(self) -> int:
        return self.coeffs[0] if self.coeffs else 0

    def degree(self, q: int) -> int:
        trimmed = [c % q for c in self.coeffs]
        while trimmed and trimmed[-1] == 0:
            trimmed.pop()
        return len(trimmed) - 1


def _roots_by_factoring(coeffs: Sequence[int], q: int) -> list[int]:
    from sympy.polys.domains import ZZ
    from sympy.polys.galoistools import gf_factor

    high_first = [c % q for c in reversed(coeffs)]
    _, factors = gf_factor(high_first, q, ZZ)
    roots = []
    for fac, _mult in factors:
        if len(fac) == 2:  # monic linear factor X + b
            roots.append(-int(fac[1]) % q)
    return sorted(set(roots))


def solve_site_constant(eq: SiteEquation, field: Field):
    """Roots of the site equation, ascending; ALL_FIELD if it vanishes identically."""
    q = field.q
    coeffs = [c % q for c in eq.coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    deg = len(coeffs) - 1
    if deg < 0:
        return ALL_FIELD
    if deg == 0:
        return []
    if deg == 1:
        beta, alpha = coeffs
        return [-beta * pow(alpha, -1, q) % q]
    if deg > MAX_DEGREE:
        raise DegreeTooHigh(f"site {eq.site_id}: degree {deg} exceeds {MAX_DEGREE}")
    if q <= SCAN_LIMIT:
        return [x for x in range(q) if poly_eval_int(coeffs, x, q) == 0]
    return _roots_by_factoring(coeffs, q)


def _linear_in(vec, target: int, values: Mapping[int, int], q: int) -> tuple[int, int]:
    const, slope = 0, 0
    for idx, c in vec:
        if idx == target:
            slope += c
        else:
            const += c * values[idx]
    return const % q, slope % q


def site_equations(
    inst: R1CSInstance, site_id: str, target: int, pinned: Sequence[int], skip_rows=()
) -> list[SiteEquation]:
    """One equation in the target value per row touching it, all other variables pinned.

    Each row contributes (a0 + a1 u)(b0 + b1 u) - (c0 + c1 u) as a polynomial in u.
    """
    q = inst.q
    out = []
    for r in inst.rows_touching.get(target, ()):
        if r in skip_rows:
            continue
        con = inst.constraints[r]
        a0, a1 = _linear_in(con.a, target, pinned, q)
        b0, b1 = _linear_in(con.b, target, pinned, q)
        c0, c1 = _linear_in(con.c, target, pinned, q)
        coeffs = ((a0 * b0 - c0) % q, (a0 * b1 + a1 * b0 - c1) % q, a1 * b1 % q)
        out.append(SiteEquation(site_id, coeffs))
    return out
