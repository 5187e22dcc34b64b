"""Sum-check over the boolean hypercube for the summand Phi~(u) * Delta_out(iota(u)).

Row i of the constraint system sits at the hypercube point whose bits are
the binary digits of i, least significant bit first, and
iota(u) = sum_j u_j 2^(j-1) maps a point back to its row index.  Phi~ is the
multilinear extension of the per-row residual table; Delta_out is a
univariate polynomial composed with iota, so each round polynomial has
degree at most deg(Delta_out) + 1.
"""

from __future__ import annotations

from typing import Sequence

from ..ff import Field, lagrange_interpolate, mle_eval, poly_eval_int


def domain_log(m: int) -> int:
    """t with 2^t >= m, and at least one variable."""
    return max(1, (max(m, 1) - 1).bit_length())


def iota(point: Sequence[int], q: int) -> int:
    return sum(z * (1 << j) for j, z in enumerate(point)) % q


class SumcheckProver:
    """Produces round polynomials g_1..g_t, folding one variable per round."""

    def __init__(self, phi_table: Sequence[int], delta_coeffs: Sequence[int], field: Field):
        size = len(phi_table)
        if size < 2 or size & (size - 1):
            raise ValueError("table length must be a power of two >= 2")
        self.field = field
        self.q = field.q
        self.table = [v % self.q for v in phi_table]
        self.delta = list(delta_coeffs)
        self.t = size.bit_length() - 1
        self.round = 0
        self.prefix = 0  # sum of bound challenges weighted by 2^(j-1)
        self.num_points = max(len(self.delta), 1) + 1

    def claimed_sum(self) -> int:
        q = self.q
        return sum(v * poly_eval_int(self.delta, i, q) for i, v in enumerate(self.table) if v) % q

    def round_poly(self) -> tuple[int, ...]:
        """Coefficients of g_k for the current round (trimmed)."""
        q = self.q
        tab = self.table
        scale = 1 << self.round
        stride = scale << 1
        npts = self.num_points
        sums = [0] * npts
        for i in range(len(tab) // 2):
            a0, a1 = tab[2 * i], tab[2 * i + 1]
            if not (a0 or a1):
                continue
            base = self.prefix + stride * i
            slope = a1 - a0
            for x in range(npts):
                phi = a0 + x * slope
                if phi % q:
                    sums[x] += phi * poly_eval_int(self.delta, base + x * scale, q)
        if not any(v % q for v in sums):
            return ()
        poly = lagrange_interpolate(list(zip(range(npts), sums)), self.field)
        return poly.coeffs

    def fold(self, zeta: int) -> None:
        q = self.q
        tab = self.table
        self.table = [(tab[2 * i] + zeta * (tab[2 * i + 1] - tab[2 * i])) % q for i in range(len(tab) // 2)]
        self.prefix = (self.prefix + zeta * (1 << self.round)) % q
        self.round += 1

    def final_value(self) -> int:
        """Phi~ at the bound point (valid once every variable is folded)."""
        return self.table[0]


def phi_at(phi_table: Sequence[int], point: Sequence[int], q: int) -> int:
    return mle_eval(phi_table, point, q)


def check_rounds(
    rounds: Sequence[Sequence[int]],
    challenges: Sequence[int],
    claimed_sum: int,
    degree_bound: int,
    q: int,
) -> tuple[bool, int]:
    """Round consistency; returns (ok, g_t(zeta_t))."""
    expected = claimed_sum % q
    for g, zeta in zip(rounds, challenges):
        if len(g) - 1 > degree_bound:
            return False, 0
        if any(not 0 <= c < q for c in g):
            return False, 0
        if (poly_eval_int(g, 0, q) + poly_eval_int(g, 1, q)) % q != expected:
            return False, 0
        expected = poly_eval_int(g, zeta, q)
    return True, expected
