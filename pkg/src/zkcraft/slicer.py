"""Row diagnostics, fingerprints, scores and candidate-pool selection."""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass, field
from fractions import Fraction

from .circuit.model import PUBLIC_CLASSES, WITNESS_CLASSES, R1CSInstance
from .errors import EmptyInstance, IndexOutOfRange

CONVENTIONS = ("methodology", "toy")
_TAGS = (b"\xa1", b"\xb1", b"\xc1")


@dataclass(frozen=True)
class SlicerConfig:
    score_lambda: Fraction = Fraction(1)
    score_mu: Fraction = Fraction(1, 2)
    pool_size: int = 32
    score_convention: str = "methodology"

    def __post_init__(self):
        object.__setattr__(self, "score_lambda", Fraction(self.score_lambda))
        object.__setattr__(self, "score_mu", Fraction(self.score_mu))
        if self.score_lambda <= 0 or self.score_mu <= 0:
            raise ValueError("score weights must be positive")
        if self.pool_size < 1:
            raise ValueError("pool_size must be at least 1")
        if self.score_convention not in CONVENTIONS:
            raise ValueError(f"score_convention must be one of {CONVENTIONS}")


@dataclass(frozen=True)
class RowDiagnostics:
    row_index: int
    kappa_w: int
    kappa_c: int
    fingerprint: int
    score: Fraction | None  # None: no score under the toy convention (kappa_c = 0)


@dataclass(frozen=True)
class CandidatePool:
    rows: tuple[int, ...]
    diagnostics: tuple[RowDiagnostics, ...] = field(repr=False)

    def __len__(self):
        return len(self.rows)


def row_diagnostics(inst: R1CSInstance, i: int) -> tuple[int, int]:
    """(kappa_w, kappa_c): support sizes inside W and K."""
    if not 0 <= i < inst.m:
        raise IndexOutOfRange(f"row {i} outside 0..{inst.m - 1}")
    classes = inst.var_classes
    supp = inst.constraints[i].support()
    kw = sum(1 for j in supp if classes[j] in WITNESS_CLASSES)
    kc = sum(1 for j in supp if classes[j] in PUBLIC_CLASSES)
    return kw, kc


def canonical_row_bytes(inst: R1CSInstance, i: int) -> bytes:
    out = bytearray()
    con = inst.constraints[i]
    for tag, vec in zip(_TAGS, (con.a, con.b, con.c)):
        out += tag
        for idx, coeff in sorted(vec):
            raw = coeff.to_bytes(max(1, (coeff.bit_length() + 7) // 8), "big")
            out += struct.pack("<Q", idx) + struct.pack("<I", len(raw)) + raw
    return bytes(out)


def row_fingerprint(inst: R1CSInstance, i: int, kappa_w: int, kappa_c: int) -> int:
    if not 0 <= i < inst.m:
        raise IndexOutOfRange(f"row {i} outside 0..{inst.m - 1}")
    payload = canonical_row_bytes(inst, i) + struct.pack("<QQ", kappa_w, kappa_c)
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


def row_score(kappa_w: int, kappa_c: int, cfg: SlicerConfig) -> Fraction | None:
    lam, mu = cfg.score_lambda, cfg.score_mu
    if cfg.score_convention == "methodology":
        return lam * Fraction(kappa_c, kappa_w + 1) - mu * kappa_w
    if kappa_c == 0:
        return None
    return lam * Fraction(kappa_w + 1, kappa_c) - mu * kappa_w


def _priority(diag: RowDiagnostics, convention: str):
    if convention == "methodology":
        return (0, diag.score, diag.row_index)
    if diag.score is None:
        return (1, 0, diag.row_index)
    return (0, -diag.score, diag.row_index)


def all_diagnostics(inst: R1CSInstance, cfg: SlicerConfig) -> list[RowDiagnostics]:
    out = []
    for i in range(inst.m):
        kw, kc = row_diagnostics(inst, i)
        out.append(RowDiagnostics(i, kw, kc, row_fingerprint(inst, i, kw, kc), row_score(kw, kc, cfg)))
    return out


def select_pool(inst: R1CSInstance, cfg: SlicerConfig) -> CandidatePool:
    if inst.m == 0:
        raise EmptyInstance("cannot select a pool from an instance with no constraints")
    diags = all_diagnostics(inst, cfg)
    ranked = sorted(diags, key=lambda d: _priority(d, cfg.score_convention))
    k = min(cfg.pool_size, inst.m)
    return CandidatePool(tuple(d.row_index for d in ranked[:k]), tuple(diags))


def completeness_epsilon(k: int, gamma: float | None, gamma_star: float | None) -> float | None:
    """exp(-2k(gamma - gamma*)^2) when both thresholds are supplied, else None."""
    if gamma is None or gamma_star is None:
        return None
    return math.exp(-2 * k * (gamma - gamma_star) ** 2)


def diagnostics_report(pool: CandidatePool) -> list[dict]:
    return [
        {
            "row": d.row_index,
            "kappa_w": d.kappa_w,
            "kappa_c": d.kappa_c,
            "fingerprint": f"{d.fingerprint:016x}",
            "score": None if d.score is None else str(d.score),
            "selected": d.row_index in pool.rows,
        }
        for d in pool.diagnostics
    ]
