"""Fiat-Shamir transcript over SHA-256."""

from __future__ import annotations

import hashlib
import struct
from typing import Iterable


def encode_ints(values: Iterable[int]) -> bytes:
    """Length-prefixed big-endian encoding of a list of nonnegative ints."""
    out = bytearray()
    vals = list(values)
    out += struct.pack("<I", len(vals))
    for v in vals:
        raw = v.to_bytes(max(1, (v.bit_length() + 7) // 8), "big")
        out += struct.pack("<I", len(raw)) + raw
    return bytes(out)


class Transcript:
    """Running hash state; every absorb and squeeze updates it."""

    def __init__(self, domain: bytes = b"zkcraft/violation-iop/v1"):
        self.state = hashlib.sha256(domain).digest()

    def absorb(self, label: str, data: bytes) -> None:
        lab = label.encode()
        h = hashlib.sha256()
        h.update(self.state)
        h.update(struct.pack("<I", len(lab)) + lab)
        h.update(struct.pack("<Q", len(data)) + data)
        self.state = h.digest()

    def absorb_ints(self, label: str, values: Iterable[int]) -> None:
        self.absorb(label, encode_ints(values))

    def _squeeze_bytes(self, label: str) -> bytes:
        self.absorb("squeeze:" + label, b"")
        return self.state

    def challenge_below(self, label: str, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection on the top range of the digest."""
        if bound < 1:
            raise ValueError("bound must be positive")
        nbytes = max(32, (bound.bit_length() + 7) // 8 + 16)
        space = 256 ** nbytes
        limit = space - space % bound
        ctr = 0
        while True:
            raw = b""
            while len(raw) < nbytes:
                raw += self._squeeze_bytes(f"{label}#{ctr}")
                ctr += 1
            v = int.from_bytes(raw[:nbytes], "big")
            if v < limit:
                return v % bound

    def challenge_field(self, label: str, q: int) -> int:
        return self.challenge_below(label, q)

    def digest(self) -> bytes:
        return self.state
