"""Binary SHA-256 Merkle tree with authentication paths."""

from __future__ import annotations

import hashlib
from typing import Sequence


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


class MerkleTree:
    """Tree over a power-of-two number of leaf digests."""

    def __init__(self, leaves: Sequence[bytes]):
        size = len(leaves)
        if size == 0 or size & (size - 1):
            raise ValueError("leaf count must be a nonzero power of two")
        self.layers = [list(leaves)]
        while len(self.layers[-1]) > 1:
            prev = self.layers[-1]
            self.layers.append([sha256(prev[i] + prev[i + 1]) for i in range(0, len(prev), 2)])

    @property
    def root(self) -> bytes:
        return self.layers[-1][0]

    @property
    def size(self) -> int:
        return len(self.layers[0])

    def path(self, index: int) -> list[bytes]:
        out = []
        for layer in self.layers[:-1]:
            out.append(layer[index ^ 1])
            index >>= 1
        return out


def root_from_path(leaf: bytes, index: int, path: Sequence[bytes]) -> bytes:
    node = leaf
    for sibling in path:
        node = sha256(sibling + node) if index & 1 else sha256(node + sibling)
        index >>= 1
    return node
