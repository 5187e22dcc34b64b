"""Backend envelope selection.

The two profiles record the degree and domain limits of the commitment
backends the search is sized against.  The artifact always commits with
the Merkle scheme; a profile only decides whether a proof is produced
(zk_native) or the run falls back to direct checking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

FALLBACK_REASONS = ("deg_exceeded", "domain_exceeded", "crypto_unavailable", "none")


@dataclass(frozen=True)
class BackendProfile:
    backend_id: str
    d_max: int
    domain_max: int
    fold_rounds: int
    opening_size_note: str


BASEFOLD = BackendProfile(
    "basefold_profile", 1 << 18, 1 << 22, 10,
    "218 B constant opening in the reference backend; merkle_eval_v1 openings grow with log2(domain)",
)
HYPERPLONK = BackendProfile(
    "hyperplonk_plus_profile", 1 << 20, 1 << 24, 16,
    "96 B constant opening in the reference backend; not reproduced by merkle_eval_v1",
)
PROFILES = (BASEFOLD, HYPERPLONK)
PROFILE_BY_NAME = {"basefold": BASEFOLD, "hyperplonk": HYPERPLONK}


@dataclass(frozen=True)
class BackendDecision:
    mode: str  # zk_native | fallback
    profile: BackendProfile | None
    fallback_reason: str
    d: int
    domain: int

    @property
    def zk_native(self) -> bool:
        return self.mode == "zk_native"

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "backend_id": self.profile.backend_id if self.profile else None,
            "fallback_reason": self.fallback_reason,
            "deg_phi": self.d,
            "domain": self.domain,
            "d_max": self.profile.d_max if self.profile else None,
            "domain_max": self.profile.domain_max if self.profile else None,
            "fold_rounds": self.profile.fold_rounds if self.profile else None,
            "opening_size_note": self.profile.opening_size_note if self.profile else None,
        }


def crypto_self_test() -> bool:
    """Commit to a 4-leaf tree, open every leaf and verify the paths."""
    from ..merkle import MerkleTree, root_from_path, sha256

    try:
        leaves = [sha256(bytes([i])) for i in range(4)]
        tree = MerkleTree(leaves)
        ok = all(root_from_path(leaves[i], i, tree.path(i)) == tree.root for i in range(4))
        forged = root_from_path(sha256(b"x"), 0, tree.path(0)) == tree.root
        return ok and not forged
    except Exception:
        return False


def select_backend(
    d: int,
    domain: int,
    profiles: Sequence[BackendProfile] = PROFILES,
    crypto_check: Callable[[], bool] = crypto_self_test,
) -> BackendDecision:
    """First profile (in preference order) whose limits admit (d, domain)."""
    if not crypto_check():
        return BackendDecision("fallback", None, "crypto_unavailable", d, domain)
    for prof in profiles:
        if d <= prof.d_max and domain <= prof.domain_max:
            return BackendDecision("zk_native", prof, "none", d, domain)
    if all(d > prof.d_max for prof in profiles):
        reason = "deg_exceeded"
    else:
        reason = "domain_exceeded"
    return BackendDecision("fallback", None, reason, d, domain)
