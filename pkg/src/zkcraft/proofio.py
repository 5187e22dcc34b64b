"""Binary and JSON encodings of :class:`ViolationProof`.

Binary layout: magic ``ZKCP``, u16 version, then length-prefixed fields in
a fixed order (see :func:`proof_to_bytes`).  Integers are big-endian with a
u32 byte-length prefix; lists carry a u32 count.
"""

from __future__ import annotations

import json
import struct

from .errors import ProofFormatError
from .proof import RepetitionProof, ViolationProof, WitnessPoly
from .vortex import Commitment, NodePlan, OpeningProof

PROOF_MAGIC = b"ZKCP"
PROOF_VERSION = 1


class _Writer:
    def __init__(self):
        self.buf = bytearray()

    def u8(self, v):
        self.buf += struct.pack("<B", v)

    def u32(self, v):
        self.buf += struct.pack("<I", v)

    def u64(self, v):
        self.buf += struct.pack("<Q", v)

    def raw(self, data: bytes):
        self.u32(len(data))
        self.buf += data

    def text(self, s: str):
        self.raw(s.encode())

    def int(self, v: int):
        self.raw(v.to_bytes(max(1, (v.bit_length() + 7) // 8), "big") if v else b"")

    def ints(self, values):
        values = list(values)
        self.u32(len(values))
        for v in values:
            self.int(v)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.data):
            raise ProofFormatError(f"proof truncated at offset {self.pos}")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def u8(self):
        return struct.unpack("<B", self.take(1))[0]

    def u32(self):
        return struct.unpack("<I", self.take(4))[0]

    def u64(self):
        return struct.unpack("<Q", self.take(8))[0]

    def raw(self) -> bytes:
        return self.take(self.u32())

    def text(self) -> str:
        try:
            return self.raw().decode()
        except UnicodeDecodeError:
            raise ProofFormatError("invalid text field") from None

    def int(self) -> int:
        return int.from_bytes(self.raw(), "big")

    def ints(self) -> tuple[int, ...]:
        count = self.u32()
        if count > len(self.data):
            raise ProofFormatError("list length exceeds proof size")
        return tuple(self.int() for _ in range(count))


def _plan_text(plan: NodePlan) -> str:
    return json.dumps(plan.to_dict(), sort_keys=True, separators=(",", ":"))


def proof_to_bytes(p: ViolationProof) -> bytes:
    w = _Writer()
    w.buf += PROOF_MAGIC + struct.pack("<H", PROOF_VERSION)
    w.text(p.scheme_id)
    w.int(p.q)
    for v in (p.t, p.ell, p.m_out, p.d):
        w.u32(v)
    w.raw(p.salt)
    w.ints(p.pool_rows)
    w.text(_plan_text(p.plan))
    w.ints(p.output_points)
    w.ints(p.x_prime)
    w.ints(p.y_orig)
    w.raw(p.commitment.root)
    w.u64(p.commitment.domain_size)
    w.text(p.mode)
    w.ints(p.p_coeffs)
    w.ints(p.s_coeffs)
    w.u32(len(p.repetitions))
    for rep in p.repetitions:
        w.u32(len(rep.rounds))
        for g in rep.rounds:
            w.ints(g)
        w.u64(rep.opening.point)
        w.ints(rep.opening.claimed_value)
        w.u32(len(rep.opening.auth_path))
        for node in rep.opening.auth_path:
            w.raw(node)
        w.int(rep.phi_claim)
        w.int(rep.delta_claim)
    w.u32(p.nonce)
    if p.witness_poly is None:
        w.u8(0)
    else:
        w.u8(1)
        w.text(p.witness_poly.kind)
        w.u64(p.witness_poly.size)
        w.ints(p.witness_poly.coeffs)
    w.raw(p.digest)
    return bytes(w.buf)


def proof_from_bytes(data: bytes) -> ViolationProof:
    r = _Reader(bytes(data))
    if r.take(4) != PROOF_MAGIC:
        raise ProofFormatError("not a proof file (bad magic)")
    (version,) = struct.unpack("<H", r.take(2))
    if version != PROOF_VERSION:
        raise ProofFormatError(f"unsupported proof version {version}")
    scheme_id = r.text()
    q = r.int()
    t, ell, m_out, d = r.u32(), r.u32(), r.u32(), r.u32()
    salt = r.raw()
    pool_rows = r.ints()
    try:
        plan = NodePlan.from_dict(json.loads(r.text()))
    except (ValueError, KeyError, TypeError) as exc:
        raise ProofFormatError(f"invalid node plan: {exc}") from None
    output_points = r.ints()
    x_prime = r.ints()
    y_orig = r.ints()
    root = r.raw()
    domain = r.u64()
    mode = r.text()
    p_coeffs = r.ints()
    s_coeffs = r.ints()
    reps = []
    for _ in range(r.u32()):
        rounds = tuple(r.ints() for _ in range(r.u32()))
        point = r.u64()
        claimed = r.ints()
        path = tuple(r.raw() for _ in range(r.u32()))
        phi, delta = r.int(), r.int()
        reps.append(RepetitionProof(rounds, OpeningProof(point, claimed, path), phi, delta))
    nonce = r.u32()
    flag = r.u8()
    if flag not in (0, 1):
        raise ProofFormatError("invalid witness flag")
    wp = WitnessPoly(r.text(), r.u64(), r.ints()) if flag else None
    digest = r.raw()
    if r.pos != len(r.data):
        raise ProofFormatError("trailing bytes after proof")
    return ViolationProof(
        scheme_id, q, t, ell, m_out, d, salt, pool_rows, plan, output_points, x_prime, y_orig,
        Commitment(root, domain, scheme_id), mode, p_coeffs, s_coeffs, tuple(reps), nonce, wp, digest,
    )


def _strs(values):
    return [str(v) for v in values]


def proof_to_dict(p: ViolationProof) -> dict:
    """Debug view mirroring the binary layout field by field."""
    return {
        "scheme_id": p.scheme_id,
        "q": str(p.q),
        "t": p.t,
        "ell": p.ell,
        "m_out": p.m_out,
        "d": p.d,
        "salt": p.salt.hex(),
        "pool_rows": list(p.pool_rows),
        "plan": p.plan.to_dict(),
        "output_points": _strs(p.output_points),
        "x_prime": _strs(p.x_prime),
        "y_orig": _strs(p.y_orig),
        "commitment": {"root": p.commitment.root.hex(), "domain_size": p.commitment.domain_size},
        "mode": p.mode,
        "p_coeffs": _strs(p.p_coeffs),
        "s_coeffs": _strs(p.s_coeffs),
        "repetitions": [
            {
                "rounds": [_strs(g) for g in rep.rounds],
                "opening": {
                    "point": rep.opening.point,
                    "claimed_value": _strs(rep.opening.claimed_value),
                    "auth_path": [n.hex() for n in rep.opening.auth_path],
                },
                "phi_claim": str(rep.phi_claim),
                "delta_claim": str(rep.delta_claim),
            }
            for rep in p.repetitions
        ],
        "nonce": p.nonce,
        "witness_poly": None
        if p.witness_poly is None
        else {
            "kind": p.witness_poly.kind,
            "size": p.witness_poly.size,
            "coeffs": _strs(p.witness_poly.coeffs),
        },
        "digest": p.digest.hex(),
    }


def proof_from_dict(doc: dict) -> ViolationProof:
    def ints(xs):
        return tuple(int(x) for x in xs)

    try:
        reps = tuple(
            RepetitionProof(
                tuple(ints(g) for g in rep["rounds"]),
                OpeningProof(
                    int(rep["opening"]["point"]),
                    ints(rep["opening"]["claimed_value"]),
                    tuple(bytes.fromhex(h) for h in rep["opening"]["auth_path"]),
                ),
                int(rep["phi_claim"]),
                int(rep["delta_claim"]),
            )
            for rep in doc["repetitions"]
        )
        wp = doc["witness_poly"]
        return ViolationProof(
            doc["scheme_id"],
            int(doc["q"]),
            int(doc["t"]),
            int(doc["ell"]),
            int(doc["m_out"]),
            int(doc["d"]),
            bytes.fromhex(doc["salt"]),
            tuple(int(r) for r in doc["pool_rows"]),
            NodePlan.from_dict(doc["plan"]),
            ints(doc["output_points"]),
            ints(doc["x_prime"]),
            ints(doc["y_orig"]),
            Commitment(bytes.fromhex(doc["commitment"]["root"]), int(doc["commitment"]["domain_size"]), doc["scheme_id"]),
            doc["mode"],
            ints(doc["p_coeffs"]),
            ints(doc["s_coeffs"]),
            reps,
            int(doc["nonce"]),
            None if wp is None else WitnessPoly(wp["kind"], int(wp["size"]), ints(wp["coeffs"])),
            bytes.fromhex(doc["digest"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ProofFormatError(f"invalid proof JSON: {exc}") from None


def proof_to_json(p: ViolationProof) -> str:
    return json.dumps(proof_to_dict(p), indent=1, sort_keys=True) + "\n"
