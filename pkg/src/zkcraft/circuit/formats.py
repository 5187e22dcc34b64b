"""Circuit and witness serialization: the JSON schema and circom's binary .r1cs."""

from __future__ import annotations

import json
import struct
from typing import Any

from ..errors import (
    InvariantError,
    MagicMismatch,
    NotPrime,
    SchemaError,
    TruncatedSection,
    UnsupportedVersion,
)
from ..ff import Field
from .model import Constraint, R1CSInstance, WeakSite, Witness, sparse

_REQUIRED = {"modulus", "num_vars", "var_classes", "constraints"}
_OPTIONAL = {"weak_sites", "public_outputs", "signal_names"}


def _dec(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise SchemaError(f"{what} must be a decimal string")
    if isinstance(value, str):
        text = value.strip()
        if not text.lstrip("-").isdigit():
            raise SchemaError(f"{what} is not a decimal integer: {value!r}")
        return int(text)
    return value


def _int(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"{what} must be an integer")
    return value


def _load(data: bytes | str) -> Any:
    try:
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        return json.loads(data)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None


def _parse_sites(raw: Any) -> tuple[WeakSite, ...]:
    if not isinstance(raw, list):
        raise SchemaError("weak_sites must be a list")
    sites = []
    for entry in raw:
        if not isinstance(entry, dict):
            raise SchemaError("weak site must be an object")
        unknown = set(entry) - {"site_id", "rows", "target"}
        if unknown:
            raise SchemaError(f"unknown weak-site fields {sorted(unknown)}")
        if not isinstance(entry.get("site_id"), str):
            raise SchemaError("weak site needs a string site_id")
        rows = entry.get("rows")
        if not isinstance(rows, list):
            raise SchemaError("weak site needs a rows list")
        target = entry.get("target")
        sites.append(
            WeakSite(
                entry["site_id"],
                tuple(_int(r, "weak-site row") for r in rows),
                None if target is None else _int(target, "weak-site target"),
            )
        )
    return tuple(sites)


def _parse_names(raw: Any) -> tuple[str, ...]:
    if not isinstance(raw, list) or not all(isinstance(s, str) for s in raw):
        raise SchemaError("signal_names must be a list of strings")
    return tuple(raw)


def parse_circuit_json(data: bytes | str) -> R1CSInstance:
    doc = _load(data)
    if not isinstance(doc, dict):
        raise SchemaError("circuit JSON must be an object")
    missing = _REQUIRED - set(doc)
    if missing:
        raise SchemaError(f"missing fields {sorted(missing)}")
    unknown = set(doc) - _REQUIRED - _OPTIONAL
    if unknown:
        raise SchemaError(f"unknown fields {sorted(unknown)}")

    try:
        field = Field(_dec(doc["modulus"], "modulus"))
    except NotPrime as exc:
        raise InvariantError(str(exc)) from None
    q = field.q
    n = _int(doc["num_vars"], "num_vars")
    classes = doc["var_classes"]
    if not isinstance(classes, list) or not all(isinstance(c, str) for c in classes):
        raise SchemaError("var_classes must be a list of strings")

    raw_constraints = doc["constraints"]
    if not isinstance(raw_constraints, list):
        raise SchemaError("constraints must be a list")
    constraints = []
    for r, entry in enumerate(raw_constraints):
        if not isinstance(entry, dict) or set(entry) != {"a", "b", "c"}:
            raise SchemaError(f"constraint {r} must have exactly the keys a, b, c")
        vecs = []
        for key in "abc":
            vec = entry[key]
            if not isinstance(vec, dict):
                raise SchemaError(f"constraint {r}.{key} must be an object")
            items = []
            for idx_text, coeff in vec.items():
                if not idx_text.isdigit():
                    raise SchemaError(f"constraint {r}.{key} has non-numeric index {idx_text!r}")
                idx = int(idx_text)
                if idx >= n:
                    raise SchemaError(f"constraint {r}.{key} index {idx} >= num_vars {n}")
                items.append((idx, _dec(coeff, "coefficient")))
            vecs.append(sparse(items, q))
        constraints.append(Constraint(*vecs))

    sites = _parse_sites(doc.get("weak_sites", []))
    names = _parse_names(doc["signal_names"]) if "signal_names" in doc else None
    inst = R1CSInstance(field, n, tuple(constraints), tuple(classes), sites, names)

    if "public_outputs" in doc:
        outs = doc["public_outputs"]
        if not isinstance(outs, list):
            raise SchemaError("public_outputs must be a list")
        listed = sorted(_int(i, "public output index") for i in outs)
        if listed != list(inst.public_outputs):
            raise InvariantError("public_outputs disagrees with var_classes")
    return inst


def _site_doc(site: WeakSite) -> dict:
    doc: dict[str, Any] = {"site_id": site.site_id, "rows": list(site.rows)}
    if site.target is not None:
        doc["target"] = site.target
    return doc


def circuit_to_dict(inst: R1CSInstance) -> dict:
    doc: dict[str, Any] = {
        "modulus": str(inst.q),
        "num_vars": inst.n,
        "var_classes": list(inst.var_classes),
        "constraints": [
            {key: {str(i): str(v) for i, v in getattr(con, key)} for key in "abc"}
            for con in inst.constraints
        ],
        "weak_sites": [_site_doc(s) for s in inst.weak_sites],
        "public_outputs": list(inst.public_outputs),
    }
    if inst.signal_names is not None:
        doc["signal_names"] = list(inst.signal_names)
    return doc


def serialize_circuit_json(inst: R1CSInstance) -> str:
    return json.dumps(circuit_to_dict(inst), indent=1, sort_keys=True) + "\n"


def parse_witness_json(data: bytes | str, field: Field | None = None) -> Witness:
    doc = _load(data)
    if not isinstance(doc, dict) or set(doc) != {"values"} or not isinstance(doc["values"], list):
        raise SchemaError('witness JSON must be {"values": [...]}')
    values = [_dec(v, "witness value") for v in doc["values"]]
    if field is not None:
        values = [v % field.q for v in values]
    return Witness(tuple(values))


def serialize_witness_json(w: Witness) -> str:
    return json.dumps({"values": [str(v) for v in w.values]}) + "\n"


def parse_sites_json(data: bytes | str) -> tuple[tuple[WeakSite, ...], tuple[str, ...] | None]:
    """Sidecar for binary circuits: ``{"weak_sites": [...], "signal_names": [...]}``."""
    doc = _load(data)
    if not isinstance(doc, dict):
        raise SchemaError("sites sidecar must be an object")
    unknown = set(doc) - {"weak_sites", "signal_names"}
    if unknown:
        raise SchemaError(f"unknown sidecar fields {sorted(unknown)}")
    sites = _parse_sites(doc.get("weak_sites", []))
    names = _parse_names(doc["signal_names"]) if "signal_names" in doc else None
    return sites, names


def attach_sites(inst: R1CSInstance, sites, names=None) -> R1CSInstance:
    return R1CSInstance(
        inst.field,
        inst.num_vars,
        inst.constraints,
        inst.var_classes,
        tuple(sites),
        names if names is not None else inst.signal_names,
    )


# ---------------------------------------------------------------------------
# circom binary .r1cs
# ---------------------------------------------------------------------------

R1CS_MAGIC = b"r1cs"
_HEADER, _CONSTRAINTS, _WIRE_MAP = 1, 2, 3


class _Reader:
    def __init__(self, data: bytes, start: int, end: int, what: str):
        self.data, self.pos, self.end, self.what = data, start, end, what

    def take(self, size: int) -> bytes:
        if self.pos + size > self.end:
            raise TruncatedSection(f"{self.what}: need {size} bytes at offset {self.pos}")
        chunk = self.data[self.pos:self.pos + size]
        self.pos += size
        return chunk

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]

    def uint(self, size: int) -> int:
        return int.from_bytes(self.take(size), "little")


def _wire_classes(n_wires: int, n_out: int, n_pub_in: int, n_prv_in: int) -> tuple[str, ...]:
    classes = ["one"] + ["pub_out"] * n_out + ["pub_in"] * n_pub_in + ["priv_in"] * n_prv_in
    if len(classes) > n_wires:
        raise InvariantError("header declares more signals than wires")
    classes += ["intermediate"] * (n_wires - len(classes))
    return tuple(classes)


def parse_r1cs_binary(data: bytes) -> R1CSInstance:
    data = bytes(data)
    top = _Reader(data, 0, len(data), "file header")
    magic = top.take(4)
    if magic != R1CS_MAGIC:
        raise MagicMismatch(f"expected magic {R1CS_MAGIC!r}, got {magic!r}")
    version = top.u32()
    if version != 1:
        raise UnsupportedVersion(f"r1cs version {version} is not supported")
    n_sections = top.u32()
    sections: dict[int, tuple[int, int]] = {}
    for _ in range(n_sections):
        kind = top.u32()
        size = top.u64()
        start = top.pos
        top.take(size)
        if kind in sections and kind in (_HEADER, _CONSTRAINTS):
            raise SchemaError(f"duplicate section type {kind}")
        sections.setdefault(kind, (start, start + size))
    if _HEADER not in sections:
        raise TruncatedSection("missing header section")
    if _CONSTRAINTS not in sections:
        raise TruncatedSection("missing constraints section")

    hdr = _Reader(data, *sections[_HEADER], "header section")
    n8 = hdr.u32()
    if n8 == 0:
        raise SchemaError("field element size is zero")
    prime = hdr.uint(n8)
    n_wires = hdr.u32()
    n_out = hdr.u32()
    n_pub_in = hdr.u32()
    n_prv_in = hdr.u32()
    hdr.u64()  # label count; labels are not needed here
    m = hdr.u32()
    try:
        field = Field(prime)
    except NotPrime as exc:
        raise InvariantError(str(exc)) from None
    classes = _wire_classes(n_wires, n_out, n_pub_in, n_prv_in)

    body = _Reader(data, *sections[_CONSTRAINTS], "constraints section")
    constraints = []
    for _ in range(m):
        vecs = []
        for _side in range(3):
            terms = []
            for _t in range(body.u32()):
                wire = body.u32()
                if wire >= n_wires:
                    raise InvariantError(f"wire {wire} >= {n_wires}")
                terms.append((wire, body.uint(n8)))
            vecs.append(sparse(terms, field.q))
        constraints.append(Constraint(*vecs))
    return R1CSInstance(field, n_wires, tuple(constraints), classes)


def write_r1cs_binary(inst: R1CSInstance) -> bytes:
    """Encode in circom's layout.

    Wires must already be in circom order (one, outputs, public inputs,
    private inputs, everything else); otherwise InvariantError.
    """
    counts = {c: inst.var_classes.count(c) for c in ("pub_out", "pub_in", "priv_in")}
    expected = _wire_classes(inst.n, counts["pub_out"], counts["pub_in"], counts["priv_in"])
    if tuple(inst.var_classes) != expected:
        raise InvariantError("variables are not in circom wire order")
    n8 = ((inst.q.bit_length() + 63) // 64) * 8

    header = struct.pack("<I", n8) + inst.q.to_bytes(n8, "little")
    header += struct.pack(
        "<IIIIQI", inst.n, counts["pub_out"], counts["pub_in"], counts["priv_in"], inst.n, inst.m
    )
    body = bytearray()
    for con in inst.constraints:
        for vec in (con.a, con.b, con.c):
            body += struct.pack("<I", len(vec))
            for idx, coeff in vec:
                body += struct.pack("<I", idx) + coeff.to_bytes(n8, "little")
    wire_map = b"".join(struct.pack("<Q", i) for i in range(inst.n))

    out = bytearray(R1CS_MAGIC + struct.pack("<II", 1, 3))
    for kind, payload in ((_HEADER, header), (_CONSTRAINTS, bytes(body)), (_WIRE_MAP, wire_map)):
        out += struct.pack("<IQ", kind, len(payload)) + payload
    return bytes(out)


def load_circuit(path: str, sites_path: str | None = None) -> R1CSInstance:
    """Read a ``.json`` or binary ``.r1cs`` circuit, attaching an optional sites sidecar."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] == R1CS_MAGIC or path.endswith(".r1cs"):
        inst = parse_r1cs_binary(data)
    else:
        inst = parse_circuit_json(data)
    if sites_path:
        with open(sites_path, "rb") as fh:
            sites, names = parse_sites_json(fh.read())
        inst = attach_sites(inst, sites, names)
    return inst
