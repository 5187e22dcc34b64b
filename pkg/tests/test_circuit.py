import json
import random
import struct

import pytest
from hypothesis import given, settings, strategies as st

from zkcraft.circuit import (
    Constraint,
    R1CSInstance,
    WeakSite,
    Witness,
    apply_edits,
    attach_sites,
    check_tcct,
    circuit_to_dict,
    differential_check,
    eval_residuals,
    execute,
    is_satisfied,
    parse_circuit_json,
    parse_r1cs_binary,
    parse_sites_json,
    parse_witness_json,
    serialize_circuit_json,
    serialize_witness_json,
    solve_witness,
    sparse,
    split_trace,
    witness_from_trace,
    write_r1cs_binary,
)
from zkcraft.errors import (
    IndexOutOfRange,
    InvariantError,
    MagicMismatch,
    SchemaError,
    ShapeMismatch,
    TruncatedSection,
    UnsupportedVersion,
)
from zkcraft.ff import TEST101
from zkcraft.synthetic import chain_circuit
from zkcraft.toy import toy_instance, toy_witness

Q = 101


def square_instance():
    # circom wire order: one, y (public output), x (private input); x*x = y
    return R1CSInstance(
        TEST101, 3, (Constraint(sparse({2: 1}, Q), sparse({2: 1}, Q), sparse({1: 1}, Q)),),
        ("one", "pub_out", "priv_in"),
    )


def test_toy_json_roundtrip_is_identity():
    inst = toy_instance()
    text = serialize_circuit_json(inst)
    back = parse_circuit_json(text)
    assert back.m == 3 and len(back.weak_sites) == 3
    assert serialize_circuit_json(back) == text
    assert back == inst


def test_empty_rows_is_vacuous():
    inst = parse_circuit_json(json.dumps({"modulus": "101", "num_vars": 2, "var_classes": ["one", "priv_in"], "constraints": []}))
    assert inst.m == 0
    assert eval_residuals(inst, Witness((1, 55))) == []
    assert is_satisfied(inst, Witness((1, 3)))


def test_index_equal_to_n_is_schema_error():
    doc = circuit_to_dict(toy_instance())
    doc["constraints"][0]["a"] = {"6": "1"}
    with pytest.raises(SchemaError):
        parse_circuit_json(json.dumps(doc))


def test_json_schema_errors():
    doc = circuit_to_dict(toy_instance())
    for mutate in (
        lambda d: d.pop("modulus"),
        lambda d: d.update(extra=1),
        lambda d: d["var_classes"].__setitem__(1, "wizard"),
        lambda d: d["constraints"][0].pop("c"),
    ):
        bad = json.loads(json.dumps(doc))
        mutate(bad)
        with pytest.raises(SchemaError):
            parse_circuit_json(json.dumps(bad))
    bad = json.loads(json.dumps(doc))
    bad["modulus"] = "100"
    with pytest.raises(InvariantError):
        parse_circuit_json(json.dumps(bad))
    bad = json.loads(json.dumps(doc))
    bad["public_outputs"] = [1]
    with pytest.raises(InvariantError):
        parse_circuit_json(json.dumps(bad))


def test_site_row_in_two_sites_rejected():
    inst = toy_instance()
    with pytest.raises(InvariantError):
        attach_sites(inst, (WeakSite("s1", (0,)), WeakSite("s2", (0,))))
    with pytest.raises((InvariantError, IndexOutOfRange)):
        attach_sites(inst, (WeakSite("s1", (7,)),))


def test_sites_sidecar():
    inst = toy_instance()
    bare = inst.with_constraints(inst.constraints)
    doc = {"weak_sites": [{"site_id": "main.c", "rows": [0], "target": 3}]}
    sites, names = parse_sites_json(json.dumps(doc))
    got = attach_sites(parse_circuit_json(json.dumps({**circuit_to_dict(bare), "weak_sites": []})), sites, names)
    assert got.site_of_row[0].site_id == "main.c" and got.target_of_row(0) == 3
    assert not got.is_mutable(1)


def test_witness_json_roundtrip():
    w = toy_witness()
    assert parse_witness_json(serialize_witness_json(w)) == w
    with pytest.raises(InvariantError):
        parse_witness_json('{"values": ["2"]}')


def test_residual_examples():
    inst = toy_instance()
    assert eval_residuals(inst, toy_witness()) == [0, 0, 0]
    bad = Witness((1, 2, 3, 7, 8, 11))
    # row 0: 2*3 - 7 = -1; row 1: (7 + 2) - 8 = 1
    assert eval_residuals(inst, bad) == [Q - 1, 1, 0]
    with pytest.raises(ShapeMismatch):
        eval_residuals(inst, (1, 2))


def test_check_tcct():
    inst = toy_instance()
    w = toy_witness()
    y = (6, 8, 11)
    assert not check_tcct(inst, split_trace(inst, w), y)
    broken = split_trace(inst, Witness((1, 2, 3, 7, 8, 11)))
    assert not check_tcct(inst, broken, (0, 0, 0))
    edited = apply_edits(inst, (0, 1, 2), (1, 0, 1), (2, 0, 3))
    w2 = Witness((1, 2, 3, 2, 4, 3))
    assert check_tcct(edited, split_trace(edited, w2), y)
    assert witness_from_trace(edited, split_trace(edited, w2)) == w2


def test_differential_check_examples():
    inst = toy_instance()
    w = toy_witness()
    assert not differential_check(inst, w, {}, {})
    # a' = a + 1 gives c = 9, d = 12, e = 15
    dz = {1: 1}
    dy = {3: 3, 4: 4, 5: 4}
    shifted = [1, 3, 3, 9, 12, 15]
    assert differential_check(inst, w, dz, dy) == is_satisfied(inst, shifted) == True
    assert differential_check(inst, w, dz, {3: 3, 4: 4, 5: 5}) == is_satisfied(inst, [1, 3, 3, 9, 12, 16]) == False
    with pytest.raises(IndexOutOfRange):
        differential_check(inst, w, {3: 1}, {})


def test_differential_check_matches_full_recheck():
    rng = random.Random(11)
    circ = chain_circuit(TEST101, 2, 6, 2, seed=5)
    inst = circ.inst
    base = execute(inst, (4, 9)).witness
    agree = 0
    for _ in range(100):
        dz = {i: rng.randrange(Q) for i in rng.sample(range(1, inst.n - 2), rng.randint(0, 2))}
        dy = {i: rng.randrange(Q) for i in inst.public_outputs if rng.random() < 0.7}
        vals = list(base.values)
        for i, dv in {**dz, **dy}.items():
            vals[i] = (vals[i] + dv) % Q
        full = is_satisfied(inst, vals) and any(dy.get(i, 0) % Q for i in inst.public_outputs)
        assert differential_check(inst, base, dz, dy) == full
        agree += 1
    assert agree == 100


def test_apply_edits_preconditions():
    inst = toy_instance()
    with pytest.raises(InvariantError):
        apply_edits(inst, (0, 1, 2), (0, 1, 0), (5, 1, 0))
    with pytest.raises(ShapeMismatch):
        apply_edits(inst, (0, 1), (0, 1, 0), (0, 1, 0))
    with pytest.raises(InvariantError):
        apply_edits(square_instance(), (0,), (1,), (4,))


def test_execute_toy_and_underdetermined():
    res = execute(toy_instance(), (2, 3))
    assert res.ok and res.witness.values == (1, 2, 3, 6, 8, 11)
    # y = 0 * z leaves z free
    inst = R1CSInstance(TEST101, 4, (Constraint((), sparse({2: 1}, Q), sparse({3: 1}, Q)),), ("one", "priv_in", "intermediate", "pub_out"))
    res = execute(inst, (5,))
    assert res.status == "underdetermined" and 2 in res.free_vars
    # x * x = 2 has no solution over F_101
    unsat = R1CSInstance(TEST101, 2, (Constraint(sparse({1: 1}, Q), sparse({1: 1}, Q), sparse({0: 2}, Q)),), ("one", "priv_in"))
    assert execute(unsat, (7,)).status == "violated"


def test_execute_matches_direct_evaluation():
    for seed in range(20):
        circ = chain_circuit(TEST101, 2, 5, 2, seed=seed)
        x = (seed, 3 * seed + 1)
        assert list(execute(circ.inst, x).witness.values) == circ.evaluate(x)


def test_solve_witness_linear_system():
    # x + z = y, x - z = 1 needs the linear solve pass
    inst = R1CSInstance(
        TEST101, 4,
        (
            Constraint(sparse({1: 1, 2: 1}, Q), sparse({0: 1}, Q), sparse({3: 1}, Q)),
            Constraint(sparse({1: 1, 2: -1}, Q), sparse({0: 1}, Q), sparse({0: 1}, Q)),
        ),
        ("one", "priv_in", "intermediate", "pub_out"),
    )
    res = solve_witness(inst, {1: 10})
    assert res.ok and res.witness.values == (1, 10, 9, 19)


# ---- iden3 binary ---------------------------------------------------------


def test_r1cs_binary_roundtrip():
    inst = square_instance()
    data = write_r1cs_binary(inst)
    back = parse_r1cs_binary(data)
    assert back.m == 1 and back.n == 3 and back.q == Q
    assert back.constraints == inst.constraints


def test_r1cs_binary_hand_assembled():
    """Bytes assembled field by field, independently of the writer."""
    n8 = 8

    def coeff(v):
        return v.to_bytes(n8, "little")

    header = struct.pack("<I", n8) + coeff(101) + struct.pack("<IIIIQI", 3, 1, 0, 1, 3, 1)
    lin = lambda wire: struct.pack("<I", 1) + struct.pack("<I", wire) + coeff(1)
    cons = lin(2) + lin(2) + lin(1)
    body = b""
    for stype, payload in ((1, header), (2, cons)):
        body += struct.pack("<IQ", stype, len(payload)) + payload
    data = b"r1cs" + struct.pack("<II", 1, 2) + body
    inst = parse_r1cs_binary(data)
    assert inst.m == 1 and inst.n == 3
    # wire order: one, outputs, public inputs, private inputs
    assert inst.var_classes == ("one", "pub_out", "priv_in")
    assert eval_residuals(inst, (1, 49, 7)) == [0]


def test_r1cs_binary_rejections():
    data = bytearray(write_r1cs_binary(square_instance()))
    with pytest.raises(MagicMismatch):
        parse_r1cs_binary(b"r2cs" + bytes(data[4:]))
    bad_version = bytes(data[:4]) + struct.pack("<I", 2) + bytes(data[8:])
    with pytest.raises(UnsupportedVersion):
        parse_r1cs_binary(bad_version)
    for cut in (3, 10, 30, len(data) - 1):
        with pytest.raises(TruncatedSection):
            parse_r1cs_binary(bytes(data[:cut]))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 6))
def test_json_roundtrip_property(seed, n_in, m):
    inst = chain_circuit(TEST101, n_in, m, 1, seed=seed).inst
    assert parse_circuit_json(serialize_circuit_json(inst)) == inst


_vec = st.dictionaries(st.integers(0, 5), st.integers(1, Q - 1), max_size=3)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(_vec, _vec, _vec), max_size=5))
def test_binary_roundtrip_property(rows):
    classes = ("one", "pub_out", "pub_in", "priv_in", "priv_in", "intermediate")
    cons = tuple(Constraint(sparse(a, Q), sparse(b, Q), sparse(c, Q)) for a, b, c in rows)
    inst = R1CSInstance(TEST101, 6, cons, classes)
    back = parse_r1cs_binary(write_r1cs_binary(inst))
    assert back.constraints == inst.constraints and back.var_classes == classes
