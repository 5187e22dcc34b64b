import json
import random
from fractions import Fraction

from helpers import brute_force_verdict
from zkcraft.circuit import Constraint, R1CSInstance, WeakSite, apply_edits, eval_residuals, sparse
from zkcraft.driver import (
    BASEFOLD,
    HYPERPLONK,
    PipelineConfig,
    call_bound,
    crypto_self_test,
    manifest_json,
    run_pipeline,
    select_backend,
    write_outputs,
)
from zkcraft.ff import TEST101
from zkcraft.slicer import SlicerConfig
from zkcraft.synthetic import chain_circuit
from zkcraft.toy import TOY_PROGRAM, toy_instance, toy_row_polys, toy_sel_polys
from zkcraft.viop import knowledge_error_bound, verify
from zkcraft.vortex import custom_plan

Q = 101


def toy_cfg(**kw):
    plan = custom_plan(TEST101, toy_row_polys(), toy_sel_polys())
    return PipelineConfig(slicer=SlicerConfig(1, Fraction(1, 2), score_convention="toy"), plan_override=plan, **kw)


# ---- backend ---------------------------------------------------------------


def test_select_backend_examples():
    dec = select_backend(1 << 19, 1 << 23)
    assert dec.zk_native and dec.profile is HYPERPLONK
    assert select_backend(1 << 10, 1 << 10).profile is BASEFOLD
    dec = select_backend(1 << 21, 4)
    assert not dec.zk_native and dec.fallback_reason == "deg_exceeded"
    dec = select_backend(4, 1 << 25)
    assert dec.fallback_reason == "domain_exceeded"
    dec = select_backend(4, 4, crypto_check=lambda: False)
    assert dec.fallback_reason == "crypto_unavailable" and dec.profile is None


def test_crypto_self_test_passes():
    assert crypto_self_test()


# ---- call bound ------------------------------------------------------------


def test_call_bound_examples():
    assert call_bound(3, 2) == 6
    assert call_bound(5, 3) == 25
    assert call_bound(8, 3) == 92
    assert call_bound(4, 0) == 0
    assert call_bound(2, 5) == 3


def test_t_max_zero_is_empty_stream():
    res = run_pipeline(toy_instance(), TOY_PROGRAM, PipelineConfig(t_max=0))
    assert not res.found and res.stats.subset_evaluations == 0


def pinned_instance():
    """y <== x is weak, but a strong row x * 1 = y pins it."""
    rows = (
        Constraint(sparse({1: 1}, Q), sparse({0: 1}, Q), sparse({2: 1}, Q)),
        Constraint(sparse({1: 1}, Q), sparse({0: 1}, Q), sparse({2: 1}, Q)),
    )
    return R1CSInstance(TEST101, 3, rows, ("one", "priv_in", "pub_out"), (WeakSite("main.y", (0,), 2),))


def test_unsatisfiable_k1_tmax1_is_none_within_bound():
    res = run_pipeline(pinned_instance(), None, PipelineConfig(slicer=SlicerConfig(pool_size=1), t_max=1))
    assert not res.found
    assert len(res.pool_rows) == 1
    assert res.stats.subset_evaluations <= 1
    assert res.manifest["result"] == "none"


def test_exhaustive_run_uses_exactly_the_bound():
    res = run_pipeline(toy_instance(), TOY_PROGRAM, PipelineConfig(find_all=True, t_max=3))
    assert res.stats.subset_evaluations == res.stats.max_calls == call_bound(3, 3) == 7


# ---- pipeline --------------------------------------------------------------


def test_toy_defaults_find_counterexample_at_small_t():
    res = run_pipeline(toy_instance(), TOY_PROGRAM)
    assert res.found
    f = res.first
    assert sum(f.counterexample.edit.delta) <= 2
    assert f.verify_result.accepted
    edited = apply_edits(toy_instance(), res.pool_rows, f.counterexample.edit.delta, f.counterexample.edit.c)
    assert not any(eval_residuals(edited, f.counterexample.w_prime))
    assert f.counterexample.trace.y != f.counterexample.y_orig


def test_toy_seeded_edit_golden():
    res = run_pipeline(toy_instance(), TOY_PROGRAM, toy_cfg(), seeded_edit=((1, 0, 1), (2, 0, 3), (2, 3)))
    edit = res.first.counterexample.edit
    assert (edit.delta, edit.c) == ((1, 0, 1), (2, 0, 3))
    assert "c <== 2;" in res.first.counterexample.mutated_source
    assert "e <== 3;" in res.first.counterexample.mutated_source


def square_two_instance():
    """x * x = 2 with an output y <== x."""
    rows = (
        Constraint(sparse({1: 1}, Q), sparse({1: 1}, Q), sparse({0: 2}, Q)),
        Constraint(sparse({1: 1}, Q), sparse({0: 1}, Q), sparse({2: 1}, Q)),
    )
    return R1CSInstance(TEST101, 3, rows, ("one", "priv_in", "pub_out"), (WeakSite("main.y", (1,), 2),))


def test_square_two_matches_brute_force():
    # 2 is a non-residue mod 101 (Euler's criterion), so no input runs the original
    assert pow(2, (Q - 1) // 2, Q) == Q - 1
    assert not any(x * x % Q == 2 for x in range(Q))
    res = run_pipeline(square_two_instance(), None)
    assert not res.found


def test_square_four_is_found():
    """Same shape with x * x = 4: originals exist and y can be rewired."""
    inst = square_two_instance()
    rows = (Constraint(sparse({1: 1}, Q), sparse({1: 1}, Q), sparse({0: 4}, Q)),) + inst.constraints[1:]
    inst = R1CSInstance(TEST101, 3, rows, inst.var_classes, inst.weak_sites)
    res = run_pipeline(inst, None)
    assert res.found and res.first.counterexample.trace.x[0] in (2, Q - 2)


def test_chain_circuits_agree_with_brute_force():
    masks = [(0,), (1,), (0, 1), ()]
    for seed in range(12):
        pick = random.Random(seed)
        circ = chain_circuit(TEST101, 1, 2, seed=seed, density=0.3, weak_rows=pick.choice(masks))
        res = run_pipeline(circ.inst, circ.program)
        assert res.found == brute_force_verdict(circ, 3), seed


def greedy_instance():
    """r0: v0 <== x+1, r1: v1 <== x+2 (weak); r2: y = v0+v1; r3: v1 - 1 = v0.

    Any single edit breaks r3, so t* = 2.
    """
    rows = (
        Constraint(sparse({1: 1, 0: 1}, Q), sparse({0: 1}, Q), sparse({2: 1}, Q)),
        Constraint(sparse({1: 1, 0: 2}, Q), sparse({0: 1}, Q), sparse({3: 1}, Q)),
        Constraint(sparse({2: 1, 3: 1}, Q), sparse({0: 1}, Q), sparse({4: 1}, Q)),
        Constraint(sparse({3: 1, 0: Q - 1}, Q), sparse({0: 1}, Q), sparse({2: 1}, Q)),
    )
    sites = (WeakSite("main.v0", (0,), 2), WeakSite("main.v1", (1,), 3))
    return R1CSInstance(TEST101, 5, rows, ("one", "priv_in", "intermediate", "intermediate", "pub_out"), sites)


def test_greedy_cover_extends_past_t_max():
    res = run_pipeline(greedy_instance(), None, PipelineConfig(t_max=1))
    assert res.found and res.first.hit.via_greedy
    g = res.stats.greedy
    assert g["attempted"] and g["bound"] == 2 and g["size"] == 2
    assert res.manifest["budget"]["greedy"]["size"] == 2
    direct = run_pipeline(greedy_instance(), None, PipelineConfig(t_max=2))
    assert direct.found and not direct.first.hit.via_greedy


def test_find_all_lists_distinct_edits():
    res = run_pipeline(toy_instance(), TOY_PROGRAM, PipelineConfig(find_all=True, t_max=1))
    edits = [(f.counterexample.edit.delta, f.counterexample.edit.c) for f in res.findings]
    assert len(edits) == len(set(edits)) > 1
    assert res.stats.subset_evaluations <= call_bound(3, 1)


def test_every_finding_reverifies():
    res = run_pipeline(toy_instance(), TOY_PROGRAM, PipelineConfig(find_all=True, t_max=2))
    for f in res.findings:
        v = verify(f.proof, toy_instance(), res.pool_rows, res.plan, f.counterexample.y_orig)
        assert v.accepted


# ---- manifest --------------------------------------------------------------


def test_manifest_deterministic():
    a = run_pipeline(toy_instance(), TOY_PROGRAM, PipelineConfig(seed=7))
    b = run_pipeline(toy_instance(), TOY_PROGRAM, PipelineConfig(seed=7))
    assert manifest_json(a.manifest) == manifest_json(b.manifest)
    assert a.first.proof_bytes == b.first.proof_bytes
    assert "timings" not in a.manifest


def test_fallback_manifest_has_no_proof_fields():
    res = run_pipeline(toy_instance(), TOY_PROGRAM, crypto_check=lambda: False)
    m = res.manifest
    assert res.found and m["fallback_reason"] == "crypto_unavailable"
    assert "knowledge_error" not in m
    for f in m["findings"]:
        assert not {"proof_digest", "proof_mode", "proof_bytes"} & set(f)
        assert f["extraction_source"] == "direct_search"
    assert res.first.proof is None


def test_zk_manifest_knowledge_error_recomputes():
    res = run_pipeline(toy_instance(), TOY_PROGRAM)
    m = res.manifest
    lin, expo = knowledge_error_bound(Q, 3, res.decision.d, 2)
    assert m["knowledge_error"] == {"linear": str(lin), "exponential": str(expo)}
    assert m["backend"]["backend_id"] == "basefold_profile"


def test_write_outputs(tmp_path):
    res = run_pipeline(toy_instance(), TOY_PROGRAM)
    paths = write_outputs(res, toy_instance(), tmp_path, "toy", emit_smt2=True)
    assert {"proof", "counterexample", "mutated", "manifest", "timings", "smt2_t1"} <= set(paths)
    doc = json.loads(paths["manifest"].read_text())
    assert doc["schema_version"] == 1
    assert paths["proof"].read_bytes() == res.first.proof_bytes
