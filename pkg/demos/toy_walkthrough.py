"""Walk the three-row toy circuit through every stage and print what happens.

    python3 demos/toy_walkthrough.py
"""

from fractions import Fraction

from zkcraft.driver import PipelineConfig, run_pipeline
from zkcraft.ff import TEST101
from zkcraft.slicer import SlicerConfig, all_diagnostics
from zkcraft.toy import TOY_PROGRAM, toy_instance, toy_row_polys, toy_sel_polys
from zkcraft.vortex import custom_plan, encode


def main():
    inst = toy_instance()
    slicer = SlicerConfig(1, Fraction(1, 2), score_convention="toy")
    print("row scores (toy convention):")
    for dg in all_diagnostics(inst, slicer):
        print(f"  row {dg.row_index}: kappa_w={dg.kappa_w} kappa_c={dg.kappa_c} score={dg.score} fp={dg.fingerprint:016x}")

    plan = custom_plan(TEST101, toy_row_polys(), toy_sel_polys())
    delta, c = (1, 0, 1), (2, 0, 3)
    enc = encode((0, 1, 2), plan, delta, c, inst)
    print("row polynomials at X=1:", [p(1) for p in enc.row_polys])
    print("P coefficients:", enc.p_coeffs, " S coefficients:", enc.s_coeffs)

    cfg = PipelineConfig(slicer=slicer, plan_override=plan)
    res = run_pipeline(inst, TOY_PROGRAM, cfg, seeded_edit=(delta, c, (2, 3)))
    f = res.first
    print("backend:", res.decision.mode, res.decision.profile.backend_id)
    print("proof bytes:", len(f.proof_bytes), " accepted:", f.verify_result.accepted)
    print("extracted delta/c:", f.counterexample.edit.delta, f.counterexample.edit.c)
    print("outputs", f.counterexample.y_orig, "->", f.counterexample.trace.y)
    print("mutated program:")
    print(f.counterexample.mutated_source)

    found = run_pipeline(inst, TOY_PROGRAM)
    e = found.first.counterexample.edit
    print("undirected search found delta", e.delta, "c", e.c, "after", found.stats.subset_evaluations, "subset(s)")


if __name__ == "__main__":
    main()
