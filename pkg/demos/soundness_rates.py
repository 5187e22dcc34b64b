"""Empirical false-accept rates of a zero-round cheating prover against the
linear knowledge-error bound, for one and two repetitions.

    python3 demos/soundness_rates.py [trials]
"""

import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from helpers import forge_zero_round_proof, random_false_witness, two_row_instance  # noqa: E402
from zkcraft.ff import TEST101  # noqa: E402
from zkcraft.viop import IopConfig, knowledge_error_bound, residual_degree_bound, verify  # noqa: E402
from zkcraft.vortex import choose_nodes  # noqa: E402


def main(trials: int = 20_000):
    inst = two_row_instance()
    plan = choose_nodes(TEST101, 1)
    d = residual_degree_bound(inst.n, 1)
    for ell in (1, 2, 3):
        rng = random.Random(ell)
        hits = 0
        for i in range(trials):
            c = (rng.randrange(101),)
            w = random_false_witness(inst, (0,), (1,), c, (5,), rng)
            salt = i.to_bytes(4, "little")
            proof = forge_zero_round_proof(inst, (0,), plan, (1,), c, w, (5,), ell, salt)
            hits += verify(proof, inst, (0,), plan, (5,), IopConfig(repetitions=ell, salt=salt)).accepted
        lin, expo = knowledge_error_bound(101, 1, d, ell)
        print(f"ell={ell}: {hits}/{trials} = {hits / trials:.5f}  linear {float(lin):.4f}  exponential {float(expo):.2e}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 20_000)
