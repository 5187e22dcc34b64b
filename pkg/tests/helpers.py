"""Test-only helpers: a cheating prover and independent brute-force oracles."""

from __future__ import annotations

import itertools
import random

from zkcraft.circuit import Constraint, R1CSInstance, WeakSite, Witness, apply_edits, eval_residuals, sparse
from zkcraft.ff import TEST101, mle_eval, poly_eval_int
from zkcraft.oracle import builtin_rhs, seeded_fallback_constant
from zkcraft.proof import MODE_COEFFICIENTS, RepetitionProof, ViolationProof, encode_witness_poly
from zkcraft.viop.protocol import (
    MAX_NONCE,
    _divergence_points,
    _diverges,
    _statement,
    _witness_poly_bytes,
    build_delta_out,
    phi_table,
    residual_degree_bound,
)
from zkcraft.viop.sumcheck import domain_log, iota
from zkcraft.viop.transcript import Transcript
from zkcraft.vortex import SCHEME_ID, choose_nodes, commit, encode, open_at

Q = 101


def two_row_instance():
    """one, x (input), z (intermediate), y (output); y <== x + 1 (site), z = x * x."""
    rows = (
        Constraint(sparse({1: 1, 0: 1}, Q), sparse({0: 1}, Q), sparse({3: 1}, Q)),
        Constraint(sparse({1: 1}, Q), sparse({1: 1}, Q), sparse({2: 1}, Q)),
    )
    return R1CSInstance(TEST101, 4, rows, ("one", "priv_in", "intermediate", "pub_out"), (WeakSite("main.y", (0,), 3),))


def forge_zero_round_proof(inst, pool, plan, delta, c, w_false, y_orig, ell, salt):
    """A proof for a false statement whose round polynomials are all zero.

    Every consistency check except Phi(zeta) = 0 then passes, so the forgery
    is accepted exactly when each repetition's challenge hits a root of Phi~.
    This is the best a prover can do on a one-variable sum-check.
    """
    field = inst.field
    q = field.q
    t = domain_log(inst.m)
    m_out = len(inst.public_outputs)
    out_points = tuple(range(m_out))
    y_prime = [w_false[i] for i in inst.public_outputs]
    delta_poly = build_delta_out(y_prime, y_orig, out_points, field)
    edited = apply_edits(inst, pool, delta, c)
    table = phi_table(edited, w_false, t)
    enc = encode(pool, plan, delta, c, inst)
    com = commit(enc)
    wp = encode_witness_poly(w_false, field)
    x_prime = tuple(w_false[i] for i in inst.input_indices)

    tr = Transcript()
    _statement(tr, inst, pool, plan, out_points, y_orig, x_prime, t, ell, salt, com.domain_size)
    tr.absorb("root", com.root)
    tr.absorb("witness_poly", _witness_poly_bytes(wp))
    reps = []
    for r in range(ell):
        zetas = []
        for k in range(t):
            tr.absorb_ints(f"g/{r}/{k}", ())
            zetas.append(tr.challenge_field(f"zeta/{r}/{k}", q))
        pos = tr.challenge_below(f"open/{r}", com.domain_size)
        opening = open_at(enc, com, pos)
        phi = mle_eval(table, zetas, q)
        dv = poly_eval_int(delta_poly.coeffs, iota(zetas, q), q)
        tr.absorb_ints(f"opened/{r}", list(opening.claimed_value) + [phi, dv])
        reps.append(RepetitionProof(tuple(() for _ in range(t)), opening, phi, dv))
    for nonce in range(MAX_NONCE):
        trial = Transcript.__new__(Transcript)
        trial.state = tr.state
        if _diverges(delta_poly.coeffs, _divergence_points(trial, nonce, ell, q), q):
            break
    tr = trial  # a cheater that never diverges submits its last attempt
    tr.absorb("mode", MODE_COEFFICIENTS.encode())
    return ViolationProof(
        SCHEME_ID, q, t, ell, m_out, residual_degree_bound(inst.n, len(pool)), salt, tuple(pool), plan,
        out_points, x_prime, tuple(y_orig), com, MODE_COEFFICIENTS, enc.p_coeffs, enc.s_coeffs,
        tuple(reps), nonce, wp, tr.digest(),
    )


def random_false_witness(inst, pool, delta, c, y_orig, rng):
    """w' with diverging outputs that violates the edited system somewhere."""
    edited = apply_edits(inst, pool, delta, c)
    while True:
        vals = (1,) + tuple(rng.randrange(Q) for _ in range(inst.n - 1))
        if tuple(vals[i] for i in inst.public_outputs) == tuple(y_orig):
            continue
        if any(eval_residuals(edited, vals)):
            return Witness(vals)


# ---------------------------------------------------------------------------
# brute force for the search
# ---------------------------------------------------------------------------


def eval_chain(rows_lin, x, overrides, q):
    vals = [1, *x]
    for r, (l1, l2) in enumerate(rows_lin):
        if r in overrides:
            vals.append(overrides[r] % q)
            continue
        a = sum(cf * vals[i] for i, cf in l1.items()) % q
        b = sum(cf * vals[i] for i, cf in l2.items()) % q
        vals.append(a * b % q)
    return vals


def family_constants(rows_lin, row, orig_vals, site_id, oracle_seed, q, n_in):
    """Template constants, the seeded fallback, and every u making another row hold at u."""
    consts = [int(v) % q if v.isdigit() else 0 for v in builtin_rhs(q)]
    consts.append(seeded_fallback_constant(oracle_seed, site_id, q))
    target = 1 + n_in + row
    for r2, (l1, l2) in enumerate(rows_lin):
        if r2 == row or (target not in l1 and target not in l2):
            continue
        roots = []
        for u in range(q):
            vals = list(orig_vals)
            vals[target] = u
            a = sum(cf * vals[i] for i, cf in l1.items()) % q
            b = sum(cf * vals[i] for i, cf in l2.items()) % q
            if (a * b - vals[1 + n_in + r2]) % q == 0:
                roots.append(u)
        if len(roots) < q:  # an identically satisfied row pins nothing
            consts += roots
    return sorted(set(consts))


def brute_force_verdict(circ, t_max, oracle_seed=0):
    """Exhaustive over subsets, family constants and every input vector."""
    inst = circ.inst
    q = inst.q
    n_in = len(inst.input_indices)
    m = inst.m
    outs = inst.public_outputs
    weak = [r for r in range(m) if r in inst.site_of_row]
    for x in itertools.product(range(q), repeat=n_in):
        orig = eval_chain(circ.rows_lin, x, {}, q)
        y = [orig[i] for i in outs]
        fams = [family_constants(circ.rows_lin, r, orig, f"main.v{r}", oracle_seed, q, n_in) for r in range(m)]
        for size in range(1, min(t_max, m) + 1):
            for subset in itertools.combinations(weak, size):
                for consts in itertools.product(*(fams[r] for r in subset)):
                    vals = eval_chain(circ.rows_lin, x, dict(zip(subset, consts)), q)
                    if [vals[i] for i in outs] != y:
                        return True
    return False
