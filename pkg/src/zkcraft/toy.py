"""The three-constraint walkthrough circuit, used by tests and demos.

``c = a*b; d = c + a; e = d + b`` with private inputs a, b and outputs
c, d, e.  Every assignment is a weak ``<==`` site.
"""

from __future__ import annotations

from .circuit.model import Constraint, R1CSInstance, WeakSite, Witness, sparse
from .ff import TEST101, DensePoly, Field

TOY_PROGRAM = """signal private input a;
signal private input b;
signal private input c;
signal output d;
signal output e;

c <== a * b;
d <== c + a;
e <== d + b;
"""

TOY_NAMES = ("one", "a", "b", "c", "d", "e")
ONE, A, B, C, D, E = range(6)


def toy_instance(field: Field = TEST101) -> R1CSInstance:
    q = field.q
    rows = (
        Constraint(sparse({A: 1}, q), sparse({B: 1}, q), sparse({C: 1}, q)),
        Constraint(sparse({C: 1, A: 1}, q), sparse({ONE: 1}, q), sparse({D: 1}, q)),
        Constraint(sparse({D: 1, B: 1}, q), sparse({ONE: 1}, q), sparse({E: 1}, q)),
    )
    classes = ("one", "priv_in", "priv_in", "pub_out", "pub_out", "pub_out")
    sites = (
        WeakSite("main.c", (0,), C),
        WeakSite("main.d", (1,), D),
        WeakSite("main.e", (2,), E),
    )
    return R1CSInstance(field, 6, rows, classes, sites, TOY_NAMES)


def toy_witness(a: int = 2, b: int = 3, field: Field = TEST101) -> Witness:
    q = field.q
    c = a * b % q
    d = (c + a) % q
    e = (d + b) % q
    return Witness((1, a % q, b % q, c, d, e))


def toy_row_polys(field: Field = TEST101) -> list[DensePoly]:
    """The walkthrough's row encodings X^2+X+1, 2X^2+3X+1, X^2+2X+3."""
    return [
        DensePoly((1, 1, 1), field),
        DensePoly((1, 3, 2), field),
        DensePoly((3, 2, 1), field),
    ]


def toy_sel_polys(field: Field = TEST101) -> list[DensePoly]:
    """Selector encodings Y, Y^2, Y^3."""
    return [DensePoly((0, 1), field), DensePoly((0, 0, 1), field), DensePoly((0, 0, 0, 1), field)]


TOY_DELTA = (1, 0, 1)
TOY_C = (2, 0, 3)
