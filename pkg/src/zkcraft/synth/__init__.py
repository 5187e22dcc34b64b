from .circom import (
    MutatedProgram,
    Program,
    emit_mutated_source,
    eval_expr,
    parse_expr,
    parse_program,
    render_edit_listing,
    replay_program,
    site_signal,
)
from .smtlib import parse_sexprs, smtlib_emit
from .solve import ALL_FIELD, SiteEquation, site_equations, solve_site_constant
