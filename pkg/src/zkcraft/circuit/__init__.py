from .execute import ExecutionResult, execute, solve_witness
from .formats import (
    attach_sites,
    circuit_to_dict,
    load_circuit,
    parse_circuit_json,
    parse_r1cs_binary,
    parse_sites_json,
    parse_witness_json,
    serialize_circuit_json,
    serialize_witness_json,
    write_r1cs_binary,
)
from .model import (
    INPUT_CLASSES,
    PUBLIC_CLASSES,
    VAR_CLASSES,
    WITNESS_CLASSES,
    Constraint,
    ExecutionTrace,
    R1CSInstance,
    WeakSite,
    Witness,
    check_tcct,
    apply_edits,
    differential_check,
    edited_constraint,
    eval_residuals,
    is_satisfied,
    sparse,
    split_trace,
    witness_from_trace,
)
