from .protocol import (
    REJECT_REASONS,
    IopConfig,
    VerifyResult,
    build_delta_out,
    instance_digest,
    knowledge_error_bound,
    phi_table,
    prove,
    residual_degree_bound,
    verify,
)
from .sumcheck import SumcheckProver, check_rounds, domain_log, iota
from .transcript import Transcript
