from .backend import (
    BASEFOLD,
    FALLBACK_REASONS,
    HYPERPLONK,
    PROFILE_BY_NAME,
    PROFILES,
    BackendDecision,
    BackendProfile,
    crypto_self_test,
    select_backend,
)
from .manifest import SCHEMA_VERSION, build_manifest, manifest_json, write_manifest, write_outputs
from .pipeline import (
    Finding,
    PipelineConfig,
    PipelineResult,
    SearchHit,
    SearchStats,
    call_bound,
    candidate_inputs,
    certify,
    fallback_search,
    greedy_cover,
    run_pipeline,
)
