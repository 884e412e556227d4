"""Hybrid Schrodinger-Feynman simulation of random grid circuits."""

from ._core import (
    BenchVersion,
    Challenge,
    Circuit,
    ClaimantEngine,
    GateKind,
    SfsimError,
    SimPlan,
    audit,
    claimant_round,
    estimate_fidelity,
    forecast_seconds,
    frugal_induced_tv,
    generate,
    issue_challenge,
    load_circuit,
    make_plan,
    merge_shards,
    parse_circuit,
    plan_basic,
    porter_thomas_ks,
    run_approx,
    run_campaign,
    sample_frugal,
    save_circuit,
    schmidt_rank,
    select_indices,
    simulate,
    total_variation,
    verifier_round,
)

__all__ = [name for name in dir() if not name.startswith("_")]
