//! Gibbs random fields over Pauli alphabets and the canonical estimator.

mod bounds;
mod canonical;
mod gibbs;
mod graph;
mod pipeline;
mod table;

pub use bounds::{
    bound_diagnostics, log_ratio_lemma, oracle_checks, plug_in_diagnostics, BoundDiagnostics, OracleChecks,
};
pub use canonical::{canonical_potentials, evaluate_unnormalized, CanonicalEstimate, CanonicalFactor, PROB_FLOOR};
pub use gibbs::{ChainSampler, GibbsField};
pub use graph::{independent_set_schedule, AugmentedFactor, FactorGraph};
pub use pipeline::{
    canonical_estimator_pipeline, estimate_closure_marginals, FieldDump, PipelineConfig, PipelineOutput,
    DEFAULT_NU_BAR_CAP,
};
pub use table::{local_index, marginalize, LocalMarginal, TABLE_CAP};
