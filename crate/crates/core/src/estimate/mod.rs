//! Reconstruction procedures built on the ratio estimator.

mod budget;
mod group;
mod ratio;
mod subset;
mod tree;

pub use budget::{
    probes_for_subset, sample_budget_group, shots_for_group, shots_for_subset, SampleBudget,
};
pub use group::{reconstruct_group, GroupDiagnostics, GroupReconstruction};
pub use ratio::{
    ratio, DecayPoint, RatioConfig, RatioEstimate, RatioFlags, RatioOutput, Schedule, DEFAULT_M_CAP,
    DEFAULT_R_FLOOR,
};
pub use subset::{
    draw_probes, estimate_subset, estimate_subset_with, signed_average, SparseEstimate, SubsetConfig,
    DEFAULT_KAPPA_HINT,
};
pub use tree::{select_top_s, tree_reconstruction, TreeConfig, TreeLevel, TreeOutput};
