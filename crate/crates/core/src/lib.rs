//! Bagging and subbagging for two-group multiple-comparison experiments.
//!
//! A dataset holds a control matrix and a patient matrix with one row per
//! gene. The base procedure t-tests every row and applies the
//! Benjamini–Hochberg step-up rule. Pseudo-samples are built by resampling
//! subject columns within each group ([`resampling`]); each pseudo-sample is
//! tested with the same procedure and the resulting rejection lists are
//! combined by voting ([`aggregation`]). [`simulation`] measures discovery
//! power and false discovery proportion of the plain and aggregated lists on
//! synthetic data with known truth.

pub mod aggregation;
pub mod bagging;
pub mod data;
pub mod error;
pub mod io;
pub mod resampling;
pub mod simulation;
pub mod special;
pub mod testing;

pub use aggregation::{
    apply_rule, fdr_combine_m, fdr_combine_two, tally_votes, union_aggregate, union_size_ie, vote_curve,
    AggregationRule, FdrCombinationReport, RuleKind,
};
pub use bagging::{run_bagging, BaggingConfig, BaggingOutcome};
pub use data::{truelist_overlap, Matrix, RejectionList, TwoGroupDataset, VoteTally};
pub use error::{Error, Result};
pub use io::load_dataset;
pub use resampling::{
    balanced_bagging_sample, generate_pseudo_samples, max_contrast_plan, max_contrast_sample,
    random_subbagging_sample, ContrastPlan, Scheme, SubbagSizes, SubbagSpec,
};
pub use simulation::{adp, afdr, generate_dataset, run_power_study, PowerReport, SimulationDesign};
pub use testing::{
    bh_reject, p_value_two_sided, t_statistic, test_dataset, RowTestResult, TestConfig, VarianceMode,
};
