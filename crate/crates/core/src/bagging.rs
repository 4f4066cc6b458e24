//! End-to-end bagged testing: test the original data and every
//! pseudo-sample, tally the votes and apply an aggregation rule.

use rayon::prelude::*;

use crate::aggregation::{
    apply_rule, fdr_combine_m, tally_votes, union_size, AggregationRule, FdrCombinationReport,
};
use crate::data::{RejectionList, TwoGroupDataset, VoteTally};
use crate::error::Result;
use crate::resampling::Scheme;
use crate::testing::{test_dataset_labeled, TestConfig};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaggingConfig {
    pub test: TestConfig,
    pub scheme: Scheme,
    /// Requested number of pseudo-samples; maximum contrast overrides it.
    pub b: usize,
    pub rule: AggregationRule,
    pub master_seed: u64,
}

#[derive(Clone, Debug)]
pub struct BaggingOutcome {
    pub original: RejectionList,
    pub pseudo: Vec<RejectionList>,
    pub tally: VoteTally,
    /// Rows declared non-null after aggregation. With no pseudo-samples this
    /// is the original list, whatever the rule.
    pub final_list: RejectionList,
}

impl BaggingOutcome {
    pub fn n_pseudo(&self) -> usize {
        self.pseudo.len()
    }

    /// All voting lists, the original first.
    pub fn lists(&self) -> impl Iterator<Item = &RejectionList> {
        std::iter::once(&self.original).chain(&self.pseudo)
    }

    pub fn union_size(&self) -> usize {
        union_size(&self.lists().cloned().collect::<Vec<_>>())
    }

    /// Union-FDR estimate feeding each list's nominal level as its FDR.
    /// `None` when no list rejected anything.
    pub fn nominal_fdr_estimate(&self) -> Option<FdrCombinationReport> {
        let big = self.union_size();
        if big == 0 {
            return None;
        }
        let fdrs: Vec<f64> = self.lists().map(RejectionList::level_q).collect();
        let sizes: Vec<usize> = self.lists().map(RejectionList::len).collect();
        fdr_combine_m(&fdrs, &sizes, big).ok()
    }
}

/// Runs the base test on `data` and on each pseudo-sample of `cfg.scheme`,
/// then aggregates. Pseudo-samples are tested in parallel; results are
/// independent of scheduling.
pub fn run_bagging(data: &TwoGroupDataset, cfg: &BaggingConfig) -> Result<BaggingOutcome> {
    let original = test_dataset_labeled(data, &cfg.test, "original")?;
    let resampler = cfg.scheme.resolve(data.n_x(), data.n_y())?;
    let pseudo = (0..resampler.n_samples(cfg.b))
        .into_par_iter()
        .map(|k| {
            let sample = resampler.indices(k, cfg.master_seed).apply(data);
            test_dataset_labeled(&sample, &cfg.test, format!("pseudo-{}", k + 1))
        })
        .collect::<Result<Vec<_>>>()?;
    let tally = tally_votes(&original, &pseudo)?;
    let final_list = if pseudo.is_empty() {
        RejectionList::new(
            original.n_rows(),
            original.rows().iter().copied(),
            original.level_q(),
            "final",
        )?
    } else {
        let ruled = apply_rule(&tally, &cfg.rule);
        RejectionList::new(
            ruled.n_rows(),
            ruled.rows().iter().copied(),
            cfg.test.level_q(),
            "final",
        )?
    };
    Ok(BaggingOutcome {
        original,
        pseudo,
        tally,
        final_list,
    })
}
