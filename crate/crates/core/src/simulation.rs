//! Synthetic two-group data under the normal model and Monte Carlo
//! measurement of discovery power and false discovery proportion.
//!
//! Row `k` of the control group is drawn i.i.d. `N(mu_k, sigma^2)` and row
//! `k` of the patient group i.i.d. `N(nu_k, sigma^2)`. The first
//! `n_rows - n_null` rows are non-null with `mu_k = 0` and
//! `nu_k = delta_k * sigma`; the rest have `mu_k = nu_k = 0`. Normal variates
//! come from the ziggurat sampler of `rand_distr` driven by ChaCha8.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::aggregation::AggregationRule;
use crate::bagging::{run_bagging, BaggingConfig};
use crate::data::{truelist_overlap, Matrix, RejectionList, TwoGroupDataset};
use crate::error::{Error, Result};
use crate::resampling::{derive_seed, rng_from_seed, Scheme};
use crate::testing::{TestConfig, VarianceMode};

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationDesign {
    pub n_rows: usize,
    pub n_null: usize,
    pub n_x: usize,
    pub n_y: usize,
    /// Common mean shift of non-null rows, in units of `sigma`.
    pub effect_delta: f64,
    /// Optional per-row shifts for the non-null rows, overriding
    /// `effect_delta`. Length must be `n_rows - n_null`.
    pub effects: Option<Vec<f64>>,
    pub sigma: f64,
    pub scheme: Scheme,
    pub b: usize,
    pub level_q: f64,
    pub variance_mode: VarianceMode,
    pub rule: AggregationRule,
    pub replicates: usize,
    pub master_seed: u64,
}

impl SimulationDesign {
    /// Reference design used to check the power gain of union-rule bagging:
    /// 1000 rows of which 100 non-null with a one-sigma shift, ten subjects
    /// per group, `q = 0.05`, `B = 50`, 200 replicates, seed 42.
    pub fn reference() -> Self {
        SimulationDesign {
            n_rows: 1000,
            n_null: 900,
            n_x: 10,
            n_y: 10,
            effect_delta: 1.0,
            effects: None,
            sigma: 1.0,
            scheme: Scheme::Bagging,
            b: 50,
            level_q: 0.05,
            variance_mode: VarianceMode::Pooled,
            rule: AggregationRule::UNION,
            replicates: 200,
            master_seed: 42,
        }
    }

    pub fn n_non_null(&self) -> usize {
        self.n_rows - self.n_null
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n_rows == 0 {
            return bad("n_rows must be positive".into());
        }
        if self.n_null > self.n_rows {
            return bad(format!("n_null {} exceeds n_rows {}", self.n_null, self.n_rows));
        }
        if self.n_x < 2 || self.n_y < 2 {
            return bad(format!(
                "group sizes must be >= 2, got ({}, {})",
                self.n_x, self.n_y
            ));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma must be positive, got {}", self.sigma));
        }
        if !self.effect_delta.is_finite() {
            return bad("effect_delta must be finite".into());
        }
        if self.replicates == 0 {
            return bad("replicates must be >= 1".into());
        }
        if let Some(effects) = &self.effects {
            if effects.len() != self.n_non_null() {
                return bad(format!(
                    "{} per-row effects for {} non-null rows",
                    effects.len(),
                    self.n_non_null()
                ));
            }
        }
        self.test_config()?;
        self.scheme.resolve(self.n_x, self.n_y)?;
        Ok(())
    }

    pub fn test_config(&self) -> Result<TestConfig> {
        TestConfig::new(self.level_q, self.variance_mode)
    }

    fn shift(&self, row: usize) -> f64 {
        if row >= self.n_non_null() {
            return 0.0;
        }
        let delta = self.effects.as_ref().map_or(self.effect_delta, |e| e[row]);
        delta * self.sigma
    }
}

/// Draws one dataset and its truth list. Each row's control values are
/// drawn before its patient values.
pub fn generate_dataset<R: Rng + ?Sized>(
    design: &SimulationDesign,
    rng: &mut R,
) -> Result<(TwoGroupDataset, RejectionList)> {
    design.validate()?;
    let n = design.n_rows;
    let mut control = Vec::with_capacity(n * design.n_x);
    let mut patient = Vec::with_capacity(n * design.n_y);
    for row in 0..n {
        for _ in 0..design.n_x {
            let z: f64 = StandardNormal.sample(rng);
            control.push(design.sigma * z);
        }
        let shift = design.shift(row);
        for _ in 0..design.n_y {
            let z: f64 = StandardNormal.sample(rng);
            patient.push(shift + design.sigma * z);
        }
    }
    let data = TwoGroupDataset::with_default_ids(
        Matrix::from_row_major(n, design.n_x, control)?,
        Matrix::from_row_major(n, design.n_y, patient)?,
    )?;
    let truth = RejectionList::truth(n, 0..design.n_non_null())?;
    Ok((data, truth))
}

/// Achieved discovery power `#(LIST ∩ TRUELIST) / #TRUELIST`; 0 when the
/// truth list is empty.
pub fn adp(list: &RejectionList, truth: &RejectionList) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    let (hits, _) = truelist_overlap(list, truth).expect("lists index the same rows");
    hits as f64 / truth.len() as f64
}

/// Achieved false discovery proportion `#(LIST \ TRUELIST) / #LIST`; 0 for
/// an empty list.
pub fn afdr(list: &RejectionList, truth: &RejectionList) -> f64 {
    if list.is_empty() {
        return 0.0;
    }
    let (_, misses) = truelist_overlap(list, truth).expect("lists index the same rows");
    misses as f64 / list.len() as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReplicateOutcome {
    pub adp_plain: f64,
    pub adp_agg: f64,
    pub afdr_plain: f64,
    pub afdr_agg: f64,
    pub size_plain: usize,
    pub size_agg: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ListSizeStats {
    pub mean_plain: f64,
    pub mean_agg: f64,
    pub min_plain: usize,
    pub max_plain: usize,
    pub min_agg: usize,
    pub max_agg: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerReport {
    pub mean_adp_plain: f64,
    pub mean_adp_agg: f64,
    pub mean_afdr_plain: f64,
    pub mean_afdr_agg: f64,
    /// False when the design has no non-null rows; ADP is then reported as 0
    /// by convention.
    pub adp_defined: bool,
    /// Pseudo-samples per replicate after the scheme resolved `B`.
    pub n_pseudo: usize,
    pub per_replicate: Vec<ReplicateOutcome>,
    pub list_size_stats: ListSizeStats,
}

/// Mean and standard error of the mean of `values` (SE is 0 for fewer than
/// two values).
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

impl PowerReport {
    fn column(&self, f: impl Fn(&ReplicateOutcome) -> f64) -> Vec<f64> {
        self.per_replicate.iter().map(f).collect()
    }

    pub fn adp_plain_values(&self) -> Vec<f64> {
        self.column(|r| r.adp_plain)
    }

    pub fn adp_agg_values(&self) -> Vec<f64> {
        self.column(|r| r.adp_agg)
    }

    pub fn afdr_plain_values(&self) -> Vec<f64> {
        self.column(|r| r.afdr_plain)
    }

    pub fn afdr_agg_values(&self) -> Vec<f64> {
        self.column(|r| r.afdr_agg)
    }

    /// Mean and SE of the per-replicate gain `adp_agg - adp_plain`.
    pub fn adp_gain(&self) -> (f64, f64) {
        mean_and_se(&self.column(|r| r.adp_agg - r.adp_plain))
    }
}

fn summarize(per_replicate: Vec<ReplicateOutcome>, adp_defined: bool, n_pseudo: usize) -> PowerReport {
    let n = per_replicate.len() as f64;
    let mean = |f: &dyn Fn(&ReplicateOutcome) -> f64| per_replicate.iter().map(f).sum::<f64>() / n;
    let sizes_plain = per_replicate.iter().map(|r| r.size_plain);
    let sizes_agg = per_replicate.iter().map(|r| r.size_agg);
    let list_size_stats = ListSizeStats {
        mean_plain: mean(&|r| r.size_plain as f64),
        mean_agg: mean(&|r| r.size_agg as f64),
        min_plain: sizes_plain.clone().min().unwrap_or(0),
        max_plain: sizes_plain.max().unwrap_or(0),
        min_agg: sizes_agg.clone().min().unwrap_or(0),
        max_agg: sizes_agg.max().unwrap_or(0),
    };
    PowerReport {
        mean_adp_plain: mean(&|r| r.adp_plain),
        mean_adp_agg: mean(&|r| r.adp_agg),
        mean_afdr_plain: mean(&|r| r.afdr_plain),
        mean_afdr_agg: mean(&|r| r.afdr_agg),
        adp_defined,
        n_pseudo,
        list_size_stats,
        per_replicate,
    }
}

/// Seeds for replicate `r`: one stream for the data, one for resampling.
fn replicate_seeds(master: u64, r: usize) -> (u64, u64) {
    let base = derive_seed(master, r as u64);
    (derive_seed(base, 0), derive_seed(base, 1))
}

fn run_replicate(design: &SimulationDesign, r: usize) -> Result<ReplicateOutcome> {
    let (data_seed, resample_seed) = replicate_seeds(design.master_seed, r);
    let (data, truth) = generate_dataset(design, &mut rng_from_seed(data_seed))?;
    let cfg = BaggingConfig {
        test: design.test_config()?,
        scheme: design.scheme,
        b: design.b,
        rule: design.rule,
        master_seed: resample_seed,
    };
    let outcome = run_bagging(&data, &cfg)?;
    let plain = &outcome.original;
    let agg = &outcome.final_list;
    Ok(ReplicateOutcome {
        adp_plain: adp(plain, &truth),
        adp_agg: adp(agg, &truth),
        afdr_plain: afdr(plain, &truth),
        afdr_agg: afdr(agg, &truth),
        size_plain: plain.len(),
        size_agg: agg.len(),
    })
}

/// Monte Carlo study of plain versus aggregated testing. Replicate `r` draws
/// its data and pseudo-samples from seeds derived from
/// `(master_seed, r)`, so designs differing only in scheme or rule see the
/// same datasets.
pub fn run_power_study(design: &SimulationDesign) -> Result<PowerReport> {
    design.validate()?;
    let per_replicate = (0..design.replicates)
        .into_par_iter()
        .map(|r| run_replicate(design, r))
        .collect::<Result<Vec<_>>>()?;
    let n_pseudo = design.scheme.resolve(design.n_x, design.n_y)?.n_samples(design.b);
    Ok(summarize(per_replicate, design.n_non_null() > 0, n_pseudo))
}
