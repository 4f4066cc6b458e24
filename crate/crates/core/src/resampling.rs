//! Balanced pseudo-sample generators.
//!
//! All three schemes resample whole subject columns, and always within a
//! group: a pseudo-sample has a fixed number of control and patient columns
//! and never mixes the two.
//!
//! Randomness comes from ChaCha8 generators. The `k`-th pseudo-sample of a
//! run is drawn from its own generator seeded with
//! [`derive_seed`]`(master_seed, k)`, so outputs do not depend on the order
//! or thread in which samples are produced.

use std::fmt;
use std::ops::Range;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data::TwoGroupDataset;
use crate::error::{Error, Result};

/// Default subsample fraction `a` in `b = round(a n)`.
pub const DEFAULT_RATIO_A: f64 = 0.9;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for stream `index` under `master`:
/// `mix64(master ^ mix64((index + 1) * GOLDEN_GAMMA))` with wrapping arithmetic.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ mix64(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Subsample sizes for random subbagging.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubbagSizes {
    pub b_x: usize,
    pub b_y: usize,
    /// The fraction the sizes were derived from, if any.
    pub ratio_a: Option<f64>,
}

impl SubbagSizes {
    pub fn new(b_x: usize, b_y: usize) -> Self {
        SubbagSizes {
            b_x,
            b_y,
            ratio_a: None,
        }
    }

    /// `b = round(a n)` rounding halves up, then clamped to `[2, n]` so the
    /// subsample still has a within-group variance.
    pub fn from_ratio(n_x: usize, n_y: usize, a: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "subsample ratio a must lie in (0, 1], got {a}"
            )));
        }
        let size = |n: usize| ((a * n as f64 + 0.5).floor() as usize).max(2).min(n);
        Ok(SubbagSizes {
            b_x: size(n_x),
            b_y: size(n_y),
            ratio_a: Some(a),
        })
    }

    pub fn check(&self, n_x: usize, n_y: usize) -> Result<()> {
        if self.b_x == 0 || self.b_x > n_x || self.b_y == 0 || self.b_y > n_y {
            return Err(Error::InvalidParameter(format!(
                "subsample sizes ({}, {}) must lie in [1, n] for n = ({n_x}, {n_y})",
                self.b_x, self.b_y
            )));
        }
        Ok(())
    }
}

/// Consecutive index blocks deleted one at a time by maximum-contrast
/// subbagging.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContrastPlan {
    pub n_x: usize,
    pub n_y: usize,
    pub d_x: usize,
    pub d_y: usize,
    pub blocks_x: Vec<Range<usize>>,
    pub blocks_y: Vec<Range<usize>>,
}

fn consecutive_blocks(n: usize, d: usize) -> Vec<Range<usize>> {
    (0..n.div_ceil(d)).map(|k| k * d..((k + 1) * d).min(n)).collect()
}

/// Splits `0..n_x` and `0..n_y` into blocks of `d_x` and `d_y` consecutive
/// indices; the last block of each group holds the remainder.
pub fn max_contrast_plan(n_x: usize, n_y: usize, d_x: usize, d_y: usize) -> Result<ContrastPlan> {
    for (group, n, d) in [("control", n_x, d_x), ("patient", n_y, d_y)] {
        if d == 0 || d >= n {
            return Err(Error::InvalidParameter(format!(
                "{group} block size d = {d} must satisfy 1 <= d < n = {n}"
            )));
        }
    }
    Ok(ContrastPlan {
        n_x,
        n_y,
        d_x,
        d_y,
        blocks_x: consecutive_blocks(n_x, d_x),
        blocks_y: consecutive_blocks(n_y, d_y),
    })
}

/// Plan from requested block counts: `d = ceil(n / m)`, after which the
/// block count is recomputed as `ceil(n / d)` and may come out below `m`.
pub fn max_contrast_plan_from_counts(n_x: usize, n_y: usize, m_x: usize, m_y: usize) -> Result<ContrastPlan> {
    if m_x < 2 || m_y < 2 {
        return Err(Error::InvalidParameter(format!(
            "block counts must be at least 2, got ({m_x}, {m_y})"
        )));
    }
    max_contrast_plan(n_x, n_y, n_x.div_ceil(m_x), n_y.div_ceil(m_y))
}

impl ContrastPlan {
    pub fn m_x(&self) -> usize {
        self.blocks_x.len()
    }

    pub fn m_y(&self) -> usize {
        self.blocks_y.len()
    }

    /// `B = m_X m_Y`.
    pub fn n_samples(&self) -> usize {
        self.m_x() * self.m_y()
    }

    pub fn retained_x(&self, k1: usize) -> Vec<usize> {
        retained(self.n_x, &self.blocks_x[k1])
    }

    pub fn retained_y(&self, k2: usize) -> Vec<usize> {
        retained(self.n_y, &self.blocks_y[k2])
    }

    /// Row-major position `(k1, k2)` of the `k`-th pseudo-sample.
    pub fn block_pair(&self, k: usize) -> (usize, usize) {
        (k / self.m_y(), k % self.m_y())
    }
}

fn retained(n: usize, deleted: &Range<usize>) -> Vec<usize> {
    (0..n).filter(|i| !deleted.contains(i)).collect()
}

/// Column indices making up one pseudo-sample.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PseudoSampleIndices {
    pub control: Vec<usize>,
    pub patient: Vec<usize>,
}

impl PseudoSampleIndices {
    pub fn apply(&self, data: &TwoGroupDataset) -> TwoGroupDataset {
        data.select_columns(&self.control, &self.patient)
    }
}

fn draw_with_replacement<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

fn draw_subset<R: Rng + ?Sized>(rng: &mut R, n: usize, b: usize) -> Vec<usize> {
    let mut picked = index::sample(rng, n, b).into_vec();
    picked.sort_unstable();
    picked
}

fn bagging_indices<R: Rng + ?Sized>(rng: &mut R, n_x: usize, n_y: usize) -> PseudoSampleIndices {
    let control = draw_with_replacement(rng, n_x);
    let patient = draw_with_replacement(rng, n_y);
    PseudoSampleIndices { control, patient }
}

fn subbag_indices<R: Rng + ?Sized>(
    rng: &mut R,
    n_x: usize,
    n_y: usize,
    sizes: &SubbagSizes,
) -> PseudoSampleIndices {
    let control = draw_subset(rng, n_x, sizes.b_x);
    let patient = draw_subset(rng, n_y, sizes.b_y);
    PseudoSampleIndices { control, patient }
}

/// Bootstrap pseudo-sample: `n_X` control columns drawn uniformly with
/// replacement, then `n_Y` patient columns drawn the same way.
pub fn balanced_bagging_sample<R: Rng + ?Sized>(data: &TwoGroupDataset, rng: &mut R) -> TwoGroupDataset {
    bagging_indices(rng, data.n_x(), data.n_y()).apply(data)
}

/// Subsample of `b_x` distinct control columns and `b_y` distinct patient
/// columns, each in original column order.
pub fn random_subbagging_sample<R: Rng + ?Sized>(
    data: &TwoGroupDataset,
    sizes: &SubbagSizes,
    rng: &mut R,
) -> Result<TwoGroupDataset> {
    sizes.check(data.n_x(), data.n_y())?;
    Ok(subbag_indices(rng, data.n_x(), data.n_y(), sizes).apply(data))
}

/// Pseudo-sample with control block `k1` and patient block `k2` deleted.
pub fn max_contrast_sample(
    data: &TwoGroupDataset,
    plan: &ContrastPlan,
    k1: usize,
    k2: usize,
) -> Result<TwoGroupDataset> {
    if plan.n_x != data.n_x() || plan.n_y != data.n_y() {
        return Err(Error::InvalidParameter(format!(
            "plan built for ({}, {}) columns, dataset has ({}, {})",
            plan.n_x,
            plan.n_y,
            data.n_x(),
            data.n_y()
        )));
    }
    if k1 >= plan.m_x() || k2 >= plan.m_y() {
        return Err(Error::InvalidParameter(format!(
            "block index ({k1}, {k2}) out of range for {} x {} blocks",
            plan.m_x(),
            plan.m_y()
        )));
    }
    Ok(data.select_columns(&plan.retained_x(k1), &plan.retained_y(k2)))
}

/// Which pseudo-sample generator to run, with its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scheme {
    Bagging,
    RandomSubbag(SubbagSpec),
    MaxContrast { d_x: usize, d_y: usize },
}

/// Subsample sizes given directly or as a fraction of each group.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SubbagSpec {
    Ratio(f64),
    Sizes { b_x: usize, b_y: usize },
}

impl Scheme {
    pub fn random_subbag(ratio_a: f64) -> Self {
        Scheme::RandomSubbag(SubbagSpec::Ratio(ratio_a))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Bagging => "bagging",
            Scheme::RandomSubbag(_) => "subbag-random",
            Scheme::MaxContrast { .. } => "max-contrast",
        }
    }

    /// Binds the scheme to group sizes, validating its parameters.
    pub fn resolve(&self, n_x: usize, n_y: usize) -> Result<Resampler> {
        Ok(match *self {
            Scheme::Bagging => Resampler::Bagging { n_x, n_y },
            Scheme::RandomSubbag(spec) => {
                let sizes = match spec {
                    SubbagSpec::Ratio(a) => SubbagSizes::from_ratio(n_x, n_y, a)?,
                    SubbagSpec::Sizes { b_x, b_y } => SubbagSizes::new(b_x, b_y),
                };
                sizes.check(n_x, n_y)?;
                Resampler::RandomSubbag { n_x, n_y, sizes }
            }
            Scheme::MaxContrast { d_x, d_y } => {
                Resampler::MaxContrast(max_contrast_plan(n_x, n_y, d_x, d_y)?)
            }
        })
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Bagging => write!(f, "bagging"),
            Scheme::RandomSubbag(SubbagSpec::Ratio(a)) => write!(f, "subbag-random(a={a})"),
            Scheme::RandomSubbag(SubbagSpec::Sizes { b_x, b_y }) => {
                write!(f, "subbag-random(b_x={b_x},b_y={b_y})")
            }
            Scheme::MaxContrast { d_x, d_y } => write!(f, "max-contrast(d_x={d_x},d_y={d_y})"),
        }
    }
}

/// A scheme bound to concrete group sizes.
#[derive(Clone, Debug, PartialEq)]
pub enum Resampler {
    Bagging {
        n_x: usize,
        n_y: usize,
    },
    RandomSubbag {
        n_x: usize,
        n_y: usize,
        sizes: SubbagSizes,
    },
    MaxContrast(ContrastPlan),
}

impl Resampler {
    /// Number of pseudo-samples produced for a requested count `b`.
    /// Maximum contrast ignores `b` and yields `m_X m_Y` samples.
    pub fn n_samples(&self, b: usize) -> usize {
        match self {
            Resampler::MaxContrast(plan) => plan.n_samples(),
            _ => b,
        }
    }

    /// Column signature of pseudo-sample `k` under `master_seed`.
    pub fn indices(&self, k: usize, master_seed: u64) -> PseudoSampleIndices {
        match self {
            Resampler::Bagging { n_x, n_y } => {
                let mut rng = rng_from_seed(derive_seed(master_seed, k as u64));
                bagging_indices(&mut rng, *n_x, *n_y)
            }
            Resampler::RandomSubbag { n_x, n_y, sizes } => {
                let mut rng = rng_from_seed(derive_seed(master_seed, k as u64));
                subbag_indices(&mut rng, *n_x, *n_y, sizes)
            }
            Resampler::MaxContrast(plan) => {
                let (k1, k2) = plan.block_pair(k);
                PseudoSampleIndices {
                    control: plan.retained_x(k1),
                    patient: plan.retained_y(k2),
                }
            }
        }
    }

    pub fn all_indices(&self, b: usize, master_seed: u64) -> Vec<PseudoSampleIndices> {
        (0..self.n_samples(b))
            .into_par_iter()
            .map(|k| self.indices(k, master_seed))
            .collect()
    }
}

/// Generates the pseudo-datasets for `scheme`. `b` is ignored by maximum
/// contrast, whose samples are enumerated row-major over `(k1, k2)`.
pub fn generate_pseudo_samples(
    data: &TwoGroupDataset,
    scheme: &Scheme,
    b: usize,
    master_seed: u64,
) -> Result<Vec<TwoGroupDataset>> {
    let resampler = scheme.resolve(data.n_x(), data.n_y())?;
    Ok((0..resampler.n_samples(b))
        .into_par_iter()
        .map(|k| resampler.indices(k, master_seed).apply(data))
        .collect())
}
