//! Row-wise two-sample t-tests and the Benjamini–Hochberg step-up rule.

use crate::data::{RejectionList, TwoGroupDataset};
use crate::error::{Error, Result};
use crate::special::beta_reg_with_complement;

/// How the t-statistic's standard error is formed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum VarianceMode {
    /// Common variance in both groups, `df = n_x + n_y - 2`.
    #[default]
    Pooled,
    /// Separate group variances with Welch–Satterthwaite degrees of freedom.
    Welch,
}

impl VarianceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            VarianceMode::Pooled => "pooled",
            VarianceMode::Welch => "welch",
        }
    }
}

/// Configuration of the base testing procedure applied to every dataset
/// and pseudo-dataset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestConfig {
    level_q: f64,
    variance_mode: VarianceMode,
}

impl TestConfig {
    pub fn new(level_q: f64, variance_mode: VarianceMode) -> Result<Self> {
        check_level(level_q)?;
        Ok(TestConfig {
            level_q,
            variance_mode,
        })
    }

    pub fn pooled(level_q: f64) -> Result<Self> {
        Self::new(level_q, VarianceMode::Pooled)
    }

    pub fn level_q(&self) -> f64 {
        self.level_q
    }

    pub fn variance_mode(&self) -> VarianceMode {
        self.variance_mode
    }
}

fn check_level(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "level q must lie in (0, 1), got {q}"
        )))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RowTestResult {
    pub t_stat: f64,
    pub df: f64,
    pub p_value: f64,
}

struct GroupSummary {
    n: f64,
    mean: f64,
    sum_sq: f64,
}

impl GroupSummary {
    fn of(values: &[f64]) -> Self {
        let first = values[0];
        let n = values.len() as f64;
        // Constant samples get an exact mean and zero spread; summing would
        // leave rounding residue and turn a degenerate row into a huge t.
        if values.iter().all(|&v| v == first) {
            return GroupSummary {
                n,
                mean: first,
                sum_sq: 0.0,
            };
        }
        let mean = values.iter().sum::<f64>() / n;
        let sum_sq = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        GroupSummary { n, mean, sum_sq }
    }
}

/// Two-sample t-statistic of `row_y` against `row_x` (positive when the
/// patient mean is larger) with its degrees of freedom and two-sided p-value.
///
/// When the standard error is exactly zero the ratio is resolved by its
/// limit: equal means give `t = 0, p = 1`; different means give
/// `t = ±inf, p = 0`.
pub fn t_statistic(row_x: &[f64], row_y: &[f64], mode: VarianceMode) -> Result<RowTestResult> {
    if row_x.len() < 2 || row_y.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "t-statistic needs at least 2 values per group (got {} and {})",
            row_x.len(),
            row_y.len()
        )));
    }
    Ok(t_statistic_unchecked(row_x, row_y, mode))
}

pub(crate) fn t_statistic_unchecked(row_x: &[f64], row_y: &[f64], mode: VarianceMode) -> RowTestResult {
    let x = GroupSummary::of(row_x);
    let y = GroupSummary::of(row_y);
    let diff = y.mean - x.mean;
    let pooled_df = x.n + y.n - 2.0;

    let (se, df) = match mode {
        VarianceMode::Pooled => {
            let var = (x.sum_sq + y.sum_sq) / pooled_df;
            ((var * (1.0 / x.n + 1.0 / y.n)).sqrt(), pooled_df)
        }
        VarianceMode::Welch => {
            let wx = x.sum_sq / (x.n - 1.0) / x.n;
            let wy = y.sum_sq / (y.n - 1.0) / y.n;
            let se2 = wx + wy;
            let denom = wx * wx / (x.n - 1.0) + wy * wy / (y.n - 1.0);
            // 0/0 when both groups are constant; the p-value does not depend
            // on df in that case.
            let df = if denom > 0.0 { se2 * se2 / denom } else { pooled_df };
            (se2.sqrt(), df)
        }
    };

    if se == 0.0 {
        return if diff == 0.0 {
            RowTestResult {
                t_stat: 0.0,
                df,
                p_value: 1.0,
            }
        } else {
            RowTestResult {
                t_stat: f64::INFINITY.copysign(diff),
                df,
                p_value: 0.0,
            }
        };
    }
    let t_stat = diff / se;
    RowTestResult {
        t_stat,
        df,
        p_value: p_value_unchecked(t_stat, df),
    }
}

/// Two-sided tail probability `2 P(T_df > |t|)` of Student's t.
pub fn p_value_two_sided(t: f64, df: f64) -> Result<f64> {
    if df.is_nan() || df <= 0.0 || df.is_infinite() {
        return Err(Error::InvalidParameter(format!(
            "degrees of freedom must be positive and finite, got {df}"
        )));
    }
    if t.is_nan() {
        return Err(Error::InvalidParameter("t-statistic is NaN".into()));
    }
    Ok(p_value_unchecked(t, df))
}

fn p_value_unchecked(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let t2 = t * t;
    if t2 == 0.0 {
        return 1.0;
    }
    // P(|T| > |t|) = I_{df/(df+t^2)}(df/2, 1/2)
    let denom = df + t2;
    let p = beta_reg_with_complement(0.5 * df, 0.5, df / denom, t2 / denom);
    p.clamp(0.0, 1.0)
}

/// Benjamini–Hochberg step-up at level `q`.
///
/// With p-values sorted ascending, `k*` is the largest `k` such that
/// `p_(k) <= k q / N`; the `k*` smallest p-values are rejected. Ties are
/// ordered by row index, so the result is deterministic.
pub fn bh_reject(p_values: &[f64], q: f64) -> Result<RejectionList> {
    check_level(q)?;
    if let Some((i, p)) = p_values
        .iter()
        .enumerate()
        .find(|(_, p)| !(0.0..=1.0).contains(*p))
    {
        return Err(Error::InvalidParameter(format!(
            "p-value {p} at row {i} lies outside [0, 1]"
        )));
    }
    let n = p_values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]).then(a.cmp(&b)));

    let k_star = order
        .iter()
        .enumerate()
        .rev()
        .find(|&(k, &row)| p_values[row] <= bh_threshold(k + 1, q, n))
        .map_or(0, |(k, _)| k + 1);

    RejectionList::new(n, order[..k_star].iter().copied(), q, "bh")
}

/// Step-up threshold `k q / N` for the `k`-th smallest p-value (1-based).
pub fn bh_threshold(k: usize, q: f64, n: usize) -> f64 {
    k as f64 * q / n as f64
}

/// Per-row test results for every row of `data`.
pub fn row_tests(data: &TwoGroupDataset, mode: VarianceMode) -> Result<Vec<RowTestResult>> {
    data.check_testable()?;
    Ok(data
        .control()
        .rows()
        .zip(data.patient().rows())
        .map(|(x, y)| t_statistic_unchecked(x, y, mode))
        .collect())
}

/// Tests every row and applies BH across rows. The returned list is labelled
/// `"original"`.
pub fn test_dataset(data: &TwoGroupDataset, cfg: &TestConfig) -> Result<RejectionList> {
    test_dataset_labeled(data, cfg, "original")
}

pub fn test_dataset_labeled(
    data: &TwoGroupDataset,
    cfg: &TestConfig,
    label: impl Into<String>,
) -> Result<RejectionList> {
    let p: Vec<f64> = row_tests(data, cfg.variance_mode)?
        .into_iter()
        .map(|r| r.p_value)
        .collect();
    let list = bh_reject(&p, cfg.level_q)?;
    RejectionList::new(list.n_rows(), list.rows().iter().copied(), cfg.level_q, label)
}
