//! Voting aggregation of rejection lists and FDR arithmetic for unions of
//! lists.

use std::collections::BTreeSet;
use std::fmt;

use crate::data::{RejectionList, VoteTally};
use crate::error::{Error, Result};

/// Which vote count a rule thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleKind {
    /// `V(i) >= h`; with `h = 1` this is the plain union.
    Union,
    /// `V(i) >= h` with `h = 2` by default: a vote must be seconded.
    SecondVote,
    /// `V*(i) >= h`, the original list voting twice.
    WeightedSecondVote,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AggregationRule {
    kind: RuleKind,
    threshold_h: u32,
}

impl AggregationRule {
    /// Rule (i): at least one vote.
    pub const UNION: AggregationRule = AggregationRule {
        kind: RuleKind::Union,
        threshold_h: 1,
    };
    /// Rule (ii): at least two votes.
    pub const SECOND_VOTE: AggregationRule = AggregationRule {
        kind: RuleKind::SecondVote,
        threshold_h: 2,
    };
    /// Rule (ii*): at least two weighted votes.
    pub const WEIGHTED_SECOND_VOTE: AggregationRule = AggregationRule {
        kind: RuleKind::WeightedSecondVote,
        threshold_h: 2,
    };

    /// A rule of the given kind with a custom threshold.
    pub fn with_threshold(kind: RuleKind, threshold_h: u32) -> Result<Self> {
        if threshold_h == 0 {
            return Err(Error::InvalidParameter("vote threshold h must be >= 1".into()));
        }
        Ok(AggregationRule { kind, threshold_h })
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn threshold_h(&self) -> u32 {
        self.threshold_h
    }

    pub fn is_weighted(&self) -> bool {
        self.kind == RuleKind::WeightedSecondVote
    }

    /// Short name as used on the command line: `i`, `ii`, `ii-star`, with
    /// `@h` appended for non-default thresholds.
    pub fn name(&self) -> String {
        let (base, default_h) = match self.kind {
            RuleKind::Union => ("i", 1),
            RuleKind::SecondVote => ("ii", 2),
            RuleKind::WeightedSecondVote => ("ii-star", 2),
        };
        if self.threshold_h == default_h {
            base.to_owned()
        } else {
            format!("{base}@{}", self.threshold_h)
        }
    }
}

impl fmt::Display for AggregationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn check_family<'a>(
    original: &RejectionList,
    pseudo: impl IntoIterator<Item = &'a RejectionList>,
) -> Result<()> {
    pseudo.into_iter().try_for_each(|l| original.check_same_rows(l))
}

/// Union of the original list with every pseudo-sample list.
pub fn union_aggregate(original: &RejectionList, pseudo: &[RejectionList]) -> Result<RejectionList> {
    check_family(original, pseudo)?;
    let mut rows = original.rows().clone();
    for list in pseudo {
        rows.extend(list.rows().iter().copied());
    }
    RejectionList::new(original.n_rows(), rows, original.level_q(), "union")
}

/// Per-row votes from `original` and `pseudo`; `V*` adds a second vote from
/// the original list.
pub fn tally_votes(original: &RejectionList, pseudo: &[RejectionList]) -> Result<VoteTally> {
    check_family(original, pseudo)?;
    let n = original.n_rows();
    let mut votes = vec![0u32; n];
    for list in std::iter::once(original).chain(pseudo) {
        for &row in list.rows() {
            votes[row] += 1;
        }
    }
    let mut weighted = votes.clone();
    for &row in original.rows() {
        weighted[row] += 1;
    }
    Ok(VoteTally::from_parts(votes, weighted, pseudo.len() + 1))
}

/// Rows whose (weighted, for rule ii*) vote count reaches the rule's
/// threshold.
pub fn apply_rule(tally: &VoteTally, rule: &AggregationRule) -> RejectionList {
    let counts = if rule.is_weighted() {
        tally.weighted_votes()
    } else {
        tally.votes()
    };
    let rows = counts
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v >= rule.threshold_h)
        .map(|(i, _)| i);
    RejectionList::new(tally.n_rows(), rows, 1.0, format!("rule-{}", rule.name()))
        .expect("tally rows are in range")
}

/// `N(h)`, the number of rows with at least `h` votes, for
/// `h = 1 ..= n_voters` (one more step when `starred`, using `V*`).
pub fn vote_curve(tally: &VoteTally, starred: bool) -> Vec<(u32, usize)> {
    let (counts, max_h) = if starred {
        (tally.weighted_votes(), tally.n_voters() + 1)
    } else {
        (tally.votes(), tally.n_voters())
    };
    // histogram, then cumulative from the top
    let mut hist = vec![0usize; max_h + 2];
    for &v in counts {
        hist[(v as usize).min(max_h + 1)] += 1;
    }
    let mut out = Vec::with_capacity(max_h);
    let mut at_least = hist[max_h + 1];
    for h in (1..=max_h).rev() {
        at_least += hist[h];
        out.push((h as u32, at_least));
    }
    out.reverse();
    out
}

/// Estimated FDR of `LIST_1 ∪ LIST_2` from the lists' FDRs, sizes and
/// overlap, assuming rows found by both lists are truly non-null:
///
/// `(fdr1 size1 + fdr2 size2) / (size1 + size2 - overlap)`.
pub fn fdr_combine_two(fdr1: f64, size1: usize, fdr2: f64, size2: usize, overlap: usize) -> Result<f64> {
    if overlap > size1.min(size2) {
        return Err(Error::InvalidParameter(format!(
            "overlap {overlap} exceeds the smaller list size {}",
            size1.min(size2)
        )));
    }
    let union = size1 + size2 - overlap;
    if union == 0 {
        return Err(Error::InvalidParameter("combined list is empty".into()));
    }
    check_fdr(fdr1)?;
    check_fdr(fdr2)?;
    Ok((fdr1 * size1 as f64 + fdr2 * size2 as f64) / union as f64)
}

fn check_fdr(fdr: f64) -> Result<()> {
    if (0.0..=1.0).contains(&fdr) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "FDR must lie in [0, 1], got {fdr}"
        )))
    }
}

/// Inputs and result of combining `M` lists' FDRs into an estimate for
/// their union. `fdr_big` is an estimate under the assumption that rows
/// found by two or more lists are truly non-null.
#[derive(Clone, Debug, PartialEq)]
pub struct FdrCombinationReport {
    pub per_list_fdr: Vec<f64>,
    pub per_list_size: Vec<usize>,
    pub big_list_size: usize,
    pub fdr_big: f64,
}

/// `FDR_BIG = Σ fdr_i size_i / big_size`.
pub fn fdr_combine_m(fdrs: &[f64], sizes: &[usize], big_size: usize) -> Result<FdrCombinationReport> {
    if fdrs.len() != sizes.len() {
        return Err(Error::InvalidParameter(format!(
            "{} FDR values for {} list sizes",
            fdrs.len(),
            sizes.len()
        )));
    }
    if fdrs.is_empty() {
        return Err(Error::InvalidParameter("need at least one list".into()));
    }
    if big_size == 0 {
        return Err(Error::InvalidParameter("union size must be positive".into()));
    }
    let total: usize = sizes.iter().sum();
    if big_size > total {
        return Err(Error::InvalidParameter(format!(
            "union size {big_size} exceeds the summed list sizes {total}"
        )));
    }
    fdrs.iter().try_for_each(|&f| check_fdr(f))?;
    let false_total: f64 = fdrs.iter().zip(sizes).map(|(f, &s)| f * s as f64).sum();
    Ok(FdrCombinationReport {
        per_list_fdr: fdrs.to_vec(),
        per_list_size: sizes.to_vec(),
        big_list_size: big_size,
        fdr_big: false_total / big_size as f64,
    })
}

/// Largest family accepted by [`union_size_ie`]; the sum has `2^M - 1` terms.
pub const MAX_IE_LISTS: usize = 24;

/// Size of the union of `lists` by inclusion–exclusion over every
/// non-empty sub-family:
/// `Σ_S (-1)^{|S|-1} |∩_{i∈S} LIST_i|`.
pub fn union_size_ie(lists: &[RejectionList]) -> Result<usize> {
    let (first, rest) = lists
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("need at least one list".into()))?;
    check_family(first, rest)?;
    if lists.len() > MAX_IE_LISTS {
        return Err(Error::InvalidParameter(format!(
            "inclusion-exclusion over {} lists exceeds the limit of {MAX_IE_LISTS}",
            lists.len()
        )));
    }
    let m = lists.len();
    let mut total: i64 = 0;
    for mask in 1u32..(1 << m) {
        let members: Vec<&RejectionList> = (0..m)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| &lists[i])
            .collect();
        let smallest = members.iter().min_by_key(|l| l.len()).expect("non-empty");
        let inter = smallest
            .rows()
            .iter()
            .filter(|r| members.iter().all(|l| l.contains(**r)))
            .count() as i64;
        if mask.count_ones() % 2 == 1 {
            total += inter;
        } else {
            total -= inter;
        }
    }
    Ok(total as usize)
}

/// Direct union cardinality.
pub fn union_size(lists: &[RejectionList]) -> usize {
    lists
        .iter()
        .flat_map(|l| l.rows().iter().copied())
        .collect::<BTreeSet<_>>()
        .len()
}
