//! Wilcoxon rank-sum (Mann-Whitney U) comparisons between groups of
//! descriptor values.
//!
//! Small tie-free samples (`n1 + n2 <= EXACT_MAX_TOTAL`) get the exact null
//! distribution of U. Everything else uses the normal approximation with
//! midranks, the tie-corrected variance and a 0.5 continuity correction. All
//! p-values are two-sided.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::descriptors::{DescriptorSet, Metric};
use crate::error::{Error, Result};
use crate::real::Real;

/// Largest combined sample size that uses the exact distribution.
pub const EXACT_MAX_TOTAL: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankSumMethod {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankSumResult {
    /// U of the first sample: its rank sum minus `n1 (n1 + 1) / 2`.
    pub u_statistic: f64,
    pub p_two_sided: f64,
    pub method: RankSumMethod,
    pub n1: usize,
    pub n2: usize,
}

/// Midranks of `values` (1-based) and the sizes of all tie groups.
fn midranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j (0-based) share the mean of ranks i+1..=j
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    (ranks, ties)
}

/// Number of ways each U value in `0..=n1*n2` arises when `n1` of
/// `n1 + n2` distinct ranks are assigned to the first sample.
fn exact_u_counts(n1: usize, n2: usize) -> Vec<u128> {
    let n = n1 + n2;
    let max_sum = n * (n + 1) / 2;
    // ways[j][s]: subsets of size j drawn from the ranks seen so far with rank sum s
    let mut ways = vec![vec![0u128; max_sum + 1]; n1 + 1];
    ways[0][0] = 1;
    for rank in 1..=n {
        for j in (1..=n1.min(rank)).rev() {
            for s in (rank..=max_sum).rev() {
                ways[j][s] += ways[j - 1][s - rank];
            }
        }
    }
    let offset = n1 * (n1 + 1) / 2;
    (0..=n1 * n2).map(|u| ways[n1][u + offset]).collect()
}

fn exact_p(u: usize, n1: usize, n2: usize) -> f64 {
    let counts = exact_u_counts(n1, n2);
    let total: u128 = counts.iter().sum();
    let lower: u128 = counts[..=u].iter().sum();
    let upper: u128 = counts[u..].iter().sum();
    (2.0 * lower.min(upper) as f64 / total as f64).min(1.0)
}

fn normal_p(u: f64, n1: usize, n2: usize, ties: &[usize]) -> f64 {
    let (a, b) = (n1 as f64, n2 as f64);
    let n = a + b;
    let mean = a * b / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (n * (n - 1.0));
    let var = a * b / 12.0 * ((n + 1.0) - tie_term);
    if var <= 0.0 {
        // every observation tied: no evidence either way
        return 1.0;
    }
    let z = ((u - mean).abs() - 0.5) / var.sqrt();
    if z <= 0.0 {
        return 1.0;
    }
    (2.0 * Normal::standard().sf(z)).min(1.0)
}

struct RankSumInputs {
    u: f64,
    n1: usize,
    n2: usize,
    ties: Vec<usize>,
}

fn rank_sum_inputs<T: Real>(x: &[T], y: &[T]) -> Result<RankSumInputs> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::param("groups", "both samples must be non-empty"));
    }
    let joined: Vec<f64> = x.iter().chain(y).map(|v| v.to_f64_lossy()).collect();
    if let Some(index) = joined.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let (n1, n2) = (x.len(), y.len());
    let (ranks, ties) = midranks(&joined);
    let rank_sum: f64 = ranks[..n1].iter().sum();
    let u = rank_sum - (n1 * (n1 + 1)) as f64 / 2.0;
    Ok(RankSumInputs { u, n1, n2, ties })
}

fn finish(r: RankSumInputs, method: RankSumMethod) -> RankSumResult {
    let p = match method {
        // tie-free ranks are integers, so u is integral
        RankSumMethod::Exact => exact_p(r.u.round() as usize, r.n1, r.n2),
        RankSumMethod::NormalApprox => normal_p(r.u, r.n1, r.n2, &r.ties),
    };
    RankSumResult { u_statistic: r.u, p_two_sided: p, method, n1: r.n1, n2: r.n2 }
}

/// Two-sided rank-sum test of `x` against `y`, choosing the exact
/// distribution when the samples are small and tie-free.
pub fn wilcoxon_rank_sum<T: Real>(x: &[T], y: &[T]) -> Result<RankSumResult> {
    let r = rank_sum_inputs(x, y)?;
    let method = if r.n1 + r.n2 <= EXACT_MAX_TOTAL && r.ties.is_empty() {
        RankSumMethod::Exact
    } else {
        RankSumMethod::NormalApprox
    };
    Ok(finish(r, method))
}

/// Rank-sum test with a caller-chosen method. The exact method requires
/// tie-free samples with `n1 + n2 <= 64`.
pub fn wilcoxon_rank_sum_with<T: Real>(x: &[T], y: &[T], method: RankSumMethod) -> Result<RankSumResult> {
    let r = rank_sum_inputs(x, y)?;
    if method == RankSumMethod::Exact {
        if !r.ties.is_empty() {
            return Err(Error::param("method", "exact p-values need tie-free samples"));
        }
        if r.n1 + r.n2 > 64 {
            return Err(Error::param("method", format!("exact p-values need n1 + n2 <= 64, got {}", r.n1 + r.n2)));
        }
    }
    Ok(finish(r, method))
}

/// A named collection of analysis results.
#[derive(Debug, Clone, PartialEq)]
pub struct Group<T> {
    pub name: String,
    pub members: Vec<DescriptorSet<T>>,
}

impl<T> Group<T> {
    pub fn new(name: impl Into<String>, members: Vec<DescriptorSet<T>>) -> Self {
        Self { name: name.into(), members }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub name: String,
    pub size: usize,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseComparison {
    pub first: String,
    pub second: String,
    pub result: RankSumResult,
}

/// Pairwise rank-sum results for one metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseTable {
    pub metric: Metric,
    pub groups: Vec<GroupSummary>,
    /// One entry per unordered pair `(i, j)`, `i < j`, in row-major order.
    pub pairs: Vec<PairwiseComparison>,
}

impl PairwiseTable {
    /// Symmetric p-value matrix; the diagonal is 1.
    pub fn p_matrix(&self) -> Vec<Vec<f64>> {
        let k = self.groups.len();
        let mut m = vec![vec![1.0; k]; k];
        let cells = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j)));
        for ((i, j), pair) in cells.zip(&self.pairs) {
            m[i][j] = pair.result.p_two_sided;
            m[j][i] = pair.result.p_two_sided;
        }
        m
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let mid = values.len() / 2;
    if values.len().is_multiple_of(2) {
        (values[mid - 1] + values[mid]) / 2.0
    } else {
        values[mid]
    }
}

/// Compares every pair of groups on `metric`.
pub fn group_compare<T: Real>(groups: &[Group<T>], metric: Metric) -> Result<PairwiseTable> {
    if groups.len() < 2 {
        return Err(Error::param("groups", format!("need at least 2 groups, got {}", groups.len())));
    }
    let columns: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| {
            if g.members.len() < 2 {
                return Err(Error::param(
                    "groups",
                    format!("group `{}` needs at least 2 values, has {}", g.name, g.members.len()),
                ));
            }
            Ok(g.members.iter().map(|d| d.metric(metric).to_f64_lossy()).collect())
        })
        .collect::<Result<_>>()?;
    let summaries = groups
        .iter()
        .zip(&columns)
        .map(|(g, col)| GroupSummary { name: g.name.clone(), size: col.len(), median: median(&mut col.clone()) })
        .collect();
    let mut pairs = Vec::new();
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            pairs.push(PairwiseComparison {
                first: groups[i].name.clone(),
                second: groups[j].name.clone(),
                result: wilcoxon_rank_sum(&columns[i], &columns[j])?,
            });
        }
    }
    Ok(PairwiseTable { metric, groups: summaries, pairs })
}
