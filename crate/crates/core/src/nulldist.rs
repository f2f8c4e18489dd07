//! Distributions of the ordinal descriptors over uniformly random
//! permutations.
//!
//! Descriptor values over permutations of `0..n` are integers divided by `n`,
//! so both the exact enumeration and the Monte-Carlo sampler reduce their
//! output to a count table indexed by the integer numerator. Moments and
//! histograms are computed from that table, which makes them independent of
//! the order in which values were produced.
//!
//! Monte-Carlo trials are split into fixed chunks of [`CHUNK_TRIALS`]. Chunk
//! `c` draws from ChaCha8 seeded with `seed` on stream `c`, starting from the
//! identity permutation and applying a Fisher-Yates shuffle per trial. The
//! chunk layout does not depend on the number of worker threads, so any
//! degree of parallelism yields the same values in the same order.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::descriptors::{circular_sum_unchecked, correspondence_sum_unchecked};
use crate::error::{Error, Result};
use crate::parallel::install;
use crate::real::{compensated_sum, Real};

/// Largest `n` accepted by exact enumeration (`10! = 3_628_800`).
pub const MAX_EXACT_N: usize = 10;

/// Trials per independently seeded chunk.
pub const CHUNK_TRIALS: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrdinalDescriptor {
    Cid,
    Cod,
}

impl OrdinalDescriptor {
    /// Integer numerator of the descriptor for a full-length `grid_of_rank`.
    pub fn numerator(self, grid_of_rank: &[usize]) -> usize {
        match self {
            OrdinalDescriptor::Cid => circular_sum_unchecked(grid_of_rank),
            OrdinalDescriptor::Cod => correspondence_sum_unchecked(grid_of_rank),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OrdinalDescriptor::Cid => "cid",
            OrdinalDescriptor::Cod => "cod",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullMode {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Binning {
    #[default]
    FreedmanDiaconis,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram<T> {
    /// `counts.len() + 1` edges; the last bin is closed on the right.
    pub edges: Vec<T>,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullDistributionSummary<T> {
    pub n: usize,
    pub descriptor: OrdinalDescriptor,
    pub mode: NullMode,
    pub trials: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub mean: T,
    /// Population standard deviation.
    pub std: T,
    /// Zero when the distribution is degenerate.
    pub skewness: T,
    /// Zero when the distribution is degenerate.
    pub excess_kurtosis: T,
    pub min: T,
    pub max: T,
    pub histogram: Histogram<T>,
}

/// Occurrence counts indexed by descriptor numerator.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Tally {
    n: usize,
    counts: Vec<u64>,
}

impl Tally {
    fn new(n: usize) -> Self {
        // both numerators are bounded by n * (n - 1)
        Self { n, counts: vec![0; n * n.saturating_sub(1) + 1] }
    }

    fn record(&mut self, numerator: usize) {
        self.counts[numerator] += 1;
    }

    fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn support(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(k, &c)| (k, c))
    }

    /// Numerator at order-statistic index `idx` (0-based).
    fn order_statistic(&self, idx: u64) -> usize {
        let mut seen = 0;
        for (k, c) in self.support() {
            seen += c;
            if idx < seen {
                return k;
            }
        }
        unreachable!("index beyond tally total")
    }

    fn summarize<T: Real>(
        &self,
        descriptor: OrdinalDescriptor,
        mode: NullMode,
        seed: Option<u64>,
        binning: Binning,
    ) -> Result<NullDistributionSummary<T>> {
        let trials = self.total();
        let scale = T::from_count(self.n);
        let value = |k: usize| T::from_count(k) / scale;
        let weighted: u128 = self.support().map(|(k, c)| k as u128 * c as u128).sum();
        let mean = T::from_f64_lossy(weighted as f64) / (T::from_f64_lossy(trials as f64) * scale);
        let moment = |p: i32| {
            let s = compensated_sum(self.support().map(|(k, c)| T::from_f64_lossy(c as f64) * (value(k) - mean).powi(p)));
            s / T::from_f64_lossy(trials as f64)
        };
        let m2 = moment(2);
        let (skewness, excess_kurtosis) = if m2 > T::zero() {
            (moment(3) / m2.powf(T::from_f64_lossy(1.5)), moment(4) / (m2 * m2) - T::from_count(3))
        } else {
            (T::zero(), T::zero())
        };
        let kmin = self.support().next().map(|(k, _)| k).expect("non-empty tally");
        let kmax = self.support().last().map(|(k, _)| k).expect("non-empty tally");
        Ok(NullDistributionSummary {
            n: self.n,
            descriptor,
            mode,
            trials,
            seed,
            mean,
            std: m2.sqrt(),
            skewness,
            excess_kurtosis,
            min: value(kmin),
            max: value(kmax),
            histogram: self.histogram(binning)?,
        })
    }

    fn histogram<T: Real>(&self, binning: Binning) -> Result<Histogram<T>> {
        let trials = self.total();
        let kmin = self.support().next().map(|(k, _)| k).expect("non-empty tally");
        let kmax = self.support().last().map(|(k, _)| k).expect("non-empty tally");
        let span = kmax - kmin;
        let bins = match binning {
            Binning::Fixed(0) => return Err(Error::param("bins", "need at least one bin")),
            Binning::Fixed(b) => b,
            Binning::FreedmanDiaconis => {
                let q1 = self.order_statistic((trials - 1) / 4);
                let q3 = self.order_statistic(3 * (trials - 1) / 4);
                let width = 2.0 * (q3 - q1) as f64 / (trials as f64).cbrt();
                if span == 0 || width <= 0.0 {
                    1
                } else {
                    // no point in more bins than distinct lattice values
                    ((span as f64 / width).ceil() as usize).clamp(1, span + 1)
                }
            }
        };
        let scale = T::from_count(self.n);
        let lo = T::from_count(kmin) / scale;
        let hi = T::from_count(kmax) / scale;
        let edges = (0..=bins).map(|i| lo + (hi - lo) * T::from_count(i) / T::from_count(bins)).collect();
        let mut counts = vec![0u64; bins];
        for (k, c) in self.support() {
            let b = ((k - kmin) * bins).checked_div(span).map_or(0, |b| b.min(bins - 1));
            counts[b] += c;
        }
        Ok(Histogram { edges, counts })
    }
}

/// Visits every permutation of `0..n` once (Heap's algorithm).
fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Exact distribution over all `n!` permutations.
pub fn enumerate_null_exact<T: Real>(n: usize, descriptor: OrdinalDescriptor) -> Result<NullDistributionSummary<T>> {
    enumerate_null_exact_with(n, descriptor, Binning::default())
}

pub fn enumerate_null_exact_with<T: Real>(
    n: usize,
    descriptor: OrdinalDescriptor,
    binning: Binning,
) -> Result<NullDistributionSummary<T>> {
    if !(2..=MAX_EXACT_N).contains(&n) {
        return Err(Error::param("n", format!("exact enumeration needs 2 <= n <= {MAX_EXACT_N}, got {n}")));
    }
    let mut tally = Tally::new(n);
    for_each_permutation(n, |p| tally.record(descriptor.numerator(p)));
    tally.summarize(descriptor, NullMode::Exact, None, binning)
}

/// Parameters of a Monte-Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloConfig {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the global rayon pool. Does not affect output.
    pub threads: Option<usize>,
}

impl MonteCarloConfig {
    pub fn new(n: usize, trials: u64, seed: u64) -> Self {
        Self { n, trials, seed, threads: None }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::param("n", format!("need n >= 2, got {}", self.n)));
        }
        if self.trials == 0 {
            return Err(Error::param("trials", "need at least one trial"));
        }
        if self.threads == Some(0) {
            return Err(Error::param("threads", "need at least one thread"));
        }
        Ok(())
    }
}

/// Summary plus the sampled values in trial order.
#[derive(Debug, Clone, PartialEq)]
pub struct NullSample<T> {
    pub summary: NullDistributionSummary<T>,
    pub values: Vec<T>,
}

fn sample_chunk(n: usize, seed: u64, chunk: u64, trials: u64, descriptor: OrdinalDescriptor) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut perm: Vec<usize> = (0..n).collect();
    (0..trials)
        .map(|_| {
            perm.shuffle(&mut rng);
            descriptor.numerator(&perm) as u32
        })
        .collect()
}

fn sample_numerators(cfg: &MonteCarloConfig, descriptor: OrdinalDescriptor) -> Result<Vec<u32>> {
    cfg.validate()?;
    let chunks = cfg.trials.div_ceil(CHUNK_TRIALS);
    let run = || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let len = CHUNK_TRIALS.min(cfg.trials - c * CHUNK_TRIALS);
                sample_chunk(cfg.n, cfg.seed, c, len, descriptor)
            })
            .collect::<Vec<_>>()
            .concat()
    };
    install(cfg.threads, run)
}

/// Monte-Carlo estimate of the null distribution, reproducible from
/// `(n, trials, seed, descriptor)`.
pub fn sample_null<T: Real>(
    n: usize,
    trials: u64,
    seed: u64,
    descriptor: OrdinalDescriptor,
) -> Result<NullDistributionSummary<T>> {
    Ok(sample_null_with(&MonteCarloConfig::new(n, trials, seed), descriptor, Binning::default())?.summary)
}

pub fn sample_null_with<T: Real>(
    cfg: &MonteCarloConfig,
    descriptor: OrdinalDescriptor,
    binning: Binning,
) -> Result<NullSample<T>> {
    let numerators = sample_numerators(cfg, descriptor)?;
    let mut tally = Tally::new(cfg.n);
    for &k in &numerators {
        tally.record(k as usize);
    }
    let summary = tally.summarize(descriptor, NullMode::MonteCarlo, Some(cfg.seed), binning)?;
    let scale = T::from_count(cfg.n);
    let values = numerators.into_iter().map(|k| T::from_count(k as usize) / scale).collect();
    Ok(NullSample { summary, values })
}

/// One quantile-quantile pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QqPoint<T> {
    /// Plotting position `(i + 0.5) / len`.
    pub probability: T,
    pub empirical: T,
    /// Quantile of the normal with the sample mean and standard deviation.
    pub normal: T,
}

pub const MIN_QQ_SAMPLES: usize = 100;

/// Sorted samples against the quantiles of a moment-matched normal.
pub fn qq_points<T: Real>(samples: &[T]) -> Result<Vec<QqPoint<T>>> {
    if samples.len() < MIN_QQ_SAMPLES {
        return Err(Error::param(
            "samples",
            format!("need at least {MIN_QQ_SAMPLES} samples, got {}", samples.len()),
        ));
    }
    if let Some(index) = samples.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let len = T::from_count(samples.len());
    let mean = compensated_sum(samples.iter().copied()) / len;
    let var = compensated_sum(samples.iter().map(|&x| (x - mean) * (x - mean))) / len;
    if var <= T::zero() {
        return Err(Error::DegenerateSamples);
    }
    let std = var.sqrt();
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let standard = Normal::standard();
    let count = samples.len() as f64;
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, empirical)| {
            let p = (i as f64 + 0.5) / count;
            QqPoint {
                probability: T::from_f64_lossy(p),
                empirical,
                normal: mean + std * T::from_f64_lossy(standard.inverse_cdf(p)),
            }
        })
        .collect())
}

/// Largest `|empirical - normal|` among points whose probability lies in the
/// central `coverage` mass, e.g. `0.99` for `[0.005, 0.995]`.
pub fn max_qq_deviation<T: Real>(points: &[QqPoint<T>], coverage: T) -> T {
    let tail = (T::one() - coverage) / T::from_count(2);
    points
        .iter()
        .filter(|p| p.probability >= tail && p.probability <= T::one() - tail)
        .map(|p| num_traits::Float::abs(p.empirical - p.normal))
        .fold(T::zero(), |acc, d| acc.max(d))
}
