//! Ordinal descriptors of a rank permutation and the rank distance matrix.
//!
//! With `g = grid_of_rank` (0-based) and a prefix length `L`:
//!
//! * circular difference: `(|g[L-1] - g[0]| + sum_{i<L-1} |g[i] - g[i+1]|) / L`
//! * correspondence difference: `sum_{i<L} |g[i] - i| / L`
//!
//! Both numerators are integers. They are exposed separately so exact
//! enumeration code can work without rounding. Under truncation the rank
//! labels `i` still run over `0..L` while `g[i]` ranges over the whole grid,
//! and the circular closing term links the last retained rank to the first.

use nalgebra::{DMatrix, RealField, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ranking::{rank_spectrum_with, truncate_by_energy, RankDirection, RankPermutation};
use crate::real::Real;
use crate::spectrum::{power_spectrum, spectral_entropy_with_base, LogBase, PowerSpectrum, Signal};

fn check_prefix(perm: &RankPermutation, len: usize) -> Result<()> {
    if len == 0 || len > perm.n() {
        return Err(Error::param("L", format!("must lie in 1..={}, got {len}", perm.n())));
    }
    Ok(())
}

#[inline]
fn abs_diff(a: usize, b: usize) -> usize {
    a.abs_diff(b)
}

/// Integer numerator of the circular difference over ranks `0..len`.
pub fn circular_difference_sum(perm: &RankPermutation, len: usize) -> Result<usize> {
    check_prefix(perm, len)?;
    Ok(circular_sum_unchecked(&perm.grid_of_rank()[..len]))
}

/// Integer numerator of the correspondence difference over ranks `0..len`.
pub fn correspondence_difference_sum(perm: &RankPermutation, len: usize) -> Result<usize> {
    check_prefix(perm, len)?;
    Ok(correspondence_sum_unchecked(&perm.grid_of_rank()[..len]))
}

pub(crate) fn circular_sum_unchecked(g: &[usize]) -> usize {
    let adjacent: usize = g.windows(2).map(|w| abs_diff(w[0], w[1])).sum();
    adjacent + abs_diff(g[g.len() - 1], g[0])
}

pub(crate) fn correspondence_sum_unchecked(g: &[usize]) -> usize {
    g.iter().enumerate().map(|(i, &k)| abs_diff(k, i)).sum()
}

/// Circular difference descriptor over the first `len` ranks. Zero for `len == 1`.
pub fn circular_difference<T: Real>(perm: &RankPermutation, len: usize) -> Result<T> {
    Ok(T::from_count(circular_difference_sum(perm, len)?) / T::from_count(len))
}

/// Correspondence difference descriptor over the first `len` ranks.
pub fn correspondence_difference<T: Real>(perm: &RankPermutation, len: usize) -> Result<T> {
    Ok(T::from_count(correspondence_difference_sum(perm, len)?) / T::from_count(len))
}

/// `M[i][j] = |g[i] - g[j]|`, indexed by rank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<usize>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn trace(&self) -> usize {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// The circular difference rebuilt from the first subdiagonal and the
    /// bottom-left corner.
    pub fn circular_difference<T: Real>(&self) -> T {
        let n = self.n;
        let sub: usize = (1..n).map(|i| self.get(i, i - 1)).sum();
        T::from_count(sub + self.get(n - 1, 0)) / T::from_count(n)
    }
}

pub fn distance_matrix(perm: &RankPermutation) -> DistanceMatrix {
    let g = perm.grid_of_rank();
    let n = g.len();
    let mut entries = Vec::with_capacity(n * n);
    for &a in g {
        entries.extend(g.iter().map(|&b| abs_diff(a, b)));
    }
    DistanceMatrix { n, entries }
}

/// Eigenvalues of a distance matrix, largest first, with running sums.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenSpectrum<T> {
    pub values: Vec<T>,
    pub partial_sums: Vec<T>,
}

const EIGEN_MAX_ITERATIONS: usize = 10_000;

/// Symmetric eigendecomposition of `m`. The eigenvalues sum to zero up to
/// rounding since the diagonal is empty.
pub fn distance_matrix_eigenvalues<T: Real + RealField>(m: &DistanceMatrix) -> Result<EigenSpectrum<T>> {
    let n = m.n();
    let mat = DMatrix::<T>::from_fn(n, n, |i, j| T::from_count(m.get(i, j)));
    let eig = SymmetricEigen::try_new(mat, T::default_epsilon(), EIGEN_MAX_ITERATIONS)
        .ok_or(Error::EigenNoConvergence { n })?;
    let mut values: Vec<T> = eig.eigenvalues.iter().copied().collect();
    if values.iter().any(|v| !num_traits::Float::is_finite(*v)) {
        return Err(Error::EigenNoConvergence { n });
    }
    values.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    let partial_sums = values
        .iter()
        .scan(T::zero(), |acc, &v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    Ok(EigenSpectrum { values, partial_sums })
}

/// Which descriptor or baseline to read off a [`DescriptorSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Cid,
    Cod,
    Entropy,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Cid, Metric::Cod, Metric::Entropy];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Cid => "cid",
            Metric::Cod => "cod",
            Metric::Entropy => "entropy",
        }
    }
}

/// Descriptors of one analysis frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescriptorSet<T> {
    /// Number of spectrum bins.
    pub n: usize,
    pub cid: T,
    pub cod: T,
    /// Entropy of the full, untruncated spectrum.
    pub spectral_entropy: T,
    pub l_used: usize,
    pub q_used: T,
}

impl<T: Real> DescriptorSet<T> {
    pub fn metric(&self, metric: Metric) -> T {
        match metric {
            Metric::Cid => self.cid,
            Metric::Cod => self.cod,
            Metric::Entropy => self.spectral_entropy,
        }
    }
}

/// How many ranks the descriptors see.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation<T> {
    /// All `N` ranks.
    None,
    /// The smallest top-ranked prefix holding fraction `q` of the power.
    EnergyQuantile(T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions<T> {
    pub truncation: Truncation<T>,
    pub direction: RankDirection,
    pub log_base: LogBase,
}

impl<T: Real> Default for AnalysisOptions<T> {
    fn default() -> Self {
        Self { truncation: Truncation::EnergyQuantile(T::one()), direction: RankDirection::Descending, log_base: LogBase::E }
    }
}

impl<T: Real> AnalysisOptions<T> {
    pub fn with_q(q: T) -> Self {
        Self { truncation: Truncation::EnergyQuantile(q), ..Self::default() }
    }

    pub fn untruncated() -> Self {
        Self { truncation: Truncation::None, ..Self::default() }
    }

    /// Rejects option combinations no spectrum could satisfy.
    pub fn validate(&self) -> Result<()> {
        if let Truncation::EnergyQuantile(q) = self.truncation {
            if !(q > T::zero() && q <= T::one()) {
                return Err(Error::param("q", format!("must lie in (0, 1], got {q}")));
            }
            if self.direction == RankDirection::Ascending && q < T::one() {
                return Err(Error::param("q", "energy truncation below 1 requires descending ranks"));
            }
        }
        Ok(())
    }
}

/// Runs the descriptor pipeline on an already estimated spectrum.
///
/// Ascending ranking is only combined with `q == 1`, which then means the
/// whole grid.
pub fn analyze_spectrum<T: Real>(spectrum: &PowerSpectrum<T>, opts: &AnalysisOptions<T>) -> Result<DescriptorSet<T>> {
    opts.validate()?;
    let n = spectrum.len();
    let spectral_entropy = spectral_entropy_with_base(spectrum, opts.log_base)?;
    let perm = rank_spectrum_with(spectrum, opts.direction)?;
    let (l_used, q_used) = match (opts.truncation, opts.direction) {
        (Truncation::EnergyQuantile(q), RankDirection::Descending) => {
            (truncate_by_energy(spectrum, &perm, q)?.length, q)
        }
        _ => (n, T::one()),
    };
    Ok(DescriptorSet {
        n,
        cid: circular_difference(&perm, l_used)?,
        cod: correspondence_difference(&perm, l_used)?,
        spectral_entropy,
        l_used,
        q_used,
    })
}

/// Power spectrum, descending ranks, energy truncation at `q`, then both
/// descriptors and the spectral entropy.
pub fn analyze<T: Real>(signal: &Signal<T>, q: T) -> Result<DescriptorSet<T>> {
    analyze_with(signal, &AnalysisOptions::with_q(q))
}

pub fn analyze_with<T: Real>(signal: &Signal<T>, opts: &AnalysisOptions<T>) -> Result<DescriptorSet<T>> {
    opts.validate()?;
    analyze_spectrum(&power_spectrum(signal)?, opts)
}
