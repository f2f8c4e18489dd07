//! Rank permutations of a power spectrum and energy-quantile truncation.
//!
//! All indices are 0-based: grid index 0 is the DC bin and rank 0 is the
//! best-ranked bin (the largest one when ranking in descending order).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{CompensatedSum, Real};
use crate::spectrum::PowerSpectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankDirection {
    /// Rank 0 is the largest power.
    #[default]
    Descending,
    /// Rank 0 is the smallest power.
    Ascending,
}

/// A permutation of `0..n` stored in both directions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankPermutation {
    rank_of_grid: Vec<usize>,
    grid_of_rank: Vec<usize>,
    direction: RankDirection,
}

impl RankPermutation {
    /// Builds the pair from the rank-ordered grid indices.
    pub fn from_grid_of_rank(grid_of_rank: Vec<usize>) -> Result<Self> {
        let n = grid_of_rank.len();
        if n == 0 {
            return Err(Error::param("grid_of_rank", "empty permutation"));
        }
        let mut rank_of_grid = vec![usize::MAX; n];
        for (rank, &grid) in grid_of_rank.iter().enumerate() {
            if grid >= n || rank_of_grid[grid] != usize::MAX {
                return Err(Error::param("grid_of_rank", format!("not a permutation of 0..{n}")));
            }
            rank_of_grid[grid] = rank;
        }
        Ok(Self { rank_of_grid, grid_of_rank, direction: RankDirection::Descending })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rank_of_grid: (0..n).collect(),
            grid_of_rank: (0..n).collect(),
            direction: RankDirection::Descending,
        }
    }

    pub fn n(&self) -> usize {
        self.grid_of_rank.len()
    }

    /// `rank_of_grid()[k]` is the rank held by grid bin `k`.
    pub fn rank_of_grid(&self) -> &[usize] {
        &self.rank_of_grid
    }

    /// `grid_of_rank()[r]` is the grid bin holding rank `r`.
    pub fn grid_of_rank(&self) -> &[usize] {
        &self.grid_of_rank
    }

    pub fn direction(&self) -> RankDirection {
        self.direction
    }

    /// Same permutation read from the other end.
    pub fn reversed(&self) -> Self {
        let n = self.n();
        let grid_of_rank: Vec<usize> = self.grid_of_rank.iter().rev().copied().collect();
        let rank_of_grid = self.rank_of_grid.iter().map(|&r| n - 1 - r).collect();
        let direction = match self.direction {
            RankDirection::Descending => RankDirection::Ascending,
            RankDirection::Ascending => RankDirection::Descending,
        };
        Self { rank_of_grid, grid_of_rank, direction }
    }
}

/// Ranks the spectrum bins in descending order of power.
pub fn rank_spectrum<T: Real>(spectrum: &PowerSpectrum<T>) -> Result<RankPermutation> {
    rank_spectrum_with(spectrum, RankDirection::Descending)
}

/// Ranks the spectrum bins. Equal powers are ordered by grid index, the lower
/// index taking the better rank, in either direction.
pub fn rank_spectrum_with<T: Real>(
    spectrum: &PowerSpectrum<T>,
    direction: RankDirection,
) -> Result<RankPermutation> {
    let n = spectrum.len();
    if n < 2 {
        return Err(Error::TooShort { len: n, min: 2 });
    }
    let v = spectrum.values();
    let mut grid_of_rank: Vec<usize> = (0..n).collect();
    // values are finite (PowerSpectrum invariant), so partial_cmp never fails;
    // sort_by is stable, which gives the grid-index tie-break
    match direction {
        RankDirection::Descending => grid_of_rank.sort_by(|&a, &b| v[b].partial_cmp(&v[a]).unwrap()),
        RankDirection::Ascending => grid_of_rank.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap()),
    }
    let mut perm = RankPermutation::from_grid_of_rank(grid_of_rank)?;
    perm.direction = direction;
    Ok(perm)
}

/// Outcome of energy-quantile truncation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationResult<T> {
    /// Number of top-ranked bins retained, in `1..=n`.
    pub length: usize,
    /// Grid indices of the retained bins in rank order.
    pub retained_grid: Vec<usize>,
    pub q: T,
}

/// Smallest `L` such that the `L` top-ranked bins hold at least `q` of the
/// total power.
///
/// The running sum and the total are accumulated in the same (rank) order
/// with compensation, so `q = 1` always terminates at the last non-zero bin.
/// Only descending permutations are accepted: the criterion selects the
/// largest components.
pub fn truncate_by_energy<T: Real>(
    spectrum: &PowerSpectrum<T>,
    perm: &RankPermutation,
    q: T,
) -> Result<TruncationResult<T>> {
    if !(q > T::zero() && q <= T::one()) {
        return Err(Error::param("q", format!("must lie in (0, 1], got {q}")));
    }
    if perm.n() != spectrum.len() {
        return Err(Error::param(
            "perm",
            format!("permutation of {} does not match spectrum of {}", perm.n(), spectrum.len()),
        ));
    }
    if perm.direction() != RankDirection::Descending {
        return Err(Error::param("perm", "energy truncation requires descending ranks"));
    }
    let v = spectrum.values();
    let cumulative: Vec<T> = perm
        .grid_of_rank()
        .iter()
        .scan(CompensatedSum::new(), |acc, &k| {
            acc.add(v[k]);
            Some(acc.value())
        })
        .collect();
    let total = *cumulative.last().expect("n >= 1");
    if total <= T::zero() {
        return Err(Error::ZeroPower);
    }
    let threshold = q * total;
    let length = cumulative.iter().position(|&c| c >= threshold).map_or(perm.n(), |i| i + 1);
    Ok(TruncationResult { length, retained_grid: perm.grid_of_rank()[..length].to_vec(), q })
}
