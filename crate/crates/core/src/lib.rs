//! Ordinal structure of power spectra.
//!
//! A length-`2N` signal is reduced to its first-half power spectrum, the `N`
//! bins are ranked by power, and the resulting permutation is summarised by
//! two scalar descriptors:
//!
//! * the **circular difference** (CiD), the mean absolute grid distance
//!   between consecutively ranked bins, closed into a cycle;
//! * the **correspondence difference** (CoD), the mean absolute displacement
//!   of each rank's bin from the perfectly ordered arrangement.
//!
//! Unlike spectral entropy, which is blind to where power sits on the grid,
//! both descriptors change when the same power values are rearranged.
//!
//! ```
//! use specrank::{analyze, Signal};
//!
//! let signal = Signal::new(vec![0.0, 1.0, 0.5, -0.3, -1.0, 0.2, 0.9, -0.4]).unwrap();
//! let d = analyze(&signal, 0.9).unwrap();
//! assert_eq!(d.n, 4);
//! assert!(d.l_used <= 4);
//! ```
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the `*64`
//! and `*32` aliases below name the common instantiations.

pub mod descriptors;
pub mod error;
pub mod monitor;
pub mod nulldist;
mod parallel;
pub mod ranking;
pub mod real;
pub mod spectrum;
pub mod stats;

pub use descriptors::{
    analyze, analyze_spectrum, analyze_with, circular_difference, circular_difference_sum,
    correspondence_difference, correspondence_difference_sum, distance_matrix, distance_matrix_eigenvalues,
    AnalysisOptions, DescriptorSet, DistanceMatrix, EigenSpectrum, Metric, Truncation,
};
pub use error::{Error, ErrorCategory, Result};
pub use monitor::{
    frame_count, local_energy, monitoring_value, sliding_descriptors, MonitorConfig, MonitorFrame, MonitorTrace,
};
pub use nulldist::{
    enumerate_null_exact, enumerate_null_exact_with, max_qq_deviation, qq_points, sample_null, sample_null_with,
    Binning, Histogram, MonteCarloConfig, NullDistributionSummary, NullMode, NullSample, OrdinalDescriptor, QqPoint,
};
pub use ranking::{rank_spectrum, rank_spectrum_with, truncate_by_energy, RankDirection, RankPermutation, TruncationResult};
pub use real::Real;
pub use spectrum::{
    dft, dft_naive, power_spectrum, spectral_entropy, spectral_entropy_with_base, LogBase, PowerSpectrum, Signal,
    SpectrumEstimator,
};
pub use stats::{group_compare, wilcoxon_rank_sum, wilcoxon_rank_sum_with, Group, PairwiseTable, RankSumMethod, RankSumResult};

pub type Signal64 = Signal<f64>;
pub type Signal32 = Signal<f32>;
pub type PowerSpectrum64 = PowerSpectrum<f64>;
pub type PowerSpectrum32 = PowerSpectrum<f32>;
pub type DescriptorSet64 = DescriptorSet<f64>;
pub type DescriptorSet32 = DescriptorSet<f32>;
pub type MonitorConfig64 = MonitorConfig<f64>;
pub type MonitorTrace64 = MonitorTrace<f64>;
pub type MonitorTrace32 = MonitorTrace<f32>;
pub type NullDistributionSummary64 = NullDistributionSummary<f64>;
pub type AnalysisOptions64 = AnalysisOptions<f64>;
