//! Sliding-window descriptor traces and the local-energy monitoring value.
//!
//! Frame `i` covers samples `i*step .. i*step + window`. Local energy is the
//! population standard deviation of the `le_window` samples ending at the
//! frame's last sample, and the monitoring value for a descriptor `d` is
//! `log10(1 + LE) / log10(d)`.

use serde::Serialize;

use crate::descriptors::{analyze_spectrum, AnalysisOptions, DescriptorSet};
use crate::error::{Error, Result};
use crate::parallel::install;
use crate::real::{compensated_sum, Real};
use crate::spectrum::{Signal, SpectrumEstimator, MIN_SIGNAL_LEN};
use rayon::prelude::*;

/// Descriptors at or below `1 + MONITOR_GUARD` give no monitoring value.
pub const MONITOR_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorConfig<T> {
    /// Analysis window in samples; even and at least 4.
    pub window: usize,
    pub step: usize,
    /// Samples in the local-energy window; `2..=window`.
    pub le_window: usize,
    pub analysis: AnalysisOptions<T>,
    /// Worker threads; `None` uses the global rayon pool. Does not affect output.
    pub threads: Option<usize>,
}

impl<T: Real> MonitorConfig<T> {
    /// Energy-quantile truncation at `q`, local energy over the analysis window.
    pub fn new(window: usize, step: usize, q: T) -> Self {
        Self { window, step, le_window: window, analysis: AnalysisOptions::with_q(q), threads: None }
    }

    pub fn with_le_window(mut self, le_window: usize) -> Self {
        self.le_window = le_window;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < MIN_SIGNAL_LEN || self.window % 2 == 1 {
            return Err(Error::param("window", format!("must be even and >= {MIN_SIGNAL_LEN}, got {}", self.window)));
        }
        if self.step == 0 {
            return Err(Error::param("step", "must be at least 1"));
        }
        if self.le_window < 2 || self.le_window > self.window {
            return Err(Error::param(
                "le_window",
                format!("must lie in 2..={}, got {}", self.window, self.le_window),
            ));
        }
        self.analysis.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorFrame<T> {
    /// Index of the frame's first sample.
    pub start: usize,
    /// `None` when the frame carries no power at all.
    pub descriptors: Option<DescriptorSet<T>>,
    pub local_energy: T,
    pub combined_cid: Option<T>,
    pub combined_cod: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorTrace<T> {
    pub window: usize,
    pub step: usize,
    pub le_window: usize,
    pub frames: Vec<MonitorFrame<T>>,
}

impl<T: Real> MonitorTrace<T> {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frame_starts(&self) -> Vec<usize> {
        self.frames.iter().map(|f| f.start).collect()
    }

    pub fn cid(&self) -> Vec<Option<T>> {
        self.column(|d| d.cid)
    }

    pub fn cod(&self) -> Vec<Option<T>> {
        self.column(|d| d.cod)
    }

    pub fn entropy(&self) -> Vec<Option<T>> {
        self.column(|d| d.spectral_entropy)
    }

    pub fn local_energy(&self) -> Vec<T> {
        self.frames.iter().map(|f| f.local_energy).collect()
    }

    fn column(&self, pick: impl Fn(&DescriptorSet<T>) -> T) -> Vec<Option<T>> {
        self.frames.iter().map(|f| f.descriptors.as_ref().map(&pick)).collect()
    }
}

/// `floor((len - window) / step) + 1`, or zero when the signal is shorter
/// than one window.
pub fn frame_count(len: usize, window: usize, step: usize) -> usize {
    if len < window || step == 0 {
        0
    } else {
        (len - window) / step + 1
    }
}

/// Population standard deviation of `samples[at + 1 - le_window ..= at]`.
pub fn local_energy<T: Real>(samples: &[T], at: usize, le_window: usize) -> Result<T> {
    if le_window < 2 {
        return Err(Error::param("le_window", format!("must be at least 2, got {le_window}")));
    }
    if at >= samples.len() {
        return Err(Error::param("at", format!("index {at} outside signal of {}", samples.len())));
    }
    if at + 1 < le_window {
        return Err(Error::InsufficientHistory { at, window: le_window });
    }
    let seg = &samples[at + 1 - le_window..=at];
    let len = T::from_count(le_window);
    let mean = compensated_sum(seg.iter().copied()) / len;
    let var = compensated_sum(seg.iter().map(|&x| (x - mean) * (x - mean))) / len;
    Ok(var.sqrt())
}

/// `log10(1 + le) / log10(descriptor)`, undefined when the descriptor is at or
/// below `1 + MONITOR_GUARD` or the local energy is negative.
pub fn monitoring_value<T: Real>(le: T, descriptor: T) -> Option<T> {
    if !le.is_finite() || le < T::zero() {
        return None;
    }
    if !descriptor.is_finite() || descriptor <= T::one() + T::from_f64_lossy(MONITOR_GUARD) {
        return None;
    }
    Some((T::one() + le).log10() / descriptor.log10())
}

/// Runs the descriptor pipeline over every frame of `signal`.
///
/// Frames whose spectrum is identically zero yield `descriptors: None` instead
/// of failing the whole trace. Frames may be evaluated in parallel; the trace
/// is always in frame order.
pub fn sliding_descriptors<T: Real>(signal: &Signal<T>, cfg: &MonitorConfig<T>) -> Result<MonitorTrace<T>> {
    cfg.validate()?;
    if signal.len() < cfg.window {
        return Err(Error::TooShort { len: signal.len(), min: cfg.window });
    }
    let estimator = SpectrumEstimator::<T>::new(cfg.window)?;
    let samples = signal.samples();
    let count = frame_count(samples.len(), cfg.window, cfg.step);
    let frame = |i: usize| -> Result<MonitorFrame<T>> {
        let start = i * cfg.step;
        let end = start + cfg.window;
        let spectrum = estimator.estimate(&samples[start..end])?;
        let descriptors = match analyze_spectrum(&spectrum, &cfg.analysis) {
            Ok(d) => Some(d),
            Err(Error::ZeroPower) => None,
            Err(e) => return Err(e),
        };
        let local_energy = local_energy(samples, end - 1, cfg.le_window)?;
        let combined = |pick: fn(&DescriptorSet<T>) -> T| {
            descriptors.as_ref().and_then(|d| monitoring_value(local_energy, pick(d)))
        };
        Ok(MonitorFrame {
            start,
            combined_cid: combined(|d| d.cid),
            combined_cod: combined(|d| d.cod),
            descriptors,
            local_energy,
        })
    };
    let frames = install(cfg.threads, || (0..count).into_par_iter().map(frame).collect::<Result<Vec<_>>>())??;
    Ok(MonitorTrace { window: cfg.window, step: cfg.step, le_window: cfg.le_window, frames })
}
