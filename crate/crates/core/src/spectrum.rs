//! Signals, their first-half power spectra and the spectral-entropy baseline.
//!
//! The transform is the plain unnormalised DFT
//! `X[k] = sum_i x[i] * exp(-j*2*pi*i*k / 2N)` over a length-`2N` signal,
//! with no window and no detrending. The power spectrum keeps the squared
//! moduli of bins `0..N`, DC included; bin `k` sits at normalised frequency
//! `k*pi/N`.
//!
//! Parseval holds over the full transform only:
//! `sum_k |X[k]|^2 == 2N * sum_i x[i]^2`. The half spectrum carries half of
//! that energy only when the DC and Nyquist bins are empty, so nothing here
//! relies on a half-spectrum energy identity.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{compensated_sum, Real};

/// Shortest signal with a rankable spectrum (two bins).
pub const MIN_SIGNAL_LEN: usize = 4;

/// Evenly spaced real-valued samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Signal<T> {
    samples: Vec<T>,
    sample_rate_hz: Option<f64>,
}

impl<T: Real> Signal<T> {
    /// Wraps `samples`, rejecting empty input and any NaN or infinity.
    pub fn new(samples: Vec<T>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySignal);
        }
        if let Some(index) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { samples, sample_rate_hz: None })
    }

    /// Attaches a sampling rate. Informational only; no computation uses it.
    pub fn with_sample_rate(mut self, hz: f64) -> Result<Self> {
        if !(hz.is_finite() && hz > 0.0) {
            return Err(Error::param("sample_rate_hz", format!("must be positive, got {hz}")));
        }
        self.sample_rate_hz = Some(hz);
        Ok(self)
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate_hz(&self) -> Option<f64> {
        self.sample_rate_hz
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    /// Copy of `len` samples starting at `start`.
    pub fn segment(&self, start: usize, len: usize) -> Result<Self> {
        let end = start
            .checked_add(len)
            .filter(|&end| end <= self.samples.len() && len > 0)
            .ok_or_else(|| {
                Error::param("segment", format!("{start}..{start}+{len} outside 0..{}", self.len()))
            })?;
        Ok(Self { samples: self.samples[start..end].to_vec(), sample_rate_hz: self.sample_rate_hz })
    }

    /// Drops the final sample when the length is odd. Returns whether it did.
    pub fn truncate_to_even(&mut self) -> bool {
        if self.samples.len() % 2 == 1 && self.samples.len() > 1 {
            self.samples.pop();
            true
        } else {
            false
        }
    }

    /// Subtracts the sample mean in place.
    pub fn remove_mean(&mut self) {
        let mean = compensated_sum(self.samples.iter().copied()) / T::from_count(self.samples.len());
        for x in &mut self.samples {
            *x -= mean;
        }
    }
}

/// Non-negative power values on the grid `k*pi/N`, `k = 0..N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PowerSpectrum<T> {
    values: Vec<T>,
}

impl<T: Real> PowerSpectrum<T> {
    /// Builds a spectrum from raw bin values, which must be finite and `>= 0`.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySignal);
        }
        if let Some(index) = values.iter().position(|v| !(v.is_finite() && *v >= T::zero())) {
            return Err(Error::InvalidSpectrum { index });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Number of bins, `N`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total_power(&self) -> T {
        compensated_sum(self.values.iter().copied())
    }

    /// Normalised frequency in `[0, pi)` of bin `k`.
    pub fn frequency(&self, k: usize) -> T {
        T::PI() * T::from_count(k) / T::from_count(self.values.len())
    }
}

fn check_even(len: usize) -> Result<()> {
    if len == 0 {
        Err(Error::EmptySignal)
    } else if len % 2 == 1 {
        Err(Error::OddLength { len })
    } else {
        Ok(())
    }
}

/// Term-by-term evaluation of the length-`2N` DFT. Quadratic; kept as the
/// reference the fast path is checked against.
pub fn dft_naive<T: Real>(signal: &Signal<T>) -> Result<Vec<Complex<T>>> {
    let len = signal.len();
    check_even(len)?;
    let x = signal.samples();
    let step = T::TAU() / T::from_count(len);
    let out = (0..len)
        .map(|k| {
            let mut re = T::zero();
            let mut im = T::zero();
            for (i, &s) in x.iter().enumerate() {
                // reduce i*k mod 2N first so the phase stays in [0, 2*pi)
                let phase = step * T::from_count((i * k) % len);
                re += s * phase.cos();
                im -= s * phase.sin();
            }
            Complex::new(re, im)
        })
        .collect();
    Ok(out)
}

/// Full length-`2N` DFT through a planned FFT.
pub fn dft<T: Real>(signal: &Signal<T>) -> Result<Vec<Complex<T>>> {
    check_even(signal.len())?;
    let fft = FftPlanner::<T>::new().plan_fft_forward(signal.len());
    let mut buf: Vec<Complex<T>> = signal.samples().iter().map(|&s| Complex::new(s, T::zero())).collect();
    fft.process(&mut buf);
    Ok(buf)
}

/// Reusable FFT plan for a fixed even frame length.
#[derive(Clone)]
pub struct SpectrumEstimator<T: Real> {
    fft: Arc<dyn Fft<T>>,
    frame_len: usize,
}

impl<T: Real> fmt::Debug for SpectrumEstimator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectrumEstimator").field("frame_len", &self.frame_len).finish()
    }
}

impl<T: Real> SpectrumEstimator<T> {
    pub fn new(frame_len: usize) -> Result<Self> {
        check_even(frame_len)?;
        if frame_len < MIN_SIGNAL_LEN {
            return Err(Error::TooShort { len: frame_len, min: MIN_SIGNAL_LEN });
        }
        let fft = FftPlanner::<T>::new().plan_fft_forward(frame_len);
        Ok(Self { fft, frame_len })
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    /// Power spectrum of a frame of exactly `frame_len` finite samples.
    pub fn estimate(&self, frame: &[T]) -> Result<PowerSpectrum<T>> {
        if frame.len() != self.frame_len {
            return Err(Error::param(
                "frame",
                format!("expected {} samples, got {}", self.frame_len, frame.len()),
            ));
        }
        let mut buf: Vec<Complex<T>> = frame.iter().map(|&s| Complex::new(s, T::zero())).collect();
        self.fft.process(&mut buf);
        let values = buf[..self.frame_len / 2].iter().map(|c| c.norm_sqr()).collect();
        Ok(PowerSpectrum { values })
    }
}

/// Squared moduli of the first half of the DFT of an even-length signal.
pub fn power_spectrum<T: Real>(signal: &Signal<T>) -> Result<PowerSpectrum<T>> {
    check_even(signal.len())?;
    SpectrumEstimator::new(signal.len())?.estimate(signal.samples())
}

/// Logarithm base for entropy values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    /// Nats.
    #[default]
    E,
    /// Bits.
    Two,
    Ten,
}

impl LogBase {
    fn ln_base<T: Real>(self) -> T {
        match self {
            LogBase::E => T::one(),
            LogBase::Two => T::LN_2(),
            LogBase::Ten => T::LN_10(),
        }
    }
}

/// Shannon entropy (nats) of the power-normalised spectrum.
///
/// Zero bins contribute nothing. The result lies in `[0, ln N]`.
pub fn spectral_entropy<T: Real>(spectrum: &PowerSpectrum<T>) -> Result<T> {
    spectral_entropy_with_base(spectrum, LogBase::E)
}

pub fn spectral_entropy_with_base<T: Real>(spectrum: &PowerSpectrum<T>, base: LogBase) -> Result<T> {
    let total = spectrum.total_power();
    if total <= T::zero() {
        return Err(Error::ZeroPower);
    }
    let h = compensated_sum(spectrum.values().iter().filter(|&&v| v > T::zero()).map(|&v| {
        let p = v / total;
        -p * p.ln()
    }));
    Ok((h / base.ln_base::<T>()).max(T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sig(xs: &[f64]) -> Signal<f64> {
        Signal::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn signal_rejects_empty_and_non_finite() {
        assert_eq!(Signal::<f64>::new(vec![]), Err(Error::EmptySignal));
        assert_eq!(Signal::new(vec![1.0, f64::NAN]), Err(Error::NonFinite { index: 1 }));
        assert_eq!(Signal::new(vec![f64::INFINITY]), Err(Error::NonFinite { index: 0 }));
        assert!(sig(&[1.0]).with_sample_rate(0.0).is_err());
        assert_eq!(sig(&[1.0]).with_sample_rate(500.0).unwrap().sample_rate_hz(), Some(500.0));
    }

    #[test]
    fn naive_dft_small_cases() {
        let out = dft_naive(&sig(&[1.0, 1.0, 1.0, 1.0])).unwrap();
        let expect = [4.0, 0.0, 0.0, 0.0];
        for (c, e) in out.iter().zip(expect) {
            assert!((c.re - e).abs() < 1e-12 && c.im.abs() < 1e-12);
        }

        let out = dft_naive(&sig(&[1.0, 0.0, -1.0, 0.0])).unwrap();
        let expect = [0.0, 2.0, 0.0, 2.0];
        for (c, e) in out.iter().zip(expect) {
            assert!((c.re - e).abs() < 1e-12 && c.im.abs() < 1e-12, "{c} vs {e}");
        }

        let out = dft_naive(&sig(&[0.0, 0.0])).unwrap();
        assert!(out.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn naive_dft_rejects_odd_length() {
        assert_eq!(dft_naive(&sig(&[1.0, 2.0, 3.0])), Err(Error::OddLength { len: 3 }));
    }

    #[test]
    fn power_spectrum_small_cases() {
        let p = power_spectrum(&sig(&[1.0, 1.0, 1.0, 1.0])).unwrap();
        assert_relative_eq!(p.values()[0], 16.0, epsilon = 1e-12);
        assert!(p.values()[1].abs() < 1e-12);

        let p = power_spectrum(&sig(&[1.0, 0.0, -1.0, 0.0])).unwrap();
        assert!(p.values()[0].abs() < 1e-12);
        assert_relative_eq!(p.values()[1], 4.0, epsilon = 1e-12);
    }

    #[test]
    fn power_spectrum_length_checks() {
        assert_eq!(power_spectrum(&sig(&[1.0, 2.0])), Err(Error::TooShort { len: 2, min: 4 }));
        assert_eq!(power_spectrum(&sig(&[1.0, 2.0, 3.0, 4.0, 5.0])), Err(Error::OddLength { len: 5 }));
    }

    #[test]
    fn power_spectrum_f32() {
        let s = Signal::new(vec![1.0f32, 0.0, -1.0, 0.0]).unwrap();
        let p = power_spectrum(&s).unwrap();
        assert!((p.values()[1] - 4.0).abs() < 1e-5);
    }

    #[test]
    fn frequency_grid() {
        let p = PowerSpectrum::new(vec![1.0f64; 4]).unwrap();
        assert_eq!(p.frequency(0), 0.0);
        assert_relative_eq!(p.frequency(2), std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn spectrum_validation() {
        assert_eq!(PowerSpectrum::new(vec![1.0, -0.5]), Err(Error::InvalidSpectrum { index: 1 }));
        assert_eq!(PowerSpectrum::<f64>::new(vec![]), Err(Error::EmptySignal));
    }

    #[test]
    fn entropy_examples() {
        let flat = PowerSpectrum::new(vec![1.0f64; 4]).unwrap();
        assert_relative_eq!(spectral_entropy(&flat).unwrap(), 4f64.ln(), epsilon = 1e-15);

        let line = PowerSpectrum::new(vec![0.0, 4.0]).unwrap();
        assert_eq!(spectral_entropy(&line).unwrap(), 0.0);

        let two = PowerSpectrum::new(vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        assert_relative_eq!(spectral_entropy(&two).unwrap(), 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn entropy_bases() {
        let two = PowerSpectrum::new(vec![0.5f64, 0.5]).unwrap();
        assert_relative_eq!(spectral_entropy_with_base(&two, LogBase::Two).unwrap(), 1.0, epsilon = 1e-15);
        let ten = PowerSpectrum::new(vec![1.0f64; 10]).unwrap();
        assert_relative_eq!(spectral_entropy_with_base(&ten, LogBase::Ten).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn entropy_zero_power_is_an_error() {
        let zero = PowerSpectrum::new(vec![0.0f64; 3]).unwrap();
        assert_eq!(spectral_entropy(&zero), Err(Error::ZeroPower));
    }

    #[test]
    fn odd_truncation_and_mean_removal() {
        let mut s = sig(&[1.0, 2.0, 3.0]);
        assert!(s.truncate_to_even());
        assert_eq!(s.samples(), &[1.0, 2.0]);
        assert!(!s.truncate_to_even());
        s.remove_mean();
        assert_eq!(s.samples(), &[-0.5, 0.5]);
    }

    #[test]
    fn estimator_checks_frame_length() {
        let est = SpectrumEstimator::<f64>::new(8).unwrap();
        assert!(est.estimate(&[0.0; 6]).is_err());
        assert!(SpectrumEstimator::<f64>::new(2).is_err());
    }
}
