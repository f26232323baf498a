//! Gaussian-windowed, zero-padded Fourier power spectrum and dominant-mode
//! peak picking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::peak::{quantize_frequency, refined_peak, Refine};
use crate::series::{Band, PowerSpectrum, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FourierConfig {
    /// Window standard deviation as a fraction of the half frame, in (0, 1].
    pub gaussian_window_factor: f64,
    pub zero_pad_factor: usize,
}

impl Default for FourierConfig {
    fn default() -> Self {
        Self {
            gaussian_window_factor: 0.3,
            zero_pad_factor: 4,
        }
    }
}

impl FourierConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gaussian_window_factor > 0.0 && self.gaussian_window_factor <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "gaussian_window_factor must lie in (0, 1], got {}",
                self.gaussian_window_factor
            )));
        }
        if self.zero_pad_factor < 1 {
            return Err(Error::InvalidConfig("zero_pad_factor must be >= 1".into()));
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        format!(
            "gwf={};pad={}",
            self.gaussian_window_factor, self.zero_pad_factor
        )
    }
}

/// `exp(-0.5 ((n - (N-1)/2) / sigma)^2)` with `sigma = factor * (N-1)/2`.
pub fn gaussian_window(n: usize, factor: f64) -> Vec<f64> {
    let half = (n as f64 - 1.0) / 2.0;
    let sigma = factor * half;
    (0..n)
        .map(|i| {
            let u = (i as f64 - half) / sigma;
            (-0.5 * u * u).exp()
        })
        .collect()
}

/// Samples multiplied by the Gaussian window, before padding.
pub fn windowed_frame(series: &TimeSeries, cfg: &FourierConfig) -> Vec<f64> {
    let w = gaussian_window(series.len(), cfg.gaussian_window_factor);
    series.samples().iter().zip(&w).map(|(x, w)| x * w).collect()
}

/// One-sided power `|X[k]|^2` at `k / (M dt)`, `k = 0..=M/2`, `M = pad * N`.
pub fn power_spectrum(series: &TimeSeries, cfg: &FourierConfig) -> Result<PowerSpectrum> {
    cfg.validate()?;
    let frame = windowed_frame(series, cfg);
    let m = cfg.zero_pad_factor * series.len();
    let spec = fft::forward_real(&frame, m);
    let df = 1.0 / (m as f64 * series.dt());
    let (freqs, power) = (0..=m / 2)
        .map(|k| (k as f64 * df, spec[k].norm_sqr()))
        .unzip();
    PowerSpectrum::new(freqs, power)
}

/// In-band spectral peak, refined by a parabola through the log-power of
/// the neighbouring bins.
pub fn dominant_mode_fft(
    series: &TimeSeries,
    cfg: &FourierConfig,
    band: &Band,
) -> Result<(f64, PowerSpectrum)> {
    band.check_nyquist(series.dt())?;
    let spectrum = power_spectrum(series, cfg)?;
    let f = refined_peak(&spectrum, band, Refine::LogUniform)?;
    Ok((quantize_frequency(f), spectrum))
}
