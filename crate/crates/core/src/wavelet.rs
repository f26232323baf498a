//! Morlet continuous wavelet transform and the global wavelet spectrum
//! (time-averaged wavelet power).
//!
//! The transform is evaluated per scale in the frequency domain on a
//! zero-padded record, with Torrence & Compo normalisation so that power is
//! comparable across scales.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::peak::{quantize_frequency, refined_peak, Refine};
use crate::series::{Band, PowerSpectrum, TimeSeries};
use crate::tfmap::TimeFrequencyMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WaveletConfig {
    /// Morlet non-dimensional frequency.
    pub omega0: f64,
    /// Smallest scale in seconds; `None` means `2 dt`.
    pub s0: Option<f64>,
    /// Scale spacing in octaves.
    pub dj: f64,
    /// Index of the largest scale; `None` spans up to the record length.
    pub j_max: Option<usize>,
    /// Average only coefficients inside the cone of influence.
    pub coi_exclusion: bool,
}

impl Default for WaveletConfig {
    fn default() -> Self {
        Self {
            omega0: 6.0,
            s0: None,
            dj: 1.0 / 16.0,
            j_max: None,
            coi_exclusion: true,
        }
    }
}

impl WaveletConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 >= 5.0 && self.omega0.is_finite()) {
            return Err(Error::InvalidConfig(format!("omega0 must be >= 5, got {}", self.omega0)));
        }
        if !(self.dj > 0.0 && self.dj <= 0.5) {
            return Err(Error::InvalidConfig(format!("dj must lie in (0, 0.5], got {}", self.dj)));
        }
        if let Some(s0) = self.s0 {
            if !(s0 > 0.0 && s0.is_finite()) {
                return Err(Error::InvalidConfig(format!("s0 must be positive, got {s0}")));
            }
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        format!(
            "omega0={};dj={};coi={}",
            self.omega0, self.dj, self.coi_exclusion
        )
    }

    /// Ascending scales `s0 * 2^(j dj)`, `j = 0..=J`.
    pub fn scales(&self, n: usize, dt: f64) -> Vec<f64> {
        let s0 = self.s0.unwrap_or(2.0 * dt);
        let j_max = self.j_max.unwrap_or_else(|| {
            let octaves = (n as f64 * dt / s0).log2();
            if octaves > 0.0 {
                (octaves / self.dj).floor() as usize
            } else {
                0
            }
        });
        (0..=j_max).map(|j| s0 * 2f64.powf(j as f64 * self.dj)).collect()
    }
}

/// Equivalent Fourier frequency of a Morlet scale.
pub fn scale_to_frequency(scale: f64, omega0: f64) -> f64 {
    (omega0 + (2.0 + omega0 * omega0).sqrt()) / (4.0 * PI * scale)
}

pub fn frequency_to_scale(f: f64, omega0: f64) -> f64 {
    (omega0 + (2.0 + omega0 * omega0).sqrt()) / (4.0 * PI * f)
}

/// Complex CWT. Rows are ordered by ascending frequency (descending scale);
/// the mask marks coefficients inside the cone of influence.
pub fn cwt_morlet(series: &TimeSeries, cfg: &WaveletConfig) -> Result<TimeFrequencyMap> {
    cfg.validate()?;
    let x = series.samples();
    let n = x.len();
    let dt = series.dt();
    let padded = n.next_power_of_two();
    let spectrum = fft::forward_real(x, padded);
    let omega: Vec<f64> = (0..padded)
        .map(|k| {
            let k = if k <= padded / 2 { k as f64 } else { k as f64 - padded as f64 };
            2.0 * PI * k / (padded as f64 * dt)
        })
        .collect();

    let mut scales = cfg.scales(n, dt);
    scales.reverse();
    let norm_const = PI.powf(-0.25);
    let rows: Vec<Vec<Complex64>> = scales
        .par_iter()
        .map(|&s| {
            let amp = (2.0 * PI * s / dt).sqrt() * norm_const;
            let mut buf: Vec<Complex64> = spectrum
                .iter()
                .zip(&omega)
                .map(|(c, &w)| {
                    if w > 0.0 {
                        let u = s * w - cfg.omega0;
                        c * (amp * (-0.5 * u * u).exp())
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect();
            fft::inverse(&mut buf);
            buf.truncate(n);
            let inv = 1.0 / padded as f64;
            buf.iter_mut().for_each(|c| *c *= inv);
            buf
        })
        .collect();

    let values = DMatrix::from_fn(scales.len(), n, |r, j| rows[r][j]);
    let mask = DMatrix::from_fn(scales.len(), n, |r, j| {
        let edge = j.min(n - 1 - j) as f64 * dt;
        2f64.sqrt() * scales[r] <= edge
    });
    let freqs = scales.iter().map(|&s| scale_to_frequency(s, cfg.omega0)).collect();
    let times = (0..n).map(|j| series.t0() + j as f64 * dt).collect();
    TimeFrequencyMap::new(times, freqs, values, Some(mask))
}

/// Time-averaged wavelet power per frequency row, restricted to the cone
/// of influence when the map carries a mask. Rows with no coefficient
/// inside the cone are omitted.
pub fn global_wavelet_spectrum(map: &TimeFrequencyMap) -> PowerSpectrum {
    global_wavelet_spectrum_with(map, true)
}

pub fn global_wavelet_spectrum_with(map: &TimeFrequencyMap, use_mask: bool) -> PowerSpectrum {
    let mut freqs = Vec::with_capacity(map.freqs.len());
    let mut power = Vec::with_capacity(map.freqs.len());
    for (r, &f) in map.freqs.iter().enumerate() {
        let (sum, count) = (0..map.values.ncols())
            .filter(|&j| !use_mask || map.mask.as_ref().map_or(true, |m| m[(r, j)]))
            .fold((0.0, 0usize), |(s, c), j| (s + map.values[(r, j)].norm_sqr(), c + 1));
        if count > 0 {
            freqs.push(f);
            power.push(sum / count as f64);
        }
    }
    PowerSpectrum::new(freqs, power).expect("ascending wavelet frequencies")
}

/// Dominant frequency of the global wavelet spectrum, refined by a log-power
/// parabola on the geometric frequency grid.
pub fn dominant_mode_gws(
    series: &TimeSeries,
    cfg: &WaveletConfig,
    band: &Band,
) -> Result<(f64, PowerSpectrum)> {
    band.check_nyquist(series.dt())?;
    let map = cwt_morlet(series, cfg)?;
    let gws = global_wavelet_spectrum_with(&map, cfg.coi_exclusion);
    let f = refined_peak(&gws, band, Refine::LogGeometric)?;
    Ok((quantize_frequency(f), gws))
}
