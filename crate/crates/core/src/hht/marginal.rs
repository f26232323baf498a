use serde::{Deserialize, Serialize};

use super::emd::ImfSet;
use super::hilbert::hilbert_analytic;
use crate::error::{Error, Result};
use crate::series::{Band, PowerSpectrum};

/// What each (time, instantaneous frequency) sample contributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// `a(t) dt`
    #[default]
    Amplitude,
    /// `a(t)^2 dt`
    Energy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MarginalConfig {
    pub n_bins: usize,
    /// Fraction of samples dropped at each end.
    pub edge_fraction: f64,
    /// Samples with amplitude at or below this fraction of the largest
    /// instantaneous amplitude are skipped.
    pub amplitude_floor: f64,
    pub weighting: Weighting,
}

impl Default for MarginalConfig {
    fn default() -> Self {
        Self {
            n_bins: 512,
            edge_fraction: 0.05,
            amplitude_floor: 1e-6,
            weighting: Weighting::Amplitude,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginalSpectrum {
    /// Accumulated mass per bin, at the bin centres.
    pub spectrum: PowerSpectrum,
    pub bin_width: f64,
    /// Sum of every accepted contribution, in accumulation order.
    pub total_mass: f64,
    /// Samples skipped because their instantaneous frequency was negative.
    pub negative_freq_count: usize,
}

pub fn hilbert_marginal_spectrum(
    imf_set: &ImfSet,
    band: &Band,
    cfg: &MarginalConfig,
) -> Result<MarginalSpectrum> {
    if cfg.n_bins == 0 {
        return Err(Error::EmptyBand);
    }
    if !(0.0..0.5).contains(&cfg.edge_fraction) {
        return Err(Error::InvalidConfig(format!(
            "edge_fraction must lie in [0, 0.5), got {}",
            cfg.edge_fraction
        )));
    }
    let width = band.width() / cfg.n_bins as f64;
    let mut bins = vec![0.0; cfg.n_bins];
    let mut total_mass = 0.0;
    let mut negative_freq_count = 0;

    let analytic: Vec<_> = imf_set.imfs.iter().map(hilbert_analytic).collect();
    let peak_amplitude = analytic
        .iter()
        .flat_map(|a| a.amplitude.iter())
        .fold(0.0_f64, |m, &v| m.max(v));
    let floor = cfg.amplitude_floor * peak_amplitude;

    for (imf, a) in imf_set.imfs.iter().zip(&analytic) {
        let n = imf.len();
        let dt = imf.dt();
        let edge = (cfg.edge_fraction * n as f64).floor() as usize;
        for k in edge..n - edge {
            let amp = a.amplitude[k];
            if amp <= floor {
                continue;
            }
            let f = a.inst_freq[k];
            if f < 0.0 {
                negative_freq_count += 1;
                continue;
            }
            if !band.contains(f) {
                continue;
            }
            let bin = (((f - band.f_lo) / width) as usize).min(cfg.n_bins - 1);
            let mass = match cfg.weighting {
                Weighting::Amplitude => amp * dt,
                Weighting::Energy => amp * amp * dt,
            };
            bins[bin] += mass;
            total_mass += mass;
        }
    }
    let freqs = (0..cfg.n_bins)
        .map(|k| band.f_lo + (k as f64 + 0.5) * width)
        .collect();
    Ok(MarginalSpectrum {
        spectrum: PowerSpectrum::new(freqs, bins)?,
        bin_width: width,
        total_mass,
        negative_freq_count,
    })
}
