//! Hilbert-Huang analysis: empirical mode decomposition, per-IMF analytic
//! signals, and the Hilbert marginal spectrum.

pub mod emd;
pub mod hilbert;
pub mod marginal;
mod spline;

use serde::{Deserialize, Serialize};

pub use emd::{emd, extrema, is_imf, zero_crossings, EmdConfig, ImfSet};
pub use hilbert::{hilbert_analytic, hilbert_transform, AnalyticImf};
pub use marginal::{hilbert_marginal_spectrum, MarginalConfig, MarginalSpectrum, Weighting};

use crate::error::{Error, Result};
use crate::peak::{quantize_frequency, refined_peak, Refine};
use crate::series::{Band, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct HhtConfig {
    pub emd: EmdConfig,
    pub marginal: MarginalConfig,
}

impl HhtConfig {
    pub fn describe(&self) -> String {
        format!(
            "{};bins={};weight={:?}",
            self.emd.describe(),
            self.marginal.n_bins,
            self.marginal.weighting
        )
    }
}

/// EMD, analytic signals, marginal spectrum, then the largest bin refined
/// with a parabola through its neighbours.
pub fn dominant_mode_hms(
    series: &TimeSeries,
    cfg: &HhtConfig,
    band: &Band,
) -> Result<(f64, MarginalSpectrum)> {
    band.check_nyquist(series.dt())?;
    let set = emd(series, &cfg.emd)?;
    let marginal = hilbert_marginal_spectrum(&set, band, &cfg.marginal)?;
    if marginal.total_mass == 0.0 {
        return Err(Error::NoModeInBand);
    }
    let f = refined_peak(&marginal.spectrum, band, Refine::LinearUniform)?;
    Ok((quantize_frequency(f), marginal))
}
