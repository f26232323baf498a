use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex time-frequency coefficients. Rows follow `freqs` (ascending),
/// columns follow `times`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeFrequencyMap {
    pub times: Vec<f64>,
    pub freqs: Vec<f64>,
    pub values: DMatrix<Complex64>,
    /// `true` where a coefficient is free of edge effects.
    pub mask: Option<DMatrix<bool>>,
}

impl TimeFrequencyMap {
    pub fn new(
        times: Vec<f64>,
        freqs: Vec<f64>,
        values: DMatrix<Complex64>,
        mask: Option<DMatrix<bool>>,
    ) -> Result<Self> {
        if values.nrows() != freqs.len() || values.ncols() != times.len() {
            return Err(Error::InvalidConfig(format!(
                "map is {}x{} but axes are {}x{}",
                values.nrows(),
                values.ncols(),
                freqs.len(),
                times.len()
            )));
        }
        if let Some(m) = &mask {
            if m.shape() != values.shape() {
                return Err(Error::InvalidConfig("mask shape differs from map".into()));
            }
        }
        if freqs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig("map frequencies must ascend".into()));
        }
        if values.iter().any(|c| !c.norm().is_finite()) {
            return Err(Error::InvalidConfig("map holds non-finite values".into()));
        }
        Ok(Self {
            times,
            freqs,
            values,
            mask,
        })
    }

    /// `|S|^2` for every coefficient.
    pub fn power(&self) -> DMatrix<f64> {
        self.values.map(|c| c.norm_sqr())
    }
}
