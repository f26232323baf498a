//! Peak location helpers shared by the spectral methods.

use crate::error::{Error, Result};
use crate::series::{Band, PowerSpectrum};

/// Reported dominant frequencies are rounded to this grid so that results
/// do not depend on last-bit rounding of the input scale.
pub const FREQUENCY_RESOLUTION_HZ: f64 = 1e-9;

pub fn quantize_frequency(f: f64) -> f64 {
    (f / FREQUENCY_RESOLUTION_HZ).round() * FREQUENCY_RESOLUTION_HZ
}

/// Vertex offset of the parabola through `(-1, l), (0, c), (1, r)`,
/// clamped to `[-0.5, 0.5]`. Zero when the points are not a strict peak.
pub fn parabolic_offset(l: f64, c: f64, r: f64) -> f64 {
    let denom = l - 2.0 * c + r;
    if !(denom < 0.0) || !l.is_finite() || !r.is_finite() {
        return 0.0;
    }
    (0.5 * (l - r) / denom).clamp(-0.5, 0.5)
}

/// Index of the largest value; the first one wins ties.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        match best {
            Some(b) if *v <= values[b] => {}
            _ => best = Some(i),
        }
    }
    best
}

/// How neighbouring bins are compared when refining a peak.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refine {
    /// Parabola through the log-power values, uniform frequency grid.
    LogUniform,
    /// Parabola through the raw values, uniform frequency grid.
    LinearUniform,
    /// Parabola through the log-power values on a geometric frequency grid.
    LogGeometric,
}

/// Largest in-band bin of `spectrum`, refined with a three-point parabola.
///
/// Neighbours outside the band are still used for refinement when present,
/// but the result is clamped to the band. A band holding no power has no
/// peak.
pub fn refined_peak(spectrum: &PowerSpectrum, band: &Band, refine: Refine) -> Result<f64> {
    let range = spectrum.band_indices(band);
    if range.is_empty() {
        return Err(Error::EmptyBand);
    }
    let p = spectrum.power();
    let f = spectrum.freqs();
    let k = range.start + argmax(&p[range.clone()]).expect("non-empty range");
    if p[k] <= 0.0 {
        return Err(Error::NoModeInBand);
    }
    if k == 0 || k + 1 >= p.len() {
        return Ok(f[k]);
    }
    let (l, c, r) = (p[k - 1], p[k], p[k + 1]);
    let delta = match refine {
        Refine::LinearUniform => parabolic_offset(l, c, r),
        Refine::LogUniform | Refine::LogGeometric => {
            if l > 0.0 && c > 0.0 && r > 0.0 {
                parabolic_offset(l.ln(), c.ln(), r.ln())
            } else {
                0.0
            }
        }
    };
    let refined = match refine {
        Refine::LogGeometric => {
            let step = if delta >= 0.0 { f[k + 1] / f[k] } else { f[k] / f[k - 1] };
            f[k] * step.powf(delta)
        }
        _ => {
            let step = if delta >= 0.0 { f[k + 1] - f[k] } else { f[k] - f[k - 1] };
            f[k] + delta * step
        }
    };
    Ok(refined.clamp(band.f_lo, band.f_hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_vertex_recovered() {
        // y = -(x - 0.3)^2 sampled at -1, 0, 1
        let y = |x: f64| -(x - 0.3) * (x - 0.3);
        assert!((parabolic_offset(y(-1.0), y(0.0), y(1.0)) - 0.3).abs() < 1e-12);
        assert_eq!(parabolic_offset(1.0, 1.0, 1.0), 0.0);
    }

    #[test]
    fn argmax_prefers_first() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0, 2.0]), Some(1));
        assert_eq!(argmax(&[]), None);
    }

    #[test]
    fn empty_band_is_error() {
        let s = PowerSpectrum::new(vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 1.0]).unwrap();
        let band = Band::new(5.0, 6.0).unwrap();
        assert_eq!(refined_peak(&s, &band, Refine::LinearUniform), Err(Error::EmptyBand));
    }

    #[test]
    fn refinement_stays_in_band() {
        // rising into the band edge: the vertex lies left of f_lo
        let s = PowerSpectrum::new(vec![0.0, 0.1, 0.2, 0.3], vec![4.0, 4.5, 1.0, 0.5]).unwrap();
        let band = Band::new(0.1, 0.3).unwrap();
        let f = refined_peak(&s, &band, Refine::LinearUniform).unwrap();
        assert_eq!(f, 0.1);
    }

    #[test]
    fn quantization_is_idempotent() {
        let f = 0.200_000_000_123_4;
        assert_eq!(quantize_frequency(quantize_frequency(f)), quantize_frequency(f));
        assert!((quantize_frequency(f) - f).abs() <= FREQUENCY_RESOLUTION_HZ);
    }
}
