//! Discrete Stockwell transform, computed voice by voice in the frequency
//! domain, and dominant-mode extraction from its time-averaged power.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::fft;
use crate::peak::{quantize_frequency, refined_peak, Refine};
use crate::series::{Band, PowerSpectrum, TimeSeries};
use crate::tfmap::TimeFrequencyMap;

/// Fraction of the record dropped at each end before time averaging.
pub const EDGE_FRACTION: f64 = 0.1;

/// One row of the transform. `spectrum` is the normalised DFT `X / N`.
fn voice(spectrum: &[Complex64], n: usize) -> Vec<Complex64> {
    let len = spectrum.len();
    if n == 0 {
        return vec![spectrum[0]; len];
    }
    let nf = n as f64;
    let mut buf: Vec<Complex64> = (0..len)
        .map(|k| {
            let m = if k <= len / 2 { k as f64 } else { k as f64 - len as f64 };
            let g = (-2.0 * PI * PI * m * m / (nf * nf)).exp();
            spectrum[(k + n) % len] * g
        })
        .collect();
    fft::inverse(&mut buf);
    buf
}

fn transform_voices(series: &TimeSeries, voices: &[usize]) -> TimeFrequencyMap {
    let x = series.samples();
    let len = x.len();
    let scale = 1.0 / len as f64;
    let spectrum: Vec<Complex64> = fft::forward_real(x, len).into_iter().map(|c| c * scale).collect();
    let rows: Vec<Vec<Complex64>> = voices.par_iter().map(|&n| voice(&spectrum, n)).collect();
    let values = DMatrix::from_fn(voices.len(), len, |r, j| rows[r][j]);
    let df = 1.0 / (len as f64 * series.dt());
    let freqs = voices.iter().map(|&n| n as f64 * df).collect();
    let times = (0..len).map(|j| series.t0() + j as f64 * series.dt()).collect();
    TimeFrequencyMap::new(times, freqs, values, None).expect("consistent axes")
}

/// Voices `0..=N/2`. Summing any row over time gives the unnormalised DFT
/// coefficient of that voice; row 0 holds the signal mean.
pub fn stransform(series: &TimeSeries) -> TimeFrequencyMap {
    let voices: Vec<usize> = (0..=series.len() / 2).collect();
    transform_voices(series, &voices)
}

/// Only the voices inside `band`, plus one neighbour on each side for peak
/// refinement. The zero voice is never included.
pub fn stransform_band(series: &TimeSeries, band: &Band) -> TimeFrequencyMap {
    let df = 1.0 / (series.len() as f64 * series.dt());
    let top = series.len() / 2;
    let lo = ((band.f_lo / df).ceil() as usize).saturating_sub(1).max(1);
    let hi = ((band.f_hi / df).floor() as usize + 1).min(top);
    let voices: Vec<usize> = (lo..=hi.max(lo)).collect();
    transform_voices(series, &voices)
}

/// Mean `|S|^2` per voice over the interior times.
pub fn time_marginal(map: &TimeFrequencyMap) -> PowerSpectrum {
    let cols = map.values.ncols();
    let edge = (EDGE_FRACTION * cols as f64).floor() as usize;
    let (start, end) = if cols > 2 * edge { (edge, cols - edge) } else { (0, cols) };
    let power = (0..map.values.nrows())
        .map(|r| {
            (start..end).map(|j| map.values[(r, j)].norm_sqr()).sum::<f64>() / (end - start) as f64
        })
        .collect();
    PowerSpectrum::new(map.freqs.clone(), power).expect("ascending voices")
}

/// Dominant frequency from the time-averaged S-transform power; the zero
/// voice is excluded.
pub fn dominant_mode_st(map: &TimeFrequencyMap, band: &Band) -> Result<(f64, PowerSpectrum)> {
    let marginal = time_marginal(map);
    let search = Band {
        f_lo: band.f_lo.max(f64::MIN_POSITIVE),
        f_hi: band.f_hi,
    };
    let f = refined_peak(&marginal, &search, Refine::LogUniform)?;
    Ok((quantize_frequency(f), marginal))
}

/// Convenience wrapper: full transform of `series`, then [`dominant_mode_st`].
pub fn dominant_mode_st_series(series: &TimeSeries, band: &Band) -> Result<(f64, PowerSpectrum)> {
    band.check_nyquist(series.dt())?;
    dominant_mode_st(&stransform(series), band)
}
