//! Empirical mode decomposition by envelope-mean sifting.

use serde::{Deserialize, Serialize};

use super::spline::natural_cubic_on_grid;
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Decomposition stops once the residue falls below this fraction of
/// `max|x|`; what is left is rounding noise.
pub const RESIDUE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmdConfig {
    /// Stop sifting when `sum (h_prev - h)^2 / sum h_prev^2` drops below this.
    pub sd_threshold: f64,
    pub max_sift: usize,
    pub max_imfs: usize,
    /// Extrema mirrored past each end for the envelopes.
    pub mirror_extrema: usize,
}

impl Default for EmdConfig {
    fn default() -> Self {
        Self {
            sd_threshold: 0.2,
            max_sift: 100,
            max_imfs: 12,
            mirror_extrema: 2,
        }
    }
}

impl EmdConfig {
    pub fn describe(&self) -> String {
        format!(
            "sd={};max_sift={};max_imfs={}",
            self.sd_threshold, self.max_sift, self.max_imfs
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImfSet {
    pub imfs: Vec<TimeSeries>,
    pub residue: TimeSeries,
    pub sift_counts: Vec<usize>,
    /// IMFs that left sifting without meeting the extrema/zero-crossing rule.
    pub flagged: Vec<bool>,
}

impl ImfSet {
    /// `sum imfs + residue`, sample by sample.
    pub fn recombine(&self) -> Vec<f64> {
        let mut out = self.residue.samples().to_vec();
        for imf in &self.imfs {
            for (o, v) in out.iter_mut().zip(imf.samples()) {
                *o += v;
            }
        }
        out
    }
}

/// Local maxima and minima, excluding the end samples. A flat run counts
/// once, at its middle, when both neighbours lie on the same side.
pub fn extrema(x: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    let n = x.len();
    let mut i = 1;
    while i + 1 < n {
        let mut j = i;
        while j + 1 < n && x[j + 1] == x[i] {
            j += 1;
        }
        if j + 1 >= n {
            break;
        }
        let (prev, next) = (x[i - 1], x[j + 1]);
        let mid = (i + j) / 2;
        if x[i] > prev && x[i] > next {
            maxima.push(mid);
        } else if x[i] < prev && x[i] < next {
            minima.push(mid);
        }
        i = j + 1;
    }
    (maxima, minima)
}

/// Sign changes, ignoring exact zeros.
pub fn zero_crossings(x: &[f64]) -> usize {
    let mut count = 0;
    let mut last = 0.0f64;
    for &v in x {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

/// Extrema and zero-crossing counts differ by at most one.
pub fn is_imf(x: &[f64]) -> bool {
    let (maxima, minima) = extrema(x);
    let ext = maxima.len() + minima.len();
    ext.abs_diff(zero_crossings(x)) <= 1
}

/// Spline through `idx`, with up to `mirror` extrema reflected about each
/// end sample.
fn envelope(x: &[f64], idx: &[usize], mirror: usize) -> Vec<f64> {
    let n = x.len();
    let last = (n - 1) as f64;
    let k = mirror.min(idx.len());
    let mut knots: Vec<(f64, f64)> = Vec::with_capacity(idx.len() + 2 * k);
    for &i in idx[..k].iter().rev() {
        knots.push((-(i as f64), x[i]));
    }
    knots.extend(idx.iter().map(|&i| (i as f64, x[i])));
    for &i in idx[idx.len() - k..].iter().rev() {
        knots.push((2.0 * last - i as f64, x[i]));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = knots.into_iter().unzip();
    natural_cubic_on_grid(&xs, &ys, n)
}

/// Extracts one IMF candidate. Returns the candidate, the number of
/// sifting passes and whether it violates the IMF rule.
fn sift(r: &[f64], cfg: &EmdConfig) -> (Vec<f64>, usize, bool) {
    let mut h = r.to_vec();
    let mut passes = 0;
    while passes < cfg.max_sift {
        let (maxima, minima) = extrema(&h);
        if maxima.len() < 2 || minima.len() < 2 {
            break;
        }
        let upper = envelope(&h, &maxima, cfg.mirror_extrema);
        let lower = envelope(&h, &minima, cfg.mirror_extrema);
        let next: Vec<f64> = h
            .iter()
            .zip(upper.iter().zip(&lower))
            .map(|(v, (u, l))| v - 0.5 * (u + l))
            .collect();
        passes += 1;
        let den: f64 = h.iter().map(|v| v * v).sum();
        let num: f64 = h.iter().zip(&next).map(|(a, b)| (a - b) * (a - b)).sum();
        h = next;
        let sd = if den > 0.0 { num / den } else { 0.0 };
        if sd < cfg.sd_threshold && is_imf(&h) {
            return (h, passes, false);
        }
    }
    let flagged = !is_imf(&h);
    (h, passes, flagged)
}

pub fn emd(series: &TimeSeries, cfg: &EmdConfig) -> Result<ImfSet> {
    if !(cfg.sd_threshold > 0.0) || cfg.max_sift == 0 || cfg.max_imfs == 0 {
        return Err(Error::InvalidConfig(format!("bad EMD configuration {cfg:?}")));
    }
    let x = series.samples();
    let (maxima, minima) = extrema(x);
    if maxima.len() < 2 || minima.len() < 2 {
        return Err(Error::TooFewExtrema);
    }
    let floor = RESIDUE_FLOOR * series.max_abs();
    let mut residue = x.to_vec();
    let mut imfs = Vec::new();
    let mut sift_counts = Vec::new();
    let mut flagged = Vec::new();
    while imfs.len() < cfg.max_imfs {
        let (maxima, minima) = extrema(&residue);
        if maxima.len() < 2 || minima.len() < 2 {
            break;
        }
        if residue.iter().all(|v| v.abs() <= floor) {
            break;
        }
        let (imf, passes, bad) = sift(&residue, cfg);
        for (r, v) in residue.iter_mut().zip(&imf) {
            *r -= v;
        }
        imfs.push(series.with_samples(imf)?);
        sift_counts.push(passes);
        flagged.push(bad);
    }
    Ok(ImfSet {
        imfs,
        residue: series.with_samples(residue)?,
        sift_counts,
        flagged,
    })
}
