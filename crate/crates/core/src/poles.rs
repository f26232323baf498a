//! Shared machinery for the parametric estimators: complex residues from a
//! pole set, and collapsing conjugate pole pairs into real [`Mode`]s.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lstsq::lstsq;
use crate::series::{mode_energy, normalize_phase, Mode};

/// How many exponential components a parametric fit keeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderPolicy {
    /// Exactly this many poles.
    Fixed(usize),
    /// Number of singular values above `threshold * sigma_max`.
    SvdAuto(f64),
}

impl OrderPolicy {
    pub fn describe(&self) -> String {
        match self {
            OrderPolicy::Fixed(p) => format!("fixed({p})"),
            OrderPolicy::SvdAuto(t) => format!("svd_auto({t:e})"),
        }
    }
}

/// Numerical rank of a descending singular-value list.
pub(crate) fn numerical_rank(sorted_desc: &[f64], threshold: f64) -> usize {
    match sorted_desc.first() {
        Some(&smax) if smax > 0.0 => sorted_desc.iter().take_while(|&&s| s > threshold * smax).count(),
        _ => 0,
    }
}

/// Discrete-time poles with their complex residues:
/// `x[n] = sum_k h_k z_k^n`, `n = 0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleFit {
    pub poles: Vec<Complex64>,
    pub residues: Vec<Complex64>,
}

impl PoleFit {
    /// Least-squares residues of the Vandermonde system built on `poles`.
    ///
    /// Columns are normalised before solving; poles whose powers overflow
    /// over the record are given a zero residue.
    pub fn solve(x: &[f64], poles: Vec<Complex64>) -> Self {
        let n = x.len();
        let usable: Vec<usize> = poles
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > 1e-300 && z.norm().ln() * (n as f64) < 700.0)
            .map(|(i, _)| i)
            .collect();
        let mut residues = vec![Complex64::new(0.0, 0.0); poles.len()];
        if usable.is_empty() {
            return Self { poles, residues };
        }
        let mut v = DMatrix::<Complex64>::zeros(n, usable.len());
        let mut scale = vec![0.0; usable.len()];
        for (c, &k) in usable.iter().enumerate() {
            let z = poles[k];
            let mut acc = Complex64::new(1.0, 0.0);
            for r in 0..n {
                v[(r, c)] = acc;
                acc *= z;
            }
            let norm = v.column(c).norm();
            scale[c] = norm;
            v.column_mut(c).unscale_mut(norm);
        }
        let b = DMatrix::<Complex64>::from_iterator(n, 1, x.iter().map(|&v| Complex64::new(v, 0.0)));
        let y = lstsq(v, &b).unwrap_or_else(|| DMatrix::zeros(usable.len(), 1));
        for (c, &k) in usable.iter().enumerate() {
            residues[k] = y[c] / scale[c];
        }
        Self { poles, residues }
    }

    /// `sum_k h_k z_k^n` without taking the real part.
    pub fn complex_reconstruction(&self, n: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (z, h) in self.poles.iter().zip(&self.residues) {
            let mut acc = *h;
            for v in out.iter_mut() {
                *v += acc;
                acc *= z;
            }
        }
        out
    }

    /// Collapses conjugate pairs into real modes with `f >= 0`.
    ///
    /// Poles on the negative real axis sit at Nyquist and are dropped, as
    /// are modes with amplitude below `amplitude_floor`. Energies use
    /// `duration`. The result is sorted by ascending frequency.
    pub fn to_modes(&self, dt: f64, duration: f64, amplitude_floor: f64) -> Vec<Mode> {
        let mut modes = Vec::new();
        for (z, h) in self.poles.iter().zip(&self.residues) {
            let r = z.norm();
            if r <= 1e-300 {
                continue;
            }
            let on_axis = z.im.abs() <= 1e-12 * r;
            let (f, amplitude, phase) = if on_axis {
                if z.re < 0.0 {
                    continue;
                }
                let phase = if h.re >= 0.0 { 0.0 } else { PI };
                (0.0, h.norm(), phase)
            } else if z.im > 0.0 {
                (z.arg() / (2.0 * PI * dt), 2.0 * h.norm(), normalize_phase(h.arg()))
            } else {
                continue;
            };
            if !(amplitude >= amplitude_floor) || amplitude == 0.0 {
                continue;
            }
            let mut mode = Mode {
                f,
                alpha: r.ln() / dt,
                amplitude,
                phase,
                energy: 0.0,
            };
            mode.energy = mode_energy(&mode, duration);
            modes.push(mode);
        }
        modes.sort_by(|a, b| a.f.total_cmp(&b.f));
        modes
    }
}

/// Index of the highest-energy in-band mode. Energies within `1e-12`
/// relative of each other tie and the lower frequency wins.
pub fn dominant_index(modes: &[Mode], band: &crate::series::Band) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, m) in modes.iter().enumerate() {
        if !band.contains(m.f) {
            continue;
        }
        best = match best {
            None => Some(i),
            Some(b) => {
                let eb = modes[b].energy;
                let tie = (m.energy - eb).abs() <= 1e-12 * m.energy.max(eb);
                if tie {
                    if m.f < modes[b].f {
                        Some(i)
                    } else {
                        Some(b)
                    }
                } else if m.energy > eb {
                    Some(i)
                } else {
                    Some(b)
                }
            }
        };
    }
    best
}

/// Energy spectrum with one point per mode, sorted by frequency. Modes at
/// equal frequency are merged by summing their energies.
pub fn energy_spectrum(modes: &[Mode], duration: f64) -> crate::series::PowerSpectrum {
    let mut pts: Vec<(f64, f64)> = modes.iter().map(|m| (m.f, mode_energy(m, duration))).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut freqs: Vec<f64> = Vec::with_capacity(pts.len());
    let mut power: Vec<f64> = Vec::with_capacity(pts.len());
    for (f, e) in pts {
        if freqs.last() == Some(&f) {
            *power.last_mut().expect("parallel vectors") += e;
        } else {
            freqs.push(f);
            power.push(e);
        }
    }
    crate::series::PowerSpectrum::new(freqs, power).expect("mode energies are non-negative")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{evaluate_modes, Band};

    #[test]
    fn residues_of_known_poles() {
        let dt = 0.1;
        let m = Mode::new(0.3, -0.1, 1.5, 0.4);
        let x = evaluate_modes(&[m], 200, dt);
        let z = Complex64::from_polar((m.alpha * dt).exp(), 2.0 * PI * m.f * dt);
        let fit = PoleFit::solve(&x, vec![z, z.conj()]);
        let modes = fit.to_modes(dt, 20.0, 0.0);
        assert_eq!(modes.len(), 1);
        assert!((modes[0].amplitude - 1.5).abs() < 1e-10);
        assert!((modes[0].phase - 0.4).abs() < 1e-10);
        assert!((modes[0].f - 0.3).abs() < 1e-12);
        let im = fit.complex_reconstruction(200).iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        assert!(im < 1e-10);
    }

    #[test]
    fn real_pole_becomes_dc_mode() {
        let x: Vec<f64> = (0..50).map(|n| -2.0 * 0.9f64.powi(n)).collect();
        let fit = PoleFit::solve(&x, vec![Complex64::new(0.9, 0.0)]);
        let modes = fit.to_modes(1.0, 50.0, 0.0);
        assert_eq!(modes.len(), 1);
        assert_eq!(modes[0].f, 0.0);
        assert!((modes[0].amplitude - 2.0).abs() < 1e-10);
        assert_eq!(modes[0].phase, PI);
    }

    #[test]
    fn dominant_tie_prefers_lower_frequency() {
        let mut a = Mode::new(0.5, 0.0, 1.0, 0.0);
        let mut b = Mode::new(0.3, 0.0, 1.0, 0.0);
        a.energy = 10.0;
        b.energy = 10.0 * (1.0 + 1e-14);
        let modes = [a, b];
        assert_eq!(dominant_index(&modes, &Band::default()), Some(1));
        assert_eq!(dominant_index(&modes, &Band::new(1.0, 2.0).unwrap()), None);
    }

    #[test]
    fn rank_counts() {
        assert_eq!(numerical_rank(&[10.0, 1.0, 1e-9, 0.0], 1e-8), 2);
        assert_eq!(numerical_rank(&[0.0, 0.0], 1e-8), 0);
        assert_eq!(numerical_rank(&[], 1e-8), 0);
    }
}
