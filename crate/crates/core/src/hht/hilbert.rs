use std::f64::consts::PI;

use num_complex::Complex64;

use crate::fft;
use crate::series::TimeSeries;

/// Analytic-signal view of one IMF.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticImf {
    /// Discrete Hilbert transform of the IMF.
    pub hilbert: Vec<f64>,
    pub amplitude: Vec<f64>,
    /// Unwrapped, rad.
    pub phase: Vec<f64>,
    /// Hz.
    pub inst_freq: Vec<f64>,
}

/// Imaginary part of the analytic signal built by zeroing the negative
/// frequencies of the DFT.
pub fn hilbert_transform(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut buf = fft::forward_real(x, n);
    for (k, c) in buf.iter_mut().enumerate() {
        let gain = if k == 0 || (n % 2 == 0 && k == n / 2) {
            1.0
        } else if k < n.div_ceil(2) {
            2.0
        } else {
            0.0
        };
        *c *= gain;
    }
    fft::inverse(&mut buf);
    let inv = 1.0 / n as f64;
    buf.iter().map(|c: &Complex64| c.im * inv).collect()
}

/// Adds multiples of `2 pi` so consecutive samples differ by at most `pi`.
pub fn unwrap_phase(phase: &mut [f64]) {
    let mut offset = 0.0;
    for k in 1..phase.len() {
        let raw = phase[k] + offset;
        let mut d = raw - phase[k - 1];
        while d > PI {
            offset -= 2.0 * PI;
            d -= 2.0 * PI;
        }
        while d < -PI {
            offset += 2.0 * PI;
            d += 2.0 * PI;
        }
        phase[k] = phase[k - 1] + d;
    }
}

pub fn hilbert_analytic(imf: &TimeSeries) -> AnalyticImf {
    let c = imf.samples();
    let h = hilbert_transform(c);
    let amplitude: Vec<f64> = c.iter().zip(&h).map(|(a, b)| (a * a + b * b).sqrt()).collect();
    let mut phase: Vec<f64> = c.iter().zip(&h).map(|(a, b)| b.atan2(*a)).collect();
    unwrap_phase(&mut phase);

    let n = c.len();
    let dt = imf.dt();
    let inst_freq = if amplitude.iter().all(|&a| a == 0.0) {
        vec![0.0; n]
    } else {
        let to_hz = 1.0 / (2.0 * PI);
        (0..n)
            .map(|k| {
                let d = if k == 0 {
                    (phase[1] - phase[0]) / dt
                } else if k == n - 1 {
                    (phase[n - 1] - phase[n - 2]) / dt
                } else {
                    (phase[k + 1] - phase[k - 1]) / (2.0 * dt)
                };
                d * to_hz
            })
            .collect()
    };
    AnalyticImf {
        hilbert: h,
        amplitude,
        phase,
        inst_freq,
    }
}
