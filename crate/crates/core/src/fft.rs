//! Thin wrappers over `rustfft` with unnormalised transforms.

use num_complex::Complex64;
use rustfft::FftPlanner;

pub fn forward(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    FftPlanner::new().plan_fft_forward(buf.len()).process(buf);
}

/// Unnormalised inverse: `forward` then `inverse` scales by `len`.
pub fn inverse(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    FftPlanner::new().plan_fft_inverse(buf.len()).process(buf);
}

pub fn forward_real(x: &[f64], len: usize) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    buf.resize(len.max(x.len()), Complex64::new(0.0, 0.0));
    forward(&mut buf);
    buf
}
