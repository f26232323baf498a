//! Natural cubic spline used for the sifting envelopes.

/// Interpolates the knots `(xs, ys)` (strictly ascending `xs`) and
/// evaluates at `0, 1, ..., n - 1`.
pub fn natural_cubic_on_grid(xs: &[f64], ys: &[f64], n: usize) -> Vec<f64> {
    let k = xs.len();
    debug_assert_eq!(k, ys.len());
    debug_assert!(k >= 2);
    let m = second_derivatives(xs, ys);
    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    for i in 0..n {
        let t = i as f64;
        while seg + 2 < k && t > xs[seg + 1] {
            seg += 1;
        }
        let (x0, x1) = (xs[seg], xs[seg + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        let v = a * ys[seg]
            + b * ys[seg + 1]
            + ((a * a * a - a) * m[seg] + (b * b * b - b) * m[seg + 1]) * h * h / 6.0;
        out.push(v);
    }
    out
}

/// Second derivatives at the knots with natural end conditions, from the
/// tridiagonal system solved by the Thomas algorithm.
fn second_derivatives(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let k = xs.len();
    let mut m = vec![0.0; k];
    if k < 3 {
        return m;
    }
    let inner = k - 2;
    let mut diag = vec![0.0; inner];
    let mut upper = vec![0.0; inner];
    let mut rhs = vec![0.0; inner];
    for i in 0..inner {
        let (h0, h1) = (xs[i + 1] - xs[i], xs[i + 2] - xs[i + 1]);
        diag[i] = (h0 + h1) / 3.0;
        upper[i] = h1 / 6.0;
        rhs[i] = (ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0;
    }
    // lower[i] = h_i / 6 couples unknown i to i - 1
    for i in 1..inner {
        let lower = (xs[i + 1] - xs[i]) / 6.0;
        let w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    m[inner] = rhs[inner - 1] / diag[inner - 1];
    for i in (0..inner - 1).rev() {
        m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knots_and_lines() {
        let xs = [-3.0, 0.0, 2.0, 5.0, 9.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let v = natural_cubic_on_grid(&xs, &ys, 9);
        for (i, y) in v.iter().enumerate() {
            assert!((y - (2.0 * i as f64 - 1.0)).abs() < 1e-12);
        }
        let ys = [1.0, -2.0, 0.5, 3.0, 0.0];
        let v = natural_cubic_on_grid(&xs, &ys, 10);
        assert!((v[0] + 2.0).abs() < 1e-12);
        assert!((v[2] - 0.5).abs() < 1e-12);
        assert!((v[5] - 3.0).abs() < 1e-12);
        assert!((v[9] - 0.0).abs() < 1e-12);
    }

    #[test]
    fn close_to_smooth_function() {
        let xs: Vec<f64> = (-2..=22).map(|i| i as f64 * 2.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x * 0.1).sin()).collect();
        let v = natural_cubic_on_grid(&xs, &ys, 40);
        // natural end conditions cost accuracy near the outer knots only
        for (i, y) in v.iter().enumerate() {
            let err = (y - (i as f64 * 0.1).sin()).abs();
            assert!(err < 2e-4);
            if (5..35).contains(&i) {
                assert!(err < 1e-5, "i={i} err={err}");
            }
        }
    }
}
