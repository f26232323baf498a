use nalgebra::{ComplexField, DMatrix};

/// Columns whose triangular factor falls below this fraction of the
/// largest are treated as dependent.
const RANK_TOLERANCE: f64 = 1e-13;

/// Least-squares solution of `a x = b`.
///
/// Householder QR when `a` has full column rank. Otherwise the minimum-norm
/// solution from an SVD truncated at `1e-14` relative; the SVD route alone
/// loses digits when the singular values cluster.
pub(crate) fn lstsq<T>(a: DMatrix<T>, b: &DMatrix<T>) -> Option<DMatrix<T>>
where
    T: ComplexField<RealField = f64>,
{
    let n = a.ncols();
    if n == 0 || a.nrows() < n {
        return svd_solve(a, b);
    }
    let qr = a.clone().qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..n).map(|i| r[(i, i)].clone().modulus()).collect();
    let dmax = diag.iter().copied().fold(0.0, f64::max);
    if dmax == 0.0 || diag.iter().any(|&d| d <= RANK_TOLERANCE * dmax) {
        return svd_solve(a, b);
    }
    let rhs = qr.q().adjoint() * b;
    r.solve_upper_triangular(&rhs)
}

fn svd_solve<T>(a: DMatrix<T>, b: &DMatrix<T>) -> Option<DMatrix<T>>
where
    T: ComplexField<RealField = f64>,
{
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    svd.solve(b, smax * 1e-14).ok()
}
