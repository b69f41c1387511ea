use nalgebra::{DMatrix, SymmetricEigen};

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub(crate) fn frobenius(m: &DMatrix<f64>) -> f64 {
    libm::sqrt(m.iter().map(|v| v * v).sum::<f64>())
}

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

pub(crate) fn all_finite(m: &DMatrix<f64>) -> bool {
    m.iter().all(|v| v.is_finite())
}

/// Eigenvalues of the symmetric part, ascending.
pub(crate) fn symmetric_eigenvalues(m: &DMatrix<f64>) -> alloc::vec::Vec<f64> {
    if m.is_empty() {
        return alloc::vec::Vec::new();
    }
    let mut ev: alloc::vec::Vec<f64> = SymmetricEigen::new(symmetrize(m)).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `trace(A B)` without forming the product.
pub(crate) fn trace_of_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}
