//! Dissipation inequality `d/dt x^T N x <= u^T R u + 2 u^T S x + x^T L x`
//! and the passivity-loss measure `lambda_max(A^T N + N A)`.

use alloc::format;

use nalgebra::DMatrix;

use crate::dense::{symmetric_eigenvalues, symmetrize};
use crate::galerkin::QuadraticOutputSystem;
use crate::{Error, Result};

/// Eigenvalues `<= PASSIVITY_TOL * ||T||_2` count as non-positive.
pub const PASSIVITY_TOL: f64 = 1e-10;

/// `T = A^T N + N A`, symmetrized.
pub fn dissipation_matrix(sys: &QuadraticOutputSystem) -> DMatrix<f64> {
    let na = sys.n() * sys.a();
    symmetrize(&(na.transpose() + na))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationReport {
    /// Largest eigenvalue of the dissipation matrix.
    pub lambda_max: f64,
    pub passive: bool,
    /// Absolute threshold `PASSIVITY_TOL * ||T||_2` applied to `lambda_max`.
    pub tolerance: f64,
}

/// Passivity with storage `x^T N x / 2` and output `B^T N x`, i.e. the
/// dissipation inequality with `R = 0`, `L = 0`, `S = B^T N`.
pub fn check_passivity(sys: &QuadraticOutputSystem) -> DissipationReport {
    let ev = symmetric_eigenvalues(&dissipation_matrix(sys));
    let (lo, hi) = match (ev.first(), ev.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (0.0, 0.0),
    };
    let tolerance = PASSIVITY_TOL * lo.abs().max(hi.abs());
    DissipationReport { lambda_max: hi, passive: hi <= tolerance, tolerance }
}

/// `[[A^T N + N A - L, N B - S^T], [B^T N - S, -R]]`.
pub fn composite_matrix(
    sys: &QuadraticOutputSystem,
    l: &DMatrix<f64>,
    r: &DMatrix<f64>,
    s: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let (m, k) = (sys.dim(), sys.n_in());
    if l.shape() != (m, m) || r.shape() != (k, k) || s.shape() != (k, m) {
        return Err(Error::Dimension(format!(
            "L {}x{}, R {}x{}, S {}x{} for a system with {m} states and {k} inputs",
            l.nrows(),
            l.ncols(),
            r.nrows(),
            r.ncols(),
            s.nrows(),
            s.ncols()
        )));
    }
    let nb = sys.n() * sys.b();
    let off = &nb - s.transpose();
    let mut out = DMatrix::zeros(m + k, m + k);
    out.view_mut((0, 0), (m, m)).copy_from(&(dissipation_matrix(sys) - l));
    out.view_mut((0, m), (m, k)).copy_from(&off);
    out.view_mut((m, 0), (k, m)).copy_from(&off.transpose());
    out.view_mut((m, m), (k, k)).copy_from(&(-r));
    Ok(symmetrize(&out))
}

#[derive(Debug, Clone)]
pub struct Certificate {
    pub lambda_max: f64,
    pub l: DMatrix<f64>,
    pub r: DMatrix<f64>,
    pub s: DMatrix<f64>,
    /// Largest eigenvalue of the composite matrix built from `(L, R, S)`.
    pub composite_max_eigenvalue: f64,
}

/// Certificate `R = 0`, `S = B^T N`, `L = lambda_max I` of the shifted
/// dissipation inequality `d/dt x^T N x <= 2 u^T B^T N x + lambda_max |x|^2`.
///
/// For a passive system (`lambda_max <= 0`) no shift is needed and `L = 0`.
pub fn shifted_dissipation_certificate(sys: &QuadraticOutputSystem) -> Result<Certificate> {
    let report = check_passivity(sys);
    let (m, k) = (sys.dim(), sys.n_in());
    let shift = report.lambda_max.max(0.0);
    let l = DMatrix::identity(m, m) * shift;
    let r = DMatrix::zeros(k, k);
    let s = sys.b().transpose() * sys.n();
    let composite = composite_matrix(sys, &l, &r, &s)?;
    let composite_max_eigenvalue = symmetric_eigenvalues(&composite).last().copied().unwrap_or(0.0);
    Ok(Certificate { lambda_max: report.lambda_max, l, r, s, composite_max_eigenvalue })
}
