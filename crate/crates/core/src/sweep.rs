//! Reduction sweeps over reduced dimensions with per-row diagnostics.
//!
//! H2 errors are evaluated with [`H2ErrorEstimator::difference`] and carry no
//! factor 1/2; a failure for one `r` is recorded in its row and the sweep
//! continues.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::arnoldi::KrylovBasis;
use crate::bt::{truncate, BalancedFactorization, H2ErrorEstimator, ReducedModel};
use crate::galerkin::QuadraticOutputSystem;
use crate::lyapsylv::SchurForm;
use crate::passivity::check_passivity;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reducer {
    BalancedTruncation,
    Arnoldi { omega: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionRow {
    pub r: usize,
    /// `sigma_r` for balanced truncation.
    pub sigma_r: Option<f64>,
    pub h2_abs: Option<f64>,
    pub h2_rel: Option<f64>,
    pub lambda_max: Option<f64>,
    pub stable: bool,
    /// Reason for missing values.
    pub failure: Option<String>,
}

impl ReductionRow {
    fn failed(r: usize, sigma_r: Option<f64>, why: String) -> Self {
        Self { r, sigma_r, h2_abs: None, h2_rel: None, lambda_max: None, stable: false, failure: Some(why) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    pub reducer: Reducer,
    /// `||H||_H2` of the full-order model.
    pub h2_norm: f64,
    pub rows: Vec<ReductionRow>,
}

fn evaluate(est: &H2ErrorEstimator, rom: &ReducedModel, stable: bool, sigma_r: Option<f64>) -> ReductionRow {
    let lambda_max = Some(check_passivity(&rom.system).lambda_max);
    let (h2_abs, h2_rel, failure) = if stable {
        match est.difference(rom) {
            Ok(e) => (Some(e), (est.norm() > 0.0).then(|| e / est.norm()), None),
            Err(err) => (None, None, Some(err.to_string())),
        }
    } else {
        (None, None, Some("reduced model is unstable".to_string()))
    };
    ReductionRow { r: rom.r, sigma_r, h2_abs, h2_rel, lambda_max, stable, failure }
}

pub fn bt_row(
    est: &H2ErrorEstimator,
    bal: &BalancedFactorization,
    fom: &QuadraticOutputSystem,
    r: usize,
) -> ReductionRow {
    let sigma_r = r.checked_sub(1).and_then(|i| bal.sigma.get(i)).copied();
    let rom = match truncate(bal, fom, r) {
        Ok(rom) => rom,
        Err(e) => return ReductionRow::failed(r, sigma_r, e.to_string()),
    };
    let stable = match SchurForm::new(rom.system.a()) {
        Ok(s) => s.spectral_abscissa() < 0.0,
        Err(e) => return ReductionRow::failed(r, sigma_r, e.to_string()),
    };
    evaluate(est, &rom, stable, sigma_r)
}

pub fn arnoldi_row(est: &H2ErrorEstimator, basis: &KrylovBasis, fom: &QuadraticOutputSystem, r: usize) -> ReductionRow {
    match basis.reduce(fom, r) {
        Ok(red) => evaluate(est, &red.model, red.stable, None),
        Err(e) => ReductionRow::failed(r, None, e.to_string()),
    }
}

pub fn bt_sweep(
    est: &H2ErrorEstimator,
    bal: &BalancedFactorization,
    fom: &QuadraticOutputSystem,
    rs: impl IntoIterator<Item = usize>,
    mut on_row: impl FnMut(&ReductionRow),
) -> ReductionReport {
    let rows = rs
        .into_iter()
        .map(|r| {
            let row = bt_row(est, bal, fom, r);
            on_row(&row);
            row
        })
        .collect();
    ReductionReport { reducer: Reducer::BalancedTruncation, h2_norm: est.norm(), rows }
}

pub fn arnoldi_sweep(
    est: &H2ErrorEstimator,
    basis: &KrylovBasis,
    omega: f64,
    fom: &QuadraticOutputSystem,
    rs: impl IntoIterator<Item = usize>,
    mut on_row: impl FnMut(&ReductionRow),
) -> ReductionReport {
    let rows = rs
        .into_iter()
        .map(|r| {
            let row = arnoldi_row(est, basis, fom, r);
            on_row(&row);
            row
        })
        .collect();
    ReductionReport { reducer: Reducer::Arnoldi { omega }, h2_norm: est.norm(), rows }
}
