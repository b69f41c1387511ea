//! Balanced truncation for linear systems with quadratic output `y = x^T N x`.
//!
//! The controllability Gramian solves `A P + P A^T + B B^T = 0` and the
//! observability Gramian `A^T Q + Q A + N P N = 0`, computed in that order.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SVD};

use crate::dense::{symmetrize, trace_of_product};
use crate::galerkin::{ModelKind, QuadraticOutputSystem};
use crate::lyapsylv::{symmetric_factor, Op, SchurForm};
use crate::{Error, Result};

/// Eigenvalue truncation used when factoring the Gramians in [`balance`].
pub const GRAMIAN_FACTOR_TOL: f64 = 1e-14;

/// Singular values `<= RANK_TOL * sigma_1` do not count towards the rank.
pub const RANK_TOL: f64 = 1e-13;

/// Negative squared errors down to `-CLAMP_TOL * ||H||^2` are rounded to 0.
pub const CLAMP_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Gramians {
    pub schur: SchurForm,
    pub p: DMatrix<f64>,
    pub q: DMatrix<f64>,
}

/// Solves both Gramian equations with one Schur decomposition of `A`.
pub fn gramians(sys: &QuadraticOutputSystem) -> Result<Gramians> {
    let schur = SchurForm::new(sys.a())?;
    gramians_with(sys, schur)
}

fn gramians_with(sys: &QuadraticOutputSystem, schur: SchurForm) -> Result<Gramians> {
    let p = schur.solve_lyapunov(Op::Identity, &(sys.b() * sys.b().transpose()))?;
    let npn = symmetrize(&(sys.n() * &p * sys.n()));
    let q = schur.solve_lyapunov(Op::Transpose, &npn)?;
    Ok(Gramians { schur, p, q })
}

#[derive(Debug, Clone)]
pub struct BalancedFactorization {
    /// `P ≈ Z_P Z_P^T`, m x k_P.
    pub zp: DMatrix<f64>,
    /// `Q ≈ Z_Q Z_Q^T`, m x k_Q.
    pub zq: DMatrix<f64>,
    /// Singular values of `Z_P^T Z_Q`, non-increasing.
    pub sigma: Vec<f64>,
    /// Left singular vectors, k_P x len(sigma).
    pub u: DMatrix<f64>,
    /// Right singular vectors, k_Q x len(sigma).
    pub v: DMatrix<f64>,
}

impl BalancedFactorization {
    /// Number of singular values above `RANK_TOL * sigma_1`.
    pub fn numerical_rank(&self) -> usize {
        match self.sigma.first() {
            Some(&s1) if s1 > 0.0 => self.sigma.iter().take_while(|&&s| s > RANK_TOL * s1).count(),
            _ => 0,
        }
    }
}

pub fn balance(fom: &QuadraticOutputSystem) -> Result<BalancedFactorization> {
    balance_gramians(&gramians(fom)?, GRAMIAN_FACTOR_TOL)
}

pub fn balance_gramians(g: &Gramians, tol: f64) -> Result<BalancedFactorization> {
    let zp = symmetric_factor(&g.p, tol)?;
    let zq = symmetric_factor(&g.q, tol)?;
    let k = zp.ncols().min(zq.ncols());
    if k == 0 {
        return Ok(BalancedFactorization {
            u: DMatrix::zeros(zp.ncols(), 0),
            v: DMatrix::zeros(zq.ncols(), 0),
            zp,
            zq,
            sigma: Vec::new(),
        });
    }
    let svd = SVD::new(zp.transpose() * &zq, true, true);
    let (u_all, vt_all) = (svd.u.ok_or(Error::NoConvergence)?, svd.v_t.ok_or(Error::NoConvergence)?);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = DMatrix::from_fn(zp.ncols(), k, |r, c| u_all[(r, order[c])]);
    let v = DMatrix::from_fn(zq.ncols(), k, |r, c| vt_all[(order[c], r)]);
    Ok(BalancedFactorization { zp, zq, sigma, u, v })
}

/// Projected model `(W^T A V, W^T B, V^T N V)` with `W^T V = I_r`.
#[derive(Debug, Clone)]
pub struct ReducedModel {
    pub r: usize,
    pub system: QuadraticOutputSystem,
    pub v: DMatrix<f64>,
    pub w: DMatrix<f64>,
}

impl ReducedModel {
    /// Petrov–Galerkin projection of `fom` onto `V` along `W`.
    pub fn project(fom: &QuadraticOutputSystem, v: DMatrix<f64>, w: DMatrix<f64>) -> Result<Self> {
        let (m, r) = v.shape();
        if m != fom.dim() || w.shape() != (m, r) {
            return Err(Error::Dimension(format!(
                "projections are {}x{} and {}x{}, state dimension {}",
                m,
                r,
                w.nrows(),
                w.ncols(),
                fom.dim()
            )));
        }
        let wt = w.transpose();
        let system = QuadraticOutputSystem::new(
            &wt * fom.a() * &v,
            &wt * fom.b(),
            symmetrize(&(v.transpose() * fom.n() * &v)),
            ModelKind::Reduced,
        )?;
        Ok(Self { r, system, v, w })
    }

    /// `max |W^T V - I|`.
    pub fn biorthogonality_error(&self) -> f64 {
        let g = self.w.transpose() * &self.v - DMatrix::identity(self.r, self.r);
        g.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// `V = Z_P U_1 S^{-1/2}`, `W = Z_Q V_1 S^{-1/2}`, then `W` is replaced by
/// `W (V^T W)^{-1}` so that `W^T V = I_r` holds to working precision.
pub fn truncate(bal: &BalancedFactorization, fom: &QuadraticOutputSystem, r: usize) -> Result<ReducedModel> {
    if r == 0 {
        return Err(Error::InvalidArgument("reduced dimension must be at least 1".into()));
    }
    let rank = bal.numerical_rank();
    if r > rank {
        return Err(Error::Rank { requested: r, rank });
    }
    if bal.zp.nrows() != fom.dim() {
        return Err(Error::Dimension(format!(
            "factorization of dimension {} used with system of dimension {}",
            bal.zp.nrows(),
            fom.dim()
        )));
    }
    let scale = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        r,
        bal.sigma[..r].iter().map(|&s| 1.0 / libm::sqrt(s)),
    ));
    let v = &bal.zp * bal.u.columns(0, r) * &scale;
    let w = &bal.zq * bal.v.columns(0, r) * &scale;
    let vtw = v.transpose() * &w;
    let w = vtw.transpose().lu().solve(&w.transpose()).ok_or(Error::Singular)?.transpose();
    ReducedModel::project(fom, v, w)
}

/// `||H||_{H2} = sqrt(trace(B^T Q B))`.
pub fn h2_norm(sys: &QuadraticOutputSystem) -> Result<f64> {
    let g = gramians(sys)?;
    Ok(libm::sqrt(trace_of_product(&sys.b().transpose(), &(&g.q * sys.b())).max(0.0)))
}

/// Three-term H2 error `sqrt(|H|^2 + |Hr|^2 - 2 trace(B^T Z Br))` of a reduced model.
pub fn h2_error(fom: &QuadraticOutputSystem, rom: &ReducedModel) -> Result<f64> {
    H2ErrorEstimator::new(fom)?.three_term(&rom.system)
}

/// Caches the full-order Schur form and Gramians across reduced models.
#[derive(Debug, Clone)]
pub struct H2ErrorEstimator {
    fom: QuadraticOutputSystem,
    gramians: Gramians,
    norm_sq: f64,
}

impl H2ErrorEstimator {
    pub fn new(fom: &QuadraticOutputSystem) -> Result<Self> {
        Self::from_gramians(fom, gramians(fom)?)
    }

    pub fn from_gramians(fom: &QuadraticOutputSystem, gramians: Gramians) -> Result<Self> {
        if gramians.p.nrows() != fom.dim() {
            return Err(Error::Dimension("Gramians do not match the system".into()));
        }
        let norm_sq = trace_of_product(&fom.b().transpose(), &(&gramians.q * fom.b())).max(0.0);
        Ok(Self { fom: fom.clone(), gramians, norm_sq })
    }

    pub fn gramians(&self) -> &Gramians {
        &self.gramians
    }

    /// `||H||_{H2}` of the full-order model.
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq)
    }

    fn finish(&self, err_sq: f64) -> Result<f64> {
        if !err_sq.is_finite() {
            return Err(Error::NoConvergence);
        }
        if err_sq < 0.0 {
            if err_sq < -CLAMP_TOL * self.norm_sq {
                return Err(Error::Indefinite { min_eigenvalue: err_sq, allowed: -CLAMP_TOL * self.norm_sq });
            }
            return Ok(0.0);
        }
        Ok(libm::sqrt(err_sq))
    }

    /// Error from the three-term formula with `A X + X Ar^T + B Br^T = 0`
    /// and `A^T Z + Z Ar + N X Nr = 0`.
    ///
    /// Loses accuracy through cancellation once the relative error falls
    /// below about `1e-7`.
    pub fn three_term(&self, rom: &QuadraticOutputSystem) -> Result<f64> {
        let fom = &self.fom;
        if rom.n_in() != fom.n_in() {
            return Err(Error::Dimension(format!("{} inputs vs {}", rom.n_in(), fom.n_in())));
        }
        let rs = SchurForm::new(rom.a())?;
        rs.require_stable()?;
        let s = &self.gramians.schur;
        let pr = rs.solve_lyapunov(Op::Identity, &(rom.b() * rom.b().transpose()))?;
        let qr = rs.solve_lyapunov(Op::Transpose, &symmetrize(&(rom.n() * &pr * rom.n())))?;
        let x = s.solve_sylvester(Op::Identity, &rs, Op::Transpose, &(fom.b() * rom.b().transpose()))?;
        let z = s.solve_sylvester(Op::Transpose, &rs, Op::Identity, &(fom.n() * &x * rom.n()))?;
        let rom_sq = trace_of_product(&rom.b().transpose(), &(&qr * rom.b()));
        let cross = trace_of_product(&fom.b().transpose(), &(&z * rom.b()));
        self.finish(self.norm_sq + rom_sq - 2.0 * cross)
    }

    /// Error from the Gramian of the error system in the coordinates
    /// `(x - V xr, xr)`, where no terms of the size of `||H||^2` cancel.
    ///
    /// With `R = A V - V Ar` and `E = B - V Br` the error system has
    /// `A_e = [[A, R], [0, Ar]]`, `B_e = [E; Br]`, `N_e = [[N, N V], [V^T N, 0]]`
    /// and `||H - Hr||^2 = trace((N_e P_e)^2)`.
    pub fn difference(&self, rom: &ReducedModel) -> Result<f64> {
        let fom = &self.fom;
        let sys = &rom.system;
        if rom.v.nrows() != fom.dim() || sys.n_in() != fom.n_in() {
            return Err(Error::Dimension("reduced model does not match the full-order model".into()));
        }
        let rs = SchurForm::new(sys.a())?;
        rs.require_stable()?;
        let s = &self.gramians.schur;
        let v = &rom.v;
        let res = fom.a() * v - v * sys.a();
        let e = fom.b() - v * sys.b();

        let pr = rs.solve_lyapunov(Op::Identity, &(sys.b() * sys.b().transpose()))?;
        let xe = s.solve_sylvester(Op::Identity, &rs, Op::Transpose, &(&res * &pr + &e * sys.b().transpose()))?;
        let c = &res * xe.transpose();
        let c = &c + c.transpose() + &e * e.transpose();
        let pee = s.solve_lyapunov_unverified(Op::Identity, &c)?;

        let nv = fom.n() * v;
        let f11 = fom.n() * &pee + &nv * xe.transpose();
        let f12 = fom.n() * &xe + &nv * &pr;
        let f21 = nv.transpose() * &pee;
        let f22 = nv.transpose() * &xe;
        let err_sq = trace_of_product(&f11, &f11) + 2.0 * trace_of_product(&f12, &f21) + trace_of_product(&f22, &f22);
        self.finish(err_sq)
    }
}
