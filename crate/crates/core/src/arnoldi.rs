//! One-sided Krylov (Arnoldi) reduction with a single real expansion point.
//!
//! The basis spans `(wI - A)^{-1} B, (wI - A)^{-2} B, ...` and is grown one
//! vector at a time, so the bases for all `r` are nested.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::bt::ReducedModel;
use crate::galerkin::QuadraticOutputSystem;
use crate::lyapsylv::SchurForm;
use crate::{Error, Result};

/// Candidates whose norm drops below this fraction during
/// orthogonalization are deflated.
pub const DEFLATION_TOL: f64 = 1e-12;

/// Reduced models with spectral abscissa `>= -STABILITY_MARGIN` count as unstable.
pub const STABILITY_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovConfig {
    /// Real expansion point.
    pub omega: f64,
    pub r: usize,
    /// Gram–Schmidt passes per vector.
    pub reorth_passes: usize,
}

impl KrylovConfig {
    pub fn new(omega: f64, r: usize) -> Self {
        Self { omega, r, reorth_passes: 2 }
    }
}

/// Orthonormal Krylov basis, columns in generation order.
#[derive(Debug, Clone)]
pub struct KrylovBasis {
    pub v: DMatrix<f64>,
    /// Candidates dropped as linearly dependent.
    pub deflated: usize,
}

impl KrylovBasis {
    pub fn len(&self) -> usize {
        self.v.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.v.ncols() == 0
    }

    /// Galerkin projection onto the first `r` basis vectors.
    pub fn reduce(&self, fom: &QuadraticOutputSystem, r: usize) -> Result<ArnoldiReduction> {
        if r == 0 {
            return Err(Error::InvalidArgument("reduced dimension must be at least 1".into()));
        }
        if r > self.len() {
            return Err(Error::Rank { requested: r, rank: self.len() });
        }
        let v = self.v.columns(0, r).clone_owned();
        let model = ReducedModel::project(fom, v.clone(), v)?;
        let spectral_abscissa = SchurForm::new(model.system.a())?.spectral_abscissa();
        Ok(ArnoldiReduction {
            model,
            deflated: self.deflated,
            spectral_abscissa,
            stable: spectral_abscissa < -STABILITY_MARGIN,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ArnoldiReduction {
    pub model: ReducedModel,
    pub deflated: usize,
    pub spectral_abscissa: f64,
    pub stable: bool,
}

/// Builds up to `r_max` orthonormal Krylov vectors. Fewer are returned only
/// if the Krylov space is exhausted.
pub fn krylov_basis(fom: &QuadraticOutputSystem, omega: f64, r_max: usize, passes: usize) -> Result<KrylovBasis> {
    if !omega.is_finite() {
        return Err(Error::InvalidArgument(format!("expansion point {omega} is not finite")));
    }
    if passes == 0 {
        return Err(Error::InvalidArgument("at least one orthogonalization pass is required".into()));
    }
    let m = fom.dim();
    let shifted = DMatrix::identity(m, m) * omega - fom.a();
    let lu = shifted.lu();
    let u = lu.u();
    let (umin, umax) =
        u.diagonal().iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d.abs()), hi.max(d.abs())));
    if m > 0 && !(umin > f64::EPSILON * umax) {
        return Err(Error::SingularShift);
    }
    let solve = |x: &DVector<f64>| -> Result<DVector<f64>> {
        let y = lu.solve(x).ok_or(Error::SingularShift)?;
        if y.iter().all(|v| v.is_finite()) {
            Ok(y)
        } else {
            Err(Error::SingularShift)
        }
    };

    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut deflated = 0;
    let mut queue: VecDeque<DVector<f64>> = VecDeque::new();
    for j in 0..fom.n_in() {
        queue.push_back(solve(&fom.b().column(j).clone_owned())?);
    }
    while basis.len() < r_max.min(m) {
        let Some(mut w) = queue.pop_front() else { break };
        let start = w.norm();
        if start == 0.0 {
            deflated += 1;
            continue;
        }
        for _ in 0..passes {
            for q in &basis {
                let h = q.dot(&w);
                w.axpy(-h, q, 1.0);
            }
        }
        let norm = w.norm();
        if norm <= DEFLATION_TOL * start {
            deflated += 1;
            continue;
        }
        w /= norm;
        queue.push_back(solve(&w)?);
        basis.push(w);
    }
    let v = if basis.is_empty() { DMatrix::zeros(m, 0) } else { DMatrix::from_columns(&basis) };
    Ok(KrylovBasis { v, deflated })
}

pub fn reduce_arnoldi(fom: &QuadraticOutputSystem, cfg: &KrylovConfig) -> Result<ArnoldiReduction> {
    krylov_basis(fom, cfg.omega, cfg.r, cfg.reorth_passes)?.reduce(fom, cfg.r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bt::H2ErrorEstimator;
    use crate::galerkin::ModelKind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_system(rng: &mut ChaCha8Rng, m: usize, n_in: usize) -> QuadraticOutputSystem {
        let g = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0f64..1.0));
        let a = g - DMatrix::identity(m, m) * (m as f64);
        let b = DMatrix::from_fn(m, n_in, |_, _| rng.random_range(-1.0f64..1.0));
        let l = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0f64..1.0));
        QuadraticOutputSystem::new(a, b, &l * l.transpose(), ModelKind::FullOrder).unwrap()
    }

    #[test]
    fn first_vector_is_normalized_resolvent_of_b() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fom = random_system(&mut rng, 6, 1);
        let red = reduce_arnoldi(&fom, &KrylovConfig::new(1.0, 1)).unwrap();
        let shifted = DMatrix::identity(6, 6) - fom.a();
        let x = shifted.lu().solve(fom.b()).unwrap();
        let x = &x / x.norm();
        let v = red.model.v.column(0);
        assert!((v - x.column(0)).norm() < 1e-13 || (v + x.column(0)).norm() < 1e-13);
    }

    #[test]
    fn basis_is_orthonormal_and_nested() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let fom = random_system(&mut rng, 20, 2);
        let big = krylov_basis(&fom, 0.5, 12, 2).unwrap();
        let small = krylov_basis(&fom, 0.5, 5, 2).unwrap();
        let gram = big.v.transpose() * &big.v - DMatrix::identity(12, 12);
        assert!(gram.amax() < 1e-10);
        assert!((big.v.columns(0, 5) - &small.v).amax() < 1e-14);
        let red = big.reduce(&fom, 7).unwrap();
        assert_eq!(red.model.v, red.model.w);
    }

    #[test]
    fn full_space_reproduces_the_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fom = random_system(&mut rng, 8, 1);
        let red = reduce_arnoldi(&fom, &KrylovConfig::new(1.0, 8)).unwrap();
        assert!(red.stable);
        let est = H2ErrorEstimator::new(&fom).unwrap();
        assert!(est.difference(&red.model).unwrap() <= 1e-8 * est.norm());
    }

    #[test]
    fn dependent_inputs_are_deflated() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let fom = random_system(&mut rng, 6, 1);
        let b = DMatrix::from_fn(6, 2, |i, j| fom.b()[(i, 0)] * (j + 1) as f64);
        let twin = QuadraticOutputSystem::new(fom.a().clone(), b, fom.n().clone(), ModelKind::FullOrder).unwrap();
        let basis = krylov_basis(&twin, 1.0, 4, 2).unwrap();
        assert_eq!(basis.len(), 4);
        assert!(basis.deflated >= 1);
    }

    #[test]
    fn exhausted_space_is_reported() {
        // B is an eigenvector, so the Krylov space is one-dimensional
        let a = DMatrix::from_diagonal(&DVector::from_vec(alloc::vec![-1.0, -2.0, -3.0]));
        let b = DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
        let fom = QuadraticOutputSystem::new(a, b, DMatrix::identity(3, 3), ModelKind::FullOrder).unwrap();
        let basis = krylov_basis(&fom, 1.0, 3, 2).unwrap();
        assert_eq!(basis.len(), 1);
        assert!(matches!(basis.reduce(&fom, 2), Err(Error::Rank { requested: 2, rank: 1 })));
    }

    #[test]
    fn singular_shift_rejected() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(alloc::vec![1.0, -2.0]));
        let fom = QuadraticOutputSystem::new(
            a,
            DMatrix::from_element(2, 1, 1.0),
            DMatrix::identity(2, 2),
            ModelKind::FullOrder,
        )
        .unwrap();
        assert_eq!(reduce_arnoldi(&fom, &KrylovConfig::new(1.0, 1)).unwrap_err(), Error::SingularShift);
    }
}
