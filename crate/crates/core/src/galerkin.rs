//! Stochastic Galerkin projection of affine-parametric second-order systems
//! and the first-order realization with the internal energy as quadratic output.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::dense::{all_finite, max_abs, symmetrize};
use crate::polychaos::PcBasis;
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

/// `M(mu) p'' + D(mu) p' + K(mu) p = B u` with
/// `M(mu) = M_0 + sum_k mu_k M_k` (same for `D` and `K`) and constant `B`.
///
/// Parameters `mu_k` live on the box `[-1, 1]^q`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricSecondOrderSystem {
    mass: Vec<DMatrix<f64>>,
    damping: Vec<DMatrix<f64>>,
    stiffness: Vec<DMatrix<f64>>,
    input: DMatrix<f64>,
}

impl ParametricSecondOrderSystem {
    /// Each of `mass`, `damping`, `stiffness` holds the `q + 1` affine terms,
    /// the constant term first.
    pub fn new(
        mass: Vec<DMatrix<f64>>,
        damping: Vec<DMatrix<f64>>,
        stiffness: Vec<DMatrix<f64>>,
        input: DMatrix<f64>,
    ) -> Result<Self> {
        let n = input.nrows();
        if mass.is_empty() || mass.len() != damping.len() || mass.len() != stiffness.len() {
            return Err(Error::Dimension(format!(
                "affine term counts differ or are empty: M {}, D {}, K {}",
                mass.len(),
                damping.len(),
                stiffness.len()
            )));
        }
        for (name, terms) in [("M", &mass), ("D", &damping), ("K", &stiffness)] {
            for (k, t) in terms.iter().enumerate() {
                if t.shape() != (n, n) {
                    return Err(Error::Dimension(format!(
                        "{name}_{k} is {}x{}, expected {n}x{n}",
                        t.nrows(),
                        t.ncols()
                    )));
                }
                if !all_finite(t) {
                    return Err(Error::InvalidArgument(format!("{name}_{k} has non-finite entries")));
                }
                if t != &t.transpose() {
                    return Err(Error::InvalidArgument(format!("{name}_{k} is not symmetric")));
                }
            }
        }
        if !all_finite(&input) {
            return Err(Error::InvalidArgument("B has non-finite entries".into()));
        }
        Ok(Self { mass, damping, stiffness, input })
    }

    pub fn n(&self) -> usize {
        self.input.nrows()
    }

    pub fn n_in(&self) -> usize {
        self.input.ncols()
    }

    /// Number of parameters `q`.
    pub fn q(&self) -> usize {
        self.mass.len() - 1
    }

    pub fn mass_terms(&self) -> &[DMatrix<f64>] {
        &self.mass
    }

    pub fn damping_terms(&self) -> &[DMatrix<f64>] {
        &self.damping
    }

    pub fn stiffness_terms(&self) -> &[DMatrix<f64>] {
        &self.stiffness
    }

    pub fn input(&self) -> &DMatrix<f64> {
        &self.input
    }

    fn evaluate(terms: &[DMatrix<f64>], mu: &[f64]) -> DMatrix<f64> {
        let mut out = terms[0].clone();
        for (t, &m) in terms[1..].iter().zip(mu) {
            out += t * m;
        }
        out
    }

    pub fn mass_at(&self, mu: &[f64]) -> DMatrix<f64> {
        Self::evaluate(&self.mass, mu)
    }

    pub fn damping_at(&self, mu: &[f64]) -> DMatrix<f64> {
        Self::evaluate(&self.damping, mu)
    }

    pub fn stiffness_at(&self, mu: &[f64]) -> DMatrix<f64> {
        Self::evaluate(&self.stiffness, mu)
    }
}

/// Deterministic Galerkin system `Mh p'' + Dh p' + Kh p = Bh u` of size `n s`.
///
/// The state is ordered basis-major: block `i` of length `n` holds the
/// coefficients of the `i`-th chaos polynomial.
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    pub mass: CsrMatrix,
    pub damping: CsrMatrix,
    pub stiffness: CsrMatrix,
    pub input: DMatrix<f64>,
    n: usize,
    basis: PcBasis,
}

impl GalerkinSystem {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of basis polynomials `s`.
    pub fn s(&self) -> usize {
        self.basis.len()
    }

    /// Galerkin dimension `n s`.
    pub fn dim(&self) -> usize {
        self.n * self.basis.len()
    }

    pub fn basis(&self) -> &PcBasis {
        &self.basis
    }

    /// Internal energy `1/2 (p'^T Mh p' + p^T Kh p)`.
    pub fn energy(&self, p: &DVector<f64>, pdot: &DVector<f64>) -> Result<f64> {
        let ns = self.dim();
        if p.len() != ns || pdot.len() != ns {
            return Err(Error::Dimension(format!(
                "state vectors of length {} and {}, expected {ns}",
                p.len(),
                pdot.len()
            )));
        }
        Ok(0.5 * (self.mass.quadratic_form(pdot) + self.stiffness.quadratic_form(p)))
    }
}

/// Galerkin projection onto the chaos basis.
///
/// Block `(i, j)` of each matrix is `sum_k E[kappa_k Phi_i Phi_j] X_k`, i.e.
/// the matrix is `sum_k G_k ⊗ X_k` with sparse `G_k` from the basis.
pub fn assemble(sys: &ParametricSecondOrderSystem, basis: &PcBasis) -> Result<GalerkinSystem> {
    if basis.q() != sys.q() {
        return Err(Error::Dimension(format!("basis has {} parameters, system has {}", basis.q(), sys.q())));
    }
    let grams: Vec<CsrMatrix> = (0..=sys.q()).map(|k| basis.affine_gram(k)).collect::<Result<_>>()?;
    let project = |terms: &[DMatrix<f64>]| -> Result<CsrMatrix> {
        let parts: Vec<CsrMatrix> = terms
            .iter()
            .zip(&grams)
            .filter(|(t, _)| t.iter().any(|&v| v != 0.0))
            .map(|(t, g)| g.kron_dense(t))
            .collect::<Result<_>>()?;
        let ns = sys.n() * basis.len();
        CsrMatrix::sum(ns, ns, &parts)
    };
    let mass = project(&sys.mass)?;
    let damping = project(&sys.damping)?;
    let stiffness = project(&sys.stiffness)?;

    let ns = sys.n() * basis.len();
    let mut input = DMatrix::zeros(ns, sys.n_in());
    input.view_mut((0, 0), (sys.n(), sys.n_in())).copy_from(&sys.input);

    if Cholesky::new(mass.to_dense()).is_none() {
        return Err(Error::NotPositiveDefinite("Galerkin mass matrix"));
    }
    if Cholesky::new(stiffness.to_dense()).is_none() {
        return Err(Error::NotPositiveDefinite("Galerkin stiffness matrix"));
    }

    Ok(GalerkinSystem { mass, damping, stiffness, input, n: sys.n(), basis: basis.clone() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    FullOrder,
    Reduced,
}

/// `x' = A x + B u`, `y = x^T N x` with symmetric `N`.
///
/// `y` carries no factor 1/2; the internal energy is `y / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticOutputSystem {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    n: DMatrix<f64>,
    kind: ModelKind,
}

impl QuadraticOutputSystem {
    /// `n` is symmetrized; it must be symmetric to `1e-10` relative.
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, n: DMatrix<f64>, kind: ModelKind) -> Result<Self> {
        let m = a.nrows();
        if a.ncols() != m || b.nrows() != m || n.shape() != (m, m) {
            return Err(Error::Dimension(format!(
                "A {}x{}, B {}x{}, N {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols(),
                n.nrows(),
                n.ncols()
            )));
        }
        if !(all_finite(&a) && all_finite(&b) && all_finite(&n)) {
            return Err(Error::InvalidArgument("system matrices have non-finite entries".into()));
        }
        let asym = max_abs(&(&n - n.transpose()));
        if asym > 1e-10 * max_abs(&n) {
            return Err(Error::InvalidArgument("output matrix N is not symmetric".into()));
        }
        let n = if asym == 0.0 { n } else { symmetrize(&n) };
        Ok(Self { a, b, n, kind })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn n(&self) -> &DMatrix<f64> {
        &self.n
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_in(&self) -> usize {
        self.b.ncols()
    }

    /// `y = x^T N x`.
    pub fn output(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.n * x))
    }
}

/// First-order form `A = [[0, I], [-Mh^-1 Kh, -Mh^-1 Dh]]`, `B = [0; Mh^-1 Bh]`,
/// `N = blkdiag(Kh, Mh)` on the state `x = (p, p')`.
pub fn to_first_order(g: &GalerkinSystem) -> Result<QuadraticOutputSystem> {
    let ns = g.dim();
    let mass = g.mass.to_dense();
    let chol = Cholesky::new(mass.clone()).ok_or(Error::NotPositiveDefinite("Galerkin mass matrix"))?;
    let stiffness = g.stiffness.to_dense();
    let minv_k = chol.solve(&stiffness);
    let minv_d = chol.solve(&g.damping.to_dense());
    let minv_b = chol.solve(&g.input);

    let m = 2 * ns;
    let mut a = DMatrix::zeros(m, m);
    a.view_mut((0, ns), (ns, ns)).fill_with_identity();
    a.view_mut((ns, 0), (ns, ns)).copy_from(&(-minv_k));
    a.view_mut((ns, ns), (ns, ns)).copy_from(&(-minv_d));

    let mut b = DMatrix::zeros(m, g.input.ncols());
    b.view_mut((ns, 0), (ns, g.input.ncols())).copy_from(&minv_b);

    let mut n = DMatrix::zeros(m, m);
    n.view_mut((0, 0), (ns, ns)).copy_from(&stiffness);
    n.view_mut((ns, ns), (ns, ns)).copy_from(&mass);

    QuadraticOutputSystem::new(a, b, n, ModelKind::FullOrder)
}
