//! Dense Lyapunov and Sylvester solvers (Bartels–Stewart) and the symmetric
//! factorization of semi-definite Gramians.
//!
//! Everything goes through a [`SchurForm`] `A = U T U^T` with `T` upper
//! quasi-triangular. Because `A^T = U T^T U^T`, one decomposition serves both
//! `A` and `A^T`, and a decomposition of the full-order matrix can be reused
//! for every reduced model in a sweep.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::dense::{all_finite, frobenius, symmetrize};
use crate::{Error, Result};

/// Relative residual accepted after every Lyapunov or Sylvester solve.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Default eigenvalue truncation of [`symmetric_factor`].
pub const FACTOR_TOL: f64 = 1e-12;

/// Negative eigenvalues down to `-NEGATIVE_EIGENVALUE_TOL * ||X||_2` are
/// treated as round-off of a semi-definite matrix.
pub const NEGATIVE_EIGENVALUE_TOL: f64 = 1e-10;

/// Selects `A` or `A^T` from a [`SchurForm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Identity,
    Transpose,
}

/// Real Schur decomposition `A = U T U^T` with standardized block structure.
#[derive(Debug, Clone)]
pub struct SchurForm {
    a: DMatrix<f64>,
    u: DMatrix<f64>,
    t: DMatrix<f64>,
    t_transposed: DMatrix<f64>,
    blocks: Vec<(usize, usize)>,
    eig_real: Vec<f64>,
}

impl SchurForm {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Dimension(alloc::format!("Schur form of {}x{} matrix", n, a.ncols())));
        }
        if !all_finite(a) {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        if n == 0 {
            return Ok(Self {
                a: a.clone(),
                u: DMatrix::zeros(0, 0),
                t: DMatrix::zeros(0, 0),
                t_transposed: DMatrix::zeros(0, 0),
                blocks: Vec::new(),
                eig_real: Vec::new(),
            });
        }
        let schur =
            nalgebra::linalg::Schur::try_new(a.clone(), f64::EPSILON, 200 * n.max(10)).ok_or(Error::NoConvergence)?;
        let (u, mut t) = schur.unpack();

        for j in 0..n {
            for i in (j + 2)..n {
                t[(i, j)] = 0.0;
            }
        }
        for i in 0..n.saturating_sub(1) {
            let scale = t[(i, i)].abs() + t[(i + 1, i + 1)].abs();
            if t[(i + 1, i)].abs() <= f64::EPSILON * scale {
                t[(i + 1, i)] = 0.0;
            }
        }

        let mut blocks = Vec::new();
        let mut eig_real = Vec::with_capacity(n);
        let mut i = 0;
        while i < n {
            if i + 1 < n && t[(i + 1, i)] != 0.0 {
                if i + 2 < n && t[(i + 2, i + 1)] != 0.0 {
                    // not quasi-triangular: the QR iteration left a larger bump
                    return Err(Error::NoConvergence);
                }
                let (p, q, r, s) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
                let mean = 0.5 * (p + s);
                let disc = 0.25 * (p - s) * (p - s) + q * r;
                if disc >= 0.0 {
                    eig_real.push(mean + libm::sqrt(disc));
                    eig_real.push(mean - libm::sqrt(disc));
                } else {
                    eig_real.push(mean);
                    eig_real.push(mean);
                }
                blocks.push((i, 2));
                i += 2;
            } else {
                eig_real.push(t[(i, i)]);
                blocks.push((i, 1));
                i += 1;
            }
        }
        let t_transposed = t.transpose();
        Ok(Self { a: a.clone(), u, t, t_transposed, blocks, eig_real })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// Orthogonal factor `U`.
    pub fn unitary(&self) -> &DMatrix<f64> {
        &self.u
    }

    /// Quasi-triangular factor `T`.
    pub fn triangular(&self) -> &DMatrix<f64> {
        &self.t
    }

    /// Real parts of the eigenvalues, in Schur order.
    pub fn eigenvalue_real_parts(&self) -> &[f64] {
        &self.eig_real
    }

    /// Largest real part of the spectrum (`-inf` for an empty matrix).
    pub fn spectral_abscissa(&self) -> f64 {
        self.eig_real.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_stable(&self) -> bool {
        self.spectral_abscissa() < 0.0
    }

    pub(crate) fn require_stable(&self) -> Result<()> {
        let abscissa = self.spectral_abscissa();
        if abscissa < 0.0 || self.dim() == 0 {
            Ok(())
        } else {
            Err(Error::Unstable(abscissa))
        }
    }

    fn op_matrix(&self, op: Op) -> DMatrix<f64> {
        match op {
            Op::Identity => self.a.clone(),
            Op::Transpose => self.a.transpose(),
        }
    }

    fn quasi(&self, op: Op) -> Quasi<'_> {
        match op {
            Op::Identity => Quasi { t: &self.t, upper: true, blocks: &self.blocks },
            Op::Transpose => Quasi { t: &self.t_transposed, upper: false, blocks: &self.blocks },
        }
    }

    /// Solves `op(A) Y + Y op(F) + C = 0` without residual verification.
    pub fn solve_sylvester_unchecked(
        &self,
        op_a: Op,
        f: &SchurForm,
        op_f: Op,
        c: &DMatrix<f64>,
    ) -> Result<DMatrix<f64>> {
        let (m, r) = (self.dim(), f.dim());
        if c.shape() != (m, r) {
            return Err(Error::Dimension(alloc::format!(
                "right-hand side is {}x{}, expected {m}x{r}",
                c.nrows(),
                c.ncols()
            )));
        }
        if m == 0 || r == 0 {
            return Ok(DMatrix::zeros(m, r));
        }
        let mut work = -(self.u.transpose() * c * &f.u);
        solve_quasi_triangular(&self.quasi(op_a), &f.quasi(op_f), &mut work)?;
        Ok(&self.u * work * f.u.transpose())
    }

    /// Solves `op(A) Y + Y op(F) + C = 0` and verifies
    /// `||op(A) Y + Y op(F) + C||_F / max(||C||_F, 1) < RESIDUAL_TOL`.
    pub fn solve_sylvester(&self, op_a: Op, f: &SchurForm, op_f: Op, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let y = self.solve_sylvester_unchecked(op_a, f, op_f, c)?;
        let res = frobenius(&(self.op_matrix(op_a) * &y + &y * f.op_matrix(op_f) + c));
        let rel = res / frobenius(c).max(1.0);
        if !(rel < RESIDUAL_TOL) {
            return Err(Error::Residual { equation: "Sylvester equation", residual: rel, tolerance: RESIDUAL_TOL });
        }
        Ok(y)
    }

    /// Solves `op(A) X + X op(A)^T + C = 0` for symmetric `C`, returns the
    /// symmetrized solution and verifies `||residual||_F / ||C||_F < RESIDUAL_TOL`.
    pub fn solve_lyapunov(&self, op: Op, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.require_stable()?;
        let x = self.solve_lyapunov_unverified(op, c)?;
        let c_norm = frobenius(c);
        if c_norm > 0.0 {
            let a = self.op_matrix(op);
            let ax = &a * &x;
            let res = frobenius(&(&ax + ax.transpose() + c));
            let rel = res / c_norm;
            if !(rel < RESIDUAL_TOL) {
                return Err(Error::Residual { equation: "Lyapunov equation", residual: rel, tolerance: RESIDUAL_TOL });
            }
        }
        Ok(x)
    }

    /// Lyapunov solve with stability and shape checks but no residual check.
    pub fn solve_lyapunov_unverified(&self, op: Op, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.require_stable()?;
        let m = self.dim();
        if c.shape() != (m, m) {
            return Err(Error::Dimension(alloc::format!(
                "right-hand side is {}x{}, expected {m}x{m}",
                c.nrows(),
                c.ncols()
            )));
        }
        let other = match op {
            Op::Identity => Op::Transpose,
            Op::Transpose => Op::Identity,
        };
        let x = self.solve_sylvester_unchecked(op, self, other, c)?;
        Ok(symmetrize(&x))
    }
}

/// Quasi-triangular coefficient, stored explicitly so that columns are
/// contiguous whichever triangle is populated.
struct Quasi<'a> {
    t: &'a DMatrix<f64>,
    upper: bool,
    blocks: &'a [(usize, usize)],
}

/// In place: overwrites `c` with `Y` solving `L Y + Y R = C`.
fn solve_quasi_triangular(l: &Quasi<'_>, r: &Quasi<'_>, c: &mut DMatrix<f64>) -> Result<()> {
    let m = c.nrows();
    let rt = r.t;
    let lt = l.t.as_slice();

    let col_order: Vec<(usize, usize)> =
        if r.upper { r.blocks.to_vec() } else { r.blocks.iter().rev().copied().collect() };
    let row_order: Vec<(usize, usize)> =
        if l.upper { l.blocks.iter().rev().copied().collect() } else { l.blocks.to_vec() };

    let ncols = c.ncols();
    let data = c.as_mut_slice();
    for &(j0, w) in &col_order {
        // Couple with the already solved columns.
        let (solved_lo, solved_hi) = if r.upper { (0, j0) } else { (j0 + w, ncols) };
        for jj in j0..j0 + w {
            for cc in solved_lo..solved_hi {
                let coef = rt[(cc, jj)];
                if coef == 0.0 {
                    continue;
                }
                let (src, dst) = column_pair(data, m, cc, jj);
                axpy(-coef, src, dst);
            }
        }

        let mut rjj = [[0.0; 2]; 2];
        for a in 0..w {
            for b in 0..w {
                rjj[a][b] = rt[(j0 + a, j0 + b)];
            }
        }

        for &(i0, h) in &row_order {
            let mut lkk = [[0.0; 2]; 2];
            for a in 0..h {
                for b in 0..h {
                    lkk[a][b] = lt[(i0 + b) * m + i0 + a];
                }
            }
            let mut rhs = [0.0; 4];
            for b in 0..w {
                for a in 0..h {
                    rhs[b * h + a] = data[(j0 + b) * m + i0 + a];
                }
            }
            let y = solve_small(&lkk, h, &rjj, w, rhs)?;
            for b in 0..w {
                for a in 0..h {
                    data[(j0 + b) * m + i0 + a] = y[b * h + a];
                }
            }
            // Eliminate the solved rows from the remaining ones.
            let (lo, hi) = if l.upper { (0, i0) } else { (i0 + h, m) };
            if lo == hi {
                continue;
            }
            for a in 0..h {
                let lcol = &lt[(i0 + a) * m + lo..(i0 + a) * m + hi];
                for b in 0..w {
                    let coef = y[b * h + a];
                    if coef == 0.0 {
                        continue;
                    }
                    let dst = &mut data[(j0 + b) * m + lo..(j0 + b) * m + hi];
                    axpy(-coef, lcol, dst);
                }
            }
        }
    }
    Ok(())
}

fn column_pair(data: &mut [f64], m: usize, src: usize, dst: usize) -> (&[f64], &mut [f64]) {
    debug_assert_ne!(src, dst);
    if src < dst {
        let (a, b) = data.split_at_mut(dst * m);
        (&a[src * m..src * m + m], &mut b[..m])
    } else {
        let (a, b) = data.split_at_mut(src * m);
        (&b[..m], &mut a[dst * m..dst * m + m])
    }
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Solves `L Y + Y R = rhs` for blocks of order at most two through the
/// Kronecker form `(I_w ⊗ L + R^T ⊗ I_h) vec(Y) = vec(rhs)`.
// rows of the 4x4 system are swapped in place, so index loops are clearer here
#[allow(clippy::needless_range_loop)]
fn solve_small(l: &[[f64; 2]; 2], h: usize, r: &[[f64; 2]; 2], w: usize, rhs: [f64; 4]) -> Result<[f64; 4]> {
    let n = h * w;
    let mut k = [[0.0; 4]; 4];
    for b in 0..w {
        for a in 0..h {
            let row = b * h + a;
            for a2 in 0..h {
                k[row][b * h + a2] += l[a][a2];
            }
            for b2 in 0..w {
                k[row][b2 * h + a] += r[b2][b];
            }
        }
    }
    let scale = k.iter().take(n).flat_map(|row| row.iter().take(n)).fold(0.0f64, |m, v| m.max(v.abs()));
    let mut x = rhs;
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| k[i][col].abs().total_cmp(&k[j][col].abs())).unwrap_or(col);
        if !(k[piv][col].abs() > f64::EPSILON * scale) {
            return Err(Error::Singular);
        }
        k.swap(col, piv);
        x.swap(col, piv);
        for i in col + 1..n {
            let f = k[i][col] / k[col][col];
            if f != 0.0 {
                for j in col..n {
                    k[i][j] -= f * k[col][j];
                }
                x[i] -= f * x[col];
            }
        }
    }
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in i + 1..n {
            acc -= k[i][j] * x[j];
        }
        x[i] = acc / k[i][i];
    }
    Ok(x)
}

/// Solves `A X + X A^T + C = 0` for stable `A` and symmetric `C`.
pub fn solve_lyapunov(a: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_symmetric(c)?;
    SchurForm::new(a)?.solve_lyapunov(Op::Identity, c)
}

/// Solves `A Y + Y F + C = 0`.
pub fn solve_sylvester(a: &DMatrix<f64>, f: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sa = SchurForm::new(a)?;
    let sf = SchurForm::new(f)?;
    sa.solve_sylvester(Op::Identity, &sf, Op::Identity, c)
}

fn check_symmetric(c: &DMatrix<f64>) -> Result<()> {
    if !c.is_square() {
        return Err(Error::Dimension(alloc::format!("{}x{} matrix is not square", c.nrows(), c.ncols())));
    }
    let asym = frobenius(&(c - c.transpose()));
    if asym > 1e-12 * frobenius(c) {
        return Err(Error::InvalidArgument("right-hand side is not symmetric".into()));
    }
    Ok(())
}

/// Factor `Z` (m x k) with `Z Z^T ≈ X` from the symmetric eigendecomposition
/// of a positive semi-definite `X`; eigenvalues `<= tol * lambda_max` are dropped.
///
/// Columns are ordered by decreasing eigenvalue. Negative eigenvalues are
/// accepted down to `-max(tol, NEGATIVE_EIGENVALUE_TOL) * ||X||_2`.
pub fn symmetric_factor(x: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    if !x.is_square() {
        return Err(Error::Dimension(alloc::format!("{}x{} matrix is not square", x.nrows(), x.ncols())));
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument("factor tolerance must be non-negative".into()));
    }
    let m = x.nrows();
    if m == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(symmetrize(x));
    let (lo, hi) =
        eig.eigenvalues.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let norm2 = lo.abs().max(hi.abs());
    let allowed = tol.max(NEGATIVE_EIGENVALUE_TOL) * norm2;
    if lo < -allowed {
        return Err(Error::Indefinite { min_eigenvalue: lo, allowed: -allowed });
    }
    if hi <= 0.0 {
        return Ok(DMatrix::zeros(m, 0));
    }
    let mut order: Vec<usize> = (0..m).filter(|&i| eig.eigenvalues[i] > tol * hi).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let mut z = DMatrix::zeros(m, order.len());
    for (col, &i) in order.iter().enumerate() {
        let s = libm::sqrt(eig.eigenvalues[i]);
        z.set_column(col, &(eig.eigenvectors.column(i) * s));
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::max_abs;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_stable(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
        let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0f64..1.0));
        // shift below the Gershgorin bound of the random part
        let shift = (0..n).map(|i| g.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
        g - DMatrix::identity(n, n) * (shift + 0.1)
    }

    /// Brute force: `(I ⊗ A + F^T ⊗ I) vec(Y) = -vec(C)`.
    fn kronecker_sylvester(a: &DMatrix<f64>, f: &DMatrix<f64>, c: &DMatrix<f64>) -> DMatrix<f64> {
        let (m, r) = (a.nrows(), f.nrows());
        let k = DMatrix::identity(r, r).kronecker(a) + f.transpose().kronecker(&DMatrix::identity(m, m));
        let rhs = -DMatrix::from_column_slice(m * r, 1, c.as_slice());
        let sol = k.lu().solve(&rhs).unwrap();
        DMatrix::from_column_slice(m, r, sol.as_slice())
    }

    #[test]
    fn lyapunov_trivial_and_diagonal() {
        let x = solve_lyapunov(&(-DMatrix::identity(3, 3)), &(DMatrix::identity(3, 3) * 2.0)).unwrap();
        assert!(max_abs(&(x - DMatrix::identity(3, 3))) < 1e-15);

        let a = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]);
        let c = DMatrix::from_row_slice(2, 2, &[2.0, 3.0, 3.0, 4.0]);
        let x = solve_lyapunov(&a, &c).unwrap();
        // X_ij = C_ij / (-a_ii - a_jj)
        let expected = DMatrix::from_fn(2, 2, |i, j| c[(i, j)] / (-a[(i, i)] - a[(j, j)]));
        assert_eq!(expected, DMatrix::from_element(2, 2, 1.0));
        assert!(max_abs(&(x - expected)) < 1e-14);
    }

    #[test]
    fn lyapunov_matches_kronecker_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = random_stable(&mut rng, 6);
            let g = DMatrix::from_fn(6, 6, |_, _| rng.random_range(-1.0f64..1.0));
            let c = &g * g.transpose();
            let x = solve_lyapunov(&a, &c).unwrap();
            let oracle = symmetrize(&kronecker_sylvester(&a, &a.transpose(), &c));
            assert!(frobenius(&(&x - &oracle)) / frobenius(&oracle) < 1e-12);
        }
    }

    #[test]
    fn sylvester_examples() {
        let c = DMatrix::from_row_slice(2, 3, &[1.0, -2.0, 3.0, 0.5, 4.0, -1.0]);
        let y = solve_sylvester(&(-DMatrix::identity(2, 2)), &(-DMatrix::identity(3, 3)), &c).unwrap();
        assert!(max_abs(&(y - &c / 2.0)) < 1e-15);

        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(alloc::vec![-1.0, -3.0]));
        let f = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(alloc::vec![-0.5, -2.0, -4.0]));
        let y = solve_sylvester(&a, &f, &c).unwrap();
        let expected = DMatrix::from_fn(2, 3, |i, j| -c[(i, j)] / (a[(i, i)] + f[(j, j)]));
        assert!(max_abs(&(y - expected)) < 1e-14);
    }

    #[test]
    fn sylvester_matches_kronecker_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let a = random_stable(&mut rng, 5);
            let f = random_stable(&mut rng, 3);
            let c = DMatrix::from_fn(5, 3, |_, _| rng.random_range(-1.0f64..1.0));
            let y = solve_sylvester(&a, &f, &c).unwrap();
            let oracle = kronecker_sylvester(&a, &f, &c);
            assert!(frobenius(&(&y - &oracle)) / frobenius(&oracle) < 1e-12);
        }
    }

    #[test]
    fn complex_pairs_and_transposed_operands() {
        // rotation-dominated blocks give 2x2 Schur blocks on both sides
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[-0.1, 5.0, 0.3, 0.0, -5.0, -0.2, 0.0, 1.0, 0.0, 0.0, -1.0, 2.0, 0.0, 0.0, -2.0, -0.3],
        );
        let f = DMatrix::from_row_slice(2, 2, &[-0.5, 3.0, -3.0, -0.5]);
        let sa = SchurForm::new(&a).unwrap();
        let sf = SchurForm::new(&f).unwrap();
        assert!(sa.blocks.iter().any(|b| b.1 == 2));
        let c = DMatrix::from_fn(4, 2, |i, j| (i + 2 * j) as f64 - 1.5);
        for (oa, of) in [
            (Op::Identity, Op::Identity),
            (Op::Transpose, Op::Identity),
            (Op::Identity, Op::Transpose),
            (Op::Transpose, Op::Transpose),
        ] {
            let am = if oa == Op::Identity { a.clone() } else { a.transpose() };
            let fm = if of == Op::Identity { f.clone() } else { f.transpose() };
            let y = sa.solve_sylvester(oa, &sf, of, &c).unwrap();
            let oracle = kronecker_sylvester(&am, &fm, &c);
            assert!(frobenius(&(y - oracle)) < 1e-12);
        }
    }

    #[test]
    fn lyapunov_equals_sylvester_with_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for m in [1, 2, 7, 20, 50] {
            let a = random_stable(&mut rng, m);
            let b = DMatrix::from_fn(m, 2, |_, _| rng.random_range(-1.0f64..1.0));
            let c = &b * b.transpose();
            let x = solve_lyapunov(&a, &c).unwrap();
            let y = solve_sylvester(&a, &a.transpose(), &c).unwrap();
            assert!(frobenius(&(&x - &y)) / frobenius(&x) < 1e-10);
            let ev = crate::dense::symmetric_eigenvalues(&x);
            assert!(ev[0] >= -1e-10 * ev[m - 1]);
        }
    }

    #[test]
    fn unstable_and_singular_inputs_are_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(solve_lyapunov(&a, &DMatrix::identity(2, 2)), Err(Error::Unstable(_))));
        let a = DMatrix::from_row_slice(1, 1, &[1.0]);
        let f = DMatrix::from_row_slice(1, 1, &[-1.0]);
        assert_eq!(solve_sylvester(&a, &f, &DMatrix::identity(1, 1)), Err(Error::Singular));
        assert!(
            solve_lyapunov(&(-DMatrix::identity(2, 2)), &DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0])).is_err()
        );
    }

    #[test]
    fn solves_are_bitwise_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_stable(&mut rng, 12);
        let c = DMatrix::identity(12, 12);
        assert_eq!(solve_lyapunov(&a, &c).unwrap(), solve_lyapunov(&a, &c).unwrap());
    }

    #[test]
    fn factor_examples() {
        let z = symmetric_factor(&DMatrix::identity(3, 3), FACTOR_TOL).unwrap();
        assert_eq!(z.ncols(), 3);
        assert!(max_abs(&(&z * z.transpose() - DMatrix::identity(3, 3))) < 1e-15);

        let x = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(alloc::vec![4.0, 1.0, 0.0]));
        let z = symmetric_factor(&x, FACTOR_TOL).unwrap();
        assert_eq!(z.ncols(), 2);
        assert!(max_abs(&(&z * z.transpose() - &x)) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let r = DMatrix::from_fn(8, 3, |_, _| rng.random_range(-1.0f64..1.0));
        let x = &r * r.transpose();
        let z = symmetric_factor(&x, FACTOR_TOL).unwrap();
        assert_eq!(z.ncols(), 3);
        assert!(frobenius(&(&z * z.transpose() - &x)) <= 10.0 * FACTOR_TOL * frobenius(&x));

        let indefinite = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(alloc::vec![1.0, -0.5]));
        assert!(matches!(symmetric_factor(&indefinite, FACTOR_TOL), Err(Error::Indefinite { .. })));
        assert_eq!(symmetric_factor(&DMatrix::zeros(2, 2), FACTOR_TOL).unwrap().ncols(), 0);
    }
}
