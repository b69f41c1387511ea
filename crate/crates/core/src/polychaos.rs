//! Polynomial chaos bases for independent uniform random parameters.
//!
//! Every parameter `mu_k` is uniform on `[-1, 1]` (physical ranges are mapped
//! affinely by the model), so the chaos polynomials are products of Legendre
//! polynomials normalized against the probability density `1/2`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::sparse::CsrMatrix;
use crate::{Error, Result};

/// Upper bound on the number of points of a full tensor rule.
pub const MAX_TENSOR_POINTS: usize = 1 << 22;

/// Number of multivariate polynomials of total degree `<= d` in `q` variables,
/// `(d+q)! / (d! q!)`.
pub fn basis_size(q: usize, d: usize) -> Result<usize> {
    if q == 0 {
        return Err(Error::InvalidArgument("parameter count q must be >= 1".into()));
    }
    let k = d.min(q);
    let top = d.max(q);
    // C(top + i, i) = C(top + i - 1, i - 1) * (top + i) / i, exact at every step.
    let mut acc: usize = 1;
    for i in 1..=k {
        let num = (top as u128) + (i as u128);
        let next = (acc as u128) * num / (i as u128);
        acc = usize::try_from(next).map_err(|_| Error::Overflow("basis size"))?;
    }
    Ok(acc)
}

/// Degree-`k` Legendre polynomial, orthonormal for the uniform density on
/// `[-1, 1]`: `E[phi_j phi_k] = delta_jk`.
pub fn eval_uni(k: usize, x: f64) -> f64 {
    let raw = match k {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for n in 1..k {
                let nf = n as f64;
                let next = ((2.0 * nf + 1.0) * x * cur - nf * prev) / (nf + 1.0);
                prev = cur;
                cur = next;
            }
            cur
        }
    };
    raw * libm::sqrt((2 * k + 1) as f64)
}

/// `E[mu phi_a(mu) phi_b(mu)]` for a single uniform variable.
///
/// The orthonormal recurrence reads `x phi_n = b_{n+1} phi_{n+1} + b_n phi_{n-1}`
/// with `b_n = n / sqrt(4n^2 - 1)`, so only neighbouring degrees couple.
pub fn linear_moment(a: usize, b: usize) -> f64 {
    if a.abs_diff(b) != 1 {
        return 0.0;
    }
    let n = a.max(b) as f64;
    n / libm::sqrt(4.0 * n * n - 1.0)
}

/// Orthogonal polynomial family of the marginal distributions.
///
/// Only uniform marginals are supported; other Askey-scheme families would
/// slot in here with their own recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Family {
    #[default]
    Legendre,
}

/// One-dimensional Gauss rule with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// `n`-point Gauss–Legendre rule on `[-1, 1]`, exact for degree `2n - 1`,
    /// normalized to the probability density `1/2`.
    pub fn gauss_legendre(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("quadrature needs at least one node".into()));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            // Standard weight 2 / ((1 - x^2) P_n'(x)^2), halved for the density.
            let w = 1.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Classical (unnormalized) `P_n(x)` and its derivative.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (1.0, x);
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    let nf = n as f64;
    (cur, nf * (x * cur - prev) / (x * x - 1.0))
}

/// Multi-index `alpha` of a product polynomial `prod_l phi_{alpha_l}(mu_l)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn zero(q: usize) -> Self {
        Self(vec![0; q])
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// All multi-indices in `q` variables with total degree `<= d`, graded
/// lexicographically (zero index first, then by degree, then descending in
/// the leading exponent).
pub fn graded_indices(q: usize, d: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut buf = vec![0u32; q];
    for total in 0..=d {
        compositions(&mut buf, 0, total as u32, &mut out);
    }
    out
}

fn compositions(buf: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if buf.is_empty() {
        // only the constant polynomial
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if pos + 1 == buf.len() {
        buf[pos] = remaining;
        out.push(MultiIndex(buf.to_vec()));
        return;
    }
    for v in (0..=remaining).rev() {
        buf[pos] = v;
        compositions(buf, pos + 1, remaining - v, out);
    }
    buf[pos] = 0;
}

/// Total-degree Legendre chaos basis for `q` independent uniform parameters.
#[derive(Debug, Clone)]
pub struct PcBasis {
    q: usize,
    d: usize,
    family: Family,
    indices: Vec<MultiIndex>,
    positions: BTreeMap<MultiIndex, usize>,
    rule: QuadratureRule,
}

impl PcBasis {
    /// Basis with the default `2(d+1)` Gauss points per dimension.
    pub fn new(q: usize, d: usize) -> Result<Self> {
        Self::with_quadrature_order(q, d, 2 * (d + 1))
    }

    pub fn with_quadrature_order(q: usize, d: usize, points_per_dim: usize) -> Result<Self> {
        let s = basis_size(q, d)?;
        if points_per_dim < d + 1 {
            return Err(Error::InvalidArgument(alloc::format!(
                "quadrature order {points_per_dim} below minimum {}",
                d + 1
            )));
        }
        let indices = graded_indices(q, d);
        debug_assert_eq!(indices.len(), s);
        let positions = indices.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        Ok(Self {
            q,
            d,
            family: Family::Legendre,
            indices,
            positions,
            rule: QuadratureRule::gauss_legendre(points_per_dim)?,
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// Number of basis polynomials `s`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.positions.get(alpha).copied()
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// `Phi_i(mu)`.
    pub fn eval(&self, i: usize, mu: &[f64]) -> f64 {
        self.indices[i].0.iter().zip(mu).map(|(&a, &x)| eval_uni(a as usize, x)).product()
    }

    /// Number of points of the full tensor rule, if it fits [`MAX_TENSOR_POINTS`].
    pub fn tensor_points(&self) -> Option<usize> {
        let mut n: usize = 1;
        for _ in 0..self.q {
            n = n.checked_mul(self.rule.len())?;
        }
        (n <= MAX_TENSOR_POINTS).then_some(n)
    }

    /// Visits every point of the tensorized rule with its product weight.
    pub fn for_each_tensor_point(&self, mut f: impl FnMut(&[f64], f64)) -> Result<()> {
        let total = self.tensor_points().ok_or_else(|| {
            Error::InvalidArgument(alloc::format!(
                "full tensor rule in {} dimensions exceeds {MAX_TENSOR_POINTS} points",
                self.q
            ))
        })?;
        let p = self.rule.len();
        let mut digits = vec![0usize; self.q];
        let mut point = vec![0.0; self.q];
        for _ in 0..total {
            let mut w = 1.0;
            for (l, &dgt) in digits.iter().enumerate() {
                point[l] = self.rule.nodes[dgt];
                w *= self.rule.weights[dgt];
            }
            f(&point, w);
            for dgt in digits.iter_mut() {
                *dgt += 1;
                if *dgt < p {
                    break;
                }
                *dgt = 0;
            }
        }
        Ok(())
    }

    /// `E[w(mu) Phi_i(mu) Phi_j(mu)]` by the tensorized Gauss rule.
    pub fn expectation_weighted(&self, i: usize, j: usize, w: impl Fn(&[f64]) -> f64) -> Result<f64> {
        self.check_index(i)?;
        self.check_index(j)?;
        let mut acc = 0.0;
        self.for_each_tensor_point(|mu, weight| acc += weight * w(mu) * self.eval(i, mu) * self.eval(j, mu))?;
        Ok(acc)
    }

    /// Gram matrix `E[Phi_i Phi_j]` by quadrature (validation only).
    pub fn gram_by_quadrature(&self) -> Result<nalgebra::DMatrix<f64>> {
        let s = self.len();
        let mut g = nalgebra::DMatrix::zeros(s, s);
        let mut vals = vec![0.0; s];
        self.for_each_tensor_point(|mu, weight| {
            for (i, v) in vals.iter_mut().enumerate() {
                *v = self.eval(i, mu);
            }
            for j in 0..s {
                for i in 0..s {
                    g[(i, j)] += weight * vals[i] * vals[j];
                }
            }
        })?;
        Ok(g)
    }

    /// `E[kappa_k Phi_i Phi_j]` with `kappa_0 = 1` and `kappa_k = mu_k`,
    /// evaluated exactly through the product structure of the density.
    pub fn affine_expectation(&self, k: usize, i: usize, j: usize) -> f64 {
        let (a, b) = (&self.indices[i].0, &self.indices[j].0);
        if k == 0 {
            return if i == j { 1.0 } else { 0.0 };
        }
        let l = k - 1;
        let others_match = a.iter().zip(b).enumerate().all(|(m, (x, y))| m == l || x == y);
        if !others_match {
            return 0.0;
        }
        linear_moment(a[l] as usize, b[l] as usize)
    }

    /// Sparse `s x s` matrix `G_k` with entries `E[kappa_k Phi_i Phi_j]`.
    pub fn affine_gram(&self, k: usize) -> Result<CsrMatrix> {
        let s = self.len();
        if k > self.q {
            return Err(Error::InvalidArgument(alloc::format!("affine term {k} out of range for q = {}", self.q)));
        }
        let mut triplets = Vec::new();
        if k == 0 {
            triplets.extend((0..s).map(|i| (i, i, 1.0)));
        } else {
            let l = k - 1;
            for (i, alpha) in self.indices.iter().enumerate() {
                if alpha.degree() >= self.d {
                    continue;
                }
                let mut beta = alpha.clone();
                beta.0[l] += 1;
                if let Some(j) = self.position(&beta) {
                    let v = linear_moment(alpha.0[l] as usize, beta.0[l] as usize);
                    triplets.push((i, j, v));
                    triplets.push((j, i, v));
                }
            }
        }
        CsrMatrix::from_triplets(s, s, &triplets)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::InvalidArgument(alloc::format!("basis index {i} out of range (s = {})", self.len())));
        }
        Ok(())
    }
}
