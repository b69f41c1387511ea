//! Parametric mass-spring-damper benchmark.
//!
//! Every mass, spring constant and damper constant varies uniformly by a
//! relative half-width `delta` around its nominal value, giving one parameter
//! per element: masses first, then springs, then dampers.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::symmetric_eigenvalues;
use crate::galerkin::ParametricSecondOrderSystem;
use crate::{Error, Result};

/// Two-terminal element between nodes `ends.0` and `ends.1`.
///
/// Node 0 is the ground, node `i >= 1` is mass `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    pub ends: (usize, usize),
    pub value: f64,
}

impl Element {
    pub fn new(a: usize, b: usize, value: f64) -> Self {
        Self { ends: (a, b), value }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MsdConfig {
    pub masses: Vec<f64>,
    pub springs: Vec<Element>,
    pub dampers: Vec<Element>,
    /// Index into `springs` of the spring through which the input acts.
    /// It must connect a mass to the ground.
    pub input_spring: usize,
    /// Relative half-width of the uniform parameter variation.
    pub delta: f64,
}

impl Default for MsdConfig {
    /// Four-mass vertical chain (mass 4 lowest) with a cross-coupling spring
    /// between masses 1 and 3, excited through the spring grounding mass 4.
    fn default() -> Self {
        Self {
            masses: vec![1.0; 4],
            springs: vec![
                Element::new(0, 1, 100.0),
                Element::new(1, 2, 100.0),
                Element::new(2, 3, 100.0),
                Element::new(3, 4, 100.0),
                Element::new(1, 3, 100.0),
                Element::new(4, 0, 100.0),
            ],
            dampers: vec![
                Element::new(0, 1, 1.0),
                Element::new(1, 2, 1.0),
                Element::new(2, 3, 1.0),
                Element::new(3, 4, 1.0),
            ],
            input_spring: 5,
            delta: 0.1,
        }
    }
}

impl MsdConfig {
    pub fn parameter_count(&self) -> usize {
        self.masses.len() + self.springs.len() + self.dampers.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.masses.len();
        if n == 0 {
            return Err(Error::InvalidArgument("at least one mass is required".into()));
        }
        if !(self.delta >= 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidArgument(format!("delta = {} outside [0, 1)", self.delta)));
        }
        for (i, &m) in self.masses.iter().enumerate() {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::InvalidArgument(format!("mass {} must be positive, got {m}", i + 1)));
            }
        }
        for (kind, elems) in [("spring", &self.springs), ("damper", &self.dampers)] {
            for (i, e) in elems.iter().enumerate() {
                if !(e.value > 0.0 && e.value.is_finite()) {
                    return Err(Error::InvalidArgument(format!("{kind} {} must be positive, got {}", i + 1, e.value)));
                }
                let (a, b) = e.ends;
                if a > n || b > n || a == b {
                    return Err(Error::InvalidArgument(format!(
                        "{kind} {} has invalid endpoints ({a}, {b}) for {n} masses",
                        i + 1
                    )));
                }
            }
        }
        let input = self
            .springs
            .get(self.input_spring)
            .ok_or_else(|| Error::InvalidArgument(format!("input spring {} does not exist", self.input_spring + 1)))?;
        if input.ends.0 != 0 && input.ends.1 != 0 {
            return Err(Error::InvalidArgument("input spring must be attached to the ground".into()));
        }
        Ok(())
    }
}

/// Adds `value` times the element incidence pattern `(e_a - e_b)(e_a - e_b)^T`,
/// dropping the ground row and column.
fn stamp(m: &mut DMatrix<f64>, (a, b): (usize, usize), value: f64) {
    if a > 0 {
        m[(a - 1, a - 1)] += value;
    }
    if b > 0 {
        m[(b - 1, b - 1)] += value;
    }
    if a > 0 && b > 0 {
        m[(a - 1, b - 1)] -= value;
        m[(b - 1, a - 1)] -= value;
    }
}

/// Affine-parametric system of the configured network.
///
/// `B = k_in e_j` where `k_in` is the nominal input spring constant and `j`
/// the mass it connects to the ground.
pub fn build_msd(cfg: &MsdConfig) -> Result<ParametricSecondOrderSystem> {
    cfg.validate()?;
    let n = cfg.masses.len();
    let terms = cfg.parameter_count() + 1;
    let zeros = || vec![DMatrix::zeros(n, n); terms];
    let (mut mass, mut damping, mut stiffness) = (zeros(), zeros(), zeros());

    let mut k = 1;
    for (i, &m) in cfg.masses.iter().enumerate() {
        mass[0][(i, i)] += m;
        mass[k][(i, i)] += cfg.delta * m;
        k += 1;
    }
    for e in &cfg.springs {
        stamp(&mut stiffness[0], e.ends, e.value);
        stamp(&mut stiffness[k], e.ends, cfg.delta * e.value);
        k += 1;
    }
    for e in &cfg.dampers {
        stamp(&mut damping[0], e.ends, e.value);
        stamp(&mut damping[k], e.ends, cfg.delta * e.value);
        k += 1;
    }

    let input = &cfg.springs[cfg.input_spring];
    let node = input.ends.0.max(input.ends.1);
    let mut b = DMatrix::zeros(n, 1);
    b[(node - 1, 0)] = input.value;

    ParametricSecondOrderSystem::new(mass, damping, stiffness, b)
}

/// Corners visited when `q` is too large to enumerate.
pub const SAMPLED_CORNERS: usize = 1 << 16;

/// Number of parameters up to which all `2^q` corners are enumerated.
pub const MAX_ENUMERATED_PARAMETERS: usize = 20;

/// Tolerance on the smallest eigenvalue of the damping matrix.
pub const DAMPING_TOL: f64 = 1e-12;

/// Checks that `M` and `K` are positive definite and `D` is positive
/// semidefinite at the corners of `[-1, 1]^q`.
///
/// All corners are visited for `q <= 20`; otherwise a fixed-seed random
/// sample of `SAMPLED_CORNERS` corners is used.
pub fn corner_definiteness_check(sys: &ParametricSecondOrderSystem) -> bool {
    let q = sys.q();
    let mut mu = vec![0.0; q];
    let ok = |mu: &[f64]| {
        let min = |m: DMatrix<f64>| symmetric_eigenvalues(&m).first().copied().unwrap_or(f64::INFINITY);
        min(sys.mass_at(mu)) > 0.0 && min(sys.stiffness_at(mu)) > 0.0 && min(sys.damping_at(mu)) >= -DAMPING_TOL
    };
    if q <= MAX_ENUMERATED_PARAMETERS {
        (0..1u64 << q).all(|bits| {
            for (k, m) in mu.iter_mut().enumerate() {
                *m = if bits >> k & 1 == 1 { 1.0 } else { -1.0 };
            }
            ok(&mu)
        })
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        (0..SAMPLED_CORNERS).all(|_| {
            for m in mu.iter_mut() {
                *m = if rng.next_u32() & 1 == 1 { 1.0 } else { -1.0 };
            }
            ok(&mu)
        })
    }
}
