//! Trapezoidal time integration of quadratic-output systems and the
//! checks built on it: energy dissipation, the shifted dissipation
//! inequality and the output error bound `|y - yr|_inf <= |H - Hr|_H2 |u ⊗ u|_L2`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::bt::{H2ErrorEstimator, ReducedModel};
use crate::galerkin::QuadraticOutputSystem;
use crate::{Error, Result};

/// Relative accuracy assumed for the discrete sup-error when testing the bound.
pub const INTEGRATION_SLACK_REL: f64 = 1e-2;

/// Relative tolerance on the bound itself.
pub const BOUND_REL_TOL: f64 = 1e-6;

/// Solution on the uniform grid `t_k = k h`, `k = 0..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// States `x_k`; empty when integrated with [`integrate_output`].
    pub states: Vec<DVector<f64>>,
    /// Inputs `u(t_k)`, one row per grid point.
    pub inputs: DMatrix<f64>,
    /// `y_k = x_k^T N x_k`, without the factor 1/2 of the energy.
    pub output: Vec<f64>,
}

impl Trajectory {
    pub fn step(&self) -> f64 {
        if self.times.len() > 1 {
            self.times[1] - self.times[0]
        } else {
            0.0
        }
    }
}

/// Number of steps for horizon `t_end`, which is rounded to a multiple of `h`.
pub fn step_count(h: f64, t_end: f64) -> Result<usize> {
    if !(h > 0.0 && h.is_finite() && t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("step {h} and horizon {t_end} must be positive")));
    }
    let k = libm::round(t_end / h);
    if !(1.0..=1e9).contains(&k) {
        return Err(Error::InvalidArgument(format!("horizon {t_end} with step {h} gives {k} steps")));
    }
    Ok(k as usize)
}

fn sample_inputs(u: &dyn Fn(f64, &mut [f64]), n_in: usize, h: f64, steps: usize) -> Result<DMatrix<f64>> {
    let mut inputs = DMatrix::zeros(steps + 1, n_in);
    let mut buf = vec![0.0; n_in];
    for k in 0..=steps {
        buf.iter_mut().for_each(|v| *v = 0.0);
        u(k as f64 * h, &mut buf);
        if buf.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("input is not finite at t = {}", k as f64 * h)));
        }
        for (j, &v) in buf.iter().enumerate() {
            inputs[(k, j)] = v;
        }
    }
    Ok(inputs)
}

fn run(
    sys: &QuadraticOutputSystem,
    u: &dyn Fn(f64, &mut [f64]),
    x0: &DVector<f64>,
    h: f64,
    t_end: f64,
    keep_states: bool,
) -> Result<Trajectory> {
    let m = sys.dim();
    if x0.len() != m {
        return Err(Error::Dimension(format!("initial state of length {}, expected {m}", x0.len())));
    }
    let steps = step_count(h, t_end)?;
    let inputs = sample_inputs(u, sys.n_in(), h, steps)?;

    let half = sys.a() * (0.5 * h);
    let lhs = DMatrix::identity(m, m) - &half;
    let lu = lhs.lu();
    if !lu.is_invertible() {
        return Err(Error::Singular);
    }
    let phi = lu.solve(&(DMatrix::identity(m, m) + &half)).ok_or(Error::Singular)?;
    let gamma = lu.solve(&(sys.b() * (0.5 * h))).ok_or(Error::Singular)?;

    let mut times = Vec::with_capacity(steps + 1);
    let mut output = Vec::with_capacity(steps + 1);
    let mut states = Vec::new();
    let mut x = x0.clone();
    let mut next = DVector::zeros(m);
    let mut nx = DVector::zeros(m);
    for k in 0..=steps {
        times.push(k as f64 * h);
        nx.gemv(1.0, sys.n(), &x, 0.0);
        output.push(x.dot(&nx));
        if keep_states {
            states.push(x.clone());
        }
        if k == steps {
            break;
        }
        let usum = (inputs.row(k) + inputs.row(k + 1)).transpose();
        next.gemv(1.0, &phi, &x, 0.0);
        next.gemv(1.0, &gamma, &usum, 1.0);
        core::mem::swap(&mut x, &mut next);
    }
    if output.iter().any(|v| !v.is_finite()) {
        return Err(Error::NoConvergence);
    }
    Ok(Trajectory { times, states, inputs, output })
}

/// Trapezoidal rule `(I - h/2 A) x_{k+1} = (I + h/2 A) x_k + h/2 B (u_k + u_{k+1})`.
pub fn integrate(
    sys: &QuadraticOutputSystem,
    u: &dyn Fn(f64, &mut [f64]),
    x0: &DVector<f64>,
    h: f64,
    t_end: f64,
) -> Result<Trajectory> {
    run(sys, u, x0, h, t_end, true)
}

/// Like [`integrate`] but keeps only the output.
pub fn integrate_output(
    sys: &QuadraticOutputSystem,
    u: &dyn Fn(f64, &mut [f64]),
    x0: &DVector<f64>,
    h: f64,
    t_end: f64,
) -> Result<Trajectory> {
    run(sys, u, x0, h, t_end, false)
}

/// `u(t) = exp(-t/10) sin(2t)` on every input channel.
pub fn default_input(t: f64, out: &mut [f64]) {
    let v = libm::exp(-t / 10.0) * libm::sin(2.0 * t);
    out.iter_mut().for_each(|o| *o = v);
}

pub fn zero_input(_t: f64, out: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
}

/// `|u ⊗ u|_L2 = sqrt(int |u(t)|^4 dt)` by the trapezoidal rule on the grid.
pub fn input_tensor_norm(u: &dyn Fn(f64, &mut [f64]), n_in: usize, h: f64, t_end: f64) -> Result<f64> {
    let steps = step_count(h, t_end)?;
    let inputs = sample_inputs(u, n_in, h, steps)?;
    Ok(tensor_norm_of_samples(&inputs, h))
}

fn tensor_norm_of_samples(inputs: &DMatrix<f64>, h: f64) -> f64 {
    let k = inputs.nrows();
    let mut acc = 0.0;
    for i in 0..k {
        let sq = inputs.row(i).norm_squared();
        let w = if i == 0 || i + 1 == k { 0.5 } else { 1.0 };
        acc += w * sq * sq;
    }
    libm::sqrt(acc * h)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    /// `max_k |y_k - yr_k|`.
    pub observed: f64,
    /// `|H - Hr|_H2 |u ⊗ u|_L2`.
    pub bound: f64,
    pub h2_error: f64,
    pub input_norm: f64,
    /// `observed <= bound (1 + BOUND_REL_TOL) + INTEGRATION_SLACK_REL observed`.
    pub holds: bool,
}

/// Compares sampled outputs of the full and reduced model with the bound.
pub fn check_error_bound(y: &[f64], yr: &[f64], h2_error: f64, input_norm: f64) -> Result<BoundCheck> {
    if y.len() != yr.len() {
        return Err(Error::Dimension(format!("outputs of length {} and {}", y.len(), yr.len())));
    }
    let observed = y.iter().zip(yr).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let bound = h2_error * input_norm;
    let holds = observed <= bound * (1.0 + BOUND_REL_TOL) + INTEGRATION_SLACK_REL * observed;
    Ok(BoundCheck { observed, bound, h2_error, input_norm, holds })
}

/// Zero-state responses of `fom` and `rom` to `u` against the H2 bound.
pub fn verify_error_bound(
    fom: &QuadraticOutputSystem,
    rom: &ReducedModel,
    u: &dyn Fn(f64, &mut [f64]),
    h: f64,
    t_end: f64,
) -> Result<BoundCheck> {
    let est = H2ErrorEstimator::new(fom)?;
    let y = integrate_output(fom, u, &DVector::zeros(fom.dim()), h, t_end)?;
    verify_with_estimator(&est, &y, rom, u, h, t_end)
}

/// [`verify_error_bound`] reusing a cached estimator and full-order trajectory.
pub fn verify_with_estimator(
    est: &H2ErrorEstimator,
    fom_trajectory: &Trajectory,
    rom: &ReducedModel,
    u: &dyn Fn(f64, &mut [f64]),
    h: f64,
    t_end: f64,
) -> Result<BoundCheck> {
    let yr = integrate_output(&rom.system, u, &DVector::zeros(rom.r), h, t_end)?;
    let err = est.difference(rom)?;
    check_error_bound(&fom_trajectory.output, &yr.output, err, tensor_norm_of_samples(&yr.inputs, h))
}

/// Largest one-step increase `max_k (y_{k+1} - y_k)` relative to `y_0`.
pub fn max_relative_increase(output: &[f64]) -> f64 {
    let y0 = output.first().copied().unwrap_or(0.0);
    let inc = output.windows(2).fold(f64::NEG_INFINITY, |m, w| m.max(w[1] - w[0]));
    if y0 > 0.0 {
        inc / y0
    } else {
        inc
    }
}

/// Discrete check of `d/dt x^T N x <= 2 u^T B^T N x + lambda |x|^2` along a
/// stored trajectory.
///
/// The trapezoidal rule satisfies
/// `y_{k+1} - y_k = h (x_m^T T x_m + 2 u_m^T B^T N x_m)` exactly at the
/// midpoints `x_m`, `u_m`, so the inequality is checked there. Returns
/// `max_k (lhs - rhs) / max_k (|lhs| + |rhs|)`, which is `<= 0` up to
/// round-off when `lambda >= lambda_max(A^T N + N A)`.
pub fn shifted_inequality_residual(sys: &QuadraticOutputSystem, traj: &Trajectory, lambda: f64) -> Result<f64> {
    if traj.states.len() != traj.output.len() || traj.states.len() < 2 {
        return Err(Error::InvalidArgument("trajectory without stored states".into()));
    }
    let h = traj.step();
    let bn = sys.b().transpose() * sys.n();
    let mut worst = f64::NEG_INFINITY;
    let mut scale = 0.0f64;
    for k in 0..traj.states.len() - 1 {
        let xm = (&traj.states[k] + &traj.states[k + 1]) * 0.5;
        let um = (traj.inputs.row(k) + traj.inputs.row(k + 1)).transpose() * 0.5;
        let lhs = (traj.output[k + 1] - traj.output[k]) / h;
        let rhs = 2.0 * um.dot(&(&bn * &xm)) + lambda * xm.norm_squared();
        worst = worst.max(lhs - rhs);
        scale = scale.max(lhs.abs() + rhs.abs());
    }
    Ok(if scale > 0.0 { worst / scale } else { 0.0 })
}
