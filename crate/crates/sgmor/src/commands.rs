//! The four experiment stages. Each reads an [`ExperimentConfig`] and writes
//! its artifacts into `cfg.out`.
//!
//! Reported H2 errors, sup-errors and bounds refer to the energy
//! `x^T N x / 2`; `lambda_max` is the eigenvalue of `A^T N + N A` itself.

use std::fs;
use std::path::{Path, PathBuf};

use sgmor_core::arnoldi::krylov_basis;
use sgmor_core::bt::{balance_gramians, truncate, H2ErrorEstimator, ReducedModel, GRAMIAN_FACTOR_TOL};
use sgmor_core::galerkin::{assemble, to_first_order, GalerkinSystem, QuadraticOutputSystem};
use sgmor_core::lyapsylv::SchurForm;
use sgmor_core::msd::build_msd;
use sgmor_core::passivity::check_passivity;
use sgmor_core::polychaos::PcBasis;
use sgmor_core::simulate::{integrate, shifted_inequality_residual, verify_with_estimator, Trajectory};
use sgmor_core::sweep::{arnoldi_sweep, bt_sweep, ReductionReport, ReductionRow};
use sgmor_core::DVector;

use crate::config::{ExperimentConfig, ReducerKind};
use crate::error::{CliError, Context, Result};
use crate::formats::{fmt_f64, fmt_opt, read_csv, write_csv, write_file, write_general_mtx, write_symmetric_mtx};

/// The energy is half the quadratic output.
const ENERGY_SCALE: f64 = 0.5;

pub const REDUCE_HEADER: [&str; 6] = ["r", "sigma_r", "h2_abs", "h2_rel", "lambda_max", "stable"];
pub const VERIFY_HEADER: [&str; 7] =
    ["r", "observed", "bound", "holds", "lambda_max", "certificate_residual", "passive"];
pub const REPORT_HEADER: [&str; 7] =
    ["r", "sigma_r", "bt_h2_rel", "bt_lambda_max", "arnoldi_h2_rel", "arnoldi_lambda_max", "arnoldi_stable"];

pub fn reduce_file(reducer: ReducerKind) -> &'static str {
    match reducer {
        ReducerKind::Bt => "reduce_bt.csv",
        ReducerKind::Arnoldi => "reduce_arnoldi.csv",
    }
}

fn prepare(cfg: &ExperimentConfig) -> Result<()> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))
}

fn galerkin(cfg: &ExperimentConfig) -> Result<GalerkinSystem> {
    let sys = build_msd(&cfg.model).map_err(|e| CliError::Config(format!("model: {e}")))?;
    let basis = PcBasis::new(sys.q(), cfg.degree).context("chaos basis")?;
    assemble(&sys, &basis).context("Galerkin assembly")
}

fn full_order(cfg: &ExperimentConfig) -> Result<QuadraticOutputSystem> {
    to_first_order(&galerkin(cfg)?).context("first-order realization")
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssemblySummary {
    pub degree: usize,
    pub parameters: usize,
    pub s: usize,
    /// Order `n s` of the second-order Galerkin system.
    pub dim: usize,
    /// Nonzero percentages of mass, damping and stiffness, rounded to 2 decimals.
    pub nnz_percent: [f64; 3],
}

impl AssemblySummary {
    fn of(g: &GalerkinSystem, degree: usize) -> Self {
        let pct = |m: &sgmor_core::sparse::CsrMatrix| (m.density_percent() * 100.0).round() / 100.0;
        Self {
            degree,
            parameters: g.basis().q(),
            s: g.s(),
            dim: g.dim(),
            nnz_percent: [pct(&g.mass), pct(&g.damping), pct(&g.stiffness)],
        }
    }
}

impl std::fmt::Display for AssemblySummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [m, d, k] = self.nnz_percent;
        write!(
            f,
            "d={} q={} s={} dim={} nnz% M={m:.2} D={d:.2} K={k:.2}",
            self.degree, self.parameters, self.s, self.dim
        )
    }
}

/// Writes `mass.mtx`, `damping.mtx`, `stiffness.mtx`, `input.mtx` and `summary.csv`.
pub fn run_assemble(cfg: &ExperimentConfig) -> Result<AssemblySummary> {
    prepare(cfg)?;
    let g = galerkin(cfg)?;
    for (name, m) in [("mass.mtx", &g.mass), ("damping.mtx", &g.damping), ("stiffness.mtx", &g.stiffness)] {
        write_file(&cfg.out.join(name), |w| write_symmetric_mtx(w, m))?;
    }
    write_file(&cfg.out.join("input.mtx"), |w| write_general_mtx(w, &g.input))?;
    let summary = AssemblySummary::of(&g, cfg.degree);
    let [m, d, k] = summary.nnz_percent.map(|p| format!("{p:.2}"));
    write_csv(
        &cfg.out.join("summary.csv"),
        &["degree", "parameters", "s", "dim", "nnz_mass", "nnz_damping", "nnz_stiffness"],
        [[summary.degree, summary.parameters, summary.s, summary.dim]
            .map(|v| v.to_string())
            .into_iter()
            .chain([m, d, k])],
    )?;
    Ok(summary)
}

fn reduce_row(row: &ReductionRow) -> [String; 6] {
    [
        row.r.to_string(),
        fmt_opt(row.sigma_r),
        fmt_opt(row.h2_abs.map(|e| ENERGY_SCALE * e)),
        fmt_opt(row.h2_rel),
        fmt_opt(row.lambda_max),
        row.stable.to_string(),
    ]
}

fn log_row(row: &ReductionRow) {
    match &row.failure {
        None => eprintln!("r={:>4} rel={}", row.r, fmt_opt(row.h2_rel)),
        Some(why) => eprintln!("r={:>4} {why}", row.r),
    }
}

/// Sweeps `cfg.r_range()` with the configured reducer and writes
/// `reduce_bt.csv` or `reduce_arnoldi.csv`.
pub fn run_reduce(cfg: &ExperimentConfig) -> Result<(PathBuf, ReductionReport)> {
    prepare(cfg)?;
    let path = cfg.out.join(reduce_file(cfg.reducer));
    let report = if cfg.r_range().is_empty() {
        ReductionReport { reducer: reducer(cfg), h2_norm: f64::NAN, rows: Vec::new() }
    } else {
        let fom = full_order(cfg)?;
        let est = H2ErrorEstimator::new(&fom).context("Gramians of the full-order model")?;
        match cfg.reducer {
            ReducerKind::Bt => {
                let bal = balance_gramians(est.gramians(), GRAMIAN_FACTOR_TOL).context("balancing")?;
                bt_sweep(&est, &bal, &fom, cfg.r_range(), log_row)
            }
            ReducerKind::Arnoldi => {
                let basis = krylov_basis(&fom, cfg.omega, cfg.r_max, 2).context("Krylov basis")?;
                arnoldi_sweep(&est, &basis, cfg.omega, &fom, cfg.r_range(), log_row)
            }
        }
    };
    write_csv(&path, &REDUCE_HEADER, report.rows.iter().map(reduce_row))?;
    Ok((path, report))
}

fn reducer(cfg: &ExperimentConfig) -> sgmor_core::sweep::Reducer {
    match cfg.reducer {
        ReducerKind::Bt => sgmor_core::sweep::Reducer::BalancedTruncation,
        ReducerKind::Arnoldi => sgmor_core::sweep::Reducer::Arnoldi { omega: cfg.omega },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyRow {
    pub r: usize,
    /// `None` when the reduced model is unstable.
    pub observed: Option<f64>,
    pub bound: Option<f64>,
    pub holds: Option<bool>,
    pub lambda_max: f64,
    /// Relative violation of the shifted dissipation inequality along the
    /// simulated trajectory, `<= 0` when it holds.
    pub certificate_residual: Option<f64>,
    pub passive: bool,
}

impl VerifyRow {
    fn record(&self) -> [String; 7] {
        [
            self.r.to_string(),
            fmt_opt(self.observed.map(|v| ENERGY_SCALE * v)),
            fmt_opt(self.bound.map(|v| ENERGY_SCALE * v)),
            self.holds.map(|b| b.to_string()).unwrap_or_default(),
            fmt_f64(self.lambda_max),
            fmt_opt(self.certificate_residual),
            self.passive.to_string(),
        ]
    }
}

fn certificate_residual(sys: &QuadraticOutputSystem, traj: &Trajectory, lambda_max: f64) -> Result<f64> {
    shifted_inequality_residual(sys, traj, lambda_max.max(0.0)).context("shifted dissipation inequality")
}

fn write_trajectory(path: &Path, y: &Trajectory, yr: Option<&Trajectory>) -> Result<()> {
    match yr {
        None => write_csv(
            path,
            &["t", "y"],
            y.times.iter().zip(&y.output).map(|(t, v)| [fmt_f64(*t), fmt_f64(ENERGY_SCALE * v)]),
        ),
        Some(yr) => {
            write_csv(
                path,
                &["t", "y", "ybar", "abs_err"],
                y.times.iter().zip(&y.output).zip(&yr.output).map(|((t, a), b)| {
                    [*t, ENERGY_SCALE * a, ENERGY_SCALE * b, ENERGY_SCALE * (a - b).abs()].map(fmt_f64)
                }),
            )
        }
    }
}

/// Simulates the full-order model and the reduced models of
/// `simulation.verify_r` from rest, checks the output error bound and the
/// shifted dissipation inequality, and writes `verify.csv` plus one
/// trajectory file per model. The last row is the full-order model with
/// `r = 2 n s`.
pub fn run_verify(cfg: &ExperimentConfig) -> Result<Vec<VerifyRow>> {
    cfg.validate_verify()?;
    prepare(cfg)?;
    let sim = &cfg.simulation;
    let u = sim.input.function();
    let fom = full_order(cfg)?;
    let est = H2ErrorEstimator::new(&fom).context("Gramians of the full-order model")?;
    let y = integrate(&fom, &u, &DVector::zeros(fom.dim()), sim.h, sim.t_end).context("full-order simulation")?;
    write_trajectory(&cfg.out.join("trajectory_fom.csv"), &y, None)?;

    let r_max = sim.verify_r.iter().copied().max().unwrap_or(0);
    let rom_of: Box<dyn Fn(usize) -> Result<(ReducedModel, bool)>> = match cfg.reducer {
        ReducerKind::Bt => {
            let bal = balance_gramians(est.gramians(), GRAMIAN_FACTOR_TOL).context("balancing")?;
            let fom = fom.clone();
            Box::new(move |r| {
                let rom = truncate(&bal, &fom, r).context("balanced truncation")?;
                let stable = SchurForm::new(rom.system.a()).context("reduced spectrum")?.is_stable();
                Ok((rom, stable))
            })
        }
        ReducerKind::Arnoldi => {
            let basis = krylov_basis(&fom, cfg.omega, r_max, 2).context("Krylov basis")?;
            let fom = fom.clone();
            Box::new(move |r| {
                let red = basis.reduce(&fom, r).context("Arnoldi reduction")?;
                Ok((red.model, red.stable))
            })
        }
    };

    let mut rows = Vec::new();
    for &r in &sim.verify_r {
        let (rom, stable) = rom_of(r)?;
        let report = check_passivity(&rom.system);
        let mut row = VerifyRow {
            r,
            observed: None,
            bound: None,
            holds: None,
            lambda_max: report.lambda_max,
            certificate_residual: None,
            passive: report.passive,
        };
        if stable {
            let check = verify_with_estimator(&est, &y, &rom, &u, sim.h, sim.t_end).context("error bound")?;
            let yr = integrate(&rom.system, &u, &DVector::zeros(r), sim.h, sim.t_end).context("reduced simulation")?;
            row.observed = Some(check.observed);
            row.bound = Some(check.bound);
            row.holds = Some(check.holds);
            row.certificate_residual = Some(certificate_residual(&rom.system, &yr, report.lambda_max)?);
            write_trajectory(&cfg.out.join(format!("trajectory_r{r}.csv")), &y, Some(&yr))?;
        }
        eprintln!("r={r:>4} holds={:?} lambda_max={}", row.holds, fmt_f64(row.lambda_max));
        rows.push(row);
    }

    let report = check_passivity(&fom);
    rows.push(VerifyRow {
        r: fom.dim(),
        observed: Some(0.0),
        bound: Some(0.0),
        holds: Some(true),
        lambda_max: report.lambda_max,
        certificate_residual: Some(certificate_residual(&fom, &y, report.lambda_max)?),
        passive: report.passive,
    });
    write_csv(&cfg.out.join("verify.csv"), &VERIFY_HEADER, rows.iter().map(VerifyRow::record))?;
    Ok(rows)
}

/// Merges whichever of `reduce_bt.csv` and `reduce_arnoldi.csv` exist in
/// `cfg.out` into `figure_table.csv`, one row per `r`. Fields are copied
/// verbatim.
pub fn run_report(cfg: &ExperimentConfig) -> Result<PathBuf> {
    let load = |kind: ReducerKind| -> Result<Option<std::collections::BTreeMap<usize, Vec<String>>>> {
        let path = cfg.out.join(reduce_file(kind));
        if !path.exists() {
            return Ok(None);
        }
        let (header, rows) = read_csv(&path)?;
        if header != REDUCE_HEADER {
            return Err(CliError::Config(format!("{}: unexpected header {header:?}", path.display())));
        }
        let mut map = std::collections::BTreeMap::new();
        for row in rows {
            let r = row[0]
                .parse()
                .map_err(|_| CliError::Config(format!("{}: bad r value {:?}", path.display(), row[0])))?;
            map.insert(r, row);
        }
        Ok(Some(map))
    };
    let bt = load(ReducerKind::Bt)?;
    let ar = load(ReducerKind::Arnoldi)?;
    if bt.is_none() && ar.is_none() {
        return Err(CliError::Config(format!("no reduction results in {}", cfg.out.display())));
    }
    let (bt, ar) = (bt.unwrap_or_default(), ar.unwrap_or_default());
    let rs: std::collections::BTreeSet<usize> = bt.keys().chain(ar.keys()).copied().collect();
    let field = |row: Option<&Vec<String>>, i: usize| row.map(|r| r[i].clone()).unwrap_or_default();
    let path = cfg.out.join("figure_table.csv");
    write_csv(
        &path,
        &REPORT_HEADER,
        rs.into_iter().map(|r| {
            let (b, a) = (bt.get(&r), ar.get(&r));
            [r.to_string(), field(b, 1), field(b, 3), field(b, 4), field(a, 3), field(a, 4), field(a, 5)]
        }),
    )?;
    Ok(path)
}
