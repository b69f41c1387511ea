//! Experiment configuration.
//!
//! All keys are optional; missing ones take the defaults of the benchmark
//! study. Relative paths inside the file are resolved against the file's
//! directory.
//!
//! ```toml
//! model = "msd.toml"
//! degree = 2
//! out = "out"
//!
//! [reduce]
//! reducer = "bt"        # or "arnoldi"
//! omega = 1.0
//! r_min = 1
//! r_max = 100
//!
//! [simulate]
//! h = 0.01
//! t_end = 100.0
//! input = "default"     # exp(-t/10) sin(2t), or "zero"
//! verify_r = [10, 30, 50]
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sgmor_core::msd::MsdConfig;
use sgmor_core::polychaos::basis_size;

use crate::error::{CliError, Result};
use crate::model::ModelFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReducerKind {
    Bt,
    Arnoldi,
}

impl ReducerKind {
    pub fn name(self) -> &'static str {
        match self {
            ReducerKind::Bt => "bt",
            ReducerKind::Arnoldi => "arnoldi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputSignal {
    Default,
    Zero,
}

impl InputSignal {
    pub fn function(self) -> fn(f64, &mut [f64]) {
        match self {
            InputSignal::Default => sgmor_core::simulate::default_input,
            InputSignal::Zero => sgmor_core::simulate::zero_input,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub h: f64,
    pub t_end: f64,
    pub input: InputSignal,
    pub verify_r: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: MsdConfig,
    pub degree: usize,
    pub reducer: ReducerKind,
    /// Arnoldi expansion point.
    pub omega: f64,
    /// Inclusive; the range is empty when `r_min > r_max`.
    pub r_min: usize,
    pub r_max: usize,
    pub simulation: Simulation,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: MsdConfig::default(),
            degree: 2,
            reducer: ReducerKind::Bt,
            omega: 1.0,
            r_min: 1,
            r_max: 100,
            simulation: Simulation { h: 0.01, t_end: 100.0, input: InputSignal::Default, verify_r: vec![10, 30, 50] },
            out: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: Option<PathBuf>,
    degree: Option<usize>,
    out: Option<PathBuf>,
    #[serde(default)]
    reduce: RawReduce,
    #[serde(default)]
    simulate: RawSimulate,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReduce {
    reducer: Option<ReducerKind>,
    omega: Option<f64>,
    r_min: Option<usize>,
    r_max: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulate {
    h: Option<f64>,
    t_end: Option<f64>,
    input: Option<InputSignal>,
    verify_r: Option<Vec<usize>>,
}

/// Command-line overrides, applied after the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub degree: Option<usize>,
    pub reducer: Option<ReducerKind>,
    pub omega: Option<f64>,
    pub r_max: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Parses `text`; `base` is the directory relative paths refer to.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let mut cfg = Self::default();
        if let Some(model) = raw.model {
            cfg.model = ModelFile::load(&base.join(model))?.to_config()?;
        }
        if let Some(out) = raw.out {
            cfg.out = base.join(out);
        }
        cfg.degree = raw.degree.unwrap_or(cfg.degree);
        cfg.reducer = raw.reduce.reducer.unwrap_or(cfg.reducer);
        cfg.omega = raw.reduce.omega.unwrap_or(cfg.omega);
        cfg.r_min = raw.reduce.r_min.unwrap_or(cfg.r_min);
        cfg.r_max = raw.reduce.r_max.unwrap_or(cfg.r_max);
        let sim = &mut cfg.simulation;
        sim.h = raw.simulate.h.unwrap_or(sim.h);
        sim.t_end = raw.simulate.t_end.unwrap_or(sim.t_end);
        sim.input = raw.simulate.input.unwrap_or(sim.input);
        if let Some(rs) = raw.simulate.verify_r {
            sim.verify_r = rs;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(d) = o.degree {
            self.degree = d;
        }
        if let Some(r) = o.reducer {
            self.reducer = r;
        }
        if let Some(w) = o.omega {
            self.omega = w;
        }
        if let Some(r) = o.r_max {
            self.r_max = r;
        }
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
    }

    /// Number of chaos basis polynomials.
    pub fn basis_len(&self) -> Result<usize> {
        basis_size(self.model.parameter_count(), self.degree).map_err(|e| CliError::Config(format!("degree: {e}")))
    }

    /// First-order state dimension `2 n s`.
    pub fn state_dim(&self) -> Result<usize> {
        self.basis_len()?
            .checked_mul(2 * self.model.masses.len())
            .ok_or_else(|| CliError::Config("state dimension overflows".into()))
    }

    pub fn r_range(&self) -> std::ops::RangeInclusive<usize> {
        self.r_min..=self.r_max
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate().map_err(|e| CliError::Config(format!("model: {e}")))?;
        let m = self.state_dim()?;
        let check_r = |what: &str, r: usize| {
            if r == 0 || r > m {
                Err(CliError::Config(format!("{what} = {r} outside [1, {m}]")))
            } else {
                Ok(())
            }
        };
        if self.r_min <= self.r_max {
            check_r("r_min", self.r_min)?;
            check_r("r_max", self.r_max)?;
        }
        if !self.omega.is_finite() {
            return Err(CliError::Config(format!("omega = {} is not finite", self.omega)));
        }
        let sim = &self.simulation;
        sgmor_core::simulate::step_count(sim.h, sim.t_end).map_err(|e| CliError::Config(format!("simulate: {e}")))?;
        Ok(())
    }

    /// [`validate`](Self::validate) plus the reduced dimensions to simulate.
    pub fn validate_verify(&self) -> Result<()> {
        self.validate()?;
        let m = self.state_dim()?;
        match self.simulation.verify_r.iter().find(|&&r| r == 0 || r > m) {
            Some(r) => Err(CliError::Config(format!("verify_r = {r} outside [1, {m}]"))),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = ExperimentConfig::parse("", Path::new("/x")).unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        cfg.validate().unwrap();
        assert_eq!(cfg.basis_len().unwrap(), 120);
        assert_eq!(cfg.state_dim().unwrap(), 960);
    }

    #[test]
    fn file_values_and_overrides() {
        let text = "degree = 1\nout = \"res\"\n[reduce]\nreducer = \"arnoldi\"\nomega = 10.0\nr_max = 7\n\
                    [simulate]\ninput = \"zero\"\nverify_r = [2]\n";
        let mut cfg = ExperimentConfig::parse(text, Path::new("/base")).unwrap();
        assert_eq!(cfg.reducer, ReducerKind::Arnoldi);
        assert_eq!(cfg.out, Path::new("/base/res"));
        assert_eq!(cfg.simulation.input, InputSignal::Zero);
        assert_eq!(cfg.r_range(), 1..=7);
        cfg.apply(&Overrides { degree: Some(0), r_max: Some(3), ..Default::default() });
        assert_eq!((cfg.degree, cfg.r_max, cfg.omega), (0, 3, 10.0));
        cfg.validate().unwrap();
    }

    #[test]
    fn invalid_ranges_rejected() {
        let mut cfg = ExperimentConfig { degree: 0, ..Default::default() };
        cfg.r_max = 9;
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 2);
        cfg.r_max = 8;
        cfg.simulation.verify_r = vec![8];
        cfg.validate_verify().unwrap();
        cfg.simulation.verify_r = vec![0];
        cfg.validate().unwrap();
        assert!(cfg.validate_verify().is_err());
        cfg.simulation.verify_r.clear();
        cfg.r_min = 5;
        cfg.r_max = 0;
        cfg.validate().unwrap();
        cfg.simulation.h = -1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::parse("degre = 2", Path::new(".")).is_err());
        assert!(ExperimentConfig::parse("[reduce]\nreducer = \"pod\"", Path::new(".")).is_err());
    }
}
