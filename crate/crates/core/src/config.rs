//! Experiment configuration.
//!
//! A run is described by one TOML document (format version 1). Every section
//! is optional and falls back to the defaults below; unknown keys are
//! rejected. The parsed configuration is echoed verbatim (as JSON) into the
//! run manifest, which is enough to rerun the experiment.
//!
//! ```toml
//! version = 1
//! seed = 20170621
//! samples = 2000
//!
//! [environment]
//! total_spins = 200          # N
//! macrofraction_size = 100   # N_m
//! observed_fraction = 0.5    # f
//!
//! [time]                     # evaluation grid for curves
//! t_min = 0.0
//! t_max = 20.0
//! points = 201
//!
//! [average]                  # time averages (1/τ)∫₀^τ
//! tau = 200.0
//! points = 40000
//!
//! [measure]
//! angles = { kind = "haar" }                 # or { kind = "fixed", alpha, beta, gamma }
//! lambda = { kind = "hilbert_schmidt" }      # or { kind = "fixed", value }
//! coupling = { kind = "uniform", low = 0.0, high = 1.0 }  # or { kind = "fixed", value }
//!
//! [fig1]
//! lambda_points = 6          # λ₊ grid over [1/2, 1]
//! beta_points = 7            # β grid over [0, π]
//! realizations = 2           # coupling draws per node
//!
//! [fig2]
//! n_values = [30, 50, 200, 500]
//! plateau_start = 10.0       # late-time window [plateau_start, t_max]
//!
//! [discrimination]
//! times = [0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0]
//! instances = 200            # sampled macrofractions per time
//!
//! [timescales]
//! macrofraction_sizes = [100, 1000]
//!
//! [verify]
//! instances = 200
//! observed = 3
//! unobserved = 3
//! convention_draws = 1000
//! ```

use serde::{Deserialize, Serialize};

use crate::ensemble::MeasureSpec;
use crate::error::{invalid, Result};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub seed: u64,
    pub samples: usize,
    pub environment: EnvironmentLayout,
    pub time: TimeGrid,
    pub average: AverageSpec,
    pub measure: MeasureSpec,
    pub fig1: Fig1Spec,
    pub fig2: Fig2Spec,
    pub discrimination: DiscriminationSpec,
    pub timescales: TimescalesSpec,
    pub verify: VerifySpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvironmentLayout {
    pub total_spins: usize,
    pub macrofraction_size: usize,
    pub observed_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AverageSpec {
    pub tau: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig1Spec {
    pub lambda_points: usize,
    pub beta_points: usize,
    pub realizations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig2Spec {
    pub n_values: Vec<usize>,
    pub plateau_start: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscriminationSpec {
    pub times: Vec<f64>,
    pub instances: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimescalesSpec {
    pub macrofraction_sizes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySpec {
    pub instances: usize,
    pub observed: usize,
    pub unobserved: usize,
    pub convention_draws: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            seed: 20_170_621,
            samples: 2000,
            environment: EnvironmentLayout::default(),
            time: TimeGrid::default(),
            average: AverageSpec::default(),
            measure: MeasureSpec::default(),
            fig1: Fig1Spec::default(),
            fig2: Fig2Spec::default(),
            discrimination: DiscriminationSpec::default(),
            timescales: TimescalesSpec::default(),
            verify: VerifySpec::default(),
        }
    }
}

impl Default for EnvironmentLayout {
    fn default() -> Self {
        Self {
            total_spins: 200,
            macrofraction_size: 100,
            observed_fraction: 0.5,
        }
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            t_min: 0.0,
            t_max: 20.0,
            points: 201,
        }
    }
}

impl Default for AverageSpec {
    fn default() -> Self {
        Self {
            tau: 200.0,
            points: 40_000,
        }
    }
}

impl Default for Fig1Spec {
    fn default() -> Self {
        Self {
            lambda_points: 6,
            beta_points: 7,
            realizations: 2,
        }
    }
}

impl Default for Fig2Spec {
    fn default() -> Self {
        Self {
            n_values: vec![30, 50, 200, 500],
            plateau_start: 10.0,
        }
    }
}

impl Default for DiscriminationSpec {
    fn default() -> Self {
        Self {
            times: vec![0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0],
            instances: 200,
        }
    }
}

impl Default for TimescalesSpec {
    fn default() -> Self {
        Self {
            macrofraction_sizes: vec![100, 1000],
        }
    }
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self {
            instances: 200,
            observed: 3,
            unobserved: 3,
            convention_draws: 1000,
        }
    }
}

impl TimeGrid {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|k| {
                if k + 1 == n {
                    self.t_max
                } else {
                    self.t_min + (self.t_max - self.t_min) * k as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

impl EnvironmentLayout {
    /// Number of unobserved spins, `(1−f)N`.
    pub fn unobserved(&self) -> usize {
        self.total_spins - self.observed()
    }

    /// Number of observed spins, `fN`.
    pub fn observed(&self) -> usize {
        (self.observed_fraction * self.total_spins as f64).round() as usize
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every field; the error names the offending key.
    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(invalid(
                "version",
                format!("unsupported config version {}", self.version),
            ));
        }
        if self.samples == 0 {
            return Err(invalid("samples", "must be at least 1"));
        }
        let env = &self.environment;
        if env.total_spins == 0 {
            return Err(invalid("environment.total_spins", "must be positive"));
        }
        if env.macrofraction_size == 0 {
            return Err(invalid("environment.macrofraction_size", "must be positive"));
        }
        if !(0.0..=1.0).contains(&env.observed_fraction) {
            return Err(invalid("environment.observed_fraction", "must lie in [0, 1]"));
        }
        let observed = env.observed_fraction * env.total_spins as f64;
        if (observed - observed.round()).abs() > 1e-9 {
            return Err(invalid(
                "environment.observed_fraction",
                format!("f·N = {observed} is not a whole number of spins"),
            ));
        }
        if !env.observed().is_multiple_of(env.macrofraction_size) {
            return Err(invalid(
                "environment.macrofraction_size",
                format!(
                    "{} observed spins do not split into macrofractions of {}",
                    env.observed(),
                    env.macrofraction_size
                ),
            ));
        }
        let t = &self.time;
        if t.points < 2 {
            return Err(invalid("time.points", "need at least 2 grid points"));
        }
        if !(t.t_min >= 0.0 && t.t_max > t.t_min && t.t_max.is_finite()) {
            return Err(invalid("time.t_max", "need 0 <= t_min < t_max < inf"));
        }
        if !(self.average.tau > 0.0 && self.average.tau.is_finite()) {
            return Err(invalid("average.tau", "must be positive"));
        }
        if self.average.points < 2 {
            return Err(invalid("average.points", "need at least 2 quadrature points"));
        }
        self.measure.validate()?;
        if self.fig1.lambda_points == 0 || self.fig1.beta_points == 0 {
            return Err(invalid("fig1.lambda_points", "grids must be nonempty"));
        }
        if self.fig1.realizations == 0 {
            return Err(invalid("fig1.realizations", "must be at least 1"));
        }
        if self.fig2.n_values.is_empty() || self.fig2.n_values.contains(&0) {
            return Err(invalid("fig2.n_values", "need nonempty list of positive sizes"));
        }
        if !(self.fig2.plateau_start >= t.t_min && self.fig2.plateau_start < t.t_max) {
            return Err(invalid("fig2.plateau_start", "must lie inside the time grid"));
        }
        if self.discrimination.times.is_empty() || self.discrimination.times.iter().any(|&x| !(x >= 0.0)) {
            return Err(invalid(
                "discrimination.times",
                "need nonempty list of nonnegative times",
            ));
        }
        if self.discrimination.instances == 0 {
            return Err(invalid("discrimination.instances", "must be at least 1"));
        }
        if self.timescales.macrofraction_sizes.iter().any(|&n| n < 2) || self.timescales.macrofraction_sizes.is_empty()
        {
            return Err(invalid("timescales.macrofraction_sizes", "sizes must be >= 2"));
        }
        let v = &self.verify;
        if v.instances == 0 || v.convention_draws == 0 {
            return Err(invalid("verify.instances", "must be at least 1"));
        }
        if v.observed == 0 {
            return Err(invalid("verify.observed", "need at least one observed spin"));
        }
        if v.observed + v.unobserved > 11 || 2usize << (v.observed + v.unobserved) > crate::oracle::DIMENSION_CAP {
            return Err(invalid(
                "verify.unobserved",
                "instance exceeds the oracle dimension cap",
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        let back = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn partial_documents_fill_defaults() {
        let cfg = RunConfig::from_toml("seed = 5\n[environment]\ntotal_spins = 400\n").unwrap();
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.environment.total_spins, 400);
        assert_eq!(cfg.environment.macrofraction_size, 100);
        cfg.validate().unwrap();
    }

    #[test]
    fn errors_name_the_field() {
        assert!(RunConfig::from_toml("[time]\nbogus = 1\n").is_err());
        let mut cfg = RunConfig::default();
        cfg.time.points = 1;
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("time.points"), "{err}");

        let mut cfg = RunConfig::default();
        cfg.environment.macrofraction_size = 30;
        assert!(cfg.validate().unwrap_err().to_string().contains("macrofraction_size"));
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let g = TimeGrid {
            t_min: 0.0,
            t_max: 2.0,
            points: 7,
        };
        let v = g.values();
        assert_eq!(v[0], 0.0);
        assert_eq!(v[6], 2.0);
        assert_eq!(v.len(), 7);
    }
}
