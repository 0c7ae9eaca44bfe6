//! Scenario runner behind the `sbs-monitor` binary: executes one named
//! experiment, writes its CSV/JSON artifacts and a manifest, and maps the
//! outcome to an exit status.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::discrimination::{
    kolmogorov_fuchs, local_success_probability, majority_stats, majority_success_heterogeneous, mean_success,
};
use crate::ensemble::{
    exponent_check, fig1_default_grids, fig1_surface, fig2_curves, keyed_stream_rng, mean_and_stderr, sample_spins,
    StreamDomain,
};
use crate::oracle::suite::{run_all, VerifyReport, VerifySizes};
use crate::spin_model::{macrofraction_fidelity, time_scales};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Fig1,
    Fig2,
    Timescales,
    Discrimination,
    Verify,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::Fig1,
        Scenario::Fig2,
        Scenario::Timescales,
        Scenario::Discrimination,
        Scenario::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig1 => "fig1",
            Scenario::Fig2 => "fig2",
            Scenario::Timescales => "timescales",
            Scenario::Discrimination => "discrimination",
            Scenario::Verify => "verify",
        }
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL.into_iter().find(|sc| sc.name() == s).ok_or_else(|| {
            format!("unknown scenario '{s}' (expected fig1, fig2, timescales, discrimination or verify)")
        })
    }
}

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitKind {
    Success = 0,
    ConfigError = 1,
    VerificationFailure = 2,
    NumericalGate = 3,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("i/o on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Numerics(#[from] crate::error::Error),
}

impl RunError {
    pub fn exit_kind(&self) -> ExitKind {
        match self {
            RunError::Config(_) => ExitKind::ConfigError,
            // an unusable output directory is an invocation problem too
            RunError::Io { .. } => ExitKind::ConfigError,
            RunError::Numerics(_) => ExitKind::NumericalGate,
        }
    }
}

/// A finished run.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub exit: ExitKind,
    /// Artifact paths, manifest last.
    pub files: Vec<PathBuf>,
    /// Gate name and whether it passed.
    pub gates: Vec<(String, bool)>,
    pub verify: Option<VerifyReport>,
}

/// Round-trip-safe decimal: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

struct Csv {
    text: String,
}

impl Csv {
    fn new(header: &[&str]) -> Self {
        Self {
            text: header.join(",") + "\n",
        }
    }

    fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn write(&mut self, name: &str, contents: &str) -> Result<(), RunError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|source| RunError::Io {
            path: path.clone(),
            source,
        })?;
        self.files.push(path);
        Ok(())
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    artifact: &'static str,
    version: &'static str,
    scenario: &'static str,
    seed: u64,
    threads: usize,
    wall_time_s: f64,
    exit_code: i32,
    gates: Vec<Gate>,
    files: Vec<String>,
    config: &'a RunConfig,
}

#[derive(Serialize)]
struct Gate {
    name: String,
    passed: bool,
}

/// Runs `scenario` with an already validated configuration.
pub fn run(scenario: Scenario, config: &RunConfig, out_dir: &Path) -> Result<RunOutcome, RunError> {
    config.validate().map_err(|e| RunError::Config(e.to_string()))?;
    fs::create_dir_all(out_dir).map_err(|source| RunError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let start = Instant::now();
    let mut w = Writer {
        dir: out_dir,
        files: Vec::new(),
    };
    let mut gates = Vec::new();
    let mut verify = None;
    match scenario {
        Scenario::Fig1 => gates.push(("fig1_convergence".to_string(), run_fig1(config, &mut w)?)),
        Scenario::Fig2 => run_fig2(config, &mut w)?,
        Scenario::Timescales => run_timescales(config, &mut w)?,
        Scenario::Discrimination => run_discrimination(config, &mut w)?,
        Scenario::Verify => {
            let report = run_verify(config, &mut w)?;
            gates.push(("verify_zero_failures".to_string(), report.passed()));
            verify = Some(report);
        }
    }
    let exit = if gates.iter().all(|g| g.1) {
        ExitKind::Success
    } else if scenario == Scenario::Verify {
        ExitKind::VerificationFailure
    } else {
        ExitKind::NumericalGate
    };

    let manifest = Manifest {
        artifact: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        scenario: scenario.name(),
        seed: config.seed,
        threads: rayon::current_num_threads(),
        wall_time_s: start.elapsed().as_secs_f64(),
        exit_code: exit as i32,
        gates: gates
            .iter()
            .map(|(name, passed)| Gate {
                name: name.clone(),
                passed: *passed,
            })
            .collect(),
        files: w
            .files
            .iter()
            .map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned())
            .collect(),
        config,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    w.write(&format!("{}_manifest.json", scenario.name()), &json)?;
    Ok(RunOutcome {
        exit,
        files: w.files,
        gates,
        verify,
    })
}

fn run_fig1(config: &RunConfig, w: &mut Writer) -> Result<bool, RunError> {
    let (lambdas, betas) = fig1_default_grids(config);
    let rows = fig1_surface(config, &lambdas, &betas)?;
    let mut csv = Csv::new(&[
        "lambda_plus",
        "beta",
        "mean_B",
        "mean_abs_gamma",
        "stderr_B",
        "stderr_gamma",
    ]);
    for r in &rows {
        csv.row(&[
            fmt_f64(r.lambda_plus),
            fmt_f64(r.beta),
            fmt_f64(r.mean_b),
            fmt_f64(r.mean_abs_gamma),
            fmt_f64(r.stderr_b),
            fmt_f64(r.stderr_gamma),
        ]);
    }
    w.write("fig1_surface.csv", &csv.text)?;
    Ok(rows.iter().all(|r| r.converged))
}

fn run_fig2(config: &RunConfig, w: &mut Writer) -> Result<(), RunError> {
    let curves = fig2_curves(&config.fig2.n_values, config)?;
    let mut plateau = Csv::new(&["n", "plateau_start", "plateau_end", "plateau_mean", "plateau_min"]);
    for c in &curves {
        let mut csv = Csv::new(&["t", "mean_bound", "stderr"]);
        for ((t, m), s) in c.curve.abscissa.iter().zip(&c.curve.mean).zip(&c.curve.stderr) {
            csv.row(&[fmt_f64(*t), fmt_f64(*m), fmt_f64(*s)]);
        }
        w.write(&format!("fig2_n{}.csv", c.n), &csv.text)?;
        let window: Vec<f64> = c
            .curve
            .abscissa
            .iter()
            .zip(&c.curve.mean)
            .filter(|(t, _)| **t >= config.fig2.plateau_start)
            .map(|(_, m)| *m)
            .collect();
        let (mean, _) = mean_and_stderr(&window);
        let min = window.iter().copied().fold(f64::INFINITY, f64::min);
        plateau.row(&[
            c.n.to_string(),
            fmt_f64(config.fig2.plateau_start),
            fmt_f64(config.time.t_max),
            fmt_f64(mean),
            fmt_f64(min),
        ]);
    }
    w.write("fig2_plateau.csv", &plateau.text)
}

/// Environment size scaled with the macrofraction so that `N/N_m` stays
/// at its configured value.
fn scaled_total(config: &RunConfig, n_m: usize) -> usize {
    let env = &config.environment;
    ((n_m * env.total_spins) as f64 / env.macrofraction_size as f64).round() as usize
}

fn run_timescales(config: &RunConfig, w: &mut Writer) -> Result<(), RunError> {
    let f = config.environment.observed_fraction;
    let g2bar = config.measure.g2bar();
    let mut csv = Csv::new(&[
        "N_m",
        "N",
        "f",
        "g2bar",
        "t_B",
        "t_D",
        "ratio_sq",
        "B_at_tB",
        "gamma2_at_tD",
    ]);
    for &n_m in &config.timescales.macrofraction_sizes {
        let n = scaled_total(config, n_m);
        let ts = time_scales(n, n_m, f, g2bar)?;
        let rows = exponent_check(&config.measure, &[ts.t_b, ts.t_d], config.samples, config.seed)?;
        let b_at = (-(n_m as f64) * rows[0].kappa_mc / 2.0).exp();
        let g2_at = (-(1.0 - f) * n as f64 * rows[1].chi_mc).exp();
        csv.row(&[
            n_m.to_string(),
            n.to_string(),
            fmt_f64(f),
            fmt_f64(g2bar),
            fmt_f64(ts.t_b),
            fmt_f64(ts.t_d),
            fmt_f64(ts.ratio_sq),
            fmt_f64(b_at),
            fmt_f64(g2_at),
        ]);
    }
    w.write("timescales.csv", &csv.text)
}

/// One sampled macrofraction at one time.
#[derive(Clone, Copy, Debug)]
struct HeteroRow {
    p_tilde: f64,
    b: f64,
    k: f64,
    limit: f64,
}

fn run_discrimination(config: &RunConfig, w: &mut Writer) -> Result<(), RunError> {
    let n_m = config.environment.macrofraction_size;
    let mut csv = Csv::new(&[
        "t",
        "p_bar",
        "S_bar",
        "p_tilde_exact",
        "chernoff_lb",
        "K",
        "fuchs_limit",
    ]);
    let mut hetero = Csv::new(&["t", "instance", "p_tilde", "B", "K", "fuchs_limit", "ok"]);
    for (ti, &t) in config.discrimination.times.iter().enumerate() {
        let est = mean_success(&config.measure, t, config.samples, config.seed)?;
        let stats = majority_stats(n_m as u64, est.p_bar)?;
        let rows = (0..config.discrimination.instances as u64)
            .into_par_iter()
            .map(|i| -> crate::error::Result<HeteroRow> {
                let mut rng = keyed_stream_rng(config.seed, StreamDomain::Discrimination, ti as u64, i);
                let spins = sample_spins(&config.measure, n_m, &mut rng);
                let probs: Vec<f64> = spins.iter().map(|p| local_success_probability(p, t).min(1.0)).collect();
                let p_tilde = majority_success_heterogeneous(&probs)?;
                let b = macrofraction_fidelity(&spins, t).clamp(0.0, 1.0);
                let kf = kolmogorov_fuchs(p_tilde, b)?;
                Ok(HeteroRow {
                    p_tilde,
                    b,
                    k: kf.k,
                    limit: kf.fuchs_limit,
                })
            })
            .collect::<crate::error::Result<Vec<_>>>()?;
        let ks: Vec<f64> = rows.iter().map(|r| r.k).collect();
        let limits: Vec<f64> = rows.iter().map(|r| r.limit).collect();
        csv.row(&[
            fmt_f64(t),
            fmt_f64(est.p_bar),
            fmt_f64(est.s_bar),
            fmt_f64(stats.p_tilde_exact),
            fmt_f64(stats.chernoff_lb),
            fmt_f64(mean_and_stderr(&ks).0),
            fmt_f64(mean_and_stderr(&limits).0),
        ]);
        for (i, r) in rows.iter().enumerate() {
            hetero.row(&[
                fmt_f64(t),
                i.to_string(),
                fmt_f64(r.p_tilde),
                fmt_f64(r.b),
                fmt_f64(r.k),
                fmt_f64(r.limit),
                (r.k <= r.limit + 1e-9).to_string(),
            ]);
        }
    }
    w.write("discrimination.csv", &csv.text)?;
    w.write("discrimination_hetero.csv", &hetero.text)
}

fn run_verify(config: &RunConfig, w: &mut Writer) -> Result<VerifyReport, RunError> {
    let v = &config.verify;
    let sizes = VerifySizes {
        convention_draws: v.convention_draws,
        instances: v.instances,
        observed: v.observed,
        unobserved: v.unobserved,
        ..VerifySizes::default()
    };
    let report = run_all(&sizes, config.seed)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    w.write("verify.json", &json)?;
    Ok(report)
}
