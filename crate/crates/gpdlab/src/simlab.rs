//! Seeded, reproducible Monte Carlo experiments: the estimator-normality
//! grid, the bootstrap rejection-rate study, and the published-results
//! audit.
//!
//! Replicates run in parallel, but every replicate owns a substream keyed
//! by (master seed, cell identity, replicate index) and results are
//! collected by index, so outputs are bit-identical regardless of worker
//! count. Growing `m` never changes the replicates that already existed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimators::{estimate, parametric_bootstrap_sd, Method};
use crate::gpd::{sample_gpd, shift_to_two_param, GpdParams};
use crate::normtest::{
    jarque_bera, lilliefors, moment_stats, mse_bias_summary, z_from_published, PvalueMethod,
    SimulationSummary,
};
use crate::stream::StreamKey;

/// Two-sided 5% critical value of the standard normal, as used by the
/// rejection study.
pub const Z_CRIT_5PCT: f64 = 1.959964;

pub const DEFAULT_MC_PVALUE_REPS: usize = 10_000;
pub const DEFAULT_BOOTSTRAP_REPS: usize = 1_000;

// Stream purposes; folded into every key so the sampling, p-value and
// bootstrap streams never overlap.
#[derive(Clone, Copy)]
enum Purpose {
    Replicate = 1,
    JbPvalue = 2,
    LillieforsPvalue = 3,
    Bootstrap = 4,
}

/// One Monte Carlo experiment: a single true parameter triple, a list of
/// sample sizes, methods, and replication/seed settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub xi0: f64,
    pub sigma0: f64,
    pub mu0: f64,
    pub sample_sizes: Vec<usize>,
    pub methods: Vec<Method>,
    /// Replicates per cell.
    pub m: usize,
    pub mc_pvalue_reps: usize,
    pub bootstrap_reps: usize,
    /// Explicit master seed; no ambient entropy anywhere.
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.xi0 > 0.0) {
            return Err(Error::Config("xi0 must be positive for sampling".into()));
        }
        if !(self.sigma0 > 0.0) {
            return Err(Error::Config("sigma0 must be positive".into()));
        }
        if !self.mu0.is_finite() {
            return Err(Error::Config("mu0 must be finite".into()));
        }
        if self.m < 100 {
            return Err(Error::Config("m must be at least 100".into()));
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.iter().any(|&n| n < 10) {
            return Err(Error::Config("sample sizes must all be at least 10".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method required".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if !self.methods.iter().all(|m| seen.insert(*m)) {
            return Err(Error::Config("duplicate methods in config".into()));
        }
        if self.mc_pvalue_reps < 100 {
            return Err(Error::Config("mc_pvalue_reps must be at least 100".into()));
        }
        if self.bootstrap_reps < 50 {
            return Err(Error::Config("bootstrap_reps must be at least 50".into()));
        }
        Ok(())
    }

    fn params(&self) -> Result<GpdParams<f64>> {
        GpdParams::new(self.xi0, self.sigma0, self.mu0)
    }

    // Cell identity: purpose, size, method and the true parameters. The
    // replicate index is folded in by the caller.
    fn cell_key(&self, purpose: Purpose, n: usize, method: Method) -> StreamKey {
        StreamKey::new(self.master_seed)
            .with(purpose as u64)
            .with(n as u64)
            .with(method.tag())
            .with_f64(self.xi0)
            .with_f64(self.sigma0)
            .with_f64(self.mu0)
    }
}

/// Normality-grid outcome for one (n, method) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub xi0: f64,
    pub n: usize,
    pub method: Method,
    pub jb_pvalue: f64,
    pub lilliefors_pvalue: f64,
    pub t_stat: f64,
    pub t_pvalue: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub replicates_used: usize,
    pub failed_replicates: usize,
    pub summary: SimulationSummary<f64>,
}

impl CellResult {
    pub const CSV_HEADER: &'static str =
        "xi0,n,method,jb_pvalue,lilliefors_pvalue,t_pvalue,t_stat,skewness,kurtosis,bias,mse,replicates_used";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.xi0,
            self.n,
            self.method,
            self.jb_pvalue,
            self.lilliefors_pvalue,
            self.t_pvalue,
            self.t_stat,
            self.skewness,
            self.kurtosis,
            self.summary.bias,
            self.summary.mse,
            self.replicates_used
        )
    }
}

/// Rejection-study outcome for one sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionResult {
    pub xi0: f64,
    pub n: usize,
    pub mean_z: f64,
    pub var_z: f64,
    /// Proportion of replicates with |z| above the 5% critical value.
    pub reject_rate_5pct: f64,
    pub replicates_used: usize,
    pub failed_replicates: usize,
}

impl RejectionResult {
    pub const CSV_HEADER: &'static str =
        "xi0,n,mean_z,var_z,reject_rate,replicates_used";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.xi0, self.n, self.mean_z, self.var_z, self.reject_rate_5pct, self.replicates_used
        )
    }
}

/// Per-replicate shape estimates of one cell (`None` where the replicate
/// failed). Replicate `j` depends only on (master seed, cell, j).
pub fn simulate_cell_estimates(
    cfg: &ExperimentConfig,
    n: usize,
    method: Method,
) -> Result<Vec<Option<f64>>> {
    cfg.validate()?;
    let params = cfg.params()?;
    let key = cfg.cell_key(Purpose::Replicate, n, method);
    let estimates: Vec<Option<f64>> = (0..cfg.m)
        .into_par_iter()
        .map(|j| {
            let mut rng = key.with(j as u64).rng();
            let sampled = sample_gpd(n, &params, &mut rng).ok()?;
            let (shifted, _) = shift_to_two_param(&sampled).ok()?;
            match estimate(&shifted, method) {
                Ok(r) if r.converged && r.xi_hat.is_finite() => Some(r.xi_hat),
                _ => None,
            }
        })
        .collect();
    Ok(estimates)
}

fn collect_converged(raw: &[Option<f64>], m: usize) -> Result<Vec<f64>> {
    let xs: Vec<f64> = raw.iter().flatten().copied().collect();
    let failed = m - xs.len();
    // a cell is unusable once more than 5% of replicates fail
    if failed * 20 > m {
        return Err(Error::TooManyFailures { failed, total: m });
    }
    Ok(xs)
}

fn run_normality_cell(cfg: &ExperimentConfig, n: usize, method: Method) -> Result<CellResult> {
    let raw = simulate_cell_estimates(cfg, n, method)?;
    let xs = collect_converged(&raw, cfg.m)?;
    let failed = cfg.m - xs.len();

    let mut jb_rng = cfg.cell_key(Purpose::JbPvalue, n, method).rng();
    let jb = jarque_bera(&xs, PvalueMethod::MonteCarlo, cfg.mc_pvalue_reps, &mut jb_rng)?;
    let mut lf_rng = cfg.cell_key(Purpose::LillieforsPvalue, n, method).rng();
    let lf = lilliefors(&xs, cfg.mc_pvalue_reps, &mut lf_rng)?;
    let summary = mse_bias_summary(&xs, cfg.xi0)?;
    let moments = moment_stats(&xs)?;

    Ok(CellResult {
        xi0: cfg.xi0,
        n,
        method,
        jb_pvalue: jb.pvalue,
        lilliefors_pvalue: lf.pvalue,
        t_stat: summary.t,
        t_pvalue: summary.z_pvalue,
        skewness: moments.skewness,
        kurtosis: moments.kurtosis,
        replicates_used: xs.len(),
        failed_replicates: failed,
        summary,
    })
}

/// The normality grid: for every (n, method) cell, simulate `m`
/// three-parameter samples, subtract the minimum, estimate the shape, and
/// test the estimates for normality (Jarque–Bera, Lilliefors, MSE/bias t).
pub fn run_normality_grid(cfg: &ExperimentConfig) -> Result<Vec<CellResult>> {
    cfg.validate()?;
    let mut out = Vec::with_capacity(cfg.sample_sizes.len() * cfg.methods.len());
    for &n in &cfg.sample_sizes {
        for &method in &cfg.methods {
            out.push(run_normality_cell(cfg, n, method)?);
        }
    }
    Ok(out)
}

pub(crate) fn rejection_fraction(zs: &[f64]) -> f64 {
    if zs.is_empty() {
        return f64::NAN;
    }
    let rejected = zs.iter().filter(|z| z.abs() > Z_CRIT_5PCT).count();
    rejected as f64 / zs.len() as f64
}

fn run_rejection_cell(cfg: &ExperimentConfig, n: usize) -> Result<RejectionResult> {
    let params = cfg.params()?;
    let sample_key = cfg.cell_key(Purpose::Replicate, n, Method::Zs);
    let boot_key = cfg.cell_key(Purpose::Bootstrap, n, Method::Zs);
    let raw: Vec<Option<f64>> = (0..cfg.m)
        .into_par_iter()
        .map(|j| {
            let mut rng = sample_key.with(j as u64).rng();
            let sampled = sample_gpd(n, &params, &mut rng).ok()?;
            let (shifted, _) = shift_to_two_param(&sampled).ok()?;
            let rec = estimate(&shifted, Method::Zs).ok()?;
            if !rec.converged {
                return None;
            }
            let mut boot_rng = boot_key.with(j as u64).rng();
            let sd =
                parametric_bootstrap_sd(&shifted, Method::Zs, cfg.bootstrap_reps, &mut boot_rng)
                    .ok()?;
            if !(sd > 0.0) {
                return None;
            }
            Some((rec.xi_hat - cfg.xi0) / sd)
        })
        .collect();
    let zs = collect_converged(&raw, cfg.m)?;
    let failed = cfg.m - zs.len();
    let k = zs.len() as f64;
    let mean_z = zs.iter().sum::<f64>() / k;
    let var_z = zs.iter().map(|z| (z - mean_z).powi(2)).sum::<f64>() / (k - 1.0);
    Ok(RejectionResult {
        xi0: cfg.xi0,
        n,
        mean_z,
        var_z,
        reject_rate_5pct: rejection_fraction(&zs),
        replicates_used: zs.len(),
        failed_replicates: failed,
    })
}

/// The bootstrap rejection study: per replicate, fit the Zhang–Stephens
/// shape, bootstrap its standard deviation (parametric resampling; see
/// [`parametric_bootstrap_sd`]), form `z = (ξ̂ − ξ₀)/sd` and reject when
/// |z| exceeds the 5% normal critical value.
pub fn run_rejection_study(cfg: &ExperimentConfig) -> Result<Vec<RejectionResult>> {
    cfg.validate()?;
    if cfg.methods != [Method::Zs] {
        return Err(Error::Config(
            "the rejection study is defined for the Zhang-Stephens method only".into(),
        ));
    }
    cfg.sample_sizes
        .iter()
        .map(|&n| run_rejection_cell(cfg, n))
        .collect()
}

/// One published (bias, RMSE) record to audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub label: String,
    pub n: usize,
    pub bias: f64,
    pub rmse: f64,
    pub m: usize,
}

/// z (and rescaled z*) recomputed from one published record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditResult {
    pub label: String,
    pub n: usize,
    pub z: f64,
    pub z_star: Option<f64>,
}

impl AuditResult {
    pub fn csv_row(&self, with_star: bool) -> String {
        match (with_star, self.z_star) {
            (true, Some(zs)) => format!("{},{},{},{}", self.label, self.n, self.z, zs),
            _ => format!("{},{},{}", self.label, self.n, self.z),
        }
    }
}

/// Pure arithmetic over published rows; no randomness, no config.
pub fn audit_published(rows: &[AuditRow], m_target: Option<usize>) -> Result<Vec<AuditResult>> {
    rows.iter()
        .map(|r| {
            let (z, z_star) = z_from_published(r.bias, r.rmse, r.m, m_target)?;
            Ok(AuditResult {
                label: r.label.clone(),
                n: r.n,
                z,
                z_star,
            })
        })
        .collect()
}

/// Reads audit rows from a delimited file with header `label,n,bias,rmse,m`.
pub fn read_audit_rows(path: &Path) -> Result<Vec<AuditRow>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty file".into() })?
        .1;
    let normalized: String = header.to_ascii_lowercase().chars().filter(|c| !c.is_whitespace()).collect();
    if normalized != "label,n,bias,rmse,m" {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected header 'label,n,bias,rmse,m', got '{}'", header.trim()),
        });
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        let parse_num = |field: &str, name: &str| -> Result<f64> {
            field.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid {name} '{field}'"),
            })
        };
        let parse_int = |field: &str, name: &str| -> Result<usize> {
            field.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid {name} '{field}'"),
            })
        };
        rows.push(AuditRow {
            label: fields[0].to_string(),
            n: parse_int(fields[1], "sample size")?,
            bias: parse_num(fields[2], "bias")?,
            rmse: parse_num(fields[3], "rmse")?,
            m: parse_int(fields[4], "replicate count")?,
        });
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 1, msg: "no data rows".into() });
    }
    Ok(rows)
}
