//! Configuration file and run-manifest handling.
//!
//! The config format is TOML with one section per command; every field has
//! a default except the master seed, which must be given explicitly
//! (`--seed` or the config) for any command that draws random numbers.
//! Each run writes `run-manifest.toml` into the output directory: the same
//! format with every field resolved, plus a top-level `command` key, so a
//! manifest can be replayed bit-for-bit with `gpdlab rerun`.

use anyhow::{bail, Context, Result};
use gpdlab::Method;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    /// Set in manifests; names the section to replay.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reject: Option<RejectSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normtest: Option<NormtestSpec>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::load(p),
            None => Ok(Self::default()),
        }
    }
}

fn require_seed(spec_seed: Option<u64>, flag_seed: Option<u64>) -> Result<u64> {
    flag_seed.or(spec_seed).context(
        "a master seed is required for reproducibility: pass --seed or set `seed` in the config",
    )
}

/// Normality-grid study settings; defaults reproduce the full published
/// grid (three shapes, five sizes, three methods, m = 1000).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSpec {
    pub xi0: Vec<f64>,
    pub sigma0: f64,
    pub mu0: f64,
    pub sample_sizes: Vec<usize>,
    pub methods: Vec<Method>,
    pub m: usize,
    pub mc_pvalue_reps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for SimulateSpec {
    fn default() -> Self {
        SimulateSpec {
            xi0: vec![0.25, 0.5, 0.75],
            sigma0: 1.0,
            mu0: 1.0,
            sample_sizes: vec![25, 50, 100, 250, 500],
            methods: vec![Method::Pwm, Method::Zs, Method::Ml],
            m: 1000,
            mc_pvalue_reps: gpdlab::simlab::DEFAULT_MC_PVALUE_REPS,
            seed: None,
        }
    }
}

impl SimulateSpec {
    pub fn resolve(mut self, seed: Option<u64>) -> Result<Self> {
        self.seed = Some(require_seed(self.seed, seed)?);
        Ok(self)
    }
}

/// Rejection-rate study settings; defaults reproduce the published grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RejectSpec {
    pub xi0: Vec<f64>,
    pub sigma0: f64,
    pub mu0: f64,
    pub sample_sizes: Vec<usize>,
    pub m: usize,
    pub bootstrap_reps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for RejectSpec {
    fn default() -> Self {
        RejectSpec {
            xi0: vec![0.2, 0.4, 0.6],
            sigma0: 1.0,
            mu0: 1.0,
            sample_sizes: vec![15, 50, 100, 150, 250],
            m: 1000,
            bootstrap_reps: gpdlab::simlab::DEFAULT_BOOTSTRAP_REPS,
            seed: None,
        }
    }
}

impl RejectSpec {
    pub fn resolve(mut self, seed: Option<u64>) -> Result<Self> {
        self.seed = Some(require_seed(self.seed, seed)?);
        Ok(self)
    }
}

/// Published-results audit settings.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AuditSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_target: Option<usize>,
}

impl AuditSpec {
    pub fn resolve(
        mut self,
        input: Option<PathBuf>,
        m_target: Option<usize>,
    ) -> Result<Self> {
        if input.is_some() {
            self.input = input;
        }
        if m_target.is_some() {
            self.m_target = m_target;
        }
        if self.input.is_none() {
            bail!("an input file with rows `label,n,bias,rmse,m` is required (--input or config)");
        }
        Ok(self)
    }
}

/// Tail-fit pipeline settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prices: Option<PathBuf>,
    pub date_column: String,
    pub price_column: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub method: Method,
    pub boot_reps: usize,
    pub confidence: f64,
    /// Plot-data file, relative to the output directory unless absolute.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pp_out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for FitSpec {
    fn default() -> Self {
        FitSpec {
            prices: None,
            date_column: "date".into(),
            price_column: "close".into(),
            top_k: None,
            threshold: None,
            method: Method::Zs,
            boot_reps: gpdlab::simlab::DEFAULT_BOOTSTRAP_REPS,
            confidence: 0.95,
            pp_out: None,
            seed: None,
        }
    }
}

pub struct FitOverrides {
    pub prices: Option<PathBuf>,
    pub top_k: Option<usize>,
    pub threshold: Option<f64>,
    pub method: Option<String>,
    pub boot_reps: Option<usize>,
    pub confidence: Option<f64>,
    pub pp_out: Option<PathBuf>,
    pub date_column: Option<String>,
    pub price_column: Option<String>,
}

impl FitSpec {
    pub fn resolve(mut self, ov: FitOverrides, seed: Option<u64>) -> Result<Self> {
        if ov.prices.is_some() {
            self.prices = ov.prices;
        }
        if ov.top_k.is_some() {
            self.top_k = ov.top_k;
        }
        if ov.threshold.is_some() {
            self.threshold = ov.threshold;
        }
        if let Some(m) = ov.method {
            self.method = m.parse::<Method>()?;
        }
        if let Some(b) = ov.boot_reps {
            self.boot_reps = b;
        }
        if let Some(c) = ov.confidence {
            self.confidence = c;
        }
        if ov.pp_out.is_some() {
            self.pp_out = ov.pp_out;
        }
        if let Some(d) = ov.date_column {
            self.date_column = d;
        }
        if let Some(p) = ov.price_column {
            self.price_column = p;
        }
        if self.prices.is_none() {
            bail!("a price file is required (--prices or config)");
        }
        if self.top_k.is_some() && self.threshold.is_some() {
            bail!("--top-k and --threshold are mutually exclusive");
        }
        if self.top_k.is_none() && self.threshold.is_none() {
            self.top_k = Some(150);
        }
        self.seed = Some(require_seed(self.seed, seed)?);
        Ok(self)
    }
}

/// Raw-column normality test settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormtestSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    pub mc_reps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for NormtestSpec {
    fn default() -> Self {
        NormtestSpec {
            data: None,
            theta0: None,
            mc_reps: gpdlab::simlab::DEFAULT_MC_PVALUE_REPS,
            seed: None,
        }
    }
}

impl NormtestSpec {
    pub fn resolve(
        mut self,
        data: Option<PathBuf>,
        theta0: Option<f64>,
        mc_reps: Option<usize>,
        seed: Option<u64>,
    ) -> Result<Self> {
        if data.is_some() {
            self.data = data;
        }
        if theta0.is_some() {
            self.theta0 = theta0;
        }
        if let Some(r) = mc_reps {
            self.mc_reps = r;
        }
        if self.data.is_none() {
            bail!("a data file (one number per line) is required (--data or config)");
        }
        self.seed = Some(require_seed(self.seed, seed)?);
        Ok(self)
    }
}
