//! Normality statistics: Jarque–Bera, Lilliefors, the MSE/bias t and z
//! statistics with their published-results form, the t* statistic for
//! checking approximate variance expressions, and the Edgeworth density
//! correction.
//!
//! The MSE/bias statistic is `t = √ν·B/√(MSE − B²)` with `ν = m − 1`,
//! `B = θ̄ − θ₀`, MSE with divisor m and S² with divisor m − 1, which makes
//! the identity `m·MSE = ν·S² + m·B²` hold by construction and makes t equal
//! to `√m·B/S` exactly. p-values use the standard normal tail (replicate
//! counts here are always large).

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special::{chi2_sf_2df, normal_cdf, normal_pdf, normal_two_sided_p};

/// Bias/MSE/variance summary of one estimate batch against a known θ₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary<F> {
    /// Replicate count.
    pub m: usize,
    /// True parameter the batch was generated under.
    pub theta0: F,
    /// Mean estimate θ̄.
    pub mean_est: F,
    /// Variance of the estimates, divisor m − 1.
    pub s2: F,
    /// Bias B = θ̄ − θ₀.
    pub bias: F,
    /// Mean squared error, divisor m.
    pub mse: F,
    /// t = √(m−1)·B/√(MSE − B²).
    pub t: F,
    /// Two-sided standard normal tail of t.
    pub z_pvalue: F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    JarqueBera,
    Lilliefors,
    MseBiasT,
}

impl std::fmt::Display for NormMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            NormMethod::JarqueBera => "jarque-bera",
            NormMethod::Lilliefors => "lilliefors",
            NormMethod::MseBiasT => "mse-bias-t",
        };
        f.write_str(s)
    }
}

/// How a report's p-value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PvalueMethod {
    MonteCarlo,
    Asymptotic,
    Exact,
}

/// Statistic, p-value and provenance of one normality test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport<F> {
    pub statistic: F,
    pub pvalue: F,
    pub method: NormMethod,
    pub n: usize,
    pub pvalue_method: PvalueMethod,
}

/// Standardized cumulants and sample size for the Edgeworth correction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeworthSpec<F> {
    pub rho3: F,
    pub rho4: F,
    pub n: usize,
}

impl<F: Real> EdgeworthSpec<F> {
    pub fn new(rho3: F, rho4: F, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("Edgeworth spec requires n >= 1"));
        }
        if !rho3.is_finite() || !rho4.is_finite() {
            return Err(Error::domain("cumulants must be finite"));
        }
        Ok(EdgeworthSpec { rho3, rho4, n })
    }
}

/// Edgeworth expansion value; the expansion is not a true density and can
/// dip below zero for extreme inputs, which the flag records.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeworthDensity<F> {
    pub value: F,
    pub negative: bool,
}

/// Mean and raw central moments (divisor n) of a data vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<F> {
    pub mean: F,
    /// Central second moment, divisor n.
    pub variance: F,
    /// m₃/m₂^(3/2).
    pub skewness: F,
    /// m₄/m₂² (normal population: 3).
    pub kurtosis: F,
}

/// Mean, variance, skewness and kurtosis with divisor-n central moments.
pub fn moment_stats<F: Real>(xs: &[F]) -> Result<Moments<F>> {
    if xs.len() < 4 {
        return Err(Error::domain("moment statistics require at least 4 values"));
    }
    let nf = F::of_usize(xs.len());
    let mean = xs.iter().fold(F::zero(), |a, &x| a + x) / nf;
    let (mut m2, mut m3, mut m4) = (F::zero(), F::zero(), F::zero());
    for &x in xs {
        let d = x - mean;
        let d2 = d * d;
        m2 = m2 + d2;
        m3 = m3 + d2 * d;
        m4 = m4 + d2 * d2;
    }
    m2 = m2 / nf;
    m3 = m3 / nf;
    m4 = m4 / nf;
    if m2 <= F::zero() {
        return Err(Error::degenerate("zero variance"));
    }
    Ok(Moments {
        mean,
        variance: m2,
        skewness: m3 / m2.powf(F::of(1.5)),
        kurtosis: m4 / (m2 * m2),
    })
}

pub(crate) fn jb_statistic<F: Real>(skewness: F, kurtosis: F, n: usize) -> F {
    let excess = kurtosis - F::of(3.0);
    F::of_usize(n) / F::of(6.0) * (skewness * skewness + excess * excess / F::of(4.0))
}

/// Jarque–Bera normality test, `JB = (n/6)(skew² + (kurt − 3)²/4)`.
///
/// The p-value is either the asymptotic χ²(2) upper tail or a Monte Carlo
/// tail over `mc_reps` standard normal samples of the same size, with the
/// `(k+1)/(reps+1)` correction.
pub fn jarque_bera<F, R>(
    xs: &[F],
    pvalue_method: PvalueMethod,
    mc_reps: usize,
    rng: &mut R,
) -> Result<NormalityReport<F>>
where
    F: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<F>,
{
    let n = xs.len();
    if n < 8 {
        return Err(Error::domain("Jarque-Bera requires n >= 8"));
    }
    let m = moment_stats(xs)?;
    let jb = jb_statistic(m.skewness, m.kurtosis, n);
    let pvalue = match pvalue_method {
        PvalueMethod::Asymptotic => chi2_sf_2df(jb),
        PvalueMethod::MonteCarlo => {
            if mc_reps == 0 {
                return Err(Error::Config("Monte Carlo p-value needs mc_reps > 0".into()));
            }
            let mut exceed = 0usize;
            let mut draws = vec![F::zero(); n];
            for _ in 0..mc_reps {
                for d in &mut draws {
                    *d = rng.sample(StandardNormal);
                }
                let mm = moment_stats(&draws)?;
                if jb_statistic(mm.skewness, mm.kurtosis, n) >= jb {
                    exceed += 1;
                }
            }
            F::of_usize(exceed + 1) / F::of_usize(mc_reps + 1)
        }
        PvalueMethod::Exact => {
            return Err(Error::Config("Jarque-Bera has no exact p-value".into()))
        }
    };
    Ok(NormalityReport {
        statistic: jb,
        pvalue,
        method: NormMethod::JarqueBera,
        n,
        pvalue_method,
    })
}

// sup |F_n - Phi((x - mean)/sd)| over both one-sided ECDF limits;
// mean and sd (divisor n-1) are estimated from the data.
fn lilliefors_statistic<F: Real>(xs: &[F]) -> Result<F> {
    let n = xs.len();
    let nf = F::of_usize(n);
    let mean = xs.iter().fold(F::zero(), |a, &x| a + x) / nf;
    let ss = xs.iter().fold(F::zero(), |a, &x| a + (x - mean) * (x - mean));
    let sd = (ss / (nf - F::one())).sqrt();
    if !(sd > F::zero()) {
        return Err(Error::degenerate("zero variance"));
    }
    let mut sorted = xs.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut d = F::zero();
    for (i, &x) in sorted.iter().enumerate() {
        let f = normal_cdf((x - mean) / sd);
        let upper = F::of_usize(i + 1) / nf - f;
        let lower = f - F::of_usize(i) / nf;
        d = d.max(upper.abs()).max(lower.abs());
    }
    Ok(d)
}

/// Lilliefors normality test (Kolmogorov–Smirnov with estimated mean and
/// variance); the p-value is always Monte Carlo since the null distribution
/// has no usable closed form.
pub fn lilliefors<F, R>(xs: &[F], mc_reps: usize, rng: &mut R) -> Result<NormalityReport<F>>
where
    F: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<F>,
{
    let n = xs.len();
    if n < 5 {
        return Err(Error::domain("Lilliefors requires n >= 5"));
    }
    if mc_reps == 0 {
        return Err(Error::Config("Monte Carlo p-value needs mc_reps > 0".into()));
    }
    let d_obs = lilliefors_statistic(xs)?;
    let mut exceed = 0usize;
    let mut draws = vec![F::zero(); n];
    for _ in 0..mc_reps {
        for d in &mut draws {
            *d = rng.sample(StandardNormal);
        }
        if lilliefors_statistic(&draws)? >= d_obs {
            exceed += 1;
        }
    }
    Ok(NormalityReport {
        statistic: d_obs,
        pvalue: F::of_usize(exceed + 1) / F::of_usize(mc_reps + 1),
        method: NormMethod::Lilliefors,
        n,
        pvalue_method: PvalueMethod::MonteCarlo,
    })
}

/// Bias, MSE, variance and the MSE/bias t statistic of a batch of estimates
/// against the true parameter.
pub fn mse_bias_summary<F: Real>(estimates: &[F], theta0: F) -> Result<SimulationSummary<F>> {
    let m = estimates.len();
    if m < 10 {
        return Err(Error::domain("summary requires at least 10 estimates"));
    }
    if estimates.iter().any(|e| !e.is_finite()) {
        return Err(Error::domain("estimates must be finite"));
    }
    let mf = F::of_usize(m);
    let mean_est = estimates.iter().fold(F::zero(), |a, &x| a + x) / mf;
    let bias = mean_est - theta0;
    let mse = estimates
        .iter()
        .fold(F::zero(), |a, &x| a + (x - theta0) * (x - theta0))
        / mf;
    let s2 = estimates
        .iter()
        .fold(F::zero(), |a, &x| a + (x - mean_est) * (x - mean_est))
        / (mf - F::one());
    let denom = mse - bias * bias;
    if !(denom > F::zero()) {
        return Err(Error::degenerate("MSE - bias^2 is not positive"));
    }
    let t = (mf - F::one()).sqrt() * bias / denom.sqrt();
    Ok(SimulationSummary {
        m,
        theta0,
        mean_est,
        s2,
        bias,
        mse,
        t,
        z_pvalue: normal_two_sided_p(t),
    })
}

/// z statistic from a published (bias, RMSE, m) triple, plus the rescaled
/// z* comparable to a study of `m_target` replicates when requested.
pub fn z_from_published<F: Real>(
    bias: F,
    rmse: F,
    m: usize,
    m_target: Option<usize>,
) -> Result<(F, Option<F>)> {
    if m < 2 {
        return Err(Error::domain("z statistic requires m >= 2"));
    }
    if let Some(mt) = m_target {
        if mt < 2 {
            return Err(Error::domain("z* requires m_target >= 2"));
        }
    }
    let denom2 = rmse * rmse - bias * bias;
    if !(denom2 > F::zero()) {
        return Err(Error::domain(format!(
            "RMSE ({rmse}) must exceed |bias| ({bias})"
        )));
    }
    let denom = denom2.sqrt();
    let z = (F::of_usize(m) - F::one()).sqrt() * bias / denom;
    let z_star = m_target.map(|mt| (F::of_usize(mt) - F::one()).sqrt() * bias / denom);
    Ok((z, z_star))
}

/// t* = √(m−1)·t̄/√(S_t²) over caller-standardized statistics
/// `tⱼ = (θ̂ⱼ − θ₀)/σ̂ₐⱼ`, with S_t² using divisor m.
pub fn t_star<F: Real>(ts: &[F]) -> Result<F> {
    let m = ts.len();
    if m < 10 {
        return Err(Error::domain("t* requires at least 10 statistics"));
    }
    let mf = F::of_usize(m);
    let mean = ts.iter().fold(F::zero(), |a, &x| a + x) / mf;
    let s2 = ts.iter().fold(F::zero(), |a, &x| a + (x - mean) * (x - mean)) / mf;
    if !(s2 > F::zero()) {
        return Err(Error::degenerate("zero variance among the t statistics"));
    }
    Ok((mf - F::one()).sqrt() * mean / s2.sqrt())
}

/// Edgeworth-corrected density
/// `φ(z)·(1 + ρ₃H₃(z)/(6√n) + (3ρ₄H₄(z) + ρ₃²H₆(z))/(72n))`
/// with probabilists' Hermite polynomials H₃, H₄, H₆.
pub fn edgeworth_density<F: Real>(z: F, spec: &EdgeworthSpec<F>) -> EdgeworthDensity<F> {
    let z2 = z * z;
    let h3 = z * (z2 - F::of(3.0));
    let h4 = z2 * (z2 - F::of(6.0)) + F::of(3.0);
    let h6 = z2 * (z2 * (z2 - F::of(15.0)) + F::of(45.0)) - F::of(15.0);
    let nf = F::of_usize(spec.n);
    let correction = spec.rho3 * h3 / (F::of(6.0) * nf.sqrt())
        + (F::of(3.0) * spec.rho4 * h4 + spec.rho3 * spec.rho3 * h6) / (F::of(72.0) * nf);
    let value = normal_pdf(z) * (F::one() + correction);
    EdgeworthDensity {
        value,
        negative: value < F::zero(),
    }
}
