//! Application pipeline: price series → log returns → peaks-over-threshold
//! excesses → GPD tail fit with a bootstrap confidence interval for the
//! shape, the implied tail-index bound, and P-P plot data.

use chrono::NaiveDate;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimators::{bootstrap_sd, estimate, EstimateRecord, Method};
use crate::gpd::{gpd_cdf, GpdParams, Sample};
use crate::special::normal_quantile;

/// Closing prices ordered by date.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    dates: Vec<NaiveDate>,
    prices: Vec<f64>,
}

impl PriceSeries {
    pub fn new(mut rows: Vec<(NaiveDate, f64)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::domain("price series must be non-empty"));
        }
        if rows.iter().any(|(_, p)| !p.is_finite() || *p <= 0.0) {
            return Err(Error::domain("prices must be positive and finite"));
        }
        rows.sort_by_key(|(d, _)| *d);
        for pair in rows.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::domain(format!("duplicate date {}", pair[0].0)));
            }
        }
        let (dates, prices) = rows.into_iter().unzip();
        Ok(PriceSeries { dates, prices })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }
}

/// Log returns with the date of each period's end.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    pub timestamps: Vec<NaiveDate>,
    pub returns: Vec<f64>,
}

/// Excess sample over a threshold, with the threshold that produced it.
#[derive(Debug, Clone)]
pub struct Excesses {
    pub sample: Sample<f64>,
    pub threshold: f64,
}

/// Exceedance selection: either the largest `k` observations or everything
/// strictly above a fixed threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExceedanceRule {
    TopK(usize),
    Threshold(f64),
}

/// Tail fit: all three methods' estimates, the bootstrap standard
/// deviation of the selected one, the confidence interval for ξ and the
/// implied lower bound on the tail index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub threshold: f64,
    /// Exceedance count.
    pub k: usize,
    pub fits: Vec<EstimateRecord<f64>>,
    /// Method the interval is built on.
    pub method: Method,
    pub bootstrap_sd: f64,
    pub confidence: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// 1/ci_hi when the upper endpoint is positive.
    pub index_lower_bound: Option<f64>,
}

/// Loads a delimited price file. The header must contain the named date and
/// price columns (matched case-insensitively); dates are ISO-8601. Rows are
/// reordered by ascending date; duplicate dates are rejected.
pub fn load_price_csv(path: &Path, date_column: &str, price_column: &str) -> Result<PriceSeries> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty file".into() })?
        .1;
    let names: Vec<String> = header
        .split(',')
        .map(|f| f.trim().to_ascii_lowercase())
        .collect();
    let date_idx = names
        .iter()
        .position(|n| n == &date_column.to_ascii_lowercase())
        .ok_or_else(|| Error::Parse {
            line: 1,
            msg: format!("no '{date_column}' column in header '{}'", header.trim()),
        })?;
    let price_idx = names
        .iter()
        .position(|n| n == &price_column.to_ascii_lowercase())
        .ok_or_else(|| Error::Parse {
            line: 1,
            msg: format!("no '{price_column}' column in header '{}'", header.trim()),
        })?;

    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() <= date_idx.max(price_idx) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected at least {} fields", date_idx.max(price_idx) + 1),
            });
        }
        let date: NaiveDate = fields[date_idx].parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("invalid date '{}' (expected YYYY-MM-DD)", fields[date_idx]),
        })?;
        let price: f64 = fields[price_idx].parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("invalid price '{}'", fields[price_idx]),
        })?;
        if !price.is_finite() || price <= 0.0 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("non-positive price {price}"),
            });
        }
        rows.push((date, price));
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 1, msg: "no data rows".into() });
    }
    PriceSeries::new(rows)
}

/// Log returns `r_t = log(P_t / P_{t−1})`, one fewer than the prices.
pub fn log_returns(prices: &PriceSeries) -> Result<ReturnSeries> {
    if prices.len() < 2 {
        return Err(Error::domain("log returns require at least 2 prices"));
    }
    let returns = prices
        .prices()
        .windows(2)
        .map(|w| (w[1] / w[0]).ln())
        .collect();
    Ok(ReturnSeries {
        timestamps: prices.dates()[1..].to_vec(),
        returns,
    })
}

const MIN_EXCEEDANCES: usize = 10;

/// Selects exceedances and returns the excesses `r − u` (strictly positive,
/// ascending) with the threshold used. Under `TopK(k)` the threshold is the
/// (k+1)-th largest return; ties at the threshold are excluded.
pub fn exceedances(rs: &ReturnSeries, rule: ExceedanceRule) -> Result<Excesses> {
    let threshold = match rule {
        ExceedanceRule::TopK(k) => {
            if k < MIN_EXCEEDANCES {
                return Err(Error::domain(format!(
                    "top-k rule refused for k < {MIN_EXCEEDANCES} (got {k})"
                )));
            }
            if rs.returns.len() <= k {
                return Err(Error::domain(format!(
                    "need more than {k} returns to take the largest {k}"
                )));
            }
            let mut sorted = rs.returns.clone();
            sorted.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite returns"));
            sorted[k]
        }
        ExceedanceRule::Threshold(u) => u,
    };
    let excesses: Vec<f64> = rs
        .returns
        .iter()
        .filter(|&&r| r > threshold)
        .map(|&r| r - threshold)
        .collect();
    if excesses.len() < MIN_EXCEEDANCES {
        return Err(Error::domain(format!(
            "only {} returns exceed the threshold {threshold}; at least {MIN_EXCEEDANCES} required",
            excesses.len()
        )));
    }
    Ok(Excesses {
        sample: Sample::new(excesses)?,
        threshold,
    })
}

/// Central confidence interval `ξ̂ ± z·sd` at the given confidence level.
pub fn confidence_interval(xi_hat: f64, sd: f64, confidence: f64) -> Result<(f64, f64)> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::domain(format!(
            "confidence must be in (0, 1), got {confidence}"
        )));
    }
    if !(sd >= 0.0 && sd.is_finite()) {
        return Err(Error::domain("standard deviation must be non-negative"));
    }
    let z = normal_quantile((1.0 + confidence) / 2.0)?;
    Ok((xi_hat - z * sd, xi_hat + z * sd))
}

/// Fits all three methods to the excess sample, bootstraps the selected
/// method's standard deviation, and forms the confidence interval and the
/// implied tail-index lower bound.
pub fn fit_tail<R: Rng + ?Sized>(
    excesses: &Excesses,
    method: Method,
    bootstrap_reps: usize,
    rng: &mut R,
    confidence: f64,
) -> Result<TailFit> {
    let s = &excesses.sample;
    let mut fits = Vec::with_capacity(3);
    let mut selected: Option<EstimateRecord<f64>> = None;
    for m in Method::ALL {
        match estimate(s, m) {
            Ok(r) => {
                if m == method {
                    selected = Some(r);
                }
                fits.push(r);
            }
            Err(e) => {
                if m == method {
                    return Err(e);
                }
                // other methods' failures are reported, not fatal
                fits.push(EstimateRecord {
                    xi_hat: f64::NAN,
                    sigma_hat: f64::NAN,
                    method: m,
                    converged: false,
                });
            }
        }
    }
    let selected = selected.expect("selected method is in Method::ALL");
    if !selected.converged {
        return Err(Error::NonConvergence(format!(
            "{method} did not converge on the excess sample"
        )));
    }
    let sd = bootstrap_sd(s, method, bootstrap_reps, rng)?;
    let (ci_lo, ci_hi) = confidence_interval(selected.xi_hat, sd, confidence)?;
    Ok(TailFit {
        threshold: excesses.threshold,
        k: s.n(),
        fits,
        method,
        bootstrap_sd: sd,
        confidence,
        ci_lo,
        ci_hi,
        index_lower_bound: (ci_hi > 0.0).then(|| 1.0 / ci_hi),
    })
}

/// P-P pairs `((i − 0.5)/n, F(x_(i)))` in ascending order.
pub fn pp_plot_data(s: &Sample<f64>, p: &GpdParams<f64>) -> Result<Vec<(f64, f64)>> {
    let n = s.n() as f64;
    s.values()
        .iter()
        .enumerate()
        .map(|(i, &x)| Ok(((i as f64 + 0.5) / n, gpd_cdf(x, p)?)))
        .collect()
}
