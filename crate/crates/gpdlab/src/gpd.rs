//! The generalized Pareto probability model.
//!
//! CDF (heavy-tail branch only, ξ > 0):
//!
//! `F(x) = 1 − (1 + (ξ/σ)(x − μ))^(−1/ξ)`, for `x ≥ μ`, `σ > 0`.
//!
//! Sampling is by inverse transform, one uniform per draw, so a sample is a
//! pure function of the stream state. The ξ ≤ 0 branches (exponential and
//! bounded-support cases) are deliberately not implemented; estimation
//! results may still carry ξ̂ ≤ 0 and are stored unclamped.

use rand::distr::{Distribution, StandardUniform};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Shape ξ, scale σ and location μ of a GPD.
///
/// `sigma > 0` is enforced at construction; ξ may be any finite value so
/// that estimation output can be stored, but sampling and CDF evaluation
/// require ξ > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpdParams<F> {
    xi: F,
    sigma: F,
    mu: F,
}

impl<F: Real> GpdParams<F> {
    pub fn new(xi: F, sigma: F, mu: F) -> Result<Self> {
        if !xi.is_finite() || !sigma.is_finite() || !mu.is_finite() {
            return Err(Error::domain("GPD parameters must be finite"));
        }
        if sigma <= F::zero() {
            return Err(Error::domain(format!("scale must be positive, got {sigma}")));
        }
        Ok(GpdParams { xi, sigma, mu })
    }

    /// Two-parameter form (μ = 0).
    pub fn two_param(xi: F, sigma: F) -> Result<Self> {
        Self::new(xi, sigma, F::zero())
    }

    pub fn xi(&self) -> F {
        self.xi
    }

    pub fn sigma(&self) -> F {
        self.sigma
    }

    pub fn mu(&self) -> F {
        self.mu
    }

    /// Tail index α = 1/ξ; moments exist up to order α.
    pub fn tail_index(&self) -> Result<F> {
        if self.xi == F::zero() {
            return Err(Error::domain("tail index undefined at xi = 0"));
        }
        Ok(self.xi.recip())
    }

    fn require_heavy_tail(&self) -> Result<()> {
        if self.xi <= F::zero() {
            return Err(Error::domain(format!(
                "operation requires xi > 0, got {}",
                self.xi
            )));
        }
        Ok(())
    }
}

/// An ordered sample: values are kept as ascending order statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<F> {
    values: Vec<F>,
}

impl<F: Real> Sample<F> {
    /// Builds a sample, sorting the values. Rejects empty or non-finite input.
    pub fn new(mut values: Vec<F>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("sample must be non-empty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("sample values must be finite"));
        }
        values.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values compare"));
        Ok(Sample { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Ascending order statistics.
    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn min(&self) -> F {
        self.values[0]
    }

    pub fn max(&self) -> F {
        *self.values.last().expect("non-empty")
    }

    pub fn mean(&self) -> F {
        self.values.iter().fold(F::zero(), |acc, &v| acc + v) / F::of_usize(self.n())
    }
}

/// GPD cumulative distribution function at `x`.
pub fn gpd_cdf<F: Real>(x: F, p: &GpdParams<F>) -> Result<F> {
    p.require_heavy_tail()?;
    if x < p.mu() {
        return Err(Error::domain(format!(
            "x = {x} below the support start {}",
            p.mu()
        )));
    }
    let t = F::one() + (p.xi() / p.sigma()) * (x - p.mu());
    // Below the smallest positive normal magnitude the power would produce
    // garbage rather than a probability.
    if t < F::min_positive_value() {
        return Err(Error::domain("CDF argument collapsed to a non-positive base"));
    }
    Ok(F::one() - t.powf(-p.xi().recip()))
}

/// GPD quantile function; `prob = 1` is rejected (the support is unbounded).
pub fn gpd_quantile<F: Real>(prob: F, p: &GpdParams<F>) -> Result<F> {
    p.require_heavy_tail()?;
    if !(prob >= F::zero() && prob < F::one()) {
        return Err(Error::domain(format!(
            "quantile probability must lie in [0, 1), got {prob}"
        )));
    }
    Ok(p.mu() + (p.sigma() / p.xi()) * ((F::one() - prob).powf(-p.xi()) - F::one()))
}

/// Draws `n` values by inverse transform of consecutive uniforms.
pub fn sample_gpd<F, R>(n: usize, p: &GpdParams<F>, rng: &mut R) -> Result<Sample<F>>
where
    F: Real,
    R: Rng + ?Sized,
    StandardUniform: Distribution<F>,
{
    p.require_heavy_tail()?;
    if n == 0 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    let values = (0..n)
        .map(|_| {
            let u: F = rng.sample(StandardUniform);
            gpd_quantile(u, p)
        })
        .collect::<Result<Vec<_>>>()?;
    Sample::new(values)
}

/// Subtracts the sample minimum from every value, turning a three-parameter
/// sample into a two-parameter one. Returns the shifted sample and the
/// subtracted value (the location estimate).
pub fn shift_to_two_param<F: Real>(s: &Sample<F>) -> Result<(Sample<F>, F)> {
    if s.n() < 2 {
        return Err(Error::domain("shift requires n >= 2"));
    }
    let m = s.min();
    let shifted = s.values().iter().map(|&v| v - m).collect();
    Ok((Sample::new(shifted)?, m))
}
