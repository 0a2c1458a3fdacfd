//! Bidirectional Sharpe ratios, their Normal-Gamma posterior over a
//! reference pool, and suitability scores and tests for candidates.

use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDateTime};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::panel::{Period, ReturnsPanel};

/// Minimum number of monthly observations for a Sharpe ratio.
pub const MIN_MONTHS: usize = 12;
/// Months with fewer daily observations are dropped when aggregating.
pub const MIN_DAYS_PER_MONTH: usize = 15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BsrEstimate {
    pub monthly_bsr: f64,
    pub annualized_bsr: f64,
    pub mean: f64,
    pub sd: f64,
    pub r_c: f64,
    pub r_f: f64,
    pub months: usize,
}

/// `(|mean| − r_c − r_f) / sd` on monthly returns, annualized by `√12`.
/// The standard deviation uses divisor `T − 1`.
pub fn bidirectional_sharpe(monthly: &[f64], r_c: f64, r_f: f64) -> Result<BsrEstimate> {
    let len = monthly.len();
    if len < MIN_MONTHS {
        return Err(Error::InsufficientHistory { got: len, need: MIN_MONTHS });
    }
    let mean = monthly.iter().sum::<f64>() / len as f64;
    let sd = (monthly.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (len - 1) as f64).sqrt();
    if !(sd > 0.0) || monthly.iter().all(|&r| r == monthly[0]) {
        return Err(Error::DegenerateSeries("monthly returns are constant".into()));
    }
    let monthly_bsr = (mean.abs() - r_c - r_f) / sd;
    Ok(BsrEstimate { monthly_bsr, annualized_bsr: monthly_bsr * 12f64.sqrt(), mean, sd, r_c, r_f, months: len })
}

/// Compounds returns within calendar months, dropping months with fewer
/// than [`MIN_DAYS_PER_MONTH`] observations.
pub fn compound_by_month(values: &[f64], timestamps: &[NaiveDateTime]) -> Vec<f64> {
    let mut months: BTreeMap<(i32, u32), (f64, usize)> = BTreeMap::new();
    for (v, ts) in values.iter().zip(timestamps) {
        let e = months.entry((ts.year(), ts.month())).or_insert((1.0, 0));
        e.0 *= 1.0 + v;
        e.1 += 1;
    }
    months.into_values().filter(|&(_, n)| n >= MIN_DAYS_PER_MONTH).map(|(g, _)| g - 1.0).collect()
}

/// Monthly returns of column `j`: as is for monthly panels, otherwise
/// compounded by calendar month from the timestamps.
pub fn monthly_returns(panel: &ReturnsPanel, j: usize) -> Result<Vec<f64>> {
    if panel.period() == Period::Monthly {
        return Ok(panel.column(j).to_vec());
    }
    let ts = panel
        .timestamps()
        .ok_or_else(|| Error::InvalidPanel("monthly aggregation needs timestamps on a non-monthly panel".into()))?;
    Ok(compound_by_month(panel.column(j), ts))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalGammaPrior {
    pub mu0: f64,
    pub nu0: f64,
    pub alpha0: f64,
    pub beta0: f64,
}

impl Default for NormalGammaPrior {
    fn default() -> Self {
        Self { mu0: 0.0, nu0: 1e-3, alpha0: 1e-3, beta0: 1e-3 }
    }
}

impl NormalGammaPrior {
    pub fn validate(&self) -> Result<()> {
        let ok = self.mu0.is_finite() && [self.nu0, self.alpha0, self.beta0].iter().all(|v| *v > 0.0 && v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParam(format!("invalid Normal-Gamma prior {self:?}")))
        }
    }
}

/// Posterior parameters and the Student-t predictive of a new Sharpe ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorPredictive {
    pub mu_n: f64,
    pub nu_n: f64,
    pub alpha_n: f64,
    pub beta_n: f64,
    /// Squared scale `β_n (ν_n + 1) / (α_n ν_n)`.
    pub s_n: f64,
    pub dof: f64,
    pub n_obs: usize,
}

impl PosteriorPredictive {
    pub fn scale(&self) -> f64 {
        self.s_n.sqrt()
    }

    fn dist(&self) -> StudentsT {
        StudentsT::new(self.mu_n, self.scale(), self.dof).expect("validated posterior")
    }

    pub fn pdf(&self, r: f64) -> f64 {
        self.dist().pdf(r)
    }

    pub fn ln_pdf(&self, r: f64) -> f64 {
        self.dist().ln_pdf(r)
    }

    pub fn cdf(&self, r: f64) -> f64 {
        self.dist().cdf(r)
    }

    pub fn quantile(&self, prob: f64) -> f64 {
        self.dist().inverse_cdf(prob)
    }
}

pub fn posterior_update(prior: &NormalGammaPrior, r_hats: &[f64]) -> Result<PosteriorPredictive> {
    prior.validate()?;
    let n = r_hats.len() as f64;
    let (mu_n, beta_n) = if r_hats.is_empty() {
        (prior.mu0, prior.beta0)
    } else {
        let rbar = r_hats.iter().sum::<f64>() / n;
        let ss: f64 = r_hats.iter().map(|r| (r - rbar).powi(2)).sum();
        let shift = n * prior.nu0 / (prior.nu0 + n) * (rbar - prior.mu0).powi(2) / 2.0;
        ((prior.nu0 * prior.mu0 + n * rbar) / (prior.nu0 + n), prior.beta0 + 0.5 * ss + shift)
    };
    let nu_n = prior.nu0 + n;
    let alpha_n = prior.alpha0 + n / 2.0;
    Ok(PosteriorPredictive {
        mu_n,
        nu_n,
        alpha_n,
        beta_n,
        s_n: beta_n * (nu_n + 1.0) / (alpha_n * nu_n),
        dof: 2.0 * alpha_n,
        n_obs: r_hats.len(),
    })
}

pub fn predictive_pdf(post: &PosteriorPredictive, r: f64) -> f64 {
    post.pdf(r)
}

pub fn predictive_cdf(post: &PosteriorPredictive, r: f64) -> f64 {
    post.cdf(r)
}

/// Log predictive density at the candidate's Sharpe ratio.
pub fn spi(post: &PosteriorPredictive, bsr: f64) -> f64 {
    post.ln_pdf(bsr)
}

/// Log density of the best of `m` predictive draws, at the best observed
/// Sharpe ratio: `ln p(b*) + ln m + (m − 1) ln F(b*)`.
pub fn spi_multi(post: &PosteriorPredictive, bsrs: &[f64]) -> Result<f64> {
    let best = max_of(bsrs)?;
    let m = bsrs.len() as f64;
    Ok(post.ln_pdf(best) + m.ln() + (m - 1.0) * post.cdf(best).ln())
}

fn max_of(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptyList);
    }
    Ok(xs.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    Single,
    Multi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestDecision {
    pub tail_probability: f64,
    pub threshold: f64,
    pub m: f64,
    pub reject: bool,
    pub kind: TestKind,
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!("p-value {p} must lie in (0, 1)")))
    }
}

/// `p^{1/m}`.
pub fn multi_threshold(p: f64, m: f64) -> f64 {
    p.powf(1.0 / m)
}

/// Rejects when `P(r ≤ bsr | data) < p`.
pub fn test_single(post: &PosteriorPredictive, bsr: f64, p: f64) -> Result<TestDecision> {
    check_p(p)?;
    let tail = post.cdf(bsr);
    Ok(TestDecision { tail_probability: tail, threshold: p, m: 1.0, reject: tail < p, kind: TestKind::Single })
}

/// Tests the best of `m` trials at threshold `p^{1/m}`. `m_eff` replaces the
/// number of supplied trials when given.
pub fn test_multi(post: &PosteriorPredictive, bsrs: &[f64], p: f64, m_eff: Option<f64>) -> Result<TestDecision> {
    check_p(p)?;
    let best = max_of(bsrs)?;
    let m = m_eff.unwrap_or(bsrs.len() as f64);
    if !(m >= 1.0 && m.is_finite()) {
        return Err(Error::InvalidParam(format!("trial count {m} must be at least 1")));
    }
    let tail = post.cdf(best);
    let threshold = multi_threshold(p, m);
    Ok(TestDecision { tail_probability: tail, threshold, m, reject: tail < threshold, kind: TestKind::Multi })
}
