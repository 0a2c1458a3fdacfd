//! The `spi-test` subcommand.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use usefulness_core::panel::{load_returns_csv, IngestOptions, Period};
use usefulness_core::passive::{
    bidirectional_sharpe, monthly_returns, posterior_update, spi, spi_multi, test_multi, test_single, NormalGammaPrior,
    PosteriorPredictive, TestDecision,
};

use crate::args::{PriorArgs, SpiTestArgs};
use crate::error::{CliError, Result};
use crate::output::with_writer;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateScore {
    pub name: String,
    pub bsr: f64,
    pub spi: f64,
    pub test_single: TestDecision,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpiReport {
    pub prior: NormalGammaPrior,
    pub reference_bsrs: Vec<f64>,
    pub posterior: PosteriorPredictive,
    pub candidates: Vec<CandidateScore>,
    /// Suitability of the best candidate under the multi-trial density.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spi_multi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_multi: Option<TestDecision>,
}

impl PriorArgs {
    pub fn apply(&self, mut prior: NormalGammaPrior) -> NormalGammaPrior {
        prior.mu0 = self.mu0.unwrap_or(prior.mu0);
        prior.nu0 = self.nu0.unwrap_or(prior.nu0);
        prior.alpha0 = self.alpha0.unwrap_or(prior.alpha0);
        prior.beta0 = self.beta0.unwrap_or(prior.beta0);
        prior
    }
}

/// Monthly Sharpe ratio of every column of a panel file, by column name.
pub fn panel_bsrs(path: &Path, period: Period, r_c: f64, r_f: f64) -> Result<Vec<(String, f64)>> {
    let panel = load_returns_csv(path, &IngestOptions { drop_invalid_rows: false, period })?;
    (0..panel.dim())
        .map(|j| {
            let monthly = monthly_returns(&panel, j)?;
            Ok((panel.asset_ids()[j].clone(), bidirectional_sharpe(&monthly, r_c, r_f)?.monthly_bsr))
        })
        .collect()
}

pub fn spi_test(args: &SpiTestArgs) -> Result<SpiReport> {
    let mut reference = args.reference_bsrs.clone();
    if let Some(path) = &args.reference {
        reference.extend(panel_bsrs(path, args.period, args.cost_rate, args.risk_free)?.into_iter().map(|(_, b)| b));
    }
    let mut candidates: Vec<(String, f64)> =
        args.bsr.iter().enumerate().map(|(i, &b)| (format!("bsr{}", i + 1), b)).collect();
    if let Some(path) = &args.candidates {
        candidates.extend(panel_bsrs(path, args.period, args.cost_rate, args.risk_free)?);
    }
    if reference.is_empty() {
        return Err(CliError::Config("no reference Sharpe ratios given".into()));
    }
    if candidates.is_empty() {
        return Err(CliError::Config("no candidate Sharpe ratios given".into()));
    }
    let prior = args.prior.apply(NormalGammaPrior::default());
    prior.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let post = posterior_update(&prior, &reference)?;
    let scores = candidates
        .iter()
        .map(|(name, b)| {
            Ok(CandidateScore {
                name: name.clone(),
                bsr: *b,
                spi: spi(&post, *b),
                test_single: test_single(&post, *b, args.p_value)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let bsrs: Vec<f64> = candidates.iter().map(|(_, b)| *b).collect();
    let multi = bsrs.len() > 1 || args.m_eff.is_some();
    let (spi_m, test_m) = if multi {
        (Some(spi_multi(&post, &bsrs)?), Some(test_multi(&post, &bsrs, args.p_value, args.m_eff)?))
    } else {
        (None, None)
    };
    Ok(SpiReport {
        prior,
        reference_bsrs: reference,
        posterior: post,
        candidates: scores,
        spi_multi: spi_m,
        test_multi: test_m,
    })
}

pub fn run_spi_test(args: &SpiTestArgs, stdout: &mut dyn Write) -> Result<()> {
    let report = spi_test(args)?;
    let text = serde_json::to_string_pretty(&report)? + "\n";
    with_writer(args.output.as_deref(), stdout, |w| Ok(w.write_all(text.as_bytes())?))
}
