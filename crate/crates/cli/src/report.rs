//! Report schema. Blocks for analyses that were not requested are omitted;
//! field names never change with the selection.

use std::io::Write;

use serde::{Deserialize, Serialize};
use usefulness_core::diversification::{inf_as_string, MiComponents, SubsetMi};
use usefulness_core::entropy::{Method, ResolvedEstimator};
use usefulness_core::panel::Period;
use usefulness_core::passive::{BsrEstimate, PosteriorPredictive, TestDecision};
use usefulness_core::predictability::PredictabilityComponents;

use crate::config::RunConfig;
use crate::error::Result;

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UsefulnessReport {
    pub schema_version: String,
    pub generator: String,
    /// Effective configuration after merging defaults, file and flags.
    pub config: RunConfig,
    pub panel: PanelSummary,
    pub assets: Vec<AssetReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelSummary {
    pub rows: usize,
    pub asset_ids: Vec<String>,
    pub period: Period,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetReport {
    pub asset: String,
    /// The other columns of the panel.
    pub pool: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub id: Option<DiversificationBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub id_q: Option<OrderQBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pr_auto: Option<PredictabilityBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pr_exo: Option<PredictabilityBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub it: Option<TailBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub passive: Option<PassiveBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversificationBlock {
    pub mi_rate_bits: f64,
    pub mi_rate_clipped_bits: f64,
    #[serde(with = "inf_as_string")]
    pub id_periods_per_bit: f64,
    pub low_signal: bool,
    pub method: Method,
    pub estimator: ResolvedEstimator,
    pub components: MiComponents,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderQBlock {
    pub q: usize,
    pub sampled_partitions: usize,
    pub partition_seed: u64,
    pub mi_rate_max_bits: f64,
    #[serde(with = "inf_as_string")]
    pub id_q_periods_per_bit: f64,
    pub winning_assets: Vec<String>,
    pub subsets: Vec<SubsetMi>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictabilityBlock {
    pub pr_bits: f64,
    pub pr_log_ratio_bits: f64,
    pub method: Method,
    pub estimator: ResolvedEstimator,
    pub components: PredictabilityComponents,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailBlock {
    pub it: f64,
    pub tr_reference: f64,
    pub tr_joint: f64,
    pub p: u32,
    pub perfect_replication: bool,
    pub replication_correlation: f64,
    pub weights: Vec<f64>,
    pub cash_weight: f64,
    pub dropped: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassiveBlock {
    pub bsr: BsrEstimate,
    pub reference_bsrs: Vec<f64>,
    pub posterior: PosteriorPredictive,
    pub spi: f64,
    pub test_single: TestDecision,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub test_multi: Option<TestDecision>,
}

impl UsefulnessReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) if x == f64::INFINITY => "inf".into(),
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

/// One row per asset with the headline numbers; empty cells for analyses
/// that were not run.
pub fn write_summary_csv<W: Write>(report: &UsefulnessReport, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "asset",
        "mi_rate_bits",
        "id_periods_per_bit",
        "id_q_periods_per_bit",
        "pr_auto_bits",
        "pr_exo_bits",
        "it",
        "bsr_monthly",
        "bsr_annualized",
        "spi",
        "tail_probability",
        "reject_single",
        "reject_multi",
    ])?;
    for a in &report.assets {
        let p = a.passive.as_ref();
        w.write_record([
            a.asset.clone(),
            cell(a.id.as_ref().map(|b| b.mi_rate_bits)),
            cell(a.id.as_ref().map(|b| b.id_periods_per_bit)),
            cell(a.id_q.as_ref().map(|b| b.id_q_periods_per_bit)),
            cell(a.pr_auto.as_ref().map(|b| b.pr_bits)),
            cell(a.pr_exo.as_ref().map(|b| b.pr_bits)),
            cell(a.it.as_ref().map(|b| b.it)),
            cell(p.map(|b| b.bsr.monthly_bsr)),
            cell(p.map(|b| b.bsr.annualized_bsr)),
            cell(p.map(|b| b.spi)),
            cell(p.map(|b| b.test_single.tail_probability)),
            p.map(|b| b.test_single.reject.to_string()).unwrap_or_default(),
            p.and_then(|b| b.test_multi.as_ref()).map(|d| d.reject.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
