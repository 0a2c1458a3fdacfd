//! The `analyze` pipeline: each candidate column is scored against the
//! remaining columns of the panel.

use rayon::prelude::*;
use usefulness_core::diversification::{incremental_diversification, order_q_id};
use usefulness_core::panel::{load_returns_csv, IngestOptions, ReturnsPanel};
use usefulness_core::passive::{
    bidirectional_sharpe, monthly_returns, posterior_update, spi, test_multi, test_single, BsrEstimate,
};
use usefulness_core::predictability::{auto_predictability, exogenous_predictability, PredictabilityResult};
use usefulness_core::rng::derive_seed;
use usefulness_core::tails::tail_impact;
use usefulness_core::Error;

use crate::config::{Analysis, RunConfig};
use crate::error::{CliError, Result};
use crate::report::{
    AssetReport, DiversificationBlock, OrderQBlock, PanelSummary, PassiveBlock, PredictabilityBlock, TailBlock,
    UsefulnessReport, SCHEMA_VERSION,
};

pub fn load_panel(cfg: &RunConfig) -> Result<ReturnsPanel> {
    let path = cfg.input.as_ref().ok_or_else(|| CliError::Config("no input panel given".into()))?;
    let opts = IngestOptions { drop_invalid_rows: cfg.drop_invalid_rows, period: cfg.period };
    Ok(load_returns_csv(path, &opts)?)
}

fn candidate_indices(cfg: &RunConfig, panel: &ReturnsPanel) -> Result<Vec<usize>> {
    if cfg.candidates.is_empty() {
        return Ok((0..panel.dim()).collect());
    }
    cfg.candidates
        .iter()
        .map(|id| panel.index_of(id).ok_or_else(|| CliError::Config(format!("candidate `{id}` is not a panel column"))))
        .collect()
}

/// Seed for one analysis of one asset.
pub fn sub_seed(seed: u64, analysis: &str, asset: &str) -> u64 {
    derive_seed(seed, &format!("{analysis}/{asset}"))
}

fn pr_block(r: PredictabilityResult) -> PredictabilityBlock {
    PredictabilityBlock {
        pr_bits: r.pr_bits,
        pr_log_ratio_bits: r.pr_log_ratio_bits,
        method: r.method,
        estimator: r.estimator,
        components: r.components,
    }
}

/// Monthly Sharpe ratios of every column, or the first failure.
fn all_bsrs(cfg: &RunConfig, panel: &ReturnsPanel) -> Result<Vec<BsrEstimate>> {
    let p = &cfg.passive;
    (0..panel.dim())
        .map(|j| {
            let monthly = monthly_returns(panel, j)?;
            Ok(bidirectional_sharpe(&monthly, p.cost_rate, p.risk_free)?)
        })
        .collect()
}

fn analyze_asset(cfg: &RunConfig, panel: &ReturnsPanel, j: usize, bsrs: Option<&[BsrEstimate]>) -> Result<AssetReport> {
    let id = panel.asset_ids()[j].clone();
    let y = panel.select(&[j])?;
    let x = panel.without(j)?;
    let settings = |a: &str| cfg.estimator.settings(sub_seed(cfg.seed, a, &id));
    let mut rep = AssetReport {
        asset: id.clone(),
        pool: x.asset_ids().to_vec(),
        id: None,
        id_q: None,
        pr_auto: None,
        pr_exo: None,
        it: None,
        passive: None,
    };

    if cfg.wants(Analysis::Id) {
        let r = incremental_diversification(&y, &x, &settings("id"))?;
        rep.id = Some(DiversificationBlock {
            mi_rate_bits: r.mi_rate,
            mi_rate_clipped_bits: r.mi_rate_clipped,
            id_periods_per_bit: r.timescale,
            low_signal: r.low_signal,
            method: r.method,
            estimator: r.estimator,
            components: r.components,
        });
    }
    if cfg.wants(Analysis::IdQ) {
        let q = cfg.order_q.q.min(x.dim());
        let seed = sub_seed(cfg.seed, "id_q/partitions", &id);
        let r = order_q_id(&y, &x, q, cfg.order_q.partitions, &settings("id_q"), seed)?;
        rep.id_q = Some(OrderQBlock {
            q: r.q,
            sampled_partitions: r.sampled_partitions,
            partition_seed: r.seed,
            mi_rate_max_bits: r.mi_rate_max,
            id_q_periods_per_bit: r.id_q,
            winning_assets: r.winning_assets,
            subsets: r.subsets,
        });
    }
    if cfg.wants(Analysis::Pr) {
        rep.pr_auto = Some(pr_block(auto_predictability(&y, &settings("pr_auto"))?));
        rep.pr_exo = Some(pr_block(exogenous_predictability(&y, &x, &settings("pr_exo"))?));
    }
    if cfg.wants(Analysis::It) {
        let r = tail_impact(&y, &x, cfg.tails.order, cfg.tails.risk_free)?;
        rep.it = Some(TailBlock {
            it: r.it,
            tr_reference: r.tr_reference,
            tr_joint: r.tr_joint,
            p: r.order,
            perfect_replication: r.perfect_replication,
            replication_correlation: r.replication.replication_correlation,
            weights: r.replication.weights,
            cash_weight: r.replication.cash_weight,
            dropped: r.replication.dropped,
        });
    }
    if let Some(bsrs) = bsrs {
        let p = &cfg.passive;
        let reference: Vec<f64> =
            bsrs.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, b)| b.monthly_bsr).collect();
        let post = posterior_update(&p.prior, &reference)?;
        let own = bsrs[j].clone();
        let single = test_single(&post, own.monthly_bsr, p.p_value)?;
        let multi = p.m_eff.map(|m| test_multi(&post, &[own.monthly_bsr], p.p_value, Some(m))).transpose()?;
        rep.passive = Some(PassiveBlock {
            spi: spi(&post, own.monthly_bsr),
            bsr: own,
            reference_bsrs: reference,
            posterior: post,
            test_single: single,
            test_multi: multi,
        });
    }
    Ok(rep)
}

/// Runs the selected analyses for every candidate. Candidates are
/// processed in parallel; the report keeps the panel's column order.
pub fn analyze(cfg: &RunConfig, panel: &ReturnsPanel) -> Result<UsefulnessReport> {
    cfg.validate()?;
    if panel.dim() < 2 {
        return Err(Error::InvalidPanel("analysis needs a candidate and at least one pool column".into()).into());
    }
    let candidates = candidate_indices(cfg, panel)?;
    let bsrs = if cfg.wants(Analysis::Passive) { Some(all_bsrs(cfg, panel)?) } else { None };
    let assets =
        candidates.par_iter().map(|&j| analyze_asset(cfg, panel, j, bsrs.as_deref())).collect::<Result<Vec<_>>>()?;
    Ok(UsefulnessReport {
        schema_version: SCHEMA_VERSION.into(),
        generator: format!("usefulness {}", env!("CARGO_PKG_VERSION")),
        config: cfg.clone(),
        panel: PanelSummary { rows: panel.len(), asset_ids: panel.asset_ids().to_vec(), period: panel.period() },
        assets,
    })
}
