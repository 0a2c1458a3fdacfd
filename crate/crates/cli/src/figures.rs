//! Plot-ready CSV series.
//!
//! | figure          | columns                                              |
//! |-----------------|------------------------------------------------------|
//! | `frontier`      | `rho, id_estimated, id_closed_form`                  |
//! | `convergence`   | `T, method, relative_error_pct`                      |
//! | `spi-posterior` | `r, pdf`                                             |
//! | `id-sf12`       | `asset, replication_correlation, id_periods_per_bit` |
//!
//! `frontier` uses correlated Gaussian pairs at `T = 5000` on the grid
//! `ρ = 0.1, 0.2, …, 0.9`. `convergence` uses a Student-t AR(1) with
//! `φ = 0.5`, `ν = 4` at `T ∈ {250, 500, 1000, 2000, 4000, 8000}` against the
//! exact innovation entropy. `spi-posterior` evaluates the predictive density
//! on 401 equally spaced points over `μ_n ± 8 σ_n`. `id-sf12` scores column `k`
//! against columns `0..k` for `k ≥ 1`, on `--input` or a generated factor
//! panel (`N = 50`, `r = 25`, `T = 2000`, `det C = 1e−10`, `φ = 0.5`).

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use usefulness_core::diversification::{correlation_frontier, incremental_diversification};
use usefulness_core::entropy::{entropy_rate, student_t_entropy, EstimatorSettings, Method};
use usefulness_core::panel::{load_returns_csv, IngestOptions, ReturnsPanel};
use usefulness_core::passive::{posterior_update, NormalGammaPrior};
use usefulness_core::rng::derive_seed;
use usefulness_core::synth::{correlated_gaussian_pair, factor_ar1_panel, student_t_ar1};
use usefulness_core::tails::best_replicating_portfolio;

use crate::args::FiguresArgs;
use crate::error::{CliError, Result};
use crate::output::with_writer;

pub const FIGURES: [&str; 4] = ["frontier", "convergence", "spi-posterior", "id-sf12"];

pub const FRONTIER_LEN: usize = 5000;
pub const CONVERGENCE_LENS: [usize; 6] = [250, 500, 1000, 2000, 4000, 8000];
pub const CONVERGENCE_PHI: f64 = 0.5;
pub const CONVERGENCE_NU: f64 = 4.0;
pub const SPI_GRID_POINTS: usize = 401;
pub const SPI_GRID_HALF_WIDTH: f64 = 8.0;

/// A CSV table held in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn write(&self, w: &mut dyn Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn num(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else {
        format!("{x}")
    }
}

pub fn frontier(seed: u64) -> Result<Table> {
    let settings = EstimatorSettings::default();
    let rows = (1..=9)
        .into_par_iter()
        .map(|i| {
            let rho = i as f64 / 10.0;
            let pair = correlated_gaussian_pair(rho, FRONTIER_LEN, derive_seed(seed, &format!("frontier/{i}")))?;
            let id = incremental_diversification(&pair.select(&[0])?, &pair.select(&[1])?, &settings)?;
            Ok(vec![num(rho), num(id.timescale), num(correlation_frontier(rho)?)])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { header: vec!["rho", "id_estimated", "id_closed_form"], rows })
}

pub fn convergence(seed: u64) -> Result<Table> {
    let truth = student_t_entropy(CONVERGENCE_NU, ((CONVERGENCE_NU - 2.0) / CONVERGENCE_NU).sqrt())?;
    let jobs: Vec<(usize, Method)> =
        CONVERGENCE_LENS.iter().flat_map(|&t| Method::ALL.into_iter().map(move |m| (t, m))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(len, method)| {
            let s = derive_seed(seed, &format!("convergence/{len}"));
            let panel = student_t_ar1(CONVERGENCE_PHI, CONVERGENCE_NU, len, s)?;
            let settings =
                EstimatorSettings { seed: derive_seed(s, method.as_str()), ..EstimatorSettings::with_method(method) };
            let est = entropy_rate(&panel, &settings)?;
            Ok(vec![len.to_string(), method.to_string(), num(100.0 * (est.bits_per_period - truth) / truth.abs())])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { header: vec!["T", "method", "relative_error_pct"], rows })
}

pub fn spi_posterior(prior: &NormalGammaPrior, reference: &[f64]) -> Result<Table> {
    if reference.is_empty() {
        return Err(CliError::Config("spi-posterior needs --reference-bsrs".into()));
    }
    let post = posterior_update(prior, reference)?;
    let (lo, hi) = (post.mu_n - SPI_GRID_HALF_WIDTH * post.scale(), post.mu_n + SPI_GRID_HALF_WIDTH * post.scale());
    let step = (hi - lo) / (SPI_GRID_POINTS - 1) as f64;
    let rows = (0..SPI_GRID_POINTS)
        .map(|i| {
            let r = lo + step * i as f64;
            vec![num(r), num(post.pdf(r))]
        })
        .collect();
    Ok(Table { header: vec!["r", "pdf"], rows })
}

pub fn id_sf12(panel: &ReturnsPanel) -> Result<Table> {
    let settings = EstimatorSettings::default();
    let rows = (1..panel.dim())
        .into_par_iter()
        .map(|j| {
            let pool: Vec<usize> = (0..j).collect();
            let (y, x) = (panel.select(&[j])?, panel.select(&pool)?);
            let rep = best_replicating_portfolio(&y, &x, 0.0)?;
            let id = incremental_diversification(&y, &x, &settings)?;
            Ok(vec![panel.asset_ids()[j].clone(), num(rep.replication_correlation), num(id.timescale)])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { header: vec!["asset", "replication_correlation", "id_periods_per_bit"], rows })
}

pub fn figure(name: &str, args: &FiguresArgs) -> Result<Table> {
    match name {
        "frontier" => frontier(args.seed),
        "convergence" => convergence(args.seed),
        "spi-posterior" => spi_posterior(&args.prior.apply(NormalGammaPrior::default()), &args.reference_bsrs),
        "id-sf12" => {
            let panel = match &args.input {
                Some(p) => load_returns_csv(p, &IngestOptions::default())?,
                None => factor_ar1_panel(50, 25, 2000, 1e-10, 0.5, derive_seed(args.seed, "id-sf12"))?.panel,
            };
            id_sf12(&panel)
        }
        other => Err(CliError::UnknownFigure(other.into())),
    }
}

pub fn run_figures(args: &FiguresArgs, stdout: &mut dyn Write) -> Result<()> {
    if let Some(bad) = args.names.iter().find(|n| !FIGURES.contains(&n.as_str())) {
        return Err(CliError::UnknownFigure(bad.clone()));
    }
    if args.out_dir.is_none() && args.names.len() > 1 {
        return Err(CliError::Config("--out-dir is required for more than one figure".into()));
    }
    for name in &args.names {
        let table = figure(name, args)?;
        let path = args.out_dir.as_ref().map(|d| d.join(format!("{name}.csv")));
        with_writer(path.as_deref().map(Path::new), stdout, |w| table.write(w))?;
    }
    Ok(())
}
