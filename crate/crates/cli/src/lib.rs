//! Command-line front end: configuration, orchestration of the analyses,
//! report emission and figure series.

pub mod analyze;
pub mod args;
pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod report;
pub mod simulate;
pub mod spi;

use std::io::Write;

pub use analyze::analyze;
pub use args::Cli;
pub use config::RunConfig;
pub use error::{CliError, Result};
pub use report::UsefulnessReport;

use crate::args::Command;
use crate::output::with_writer;

/// Loads the panel named by `cfg`, runs the analyses and writes the report
/// and the optional summary table.
pub fn run_analyze(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<UsefulnessReport> {
    let panel = analyze::load_panel(cfg)?;
    let report = analyze(cfg, &panel)?;
    let text = report.to_json()?;
    with_writer(cfg.output.as_deref(), stdout, |w| Ok(w.write_all(text.as_bytes())?))?;
    if let Some(path) = &cfg.summary_csv {
        with_writer(Some(path), stdout, |w| report::write_summary_csv(&report, w))?;
    }
    Ok(report)
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Config(e.to_string()))?;
    // Whatever goes to stdout is buffered inside the pool and written once.
    let mut buf: Vec<u8> = Vec::new();
    pool.install(|| match &cli.command {
        Command::Analyze(a) => run_analyze(&a.to_config()?, &mut buf).map(|_| ()),
        Command::Simulate(s) => simulate::simulate(s, &mut buf),
        Command::SpiTest(s) => spi::run_spi_test(s, &mut buf),
        Command::Figures(f) => figures::run_figures(f, &mut buf),
    })?;
    stdout.write_all(&buf)?;
    stdout.flush()?;
    Ok(())
}
