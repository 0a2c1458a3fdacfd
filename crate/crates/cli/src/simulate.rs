use std::io::Write;

use chrono::{Datelike, Days, NaiveDate, NaiveDateTime, Weekday};
use usefulness_core::panel::{write_returns_csv, ReturnsPanel};
use usefulness_core::synth::GeneratorSpec;

use crate::args::{FactorArgs, Generator, SimulateArgs};
use crate::error::Result;
use crate::output::with_writer;

/// Concentration grid `0.001 + 0.005 (i − 1)`, `i = 1..=managers`.
pub fn alpha_grid(managers: usize) -> Vec<f64> {
    (0..managers).map(|i| 0.001 + 0.005 * i as f64).collect()
}

impl Generator {
    pub fn spec(&self) -> GeneratorSpec {
        let f = |a: &FactorArgs| (a.assets, a.factors, a.len, a.det_target, a.phi, a.seed);
        match self {
            &Generator::StudentTAr1 { phi, nu, len, seed } => GeneratorSpec::StudentTAr1 { phi, nu, len, seed },
            &Generator::GaussianAr1 { phi, dim, len, seed } => GeneratorSpec::GaussianAr1 { phi, dim, len, seed },
            &Generator::GaussianWhite { dim, len, sd, seed } => GeneratorSpec::GaussianWhite { dim, len, sd, seed },
            &Generator::CorrelatedPair { rho, len, seed } => GeneratorSpec::CorrelatedGaussianPair { rho, len, seed },
            Generator::FactorPanel(a) => {
                let (assets, factors, len, det_target, phi, seed) = f(a);
                GeneratorSpec::FactorAr1Panel { assets, factors, len, det_target, phi, seed }
            }
            Generator::DirichletManagers { factor, alphas, managers } => {
                let (assets, factors, len, det_target, phi, seed) = f(factor);
                let alphas = if alphas.is_empty() { alpha_grid(*managers) } else { alphas.clone() };
                GeneratorSpec::DirichletManagers { assets, factors, len, det_target, phi, alphas, seed }
            }
            Generator::MomentumOverlay { factor, window } => {
                let (assets, factors, len, det_target, phi, seed) = f(factor);
                GeneratorSpec::MomentumOverlay { assets, factors, len, det_target, phi, window: *window, seed }
            }
        }
    }
}

/// First date of the calendar attached to simulated panels.
pub const CALENDAR_START: (i32, u32, u32) = (2000, 1, 3);

/// `len` consecutive weekdays starting at [`CALENDAR_START`].
pub fn weekday_calendar(len: usize) -> Vec<NaiveDateTime> {
    let (y, m, d) = CALENDAR_START;
    let mut day = NaiveDate::from_ymd_opt(y, m, d).expect("valid start date");
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        if !matches!(day.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(day.and_time(Default::default()));
        }
        day = day + Days::new(1);
    }
    out
}

/// The generated panel, dated unless `undated` is set.
pub fn simulated_panel(args: &SimulateArgs) -> Result<ReturnsPanel> {
    let panel = args.generator.spec().generate()?;
    if args.undated {
        return Ok(panel);
    }
    let dates = weekday_calendar(panel.len());
    Ok(panel.with_timestamps(dates)?)
}

pub fn simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let panel = simulated_panel(args)?;
    with_writer(args.output.as_deref(), stdout, |w| Ok(write_returns_csv(&panel, w)?))
}
