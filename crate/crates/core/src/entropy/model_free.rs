use rand::Rng as _;
use rayon::prelude::*;

use super::discrete::{code_entropy, discretize};
use super::lz76::lz76_count;
use super::{Diagnostics, EntropyRateEstimate, Method, ModelFreeDiagnostics, Warning};
use crate::error::{Error, Result};
use crate::panel::ReturnsPanel;
use crate::rng::stream;

/// Model-free entropy rate at precision `m` with `k` resampled sequences.
///
/// Resample `i` draws from stream `i` of `seed`, so the estimate is
/// identical whatever the thread count.
pub fn model_free_entropy_rate(panel: &ReturnsPanel, m: f64, k: usize, seed: u64) -> Result<EntropyRateEstimate> {
    if k == 0 {
        return Err(Error::InvalidParam("at least one resample is required".into()));
    }
    if !m.is_finite() {
        return Err(Error::InvalidParam(format!("precision {m} is not finite")));
    }
    let len = panel.len();
    let n = panel.dim() as f64;
    let codes = discretize(panel, m).codes();
    let complexity = lz76_count(&codes)?;

    let resampled_complexities = (0..k as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i);
            let draw: Vec<u32> = (0..len).map(|_| codes[rng.random_range(0..len)]).collect();
            lz76_count(&draw)
        })
        .collect::<Result<Vec<_>>>()?;
    let mean_resampled = resampled_complexities.iter().sum::<usize>() as f64 / k as f64;

    let plugin = code_entropy(&codes);
    let bits = plugin * complexity as f64 / mean_resampled - m * n;
    let direct = complexity as f64 * (len as f64).log2() / len as f64 - m * n;

    let mut warnings = Vec::new();
    if len < 100 {
        warnings.push(Warning::ShortSample { len });
    }
    if complexity == len {
        warnings.push(Warning::SaturatedComplexity);
    }
    let distinct_symbols = codes.iter().max().map_or(0, |&c| c as usize + 1);

    Ok(EntropyRateEstimate {
        bits_per_period: bits,
        method: Method::ModelFree,
        scale_adjustment_bits: 0.0,
        diagnostics: Diagnostics::ModelFree(ModelFreeDiagnostics {
            precision: m,
            resamples: k,
            seed,
            complexity,
            resampled_complexities,
            mean_resampled_complexity: mean_resampled,
            plugin_entropy_bits: plugin,
            distinct_symbols,
            direct_lz_rate_bits: direct,
            warnings,
        }),
    })
}
