//! Mutual information rate between a candidate and a reference pool, its
//! reciprocal timescale, the order-`q` variant and correlation mappings.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{EntropyRateEstimate, EstimatorSettings, Method, ResolvedEstimator};
use crate::error::{Error, Result};
use crate::panel::{correlation, ReturnsPanel};
use crate::rng::stream;

/// Serializes `+∞` as the string `"inf"` and finite values as numbers.
pub mod inf_as_string {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = f64;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v {
                    "inf" => Ok(f64::INFINITY),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// `1 / max(I, 0)` with `1/0⁺ = +∞` and `1/∞ = 0`.
pub fn timescale_from_mi(mi: f64) -> f64 {
    if mi.is_infinite() && mi > 0.0 {
        0.0
    } else if mi > 0.0 {
        1.0 / mi
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiComponents {
    pub h_y: EntropyRateEstimate,
    pub h_x: EntropyRateEstimate,
    pub h_joint: EntropyRateEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdResult {
    /// Raw `h_y + h_x − h_joint`; may be negative in finite samples.
    pub mi_rate: f64,
    pub mi_rate_clipped: f64,
    /// Periods per bit.
    #[serde(with = "inf_as_string")]
    pub timescale: f64,
    /// Set when the raw rate is not positive and the timescale is `+∞`.
    pub low_signal: bool,
    pub method: Method,
    pub estimator: ResolvedEstimator,
    pub components: MiComponents,
}

fn aligned(y: &ReturnsPanel, x: &ReturnsPanel) -> Result<()> {
    if y.len() != x.len() {
        return Err(Error::RowMisalignment { left: y.len(), right: x.len() });
    }
    Ok(())
}

/// `h(y) + h(x) − h(y, x)` with hyperparameters resolved once on the joint
/// panel.
pub fn mutual_information(y: &ReturnsPanel, x: &ReturnsPanel, settings: &EstimatorSettings) -> Result<IdResult> {
    aligned(y, x)?;
    let joint = y.hstack(x)?;
    let est = settings.resolve(&joint)?;
    let (h_joint, (h_y, h_x)) =
        rayon::join(|| est.entropy_rate(&joint), || rayon::join(|| est.entropy_rate(y), || est.entropy_rate(x)));
    let (h_y, h_x, h_joint) = (h_y?, h_x?, h_joint?);
    let mi = h_y.bits_per_period + h_x.bits_per_period - h_joint.bits_per_period;
    Ok(IdResult {
        mi_rate: mi,
        mi_rate_clipped: mi.max(0.0),
        timescale: timescale_from_mi(mi),
        low_signal: !(mi > 0.0),
        method: est.method(),
        estimator: est,
        components: MiComponents { h_y, h_x, h_joint },
    })
}

pub fn mutual_information_rate(y: &ReturnsPanel, x: &ReturnsPanel, settings: &EstimatorSettings) -> Result<f64> {
    Ok(mutual_information(y, x, settings)?.mi_rate)
}

/// Timescale of a single candidate series against the pool `x`.
pub fn incremental_diversification(
    y: &ReturnsPanel,
    x: &ReturnsPanel,
    settings: &EstimatorSettings,
) -> Result<IdResult> {
    if y.dim() != 1 {
        return Err(Error::InvalidPanel(format!("candidate must be a single series, got {}", y.dim())));
    }
    mutual_information(y, x, settings)
}

/// Timescale of a group of new assets `y_pool` collectively against `x`.
pub fn pool_incremental_diversification(
    y_pool: &ReturnsPanel,
    x: &ReturnsPanel,
    settings: &EstimatorSettings,
) -> Result<IdResult> {
    mutual_information(y_pool, x, settings)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetMi {
    pub partition: usize,
    pub subset: usize,
    pub asset_ids: Vec<String>,
    pub mi_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderQResult {
    pub q: usize,
    pub sampled_partitions: usize,
    pub subsets: Vec<SubsetMi>,
    pub mi_rate_max: f64,
    #[serde(with = "inf_as_string")]
    pub id_q: f64,
    pub winning_assets: Vec<String>,
    pub seed: u64,
}

/// Random partitions of `0..n` into blocks of `q` (the last block may be
/// smaller). Partition `j` shuffles with stream `j` of `seed`; indices are
/// sorted within each block.
pub fn sample_partitions(n: usize, q: usize, k: usize, seed: u64) -> Result<Vec<Vec<Vec<usize>>>> {
    if q == 0 || q > n {
        return Err(Error::InvalidQ { q, n });
    }
    if k == 0 {
        return Err(Error::InvalidParam("at least one partition is required".into()));
    }
    Ok((0..k as u64)
        .map(|j| {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut stream(seed, j));
            perm.chunks(q)
                .map(|c| {
                    let mut s = c.to_vec();
                    s.sort_unstable();
                    s
                })
                .collect()
        })
        .collect())
}

/// `min` over sampled subsets `S` of `1 / I(y; x[S])`.
pub fn order_q_id(
    y: &ReturnsPanel,
    x: &ReturnsPanel,
    q: usize,
    k_partitions: usize,
    settings: &EstimatorSettings,
    seed: u64,
) -> Result<OrderQResult> {
    aligned(y, x)?;
    let partitions = sample_partitions(x.dim(), q, k_partitions, seed)?;
    let jobs: Vec<(usize, usize, &Vec<usize>)> =
        partitions.iter().enumerate().flat_map(|(j, p)| p.iter().enumerate().map(move |(i, s)| (j, i, s))).collect();
    let subsets = jobs
        .par_iter()
        .map(|&(j, i, idx)| {
            let sub = x.select(idx)?;
            let mi = mutual_information(y, &sub, settings)?.mi_rate;
            Ok(SubsetMi { partition: j, subset: i, asset_ids: sub.asset_ids().to_vec(), mi_rate: mi })
        })
        .collect::<Result<Vec<_>>>()?;

    // First maximum in (partition, subset) order.
    let best = subsets
        .iter()
        .fold(None::<&SubsetMi>, |acc, s| match acc {
            Some(b) if !(s.mi_rate > b.mi_rate) => Some(b),
            _ => Some(s),
        })
        .expect("at least one subset");
    Ok(OrderQResult {
        q,
        sampled_partitions: k_partitions,
        mi_rate_max: best.mi_rate,
        id_q: timescale_from_mi(best.mi_rate),
        winning_assets: best.asset_ids.clone(),
        subsets,
        seed,
    })
}

/// `−2 / log2(1 − ρ²)`, the timescale of a memoryless Gaussian pair.
pub fn correlation_frontier(rho: f64) -> Result<f64> {
    if !(rho.abs() < 1.0) {
        return Err(Error::InvalidCorrelation(rho));
    }
    if rho == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-2.0 * std::f64::consts::LN_2 / (-rho * rho).ln_1p())
}

/// Inverse of the frontier: `sign · √(1 − 2^{−2/ID})`, `0` at `ID = +∞`.
pub fn correlation_from_timescale(timescale: f64, sign: f64) -> f64 {
    if !(timescale < f64::INFINITY) || sign == 0.0 {
        return 0.0;
    }
    let mi = 1.0 / timescale;
    sign.signum() * (-(-2.0 * mi * std::f64::consts::LN_2).exp_m1()).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjustedCorrelation {
    pub acorr: f64,
    pub pearson: f64,
    pub id: IdResult,
}

pub fn info_adjusted_correlation(
    a: &ReturnsPanel,
    b: &ReturnsPanel,
    settings: &EstimatorSettings,
) -> Result<AdjustedCorrelation> {
    aligned(a, b)?;
    if a.dim() != 1 || b.dim() != 1 {
        return Err(Error::InvalidPanel("adjusted correlation needs two single series".into()));
    }
    let pearson = correlation(a.column(0), b.column(0))
        .ok_or_else(|| Error::DegenerateSeries("constant series has no correlation".into()))?;
    let id = mutual_information(a, b, settings)?;
    let sign = if pearson > 0.0 {
        1.0
    } else if pearson < 0.0 {
        -1.0
    } else {
        0.0
    };
    Ok(AdjustedCorrelation { acorr: correlation_from_timescale(id.timescale, sign), pearson, id })
}
