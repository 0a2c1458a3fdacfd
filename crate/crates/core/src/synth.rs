//! Seeded generators for the synthetic experiments.
//!
//! Each generator is a pure function of its parameters and seed. Separate
//! draws inside one generator (loadings vs. innovations, one manager vs.
//! another) come from separate ChaCha streams of the same seed.

use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::{Distribution, Gamma, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::panel::ReturnsPanel;
use crate::rng::{derive_seed, stream, Rng};

/// Discarded initial steps of every autoregression.
pub const BURN_IN: usize = 1000;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParam(msg()))
    }
}

fn normal(rng: &mut Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// `y_t = φ y_{t−1} + ξ_t`, `ξ_t` Student-t with `ν` degrees of freedom
/// rescaled to unit standard deviation.
pub fn student_t_ar1(phi: f64, nu: f64, len: usize, seed: u64) -> Result<ReturnsPanel> {
    check(phi.abs() < 1.0, || format!("|phi| = {} must be below 1", phi.abs()))?;
    check(nu > 2.0 && nu.is_finite(), || format!("nu = {nu} must exceed 2"))?;
    let dist = StudentT::new(nu).map_err(|e| Error::InvalidParam(e.to_string()))?;
    let scale = ((nu - 2.0) / nu).sqrt();
    let mut rng = stream(seed, 0);
    let mut y = 0.0;
    let mut out = Vec::with_capacity(len);
    for t in 0..BURN_IN + len {
        y = phi * y + scale * dist.sample(&mut rng);
        if t >= BURN_IN {
            out.push(y);
        }
    }
    ReturnsPanel::from_series("y", out)
}

/// `dim` independent Gaussian AR(1) series with unit innovation variance.
pub fn gaussian_ar1(phi: f64, dim: usize, len: usize, seed: u64) -> Result<ReturnsPanel> {
    check(phi.abs() < 1.0, || format!("|phi| = {} must be below 1", phi.abs()))?;
    check(dim >= 1, || "dim must be positive".into())?;
    let mut rng = stream(seed, 0);
    let mut state = vec![0.0; dim];
    let mut cols = vec![Vec::with_capacity(len); dim];
    for t in 0..BURN_IN + len {
        for (j, s) in state.iter_mut().enumerate() {
            *s = phi * *s + normal(&mut rng);
            if t >= BURN_IN {
                cols[j].push(*s);
            }
        }
    }
    ReturnsPanel::from_columns(ids("y", dim), cols)
}

/// `dim` independent Gaussian white noises with standard deviation `sd`.
pub fn gaussian_white(dim: usize, len: usize, sd: f64, seed: u64) -> Result<ReturnsPanel> {
    check(dim >= 1, || "dim must be positive".into())?;
    check(sd > 0.0 && sd.is_finite(), || format!("sd = {sd} must be positive"))?;
    let mut rng = stream(seed, 0);
    let mut cols = vec![Vec::with_capacity(len); dim];
    for _ in 0..len {
        for c in cols.iter_mut() {
            c.push(sd * normal(&mut rng));
        }
    }
    ReturnsPanel::from_columns(ids("z", dim), cols)
}

/// Memoryless unit-variance Gaussian pair with correlation `rho`.
pub fn correlated_gaussian_pair(rho: f64, len: usize, seed: u64) -> Result<ReturnsPanel> {
    check(rho.abs() < 1.0, || format!("|rho| = {} must be below 1", rho.abs()))?;
    let mut rng = stream(seed, 0);
    let c = (1.0 - rho * rho).sqrt();
    let (mut a, mut b) = (Vec::with_capacity(len), Vec::with_capacity(len));
    for _ in 0..len {
        let (u, v) = (normal(&mut rng), normal(&mut rng));
        a.push(u);
        b.push(rho * u + c * v);
    }
    ReturnsPanel::from_columns(vec!["a".into(), "b".into()], vec![a, b])
}

#[derive(Debug, Clone)]
pub struct FactorPanel {
    pub panel: ReturnsPanel,
    /// `N × r` with orthonormal columns.
    pub loadings: DMatrix<f64>,
    pub sigma_e: f64,
}

/// `σ_e` with `det(U Uᵀ + σ_e² I) = σ_e^{2(N−r)} (1 + σ_e²)^r = det_target`.
pub fn solve_sigma_e(assets: usize, factors: usize, det_target: f64) -> Result<f64> {
    check(factors >= 1 && factors <= assets, || format!("need 1 ≤ r ≤ N, got r = {factors}, N = {assets}"))?;
    check(det_target > 0.0 && det_target.is_finite(), || format!("det_target = {det_target} must be positive"))?;
    let target = det_target.ln();
    let (n, r) = (assets as f64, factors as f64);
    if factors == assets {
        if target < 0.0 {
            return Err(Error::NoRoot(format!("with r = N the determinant is at least 1, target {det_target}")));
        }
        return Ok((target / n).exp_m1().sqrt());
    }
    // Bisection on u = ln σ_e², where the log-determinant is increasing.
    let logdet = |u: f64| (n - r) * u + r * u.exp().ln_1p();
    let (mut lo, mut hi) = (-1.0, 1.0);
    while logdet(lo) > target {
        lo *= 2.0;
    }
    while logdet(hi) < target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if logdet(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi) / 2.0).exp())
}

/// Low-rank factor innovations `X = U Z + σ_e E` with an AR(1) coupling
/// `Y_t = φ Y_{t−1} + X_t`.
pub fn factor_ar1_panel(
    assets: usize,
    factors: usize,
    len: usize,
    det_target: f64,
    phi: f64,
    seed: u64,
) -> Result<FactorPanel> {
    check(phi.abs() < 1.0, || format!("|phi| = {} must be below 1", phi.abs()))?;
    let sigma_e = solve_sigma_e(assets, factors, det_target)?;
    let mut rng = stream(seed, 0);
    let gauss = DMatrix::from_fn(assets, factors, |_, _| normal(&mut rng));
    let loadings = gauss.qr().q();

    let mut rng = stream(seed, 1);
    let mut state = vec![0.0; assets];
    let mut cols = vec![Vec::with_capacity(len); assets];
    let mut z = vec![0.0; factors];
    for t in 0..BURN_IN + len {
        z.iter_mut().for_each(|v| *v = normal(&mut rng));
        for (i, s) in state.iter_mut().enumerate() {
            let common: f64 = (0..factors).map(|k| loadings[(i, k)] * z[k]).sum();
            *s = phi * *s + common + sigma_e * normal(&mut rng);
            if t >= BURN_IN {
                cols[i].push(*s);
            }
        }
    }
    let panel = ReturnsPanel::from_columns(ids("x", assets), cols)?;
    Ok(FactorPanel { panel, loadings, sigma_e })
}

/// One Dirichlet draw. Gamma variates are combined in log space so that
/// concentrations close to zero do not underflow to all-zero weights.
pub fn sample_dirichlet(rng: &mut Rng, concentration: &[f64]) -> Result<Vec<f64>> {
    let mut logs = Vec::with_capacity(concentration.len());
    for &a in concentration {
        check(a > 0.0 && a.is_finite(), || format!("concentration {a} must be positive"))?;
        // For a < 1, G(a) = G(a + 1) · U^{1/a}.
        let boosted = if a < 1.0 { a + 1.0 } else { a };
        let g = Gamma::new(boosted, 1.0).map_err(|e| Error::InvalidParam(e.to_string()))?;
        let mut l = g.sample(rng).ln();
        if a < 1.0 {
            let u = 1.0 - rng.random::<f64>();
            l += u.ln() / a;
        }
        logs.push(l);
    }
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|v| v / total).collect())
}

/// Returns of one long-only fund per entry of `alphas`. Manager `j` draws a
/// concentration vector once, coordinates uniform on `(0, α_j]`, then a
/// fresh Dirichlet allocation every period.
pub fn dirichlet_manager_returns(assets: &ReturnsPanel, alphas: &[f64], seed: u64) -> Result<ReturnsPanel> {
    check(assets.dim() >= 2, || "managers need at least two assets".into())?;
    check(!alphas.is_empty(), || "at least one manager is required".into())?;
    let n = assets.dim();
    let mut funds = Vec::with_capacity(alphas.len());
    for (j, &alpha) in alphas.iter().enumerate() {
        check(alpha > 0.0 && alpha.is_finite(), || format!("alpha = {alpha} must be positive"))?;
        let mut rng = stream(seed, j as u64);
        let concentration: Vec<f64> = (0..n).map(|_| alpha * (1.0 - rng.random::<f64>())).collect();
        let mut fund = Vec::with_capacity(assets.len());
        for t in 0..assets.len() {
            let w = sample_dirichlet(&mut rng, &concentration)?;
            fund.push((0..n).map(|i| w[i] * assets.value(t, i)).sum());
        }
        funds.push(fund);
    }
    ReturnsPanel::from_columns(ids("m", alphas.len()), funds)
}

/// Trend-following overlay: at `t`, each asset is held in proportion to its
/// trailing `window`-period sum of returns, normalized by the L1 norm of
/// those sums. The first `window` periods are dropped.
pub fn momentum_overlay(assets: &ReturnsPanel, window: usize) -> Result<ReturnsPanel> {
    let len = assets.len();
    check(window >= 1, || "window must be positive".into())?;
    check(len > window, || format!("window {window} leaves no observations out of {len}"))?;
    let n = assets.dim();
    let mut out = Vec::with_capacity(len - window);
    for t in window..len {
        let trailing: Vec<f64> = (0..n).map(|i| assets.column(i)[t - window..t].iter().sum()).collect();
        let l1: f64 = trailing.iter().map(|s| s.abs()).sum();
        let r = if l1 > 0.0 { (0..n).map(|i| trailing[i] * assets.value(t, i)).sum::<f64>() / l1 } else { 0.0 };
        out.push(r);
    }
    ReturnsPanel::from_series("momentum", out)
}

fn ids(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Serializable description of a synthetic panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    StudentTAr1 {
        phi: f64,
        nu: f64,
        len: usize,
        seed: u64,
    },
    GaussianAr1 {
        phi: f64,
        dim: usize,
        len: usize,
        seed: u64,
    },
    GaussianWhite {
        dim: usize,
        len: usize,
        sd: f64,
        seed: u64,
    },
    CorrelatedGaussianPair {
        rho: f64,
        len: usize,
        seed: u64,
    },
    FactorAr1Panel {
        assets: usize,
        factors: usize,
        len: usize,
        det_target: f64,
        phi: f64,
        seed: u64,
    },
    /// Fund returns of managers trading a factor panel.
    DirichletManagers {
        assets: usize,
        factors: usize,
        len: usize,
        det_target: f64,
        phi: f64,
        alphas: Vec<f64>,
        seed: u64,
    },
    /// A factor panel followed by a `momentum` column built on it, rows
    /// aligned after dropping the first `window` periods.
    MomentumOverlay {
        assets: usize,
        factors: usize,
        len: usize,
        det_target: f64,
        phi: f64,
        window: usize,
        seed: u64,
    },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<ReturnsPanel> {
        match *self {
            GeneratorSpec::StudentTAr1 { phi, nu, len, seed } => student_t_ar1(phi, nu, len, seed),
            GeneratorSpec::GaussianAr1 { phi, dim, len, seed } => gaussian_ar1(phi, dim, len, seed),
            GeneratorSpec::GaussianWhite { dim, len, sd, seed } => gaussian_white(dim, len, sd, seed),
            GeneratorSpec::CorrelatedGaussianPair { rho, len, seed } => correlated_gaussian_pair(rho, len, seed),
            GeneratorSpec::FactorAr1Panel { assets, factors, len, det_target, phi, seed } => {
                Ok(factor_ar1_panel(assets, factors, len, det_target, phi, seed)?.panel)
            }
            GeneratorSpec::DirichletManagers { assets, factors, len, det_target, phi, ref alphas, seed } => {
                let pool = factor_ar1_panel(assets, factors, len, det_target, phi, derive_seed(seed, "pool"))?;
                dirichlet_manager_returns(&pool.panel, alphas, derive_seed(seed, "managers"))
            }
            GeneratorSpec::MomentumOverlay { assets, factors, len, det_target, phi, window, seed } => {
                let pool = factor_ar1_panel(assets, factors, len, det_target, phi, derive_seed(seed, "pool"))?;
                let mom = momentum_overlay(&pool.panel, window)?;
                pool.panel.rows(window, len)?.hstack(&mom)
            }
        }
    }
}
