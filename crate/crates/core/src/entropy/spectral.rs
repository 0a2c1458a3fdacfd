//! Welch estimate of the matrix spectral density and the entropy rate that
//! integrates its log-determinant.

use std::f64::consts::{E, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{Diagnostics, EntropyRateEstimate, Method, NonparametricDiagnostics};
use crate::error::{Error, Result};
use crate::panel::{mean, ReturnsPanel};

/// Spectral eigenvalues are raised to this floor before taking logs.
const EIGEN_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Taper {
    #[default]
    Hann,
    Rectangular,
}

impl Taper {
    /// Periodic form of the window, length `w`.
    pub fn weights(self, w: usize) -> Vec<f64> {
        match self {
            Taper::Hann => (0..w).map(|j| 0.5 - 0.5 * (2.0 * PI * j as f64 / w as f64).cos()).collect(),
            Taper::Rectangular => vec![1.0; w],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WelchConfig {
    /// Segment length; [`default_window`] when unset.
    pub window: Option<usize>,
    pub overlap: f64,
    pub taper: Taper,
}

impl Default for WelchConfig {
    fn default() -> Self {
        Self { window: None, overlap: 0.5, taper: Taper::Hann }
    }
}

impl WelchConfig {
    pub fn resolve_window(&self, len: usize) -> Result<usize> {
        if !(0.0..1.0).contains(&self.overlap) {
            return Err(Error::InvalidParam(format!("overlap {} must lie in [0, 1)", self.overlap)));
        }
        let window = self.window.unwrap_or_else(|| default_window(len));
        if window == 0 {
            return Err(Error::InvalidParam("window must be positive".into()));
        }
        if window > len {
            return Err(Error::WindowTooLarge { window, len });
        }
        Ok(window)
    }
}

/// 100 samples, or `T/20` for samples longer than 2000; never more than `T`.
pub fn default_window(len: usize) -> usize {
    if len > 2000 {
        len / 20
    } else {
        100.min(len)
    }
}

/// `f(ω_k)` at `ω_k = 2πk/W`, `k = 0..W`, normalized so that
/// `Σ_k f(ω_k) · 2π/W ≈ Ĉ(0)`.
#[derive(Debug, Clone)]
pub struct SpectralDensity {
    pub window: usize,
    pub segments: usize,
    pub frequencies: Vec<f64>,
    pub values: Vec<DMatrix<Complex64>>,
}

pub fn spectral_density_welch(panel: &ReturnsPanel, config: &WelchConfig) -> Result<SpectralDensity> {
    let len = panel.len();
    let w = config.resolve_window(len)?;
    let n = panel.dim();
    let step = ((w as f64 * (1.0 - config.overlap)).round() as usize).max(1);
    let starts: Vec<usize> = (0..).map(|s| s * step).take_while(|s| s + w <= len).collect();
    let taper = config.taper.weights(w);
    let power: f64 = taper.iter().map(|v| v * v).sum();

    let centered: Vec<Vec<f64>> = panel
        .columns()
        .iter()
        .map(|c| {
            let m = mean(c);
            c.iter().map(|v| v - m).collect()
        })
        .collect();

    let fft = FftPlanner::<f64>::new().plan_fft_forward(w);
    let mut sums = vec![DMatrix::<Complex64>::zeros(n, n); w];
    let mut buf = vec![Complex64::default(); w];
    let mut coeffs = vec![vec![Complex64::default(); w]; n];
    for &s in &starts {
        for (j, col) in centered.iter().enumerate() {
            for (b, (x, t)) in buf.iter_mut().zip(col[s..s + w].iter().zip(&taper)) {
                *b = Complex64::new(x * t, 0.0);
            }
            fft.process(&mut buf);
            coeffs[j].copy_from_slice(&buf);
        }
        for (k, sum) in sums.iter_mut().enumerate() {
            for a in 0..n {
                for b in 0..n {
                    sum[(a, b)] += coeffs[a][k] * coeffs[b][k].conj();
                }
            }
        }
    }

    let norm = starts.len() as f64 * 2.0 * PI * power;
    let values = sums
        .into_iter()
        .map(|s| {
            let f = s / Complex64::new(norm, 0.0);
            (&f + f.adjoint()) * Complex64::new(0.5, 0.0)
        })
        .collect();
    let frequencies = (0..w).map(|k| 2.0 * PI * k as f64 / w as f64).collect();
    Ok(SpectralDensity { window: w, segments: starts.len(), frequencies, values })
}

/// `(1/4π) ∫ log2 det(4π² e f(ω)) dω` by the trapezoid rule on the periodic
/// Welch grid.
pub fn nonparametric_entropy_rate(panel: &ReturnsPanel, config: &WelchConfig) -> Result<EntropyRateEstimate> {
    let sd = spectral_density_welch(panel, config)?;
    let c = 4.0 * PI * PI * E;
    let per_node = sd
        .values
        .par_iter()
        .zip(sd.frequencies.par_iter())
        .map(|(f, &omega)| {
            let eig = if f.nrows() == 1 {
                vec![f[(0, 0)].re]
            } else {
                f.clone().symmetric_eigenvalues().iter().copied().collect()
            };
            let top = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if !(top > 0.0) || eig.iter().any(|v| !v.is_finite()) {
                return Err(Error::SingularSpectrum { omega });
            }
            let clipped = eig.iter().filter(|&&v| v < EIGEN_FLOOR).count();
            let logdet: f64 = eig.iter().map(|&v| (c * v.max(EIGEN_FLOOR)).log2()).sum();
            Ok((logdet, clipped))
        })
        .collect::<Result<Vec<_>>>()?;

    let w = sd.window as f64;
    let bits = per_node.iter().map(|(l, _)| l).sum::<f64>() / (2.0 * w);
    Ok(EntropyRateEstimate {
        bits_per_period: bits,
        method: Method::Nonparametric,
        scale_adjustment_bits: 0.0,
        diagnostics: Diagnostics::Nonparametric(NonparametricDiagnostics {
            window: sd.window,
            overlap: config.overlap,
            taper: config.taper,
            segments: sd.segments,
            quadrature_nodes: sd.values.len(),
            clipped_eigenvalues: per_node.iter().map(|(_, c)| c).sum(),
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn periodic_hann() {
        let w = Taper::Hann.weights(4);
        assert_relative_eq!(w[0], 0.0);
        assert_relative_eq!(w[1], 0.5, epsilon = 1e-15);
        assert_relative_eq!(w[2], 1.0);
        assert_relative_eq!(w[3], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn window_defaults() {
        assert_eq!(default_window(1000), 100);
        assert_eq!(default_window(2000), 100);
        assert_eq!(default_window(10_000), 500);
        assert_eq!(default_window(40), 40);
    }

    #[test]
    fn window_too_large() {
        let p = ReturnsPanel::from_series("a", vec![0.1, -0.2, 0.3]).unwrap();
        let cfg = WelchConfig { window: Some(4), ..WelchConfig::default() };
        assert!(matches!(spectral_density_welch(&p, &cfg), Err(Error::WindowTooLarge { window: 4, len: 3 })));
    }

    #[test]
    fn integrates_to_variance_with_rectangular_single_segment() {
        // One full-length rectangular segment is the raw periodogram, whose
        // Riemann sum recovers Ĉ(0) exactly by Parseval.
        let xs = vec![0.3, -1.2, 0.7, 2.1, -0.4, 0.0, 1.1, -0.9];
        let p = ReturnsPanel::from_series("a", xs.clone()).unwrap();
        let cfg = WelchConfig { window: Some(8), overlap: 0.0, taper: Taper::Rectangular };
        let sd = spectral_density_welch(&p, &cfg).unwrap();
        let integral: f64 = sd.values.iter().map(|f| f[(0, 0)].re).sum::<f64>() * 2.0 * PI / 8.0;
        assert_relative_eq!(integral, crate::panel::variance(&xs), epsilon = 1e-12);
    }
}
