//! Best replicating portfolio and the effect of a candidate on the tails of
//! the pool, measured with moments of the Mahalanobis statistic.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{factor_with_ladder, SHRINKAGE_LADDER};
use crate::panel::{correlation, covariance, mean, variance, ReturnsPanel};

/// A pool column is dropped as collinear with the columns already kept when
/// its Cholesky pivot falls below this fraction of its variance.
const COLLINEAR_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationResult {
    pub asset_ids: Vec<String>,
    /// One weight per pool column; dropped columns get 0.
    pub weights: Vec<f64>,
    pub dropped: Vec<String>,
    pub cash_weight: f64,
    pub replicated: Vec<f64>,
    pub tracking_error: Vec<f64>,
    pub replication_correlation: f64,
}

/// Greedy maximal subset of columns whose covariance stays well conditioned,
/// scanned in column order.
fn independent_columns(cov: &DMatrix<f64>) -> Vec<usize> {
    let n = cov.nrows();
    let mut kept: Vec<usize> = Vec::new();
    // Rows of the Cholesky factor of the kept block.
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for j in 0..n {
        let d = cov[(j, j)];
        if !(d > 0.0) {
            continue;
        }
        let mut row = Vec::with_capacity(kept.len() + 1);
        for (a, &k) in kept.iter().enumerate() {
            let dot: f64 = row.iter().zip(&rows[a]).map(|(x, y)| x * y).sum();
            row.push((cov[(j, k)] - dot) / rows[a][a]);
        }
        let pivot = d - row.iter().map(|v| v * v).sum::<f64>();
        if pivot > COLLINEAR_TOLERANCE * d {
            row.push(pivot.sqrt());
            rows.push(row);
            kept.push(j);
        }
    }
    kept
}

/// OLS replication of `y` by the pool `x` plus cash at `r_f`.
pub fn best_replicating_portfolio(y: &ReturnsPanel, x: &ReturnsPanel, r_f: f64) -> Result<ReplicationResult> {
    if y.len() != x.len() {
        return Err(Error::RowMisalignment { left: y.len(), right: x.len() });
    }
    if y.dim() != 1 {
        return Err(Error::InvalidPanel("candidate must be a single series".into()));
    }
    let yv = y.column(0);
    let n = x.dim();
    let cov = DMatrix::from_fn(n, n, |i, j| covariance(x.column(i), x.column(j)));
    let kept = independent_columns(&cov);
    if kept.is_empty() {
        return Err(Error::SingularCovariance("every pool column is degenerate".into()));
    }
    let sub = DMatrix::from_fn(kept.len(), kept.len(), |a, b| cov[(kept[a], kept[b])]);
    let rhs = DVector::from_iterator(kept.len(), kept.iter().map(|&j| covariance(x.column(j), yv)));
    let sol = sub
        .cholesky()
        .ok_or_else(|| Error::SingularCovariance("pool covariance is not invertible".into()))?
        .solve(&rhs);

    let mut weights = vec![0.0; n];
    for (a, &j) in kept.iter().enumerate() {
        weights[j] = sol[a];
    }
    let cash_weight = 1.0 - weights.iter().sum::<f64>();
    let replicated: Vec<f64> = (0..x.len())
        .map(|t| kept.iter().map(|&j| weights[j] * x.value(t, j)).sum::<f64>() + cash_weight * r_f)
        .collect();
    let tracking_error: Vec<f64> = yv.iter().zip(&replicated).map(|(a, b)| a - b).collect();
    let dropped = (0..n).filter(|j| !kept.contains(j)).map(|j| x.asset_ids()[j].clone()).collect();
    Ok(ReplicationResult {
        asset_ids: x.asset_ids().to_vec(),
        weights,
        dropped,
        cash_weight,
        replication_correlation: correlation(yv, &replicated).unwrap_or(0.0),
        replicated,
        tracking_error,
    })
}

/// `ψ_t = (z_t − z̄)ᵀ Ĉ(0)⁻¹ (z_t − z̄)`.
pub fn psi_statistic(panel: &ReturnsPanel) -> Result<Vec<f64>> {
    let n = panel.dim();
    if let Some(j) = (0..n).find(|&j| panel.column(j).iter().all(|&v| v == panel.value(0, j))) {
        return Err(Error::SingularCovariance(format!("column {} is constant", panel.asset_ids()[j])));
    }
    let means: Vec<f64> = panel.columns().iter().map(|c| mean(c)).collect();
    let cov = DMatrix::from_fn(n, n, |i, j| covariance(panel.column(i), panel.column(j)));
    let chol = factor_with_ladder(&cov, &SHRINKAGE_LADDER)
        .map_err(|f| Error::SingularCovariance(format!("{f:?} covariance")))?;
    Ok((0..panel.len())
        .map(|t| {
            let d: Vec<f64> = (0..n).map(|j| panel.value(t, j) - means[j]).collect();
            chol.factor.quad_form_inv(&d)
        })
        .collect())
}

/// `E[χ²_n^p] = Π_{i<p} (n + 2i)`.
pub fn chi2_moment(n: usize, p: u32) -> f64 {
    (0..p).map(|i| (n + 2 * i as usize) as f64).product()
}

/// `mean(ψ^p) / Π_{i<p} (n + 2i)`; 1 for Gaussian data.
pub fn tail_ratio(panel: &ReturnsPanel, p: u32) -> Result<f64> {
    tail_ratio_from_psi(&psi_statistic(panel)?, panel.dim(), p)
}

fn tail_ratio_from_psi(psi: &[f64], n: usize, p: u32) -> Result<f64> {
    if p < 2 {
        return Err(Error::InvalidParam(format!("moment order {p} must be at least 2")));
    }
    Ok(psi.iter().map(|v| v.powi(p as i32)).sum::<f64>() / psi.len() as f64 / chi2_moment(n, p))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub tr_reference: f64,
    pub tr_joint: f64,
    pub it: f64,
    pub order: u32,
    /// The tracking error vanished and `IT` was set to 0.
    pub perfect_replication: bool,
    pub psi_reference: Vec<f64>,
    pub psi_joint: Vec<f64>,
    pub replication: ReplicationResult,
}

/// `IT = TR(y*; p) − TR([ε, y*]; p)`.
pub fn tail_impact(y: &ReturnsPanel, x: &ReturnsPanel, p: u32, r_f: f64) -> Result<TailReport> {
    if p < 2 {
        return Err(Error::InvalidParam(format!("moment order {p} must be at least 2")));
    }
    let rep = best_replicating_portfolio(y, x, r_f)?;
    let reference = ReturnsPanel::from_series("replicated", rep.replicated.clone())?;
    let psi_reference = psi_statistic(&reference)?;
    let tr_reference = tail_ratio_from_psi(&psi_reference, 1, p)?;

    let max_err = rep.tracking_error.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    if max_err < 1e-10 * variance(y.column(0)).sqrt() {
        return Ok(TailReport {
            tr_reference,
            tr_joint: tr_reference,
            it: 0.0,
            order: p,
            perfect_replication: true,
            psi_reference,
            psi_joint: Vec::new(),
            replication: rep,
        });
    }
    let joint = ReturnsPanel::from_columns(
        vec!["tracking_error".into(), "replicated".into()],
        vec![rep.tracking_error.clone(), rep.replicated.clone()],
    )?;
    let psi_joint = psi_statistic(&joint)?;
    let tr_joint = tail_ratio_from_psi(&psi_joint, 2, p)?;
    Ok(TailReport {
        tr_reference,
        tr_joint,
        it: tr_reference - tr_joint,
        order: p,
        perfect_replication: false,
        psi_reference,
        psi_joint,
        replication: rep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pool() -> ReturnsPanel {
        ReturnsPanel::from_columns(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![0.1, -0.3, 0.2, 0.5, -0.1, 0.0, 0.3, -0.2],
                vec![0.0, 0.2, -0.1, 0.1, 0.4, -0.3, 0.1, 0.2],
                vec![0.2, -0.6, 0.4, 1.0, -0.2, 0.0, 0.6, -0.4],
            ],
        )
        .unwrap()
    }

    #[test]
    fn collinear_column_is_dropped() {
        let x = pool();
        let y = ReturnsPanel::from_series("y", x.column(0).iter().map(|v| 2.0 * v).collect()).unwrap();
        let rep = best_replicating_portfolio(&y, &x, 0.0).unwrap();
        assert_eq!(rep.dropped, ["c"]);
        assert_relative_eq!(rep.weights[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(rep.weights[1], 0.0, epsilon = 1e-12);
        assert_eq!(rep.weights[2], 0.0);
        assert_relative_eq!(rep.replication_correlation, 1.0, epsilon = 1e-12);
        assert!(rep.tracking_error.iter().all(|e| e.abs() < 1e-12));
    }

    #[test]
    fn perfect_replication_has_zero_impact() {
        let x = pool();
        let y = ReturnsPanel::from_series("y", x.column(0).iter().map(|v| 3.0 * v).collect()).unwrap();
        let r = tail_impact(&y, &x, 2, 0.0).unwrap();
        assert!(r.perfect_replication);
        assert_eq!(r.it, 0.0);
    }

    #[test]
    fn univariate_psi_mean_is_one() {
        let x = pool().select(&[1]).unwrap();
        let psi = psi_statistic(&x).unwrap();
        assert_relative_eq!(psi.iter().sum::<f64>() / psi.len() as f64, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn constant_column_is_singular() {
        let x =
            ReturnsPanel::from_columns(vec!["a".into(), "b".into()], vec![vec![0.1, 0.2, 0.3], vec![1.0, 1.0, 1.0]])
                .unwrap();
        assert!(matches!(psi_statistic(&x), Err(Error::SingularCovariance(_))));
    }

    #[test]
    fn chi2_moments() {
        assert_eq!(chi2_moment(3, 2), 15.0);
        assert_eq!(chi2_moment(1, 3), 15.0);
        assert_eq!(chi2_moment(2, 2), 8.0);
    }
}
