//! Returns panels, CSV ingestion, variance normalization and sample
//! autocovariance machinery shared by every estimator.
//!
//! A [`ReturnsPanel`] is stored column-major: one contiguous `Vec<f64>` per
//! asset. All second moments in this crate use divisor `T`, which keeps the
//! block autocovariance matrix positive semidefinite.

use std::f64::consts::{E, PI};
use std::io::{Read, Write};
use std::path::Path;

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-coordinate variance at which a memoryless Gaussian has an entropy of
/// exactly one bit: `½ log2(2πe · 2/(πe)) = 1`.
pub const UNIT_BIT_VARIANCE: f64 = 2.0 / (PI * E);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Period {
    #[default]
    Daily,
    Monthly,
    /// Fixed sampling interval in seconds.
    Custom(u64),
}

/// `T × n` matrix of per-period simple returns.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsPanel {
    columns: Vec<Vec<f64>>,
    asset_ids: Vec<String>,
    period: Period,
    timestamps: Option<Vec<NaiveDateTime>>,
}

impl ReturnsPanel {
    /// Builds a panel from one vector per asset.
    pub fn from_columns(asset_ids: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidPanel("panel has no columns".into()));
        }
        if asset_ids.len() != columns.len() {
            return Err(Error::InvalidPanel(format!("{} asset ids for {} columns", asset_ids.len(), columns.len())));
        }
        let len = columns[0].len();
        if let Some(bad) = columns.iter().position(|c| c.len() != len) {
            return Err(Error::InvalidPanel(format!(
                "column {} has {} rows, expected {len}",
                asset_ids[bad],
                columns[bad].len()
            )));
        }
        if len < 2 {
            return Err(Error::EmptyPanel(len));
        }
        for (id, col) in asset_ids.iter().zip(&columns) {
            if let Some(t) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidPanel(format!("non-finite value in {id} at row {t}")));
            }
        }
        Ok(Self { columns, asset_ids, period: Period::Daily, timestamps: None })
    }

    /// Single-asset panel.
    pub fn from_series(id: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        Self::from_columns(vec![id.into()], vec![values])
    }

    /// Builds a panel from a `T × n` matrix, naming assets `a0, a1, …`.
    pub fn from_matrix(values: &DMatrix<f64>) -> Result<Self> {
        let ids = (0..values.ncols()).map(|j| format!("a{j}")).collect();
        let cols = values.column_iter().map(|c| c.iter().copied().collect()).collect();
        Self::from_columns(ids, cols)
    }

    pub fn with_period(mut self, period: Period) -> Self {
        self.period = period;
        self
    }

    pub fn with_timestamps(mut self, timestamps: Vec<NaiveDateTime>) -> Result<Self> {
        if timestamps.len() != self.len() {
            return Err(Error::InvalidPanel(format!("{} timestamps for {} rows", timestamps.len(), self.len())));
        }
        if timestamps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPanel("timestamps must be strictly increasing".into()));
        }
        self.timestamps = Some(timestamps);
        Ok(self)
    }

    /// Number of periods `T`.
    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of assets `n`.
    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn asset_ids(&self) -> &[String] {
        &self.asset_ids
    }

    pub fn period(&self) -> Period {
        self.period
    }

    pub fn timestamps(&self) -> Option<&[NaiveDateTime]> {
        self.timestamps.as_deref()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.asset_ids.iter().position(|a| a == id)
    }

    pub fn value(&self, t: usize, j: usize) -> f64 {
        self.columns[j][t]
    }

    /// `T × n` dense copy.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.len(), self.dim(), |t, j| self.columns[j][t])
    }

    /// Panel restricted to the given columns, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidPanel("empty column selection".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&j| j >= self.dim()) {
            return Err(Error::InvalidPanel(format!("column index {bad} out of range")));
        }
        Ok(Self {
            columns: indices.iter().map(|&j| self.columns[j].clone()).collect(),
            asset_ids: indices.iter().map(|&j| self.asset_ids[j].clone()).collect(),
            period: self.period,
            timestamps: self.timestamps.clone(),
        })
    }

    /// Every column except `j`.
    pub fn without(&self, j: usize) -> Result<Self> {
        let rest: Vec<usize> = (0..self.dim()).filter(|&k| k != j).collect();
        self.select(&rest)
    }

    /// Column-wise concatenation `[self, other]`.
    pub fn hstack(&self, other: &ReturnsPanel) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::RowMisalignment { left: self.len(), right: other.len() });
        }
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        let mut asset_ids = self.asset_ids.clone();
        asset_ids.extend(other.asset_ids.iter().cloned());
        Ok(Self { columns, asset_ids, period: self.period, timestamps: self.timestamps.clone() })
    }

    /// Rows `start..end`.
    pub fn rows(&self, start: usize, end: usize) -> Result<Self> {
        if end > self.len() || start >= end {
            return Err(Error::InvalidPanel(format!("row range {start}..{end} out of bounds")));
        }
        let columns = self.columns.iter().map(|c| c[start..end].to_vec()).collect::<Vec<_>>();
        let mut out = Self::from_columns(self.asset_ids.clone(), columns)?;
        out.period = self.period;
        out.timestamps = self.timestamps.as_ref().map(|ts| ts[start..end].to_vec());
        Ok(out)
    }

    /// Multiplies column `j` by `factors[j]`.
    pub fn scale_columns(&self, factors: &[f64]) -> Result<Self> {
        if factors.len() != self.dim() {
            return Err(Error::InvalidPanel(format!("{} factors for {} columns", factors.len(), self.dim())));
        }
        let mut out = self.clone();
        for (col, &f) in out.columns.iter_mut().zip(factors) {
            col.iter_mut().for_each(|v| *v *= f);
        }
        Ok(out)
    }

    /// Adds `shift[j]` to every value of column `j`.
    pub fn shift_columns(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dim() {
            return Err(Error::InvalidPanel("shift length mismatch".into()));
        }
        let mut out = self.clone();
        for (col, &s) in out.columns.iter_mut().zip(shift) {
            col.iter_mut().for_each(|v| *v += s);
        }
        Ok(out)
    }

    pub fn rename(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.dim() {
            return Err(Error::InvalidPanel("id count mismatch".into()));
        }
        self.asset_ids = ids;
        Ok(self)
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Variance with divisor `T`.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

/// Covariance with divisor `T`.
pub fn covariance(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / a.len() as f64
}

/// Pearson correlation; `None` when either series is constant.
pub fn correlation(a: &[f64], b: &[f64]) -> Option<f64> {
    let constant = |xs: &[f64]| xs.iter().all(|&v| v == xs[0]);
    let (va, vb) = (variance(a), variance(b));
    if va <= 0.0 || vb <= 0.0 || constant(a) || constant(b) {
        return None;
    }
    Some(covariance(a, b) / (va * vb).sqrt())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestOptions {
    /// Drop rows holding a non-numeric cell instead of failing.
    pub drop_invalid_rows: bool,
    pub period: Period,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self { drop_invalid_rows: false, period: Period::Daily }
    }
}

pub fn load_returns_csv(path: impl AsRef<Path>, options: &IngestOptions) -> Result<ReturnsPanel> {
    let file = std::fs::File::open(path.as_ref())?;
    read_returns_csv(file, options)
}

fn parse_timestamp(raw: &str) -> Option<NaiveDateTime> {
    let raw = raw.trim();
    if let Ok(d) = NaiveDate::parse_from_str(raw, "%Y-%m-%d") {
        return Some(d.and_time(NaiveTime::MIN));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Some(dt);
        }
    }
    chrono::DateTime::parse_from_rfc3339(raw).ok().map(|dt| dt.naive_utc())
}

fn parse_cell(raw: &str) -> Option<f64> {
    raw.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses a panel from CSV text: a header row with asset ids, optionally led
/// by a `date` column.
pub fn read_returns_csv<R: Read>(reader: R, options: &IngestOptions) -> Result<ReturnsPanel> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::MalformedCsv(e.to_string()))?.clone();
    let has_date = header.get(0).is_some_and(|h| h.trim().eq_ignore_ascii_case("date"));
    let first = usize::from(has_date);
    let ids: Vec<String> = header.iter().skip(first).map(|h| h.trim().to_string()).collect();
    if ids.is_empty() {
        return Err(Error::MalformedCsv("no asset columns in header".into()));
    }

    let mut rows: Vec<(Option<NaiveDateTime>, Vec<f64>)> = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::MalformedCsv(e.to_string()))?;
        let stamp = if has_date { parse_timestamp(&record[0]) } else { None };
        let values: Option<Vec<f64>> = record.iter().skip(first).map(parse_cell).collect();
        match (values, has_date && stamp.is_none()) {
            (Some(v), false) => rows.push((stamp, v)),
            _ if options.drop_invalid_rows => continue,
            _ => return Err(Error::MalformedCsv(format!("invalid cell on data row {}", line + 1))),
        }
    }
    if rows.len() < 2 {
        return Err(Error::EmptyPanel(rows.len()));
    }
    if has_date {
        rows.sort_by_key(|(ts, _)| *ts);
        if rows.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::MalformedCsv("duplicate timestamps".into()));
        }
    }
    let n = ids.len();
    let mut columns = vec![Vec::with_capacity(rows.len()); n];
    let mut stamps = Vec::with_capacity(rows.len());
    for (ts, values) in rows {
        for (col, v) in columns.iter_mut().zip(values) {
            col.push(v);
        }
        if let Some(ts) = ts {
            stamps.push(ts);
        }
    }
    let panel = ReturnsPanel::from_columns(ids, columns)?.with_period(options.period);
    if has_date {
        panel.with_timestamps(stamps)
    } else {
        Ok(panel)
    }
}

fn format_timestamp(ts: &NaiveDateTime) -> String {
    if ts.time() == NaiveTime::MIN {
        ts.format("%Y-%m-%d").to_string()
    } else {
        ts.format("%Y-%m-%dT%H:%M:%S%.f").to_string()
    }
}

/// Writes a panel in the same layout [`read_returns_csv`] accepts. Values use
/// the shortest representation that parses back to the identical `f64`.
pub fn write_returns_csv<W: Write>(panel: &ReturnsPanel, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let map_err = |e: csv::Error| Error::MalformedCsv(e.to_string());
    let mut header: Vec<String> = Vec::with_capacity(panel.dim() + 1);
    if panel.timestamps.is_some() {
        header.push("date".into());
    }
    header.extend(panel.asset_ids.iter().cloned());
    w.write_record(&header).map_err(map_err)?;
    for t in 0..panel.len() {
        let mut row: Vec<String> = Vec::with_capacity(header.len());
        if let Some(ts) = &panel.timestamps {
            row.push(format_timestamp(&ts[t]));
        }
        row.extend(panel.columns.iter().map(|c| format!("{}", c[t])));
        w.write_record(&row).map_err(map_err)?;
    }
    w.flush()?;
    Ok(())
}

/// A panel rescaled to a common per-column variance.
#[derive(Debug, Clone)]
pub struct Normalized {
    pub panel: ReturnsPanel,
    /// Multiplier applied to each column.
    pub factors: Vec<f64>,
}

/// Rescales every column to variance `target` (divisor `T`).
pub fn normalize_variance(panel: &ReturnsPanel, target: f64) -> Result<Normalized> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::InvalidParam(format!("target variance {target} must be positive")));
    }
    let mut factors = Vec::with_capacity(panel.dim());
    for (id, col) in panel.asset_ids.iter().zip(&panel.columns) {
        let v = variance(col);
        if !(v > 0.0) {
            return Err(Error::DegenerateSeries(format!("column {id} is constant")));
        }
        factors.push((target / v).sqrt());
    }
    Ok(Normalized { panel: panel.scale_columns(&factors)?, factors })
}

/// Sample autocovariances `Ĉ(0..=p)`, each `n × n`, with
/// `Ĉ(h) = (1/T) Σ_{t≥h} (z_t − z̄)(z_{t−h} − z̄)ᵀ`.
#[derive(Debug, Clone)]
pub struct AutocovSequence {
    dim: usize,
    lags: Vec<DMatrix<f64>>,
}

impl AutocovSequence {
    pub fn max_lag(&self) -> usize {
        self.lags.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Ĉ(h)`; negative lags are `Ĉ(−h)ᵀ`.
    pub fn at(&self, h: isize) -> DMatrix<f64> {
        if h >= 0 {
            self.lags[h as usize].clone()
        } else {
            self.lags[(-h) as usize].transpose()
        }
    }

    pub fn lag(&self, h: usize) -> &DMatrix<f64> {
        &self.lags[h]
    }
}

pub fn sample_autocovariance(panel: &ReturnsPanel, p: usize) -> Result<AutocovSequence> {
    let len = panel.len();
    if p >= len {
        return Err(Error::LagTooLarge { lag: p, len });
    }
    let n = panel.dim();
    let centered: Vec<Vec<f64>> = panel
        .columns
        .iter()
        .map(|c| {
            let m = mean(c);
            c.iter().map(|v| v - m).collect()
        })
        .collect();
    let lags = (0..=p)
        .map(|h| {
            DMatrix::from_fn(n, n, |i, j| {
                let (a, b) = (&centered[i][h..], &centered[j][..len - h]);
                a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / len as f64
            })
        })
        .collect();
    Ok(AutocovSequence { dim: n, lags })
}

/// Symmetric block-Toeplitz matrix `Σ_p` with block `[i, j] = Ĉ(i − j)`.
#[derive(Debug, Clone)]
pub struct BlockAutocovMatrix {
    pub dim: usize,
    pub lag: usize,
    pub matrix: DMatrix<f64>,
}

pub fn block_autocov_matrix(acov: &AutocovSequence, p: usize) -> Result<BlockAutocovMatrix> {
    if p > acov.max_lag() {
        return Err(Error::LagTooLarge { lag: p, len: acov.max_lag() + 1 });
    }
    let n = acov.dim;
    let size = (p + 1) * n;
    let mut m = DMatrix::zeros(size, size);
    for bi in 0..=p {
        for bj in 0..=p {
            let block = acov.at(bi as isize - bj as isize);
            m.view_mut((bi * n, bj * n), (n, n)).copy_from(&block);
        }
    }
    let matrix = (&m + m.transpose()) * 0.5;
    Ok(BlockAutocovMatrix { dim: n, lag: p, matrix })
}

/// `max(1, ⌊12 (T/100)^{1/4}⌋)`.
pub fn default_lag(len: usize) -> usize {
    let p = (12.0 * (len as f64 / 100.0).powf(0.25)).floor() as usize;
    p.max(1)
}

/// Largest lag `p ≤ requested` with `(p + 1) · n < T`, or `None` when even
/// `p = 0` does not fit.
pub fn cap_lag(requested: usize, len: usize, dim: usize) -> Option<usize> {
    if dim >= len {
        return None;
    }
    let max_fit = (len - 1) / dim - 1;
    Some(requested.min(max_fit))
}
