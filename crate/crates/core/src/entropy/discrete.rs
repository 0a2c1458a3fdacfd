//! Discretization of real-valued panels into symbol sequences.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::panel::{variance, ReturnsPanel};

/// `T` characters, each a tuple of `arity` cell indices, stored flat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    arity: usize,
    cells: Vec<i64>,
}

impl SymbolSequence {
    pub fn new(arity: usize, cells: Vec<i64>) -> Result<Self> {
        if arity == 0 || !cells.len().is_multiple_of(arity) {
            return Err(Error::InvalidParam(format!(
                "{} cells do not split into tuples of arity {arity}",
                cells.len()
            )));
        }
        Ok(Self { arity, cells })
    }

    pub fn len(&self) -> usize {
        self.cells.len() / self.arity
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn symbol(&self, t: usize) -> &[i64] {
        &self.cells[t * self.arity..(t + 1) * self.arity]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64]> {
        self.cells.chunks_exact(self.arity)
    }

    /// Dense integer codes numbered by order of first appearance, so equal
    /// tuples share a code and the numbering does not depend on hashing.
    pub fn codes(&self) -> Vec<u32> {
        let mut seen: HashMap<&[i64], u32> = HashMap::new();
        self.iter()
            .map(|s| {
                let next = seen.len() as u32;
                *seen.entry(s).or_insert(next)
            })
            .collect()
    }
}

/// Maps each coordinate to the cell `k` with `k·2^{−m} ≤ z < (k+1)·2^{−m}`.
pub fn discretize(panel: &ReturnsPanel, m: f64) -> SymbolSequence {
    let scale = m.exp2();
    let n = panel.dim();
    let mut cells = Vec::with_capacity(panel.len() * n);
    for t in 0..panel.len() {
        for j in 0..n {
            cells.push((panel.value(t, j) * scale).floor() as i64);
        }
    }
    SymbolSequence { arity: n, cells }
}

/// Precision `m` with `2^{−m}` equal to a fifth of the smallest column
/// standard deviation. Need not be an integer.
pub fn default_precision(panel: &ReturnsPanel) -> Result<f64> {
    let s_min = panel.columns().iter().map(|c| variance(c).sqrt()).fold(f64::INFINITY, f64::min);
    if !(s_min > 0.0) {
        return Err(Error::DegenerateSeries("smallest column standard deviation is zero".into()));
    }
    Ok((5.0 / s_min).log2())
}

/// Plug-in Shannon entropy of the empirical symbol frequencies, in bits.
pub fn plugin_discrete_entropy(symbols: &SymbolSequence) -> Result<f64> {
    if symbols.is_empty() {
        return Err(Error::EmptySequence);
    }
    Ok(code_entropy(&symbols.codes()))
}

pub(crate) fn code_entropy(codes: &[u32]) -> f64 {
    let distinct = codes.iter().max().map_or(0, |&c| c as usize + 1);
    let mut counts = vec![0usize; distinct];
    for &c in codes {
        counts[c as usize] += 1;
    }
    let total = codes.len() as f64;
    -counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            p * p.log2()
        })
        .sum::<f64>()
}
