//! Lempel-Ziv (1976) complexity by exhaustive history parsing.

use std::fmt::Display;
use std::ops::Range;

use crate::error::{Error, Result};

/// Complexity of a sequence together with the phrases of its exhaustive
/// history, as index ranges into the parsed sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lz76 {
    pub complexity: usize,
    pub phrases: Vec<Range<usize>>,
}

impl Lz76 {
    /// Renders each phrase by concatenating the `Display` form of its symbols.
    pub fn history<S: Display>(&self, seq: &[S]) -> Vec<String> {
        self.phrases.iter().map(|r| seq[r.clone()].iter().map(|s| s.to_string()).collect()).collect()
    }
}

/// Parses `seq` with the classic `(i, u, v, vmax)` scan.
///
/// `u` is the start of the phrase being built, `i` walks candidate earlier
/// start positions and `v` is the current match length. A mismatch with every
/// candidate closes a phrase of length `vmax`. A trailing match still open at
/// the end of the sequence becomes a final phrase covering the remainder.
pub fn lz76_complexity<S: PartialEq>(seq: &[S]) -> Result<Lz76> {
    let n = seq.len();
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    let mut phrases = vec![Range { start: 0, end: 1 }];
    let mut complexity = 1;
    let (mut hi, mut i, mut u, mut v, mut vmax) = (1usize, 0usize, 1usize, 1usize, 1usize);

    while u + v <= n {
        if seq[i + v - 1] == seq[u + v - 1] {
            v += 1;
        } else {
            vmax = vmax.max(v);
            i += 1;
            if i == u {
                complexity += 1;
                u += vmax;
                v = 1;
                i = 0;
                phrases.push(hi.min(n)..(hi + vmax).min(n));
                hi += vmax;
                vmax = v;
            } else {
                v = 1;
            }
        }
    }
    if v != 1 {
        phrases.push(hi.min(n)..n);
        complexity += 1;
    }
    Ok(Lz76 { complexity, phrases })
}

/// Complexity only.
pub fn lz76_count<S: PartialEq>(seq: &[S]) -> Result<usize> {
    lz76_complexity(seq).map(|r| r.complexity)
}

/// Convenience wrapper over the characters of a string.
pub fn lz76_str(s: &str) -> Result<(usize, Vec<String>)> {
    let chars: Vec<char> = s.chars().collect();
    let parsed = lz76_complexity(&chars)?;
    Ok((parsed.complexity, parsed.history(&chars)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_sequence() {
        let (c, h) = lz76_str("0001101001000101").unwrap();
        assert_eq!(c, 6);
        assert_eq!(h, ["0", "001", "10", "100", "1000", "101"]);
    }

    #[test]
    fn repeated_symbol() {
        assert_eq!(lz76_str("aaaa").unwrap(), (2, vec!["a".to_string(), "aaa".to_string()]));
    }

    #[test]
    fn two_distinct_symbols() {
        assert_eq!(lz76_str("01").unwrap(), (2, vec!["0".to_string(), "1".to_string()]));
    }

    #[test]
    fn single_symbol() {
        assert_eq!(lz76_str("x").unwrap(), (1, vec!["x".to_string()]));
    }

    #[test]
    fn empty_is_error() {
        assert!(matches!(lz76_str(""), Err(Error::EmptySequence)));
    }

    #[test]
    fn all_distinct_saturates() {
        let seq: Vec<u32> = (0..50).collect();
        assert_eq!(lz76_count(&seq).unwrap(), 50);
    }

    proptest! {
        #[test]
        fn phrases_tile_the_sequence(seq in proptest::collection::vec(0u8..3, 1..200)) {
            let r = lz76_complexity(&seq).unwrap();
            prop_assert_eq!(r.complexity, r.phrases.len());
            // Phrases are contiguous from index 0 and cover the sequence.
            let mut next = 0;
            for p in &r.phrases {
                prop_assert_eq!(p.start, next);
                next = p.end;
            }
            prop_assert_eq!(next, seq.len());
        }

        #[test]
        fn complexity_grows_with_prefix(seq in proptest::collection::vec(0u8..4, 2..150)) {
            let mut prev = 0;
            for len in 1..=seq.len() {
                let c = lz76_count(&seq[..len]).unwrap();
                prop_assert!(c >= prev);
                prev = c;
            }
        }
    }
}
