//! String measures on DNA words: distances, orientation transforms,
//! GC-content, shift correlation, tandem repeats and the fold-safety test.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::dna::{Base, DnaString};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("code is empty")]
    EmptyCode,
    #[error("code mixes word lengths {0} and {1}")]
    MixedLengths(usize, usize),
    #[error("code has no pairs to compare")]
    NoPairs,
}

pub type Result<T> = std::result::Result<T, MetricsError>;

fn same_len(x: &DnaString, y: &DnaString) -> Result<()> {
    if x.len() != y.len() {
        return Err(MetricsError::LengthMismatch(x.len(), y.len()));
    }
    Ok(())
}

pub fn hamming(x: &DnaString, y: &DnaString) -> Result<usize> {
    same_len(x, y)?;
    Ok(x.bases()
        .iter()
        .zip(y.bases())
        .filter(|(a, b)| a != b)
        .count())
}

pub fn reverse(x: &DnaString) -> DnaString {
    x.bases().iter().rev().copied().collect::<Vec<_>>().into()
}

pub fn complement(x: &DnaString) -> DnaString {
    x.bases()
        .iter()
        .map(|b| b.complement())
        .collect::<Vec<_>>()
        .into()
}

pub fn reverse_complement(x: &DnaString) -> DnaString {
    x.bases()
        .iter()
        .rev()
        .map(|b| b.complement())
        .collect::<Vec<_>>()
        .into()
}

pub fn gc_weight(x: &DnaString) -> usize {
    x.bases().iter().filter(|b| b.is_gc()).count()
}

/// GC-weight as a percentage of the length; 0 for the empty string.
pub fn gc_content(x: &DnaString) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    100.0 * gc_weight(x) as f64 / x.len() as f64
}

/// Shift correlation of two equal-length words. Bit `i` is set when the
/// suffix of `x` starting at offset `i` equals the prefix of `y` of the same
/// length.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CorrelationVector(Vec<bool>);

impl CorrelationVector {
    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for CorrelationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn correlation(x: &DnaString, y: &DnaString) -> Result<CorrelationVector> {
    same_len(x, y)?;
    let n = x.len();
    let (xs, ys) = (x.bases(), y.bases());
    Ok(CorrelationVector(
        (0..n).map(|i| xs[i..] == ys[..n - i]).collect(),
    ))
}

/// Edit distance with unit-cost insertion, deletion and substitution.
pub fn levenshtein(x: &DnaString, y: &DnaString) -> usize {
    let (a, b) = (x.bases(), y.bases());
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Default unit bound for tandem-repeat search.
pub const DEFAULT_MAX_TANDEM_UNIT: usize = 4;

/// A unit immediately followed by an identical copy of itself.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct TandemRepeat {
    /// 1-based position of the first copy.
    pub start: usize,
    pub unit_length: usize,
    pub unit: DnaString,
}

/// All adjacent duplications with unit length up to `max_unit`, ordered by
/// start position then unit length. Recurrences separated by other bases are
/// not reported.
pub fn find_tandem_repeats(x: &DnaString, max_unit: usize) -> Vec<TandemRepeat> {
    let s = x.bases();
    let mut out = Vec::new();
    for start in 0..s.len() {
        for unit in 1..=max_unit {
            if start + 2 * unit > s.len() {
                break;
            }
            if s[start..start + unit] == s[start + unit..start + 2 * unit] {
                out.push(TandemRepeat {
                    start: start + 1,
                    unit_length: unit,
                    unit: s[start..start + unit].to_vec().into(),
                });
            }
        }
    }
    out
}

/// True when the reverse complement of `x` does not appear anywhere in `z`
/// followed by `y`.
pub fn fold_safe(x: &DnaString, z: &DnaString, y: &DnaString) -> bool {
    !z.concat(y).contains(&reverse_complement(x))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairVariant {
    Hamming,
    Reverse,
    #[serde(rename = "rc")]
    ReverseComplement,
}

/// Whether `x = y` pairs take part in a pairwise minimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelfPairs {
    Include,
    Exclude,
}

/// Common length of a non-empty code.
pub fn code_length(code: &[DnaString]) -> Result<usize> {
    let first = code.first().ok_or(MetricsError::EmptyCode)?.len();
    if let Some(w) = code.iter().find(|w| w.len() != first) {
        return Err(MetricsError::MixedLengths(first, w.len()));
    }
    Ok(first)
}

/// Minimum of `H(x, y)`, `H(x^R, y)` or `H(x^RC, y)` over ordered pairs.
/// The plain Hamming variant always skips `x = y`.
pub fn min_pairwise(
    code: &[DnaString],
    variant: PairVariant,
    self_pairs: SelfPairs,
) -> Result<usize> {
    code_length(code)?;
    let transformed: Vec<DnaString> = code
        .iter()
        .map(|x| match variant {
            PairVariant::Hamming => x.clone(),
            PairVariant::Reverse => reverse(x),
            PairVariant::ReverseComplement => reverse_complement(x),
        })
        .collect();
    let skip_self = variant == PairVariant::Hamming || self_pairs == SelfPairs::Exclude;
    let mut best: Option<usize> = None;
    for (i, tx) in transformed.iter().enumerate() {
        for (j, y) in code.iter().enumerate() {
            if skip_self && i == j {
                continue;
            }
            let d = hamming(tx, y)?;
            best = Some(best.map_or(d, |b| b.min(d)));
        }
    }
    best.ok_or(MetricsError::NoPairs)
}

/// Hamming distance of a word to its own reverse complement.
pub fn self_rc_distance(x: &DnaString) -> usize {
    let rc = reverse_complement(x);
    x.bases()
        .iter()
        .zip(rc.bases())
        .filter(|(a, b)| a != b)
        .count()
}

/// Length of the longest single-base run.
pub fn longest_run(x: &DnaString) -> usize {
    let mut best = 0;
    let mut run = 0;
    let mut last: Option<Base> = None;
    for &b in x.bases() {
        run = if last == Some(b) { run + 1 } else { 1 };
        last = Some(b);
        best = best.max(run);
    }
    best
}
