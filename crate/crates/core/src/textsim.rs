//! String kernels: Levenshtein distance, longest-common-subsequence length,
//! and the normalized similarity built from them.
//!
//! Everything here counts Unicode scalar values. Inputs are expected to be
//! lowercase-normalized at ingestion; these kernels do not fold case.

use crate::error::{Error, Result};
use crate::probe;

/// Levenshtein distance (unit-cost insert/delete/substitute).
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_units(&a, &b)
}

/// Length of the longest common subsequence.
pub fn lcs_len(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    lcs_len_units(&a, &b)
}

/// Normalized string similarity:
///
/// ```text
/// lcs_len(a, b) / (min(|a|, |b|) + levenshtein(a, b))
/// ```
///
/// In (0, 1]; equals 1 exactly when `a == b`. Both inputs must be non-empty.
pub fn string_similarity(a: &str, b: &str) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("string similarity requires non-empty inputs"));
    }
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    Ok(string_similarity_units(&a, &b))
}

/// Kernel entry points over pre-decoded scalar values. The pairwise cache
/// builder uses these to decode each word once, not once per pair.
pub(crate) fn levenshtein_units(a: &[char], b: &[char]) -> usize {
    probe::count_string_kernel();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    // Single-row DP over the shorter string.
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut row: Vec<usize> = (0..=short.len()).collect();
    for (i, &cl) in long.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, &cs) in short.iter().enumerate() {
            let sub = if cl == cs { diag } else { diag + 1 };
            diag = row[j + 1];
            row[j + 1] = sub.min(row[j] + 1).min(diag + 1);
        }
    }
    row[short.len()]
}

pub(crate) fn lcs_len_units(a: &[char], b: &[char]) -> usize {
    probe::count_string_kernel();
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut prev = vec![0usize; short.len() + 1];
    let mut cur = vec![0usize; short.len() + 1];
    for &cl in long {
        for (j, &cs) in short.iter().enumerate() {
            cur[j + 1] = if cl == cs {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[short.len()]
}

pub(crate) fn string_similarity_units(a: &[char], b: &[char]) -> f64 {
    debug_assert!(!a.is_empty() && !b.is_empty());
    let lcs = lcs_len_units(a, b) as f64;
    let dist = levenshtein_units(a, b) as f64;
    let min_len = a.len().min(b.len()) as f64;
    lcs / (min_len + dist)
}
