//! Thresholded K-nearest-neighbor matching of OOV words onto the IV
//! lexicon, plus application of the resulting mappings to token streams.

use std::collections::{BTreeSet, HashMap};
use std::io::{self, BufRead, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::similarity::{combine, ComponentMatrix, ComponentTriple, SimilarityWeights};
use crate::word::Word;

/// Matching configuration: signal weights, minimum score, and list length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchParams {
    weights: SimilarityWeights,
    threshold: f64,
    k: usize,
}

impl MatchParams {
    /// `threshold` must lie strictly inside (0, 1); `k` must be at least 1.
    pub fn new(weights: SimilarityWeights, threshold: f64, k: usize) -> Result<MatchParams> {
        if !threshold.is_finite() || threshold <= 0.0 || threshold >= 1.0 {
            return Err(Error::invalid(format!(
                "threshold {threshold} outside (0, 1)"
            )));
        }
        if k == 0 {
            return Err(Error::invalid("K must be at least 1"));
        }
        Ok(MatchParams {
            weights,
            threshold,
            k,
        })
    }

    pub fn weights(&self) -> &SimilarityWeights {
        &self.weights
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// One candidate mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredMatch {
    pub word: Word,
    pub score: f64,
}

/// Matches for every OOV word, in row order. Words that cleared nothing are
/// retained with an empty list — "will not be matched" is an explicit
/// outcome, not an absence.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    k: usize,
    entries: Vec<(Word, Vec<ScoredMatch>)>,
}

impl MatchResult {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &[(Word, Vec<ScoredMatch>)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of OOV words with at least one match.
    pub fn matched_count(&self) -> usize {
        self.entries.iter().filter(|(_, m)| !m.is_empty()).count()
    }

    /// OOV → rank-1 IV mapping for words that matched.
    pub fn rank1_map(&self) -> HashMap<Word, Word> {
        self.entries
            .iter()
            .filter_map(|(oov, m)| m.first().map(|best| (oov.clone(), best.word.clone())))
            .collect()
    }
}

/// Best candidate in a row under `weights`, before thresholding: highest
/// combined score, ties broken by ascending IV word. This is the K=1 rule
/// factored out so the tuner and sweep rank each row once per weight
/// setting instead of once per threshold.
pub(crate) fn best_in_row(
    row: &[ComponentTriple],
    iv_index: &[Word],
    weights: &SimilarityWeights,
) -> (usize, f64) {
    debug_assert_eq!(row.len(), iv_index.len());
    debug_assert!(!row.is_empty());
    let mut best_idx = 0usize;
    let mut best_score = combine(&row[0], weights);
    for (idx, triple) in row.iter().enumerate().skip(1) {
        let score = combine(triple, weights);
        if score > best_score || (score == best_score && iv_index[idx] < iv_index[best_idx]) {
            best_idx = idx;
            best_score = score;
        }
    }
    (best_idx, best_score)
}

/// Matches one OOV row: scores every IV candidate, keeps those at or above
/// the threshold, sorts descending by score (ties by ascending IV word),
/// and truncates to K.
pub fn match_word(
    row: &[ComponentTriple],
    iv_index: &[Word],
    params: &MatchParams,
) -> Vec<ScoredMatch> {
    assert_eq!(
        row.len(),
        iv_index.len(),
        "row and IV index length mismatch"
    );
    let mut kept: Vec<(usize, f64)> = row
        .iter()
        .enumerate()
        .map(|(idx, triple)| (idx, combine(triple, params.weights())))
        .filter(|&(_, score)| score >= params.threshold())
        .collect();
    kept.sort_unstable_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then_with(|| iv_index[a.0].cmp(&iv_index[b.0]))
    });
    kept.truncate(params.k());
    kept.into_iter()
        .map(|(idx, score)| ScoredMatch {
            word: iv_index[idx].clone(),
            score,
        })
        .collect()
}

/// Matches every OOV row of the matrix. Rows are processed in parallel and
/// assembled in row order, so the result is schedule-independent.
pub fn match_all(matrix: &ComponentMatrix, params: &MatchParams) -> MatchResult {
    let iv_index = matrix.iv_words();
    let entries: Vec<(Word, Vec<ScoredMatch>)> = matrix
        .oov_words()
        .par_iter()
        .enumerate()
        .map(|(j, oov)| (oov.clone(), match_word(matrix.row(j), iv_index, params)))
        .collect();
    MatchResult {
        k: params.k(),
        entries,
    }
}

/// Rewrites a token stream: IV tokens and unmatched tokens pass through,
/// matched OOV tokens are replaced by their rank-1 IV word.
pub fn apply_normalization(
    tokens: &[Word],
    iv_set: &BTreeSet<Word>,
    result: &MatchResult,
) -> Vec<Word> {
    let map = result.rank1_map();
    tokens
        .iter()
        .map(|tok| {
            if iv_set.contains(tok) {
                tok.clone()
            } else {
                map.get(tok).unwrap_or(tok).clone()
            }
        })
        .collect()
}

/// Writes matched pairs as `oov<TAB>iv<TAB>score` with six decimal places.
/// Unmatched OOV words are omitted.
pub fn write_predictions_tsv<W: Write>(result: &MatchResult, mut out: W) -> io::Result<()> {
    for (oov, matches) in &result.entries {
        for m in matches {
            writeln!(out, "{}\t{}\t{:.6}", oov, m.word, m.score)?;
        }
    }
    Ok(())
}

/// Reads a predictions TSV back. Lines for the same OOV word accumulate in
/// order, so a K>1 file round-trips with its K (which evaluation will then
/// reject). A duplicate IV within one OOV's list is malformed.
pub fn read_predictions_tsv<R: BufRead>(reader: R, source_name: &str) -> Result<MatchResult> {
    let mut entries: Vec<(Word, Vec<ScoredMatch>)> = Vec::new();
    let mut index: HashMap<Word, usize> = HashMap::new();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(source_name, e))?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                source_name,
                line_no,
                format!("expected 3 tab-separated fields, found {}", fields.len()),
            ));
        }
        let oov = Word::new(fields[0])
            .map_err(|e| Error::parse(source_name, line_no, e.to_string()))?;
        let iv = Word::new(fields[1])
            .map_err(|e| Error::parse(source_name, line_no, e.to_string()))?;
        let score: f64 = fields[2]
            .parse()
            .map_err(|_| Error::parse(source_name, line_no, format!("bad score {:?}", fields[2])))?;
        if !score.is_finite() {
            return Err(Error::parse(
                source_name,
                line_no,
                format!("non-finite score {:?}", fields[2]),
            ));
        }

        let slot = *index.entry(oov.clone()).or_insert_with(|| {
            entries.push((oov, Vec::new()));
            entries.len() - 1
        });
        if entries[slot].1.iter().any(|m| m.word == iv) {
            return Err(Error::parse(
                source_name,
                line_no,
                format!("duplicate mapping for {:?} -> {:?}", entries[slot].0, iv),
            ));
        }
        entries[slot].1.push(ScoredMatch { word: iv, score });
    }

    let k = entries.iter().map(|(_, m)| m.len()).max().unwrap_or(1).max(1);
    Ok(MatchResult { k, entries })
}
