//! Gold-standard data, precision/recall/F-measure, and threshold sweeps.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcher::{self, MatchResult};
use crate::similarity::{ComponentMatrix, SimilarityWeights};
use crate::word::Word;

/// Gold OOV → IV mappings: unique keys, exactly one target per OOV word,
/// never the word itself. Kept sorted so iteration order is stable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldDataset {
    mappings: BTreeMap<Word, Word>,
}

/// Lines the gold loader dropped, by reason. These are data hygiene
/// warnings, not errors; counts let the caller report them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GoldLoadReport {
    pub kept: usize,
    /// OOV identical to its target.
    pub self_mappings_skipped: usize,
    /// Source or target containing whitespace (one-token-to-one-token only).
    pub multi_token_skipped: usize,
    /// Repeated OOV word; the first mapping wins.
    pub duplicates_skipped: usize,
}

impl GoldDataset {
    /// Builds a dataset from (oov, iv) pairs, applying the same hygiene
    /// rules as the TSV loader.
    pub fn from_pairs<I>(pairs: I) -> (GoldDataset, GoldLoadReport)
    where
        I: IntoIterator<Item = (Word, Word)>,
    {
        let mut mappings = BTreeMap::new();
        let mut report = GoldLoadReport::default();
        for (oov, iv) in pairs {
            if oov == iv {
                report.self_mappings_skipped += 1;
                continue;
            }
            if oov.as_str().contains(char::is_whitespace)
                || iv.as_str().contains(char::is_whitespace)
            {
                report.multi_token_skipped += 1;
                continue;
            }
            if mappings.contains_key(&oov) {
                report.duplicates_skipped += 1;
                continue;
            }
            mappings.insert(oov, iv);
            report.kept += 1;
        }
        (GoldDataset { mappings }, report)
    }

    pub fn len(&self) -> usize {
        self.mappings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mappings.is_empty()
    }

    pub fn target(&self, oov: &Word) -> Option<&Word> {
        self.mappings.get(oov)
    }

    /// OOV words in ascending order.
    pub fn oov_words(&self) -> Vec<Word> {
        self.mappings.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Word)> {
        self.mappings.iter()
    }

    /// The sub-dataset for exactly `words`; every word must be present.
    pub fn subset(&self, words: &[Word]) -> Result<GoldDataset> {
        let mut mappings = BTreeMap::new();
        for word in words {
            let target = self
                .mappings
                .get(word)
                .ok_or_else(|| Error::invalid(format!("{word:?} is not in the gold data")))?;
            mappings.insert(word.clone(), target.clone());
        }
        Ok(GoldDataset { mappings })
    }
}

/// Reads gold `oov<TAB>iv` lines. Malformed lines (field count, empty
/// fields) are hard errors; self-mappings, multi-token mappings, and
/// duplicate OOV words are skipped and counted.
pub fn read_gold_tsv<R: BufRead>(
    reader: R,
    source_name: &str,
) -> Result<(GoldDataset, GoldLoadReport)> {
    let mut pairs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(source_name, e))?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::parse(
                source_name,
                line_no,
                format!("expected 2 tab-separated fields, found {}", fields.len()),
            ));
        }
        let oov = Word::new(fields[0])
            .map_err(|e| Error::parse(source_name, line_no, e.to_string()))?;
        let iv = Word::new(fields[1])
            .map_err(|e| Error::parse(source_name, line_no, e.to_string()))?;
        pairs.push((oov, iv));
    }
    Ok(GoldDataset::from_pairs(pairs))
}

/// Normalization quality against a gold dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    /// OOV words with a non-empty match list.
    pub predicted: usize,
    /// Predicted words whose rank-1 match equals the gold target.
    pub correct: usize,
    pub gold_total: usize,
}

pub(crate) fn report_from_counts(predicted: usize, correct: usize, gold_total: usize) -> EvalReport {
    let precision = if predicted == 0 {
        0.0
    } else {
        correct as f64 / predicted as f64
    };
    let recall = if gold_total == 0 {
        0.0
    } else {
        correct as f64 / gold_total as f64
    };
    let f_measure = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    EvalReport {
        precision,
        recall,
        f_measure,
        predicted,
        correct,
        gold_total,
    }
}

/// Scores a K=1 match result against gold. Predicted OOV words outside the
/// gold set count against precision; gold words the result never predicted
/// count against recall.
pub fn evaluate(result: &MatchResult, gold: &GoldDataset) -> Result<EvalReport> {
    if result.k() > 1 {
        return Err(Error::invalid(format!(
            "evaluation is defined for K=1 results, got K={}",
            result.k()
        )));
    }
    let mut predicted = 0usize;
    let mut correct = 0usize;
    for (oov, matches) in result.entries() {
        let Some(best) = matches.first() else {
            continue;
        };
        predicted += 1;
        if gold.target(oov) == Some(&best.word) {
            correct += 1;
        }
    }
    let report = report_from_counts(predicted, correct, gold.len());
    debug_assert!(report.correct <= report.predicted.min(report.gold_total));
    Ok(report)
}

/// Gold target of each matrix row, by row index.
pub(crate) fn row_targets<'g>(oov_words: &[Word], gold: &'g GoldDataset) -> Vec<Option<&'g Word>> {
    oov_words.iter().map(|w| gold.target(w)).collect()
}

/// One point of a threshold sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub threshold: f64,
    pub report: EvalReport,
}

/// Evaluates K=1 matching at each threshold in `t_values` (strictly
/// ascending, each inside (0,1)) under fixed weights.
///
/// Each row is ranked once; thresholds then only gate the row's best score,
/// which is exactly what `match_all` at K=1 would conclude. No string or
/// phonetic kernel runs here.
pub fn threshold_sweep(
    matrix: &ComponentMatrix,
    weights: &SimilarityWeights,
    gold: &GoldDataset,
    t_values: &[f64],
) -> Result<Vec<SweepPoint>> {
    validate_thresholds(t_values)?;
    let targets = row_targets(matrix.oov_words(), gold);
    let ranked = rank_rows(matrix, weights);

    Ok(t_values
        .iter()
        .map(|&threshold| {
            let mut predicted = 0usize;
            let mut correct = 0usize;
            for (row_idx, &(best_idx, best_score)) in ranked.iter().enumerate() {
                if best_score >= threshold {
                    predicted += 1;
                    if targets[row_idx] == Some(&matrix.iv_words()[best_idx]) {
                        correct += 1;
                    }
                }
            }
            SweepPoint {
                threshold,
                report: report_from_counts(predicted, correct, gold.len()),
            }
        })
        .collect())
}

/// Rank-1 candidate (index and score) for every row, in parallel.
pub(crate) fn rank_rows(matrix: &ComponentMatrix, weights: &SimilarityWeights) -> Vec<(usize, f64)> {
    use rayon::prelude::*;
    (0..matrix.n_oov())
        .into_par_iter()
        .map(|j| matcher::best_in_row(matrix.row(j), matrix.iv_words(), weights))
        .collect()
}

pub(crate) fn validate_thresholds(t_values: &[f64]) -> Result<()> {
    if t_values.is_empty() {
        return Err(Error::invalid("threshold list is empty"));
    }
    for pair in t_values.windows(2) {
        if !(pair[0] < pair[1]) {
            return Err(Error::invalid(format!(
                "thresholds not strictly ascending at {} .. {}",
                pair[0], pair[1]
            )));
        }
    }
    for &t in t_values {
        if !t.is_finite() || t <= 0.0 || t >= 1.0 {
            return Err(Error::invalid(format!("threshold {t} outside (0, 1)")));
        }
    }
    Ok(())
}

/// Writes sweep points as CSV with a fixed header.
pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], mut out: W) -> io::Result<()> {
    writeln!(out, "t,precision,recall,f_measure,predicted,correct,gold_total")?;
    for p in points {
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{},{},{}",
            p.threshold,
            p.report.precision,
            p.report.recall,
            p.report.f_measure,
            p.report.predicted,
            p.report.correct,
            p.report.gold_total
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::EmbeddingStore;
    use crate::matcher::{match_all, MatchParams};
    use crate::similarity::build_component_matrix;
    use std::io::Cursor;

    fn w(s: &str) -> Word {
        Word::new(s).unwrap()
    }

    fn gold_of(pairs: &[(&str, &str)]) -> GoldDataset {
        let (g, _) = GoldDataset::from_pairs(
            pairs
                .iter()
                .map(|&(a, b)| (w(a), w(b)))
                .collect::<Vec<_>>(),
        );
        g
    }

    fn result_of(entries: &[(&str, Option<(&str, f64)>)]) -> MatchResult {
        let text: String = entries
            .iter()
            .filter_map(|(oov, m)| m.map(|(iv, s)| format!("{oov}\t{iv}\t{s}\n")))
            .collect();
        crate::matcher::read_predictions_tsv(Cursor::new(text), "mem").unwrap()
    }

    #[test]
    fn hygiene_rules_applied() {
        let (g, rep) = GoldDataset::from_pairs(vec![
            (w("nite"), w("night")),
            (w("ok"), w("ok")),
            (w("sum1"), w("some one")),
            (w("nite"), w("nit")),
            (w("luv"), w("love")),
        ]);
        assert_eq!(g.len(), 2);
        assert_eq!(rep.kept, 2);
        assert_eq!(rep.self_mappings_skipped, 1);
        assert_eq!(rep.multi_token_skipped, 1);
        assert_eq!(rep.duplicates_skipped, 1);
        assert_eq!(g.target(&w("nite")), Some(&w("night")));
    }

    #[test]
    fn gold_tsv_parses_and_counts() {
        let text = "nite\tnight\nLUV\tLOVE\n\nbad\tbad\n";
        let (g, rep) = read_gold_tsv(Cursor::new(text), "gold.tsv").unwrap();
        assert_eq!(g.len(), 2);
        assert!(g.target(&w("luv")).is_some());
        assert_eq!(rep.self_mappings_skipped, 1);

        let err = read_gold_tsv(Cursor::new("a\n"), "gold.tsv").unwrap_err();
        assert!(err.to_string().contains("gold.tsv:1"));
        let err = read_gold_tsv(Cursor::new("a\tb\tc\n"), "gold.tsv").unwrap_err();
        assert!(err.to_string().contains("expected 2"));
    }

    #[test]
    fn subset_is_strict() {
        let g = gold_of(&[("a", "x"), ("b", "y")]);
        let sub = g.subset(&[w("b")]).unwrap();
        assert_eq!(sub.len(), 1);
        assert!(g.subset(&[w("zz")]).is_err());
    }

    #[test]
    fn known_counts() {
        // 3 predicted, 2 correct, 4 gold.
        let gold = gold_of(&[("a", "w"), ("b", "x"), ("c", "y"), ("d", "z")]);
        let result = result_of(&[
            ("a", Some(("w", 0.9))),
            ("b", Some(("x", 0.9))),
            ("c", Some(("wrong", 0.9))),
            ("d", None),
        ]);
        let rep = evaluate(&result, &gold).unwrap();
        assert_eq!(rep.predicted, 3);
        assert_eq!(rep.correct, 2);
        assert_eq!(rep.gold_total, 4);
        assert!((rep.precision - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(rep.recall, 0.5);
        assert!((rep.f_measure - 4.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_and_empty_predictions() {
        let gold = gold_of(&[("a", "x"), ("b", "y")]);
        let perfect = result_of(&[("a", Some(("x", 1.0))), ("b", Some(("y", 1.0)))]);
        let rep = evaluate(&perfect, &gold).unwrap();
        assert_eq!((rep.precision, rep.recall, rep.f_measure), (1.0, 1.0, 1.0));

        let empty = result_of(&[("a", None), ("b", None)]);
        let rep = evaluate(&empty, &gold).unwrap();
        assert_eq!((rep.precision, rep.recall, rep.f_measure), (0.0, 0.0, 0.0));
        assert_eq!(rep.predicted, 0);
    }

    #[test]
    fn k_above_one_is_rejected() {
        let gold = gold_of(&[("a", "x")]);
        let two = crate::matcher::read_predictions_tsv(
            Cursor::new("a\tx\t0.9\na\ty\t0.8\n"),
            "mem",
        )
        .unwrap();
        assert!(evaluate(&two, &gold).is_err());
    }

    #[test]
    fn prediction_outside_gold_hurts_precision_only() {
        let gold = gold_of(&[("a", "x")]);
        let result = result_of(&[("a", Some(("x", 0.9))), ("stray", Some(("x", 0.9)))]);
        let rep = evaluate(&result, &gold).unwrap();
        assert_eq!(rep.predicted, 2);
        assert_eq!(rep.correct, 1);
        assert_eq!(rep.recall, 1.0);
        assert_eq!(rep.precision, 0.5);
    }

    fn sweep_fixture() -> (ComponentMatrix, GoldDataset) {
        let store = EmbeddingStore::new(2).unwrap();
        let oov = [w("nite"), w("luv"), w("thx"), w("qqq")];
        let iv = [w("night"), w("love"), w("thanks"), w("nut")];
        let m = build_component_matrix(&oov, &iv, &store).unwrap();
        let gold = gold_of(&[("nite", "night"), ("luv", "love"), ("thx", "thanks")]);
        (m, gold)
    }

    #[test]
    fn sweep_matches_direct_evaluation() {
        let (m, gold) = sweep_fixture();
        let wts = SimilarityWeights::new(0.0, 1.0, 1.0).unwrap();
        let ts = [0.1, 0.3, 0.5, 0.7, 0.9];
        let points = threshold_sweep(&m, &wts, &gold, &ts).unwrap();
        assert_eq!(points.len(), ts.len());
        for p in &points {
            let params = MatchParams::new(wts, p.threshold, 1).unwrap();
            let direct = evaluate(&match_all(&m, &params), &gold).unwrap();
            assert_eq!(p.report, direct, "t={}", p.threshold);
        }
        // Thresholding can only drop predictions as t rises.
        for pair in points.windows(2) {
            assert!(pair[1].report.predicted <= pair[0].report.predicted);
            assert!(pair[1].report.recall <= pair[0].report.recall);
        }
    }

    #[test]
    fn sweep_validates_thresholds() {
        let (m, gold) = sweep_fixture();
        let wts = SimilarityWeights::new(0.0, 1.0, 1.0).unwrap();
        assert!(threshold_sweep(&m, &wts, &gold, &[]).is_err());
        assert!(threshold_sweep(&m, &wts, &gold, &[0.5, 0.5]).is_err());
        assert!(threshold_sweep(&m, &wts, &gold, &[0.5, 0.2]).is_err());
        assert!(threshold_sweep(&m, &wts, &gold, &[0.0, 0.5]).is_err());
        assert!(threshold_sweep(&m, &wts, &gold, &[0.5, 1.0]).is_err());
    }

    #[test]
    fn csv_format() {
        let points = [SweepPoint {
            threshold: 0.1,
            report: report_from_counts(2, 1, 4),
        }];
        let mut buf = Vec::new();
        write_sweep_csv(&points, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,precision,recall,f_measure,predicted,correct,gold_total"
        );
        assert_eq!(lines.next().unwrap(), "0.1,0.500000,0.250000,0.333333,2,1,4");
    }

    #[test]
    fn f_is_harmonic_mean() {
        let rep = report_from_counts(7, 3, 9);
        let expect = 2.0 * rep.precision * rep.recall / (rep.precision + rep.recall);
        assert!((rep.f_measure - expect).abs() <= 1e-12);
    }
}
