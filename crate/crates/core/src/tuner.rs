//! Parameter tuning: exhaustive grid search over the three signal weights
//! and the match threshold, a hierarchical refinement pass, and the
//! experiment protocols used to report averaged results.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluation::{self, EvalReport, GoldDataset};
use crate::matcher::{self, MatchParams};
use crate::similarity::{ComponentMatrix, SimilarityWeights};
use crate::word::Word;

/// Candidate values for the search: one ascending list shared by the three
/// weight axes (in [0,1], at least one positive) and one ascending list of
/// thresholds (inside (0,1)).
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    weight_values: Vec<f64>,
    threshold_values: Vec<f64>,
}

/// Decimal grid values accumulate float noise (3 * 0.1 != 0.3); snap to 12
/// decimals so grid points compare clean against literals and file output.
fn snap(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

impl GridSpec {
    pub fn from_values(weight_values: Vec<f64>, threshold_values: Vec<f64>) -> Result<GridSpec> {
        if weight_values.is_empty() {
            return Err(Error::invalid("weight value list is empty"));
        }
        for pair in weight_values.windows(2) {
            if !(pair[0] < pair[1]) {
                return Err(Error::invalid(format!(
                    "weight values not strictly ascending at {} .. {}",
                    pair[0], pair[1]
                )));
            }
        }
        for &v in &weight_values {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!("weight value {v} outside [0, 1]")));
            }
        }
        if weight_values.iter().all(|&v| v == 0.0) {
            return Err(Error::invalid("weight grid needs a positive value"));
        }
        evaluation::validate_thresholds(&threshold_values)?;
        Ok(GridSpec {
            weight_values,
            threshold_values,
        })
    }

    /// Weights 0.0..=1.0 and thresholds 0.1..=0.9, both stepped by `step`.
    pub fn with_step(step: f64) -> Result<GridSpec> {
        if !step.is_finite() || step <= 0.0 || step > 1.0 {
            return Err(Error::invalid(format!("grid step {step} outside (0, 1]")));
        }
        let series = |start: f64, end: f64| {
            let mut values = Vec::new();
            for k in 0.. {
                let v = snap(start + step * k as f64);
                if v > end {
                    break;
                }
                values.push(v);
            }
            values
        };
        GridSpec::from_values(series(0.0, 1.0), series(0.1, 0.9))
    }

    pub fn weight_values(&self) -> &[f64] {
        &self.weight_values
    }

    pub fn threshold_values(&self) -> &[f64] {
        &self.threshold_values
    }

    /// Points a search over this grid evaluates: every weight triple except
    /// the all-zero one, crossed with every threshold.
    pub fn point_count(&self) -> u64 {
        let w = self.weight_values.len() as u64;
        let zero_triples = u64::from(self.weight_values.contains(&0.0));
        let t = self.threshold_values.len() as u64;
        (w * w * w - zero_triples) * t
    }
}

impl Default for GridSpec {
    /// The standard coarse grid: step 0.1 on every axis.
    fn default() -> GridSpec {
        GridSpec::with_step(0.1).expect("0.1 is a valid step")
    }
}

/// Grid-search outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct TunedParams {
    pub weights: SimilarityWeights,
    pub threshold: f64,
    /// Evaluation of these parameters on the matrix they were tuned on.
    /// Re-running the matcher and evaluator with the tuned parameters
    /// reproduces this report bit for bit.
    pub training_report: EvalReport,
    /// Parameter points evaluated to find this result (cumulative across
    /// refinement passes).
    pub evaluated_points: u64,
}

impl TunedParams {
    pub fn training_f(&self) -> f64 {
        self.training_report.f_measure
    }
}

/// The winning point of one search pass, before re-derivation of its full
/// training report.
struct SearchHit {
    contextual: f64,
    phonetic: f64,
    string: f64,
    threshold: f64,
    f_measure: f64,
    points: u64,
}

/// Exhaustive scan over per-axis value lists. Scan order is contextual
/// weight outer, then phonetic, then string, then threshold, each list
/// ascending; the first point reaching the maximum F wins. All-zero weight
/// triples are skipped. Returns `None` only when every triple is all-zero.
///
/// Work is split across weight triples. For each triple every row is ranked
/// once (the K=1 winner under those weights does not depend on t), then all
/// thresholds are scored by gating each row's best score. Only cached
/// components are recombined; no kernel runs here.
fn search(
    matrix: &ComponentMatrix,
    gold: &GoldDataset,
    wc_values: &[f64],
    wp_values: &[f64],
    ws_values: &[f64],
    t_values: &[f64],
) -> Option<SearchHit> {
    let targets = evaluation::row_targets(matrix.oov_words(), gold);
    let gold_total = gold.len();
    let iv_words = matrix.iv_words();

    let mut triples = Vec::new();
    for &wc in wc_values {
        for &wp in wp_values {
            for &ws in ws_values {
                if wc == 0.0 && wp == 0.0 && ws == 0.0 {
                    continue;
                }
                triples.push((wc, wp, ws));
            }
        }
    }
    if triples.is_empty() {
        return None;
    }

    #[derive(Clone, Copy)]
    struct Candidate {
        f_measure: f64,
        order: usize,
        t_idx: usize,
    }

    let best = triples
        .par_iter()
        .enumerate()
        .map(|(order, &(wc, wp, ws))| {
            let weights =
                SimilarityWeights::new(wc, wp, ws).expect("grid values are validated");
            let mut predicted = vec![0usize; t_values.len()];
            let mut correct = vec![0usize; t_values.len()];
            for (row_idx, target) in targets.iter().enumerate() {
                let (best_idx, best_score) =
                    matcher::best_in_row(matrix.row(row_idx), iv_words, &weights);
                // Thresholds are ascending: the row is predicted for every
                // t up to the cut.
                let cut = t_values.partition_point(|&t| t <= best_score);
                if cut == 0 {
                    continue;
                }
                let is_correct = *target == Some(&iv_words[best_idx]);
                for i in 0..cut {
                    predicted[i] += 1;
                    if is_correct {
                        correct[i] += 1;
                    }
                }
            }
            let mut best = Candidate {
                f_measure: -1.0,
                order,
                t_idx: 0,
            };
            for (t_idx, (&p, &c)) in predicted.iter().zip(&correct).enumerate() {
                let f = evaluation::report_from_counts(p, c, gold_total).f_measure;
                if f > best.f_measure {
                    best = Candidate {
                        f_measure: f,
                        order,
                        t_idx,
                    };
                }
            }
            best
        })
        // Max F; ties go to the earliest point in scan order. The tie-break
        // is total, so this reduction is associative and deterministic
        // under any parallel split.
        .reduce_with(|a, b| {
            if b.f_measure > a.f_measure || (b.f_measure == a.f_measure && b.order < a.order) {
                b
            } else {
                a
            }
        })
        .expect("triples is non-empty");

    let (wc, wp, ws) = triples[best.order];
    Some(SearchHit {
        contextual: wc,
        phonetic: wp,
        string: ws,
        threshold: t_values[best.t_idx],
        f_measure: best.f_measure,
        points: triples.len() as u64 * t_values.len() as u64,
    })
}

/// Re-derives the full training report for a winning point through the
/// production matcher path, which must agree with the search's own count.
fn finish(
    matrix: &ComponentMatrix,
    gold: &GoldDataset,
    hit: SearchHit,
    prior_points: u64,
) -> Result<TunedParams> {
    let weights = SimilarityWeights::new(hit.contextual, hit.phonetic, hit.string)?;
    let params = MatchParams::new(weights, hit.threshold, 1)?;
    let result = matcher::match_all(matrix, &params);
    let training_report = evaluation::evaluate(&result, gold)?;
    debug_assert_eq!(training_report.f_measure, hit.f_measure);
    Ok(TunedParams {
        weights,
        threshold: hit.threshold,
        training_report,
        evaluated_points: prior_points + hit.points,
    })
}

/// Exhaustive search of `grid` (same value list on all three weight axes)
/// for the parameters maximizing F-measure on `gold` at K=1.
///
/// Every gold OOV word must be a row of the matrix; extra rows act as
/// distractors, counted against precision when they match.
pub fn grid_search(
    matrix: &ComponentMatrix,
    gold: &GoldDataset,
    grid: &GridSpec,
) -> Result<TunedParams> {
    if gold.is_empty() {
        return Err(Error::invalid("gold dataset is empty"));
    }
    let rows: HashSet<&str> = matrix.oov_words().iter().map(Word::as_str).collect();
    for (oov, _) in gold.iter() {
        if !rows.contains(oov.as_str()) {
            return Err(Error::invalid(format!(
                "gold word {oov:?} has no row in the component matrix"
            )));
        }
    }
    let hit = search(
        matrix,
        gold,
        &grid.weight_values,
        &grid.weight_values,
        &grid.weight_values,
        &grid.threshold_values,
    )
    .expect("a valid grid has a positive weight value");
    finish(matrix, gold, hit, 0)
}

/// Values `center ± 0.05` in steps of 0.01, on the centi-integer lattice to
/// keep the endpoints exact, clipped to `[lo, hi]` (given in centi-units).
fn centi_neighborhood(center: f64, lo: i64, hi: i64) -> Vec<f64> {
    let c = (center * 100.0).round() as i64;
    ((c - 5).max(lo)..=(c + 5).min(hi))
        .map(|k| k as f64 / 100.0)
        .collect()
}

/// Hierarchical refinement: a finer search (step 0.01) inside ±0.05 of each
/// coarse coordinate, weights clipped to [0,1] and threshold to (0,1). The
/// coarse point lies inside the refined grid, so F never decreases; the
/// coarse result is kept unless strictly beaten. `evaluated_points`
/// accumulates across the two passes.
pub fn refine(
    matrix: &ComponentMatrix,
    gold: &GoldDataset,
    coarse: &TunedParams,
) -> Result<TunedParams> {
    let wc_values = centi_neighborhood(coarse.weights.contextual(), 0, 100);
    let wp_values = centi_neighborhood(coarse.weights.phonetic(), 0, 100);
    let ws_values = centi_neighborhood(coarse.weights.string(), 0, 100);
    let t_values = centi_neighborhood(coarse.threshold, 1, 99);

    let hit = search(matrix, gold, &wc_values, &wp_values, &ws_values, &t_values)
        .expect("refined grid contains the non-zero coarse point");
    if hit.f_measure > coarse.training_report.f_measure {
        finish(matrix, gold, hit, coarse.evaluated_points)
    } else {
        Ok(TunedParams {
            evaluated_points: coarse.evaluated_points + hit.points,
            ..coarse.clone()
        })
    }
}

/// How train/test material is drawn for [`run_experiment`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentProtocol {
    /// Two-fold cross-validation over one dataset; results averaged.
    TwoFoldCv,
    /// Five seeded runs, tuning on a random 20% and testing on the rest.
    Split20,
    /// Tune on the secondary dataset, test on the whole primary one.
    Cross,
}

impl ExperimentProtocol {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentProtocol::TwoFoldCv => "cv2",
            ExperimentProtocol::Split20 => "split20",
            ExperimentProtocol::Cross => "cross",
        }
    }
}

impl std::str::FromStr for ExperimentProtocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<ExperimentProtocol> {
        match s {
            "cv2" => Ok(ExperimentProtocol::TwoFoldCv),
            "split20" => Ok(ExperimentProtocol::Split20),
            "cross" => Ok(ExperimentProtocol::Cross),
            other => Err(Error::invalid(format!(
                "unknown protocol {other:?} (expected cv2, split20, or cross)"
            ))),
        }
    }
}

/// One train/test cycle within an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRun {
    pub run: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub w_c: f64,
    pub w_p: f64,
    pub w_s: f64,
    pub t: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub evaluated_points: u64,
}

/// Mean tuned parameters and mean test metrics over all runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub w_c: f64,
    pub w_p: f64,
    pub w_s: f64,
    pub t: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub protocol: String,
    pub seed: u64,
    pub averaged: ExperimentSummary,
    pub runs: Vec<ExperimentRun>,
}

/// Builds the component matrix for a given OOV word list. Experiments call
/// it once per train/test side; implementations usually slice a prebuilt
/// matrix rather than recomputing kernels.
pub type MatrixBuilder<'a> = dyn Fn(&[Word]) -> Result<ComponentMatrix> + Sync + 'a;

fn execute_run(
    run: usize,
    train_gold: &GoldDataset,
    test_gold: &GoldDataset,
    matrix_builder: &MatrixBuilder<'_>,
    grid: &GridSpec,
) -> Result<ExperimentRun> {
    let train_words = train_gold.oov_words();
    let test_words = test_gold.oov_words();
    let train_matrix = matrix_builder(&train_words)?;
    let tuned = grid_search(&train_matrix, train_gold, grid)?;

    let test_matrix = matrix_builder(&test_words)?;
    let params = MatchParams::new(tuned.weights, tuned.threshold, 1)?;
    let result = matcher::match_all(&test_matrix, &params);
    let report = evaluation::evaluate(&result, test_gold)?;

    Ok(ExperimentRun {
        run,
        train_size: train_gold.len(),
        test_size: test_gold.len(),
        w_c: tuned.weights.contextual(),
        w_p: tuned.weights.phonetic(),
        w_s: tuned.weights.string(),
        t: tuned.threshold,
        precision: report.precision,
        recall: report.recall,
        f_measure: report.f_measure,
        evaluated_points: tuned.evaluated_points,
    })
}

/// Runs one of the three protocols. Splits partition the gold OOV words, so
/// train and test words never overlap. Randomized protocols draw from a
/// ChaCha stream seeded with `seed`; identical inputs and seed reproduce
/// the report exactly.
pub fn run_experiment(
    protocol: ExperimentProtocol,
    primary_gold: &GoldDataset,
    secondary_gold: Option<&GoldDataset>,
    matrix_builder: &MatrixBuilder<'_>,
    grid: &GridSpec,
    seed: u64,
) -> Result<ExperimentReport> {
    if primary_gold.is_empty() {
        return Err(Error::invalid("gold dataset is empty"));
    }
    match (protocol, secondary_gold.is_some()) {
        (ExperimentProtocol::Cross, false) => {
            return Err(Error::invalid("cross protocol requires a second gold dataset"));
        }
        (ExperimentProtocol::TwoFoldCv | ExperimentProtocol::Split20, true) => {
            return Err(Error::invalid(format!(
                "protocol {} does not take a second gold dataset",
                protocol.name()
            )));
        }
        _ => {}
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut runs = Vec::new();

    match protocol {
        ExperimentProtocol::TwoFoldCv => {
            let mut keys = primary_gold.oov_words();
            if keys.len() < 2 {
                return Err(Error::invalid("two-fold split needs at least 2 mappings"));
            }
            keys.shuffle(&mut rng);
            let (half_a, half_b) = keys.split_at(keys.len() / 2);
            let fold_a = primary_gold.subset(half_a)?;
            let fold_b = primary_gold.subset(half_b)?;
            runs.push(execute_run(1, &fold_a, &fold_b, matrix_builder, grid)?);
            runs.push(execute_run(2, &fold_b, &fold_a, matrix_builder, grid)?);
        }
        ExperimentProtocol::Split20 => {
            let mut keys = primary_gold.oov_words();
            if keys.len() < 2 {
                return Err(Error::invalid("20/80 split needs at least 2 mappings"));
            }
            let train_n = ((keys.len() as f64) * 0.2).round() as usize;
            let train_n = train_n.clamp(1, keys.len() - 1);
            for run in 1..=5 {
                keys.shuffle(&mut rng);
                let (train, test) = keys.split_at(train_n);
                let train_gold = primary_gold.subset(train)?;
                let test_gold = primary_gold.subset(test)?;
                runs.push(execute_run(run, &train_gold, &test_gold, matrix_builder, grid)?);
            }
        }
        ExperimentProtocol::Cross => {
            let secondary = secondary_gold.expect("checked above");
            if secondary.is_empty() {
                return Err(Error::invalid("second gold dataset is empty"));
            }
            runs.push(execute_run(1, secondary, primary_gold, matrix_builder, grid)?);
        }
    }

    let n = runs.len() as f64;
    let mean = |f: fn(&ExperimentRun) -> f64| runs.iter().map(f).sum::<f64>() / n;
    let averaged = ExperimentSummary {
        w_c: mean(|r| r.w_c),
        w_p: mean(|r| r.w_p),
        w_s: mean(|r| r.w_s),
        t: mean(|r| r.t),
        precision: mean(|r| r.precision),
        recall: mean(|r| r.recall),
        f_measure: mean(|r| r.f_measure),
    };

    Ok(ExperimentReport {
        protocol: protocol.name().to_owned(),
        seed,
        averaged,
        runs,
    })
}

/// Serializes tuned parameters in the interchange layout consumed by
/// `params_from_json`.
pub fn tuned_params_json(params: &TunedParams, seed: u64) -> serde_json::Value {
    serde_json::json!({
        "w_c": params.weights.contextual(),
        "w_p": params.weights.phonetic(),
        "w_s": params.weights.string(),
        "t": params.threshold,
        "f_measure": params.training_report.f_measure,
        "evaluated_points": params.evaluated_points,
        "seed": seed,
    })
}

/// Reads back the weights and threshold of a tuned-parameters JSON file.
pub fn params_from_json(text: &str, source_name: &str) -> Result<(SimilarityWeights, f64)> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::data(source_name, format!("invalid JSON: {e}")))?;
    let field = |key: &str| -> Result<f64> {
        value
            .get(key)
            .and_then(serde_json::Value::as_f64)
            .ok_or_else(|| Error::data(source_name, format!("missing numeric key {key:?}")))
    };
    let weights = SimilarityWeights::new(field("w_c")?, field("w_p")?, field("w_s")?)?;
    Ok((weights, field("t")?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::EmbeddingStore;
    use crate::similarity::build_component_matrix;

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

    /// OOV words with clear string/phonetic affinity to their targets.
    fn fixture() -> (ComponentMatrix, GoldDataset) {
        let store = EmbeddingStore::new(2).unwrap();
        let oov: Vec<Word> = ["nite", "luv", "thx", "gr8", "qzk"]
            .iter()
            .map(|s| w(s))
            .collect();
        let iv: Vec<Word> = ["night", "love", "thanks", "great", "nut", "lover"]
            .iter()
            .map(|s| w(s))
            .collect();
        let m = build_component_matrix(&oov, &iv, &store).unwrap();
        let gold = gold_of(&[
            ("nite", "night"),
            ("luv", "love"),
            ("thx", "thanks"),
            ("gr8", "great"),
        ]);
        (m, gold)
    }

    #[test]
    fn default_grid_shape() {
        let g = GridSpec::default();
        assert_eq!(g.weight_values().len(), 11);
        assert_eq!(g.threshold_values().len(), 9);
        // Values are exact decimals, not accumulated floats.
        assert_eq!(g.weight_values()[3], 0.3);
        assert_eq!(g.weight_values()[10], 1.0);
        assert_eq!(g.threshold_values()[0], 0.1);
        assert_eq!(g.threshold_values()[8], 0.9);
        assert_eq!(g.point_count(), 11_970);
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::from_values(vec![], vec![0.5]).is_err());
        assert!(GridSpec::from_values(vec![0.5, 0.5], vec![0.5]).is_err());
        assert!(GridSpec::from_values(vec![0.5, 0.2], vec![0.5]).is_err());
        assert!(GridSpec::from_values(vec![-0.1, 0.5], vec![0.5]).is_err());
        assert!(GridSpec::from_values(vec![0.0], vec![0.5]).is_err());
        assert!(GridSpec::from_values(vec![0.5], vec![]).is_err());
        assert!(GridSpec::from_values(vec![0.5], vec![1.0]).is_err());
        assert!(GridSpec::with_step(0.0).is_err());
        assert!(GridSpec::with_step(1.5).is_err());
    }

    #[test]
    fn single_point_grid_returns_it() {
        let (m, gold) = fixture();
        let grid = GridSpec::from_values(vec![0.7], vec![0.4]).unwrap();
        let tuned = grid_search(&m, &gold, &grid).unwrap();
        assert_eq!(tuned.weights.contextual(), 0.7);
        assert_eq!(tuned.weights.phonetic(), 0.7);
        assert_eq!(tuned.weights.string(), 0.7);
        assert_eq!(tuned.threshold, 0.4);
        assert_eq!(tuned.evaluated_points, 1);
    }

    #[test]
    fn tie_goes_to_first_in_scan_order() {
        let (m, gold) = fixture();
        // The fixture store is empty, so the contextual signal is undefined
        // for every pair and w_c never affects a score: for any (w_p, w_s),
        // the points w_c=0.5 and w_c=1.0 have identical F. The winner must
        // therefore carry the earlier w_c in scan order.
        let grid = GridSpec::from_values(vec![0.5, 1.0], vec![0.4]).unwrap();
        let tuned = grid_search(&m, &gold, &grid).unwrap();
        assert_eq!(tuned.evaluated_points, 8);
        assert_eq!(tuned.weights.contextual(), 0.5);
    }

    #[test]
    fn reproducibility_invariant() {
        let (m, gold) = fixture();
        let tuned = grid_search(&m, &gold, &GridSpec::default()).unwrap();
        let params = MatchParams::new(tuned.weights, tuned.threshold, 1).unwrap();
        let replay = evaluation::evaluate(&matcher::match_all(&m, &params), &gold).unwrap();
        assert_eq!(replay, tuned.training_report);
        assert_eq!(tuned.evaluated_points, 11_970);
    }

    #[test]
    fn rejects_empty_or_uncovered_gold() {
        let (m, _) = fixture();
        let empty = gold_of(&[]);
        assert!(grid_search(&m, &empty, &GridSpec::default()).is_err());
        let uncovered = gold_of(&[("missing", "night")]);
        let err = grid_search(&m, &uncovered, &GridSpec::default()).unwrap_err();
        assert!(err.to_string().contains("missing"));
    }

    #[test]
    fn refine_never_lowers_f_and_accumulates_points() {
        let (m, gold) = fixture();
        let coarse = grid_search(&m, &gold, &GridSpec::default()).unwrap();
        let fine = refine(&m, &gold, &coarse).unwrap();
        assert!(fine.training_f() >= coarse.training_f());
        assert!(fine.evaluated_points > coarse.evaluated_points);
        // Refined coordinates stay within one coarse step of the start.
        assert!((fine.weights.contextual() - coarse.weights.contextual()).abs() <= 0.05 + 1e-12);
        assert!((fine.threshold - coarse.threshold).abs() <= 0.05 + 1e-12);
    }

    #[test]
    fn centi_neighborhood_clips() {
        assert_eq!(
            centi_neighborhood(0.0, 0, 100),
            vec![0.0, 0.01, 0.02, 0.03, 0.04, 0.05]
        );
        assert_eq!(centi_neighborhood(0.1, 1, 99).first(), Some(&0.05));
        assert_eq!(centi_neighborhood(0.99, 1, 99).last(), Some(&0.99));
        assert_eq!(centi_neighborhood(0.5, 0, 100).len(), 11);
    }

    fn builder_for(m: &ComponentMatrix) -> impl Fn(&[Word]) -> Result<ComponentMatrix> + Sync + '_ {
        move |words: &[Word]| m.select_rows(words)
    }

    #[test]
    fn cv2_partitions_gold() {
        let (m, gold) = fixture();
        let builder = builder_for(&m);
        let grid = GridSpec::from_values(vec![0.0, 1.0], vec![0.3, 0.6]).unwrap();
        let report =
            run_experiment(ExperimentProtocol::TwoFoldCv, &gold, None, &builder, &grid, 7)
                .unwrap();
        assert_eq!(report.runs.len(), 2);
        assert_eq!(report.runs[0].train_size + report.runs[0].test_size, gold.len());
        // Fold sizes swap between runs.
        assert_eq!(report.runs[0].train_size, report.runs[1].test_size);
        assert_eq!(report.protocol, "cv2");
    }

    #[test]
    fn split20_is_reproducible_and_sized() {
        let (m, gold) = fixture();
        let builder = builder_for(&m);
        let grid = GridSpec::from_values(vec![0.0, 1.0], vec![0.3]).unwrap();
        let a = run_experiment(ExperimentProtocol::Split20, &gold, None, &builder, &grid, 11)
            .unwrap();
        let b = run_experiment(ExperimentProtocol::Split20, &gold, None, &builder, &grid, 11)
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.runs.len(), 5);
        for run in &a.runs {
            assert_eq!(run.train_size, 1); // 20% of 4, minimum 1
            assert_eq!(run.test_size, 3);
        }
        let c = run_experiment(ExperimentProtocol::Split20, &gold, None, &builder, &grid, 12)
            .unwrap();
        assert_ne!(a, c, "different seeds should shuffle differently");
    }

    #[test]
    fn cross_requires_and_uses_secondary() {
        let (m, gold) = fixture();
        let builder = builder_for(&m);
        let grid = GridSpec::from_values(vec![0.0, 1.0], vec![0.3]).unwrap();
        assert!(run_experiment(ExperimentProtocol::Cross, &gold, None, &builder, &grid, 0)
            .is_err());
        assert!(run_experiment(
            ExperimentProtocol::TwoFoldCv,
            &gold,
            Some(&gold),
            &builder,
            &grid,
            0
        )
        .is_err());

        let secondary = gold_of(&[("qzk", "nut")]);
        let report = run_experiment(
            ExperimentProtocol::Cross,
            &gold,
            Some(&secondary),
            &builder,
            &grid,
            0,
        )
        .unwrap();
        assert_eq!(report.runs.len(), 1);
        assert_eq!(report.runs[0].train_size, 1);
        assert_eq!(report.runs[0].test_size, gold.len());
        // Single run: the averaged row is that run.
        assert_eq!(report.averaged.f_measure, report.runs[0].f_measure);
    }

    #[test]
    fn params_json_round_trip() {
        let (m, gold) = fixture();
        let grid = GridSpec::from_values(vec![0.0, 0.5, 1.0], vec![0.3, 0.5]).unwrap();
        let tuned = grid_search(&m, &gold, &grid).unwrap();
        let json = tuned_params_json(&tuned, 99);
        let text = serde_json::to_string_pretty(&json).unwrap();
        for key in ["w_c", "w_p", "w_s", "t", "f_measure", "evaluated_points", "seed"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        let (weights, t) = params_from_json(&text, "params.json").unwrap();
        assert_eq!(weights, tuned.weights);
        assert_eq!(t, tuned.threshold);

        assert!(params_from_json("{}", "p.json").is_err());
        assert!(params_from_json("not json", "p.json").is_err());
    }

    #[test]
    fn protocol_parsing() {
        assert_eq!("cv2".parse::<ExperimentProtocol>().unwrap().name(), "cv2");
        assert_eq!(
            "split20".parse::<ExperimentProtocol>().unwrap().name(),
            "split20"
        );
        assert_eq!("cross".parse::<ExperimentProtocol>().unwrap().name(), "cross");
        assert!("knn".parse::<ExperimentProtocol>().is_err());
    }
}
