//! `tnorm`: lexical normalization from the command line.
//!
//! Thin orchestration over `tnorm-core`: every subcommand loads its inputs,
//! calls one library entry point, and writes the result. Data goes to
//! standard output (or `-o`), diagnostics to standard error; the exit
//! status is zero exactly when no error occurred.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use tnorm_core::corpus::{load_lexicon, rewrite_line, tokenize_line};
use tnorm_core::embeddings::load_embeddings;
use tnorm_core::evaluation::{
    evaluate, read_gold_tsv, threshold_sweep, write_sweep_csv, GoldDataset,
};
use tnorm_core::matcher::{match_all, read_predictions_tsv, write_predictions_tsv};
use tnorm_core::phonetics::{encode, DEFAULT_MAX_CODE_LEN};
use tnorm_core::probe::kernel_counts;
use tnorm_core::similarity::{build_component_matrix, combine, component_triple};
use tnorm_core::tuner::{grid_search, refine, run_experiment, tuned_params_json, params_from_json};
use tnorm_core::{
    ComponentMatrix, EmbeddingStore, ExperimentProtocol, GridSpec, MatchParams,
    SimilarityWeights, Word,
};

#[derive(Parser)]
#[command(
    name = "tnorm",
    version,
    about = "Maps out-of-vocabulary words to their standard forms by combined \
             contextual, phonetic, and string similarity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a word's phonetic codes as word<TAB>primary<TAB>alternate
    Encode {
        word: String,
        /// Truncate codes to this many symbols
        #[arg(long, default_value_t = DEFAULT_MAX_CODE_LEN)]
        max_code_len: usize,
    },
    /// Show each similarity component and the combined score for one pair
    Sim {
        word1: String,
        word2: String,
        /// Embedding file (optional header line `count dim`, then
        /// word followed by values)
        #[arg(long)]
        embeddings: PathBuf,
        /// Component weights as wc,wp,ws
        #[arg(long, value_parser = parse_weights, default_value = "1,1,1")]
        weights: SimilarityWeights,
    },
    /// Match a list of OOV words against a lexicon; prints predictions TSV
    Match {
        /// Lexicon file, one in-vocabulary word per line
        #[arg(long)]
        lexicon: PathBuf,
        /// File with one OOV word per line
        #[arg(long)]
        oov: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        /// Component weights as wc,wp,ws
        #[arg(long, value_parser = parse_weights)]
        weights: SimilarityWeights,
        /// Minimum combined similarity for a match, in (0,1)
        #[arg(short = 't', long)]
        threshold: f64,
        /// Keep the top K candidates per word
        #[arg(short = 'k', long, default_value_t = 1)]
        k: usize,
        /// Output file (default: standard output)
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Rewrite running text from stdin, replacing each OOV token that
    /// matches with its best in-vocabulary word
    Normalize {
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        /// Tuned parameters JSON, as produced by `tnorm tune`
        #[arg(long)]
        params: PathBuf,
    },
    /// Grid-search the weights and threshold on a gold set; prints JSON
    Tune {
        /// Gold TSV: oov<TAB>iv per line
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        /// Grid step for weights (from 0) and threshold (from 0.1)
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        /// Follow up with a finer pass around the coarse optimum
        #[arg(long)]
        refine: bool,
        /// Recorded in the output for downstream reproducibility
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Score a predictions file against a gold set; prints JSON
    Eval {
        #[arg(long)]
        gold: PathBuf,
        /// Predictions TSV, as produced by `tnorm match`
        #[arg(long)]
        pred: PathBuf,
    },
    /// Evaluate a range of thresholds at fixed weights; writes CSV
    Sweep {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        /// Component weights as wc,wp,ws
        #[arg(long, value_parser = parse_weights)]
        weights: SimilarityWeights,
        #[arg(long)]
        t_from: f64,
        #[arg(long)]
        t_to: f64,
        #[arg(long)]
        t_step: f64,
        #[arg(short = 'o', long)]
        out: PathBuf,
    },
    /// Run a tune/test protocol and print its JSON report
    Experiment {
        /// cv2 (two-fold cross-validation), split20 (five seeded 20% train
        /// splits), or cross (tune on --gold2, test on --gold)
        #[arg(long)]
        protocol: ExperimentProtocol,
        #[arg(long)]
        gold: PathBuf,
        /// Second gold set; required by (and only valid for) cross
        #[arg(long)]
        gold2: Option<PathBuf>,
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long)]
        seed: u64,
    },
}

fn parse_weights(s: &str) -> Result<SimilarityWeights, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected wc,wp,ws, got {s:?}"));
    }
    let mut values = [0.0f64; 3];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| format!("{part:?} is not a number"))?;
    }
    SimilarityWeights::new(values[0], values[1], values[2]).map_err(|e| e.to_string())
}

fn open_reader(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| {
        format!("cannot open {}", path.display())
    })?))
}

fn out_writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_lexicon(path: &Path) -> Result<BTreeSet<Word>> {
    Ok(load_lexicon(open_reader(path)?, &path.display().to_string())?)
}

fn read_store(path: &Path) -> Result<EmbeddingStore> {
    let (store, report) = load_embeddings(open_reader(path)?, &path.display().to_string())?;
    if report.duplicates_skipped > 0 || report.zero_norm_skipped > 0 {
        eprintln!(
            "{}: skipped {} duplicate and {} zero vectors",
            path.display(),
            report.duplicates_skipped,
            report.zero_norm_skipped
        );
    }
    Ok(store)
}

fn read_gold(path: &Path) -> Result<GoldDataset> {
    let (gold, report) = read_gold_tsv(open_reader(path)?, &path.display().to_string())?;
    let skipped =
        report.self_mappings_skipped + report.multi_token_skipped + report.duplicates_skipped;
    if skipped > 0 {
        eprintln!(
            "{}: skipped {} entries ({} self-mappings, {} multi-token, {} duplicates)",
            path.display(),
            skipped,
            report.self_mappings_skipped,
            report.multi_token_skipped,
            report.duplicates_skipped
        );
    }
    Ok(gold)
}

/// Component matrix over the gold OOV words and the whole lexicon, with a
/// warning for gold targets the lexicon cannot supply.
fn gold_matrix(
    gold: &GoldDataset,
    lexicon: &BTreeSet<Word>,
    store: &EmbeddingStore,
    extra_oov: Option<&GoldDataset>,
) -> Result<(Vec<Word>, ComponentMatrix)> {
    let missing = gold
        .iter()
        .filter(|(_, target)| !lexicon.contains(*target))
        .count();
    if missing > 0 {
        eprintln!("warning: {missing} gold targets are not in the lexicon and can never match");
    }
    let mut oov: BTreeSet<Word> = gold.oov_words().into_iter().collect();
    if let Some(extra) = extra_oov {
        oov.extend(extra.oov_words());
    }
    let oov: Vec<Word> = oov.into_iter().collect();
    let iv: Vec<Word> = lexicon.iter().cloned().collect();
    let matrix = build_component_matrix(&oov, &iv, store)?;
    Ok((iv, matrix))
}

fn print_json(value: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let mut w = out_writer(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

fn snap(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

fn run() -> Result<()> {
    if let Ok(threads) = std::env::var("TNORM_THREADS") {
        let n: usize = threads
            .parse()
            .ok()
            .filter(|n| *n >= 1)
            .context("TNORM_THREADS must be a positive integer")?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("worker pool already started")?;
    }

    match Cli::parse().command {
        Command::Encode { word, max_code_len } => {
            if max_code_len == 0 {
                bail!("--max-code-len must be at least 1");
            }
            let codes = encode(&word, max_code_len);
            println!("{word}\t{}\t{}", codes.primary(), codes.alternate().unwrap_or(""));
        }

        Command::Sim {
            word1,
            word2,
            embeddings,
            weights,
        } => {
            let a = Word::new(&word1)?;
            let b = Word::new(&word2)?;
            let store = read_store(&embeddings)?;
            let triple = component_triple(&a, &b, &store);
            let fmt = |v: Option<f64>| match v {
                Some(v) => format!("{v:.6}"),
                None => "undefined".to_owned(),
            };
            println!("contextual\t{}", fmt(triple.contextual));
            println!("phonetic\t{}", fmt(triple.phonetic));
            println!("string\t{}", fmt(Some(triple.string)));
            println!("combined\t{}", fmt(Some(combine(&triple, &weights))));
        }

        Command::Match {
            lexicon,
            oov,
            embeddings,
            weights,
            threshold,
            k,
            out,
        } => {
            let lexicon = read_lexicon(&lexicon)?;
            let oov_list = read_lexicon(&oov)?;
            let (kept, in_lexicon): (Vec<Word>, Vec<Word>) =
                oov_list.into_iter().partition(|w| !lexicon.contains(w));
            if !in_lexicon.is_empty() {
                eprintln!(
                    "warning: {} words are already in the lexicon and were skipped",
                    in_lexicon.len()
                );
            }
            if kept.is_empty() {
                bail!("no out-of-vocabulary words left to match");
            }
            let store = read_store(&embeddings)?;
            let iv: Vec<Word> = lexicon.iter().cloned().collect();
            let matrix = build_component_matrix(&kept, &iv, &store)?;
            let params = MatchParams::new(weights, threshold, k)?;
            let result = match_all(&matrix, &params);
            eprintln!("matched {} of {} words", result.matched_count(), result.len());
            write_predictions_tsv(&result, out_writer(out.as_deref())?)?;
        }

        Command::Normalize {
            lexicon,
            embeddings,
            params,
        } => {
            let lexicon = read_lexicon(&lexicon)?;
            let params_text = std::fs::read_to_string(&params)
                .with_context(|| format!("cannot open {}", params.display()))?;
            let (weights, threshold) =
                params_from_json(&params_text, &params.display().to_string())?;
            let store = read_store(&embeddings)?;

            let mut text = String::new();
            io::stdin()
                .lock()
                .read_to_string(&mut text)
                .context("reading standard input")?;
            let mut oov: BTreeSet<Word> = BTreeSet::new();
            for line in text.lines() {
                for token in tokenize_line(line) {
                    if !lexicon.contains(&token.word) {
                        oov.insert(token.word);
                    }
                }
            }

            let rank1 = if oov.is_empty() {
                Default::default()
            } else {
                let oov: Vec<Word> = oov.into_iter().collect();
                let iv: Vec<Word> = lexicon.iter().cloned().collect();
                let matrix = build_component_matrix(&oov, &iv, &store)?;
                let match_params = MatchParams::new(weights, threshold, 1)?;
                match_all(&matrix, &match_params).rank1_map()
            };

            let mut out = BufWriter::new(io::stdout().lock());
            for line in text.lines() {
                let rewritten = rewrite_line(line, |w| rank1.get(w).cloned());
                writeln!(out, "{rewritten}")?;
            }
        }

        Command::Tune {
            gold,
            lexicon,
            embeddings,
            step,
            refine: do_refine,
            seed,
            out,
        } => {
            let gold = read_gold(&gold)?;
            let lexicon = read_lexicon(&lexicon)?;
            let store = read_store(&embeddings)?;
            let (_, matrix) = gold_matrix(&gold, &lexicon, &store, None)?;
            let grid = GridSpec::with_step(step)?;

            let before = kernel_counts();
            let mut tuned = grid_search(&matrix, &gold, &grid)?;
            if do_refine {
                tuned = refine(&matrix, &gold, &tuned)?;
            }
            let delta = kernel_counts().since(before);
            eprintln!(
                "evaluated {} parameter points; kernel calls during search: {}",
                tuned.evaluated_points,
                delta.total()
            );
            print_json(&tuned_params_json(&tuned, seed), out.as_deref())?;
        }

        Command::Eval { gold, pred } => {
            let gold = read_gold(&gold)?;
            let predictions =
                read_predictions_tsv(open_reader(&pred)?, &pred.display().to_string())?;
            let report = evaluate(&predictions, &gold)?;
            print_json(&serde_json::to_value(report)?, None)?;
        }

        Command::Sweep {
            gold,
            lexicon,
            embeddings,
            weights,
            t_from,
            t_to,
            t_step,
            out,
        } => {
            if !(t_step > 0.0) {
                bail!("--t-step must be positive");
            }
            let gold = read_gold(&gold)?;
            let lexicon = read_lexicon(&lexicon)?;
            let store = read_store(&embeddings)?;
            let (_, matrix) = gold_matrix(&gold, &lexicon, &store, None)?;

            let mut thresholds = Vec::new();
            let mut k = 0u32;
            loop {
                let t = snap(t_from + t_step * f64::from(k));
                if t > t_to {
                    break;
                }
                thresholds.push(t);
                k += 1;
            }
            let points = threshold_sweep(&matrix, &weights, &gold, &thresholds)?;
            write_sweep_csv(&points, out_writer(Some(&out))?)?;
            eprintln!("wrote {} rows to {}", points.len(), out.display());
        }

        Command::Experiment {
            protocol,
            gold,
            gold2,
            lexicon,
            embeddings,
            seed,
        } => {
            let gold = read_gold(&gold)?;
            let gold2 = gold2.as_deref().map(read_gold).transpose()?;
            let lexicon = read_lexicon(&lexicon)?;
            let store = read_store(&embeddings)?;
            let (_, matrix) = gold_matrix(&gold, &lexicon, &store, gold2.as_ref())?;
            let builder = |words: &[Word]| matrix.select_rows(words);
            let report = run_experiment(
                protocol,
                &gold,
                gold2.as_ref(),
                &builder,
                &GridSpec::default(),
                seed,
            )?;
            print_json(&serde_json::to_value(&report)?, None)?;
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
