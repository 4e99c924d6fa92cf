//! Release gate for the binary: the full tune -> match -> eval pipeline on
//! a realistic problem size (1,000 OOV words against a 5,000-word lexicon),
//! within a wall-clock budget and with zero kernel recomputation during the
//! parameter search.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

const LETTERS: &[u8] = b"abcdefghijklmnopqrstuvwxyz";
const DIM: usize = 16;

fn synth_word(rng: &mut ChaCha8Rng, len: usize) -> String {
    (0..len)
        .map(|_| LETTERS[rng.random_range(0..LETTERS.len())] as char)
        .collect()
}

/// One substitution plus an optional trailing deletion: a typo-shaped
/// variant that stays close to its source in string space.
fn corrupt(rng: &mut ChaCha8Rng, base: &str) -> String {
    let mut chars: Vec<char> = base.chars().collect();
    let i = rng.random_range(0..chars.len());
    chars[i] = LETTERS[rng.random_range(0..LETTERS.len())] as char;
    if chars.len() > 3 && rng.random_bool(0.5) {
        chars.pop();
    }
    chars.into_iter().collect()
}

fn push_vector(out: &mut String, word: &str, values: &[f64]) {
    out.push_str(word);
    for v in values {
        write!(out, " {v:.6}").unwrap();
    }
    out.push('\n');
}

#[test]
fn pipeline_handles_desk_scale_within_budget() {
    let mut rng = ChaCha8Rng::seed_from_u64(1729);

    // 5,000 distinct lexicon words.
    let mut iv: Vec<String> = Vec::with_capacity(5_000);
    let mut seen: HashSet<String> = HashSet::new();
    while iv.len() < 5_000 {
        let len = rng.random_range(4..=9);
        let w = synth_word(&mut rng, len);
        if seen.insert(w.clone()) {
            iv.push(w);
        }
    }

    // 1,000 OOV corruptions of distinct lexicon words.
    let mut gold: Vec<(String, String)> = Vec::with_capacity(1_000);
    for base in iv.iter().take(1_000) {
        loop {
            let oov = corrupt(&mut rng, base);
            if !seen.contains(&oov) && seen.insert(oov.clone()) {
                gold.push((oov, base.clone()));
                break;
            }
        }
    }

    // Embeddings for every word; gold pairs point in nearby directions.
    let mut vec_text = String::new();
    writeln!(vec_text, "{} {DIM}", iv.len() + gold.len()).unwrap();
    let mut anchors: Vec<Vec<f64>> = Vec::with_capacity(iv.len());
    for word in &iv {
        let v: Vec<f64> = (0..DIM).map(|_| rng.random_range(-1.0..1.0)).collect();
        push_vector(&mut vec_text, word, &v);
        anchors.push(v);
    }
    for (i, (oov, _)) in gold.iter().enumerate() {
        let v: Vec<f64> = anchors[i]
            .iter()
            .map(|x| x + rng.random_range(-0.15..0.15))
            .collect();
        push_vector(&mut vec_text, oov, &v);
    }

    let dir = tempfile::tempdir().unwrap();
    let lexicon = dir.path().join("lexicon.txt");
    let gold_tsv = dir.path().join("gold.tsv");
    let oov_txt = dir.path().join("oov.txt");
    let emb = dir.path().join("embeddings.vec");
    let params = dir.path().join("params.json");
    let pred = dir.path().join("pred.tsv");
    fs::write(&lexicon, iv.join("\n") + "\n").unwrap();
    fs::write(
        &gold_tsv,
        gold.iter().map(|(o, t)| format!("{o}\t{t}\n")).collect::<String>(),
    )
    .unwrap();
    fs::write(
        &oov_txt,
        gold.iter().map(|(o, _)| format!("{o}\n")).collect::<String>(),
    )
    .unwrap();
    fs::write(&emb, vec_text).unwrap();

    let budget = Duration::from_secs(300);
    let start = Instant::now();

    // Tune.
    let out = Command::new(env!("CARGO_BIN_EXE_tnorm"))
        .args([
            "tune",
            "--gold",
            gold_tsv.to_str().unwrap(),
            "--lexicon",
            lexicon.to_str().unwrap(),
            "--embeddings",
            emb.to_str().unwrap(),
            "--step",
            "0.1",
            "-o",
            params.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "tune failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("kernel calls during search: 0"),
        "search recomputed components: {stderr}"
    );
    let tuned: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&params).unwrap()).unwrap();
    assert_eq!(tuned["evaluated_points"].as_u64().unwrap(), 11_970);

    // Match with the tuned parameters.
    let weights = format!(
        "{},{},{}",
        tuned["w_c"].as_f64().unwrap(),
        tuned["w_p"].as_f64().unwrap(),
        tuned["w_s"].as_f64().unwrap()
    );
    let out = Command::new(env!("CARGO_BIN_EXE_tnorm"))
        .args([
            "match",
            "--lexicon",
            lexicon.to_str().unwrap(),
            "--oov",
            oov_txt.to_str().unwrap(),
            "--embeddings",
            emb.to_str().unwrap(),
            "--weights",
            &weights,
            "-t",
            &tuned["t"].as_f64().unwrap().to_string(),
            "-o",
            pred.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "match failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    // Evaluate; the tuned F-measure must reproduce exactly, because match
    // and eval replay the search's winning configuration on the same data.
    let out = Command::new(env!("CARGO_BIN_EXE_tnorm"))
        .args([
            "eval",
            "--gold",
            gold_tsv.to_str().unwrap(),
            "--pred",
            pred.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "eval failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(
        report["f_measure"].as_f64().unwrap(),
        tuned["f_measure"].as_f64().unwrap(),
        "pipeline replay diverged from the tuner's training report"
    );
    assert!(report["f_measure"].as_f64().unwrap() > 0.5, "implausibly weak fit");

    let elapsed = start.elapsed();
    assert!(
        elapsed < budget,
        "pipeline took {elapsed:?}, budget {budget:?}"
    );
    println!(
        "ACCEPT pipeline_handles_desk_scale_within_budget: PASS ({} s, F={:.3})",
        elapsed.as_secs(),
        report["f_measure"].as_f64().unwrap()
    );
}
