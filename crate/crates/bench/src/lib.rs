//! Shared synthetic-workload builders for the benchmark targets.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::io::Cursor;

use tnorm_core::{
    embeddings::load_embeddings, evaluation::GoldDataset, similarity::build_component_matrix,
    ComponentMatrix, EmbeddingStore, Word,
};

const LETTERS: &[u8] = b"abcdefghijklmnopqrstuvwxyz";

/// Deterministic pseudo-word of the given length.
pub fn synth_word(rng: &mut ChaCha8Rng, len: usize) -> String {
    (0..len)
        .map(|_| LETTERS[rng.random_range(0..LETTERS.len())] as char)
        .collect()
}

/// Builds a corrupted variant of `base`: one substitution plus an optional
/// suffix trim, mimicking typo-style OOV forms.
pub fn corrupt(rng: &mut ChaCha8Rng, base: &str) -> String {
    let mut chars: Vec<char> = base.chars().collect();
    let i = rng.random_range(0..chars.len());
    chars[i] = LETTERS[rng.random_range(0..LETTERS.len())] as char;
    if chars.len() > 3 && rng.random_bool(0.5) {
        chars.pop();
    }
    chars.into_iter().collect()
}

/// A ready-to-search workload: IV lexicon, OOV list with gold targets,
/// embeddings covering both sides, and the precomputed component matrix.
pub struct Workload {
    pub iv: Vec<Word>,
    pub gold: GoldDataset,
    pub store: EmbeddingStore,
    pub matrix: ComponentMatrix,
}

/// Generates `n_iv` lexicon entries and `n_oov` corrupted OOV forms with
/// embeddings (dimension `dim`) whose gold pairs point in similar
/// directions.
pub fn build_workload(seed: u64, n_iv: usize, n_oov: usize, dim: usize) -> Workload {
    assert!(n_oov <= n_iv, "each OOV form corrupts a distinct IV word");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut iv = Vec::with_capacity(n_iv);
    while iv.len() < n_iv {
        let len = rng.random_range(4..=9);
        let cand = synth_word(&mut rng, len);
        if !iv.contains(&cand) {
            iv.push(cand);
        }
    }

    let mut pairs = BTreeMap::new();
    for base in iv.iter().take(n_oov) {
        loop {
            let oov = corrupt(&mut rng, base);
            if !iv.contains(&oov) && !pairs.contains_key(&oov) {
                pairs.insert(oov, base.clone());
                break;
            }
        }
    }

    let mut text = String::new();
    let emit = |word: &str, anchor: Option<&[f64]>, rng: &mut ChaCha8Rng, text: &mut String| {
        let values: Vec<f64> = match anchor {
            Some(a) => a
                .iter()
                .map(|v| v + rng.random_range(-0.05..0.05))
                .collect(),
            None => (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect(),
        };
        text.push_str(word);
        for v in &values {
            text.push_str(&format!(" {v:.6}"));
        }
        text.push('\n');
        values
    };
    let mut anchors: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for word in &iv {
        let a = emit(word, None, &mut rng, &mut text);
        anchors.insert(word, a);
    }
    for (oov, target) in &pairs {
        let anchor = anchors[target.as_str()].clone();
        emit(oov, Some(&anchor), &mut rng, &mut text);
    }

    let (store, _) = load_embeddings(Cursor::new(text), "synthetic").unwrap();
    let iv: Vec<Word> = iv.iter().map(|s| Word::new(s).unwrap()).collect();
    let gold = GoldDataset::from_pairs(
        pairs
            .iter()
            .map(|(o, t)| (Word::new(o).unwrap(), Word::new(t).unwrap())),
    )
    .0;
    let oov = gold.oov_words();
    let matrix = build_component_matrix(&oov, &iv, &store).unwrap();
    Workload {
        iv,
        gold,
        store,
        matrix,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workload_has_requested_shape() {
        let wl = build_workload(3, 40, 12, 8);
        assert_eq!(wl.iv.len(), 40);
        assert_eq!(wl.gold.len(), 12);
        assert_eq!(wl.store.dimension(), 8);
        assert_eq!(wl.matrix.n_oov(), 12);
        assert_eq!(wl.matrix.n_iv(), 40);
        // Every gold target is a lexicon word, so matching can succeed.
        for (_, target) in wl.gold.iter() {
            assert!(wl.iv.contains(target));
        }
    }

    #[test]
    fn workload_is_seed_deterministic() {
        let a = build_workload(9, 20, 5, 4);
        let b = build_workload(9, 20, 5, 4);
        assert_eq!(a.iv, b.iv);
        assert_eq!(
            a.gold.iter().collect::<Vec<_>>(),
            b.gold.iter().collect::<Vec<_>>()
        );
        let c = build_workload(10, 20, 5, 4);
        assert_ne!(a.iv, c.iv);
    }
}
