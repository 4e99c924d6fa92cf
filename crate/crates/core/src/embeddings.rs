//! Word vectors and the contextual similarity signal.
//!
//! Vectors are stored as `f32` (the usual interchange precision); all
//! similarity arithmetic is done in `f64`.

use std::collections::HashMap;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::word::Word;

#[derive(Debug)]
pub(crate) struct StoredVector {
    pub(crate) values: Vec<f32>,
    /// Euclidean norm, precomputed at insertion; never zero.
    pub(crate) norm: f64,
}

/// In-memory embedding table keyed by word.
#[derive(Debug)]
pub struct EmbeddingStore {
    dimension: usize,
    vectors: HashMap<Word, StoredVector>,
}

/// What the loader skipped, for diagnostics. Skips are not errors: a corpus
/// vocabulary routinely overlaps only partially with an embedding file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EmbeddingLoadReport {
    pub loaded: usize,
    /// Later occurrences of an already-seen word (first one wins).
    pub duplicates_skipped: usize,
    /// All-zero vectors, which have no direction to compare.
    pub zero_norm_skipped: usize,
}

impl EmbeddingStore {
    pub fn new(dimension: usize) -> Result<EmbeddingStore> {
        if dimension == 0 {
            return Err(Error::invalid("embedding dimension must be positive"));
        }
        Ok(EmbeddingStore {
            dimension,
            vectors: HashMap::new(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.vectors.contains_key(word)
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.vectors.get(word).map(|v| v.values.as_slice())
    }

    /// Inserts a vector. Rejects dimension mismatches, zero vectors, and
    /// duplicate words; the loader maps the latter two onto skip counters.
    pub fn insert(&mut self, word: Word, values: Vec<f32>) -> Result<()> {
        if values.len() != self.dimension {
            return Err(Error::invalid(format!(
                "vector for {:?} has {} values, store dimension is {}",
                word,
                values.len(),
                self.dimension
            )));
        }
        let norm = values.iter().map(|&v| f64::from(v) * f64::from(v)).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::invalid(format!("vector for {word:?} has zero norm")));
        }
        if self.vectors.contains_key(&word) {
            return Err(Error::invalid(format!("duplicate vector for {word:?}")));
        }
        self.vectors.insert(word, StoredVector { values, norm });
        Ok(())
    }

    /// Contextual similarity: cosine of the two word vectors, clamped to
    /// [0, 1]. `None` when either word has no vector; the signal is
    /// undefined, not zero. Equal covered words compare at exactly 1.
    pub fn contextual_similarity(&self, a: &str, b: &str) -> Option<f64> {
        contextual_from_entries(a, b, self.vectors.get(a), self.vectors.get(b))
    }

    pub(crate) fn entry(&self, word: &str) -> Option<&StoredVector> {
        self.vectors.get(word)
    }
}

/// Shared by the one-pair path and the pairwise cache builder so both
/// produce bit-identical values.
pub(crate) fn contextual_from_entries(
    a_word: &str,
    b_word: &str,
    a: Option<&StoredVector>,
    b: Option<&StoredVector>,
) -> Option<f64> {
    let a = a?;
    let b = b?;
    // Same word, same vector: skip the arithmetic so the result is exactly 1
    // rather than 1 up to rounding.
    if a_word == b_word {
        return Some(1.0);
    }
    let dot: f64 = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(&x, &y)| f64::from(x) * f64::from(y))
        .sum();
    Some((dot / (a.norm * b.norm)).clamp(0.0, 1.0))
}

/// Reads whitespace-separated text vectors: one `word v1 .. vD` per line,
/// optionally preceded by a `count dimension` header line. Unparseable
/// numbers and inconsistent dimensions are hard errors naming the line;
/// duplicates and zero vectors are skipped and counted.
pub fn load_embeddings<R: BufRead>(
    reader: R,
    source_name: &str,
) -> Result<(EmbeddingStore, EmbeddingLoadReport)> {
    let mut store: Option<EmbeddingStore> = None;
    let mut report = EmbeddingLoadReport::default();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(source_name, e))?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        let mut tokens = line.split_ascii_whitespace();
        let first = tokens.next().expect("non-blank line has a first token");
        let rest: Vec<&str> = tokens.collect();

        // A `count dimension` header is two bare integers.
        if store.is_none() && rest.len() == 1 {
            if let (Ok(_count), Ok(dim)) = (first.parse::<u64>(), rest[0].parse::<usize>()) {
                store = Some(EmbeddingStore::new(dim).map_err(|_| {
                    Error::parse(source_name, line_no, "header declares dimension 0")
                })?);
                continue;
            }
        }

        if rest.is_empty() {
            return Err(Error::parse(
                source_name,
                line_no,
                "line has a word but no vector values",
            ));
        }
        let word = Word::new(first)
            .map_err(|e| Error::parse(source_name, line_no, e.to_string()))?;
        let mut values = Vec::with_capacity(rest.len());
        for tok in &rest {
            let v: f32 = tok.parse().map_err(|_| {
                Error::parse(source_name, line_no, format!("bad vector value {tok:?}"))
            })?;
            if !v.is_finite() {
                return Err(Error::parse(
                    source_name,
                    line_no,
                    format!("non-finite vector value {tok:?}"),
                ));
            }
            values.push(v);
        }

        if store.is_none() {
            store = Some(EmbeddingStore::new(values.len())?);
        }
        let store = store.as_mut().expect("just initialized");
        if values.len() != store.dimension() {
            return Err(Error::parse(
                source_name,
                line_no,
                format!(
                    "vector has {} values, expected {}",
                    values.len(),
                    store.dimension()
                ),
            ));
        }

        let norm_is_zero = values.iter().all(|&v| v == 0.0);
        if norm_is_zero {
            report.zero_norm_skipped += 1;
            continue;
        }
        if store.contains(word.as_str()) {
            report.duplicates_skipped += 1;
            continue;
        }
        store.insert(word, values)?;
        report.loaded += 1;
    }

    let store = store.ok_or_else(|| Error::data(source_name, "no embedding vectors found"))?;
    Ok((store, report))
}
