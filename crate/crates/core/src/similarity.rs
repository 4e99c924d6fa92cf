//! Weighted combination of the three similarity signals, and the pairwise
//! component cache the matcher and tuner run on.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::embeddings::{self, EmbeddingStore};
use crate::error::{Error, Result};
use crate::phonetics;
use crate::textsim;
use crate::word::Word;

/// Non-negative weights for the contextual, phonetic, and string signals.
/// Each lies in [0, 1] and at least one is positive. Scores depend only on
/// weight ratios, so the unit box loses nothing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityWeights {
    #[serde(rename = "w_c")]
    contextual: f64,
    #[serde(rename = "w_p")]
    phonetic: f64,
    #[serde(rename = "w_s")]
    string: f64,
}

impl SimilarityWeights {
    pub fn new(contextual: f64, phonetic: f64, string: f64) -> Result<SimilarityWeights> {
        for (name, v) in [
            ("contextual", contextual),
            ("phonetic", phonetic),
            ("string", string),
        ] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!(
                    "{name} weight {v} outside [0, 1]"
                )));
            }
        }
        if contextual == 0.0 && phonetic == 0.0 && string == 0.0 {
            return Err(Error::invalid("at least one weight must be positive"));
        }
        Ok(SimilarityWeights {
            contextual,
            phonetic,
            string,
        })
    }

    pub fn contextual(&self) -> f64 {
        self.contextual
    }

    pub fn phonetic(&self) -> f64 {
        self.phonetic
    }

    pub fn string(&self) -> f64 {
        self.string
    }
}

/// The three per-pair signals. Contextual and phonetic can be undefined
/// (word not covered by the embeddings; word with no phonetic code); string
/// similarity always exists for non-empty words.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentTriple {
    pub contextual: Option<f64>,
    pub phonetic: Option<f64>,
    pub string: f64,
}

/// Computes the three signals for one pair.
pub fn component_triple(oov: &Word, iv: &Word, store: &EmbeddingStore) -> ComponentTriple {
    ComponentTriple {
        contextual: store.contextual_similarity(oov.as_str(), iv.as_str()),
        phonetic: phonetics::phonetic_similarity(oov.as_str(), iv.as_str()),
        string: textsim::string_similarity(oov.as_str(), iv.as_str())
            .expect("Word is never empty"),
    }
}

/// Weighted mean of the defined signals. An undefined signal contributes
/// neither to the numerator nor the denominator, which is renormalization
/// over the signals that exist. If every signal with positive weight is
/// undefined (effective weight mass 0), the score is 0: nothing supports
/// the pair.
///
/// Output is always in [0, 1].
#[inline]
pub fn combine(triple: &ComponentTriple, weights: &SimilarityWeights) -> f64 {
    // Accumulation order (string, contextual, phonetic) is fixed: the tuner
    // recombines cached triples and must reproduce these exact bits.
    let mut num = weights.string * triple.string;
    let mut den = weights.string;
    if let Some(c) = triple.contextual {
        num += weights.contextual * c;
        den += weights.contextual;
    }
    if let Some(p) = triple.phonetic {
        num += weights.phonetic * p;
        den += weights.phonetic;
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Dense cache of [`ComponentTriple`]s for every (OOV, IV) pair. Built once;
/// the matcher and tuner only recombine entries, never touching the string
/// or phonetic kernels again.
pub struct ComponentMatrix {
    oov_words: Vec<Word>,
    iv_words: Vec<Word>,
    /// Row-major: entry (j, k) at j * iv_words.len() + k.
    triples: Vec<ComponentTriple>,
}

impl ComponentMatrix {
    /// Assembles a matrix from externally computed components, for callers
    /// that cache triples themselves. `triples` is row-major over
    /// `oov_words` x `iv_words`; every defined component must lie in [0, 1].
    pub fn from_parts(
        oov_words: Vec<Word>,
        iv_words: Vec<Word>,
        triples: Vec<ComponentTriple>,
    ) -> Result<ComponentMatrix> {
        validate_word_lists(&oov_words, &iv_words)?;
        if triples.len() != oov_words.len() * iv_words.len() {
            return Err(Error::invalid(format!(
                "expected {} triples for a {} x {} matrix, got {}",
                oov_words.len() * iv_words.len(),
                oov_words.len(),
                iv_words.len(),
                triples.len()
            )));
        }
        for triple in &triples {
            for value in [triple.contextual, triple.phonetic, Some(triple.string)]
                .into_iter()
                .flatten()
            {
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::invalid(format!(
                        "component value {value} is outside [0, 1]"
                    )));
                }
            }
        }
        Ok(ComponentMatrix {
            oov_words,
            iv_words,
            triples,
        })
    }

    pub fn n_oov(&self) -> usize {
        self.oov_words.len()
    }

    pub fn n_iv(&self) -> usize {
        self.iv_words.len()
    }

    pub fn oov_words(&self) -> &[Word] {
        &self.oov_words
    }

    pub fn iv_words(&self) -> &[Word] {
        &self.iv_words
    }

    pub fn get(&self, oov_idx: usize, iv_idx: usize) -> &ComponentTriple {
        &self.triples[oov_idx * self.iv_words.len() + iv_idx]
    }

    pub fn row(&self, oov_idx: usize) -> &[ComponentTriple] {
        let n = self.iv_words.len();
        &self.triples[oov_idx * n..(oov_idx + 1) * n]
    }

    /// New matrix holding the rows for `words`, in the given order. Cheap
    /// compared to a rebuild: triples are copied, not recomputed.
    pub fn select_rows(&self, words: &[Word]) -> Result<ComponentMatrix> {
        let mut triples = Vec::with_capacity(words.len() * self.iv_words.len());
        for word in words {
            let idx = self
                .oov_words
                .iter()
                .position(|w| w == word)
                .ok_or_else(|| {
                    Error::invalid(format!("word {word:?} is not a row of this matrix"))
                })?;
            triples.extend_from_slice(self.row(idx));
        }
        Ok(ComponentMatrix {
            oov_words: words.to_vec(),
            iv_words: self.iv_words.clone(),
            triples,
        })
    }
}

/// Builds the full |OOV| x |IV| component cache. Each word is decoded and
/// phonetically encoded exactly once, up front; the pairwise loop then runs
/// only the two string kernels per pair. Rows are computed in parallel.
///
/// Both lists must be non-empty and duplicate-free.
fn validate_word_lists(oov: &[Word], iv: &[Word]) -> Result<()> {
    if oov.is_empty() || iv.is_empty() {
        return Err(Error::invalid(
            "component matrix needs at least one OOV and one IV word",
        ));
    }
    for (name, list) in [("OOV", oov), ("IV", iv)] {
        let mut seen = HashSet::with_capacity(list.len());
        for w in list {
            if !seen.insert(w.as_str()) {
                return Err(Error::invalid(format!("duplicate {name} word {w:?}")));
            }
        }
    }
    Ok(())
}

pub fn build_component_matrix(
    oov: &[Word],
    iv: &[Word],
    store: &EmbeddingStore,
) -> Result<ComponentMatrix> {
    validate_word_lists(oov, iv)?;

    struct Prepared<'a> {
        word: &'a Word,
        chars: Vec<char>,
        codes: phonetics::PhoneticCodes,
        vector: Option<&'a embeddings::StoredVector>,
    }
    fn prep<'a>(word: &'a Word, store: &'a EmbeddingStore) -> Prepared<'a> {
        Prepared {
            word,
            chars: word.as_str().chars().collect(),
            codes: phonetics::encode(word.as_str(), phonetics::DEFAULT_MAX_CODE_LEN),
            vector: store.entry(word.as_str()),
        }
    }
    let oov_prep: Vec<Prepared> = oov.iter().map(|w| prep(w, store)).collect();
    let iv_prep: Vec<Prepared> = iv.iter().map(|w| prep(w, store)).collect();

    let n_iv = iv.len();
    let mut triples = vec![
        ComponentTriple {
            contextual: None,
            phonetic: None,
            string: 0.0,
        };
        oov.len() * n_iv
    ];

    triples
        .par_chunks_mut(n_iv)
        .zip(oov_prep.par_iter())
        .for_each(|(row, o)| {
            for (cell, i) in row.iter_mut().zip(&iv_prep) {
                *cell = ComponentTriple {
                    contextual: embeddings::contextual_from_entries(
                        o.word.as_str(),
                        i.word.as_str(),
                        o.vector,
                        i.vector,
                    ),
                    phonetic: phonetics::similarity_of_codes(&o.codes, &i.codes),
                    string: textsim::string_similarity_units(&o.chars, &i.chars),
                };
            }
        });

    Ok(ComponentMatrix {
        oov_words: oov.to_vec(),
        iv_words: iv.to_vec(),
        triples,
    })
}
