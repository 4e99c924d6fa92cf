//! Lexical normalization of informal text.
//!
//! Out-of-vocabulary words are mapped onto an in-vocabulary lexicon by
//! combining three similarity signals per candidate pair: contextual
//! (cosine over word embeddings), phonetic (Double Metaphone codes), and
//! string (normalized longest common subsequence). Candidates whose weighted
//! score clears a threshold are kept, and the component weights plus the
//! threshold are tuned by grid search against gold annotations.
//!
//! The crate is organized bottom-up:
//!
//! * [`textsim`]: edit-distance and LCS kernels, string similarity
//! * [`phonetics`]: Double Metaphone encoder, phonetic similarity
//! * [`embeddings`]: vector store and contextual similarity
//! * [`similarity`]: weighted combination and the pairwise component cache
//! * [`matcher`]: thresholded K-nearest-neighbor matching
//! * [`evaluation`]: gold data, precision/recall/F, threshold sweeps
//! * [`tuner`]: grid search, refinement, experiment protocols
//! * [`corpus`]: tokenization, lexicon loading, vocabulary splitting

pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod evaluation;
pub mod matcher;
pub mod phonetics;
pub mod probe;
pub mod similarity;
pub mod textsim;
pub mod tuner;
mod word;

pub use embeddings::{EmbeddingLoadReport, EmbeddingStore};
pub use error::{Error, Result};
pub use evaluation::{EvalReport, GoldDataset, GoldLoadReport};
pub use matcher::{MatchParams, MatchResult};
pub use phonetics::PhoneticCodes;
pub use similarity::{ComponentMatrix, ComponentTriple, SimilarityWeights};
pub use tuner::{ExperimentProtocol, ExperimentReport, GridSpec, TunedParams};
pub use word::Word;
