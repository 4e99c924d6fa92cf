//! Phonetic encoding and the similarity signal built on it.

mod double_metaphone;

pub use double_metaphone::{encode, PhoneticCodes, DEFAULT_MAX_CODE_LEN};

use crate::textsim;

/// Phonetic similarity: the best string similarity over all pairings of the
/// two words' codes. `None` when either word yields no code at all (no
/// encodable letters), in which case the signal is undefined rather than 0;
/// two unpronounceable tokens are not phonetically alike.
pub fn phonetic_similarity(a: &str, b: &str) -> Option<f64> {
    let ca = encode(a, DEFAULT_MAX_CODE_LEN);
    let cb = encode(b, DEFAULT_MAX_CODE_LEN);
    similarity_of_codes(&ca, &cb)
}

pub(crate) fn similarity_of_codes(a: &PhoneticCodes, b: &PhoneticCodes) -> Option<f64> {
    let mut best: Option<f64> = None;
    for code_a in a.codes() {
        for code_b in b.codes() {
            let s = textsim::string_similarity(code_a, code_b)
                .expect("codes() yields non-empty codes");
            best = Some(match best {
                Some(cur) if cur >= s => cur,
                _ => s,
            });
        }
    }
    best
}
