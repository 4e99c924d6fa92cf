//! Lexicon loading, tokenization of running text, and IV/OOV vocabulary
//! splitting.
//!
//! Tokenization is deliberately simple and centralized here: tokens are
//! maximal runs of letters, digits, and apostrophes; runs without a letter,
//! mention/hashtag runs (preceded by '@' or '#'), and anything inside a
//! URL-shaped chunk are discarded.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::word::Word;

/// Reads one word per line; blank lines and '#' comment lines are skipped,
/// everything is lowercased and deduplicated.
pub fn load_lexicon<R: BufRead>(reader: R, source_name: &str) -> Result<BTreeSet<Word>> {
    let mut words = BTreeSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(source_name, e))?;
        let entry = line.trim();
        if entry.is_empty() || entry.starts_with('#') {
            continue;
        }
        if entry.contains(char::is_whitespace) {
            return Err(Error::parse(
                source_name,
                line_no,
                format!("expected one word, found {entry:?}"),
            ));
        }
        words.insert(Word::new(entry).expect("entry is non-empty"));
    }
    if words.is_empty() {
        return Err(Error::data(source_name, "empty lexicon"));
    }
    Ok(words)
}

/// A kept token: its normalized word and the byte span it occupies in the
/// source line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub word: Word,
    pub start: usize,
    pub end: usize,
}

fn is_token_char(c: char) -> bool {
    c.is_alphabetic() || c.is_numeric() || c == '\''
}

fn is_url_shaped(chunk: &str) -> bool {
    let lower = chunk.to_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

/// Extracts the kept tokens of one line, with byte spans, in order.
pub fn tokenize_line(line: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    // Whitespace-separated chunks first, so URL detection sees the whole
    // chunk rather than its letter runs.
    let mut chunk_start = None;
    let mut boundaries: Vec<(usize, usize)> = Vec::new();
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = chunk_start.take() {
                boundaries.push((s, i));
            }
        } else if chunk_start.is_none() {
            chunk_start = Some(i);
        }
    }
    if let Some(s) = chunk_start {
        boundaries.push((s, line.len()));
    }

    for (cs, ce) in boundaries {
        let chunk = &line[cs..ce];
        if is_url_shaped(chunk) {
            continue;
        }
        let mut run_start: Option<usize> = None;
        let mut prev_char: Option<char> = None;
        let flush = |start: Option<usize>, end: usize, opener: Option<char>, out: &mut Vec<Token>| {
            let Some(s) = start else { return };
            let run = &chunk[s..end];
            if matches!(opener, Some('@') | Some('#')) {
                return;
            }
            if !run.chars().any(char::is_alphabetic) {
                return;
            }
            out.push(Token {
                word: Word::new(run).expect("run is non-empty"),
                start: cs + s,
                end: cs + end,
            });
        };
        let mut opener: Option<char> = None;
        for (i, c) in chunk.char_indices() {
            if is_token_char(c) {
                if run_start.is_none() {
                    run_start = Some(i);
                    opener = prev_char;
                }
            } else {
                flush(run_start.take(), i, opener, &mut tokens);
            }
            prev_char = Some(c);
        }
        flush(run_start.take(), chunk.len(), opener, &mut tokens);
    }
    tokens
}

/// Surface vocabulary of a corpus, partitioned against a lexicon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabularySplit {
    /// Tokens found in the lexicon.
    pub iv: BTreeSet<Word>,
    /// Tokens absent from the lexicon: normalization candidates.
    pub oov: BTreeSet<Word>,
    /// Occurrence count of every kept token.
    pub token_counts: BTreeMap<Word, u64>,
}

/// Tokenizes a line stream and routes each kept token into the IV or OOV
/// set by lexicon membership.
pub fn split_corpus<R: BufRead>(
    reader: R,
    lexicon: &BTreeSet<Word>,
    source_name: &str,
) -> Result<VocabularySplit> {
    let mut split = VocabularySplit {
        iv: BTreeSet::new(),
        oov: BTreeSet::new(),
        token_counts: BTreeMap::new(),
    };
    for line in reader.lines() {
        let line = line.map_err(|e| Error::io(source_name, e))?;
        for token in tokenize_line(&line) {
            *split.token_counts.entry(token.word.clone()).or_insert(0) += 1;
            if lexicon.contains(&token.word) {
                split.iv.insert(token.word);
            } else {
                split.oov.insert(token.word);
            }
        }
    }
    Ok(split)
}

/// Rewrites one line, substituting each kept token for which `replace`
/// yields a word; all other text (spacing, punctuation, discarded tokens,
/// original casing) is preserved byte for byte.
pub fn rewrite_line<F>(line: &str, mut replace: F) -> String
where
    F: FnMut(&Word) -> Option<Word>,
{
    let mut out = String::with_capacity(line.len());
    let mut pos = 0;
    for token in tokenize_line(line) {
        out.push_str(&line[pos..token.start]);
        match replace(&token.word) {
            Some(rep) => out.push_str(rep.as_str()),
            None => out.push_str(&line[token.start..token.end]),
        }
        pos = token.end;
    }
    out.push_str(&line[pos..]);
    out
}
