//! Sentence corpora: one sentence per line, ASCII, at most one frame long.

use std::path::Path;

use msc_core::framing::{sentence_to_frame, FramingError};
use msc_core::sec::Lexicon;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedLine {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub sentences: Vec<String>,
    pub skipped: Vec<SkippedLine>,
}

impl Corpus {
    /// Blank lines are ignored; lines that do not fit a frame are skipped and
    /// reported rather than failing the whole load.
    pub fn parse(text: &str, frame_bytes: usize) -> Corpus {
        let mut corpus = Corpus::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            match sentence_to_frame(line, frame_bytes) {
                Ok(_) => corpus.sentences.push(line.to_string()),
                Err(e @ (FramingError::TooLong { .. } | FramingError::NonAscii { .. })) => {
                    corpus.skipped.push(SkippedLine { line: i + 1, reason: e.to_string() })
                }
                Err(e) => unreachable!("framing a string cannot fail with {e}"),
            }
        }
        corpus
    }

    pub fn load(path: &Path, frame_bytes: usize) -> std::io::Result<Corpus> {
        Ok(Corpus::parse(&std::fs::read_to_string(path)?, frame_bytes))
    }

    pub fn truncate(&mut self, max: usize) {
        self.sentences.truncate(max);
    }

    pub fn lexicon(&self) -> Lexicon {
        Lexicon::from_sentences(self.sentences.iter().map(String::as_str))
    }
}

/// Lexicon file: `word count` per line, or a bare word counting once.
pub fn parse_lexicon(text: &str) -> Result<Lexicon, String> {
    let mut lex = Lexicon::new();
    for (i, line) in text.lines().enumerate() {
        let mut parts = line.split_whitespace();
        let Some(word) = parts.next() else { continue };
        let count = match parts.next() {
            Some(c) => c.parse::<u64>().map_err(|e| format!("line {}: {c:?}: {e}", i + 1))?,
            None => 1,
        };
        lex.insert(word, count);
    }
    if lex.is_empty() {
        return Err("lexicon is empty".into());
    }
    Ok(lex)
}
