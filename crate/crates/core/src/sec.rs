//! Semantic error correction contract: corrected text with token spans and
//! generation probabilities, per-segment confidence, and the built-in correctors.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use thiserror::Error;

use crate::metrics::edit_distance;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SecError {
    #[error("empty input")]
    EmptyInput,
    #[error("outcome has no tokens")]
    NoTokens,
    #[error("token {index}: {reason}")]
    InvalidSpan { index: usize, reason: String },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("request timed out")]
    Timeout,
    #[error("malformed response: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SecBackend {
    Identity,
    Lexicon,
    BartService,
}

impl SecBackend {
    pub fn as_str(&self) -> &'static str {
        match self {
            SecBackend::Identity => "identity",
            SecBackend::Lexicon => "lexicon",
            SecBackend::BartService => "bart",
        }
    }
}

/// One generated token. Offsets are character (not byte) positions in the
/// corrected sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenSpan {
    pub text: String,
    pub char_start: usize,
    pub char_end: usize,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecOutcome {
    pub corrected_text: String,
    pub tokens: Vec<TokenSpan>,
    pub backend: SecBackend,
}

impl SecOutcome {
    /// Checks span ordering, bounds and probabilities. Token text is not compared
    /// with the span, since subword tokenizers may mark word boundaries in it.
    pub fn validate(&self) -> Result<(), SecError> {
        let char_count = self.corrected_text.chars().count();
        if self.tokens.is_empty() && !self.corrected_text.trim().is_empty() {
            return Err(SecError::NoTokens);
        }
        let mut prev_end = 0;
        for (index, t) in self.tokens.iter().enumerate() {
            let bad = |reason: &str| Err(SecError::InvalidSpan { index, reason: reason.to_string() });
            if t.char_start >= t.char_end {
                return bad("span end must exceed start");
            }
            if t.char_start < prev_end {
                return bad("spans overlap or are out of order");
            }
            if t.char_end > char_count {
                return bad("span exceeds corrected text");
            }
            if !(t.prob > 0.0 && t.prob <= 1.0) {
                return bad("probability outside (0, 1]");
            }
            prev_end = t.char_end;
        }
        Ok(())
    }

    /// Probability of the whole output: product of token probabilities.
    pub fn sentence_prob(&self) -> f64 {
        self.tokens.iter().map(|t| t.prob).product()
    }
}

/// A semantic corrector backend.
pub trait Corrector {
    fn backend(&self) -> SecBackend;
    fn correct(&self, garbled_text: &str) -> Result<SecOutcome, SecError>;
}

/// Whitespace words with their character ranges.
pub fn whitespace_words(text: &str) -> Vec<(Range<usize>, &str)> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None; // (char index, byte index)
    let mut char_idx = 0;
    for (byte_idx, ch) in text.char_indices() {
        if ch.is_whitespace() {
            if let Some((cs, bs)) = start.take() {
                out.push((cs..char_idx, &text[bs..byte_idx]));
            }
        } else if start.is_none() {
            start = Some((char_idx, byte_idx));
        }
        char_idx += 1;
    }
    if let Some((cs, bs)) = start {
        out.push((cs..char_idx, &text[bs..]));
    }
    out
}

/// SEC switched off: the input comes back unchanged, one token per word, prob 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityCorrector;

impl Corrector for IdentityCorrector {
    fn backend(&self) -> SecBackend {
        SecBackend::Identity
    }

    fn correct(&self, garbled_text: &str) -> Result<SecOutcome, SecError> {
        if garbled_text.is_empty() {
            return Err(SecError::EmptyInput);
        }
        let tokens = whitespace_words(garbled_text)
            .into_iter()
            .map(|(r, w)| TokenSpan { text: w.to_string(), char_start: r.start, char_end: r.end, prob: 1.0 })
            .collect();
        Ok(SecOutcome { corrected_text: garbled_text.to_string(), tokens, backend: SecBackend::Identity })
    }
}

/// Lowercased word -> unigram count.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    counts: BTreeMap<String, u64>,
}

fn ascii_lower(word: &str) -> String {
    word.chars().map(|c| c.to_ascii_lowercase()).collect()
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, word: &str, count: u64) {
        *self.counts.entry(ascii_lower(word)).or_insert(0) += count;
    }

    /// Counts every whitespace token of every line.
    pub fn from_sentences<'a, I: IntoIterator<Item = &'a str>>(sentences: I) -> Self {
        let mut lex = Lexicon::new();
        for s in sentences {
            for (_, w) in whitespace_words(s) {
                lex.insert(w, 1);
            }
        }
        lex
    }

    pub fn contains(&self, word: &str) -> bool {
        self.counts.contains_key(&ascii_lower(word))
    }

    pub fn count(&self, word: &str) -> u64 {
        self.counts.get(&ascii_lower(word)).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(w, &c)| (w.as_str(), c))
    }

    /// Closest entry by (edit distance, higher count, lexicographic order).
    pub fn nearest(&self, word: &str) -> Option<(&str, usize)> {
        let target: Vec<char> = ascii_lower(word).chars().collect();
        let mut best: Option<(&str, usize, u64)> = None;
        let mut cand: Vec<char> = Vec::new();
        for (w, &count) in &self.counts {
            cand.clear();
            cand.extend(w.chars());
            if let Some((_, d, _)) = best {
                if cand.len().abs_diff(target.len()) > d {
                    continue;
                }
            }
            let d = edit_distance(&target, &cand);
            // BTreeMap iterates in lexicographic order, so strict comparison keeps the
            // smaller word on a full tie.
            let better = match best {
                None => true,
                Some((_, bd, bc)) => d < bd || (d == bd && count > bc),
            };
            if better {
                best = Some((w.as_str(), d, count));
            }
        }
        best.map(|(w, d, _)| (w, d))
    }
}

/// Deterministic dictionary corrector.
///
/// Words containing a non-printable-ASCII glyph, and words with letters that are
/// absent from the lexicon, are replaced by the nearest lexicon entry (prob
/// `1 / (1 + distance)`, leading capital restored). Words found in the lexicon are
/// kept with prob 1; letter-free words outside the lexicon (numbers, punctuation)
/// are kept with prob 0.5.
pub fn lexicon_correct(garbled_text: &str, lexicon: &Lexicon) -> SecOutcome {
    let mut corrected = String::with_capacity(garbled_text.len());
    let mut tokens = Vec::new();
    let mut out_chars = 0usize;
    let mut last_byte = 0usize;
    let mut last_char = 0usize;
    for (range, word) in whitespace_words(garbled_text) {
        // copy the whitespace run in front of the word
        let ws: String = garbled_text[last_byte..].chars().take(range.start - last_char).collect();
        out_chars += ws.chars().count();
        corrected.push_str(&ws);
        last_byte += ws.len() + word.len();
        last_char = range.end;

        let garbled = word.chars().any(|c| !c.is_ascii_graphic());
        let has_letters = word.chars().any(|c| c.is_ascii_alphabetic());
        let known = lexicon.contains(word);
        let (text, prob) = if !garbled && known {
            (word.to_string(), 1.0)
        } else if !garbled && !has_letters {
            (word.to_string(), 0.5)
        } else {
            match lexicon.nearest(word) {
                Some((best, d)) => (restore_case(best, word), 1.0 / (1.0 + d as f64)),
                None => (word.to_string(), 0.5),
            }
        };
        let len = text.chars().count();
        tokens.push(TokenSpan { text: text.clone(), char_start: out_chars, char_end: out_chars + len, prob });
        corrected.push_str(&text);
        out_chars += len;
    }
    corrected.push_str(&garbled_text[last_byte..]);
    SecOutcome { corrected_text: corrected, tokens, backend: SecBackend::Lexicon }
}

fn restore_case(replacement: &str, original: &str) -> String {
    let upper = original.chars().next().is_some_and(|c| c.is_ascii_uppercase());
    let mut out = String::with_capacity(replacement.len());
    for (i, c) in replacement.chars().enumerate() {
        out.push(if i == 0 && upper { c.to_ascii_uppercase() } else { c });
    }
    out
}

#[derive(Debug, Clone)]
pub struct LexiconCorrector {
    pub lexicon: Lexicon,
}

impl Corrector for LexiconCorrector {
    fn backend(&self) -> SecBackend {
        SecBackend::Lexicon
    }

    fn correct(&self, garbled_text: &str) -> Result<SecOutcome, SecError> {
        if garbled_text.is_empty() {
            return Err(SecError::EmptyInput);
        }
        Ok(lexicon_correct(garbled_text, &self.lexicon))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentConfidence {
    /// `gamma_j` per segment, in (0, 1].
    pub gamma: Vec<f64>,
    /// Tokens overlapping each segment.
    pub overlap_sets: Vec<Vec<usize>>,
    /// Fraction of each overlapping token's characters inside the segment, aligned
    /// with `overlap_sets`.
    pub weights: Vec<Vec<f64>>,
}

/// Segment confidence: mean over overlapping tokens of (overlap fraction x token
/// probability). Segments no token touches get confidence 1.
pub fn segment_confidences(outcome: &SecOutcome, segment_spans: &[Range<usize>]) -> Result<SegmentConfidence, SecError> {
    if outcome.tokens.is_empty() {
        return Err(SecError::NoTokens);
    }
    let mut gamma = Vec::with_capacity(segment_spans.len());
    let mut overlap_sets = Vec::with_capacity(segment_spans.len());
    let mut weights = Vec::with_capacity(segment_spans.len());
    for seg in segment_spans {
        let mut set = Vec::new();
        let mut ws = Vec::new();
        let mut acc = 0.0;
        for (i, t) in outcome.tokens.iter().enumerate() {
            let lo = t.char_start.max(seg.start);
            let hi = t.char_end.min(seg.end);
            if hi > lo {
                let w = (hi - lo) as f64 / (t.char_end - t.char_start) as f64;
                set.push(i);
                ws.push(w);
                acc += w * t.prob;
            }
        }
        gamma.push(if set.is_empty() { 1.0 } else { acc / set.len() as f64 });
        overlap_sets.push(set);
        weights.push(ws);
    }
    Ok(SegmentConfidence { gamma, overlap_sets, weights })
}

/// Maps character spans of `source` onto `target` through a minimal edit script.
///
/// Characters inserted at a boundary go to the span that starts there. Positions
/// past the end of `source` map past the end of `target` by the same offset.
pub fn map_spans(source: &str, target: &str, spans: &[Range<usize>]) -> Vec<Range<usize>> {
    let boundary = boundary_map(source, target);
    let (slen, tlen) = (boundary.len() - 1, boundary[boundary.len() - 1]);
    let map = |p: usize| if p <= slen { boundary[p] } else { tlen + (p - slen) };
    spans.iter().map(|r| map(r.start)..map(r.end)).collect()
}

/// `out[i]` is the target position aligned with source boundary `i`.
fn boundary_map(source: &str, target: &str) -> Vec<usize> {
    let s: Vec<char> = source.chars().collect();
    let t: Vec<char> = target.chars().collect();
    let (n, m) = (s.len(), t.len());
    if s == t {
        return (0..=n).collect();
    }
    let w = m + 1;
    let mut dp = vec![0usize; (n + 1) * w];
    for i in 0..=n {
        dp[i * w] = i;
    }
    for j in 0..=m {
        dp[j] = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = dp[(i - 1) * w + j - 1] + usize::from(s[i - 1] != t[j - 1]);
            dp[i * w + j] = sub.min(dp[(i - 1) * w + j] + 1).min(dp[i * w + j - 1] + 1);
        }
    }
    // backtrace from the end, preferring diagonal, then deletion, then insertion
    let mut ops = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = dp[i * w + j];
        if i > 0 && j > 0 && here == dp[(i - 1) * w + j - 1] + usize::from(s[i - 1] != t[j - 1]) {
            ops.push(0u8);
            i -= 1;
            j -= 1;
        } else if i > 0 && here == dp[(i - 1) * w + j] + 1 {
            ops.push(1);
            i -= 1;
        } else {
            ops.push(2);
            j -= 1;
        }
    }
    ops.reverse();
    let mut out = vec![usize::MAX; n + 1];
    let (mut i, mut j) = (0usize, 0usize);
    for op in ops {
        if out[i] == usize::MAX {
            out[i] = j;
        }
        match op {
            0 => {
                i += 1;
                j += 1;
            }
            1 => i += 1,
            _ => j += 1,
        }
    }
    if out[n] == usize::MAX {
        out[n] = m;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok(text: &str, start: usize, end: usize, prob: f64) -> TokenSpan {
        TokenSpan { text: text.to_string(), char_start: start, char_end: end, prob }
    }

    #[test]
    fn identity_tokens() {
        let o = IdentityCorrector.correct("the cat").unwrap();
        assert_eq!(o.corrected_text, "the cat");
        assert_eq!(o.tokens.len(), 2);
        assert!(o.tokens.iter().all(|t| t.prob == 1.0));
        assert_eq!((o.tokens[1].char_start, o.tokens[1].char_end), (4, 7));
        o.validate().unwrap();
        assert_eq!(IdentityCorrector.correct(""), Err(SecError::EmptyInput));
    }

    #[test]
    fn lexicon_examples() {
        let mut lex = Lexicon::new();
        for w in ["everything", "went", "back"] {
            lex.insert(w, 1);
        }
        let o = lexicon_correct("Everythi##g went back", &lex);
        assert_eq!(o.corrected_text, "Everything went back");
        o.validate().unwrap();

        let mut lex = Lexicon::new();
        lex.insert("went", 10);
        lex.insert("wet", 3);
        let o = lexicon_correct("wen#", &lex);
        assert_eq!(o.corrected_text, "went");
        assert_eq!(o.tokens[0].prob, 0.5);
    }

    #[test]
    fn lexicon_tie_breaks() {
        let mut lex = Lexicon::new();
        lex.insert("cat", 1);
        lex.insert("cut", 5);
        // "cxt" is distance 1 from both: higher count wins
        assert_eq!(lexicon_correct("cxt", &lex).corrected_text, "cut");
        let mut lex = Lexicon::new();
        lex.insert("cat", 2);
        lex.insert("cut", 2);
        assert_eq!(lexicon_correct("cxt", &lex).corrected_text, "cat");
    }

    #[test]
    fn lexicon_keeps_known_words_and_numbers() {
        let lex = Lexicon::from_sentences(["a man sits"]);
        let o = lexicon_correct("A man  sits 42", &lex);
        assert_eq!(o.corrected_text, "A man  sits 42");
        assert_eq!(o.tokens.iter().map(|t| t.prob).collect::<Vec<_>>(), vec![1.0, 1.0, 1.0, 0.5]);
        o.validate().unwrap();
    }

    #[test]
    fn lexicon_handles_placeholder_glyphs() {
        let lex = Lexicon::from_sentences(["the dog runs"]);
        let o = lexicon_correct("the d\u{263a}g runs", &lex);
        assert_eq!(o.corrected_text, "the dog runs");
        assert_eq!(o.tokens[1].prob, 0.5);
        o.validate().unwrap();
    }

    #[test]
    fn confidence_examples() {
        let o = SecOutcome { corrected_text: "abcdefghij".into(), tokens: vec![tok("abcdef", 0, 6, 0.9), tok("ghij", 6, 10, 0.5)], backend: SecBackend::Identity };
        let c = segment_confidences(&o, &[0..8, 8..16]).unwrap();
        assert!((c.gamma[0] - 0.575).abs() < 1e-12);
        assert!((c.gamma[1] - 0.25).abs() < 1e-12);
        assert_eq!(c.overlap_sets, vec![vec![0, 1], vec![1]]);

        let single = SecOutcome { corrected_text: "abcd".into(), tokens: vec![tok("abcd", 0, 4, 0.3)], backend: SecBackend::Identity };
        let c = segment_confidences(&single, &[0..4, 4..8]).unwrap();
        assert!((c.gamma[0] - 0.3).abs() < 1e-12);
        assert_eq!(c.gamma[1], 1.0);

        let empty = SecOutcome { corrected_text: String::new(), tokens: vec![], backend: SecBackend::Identity };
        assert_eq!(segment_confidences(&empty, &[0..8]), Err(SecError::NoTokens));
    }

    #[test]
    fn validation_catches_bad_spans() {
        let mut o = SecOutcome { corrected_text: "ab cd".into(), tokens: vec![tok("ab", 0, 2, 1.0), tok("cd", 3, 5, 1.0)], backend: SecBackend::BartService };
        o.validate().unwrap();
        o.tokens[1].char_end = 2;
        assert!(matches!(o.validate(), Err(SecError::InvalidSpan { index: 1, .. })));
        o.tokens[1] = tok("cd", 3, 5, 0.0);
        assert!(o.validate().is_err());
        o.tokens[1] = tok("cd", 3, 6, 0.5);
        assert!(o.validate().is_err());
    }

    #[test]
    fn span_mapping() {
        assert_eq!(map_spans("abcdefgh", "abcdefgh", &[0..4, 4..8]), vec![0..4, 4..8]);
        // one char inserted inside the first span
        assert_eq!(map_spans("abcdefgh", "abXcdefgh", &[0..4, 4..8]), vec![0..5, 5..9]);
        // deletion in the second span
        assert_eq!(map_spans("abcdefgh", "abcdegh", &[0..4, 4..8, 8..12]), vec![0..4, 4..7, 7..11]);
    }
}
