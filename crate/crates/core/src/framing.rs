//! Sentence <-> bit framing and segmentation.
//!
//! A sentence is carried as 8-bit ASCII, zero-padded to a fixed number of bytes,
//! expanded MSB-first within each byte.

use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use thiserror::Error;

/// Frame size used throughout the experiments (512 bits).
pub const DEFAULT_FRAME_BYTES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FramingError {
    #[error("sentence has {len} characters, frame holds {max}")]
    TooLong { len: usize, max: usize },
    #[error("non-ASCII character {ch:?} at position {position}")]
    NonAscii { position: usize, ch: char },
    #[error("bit length {0} is not a multiple of 8")]
    BitLength(usize),
    #[error("{q} segments do not divide {bits} bits")]
    Indivisible { q: usize, bits: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceFrame {
    pub text: String,
    /// ASCII codes followed by 0x00 padding.
    pub raw_bytes: Vec<u8>,
    pub bits: Vec<u8>,
    pub char_len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentSet {
    pub q: usize,
    pub segments: Vec<Vec<u8>>,
    /// Half-open character range carried by each segment.
    pub char_spans: Vec<Range<usize>>,
}

pub fn sentence_to_frame(text: &str, frame_bytes: usize) -> Result<SentenceFrame, FramingError> {
    let mut raw_bytes = Vec::with_capacity(frame_bytes);
    for (position, ch) in text.chars().enumerate() {
        if !ch.is_ascii() {
            return Err(FramingError::NonAscii { position, ch });
        }
        raw_bytes.push(ch as u8);
    }
    let char_len = raw_bytes.len();
    if char_len > frame_bytes {
        return Err(FramingError::TooLong { len: char_len, max: frame_bytes });
    }
    raw_bytes.resize(frame_bytes, 0);
    let bits = bytes_to_bits(&raw_bytes);
    Ok(SentenceFrame { text: String::from(text), raw_bytes, bits, char_len })
}

/// MSB-first expansion.
pub fn bytes_to_bits(bytes: &[u8]) -> Vec<u8> {
    bytes.iter().flat_map(|&b| (0..8).rev().map(move |i| (b >> i) & 1)).collect()
}

pub fn bits_to_bytes(bits: &[u8]) -> Result<Vec<u8>, FramingError> {
    if !bits.len().is_multiple_of(8) {
        return Err(FramingError::BitLength(bits.len()));
    }
    Ok(bits.chunks(8).map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | (b & 1))).collect())
}

/// Glyphs for bytes that are not printable ASCII: code page 437 shapes, with 0x00
/// shown as U+2400 and 0xFF (a no-break space in CP437) as U+25A1 so that every
/// placeholder is a single visible non-whitespace character.
const LOW_GLYPHS: [char; 32] = [
    '\u{2400}', '☺', '☻', '♥', '♦', '♣', '♠', '•', '◘', '○', '◙', '♂', '♀', '♪', '♫', '☼', '►', '◄', '↕', '‼', '¶', '§', '▬', '↨', '↑',
    '↓', '→', '←', '∟', '↔', '▲', '▼',
];
const DEL_GLYPH: char = '⌂';
const HIGH_GLYPHS: [char; 128] = [
    'Ç', 'ü', 'é', 'â', 'ä', 'à', 'å', 'ç', 'ê', 'ë', 'è', 'ï', 'î', 'ì', 'Ä', 'Å', 'É', 'æ', 'Æ', 'ô', 'ö', 'ò', 'û', 'ù', 'ÿ', 'Ö',
    'Ü', '¢', '£', '¥', '₧', 'ƒ', 'á', 'í', 'ó', 'ú', 'ñ', 'Ñ', 'ª', 'º', '¿', '⌐', '¬', '½', '¼', '¡', '«', '»', '░', '▒', '▓', '│',
    '┤', '╡', '╢', '╖', '╕', '╣', '║', '╗', '╝', '╜', '╛', '┐', '└', '┴', '┬', '├', '─', '┼', '╞', '╟', '╚', '╔', '╩', '╦', '╠', '═',
    '╬', '╧', '╨', '╤', '╥', '╙', '╘', '╒', '╓', '╫', '╪', '┘', '┌', '█', '▄', '▌', '▐', '▀', 'α', 'ß', 'Γ', 'π', 'Σ', 'σ', 'µ', 'τ',
    'Φ', 'Θ', 'Ω', 'δ', '∞', 'φ', 'ε', '∩', '≡', '±', '≥', '≤', '⌠', '⌡', '÷', '≈', '°', '∙', '·', '√', 'ⁿ', '²', '■', '\u{25A1}',
];

/// Display character of one received byte.
pub fn display_char(byte: u8) -> char {
    match byte {
        32..=126 => byte as char,
        0..=31 => LOW_GLYPHS[byte as usize],
        127 => DEL_GLYPH,
        128..=255 => HIGH_GLYPHS[(byte - 128) as usize],
    }
}

/// Inverse of [`display_char`].
pub fn display_byte(ch: char) -> Option<u8> {
    match ch as u32 {
        32..=126 => Some(ch as u8),
        _ if ch == DEL_GLYPH => Some(127),
        _ => LOW_GLYPHS
            .iter()
            .position(|&g| g == ch)
            .map(|i| i as u8)
            .or_else(|| HIGH_GLYPHS.iter().position(|&g| g == ch).map(|i| 128 + i as u8)),
    }
}

/// Received frame rendered for display, with its raw bytes kept exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedSentence {
    /// One character per byte, trailing 0x00 run removed.
    pub display: String,
    pub raw_bytes: Vec<u8>,
}

pub fn frame_to_sentence(bits: &[u8]) -> Result<DecodedSentence, FramingError> {
    let raw_bytes = bits_to_bytes(bits)?;
    let end = raw_bytes.iter().rposition(|&b| b != 0).map_or(0, |p| p + 1);
    let display = raw_bytes[..end].iter().map(|&b| display_char(b)).collect();
    Ok(DecodedSentence { display, raw_bytes })
}

pub fn segment(frame: &SentenceFrame, q: usize) -> Result<SegmentSet, FramingError> {
    segment_bits(&frame.bits, q)
}

pub fn segment_bits(bits: &[u8], q: usize) -> Result<SegmentSet, FramingError> {
    if q == 0 || !bits.len().is_multiple_of(q) {
        return Err(FramingError::Indivisible { q, bits: bits.len() });
    }
    let len = bits.len() / q;
    let segments = bits.chunks(len).map(<[u8]>::to_vec).collect();
    Ok(SegmentSet { q, segments, char_spans: segment_char_spans(bits.len(), q) })
}

/// Character range of each of `q` equal segments of a `total_bits` frame. A
/// character straddling a boundary belongs to both neighbours.
pub fn segment_char_spans(total_bits: usize, q: usize) -> Vec<Range<usize>> {
    let len = total_bits / q;
    (0..q).map(|j| (j * len) / 8..((j + 1) * len).div_ceil(8)).collect()
}

pub fn reassemble(segs: &SegmentSet) -> Vec<u8> {
    segs.segments.concat()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn single_char_frame() {
        let f = sentence_to_frame("A", 2).unwrap();
        assert_eq!(f.raw_bytes, vec![0x41, 0x00]);
        assert_eq!(f.bits, vec![0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(f.char_len, 1);
    }

    #[test]
    fn padding_lengths() {
        let s64: String = "x".repeat(64);
        let f = sentence_to_frame(&s64, 64).unwrap();
        assert!(f.raw_bytes.iter().all(|&b| b == b'x'));
        let s57: String = "y".repeat(57);
        let f = sentence_to_frame(&s57, 64).unwrap();
        assert_eq!(f.raw_bytes.iter().filter(|&&b| b == 0).count(), 7);
        assert_eq!(f.bits.len(), 512);
    }

    #[test]
    fn framing_errors() {
        assert_eq!(sentence_to_frame(&"z".repeat(65), 64), Err(FramingError::TooLong { len: 65, max: 64 }));
        assert_eq!(sentence_to_frame("caf\u{e9}", 64), Err(FramingError::NonAscii { position: 3, ch: '\u{e9}' }));
        assert_eq!(frame_to_sentence(&[0, 1, 0]), Err(FramingError::BitLength(3)));
    }

    #[test]
    fn display_round_trip_and_placeholders() {
        let f = sentence_to_frame("cat", 8).unwrap();
        let d = frame_to_sentence(&f.bits).unwrap();
        assert_eq!(d.display, "cat");
        assert_eq!(d.raw_bytes, f.raw_bytes);

        let d = frame_to_sentence(&bytes_to_bits(&[b'a', 0xE5, 0, b'b', 0, 0])).unwrap();
        assert_eq!(d.display, "aσ\u{2400}b");
        assert_eq!(d.raw_bytes, vec![b'a', 0xE5, 0, b'b', 0, 0]);
    }

    #[test]
    fn glyph_table_is_a_bijection() {
        let mut seen = alloc::collections::BTreeSet::new();
        for b in 0..=255u8 {
            let c = display_char(b);
            assert!(!c.is_whitespace() || b == b' ', "byte {b:#x} renders as whitespace");
            assert!(seen.insert(c), "duplicate glyph for {b:#x}");
            assert_eq!(display_byte(c), Some(b));
        }
    }

    #[test]
    fn segmentation_examples() {
        let f = sentence_to_frame("Everything went back to normal in the town.", 64).unwrap();
        let s = segment(&f, 8).unwrap();
        assert_eq!(s.segments.len(), 8);
        assert!(s.segments.iter().all(|seg| seg.len() == 64));
        assert_eq!(s.char_spans[0], 0..8);
        assert_eq!(s.char_spans[1], 8..16);
        assert_eq!(reassemble(&s), f.bits);

        let one = segment(&f, 1).unwrap();
        assert_eq!(one.segments[0], f.bits);

        let s16 = segment(&f, 16).unwrap();
        assert!(s16.segments.iter().all(|seg| seg.len() == 32));
        assert_eq!(s16.char_spans[3], 12..16);

        assert!(segment(&f, 7).is_err());
    }

    #[test]
    fn corrupted_segment_renders_as_garble() {
        let f = sentence_to_frame("Everything went back to normal in the town.", 64).unwrap();
        let mut bytes = f.raw_bytes.clone();
        bytes[8..16].copy_from_slice(&[0x86, 0x19, 0xD2, 0xAC, 0x11, 0x9C, 0x88, 0xB7]);
        let d = frame_to_sentence(&bytes_to_bits(&bytes)).unwrap();
        let chars: Vec<char> = d.display.chars().collect();
        assert_eq!(chars.iter().take(8).collect::<String>(), "Everythi");
        assert!(chars[8..16].iter().all(|c| !c.is_ascii()));
        assert_eq!(chars[16..].iter().collect::<String>(), "back to normal in the town.");
    }
}
