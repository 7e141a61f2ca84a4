//! One sentence through the link: framing, per-segment transmission, display,
//! semantic correction, and optional retransmission rounds.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::channel::NoiseStream;
use crate::framing::{frame_to_sentence, segment, sentence_to_frame, DecodedSentence, FramingError, SegmentSet};
use crate::harq::{crc_genie_select, select_retransmissions, HarqError, HarqPolicy, LinkError, SegmentLink};
use crate::sec::{map_spans, segment_confidences, Corrector, SecError, SecOutcome};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrialError {
    #[error(transparent)]
    Framing(#[from] FramingError),
    #[error(transparent)]
    Sec(#[from] SecError),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Harq(#[from] HarqError),
    #[error("link carries {actual}-bit segments, frame needs {expected}")]
    SegmentSize { expected: usize, actual: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HarqMode {
    Off,
    SemanticConfidence(HarqPolicy),
    /// Retransmits truly erroneous segments, chosen uniformly.
    CrcGenie { max_retx_per_round: usize, rounds: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialConfig {
    pub q: usize,
    pub frame_bytes: usize,
    pub harq: HarqMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: usize,
    /// Confidences the selection was made from (empty for the genie).
    pub gamma: Vec<f64>,
    pub selected: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub reference: String,
    /// First pass, before correction.
    pub decoded_text: String,
    /// First pass, after correction.
    pub sec_text: String,
    /// After retransmissions, before the final correction.
    pub harq_decoded_text: String,
    /// After retransmissions and correction.
    pub final_text: String,
    pub segment_errors: Vec<bool>,
    pub final_segment_errors: Vec<bool>,
    pub frame_error: bool,
    pub sec_error: bool,
    pub harq_frame_error: bool,
    pub final_error: bool,
    /// First-pass segment confidences.
    pub gamma: Vec<f64>,
    pub rounds: Vec<RoundRecord>,
    pub retransmissions: usize,
}

/// Runs SEC on a received display string. Nothing to correct yields an empty
/// outcome rather than an error.
pub fn correct_display(corrector: &dyn Corrector, display: &str) -> Result<SecOutcome, SecError> {
    if display.is_empty() {
        return Ok(SecOutcome { corrected_text: String::new(), tokens: Vec::new(), backend: corrector.backend() });
    }
    let out = corrector.correct(display)?;
    out.validate()?;
    Ok(out)
}

/// Segment confidences for a received display string. Token spans are carried
/// back onto the display through a minimal edit script, so characters the
/// corrector deleted still count against the token that absorbed them. Without
/// tokens every segment gets confidence 1.
pub fn display_confidences(display: &str, outcome: &SecOutcome, segs: &SegmentSet) -> Result<Vec<f64>, SecError> {
    if outcome.tokens.is_empty() {
        return Ok(alloc::vec![1.0; segs.q]);
    }
    if outcome.corrected_text == display {
        return Ok(segment_confidences(outcome, &segs.char_spans)?.gamma);
    }
    let spans: Vec<_> = outcome.tokens.iter().map(|t| t.char_start..t.char_end).collect();
    let mut in_display = outcome.clone();
    for (t, r) in in_display.tokens.iter_mut().zip(map_spans(&outcome.corrected_text, display, &spans)) {
        t.char_start = r.start;
        t.char_end = r.end;
    }
    Ok(segment_confidences(&in_display, &segs.char_spans)?.gamma)
}

/// A text is a block error unless it re-frames to exactly the transmitted bytes.
fn text_error(text: &str, truth: &[u8]) -> bool {
    sentence_to_frame(text, truth.len()).map_or(true, |f| f.raw_bytes != truth)
}

struct Received {
    segments: Vec<Vec<u8>>,
    errors: Vec<bool>,
    decoded: DecodedSentence,
}

impl Received {
    fn refresh(&mut self, truth: &SegmentSet) -> Result<(), FramingError> {
        self.errors = self.segments.iter().zip(&truth.segments).map(|(r, t)| r != t).collect();
        self.decoded = frame_to_sentence(&self.segments.concat())?;
        Ok(())
    }
}

/// Noise for segment `j` in round `r` comes from `stream.with_segment(j).with_round(r)`.
pub fn run_trial(
    sentence: &str,
    cfg: &TrialConfig,
    link: &dyn SegmentLink,
    corrector: &dyn Corrector,
    stream: NoiseStream,
) -> Result<TrialOutcome, TrialError> {
    let frame = sentence_to_frame(sentence, cfg.frame_bytes)?;
    let segs = segment(&frame, cfg.q)?;
    let expected = frame.bits.len() / cfg.q;
    if link.segment_bits() != expected {
        return Err(TrialError::SegmentSize { expected, actual: link.segment_bits() });
    }

    let mut segments = Vec::with_capacity(cfg.q);
    for (j, seg) in segs.segments.iter().enumerate() {
        segments.push(link.transmit(seg, &stream.with_segment(j as u32).with_round(0))?.bits);
    }
    let mut rx = Received { segments, errors: Vec::new(), decoded: DecodedSentence { display: String::new(), raw_bytes: Vec::new() } };
    rx.refresh(&segs)?;

    let segment_errors = rx.errors.clone();
    let decoded_text = rx.decoded.display.clone();
    let frame_error = rx.decoded.raw_bytes != frame.raw_bytes;
    let mut sec = correct_display(corrector, &rx.decoded.display)?;
    let sec_text = sec.corrected_text.clone();
    let mut gamma = display_confidences(&rx.decoded.display, &sec, &segs)?;
    let first_gamma = gamma.clone();

    let (max_rounds, genie_budget) = match cfg.harq {
        HarqMode::Off => (0, 0),
        HarqMode::SemanticConfidence(p) => {
            p.validate()?;
            (p.rounds, 0)
        }
        HarqMode::CrcGenie { max_retx_per_round, rounds } => {
            if max_retx_per_round == 0 {
                return Err(HarqError::ZeroBudget.into());
            }
            (rounds, max_retx_per_round)
        }
    };

    let mut rounds = Vec::new();
    let mut retransmissions = 0;
    for round in 1..=max_rounds {
        let (selected, used_gamma) = match cfg.harq {
            HarqMode::SemanticConfidence(p) => (select_retransmissions(&gamma, &p)?, gamma.clone()),
            _ => (crc_genie_select(&rx.errors, genie_budget, &stream.with_segment(u32::MAX).with_round(round as u32)), Vec::new()),
        };
        let done = selected.is_empty();
        for &j in &selected {
            let s = stream.with_segment(j as u32).with_round(round as u32);
            rx.segments[j] = link.transmit(&segs.segments[j], &s)?.bits;
        }
        retransmissions += selected.len();
        rounds.push(RoundRecord { round, gamma: used_gamma, selected });
        if done {
            break;
        }
        rx.refresh(&segs)?;
        sec = correct_display(corrector, &rx.decoded.display)?;
        gamma = display_confidences(&rx.decoded.display, &sec, &segs)?;
    }

    Ok(TrialOutcome {
        reference: String::from(sentence),
        sec_error: text_error(&sec_text, &frame.raw_bytes),
        decoded_text,
        sec_text,
        harq_decoded_text: rx.decoded.display.clone(),
        final_error: text_error(&sec.corrected_text, &frame.raw_bytes),
        final_text: sec.corrected_text,
        segment_errors,
        final_segment_errors: rx.errors,
        frame_error,
        harq_frame_error: rx.decoded.raw_bytes != frame.raw_bytes,
        gamma: first_gamma,
        rounds,
        retransmissions,
    })
}
