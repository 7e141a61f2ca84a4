//! Segment retransmission: semantic-confidence selection and the CRC-genie
//! baseline, plus the per-segment link (encode, channel, decode).

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::channel::{awgn, bpsk_modulate, llr, ChannelParams, NoiseStream};
use crate::code::Code;
use crate::decoders::DecoderKind;
use crate::error::{CodeError, DecodeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarqError {
    #[error("threshold {0} outside [0, 1]")]
    Threshold(f64),
    #[error("at least one retransmission per round is required")]
    ZeroBudget,
    #[error("confidence of segment {0} is not a number")]
    NanConfidence(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarqPolicy {
    /// Segments with confidence strictly below this are candidates.
    pub threshold: f64,
    /// Retransmissions per round (`u`).
    pub max_retx_per_round: usize,
    pub rounds: usize,
}

impl HarqPolicy {
    pub fn new(threshold: f64, max_retx_per_round: usize, rounds: usize) -> Result<Self, HarqError> {
        let p = HarqPolicy { threshold, max_retx_per_round, rounds };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), HarqError> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(HarqError::Threshold(self.threshold));
        }
        if self.max_retx_per_round == 0 {
            return Err(HarqError::ZeroBudget);
        }
        Ok(())
    }
}

/// Segments with `gamma < threshold`, least confident first (ties: lower index),
/// at most `u` of them.
pub fn select_retransmissions(gamma: &[f64], policy: &HarqPolicy) -> Result<Vec<usize>, HarqError> {
    if let Some(j) = gamma.iter().position(|g| g.is_nan()) {
        return Err(HarqError::NanConfidence(j));
    }
    let mut cand: Vec<usize> = (0..gamma.len()).filter(|&j| gamma[j] < policy.threshold).collect();
    cand.sort_by(|&a, &b| gamma[a].total_cmp(&gamma[b]).then(a.cmp(&b)));
    cand.truncate(policy.max_retx_per_round);
    Ok(cand)
}

/// Baseline with a perfect per-segment error detector: up to `u` of the erroneous
/// segments, drawn uniformly from `stream`, returned in ascending order.
pub fn crc_genie_select(segment_errors: &[bool], u: usize, stream: &NoiseStream) -> Vec<usize> {
    let mut errored: Vec<usize> = (0..segment_errors.len()).filter(|&j| segment_errors[j]).collect();
    if errored.len() > u {
        let mut rng = stream.rng();
        let (chosen, _) = errored.partial_shuffle(&mut rng, u);
        let mut chosen = chosen.to_vec();
        chosen.sort_unstable();
        errored = chosen;
    }
    errored
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentReception {
    pub bits: Vec<u8>,
    /// Decoder's own success flag (BP syndrome check); not an error detector.
    pub converged: bool,
}

/// Carries one segment across the channel.
pub trait SegmentLink {
    fn segment_bits(&self) -> usize;
    fn transmit(&self, segment: &[u8], stream: &NoiseStream) -> Result<SegmentReception, LinkError>;
}

/// Encode, BPSK, AWGN, LLR, decode.
#[derive(Debug, Clone, Copy)]
pub struct SegmentTransceiver<'a> {
    pub code: &'a Code,
    pub decoder: DecoderKind,
    pub channel: ChannelParams,
}

impl SegmentLink for SegmentTransceiver<'_> {
    fn segment_bits(&self) -> usize {
        self.code.k()
    }

    fn transmit(&self, segment: &[u8], stream: &NoiseStream) -> Result<SegmentReception, LinkError> {
        let codeword = self.code.encode(segment)?;
        let y = awgn(&bpsk_modulate(&codeword), &self.channel, stream);
        let res = self.decoder.decode(self.code, &llr(&y, &self.channel))?;
        Ok(SegmentReception { bits: res.message_estimate, converged: res.converged })
    }
}
