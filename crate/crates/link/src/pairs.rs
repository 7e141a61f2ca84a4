//! Training pairs for the correction service: transmitted sentence and the
//! uncorrected received text.

use std::io::Write;

use msc_core::channel::{ChannelParams, NoiseStream};
use msc_core::harq::SegmentTransceiver;
use msc_core::pipeline::{run_trial, HarqMode, TrialConfig};
use msc_core::sec::IdentityCorrector;
use msc_core::Code;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::corpus::Corpus;
use crate::ExperimentError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingPair {
    pub original: String,
    pub decoded: String,
    pub snr_db: f64,
}

/// Segment id of the stream that picks each pair's SNR; no real segment uses it.
const SNR_PICK_SEGMENT: u32 = u32::MAX - 1;

/// `trials_per_sentence` pairs per sentence, each at an SNR drawn uniformly from
/// the grid. Correction and retransmission are off. Writes JSON lines and returns
/// the count.
pub fn export_training_pairs<W: Write>(cfg: &ExperimentConfig, code: &Code, corpus: &Corpus, mut out: W) -> Result<u64, ExperimentError> {
    let trial_cfg = TrialConfig { q: cfg.q, frame_bytes: msc_core::framing::DEFAULT_FRAME_BYTES, harq: HarqMode::Off };
    let master = NoiseStream::new(cfg.seed);
    let mut count = 0;
    for (s, sentence) in corpus.sentences.iter().enumerate() {
        for t in 0..cfg.trials_per_sentence {
            let base = master.with_sentence(s as u64, t);
            let si = base.with_segment(SNR_PICK_SEGMENT).rng().random_range(0..cfg.snr_grid.len());
            let snr_db = cfg.snr_grid[si];
            let link = SegmentTransceiver { code, decoder: cfg.decoder, channel: ChannelParams::from_snr_db(snr_db) };
            let o = run_trial(sentence, &trial_cfg, &link, &IdentityCorrector, base.with_snr_index(si as u32))?;
            let pair = TrainingPair { original: sentence.clone(), decoded: o.decoded_text, snr_db };
            writeln!(out, "{}", serde_json::to_string(&pair)?)?;
            count += 1;
        }
    }
    out.flush()?;
    Ok(count)
}
