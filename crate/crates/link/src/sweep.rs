//! SNR sweeps over a corpus, with per-sentence checkpoints.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;

use msc_core::channel::{ChannelParams, NoiseStream};
use msc_core::harq::SegmentTransceiver;
use msc_core::metrics::{bleu, rouge_l};
use msc_core::pipeline::{run_trial, HarqMode, TrialConfig, TrialOutcome};
use msc_core::sec::Corrector;
use msc_core::Code;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::corpus::Corpus;
use crate::ExperimentError;

/// Sums over trials at one SNR. Merging in a fixed order gives bit-identical
/// floating-point totals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PointStats {
    pub trials: u64,
    pub segments: u64,
    pub segment_errors: u64,
    pub frame_errors: u64,
    pub sec_errors: u64,
    pub harq_frame_errors: u64,
    pub final_errors: u64,
    pub retransmissions: u64,
    pub bleu_pre: f64,
    pub bleu_sec: f64,
    pub bleu_final: f64,
    pub rouge_pre: f64,
    pub rouge_sec: f64,
    pub rouge_final: f64,
}

impl PointStats {
    pub fn record(&mut self, o: &TrialOutcome) {
        self.trials += 1;
        self.segments += o.segment_errors.len() as u64;
        self.segment_errors += o.segment_errors.iter().filter(|&&e| e).count() as u64;
        self.frame_errors += u64::from(o.frame_error);
        self.sec_errors += u64::from(o.sec_error);
        self.harq_frame_errors += u64::from(o.harq_frame_error);
        self.final_errors += u64::from(o.final_error);
        self.retransmissions += o.retransmissions as u64;
        self.bleu_pre += bleu(&o.decoded_text, &o.reference);
        self.bleu_sec += bleu(&o.sec_text, &o.reference);
        self.bleu_final += bleu(&o.final_text, &o.reference);
        self.rouge_pre += rouge_l(&o.decoded_text, &o.reference);
        self.rouge_sec += rouge_l(&o.sec_text, &o.reference);
        self.rouge_final += rouge_l(&o.final_text, &o.reference);
    }

    pub fn merge(&mut self, o: &PointStats) {
        self.trials += o.trials;
        self.segments += o.segments;
        self.segment_errors += o.segment_errors;
        self.frame_errors += o.frame_errors;
        self.sec_errors += o.sec_errors;
        self.harq_frame_errors += o.harq_frame_errors;
        self.final_errors += o.final_errors;
        self.retransmissions += o.retransmissions;
        self.bleu_pre += o.bleu_pre;
        self.bleu_sec += o.bleu_sec;
        self.bleu_final += o.bleu_final;
        self.rouge_pre += o.rouge_pre;
        self.rouge_sec += o.rouge_sec;
        self.rouge_final += o.rouge_final;
    }

    fn rate(count: u64, total: u64) -> f64 {
        if total == 0 {
            0.0
        } else {
            count as f64 / total as f64
        }
    }

    pub fn segment_bler(&self) -> f64 {
        Self::rate(self.segment_errors, self.segments)
    }

    pub fn frame_bler(&self) -> f64 {
        Self::rate(self.frame_errors, self.trials)
    }

    pub fn sec_bler(&self) -> f64 {
        Self::rate(self.sec_errors, self.trials)
    }

    pub fn harq_bler(&self) -> f64 {
        Self::rate(self.harq_frame_errors, self.trials)
    }

    pub fn final_bler(&self) -> f64 {
        Self::rate(self.final_errors, self.trials)
    }

    pub fn mean(&self, sum: f64) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            sum / self.trials as f64
        }
    }
}

/// One sentence, one trial, one SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub sentence_id: u64,
    pub trial: u32,
    pub snr_db: f64,
    pub scheme: String,
    pub sec_backend: String,
    pub harq_used: bool,
    pub pre_sec_text: String,
    pub post_sec_text: String,
    pub block_error_pre: bool,
    pub block_error_post: bool,
    pub bleu: f64,
    pub rouge_l: f64,
    pub segments_retransmitted: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnrPoint {
    pub snr_index: u32,
    pub snr_db: f64,
    pub sentences: u64,
    pub stats: PointStats,
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointEntry {
    snr_index: u32,
    sentence: u64,
    stats: PointStats,
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointHeader {
    fingerprint: String,
}

/// Completed (snr index, sentence) results from an earlier run with the same
/// configuration.
fn load_checkpoint(path: &Path, fingerprint: &str) -> Result<BTreeMap<(u32, u64), PointStats>, ExperimentError> {
    let mut done = BTreeMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(done),
        Err(e) => return Err(e.into()),
    };
    let mut lines = BufReader::new(file).lines();
    let Some(first) = lines.next().transpose()? else { return Ok(done) };
    let header: CheckpointHeader = serde_json::from_str(&first)?;
    if header.fingerprint != fingerprint {
        return Err(ExperimentError::Config(format!("checkpoint {} was written by a different configuration", path.display())));
    }
    for line in lines {
        let line = line?;
        // a torn final line from an interrupted write is dropped
        match serde_json::from_str::<CheckpointEntry>(&line) {
            Ok(e) => {
                done.insert((e.snr_index, e.sentence), e.stats);
            }
            Err(_) => log::warn!("ignoring unreadable checkpoint line"),
        }
    }
    Ok(done)
}

pub struct SweepOptions<'a> {
    pub checkpoint: Option<&'a Path>,
    /// Continue from an existing checkpoint instead of starting over.
    pub resume: bool,
    /// Keep per-trial records (memory grows with the run).
    pub keep_records: bool,
}

pub struct SweepResult {
    pub points: Vec<SnrPoint>,
    /// In (snr, sentence, trial) order; only trials run in this invocation.
    pub records: Vec<ExperimentRecord>,
}

fn record_of(cfg: &ExperimentConfig, sentence_id: u64, trial: u32, snr_db: f64, o: &TrialOutcome) -> ExperimentRecord {
    ExperimentRecord {
        sentence_id,
        trial,
        snr_db,
        scheme: cfg.scheme_name().into(),
        sec_backend: cfg.sec.name().into(),
        harq_used: cfg.harq != HarqMode::Off,
        pre_sec_text: o.decoded_text.clone(),
        post_sec_text: o.final_text.clone(),
        block_error_pre: o.frame_error,
        block_error_post: o.final_error,
        bleu: bleu(&o.final_text, &o.reference),
        rouge_l: rouge_l(&o.final_text, &o.reference),
        segments_retransmitted: o.rounds.iter().flat_map(|r| r.selected.iter().copied()).collect(),
    }
}

/// Runs every (SNR, sentence, trial). Output depends only on the configuration:
/// noise is keyed by (seed, snr index, sentence, trial, segment, round) and
/// totals are merged in sentence order.
pub fn run_sweep(
    cfg: &ExperimentConfig,
    code: &Code,
    corpus: &Corpus,
    corrector: &(dyn Corrector + Sync),
    opts: &SweepOptions,
) -> Result<SweepResult, ExperimentError> {
    let fingerprint = cfg.fingerprint();
    let mut done = BTreeMap::new();
    let mut writer = None;
    if let Some(path) = opts.checkpoint {
        if opts.resume {
            done = load_checkpoint(path, &fingerprint)?;
            log::info!("resuming with {} completed sentence results", done.len());
        }
        let fresh = !opts.resume || done.is_empty() && std::fs::metadata(path).map_or(true, |m| m.len() == 0);
        let mut f = if fresh { File::create(path)? } else { OpenOptions::new().append(true).open(path)? };
        if fresh {
            writeln!(f, "{}", serde_json::to_string(&CheckpointHeader { fingerprint: fingerprint.clone() })?)?;
        }
        writer = Some(Mutex::new(f));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    let trial_cfg = TrialConfig { q: cfg.q, frame_bytes: msc_core::framing::DEFAULT_FRAME_BYTES, harq: cfg.harq };
    let master = NoiseStream::new(cfg.seed);

    let mut points = Vec::with_capacity(cfg.snr_grid.len());
    let mut records = Vec::new();
    for (si, &snr_db) in cfg.snr_grid.iter().enumerate() {
        let si = si as u32;
        let link = SegmentTransceiver { code, decoder: cfg.decoder, channel: ChannelParams::from_snr_db(snr_db) };
        let todo: Vec<u64> = (0..corpus.sentences.len() as u64).filter(|s| !done.contains_key(&(si, *s))).collect();
        let results: Vec<(u64, PointStats, Vec<ExperimentRecord>)> = pool.install(|| {
            todo.par_iter()
                .map(|&s| {
                    let sentence = &corpus.sentences[s as usize];
                    let mut stats = PointStats::default();
                    let mut recs = Vec::new();
                    for t in 0..cfg.trials_per_sentence {
                        let stream = master.with_snr_index(si).with_sentence(s, t);
                        let o = run_trial(sentence, &trial_cfg, &link, corrector, stream)?;
                        stats.record(&o);
                        if opts.keep_records {
                            recs.push(record_of(cfg, s, t, snr_db, &o));
                        }
                    }
                    if let Some(w) = &writer {
                        let line = serde_json::to_string(&CheckpointEntry { snr_index: si, sentence: s, stats })?;
                        let mut f = w.lock().expect("checkpoint writer poisoned");
                        writeln!(f, "{line}")?;
                        f.flush()?;
                    }
                    Ok((s, stats, recs))
                })
                .collect::<Result<Vec<_>, ExperimentError>>()
        })?;
        for (s, stats, recs) in results {
            done.insert((si, s), stats);
            records.extend(recs);
        }
        let mut total = PointStats::default();
        for (_, stats) in done.range((si, 0)..=(si, u64::MAX)) {
            total.merge(stats);
        }
        log::info!("snr {snr_db:+.2} dB: bler {:.4} after {} trials", total.final_bler(), total.trials);
        points.push(SnrPoint { snr_index: si, snr_db, sentences: corpus.sentences.len() as u64, stats: total });
    }
    Ok(SweepResult { points, records })
}
