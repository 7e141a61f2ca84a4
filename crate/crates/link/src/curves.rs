//! CSV curves: one row per SNR point of a configuration.

use std::io::Write;

use msc_core::channel::ChannelParams;
use msc_core::metrics::na_bound;

use crate::config::{ExperimentConfig, Scheme};
use crate::sweep::SnrPoint;
use crate::ExperimentError;

pub const CURVES_SCHEMA: &str = "msc-link curves v1";

pub const CURVE_COLUMNS: &[&str] = &[
    "scheme",
    "code",
    "q",
    "n",
    "k",
    "decoder",
    "sec",
    "harq",
    "snr_db",
    "ebn0_db",
    "n_sentences",
    "n_trials",
    "seed",
    "segment_bler",
    "bler_pre_sec",
    "bler_post_sec",
    "bler_harq",
    "bler",
    "bleu_pre_sec",
    "bleu_post_sec",
    "bleu",
    "rouge_l_pre_sec",
    "rouge_l_post_sec",
    "rouge_l",
    "retx_per_trial",
    "na_bound_segment",
    "na_bound_sentence",
];

/// `bler`, `bleu` and `rouge_l` are final values (after SEC and any
/// retransmission). `na_bound_sentence` is the segment bound raised to the q
/// independent segments.
pub fn emit_curves<W: Write>(cfg: &ExperimentConfig, points: &[SnrPoint], out: W) -> Result<(), ExperimentError> {
    if points.is_empty() {
        return Err(ExperimentError::Config("no SNR points to write".into()));
    }
    let mut out = out;
    writeln!(out, "# {CURVES_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_COLUMNS)?;
    let (n, k) = cfg.segment_nk();
    let rate = k as f64 / n as f64;
    for p in points {
        let s = &p.stats;
        let ch = ChannelParams::from_snr_db(p.snr_db);
        let eps = na_bound(n, k, ch.sigma());
        let eps_sentence = match cfg.scheme {
            Scheme::Tlc => eps,
            Scheme::Msc => 1.0 - (1.0 - eps).powi(cfg.q as i32),
        };
        w.write_record([
            cfg.scheme_name().to_string(),
            cfg.code_name().to_string(),
            cfg.q.to_string(),
            n.to_string(),
            k.to_string(),
            cfg.decoder_name(),
            cfg.sec.name().to_string(),
            cfg.harq_name(),
            format!("{:.4}", p.snr_db),
            format!("{:.4}", ch.ebn0_db(rate)),
            p.sentences.to_string(),
            s.trials.to_string(),
            cfg.seed.to_string(),
            format!("{:.6}", s.segment_bler()),
            format!("{:.6}", s.frame_bler()),
            format!("{:.6}", s.sec_bler()),
            format!("{:.6}", s.harq_bler()),
            format!("{:.6}", s.final_bler()),
            format!("{:.4}", s.mean(s.bleu_pre)),
            format!("{:.4}", s.mean(s.bleu_sec)),
            format!("{:.4}", s.mean(s.bleu_final)),
            format!("{:.4}", s.mean(s.rouge_pre)),
            format!("{:.4}", s.mean(s.rouge_sec)),
            format!("{:.4}", s.mean(s.rouge_final)),
            format!("{:.4}", s.retransmissions as f64 / s.trials.max(1) as f64),
            format!("{eps:.6e}"),
            format!("{eps_sentence:.6e}"),
        ])?;
    }
    w.flush()?;
    Ok(())
}
