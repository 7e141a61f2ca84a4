//! Experiment configuration: CLI flags, the flat key-value config file that
//! mirrors them, and the validated [`ExperimentConfig`].

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, ValueEnum};
use msc_core::ebch::build_ebch_128_64;
use msc_core::framing::DEFAULT_FRAME_BYTES;
use msc_core::harq::HarqPolicy;
use msc_core::ldpc::{build_ldpc_from_parity_check, build_ldpc_peg, PegParams};
use msc_core::pipeline::HarqMode;
use msc_core::polar::build_polar;
use msc_core::sec::{Corrector, IdentityCorrector, LexiconCorrector};
use msc_core::{Code, DecoderKind, OsdConfig};

use crate::alist::read_alist_file;
use crate::bart::BartClient;
use crate::corpus::{parse_lexicon, Corpus};
use crate::ExperimentError;

/// Information bits per sentence frame.
pub const FRAME_BITS: usize = DEFAULT_FRAME_BYTES * 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    /// One long code per sentence.
    Tlc,
    /// q short codes per sentence.
    Msc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CodeKind {
    Ebch,
    Polar,
    Ldpc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecoderArg {
    Osd,
    Bp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SecArg {
    Identity,
    Lexicon,
    Bart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HarqArg {
    Off,
    Semconf,
    Genie,
}

/// Flags shared by `sweep` and `export-pairs`. Each can also be given as
/// `key = value` in a `--config` file, with dashes written as underscores.
#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    #[arg(long, value_enum, default_value_t = Scheme::Msc)]
    pub scheme: Scheme,
    /// Default: ldpc for tlc, ebch for msc.
    #[arg(long, value_enum)]
    pub code: Option<CodeKind>,
    /// Segments per sentence. Default: 512 / k of the code.
    #[arg(long)]
    pub q: Option<usize>,
    /// Default: osd for short codes, bp for ldpc.
    #[arg(long, value_enum)]
    pub decoder: Option<DecoderArg>,
    /// Default: 4 for ebch, 3 for polar.
    #[arg(long)]
    pub osd_order: Option<usize>,
    #[arg(long, default_value_t = 18)]
    pub bp_iterations: usize,
    /// Length of the long reference code (k is 512).
    #[arg(long, default_value_t = 1024)]
    pub ldpc_n: usize,
    #[arg(long, default_value_t = 1)]
    pub ldpc_seed: u64,
    /// Load the LDPC parity-check matrix instead of building one.
    #[arg(long)]
    pub ldpc_alist: Option<PathBuf>,
    #[arg(long, default_value_t = msc_core::polar::DEFAULT_DESIGN_SNR_DB, allow_negative_numbers = true)]
    pub polar_design_snr: f64,
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    pub snr_start: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub snr_stop: f64,
    #[arg(long, default_value_t = 0.25)]
    pub snr_step: f64,
    /// Comma-separated SNR points in dB; replaces start/stop/step.
    #[arg(long, allow_hyphen_values = true)]
    pub snr: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub trials_per_sentence: u32,
    #[arg(long)]
    pub max_sentences: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SecArg::Identity)]
    pub sec: SecArg,
    #[arg(long, default_value = "http://127.0.0.1:8000")]
    pub sec_endpoint: String,
    #[arg(long, default_value_t = 30_000)]
    pub sec_timeout_ms: u64,
    /// `word count` lines; default is the corpus vocabulary.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = HarqArg::Off)]
    pub harq: HarqArg,
    #[arg(long, default_value_t = 0.8)]
    pub harq_threshold: f64,
    #[arg(long, default_value_t = 1)]
    pub harq_u: usize,
    #[arg(long, default_value_t = 1)]
    pub harq_rounds: usize,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

/// Rewrites `--config FILE` into the `--key=value` flags it contains, placed
/// right after the subcommand so that explicit flags (which come later) win.
pub fn expand_config_args(args: Vec<OsString>) -> Result<Vec<OsString>, ExperimentError> {
    let mut out = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = Some(it.next().ok_or_else(|| ExperimentError::Config("--config needs a file".into()))?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(OsString::from(p));
        } else {
            out.push(a);
        }
    }
    let Some(path) = path else { return Ok(out) };
    let text = std::fs::read_to_string(&path)?;
    let flags = parse_config_text(&text)?;
    let at = out.len().min(2);
    out.splice(at..at, flags.into_iter().map(OsString::from));
    Ok(out)
}

/// `key = value` lines; `#` starts a comment at line start or after whitespace.
pub fn parse_config_text(text: &str) -> Result<Vec<String>, ExperimentError> {
    let mut flags = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find(" #").or_else(|| raw.find("\t#")) {
            Some(p) => &raw[..p],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ExperimentError::Config(format!("config line {}: expected key = value", i + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() || key == "config" {
            return Err(ExperimentError::Config(format!("config line {}: invalid entry {line:?}", i + 1)));
        }
        flags.push(format!("--{}={}", key.replace('_', "-"), value));
    }
    Ok(flags)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SecChoice {
    Identity,
    Lexicon { path: Option<PathBuf> },
    Bart { endpoint: String, timeout: Duration },
}

impl SecChoice {
    pub fn name(&self) -> &'static str {
        match self {
            SecChoice::Identity => "identity",
            SecChoice::Lexicon { .. } => "lexicon",
            SecChoice::Bart { .. } => "bart",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    pub code: CodeKind,
    pub q: usize,
    pub decoder: DecoderKind,
    pub ldpc_n: usize,
    pub ldpc_seed: u64,
    pub ldpc_alist: Option<PathBuf>,
    pub polar_design_snr_db: f64,
    pub snr_grid: Vec<f64>,
    pub trials_per_sentence: u32,
    pub max_sentences: Option<usize>,
    pub seed: u64,
    pub sec: SecChoice,
    pub harq: HarqMode,
    pub corpus: PathBuf,
    pub workers: usize,
}

fn snr_grid(args: &ExperimentArgs) -> Result<Vec<f64>, ExperimentError> {
    let bad = |m: String| ExperimentError::Config(m);
    let grid: Vec<f64> = match &args.snr {
        Some(list) => list
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| bad(format!("snr point {t:?}: {e}"))))
            .collect::<Result<_, _>>()?,
        None => {
            if !args.snr_step.is_finite() || args.snr_step <= 0.0 || args.snr_start > args.snr_stop {
                return Err(bad(format!("empty SNR range {}..{} step {}", args.snr_start, args.snr_stop, args.snr_step)));
            }
            let count = ((args.snr_stop - args.snr_start) / args.snr_step + 1e-9).floor() as usize + 1;
            // rounded to 1e-9 dB so that 0.1-style steps print cleanly
            (0..count).map(|i| ((args.snr_start + i as f64 * args.snr_step) * 1e9).round() / 1e9).collect()
        }
    };
    if grid.is_empty() || grid.iter().any(|s| !s.is_finite()) {
        return Err(bad("SNR grid must be nonempty and finite".into()));
    }
    Ok(grid)
}

impl ExperimentConfig {
    pub fn from_args(args: &ExperimentArgs) -> Result<Self, ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Config(m));
        let code = args.code.unwrap_or(match args.scheme {
            Scheme::Tlc => CodeKind::Ldpc,
            Scheme::Msc => CodeKind::Ebch,
        });
        let (n_seg, k_seg) = match code {
            CodeKind::Ebch => (128, 64),
            CodeKind::Polar => (64, 32),
            CodeKind::Ldpc => (args.ldpc_n, FRAME_BITS),
        };
        let q = args.q.unwrap_or(FRAME_BITS / k_seg);
        match args.scheme {
            Scheme::Tlc if code != CodeKind::Ldpc || q != 1 => return bad("tlc carries the frame in one ldpc codeword (q = 1)".into()),
            Scheme::Msc if code == CodeKind::Ldpc => return bad("msc needs a short code (ebch or polar)".into()),
            _ => {}
        }
        if q * k_seg != FRAME_BITS {
            return bad(format!("q * k = {} must equal the {FRAME_BITS}-bit frame", q * k_seg));
        }
        if args.scheme == Scheme::Msc && q * n_seg != args.ldpc_n {
            return bad(format!("rate parity: q * n = {} but the long code has n = {}", q * n_seg, args.ldpc_n));
        }
        let decoder = match args.decoder.unwrap_or(if code == CodeKind::Ldpc { DecoderArg::Bp } else { DecoderArg::Osd }) {
            DecoderArg::Bp => {
                if args.bp_iterations == 0 {
                    return bad("bp needs at least one iteration".into());
                }
                DecoderKind::BeliefPropagation { max_iterations: args.bp_iterations }
            }
            DecoderArg::Osd => {
                let order = args.osd_order.unwrap_or(if code == CodeKind::Polar { 3 } else { 4 });
                if order > k_seg {
                    return bad(format!("osd order {order} exceeds k = {k_seg}"));
                }
                DecoderKind::Osd(OsdConfig { order })
            }
        };
        let harq = match args.harq {
            HarqArg::Off => HarqMode::Off,
            HarqArg::Semconf => {
                let p = HarqPolicy::new(args.harq_threshold, args.harq_u, args.harq_rounds).map_err(|e| ExperimentError::Config(e.to_string()))?;
                HarqMode::SemanticConfidence(p)
            }
            HarqArg::Genie => {
                if args.harq_u == 0 {
                    return bad("harq_u must be at least 1".into());
                }
                HarqMode::CrcGenie { max_retx_per_round: args.harq_u, rounds: args.harq_rounds }
            }
        };
        if args.harq != HarqArg::Off && args.harq_u > q {
            return bad(format!("harq_u = {} exceeds q = {q}", args.harq_u));
        }
        let sec = match args.sec {
            SecArg::Identity => SecChoice::Identity,
            SecArg::Lexicon => SecChoice::Lexicon { path: args.lexicon.clone() },
            SecArg::Bart => SecChoice::Bart { endpoint: args.sec_endpoint.clone(), timeout: Duration::from_millis(args.sec_timeout_ms) },
        };
        if args.workers == 0 || args.trials_per_sentence == 0 {
            return bad("workers and trials_per_sentence must be positive".into());
        }
        Ok(ExperimentConfig {
            scheme: args.scheme,
            code,
            q,
            decoder,
            ldpc_n: args.ldpc_n,
            ldpc_seed: args.ldpc_seed,
            ldpc_alist: args.ldpc_alist.clone(),
            polar_design_snr_db: args.polar_design_snr,
            snr_grid: snr_grid(args)?,
            trials_per_sentence: args.trials_per_sentence,
            max_sentences: args.max_sentences,
            seed: args.seed,
            sec,
            harq,
            corpus: args.corpus.clone(),
            workers: args.workers,
        })
    }

    /// Segment code length and dimension.
    pub fn segment_nk(&self) -> (usize, usize) {
        match self.code {
            CodeKind::Ebch => (128, 64),
            CodeKind::Polar => (64, 32),
            CodeKind::Ldpc => (self.ldpc_n, FRAME_BITS),
        }
    }

    pub fn scheme_name(&self) -> &'static str {
        match self.scheme {
            Scheme::Tlc => "tlc",
            Scheme::Msc => "msc",
        }
    }

    pub fn code_name(&self) -> &'static str {
        match self.code {
            CodeKind::Ebch => "ebch",
            CodeKind::Polar => "polar",
            CodeKind::Ldpc => "ldpc",
        }
    }

    pub fn decoder_name(&self) -> String {
        match self.decoder {
            DecoderKind::Osd(c) => format!("osd{}", c.order),
            DecoderKind::BeliefPropagation { max_iterations } => format!("bp{max_iterations}"),
        }
    }

    pub fn harq_name(&self) -> String {
        match self.harq {
            HarqMode::Off => "off".into(),
            HarqMode::SemanticConfidence(p) => format!("semconf:t{}:u{}:r{}", p.threshold, p.max_retx_per_round, p.rounds),
            HarqMode::CrcGenie { max_retx_per_round, rounds } => format!("genie:u{max_retx_per_round}:r{rounds}"),
        }
    }

    /// Everything that affects results; worker count deliberately excluded.
    pub fn fingerprint(&self) -> String {
        format!(
            "{}|{}|q{}|{}|n{}|s{}|{:?}|{}|{:?}|t{}|m{:?}|seed{}|{}|{}|{}",
            self.scheme_name(),
            self.code_name(),
            self.q,
            self.decoder_name(),
            self.ldpc_n,
            self.ldpc_seed,
            self.ldpc_alist,
            self.polar_design_snr_db,
            self.snr_grid,
            self.trials_per_sentence,
            self.max_sentences,
            self.seed,
            self.sec.name(),
            self.harq_name(),
            self.corpus.display(),
        )
    }

    pub fn build_code(&self) -> Result<Code, ExperimentError> {
        build_code(self.code, self.ldpc_n, self.ldpc_seed, self.ldpc_alist.as_deref(), self.polar_design_snr_db)
    }

    pub fn load_corpus(&self) -> Result<Corpus, ExperimentError> {
        let mut corpus = Corpus::load(&self.corpus, DEFAULT_FRAME_BYTES)?;
        for s in &corpus.skipped {
            log::warn!("{}:{}: skipped: {}", self.corpus.display(), s.line, s.reason);
        }
        if let Some(max) = self.max_sentences {
            corpus.truncate(max);
        }
        if corpus.sentences.is_empty() {
            return Err(ExperimentError::Config(format!("no usable sentences in {}", self.corpus.display())));
        }
        Ok(corpus)
    }

    pub fn build_corrector(&self, corpus: &Corpus) -> Result<Box<dyn Corrector + Sync>, ExperimentError> {
        Ok(match &self.sec {
            SecChoice::Identity => Box::new(IdentityCorrector),
            SecChoice::Lexicon { path } => {
                let lexicon = match path {
                    Some(p) => parse_lexicon(&std::fs::read_to_string(p)?).map_err(ExperimentError::Config)?,
                    None => corpus.lexicon(),
                };
                Box::new(LexiconCorrector { lexicon })
            }
            SecChoice::Bart { endpoint, timeout } => Box::new(BartClient::new(endpoint, *timeout)),
        })
    }
}

/// The long code always has k = 512; short codes have fixed dimensions.
pub fn build_code(kind: CodeKind, ldpc_n: usize, ldpc_seed: u64, ldpc_alist: Option<&Path>, polar_design_snr_db: f64) -> Result<Code, ExperimentError> {
    Ok(match kind {
        CodeKind::Ebch => build_ebch_128_64(),
        CodeKind::Polar => build_polar(6, 32, polar_design_snr_db),
        CodeKind::Ldpc => {
            let code = match ldpc_alist {
                Some(path) => build_ldpc_from_parity_check(read_alist_file(path)?)?,
                None => build_ldpc_peg(&PegParams::regular(ldpc_n, FRAME_BITS, ldpc_seed))?.0,
            };
            if (code.n(), code.k()) != (ldpc_n, FRAME_BITS) {
                return Err(ExperimentError::Config(format!("ldpc code is ({}, {}), expected ({ldpc_n}, {FRAME_BITS})", code.n(), code.k())));
            }
            code
        }
    })
}
