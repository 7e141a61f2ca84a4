use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use msc_core::channel::ChannelParams;
use msc_core::metrics::{biawgn_capacity_dispersion, bleu, na_bound_from, rouge_l};
use msc_link::alist::write_alist_file;
use msc_link::config::{build_code, expand_config_args, CodeKind, ExperimentArgs, ExperimentConfig};
use msc_link::curves::emit_curves;
use msc_link::pairs::export_training_pairs;
use msc_link::sweep::{run_sweep, SweepOptions};

/// Sentence transmission over BPSK/AWGN with short block codes.
#[derive(Debug, Parser)]
#[command(name = "msc-link", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a configuration over an SNR grid and write CSV curves.
    /// `--config FILE` supplies `key = value` defaults for any flag.
    #[command(args_override_self = true)]
    Sweep {
        #[command(flatten)]
        args: ExperimentArgs,
        #[arg(long)]
        output: PathBuf,
        /// Per-sentence progress file (JSON lines).
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Skip work already recorded in the checkpoint.
        #[arg(long, requires = "checkpoint")]
        resume: bool,
        /// Also write every trial as a JSON line.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Write (original, received) sentence pairs as JSON lines.
    #[command(args_override_self = true)]
    ExportPairs {
        #[command(flatten)]
        args: ExperimentArgs,
        #[arg(long)]
        output: PathBuf,
    },
    /// Normal-approximation block error bound over an SNR grid, as CSV on stdout.
    #[command(args_override_self = true)]
    Bound {
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[arg(long, default_value_t = 64)]
        k: usize,
        #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
        snr_start: f64,
        #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
        snr_stop: f64,
        #[arg(long, default_value_t = 0.25)]
        snr_step: f64,
    },
    /// BLER, BLEU and ROUGE-L of a hypothesis file against a reference file,
    /// line by line.
    Score {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
    },
    /// Write a code's generator and parity-check matrices (0/1 text) and, for
    /// LDPC, the parity-check matrix as alist.
    #[command(args_override_self = true)]
    ExportCode {
        #[arg(long, value_enum)]
        code: CodeKind,
        #[arg(long, default_value_t = 1024)]
        ldpc_n: usize,
        #[arg(long, default_value_t = 1)]
        ldpc_seed: u64,
        #[arg(long, default_value_t = msc_core::polar::DEFAULT_DESIGN_SNR_DB, allow_negative_numbers = true)]
        polar_design_snr: f64,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let argv = expand_config_args(std::env::args_os().collect())?;
    let cli = Cli::parse_from(argv);
    match cli.command {
        Command::Sweep { args, output, checkpoint, resume, records } => {
            let cfg = ExperimentConfig::from_args(&args)?;
            let code = cfg.build_code()?;
            let corpus = cfg.load_corpus()?;
            let corrector = cfg.build_corrector(&corpus)?;
            let opts = SweepOptions { checkpoint: checkpoint.as_deref(), resume, keep_records: records.is_some() };
            let result = run_sweep(&cfg, &code, &corpus, corrector.as_ref(), &opts)?;
            emit_curves(&cfg, &result.points, create(&output)?)?;
            if let Some(path) = records {
                let mut w = create(&path)?;
                for r in &result.records {
                    writeln!(w, "{}", serde_json::to_string(r)?)?;
                }
                w.flush()?;
            }
        }
        Command::ExportPairs { args, output } => {
            let cfg = ExperimentConfig::from_args(&args)?;
            let code = cfg.build_code()?;
            let corpus = cfg.load_corpus()?;
            let n = export_training_pairs(&cfg, &code, &corpus, create(&output)?)?;
            log::info!("wrote {n} pairs to {}", output.display());
        }
        Command::Bound { n, k, snr_start, snr_stop, snr_step } => {
            if k == 0 || k > n || !snr_step.is_finite() || snr_step <= 0.0 || snr_start > snr_stop {
                bail!("need 0 < k <= n and a nonempty SNR range");
            }
            let mut w = csv::Writer::from_writer(std::io::stdout().lock());
            w.write_record(["snr_db", "capacity_bits", "dispersion_bits2", "na_bound"])?;
            let count = ((snr_stop - snr_start) / snr_step + 1e-9).floor() as usize + 1;
            for i in 0..count {
                let snr = snr_start + i as f64 * snr_step;
                let (c, v) = biawgn_capacity_dispersion(ChannelParams::from_snr_db(snr).sigma());
                let eps = na_bound_from(n, k, c, v);
                w.write_record([format!("{snr:.4}"), format!("{c:.9}"), format!("{v:.9}"), format!("{eps:.6e}")])?;
            }
            w.flush()?;
        }
        Command::Score { hyp, reference } => {
            let h = std::fs::read_to_string(&hyp).with_context(|| format!("reading {}", hyp.display()))?;
            let r = std::fs::read_to_string(&reference).with_context(|| format!("reading {}", reference.display()))?;
            let (h, r): (Vec<&str>, Vec<&str>) = (h.lines().collect(), r.lines().collect());
            if h.len() != r.len() {
                bail!("{} hypothesis lines but {} reference lines", h.len(), r.len());
            }
            let n = h.len().max(1) as f64;
            let errors = h.iter().zip(&r).filter(|(a, b)| a != b).count();
            let b: f64 = h.iter().zip(&r).map(|(a, b)| bleu(a, b)).sum();
            let l: f64 = h.iter().zip(&r).map(|(a, b)| rouge_l(a, b)).sum();
            println!("lines\tbler\tbleu\trouge_l");
            println!("{}\t{:.6}\t{:.4}\t{:.4}", h.len(), errors as f64 / n, b / n, l / n);
        }
        Command::ExportCode { code, ldpc_n, ldpc_seed, polar_design_snr, out_dir } => {
            let c = build_code(code, ldpc_n, ldpc_seed, None, polar_design_snr)?;
            std::fs::create_dir_all(&out_dir)?;
            let name = format!("{code:?}").to_lowercase();
            std::fs::write(out_dir.join(format!("{name}_G.txt")), c.generator().to_text())?;
            std::fs::write(out_dir.join(format!("{name}_H.txt")), c.parity_check().to_text())?;
            if code == CodeKind::Ldpc {
                write_alist_file(&out_dir.join(format!("{name}_H.alist")), c.parity_check())?;
            }
            log::info!("wrote ({}, {}) {name} matrices to {}", c.n(), c.k(), out_dir.display());
        }
    }
    Ok(())
}
