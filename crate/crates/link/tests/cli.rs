//! End-to-end runs of the `msc-link` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use msc_core::ldpc::{build_ldpc_peg, PegParams};
use msc_link::alist::read_alist_file;
use msc_link::pairs::TrainingPair;

fn corpus() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/sample_corpus.txt").display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msc-link")).args(args).env("RUST_LOG", "warn").output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const FAST: &[&str] = &["--code", "polar", "--osd-order", "2", "--max-sentences", "12", "--trials-per-sentence", "2"];

fn sweep(corpus: &str, extra: &[&str], output: &Path) -> String {
    let mut args = vec!["sweep", "--corpus", corpus, "--output", p(output)];
    args.extend_from_slice(FAST);
    args.extend_from_slice(extra);
    ok(&args);
    std::fs::read_to_string(output).unwrap()
}

#[test]
fn curves_have_schema_header_and_one_row_per_snr() {
    let dir = tempfile::tempdir().unwrap();
    let csv = sweep(&corpus(), &["--snr", "0,1.5,3"], &dir.path().join("c.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "# msc-link curves v1");
    assert!(lines[1].starts_with("scheme,code,q,n,k,decoder,sec,harq,snr_db,"));
    assert_eq!(lines.len(), 5);
    assert!(lines[2].starts_with("msc,polar,16,64,32,osd2,identity,off,0.0000,"), "{}", lines[2]);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, format!("# settings\ncorpus = {}\nsnr = 1.0   # single point\nseed = 4\n", corpus())).unwrap();
    let out = dir.path().join("c.csv");
    let mut args = vec!["sweep", "--config", p(&conf), "--output", p(&out)];
    args.extend_from_slice(FAST);
    ok(&args);
    let from_file = std::fs::read_to_string(&out).unwrap();
    assert!(from_file.lines().nth(2).unwrap().contains(",1.0000,"));

    args.extend_from_slice(&["--snr", "2.5"]);
    ok(&args);
    let overridden = std::fs::read_to_string(&out).unwrap();
    assert_eq!(overridden.lines().count(), 3);
    assert!(overridden.lines().nth(2).unwrap().contains(",2.5000,"));

    std::fs::write(&conf, "snr 1.0\n").unwrap();
    assert!(!run(&["sweep", "--config", p(&conf), "--output", p(&out)]).status.success());
}

#[test]
fn checkpoint_resume_reproduces_the_full_run() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck.jsonl");
    let grid = ["--snr", "0.5,2", "--harq", "semconf"];
    let full = sweep(&corpus(), &[&grid[..], &["--checkpoint", p(&ck)]].concat(), &dir.path().join("full.csv"));

    // keep the header and a few entries, then tear the last one
    let text = std::fs::read_to_string(&ck).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 2 * 12);
    let partial = format!("{}\n{}", lines[..8].join("\n"), &lines[8][..lines[8].len() / 2]);
    std::fs::write(&ck, partial).unwrap();

    let resumed = sweep(&corpus(), &[&grid[..], &["--checkpoint", p(&ck), "--resume"]].concat(), &dir.path().join("resumed.csv"));
    assert_eq!(full, resumed);

    let other = run(&[&["sweep", "--corpus", &corpus(), "--output", p(&dir.path().join("x.csv"))], FAST, &["--seed", "2", "--checkpoint", p(&ck), "--resume"][..]].concat());
    assert!(!other.status.success(), "a checkpoint from another configuration must be refused");
}

#[test]
fn records_are_written_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("r.jsonl");
    sweep(&corpus(), &["--snr", "1", "--sec", "lexicon", "--records", p(&rec)], &dir.path().join("c.csv"));
    let text = std::fs::read_to_string(&rec).unwrap();
    assert_eq!(text.lines().count(), 24);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["sec_backend"], "lexicon");
    assert!(first["pre_sec_text"].is_string() && first["bleu"].is_number());
}

#[test]
fn invalid_configurations_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let c = corpus();
    for bad in [
        vec!["--scheme", "tlc", "--code", "ebch"],
        vec!["--code", "ebch", "--q", "4"],
        vec!["--code", "polar", "--osd-order", "33"],
        vec!["--harq", "semconf", "--harq-u", "17", "--code", "polar"],
        vec!["--workers", "0"],
    ] {
        let args = [&["sweep", "--corpus", c.as_str(), "--output", p(&out)], &bad[..]].concat();
        assert!(!run(&args).status.success(), "{bad:?} should fail");
    }
}

#[test]
fn export_pairs_counts_and_noiseless_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pairs.jsonl");
    let c = corpus();
    ok(&["export-pairs", "--corpus", &c, "--code", "polar", "--osd-order", "1", "--max-sentences", "10", "--trials-per-sentence", "3", "--snr", "30", "--output", p(&out)]);
    let pairs: Vec<TrainingPair> = std::fs::read_to_string(&out).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(pairs.len(), 30);
    assert!(pairs.iter().all(|pair| pair.original == pair.decoded && pair.snr_db == 30.0));

    ok(&["export-pairs", "--corpus", &c, "--code", "polar", "--osd-order", "1", "--max-sentences", "10", "--trials-per-sentence", "3", "--snr", "-2,-1", "--output", p(&out)]);
    let pairs: Vec<TrainingPair> = std::fs::read_to_string(&out).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(pairs.len(), 30);
    assert!(pairs.iter().any(|pair| pair.original != pair.decoded));
    assert!(pairs.iter().any(|pair| pair.snr_db == -2.0) && pairs.iter().any(|pair| pair.snr_db == -1.0));
}

#[test]
fn bound_prints_the_grid() {
    let out = ok(&["bound"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "snr_db,capacity_bits,dispersion_bits2,na_bound");
    assert_eq!(lines.len(), 22);
    assert!(lines[1].starts_with("-2.0000,0.348878") && lines[21].starts_with("3.0000,0.720660"));
}

#[test]
fn score_compares_files_line_by_line() {
    let dir = tempfile::tempdir().unwrap();
    let (h, r) = (dir.path().join("h.txt"), dir.path().join("r.txt"));
    std::fs::write(&r, "the cat sat on the mat\nthe cat\n").unwrap();
    std::fs::write(&h, "the cat sat on the mat\nthe cat sat\n").unwrap();
    let out = ok(&["score", "--hyp", p(&h), "--ref", p(&r)]);
    // the second line has ROUGE-L 80, so the mean is 90
    let row: Vec<&str> = out.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(row[0], "2");
    assert_eq!(row[1], "0.500000");
    assert_eq!(row[3], "90.0000");
    std::fs::write(&h, "one line\n").unwrap();
    assert!(!run(&["score", "--hyp", p(&h), "--ref", p(&r)]).status.success());
}

#[test]
fn exported_ldpc_alist_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["export-code", "--code", "ldpc", "--out-dir", p(dir.path())]);
    let h = read_alist_file(&dir.path().join("ldpc_H.alist")).unwrap();
    let (code, _) = build_ldpc_peg(&PegParams::regular(1024, 512, 1)).unwrap();
    assert_eq!(&h, code.parity_check());
    assert!(dir.path().join("ldpc_G.txt").exists());

    ok(&["export-code", "--code", "ebch", "--out-dir", p(dir.path())]);
    let g = std::fs::read_to_string(dir.path().join("ebch_G.txt")).unwrap();
    assert_eq!(g.lines().count(), 64);
    assert!(g.lines().all(|l| l.len() == 128 && l.bytes().all(|b| b == b'0' || b == b'1')));
}

#[test]
fn sweep_on_an_alist_matrix_matches_the_built_code() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["export-code", "--code", "ldpc", "--out-dir", p(dir.path())]);
    let c = corpus();
    let base = ["sweep", "--corpus", c.as_str(), "--scheme", "tlc", "--max-sentences", "6", "--snr", "1.5,2.5"];
    let built = dir.path().join("built.csv");
    ok(&[&base[..], &["--output", p(&built)]].concat());
    let loaded = dir.path().join("loaded.csv");
    ok(&[&base[..], &["--output", p(&loaded), "--ldpc-alist", p(&dir.path().join("ldpc_H.alist"))]].concat());
    assert_eq!(std::fs::read_to_string(built).unwrap(), std::fs::read_to_string(loaded).unwrap());
}
