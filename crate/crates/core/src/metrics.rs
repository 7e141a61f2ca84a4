//! Block error rate, text-similarity scores and the finite-blocklength
//! normal approximation for the binary-input AWGN channel.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::channel::q_function;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("frame length mismatch: truth {truth}, estimate {estimate}")]
    LengthMismatch { truth: usize, estimate: usize },
}

/// Edit distance with unit insert/delete/substitute costs over any sequence.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Character-level Levenshtein distance.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    edit_distance(&a, &b)
}

/// Whitespace tokens after removing frame padding. Case and punctuation are kept.
pub fn tokenize(text: &str) -> Vec<&str> {
    text.trim_end_matches('\0').split_whitespace().collect()
}

/// Count substituted for a zero n-gram match count.
pub const BLEU_EPSILON: f64 = 1e-9;

/// Sentence-level BLEU on a 0..100 scale: uniform-weight geometric mean of modified
/// 1..4-gram precisions with epsilon smoothing, times the brevity penalty.
pub fn bleu(hypothesis: &str, reference: &str) -> f64 {
    let hyp = tokenize(hypothesis);
    let refr = tokenize(reference);
    if hyp.is_empty() {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for order in 1..=4usize {
        let ref_counts = ngram_counts(&refr, order);
        let hyp_counts = ngram_counts(&hyp, order);
        let total: usize = hyp_counts.values().sum();
        let matched: usize = hyp_counts.iter().map(|(g, &c)| c.min(ref_counts.get(g).copied().unwrap_or(0))).sum();
        let denom = total.max(1) as f64;
        let p = if matched == 0 { BLEU_EPSILON / denom } else { matched as f64 / denom };
        log_sum += 0.25 * libm::log(p);
    }
    let bp = if hyp.len() < refr.len() { libm::exp(1.0 - refr.len() as f64 / hyp.len() as f64) } else { 1.0 };
    100.0 * bp * libm::exp(log_sum)
}

fn ngram_counts<'a>(tokens: &'a [&'a str], order: usize) -> BTreeMap<&'a [&'a str], usize> {
    let mut counts = BTreeMap::new();
    if tokens.len() >= order {
        for w in tokens.windows(order) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

/// Longest common subsequence length.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Word-level ROUGE-L F1 on a 0..100 scale.
pub fn rouge_l(hypothesis: &str, reference: &str) -> f64 {
    let hyp = tokenize(hypothesis);
    let refr = tokenize(reference);
    if hyp.is_empty() || refr.is_empty() {
        return 0.0;
    }
    let lcs = lcs_len(&hyp, &refr);
    if lcs == 0 {
        return 0.0;
    }
    let p = lcs as f64 / hyp.len() as f64;
    let r = lcs as f64 / refr.len() as f64;
    100.0 * 2.0 * p * r / (p + r)
}

/// Running BLER / BLEU / ROUGE-L tallies. Merging is associative.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScoreReport {
    pub n_trials: u64,
    pub errored_blocks: u64,
    pub scored: u64,
    pub bleu_sum: f64,
    pub rouge_sum: f64,
}

impl ScoreReport {
    pub fn bler(&self) -> f64 {
        if self.n_trials == 0 {
            0.0
        } else {
            self.errored_blocks as f64 / self.n_trials as f64
        }
    }

    pub fn bleu(&self) -> f64 {
        if self.scored == 0 {
            0.0
        } else {
            self.bleu_sum / self.scored as f64
        }
    }

    pub fn rouge_l(&self) -> f64 {
        if self.scored == 0 {
            0.0
        } else {
            self.rouge_sum / self.scored as f64
        }
    }

    pub fn record_block(&mut self, errored: bool) {
        self.n_trials += 1;
        self.errored_blocks += u64::from(errored);
    }

    pub fn record_scores(&mut self, bleu: f64, rouge_l: f64) {
        self.scored += 1;
        self.bleu_sum += bleu;
        self.rouge_sum += rouge_l;
    }

    pub fn merge(&self, other: &ScoreReport) -> ScoreReport {
        ScoreReport {
            n_trials: self.n_trials + other.n_trials,
            errored_blocks: self.errored_blocks + other.errored_blocks,
            scored: self.scored + other.scored,
            bleu_sum: self.bleu_sum + other.bleu_sum,
            rouge_sum: self.rouge_sum + other.rouge_sum,
        }
    }
}

/// Counts one block, errored iff any bit differs. Returns whether it was errored.
pub fn bler_update(truth_bits: &[u8], estimate_bits: &[u8], report: &mut ScoreReport) -> Result<bool, MetricsError> {
    if truth_bits.len() != estimate_bits.len() {
        return Err(MetricsError::LengthMismatch { truth: truth_bits.len(), estimate: estimate_bits.len() });
    }
    let errored = truth_bits != estimate_bits;
    report.record_block(errored);
    Ok(errored)
}

/// Nodes and weights of `n`-point Gauss-Hermite quadrature (weight `exp(-x^2)`).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    const PIM4: f64 = 0.751_125_544_464_942_5; // pi^(-1/4)
    let mut x = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => libm::sqrt(2.0 * nf + 1.0) - 1.85575 * libm::pow(2.0 * nf + 1.0, -0.16667),
            1 => z - 1.14 * libm::pow(nf, 0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * libm::sqrt(2.0 / jf) * p2 - libm::sqrt((jf - 1.0) / jf) * p3;
            }
            pp = libm::sqrt(2.0 * nf) * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-14 {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Quadrature points used for capacity and dispersion.
pub const QUADRATURE_NODES: usize = 96;

/// `ln(1 + e^{-l})` without overflow.
fn softplus_neg(l: f64) -> f64 {
    if l > 0.0 {
        libm::log1p(libm::exp(-l))
    } else {
        -l + libm::log1p(libm::exp(l))
    }
}

/// Capacity `C` (bits/use) and dispersion `V` (bits^2/use) of BPSK over AWGN with
/// noise standard deviation `sigma`, as the mean and variance of the information
/// density `1 - log2(1 + e^{-L})`, `L ~ N(2/sigma^2, 4/sigma^2)`.
pub fn biawgn_capacity_dispersion(sigma: f64) -> (f64, f64) {
    biawgn_capacity_dispersion_with(sigma, QUADRATURE_NODES)
}

pub fn biawgn_capacity_dispersion_with(sigma: f64, nodes: usize) -> (f64, f64) {
    let (x, w) = gauss_hermite(nodes);
    let mean = 2.0 / (sigma * sigma);
    let sd = 2.0 / sigma;
    let (mut m1, mut m2) = (0.0, 0.0);
    for (&t, &wt) in x.iter().zip(&w) {
        let l = mean + core::f64::consts::SQRT_2 * sd * t;
        let i = 1.0 - softplus_neg(l) / core::f64::consts::LN_2;
        m1 += wt * i;
        m2 += wt * i * i;
    }
    let norm = 1.0 / libm::sqrt(core::f64::consts::PI);
    let c = m1 * norm;
    let v = (m2 * norm - c * c).max(0.0);
    (c, v)
}

/// Normal approximation of the best achievable block error rate of a `(n, k)` code
/// on the BI-AWGN channel:
///
/// `eps = Q( sqrt(n / V) * ((C - R) / log2(e) + ln(n) / (2n)) )`
///
/// `C` enters in bits and is turned into nats by the `1/log2(e)` factor; the
/// `ln(n)/(2n)` term is in nats as well, so `V` is converted from bits^2 to nats^2
/// (factor `ln(2)^2`) to keep the argument dimensionless. Clamped to `[0, 1]`.
pub fn na_bound(n: usize, k: usize, sigma: f64) -> f64 {
    let (c, v) = biawgn_capacity_dispersion(sigma);
    na_bound_from(n, k, c, v)
}

pub fn na_bound_from(n: usize, k: usize, capacity_bits: f64, dispersion_bits2: f64) -> f64 {
    let nf = n as f64;
    let rate = k as f64 / nf;
    let ln2 = core::f64::consts::LN_2;
    let gap = (capacity_bits - rate) * ln2 + libm::log(nf) / (2.0 * nf);
    let v_nats = dispersion_bits2 * ln2 * ln2;
    if v_nats <= 0.0 {
        return if gap > 0.0 { 0.0 } else { 1.0 };
    }
    q_function(libm::sqrt(nf / v_nats) * gap).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levenshtein_examples() {
        assert_eq!(levenshtein("abc", "abc"), 0);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("wen#", "went"), 1);
    }

    #[test]
    fn rouge_examples() {
        assert!((rouge_l("the cat", "the cat sat") - 80.0).abs() < 1e-12);
        assert_eq!(rouge_l("a b c", "a b c"), 100.0);
        assert_eq!(rouge_l("", "a"), 0.0);
        assert_eq!(rouge_l("x y", "a b"), 0.0);
    }

    #[test]
    fn bleu_limits() {
        assert!((bleu("the cat sat on the mat", "the cat sat on the mat") - 100.0).abs() < 1e-9);
        assert!(bleu("xyz qqq", "abc def ghi") < 1e-6);
        assert_eq!(bleu("", "abc"), 0.0);
    }

    #[test]
    fn gauss_hermite_moments() {
        let (x, w) = gauss_hermite(96);
        let sqrt_pi = libm::sqrt(core::f64::consts::PI);
        assert!((w.iter().sum::<f64>() - sqrt_pi).abs() < 1e-12);
        let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        assert!((m2 - sqrt_pi / 2.0).abs() < 1e-12);
        let m4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert!((m4 - 3.0 * sqrt_pi / 4.0).abs() < 1e-11);
    }

    #[test]
    fn report_counts() {
        let mut r = ScoreReport::default();
        assert!(!bler_update(&[0, 1], &[0, 1], &mut r).unwrap());
        assert!(bler_update(&[0, 1], &[1, 1], &mut r).unwrap());
        assert_eq!(r.bler(), 0.5);
        assert!(bler_update(&[0], &[0, 1], &mut r).is_err());
    }

    #[test]
    fn na_bound_limits() {
        // C == R with large n: argument is the small positive log term
        let eps = na_bound_from(1_000_000, 500_000, 0.5, 0.5);
        assert!(eps < 0.5 && eps > 0.45);
    }
}
