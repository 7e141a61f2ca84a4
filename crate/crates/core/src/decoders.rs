//! Soft-decision decoders.
//!
//! LLR sign convention: a positive LLR favours bit 0. All decoders are
//! deterministic functions of `(code, llr, config)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::code::Code;
use crate::error::DecodeError;
use crate::gf2::words_for;

/// Largest `k` accepted by [`mld_bruteforce`].
pub const MLD_MAX_K: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub codeword_estimate: Vec<u8>,
    pub message_estimate: Vec<u8>,
    /// BP: a zero syndrome was reached. OSD and MLD: always true.
    pub converged: bool,
    pub iterations_used: usize,
    /// Negative Euclidean distance between the BPSK image of the estimate and the
    /// LLR vector. Ranks candidates exactly like the received-vector distance.
    pub soft_score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OsdConfig {
    pub order: usize,
}

/// Decoder selection used by the link pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    BeliefPropagation { max_iterations: usize },
    Osd(OsdConfig),
}

impl DecoderKind {
    pub fn decode(&self, code: &Code, llr: &[f64]) -> Result<DecodeResult, DecodeError> {
        match *self {
            DecoderKind::BeliefPropagation { max_iterations } => bp_decode(code, llr, max_iterations),
            DecoderKind::Osd(cfg) => osd_decode(code, llr, cfg),
        }
    }
}

#[inline]
fn hard_decision(llr: &[f64]) -> Vec<u8> {
    llr.iter().map(|&l| u8::from(l < 0.0)).collect()
}

/// `-|| (1 - 2c) - llr ||_2`
pub fn euclidean_score(codeword: &[u8], llr: &[f64]) -> f64 {
    let sq: f64 = codeword
        .iter()
        .zip(llr)
        .map(|(&c, &l)| {
            let x = 1.0 - 2.0 * f64::from(c);
            (x - l) * (x - l)
        })
        .sum();
    -libm::sqrt(sq)
}

fn check_len(code: &Code, llr: &[f64]) -> Result<(), DecodeError> {
    if llr.len() != code.n() {
        return Err(DecodeError::LengthMismatch { expected: code.n(), actual: llr.len() });
    }
    Ok(())
}

fn finish(code: &Code, codeword: Vec<u8>, llr: &[f64], converged: bool, iterations_used: usize) -> DecodeResult {
    let message_estimate = code.message_of(&codeword).expect("codeword has length n");
    let soft_score = euclidean_score(&codeword, llr);
    DecodeResult { codeword_estimate: codeword, message_estimate, converged, iterations_used, soft_score }
}

// atanh(1) is infinite; products of tanh are kept strictly inside (-1, 1).
const TANH_LIMIT: f64 = 1.0 - f64::EPSILON / 2.0;

/// Flooding sum-product belief propagation in the LLR domain (exact tanh rule).
///
/// The channel hard decision is checked before the first iteration; decoding stops
/// as soon as the hard decision satisfies every check.
pub fn bp_decode(code: &Code, llr: &[f64], max_iter: usize) -> Result<DecodeResult, DecodeError> {
    check_len(code, llr)?;
    let g = code.tanner();
    let n = code.n();
    let mut hard = hard_decision(llr);
    if syndrome_ok(g, &hard) {
        return Ok(finish(code, hard, llr, true, 0));
    }
    let edges = g.num_edges();
    let mut v2c: Vec<f64> = g.check_vars.iter().map(|&v| llr[v]).collect();
    let mut c2v = vec![0.0f64; edges];
    let mut total = vec![0.0f64; n];
    let mut prefix: Vec<f64> = Vec::new();

    for it in 1..=max_iter {
        for c in 0..g.num_checks() {
            let (lo, hi) = (g.check_offsets[c], g.check_offsets[c + 1]);
            let deg = hi - lo;
            prefix.clear();
            prefix.resize(deg + 1, 1.0);
            for j in 0..deg {
                prefix[j + 1] = prefix[j] * libm::tanh(0.5 * v2c[lo + j]);
            }
            let mut suffix = 1.0;
            for j in (0..deg).rev() {
                let t = libm::tanh(0.5 * v2c[lo + j]);
                let prod = (prefix[j] * suffix).clamp(-TANH_LIMIT, TANH_LIMIT);
                c2v[lo + j] = 2.0 * libm::atanh(prod);
                suffix *= t;
            }
        }
        for v in 0..n {
            let (lo, hi) = (g.var_offsets[v], g.var_offsets[v + 1]);
            let sum: f64 = g.var_edges[lo..hi].iter().map(|&e| c2v[e]).sum();
            total[v] = llr[v] + sum;
            for &e in &g.var_edges[lo..hi] {
                v2c[e] = total[v] - c2v[e];
            }
            hard[v] = u8::from(total[v] < 0.0);
        }
        if syndrome_ok(g, &hard) {
            return Ok(finish(code, hard, llr, true, it));
        }
    }
    Ok(finish(code, hard, llr, false, max_iter))
}

fn syndrome_ok(g: &crate::code::TannerGraph, hard: &[u8]) -> bool {
    (0..g.num_checks()).all(|c| g.check_vars[g.check_offsets[c]..g.check_offsets[c + 1]].iter().fold(0u8, |acc, &v| acc ^ hard[v]) == 0)
}

/// Ordered-statistics decoding of order `cfg.order`.
///
/// Positions are sorted by decreasing `|llr|`, `G` is reduced to systematic form on
/// the most reliable basis, and every test error pattern of weight `0..=order` on
/// that basis is re-encoded and scored by its Euclidean distance to the LLRs. The
/// best candidate wins; among equal scores the first in enumeration order (weight
/// ascending, then lexicographic support over the basis) is kept.
///
/// Patterns whose basis cost alone already exceeds the best score are skipped; this
/// bound is exact, so the output equals plain exhaustive enumeration.
pub fn osd_decode(code: &Code, llr: &[f64], cfg: OsdConfig) -> Result<DecodeResult, DecodeError> {
    osd_search(code, llr, cfg, true)
}

/// [`osd_decode`] without the bound, visiting every pattern.
pub fn osd_decode_exhaustive(code: &Code, llr: &[f64], cfg: OsdConfig) -> Result<DecodeResult, DecodeError> {
    osd_search(code, llr, cfg, false)
}

fn osd_search(code: &Code, llr: &[f64], cfg: OsdConfig, prune: bool) -> Result<DecodeResult, DecodeError> {
    check_len(code, llr)?;
    let (n, k) = (code.n(), code.k());
    if cfg.order > k {
        return Err(DecodeError::OrderTooLarge { order: cfg.order, k });
    }
    let rel: Vec<f64> = llr.iter().map(|l| l.abs()).collect();
    let hard = hard_decision(llr);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| rel[b].total_cmp(&rel[a]).then(a.cmp(&b)));

    let mut g = code.generator().clone();
    let pivots = g.eliminate(&order, None);
    debug_assert_eq!(pivots.len(), k);
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let parity_pos: Vec<usize> = order.iter().copied().filter(|&p| !is_pivot[p]).collect();
    let m = parity_pos.len();
    let pw = words_for(m).max(1);

    let mut rows = vec![0u64; k * pw];
    for i in 0..k {
        for (j, &p) in parity_pos.iter().enumerate() {
            if g.get(i, p) {
                rows[i * pw + j / 64] |= 1 << (j % 64);
            }
        }
    }
    // disagreement between the re-encoded MRB hard decision and the channel hard
    // decision, over the parity positions
    let mut base = vec![0u64; pw];
    for (i, &p) in pivots.iter().enumerate() {
        if hard[p] == 1 {
            for t in 0..pw {
                base[t] ^= rows[i * pw + t];
            }
        }
    }
    for (j, &p) in parity_pos.iter().enumerate() {
        if hard[p] == 1 {
            base[j / 64] ^= 1 << (j % 64);
        }
    }

    let nbytes = m.div_ceil(8);
    let mut table = vec![0.0f64; nbytes * 256];
    for b in 0..nbytes {
        for v in 1..256usize {
            let j = b * 8 + v.trailing_zeros() as usize;
            let r = if j < m { rel[parity_pos[j]] } else { 0.0 };
            table[b * 256 + v] = table[b * 256 + (v & (v - 1))] + r;
        }
    }
    let mrb_rel: Vec<f64> = pivots.iter().map(|&p| rel[p]).collect();
    // tail[w] = sum of the w smallest basis reliabilities
    let mut tail = vec![0.0f64; k + 1];
    for w in 1..=k {
        tail[w] = tail[w - 1] + mrb_rel[k - w];
    }

    let mut search = TepSearch {
        k,
        pw,
        nbytes,
        rows: &rows,
        table: &table,
        mrb_rel: &mrb_rel,
        tail: &tail,
        prune,
        masks: vec![0u64; (cfg.order + 1) * pw],
        support: Vec::with_capacity(cfg.order),
        best_cost: f64::INFINITY,
        best_support: Vec::new(),
    };
    search.masks[..pw].copy_from_slice(&base);
    for w in 0..=cfg.order {
        if prune && tail[w] > search.best_cost {
            continue;
        }
        search.visit(0, 0, w, 0.0);
    }

    let mut u: Vec<u8> = pivots.iter().map(|&p| hard[p]).collect();
    for &i in &search.best_support {
        u[i] ^= 1;
    }
    let mut codeword = vec![0u8; n];
    for (i, &p) in pivots.iter().enumerate() {
        codeword[p] = u[i];
    }
    let mut mask = base;
    for &i in &search.best_support {
        for t in 0..pw {
            mask[t] ^= rows[i * pw + t];
        }
    }
    for (j, &p) in parity_pos.iter().enumerate() {
        codeword[p] = hard[p] ^ ((mask[j / 64] >> (j % 64)) & 1) as u8;
    }
    debug_assert!(code.is_codeword(&codeword));
    Ok(finish(code, codeword, llr, true, 0))
}

struct TepSearch<'a> {
    k: usize,
    pw: usize,
    nbytes: usize,
    rows: &'a [u64],
    table: &'a [f64],
    mrb_rel: &'a [f64],
    tail: &'a [f64],
    prune: bool,
    masks: Vec<u64>,
    support: Vec<usize>,
    best_cost: f64,
    best_support: Vec<usize>,
}

impl TepSearch<'_> {
    #[inline]
    fn parity_cost(&self, mask: &[u64]) -> f64 {
        let mut cost = 0.0;
        for b in 0..self.nbytes {
            let byte = ((mask[b / 8] >> (8 * (b % 8))) & 0xff) as usize;
            cost += self.table[b * 256 + byte];
        }
        cost
    }

    fn visit(&mut self, depth: usize, start: usize, weight: usize, prefix: f64) {
        let pw = self.pw;
        let remaining = weight - depth;
        if remaining == 0 {
            let cost = prefix + self.parity_cost(&self.masks[depth * pw..(depth + 1) * pw]);
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best_support.clone_from(&self.support);
            }
            return;
        }
        let mut scratch = [0u64; 8];
        let end = self.k - remaining + 1;
        let mut first = start;
        if self.prune {
            // basis reliabilities are sorted in decreasing order, so the indices the
            // bound rejects form a leading run; the best cost only shrinks, so they
            // stay rejected
            let slack = self.best_cost - prefix - self.tail[remaining - 1];
            first += self.mrb_rel[start..end].partition_point(|&r| r > slack);
        }
        for a in first..end {
            let c = prefix + self.mrb_rel[a];
            if self.prune && c + self.tail[remaining - 1] > self.best_cost {
                continue;
            }
            if remaining == 1 && pw <= scratch.len() {
                for t in 0..pw {
                    scratch[t] = self.masks[depth * pw + t] ^ self.rows[a * pw + t];
                }
                let cost = c + self.parity_cost(&scratch[..pw]);
                if cost < self.best_cost {
                    self.best_cost = cost;
                    self.best_support.clone_from(&self.support);
                    self.best_support.push(a);
                }
                continue;
            }
            for t in 0..pw {
                self.masks[(depth + 1) * pw + t] = self.masks[depth * pw + t] ^ self.rows[a * pw + t];
            }
            self.support.push(a);
            self.visit(depth + 1, a + 1, weight, c);
            self.support.pop();
        }
    }
}

/// Exhaustive maximum-likelihood decoding over all `2^k` messages (`k <= 20`).
///
/// Message index `i` carries bit `j` of `i` as message bit `j`. Among equal scores
/// the lowest index wins.
pub fn mld_bruteforce(code: &Code, llr: &[f64]) -> Result<DecodeResult, DecodeError> {
    check_len(code, llr)?;
    let (n, k) = (code.n(), code.k());
    if k > MLD_MAX_K {
        return Err(DecodeError::TooLarge { k, limit: MLD_MAX_K });
    }
    let hard = hard_decision(llr);
    let rel: Vec<f64> = llr.iter().map(|l| l.abs()).collect();
    let gen = code.generator();
    let stride = words_for(n);
    let hard_words = crate::gf2::pack_bits(&hard);
    let mut best = (f64::INFINITY, 0usize);
    let mut word = vec![0u64; stride];
    for idx in 0..(1usize << k) {
        word.iter_mut().for_each(|w| *w = 0);
        for j in 0..k {
            if (idx >> j) & 1 == 1 {
                for (w, r) in word.iter_mut().zip(gen.row_words(j)) {
                    *w ^= r;
                }
            }
        }
        let mut cost = 0.0;
        for (t, (&w, &h)) in word.iter().zip(&hard_words).enumerate() {
            let mut diff = w ^ h;
            while diff != 0 {
                let b = diff.trailing_zeros() as usize;
                cost += rel[t * 64 + b];
                diff &= diff - 1;
            }
        }
        if cost < best.0 {
            best = (cost, idx);
        }
    }
    let message: Vec<u8> = (0..k).map(|j| ((best.1 >> j) & 1) as u8).collect();
    let codeword = code.encode(&message).expect("message has length k");
    Ok(finish(code, codeword, llr, true, 0))
}
