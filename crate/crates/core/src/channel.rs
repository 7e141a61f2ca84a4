//! BPSK over AWGN with reproducible, counter-keyed noise.
//!
//! SNR is `1 / sigma^2` with unit-energy BPSK symbols.

use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    snr_db: f64,
    sigma: f64,
}

impl ChannelParams {
    /// `sigma = 10^(-snr_db / 20)`
    pub fn from_snr_db(snr_db: f64) -> Self {
        ChannelParams { snr_db, sigma: libm::pow(10.0, -snr_db / 20.0) }
    }

    /// Panics unless `sigma` is positive and finite.
    pub fn from_sigma(sigma: f64) -> Self {
        assert!(sigma > 0.0 && sigma.is_finite(), "sigma must be positive, got {sigma}");
        ChannelParams { snr_db: -20.0 * libm::log10(sigma), sigma }
    }

    pub fn snr_db(&self) -> f64 {
        self.snr_db
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma * self.sigma
    }

    /// `Eb/N0 = SNR / (2R)` in dB, for comparison with curves using that axis.
    pub fn ebn0_db(&self, rate: f64) -> f64 {
        self.snr_db - 10.0 * libm::log10(2.0 * rate)
    }
}

/// Identifies one independent noise sequence. Streams with equal fields produce
/// identical noise; any differing field gives an independent stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NoiseStream {
    pub master_seed: u64,
    pub snr_index: u32,
    pub sentence: u64,
    pub trial: u32,
    pub segment: u32,
    pub round: u32,
}

impl NoiseStream {
    pub fn new(master_seed: u64) -> Self {
        NoiseStream { master_seed, snr_index: 0, sentence: 0, trial: 0, segment: 0, round: 0 }
    }

    pub fn with_sentence(self, sentence: u64, trial: u32) -> Self {
        NoiseStream { sentence, trial, ..self }
    }

    pub fn with_segment(self, segment: u32) -> Self {
        NoiseStream { segment, ..self }
    }

    pub fn with_round(self, round: u32) -> Self {
        NoiseStream { round, ..self }
    }

    pub fn with_snr_index(self, snr_index: u32) -> Self {
        NoiseStream { snr_index, ..self }
    }

    /// The stream id is the cipher key, so draws never depend on call order.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.sentence.to_le_bytes());
        key[16..20].copy_from_slice(&self.snr_index.to_le_bytes());
        key[20..24].copy_from_slice(&self.trial.to_le_bytes());
        key[24..28].copy_from_slice(&self.segment.to_le_bytes());
        key[28..32].copy_from_slice(&self.round.to_le_bytes());
        ChaCha12Rng::from_seed(key)
    }
}

/// `x = 1 - 2c`
pub fn bpsk_modulate(bits: &[u8]) -> Vec<f64> {
    bits.iter().map(|&b| if b & 1 == 0 { 1.0 } else { -1.0 }).collect()
}

/// Sign slicer: negative samples are bit 1.
pub fn hard_demodulate(samples: &[f64]) -> Vec<u8> {
    samples.iter().map(|&y| u8::from(y < 0.0)).collect()
}

/// `y = x + z`, `z_i ~ N(0, sigma^2)`, drawn from `stream`.
pub fn awgn(symbols: &[f64], params: &ChannelParams, stream: &NoiseStream) -> Vec<f64> {
    let mut rng = stream.rng();
    let sigma = params.sigma();
    symbols
        .iter()
        .map(|&x| {
            let z: f64 = StandardNormal.sample(&mut rng);
            x + sigma * z
        })
        .collect()
}

/// `L_i = 2 y_i / sigma^2`; positive favours bit 0.
pub fn llr(received: &[f64], params: &ChannelParams) -> Vec<f64> {
    let scale = 2.0 / params.sigma2();
    received.iter().map(|&y| scale * y).collect()
}

/// Gaussian tail `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / core::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn modulation_examples() {
        assert_eq!(bpsk_modulate(&[0, 1, 0]), vec![1.0, -1.0, 1.0]);
        assert_eq!(hard_demodulate(&bpsk_modulate(&[1, 1, 0, 1])), vec![1, 1, 0, 1]);
    }

    #[test]
    fn snr_sigma_round_trip() {
        for &snr in &[-2.0, 0.0, 1.0, 2.5, 20.0] {
            let p = ChannelParams::from_snr_db(snr);
            let back = ChannelParams::from_sigma(p.sigma());
            assert!((back.snr_db() - snr).abs() <= 1e-12 * snr.abs().max(1.0));
            assert!((1.0 / p.sigma2() - libm::pow(10.0, snr / 10.0)).abs() < 1e-9);
        }
        assert!((ChannelParams::from_snr_db(1.0).ebn0_db(0.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn llr_formula() {
        let p = ChannelParams::from_sigma(1.0);
        assert_eq!(llr(&[1.0, -0.5], &p), vec![2.0, -1.0]);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let p = ChannelParams::from_snr_db(0.0);
        let x = vec![1.0; 64];
        let s = NoiseStream::new(42).with_sentence(3, 1).with_segment(2);
        assert_eq!(awgn(&x, &p, &s), awgn(&x, &p, &s));
        assert_ne!(awgn(&x, &p, &s), awgn(&x, &p, &s.with_round(1)));
        assert_ne!(awgn(&x, &p, &s), awgn(&x, &p, &s.with_segment(3)));
    }

    #[test]
    fn tiny_sigma_is_transparent() {
        let p = ChannelParams::from_sigma(1e-300);
        let x = bpsk_modulate(&[0, 1, 1, 0]);
        assert_eq!(awgn(&x, &p, &NoiseStream::new(1)), x);
    }
}
