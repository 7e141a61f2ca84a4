//! Polar(64, 32) construction by Gaussian-approximation density evolution.

use alloc::vec;
use alloc::vec::Vec;

use crate::code::{Code, CodeFamily};
use crate::gf2::Gf2Matrix;

pub const DEFAULT_DESIGN_SNR_DB: f64 = 2.0;

/// Chung's approximation of `1 - E[tanh(L/2)]` for `L ~ N(m, 2m)`.
fn phi(m: f64) -> f64 {
    if m <= 0.0 {
        1.0
    } else if m < 10.0 {
        libm::exp(-0.4527 * libm::pow(m, 0.86) + 0.0218)
    } else {
        libm::sqrt(core::f64::consts::PI / m) * libm::exp(-m / 4.0) * (1.0 - 10.0 / (7.0 * m))
    }
}

/// Inverse of [`phi`] by bisection; `phi` is decreasing.
fn phi_inv(y: f64) -> f64 {
    if y >= 1.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while phi(hi) > y {
        hi *= 2.0;
        if hi > 1e6 {
            return hi;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Mean LLR of each synthetic bit channel of `x = u F^{(x)log2 n}` at the given SNR
/// (`1/sigma^2`).
///
/// Index bits are consumed least-significant first: the LSB selects the combining
/// step nearest to the physical channel. A 0 bit is the check-node (degraded)
/// branch, a 1 bit the variable-node (upgraded) branch.
pub fn bit_channel_means(log2_n: u32, design_snr_db: f64) -> Vec<f64> {
    let sigma2 = libm::pow(10.0, -design_snr_db / 10.0);
    let m0 = 2.0 / sigma2;
    let n = 1usize << log2_n;
    (0..n)
        .map(|i| {
            let mut m = m0;
            for level in 0..log2_n {
                m = if (i >> level) & 1 == 1 {
                    2.0 * m
                } else {
                    // 1 - (1 - phi)^2, written to keep precision when phi is tiny
                    let f = phi(m);
                    phi_inv(f * (2.0 - f))
                };
            }
            m
        })
        .collect()
}

/// Indices of the `k` most reliable bit channels, ascending.
pub fn information_set(log2_n: u32, k: usize, design_snr_db: f64) -> Vec<usize> {
    let means = bit_channel_means(log2_n, design_snr_db);
    let mut idx: Vec<usize> = (0..means.len()).collect();
    // most reliable first; ties resolved toward the larger index
    idx.sort_by(|&a, &b| means[b].total_cmp(&means[a]).then(b.cmp(&a)));
    let mut info = idx[..k].to_vec();
    info.sort_unstable();
    info
}

/// `F^{(x)log2 n}` with `F = [[1,0],[1,1]]`.
pub fn kronecker_power(log2_n: u32) -> Gf2Matrix {
    let n = 1usize << log2_n;
    let mut m = Gf2Matrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            // entry is 1 iff the bits of c are a subset of the bits of r
            if c & !r == 0 {
                m.set(r, c, true);
            }
        }
    }
    m
}

pub fn build_polar(log2_n: u32, k: usize, design_snr_db: f64) -> Code {
    let info = information_set(log2_n, k, design_snr_db);
    let kron = kronecker_power(log2_n);
    let n = kron.cols();
    let mut g = Gf2Matrix::zeros(k, n);
    for (r, &i) in info.iter().enumerate() {
        for c in 0..n {
            if kron.get(i, c) {
                g.set(r, c, true);
            }
        }
    }
    let d_min = info.iter().map(|&i| 1usize << i.count_ones()).min();
    Code::from_generator(CodeFamily::Polar, g, d_min).expect("polar generator rows are independent")
}

pub fn build_polar_64_32(design_snr_db: f64) -> Code {
    build_polar(6, 32, design_snr_db)
}

/// Frozen-bit indicator for reference.
pub fn frozen_mask(log2_n: u32, k: usize, design_snr_db: f64) -> Vec<bool> {
    let mut frozen = vec![true; 1 << log2_n];
    for i in information_set(log2_n, k, design_snr_db) {
        frozen[i] = false;
    }
    frozen
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_inverse_round_trip() {
        for &m in &[0.2, 0.5, 3.0, 9.5, 10.5, 40.0] {
            let back = phi_inv(phi(m));
            assert!((back - m).abs() / m < 1e-9, "{m} -> {back}");
        }
    }

    #[test]
    fn info_set_size_and_extremes() {
        let info = information_set(6, 32, 2.0);
        assert_eq!(info.len(), 32);
        assert!(info.contains(&63));
        assert!(!info.contains(&0));
    }

    #[test]
    fn two_by_two_kernel_orientation() {
        // x = (u0 + u1, u1): u1 is seen twice and is the better channel.
        let means = bit_channel_means(1, 0.0);
        assert!(means[1] > means[0]);
        assert!((means[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn polar_code_is_valid() {
        let code = build_polar_64_32(DEFAULT_DESIGN_SNR_DB);
        assert_eq!((code.n(), code.k()), (64, 32));
        assert_eq!(code.encode(&[0; 32]).unwrap(), vec![0; 64]);
        assert!(code.d_min_hint().unwrap() >= 8);
    }
}
