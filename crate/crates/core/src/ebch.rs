//! Extended narrow-sense BCH(128, 64).
//!
//! BCH(127, 64) with designed distance 21 over GF(2^7) (primitive polynomial
//! x^7 + x^3 + 1), extended by an overall even-parity bit.

use alloc::vec;
use alloc::vec::Vec;

use crate::code::{Code, CodeFamily};
use crate::gf2::Gf2Matrix;

const M: usize = 7;
const FIELD_ORDER: usize = (1 << M) - 1; // 127
const PRIMITIVE_POLY: u16 = 0b1000_1001; // x^7 + x^3 + 1
const DESIGNED_DISTANCE: usize = 21;

/// Arithmetic in GF(2^7) through exp/log tables.
#[derive(Debug, Clone)]
pub struct Gf128 {
    exp: [u8; 2 * FIELD_ORDER],
    log: [u8; FIELD_ORDER + 1],
}

impl Default for Gf128 {
    fn default() -> Self {
        Self::new()
    }
}

impl Gf128 {
    pub fn new() -> Self {
        let mut exp = [0u8; 2 * FIELD_ORDER];
        let mut log = [0u8; FIELD_ORDER + 1];
        let mut x: u16 = 1;
        for i in 0..FIELD_ORDER {
            exp[i] = x as u8;
            log[x as usize] = i as u8;
            x <<= 1;
            if x & (1 << M) != 0 {
                x ^= PRIMITIVE_POLY;
            }
        }
        for i in FIELD_ORDER..2 * FIELD_ORDER {
            exp[i] = exp[i - FIELD_ORDER];
        }
        Gf128 { exp, log }
    }

    /// `alpha^i`
    pub fn alpha_pow(&self, i: usize) -> u8 {
        self.exp[i % FIELD_ORDER]
    }

    pub fn mul(&self, a: u8, b: u8) -> u8 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    /// Evaluates a GF(2) polynomial (coefficients low degree first) at `x`.
    pub fn eval_binary_poly(&self, coeffs: &[u8], x: u8) -> u8 {
        coeffs.iter().rev().fold(0u8, |acc, &c| self.mul(acc, x) ^ c)
    }
}

/// Minimal polynomial of `alpha^i` over GF(2), low degree first.
fn minimal_polynomial(field: &Gf128, i: usize) -> Vec<u8> {
    let mut coset = vec![i % FIELD_ORDER];
    let mut j = (2 * i) % FIELD_ORDER;
    while j != i % FIELD_ORDER {
        coset.push(j);
        j = (2 * j) % FIELD_ORDER;
    }
    // product of (x - alpha^j) over the coset, coefficients in GF(2^7)
    let mut poly: Vec<u8> = vec![1];
    for &e in &coset {
        let root = field.alpha_pow(e);
        let mut next = vec![0u8; poly.len() + 1];
        for (d, &c) in poly.iter().enumerate() {
            next[d + 1] ^= c;
            next[d] ^= field.mul(c, root);
        }
        poly = next;
    }
    debug_assert!(poly.iter().all(|&c| c <= 1), "minimal polynomial must be binary");
    poly
}

fn poly_mul_gf2(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 1 {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] ^= y;
            }
        }
    }
    out
}

/// Generator polynomial of the narrow-sense BCH(127, 64) code: lcm of the minimal
/// polynomials of `alpha^1 .. alpha^20`. Coefficients low degree first.
pub fn bch_127_64_generator_polynomial() -> Vec<u8> {
    let field = Gf128::new();
    let mut covered = [false; FIELD_ORDER];
    let mut g = vec![1u8];
    for i in 1..DESIGNED_DISTANCE {
        if covered[i] {
            continue;
        }
        let mut j = i;
        loop {
            covered[j] = true;
            j = (2 * j) % FIELD_ORDER;
            if j == i {
                break;
            }
        }
        g = poly_mul_gf2(&g, &minimal_polynomial(&field, i));
    }
    g
}

/// Builds the (128, 64) extended BCH code with a systematic generator (message in
/// positions 0..64) and `d_min_hint = 22`.
pub fn build_ebch_128_64() -> Code {
    let g_poly = bch_127_64_generator_polynomial();
    let n_base = FIELD_ORDER;
    let k = n_base - (g_poly.len() - 1);
    let mut shifts = Gf2Matrix::zeros(k, n_base + 1);
    for r in 0..k {
        for (d, &c) in g_poly.iter().enumerate() {
            if c == 1 {
                shifts.set(r, r + d, true);
            }
        }
    }
    let order: Vec<usize> = (0..=n_base).collect();
    let mut generator = shifts.reduce(&order).expect("valid permutation").reduced;
    for r in 0..k {
        if generator.row_weight(r) % 2 == 1 {
            generator.set(r, n_base, true);
        }
    }
    Code::from_generator(CodeFamily::Ebch, generator, Some(22)).expect("eBCH(128,64) construction is valid")
}
