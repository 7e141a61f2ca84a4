//! Binary linear block codes.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::CodeError;
use crate::gf2::{pack_bits, Gf2Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodeFamily {
    Ebch,
    Ldpc,
    Polar,
    /// Small hand-built codes (test fixtures, extended Hamming).
    Other,
}

/// Sparse view of the parity-check matrix used by belief propagation.
#[derive(Debug, Clone)]
pub struct TannerGraph {
    /// `check_vars[check_offsets[c]..check_offsets[c + 1]]` are the variables of check `c`.
    pub check_offsets: Vec<usize>,
    pub check_vars: Vec<usize>,
    /// For each variable, the edge indices (into `check_vars`) touching it.
    pub var_offsets: Vec<usize>,
    pub var_edges: Vec<usize>,
}

impl TannerGraph {
    pub fn from_parity_check(h: &Gf2Matrix) -> Self {
        let mut check_offsets = vec![0];
        let mut check_vars = Vec::new();
        for r in 0..h.rows() {
            for (w, &word) in h.row_words(r).iter().enumerate() {
                let mut word = word;
                while word != 0 {
                    let b = word.trailing_zeros() as usize;
                    check_vars.push(w * 64 + b);
                    word &= word - 1;
                }
            }
            check_offsets.push(check_vars.len());
        }
        let n = h.cols();
        let mut degree = vec![0usize; n];
        for &v in &check_vars {
            degree[v] += 1;
        }
        let mut var_offsets = vec![0; n + 1];
        for v in 0..n {
            var_offsets[v + 1] = var_offsets[v] + degree[v];
        }
        let mut fill = var_offsets.clone();
        let mut var_edges = vec![0; check_vars.len()];
        for (e, &v) in check_vars.iter().enumerate() {
            var_edges[fill[v]] = e;
            fill[v] += 1;
        }
        TannerGraph { check_offsets, check_vars, var_offsets, var_edges }
    }

    pub fn num_checks(&self) -> usize {
        self.check_offsets.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.check_vars.len()
    }
}

/// A binary linear block code `C(n, k)` with both of its defining matrices.
///
/// Immutable once built; construction asserts `G * H^T = 0`, `rank(G) = k` and
/// `rank(H) = n - k`.
#[derive(Debug, Clone)]
pub struct Code {
    n: usize,
    k: usize,
    family: CodeFamily,
    generator: Gf2Matrix,
    parity_check: Gf2Matrix,
    d_min_hint: Option<usize>,
    info_positions: Vec<usize>,
    info_inverse: Gf2Matrix,
    tanner: TannerGraph,
}

impl Code {
    /// Builds a code from both matrices, validating every structural invariant.
    pub fn new(
        family: CodeFamily,
        generator: Gf2Matrix,
        parity_check: Gf2Matrix,
        d_min_hint: Option<usize>,
    ) -> Result<Self, CodeError> {
        let n = generator.cols();
        let k = generator.rows();
        if parity_check.cols() != n {
            return Err(CodeError::Dimension { expected: n, actual: parity_check.cols() });
        }
        if k == 0 || k >= n {
            return Err(CodeError::InvalidParameters(alloc::format!("k = {k} must satisfy 0 < k < n = {n}")));
        }
        let order: Vec<usize> = (0..n).collect();
        let red = generator.reduce(&order)?;
        if red.rank() != k {
            return Err(CodeError::RankDeficient { expected: k, actual: red.rank() });
        }
        let h_rank = parity_check.rank();
        if h_rank != n - k {
            return Err(CodeError::RankDeficient { expected: n - k, actual: h_rank });
        }
        if !generator.mul(&parity_check.transpose())?.is_zero() {
            return Err(CodeError::NotOrthogonal);
        }
        let info_positions = red.pivots;
        let info_inverse = generator.select_columns(&info_positions).inverse()?;
        let tanner = TannerGraph::from_parity_check(&parity_check);
        Ok(Code { n, k, family, generator, parity_check, d_min_hint, info_positions, info_inverse, tanner })
    }

    /// Derives `H` as a basis of the dual code.
    pub fn from_generator(family: CodeFamily, generator: Gf2Matrix, d_min_hint: Option<usize>) -> Result<Self, CodeError> {
        let h = generator.null_space();
        Self::new(family, generator, h, d_min_hint)
    }

    /// Keeps `H` as given (redundant rows allowed, `k = n - rank(H)`) and derives a
    /// systematic `G`: the message bits land on the non-pivot columns of the reduced
    /// `H`, listed in [`Code::info_positions`].
    pub fn from_parity_check(family: CodeFamily, parity_check: Gf2Matrix, d_min_hint: Option<usize>) -> Result<Self, CodeError> {
        let generator = parity_check.null_space();
        Self::new(family, generator, parity_check, d_min_hint)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `k / n`
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn family(&self) -> CodeFamily {
        self.family
    }

    pub fn generator(&self) -> &Gf2Matrix {
        &self.generator
    }

    pub fn parity_check(&self) -> &Gf2Matrix {
        &self.parity_check
    }

    pub fn d_min_hint(&self) -> Option<usize> {
        self.d_min_hint
    }

    /// Codeword positions on which `G` restricted is invertible.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn tanner(&self) -> &TannerGraph {
        &self.tanner
    }

    /// `c = b G` over GF(2).
    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>, CodeError> {
        if message.len() != self.k {
            return Err(CodeError::Dimension { expected: self.k, actual: message.len() });
        }
        self.generator.vec_mul(message)
    }

    /// `H w^T`; all-zero iff `word` is a codeword.
    pub fn syndrome(&self, word: &[u8]) -> Result<Vec<u8>, CodeError> {
        if word.len() != self.n {
            return Err(CodeError::Dimension { expected: self.n, actual: word.len() });
        }
        self.parity_check.mul_vec(word)
    }

    pub fn is_codeword(&self, word: &[u8]) -> bool {
        if word.len() != self.n {
            return false;
        }
        let packed = pack_bits(word);
        (0..self.parity_check.rows()).all(|r| {
            let ones: u32 = self.parity_check.row_words(r).iter().zip(&packed).map(|(a, b)| (a & b).count_ones()).sum();
            ones & 1 == 0
        })
    }

    /// Recovers the message of a codeword. The result is only meaningful when
    /// `codeword` is in the code.
    pub fn message_of(&self, codeword: &[u8]) -> Result<Vec<u8>, CodeError> {
        if codeword.len() != self.n {
            return Err(CodeError::Dimension { expected: self.n, actual: codeword.len() });
        }
        let restricted: Vec<u8> = self.info_positions.iter().map(|&p| codeword[p]).collect();
        self.info_inverse.vec_mul(&restricted)
    }
}

/// The (8,4) extended Hamming code, d_min = 4.
pub fn extended_hamming_8_4() -> Code {
    let g = Gf2Matrix::from_rows(&[
        [1u8, 0, 0, 0, 0, 1, 1, 1],
        [0, 1, 0, 0, 1, 0, 1, 1],
        [0, 0, 1, 0, 1, 1, 0, 1],
        [0, 0, 0, 1, 1, 1, 1, 0],
    ])
    .expect("fixed rows");
    Code::from_generator(CodeFamily::Other, g, Some(4)).expect("extended Hamming code is valid")
}
