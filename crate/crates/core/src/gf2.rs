//! Dense binary matrices with packed rows.
//!
//! Rows are stored row-major in `u64` words, least-significant bit first: column `c`
//! of a row lives in word `c / 64` at bit `c % 64`. Padding bits past `cols` are
//! always zero, so whole-word operations (XOR, AND + popcount) are safe.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::CodeError;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    bits: Vec<u64>,
}

/// Output of [`Gf2Matrix::reduce`].
#[derive(Debug, Clone)]
pub struct Reduction {
    /// Row-reduced matrix, in the original column indexing. Pivot column `pivots[i]`
    /// holds a single 1, in row `i`.
    pub reduced: Gf2Matrix,
    /// Pivot column of each of the first `rank` rows, in the order they were found.
    pub pivots: Vec<usize>,
    /// Column order actually used: the pivot columns followed by the remaining
    /// columns in requested-preference order.
    pub permutation: Vec<usize>,
    /// Accumulated row operations: `transform * input == reduced`.
    pub transform: Gf2Matrix,
}

impl Reduction {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

/// Packs a 0/1 slice into LSB-first words.
pub fn pack_bits(bits: &[u8]) -> Vec<u64> {
    let mut out = vec![0u64; words_for(bits.len())];
    for (i, &b) in bits.iter().enumerate() {
        if b & 1 == 1 {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

/// Inverse of [`pack_bits`], producing `len` entries.
pub fn unpack_bits(words: &[u64], len: usize) -> Vec<u8> {
    (0..len).map(|i| ((words[i / 64] >> (i % 64)) & 1) as u8).collect()
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Gf2Matrix { rows, cols, stride, bits: vec![0; rows * stride] }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from 0/1 rows; every row must have the same length.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, CodeError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(CodeError::Dimension { expected: cols, actual: row.len() });
            }
            for (j, &b) in row.iter().enumerate() {
                if b & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    /// Parses whitespace-free `0`/`1` lines, as written by [`Gf2Matrix::to_text`].
    pub fn from_text(text: &str) -> Result<Self, CodeError> {
        let mut rows = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .chars()
                .map(|c| match c {
                    '0' => Ok(0u8),
                    '1' => Ok(1u8),
                    other => Err(CodeError::Parse { line: line_no + 1, reason: alloc::format!("unexpected character {other:?}") }),
                })
                .collect::<Result<Vec<u8>, _>>()?;
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    /// One line of `0`/`1` characters per row.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.rows * (self.cols + 1));
        for r in 0..self.rows {
            for c in 0..self.cols {
                s.push(if self.get(r, c) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        (self.bits[r * self.stride + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        let w = &mut self.bits[r * self.stride + c / 64];
        if value {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.bits[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row_bits(&self, r: usize) -> Vec<u8> {
        unpack_bits(self.row_words(r), self.cols)
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.bits.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// `row[dst] ^= row[src]`
    pub fn xor_row_into(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        for w in 0..self.stride {
            let v = self.bits[src * self.stride + w];
            self.bits[dst * self.stride + w] ^= v;
        }
    }

    /// Row vector times matrix, `v * self`, with `v` of length `rows`.
    pub fn vec_mul(&self, v: &[u8]) -> Result<Vec<u8>, CodeError> {
        if v.len() != self.rows {
            return Err(CodeError::Dimension { expected: self.rows, actual: v.len() });
        }
        let mut acc = vec![0u64; self.stride];
        for (r, &b) in v.iter().enumerate() {
            if b & 1 == 1 {
                for (a, w) in acc.iter_mut().zip(self.row_words(r)) {
                    *a ^= w;
                }
            }
        }
        Ok(unpack_bits(&acc, self.cols))
    }

    /// Matrix times column vector, `self * v^T`, with `v` of length `cols`.
    pub fn mul_vec(&self, v: &[u8]) -> Result<Vec<u8>, CodeError> {
        if v.len() != self.cols {
            return Err(CodeError::Dimension { expected: self.cols, actual: v.len() });
        }
        let packed = pack_bits(v);
        Ok((0..self.rows)
            .map(|r| {
                let ones: u32 = self.row_words(r).iter().zip(&packed).map(|(a, b)| (a & b).count_ones()).sum();
                (ones & 1) as u8
            })
            .collect())
    }

    pub fn mul(&self, other: &Gf2Matrix) -> Result<Gf2Matrix, CodeError> {
        if self.cols != other.rows {
            return Err(CodeError::Dimension { expected: self.cols, actual: other.rows });
        }
        let mut out = Gf2Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    for w in 0..out.stride {
                        out.bits[r * out.stride + w] ^= other.bits[k * other.stride + w];
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut t = Gf2Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Keeps the listed columns, in the listed order.
    pub fn select_columns(&self, columns: &[usize]) -> Gf2Matrix {
        let mut out = Gf2Matrix::zeros(self.rows, columns.len());
        for r in 0..self.rows {
            for (j, &c) in columns.iter().enumerate() {
                if self.get(r, c) {
                    out.set(r, j, true);
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        let order: Vec<usize> = (0..self.cols).collect();
        work.eliminate(&order, None).len()
    }

    /// Gauss-Jordan elimination honouring a column preference.
    ///
    /// Columns are tried in `column_order`; a column with no usable 1 below the
    /// current rank is dependent and skipped, so the next eligible column takes its
    /// place. Rank deficiency is reported through [`Reduction::rank`].
    pub fn reduce(&self, column_order: &[usize]) -> Result<Reduction, CodeError> {
        check_permutation(column_order, self.cols)?;
        let mut reduced = self.clone();
        let mut transform = Gf2Matrix::identity(self.rows);
        let pivots = reduced.eliminate(column_order, Some(&mut transform));
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut permutation = pivots.clone();
        permutation.extend(column_order.iter().copied().filter(|&c| !is_pivot[c]));
        Ok(Reduction { reduced, pivots, permutation, transform })
    }

    /// In-place elimination; returns the pivot columns. Row operations are mirrored
    /// onto `shadow` when given.
    pub(crate) fn eliminate(&mut self, column_order: &[usize], mut shadow: Option<&mut Gf2Matrix>) -> Vec<usize> {
        let mut pivots = Vec::with_capacity(self.rows.min(self.cols));
        let stride = self.stride;
        for &c in column_order {
            let rank = pivots.len();
            if rank == self.rows {
                break;
            }
            let (w, mask) = (c / 64, 1u64 << (c % 64));
            let Some(found) = (rank..self.rows).find(|&r| self.bits[r * stride + w] & mask != 0) else {
                continue;
            };
            self.swap_rows(found, rank);
            if let Some(s) = shadow.as_deref_mut() {
                s.swap_rows(found, rank);
            }
            for r in 0..self.rows {
                if r != rank && self.bits[r * stride + w] & mask != 0 {
                    self.xor_row_into(rank, r);
                    if let Some(s) = shadow.as_deref_mut() {
                        s.xor_row_into(rank, r);
                    }
                }
            }
            pivots.push(c);
        }
        pivots
    }

    /// Basis (as rows) of `{x : self * x^T = 0}`.
    pub fn null_space(&self) -> Gf2Matrix {
        let mut work = self.clone();
        let order: Vec<usize> = (0..self.cols).collect();
        let pivots = work.eliminate(&order, None);
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut basis = Gf2Matrix::zeros(free.len(), self.cols);
        for (b, &f) in free.iter().enumerate() {
            basis.set(b, f, true);
            for (r, &p) in pivots.iter().enumerate() {
                if work.get(r, f) {
                    basis.set(b, p, true);
                }
            }
        }
        basis
    }

    /// Inverse of a square full-rank matrix.
    pub fn inverse(&self) -> Result<Gf2Matrix, CodeError> {
        if self.rows != self.cols {
            return Err(CodeError::Dimension { expected: self.rows, actual: self.cols });
        }
        let order: Vec<usize> = (0..self.cols).collect();
        let red = self.reduce(&order)?;
        if red.rank() != self.rows {
            return Err(CodeError::RankDeficient { expected: self.rows, actual: red.rank() });
        }
        // Pivot i sits in column pivots[i]; with natural order and full rank that is i.
        Ok(red.transform)
    }
}

fn check_permutation(order: &[usize], n: usize) -> Result<(), CodeError> {
    if order.len() != n {
        return Err(CodeError::Dimension { expected: n, actual: order.len() });
    }
    let mut seen = vec![false; n];
    for &c in order {
        if c >= n || seen[c] {
            return Err(CodeError::InvalidPermutation);
        }
        seen[c] = true;
    }
    Ok(())
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows, self.cols)?;
        if self.rows <= 16 && self.cols <= 64 {
            f.write_str(&self.to_text())?;
        }
        Ok(())
    }
}
