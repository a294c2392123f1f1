//! Binary matrices over GF(2).
//!
//! [`BinaryMatrix`] is the sparse storage used for check matrices and the
//! circuit-level matrix. [`BitMatrix`] is a dense, bit-packed companion used for
//! elimination (rank, kernels, OSD).

use std::fmt;

use crate::error::{Error, Result};

/// Sparse binary matrix stored as sorted per-row supports.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    row_support: Vec<Vec<usize>>,
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryMatrix({}x{}, nnz={})", self.rows, self.cols, self.nnz())?;
        if self.rows <= 16 && self.cols <= 64 {
            for r in 0..self.rows {
                let line: String = (0..self.cols)
                    .map(|c| if self.get(r, c) { '1' } else { '0' })
                    .collect();
                write!(f, "\n  {line}")?;
            }
        }
        Ok(())
    }
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_support: vec![Vec::new(); rows],
        }
    }

    pub fn identity(size: usize) -> Self {
        Self {
            rows: size,
            cols: size,
            row_support: (0..size).map(|i| vec![i]).collect(),
        }
    }

    /// Builds a matrix from `(row, col)` coordinates. Duplicates and
    /// out-of-range coordinates are rejected.
    pub fn from_entries<I>(rows: usize, cols: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut row_support = vec![Vec::new(); rows];
        for (row, col) in entries {
            if row >= rows || col >= cols {
                return Err(Error::OutOfRange {
                    row,
                    col,
                    rows,
                    cols,
                });
            }
            row_support[row].push(col);
        }
        for (row, support) in row_support.iter_mut().enumerate() {
            support.sort_unstable();
            if let Some(w) = support.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateEntry { row, col: w[0] });
            }
        }
        Ok(Self {
            rows,
            cols,
            row_support,
        })
    }

    /// Builds a matrix from row supports.
    pub fn from_rows(cols: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let n_rows = rows.len();
        let entries = rows
            .into_iter()
            .enumerate()
            .flat_map(|(r, s)| s.into_iter().map(move |c| (r, c)));
        Self::from_entries(n_rows, cols, entries)
    }

    /// Builds a matrix from dense 0/1 rows. All rows must have equal length.
    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut support = Vec::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Shape(format!(
                    "row {r} has length {}, expected {cols}",
                    row.len()
                )));
            }
            support.push(
                row.iter()
                    .enumerate()
                    .filter(|(_, &b)| b & 1 == 1)
                    .map(|(c, _)| c)
                    .collect(),
            );
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            row_support: support,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.row_support.iter().map(Vec::len).sum()
    }

    /// True when the matrix has no entries at all.
    pub fn is_zero(&self) -> bool {
        self.row_support.iter().all(Vec::is_empty)
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.row_support[r]
    }

    pub fn row_supports(&self) -> &[Vec<usize>] {
        &self.row_support
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.row_support[r].binary_search(&c).is_ok()
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.row_support
            .iter()
            .enumerate()
            .flat_map(|(r, s)| s.iter().map(move |&c| (r, c)))
    }

    pub fn column_supports(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.cols];
        for (r, c) in self.entries() {
            cols[c].push(r);
        }
        cols
    }

    pub fn transpose(&self) -> Self {
        Self {
            rows: self.cols,
            cols: self.rows,
            row_support: self.column_supports(),
        }
    }

    pub fn max_row_weight(&self) -> usize {
        self.row_support.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_col_weight(&self) -> usize {
        let mut w = vec![0usize; self.cols];
        for (_, c) in self.entries() {
            w[c] += 1;
        }
        w.into_iter().max().unwrap_or(0)
    }

    /// `H v` over GF(2) for a dense 0/1 vector.
    pub fn mul_vec(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        self.row_support
            .iter()
            .map(|s| s.iter().fold(0u8, |acc, &c| acc ^ (v[c] & 1)))
            .collect()
    }

    /// `A B` over GF(2).
    pub fn mul(&self, other: &BinaryMatrix) -> Result<BinaryMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Vec::with_capacity(self.rows);
        let mut acc = vec![0u8; other.cols];
        for s in &self.row_support {
            for &k in s {
                for &c in other.row(k) {
                    acc[c] ^= 1;
                }
            }
            let row: Vec<usize> = (0..other.cols).filter(|&c| acc[c] == 1).collect();
            for &c in &row {
                acc[c] = 0;
            }
            out.push(row);
        }
        Ok(BinaryMatrix {
            rows: self.rows,
            cols: other.cols,
            row_support: out,
        })
    }

    /// Horizontal concatenation `[A | B]`.
    pub fn hstack(&self, other: &BinaryMatrix) -> Result<BinaryMatrix> {
        if self.rows != other.rows {
            return Err(Error::Shape(format!(
                "hstack needs equal row counts, got {} and {}",
                self.rows, other.rows
            )));
        }
        let row_support = self
            .row_support
            .iter()
            .zip(&other.row_support)
            .map(|(a, b)| a.iter().copied().chain(b.iter().map(|c| c + self.cols)).collect())
            .collect();
        Ok(BinaryMatrix {
            rows: self.rows,
            cols: self.cols + other.cols,
            row_support,
        })
    }

    /// Kronecker product `A ⊗ B`.
    pub fn kron(&self, other: &BinaryMatrix) -> BinaryMatrix {
        let mut row_support = Vec::with_capacity(self.rows * other.rows);
        for a in &self.row_support {
            for b in &other.row_support {
                let mut row = Vec::with_capacity(a.len() * b.len());
                for &ca in a {
                    for &cb in b {
                        row.push(ca * other.cols + cb);
                    }
                }
                row_support.push(row);
            }
        }
        BinaryMatrix {
            rows: self.rows * other.rows,
            cols: self.cols * other.cols,
            row_support,
        }
    }

    pub fn to_dense(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.rows, self.cols);
        for (r, c) in self.entries() {
            m.set(r, c, true);
        }
        m
    }

    pub fn rank(&self) -> usize {
        self.to_dense().rank()
    }
}

/// Dense bit-packed binary matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        Self {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        if value {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] ^= 1 << (c % 64);
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (head, tail) = self.data.split_at_mut(hi * w);
        head[lo * w..(lo + 1) * w].swap_with_slice(&mut tail[..w]);
    }

    /// `row[dst] ^= row[src]`.
    pub fn xor_row_into(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let w = self.words;
        if src < dst {
            let (head, tail) = self.data.split_at_mut(dst * w);
            let s = &head[src * w..(src + 1) * w];
            for (d, s) in tail[..w].iter_mut().zip(s) {
                *d ^= s;
            }
        } else {
            let (head, tail) = self.data.split_at_mut(src * w);
            let d = &mut head[dst * w..(dst + 1) * w];
            for (d, s) in d.iter_mut().zip(&tail[..w]) {
                *d ^= s;
            }
        }
    }

    /// Reduces to reduced row echelon form, visiting columns in the given
    /// order. Returns `(pivot_column, row)` pairs: pivot `i` lives in row `i`.
    pub fn reduce_in_order(&mut self, column_order: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut rank = 0;
        for c in column_order {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&r| self.get(r, c)) else {
                continue;
            };
            self.swap_rows(rank, p);
            for r in 0..self.rows {
                if r != rank && self.get(r, c) {
                    self.xor_row_into(rank, r);
                }
            }
            pivots.push(c);
            rank += 1;
        }
        pivots
    }

    /// Reduced row echelon form with natural column order; returns pivots.
    pub fn rref(&mut self) -> Vec<usize> {
        self.reduce_in_order(0..self.cols)
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right kernel `{v : M v = 0}` as dense 0/1 vectors.
    pub fn kernel_basis(&self) -> Vec<Vec<u8>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u8; self.cols];
            v[free] = 1;
            for (row, &p) in pivots.iter().enumerate() {
                if m.get(row, free) {
                    v[p] = 1;
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// Incremental GF(2) span used to pick vectors independent of a subspace.
#[derive(Clone, Debug, Default)]
pub struct Span {
    cols: usize,
    basis: Vec<(usize, Vec<u64>)>,
}

impl Span {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            basis: Vec::new(),
        }
    }

    fn pack(&self, v: &[u8]) -> Vec<u64> {
        let mut w = vec![0u64; self.cols.div_ceil(64).max(1)];
        for (i, &b) in v.iter().enumerate() {
            if b & 1 == 1 {
                w[i / 64] |= 1 << (i % 64);
            }
        }
        w
    }

    fn reduce(&self, mut w: Vec<u64>) -> Vec<u64> {
        for (lead, b) in &self.basis {
            if (w[lead / 64] >> (lead % 64)) & 1 == 1 {
                for (x, y) in w.iter_mut().zip(b) {
                    *x ^= y;
                }
            }
        }
        w
    }

    /// Adds `v` if it is outside the span; returns whether it was added.
    pub fn insert(&mut self, v: &[u8]) -> bool {
        let w = self.reduce(self.pack(v));
        let Some(lead) = w
            .iter()
            .enumerate()
            .find(|(_, &x)| x != 0)
            .map(|(i, x)| i * 64 + x.trailing_zeros() as usize)
        else {
            return false;
        };
        // keep the basis fully reduced on leading bits
        for (_, b) in self.basis.iter_mut() {
            if (b[lead / 64] >> (lead % 64)) & 1 == 1 {
                for (x, y) in b.iter_mut().zip(&w) {
                    *x ^= y;
                }
            }
        }
        self.basis.push((lead, w));
        true
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        self.reduce(self.pack(v)).iter().all(|&x| x == 0)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Parity of the overlap of two dense 0/1 vectors.
pub fn dot(a: &[u8], b: &[u8]) -> u8 {
    a.iter().zip(b).fold(0, |acc, (x, y)| acc ^ (x & y & 1))
}
