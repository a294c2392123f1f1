//! CSS codes used as the outer code.

use crate::error::{Error, Result};
use crate::gf2::{dot, BinaryMatrix, Span};

/// A CSS code given by its X and Z check matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssCode {
    h_x: BinaryMatrix,
    h_z: BinaryMatrix,
    n: usize,
    k: usize,
    d: Option<usize>,
}

impl CssCode {
    pub fn h_x(&self) -> &BinaryMatrix {
        &self.h_x
    }

    pub fn h_z(&self) -> &BinaryMatrix {
        &self.h_z
    }

    /// Number of physical qubits.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of logical qubits, `n − rank(H_X) − rank(H_Z)`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Declared distance, if known. Never computed.
    pub fn d(&self) -> Option<usize> {
        self.d
    }

    pub fn with_distance(mut self, d: Option<usize>) -> Self {
        self.d = d;
        self
    }

    /// Representatives of the logical Z operators: a basis of
    /// `ker(H_X)` modulo the row space of `H_Z`.
    ///
    /// An X-type residual `t` with zero `H_Z` syndrome is a logical error iff
    /// it has odd overlap with one of these.
    pub fn logical_z_basis(&self) -> Vec<Vec<u8>> {
        let mut span = Span::new(self.n);
        for row in self.h_z.row_supports() {
            let mut v = vec![0u8; self.n];
            for &c in row {
                v[c] = 1;
            }
            span.insert(&v);
        }
        let mut logicals = Vec::with_capacity(self.k);
        for v in self.h_x.to_dense().kernel_basis() {
            if logicals.len() == self.k {
                break;
            }
            if span.insert(&v) {
                logicals.push(v);
            }
        }
        debug_assert_eq!(logicals.len(), self.k);
        logicals
    }

    /// True when the X-type error `e` commutes with every Z check and is not a
    /// stabilizer, i.e. it acts as a nontrivial logical operator.
    pub fn is_logical_x(&self, e: &[u8], logical_z: &[Vec<u8>]) -> bool {
        self.h_z.mul_vec(e).iter().all(|&b| b == 0) && logical_z.iter().any(|z| dot(z, e) == 1)
    }
}

/// Checks `H_X H_Zᵀ = 0` and computes `k`.
pub fn validate_css(h_x: BinaryMatrix, h_z: BinaryMatrix) -> Result<CssCode> {
    if h_x.cols() != h_z.cols() {
        return Err(Error::Shape(format!(
            "H_X has {} columns but H_Z has {}",
            h_x.cols(),
            h_z.cols()
        )));
    }
    let n = h_x.cols();
    let mut mark = vec![0u8; n];
    for (x_row, xs) in h_x.row_supports().iter().enumerate() {
        for &c in xs {
            mark[c] = 1;
        }
        for (z_row, zs) in h_z.row_supports().iter().enumerate() {
            let parity = zs.iter().fold(0u8, |acc, &c| acc ^ mark[c]);
            if parity == 1 {
                return Err(Error::Commutation { x_row, z_row });
            }
        }
        for &c in xs {
            mark[c] = 0;
        }
    }
    let k = n - h_x.rank() - h_z.rank();
    Ok(CssCode {
        h_x,
        h_z,
        n,
        k,
        d: None,
    })
}

/// Parity checks `x_i + x_{i+1}` of the length-`n` repetition code.
pub fn repetition_checks(n: usize) -> BinaryMatrix {
    let rows = (0..n.saturating_sub(1)).map(|i| vec![i, i + 1]).collect();
    BinaryMatrix::from_rows(n, rows).expect("repetition checks are well formed")
}

/// Bit-flip repetition code: Z checks only.
pub fn repetition_code(n: usize) -> CssCode {
    let h_z = repetition_checks(n);
    validate_css(BinaryMatrix::zeros(0, n), h_z)
        .expect("repetition code is CSS")
        .with_distance(Some(n))
}

/// Checks of the [7,4,3] Hamming code.
pub fn hamming7_checks() -> BinaryMatrix {
    BinaryMatrix::from_dense(&[
        vec![1, 0, 1, 0, 1, 0, 1],
        vec![0, 1, 1, 0, 0, 1, 1],
        vec![0, 0, 0, 1, 1, 1, 1],
    ])
    .expect("static matrix")
}

/// The [[7,1,3]] Steane code.
pub fn steane_code() -> CssCode {
    validate_css(hamming7_checks(), hamming7_checks())
        .expect("Steane code is CSS")
        .with_distance(Some(3))
}

/// Hypergraph product of two classical check matrices:
/// `H_X = [H₁ ⊗ I | I ⊗ H₂ᵀ]`, `H_Z = [I ⊗ H₂ | H₁ᵀ ⊗ I]`.
pub fn hypergraph_product(h1: &BinaryMatrix, h2: &BinaryMatrix) -> Result<CssCode> {
    if h1.is_zero() || h2.is_zero() {
        return Err(Error::Shape("hypergraph product needs nonzero matrices".into()));
    }
    let (m1, n1) = (h1.rows(), h1.cols());
    let (m2, n2) = (h2.rows(), h2.cols());
    let h_x = h1
        .kron(&BinaryMatrix::identity(n2))
        .hstack(&BinaryMatrix::identity(m1).kron(&h2.transpose()))?;
    let h_z = BinaryMatrix::identity(n1)
        .kron(h2)
        .hstack(&h1.transpose().kron(&BinaryMatrix::identity(m2)))?;
    validate_css(h_x, h_z)
}

/// Matrix over the group algebra `F₂[Z_ℓ]`: each entry is the list of cyclic
/// shift exponents of its monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingMatrix {
    rows: usize,
    cols: usize,
    lift_size: usize,
    entries: Vec<Vec<usize>>,
}

impl RingMatrix {
    pub fn new(lift_size: usize, entries: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if lift_size == 0 {
            return Err(Error::Config("lift size must be positive".into()));
        }
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(rows * cols);
        for (r, row) in entries.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Shape(format!("base row {r} has {} entries, expected {cols}", row.len())));
            }
            for mut shifts in row {
                if let Some(&exponent) = shifts.iter().find(|&&e| e >= lift_size) {
                    return Err(Error::ExponentOutOfRange {
                        exponent,
                        lift_size,
                    });
                }
                shifts.sort_unstable();
                flat.push(cancel_pairs(shifts));
            }
        }
        Ok(Self {
            rows,
            cols,
            lift_size,
            entries: flat,
        })
    }

    /// Single-monomial entries; `None` marks a zero entry.
    pub fn from_exponents(lift_size: usize, exps: &[Vec<Option<usize>>]) -> Result<Self> {
        Self::new(
            lift_size,
            exps.iter()
                .map(|row| row.iter().map(|e| e.iter().copied().collect()).collect())
                .collect(),
        )
    }

    fn identity(size: usize, lift_size: usize) -> Self {
        let mut entries = vec![Vec::new(); size * size];
        for i in 0..size {
            entries[i * size + i] = vec![0];
        }
        Self {
            rows: size,
            cols: size,
            lift_size,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> &[usize] {
        &self.entries[r * self.cols + c]
    }

    /// Transpose with exponents negated; lifts to the binary transpose.
    pub fn conjugate_transpose(&self) -> Self {
        let l = self.lift_size;
        let mut entries = vec![Vec::new(); self.rows * self.cols];
        for r in 0..self.rows {
            for c in 0..self.cols {
                let mut e: Vec<usize> = self.entry(r, c).iter().map(|&s| (l - s) % l).collect();
                e.sort_unstable();
                entries[c * self.rows + r] = e;
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            lift_size: l,
            entries,
        }
    }

    fn kron(&self, other: &RingMatrix) -> Self {
        let l = self.lift_size;
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut entries = vec![Vec::new(); rows * cols];
        for a in 0..self.rows {
            for b in 0..self.cols {
                let x = self.entry(a, b);
                if x.is_empty() {
                    continue;
                }
                for c in 0..other.rows {
                    for d in 0..other.cols {
                        let y = other.entry(c, d);
                        let mut prod: Vec<usize> =
                            x.iter().flat_map(|&s| y.iter().map(move |&t| (s + t) % l)).collect();
                        prod.sort_unstable();
                        entries[(a * other.rows + c) * cols + b * other.cols + d] = cancel_pairs(prod);
                    }
                }
            }
        }
        Self {
            rows,
            cols,
            lift_size: l,
            entries,
        }
    }

    fn hstack(&self, other: &RingMatrix) -> Self {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut entries = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            entries.extend_from_slice(&self.entries[r * self.cols..(r + 1) * self.cols]);
            entries.extend_from_slice(&other.entries[r * other.cols..(r + 1) * other.cols]);
        }
        Self {
            rows: self.rows,
            cols,
            lift_size: self.lift_size,
            entries,
        }
    }

    /// Replaces every entry by its `ℓ × ℓ` sum of circulant permutations;
    /// monomial `x^s` maps row `i` to column `i + s mod ℓ`.
    pub fn lift(&self) -> BinaryMatrix {
        let l = self.lift_size;
        let mut rows = vec![Vec::new(); self.rows * l];
        for r in 0..self.rows {
            for c in 0..self.cols {
                for &s in self.entry(r, c) {
                    for i in 0..l {
                        rows[r * l + i].push(c * l + (i + s) % l);
                    }
                }
            }
        }
        BinaryMatrix::from_rows(self.cols * l, rows).expect("lifted entries are distinct")
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Vec::is_empty)
    }
}

/// Removes repeated exponents in pairs (x^s + x^s = 0 over F₂).
fn cancel_pairs(sorted: Vec<usize>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(sorted.len());
    for s in sorted {
        if out.last() == Some(&s) {
            out.pop();
        } else {
            out.push(s);
        }
    }
    out
}

/// Lifted product of two base matrices over `F₂[Z_ℓ]`, with the
/// hypergraph-product block layout evaluated in the ring before lifting.
pub fn lifted_product(base1: &RingMatrix, base2: &RingMatrix) -> Result<CssCode> {
    if base1.lift_size != base2.lift_size {
        return Err(Error::Shape("base matrices use different lift sizes".into()));
    }
    if base1.is_zero() || base2.is_zero() {
        return Err(Error::Shape("lifted product needs nonzero base matrices".into()));
    }
    let l = base1.lift_size;
    let (m1, n1) = (base1.rows, base1.cols);
    let (m2, n2) = (base2.rows, base2.cols);
    let h_x = base1
        .kron(&RingMatrix::identity(n2, l))
        .hstack(&RingMatrix::identity(m1, l).kron(&base2.conjugate_transpose()));
    let h_z = RingMatrix::identity(n1, l)
        .kron(base2)
        .hstack(&base1.conjugate_transpose().kron(&RingMatrix::identity(m2, l)));
    validate_css(h_x.lift(), h_z.lift())
}

/// Bivariate bicycle code over `Z_l × Z_m` with `A`, `B` given as lists of
/// monomials `(x power, y power)`: `H_X = [A | B]`, `H_Z = [Bᵀ | Aᵀ]`.
pub fn bivariate_bicycle(l: usize, m: usize, a: &[(usize, usize)], b: &[(usize, usize)]) -> Result<CssCode> {
    let size = l * m;
    let poly = |terms: &[(usize, usize)]| -> Result<BinaryMatrix> {
        let mut rows = vec![Vec::new(); size];
        for &(px, py) in terms {
            if px >= l || py >= m {
                return Err(Error::Config(format!("monomial x^{px} y^{py} outside Z_{l} x Z_{m}")));
            }
            for i in 0..l {
                for j in 0..m {
                    rows[i * m + j].push(((i + px) % l) * m + (j + py) % m);
                }
            }
        }
        BinaryMatrix::from_rows(size, rows)
    };
    let am = poly(a)?;
    let bm = poly(b)?;
    let h_x = am.hstack(&bm)?;
    let h_z = bm.transpose().hstack(&am.transpose())?;
    validate_css(h_x, h_z)
}

/// The [[144,12,12]] gross code: `A = x³ + y + y²`, `B = y³ + x + x²`.
pub fn gross_code() -> CssCode {
    bivariate_bicycle(12, 6, &[(3, 0), (0, 1), (0, 2)], &[(0, 3), (1, 0), (2, 0)])
        .expect("gross code parameters are valid")
        .with_distance(Some(12))
}

/// Exponent matrix of the (3,5) quasi-cyclic LDPC base with lift 31.
pub const QC_3X5_EXPONENTS: [[usize; 5]; 3] = [[1, 2, 4, 8, 16], [5, 10, 20, 9, 18], [25, 19, 7, 14, 28]];

/// The [[1054,140,20]] lifted-product code built from two copies of the
/// (3,5) quasi-cyclic base lifted by 31.
pub fn lp1054_code() -> CssCode {
    let base = RingMatrix::new(
        31,
        QC_3X5_EXPONENTS
            .iter()
            .map(|row| row.iter().map(|&e| vec![e]).collect())
            .collect(),
    )
    .expect("static base");
    lifted_product(&base, &base)
        .expect("lifted product is CSS")
        .with_distance(Some(20))
}
