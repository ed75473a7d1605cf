//! Exact Boolean/logical linear algebra.
//!
//! Key types: [`CanonicalVector`] (δ_K^i), [`LogicalMatrix`] (every column a
//! canonical vector), [`BooleanMatrix`] (0-1 entries under the OR/AND
//! semiring, rows packed into bit words), [`IntMatrix`] (dense integers, used
//! for the general semi-tensor product and as a cross-check oracle) and
//! [`Digraph`] (the graph view of a square Boolean matrix).
//!
//! Key operations: the (left) semi-tensor product [`stp`]/[`stp_logical`],
//! the column-wise Kronecker product [`khatri_rao`], [`boolean_product`],
//! [`hadamard`], the power-reducing matrix [`power_reducing_matrix`] and the
//! irreducibility test [`is_irreducible`].
//!
//! Everything is integer-exact; there is no floating point anywhere. All
//! public indices are 1-based, matching the usual δ_K^i notation, so results
//! can be compared against hand calculations without translation.

use crate::error::{Error, Result};
use std::fmt;

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// The `dim`-dimensional canonical vector δ_dim^index: the 0-1 column with a
/// single 1 in row `index` (1-based).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct CanonicalVector {
    dim: usize,
    index: usize,
}

impl CanonicalVector {
    pub fn new(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        if index == 0 || index > dim {
            return Err(Error::IndexOutOfRange {
                what: "canonical vector",
                index,
                bound: dim,
            });
        }
        Ok(Self { dim, index })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// 1-based position of the unit entry.
    pub fn index(&self) -> usize {
        self.index
    }

    /// Semi-tensor product of canonical vectors:
    /// δ_M^i ⋉ δ_N^j = δ_{MN}^{(i−1)N+j}.
    pub fn stp(&self, other: &CanonicalVector) -> CanonicalVector {
        CanonicalVector {
            dim: self.dim * other.dim,
            index: (self.index - 1) * other.dim + other.index,
        }
    }
}

impl fmt::Display for CanonicalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "δ_{}^{}", self.dim, self.index)
    }
}

/// A k×q logical matrix: every column is a canonical vector of dimension k.
///
/// Stored as one 1-based row index per column, which makes column lookup —
/// the dominant operation everywhere in this crate — O(1).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LogicalMatrix {
    rows: usize,
    columns: Vec<usize>,
}

impl LogicalMatrix {
    /// `columns[k]` is the 1-based unit-row of column k+1.
    pub fn new(rows: usize, columns: Vec<usize>) -> Result<Self> {
        if rows == 0 {
            return Err(Error::EmptyMatrix);
        }
        for &c in &columns {
            if c == 0 || c > rows {
                return Err(Error::IndexOutOfRange {
                    what: "logical matrix column",
                    index: c,
                    bound: rows,
                });
            }
        }
        Ok(Self { rows, columns })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "identity needs a positive dimension");
        Self {
            rows: n,
            columns: (1..=n).collect(),
        }
    }

    pub fn from_columns(rows: usize, cols: &[CanonicalVector]) -> Result<Self> {
        for v in cols {
            if v.dim() != rows {
                return Err(Error::DimensionMismatch {
                    context: "logical matrix from columns",
                    left_rows: rows,
                    left_cols: cols.len(),
                    right_rows: v.dim(),
                    right_cols: 1,
                });
            }
        }
        Self::new(rows, cols.iter().map(|v| v.index()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    /// Column `k` (1-based) as a canonical vector.
    pub fn col(&self, k: usize) -> Result<CanonicalVector> {
        let idx = self.col_index(k)?;
        CanonicalVector::new(self.rows, idx)
    }

    /// 1-based unit-row of column `k` (1-based).
    pub fn col_index(&self, k: usize) -> Result<usize> {
        if k == 0 || k > self.columns.len() {
            return Err(Error::IndexOutOfRange {
                what: "column",
                index: k,
                bound: self.columns.len(),
            });
        }
        Ok(self.columns[k - 1])
    }

    /// The unit-rows of all columns, in column order (1-based values).
    pub fn column_indices(&self) -> &[usize] {
        &self.columns
    }

    /// Ordinary matrix product — for logical matrices this is composition:
    /// column j of `self · rhs` is column `rhs_j` of `self`.
    pub fn mul(&self, rhs: &LogicalMatrix) -> Result<LogicalMatrix> {
        if self.cols() != rhs.rows() {
            return Err(Error::DimensionMismatch {
                context: "logical product",
                left_rows: self.rows,
                left_cols: self.cols(),
                right_rows: rhs.rows(),
                right_cols: rhs.cols(),
            });
        }
        Ok(LogicalMatrix {
            rows: self.rows,
            columns: rhs.columns.iter().map(|&j| self.columns[j - 1]).collect(),
        })
    }

    /// `self · v` for a canonical vector: plain column selection.
    pub fn mul_vector(&self, v: &CanonicalVector) -> Result<CanonicalVector> {
        if self.cols() != v.dim() {
            return Err(Error::DimensionMismatch {
                context: "logical matrix by vector",
                left_rows: self.rows,
                left_cols: self.cols(),
                right_rows: v.dim(),
                right_cols: 1,
            });
        }
        CanonicalVector::new(self.rows, self.columns[v.index() - 1])
    }

    /// Kronecker product; the result is again logical.
    pub fn kron(&self, rhs: &LogicalMatrix) -> LogicalMatrix {
        let rows = self.rows * rhs.rows;
        let mut columns = Vec::with_capacity(self.cols() * rhs.cols());
        for &a in &self.columns {
            for &b in &rhs.columns {
                columns.push((a - 1) * rhs.rows + b);
            }
        }
        LogicalMatrix { rows, columns }
    }

    /// Semi-tensor product with another logical matrix; see [`stp_logical`].
    pub fn stp(&self, rhs: &LogicalMatrix) -> Result<LogicalMatrix> {
        stp_logical(self, rhs)
    }

    pub fn to_boolean(&self) -> BooleanMatrix {
        let mut b = BooleanMatrix::zeros(self.rows, self.columns.len());
        for (k, &r) in self.columns.iter().enumerate() {
            b.set(r, k + 1, true);
        }
        b
    }
}

/// A 0-1 matrix over the Boolean (OR, AND) semiring.
///
/// Rows are packed into 64-bit words, so OR/AND of rows and the Boolean
/// product run word-parallel. Padding bits past the last column are kept at
/// zero, which lets `PartialEq` be plain word comparison.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BooleanMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BooleanMatrix {
    /// All-zero matrix. `rows` must be positive; `cols` may be zero (the
    /// empty column list is a legitimate degenerate operand).
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1, "Boolean matrix needs a positive row count");
        let words_per_row = cols.div_ceil(64);
        Self {
            rows,
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 1..=n {
            m.set(i, i, true);
        }
        m
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 1..=rows {
            for j in 1..=cols {
                m.set(i, j, true);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn check_pos(&self, i: usize, j: usize) {
        assert!(
            i >= 1 && i <= self.rows && j >= 1 && j <= self.cols,
            "entry ({i},{j}) out of range for a {}x{} matrix",
            self.rows,
            self.cols
        );
    }

    /// Entry (i, j), 1-based.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.check_pos(i, j);
        let (r, c) = (i - 1, j - 1);
        (self.bits[r * self.words_per_row + c / 64] >> (c % 64)) & 1 == 1
    }

    /// Set entry (i, j), 1-based.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.check_pos(i, j);
        let (r, c) = (i - 1, j - 1);
        let word = &mut self.bits[r * self.words_per_row + c / 64];
        if value {
            *word |= 1 << (c % 64);
        } else {
            *word &= !(1 << (c % 64));
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    fn same_shape(&self, rhs: &BooleanMatrix, context: &'static str) -> Result<()> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                context,
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        Ok(())
    }

    /// Entrywise OR.
    pub fn or(&self, rhs: &BooleanMatrix) -> Result<BooleanMatrix> {
        let mut out = self.clone();
        out.or_assign(rhs)?;
        Ok(out)
    }

    pub fn or_assign(&mut self, rhs: &BooleanMatrix) -> Result<()> {
        self.same_shape(rhs, "entrywise OR")?;
        for (w, r) in self.bits.iter_mut().zip(&rhs.bits) {
            *w |= r;
        }
        Ok(())
    }

    pub fn transpose(&self) -> BooleanMatrix {
        // A matrix with zero columns would transpose to one with zero rows,
        // which this representation cannot hold; callers never need it.
        assert!(self.cols >= 1, "cannot transpose a matrix with zero columns");
        let mut t = BooleanMatrix::zeros(self.cols, self.rows);
        for i in 1..=self.rows {
            for j in self.ones_in_row(i) {
                t.set(j, i, true);
            }
        }
        t
    }

    /// 1-based column positions of the ones in row `i`.
    pub fn ones_in_row(&self, i: usize) -> Vec<usize> {
        assert!(i >= 1 && i <= self.rows);
        let mut out = Vec::new();
        for (w, &word) in self.row_words(i - 1).iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let bit = word.trailing_zeros() as usize;
                out.push(w * 64 + bit + 1);
                word &= word - 1;
            }
        }
        out
    }

    /// 1-based row positions of the ones in column `j`.
    pub fn ones_in_col(&self, j: usize) -> Vec<usize> {
        assert!(j >= 1 && j <= self.cols);
        (1..=self.rows).filter(|&i| self.get(i, j)).collect()
    }

    pub fn row_has_any(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.rows);
        self.row_words(i - 1).iter().any(|&w| w != 0)
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_all_ones(&self) -> bool {
        if self.cols == 0 {
            return true;
        }
        let full_words = self.cols / 64;
        let tail_mask = if self.cols.is_multiple_of(64) {
            0
        } else {
            (1u64 << (self.cols % 64)) - 1
        };
        for r in 0..self.rows {
            let row = self.row_words(r);
            if row[..full_words].iter().any(|&w| w != !0u64) {
                return false;
            }
            if tail_mask != 0 && row[full_words] != tail_mask {
                return false;
            }
        }
        true
    }

    /// Reinterpret as a logical matrix; fails unless every column has
    /// exactly one 1.
    pub fn try_to_logical(&self) -> Result<LogicalMatrix> {
        let mut columns = vec![0usize; self.cols];
        let mut ones = vec![0usize; self.cols];
        for i in 1..=self.rows {
            for j in self.ones_in_row(i) {
                ones[j - 1] += 1;
                columns[j - 1] = i;
            }
        }
        for (j, &count) in ones.iter().enumerate() {
            if count != 1 {
                return Err(Error::NotLogical {
                    col: j + 1,
                    ones: count,
                });
            }
        }
        LogicalMatrix::new(self.rows, columns)
    }
}

/// A dense integer matrix, used for the general semi-tensor product and as an
/// exact oracle for the Boolean operations (no floating point).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1, "integer matrix needs a positive row count");
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 1..=n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[&[i64]]) -> Self {
        assert!(!rows.is_empty() && !rows[0].is_empty());
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols));
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn from_logical(m: &LogicalMatrix) -> Self {
        let mut out = Self::zeros(m.rows(), m.cols());
        for (k, &r) in m.column_indices().iter().enumerate() {
            out.set(r, k + 1, 1);
        }
        out
    }

    pub fn from_boolean(m: &BooleanMatrix) -> Self {
        let mut out = Self::zeros(m.rows(), m.cols());
        for i in 1..=m.rows() {
            for j in m.ones_in_row(i) {
                out.set(i, j, 1);
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry (i, j), 1-based.
    pub fn get(&self, i: usize, j: usize) -> i64 {
        assert!(i >= 1 && i <= self.rows && j >= 1 && j <= self.cols);
        self.data[(i - 1) * self.cols + (j - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: i64) {
        assert!(i >= 1 && i <= self.rows && j >= 1 && j <= self.cols);
        self.data[(i - 1) * self.cols + (j - 1)] = value;
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                context: "integer product",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn kron(&self, rhs: &IntMatrix) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for ia in 1..=self.rows {
            for ja in 1..=self.cols {
                let a = self.get(ia, ja);
                if a == 0 {
                    continue;
                }
                for ib in 1..=rhs.rows {
                    for jb in 1..=rhs.cols {
                        out.set(
                            (ia - 1) * rhs.rows + ib,
                            (ja - 1) * rhs.cols + jb,
                            a * rhs.get(ib, jb),
                        );
                    }
                }
            }
        }
        out
    }

    /// Entrywise sign as a Boolean matrix (entries must be non-negative).
    pub fn sign_to_boolean(&self) -> BooleanMatrix {
        let mut out = BooleanMatrix::zeros(self.rows, self.cols);
        for i in 1..=self.rows {
            for j in 1..=self.cols {
                let v = self.get(i, j);
                assert!(v >= 0, "sign_to_boolean expects non-negative entries");
                if v > 0 {
                    out.set(i, j, true);
                }
            }
        }
        out
    }
}

/// (Left) semi-tensor product A ⋉ B ≜ (A ⊗ I_{l/n})(B ⊗ I_{l/p}) with
/// l = lcm(n, p), for an m×n and a p×q integer matrix. Coincides with the
/// ordinary product when n = p.
pub fn stp(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    if a.cols == 0 || b.cols == 0 {
        return Err(Error::EmptyMatrix);
    }
    let l = lcm(a.cols, b.rows);
    let left = a.kron(&IntMatrix::identity(l / a.cols));
    let right = b.kron(&IntMatrix::identity(l / b.rows));
    left.mul(&right)
}

/// Semi-tensor product of logical matrices; logical matrices are closed
/// under ⋉, so the result is logical and is computed without densification.
pub fn stp_logical(a: &LogicalMatrix, b: &LogicalMatrix) -> Result<LogicalMatrix> {
    if a.cols() == 0 || b.cols() == 0 {
        return Err(Error::EmptyMatrix);
    }
    let l = lcm(a.cols(), b.rows());
    let left = a.kron(&LogicalMatrix::identity(l / a.cols()));
    let right = b.kron(&LogicalMatrix::identity(l / b.rows()));
    left.mul(&right)
}

/// Column-wise Kronecker (Khatri-Rao) product: column j of the result is
/// col_j(a) ⊗ col_j(b). Logical inputs yield a logical output.
pub fn khatri_rao(a: &BooleanMatrix, b: &BooleanMatrix) -> Result<BooleanMatrix> {
    if a.cols() != b.cols() {
        return Err(Error::DimensionMismatch {
            context: "Khatri-Rao product",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    let mut out = BooleanMatrix::zeros(a.rows() * b.rows(), a.cols());
    for j in 1..=a.cols() {
        for ia in a.ones_in_col(j) {
            for ib in b.ones_in_col(j) {
                out.set((ia - 1) * b.rows() + ib, j, true);
            }
        }
    }
    Ok(out)
}

/// [`khatri_rao`] specialised to logical matrices: column j is
/// δ_{mp}^{(i−1)p+r} for column pair (δ_m^i, δ_p^r).
pub fn khatri_rao_logical(a: &LogicalMatrix, b: &LogicalMatrix) -> Result<LogicalMatrix> {
    if a.cols() != b.cols() {
        return Err(Error::DimensionMismatch {
            context: "Khatri-Rao product",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    let rows = a.rows() * b.rows();
    let columns = a
        .column_indices()
        .iter()
        .zip(b.column_indices())
        .map(|(&i, &r)| (i - 1) * b.rows() + r)
        .collect();
    LogicalMatrix::new(rows, columns)
}

/// Boolean matrix product: the ordinary product with (+, ·) replaced by
/// (OR, AND).
pub fn boolean_product(a: &BooleanMatrix, b: &BooleanMatrix) -> Result<BooleanMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch {
            context: "Boolean product",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    let mut out = BooleanMatrix::zeros(a.rows(), b.cols());
    let wpr = out.words_per_row;
    for i in 0..a.rows() {
        for k in a.ones_in_row(i + 1) {
            let (dst_start, src_start) = (i * wpr, (k - 1) * b.words_per_row);
            for w in 0..wpr {
                out.bits[dst_start + w] |= b.bits[src_start + w];
            }
        }
    }
    Ok(out)
}

/// Entrywise (Hadamard) product, i.e. entrywise AND.
pub fn hadamard(a: &BooleanMatrix, b: &BooleanMatrix) -> Result<BooleanMatrix> {
    a.same_shape(b, "Hadamard product")?;
    let mut out = a.clone();
    for (w, r) in out.bits.iter_mut().zip(&b.bits) {
        *w &= r;
    }
    Ok(out)
}

/// The n²×n power-reducing matrix Φ_n with Φ_n·v = v ⋉ v for every
/// canonical v; column j is δ_{n²}^{(j−1)n+j}.
pub fn power_reducing_matrix(n: usize) -> LogicalMatrix {
    assert!(n >= 1, "power-reducing matrix needs a positive dimension");
    LogicalMatrix {
        rows: n * n,
        columns: (1..=n).map(|j| (j - 1) * n + j).collect(),
    }
}

/// OR of the Boolean powers L^0 ∨ L^1 ∨ … ∨ L^{k−1} of a square k×k matrix.
/// Entry (i, j) is 1 iff the digraph of `l` has a path from j to i of length
/// at most k−1 (columns are sources, rows are targets).
pub fn reachability_matrix(l: &BooleanMatrix) -> Result<BooleanMatrix> {
    if l.rows() != l.cols() {
        return Err(Error::NotSquare {
            rows: l.rows(),
            cols: l.cols(),
        });
    }
    let n = l.rows();
    let mut acc = BooleanMatrix::identity(n);
    let mut power = BooleanMatrix::identity(n);
    for _ in 1..n {
        power = boolean_product(l, &power)?;
        acc.or_assign(&power)?;
    }
    Ok(acc)
}

/// True iff L^0 ∨ L ∨ … ∨ L^{k−1} is the all-ones matrix, equivalently iff
/// the digraph of `l` is strongly connected.
pub fn is_irreducible(l: &BooleanMatrix) -> Result<bool> {
    Ok(reachability_matrix(l)?.is_all_ones())
}

/// Directed-graph view of a square Boolean matrix: node j has an edge to
/// node i iff entry (i, j) is 1 (columns are sources, rows are targets).
#[derive(Clone, Debug)]
pub struct Digraph {
    nodes: usize,
    succ: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn from_boolean(m: &BooleanMatrix) -> Result<Digraph> {
        if m.rows() != m.cols() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let nodes = m.rows();
        let succ = (1..=nodes).map(|j| m.ones_in_col(j)).collect();
        Ok(Digraph { nodes, succ })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Successors of node `j` (1-based), in ascending order.
    pub fn successors(&self, j: usize) -> &[usize] {
        &self.succ[j - 1]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.succ[from - 1].binary_search(&to).is_ok()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (j, succ) in self.succ.iter().enumerate() {
            for &i in succ {
                out.push((j + 1, i));
            }
        }
        out
    }
}
