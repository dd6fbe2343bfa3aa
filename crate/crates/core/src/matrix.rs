//! Exact integer matrix kernel: semi-tensor product, Kronecker and
//! Khatri-Rao products, logical-matrix algebra and power-reducing matrices.
//!
//! Everything here is exact. Dense matrices are generic over an integer
//! scalar with checked arithmetic; overflow is reported as an error, never
//! wrapped. Logical matrices (every column a column of an identity matrix)
//! are kept in compressed form as one delta index per column, so a network
//! transition matrix with 2^n states costs 2^n words instead of 4^n.

use std::fmt;

use num_traits::{CheckedAdd, CheckedMul, One, Zero};

use crate::error::MatrixError;

/// Scalar entries for the dense kernel. Implemented by the primitive signed
/// and unsigned integers via num-traits; arithmetic is always checked.
pub trait Scalar: Zero + One + CheckedAdd + CheckedMul + Copy + PartialEq + fmt::Debug {}

impl<T> Scalar for T where T: Zero + One + CheckedAdd + CheckedMul + Copy + PartialEq + fmt::Debug {}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm(a: usize, b: usize) -> Result<usize, MatrixError> {
    (a / gcd(a, b)).checked_mul(b).ok_or(MatrixError::Overflow)
}

fn checked_dim(a: usize, b: usize) -> Result<usize, MatrixError> {
    a.checked_mul(b).ok_or(MatrixError::Overflow)
}

/// Dense matrix with exact entries, stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::ZeroDimension);
        }
        if data.len() != rows * cols {
            return Err(MatrixError::EntryCount { rows, cols, got: data.len() });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(MatrixError::Dimension("ragged row lengths".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::ZeroDimension);
        }
        Ok(DenseMatrix { rows, cols, data: vec![T::zero(); rows * cols] })
    }

    pub fn identity(n: usize) -> Result<Self, MatrixError> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Zero-based element access.
    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    /// Ordinary matrix product with overflow checking.
    pub fn matmul(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::Dimension(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols)?;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a.checked_mul(&other.get(k, j)).ok_or(MatrixError::Overflow)?;
                    let cell = &mut out.data[i * other.cols + j];
                    *cell = cell.checked_add(&prod).ok_or(MatrixError::Overflow)?;
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product A ⊗ B.
    pub fn kron(&self, other: &Self) -> Result<Self, MatrixError> {
        let rows = checked_dim(self.rows, other.rows)?;
        let cols = checked_dim(self.cols, other.cols)?;
        let mut out = Self::zeros(rows, cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == T::zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let v = a.checked_mul(&other.get(k, l)).ok_or(MatrixError::Overflow)?;
                        out.data[(i * other.rows + k) * cols + (j * other.cols + l)] = v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Semi-tensor product A ⋉ B = (A ⊗ I_{t/n})(B ⊗ I_{t/p}) with
    /// t = lcm(cols(A), rows(B)). Degenerates to the ordinary product when
    /// cols(A) = rows(B).
    pub fn stp(&self, other: &Self) -> Result<Self, MatrixError> {
        let t = lcm(self.cols, other.rows)?;
        if t == self.cols && t == other.rows {
            return self.matmul(other);
        }
        let left = self.kron(&Self::identity(t / self.cols)?)?;
        let right = other.kron(&Self::identity(t / other.rows)?)?;
        left.matmul(&right)
    }
}

impl<T: Scalar> fmt::Debug for DenseMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{:?} ", self.get(r, c))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Dense 0/1 matrix used for truth matrices and entrywise comparisons.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolMatrix {
    rows: usize,
    cols: usize,
    data: Vec<bool>,
}

impl BoolMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::ZeroDimension);
        }
        Ok(BoolMatrix { rows, cols, data: vec![false; rows * cols] })
    }

    pub fn from_rows(rows: Vec<Vec<u8>>) -> Result<Self, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(MatrixError::ZeroDimension);
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(MatrixError::Dimension("ragged row lengths".into()));
        }
        let data = rows.into_iter().flatten().map(|v| v != 0).collect();
        Ok(BoolMatrix { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.data[r * self.cols + c] = v;
    }

    /// Rows as 0/1 integers, the JSON export form.
    pub fn to_rows_u8(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| (0..self.cols).map(|c| u8::from(self.get(r, c))).collect()).collect()
    }
}

/// Entrywise a ≤ b for 0/1 matrices of equal shape.
pub fn bool_leq(a: &BoolMatrix, b: &BoolMatrix) -> Result<bool, MatrixError> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(MatrixError::Dimension(format!(
            "{}x{} vs {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(a.data.iter().zip(&b.data).all(|(&x, &y)| !x || y))
}

/// A column of an identity matrix: δ_dim^index with 1-based index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeltaVector {
    pub dim: usize,
    pub index: usize,
}

impl DeltaVector {
    pub fn new(dim: usize, index: usize) -> Result<Self, MatrixError> {
        if dim == 0 {
            return Err(MatrixError::ZeroDimension);
        }
        if index == 0 || index > dim {
            return Err(MatrixError::ColumnIndex { index, rows: dim });
        }
        Ok(DeltaVector { dim, index })
    }

    /// δ_p^i ⋉ δ_q^j = δ_{pq}^{(i−1)q+j}.
    pub fn stp(&self, other: &DeltaVector) -> Result<DeltaVector, MatrixError> {
        let dim = checked_dim(self.dim, other.dim)?;
        DeltaVector::new(dim, (self.index - 1) * other.dim + other.index)
    }

    pub fn to_logical(self) -> LogicalMatrix {
        LogicalMatrix { rows: self.dim, cols: vec![self.index] }
    }

    pub fn to_dense<T: Scalar>(self) -> DenseMatrix<T> {
        self.to_logical().to_dense()
    }
}

/// Logical matrix in compressed form: `rows` and one 1-based delta index per
/// column, the δ_n[i_1,…,i_r] shorthand.
#[derive(Clone, PartialEq, Eq)]
pub struct LogicalMatrix {
    rows: usize,
    cols: Vec<usize>,
}

impl LogicalMatrix {
    pub fn new(rows: usize, cols: Vec<usize>) -> Result<Self, MatrixError> {
        if rows == 0 || cols.is_empty() {
            return Err(MatrixError::ZeroDimension);
        }
        for &i in &cols {
            if i == 0 || i > rows {
                return Err(MatrixError::ColumnIndex { index: i, rows });
            }
        }
        Ok(LogicalMatrix { rows, cols })
    }

    pub fn delta(dim: usize, index: usize) -> Result<Self, MatrixError> {
        Ok(DeltaVector::new(dim, index)?.to_logical())
    }

    pub fn identity(n: usize) -> Result<Self, MatrixError> {
        Self::new(n, (1..=n).collect())
    }

    /// Power-reducing matrix PR_k = diag(δ_k^1,…,δ_k^k): column i is
    /// δ_{k²}^{(i−1)k+i}, so x ⋉ x = PR_k x for every x ∈ Δ_k.
    pub fn power_reducing(k: usize) -> Result<Self, MatrixError> {
        let sq = checked_dim(k, k)?;
        Self::new(sq, (1..=k).map(|i| (i - 1) * k + i).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    /// Delta index of a column, both 1-based.
    pub fn col(&self, j: usize) -> usize {
        self.cols[j - 1]
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols.len()
    }

    /// Khatri-Rao product: column j of the result is Col_j(self) ⋉
    /// Col_j(other). In index form (i−1)·rows(other) + i'.
    pub fn khatri_rao(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.cols.len() != other.cols.len() {
            return Err(MatrixError::Dimension(format!(
                "khatri-rao column counts {} vs {}",
                self.cols.len(),
                other.cols.len()
            )));
        }
        let rows = checked_dim(self.rows, other.rows)?;
        let cols =
            self.cols.iter().zip(&other.cols).map(|(&a, &b)| (a - 1) * other.rows + b).collect();
        Self::new(rows, cols)
    }

    /// Product of logical matrices as index-map composition: column j of the
    /// result is column other[j] of self. Requires cols(self) = rows(other);
    /// agrees exactly with the dense product.
    pub fn compose(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.cols.len() != other.rows {
            return Err(MatrixError::Dimension(format!(
                "compose {}x{} with {}x{}",
                self.rows,
                self.cols.len(),
                other.rows,
                other.cols.len()
            )));
        }
        let cols = other.cols.iter().map(|&j| self.cols[j - 1]).collect();
        Self::new(self.rows, cols)
    }

    /// self ⊗ I_k, still logical.
    pub fn kron_identity(&self, k: usize) -> Result<Self, MatrixError> {
        if k == 0 {
            return Err(MatrixError::ZeroDimension);
        }
        let rows = checked_dim(self.rows, k)?;
        let mut cols = Vec::with_capacity(self.cols.len() * k);
        for &i in &self.cols {
            for r in 0..k {
                cols.push((i - 1) * k + r + 1);
            }
        }
        Self::new(rows, cols)
    }

    /// Semi-tensor product of logical matrices, computed in compressed form
    /// as (self ⊗ I_{t/n}) ∘ (other ⊗ I_{t/p}).
    pub fn stp(&self, other: &Self) -> Result<Self, MatrixError> {
        let n = self.cols.len();
        let p = other.rows;
        let t = lcm(n, p)?;
        let left = self.kron_identity(t / n)?;
        let right = other.kron_identity(t / p)?;
        left.compose(&right)
    }

    /// Iterated self-composition of a square logical matrix.
    pub fn pow(&self, e: usize) -> Result<Self, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::Dimension(format!(
                "pow of non-square {}x{}",
                self.rows,
                self.cols.len()
            )));
        }
        let mut acc = Self::identity(self.rows)?;
        for _ in 0..e {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    pub fn to_dense<T: Scalar>(&self) -> DenseMatrix<T> {
        let mut m = DenseMatrix::zeros(self.rows, self.cols.len()).expect("valid dims");
        for (j, &i) in self.cols.iter().enumerate() {
            m.data[(i - 1) * self.cols.len() + j] = T::one();
        }
        m
    }

    pub fn to_bool(&self) -> BoolMatrix {
        let mut m = BoolMatrix::zeros(self.rows, self.cols.len()).expect("valid dims");
        for (j, &i) in self.cols.iter().enumerate() {
            m.set(i - 1, j, true);
        }
        m
    }
}

impl fmt::Debug for LogicalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "delta_{}{:?}", self.rows, self.cols)
    }
}
