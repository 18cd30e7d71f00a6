//! Dense symmetric matrices, determinants and numerical tolerances.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Tolerance constants shared by every floating-point decision in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative factor for row sums, minor signs and identity residuals.
    pub relative: f64,
    /// Relative factor for eigenvalue thresholds (scaled by `max|a_ij| * n`).
    pub eigen: f64,
    /// Absolute cutoff below which computed entries are treated as zero.
    pub zero: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            relative: 1e-9,
            eigen: 1e-8,
            zero: 1e-12,
        }
    }
}

impl Tolerances {
    /// Threshold deciding the sign of a minor of the given submatrix:
    /// `relative` times its Hadamard bound.
    pub fn minor(&self, sub: &DMatrix<f64>) -> f64 {
        self.relative * hadamard_bound(sub)
    }

    pub fn row_sum(&self, m: &SymmetricMatrix) -> f64 {
        self.relative * m.dim() as f64 * m.max_abs()
    }

    pub fn eigenvalue(&self, m: &SymmetricMatrix) -> f64 {
        self.eigen * m.max_abs() * m.dim() as f64
    }
}

/// A dense real symmetric matrix. Symmetry is exact: constructors either
/// check it or build both triangles from the same value.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    data: DMatrix<f64>,
    zero_row_sum: bool,
}

impl SymmetricMatrix {
    /// Builds a matrix from rows, rejecting ragged, non-finite or
    /// non-symmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare { row: i, len: row.len(), n });
            }
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::NonFinite {
                        value: x,
                        context: format!("entry ({i}, {j})"),
                    });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::NotSymmetric { i, j });
                }
            }
        }
        Ok(Self::from_dmatrix_unchecked(DMatrix::from_fn(n, n, |i, j| rows[i][j])))
    }

    /// Builds a symmetric matrix from a function evaluated on the upper
    /// triangle (`i <= j`) only.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let x = f(i, j);
                data[(i, j)] = x;
                data[(j, i)] = x;
            }
        }
        Self::from_dmatrix_unchecked(data)
    }

    /// Wraps a `DMatrix`, symmetrizing by copying the upper triangle.
    pub fn from_dmatrix(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare { row: 0, len: m.ncols(), n: m.nrows() });
        }
        if m.nrows() == 0 {
            return Err(Error::EmptyMatrix);
        }
        Ok(Self::from_upper_fn(m.nrows(), |i, j| m[(i, j)]))
    }

    fn from_dmatrix_unchecked(data: DMatrix<f64>) -> Self {
        let mut m = SymmetricMatrix { data, zero_row_sum: false };
        let tol = Tolerances::default().row_sum(&m);
        m.zero_row_sum = m.row_sums().iter().all(|s| s.abs() <= tol);
        m
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_dmatrix_unchecked(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_dmatrix_unchecked(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| self.data.row(i).iter().copied().collect())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.data.row(i).sum()).collect()
    }

    /// Zero-row-sum flag, evaluated at construction with the default
    /// tolerance `1e-9 * n * max|a_ij|`.
    pub fn has_zero_row_sums(&self) -> bool {
        self.zero_row_sum
    }

    /// Re-evaluates the zero-row-sum property under custom tolerances.
    pub fn has_zero_row_sums_within(&self, tol: &Tolerances) -> bool {
        let t = tol.row_sum(self);
        self.row_sums().iter().all(|s| s.abs() <= t)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }

    /// Principal submatrix on the given (0-based) index set.
    pub fn principal_submatrix(&self, subset: &[usize]) -> DMatrix<f64> {
        let k = subset.len();
        DMatrix::from_fn(k, k, |a, b| self.data[(subset[a], subset[b])])
    }

    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let n = self.dim();
        assert_eq!(v.len(), n, "vector length must match matrix dimension");
        let mut acc = NeumaierSum::default();
        for i in 0..n {
            for j in 0..n {
                acc.add(v[i] * self.data[(i, j)] * v[j]);
            }
        }
        acc.total()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.data.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Eigenpairs sorted by ascending eigenvalue; eigenvectors are unit length.
    pub fn eigenpairs(&self) -> Vec<(f64, Vec<f64>)> {
        let eig = SymmetricEigen::new(self.data.clone());
        let mut pairs: Vec<(f64, Vec<f64>)> = (0..self.dim())
            .map(|k| (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect()))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    }

    /// Number of eigenvalues with magnitude above the eigenvalue tolerance.
    pub fn rank_estimate(&self, tol: &Tolerances) -> usize {
        let t = tol.eigenvalue(self);
        self.eigenvalues().iter().filter(|l| l.abs() > t).count()
    }
}

impl std::ops::Neg for &SymmetricMatrix {
    type Output = SymmetricMatrix;

    fn neg(self) -> SymmetricMatrix {
        SymmetricMatrix {
            data: -self.data.clone(),
            zero_row_sum: self.zero_row_sum,
        }
    }
}

/// Determinant of a square matrix. The empty matrix has determinant 1.
///
/// Integer-valued matrices are evaluated exactly with fraction-free
/// elimination in `i128`, so singular integer minors come out as exactly 0.
/// Everything else, and any integer case that would overflow, goes through
/// Gaussian elimination with partial pivoting.
pub fn determinant(m: &DMatrix<f64>) -> f64 {
    assert_eq!(m.nrows(), m.ncols(), "determinant of a non-square matrix");
    integer_determinant(m).unwrap_or_else(|| float_determinant(m))
}

/// Bareiss elimination over `i128`. Returns `None` unless every entry is an
/// integer below `2^53` in magnitude and no step overflows.
fn integer_determinant(m: &DMatrix<f64>) -> Option<f64> {
    const LIMIT: f64 = 9_007_199_254_740_992.0;
    let n = m.nrows();
    if m.iter().any(|&x| x.fract() != 0.0 || x.abs() >= LIMIT) {
        return None;
    }
    let mut a: Vec<Vec<i128>> = (0..n).map(|r| (0..n).map(|c| m[(r, c)] as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        let Some(pivot) = (k..n).find(|&r| a[r][k] != 0) else {
            return Some(0.0);
        };
        if pivot != k {
            a.swap(pivot, k);
            sign = -sign;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let t = a[i][j].checked_mul(a[k][k])?.checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                a[i][j] = t / prev;
            }
        }
        prev = a[k][k];
    }
    Some((sign * if n == 0 { 1 } else { a[n - 1][n - 1] }) as f64)
}

fn float_determinant(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut a = m.clone();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[(r, col)].abs().total_cmp(&a[(s, col)].abs()))
            .unwrap();
        if a[(pivot, col)] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap_rows(pivot, col);
            det = -det;
        }
        let p = a[(col, col)];
        det *= p;
        for r in (col + 1)..n {
            let factor = a[(r, col)] / p;
            if factor == 0.0 {
                continue;
            }
            a[(r, col)] = 0.0;
            for c in (col + 1)..n {
                let v = a[(col, c)];
                a[(r, c)] -= factor * v;
            }
        }
    }
    det
}

/// Product of the Euclidean norms of the rows: an upper bound on `|det|`.
pub fn hadamard_bound(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.norm()).product()
}

/// Cholesky-based positive-definiteness check. A pivot must exceed
/// `relative * max|diag|` to count as positive.
pub fn is_positive_definite_cholesky(m: &DMatrix<f64>, relative: f64) -> bool {
    let n = m.nrows();
    if n == 0 {
        return true;
    }
    let scale = (0..n).map(|i| m[(i, i)].abs()).fold(0.0_f64, f64::max);
    let threshold = relative * scale;
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > threshold) {
            return false;
        }
        let ljj = d.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    true
}

/// Neumaier's compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Iterates over the 0-based members of a bitmask in increasing order.
pub(crate) fn mask_members(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}
