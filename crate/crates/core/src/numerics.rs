//! Dense linear algebra for the small matrices that show up here
//! (bilinear-form matrices and basis changes, n ≤ 16), plus the
//! central-difference gradient used to check backpropagation.
//!
//! Partial pivoting is enough at this size; nothing here is tuned for
//! large or ill-conditioned systems.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Default relative pivot threshold for rank decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default step for [`central_difference_gradient`].
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Row-major dense matrix of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "matrix entry ({}, {}) is not finite",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::Dimension("rows have different lengths".into()));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.as_ref().iter().copied())
            .collect();
        Self::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} cannot multiply a {}x{} matrix",
                x.len(),
                self.rows,
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| f64::max(m, v.abs()))
    }

    pub fn inverse(&self, tol: f64) -> Result<Matrix> {
        let lu = lu_factorize(self, tol)?;
        let n = self.rows;
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = lu.solve(&e)?;
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }

    /// Numerical rank from row-echelon elimination, see [`lu_factorize`].
    pub fn rank(&self, tol: f64) -> usize {
        echelon(self, tol).rank
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Packed partial-pivot LU factors of a square matrix.
///
/// `perm[r]` is the original row that ended up in row `r`. When the matrix is
/// rank deficient the factors are a row-echelon form and cannot be used for
/// [`solve`](LuFactorization::solve).
#[derive(Debug, Clone)]
pub struct LuFactorization {
    lu: Matrix,
    perm: Vec<usize>,
    rank: usize,
    abs_det: f64,
}

impl LuFactorization {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn abs_det(&self) -> f64 {
        self.abs_det
    }

    pub fn is_singular(&self) -> bool {
        self.rank < self.lu.cols
    }

    pub fn pivots(&self) -> &[usize] {
        &self.perm
    }

    pub fn size(&self) -> usize {
        self.lu.rows
    }

    /// Solves `M x = b` for the factorized `M`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.lu.rows;
        if self.is_singular() {
            return Err(Error::Singular {
                rank: self.rank,
                size: n,
            });
        }
        if b.len() != n {
            return Err(Error::Dimension(format!(
                "right-hand side has length {}, expected {n}",
                b.len()
            )));
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        // forward substitution with the unit lower factor
        for i in 0..n {
            let mut acc = x[i];
            for (k, xk) in x.iter().enumerate().take(i) {
                acc -= self.lu[(i, k)] * xk;
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for k in i + 1..n {
                acc -= self.lu[(i, k)] * x[k];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        Ok(x)
    }
}

struct Echelon {
    lu: Matrix,
    perm: Vec<usize>,
    rank: usize,
    pivot_product: f64,
}

// Gaussian elimination to row-echelon form. A column whose best remaining
// pivot is below `tol * max|entry|` is skipped without consuming a row, so the
// number of pivot rows is the numerical rank. For full-rank square input this
// is ordinary LU with partial pivoting.
fn echelon(m: &Matrix, tol: f64) -> Echelon {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..rows).collect();
    let threshold = tol * m.max_abs();
    let mut r = 0;
    let mut pivot_product = 1.0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, best_abs) = (r..rows)
            .map(|i| (i, a[(i, c)].abs()))
            .fold((r, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if best_abs < threshold || best_abs == 0.0 {
            continue;
        }
        if best != r {
            for j in 0..cols {
                a.data.swap(r * cols + j, best * cols + j);
            }
            perm.swap(r, best);
        }
        let pivot = a[(r, c)];
        pivot_product *= pivot.abs();
        for i in r + 1..rows {
            let f = a[(i, c)] / pivot;
            a[(i, c)] = f;
            if f != 0.0 {
                for j in c + 1..cols {
                    let v = a[(r, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
        r += 1;
    }
    Echelon {
        lu: a,
        perm,
        rank: r,
        pivot_product,
    }
}

/// Partial-pivot LU with a relative pivot threshold.
///
/// A pivot counts as zero when `|pivot| < tol * max|entry|`; `rank` counts
/// the accepted pivots and `abs_det` is the product of their magnitudes
/// when the matrix has full rank, zero otherwise.
pub fn lu_factorize(m: &Matrix, tol: f64) -> Result<LuFactorization> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "LU needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Validation(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let e = echelon(m, tol);
    let abs_det = if e.rank == m.cols {
        e.pivot_product
    } else {
        0.0
    };
    Ok(LuFactorization {
        lu: e.lu,
        perm: e.perm,
        rank: e.rank,
        abs_det,
    })
}

/// Solves the factorized system; free-function form of [`LuFactorization::solve`].
pub fn solve(f: &LuFactorization, b: &[f64]) -> Result<Vec<f64>> {
    f.solve(b)
}

/// Result of [`least_squares`].
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub x: Vec<f64>,
    /// Euclidean norm of `M x - b`.
    pub residual: f64,
    pub rank: usize,
}

/// Minimizes `‖M x − b‖` for `rows ≥ cols` with Householder QR and column
/// pivoting. Rank-deficient systems get the basic solution (free variables at
/// zero). The residual is recomputed from `M` directly.
pub fn least_squares(m: &Matrix, b: &[f64], tol: f64) -> Result<LeastSquares> {
    let (rows, cols) = (m.rows, m.cols);
    if rows < cols {
        return Err(Error::Dimension(format!(
            "least squares needs rows >= cols, got {rows}x{cols}"
        )));
    }
    if b.len() != rows {
        return Err(Error::Dimension(format!(
            "right-hand side has length {}, expected {rows}",
            b.len()
        )));
    }
    let mut a = m.clone();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..cols).collect();
    let col_norm2 = |a: &Matrix, j: usize, from: usize| -> f64 {
        (from..rows).map(|i| a[(i, j)] * a[(i, j)]).sum()
    };
    let initial_max = libm::sqrt((0..cols).map(|j| col_norm2(&a, j, 0)).fold(0.0, f64::max));
    let threshold = tol * initial_max;
    let mut rank = 0;
    for k in 0..cols {
        let (best, best_n2) = (k..cols)
            .map(|j| (j, col_norm2(&a, j, k)))
            .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        let norm = libm::sqrt(best_n2);
        if norm <= threshold || norm == 0.0 {
            break;
        }
        if best != k {
            for i in 0..rows {
                a.data.swap(i * cols + k, i * cols + best);
            }
            perm.swap(k, best);
        }
        // Householder vector v = x - alpha e_1, alpha = -sign(x_0) |x|
        let alpha = if a[(k, k)] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..rows).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for j in k..cols {
                let dot: f64 = (k..rows).map(|i| v[i - k] * a[(i, j)]).sum();
                let f = 2.0 * dot / vnorm2;
                for i in k..rows {
                    a[(i, j)] -= f * v[i - k];
                }
            }
            let dot: f64 = (k..rows).map(|i| v[i - k] * rhs[i]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..rows {
                rhs[i] -= f * v[i - k];
            }
        }
        rank += 1;
    }
    let mut z = vec![0.0; cols];
    for i in (0..rank).rev() {
        let mut acc = rhs[i];
        for j in i + 1..rank {
            acc -= a[(i, j)] * z[j];
        }
        z[i] = acc / a[(i, i)];
    }
    let mut x = vec![0.0; cols];
    for (k, &p) in perm.iter().enumerate() {
        x[p] = z[k];
    }
    let mx = m.mul_vec(&x)?;
    let residual = libm::sqrt(mx.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum());
    Ok(LeastSquares { x, residual, rank })
}

/// Central-difference gradient of `f` at `x`:
/// component `i` is `(f(x + h e_i) − f(x − h e_i)) / 2h`.
pub fn central_difference_gradient<F>(f: F, x: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Validation(format!("step must be positive, got {h}")));
    }
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = f(&probe);
        probe[i] = x[i] - h;
        let down = f(&probe);
        probe[i] = x[i];
        if !up.is_finite() || !down.is_finite() {
            return Err(Error::Numeric(format!(
                "objective evaluated near coordinate {i}"
            )));
        }
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn dual_b0_is_rank_one() {
        let f = lu_factorize(&m(&[&[1.0, 0.0], &[0.0, 0.0]]), DEFAULT_TOL).unwrap();
        assert_eq!(f.rank(), 1);
        assert!(f.is_singular());
        assert_eq!(f.abs_det(), 0.0);
    }

    #[test]
    fn identity_has_unit_determinant() {
        let f = lu_factorize(&Matrix::identity(4), DEFAULT_TOL).unwrap();
        assert_eq!(f.rank(), 4);
        assert_eq!(f.abs_det(), 1.0);
    }

    #[test]
    fn equal_rows_are_singular() {
        let f = lu_factorize(&m(&[&[1.0, 1.0], &[1.0, 1.0]]), DEFAULT_TOL).unwrap();
        assert_eq!(f.rank(), 1);
        assert_eq!(f.abs_det(), 0.0);
        assert!(matches!(
            f.solve(&[1.0, 1.0]),
            Err(Error::Singular { rank: 1, size: 2 })
        ));
    }

    #[test]
    fn rank_survives_a_skipped_column() {
        // plain column-by-column LU would report rank 0 here
        assert_eq!(m(&[&[0.0, 1.0], &[0.0, 0.0]]).rank(DEFAULT_TOL), 1);
    }

    #[test]
    fn non_square_is_rejected() {
        let r = lu_factorize(&Matrix::zeros(2, 3), DEFAULT_TOL);
        assert!(matches!(r, Err(Error::Dimension(_))));
    }

    #[test]
    fn diagonal_and_identity_solves() {
        let f = lu_factorize(&m(&[&[1.0, 0.0], &[0.0, -1.0]]), DEFAULT_TOL).unwrap();
        assert_eq!(f.solve(&[3.0, 4.0]).unwrap(), [3.0, -4.0]);
        let f = lu_factorize(&Matrix::identity(3), DEFAULT_TOL).unwrap();
        assert_eq!(f.solve(&[1.5, -2.0, 7.0]).unwrap(), [1.5, -2.0, 7.0]);
    }

    #[test]
    fn solve_half_integer_system() {
        // closed-form 2x2 inverse of [[3/2, 1/2], [1/2, -1/2]] is [[1/2, 1/2], [1/2, -3/2]]
        let mat = m(&[&[1.5, 0.5], &[0.5, -0.5]]);
        let x = lu_factorize(&mat, DEFAULT_TOL)
            .unwrap()
            .solve(&[1.0, 0.0])
            .unwrap();
        let oracle = [0.5, 0.5];
        for (a, b) in x.iter().zip(oracle) {
            assert!((a - b).abs() < 1e-12);
        }
        let r = mat.mul_vec(&x).unwrap();
        assert!((r[0] - 1.0).abs() < 1e-12 && r[1].abs() < 1e-12);
    }

    #[test]
    fn inverse_roundtrip() {
        let mat = m(&[&[1.0, 1.0], &[1.0, -1.0]]);
        let prod = mat.matmul(&mat.inverse(DEFAULT_TOL).unwrap()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn least_squares_rank_deficient_residual() {
        // [[1,0],[0,0]] x = (0,1) cannot do better than residual 1
        let ls = least_squares(&m(&[&[1.0, 0.0], &[0.0, 0.0]]), &[0.0, 1.0], DEFAULT_TOL).unwrap();
        assert_eq!(ls.rank, 1);
        assert!((ls.residual - 1.0).abs() < 1e-12);
        let ls = least_squares(&m(&[&[1.0, 0.0], &[0.0, 0.0]]), &[2.0, 0.0], DEFAULT_TOL).unwrap();
        assert!(ls.residual < 1e-15);
        assert!((ls.x[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn least_squares_overdetermined_line_fit() {
        // fit y = a + b t through (0,1), (1,3), (2,5), (3,7): exact a=1, b=2
        let mat = m(&[&[1.0, 0.0], &[1.0, 1.0], &[1.0, 2.0], &[1.0, 3.0]]);
        let ls = least_squares(&mat, &[1.0, 3.0, 5.0, 7.0], DEFAULT_TOL).unwrap();
        assert!((ls.x[0] - 1.0).abs() < 1e-12 && (ls.x[1] - 2.0).abs() < 1e-12);
        assert!(ls.residual < 1e-12);
    }

    #[test]
    fn finite_differences() {
        let g = central_difference_gradient(|x| x[0] * x[0], &[3.0], 1e-5).unwrap();
        assert!((g[0] - 6.0).abs() < 1e-6);
        let g = central_difference_gradient(|_| 4.0, &[1.0, 2.0, 3.0], 1e-5).unwrap();
        assert_eq!(g, [0.0, 0.0, 0.0]);
        let g = central_difference_gradient(|x| x[0] * x[1], &[2.0, 5.0], 1e-5).unwrap();
        assert!((g[0] - 5.0).abs() < 1e-8 && (g[1] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn finite_difference_reports_non_finite() {
        let r = central_difference_gradient(|x| 1.0 / x[0], &[0.0], 1e-5);
        assert!(r.is_ok());
        let r =
            central_difference_gradient(|x| if x[0] > 0.0 { f64::NAN } else { 0.0 }, &[0.0], 1e-5);
        assert!(matches!(r, Err(Error::Numeric(_))));
    }

    #[test]
    fn rejects_non_finite_entries() {
        assert!(matches!(
            Matrix::new(1, 2, vec![1.0, f64::INFINITY]),
            Err(Error::Validation(_))
        ));
    }
}
