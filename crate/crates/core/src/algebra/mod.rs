//! Finite-dimensional real algebras given by structure constants.
//!
//! An algebra of dimension `n` is fixed by the tensor `p[i][j][k]`, the
//! coefficient of `e_k` in the product `e_i e_j`. The `k`-th coordinate of a
//! product is the bilinear form `φ(x)ᵀ B_k φ(y)` where `B_k[i][j] = p[i][j][k]`.
//!
//! The algebra is *non-degenerate* (with respect to its basis) when every
//! `B_k` is non-singular, and *hypercomplex* when it has a two-sided identity.

mod builders;
mod catalog;

pub use builders::{
    cayley_dickson_chain, clifford, MAX_CAYLEY_DICKSON_STEPS, MAX_CLIFFORD_GENERATORS,
};
pub use catalog::{catalog, CATALOG_NAMES};

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::numerics::{self, Matrix};

/// Default identity-acceptance threshold on the least-squares residual.
pub const IDENTITY_TOL: f64 = 1e-8;

/// One nonzero structure constant: `e_left · e_right` contributes `coeff · e_out`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub left: usize,
    pub right: usize,
    pub out: usize,
    pub coeff: f64,
}

#[derive(Debug)]
struct Inner {
    dim: usize,
    // flat p[i][j][k] at (i * n + j) * n + k
    constants: Vec<f64>,
    // nonzero constants in (i, j, k) order
    terms: Vec<Term>,
    labels: Option<Vec<String>>,
    name: Option<String>,
}

/// An immutable real algebra. Cloning is cheap and clones share storage.
#[derive(Clone)]
pub struct Algebra(Arc<Inner>);

impl Algebra {
    /// Builds an algebra from the rank-3 tensor `constants[i][j][k]`.
    pub fn new(
        dim: usize,
        constants: &[Vec<Vec<f64>>],
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension(
                "algebra dimension must be at least 1".into(),
            ));
        }
        let bad_shape = constants.len() != dim
            || constants
                .iter()
                .any(|m| m.len() != dim || m.iter().any(|r| r.len() != dim));
        if bad_shape {
            return Err(Error::Dimension(format!(
                "structure constants must have shape {dim}x{dim}x{dim}, got {}",
                shape_string(constants)
            )));
        }
        let flat = constants.iter().flatten().flatten().copied().collect();
        Self::from_flat(dim, flat, labels)
    }

    /// Builds an algebra from a flat tensor laid out as `(i * n + j) * n + k`.
    pub fn from_flat(dim: usize, constants: Vec<f64>, labels: Option<Vec<String>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension(
                "algebra dimension must be at least 1".into(),
            ));
        }
        if constants.len() != dim * dim * dim {
            return Err(Error::Dimension(format!(
                "dimension {dim} needs {} structure constants, got {}",
                dim * dim * dim,
                constants.len()
            )));
        }
        if let Some(pos) = constants.iter().position(|v| !v.is_finite()) {
            let (i, j, k) = (pos / (dim * dim), (pos / dim) % dim, pos % dim);
            return Err(Error::Validation(format!(
                "structure constant p[{i}][{j}][{k}] is not finite"
            )));
        }
        if let Some(l) = &labels {
            if l.len() != dim {
                return Err(Error::Dimension(format!(
                    "expected {dim} basis labels, got {}",
                    l.len()
                )));
            }
        }
        let terms = constants
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(pos, &coeff)| Term {
                left: pos / (dim * dim),
                right: (pos / dim) % dim,
                out: pos % dim,
                coeff,
            })
            .collect();
        Ok(Algebra(Arc::new(Inner {
            dim,
            constants,
            terms,
            labels,
            name: None,
        })))
    }

    /// Builds an algebra from its bilinear-form matrices, `matrices[k][i][j] = p[i][j][k]`.
    pub fn from_bilinear_matrices<M: AsRef<[R]>, R: AsRef<[f64]>>(matrices: &[M]) -> Result<Self> {
        let n = matrices.len();
        let mut flat = vec![0.0; n * n * n];
        for (k, m) in matrices.iter().enumerate() {
            let m = m.as_ref();
            if m.len() != n || m.iter().any(|r| r.as_ref().len() != n) {
                return Err(Error::Dimension(format!("B_{k} must be {n}x{n}")));
            }
            for (i, row) in m.iter().enumerate() {
                for (j, &v) in row.as_ref().iter().enumerate() {
                    flat[(i * n + j) * n + k] = v;
                }
            }
        }
        Self::from_flat(n, flat, None)
    }

    pub fn with_name(self, name: impl Into<String>) -> Self {
        self.rebuild(|inner| inner.name = Some(name.into()))
    }

    pub fn with_labels(self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "expected {} basis labels, got {}",
                self.dim(),
                labels.len()
            )));
        }
        Ok(self.rebuild(|inner| inner.labels = Some(labels)))
    }

    fn rebuild(self, f: impl FnOnce(&mut Inner)) -> Self {
        let mut inner = match Arc::try_unwrap(self.0) {
            Ok(inner) => inner,
            Err(shared) => Inner {
                dim: shared.dim,
                constants: shared.constants.clone(),
                terms: shared.terms.clone(),
                labels: shared.labels.clone(),
                name: shared.name.clone(),
            },
        };
        f(&mut inner);
        Algebra(Arc::new(inner))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn name(&self) -> Option<&str> {
        self.0.name.as_deref()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.0.labels.as_deref()
    }

    /// Label of basis element `i`, falling back to `e{i}`.
    pub fn label(&self, i: usize) -> String {
        match &self.0.labels {
            Some(l) => l[i].clone(),
            None => format!("e{i}"),
        }
    }

    /// `p[i][j][k]`. Panics when an index is out of range.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.0.dim;
        assert!(
            i < n && j < n && k < n,
            "structure constant index out of range"
        );
        self.0.constants[(i * n + j) * n + k]
    }

    /// Flat tensor, `(i * n + j) * n + k`.
    pub fn constants(&self) -> &[f64] {
        &self.0.constants
    }

    /// Nested `[i][j][k]` copy of the tensor.
    pub fn constants_nested(&self) -> Vec<Vec<Vec<f64>>> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| self.constant(i, j, k)).collect())
                    .collect()
            })
            .collect()
    }

    /// Nonzero structure constants, ordered by `(left, right, out)`.
    pub fn terms(&self) -> &[Term] {
        &self.0.terms
    }

    /// True when both handles describe the same multiplication.
    pub fn same_structure(&self, other: &Algebra) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.dim == other.0.dim && self.0.constants == other.0.constants)
    }

    /// Raw product kernel: `out = x · y` on coefficient slices of length `dim`.
    ///
    /// Coordinate `k` is accumulated as `Σ x_i y_j p_{ij,k}` in `(i, j)` order,
    /// the same order [`BilinearMatrix::eval`] uses.
    #[inline]
    pub fn mul_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        debug_assert!(x.len() == self.dim() && y.len() == self.dim() && out.len() == self.dim());
        out.iter_mut().for_each(|v| *v = 0.0);
        for t in &self.0.terms {
            out[t.out] += x[t.left] * y[t.right] * t.coeff;
        }
    }

    /// The matrix `B_k` of the `k`-th bilinear form.
    pub fn bilinear_matrix(&self, k: usize) -> Result<BilinearMatrix> {
        let n = self.dim();
        if k >= n {
            return Err(Error::Index { index: k, bound: n });
        }
        let data = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.constant(i, j, k))
            .collect();
        Ok(BilinearMatrix {
            k,
            entries: Matrix::new(n, n, data)?,
        })
    }

    /// Classifies every `B_k` as singular or not, using a relative pivot
    /// threshold `tol` (see [`numerics::lu_factorize`]).
    pub fn degeneracy(&self, tol: f64) -> Result<DegeneracyReport> {
        let mut per_component = Vec::with_capacity(self.dim());
        for k in 0..self.dim() {
            let lu = numerics::lu_factorize(self.bilinear_matrix(k)?.matrix(), tol)?;
            per_component.push(ComponentReport {
                k,
                rank: lu.rank(),
                abs_det: lu.abs_det(),
                singular: lu.is_singular(),
            });
        }
        let overall_nondegenerate = per_component.iter().all(|c| !c.singular);
        Ok(DegeneracyReport {
            tol,
            per_component,
            overall_nondegenerate,
        })
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.degeneracy(numerics::DEFAULT_TOL)
            .map(|r| r.overall_nondegenerate)
            .unwrap_or(false)
    }

    /// Looks for a two-sided identity.
    ///
    /// Writing `e = Σ a_m e_m`, the conditions `e e_j = e_j = e_j e` give
    /// `2n²` linear equations in the `n` unknowns `a_m`. They are solved in
    /// the least-squares sense and `e` is accepted when the residual norm is
    /// below `tol`.
    pub fn find_identity(&self, tol: f64) -> Option<Element> {
        let n = self.dim();
        let mut rows = Vec::with_capacity(2 * n * n * n);
        let mut rhs = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for k in 0..n {
                rows.extend((0..n).map(|m| self.constant(m, j, k)));
                rhs.push(if j == k { 1.0 } else { 0.0 });
            }
        }
        for j in 0..n {
            for k in 0..n {
                rows.extend((0..n).map(|m| self.constant(j, m, k)));
                rhs.push(if j == k { 1.0 } else { 0.0 });
            }
        }
        // an all-zero algebra produces a zero system matrix
        if rows.iter().all(|&v| v == 0.0) {
            return None;
        }
        let system = Matrix::new(2 * n * n, n, rows).ok()?;
        let ls = numerics::least_squares(&system, &rhs, numerics::DEFAULT_TOL).ok()?;
        if ls.residual < tol {
            Element::new(self, ls.x).ok()
        } else {
            None
        }
    }

    /// Re-expresses the algebra in a new basis whose `j`-th element has old
    /// coordinates equal to column `j` of `p`.
    ///
    /// The new constants are `p'_{ab,c} = Σ P_ia P_jb p_{ij,k} (P⁻¹)_ck`.
    pub fn change_of_basis(&self, p: &Matrix) -> Result<Algebra> {
        let n = self.dim();
        if p.rows() != n || p.cols() != n {
            return Err(Error::Dimension(format!(
                "basis change must be {n}x{n}, got {}x{}",
                p.rows(),
                p.cols()
            )));
        }
        let lu = numerics::lu_factorize(p, numerics::DEFAULT_TOL)?;
        if lu.is_singular() {
            return Err(Error::Singular {
                rank: lu.rank(),
                size: n,
            });
        }
        let p_inv = p.inverse(numerics::DEFAULT_TOL)?;
        let mut flat = vec![0.0; n * n * n];
        let mut prod = vec![0.0; n];
        let mut ea = vec![0.0; n];
        let mut eb = vec![0.0; n];
        for a in 0..n {
            for (i, v) in ea.iter_mut().enumerate() {
                *v = p[(i, a)];
            }
            for b in 0..n {
                for (j, v) in eb.iter_mut().enumerate() {
                    *v = p[(j, b)];
                }
                self.mul_into(&ea, &eb, &mut prod);
                let new_coords = p_inv.mul_vec(&prod)?;
                for (c, v) in new_coords.into_iter().enumerate() {
                    flat[(a * n + b) * n + c] = v;
                }
            }
        }
        Algebra::from_flat(n, flat, None)
    }
}

fn shape_string(t: &[Vec<Vec<f64>>]) -> String {
    let d1 = t.first().map_or(0, |m| m.len());
    let d2 = t.first().and_then(|m| m.first()).map_or(0, |r| r.len());
    format!("{}x{}x{}", t.len(), d1, d2)
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Algebra")
            .field("name", &self.0.name)
            .field("dim", &self.0.dim)
            .field("constants", &self.0.constants)
            .finish()
    }
}

impl PartialEq for Algebra {
    fn eq(&self, other: &Self) -> bool {
        self.same_structure(other)
    }
}

/// Matrix of the bilinear form giving product coordinate `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearMatrix {
    k: usize,
    entries: Matrix,
}

impl BilinearMatrix {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &Matrix {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// `xᵀ B_k y`, summed in the same order as [`Algebra::mul_into`].
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.entries.rows();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += x[i] * y[j] * self.entries[(i, j)];
            }
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentReport {
    pub k: usize,
    pub rank: usize,
    pub abs_det: f64,
    pub singular: bool,
}

/// Per-component singularity of the bilinear forms.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyReport {
    /// Relative pivot threshold used for the rank decisions.
    pub tol: f64,
    pub per_component: Vec<ComponentReport>,
    pub overall_nondegenerate: bool,
}

impl DegeneracyReport {
    pub fn singular_components(&self) -> Vec<usize> {
        self.per_component
            .iter()
            .filter(|c| c.singular)
            .map(|c| c.k)
            .collect()
    }
}

/// An algebra element: coefficients over the algebra's basis.
#[derive(Clone)]
pub struct Element {
    algebra: Algebra,
    coeffs: Vec<f64>,
}

impl Element {
    pub fn new(algebra: &Algebra, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != algebra.dim() {
            return Err(Error::Dimension(format!(
                "element of a {}-dimensional algebra needs {} coefficients, got {}",
                algebra.dim(),
                algebra.dim(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation(
                "element coefficients must be finite".into(),
            ));
        }
        Ok(Element {
            algebra: algebra.clone(),
            coeffs,
        })
    }

    pub fn zero(algebra: &Algebra) -> Self {
        Element {
            algebra: algebra.clone(),
            coeffs: vec![0.0; algebra.dim()],
        }
    }

    pub fn basis(algebra: &Algebra, i: usize) -> Result<Self> {
        if i >= algebra.dim() {
            return Err(Error::Index {
                index: i,
                bound: algebra.dim(),
            });
        }
        let mut e = Self::zero(algebra);
        e.coeffs[i] = 1.0;
        Ok(e)
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    fn check_same(&self, other: &Element) -> Result<()> {
        if self.algebra.same_structure(&other.algebra) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Element {
            algebra: self.algebra.clone(),
            coeffs,
        })
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Element {
            algebra: self.algebra.clone(),
            coeffs,
        })
    }

    pub fn scale(&self, alpha: f64) -> Element {
        Element {
            algebra: self.algebra.clone(),
            coeffs: self.coeffs.iter().map(|v| alpha * v).collect(),
        }
    }

    /// Euclidean norm of the coefficient vector.
    pub fn abs(&self) -> f64 {
        libm::sqrt(self.coeffs.iter().map(|v| v * v).sum())
    }

    /// Coefficient `ξ_i`.
    pub fn project(&self, i: usize) -> Result<f64> {
        self.coeffs.get(i).copied().ok_or(Error::Index {
            index: i,
            bound: self.coeffs.len(),
        })
    }

    pub fn mul(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        let mut out = vec![0.0; self.algebra.dim()];
        self.algebra.mul_into(&self.coeffs, &other.coeffs, &mut out);
        Ok(Element {
            algebra: self.algebra.clone(),
            coeffs: out,
        })
    }
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.algebra.same_structure(&other.algebra) && self.coeffs == other.coeffs
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Element")
            .field("algebra", &self.algebra.name())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}·{}", c + 0.0, self.algebra.label(i))?;
        }
        Ok(())
    }
}
