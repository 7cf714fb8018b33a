//! Linear functionals on `ℝ^{nN}` written as a component projection of an
//! algebra-weighted sum.
//!
//! For `L(φ(x)) = Σ_j c_jᵀ φ(x_j)` we want weights `y_j` with
//! `L(φ(x)) = π_i(Σ_j y_j x_j)`. Since `π_i(y x) = φ(y)ᵀ B_i φ(x)`, this means
//! `B_iᵀ φ(y_j) = c_j` for every `j`: one linear solve per input. When `B_i`
//! is singular the system generally has no solution; we then return the
//! least-squares weights and the leftover residual, which certifies that
//! the functional cannot be represented.

use alloc::format;
use alloc::vec::Vec;

use crate::algebra::{Algebra, Element};
use crate::error::{Error, Result};
use crate::numerics::{self, DEFAULT_TOL};
use crate::rng::{self, Stream};

/// `L(t) = Σ_j c_jᵀ t_j` over `N` blocks of length `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFunctional {
    coeffs: Vec<Vec<f64>>,
}

impl LinearFunctional {
    pub fn new(coeffs: Vec<Vec<f64>>) -> Result<Self> {
        let n = coeffs.first().map_or(0, Vec::len);
        if coeffs.is_empty() || n == 0 {
            return Err(Error::Dimension(
                "a functional needs at least one non-empty block".into(),
            ));
        }
        if coeffs.iter().any(|c| c.len() != n) {
            return Err(Error::Dimension(
                "functional blocks must all have the same length".into(),
            ));
        }
        if coeffs.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Validation(
                "functional coefficients must be finite".into(),
            ));
        }
        Ok(LinearFunctional { coeffs })
    }

    /// Splits a flat `nN` coefficient list into `N` blocks of length `n`.
    pub fn from_flat(n: usize, flat: &[f64]) -> Result<Self> {
        if n == 0 || flat.is_empty() || flat.len() % n != 0 {
            return Err(Error::Dimension(format!(
                "{} coefficients cannot be split into blocks of {n}",
                flat.len()
            )));
        }
        Self::new(flat.chunks(n).map(<[f64]>::to_vec).collect())
    }

    pub fn zero(n: usize, arity: usize) -> Self {
        LinearFunctional {
            coeffs: alloc::vec![alloc::vec![0.0; n]; arity],
        }
    }

    /// Number of blocks `N`.
    pub fn arity(&self) -> usize {
        self.coeffs.len()
    }

    /// Block length `n`.
    pub fn block_len(&self) -> usize {
        self.coeffs[0].len()
    }

    pub fn blocks(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    /// Evaluates on a flat input of length `nN`.
    pub fn eval(&self, input: &[f64]) -> f64 {
        let n = self.block_len();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                c.iter()
                    .zip(&input[j * n..(j + 1) * n])
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
            })
            .sum()
    }

    /// `alpha * self + other`.
    pub fn axpy(&self, alpha: f64, other: &LinearFunctional) -> Result<LinearFunctional> {
        if self.arity() != other.arity() || self.block_len() != other.block_len() {
            return Err(Error::Dimension("functionals have different shapes".into()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.iter().zip(b).map(|(u, v)| alpha * u + v).collect())
            .collect();
        Ok(LinearFunctional { coeffs })
    }
}

/// Weights `y_1 … y_N` such that `π_component(Σ_j y_j x_j)` reproduces a
/// functional, with the residual left over when that is impossible.
#[derive(Debug, Clone)]
pub struct Representation {
    pub ys: Vec<Element>,
    pub component: usize,
    /// `Σ_j ‖B_iᵀ φ(y_j) − c_j‖`; zero for an exact solve.
    pub residual: f64,
    /// True when `B_i` was singular and least squares was used.
    pub least_squares: bool,
}

impl Representation {
    pub fn is_exact(&self, tol: f64) -> bool {
        self.residual <= tol
    }
}

/// Finds algebra weights representing `functional` through component `i`.
pub fn represent(
    algebra: &Algebra,
    i: usize,
    functional: &LinearFunctional,
) -> Result<Representation> {
    let n = algebra.dim();
    if i >= n {
        return Err(Error::Index { index: i, bound: n });
    }
    if functional.block_len() != n {
        return Err(Error::Dimension(format!(
            "functional blocks have length {}, algebra has dimension {n}",
            functional.block_len()
        )));
    }
    let bt = algebra.bilinear_matrix(i)?.matrix().transpose();
    let lu = numerics::lu_factorize(&bt, DEFAULT_TOL)?;
    let mut ys = Vec::with_capacity(functional.arity());
    if !lu.is_singular() {
        for c in functional.blocks() {
            ys.push(Element::new(algebra, lu.solve(c)?)?);
        }
        return Ok(Representation {
            ys,
            component: i,
            residual: 0.0,
            least_squares: false,
        });
    }
    let mut residual = 0.0;
    for c in functional.blocks() {
        let ls = numerics::least_squares(&bt, c, DEFAULT_TOL)?;
        residual += ls.residual;
        ys.push(Element::new(algebra, ls.x)?);
    }
    Ok(Representation {
        ys,
        component: i,
        residual,
        least_squares: true,
    })
}

/// Empirical check of a representation: the largest
/// `|L(φ(x)) − π_i(Σ_j y_j x_j)|` over `samples` random tuples with
/// coefficients uniform in `[-1, 1]`.
pub fn verify_representation(
    algebra: &Algebra,
    rep: &Representation,
    functional: &LinearFunctional,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let n = algebra.dim();
    if rep.ys.len() != functional.arity() || functional.block_len() != n {
        return Err(Error::Dimension(
            "representation and functional have different arities".into(),
        ));
    }
    let mut r = rng::stream(seed, Stream::Verify);
    let mut input = alloc::vec![0.0; n * functional.arity()];
    let mut prod = alloc::vec![0.0; n];
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        input
            .iter_mut()
            .for_each(|v| *v = rng::symmetric(&mut r, 1.0));
        let mut projected = 0.0;
        for (j, y) in rep.ys.iter().enumerate() {
            algebra.mul_into(y.coeffs(), &input[j * n..(j + 1) * n], &mut prod);
            projected += prod[rep.component];
        }
        worst = worst.max((functional.eval(&input) - projected).abs());
    }
    Ok(worst)
}
