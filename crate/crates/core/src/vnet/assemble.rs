//! Building a V-MLP out of one real MLP per output component.
//!
//! Each real network `N_k(t) = Σ_i α_ik ψ(L_ik(t) + b_ik)` on `t = φ(x)`
//! contributes `M_k` hidden units. Unit `(i, k)` gets algebra weights
//! representing `L_ik` through component `k`, a bias with `b_ik` in
//! coordinate `k` and `λ` everywhere else, and the real output weight
//! `α_ik`. For an activation that vanishes at `−∞`, a sufficiently negative
//! `λ` silences every off-target coordinate, and the assembled network
//! equals `Σ_k N_k(φ(x)) e_k`.

use alloc::format;
use alloc::vec::Vec;

use super::{OutputMode, SplitActivation, VMlp};
use crate::algebra::{Algebra, Element};
use crate::error::{Error, Result};
use crate::functional::{represent, LinearFunctional};
use crate::numerics::DEFAULT_TOL;

/// `t ↦ Σ_i α_i ψ(L_i(t) + b_i)` on `ℝ^{nN}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMlp {
    functionals: Vec<LinearFunctional>,
    alphas: Vec<f64>,
    biases: Vec<f64>,
}

impl RealMlp {
    pub fn new(
        functionals: Vec<LinearFunctional>,
        alphas: Vec<f64>,
        biases: Vec<f64>,
    ) -> Result<Self> {
        if functionals.len() != alphas.len() || functionals.len() != biases.len() {
            return Err(Error::Dimension(format!(
                "{} functionals, {} output weights and {} biases",
                functionals.len(),
                alphas.len(),
                biases.len()
            )));
        }
        if let Some(first) = functionals.first() {
            let shape = (first.arity(), first.block_len());
            if functionals
                .iter()
                .any(|f| (f.arity(), f.block_len()) != shape)
            {
                return Err(Error::Dimension(
                    "hidden functionals have different input sizes".into(),
                ));
            }
        }
        if alphas.iter().chain(&biases).any(|v| !v.is_finite()) {
            return Err(Error::Validation(
                "real MLP parameters must be finite".into(),
            ));
        }
        Ok(RealMlp {
            functionals,
            alphas,
            biases,
        })
    }

    pub fn n_hidden(&self) -> usize {
        self.functionals.len()
    }

    pub fn functionals(&self) -> &[LinearFunctional] {
        &self.functionals
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn eval(&self, activation: SplitActivation, input: &[f64]) -> f64 {
        self.functionals
            .iter()
            .zip(&self.alphas)
            .zip(&self.biases)
            .map(|((l, a), b)| a * activation.apply_scalar(l.eval(input) + b))
            .sum()
    }
}

/// Assembles the scalar-output V-MLP described in the module docs.
///
/// `real_nets[k]` approximates output component `k`. The algebra must be
/// non-degenerate so every functional can be represented exactly.
pub fn assemble_from_components(
    algebra: &Algebra,
    real_nets: &[RealMlp],
    activation: SplitActivation,
    lambda: f64,
) -> Result<VMlp> {
    let n = algebra.dim();
    if real_nets.len() != n {
        return Err(Error::Dimension(format!(
            "need one real network per component ({n}), got {}",
            real_nets.len()
        )));
    }
    if !lambda.is_finite() {
        return Err(Error::Validation("lambda must be finite".into()));
    }
    let report = algebra.degeneracy(DEFAULT_TOL)?;
    if !report.overall_nondegenerate {
        return Err(Error::Degenerate {
            components: report.singular_components(),
        });
    }
    let mut arity = None;
    for f in real_nets.iter().flat_map(|r| r.functionals()) {
        if f.block_len() != n {
            return Err(Error::Dimension(format!(
                "functional blocks have length {}, algebra has dimension {n}",
                f.block_len()
            )));
        }
        match arity {
            None => arity = Some(f.arity()),
            Some(a) if a != f.arity() => {
                return Err(Error::Dimension(
                    "real networks have different input sizes".into(),
                ))
            }
            _ => {}
        }
    }
    let n_inputs =
        arity.ok_or_else(|| Error::Validation("real networks have no hidden units".into()))?;
    let n_hidden: usize = real_nets.iter().map(RealMlp::n_hidden).sum();

    let mut net = VMlp::new(algebra, n_inputs, n_hidden, OutputMode::Scalar, activation)?;
    let mut unit = 0;
    for (k, real) in real_nets.iter().enumerate() {
        for ((l, &alpha), &b) in real
            .functionals()
            .iter()
            .zip(real.alphas())
            .zip(real.biases())
        {
            let rep = represent(algebra, k, l)?;
            for (j, y) in rep.ys.iter().enumerate() {
                net.set_hidden_weight(unit, j, y)?;
            }
            let mut bias = alloc::vec![lambda; n];
            bias[k] = b;
            net.set_hidden_bias(unit, &Element::new(algebra, bias)?)?;
            net.set_output_scalar(unit, alpha)?;
            unit += 1;
        }
    }
    Ok(net)
}
