//! Conventional real-valued MLP (`ℝ^d → ℝ^o`, one hidden layer) used as
//! the reference model next to the V-MLPs.
//!
//! Flat parameter order: hidden weights `(unit, input)`, hidden biases,
//! output weights `(unit, output)`, output biases.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::{self, Stream};
use crate::vnet::SplitActivation;

#[derive(Debug, Clone)]
pub struct DenseMlp {
    inputs: usize,
    hidden: usize,
    outputs: usize,
    activation: SplitActivation,
    params: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct DenseWorkspace {
    pre: Vec<f64>,
    hidden: Vec<f64>,
    grad_out: Vec<f64>,
    output: Vec<f64>,
}

impl DenseMlp {
    pub fn new(
        inputs: usize,
        hidden: usize,
        outputs: usize,
        activation: SplitActivation,
    ) -> Result<Self> {
        if inputs == 0 || hidden == 0 || outputs == 0 {
            return Err(Error::Validation(format!(
                "layer sizes must be positive, got {inputs}-{hidden}-{outputs}"
            )));
        }
        let len = hidden * inputs + hidden + hidden * outputs + outputs;
        Ok(DenseMlp {
            inputs,
            hidden,
            outputs,
            activation,
            params: vec![0.0; len],
        })
    }

    /// Glorot-uniform weights, zero biases.
    pub fn init(
        inputs: usize,
        hidden: usize,
        outputs: usize,
        activation: SplitActivation,
        seed: u64,
    ) -> Result<Self> {
        let mut net = Self::new(inputs, hidden, outputs, activation)?;
        let mut r = rng::stream(seed, Stream::Init);
        let wb = libm::sqrt(6.0 / (inputs + hidden) as f64);
        let ob = libm::sqrt(6.0 / (hidden + outputs) as f64);
        let (w, rest) = net.params.split_at_mut(hidden * inputs);
        w.iter_mut().for_each(|v| *v = rng::symmetric(&mut r, wb));
        let o = &mut rest[hidden..hidden + hidden * outputs];
        o.iter_mut().for_each(|v| *v = rng::symmetric(&mut r, ob));
        Ok(net)
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn activation(&self) -> SplitActivation {
        self.activation
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn offsets(&self) -> (usize, usize, usize) {
        let hb = self.hidden * self.inputs;
        let ow = hb + self.hidden;
        let ob = ow + self.hidden * self.outputs;
        (hb, ow, ob)
    }

    pub fn param_name(&self, idx: usize) -> String {
        let (hb, ow, ob) = self.offsets();
        if idx < hb {
            format!(
                "hidden_weights[{}][{}]",
                idx / self.inputs,
                idx % self.inputs
            )
        } else if idx < ow {
            format!("hidden_biases[{}]", idx - hb)
        } else if idx < ob {
            let r = idx - ow;
            format!("output_weights[{}][{}]", r / self.outputs, r % self.outputs)
        } else {
            format!("output_biases[{}]", idx - ob)
        }
    }

    pub fn workspace(&self) -> DenseWorkspace {
        DenseWorkspace {
            pre: vec![0.0; self.hidden],
            hidden: vec![0.0; self.hidden],
            grad_out: vec![0.0; self.outputs],
            output: vec![0.0; self.outputs],
        }
    }

    pub fn forward_raw(&self, x: &[f64], out: &mut [f64], ws: &mut DenseWorkspace) {
        let (hb, ow, ob) = self.offsets();
        let p = &self.params;
        for u in 0..self.hidden {
            let w = &p[u * self.inputs..(u + 1) * self.inputs];
            let s = p[hb + u] + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            ws.pre[u] = s;
            ws.hidden[u] = self.activation.apply_scalar(s);
        }
        out.copy_from_slice(&p[ob..ob + self.outputs]);
        for u in 0..self.hidden {
            let h = ws.hidden[u];
            let w = &p[ow + u * self.outputs..ow + (u + 1) * self.outputs];
            for (o, wv) in out.iter_mut().zip(w) {
                *o += wv * h;
            }
        }
    }

    /// Adds `scale · ∂|y − target|²/∂θ` into `grad`; returns the loss.
    pub fn accumulate_gradient(
        &self,
        x: &[f64],
        target: &[f64],
        scale: f64,
        grad: &mut [f64],
        ws: &mut DenseWorkspace,
    ) -> f64 {
        let (hb, ow, ob) = self.offsets();
        let mut out = core::mem::take(&mut ws.output);
        self.forward_raw(x, &mut out, ws);
        let mut loss = 0.0;
        for c in 0..self.outputs {
            let e = out[c] - target[c];
            loss += e * e;
            ws.grad_out[c] = 2.0 * e * scale;
            grad[ob + c] += ws.grad_out[c];
        }
        ws.output = out;
        for u in 0..self.hidden {
            let w = &self.params[ow + u * self.outputs..ow + (u + 1) * self.outputs];
            let h = ws.hidden[u];
            let mut gh = 0.0;
            for c in 0..self.outputs {
                grad[ow + u * self.outputs + c] += ws.grad_out[c] * h;
                gh += ws.grad_out[c] * w[c];
            }
            let gs = gh * self.activation.derivative(ws.pre[u]);
            grad[hb + u] += gs;
            for (g, xv) in grad[u * self.inputs..(u + 1) * self.inputs]
                .iter_mut()
                .zip(x)
            {
                *g += gs * xv;
            }
        }
        loss
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::central_difference_gradient;

    #[test]
    fn gradient_matches_finite_differences() {
        for act in [SplitActivation::Tanh, SplitActivation::Logistic] {
            let net = DenseMlp::init(3, 5, 2, act, 4).unwrap();
            let mut net = net;
            // nonzero biases so every parameter group is exercised
            for (i, v) in net.params_mut().iter_mut().enumerate() {
                *v += 0.01 * libm::sin(i as f64);
            }
            let x = [0.3, -0.7, 0.5];
            let t = [0.2, -0.4];
            let mut ws = net.workspace();
            let mut grad = vec![0.0; net.params().len()];
            net.accumulate_gradient(&x, &t, 1.0, &mut grad, &mut ws);
            let fd = central_difference_gradient(
                |p| {
                    let mut probe = net.clone();
                    probe.params_mut().copy_from_slice(p);
                    let mut ws = probe.workspace();
                    let mut out = [0.0; 2];
                    probe.forward_raw(&x, &mut out, &mut ws);
                    out.iter().zip(&t).map(|(a, b)| (a - b) * (a - b)).sum()
                },
                net.params(),
                1e-5,
            )
            .unwrap();
            for (a, b) in grad.iter().zip(&fd) {
                assert!((a - b).abs() <= 1e-6 * (1.0 + b.abs()), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn names_cover_all_groups() {
        let net = DenseMlp::new(2, 3, 2, SplitActivation::Relu).unwrap();
        assert_eq!(net.param_name(0), "hidden_weights[0][0]");
        assert_eq!(net.param_name(6), "hidden_biases[0]");
        assert_eq!(net.param_name(9), "output_weights[0][0]");
        assert_eq!(net.param_name(15), "output_biases[0]");
        assert!(DenseMlp::new(0, 1, 1, SplitActivation::Relu).is_err());
    }
}
