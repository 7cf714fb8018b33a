//! Single-hidden-layer vector-valued MLPs over an arbitrary algebra.
//!
//! For inputs `x_1 … x_N` in the algebra the network computes
//!
//! ```text
//! s_i = Σ_j w_ij x_j + b_i          (algebra products)
//! h_i = ψ(s_i)                      (split activation, per coefficient)
//! y   = Σ_i α_i h_i                 (α_i real, or an algebra product)
//! ```
//!
//! Parameters are stored flat, in checkpoint order: hidden weights indexed
//! by `(i, j, coefficient)`, then hidden biases by `(i, coefficient)`, then
//! output weights by `i` (scalar mode) or `(i, coefficient)` (vector mode).

mod assemble;

pub use assemble::{assemble_from_components, RealMlp};

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::algebra::{Algebra, Element, IDENTITY_TOL};
use crate::error::{Error, Result};
use crate::rng::{self, Stream};

/// Real activation applied independently to every coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitActivation {
    #[default]
    Relu,
    Logistic,
    Tanh,
    /// Linear pass-through; only useful for tests.
    Identity,
}

impl SplitActivation {
    pub const ALL: [SplitActivation; 4] = [Self::Relu, Self::Logistic, Self::Tanh, Self::Identity];

    #[inline]
    pub fn apply_scalar(self, t: f64) -> f64 {
        match self {
            Self::Relu => {
                if t > 0.0 {
                    t
                } else {
                    0.0
                }
            }
            Self::Logistic => {
                if t >= 0.0 {
                    1.0 / (1.0 + libm::exp(-t))
                } else {
                    let e = libm::exp(t);
                    e / (1.0 + e)
                }
            }
            Self::Tanh => libm::tanh(t),
            Self::Identity => t,
        }
    }

    /// Derivative; relu uses 0 at the kink.
    #[inline]
    pub fn derivative(self, t: f64) -> f64 {
        match self {
            Self::Relu => {
                if t > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Logistic => {
                let s = self.apply_scalar(t);
                s * (1.0 - s)
            }
            Self::Tanh => {
                let th = libm::tanh(t);
                1.0 - th * th
            }
            Self::Identity => 1.0,
        }
    }

    /// Coefficient-wise application to an element.
    pub fn apply(self, x: &Element) -> Element {
        let coeffs = x.coeffs().iter().map(|&t| self.apply_scalar(t)).collect();
        Element::new(x.algebra(), coeffs).expect("activation of finite input is finite")
    }

    /// `lim_{t→−∞} ψ(t) = 0`, the tail the λ-shifted assembly relies on.
    pub fn vanishes_at_negative_infinity(self) -> bool {
        matches!(self, Self::Relu | Self::Logistic)
    }

    /// False for the identity, which cannot approximate non-linear maps.
    pub fn is_approximating(self) -> bool {
        !matches!(self, Self::Identity)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Relu => "relu",
            Self::Logistic => "logistic",
            Self::Tanh => "tanh",
            Self::Identity => "identity",
        }
    }
}

impl fmt::Display for SplitActivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SplitActivation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| {
                Error::Validation(format!(
                    "unknown activation '{s}' (relu, logistic, tanh, identity)"
                ))
            })
    }
}

/// Whether output weights are real scalars or algebra elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputMode {
    #[default]
    Scalar,
    Vector,
}

impl OutputMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Scalar => "scalar",
            Self::Vector => "vector",
        }
    }
}

impl fmt::Display for OutputMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OutputMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scalar" => Ok(Self::Scalar),
            "vector" => Ok(Self::Vector),
            _ => Err(Error::Validation(format!(
                "unknown output mode '{s}' (scalar, vector)"
            ))),
        }
    }
}

/// Offsets of the three parameter groups in the flat vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub dim: usize,
    pub n_inputs: usize,
    pub n_hidden: usize,
    pub mode: OutputMode,
}

impl Layout {
    pub fn hidden_weights_len(&self) -> usize {
        self.n_hidden * self.n_inputs * self.dim
    }

    pub fn hidden_biases_len(&self) -> usize {
        self.n_hidden * self.dim
    }

    pub fn output_weights_len(&self) -> usize {
        match self.mode {
            OutputMode::Scalar => self.n_hidden,
            OutputMode::Vector => self.n_hidden * self.dim,
        }
    }

    pub fn bias_offset(&self) -> usize {
        self.hidden_weights_len()
    }

    pub fn output_offset(&self) -> usize {
        self.hidden_weights_len() + self.hidden_biases_len()
    }

    pub fn len(&self) -> usize {
        self.output_offset() + self.output_weights_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Human-readable name of flat parameter `idx`.
    pub fn param_name(&self, idx: usize) -> String {
        let n = self.dim;
        if idx < self.bias_offset() {
            let (ij, c) = (idx / n, idx % n);
            format!(
                "hidden_weights[{}][{}][{c}]",
                ij / self.n_inputs,
                ij % self.n_inputs
            )
        } else if idx < self.output_offset() {
            let r = idx - self.bias_offset();
            format!("hidden_biases[{}][{}]", r / n, r % n)
        } else {
            let r = idx - self.output_offset();
            match self.mode {
                OutputMode::Scalar => format!("output_weights[{r}]"),
                OutputMode::Vector => format!("output_weights[{}][{}]", r / n, r % n),
            }
        }
    }
}

/// Scratch buffers for the raw forward/backward kernels.
#[derive(Debug, Clone)]
pub struct Workspace {
    pre: Vec<f64>,
    hidden: Vec<f64>,
    grad_out: Vec<f64>,
    grad_pre: Vec<f64>,
    output: Vec<f64>,
}

/// A single-hidden-layer V-MLP.
#[derive(Debug, Clone)]
pub struct VMlp {
    algebra: Algebra,
    layout: Layout,
    activation: SplitActivation,
    params: Vec<f64>,
}

/// Partial derivatives of the loss, in the same flat layout as [`VMlp`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    layout: Layout,
    data: Vec<f64>,
}

impl Gradients {
    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn hidden_weights(&self) -> &[f64] {
        &self.data[..self.layout.bias_offset()]
    }

    pub fn hidden_biases(&self) -> &[f64] {
        &self.data[self.layout.bias_offset()..self.layout.output_offset()]
    }

    pub fn output_weights(&self) -> &[f64] {
        &self.data[self.layout.output_offset()..]
    }
}

impl VMlp {
    /// A network with every parameter zero.
    pub fn new(
        algebra: &Algebra,
        n_inputs: usize,
        n_hidden: usize,
        mode: OutputMode,
        activation: SplitActivation,
    ) -> Result<Self> {
        if n_inputs == 0 || n_hidden == 0 {
            return Err(Error::Validation(format!(
                "a V-MLP needs at least one input and one hidden unit, got N={n_inputs}, M={n_hidden}"
            )));
        }
        let layout = Layout {
            dim: algebra.dim(),
            n_inputs,
            n_hidden,
            mode,
        };
        Ok(VMlp {
            algebra: algebra.clone(),
            layout,
            activation,
            params: vec![0.0; layout.len()],
        })
    }

    /// Builds a network around an existing flat parameter vector.
    pub fn from_params(
        algebra: &Algebra,
        n_inputs: usize,
        n_hidden: usize,
        mode: OutputMode,
        activation: SplitActivation,
        params: Vec<f64>,
    ) -> Result<Self> {
        let mut net = Self::new(algebra, n_inputs, n_hidden, mode, activation)?;
        if params.len() != net.layout.len() {
            return Err(Error::Dimension(format!(
                "network needs {} parameters, got {}",
                net.layout.len(),
                params.len()
            )));
        }
        if let Some(idx) = params.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(net.layout.param_name(idx)));
        }
        net.params = params;
        Ok(net)
    }

    /// Glorot-style uniform initialization over the real coefficients.
    ///
    /// Hidden weight coefficients are uniform in `±sqrt(6 / (nN + nM))`,
    /// output weights (or their coefficients) in `±sqrt(6 / (M + n))`, and
    /// biases start at zero.
    pub fn init(
        algebra: &Algebra,
        n_inputs: usize,
        n_hidden: usize,
        mode: OutputMode,
        activation: SplitActivation,
        seed: u64,
    ) -> Result<Self> {
        let mut net = Self::new(algebra, n_inputs, n_hidden, mode, activation)?;
        let (w_bound, o_bound) = Self::init_bounds(algebra.dim(), n_inputs, n_hidden);
        let mut r = rng::stream(seed, Stream::Init);
        let l = net.layout;
        for v in &mut net.params[..l.bias_offset()] {
            *v = rng::symmetric(&mut r, w_bound);
        }
        for v in &mut net.params[l.output_offset()..] {
            *v = rng::symmetric(&mut r, o_bound);
        }
        Ok(net)
    }

    /// `(hidden weight bound, output weight bound)` used by [`VMlp::init`].
    pub fn init_bounds(dim: usize, n_inputs: usize, n_hidden: usize) -> (f64, f64) {
        let (n, nin, m) = (dim as f64, n_inputs as f64, n_hidden as f64);
        (
            libm::sqrt(6.0 / (n * nin + n * m)),
            libm::sqrt(6.0 / (m + n)),
        )
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn n_inputs(&self) -> usize {
        self.layout.n_inputs
    }

    pub fn n_hidden(&self) -> usize {
        self.layout.n_hidden
    }

    pub fn output_mode(&self) -> OutputMode {
        self.layout.mode
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

    pub fn hidden_weights(&self) -> &[f64] {
        &self.params[..self.layout.bias_offset()]
    }

    pub fn hidden_biases(&self) -> &[f64] {
        &self.params[self.layout.bias_offset()..self.layout.output_offset()]
    }

    pub fn output_weights(&self) -> &[f64] {
        &self.params[self.layout.output_offset()..]
    }

    fn check_unit(&self, i: usize) -> Result<()> {
        if i >= self.layout.n_hidden {
            return Err(Error::Index {
                index: i,
                bound: self.layout.n_hidden,
            });
        }
        Ok(())
    }

    fn weight_range(&self, i: usize, j: usize) -> core::ops::Range<usize> {
        let n = self.layout.dim;
        let start = (i * self.layout.n_inputs + j) * n;
        start..start + n
    }

    fn element_in(&self, e: &Element) -> Result<()> {
        if !e.algebra().same_structure(&self.algebra) {
            return Err(Error::AlgebraMismatch);
        }
        Ok(())
    }

    pub fn hidden_weight(&self, i: usize, j: usize) -> Result<Element> {
        self.check_unit(i)?;
        if j >= self.layout.n_inputs {
            return Err(Error::Index {
                index: j,
                bound: self.layout.n_inputs,
            });
        }
        Element::new(&self.algebra, self.params[self.weight_range(i, j)].to_vec())
    }

    pub fn set_hidden_weight(&mut self, i: usize, j: usize, w: &Element) -> Result<()> {
        self.check_unit(i)?;
        if j >= self.layout.n_inputs {
            return Err(Error::Index {
                index: j,
                bound: self.layout.n_inputs,
            });
        }
        self.element_in(w)?;
        let r = self.weight_range(i, j);
        self.params[r].copy_from_slice(w.coeffs());
        Ok(())
    }

    pub fn hidden_bias(&self, i: usize) -> Result<Element> {
        self.check_unit(i)?;
        let start = self.layout.bias_offset() + i * self.layout.dim;
        Element::new(
            &self.algebra,
            self.params[start..start + self.layout.dim].to_vec(),
        )
    }

    pub fn set_hidden_bias(&mut self, i: usize, b: &Element) -> Result<()> {
        self.check_unit(i)?;
        self.element_in(b)?;
        let start = self.layout.bias_offset() + i * self.layout.dim;
        self.params[start..start + self.layout.dim].copy_from_slice(b.coeffs());
        Ok(())
    }

    /// Output weight of unit `i` in scalar mode.
    pub fn output_scalar(&self, i: usize) -> Result<f64> {
        self.check_unit(i)?;
        match self.layout.mode {
            OutputMode::Scalar => Ok(self.params[self.layout.output_offset() + i]),
            OutputMode::Vector => Err(Error::Validation(
                "network has vector output weights".into(),
            )),
        }
    }

    pub fn set_output_scalar(&mut self, i: usize, alpha: f64) -> Result<()> {
        self.check_unit(i)?;
        match self.layout.mode {
            OutputMode::Scalar => {
                let o = self.layout.output_offset();
                self.params[o + i] = alpha;
                Ok(())
            }
            OutputMode::Vector => Err(Error::Validation(
                "network has vector output weights".into(),
            )),
        }
    }

    /// Output weight of unit `i` in vector mode.
    pub fn output_element(&self, i: usize) -> Result<Element> {
        self.check_unit(i)?;
        match self.layout.mode {
            OutputMode::Vector => {
                let start = self.layout.output_offset() + i * self.layout.dim;
                Element::new(
                    &self.algebra,
                    self.params[start..start + self.layout.dim].to_vec(),
                )
            }
            OutputMode::Scalar => Err(Error::Validation(
                "network has scalar output weights".into(),
            )),
        }
    }

    pub fn set_output_element(&mut self, i: usize, alpha: &Element) -> Result<()> {
        self.check_unit(i)?;
        self.element_in(alpha)?;
        match self.layout.mode {
            OutputMode::Vector => {
                let start = self.layout.output_offset() + i * self.layout.dim;
                self.params[start..start + self.layout.dim].copy_from_slice(alpha.coeffs());
                Ok(())
            }
            OutputMode::Scalar => Err(Error::Validation(
                "network has scalar output weights".into(),
            )),
        }
    }

    /// Vector output weights only carry the approximation guarantee when the
    /// algebra has an identity. Returns a warning message otherwise.
    pub fn vector_mode_warning(&self) -> Option<String> {
        if self.layout.mode == OutputMode::Vector
            && self.algebra.find_identity(IDENTITY_TOL).is_none()
        {
            Some(format!(
                "algebra {} has no identity; vector output weights may not approximate arbitrary targets",
                self.algebra.name().unwrap_or("<unnamed>")
            ))
        } else {
            None
        }
    }

    pub fn workspace(&self) -> Workspace {
        let m = self.layout.n_hidden * self.layout.dim;
        Workspace {
            pre: vec![0.0; m],
            hidden: vec![0.0; m],
            grad_out: vec![0.0; self.layout.dim],
            grad_pre: vec![0.0; m],
            output: vec![0.0; self.layout.dim],
        }
    }

    fn flatten_inputs(&self, xs: &[Element]) -> Result<Vec<f64>> {
        if xs.len() != self.layout.n_inputs {
            return Err(Error::Dimension(format!(
                "network takes {} inputs, got {}",
                self.layout.n_inputs,
                xs.len()
            )));
        }
        let mut flat = Vec::with_capacity(self.layout.n_inputs * self.layout.dim);
        for x in xs {
            self.element_in(x)?;
            flat.extend_from_slice(x.coeffs());
        }
        Ok(flat)
    }

    pub fn forward(&self, xs: &[Element]) -> Result<Element> {
        let flat = self.flatten_inputs(xs)?;
        let mut ws = self.workspace();
        let mut out = vec![0.0; self.layout.dim];
        self.forward_raw(&flat, &mut out, &mut ws);
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("network output".into()));
        }
        Element::new(&self.algebra, out)
    }

    /// Forward pass on a flat input of length `nN`; hidden state stays in `ws`.
    pub fn forward_raw(&self, x: &[f64], out: &mut [f64], ws: &mut Workspace) {
        let l = self.layout;
        let n = l.dim;
        let terms = self.algebra.terms();
        let weights = self.hidden_weights();
        let biases = self.hidden_biases();
        for i in 0..l.n_hidden {
            let s = &mut ws.pre[i * n..(i + 1) * n];
            s.copy_from_slice(&biases[i * n..(i + 1) * n]);
            for j in 0..l.n_inputs {
                let w = &weights[(i * l.n_inputs + j) * n..(i * l.n_inputs + j + 1) * n];
                let xj = &x[j * n..(j + 1) * n];
                for t in terms {
                    s[t.out] += w[t.left] * xj[t.right] * t.coeff;
                }
            }
            for c in 0..n {
                ws.hidden[i * n + c] = self.activation.apply_scalar(s[c]);
            }
        }
        out.iter_mut().for_each(|v| *v = 0.0);
        let alphas = self.output_weights();
        match l.mode {
            OutputMode::Scalar => {
                for i in 0..l.n_hidden {
                    let a = alphas[i];
                    for c in 0..n {
                        out[c] += a * ws.hidden[i * n + c];
                    }
                }
            }
            OutputMode::Vector => {
                for i in 0..l.n_hidden {
                    let a = &alphas[i * n..(i + 1) * n];
                    let h = &ws.hidden[i * n..(i + 1) * n];
                    for t in terms {
                        out[t.out] += a[t.left] * h[t.right] * t.coeff;
                    }
                }
            }
        }
    }

    /// Adds `scale · ∂loss/∂θ` into `grad` for one sample and returns the
    /// unscaled loss `|y − target|²`.
    ///
    /// Through a product coordinate `z_k = φ(u)ᵀ B_k φ(v)` the chain rule uses
    /// `∂z_k/∂φ(u) = B_k φ(v)` and `∂z_k/∂φ(v) = B_kᵀ φ(u)`; both are walked
    /// term by term over the nonzero structure constants.
    pub fn accumulate_gradient(
        &self,
        x: &[f64],
        target: &[f64],
        scale: f64,
        grad: &mut [f64],
        ws: &mut Workspace,
    ) -> f64 {
        let l = self.layout;
        let n = l.dim;
        let terms = self.algebra.terms();
        let mut out = core::mem::take(&mut ws.output);
        self.forward_raw(x, &mut out, ws);
        let mut loss = 0.0;
        for c in 0..n {
            let e = out[c] - target[c];
            loss += e * e;
            ws.grad_out[c] = 2.0 * e * scale;
        }
        ws.output = out;

        let (gw, rest) = grad.split_at_mut(l.bias_offset());
        let (gb, go) = rest.split_at_mut(l.hidden_biases_len());
        let alphas = self.output_weights();
        let gy = &ws.grad_out;
        ws.grad_pre.iter_mut().for_each(|v| *v = 0.0);
        match l.mode {
            OutputMode::Scalar => {
                for i in 0..l.n_hidden {
                    let h = &ws.hidden[i * n..(i + 1) * n];
                    go[i] += h.iter().zip(gy).map(|(a, b)| a * b).sum::<f64>();
                    let a = alphas[i];
                    for c in 0..n {
                        ws.grad_pre[i * n + c] = a * gy[c];
                    }
                }
            }
            OutputMode::Vector => {
                for i in 0..l.n_hidden {
                    let a = &alphas[i * n..(i + 1) * n];
                    let h = &ws.hidden[i * n..(i + 1) * n];
                    let ga = &mut go[i * n..(i + 1) * n];
                    let gh = &mut ws.grad_pre[i * n..(i + 1) * n];
                    for t in terms {
                        let g = gy[t.out] * t.coeff;
                        ga[t.left] += g * h[t.right];
                        gh[t.right] += g * a[t.left];
                    }
                }
            }
        }
        // through the activation; grad_pre now holds ∂/∂s
        for (g, &s) in ws.grad_pre.iter_mut().zip(&ws.pre) {
            *g *= self.activation.derivative(s);
        }
        for i in 0..l.n_hidden {
            let gs = &ws.grad_pre[i * n..(i + 1) * n];
            for c in 0..n {
                gb[i * n + c] += gs[c];
            }
            for j in 0..l.n_inputs {
                let xj = &x[j * n..(j + 1) * n];
                let gwij = &mut gw[(i * l.n_inputs + j) * n..(i * l.n_inputs + j + 1) * n];
                for t in terms {
                    gwij[t.left] += gs[t.out] * xj[t.right] * t.coeff;
                }
            }
        }
        loss
    }

    /// Loss `|forward(xs) − target|²` and its exact gradient.
    pub fn backward(&self, xs: &[Element], target: &Element) -> Result<(f64, Gradients)> {
        let flat = self.flatten_inputs(xs)?;
        self.element_in(target)?;
        let mut ws = self.workspace();
        let mut data = vec![0.0; self.layout.len()];
        let loss = self.accumulate_gradient(&flat, target.coeffs(), 1.0, &mut data, &mut ws);
        if !loss.is_finite() {
            return Err(Error::Numeric("loss".into()));
        }
        if let Some(idx) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!(
                "gradient of {}",
                self.layout.param_name(idx)
            )));
        }
        Ok((
            loss,
            Gradients {
                layout: self.layout,
                data,
            },
        ))
    }
}
