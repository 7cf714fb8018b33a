//! Target functions, datasets, MSE, Adam and the training loop.
//!
//! MSE is averaged over samples *and* output coordinates,
//! `Σ_s |y_s − t_s|² / (S · n)`, so curves over algebras of different
//! dimension are on the same per-coordinate scale. The per-sample loss used
//! by [`VMlp::backward`] is the plain squared norm; training rescales it by
//! `1 / (batch · n)`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;

use crate::algebra::{Algebra, Element};
use crate::baseline::{DenseMlp, DenseWorkspace};
use crate::error::{Error, Result};
use crate::rng::{self, Stream};
use crate::vnet::{OutputMode, SplitActivation, VMlp, Workspace};

/// The quadratic test functions on `[-1, 1]^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// `(ξ0² − ξ1²) e0 + (ξ0² + ξ0ξ1 + ξ1²) e1`
    Quad2d,
    /// component `k`: `ξ_k² + ξ_{k+1} ξ_{k+2} + ξ_{k+3}²`, indices mod 4
    Quad4d,
}

impl Target {
    pub fn dim(self) -> usize {
        match self {
            Target::Quad2d => 2,
            Target::Quad4d => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Target::Quad2d => "quad2d",
            Target::Quad4d => "quad4d",
        }
    }

    /// Evaluates on raw coefficients; `x.len()` must equal [`Target::dim`].
    pub fn eval_raw(self, x: &[f64], out: &mut [f64]) {
        match self {
            Target::Quad2d => {
                let (a, b) = (x[0], x[1]);
                out[0] = a * a - b * b;
                out[1] = a * a + a * b + b * b;
            }
            Target::Quad4d => {
                for k in 0..4 {
                    let (x0, x1, x2, x3) = (x[k], x[(k + 1) % 4], x[(k + 2) % 4], x[(k + 3) % 4]);
                    out[k] = x0 * x0 + x1 * x2 + x3 * x3;
                }
            }
        }
    }

    pub fn eval(self, x: &Element) -> Result<Element> {
        if x.algebra().dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "{} needs a {}-dimensional algebra, got dimension {}",
                self.as_str(),
                self.dim(),
                x.algebra().dim()
            )));
        }
        let mut out = vec![0.0; self.dim()];
        self.eval_raw(x.coeffs(), &mut out);
        Element::new(x.algebra(), out)
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quad2d" => Ok(Target::Quad2d),
            "quad4d" => Ok(Target::Quad4d),
            _ => Err(Error::Validation(format!(
                "unknown target '{s}' (quad2d, quad4d)"
            ))),
        }
    }
}

/// Evaluates a target by name.
pub fn eval_target(name: &str, x: &Element) -> Result<Element> {
    name.parse::<Target>()?.eval(x)
}

/// Flat input/target arrays; what the training loop consumes.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub input_len: usize,
    pub output_len: usize,
    pub inputs: Vec<f64>,
    pub targets: Vec<f64>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.inputs.len() / self.input_len
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input(&self, s: usize) -> &[f64] {
        &self.inputs[s * self.input_len..(s + 1) * self.input_len]
    }

    pub fn target(&self, s: usize) -> &[f64] {
        &self.targets[s * self.output_len..(s + 1) * self.output_len]
    }
}

/// `count` inputs with i.i.d. uniform `[-1, 1]` coefficients and their targets.
pub fn gen_samples(target: Target, count: usize, seed: u64) -> Result<SampleSet> {
    if count == 0 {
        return Err(Error::Validation(
            "dataset needs at least one sample".into(),
        ));
    }
    let n = target.dim();
    let mut r = rng::stream(seed, Stream::Dataset);
    let inputs: Vec<f64> = (0..count * n)
        .map(|_| rng::symmetric(&mut r, 1.0))
        .collect();
    let mut targets = vec![0.0; count * n];
    for (x, t) in inputs.chunks(n).zip(targets.chunks_mut(n)) {
        target.eval_raw(x, t);
    }
    Ok(SampleSet {
        input_len: n,
        output_len: n,
        inputs,
        targets,
    })
}

/// Paired `(input, target)` elements over one algebra.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub algebra: Algebra,
    pub target: Target,
    pub seed: u64,
    pub samples: Vec<(Element, Element)>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn to_sample_set(&self) -> SampleSet {
        let n = self.algebra.dim();
        let mut inputs = Vec::with_capacity(self.len() * n);
        let mut targets = Vec::with_capacity(self.len() * n);
        for (x, t) in &self.samples {
            inputs.extend_from_slice(x.coeffs());
            targets.extend_from_slice(t.coeffs());
        }
        SampleSet {
            input_len: n,
            output_len: n,
            inputs,
            targets,
        }
    }
}

pub fn gen_dataset(algebra: &Algebra, target: Target, count: usize, seed: u64) -> Result<Dataset> {
    if algebra.dim() != target.dim() {
        return Err(Error::Dimension(format!(
            "{target} needs a {}-dimensional algebra, got dimension {}",
            target.dim(),
            algebra.dim()
        )));
    }
    let set = gen_samples(target, count, seed)?;
    let samples = (0..set.len())
        .map(|s| {
            Ok((
                Element::new(algebra, set.input(s).to_vec())?,
                Element::new(algebra, set.target(s).to_vec())?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        algebra: algebra.clone(),
        target,
        seed,
        samples,
    })
}

/// A model the training loop can drive.
pub trait Model {
    type Workspace;

    fn input_len(&self) -> usize;
    fn output_len(&self) -> usize;
    fn params(&self) -> &[f64];
    fn params_mut(&mut self) -> &mut [f64];
    fn param_name(&self, idx: usize) -> String;
    fn workspace(&self) -> Self::Workspace;
    fn predict(&self, x: &[f64], out: &mut [f64], ws: &mut Self::Workspace);
    /// Adds `scale · ∂loss/∂θ` into `grad`, returns the squared-norm loss.
    fn accumulate_gradient(
        &self,
        x: &[f64],
        t: &[f64],
        scale: f64,
        grad: &mut [f64],
        ws: &mut Self::Workspace,
    ) -> f64;
}

impl Model for VMlp {
    type Workspace = Workspace;

    fn input_len(&self) -> usize {
        self.n_inputs() * self.algebra().dim()
    }

    fn output_len(&self) -> usize {
        self.algebra().dim()
    }

    fn params(&self) -> &[f64] {
        VMlp::params(self)
    }

    fn params_mut(&mut self) -> &mut [f64] {
        VMlp::params_mut(self)
    }

    fn param_name(&self, idx: usize) -> String {
        self.layout().param_name(idx)
    }

    fn workspace(&self) -> Workspace {
        VMlp::workspace(self)
    }

    fn predict(&self, x: &[f64], out: &mut [f64], ws: &mut Workspace) {
        self.forward_raw(x, out, ws)
    }

    fn accumulate_gradient(
        &self,
        x: &[f64],
        t: &[f64],
        scale: f64,
        grad: &mut [f64],
        ws: &mut Workspace,
    ) -> f64 {
        VMlp::accumulate_gradient(self, x, t, scale, grad, ws)
    }
}

impl Model for DenseMlp {
    type Workspace = DenseWorkspace;

    fn input_len(&self) -> usize {
        self.inputs()
    }

    fn output_len(&self) -> usize {
        self.outputs()
    }

    fn params(&self) -> &[f64] {
        DenseMlp::params(self)
    }

    fn params_mut(&mut self) -> &mut [f64] {
        DenseMlp::params_mut(self)
    }

    fn param_name(&self, idx: usize) -> String {
        DenseMlp::param_name(self, idx)
    }

    fn workspace(&self) -> DenseWorkspace {
        DenseMlp::workspace(self)
    }

    fn predict(&self, x: &[f64], out: &mut [f64], ws: &mut DenseWorkspace) {
        self.forward_raw(x, out, ws)
    }

    fn accumulate_gradient(
        &self,
        x: &[f64],
        t: &[f64],
        scale: f64,
        grad: &mut [f64],
        ws: &mut DenseWorkspace,
    ) -> f64 {
        DenseMlp::accumulate_gradient(self, x, t, scale, grad, ws)
    }
}

/// Mean over samples and coordinates of the squared error.
pub fn mse_raw<M: Model>(model: &M, set: &SampleSet) -> Result<f64> {
    if set.input_len != model.input_len() || set.output_len != model.output_len() {
        return Err(Error::Dimension(format!(
            "model maps {} -> {} values, dataset has {} -> {}",
            model.input_len(),
            model.output_len(),
            set.input_len,
            set.output_len
        )));
    }
    if set.is_empty() {
        return Err(Error::Validation("empty dataset".into()));
    }
    let mut ws = model.workspace();
    let mut out = vec![0.0; set.output_len];
    let mut total = 0.0;
    for s in 0..set.len() {
        model.predict(set.input(s), &mut out, &mut ws);
        total += out
            .iter()
            .zip(set.target(s))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>();
    }
    Ok(total / (set.len() * set.output_len) as f64)
}

pub fn mse(net: &VMlp, ds: &Dataset) -> Result<f64> {
    if !net.algebra().same_structure(&ds.algebra) {
        return Err(Error::AlgebraMismatch);
    }
    if net.n_inputs() != 1 {
        return Err(Error::Dimension(format!(
            "dataset has one input per sample, network takes {}",
            net.n_inputs()
        )));
    }
    mse_raw(net, &ds.to_sample_set())
}

/// Adam optimizer state with bias correction.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub step: u64,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    /// `β1 = 0.9`, `β2 = 0.999`, `ε = 1e-8`.
    pub fn new(len: usize, lr: f64) -> Self {
        AdamState {
            step: 0,
            m: vec![0.0; len],
            v: vec![0.0; len],
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    /// One update. On a non-finite gradient or result, returns the index of
    /// the offending parameter and leaves `params` and the state untouched.
    pub fn update(&mut self, params: &mut [f64], grads: &[f64]) -> core::result::Result<(), usize> {
        assert_eq!(
            params.len(),
            self.m.len(),
            "parameter count changed under the optimizer"
        );
        assert_eq!(
            grads.len(),
            self.m.len(),
            "gradient count does not match parameters"
        );
        if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
            return Err(i);
        }
        let t = self.step + 1;
        let c1 = 1.0 - libm::pow(self.beta1, t as f64);
        let c2 = 1.0 - libm::pow(self.beta2, t as f64);
        let step = |m: f64, v: f64| self.lr * (m / c1) / (libm::sqrt(v / c2) + self.eps);
        for i in 0..params.len() {
            let m = self.beta1 * self.m[i] + (1.0 - self.beta1) * grads[i];
            let v = self.beta2 * self.v[i] + (1.0 - self.beta2) * grads[i] * grads[i];
            if !(params[i] - step(m, v)).is_finite() {
                return Err(i);
            }
        }
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grads[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grads[i] * grads[i];
            params[i] -= step(self.m[i], self.v[i]);
        }
        self.step = t;
        Ok(())
    }
}

/// One Adam step on a flat parameter view.
pub fn adam_step(state: &mut AdamState, params: &mut [f64], grads: &[f64]) -> Result<()> {
    if params.len() != state.m.len() || grads.len() != state.m.len() {
        return Err(Error::Dimension(format!(
            "optimizer tracks {} parameters, got {} parameters and {} gradients",
            state.m.len(),
            params.len(),
            grads.len()
        )));
    }
    state
        .update(params, grads)
        .map_err(|i| Error::Numeric(format!("Adam update of parameter {i}")))
}

/// Full-dataset MSE after an epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    pub mse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub target: Target,
    pub hidden: usize,
    pub output_mode: OutputMode,
    pub activation: SplitActivation,
    pub samples: usize,
    pub epochs: usize,
    pub batch: usize,
    pub seed: u64,
    pub lr: f64,
}

impl TrainConfig {
    /// 128 split-relu hidden units, 1024 samples, 1000 epochs, batches of 64, lr 1e-3.
    pub fn new(target: Target) -> Self {
        TrainConfig {
            target,
            hidden: 128,
            output_mode: OutputMode::Scalar,
            activation: SplitActivation::Relu,
            samples: 1024,
            epochs: 1000,
            batch: 64,
            seed: 0,
            lr: 1e-3,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.hidden == 0 || self.samples == 0 || self.batch == 0 {
            return Err(Error::Validation(
                "hidden, samples and batch must be positive".into(),
            ));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::Validation(format!(
                "learning rate must be positive, got {}",
                self.lr
            )));
        }
        Ok(())
    }
}

/// Runs shuffled mini-batch Adam on `model` for `config.epochs` epochs and
/// records the full-dataset MSE after each one.
pub fn fit<M: Model>(
    model: &mut M,
    set: &SampleSet,
    config: &TrainConfig,
) -> Result<Vec<EpochRecord>> {
    config.validate()?;
    mse_raw(model, set)?;
    let mut shuffle = rng::stream(config.seed, Stream::Shuffle);
    let mut order: Vec<usize> = (0..set.len()).collect();
    let mut adam = AdamState::new(model.params().len(), config.lr);
    let mut grad = vec![0.0; model.params().len()];
    let mut ws = model.workspace();
    let mut curve = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        order.shuffle(&mut shuffle);
        for (b, batch) in order.chunks(config.batch).enumerate() {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let scale = 1.0 / (batch.len() * set.output_len) as f64;
            for &s in batch {
                model.accumulate_gradient(set.input(s), set.target(s), scale, &mut grad, &mut ws);
            }
            if let Err(i) = adam.update(model.params_mut(), &grad) {
                return Err(Error::Numeric(format!(
                    "epoch {epoch} batch {b}: update of {}",
                    model.param_name(i)
                )));
            }
        }
        let mse = mse_raw(model, set)?;
        if !mse.is_finite() {
            return Err(Error::Numeric(format!("epoch {epoch}: dataset MSE")));
        }
        curve.push(EpochRecord { epoch, mse });
    }
    Ok(curve)
}

/// Trains a single-input V-MLP on `config.target` over `algebra`.
pub fn train(algebra: &Algebra, config: &TrainConfig) -> Result<(VMlp, Vec<EpochRecord>)> {
    config.validate()?;
    if algebra.dim() != config.target.dim() {
        return Err(Error::Dimension(format!(
            "{} needs a {}-dimensional algebra, got dimension {}",
            config.target,
            config.target.dim(),
            algebra.dim()
        )));
    }
    let set = gen_samples(config.target, config.samples, config.seed)?;
    let mut net = VMlp::init(
        algebra,
        1,
        config.hidden,
        config.output_mode,
        config.activation,
        config.seed,
    )?;
    let curve = fit(&mut net, &set, config)?;
    Ok((net, curve))
}

/// Trains the dense real baseline on the flattened dataset of `config.target`
/// (same samples as [`train`] for the same seed). `output_mode` is ignored.
pub fn train_baseline(config: &TrainConfig) -> Result<(DenseMlp, Vec<EpochRecord>)> {
    config.validate()?;
    let set = gen_samples(config.target, config.samples, config.seed)?;
    let n = config.target.dim();
    let mut net = DenseMlp::init(n, config.hidden, n, config.activation, config.seed)?;
    let curve = fit(&mut net, &set, config)?;
    Ok((net, curve))
}
