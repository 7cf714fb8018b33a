//! Finite-dimensional real algebras described by structure constants, and
//! vector-valued multilayer perceptrons (V-MLPs) built on top of them.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! the experiment suites live in the `vnet` companion crate.
//!
//! Module map:
//!
//! - [`numerics`]: small dense LU / least-squares kernel and central differences.
//! - [`algebra`]: the [`Algebra`] type, [`Element`] arithmetic, degeneracy
//!   classification, identity search, basis change and the algebra builders
//!   (catalog, Clifford, Cayley–Dickson).
//! - [`functional`]: writing a real linear functional as a component
//!   projection of an algebra-weighted sum.
//! - [`vnet`]: split activations, the single-hidden-layer V-MLP, its
//!   gradients, initialization and the constructive assembly from per-component
//!   real networks.
//! - [`baseline`]: a plain dense real MLP used as a reference model.
//! - [`train`]: target functions, datasets, MSE, Adam and the training loop.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod algebra;
pub mod baseline;
mod error;
pub mod functional;
pub mod numerics;
pub mod rng;
pub mod train;
pub mod vnet;

pub use algebra::{Algebra, BilinearMatrix, ComponentReport, DegeneracyReport, Element};
pub use error::{Error, Result};
pub use functional::{LinearFunctional, Representation};
pub use numerics::{LuFactorization, Matrix};
pub use train::{EpochRecord, Target, TrainConfig};
pub use vnet::{Gradients, OutputMode, RealMlp, SplitActivation, VMlp};
