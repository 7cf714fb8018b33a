//! The four quadratic-fitting experiment suites.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use vnet_core::algebra::catalog;
use vnet_core::train::{self, Target};
use vnet_core::{EpochRecord, OutputMode, TrainConfig};

use crate::error::{Error, Result};
use crate::formats::{curve_to_csv, write_atomic, RunSummary, SuiteSummary};

/// Name under which the dense real baseline appears in summaries.
pub const BASELINE: &str = "R";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Scalar2d,
    Vector2d,
    Scalar4d,
    Vector4d,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::Scalar2d,
        Suite::Vector2d,
        Suite::Scalar4d,
        Suite::Vector4d,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Suite::Scalar2d => "2d-scalar",
            Suite::Vector2d => "2d-vector",
            Suite::Scalar4d => "4d-scalar",
            Suite::Vector4d => "4d-vector",
        }
    }

    pub fn target(self) -> Target {
        match self {
            Suite::Scalar2d | Suite::Vector2d => Target::Quad2d,
            Suite::Scalar4d | Suite::Vector4d => Target::Quad4d,
        }
    }

    pub fn output_mode(self) -> OutputMode {
        match self {
            Suite::Scalar2d | Suite::Scalar4d => OutputMode::Scalar,
            Suite::Vector2d | Suite::Vector4d => OutputMode::Vector,
        }
    }

    /// Algebras trained as V-MLPs; the baseline runs in addition.
    pub fn algebras(self) -> &'static [&'static str] {
        match self {
            Suite::Scalar2d => &["A", "B", "C", "D", "E"],
            Suite::Vector2d => &["A", "C", "E"],
            Suite::Scalar4d | Suite::Vector4d => &["F", "G", "Q", "HQ", "DC"],
        }
    }

    pub fn config(self, seed: u64) -> TrainConfig {
        let mut c = TrainConfig::new(self.target());
        c.output_mode = self.output_mode();
        c.seed = seed;
        c
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.id() == s).ok_or_else(|| {
            let ids: Vec<_> = Suite::ALL.iter().map(|x| x.id()).collect();
            Error::Format(format!("unknown suite '{s}' (valid: {})", ids.join(", ")))
        })
    }
}

/// Trains one suite member. `algebra == BASELINE` selects the dense real
/// network on the flattened data.
pub fn run_one(algebra: &str, config: &TrainConfig) -> Result<Vec<EpochRecord>> {
    if algebra == BASELINE && config.target.dim() != 1 {
        return Ok(train::train_baseline(config)?.1);
    }
    Ok(train::train(&catalog(algebra)?, config)?.1)
}

pub fn curve_file_name(suite: Suite, algebra: &str, seed: u64) -> String {
    format!("{suite}_{algebra}_seed{seed}.csv")
}

pub fn summarize(
    algebra: &str,
    config: &TrainConfig,
    curve: &[EpochRecord],
    curve_file: String,
) -> RunSummary {
    RunSummary {
        algebra: algebra.to_string(),
        output_mode: config.output_mode.to_string(),
        seed: config.seed,
        final_mse: curve.last().map_or(f64::NAN, |r| r.mse),
        min_mse: curve.iter().map(|r| r.mse).fold(f64::INFINITY, f64::min),
        curve_file,
    }
}

/// Runs every member of `suite`, writing one curve CSV per run and
/// `<suite>_seed<seed>_summary.json` into `out_dir`. `progress` is called
/// after each finished run.
pub fn run_suite(
    suite: Suite,
    seed: u64,
    epochs: Option<usize>,
    out_dir: &Path,
    mut progress: impl FnMut(&RunSummary),
) -> Result<SuiteSummary> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut config = suite.config(seed);
    if let Some(e) = epochs {
        config.epochs = e;
    }
    let mut runs = Vec::new();
    for &name in suite.algebras().iter().chain(&[BASELINE]) {
        let curve = run_one(name, &config)?;
        let file = curve_file_name(suite, name, seed);
        write_atomic(&out_dir.join(&file), curve_to_csv(&curve).as_bytes())?;
        let summary = summarize(name, &config, &curve, file);
        progress(&summary);
        runs.push(summary);
    }
    let summary = SuiteSummary {
        suite: suite.id().to_string(),
        runs,
    };
    write_atomic(
        &out_dir.join(summary_file_name(suite, seed)),
        summary.to_json().as_bytes(),
    )?;
    Ok(summary)
}

pub fn summary_file_name(suite: Suite, seed: u64) -> String {
    format!("{suite}_seed{seed}_summary.json")
}
