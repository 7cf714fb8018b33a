//! On-disk formats: algebra JSON, network checkpoints, loss curves and
//! suite summaries.
//!
//! Algebra files look like
//!
//! ```json
//! {"dim": 2, "constants": [[[1, 0], [0, 1]], [[0, 1], [0, 0]]], "labels": ["1", "eps"], "name": "dual"}
//! ```
//!
//! where `constants[i][j][k]` is coordinate `k` of `e_i e_j`. `labels` and
//! `name` are optional.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use vnet_core::baseline::DenseMlp;
use vnet_core::{Algebra, EpochRecord, OutputMode, SplitActivation, VMlp};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub dim: usize,
    pub constants: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl AlgebraFile {
    pub fn from_algebra(a: &Algebra) -> Self {
        AlgebraFile {
            dim: a.dim(),
            constants: a.constants_nested(),
            labels: a.labels().map(<[String]>::to_vec),
            name: a.name().map(str::to_string),
        }
    }

    pub fn to_algebra(&self) -> Result<Algebra> {
        let a = Algebra::new(self.dim, &self.constants, self.labels.clone())?;
        Ok(match &self.name {
            Some(name) => a.with_name(name.clone()),
            None => a,
        })
    }
}

/// Parses an algebra document. `origin` names the source in error messages.
pub fn parse_algebra(text: &str, origin: &str) -> Result<Algebra> {
    let file: AlgebraFile = serde_json::from_str(text).map_err(|e| Error::json(origin, e))?;
    file.to_algebra()
}

pub fn algebra_to_json(a: &Algebra) -> String {
    serde_json::to_string_pretty(&AlgebraFile::from_algebra(a)).expect("algebra serializes")
}

pub fn load_algebra(path: &Path) -> Result<Algebra> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_algebra(&text, &path.display().to_string())
}

/// A trained network with everything needed to rebuild it.
///
/// V-MLP parameters are split into the same three groups as the flat
/// vector: hidden weights ordered by `(unit, input, coordinate)`, hidden
/// biases by `(unit, coordinate)`, output weights by unit (scalar mode) or
/// `(unit, coordinate)` (vector mode). Dense baselines store the flat
/// vector as is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Checkpoint {
    Vmlp {
        algebra: AlgebraFile,
        n_inputs: usize,
        n_hidden: usize,
        output_mode: String,
        activation: String,
        hidden_weights: Vec<f64>,
        hidden_biases: Vec<f64>,
        output_weights: Vec<f64>,
    },
    Dense {
        inputs: usize,
        hidden: usize,
        outputs: usize,
        activation: String,
        params: Vec<f64>,
    },
}

impl Checkpoint {
    pub fn from_vmlp(net: &VMlp) -> Self {
        Checkpoint::Vmlp {
            algebra: AlgebraFile::from_algebra(net.algebra()),
            n_inputs: net.n_inputs(),
            n_hidden: net.n_hidden(),
            output_mode: net.output_mode().to_string(),
            activation: net.activation().to_string(),
            hidden_weights: net.hidden_weights().to_vec(),
            hidden_biases: net.hidden_biases().to_vec(),
            output_weights: net.output_weights().to_vec(),
        }
    }

    pub fn from_dense(net: &DenseMlp) -> Self {
        Checkpoint::Dense {
            inputs: net.inputs(),
            hidden: net.hidden(),
            outputs: net.outputs(),
            activation: net.activation().to_string(),
            params: net.params().to_vec(),
        }
    }

    pub fn to_vmlp(&self) -> Result<VMlp> {
        let Checkpoint::Vmlp {
            algebra,
            n_inputs,
            n_hidden,
            output_mode,
            activation,
            hidden_weights,
            hidden_biases,
            output_weights,
        } = self
        else {
            return Err(Error::Format(
                "checkpoint holds a dense network, not a V-MLP".into(),
            ));
        };
        let mode: OutputMode = output_mode.parse()?;
        let act: SplitActivation = activation.parse()?;
        let params = [hidden_weights.as_slice(), hidden_biases, output_weights].concat();
        Ok(VMlp::from_params(
            &algebra.to_algebra()?,
            *n_inputs,
            *n_hidden,
            mode,
            act,
            params,
        )?)
    }

    pub fn to_dense(&self) -> Result<DenseMlp> {
        let Checkpoint::Dense {
            inputs,
            hidden,
            outputs,
            activation,
            params,
        } = self
        else {
            return Err(Error::Format(
                "checkpoint holds a V-MLP, not a dense network".into(),
            ));
        };
        let mut net = DenseMlp::new(*inputs, *hidden, *outputs, activation.parse()?)?;
        if params.len() != net.params().len() {
            return Err(Error::Format(format!(
                "dense checkpoint needs {} parameters, has {}",
                net.params().len(),
                params.len()
            )));
        }
        net.params_mut().copy_from_slice(params);
        Ok(net)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("checkpoint serializes")
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::json(origin, e))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }
}

/// `epoch,mse` CSV; values use 17 significant digits so they round-trip.
pub fn curve_to_csv(curve: &[EpochRecord]) -> String {
    let mut out = String::from("epoch,mse\n");
    for r in curve {
        writeln!(out, "{},{:.16e}", r.epoch, r.mse).unwrap();
    }
    out
}

pub fn parse_curve_csv(text: &str) -> Result<Vec<EpochRecord>> {
    let mut lines = text.lines();
    if lines.next() != Some("epoch,mse") {
        return Err(Error::Format(
            "curve CSV must start with the header 'epoch,mse'".into(),
        ));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = || Error::Format(format!("curve CSV line {}: cannot parse '{line}'", i + 2));
            let (epoch, mse) = line.split_once(',').ok_or_else(bad)?;
            Ok(EpochRecord {
                epoch: epoch.parse().map_err(|_| bad())?,
                mse: mse.parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

/// One entry of a suite summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub algebra: String,
    pub output_mode: String,
    pub seed: u64,
    pub final_mse: f64,
    pub min_mse: f64,
    /// Relative to the summary file's directory.
    pub curve_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub runs: Vec<RunSummary>,
}

impl SuiteSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::json(origin, e))
    }
}

/// Writes through a temporary sibling and renames it into place, so readers
/// never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::Format(format!("'{}' is not a file path", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}
