use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use vnet_core::algebra::{catalog, CATALOG_NAMES, IDENTITY_TOL};
use vnet_core::functional::{represent, verify_representation};
use vnet_core::numerics::DEFAULT_TOL;
use vnet_core::train::{self, Target};
use vnet_core::{
    Algebra, DegeneracyReport, LinearFunctional, OutputMode, SplitActivation, TrainConfig, VMlp,
};

use crate::error::{Error, Result};
use crate::formats::{algebra_to_json, curve_to_csv, load_algebra, write_atomic, Checkpoint};
use crate::suites::{self, Suite, BASELINE};

#[derive(Debug, Parser)]
#[command(
    name = "vnet",
    version,
    about = "Algebra-valued MLPs: algebra inspection, training and experiment suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inspect built-in or user-supplied algebras.
    #[command(subcommand)]
    Algebra(AlgebraCommand),
    /// Train one network and write its loss curve as CSV.
    Train(TrainArgs),
    /// Run a whole experiment suite.
    Repro(ReproArgs),
}

#[derive(Debug, Subcommand)]
enum AlgebraCommand {
    /// List the built-in algebras with their degeneracy status.
    List,
    /// Print the bilinear matrices and properties of a built-in algebra.
    Show {
        name: String,
        /// Print the algebra as a JSON document instead.
        #[arg(long)]
        json: bool,
    },
    /// Load an algebra JSON file and report its degeneracy.
    Check {
        #[arg(long)]
        file: PathBuf,
    },
    /// Write a real linear functional as one component of an algebra-weighted sum.
    Lemma1 {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        component: usize,
        /// Comma-separated coefficients, n per algebra-valued input.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        /// Random inputs used to verify the result.
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Built-in algebra name. `R` with a multi-dimensional target trains the dense real baseline.
    #[arg(long)]
    algebra: String,
    /// quad2d or quad4d; defaults to the one matching the algebra's dimension.
    #[arg(long)]
    target: Option<String>,
    #[arg(long, default_value = "scalar")]
    output_mode: String,
    #[arg(long, default_value = "relu")]
    activation: String,
    #[arg(long, default_value_t = 128)]
    hidden: usize,
    #[arg(long, default_value_t = 1000)]
    epochs: usize,
    #[arg(long, default_value_t = 1024)]
    samples: usize,
    #[arg(long, default_value_t = 64)]
    batch: usize,
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Curve CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Also save the trained network as JSON.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReproArgs {
    /// 2d-scalar, 2d-vector, 4d-scalar or 4d-vector.
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
    /// Override the number of epochs (default 1000).
    #[arg(long)]
    epochs: Option<usize>,
}

/// Runs the command line `argv` (program name first). Data goes to `out`,
/// diagnostics to `err`. Returns the process exit code.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match command {
        Command::Algebra(AlgebraCommand::List) => list(out),
        Command::Algebra(AlgebraCommand::Show { name, json }) => {
            let a = catalog(&name)?;
            if json {
                writeln!(out, "{}", algebra_to_json(&a)).map_err(stdout_err)
            } else {
                show(&a, out)
            }
        }
        Command::Algebra(AlgebraCommand::Check { file }) => {
            let a = load_algebra(&file)?;
            describe(&a, out)
        }
        Command::Algebra(AlgebraCommand::Lemma1 {
            algebra,
            component,
            coeffs,
            samples,
            seed,
        }) => lemma1(&catalog(&algebra)?, component, &coeffs, samples, seed, out),
        Command::Train(args) => train_cmd(args, out, err),
        Command::Repro(args) => repro(args, out, err),
    }
}

fn stdout_err(e: std::io::Error) -> Error {
    Error::io("<output>", e)
}

fn list(out: &mut dyn Write) -> Result<()> {
    writeln!(
        out,
        "{:<4} {:>3}  {:<14} {:<10} identity",
        "name", "dim", "status", "singular"
    )
    .map_err(stdout_err)?;
    for name in CATALOG_NAMES {
        let a = catalog(name)?;
        let report = a.degeneracy(DEFAULT_TOL)?;
        writeln!(
            out,
            "{:<4} {:>3}  {:<14} {:<10} {}",
            name,
            a.dim(),
            status(&report),
            components(&report.singular_components()),
            if a.find_identity(IDENTITY_TOL).is_some() {
                "yes"
            } else {
                "no"
            }
        )
        .map_err(stdout_err)?;
    }
    Ok(())
}

fn status(report: &DegeneracyReport) -> &'static str {
    if report.overall_nondegenerate {
        "non-degenerate"
    } else {
        "degenerate"
    }
}

fn components(ks: &[usize]) -> String {
    if ks.is_empty() {
        "-".into()
    } else {
        ks.iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn describe(a: &Algebra, out: &mut dyn Write) -> Result<()> {
    let report = a.degeneracy(DEFAULT_TOL)?;
    let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(stdout_err);
    w(out, format!("algebra: {}", a.name().unwrap_or("<unnamed>")))?;
    w(out, format!("dim: {}", a.dim()))?;
    for c in &report.per_component {
        w(
            out,
            format!(
                "component {} ({}): rank {}, |det| {:.6e}, {}",
                c.k,
                a.label(c.k),
                c.rank,
                c.abs_det,
                if c.singular {
                    "singular"
                } else {
                    "non-singular"
                }
            ),
        )?;
    }
    w(out, format!("status: {}", status(&report)))?;
    if !report.overall_nondegenerate {
        w(
            out,
            format!(
                "singular components: {}",
                components(&report.singular_components())
            ),
        )?;
    }
    match a.find_identity(IDENTITY_TOL) {
        Some(one) => w(out, format!("identity: {one}")),
        None => w(out, "identity: none".into()),
    }
}

fn show(a: &Algebra, out: &mut dyn Write) -> Result<()> {
    describe(a, out)?;
    for k in 0..a.dim() {
        let b = a.bilinear_matrix(k)?;
        writeln!(out, "B{k}:").map_err(stdout_err)?;
        for i in 0..a.dim() {
            let row: Vec<String> = (0..a.dim())
                .map(|j| format!("{:>4}", b.entry(i, j)))
                .collect();
            writeln!(out, "  [{}]", row.join(" ")).map_err(stdout_err)?;
        }
    }
    Ok(())
}

fn parse_coeffs(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim().parse::<f64>().map_err(|_| {
                Error::Core(vnet_core::Error::Validation(format!(
                    "'{s}' is not a number"
                )))
            })
        })
        .collect()
}

fn lemma1(
    a: &Algebra,
    component: usize,
    coeffs: &str,
    samples: usize,
    seed: u64,
    out: &mut dyn Write,
) -> Result<()> {
    let l = LinearFunctional::from_flat(a.dim(), &parse_coeffs(coeffs)?)?;
    let rep = represent(a, component, &l)?;
    let deviation = verify_representation(a, &rep, &l, samples, seed)?;
    for (j, y) in rep.ys.iter().enumerate() {
        writeln!(out, "y{j} = {y}").map_err(stdout_err)?;
    }
    writeln!(
        out,
        "method: {}",
        if rep.least_squares {
            "least squares (singular form)"
        } else {
            "exact solve"
        }
    )
    .map_err(stdout_err)?;
    writeln!(out, "residual: {:.6e}", rep.residual).map_err(stdout_err)?;
    writeln!(out, "max deviation over {samples} samples: {deviation:.6e}").map_err(stdout_err)?;
    writeln!(
        out,
        "representable: {}",
        if rep.is_exact(1e-9) { "yes" } else { "no" }
    )
    .map_err(stdout_err)
}

fn train_cmd(args: TrainArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let algebra = catalog(&args.algebra)?;
    let target: Target = match &args.target {
        Some(t) => t.parse()?,
        None => match algebra.dim() {
            2 => Target::Quad2d,
            4 => Target::Quad4d,
            n => {
                return Err(vnet_core::Error::Validation(format!(
                    "no default target for a {n}-dimensional algebra; pass --target"
                ))
                .into())
            }
        },
    };
    let mut config = TrainConfig::new(target);
    config.output_mode = args.output_mode.parse::<OutputMode>()?;
    config.activation = args.activation.parse::<SplitActivation>()?;
    config.hidden = args.hidden;
    config.epochs = args.epochs;
    config.samples = args.samples;
    config.batch = args.batch;
    config.lr = args.lr;
    config.seed = args.seed;

    let (curve, checkpoint) = if args.algebra == BASELINE && target.dim() != 1 {
        let (net, curve) = train::train_baseline(&config)?;
        (curve, Checkpoint::from_dense(&net))
    } else {
        if let Some(w) =
            VMlp::new(&algebra, 1, 1, config.output_mode, config.activation)?.vector_mode_warning()
        {
            writeln!(err, "warning: {w}").map_err(stdout_err)?;
        }
        let (net, curve) = train::train(&algebra, &config)?;
        (curve, Checkpoint::from_vmlp(&net))
    };
    write_atomic(&args.out, curve_to_csv(&curve).as_bytes())?;
    if let Some(path) = &args.checkpoint {
        checkpoint.save(path)?;
    }
    let summary = suites::summarize(
        &args.algebra,
        &config,
        &curve,
        args.out.display().to_string(),
    );
    writeln!(
        out,
        "{} {} seed {}: final_mse {:.6e}, min_mse {:.6e}",
        summary.algebra, summary.output_mode, summary.seed, summary.final_mse, summary.min_mse
    )
    .map_err(stdout_err)
}

fn repro(args: ReproArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let suite: Suite = args.suite.parse()?;
    suites::run_suite(suite, args.seed, args.epochs, &args.out_dir, |run| {
        let _ = writeln!(
            err,
            "{} {}: final_mse {:.6e}, min_mse {:.6e}",
            suite, run.algebra, run.final_mse, run.min_mse
        );
    })?;
    writeln!(
        out,
        "{}",
        args.out_dir
            .join(suites::summary_file_name(suite, args.seed))
            .display()
    )
    .map_err(stdout_err)
}
