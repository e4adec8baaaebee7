use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use knudsen_core::{BcKind, CollisionModel, ProblemKind};

/// Slip and jump coefficients of linear moment models for Knudsen layers.
#[derive(Debug, Parser)]
#[command(name = "knudsen", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one configuration and report its coefficient.
    Run(RunArgs),
    /// Solve a range of moment orders.
    Sweep(SweepArgs),
    /// Re-execute the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    Kramers,
    ThermalSlip,
    TemperatureJump,
}

impl From<Problem> for ProblemKind {
    fn from(p: Problem) -> Self {
        match p {
            Problem::Kramers => ProblemKind::Kramers,
            Problem::ThermalSlip => ProblemKind::ThermalSlip,
            Problem::TemperatureJump => ProblemKind::TemperatureJump,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Bgk,
    Shakhov,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bc {
    New,
    Grad,
}

impl From<Bc> for BcKind {
    fn from(b: Bc) -> Self {
        match b {
            Bc::New => BcKind::NewMaxwell,
            Bc::Grad => BcKind::Grad,
        }
    }
}

/// Options shared by `run` and `sweep`.
#[derive(Clone, Debug, Args, Serialize, Deserialize, PartialEq)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub problem: Problem,

    #[arg(long, value_enum, default_value = "bgk")]
    pub model: Model,

    /// Prandtl number for the Shakhov model [default: 2/3]. BGK always uses 1.
    #[arg(long)]
    pub prandtl: Option<f64>,

    /// Accommodation coefficient in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub chi: f64,

    #[arg(long, value_enum, default_value = "new")]
    pub bc: Bc,

    /// Boundary drive (tangential stress or heat flux).
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub drive: f64,
}

impl ModelArgs {
    /// Collision model; the second value is a warning for an ignored flag.
    pub fn collision_model(&self) -> (CollisionModel, Option<String>) {
        match self.model {
            Model::Bgk => {
                let warning = self
                    .prandtl
                    .filter(|&p| p != 1.0)
                    .map(|p| format!("--prandtl {p} ignored: the BGK model has Pr = 1"));
                (CollisionModel::Bgk, warning)
            }
            Model::Shakhov => (
                CollisionModel::Shakhov {
                    prandtl: self.prandtl.unwrap_or(2.0 / 3.0),
                },
                None,
            ),
        }
    }
}

#[derive(Clone, Debug, Args, Serialize, Deserialize, PartialEq)]
pub struct RunArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: ModelArgs,

    /// Moment order M (at least 3).
    #[arg(long)]
    pub order: u32,

    /// Write the layer profile as CSV.
    #[arg(long)]
    pub profile: Option<PathBuf>,

    /// End of the profile in scaled units (mu*y or lambda*y).
    #[arg(long)]
    pub ymax: Option<f64>,

    #[arg(long, default_value_t = 200)]
    pub samples: usize,

    /// Write a JSON summary.
    #[arg(long)]
    pub json: Option<PathBuf>,

    /// Record the command, configuration and outputs for replay.
    #[arg(long)]
    #[serde(skip)]
    pub manifest: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize, PartialEq)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: ModelArgs,

    /// Orders as `start:step:stop` (inclusive) or a single order.
    #[arg(long)]
    pub orders: String,

    /// Reference coefficient; adds a log2 error column.
    #[arg(long)]
    pub reference: Option<f64>,

    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,

    #[arg(long)]
    #[serde(skip)]
    pub manifest: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,

    /// Write outputs into this directory, keeping the recorded file names.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Parses `start:step:stop` or a single order.
pub fn parse_orders(spec: &str) -> Result<Vec<u32>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| {
        s.trim()
            .parse::<u32>()
            .map_err(|e| format!("invalid order {s:?} in {spec:?}: {e}"))
    };
    match parts[..] {
        [single] => Ok(vec![num(single)?]),
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if step == 0 {
                return Err(format!("step must be positive in {spec:?}"));
            }
            if stop < start {
                return Err(format!("empty order range {spec:?}"));
            }
            Ok((start..=stop).step_by(step as usize).collect())
        }
        _ => Err(format!("orders must be `start:step:stop`, got {spec:?}")),
    }
}
