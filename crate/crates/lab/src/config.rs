//! Experiment configuration: one JSON document with `problem`, `grid`,
//! `command`, `output` and `seed` blocks.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wentzell_core::decomposition::LiftingOp;
use wentzell_core::dense::NormKind;
use wentzell_core::disk::DiskSpec;
use wentzell_core::interval::{IntervalSpec, Scalar};
use wentzell_core::perturbation::SplitScenario;
use wentzell_core::probes::{NodeWeighting, SectorOptions, Theorem31Options};

use crate::LabError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProblemBlock {
    Interval(Box<IntervalSpec>),
    Disk(DiskSpec),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Nodes {
    One(usize),
    Many(Vec<usize>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub nodes: Nodes,
}

impl GridBlock {
    pub fn list(&self) -> Vec<usize> {
        match &self.nodes {
            Nodes::One(n) => vec![*n],
            Nodes::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default)]
    pub directory: Option<PathBuf>,
    #[serde(default)]
    pub formats: Option<Vec<Format>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackChoice {
    /// The problem's full feedback `B̂`.
    B,
    /// Derivative terms only.
    B0,
    /// The trace `L̂` itself.
    Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorTarget {
    /// Full-grid Wentzell generator.
    Wentzell,
    /// `Â₀ + P̂` on interior unknowns.
    Dirichlet,
    G0,
    Dtn,
    /// Disk only: derivative part of the DtN operator.
    DtnB0,
    /// Disk only: the trace coupling `C`.
    Coupling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergeQuantity {
    /// Discrete lifting against the continuum lifting.
    Dirichlet,
    /// Continuum-reference residual of the similarity identity.
    Similarity,
    /// Singular values of the resolvents under refinement.
    Compactness,
}

fn default_lambdas_identity() -> Vec<f64> {
    wentzell_core::perturbation::DEFAULT_IDENTITY_LAMBDAS.to_vec()
}
fn default_block_lambdas() -> Vec<f64> {
    vec![1.0, 10.0, 100.0]
}
fn default_relbound_lambdas() -> Vec<f64> {
    wentzell_core::convergence::log_space(1e2, 1e6, 9)
}
fn default_times() -> Vec<f64> {
    vec![0.1, 1.0, 10.0]
}
fn default_disk_times() -> Vec<f64> {
    vec![0.0, 0.1, 1.0]
}
fn default_epsilons() -> Vec<f64> {
    vec![1.0, 0.1, 0.01]
}
fn default_samples() -> usize {
    8
}
fn default_one() -> f64 {
    1.0
}
fn default_unit_boundary() -> Vec<Scalar> {
    vec![Scalar::Real(1.0), Scalar::Real(0.0)]
}
fn default_order() -> f64 {
    2.0
}
fn default_order_tolerance() -> f64 {
    0.3
}
fn default_k() -> usize {
    10
}
fn default_stabilization() -> f64 {
    0.05
}
fn default_angle_tolerance() -> f64 {
    0.1
}
fn default_op() -> LiftingOp {
    LiftingOp::Am
}
fn default_feedback() -> FeedbackChoice {
    FeedbackChoice::B
}

/// Parameters per subcommand; the block's `name` is the subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Command {
    Dirichlet {
        #[serde(default)]
        lambda: f64,
        #[serde(default = "default_op")]
        op: LiftingOp,
        /// Boundary data to lift, in addition to the full map.
        #[serde(default)]
        boundary: Option<Vec<Scalar>>,
    },
    Dtn {
        #[serde(default)]
        lambda: f64,
        #[serde(default = "default_op")]
        op: LiftingOp,
        #[serde(default = "default_feedback")]
        feedback: FeedbackChoice,
    },
    SimilarityCheck {
        #[serde(default = "default_samples")]
        samples: usize,
    },
    ResolventCheck {
        #[serde(default = "default_block_lambdas")]
        lambdas: Vec<f64>,
    },
    Sector {
        operator: SectorTarget,
        #[serde(default)]
        options: SectorOptions,
    },
    Relbound {
        #[serde(default = "default_feedback")]
        feedback: FeedbackChoice,
        #[serde(default = "default_relbound_lambdas")]
        lambdas: Vec<f64>,
        #[serde(default)]
        norm: Option<NormKind>,
    },
    Evolve {
        #[serde(default = "default_times")]
        times: Vec<f64>,
    },
    PerturbCheck {
        #[serde(default = "default_lambdas_identity")]
        lambdas: Vec<f64>,
    },
    SplitCheck {
        scenario: SplitScenario,
        #[serde(default)]
        options: Theorem31Options,
        /// Disk runs only; interval runs take the tolerance from `options`.
        #[serde(default = "default_angle_tolerance")]
        angle_tolerance: f64,
    },
    Disk {
        #[serde(default = "default_epsilons")]
        epsilons: Vec<f64>,
        #[serde(default = "default_disk_times")]
        times: Vec<f64>,
    },
    Converge {
        quantity: ConvergeQuantity,
        #[serde(default = "default_one")]
        lambda: f64,
        #[serde(default = "default_unit_boundary")]
        boundary: Vec<Scalar>,
        #[serde(default = "default_order")]
        expected_order: f64,
        #[serde(default = "default_order_tolerance")]
        order_tolerance: f64,
        #[serde(default = "default_k")]
        k: usize,
        #[serde(default)]
        weighting: NodeWeighting,
        /// Largest relative change of `σ_k` allowed between the two finest grids.
        #[serde(default = "default_stabilization")]
        stabilization_tolerance: f64,
    },
    Theorem31 {
        #[serde(default)]
        options: Theorem31Options,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Dirichlet { .. } => "dirichlet",
            Command::Dtn { .. } => "dtn",
            Command::SimilarityCheck { .. } => "similarity-check",
            Command::ResolventCheck { .. } => "resolvent-check",
            Command::Sector { .. } => "sector",
            Command::Relbound { .. } => "relbound",
            Command::Evolve { .. } => "evolve",
            Command::PerturbCheck { .. } => "perturb-check",
            Command::SplitCheck { .. } => "split-check",
            Command::Disk { .. } => "disk",
            Command::Converge { .. } => "converge",
            Command::Theorem31 { .. } => "theorem31",
        }
    }
}

pub const SUBCOMMANDS: [&str; 12] = [
    "dirichlet",
    "dtn",
    "similarity-check",
    "resolvent-check",
    "sector",
    "relbound",
    "evolve",
    "perturb-check",
    "split-check",
    "disk",
    "converge",
    "theorem31",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemBlock,
    #[serde(default)]
    pub grid: Option<GridBlock>,
    pub command: Command,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        // An empty file reads as an empty object so the error names the
        // first missing block.
        let text = if text.trim().is_empty() { "{}" } else { text };
        serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Node counts, or a config error naming the missing block.
    pub fn nodes(&self) -> Result<Vec<usize>, LabError> {
        let grid = self
            .grid
            .as_ref()
            .ok_or_else(|| LabError::Config(format!("missing field `grid` (required by {})", self.command.name())))?;
        let list = grid.list();
        if list.is_empty() {
            return Err(LabError::Config("grid.nodes is empty".into()));
        }
        Ok(list)
    }

    pub fn single_grid(&self) -> Result<usize, LabError> {
        match self.nodes()?.as_slice() {
            [n] => Ok(*n),
            _ => Err(LabError::Config(format!(
                "grid.nodes must be a single value for {}",
                self.command.name()
            ))),
        }
    }
}
