//! Command-line front end for `lorentz-ot`: argument definitions, text
//! file formats and the subcommand implementations.
//!
//! Exit status is 0 on success, 1 when the measures are not causally
//! related and 2 on unreadable input, bad arguments or any other failure.

pub mod commands;
pub mod formats;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "lorentz-ot", version, about = "Optimal transport with Lorentzian cost")]
pub struct Cli {
    /// Spacetime model file (`kind=`, `dim=`, scale factor lines).
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a coupling supported on the causal relation exists.
    Feasible {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
        /// Time fattening of the relation.
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        /// Write a witness coupling (`i j mass`) here when related.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Solve the Kantorovich problem and write the plan.
    Solve {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
        /// Plan file; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Displacement interpolant of a plan at time `t ∈ [0, 1]`.
    Interpolate {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regularity and optimality diagnostics of a plan.
    Diagnose {
        #[arg(long)]
        plan: PathBuf,
        /// Distance of the probed times from the endpoints.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Dump `path_id s t x1 … xd mass` per geodesic sample.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Extract a transport map, or report a source that splits.
    Monge {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Look for a second optimal plan by randomized re-solving.
    ProbeUniqueness {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Built-in experiments; artifacts go to `--out-dir`.
    #[command(subcommand)]
    Repro(Repro),
}

#[derive(Debug, Subcommand)]
pub enum Repro {
    /// Null-geodesic instance whose interpolant is only Hölder-1/2.
    HalfHolder {
        #[arg(long, default_value_t = 64)]
        n: usize,
    },
    /// Cost change when crossing timelike segments swap endpoints.
    Crossing {
        #[arg(long, default_value_t = 200)]
        n: usize,
    },
    /// Atoms on one null generator: every coupling is optimal.
    NullCone {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}
