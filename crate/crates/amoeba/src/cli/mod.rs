//! Command-line front end.
//!
//! Four commands share one [`RunConfig`]: `simulate` writes a trajectory
//! table, `forces` the internal-force series, `rank` JSON rank certificates
//! and `maneuver` the moonwalk comparison or the commutator scaling table.
//! Exit codes: 0 ok, 2 configuration error, 3 numerical fault, 4 a
//! configured ceiling or acceptance check was breached.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{RunConfig, SCHEMA};

use crate::error::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical fault: {0}")]
    Numerical(Error),
    #[error("ceiling breached: {0}")]
    Ceiling(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Ceiling(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::UnknownPreset(_) => CliError::Config(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "amoeba", version, about = "Swimming of a deformable body in a 2D ideal fluid")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the rigid motion driven by a stroke and write the trajectory CSV.
    Simulate(Overrides),
    /// Internal forces along a stroke, optionally recovering the stroke from them.
    Forces {
        #[command(flatten)]
        o: Overrides,
        /// Integrate the shape back from the emitted forces and report the error.
        #[arg(long)]
        round_trip: bool,
    },
    /// Rank certificates for the bracket-generated distributions.
    Rank {
        #[command(flatten)]
        o: Overrides,
        /// Rank of {X1, X2, [X1,X2]} on the shape sphere instead of the lifted family.
        #[arg(long)]
        shape_only: bool,
        #[arg(long)]
        draws: Option<usize>,
    },
    /// Moonwalk comparison or commutator loop.
    Maneuver {
        #[command(flatten)]
        o: Overrides,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long)]
        cycles: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum KindArg {
    Moonwalk,
    Commutator,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Primary output (CSV or JSON); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long = "N")]
    pub n_modes: Option<usize>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long = "rho-f")]
    pub rho_f: Option<f64>,
    #[arg(long = "neutral-buoyancy")]
    pub neutral_buoyancy: bool,
}

impl Overrides {
    /// Load the config file (or defaults) and apply the flags on top.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.dt {
            cfg.dt = v;
        }
        if let Some(v) = self.t_end {
            cfg.t1 = Some(v);
        }
        if let Some(v) = &self.preset {
            cfg.preset = Some(v.clone());
            cfg.shape_table = None;
        }
        if let Some(v) = self.n_modes {
            cfg.n_modes = Some(v);
        }
        if let Some(v) = self.mu {
            cfg.mu = v;
        }
        if let Some(v) = self.rho_f {
            cfg.rho_f = v;
        }
        if self.neutral_buoyancy {
            cfg.neutral_buoyancy = Some(true);
            cfg.rho_0 = None;
        }
        Ok(cfg)
    }
}

/// Run one parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let res = match cli.command {
        Command::Simulate(o) => o.resolve().and_then(|c| commands::simulate(&c, o.out.as_deref(), o.svg.as_deref())),
        Command::Forces { o, round_trip } => o.resolve().and_then(|mut c| {
            c.round_trip |= round_trip;
            commands::forces(&c, o.out.as_deref(), o.svg.as_deref())
        }),
        Command::Rank { o, shape_only, draws } => o.resolve().and_then(|mut c| {
            if shape_only {
                c.rank.mode = config::RankMode::Shape;
            }
            if let Some(d) = draws {
                c.rank.draws = d;
            }
            commands::rank(&c, o.out.as_deref())
        }),
        Command::Maneuver { o, kind, cycles } => o.resolve().and_then(|mut c| {
            match kind {
                Some(KindArg::Moonwalk) => c.maneuver.kind = config::ManeuverKind::Moonwalk,
                Some(KindArg::Commutator) => c.maneuver.kind = config::ManeuverKind::Commutator,
                None => {}
            }
            if let Some(n) = cycles {
                c.maneuver.cycles = n;
            }
            commands::maneuver(&c, o.out.as_deref(), o.svg.as_deref())
        }),
    };
    match res {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("amoeba: {e}");
            e.exit_code()
        }
    }
}
