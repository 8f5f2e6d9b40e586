//! Command-line front end. `run` does all the work and returns the rendered
//! output plus an exit status; `main` only handles I/O.
//!
//! Exit codes: 0 success, 2 a negative verdict (game lost, resource
//! infeasible, audit row failed), 1 any error.

pub mod args;
mod commands;
mod io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use commgames::classical::{CorrelatedStrategy, MixedStrategy};
use commgames::polygon::PolygonStrategy;
use commgames::qubit::QubitStrategy;

pub use args::{Cli, Command, Format, Resource};
pub use commands::SUPPORTED;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}{}: {message}", position(*.line, *.column))]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("resource {resource} cannot play {game}; supported (resource, game) pairs:\n{SUPPORTED}")]
    Capability { resource: String, game: String },
    #[error("{0} output is not available for this command")]
    Format(&'static str),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] commgames::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn position(line: usize, column: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!(":{line}:{column}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    Negative,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Negative => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: Status,
    pub body: String,
}

/// A strategy for any resource, tagged by `kind` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AnyStrategy {
    Mixed(MixedStrategy),
    Correlated(CorrelatedStrategy),
    Qubit(QubitStrategy),
    Polygon(PolygonStrategy),
}

impl AnyStrategy {
    pub fn kind(&self) -> &'static str {
        match self {
            AnyStrategy::Mixed(_) => "mixed",
            AnyStrategy::Correlated(_) => "correlated",
            AnyStrategy::Qubit(_) => "qubit",
            AnyStrategy::Polygon(_) => "polygon",
        }
    }

    pub fn visit_matrix(&self) -> commgames::VisitMatrix {
        use commgames::{classical, polygon, qubit};
        match self {
            AnyStrategy::Mixed(s) => classical::visit_matrix_mixed(s),
            AnyStrategy::Correlated(s) => classical::visit_matrix_correlated(s),
            AnyStrategy::Qubit(s) => qubit::visit_matrix_qubit(s),
            AnyStrategy::Polygon(s) => polygon::visit_matrix_polygon(s),
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    commands::dispatch(cli)
}

pub use io::{load_game, load_strategy};
