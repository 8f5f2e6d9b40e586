use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "commgames", version, about = "Restaurant games: strategies, feasibility and resource comparisons")]
pub struct Cli {
    /// Seed for every randomised search; each search keeps its own fixed
    /// default when unset.
    #[arg(long, global = true, env = "COMMGAMES_SEED", value_parser = parse_seed)]
    pub seed: Option<u64>,

    /// Tolerance for winning checks.
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = parse_tol)]
    pub tol: f64,

    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Output format; sweeps default to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify a strategy file against a game file.
    Check {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Construct a winning strategy with the given resource.
    Synth(ResourceGame),
    /// Decide whether the resource can win the game.
    Feasibility(ResourceGame),
    /// Grid data for plotting.
    Sweep(SweepArgs),
    /// Sampled classical floor of the error functional.
    Montecarlo {
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 100)]
        refine_top: usize,
    },
    /// The 4-cup 2-ball game with a no-signalling box.
    Nsbox {
        /// Box JSON `{"m":[..],"n":[..],"c":[[..],[..]]}`; reference boxes when omitted.
        #[arg(long = "box")]
        box_path: Option<PathBuf>,
    },
    /// Worst-case guessing under 1 cbit, 1 cbit + SR and 1 qubit.
    Worstcase,
    /// Recompute the resource orderings with their separating games.
    StrictAudit {
        /// Multi-starts of the one-shared-bit search.
        #[arg(long, default_value_t = 100_000)]
        starts: usize,
        /// Largest polygon searched against the strict four-Restaurant game.
        #[arg(long, default_value_t = 12)]
        polygon_max: usize,
    },
}

#[derive(Debug, Args)]
pub struct ResourceGame {
    /// cbit, cbit-sr, qubit or polygon:<n>.
    #[arg(long)]
    pub resource: Resource,
    #[arg(long)]
    pub game: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Which data set to produce.
    #[arg(value_enum, required_unless_present = "figure_flag", conflicts_with = "figure_flag")]
    pub figure: Option<Figure>,
    #[arg(long = "figure", value_enum)]
    pub figure_flag: Option<Figure>,
    /// Grid steps per axis (game-space, noise).
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Comma-separated γ_1 values (locus).
    #[arg(long, value_delimiter = ',')]
    pub gamma1: Option<Vec<f64>>,
    /// Points per locus curve.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Polygon size (polygon-table).
    #[arg(long)]
    pub n: Option<usize>,
}

impl SweepArgs {
    pub fn figure(&self) -> Figure {
        self.figure.or(self.figure_flag).expect("clap enforces one of the two")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    GameSpace,
    Locus,
    Noise,
    PolygonTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resource {
    Cbit,
    CbitSr,
    Qubit,
    Polygon(usize),
}

impl FromStr for Resource {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cbit" => Ok(Resource::Cbit),
            "cbit-sr" => Ok(Resource::CbitSr),
            "qubit" => Ok(Resource::Qubit),
            _ => match s.strip_prefix("polygon:").map(str::parse::<usize>) {
                Some(Ok(n)) if n >= 3 => Ok(Resource::Polygon(n)),
                _ => Err(format!(
                    "unknown resource '{s}'; expected cbit, cbit-sr, qubit or polygon:<n> with n >= 3"
                )),
            },
        }
    }
}

impl std::fmt::Display for Resource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Resource::Cbit => write!(f, "cbit"),
            Resource::CbitSr => write!(f, "cbit-sr"),
            Resource::Qubit => write!(f, "qubit"),
            Resource::Polygon(n) => write!(f, "polygon:{n}"),
        }
    }
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    r.map_err(|e| format!("invalid seed '{s}': {e}"))
}

fn parse_tol(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        _ => Err(format!("tolerance must be a positive number, got '{s}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resources_round_trip() {
        for s in ["cbit", "cbit-sr", "qubit", "polygon:3", "polygon:12"] {
            assert_eq!(s.parse::<Resource>().unwrap().to_string(), s);
        }
        for s in ["polygon:2", "polygon:", "polygon:x", "qbit", ""] {
            assert!(s.parse::<Resource>().is_err(), "{s}");
        }
    }

    #[test]
    fn seeds_accept_hex() {
        assert_eq!(parse_seed("0x5eed").unwrap(), 0x5eed);
        assert_eq!(parse_seed("42").unwrap(), 42);
        assert!(parse_seed("0xzz").is_err());
    }

    #[test]
    fn figure_positional_or_flag() {
        let a = Cli::try_parse_from(["commgames", "sweep", "noise"]).unwrap();
        let b = Cli::try_parse_from(["commgames", "sweep", "--figure", "noise"]).unwrap();
        for c in [a, b] {
            let Command::Sweep(s) = c.command else { panic!() };
            assert_eq!(s.figure(), Figure::Noise);
        }
        assert!(Cli::try_parse_from(["commgames", "sweep", "noise", "--figure", "locus"]).is_err());
        assert!(Cli::try_parse_from(["commgames", "sweep"]).is_err());
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert!(Cli::try_parse_from(["commgames", "--tol", "-1", "worstcase"]).is_err());
        assert!(Cli::try_parse_from(["commgames", "--tol", "1e-6", "worstcase"]).is_ok());
    }
}
