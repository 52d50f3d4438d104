use std::path::PathBuf;
use std::process::ExitCode;

use bellpoly::scenario::DEFAULT_STRATEGY_CAP;
use bellpoly::symmetry::DEFAULT_GROUP_CAP;
use bellpoly::{Limits, Representation, Scenario};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;

/// Version of the report layout written into every output.
pub const SPEC_VERSION: &str = "1.0";

#[derive(Parser, Debug)]
#[command(name = "bellpoly", version, about = "Bell correlation polytopes: vertices, facets, classes and quantum bounds")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0, env = "BELLPOLY_SEED")]
    pub seed: u64,
    /// Maximum number of deterministic strategies to enumerate.
    #[arg(long = "cap", global = true, env = "BELLPOLY_STRATEGY_CAP", default_value_t = DEFAULT_STRATEGY_CAP, value_parser = clap::value_parser!(u64).range(1..))]
    pub strategy_cap: u64,
    /// Maximum number of vertices handed to facet enumeration.
    #[arg(long, global = true, env = "BELLPOLY_VERTEX_CAP", default_value_t = Limits::default().max_vertices as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub vertex_cap: u64,
    /// Maximum affine dimension handed to facet enumeration.
    #[arg(long, global = true, env = "BELLPOLY_DIM_CAP", default_value_t = Limits::default().max_dim as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub dim_cap: u64,
    /// Maximum relabeling-group order.
    #[arg(long, global = true, env = "BELLPOLY_GROUP_CAP", default_value_t = DEFAULT_GROUP_CAP, value_parser = clap::value_parser!(u64).range(1..))]
    pub group_cap: u64,
    /// Permit facet enumerations beyond 32 vertices or dimension 12.
    #[arg(long, global = true)]
    pub allow_long: bool,
    /// Worker threads for parallel stages (does not change results).
    #[arg(long, global = true, env = "BELLPOLY_THREADS", value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rep {
    Corr,
    Prob,
}

impl From<Rep> for Representation {
    fn from(r: Rep) -> Self {
        match r {
            Rep::Corr => Representation::FullCorrelation,
            Rep::Prob => Representation::FullProbability,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct ScenarioArgs {
    /// Parties, settings and outcomes as `N,M,K`.
    #[arg(long, value_parser = parse_scenario)]
    pub scenario: Scenario,
    #[arg(long, value_enum)]
    pub rep: Rep,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// List the deterministic vertices of a scenario.
    Vertices(ScenarioArgs),
    /// Enumerate all facets of the local polytope.
    Facets(ScenarioArgs),
    /// Group inequalities into relabeling classes.
    Classify {
        /// Inequality file (text or JSON).
        input: PathBuf,
    },
    /// Validity, tightness and facet status of inequalities; optional point membership.
    Check {
        input: PathBuf,
        /// Vertex-format file of points to test for membership.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Complete (N,2,2) correlation family, or its membership test on points.
    Ww {
        #[arg(long, required_unless_present = "points", conflicts_with = "points")]
        parties: Option<usize>,
        /// Full-correlation points of an (N,2,2) scenario.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// See-saw lower bounds on quantum values of correlation inequalities.
    Quantum {
        input: PathBuf,
        /// Local dimensions, e.g. `2,2`; qubits by default.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        restarts: u64,
        #[arg(long, default_value_t = 500)]
        max_sweeps: usize,
    },
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("bad integer {p:?} in {s:?}")))
        .collect::<Result<_, _>>()?;
    let [n, m, k] = parts[..] else {
        return Err(format!("expected N,M,K, got {s:?}"));
    };
    Scenario::new(n, m, k).map_err(|e| e.to_string())
}

/// Failure with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<bellpoly::Error> for Failure {
    fn from(e: bellpoly::Error) -> Self {
        use bellpoly::Error::*;
        let code = match e {
            CapExceeded { .. } | LimitExceeded { .. } | DimensionLimit(_) => 2,
            Invariant(_) => 3,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t as usize).build_global() {
            eprintln!("bellpoly: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli.global, &cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("bellpoly: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_syntax() {
        assert_eq!(parse_scenario("2,3,2").unwrap(), Scenario::new(2, 3, 2).unwrap());
        assert_eq!(parse_scenario(" 1, 1 ,2").unwrap(), Scenario::new(1, 1, 2).unwrap());
        assert!(parse_scenario("2,2").is_err());
        assert!(parse_scenario("2,2,1").is_err());
        assert!(parse_scenario("a,2,2").is_err());
    }

    #[test]
    fn exit_codes_follow_error_kind() {
        let cap = bellpoly::Error::CapExceeded { what: "x", count: "5".into(), cap: 1 };
        assert_eq!(Failure::from(cap).code, 2);
        assert_eq!(Failure::from(bellpoly::Error::Invariant("x".into())).code, 3);
        assert_eq!(Failure::from(bellpoly::Error::InvalidInput("x".into())).code, 1);
    }
}
