use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use membranekit::probes::Probe;
use membranekit::{Family, Grid};

#[derive(Parser, Debug)]
#[command(
    name = "membranekit",
    version,
    about = "Experiments with snapping-out and skew Brownian motion operators",
    long_about = "Experiments with snapping-out and skew Brownian motion operators.\n\n\
        Every command accepts --config FILE with flat `key = value` lines naming long options \
        (for example `alpha = 0.4` or `n = 1,2,5`); options given on the command line take precedence. \
        Floats are written in shortest round-trip form, so identical inputs give byte-identical files.\n\n\
        Exit codes: 0 success, 1 configuration or domain error, 2 --assert check failed."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Extension pairs for a sweep of scaled permeabilities and their limit.
    ///
    /// Writes extend_n<N>.csv for each n and extend_limit.csv, columns
    /// x,f1,f2 (the left and right extension components on the whole grid);
    /// header comments carry both components' limits at ±∞.
    Extend(ExtendArgs),
    /// Convergence sweep over n with error table.
    ///
    /// Writes converge_<target>.csv with columns n,error,bound (bound = K/n
    /// when a rate constant is known, else empty).
    Converge(ConvergeArgs),
    /// Weierstrass semigroup applied to a probe.
    ///
    /// Writes evolve_t<T>.csv per time, columns x,value; the membrane appears
    /// twice, as -0.0 for f(0−) and 0.0 for f(0+).
    Evolve(EvolveArgs),
    /// Snapping-out, skew and complementary projections of a pair.
    ///
    /// Writes project_<kind>.csv with columns x,f1,f2, and least_squares.json
    /// when --window is given.
    Project(ProjectArgs),
    /// Monte-Carlo estimate of E f(X_t).
    ///
    /// Writes mc.csv with columns mean,std_error,n_paths,reference.
    Mc(McArgs),
    /// Cesàro means of a cosine family against their limits.
    ///
    /// Writes means.csv with columns t,gap (sup distance to the limit).
    Means(MeansArgs),
    /// Mirror identity between the complementary and skew cosine families.
    ///
    /// Writes mirror.csv with columns t,gap.
    Mirror(MirrorArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Directory for output files (created if missing)
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Grid as X,n_half: nodes k·X/n_half for |k| ≤ n_half
    #[arg(long, default_value = "12,600", value_parser = parse_grid)]
    pub grid: Grid,
    /// key = value file supplying defaults for long options
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Check results against their envelopes; exit 2 on violation
    #[arg(long = "assert")]
    pub check: bool,
}

#[derive(Args, Debug, Clone)]
pub struct Membrane {
    #[arg(long, default_value_t = 0.2)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Limit {
    Skew,
    Weks,
}

#[derive(Args, Debug)]
pub struct ExtendArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub membrane: Membrane,
    #[arg(long, default_value = "gauss")]
    pub probe: Probe,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 5, 15])]
    pub n: Vec<u32>,
    /// skew: snapping-out sweep; weks: complementary sweep (opposite-value probes)
    #[arg(long, value_enum, default_value_t = Limit::Skew)]
    pub target: Limit,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Extension,
    Cosine,
    Semigroup,
    Projection,
    Weks,
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub membrane: Membrane,
    #[arg(long, value_enum, default_value_t = Target::Extension)]
    pub target: Target,
    #[arg(long, default_value = "tanh")]
    pub probe: Probe,
    /// Second component for --target projection
    #[arg(long, default_value = "gauss")]
    pub probe2: Probe,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 5, 10, 20, 50])]
    pub n: Vec<u32>,
    /// Times (default: multiples of 0.25 in [−3, 3]; 0.5,1,2 for semigroup)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub t: Vec<f64>,
    /// Additive slack of the K/n envelope under --assert
    #[arg(long, default_value_t = 1e-4)]
    pub slack: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    Lattice,
    GaussHermite,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub membrane: Membrane,
    #[arg(long, default_value = "s-o")]
    pub family: Family,
    #[arg(long, default_value = "step")]
    pub probe: Probe,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
    pub t: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Rule::Lattice)]
    pub rule: Rule,
    /// Nodes of the Gauss–Hermite rule
    #[arg(long, default_value_t = 40)]
    pub gh_nodes: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    So,
    Skew,
    Weks,
    All,
}

#[derive(Args, Debug)]
pub struct ProjectArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub membrane: Membrane,
    #[arg(long, default_value = "gauss")]
    pub probe1: Probe,
    #[arg(long, default_value = "tanh")]
    pub probe2: Probe,
    #[arg(long, value_enum, default_value_t = Kind::All)]
    pub kind: Kind,
    /// Half-width y of the least-squares window [−y, y]
    #[arg(long)]
    pub window: Option<f64>,
    #[arg(long, default_value_t = 64)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Process {
    Skew,
    Snapping,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

#[derive(Args, Debug)]
pub struct McArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub membrane: Membrane,
    #[arg(long, value_enum, default_value_t = Process::Skew)]
    pub process: Process,
    #[arg(long, default_value = "tanh")]
    pub probe: Probe,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 100_000)]
    pub n_paths: u64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x0: f64,
    /// Membrane side of a snapping walk started at 0
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,
    #[arg(long)]
    pub antithetic: bool,
}

#[derive(Args, Debug)]
pub struct MeansArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub membrane: Membrane,
    #[arg(long, default_value = "s-o")]
    pub family: Family,
    #[arg(long, default_value = "tanh")]
    pub probe: Probe,
    #[arg(long, value_delimiter = ',', default_values_t = [10.0, 50.0, 200.0])]
    pub t: Vec<f64>,
    /// Trapezoid step in s (default: exact integration)
    #[arg(long)]
    pub s_step: Option<f64>,
    /// Largest admissible gap at the last time under --assert
    #[arg(long, default_value_t = 0.05)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct MirrorArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub membrane: Membrane,
    #[arg(long, default_value = "ov-gauss")]
    pub probe: Probe,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0], allow_negative_numbers = true)]
    pub t: Vec<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Extend(a) => &a.common,
            Command::Converge(a) => &a.common,
            Command::Evolve(a) => &a.common,
            Command::Project(a) => &a.common,
            Command::Mc(a) => &a.common,
            Command::Means(a) => &a.common,
            Command::Mirror(a) => &a.common,
        }
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let (x, n) = s.split_once(',').ok_or("expected X,n_half")?;
    let x: f64 = x.trim().parse().map_err(|e| format!("bad X: {e}"))?;
    let n: usize = n.trim().parse().map_err(|e| format!("bad n_half: {e}"))?;
    Grid::new(x, n).map_err(|e| e.to_string())
}

/// Splices `key = value` lines of every `--config FILE` into `argv` right
/// after the subcommand, skipping keys already given on the command line.
pub fn expand_config(argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            path = argv.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let text =
        std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let given = |key: &str| {
        argv.iter()
            .any(|a| a == &format!("--{key}") || a.starts_with(&format!("--{key}=")))
    };
    let mut extra = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key = value", lineno + 1))?;
        let key = k.trim().replace('_', "-");
        let value = v.trim();
        if key == "config" || given(&key) {
            continue;
        }
        match value {
            "true" => extra.push(format!("--{key}")),
            "false" => {}
            _ => extra.push(format!("--{key}={value}")),
        }
    }
    let at = argv.len().min(2);
    let mut out = argv[..at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[at..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = parse_grid("8,200").unwrap();
        assert_eq!((g.x_max(), g.n_half()), (8.0, 200));
        assert!(parse_grid("8").is_err());
        assert!(parse_grid("8,2").is_err());
    }

    #[test]
    fn cli_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
