//! Flag definitions for the analyze/simulate/fixtures subcommands.

use clap::{Args, Parser, Subcommand, ValueEnum};
use concord::Transform;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "concord",
    version,
    about = "Paired method-comparison equivalence: accuracy, precision, and \
             bisector-agreement tests with bootstrap graphics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Analyze a paired-measurement CSV file or a bundled dataset
    Analyze(AnalyzeArgs),
    /// Estimate null rejection rates of the three tests by simulation
    Simulate(SimulateArgs),
    /// List the bundled datasets
    Fixtures,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// CSV file with one row per subject
    #[arg(long, required_unless_present = "fixture", conflicts_with = "fixture")]
    pub input: Option<PathBuf>,

    /// Bundled dataset name (see the fixtures subcommand)
    #[arg(long)]
    pub fixture: Option<String>,

    /// Column holding the reference technique
    #[arg(long, default_value = "x")]
    pub x_col: String,

    /// Column holding the evaluated technique
    #[arg(long, default_value = "y")]
    pub y_col: String,

    /// Column holding subject identifiers (row numbers when absent)
    #[arg(long)]
    pub id_col: Option<String>,

    /// Significance level shared by the three tests
    #[arg(long, default_value_t = 0.05, value_parser = parse_alpha)]
    pub alpha: f64,

    /// Bootstrap replicates for intervals, bands, and the ellipse
    #[arg(long, default_value_t = concord::DEFAULT_BOOT, value_parser = parse_boot)]
    pub boot: usize,

    /// Grid points per confidence band
    #[arg(long, default_value_t = concord::DEFAULT_GRID, value_parser = parse_grid)]
    pub grid: usize,

    /// Random seed (required: every run is reproducible by construction)
    #[arg(long)]
    pub seed: u64,

    /// Fix the error-variance ratio instead of estimating it
    #[arg(long, value_parser = parse_lambda)]
    pub lambda: Option<f64>,

    /// Value transform: log, scale-y=C, or scale-x=C
    #[arg(long, value_parser = parse_transform)]
    pub transform: Option<Transform>,

    /// Output directory for the report and figure
    #[arg(long, default_value = ".")]
    pub out: PathBuf,

    /// Which artifacts to write
    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Subjects per simulated sample
    #[arg(long, default_value_t = 50, value_parser = parse_sim_n)]
    pub n: usize,

    /// Number of simulated samples
    #[arg(long, default_value_t = 1000, value_parser = parse_reps)]
    pub reps: usize,

    /// Significance level shared by the three tests
    #[arg(long, default_value_t = 0.05, value_parser = parse_alpha)]
    pub alpha: f64,

    /// Random seed (required: every run is reproducible by construction)
    #[arg(long)]
    pub seed: u64,

    /// Directory for the JSON summary (table always goes to stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Svg,
    Both,
}

impl Format {
    pub fn wants_json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn wants_svg(self) -> bool {
        matches!(self, Format::Svg | Format::Both)
    }
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err("alpha must lie strictly between 0 and 1".into())
    }
}

fn parse_boot(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if v >= 100 {
        Ok(v)
    } else {
        Err("need at least 100 bootstrap replicates".into())
    }
}

fn parse_grid(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if v >= 20 {
        Ok(v)
    } else {
        Err("need at least 20 grid points".into())
    }
}

fn parse_lambda(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err("lambda must be a positive finite variance ratio".into())
    }
}

fn parse_sim_n(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if v >= 4 {
        Ok(v)
    } else {
        Err("simulated samples need at least 4 subjects".into())
    }
}

fn parse_reps(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if v >= 1 {
        Ok(v)
    } else {
        Err("need at least one replication".into())
    }
}

fn parse_transform(s: &str) -> Result<Transform, String> {
    if s == "log" {
        return Ok(Transform::Log);
    }
    let scale = |prefix: &str, v: &str| -> Result<f64, String> {
        let c: f64 = v
            .parse()
            .map_err(|_| format!("`{v}` is not a number in `{prefix}={v}`"))?;
        if c.is_finite() && c != 0.0 {
            Ok(c)
        } else {
            Err(format!("{prefix} factor must be finite and nonzero"))
        }
    };
    if let Some(v) = s.strip_prefix("scale-y=") {
        return Ok(Transform::ScaleY(scale("scale-y", v)?));
    }
    if let Some(v) = s.strip_prefix("scale-x=") {
        return Ok(Transform::ScaleX(scale("scale-x", v)?));
    }
    Err(format!(
        "`{s}` is not a transform; expected log, scale-y=C, or scale-x=C"
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn transform_forms() {
        assert_eq!(parse_transform("log").unwrap(), Transform::Log);
        assert_eq!(
            parse_transform("scale-y=1.11").unwrap(),
            Transform::ScaleY(1.11)
        );
        assert_eq!(
            parse_transform("scale-x=0.5").unwrap(),
            Transform::ScaleX(0.5)
        );
        assert!(parse_transform("sqrt").is_err());
        assert!(parse_transform("scale-y=zero").is_err());
        assert!(parse_transform("scale-x=0").is_err());
    }

    #[test]
    fn numeric_guards() {
        assert!(parse_alpha("0.05").is_ok());
        assert!(parse_alpha("1.5").is_err());
        assert!(parse_boot("99").is_err());
        assert!(parse_grid("19").is_err());
        assert!(parse_lambda("-1").is_err());
    }
}
