//! Command-line entry point: argument dispatch and the exit-code policy
//! (0 success, 2 usage, 3 bad input data, 4 numerical breakdown).

mod cli;
mod figure;
mod report;
mod simulate;

use clap::Parser;
use cli::{AnalyzeArgs, Cli, Command, SimulateArgs};
use concord::{load_fixture, parse_csv, transform, ColumnMap, PairedSample, Transform, FIXTURE_NAMES};
use report::{analyze, render_report, AnalyzeConfig};
use std::fs;
use std::path::Path;
use std::process::ExitCode;

enum Failure {
    Data(String),
    Numeric(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Data(_) => 3,
            Failure::Numeric(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Data(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<concord::Error> for Failure {
    fn from(e: concord::Error) -> Failure {
        let msg = format!("{e} [{}]", e.code());
        if e.is_data_error() {
            Failure::Data(msg)
        } else {
            Failure::Numeric(msg)
        }
    }
}

fn main() -> ExitCode {
    let parsed = Cli::parse();
    let outcome = match parsed.command {
        Command::Analyze(args) => run_analyze(&args),
        Command::Simulate(args) => run_simulate(&args),
        Command::Fixtures => run_fixtures(),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

fn load_input(args: &AnalyzeArgs) -> Result<(PairedSample, String), Failure> {
    if let Some(name) = &args.fixture {
        return Ok((load_fixture(name)?, format!("fixture:{name}")));
    }
    let path = args.input.as_ref().expect("clap enforces input xor fixture");
    let bytes = fs::read(path)
        .map_err(|e| Failure::Data(format!("cannot read {}: {e}", path.display())))?;
    let columns = ColumnMap {
        x: args.x_col.clone(),
        y: args.y_col.clone(),
        id: args.id_col.clone(),
    };
    Ok((parse_csv(bytes.as_slice(), &columns)?, path.display().to_string()))
}

fn transform_flag_label(op: Transform) -> String {
    match op {
        Transform::Log => "log".into(),
        Transform::ScaleY(c) => format!("scale-y={c}"),
        Transform::ScaleX(c) => format!("scale-x={c}"),
    }
}

fn write_artifact(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .map_err(|e| Failure::Numeric(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_analyze(args: &AnalyzeArgs) -> Result<(), Failure> {
    let (mut sample, source) = load_input(args)?;
    let mut transform_label = None;
    if let Some(op) = args.transform {
        sample = transform(&sample, op)?;
        transform_label = Some(transform_flag_label(op));
    }
    let analysis = analyze(
        sample,
        &AnalyzeConfig {
            source,
            alpha: args.alpha,
            boot: args.boot,
            grid: args.grid,
            seed: args.seed,
            lambda_override: args.lambda,
            transform_label,
        },
    )?;
    for w in &analysis.report.warnings {
        eprintln!("warning: {w}");
    }
    fs::create_dir_all(&args.out)
        .map_err(|e| Failure::Numeric(format!("cannot create {}: {e}", args.out.display())))?;
    if args.format.wants_json() {
        write_artifact(&args.out.join("report.json"), &render_report(&analysis.report))?;
    }
    if args.format.wants_svg() {
        let svg = figure::render_figure(
            &analysis.report,
            &analysis.sample,
            Some(&analysis.precision_band),
            Some(&analysis.bisector_band),
            Some(&analysis.ellipse),
        )?;
        write_artifact(&args.out.join("figure.svg"), &svg)?;
    }
    println!("verdict: {}", analysis.report.verdict);
    Ok(())
}

fn run_simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let summary = simulate::run_simulation(args.n, args.reps, args.alpha, args.seed)?;
    print!("{}", simulate::format_table(&summary));
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::Numeric(format!("cannot create {}: {e}", dir.display())))?;
        let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
        text.push('\n');
        write_artifact(&dir.join("simulation.json"), &text)?;
    }
    Ok(())
}

fn run_fixtures() -> Result<(), Failure> {
    println!("{:<16} {:>4}  unit", "name", "n");
    for name in FIXTURE_NAMES {
        let s = load_fixture(name)?;
        println!(
            "{:<16} {:>4}  {}",
            name,
            s.n(),
            s.unit_label.as_deref().unwrap_or("-")
        );
    }
    Ok(())
}
