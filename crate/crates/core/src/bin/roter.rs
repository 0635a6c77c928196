use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use roter::analysis::{analyze, render, AnalysisConfig, ChartSource, OutputFormat, SampleSpec, DEFAULT_SAMPLES};
use roter::classify::Tolerances;

#[derive(Parser)]
#[command(name = "roter", version, about = "Pointwise curvature classification of coordinate metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a catalog metric or a chart file at sample points.
    #[command(group(ArgGroup::new("source").required(true).args(["metric", "chart_file"])))]
    Analyze(AnalyzeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    /// Catalog metric name.
    #[arg(long)]
    metric: Option<String>,
    /// Chart file path.
    #[arg(long)]
    chart_file: Option<PathBuf>,
    /// Parameter assignment KEY=VALUE (repeatable).
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Number of random sample points.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Explicit comma-separated point (repeatable); overrides random sampling.
    #[arg(long = "point", value_name = "X1,X2,...")]
    points: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    accept_tol: Option<f64>,
    #[arg(long)]
    reject_tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Treat any per-point engine failure as fatal.
    #[arg(long)]
    strict: bool,
}

fn config_from(args: AnalyzeArgs) -> Result<AnalysisConfig, String> {
    let mut params = BTreeMap::new();
    for p in &args.params {
        let (k, v) = p.split_once('=').ok_or_else(|| format!("--param {p:?} is not KEY=VALUE"))?;
        if params.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(format!("--param {} given twice", k.trim()));
        }
    }
    let source = match (args.metric, args.chart_file) {
        (Some(name), None) => ChartSource::Catalog { name, params },
        (None, Some(path)) => ChartSource::File { path, params },
        _ => return Err("exactly one of --metric and --chart-file is required".into()),
    };
    let samples = if args.points.is_empty() {
        SampleSpec::Random { count: args.samples, sample_box: None }
    } else {
        let points = args
            .points
            .iter()
            .map(|p| {
                p.split(',')
                    .map(|v| v.trim().parse::<f64>().map_err(|_| format!("--point {p:?}: {v:?} is not a number")))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        SampleSpec::Points(points)
    };
    let mut tolerances = Tolerances::default();
    if let Some(a) = args.accept_tol {
        tolerances.accept = a;
    }
    if let Some(r) = args.reject_tol {
        tolerances.reject = r;
    }
    let format = match args.format {
        Format::Json => OutputFormat::Json,
        Format::Text => OutputFormat::Text,
    };
    Ok(AnalysisConfig { source, samples, tolerances, format, seed: args.seed, strict: args.strict })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    let Command::Analyze(args) = cli.command;
    let config = match config_from(args) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("roter: configuration error: {msg}");
            return ExitCode::from(3);
        }
    };
    match analyze(&config) {
        Ok(report) => {
            for f in &report.failures {
                eprintln!("roter: skipped point {:?}: {}", f.point, f.error);
            }
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{}", render(&report, config.format));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("roter: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
