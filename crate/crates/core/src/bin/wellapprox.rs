use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use wellapprox::approx::{tail_union, TailUnionSpec};
use wellapprox::circle::{parse_rational, Rational};
use wellapprox::density::density_profile;
use wellapprox::experiments::{
    approx_order_report, cassels_experiment, duffin_schaeffer_classify, gallagher_experiment,
    membership_witnesses, ReportRow,
};
use wellapprox::{AffineCircleMap, ArcSet, CirclePoint, DeltaSequence, ExperimentReport, IndexPredicate};

const EXIT_VERDICT_FAILED: u8 = 2;
const EXIT_USAGE: u8 = 1;

/// Library, serde and I/O errors all end up as a message and exit code 1.
type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(name = "wellapprox", version, about = "Exact arc-set experiments on the circle R/Z")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    output: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Tail-union measures against the subadditive bound.
    Gallagher {
        #[arg(long)]
        delta: DeltaSequence,
        /// Comma-separated increasing window starts.
        #[arg(long, value_delimiter = ',', required = true)]
        n_min: Vec<u64>,
        #[arg(long)]
        n_max: u64,
    },
    /// Compare tail unions with radii delta_n and M*delta_n.
    Cassels {
        #[arg(long)]
        delta: DeltaSequence,
        #[arg(long, value_parser = rational_arg)]
        m: Rational,
        #[arg(long, default_value = "all")]
        pred: IndexPredicate,
        #[arg(long)]
        n_min: u64,
        #[arg(long)]
        n_max: u64,
    },
    /// Partial sums of phi(n) delta_n and the series classification.
    DuffinSchaeffer {
        #[arg(long)]
        delta: DeltaSequence,
        #[arg(long, default_value_t = 1024)]
        cap: u64,
    },
    /// Indices n <= n_max with a point of order n within delta_n of x.
    Witnesses {
        #[arg(long)]
        x: CirclePoint,
        #[arg(long)]
        delta: DeltaSequence,
        #[arg(long)]
        n_max: u64,
    },
    /// The approximate-order set AO(n, delta_n) as an arc set.
    Ao {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        delta: DeltaSequence,
    },
    /// Measure of an arc-set file, or of a tail union.
    Measure {
        #[arg(long, conflicts_with_all = ["delta", "n_min", "n_max"])]
        set: Option<PathBuf>,
        #[arg(long)]
        delta: Option<DeltaSequence>,
        #[arg(long)]
        n_min: Option<u64>,
        #[arg(long)]
        n_max: Option<u64>,
        #[arg(long, default_value = "all")]
        pred: IndexPredicate,
    },
    /// Invariant unions of grid cells for y -> n*y + x.
    ErgodicSearch {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "0")]
        x: CirclePoint,
        #[arg(long)]
        grid: u64,
    },
    /// Density ratios of an arc set at x along a radius schedule.
    Density {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        x: CirclePoint,
        #[arg(long, value_delimiter = ',', value_parser = rational_arg, required = true)]
        eps: Vec<Rational>,
    },
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// What a subcommand produced, and whether every verdict held.
struct Outcome {
    text: String,
    pass: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, pass: true }
    }

    fn report(report: &ExperimentReport, format: Format) -> Self {
        let text = match format {
            Format::Json => report.to_json(),
            Format::Csv => report.to_csv(),
        };
        Outcome { text, pass: report.all_pass() }
    }
}

fn load_set(path: &PathBuf) -> CliResult<ArcSet> {
    let raw = fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
    Ok(serde_json::from_str(&raw).map_err(|e| format!("parsing {}: {e}", path.display()))?)
}

fn arcs_csv(set: &ArcSet) -> String {
    let mut out = String::from("start,length\n");
    for a in set.arcs() {
        out.push_str(&format!("{},{}\n", a.start, a.length));
    }
    out
}

fn run(cli: &Cli) -> CliResult<Outcome> {
    let format = cli.output;
    Ok(match &cli.command {
        Command::Gallagher { delta, n_min, n_max } => {
            if delta.is_non_decaying() {
                eprintln!("warning: delta_n does not tend to 0; truncations say nothing about the limsup");
            }
            Outcome::report(&gallagher_experiment(delta, n_min, *n_max)?, format)
        }
        Command::Cassels { delta, m, pred, n_min, n_max } => {
            Outcome::report(&cassels_experiment(delta, m, pred, *n_min, *n_max)?, format)
        }
        Command::DuffinSchaeffer { delta, cap } => Outcome::report(&duffin_schaeffer_classify(delta, *cap)?, format),
        Command::Witnesses { x, delta, n_max } => {
            let w = membership_witnesses(x, delta, *n_max);
            Outcome::ok(match format {
                Format::Json => serde_json::to_string(&w)?,
                Format::Csv => w.iter().map(|n| format!("{n}\n")).collect(),
            })
        }
        Command::Ao { n, delta } => {
            if *n == 0 {
                return Err("--n must be positive".into());
            }
            let (set, _) = approx_order_report(*n, &delta.eval_at(*n));
            Outcome::ok(match format {
                Format::Json => serde_json::to_string(&set)?,
                Format::Csv => arcs_csv(&set),
            })
        }
        Command::Measure { set, delta, n_min, n_max, pred } => {
            let (params, measure) = match set {
                Some(path) => (serde_json::json!({ "set": path.display().to_string() }), load_set(path)?.measure()),
                None => {
                    let (Some(delta), Some(n_min), Some(n_max)) = (delta, n_min, n_max) else {
                        return Err("measure needs --set, or --delta with --n-min and --n-max".into());
                    };
                    let spec = TailUnionSpec::new(*n_min, *n_max, pred.clone(), delta.clone())?;
                    let params = serde_json::json!({
                        "delta": delta, "n_min": n_min, "n_max": n_max, "pred": pred.to_string(),
                    });
                    (params, tail_union(&spec).measure())
                }
            };
            let report = ExperimentReport {
                experiment: "measure".into(),
                params,
                rows: vec![ReportRow::new("measure", measure)],
                verdicts: Vec::new(),
                classification: None,
            };
            Outcome::report(&report, format)
        }
        Command::ErgodicSearch { n, x, grid } => {
            let found = AffineCircleMap::new(*n, x.clone()).invariant_set_search(*grid)?;
            Outcome::ok(match format {
                Format::Json => serde_json::to_string_pretty(&found)?,
                Format::Csv => found.iter().map(|s| format!("{}\n", serde_json::to_string(s).unwrap())).collect(),
            })
        }
        Command::Density { set, x, eps } => {
            let profile = density_profile(&load_set(set)?, x, eps)?;
            Outcome::ok(match format {
                Format::Csv => {
                    let mut out = String::from("eps,ratio\n");
                    for (e, r) in &profile {
                        out.push_str(&format!("{e},{r}\n"));
                    }
                    out
                }
                Format::Json => {
                    let rows: Vec<_> = profile
                        .iter()
                        .map(|(e, r)| serde_json::json!({ "eps": e.to_string(), "ratio": r.to_string() }))
                        .collect();
                    serde_json::to_string_pretty(&rows)?
                }
            })
        }
    })
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cli = density_defaults_to_csv(cli, &args);

    match run(&cli) {
        Ok(outcome) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &outcome.text),
                None => {
                    let mut stdout = std::io::stdout().lock();
                    stdout.write_all(outcome.text.as_bytes()).and_then(|_| {
                        if outcome.text.ends_with('\n') {
                            Ok(())
                        } else {
                            stdout.write_all(b"\n")
                        }
                    })
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VERDICT_FAILED)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

/// `density` writes CSV unless `--output` was given.
fn density_defaults_to_csv(mut cli: Cli, args: &[String]) -> Cli {
    let explicit = args.iter().any(|a| a == "--output" || a.starts_with("--output="));
    if matches!(cli.command, Command::Density { .. }) && !explicit {
        cli.output = Format::Csv;
    }
    cli
}
