use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use enlarge_scenario::{parse_config, run_check_suite, run_scenario, run_sweep, CheckHooks, ScenarioError};

#[derive(Parser)]
#[command(name = "enlarge", version, about = "Run enlarged-space simulation scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its outputs.
    Run {
        config: PathBuf,
        /// Output directory; defaults to the config's `output`, then `out/<name>`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the invariant suite.
    Check {
        /// Print the machine-readable report.
        #[arg(long)]
        json: bool,
    },
    /// Repeat a scenario over values of one numeric field.
    Sweep {
        template: PathBuf,
        /// Dotted path of the field, e.g. `dynamics.mass`.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<f64>,
        /// Directory for `sweep.csv` and per-run outputs; the table goes to stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, ScenarioError> {
    std::fs::read_to_string(path).map_err(|e| ScenarioError::config("config", format!("{}: {e}", path.display())))
}

fn run(config: &Path, out: Option<PathBuf>) -> Result<i32, ScenarioError> {
    let cfg = parse_config(&read(config)?)?;
    let dir = out
        .or_else(|| cfg.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| Path::new("out").join(&cfg.name));
    let res = run_scenario(&cfg)?;
    res.write_outputs(&dir)?;
    for w in &res.warnings {
        eprintln!("warning: {w}");
    }
    if res.passed {
        println!("{}: ok, norm drift {:.3e}, outputs in {}", cfg.name, res.norm_drift, dir.display());
        Ok(0)
    } else {
        eprintln!(
            "{}: norm drift {:.3e} exceeds tolerance {:.1e}",
            cfg.name,
            res.norm_drift,
            cfg.norm_tolerance()
        );
        Ok(2)
    }
}

fn sweep(template: &Path, param: &str, values: &[f64], out: Option<PathBuf>) -> Result<i32, ScenarioError> {
    let doc: serde_json::Value =
        serde_json::from_str(&read(template)?).map_err(|e| ScenarioError::config("json", e.to_string()))?;
    let res = run_sweep(&doc, param, values)?;
    match out {
        Some(dir) => {
            res.write_outputs(&dir)?;
            println!("{} runs, table in {}", res.rows.len(), dir.join("sweep.csv").display());
        }
        None => print!("{}", res.to_csv()?),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, out } => run(&config, out),
        Command::Check { json } => {
            let report = run_check_suite(&CheckHooks::default());
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{}", report.to_text());
            }
            Ok(if report.passed { 0 } else { 2 })
        }
        Command::Sweep {
            template,
            param,
            values,
            out,
        } => sweep(&template, &param, &values, out),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
