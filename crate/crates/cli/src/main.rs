use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use superhol::pipeline::selftest::selftest;
use superhol::pipeline::{run_problem_str, table_rows, Overrides, TableFamily};

#[derive(Parser)]
#[command(name = "superhol", version, about = "Holonomy, curvature and Berger computations for supermanifold connections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run problem files and emit JSON reports.
    Run {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Write the report here instead of stdout (single file only).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the holonomy derivative-order cap.
        #[arg(long = "cap-order")]
        cap_order: Option<usize>,
        /// Enable float transport validation with this many RK4 steps per segment.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Run the bundled regression corpus.
    Selftest {
        #[arg(long, hide = true)]
        mutate: bool,
    },
    /// Berger, prolongation and Spencer rows for a classical family.
    Tables {
        family: TableFamily,
        #[arg(long = "max-dim", default_value_t = 3)]
        max_dim: usize,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { files, out, cap_order, steps } => run(&files, out, Overrides { cap_order, transport_steps: steps }),
        Command::Selftest { mutate } => {
            let report = selftest(mutate);
            for c in &report.cases {
                eprintln!("{:<28} {:<4} {:>7} ms  {}", c.name, if c.pass { "ok" } else { "FAIL" }, c.millis, c.detail);
            }
            eprintln!("{} passed, {} failed in {} ms", report.passed, report.failed, report.runtime_ms);
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Command::Tables { family, max_dim } => {
            println!("{}", serde_json::to_string_pretty(&table_rows(family, max_dim)).expect("table serializes"));
            ExitCode::SUCCESS
        }
    }
}

fn run(files: &[PathBuf], out: Option<PathBuf>, overrides: Overrides) -> ExitCode {
    if out.is_some() && files.len() > 1 {
        eprintln!("error: --out needs exactly one problem file");
        return ExitCode::from(2);
    }
    let mut code = ExitCode::SUCCESS;
    for file in files {
        let text = match fs::read_to_string(file) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {}: {e}", file.display());
                code = ExitCode::from(2);
                continue;
            }
        };
        let report = match run_problem_str(&text, overrides) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {}: {e}", file.display());
                code = ExitCode::from(2);
                continue;
            }
        };
        eprintln!("{}: {}", file.display(), report.summary());
        for e in report.errors() {
            eprintln!("  error: {e}");
        }
        match &out {
            Some(path) => {
                if let Err(e) = fs::write(path, report.to_pretty()) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            None => print!("{}", report.to_pretty()),
        }
        if !report.ok() && code == ExitCode::SUCCESS {
            code = ExitCode::FAILURE;
        }
    }
    code
}
