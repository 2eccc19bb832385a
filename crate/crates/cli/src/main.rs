use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qreider::claim::Part;
use qreider::criteria::SearchConfig;
use qreider_cli::report::{to_json, to_text, Report};
use qreider_cli::run::claim_report;
use qreider_cli::{parse, run, Options};

/// Exact checks of adjoint linear systems on surfaces.
#[derive(Parser)]
#[command(name = "qreider", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the queries of a .surf document (`-` reads stdin).
    Check {
        file: String,
        #[arg(long)]
        json: bool,
        /// Dyadic precision levels tried by witness searches.
        #[arg(long, default_value_t = SearchConfig::default().depth)]
        depth: u32,
    },
    /// Run the Hirzebruch surface claim for F_n.
    Hirzebruch {
        #[arg(long)]
        n: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
        part: u32,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = SearchConfig::default().depth)]
        depth: u32,
    },
}

const USAGE_ERROR: u8 = 1;
const QUERY_ERROR: u8 = 2;

fn emit(reports: &[Report], json: bool) -> ExitCode {
    let text = if json {
        serde_json::to_string_pretty(&to_json(reports)).expect("serializable") + "\n"
    } else {
        to_text(reports)
    };
    // a closed pipe (e.g. `| head`) is not an error of the run
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    if reports.iter().any(Report::is_error) {
        ExitCode::from(QUERY_ERROR)
    } else {
        ExitCode::SUCCESS
    }
}

fn read_input(file: &str) -> std::io::Result<String> {
    if file == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(file)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(USAGE_ERROR) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Check { file, json, depth } => {
            let src = match read_input(&file) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: cannot read {file}: {e}");
                    return ExitCode::from(USAGE_ERROR);
                }
            };
            let doc = match parse(&src) {
                Ok(d) => d,
                Err(e) => {
                    eprintln!("{file}: {e}");
                    return ExitCode::from(USAGE_ERROR);
                }
            };
            match run(&doc, &Options { depth }) {
                Ok(reports) => emit(&reports, json),
                Err(e) => {
                    eprintln!("{file}: {e}");
                    ExitCode::from(USAGE_ERROR)
                }
            }
        }
        Command::Hirzebruch { n, part, m, json, depth } => {
            let part = if part == 1 { Part::Free } else { Part::VeryAmple };
            let report = claim_report(n, part, m, &SearchConfig { depth }).unwrap_or_else(|e| {
                let mut r = Report::error(format!("hirzebruch --n {n}"), e);
                r.query = format!("hirzebruch-claim n={n}");
                r
            });
            emit(&[report], json)
        }
    }
}
