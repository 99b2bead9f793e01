use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use wentzell_core::probes::Verdict;
use wentzell_lab::config::{Format, SUBCOMMANDS};
use wentzell_lab::{run, ExperimentConfig, LabError, RunOptions};

/// Runs one experiment described by a JSON config and writes its report.
#[derive(Debug, Parser)]
#[command(name = "wentzell-lab", version)]
struct Cli {
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUBCOMMANDS))]
    subcommand: String,
    #[arg(long)]
    config: PathBuf,
    /// Report directory; overrides `output.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of `json,csv`; overrides `output.formats`.
    #[arg(long, value_delimiter = ',', value_parser = parse_format)]
    format: Option<Vec<Format>>,
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s.trim() {
        "json" => Ok(Format::Json),
        "csv" => Ok(Format::Csv),
        other => Err(format!("unknown format {other:?}, expected json or csv")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    let result = ExperimentConfig::load(&cli.config).and_then(|config| {
        let opts = RunOptions {
            out: cli.out.clone(),
            formats: cli.format.clone(),
            seed: cli.seed,
        };
        run(&cli.subcommand, &config, &opts)
    });
    match result {
        Ok((envelope, paths)) => {
            for p in &paths {
                println!("wrote {}", p.display());
            }
            println!("{}: {}", envelope.command, envelope.verdict);
            match envelope.verdict {
                Verdict::Fail => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = match &e {
                LabError::Core { .. } | LabError::Config(_) | LabError::Io(_) => e.exit_code(),
            };
            ExitCode::from(code as u8)
        }
    }
}
