use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use kropina::config::parse_assignment;
use kropina::{builtin, run, RunConfig};

#[derive(Parser)]
#[command(
    name = "kropina",
    version,
    about = "Verify curvature identities of Kropina metrics F = α²/β"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks of a config file or builtin fixture.
    Run {
        #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
        config: Option<PathBuf>,
        #[arg(long)]
        builtin: Option<String>,
        /// Builtin parameter override, `NAME=VALUE`.
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Tolerance override, `CHECK=EPS`.
        #[arg(long = "tol", value_name = "CHECK=EPS")]
        tolerances: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the config of a builtin fixture.
    Config {
        #[arg(long)]
        builtin: String,
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
    },
    /// List builtin fixtures.
    List,
}

fn overrides(params: &[String]) -> anyhow::Result<BTreeMap<String, f64>> {
    params.iter().map(|p| parse_assignment(p)).collect()
}

fn load(
    config: Option<PathBuf>,
    name: Option<String>,
    params: &[String],
    samples: Option<usize>,
    seed: Option<u64>,
    tolerances: &[String],
) -> anyhow::Result<RunConfig> {
    let mut cfg = match (config, name) {
        (Some(path), _) => {
            anyhow::ensure!(params.is_empty(), "--param applies to builtins only");
            RunConfig::load(&path)?
        }
        (None, Some(name)) => builtin(&name, &overrides(params)?)?,
        (None, None) => anyhow::bail!("either --config or --builtin is required"),
    };
    if let Some(n) = samples {
        cfg.samples = n;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    for t in tolerances {
        cfg.set_tolerance(t)?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for name in kropina::builtins::NAMES {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
        Command::Config {
            builtin: name,
            params,
        } => match overrides(&params).and_then(|o| builtin(&name, &o)) {
            Ok(cfg) => {
                println!("{}", cfg.to_json());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
        Command::Run {
            config,
            builtin: name,
            params,
            samples,
            seed,
            tolerances,
            format,
            out,
        } => {
            let report = match load(config, name, &params, samples, seed, &tolerances)
                .and_then(|c| run(&c))
            {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("invalid config: {e:#}");
                    return ExitCode::from(2);
                }
            };
            let text = match format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            };
            let written = match &out {
                Some(path) => std::fs::write(path, &text)
                    .with_context(|| format!("writing {}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
