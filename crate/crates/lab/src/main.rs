use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use transport_lab::{run_study, write_outputs, Comparison, LabError, Override, StudyConfig, StudyKind};

/// Environment variable naming the default output root.
const OUT_ENV: &str = "TRANSPORT_LAB_OUT";

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "transport-lab",
    version,
    about = "Numerical studies of linear transport by divergence-free fields",
    after_help = "Exit status: 0 all checks pass, 1 a check failed, 2 usage or config error.\n\
                  Output goes to --out, else [study].out, else $TRANSPORT_LAB_OUT/<name>, else ./out/<name>."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Study config file (alternative to the positional argument)
    #[arg(long = "config", value_name = "PATH", global = true)]
    config_flag: Option<PathBuf>,

    /// Output directory
    #[arg(long, value_name = "DIR", global = true)]
    out: Option<PathBuf>,

    /// Override a config value, e.g. --set grid.n=64 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,

    /// Only report failures
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Args)]
struct Target {
    /// Study config file (TOML)
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Norm conservation, max principle, boundary flux and reversibility
    Conservation(Target),
    /// Commutator remainder decay and the mollified-residual identity
    Mollify(Target),
    /// Weak and renormalized residuals over the test-function bank
    Renorm(Target),
    /// Convergence of perturbed problems
    Stability(Target),
    /// Classical solve with a field dump
    Solve(Target),
    /// Parse, validate and echo a config
    ValidateConfig(Target),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, LabError> {
    let (kind, target) = match cli.command {
        Command::Conservation(t) => (Some(StudyKind::Conservation), t),
        Command::Mollify(t) => (Some(StudyKind::Mollification), t),
        Command::Renorm(t) => (Some(StudyKind::Renormalization), t),
        Command::Stability(t) => (Some(StudyKind::Stability), t),
        Command::Solve(t) => (Some(StudyKind::Solve), t),
        Command::ValidateConfig(t) => (None, t),
    };
    let path = match (target.config, cli.config_flag) {
        (Some(p), None) | (None, Some(p)) => p,
        (Some(_), Some(_)) => return Err(usage("give the config either positionally or with --config, not both")),
        (None, None) => return Err(usage("missing config file")),
    };
    let overrides = cli
        .set
        .iter()
        .map(|s| s.parse::<Override>())
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = StudyConfig::load(&path, &overrides)?;

    let Some(kind) = kind else {
        if !cli.quiet {
            print!("{}", cfg.to_toml());
        }
        return Ok(ExitCode::SUCCESS);
    };

    let dir = cli
        .out
        .or_else(|| cfg.study.out.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(|root| PathBuf::from(root).join(&cfg.study.name)))
        .unwrap_or_else(|| PathBuf::from("out").join(&cfg.study.name));
    let run = run_study(kind, &cfg)?;
    write_outputs(&dir, &run, &cfg)?;

    let o = &run.outcome;
    for c in &o.checks {
        if cli.quiet && c.passed {
            continue;
        }
        let op = match c.comparison {
            Comparison::Below => "<",
            Comparison::AtMost => "<=",
            Comparison::Above => ">",
        };
        println!(
            "{} {}: {:.3e} {op} {:.3e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.tolerance
        );
    }
    if !cli.quiet {
        println!(
            "{} {}: {} ({} checks) -> {}",
            kind.label(),
            o.study,
            if o.passed { "PASS" } else { "FAIL" },
            o.checks.len(),
            dir.display()
        );
    }
    Ok(if o.passed { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAILED) })
}

fn usage(msg: &str) -> LabError {
    LabError::Config(transport_lab::ConfigError {
        field: String::new(),
        message: msg.to_owned(),
    })
}
