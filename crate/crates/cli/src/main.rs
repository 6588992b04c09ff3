use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use jmfrac_cli::config::{Command, RawConfig, RunConfig};
use jmfrac_cli::{commands, validate, CliError};

/// Fractional Jaulent-Miodek solvers: error tables, hbar-curves, surfaces
/// and an oracle validation report.
#[derive(Debug, Parser)]
#[command(name = "jmfrac", version)]
struct Args {
    command: Command,
    /// cfrdtm, qhatm or both
    #[arg(long)]
    method: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Fractional order; list or a:b:step range (hbar-curve accepts several)
    #[arg(long, allow_hyphen_values = true)]
    alpha: Vec<String>,
    /// Order of the w equation (defaults to alpha)
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Convergence-control parameter; list or a:b:step range
    #[arg(long, allow_hyphen_values = true)]
    hbar: Vec<String>,
    #[arg(long)]
    n: Vec<String>,
    /// Truncation order (K for cfrdtm, max_m for qhatm)
    #[arg(long)]
    order: Option<String>,
    /// x values: repeat the flag, give a comma list or a:b:step
    #[arg(long, allow_hyphen_values = true)]
    x: Vec<String>,
    /// t values: repeat the flag, give a comma list or a:b:step
    #[arg(long, allow_hyphen_values = true)]
    t: Vec<String>,
    /// auto, plus or minus
    #[arg(long)]
    direction: Option<String>,
    /// Mark the flattest point of each hbar-curve
    #[arg(long)]
    plateau: bool,
    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value configuration file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the effective configuration to this file
    #[arg(long)]
    dump_config: Option<PathBuf>,
}

fn io_error(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn effective_config(args: &Args) -> Result<RunConfig, CliError> {
    let file = match &args.config {
        Some(path) => RawConfig::parse(&std::fs::read_to_string(path).map_err(io_error(path))?)?,
        None => RawConfig::default(),
    };
    let mut flags = RawConfig::default();
    let scalars = [
        ("method", &args.method),
        ("lambda", &args.lambda),
        ("beta", &args.beta),
        ("order", &args.order),
        ("direction", &args.direction),
    ];
    for (key, value) in scalars {
        if let Some(v) = value {
            flags.set(key, vec![v.clone()])?;
        }
    }
    for (key, values) in [("alpha", &args.alpha), ("hbar", &args.hbar), ("n", &args.n), ("x", &args.x), ("t", &args.t)]
    {
        if !values.is_empty() {
            flags.set(key, values.clone())?;
        }
    }
    if args.plateau {
        flags.set("plateau", vec!["true".into()])?;
    }
    if let Some(out) = &args.out {
        flags.set("out", vec![out.display().to_string()])?;
    }
    RunConfig::resolve(args.command, &file.overridden_by(flags))
}

fn emit(config: &RunConfig, text: &str) -> Result<(), CliError> {
    match &config.out {
        Some(path) => std::fs::write(path, text).map_err(io_error(path)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(args: &Args) -> Result<bool, CliError> {
    let config = effective_config(args)?;
    if let Some(path) = &args.dump_config {
        std::fs::write(path, config.dump()).map_err(io_error(path))?;
    }
    let (text, passed) = match config.command {
        Command::Table => (commands::cmd_table(&config)?, true),
        Command::HbarCurve => (commands::cmd_hbar_curve(&config)?, true),
        Command::Surface => (commands::cmd_surface(&config)?, true),
        Command::Validate => {
            let report = validate::run(&config, validate::Kernels::default());
            (report.render(), report.passed())
        }
    };
    emit(&config, &text)?;
    Ok(passed)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("jmfrac: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
