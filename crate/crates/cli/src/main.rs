use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use hktkit_core::catalog::Catalog;
use hktkit_core::hkt::SearchConfig;
use hktkit_core::report::{self, Command, InstanceDescriptor, Overrides, RunOptions};
use hktkit_core::scalar::parse_rational;
use hktkit_core::Error;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CommandArg {
    Validate,
    Cohomology,
    Qd,
    Hkt,
    Full,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::Validate => Command::Validate,
            CommandArg::Cohomology => Command::Cohomology,
            CommandArg::Qd => Command::Qd,
            CommandArg::Hkt => Command::Hkt,
            CommandArg::Full => Command::Full,
        }
    }
}

/// Exact invariant cohomology and HKT checks for hypercomplex Lie algebras.
#[derive(Debug, Parser)]
#[command(name = "hktkit", version)]
struct Args {
    command: CommandArg,

    /// Catalog instance: torus8, rxh7, solv4, or rxh7(P/Q).
    #[arg(long, conflicts_with = "file")]
    instance: Option<String>,

    /// Instance file (JSON with a Salamon string or structure equations and I, J matrices).
    #[arg(long)]
    file: Option<PathBuf>,

    /// Family parameter as P/Q.
    #[arg(long)]
    t: Option<String>,

    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    json: Option<PathBuf>,

    /// Comma-separated parameters for a family sweep ("1/4,1/3,1/2").
    #[arg(long, conflicts_with_all = ["file", "t"])]
    sweep: Option<String>,

    /// Restrict the HKT decision to these criteria (repeatable).
    #[arg(long = "criterion")]
    criteria: Vec<String>,

    /// Largest lattice coefficient tried by the positive-cone searches.
    #[arg(long, default_value_t = SearchConfig::default().bound)]
    bound: i64,

    /// Include per-section timings (makes output non-reproducible).
    #[arg(long)]
    timings: bool,

    /// Skip the d^2 = 0 check.
    #[arg(long)]
    unchecked_jacobi: bool,

    /// Do not warn about non-nilpotent algebras.
    #[arg(long)]
    skip_nilpotency_warning: bool,
}

fn emit(json: &str, path: Option<&PathBuf>) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, json).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn execute(args: &Args) -> Result<i32, Error> {
    let catalog = Catalog::builtin();
    let command = Command::from(args.command);
    let overrides = Overrides {
        skip_nilpotency_warning: args.skip_nilpotency_warning,
        unchecked_jacobi: args.unchecked_jacobi,
    };
    let opts = RunOptions {
        search: SearchConfig {
            bound: args.bound,
            ..SearchConfig::default()
        },
        criteria: (!args.criteria.is_empty()).then(|| args.criteria.clone()),
        timings: args.timings,
    };
    if args.bound < 1 {
        return Err(Error::Unsupported("--bound must be at least 1".into()));
    }

    if let Some(list) = &args.sweep {
        let family = args.instance.as_deref().unwrap_or("rxh7");
        let ts = report::parse_t_list(list)?;
        let sweep = report::sweep(family, &ts, overrides, command, &catalog, &opts);
        emit(&sweep.to_json(), args.json.as_ref())?;
        for row in &sweep.summary {
            let h01 = row.h01.map_or("-".to_string(), |h| h.to_string());
            let hkt = row.hkt.as_deref().unwrap_or("-");
            match &row.error {
                Some(e) => eprintln!("t={}: error: {e}", row.t),
                None => eprintln!("t={}: h01={h01} hkt={hkt}", row.t),
            }
        }
        return Ok(sweep.exit_code());
    }

    let t = args.t.as_deref().map(parse_rational).transpose()?;
    let desc = match (&args.instance, &args.file) {
        (Some(id), None) => InstanceDescriptor::parse_builtin(id, t)?,
        (None, Some(path)) => {
            if t.is_some() {
                return Err(Error::Unsupported("--t applies only to catalog instances".into()));
            }
            InstanceDescriptor::file(path)
        }
        _ => return Err(Error::Unsupported("give exactly one of --instance or --file".into())),
    }
    .with_overrides(overrides);
    let report = report::run(&desc, command, &catalog, &opts)?;
    for w in &report.instance.warnings {
        eprintln!("{w}");
    }
    emit(&report.to_json(), args.json.as_ref())?;
    Ok(0)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
