mod commands;
mod config;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Context, KineticKind};
use config::Config;
use output::{write_manifest, write_table, Manifest, Outcome};

#[derive(Parser)]
#[command(name = "corrdyn", version, about = "Correlation dynamics of quantum many-particle systems")]
struct Cli {
    /// JSON configuration; defaults are used for anything omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV tables and manifest.json.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Treat a violated convergence guard as an error.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the correlation hierarchy on a time grid.
    VnSolve,
    /// Marginal series and its BBGKY residual.
    BbgkySeries,
    /// Generating functional of the correlation operators.
    Functional,
    /// Integrate a kinetic equation.
    Kinetic {
        #[arg(value_enum)]
        kind: KineticKind,
    },
    /// Mean-field convergence sweep over epsilon.
    MeanfieldSweep,
    /// Run the property suite on the configured model.
    Verify,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VnSolve => "vn-solve",
            Command::BbgkySeries => "bbgky-series",
            Command::Functional => "functional",
            Command::Kinetic { kind: KineticKind::Vlasov } => "kinetic vlasov",
            Command::Kinetic { kind: KineticKind::Hartree } => "kinetic hartree",
            Command::Kinetic { kind: KineticKind::VlasovCorr } => "kinetic vlasov-corr",
            Command::Kinetic { kind: KineticKind::Generalized } => "kinetic generalized",
            Command::MeanfieldSweep => "meanfield-sweep",
            Command::Verify => "verify",
        }
    }
}

fn exit_code(e: &corrdyn::Error) -> u8 {
    match e {
        corrdyn::Error::Resource(_) => 3,
        corrdyn::Error::Domain(_) | corrdyn::Error::Invalid(_) => 1,
    }
}

fn run(cli: &Cli) -> corrdyn::Result<Outcome> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    cfg.validate()?;
    let ctx = Context { cfg, seed: cli.seed, threads: cli.threads.max(1) };
    match cli.command {
        Command::VnSolve => commands::vn_solve(&ctx),
        Command::BbgkySeries => commands::bbgky_series(&ctx),
        Command::Functional => commands::functional(&ctx),
        Command::Kinetic { kind } => commands::kinetic(&ctx, kind),
        Command::MeanfieldSweep => commands::meanfield(&ctx),
        Command::Verify => verify::verify(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let code: u8 = if cli.strict && !outcome.guards_hold() {
        1
    } else if !outcome.checks_pass() {
        2
    } else {
        0
    };
    for g in outcome.guards.iter().filter(|g| g.status != corrdyn::functionals::GuardStatus::Within) {
        eprintln!("warning: guard {} violated ({} >= {})", g.name, g.value, g.bound);
    }
    for c in outcome.checks.iter().filter(|c| !c.pass) {
        let tag = if c.informational { "info" } else { "FAIL" };
        eprintln!("{tag}: {} = {:e} (tolerance {:e})", c.name, c.value, c.tolerance);
    }

    if let Err(e) = std::fs::create_dir_all(&cli.out) {
        eprintln!("error: {}: {e}", cli.out.display());
        return ExitCode::from(1);
    }
    let mut outputs = Vec::new();
    for t in &outcome.tables {
        match write_table(&cli.out, t) {
            Ok(p) => outputs.push(p.display().to_string()),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        }
    }
    let cfg = cli.config.as_ref().map(|p| Config::load(p).expect("loaded above")).unwrap_or_default();
    let manifest = Manifest {
        command: cli.command.name(),
        version: env!("CARGO_PKG_VERSION"),
        seed: cli.seed,
        threads: cli.threads,
        strict: cli.strict,
        config: &cfg,
        truncation_n_max: outcome.truncation,
        guards: &outcome.guards,
        checks: &outcome.checks,
        results: &outcome.results,
        outputs,
        exit_code: code as i32,
    };
    if let Err(e) = write_manifest(&cli.out, &manifest) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let passed = outcome.checks.iter().filter(|c| c.pass).count();
    println!("{}: {passed}/{} checks pass, exit {code}", cli.command.name(), outcome.checks.len());
    ExitCode::from(code)
}
