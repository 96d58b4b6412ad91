use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ccr_cli::config::{RunConfig, Settings};
use ccr_cli::{commands, verify, CliError};

/// Exact operator algebra, Heisenberg flows, propagators and path integrals.
#[derive(Parser)]
#[command(name = "ccr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the normal-ordered form of an expression.
    Normord {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Print the normal-ordered commutator [A, B].
    Comm {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Taylor coefficients of X(t) and P(t).
    Series(RunArgs),
    /// CSV of the closed-form kernel U(x_b, x_a) on the grid.
    Kernel {
        #[command(flatten)]
        run: RunArgs,
        /// Print the coefficients a, b, c, d, e, A instead.
        #[arg(long)]
        coefficients: bool,
    },
    /// CSV of a Gaussian packet evolved by the closed-form kernel.
    Evolve(RunArgs),
    /// Time-sliced path integral; CSV convergence report on stdout.
    Pathint(RunArgs),
    /// Run the invariant suite.
    Verify,
}

#[derive(Args)]
struct RunArgs {
    /// `key = value` settings file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// free, harmonic or linear.
    #[arg(long)]
    model: Option<String>,
    /// Force polynomial in X, e.g. "-X - (1/10)*X^3". Overrides --model.
    #[arg(long, allow_hyphen_values = true)]
    force: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    f0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<String>,
    /// Grid points.
    #[arg(long)]
    n: Option<String>,
    /// Total time.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    /// Comma-separated slice counts for pathint.
    #[arg(long)]
    steps: Option<String>,
    /// Series truncation order.
    #[arg(long)]
    order: Option<String>,
    /// Initial packet centre, momentum and amplitude width.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    p0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::new(),
        };
        let mut flags = Settings::new();
        let pairs = [
            ("model", &self.model),
            ("force", &self.force),
            ("m", &self.m),
            ("omega", &self.omega),
            ("f0", &self.f0),
            ("x_min", &self.x_min),
            ("x_max", &self.x_max),
            ("n", &self.n),
            ("t", &self.t),
            ("steps", &self.steps),
            ("order", &self.order),
            ("x0", &self.x0),
            ("p0", &self.p0),
            ("sigma", &self.sigma),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                flags.set(key, v)?;
            }
        }
        if let Some(p) = &self.output {
            flags.set("output", &p.to_string_lossy())?;
        }
        Ok(RunConfig::from_settings(&base.overlay(flags))?)
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("CCR_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("CCR_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

/// The configured output file, or stdout.
fn sink(cfg: &RunConfig) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cfg.output {
        Some(path) => {
            let f = File::create(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let stdout = io::stdout();
    let mut log = io::stderr().lock();
    match cli.command {
        Command::Normord { expr } => commands::normord(&expr, &mut stdout.lock()),
        Command::Comm { a, b } => commands::comm(&a, &b, &mut stdout.lock()),
        Command::Series(args) => commands::series(&args.resolve()?, &mut stdout.lock()),
        Command::Kernel { run, coefficients } => {
            let cfg = run.resolve()?;
            let mut out = sink(&cfg)?;
            commands::kernel(&cfg, coefficients, &mut out)?;
            Ok(out.flush()?)
        }
        Command::Evolve(args) => {
            let cfg = args.resolve()?;
            let mut out = sink(&cfg)?;
            commands::evolve(&cfg, &mut out, &mut log)?;
            Ok(out.flush()?)
        }
        Command::Pathint(args) => commands::pathint(&args.resolve()?, &mut stdout.lock(), &mut log),
        Command::Verify => {
            let checks = verify::run_all();
            let failed = verify::write_report(&checks, &mut stdout.lock())?;
            if failed > 0 {
                Err(CliError::VerifyFailed(failed))
            } else {
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
