use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use iwalambda::ErrorKind;

mod commands;
mod render;
mod settings;

use settings::{CliError, Format, Settings};

#[derive(Parser)]
#[command(name = "iwalambda", version, about = "Character-level lambda invariants of abelian fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// List the ℓ-adic irreducible characters of Δ.
    Chars,
    /// Defect character of a tame prime set.
    Defect,
    /// λ-shift prediction for one parity (real, imaginary or wild).
    Lambda,
    /// Check the reflection identity for (S, T).
    Reflect,
    /// Level orders and parameter fit for an elementary Λ-module.
    Simulate,
    /// Ambiguous class number formula, in ℓ-valuations.
    Ambig,
    /// Tate cohomology of a finite module with a cyclic action.
    Cohomology,
}

#[derive(Args)]
struct Flags {
    #[arg(long, global = true)]
    ell: Option<String>,
    #[arg(long, global = true)]
    conductor: Option<String>,
    /// Generators of H ≤ (Z/m)*, comma separated.
    #[arg(long, global = true, allow_hyphen_values = true)]
    subgroup: Option<String>,
    #[arg(long, global = true)]
    primes: Option<String>,
    #[arg(long = "S", global = true)]
    s: Option<String>,
    #[arg(long = "T", global = true)]
    t: Option<String>,
    #[arg(long, global = true)]
    parity: Option<String>,
    #[arg(long, global = true)]
    rho: Option<String>,
    /// Distinguished polynomials in T, comma separated.
    #[arg(long, global = true, allow_hyphen_values = true)]
    poly: Option<String>,
    #[arg(long, global = true)]
    mu: Option<String>,
    #[arg(long, global = true)]
    n: Option<String>,
    /// Exponent offset: quotients of exponent ℓ^(n+k).
    #[arg(long, global = true)]
    k: Option<String>,
    #[arg(long, global = true)]
    h: Option<String>,
    #[arg(long, global = true)]
    ram: Option<String>,
    #[arg(long, global = true)]
    deg: Option<String>,
    #[arg(long = "unit-index", global = true)]
    unit_index: Option<String>,
    /// Cyclic orders of the module generators, comma separated.
    #[arg(long, global = true)]
    orders: Option<String>,
    /// Action matrix: rows separated by ';', entries by ','.
    #[arg(long, global = true, allow_hyphen_values = true)]
    sigma: Option<String>,
    #[arg(long = "order-n", global = true)]
    order_n: Option<String>,
    /// Run the brute-force oracle and report agreement.
    #[arg(long, global = true)]
    verify: bool,
    #[arg(long, global = true, value_parser = ["json", "table"])]
    format: Option<String>,
    /// Flat key = value file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

impl Flags {
    fn into_map(self) -> BTreeMap<String, String> {
        let pairs = [
            ("ell", self.ell),
            ("conductor", self.conductor),
            ("subgroup", self.subgroup),
            ("primes", self.primes),
            ("S", self.s),
            ("T", self.t),
            ("parity", self.parity),
            ("rho", self.rho),
            ("poly", self.poly),
            ("mu", self.mu),
            ("n", self.n),
            ("k", self.k),
            ("h", self.h),
            ("ram", self.ram),
            ("deg", self.deg),
            ("unit-index", self.unit_index),
            ("orders", self.orders),
            ("sigma", self.sigma),
            ("order-n", self.order_n),
            ("format", self.format),
            ("verify", self.verify.then(|| "true".to_string())),
        ];
        pairs.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))).collect()
    }
}

fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Lib(err) => match err.kind() {
            ErrorKind::InvalidField => 2,
            ErrorKind::InvalidPrimeSet => 3,
            ErrorKind::ScaleExceeded => 4,
            ErrorKind::InconsistentData => 5,
            ErrorKind::InvalidInput => 1,
        },
        CliError::Usage(_) | CliError::OracleMismatch(_) => 1,
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    let config = cli.flags.config.clone();
    let settings = Settings::new(cli.flags.into_map(), config.as_deref())?;
    let format = settings.format()?;
    let report = match cli.command {
        Command::Chars => commands::chars(&settings)?,
        Command::Defect => commands::defect(&settings)?,
        Command::Lambda => commands::lambda(&settings)?,
        Command::Reflect => commands::reflect(&settings)?,
        Command::Simulate => commands::simulate(&settings)?,
        Command::Ambig => commands::ambig(&settings)?,
        Command::Cohomology => commands::cohomology(&settings)?,
    };
    Ok(match format {
        Format::Json => report.render_json(),
        Format::Table => report.render_table(),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
