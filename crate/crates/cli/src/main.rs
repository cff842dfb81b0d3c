mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{Context, EalaOptions};
use report::Report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Library(#[from] lietor::error::Error),
}

#[derive(Parser)]
#[command(name = "lietor", version, about = "Exact computations with root systems, extended affine reflection systems and Lie tori")]
struct Cli {
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 20_240_601)]
    seed: u64,
    /// Worker threads for windowed checks (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Report wall-clock time.
    #[arg(long, global = true)]
    timing: bool,
    /// Write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finite root systems.
    Roots {
        #[command(subcommand)]
        op: RootsOp,
    },
    /// Pre-reflection systems.
    Refl {
        #[command(subcommand)]
        op: ReflOp,
    },
    /// Affine reflection systems.
    Ars {
        #[command(subcommand)]
        op: ArsOp,
    },
    /// Quantum tori.
    Qtorus {
        #[command(subcommand)]
        op: QtorusOp,
    },
    /// Graded coordinate algebras.
    Alg {
        #[command(subcommand)]
        op: AlgOp,
    },
    /// sl_n over a graded algebra.
    Sl {
        #[command(subcommand)]
        op: SlOp,
    },
    /// Universal central extension of sl_n(A).
    Uce {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value = "laurent")]
        coord: String,
        #[arg(long, default_value_t = 5)]
        window: i64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Affine Kac–Moody algebras of sl_m.
    Affine {
        #[command(subcommand)]
        op: AffineOp,
    },
    /// Windowed first cyclic homology.
    Hc1 {
        #[arg(long, default_value = "laurent")]
        coord: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
        degree: Vec<i64>,
        #[arg(long, default_value_t = 8)]
        max_window: i64,
    },
    /// Invariant affine reflection algebras built from sl_n(A).
    Eala {
        #[command(subcommand)]
        op: EalaOp,
    },
    /// Reference tables.
    Table {
        #[arg(value_parser = ["affine"])]
        which: String,
    },
}

#[derive(Subcommand)]
enum RootsOp {
    Build {
        #[arg(long)]
        family: String,
        #[arg(long)]
        rank: Option<usize>,
    },
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum ReflOp {
    Check {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum ArsOp {
    Build {
        #[arg(long = "type")]
        ty: String,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = 1)]
        tier: i64,
        #[arg(long)]
        window: Option<i64>,
    },
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        window: Option<i64>,
    },
}

#[derive(Subcommand)]
enum QtorusOp {
    /// Lattice Γ of central degrees, cross-checked by a box scan.
    Centre {
        #[arg(long)]
        q: PathBuf,
        #[arg(long, default_value_t = 6)]
        window: i64,
    },
    /// Skew centroidal derivations in one degree.
    Scder {
        #[arg(long)]
        q: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        degree: Vec<i64>,
    },
    /// Splitting of each degree into the centre or the commutator space.
    Decompose {
        #[arg(long)]
        q: PathBuf,
        #[arg(long, default_value_t = 4)]
        window: i64,
    },
}

#[derive(Subcommand)]
enum AlgOp {
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        window: i64,
    },
}

#[derive(Subcommand)]
enum SlOp {
    Verify {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value = "laurent")]
        coord: String,
        #[arg(long, default_value_t = 2)]
        window: i64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum AffineOp {
    Build {
        #[arg(long, default_value = "sl3")]
        g: String,
        #[arg(long, default_value_t = 3)]
        window: i64,
        #[arg(long, default_value = "summary")]
        emit: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DChoice {
    /// The degree derivations.
    Degree,
}

#[derive(Clone, Copy, ValueEnum)]
enum CChoice {
    /// The span of σ_D(L, L).
    Min,
}

#[derive(Clone, Copy, ValueEnum)]
enum TauChoice {
    Zero,
}

#[derive(Subcommand)]
enum EalaOp {
    Build {
        #[arg(long)]
        coord: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long = "D", value_enum, default_value = "degree")]
        d: DChoice,
        #[arg(long = "C", value_enum, default_value = "min")]
        c: CChoice,
        #[arg(long, value_enum, default_value = "zero")]
        tau: TauChoice,
        #[arg(long, default_value = "all", value_parser = ["all", "iara", "eala"])]
        check: String,
        #[arg(long, default_value_t = 2)]
        window: i64,
    },
}

fn max_window() -> Result<Option<i64>, CliError> {
    match std::env::var("LIETOR_MAX_WINDOW") {
        Ok(s) => s
            .trim()
            .parse::<i64>()
            .ok()
            .filter(|w| *w >= 0)
            .map(Some)
            .ok_or_else(|| CliError::Input(format!("LIETOR_MAX_WINDOW must be a nonnegative integer, got {s:?}"))),
        Err(_) => Ok(None),
    }
}

fn module_of(cmd: &Command) -> (&'static str, &'static str) {
    match cmd {
        Command::Roots { .. } => ("root-systems", "finite root system"),
        Command::Refl { .. } => ("reflection-systems", "pre-reflection system"),
        Command::Ars { .. } => ("reflection-systems", "affine reflection system"),
        Command::Qtorus { .. } => ("graded-algebras", "quantum torus"),
        Command::Alg { .. } => ("graded-algebras", "graded algebra"),
        Command::Sl { .. } => ("matrix-lie", "sl_n(A)"),
        Command::Uce { .. } => ("central-extensions", "universal central extension"),
        Command::Affine { .. } => ("central-extensions", "affine algebra"),
        Command::Hc1 { .. } => ("central-extensions", "HC₁"),
        Command::Eala { .. } => ("eala-builder", "C ⊕ L ⊕ D"),
        Command::Table { .. } => ("reflection-systems", "table"),
    }
}

fn dispatch(cmd: &Command, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
    match cmd {
        Command::Roots { op: RootsOp::Build { family, rank } } => commands::roots_build(family, *rank, report),
        Command::Roots { op: RootsOp::Classify { input } } => commands::roots_classify(input, report),
        Command::Refl { op: ReflOp::Check { input } } => commands::refl_check(input, report),
        Command::Ars { op: ArsOp::Build { ty, rank, tier, window } } => commands::ars_build(ty, *rank, *tier, *window, ctx, report),
        Command::Ars { op: ArsOp::Check { input, window } } => commands::ars_check(input, *window, ctx, report),
        Command::Qtorus { op: QtorusOp::Centre { q, window } } => commands::qtorus_centre(q, *window, ctx, report),
        Command::Qtorus { op: QtorusOp::Scder { q, degree } } => commands::qtorus_scder(q, degree, report),
        Command::Qtorus { op: QtorusOp::Decompose { q, window } } => commands::qtorus_decompose(q, *window, ctx, report),
        Command::Alg { op: AlgOp::Check { input, window } } => commands::alg_check(input, *window, ctx, report),
        Command::Sl { op: SlOp::Verify { n, coord, window, samples } } => commands::sl_verify(*n, coord, *window, *samples, ctx, report),
        Command::Uce { n, coord, window, samples } => commands::uce(*n, coord, *window, *samples, ctx, report),
        Command::Affine { op: AffineOp::Build { g, window, emit } } => commands::affine_build(g, *window, emit, ctx, report),
        Command::Hc1 { coord, degree, max_window } => commands::hc1(coord, degree, *max_window, ctx, report),
        Command::Eala { op: EalaOp::Build { coord, n, d: DChoice::Degree, c: CChoice::Min, tau: TauChoice::Zero, check, window } } => {
            commands::eala_build(&EalaOptions { coord, n: *n, window: *window, check }, ctx, report)
        }
        Command::Table { which } => commands::table(which, report),
    }
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Input(format!("--jobs: {e}")))?;
    }
    let ctx = Context { max_window: max_window()?, seed: cli.seed };
    let (module, subject) = module_of(&cli.command);
    let mut report = Report::new(module, subject);
    report.command = std::env::args().collect();
    if matches!(cli.command, Command::Sl { .. } | Command::Uce { .. }) {
        report.seed = Some(cli.seed);
    }
    let start = Instant::now();
    dispatch(&cli.command, &ctx, &mut report)?;
    if cli.timing {
        report.timing = Some(start.elapsed());
    }
    Ok(report)
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
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    print!("{}", report.render());
    if let Some(path) = &cli.out {
        let text = serde_json::to_string_pretty(&report.to_json()).expect("report serializes");
        if let Err(e) = std::fs::write(path, text + "\n") {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(if report.ok() { 0 } else { 1 })
}
