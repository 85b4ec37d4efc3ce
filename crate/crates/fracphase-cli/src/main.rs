//! Command-line front end: coefficient tables, certification sweeps,
//! configured simulation runs, convergence tables, and the invariant suite.
//!
//! Exit codes: 0 on success, 1 on verification failure, 2 on usage errors.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use fracphase::analysis::{analyze_pair, eval_q, AnalysisReport};
use fracphase::coeff::{Alpha, CoeffTable};
use fracphase::config::RunConfig;
use fracphase::convergence::{convergence_table, table_dt_list, write_table_csv};
use fracphase::runner::execute;
use fracphase::schemes::SchemeKind;
use fracphase::verify::{all_passed, run_verification};

#[derive(Parser)]
#[command(
    name = "fracphase",
    about = "Energy-stable L2 solvers for time-fractional phase-field equations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the L2 coefficients for one fractional order as CSV.
    Coeffs(CoeffsArgs),
    /// Certify the quadratic-form matrices and sign functions over a sweep.
    Analyze(AnalyzeArgs),
    /// Integrate a configured problem and emit energy traces and snapshots.
    Run(RunArgs),
    /// Refinement table for the manufactured problem.
    Convergence(ConvergenceArgs),
    /// Run the invariant suite; nonzero exit on any failure.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CoeffsArgs {
    /// Fractional order in (0,1)
    #[arg(long)]
    alpha: f64,
    /// Largest tabulated index
    #[arg(long)]
    n: usize,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Comma-separated fractional orders
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    alpha_grid: Vec<f64>,
    /// Comma-separated matrix dimensions
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32,64,128,200")]
    n_grid: Vec<usize>,
    /// Largest row index for the sign-function sweep
    #[arg(long, default_value_t = 200)]
    i_max: usize,
    /// Random trials per (alpha, n) pair for the quadratic-form bounds
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Seed for the randomized bounds
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output directory (report.csv, q_signs.csv)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct ConvergenceArgs {
    /// Time stepper
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    /// Fractional order in (0,1)
    #[arg(long)]
    alpha: f64,
    /// Comma-separated step sizes, halving between entries
    #[arg(long, value_delimiter = ',')]
    dt_list: Option<Vec<f64>>,
    /// Fourier modes per dimension
    #[arg(long, default_value_t = 32)]
    nx: usize,
    /// Final time
    #[arg(long, default_value_t = 1.0)]
    t_final: f64,
    /// Optional CSV output path (the table always prints)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SchemeArg {
    Sav,
    Imex,
}

impl From<SchemeArg> for SchemeKind {
    fn from(value: SchemeArg) -> Self {
        match value {
            SchemeArg::Sav => SchemeKind::Sav,
            SchemeArg::Imex => SchemeKind::Imex,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Trim sweeps and run lengths to a few seconds
    #[arg(long)]
    quick: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Coeffs(args) => coeffs(args),
        Command::Analyze(args) => analyze(args),
        Command::Run(args) => run(args),
        Command::Convergence(args) => convergence(args),
        Command::Verify(args) => verify(args),
    }
}

fn coeffs(args: CoeffsArgs) -> Result<ExitCode> {
    let alpha = Alpha::new(args.alpha)?;
    let table = CoeffTable::build(alpha, args.n)?;
    let file = fs::File::create(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    table.write_csv(std::io::BufWriter::new(file))?;
    println!("wrote {} rows to {}", args.n, args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn analyze(args: AnalyzeArgs) -> Result<ExitCode> {
    fs::create_dir_all(&args.out)?;
    let n_max = args.n_grid.iter().copied().max().unwrap_or(2).max(2);

    let mut report = std::io::BufWriter::new(fs::File::create(args.out.join("report.csv"))?);
    writeln!(report, "{}", AnalysisReport::csv_header())?;
    let mut all_ok = true;
    for &a in &args.alpha_grid {
        let alpha = Alpha::new(a)?;
        let table = CoeffTable::build(alpha, n_max + 2)?;
        for &n in &args.n_grid {
            let r = analyze_pair(&table, n, args.trials, args.seed)?;
            all_ok &= r.all_ok();
            writeln!(report, "{}", r.csv_row())?;
        }
    }
    report.flush()?;

    let mut q_csv = std::io::BufWriter::new(fs::File::create(args.out.join("q_signs.csv"))?);
    writeln!(q_csv, "alpha,i,j,Q1,Q2,Q3")?;
    for &a in &args.alpha_grid {
        let alpha = Alpha::new(a)?;
        for i in 2..=args.i_max {
            for j in 1..i {
                let (q1, q2, q3) = eval_q(alpha, i, j)?;
                writeln!(q_csv, "{a},{i},{j},{q1:.9e},{q2:.9e},{q3:.9e}")?;
            }
        }
    }
    q_csv.flush()?;

    println!(
        "analysis over {} alphas x {} dimensions: {}",
        args.alpha_grid.len(),
        args.n_grid.len(),
        if all_ok { "all certificates hold" } else { "FAILURES (see report.csv)" }
    );
    Ok(if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run(args: RunArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let config = RunConfig::from_json(&text)?;
    let summary = execute(&config)?;
    let last = summary.reports.last();
    println!(
        "completed {} steps; final energy {:.6e}; mean drift {:.3e}",
        summary.reports.len(),
        last.map(|r| r.energy).unwrap_or(f64::NAN),
        summary.mean_drift
    );
    if let Some(err) = summary.l2_error {
        println!("l2 error against exact solution: {err:.6e}");
    }
    println!(
        "verdicts: monotone_classical={} bounded_by_initial={} frac_law_ok={}{}",
        summary.trace.monotone_classical,
        summary.trace.bounded_by_initial,
        summary.trace.frac_law_ok,
        summary
            .trace
            .modified_bounded_by_initial
            .map(|b| format!(" modified_bounded={b}"))
            .unwrap_or_default()
    );
    if let Some(dir) = &config.output_dir {
        println!("artifacts in {}", dir.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn convergence(args: ConvergenceArgs) -> Result<ExitCode> {
    let alpha = Alpha::new(args.alpha)?;
    let dts = args.dt_list.unwrap_or_else(table_dt_list);
    let rows = convergence_table(args.scheme.into(), alpha, &dts, args.nx, args.t_final)?;
    println!("{:>12}  {:>12}  {:>8}", "dt", "l2_error", "rate");
    for row in &rows {
        let rate = row.rate.map(|r| format!("{r:.4}")).unwrap_or_default();
        println!("{:>12.6e}  {:>12.4e}  {:>8}", row.dt, row.l2_error, rate);
    }
    if let Some(path) = args.out {
        write_table_csv(fs::File::create(&path)?, &rows)?;
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let results = run_verification(args.quick)?;
    for r in &results {
        println!("[{}] {} — {}", if r.pass { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    if all_passed(&results) {
        println!("{} checks passed", results.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("verification FAILED");
        Ok(ExitCode::from(1))
    }
}
