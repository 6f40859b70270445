use bezred::bernstein::JacobiWeight;
use bezred::continuity::{ContinuitySpec, Fixing};
use bezred::error::Error;
use bezred::io::{load_curve, save_curve, to_json_17, Report, Timings};
use bezred::reduction::{max_error, reduce, squared_error, Mode, ReductionProblem};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bezred", version, about = "Degree reduction of Bezier curves \
under endpoint continuity constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a curve to a lower degree
    Reduce(ReduceArgs),
    /// Recompute the error metrics between two curve files
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    C,
    Cg,
    G,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightName {
    /// alpha = beta = 0
    Legendre,
    /// alpha = beta = -1/2
    Cheb1,
    /// alpha = beta = 1/2
    Cheb2,
    /// alpha = -1/2, beta = 1/2
    MixedAb,
    /// alpha = 1/2, beta = -1/2
    MixedBa,
}

impl WeightName {
    fn values(self) -> (f64, f64) {
        match self {
            WeightName::Legendre => (0.0, 0.0),
            WeightName::Cheb1 => (-0.5, -0.5),
            WeightName::Cheb2 => (0.5, 0.5),
            WeightName::MixedAb => (-0.5, 0.5),
            WeightName::MixedBa => (0.5, -0.5),
        }
    }
}

#[derive(Args)]
struct ReduceArgs {
    /// Input curve file (JSON)
    #[arg(long)]
    input: PathBuf,
    /// Target degree m
    #[arg(long)]
    degree: usize,
    /// Continuity handling
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Continuity order at t=0 (-1 = none)
    #[arg(short, allow_hyphen_values = true, default_value_t = -1)]
    k: i32,
    /// Continuity order at t=1 (-1 = none)
    #[arg(short, allow_hyphen_values = true, default_value_t = -1)]
    l: i32,
    /// Pin the first start parameter to 1 (C1 at t=0; needs k >= 2)
    #[arg(long)]
    p_fixed: bool,
    /// Pin the first end parameter to 1 (C1 at t=1; needs l >= 2)
    #[arg(long)]
    q_fixed: bool,
    /// Weight preset (overridden by explicit --alpha/--beta)
    #[arg(long, value_enum)]
    weight: Option<WeightName>,
    /// Jacobi weight exponent alpha (> -1)
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Jacobi weight exponent beta (> -1)
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Lower bound for the first start parameter
    #[arg(long)]
    d0: Option<f64>,
    /// Lower bound for the first end parameter
    #[arg(long)]
    d1: Option<f64>,
    /// Sampling grid size for the maximum-error metric
    #[arg(long, default_value_t = 500)]
    grid: usize,
    /// Where to write the reduced curve
    #[arg(long)]
    output: Option<PathBuf>,
    /// Where to write an SVG plot (planar curves only)
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Accept source degrees above the default cap
    #[arg(long)]
    allow_high_degree: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// First curve file
    #[arg(long)]
    input: PathBuf,
    /// Second curve file
    #[arg(long)]
    against: PathBuf,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    beta: f64,
    #[arg(long, default_value_t = 500)]
    grid: usize,
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::Parse(_) => 2,
        Error::Io(_) => 3,
        Error::IllConditioned { .. } | Error::Degenerate(_) | Error::Numerical(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Reduce(args) => run_reduce(args),
        Command::Verify(args) => run_verify(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn resolve_weight(
    name: Option<WeightName>,
    alpha: Option<f64>,
    beta: Option<f64>,
) -> bezred::Result<JacobiWeight> {
    let (mut a, mut b) = name.map(WeightName::values).unwrap_or((0.0, 0.0));
    if let Some(alpha) = alpha {
        a = alpha;
    }
    if let Some(beta) = beta {
        b = beta;
    }
    JacobiWeight::new(a, b)
}

fn run_reduce(args: ReduceArgs) -> bezred::Result<()> {
    let source = load_curve(&args.input)?;
    let weight = resolve_weight(args.weight, args.alpha, args.beta)?;
    let mut spec = ContinuitySpec::new(args.k, args.l)?;
    if args.p_fixed {
        spec.p = Fixing::FixedOne;
    }
    if args.q_fixed {
        spec.q = Fixing::FixedOne;
    }
    if let Some(d0) = args.d0 {
        spec.d0 = d0;
    }
    if let Some(d1) = args.d1 {
        spec.d1 = d1;
    }
    let mode = match args.mode {
        ModeArg::C => Mode::C,
        ModeArg::Cg => Mode::Cg,
        ModeArg::G => Mode::G,
    };
    let mut problem =
        ReductionProblem::new(source, args.degree, spec, weight)?.with_grid(args.grid)?;
    if args.allow_high_degree {
        problem = problem.allow_high_degree();
    }
    let result = reduce(&problem, mode)?;

    if let Some(out) = &args.output {
        save_curve(&result.reduced, out)?;
    }
    if let Some(svg_path) = &args.svg {
        bezred::svg::emit_svg(&problem.source, &result.reduced, svg_path)?;
    }

    let d = &result.diagnostics;
    let report = Report {
        mode: mode.as_str().to_string(),
        k: spec.k,
        l: spec.l,
        p_fixed: spec.p == Fixing::FixedOne,
        q_fixed: spec.q == Fixing::FixedOne,
        alpha: weight.alpha,
        beta: weight.beta,
        d0: spec.d0,
        d1: spec.d1,
        m: args.degree,
        grid: args.grid,
        e2: result.e2,
        einf: result.einf,
        lambda: result.params.lambdas.clone(),
        mu: result.params.mus.clone(),
        solver_iterations: d.solver_iterations,
        active_bounds: d.active_bounds.clone(),
        gram_condition: d.gram_condition,
        solver_converged: d.solver_converged,
        warnings: d.warnings.clone(),
        timings: Timings {
            phase_a_seconds: d.phase_a_seconds,
            phase_b_seconds: d.phase_b_seconds,
            metrics_seconds: d.metrics_seconds,
        },
    };
    print_json(&report)
}

fn run_verify(args: VerifyArgs) -> bezred::Result<()> {
    let a = load_curve(&args.input)?;
    let b = load_curve(&args.against)?;
    let weight = JacobiWeight::new(args.alpha, args.beta)?;
    if args.grid < 1 {
        return Err(Error::domain("grid size must be at least 1"));
    }
    let e2 = squared_error(&a, &b, weight)?.sqrt();
    let einf = max_error(&a, &b, args.grid);

    #[derive(serde::Serialize)]
    struct VerifyReport {
        alpha: f64,
        beta: f64,
        grid: usize,
        e2: f64,
        einf: f64,
    }
    print_json(&VerifyReport { alpha: weight.alpha, beta: weight.beta, grid: args.grid, e2, einf })
}

fn print_json<T: serde::Serialize>(value: &T) -> bezred::Result<()> {
    let mut buf = to_json_17(value)?;
    buf.push(b'\n');
    use std::io::Write;
    std::io::stdout().write_all(&buf)?;
    Ok(())
}
