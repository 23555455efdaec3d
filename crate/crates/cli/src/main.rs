//! `pmy`: envelope and prox sweeps, verification suites and figure data.

mod output;

use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pmy::lab::{available_checks, GROUPS};
use pmy::numeric::lin_space;
use pmy::{
    envelope, parse_function_spec, parse_vector, prox, proximal_point_run, run_suite, ConvexFunctionSpec,
    EnvelopeConfig, SolverPreference, SuiteConfig,
};

use output::{EnvelopeRow, FigureCurveRow, FigureData, FigureIterateRow, ProxRow, Sink, SweepOutput, VerifyOutput};

#[derive(Parser, Debug)]
#[command(
    name = "pmy",
    version,
    about = "p-power Moreau-Yosida envelopes on finite-dimensional l^p spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep x and emit x, f(x), f_eps(x) and grad f_eps(x).
    Envelope(EvalArgs),
    /// Sweep x and emit the proximal point with solver diagnostics.
    Prox(EvalArgs),
    /// Run verification checks and emit a JSON report.
    Verify(VerifyArgs),
    /// Emit the data of the one-dimensional envelope figure.
    Figure(FigureArgs),
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Function spec, e.g. `onenorm:center=[4.5],weight=1,offset=0.5`.
    #[arg(long)]
    function: String,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Sweep `lo:hi:count`; in dim > 1 the points are `t (1, ..., 1)`.
    #[arg(long, default_value = "-3:3:601", allow_hyphen_values = true)]
    range: SweepRange,
    /// A single point such as `[1 -2]`; overrides `--range`.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Force the numerical solver even when a closed form exists.
    #[arg(long)]
    numerical: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Check names or groups, comma separated.
    #[arg(long, default_value = "all", value_delimiter = ',')]
    suite: Vec<String>,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    /// Replaces every check's default tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "-")]
    out: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct FigureArgs {
    #[arg(long, default_value = "-1:10:1101", allow_hyphen_values = true)]
    range: SweepRange,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Output path; `-` writes to stdout.
    #[arg(long, default_value = "-")]
    out: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct SweepRange {
    lo: f64,
    hi: f64,
    count: usize,
}

impl FromStr for SweepRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, count] = parts[..] else {
            return Err(format!("expected lo:hi:count, got '{s}'"));
        };
        let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound '{lo}'"))?;
        let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound '{hi}'"))?;
        let count: usize = count.trim().parse().map_err(|_| format!("bad count '{count}'"))?;
        if !lo.is_finite() || !hi.is_finite() {
            return Err("range bounds must be finite".into());
        }
        if count == 0 {
            return Err("range count must be positive".into());
        }
        if count > 1 && lo >= hi {
            return Err(format!("range needs lo < hi, got {lo}:{hi}"));
        }
        Ok(Self { lo, hi, count })
    }
}

/// Maps to the process exit code: usage errors 2, failures 1.
enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    fn usage(e: impl ToString) -> Self {
        Self::Usage(e.to_string())
    }

    fn failure(e: impl ToString) -> Self {
        Self::Failure(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Envelope(a) => cmd_envelope(&a),
        Command::Prox(a) => cmd_prox(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Figure(a) => cmd_figure(&a),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// Validated inputs shared by `envelope` and `prox`.
struct Evaluation {
    function: ConvexFunctionSpec,
    cfg: EnvelopeConfig,
    points: Vec<Vec<f64>>,
}

fn prepare(a: &EvalArgs) -> Result<Evaluation, CliError> {
    if a.dim == 0 {
        return Err(CliError::usage("--dim must be positive"));
    }
    let function = parse_function_spec(&a.function, a.dim).map_err(CliError::usage)?;
    let solver = if a.numerical {
        SolverPreference::Numerical
    } else {
        SolverPreference::Auto
    };
    let cfg = EnvelopeConfig::new(a.p, a.eps)
        .map_err(CliError::usage)?
        .with_solver(solver);
    let points = match &a.x {
        Some(text) => vec![parse_vector(text, a.dim).map_err(CliError::usage)?],
        None => lin_space(a.range.lo, a.range.hi, a.range.count)
            .into_iter()
            .map(|t| vec![t; a.dim])
            .collect(),
    };
    Ok(Evaluation { function, cfg, points })
}

fn cmd_envelope(a: &EvalArgs) -> Result<ExitCode, CliError> {
    let ev = prepare(a)?;
    let rows = ev
        .points
        .iter()
        .map(|x| {
            let r = prox(&ev.function, x, &ev.cfg).map_err(CliError::failure)?;
            Ok(EnvelopeRow {
                x: x.clone(),
                f: ev.function.evaluate(x),
                f_eps: r.envelope_value,
                gradient: r.gradient.into_coords(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let out = SweepOutput {
        function: ev.function.to_string(),
        p: ev.cfg.p,
        eps: ev.cfg.eps,
        rows,
    };
    write(&a.out, |sink| match a.out.format {
        Format::Csv => sink.envelope_csv(&out),
        Format::Json => sink.json(&out),
    })?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_prox(a: &EvalArgs) -> Result<ExitCode, CliError> {
    let ev = prepare(a)?;
    let rows = ev
        .points
        .iter()
        .map(|x| {
            let r = prox(&ev.function, x, &ev.cfg).map_err(CliError::failure)?;
            Ok(ProxRow {
                x: x.clone(),
                prox: r.prox_point.into_coords(),
                f_eps: r.envelope_value,
                residual: r.residual,
                method: r.method,
                inner_iters: r.inner_iters,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let out = SweepOutput {
        function: ev.function.to_string(),
        p: ev.cfg.p,
        eps: ev.cfg.eps,
        rows,
    };
    write(&a.out, |sink| match a.out.format {
        Format::Csv => sink.prox_csv(&out),
        Format::Json => sink.json(&out),
    })?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: &VerifyArgs) -> Result<ExitCode, CliError> {
    let known = available_checks();
    for name in &a.suite {
        let name = name.trim();
        if !GROUPS.contains(&name) && !known.contains(&name) {
            let mut listing: Vec<&str> = GROUPS.to_vec();
            listing.extend(&known);
            return Err(CliError::Usage(format!(
                "unknown suite '{name}'; available: {}",
                listing.join(", ")
            )));
        }
    }
    let cfg = SuiteConfig {
        p: a.p,
        dim: a.dim,
        eps: a.eps,
        tol: a.tol,
        samples: a.samples,
    };
    cfg.validate().map_err(CliError::usage)?;
    let names: Vec<&str> = a.suite.iter().map(|s| s.trim()).collect();
    let reports = run_suite(&names, a.seed, &cfg).map_err(CliError::failure)?;
    let passed = pmy::lab::all_passed(&reports);
    let failed = reports.iter().filter(|r| !r.passed).count();
    let out = VerifyOutput {
        seed: a.seed,
        passed,
        reports,
    };
    let target = OutArgs {
        out: a.out.clone(),
        format: a.format,
    };
    write(&target, |sink| match a.format {
        Format::Csv => sink.verify_csv(&out),
        Format::Json => sink.json(&out),
    })?;
    eprintln!("{} checks, {failed} failed", out.reports.len());
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// Figure scenario: f(x) = |x - 4.5| + 0.5 with p = 2, eps = 1, from x_0 = 0.
const FIGURE_CENTER: f64 = 4.5;
const FIGURE_OFFSET: f64 = 0.5;
const FIGURE_ITERATES: usize = 4;

fn cmd_figure(a: &FigureArgs) -> Result<ExitCode, CliError> {
    let f = ConvexFunctionSpec::one_norm(vec![FIGURE_CENTER], 1.0, FIGURE_OFFSET).map_err(CliError::failure)?;
    let cfg = EnvelopeConfig::new(2.0, 1.0).map_err(CliError::failure)?;
    let traj = proximal_point_run(&f, &[0.0], &cfg, FIGURE_ITERATES).map_err(CliError::failure)?;
    let iterates: Vec<f64> = traj.points.iter().map(|x| x[0]).collect();
    // Parabolas eps^-1 phi_2(x - x_i) + f(x_i) for the iterates after x_0.
    let vertices: Vec<(f64, f64)> = iterates[1..]
        .iter()
        .map(|&xi| (xi, f.evaluate(&[xi]).to_f64()))
        .collect();
    let curve = lin_space(a.range.lo, a.range.hi, a.range.count)
        .into_iter()
        .map(|x| {
            Ok(FigureCurveRow {
                x,
                f: f.evaluate(&[x]),
                f_eps: envelope(&f, &[x], &cfg).map_err(CliError::failure)?,
                parabolas: vertices
                    .iter()
                    .map(|(xi, fi)| 0.5 * (x - xi).powi(2) / cfg.eps + fi)
                    .collect(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let iterate_rows = iterates
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            Ok(FigureIterateRow {
                index: k,
                x,
                f: f.evaluate(&[x]),
                f_eps: envelope(&f, &[x], &cfg).map_err(CliError::failure)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let data = FigureData {
        function: f.to_string(),
        p: cfg.p,
        eps: cfg.eps,
        curve,
        iterates: iterate_rows,
    };
    write(&a.out, |sink| match a.out.format {
        Format::Csv => sink.figure_csv(&data),
        Format::Json => sink.json(&data),
    })?;
    Ok(ExitCode::SUCCESS)
}

fn write(target: &OutArgs, emit: impl FnOnce(&mut Sink) -> std::io::Result<()>) -> Result<(), CliError> {
    let mut sink =
        Sink::open(&target.out).map_err(|e| CliError::Failure(format!("cannot open '{}': {e}", target.out)))?;
    emit(&mut sink).and_then(|_| sink.finish()).map_err(CliError::failure)
}
