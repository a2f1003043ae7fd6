//! `aggregate1d`: closed forms, solvers and verification from the shell.
//!
//! Exit status: 0 on success, 1 when a verification or solve fails, 2 on a
//! usage or domain error.

mod config;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aggregate1d::io::{measure_to_json, to_json};
use aggregate1d::solver::{solve_grid_fw, solve_particles, FwOpts, ParticleOpts, SolveError};
use aggregate1d::verify::{verify_euler_lagrange, verify_identity, IdentityId};
use aggregate1d::{build_solution, Kernel, Measure, Regime};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::FileConfig;

/// Error in the invocation itself; maps to exit status 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

#[derive(Parser)]
#[command(name = "aggregate1d", version, about = "Minimizers of 1D power-law interaction energies")]
struct Cli {
    /// Run file of `key = value` lines; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form radius, energy and constants.
    Summary(SummaryArgs),
    /// Check an integral identity or the Euler-Lagrange conditions.
    Verify(VerifyArgs),
    /// Minimize numerically and compare with the closed form.
    Solve(SolveArgs),
    /// Closed-form quantities over a range of exponents, as CSV.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// A (2 < alpha < 3) or B (-1 < alpha < 2); inferred when omitted.
    #[arg(long)]
    regime: Option<String>,
}

#[derive(Args)]
struct SummaryArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    /// text or json
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    /// INT, INT1, INT2, INT3, INT1A, INT2A, INT3A or COMPINT.
    #[arg(long, conflicts_with = "el")]
    identity: Option<String>,
    /// Euler-Lagrange conditions of the closed form.
    #[arg(long)]
    el: bool,
    /// Sample points for an identity; repeat or separate with commas.
    #[arg(long = "x", allow_hyphen_values = true, value_delimiter = ',')]
    xs: Vec<f64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Chebyshev points on the support.
    #[arg(long)]
    points: Option<usize>,
    /// Exterior check distance beyond each edge; default three radii.
    #[arg(long)]
    span: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    /// particles or grid
    #[arg(long)]
    method: Option<String>,
    /// Particle count.
    #[arg(short = 'n', long = "n")]
    n: Option<usize>,
    /// Grid as lo:hi:m; default -2R:2R:801.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    grad_tol: Option<f64>,
    #[arg(long)]
    gap_tol: Option<f64>,
    /// Re-centre grid iterates at zero after each step.
    #[arg(long)]
    recenter: bool,
    /// Measure JSON destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report JSON destination; stdout by default.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    regime: Option<String>,
    /// Chebyshev points for the Euler-Lagrange residual.
    #[arg(long)]
    points: Option<usize>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn parse_regime(s: &str) -> Result<Regime> {
    match s.trim() {
        "A" | "a" => Ok(Regime::A),
        "B" | "b" => Ok(Regime::B),
        other => Err(usage(format!("regime must be A or B, got {other:?}"))),
    }
}

fn kernel_from(cfg: &FileConfig, args: KernelArgs) -> Result<Kernel> {
    let alpha = cfg.pick(args.alpha, "alpha")?.ok_or_else(|| usage("--alpha is required"))?;
    match cfg.pick(args.regime, "regime")? {
        Some(r) => Ok(Kernel::new(alpha, parse_regime(&r)?)?),
        None => Ok(Kernel::infer(alpha)?),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn number_or_na(v: Option<f64>) -> serde_json::Value {
    match v {
        Some(x) => json!(x),
        None => json!("n/a"),
    }
}

fn summary(cfg: &FileConfig, args: SummaryArgs) -> Result<ExitCode> {
    cfg.check_keys(&["alpha", "regime", "format"])?;
    let k = kernel_from(cfg, args.kernel)?;
    let s = build_solution(k, 0.0)?;
    let c = s.constants;
    let mut doc = json!({
        "alpha": k.alpha(),
        "regime": k.regime(),
        "R": s.radius,
        "E": number_or_na(s.energy),
        "eta": number_or_na(s.eta),
        "C": c.profile_mass,
        "C_prime": c.power_moment,
        "second_moment": s.second_moment(),
    });
    if k.regime() == Regime::B {
        doc["D"] = json!(c.tail_quadratic);
    }
    match cfg.pick(args.format, "format")?.as_deref().unwrap_or("text") {
        "json" => emit(None, &serde_json::to_string_pretty(&doc)?)?,
        "text" => {
            let mut lines = String::new();
            for key in ["alpha", "regime", "R", "E", "eta", "C", "C_prime", "D", "second_moment"] {
                if let Some(v) = doc.get(key) {
                    let shown = match v {
                        serde_json::Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    lines.push_str(&format!("{key:<14}{shown}\n"));
                }
            }
            emit(None, &lines)?;
        }
        other => bail!(usage(format!("format must be text or json, got {other:?}"))),
    }
    Ok(ExitCode::SUCCESS)
}

const DEFAULT_SAMPLES: [f64; 6] = [0.5, -0.3, 0.85, 1.5, -2.0, 3.0];

fn verify(cfg: &FileConfig, args: VerifyArgs) -> Result<ExitCode> {
    cfg.check_keys(&["alpha", "regime", "identity", "el", "x", "tol", "points", "span", "out"])?;
    let tol = cfg.pick(args.tol, "tol")?.unwrap_or(1e-6);
    let el = cfg.flag(args.el, "el")?;
    let identity = cfg.pick(args.identity, "identity")?;
    let (text, pass) = match (identity, el) {
        (Some(_), true) => bail!(usage("give either --identity or --el, not both")),
        (None, false) => bail!(usage("one of --identity or --el is required")),
        (Some(id), false) => {
            let id: IdentityId = id.parse()?;
            let alpha = cfg.pick(args.kernel.alpha, "alpha")?.ok_or_else(|| usage("--alpha is required"))?;
            let xs = if !args.xs.is_empty() {
                args.xs
            } else if let Some(list) = cfg.pick::<String>(None, "x")? {
                list.split(',')
                    .map(|v| v.trim().parse::<f64>().map_err(|e| usage(format!("config key x: {e}"))))
                    .collect::<Result<_>>()?
            } else {
                DEFAULT_SAMPLES.to_vec()
            };
            let rep = verify_identity(id, alpha, &xs, tol)?;
            (to_json(&rep), rep.pass)
        }
        (None, true) => {
            let k = kernel_from(cfg, args.kernel)?;
            let points = cfg.pick(args.points, "points")?.unwrap_or(50);
            let span = match cfg.pick(args.span, "span")? {
                Some(s) => s,
                None => 3.0 * build_solution(k, 0.0)?.radius,
            };
            let rep = verify_euler_lagrange(&k, points, span, tol)?;
            (to_json(&rep), rep.pass)
        }
    };
    let out = cfg.pick(args.out, "out")?;
    emit(out.as_deref(), &text)?;
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn parse_grid(spec: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        bail!(usage(format!("grid must be lo:hi:m, got {spec:?}")));
    }
    let bad = |e: &dyn fmt::Display| usage(format!("grid {spec:?}: {e}"));
    let lo: f64 = parts[0].trim().parse().map_err(|e| bad(&e))?;
    let hi: f64 = parts[1].trim().parse().map_err(|e| bad(&e))?;
    let m: usize = parts[2].trim().parse().map_err(|e| bad(&e))?;
    Ok((lo, hi, m))
}

fn solve(cfg: &FileConfig, args: SolveArgs) -> Result<ExitCode> {
    cfg.check_keys(&[
        "alpha", "regime", "method", "n", "grid", "seed", "max_iters", "grad_tol", "gap_tol", "recenter", "out", "report",
    ])?;
    let k = kernel_from(cfg, args.kernel)?;
    let method = cfg.pick(args.method, "method")?.unwrap_or_else(|| "particles".into());
    let out = cfg.pick(args.out, "out")?;
    let report_path = cfg.pick(args.report, "report")?;
    let max_iters = cfg.pick(args.max_iters, "max_iters")?;
    let (measure, report, ok) = match method.as_str() {
        "particles" => {
            let mut opts = ParticleOpts {
                n: cfg.pick(args.n, "n")?.unwrap_or(200),
                seed: cfg.pick(args.seed, "seed")?.unwrap_or(0),
                ..Default::default()
            };
            if let Some(t) = cfg.pick(args.grad_tol, "grad_tol")? {
                opts.grad_tol = t;
            }
            if let Some(m) = max_iters {
                opts.max_iters = m;
            }
            let (mu, rep) = solve_particles(&k, &opts)?;
            (Measure::Discrete(mu), rep, true)
        }
        "grid" => {
            let r = build_solution(k, 0.0)?.radius;
            let (lo, hi, m) = match cfg.pick(args.grid, "grid")? {
                Some(g) => parse_grid(&g)?,
                None => (-2.0 * r, 2.0 * r, 801),
            };
            let mut opts = FwOpts {
                lo,
                hi,
                m,
                recenter_each_iter: cfg.flag(args.recenter, "recenter")?,
                ..Default::default()
            };
            if let Some(t) = cfg.pick(args.gap_tol, "gap_tol")? {
                opts.gap_tol = t;
            }
            if let Some(m) = max_iters {
                opts.max_iters = m;
            }
            match solve_grid_fw(&k, &opts) {
                Ok((g, rep)) => (Measure::Grid(g), rep, true),
                Err(SolveError::BudgetExhausted(b)) => {
                    let (g, rep) = *b;
                    eprintln!("warning: iteration budget exhausted at Frank-Wolfe gap {:e}", rep.residual);
                    (Measure::Grid(g), rep, false)
                }
                Err(SolveError::Core(e)) => return Err(e.into()),
            }
        }
        other => bail!(usage(format!("method must be particles or grid, got {other:?}"))),
    };
    if let Some(path) = out {
        emit(Some(&path), &measure_to_json(&measure, &k))?;
    }
    emit(report_path.as_deref(), &to_json(&report))?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn sweep_alphas(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

fn sweep(cfg: &FileConfig, args: SweepArgs) -> Result<ExitCode> {
    cfg.check_keys(&["alpha_min", "alpha_max", "steps", "regime", "points", "format", "out"])?;
    let lo = cfg.pick(args.alpha_min, "alpha_min")?.ok_or_else(|| usage("--alpha-min is required"))?;
    let hi = cfg.pick(args.alpha_max, "alpha_max")?.unwrap_or(lo);
    let steps = cfg.pick(args.steps, "steps")?.unwrap_or(10);
    if steps == 0 {
        bail!(usage("steps must be at least 1"));
    }
    let regime = cfg.pick(args.regime, "regime")?.map(|r| parse_regime(&r)).transpose()?;
    let points = cfg.pick(args.points, "points")?.unwrap_or(50);
    let format = cfg.pick(args.format, "format")?.unwrap_or_else(|| "csv".into());
    if format != "csv" && format != "json" {
        bail!(usage(format!("format must be csv or json, got {format:?}")));
    }
    let mut rows = Vec::new();
    for alpha in sweep_alphas(lo, hi, steps) {
        let k = match regime {
            Some(r) => Kernel::new(alpha, r)?,
            None => Kernel::infer(alpha)?,
        };
        let s = build_solution(k, 0.0)?;
        let el = verify_euler_lagrange(&k, points, 3.0 * s.radius, 1e-6)?;
        rows.push((alpha, s.radius, s.energy, s.second_moment(), el.residual()));
    }
    let text = if format == "csv" {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["alpha", "R", "E", "second_moment", "el_residual"])?;
        for &(a, r, e, m2, res) in &rows {
            w.write_record([sci(a), sci(r), e.map(sci).unwrap_or_else(|| "n/a".into()), sci(m2), sci(res)])?;
        }
        String::from_utf8(w.into_inner()?)?
    } else {
        let list: Vec<_> = rows
            .iter()
            .map(|&(a, r, e, m2, res)| json!({"alpha": a, "R": r, "E": number_or_na(e), "second_moment": m2, "el_residual": res}))
            .collect();
        serde_json::to_string_pretty(&list)?
    };
    let out = cfg.pick(args.out, "out")?;
    emit(out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Summary(a) => summary(&cfg, a),
        Command::Verify(a) => verify(&cfg, a),
        Command::Solve(a) => solve(&cfg, a),
        Command::Sweep(a) => sweep(&cfg, a),
    }
}

fn is_usage(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<Usage>().is_some() || matches!(c.downcast_ref::<aggregate1d::Error>(), Some(aggregate1d::Error::Domain(_)))
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}
