mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};
use sieved_pollaczek::asymptotics::{eval_auto, AsymptoticOptions, ClassifierSettings, SzegoMode};
use sieved_pollaczek::equilibrium::{solve_mrs, Equilibrium};
use sieved_pollaczek::harness::{
    convergence, emit_to_path, sweep, verify_airy, verify_jumps, verify_orthogonality, verify_overlaps, verify_phase,
    GridSpec, OutputFormat, Quantity, SweepOptions, VerifyReport,
};
use sieved_pollaczek::oracle::eval_pn;
use sieved_pollaczek::{FamilyParams, ScaledComplex};

use config::Config;

#[derive(Parser)]
#[command(name = "sieved-pollaczek", version, about = "Exact and asymptotic sieved Pollaczek polynomials")]
struct Cli {
    /// key=value file supplying any flag; flags on the command line win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate p_n(z) by recurrence, by the asymptotic formulas, or both
    Eval(EvalArgs),
    /// Solve for the soft edges and the Lagrange multiplier, printed as json
    Mrs(MrsArgs),
    /// Run one structural check; exits with status 1 when it fails
    Verify(VerifyArgs),
    /// Compare oracle and asymptotics over a grid and write csv or jsonl
    Sweep(SweepArgs),
    /// Fit the decay order of an error quantity over several degrees
    Convergence(ConvergenceArgs),
}

#[derive(Args)]
struct ClassifierArgs {
    /// Edge disc radius in the scaled variable
    #[arg(long)]
    r: Option<f64>,
    /// Half-height of the node strip beyond beta
    #[arg(long)]
    eta_e: Option<f64>,
    /// Height of the short-band strip in units of max(b/n, beta-1)
    #[arg(long)]
    c_c: Option<f64>,
    /// Distance from [alpha, 1] still treated as band
    #[arg(long)]
    eta_b: Option<f64>,
    /// Right end of the node strip
    #[arg(long)]
    m_right: Option<f64>,
    /// Szego function: exact (quadrature) or approx (closed form)
    #[arg(long)]
    szego: Option<Szego>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// Point as re or re,im
    #[arg(long, allow_hyphen_values = true)]
    z: Option<Point>,
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    precision_bits: Option<u32>,
    #[command(flatten)]
    classifier: ClassifierArgs,
}

#[derive(Args)]
struct MrsArgs {
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// orthogonality, jumps, phase, airy or overlaps
    check: Option<Check>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    max_degree: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    classifier: ClassifierArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    b: Option<f64>,
    /// Comma separated degrees
    #[arg(long)]
    n_list: Option<NList>,
    /// Grid spec file
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or jsonl
    #[arg(long)]
    format: Option<OutputFormat>,
    #[arg(long)]
    precision_bits: Option<u32>,
    /// Record wall time per point (output is then no longer byte-stable)
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    classifier: ClassifierArgs,
}

#[derive(Args)]
struct ConvergenceArgs {
    /// regionB, regionD, regionF, lagrange-l, mrs-alpha, mrs-beta, szego-gap or szego-infinity
    #[arg(long)]
    quantity: Option<Quantity>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    n_list: Option<NList>,
    #[command(flatten)]
    classifier: ClassifierArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    Oracle,
    Asymptotic,
    Both,
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "oracle" => Ok(Method::Oracle),
            "asymptotic" => Ok(Method::Asymptotic),
            "both" => Ok(Method::Both),
            other => Err(format!("unknown method {other:?}; expected oracle, asymptotic or both")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Check {
    Orthogonality,
    Jumps,
    Phase,
    Airy,
    Overlaps,
}

impl FromStr for Check {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "orthogonality" => Ok(Check::Orthogonality),
            "jumps" => Ok(Check::Jumps),
            "phase" => Ok(Check::Phase),
            "airy" => Ok(Check::Airy),
            "overlaps" => Ok(Check::Overlaps),
            other => Err(format!("unknown check {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Szego(SzegoMode);

impl FromStr for Szego {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(Szego(SzegoMode::Exact)),
            "approx" => Ok(Szego(SzegoMode::Approx)),
            other => Err(format!("unknown szego mode {other:?}; expected exact or approx")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Point(Complex64);

impl FromStr for Point {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?} in point: {e}"));
        let z = match s.split_once(',') {
            Some((re, im)) => Complex64::new(num(re)?, num(im)?),
            None => Complex64::new(num(s)?, 0.0),
        };
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(format!("point {s:?} is not finite"));
        }
        Ok(Point(z))
    }
}

#[derive(Clone, Debug, PartialEq)]
struct NList(Vec<usize>);

impl FromStr for NList {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let ns = s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad degree {t:?}: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if ns.is_empty() {
            return Err("empty degree list".into());
        }
        Ok(NList(ns))
    }
}

fn pick<T: FromStr>(flag: Option<T>, cfg: &Config, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.get(key),
    }
}

fn need<T: FromStr>(flag: Option<T>, cfg: &Config, key: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    pick(flag, cfg, key)?.ok_or_else(|| anyhow!("missing --{key} (flag or config key)"))
}

fn params(b: f64, bits: Option<u32>) -> Result<FamilyParams> {
    Ok(match bits {
        Some(bits) => FamilyParams::with_precision(b, bits)?,
        None => FamilyParams::new(b)?,
    })
}

fn asymptotic_options(args: ClassifierArgs, cfg: &Config) -> Result<AsymptoticOptions> {
    let d = ClassifierSettings::default();
    let classifier = ClassifierSettings {
        r: pick(args.r, cfg, "r")?.unwrap_or(d.r),
        eta_e: pick(args.eta_e, cfg, "eta-e")?.unwrap_or(d.eta_e),
        c_c: pick(args.c_c, cfg, "c-c")?.unwrap_or(d.c_c),
        eta_b: pick(args.eta_b, cfg, "eta-b")?.unwrap_or(d.eta_b),
        m: pick(args.m_right, cfg, "m-right")?.or(d.m),
    };
    classifier.validate()?;
    let szego = pick(args.szego, cfg, "szego")?.map(|s| s.0).unwrap_or_default();
    Ok(AsymptoticOptions { classifier, szego })
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn value_json(v: &ScaledComplex) -> Value {
    let (re, im) = if v.in_f64_range() {
        let c = v.to_c64();
        (num(c.re), num(c.im))
    } else {
        (Value::Null, Value::Null)
    };
    json!({ "re": re, "im": im, "ln_abs": num(v.ln_abs()), "arg": num(v.arg()) })
}

fn print_json(v: &Value) -> Result<()> {
    writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn run_eval(args: EvalArgs, cfg: &Config) -> Result<ExitCode> {
    let b = need(args.b, cfg, "b")?;
    let n = need(args.n, cfg, "n")?;
    let z = need(args.z, cfg, "z")?.0;
    let method = pick(args.method, cfg, "method")?.unwrap_or(Method::Both);
    let p = params(b, pick(args.precision_bits, cfg, "precision-bits")?)?;
    let opts = asymptotic_options(args.classifier, cfg)?;
    let mut out = json!({ "b": b, "n": n, "z": [z.re, z.im] });
    let oracle = match method {
        Method::Oracle | Method::Both => {
            let v = eval_pn(&p, n, z)?;
            out["oracle"] = value_json(&v.value);
            out["precision_bits"] = json!(v.precision_bits);
            Some(v.value)
        }
        Method::Asymptotic => None,
    };
    if method != Method::Oracle {
        let eq = Equilibrium::new(p, n)?;
        let v = eval_auto(&eq, z, &opts)?;
        out["region"] = json!(v.region.tag.as_str());
        out["asymptotic"] = value_json(&v.value);
        out["error_order"] = num(v.order);
        if let Some(bound) = v.bound {
            out["bound"] = value_json(&bound);
        }
        if let Some(o) = oracle {
            let log_scale = !o.in_f64_range();
            let err = if log_scale { v.value.log_rel_diff(&o) } else { v.value.rel_diff(&o) };
            out["rel_err"] = num(err);
            out["log_scale"] = json!(log_scale);
        }
    }
    print_json(&out)?;
    Ok(ExitCode::SUCCESS)
}

fn run_mrs(args: MrsArgs, cfg: &Config) -> Result<ExitCode> {
    let b = need(args.b, cfg, "b")?;
    let n = need(args.n, cfg, "n")?;
    let m = solve_mrs(&FamilyParams::new(b)?, n)?;
    print_json(&json!({
        "b": b,
        "n": n,
        "alpha": m.alpha,
        "beta": m.beta,
        "l": m.l,
        "residuals": [m.residuals[0], m.residuals[1]],
        "iterations": m.iterations,
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn print_report(r: &VerifyReport) -> Result<()> {
    let mut out = std::io::stdout().lock();
    let status = if r.passed { "PASS" } else { "FAIL" };
    writeln!(out, "{} {status} worst {:e} tolerance {:e}", r.check, r.worst, r.tolerance)?;
    for d in &r.details {
        writeln!(out, "  {d}")?;
    }
    Ok(())
}

fn run_verify(args: VerifyArgs, cfg: &Config) -> Result<ExitCode> {
    let check = need(args.check, cfg, "check")?;
    let b = pick(args.b, cfg, "b")?;
    let p = || -> Result<FamilyParams> {
        Ok(FamilyParams::new(b.ok_or_else(|| anyhow!("missing --b (flag or config key)"))?)?)
    };
    let n = pick(args.n, cfg, "n")?;
    let report = match check {
        Check::Orthogonality => verify_orthogonality(&p()?, pick(args.max_degree, cfg, "max-degree")?.unwrap_or(8))?,
        Check::Jumps => verify_jumps(&p()?, n.unwrap_or(100))?,
        Check::Phase => verify_phase(&p()?, n.unwrap_or(100))?,
        Check::Airy => verify_airy()?,
        Check::Overlaps => verify_overlaps(&p()?, n.unwrap_or(400), &asymptotic_options(args.classifier, cfg)?)?,
    };
    print_report(&report)?;
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run_sweep(args: SweepArgs, cfg: &Config) -> Result<ExitCode> {
    let b = need(args.b, cfg, "b")?;
    let n_list = need(args.n_list, cfg, "n-list")?.0;
    let grid_path: PathBuf = need(args.grid, cfg, "grid")?;
    let out: PathBuf = need(args.out, cfg, "out")?;
    let format = pick(args.format, cfg, "format")?.unwrap_or(OutputFormat::Csv);
    let timing = args.timing || pick(None, cfg, "timing")?.unwrap_or(false);
    let p = params(b, pick(args.precision_bits, cfg, "precision-bits")?)?;
    let grid = GridSpec::from_file(&grid_path).with_context(|| format!("reading grid {}", grid_path.display()))?;
    let opts = SweepOptions { asymptotic: asymptotic_options(args.classifier, cfg)?, timing };
    let records = sweep(&p, &n_list, &grid, &opts)?;
    emit_to_path(&records, format, &out).with_context(|| format!("writing {}", out.display()))?;
    let flagged = records.iter().filter(|r| r.flag.is_some()).count();
    eprintln!("{} records written to {} ({flagged} flagged)", records.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn run_convergence(args: ConvergenceArgs, cfg: &Config) -> Result<ExitCode> {
    let quantity = need(args.quantity, cfg, "quantity")?;
    let b = need(args.b, cfg, "b")?;
    let n_list = need(args.n_list, cfg, "n-list")?.0;
    let opts = asymptotic_options(args.classifier, cfg)?;
    let report = convergence(quantity, &FamilyParams::new(b)?, &n_list, &opts)?;
    print_json(&serde_json::to_value(&report)?)?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Eval(a) => run_eval(a, &cfg),
        Command::Mrs(a) => run_mrs(a, &cfg),
        Command::Verify(a) => run_verify(a, &cfg),
        Command::Sweep(a) => run_sweep(a, &cfg),
        Command::Convergence(a) => run_convergence(a, &cfg),
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
