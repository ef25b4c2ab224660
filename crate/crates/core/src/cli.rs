//! Command-line front end. The `seqnet` binary forwards to [`run`].
//!
//! Exit codes: 0 success (or bistable), 1 analytic failure, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::massaction::{conservation_substitute, stamp_eps, FrontRates, ModelParams};
use crate::network::{build_sequestration, format_network, fully_open_extension};
use crate::region::{check_bistability, check_mss, RegionCheck};
use crate::scalar::{format_rational, parse_rational, parse_rational_list, Rational, Scalar};
use crate::sim::{integrate, IntegrateOptions, Method, SequestrationField, Terminal};
use crate::stability::StabilityReport;
use crate::steady::{
    continue_in_eps, newton_refine, Branch, ConcentrationSystem, ContinuationOptions, NewtonOptions,
    SteadyState,
};
use crate::witness::{classify_exact, find_witness, sweep, RateSource, WitnessOptions, WitnessResult};
use crate::SCHEMA;

#[derive(Debug, Parser)]
#[command(name = "seqnet", version, about = "Bistability witnesses for fully open sequestration networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the network in the reaction grammar or as JSON.
    Gen(GenArgs),
    /// Search for a bistability witness.
    Witness(WitnessArgs),
    /// Region checks, steady states and stability for given rates.
    Analyze(AnalyzeArgs),
    /// Integrate the mass-action system and write a CSV trajectory.
    Simulate(SimulateArgs),
    /// Evaluate the region inequalities for front rates.
    RegionCheck(RegionArgs),
    /// Run the witness search over a grid of (m, n).
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct Shape {
    /// Production factor of `X1 -> m Xn`.
    #[arg(short = 'm', long = "m")]
    m: u32,
    /// Number of species.
    #[arg(short = 'n', long = "n")]
    n: usize,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[command(flatten)]
    shape: Shape,
    /// Print `K(m,n)` itself instead of its fully open extension.
    #[arg(long)]
    closed: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct RateArgs {
    /// Comma-separated rates: either `r1..rn` (with --rn2 and, where needed,
    /// --eps) or the full `r1..r3n`. Decimals and fractions are exact.
    #[arg(long, allow_hyphen_values = true)]
    rates: Option<String>,
    /// The rate `r(n+2)`.
    #[arg(long)]
    rn2: Option<String>,
    /// Value of the small outflow rates.
    #[arg(long)]
    eps: Option<String>,
    /// Read the full rate vector from a witness JSON file.
    #[arg(long)]
    witness: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WitnessArgs {
    #[command(flatten)]
    shape: Shape,
    /// Front rates `r1..rn`; requires --rn2.
    #[arg(long)]
    rates: Option<String>,
    #[arg(long)]
    rn2: Option<String>,
    /// Sample front rates from the bistability region with this seed.
    #[arg(long, conflicts_with = "rates")]
    seed: Option<u64>,
    /// First eps of the schedule.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    shrink: Option<String>,
    #[arg(long)]
    max_rounds: Option<usize>,
    /// Keep shrinking eps until the closed-form boundary scaling certifies.
    #[arg(long)]
    closed_form: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Also write the witness JSON here.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    shape: Shape,
    #[command(flatten)]
    rates: RateArgs,
    /// Newton seed or state to classify; may be repeated.
    #[arg(long = "state")]
    states: Vec<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Dopri5,
    Rosenbrock,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    shape: Shape,
    #[command(flatten)]
    rates: RateArgs,
    /// Initial state.
    #[arg(long, allow_hyphen_values = true)]
    x0: String,
    /// Extra convergence target; may be repeated.
    #[arg(long = "target")]
    targets: Vec<String>,
    #[arg(long, default_value_t = 1e4)]
    t_max: f64,
    #[arg(long, default_value_t = 1e-8)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-10)]
    atol: f64,
    #[arg(long, value_enum, default_value = "dopri5")]
    method: MethodArg,
    /// CSV destination; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RegionKind {
    Mss,
    Bistability,
    Alt,
    All,
}

#[derive(Debug, Args)]
struct RegionArgs {
    #[command(flatten)]
    shape: Shape,
    /// Front rates `r1..rn`.
    #[arg(long)]
    rates: String,
    #[arg(long)]
    rn2: String,
    #[arg(long, value_enum, default_value = "bistability")]
    kind: RegionKind,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Values of m, e.g. `2,3` or `2..6`.
    #[arg(short = 'm', long = "m", default_value = "2..6")]
    m: String,
    /// Values of n, e.g. `3,5` or `3..11` (odd values are used as given).
    #[arg(short = 'n', long = "n", default_value = "3,5,7,9,11")]
    n: String,
    /// Seeds for sampled rates, in addition to the canonical ones.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    /// Skip canonical rates.
    #[arg(long)]
    no_canonical: bool,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    shrink: Option<String>,
    #[arg(long)]
    max_rounds: Option<usize>,
    /// Worker threads; defaults to SEQNET_THREADS or the number of cores.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

/// Run the command line; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    configure_threads();
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code for an error: 2 for malformed input, 1 for analytic failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParams(_)
        | Error::Syntax { .. }
        | Error::UnknownSpecies { .. }
        | Error::DuplicateRate { .. }
        | Error::RateLabels { .. }
        | Error::NotSequestration
        | Error::Dimension { .. }
        | Error::Number(_)
        | Error::Io(_) => 2,
        _ => 1,
    }
}

fn configure_threads() {
    if let Some(k) = env_threads() {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
}

fn env_threads() -> Option<usize> {
    std::env::var("SEQNET_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&k| k > 0)
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Gen(a) => cmd_gen(a, out),
        Command::Witness(a) => cmd_witness(a, out),
        Command::Analyze(a) => cmd_analyze(a, out),
        Command::Simulate(a) => cmd_simulate(a, out, err),
        Command::RegionCheck(a) => cmd_region(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
    }
}

fn io(e: std::io::Error) -> Error {
    Error::from(e)
}

fn print_json(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?).map_err(io)
}

fn params(shape: &Shape) -> Result<ModelParams> {
    ModelParams::new(shape.m, shape.n)
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    Ok(parse_rational_list(text)?.iter().map(Scalar::to_f64).collect())
}

fn cmd_gen(a: GenArgs, out: &mut dyn Write) -> Result<i32> {
    let base = build_sequestration(a.shape.m, a.shape.n)?;
    let net = if a.closed { base } else { fully_open_extension(&base)? };
    match a.format {
        Format::Text => write!(out, "{}", format_network(&net)).map_err(io)?,
        Format::Json => print_json(out, &net.to_json())?,
    }
    Ok(0)
}

fn witness_options(eps: Option<&str>, shrink: Option<&str>, max_rounds: Option<usize>) -> Result<WitnessOptions> {
    let mut opts = WitnessOptions::default();
    if let Some(e) = eps {
        opts.eps0 = parse_rational(e)?;
    }
    if let Some(s) = shrink {
        opts.shrink = parse_rational(s)?;
    }
    if let Some(k) = max_rounds {
        opts.max_rounds = k;
    }
    opts.validate()?;
    Ok(opts)
}

fn cmd_witness(a: WitnessArgs, out: &mut dyn Write) -> Result<i32> {
    let p = params(&a.shape)?;
    p.ensure_bistable()?;
    let source = match (&a.rates, &a.rn2, a.seed) {
        (Some(r), Some(rn2), _) => {
            RateSource::User(FrontRates::new(&p, parse_rational_list(r)?, parse_rational(rn2)?)?)
        }
        (Some(_), None, _) => return Err(Error::InvalidParams("--rates requires --rn2".into())),
        (None, Some(_), _) => return Err(Error::InvalidParams("--rn2 requires --rates".into())),
        (None, None, Some(seed)) => RateSource::Sampled(seed),
        (None, None, None) => RateSource::Canonical,
    };
    let mut opts = witness_options(a.eps.as_deref(), a.shrink.as_deref(), a.max_rounds)?;
    opts.closed_form = a.closed_form;
    let w = find_witness(&p, &source, &opts)?;
    if let Some(path) = &a.output {
        w.save(path)?;
    }
    match a.format {
        Format::Json => print_json(out, &w)?,
        Format::Text => {
            write!(out, "{}", w.summary()).map_err(io)?;
            for t in &w.trace {
                writeln!(out, "  eps={} {}", format_rational(&t.eps), t.message).map_err(io)?;
            }
        }
    }
    Ok(if w.bistable { 0 } else { 1 })
}

/// Full rate vector from the rate arguments, plus the front rates and
/// `eps` when the vector has the witness shape (equal small rates and the
/// conservation relations).
struct Rates {
    full: Vec<Rational>,
    witness: Option<(FrontRates<Rational>, Rational)>,
}

fn resolve_rates(p: &ModelParams, a: &RateArgs) -> Result<Rates> {
    let full = if let Some(path) = &a.witness {
        let w = WitnessResult::load(path)?;
        if (w.m, w.n) != (p.m, p.n) {
            return Err(Error::InvalidParams(format!(
                "witness file is for K({}, {}), not K({}, {})",
                w.m, w.n, p.m, p.n
            )));
        }
        w.r
    } else {
        let text = a
            .rates
            .as_deref()
            .ok_or_else(|| Error::InvalidParams("give --rates or --witness".into()))?;
        let r = parse_rational_list(text)?;
        if r.len() == p.num_rates() {
            r
        } else if r.len() == p.n {
            let rn2 = a
                .rn2
                .as_deref()
                .ok_or_else(|| Error::InvalidParams("front rates need --rn2".into()))?;
            let eps = a
                .eps
                .as_deref()
                .ok_or_else(|| Error::InvalidParams("front rates need --eps".into()))?;
            let front = FrontRates::new(p, r, parse_rational(rn2)?)?;
            conservation_substitute(p, &stamp_eps(p, &front, &parse_rational(eps)?))?.into_values()
        } else {
            return Err(Error::Dimension {
                expected: p.num_rates(),
                found: r.len(),
            });
        }
    };
    if full.iter().any(|v| !v.is_positive()) {
        return Err(Error::InvalidParams("all rates must be positive".into()));
    }
    let witness = witness_shape(p, &full);
    Ok(Rates { full, witness })
}

fn witness_shape(p: &ModelParams, full: &[Rational]) -> Option<(FrontRates<Rational>, Rational)> {
    let front = FrontRates::from_rates(p, full).ok()?;
    let slots = p.eps_slots();
    let eps = full[slots[0] - 1].clone();
    if eps.is_zero() || slots.iter().any(|&j| full[j - 1] != eps) {
        return None;
    }
    let rebuilt = conservation_substitute(p, &stamp_eps(p, &front, &eps)).ok()?.into_values();
    (rebuilt == full).then_some((front, eps))
}

#[derive(Debug, Clone, Serialize)]
struct AnalyzedState {
    origin: String,
    x: Vec<f64>,
    residual: f64,
    #[serde(rename = "detJ")]
    det_j: f64,
    nondegenerate: bool,
    report: StabilityReport,
}

fn analyze_state(p: &ModelParams, r: &[Rational], rf: &[f64], origin: String, x: Vec<f64>) -> Result<AnalyzedState> {
    let s = SteadyState::assess(p, rf, x, Branch::AllOnes, 0.0);
    let report = classify_exact(p, r, &s.x)?;
    Ok(AnalyzedState {
        origin,
        residual: s.residual_norm,
        det_j: s.det_j,
        nondegenerate: s.nondegenerate,
        x: s.x,
        report,
    })
}

fn same_state(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(u, v)| (u - v).abs() <= 1e-6 * u.abs().max(v.abs()).max(1.0))
}

fn branch_states(p: &ModelParams, front: &FrontRates<Rational>, eps: &Rational) -> Vec<(Branch, Result<Vec<f64>>)> {
    let front_f = front.to_f64();
    Branch::ALL
        .iter()
        .map(|&b| {
            let x = continue_in_eps(p, &front_f, b, eps.to_f64(), &ContinuationOptions::default()).map(|s| s.x);
            (b, x)
        })
        .collect()
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::AllOnes => "all-ones",
        Branch::Delta => "delta",
        Branch::Boundary => "boundary",
    }
}

fn region_checks(p: &ModelParams, front: &FrontRates<Rational>) -> Result<Vec<RegionCheck>> {
    if p.ensure_bistable().is_err() {
        return Ok(Vec::new());
    }
    Ok(vec![
        check_mss(p, front)?,
        check_bistability(p, front, false)?,
        check_bistability(p, front, true)?,
    ])
}

/// Front rates given directly as `--rates r1..rn --rn2 v`, if so.
fn explicit_front(p: &ModelParams, a: &RateArgs) -> Result<Option<FrontRates<Rational>>> {
    let (Some(text), Some(rn2)) = (a.rates.as_deref(), a.rn2.as_deref()) else {
        return Ok(None);
    };
    let r = parse_rational_list(text)?;
    if r.len() != p.n {
        return Ok(None);
    }
    Ok(Some(FrontRates::new(p, r, parse_rational(rn2)?)?))
}

fn write_regions(out: &mut dyn Write, regions: &[RegionCheck]) -> Result<()> {
    for check in regions {
        let failed: Vec<String> = check.failed().map(|r| r.id.to_string()).collect();
        let status = if failed.is_empty() {
            "satisfied".to_string()
        } else {
            format!("failed {}", failed.join(", "))
        };
        writeln!(out, "  region {:?}: {status}", check.kind).map_err(io)?;
    }
    Ok(())
}

fn cmd_analyze(a: AnalyzeArgs, out: &mut dyn Write) -> Result<i32> {
    let p = params(&a.shape)?;
    let seeds = a.states.iter().map(|s| parse_f64_list(s)).collect::<Result<Vec<_>>>()?;
    for s in &seeds {
        if s.len() != p.n {
            return Err(Error::Dimension {
                expected: p.n,
                found: s.len(),
            });
        }
        if s.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidParams("states must be positive".into()));
        }
    }
    let rates = match resolve_rates(&p, &a.rates) {
        Ok(rates) => rates,
        Err(e @ Error::NonPositiveRate { .. }) => {
            // the inflows could not be formed; the region records say why
            let regions = match explicit_front(&p, &a.rates)? {
                Some(front) => region_checks(&p, &front)?,
                None => Vec::new(),
            };
            match a.format {
                Format::Json => print_json(
                    out,
                    &json!({
                        "schema": SCHEMA,
                        "m": p.m,
                        "n": p.n,
                        "regions": regions,
                        "states": [],
                        "notes": [e.to_string()],
                    }),
                )?,
                Format::Text => {
                    writeln!(out, "K({}, {}): {e}", p.m, p.n).map_err(io)?;
                    write_regions(out, &regions)?;
                }
            }
            return Ok(1);
        }
        Err(e) => return Err(e),
    };
    let rf: Vec<f64> = rates.full.iter().map(Scalar::to_f64).collect();
    let front = FrontRates::from_rates(&p, &rates.full)?;
    let regions = region_checks(&p, &front)?;

    let mut states: Vec<AnalyzedState> = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    if let (Some((wf, eps)), true) = (&rates.witness, p.ensure_bistable().is_ok()) {
        for (b, x) in branch_states(&p, wf, eps) {
            match x {
                Ok(x) => states.push(analyze_state(&p, &rates.full, &rf, branch_name(b).into(), x)?),
                Err(e) => notes.push(format!("{} branch: {e}", branch_name(b))),
            }
        }
    }
    let system = ConcentrationSystem {
        params: p,
        rates: rf.clone(),
    };
    let newton = NewtonOptions {
        tol: NewtonOptions::default().tol * (1.0 + rf.iter().fold(0.0f64, |m, v| m.max(v.abs()))),
        ..Default::default()
    };
    for (k, seed) in seeds.iter().enumerate() {
        match newton_refine(&system, seed, &newton) {
            Ok((x, _)) => {
                if let Some(existing) = states.iter_mut().find(|s| same_state(&s.x, &x)) {
                    existing.origin.push_str(&format!(", seed {}", k + 1));
                } else {
                    states.push(analyze_state(&p, &rates.full, &rf, format!("seed {}", k + 1), x)?);
                }
            }
            Err(e) => notes.push(format!("seed {}: {e}", k + 1)),
        }
    }
    let stable: Vec<usize> = states
        .iter()
        .enumerate()
        .filter(|(_, s)| s.nondegenerate && s.report.is_stable())
        .map(|(k, _)| k + 1)
        .collect();
    match a.format {
        Format::Json => print_json(
            out,
            &json!({
                "schema": SCHEMA,
                "m": p.m,
                "n": p.n,
                "r": rates.full.iter().map(format_rational).collect::<Vec<_>>(),
                "eps": rates.witness.as_ref().map(|(_, e)| format_rational(e)),
                "regions": regions,
                "states": states,
                "stable": stable,
                "notes": notes,
            }),
        )?,
        Format::Text => {
            writeln!(out, "K({}, {}) with {} rates", p.m, p.n, rates.full.len()).map_err(io)?;
            write_regions(out, &regions)?;
            for (k, s) in states.iter().enumerate() {
                writeln!(
                    out,
                    "  x{} [{}] = {:?} residual={:.2e} detJ={:.6e} {:?}",
                    k + 1,
                    s.origin,
                    s.x,
                    s.residual,
                    s.det_j,
                    s.report.verdict
                )
                .map_err(io)?;
            }
            for note in &notes {
                writeln!(out, "  note: {note}").map_err(io)?;
            }
        }
    }
    Ok(0)
}

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let p = params(&a.shape)?;
    let rates = resolve_rates(&p, &a.rates)?;
    let x0 = parse_f64_list(&a.x0)?;
    if x0.len() != p.n {
        return Err(Error::Dimension {
            expected: p.n,
            found: x0.len(),
        });
    }
    if x0.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParams("initial state must be positive".into()));
    }
    if !(a.t_max >= 0.0 && a.rtol > 0.0 && a.atol > 0.0) {
        return Err(Error::InvalidParams("t-max must be >= 0 and tolerances positive".into()));
    }
    let rf: Vec<f64> = rates.full.iter().map(Scalar::to_f64).collect();
    let mut names = Vec::new();
    let mut targets = Vec::new();
    if let (Some((wf, eps)), true) = (&rates.witness, p.ensure_bistable().is_ok()) {
        for (k, (b, x)) in branch_states(&p, wf, eps).into_iter().enumerate() {
            if let Ok(x) = x {
                names.push(format!("x{} ({})", k + 1, branch_name(b)));
                targets.push(x);
            }
        }
    }
    for (k, t) in a.targets.iter().enumerate() {
        let x = parse_f64_list(t)?;
        if x.len() != p.n {
            return Err(Error::Dimension {
                expected: p.n,
                found: x.len(),
            });
        }
        names.push(format!("target {}", k + 1));
        targets.push(x);
    }
    let field = SequestrationField::new(&p, &rf)?;
    let opts = IntegrateOptions {
        t_max: a.t_max,
        rtol: a.rtol,
        atol: a.atol,
        method: match a.method {
            MethodArg::Dopri5 => Method::Dopri5,
            MethodArg::Rosenbrock => Method::Rosenbrock,
        },
        ..Default::default()
    };
    let tr = integrate(&field, &x0, &targets, &opts)?;
    let verdict = match &tr.terminal {
        Terminal::Converged { target } => format!("converged to {} at t = {:e}", names[*target], tr.final_time()),
        Terminal::MaxTime => format!("reached t_max = {:e} at {:?}", tr.final_time(), tr.last_state()),
        Terminal::LeftDomain { message } => format!("integration failed: {message}"),
    };
    match &a.output {
        Some(path) => {
            tr.write_csv(path)?;
            writeln!(out, "{verdict}").map_err(io)?;
        }
        None => {
            write!(out, "{}", tr.to_csv()).map_err(io)?;
            writeln!(err, "{verdict}").map_err(io)?;
        }
    }
    Ok(match tr.terminal {
        Terminal::LeftDomain { .. } => 1,
        _ => 0,
    })
}

fn cmd_region(a: RegionArgs, out: &mut dyn Write) -> Result<i32> {
    let p = params(&a.shape)?;
    p.ensure_bistable()?;
    let front = FrontRates::new(&p, parse_rational_list(&a.rates)?, parse_rational(&a.rn2)?)?;
    let checks = match a.kind {
        RegionKind::Mss => vec![check_mss(&p, &front)?],
        RegionKind::Bistability => vec![check_bistability(&p, &front, false)?],
        RegionKind::Alt => vec![check_bistability(&p, &front, true)?],
        RegionKind::All => vec![
            check_mss(&p, &front)?,
            check_bistability(&p, &front, false)?,
            check_bistability(&p, &front, true)?,
        ],
    };
    let ok = match a.kind {
        RegionKind::All => checks.iter().any(|c| c.all_satisfied),
        _ => checks[0].all_satisfied,
    };
    match a.format {
        Format::Json => print_json(out, &json!({ "schema": SCHEMA, "m": p.m, "n": p.n, "checks": checks }))?,
        Format::Text => {
            for check in &checks {
                writeln!(out, "{:?}: {}", check.kind, if check.all_satisfied { "satisfied" } else { "violated" })
                    .map_err(io)?;
                for r in &check.records {
                    writeln!(
                        out,
                        "  {:<4} {:<22} {}  ({:.6} vs {:.6})",
                        if r.satisfied { "ok" } else { "FAIL" },
                        r.id.to_string(),
                        r.formula,
                        r.lhs,
                        r.rhs
                    )
                    .map_err(io)?;
                }
            }
        }
    }
    Ok(if ok { 0 } else { 1 })
}

fn parse_int_set(text: &str) -> Result<Vec<u64>> {
    let bad = || Error::InvalidParams(format!("cannot read `{text}` as a list or range"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: u64 = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    Ok(out)
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> Result<i32> {
    let ms = parse_int_set(&a.m)?;
    let ns = parse_int_set(&a.n)?;
    let grid: Vec<(u32, usize)> = ms
        .iter()
        .flat_map(|&m| ns.iter().map(move |&n| (m as u32, n as usize)))
        .collect();
    let mut sources = Vec::new();
    if !a.no_canonical {
        sources.push(RateSource::Canonical);
    }
    sources.extend(a.seeds.iter().map(|&s| RateSource::Sampled(s)));
    let opts = witness_options(a.eps.as_deref(), a.shrink.as_deref(), a.max_rounds)?;
    let cells = match a.threads.or_else(env_threads) {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::InvalidParams(e.to_string()))?
            .install(|| sweep(&grid, &sources, &opts)),
        None => sweep(&grid, &sources, &opts),
    };
    let bistable = cells.iter().filter(|c| c.bistable).count();
    match a.format {
        Format::Json => print_json(
            out,
            &json!({ "schema": SCHEMA, "cells": cells, "bistable": bistable, "total": cells.len() }),
        )?,
        Format::Text => {
            for c in &cells {
                let status = match (&c.error, c.bistable) {
                    (Some(e), _) => format!("error: {e}"),
                    (None, true) => format!("bistable at eps={:e}", c.eps.unwrap_or(f64::NAN)),
                    (None, false) => format!("not bistable after {} rounds", c.rounds),
                };
                writeln!(
                    out,
                    "m={} n={} {:<12} states={} stable={} {}",
                    c.m, c.n, c.source, c.states_found, c.stable_count, status
                )
                .map_err(io)?;
            }
            writeln!(out, "{bistable}/{} bistable", cells.len()).map_err(io)?;
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("seqnet").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn gen_prints_open_network() {
        let (code, out, _) = run_args(&["gen", "-m", "2", "-n", "3"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 9);
        assert_eq!(out.lines().next(), Some("X1 + X2 -> 0 ; r1"));
        assert!(out.contains("X1 -> 2 X3 ; r3"));
    }

    #[test]
    fn bad_params_are_usage_errors() {
        assert_eq!(run_args(&["gen", "-m", "0", "-n", "3"]).0, 2);
        assert_eq!(run_args(&["witness", "-m", "2", "-n", "4"]).0, 2);
        assert_eq!(run_args(&["frobnicate"]).0, 2);
        assert_eq!(run_args(&["witness", "-m", "2", "-n", "3", "--rates", "1,2,3"]).0, 2);
    }

    #[test]
    fn int_sets() {
        assert_eq!(parse_int_set("2..4").unwrap(), vec![2, 3, 4]);
        assert_eq!(parse_int_set("3, 5,7").unwrap(), vec![3, 5, 7]);
        assert!(parse_int_set("a").is_err());
    }

    #[test]
    fn witness_shape_detection() {
        let p = ModelParams::bistable(6, 5).unwrap();
        let a = RateArgs {
            rates: Some("2,1,6,7,1".into()),
            rn2: Some("5".into()),
            eps: Some("0.006".into()),
            witness: None,
        };
        let rates = resolve_rates(&p, &a).unwrap();
        let (front, eps) = rates.witness.unwrap();
        assert_eq!(front.r_n2, crate::scalar::rat(5, 1));
        assert_eq!(eps, crate::scalar::rat(6, 1000));
        let mut full = rates.full.clone();
        full[14] = full[14].clone() + crate::scalar::rat(1, 1);
        assert!(witness_shape(&p, &full).is_none());
    }
}
