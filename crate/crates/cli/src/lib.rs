//! Subcommands of the `graphnorm` binary: solve, verify, atoms, oracle, bench.
//!
//! Every command writes its report to the supplied writer and returns an
//! [`Status`]; errors returned as `Err` are input errors (exit code 2).

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use graphnorm::analysis::mis_stability;
use graphnorm::dynamics::{run_starts, DynamicsError, GammaSchedule, StartOutcome, StartPoint};
use graphnorm::enumeration::{census, census_from_stream, CensusRow, ENUMERATION_MAX_N};
use graphnorm::io::{
    parse_graph6_stream, parse_instance, parse_reference_csv, parse_solution, parse_warm_start, write_result,
    SolveResult,
};
use graphnorm::oracle::correspondence_check;
use graphnorm::{MisSolution, WeightedGraph};

/// Process outcome, mapped onto exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    /// A produced or supplied solution is not a valid maximal independent set.
    InvalidSolution,
    /// Safe-division fallback fired or a start aborted on a non-finite state.
    NumericalAnomaly,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::InvalidSolution => 1,
            Status::NumericalAnomaly => 3,
        }
    }

    fn worst(self, other: Status) -> Status {
        if other.code() > self.code() {
            other
        } else {
            self
        }
    }
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        ExitCode::from(s.code())
    }
}

pub const INPUT_ERROR_CODE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "graphnorm", version, about = "Graph normalization dynamics for maximum weight independent set")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run multi-start dynamics on one instance and report the rounded solutions.
    Solve(SolveArgs),
    /// Check a vertex set against an instance.
    Verify(VerifyArgs),
    /// Count atomic graphs by spectrum class.
    Atoms(AtomsArgs),
    /// Compare dynamic stability with local minimality for every maximal independent set.
    Oracle(OracleArgs),
    /// Solve every instance in a directory and tabulate gaps.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Linear,
    Constant,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Initial regularization γ₀.
    #[arg(long, default_value_t = GammaSchedule::DEFAULT_GAMMA0)]
    pub gamma0: f64,
    /// Final regularization γ₁ (ignored in constant mode).
    #[arg(long, default_value_t = GammaSchedule::DEFAULT_GAMMA1)]
    pub gamma1: f64,
    #[arg(long, default_value_t = GammaSchedule::DEFAULT_ITERATIONS)]
    pub iterations: usize,
    #[arg(long, value_enum, default_value_t = Mode::Linear)]
    pub mode: Mode,
    /// Number of random starts (ignored when warm starts are given).
    #[arg(long, default_value_t = 16)]
    pub starts: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Leave wall times out of result files so reruns are byte-identical.
    #[arg(long)]
    pub omit_timing: bool,
}

impl RunConfig {
    pub fn schedule(&self) -> Result<GammaSchedule> {
        ensure!(self.starts >= 1, "--starts must be at least 1");
        ensure!(
            self.gamma0.is_finite() && self.gamma0 > 0.0,
            "--gamma0 must be positive, got {}",
            self.gamma0
        );
        let schedule = match self.mode {
            Mode::Linear => {
                ensure!(
                    self.gamma1.is_finite() && self.gamma1 >= self.gamma0,
                    "--gamma1 must be at least --gamma0"
                );
                GammaSchedule::linear(self.gamma0, self.gamma1, self.iterations)?
            }
            Mode::Constant => GammaSchedule::constant(self.gamma0, self.iterations)?,
        };
        Ok(schedule)
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub config: RunConfig,
    /// Fractional warm-start vector, one value per line; repeat for several starts.
    #[arg(long = "warm-start")]
    pub warm_start: Vec<PathBuf>,
    /// Two-column CSV of reference objectives keyed by instance name.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Result file; the JSON goes to stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write a per-step CSV trace (energy, mass, step size) of every start.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub instance: PathBuf,
    /// File listing 0-based member indices, e.g. `{0,2}`.
    pub solution: PathBuf,
    #[arg(long, default_value_t = 1.5)]
    pub gamma: f64,
}

#[derive(Args, Debug)]
pub struct AtomsArgs {
    /// Enumerate every connected graph up to this order.
    #[arg(long, conflicts_with = "graph6", required_unless_present = "graph6")]
    pub n: Option<usize>,
    /// Classify the graphs of a graph6 file instead (one record per line, one order).
    #[arg(long)]
    pub graph6: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    pub instance: PathBuf,
    #[arg(long, default_value_t = 1.5)]
    pub gamma: f64,
    /// Sampled perturbations per maximal independent set.
    #[arg(long, default_value_t = 64)]
    pub perturbations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Emit the full report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Directory of `*.mwis` instance files.
    pub directory: PathBuf,
    #[command(flatten)]
    pub config: RunConfig,
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Where to write one `<instance>.json` result per instance.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<Status> {
    match cli.command {
        Command::Solve(args) => cmd_solve(&args, out),
        Command::Verify(args) => cmd_verify(&args, out),
        Command::Atoms(args) => cmd_atoms(&args, out),
        Command::Oracle(args) => cmd_oracle(&args, out),
        Command::Bench(args) => cmd_bench(&args, out),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_instance(path: &Path) -> Result<WeightedGraph> {
    parse_instance(&read(path)?).with_context(|| format!("parsing instance {}", path.display()))
}

fn instance_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn load_references(path: Option<&Path>) -> Result<std::collections::BTreeMap<String, f64>> {
    match path {
        Some(p) => parse_reference_csv(&read(p)?).with_context(|| format!("parsing references {}", p.display())),
        None => Ok(Default::default()),
    }
}

/// Status implied by a finished result: anomalies outrank invalid solutions.
pub fn result_status(result: &SolveResult) -> Status {
    let aborted = result.starts.iter().any(|s| s.error.is_some());
    if aborted || result.fallback_events() > 0 {
        Status::NumericalAnomaly
    } else if !result.all_valid() {
        Status::InvalidSolution
    } else {
        Status::Success
    }
}

struct Solved {
    result: SolveResult,
    outcomes: Vec<StartOutcome>,
}

fn solve_instance(
    name: &str,
    g: &WeightedGraph,
    config: &RunConfig,
    warm: Vec<(String, Vec<f64>)>,
    reference: Option<f64>,
    record_trace: bool,
) -> Result<Solved> {
    let schedule = config.schedule()?;
    let starts: Vec<StartPoint> = if warm.is_empty() {
        (0..config.starts)
            .map(|index| StartPoint::Random { seed: config.seed, index })
            .collect()
    } else {
        warm.into_iter().map(|(id, values)| StartPoint::Warm { id, values }).collect()
    };
    let outcomes = run_starts(g, &schedule, &starts, record_trace);
    // Warm-start shape problems are input errors, not numerical ones.
    for o in &outcomes {
        if let Err(e @ (DynamicsError::LengthMismatch { .. } | DynamicsError::NonFinite { .. })) = &o.result {
            if o.label.starts_with("warm:") {
                bail!("{}: {e}", o.label);
            }
        }
    }
    let result = SolveResult::assemble(name, g, &schedule, &outcomes, reference, !config.omit_timing);
    Ok(Solved { result, outcomes })
}

fn write_trace(path: &Path, outcomes: &[StartOutcome]) -> Result<()> {
    let mut text = String::from("start,k,gamma,energy,mass,step_norm,fallbacks\n");
    for o in outcomes {
        let Ok((run, _)) = &o.result else { continue };
        let Some(trace) = &run.trace else { continue };
        for (k, r) in trace.records.iter().enumerate() {
            writeln!(
                text,
                "{},{k},{},{},{},{},{}",
                o.label, r.gamma, r.energy, r.mass, r.step_norm, r.fallbacks
            )?;
        }
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<Status> {
    let g = load_instance(&args.instance)?;
    let name = instance_name(&args.instance);
    let mut warm = Vec::new();
    for path in &args.warm_start {
        let values = parse_warm_start(&read(path)?, g.n()).with_context(|| format!("parsing warm start {}", path.display()))?;
        warm.push((instance_name(path), values));
    }
    let references = load_references(args.reference.as_deref())?;
    let reference = references.get(&name).copied();
    let solved = solve_instance(&name, &g, &args.config, warm, reference, args.trace.is_some())?;
    if let Some(path) = &args.trace {
        write_trace(path, &solved.outcomes)?;
    }
    let text = write_result(&solved.result);
    match &args.output {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            write!(out, "{}", summary(&solved.result))?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(result_status(&solved.result))
}

fn summary(r: &SolveResult) -> String {
    let mut s = format!(
        "{}: n={} edges={} best={} members={}\n",
        r.instance,
        r.n,
        r.edges,
        r.best_objective,
        MisDisplay(&r.best_members)
    );
    if let (Some(reference), Some(best_gap)) = (r.reference_objective, r.gap_percent) {
        let _ = writeln!(
            s,
            "reference={reference} best gap={best_gap:.2}% expected gap={}",
            fmt_gap(r.expected_gap_percent)
        );
    }
    s
}

struct MisDisplay<'a>(&'a [usize]);

impl std::fmt::Display for MisDisplay<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let items: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

fn fmt_gap(gap: Option<f64>) -> String {
    gap.map(|g| format!("{g:.2}%")).unwrap_or_default()
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<Status> {
    let g = load_instance(&args.instance)?;
    let members = parse_solution(&read(&args.solution)?).with_context(|| format!("parsing solution {}", args.solution.display()))?;
    let m = MisSolution::evaluate(&g, &members).context("solution refers to a missing vertex")?;
    writeln!(out, "set: {m}")?;
    writeln!(out, "independent: {}", m.independent)?;
    writeln!(out, "maximal: {}", m.maximal)?;
    writeln!(out, "weight: {}", m.weight)?;
    if m.maximal {
        let stab = mis_stability(&g, &m, args.gamma)?;
        writeln!(out, "stability at gamma {}: {stab}", args.gamma)?;
        writeln!(out, "stable: {}", stab > 1.0)?;
    }
    Ok(if m.independent && m.maximal {
        Status::Success
    } else {
        Status::InvalidSolution
    })
}

const CENSUS_HEADER: &str = "n  connected  atomic  irregular-discrete  irregular-continuous  regular-discrete  regular-continuous";

/// Renders census rows as a table followed by one summary line per row.
pub fn render_census(rows: &[CensusRow]) -> String {
    let mut s = format!("{CENSUS_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{:<2} {:>10} {:>7} {:>19} {:>21} {:>17} {:>19}",
            r.n,
            r.connected,
            r.atomic(),
            r.irregular_discrete,
            r.irregular_continuous,
            r.regular_discrete,
            r.regular_continuous
        );
    }
    for r in rows {
        let _ = write!(s, "n={}: {} connected, {} atomic", r.n, r.connected, r.atomic());
        if r.borderline > 0 {
            let _ = write!(s, ", {} undecided", r.borderline);
        }
        if r.skipped_disconnected > 0 {
            let _ = write!(s, ", {} disconnected skipped", r.skipped_disconnected);
        }
        s.push('\n');
    }
    s
}

pub fn cmd_atoms(args: &AtomsArgs, out: &mut dyn Write) -> Result<Status> {
    let rows = match (&args.n, &args.graph6) {
        (Some(n), _) => {
            ensure!(
                (1..=ENUMERATION_MAX_N).contains(n),
                "--n must be between 1 and {ENUMERATION_MAX_N}; use --graph6 for larger orders"
            );
            census(*n)?
        }
        (None, Some(path)) => {
            let graphs = parse_graph6_stream(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
            if graphs.is_empty() {
                vec![CensusRow::default()]
            } else {
                vec![census_from_stream(graphs)?]
            }
        }
        (None, None) => bail!("either --n or --graph6 is required"),
    };
    out.write_all(render_census(&rows).as_bytes())?;
    Ok(Status::Success)
}

pub fn cmd_oracle(args: &OracleArgs, out: &mut dyn Write) -> Result<Status> {
    let g = load_instance(&args.instance)?;
    let report = correspondence_check(&g, args.gamma, args.perturbations, args.seed)?;
    if args.json {
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        out.write_all(text.as_bytes())?;
    } else {
        writeln!(out, "mwis: {} weight {}", report.mwis, report.mwis.weight)?;
        writeln!(out, "set  weight  stability  local-min  min-dQ")?;
        for m in &report.mises {
            writeln!(
                out,
                "{}  {}  {:.6}  {}  {:.3e}",
                MisDisplay(&m.members),
                m.weight,
                m.stability,
                m.local_min_verified,
                m.min_delta_q
            )?;
        }
        writeln!(
            out,
            "{} maximal independent sets, {} violations, {} marginal, {} Q-identity failures",
            report.mises.len(),
            report.violations,
            report.marginal,
            report.q_identity_failures
        )?;
    }
    Ok(if report.violations == 0 && report.q_identity_failures == 0 {
        Status::Success
    } else {
        Status::InvalidSolution
    })
}

/// One bench table row.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    pub n: usize,
    pub best: Option<f64>,
    pub reference: Option<f64>,
    pub expected_gap: Option<f64>,
    pub best_gap: Option<f64>,
    pub mean_ms: Option<f64>,
    pub error: Option<String>,
}

pub fn render_bench(rows: &[BenchRow]) -> String {
    let mut s = String::from("instance  n  best  reference  E[Gap]  Best Gap  mean ms\n");
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for r in rows {
        if let Some(e) = &r.error {
            let _ = writeln!(s, "{}  error: {e}", r.instance);
            continue;
        }
        let _ = writeln!(
            s,
            "{}  {}  {}  {}  {}  {}  {}",
            r.instance,
            r.n,
            opt(r.best),
            opt(r.reference),
            fmt_gap(r.expected_gap),
            fmt_gap(r.best_gap),
            r.mean_ms.map(|m| format!("{m:.3}")).unwrap_or_default()
        );
    }
    let with_ref: Vec<&BenchRow> = rows.iter().filter(|r| r.best_gap.is_some()).collect();
    let mean = |f: &dyn Fn(&BenchRow) -> Option<f64>| {
        let v: Vec<f64> = with_ref.iter().filter_map(|r| f(r)).collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    };
    let or_na = |v: Option<f64>| v.map(|g| format!("{g:.2}%")).unwrap_or_else(|| "n/a".into());
    let _ = writeln!(
        s,
        "{} instances, {} with reference; mean E[Gap] {}, mean Best Gap {}",
        rows.len(),
        with_ref.len(),
        or_na(mean(&|r| r.expected_gap)),
        or_na(mean(&|r| r.best_gap))
    );
    s
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<Status> {
    args.config.schedule()?;
    let references = load_references(args.reference.as_deref())?;
    let mut paths: Vec<PathBuf> = fs::read_dir(&args.directory)
        .with_context(|| format!("listing {}", args.directory.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "mwis"))
        .collect();
    paths.sort();
    if let Some(dir) = &args.output_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }

    let mut status = Status::Success;
    let mut input_errors = 0;
    let mut rows = Vec::new();
    // Instances run one after another so per-instance timings stay uncontended.
    for path in &paths {
        let name = instance_name(path);
        let g = match load_instance(path) {
            Ok(g) => g,
            Err(e) => {
                input_errors += 1;
                rows.push(BenchRow {
                    instance: name,
                    n: 0,
                    best: None,
                    reference: None,
                    expected_gap: None,
                    best_gap: None,
                    mean_ms: None,
                    error: Some(format!("{e:#}")),
                });
                continue;
            }
        };
        let reference = references.get(&name).copied();
        let solved = solve_instance(&name, &g, &args.config, Vec::new(), reference, false)?;
        let r = &solved.result;
        status = status.worst(result_status(r));
        if let Some(dir) = &args.output_dir {
            let file = dir.join(format!("{name}.json"));
            fs::write(&file, write_result(r)).with_context(|| format!("writing {}", file.display()))?;
        }
        rows.push(BenchRow {
            instance: name,
            n: r.n,
            best: Some(r.best_objective),
            reference: r.reference_objective,
            expected_gap: r.expected_gap_percent,
            best_gap: r.gap_percent,
            mean_ms: r.mean_wall_time_ms(),
            error: None,
        });
    }
    out.write_all(render_bench(&rows).as_bytes())?;
    if input_errors > 0 {
        bail!("{input_errors} instance(s) failed to parse");
    }
    Ok(status)
}
