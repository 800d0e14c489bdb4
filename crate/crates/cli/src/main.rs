//! `tracelab`: character tables, trace checks, GNS models, spectral-gap
//! certificates and scans from the command line.
//!
//! Exit status is 0 on success, 1 when an input fails validation, 2 when a
//! size budget is exceeded and 64 on usage errors or malformed plan files.

mod tracespec;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use tracelab_core::cache::{Cached, Compute, TableCache, TableSource};
use tracelab_core::chartable::DixonOptions;
use tracelab_core::experiments::{
    coefficient_list, dimension_census, group_and_table, semidirect_scan, vanishing_scan, Family, Manifest,
    ManifestEntry, ScanBudget, ScanPlan, VanishingSeries,
};
use tracelab_core::gns::{center, decompose_trace, gns_with, GnsDump, GnsModel, GnsOptions};
use tracelab_core::group::IntMatrix;
use tracelab_core::relative::torus_limit_scan;
use tracelab_core::spectral::{
    beta_grid, norm_conj, norm_pi, restricted_conj_norm, CheckOptions, GapReport, GroupAlgebraElement,
};
use tracelab_core::trace::is_trace;
use tracelab_core::{linalg, CharacterTable, Config, Error, GroupDescriptor, GroupHandle, IntegerMatrixElement, Trace};

use tracespec::TraceSpec;

#[derive(Parser, Debug)]
#[command(name = "tracelab", version, about = "Exact traces, characters and spectral-gap certificates on finite groups")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Table cache directory (default: $TRACELAB_CACHE or .tracelab-cache).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Compute every table afresh and leave the cache untouched.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Directory for result files and manifests.
    #[arg(long, global = true, default_value = "tracelab-out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 lets the pool decide).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Floating-point tolerance, in (0, 1e-3].
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    order_budget: Option<usize>,
    #[arg(long, global = true)]
    class_budget: Option<usize>,
    #[arg(long, global = true)]
    orbit_budget: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute (or load) a character table and print its degrees.
    Chartable { group: GroupDescriptor },
    /// Check normalization, invariance and positivity of a trace.
    TraceCheck(TraceArgs),
    /// Build the GNS model of a trace and report its center.
    Gns(TraceArgs),
    /// Compare operator norms with the trace inequalities over a β grid.
    Gap(GapArgs),
    /// Run a vanishing scan described by a JSON plan.
    ScanVanishing {
        #[arg(long)]
        plan: PathBuf,
    },
    /// Vanishing scan over SL(d, p) ⋉ 𝔽_p^d at one probe.
    ScanSemidirect(SemidirectArgs),
    /// Exponential sums of finite torus orbits on a lattice ball.
    ScanTorus(TorusArgs),
    /// Split a trace into characters along minimal central projections.
    Decompose(TraceArgs),
    /// Irreducible degree multisets over a list of moduli.
    Census(CensusArgs),
}

#[derive(Args, Debug)]
struct TraceArgs {
    #[arg(long)]
    group: GroupDescriptor,
    /// `one`, `delta`, `irr:i` or a convex sum such as `1/4*irr:1+3/4*irr:6`.
    #[arg(long)]
    trace: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Averaging {
    /// Uniform over the generators and their inverses.
    UniformGens,
    /// Uniform over the whole group.
    Uniform,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Side {
    Left,
    Conj,
    Both,
}

#[derive(Args, Debug)]
struct GapArgs {
    #[command(flatten)]
    trace: TraceArgs,
    #[arg(long, value_enum, default_value = "uniform-gens")]
    a: Averaging,
    /// β values; a grid of 20 values from just below the norm to 1 when omitted.
    #[arg(long, value_delimiter = ',')]
    beta: Vec<f64>,
    #[arg(long, value_enum, default_value = "both")]
    side: Side,
    /// Random test vectors per β.
    #[arg(long, default_value_t = 1000)]
    vectors: usize,
}

#[derive(Args, Debug)]
struct SemidirectArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    primes: Vec<u32>,
    /// Linear part, rows separated by `;` (default: identity).
    #[arg(long)]
    matrix: Option<String>,
    /// Translation part, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    translation: Vec<i64>,
}

#[derive(Args, Debug)]
struct TorusArgs {
    #[arg(long)]
    d: usize,
    /// Scan every denominator from 1 to this bound.
    #[arg(long)]
    qmax: u32,
    /// Radius of the lattice ball in the sup norm.
    #[arg(long, default_value_t = 2)]
    ball: i64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Sl,
    Aff,
}

#[derive(Args, Debug)]
struct CensusArgs {
    #[arg(long, value_enum, default_value = "sl")]
    family: FamilyArg,
    #[arg(long)]
    d: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    moduli: Vec<u32>,
}

enum Failure {
    Usage(String),
    Invalid(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

struct Context {
    config: Config,
    out: PathBuf,
    source: Box<dyn TableSource>,
    cached: bool,
    manifest: Manifest,
}

impl Context {
    fn new(global: &GlobalArgs, command: &str, argv: &[String]) -> Result<Self, Failure> {
        let defaults = Config::default();
        let config = Config {
            cache_dir: global.cache_dir.clone().unwrap_or(defaults.cache_dir),
            order_budget: global.order_budget.unwrap_or(defaults.order_budget),
            class_budget: global.class_budget.unwrap_or(defaults.class_budget),
            orbit_budget: global.orbit_budget.unwrap_or(defaults.orbit_budget),
            tol: global.tol.unwrap_or(defaults.tol),
            seed: global.seed.unwrap_or(defaults.seed),
            threads: global.threads.unwrap_or(defaults.threads),
        };
        config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        if config.threads > 0 {
            // the global pool can only be configured once per process
            let _ = rayon::ThreadPoolBuilder::new().num_threads(config.threads).build_global();
        }
        let options = DixonOptions { max_classes: config.class_budget, ..DixonOptions::default() };
        let source: Box<dyn TableSource> = if global.no_cache {
            Box::new(Compute(options))
        } else {
            Box::new(Cached { cache: TableCache::new(&config.cache_dir), options })
        };
        let mut manifest = Manifest::new(command, config.seed, json!({ "config": config, "no_cache": global.no_cache }));
        manifest.inputs.push(ManifestEntry::of_bytes("argv", argv.join(" ").as_bytes()));
        Ok(Context { config, out: global.out.clone(), source, cached: !global.no_cache, manifest })
    }

    fn table(&mut self, descriptor: &GroupDescriptor) -> Result<(Arc<GroupHandle>, Arc<CharacterTable>), Failure> {
        let (g, t, outcome) = group_and_table(descriptor, self.config.order_budget, self.source.as_ref())?;
        self.manifest.record_cache(descriptor, outcome);
        Ok((g, t))
    }

    fn trace(&mut self, args: &TraceArgs) -> Result<(Arc<GroupHandle>, Arc<CharacterTable>, Trace), Failure> {
        let spec: TraceSpec = args.trace.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
        let (g, t) = self.table(&args.group)?;
        let phi = spec.build(&g, &t)?.with_label(args.trace.clone());
        Ok((g, t, phi))
    }

    fn write(&mut self, name: &str, contents: &[u8]) -> Result<PathBuf, Failure> {
        let path = self.out.join(name);
        self.manifest.write_output(&path, contents)?;
        Ok(path)
    }

    fn finish(self, name: &str) -> Outcome {
        self.manifest.write(&self.out.join(format!("{name}.manifest.json")))?;
        Ok(())
    }
}

fn model_of(phi: &Trace, table: &CharacterTable) -> Result<GnsModel, Failure> {
    Ok(gns_with(phi, GnsOptions { table: Some(table), trusted: false })?)
}

fn degree_text(degrees: &[u64]) -> String {
    let parts: Vec<String> = degrees.iter().map(u64::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

fn chartable(mut ctx: Context, descriptor: &GroupDescriptor) -> Outcome {
    let (g, t) = ctx.table(descriptor)?;
    let mut csv = String::from("row,degree,values\n");
    for i in 0..t.len() {
        let values: Vec<String> = t.row(i).iter().map(coefficient_list).collect();
        let _ = writeln!(csv, "{i},{},{}", t.degrees()[i], values.join(" "));
    }
    let path = ctx.write(&format!("{}.table.csv", descriptor.sanitized()), csv.as_bytes())?;
    println!("group {descriptor}: order {}, {} classes", g.order(), t.len());
    println!("degrees {}", degree_text(&t.degree_multiset()));
    if ctx.cached {
        println!("cache {}", TableCache::new(&ctx.config.cache_dir).path_for(descriptor).display());
    }
    println!("table {}", path.display());
    ctx.finish("chartable")
}

fn trace_check(mut ctx: Context, args: &TraceArgs) -> Outcome {
    let (_, t, phi) = ctx.trace(args)?;
    let report = is_trace(&phi, None, ctx.config.tol, Some(&t));
    let text = serde_json::to_string_pretty(&report).map_err(Error::from)?;
    println!("{text}");
    ctx.write("trace-check.json", (text + "\n").as_bytes())?;
    let passes = report.passes();
    ctx.finish("trace-check")?;
    if passes {
        Ok(())
    } else {
        Err(Failure::Invalid(format!("{} is not a trace", args.trace)))
    }
}

fn gns_command(mut ctx: Context, args: &TraceArgs) -> Outcome {
    let (_, t, phi) = ctx.trace(args)?;
    let model = model_of(&phi, &t)?;
    let c = center(&model)?;
    let invariant = model.invariant_dimension();
    println!("dimension {}", model.dim());
    println!("invariant vectors of the conjugation representation {invariant}");
    println!("center dimension {}", c.center_dim());
    println!("character {}", invariant == 1);
    println!("reconstruction error {:.3e}", model.reconstruction_error());
    let dump = serde_json::to_string_pretty(&GnsDump::from_model(&model)).map_err(Error::from)?;
    let path = ctx.write(&format!("gns-{}.json", args.group.sanitized()), dump.as_bytes())?;
    println!("model {}", path.display());
    ctx.manifest.details = json!({ "dimension": model.dim(), "center": c.center_dim(), "invariant": invariant });
    ctx.finish("gns")
}

fn averaging(g: &GroupHandle, a: Averaging) -> Result<GroupAlgebraElement<usize>, Failure> {
    let elements: Vec<usize> = match a {
        Averaging::Uniform => (0..g.order()).collect(),
        Averaging::UniformGens if g.generators().is_empty() => vec![g.identity()],
        Averaging::UniformGens => return Ok(GroupAlgebraElement::symmetric_uniform(g, g.generators())?),
    };
    Ok(GroupAlgebraElement::uniform(&elements)?)
}

fn gap(mut ctx: Context, args: &GapArgs) -> Outcome {
    let (g, t, phi) = ctx.trace(&args.trace)?;
    let model = model_of(&phi, &t)?;
    let a = averaging(&g, args.a)?;
    let opts = CheckOptions { random_vectors: args.vectors, seed: ctx.config.seed, tol: ctx.config.tol.max(1e-9) };
    let mut reports: Vec<GapReport> = Vec::new();
    if args.side != Side::Conj {
        let terms: Vec<_> = a.terms().map(|(&x, c)| (x, c)).collect();
        let norm = linalg::operator_norm(&model.pi_of(&terms));
        let betas = if args.beta.is_empty() { beta_grid(norm, 20) } else { args.beta.clone() };
        reports.extend(norm_pi(&model, &a, &betas, &opts)?);
    }
    if args.side != Side::Left {
        let norm = restricted_conj_norm(&model, &a)?.value;
        let betas = if args.beta.is_empty() { beta_grid(norm, 20) } else { args.beta.clone() };
        reports.extend(norm_conj(&model, &a, &betas, &opts)?);
    }
    println!("{:<12} {:>8} {:>12} {:>6} {:>6} {:>12} {:>6}", "check", "beta", "norm", "norm", "ineq", "residual", "agree");
    for r in &reports {
        println!(
            "{:<12} {:>8.5} {:>12.9} {:>6} {:>6} {:>12.3e} {:>6}",
            r.check,
            r.beta,
            r.exact_norm.unwrap_or(f64::NAN),
            r.norm_side.map_or("-".into(), |b| b.to_string()),
            r.inequality_side,
            r.worst_residual,
            r.agree
        );
    }
    let text = serde_json::to_string_pretty(&reports).map_err(Error::from)?;
    let path = ctx.write(&format!("gap-{}.json", args.trace.group.sanitized()), (text + "\n").as_bytes())?;
    println!("reports {}", path.display());
    let disagree = reports.iter().filter(|r| !r.agree).count();
    ctx.manifest.details = json!({ "reports": reports.len(), "disagreements": disagree });
    ctx.finish("gap")?;
    if disagree == 0 {
        Ok(())
    } else {
        Err(Failure::Invalid(format!("{disagree} reports where the two sides disagree")))
    }
}

fn print_series(s: &VanishingSeries) {
    if !s.in_hypothesis {
        println!("note: d = {} lies outside the range d >= 3 of the affine statement", s.d);
    }
    for p in s.central_probes() {
        println!("note: probe {p} is central in some quotient; vanishing is not expected there");
    }
    println!("{:>8} {:>6} {:>10} {:>22} {:>6} {:>8}", "modulus", "probe", "order", "max |phi|", "row", "degree");
    for e in &s.entries {
        for p in &e.probes {
            let (row, degree) = p.witness.as_ref().map_or((String::new(), String::new()), |w| {
                (w.row.to_string(), w.degree.to_string())
            });
            println!("{:>8} {:>6} {:>10} {:>22.17} {:>6} {:>8}", e.modulus, p.probe, e.order, p.max_abs, row, degree);
        }
    }
    if let Some(t) = &s.truncated {
        println!("truncated at modulus {}: {}", t.modulus, t.reason);
    }
}

fn record_series(ctx: &mut Context, s: &VanishingSeries, csv_name: &Path) -> Outcome {
    for e in &s.entries {
        ctx.manifest.record_cache(&e.group, e.cache);
    }
    let path = csv_name.to_path_buf();
    ctx.manifest.write_output(&path, s.to_csv().as_bytes())?;
    println!("series {}", path.display());
    let witnesses: Vec<_> = s
        .entries
        .iter()
        .flat_map(|e| e.probes.iter().map(move |p| (e.modulus, p)))
        .map(|(m, p)| json!({ "modulus": m, "probe": p.probe, "central": p.central, "witness": p.witness }))
        .collect();
    ctx.manifest.details = json!({
        "consistent": s.consistent(),
        "in_hypothesis": s.in_hypothesis,
        "truncated": s.truncated,
        "witnesses": witnesses,
    });
    if !s.consistent() {
        return Err(Failure::Invalid("exact maximum and independent sweep disagree".into()));
    }
    Ok(())
}

fn scan_vanishing(mut ctx: Context, plan_path: &Path) -> Outcome {
    let text = std::fs::read_to_string(plan_path)
        .map_err(|e| Failure::Usage(format!("cannot read plan {}: {e}", plan_path.display())))?;
    let plan = ScanPlan::from_json(&text).map_err(|e| Failure::Usage(format!("malformed plan: {e}")))?;
    ctx.manifest.inputs.push(ManifestEntry::of_bytes(plan_path.display().to_string(), text.as_bytes()));
    let series = vanishing_scan(&plan, ctx.source.as_ref())?;
    print_series(&series);
    let out = plan.output.clone().unwrap_or_else(|| ctx.out.join("vanishing.csv"));
    record_series(&mut ctx, &series, &out)?;
    ctx.finish("scan-vanishing")
}

fn parse_matrix(text: &str) -> Result<IntMatrix, Failure> {
    let rows = text
        .split(';')
        .map(|r| r.split(',').map(|x| x.trim().parse::<i64>()).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Usage(format!("matrix `{text}`: {e}")))?;
    IntMatrix::from_rows(&rows).map_err(|e| Failure::Usage(e.to_string()))
}

fn scan_semidirect(mut ctx: Context, args: &SemidirectArgs) -> Outcome {
    let matrix = match &args.matrix {
        Some(m) => parse_matrix(m)?,
        None => IntMatrix::identity(args.d),
    };
    let translation = if args.translation.is_empty() { vec![0; args.d] } else { args.translation.clone() };
    if matrix.dim() != args.d || translation.len() != args.d {
        return Err(Failure::Usage(format!("probe must be {0}x{0} with a translation of length {0}", args.d)));
    }
    let probe = IntegerMatrixElement::affine(matrix, translation)?;
    let budget = ScanBudget { order: ctx.config.order_budget, classes: ctx.config.class_budget };
    let series = semidirect_scan(args.d, &args.primes, probe, budget, ctx.source.as_ref())?;
    print_series(&series);
    let out = ctx.out.join("semidirect.csv");
    record_series(&mut ctx, &series, &out)?;
    ctx.finish("scan-semidirect")
}

fn scan_torus(mut ctx: Context, args: &TorusArgs) -> Outcome {
    if args.qmax == 0 || args.ball < 0 {
        return Err(Failure::Usage("--qmax must be positive and --ball nonnegative".into()));
    }
    let qs: Vec<u32> = (1..=args.qmax).collect();
    let scan = torus_limit_scan(args.d, &qs, args.ball, ctx.config.orbit_budget)?;
    if !scan.covered {
        println!("note: d = {} is reported without the limit statement, which needs d >= 3", args.d);
    }
    println!("{:>4} {:>7} {:>12} {:>24}", "q", "orbits", "sizes", "max |phi|");
    for r in &scan.rows {
        let sizes: Vec<String> = r.orbits.iter().map(|o| o.size.to_string()).collect();
        let max = match &r.max_abs_exact {
            Some(x) if *x.denom() == 1 => x.numer().to_string(),
            Some(x) => format!("{}/{}", x.numer(), x.denom()),
            None => format!("{:.17}", r.max_abs),
        };
        println!("{:>4} {:>7} {:>12} {:>24}", r.q, r.orbits.len(), sizes.join(" "), max);
    }
    let path = ctx.write("torus.csv", scan.to_csv().as_bytes())?;
    println!("values {}", path.display());
    ctx.manifest.details = serde_json::to_value(&scan.rows).map_err(Error::from)?;
    ctx.finish("scan-torus")
}

fn decompose(mut ctx: Context, args: &TraceArgs) -> Outcome {
    let (g, t, phi) = ctx.trace(args)?;
    let model = model_of(&phi, &t)?;
    let c = center(&model)?;
    let parts = decompose_trace(&model, &c)?;
    let mut out = Vec::new();
    println!("{:>22} {:>6} {:>6}", "weight", "rank", "row");
    for p in &parts {
        let row = (0..t.len()).find(|&i| {
            let r = t.normalized_complex_row(i);
            (0..g.order()).all(|x| (p.trace.eval(x) - r[g.classes().class_of(x)]).norm() < 1e-8)
        });
        let label = row.map_or("-".to_string(), |r| format!("irr:{r}"));
        println!("{:>22.17} {:>6} {:>6}", p.weight, p.rank, label);
        out.push(json!({ "weight": p.weight, "rank": p.rank, "row": row }));
    }
    let text = serde_json::to_string_pretty(&out).map_err(Error::from)?;
    ctx.write(&format!("decompose-{}.json", args.group.sanitized()), (text + "\n").as_bytes())?;
    ctx.finish("decompose")
}

fn census(mut ctx: Context, args: &CensusArgs) -> Outcome {
    let family = match args.family {
        FamilyArg::Sl => Family::Sl,
        FamilyArg::Aff => Family::Aff,
    };
    let budget = ScanBudget { order: ctx.config.order_budget, classes: ctx.config.class_budget };
    let report = dimension_census(family, args.d, &args.moduli, budget, ctx.source.as_ref())?;
    for r in &report.rows {
        ctx.manifest.record_cache(&r.group, r.cache);
        println!("{:<12} order {:>8}  linear {:>3}  degrees {}", r.group.to_string(), r.order, r.linear, degree_text(&r.degrees));
    }
    println!("{:>8} {:>8}  moduli", "degree", "count");
    for d in &report.degrees {
        let ms: Vec<String> = d.moduli.iter().map(u32::to_string).collect();
        println!("{:>8} {:>8}  {}", d.degree, d.total, ms.join(","));
    }
    let path = ctx.write("census.csv", report.to_csv().as_bytes())?;
    println!("census {}", path.display());
    ctx.finish("census")
}

fn run(cli: Cli, argv: &[String]) -> Outcome {
    let name = match &cli.command {
        Command::Chartable { .. } => "chartable",
        Command::TraceCheck(_) => "trace-check",
        Command::Gns(_) => "gns",
        Command::Gap(_) => "gap",
        Command::ScanVanishing { .. } => "scan-vanishing",
        Command::ScanSemidirect(_) => "scan-semidirect",
        Command::ScanTorus(_) => "scan-torus",
        Command::Decompose(_) => "decompose",
        Command::Census(_) => "census",
    };
    let ctx = Context::new(&cli.global, name, argv)?;
    match &cli.command {
        Command::Chartable { group } => chartable(ctx, group),
        Command::TraceCheck(a) => trace_check(ctx, a),
        Command::Gns(a) => gns_command(ctx, a),
        Command::Gap(a) => gap(ctx, a),
        Command::ScanVanishing { plan } => scan_vanishing(ctx, plan),
        Command::ScanSemidirect(a) => scan_semidirect(ctx, a),
        Command::ScanTorus(a) => scan_torus(ctx, a),
        Command::Decompose(a) => decompose(ctx, a),
        Command::Census(a) => census(ctx, a),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(64) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli, &argv[1..]) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(64)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
