//! Command-line front end: generating-series coefficients, exact induced
//! probabilities and expectations (with optional seeded Monte Carlo),
//! conditioned tree sampling, agreement sizes, tail-bound constants, and the
//! formula-vs-oracle verification suites.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gwmast::agreement::{self, Comparison};
use gwmast::ratio::{self, Rat};
use gwmast::sim::{self, SamplerConfig};
use gwmast::trees::OffspringDistribution;
use gwmast::{config, formulas, series, verify, LabelledTree};
use serde_json::{json, Value};

use output::CsvRow;

const ABOUT: &str =
    "Exact and Monte Carlo statistics for common induced subtrees of random leaf-labelled trees";

const AFTER_HELP: &str = "\
Exit codes: 0 success, 1 verification mismatch, 2 usage error, 3 I/O error.
Monte Carlo trials run in parallel; set RAYON_NUM_THREADS to pin the thread
count. Results depend only on --seed, never on the thread count.";

#[derive(Parser)]
#[command(name = "gwmast", version, about = ABOUT, after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the leaf-count series and its size-biased companion
    Gf(GfArgs),
    /// Exact probability that a fixed leaf set induces a given ordered shape
    Prob(ProbArgs),
    /// Expected number of leaf sets inducing a common subtree in two random trees
    Expect(ExpectArgs),
    /// Draw terminal trees conditioned on their leaf count
    Sample(SampleArgs),
    /// Maximum agreement subtree size of two leaf-labelled trees
    Mast(MastArgs),
    /// Tail-bound constants of an offspring distribution
    Bounds(BoundsArgs),
    /// Run the formula-vs-oracle verification suites
    Verify(VerifyArgs),
}

/// Where the offspring distribution comes from.
#[derive(Args)]
struct DistArgs {
    /// Built-in offspring distribution: binary, d2test, or ternary
    #[arg(long, default_value = "binary", conflicts_with = "config")]
    dist: String,
    /// JSON or TOML file with an "offspring" table of exact probabilities
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

impl DistArgs {
    fn resolve(&self) -> Result<OffspringDistribution, CliError> {
        match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
                config::from_text(&text).map_err(usage)
            }
            None => config::built_in(&self.dist).map_err(usage),
        }
    }

    fn source_param(&self) -> (&'static str, Value) {
        match &self.config {
            Some(path) => ("config", json!(path.display().to_string())),
            None => ("dist", json!(self.dist)),
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// A verification suite found a mismatch (exit 1).
    Mismatch(String),
    /// Invalid arguments or an infeasible request (exit 2).
    Usage(String),
    /// Reading inputs or writing artifacts failed (exit 3).
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Mismatch(m) | CliError::Usage(m) | CliError::Io(m) => m,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Gf(args) => run_gf(args),
        Command::Prob(args) => run_prob(args),
        Command::Expect(args) => run_expect(args),
        Command::Sample(args) => run_sample(args),
        Command::Mast(args) => run_mast(args),
        Command::Bounds(args) => run_bounds(args),
        Command::Verify(args) => run_verify(args),
    }
}

// ----------------------------------------------------------------- gf

#[derive(Args)]
struct GfArgs {
    #[command(flatten)]
    dist: DistArgs,
    /// Truncation order (largest leaf count reported)
    #[arg(long)]
    order: usize,
    /// Write a JSON artifact (both series)
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
    /// Write a CSV artifact (leaf-count series only)
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

fn run_gf(args: GfArgs) -> Result<(), CliError> {
    let dist = args.dist.resolve()?;
    let phi = series::leaf_count_gf(&dist, args.order);
    let phi1 = series::size_biased_gf(&dist, &phi);
    println!("k\tleaf-count\tsize-biased");
    for k in 0..=args.order {
        println!("{k}\t{}\t{}", phi.coeff(k), phi1.coeff(k));
    }
    let manifest = output::manifest(
        "gf",
        Some(&dist),
        vec![args.dist.source_param(), ("order", json!(args.order))],
    );
    if let Some(path) = &args.json {
        let coeffs = |s: &series::PowerSeries| -> Vec<String> {
            (0..=args.order).map(|k| output::exact(&s.coeff(k))).collect()
        };
        let value = json!({
            "manifest": manifest,
            "leaf_count": coeffs(&phi),
            "size_biased": coeffs(&phi1),
        });
        output::write_json(path, &value)?;
    }
    if let Some(path) = &args.csv {
        let rows: Vec<CsvRow> = (0..=args.order)
            .map(|k| CsvRow { n: Some(k), a: None, value: output::exact(&phi.coeff(k)), stderr: None })
            .collect();
        output::write_csv(path, &manifest, &rows)?;
    }
    Ok(())
}

// ----------------------------------------------------------------- prob

#[derive(Args)]
struct ProbArgs {
    #[command(flatten)]
    dist: DistArgs,
    /// Target shape as a leaf-labelled tree, e.g. "((1,2),3)"; with --trials
    /// the labels name the observed leaf subset
    #[arg(long)]
    shape: String,
    /// Leaf count the random tree is conditioned on
    #[arg(long)]
    n: usize,
    /// Also run a seeded Monte Carlo estimate with this many trials
    #[arg(long)]
    trials: Option<u64>,
    /// Monte Carlo seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

fn run_prob(args: ProbArgs) -> Result<(), CliError> {
    let dist = args.dist.resolve()?;
    let target = LabelledTree::from_str(&args.shape).map_err(usage)?;
    let a = target.shape().leaf_count();
    let n = args.n;
    let result = formulas::induced_probability(&dist, target.shape(), n).map_err(usage)?;
    println!("shape               {target}  ({a} leaves, ordered)");
    print_rational(&format!("P({n} leaves)"), &result.leaf_count_prob);
    print_rational("P(shape and leaves)", &result.unconditional);
    print_rational("P(shape | leaves)", &result.conditional);
    let mc = match args.trials {
        Some(trials) => {
            let cfg = SamplerConfig::new(dist.clone(), args.seed);
            let report = sim::mc_induced_probability(&cfg, &target, n, trials).map_err(usage)?;
            println!(
                "monte carlo         {} +/- {}  ({} trials, seed {})",
                report.estimate, report.stderr, report.trials, report.seed
            );
            Some(report)
        }
        None => None,
    };
    let manifest = output::manifest(
        "prob",
        Some(&dist),
        vec![
            args.dist.source_param(),
            ("shape", json!(target.to_string())),
            ("n", json!(n)),
            ("a", json!(a)),
            ("trials", args.trials.map_or(Value::Null, |t| json!(t))),
            ("seed", args.trials.map_or(Value::Null, |_| json!(args.seed))),
        ],
    );
    if let Some(path) = &args.json {
        let value = json!({
            "manifest": manifest,
            "leaf_count_prob": output::exact_with_decimal(&result.leaf_count_prob),
            "unconditional": output::exact_with_decimal(&result.unconditional),
            "conditional": output::exact_with_decimal(&result.conditional),
            "mc": mc.as_ref().map_or(Value::Null, mc_json),
        });
        output::write_json(path, &value)?;
    }
    if let Some(path) = &args.csv {
        let mut rows = vec![CsvRow {
            n: Some(n),
            a: Some(a),
            value: output::exact(&result.conditional),
            stderr: None,
        }];
        if let Some(report) = &mc {
            rows.push(CsvRow {
                n: Some(n),
                a: Some(a),
                value: report.estimate.to_string(),
                stderr: Some(report.stderr),
            });
        }
        output::write_csv(path, &manifest, &rows)?;
    }
    Ok(())
}

fn print_rational(label: &str, r: &Rat) {
    println!("{label:<19} {}  ({})", r, ratio::decimal12(r));
}

fn mc_json(report: &sim::McReport) -> Value {
    json!({
        "estimate": report.estimate,
        "stderr": report.stderr,
        "trials": report.trials,
        "weight": report.weight,
        "seed": report.seed,
    })
}

// ----------------------------------------------------------------- expect

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum Model {
    /// Conditioned terminal trees of the branching process (ordered shapes)
    Gw,
    /// Uniform unrooted binary trees (unordered shapes)
    Unrooted,
}

#[derive(Args)]
struct ExpectArgs {
    #[command(flatten)]
    dist: DistArgs,
    /// Leaf count of both random trees
    #[arg(long)]
    n: usize,
    /// Single subset size (default: a table over every size up to 8)
    #[arg(long)]
    a: Option<usize>,
    /// Random model
    #[arg(long, value_enum, default_value_t = Model::Gw)]
    model: Model,
    /// Add seeded Monte Carlo estimates with this many trials per row
    /// (branching model only)
    #[arg(long)]
    trials: Option<u64>,
    /// Monte Carlo seed (the same trees are reused across the a-range)
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

fn run_expect(args: ExpectArgs) -> Result<(), CliError> {
    let dist = args.dist.resolve()?;
    let n = args.n;
    // A critical distribution supported on {0, 2} is the balanced one, so
    // the closed form applies and every subset size is tractable.
    let binary = dist.internal_degrees() == [2];
    let sizes: Vec<usize> = match (args.a, args.model) {
        (Some(a), _) => vec![a],
        (None, Model::Gw) => (1..=n.min(formulas::MAX_EXPECTATION_LEAVES)).collect(),
        (None, Model::Unrooted) => {
            if n < 3 {
                return Err(usage(format!("the unrooted table needs n >= 3, got {n}")));
            }
            (2..=(n - 1).min(formulas::MAX_EXPECTATION_LEAVES)).collect()
        }
    };
    if args.trials.is_some() && args.model == Model::Unrooted {
        return Err(usage("Monte Carlo estimates cover the branching model only"));
    }
    let cfg = args.trials.map(|_| SamplerConfig::new(dist.clone(), args.seed));

    let mut table: Vec<(usize, Rat, Option<sim::McReport>)> = Vec::new();
    for &a in &sizes {
        let exact = match args.model {
            Model::Unrooted => formulas::expected_common_unrooted(n, a).map_err(usage)?,
            Model::Gw if binary => formulas::expected_common_gw_binary(n, a).map_err(usage)?,
            Model::Gw => formulas::expected_common_gw(&dist, n, a).map_err(usage)?,
        };
        let mc = match (&cfg, args.trials) {
            (Some(cfg), Some(trials)) => Some(
                sim::mc_expected_common(cfg, n, a, trials, Comparison::Ordered).map_err(usage)?,
            ),
            _ => None,
        };
        table.push((a, exact, mc));
    }

    println!("n\ta\texpected\tdecimal{}", if cfg.is_some() { "\tmc\tstderr" } else { "" });
    for (a, exact, mc) in &table {
        let mut line = format!("{n}\t{a}\t{}\t{}", exact, ratio::decimal12(exact));
        if let Some(report) = mc {
            line.push_str(&format!("\t{}\t{}", report.estimate, report.stderr));
        }
        println!("{line}");
    }

    let manifest = output::manifest(
        "expect",
        Some(&dist),
        vec![
            args.dist.source_param(),
            ("model", json!(match args.model {
                Model::Gw => "gw",
                Model::Unrooted => "unrooted",
            })),
            ("n", json!(n)),
            ("a", args.a.map_or(Value::Null, |a| json!(a))),
            ("trials", args.trials.map_or(Value::Null, |t| json!(t))),
            ("seed", args.trials.map_or(Value::Null, |_| json!(args.seed))),
        ],
    );
    if let Some(path) = &args.json {
        let rows: Vec<Value> = table
            .iter()
            .map(|(a, exact, mc)| {
                json!({
                    "n": n,
                    "a": a,
                    "expected": output::exact_with_decimal(exact),
                    "mc": mc.as_ref().map_or(Value::Null, mc_json),
                })
            })
            .collect();
        output::write_json(path, &json!({ "manifest": manifest, "rows": rows }))?;
    }
    if let Some(path) = &args.csv {
        let mut rows = Vec::new();
        for (a, exact, mc) in &table {
            rows.push(CsvRow { n: Some(n), a: Some(*a), value: output::exact(exact), stderr: None });
            if let Some(report) = mc {
                rows.push(CsvRow {
                    n: Some(n),
                    a: Some(*a),
                    value: report.estimate.to_string(),
                    stderr: Some(report.stderr),
                });
            }
        }
        output::write_csv(path, &manifest, &rows)?;
    }
    Ok(())
}

// ----------------------------------------------------------------- sample

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    dist: DistArgs,
    /// Leaf count to condition on
    #[arg(long)]
    n: usize,
    /// Number of trees to draw
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Sampler seed; draw i is reproducible independently of the batch size
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Abort an attempt once the tree holds this many vertices
    #[arg(long)]
    size_cap: Option<usize>,
    /// Give up on a draw after this many rejected attempts
    #[arg(long)]
    max_attempts: Option<u64>,
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

fn run_sample(args: SampleArgs) -> Result<(), CliError> {
    let dist = args.dist.resolve()?;
    let mut cfg = SamplerConfig::new(dist.clone(), args.seed);
    if let Some(cap) = args.size_cap {
        cfg.size_cap = cap;
    }
    if let Some(max) = args.max_attempts {
        cfg.max_attempts = max;
    }
    let sampler = sim::ConditionedSampler::new(&cfg, args.n).map_err(usage)?;
    let mut trees = Vec::with_capacity(args.count);
    let mut attempts = Vec::with_capacity(args.count);
    for draw in 0..args.count {
        let mut rng = sim::trial_rng(args.seed, draw as u64);
        let sample = sampler.draw(&mut rng).map_err(usage)?;
        println!("{}", sample.tree);
        trees.push(sample.tree.to_string());
        attempts.push(sample.attempts);
    }
    if let Some(path) = &args.json {
        let manifest = output::manifest(
            "sample",
            Some(&dist),
            vec![
                args.dist.source_param(),
                ("n", json!(args.n)),
                ("count", json!(args.count)),
                ("seed", json!(args.seed)),
                ("size_cap", json!(cfg.size_cap)),
                ("max_attempts", json!(cfg.max_attempts)),
            ],
        );
        let value = json!({ "manifest": manifest, "trees": trees, "attempts": attempts });
        output::write_json(path, &value)?;
    }
    Ok(())
}

// ----------------------------------------------------------------- mast

#[derive(Args)]
struct MastArgs {
    /// First tree, e.g. "((1,2),(3,4))"
    tree1: String,
    /// Second tree over the same leaf labels
    tree2: String,
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

fn run_mast(args: MastArgs) -> Result<(), CliError> {
    let t1 = LabelledTree::from_str(&args.tree1).map_err(usage)?;
    let t2 = LabelledTree::from_str(&args.tree2).map_err(usage)?;
    let all_binary = [&t1, &t2].iter().all(|t| {
        let s = t.shape();
        s.vertices().all(|v| s.is_leaf(v) || s.out_degree(v) == 2)
    });
    let (size, method) = if all_binary {
        (agreement::mast_binary(&t1, &t2).map_err(usage)?, "dynamic program")
    } else {
        // General out-degrees: walk subset sizes downward until one agrees.
        let n = t1.label_set().len();
        let mut best = 0;
        for a in (1..=n).rev() {
            if agreement::common_count(&t1, &t2, a, Comparison::Unordered).map_err(usage)? > 0 {
                best = a;
                break;
            }
        }
        (best, "subset search")
    };
    println!("maximum agreement subtree size: {size}  ({method})");
    if let Some(path) = &args.json {
        let manifest = output::manifest(
            "mast",
            None,
            vec![
                ("tree1", json!(t1.to_string())),
                ("tree2", json!(t2.to_string())),
                ("n", json!(t1.label_set().len())),
            ],
        );
        let value = json!({ "manifest": manifest, "size": size, "method": method });
        output::write_json(path, &value)?;
    }
    Ok(())
}

// ----------------------------------------------------------------- bounds

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    dist: DistArgs,
    /// Also print the agreement-size tail threshold for this leaf count
    #[arg(long)]
    n: Option<usize>,
    /// Tail parameter in (0, 1/2]
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

fn run_bounds(args: BoundsArgs) -> Result<(), CliError> {
    let dist = args.dist.resolve()?;
    let b = formulas::bound_constants(&dist);
    let q_text = b
        .q
        .iter()
        .map(|(j, p)| format!("{j}: {p}"))
        .collect::<Vec<_>>()
        .join(", ");
    println!("sigma^2 = {}  ({})", b.sigma2, ratio::decimal12(&b.sigma2));
    println!("gamma   = {}", b.gamma);
    println!("chi     = {}", b.chi);
    println!("lambda  = {}", b.lambda);
    println!("q       = {{{q_text}}}");
    println!("rho     = {}", b.rho);
    println!("m       = {}", b.m);
    println!("c       = {}", b.c);
    let tail = match args.n {
        Some(n) => {
            let t = formulas::tail_threshold(&dist, n, args.eps).map_err(usage)?;
            println!(
                "tail at n={n}, eps={}: a* = {} (exponent {}), bound {}",
                args.eps, t.a_star, t.exponent, t.bound
            );
            Some(t)
        }
        None => None,
    };
    if let Some(path) = &args.json {
        let manifest = output::manifest(
            "bounds",
            Some(&dist),
            vec![
                args.dist.source_param(),
                ("n", args.n.map_or(Value::Null, |n| json!(n))),
                ("eps", args.n.map_or(Value::Null, |_| json!(args.eps))),
            ],
        );
        let q: serde_json::Map<String, Value> =
            b.q.iter().map(|(j, p)| (j.to_string(), json!(output::exact(p)))).collect();
        let value = json!({
            "manifest": manifest,
            "sigma2": output::exact_with_decimal(&b.sigma2),
            "gamma": b.gamma,
            "chi": b.chi,
            "lambda": b.lambda,
            "q": q,
            "rho": b.rho,
            "m": b.m,
            "c": b.c,
            "tail": tail.as_ref().map_or(Value::Null, |t| json!({
                "a_star": t.a_star,
                "exponent": t.exponent,
                "bound": t.bound,
            })),
        });
        output::write_json(path, &value)?;
    }
    Ok(())
}

// ----------------------------------------------------------------- verify

#[derive(Args)]
struct VerifyArgs {
    /// Suite to run (default: all): gf, hosts, forests, weights, induced,
    /// expect, mc, asymptotic, bounds, tail, or mast
    #[arg(long)]
    suite: Option<String>,
    /// Size cap for the scalable suites (series order for gf, leaf count
    /// for hosts and mast)
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

fn run_verify(args: VerifyArgs) -> Result<(), CliError> {
    let suites: Vec<&str> = match &args.suite {
        Some(name) => vec![name.as_str()],
        None => verify::SUITE_NAMES.to_vec(),
    };
    let mut checks = Vec::new();
    for name in suites {
        checks.extend(verify::run_suite_capped(name, args.n).map_err(usage)?);
    }
    let failed: Vec<&verify::Check> = checks.iter().filter(|c| !c.passed).collect();
    for check in &checks {
        let status = if check.passed { "ok" } else { "FAIL" };
        println!("[{}] {}: {status} ({})", check.suite, check.name, check.detail);
    }
    println!("{} checks, {} failed", checks.len(), failed.len());
    if let Some(path) = &args.json {
        let manifest = output::manifest(
            "verify",
            None,
            vec![
                ("suite", args.suite.as_ref().map_or(Value::Null, |s| json!(s))),
                ("n", args.n.map_or(Value::Null, |n| json!(n))),
            ],
        );
        let rows: Vec<Value> = checks
            .iter()
            .map(|c| {
                json!({
                    "suite": c.suite,
                    "name": c.name,
                    "passed": c.passed,
                    "detail": c.detail,
                })
            })
            .collect();
        output::write_json(path, &json!({ "manifest": manifest, "checks": rows }))?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!("{} verification check(s) failed", failed.len())))
    }
}
