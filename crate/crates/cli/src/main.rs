//! `recolor`: generate instances, run algorithms, sweep grids, audit traces,
//! query oracles and reshape sweep output for plotting.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use recolor_core::audit::audit_costs;
use recolor_core::fraction::Fraction;
use recolor_core::harness::plotdata::{choose_axis, plot_points, write_points, XAxis};
use recolor_core::harness::run::{replay, run, Algo, RunOptions, RunParams};
use recolor_core::harness::sweep::{make_source, read_csv, sweep, write_csv, Grid, Suite};
use recolor_core::harness::trace::Trace;
use recolor_core::instance::{instance_to_string, read_instance, write_instance, InstanceSource};
use recolor_core::oracles::{largest_bond_bruteforce, opt2_exact, BOND_CAP};
use recolor_core::sim::FlipPolicy;

#[derive(Parser)]
#[command(name = "recolor", version, about = "Online bipartite recoloring experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an instance file for one of the generator families.
    Gen(GenArgs),
    /// Run one algorithm on one instance and print the result as JSON.
    Run(RunArgs),
    /// Run a grid of cells and write a CSV with per-cell aggregates.
    Sweep(SweepArgs),
    /// Check a run trace and print a JSON report.
    Audit(AuditArgs),
    /// Print the exact two-color optimum and the largest bond of an instance.
    Oracle(OracleArgs),
    /// Reshape sweep aggregates into (series, x, y) points.
    Plotdata(PlotArgs),
}

#[derive(Args)]
struct AlgoParams {
    /// Lightness threshold alpha, as `p/q` or a decimal.
    #[arg(long, default_value = "1/2")]
    alpha: Fraction,
    /// Accuracy parameter of the hierarchical algorithm.
    #[arg(long, default_value = "1/4")]
    epsilon: Fraction,
    /// Largest bond to assume instead of computing or reading one.
    #[arg(long)]
    beta: Option<u64>,
    #[arg(long, default_value = "smaller-size")]
    flip_policy: FlipPolicy,
}

#[derive(Args)]
struct GenArgs {
    /// path_doubling, dominating, forest, cycles or ladders.
    #[arg(long)]
    family: Suite,
    /// Number of vertices.
    #[arg(long)]
    n: usize,
    /// Largest special-color cost.
    #[arg(long = "D")]
    d: u64,
    #[arg(long, env = "RECOLOR_SEED", default_value_t = 0)]
    seed: u64,
    /// Number of doubling phases (path_doubling only).
    #[arg(long)]
    phases: Option<u32>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    instance: PathBuf,
    /// A, B, Bhat, C or greedy.
    #[arg(long)]
    algo: Algo,
    #[command(flatten)]
    params: AlgoParams,
    /// Seed recorded in the result row.
    #[arg(long, env = "RECOLOR_SEED")]
    seed: Option<u64>,
    #[arg(long, default_value = "run")]
    run_id: String,
    /// Write a JSONL trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the moderation split and witness sets here as JSON.
    #[arg(long)]
    dump_moderation: Option<PathBuf>,
    /// Run the charging, witness and bond audits and count their failures.
    #[arg(long)]
    audit: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// path_doubling, dominating, forest, cycles or ladders.
    #[arg(long)]
    family: Suite,
    /// Comma-separated algorithms (A, B, Bhat, C, greedy).
    #[arg(long, value_delimiter = ',', default_value = "B")]
    algos: Vec<Algo>,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long = "D", value_delimiter = ',', default_value = "16")]
    d: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "1/4")]
    epsilon: Vec<Fraction>,
    /// Number of seeds per cell.
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    /// First seed.
    #[arg(long, env = "RECOLOR_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "1/2")]
    alpha: Fraction,
    #[arg(long)]
    beta: Option<u64>,
    #[arg(long, default_value = "smaller-size")]
    flip_policy: FlipPolicy,
    #[arg(long)]
    phases: Option<u32>,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    Charging,
    Bond,
    Witness,
    Costs,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    trace: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "charging,bond,witness,costs")]
    checks: Vec<Check>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Evaluate the optimum on this many leading edges.
    #[arg(long)]
    prefix: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Axis {
    Auto,
    Log2d,
    Epsilon,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long, value_enum, default_value_t = Axis::Auto)]
    x: Axis,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn gen(args: GenArgs) -> Result<ExitCode> {
    let source = make_source(args.family, args.n, args.d, args.seed, args.phases)
        .with_context(|| format!("generating {} instance", args.family))?;
    match &args.out {
        Some(p) => write_instance(p, &source).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{}", instance_to_string(&source)?),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_cmd(args: RunArgs) -> Result<ExitCode> {
    let source = read_instance(&args.instance).with_context(|| format!("reading {}", args.instance.display()))?;
    let params = RunParams {
        alpha: args.params.alpha,
        epsilon: args.params.epsilon,
        policy: args.params.flip_policy,
        beta: args.params.beta,
        seed: args.seed.or(match &source {
            InstanceSource::Adaptive(spec) => Some(spec.seed),
            InstanceSource::Static(_) => None,
        }),
    };
    let opts = RunOptions { trace: args.trace.is_some(), audit: args.audit, dump_moderation: args.dump_moderation.is_some() };
    let outcome = run(&source, args.algo, &params, &args.run_id, opts).with_context(|| format!("running {}", args.algo))?;
    if let (Some(path), Some(trace)) = (&args.trace, &outcome.trace) {
        let w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
        trace.write_jsonl(w)?;
    }
    if let Some(path) = &args.dump_moderation {
        write_json(path, &serde_json::to_value(&outcome.moderation_dumps)?)?;
    }
    let mut value = json!({
        "result": outcome.result,
        "beta_source": outcome.beta_source,
        "buckets": outcome.buckets,
        "violation_messages": outcome.violation_messages,
    });
    if !outcome.levels.is_empty() {
        value["levels"] = serde_json::to_value(&outcome.levels)?;
    }
    if args.audit {
        value["audits"] = serde_json::to_value(&outcome.audits)?;
    }
    print_json(&value)?;
    Ok(if outcome.result.violations == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn sweep_cmd(args: SweepArgs) -> Result<ExitCode> {
    let grid = Grid {
        suite: args.family,
        algos: args.algos,
        ns: args.n,
        ds: args.d,
        epsilons: args.epsilon,
        seeds: (args.seed..args.seed + args.seeds).collect(),
        alpha: args.alpha,
        policy: args.flip_policy,
        phases: args.phases,
        beta: args.beta,
    };
    let out = sweep(&grid);
    for (id, msg) in &out.errors {
        eprintln!("{id}: {msg}");
    }
    write_csv(&out.rows, output(args.out.as_deref())?)?;
    Ok(if out.total_violations() == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn audit_cmd(args: AuditArgs) -> Result<ExitCode> {
    let file = File::open(&args.trace).with_context(|| format!("opening {}", args.trace.display()))?;
    let trace = Trace::read_jsonl(BufReader::new(file)).context("parsing trace")?;
    let mut report = json!({ "run_id": trace.header.run_id, "algorithm": trace.header.algorithm });
    let mut passed = true;
    if args.checks.contains(&Check::Costs) {
        match audit_costs(&trace) {
            Ok(c) => report["costs"] = json!({ "passed": true, "audit": c }),
            Err(e) => {
                passed = false;
                report["costs"] = json!({ "passed": false, "error": e.to_string() });
            }
        }
    }
    let needs_replay = args.checks.iter().any(|c| *c != Check::Costs);
    if needs_replay {
        let outcome = replay(&trace, RunOptions { audit: true, ..Default::default() }).context("replaying trace")?;
        if outcome.result.cost_total != trace.summary.result.cost_total {
            bail!(
                "replay cost {} differs from traced cost {}",
                outcome.result.cost_total,
                trace.summary.result.cost_total
            );
        }
        if args.checks.contains(&Check::Charging) {
            let list: Vec<_> = outcome
                .audits
                .iter()
                .map(|a| {
                    let violations = a.charging.as_ref().map(|c| c.violations()).unwrap_or_default();
                    let ok = a.charging_error.is_none() && violations.is_empty();
                    passed &= ok;
                    json!({
                        "level": a.level,
                        "passed": ok,
                        "report": a.charging,
                        "error": a.charging_error,
                        "moderate_cost_ok": a.moderate_cost_ok,
                    })
                })
                .collect();
            report["charging"] = json!(list);
        }
        if args.checks.contains(&Check::Witness) {
            let list: Vec<_> = outcome
                .audits
                .iter()
                .map(|a| {
                    let ok = a.witness.as_ref().is_none_or(|w| w.excess_ok && w.count_ok);
                    passed &= ok;
                    json!({ "level": a.level, "passed": ok, "report": a.witness })
                })
                .collect();
            report["witness"] = json!(list);
        }
        if args.checks.contains(&Check::Bond) {
            let list: Vec<_> = outcome
                .audits
                .iter()
                .map(|a| {
                    let ok = a.bond.as_ref().is_none_or(|b| b.passed);
                    passed &= ok;
                    json!({ "level": a.level, "passed": ok, "report": a.bond })
                })
                .collect();
            report["bond"] = json!({ "beta": outcome.result.beta, "beta_source": outcome.beta_source, "levels": list });
        }
    }
    report["passed"] = json!(passed);
    print_json(&report)?;
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn oracle_cmd(args: OracleArgs) -> Result<ExitCode> {
    let source = read_instance(&args.instance).with_context(|| format!("reading {}", args.instance.display()))?;
    let InstanceSource::Static(inst) = source else {
        bail!("oracles need a static instance; run the adaptive one with --trace and audit the trace");
    };
    let prefix = args.prefix.unwrap_or(inst.edges.len()).min(inst.edges.len());
    let opt2 = opt2_exact(&inst.initial_colors, &inst.edges, prefix)?;
    let bond = match largest_bond_bruteforce(inst.n, inst.prefix(prefix), BOND_CAP) {
        Ok(b) => json!({ "beta": b.beta, "witness": b.witness }),
        Err(e) => json!({ "error": e.to_string(), "beta_hint": inst.beta_hint }),
    };
    print_json(&json!({ "prefix_len": opt2.prefix_len, "opt2": opt2.value, "bond": bond }))?;
    Ok(ExitCode::SUCCESS)
}

fn plot_cmd(args: PlotArgs) -> Result<ExitCode> {
    let file = File::open(&args.csv).with_context(|| format!("opening {}", args.csv.display()))?;
    let rows = read_csv(BufReader::new(file)).context("parsing sweep CSV")?;
    let axis = match args.x {
        Axis::Auto => choose_axis(&rows),
        Axis::Log2d => XAxis::Log2D,
        Axis::Epsilon => XAxis::Epsilon,
    };
    write_points(&plot_points(&rows, axis), output(args.out.as_deref())?)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Run(a) => run_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Audit(a) => audit_cmd(a),
        Command::Oracle(a) => oracle_cmd(a),
        Command::Plotdata(a) => plot_cmd(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
