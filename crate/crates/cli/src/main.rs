mod instance;

/// `println!` that ignores a closed stdout.
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use aop_synth::adders::{build_adder, depth_table, verify_adder, REFERENCE_ADDER_DEPTHS};
use aop_synth::circuit::{equivalent, find_counterexample, standard_circuit};
use aop_synth::fractional::{format_decimal, solve_fractional_binary, solve_fractional_linear};
use aop_synth::normalization::{count_q, count_r, count_representatives, fib};
use aop_synth::{solve, AopSpec, Circuit, Error, SolveOptions, SolveStats};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use instance::{Instance, InstanceArgs};

#[derive(Parser)]
#[command(name = "aopsynth", version, about = "Delay-optimum AND2/OR2 circuits for And-Or paths")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one instance and print the optimum as JSON.
    Solve(SolveArgs),
    /// Check a circuit against an instance.
    Verify(VerifyArgs),
    /// Build and check the carry network of an n-bit adder.
    Adder(AdderArgs),
    /// Optimum depth ranges by input count.
    Table(TableArgs),
    /// Search effort per input count and scenario.
    Bench(BenchArgs),
    /// Counting diagnostics for the normalized search.
    Count(CountArgs),
}

#[derive(Args)]
struct InstanceOpts {
    /// Alternating instance with m inputs, AND first, all arrival times 0.
    #[arg(long, value_name = "M", conflicts_with_all = ["gates", "instance"])]
    depth: Option<usize>,
    /// Exchange AND and OR throughout.
    #[arg(long)]
    dual: bool,
    /// Gate types as a string over {A, O}, one letter per gate.
    #[arg(long, conflicts_with = "instance")]
    gates: Option<String>,
    /// Comma-separated arrival times; decimals are allowed.
    #[arg(long, allow_hyphen_values = true)]
    arrival: Option<String>,
    /// JSON file {"gates": "AO", "arrival": [0, 1, 0.5]}.
    #[arg(long, value_name = "FILE")]
    instance: Option<PathBuf>,
}

impl InstanceOpts {
    fn load(&self) -> aop_synth::Result<Instance> {
        instance::load(&InstanceArgs {
            depth: self.depth,
            dual: self.dual,
            gates: self.gates.as_deref(),
            arrival: self.arrival.as_deref(),
            file: self.instance.as_deref(),
        })
    }
}

#[derive(Args, Clone)]
struct EngineOpts {
    /// Cumulative speed-up preset, 1 (none) to 5 (all).
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u8).range(1..=5))]
    scenario: u8,
    /// Minimize formula size among strongly delay-optimum circuits.
    #[arg(long)]
    size_opt: bool,
    /// Report no solution above this delay.
    #[arg(long)]
    cap: Option<u32>,
    /// Largest input count checked by full truth tables.
    #[arg(long, default_value_t = 20)]
    verify_limit: usize,
    /// Time budget per solve in seconds (overrides AOP_TIME_BUDGET_SECS).
    #[arg(long)]
    budget_secs: Option<f64>,
}

impl EngineOpts {
    fn options(&self) -> Result<SolveOptions, Error> {
        let mut o = SolveOptions::scenario(self.scenario)?
            .with_size_opt(self.size_opt)
            .with_cap(self.cap)
            .with_budget(budget(self.budget_secs)?);
        o.exhaustive_verify_limit = self.verify_limit;
        Ok(o)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FractionalMode {
    Binary,
    Linear,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceOpts,
    #[command(flatten)]
    engine: EngineOpts,
    /// Search used for decimal arrival times.
    #[arg(long, value_enum, default_value = "binary")]
    fractional: FractionalMode,
    /// Write the circuit as JSON.
    #[arg(long, value_name = "FILE")]
    circuit: Option<PathBuf>,
    /// Write the circuit as Graphviz DOT.
    #[arg(long, value_name = "FILE")]
    dot: Option<PathBuf>,
    /// Include the circuit formula in the output.
    #[arg(long)]
    formula: bool,
    /// Report zero elapsed time so output is reproducible.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Circuit JSON file.
    #[arg(long, value_name = "FILE")]
    circuit: PathBuf,
    #[command(flatten)]
    instance: InstanceOpts,
    /// Expected delay; checked against the recomputed delay.
    #[arg(long)]
    delay: Option<u32>,
    /// Random trials for instances beyond the truth-table limit.
    #[arg(long, default_value_t = 1 << 16)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct AdderArgs {
    /// Bit width.
    #[arg(long, short)]
    bits: usize,
    #[command(flatten)]
    engine: EngineOpts,
    /// Directory receiving one DOT file per carry.
    #[arg(long, value_name = "DIR")]
    dot_dir: Option<PathBuf>,
    /// Random operand pairs when the width is too large for enumeration.
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print only depths, not circuits.
    #[arg(long)]
    summary: bool,
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct TableArgs {
    /// Largest input count solved exactly.
    #[arg(long, default_value_t = 33)]
    max_m: usize,
    #[arg(long, default_value_t = 17)]
    max_depth: u32,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    budget_secs: Option<f64>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 2)]
    from: usize,
    #[arg(long, default_value_t = 20)]
    to: usize,
    /// Comma-separated scenario numbers.
    #[arg(long, default_value = "1,2,3,4,5", value_delimiter = ',')]
    scenarios: Vec<u8>,
    /// Instances solved in parallel.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    size_opt: bool,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    budget_secs: Option<f64>,
    /// Accepted for uniformity; the benchmark has no random component.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct CountArgs {
    /// Distinct representatives over all sub-paths of the m-input instance.
    #[arg(long, value_name = "M")]
    representatives: Option<usize>,
    /// |Q_n| and |R_n|.
    #[arg(long, value_name = "N")]
    q: Option<u32>,
}

/// Failure carrying its exit status.
struct Fail {
    code: u8,
    msg: String,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::VerificationFailure(_) => 1,
            Error::Parse(_) | Error::InvalidArgument(_) => 2,
            Error::UnsupportedSize { .. } => 3,
            Error::BudgetExceeded => 4,
            Error::InvalidState(_) | Error::NoSolution { .. } => 1,
        };
        Fail { code, msg: e.to_string() }
    }
}

fn io_fail(path: &Path, e: std::io::Error) -> Fail {
    Fail { code: 2, msg: format!("{}: {e}", path.display()) }
}

fn budget(flag: Option<f64>) -> Result<Option<Duration>, Error> {
    let secs = match flag {
        Some(s) => Some(s),
        None => match std::env::var("AOP_TIME_BUDGET_SECS") {
            Ok(v) => Some(v.trim().parse::<f64>().map_err(|_| {
                Error::Parse(format!("AOP_TIME_BUDGET_SECS={v} is not a number"))
            })?),
            Err(_) => None,
        },
    };
    match secs {
        Some(s) if !(s.is_finite() && s > 0.0) => {
            Err(Error::Parse(format!("time budget {s} must be positive")))
        }
        Some(s) => Ok(Some(Duration::from_secs_f64(s))),
        None => Ok(None),
    }
}

fn stats_json(stats: SolveStats, no_timing: bool) -> Value {
    let mut s = stats;
    if no_timing {
        s.elapsed = Duration::ZERO;
    }
    serde_json::to_value(s).unwrap()
}

fn write_file(path: &Path, text: &str) -> Result<(), Fail> {
    std::fs::write(path, text).map_err(|e| io_fail(path, e))
}

fn emit_circuit(args: &SolveArgs, c: &Circuit) -> Result<(), Fail> {
    if let Some(p) = &args.circuit {
        write_file(p, &c.to_json())?;
    }
    if let Some(p) = &args.dot {
        write_file(p, &c.to_dot("aop"))?;
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<Value, Fail> {
    let inst = args.instance.load()?;
    let mut opts = args.engine.options()?;
    opts.build_circuit = true;
    match inst {
        Instance::Fractional(spec) => {
            let r = match args.fractional {
                FractionalMode::Binary => solve_fractional_binary(&spec, &opts)?,
                FractionalMode::Linear => solve_fractional_linear(&spec, &opts)?,
            };
            emit_circuit(&args, &r.circuit)?;
            let mut out = json!({
                "delay": format_decimal(&r.delay),
                "size": r.circuit.formula_size(),
                "alpha": format_decimal(&r.alpha),
                "inner_solves": r.inner_solves,
                "stats": stats_json(r.stats, args.no_timing),
            });
            if args.formula {
                out["formula"] = json!(r.circuit.to_formula_string());
            }
            Ok(out)
        }
        Instance::Integral(spec) => {
            let m = spec.m();
            match solve(&spec, &opts) {
                Err(Error::NoSolution { cap }) => Ok(json!({
                    "delay": null,
                    "lower_bound": cap + 1,
                    "m": m,
                })),
                Err(e) => Err(e.into()),
                Ok(r) => {
                    let c = r.circuit.expect("circuit requested");
                    emit_circuit(&args, &c)?;
                    let mut out = json!({
                        "delay": r.delay,
                        "size": r.size,
                        "stats": stats_json(r.stats, args.no_timing),
                    });
                    if args.formula {
                        out["formula"] = json!(c.to_formula_string());
                    }
                    Ok(out)
                }
            }
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<Value, Fail> {
    let text = std::fs::read_to_string(&args.circuit).map_err(|e| io_fail(&args.circuit, e))?;
    let c = Circuit::from_json(&text)?;
    let inst = args.instance.load()?;
    if c.num_inputs() != inst.m() {
        return Err(Error::VerificationFailure(format!(
            "circuit has {} inputs, instance has {}",
            c.num_inputs(),
            inst.m()
        ))
        .into());
    }
    let arrival = inst.rational_arrival();
    let spec = match inst {
        Instance::Integral(s) => s,
        Instance::Fractional(f) => AopSpec::new(f.gates.clone(), vec![0; f.arrival.len()])?,
    };
    let delay = c.metrics(&arrival)?.delay;
    if let Some(x) = find_counterexample(&c, &spec)? {
        let bits: String = x.iter().map(|&b| if b { '1' } else { '0' }).collect();
        return Err(Error::VerificationFailure(format!("circuit differs at t = {bits}")).into());
    }
    if !equivalent(&c, &standard_circuit(&spec), args.trials, args.seed)? {
        return Err(Error::VerificationFailure("random simulation found a difference".into()).into());
    }
    if let Some(want) = args.delay {
        if delay != aop_synth::Rational::from_integer(i64::from(want)) {
            return Err(Error::VerificationFailure(format!(
                "circuit delay is {}, expected {want}",
                format_decimal(&delay)
            ))
            .into());
        }
    }
    Ok(json!({ "equivalent": true, "delay": format_decimal(&delay), "size": c.formula_size() }))
}

fn cmd_adder(args: AdderArgs) -> Result<Value, Fail> {
    let opts = args.engine.options()?;
    let plan = build_adder(args.bits, &opts)?;
    verify_adder(&plan, args.trials, args.seed)?;
    if let Some(dir) = &args.dot_dir {
        std::fs::create_dir_all(dir).map_err(|e| io_fail(dir, e))?;
        for (i, c) in plan.carries.iter().enumerate() {
            let name = format!("carry_{}", i + 1);
            write_file(&dir.join(format!("{name}.dot")), &c.to_dot(&name))?;
        }
    }
    let reference = REFERENCE_ADDER_DEPTHS.iter().find(|(n, _)| *n == plan.n).map(|(_, d)| *d);
    let mut out = json!({
        "n": plan.n,
        "depth": plan.depth(),
        "carry_depths": plan.depths,
        "reference_depth": reference,
        "verified": true,
        "stats": stats_json(plan.stats, args.no_timing),
    });
    if !args.summary {
        let carries: Vec<Value> =
            plan.carries.iter().map(|c| serde_json::from_str(&c.to_json()).unwrap()).collect();
        out["carries"] = Value::Array(carries);
    }
    Ok(out)
}

fn cmd_table(args: TableArgs) -> Result<Option<Value>, Fail> {
    if args.max_m > aop_synth::subset::MAX_INPUTS {
        return Err(Error::UnsupportedSize { m: args.max_m, max: aop_synth::subset::MAX_INPUTS }.into());
    }
    let opts = SolveOptions { build_circuit: false, verify: false, ..SolveOptions::default() }
        .with_budget(budget(args.budget_secs)?);
    let t = depth_table(args.max_m, args.max_depth, &opts)?;
    if args.json {
        return Ok(Some(serde_json::to_value(&t).unwrap()));
    }
    let _ = write!(std::io::stdout(), "{}", t.to_text());
    Ok(None)
}

fn log2_rounded(x: u64) -> i64 {
    if x == 0 {
        0
    } else {
        (x as f64).log2().round() as i64
    }
}

fn cmd_bench(args: BenchArgs) -> Result<Option<Value>, Fail> {
    if args.to > aop_synth::subset::MAX_INPUTS {
        return Err(Error::UnsupportedSize { m: args.to, max: aop_synth::subset::MAX_INPUTS }.into());
    }
    let mut jobs = Vec::new();
    for m in args.from.max(1)..=args.to {
        for &s in &args.scenarios {
            let o = SolveOptions { build_circuit: false, verify: false, ..SolveOptions::scenario(s)? }
                .with_size_opt(args.size_opt)
                .with_budget(budget(args.budget_secs)?);
            jobs.push((m, s, o));
        }
    }
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..args.jobs.max(1) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((m, s, o)) = jobs.get(i) else { break };
                let r = AopSpec::depth_instance(*m).and_then(|spec| solve(&spec, o));
                results.lock().unwrap().push((i, *m, *s, r));
            });
        }
    });
    let mut results = results.into_inner().unwrap();
    results.sort_by_key(|r| r.0);
    let mut rows = Vec::new();
    if !args.json {
        out!("{:>3} {:>2} {:>5} {:>6} {:>6} {:>12}", "m", "sc", "delay", "log2E", "log2P", "ms");
    }
    for (_, m, s, r) in results {
        let r = r?;
        let ms = if args.no_timing { 0.0 } else { r.stats.elapsed.as_secs_f64() * 1e3 };
        if args.json {
            rows.push(json!({
                "m": m,
                "scenario": s,
                "delay": r.delay,
                "size": r.size,
                "E": r.stats.entries,
                "P": r.stats.partitions,
                "memo": r.stats.memo_entries,
                "log2_E": log2_rounded(r.stats.entries),
                "log2_P": log2_rounded(r.stats.partitions),
                "ms": ms,
            }));
        } else {
            out!(
                "{m:>3} {s:>2} {:>5} {:>6} {:>6} {ms:>12.3}",
                r.delay,
                log2_rounded(r.stats.entries),
                log2_rounded(r.stats.partitions)
            );
        }
    }
    Ok(args.json.then_some(Value::Array(rows)))
}

fn cmd_count(args: CountArgs) -> Result<Value, Fail> {
    let mut out = json!({});
    if let Some(m) = args.representatives {
        let n = count_representatives(m)?;
        out["representatives"] = json!({ "m": m, "count": n, "fibonacci": fib(m as u32 + 1) as u64 });
    }
    if let Some(n) = args.q {
        if n == 0 || n > 20 {
            return Err(Error::UnsupportedSize { m: n as usize, max: 20 }.into());
        }
        out["q"] = json!({ "n": n, "Q": count_q(n), "R": count_r(n) });
    }
    if args.representatives.is_none() && args.q.is_none() {
        return Err(Error::Parse("give --representatives or --q".into()).into());
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<Option<Value>, Fail> {
    match cli.cmd {
        Cmd::Solve(a) => cmd_solve(a).map(Some),
        Cmd::Verify(a) => cmd_verify(a).map(Some),
        Cmd::Adder(a) => cmd_adder(a).map(Some),
        Cmd::Table(a) => cmd_table(a),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::Count(a) => cmd_count(a).map(Some),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Some(v)) => {
            out!("{}", serde_json::to_string(&v).unwrap());
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("aopsynth: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
