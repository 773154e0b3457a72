//! Command-line front end. Every artifact embeds the configuration that
//! produced it.
//!
//! Exit codes: 0 success, 2 a `--check` (or `verify`) failure, 64 usage
//! error, 65 an input outside the guards of the library.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::exact::recurrence::MAX_TABLE_N;
use crate::exact::{
    exact_j_distribution, exp_expansion_check, exp_expansion_check_f64, lambda_consistency_check,
    product_partial, x_table, x_table_f64, y_tables, AltSumTable, LambdaRates, ValueSummary,
    DEFAULT_DIGITS,
};
use crate::stats::{
    absorption_experiment, block_of_one_experiment, cut_count_experiment,
    last_collision_experiment, marked_tree_experiment, reversed_chain_experiment, CutEngine,
    ExperimentReport,
};
use crate::verify::{run_suite, Scale};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_GUARD: i32 = 65;

/// Directory for output files when `--output` is not given.
pub const OUTPUT_DIR_ENV: &str = "BSCOAL_OUTPUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "bscoal", version, about = "Bolthausen-Sznitman coalescent toolkit")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Output format; tables default to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// File to write instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Exit with status 2 when an embedded test fails.
    #[arg(long, global = true)]
    check: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo experiments.
    Simulate {
        #[command(subcommand)]
        kind: Simulation,
    },
    /// Exact and high-precision tables.
    Exact {
        #[command(subcommand)]
        kind: ExactKind,
    },
    /// Partial exponent and product for `e^{1/r}`.
    Products {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        terms: usize,
        #[arg(long, default_value_t = DEFAULT_DIGITS)]
        precision: u32,
    },
    /// The acceptance suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Suite {
    All,
    Fast,
}

#[derive(Args, Debug, Clone)]
struct SimArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    samples: usize,
    #[arg(long)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Simulation {
    LastCollision(SimArgs),
    Absorption(SimArgs),
    ReversedChain {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long, default_value_t = 6)]
        m_max: usize,
    },
    CutCount {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, value_enum, default_value_t = EngineArg::Cutting)]
        engine: EngineArg,
    },
    BlockOfOne {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, default_value_t = std::f64::consts::LN_2)]
        t: f64,
    },
    MarkedTree {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum EngineArg {
    Cutting,
    Clocks,
    Chain,
    Records,
}

impl From<EngineArg> for CutEngine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Cutting => CutEngine::Cutting,
            EngineArg::Clocks => CutEngine::Clocks,
            EngineArg::Chain => CutEngine::Chain,
            EngineArg::Records => CutEngine::Records,
        }
    }
}

#[derive(Subcommand, Debug)]
enum ExactKind {
    /// `hat p_{l,m}` for `l < m <= m_max`.
    HatP {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        m_max: usize,
        #[arg(long, default_value_t = DEFAULT_DIGITS)]
        precision: u32,
    },
    /// `x_n^{(m)}`, or the `y` tables when `l >= 2`.
    XTable {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long, default_value_t = DEFAULT_DIGITS)]
        precision: u32,
    },
    /// Law of the number of collisions.
    JDist {
        #[arg(long)]
        n: usize,
    },
    /// The exponential expansion identity for `2 <= m <= m_max`.
    Identity {
        #[arg(long, default_value_t = 20)]
        m_max: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.5, 1.0, 2.0, 10.0])]
        r: Vec<f64>,
    },
    /// Consistency of merger rates.
    Consistency {
        #[arg(long, value_enum, default_value_t = RatesArg::Bs)]
        rates: RatesArg,
        #[arg(long, default_value_t = 100)]
        n_max: usize,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum RatesArg {
    Bs,
    Kingman,
}

/// Everything needed to reproduce an artifact.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub subcommand: Option<String>,
    pub parameters: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub precision: Option<u32>,
    pub format: String,
    pub version: String,
}

/// What a command produced before it is written out.
struct Output {
    config: ExperimentConfig,
    json: Value,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    pass: bool,
    /// Lines for standard error.
    log: Vec<String>,
}

impl Output {
    fn new(config: ExperimentConfig, json: Value) -> Self {
        Self {
            config,
            json,
            header: Vec::new(),
            rows: Vec::new(),
            pass: true,
            log: Vec::new(),
        }
    }

    fn table(mut self, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        self.header = header.iter().map(|s| s.to_string()).collect();
        self.rows = rows;
        self
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let doc = json!({"config": self.config, "result": self.json});
                let mut s = serde_json::to_string_pretty(&doc).expect("serialisable");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = format!(
                    "# config: {}\n",
                    serde_json::to_string(&self.config).expect("serialisable")
                );
                s.push_str(&csv_record(&self.header));
                s.push('\n');
                for r in &self.rows {
                    s.push_str(&csv_record(r));
                    s.push('\n');
                }
                s
            }
        }
    }
}

fn csv_record(fields: &[String]) -> String {
    let quoted: Vec<String> = fields
        .iter()
        .map(|f| {
            if f.contains([',', '"', '\n']) {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.clone()
            }
        })
        .collect();
    quoted.join(",")
}

fn config(command: &str, sub: Option<&str>, format: Format) -> ExperimentConfig {
    ExperimentConfig {
        command: command.into(),
        subcommand: sub.map(Into::into),
        parameters: BTreeMap::new(),
        seed: None,
        precision: None,
        format: match format {
            Format::Csv => "csv".into(),
            Format::Json => "json".into(),
        },
        version: env!("CARGO_PKG_VERSION").into(),
    }
}

fn param(c: &mut ExperimentConfig, k: &str, v: impl Into<Value>) {
    c.parameters.insert(k.into(), v.into());
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn report_output(mut cfg: ExperimentConfig, sim: &SimArgs, rep: ExperimentReport) -> Output {
    param(&mut cfg, "n", sim.n);
    param(&mut cfg, "samples", sim.samples);
    cfg.seed = Some(sim.seed);
    for (k, v) in &rep.parameters {
        param(&mut cfg, k, *v);
    }
    let rows = rep.raw.rows.iter().map(|r| r.iter().map(|&x| num(x)).collect()).collect();
    let header: Vec<&str> = rep.raw.header.iter().map(String::as_str).collect();
    let pass = rep.pass;
    let mut out = Output::new(cfg, serde_json::to_value(&rep).expect("serialisable")).table(&header, rows);
    out.pass = pass;
    out.log = rep
        .test_statistics
        .iter()
        .map(|(k, t)| format!("{} {k}: {} (threshold {})", if t.pass { "pass" } else { "FAIL" }, t.statistic, t.threshold))
        .collect();
    out
}

fn simulate(kind: &Simulation, format: Format) -> crate::error::Result<Output> {
    let c = |s: &str| config("simulate", Some(s), format);
    Ok(match kind {
        Simulation::LastCollision(a) => report_output(c("last-collision"), a, last_collision_experiment(a.n, a.samples, a.seed)?),
        Simulation::Absorption(a) => report_output(c("absorption"), a, absorption_experiment(a.n, a.samples, a.seed)?),
        Simulation::ReversedChain { sim, l, m_max } => report_output(
            c("reversed-chain"),
            sim,
            reversed_chain_experiment(sim.n, *l, *m_max, sim.samples, sim.seed)?,
        ),
        Simulation::CutCount { sim, engine } => {
            let mut cfg = c("cut-count");
            let e = CutEngine::from(*engine);
            param(&mut cfg, "engine", e.name());
            report_output(cfg, sim, cut_count_experiment(sim.n, sim.samples, sim.seed, e)?)
        }
        Simulation::BlockOfOne { sim, t } => report_output(
            c("block-of-one"),
            sim,
            block_of_one_experiment(sim.n, *t, sim.samples, sim.seed)?,
        ),
        Simulation::MarkedTree { sim, t } => report_output(
            c("marked-tree"),
            sim,
            marked_tree_experiment(sim.n, *t, sim.samples, sim.seed)?,
        ),
    })
}

fn exact(kind: &ExactKind, format: Format) -> crate::error::Result<Output> {
    let c = |s: &str| config("exact", Some(s), format);
    match kind {
        ExactKind::HatP { l, m_max, precision } => {
            let mut cfg = c("hat-p");
            param(&mut cfg, "l", *l);
            param(&mut cfg, "m_max", *m_max);
            cfg.precision = Some(*precision);
            if *l < 1 || m_max <= l {
                return Err(Error::Domain(format!("need m_max > l >= 1, got l = {l}, m_max = {m_max}")));
            }
            let table = AltSumTable::new(*m_max, *precision)?;
            let mut rows = Vec::new();
            let mut values = Vec::new();
            for m in l + 1..=*m_max {
                let v = table.hat_p(*l, m)?;
                let s = ValueSummary::from(&v);
                rows.push(vec![l.to_string(), m.to_string(), s.value.clone(), s.certified_digits.to_string()]);
                values.push(json!({"m": m, "value": s}));
            }
            Ok(Output::new(cfg, json!({"l": l, "rows": values}))
                .table(&["l", "m", "value", "certified_digits"], rows))
        }
        ExactKind::XTable { m, n_max, l, precision } => {
            let mut cfg = c("x-table");
            param(&mut cfg, "m", *m);
            param(&mut cfg, "n_max", *n_max);
            param(&mut cfg, "l", *l);
            if *l <= 1 {
                let values: Vec<(usize, String)> = if *n_max <= MAX_TABLE_N {
                    cfg.precision = Some(*precision);
                    let t = x_table(*m, *n_max, *precision)?;
                    t.rows().map(|(n, v)| (n, v.to_decimal(*precision as usize))).collect()
                } else {
                    param(&mut cfg, "arithmetic", "f64");
                    let t = x_table_f64(*m, *n_max)?;
                    t.rows().map(|(n, v)| (n, num(*v))).collect()
                };
                let rows = values.iter().map(|(n, v)| vec![n.to_string(), v.clone()]).collect();
                let js: Vec<Value> = values.iter().map(|(n, v)| json!({"n": n, "x": v})).collect();
                Ok(Output::new(cfg, json!({"rows": js})).table(&["n", "x"], rows))
            } else {
                cfg.precision = Some(*precision);
                let (enter, hit) = y_tables(*l, *m, *n_max, *precision)?;
                let d = *precision as usize;
                let mut rows = Vec::new();
                let mut js = Vec::new();
                for (n, e) in enter.rows() {
                    let h = hit.get(n).expect("hit table starts at l < m");
                    let ratio = e.div(h);
                    let r = vec![n.to_string(), e.to_decimal(d), h.to_decimal(d), ratio.to_decimal(d)];
                    js.push(json!({"n": n, "enter": r[1], "hit": r[2], "conditional": r[3]}));
                    rows.push(r);
                }
                Ok(Output::new(cfg, json!({"rows": js})).table(&["n", "enter", "hit", "conditional"], rows))
            }
        }
        ExactKind::JDist { n } => {
            let mut cfg = c("j-dist");
            param(&mut cfg, "n", *n);
            let d = exact_j_distribution(*n)?;
            let rows = d.probs.iter().enumerate().skip(1).map(|(j, p)| vec![j.to_string(), num(*p)]).collect();
            Ok(Output::new(
                cfg,
                json!({"n": n, "mean": d.mean(), "tail_mass": d.tail_mass, "probabilities": &d.probs[1..]}),
            )
            .table(&["j", "probability"], rows))
        }
        ExactKind::Identity { m_max, r } => {
            let mut cfg = c("identity");
            param(&mut cfg, "m_max", *m_max);
            param(&mut cfg, "r", r.clone());
            let mut rows = Vec::new();
            let mut worst: f64 = 0.0;
            for m in 2..=*m_max {
                for &x in r {
                    let e = exp_expansion_check(m, x)?;
                    let f = exp_expansion_check_f64(m, x)?;
                    worst = worst.max(e);
                    rows.push(vec![m.to_string(), num(x), num(e), num(f)]);
                }
            }
            let mut out = Output::new(cfg, json!({"max_error": worst, "tolerance": 1e-12, "checks": rows.len()}))
                .table(&["m", "r", "error", "error_f64"], rows);
            out.pass = worst < 1e-12;
            Ok(out)
        }
        ExactKind::Consistency { rates, n_max } => {
            let mut cfg = c("consistency");
            let (name, r) = match rates {
                RatesArg::Bs => ("bs", LambdaRates::bolthausen_sznitman()),
                RatesArg::Kingman => ("kingman", LambdaRates::kingman()),
            };
            param(&mut cfg, "rates", name);
            param(&mut cfg, "n_max", *n_max);
            let ok = lambda_consistency_check(&r, *n_max)?;
            let mut out = Output::new(cfg, json!({"rates": name, "n_max": n_max, "consistent": ok}))
                .table(&["rates", "n_max", "consistent"], vec![vec![name.into(), n_max.to_string(), ok.to_string()]]);
            out.pass = ok;
            out.log.push(format!("{} consistency of {name} up to n = {n_max}", if ok { "pass" } else { "FAIL" }));
            Ok(out)
        }
    }
}

fn products(r: usize, terms: usize, precision: u32, format: Format) -> crate::error::Result<Output> {
    let mut cfg = config("products", None, format);
    param(&mut cfg, "r", r);
    param(&mut cfg, "terms", terms);
    cfg.precision = Some(precision);
    let p = product_partial(r, terms, precision)?;
    let gap = (p.exponent.to_f64() - 1.0 / r as f64).abs();
    let (e, q) = (ValueSummary::from(&p.exponent), ValueSummary::from(&p.product));
    let row = vec![r.to_string(), terms.to_string(), e.value.clone(), q.value.clone(), num(gap)];
    let mut out = Output::new(cfg, json!({"r": r, "terms": terms, "exponent": e, "product": q, "gap": gap}))
        .table(&["r", "terms", "exponent", "product", "gap"], vec![row]);
    out.log.push(format!("exponent {}  product {}  |exponent - 1/r| = {gap:e}", e.value, q.value));
    Ok(out)
}

fn verify(suite: Suite, seed: u64, format: Format) -> crate::error::Result<Output> {
    let scale = match suite {
        Suite::All => Scale::Full,
        Suite::Fast => Scale::Fast,
    };
    let mut cfg = config("verify", Some(if scale == Scale::Full { "all" } else { "fast" }), format);
    cfg.seed = Some(seed);
    let rep = run_suite(scale, seed)?;
    let rows = rep
        .criteria
        .iter()
        .map(|c| vec![c.id.clone(), c.pass.to_string(), c.title.clone()])
        .collect();
    let mut out = Output::new(cfg, serde_json::to_value(&rep).expect("serialisable")).table(&["criterion", "pass", "title"], rows);
    out.pass = rep.pass;
    out.log = rep.criteria.iter().map(|c| c.line()).collect();
    Ok(out)
}

fn file_name(cfg: &ExperimentConfig, format: Format) -> String {
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    match &cfg.subcommand {
        Some(s) => format!("{}-{s}.{ext}", cfg.command),
        None => format!("{}.{ext}", cfg.command),
    }
}

/// Parses `args` (program name first) and runs the command, writing the
/// artifact to `out` unless it goes to a file.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    if let Some(t) = cli.common.threads {
        if t == 0 {
            let _ = writeln!(err, "error: --threads must be positive");
            return EXIT_USAGE;
        }
        // a pool that is already set up (for instance in tests) is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let default_format = match cli.command {
        Command::Exact { .. } => Format::Csv,
        _ => Format::Json,
    };
    let format = cli.common.format.unwrap_or(default_format);
    let result = match &cli.command {
        Command::Simulate { kind } => simulate(kind, format),
        Command::Exact { kind } => exact(kind, format),
        Command::Products { r, terms, precision } => products(*r, *terms, *precision, format),
        Command::Verify { suite, seed } => verify(*suite, *seed, format),
    };
    let output = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_GUARD;
        }
    };
    let text = output.render(format);
    let target = cli.common.output.clone().or_else(|| {
        std::env::var_os(OUTPUT_DIR_ENV).map(|d| PathBuf::from(d).join(file_name(&output.config, format)))
    });
    match target {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
            let _ = writeln!(err, "wrote {}", path.display());
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    for line in &output.log {
        let _ = writeln!(err, "{line}");
    }
    let gated = cli.common.check || matches!(cli.command, Command::Verify { .. });
    if gated && !output.pass {
        EXIT_CHECK
    } else {
        EXIT_OK
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
