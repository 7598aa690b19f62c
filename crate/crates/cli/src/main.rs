use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use frcode::bounds::{full_report, greedy_distance_bound};
use frcode::constructions::{structural_params, CodeSpec};
use frcode::export::{incidence_csv, incidence_dot};
use frcode::metrics::{code_rate, coverage_profile, min_coverage, min_distance};
use frcode::recovery::{failure_resilience, local_failure_resilience};
use frcode::sim::{run_scenario, ScenarioConfig};
use frcode::subsets::DEFAULT_BUDGET;
use frcode::{Budget, Error, FrCode, Result};

#[derive(Parser)]
#[command(name = "frcode", version, about = "Fractional repetition codes: construct, analyze, bound, simulate, export")]
struct Cli {
    /// Largest subset enumeration allowed for exact metrics.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code and print its JSON descriptor.
    Construct(ConstructArgs),
    /// Coverage profile, resilience, minimum distance and rate.
    Analyze(AnalyzeArgs),
    /// Evaluate every applicable distance bound.
    Bound(BoundArgs),
    /// Run a scenario file (JSON or TOML).
    Simulate(SimulateArgs),
    /// Incidence structure as DOT or CSV.
    Export(ExportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Graph,
    ProjectivePlane,
    Affine,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Field order for designs.
    #[arg(long)]
    q: Option<usize>,
    /// Affine dimension.
    #[arg(long)]
    m: Option<usize>,
    /// Parallel classes of an affine design (default q^(m-1)).
    #[arg(long)]
    classes: Option<usize>,
    /// Catalog graph name, or `edge-list` with --edge-list.
    #[arg(long)]
    graph: Option<String>,
    /// Catalog graph parameters, comma separated.
    #[arg(long, value_delimiter = ',')]
    params: Vec<usize>,
    #[arg(long)]
    edge_list: Option<PathBuf>,
    /// Number of disjoint copies.
    #[arg(long)]
    union: Option<usize>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    code: PathBuf,
    /// Nodes contacted by a data collector; also sets M = a(k) unless --M is given.
    #[arg(long)]
    k: Option<usize>,
    /// File size in symbols.
    #[arg(long = "M", alias = "file-size")]
    file_size: Option<usize>,
    /// Global repair degree (default alpha).
    #[arg(long)]
    d: Option<usize>,
    /// Local repair degree (default d).
    #[arg(long)]
    r: Option<usize>,
    /// Random samples for bracketing a(delta) when over budget.
    #[arg(long, default_value_t = 0)]
    approx_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long = "M", alias = "file-size")]
    file_size: usize,
    #[arg(long)]
    r: usize,
    /// JSON list of node groups to use as local codes.
    #[arg(long)]
    locals: Option<PathBuf>,
    /// Write the greedy algorithm's step trace as JSON here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Write the event log as line-delimited JSON here.
    #[arg(long)]
    events: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    code: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => match emit(cli.output.as_deref(), &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(&e),
        },
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    let mut body = json!({ "error": e.kind(), "message": e.to_string() });
    if let Some(v) = e.violations() {
        body["violations"] = serde_json::to_value(v).unwrap_or_default();
    }
    eprintln!("{body}");
    ExitCode::FAILURE
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn pretty<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn unsupported(cmd: &str, f: Format) -> Error {
    let name = match f {
        Format::Json => "json",
        Format::Csv => "csv",
        Format::Table => "table",
        Format::Dot => "dot",
    };
    Error::InvalidParameter(format!("{cmd} does not support --format {name}"))
}

fn run(cli: &Cli) -> Result<String> {
    let budget = Budget(cli.budget);
    match &cli.command {
        Command::Construct(a) => construct(a, cli.format.unwrap_or(Format::Json)),
        Command::Analyze(a) => analyze(a, budget, cli.format.unwrap_or(Format::Json)),
        Command::Bound(a) => bound(a, budget, cli.format.unwrap_or(Format::Json)),
        Command::Simulate(a) => simulate(a, cli.format.unwrap_or(Format::Json)),
        Command::Export(a) => export(a, cli.format.unwrap_or(Format::Dot)),
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidParameter(format!("missing --{flag}")))
}

fn construct(a: &ConstructArgs, format: Format) -> Result<String> {
    let spec = match a.family {
        Family::ProjectivePlane => CodeSpec::ProjectivePlane {
            q: need(a.q, "q")?,
            union: a.union,
        },
        Family::Affine => CodeSpec::Affine {
            q: need(a.q, "q")?,
            m: need(a.m, "m")?,
            classes: a.classes,
            union: a.union,
        },
        Family::Graph => {
            let (graph, path) = match (&a.graph, &a.edge_list) {
                (_, Some(p)) => ("edge-list".to_string(), Some(p.display().to_string())),
                (Some(g), None) => (g.clone(), None),
                (None, None) => return Err(Error::InvalidParameter("missing --graph or --edge-list".into())),
            };
            CodeSpec::Graph {
                graph,
                params: a.params.clone(),
                path,
                union: a.union,
            }
        }
    };
    let code = spec.build()?;
    match format {
        Format::Json => Ok(code.to_json()? + "\n"),
        Format::Csv => incidence_csv(&code),
        Format::Table => Ok(format!(
            "{}\nn={} theta={} alpha={} rho={}\n",
            code.name(),
            code.n(),
            code.theta(),
            code.alpha(),
            code.rho()
        )),
        f => Err(unsupported("construct", f)),
    }
}

/// A metric value and whether it was computed exactly.
#[derive(Serialize)]
struct Metric<T: Serialize> {
    value: Option<T>,
    exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

impl<T: Serialize> Metric<T> {
    fn from(r: Result<T>) -> Result<Self> {
        match r {
            Ok(v) => Ok(Metric {
                value: Some(v),
                exact: true,
                note: None,
            }),
            Err(e @ (Error::BudgetExceeded { .. } | Error::NotDivisible { .. } | Error::SizeMismatch { .. })) => {
                Ok(Metric {
                    value: None,
                    exact: false,
                    note: Some(e.to_string()),
                })
            }
            Err(e) => Err(e),
        }
    }
}

#[derive(Serialize)]
struct ProfileRow {
    delta: usize,
    value: Option<usize>,
    exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    lower: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    upper: Option<usize>,
}

#[derive(Serialize)]
struct ResilienceOut {
    d: usize,
    beta: usize,
    value: Metric<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    breaking_pattern: Option<Vec<usize>>,
}

#[derive(Serialize)]
struct LocalOut {
    r: usize,
    value: Metric<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostic: Option<String>,
}

#[derive(Serialize)]
struct Analysis {
    code: String,
    n: usize,
    theta: usize,
    alpha: usize,
    rho: usize,
    profile: Vec<ProfileRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a_k: Option<Metric<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    file_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rate: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_min: Option<Metric<usize>>,
    resilience: ResilienceOut,
    local_resilience: LocalOut,
    beta_int: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta_cover: Option<usize>,
}

fn analyze(a: &AnalyzeArgs, budget: Budget, format: Format) -> Result<String> {
    let code = FrCode::load(&a.code)?;
    let profile = coverage_profile(&code, budget, a.approx_samples, a.seed)?
        .into_iter()
        .map(|p| ProfileRow {
            delta: p.delta,
            value: p.exact,
            exact: p.exact.is_some(),
            lower: p.approx.map(|x| x.0),
            upper: p.approx.map(|x| x.1),
        })
        .collect();
    let a_k = match a.k {
        Some(k) => Some(Metric::from(min_coverage(&code, k, budget).map(|m| m.value))?),
        None => None,
    };
    let file_size = a.file_size.or_else(|| a_k.as_ref().and_then(|m| m.value));
    let rate = file_size.map(|m| code_rate(&code, m).to_string());
    let d_min = match file_size {
        Some(m) => Some(Metric::from(min_distance(&code, m, budget).map(|d| d.d_min))?),
        None => None,
    };
    let d = a.d.unwrap_or(code.alpha());
    let r = a.r.unwrap_or(d);
    let beta = if d > 0 { code.alpha() / d } else { 0 };
    let res = failure_resilience(&code, d, beta, budget);
    let pattern = res.as_ref().ok().map(|x| x.breaking_pattern.clone());
    let resilience = ResilienceOut {
        d,
        beta,
        value: Metric::from(res.map(|x| x.value))?,
        breaking_pattern: pattern,
    };
    let loc = local_failure_resilience(&code, r, budget);
    let diagnostic = loc.as_ref().ok().and_then(|x| x.diagnostic.clone());
    let local_resilience = LocalOut {
        r,
        value: Metric::from(loc.map(|x| x.value))?,
        diagnostic,
    };
    let structural = structural_params(&code, budget);
    let beta_int = (0..code.n())
        .flat_map(|i| (i + 1..code.n()).map(move |j| (i, j)))
        .map(|(i, j)| code.intersection(i, j).len())
        .max()
        .unwrap_or(0);
    let out = Analysis {
        code: code.name().to_string(),
        n: code.n(),
        theta: code.theta(),
        alpha: code.alpha(),
        rho: code.rho(),
        profile,
        k: a.k,
        a_k,
        file_size,
        rate,
        d_min,
        resilience,
        local_resilience,
        beta_int,
        delta_cover: structural.ok().map(|s| s.delta),
    };
    match format {
        Format::Json => pretty(&out),
        Format::Csv => Ok(analysis_rows(&out)
            .into_iter()
            .fold("metric,value,exact\n".to_string(), |mut s, (k, v, e)| {
                let _ = writeln!(s, "{k},{v},{e}");
                s
            })),
        Format::Table => {
            let mut s = format!(
                "{} (n={}, theta={}, alpha={}, rho={})\n",
                out.code, out.n, out.theta, out.alpha, out.rho
            );
            for (k, v, e) in analysis_rows(&out) {
                let tag = if e { "" } else { "  (approximate or unavailable)" };
                let _ = writeln!(s, "{k:<22} {v}{tag}");
            }
            Ok(s)
        }
        f => Err(unsupported("analyze", f)),
    }
}

fn show<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or("-".to_string(), ToString::to_string)
}

fn analysis_rows(a: &Analysis) -> Vec<(String, String, bool)> {
    let mut rows = Vec::new();
    for p in &a.profile {
        let v = match (p.value, p.lower, p.upper) {
            (Some(v), _, _) => v.to_string(),
            (None, Some(l), Some(u)) => format!("{l}..{u}"),
            _ => "-".into(),
        };
        rows.push((format!("a({})", p.delta), v, p.exact));
    }
    if let (Some(k), Some(m)) = (a.k, &a.a_k) {
        rows.push((format!("a(k={k})"), show(&m.value), m.exact));
    }
    if let Some(m) = a.file_size {
        rows.push(("file_size".into(), m.to_string(), true));
    }
    if let Some(r) = &a.rate {
        rows.push(("rate".into(), r.clone(), true));
    }
    if let Some(d) = &a.d_min {
        rows.push(("d_min".into(), show(&d.value), d.exact));
    }
    let res = &a.resilience;
    rows.push((format!("rho_res(d={},beta={})", res.d, res.beta), show(&res.value.value), res.value.exact));
    let loc = &a.local_resilience;
    rows.push((format!("rho_res_loc(r={})", loc.r), show(&loc.value.value), loc.value.exact));
    rows.push(("beta_int".into(), a.beta_int.to_string(), true));
    rows.push(("delta_cover".into(), show(&a.delta_cover), a.delta_cover.is_some()));
    rows
}

fn bound(a: &BoundArgs, budget: Budget, format: Format) -> Result<String> {
    let code = FrCode::load(&a.code)?;
    let locals: Option<Vec<Vec<usize>>> = match &a.locals {
        Some(p) => Some(serde_json::from_str(&std::fs::read_to_string(p)?)?),
        None => None,
    };
    let report = full_report(&code, a.file_size, a.r, locals.as_deref(), budget)?;
    if let Some(path) = &a.trace {
        let parts = locals.or_else(|| code.local_partition()).unwrap_or_else(|| code.components());
        let g = greedy_distance_bound(&code, a.file_size, &parts)?;
        std::fs::write(path, pretty(&g)?)?;
    }
    match format {
        Format::Json => pretty(&report),
        Format::Table => Ok(report.to_table()),
        Format::Csv => {
            let mut s = "bound,value,tight\n".to_string();
            for (name, v) in report.values() {
                let tight = report.exact_d_min.map_or(String::new(), |d| (d as i64 == v).to_string());
                let _ = writeln!(s, "{name},{v},{tight}");
            }
            let _ = writeln!(s, "exact,{},", show(&report.exact_d_min));
            Ok(s)
        }
        f => Err(unsupported("bound", f)),
    }
}

fn simulate(a: &SimulateArgs, format: Format) -> Result<String> {
    let config = ScenarioConfig::load(&a.config)?;
    let report = run_scenario(&config)?;
    if let Some(path) = &a.events {
        std::fs::write(path, report.events_jsonl())?;
    }
    match format {
        Format::Json => Ok(report.to_json()? + "\n"),
        Format::Csv => report.to_csv(),
        f => Err(unsupported("simulate", f)),
    }
}

fn export(a: &ExportArgs, format: Format) -> Result<String> {
    let code = FrCode::load(&a.code)?;
    match format {
        Format::Dot => Ok(incidence_dot(&code)),
        Format::Csv => incidence_csv(&code),
        f => Err(unsupported("export", f)),
    }
}
