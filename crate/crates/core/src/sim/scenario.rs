use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cluster::{events_jsonl, ClusterState, Event, RepairMode, RepairPolicy};
use crate::code::{DssParams, FrCode};
use crate::constructions::CodeSpec;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::mds::ShareContainer;
use crate::subsets::Combinations;

/// Where the code comes from: a descriptor file or a construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CodeSource {
    File { file: PathBuf },
    Spec(CodeSpec),
}

impl CodeSource {
    pub fn load(&self) -> Result<FrCode> {
        match self {
            CodeSource::File { file } => FrCode::load(file),
            CodeSource::Spec(spec) => spec.build(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FileSource {
    Path { path: PathBuf },
    /// Pseudo-random bytes drawn from the scenario seed.
    Synthetic { synthetic_bytes: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FailureSchedule {
    /// One round per listed id set.
    Explicit { rounds: Vec<Vec<usize>> },
    /// `rounds` rounds of `per_round` distinct live nodes each.
    Random { rounds: usize, per_round: usize },
    /// Every `size`-subset of nodes, one round each, ascending
    /// lexicographic order.
    Exhaustive { size: usize },
}

impl Default for FailureSchedule {
    fn default() -> Self {
        FailureSchedule::Explicit { rounds: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CollectorQueries {
    Explicit { sets: Vec<Vec<usize>> },
    /// `count` random `k`-subsets of live nodes.
    Random { count: usize },
    /// Every `k`-subset of live nodes.
    Exhaustive,
}

impl Default for CollectorQueries {
    fn default() -> Self {
        CollectorQueries::Explicit { sets: Vec::new() }
    }
}

/// A batch run: build the cluster, apply failure rounds (each followed by
/// repairs), then serve collector reads.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub code: CodeSource,
    pub file: FileSource,
    pub file_size: usize,
    pub k: usize,
    /// Defaults to `alpha`.
    #[serde(default)]
    pub d: Option<usize>,
    /// Defaults to `d`.
    #[serde(default)]
    pub r: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_field")]
    pub field: FieldSpec,
    /// Bytes per block; defaults to the smallest size that fits the file.
    #[serde(default)]
    pub block_size: Option<usize>,
    #[serde(default)]
    pub failures: FailureSchedule,
    #[serde(default)]
    pub policy: RepairPolicy,
    #[serde(default)]
    pub queries: CollectorQueries,
    /// Start every round from a healthy cluster.
    #[serde(default)]
    pub reset_each_round: bool,
    #[serde(default)]
    pub reuse_repaired_helpers: bool,
}

fn default_field() -> FieldSpec {
    FieldSpec::Gf256
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Reads a `.toml` or JSON file; relative paths inside it are taken
    /// relative to the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut cfg = if path.extension().is_some_and(|e| e == "toml") {
            Self::from_toml(&text)?
        } else {
            Self::from_json(&text)?
        };
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let CodeSource::File { file } = &mut cfg.code {
            rebase(file);
        }
        if let FileSource::Path { path } = &mut cfg.file {
            rebase(path);
        }
        Ok(cfg)
    }
}

/// A failed repair inside a round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairFailure {
    pub round: usize,
    pub failed: Vec<usize>,
    pub node: usize,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub code: String,
    pub n: usize,
    pub theta: usize,
    pub alpha: usize,
    pub rho: usize,
    pub file_size: usize,
    pub seed: u64,
    pub rounds: usize,
    pub repairs_attempted: usize,
    pub repairs_succeeded: usize,
    pub repair_success_rate: f64,
    pub local_repairs: usize,
    pub global_repairs: usize,
    pub mean_symbols_moved: f64,
    pub max_symbols_moved: usize,
    pub queries: usize,
    pub queries_succeeded: usize,
    pub reconstruction_success_rate: f64,
    /// Some node could not be rebuilt; without per-round resets the run
    /// stops there.
    pub lossy: bool,
    pub unrepairable: Vec<RepairFailure>,
    pub events: Vec<Event>,
}

fn rate(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

impl ScenarioReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Summary statistics as `metric,value` rows.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["metric", "value"]).map_err(csv_err)?;
        let rows: [(&str, String); 17] = [
            ("code", self.code.clone()),
            ("n", self.n.to_string()),
            ("theta", self.theta.to_string()),
            ("alpha", self.alpha.to_string()),
            ("rho", self.rho.to_string()),
            ("file_size", self.file_size.to_string()),
            ("seed", self.seed.to_string()),
            ("rounds", self.rounds.to_string()),
            ("repairs_attempted", self.repairs_attempted.to_string()),
            ("repairs_succeeded", self.repairs_succeeded.to_string()),
            ("local_repairs", self.local_repairs.to_string()),
            ("global_repairs", self.global_repairs.to_string()),
            ("mean_symbols_moved", format!("{:.6}", self.mean_symbols_moved)),
            ("max_symbols_moved", self.max_symbols_moved.to_string()),
            ("queries", self.queries.to_string()),
            ("queries_succeeded", self.queries_succeeded.to_string()),
            ("lossy", self.lossy.to_string()),
        ];
        for (k, v) in rows {
            w.write_record([k, v.as_str()]).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    pub fn events_jsonl(&self) -> String {
        events_jsonl(&self.events)
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// Runs a scenario. Every random choice comes from one ChaCha stream seeded
/// with `config.seed`, so identical configs give identical reports.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioReport> {
    let code = config.code.load()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let bytes = match &config.file {
        FileSource::Path { path } => std::fs::read(path)?,
        FileSource::Synthetic { synthetic_bytes } => {
            let mut b = vec![0u8; *synthetic_bytes];
            rng.fill(b.as_mut_slice());
            b
        }
    };
    let d = config.d.unwrap_or(code.alpha());
    let r = config.r.unwrap_or(d);
    let params = DssParams::new(&code, config.k, d, r, config.file_size)?;
    let block = config
        .block_size
        .unwrap_or_else(|| bytes.len().div_ceil(config.file_size.max(1)).max(1));
    let container = ShareContainer::encode_file(&bytes, config.field, config.file_size, code.theta(), block)?;
    let fresh = || -> Result<ClusterState> {
        let mut c = ClusterState::build(&code, &container, params)?;
        c.set_reuse_repaired_helpers(config.reuse_repaired_helpers);
        Ok(c)
    };

    let n = code.n();
    let rounds: Vec<Vec<usize>> = match &config.failures {
        FailureSchedule::Explicit { rounds } => rounds.iter().cloned().map(sorted).collect(),
        FailureSchedule::Exhaustive { size } => Combinations::new(n, *size).collect(),
        // drawn lazily below since they depend on who is alive
        FailureSchedule::Random { rounds, .. } => vec![Vec::new(); *rounds],
    };

    let mut cluster = fresh()?;
    let mut events = Vec::new();
    let mut report = ScenarioReport {
        code: code.name().to_string(),
        n,
        theta: code.theta(),
        alpha: code.alpha(),
        rho: code.rho(),
        file_size: config.file_size,
        seed: config.seed,
        rounds: 0,
        repairs_attempted: 0,
        repairs_succeeded: 0,
        repair_success_rate: 1.0,
        local_repairs: 0,
        global_repairs: 0,
        mean_symbols_moved: 0.0,
        max_symbols_moved: 0,
        queries: 0,
        queries_succeeded: 0,
        reconstruction_success_rate: 1.0,
        lossy: false,
        unrepairable: Vec::new(),
        events: Vec::new(),
    };
    let mut moved_total = 0usize;

    for (round, planned) in rounds.into_iter().enumerate() {
        if config.reset_each_round && round > 0 {
            events.extend_from_slice(cluster.events());
            cluster = fresh()?;
        }
        let ids = match &config.failures {
            FailureSchedule::Random { per_round, .. } => {
                let alive: Vec<usize> = (0..n).filter(|&i| !cluster.failed().contains(&i)).collect();
                if *per_round > alive.len() {
                    return Err(Error::InvalidParameter(format!(
                        "cannot fail {per_round} of {} live nodes",
                        alive.len()
                    )));
                }
                sorted(sample(&mut rng, alive.len(), *per_round).into_iter().map(|i| alive[i]).collect())
            }
            _ => planned,
        };
        cluster.fail(&ids)?;
        report.rounds += 1;
        let mut round_lossy = false;
        for (node, outcome) in cluster.repair_all(config.policy) {
            report.repairs_attempted += 1;
            match outcome {
                Ok(log) => {
                    report.repairs_succeeded += 1;
                    match log.mode {
                        RepairMode::Local => report.local_repairs += 1,
                        RepairMode::Global => report.global_repairs += 1,
                    }
                    moved_total += log.symbols_moved;
                    report.max_symbols_moved = report.max_symbols_moved.max(log.symbols_moved);
                }
                Err(e) => {
                    round_lossy = true;
                    report.unrepairable.push(RepairFailure {
                        round,
                        failed: ids.clone(),
                        node,
                        error: e.to_string(),
                    });
                }
            }
        }
        if round_lossy {
            report.lossy = true;
            if !config.reset_each_round {
                break;
            }
        }
    }
    if config.reset_each_round && report.rounds > 0 {
        events.extend_from_slice(cluster.events());
        cluster = fresh()?;
    }

    let alive: Vec<usize> = (0..n).filter(|&i| !cluster.failed().contains(&i)).collect();
    let queries: Vec<Vec<usize>> = match &config.queries {
        CollectorQueries::Explicit { sets } => sets.clone(),
        CollectorQueries::Random { count } => {
            if config.k > alive.len() {
                Vec::new()
            } else {
                (0..*count)
                    .map(|_| sorted(sample(&mut rng, alive.len(), config.k).into_iter().map(|i| alive[i]).collect()))
                    .collect()
            }
        }
        CollectorQueries::Exhaustive => Combinations::new(alive.len(), config.k)
            .map(|pick| pick.into_iter().map(|i| alive[i]).collect())
            .collect(),
    };
    for q in &queries {
        report.queries += 1;
        match cluster.collect(q) {
            Ok(out) if out == bytes => report.queries_succeeded += 1,
            Ok(_) => return Err(Error::DigestMismatch),
            Err(Error::ReconstructionFailed { .. } | Error::DeadNode { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    events.extend_from_slice(cluster.events());

    report.repair_success_rate = rate(report.repairs_succeeded, report.repairs_attempted);
    report.reconstruction_success_rate = rate(report.queries_succeeded, report.queries);
    report.mean_symbols_moved = if report.repairs_succeeded == 0 {
        0.0
    } else {
        moved_total as f64 / report.repairs_succeeded as f64
    };
    // ticks restart with each fresh cluster; renumber for one global clock
    for (i, e) in events.iter_mut().enumerate() {
        e.tick = i as u64;
    }
    report.events = events;
    Ok(report)
}
