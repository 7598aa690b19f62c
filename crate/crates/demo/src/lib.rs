//! Browser bindings. Each exported function takes and returns JSON strings;
//! the plain Rust functions underneath are what the native tests exercise.

use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use frcode::bounds::full_report;
use frcode::constructions::{affine_resolvable, disjoint_union, from_graph, graph_catalog, projective_plane};
use frcode::field::FieldSpec;
use frcode::mds::ShareContainer;
use frcode::metrics::{code_rate, coverage_profile, min_distance};
use frcode::sim::{ClusterState, NodeStatus, RepairPolicy};
use frcode::{Budget, DssParams, FrCode};

/// Kept small so the page stays responsive.
const DEMO_BUDGET: Budget = Budget(2_000_000);

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn to_json(v: &impl Serialize) -> Result<String, String> {
    serde_json::to_string(v).map_err(err)
}

fn parse_code(code_json: &str) -> Result<FrCode, String> {
    FrCode::from_json(code_json).map_err(err)
}

fn parse_ids(text: &str) -> Result<Vec<usize>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("not a node id: {t}")))
        .collect()
}

/// Builds a code. `family` is `graph`, `projective-plane` or `affine`;
/// `graph` names a catalog graph with `params` as its comma separated
/// arguments. `copies` > 1 takes a disjoint union.
pub fn construct_code(family: &str, q: usize, m: usize, graph: &str, params: &str, copies: usize) -> Result<String, String> {
    let base = match family {
        "graph" => {
            let params = parse_ids(params)?;
            from_graph(&graph_catalog(graph, &params).map_err(err)?).map_err(err)?
        }
        "projective-plane" => projective_plane(q).map_err(err)?,
        "affine" => affine_resolvable(q, m, q.pow(m.saturating_sub(1) as u32)).map_err(err)?,
        other => return Err(format!("unknown family: {other}")),
    };
    let code = if copies > 1 { disjoint_union(&base, copies).map_err(err)? } else { base };
    let value: Value = serde_json::from_str(&code.to_json().map_err(err)?).map_err(err)?;
    to_json(&json!({
        "code": value,
        "incidence": code.incidence_matrix(),
    }))
}

/// Coverage profile plus every bound that applies for file size `file_size`
/// and local repair degree `r`.
pub fn analyze_code(code_json: &str, file_size: usize, r: usize) -> Result<String, String> {
    let code = parse_code(code_json)?;
    let profile = coverage_profile(&code, DEMO_BUDGET, 200, 1).map_err(err)?;
    let d_min = min_distance(&code, file_size, DEMO_BUDGET).map_err(err);
    let report = full_report(&code, file_size, r, None, DEMO_BUDGET).map_err(err)?;
    to_json(&json!({
        "profile": profile,
        "rate": code_rate(&code, file_size).to_string(),
        "d_min": d_min.as_ref().map(|d| d.d_min).ok(),
        "d_min_error": d_min.err(),
        "bounds": report,
        "table": report.to_table(),
    }))
}

/// A live cluster holding an encoded text file.
#[wasm_bindgen]
pub struct DemoCluster {
    state: ClusterState,
    text: String,
}

impl DemoCluster {
    pub fn create(code_json: &str, file_size: usize, text: &str) -> Result<DemoCluster, String> {
        let code = parse_code(code_json)?;
        let d_min = min_distance(&code, file_size, DEMO_BUDGET).map_err(err)?.d_min;
        let k = code.n() + 1 - d_min;
        let alpha = code.alpha();
        let r = (1..=alpha).rev().find(|r| alpha % r == 0 && *r < k).unwrap_or(1);
        let params = DssParams::new(&code, k, alpha, r, file_size).map_err(err)?;
        let bytes = text.as_bytes();
        let block = bytes.len().div_ceil(file_size).max(1);
        let container =
            ShareContainer::encode_file(bytes, FieldSpec::Gf256, file_size, code.theta(), block).map_err(err)?;
        let state = ClusterState::build(&code, &container, params).map_err(err)?;
        Ok(DemoCluster { state, text: text.to_string() })
    }

    pub fn snapshot(&self) -> Result<String, String> {
        let status: Vec<&str> = self
            .state
            .status()
            .iter()
            .map(|s| match s {
                NodeStatus::Alive => "alive",
                NodeStatus::Failed => "failed",
                NodeStatus::Repaired => "repaired",
            })
            .collect();
        to_json(&json!({
            "status": status,
            "traffic": self.state.traffic(),
            "params": self.state.params(),
            "events": self.state.events(),
        }))
    }

    pub fn fail_nodes(&mut self, ids: &str) -> Result<String, String> {
        let ignored = self.state.fail(&parse_ids(ids)?).map_err(err)?;
        to_json(&json!({ "ignored": ignored }))
    }

    pub fn repair_nodes(&mut self, policy: &str) -> Result<String, String> {
        let policy = match policy {
            "local-first" => RepairPolicy::LocalFirst,
            "global-only" => RepairPolicy::GlobalOnly,
            other => return Err(format!("unknown policy: {other}")),
        };
        let results: Vec<Value> = self
            .state
            .repair_all(policy)
            .into_iter()
            .map(|(node, r)| match r {
                Ok(log) => json!({ "node": node, "ok": true, "log": log }),
                Err(e) => json!({ "node": node, "ok": false, "error": e.to_string() }),
            })
            .collect();
        to_json(&results)
    }

    pub fn read_file(&mut self, ids: &str) -> Result<String, String> {
        let ids = parse_ids(ids)?;
        let coverage = self.state.coverage(&ids);
        let out = self.state.collect(&ids);
        to_json(&match out {
            Ok(bytes) => json!({
                "ok": true,
                "coverage": coverage,
                "intact": bytes == self.text.as_bytes(),
                "text": String::from_utf8_lossy(&bytes),
            }),
            Err(e) => json!({ "ok": false, "coverage": coverage, "error": e.to_string() }),
        })
    }
}

#[wasm_bindgen]
impl DemoCluster {
    #[wasm_bindgen(constructor)]
    pub fn new(code_json: &str, file_size: usize, text: &str) -> Result<DemoCluster, JsError> {
        Self::create(code_json, file_size, text).map_err(|e| JsError::new(&e))
    }

    pub fn state(&self) -> Result<String, JsError> {
        self.snapshot().map_err(|e| JsError::new(&e))
    }

    pub fn fail(&mut self, ids: &str) -> Result<String, JsError> {
        self.fail_nodes(ids).map_err(|e| JsError::new(&e))
    }

    pub fn repair(&mut self, policy: &str) -> Result<String, JsError> {
        self.repair_nodes(policy).map_err(|e| JsError::new(&e))
    }

    pub fn read(&mut self, ids: &str) -> Result<String, JsError> {
        self.read_file(ids).map_err(|e| JsError::new(&e))
    }
}

#[wasm_bindgen]
pub fn construct(family: &str, q: usize, m: usize, graph: &str, params: &str, copies: usize) -> Result<String, JsError> {
    construct_code(family, q, m, graph, params, copies).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn analyze(code_json: &str, file_size: usize, r: usize) -> Result<String, JsError> {
    analyze_code(code_json, file_size, r).map_err(|e| JsError::new(&e))
}
