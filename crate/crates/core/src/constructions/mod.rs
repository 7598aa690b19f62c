//! Generators for the code families: graph codes (one node per vertex, one
//! symbol per edge), projective planes, affine resolvable designs, and
//! disjoint unions of a local code.

mod designs;
mod graph;

use serde::{Deserialize, Serialize};

use crate::code::FrCode;
use crate::error::{Error, Result};
use crate::subsets::Budget;

pub use designs::{affine_resolvable, projective_plane};
pub use graph::{graph_catalog, Graph};

/// Turns an `s`-regular graph into an FR code: vertex `i` stores the labels of
/// its incident edges, so `theta = n·s/2`, `alpha = s` and `rho = 2`.
pub fn from_graph(graph: &Graph) -> Result<FrCode> {
    graph.regular_degree()?;
    let mut nodes = vec![Vec::new(); graph.vertex_count()];
    for (label, &(a, b)) in graph.edges().iter().enumerate() {
        nodes[a].push(label);
        nodes[b].push(label);
    }
    FrCode::from_nodes("graph-code", graph.edges().len(), nodes)
}

/// `l` disjoint copies of `local`; copy `c` shifts symbols by `c·theta_loc`
/// and the copies are recorded as the code's local partition.
pub fn disjoint_union(local: &FrCode, l: usize) -> Result<FrCode> {
    if l <= 1 {
        return Err(Error::InvalidParameter(format!("union needs l > 1, got {l}")));
    }
    let (n, theta) = (local.n(), local.theta());
    let nodes = (0..l)
        .flat_map(|c| {
            local
                .nodes()
                .iter()
                .map(move |v| v.iter().map(|s| s + c * theta).collect())
        })
        .collect();
    let partition = (0..l).map(|c| (c * n..(c + 1) * n).collect()).collect();
    FrCode::from_nodes(format!("union(l={l},{})", local.name()), l * theta, nodes)?
        .with_local_codes(partition)
}

/// `delta`: smallest value such that every `delta + 1` nodes cover all
/// symbols. `beta_int`: largest pairwise node intersection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralParams {
    pub delta: usize,
    pub beta_int: usize,
}

pub fn structural_params(code: &FrCode, budget: Budget) -> Result<StructuralParams> {
    let n = code.n();
    let beta_int = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| code.intersection(i, j).len())
        .max()
        .unwrap_or(0);

    let masks = code.masks();
    let all: Vec<usize> = (0..n).collect();
    let theta = code.theta();
    // fewer than ceil(theta / alpha) nodes can never cover everything
    let mut size = theta.div_ceil(code.alpha()).max(1);
    loop {
        budget.check(n, size)?;
        if masks.find_union_below(&all, size, theta).is_none() {
            return Ok(StructuralParams {
                delta: size - 1,
                beta_int,
            });
        }
        size += 1;
    }
}

/// Parameters of a disjoint-union code built from a local code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Construction2Params {
    pub delta: usize,
    pub beta_int: usize,
    pub l: usize,
    pub t: usize,
    pub n_loc: usize,
    pub theta_loc: usize,
    pub alpha: usize,
    pub rho_loc: usize,
}

impl Construction2Params {
    pub fn new(local: &FrCode, l: usize, t: usize, budget: Budget) -> Result<Self> {
        if l <= 1 {
            return Err(Error::InvalidParameter(format!("l = {l} must exceed 1")));
        }
        if t == 0 || t >= l {
            return Err(Error::InvalidParameter(format!("t = {t} must satisfy 1 <= t < l")));
        }
        let sp = structural_params(local, budget)?;
        Ok(Construction2Params {
            delta: sp.delta,
            beta_int: sp.beta_int,
            l,
            t,
            n_loc: local.n(),
            theta_loc: local.theta(),
            alpha: local.alpha(),
            rho_loc: local.rho(),
        })
    }

    /// The file size `t·theta_loc + alpha`.
    pub fn file_size(&self) -> usize {
        self.t * self.theta_loc + self.alpha
    }
}

/// Declarative description of a code, shared by the CLI and scenario files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum CodeSpec {
    /// A catalog graph (`petersen`, `heawood`, `complete`, `complete_bipartite`,
    /// `cycle`) or an edge-list file given by `path`.
    Graph {
        graph: String,
        #[serde(default)]
        params: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        union: Option<usize>,
    },
    ProjectivePlane {
        q: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        union: Option<usize>,
    },
    /// Defaults to `q^(m-1)` parallel classes.
    Affine {
        q: usize,
        m: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        classes: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        union: Option<usize>,
    },
}

impl CodeSpec {
    pub fn build(&self) -> Result<FrCode> {
        let (base, union) = match self {
            CodeSpec::Graph {
                graph,
                params,
                path,
                union,
            } => {
                let g = match (graph.as_str(), path) {
                    ("edge-list" | "from_edge_list", Some(p)) => {
                        Graph::from_edge_list(&std::fs::read_to_string(p)?)?
                    }
                    ("edge-list" | "from_edge_list", None) => {
                        return Err(Error::InvalidParameter("edge-list graph needs a path".into()))
                    }
                    (name, _) => graph_catalog(name, params)?,
                };
                let label = if params.is_empty() {
                    graph.clone()
                } else {
                    format!(
                        "{graph}({})",
                        params.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
                    )
                };
                (from_graph(&g)?.with_name(format!("graph-code({label})")), *union)
            }
            CodeSpec::ProjectivePlane { q, union } => (projective_plane(*q)?, *union),
            CodeSpec::Affine {
                q,
                m,
                classes,
                union,
            } => {
                let classes = classes.unwrap_or_else(|| q.pow(m.saturating_sub(1) as u32));
                (affine_resolvable(*q, *m, classes)?, *union)
            }
        };
        match union {
            Some(l) => disjoint_union(&base, l),
            None => Ok(base),
        }
    }
}
