//! The fractional repetition code model: `n` storage nodes, each holding `alpha`
//! of `theta` encoded symbols, every symbol replicated on exactly `rho` nodes.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subsets::NodeMasks;

/// A single broken invariant of a candidate incidence structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Empty,
    SymbolOutOfRange { node: usize, symbol: usize },
    DuplicateSymbol { node: usize, symbol: usize },
    NonUniformAlpha { sizes: Vec<(usize, usize)> },
    NonUniformRho { counts: Vec<(usize, usize)> },
    RepeatedNode { first: usize, second: usize },
    HeaderMismatch {
        field: String,
        declared: usize,
        actual: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "empty structure"),
            Violation::SymbolOutOfRange { node, symbol } => {
                write!(f, "symbol {symbol} out of range in node {node}")
            }
            Violation::DuplicateSymbol { node, symbol } => {
                write!(f, "symbol {symbol} listed twice in node {node}")
            }
            Violation::NonUniformAlpha { sizes } => {
                write!(f, "non-uniform α: (node, size) = {sizes:?}")
            }
            Violation::NonUniformRho { counts } => {
                write!(f, "non-uniform ρ: (symbol, copies) = {counts:?}")
            }
            Violation::RepeatedNode { first, second } => {
                write!(f, "repeated node: {first} and {second}")
            }
            Violation::HeaderMismatch {
                field,
                declared,
                actual,
            } => write!(f, "declared {field} = {declared} but structure has {actual}"),
        }
    }
}

/// Outcome of [`validate`]: empty means the structure is a valid FR code.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every FR code invariant on `nodes` over the symbol set `0..theta`.
pub fn validate(theta: usize, nodes: &[Vec<usize>]) -> ValidationReport {
    let mut violations = Vec::new();
    if nodes.is_empty() || theta == 0 {
        violations.push(Violation::Empty);
        return ValidationReport { violations };
    }

    let mut copies = vec![0usize; theta];
    let mut sorted_nodes = Vec::with_capacity(nodes.len());
    for (i, node) in nodes.iter().enumerate() {
        let mut sorted = node.clone();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                violations.push(Violation::DuplicateSymbol {
                    node: i,
                    symbol: w[0],
                });
            }
        }
        sorted.dedup();
        for &s in &sorted {
            if s >= theta {
                violations.push(Violation::SymbolOutOfRange { node: i, symbol: s });
            } else {
                copies[s] += 1;
            }
        }
        sorted_nodes.push(sorted);
    }

    let alpha = nodes[0].len();
    if nodes.iter().any(|v| v.len() != alpha) {
        violations.push(Violation::NonUniformAlpha {
            sizes: nodes.iter().map(Vec::len).enumerate().collect(),
        });
    }

    let rho = copies[0];
    if copies.iter().any(|&c| c != rho) || rho == 0 {
        violations.push(Violation::NonUniformRho {
            counts: copies.iter().copied().enumerate().collect(),
        });
    }

    let mut seen: BTreeMap<&[usize], usize> = BTreeMap::new();
    for (i, node) in sorted_nodes.iter().enumerate() {
        if let Some(&first) = seen.get(node.as_slice()) {
            violations.push(Violation::RepeatedNode { first, second: i });
        } else {
            seen.insert(node, i);
        }
    }

    ValidationReport { violations }
}

/// A validated fractional repetition code.
///
/// Node symbol lists are kept sorted ascending. When the code is a disjoint
/// union of smaller FR codes, `local_codes` records the node partition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CodeDescriptor")]
pub struct FrCode {
    name: String,
    n: usize,
    theta: usize,
    alpha: usize,
    rho: usize,
    nodes: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    local_codes: Option<Vec<Vec<usize>>>,
}

/// The on-disk JSON shape, validated before it becomes an [`FrCode`].
#[derive(Deserialize)]
struct CodeDescriptor {
    name: String,
    n: usize,
    theta: usize,
    alpha: usize,
    rho: usize,
    nodes: Vec<Vec<usize>>,
    #[serde(default)]
    local_codes: Option<Vec<Vec<usize>>>,
}

impl TryFrom<CodeDescriptor> for FrCode {
    type Error = Error;

    fn try_from(d: CodeDescriptor) -> Result<Self> {
        let mut violations = validate(d.theta, &d.nodes).violations;
        let code = if violations.is_empty() {
            Some(FrCode::from_nodes(d.name, d.theta, d.nodes)?)
        } else {
            None
        };
        if let Some(code) = &code {
            for (field, declared, actual) in [
                ("n", d.n, code.n),
                ("alpha", d.alpha, code.alpha),
                ("rho", d.rho, code.rho),
            ] {
                if declared != actual {
                    violations.push(Violation::HeaderMismatch {
                        field: field.into(),
                        declared,
                        actual,
                    });
                }
            }
        }
        if !violations.is_empty() {
            return Err(Error::InvalidCode(violations));
        }
        let mut code = code.expect("validated");
        if let Some(locals) = d.local_codes {
            code = code.with_local_codes(locals)?;
        }
        Ok(code)
    }
}

impl FrCode {
    /// Builds a code from node symbol lists over `0..theta`, rejecting any
    /// structure that fails [`validate`].
    pub fn from_nodes(name: impl Into<String>, theta: usize, nodes: Vec<Vec<usize>>) -> Result<Self> {
        let report = validate(theta, &nodes);
        if !report.is_ok() {
            return Err(Error::InvalidCode(report.violations));
        }
        let nodes: Vec<Vec<usize>> = nodes
            .into_iter()
            .map(|mut v| {
                v.sort_unstable();
                v
            })
            .collect();
        let alpha = nodes[0].len();
        let rho = nodes.iter().filter(|v| v.contains(&0)).count();
        Ok(FrCode {
            name: name.into(),
            n: nodes.len(),
            theta,
            alpha,
            rho,
            nodes,
            local_codes: None,
        })
    }

    /// Attaches a partition of the nodes into local codes.
    pub fn with_local_codes(mut self, locals: Vec<Vec<usize>>) -> Result<Self> {
        let mut owner = vec![None; self.n];
        for (c, group) in locals.iter().enumerate() {
            if group.is_empty() {
                return Err(Error::InvalidParameter(format!("local code {c} is empty")));
            }
            for &v in group {
                let slot = owner.get_mut(v).ok_or(Error::IndexOutOfRange {
                    index: v,
                    len: self.n,
                })?;
                if slot.is_some() {
                    return Err(Error::InvalidParameter(format!(
                        "node {v} belongs to more than one local code"
                    )));
                }
                *slot = Some(c);
            }
        }
        if let Some(v) = owner.iter().position(Option::is_none) {
            return Err(Error::InvalidParameter(format!(
                "node {v} is not in any local code"
            )));
        }
        self.local_codes = Some(
            locals
                .into_iter()
                .map(|mut g| {
                    g.sort_unstable();
                    g
                })
                .collect(),
        );
        Ok(self)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn theta(&self) -> usize {
        self.theta
    }
    pub fn alpha(&self) -> usize {
        self.alpha
    }
    pub fn rho(&self) -> usize {
        self.rho
    }
    pub fn nodes(&self) -> &[Vec<usize>] {
        &self.nodes
    }
    pub fn node(&self, i: usize) -> &[usize] {
        &self.nodes[i]
    }
    pub fn local_codes(&self) -> Option<&[Vec<usize>]> {
        self.local_codes.as_deref()
    }

    /// The recorded local partition, or else the connected components of the
    /// node/symbol incidence graph when there are at least two of them.
    pub fn local_partition(&self) -> Option<Vec<Vec<usize>>> {
        if let Some(l) = &self.local_codes {
            return Some(l.clone());
        }
        let comps = self.components();
        (comps.len() > 1).then_some(comps)
    }

    /// Connected components of the nodes, two nodes being adjacent when they
    /// share a symbol.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut holders: Vec<Vec<usize>> = vec![Vec::new(); self.theta];
        for (i, node) in self.nodes.iter().enumerate() {
            for &s in node {
                holders[s].push(i);
            }
        }
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            comp[start] = id;
            let mut i = 0;
            while i < members.len() {
                let v = members[i];
                i += 1;
                for &s in &self.nodes[v] {
                    for &u in &holders[s] {
                        if comp[u] == usize::MAX {
                            comp[u] = id;
                            members.push(u);
                        }
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn masks(&self) -> NodeMasks {
        NodeMasks::new(self.theta, &self.nodes)
    }

    /// Nodes holding symbol `s`.
    pub fn holders(&self, s: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| self.nodes[i].binary_search(&s).is_ok())
            .collect()
    }

    pub fn intersection(&self, i: usize, j: usize) -> Vec<usize> {
        self.nodes[i]
            .iter()
            .copied()
            .filter(|s| self.nodes[j].binary_search(s).is_ok())
            .collect()
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.n,
            });
        }
        Ok(())
    }

    /// The `n × theta` 0/1 incidence matrix.
    pub fn incidence_matrix(&self) -> Vec<Vec<u8>> {
        self.nodes
            .iter()
            .map(|node| {
                let mut row = vec![0u8; self.theta];
                for &s in node {
                    row[s] = 1;
                }
                row
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// System parameters of a storage deployment built on an FR code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DssParams {
    /// Nodes contacted by a data collector.
    pub k: usize,
    /// Global repair degree.
    pub d: usize,
    /// Local repair degree.
    pub r: usize,
    pub beta: usize,
    pub beta_loc: usize,
    pub gamma: usize,
    pub file_size: usize,
}

impl DssParams {
    /// `k > d` is allowed; only `r < k`, `r <= d` and the divisibility of
    /// `alpha` by `d` and `r` are enforced.
    pub fn new(code: &FrCode, k: usize, d: usize, r: usize, file_size: usize) -> Result<Self> {
        let alpha = code.alpha();
        if r == 0 || d == 0 || k == 0 {
            return Err(Error::InvalidParameter("k, d and r must be positive".into()));
        }
        if r >= k {
            return Err(Error::InvalidParameter(format!("r ({r}) must be < k ({k})")));
        }
        if r > d {
            return Err(Error::InvalidParameter(format!("r ({r}) must be <= d ({d})")));
        }
        if k > code.n() {
            return Err(Error::InvalidParameter(format!(
                "k ({k}) exceeds n ({})",
                code.n()
            )));
        }
        if alpha % d != 0 {
            return Err(Error::NotDivisible {
                what: "d",
                value: d,
                alpha,
            });
        }
        if alpha % r != 0 {
            return Err(Error::NotDivisible {
                what: "r",
                value: r,
                alpha,
            });
        }
        if file_size == 0 || file_size > code.theta() {
            return Err(Error::FileTooLarge {
                file_size,
                theta: code.theta(),
            });
        }
        Ok(DssParams {
            k,
            d,
            r,
            beta: alpha / d,
            beta_loc: alpha / r,
            gamma: alpha,
            file_size,
        })
    }
}
