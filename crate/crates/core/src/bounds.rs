//! Minimum-distance bounds for locally recoverable FR codes, all in exact
//! integer arithmetic, and the greedy deficient-set construction.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::code::FrCode;
use crate::error::{Error, Result};
use crate::metrics::min_distance;
use crate::recovery::find_local_structures;
use crate::subsets::Budget;

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// Singleton-type bound with locality:
/// `n - ceil(M/alpha) - ceil(M/(r·alpha)) + 2`.
pub fn locality_singleton_bound(n: usize, file_size: usize, alpha: usize, r: usize) -> i64 {
    let (n, m, a, r) = (n as i64, file_size as u64, alpha as u64, r as u64);
    n - ceil_div(m, a) as i64 - ceil_div(m, r * a) as i64 + 2
}

/// Both branches of the local-FR-code bound and their maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalFrBound {
    pub value: i64,
    pub branch1: i64,
    pub branch2: i64,
}

/// Bound for codes whose nodes each lie in a local FR code with parameters
/// `(n_loc, theta_loc, alpha, rho_loc)`; needs `M > theta_loc`.
pub fn local_fr_bound(
    n: usize,
    n_loc: usize,
    theta_loc: usize,
    rho_loc: usize,
    alpha: usize,
    file_size: usize,
) -> Result<LocalFrBound> {
    if file_size <= theta_loc {
        return Err(Error::Inapplicable(format!(
            "file size {file_size} must exceed theta_loc = {theta_loc}"
        )));
    }
    let (m, rho, a, th) = (
        file_size as u64,
        rho_loc as u64,
        alpha as u64,
        theta_loc as u64,
    );
    let branch1 = n as i64 - ceil_div(m * rho, a) as i64 + rho as i64;
    let branch2 = (n + n_loc + 1) as i64 - ceil_div(m * rho + th, a) as i64;
    Ok(LocalFrBound {
        value: branch1.max(branch2),
        branch1,
        branch2,
    })
}

/// Bound for a disjoint union of `l` local FR codes when
/// `M = t·theta_loc + b` with `1 <= t < l` and `1 <= b <= alpha`:
/// `n - ceil(M·rho_loc/alpha) + rho_loc`.
pub fn mincor_bound(
    n: usize,
    rho_loc: usize,
    alpha: usize,
    theta_loc: usize,
    l: usize,
    file_size: usize,
) -> Result<i64> {
    if theta_loc == 0 || alpha == 0 {
        return Err(Error::InvalidParameter("theta_loc and alpha must be positive".into()));
    }
    // M = t·theta_loc + b, 1 <= b <= alpha: t = (M - 1) / theta_loc works
    // whenever alpha < theta_loc; otherwise try each t.
    let fits = (1..l).find(|&t| {
        file_size > t * theta_loc && file_size - t * theta_loc <= alpha
    });
    if fits.is_none() {
        let valid: Vec<String> = (1..l)
            .map(|t| format!("{}..={}", t * theta_loc + 1, t * theta_loc + alpha))
            .collect();
        return Err(Error::Inapplicable(format!(
            "file size {file_size} is not t·{theta_loc} + b with 1 <= t < {l}, 1 <= b <= {alpha}; valid sizes: {}",
            valid.join(", ")
        )));
    }
    let (m, rho, a) = (file_size as u64, rho_loc as u64, alpha as u64);
    Ok(n as i64 - ceil_div(m * rho, a) as i64 + rho as i64)
}

/// Lower bound on the union of `a` sets of size `alpha` whose pairwise
/// intersections have at most `beta_int` elements:
/// `ceil(a·alpha^2 / (alpha + (a-1)·beta_int))`.
pub fn corradi_bound(a: usize, alpha: usize, beta_int: usize) -> usize {
    let (a, al, b) = (a as u64, alpha as u64, beta_int as u64);
    if a == 0 {
        return 0;
    }
    ceil_div(a * al * al, al + (a - 1) * b) as usize
}

/// `(rho-1)·alpha·theta - (theta+alpha)·(delta-1)·beta_int >= 0`.
pub fn check_construction2_condition(
    theta: usize,
    alpha: usize,
    rho: usize,
    delta: usize,
    beta_int: usize,
) -> bool {
    let (th, a, r, d, b) = (
        theta as i128,
        alpha as i128,
        rho as i128,
        delta as i128,
        beta_int as i128,
    );
    (r - 1) * a * th - (th + a) * (d - 1) * b >= 0
}

/// For an `(s, g)`-graph code: writes `k = a·s + b` with `0 <= b < s` and
/// returns the optimal file size `k(s-1)` when `g >= k` and `b >= a + 1`.
pub fn check_graph_code_optimality(s: usize, g: usize, k: usize) -> Option<usize> {
    if s <= 2 || g < k {
        return None;
    }
    let (a, b) = (k / s, k % s);
    (b > a).then_some(k * (s - 1))
}

/// One pass of the greedy loop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyStep {
    pub iteration: usize,
    /// Index into the list of local codes.
    pub structure: usize,
    /// Nodes of that local code already in `S`.
    pub b: usize,
    /// `whole` when the entire local code was absorbed, `partial` otherwise.
    pub action: String,
    pub added: Vec<usize>,
    /// Symbols covered after the step.
    pub h: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyBound {
    pub nodes: Vec<usize>,
    pub covered: usize,
    pub bound: usize,
    pub trace: Vec<GreedyStep>,
}

/// Builds a node set `S` covering fewer than `M` symbols by absorbing local
/// codes, and returns `n - |S|` as an upper bound on `d_min`.
///
/// Each pass considers the local codes that meet `S` without being inside it
/// (or, if none, the first local code disjoint from `S`) and picks the one
/// with the most nodes already in `S`, lowest index on ties. It is absorbed
/// whole when that keeps the coverage below `M`; otherwise the largest-
/// coverage subset still below `M` is added (more nodes, then lexicographic
/// order, on ties), and the loop stops when no subset adds a node.
pub fn greedy_distance_bound(code: &FrCode, file_size: usize, locals: &[Vec<usize>]) -> Result<GreedyBound> {
    if file_size > code.theta() {
        return Err(Error::FileTooLarge {
            file_size,
            theta: code.theta(),
        });
    }
    let n = code.n();
    let mut seen = vec![false; n];
    for group in locals {
        for &v in group {
            code.check_index(v)?;
            seen[v] = true;
        }
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidParameter(format!("node {v} is in no local code")));
    }

    let masks = code.masks();
    let mut in_s = vec![false; n];
    let mut s: Vec<usize> = Vec::new();
    let mut trace = Vec::new();
    let cover = |set: &[usize]| masks.union_count(set.iter().copied());

    let mut iteration = 0;
    while cover(&s) < file_size {
        iteration += 1;
        let inside = |g: &Vec<usize>| g.iter().filter(|&&v| in_s[v]).count();
        let partial: Vec<usize> = (0..locals.len())
            .filter(|&j| {
                let b = inside(&locals[j]);
                b > 0 && b < locals[j].len()
            })
            .collect();
        let pick = if partial.is_empty() {
            (0..locals.len()).find(|&j| inside(&locals[j]) == 0)
        } else {
            // lowest index among the maxima
            let top = partial.iter().map(|&j| inside(&locals[j])).max().unwrap();
            partial.iter().copied().find(|&j| inside(&locals[j]) == top)
        };
        let Some(j) = pick else { break };
        let b = inside(&locals[j]);
        let fresh: Vec<usize> = locals[j].iter().copied().filter(|&v| !in_s[v]).collect();

        let mut whole = s.clone();
        whole.extend(&fresh);
        let h_whole = cover(&whole);
        if h_whole < file_size {
            for &v in &fresh {
                in_s[v] = true;
            }
            s = whole;
            s.sort_unstable();
            trace.push(GreedyStep {
                iteration,
                structure: j,
                b,
                action: "whole".into(),
                added: fresh,
                h: h_whole,
            });
            continue;
        }

        // largest coverage below M over nonempty subsets of the fresh nodes
        let mut best: Option<(usize, Vec<usize>)> = None;
        for mask in 1u64..(1u64 << fresh.len()) {
            let subset: Vec<usize> = (0..fresh.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| fresh[i])
                .collect();
            let mut cand = s.clone();
            cand.extend(&subset);
            let h = cover(&cand);
            if h >= file_size {
                continue;
            }
            let better = match &best {
                None => true,
                Some((bh, bs)) => {
                    h > *bh || (h == *bh && (subset.len() > bs.len() || (subset.len() == bs.len() && subset < *bs)))
                }
            };
            if better {
                best = Some((h, subset));
            }
        }
        let Some((h, added)) = best else { break };
        for &v in &added {
            in_s[v] = true;
        }
        s.extend(&added);
        s.sort_unstable();
        trace.push(GreedyStep {
            iteration,
            structure: j,
            b,
            action: "partial".into(),
            added,
            h,
        });
    }

    let covered = cover(&s);
    Ok(GreedyBound {
        bound: n - s.len(),
        nodes: s,
        covered,
        trace,
    })
}

/// Parameters shared by every part of a uniform local partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalParams {
    pub n_loc: usize,
    pub theta_loc: usize,
    pub rho_loc: usize,
    /// Whether the parts are pairwise symbol-disjoint.
    pub disjoint: bool,
}

/// Checks that every part of `locals` is an FR code with the same
/// `(n_loc, theta_loc, alpha, rho_loc)`.
pub fn local_params(code: &FrCode, locals: &[Vec<usize>]) -> Result<LocalParams> {
    let mut params: Option<(usize, usize, usize)> = None;
    let mut owner = vec![usize::MAX; code.theta()];
    let mut disjoint = true;
    for (idx, group) in locals.iter().enumerate() {
        let mut symbols: Vec<usize> = group.iter().flat_map(|&v| code.node(v).to_vec()).collect();
        symbols.sort_unstable();
        let mut counts: Vec<usize> = Vec::new();
        let mut distinct = Vec::new();
        for s in symbols {
            if distinct.last() == Some(&s) {
                *counts.last_mut().unwrap() += 1;
            } else {
                distinct.push(s);
                counts.push(1);
            }
        }
        let rho = counts[0];
        if counts.iter().any(|&c| c != rho) {
            return Err(Error::Inapplicable(format!(
                "local code {idx} has non-uniform repetition"
            )));
        }
        for &s in &distinct {
            if owner[s] != usize::MAX && owner[s] != idx {
                disjoint = false;
            }
            owner[s] = idx;
        }
        let here = (group.len(), distinct.len(), rho);
        match params {
            None => params = Some(here),
            Some(p) if p != here => {
                return Err(Error::Inapplicable(format!(
                    "local codes differ: {p:?} vs {here:?}"
                )))
            }
            _ => {}
        }
    }
    let (n_loc, theta_loc, rho_loc) =
        params.ok_or_else(|| Error::Inapplicable("no local codes".into()))?;
    Ok(LocalParams {
        n_loc,
        theta_loc,
        rho_loc,
        disjoint,
    })
}

/// A bound value with whether it equals the exact minimum distance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub value: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tight: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundEntry {
    fn from_result(r: Result<i64>) -> Self {
        match r {
            Ok(v) => BoundEntry {
                value: Some(v),
                tight: None,
                note: None,
            },
            Err(e) => BoundEntry {
                value: None,
                tight: None,
                note: Some(e.to_string()),
            },
        }
    }
}

/// Every applicable bound for one code and file size, next to the exact
/// minimum distance when it is within budget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub code: String,
    pub n: usize,
    pub theta: usize,
    pub alpha: usize,
    pub rho: usize,
    pub file_size: usize,
    pub r: usize,
    pub local_bound: BoundEntry,
    pub fr_local_bound: BoundEntry,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fr_local_branches: Option<(i64, i64)>,
    pub mincor_bound: BoundEntry,
    pub greedy_bound: BoundEntry,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub greedy_nodes: Option<Vec<usize>>,
    pub exact_d_min: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_note: Option<String>,
}

impl BoundReport {
    fn entries(&self) -> [(&'static str, &BoundEntry); 4] {
        [
            ("local", &self.local_bound),
            ("fr-local", &self.fr_local_bound),
            ("mincor", &self.mincor_bound),
            ("greedy", &self.greedy_bound),
        ]
    }

    /// Bound values that are present, by name.
    pub fn values(&self) -> Vec<(&'static str, i64)> {
        self.entries()
            .iter()
            .filter_map(|(name, e)| e.value.map(|v| (*name, v)))
            .collect()
    }

    /// True unless some present bound is smaller than the exact distance.
    pub fn is_sound(&self) -> bool {
        match self.exact_d_min {
            Some(d) => self.values().iter().all(|&(_, v)| d as i64 <= v),
            None => true,
        }
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "code {} (n={}, theta={}, alpha={}, rho={}), M={}, r={}",
            self.code, self.n, self.theta, self.alpha, self.rho, self.file_size, self.r
        );
        let _ = writeln!(out, "{:<8} {:>7}  {:<6} note", "bound", "value", "tight");
        for (name, e) in self.entries() {
            let value = e.value.map_or("-".to_string(), |v| v.to_string());
            let tight = match e.tight {
                Some(true) => "yes",
                Some(false) => "no",
                None => "",
            };
            let _ = writeln!(
                out,
                "{:<8} {:>7}  {:<6} {}",
                name,
                value,
                tight,
                e.note.as_deref().unwrap_or("")
            );
        }
        let exact = self.exact_d_min.map_or("-".to_string(), |v| v.to_string());
        let _ = writeln!(
            out,
            "{:<8} {:>7}  {:<6} {}",
            "exact",
            exact,
            "",
            self.exact_note.as_deref().unwrap_or("")
        );
        out
    }
}

/// Evaluates every bound that applies to `code` with file size `file_size`
/// and local repair degree `r`. `locals` overrides the code's own local
/// partition.
pub fn full_report(
    code: &FrCode,
    file_size: usize,
    r: usize,
    locals: Option<&[Vec<usize>]>,
    budget: Budget,
) -> Result<BoundReport> {
    if file_size == 0 || file_size > code.theta() {
        return Err(Error::FileTooLarge {
            file_size,
            theta: code.theta(),
        });
    }
    let n = code.n();
    let alpha = code.alpha();

    let local_bound = BoundEntry::from_result((|| {
        let ls = find_local_structures(code, r, 1)?;
        if !ls.is_locally_recoverable() {
            return Err(Error::Inapplicable(format!(
                "code is not locally recoverable with r = {r}"
            )));
        }
        Ok(locality_singleton_bound(n, file_size, alpha, r))
    })());

    let owned;
    let locals = match locals {
        Some(l) => Some(l),
        None => {
            owned = code.local_partition();
            owned.as_deref()
        }
    };
    let lp = match locals {
        Some(l) => local_params(code, l),
        None => Err(Error::Inapplicable("no local FR codes given".into())),
    };

    let mut fr_local_branches = None;
    let fr_local_bound = BoundEntry::from_result(lp.as_ref().map_err(clone_err).and_then(|p| {
        let b = local_fr_bound(n, p.n_loc, p.theta_loc, p.rho_loc, alpha, file_size)?;
        fr_local_branches = Some((b.branch1, b.branch2));
        Ok(b.value)
    }));

    let mincor_bound = BoundEntry::from_result(lp.as_ref().map_err(clone_err).and_then(|p| {
        let l = locals.map_or(0, <[Vec<usize>]>::len);
        if !p.disjoint || l * p.n_loc != n {
            return Err(Error::Inapplicable(
                "code is not a disjoint union of its local codes".into(),
            ));
        }
        mincor_bound(n, p.rho_loc, alpha, p.theta_loc, l, file_size)
    }));

    let mut greedy_nodes = None;
    let greedy_bound = BoundEntry::from_result(match (locals, &lp) {
        (Some(l), Ok(_)) => greedy_distance_bound(code, file_size, l).map(|g| {
            greedy_nodes = Some(g.nodes);
            g.bound as i64
        }),
        (_, Err(e)) => Err(clone_err(e)),
        (None, _) => Err(Error::Inapplicable("no local FR codes given".into())),
    });

    let (exact_d_min, exact_note) = match min_distance(code, file_size, budget) {
        Ok(d) => (Some(d.d_min), None),
        Err(e @ Error::BudgetExceeded { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };

    let mut report = BoundReport {
        code: code.name().to_string(),
        n,
        theta: code.theta(),
        alpha,
        rho: code.rho(),
        file_size,
        r,
        local_bound,
        fr_local_bound,
        fr_local_branches,
        mincor_bound,
        greedy_bound,
        greedy_nodes,
        exact_d_min,
        exact_note,
    };
    if let Some(d) = exact_d_min {
        for e in [
            &mut report.local_bound,
            &mut report.fr_local_bound,
            &mut report.mincor_bound,
            &mut report.greedy_bound,
        ] {
            e.tight = e.value.map(|v| v == d as i64);
        }
    }
    Ok(report)
}

fn clone_err(e: &Error) -> Error {
    Error::Inapplicable(match e {
        Error::Inapplicable(s) => s.clone(),
        other => other.to_string(),
    })
}
