//! Exact, uncoded recovery: β-recoverability of a symbol set from a list of
//! helper nodes, local structures, and the failure resilience metrics.

use serde::{Deserialize, Serialize};

use crate::code::FrCode;
use crate::error::{Error, Result};
use crate::flow;
use crate::subsets::{Budget, Combinations};

/// Which helper supplies which symbols when recovering `target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveryAssignment {
    pub target: Vec<usize>,
    pub helpers: Vec<usize>,
    /// `subsets[i]` is the sorted symbol set downloaded from `helpers[i]`.
    pub subsets: Vec<Vec<usize>>,
}

impl RecoveryAssignment {
    pub fn beta(&self) -> usize {
        self.subsets.first().map_or(0, Vec::len)
    }
}

/// A failed node together with `r` helpers that can rebuild it, each sending
/// `alpha / r` symbols.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalStructure {
    pub node_id: usize,
    pub helpers: Vec<usize>,
    pub assignment: Vec<(usize, Vec<usize>)>,
}

/// Splits `target` into `helper_sets.len()` blocks of exactly `beta` symbols,
/// block `i` drawn from `helper_sets[i]`.
///
/// Among all valid splits the lexicographically smallest one is returned,
/// ordering first by helper position and then by symbol. `target` must be
/// sorted and free of duplicates, and every helper set sorted.
pub fn split_target(target: &[usize], helper_sets: &[&[usize]], beta: usize) -> Option<Vec<Vec<usize>>> {
    if target.len() != helper_sets.len() * beta {
        return None;
    }
    let options: Vec<Vec<usize>> = target
        .iter()
        .map(|s| {
            (0..helper_sets.len())
                .filter(|&h| helper_sets[h].binary_search(s).is_ok())
                .collect()
        })
        .collect();
    let mut caps = vec![beta; helper_sets.len()];
    flow::assign(&options, &caps)?;

    let mut fixed = vec![false; target.len()];
    let mut blocks = vec![Vec::with_capacity(beta); helper_sets.len()];
    for h in 0..helper_sets.len() {
        for s in 0..target.len() {
            if blocks[h].len() == beta {
                break;
            }
            if fixed[s] || !options[s].contains(&h) {
                continue;
            }
            caps[h] -= 1;
            let rest: Vec<Vec<usize>> = (0..target.len())
                .filter(|&x| !fixed[x] && x != s)
                .map(|x| options[x].clone())
                .collect();
            if flow::assign(&rest, &caps).is_some() {
                fixed[s] = true;
                blocks[h].push(target[s]);
            } else {
                caps[h] += 1;
            }
        }
        debug_assert_eq!(blocks[h].len(), beta);
    }
    Some(blocks)
}

/// Decides whether `target` is β-recoverable from the listed helper nodes.
pub fn is_recoverable(
    code: &FrCode,
    target: &[usize],
    helpers: &[usize],
    beta: usize,
) -> Result<Option<RecoveryAssignment>> {
    if beta == 0 {
        return Err(Error::InvalidParameter("beta must be positive".into()));
    }
    let mut t = target.to_vec();
    t.sort_unstable();
    t.dedup();
    if t.len() != target.len() {
        return Err(Error::InvalidParameter("target has repeated symbols".into()));
    }
    if let Some(&s) = t.iter().find(|&&s| s >= code.theta()) {
        return Err(Error::IndexOutOfRange {
            index: s,
            len: code.theta(),
        });
    }
    for &h in helpers {
        code.check_index(h)?;
    }
    if t.len() != helpers.len() * beta {
        return Err(Error::SizeMismatch {
            expected: helpers.len() * beta,
            actual: t.len(),
        });
    }
    let sets: Vec<&[usize]> = helpers.iter().map(|&h| code.node(h)).collect();
    Ok(split_target(&t, &sets, beta).map(|subsets| RecoveryAssignment {
        target: t,
        helpers: helpers.to_vec(),
        subsets,
    }))
}

/// Lexicographically smallest `d`-set of available nodes from which `node`
/// is β-recoverable.
pub fn find_helper_set(
    code: &FrCode,
    node: usize,
    available: &[bool],
    d: usize,
    beta: usize,
) -> Option<RecoveryAssignment> {
    let target = code.node(node);
    let candidates: Vec<usize> = (0..code.n())
        .filter(|&j| j != node && available[j])
        .filter(|&j| code.intersection(node, j).len() >= beta)
        .collect();
    if candidates.len() < d {
        return None;
    }
    let covered = target.iter().all(|s| {
        candidates
            .iter()
            .any(|&j| code.node(j).binary_search(s).is_ok())
    });
    if !covered {
        return None;
    }
    for pick in Combinations::new(candidates.len(), d) {
        let helpers: Vec<usize> = pick.iter().map(|&p| candidates[p]).collect();
        let sets: Vec<&[usize]> = helpers.iter().map(|&h| code.node(h)).collect();
        if let Some(subsets) = split_target(target, &sets, beta) {
            return Some(RecoveryAssignment {
                target: target.to_vec(),
                helpers,
                subsets,
            });
        }
    }
    None
}

/// Smallest failure count `f` for which some `f`-set of failed nodes leaves
/// a failed node unrecoverable, with the lexicographically first such set.
fn first_breaking_failure(
    code: &FrCode,
    d: usize,
    beta: usize,
    budget: Budget,
) -> Result<(usize, Vec<usize>)> {
    let n = code.n();
    for f in 1..=n {
        budget.check(n, f)?;
        for failed in Combinations::new(n, f) {
            let mut alive = vec![true; n];
            for &v in &failed {
                alive[v] = false;
            }
            if failed
                .iter()
                .any(|&v| find_helper_set(code, v, &alive, d, beta).is_none())
            {
                return Ok((f, failed));
            }
        }
    }
    unreachable!("losing every node always breaks recovery")
}

/// Failure resilience `ρ^res` for repair degree `d` and per-helper download
/// `beta`, plus the first failure pattern that breaks it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Resilience {
    pub value: usize,
    pub breaking_pattern: Vec<usize>,
}

pub fn failure_resilience(code: &FrCode, d: usize, beta: usize, budget: Budget) -> Result<Resilience> {
    if d == 0 || beta == 0 || d * beta != code.alpha() {
        return Err(Error::SizeMismatch {
            expected: code.alpha(),
            actual: d * beta,
        });
    }
    let (f, pattern) = first_breaking_failure(code, d, beta, budget)?;
    Ok(Resilience {
        value: f,
        breaking_pattern: pattern,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalResilience {
    pub value: usize,
    pub breaking_pattern: Vec<usize>,
    /// Set when the code is not locally recoverable at all.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

/// Local failure resilience `ρ^res_loc`: the largest number of simultaneous
/// failures such that every failed node keeps an intact local structure.
pub fn local_failure_resilience(code: &FrCode, r: usize, budget: Budget) -> Result<LocalResilience> {
    check_local_degree(code, r)?;
    let (f, pattern) = first_breaking_failure(code, r, code.alpha() / r, budget)?;
    let diagnostic = (f == 1).then(|| {
        format!(
            "node {} has no local structure with r = {r}; the code is not locally recoverable",
            pattern[0]
        )
    });
    Ok(LocalResilience {
        value: f - 1,
        breaking_pattern: pattern,
        diagnostic,
    })
}

fn check_local_degree(code: &FrCode, r: usize) -> Result<()> {
    if r == 0 || code.alpha() % r != 0 {
        return Err(Error::NotDivisible {
            what: "r",
            value: r,
            alpha: code.alpha(),
        });
    }
    Ok(())
}

/// Local structures of one node: up to the listing cap, plus the full count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeStructures {
    pub structures: Vec<LocalStructure>,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalStructures {
    pub r: usize,
    pub per_node: Vec<NodeStructures>,
}

impl LocalStructures {
    pub fn is_locally_recoverable(&self) -> bool {
        self.per_node.iter().all(|p| p.total > 0)
    }
}

/// Enumerates, for every node, the `r`-helper sets admitting an
/// `alpha / r`-recovery. At most `listing_cap` structures are kept per node.
pub fn find_local_structures(code: &FrCode, r: usize, listing_cap: usize) -> Result<LocalStructures> {
    check_local_degree(code, r)?;
    let beta = code.alpha() / r;
    let mut per_node = Vec::with_capacity(code.n());
    for node in 0..code.n() {
        let candidates: Vec<usize> = (0..code.n())
            .filter(|&j| j != node && code.intersection(node, j).len() >= beta)
            .collect();
        let mut entry = NodeStructures {
            structures: Vec::new(),
            total: 0,
        };
        for pick in Combinations::new(candidates.len(), r) {
            let helpers: Vec<usize> = pick.iter().map(|&p| candidates[p]).collect();
            let sets: Vec<&[usize]> = helpers.iter().map(|&h| code.node(h)).collect();
            if let Some(subsets) = split_target(code.node(node), &sets, beta) {
                entry.total += 1;
                if entry.structures.len() < listing_cap {
                    entry.structures.push(LocalStructure {
                        node_id: node,
                        assignment: helpers.iter().copied().zip(subsets).collect(),
                        helpers,
                    });
                }
            }
        }
        per_node.push(entry);
    }
    Ok(LocalStructures { r, per_node })
}
