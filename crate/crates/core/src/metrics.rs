//! Exact coverage and distance metrics, computed by subset enumeration.

use num_rational::Ratio;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::code::FrCode;
use crate::error::{Error, Result};
use crate::subsets::{binomial, Budget};

/// Number of distinct symbols stored on the given nodes.
pub fn coverage(code: &FrCode, node_ids: &[usize]) -> Result<usize> {
    for &i in node_ids {
        code.check_index(i)?;
    }
    Ok(code.masks().union_count(node_ids.iter().copied()))
}

/// `a(delta)` together with the lexicographically first node set attaining it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinCoverage {
    pub delta: usize,
    pub value: usize,
    pub witness: Vec<usize>,
}

fn check_delta(code: &FrCode, delta: usize) -> Result<()> {
    if delta == 0 || delta > code.n() {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} outside 1..={}",
            code.n()
        )));
    }
    Ok(())
}

/// Minimum number of symbols covered by any `delta` nodes.
pub fn min_coverage(code: &FrCode, delta: usize, budget: Budget) -> Result<MinCoverage> {
    check_delta(code, delta)?;
    budget.check(code.n(), delta)?;
    let all: Vec<usize> = (0..code.n()).collect();
    let (value, witness) = code.masks().min_union(&all, delta);
    Ok(MinCoverage {
        delta,
        value,
        witness,
    })
}

/// Bracket on `a(delta)` for instances too large to enumerate: the lower end
/// comes from the pairwise-intersection bound, the upper end is the best of
/// `samples` random node sets. Always reported as approximate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ApproxCoverage {
    pub delta: usize,
    pub lower: usize,
    pub upper: usize,
    pub approximate: bool,
}

pub fn approx_min_coverage(code: &FrCode, delta: usize, samples: usize, seed: u64) -> Result<ApproxCoverage> {
    check_delta(code, delta)?;
    let n = code.n();
    let beta_int = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| code.intersection(i, j).len())
        .max()
        .unwrap_or(0);
    let lower = crate::bounds::corradi_bound(delta, code.alpha(), beta_int)
        .max(code.alpha())
        .min(code.theta());
    let masks = code.masks();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let upper = (0..samples.max(1))
        .map(|_| masks.union_count(sample(&mut rng, n, delta).into_iter()))
        .min()
        .unwrap();
    Ok(ApproxCoverage {
        delta,
        lower,
        upper,
        approximate: true,
    })
}

/// The largest file size every `k`-subset of nodes can reconstruct: `a(k)`.
pub fn max_file_size(code: &FrCode, k: usize, budget: Budget) -> Result<usize> {
    Ok(min_coverage(code, k, budget)?.value)
}

/// Exact minimum distance for file size `m`, with the largest node set that
/// still covers fewer than `m` symbols.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinDistance {
    pub file_size: usize,
    pub d_min: usize,
    pub max_deficient: Vec<usize>,
}

/// `d_min = n - max{|S| : H(S) < m}`. With an MDS outer code the file
/// survives exactly when the surviving nodes cover at least `m` symbols.
pub fn exact_min_distance(code: &FrCode, file_size: usize, budget: Budget) -> Result<MinDistance> {
    check_file_size(code, file_size)?;
    let n = code.n();
    let masks = code.masks();
    let all: Vec<usize> = (0..n).collect();
    // any set of fewer than m / alpha nodes is deficient
    let trivially = (file_size - 1) / code.alpha();
    let mut best: Vec<usize> = (0..trivially).collect();
    for size in trivially + 1..=n {
        budget.check(n, size)?;
        match masks.find_union_below(&all, size, file_size) {
            Some(w) => best = w,
            None => break,
        }
    }
    Ok(MinDistance {
        file_size,
        d_min: n - best.len(),
        max_deficient: best,
    })
}

fn check_file_size(code: &FrCode, file_size: usize) -> Result<()> {
    if file_size > code.theta() {
        return Err(Error::FileTooLarge {
            file_size,
            theta: code.theta(),
        });
    }
    if file_size == 0 {
        return Err(Error::InvalidParameter("file size must be positive".into()));
    }
    Ok(())
}

/// Exact code rate `m / (n·alpha)`.
pub fn code_rate(code: &FrCode, file_size: usize) -> Ratio<u64> {
    Ratio::new(file_size as u64, (code.n() * code.alpha()) as u64)
}

/// One row of the `a(delta)` table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProfileEntry {
    pub delta: usize,
    pub exact: Option<usize>,
    /// `(lower, upper)` when the exact value was over budget.
    pub approx: Option<(usize, usize)>,
}

/// `a(1), ..., a(n)`, exact within the budget and otherwise bracketed when
/// `approx_samples > 0` (or left empty).
pub fn coverage_profile(code: &FrCode, budget: Budget, approx_samples: usize, seed: u64) -> Result<Vec<ProfileEntry>> {
    (1..=code.n())
        .map(|delta| {
            if budget.allows(code.n(), delta) {
                let v = min_coverage(code, delta, budget)?.value;
                Ok(ProfileEntry {
                    delta,
                    exact: Some(v),
                    approx: None,
                })
            } else if approx_samples > 0 {
                let a = approx_min_coverage(code, delta, approx_samples, seed)?;
                Ok(ProfileEntry {
                    delta,
                    exact: None,
                    approx: Some((a.lower, a.upper)),
                })
            } else {
                Ok(ProfileEntry {
                    delta,
                    exact: None,
                    approx: None,
                })
            }
        })
        .collect()
}

/// `a(0), ..., a(n)` of a code with several symbol-disjoint components,
/// from the components' own tables: a knapsack over how many nodes each
/// component contributes. Exact because components share no symbols. Each
/// entry carries a witness node set.
pub fn coverage_table_by_parts(code: &FrCode, budget: Budget) -> Result<Vec<(usize, Vec<usize>)>> {
    let parts = code.components();
    let masks = code.masks();
    // best[j] = (symbols, nodes) minimising coverage with j nodes so far
    let mut best: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new())];
    for part in &parts {
        let mut table = vec![(0usize, Vec::new())];
        for size in 1..=part.len() {
            budget.check(part.len(), size)?;
            table.push(masks.min_union(part, size));
        }
        let mut next: Vec<Option<(usize, Vec<usize>)>> = vec![None; best.len() + part.len()];
        for (j, (b, bw)) in best.iter().enumerate() {
            for (c, (t, tw)) in table.iter().enumerate() {
                let v = b + t;
                if next[j + c].as_ref().is_none_or(|(cur, _)| v < *cur) {
                    let mut w = bw.clone();
                    w.extend(tw);
                    next[j + c] = Some((v, w));
                }
            }
        }
        best = next.into_iter().map(|x| x.expect("every size reachable")).collect();
    }
    for (_, w) in &mut best {
        w.sort_unstable();
    }
    Ok(best)
}

/// `a(delta)` through [`coverage_table_by_parts`].
pub fn min_coverage_by_parts(code: &FrCode, delta: usize, budget: Budget) -> Result<usize> {
    check_delta(code, delta)?;
    Ok(coverage_table_by_parts(code, budget)?[delta].0)
}

/// Exact minimum distance from the component tables: the largest deficient
/// set has the largest `delta` with `a(delta) < m`, since `a` is monotone.
pub fn min_distance_by_parts(code: &FrCode, file_size: usize, budget: Budget) -> Result<MinDistance> {
    check_file_size(code, file_size)?;
    let table = coverage_table_by_parts(code, budget)?;
    let (delta, (_, witness)) = table
        .into_iter()
        .enumerate()
        .rev()
        .find(|(_, (v, _))| *v < file_size)
        .expect("a(0) = 0 is below any positive file size");
    Ok(MinDistance {
        file_size,
        d_min: code.n() - delta,
        max_deficient: witness,
    })
}

/// Exact minimum distance, by components when the code splits into
/// several, by direct enumeration otherwise.
pub fn min_distance(code: &FrCode, file_size: usize, budget: Budget) -> Result<MinDistance> {
    if code.components().len() > 1 {
        min_distance_by_parts(code, file_size, budget)
    } else {
        exact_min_distance(code, file_size, budget)
    }
}

/// Total subsets an exact `a(delta)` enumeration would visit.
pub fn enumeration_size(code: &FrCode, delta: usize) -> u128 {
    binomial(code.n(), delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{disjoint_union, from_graph, projective_plane, Graph};

    #[test]
    fn fano_coverages() {
        let c = projective_plane(2).unwrap();
        let b = Budget::default();
        for i in 0..7 {
            for j in i + 1..7 {
                assert_eq!(coverage(&c, &[i, j]).unwrap(), 5);
            }
        }
        assert_eq!(coverage(&c, &[]).unwrap(), 0);
        assert!(coverage(&c, &[7]).is_err());
        assert_eq!(min_coverage(&c, 1, b).unwrap().value, 3);
        assert_eq!(min_coverage(&c, 4, b).unwrap().value, 6);
        assert_eq!(min_coverage(&c, 5, b).unwrap().value, 7);
        assert_eq!(max_file_size(&c, 7, b).unwrap(), 7);
    }

    #[test]
    fn petersen_metrics() {
        let c = from_graph(&Graph::petersen()).unwrap();
        let b = Budget::default();
        assert_eq!(coverage(&c, &[0, 1, 2, 3, 4]).unwrap(), 10);
        assert_eq!(max_file_size(&c, 5, b).unwrap(), 10);
        let d = exact_min_distance(&c, 10, b).unwrap();
        assert_eq!(d.d_min, 6);
        assert_eq!(d.max_deficient.len(), 4);
        assert_eq!(coverage(&c, &d.max_deficient).unwrap(), 9);
        assert_eq!(code_rate(&c, 10), Ratio::new(1, 3));
    }

    #[test]
    fn min_distance_edges() {
        let c = projective_plane(2).unwrap();
        let b = Budget::default();
        assert_eq!(exact_min_distance(&c, 1, b).unwrap().d_min, 7);
        assert!(matches!(
            exact_min_distance(&c, 8, b),
            Err(Error::FileTooLarge { .. })
        ));
    }

    #[test]
    fn rate_of_full_file_is_one() {
        let c = projective_plane(2).unwrap();
        assert_eq!(code_rate(&c, 21), Ratio::from_integer(1));
        let u = disjoint_union(&c, 4).unwrap();
        assert_eq!(code_rate(&u, 17), Ratio::new(17, 84));
    }

    #[test]
    fn by_parts_matches_direct() {
        let u = disjoint_union(&projective_plane(2).unwrap(), 3).unwrap();
        let b = Budget::default();
        for delta in 1..=21 {
            assert_eq!(
                min_coverage_by_parts(&u, delta, b).unwrap(),
                min_coverage(&u, delta, b).unwrap().value,
                "delta {delta}"
            );
        }
        for m in 1..=21 {
            let direct = exact_min_distance(&u, m, b).unwrap();
            let parts = min_distance_by_parts(&u, m, b).unwrap();
            assert_eq!(direct.d_min, parts.d_min, "m {m}");
            assert!(coverage(&u, &parts.max_deficient).unwrap() < m);
            assert_eq!(parts.max_deficient.len(), 21 - parts.d_min);
        }
    }

    #[test]
    fn approx_brackets_exact() {
        let c = from_graph(&Graph::heawood()).unwrap();
        for delta in 1..=14 {
            let exact = min_coverage(&c, delta, Budget::default()).unwrap().value;
            let a = approx_min_coverage(&c, delta, 200, 7).unwrap();
            assert!(a.lower <= exact && exact <= a.upper, "delta {delta}");
            assert!(a.approximate);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let c = disjoint_union(&projective_plane(2).unwrap(), 4).unwrap();
        assert!(matches!(
            min_coverage(&c, 14, Budget(1000)),
            Err(Error::BudgetExceeded { .. })
        ));
        let p = coverage_profile(&c, Budget(1000), 0, 0).unwrap();
        assert_eq!(p[0].exact, Some(3));
        assert_eq!(p[13].exact, None);
    }
}
