//! Acceptance suite: one PASS/FAIL line per criterion. Every numeric check
//! is an exact integer comparison (tolerance 0) unless stated otherwise.

mod common;

use std::collections::HashMap;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use frcode::bounds::{
    check_construction2_condition, full_report, greedy_distance_bound, local_fr_bound, locality_singleton_bound,
    mincor_bound,
};
use frcode::code::DssParams;
use frcode::constructions::{
    affine_resolvable, disjoint_union, from_graph, projective_plane, structural_params, Graph,
};
use frcode::field::FieldSpec;
use frcode::mds::{MdsCode, ShareContainer};
use frcode::metrics::{coverage, exact_min_distance, min_coverage, min_distance, min_distance_by_parts};
use frcode::recovery::{failure_resilience, is_recoverable, local_failure_resilience};
use frcode::sim::{ClusterState, RepairMode, RepairPolicy};
use frcode::subsets::Combinations;
use frcode::{Budget, Error, FrCode};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn eq<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    ensure(got == want, format!("{what}: got {got:?}, want {want:?}"))
}

fn err(e: Error) -> String {
    e.to_string()
}

fn params(c: &FrCode) -> (usize, usize, usize, usize) {
    (c.n(), c.theta(), c.alpha(), c.rho())
}

fn petersen_reproduction() -> Check {
    let c = from_graph(&Graph::petersen()).map_err(err)?;
    let b = Budget::default();
    eq("(n, theta, alpha, rho)", params(&c), (10, 15, 3, 2))?;
    for k in 1..=5 {
        let a = min_coverage(&c, k, b).map_err(err)?.value;
        ensure(a >= 2 * k, format!("a({k}) = {a} < {}", 2 * k))?;
    }
    eq("a(5)", min_coverage(&c, 5, b).map_err(err)?.value, 10)?;
    eq("locality bound", locality_singleton_bound(10, 10, 3, 3), 6)?;
    eq("d_min(M=10)", exact_min_distance(&c, 10, b).map_err(err)?.d_min, 6)?;
    Ok("(10,15,3,2), a(5)=10, bound 6 = d_min 6".into())
}

fn girth_sweep() -> Check {
    let graphs = [
        ("petersen", Graph::petersen(), 3, 5),
        ("heawood", Graph::heawood(), 3, 6),
        ("K4", Graph::complete(4), 3, 3),
    ];
    let mut subsets = 0u64;
    let mut violations = 0u64;
    for (name, g, s, girth) in graphs {
        eq(&format!("{name} degree"), g.regular_degree().map_err(err)?, s)?;
        eq(&format!("{name} girth"), g.girth(), Some(girth))?;
        let c = from_graph(&g).map_err(err)?;
        let masks = c.masks();
        for k in 1..=girth.min(c.n()) {
            for ids in Combinations::new(c.n(), k) {
                subsets += 1;
                if masks.union_count(ids) < k * (s - 1) {
                    violations += 1;
                }
            }
        }
    }
    eq("violations", violations, 0)?;
    Ok(format!("{subsets} subsets checked, 0 violations"))
}

fn fano_union() -> FrCode {
    disjoint_union(&projective_plane(2).unwrap(), 4).unwrap()
}

fn fano_union_reproduction() -> Check {
    let c = fano_union();
    let b = Budget::default();
    eq("(n, theta, alpha, rho)", params(&c), (28, 28, 3, 3))?;
    eq("a(15)", min_coverage(&c, 15, b).map_err(err)?.value, 17)?;
    let direct = exact_min_distance(&c, 17, b).map_err(err)?.d_min;
    eq("d_min(M=17) direct", direct, 14)?;
    eq("d_min(M=17) by parts", min_distance_by_parts(&c, 17, b).map_err(err)?.d_min, 14)?;
    eq("mincor", mincor_bound(28, 3, 3, 7, 4, 17).map_err(err)?, 14)?;
    let greedy = greedy_distance_bound(&c, 17, c.local_codes().unwrap()).map_err(err)?;
    eq("greedy", greedy.bound, 14)?;
    eq("rho_loc(r=3)", local_failure_resilience(&c, 3, b).map_err(err)?.value, 2)?;
    let fr_local = local_fr_bound(28, 7, 7, 3, 3, 17).map_err(err)?;
    eq("fr-local branches", (fr_local.branch1, fr_local.branch2), (14, 16))?;
    Ok("(28,28,3,3), a(15)=17, d_min=mincor=greedy=14, rho_loc=2, branches (14,16)".into())
}

fn structural() -> Check {
    let b = Budget::default();
    let fano = projective_plane(2).map_err(err)?;
    let sp = structural_params(&fano, b).map_err(err)?;
    eq("Fano (delta, beta_int)", (sp.delta, sp.beta_int), (4, 1))?;
    let aff = affine_resolvable(2, 3, 4).map_err(err)?;
    eq("affine params", params(&aff), (8, 8, 4, 4))?;
    let sa = structural_params(&aff, b).map_err(err)?;
    eq("affine (delta, beta_int)", (sa.delta, sa.beta_int), (4, 2))?;
    eq("Fano condition", check_construction2_condition(7, 3, 3, sp.delta, sp.beta_int), true)?;
    eq("affine condition", check_construction2_condition(8, 4, 4, sa.delta, sa.beta_int), true)?;
    eq("AG(2,3) condition", check_construction2_condition(9, 3, 3, 6, 1), false)?;
    Ok("Fano (4,1), affine (8,8,4,4) with (4,2), conditions true/true/false".into())
}

fn construction2_optimality() -> Check {
    let b = Budget::default();
    let fano = projective_plane(2).map_err(err)?;
    let c = fano_union();
    // per-plane table: a_loc(j) over all j-subsets of lines
    let local: Vec<usize> = (0..=7)
        .map(|j| {
            if j == 0 {
                0
            } else {
                Combinations::new(7, j).map(|ids| fano.masks().union_count(ids)).min().unwrap()
            }
        })
        .collect();
    let mut notes = Vec::new();
    for t in [1usize, 2] {
        let size = 7 * t + 1;
        let need = 7 * t + 3;
        // complete stratification by how many lines come from each plane
        let mut strat_min = usize::MAX;
        let mut strata = 0;
        for c0 in 0..=7usize {
            for c1 in 0..=7usize {
                for c2 in 0..=7usize {
                    let used = c0 + c1 + c2;
                    if used > size || size - used > 7 {
                        continue;
                    }
                    let c3 = size - used;
                    strata += 1;
                    strat_min = strat_min.min(local[c0] + local[c1] + local[c2] + local[c3]);
                }
            }
        }
        ensure(strat_min >= need, format!("t={t}: stratified min {strat_min} < {need}"))?;
        // and over every subset directly when the count fits the budget
        if b.allows(28, size) {
            let direct = min_coverage(&c, size, b).map_err(err)?.value;
            eq(&format!("t={t}: direct vs stratified"), direct, strat_min)?;
            notes.push(format!("t={t}: min {direct} >= {need} ({strata} strata + all subsets)"));
        } else {
            notes.push(format!("t={t}: min {strat_min} >= {need} ({strata} strata)"));
        }
    }
    let aff = disjoint_union(&affine_resolvable(2, 3, 4).map_err(err)?, 2).map_err(err)?;
    let d = exact_min_distance(&aff, 12, b).map_err(err)?.d_min;
    let bound = mincor_bound(16, 4, 4, 8, 2, 12).map_err(err)?;
    eq("affine-union d_min", d, 8)?;
    eq("affine-union mincor", bound, 8)?;
    notes.push("affine union M=12: d_min = mincor = 8".into());
    Ok(notes.join("; "))
}

fn suite_bases() -> Vec<FrCode> {
    vec![
        from_graph(&Graph::petersen()).unwrap(),
        from_graph(&Graph::heawood()).unwrap(),
        from_graph(&Graph::complete(4)).unwrap(),
        from_graph(&Graph::complete(5)).unwrap(),
        from_graph(&Graph::complete_bipartite(3, 3)).unwrap(),
        from_graph(&Graph::complete_bipartite(4, 4)).unwrap(),
        from_graph(&Graph::cycle(5).unwrap()).unwrap(),
        projective_plane(2).unwrap(),
        projective_plane(3).unwrap(),
        affine_resolvable(2, 2, 2).unwrap(),
        affine_resolvable(2, 2, 3).unwrap(),
        affine_resolvable(2, 3, 4).unwrap(),
        affine_resolvable(2, 3, 7).unwrap(),
    ]
}

fn suite(max_l: usize) -> Vec<FrCode> {
    let mut out = Vec::new();
    for base in suite_bases() {
        for l in 2..=max_l {
            out.push(disjoint_union(&base, l).unwrap());
        }
        out.push(base);
    }
    out
}

fn divisors(a: usize) -> Vec<usize> {
    (1..=a).filter(|d| a % d == 0).collect()
}

fn bound_soundness() -> Check {
    let b = Budget::default();
    let (mut instances, mut bound_values, mut greedy_runs) = (0, 0, 0);
    for code in suite(4) {
        for m in 1..=code.theta() {
            let exact = min_distance(&code, m, b).map_err(err)?.d_min as i64;
            for r in divisors(code.alpha()) {
                let rep = full_report(&code, m, r, None, b).map_err(err)?;
                eq(&format!("{} M={m}: exact", code.name()), rep.exact_d_min.map(|d| d as i64), Some(exact))?;
                for (name, v) in rep.values() {
                    bound_values += 1;
                    ensure(
                        exact <= v,
                        format!("{} M={m} r={r}: d_min {exact} > {name} {v}", code.name()),
                    )?;
                }
                instances += 1;
            }
            // greedy over the component partition, also for single codes
            let parts = code.components();
            let g = greedy_distance_bound(&code, m, &parts).map_err(err)?;
            ensure(g.covered < m, format!("{} M={m}: greedy set covers {}", code.name(), g.covered))?;
            ensure(exact <= g.bound as i64, format!("{} M={m}: greedy {} < {exact}", code.name(), g.bound))?;
            greedy_runs += 1;
        }
    }
    Ok(format!(
        "{instances} (code, M, r) instances, {bound_values} bound values, {greedy_runs} greedy runs, 0 violations"
    ))
}

fn recoverability_oracle() -> Check {
    let mut checked = 0u64;
    for code in common::small_codes() {
        ensure(code.n() <= 8, format!("{} has n > 8", code.name()))?;
        let symbols: Vec<usize> = (0..code.theta()).collect();
        let nodes: Vec<usize> = (0..code.n()).collect();
        for size in 1..=6.min(code.theta()) {
            for target in common::subsets_of(&symbols, size) {
                for beta in divisors(size) {
                    for helpers in common::subsets_of(&nodes, size / beta) {
                        let flow = is_recoverable(&code, &target, &helpers, beta).map_err(err)?.is_some();
                        let brute = common::brute_recoverable(&code, &target, &helpers, beta);
                        ensure(
                            flow == brute,
                            format!("{} target {target:?} helpers {helpers:?}: flow {flow}, brute {brute}", code.name()),
                        )?;
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} (target, helpers, beta) cases, 0 disagreements"))
}

fn resilience_chain() -> Check {
    let b = Budget::default();
    let mut combos = 0;
    for code in suite(2) {
        let alpha = code.alpha();
        let mut res = HashMap::new();
        for d in divisors(alpha) {
            res.insert(d, failure_resilience(&code, d, alpha / d, b).map_err(err)?.value);
        }
        let mut loc = HashMap::new();
        for r in divisors(alpha) {
            loc.insert(r, local_failure_resilience(&code, r, b).map_err(err)?.value);
        }
        for m in 1..=code.theta() {
            let d_min = min_distance(&code, m, b).map_err(err)?.d_min;
            for d in divisors(alpha) {
                for r in divisors(alpha).into_iter().filter(|&r| r <= d) {
                    let (rr, rl) = (res[&d], loc[&r]);
                    ensure(
                        d_min >= rr && rr >= rl + 1,
                        format!("{} M={m} d={d} r={r}: d_min {d_min}, rho_res {rr}, rho_loc {rl}", code.name()),
                    )?;
                    combos += 1;
                }
            }
        }
    }
    Ok(format!("{combos} (code, M, d, r) combinations, 0 violations"))
}

fn mds_codec() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let trials = 1000;
    for (m, theta) in [(7, 10), (10, 15), (17, 28)] {
        let code = MdsCode::new(FieldSpec::Gf256, m, theta).map_err(err)?;
        for trial in 0..trials {
            let width = rng.random_range(1..=32);
            let data: Vec<Vec<u8>> = (0..m)
                .map(|_| (0..width).map(|_| rng.random()).collect())
                .collect();
            let cw = code.encode(&data).map_err(err)?;
            let keep = sample(&mut rng, theta, m).into_vec();
            let received: Vec<(usize, &[u8])> = keep.iter().map(|&p| (p, cw.symbols[p].as_slice())).collect();
            let back = code.decode(&received).map_err(err)?;
            ensure(back == data, format!("({m},{theta}) trial {trial}: round trip differs"))?;
        }
    }
    let pairs = common::check_gf16_distance();
    Ok(format!(
        "{trials} round trips per (M, theta) in {{(7,10),(10,15),(17,28)}}; distance theta-M+1 for {pairs} GF(16) pairs"
    ))
}

fn sample_file(len: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    (0..len).map(|_| rng.random()).collect()
}

fn simulator() -> Check {
    let code = fano_union();
    let bytes = sample_file(17 * 48 - 11);
    let container = ShareContainer::encode_file(&bytes, FieldSpec::Gf256, 17, 28, 48).map_err(err)?;
    let params = DssParams::new(&code, 15, 3, 3, 17).map_err(err)?;
    let fresh = ClusterState::build(&code, &container, params).map_err(err)?;

    // (a) single and double failures inside one plane
    let mut patterns: Vec<Vec<usize>> = Vec::new();
    for plane in 0..4 {
        let lines: Vec<usize> = (7 * plane..7 * plane + 7).collect();
        patterns.extend(lines.iter().map(|&v| vec![v]));
        patterns.extend(common::subsets_of(&lines, 2));
    }
    let mut repairs = 0;
    for failed in &patterns {
        let mut c = fresh.clone();
        c.fail(failed).map_err(err)?;
        for (node, outcome) in c.repair_all(RepairPolicy::LocalFirst) {
            let log = outcome.map_err(|e| format!("{failed:?}: node {node}: {e}"))?;
            eq(&format!("{failed:?} node {node} mode"), log.mode, RepairMode::Local)?;
            eq(&format!("{failed:?} node {node} moved"), log.symbols_moved, 3)?;
            ensure(log.per_helper.iter().all(|s| s.len() == 1), "per-helper count != 1")?;
            eq(&format!("{failed:?} node {node} payload"), c.payload(node), fresh.payload(node))?;
            repairs += 1;
        }
        ensure(c.check_invariants(), format!("{failed:?}: invariants broken"))?;
    }

    // (b) every 15-node read; a read only depends on which positions it
    // covers, so each distinct coverage set is decoded once
    let masks: Vec<u32> = code
        .nodes()
        .iter()
        .map(|v| v.iter().fold(0u32, |acc, &s| acc | 1 << s))
        .collect();
    let mut classes: HashMap<u32, Vec<usize>> = HashMap::new();
    let mut queries = 0u64;
    for ids in Combinations::new(28, 15) {
        let cover = ids.iter().fold(0u32, |acc, &i| acc | masks[i]);
        queries += 1;
        classes.entry(cover).or_insert(ids);
    }
    let mut reader = fresh.clone();
    for (cover, ids) in &classes {
        ensure(cover.count_ones() >= 17, format!("{ids:?} covers {}", cover.count_ones()))?;
        let out = reader.collect(ids).map_err(|e| format!("{ids:?}: {e}"))?;
        ensure(out == bytes, format!("{ids:?}: file differs"))?;
    }

    // (c) Petersen, global repair d=3, beta=1, all double failures
    let pet = from_graph(&Graph::petersen()).map_err(err)?;
    let pbytes = sample_file(10 * 32);
    let pc = ShareContainer::encode_file(&pbytes, FieldSpec::Gf256, 10, 15, 32).map_err(err)?;
    let pfresh = ClusterState::build(&pet, &pc, DssParams::new(&pet, 5, 3, 3, 10).map_err(err)?).map_err(err)?;
    let mut unrepairable = Vec::new();
    for pair in Combinations::new(10, 2) {
        let mut c = pfresh.clone();
        c.fail(&pair).map_err(err)?;
        let ok = pair.iter().all(|&v| c.repair_global(v, 3, 1).is_ok());
        if !ok {
            unrepairable.push(pair);
        }
    }
    let sharing: Vec<Vec<usize>> = Combinations::new(10, 2)
        .filter(|p| coverage(&pet, p).unwrap() < 6)
        .collect();
    eq("unrepairable pairs", &unrepairable, &sharing)?;
    eq("unrepairable count", unrepairable.len(), 15)?;
    Ok(format!(
        "{} patterns / {repairs} local repairs at 3 symbols; {queries} reads over {} coverage classes; 15 unrepairable Petersen pairs",
        patterns.len(),
        classes.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("Petersen reproduction", petersen_reproduction),
        ("girth-coverage sweep", girth_sweep),
        ("Fano-union reproduction", fano_union_reproduction),
        ("structural parameters", structural),
        ("union optimality", construction2_optimality),
        ("bound soundness", bound_soundness),
        ("recoverability oracle", recoverability_oracle),
        ("resilience chain", resilience_chain),
        ("MDS codec", mds_codec),
        ("simulator end-to-end", simulator),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &id.to_string() || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail} [{secs:.1}s]"),
            Err(why) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {why} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
