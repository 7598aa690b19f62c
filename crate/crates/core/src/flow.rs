//! Degree-constrained bipartite assignment.
//!
//! Each target symbol must be supplied by exactly one helper, and helper `h`
//! may supply at most `caps[h]` symbols. This is a unit-capacity max-flow
//! (source → symbol → helper → sink) solved by augmenting paths.

/// Assigns every symbol to one of its admissible helpers without exceeding
/// capacities. `options[s]` lists the helpers able to supply symbol `s`.
/// Returns `assigned[s] = helper`, or `None` when no full assignment exists.
pub fn assign(options: &[Vec<usize>], caps: &[usize]) -> Option<Vec<usize>> {
    let mut load: Vec<Vec<usize>> = vec![Vec::new(); caps.len()];
    let mut assigned = vec![usize::MAX; options.len()];
    for s in 0..options.len() {
        let mut visited = vec![false; caps.len()];
        if !augment(s, options, caps, &mut load, &mut assigned, &mut visited) {
            return None;
        }
    }
    Some(assigned)
}

fn augment(
    s: usize,
    options: &[Vec<usize>],
    caps: &[usize],
    load: &mut [Vec<usize>],
    assigned: &mut [usize],
    visited: &mut [bool],
) -> bool {
    for &h in &options[s] {
        if visited[h] {
            continue;
        }
        visited[h] = true;
        if load[h].len() < caps[h] {
            load[h].push(s);
            assigned[s] = h;
            return true;
        }
        // try to push one of h's current symbols elsewhere
        for idx in 0..load[h].len() {
            let other = load[h][idx];
            if augment(other, options, caps, load, assigned, visited) {
                load[h][idx] = s;
                assigned[s] = h;
                return true;
            }
        }
    }
    false
}
