//! Subset enumeration over storage nodes.
//!
//! Node contents are packed into fixed-width bitsets so that the union of a
//! chosen node set can be maintained incrementally along a depth-first walk
//! of the combinations in lexicographic order.

use crate::error::{Error, Result};

/// Default cap on the number of subsets a single exact enumeration may visit.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Upper limit on `C(n, k)` for any exact enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget(u64::MAX)
    }

    pub fn allows(&self, n: usize, k: usize) -> bool {
        binomial(n, k) <= self.0 as u128
    }

    pub fn check(&self, n: usize, k: usize) -> Result<()> {
        let subsets = binomial(n, k);
        if subsets > self.0 as u128 {
            return Err(Error::BudgetExceeded {
                subsets,
                budget: self.0,
            });
        }
        Ok(())
    }
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Lexicographic iterator over the `k`-subsets of `0..n`.
#[derive(Clone, Debug)]
pub struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Per-node symbol bitsets, `words` u64 words per node.
#[derive(Clone, Debug)]
pub struct NodeMasks {
    words: usize,
    bits: Vec<u64>,
    count: usize,
}

impl NodeMasks {
    pub fn new(theta: usize, nodes: &[Vec<usize>]) -> Self {
        let words = theta.div_ceil(64).max(1);
        let mut bits = vec![0u64; words * nodes.len()];
        for (i, node) in nodes.iter().enumerate() {
            for &s in node {
                bits[i * words + s / 64] |= 1 << (s % 64);
            }
        }
        NodeMasks {
            words,
            bits,
            count: nodes.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    fn node(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// Number of distinct symbols on the given nodes.
    pub fn union_count(&self, ids: impl IntoIterator<Item = usize>) -> usize {
        let mut acc = vec![0u64; self.words];
        for i in ids {
            for (a, b) in acc.iter_mut().zip(self.node(i)) {
                *a |= b;
            }
        }
        popcount(&acc)
    }

    /// Minimum union size over all `delta`-subsets of `candidates`, with the
    /// lexicographically first subset attaining it.
    pub fn min_union(&self, candidates: &[usize], delta: usize) -> (usize, Vec<usize>) {
        let mut walk = Walk::new(self, candidates, delta);
        let mut best = usize::MAX;
        let mut witness = Vec::new();
        walk.run(&mut |count, chosen| {
            if count < best {
                best = count;
                witness = chosen.to_vec();
            }
            // prune any branch that cannot strictly improve
            best
        });
        (best, witness)
    }

    /// First `delta`-subset (lexicographic) of `candidates` whose union has
    /// fewer than `limit` symbols.
    pub fn find_union_below(
        &self,
        candidates: &[usize],
        delta: usize,
        limit: usize,
    ) -> Option<Vec<usize>> {
        let mut walk = Walk::new(self, candidates, delta);
        walk.cutoff = limit;
        let mut found = None;
        walk.run(&mut |_, chosen| {
            found = Some(chosen.to_vec());
            0
        });
        found
    }
}

fn popcount(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

/// Depth-first walk over `delta`-subsets of the candidate list, pruning every
/// partial subset whose union already reaches the cutoff. The visitor sees
/// each surviving leaf and returns the new cutoff.
struct Walk<'a> {
    masks: &'a NodeMasks,
    candidates: &'a [usize],
    delta: usize,
    stack: Vec<u64>,
    chosen: Vec<usize>,
    cutoff: usize,
}

impl<'a> Walk<'a> {
    fn new(masks: &'a NodeMasks, candidates: &'a [usize], delta: usize) -> Self {
        Walk {
            masks,
            candidates,
            delta,
            stack: vec![0u64; masks.words * (delta + 1)],
            chosen: Vec::with_capacity(delta),
            cutoff: usize::MAX,
        }
    }

    fn run(&mut self, visit: &mut dyn FnMut(usize, &[usize]) -> usize) {
        if self.delta > self.candidates.len() {
            return;
        }
        if self.delta == 0 {
            if self.cutoff > 0 {
                visit(0, &[]);
            }
            return;
        }
        self.descend(0, 0, visit);
    }

    fn descend(
        &mut self,
        depth: usize,
        start: usize,
        visit: &mut dyn FnMut(usize, &[usize]) -> usize,
    ) {
        let w = self.masks.words;
        let remaining = self.delta - depth;
        let last = self.candidates.len() - remaining;
        for pos in start..=last {
            let node = self.candidates[pos];
            let (lower, upper) = self.stack.split_at_mut((depth + 1) * w);
            let parent = &lower[depth * w..];
            let child = &mut upper[..w];
            let mut count = 0;
            for ((c, p), m) in child.iter_mut().zip(parent).zip(self.masks.node(node)) {
                *c = p | m;
                count += c.count_ones() as usize;
            }
            if count >= self.cutoff {
                continue;
            }
            self.chosen.push(node);
            if remaining == 1 {
                self.cutoff = visit(count, &self.chosen);
            } else {
                self.descend(depth + 1, pos + 1, visit);
            }
            self.chosen.pop();
            if self.cutoff == 0 {
                return;
            }
        }
    }
}
