//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use frcode::constructions::{affine_resolvable, from_graph, projective_plane, Graph};
use frcode::field::FieldSpec;
use frcode::mds::MdsCode;
use frcode::FrCode;

pub fn small_codes() -> Vec<FrCode> {
    vec![
        projective_plane(2).unwrap(),
        from_graph(&Graph::complete(4)).unwrap(),
        from_graph(&Graph::complete(5)).unwrap(),
        from_graph(&Graph::complete_bipartite(3, 3)).unwrap(),
        from_graph(&Graph::cycle(5).unwrap()).unwrap(),
        from_graph(&Graph::cycle(8).unwrap()).unwrap(),
        affine_resolvable(2, 2, 3).unwrap(),
        affine_resolvable(2, 3, 4).unwrap(),
    ]
}

pub fn subsets_of(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let n = items.len();
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| items[i]).collect())
        .collect()
}

/// Tries every way of handing each target symbol to a helper holding it.
pub fn brute_recoverable(code: &FrCode, target: &[usize], helpers: &[usize], beta: usize) -> bool {
    fn go(code: &FrCode, target: &[usize], helpers: &[usize], load: &mut Vec<usize>, beta: usize) -> bool {
        let Some((&s, rest)) = target.split_first() else {
            return load.iter().all(|&l| l == beta);
        };
        for (h, &node) in helpers.iter().enumerate() {
            if load[h] < beta && code.node(node).contains(&s) {
                load[h] += 1;
                if go(code, rest, helpers, load, beta) {
                    return true;
                }
                load[h] -= 1;
            }
        }
        false
    }
    go(code, target, helpers, &mut vec![0; helpers.len()], beta)
}

// GF(16) with modulus x^4 + x + 1, written out independently of the library.
fn gf16_mul(mut a: u8, mut b: u8) -> u8 {
    let mut acc = 0u8;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & 0x10 != 0 {
            a ^= 0x13;
        }
    }
    acc
}

fn gf16_inv(a: u8) -> u8 {
    (1..16).find(|&b| gf16_mul(a, b) == 1).unwrap()
}

/// Rank of a matrix over GF(16) by Gaussian elimination.
fn gf16_rank(mut rows: Vec<Vec<u8>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = gf16_inv(rows[rank][c]);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let f = gf16_mul(rows[r][c], inv);
                for k in 0..cols {
                    let v = gf16_mul(f, rows[rank][k]);
                    rows[r][k] ^= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Distance check for every `(theta, m)` with `theta <= 8` over GF(16):
/// every `m` positions form an information set, and for `m <= 4` the
/// minimum weight over all nonzero messages is exactly `theta - m + 1`.
/// Returns the number of `(theta, m)` pairs checked.
pub fn check_gf16_distance() -> usize {
    let mut pairs = 0;
    for theta in 1..=8 {
        for m in 1..=theta {
            let code = MdsCode::new(FieldSpec::Gf16, m, theta).unwrap();
            // generator columns: images of the unit messages
            let gen: Vec<Vec<u8>> = (0..m)
                .map(|i| {
                    let mut e = vec![0u8; m];
                    e[i] = 1;
                    code.encode_symbols(&e).unwrap()
                })
                .collect();
            let positions: Vec<usize> = (0..theta).collect();
            // every m positions form an information set, so no nonzero
            // codeword has m zeros: distance >= theta - m + 1
            for pick in subsets_of(&positions, m) {
                let sub: Vec<Vec<u8>> = gen.iter().map(|row| pick.iter().map(|&p| row[p]).collect()).collect();
                assert_eq!(gf16_rank(sub), m, "theta={theta} m={m} {pick:?}");
            }
            // full enumeration where it is cheap, confirming equality
            if m <= 4 {
                let mut min_weight = usize::MAX;
                for idx in 1..16usize.pow(m as u32) {
                    let msg: Vec<u8> = (0..m).map(|i| (idx >> (4 * i) & 0xF) as u8).collect();
                    let w = code.encode_symbols(&msg).unwrap().iter().filter(|&&x| x != 0).count();
                    min_weight = min_weight.min(w);
                }
                assert_eq!(min_weight, theta - m + 1, "theta={theta} m={m}");
            }
            pairs += 1;
        }
    }
    pairs
}
