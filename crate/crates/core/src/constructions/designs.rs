//! Finite-geometry designs over GF(q).

use crate::code::FrCode;
use crate::error::{Error, Result};
use crate::field::Field;

/// All vectors of `F_q^dim` in lexicographic order of their element codes,
/// first coordinate most significant.
fn vectors(q: usize, dim: usize) -> Vec<Vec<u8>> {
    let total = q.pow(dim as u32);
    (0..total)
        .map(|mut idx| {
            let mut v = vec![0u8; dim];
            for slot in v.iter_mut().rev() {
                *slot = (idx % q) as u8;
                idx /= q;
            }
            v
        })
        .collect()
}

/// Nonzero vectors whose leftmost nonzero coordinate is 1: one representative
/// per 1-dimensional subspace.
fn normalized(q: usize, dim: usize) -> Vec<Vec<u8>> {
    vectors(q, dim)
        .into_iter()
        .filter(|v| v.iter().find(|&&x| x != 0) == Some(&1))
        .collect()
}

fn dot(f: &Field, a: &[u8], b: &[u8]) -> u8 {
    a.iter()
        .zip(b)
        .fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// Projective plane of order `q`: symbols are the points of PG(2, q), nodes
/// are its lines. Gives `n = theta = q^2 + q + 1` and `alpha = rho = q + 1`.
pub fn projective_plane(q: usize) -> Result<FrCode> {
    let f = Field::with_order(q)?;
    let points = normalized(q, 3);
    // lines are indexed by their normal vectors, which have the same shape
    let nodes = points
        .iter()
        .map(|normal| {
            points
                .iter()
                .enumerate()
                .filter(|(_, p)| dot(&f, normal, p) == 0)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    FrCode::from_nodes(format!("projective-plane(q={q})"), points.len(), nodes)
}

/// Affine resolvable design AG(m, q) restricted to `classes` parallel classes.
///
/// Symbols are the `q^m` points; each parallel class is the `q` cosets of one
/// hyperplane `{x : a·x = c}`, and the first `classes` normalized directions
/// `a` are used. Parameters are `(q·classes, q^m, q^(m-1), classes)`.
pub fn affine_resolvable(q: usize, m: usize, classes: usize) -> Result<FrCode> {
    let f = Field::with_order(q)?;
    if m < 2 {
        return Err(Error::InvalidParameter(format!("dimension m = {m} must be >= 2")));
    }
    let max_classes = (q.pow(m as u32) - 1) / (q - 1);
    if classes == 0 || classes > max_classes {
        return Err(Error::InvalidParameter(format!(
            "classes = {classes} outside 1..={max_classes}"
        )));
    }
    let points = vectors(q, m);
    let mut nodes = Vec::with_capacity(q * classes);
    for dir in normalized(q, m).into_iter().take(classes) {
        for c in f.elements() {
            nodes.push(
                points
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| dot(&f, &dir, x) == c)
                    .map(|(i, _)| i)
                    .collect(),
            );
        }
    }
    FrCode::from_nodes(
        format!("affine(q={q},m={m},classes={classes})"),
        points.len(),
        nodes,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(c: &FrCode) -> (usize, usize, usize, usize) {
        (c.n(), c.theta(), c.alpha(), c.rho())
    }

    #[test]
    fn fano_and_order_three() {
        assert_eq!(params(&projective_plane(2).unwrap()), (7, 7, 3, 3));
        assert_eq!(params(&projective_plane(3).unwrap()), (13, 13, 4, 4));
        assert_eq!(params(&projective_plane(4).unwrap()), (21, 21, 5, 5));
        assert!(matches!(projective_plane(6), Err(Error::NotPrimePower(6))));
    }

    #[test]
    fn plane_incidences() {
        for q in [2, 3, 4, 5] {
            let c = projective_plane(q).unwrap();
            for i in 0..c.n() {
                for j in i + 1..c.n() {
                    assert_eq!(c.intersection(i, j).len(), 1);
                }
            }
            for a in 0..c.theta() {
                for b in a + 1..c.theta() {
                    let common = c
                        .nodes()
                        .iter()
                        .filter(|v| v.contains(&a) && v.contains(&b))
                        .count();
                    assert_eq!(common, 1);
                }
            }
        }
    }

    #[test]
    fn affine_parameters() {
        assert_eq!(params(&affine_resolvable(2, 3, 4).unwrap()), (8, 8, 4, 4));
        assert_eq!(params(&affine_resolvable(2, 2, 3).unwrap()), (6, 4, 2, 3));
        assert_eq!(params(&affine_resolvable(3, 2, 3).unwrap()), (9, 9, 3, 3));
        assert!(affine_resolvable(2, 2, 4).is_err());
        assert!(affine_resolvable(6, 2, 1).is_err());
    }

    #[test]
    fn affine_classes_partition_and_meet_evenly() {
        for (q, m) in [(2usize, 3u32), (3, 2), (2, 4), (3, 3)] {
            let classes = (q.pow(m) - 1) / (q - 1);
            let c = affine_resolvable(q, m as usize, classes).unwrap();
            for class in 0..classes {
                let mut all: Vec<usize> = (0..q).flat_map(|b| c.node(class * q + b).to_vec()).collect();
                all.sort_unstable();
                assert_eq!(all, (0..c.theta()).collect::<Vec<_>>());
            }
            for i in 0..c.n() {
                for j in 0..c.n() {
                    if i / q != j / q {
                        assert_eq!(c.intersection(i, j).len(), q.pow(m - 2));
                    }
                }
            }
        }
    }
}
