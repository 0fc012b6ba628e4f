//! Generating pairs (x, y) with x of order 2 and y of order 3, and whether
//! every such pair is carried to every other by an automorphism.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::permgrp::{
    alternating, cyclic, direct_product, hom_by_images, is_isomorphism, symmetric, PermError,
    Permutation, PermutationGroup,
};
use crate::quatalg::central_product_io;

pub const DEFAULT_PAIR_CAP: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenPairsError {
    #[error("group order {order} exceeds the cap {cap}")]
    CapExceeded { order: usize, cap: usize },
    #[error("the group has no generating (2,3)-pair")]
    NoPairs,
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// Element indices of a generating pair in the ambient group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GenPair {
    pub x: usize,
    pub y: usize,
}

impl GenPair {
    pub fn perms<'a>(&self, g: &'a PermutationGroup) -> (&'a Permutation, &'a Permutation) {
        (g.element(self.x), g.element(self.y))
    }
}

/// Element indices grouped by order 2 and order 3.
pub fn involutions_and_triples(g: &PermutationGroup) -> (Vec<usize>, Vec<usize>) {
    let mut twos = Vec::new();
    let mut threes = Vec::new();
    for (i, e) in g.elements().iter().enumerate() {
        match e.order() {
            2 => twos.push(i),
            3 => threes.push(i),
            _ => {}
        }
    }
    (twos, threes)
}

/// Whether the listed elements generate `g`. A subgroup with more than half
/// the elements is the whole group, so the walk stops there.
pub fn generates(g: &PermutationGroup, gens: &[usize]) -> bool {
    let n = g.order();
    if n == 1 {
        return true;
    }
    let cols: Vec<_> = gens.iter().map(|&s| g.column(s)).collect();
    let mut seen = vec![false; n];
    seen[g.identity_index()] = true;
    let mut stack = vec![g.identity_index()];
    let mut count = 1;
    while let Some(a) = stack.pop() {
        for c in &cols {
            let b = c[a] as usize;
            if !seen[b] {
                seen[b] = true;
                count += 1;
                if 2 * count > n {
                    return true;
                }
                stack.push(b);
            }
        }
    }
    false
}

#[cfg(feature = "parallel")]
fn par_flat_map<T: Send>(items: &[usize], f: impl Fn(usize) -> Vec<T> + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    items
        .par_iter()
        .map(|&i| f(i))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn par_flat_map<T: Send>(items: &[usize], f: impl Fn(usize) -> Vec<T> + Sync + Send) -> Vec<T> {
    items.iter().flat_map(|&i| f(i)).collect()
}

pub fn enumerate_23_pairs(g: &PermutationGroup) -> Result<Vec<GenPair>, GenPairsError> {
    enumerate_23_pairs_with_cap(g, DEFAULT_PAIR_CAP)
}

/// All generating pairs, ordered by `(y, x)` element index.
pub fn enumerate_23_pairs_with_cap(
    g: &PermutationGroup,
    cap: usize,
) -> Result<Vec<GenPair>, GenPairsError> {
    if g.order() > cap {
        return Err(GenPairsError::CapExceeded {
            order: g.order(),
            cap,
        });
    }
    let (twos, threes) = involutions_and_triples(g);
    Ok(par_flat_map(&threes, |y| {
        twos.iter()
            .filter(|&&x| generates(g, &[x, y]))
            .map(|&x| GenPair { x, y })
            .collect()
    }))
}

/// Number of involutions `z` with `<z, y> = G`.
pub fn count_partners(g: &PermutationGroup, y: usize) -> usize {
    let (twos, _) = involutions_and_triples(g);
    twos.iter().filter(|&&z| generates(g, &[z, y])).count()
}

/// Whether the map `x0 ↦ z, y0 ↦ w` is an automorphism for every pair.
pub fn all_pairs_equivalent(
    g: &Arc<PermutationGroup>,
    pairs: &[GenPair],
) -> Result<bool, GenPairsError> {
    let first = pairs.first().ok_or(GenPairsError::NoPairs)?;
    let (x0, y0) = first.perms(g);
    let src = [x0.clone(), y0.clone()];
    for p in pairs {
        let (z, w) = p.perms(g);
        match hom_by_images(g, &src, g, &[z.clone(), w.clone()])? {
            Some(h) if is_isomorphism(&h) => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Whether the pair `a` is carried to `b` by an automorphism.
pub fn pairs_equivalent(
    g: &Arc<PermutationGroup>,
    a: GenPair,
    b: GenPair,
) -> Result<bool, GenPairsError> {
    let (x, y) = a.perms(g);
    let (z, w) = b.perms(g);
    Ok(
        hom_by_images(g, &[x.clone(), y.clone()], g, &[z.clone(), w.clone()])?
            .is_some_and(|h| is_isomorphism(&h)),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lemma44Report {
    pub group: String,
    pub order: usize,
    pub involutions: usize,
    pub order_three: usize,
    pub pairs: usize,
    pub first_pair: Option<(String, String)>,
    /// Partner count of the order-3 half of the first pair.
    pub partners_of_first_y: usize,
    /// Sorted distinct partner counts over all admissible y.
    pub partner_counts: Vec<usize>,
    pub admissible_y: usize,
    pub all_equivalent: bool,
}

pub fn lemma44_report(
    name: &str,
    g: &Arc<PermutationGroup>,
) -> Result<Lemma44Report, GenPairsError> {
    let (twos, threes) = involutions_and_triples(g);
    let pairs = enumerate_23_pairs(g)?;
    let all_equivalent = all_pairs_equivalent(g, &pairs)?;
    let mut per_y: Vec<(usize, usize)> = Vec::new();
    for p in &pairs {
        match per_y.last_mut() {
            Some((y, n)) if *y == p.y => *n += 1,
            _ => per_y.push((p.y, 1)),
        }
    }
    let mut counts: Vec<usize> = per_y.iter().map(|&(_, n)| n).collect();
    counts.sort_unstable();
    counts.dedup();
    Ok(Lemma44Report {
        group: name.to_string(),
        order: g.order(),
        involutions: twos.len(),
        order_three: threes.len(),
        pairs: pairs.len(),
        first_pair: pairs.first().map(|p| {
            let (x, y) = p.perms(g);
            (x.to_string(), y.to_string())
        }),
        partners_of_first_y: per_y.first().map_or(0, |&(_, n)| n),
        partner_counts: counts,
        admissible_y: per_y.len(),
        all_equivalent,
    })
}

/// A5 on {1..5} times Z2 on {6,7}.
pub fn a5_z2() -> PermutationGroup {
    direct_product(&alternating(5), &cyclic(2)).expect("A5 x Z2")
}

/// A5 on {1..5} times S4 on {6..9}.
pub fn a5_s4() -> PermutationGroup {
    direct_product(&alternating(5), &symmetric(4)).expect("A5 x S4")
}

/// The central product of 2I and 2O on its 240 points.
pub fn ixo() -> PermutationGroup {
    central_product_io().perm_rep.clone()
}

pub fn named_group(name: &str) -> Option<PermutationGroup> {
    match name {
        "a5z2" => Some(a5_z2()),
        "a5s4" => Some(a5_s4()),
        "ixo" => Some(ixo()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, cycles: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(n, cycles).unwrap()
    }

    #[test]
    fn c6_pairs() {
        let c6 = cyclic(6);
        let pairs = enumerate_23_pairs(&c6).unwrap();
        assert_eq!(pairs.len(), 2);
        for y in pairs.iter().map(|q| q.y) {
            assert_eq!(count_partners(&c6, y), 1);
        }
    }

    #[test]
    fn s3_pairs() {
        let s3 = Arc::new(symmetric(3));
        let pairs = enumerate_23_pairs(&s3).unwrap();
        assert_eq!(pairs.len(), 6);
        assert_eq!(count_partners(&s3, pairs[0].y), 3);
        assert!(all_pairs_equivalent(&s3, &pairs).unwrap());
    }

    #[test]
    fn no_pairs_and_cap() {
        let c4 = Arc::new(cyclic(4));
        let pairs = enumerate_23_pairs(&c4).unwrap();
        assert!(pairs.is_empty());
        assert_eq!(
            all_pairs_equivalent(&c4, &pairs),
            Err(GenPairsError::NoPairs)
        );
        assert_eq!(
            enumerate_23_pairs_with_cap(&symmetric(4), 10).unwrap_err(),
            GenPairsError::CapExceeded { order: 24, cap: 10 }
        );
    }

    #[test]
    fn generation_shortcut_matches_full_closure() {
        let g = symmetric(4);
        let (twos, threes) = involutions_and_triples(&g);
        for &x in &twos {
            for &y in &threes {
                assert_eq!(generates(&g, &[x, y]), g.generated_order(&[x, y]) == 24);
            }
        }
    }

    #[test]
    fn a5z2_sample_pair_generates() {
        let g = a5_z2();
        let x = g.index_of(&p(7, &[&[1, 2], &[3, 4], &[6, 7]])).unwrap();
        let y = g.index_of(&p(7, &[&[1, 3, 5]])).unwrap();
        assert!(generates(&g, &[x, y]));
        let g = a5_s4();
        let x = g.index_of(&p(9, &[&[1, 2], &[3, 4], &[6, 9]])).unwrap();
        let y = g.index_of(&p(9, &[&[1, 3, 5], &[6, 7, 8]])).unwrap();
        assert!(generates(&g, &[x, y]));
    }

    #[test]
    fn a5z2_equivalence_is_transitive_on_samples() {
        let g = Arc::new(a5_z2());
        let pairs = enumerate_23_pairs(&g).unwrap();
        assert!(all_pairs_equivalent(&g, &pairs).unwrap());
        let step = (pairs.len() / 20).max(1);
        let sample: Vec<GenPair> = pairs.iter().step_by(step).take(20).copied().collect();
        for &a in &sample {
            for &b in &sample {
                assert!(pairs_equivalent(&g, a, b).unwrap());
            }
        }
    }
}
