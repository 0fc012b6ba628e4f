//! Todd–Coxeter coset enumeration (HLT with immediate coincidence handling).

use std::collections::VecDeque;

use thiserror::Error;

use crate::permgrp::{PermError, Permutation, PermutationGroup};
use crate::words::{Presentation, SubgroupSpec, Word};

/// Fallback definition budget when no order is known in advance.
pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CosetError {
    #[error("coset enumeration did not close within {limit} coset definitions")]
    BudgetExceeded { limit: usize },
    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),
    #[error("subgroup is not trivial; the coset action is not the regular representation")]
    NotRegular,
    #[error("coset table failed the closure check: {0}")]
    NotClosed(String),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// Budget of coset definitions: 100 times the expected order, if known.
pub fn default_budget(expected_order: Option<usize>) -> usize {
    expected_order.map_or(DEFAULT_BUDGET, |n| n.saturating_mul(100).max(1))
}

/// A completed coset table in permutation form. Coset 0 is the subgroup.
#[derive(Debug, Clone)]
pub struct CosetTable {
    pub n_cosets: usize,
    /// One permutation of the cosets per generator.
    pub action: Vec<Permutation>,
    pub subgroup: SubgroupSpec,
    /// Total coset definitions made, including those later merged away.
    pub definitions: usize,
}

impl CosetTable {
    /// Coset reached from `coset` by reading `word`.
    pub fn trace(&self, coset: usize, word: &Word) -> usize {
        word.letters().iter().fold(coset, |c, l| {
            let p = &self.action[l.generator];
            if l.inverse {
                p.images()
                    .iter()
                    .position(|&j| j as usize == c)
                    .expect("bijection")
            } else {
                p.apply(c)
            }
        })
    }
}

const UNDEF: u32 = u32::MAX;

struct Enumerator {
    cols: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    queue: VecDeque<usize>,
    limit: usize,
}

impl Enumerator {
    fn new(cols: usize, limit: usize) -> Self {
        Enumerator {
            cols,
            table: vec![UNDEF; cols],
            parent: vec![0],
            queue: VecDeque::new(),
            limit,
        }
    }

    fn n(&self) -> usize {
        self.parent.len()
    }

    #[inline]
    fn get(&self, c: usize, col: usize) -> u32 {
        self.table[c * self.cols + col]
    }

    #[inline]
    fn set(&mut self, c: usize, col: usize, v: u32) {
        self.table[c * self.cols + col] = v;
    }

    fn alive(&self, c: usize) -> bool {
        self.parent[c] as usize == c
    }

    fn define(&mut self, c: usize, col: usize) -> Result<(), CosetError> {
        if self.n() >= self.limit {
            return Err(CosetError::BudgetExceeded { limit: self.limit });
        }
        let d = self.n();
        self.parent.push(d as u32);
        self.table.extend(std::iter::repeat_n(UNDEF, self.cols));
        self.set(c, col, d as u32);
        self.set(d, col ^ 1, c as u32);
        Ok(())
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut root = c;
        while self.parent[root] as usize != root {
            root = self.parent[root] as usize;
        }
        let mut k = c;
        while self.parent[k] as usize != root {
            let next = self.parent[k] as usize;
            self.parent[k] = root as u32;
            k = next;
        }
        root
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.rep(a), self.rep(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo as u32;
            self.queue.push_back(hi);
        }
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.merge(a, b);
        while let Some(g) = self.queue.pop_front() {
            for col in 0..self.cols {
                let d = self.get(g, col);
                if d == UNDEF {
                    continue;
                }
                let d = d as usize;
                self.set(d, col ^ 1, UNDEF);
                let mu = self.rep(g);
                let nu = self.rep(d);
                let mu_x = self.get(mu, col);
                let nu_xi = self.get(nu, col ^ 1);
                if mu_x != UNDEF {
                    self.merge(nu, mu_x as usize);
                } else if nu_xi != UNDEF {
                    self.merge(mu, nu_xi as usize);
                } else {
                    self.set(mu, col, nu as u32);
                    self.set(nu, col ^ 1, mu as u32);
                }
            }
        }
    }

    /// HLT scan of `word` from coset `c`, defining cosets to complete it.
    fn scan_and_fill(&mut self, c: usize, word: &[usize]) -> Result<(), CosetError> {
        if word.is_empty() {
            return Ok(());
        }
        let mut f = c;
        let mut b = c;
        let mut i: isize = 0;
        let mut j: isize = word.len() as isize - 1;
        loop {
            while i <= j && self.get(f, word[i as usize]) != UNDEF {
                f = self.get(f, word[i as usize]) as usize;
                i += 1;
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i && self.get(b, word[j as usize] ^ 1) != UNDEF {
                b = self.get(b, word[j as usize] ^ 1) as usize;
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            } else if i == j {
                let col = word[i as usize];
                self.set(f, col, b as u32);
                self.set(b, col ^ 1, f as u32);
                return Ok(());
            } else {
                self.define(f, word[i as usize])?;
            }
        }
    }
}

fn columns(word: &Word) -> Vec<usize> {
    word.letters().iter().map(|l| l.column()).collect()
}

/// Enumerates the cosets of `sub` in the group presented by `pres`.
///
/// `limit` bounds the total number of coset definitions.
pub fn enumerate(
    pres: &Presentation,
    sub: &SubgroupSpec,
    limit: usize,
) -> Result<CosetTable, CosetError> {
    let ngens = pres.num_generators();
    for w in &sub.generator_words {
        if let Some(g) = w.max_generator() {
            if g >= ngens {
                return Err(CosetError::InvalidSubgroup(format!(
                    "word uses generator #{g} but the presentation has {ngens}"
                )));
            }
        }
    }
    if limit == 0 {
        return Err(CosetError::BudgetExceeded { limit });
    }

    let cols = 2 * ngens;
    let relators: Vec<Vec<usize>> = pres.relators().iter().map(columns).collect();
    let mut e = Enumerator::new(cols, limit);

    for w in &sub.generator_words {
        e.scan_and_fill(0, &columns(w))?;
    }
    let mut c = 0;
    while c < e.n() {
        if e.alive(c) {
            for r in &relators {
                e.scan_and_fill(c, r)?;
                if !e.alive(c) {
                    break;
                }
            }
            if e.alive(c) {
                for col in 0..cols {
                    if e.get(c, col) == UNDEF {
                        e.define(c, col)?;
                    }
                }
            }
        }
        c += 1;
    }

    // Renumber the surviving cosets contiguously, keeping definition order.
    let live: Vec<usize> = (0..e.n()).filter(|&c| e.alive(c)).collect();
    let mut renum = vec![u32::MAX; e.n()];
    for (k, &c) in live.iter().enumerate() {
        renum[c] = k as u32;
    }
    let mut action = Vec::with_capacity(ngens);
    for g in 0..ngens {
        let images: Vec<u32> = live
            .iter()
            .map(|&c| {
                let t = e.get(c, 2 * g);
                debug_assert_ne!(t, UNDEF);
                renum[e.rep(t as usize)]
            })
            .collect();
        action.push(Permutation::from_images(images)?);
    }

    let table = CosetTable {
        n_cosets: live.len(),
        action,
        subgroup: sub.clone(),
        definitions: e.n(),
    };
    verify_closed(&table, pres)?;
    Ok(table)
}

/// Post-hoc closure test: every relator closes from every coset and every
/// subgroup generator fixes coset 0.
pub fn verify_closed(table: &CosetTable, pres: &Presentation) -> Result<(), CosetError> {
    let inverses: Vec<Permutation> = table.action.iter().map(Permutation::inverse).collect();
    let trace = |c: usize, w: &Word| {
        w.letters().iter().fold(c, |c, l| {
            if l.inverse {
                inverses[l.generator].apply(c)
            } else {
                table.action[l.generator].apply(c)
            }
        })
    };
    for r in pres.relators() {
        for c in 0..table.n_cosets {
            if trace(c, r) != c {
                return Err(CosetError::NotClosed(format!(
                    "relator {} moves coset {}",
                    r.display(pres.generators()),
                    c + 1
                )));
            }
        }
    }
    for w in &table.subgroup.generator_words {
        if trace(0, w) != 0 {
            return Err(CosetError::NotClosed(format!(
                "subgroup generator {} moves the subgroup coset",
                w.display(pres.generators())
            )));
        }
    }
    Ok(())
}

/// The permutation group generated by the coset action of a trivial subgroup.
pub fn regular_representation(t: &CosetTable) -> Result<PermutationGroup, CosetError> {
    if !t.subgroup.is_trivially_trivial() {
        return Err(CosetError::NotRegular);
    }
    let g = PermutationGroup::closure(t.n_cosets, t.action.clone())?;
    if g.order() != t.n_cosets {
        return Err(CosetError::NotRegular);
    }
    Ok(g)
}

/// Order of the presented group (enumeration over the trivial subgroup).
pub fn group_order(pres: &Presentation, limit: usize) -> Result<usize, CosetError> {
    Ok(enumerate(pres, &SubgroupSpec::trivial(), limit)?.n_cosets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgrp::evaluate_word;
    use crate::words::parse_presentation;

    fn pres(text: &str) -> Presentation {
        parse_presentation(text).unwrap()
    }

    #[test]
    fn cyclic_three() {
        let p = pres("generators: x\nrelators: x^3");
        let t = enumerate(&p, &SubgroupSpec::trivial(), 100).unwrap();
        assert_eq!(t.n_cosets, 3);
        assert_eq!(regular_representation(&t).unwrap().order(), 3);
    }

    #[test]
    fn dihedral_and_symmetric() {
        let d5 = pres("generators: a, b\nrelators: a^5, b^2, (a*b)^2");
        assert_eq!(group_order(&d5, 10_000).unwrap(), 10);
        let s4 = pres("generators: a, b\nrelators: a^2, b^3, (a*b)^4");
        assert_eq!(group_order(&s4, 10_000).unwrap(), 24);
        let a5 = pres("generators: a, b\nrelators: a^2, b^3, (a*b)^5");
        assert_eq!(group_order(&a5, 10_000).unwrap(), 60);
    }

    #[test]
    fn trivial_group_and_index_one() {
        let p = pres("generators: x, y\nrelators: x, y");
        assert_eq!(group_order(&p, 10).unwrap(), 1);
        let s3 = pres("generators: a, b\nrelators: a^2, b^3, (a*b)^2");
        let sub = SubgroupSpec::parse("a; b", &s3).unwrap();
        assert_eq!(enumerate(&s3, &sub, 1000).unwrap().n_cosets, 1);
    }

    #[test]
    fn infinite_group_exceeds_budget() {
        let z2 = pres("generators: x, y\nrelators: x*y*x^-1*y^-1");
        assert_eq!(
            group_order(&z2, 500).unwrap_err(),
            CosetError::BudgetExceeded { limit: 500 }
        );
    }

    #[test]
    fn invalid_subgroup_word() {
        let p = pres("generators: x\nrelators: x^3");
        let sub = SubgroupSpec::new(vec![Word::generator(4)]);
        assert!(matches!(
            enumerate(&p, &sub, 100),
            Err(CosetError::InvalidSubgroup(_))
        ));
    }

    #[test]
    fn nontrivial_subgroup_is_not_regular() {
        let s3 = pres("generators: a, b\nrelators: a^2, b^3, (a*b)^2");
        let sub = SubgroupSpec::parse("a", &s3).unwrap();
        let t = enumerate(&s3, &sub, 1000).unwrap();
        assert_eq!(t.n_cosets, 3);
        assert_eq!(
            regular_representation(&t).unwrap_err(),
            CosetError::NotRegular
        );
    }

    #[test]
    fn lagrange_consistency() {
        let a5 = pres("generators: a, b\nrelators: a^2, b^3, (a*b)^5");
        let reg = enumerate(&a5, &SubgroupSpec::trivial(), 10_000).unwrap();
        let g = regular_representation(&reg).unwrap();
        for spec in ["a", "b", "a*b", "a; b*a*b^-1", "b; a*b*a*b^-1*a"] {
            let sub = SubgroupSpec::parse(spec, &a5).unwrap();
            let idx = enumerate(&a5, &sub, 10_000).unwrap().n_cosets;
            let h = crate::permgrp::subgroup(&g, &sub, &reg.action).unwrap();
            assert_eq!(idx * h.order(), 60, "subgroup {spec}");
        }
    }

    #[test]
    fn generators_satisfy_relators() {
        let s4 = pres("generators: a, b\nrelators: a^2, b^3, (a*b)^4");
        let t = enumerate(&s4, &SubgroupSpec::trivial(), 10_000).unwrap();
        for r in s4.relators() {
            assert!(evaluate_word(r, &t.action, t.n_cosets)
                .unwrap()
                .is_identity());
        }
    }

    #[test]
    fn enumeration_is_deterministic() {
        let a5 = pres("generators: a, b\nrelators: a^2, b^3, (a*b)^5");
        let t1 = enumerate(&a5, &SubgroupSpec::trivial(), 10_000).unwrap();
        let t2 = enumerate(&a5, &SubgroupSpec::trivial(), 10_000).unwrap();
        assert_eq!(t1.action, t2.action);
        assert_eq!(t1.definitions, t2.definitions);
    }
}
