//! Finite permutation groups by full element enumeration.
//!
//! Permutations act on the right: `p.compose(q)` applies `p` first, then `q`,
//! matching the evaluation order of words (`x*y` means "x, then y").
//!
//! A closed [`PermutationGroup`] stores every element in lexicographic order of
//! its image tuple, together with a *base*: a short list of points whose
//! images already determine an element. Products are then looked up through
//! base images alone, which keeps element-index arithmetic cheap even for
//! groups of large degree.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_integer::Integer;
use thiserror::Error;

use crate::words::{SubgroupSpec, Word};

/// Default cap on the number of elements a closure may produce.
pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("group closure exceeded {cap} elements")]
    ExplosionGuard { cap: usize },
    #[error("generator of degree {found} does not match group degree {expected}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("not a permutation: {0}")]
    InvalidPermutation(String),
    #[error("word refers to generator #{0} with no assigned image")]
    EvaluationError(usize),
    #[error("the given generators do not generate the source group")]
    NotGenerating,
    #[error("generator and image lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("element is not a member of the group")]
    NotMember,
}

/// A bijection of `{0, .., n-1}` stored as its image vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(PermError::InvalidPermutation(format!("{images:?}")));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from 1-based cycles, e.g. `&[&[1, 2], &[3, 4]]`.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self, PermError> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (k, &p) in cycle.iter().enumerate() {
                let q = cycle[(k + 1) % cycle.len()];
                if p == 0 || p > degree || q == 0 || q > degree || touched[p - 1] {
                    return Err(PermError::InvalidPermutation(format!("{cycles:?}")));
                }
                touched[p - 1] = true;
                images[p - 1] = (q - 1) as u32;
            }
        }
        Permutation::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    /// `self` then `other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: self
                .images
                .iter()
                .map(|&i| other.images[i as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    pub fn pow(&self, exponent: i64) -> Permutation {
        let base = if exponent < 0 {
            self.inverse()
        } else {
            self.clone()
        };
        let mut result = Permutation::identity(self.degree());
        let mut sq = base;
        let mut e = exponent.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result.compose(&sq);
            }
            sq = sq.compose(&sq);
            e >>= 1;
        }
        result
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// Disjoint cycles of length at least two, 0-based.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut p = self.apply(start);
            while p != start {
                seen[p] = true;
                cycle.push(p);
                p = self.apply(p);
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    /// Order of the permutation: the lcm of its cycle lengths.
    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .fold(1u64, |acc, c| acc.lcm(&(c.len() as u64)))
    }

    /// The same permutation on `shift + degree` points, moved up by `shift`.
    pub fn shifted(&self, shift: usize, total_degree: usize) -> Permutation {
        let mut images: Vec<u32> = (0..total_degree as u32).collect();
        for (i, &j) in self.images.iter().enumerate() {
            images[i + shift] = j + shift as u32;
        }
        Permutation { images }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            f.write_str("(")?;
            for (k, p) in c.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", p + 1)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Order of a permutation.
pub fn element_order(g: &Permutation) -> u64 {
    g.order()
}

/// Evaluates a word under a generator-to-permutation assignment.
pub fn evaluate_word(
    word: &Word,
    images: &[Permutation],
    degree: usize,
) -> Result<Permutation, PermError> {
    let mut inverses: Vec<Option<Permutation>> = vec![None; images.len()];
    let mut acc = Permutation::identity(degree);
    for letter in word.letters() {
        let g = images
            .get(letter.generator)
            .ok_or(PermError::EvaluationError(letter.generator))?;
        if g.degree() != degree {
            return Err(PermError::DegreeMismatch {
                expected: degree,
                found: g.degree(),
            });
        }
        if letter.inverse {
            let inv = inverses[letter.generator].get_or_insert_with(|| g.inverse());
            acc = acc.compose(inv);
        } else {
            acc = acc.compose(g);
        }
    }
    Ok(acc)
}

/// A finite permutation group with its complete, sorted element list.
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
    base: Vec<usize>,
    index: HashMap<Vec<u32>, u32>,
    identity: usize,
    columns: RwLock<HashMap<usize, Arc<[u32]>>>,
}

impl fmt::Debug for PermutationGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermutationGroup")
            .field("degree", &self.degree)
            .field("order", &self.elements.len())
            .field("generators", &self.generators)
            .finish()
    }
}

impl Clone for PermutationGroup {
    fn clone(&self) -> Self {
        PermutationGroup {
            degree: self.degree,
            generators: self.generators.clone(),
            elements: self.elements.clone(),
            base: self.base.clone(),
            index: self.index.clone(),
            identity: self.identity,
            columns: RwLock::new(HashMap::new()),
        }
    }
}

impl PermutationGroup {
    /// Breadth-first closure of `gens` with the default element cap.
    pub fn closure(degree: usize, gens: Vec<Permutation>) -> Result<Self, PermError> {
        Self::closure_with_cap(degree, gens, DEFAULT_CLOSURE_CAP)
    }

    pub fn closure_with_cap(
        degree: usize,
        gens: Vec<Permutation>,
        cap: usize,
    ) -> Result<Self, PermError> {
        for g in &gens {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch {
                    expected: degree,
                    found: g.degree(),
                });
            }
        }
        let id = Permutation::identity(degree);
        let mut seen: HashSet<Permutation> = HashSet::new();
        let mut elements = vec![id.clone()];
        seen.insert(id);
        let mut head = 0;
        while head < elements.len() {
            let current = elements[head].clone();
            head += 1;
            for g in &gens {
                let next = current.compose(g);
                if !seen.contains(&next) {
                    if elements.len() >= cap {
                        return Err(PermError::ExplosionGuard { cap });
                    }
                    seen.insert(next.clone());
                    elements.push(next);
                }
            }
        }
        Ok(Self::from_closed_elements(degree, gens, elements))
    }

    fn from_closed_elements(
        degree: usize,
        generators: Vec<Permutation>,
        mut elements: Vec<Permutation>,
    ) -> Self {
        elements.sort();
        let base = compute_base(degree, &elements);
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (base_images(e, &base), i as u32))
            .collect();
        let identity = elements
            .iter()
            .position(Permutation::is_identity)
            .expect("closure contains the identity");
        PermutationGroup {
            degree,
            generators,
            elements,
            base,
            index,
            identity,
            columns: RwLock::new(HashMap::new()),
        }
    }

    pub fn trivial(degree: usize) -> Self {
        Self::from_closed_elements(degree, Vec::new(), vec![Permutation::identity(degree)])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Permutation {
        &self.elements[i]
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    pub fn base(&self) -> &[usize] {
        &self.base
    }

    /// Index of `g` in the element list, if `g` belongs to the group.
    pub fn index_of(&self, g: &Permutation) -> Option<usize> {
        if g.degree() != self.degree {
            return None;
        }
        let i = *self.index.get(&base_images(g, &self.base))? as usize;
        (self.elements[i] == *g).then_some(i)
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.index_of(g).is_some()
    }

    /// Index of `elements[i] * elements[j]`.
    pub fn mul_idx(&self, i: usize, j: usize) -> usize {
        let (a, b) = (&self.elements[i], &self.elements[j]);
        let key: Vec<u32> = self.base.iter().map(|&p| b.images[a.apply(p)]).collect();
        self.index[&key] as usize
    }

    pub fn inv_idx(&self, i: usize) -> usize {
        let a = &self.elements[i];
        let inv = a.inverse();
        self.index[&base_images(&inv, &self.base)] as usize
    }

    /// Right-multiplication table of element `j`: entry `i` is the index of
    /// `elements[i] * elements[j]`. Cached per element.
    pub fn column(&self, j: usize) -> Arc<[u32]> {
        if let Some(c) = self.columns.read().expect("column cache").get(&j) {
            return Arc::clone(c);
        }
        let b = &self.elements[j];
        let col: Arc<[u32]> = self
            .elements
            .iter()
            .map(|a| {
                let key: Vec<u32> = self.base.iter().map(|&p| b.images[a.apply(p)]).collect();
                self.index[&key]
            })
            .collect();
        self.columns
            .write()
            .expect("column cache")
            .insert(j, Arc::clone(&col));
        col
    }

    /// Order of the subgroup generated by the given element indices.
    pub fn generated_order(&self, gens: &[usize]) -> usize {
        self.generated_indices(gens).len()
    }

    /// Element indices of the subgroup generated by `gens`.
    pub fn generated_indices(&self, gens: &[usize]) -> Vec<usize> {
        let cols: Vec<Arc<[u32]>> = gens.iter().map(|&g| self.column(g)).collect();
        let mut seen = vec![false; self.order()];
        let mut out = vec![self.identity];
        seen[self.identity] = true;
        let mut head = 0;
        while head < out.len() {
            let cur = out[head];
            head += 1;
            for c in &cols {
                let nxt = c[cur] as usize;
                if !seen[nxt] {
                    seen[nxt] = true;
                    out.push(nxt);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// The subgroup generated by `gens`, as its own closed group.
    pub fn subgroup_generated(&self, gens: &[Permutation]) -> Result<PermutationGroup, PermError> {
        let idx = gens
            .iter()
            .map(|g| self.index_of(g).ok_or(PermError::NotMember))
            .collect::<Result<Vec<_>, _>>()?;
        let elements = self
            .generated_indices(&idx)
            .into_iter()
            .map(|i| self.elements[i].clone())
            .collect();
        Ok(Self::from_closed_elements(
            self.degree,
            gens.to_vec(),
            elements,
        ))
    }

    /// True when every element of `other` lies in `self`.
    pub fn is_subgroup_of(&self, other: &PermutationGroup) -> bool {
        self.degree == other.degree && self.generators_or_elements().all(|g| other.contains(g))
    }

    fn generators_or_elements(&self) -> Box<dyn Iterator<Item = &Permutation> + '_> {
        if self.generators.is_empty() {
            Box::new(self.elements.iter())
        } else {
            Box::new(self.generators.iter())
        }
    }

    /// Element indices, in `self`, of the members of a subgroup.
    pub fn indices_of_subgroup(&self, sub: &PermutationGroup) -> Result<Vec<usize>, PermError> {
        sub.elements
            .iter()
            .map(|e| self.index_of(e).ok_or(PermError::NotMember))
            .collect()
    }
}

fn base_images(g: &Permutation, base: &[usize]) -> Vec<u32> {
    base.iter().map(|&p| g.images[p]).collect()
}

/// Greedy base: add points until base images separate all elements.
fn compute_base(degree: usize, elements: &[Permutation]) -> Vec<usize> {
    let n = elements.len();
    if n <= 1 {
        return Vec::new();
    }
    let mut class = vec![0u32; n];
    let mut n_classes = 1usize;
    let mut base = Vec::new();
    for p in 0..degree {
        let mut relabel: HashMap<(u32, u32), u32> = HashMap::new();
        let new_class: Vec<u32> = (0..n)
            .map(|i| {
                let key = (class[i], elements[i].images[p]);
                let next = relabel.len() as u32;
                *relabel.entry(key).or_insert(next)
            })
            .collect();
        if relabel.len() > n_classes {
            n_classes = relabel.len();
            class = new_class;
            base.push(p);
            if n_classes == n {
                break;
            }
        }
    }
    base
}

/// Closure of `gens` (free function form).
pub fn closure(degree: usize, gens: Vec<Permutation>) -> Result<PermutationGroup, PermError> {
    PermutationGroup::closure(degree, gens)
}

/// Subgroup of `group` generated by the images of `words`, where generator
/// `i` of the words is sent to `word_images[i]`.
pub fn subgroup(
    group: &PermutationGroup,
    words: &SubgroupSpec,
    word_images: &[Permutation],
) -> Result<PermutationGroup, PermError> {
    let gens = words
        .generator_words
        .iter()
        .map(|w| evaluate_word(w, word_images, group.degree()))
        .collect::<Result<Vec<_>, _>>()?;
    group.subgroup_generated(&gens)
}

/// A homomorphism defined by generator images, verified well defined.
#[derive(Debug, Clone)]
pub struct GroupHom {
    pub source: Arc<PermutationGroup>,
    pub target: Arc<PermutationGroup>,
    pub generators: Vec<Permutation>,
    pub generator_images: Vec<Permutation>,
    pub pair_group_order: usize,
    /// `mapping[i]` is the target index of source element `i`.
    pub mapping: Vec<usize>,
    pub image_order: usize,
}

impl GroupHom {
    pub fn is_injective(&self) -> bool {
        self.image_order == self.source.order()
    }

    pub fn is_surjective(&self) -> bool {
        self.image_order == self.target.order()
    }

    pub fn image(&self, g: &Permutation) -> Option<&Permutation> {
        let i = self.source.index_of(g)?;
        Some(self.target.element(self.mapping[i]))
    }
}

/// Walks the pair group generated by `(gens_i, imgs_i)` in `G × H`.
///
/// Returns the induced map on `G` if the pair group projects injectively onto
/// `G` (so `|P| = |G|`), otherwise `None` together with a lower bound on
/// `|P|` exceeding `|G|`.
fn pair_walk(
    g: &PermutationGroup,
    gens: &[usize],
    h: &PermutationGroup,
    imgs: &[usize],
) -> Result<Vec<usize>, usize> {
    let gcols: Vec<Arc<[u32]>> = gens.iter().map(|&i| g.column(i)).collect();
    let hcols: Vec<Arc<[u32]>> = imgs.iter().map(|&i| h.column(i)).collect();
    const UNSET: usize = usize::MAX;
    let mut map = vec![UNSET; g.order()];
    map[g.identity_index()] = h.identity_index();
    let mut queue = VecDeque::from([g.identity_index()]);
    let mut visited = 1usize;
    while let Some(a) = queue.pop_front() {
        let b = map[a];
        for (gc, hc) in gcols.iter().zip(&hcols) {
            let (na, nb) = (gc[a] as usize, hc[b] as usize);
            if map[na] == UNSET {
                map[na] = nb;
                visited += 1;
                queue.push_back(na);
            } else if map[na] != nb {
                return Err(visited + 1);
            }
        }
    }
    Ok(map)
}

/// Order of the pair group `<(gens_i, imgs_i)> ≤ G × H`, computed in full.
pub fn pair_group_order(
    g: &PermutationGroup,
    gens: &[Permutation],
    h: &PermutationGroup,
    imgs: &[Permutation],
) -> Result<usize, PermError> {
    let gi = member_indices(g, gens)?;
    let hi = member_indices(h, imgs)?;
    let gcols: Vec<Arc<[u32]>> = gi.iter().map(|&i| g.column(i)).collect();
    let hcols: Vec<Arc<[u32]>> = hi.iter().map(|&i| h.column(i)).collect();
    let start = (g.identity_index() as u32, h.identity_index() as u32);
    let mut seen: HashSet<(u32, u32)> = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((a, b)) = queue.pop_front() {
        for (gc, hc) in gcols.iter().zip(&hcols) {
            let next = (gc[a as usize], hc[b as usize]);
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    Ok(seen.len())
}

fn member_indices(
    group: &PermutationGroup,
    elems: &[Permutation],
) -> Result<Vec<usize>, PermError> {
    elems
        .iter()
        .map(|e| group.index_of(e).ok_or(PermError::NotMember))
        .collect()
}

/// Homomorphism by generator images via the pair-group criterion.
///
/// `Ok(None)` means the assignment does not extend to a homomorphism.
pub fn hom_by_images(
    g: &Arc<PermutationGroup>,
    gens: &[Permutation],
    h: &Arc<PermutationGroup>,
    imgs: &[Permutation],
) -> Result<Option<GroupHom>, PermError> {
    if gens.len() != imgs.len() {
        return Err(PermError::LengthMismatch(gens.len(), imgs.len()));
    }
    let gi = member_indices(g, gens)?;
    let hi = member_indices(h, imgs)?;
    if g.generated_order(&gi) != g.order() {
        return Err(PermError::NotGenerating);
    }
    match pair_walk(g, &gi, h, &hi) {
        Ok(mapping) => {
            let image_order = h.generated_order(&hi);
            Ok(Some(GroupHom {
                source: Arc::clone(g),
                target: Arc::clone(h),
                generators: gens.to_vec(),
                generator_images: imgs.to_vec(),
                pair_group_order: g.order(),
                mapping,
                image_order,
            }))
        }
        Err(_) => Ok(None),
    }
}

/// Bijective homomorphism check: the pair group, source and target all have
/// the same order and the images generate the target.
pub fn is_isomorphism(h: &GroupHom) -> bool {
    h.source.order() == h.target.order()
        && h.pair_group_order == h.source.order()
        && h.image_order == h.target.order()
}

/// Direct product acting on disjoint point sets: `a` on the first
/// `a.degree()` points, `b` on the following ones.
pub fn direct_product(
    a: &PermutationGroup,
    b: &PermutationGroup,
) -> Result<PermutationGroup, PermError> {
    let n = a.degree() + b.degree();
    let gens = a
        .generators()
        .iter()
        .map(|g| g.shifted(0, n))
        .chain(b.generators().iter().map(|g| g.shifted(a.degree(), n)))
        .collect();
    PermutationGroup::closure(n, gens)
}

pub fn cyclic(n: usize) -> PermutationGroup {
    let images: Vec<u32> = (0..n as u32).map(|i| (i + 1) % n as u32).collect();
    let gens = if n > 1 {
        vec![Permutation::from_images(images).expect("cycle")]
    } else {
        Vec::new()
    };
    PermutationGroup::closure(n.max(1), gens).expect("cyclic group")
}

pub fn symmetric(n: usize) -> PermutationGroup {
    let mut gens = Vec::new();
    if n >= 2 {
        gens.push(Permutation::from_cycles(n, &[&[1, 2]]).expect("transposition"));
        let cycle: Vec<usize> = (1..=n).collect();
        gens.push(Permutation::from_cycles(n, &[&cycle]).expect("n-cycle"));
    }
    PermutationGroup::closure(n.max(1), gens).expect("symmetric group")
}

pub fn alternating(n: usize) -> PermutationGroup {
    let gens = (3..=n)
        .map(|k| Permutation::from_cycles(n, &[&[1, 2, k]]).expect("3-cycle"))
        .collect();
    PermutationGroup::closure(n.max(1), gens).expect("alternating group")
}
