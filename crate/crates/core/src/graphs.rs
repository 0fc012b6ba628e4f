//! Multigraphs, the invariant set (degree histogram, E, D, girth), degree-2
//! smoothing and subdivision, isomorphism testing, and named families.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default isomorphism search budget.
pub const DEFAULT_ISO_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({0}, {1}) refers to a vertex outside 0..{2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("parameter out of range: {0}")]
    DomainError(String),
    #[error("cannot parse graph: {0}")]
    Parse(String),
}

/// Undirected multigraph; loops and parallel edges allowed. Edges are stored
/// as `(u, v)` with `u <= v`, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Multigraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Multigraph {
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut out = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange(u, v, n));
            }
            out.push((u.min(v), u.max(v)));
        }
        out.sort_unstable();
        Ok(Multigraph { n, edges: out })
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Degrees, with a loop contributing two.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    /// Incidence lists: `(neighbour, edge index)`. A loop appears twice.
    pub fn incidence(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let adj = self.incidence();
        bfs(&adj, 0).iter().all(|&d| d != usize::MAX)
    }

    /// Image of the graph under a vertex relabelling `perm[old] = new`.
    pub fn relabel(&self, perm: &[usize]) -> Multigraph {
        Multigraph::new(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
            .expect("relabelling stays in range")
    }

    pub fn to_doc(&self) -> GraphDoc {
        GraphDoc {
            vertices: VertexField::Count(self.n),
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
            labels: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let doc: GraphDoc =
            serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        doc.to_graph()
    }
}

/// Graph JSON: `{"vertices": n | [{"id": ..}, ..], "edges": [[u, v], ..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: VertexField,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexField {
    Count(usize),
    List(Vec<VertexEntry>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexEntry {
    pub id: usize,
    #[serde(flatten)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

impl GraphDoc {
    pub fn to_graph(&self) -> Result<Multigraph, GraphError> {
        match &self.vertices {
            VertexField::Count(n) => Multigraph::new(*n, self.edges.iter().map(|e| (e[0], e[1]))),
            VertexField::List(list) => {
                let pos: HashMap<usize, usize> =
                    list.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
                if pos.len() != list.len() {
                    return Err(GraphError::Parse("duplicate vertex id".into()));
                }
                let lookup = |id: usize| {
                    pos.get(&id)
                        .copied()
                        .ok_or_else(|| GraphError::Parse(format!("unknown vertex id {id}")))
                };
                let edges = self
                    .edges
                    .iter()
                    .map(|e| Ok((lookup(e[0])?, lookup(e[1])?)))
                    .collect::<Result<Vec<_>, GraphError>>()?;
                Multigraph::new(list.len(), edges)
            }
        }
    }
}

/// Shortest-cycle length, or an explicit marker for forests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Girth {
    Cycle(usize),
    Acyclic,
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Cycle(n) => write!(f, "{n}"),
            Girth::Acyclic => f.write_str("inf"),
        }
    }
}

impl Serialize for Girth {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Girth::Cycle(n) => s.serialize_u64(*n as u64),
            Girth::Acyclic => s.serialize_str("acyclic"),
        }
    }
}

impl<'de> Deserialize<'de> for Girth {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(usize),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(Girth::Cycle(n)),
            Raw::S(s) if s == "acyclic" || s == "inf" => Ok(Girth::Acyclic),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad girth {s:?}"))),
        }
    }
}

/// Degree histogram, edge count, diameter and girth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantSet {
    pub degrees: BTreeMap<usize, usize>,
    pub edges: usize,
    pub diameter: usize,
    pub girth: Girth,
}

impl InvariantSet {
    pub fn n_vertices(&self) -> usize {
        self.degrees.values().sum()
    }

    /// Σ k·d_k == 2E.
    pub fn handshake_ok(&self) -> bool {
        self.degrees.iter().map(|(k, d)| k * d).sum::<usize>() == 2 * self.edges
    }

    /// E − V + 1, when non-negative.
    pub fn genus(&self) -> Option<usize> {
        (self.edges + 1).checked_sub(self.n_vertices())
    }
}

impl fmt::Display for InvariantSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, d) in &self.degrees {
            write!(f, "d{k}={d} ")?;
        }
        write!(f, "E={} D={} G={}", self.edges, self.diameter, self.girth)
    }
}

/// Parses the compact form printed by `Display`, e.g. `d2=30 d3=20 E=60 D=10 G=12`.
impl FromStr for InvariantSet {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |t: &str| GraphError::Parse(format!("bad invariant token {t:?}"));
        let mut degrees = BTreeMap::new();
        let (mut edges, mut diameter, mut girth) = (None, None, None);
        for tok in s.split_whitespace() {
            let (key, val) = tok.split_once('=').ok_or_else(|| bad(tok))?;
            if let Some(k) = key.strip_prefix('d') {
                let k: usize = k.parse().map_err(|_| bad(tok))?;
                degrees.insert(k, val.parse().map_err(|_| bad(tok))?);
                continue;
            }
            let n = || val.parse::<usize>().map_err(|_| bad(tok));
            match key {
                "E" => edges = Some(n()?),
                "D" => diameter = Some(n()?),
                "G" | "g" => {
                    girth = Some(if val == "inf" {
                        Girth::Acyclic
                    } else {
                        Girth::Cycle(n()?)
                    })
                }
                _ => return Err(bad(tok)),
            }
        }
        match (edges, diameter, girth) {
            (Some(edges), Some(diameter), Some(girth)) => Ok(InvariantSet {
                degrees,
                edges,
                diameter,
                girth,
            }),
            _ => Err(GraphError::Parse(format!(
                "incomplete invariant string {s:?}"
            ))),
        }
    }
}

fn bfs(adj: &[Vec<(usize, usize)>], s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for &(w, _) in &adj[u] {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                q.push_back(w);
            }
        }
    }
    dist
}

fn eccentricity(adj: &[Vec<(usize, usize)>], s: usize) -> Option<usize> {
    let d = bfs(adj, s);
    if d.contains(&usize::MAX) {
        None
    } else {
        d.into_iter().max()
    }
}

/// Shortest cycle through the BFS tree rooted at `s`, stopping once no
/// shorter cycle than `bound` can appear.
fn shortest_cycle_from(adj: &[Vec<(usize, usize)>], s: usize, bound: usize) -> usize {
    let n = adj.len();
    let mut dist = vec![usize::MAX; n];
    let mut parent_edge = vec![usize::MAX; n];
    dist[s] = 0;
    let mut best = bound;
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        if 2 * dist[u] + 1 >= best {
            break;
        }
        for &(w, e) in &adj[u] {
            if e == parent_edge[u] {
                continue;
            }
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                parent_edge[w] = e;
                q.push_back(w);
            } else {
                best = best.min(dist[u] + dist[w] + 1);
            }
        }
    }
    best
}

#[cfg(feature = "parallel")]
fn map_vertices<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_vertices<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).map(f).collect()
}

pub fn diameter(g: &Multigraph) -> Result<usize, GraphError> {
    let adj = g.incidence();
    map_vertices(g.n, |s| eccentricity(&adj, s))
        .into_iter()
        .try_fold(0, |acc, e| {
            e.map(|e| acc.max(e)).ok_or(GraphError::Disconnected)
        })
}

pub fn girth(g: &Multigraph) -> Girth {
    let adj = g.incidence();
    let best = map_vertices(g.n, |s| shortest_cycle_from(&adj, s, usize::MAX))
        .into_iter()
        .min()
        .unwrap_or(usize::MAX);
    if best == usize::MAX {
        Girth::Acyclic
    } else {
        Girth::Cycle(best)
    }
}

pub fn degree_histogram(g: &Multigraph) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for d in g.degrees() {
        *h.entry(d).or_insert(0) += 1;
    }
    h
}

pub fn invariants(g: &Multigraph) -> Result<InvariantSet, GraphError> {
    Ok(InvariantSet {
        degrees: degree_histogram(g),
        edges: g.n_edges(),
        diameter: diameter(g)?,
        girth: girth(g),
    })
}

/// Replaces every edge by a path of length two through a new vertex.
pub fn subdivide(g: &Multigraph) -> Multigraph {
    let edges = g
        .edges
        .iter()
        .enumerate()
        .flat_map(|(k, &(u, v))| [(u, g.n + k), (g.n + k, v)]);
    Multigraph::new(g.n + g.n_edges(), edges).expect("subdivision in range")
}

/// Suppresses every degree-2 vertex not incident to a loop.
///
/// Merging the two edges at a degree-2 vertex leaves all other degrees
/// unchanged, so a single pass reaches the fixpoint.
pub fn smooth_degree2(g: &Multigraph) -> Multigraph {
    let mut edges: Vec<Option<(usize, usize)>> = g.edges.iter().copied().map(Some).collect();
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); g.n];
    for (e, &(u, v)) in g.edges.iter().enumerate() {
        inc[u].push(e);
        if u != v {
            inc[v].push(e);
        }
    }
    let mut removed = vec![false; g.n];
    for v in 0..g.n {
        inc[v].retain(|&e| edges[e].is_some());
        if inc[v].len() != 2 {
            continue;
        }
        let (e1, e2) = (inc[v][0], inc[v][1]);
        let (Some(a), Some(b)) = (edges[e1], edges[e2]) else {
            continue;
        };
        if a.0 == a.1 || b.0 == b.1 {
            continue;
        }
        let other = |(x, y): (usize, usize)| if x == v { y } else { x };
        let (p, q) = (other(a), other(b));
        edges[e1] = Some((p.min(q), p.max(q)));
        edges[e2] = None;
        removed[v] = true;
        for w in [p, q] {
            for slot in inc[w].iter_mut() {
                if *slot == e2 {
                    *slot = e1;
                }
            }
        }
        if p == q {
            // the two slots at p now both name e1; a loop is listed once
            let mut seen = false;
            inc[p].retain(|&e| {
                if e == e1 {
                    let keep = !seen;
                    seen = true;
                    keep
                } else {
                    true
                }
            });
        }
    }
    let mut renum = vec![usize::MAX; g.n];
    let mut k = 0;
    for v in 0..g.n {
        if !removed[v] {
            renum[v] = k;
            k += 1;
        }
    }
    Multigraph::new(
        k,
        edges
            .into_iter()
            .flatten()
            .map(|(u, v)| (renum[u], renum[v])),
    )
    .expect("smoothing in range")
}

/// Colour, loop count and sorted (neighbour colour, multiplicity) list.
type Signature = (usize, usize, Vec<(usize, usize)>);

/// Outcome of an isomorphism test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoResult {
    /// `map[v]` is the image in the second graph of vertex `v` of the first.
    Isomorphic(Vec<usize>),
    NotIsomorphic,
    Inconclusive,
}

impl IsoResult {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoResult::Isomorphic(_))
    }
}

/// Sorted `(neighbour, multiplicity)` lists and loop counts.
struct MultAdj {
    nbrs: Vec<Vec<(usize, usize)>>,
    loops: Vec<usize>,
    edge_mult: HashMap<(usize, usize), usize>,
}

impl MultAdj {
    fn new(g: &Multigraph) -> Self {
        let mut edge_mult: HashMap<(usize, usize), usize> = HashMap::new();
        let mut loops = vec![0; g.n];
        for &(u, v) in &g.edges {
            *edge_mult.entry((u, v)).or_insert(0) += 1;
            if u == v {
                loops[u] += 1;
            }
        }
        let mut nbrs = vec![Vec::new(); g.n];
        for (&(u, v), &m) in &edge_mult {
            if u != v {
                nbrs[u].push((v, m));
                nbrs[v].push((u, m));
            }
        }
        for l in &mut nbrs {
            l.sort_unstable();
        }
        MultAdj {
            nbrs,
            loops,
            edge_mult,
        }
    }
}

struct IsoSearch<'a> {
    a: &'a MultAdj,
    b: &'a MultAdj,
    n: usize,
    deadline: Instant,
    timed_out: bool,
}

enum Refined {
    Ok(Vec<usize>, Vec<usize>, usize),
    Mismatch,
}

impl IsoSearch<'_> {
    /// Joint colour refinement of both graphs; colours are canonical ranks of
    /// signatures, so equal colours mean the same thing on both sides.
    fn refine(&self, mut ca: Vec<usize>, mut cb: Vec<usize>) -> Refined {
        let mut classes = count_classes(&ca, &cb);
        loop {
            let sig = |adj: &MultAdj, c: &[usize], v: usize| {
                let mut s: Vec<(usize, usize)> =
                    adj.nbrs[v].iter().map(|&(w, m)| (c[w], m)).collect();
                s.sort_unstable();
                (c[v], adj.loops[v], s)
            };
            let sa: Vec<_> = (0..self.n).map(|v| sig(self.a, &ca, v)).collect();
            let sb: Vec<_> = (0..self.n).map(|v| sig(self.b, &cb, v)).collect();
            let mut all: Vec<&Signature> = sa.iter().chain(&sb).collect();
            all.sort_unstable();
            all.dedup();
            let rank: HashMap<&Signature, usize> =
                all.iter().enumerate().map(|(i, s)| (*s, i)).collect();
            ca = sa.iter().map(|s| rank[s]).collect();
            cb = sb.iter().map(|s| rank[s]).collect();
            let mut count = vec![0isize; rank.len()];
            for &c in &ca {
                count[c] += 1;
            }
            for &c in &cb {
                count[c] -= 1;
            }
            if count.iter().any(|&x| x != 0) {
                return Refined::Mismatch;
            }
            if rank.len() == classes {
                return Refined::Ok(ca, cb, classes);
            }
            classes = rank.len();
        }
    }

    fn search(&mut self, ca: Vec<usize>, cb: Vec<usize>) -> Option<Vec<usize>> {
        if Instant::now() > self.deadline {
            self.timed_out = true;
            return None;
        }
        let (ca, cb, classes) = match self.refine(ca, cb) {
            Refined::Ok(a, b, k) => (a, b, k),
            Refined::Mismatch => return None,
        };
        if classes == self.n {
            let mut pos = vec![0; self.n];
            for (v, &c) in cb.iter().enumerate() {
                pos[c] = v;
            }
            let map: Vec<usize> = ca.iter().map(|&c| pos[c]).collect();
            return self.check(&map).then_some(map);
        }
        // Individualise a vertex from the smallest non-singleton class.
        let mut size = vec![0usize; classes];
        for &c in &ca {
            size[c] += 1;
        }
        let target = (0..classes)
            .filter(|&c| size[c] > 1)
            .min_by_key(|&c| (size[c], c))
            .expect("non-discrete colouring has a class of size > 1");
        let v = ca.iter().position(|&c| c == target).expect("class member");
        let fresh = classes;
        for w in (0..self.n).filter(|&w| cb[w] == target) {
            let mut na = ca.clone();
            let mut nb = cb.clone();
            na[v] = fresh;
            nb[w] = fresh;
            if let Some(m) = self.search(na, nb) {
                return Some(m);
            }
            if self.timed_out {
                return None;
            }
        }
        None
    }

    fn check(&self, map: &[usize]) -> bool {
        self.a.edge_mult.len() == self.b.edge_mult.len()
            && self.a.edge_mult.iter().all(|(&(u, v), &m)| {
                let (x, y) = (map[u], map[v]);
                self.b.edge_mult.get(&(x.min(y), x.max(y))) == Some(&m)
            })
    }
}

fn count_classes(ca: &[usize], cb: &[usize]) -> usize {
    let mut all: Vec<usize> = ca.iter().chain(cb).copied().collect();
    all.sort_unstable();
    all.dedup();
    all.len()
}

/// Isomorphism test by colour refinement with individualisation and
/// backtracking. Gives up with `Inconclusive` after `timeout`.
pub fn isomorphic(g1: &Multigraph, g2: &Multigraph, timeout: Duration) -> IsoResult {
    if g1.n != g2.n || g1.n_edges() != g2.n_edges() || degree_histogram(g1) != degree_histogram(g2)
    {
        return IsoResult::NotIsomorphic;
    }
    let (a, b) = (MultAdj::new(g1), MultAdj::new(g2));
    let mut s = IsoSearch {
        a: &a,
        b: &b,
        n: g1.n,
        deadline: Instant::now() + timeout,
        timed_out: false,
    };
    let ca = g1.degrees();
    let cb = g2.degrees();
    match s.search(ca, cb) {
        Some(map) => IsoResult::Isomorphic(map),
        None if s.timed_out => IsoResult::Inconclusive,
        None => IsoResult::NotIsomorphic,
    }
}

fn domain(msg: impl Into<String>) -> GraphError {
    GraphError::DomainError(msg.into())
}

pub fn complete(n: usize) -> Multigraph {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Multigraph::new(n, edges).expect("complete graph")
}

pub fn complete_bipartite(m: usize, n: usize) -> Multigraph {
    let edges = (0..m).flat_map(|u| (0..n).map(move |v| (u, m + v)));
    Multigraph::new(m + n, edges).expect("complete bipartite graph")
}

/// G(n, k): outer cycle u_i, spokes u_i v_i, inner edges v_i v_{i+k}; k < n/2.
pub fn gen_petersen(n: usize, k: usize) -> Result<Multigraph, GraphError> {
    if n < 3 || k == 0 || 2 * k >= n {
        return Err(domain(format!("G({n},{k}) needs n >= 3 and 1 <= k < n/2")));
    }
    let mut edges = Vec::with_capacity(3 * n);
    for i in 0..n {
        edges.push((i, (i + 1) % n));
        edges.push((i, n + i));
        edges.push((n + i, n + (i + k) % n));
    }
    Multigraph::new(2 * n, edges)
}

/// K_{n,n} minus a perfect matching.
pub fn crown(n: usize) -> Result<Multigraph, GraphError> {
    if n < 2 {
        return Err(domain(format!("crown({n}) needs n >= 2")));
    }
    let edges = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, n + v)));
    Multigraph::new(2 * n, edges)
}

/// Two vertices joined by `n` parallel edges.
pub fn dipole(n: usize) -> Result<Multigraph, GraphError> {
    if n == 0 {
        return Err(domain("dipole(0) is disconnected"));
    }
    Multigraph::new(2, std::iter::repeat_n((0, 1), n))
}

pub fn hypercube(d: usize) -> Result<Multigraph, GraphError> {
    if d == 0 || d > 20 {
        return Err(domain(format!("hypercube({d}) needs 1 <= d <= 20")));
    }
    let n = 1usize << d;
    let edges = (0..n)
        .flat_map(|u| (0..d).map(move |b| (u, u ^ (1 << b))))
        .filter(|&(u, v)| u < v);
    Multigraph::new(n, edges)
}

/// Wheel on `n` vertices: a hub joined to every vertex of an (n−1)-cycle.
pub fn wheel(n: usize) -> Result<Multigraph, GraphError> {
    if n < 4 {
        return Err(domain(format!("wheel({n}) needs n >= 4")));
    }
    let rim = n - 1;
    let edges = (0..rim).flat_map(|i| [(i, (i + 1) % rim), (i, rim)]);
    Multigraph::new(n, edges)
}

/// 1-skeleton of a Platonic solid.
pub fn platonic(name: &str) -> Result<Multigraph, GraphError> {
    match name {
        "tetrahedron" => Ok(complete(4)),
        "cube" => hypercube(3),
        "octahedron" => {
            let edges = (0..6usize)
                .flat_map(|u| (u + 1..6).map(move |v| (u, v)))
                .filter(|&(u, v)| v != u + 3);
            Multigraph::new(6, edges)
        }
        "dodecahedron" => gen_petersen(10, 2),
        "icosahedron" => {
            // two caps on a pentagonal antiprism
            let (top, bottom) = (0, 11);
            let a = |i: usize| 1 + i % 5;
            let b = |i: usize| 6 + i % 5;
            let mut edges = Vec::new();
            for i in 0..5 {
                edges.extend([
                    (top, a(i)),
                    (bottom, b(i)),
                    (a(i), a(i + 1)),
                    (b(i), b(i + 1)),
                    (a(i), b(i)),
                    (a(i + 1), b(i)),
                ]);
            }
            Multigraph::new(12, edges)
        }
        other => Err(domain(format!("unknown Platonic solid {other:?}"))),
    }
}

/// Builds a named family from text such as `gen_petersen(8,3)`, `dipole(6)`,
/// `complete_bipartite(3,3)` or `platonic(cube)`.
pub fn family(spec: &str) -> Result<Multigraph, GraphError> {
    let spec = spec.trim();
    let (name, args) = spec
        .strip_suffix(')')
        .and_then(|s| s.split_once('('))
        .ok_or_else(|| GraphError::Parse(format!("bad family {spec:?}")))?;
    let args: Vec<&str> = args.split(',').map(str::trim).collect();
    let int = |i: usize| -> Result<usize, GraphError> {
        args.get(i)
            .and_then(|a| a.parse().ok())
            .ok_or_else(|| GraphError::Parse(format!("bad argument {i} in {spec:?}")))
    };
    match name.trim() {
        "complete" => Ok(complete(int(0)?)),
        "complete_bipartite" => Ok(complete_bipartite(int(0)?, int(1)?)),
        "gen_petersen" => gen_petersen(int(0)?, int(1)?),
        "crown" => crown(int(0)?),
        "dipole" => dipole(int(0)?),
        "hypercube" => hypercube(int(0)?),
        "wheel" => wheel(int(0)?),
        "platonic" => platonic(args[0]),
        other => Err(GraphError::Parse(format!("unknown family {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inv(g: &Multigraph) -> InvariantSet {
        invariants(g).unwrap()
    }

    fn hist(pairs: &[(usize, usize)]) -> BTreeMap<usize, usize> {
        pairs.iter().copied().collect()
    }

    /// Exhaustive oracle: tries all n! bijections.
    fn brute_iso(a: &Multigraph, b: &Multigraph) -> bool {
        if a.n != b.n || a.n_edges() != b.n_edges() {
            return false;
        }
        let mut perm: Vec<usize> = (0..a.n).collect();
        let target = b.edges.clone();
        fn rec(k: usize, perm: &mut Vec<usize>, a: &Multigraph, t: &[(usize, usize)]) -> bool {
            if k == perm.len() {
                return a.relabel(perm).edges == t;
            }
            for i in k..perm.len() {
                perm.swap(k, i);
                if rec(k + 1, perm, a, t) {
                    return true;
                }
                perm.swap(k, i);
            }
            false
        }
        rec(0, &mut perm, a, &target)
    }

    #[test]
    fn single_edge() {
        let g = Multigraph::new(2, [(0, 1)]).unwrap();
        let i = inv(&g);
        assert_eq!((i.diameter, i.girth), (1, Girth::Acyclic));
        let p = subdivide(&g);
        assert_eq!((p.n_vertices(), p.n_edges()), (3, 2));
        assert_eq!(inv(&p).diameter, 2);
    }

    #[test]
    fn loops_and_parallel_edges() {
        let g = Multigraph::new(1, [(0, 0)]).unwrap();
        assert_eq!(girth(&g), Girth::Cycle(1));
        assert_eq!(g.degrees(), vec![2]);
        assert_eq!(girth(&dipole(3).unwrap()), Girth::Cycle(2));
        assert_eq!(
            diameter(&Multigraph::new(2, []).unwrap()),
            Err(GraphError::Disconnected)
        );
    }

    #[test]
    fn k2_30() {
        let i = inv(&complete_bipartite(2, 30));
        assert_eq!(i.degrees, hist(&[(2, 30), (30, 2)]));
        assert_eq!((i.edges, i.diameter, i.girth), (60, 2, Girth::Cycle(4)));
        assert_eq!(i.to_string(), "d2=30 d30=2 E=60 D=2 G=4");
        assert_eq!(i.to_string().parse::<InvariantSet>().unwrap(), i);
    }

    #[test]
    fn subdivided_cube_and_desargues() {
        let cube = platonic("cube").unwrap();
        let s = subdivide(&cube);
        let i = inv(&s);
        assert_eq!(i.degrees, hist(&[(2, 12), (3, 8)]));
        assert_eq!(i.edges, 24);

        let d = subdivide(&gen_petersen(10, 3).unwrap());
        let i = inv(&d);
        assert_eq!(i.degrees, hist(&[(2, 30), (3, 20)]));
        assert_eq!((i.edges, i.diameter, i.girth), (60, 10, Girth::Cycle(12)));
    }

    #[test]
    fn smoothing() {
        let cube = platonic("cube").unwrap();
        let back = smooth_degree2(&subdivide(&cube));
        assert_eq!((back.n_vertices(), back.n_edges()), (8, 12));
        assert!(isomorphic(&back, &cube, DEFAULT_ISO_TIMEOUT).is_isomorphic());

        let d = smooth_degree2(&complete_bipartite(2, 7));
        assert_eq!(d, dipole(7).unwrap());

        let tri = Multigraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(smooth_degree2(&tri), Multigraph::new(1, [(0, 0)]).unwrap());
    }

    #[test]
    fn family_sizes() {
        let mk = gen_petersen(8, 3).unwrap();
        assert_eq!((mk.n_vertices(), mk.n_edges()), (16, 24));
        let c = crown(5).unwrap();
        assert_eq!((c.n_vertices(), c.n_edges()), (10, 20));
        assert!(c.degrees().iter().all(|&d| d == 4));
        assert_eq!(inv(&subdivide(&c)).degrees, hist(&[(2, 20), (4, 10)]));
        let c4 = complete_bipartite(2, 2);
        assert!(isomorphic(
            &c4,
            &Multigraph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap(),
            DEFAULT_ISO_TIMEOUT
        )
        .is_isomorphic());
        assert!(matches!(
            gen_petersen(8, 4),
            Err(GraphError::DomainError(_))
        ));
        assert_eq!(
            inv(&platonic("icosahedron").unwrap()).degrees,
            hist(&[(5, 12)])
        );
        assert_eq!(
            inv(&platonic("octahedron").unwrap()).degrees,
            hist(&[(4, 6)])
        );
        let dodeca = inv(&platonic("dodecahedron").unwrap());
        assert_eq!((dodeca.diameter, dodeca.girth), (5, Girth::Cycle(5)));
        assert!(isomorphic(&wheel(4).unwrap(), &complete(4), DEFAULT_ISO_TIMEOUT).is_isomorphic());
        assert_eq!(family("gen_petersen(8, 3)").unwrap(), mk);
        assert_eq!(family("platonic(cube)").unwrap(), hypercube(3).unwrap());
    }

    #[test]
    fn k23_vs_k33() {
        assert_eq!(
            isomorphic(
                &complete_bipartite(2, 3),
                &complete_bipartite(3, 3),
                DEFAULT_ISO_TIMEOUT
            ),
            IsoResult::NotIsomorphic
        );
    }

    #[test]
    fn petersen_family_members_are_distinguished() {
        // G(8,1) and G(8,3) are cubic on 16 vertices but not isomorphic
        let a = gen_petersen(8, 1).unwrap();
        let b = gen_petersen(8, 3).unwrap();
        assert_eq!(
            isomorphic(&a, &b, DEFAULT_ISO_TIMEOUT),
            IsoResult::NotIsomorphic
        );
        // G(10,2) and G(10,3) likewise
        let a = gen_petersen(10, 2).unwrap();
        let b = gen_petersen(10, 3).unwrap();
        assert_eq!(
            isomorphic(&a, &b, DEFAULT_ISO_TIMEOUT),
            IsoResult::NotIsomorphic
        );
    }

    #[test]
    fn graph_json_round_trip() {
        let g = gen_petersen(5, 2).unwrap();
        let text = serde_json::to_string(&g.to_doc()).unwrap();
        assert_eq!(Multigraph::from_json(&text).unwrap(), g);
        let listed =
            r#"{"vertices":[{"id":7,"side":"A"},{"id":3,"side":"B"}],"edges":[[7,3],[3,7]]}"#;
        assert_eq!(Multigraph::from_json(listed).unwrap(), dipole(2).unwrap());
        assert!(Multigraph::from_json(r#"{"vertices":2,"edges":[[0,5]]}"#).is_err());
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Multigraph> {
        (1..=max_n).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n), 0..(2 * n))
                .prop_map(move |e| Multigraph::new(n, e).unwrap())
        })
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
        Just((0..n).collect::<Vec<_>>()).prop_shuffle()
    }

    proptest! {
        #[test]
        fn iso_agrees_with_exhaustive_search(a in arb_graph(7), b in arb_graph(7)) {
            let fast = isomorphic(&a, &b, DEFAULT_ISO_TIMEOUT);
            prop_assert_ne!(&fast, &IsoResult::Inconclusive);
            prop_assert_eq!(fast.is_isomorphic(), brute_iso(&a, &b));
            if let IsoResult::Isomorphic(map) = fast {
                prop_assert_eq!(a.relabel(&map), b);
            }
        }

        #[test]
        fn relabelled_copy_is_found(
            (g, p) in arb_graph(8).prop_flat_map(|g| { let n = g.n_vertices(); (Just(g), arb_perm(n)) })
        ) {
            let h = g.relabel(&p);
            prop_assert!(isomorphic(&g, &h, DEFAULT_ISO_TIMEOUT).is_isomorphic());
            prop_assert!(brute_iso(&g, &h));
        }

        #[test]
        fn invariants_survive_relabelling(
            (g, p) in arb_graph(12).prop_flat_map(|g| { let n = g.n_vertices(); (Just(g), arb_perm(n)) })
        ) {
            let h = g.relabel(&p);
            prop_assert_eq!(invariants(&g), invariants(&h));
            prop_assert_eq!(girth(&g), girth(&h));
        }

        #[test]
        fn handshake_holds(g in arb_graph(12)) {
            let d = degree_histogram(&g);
            prop_assert_eq!(d.iter().map(|(k, c)| k * c).sum::<usize>(), 2 * g.n_edges());
        }

        #[test]
        fn smooth_inverts_subdivide(g in arb_graph(8)) {
            let loopless = Multigraph::new(g.n_vertices(), g.edges().iter().copied().filter(|&(u, v)| u != v)).unwrap();
            let back = smooth_degree2(&subdivide(&loopless));
            let direct = smooth_degree2(&loopless);
            prop_assert!(isomorphic(&back, &direct, DEFAULT_ISO_TIMEOUT).is_isomorphic());
            prop_assume!(loopless.degrees().iter().all(|&d| d != 2));
            prop_assert!(isomorphic(&back, &loopless, DEFAULT_ISO_TIMEOUT).is_isomorphic());
        }
    }
}
