//! Vertex orbits on the unit 3-sphere, nearest-neighbour skeletons and
//! stereographic scenes.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{GraphError, Multigraph};
use crate::quatalg::{
    act, all_perms4, binary_group, dedup_sorted, is_even, signed_placements, BinaryKind, FieldElem,
    QuatPairGroup, Quaternion,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpatialError {
    #[error("point does not have norm 1")]
    NotUnit,
    #[error("all points coincide")]
    DegeneratePointSet,
    #[error("the point coincides with the projection pole")]
    PoleHit,
    #[error("the pole lies on the edge {0}-{1}; choose another pole")]
    PoleOnGraph(usize, usize),
    #[error("samples per edge must be at least {MIN_SAMPLES}, got {0}")]
    TooFewSamples(usize),
    #[error("embedding has {got} points for {want} vertices")]
    EmbeddingSize { got: usize, want: usize },
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub const MIN_SAMPLES: usize = 8;
pub const DEFAULT_SAMPLES: usize = 16;

/// Generic pole used when none is given. Its coordinates have no relation to
/// any of the models, so their edges stay clear of it.
pub const DEFAULT_POLE: [f64; 4] = [
    0.893_645_230_285_731_4,
    0.271_234_101_839_347_3,
    0.319_856_287_406_620_5,
    0.171_592_773_602_111_3,
];

pub const MODELS: &[&str] = &[
    "tesseract",
    "simplex4",
    "cube",
    "dodecahedron",
    "600cell",
    "120cell",
];

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct S3Point {
    q: Quaternion,
}

impl S3Point {
    pub fn new(q: Quaternion) -> Result<Self, SpatialError> {
        if q.norm() != FieldElem::one() {
            return Err(SpatialError::NotUnit);
        }
        Ok(S3Point { q })
    }

    pub fn one() -> Self {
        S3Point {
            q: Quaternion::one(),
        }
    }

    pub fn quaternion(&self) -> &Quaternion {
        &self.q
    }

    pub fn to_f64(&self) -> [f64; 4] {
        self.q.to_f64()
    }
}

/// Orbit of `seed` under the group generated by the given pairs, acting by
/// `q ↦ a q b̄`.
pub fn orbit_points(pairs: &[(Quaternion, Quaternion)], seed: &S3Point) -> Vec<S3Point> {
    let mut seen: HashSet<Quaternion> = HashSet::new();
    seen.insert(seed.q);
    let mut queue = VecDeque::from([seed.q]);
    while let Some(q) = queue.pop_front() {
        for pair in pairs {
            let r = act(pair, &q);
            if seen.insert(r) {
                queue.push_back(r);
            }
        }
    }
    let mut out: Vec<S3Point> = seen.into_iter().map(|q| S3Point { q }).collect();
    out.sort();
    out
}

pub fn orbit_under(group: &QuatPairGroup, seed: &S3Point) -> Vec<S3Point> {
    orbit_points(&group.generator_pairs, seed)
}

/// Joins every pair of points at the least nonzero distance. Distances are
/// screened in floating point and the survivors compared exactly.
pub fn nn_skeleton(points: &[S3Point]) -> Result<Multigraph, SpatialError> {
    let n = points.len();
    let f: Vec<[f64; 4]> = points.iter().map(S3Point::to_f64).collect();
    let fdot = |a: usize, b: usize| (0..4).map(|k| f[a][k] * f[b][k]).sum::<f64>();
    let mut best = f64::NEG_INFINITY;
    for a in 0..n {
        for b in a + 1..n {
            if points[a] != points[b] {
                best = best.max(fdot(a, b));
            }
        }
    }
    if best == f64::NEG_INFINITY {
        return Err(SpatialError::DegeneratePointSet);
    }
    let mut candidates = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if points[a] != points[b] && fdot(a, b) > best - 1e-7 {
                candidates.push((a, b, points[a].q.dot(&points[b].q)));
            }
        }
    }
    let top = candidates.iter().map(|c| c.2).max().expect("nonempty");
    let edges: Vec<(usize, usize)> = candidates
        .into_iter()
        .filter(|c| c.2 == top)
        .map(|(a, b, _)| (a, b))
        .collect();
    Ok(Multigraph::new(n, edges)?)
}

fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    (0..4).map(|k| a[k] * b[k]).sum()
}

fn normalize(p: [f64; 4]) -> [f64; 4] {
    let n = dot4(&p, &p).sqrt();
    p.map(|c| c / n)
}

fn qmul(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

/// Rotates `pole` to `1` by left multiplication with its conjugate, then
/// projects from there.
pub fn stereographic(p: [f64; 4], pole: [f64; 4]) -> Result<[f64; 3], SpatialError> {
    let pole = normalize(pole);
    let r = qmul(&[pole[0], -pole[1], -pole[2], -pole[3]], &p);
    let d = 1.0 - r[0];
    if d < 1e-12 {
        return Err(SpatialError::PoleHit);
    }
    Ok([r[1] / d, r[2] / d, r[3] / d])
}

/// Unit vector orthogonal to `a`, used to pick a half circle between
/// antipodal endpoints.
fn orthogonal_to(a: &[f64; 4]) -> [f64; 4] {
    let mut best = [0.0; 4];
    let mut best_len = 0.0;
    for k in 0..4 {
        let mut e = [0.0; 4];
        e[k] = 1.0;
        let d = dot4(&e, a);
        let v = [
            e[0] - d * a[0],
            e[1] - d * a[1],
            e[2] - d * a[2],
            e[3] - d * a[3],
        ];
        let len = dot4(&v, &v);
        if len > best_len + 1e-9 {
            best_len = len;
            best = v;
        }
    }
    normalize(best)
}

/// The arc from `a` to `b` as `cos(t) a + sin(t) c` for `t` in `[0, theta]`.
fn arc_frame(a: &[f64; 4], b: &[f64; 4]) -> ([f64; 4], f64) {
    let d = dot4(a, b).clamp(-1.0, 1.0);
    let theta = d.acos();
    let v = [
        b[0] - d * a[0],
        b[1] - d * a[1],
        b[2] - d * a[2],
        b[3] - d * a[3],
    ];
    let len = dot4(&v, &v).sqrt();
    let c = if len < 1e-12 {
        orthogonal_to(a)
    } else {
        v.map(|x| x / len)
    };
    (c, theta)
}

fn arc_contains(a: &[f64; 4], b: &[f64; 4], p: &[f64; 4]) -> bool {
    let (c, theta) = arc_frame(a, b);
    let s = dot4(p, a);
    let t = dot4(p, &c);
    let off = dot4(p, p) - s * s - t * t;
    if off > 1e-18 {
        return false;
    }
    let angle = t.atan2(s);
    angle >= -1e-9 && angle <= theta + 1e-9
}

fn slerp(a: &[f64; 4], b: &[f64; 4], samples: usize) -> Vec<[f64; 4]> {
    let (c, theta) = arc_frame(a, b);
    (0..samples)
        .map(|i| {
            let t = theta * i as f64 / (samples - 1) as f64;
            let (s, co) = t.sin_cos();
            [
                co * a[0] + s * c[0],
                co * a[1] + s * c[1],
                co * a[2] + s * c[2],
                co * a[3] + s * c[3],
            ]
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneMeta {
    pub source: String,
    pub pole: [f64; 4],
    pub samples_per_edge: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub vertices: Vec<[f64; 3]>,
    pub polylines: Vec<Vec<[f64; 3]>>,
    pub meta: SceneMeta,
}

impl Scene {
    /// `v x y z` lines for every vertex and sample, then one `l` line per
    /// polyline over 1-based indices. Vertices come first so `v i` is graph
    /// vertex `i - 1`.
    pub fn to_obj(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {}", self.meta.source);
        for v in &self.vertices {
            let _ = writeln!(out, "v {} {} {}", v[0], v[1], v[2]);
        }
        let mut next = self.vertices.len() + 1;
        for line in &self.polylines {
            for p in line {
                let _ = writeln!(out, "v {} {} {}", p[0], p[1], p[2]);
            }
            let idx: Vec<String> = (next..next + line.len()).map(|i| i.to_string()).collect();
            let _ = writeln!(out, "l {}", idx.join(" "));
            next += line.len();
        }
        out
    }
}

pub fn export_scene(
    graph: &Multigraph,
    embedding: &[[f64; 4]],
    pole: [f64; 4],
    samples_per_edge: usize,
    source: &str,
) -> Result<Scene, SpatialError> {
    if samples_per_edge < MIN_SAMPLES {
        return Err(SpatialError::TooFewSamples(samples_per_edge));
    }
    if embedding.len() != graph.n_vertices() {
        return Err(SpatialError::EmbeddingSize {
            got: embedding.len(),
            want: graph.n_vertices(),
        });
    }
    let pole = normalize(pole);
    for &(u, v) in graph.edges() {
        if arc_contains(&embedding[u], &embedding[v], &pole) {
            return Err(SpatialError::PoleOnGraph(u, v));
        }
    }
    let vertices = embedding
        .iter()
        .map(|p| stereographic(*p, pole))
        .collect::<Result<Vec<_>, _>>()?;
    let polylines = graph
        .edges()
        .iter()
        .map(|&(u, v)| {
            slerp(&embedding[u], &embedding[v], samples_per_edge)
                .into_iter()
                .map(|p| stereographic(p, pole))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Scene {
        vertices,
        polylines,
        meta: SceneMeta {
            source: source.to_string(),
            pole,
            samples_per_edge,
        },
    })
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn fe(n: i64, d: i64) -> FieldElem {
    FieldElem::rational(r(n, d))
}

fn to_points(qs: Vec<Quaternion>) -> Vec<S3Point> {
    dedup_sorted(qs)
        .into_iter()
        .map(|q| S3Point::new(q).expect("model points are unit"))
        .collect()
}

fn dodecahedron_3d() -> Vec<[FieldElem; 3]> {
    let phi = FieldElem::phi();
    let inv = phi - FieldElem::one();
    let one = FieldElem::one();
    let z = FieldElem::zero();
    let mut out = Vec::new();
    for s in 0..8u32 {
        let sg = |k: u32, v: FieldElem| if s >> k & 1 == 1 { -v } else { v };
        out.push([sg(0, one), sg(1, one), sg(2, one)]);
    }
    for base in [[z, inv, phi], [inv, phi, z], [phi, z, inv]] {
        for s in 0..4u32 {
            let mut p = base;
            let mut k = 0;
            for c in p.iter_mut() {
                if !c.is_zero() {
                    if s >> k & 1 == 1 {
                        *c = -*c;
                    }
                    k += 1;
                }
            }
            out.push(p);
        }
    }
    out
}

fn hundred_twenty_cell() -> Vec<Quaternion> {
    let phi = FieldElem::phi();
    let one = FieldElem::one();
    let two = FieldElem::int(2);
    let z = FieldElem::zero();
    let s5 = FieldElem::sqrt5();
    let phi_inv = phi - one;
    let phi2 = phi + one;
    let phi_inv2 = two - phi;
    let perms = all_perms4();
    let even: Vec<[usize; 4]> = perms.iter().copied().filter(is_even).collect();
    let mut raw = signed_placements([z, z, two, two], &perms);
    raw.extend(signed_placements([one, one, one, s5], &perms));
    raw.extend(signed_placements([phi_inv2, phi, phi, phi], &perms));
    raw.extend(signed_placements([phi_inv, phi_inv, phi_inv, phi2], &perms));
    raw.extend(signed_placements([z, phi_inv2, one, phi2], &even));
    raw.extend(signed_placements([z, phi_inv, phi, s5], &even));
    raw.extend(signed_placements([phi_inv, one, phi, two], &even));
    let scale = FieldElem::sqrt2().scale(r(1, 4));
    raw.into_iter().map(|q| q.scale(scale)).collect()
}

/// Exact vertex set of a named model on the unit sphere.
pub fn model_points(name: &str) -> Result<Vec<S3Point>, SpatialError> {
    let half = fe(1, 2);
    let qs = match name {
        "tesseract" => signed_placements([half; 4], &[[0, 1, 2, 3]]),
        "simplex4" => {
            let q = FieldElem::sqrt5().scale(r(1, 4));
            let mut pts = vec![Quaternion::one()];
            for s in 0..8u32 {
                if s.count_ones() % 2 == 0 {
                    let sg = |k: u32| if s >> k & 1 == 1 { -q } else { q };
                    pts.push(Quaternion::new(fe(-1, 4), sg(0), sg(1), sg(2)));
                }
            }
            pts
        }
        "cube" => signed_placements([half; 4], &[[0, 1, 2, 3]])
            .into_iter()
            .filter(|q| q.w == half)
            .collect(),
        "dodecahedron" => dodecahedron_3d()
            .into_iter()
            .map(|[a, b, c]| {
                Quaternion::new(half, a.scale(r(1, 2)), b.scale(r(1, 2)), c.scale(r(1, 2)))
            })
            .collect(),
        "600cell" => binary_group(BinaryKind::I).to_vec(),
        "120cell" => hundred_twenty_cell(),
        _ => return Err(SpatialError::UnknownModel(name.to_string())),
    };
    Ok(to_points(qs))
}

/// Nearest-neighbour skeleton of a named model, e.g. `120cell`.
pub fn polytope_skeleton(name: &str) -> Result<Multigraph, SpatialError> {
    nn_skeleton(&model_points(name)?)
}

pub fn model_scene(name: &str, pole: [f64; 4], samples: usize) -> Result<Scene, SpatialError> {
    let pts = model_points(name)?;
    let g = nn_skeleton(&pts)?;
    let emb: Vec<[f64; 4]> = pts.iter().map(S3Point::to_f64).collect();
    export_scene(&g, &emb, pole, samples, name)
}
