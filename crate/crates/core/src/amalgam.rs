//! The graph of a finite quotient of an amalgam: vertices are right cosets of
//! the two vertex groups, edges are right cosets of the edge group.

use std::sync::Arc;

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::graphs::{GraphError, Multigraph};
use crate::permgrp::{PermError, Permutation, PermutationGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AmalgamError {
    #[error("{0}")]
    NotSubgroupTriple(String),
    #[error("Euler characteristic mismatch: quotient {quotient}, graph {graph}/{order}")]
    EulerMismatch {
        quotient: Ratio<i64>,
        graph: i64,
        order: usize,
    },
    #[error("graph is disconnected")]
    Disconnected,
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A finite group with vertex groups `h_a`, `h_b` and edge group `h_e`.
#[derive(Debug, Clone)]
pub struct ArcData {
    pub label: String,
    pub group: Arc<PermutationGroup>,
    pub h_a: PermutationGroup,
    pub h_b: PermutationGroup,
    pub h_e: PermutationGroup,
}

impl ArcData {
    pub fn new(
        label: impl Into<String>,
        group: Arc<PermutationGroup>,
        h_a: PermutationGroup,
        h_b: PermutationGroup,
        h_e: PermutationGroup,
    ) -> Result<Self, AmalgamError> {
        let arc = ArcData {
            label: label.into(),
            group,
            h_a,
            h_b,
            h_e,
        };
        arc.check()?;
        Ok(arc)
    }

    fn check(&self) -> Result<(), AmalgamError> {
        let fail = |m: &str| {
            Err(AmalgamError::NotSubgroupTriple(format!(
                "{}: {m}",
                self.label
            )))
        };
        for (name, h) in [("H_A", &self.h_a), ("H_B", &self.h_b), ("H_e", &self.h_e)] {
            if h.degree() != self.group.degree()
                || !h.elements().iter().all(|x| self.group.contains(x))
            {
                return fail(&format!("{name} is not a subgroup of the group"));
            }
        }
        if !self
            .h_e
            .elements()
            .iter()
            .all(|x| self.h_a.contains(x) && self.h_b.contains(x))
        {
            return fail("H_e is not contained in H_A ∩ H_B");
        }
        Ok(())
    }

    /// True when H_A and H_B together generate the whole group.
    pub fn vertex_groups_generate(&self) -> bool {
        let idx: Vec<usize> = self
            .h_a
            .generators()
            .iter()
            .chain(self.h_b.generators())
            .filter_map(|g| self.group.index_of(g))
            .collect();
        self.group.generated_order(&idx) == self.group.order()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    A,
    B,
}

/// Graph built from an arc, with the coset labelling kept for the action.
#[derive(Debug, Clone)]
pub struct MSGraph {
    pub label: String,
    pub graph: Multigraph,
    pub vertex_side: Vec<Side>,
    /// Edge `k` joins `edge_ends[k]`; edges are numbered as right H_e-cosets.
    pub edge_ends: Vec<(usize, usize)>,
    /// Least element index in each edge coset.
    pub edge_reps: Vec<usize>,
    group: Arc<PermutationGroup>,
    edge_of: Vec<u32>,
    a_of: Vec<u32>,
    b_of: Vec<u32>,
    n_a: usize,
    h_e_elements: Vec<usize>,
}

/// Labels every element by its right coset `H·x`; cosets are numbered in
/// order of their least element.
fn right_cosets(group: &PermutationGroup, h: &[usize]) -> (Vec<u32>, Vec<usize>) {
    let mut label = vec![u32::MAX; group.order()];
    let mut reps = Vec::new();
    for x in 0..group.order() {
        if label[x] != u32::MAX {
            continue;
        }
        let k = reps.len() as u32;
        reps.push(x);
        for &y in h {
            label[group.mul_idx(y, x)] = k;
        }
    }
    (label, reps)
}

pub fn build_graph(arc: &ArcData) -> Result<MSGraph, AmalgamError> {
    arc.check()?;
    let g = &arc.group;
    let ha = g.indices_of_subgroup(&arc.h_a)?;
    let hb = g.indices_of_subgroup(&arc.h_b)?;
    let he = g.indices_of_subgroup(&arc.h_e)?;
    let (a_of, a_reps) = right_cosets(g, &ha);
    let (b_of, _) = right_cosets(g, &hb);
    let (edge_of, edge_reps) = right_cosets(g, &he);
    let n_a = a_reps.len();
    let n_b = g.order() / arc.h_b.order();
    let edge_ends: Vec<(usize, usize)> = edge_reps
        .iter()
        .map(|&x| (a_of[x] as usize, n_a + b_of[x] as usize))
        .collect();
    let graph = Multigraph::new(n_a + n_b, edge_ends.iter().copied())?;
    let vertex_side = (0..n_a + n_b)
        .map(|v| if v < n_a { Side::A } else { Side::B })
        .collect();
    let mut h_e_elements = he;
    h_e_elements.retain(|&i| i != g.identity_index());
    Ok(MSGraph {
        label: arc.label.clone(),
        graph,
        vertex_side,
        edge_ends,
        edge_reps,
        group: Arc::clone(g),
        edge_of,
        a_of,
        b_of,
        n_a,
        h_e_elements,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ActionReport {
    /// Every generator permutes edges and vertices preserving incidence.
    pub automorphic: bool,
    /// The kernel of the edge action is trivial.
    pub faithful: bool,
    pub kernel_order: usize,
}

impl MSGraph {
    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn group(&self) -> &Arc<PermutationGroup> {
        &self.group
    }

    /// Image of edge `k` under right multiplication by element `g`.
    pub fn edge_image(&self, k: usize, g: usize) -> usize {
        self.edge_of[self.group.mul_idx(self.edge_reps[k], g)] as usize
    }

    /// The permutation of edges induced by a group element.
    pub fn edge_permutation(&self, g: &Permutation) -> Option<Permutation> {
        let gi = self.group.index_of(g)?;
        let images = (0..self.edge_reps.len())
            .map(|k| self.edge_image(k, gi) as u32)
            .collect();
        Permutation::from_images(images).ok()
    }

    /// Vertex map induced by `g`, read off independently through every edge;
    /// `None` if two edges disagree or the result is not a bijection.
    fn vertex_map(&self, gi: usize) -> Option<Vec<usize>> {
        let n = self.graph.n_vertices();
        let mut map = vec![usize::MAX; n];
        for (k, &(a, b)) in self.edge_ends.iter().enumerate() {
            let y = self.group.mul_idx(self.edge_reps[k], gi);
            let (a2, b2) = (self.a_of[y] as usize, self.n_a + self.b_of[y] as usize);
            for (v, w) in [(a, a2), (b, b2)] {
                if map[v] == usize::MAX {
                    map[v] = w;
                } else if map[v] != w {
                    return None;
                }
            }
        }
        let mut hit = vec![false; n];
        for &w in &map {
            if w == usize::MAX || hit[w] {
                return None;
            }
            hit[w] = true;
        }
        Some(map)
    }

    pub fn verify_action(&self) -> ActionReport {
        let automorphic = self.group.generators().iter().all(|s| {
            let Some(gi) = self.group.index_of(s) else {
                return false;
            };
            let Some(vmap) = self.vertex_map(gi) else {
                return false;
            };
            let edges_ok = (0..self.edge_reps.len()).all(|k| {
                let (a, b) = self.edge_ends[k];
                let img = self.edge_ends[self.edge_image(k, gi)];
                img == (vmap[a], vmap[b])
            });
            edges_ok && self.graph.relabel(&vmap) == self.graph
        });
        // Kernel elements fix the identity coset, so they lie in H_e.
        let kernel_order = 1 + self
            .h_e_elements
            .iter()
            .filter(|&&h| (0..self.edge_reps.len()).all(|k| self.edge_image(k, h) == k))
            .count();
        ActionReport {
            automorphic,
            faithful: kernel_order == 1,
            kernel_order,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let degrees = self.graph.degrees();
        let vertices: Vec<serde_json::Value> = self
            .vertex_side
            .iter()
            .enumerate()
            .map(|(id, side)| serde_json::json!({"id": id, "side": side, "degree": degrees[id]}))
            .collect();
        let edges: Vec<[usize; 2]> = self.edge_ends.iter().map(|&(u, v)| [u, v]).collect();
        serde_json::json!({
            "label": self.label,
            "vertices": vertices,
            "edges": edges,
            "genus": genus(self).ok(),
            "order": self.order(),
        })
    }
}

pub fn verify_action(g: &MSGraph) -> ActionReport {
    g.verify_action()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EulerData {
    #[serde(serialize_with = "ratio_string")]
    pub chi_quotient: Ratio<i64>,
    pub chi_graph: i64,
    pub order: usize,
}

fn ratio_string<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn euler_check(arc: &ArcData, g: &MSGraph) -> Result<EulerData, AmalgamError> {
    let inv = |n: usize| Ratio::new(1, n as i64);
    let chi_quotient = inv(arc.h_a.order()) + inv(arc.h_b.order()) - inv(arc.h_e.order());
    let chi_graph = g.graph.n_vertices() as i64 - g.graph.n_edges() as i64;
    let order = arc.group.order();
    if chi_quotient != Ratio::new(chi_graph, order as i64) {
        return Err(AmalgamError::EulerMismatch {
            quotient: chi_quotient,
            graph: chi_graph,
            order,
        });
    }
    Ok(EulerData {
        chi_quotient,
        chi_graph,
        order,
    })
}

/// Rank of the fundamental group, E − V + 1.
pub fn genus(g: &MSGraph) -> Result<usize, AmalgamError> {
    if !g.graph.is_connected() {
        return Err(AmalgamError::Disconnected);
    }
    Ok(g.graph.n_edges() + 1 - g.graph.n_vertices())
}
