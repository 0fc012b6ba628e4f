use std::collections::BTreeSet;

use msgraphs::amalgam::{build_graph, euler_check, genus};
use msgraphs::atlas::AtlasSession;
use msgraphs::graphs::invariants;
use proptest::prelude::*;
use proptest::sample::select;

/// Pairs of edges sharing an endpoint.
fn touching(ends: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for (k, &(a, b)) in ends.iter().enumerate() {
        for (l, &(c, d)) in ends.iter().enumerate() {
            if k != l && (a == c || a == d || b == c || b == d) {
                out.insert((k, l));
            }
        }
    }
    out
}

#[test]
fn every_arc_builds_a_consistent_graph() {
    let s = AtlasSession::embedded();
    for id in s.atlas.arc_ids() {
        let arc = s.arc(&id).unwrap();
        let g = build_graph(&arc.data).unwrap();
        euler_check(&arc.data, &g).unwrap();
        let inv = invariants(&g.graph).unwrap();
        assert!(inv.handshake_ok(), "{id}");
        assert_eq!(inv.genus(), Some(genus(&g).unwrap()), "{id}");
        assert_eq!(
            g.graph.n_edges(),
            arc.data.group.order() / arc.data.h_e.order(),
            "{id}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Right multiplication permutes edges and keeps incidence.
    #[test]
    fn group_elements_act_by_automorphisms(
        id in select(AtlasSession::embedded().atlas.arc_ids()),
        pick in any::<prop::sample::Index>(),
    ) {
        let s = AtlasSession::embedded();
        let arc = s.arc(&id).unwrap();
        let g = build_graph(&arc.data).unwrap();
        let x = g.group().element(pick.index(g.order())).clone();
        let p = g.edge_permutation(&x).unwrap();
        let before = touching(&g.edge_ends);
        let after: BTreeSet<(usize, usize)> =
            before.iter().map(|&(k, l)| (p.apply(k), p.apply(l))).collect();
        prop_assert_eq!(before, after);
    }
}
