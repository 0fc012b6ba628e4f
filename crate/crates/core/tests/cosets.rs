use msgraphs::cosets::{default_budget, enumerate, regular_representation, verify_closed};
use msgraphs::permgrp::evaluate_word;
use msgraphs::words::{parse_presentation, Letter, Presentation, SubgroupSpec, Word};
use proptest::prelude::*;

const GROUPS: [(&str, usize); 3] = [
    (
        "generators: x, y, z\nrelators: x^5, y^2, z^2, (x*z)^3, (x*y)^2, (y*z^-1)^2",
        120,
    ),
    (
        "generators: x, y, z\nrelators: x^2, y^3, z^2, (z*y)^2, (y*x*z)^2, (y*x*z*x)^3",
        120,
    ),
    ("generators: a, b\nrelators: a^2, b^3, (a*b)^4", 24),
];

fn word(letters: &[(usize, bool)]) -> Word {
    Word::from_letters(letters.iter().map(|&(g, inv)| Letter::new(g, inv)))
}

fn words() -> impl Strategy<Value = Vec<Vec<(usize, bool)>>> {
    prop::collection::vec(
        prop::collection::vec((0usize..2, any::<bool>()), 0..7),
        0..3,
    )
}

fn lagrange(pres: &Presentation, order: usize, sub: &[Vec<(usize, bool)>]) {
    let regular = enumerate(pres, &SubgroupSpec::trivial(), default_budget(Some(order))).unwrap();
    let g = regular_representation(&regular).unwrap();
    assert_eq!(g.order(), order);
    let spec = SubgroupSpec::new(sub.iter().map(|w| word(w)).collect());
    let table = enumerate(pres, &spec, default_budget(Some(order))).unwrap();
    verify_closed(&table, pres).unwrap();
    let gens: Vec<_> = spec
        .generator_words
        .iter()
        .map(|w| evaluate_word(w, &regular.action, order).unwrap())
        .collect();
    let h = g.subgroup_generated(&gens).unwrap();
    assert_eq!(table.n_cosets * h.order(), order);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn index_times_subgroup_order_is_group_order(which in 0usize..3, sub in words()) {
        let (text, order) = GROUPS[which];
        let pres = parse_presentation(text).unwrap();
        let sub: Vec<_> = sub
            .into_iter()
            .map(|w| w.into_iter().map(|(g, i)| (g % pres.num_generators(), i)).collect())
            .collect();
        lagrange(&pres, order, &sub);
    }

    #[test]
    fn enumeration_is_deterministic(sub in words()) {
        let pres = parse_presentation(GROUPS[2].0).unwrap();
        let spec = SubgroupSpec::new(sub.iter().map(|w| word(w)).collect());
        let a = enumerate(&pres, &spec, 10_000).unwrap();
        let b = enumerate(&pres, &spec, 10_000).unwrap();
        prop_assert_eq!(a.action, b.action);
    }
}
