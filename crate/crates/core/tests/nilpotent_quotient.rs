use std::sync::Arc;

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use suspension_lab::nilpotent::{
    cyclic_intersection_trivial, homomorphism_holds, is_lower_unitriangular, layer_matrix, p_periodic_quotient,
    suspension_commutator, suspension_inverse, suspension_multiply, SuspensionElement,
};
use suspension_lab::word::{parse_aut, Alphabet, FreeAutomorphism, Letter, Word};

fn word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..rank, any::<bool>()), 0..=max_len)
        .prop_map(|ls| Word::from_letters(ls.into_iter().map(|(g, i)| Letter::new(g, i))))
}

fn element(rank: usize) -> impl Strategy<Value = SuspensionElement> {
    (word(rank, 6), -3i64..=3).prop_map(|(u, k)| SuspensionElement::new(u, k))
}

fn shear() -> FreeAutomorphism {
    parse_aut(include_str!("../../../fixtures/shear.aut")).unwrap()
}

fn rank3() -> FreeAutomorphism {
    parse_aut(include_str!("../../../fixtures/rank3.aut")).unwrap()
}

#[test]
fn fixture_layer_matrices_are_unitriangular() {
    let id = FreeAutomorphism::identity(Arc::new(Alphabet::standard(3)));
    for phi in [shear(), rank3(), id] {
        assert!(phi.is_phi_ordered());
        for n in 1..=4 {
            let m = layer_matrix(&phi, n).unwrap();
            assert_eq!(m.lower_unitriangular, Some(true), "n = {n}");
            assert!(is_lower_unitriangular(&m.matrix));
        }
    }
}

#[test]
fn quotient_map_is_a_homomorphism() {
    let phi = rank3();
    let al = phi.alphabet().clone();
    let s = SuspensionElement::parse_list("a,0;b,1", &al).unwrap();
    let (q, _) = p_periodic_quotient(&phi, &s, 41, 4).unwrap();
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let pairs: Vec<_> = (0..1000)
        .map(|_| {
            let x = element(3).new_tree(&mut runner).unwrap().current();
            let y = element(3).new_tree(&mut runner).unwrap().current();
            (x, y)
        })
        .collect();
    assert!(homomorphism_holds(&q, &phi, &pairs).unwrap());
}

proptest! {
    #[test]
    fn suspension_group_laws(x in element(2), y in element(2), z in element(2)) {
        let phi = shear();
        let m = |a: &SuspensionElement, b: &SuspensionElement| suspension_multiply(a, b, &phi).unwrap();
        prop_assert_eq!(m(&m(&x, &y), &z), m(&x, &m(&y, &z)));
        prop_assert!(m(&x, &suspension_inverse(&x, &phi).unwrap()).is_identity());
    }

    #[test]
    fn orders_equal_p_above_dimension(x in element(2)) {
        let phi = shear();
        let al = phi.alphabet().clone();
        let s = SuspensionElement::parse_list("a,0;b,0;,1", &al).unwrap();
        let (q, cert) = p_periodic_quotient(&phi, &s, 7, 3).unwrap();
        prop_assert!(cert.exponent_p);
        let img = q.image(&x).unwrap();
        let expected = if q.is_identity(&img) { 1 } else { 7 };
        prop_assert_eq!(q.element_order(&x).unwrap(), expected);
    }

    #[test]
    fn surviving_commutators_give_trivial_intersections(g in element(2), h in element(2)) {
        let phi = shear();
        let al = phi.alphabet().clone();
        let s = SuspensionElement::parse_list("a,0;b,0", &al).unwrap();
        let (q, _) = p_periodic_quotient(&phi, &s, 7, 3).unwrap();
        let c = suspension_commutator(&g, &h, &phi).unwrap();
        if !q.is_identity(&q.image(&c).unwrap()) {
            let (trivial, witness) = cyclic_intersection_trivial(&q, &g, &h, &al).unwrap();
            prop_assert!(trivial, "witness {:?}", witness);
        }
    }
}
