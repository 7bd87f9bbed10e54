use std::sync::Arc;

use proptest::prelude::*;
use suspension_lab::word::{free_conjugacy, parse_aut, Alphabet, FreeAutomorphism, Letter, Word};

fn word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..rank, any::<bool>()), 0..=max_len)
        .prop_map(|ls| Word::from_letters(ls.into_iter().map(|(g, i)| Letter::new(g, i))))
}

fn is_reduced(w: &Word) -> bool {
    w.letters().windows(2).all(|p| p[0] != p[1].inv())
}

fn phi() -> FreeAutomorphism {
    parse_aut(include_str!("../../../fixtures/shear.aut")).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn products_cancel(u in word(4, 32), v in word(4, 32)) {
        prop_assert!(is_reduced(&u) && is_reduced(&v));
        prop_assert!(u.mul(&v).mul(&v.inverse()).mul(&u.inverse()).is_identity());
    }
}

proptest! {
    #[test]
    fn commutator_expansions(a in word(3, 8), b in word(3, 8), c in word(3, 8)) {
        let ac = a.commutator(&c);
        prop_assert_eq!(a.mul(&b).commutator(&c), ac.mul(&ac.commutator(&b)).mul(&b.commutator(&c)));
        let ca = c.commutator(&a);
        prop_assert_eq!(c.commutator(&a.mul(&b)), c.commutator(&b).mul(&ca).mul(&ca.commutator(&b)));
        prop_assert_eq!(a.commutator(&b).inverse(), b.commutator(&a));
    }

    #[test]
    fn apply_is_a_bijective_homomorphism(u in word(2, 12), v in word(2, 12)) {
        let f = phi();
        let fu = f.apply(&u).unwrap();
        prop_assert_eq!(f.apply(&u.mul(&v)).unwrap(), fu.mul(&f.apply(&v).unwrap()));
        prop_assert_eq!(f.apply_inverse(&fu).unwrap(), u.clone());
        prop_assert_eq!(f.apply_power(&u, -3).unwrap(), f.apply_inverse(&f.apply_inverse(&f.apply_inverse(&u).unwrap()).unwrap()).unwrap());
    }

    #[test]
    fn free_conjugacy_finds_conjugators(u in word(3, 10), w in word(3, 10)) {
        let v = u.conjugate_by(&w);
        let x = free_conjugacy(&u, &v);
        prop_assert!(x.is_some());
        prop_assert_eq!(u.conjugate_by(&x.unwrap()), v);
    }

    #[test]
    fn rotations_are_conjugate(u in word(3, 12), k in 0usize..12) {
        let c = u.cyclically_reduced();
        let r = c.rotate(k % c.len().max(1));
        prop_assert!(free_conjugacy(&c, &r).is_some());
    }

    #[test]
    fn phi_ordered_implies_unipotent(tails in prop::collection::vec(word(3, 4), 3)) {
        let al = Arc::new(Alphabet::standard(3));
        // x_i -> x_i W_i with W_i over generators above i.
        let images: Vec<Word> = tails
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let above = 2 - i;
                let w = Word::from_letters(
                    t.letters().iter().filter(|_| above > 0).map(|l| Letter::new(i + 1 + l.gen % above.max(1), l.sign() < 0)),
                );
                Word::generator(i).mul(&w)
            })
            .collect();
        let f = FreeAutomorphism::new(al, images, None).unwrap();
        prop_assert!(f.is_phi_ordered());
        prop_assert!(f.is_unipotent());
    }
}

#[test]
fn word_syntax_round_trips() {
    let al = Alphabet::standard(3);
    for s in ["", "a", "a^-1 b^3 c", "c^-2 a b^-1 a"] {
        let w = al.parse_word(s).unwrap();
        assert_eq!(al.parse_word(&al.format_word(&w)).unwrap(), w);
    }
    assert_eq!(al.format_word(&al.parse_word("a a a b^-1 b^-1").unwrap()), "a^3 b^-2");
}

#[test]
fn aut_fixture_is_valid() {
    let f = phi();
    assert!(f.is_phi_ordered() && f.is_unipotent());
    assert_eq!(parse_aut(&f.to_aut_text()).unwrap(), f);
}
