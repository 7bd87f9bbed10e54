use proptest::prelude::*;
use suspension_lab::magnus::{embed, induced_endomorphism, Ring, TruncatedSeries};
use suspension_lab::word::{parse_aut, Alphabet, Letter, Word};

fn word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..rank, any::<bool>()), 0..=max_len)
        .prop_map(|ls| Word::from_letters(ls.into_iter().map(|(g, i)| Letter::new(g, i))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn embedding_is_multiplicative(u in word(3, 10), v in word(3, 10), n in 1usize..=5) {
        let r = Ring::Integers;
        prop_assert_eq!(embed(&u.mul(&v), n, r), embed(&u, n, r).mul(&embed(&v, n, r)));
    }
}

proptest! {
    #[test]
    fn inverses_and_units(u in word(3, 12), n in 1usize..=5) {
        let r = Ring::Integers;
        let s = embed(&u, n, r);
        prop_assert!(s.mul(&s.invert().unwrap()).is_one());
        prop_assert_eq!(embed(&u.inverse(), n, r), s.invert().unwrap());
    }

    #[test]
    fn faithful_on_short_words(n in 2usize..=5, raw in prop::collection::vec((0usize..2, any::<bool>()), 0..=8)) {
        let raw = &raw[..raw.len().min(2 * n - 2)];
        let w = Word::from_letters(raw.iter().map(|&(g, i)| Letter::new(g, i)));
        prop_assert_eq!(embed(&w, n, Ring::Integers).is_one(), w.is_identity());
    }

    #[test]
    fn unipotent_units_have_exponent_p(u in word(3, 10), n in 1usize..=4, pi in 0usize..3) {
        let p = [5u64, 7, 11][pi];
        let s = embed(&u, n, Ring::Mod(p));
        prop_assert!(s.pow(p).is_one());
    }

    #[test]
    fn induced_endomorphism_is_compatible(u in word(2, 10), n in 1usize..=5) {
        let phi = parse_aut(include_str!("../../../fixtures/shear.aut")).unwrap();
        let f = induced_endomorphism(&phi, n, Ring::Integers);
        prop_assert_eq!(f.apply(&embed(&u, n, Ring::Integers)), embed(&phi.apply(&u).unwrap(), n, Ring::Integers));
    }

    #[test]
    fn printed_series_reparse(u in word(2, 8), n in 1usize..=5) {
        let al = Alphabet::standard(2);
        let s = embed(&u, n, Ring::Integers);
        prop_assert_eq!(TruncatedSeries::parse(&s.format(&al), &al, n, Ring::Integers).unwrap(), s);
    }
}
