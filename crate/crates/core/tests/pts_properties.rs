mod common;

use common::{fixtures, random_loop, random_path};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use suspension_lab::gog::Verdict;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn normal_forms_spell_the_loop(fi in 0usize..3, seed in any::<u64>()) {
        let p = &fixtures()[fi];
        let Some(g) = random_loop(p, seed) else { return Ok(()) };
        let nf = p.normal_form(&g).unwrap();
        prop_assert!(p.gog().equal(&p.form_word(&nf).unwrap(), &g));
        prop_assert_eq!(p.normal_form(&p.form_word(&nf).unwrap()).unwrap(), nf);
    }

    #[test]
    fn short_positions_are_bounded(fi in 0usize..3, seed in any::<u64>()) {
        let p = &fixtures()[fi];
        let Some(g) = random_loop(p, seed) else { return Ok(()) };
        let len = p.gog().translation_length(&g).unwrap();
        let shorts = p.short_positions(&g).unwrap();
        prop_assert!(!shorts.is_empty() && shorts.len() <= len / 2);
        for s in &shorts {
            prop_assert!(0 <= s.controlled && s.controlled < s.modulus);
            prop_assert_eq!(s.form.positions[0].0, 0);
            let word = p.form_word(&s.form).unwrap();
            prop_assert!(p.gog().verify_conjugator(&g, &word, &s.conjugator));
        }
    }

    #[test]
    fn conjugates_are_recognised(fi in 0usize..3, seed in any::<u64>(), wlen in 0usize..=2) {
        let p = &fixtures()[fi];
        let gog = p.gog();
        let Some(g) = random_loop(p, seed) else { return Ok(()) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let w = random_path(gog, g.start(), 2 * wlen, &mut rng);
        let h = gog.reduce(&gog.conjugate(&g, &w).unwrap());
        prop_assert_eq!(gog.translation_length(&h).unwrap(), gog.translation_length(&g).unwrap());
        if p.is_white(h.start()) {
            let rep = p.conjugacy(&g, &h).unwrap();
            prop_assert_eq!(rep.verdict, Verdict::Conjugate);
            prop_assert!(gog.verify_conjugator(&g, &h, rep.witness.as_ref().unwrap()));
        }
    }

    #[test]
    fn reduction_is_confluent(fi in 0usize..3, seed in any::<u64>()) {
        let p = &fixtures()[fi];
        let gog = p.gog();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = gog.vertex_index("w").unwrap();
        let a = random_path(gog, start, rng.gen_range(0..=4), &mut rng);
        let b = random_path(gog, a.end(), rng.gen_range(0..=4), &mut rng);
        let ab = gog.mul(&a, &b).unwrap();
        let r = gog.reduce(&ab);
        prop_assert_eq!(gog.reduce(&r), r.clone());
        prop_assert_eq!(gog.reduce(&gog.mul(&gog.reduce(&a), &gog.reduce(&b)).unwrap()), r.clone());
        prop_assert!(gog.is_trivial(&gog.mul(&ab, &gog.inverse(&ab)).unwrap()));
        let text = gog.format_word(&r);
        prop_assert!(gog.equal(&gog.parse_word(&text).unwrap(), &r));
    }
}
