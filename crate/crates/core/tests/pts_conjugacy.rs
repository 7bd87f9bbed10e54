use suspension_lab::gog::Verdict;
use suspension_lab::pts::{double_coset_rep, solve_persistent, well_order_key, Pts};
use suspension_lab::word::Alphabet;
use suspension_lab::Error;

fn demo() -> Pts {
    Pts::parse(include_str!("../../../fixtures/demo.pts")).unwrap()
}

fn cycle() -> Pts {
    Pts::parse(include_str!("../../../fixtures/cycle.pts")).unwrap()
}

fn with_tau_f(tau: &str) -> String {
    include_str!("../../../fixtures/demo.pts").replace("tau=z,z^2*s", tau)
}

fn twist(p: &Pts, a: &str, b: &str) -> i64 {
    let (da, db) = (p.gog().dir(a).unwrap(), p.gog().dir(b).unwrap());
    p.turn(da, db).unwrap().epsilon
}

#[test]
fn demo_twisting_numbers() {
    let p = demo();
    assert_eq!(twist(&p, "e", "fbar"), -2);
    assert_eq!(twist(&p, "f", "ebar"), 2);
    let sym = Pts::parse(&with_tau_f("tau=z,z^-1*s")).unwrap();
    assert_eq!(twist(&sym, "e", "fbar"), 1);
}

#[test]
fn zero_twist_rejected() {
    let err = Pts::parse(&with_tau_f("tau=z,s")).unwrap_err();
    assert!(matches!(err, Error::ZeroTwist(_)), "{err}");
}

#[test]
fn non_surjective_black_end_rejected() {
    let err = Pts::parse(&with_tau_f("tau=z,z*s^2")).unwrap_err();
    assert!(err.to_string().contains("surjectively"), "{err}");
}

#[test]
fn normal_form_of_demo_loop() {
    let p = demo();
    let g = p.gog().parse_word("e ; fbar ; b^3 t").unwrap();
    let nf = p.normal_form(&g).unwrap();
    assert_eq!(nf.positions.len(), 1);
    assert_eq!(nf.positions[0].0, 3);
    assert!(nf.positions[0].1.is_identity());
    assert_eq!(nf.t_exp, 1);
    assert_eq!(nf.r_exp, 0);
    assert!(p.gog().equal(&p.form_word(&nf).unwrap(), &g));
}

#[test]
fn normal_form_reduces_first() {
    let p = demo();
    let g = p.gog().parse_word("e ; fbar ; b ; f ; z^2 s ; fbar ; a").unwrap();
    let nf = p.normal_form(&g).unwrap();
    assert_eq!(nf.len(), 2);
    assert!(p.gog().equal(&p.form_word(&nf).unwrap(), &g));
}

#[test]
fn short_positions_of_demo_loops() {
    let p = demo();
    let g = p.gog().parse_word("e ; fbar ; t").unwrap();
    let s = p.short_positions(&g).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].modulus, 2);
    let sq = p.gog().parse_word("e ; fbar ; a ; e ; fbar ; b^2 t").unwrap();
    let s = p.short_positions(&sq).unwrap();
    assert!(s.len() <= 2);
    for x in &s {
        assert!((0..x.modulus).contains(&x.controlled));
        let w = p.gog().conjugate(&sq, &x.conjugator).unwrap();
        assert!(p.gog().equal(&w, &p.form_word(&x.form).unwrap()));
    }
}

#[test]
fn elliptic_has_no_short_position() {
    let p = demo();
    let g = p.gog().parse_word("@w ; a t").unwrap();
    assert!(matches!(p.short_positions(&g), Err(Error::NotHyperbolic(_))));
}

#[test]
fn dcr_stable_under_edge_group_conjugation() {
    let p = cycle();
    let gog = p.gog();
    let g = gog.parse_word("e ; fbar ; c d ; h ; gbar ; a b^-1 t").unwrap();
    let s = p.short_positions(&g).unwrap();
    let base = &s[0].form;
    let short = p.form_word(base).unwrap();
    for x in ["a", "a^-3 t^2", "t^-1", "a^5 t^3"] {
        let w = gog.parse_word(&format!("@w ; {x}")).unwrap();
        let c = gog.conjugate(&short, &w).unwrap();
        assert_eq!(p.normal_form(&c).unwrap().dcr(), base.dcr(), "{x}");
    }
}

#[test]
fn different_middle_representative_changes_dcr() {
    let p = cycle();
    let gog = p.gog();
    let g1 = gog.parse_word("e ; fbar ; c d ; h ; gbar ; t").unwrap();
    let g2 = gog.parse_word("e ; fbar ; d c ; h ; gbar ; t").unwrap();
    let d1 = p.short_positions(&g1).unwrap()[0].form.dcr();
    let d2 = p.short_positions(&g2).unwrap()[0].form.dcr();
    assert_ne!(d1, d2);
    assert_eq!(p.conjugacy(&g1, &g2).unwrap().verdict, Verdict::NonConjugate);
}

#[test]
fn persistent_data_examples() {
    let p = demo();
    let gog = p.gog();
    let g = gog.parse_word("e ; fbar ; t").unwrap();
    let h = gog.parse_word("e ; fbar ; b t").unwrap();
    let fg = p.short_positions(&g).unwrap().remove(0).form;
    let fh = p.short_positions(&h).unwrap().remove(0).form;
    let same = p.persistent_data(&fg, &fg).unwrap();
    assert!(same.delta.iter().all(|&d| d == 0));
    let pd = p.persistent_data(&fg, &fh).unwrap();
    assert_eq!(pd.epsilon, vec![-2]);
    assert_eq!(pd.delta, vec![1]);
    assert_eq!(pd.kappa, vec![0]);
    assert_eq!(solve_persistent(&pd.delta, &pd.epsilon), None);
}

#[test]
fn prefix_generator_shifts_by_epsilon() {
    let p = cycle();
    let gog = p.gog();
    let g = gog.parse_word("e ; fbar ; c d ; h ; gbar ; a b^-1 t").unwrap();
    let f = p.short_positions(&g).unwrap().remove(0).form;
    let short = p.form_word(&f).unwrap();
    let grp = gog.group(f.base);
    for lambda in [-2i64, 1, 3] {
        let pw = grp.pow(&p.prefix_generator(&f).unwrap(), lambda);
        let w = gog.element_word(f.base, grp.inv(&pw));
        let moved = p.normal_form(&gog.conjugate(&short, &w).unwrap()).unwrap();
        let eps = p.persistent_data(&f, &moved).unwrap();
        assert_eq!(solve_persistent(&eps.delta, &eps.epsilon), Some(lambda));
    }
}

#[test]
fn solve_persistent_examples() {
    assert_eq!(solve_persistent(&[0, 0], &[2, 3]), Some(0));
    assert_eq!(solve_persistent(&[2, 3], &[2, 3]), Some(1));
    assert_eq!(solve_persistent(&[1, 0], &[2, 3]), None);
    assert_eq!(solve_persistent(&[-4, -6], &[2, 3]), Some(-2));
}

#[test]
fn well_order_extends_initial_segment() {
    let mut v: Vec<i64> = (-4..=6).collect();
    v.sort_by_key(|&x| well_order_key(x, 3));
    assert_eq!(v, vec![0, 1, 2, 3, -1, -2, -3, 4, -4, 5, 6]);
}

#[test]
fn double_coset_rep_is_canonical() {
    let al = Alphabet::new(&["a", "b"]).unwrap();
    let (a, b) = (al.parse_word("a").unwrap(), al.parse_word("b").unwrap());
    let x = al.parse_word("a^3 b a b^-2 a b^4").unwrap();
    let (p, rep, q) = double_coset_rep(&a, &x, &b).unwrap();
    assert_eq!(a.pow(p).mul(&rep).mul(&b.pow(q)), x);
    for (m, n) in [(2, -1), (-3, 5), (7, 7)] {
        let y = a.pow(m).mul(&x).mul(&b.pow(n));
        assert_eq!(double_coset_rep(&a, &y, &b).unwrap().1, rep);
    }
    assert_eq!(rep, al.parse_word("b a b^-2 a").unwrap());
}

#[test]
fn conjugate_pair_ships_witness() {
    let p = cycle();
    let gog = p.gog();
    let g = gog.parse_word("e ; fbar ; c d ; h ; gbar ; a b^-1 t").unwrap();
    let x = gog.parse_word("a^2 ; g ; p q^-3 ; hbar ; d^-1 u ; f ; ebar ; b t^2").unwrap();
    let h = gog.conjugate(&g, &x).unwrap();
    let rep = p.conjugacy(&g, &h).unwrap();
    assert_eq!(rep.verdict, Verdict::Conjugate);
    assert!(gog.verify_conjugator(&g, &h, rep.witness.as_ref().unwrap()));
}

#[test]
fn demo_pair_non_conjugate() {
    let p = demo();
    let gog = p.gog();
    let g = gog.parse_word("e ; fbar ; t").unwrap();
    let h = gog.parse_word("e ; fbar ; b t").unwrap();
    let rep = p.conjugacy(&g, &h).unwrap();
    assert_eq!(rep.verdict, Verdict::NonConjugate);
    assert_eq!(rep.reason, "persistent equation unsolvable");
    let (found, tried) = gog.search_conjugator(&g, &h, 6);
    assert!(found.is_none());
    assert!(tried > 1000);
}

#[test]
fn elliptic_demo_pair() {
    let p = demo();
    let gog = p.gog();
    let g = gog.parse_word("@w ; a t").unwrap();
    let h = gog.parse_word("@w ; b t").unwrap();
    assert_eq!(p.conjugacy(&g, &h).unwrap().verdict, Verdict::NonConjugate);
}
