use suspension_lab::gog::{GraphOfGroups, Verdict};
use suspension_lab::Error;

fn demo() -> GraphOfGroups {
    GraphOfGroups::parse(include_str!("../../../fixtures/demo.pts")).unwrap()
}

#[test]
fn demo_is_valid() {
    let g = demo();
    assert_eq!(g.vertices().len(), 2);
    assert_eq!(g.edges().len(), 2);
    assert_eq!(g.kappa(), Some(4));
}

#[test]
fn fixed_point_involution_rejected() {
    let text = "vertex v kind=z2 gens=z,s\nedge e bar=e from=v to=v group=z2 iota=z,s tau=z,s\n";
    let err = GraphOfGroups::parse(text).unwrap_err();
    assert!(err.to_string().contains("fixed point"), "{err}");
}

#[test]
fn non_injective_edge_map_rejected() {
    let text = "vertex v kind=z2 gens=z,s\nvertex u kind=z2 gens=x,y\nedge e from=v to=u group=z2 iota=z,z^2 tau=x,y\n";
    let err = GraphOfGroups::parse(text).unwrap_err();
    assert!(matches!(err, Error::InvalidGraph(_)), "{err}");
    assert!(err.to_string().contains("not injective"), "{err}");
}

#[test]
fn edge_and_inverse_cancel() {
    let g = demo();
    let w = g.parse_word("e ; ebar").unwrap();
    let r = g.reduce(&w);
    assert!(r.is_empty());
    assert!(g.is_trivial(&w));
}

#[test]
fn pinch_through_edge_group() {
    let g = demo();
    // ebar iota_e(x) e = tau_e(x): at v, ebar a e = z.
    let w = g.parse_word("@v ; ebar ; a ; e").unwrap();
    let r = g.reduce(&w);
    assert!(r.is_empty());
    assert_eq!(g.format_word(&r), "@v ; z");
    let reduced = g.parse_word("e ; fbar ; b t").unwrap();
    assert_eq!(g.reduce(&reduced), reduced);
}

#[test]
fn translation_lengths() {
    let g = demo();
    assert_eq!(g.translation_length(&g.parse_word("a b t^3").unwrap()).unwrap(), 0);
    let l = g.parse_word("e ; fbar").unwrap();
    assert_eq!(g.translation_length(&l).unwrap(), 2);
    assert_eq!(g.translation_length(&g.pow(&l, 3).unwrap()).unwrap(), 6);
    assert_eq!(g.translation_length(&g.pow(&l, -2).unwrap()).unwrap(), 4);
    // a conjugate that is not cyclically reduced
    let w = g.parse_word("a ; f ; z s ; ebar ; b^2").unwrap();
    let c = g.conjugate(&l, &w).unwrap();
    assert!(c.len() > 2);
    assert_eq!(g.translation_length(&c).unwrap(), 2);
}

#[test]
fn word_round_trip() {
    let g = demo();
    for text in ["e ; fbar ; b t", "a^2 b^-1 ; e ; s ; fbar ; t^-1", "@v ; z s^2", "@w ; 1"] {
        let w = g.parse_word(text).unwrap();
        assert_eq!(g.parse_word(&g.format_word(&w)).unwrap(), w, "{text}");
    }
}

#[test]
fn parse_errors_name_the_edge() {
    let g = demo();
    let err = g.parse_word("e ; e").unwrap_err();
    assert!(err.to_string().contains("does not start at vertex v"), "{err}");
}

#[test]
fn elliptic_conjugacy_via_transport() {
    let g = demo();
    let a = g.parse_word("@w ; a").unwrap();
    let b = g.parse_word("@w ; b").unwrap();
    let rep = g.conjugacy(&a, &b).unwrap();
    assert_eq!(rep.verdict, Verdict::Conjugate);
    assert!(g.verify_conjugator(&a, &b, rep.witness.as_ref().unwrap()));
    let at = g.parse_word("@w ; a t").unwrap();
    let bt = g.parse_word("@w ; b t").unwrap();
    let rep = g.conjugacy(&at, &bt).unwrap();
    assert_eq!(rep.verdict, Verdict::NonConjugate);
    let binv_t = g.parse_word("@w ; b^-1 t").unwrap();
    let rep = g.conjugacy(&at, &binv_t).unwrap();
    assert_eq!(rep.verdict, Verdict::Conjugate);
}

#[test]
fn mixed_pair_is_non_conjugate() {
    let g = demo();
    let x = g.parse_word("@w ; a").unwrap();
    let y = g.parse_word("e ; fbar").unwrap();
    let rep = g.conjugacy(&x, &y).unwrap();
    assert_eq!(rep.verdict, Verdict::NonConjugate);
}

#[test]
fn to_text_round_trip() {
    let g = demo();
    let again = GraphOfGroups::parse(&g.to_text()).unwrap();
    assert_eq!(again.to_text(), g.to_text());
}
