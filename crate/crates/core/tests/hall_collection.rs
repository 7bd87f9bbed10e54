use num_bigint::BigInt;
use proptest::prelude::*;
use suspension_lab::hall::{collect, enumerate_basic, BasicCommutator, HallNormalForm};
use suspension_lab::lattice::rank;
use suspension_lab::magnus::{embed, embed_normal_form, gamma_weight, GammaWeight, Monomial, Ring};
use suspension_lab::word::{Alphabet, Letter, Word};

fn mobius(n: u64) -> i64 {
    let (mut n, mut k, mut sign) = (n, 2, 1);
    while k * k <= n {
        if n % k == 0 {
            n /= k;
            if n % k == 0 {
                return 0;
            }
            sign = -sign;
        }
        k += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Necklace count `(1/n) Σ_{d|n} μ(d) r^{n/d}`.
fn witt(r: u64, n: u64) -> u64 {
    let s: i64 = (1..=n).filter(|d| n % d == 0).map(|d| mobius(d) * (r as i64).pow((n / d) as u32)).sum();
    (s / n as i64) as u64
}

fn word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..rank, any::<bool>()), 0..=max_len)
        .prop_map(|ls| Word::from_letters(ls.into_iter().map(|(g, i)| Letter::new(g, i))))
}

#[test]
fn witt_oracle_values() {
    assert_eq!((1..=5).map(|n| witt(2, n)).collect::<Vec<_>>(), [2, 1, 2, 3, 6]);
    assert_eq!((1..=5).map(|n| witt(3, n)).collect::<Vec<_>>(), [3, 3, 8, 18, 48]);
}

#[test]
fn basis_counts_and_independence() {
    for r in 2..=3usize {
        let basis = enumerate_basic(r, 5).unwrap();
        for n in 1..=5usize {
            let ids: Vec<usize> = basis.ids_of_weight(n).collect();
            assert_eq!(ids.len() as u64, witt(r as u64, n as u64), "rank {r} weight {n}");
            let leads: Vec<_> = ids
                .iter()
                .map(|&id| embed(basis.word(id), n + 1, Ring::Integers).component(n))
                .collect();
            let mut monomials: Vec<Monomial> = leads.iter().flat_map(|s| s.terms().map(|(m, _)| m.clone())).collect();
            monomials.sort();
            monomials.dedup();
            let rows: Vec<Vec<BigInt>> = leads
                .iter()
                .map(|s| monomials.iter().map(|m| s.coefficient(&m.0)).collect())
                .collect();
            assert_eq!(rank(&rows), ids.len(), "rank {r} weight {n}");
        }
    }
}

#[test]
fn enumeration_is_sorted_and_basic() {
    let al = Alphabet::standard(3);
    let basis = enumerate_basic(3, 5).unwrap();
    let trees: Vec<BasicCommutator> = (0..basis.len()).map(|i| basis.tree(i)).collect();
    for w in trees.windows(2) {
        assert_eq!(suspension_lab::hall::compare(&w[0], &w[1]), std::cmp::Ordering::Less);
    }
    for t in &trees {
        assert!(t.is_basic());
        assert_eq!(BasicCommutator::parse(&t.format(&al), &al).unwrap(), *t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn collection_agrees_with_magnus(r in 1usize..=3, n in 1usize..=5, seed in word(3, 20)) {
        let w = Word::from_letters(seed.letters().iter().map(|l| Letter::new(l.gen % r, l.sign() < 0)));
        let nf = collect(&w, r, n).unwrap();
        let terms = nf.terms();
        prop_assert!(terms.windows(2).all(|p| p[0].0 < p[1].0));
        prop_assert!(terms.iter().all(|&(id, e)| e != 0 && nf.basis().weight(id) <= n));
        prop_assert_eq!(embed(&w, n + 1, Ring::Integers), embed_normal_form(&nf, n + 1, Ring::Integers));
        let expanded = nf.expand();
        if expanded.len() <= 60 {
            prop_assert_eq!(collect(&expanded, r, n).unwrap(), nf.clone());
        }
        let al = Alphabet::standard(r);
        prop_assert_eq!(HallNormalForm::parse(&nf.format(&al), &al, n).unwrap(), nf);
    }

    #[test]
    fn weight_of_commutators_and_products(u in word(3, 6), v in word(3, 6)) {
        let trunc = 7;
        let exact = |w: &Word| match gamma_weight(w, trunc) {
            GammaWeight::Exact(k) => Some(k),
            _ => None,
        };
        if let (Some(a), Some(b)) = (exact(&u), exact(&v)) {
            match gamma_weight(&u.commutator(&v), trunc) {
                GammaWeight::Exact(k) => prop_assert!(k >= a + b),
                GammaWeight::AtLeast(_) | GammaWeight::Infinite => {}
            }
            if a != b {
                prop_assert_eq!(exact(&u.mul(&v)), Some(a.min(b)));
            }
        }
    }
}
