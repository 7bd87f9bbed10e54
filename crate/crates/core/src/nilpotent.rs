//! Layer matrices of automorphisms on lower central quotients, suspension
//! arithmetic, and finite p-periodic quotients of suspensions.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hall::{collect, enumerate_basic};
use crate::magnus::{
    algebra_dimension, embed, gamma_weight, induced_endomorphism, GammaWeight, Ring,
    TruncatedSeries, DEFAULT_TRUNCATION,
};
use crate::word::{Alphabet, FreeAutomorphism, Word};

/// The action of `φ` on `γ_n F / γ_{n+1} F` in the basis of weight-`n` basic commutators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerMatrix {
    pub weight: usize,
    pub basis: Vec<String>,
    /// `matrix[i][j]` is the coordinate on basis element `i` of the image of basis element `j`.
    pub matrix: Vec<Vec<i64>>,
    pub phi_ordered: bool,
    /// `None` when the triangularity check was skipped because `φ` is not φ-ordered.
    pub lower_unitriangular: Option<bool>,
}

pub fn is_lower_unitriangular(m: &[Vec<i64>]) -> bool {
    m.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, &x)| if i == j { x == 1 } else { j < i || x == 0 })
    })
}

pub fn layer_matrix(phi: &FreeAutomorphism, n: usize) -> Result<LayerMatrix> {
    if n == 0 {
        return Err(Error::Precondition("weight must be positive".into()));
    }
    let rank = phi.rank();
    let basis = enumerate_basic(rank, n)?;
    let ids: Vec<usize> = basis.ids_of_weight(n).collect();
    let columns: Vec<Vec<i64>> = ids
        .par_iter()
        .map(|&id| -> Result<Vec<i64>> {
            let image = phi.apply(basis.word(id))?;
            let nf = collect(&image, rank, n)?;
            if nf.leading_weight().is_some_and(|w| w < n) {
                return Err(Error::Precondition(format!(
                    "image of a weight-{n} commutator has a lower-weight term"
                )));
            }
            Ok(nf.coordinates(n))
        })
        .collect::<Result<_>>()?;
    let d = ids.len();
    let matrix: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|j| columns[j][i]).collect()).collect();
    let phi_ordered = phi.is_phi_ordered();
    let lower_unitriangular = phi_ordered.then(|| is_lower_unitriangular(&matrix));
    let alphabet = phi.alphabet();
    Ok(LayerMatrix {
        weight: n,
        basis: ids.iter().map(|&id| basis.format(id, alphabet)).collect(),
        matrix,
        phi_ordered,
        lower_unitriangular,
    })
}

/// An element `u t^k` of `F ⋊_φ <t>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SuspensionElement {
    pub fibre: Word,
    pub t: i64,
}

impl SuspensionElement {
    pub fn new(fibre: Word, t: i64) -> Self {
        SuspensionElement { fibre, t }
    }

    pub fn identity() -> Self {
        SuspensionElement::new(Word::identity(), 0)
    }

    pub fn is_identity(&self) -> bool {
        self.fibre.is_identity() && self.t == 0
    }

    pub fn format(&self, alphabet: &Alphabet) -> String {
        format!("{},{}", alphabet.format_word(&self.fibre), self.t)
    }

    /// Parses `word,k`; a bare word has `k = 0`.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self> {
        let (w, k) = text.rsplit_once(',').unwrap_or((text, "0"));
        let t = k
            .trim()
            .parse()
            .map_err(|_| Error::parse(1, 1, format!("bad t-exponent `{k}`")))?;
        Ok(SuspensionElement::new(alphabet.parse_word(w)?, t))
    }

    /// Parses `;`-separated elements such as `a,1;b,0`.
    pub fn parse_list(text: &str, alphabet: &Alphabet) -> Result<Vec<Self>> {
        text.split(';')
            .filter(|s| !s.trim().is_empty())
            .map(|s| SuspensionElement::parse(s, alphabet))
            .collect()
    }
}

/// `(u,k)(v,l) = (u φ^k(v), k+l)`.
pub fn suspension_multiply(
    x: &SuspensionElement,
    y: &SuspensionElement,
    phi: &FreeAutomorphism,
) -> Result<SuspensionElement> {
    let moved = phi.apply_power(&y.fibre, x.t)?;
    Ok(SuspensionElement::new(x.fibre.mul(&moved), x.t + y.t))
}

pub fn suspension_inverse(x: &SuspensionElement, phi: &FreeAutomorphism) -> Result<SuspensionElement> {
    Ok(SuspensionElement::new(
        phi.apply_power(&x.fibre.inverse(), -x.t)?,
        -x.t,
    ))
}

pub fn suspension_commutator(
    x: &SuspensionElement,
    y: &SuspensionElement,
    phi: &FreeAutomorphism,
) -> Result<SuspensionElement> {
    let xi = suspension_inverse(x, phi)?;
    let yi = suspension_inverse(y, phi)?;
    let a = suspension_multiply(&xi, &yi, phi)?;
    let b = suspension_multiply(&a, x, phi)?;
    suspension_multiply(&b, y, phi)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn next_prime(n: u64) -> u64 {
    let mut p = n.max(2);
    while !is_prime(p) {
        p += 1;
    }
    p
}

type Matrix = Vec<Vec<u64>>;

fn mat_mul(a: &Matrix, b: &Matrix, p: u64) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![0u64; n]; n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i][k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] = (out[i][j] + x * b[k][j]) % p;
            }
        }
    }
    out
}

fn mat_identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect()
}

/// The image of a suspension element: a unit of the truncated algebra mod `p` and a cyclic exponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuotientElement {
    pub series: Vec<u64>,
    pub t: u64,
}

/// `(1 + m) ⋊ <Φ>` over `Z/p`, truncated at degree `trunc`.
#[derive(Debug, Clone)]
pub struct PeriodicQuotient {
    p: u64,
    trunc: usize,
    rank: usize,
    monomials: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    products: Vec<(usize, usize, usize)>,
    phi_powers: Vec<Matrix>,
    phi_order: u64,
    cyclic_order: u64,
}

impl PeriodicQuotient {
    pub fn new(phi: &FreeAutomorphism, p: u64, trunc: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if trunc == 0 {
            return Err(Error::Precondition("truncation must be positive".into()));
        }
        let rank = phi.rank();
        let mut monomials: Vec<Vec<usize>> = vec![Vec::new()];
        let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 1..trunc {
            layer = layer
                .iter()
                .flat_map(|m| {
                    (0..rank).map(move |g| {
                        let mut m = m.clone();
                        m.push(g);
                        m
                    })
                })
                .collect();
            monomials.extend(layer.iter().cloned());
        }
        let index: HashMap<Vec<usize>, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let mut products = Vec::new();
        for (i, a) in monomials.iter().enumerate() {
            for (j, b) in monomials.iter().enumerate() {
                if a.len() + b.len() < trunc {
                    let mut m = a.clone();
                    m.extend_from_slice(b);
                    products.push((i, j, index[&m]));
                }
            }
        }
        let ring = Ring::Mod(p);
        let endo = induced_endomorphism(phi, trunc, ring);
        let d = monomials.len();
        let mut matrix = vec![vec![0u64; d]; d];
        for (j, m) in monomials.iter().enumerate() {
            let mut basis = TruncatedSeries::zero(trunc, ring);
            basis.add_term(crate::magnus::Monomial(m.clone()), BigInt::from(1));
            let image = endo.apply(&basis);
            for (mono, c) in image.terms() {
                matrix[index[&mono.0]][j] = c.to_u64().expect("reduced mod p");
            }
        }
        let identity = mat_identity(d);
        let mut phi_powers = vec![identity.clone()];
        let mut current = matrix.clone();
        let limit = p.saturating_pow(4).min(1 << 16);
        while current != identity {
            if phi_powers.len() as u64 >= limit {
                return Err(Error::Precondition(
                    "induced map has no small p-power order; is the automorphism unipotent?".into(),
                ));
            }
            phi_powers.push(current.clone());
            current = mat_mul(&current, &matrix, p);
        }
        let phi_order = phi_powers.len() as u64;
        let cyclic_order = phi_order.max(p);
        if cyclic_order % phi_order != 0 {
            return Err(Error::Precondition(format!(
                "order {phi_order} of the induced map is not a power of {p}"
            )));
        }
        Ok(PeriodicQuotient {
            p,
            trunc,
            rank,
            monomials,
            index,
            products,
            phi_powers,
            phi_order,
            cyclic_order,
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn dimension(&self) -> usize {
        self.monomials.len()
    }

    /// Order of the induced map `Φ`.
    pub fn phi_order(&self) -> u64 {
        self.phi_order
    }

    /// Order `p^e` of the cyclic factor.
    pub fn cyclic_order(&self) -> u64 {
        self.cyclic_order
    }

    /// True when the quotient provably has exponent `p`: `p >= dim` and `Φ^p = 1`.
    pub fn exponent_p_certified(&self) -> bool {
        self.p as usize >= self.dimension() && self.cyclic_order == self.p
    }

    fn dense(&self, s: &TruncatedSeries) -> Vec<u64> {
        let mut v = vec![0u64; self.dimension()];
        for (m, c) in s.terms() {
            v[self.index[&m.0]] = c.to_u64().expect("reduced mod p");
        }
        v
    }

    pub fn identity(&self) -> QuotientElement {
        let mut series = vec![0u64; self.dimension()];
        series[0] = 1;
        QuotientElement { series, t: 0 }
    }

    pub fn image(&self, g: &SuspensionElement) -> Result<QuotientElement> {
        if g.fibre.max_generator().is_some_and(|x| x >= self.rank) {
            return Err(Error::AlphabetMismatch("element outside the fibre alphabet".into()));
        }
        let s = embed(&g.fibre, self.trunc, Ring::Mod(self.p));
        Ok(QuotientElement {
            series: self.dense(&s),
            t: g.t.rem_euclid(self.cyclic_order as i64) as u64,
        })
    }

    fn series_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; a.len()];
        for &(i, j, k) in &self.products {
            if a[i] != 0 && b[j] != 0 {
                out[k] = (out[k] + a[i] * b[j]) % self.p;
            }
        }
        out
    }

    fn act(&self, k: u64, v: &[u64]) -> Vec<u64> {
        let m = &self.phi_powers[(k % self.phi_order) as usize];
        m.iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(0u64, |acc, (&x, &y)| (acc + x * y) % self.p)
            })
            .collect()
    }

    pub fn mul(&self, x: &QuotientElement, y: &QuotientElement) -> QuotientElement {
        QuotientElement {
            series: self.series_mul(&x.series, &self.act(x.t, &y.series)),
            t: (x.t + y.t) % self.cyclic_order,
        }
    }

    pub fn is_identity(&self, x: &QuotientElement) -> bool {
        *x == self.identity()
    }

    pub fn element_order_of(&self, x: &QuotientElement) -> u64 {
        let id = self.identity();
        let mut y = x.clone();
        let mut k = 1;
        while y != id {
            y = self.mul(&y, x);
            k += 1;
        }
        k
    }

    pub fn element_order(&self, g: &SuspensionElement) -> Result<u64> {
        Ok(self.element_order_of(&self.image(g)?))
    }

    pub fn powers(&self, x: &QuotientElement) -> Vec<QuotientElement> {
        let id = self.identity();
        let mut out = vec![id.clone()];
        let mut y = x.clone();
        while y != id {
            out.push(y.clone());
            y = self.mul(&y, x);
        }
        out
    }

    pub fn format_element(&self, x: &QuotientElement, alphabet: &Alphabet) -> String {
        let mut s = TruncatedSeries::zero(self.trunc, Ring::Mod(self.p));
        for (i, &c) in x.series.iter().enumerate() {
            s.add_term(crate::magnus::Monomial(self.monomials[i].clone()), BigInt::from(c));
        }
        format!("({}) t^{}", s.format(alphabet), x.t)
    }
}

/// Result of an injectivity and exponent check on a finite set.
#[derive(Debug, Clone, Serialize)]
pub struct QuotientCertificate {
    pub prime: u64,
    pub trunc: usize,
    pub dimension: usize,
    pub cyclic_order: u64,
    pub elements: Vec<String>,
    pub images: Vec<String>,
    pub orders: Vec<u64>,
    pub all_nontrivial: bool,
    pub injective: bool,
    pub exponent_p: bool,
    pub escalations: Vec<(u64, usize)>,
}

fn certify(
    q: &PeriodicQuotient,
    s: &[SuspensionElement],
    alphabet: &Alphabet,
) -> Result<(QuotientCertificate, Vec<String>)> {
    let images: Vec<QuotientElement> = s.iter().map(|g| q.image(g)).collect::<Result<_>>()?;
    let mut problems = Vec::new();
    for (g, x) in s.iter().zip(&images) {
        if q.is_identity(x) {
            problems.push(format!("{} maps to the identity", g.format(alphabet)));
        }
    }
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if images[i] == images[j] && s[i] != s[j] {
                problems.push(format!(
                    "{} and {} collide",
                    s[i].format(alphabet),
                    s[j].format(alphabet)
                ));
            }
        }
    }
    let orders: Vec<u64> = images.par_iter().map(|x| q.element_order_of(x)).collect();
    let cert = QuotientCertificate {
        prime: q.p,
        trunc: q.trunc,
        dimension: q.dimension(),
        cyclic_order: q.cyclic_order,
        elements: s.iter().map(|g| g.format(alphabet)).collect(),
        images: images.iter().map(|x| q.format_element(x, alphabet)).collect(),
        orders,
        all_nontrivial: images.iter().all(|x| !q.is_identity(x)),
        injective: !problems.iter().any(|p| p.contains("collide")),
        exponent_p: q.exponent_p_certified(),
        escalations: Vec::new(),
    };
    Ok((cert, problems))
}

fn check_inputs(phi: &FreeAutomorphism, s: &[SuspensionElement]) -> Result<()> {
    if !phi.is_unipotent() {
        return Err(Error::Precondition("automorphism is not unipotent".into()));
    }
    if s.iter().any(SuspensionElement::is_identity) {
        return Err(Error::Precondition("the set contains the identity".into()));
    }
    Ok(())
}

/// Builds `Q_p` for explicit `p` and `N` and certifies it on `s`.
pub fn p_periodic_quotient(
    phi: &FreeAutomorphism,
    s: &[SuspensionElement],
    p: u64,
    trunc: usize,
) -> Result<(PeriodicQuotient, QuotientCertificate)> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    check_inputs(phi, s)?;
    if (p as usize) < trunc {
        return Err(Error::Precondition(format!("p = {p} is smaller than N = {trunc}")));
    }
    let q = PeriodicQuotient::new(phi, p, trunc)?;
    let (cert, problems) = certify(&q, s, phi.alphabet())?;
    if !problems.is_empty() {
        return Err(Error::NotInjective(format!(
            "{}; raise N or p",
            problems.join("; ")
        )));
    }
    Ok((q, cert))
}

/// Chooses `N` and `p` by escalation: start at `N = 1 + max weight` and the least prime `p >= dim`,
/// raise `N` up to `max_trunc`, then raise `p`.
pub fn auto_periodic_quotient(
    phi: &FreeAutomorphism,
    s: &[SuspensionElement],
    max_trunc: usize,
) -> Result<(PeriodicQuotient, QuotientCertificate)> {
    check_inputs(phi, s)?;
    let rank = phi.rank();
    let cap = max_trunc.max(2);
    let start = s
        .iter()
        .filter_map(|g| match gamma_weight(&g.fibre, cap) {
            GammaWeight::Exact(w) => Some(w + 1),
            GammaWeight::AtLeast(_) => Some(cap),
            GammaWeight::Infinite => None,
        })
        .max()
        .unwrap_or(2)
        .clamp(2, cap);
    let mut tried = Vec::new();
    let mut last_problems = Vec::new();
    for trunc in start..=cap {
        let mut p = next_prime(algebra_dimension(rank, trunc).max(trunc) as u64);
        for _ in 0..3 {
            let q = PeriodicQuotient::new(phi, p, trunc)?;
            let (mut cert, problems) = certify(&q, s, phi.alphabet())?;
            tried.push((p, trunc));
            if problems.is_empty() {
                cert.escalations = tried;
                return Ok((q, cert));
            }
            last_problems = problems;
            p = next_prime(p + 1);
        }
    }
    Err(Error::NotInjective(format!(
        "{} after trying (p, N) = {:?}; raise the truncation cap",
        last_problems.join("; "),
        tried
    )))
}

/// Witness that two cyclic images meet: `g^i = h^j` nontrivially.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionWitness {
    pub g_power: u64,
    pub h_power: u64,
    pub element: String,
}

/// Decides whether `<ḡ> ∩ <h̄>` is trivial by enumerating both cyclic subgroups.
pub fn cyclic_intersection_trivial(
    q: &PeriodicQuotient,
    g: &SuspensionElement,
    h: &SuspensionElement,
    alphabet: &Alphabet,
) -> Result<(bool, Option<IntersectionWitness>)> {
    let (x, y) = (q.image(g)?, q.image(h)?);
    for (name, z) in [("g", &x), ("h", &y)] {
        if q.is_identity(z) {
            return Err(Error::TrivialImage(format!("{name} maps to the identity")));
        }
    }
    let gs = q.powers(&x);
    let table: HashMap<&QuotientElement, u64> =
        gs.iter().enumerate().skip(1).map(|(i, z)| (z, i as u64)).collect();
    for (j, z) in q.powers(&y).iter().enumerate().skip(1) {
        if let Some(&i) = table.get(z) {
            return Ok((
                false,
                Some(IntersectionWitness {
                    g_power: i,
                    h_power: j as u64,
                    element: q.format_element(z, alphabet),
                }),
            ));
        }
    }
    Ok((true, None))
}

/// Checks the quotient map is a homomorphism on the given pairs.
pub fn homomorphism_holds(
    q: &PeriodicQuotient,
    phi: &FreeAutomorphism,
    pairs: &[(SuspensionElement, SuspensionElement)],
) -> Result<bool> {
    for (x, y) in pairs {
        let xy = suspension_multiply(x, y, phi)?;
        if q.image(&xy)? != q.mul(&q.image(x)?, &q.image(y)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Default truncation cap for the escalation policy.
pub const DEFAULT_MAX_TRUNC: usize = DEFAULT_TRUNCATION;

impl fmt::Display for QuotientCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "p = {}, N = {}, dim = {}, cyclic order = {}",
            self.prime, self.trunc, self.dimension, self.cyclic_order
        )?;
        for ((e, img), o) in self.elements.iter().zip(&self.images).zip(&self.orders) {
            writeln!(f, "  {e} -> {img}  order {o}")?;
        }
        writeln!(f, "nontrivial: {}", self.all_nontrivial)?;
        writeln!(f, "injective: {}", self.injective)?;
        write!(f, "exponent p: {}", self.exponent_p)
    }
}

/// Distinct images check used by callers holding raw images.
pub fn distinct(images: &[QuotientElement]) -> bool {
    images.iter().collect::<HashSet<_>>().len() == images.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn phi() -> FreeAutomorphism {
        FreeAutomorphism::from_text(
            Arc::new(Alphabet::standard(2)),
            &[("a", "a b"), ("b", "b")],
            Some(&[("a", "a b^-1"), ("b", "b")]),
        )
        .unwrap()
    }

    fn id2() -> FreeAutomorphism {
        FreeAutomorphism::identity(Arc::new(Alphabet::standard(2)))
    }

    #[test]
    fn layer_matrix_examples() {
        let f = phi();
        assert_eq!(layer_matrix(&f, 1).unwrap().matrix, vec![vec![1, 0], vec![1, 1]]);
        assert_eq!(layer_matrix(&f, 2).unwrap().matrix, vec![vec![1]]);
        let m3 = layer_matrix(&f, 3).unwrap();
        assert_eq!(m3.basis, ["[[b,a],a]", "[[b,a],b]"]);
        assert_eq!(m3.matrix, vec![vec![1, 0], vec![1, 1]]);
        assert_eq!(m3.lower_unitriangular, Some(true));
    }

    #[test]
    fn suspension_examples() {
        let f = phi();
        let a = f.alphabet().clone();
        let e = |s: &str| SuspensionElement::parse(s, &a).unwrap();
        assert_eq!(suspension_multiply(&e(",0"), &e("a b,3"), &f).unwrap(), e("a b,3"));
        assert_eq!(suspension_multiply(&e(",1"), &e("a,-1"), &f).unwrap(), e("a b,0"));
        assert_eq!(suspension_multiply(&e("a,1"), &e("a,1"), &f).unwrap(), e("a a b,2"));
        let g = e("a b^2,-2");
        let gi = suspension_inverse(&g, &f).unwrap();
        assert!(suspension_multiply(&g, &gi, &f).unwrap().is_identity());
    }

    #[test]
    fn quotient_examples() {
        let f = id2();
        let a = f.alphabet().clone();
        let s = SuspensionElement::parse_list("a,0;b,0;,1;a^-1 b^-1 a b,0", &a).unwrap();
        let (q, cert) = p_periodic_quotient(&f, &s, 7, 3).unwrap();
        assert_eq!(q.dimension(), 7);
        assert_eq!(cert.orders, vec![7, 7, 7, 7]);
        assert!(cert.exponent_p && cert.injective && cert.all_nontrivial);
        let at = SuspensionElement::parse("a,1", &a).unwrap();
        assert_eq!(q.element_order(&at).unwrap(), 7);
        assert_eq!(q.element_order(&SuspensionElement::identity()).unwrap(), 1);

        let (q2, _) = p_periodic_quotient(&f, &s[..1], 5, 2).unwrap();
        assert_eq!(q2.format_element(&q2.image(&s[0]).unwrap(), &a), "(1 + Xa) t^0");

        let g = phi();
        let t = SuspensionElement::parse(",1", &a).unwrap();
        let (q3, cert3) = p_periodic_quotient(&g, &[t.clone()], 7, 3).unwrap();
        assert_eq!(q3.phi_order(), 7);
        assert_eq!(cert3.orders, vec![7]);

        assert_eq!(p_periodic_quotient(&f, &s, 8, 3).unwrap_err(), Error::NotPrime(8));
        let bad = SuspensionElement::parse_list("a^-1 b^-1 a b,0", &a).unwrap();
        assert!(matches!(p_periodic_quotient(&f, &bad, 2, 2), Err(Error::NotInjective(_))));
    }

    #[test]
    fn intersection_examples() {
        let f = id2();
        let a = f.alphabet().clone();
        let e = |s: &str| SuspensionElement::parse(s, &a).unwrap();
        let (q, _) = p_periodic_quotient(&f, &[e("a,0")], 7, 3).unwrap();
        let (ok, w) = cyclic_intersection_trivial(&q, &e("a,0"), &e("a^2,0"), &a).unwrap();
        assert!(!ok);
        assert_eq!(w.unwrap().g_power, 2);
        assert!(cyclic_intersection_trivial(&q, &e("a,0"), &e("b,0"), &a).unwrap().0);
        assert!(cyclic_intersection_trivial(&q, &e("a,0"), &e(",1"), &a).unwrap().0);
        assert!(matches!(
            cyclic_intersection_trivial(&q, &e("a,0"), &e(",7"), &a),
            Err(Error::TrivialImage(_))
        ));
    }

    #[test]
    fn escalation_finds_parameters() {
        let f = phi();
        let a = f.alphabet().clone();
        let s = SuspensionElement::parse_list("a,0;[,1;a^-1 b^-1 a b,0;b,2", &a);
        assert!(s.is_err());
        let s = SuspensionElement::parse_list("a,0;,1;a^-1 b^-1 a b,0;b,2", &a).unwrap();
        let (q, cert) = auto_periodic_quotient(&f, &s, 6).unwrap();
        assert!(cert.injective && cert.all_nontrivial);
        assert!(q.prime() as usize >= q.dimension());
        assert!(cert.exponent_p);
        assert!(cert.orders.iter().all(|&o| o == q.prime()));
    }
}
