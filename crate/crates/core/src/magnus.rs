//! Truncated noncommutative power series and the Magnus embedding
//! `x_i -> 1 + X_i`.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hall::{HallBasis, HallNormalForm};
use crate::word::{Alphabet, FreeAutomorphism, Word};

/// Default truncation degree.
pub const DEFAULT_TRUNCATION: usize = 6;

/// Coefficient ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ring {
    Integers,
    Mod(u64),
}

impl Ring {
    fn normalize(&self, c: BigInt) -> BigInt {
        match self {
            Ring::Integers => c,
            Ring::Mod(p) => c.mod_floor(&BigInt::from(*p)),
        }
    }

    fn inverse(&self, c: &BigInt) -> Result<BigInt> {
        match self {
            Ring::Integers => {
                if c.is_one() || *c == -BigInt::one() {
                    Ok(c.clone())
                } else {
                    Err(Error::NonUnit)
                }
            }
            Ring::Mod(p) => {
                let p = BigInt::from(*p);
                let g = c.extended_gcd(&p);
                if !g.gcd.is_one() {
                    return Err(Error::NonUnit);
                }
                Ok(g.x.mod_floor(&p))
            }
        }
    }
}

/// A monomial `X_{i1} X_{i2} ...`, ordered by degree and then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<usize>);

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn degree(&self) -> usize {
        self.0.len()
    }
}

/// A series truncated at degree `trunc`: only monomials of degree `< trunc` are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    trunc: usize,
    ring: Ring,
    coeffs: BTreeMap<Monomial, BigInt>,
}

impl TruncatedSeries {
    pub fn zero(trunc: usize, ring: Ring) -> Self {
        TruncatedSeries {
            trunc,
            ring,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(c: impl Into<BigInt>, trunc: usize, ring: Ring) -> Self {
        let mut s = TruncatedSeries::zero(trunc, ring);
        s.add_term(Monomial(Vec::new()), c.into());
        s
    }

    pub fn one(trunc: usize, ring: Ring) -> Self {
        TruncatedSeries::constant(1, trunc, ring)
    }

    /// `X_g`.
    pub fn variable(g: usize, trunc: usize, ring: Ring) -> Self {
        let mut s = TruncatedSeries::zero(trunc, ring);
        s.add_term(Monomial(vec![g]), BigInt::one());
        s
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, m: &[usize]) -> BigInt {
        self.coeffs
            .get(&Monomial(m.to_vec()))
            .cloned()
            .unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coefficient(&[]).is_one()
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        if m.degree() >= self.trunc {
            return;
        }
        match self.coeffs.entry(m) {
            Entry::Vacant(v) => {
                let c = self.ring.normalize(c);
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let c = self.ring.normalize(o.get() + c);
                if c.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = c;
                }
            }
        }
    }

    fn check(&self, other: &TruncatedSeries) {
        assert_eq!(self.trunc, other.trunc, "truncation mismatch");
        assert_eq!(self.ring, other.ring, "ring mismatch");
    }

    pub fn add(&self, other: &TruncatedSeries) -> TruncatedSeries {
        self.check(other);
        let mut out = self.clone();
        for (m, c) in &other.coeffs {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.trunc, self.ring);
        for (m, c) in &self.coeffs {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn sub(&self, other: &TruncatedSeries) -> TruncatedSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigInt) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.trunc, self.ring);
        for (m, c) in &self.coeffs {
            out.add_term(m.clone(), c * k);
        }
        out
    }

    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        self.check(other);
        let mut acc: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (m1, c1) in &self.coeffs {
            for (m2, c2) in &other.coeffs {
                if m1.degree() + m2.degree() >= self.trunc {
                    continue;
                }
                let mut m = m1.0.clone();
                m.extend_from_slice(&m2.0);
                *acc.entry(Monomial(m)).or_default() += c1 * c2;
            }
        }
        let coeffs = acc
            .into_iter()
            .map(|(m, c)| (m, self.ring.normalize(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        TruncatedSeries {
            trunc: self.trunc,
            ring: self.ring,
            coeffs,
        }
    }

    /// Inverse of a series whose constant term is a unit of the ring.
    pub fn invert(&self) -> Result<TruncatedSeries> {
        let c0 = self.coefficient(&[]);
        let c0_inv = self.ring.inverse(&c0)?;
        // self = c0 (1 + y)  =>  self^-1 = (sum (-y)^k) c0^-1
        let y = self
            .scale(&c0_inv)
            .sub(&TruncatedSeries::one(self.trunc, self.ring));
        let minus_y = y.neg();
        let mut term = TruncatedSeries::one(self.trunc, self.ring);
        let mut sum = term.clone();
        for _ in 1..self.trunc {
            term = term.mul(&minus_y);
            sum = sum.add(&term);
        }
        Ok(sum.scale(&c0_inv))
    }

    pub fn pow(&self, k: u64) -> TruncatedSeries {
        let mut out = TruncatedSeries::one(self.trunc, self.ring);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Least degree `>= 1` carrying a nonzero coefficient of `self - 1`.
    pub fn leading_degree(&self) -> Option<usize> {
        let diff = self.sub(&TruncatedSeries::one(self.trunc, self.ring));
        diff.coeffs.keys().map(Monomial::degree).min()
    }

    /// Homogeneous component of degree `d`.
    pub fn component(&self, d: usize) -> TruncatedSeries {
        TruncatedSeries {
            trunc: self.trunc,
            ring: self.ring,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Same coefficients below degree `upto` (exclusive).
    pub fn agrees_below(&self, other: &TruncatedSeries, upto: usize) -> bool {
        let low = |s: &TruncatedSeries| -> BTreeMap<Monomial, BigInt> {
            s.coeffs
                .iter()
                .filter(|(m, _)| m.degree() < upto)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect()
        };
        low(self) == low(other)
    }

    pub fn format(&self, alphabet: &Alphabet) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.coeffs.iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mono = m
                .0
                .iter()
                .map(|&g| format!("X{}", alphabet.name(g)))
                .collect::<Vec<_>>()
                .join("*");
            if mono.is_empty() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{abs}*{mono}"));
            }
        }
        out
    }

    /// Parses the output of [`TruncatedSeries::format`].
    pub fn parse(text: &str, alphabet: &Alphabet, trunc: usize, ring: Ring) -> Result<Self> {
        let mut s = TruncatedSeries::zero(trunc, ring);
        let cleaned = text.trim();
        if cleaned == "0" {
            return Ok(s);
        }
        let mut sign = 1i64;
        let mut first = true;
        for tok in cleaned.split_whitespace() {
            match tok {
                "+" if !first => sign = 1,
                "-" if !first => sign = -1,
                _ => {
                    let (neg, body) = match tok.strip_prefix('-') {
                        Some(rest) if first => (true, rest),
                        _ => (false, tok),
                    };
                    let mut coeff = BigInt::from(if neg { -sign } else { sign });
                    let mut mono = Vec::new();
                    for factor in body.split('*') {
                        if let Some(name) = factor.strip_prefix('X') {
                            mono.push(alphabet.index_of(name)?);
                        } else {
                            let k: BigInt = factor
                                .parse()
                                .map_err(|_| Error::parse(1, 1, format!("bad series factor `{factor}`")))?;
                            coeff *= k;
                        }
                    }
                    s.add_term(Monomial(mono), coeff);
                    first = false;
                    sign = 1;
                }
            }
        }
        Ok(s)
    }
}

impl TruncatedSeries {
    /// Right multiplication by `(1 + X_g)` or its inverse `sum (-X_g)^k`.
    pub fn mul_generator(&self, g: usize, inverse: bool) -> TruncatedSeries {
        let mut out = self.clone();
        for (m, c) in &self.coeffs {
            let mut mono = m.0.clone();
            let mut coeff = c.clone();
            let top = if inverse { self.trunc } else { m.degree() + 2 };
            for _ in m.degree() + 1..top.min(self.trunc) {
                mono.push(g);
                if inverse {
                    coeff = -coeff;
                }
                out.add_term(Monomial(mono.clone()), coeff.clone());
            }
        }
        out
    }
}

/// The Magnus image of a word.
pub fn embed(w: &Word, trunc: usize, ring: Ring) -> TruncatedSeries {
    w.letters()
        .iter()
        .fold(TruncatedSeries::one(trunc, ring), |acc, l| {
            acc.mul_generator(l.gen, l.inverse)
        })
}

/// The Magnus image of a collected form, built from images of its basic commutators.
pub fn embed_normal_form(nf: &HallNormalForm, trunc: usize, ring: Ring) -> TruncatedSeries {
    let basis = nf.basis();
    let mut images: HashMap<usize, (TruncatedSeries, TruncatedSeries)> = HashMap::new();
    fn image(
        id: usize,
        basis: &HallBasis,
        trunc: usize,
        ring: Ring,
        memo: &mut HashMap<usize, (TruncatedSeries, TruncatedSeries)>,
    ) -> (TruncatedSeries, TruncatedSeries) {
        if let Some(v) = memo.get(&id) {
            return v.clone();
        }
        let v = match basis.factors(id) {
            None => {
                let one = TruncatedSeries::one(trunc, ring);
                (one.mul_generator(id, false), one.mul_generator(id, true))
            }
            Some((l, r)) => {
                let (x, xi) = image(l, basis, trunc, ring, memo);
                let (y, yi) = image(r, basis, trunc, ring, memo);
                (xi.mul(&yi).mul(&x).mul(&y), yi.mul(&xi).mul(&y).mul(&x))
            }
        };
        memo.insert(id, v.clone());
        v
    }
    let mut out = TruncatedSeries::one(trunc, ring);
    for &(id, e) in nf.terms() {
        let (x, xi) = image(id, basis, trunc, ring, &mut images);
        let base = if e < 0 { xi } else { x };
        out = out.mul(&base.pow(e.unsigned_abs()));
    }
    out
}

/// Weight of a word as seen by the embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GammaWeight {
    /// The identity element.
    Infinite,
    Exact(usize),
    /// Nothing nonzero below the truncation degree.
    AtLeast(usize),
}

impl fmt::Display for GammaWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaWeight::Infinite => write!(f, "infinite"),
            GammaWeight::Exact(n) => write!(f, "{n}"),
            GammaWeight::AtLeast(n) => write!(f, ">= {n}"),
        }
    }
}

pub fn gamma_weight(w: &Word, trunc: usize) -> GammaWeight {
    if w.is_identity() {
        return GammaWeight::Infinite;
    }
    match embed(w, trunc, Ring::Integers).leading_degree() {
        Some(d) => GammaWeight::Exact(d),
        None => GammaWeight::AtLeast(trunc),
    }
}

/// A filtration-preserving algebra endomorphism given by the images of the `X_g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraEndomorphism {
    trunc: usize,
    ring: Ring,
    images: Vec<TruncatedSeries>,
}

impl AlgebraEndomorphism {
    pub fn new(images: Vec<TruncatedSeries>, trunc: usize, ring: Ring) -> Result<Self> {
        for s in &images {
            if s.trunc != trunc || s.ring != ring {
                return Err(Error::Precondition("image series over a different algebra".into()));
            }
            if !s.coefficient(&[]).is_zero() {
                return Err(Error::Precondition("images must have zero constant term".into()));
            }
        }
        Ok(AlgebraEndomorphism { trunc, ring, images })
    }

    pub fn images(&self) -> &[TruncatedSeries] {
        &self.images
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn apply(&self, s: &TruncatedSeries) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.trunc, self.ring);
        for (m, c) in s.terms() {
            let mut term = TruncatedSeries::constant(c.clone(), self.trunc, self.ring);
            for &g in &m.0 {
                term = term.mul(&self.images[g]);
                if term.is_zero() {
                    break;
                }
            }
            out = out.add(&term);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(g, s)| *s == TruncatedSeries::variable(g, self.trunc, self.ring))
    }
}

/// `X_g -> embed(φ(g)) - 1`.
pub fn induced_endomorphism(phi: &FreeAutomorphism, trunc: usize, ring: Ring) -> AlgebraEndomorphism {
    let one = TruncatedSeries::one(trunc, ring);
    let images = phi
        .images()
        .iter()
        .map(|w| embed(w, trunc, ring).sub(&one))
        .collect();
    AlgebraEndomorphism { trunc, ring, images }
}

/// Dimension of the truncated algebra: number of monomials of degree `< trunc`.
pub fn algebra_dimension(rank: usize, trunc: usize) -> usize {
    (0..trunc).map(|i| rank.pow(i as u32)).sum()
}

/// Certifies that two words agree modulo `γ_{n+1}`: their images agree in degrees `<= n`.
pub fn agree_modulo_gamma(u: &Word, v: &Word, n: usize) -> bool {
    embed(u, n + 1, Ring::Integers) == embed(v, n + 1, Ring::Integers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn ab() -> Alphabet {
        Alphabet::standard(2)
    }

    #[test]
    fn embed_examples() {
        let a = ab();
        let e = |s: &str, n| embed(&a.parse_word(s).unwrap(), n, Ring::Integers).format(&a);
        assert_eq!(e("", 3), "1");
        assert_eq!(e("a", 3), "1 + Xa");
        assert_eq!(e("a^-1", 3), "1 - Xa + Xa*Xa");
    }

    #[test]
    fn arithmetic_examples() {
        let a = ab();
        let r = Ring::Integers;
        let x = TruncatedSeries::one(3, r).add(&TruncatedSeries::variable(0, 3, r));
        let y = TruncatedSeries::one(3, r).add(&TruncatedSeries::variable(1, 3, r));
        assert_eq!(x.mul(&y).format(&a), "1 + Xa + Xb + Xa*Xb");
        assert!(TruncatedSeries::one(3, r).invert().unwrap().is_one());
        let s = TruncatedSeries::parse("1 + Xa + Xb", &a, 2, r).unwrap();
        assert_eq!(s.invert().unwrap().format(&a), "1 - Xa - Xb");
        assert_eq!(TruncatedSeries::constant(2, 3, r).invert(), Err(Error::NonUnit));
        let m = TruncatedSeries::constant(2, 3, Ring::Mod(5));
        assert_eq!(m.mul(&m.invert().unwrap()), TruncatedSeries::one(3, Ring::Mod(5)));
    }

    #[test]
    fn gamma_weight_examples() {
        let a = ab();
        let x = a.parse_word("a").unwrap();
        let y = a.parse_word("b").unwrap();
        assert_eq!(gamma_weight(&x, 6), GammaWeight::Exact(1));
        assert_eq!(gamma_weight(&x.commutator(&y), 6), GammaWeight::Exact(2));
        assert_eq!(gamma_weight(&x.commutator(&y).commutator(&y), 6), GammaWeight::Exact(3));
        assert_eq!(gamma_weight(&Word::identity(), 6), GammaWeight::Infinite);
        assert_eq!(gamma_weight(&x.commutator(&y), 2), GammaWeight::AtLeast(2));
    }

    #[test]
    fn induced_endomorphism_examples() {
        let al = Arc::new(ab());
        let phi = FreeAutomorphism::from_text(al.clone(), &[("a", "a b"), ("b", "b")], None).unwrap();
        let f = induced_endomorphism(&phi, 2, Ring::Integers);
        assert_eq!(f.images()[0].format(&al), "Xa + Xb");
        assert_eq!(f.images()[1].format(&al), "Xb");
        let f3 = induced_endomorphism(&phi, 3, Ring::Integers);
        let w = al.parse_word("a b").unwrap();
        assert_eq!(
            f3.apply(&embed(&w, 3, Ring::Integers)),
            embed(&al.parse_word("a b b").unwrap(), 3, Ring::Integers)
        );
        let id = induced_endomorphism(&FreeAutomorphism::identity(al), 4, Ring::Integers);
        assert!(id.is_identity());
    }

    #[test]
    fn series_round_trip() {
        let a = ab();
        let w = a.parse_word("a^-2 b a b^-3").unwrap();
        let s = embed(&w, 4, Ring::Integers);
        assert_eq!(TruncatedSeries::parse(&s.format(&a), &a, 4, Ring::Integers).unwrap(), s);
    }

    #[test]
    fn dimension() {
        assert_eq!(algebra_dimension(2, 3), 7);
        assert_eq!(algebra_dimension(3, 2), 4);
    }
}
