//! Freely reduced words, free-group arithmetic and automorphisms given by
//! generator images.
//!
//! Every constructor returns a freely reduced word, so equality of group
//! elements is equality of letter sequences.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};

/// A named generator and its position in the declared order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub index: usize,
}

/// An ordered, duplicate-free list of generator names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    gens: Vec<Generator>,
    lookup: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut gens = Vec::with_capacity(names.len());
        let mut lookup = HashMap::new();
        for (index, name) in names.iter().enumerate() {
            let name = name.as_ref().trim();
            if name.is_empty() || !is_identifier(name) {
                return Err(Error::parse(1, 1, format!("invalid generator name `{name}`")));
            }
            if lookup.insert(name.to_string(), index).is_some() {
                return Err(Error::DuplicateGenerator(name.to_string()));
            }
            gens.push(Generator {
                name: name.to_string(),
                index,
            });
        }
        Ok(Alphabet { gens, lookup })
    }

    /// The standard alphabet `a, b, c, ...` of the given rank.
    pub fn standard(rank: usize) -> Self {
        let names: Vec<String> = (0..rank)
            .map(|i| {
                if i < 26 {
                    ((b'a' + i as u8) as char).to_string()
                } else {
                    format!("x{i}")
                }
            })
            .collect();
        Alphabet::new(&names).expect("standard names are valid")
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn name(&self, index: usize) -> &str {
        &self.gens[index].name
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.lookup
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    /// Parses whitespace separated tokens `g`, `g^-1`, `g^k`; the empty string is the identity.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut letters = Vec::new();
        let mut column = 1;
        for token in text.split_whitespace() {
            let (name, exp) = parse_power_token(token).map_err(|m| Error::parse(1, column, m))?;
            let gen = self.index_of(name)?;
            let letter = Letter::new(gen, exp < 0);
            for _ in 0..exp.unsigned_abs() {
                letters.push(letter);
            }
            column += token.len() + 1;
        }
        Ok(Word::from_letters(letters))
    }

    pub fn display<'a>(&'a self, word: &'a Word) -> WordDisplay<'a> {
        WordDisplay {
            alphabet: self,
            word,
        }
    }

    pub fn format_word(&self, word: &Word) -> String {
        self.display(word).to_string()
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Splits `name^k` into its name and exponent; a bare name has exponent 1.
pub(crate) fn parse_power_token(token: &str) -> std::result::Result<(&str, i64), String> {
    match token.split_once('^') {
        None => Ok((token, 1)),
        Some((name, exp)) => {
            let exp: i64 = exp
                .parse()
                .map_err(|_| format!("bad exponent in `{token}`"))?;
            if exp == 0 {
                return Err(format!("zero exponent in `{token}`"));
            }
            Ok((name, exp))
        }
    }
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: usize, inverse: bool) -> Self {
        Letter { gen, inverse }
    }

    pub fn inv(self) -> Self {
        Letter {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn generator(gen: usize) -> Self {
        Word {
            letters: vec![Letter::new(gen, false)],
        }
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            if letters.last() == Some(&l.inv()) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        Word { letters }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `[u, v] = u^-1 v^-1 u v`.
    pub fn commutator(&self, other: &Word) -> Word {
        self.inverse()
            .mul(&other.inverse())
            .mul(self)
            .mul(other)
    }

    /// `self^-1 · other · self`.
    pub fn conjugate_by(&self, conjugator: &Word) -> Word {
        conjugator.inverse().mul(self).mul(conjugator)
    }

    pub fn exponent_sum(&self, gen: usize) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.gen == gen)
            .map(|l| l.sign())
            .sum()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.letters.iter().map(|l| l.gen).max()
    }

    /// Writes `self = u · core · u^-1` with `core` cyclically reduced.
    pub fn cyclic_decomposition(&self) -> (Word, Word) {
        let l = &self.letters;
        let mut i = 0;
        while i < l.len() / 2 && l[i] == l[l.len() - 1 - i].inv() {
            i += 1;
        }
        let u = Word {
            letters: l[..i].to_vec(),
        };
        let core = Word {
            letters: l[i..l.len() - i].to_vec(),
        };
        (u, core)
    }

    pub fn cyclically_reduced(&self) -> Word {
        self.cyclic_decomposition().1
    }

    /// The rotation `letters[k..] letters[..k]`; only meaningful for cyclically reduced words.
    pub fn rotate(&self, k: usize) -> Word {
        let n = self.letters.len();
        if n == 0 {
            return Word::identity();
        }
        let k = k % n;
        let mut letters = self.letters[k..].to_vec();
        letters.extend_from_slice(&self.letters[..k]);
        Word { letters }
    }

    /// The maximal root: returns `(r, k)` with `self = r^k`, `k >= 1` and `r` not a proper power.
    /// The identity returns `(identity, 0)`.
    pub fn root(&self) -> (Word, i64) {
        if self.is_identity() {
            return (Word::identity(), 0);
        }
        let (u, core) = self.cyclic_decomposition();
        let n = core.len();
        for period in 1..=n {
            if n % period != 0 {
                continue;
            }
            let candidate = &core.letters[..period];
            if core.letters.chunks(period).all(|c| c == candidate) {
                let r = Word {
                    letters: candidate.to_vec(),
                };
                let root = u.mul(&r).mul(&u.inverse());
                return (root, (n / period) as i64);
            }
        }
        unreachable!("period n always matches")
    }

    /// If `self = base^k` for some integer `k`, returns `k`. `base` must be nontrivial.
    pub fn power_of(&self, base: &Word) -> Option<i64> {
        if self.is_identity() {
            return Some(0);
        }
        if base.is_identity() {
            return None;
        }
        let (rb, kb) = base.root();
        let (rs, ks) = self.root();
        let ks = if rs == rb {
            ks
        } else if rs == rb.inverse() {
            -ks
        } else {
            return None;
        };
        if ks % kb == 0 {
            Some(ks / kb)
        } else {
            None
        }
    }
}

/// Finds `w` with `w^-1 u w = v`, comparing cyclic reductions up to rotation.
/// The smallest rotation wins, so the answer is deterministic.
pub fn free_conjugacy(u: &Word, v: &Word) -> Option<Word> {
    let (p, cu) = u.cyclic_decomposition();
    let (q, cv) = v.cyclic_decomposition();
    if cu.len() != cv.len() {
        return None;
    }
    if cu.is_empty() {
        return Some(p.mul(&q.inverse()));
    }
    let n = cu.len();
    (0..n).find_map(|k| {
        if cu.rotate(k) == cv {
            let s = Word {
                letters: cu.letters[..k].to_vec(),
            };
            Some(p.mul(&s).mul(&q.inverse()))
        } else {
            None
        }
    })
}

pub struct WordDisplay<'a> {
    alphabet: &'a Alphabet,
    word: &'a Word,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for run in self.word.letters.chunk_by(|a, b| a == b) {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let l = run[0];
            let name = self.alphabet.name(l.gen);
            let exp = run.len() as i64 * l.sign();
            if exp == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{exp}")?;
            }
        }
        Ok(())
    }
}

/// An endomorphism of a free group given by generator images, with optional
/// user-supplied inverse images (verified on construction).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeAutomorphism {
    alphabet: Arc<Alphabet>,
    images: Vec<Word>,
    inverse_images: Option<Vec<Word>>,
}

impl FreeAutomorphism {
    pub fn new(
        alphabet: Arc<Alphabet>,
        images: Vec<Word>,
        inverse_images: Option<Vec<Word>>,
    ) -> Result<Self> {
        let rank = alphabet.rank();
        let check = |ws: &[Word], what: &str| -> Result<()> {
            if ws.len() != rank {
                return Err(Error::InvalidAutomorphism(format!(
                    "{what}: expected {rank} images, found {}",
                    ws.len()
                )));
            }
            if ws.iter().any(|w| w.max_generator().is_some_and(|g| g >= rank)) {
                return Err(Error::AlphabetMismatch(format!("{what} uses a generator outside the alphabet")));
            }
            Ok(())
        };
        check(&images, "images")?;
        if let Some(inv) = &inverse_images {
            check(inv, "inverse images")?;
        }
        let phi = FreeAutomorphism {
            alphabet,
            images,
            inverse_images,
        };
        if let Some(inv) = &phi.inverse_images {
            for g in 0..rank {
                let x = Word::generator(g);
                let there = phi.substitute(&phi.images, &substitute_word(inv, &x));
                let back = substitute_word(inv, &phi.images[g]);
                if there != x || back != x {
                    return Err(Error::InvalidAutomorphism(format!(
                        "supplied inverse does not invert generator `{}`",
                        phi.alphabet.name(g)
                    )));
                }
            }
        }
        Ok(phi)
    }

    pub fn identity(alphabet: Arc<Alphabet>) -> Self {
        let rank = alphabet.rank();
        let images: Vec<Word> = (0..rank).map(Word::generator).collect();
        FreeAutomorphism {
            alphabet,
            inverse_images: Some(images.clone()),
            images,
        }
    }

    /// Builds from `(generator, image)` text pairs, e.g. `[("a", "a b"), ("b", "b")]`.
    pub fn from_text(
        alphabet: Arc<Alphabet>,
        images: &[(&str, &str)],
        inverse_images: Option<&[(&str, &str)]>,
    ) -> Result<Self> {
        let collect = |pairs: &[(&str, &str)]| -> Result<Vec<Word>> {
            let mut out = vec![None; alphabet.rank()];
            for (g, w) in pairs {
                out[alphabet.index_of(g)?] = Some(alphabet.parse_word(w)?);
            }
            out.into_iter()
                .enumerate()
                .map(|(i, w)| {
                    w.ok_or_else(|| {
                        Error::InvalidAutomorphism(format!("no image for `{}`", alphabet.name(i)))
                    })
                })
                .collect()
        };
        let imgs = collect(images)?;
        let inv = inverse_images.map(collect).transpose()?;
        FreeAutomorphism::new(alphabet.clone(), imgs, inv)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn rank(&self) -> usize {
        self.alphabet.rank()
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn inverse_images(&self) -> Option<&[Word]> {
        self.inverse_images.as_deref()
    }

    fn substitute(&self, images: &[Word], w: &Word) -> Word {
        substitute_word(images, w)
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        if w.max_generator().is_some_and(|g| g >= self.rank()) {
            return Err(Error::AlphabetMismatch("word uses a generator outside the alphabet".into()));
        }
        Ok(self.substitute(&self.images, w))
    }

    pub fn apply_inverse(&self, w: &Word) -> Result<Word> {
        let inv = self
            .inverse_images
            .as_ref()
            .ok_or_else(|| Error::MissingInverse("negative power of the monodromy".into()))?;
        if w.max_generator().is_some_and(|g| g >= self.rank()) {
            return Err(Error::AlphabetMismatch("word uses a generator outside the alphabet".into()));
        }
        Ok(self.substitute(inv, w))
    }

    /// `φ^k(w)`; negative `k` needs inverse images.
    pub fn apply_power(&self, w: &Word, k: i64) -> Result<Word> {
        let mut out = w.clone();
        for _ in 0..k.unsigned_abs() {
            out = if k > 0 {
                self.apply(&out)?
            } else {
                self.apply_inverse(&out)?
            };
        }
        Ok(out)
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &FreeAutomorphism) -> Result<FreeAutomorphism> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch("composing over different alphabets".into()));
        }
        let images = other
            .images
            .iter()
            .map(|w| self.substitute(&self.images, w))
            .collect();
        let inverse_images = match (&self.inverse_images, &other.inverse_images) {
            (Some(si), Some(oi)) => Some(si.iter().map(|w| substitute_word(oi, w)).collect()),
            _ => None,
        };
        Ok(FreeAutomorphism {
            alphabet: self.alphabet.clone(),
            images,
            inverse_images,
        })
    }

    /// Entry `(i, j)` is the exponent sum of generator `i` in the image of generator `j`.
    pub fn abelianization_matrix(&self) -> Vec<Vec<i64>> {
        let r = self.rank();
        (0..r)
            .map(|i| (0..r).map(|j| self.images[j].exponent_sum(i)).collect())
            .collect()
    }

    /// True iff `(M - I)^r = 0` for the abelianization matrix, in exact arithmetic.
    pub fn is_unipotent(&self) -> bool {
        let r = self.rank();
        let m = self.abelianization_matrix();
        let n: Vec<Vec<BigInt>> = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| BigInt::from(m[i][j] - i64::from(i == j)))
                    .collect()
            })
            .collect();
        let mut power = n.clone();
        for _ in 1..r {
            power = mat_mul(&power, &n);
        }
        r == 0 || power.iter().flatten().all(Zero::is_zero)
    }

    /// True iff every `φ(x_i) = x_i W_i` with `W_i` over generators of index `> i`.
    pub fn is_phi_ordered(&self) -> bool {
        self.images.iter().enumerate().all(|(i, w)| {
            let l = w.letters();
            !l.is_empty()
                && l[0] == Letter::new(i, false)
                && l[1..].iter().all(|x| x.gen > i)
        })
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| *w == Word::generator(i))
    }

    pub fn to_aut_text(&self) -> String {
        let mut out = String::from("gens");
        for g in self.alphabet.generators() {
            out.push(' ');
            out.push_str(&g.name);
        }
        out.push('\n');
        for (i, w) in self.images.iter().enumerate() {
            out.push_str(&format!("phi {} -> {}\n", self.alphabet.name(i), self.alphabet.display(w)));
        }
        if let Some(inv) = &self.inverse_images {
            for (i, w) in inv.iter().enumerate() {
                out.push_str(&format!("phinv {} -> {}\n", self.alphabet.name(i), self.alphabet.display(w)));
            }
        }
        out
    }
}

pub(crate) fn substitute_word(images: &[Word], w: &Word) -> Word {
    let mut out = Word::identity();
    for l in w.letters() {
        let img = &images[l.gen];
        if l.inverse {
            out = out.mul(&img.inverse());
        } else {
            out = out.mul(img);
        }
    }
    out
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] += &a[i][k] * &b[k][j];
            }
        }
    }
    out
}

/// Parses the `.aut` format: `gens a b ...`, then `phi g -> <word>` and optional `phinv g -> <word>` lines.
pub fn parse_aut(text: &str) -> Result<FreeAutomorphism> {
    let mut alphabet: Option<Arc<Alphabet>> = None;
    let mut images: Vec<Option<Word>> = Vec::new();
    let mut inverse: Vec<Option<Word>> = Vec::new();
    let mut saw_inverse = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let lineno = lineno + 1;
        if line.is_empty() {
            continue;
        }
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match head {
            "gens" => {
                let names: Vec<&str> = rest.split_whitespace().collect();
                let a = Alphabet::new(&names).map_err(|e| Error::parse(lineno, 1, e.to_string()))?;
                images = vec![None; a.rank()];
                inverse = vec![None; a.rank()];
                alphabet = Some(Arc::new(a));
            }
            "phi" | "phinv" => {
                let a = alphabet
                    .as_ref()
                    .ok_or_else(|| Error::parse(lineno, 1, "`gens` line must come first"))?;
                let (g, w) = rest
                    .split_once("->")
                    .ok_or_else(|| Error::parse(lineno, head.len() + 2, "expected `g -> word`"))?;
                let idx = a
                    .index_of(g.trim())
                    .map_err(|e| Error::parse(lineno, head.len() + 2, e.to_string()))?;
                let col = line.find("->").unwrap_or(0) + 3;
                let word = a
                    .parse_word(w)
                    .map_err(|e| Error::parse(lineno, col, e.to_string()))?;
                if head == "phi" {
                    images[idx] = Some(word);
                } else {
                    saw_inverse = true;
                    inverse[idx] = Some(word);
                }
            }
            other => {
                return Err(Error::parse(lineno, 1, format!("unknown directive `{other}`")));
            }
        }
    }
    let alphabet = alphabet.ok_or_else(|| Error::parse(1, 1, "missing `gens` line"))?;
    let fill = |ws: Vec<Option<Word>>, what: &str| -> Result<Vec<Word>> {
        ws.into_iter()
            .enumerate()
            .map(|(i, w)| {
                w.ok_or_else(|| Error::InvalidAutomorphism(format!("no {what} for `{}`", alphabet.name(i))))
            })
            .collect()
    };
    let images = fill(images, "image")?;
    let inverse = if saw_inverse {
        Some(fill(inverse, "inverse image")?)
    } else {
        None
    };
    FreeAutomorphism::new(alphabet.clone(), images, inverse)
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Arc<Alphabet> {
        Arc::new(Alphabet::standard(2))
    }

    #[test]
    fn reduce_examples() {
        let a = Alphabet::standard(2);
        assert!(a.parse_word("a a^-1").unwrap().is_identity());
        assert!(a.parse_word("a b b^-1 a^-1").unwrap().is_identity());
        let w = a.parse_word("a b a^-1 b^-1").unwrap();
        assert_eq!(a.format_word(&w), "a b a^-1 b^-1");
        assert_eq!(a.format_word(&a.parse_word("a^3 b^-2").unwrap()), "a^3 b^-2");
    }

    #[test]
    fn unknown_generator_is_an_error() {
        let a = Alphabet::standard(2);
        assert_eq!(a.parse_word("a c"), Err(Error::UnknownGenerator("c".into())));
        assert!(matches!(a.parse_word("a^0"), Err(Error::Parse { .. })));
        assert!(matches!(Alphabet::new(&["a", "a"]), Err(Error::DuplicateGenerator(_))));
    }

    #[test]
    fn commutator_examples() {
        let a = Alphabet::standard(3);
        let x = a.parse_word("a").unwrap();
        let y = a.parse_word("b").unwrap();
        assert!(x.commutator(&x).is_identity());
        assert_eq!(a.format_word(&x.commutator(&y)), "a^-1 b^-1 a b");
        // [ab,c] = [a,c][[a,c],b][b,c] and [c,ab] = [c,b][c,a][[c,a],b]
        let z = a.parse_word("c").unwrap();
        let ac = x.commutator(&z);
        let lhs = x.mul(&y).commutator(&z);
        assert_eq!(lhs, ac.mul(&ac.commutator(&y)).mul(&y.commutator(&z)));
        let ca = z.commutator(&x);
        let lhs = z.commutator(&x.mul(&y));
        assert_eq!(lhs, z.commutator(&y).mul(&ca).mul(&ca.commutator(&y)));
    }

    #[test]
    fn apply_examples() {
        let phi = FreeAutomorphism::from_text(ab(), &[("a", "a b"), ("b", "b")], None).unwrap();
        let a = phi.alphabet().clone();
        let x = a.parse_word("a").unwrap();
        assert_eq!(a.format_word(&phi.apply(&x).unwrap()), "a b");
        assert_eq!(a.format_word(&phi.apply(&x.inverse()).unwrap()), "b^-1 a^-1");
        let phi2 = phi.compose(&phi).unwrap();
        assert_eq!(a.format_word(&phi2.apply(&x).unwrap()), "a b^2");
        let bad = Alphabet::standard(3).parse_word("c").unwrap();
        assert!(matches!(phi.apply(&bad), Err(Error::AlphabetMismatch(_))));
    }

    #[test]
    fn abelianization_and_unipotence() {
        let id = FreeAutomorphism::identity(ab());
        assert_eq!(id.abelianization_matrix(), vec![vec![1, 0], vec![0, 1]]);
        assert!(id.is_unipotent());
        let phi = FreeAutomorphism::from_text(ab(), &[("a", "a b"), ("b", "b")], None).unwrap();
        assert_eq!(phi.abelianization_matrix(), vec![vec![1, 0], vec![1, 1]]);
        assert!(phi.is_unipotent());
        let swap = FreeAutomorphism::from_text(ab(), &[("a", "b"), ("b", "a")], None).unwrap();
        assert_eq!(swap.abelianization_matrix(), vec![vec![0, 1], vec![1, 0]]);
        assert!(!swap.is_unipotent());
    }

    #[test]
    fn phi_ordered_examples() {
        let phi = FreeAutomorphism::from_text(ab(), &[("a", "a b"), ("b", "b")], None).unwrap();
        assert!(phi.is_phi_ordered());
        let psi = FreeAutomorphism::from_text(ab(), &[("a", "a"), ("b", "b a")], None).unwrap();
        assert!(!psi.is_phi_ordered());
        let ba = Arc::new(Alphabet::new(&["b", "a"]).unwrap());
        let psi2 = FreeAutomorphism::from_text(ba, &[("a", "a"), ("b", "b a")], None).unwrap();
        assert!(psi2.is_phi_ordered());
        let swap = FreeAutomorphism::from_text(ab(), &[("a", "b"), ("b", "a")], None).unwrap();
        assert!(!swap.is_phi_ordered());
    }

    #[test]
    fn inverse_images_are_verified() {
        let ok = FreeAutomorphism::from_text(
            ab(),
            &[("a", "a b"), ("b", "b")],
            Some(&[("a", "a b^-1"), ("b", "b")]),
        );
        assert!(ok.is_ok());
        let bad = FreeAutomorphism::from_text(
            ab(),
            &[("a", "a b"), ("b", "b")],
            Some(&[("a", "a b"), ("b", "b")]),
        );
        assert!(matches!(bad, Err(Error::InvalidAutomorphism(_))));
        let phi = ok.unwrap();
        let w = phi.alphabet().parse_word("a b a^-1").unwrap();
        assert_eq!(phi.apply_inverse(&phi.apply(&w).unwrap()).unwrap(), w);
    }

    #[test]
    fn free_conjugacy_examples() {
        let a = Alphabet::standard(2);
        let u = a.parse_word("a b").unwrap();
        let v = a.parse_word("b a").unwrap();
        let w = free_conjugacy(&u, &v).unwrap();
        assert_eq!(a.format_word(&w), "a");
        assert_eq!(u.conjugate_by(&w), v);
        assert_eq!(free_conjugacy(&Word::generator(0), &Word::generator(1)), None);
        assert_eq!(free_conjugacy(&Word::generator(0), &Word::generator(0)), Some(Word::identity()));
    }

    #[test]
    fn roots() {
        let a = Alphabet::standard(2);
        let u = a.parse_word("b^2").unwrap();
        let w = a.parse_word("a b").unwrap().pow(3).conjugate_by(&u);
        let (r, k) = w.root();
        assert_eq!(k, 3);
        assert_eq!(r.pow(3), w);
        assert_eq!(w.power_of(&r.pow(-1)), Some(-3));
        assert_eq!(a.parse_word("a b").unwrap().power_of(&Word::generator(0)), None);
    }

    #[test]
    fn aut_format() {
        let text = "gens a b\nphi a -> a b\nphi b -> b\nphinv a -> a b^-1\nphinv b -> b\n";
        let phi = parse_aut(text).unwrap();
        assert_eq!(parse_aut(&phi.to_aut_text()).unwrap(), phi);
        let err = parse_aut("gens a b\nphi a -> a c\nphi b -> b\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
