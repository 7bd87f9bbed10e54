//! Basic commutators, their total order, and the collection process
//! modulo a term of the lower central series.

use std::cmp::Ordering;
use std::cell::RefCell;
use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::word::{Alphabet, Letter, Word};

/// Default number of rewriting steps before `collect` gives up.
pub const DEFAULT_STEP_BUDGET: usize = 1_000_000;

/// Default cap on the size of an enumerated basis.
pub const DEFAULT_BASIS_CAP: usize = 200_000;

/// A bracketed expression over generator indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BasicCommutator {
    Gen(usize),
    Bracket(Box<BasicCommutator>, Box<BasicCommutator>),
}

impl BasicCommutator {
    pub fn bracket(left: BasicCommutator, right: BasicCommutator) -> Self {
        BasicCommutator::Bracket(Box::new(left), Box::new(right))
    }

    pub fn weight(&self) -> usize {
        match self {
            BasicCommutator::Gen(_) => 1,
            BasicCommutator::Bracket(l, r) => l.weight() + r.weight(),
        }
    }

    /// The commutator expanded as a free-group word.
    pub fn to_word(&self) -> Word {
        match self {
            BasicCommutator::Gen(g) => Word::generator(*g),
            BasicCommutator::Bracket(l, r) => l.to_word().commutator(&r.to_word()),
        }
    }

    /// True iff the tree satisfies the admissibility conditions at every node.
    pub fn is_basic(&self) -> bool {
        match self {
            BasicCommutator::Gen(_) => true,
            BasicCommutator::Bracket(l, r) => {
                l.is_basic()
                    && r.is_basic()
                    && compare(l, r) == Ordering::Greater
                    && match l.as_ref() {
                        BasicCommutator::Gen(_) => true,
                        BasicCommutator::Bracket(_, lr) => compare(r, lr) != Ordering::Less,
                    }
            }
        }
    }

    pub fn format(&self, alphabet: &Alphabet) -> String {
        match self {
            BasicCommutator::Gen(g) => alphabet.name(*g).to_string(),
            BasicCommutator::Bracket(l, r) => {
                format!("[{},{}]", l.format(alphabet), r.format(alphabet))
            }
        }
    }

    /// Parses `a`, `[b,a]`, `[[b,a],a]`.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let c = parse_tree(&chars, &mut pos, alphabet)?;
        if pos != chars.len() {
            return Err(Error::parse(1, pos + 1, "trailing input after commutator"));
        }
        Ok(c)
    }
}

fn parse_tree(chars: &[char], pos: &mut usize, alphabet: &Alphabet) -> Result<BasicCommutator> {
    if chars.get(*pos) == Some(&'[') {
        *pos += 1;
        let l = parse_tree(chars, pos, alphabet)?;
        if chars.get(*pos) != Some(&',') {
            return Err(Error::parse(1, *pos + 1, "expected `,`"));
        }
        *pos += 1;
        let r = parse_tree(chars, pos, alphabet)?;
        if chars.get(*pos) != Some(&']') {
            return Err(Error::parse(1, *pos + 1, "expected `]`"));
        }
        *pos += 1;
        Ok(BasicCommutator::bracket(l, r))
    } else {
        let start = *pos;
        while *pos < chars.len() && !matches!(chars[*pos], '[' | ']' | ',' | '^' | '*') {
            *pos += 1;
        }
        if start == *pos {
            return Err(Error::parse(1, start + 1, "expected a generator or `[`"));
        }
        let name: String = chars[start..*pos].iter().collect();
        Ok(BasicCommutator::Gen(alphabet.index_of(&name)?))
    }
}

/// The order on basic commutators: by weight, generators by index, and equal
/// weight brackets by right factor first, then left factor.
pub fn compare(c1: &BasicCommutator, c2: &BasicCommutator) -> Ordering {
    use BasicCommutator::*;
    c1.weight().cmp(&c2.weight()).then_with(|| match (c1, c2) {
        (Gen(x), Gen(y)) => x.cmp(y),
        (Bracket(l1, r1), Bracket(l2, r2)) => compare(r1, r2).then_with(|| compare(l1, l2)),
        _ => unreachable!("equal weight implies equal shape at the root"),
    })
}

/// Signed comparison: `c` and `c^-1` are equivalent.
pub fn compare_signed(c1: &(BasicCommutator, i64), c2: &(BasicCommutator, i64)) -> Ordering {
    compare(&c1.0, &c2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    Gen(usize),
    Pair(usize, usize),
}

/// All basic commutators of weight at most `max_weight`, indexed by their position in the order.
#[derive(Debug)]
pub struct HallBasis {
    rank: usize,
    max_weight: usize,
    nodes: Vec<Node>,
    weights: Vec<usize>,
    weight_start: Vec<usize>,
    by_pair: HashMap<(usize, usize), usize>,
    words: OnceLock<Vec<Word>>,
}

impl HallBasis {
    fn build(rank: usize, max_weight: usize, cap: usize) -> Result<Self> {
        let mut nodes: Vec<Node> = (0..rank).map(Node::Gen).collect();
        let mut weights = vec![1; rank];
        let mut weight_start = vec![0, 0, rank];
        let mut by_pair = HashMap::new();
        for w in 2..=max_weight {
            let mut fresh: Vec<(usize, usize)> = Vec::new();
            for wl in (1..w).rev() {
                let wr = w - wl;
                if wr > wl {
                    continue;
                }
                for l in weight_start[wl]..weight_start[wl + 1] {
                    for r in weight_start[wr]..weight_start[wr + 1] {
                        if l <= r {
                            continue;
                        }
                        let admissible = match nodes[l] {
                            Node::Gen(_) => true,
                            Node::Pair(_, lr) => r >= lr,
                        };
                        if admissible {
                            fresh.push((l, r));
                        }
                    }
                }
            }
            fresh.sort_by_key(|&(l, r)| (r, l));
            if nodes.len() + fresh.len() > cap {
                return Err(Error::ResourceBound(format!(
                    "more than {cap} basic commutators up to weight {max_weight}"
                )));
            }
            for (l, r) in fresh {
                by_pair.insert((l, r), nodes.len());
                nodes.push(Node::Pair(l, r));
                weights.push(w);
            }
            weight_start.push(nodes.len());
        }
        Ok(HallBasis {
            rank,
            max_weight,
            nodes,
            weights,
            weight_start,
            by_pair,
            words: OnceLock::new(),
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn max_weight(&self) -> usize {
        self.max_weight
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight(&self, id: usize) -> usize {
        self.weights[id]
    }

    /// Ids of the basic commutators of weight exactly `w`.
    pub fn ids_of_weight(&self, w: usize) -> std::ops::Range<usize> {
        if w == 0 || w > self.max_weight {
            return 0..0;
        }
        self.weight_start[w]..self.weight_start[w + 1]
    }

    /// Left and right factors of a bracket, `None` for a generator.
    pub fn factors(&self, id: usize) -> Option<(usize, usize)> {
        match self.nodes[id] {
            Node::Gen(_) => None,
            Node::Pair(l, r) => Some((l, r)),
        }
    }

    /// The id of `[x, y]` if it is a basic commutator within the weight bound.
    pub fn bracket_id(&self, x: usize, y: usize) -> Option<usize> {
        self.by_pair.get(&(x, y)).copied()
    }

    pub fn tree(&self, id: usize) -> BasicCommutator {
        match self.nodes[id] {
            Node::Gen(g) => BasicCommutator::Gen(g),
            Node::Pair(l, r) => BasicCommutator::bracket(self.tree(l), self.tree(r)),
        }
    }

    pub fn id_of(&self, c: &BasicCommutator) -> Option<usize> {
        match c {
            BasicCommutator::Gen(g) => (*g < self.rank).then_some(*g),
            BasicCommutator::Bracket(l, r) => self.bracket_id(self.id_of(l)?, self.id_of(r)?),
        }
    }

    pub fn word(&self, id: usize) -> &Word {
        &self.words.get_or_init(|| {
            let mut out: Vec<Word> = Vec::with_capacity(self.nodes.len());
            for node in &self.nodes {
                let w = match *node {
                    Node::Gen(g) => Word::generator(g),
                    Node::Pair(l, r) => out[l].commutator(&out[r]),
                };
                out.push(w);
            }
            out
        })[id]
    }

    pub fn format(&self, id: usize, alphabet: &Alphabet) -> String {
        self.tree(id).format(alphabet)
    }
}

type BasisCache = RwLock<HashMap<(usize, usize), Arc<HallBasis>>>;

fn basis_cache() -> &'static BasisCache {
    static CACHE: OnceLock<BasisCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The basic commutators of weight `<= max_weight` on `rank` generators, in increasing order.
pub fn enumerate_basic(rank: usize, max_weight: usize) -> Result<Arc<HallBasis>> {
    enumerate_basic_capped(rank, max_weight, DEFAULT_BASIS_CAP)
}

pub fn enumerate_basic_capped(rank: usize, max_weight: usize, cap: usize) -> Result<Arc<HallBasis>> {
    if rank == 0 || max_weight == 0 {
        return Err(Error::Precondition("rank and weight must be positive".into()));
    }
    if let Some(b) = basis_cache().read().expect("cache lock").get(&(rank, max_weight)) {
        return Ok(b.clone());
    }
    let basis = Arc::new(HallBasis::build(rank, max_weight, cap)?);
    let mut cache = basis_cache().write().expect("cache lock");
    Ok(cache.entry((rank, max_weight)).or_insert(basis).clone())
}

/// An ascending product `c1^n1 c2^n2 ...` of basic commutators of weight at most `n`.
#[derive(Debug, Clone)]
pub struct HallNormalForm {
    basis: Arc<HallBasis>,
    weight_bound: usize,
    terms: Vec<(usize, i64)>,
}

impl PartialEq for HallNormalForm {
    fn eq(&self, other: &Self) -> bool {
        self.basis.rank == other.basis.rank
            && self.weight_bound == other.weight_bound
            && self.terms == other.terms
    }
}

impl Eq for HallNormalForm {}

impl HallNormalForm {
    pub fn identity(basis: Arc<HallBasis>, weight_bound: usize) -> Self {
        HallNormalForm {
            basis,
            weight_bound,
            terms: Vec::new(),
        }
    }

    pub fn basis(&self) -> &Arc<HallBasis> {
        &self.basis
    }

    pub fn weight_bound(&self) -> usize {
        self.weight_bound
    }

    /// `(id, exponent)` pairs with strictly increasing ids.
    pub fn terms(&self) -> &[(usize, i64)] {
        &self.terms
    }

    pub fn is_identity(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn exponent(&self, id: usize) -> i64 {
        self.terms
            .iter()
            .find(|t| t.0 == id)
            .map_or(0, |t| t.1)
    }

    /// Exponents on the weight-`w` basic commutators, in order.
    pub fn coordinates(&self, w: usize) -> Vec<i64> {
        self.basis.ids_of_weight(w).map(|id| self.exponent(id)).collect()
    }

    /// The least weight carrying a nonzero exponent.
    pub fn leading_weight(&self) -> Option<usize> {
        self.terms.first().map(|t| self.basis.weight(t.0))
    }

    pub fn expand(&self) -> Word {
        self.terms
            .iter()
            .fold(Word::identity(), |acc, &(id, e)| acc.mul(&self.basis.word(id).pow(e)))
    }

    pub fn format(&self, alphabet: &Alphabet) -> String {
        if self.terms.is_empty() {
            return "1".to_string();
        }
        self.terms
            .iter()
            .map(|&(id, e)| format!("{}^{}", self.basis.format(id, alphabet), e))
            .collect::<Vec<_>>()
            .join(" * ")
    }

    /// Parses `c1^n1 * c2^n2 * ...` (or `1`), checking that terms ascend.
    pub fn parse(text: &str, alphabet: &Alphabet, weight_bound: usize) -> Result<Self> {
        let basis = enumerate_basic(alphabet.rank(), weight_bound)?;
        let text = text.trim();
        if text == "1" || text.is_empty() {
            return Ok(HallNormalForm::identity(basis, weight_bound));
        }
        let mut terms: Vec<(usize, i64)> = Vec::new();
        for piece in text.split('*') {
            let piece = piece.trim();
            let (comm, exp) = match piece.rfind('^') {
                Some(i) if !piece[i..].contains(']') => (&piece[..i], &piece[i + 1..]),
                _ => (piece, "1"),
            };
            let tree = BasicCommutator::parse(comm, alphabet)?;
            let id = basis.id_of(&tree).ok_or_else(|| {
                Error::parse(1, 1, format!("`{comm}` is not a basic commutator of weight <= {weight_bound}"))
            })?;
            let e: i64 = exp
                .trim()
                .parse()
                .map_err(|_| Error::parse(1, 1, format!("bad exponent `{exp}`")))?;
            if e == 0 || terms.last().is_some_and(|t| t.0 >= id) {
                return Err(Error::parse(1, 1, "terms must ascend with nonzero exponents"));
            }
            terms.push((id, e));
        }
        Ok(HallNormalForm {
            basis,
            weight_bound,
            terms,
        })
    }
}

type Syllables = Vec<(usize, i64)>;

fn push_syllable(out: &mut Syllables, (id, e): (usize, i64)) {
    if e == 0 {
        return;
    }
    if let Some(last) = out.last_mut() {
        if last.0 == id {
            last.1 += e;
            if last.1 == 0 {
                out.pop();
            }
            return;
        }
    }
    out.push((id, e));
}

fn invert(word: &[(usize, i64)]) -> Syllables {
    word.iter().rev().map(|&(id, e)| (id, -e)).collect()
}

fn extend(out: &mut Syllables, word: &[(usize, i64)]) {
    for &s in word {
        push_syllable(out, s);
    }
}

fn sparse(dense: &[i64]) -> Syllables {
    dense
        .iter()
        .enumerate()
        .filter(|(_, &e)| e != 0)
        .map(|(id, &e)| (id, e))
        .collect()
}

fn power(out: &mut Syllables, word: &[(usize, i64)], e: i64) {
    if word.len() == 1 {
        push_syllable(out, (word[0].0, word[0].1 * e));
        return;
    }
    let inv;
    let base: &[(usize, i64)] = if e < 0 {
        inv = invert(word);
        &inv
    } else {
        word
    };
    for _ in 0..e.unsigned_abs() {
        extend(out, base);
    }
}

/// Rewrites products of basic commutators into ascending normal form modulo `γ_{n+1}`.
pub struct Collector {
    basis: Arc<HallBasis>,
    n: usize,
    budget: usize,
    steps: usize,
    cache: HashMap<(usize, usize, bool), Syllables>,
}

impl Collector {
    pub fn new(rank: usize, n: usize) -> Result<Self> {
        Ok(Collector {
            basis: enumerate_basic(rank, n)?,
            n,
            budget: DEFAULT_STEP_BUDGET,
            steps: 0,
            cache: HashMap::new(),
        })
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn basis(&self) -> &Arc<HallBasis> {
        &self.basis
    }

    fn tick(&mut self, amount: usize, collected: &[i64], pending: &[(usize, i64)]) -> Result<()> {
        self.steps += amount;
        if self.steps > self.budget {
            let prefix: Syllables = collected
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(id, &e)| (id, e))
                .collect();
            let rest: Syllables = pending.iter().rev().copied().collect();
            return Err(Error::BudgetExceeded {
                budget: self.budget,
                partial: self.render(&prefix, &rest),
            });
        }
        Ok(())
    }

    /// `c^-1 x c` when `inverse` is false, `c x c^-1` otherwise, collected; every letter exceeds `c`.
    fn conj(&mut self, x: usize, c: usize, inverse: bool) -> Result<Syllables> {
        if let Some(w) = self.cache.get(&(x, c, inverse)) {
            return Ok(w.clone());
        }
        let b = self.basis.clone();
        let out = if b.weight(x) + b.weight(c) > self.n {
            vec![(x, 1)]
        } else if let Some(v1) = b.bracket_id(x, c) {
            if !inverse {
                vec![(x, 1), (v1, 1)]
            } else {
                // c x c^-1 = x T1^-1 with T_i = v_i T_{i+1}^-1 and v_{i+1} = [v_i, c].
                let mut chain = vec![v1];
                while let Some(v) = b.bracket_id(*chain.last().unwrap(), c) {
                    chain.push(v);
                }
                let mut t: Syllables = vec![(*chain.last().unwrap(), 1)];
                for &v in chain.iter().rev().skip(1) {
                    let mut next = vec![(v, 1)];
                    extend(&mut next, &invert(&t));
                    t = next;
                }
                let mut word = vec![(x, 1)];
                extend(&mut word, &invert(&t));
                sparse(&self.collect_dense(&word)?)
            }
        } else {
            // Conjugation is an automorphism: [l, r]^c = [l^c, r^c].
            let (l, r) = b
                .factors(x)
                .expect("a generator above c always brackets with c");
            let cl = self.conj(l, c, inverse)?;
            let cr = self.conj(r, c, inverse)?;
            let mut word = invert(&cl);
            extend(&mut word, &invert(&cr));
            extend(&mut word, &cl);
            extend(&mut word, &cr);
            sparse(&self.collect_dense(&word)?)
        };
        self.cache.insert((x, c, inverse), out.clone());
        Ok(out)
    }

    fn render(&self, prefix: &[(usize, i64)], rest: &[(usize, i64)]) -> String {
        let alphabet = Alphabet::standard(self.basis.rank);
        prefix
            .iter()
            .chain(rest)
            .map(|&(id, e)| format!("{}^{}", self.basis.format(id, &alphabet), e))
            .collect::<Vec<_>>()
            .join(" * ")
    }

    /// Collection from the left: the collected part is an exponent vector, and
    /// multiplying it by `x` moves `x` past the noncentral letters above it,
    /// pushing their collected conjugates by `x` back onto the pending stack.
    fn collect_dense(&mut self, input: &[(usize, i64)]) -> Result<Vec<i64>> {
        let b = self.basis.clone();
        let mut pending: Syllables = Vec::new();
        for &(id, e) in input.iter().rev() {
            if id >= b.len() {
                return Err(Error::Precondition(format!("unknown basic commutator id {id}")));
            }
            if e != 0 {
                pending.push((id, e));
            }
        }
        // Letters of weight n are central modulo γ_{n+1} and never move.
        let movable = b.ids_of_weight(self.n).start.min(b.len());
        let mut collected = vec![0i64; b.len()];
        while let Some((x, e)) = pending.pop() {
            let tail: Vec<usize> = (x + 1..movable)
                .filter(|&j| collected[j] != 0 && b.weight(j) + b.weight(x) <= self.n)
                .collect();
            if tail.is_empty() {
                collected[x] += e;
                continue;
            }
            let sign = e.signum();
            self.tick(1 + tail.len(), &collected, &pending)?;
            if e != sign {
                pending.push((x, e - sign));
            }
            // Letters commuting with x stay; the rest become x^-s T x^s on the stack.
            let first = tail[0];
            let mut moved: Syllables = Vec::new();
            for j in first..movable {
                let ej = std::mem::take(&mut collected[j]);
                if ej == 0 {
                    continue;
                }
                if b.weight(j) + b.weight(x) > self.n {
                    push_syllable(&mut moved, (j, ej));
                } else {
                    let img = self.conj(j, x, sign < 0)?;
                    power(&mut moved, &img, ej);
                }
            }
            collected[x] += sign;
            self.tick(moved.len(), &collected, &pending)?;
            pending.extend(moved.into_iter().rev());
        }
        Ok(collected)
    }

    /// Collects a product of basic commutator syllables.
    pub fn collect_syllables(&mut self, input: &[(usize, i64)]) -> Result<HallNormalForm> {
        self.steps = 0;
        let collected = self.collect_dense(input)?;
        Ok(HallNormalForm {
            basis: self.basis.clone(),
            weight_bound: self.n,
            terms: sparse(&collected),
        })
    }

    pub fn collect_word(&mut self, w: &Word) -> Result<HallNormalForm> {
        if w.max_generator().is_some_and(|g| g >= self.basis.rank) {
            return Err(Error::AlphabetMismatch("word uses a generator outside the basis".into()));
        }
        let syllables: Syllables = w.letters().iter().map(|l| (l.gen, l.sign())).collect();
        self.collect_syllables(&syllables)
    }
}

/// The normal form of `w` modulo `γ_{n+1}` over a free group of the given rank.
pub fn collect(w: &Word, rank: usize, n: usize) -> Result<HallNormalForm> {
    thread_local! {
        static COLLECTORS: RefCell<HashMap<(usize, usize), Collector>> = RefCell::new(HashMap::new());
    }
    COLLECTORS.with(|cell| {
        let mut map = cell.borrow_mut();
        let collector = match map.entry((rank, n)) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(Collector::new(rank, n)?),
        };
        collector.collect_word(w)
    })
}

/// Rewrites `[y1^e1, y2^e2]` (signed basic commutators) as an ascending product modulo `γ_{n+1}`.
pub fn rewrite_nonbasic(
    y1: (&BasicCommutator, i64),
    y2: (&BasicCommutator, i64),
    rank: usize,
    n: usize,
) -> Result<HallNormalForm> {
    let weight = y1.0.weight() + y2.0.weight();
    if weight > n {
        return Err(Error::WeightOverflow { weight, bound: n });
    }
    if y1.1.abs() != 1 || y2.1.abs() != 1 {
        return Err(Error::Precondition("signs must be +1 or -1".into()));
    }
    let mut collector = Collector::new(rank, n)?;
    let basis = collector.basis().clone();
    let id = |c: &BasicCommutator| {
        basis
            .id_of(c)
            .ok_or_else(|| Error::Precondition("factor is not a basic commutator".into()))
    };
    let (a, b) = (id(y1.0)?, id(y2.0)?);
    collector.collect_syllables(&[(a, -y1.1), (b, -y2.1), (a, y1.1), (b, y2.1)])
}

/// `∏_i ∏_j [a_i, b_j]` collected modulo `γ_{n'+n''+1}`.
pub fn commutator_of_products(
    a: &[Word],
    b: &[Word],
    rank: usize,
    n1: usize,
    n2: usize,
) -> Result<HallNormalForm> {
    let n = n1 + n2;
    let mut product = Word::identity();
    for x in a {
        for y in b {
            product = product.mul(&x.commutator(y));
        }
    }
    collect(&product, rank, n)
}

impl fmt::Display for HallNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(&Alphabet::standard(self.basis.rank)))
    }
}

/// Generator letters of a word as syllables, for callers working with raw ids.
pub fn word_syllables(w: &Word) -> Vec<(usize, i64)> {
    w.letters()
        .iter()
        .map(|l: &Letter| (l.gen, l.sign()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(rank: usize, w: usize) -> Vec<String> {
        let a = Alphabet::standard(rank);
        let b = enumerate_basic(rank, w).unwrap();
        b.ids_of_weight(w).map(|i| b.format(i, &a)).collect()
    }

    #[test]
    fn enumeration_examples() {
        let a = Alphabet::standard(2);
        let b = enumerate_basic(2, 2).unwrap();
        let all: Vec<String> = (0..b.len()).map(|i| b.format(i, &a)).collect();
        assert_eq!(all, ["a", "b", "[b,a]"]);
        assert_eq!(names(2, 3), ["[[b,a],a]", "[[b,a],b]"]);
        assert_eq!(
            names(2, 4),
            ["[[[b,a],a],a]", "[[[b,a],a],b]", "[[[b,a],b],b]"]
        );
        for id in 0..enumerate_basic(3, 5).unwrap().len() {
            assert!(enumerate_basic(3, 5).unwrap().tree(id).is_basic());
        }
    }

    #[test]
    fn compare_examples() {
        let a = Alphabet::standard(2);
        let p = |s: &str| BasicCommutator::parse(s, &a).unwrap();
        assert_eq!(compare(&p("a"), &p("b")), Ordering::Less);
        assert_eq!(compare(&p("[b,a]"), &p("a")), Ordering::Greater);
        assert_eq!(compare(&p("[[[b,a],a],b]"), &p("[[[b,a],b],b]")), Ordering::Less);
        assert_eq!(compare_signed(&(p("a"), 1), &(p("a"), -1)), Ordering::Equal);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            enumerate_basic_capped(4, 6, 50),
            Err(Error::ResourceBound(_))
        ));
    }

    #[test]
    fn collect_examples() {
        let a = Alphabet::standard(2);
        let c = |s: &str, n| collect(&a.parse_word(s).unwrap(), 2, n).unwrap().format(&a);
        assert_eq!(c("b a", 2), "a^1 * b^1 * [b,a]^1");
        assert_eq!(c("a b", 2), "a^1 * b^1");
        assert_eq!(c("a^-1 b^-1 a b", 2), "[b,a]^-1");
        assert_eq!(c("", 3), "1");
    }

    #[test]
    fn budget_exhaustion_reports_partial_form() {
        let a = Alphabet::standard(2);
        let w = a.parse_word("b^5 a^5 b^-3 a^4 b a^-7").unwrap();
        let err = Collector::new(2, 5).unwrap().with_budget(5).collect_word(&w).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { budget: 5, .. }));
    }

    #[test]
    fn rewrite_examples() {
        let a = Alphabet::standard(2);
        let p = |s: &str| BasicCommutator::parse(s, &a).unwrap();
        let f = |x: &str, ex, y: &str, ey, n| {
            rewrite_nonbasic((&p(x), ex), (&p(y), ey), 2, n).unwrap().format(&a)
        };
        assert_eq!(f("a", 1, "b", 1, 2), "[b,a]^-1");
        assert_eq!(f("[b,a]", -1, "a", 1, 3), "[[b,a],a]^-1");
        assert_eq!(f("[b,a]", -1, "a", -1, 3), "[[b,a],a]^1");
        assert!(matches!(
            rewrite_nonbasic((&p("[b,a]"), 1), (&p("a"), 1), 2, 2),
            Err(Error::WeightOverflow { weight: 3, bound: 2 })
        ));
    }

    #[test]
    fn commutator_of_products_examples() {
        let a = Alphabet::standard(2);
        let w = |s: &str| a.parse_word(s).unwrap();
        let ba = w("a^-1 b^-1 a b").inverse();
        let nf = commutator_of_products(&[ba], &[w("a")], 2, 2, 1).unwrap();
        assert_eq!(nf.format(&a), "[[b,a],a]^1");
        let nf = commutator_of_products(&[w("a b")], &[w("a")], 2, 1, 1).unwrap();
        assert_eq!(nf.format(&a), "[b,a]^1");
        let nf = commutator_of_products(&[w("a")], &[], 2, 1, 1).unwrap();
        assert!(nf.is_identity());
    }

    #[test]
    fn normal_form_round_trip() {
        let a = Alphabet::standard(3);
        let w = a.parse_word("c b a^2 c^-1 b a").unwrap();
        let nf = collect(&w, 3, 4).unwrap();
        assert_eq!(HallNormalForm::parse(&nf.format(&a), &a, 4).unwrap(), nf);
        assert_eq!(collect(&nf.expand(), 3, 4).unwrap(), nf);
    }
}
