//! Graphs of groups, Bass words and their reduced forms, translation lengths,
//! and conjugacy for the supported vertex-group kinds.
//!
//! A [`BassWord`] is a path `a0 e1 a1 ... en an` in the graph with `ai` in the
//! vertex group at the end of `ei`. Reduction removes every subword
//! `e x ē` with `x` in the image of the edge group of `e` at its target.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{Perm, PermGroup};
use crate::word::{free_conjugacy, parse_power_token, Alphabet, Word};

/// Largest finite group (by order) accepted as a vertex or edge group.
pub const FINITE_ORDER_LIMIT: usize = 100_000;
/// State budget of the elliptic transport search.
pub const DEFAULT_ORBIT_BUDGET: usize = 100_000;

/// An element of one of the supported vertex-group kinds.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    /// `(fibre word, central exponent)` in `F ⊕ ⟨t⟩`.
    Free(Word, i64),
    /// Exponent vector in `Z²`.
    Pair([i64; 2]),
    /// Index into the element list of a finite group.
    Finite(usize),
}

impl Element {
    pub fn pair(&self) -> [i64; 2] {
        match self {
            Element::Pair(v) => *v,
            _ => panic!("expected a Z² element"),
        }
    }

    pub fn finite(&self) -> usize {
        match self {
            Element::Finite(i) => *i,
            _ => panic!("expected a finite-group element"),
        }
    }

    pub fn free(&self) -> (&Word, i64) {
        match self {
            Element::Free(w, k) => (w, *k),
            _ => panic!("expected an F ⊕ Z element"),
        }
    }
}

/// A finite group given by named permutation generators.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    names: Vec<String>,
    group: PermGroup,
    /// Shortest generator word (positive letters) for each element.
    words: Vec<Vec<usize>>,
    table: Option<Vec<u32>>,
    classes: OnceLock<Vec<usize>>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.group.generators() == other.group.generators()
    }
}

impl FiniteGroup {
    pub fn new<S: AsRef<str>>(names: &[S], degree: usize, generators: &[Perm]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        if names.len() != generators.len() {
            return Err(Error::InvalidGraph("one permutation per generator is required".into()));
        }
        let group = PermGroup::generate(degree, generators, FINITE_ORDER_LIMIT)?;
        let n = group.order();
        let gen_idx: Vec<usize> = generators
            .iter()
            .map(|g| group.index_of(g).expect("generator lies in its group"))
            .collect();
        let mut words: Vec<Option<Vec<usize>>> = vec![None; n];
        words[0] = Some(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (g, &gi) in gen_idx.iter().enumerate() {
                let y = group.mul(x, gi);
                if words[y].is_none() {
                    let mut w = words[x].clone().unwrap();
                    w.push(g);
                    words[y] = Some(w);
                    queue.push_back(y);
                }
            }
        }
        let table = (n <= 2048).then(|| {
            let mut t = vec![0u32; n * n];
            for a in 0..n {
                for b in 0..n {
                    t[a * n + b] = group.mul(a, b) as u32;
                }
            }
            t
        });
        Ok(FiniteGroup {
            names,
            group,
            words: words.into_iter().map(Option::unwrap).collect(),
            table,
            classes: OnceLock::new(),
        })
    }

    pub fn trivial() -> Self {
        FiniteGroup::new::<&str>(&[], 1, &[]).expect("trivial group")
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn perm_group(&self) -> &PermGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn generator(&self, g: usize) -> usize {
        self.group
            .index_of(&self.group.generators()[g])
            .expect("generator lies in its group")
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.table {
            Some(t) => t[a * self.order() + b] as usize,
            None => self.group.mul(a, b),
        }
    }

    pub fn inv(&self, a: usize) -> usize {
        self.group.inv(a)
    }

    pub fn pow(&self, a: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(a) } else { a };
        (0..k.unsigned_abs()).fold(0, |acc, _| self.mul(acc, base))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Shortest word for `a` in the generators.
    pub fn word(&self, a: usize) -> &[usize] {
        &self.words[a]
    }

    /// Least index in the conjugacy class of `a`.
    pub fn class_rep(&self, a: usize) -> usize {
        self.classes.get_or_init(|| {
            let n = self.order();
            let mut rep = vec![usize::MAX; n];
            for x in 0..n {
                if rep[x] != usize::MAX {
                    continue;
                }
                for z in 0..n {
                    let y = self.mul(self.mul(self.inv(z), x), z);
                    rep[y] = x;
                }
            }
            rep
        })[a]
    }

    pub fn format(&self, a: usize) -> String {
        let w = self.word(a);
        if w.is_empty() {
            return "1".into();
        }
        let mut out: Vec<String> = Vec::new();
        let mut i = 0;
        while i < w.len() {
            let mut j = i;
            while j < w.len() && w[j] == w[i] {
                j += 1;
            }
            let name = &self.names[w[i]];
            out.push(if j - i == 1 { name.clone() } else { format!("{name}^{}", j - i) });
            i = j;
        }
        out.join(" ")
    }
}

/// The supported vertex (and edge) group kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupKind {
    /// `F(fibre) ⊕ ⟨central⟩`.
    FreeCentral { fibre: Arc<Alphabet>, central: String },
    /// `Z²` on two named generators.
    Abelian2 { names: [String; 2] },
    Finite(Arc<FiniteGroup>),
}

impl GroupKind {
    pub fn kind_name(&self) -> &'static str {
        match self {
            GroupKind::FreeCentral { .. } => "free_central",
            GroupKind::Abelian2 { .. } => "z2",
            GroupKind::Finite(_) => "finite",
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GroupKind::Finite(_))
    }

    pub fn identity(&self) -> Element {
        match self {
            GroupKind::FreeCentral { .. } => Element::Free(Word::identity(), 0),
            GroupKind::Abelian2 { .. } => Element::Pair([0, 0]),
            GroupKind::Finite(_) => Element::Finite(0),
        }
    }

    pub fn is_identity(&self, x: &Element) -> bool {
        *x == self.identity()
    }

    pub fn mul(&self, x: &Element, y: &Element) -> Element {
        match (self, x, y) {
            (GroupKind::FreeCentral { .. }, Element::Free(u, k), Element::Free(v, l)) => {
                Element::Free(u.mul(v), k + l)
            }
            (GroupKind::Abelian2 { .. }, Element::Pair(a), Element::Pair(b)) => {
                Element::Pair([a[0] + b[0], a[1] + b[1]])
            }
            (GroupKind::Finite(g), Element::Finite(a), Element::Finite(b)) => {
                Element::Finite(g.mul(*a, *b))
            }
            _ => panic!("element kind does not match its group"),
        }
    }

    pub fn inv(&self, x: &Element) -> Element {
        match (self, x) {
            (GroupKind::FreeCentral { .. }, Element::Free(u, k)) => Element::Free(u.inverse(), -k),
            (GroupKind::Abelian2 { .. }, Element::Pair(a)) => Element::Pair([-a[0], -a[1]]),
            (GroupKind::Finite(g), Element::Finite(a)) => Element::Finite(g.inv(*a)),
            _ => panic!("element kind does not match its group"),
        }
    }

    pub fn pow(&self, x: &Element, k: i64) -> Element {
        match (self, x) {
            (GroupKind::FreeCentral { .. }, Element::Free(u, c)) => Element::Free(u.pow(k), c * k),
            (GroupKind::Abelian2 { .. }, Element::Pair(a)) => Element::Pair([a[0] * k, a[1] * k]),
            (GroupKind::Finite(g), Element::Finite(a)) => Element::Finite(g.pow(*a, k)),
            _ => panic!("element kind does not match its group"),
        }
    }

    /// `z^-1 x z`.
    pub fn conj(&self, x: &Element, z: &Element) -> Element {
        self.mul(&self.mul(&self.inv(z), x), z)
    }

    pub fn generator_names(&self) -> Vec<String> {
        match self {
            GroupKind::FreeCentral { fibre, central } => {
                let mut v: Vec<String> = fibre.generators().iter().map(|g| g.name.clone()).collect();
                v.push(central.clone());
                v
            }
            GroupKind::Abelian2 { names } => names.to_vec(),
            GroupKind::Finite(g) => g.names().to_vec(),
        }
    }

    /// The declared generators, in order.
    pub fn generators(&self) -> Vec<Element> {
        match self {
            GroupKind::FreeCentral { fibre, .. } => {
                let mut v: Vec<Element> = (0..fibre.rank())
                    .map(|i| Element::Free(Word::generator(i), 0))
                    .collect();
                v.push(Element::Free(Word::identity(), 1));
                v
            }
            GroupKind::Abelian2 { .. } => vec![Element::Pair([1, 0]), Element::Pair([0, 1])],
            GroupKind::Finite(g) => (0..g.names().len())
                .map(|i| Element::Finite(g.generator(i)))
                .collect(),
        }
    }

    /// Generators and their inverses, without repeats.
    pub fn unit_ball(&self) -> Vec<Element> {
        let mut out: Vec<Element> = Vec::new();
        for g in self.generators() {
            for x in [g.clone(), self.inv(&g)] {
                if !self.is_identity(&x) && !out.contains(&x) {
                    out.push(x);
                }
            }
        }
        out
    }

    /// Parses a product of generator powers separated by whitespace or `*`; `1` is the identity.
    pub fn parse(&self, text: &str) -> Result<Element> {
        let mut acc = self.identity();
        let names = self.generator_names();
        for token in text.split(|c: char| c.is_whitespace() || c == '*').filter(|s| !s.is_empty()) {
            if token == "1" {
                continue;
            }
            let (name, exp) = parse_power_token(token).map_err(|m| Error::parse(1, 1, m))?;
            let i = names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
            let g = &self.generators()[i];
            acc = self.mul(&acc, &self.pow(g, exp));
        }
        Ok(acc)
    }

    pub fn format(&self, x: &Element) -> String {
        match (self, x) {
            (GroupKind::FreeCentral { fibre, central }, Element::Free(u, k)) => {
                let mut parts = Vec::new();
                if !u.is_identity() {
                    parts.push(fibre.format_word(u));
                }
                match k {
                    0 => {}
                    1 => parts.push(central.clone()),
                    _ => parts.push(format!("{central}^{k}")),
                }
                if parts.is_empty() {
                    "1".into()
                } else {
                    parts.join(" ")
                }
            }
            (GroupKind::Abelian2 { names }, Element::Pair(a)) => {
                let parts: Vec<String> = (0..2)
                    .filter(|&i| a[i] != 0)
                    .map(|i| if a[i] == 1 { names[i].clone() } else { format!("{}^{}", names[i], a[i]) })
                    .collect();
                if parts.is_empty() {
                    "1".into()
                } else {
                    parts.join(" ")
                }
            }
            (GroupKind::Finite(g), Element::Finite(a)) => g.format(*a),
            _ => panic!("element kind does not match its group"),
        }
    }

    /// Some `z` with `z^-1 x z = y`, if one exists.
    pub fn conjugator(&self, x: &Element, y: &Element) -> Option<Element> {
        match (self, x, y) {
            (GroupKind::FreeCentral { .. }, Element::Free(u, k), Element::Free(v, l)) => {
                if k != l {
                    return None;
                }
                free_conjugacy(u, v).map(|z| Element::Free(z, 0))
            }
            (GroupKind::Abelian2 { .. }, _, _) => (x == y).then(|| self.identity()),
            (GroupKind::Finite(g), Element::Finite(a), Element::Finite(b)) => (0..g.order())
                .find(|&z| g.mul(g.mul(g.inv(z), *a), z) == *b)
                .map(Element::Finite),
            _ => panic!("element kind does not match its group"),
        }
    }

    /// A canonical representative of the conjugacy class of `x`.
    pub fn class_key(&self, x: &Element) -> Element {
        match (self, x) {
            (GroupKind::FreeCentral { .. }, Element::Free(u, k)) => {
                let core = u.cyclically_reduced();
                let best = (0..core.len().max(1))
                    .map(|i| core.rotate(i))
                    .min()
                    .unwrap_or_default();
                Element::Free(best, *k)
            }
            (GroupKind::Abelian2 { .. }, _) => x.clone(),
            (GroupKind::Finite(g), Element::Finite(a)) => Element::Finite(g.class_rep(*a)),
            _ => panic!("element kind does not match its group"),
        }
    }

    /// All elements of a finite group.
    pub fn elements(&self) -> Option<Vec<Element>> {
        match self {
            GroupKind::Finite(g) => Some((0..g.order()).map(Element::Finite).collect()),
            _ => None,
        }
    }

    pub fn order(&self) -> Option<usize> {
        match self {
            GroupKind::Finite(g) => Some(g.order()),
            _ => None,
        }
    }
}

fn det2(m: &[[i64; 2]; 2]) -> i64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Solves `x = i·m[0] + j·m[1]` over the integers.
fn solve2(m: &[[i64; 2]; 2], x: [i64; 2]) -> Option<[i64; 2]> {
    let d = det2(m);
    if d == 0 {
        return None;
    }
    let i = x[0] * m[1][1] - x[1] * m[1][0];
    let j = m[0][0] * x[1] - m[0][1] * x[0];
    (i % d == 0 && j % d == 0).then(|| [i / d, j / d])
}

/// An injective homomorphism from an edge group into a vertex group,
/// with exact membership and preimages.
#[derive(Debug, Clone)]
pub struct EdgeMap {
    images: Vec<Element>,
    repr: MapRepr,
}

#[derive(Debug, Clone)]
enum MapRepr {
    /// `Z² → Z²`; rows are generator images.
    Lattice([[i64; 2]; 2]),
    /// `Z² → F ⊕ Z`; generator `g` maps to `root^{m[g][0]} t^{m[g][1]}`.
    Cyclic { root: Word, m: [[i64; 2]; 2] },
    /// Finite edge group: image of every element and the inverse lookup.
    Table {
        forward: Vec<Element>,
        backward: HashMap<Element, usize>,
    },
}

impl EdgeMap {
    /// Builds the map from generator images, checking it is an injective homomorphism.
    pub fn new(source: &GroupKind, target: &GroupKind, images: Vec<Element>) -> std::result::Result<Self, String> {
        let gens = source.generators();
        if images.len() != gens.len() {
            return Err(format!(
                "expected {} generator images, found {}",
                gens.len(),
                images.len()
            ));
        }
        let repr = match (source, target) {
            (GroupKind::Abelian2 { .. }, GroupKind::Abelian2 { .. }) => {
                let m = [images[0].pair(), images[1].pair()];
                if det2(&m) == 0 {
                    return Err("image has rank < 2, so the map is not injective".into());
                }
                MapRepr::Lattice(m)
            }
            (GroupKind::Abelian2 { .. }, GroupKind::FreeCentral { .. }) => {
                let (u0, k0) = images[0].free();
                let (u1, k1) = images[1].free();
                let root = if !u0.is_identity() {
                    u0.root().0
                } else if !u1.is_identity() {
                    u1.root().0
                } else {
                    return Err("both images are central, so the map is not injective".into());
                };
                let p0 = u0.power_of(&root).ok_or("generator images do not commute")?;
                let p1 = u1.power_of(&root).ok_or("generator images do not commute")?;
                let m = [[p0, k0], [p1, k1]];
                if det2(&m) == 0 {
                    return Err("image has rank < 2, so the map is not injective".into());
                }
                MapRepr::Cyclic { root, m }
            }
            (GroupKind::Abelian2 { .. }, GroupKind::Finite(_)) => {
                return Err("Z² has no injective map into a finite group".into());
            }
            (GroupKind::Finite(s), _) => {
                let n = s.order();
                let forward: Vec<Element> = (0..n)
                    .map(|x| {
                        s.word(x)
                            .iter()
                            .fold(target.identity(), |acc, &g| target.mul(&acc, &images[g]))
                    })
                    .collect();
                for x in 0..n {
                    for g in 0..gens.len() {
                        let y = s.mul(x, s.generator(g));
                        if target.mul(&forward[x], &images[g]) != forward[y] {
                            return Err("generator images do not define a homomorphism".into());
                        }
                    }
                }
                let mut backward = HashMap::new();
                for (x, img) in forward.iter().enumerate() {
                    if backward.insert(img.clone(), x).is_some() {
                        return Err("map is not injective".into());
                    }
                }
                MapRepr::Table { forward, backward }
            }
            (GroupKind::FreeCentral { .. }, _) => {
                return Err("free-by-central edge groups are not supported".into());
            }
        };
        Ok(EdgeMap { images, repr })
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn apply(&self, x: &Element) -> Element {
        match &self.repr {
            MapRepr::Lattice(m) => {
                let [i, j] = x.pair();
                Element::Pair([i * m[0][0] + j * m[1][0], i * m[0][1] + j * m[1][1]])
            }
            MapRepr::Cyclic { root, m } => {
                let [i, j] = x.pair();
                Element::Free(root.pow(i * m[0][0] + j * m[1][0]), i * m[0][1] + j * m[1][1])
            }
            MapRepr::Table { forward, .. } => forward[x.finite()].clone(),
        }
    }

    /// The edge-group element mapping to `y`, if `y` lies in the image.
    pub fn preimage(&self, y: &Element) -> Option<Element> {
        match &self.repr {
            MapRepr::Lattice(m) => solve2(m, y.pair()).map(Element::Pair),
            MapRepr::Cyclic { root, m } => {
                let (u, k) = y.free();
                let p = u.power_of(root)?;
                solve2(m, [p, k]).map(Element::Pair)
            }
            MapRepr::Table { backward, .. } => backward.get(y).map(|&i| Element::Finite(i)),
        }
    }

    /// For `F ⊕ Z` targets, the primitive fibre element generating the fibre part of the image.
    pub fn fibre_root(&self) -> Option<&Word> {
        match &self.repr {
            MapRepr::Cyclic { root, .. } => Some(root),
            _ => None,
        }
    }
}

/// Vertex colours of a bipartite splitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    White,
    Black,
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub name: String,
    pub group: GroupKind,
    pub color: Option<Color>,
}

/// An edge `e` together with its reverse `ē`; `iota` maps into `from`, `tau` into `to`.
#[derive(Debug, Clone)]
pub struct Edge {
    pub name: String,
    pub bar: String,
    pub from: usize,
    pub to: usize,
    pub group: GroupKind,
    pub iota: EdgeMap,
    pub tau: EdgeMap,
}

/// An oriented edge: `e` or `ē`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dir {
    pub edge: usize,
    pub reversed: bool,
}

impl Dir {
    pub fn forward(edge: usize) -> Self {
        Dir { edge, reversed: false }
    }

    pub fn rev(self) -> Self {
        Dir {
            edge: self.edge,
            reversed: !self.reversed,
        }
    }
}

/// Edge data before validation, with images already parsed.
#[derive(Debug, Clone)]
pub struct EdgeSpec {
    pub name: String,
    pub bar: Option<String>,
    pub from: String,
    pub to: String,
    pub group: GroupKind,
    pub iota: Vec<Element>,
    pub tau: Vec<Element>,
}

/// A finite graph of groups with vertex groups of the supported kinds.
#[derive(Debug, Clone)]
pub struct GraphOfGroups {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    kappa: Option<u32>,
    twist_check: bool,
    vertex_index: HashMap<String, usize>,
    dir_index: HashMap<String, Dir>,
}

/// A path `a0 e1 a1 ... en an` in the graph of groups.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BassWord {
    start: usize,
    end: usize,
    head: Element,
    steps: Vec<(Dir, Element)>,
}

impl BassWord {
    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn head(&self) -> &Element {
        &self.head
    }

    pub fn steps(&self) -> &[(Dir, Element)] {
        &self.steps
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_loop(&self) -> bool {
        self.start == self.end
    }

    pub fn edge_path(&self) -> Vec<Dir> {
        self.steps.iter().map(|s| s.0).collect()
    }

    fn tail_mut(&mut self) -> &mut Element {
        match self.steps.last_mut() {
            Some((_, x)) => x,
            None => &mut self.head,
        }
    }
}

/// Outcome of a conjugacy decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Conjugate,
    NonConjugate,
    Unresolved,
}

/// A conjugacy verdict with its witness (`w^-1 g w = h`) and search transcript.
#[derive(Debug, Clone)]
pub struct ConjugacyReport {
    pub verdict: Verdict,
    pub witness: Option<BassWord>,
    pub reason: String,
    pub transcript: Vec<String>,
}

impl ConjugacyReport {
    pub fn conjugate(witness: BassWord, reason: impl Into<String>, transcript: Vec<String>) -> Self {
        ConjugacyReport {
            verdict: Verdict::Conjugate,
            witness: Some(witness),
            reason: reason.into(),
            transcript,
        }
    }

    pub fn non_conjugate(reason: impl Into<String>, transcript: Vec<String>) -> Self {
        ConjugacyReport {
            verdict: Verdict::NonConjugate,
            witness: None,
            reason: reason.into(),
            transcript,
        }
    }

    pub fn unresolved(reason: impl Into<String>, transcript: Vec<String>) -> Self {
        ConjugacyReport {
            verdict: Verdict::Unresolved,
            witness: None,
            reason: reason.into(),
            transcript,
        }
    }
}

impl GraphOfGroups {
    /// Builds and validates a graph of groups; every violated invariant is reported.
    pub fn new(vertices: Vec<Vertex>, edges: Vec<EdgeSpec>, kappa: Option<u32>) -> Result<Self> {
        let mut issues = Vec::new();
        let mut vertex_index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.name.clone(), i).is_some() {
                issues.push(format!("vertex {}: duplicate name", v.name));
            }
        }
        let mut dir_index: HashMap<String, Dir> = HashMap::new();
        let mut built = Vec::new();
        for spec in edges {
            let bar = spec.bar.clone().unwrap_or_else(|| format!("{}bar", spec.name));
            if bar == spec.name {
                issues.push(format!("edge {}: involution has a fixed point (ē = e)", spec.name));
                continue;
            }
            let id = built.len();
            for (name, reversed) in [(&spec.name, false), (&bar, true)] {
                if vertex_index.contains_key(name) || dir_index.insert(name.clone(), Dir { edge: id, reversed }).is_some() {
                    issues.push(format!("edge {}: name `{name}` already in use", spec.name));
                }
            }
            let (Some(&from), Some(&to)) = (vertex_index.get(&spec.from), vertex_index.get(&spec.to)) else {
                issues.push(format!("edge {}: unknown endpoint", spec.name));
                continue;
            };
            if !matches!(spec.group, GroupKind::Abelian2 { .. } | GroupKind::Finite(_)) {
                issues.push(format!("edge {}: edge groups must be z2 or finite", spec.name));
                continue;
            }
            let iota = EdgeMap::new(&spec.group, &vertices[from].group, spec.iota)
                .map_err(|m| issues.push(format!("edge {} (iota into {}): {m}", spec.name, spec.from)));
            let tau = EdgeMap::new(&spec.group, &vertices[to].group, spec.tau)
                .map_err(|m| issues.push(format!("edge {} (tau into {}): {m}", spec.name, spec.to)));
            if let (Ok(iota), Ok(tau)) = (iota, tau) {
                built.push(Edge {
                    name: spec.name,
                    bar,
                    from,
                    to,
                    group: spec.group,
                    iota,
                    tau,
                });
            }
        }
        if !issues.is_empty() {
            return Err(Error::InvalidGraph(issues.join("; ")));
        }
        Ok(GraphOfGroups {
            vertices,
            edges: built,
            kappa,
            twist_check: false,
            vertex_index,
            dir_index,
        })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn kappa(&self) -> Option<u32> {
        self.kappa
    }

    pub fn twist_check(&self) -> bool {
        self.twist_check
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize> {
        self.vertex_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::InvalidGraph(format!("unknown vertex `{name}`")))
    }

    pub fn dir(&self, name: &str) -> Option<Dir> {
        self.dir_index.get(name).copied()
    }

    pub fn group(&self, v: usize) -> &GroupKind {
        &self.vertices[v].group
    }

    pub fn source(&self, d: Dir) -> usize {
        let e = &self.edges[d.edge];
        if d.reversed {
            e.to
        } else {
            e.from
        }
    }

    pub fn target(&self, d: Dir) -> usize {
        self.source(d.rev())
    }

    /// `ι_d`: the edge group into the source of `d`.
    pub fn out_map(&self, d: Dir) -> &EdgeMap {
        let e = &self.edges[d.edge];
        if d.reversed {
            &e.tau
        } else {
            &e.iota
        }
    }

    /// `τ_d`: the edge group into the target of `d`.
    pub fn in_map(&self, d: Dir) -> &EdgeMap {
        self.out_map(d.rev())
    }

    pub fn dir_name(&self, d: Dir) -> &str {
        let e = &self.edges[d.edge];
        if d.reversed {
            &e.bar
        } else {
            &e.name
        }
    }

    /// Oriented edges leaving `v`, in declaration order.
    pub fn dirs_from(&self, v: usize) -> Vec<Dir> {
        (0..self.edges.len())
            .flat_map(|e| [Dir::forward(e), Dir::forward(e).rev()])
            .filter(|&d| self.source(d) == v)
            .collect()
    }

    pub(crate) fn set_twist_check(&mut self, on: bool) {
        self.twist_check = on;
    }

    pub(crate) fn set_color(&mut self, v: usize, color: Color) {
        self.vertices[v].color = Some(color);
    }

    // ---- Bass words ----

    pub fn element_word(&self, v: usize, x: Element) -> BassWord {
        BassWord {
            start: v,
            end: v,
            head: x,
            steps: Vec::new(),
        }
    }

    pub fn identity_word(&self, v: usize) -> BassWord {
        self.element_word(v, self.group(v).identity())
    }

    pub fn edge_word(&self, d: Dir) -> BassWord {
        let t = self.target(d);
        BassWord {
            start: self.source(d),
            end: t,
            head: self.group(self.source(d)).identity(),
            steps: vec![(d, self.group(t).identity())],
        }
    }

    /// Builds a word from raw parts, checking the path is connected.
    pub fn word_from_parts(&self, start: usize, head: Element, steps: Vec<(Dir, Element)>) -> Result<BassWord> {
        let mut at = start;
        for (d, _) in &steps {
            if self.source(*d) != at {
                return Err(Error::Precondition(format!(
                    "edge {} does not start at vertex {}",
                    self.dir_name(*d),
                    self.vertices[at].name
                )));
            }
            at = self.target(*d);
        }
        Ok(BassWord {
            start,
            end: at,
            head,
            steps,
        })
    }

    /// Concatenation; `a` must end where `b` starts.
    pub fn mul(&self, a: &BassWord, b: &BassWord) -> Result<BassWord> {
        if a.end != b.start {
            return Err(Error::Precondition(format!(
                "cannot concatenate a path ending at {} with one starting at {}",
                self.vertices[a.end].name, self.vertices[b.start].name
            )));
        }
        let mut out = a.clone();
        let g = self.group(a.end);
        let tail = out.tail_mut();
        *tail = g.mul(tail, &b.head);
        out.steps.extend(b.steps.iter().cloned());
        out.end = b.end;
        Ok(out)
    }

    pub fn inverse(&self, a: &BassWord) -> BassWord {
        let n = a.steps.len();
        let elem_at = |i: usize| if i == 0 { &a.head } else { &a.steps[i - 1].1 };
        let vert_at = |i: usize| if i == 0 { a.start } else { self.target(a.steps[i - 1].0) };
        let head = self.group(a.end).inv(elem_at(n));
        let steps = (0..n)
            .rev()
            .map(|i| (a.steps[i].0.rev(), self.group(vert_at(i)).inv(elem_at(i))))
            .collect();
        BassWord {
            start: a.end,
            end: a.start,
            head,
            steps,
        }
    }

    pub fn pow(&self, a: &BassWord, k: i64) -> Result<BassWord> {
        if !a.is_loop() {
            return Err(Error::Precondition("only loops have powers".into()));
        }
        let base = if k < 0 { self.inverse(a) } else { a.clone() };
        let mut out = self.identity_word(a.start);
        for _ in 0..k.unsigned_abs() {
            out = self.mul(&out, &base)?;
        }
        Ok(self.reduce(&out))
    }

    /// Removes every subword `d x d̄` with `x` in the image of the edge group at the target of `d`.
    pub fn reduce(&self, w: &BassWord) -> BassWord {
        let mut out = BassWord {
            start: w.start,
            end: w.start,
            head: w.head.clone(),
            steps: Vec::with_capacity(w.steps.len()),
        };
        for (d, x) in &w.steps {
            let pinch = match out.steps.last() {
                Some((prev, y)) if *prev == d.rev() => self.in_map(*prev).preimage(y).map(|g| (*prev, g)),
                _ => None,
            };
            match pinch {
                Some((prev, g)) => {
                    out.steps.pop();
                    let v = self.source(prev);
                    let back = self.out_map(prev).apply(&g);
                    let grp = self.group(v);
                    let tail = out.tail_mut();
                    *tail = grp.mul(&grp.mul(tail, &back), x);
                }
                None => out.steps.push((*d, x.clone())),
            }
        }
        out.end = w.end;
        out
    }

    pub fn is_trivial(&self, w: &BassWord) -> bool {
        let r = self.reduce(w);
        r.steps.is_empty() && self.group(r.start).is_identity(&r.head)
    }

    /// Equality in the Bass group of two paths with the same endpoints.
    pub fn equal(&self, a: &BassWord, b: &BassWord) -> bool {
        a.start == b.start
            && a.end == b.end
            && self
                .mul(a, &self.inverse(b))
                .map(|w| self.is_trivial(&w))
                .unwrap_or(false)
    }

    /// `w^-1 g w`, reduced.
    pub fn conjugate(&self, g: &BassWord, w: &BassWord) -> Result<BassWord> {
        let x = self.mul(&self.inverse(w), g)?;
        Ok(self.reduce(&self.mul(&x, w)?))
    }

    /// Checks `w^-1 g w = h` by reduction.
    pub fn verify_conjugator(&self, g: &BassWord, h: &BassWord, w: &BassWord) -> bool {
        w.start == g.start
            && w.end == h.start
            && self
                .conjugate(g, w)
                .map(|c| self.equal(&c, h))
                .unwrap_or(false)
    }

    /// Returns `(core, c)` with `c^-1 g c = core`, where `core` is cyclically reduced
    /// and, when it has edges, has trivial head.
    pub fn cyclic_reduction(&self, g: &BassWord) -> Result<(BassWord, BassWord)> {
        if !g.is_loop() {
            return Err(Error::Precondition("cyclic reduction needs a loop".into()));
        }
        let mut conj = self.identity_word(g.start);
        let mut core = self.reduce(g);
        loop {
            if core.steps.is_empty() {
                return Ok((core, conj));
            }
            if !self.group(core.start).is_identity(&core.head) {
                let c = self.element_word(core.start, core.head.clone());
                conj = self.mul(&conj, &c)?;
                core = self.conjugate(&core, &c)?;
            }
            let n = core.steps.len();
            let (first, _) = core.steps[0];
            let (last, ref wrap) = core.steps[n - 1];
            if n >= 2 && first == last.rev() && self.in_map(last).preimage(wrap).is_some() {
                let p = self.edge_word(first);
                conj = self.mul(&conj, &p)?;
                core = self.conjugate(&core, &p)?;
            } else {
                return Ok((core, conj));
            }
        }
    }

    /// Number of edges of a cyclically reduced conjugate; zero exactly for elliptic loops.
    pub fn translation_length(&self, g: &BassWord) -> Result<usize> {
        Ok(self.cyclic_reduction(g)?.0.len())
    }

    // ---- conjugacy ----

    /// Decides conjugacy of two loops. Elliptic pairs are decided by the
    /// transport search; hyperbolic pairs need finite edge groups along the path.
    pub fn conjugacy(&self, g: &BassWord, h: &BassWord) -> Result<ConjugacyReport> {
        let (gc, cg) = self.cyclic_reduction(g)?;
        let (hc, ch) = self.cyclic_reduction(h)?;
        let mut transcript = vec![
            format!("cyclically reduced g: {} (length {})", self.format_word(&gc), gc.len()),
            format!("cyclically reduced h: {} (length {})", self.format_word(&hc), hc.len()),
        ];
        if gc.len() != hc.len() {
            let reason = if gc.is_empty() || hc.is_empty() {
                "one element is elliptic and the other hyperbolic"
            } else {
                "translation lengths differ"
            };
            return Ok(ConjugacyReport::non_conjugate(reason, transcript));
        }
        let found = if gc.is_empty() {
            match self.elliptic_search(&gc, &hc, DEFAULT_ORBIT_BUDGET, &mut transcript) {
                Ok(f) => f,
                Err(Error::ResourceBound(m)) => return Ok(ConjugacyReport::unresolved(m, transcript)),
                Err(e) => return Err(e),
            }
        } else {
            self.hyperbolic_search(&gc, &hc, &mut transcript)?
        };
        match found {
            Some(p) => {
                let w = self.mul(&self.mul(&cg, &p)?, &self.inverse(&ch))?;
                let w = self.reduce(&w);
                if !self.verify_conjugator(g, h, &w) {
                    return Err(Error::Precondition("internal error: conjugator failed verification".into()));
                }
                transcript.push(format!("witness verified by reduction: {}", self.format_word(&w)));
                Ok(ConjugacyReport::conjugate(w, "verified conjugator", transcript))
            }
            None => {
                let reason = if gc.is_empty() {
                    "exhaustive transport search found no conjugator"
                } else {
                    "no rotation and edge-group correction matches"
                };
                Ok(ConjugacyReport::non_conjugate(reason, transcript))
            }
        }
    }

    /// Conjugacy for graphs whose vertex groups are all finite.
    pub fn conjugacy_finite(&self, g: &BassWord, h: &BassWord) -> Result<ConjugacyReport> {
        if let Some(v) = self.vertices.iter().find(|v| !v.group.is_finite()) {
            return Err(Error::Precondition(format!("vertex {} is not finite", v.name)));
        }
        self.conjugacy(g, h)
    }

    /// Exact search over vertex conjugations and edge transports for `p` with `p^-1 x p = y`.
    pub fn elliptic_search(
        &self,
        x: &BassWord,
        y: &BassWord,
        budget: usize,
        transcript: &mut Vec<String>,
    ) -> Result<Option<BassWord>> {
        let (u, target) = (y.start, &y.head);
        let mut seen: HashSet<(usize, Element)> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert((x.start, self.group(x.start).class_key(&x.head)));
        queue.push_back((x.head.clone(), self.identity_word(x.start)));
        while let Some((elem, path)) = queue.pop_front() {
            let v = path.end;
            let grp = self.group(v);
            if v == u {
                if let Some(z) = grp.conjugator(&elem, target) {
                    transcript.push(format!("transport search visited {} classes", seen.len()));
                    return Ok(Some(self.mul(&path, &self.element_word(v, z))?));
                }
            }
            for d in self.dirs_from(v) {
                for (z, c) in self.conjugates_into(v, &elem, d) {
                    let Some(pre) = self.out_map(d).preimage(&c) else {
                        continue;
                    };
                    let moved = self.in_map(d).apply(&pre);
                    let t = self.target(d);
                    if seen.insert((t, self.group(t).class_key(&moved))) {
                        if seen.len() > budget {
                            return Err(Error::ResourceBound(format!(
                                "transport search exceeded {budget} classes"
                            )));
                        }
                        let step = self.mul(&self.element_word(v, z), &self.edge_word(d))?;
                        queue.push_back((moved, self.mul(&path, &step)?));
                    }
                }
            }
        }
        transcript.push(format!("transport search exhausted {} classes", seen.len()));
        Ok(None)
    }

    /// Pairs `(z, z^-1 x z)` whose second entry may lie in the image of `ι_d`.
    fn conjugates_into(&self, v: usize, x: &Element, d: Dir) -> Vec<(Element, Element)> {
        let grp = self.group(v);
        match grp {
            GroupKind::Finite(f) => {
                let mut seen = HashSet::new();
                (0..f.order())
                    .map(Element::Finite)
                    .filter_map(|z| {
                        let c = grp.conj(x, &z);
                        seen.insert(c.clone()).then_some((z, c))
                    })
                    .collect()
            }
            GroupKind::Abelian2 { .. } => vec![(grp.identity(), x.clone())],
            GroupKind::FreeCentral { .. } => {
                let (w, k) = x.free();
                let Some(root) = self.out_map(d).fibre_root() else {
                    return Vec::new();
                };
                if w.is_identity() {
                    return vec![(grp.identity(), x.clone())];
                }
                let (r, p) = w.root();
                [(root.clone(), p), (root.inverse(), -p)]
                    .into_iter()
                    .filter_map(|(target, m)| {
                        free_conjugacy(&r, &target).map(|z| (Element::Free(z, 0), Element::Free(root.pow(m), k)))
                    })
                    .take(1)
                    .collect()
            }
        }
    }

    fn hyperbolic_search(
        &self,
        g: &BassWord,
        h: &BassWord,
        transcript: &mut Vec<String>,
    ) -> Result<Option<BassWord>> {
        let n = g.len();
        let target_path = h.edge_path();
        let mut rotations = Vec::new();
        for k in 0..n {
            let prefix = self.word_from_parts(g.start, g.head.clone(), g.steps[..k].to_vec())?;
            let rot = self.conjugate(g, &prefix)?;
            if rot.edge_path() == target_path && rot.start == h.start {
                rotations.push((k, prefix, rot));
            }
        }
        transcript.push(format!(
            "{} of {n} rotations share the edge path of h",
            rotations.len()
        ));
        let mut results = Vec::new();
        for (k, prefix, rot) in rotations {
            let d = rot.steps[0].0;
            let edge_group = &self.edges[d.edge].group;
            let Some(candidates) = edge_group.elements() else {
                return Err(Error::Unsupported(
                    "hyperbolic conjugacy with infinite edge groups; use the PTS procedure".into(),
                ));
            };
            let found = candidates.par_iter().find_map_first(|x| {
                let xv = self.element_word(rot.start, self.out_map(d).apply(x));
                let c = self.conjugate(&rot, &xv).ok()?;
                self.equal(&c, h).then_some(xv)
            });
            transcript.push(format!(
                "rotation {k}: {} edge-group corrections tried, {}",
                candidates.len(),
                if found.is_some() { "match" } else { "no match" }
            ));
            if let Some(xv) = found {
                results.push(self.mul(&prefix, &xv)?);
                break;
            }
        }
        Ok(results.into_iter().next())
    }

    /// Bounded brute force: all paths from `g`'s base to `h`'s base with at most
    /// `bound` syllables (edges and unit-ball vertex elements), without backtracking.
    pub fn search_conjugator(&self, g: &BassWord, h: &BassWord, bound: usize) -> (Option<BassWord>, usize) {
        let mut candidates = Vec::new();
        self.enumerate_paths(self.identity_word(g.start), bound, true, &mut candidates);
        let tried = candidates.len();
        let found = candidates
            .par_iter()
            .filter(|w| w.end == h.start)
            .find_map_first(|w| self.verify_conjugator(g, h, w).then(|| w.clone()));
        (found, tried)
    }

    fn enumerate_paths(&self, path: BassWord, budget: usize, may_add_element: bool, out: &mut Vec<BassWord>) {
        out.push(path.clone());
        if budget == 0 {
            return;
        }
        let v = path.end;
        if may_add_element {
            for x in self.group(v).unit_ball() {
                let mut p = path.clone();
                let grp = self.group(v);
                let tail = p.tail_mut();
                *tail = grp.mul(tail, &x);
                self.enumerate_paths(p, budget - 1, false, out);
            }
        }
        for d in self.dirs_from(v) {
            let backtrack = path.steps.last().is_some_and(|(prev, x)| {
                *prev == d.rev() && self.group(v).is_identity(x)
            });
            if backtrack {
                continue;
            }
            let p = self.mul(&path, &self.edge_word(d)).expect("edge leaves the path end");
            self.enumerate_paths(p, budget - 1, true, out);
        }
    }

    // ---- text ----

    /// Parses `a0 ; e1 ; a1 ; ...`. Missing elements are the identity; a leading
    /// `@vertex` segment fixes the base of an edge-free word.
    pub fn parse_word(&self, text: &str) -> Result<BassWord> {
        let segments: Vec<&str> = text.split(';').map(str::trim).filter(|s| !s.is_empty()).collect();
        let mut explicit = None;
        let mut rest = &segments[..];
        if let Some(first) = segments.first() {
            if let Some(name) = first.strip_prefix('@') {
                explicit = Some(self.vertex_index(name.trim())?);
                rest = &segments[1..];
            }
        }
        let start = match explicit {
            Some(v) => v,
            None => match rest.iter().find_map(|s| self.dir(s)) {
                Some(d) => self.source(d),
                None => {
                    let fits: Vec<usize> = (0..self.vertices.len())
                        .filter(|&v| rest.iter().all(|s| self.group(v).parse(s).is_ok()))
                        .collect();
                    match fits.as_slice() {
                        [v] => *v,
                        [] => return Err(Error::parse(1, 1, format!("`{text}` is not an element of any vertex group"))),
                        _ => return Err(Error::parse(1, 1, format!("base vertex of `{text}` is ambiguous; prefix it with `@vertex ;`"))),
                    }
                }
            },
        };
        let mut w = self.identity_word(start);
        let mut column = 1;
        for s in rest {
            if let Some(d) = self.dir(s) {
                if self.source(d) != w.end {
                    return Err(Error::parse(
                        1,
                        column,
                        format!("edge `{s}` does not start at vertex {}", self.vertices[w.end].name),
                    ));
                }
                w = self.mul(&w, &self.edge_word(d))?;
            } else {
                let x = self.group(w.end).parse(s).map_err(|e| match e {
                    Error::UnknownGenerator(g) => Error::parse(
                        1,
                        column,
                        format!("`{g}` is neither an edge nor a generator at vertex {}", self.vertices[w.end].name),
                    ),
                    other => other,
                })?;
                w = self.mul(&w, &self.element_word(w.end, x))?;
            }
            column += s.len() + 3;
        }
        Ok(w)
    }

    pub fn format_word(&self, w: &BassWord) -> String {
        let mut parts = Vec::new();
        let head_id = self.group(w.start).is_identity(&w.head);
        if w.steps.is_empty() {
            return format!("@{} ; {}", self.vertices[w.start].name, self.group(w.start).format(&w.head));
        }
        if !head_id {
            parts.push(self.group(w.start).format(&w.head));
        }
        for (d, x) in &w.steps {
            parts.push(self.dir_name(*d).to_string());
            let g = self.group(self.target(*d));
            if !g.is_identity(x) {
                parts.push(g.format(x));
            }
        }
        parts.join(" ; ")
    }

    /// Parses the `.gog` format (also accepting the `.pts` extensions `color` and `twist-check`).
    pub fn parse(text: &str) -> Result<Self> {
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        let mut kappa = None;
        let mut colors = Vec::new();
        let mut twist_check = false;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let ln = ln + 1;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let column = |tok: &str| raw.find(tok).map_or(1, |c| c + 1);
            match tokens[0] {
                "vertex" | "edge" => {
                    let name = *tokens
                        .get(1)
                        .ok_or_else(|| Error::parse(ln, 1, format!("{} needs a name", tokens[0])))?;
                    let mut kv: HashMap<&str, &str> = HashMap::new();
                    for tok in &tokens[2..] {
                        let (k, v) = tok
                            .split_once('=')
                            .ok_or_else(|| Error::parse(ln, column(tok), format!("expected key=value, found `{tok}`")))?;
                        kv.insert(k, v);
                    }
                    let at = |e: Error| match e {
                        Error::Parse { column, message, .. } => Error::Parse { line: ln, column, message },
                        other => Error::parse(ln, 1, other.to_string()),
                    };
                    if tokens[0] == "vertex" {
                        let kind = kv.get("kind").copied().unwrap_or("");
                        let group = parse_group(kind, &kv).map_err(at)?;
                        vertices.push(Vertex {
                            name: name.to_string(),
                            group,
                            color: None,
                        });
                    } else {
                        let get = |k: &str| {
                            kv.get(k)
                                .copied()
                                .ok_or_else(|| Error::parse(ln, 1, format!("edge {name} needs `{k}=`")))
                        };
                        let (from, to) = (get("from")?, get("to")?);
                        let group = parse_group(kv.get("group").copied().unwrap_or("z2"), &kv).map_err(at)?;
                        let find = |n: &str| {
                            vertices
                                .iter()
                                .find(|v: &&Vertex| v.name == n)
                                .map(|v| v.group.clone())
                                .ok_or_else(|| Error::parse(ln, column(n), format!("unknown vertex `{n}`")))
                        };
                        let (gf, gt) = (find(from)?, find(to)?);
                        let images = |key: &str, g: &GroupKind| -> Result<Vec<Element>> {
                            let v = get(key)?;
                            v.split(',')
                                .filter(|s| !s.is_empty())
                                .map(|s| g.parse(s).map_err(at))
                                .collect()
                        };
                        edges.push(EdgeSpec {
                            name: name.to_string(),
                            bar: kv.get("bar").map(|s| s.to_string()),
                            from: from.to_string(),
                            to: to.to_string(),
                            iota: images("iota", &gf)?,
                            tau: images("tau", &gt)?,
                            group,
                        });
                    }
                }
                "kappa" => {
                    let k = tokens
                        .get(1)
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| Error::parse(ln, 1, "kappa needs a nonnegative integer"))?;
                    kappa = Some(k);
                }
                "color" => {
                    let (Some(v), Some(c)) = (tokens.get(1), tokens.get(2)) else {
                        return Err(Error::parse(ln, 1, "expected `color <vertex> white|black`"));
                    };
                    let c = match *c {
                        "white" => Color::White,
                        "black" => Color::Black,
                        other => return Err(Error::parse(ln, column(other), format!("unknown colour `{other}`"))),
                    };
                    colors.push((ln, v.to_string(), c));
                }
                "twist-check" => {
                    twist_check = match tokens.get(1).copied() {
                        Some("on") => true,
                        Some("off") => false,
                        _ => return Err(Error::parse(ln, 1, "expected `twist-check on|off`")),
                    };
                }
                other => return Err(Error::parse(ln, 1, format!("unknown directive `{other}`"))),
            }
        }
        let mut gog = GraphOfGroups::new(vertices, edges, kappa)?;
        for (ln, v, c) in colors {
            let i = gog.vertex_index(&v).map_err(|_| Error::parse(ln, 1, format!("unknown vertex `{v}`")))?;
            gog.set_color(i, c);
        }
        gog.set_twist_check(twist_check);
        Ok(gog)
    }

    /// Serializes back to the `.gog` format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            out.push_str(&format!("vertex {} {}\n", v.name, group_attrs(&v.group, "kind")));
        }
        for e in &self.edges {
            let imgs = |m: &EdgeMap, v: usize| {
                m.images()
                    .iter()
                    .map(|x| self.group(v).format(x).replace(' ', "*"))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            out.push_str(&format!(
                "edge {} bar={} from={} to={} {} iota={} tau={}\n",
                e.name,
                e.bar,
                self.vertices[e.from].name,
                self.vertices[e.to].name,
                group_attrs(&e.group, "group"),
                imgs(&e.iota, e.from),
                imgs(&e.tau, e.to)
            ));
        }
        for v in &self.vertices {
            if let Some(c) = v.color {
                let c = if c == Color::White { "white" } else { "black" };
                out.push_str(&format!("color {} {c}\n", v.name));
            }
        }
        if let Some(k) = self.kappa {
            out.push_str(&format!("kappa {k}\n"));
        }
        if self.twist_check {
            out.push_str("twist-check on\n");
        }
        out
    }
}

fn group_attrs(g: &GroupKind, key: &str) -> String {
    match g {
        GroupKind::FreeCentral { fibre, central } => {
            let gens: Vec<&str> = fibre.generators().iter().map(|g| g.name.as_str()).collect();
            format!("{key}=free_central gens={} central={central}", gens.join(","))
        }
        GroupKind::Abelian2 { names } => format!("{key}=z2 gens={},{}", names[0], names[1]),
        GroupKind::Finite(f) => {
            let perms = f.perm_group().generators();
            let mut s = format!("{key}=finite degree={}", f.perm_group().degree());
            if !f.names().is_empty() {
                s.push_str(&format!(" gens={}", f.names().join(",")));
            }
            for (n, p) in f.names().iter().zip(perms) {
                s.push_str(&format!(" perm.{n}={}", p.to_string().replace(' ', ",")));
            }
            s
        }
    }
}

fn parse_group(kind: &str, kv: &HashMap<&str, &str>) -> Result<GroupKind> {
    let gens: Vec<&str> = kv
        .get("gens")
        .map(|s| s.split(',').filter(|s| !s.is_empty()).collect())
        .unwrap_or_default();
    match kind {
        "free_central" => {
            let central = kv
                .get("central")
                .ok_or_else(|| Error::parse(1, 1, "free_central needs `central=`"))?;
            if gens.contains(central) {
                return Err(Error::DuplicateGenerator(central.to_string()));
            }
            Ok(GroupKind::FreeCentral {
                fibre: Arc::new(Alphabet::new(&gens)?),
                central: central.to_string(),
            })
        }
        "z2" => {
            let names = match gens.as_slice() {
                [] => ["x".to_string(), "y".to_string()],
                [a, b] if a != b => [a.to_string(), b.to_string()],
                _ => return Err(Error::parse(1, 1, "z2 needs two distinct generator names")),
            };
            Ok(GroupKind::Abelian2 { names })
        }
        "finite" => {
            let degree: usize = kv
                .get("degree")
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| Error::parse(1, 1, "finite groups need `degree=`"))?;
            let perms = gens
                .iter()
                .map(|g| {
                    let key = format!("perm.{g}");
                    let text = kv
                        .iter()
                        .find(|(k, _)| **k == key)
                        .map(|(_, v)| *v)
                        .ok_or_else(|| Error::parse(1, 1, format!("missing `{key}=`")))?;
                    Perm::parse_cycles(text, degree)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(GroupKind::Finite(Arc::new(FiniteGroup::new(&gens, degree, &perms)?)))
        }
        "trivial" => Ok(GroupKind::Finite(Arc::new(FiniteGroup::trivial()))),
        other => Err(Error::parse(1, 1, format!("unknown group kind `{other}`"))),
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Conjugate => "conjugate",
            Verdict::NonConjugate => "non-conjugate",
            Verdict::Unresolved => "unresolved",
        })
    }
}
