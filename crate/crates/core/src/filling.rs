//! Vertex fillings into graphs of finite groups, impermeability of double
//! cosets, the modulus certificate, order-controlled fillings, searches for
//! commanding quotients and end-to-end separation certificates.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gog::{
    BassWord, EdgeSpec, Element, FiniteGroup, GraphOfGroups, GroupKind, Vertex, Verdict,
};
use crate::lattice::{span_mod, Lattice};
use crate::perm::{cyclic_subgroup, Perm, PermGroup};
use crate::pts::{Pts, ShortPosition};
use crate::word::{Alphabet, Word};

/// Quotient data for one white vertex: fibre generator images and the order of the centre.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexQuotient {
    pub degree: usize,
    pub images: Vec<(String, Perm)>,
    pub central_order: u64,
}

/// A vertex filling specification: fibre quotients per white vertex and the edge order `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FillingSpec {
    pub quotients: BTreeMap<String, VertexQuotient>,
    pub edge_order: u64,
}

impl FillingSpec {
    /// Parses the `.fill` format:
    /// `quot w : a->(1 2), b->(1 3) ; central_order 2` and `edge_order 2`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut quotients = BTreeMap::new();
        let mut edge_order = None;
        for (ln, raw) in text.lines().enumerate() {
            let ln = ln + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("edge_order") {
                edge_order = Some(
                    rest.trim()
                        .parse()
                        .map_err(|_| Error::parse(ln, 11, "edge_order needs a positive integer"))?,
                );
                continue;
            }
            let Some(rest) = line.strip_prefix("quot ") else {
                return Err(Error::parse(ln, 1, format!("unknown directive in `{line}`")));
            };
            let (name, body) = rest
                .split_once(':')
                .ok_or_else(|| Error::parse(ln, 1, "expected `quot <vertex> : <images>`"))?;
            let mut parts = body.split(';');
            let image_text = parts.next().unwrap_or("").trim();
            let mut central_order = None;
            let mut degree = None;
            for opt in parts {
                let mut it = opt.split_whitespace();
                let (key, val) = (it.next(), it.next().and_then(|v| v.parse::<u64>().ok()));
                match (key, val) {
                    (Some("central_order"), Some(v)) => central_order = Some(v),
                    (Some("degree"), Some(v)) => degree = Some(v as usize),
                    _ => return Err(Error::parse(ln, 1, format!("bad option `{}`", opt.trim()))),
                }
            }
            let raw_images: Vec<(String, String)> = split_top_level(image_text)
                .into_iter()
                .filter(|s| !s.is_empty() && *s != "trivial")
                .map(|s| {
                    let (g, p) = s
                        .split_once("->")
                        .ok_or_else(|| Error::parse(ln, 1, format!("expected `gen->(cycles)`, found `{s}`")))?;
                    Ok((g.trim().to_string(), p.trim().to_string()))
                })
                .collect::<Result<_>>()?;
            let max_point = raw_images
                .iter()
                .flat_map(|(_, p)| p.split(|c: char| !c.is_ascii_digit()).filter_map(|x| x.parse::<usize>().ok()))
                .max()
                .unwrap_or(1);
            let degree = degree.unwrap_or(max_point).max(1);
            let images = raw_images
                .into_iter()
                .map(|(g, p)| {
                    let perm = if p == "1" { Ok(Perm::identity(degree)) } else { Perm::parse_cycles(&p, degree) };
                    perm.map(|perm| (g, perm)).map_err(|e| Error::parse(ln, 1, e.to_string()))
                })
                .collect::<Result<_>>()?;
            quotients.insert(
                name.trim().to_string(),
                VertexQuotient {
                    degree,
                    images,
                    central_order: central_order.unwrap_or(0),
                },
            );
        }
        let edge_order = edge_order.ok_or_else(|| Error::parse(1, 1, "missing `edge_order`"))?;
        if edge_order == 0 {
            return Err(Error::InvalidFilling("edge_order must be positive".into()));
        }
        for q in quotients.values_mut() {
            if q.central_order == 0 {
                q.central_order = edge_order;
            }
        }
        Ok(FillingSpec { quotients, edge_order })
    }

    /// The same specification with every order replaced by `n`.
    pub fn with_order(&self, n: u64) -> Self {
        let mut out = self.clone();
        out.edge_order = n;
        for q in out.quotients.values_mut() {
            q.central_order = n;
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, q) in &self.quotients {
            let imgs: Vec<String> = q.images.iter().map(|(g, p)| format!("{g}->{p}")).collect();
            let imgs = if imgs.is_empty() { "trivial".to_string() } else { imgs.join(", ") };
            out.push_str(&format!("quot {v} : {imgs} ; central_order {} ; degree {}\n", q.central_order, q.degree));
        }
        out.push_str(&format!("edge_order {}\n", self.edge_order));
        out
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

/// `Z/n` as the cyclic permutation `(offset+1 ... offset+n)` inside degree `total`.
fn cycle_perm(n: usize, offset: usize, total: usize) -> Perm {
    let mut image: Vec<usize> = (0..total).collect();
    for i in 0..n {
        image[offset + i] = offset + (i + 1) % n;
    }
    Perm::from_images(image).expect("a cycle is a permutation")
}

/// `(Z/n)²` on generators named `names`.
fn torus_group(names: &[String], n: usize) -> Result<FiniteGroup> {
    let perms = [cycle_perm(n, 0, 2 * n), cycle_perm(n, n, 2 * n)];
    FiniteGroup::new(names, 2 * n, &perms)
}

#[derive(Debug, Clone)]
enum VertexMap {
    /// Fibre generator images (indices in the filled group) and the central generator.
    White { fibre: Vec<usize>, central: usize },
    Black { gens: [usize; 2] },
}

/// A graph of finite groups with the quotient map from a source graph.
#[derive(Debug, Clone)]
pub struct FilledGraph {
    graph: GraphOfGroups,
    maps: Vec<VertexMap>,
    n: u64,
}

impl FilledGraph {
    /// Builds the filling; white vertices become `Q ⊕ Z/central_order`, black
    /// vertices and edge groups `(Z/N)²`.
    pub fn new(source: &GraphOfGroups, spec: &FillingSpec) -> Result<Self> {
        let n = spec.edge_order as usize;
        let mut vertices = Vec::new();
        let mut maps = Vec::new();
        let mut groups = Vec::new();
        for v in source.vertices() {
            let (group, map) = match &v.group {
                GroupKind::FreeCentral { fibre, central } => {
                    let q = spec
                        .quotients
                        .get(&v.name)
                        .ok_or_else(|| Error::InvalidFilling(format!("no quotient given for vertex {}", v.name)))?;
                    let m = q.central_order as usize;
                    let total = q.degree + m;
                    let mut names = Vec::new();
                    let mut perms = Vec::new();
                    for g in fibre.generators() {
                        let p = q
                            .images
                            .iter()
                            .find(|(name, _)| *name == g.name)
                            .map(|(_, p)| p.clone())
                            .unwrap_or_else(|| Perm::identity(q.degree));
                        names.push(g.name.clone());
                        perms.push(p.shifted(0, total));
                    }
                    if let Some((g, _)) = q.images.iter().find(|(g, _)| fibre.index_of(g).is_err()) {
                        return Err(Error::InvalidFilling(format!("`{g}` is not a fibre generator at {}", v.name)));
                    }
                    names.push(central.clone());
                    perms.push(cycle_perm(m, q.degree, total));
                    let fg = FiniteGroup::new(&names, total, &perms)?;
                    let fibre_idx = (0..fibre.rank()).map(|i| fg.generator(i)).collect();
                    let central = fg.generator(fibre.rank());
                    (fg, VertexMap::White { fibre: fibre_idx, central })
                }
                GroupKind::Abelian2 { names } => {
                    let fg = torus_group(names, n)?;
                    let gens = [fg.generator(0), fg.generator(1)];
                    (fg, VertexMap::Black { gens })
                }
                GroupKind::Finite(_) => {
                    return Err(Error::InvalidFilling(format!("vertex {} is already finite", v.name)));
                }
            };
            let group = Arc::new(group);
            groups.push(group.clone());
            vertices.push(Vertex {
                name: v.name.clone(),
                group: GroupKind::Finite(group),
                color: v.color,
            });
            maps.push(map);
        }
        let mut filled = FilledGraph {
            graph: GraphOfGroups::new(vertices.clone(), Vec::new(), source.kappa())?,
            maps,
            n: spec.edge_order,
        };
        let mut edges = Vec::new();
        for e in source.edges() {
            let GroupKind::Abelian2 { names } = &e.group else {
                return Err(Error::InvalidFilling(format!("edge {}: only Z² edge groups can be filled", e.name)));
            };
            let group = GroupKind::Finite(Arc::new(torus_group(names, n)?));
            let images = |map: &crate::gog::EdgeMap, v: usize| -> Vec<Element> {
                map.images().iter().map(|x| filled.map_element(v, x)).collect()
            };
            edges.push(EdgeSpec {
                name: e.name.clone(),
                bar: Some(e.bar.clone()),
                from: source.vertex(e.from).name.clone(),
                to: source.vertex(e.to).name.clone(),
                group,
                iota: images(&e.iota, e.from),
                tau: images(&e.tau, e.to),
            });
        }
        filled.graph = GraphOfGroups::new(vertices, edges, source.kappa()).map_err(|err| {
            Error::InvalidFilling(format!("inconsistent edge orders: {err}"))
        })?;
        Ok(filled)
    }

    pub fn graph(&self) -> &GraphOfGroups {
        &self.graph
    }

    pub fn edge_order(&self) -> u64 {
        self.n
    }

    fn finite(&self, v: usize) -> &FiniteGroup {
        match self.graph.group(v) {
            GroupKind::Finite(f) => f,
            _ => unreachable!("filled groups are finite"),
        }
    }

    /// Image of a vertex-group element.
    pub fn map_element(&self, v: usize, x: &Element) -> Element {
        let g = self.finite(v);
        match (&self.maps[v], x) {
            (VertexMap::White { fibre, central }, Element::Free(u, k)) => {
                let f = u.letters().iter().fold(0, |acc, l| {
                    let y = fibre[l.gen];
                    g.mul(acc, if l.sign() < 0 { g.inv(y) } else { y })
                });
                Element::Finite(g.mul(f, g.pow(*central, *k)))
            }
            (VertexMap::Black { gens }, Element::Pair([i, j])) => {
                Element::Finite(g.mul(g.pow(gens[0], *i), g.pow(gens[1], *j)))
            }
            _ => panic!("element kind does not match its vertex"),
        }
    }

    /// Image of a fibre word at a white vertex.
    pub fn map_fibre(&self, v: usize, u: &Word) -> usize {
        self.map_element(v, &Element::Free(u.clone(), 0)).finite()
    }

    /// Image of a Bass word.
    pub fn map_word(&self, w: &BassWord) -> BassWord {
        let head = self.map_element(w.start(), w.head());
        let steps = w
            .steps()
            .iter()
            .map(|(d, x)| (*d, self.map_element(self.graph.target(*d), x)))
            .collect();
        self.graph
            .word_from_parts(w.start(), head, steps)
            .expect("the graph is unchanged")
    }

    /// Checks that `ē ι_e(g) e τ_e(g)^-1` maps to the identity for every edge and
    /// edge-group generator; returns the number of relations checked.
    pub fn check_relations(&self, source: &GraphOfGroups) -> Result<usize> {
        let mut count = 0;
        for (i, e) in source.edges().iter().enumerate() {
            let d = crate::gog::Dir::forward(i);
            for g in e.group.generators() {
                let at_to = source.group(e.to);
                let w = source.word_from_parts(
                    e.to,
                    at_to.identity(),
                    vec![(d.rev(), e.iota.apply(&g)), (d, at_to.inv(&e.tau.apply(&g)))],
                )?;
                if !self.graph.is_trivial(&self.map_word(&w)) {
                    return Err(Error::InvalidFilling(format!("relation for edge {} is not preserved", e.name)));
                }
                count += 1;
            }
        }
        Ok(count)
    }
}

/// Whether two paths from the same base end in the same tree edge.
pub fn same_tree_edge(g: &GraphOfGroups, a: &BassWord, b: &BassWord) -> bool {
    let (Some((da, _)), Some((db, _))) = (a.steps().last(), b.steps().last()) else {
        return false;
    };
    if da != db || a.start() != b.start() {
        return false;
    }
    let strip = |w: &BassWord| {
        let mut steps = w.steps().to_vec();
        let last = steps.last_mut().expect("nonempty");
        last.1 = g.group(g.target(last.0)).identity();
        g.word_from_parts(w.start(), w.head().clone(), steps).expect("same path")
    };
    let x = g.reduce(&g.mul(&g.inverse(&strip(a)), &strip(b)).expect("same endpoints"));
    x.is_empty() && g.in_map(*da).preimage(x.head()).is_some()
}

/// Label of the orbit of the tree edge a path ends in.
pub fn edge_orbit(w: &BassWord) -> Option<usize> {
    w.steps().last().map(|(d, _)| d.edge)
}

// ---- impermeability ----

/// Impermeability of the image of `⟨c⟩ a ⟨c'⟩` in a finite group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Impermeability {
    pub cardinality: usize,
    pub n: usize,
    pub impermeable: bool,
    /// `⟨c⟩ ∩ a⟨c'⟩a^-1 = 1`; always agrees with `impermeable`.
    pub trivial_intersection: bool,
}

/// Counts the double coset `⟨c⟩ a ⟨c2⟩` in `g`; both cyclic images must have order `n`.
pub fn impermeability(g: &FiniteGroup, c: usize, a: usize, c2: usize, n: usize) -> Result<Impermeability> {
    if g.element_order(c) != n || g.element_order(c2) != n {
        return Err(Error::Precondition(format!(
            "order mismatch: cyclic images have orders {} and {}, expected {n}",
            g.element_order(c),
            g.element_order(c2)
        )));
    }
    let powers = |x: usize| -> Vec<usize> { (0..n as i64).map(|k| g.pow(x, k)).collect() };
    let (pc, pc2) = (powers(c), powers(c2));
    let coset: HashSet<usize> = pc
        .iter()
        .flat_map(|&x| pc2.iter().map(move |&y| (x, y)))
        .map(|(x, y)| g.mul(g.mul(x, a), y))
        .collect();
    let conj: HashSet<usize> = pc2.iter().map(|&y| g.mul(g.mul(a, y), g.inv(a))).collect();
    let trivial_intersection = pc.iter().filter(|x| conj.contains(x)).count() == 1;
    let impermeable = coset.len() == n * n;
    assert_eq!(impermeable, trivial_intersection, "impermeability criteria disagree");
    Ok(Impermeability {
        cardinality: coset.len(),
        n,
        impermeable,
        trivial_intersection,
    })
}

// ---- congruences ----

/// The modulus certificate: `δ ∉ ⟨ε, (L/ε2)κ⟩` and its image avoids the lattice mod `M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModulusCertificate {
    pub l: i64,
    pub m: i64,
    pub lattice_basis: Vec<Vec<i64>>,
    pub transcript: Vec<String>,
}

/// Brute-force search for `(λ1, λ2)` with `δ ≡ λ1 u + λ2 v (mod n)`, preferring small
/// symmetric representatives; returns residues in `[0, n)`.
fn residue_scan(delta: &[i64], u: &[i64], v: &[i64], n: i64) -> Option<(i64, i64)> {
    let sym = |x: i64| if x > n / 2 { n - x } else { x };
    (0..n)
        .into_par_iter()
        .flat_map_iter(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| {
            delta
                .iter()
                .zip(u.iter().zip(v))
                .all(|(d, (x, y))| (d - a * x - b * y).rem_euclid(n) == 0)
        })
        .min_by_key(|&(a, b)| (sym(a) + sym(b), sym(b), sym(a), a, b))
}

/// Solves `δ ≡ λ1 ε + λ2 ν (mod n)` by exhaustive scan over `(Z/n)²`, cross-checked
/// against lattice membership mod `n`.
pub fn mod_n_solvable(delta: &[i64], epsilon: &[i64], nu: &[i64], n: i64) -> Result<Option<(i64, i64)>> {
    if n < 2 {
        return Err(Error::Precondition("N must be at least 2".into()));
    }
    let scan = residue_scan(delta, epsilon, nu, n);
    let lattice = span_mod(delta.len(), &[epsilon.to_vec(), nu.to_vec()], n);
    assert_eq!(scan.is_some(), lattice.contains(delta), "congruence cross-check disagrees");
    Ok(scan)
}

/// Finds the least `L` (a multiple of `|ε2|`) and the least multiple `M` of `L`
/// certifying that the mod-`N` equation is unsolvable whenever `M | N`.
pub fn compute_m(epsilon: &[i64], kappa: &[i64], delta: &[i64], eps2: i64, budget: usize) -> Result<ModulusCertificate> {
    if epsilon.contains(&0) || eps2 == 0 {
        return Err(Error::Precondition("twisting numbers must be nonzero".into()));
    }
    if delta.iter().all(|&d| d == 0) || delta[0].abs() >= epsilon[0].abs() {
        return Err(Error::Precondition(
            "pair may be conjugate; run solve_persistent first".into(),
        ));
    }
    let dim = delta.len();
    let mut transcript = Vec::new();
    let scaled = |l: i64| -> Vec<i64> { kappa.iter().map(|k| k * (l / eps2)).collect() };
    let mut l = None;
    for j in 1..=budget as i64 {
        let cand = j * eps2.abs();
        let lat = Lattice::span(dim, &[epsilon.to_vec(), scaled(cand)]);
        if lat.contains(delta) {
            transcript.push(format!("L = {cand}: δ lies in ⟨ε, (L/ε2)κ⟩"));
        } else {
            transcript.push(format!("L = {cand}: δ ∉ ⟨ε, (L/ε2)κ⟩ over Z"));
            l = Some((cand, lat));
            break;
        }
    }
    let (l, lat) = l.ok_or_else(|| Error::ResourceBound(format!("no L found among the first {budget} multiples")))?;
    let v = scaled(l);
    for q in 1..=budget as i64 {
        let m = q * l;
        let by_lattice = span_mod(dim, &[epsilon.to_vec(), v.clone()], m).contains(delta);
        let by_scan = residue_scan(delta, epsilon, &v, m);
        if by_lattice != by_scan.is_some() {
            return Err(Error::Precondition(format!("internal error: residue checks disagree at M = {m}")));
        }
        match by_scan {
            Some((a, b)) => transcript.push(format!("M = {m}: δ ≡ {a}·ε + {b}·(L/ε2)κ")),
            None => {
                transcript.push(format!(
                    "M = {m}: exhaustive scan of {} residue pairs finds no solution; lattice check agrees",
                    m * m
                ));
                return Ok(ModulusCertificate {
                    l,
                    m,
                    lattice_basis: lat.basis(),
                    transcript,
                });
            }
        }
    }
    Err(Error::ResourceBound(format!("no M found among the first {budget} multiples of L = {l}")))
}

// ---- prescribed orders ----

/// A quotient `Q × Z/(iL)` of `F ⊕ ⟨t⟩` controlling orders of elements with `χ = k`.
#[derive(Debug, Clone)]
pub struct PrescribedFilling {
    pub l: u64,
    pub i: u64,
    pub k: u64,
    pub fibre: Vec<Perm>,
    pub degree: usize,
}

impl PrescribedFilling {
    /// `iL / gcd(iL, k)`.
    pub fn predicted_order(&self) -> u64 {
        let il = self.i * self.l;
        il / il.gcd(&self.k)
    }

    /// Permutation image of `u t^m`.
    pub fn image(&self, u: &Word, m: i64) -> Perm {
        let il = (self.i * self.l) as usize;
        let total = self.degree + il;
        let f = u.letters().iter().fold(Perm::identity(self.degree), |acc, l| {
            let p = &self.fibre[l.gen];
            acc.mul(&if l.sign() < 0 { p.inverse() } else { p.clone() })
        });
        f.shifted(0, total).mul(&cycle_perm(il, self.degree, total).pow(m))
    }

    /// Measured order of the image of `u t^m`.
    pub fn measured_order(&self, u: &Word, m: i64) -> u64 {
        self.image(u, m).order()
    }
}

/// Builds the quotient for `χ(u t^m) = chi_t · m`, a fibre constraint given by
/// permutation images, `t^n` in the constraint subgroup, and `i ∈ kZ`.
pub fn prescribed_order_filling(
    fibre: &Alphabet,
    constraint: &[Perm],
    n: u64,
    chi_t: i64,
    k: u64,
    i: u64,
) -> Result<PrescribedFilling> {
    if chi_t.abs() != 1 {
        return Err(Error::Precondition(format!("χ is not surjective: χ(t) = {chi_t}")));
    }
    if k == 0 || i == 0 || n == 0 {
        return Err(Error::Precondition("k, i and n must be positive".into()));
    }
    if i % k != 0 {
        return Err(Error::Precondition(format!("i = {i} is not a multiple of k = {k}")));
    }
    if constraint.len() != fibre.rank() {
        return Err(Error::Precondition("one permutation per fibre generator is required".into()));
    }
    let degree = constraint.first().map_or(1, Perm::degree);
    let q = PermGroup::generate(degree, constraint, 1_000_000)?;
    let l = q.exponent().lcm(&n);
    Ok(PrescribedFilling {
        l,
        i,
        k,
        fibre: constraint.to_vec(),
        degree,
    })
}

// ---- command search ----

/// A quotient of a free group in which each listed element has order `N` and the
/// cyclic images pairwise meet trivially.
#[derive(Debug, Clone, Serialize)]
pub struct CommandQuotient {
    pub family: String,
    pub degree: usize,
    pub images: Vec<String>,
    pub orders: Vec<u64>,
    pub candidates_tried: usize,
    #[serde(skip)]
    pub perms: Vec<Perm>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum CommandOutcome {
    Found(CommandQuotient),
    /// Two listed elements have a common nontrivial power, so no quotient can work.
    NotIndependent { first: usize, second: usize, witness: String },
}

fn eval_perm(u: &Word, perms: &[Perm], degree: usize) -> Perm {
    u.letters().iter().fold(Perm::identity(degree), |acc, l| {
        let p = &perms[l.gen];
        acc.mul(&if l.sign() < 0 { p.inverse() } else { p.clone() })
    })
}

fn commands(elements: &[Word], perms: &[Perm], degree: usize, n: u64) -> bool {
    let imgs: Vec<Perm> = elements.iter().map(|u| eval_perm(u, perms, degree)).collect();
    if imgs.iter().any(|p| p.order() != n) {
        return false;
    }
    let subgroups: Vec<HashSet<Perm>> = imgs.iter().map(|p| cyclic_subgroup(p).into_iter().collect()).collect();
    (0..subgroups.len()).all(|i| {
        (i + 1..subgroups.len()).all(|j| subgroups[i].intersection(&subgroups[j]).count() == 1)
    })
}

fn all_perms(d: usize) -> Vec<Perm> {
    fn rec(d: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Perm>) {
        if cur.len() == d {
            out.push(Perm::from_images(cur.clone()).expect("permutation"));
            return;
        }
        for x in 0..d {
            if !used[x] {
                used[x] = true;
                cur.push(x);
                rec(d, cur, used, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(d, &mut Vec::new(), &mut vec![false; d], &mut out);
    out.sort_by_key(|p| p.cycles());
    out
}

/// Invertible `dim × dim` matrices over `Z/m` as permutations of `(Z/m)^dim`.
fn matrix_perm(rows: &[Vec<u64>], m: u64) -> Option<Perm> {
    let dim = rows.len();
    let size = (m as usize).pow(dim as u32);
    let decode = |mut x: usize| -> Vec<u64> {
        (0..dim)
            .map(|_| {
                let d = (x % m as usize) as u64;
                x /= m as usize;
                d
            })
            .collect()
    };
    let encode = |v: &[u64]| v.iter().rev().fold(0usize, |acc, &d| acc * m as usize + d as usize);
    let image: Vec<usize> = (0..size)
        .map(|x| {
            let v = decode(x);
            let w: Vec<u64> = (0..dim)
                .map(|j| (0..dim).map(|i| v[i] * rows[i][j]).sum::<u64>() % m)
                .collect();
            encode(&w)
        })
        .collect();
    Perm::from_images(image).ok()
}

/// Systematic search over `S_2 .. S_5`, then seeded random search over `S_6 .. S_8`
/// and matrix groups over `Z/m` (dimension 2 and 3) until `budget` candidates.
pub fn search_command_quotient(
    fibre: &Alphabet,
    elements: &[Word],
    n: u64,
    budget: usize,
    seed: u64,
) -> Result<CommandOutcome> {
    for i in 0..elements.len() {
        for j in i + 1..elements.len() {
            let (ri, pi) = elements[i].root();
            let (rj, pj) = elements[j].root();
            if ri.is_identity() || rj.is_identity() {
                continue;
            }
            let sign = if ri == rj {
                1
            } else if ri == rj.inverse() {
                -1
            } else {
                continue;
            };
            let witness = format!(
                "({})^{} = ({})^{}",
                fibre.format_word(&elements[i]),
                pj,
                fibre.format_word(&elements[j]),
                sign * pi
            );
            return Ok(CommandOutcome::NotIndependent { first: i, second: j, witness });
        }
    }
    if elements.iter().any(Word::is_identity) {
        return Err(Error::Precondition("the identity cannot have order N".into()));
    }
    let used: Vec<bool> = (0..fibre.rank())
        .map(|g| elements.iter().any(|u| u.letters().iter().any(|l| l.gen == g)))
        .collect();
    let active: Vec<usize> = (0..fibre.rank()).filter(|&g| used[g]).collect();
    let mut tried = 0usize;
    let found = |family: String, degree: usize, perms: Vec<Perm>, tried: usize| {
        let orders = elements.iter().map(|u| eval_perm(u, &perms, degree).order()).collect();
        CommandOutcome::Found(CommandQuotient {
            family,
            degree,
            images: perms.iter().map(|p| p.to_string()).collect(),
            orders,
            candidates_tried: tried,
            perms,
        })
    };
    for d in 2..=5usize {
        let pool = all_perms(d);
        let total = pool.len().pow(active.len() as u32);
        if tried + total > budget {
            break;
        }
        let hit = (0..total).into_par_iter().find_first(|&idx| {
            let perms = assign(&pool, &active, fibre.rank(), d, idx);
            commands(elements, &perms, d, n)
        });
        if let Some(idx) = hit {
            tried += idx + 1;
            return Ok(found(format!("S{d}"), d, assign(&pool, &active, fibre.rank(), d, idx), tried));
        }
        tried += total;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut families: Vec<(String, usize, Option<(usize, u64)>)> =
        (6..=8).map(|d| (format!("S{d}"), d, None)).collect();
    for (dim, m) in [(2usize, 2u64), (2, 3), (2, 4), (2, 5), (2, 7), (2, 8), (3, 2), (3, 3), (3, 4)] {
        families.push((format!("GL({dim}, Z/{m})"), (m as usize).pow(dim as u32), Some((dim, m))));
    }
    while tried < budget {
        let (name, degree, mat) = families.choose(&mut rng).expect("nonempty").clone();
        let mut perms = vec![Perm::identity(degree); fibre.rank()];
        for &g in &active {
            perms[g] = match mat {
                None => {
                    let mut img: Vec<usize> = (0..degree).collect();
                    img.shuffle(&mut rng);
                    Perm::from_images(img).expect("shuffle is a permutation")
                }
                Some((dim, m)) => loop {
                    let rows: Vec<Vec<u64>> = (0..dim).map(|_| (0..dim).map(|_| rng.gen_range(0..m)).collect()).collect();
                    if let Some(p) = matrix_perm(&rows, m) {
                        break p;
                    }
                },
            };
        }
        tried += 1;
        if commands(elements, &perms, degree, n) {
            return Ok(found(name, degree, perms, tried));
        }
    }
    Err(Error::ResourceBound(format!(
        "no commanding quotient among {tried} candidates (budget exhausted, not a disproof)"
    )))
}

fn assign(pool: &[Perm], active: &[usize], rank: usize, d: usize, mut idx: usize) -> Vec<Perm> {
    let mut perms = vec![Perm::identity(d); rank];
    for &g in active.iter().rev() {
        perms[g] = pool[idx % pool.len()].clone();
        idx /= pool.len();
    }
    perms
}

// ---- translation lengths ----

#[derive(Debug, Clone, Serialize)]
pub struct LengthRow {
    pub element: String,
    pub k: i64,
    /// `ℓ(g)`.
    pub base: usize,
    /// `ℓ(g^k)` in the source graph.
    pub original: usize,
    pub filled: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct LengthReport {
    pub preserved: bool,
    pub rows: Vec<LengthRow>,
}

/// Compares `ℓ(ḡ^k)` with `|k| ℓ(g)` for `k = 1, 2, 3`.
pub fn filling_preserves_lengths(source: &GraphOfGroups, filled: &FilledGraph, elements: &[BassWord]) -> Result<LengthReport> {
    let mut rows = Vec::new();
    for g in elements {
        let l = source.translation_length(g)?;
        if l == 0 {
            return Err(Error::Precondition(format!("{} is elliptic", source.format_word(g))));
        }
        for k in 1..=3 {
            let gk = source.pow(g, k)?;
            rows.push(LengthRow {
                element: source.format_word(g),
                k,
                base: l,
                original: source.translation_length(&gk)?,
                filled: filled.graph.translation_length(&filled.map_word(&gk))?,
            });
        }
    }
    let preserved = rows.iter().all(|r| r.filled == r.k as usize * r.base && r.original == r.filled);
    Ok(LengthReport { preserved, rows })
}

// ---- separation ----

#[derive(Debug, Clone, Serialize)]
pub struct CosetRow {
    pub position: usize,
    pub vertex: String,
    pub representative: String,
    pub cardinality: usize,
    pub n_squared: usize,
    pub impermeable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CongruenceRow {
    pub short_position: usize,
    pub delta: Vec<i64>,
    pub epsilon: Vec<i64>,
    pub nu: Vec<i64>,
    pub n: i64,
    pub pairs_scanned: i64,
    pub solution: Option<(i64, i64)>,
    pub modulus: Option<ModulusCertificate>,
}

/// All checks of the separation argument, with transcripts.
#[derive(Debug, Clone, Serialize)]
pub struct SeparationCertificate {
    pub g: String,
    pub h: String,
    pub n: u64,
    pub filled_graph: String,
    pub relations_checked: usize,
    pub distinct_cosets: Vec<String>,
    pub impermeability: Vec<CosetRow>,
    pub congruences: Vec<CongruenceRow>,
    pub finite_conjugacy: Vec<String>,
    pub finite_verdict: Verdict,
    pub passed: bool,
}

fn fail(check: &str, detail: String, suggestion: &str) -> Error {
    Error::SeparationFailed {
        check: check.into(),
        detail,
        suggestion: suggestion.into(),
    }
}

/// Verifies that a non-conjugate pair stays non-conjugate in the filling.
pub fn verify_separation(pts: &Pts, g: &BassWord, h: &BassWord, spec: &FillingSpec) -> Result<SeparationCertificate> {
    let gog = pts.gog();
    let verdict = pts.conjugacy(g, h)?;
    if verdict.verdict != Verdict::NonConjugate {
        return Err(Error::Precondition(format!(
            "the pair must be non-conjugate in the suspension (verdict: {})",
            verdict.verdict
        )));
    }
    let filled = FilledGraph::new(gog, spec)?;
    let relations_checked = filled.check_relations(gog)?;
    let n = spec.edge_order as usize;
    let gs = pts.short_positions(g)?;
    let hs = pts.short_positions(h)?;
    let h0 = &hs[0];
    let matching: Vec<(usize, &ShortPosition)> = gs
        .iter()
        .enumerate()
        .filter(|(_, s)| s.form.edges == h0.form.edges && s.form.base == h0.form.base)
        .collect();

    // Double cosets at every white position of the matching short forms.
    let mut rows = Vec::new();
    let mut distinct = Vec::new();
    let edges = &h0.form.edges;
    let len = edges.len();
    let slot_rep = |f: &crate::pts::NormalForm, slot: usize| -> Word {
        if slot == 0 { f.head.1.clone() } else { f.positions[slot - 1].1.clone() }
    };
    for slot in 0..len / 2 {
        // Slot 0 is the head coset, which has the same shape as the last position.
        let pos = if slot == 0 { len / 2 - 1 } else { slot - 1 };
        let d_out = edges[2 * pos + 1];
        let v = gog.target(d_out);
        let c_in = gog.in_map(d_out).fibre_root().expect("white end");
        let next = edges[(2 * pos + 2) % edges.len()];
        let c_out = gog.out_map(next).fibre_root().expect("white end");
        let fg = match filled.graph.group(v) {
            GroupKind::Finite(f) => f.clone(),
            _ => unreachable!(),
        };
        let (ci, co) = (filled.map_fibre(v, c_in), filled.map_fibre(v, c_out));
        let mut reps: Vec<Word> = matching.iter().map(|(_, s)| slot_rep(&s.form, slot)).collect();
        reps.push(slot_rep(&h0.form, slot));
        reps.sort();
        reps.dedup();
        let mut images: Vec<(String, HashSet<usize>)> = Vec::new();
        for rep in &reps {
            let a = filled.map_fibre(v, rep);
            let imp = impermeability(&fg, ci, a, co, n).map_err(|e| {
                fail("impermeability", e.to_string(), "choose a fibre quotient where edge fibres have order N")
            })?;
            let fibre = match gog.group(v) {
                GroupKind::FreeCentral { fibre, .. } => fibre.clone(),
                _ => unreachable!(),
            };
            let rep_text = if rep.is_identity() { "1".to_string() } else { fibre.format_word(rep) };
            rows.push(CosetRow {
                position: 2 * slot,
                vertex: gog.vertex(v).name.clone(),
                representative: rep_text.clone(),
                cardinality: imp.cardinality,
                n_squared: n * n,
                impermeable: imp.impermeable,
            });
            if !imp.impermeable {
                return Err(fail(
                    "impermeability",
                    format!(
                        "double coset of {rep_text} at position {} has {} elements, not N² = {}",
                        2 * slot,
                        imp.cardinality,
                        n * n
                    ),
                    "deepen the fibre quotient so the edge fibres meet trivially",
                ));
            }
            let set: HashSet<usize> = (0..n as i64)
                .flat_map(|x| (0..n as i64).map(move |y| (x, y)))
                .map(|(x, y)| fg.mul(fg.mul(fg.pow(ci, x), a), fg.pow(co, y)))
                .collect();
            if let Some((prev, _)) = images.iter().find(|(_, s)| *s == set) {
                return Err(fail(
                    "distinct-images",
                    format!("{prev} and {rep_text} have the same image at position {}", 2 * slot),
                    "deepen the fibre quotient",
                ));
            }
            images.push((rep_text.clone(), set));
            distinct.push(format!("position {}: {rep_text}", 2 * slot));
        }
    }

    // Congruences for every short conjugate sharing edges, DCR and t-exponent with h.
    let mut congruences = Vec::new();
    for (i, s) in &matching {
        if s.form.dcr() != h0.form.dcr() || s.form.t_exp != h0.form.t_exp {
            continue;
        }
        let pd = pts.persistent_data(&s.form, &h0.form)?;
        let nn = spec.edge_order as i64;
        let nu = pd.nu(nn).map_err(|e| fail("congruence", e.to_string(), "choose N divisible by ε2"))?;
        let solution = mod_n_solvable(&pd.delta, &pd.epsilon, &nu, nn)?;
        let modulus = compute_m(&pd.epsilon, &pd.kappa, &pd.delta, pd.eps2, 10_000).ok();
        congruences.push(CongruenceRow {
            short_position: *i,
            delta: pd.delta.clone(),
            epsilon: pd.epsilon.clone(),
            nu,
            n: nn,
            pairs_scanned: nn * nn,
            solution,
            modulus: modulus.clone(),
        });
        if let Some((a, b)) = solution {
            let hint = modulus.map_or("raise N".to_string(), |m| format!("raise N to a multiple of M = {}", m.m));
            return Err(fail(
                "congruence",
                format!("short position {i}: δ = {:?} ≡ {a}·ε + {b}·ν mod {nn}", pd.delta),
                &hint,
            ));
        }
    }

    let (fg_, fh) = (filled.map_word(g), filled.map_word(h));
    let rep = filled.graph.conjugacy_finite(&fg_, &fh)?;
    if rep.verdict != Verdict::NonConjugate {
        return Err(fail(
            "finite-conjugacy",
            format!("images are {} in the filled graph: {}", rep.verdict, rep.reason),
            "raise N or deepen the fibre quotient",
        ));
    }
    Ok(SeparationCertificate {
        g: gog.format_word(g),
        h: gog.format_word(h),
        n: spec.edge_order,
        filled_graph: filled.graph.to_text(),
        relations_checked,
        distinct_cosets: distinct,
        impermeability: rows,
        congruences,
        finite_conjugacy: rep.transcript,
        finite_verdict: rep.verdict,
        passed: true,
    })
}

