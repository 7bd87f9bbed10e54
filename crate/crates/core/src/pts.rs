//! Piecewise trivial suspensions: twisting numbers, normal forms, short
//! positions, double-coset representatives and the persistent equation.
//!
//! White vertices carry `F ⊕ ⟨t⟩`, black vertices `Z²`, and every edge group
//! is `Z²`, mapping onto the black end and onto `⟨c⟩ × ⟨t⟩` at the white end
//! for a root `c` of the fibre.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gog::{BassWord, Color, ConjugacyReport, Dir, Element, GraphOfGroups, GroupKind};
use crate::word::Word;

/// Migration data of a turn `(d_in, d_out)` through a black vertex:
/// `c̄ d_in d_out = d_in d_out c^sigma` and `t d_in d_out = d_in d_out c^epsilon t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Turn {
    pub sigma: i64,
    pub epsilon: i64,
}

/// A validated piecewise trivial suspension.
#[derive(Debug, Clone)]
pub struct Pts {
    gog: GraphOfGroups,
    white: Vec<bool>,
    turns: HashMap<(Dir, Dir), Turn>,
}

/// A hyperbolic loop at a white vertex written as
/// `ℓ0^l0 ã0 e1 e2 ℓ2^l2 ã2 e3 e4 ... en ℓn^ln ãn r^m t^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalForm {
    pub base: usize,
    pub edges: Vec<Dir>,
    /// `(l0, ã0)` for the turn `(en, e1)`.
    pub head: (i64, Word),
    /// `(l_i, ã_i)` at the white positions `2, 4, ..., n`.
    pub positions: Vec<(i64, Word)>,
    /// Exponent of `r = c̄1`, the fibre generator of the image of `e1`.
    pub r_exp: i64,
    pub t_exp: i64,
}

impl NormalForm {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// `(ã0, ã2, ..., ãn)`.
    pub fn dcr(&self) -> Vec<Word> {
        std::iter::once(self.head.1.clone())
            .chain(self.positions.iter().map(|p| p.1.clone()))
            .collect()
    }

    /// The exponents the prefix-preserving conjugation acts on: `(l4, ..., ln, m)`.
    pub fn persistent_exponents(&self) -> Vec<i64> {
        self.positions[1..]
            .iter()
            .map(|p| p.0)
            .chain(std::iter::once(self.r_exp))
            .collect()
    }
}

/// A conjugate of the input in short position.
#[derive(Debug, Clone)]
pub struct ShortPosition {
    pub form: NormalForm,
    /// Number of edges rotated to the back.
    pub rotation: usize,
    /// `w` with `w^-1 g w` equal to the short form.
    pub conjugator: BassWord,
    /// Value of the controlled slot: `l4` for length at least 4, `m` for length 2.
    pub controlled: i64,
    /// `|ε4|`, or `|ε2|` for length 2.
    pub modulus: i64,
}

/// Persistent vector `ε`, difference vector `δ` and content vector `κ` of a pair of
/// short forms with the same edges, representatives and `t`-exponent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PersistentData {
    pub epsilon: Vec<i64>,
    pub delta: Vec<i64>,
    pub kappa: Vec<i64>,
    pub eps2: i64,
    pub sigma2: i64,
}

impl PersistentData {
    /// `ν_N = (N/ε2) κ`; requires `ε2 | N`.
    pub fn nu(&self, n: i64) -> Result<Vec<i64>> {
        if n % self.eps2 != 0 {
            return Err(Error::Precondition(format!("ε2 = {} does not divide N = {n}", self.eps2)));
        }
        Ok(self.kappa.iter().map(|k| k * (n / self.eps2)).collect())
    }
}

/// The unique `λ` with `δ = λ ε`, if any. Entries of `ε` must be nonzero.
pub fn solve_persistent(delta: &[i64], epsilon: &[i64]) -> Option<i64> {
    assert_eq!(delta.len(), epsilon.len(), "vector lengths differ");
    assert!(epsilon.iter().all(|&e| e != 0), "persistent vector has a zero entry");
    let (d0, e0) = (*delta.first()?, epsilon[0]);
    if d0 % e0 != 0 {
        return None;
    }
    let lambda = d0 / e0;
    delta
        .iter()
        .zip(epsilon)
        .all(|(d, e)| *d == lambda * e)
        .then_some(lambda)
}

/// Sort key of the well-order on exponents: `0 < 1 < ... < bound`, then the
/// remaining integers by absolute value, positives before negatives.
pub fn well_order_key(x: i64, bound: i64) -> (u8, u64, bool) {
    if (0..=bound.abs()).contains(&x) {
        (0, x as u64, false)
    } else {
        (1, x.unsigned_abs(), x < 0)
    }
}

/// Canonical representative of `⟨c⟩ a ⟨c2⟩`: returns `(p, ã, q)` with
/// `a = c^p ã c2^q`, where `ã` is shortest, then lexicographically least,
/// over a window of exponents that is recentred until the optimum is interior.
pub fn double_coset_rep(c: &Word, a: &Word, c2: &Word) -> Result<(i64, Word, i64)> {
    // Next to a backtracking turn `c = c2`; a power of `c` is read on the right.
    if c == c2 {
        if let Some(k) = a.power_of(c) {
            return Ok((0, Word::identity(), k));
        }
    }
    let conj = a.inverse().mul(c).mul(a);
    if conj == *c2 || conj == c2.inverse() {
        return Err(Error::Unsupported(
            "permeable double coset in the free fibre (conjugate edge fibres)".into(),
        ));
    }
    let (mut p, mut q) = (0i64, 0i64);
    let mut best = a.clone();
    loop {
        let w = best.len().max(1) as i64;
        let mut cand: Option<(usize, Word, i64, i64)> = None;
        for m in -w..=w {
            let left = c.pow(-m).mul(&best);
            for n in -w..=w {
                let x = left.mul(&c2.pow(-n));
                let better = match &cand {
                    None => true,
                    Some((l, y, _, _)) => (x.len(), &x) < (*l, y),
                };
                if better {
                    cand = Some((x.len(), x, m, n));
                }
            }
        }
        let (_, x, m, n) = cand.expect("window is nonempty");
        if m == 0 && n == 0 {
            return Ok((p, best, q));
        }
        p += m;
        q += n;
        best = x;
    }
}

impl Pts {
    /// Validates the splitting and computes the migration data of every turn.
    /// Vertices without a colour are coloured by their group kind.
    pub fn new(gog: GraphOfGroups) -> Result<Self> {
        let mut issues = Vec::new();
        let mut white = Vec::new();
        for v in gog.vertices() {
            let kind_white = match v.group {
                GroupKind::FreeCentral { .. } => true,
                GroupKind::Abelian2 { .. } => false,
                GroupKind::Finite(_) => {
                    issues.push(format!("vertex {}: finite vertex groups are not allowed", v.name));
                    false
                }
            };
            if let Some(c) = v.color {
                if (c == Color::White) != kind_white {
                    issues.push(format!("vertex {}: colour does not match its group kind", v.name));
                }
            }
            white.push(kind_white);
        }
        for e in gog.edges() {
            if white[e.from] == white[e.to] {
                issues.push(format!("edge {}: endpoints have the same colour", e.name));
                continue;
            }
            if !matches!(e.group, GroupKind::Abelian2 { .. }) {
                issues.push(format!("edge {}: edge group must be Z²", e.name));
                continue;
            }
            for (map, v) in [(&e.iota, e.from), (&e.tau, e.to)] {
                let images: Vec<&Element> = map.images().iter().collect();
                if white[v] {
                    let root = map.fibre_root().expect("white end has a fibre root");
                    let rows: Vec<[i64; 2]> = images
                        .iter()
                        .map(|x| {
                            let (u, k) = x.free();
                            [u.power_of(root).unwrap_or(0), k]
                        })
                        .collect();
                    if (rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]).abs() != 1 {
                        issues.push(format!(
                            "edge {}: image at {} is not a maximal ⟨c⟩ × ⟨t⟩",
                            e.name,
                            gog.vertex(v).name
                        ));
                    }
                } else {
                    let rows: Vec<[i64; 2]> = images.iter().map(|x| x.pair()).collect();
                    if (rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]).abs() != 1 {
                        issues.push(format!(
                            "edge {}: does not map surjectively onto black vertex {}",
                            e.name,
                            gog.vertex(v).name
                        ));
                    }
                }
            }
        }
        if !issues.is_empty() {
            return Err(Error::InvalidGraph(issues.join("; ")));
        }
        let mut pts = Pts {
            gog,
            white,
            turns: HashMap::new(),
        };
        let mut turns = HashMap::new();
        for b in (0..pts.gog.vertices().len()).filter(|&v| !pts.white[v]) {
            let outs = pts.gog.dirs_from(b);
            let ins: Vec<Dir> = outs.iter().map(|d| d.rev()).collect();
            for &d_in in &ins {
                for &d_out in &outs {
                    if d_out == d_in.rev() {
                        continue;
                    }
                    turns.insert((d_in, d_out), pts.migrate_turn(d_in, d_out)?);
                }
            }
        }
        pts.turns = turns;
        if pts.gog.twist_check() {
            pts.twisting_numbers()?;
        }
        Ok(pts)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Pts::new(GraphOfGroups::parse(text)?)
    }

    pub fn gog(&self) -> &GraphOfGroups {
        &self.gog
    }

    pub fn is_white(&self, v: usize) -> bool {
        self.white[v]
    }

    /// Fibre generator of the edge image at the white end of `d` (its source or target).
    fn fibre_gen(&self, map_dir: Dir, at_source: bool) -> &Word {
        let m = if at_source { self.gog.out_map(map_dir) } else { self.gog.in_map(map_dir) };
        m.fibre_root().expect("white end has a fibre root")
    }

    /// Carries `c^p t^k` at the source of `d_in` across the turn, returning the
    /// exponents of `c'^q t^k'` at the target of `d_out`.
    fn carry(&self, d_in: Dir, d_out: Dir, p: i64, k: i64) -> (i64, i64) {
        let c = self.fibre_gen(d_in, true);
        let x = Element::Free(c.pow(p), k);
        let e = self.gog.out_map(d_in).preimage(&x).expect("element of the edge image");
        let black = self.gog.in_map(d_in).apply(&e);
        let e2 = self.gog.out_map(d_out).preimage(&black).expect("edge maps onto black vertex");
        let y = self.gog.in_map(d_out).apply(&e2);
        let (u, k2) = y.free();
        let c2 = self.fibre_gen(d_out, false);
        (u.power_of(c2).expect("image lies in ⟨c⟩ × ⟨t⟩"), k2)
    }

    fn migrate_turn(&self, d_in: Dir, d_out: Dir) -> Result<Turn> {
        let (s, s_t) = self.carry(d_in, d_out, 1, 0);
        let (eps, t_t) = self.carry(d_in, d_out, 0, 1);
        if s_t != 0 || t_t != 1 {
            return Err(Error::InvalidGraph(format!(
                "turn ({}, {}): fibre and centre are not carried to fibre and centre",
                self.gog.dir_name(d_in),
                self.gog.dir_name(d_out)
            )));
        }
        Ok(Turn { sigma: s, epsilon: eps })
    }

    pub fn turn(&self, d_in: Dir, d_out: Dir) -> Result<Turn> {
        self.turns.get(&(d_in, d_out)).copied().ok_or_else(|| {
            Error::Precondition(format!(
                "({}, {}) is not a turn through a black vertex",
                self.gog.dir_name(d_in),
                self.gog.dir_name(d_out)
            ))
        })
    }

    /// Twisting numbers of all turns, sorted by name. Fails on a zero twist.
    pub fn twisting_numbers(&self) -> Result<Vec<(String, String, Turn)>> {
        let mut out: Vec<(String, String, Turn)> = self
            .turns
            .iter()
            .map(|((a, b), t)| (self.gog.dir_name(*a).to_string(), self.gog.dir_name(*b).to_string(), *t))
            .collect();
        out.sort_by(|x, y| (&x.0, &x.1).cmp(&(&y.0, &y.1)));
        if let Some((a, b, _)) = out.iter().find(|t| t.2.epsilon == 0) {
            return Err(Error::ZeroTwist(format!("{a}, {b}")));
        }
        Ok(out)
    }

    fn nonzero_turn(&self, d_in: Dir, d_out: Dir) -> Result<Turn> {
        let t = self.turn(d_in, d_out)?;
        if t.epsilon == 0 {
            return Err(Error::ZeroTwist(format!(
                "{}, {}",
                self.gog.dir_name(d_in),
                self.gog.dir_name(d_out)
            )));
        }
        Ok(t)
    }

    /// Normal form of a hyperbolic loop based at a white vertex.
    pub fn normal_form(&self, g: &BassWord) -> Result<NormalForm> {
        if !self.white[g.start()] || !g.is_loop() {
            return Err(Error::Precondition("normal forms need a loop at a white vertex".into()));
        }
        let g = self.gog.reduce(g);
        if g.is_empty() {
            return Err(Error::NotHyperbolic("loop has no edges after reduction".into()));
        }
        let edges = g.edge_path();
        let n = edges.len();
        // White elements only: pull every black element into the preceding white one.
        let (u0, k0) = g.head().free();
        let mut whites: Vec<(Word, i64)> = vec![(u0.clone(), k0)];
        for (i, (d, x)) in g.steps().iter().enumerate() {
            if i % 2 == 0 {
                let grp = self.gog.group(self.gog.source(*d));
                let pre = self.gog.in_map(*d).preimage(x).expect("edge maps onto black vertex");
                let back = self.gog.out_map(*d).apply(&pre);
                let last = whites.last_mut().expect("nonempty");
                let prod = grp.mul(&Element::Free(last.0.clone(), last.1), &back);
                let (u, k) = prod.free();
                *last = (u.clone(), k);
            } else {
                let (u, k) = x.free();
                whites.push((u.clone(), k));
            }
        }
        let e1 = edges[0];
        let r = self.fibre_gen(e1, true).clone();
        let mut positions = Vec::with_capacity(n / 2);
        let (l0, a0, mut q) = double_coset_rep(self.fibre_gen(edges[n - 1], false), &whites[0].0, &r)?;
        let mut carry_t = whites[0].1;
        for i in 0..n / 2 {
            let (d_in, d_out) = (edges[2 * i], edges[2 * i + 1]);
            let turn = self.turn(d_in, d_out)?;
            let shift = turn.sigma * q + turn.epsilon * carry_t;
            let (u, k) = &whites[i + 1];
            let c_in = self.fibre_gen(d_out, false);
            let c_out = if 2 * i + 2 < n { self.fibre_gen(edges[2 * i + 2], true) } else { &r };
            let (p, a, mut q2) = double_coset_rep(c_in, u, c_out)?;
            if a.is_identity() && c_in == c_out {
                q2 += shift + p;
                positions.push((0, a));
            } else {
                positions.push((shift + p, a));
            }
            carry_t += k;
            q = q2;
        }
        Ok(NormalForm {
            base: g.start(),
            edges,
            head: (l0, a0),
            positions,
            r_exp: q,
            t_exp: carry_t,
        })
    }

    /// The Bass word spelled by a normal form.
    pub fn form_word(&self, f: &NormalForm) -> Result<BassWord> {
        let n = f.edges.len();
        let white = |u: Word, k: i64| Element::Free(u, k);
        let head = white(
            self.fibre_gen(f.edges[n - 1], false).pow(f.head.0).mul(&f.head.1),
            0,
        );
        let mut steps = Vec::with_capacity(n);
        for i in 0..n / 2 {
            let (d_in, d_out) = (f.edges[2 * i], f.edges[2 * i + 1]);
            steps.push((d_in, self.gog.group(self.gog.target(d_in)).identity()));
            let (l, a) = &f.positions[i];
            let mut u = self.fibre_gen(d_out, false).pow(*l).mul(a);
            let mut k = 0;
            if 2 * i + 2 == n {
                u = u.mul(&self.fibre_gen(f.edges[0], true).pow(f.r_exp));
                k = f.t_exp;
            }
            steps.push((d_out, white(u, k)));
        }
        self.gog.word_from_parts(f.base, head, steps)
    }

    pub fn format_form(&self, f: &NormalForm) -> Result<String> {
        Ok(self.gog.format_word(&self.form_word(f)?))
    }

    /// A cyclically reduced conjugate based at a white vertex with trivial head,
    /// with the conjugator `c` (`c^-1 g c = core`).
    fn white_core(&self, g: &BassWord) -> Result<(BassWord, BassWord)> {
        let (core, c) = self.gog.cyclic_reduction(g)?;
        if core.is_empty() {
            return Err(Error::NotHyperbolic("translation length is 0".into()));
        }
        if self.white[core.start()] {
            return Ok((core, c));
        }
        let (d, x) = core.steps()[0].clone();
        let p = self.gog.word_from_parts(core.start(), core.head().clone(), vec![(d, x)])?;
        let rot = self.gog.conjugate(&core, &p)?;
        Ok((rot, self.gog.mul(&c, &p)?))
    }

    /// All conjugates of `g` in short position, one per rotation class.
    pub fn short_positions(&self, g: &BassWord) -> Result<Vec<ShortPosition>> {
        let (core, c) = self.white_core(g)?;
        let n = core.len();
        let mut found: Vec<ShortPosition> = (0..n / 2)
            .into_par_iter()
            .map(|i| {
                let prefix = self.gog.word_from_parts(core.start(), core.head().clone(), core.steps()[..2 * i].to_vec())?;
                let rot = self.gog.conjugate(&core, &prefix)?;
                let (short, w, controlled, modulus) = self.shorten(&rot)?;
                Ok(ShortPosition {
                    form: short,
                    rotation: 2 * i,
                    conjugator: self.gog.reduce(&self.gog.mul(&self.gog.mul(&c, &prefix)?, &w)?),
                    controlled,
                    modulus,
                })
            })
            .collect::<Result<_>>()?;
        let mut seen = std::collections::HashSet::new();
        found.retain(|s| seen.insert(s.form.clone()));
        Ok(found)
    }

    /// Conjugates a cyclically reduced loop with trivial head by an element of the
    /// first edge image so that `l2 = 0` and the controlled slot lies in `[0, modulus)`.
    fn shorten(&self, rot: &BassWord) -> Result<(NormalForm, BassWord, i64, i64)> {
        let nf = self.normal_form(rot)?;
        let edges = &nf.edges;
        let t2 = self.nonzero_turn(edges[0], edges[1])?;
        let (sigma, eps2) = (t2.sigma, t2.epsilon);
        let l2 = nf.positions[0].0;
        // x = c̄1^alpha t^beta acts by l2 += sigma alpha + eps2 beta, lj += epsj beta, m -= alpha.
        let alpha1 = -sigma * l2;
        let (value, step) = if edges.len() == 2 {
            (nf.r_exp - alpha1, sigma * eps2)
        } else {
            let t4 = self.nonzero_turn(edges[2], edges[3])?;
            (nf.positions[1].0, t4.epsilon)
        };
        let modulus = step.abs();
        let target = value.rem_euclid(modulus);
        let lambda = (target - value) / step;
        let alpha = alpha1 - sigma * eps2 * lambda;
        let beta = lambda;
        let r = self.fibre_gen(edges[0], true);
        let x = Element::Free(r.pow(alpha), beta);
        let grp = self.gog.group(nf.base);
        let w = self.gog.element_word(nf.base, grp.inv(&x));
        let short_word = self.gog.conjugate(rot, &w)?;
        let short = self.normal_form(&short_word)?;
        let got = if edges.len() == 2 { short.r_exp } else { short.positions[1].0 };
        if short.positions[0].0 != 0 || got != target {
            return Err(Error::Precondition("internal error: short position normalization failed".into()));
        }
        Ok((short, w, target, modulus))
    }

    /// Persistent data of two short forms sharing edges, representatives and `t`-exponent.
    pub fn persistent_data(&self, g: &NormalForm, h: &NormalForm) -> Result<PersistentData> {
        if g.edges != h.edges || g.dcr() != h.dcr() || g.t_exp != h.t_exp || g.base != h.base {
            return Err(Error::Precondition("mismatched prefixes: edges, representatives or t-exponents differ".into()));
        }
        let e = &g.edges;
        let t2 = self.nonzero_turn(e[0], e[1])?;
        let mut kappa = Vec::new();
        for i in 1..e.len() / 2 {
            kappa.push(self.nonzero_turn(e[2 * i], e[2 * i + 1])?.epsilon);
        }
        let mut epsilon = kappa.clone();
        epsilon.push(t2.sigma * t2.epsilon);
        kappa.push(0);
        let delta = h
            .persistent_exponents()
            .iter()
            .zip(g.persistent_exponents())
            .map(|(a, b)| a - b)
            .collect();
        Ok(PersistentData {
            epsilon,
            delta,
            kappa,
            eps2: t2.epsilon,
            sigma2: t2.sigma,
        })
    }

    /// The prefix-preserving conjugator `P = c̄1^(-σ ε2) t` at the base of a form.
    pub fn prefix_generator(&self, f: &NormalForm) -> Result<Element> {
        let t2 = self.nonzero_turn(f.edges[0], f.edges[1])?;
        let r = self.fibre_gen(f.edges[0], true);
        Ok(Element::Free(r.pow(-t2.sigma * t2.epsilon), 1))
    }

    /// Decides conjugacy of two loops based at white vertices.
    pub fn conjugacy(&self, g: &BassWord, h: &BassWord) -> Result<ConjugacyReport> {
        let lg = self.gog.translation_length(g)?;
        let lh = self.gog.translation_length(h)?;
        let mut transcript = vec![format!("translation lengths: {lg} and {lh}")];
        if lg != lh {
            let reason = if lg == 0 || lh == 0 {
                "one element is elliptic and the other hyperbolic"
            } else {
                "translation lengths differ"
            };
            return Ok(ConjugacyReport::non_conjugate(reason, transcript));
        }
        if lg == 0 {
            let mut rep = self.gog.conjugacy(g, h)?;
            transcript.append(&mut rep.transcript);
            rep.transcript = transcript;
            return Ok(rep);
        }
        let gs = self.short_positions(g)?;
        let hs = self.short_positions(h)?;
        let h0 = &hs[0];
        transcript.push(format!("{} short positions of g, {} of h", gs.len(), hs.len()));
        transcript.push(format!("short form of h: {}", self.format_form(&h0.form)?));
        let mut dcr_match = false;
        for (i, s) in gs.iter().enumerate() {
            let line = format!("g short {i} (rotation {}): {}", s.rotation, self.format_form(&s.form)?);
            if s.form.edges != h0.form.edges || s.form.base != h0.form.base {
                transcript.push(format!("{line}: edge part differs"));
                continue;
            }
            if s.form.dcr() != h0.form.dcr() {
                transcript.push(format!("{line}: DCR differs"));
                continue;
            }
            if s.form.t_exp != h0.form.t_exp {
                transcript.push(format!("{line}: t-exponent differs"));
                continue;
            }
            dcr_match = true;
            let pd = self.persistent_data(&s.form, &h0.form)?;
            match solve_persistent(&pd.delta, &pd.epsilon) {
                None => transcript.push(format!(
                    "{line}: δ = {:?}, ε = {:?}, persistent equation unsolvable",
                    pd.delta, pd.epsilon
                )),
                Some(lambda) => {
                    transcript.push(format!("{line}: δ = {:?} = {lambda}·ε", pd.delta));
                    let p = self.prefix_generator(&s.form)?;
                    let grp = self.gog.group(s.form.base);
                    let q = self.gog.element_word(s.form.base, grp.pow(&grp.inv(&p), lambda));
                    let w = self.gog.mul(&self.gog.mul(&s.conjugator, &q)?, &self.gog.inverse(&h0.conjugator))?;
                    let w = self.gog.reduce(&w);
                    if !self.gog.verify_conjugator(g, h, &w) {
                        return Err(Error::Precondition("internal error: conjugator failed verification".into()));
                    }
                    transcript.push(format!("witness verified by reduction: {}", self.gog.format_word(&w)));
                    return Ok(ConjugacyReport::conjugate(w, "persistent equation solved", transcript));
                }
            }
        }
        let reason = if dcr_match {
            "persistent equation unsolvable"
        } else {
            "no short position shares edge part, DCR and t-exponent"
        };
        Ok(ConjugacyReport::non_conjugate(reason, transcript))
    }
}
