#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use suspension_lab::gog::{BassWord, Element, GraphOfGroups};
use suspension_lab::pts::Pts;

pub fn fixtures() -> Vec<Pts> {
    [
        include_str!("../../../../fixtures/demo.pts"),
        include_str!("../../../../fixtures/cycle.pts"),
        include_str!("../../../../fixtures/triple.pts"),
    ]
    .iter()
    .map(|t| Pts::parse(t).unwrap())
    .collect()
}

pub fn random_element(g: &GraphOfGroups, v: usize, rng: &mut ChaCha8Rng) -> Element {
    let grp = g.group(v);
    let gens = grp.generators();
    let mut x = grp.identity();
    for _ in 0..rng.gen_range(0..=3) {
        let y = &gens[rng.gen_range(0..gens.len())];
        x = grp.mul(&x, &grp.pow(y, rng.gen_range(-2..=2)));
    }
    x
}

/// A non-backtracking edge path of `len` edges from `start`, with random vertex elements.
pub fn random_path(g: &GraphOfGroups, start: usize, len: usize, rng: &mut ChaCha8Rng) -> BassWord {
    let head = random_element(g, start, rng);
    let mut steps = Vec::new();
    let mut at = start;
    let mut prev = None;
    for _ in 0..len {
        let dirs: Vec<_> = g.dirs_from(at).into_iter().filter(|d| Some(d.rev()) != prev).collect();
        let d = dirs[rng.gen_range(0..dirs.len())];
        at = g.target(d);
        steps.push((d, random_element(g, at, rng)));
        prev = Some(d);
    }
    g.word_from_parts(start, head, steps).unwrap()
}

/// A hyperbolic loop at a white vertex, if the walk closes up.
pub fn random_loop(p: &Pts, seed: u64) -> Option<BassWord> {
    let g = p.gog();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = g.vertex_index("w").unwrap();
    for _ in 0..20 {
        let len = 2 * rng.gen_range(1..=3);
        let w = random_path(g, start, len, &mut rng);
        if w.is_loop() && g.translation_length(&w).unwrap() > 0 {
            return Some(w);
        }
    }
    None
}
