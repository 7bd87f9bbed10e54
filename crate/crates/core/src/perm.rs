//! Permutations acting on the right and small permutation groups held as
//! explicit element lists.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};

/// A permutation of `0..degree`; `image[x]` is `x^g`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    image: Vec<u16>,
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm {
            image: (0..degree as u16).collect(),
        }
    }

    pub fn from_images(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &x in &image {
            if x >= n || seen[x] {
                return Err(Error::InvalidFilling(format!("{image:?} is not a permutation")));
            }
            seen[x] = true;
        }
        Ok(Perm {
            image: image.into_iter().map(|x| x as u16).collect(),
        })
    }

    /// Parses 1-based cycle notation such as `(1 2)(3 4 5)` or `()`.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self> {
        let mut image: Vec<usize> = (0..degree).collect();
        let mut rest = text.trim();
        if rest.is_empty() {
            return Ok(Perm::identity(degree));
        }
        while !rest.is_empty() {
            let body_end = rest
                .find(')')
                .filter(|_| rest.starts_with('('))
                .ok_or_else(|| Error::parse(1, 1, format!("bad cycle notation `{text}`")))?;
            let body = &rest[1..body_end];
            let pts: Vec<usize> = body
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .ok()
                        .filter(|&x| x >= 1 && x <= degree)
                        .map(|x| x - 1)
                        .ok_or_else(|| Error::parse(1, 1, format!("bad point `{s}` in `{text}`")))
                })
                .collect::<Result<_>>()?;
            let cycle = Perm::cycle(&pts, degree)?;
            image = image.iter().map(|&x| cycle.apply(x)).collect();
            rest = rest[body_end + 1..].trim_start();
        }
        Perm::from_images(image)
    }

    fn cycle(points: &[usize], degree: usize) -> Result<Self> {
        let mut image: Vec<usize> = (0..degree).collect();
        for (i, &p) in points.iter().enumerate() {
            image[p] = points[(i + 1) % points.len()];
        }
        Perm::from_images(image)
    }

    pub fn degree(&self) -> usize {
        self.image.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.image[x] as usize
    }

    /// `self * other`: first `self`, then `other`.
    pub fn mul(&self, other: &Perm) -> Perm {
        Perm {
            image: self.image.iter().map(|&x| other.image[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut image = vec![0u16; self.image.len()];
        for (x, &y) in self.image.iter().enumerate() {
            image[y as usize] = x as u16;
        }
        Perm { image }
    }

    pub fn pow(&self, k: i64) -> Perm {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Perm::identity(self.degree());
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for s in 0..self.degree() {
            if seen[s] || self.apply(s) == s {
                continue;
            }
            let mut c = vec![s];
            seen[s] = true;
            let mut x = self.apply(s);
            while x != s {
                seen[x] = true;
                c.push(x);
                x = self.apply(x);
            }
            out.push(c);
        }
        out
    }

    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .fold(1u64, |acc, c| acc.lcm(&(c.len() as u64)))
    }

    /// Places `self` on points `offset..offset+degree` of a permutation of degree `total`.
    pub fn shifted(&self, offset: usize, total: usize) -> Perm {
        let mut image: Vec<u16> = (0..total as u16).collect();
        for (x, &y) in self.image.iter().enumerate() {
            image[offset + x] = offset as u16 + y;
        }
        Perm { image }
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let pts: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", pts.join(" "))?;
        }
        Ok(())
    }
}

/// A finite permutation group stored as an explicit element list.
#[derive(Debug, Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
}

impl PartialEq for PermGroup {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.index.len() == other.index.len()
            && self.elements.iter().all(|e| other.index.contains_key(e))
    }
}

impl PermGroup {
    /// Closes the generators under multiplication; fails beyond `limit` elements.
    pub fn generate(degree: usize, generators: &[Perm], limit: usize) -> Result<Self> {
        let id = Perm::identity(degree);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0)]);
        let mut queue = VecDeque::from([0usize]);
        for g in generators {
            if g.degree() != degree {
                return Err(Error::InvalidFilling("generator degree mismatch".into()));
            }
        }
        while let Some(i) = queue.pop_front() {
            for g in generators {
                let x = elements[i].mul(g);
                if !index.contains_key(&x) {
                    if elements.len() >= limit {
                        return Err(Error::ResourceBound(format!(
                            "permutation group larger than {limit}"
                        )));
                    }
                    index.insert(x.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(x);
                }
            }
        }
        Ok(PermGroup {
            degree,
            generators: generators.to_vec(),
            elements,
            index,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.index.contains_key(p)
    }

    pub fn identity_index(&self) -> usize {
        0
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.index[&self.elements[a].mul(&self.elements[b])]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.index[&self.elements[a].inverse()]
    }

    /// Least common multiple of element orders.
    pub fn exponent(&self) -> u64 {
        self.elements
            .iter()
            .fold(1u64, |acc, p| acc.lcm(&p.order()))
    }
}

/// The cyclic subgroup generated by `p`, as a list of powers `p^0, p^1, ...`.
pub fn cyclic_subgroup(p: &Perm) -> Vec<Perm> {
    let mut out = vec![Perm::identity(p.degree())];
    let mut x = p.clone();
    while !x.is_identity() {
        out.push(x.clone());
        x = x.mul(p);
    }
    out
}
