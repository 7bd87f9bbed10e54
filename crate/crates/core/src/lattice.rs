//! Exact integer linear algebra: rank, Hermite-style echelon bases and
//! lattice membership.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Rank over the rationals, by fraction-free elimination.
pub fn rank(rows: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let (a, b) = (m[r][c].clone(), m[i][c].clone());
            for j in c..cols {
                let v = &m[i][j] * &a - &m[r][j] * &b;
                m[i][j] = v;
            }
            let g = m[i].iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if !g.is_zero() {
                for x in m[i].iter_mut() {
                    *x = &*x / &g;
                }
            }
        }
        r += 1;
    }
    r
}

pub fn rank_i64(rows: &[Vec<i64>]) -> usize {
    let big: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    rank(&big)
}

/// An integer row lattice in echelon form: pivots positive, entries above a pivot reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    dim: usize,
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

impl Lattice {
    /// The lattice spanned by the given integer vectors.
    pub fn span(dim: usize, generators: &[Vec<i64>]) -> Self {
        let mut m: Vec<Vec<BigInt>> = generators
            .iter()
            .map(|g| {
                assert_eq!(g.len(), dim, "generator dimension mismatch");
                g.iter().map(|&x| BigInt::from(x)).collect()
            })
            .collect();
        let mut rows = Vec::new();
        let mut pivots = Vec::new();
        let mut top = 0;
        for c in 0..dim {
            // Euclid on column c among rows top..
            loop {
                let nz: Vec<usize> = (top..m.len()).filter(|&i| !m[i][c].is_zero()).collect();
                if nz.is_empty() {
                    break;
                }
                let p = *nz
                    .iter()
                    .min_by(|&&i, &&j| m[i][c].abs().cmp(&m[j][c].abs()))
                    .unwrap();
                m.swap(top, p);
                let mut done = true;
                for i in top + 1..m.len() {
                    if m[i][c].is_zero() {
                        continue;
                    }
                    let q = m[i][c].div_floor(&m[top][c]);
                    for j in c..dim {
                        let v = &m[i][j] - &q * &m[top][j];
                        m[i][j] = v;
                    }
                    if !m[i][c].is_zero() {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if top < m.len() && !m[top][c].is_zero() {
                if m[top][c].is_negative() {
                    for x in m[top].iter_mut() {
                        *x = -&*x;
                    }
                }
                pivots.push(c);
                top += 1;
            }
        }
        rows.extend(m.into_iter().take(top));
        // Reduce entries above each pivot.
        for k in 0..rows.len() {
            let c = pivots[k];
            for i in 0..k {
                let q = rows[i][c].div_floor(&rows[k][c]);
                if !q.is_zero() {
                    for j in 0..dim {
                        let v = &rows[i][j] - &q * &rows[k][j];
                        rows[i][j] = v;
                    }
                }
            }
        }
        Lattice { dim, rows, pivots }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> Vec<Vec<i64>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|x| i64::try_from(x).expect("entry fits i64")).collect())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Integer coordinates of `v` in the echelon basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[i64]) -> Option<Vec<i64>> {
        let mut v: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        let mut coords = Vec::with_capacity(self.rows.len());
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            if v[..c].iter().any(|x| !x.is_zero()) {
                return None;
            }
            let (q, r) = v[c].div_rem(&row[c]);
            if !r.is_zero() {
                return None;
            }
            for j in c..self.dim {
                let x = &v[j] - &q * &row[j];
                v[j] = x;
            }
            coords.push(i64::try_from(&q).ok()?);
        }
        v.iter().all(Zero::is_zero).then_some(coords)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.coordinates(v).is_some()
    }
}

/// The lattice spanned by `generators` together with `modulus · e_i`.
pub fn span_mod(dim: usize, generators: &[Vec<i64>], modulus: i64) -> Lattice {
    let mut all = generators.to_vec();
    for i in 0..dim {
        let mut e = vec![0; dim];
        e[i] = modulus;
        all.push(e);
    }
    Lattice::span(dim, &all)
}
