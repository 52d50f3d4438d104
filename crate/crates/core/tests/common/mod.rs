//! Helpers shared by the integration tests: a brute-force facet oracle with
//! its own Gaussian elimination, and small random generators.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;

use bellpoly::geometry::enumerate_facets;
use bellpoly::{Behavior, Limits, Rational, Representation, Scenario};
use num_traits::{One, Signed, Zero};
use rand::Rng;

pub type Q = Rational;

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Row echelon form in place; returns the pivot columns.
fn eliminate(m: &mut [Vec<Q>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..ncols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

pub fn kernel(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut m = rows.to_vec();
    let pivots = eliminate(&mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); ncols];
            v[f] = Q::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -m[i][f].clone();
            }
            v
        })
        .collect()
}

/// Vertex-incidence sets of the facets of `conv(points)`, found by testing the
/// hyperplane through every affinely independent subset of hull-dimension size.
pub fn brute_force_incidences(points: &[Vec<Q>]) -> BTreeSet<BTreeSet<usize>> {
    let d = points[0].len();
    let diffs: Vec<Vec<Q>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect())
        .collect();
    let normal_space = kernel(&diffs, d);
    let k = d - normal_space.len();
    let mut out = BTreeSet::new();
    if k == 0 {
        return out;
    }
    for subset in subsets(points.len(), k) {
        let mut rows: Vec<Vec<Q>> = subset
            .iter()
            .map(|&i| {
                let mut r = points[i].clone();
                r.push(-Q::one());
                r
            })
            .collect();
        for n in &normal_space {
            let mut r = n.clone();
            r.push(Q::zero());
            rows.push(r);
        }
        let ker = kernel(&rows, d + 1);
        if ker.len() != 1 {
            continue;
        }
        let (a, b) = ker[0].split_at(d);
        let s: Vec<Q> = points.iter().map(|p| dot(a, p) - &b[0]).collect();
        let all_le = s.iter().all(|x| !x.is_positive());
        let all_ge = s.iter().all(|x| !x.is_negative());
        if (all_le || all_ge) && s.iter().any(|x| !x.is_zero()) {
            out.insert((0..points.len()).filter(|&i| s[i].is_zero()).collect());
        }
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Incidence sets of the library's facets for the same points, carried as
/// behaviors of a one-party scenario whose vector length is the dimension.
pub fn library_incidences(points: &[Vec<Q>]) -> BTreeSet<BTreeSet<usize>> {
    let s = Scenario::new(1, points[0].len(), 2).unwrap();
    let vs: Vec<Behavior> = points
        .iter()
        .map(|p| Behavior::new(s, Representation::FullCorrelation, p.clone()).unwrap())
        .collect();
    let facets = enumerate_facets(&vs, Limits::default()).unwrap();
    facets
        .iter()
        .map(|f| (0..points.len()).filter(|&i| f.value(&points[i]) == f.bound).collect())
        .collect()
}

pub fn random_points(rng: &mut impl Rng, count: usize, dim: usize, range: i64) -> Vec<Vec<Q>> {
    (0..count).map(|_| (0..dim).map(|_| q(rng.random_range(-range..=range))).collect()).collect()
}

/// Random rational in [-1, 1] with denominator at most `max_den`.
pub fn random_unit_rational(rng: &mut impl Rng, max_den: i64) -> Q {
    let den = rng.random_range(1..=max_den);
    Q::new(rng.random_range(-den..=den).into(), den.into())
}
