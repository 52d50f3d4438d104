//! Double description method over the integers.
//!
//! Given constraint rows `y_i`, computes the extreme rays of the pointed cone
//! `{w : y_i · w ≥ 0 for all i}`. Rows are inserted one at a time in input
//! order; two rays are combined only when they are adjacent, which is decided
//! by the rank of the constraints tight at both.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{primitive_scale, Rational};

#[derive(Debug, Clone)]
struct Bitset(Vec<u64>);

impl Bitset {
    fn new(bits: usize) -> Self {
        Bitset(vec![0; bits.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn intersect(&self, other: &Bitset) -> Bitset {
        Bitset(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            (0..64).filter(move |b| w & (1 << b) != 0).map(move |b| k * 64 + b)
        })
    }
}

#[derive(Debug, Clone)]
struct Ray {
    w: Vec<BigInt>,
    zero: Bitset,
}

struct Row {
    big: Vec<BigInt>,
    small: Option<Vec<i64>>,
}

fn to_integer_row(y: &[Rational]) -> Vec<BigInt> {
    let s = primitive_scale(y);
    y.iter().map(|x| (x * &s).to_integer()).collect()
}

fn make_primitive(w: &mut [BigInt]) {
    let g = w.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in w.iter_mut() {
            *x /= &g;
        }
    }
}

fn eval(row: &Row, w: &[BigInt]) -> BigInt {
    let mut acc = BigInt::zero();
    match &row.small {
        Some(s) => {
            for (a, b) in s.iter().zip(w) {
                if *a != 0 && !b.is_zero() {
                    acc += b * *a;
                }
            }
        }
        None => {
            for (a, b) in row.big.iter().zip(w) {
                if !a.is_zero() && !b.is_zero() {
                    acc += a * b;
                }
            }
        }
    }
    acc
}

/// Rank of a set of small integer rows by fraction-free elimination; `None`
/// on overflow.
fn rank_i128(rows: &[&[i64]], ncols: usize) -> Option<usize> {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut r = 0;
    let mut prev: i128 = 1;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        let piv = m[r][c];
        for i in r + 1..m.len() {
            let f = m[i][c];
            #[allow(clippy::needless_range_loop)]
            for j in c..ncols {
                let v = piv.checked_mul(m[i][j])?.checked_sub(f.checked_mul(m[r][j])?)?;
                m[i][j] = v / prev;
            }
        }
        prev = piv;
        r += 1;
    }
    Some(r)
}

fn rank_of(rows: &[Row], subset: &Bitset, ncols: usize) -> usize {
    let idx: Vec<usize> = subset.iter().collect();
    if idx.iter().all(|&i| rows[i].small.is_some()) {
        let small: Vec<&[i64]> = idx.iter().map(|&i| rows[i].small.as_deref().unwrap()).collect();
        if let Some(r) = rank_i128(&small, ncols) {
            return r;
        }
    }
    let dense: Vec<Vec<Rational>> = idx
        .iter()
        .map(|&i| rows[i].big.iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect();
    linalg::rank(&dense, ncols)
}

/// Progress of an insertion run, reported after each processed row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DdProgress {
    pub inserted: usize,
    pub total: usize,
    pub rays: usize,
}

/// Extreme rays of `{w : rows · w ≥ 0}`. The rows must have full column rank
/// (the cone is then pointed). Rays are returned as primitive integer vectors.
#[cfg(test)]
pub fn extreme_rays(rows: &[Vec<Rational>]) -> Result<Vec<Vec<BigInt>>> {
    extreme_rays_with_progress(rows, &mut |_| {})
}

pub fn extreme_rays_with_progress(
    rows: &[Vec<Rational>],
    progress: &mut dyn FnMut(DdProgress),
) -> Result<Vec<Vec<BigInt>>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let rows: Vec<Row> = rows
        .iter()
        .map(|y| {
            let big = to_integer_row(y);
            let small = big.iter().map(|x| x.to_i64().filter(|v| v.abs() < (1 << 20))).collect();
            Row { big, small }
        })
        .collect();

    // Initial simplicial cone on the first independent rows.
    let mut basis_rows: Vec<usize> = Vec::new();
    let mut current: Vec<Vec<Rational>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut trial = current.clone();
        trial.push(row.big.iter().map(|x| Rational::from_integer(x.clone())).collect());
        if linalg::rank(&trial, ncols) == trial.len() {
            current = trial;
            basis_rows.push(i);
            if current.len() == ncols {
                break;
            }
        }
    }
    if current.len() != ncols {
        return Err(Error::Invariant(format!(
            "constraint rows have rank {} < {ncols}; cone is not pointed",
            current.len()
        )));
    }
    let inverse_cols = invert_columns(&current)?;

    let mut rays: Vec<Ray> = Vec::with_capacity(ncols);
    for (k, col) in inverse_cols.iter().enumerate() {
        let mut w = to_integer_row(col);
        make_primitive(&mut w);
        let mut zero = Bitset::new(rows.len());
        for (j, &r) in basis_rows.iter().enumerate() {
            if j != k {
                zero.insert(r);
            }
        }
        rays.push(Ray { w, zero });
    }

    let in_basis: std::collections::HashSet<usize> = basis_rows.iter().copied().collect();
    let total = rows.len();
    for (i, row) in rows.iter().enumerate() {
        if in_basis.contains(&i) {
            continue;
        }
        progress(DdProgress { inserted: i, total, rays: rays.len() });
        let values: Vec<BigInt> = rays.iter().map(|r| eval(row, &r.w)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_negative()).collect();
        if neg.is_empty() {
            for (k, v) in values.iter().enumerate() {
                if v.is_zero() {
                    rays[k].zero.insert(i);
                }
            }
            continue;
        }

        let mut created = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zero.intersect(&rays[n].zero);
                if common.len() + 2 < ncols {
                    continue;
                }
                if rank_of(&rows, &common, ncols) + 2 != ncols {
                    continue;
                }
                let vp = &values[p];
                let vn = -&values[n];
                let mut w: Vec<BigInt> =
                    rays[n].w.iter().zip(&rays[p].w).map(|(a, b)| vp * a + &vn * b).collect();
                make_primitive(&mut w);
                let mut zero = common;
                zero.insert(i);
                created.push(Ray { w, zero });
            }
        }

        let mut next = Vec::with_capacity(rays.len() + created.len());
        for (k, ray) in rays.into_iter().enumerate() {
            if values[k].is_negative() {
                continue;
            }
            let mut ray = ray;
            if values[k].is_zero() {
                ray.zero.insert(i);
            }
            next.push(ray);
        }
        next.extend(created);
        rays = next;
    }

    Ok(rays.into_iter().map(|r| r.w).collect())
}

/// Columns of the inverse of a square nonsingular matrix.
fn invert_columns(m: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let n = m.len();
    let augmented: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let red = linalg::rref(&augmented, 2 * n);
    if red.pivots.iter().copied().take(n).ne(0..n) {
        return Err(Error::Invariant("singular initial basis".into()));
    }
    Ok((0..n).map(|c| (0..n).map(|r| red.rows[r][n + c].clone()).collect()).collect())
}
