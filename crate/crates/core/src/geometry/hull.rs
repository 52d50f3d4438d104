use num_traits::Zero;

use crate::error::{check_len, Error, Result};
use crate::linalg;
use crate::rational::{dot, Rational};

/// Affine hull of a finite point set, with a coordinate chart.
///
/// The hull is `offset + span(basis)`. `basis` is in reduced row echelon form,
/// so basis row `k` has a unit entry in coordinate `pivots[k]` and zeros in the
/// other pivot coordinates. The pivot coordinates form a chart: every point of
/// the hull is determined by its pivot entries.
#[derive(Debug, Clone)]
pub struct AffineHull {
    pub dim: usize,
    pub basis: Vec<Vec<Rational>>,
    pub pivots: Vec<usize>,
    pub offset: Vec<Rational>,
}

pub fn affine_hull(points: &[Vec<Rational>]) -> Result<AffineHull> {
    let first = points
        .first()
        .ok_or_else(|| Error::InvalidInput("affine hull of an empty point set".into()))?;
    let len = first.len();
    for p in points {
        check_len(len, p.len())?;
    }
    let diffs: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    let red = linalg::rref(&diffs, len);
    Ok(AffineHull { dim: red.rank(), basis: red.rows, pivots: red.pivots, offset: first.clone() })
}

impl AffineHull {
    pub fn ambient_len(&self) -> usize {
        self.offset.len()
    }

    /// Chart coordinates of a point.
    pub fn project(&self, x: &[Rational]) -> Vec<Rational> {
        self.pivots.iter().map(|&p| x[p].clone()).collect()
    }

    /// Rewrites the affine functional `a·x` on the hull as `a'·x + c` with `a'`
    /// supported on the chart coordinates. Two functionals agree on the hull
    /// iff their reductions agree.
    pub fn reduce_functional(&self, a: &[Rational]) -> (Vec<Rational>, Rational) {
        let mut reduced = vec![Rational::zero(); a.len()];
        for (k, &p) in self.pivots.iter().enumerate() {
            reduced[p] = dot(a, &self.basis[k]);
        }
        let c = dot(a, &self.offset) - dot(&reduced, &self.offset);
        (reduced, c)
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        if x.len() != self.ambient_len() {
            return false;
        }
        let coords = self.project(x);
        let mut y = self.offset.clone();
        for (k, &p) in self.pivots.iter().enumerate() {
            let t = &coords[k] - &self.offset[p];
            if t.is_zero() {
                continue;
            }
            for (yj, bj) in y.iter_mut().zip(&self.basis[k]) {
                *yj += &t * bj;
            }
        }
        y.as_slice() == x
    }
}
