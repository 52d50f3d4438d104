//! Exact phase-one simplex with Bland's rule.
//!
//! Solves the feasibility problem `A λ = c, λ ≥ 0`. When the system is
//! infeasible the final tableau yields a Farkas vector `y` with
//! `yᵀA ≤ 0` and `yᵀc > 0`.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible(Vec<Rational>),
}

/// `a` is row-major `m × n`.
pub fn feasibility(a: &[Vec<Rational>], c: &[Rational]) -> Feasibility {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let width = n + m;

    // Flip rows so the right-hand side is nonnegative; artificials start basic.
    let mut flip = vec![false; m];
    let mut tab: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rational> = Vec::with_capacity(m);
    for i in 0..m {
        flip[i] = c[i].is_negative();
        let sign = if flip[i] { -Rational::one() } else { Rational::one() };
        let mut row: Vec<Rational> = a[i].iter().map(|x| x * &sign).collect();
        row.extend((0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
        tab.push(row);
        rhs.push(&c[i] * &sign);
    }
    let mut basis: Vec<usize> = (n..width).collect();
    let cost = |j: usize| if j >= n { Rational::one() } else { Rational::zero() };

    loop {
        // Reduced costs r_j = c_j − c_Bᵀ T_j; Bland: lowest index with r_j < 0.
        let entering = (0..width).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let mut r = cost(j);
            for (i, &b) in basis.iter().enumerate() {
                if b >= n && !tab[i][j].is_zero() {
                    r -= &tab[i][j];
                }
            }
            r.is_negative()
        });
        let Some(e) = entering else { break };

        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if !tab[i][e].is_positive() {
                continue;
            }
            let ratio = &rhs[i] / &tab[i][e];
            let better = match &leave {
                None => true,
                Some((k, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*k]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // Phase one is bounded below by zero, so a leaving row always exists.
        let (l, _) = leave.expect("phase-one objective is bounded");

        let inv = Rational::one() / &tab[l][e];
        for x in tab[l].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        rhs[l] *= &inv;
        let pivot_row = tab[l].clone();
        let pivot_rhs = rhs[l].clone();
        for i in 0..m {
            if i == l || tab[i][e].is_zero() {
                continue;
            }
            let f = tab[i][e].clone();
            for (x, y) in tab[i].iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            rhs[i] -= &f * &pivot_rhs;
        }
        basis[l] = e;
    }

    let objective: Rational = basis
        .iter()
        .zip(&rhs)
        .filter(|(&b, _)| b >= n)
        .map(|(_, v)| v.clone())
        .sum();

    if objective.is_zero() {
        let mut x = vec![Rational::zero(); n];
        for (i, &b) in basis.iter().enumerate() {
            if b < n {
                x[b] = rhs[i].clone();
            }
        }
        Feasibility::Feasible(x)
    } else {
        // yᵀ = c_Bᵀ B⁻¹; B⁻¹ sits in the artificial columns.
        let mut y = vec![Rational::zero(); m];
        for (i, &b) in basis.iter().enumerate() {
            if b < n {
                continue;
            }
            for (k, yk) in y.iter_mut().enumerate() {
                *yk += &tab[i][n + k];
            }
        }
        for (yk, &f) in y.iter_mut().zip(&flip) {
            if f {
                *yk = -yk.clone();
            }
        }
        Feasibility::Infeasible(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{dot, int, ratio};

    fn rows(r: &[&[i64]]) -> Vec<Vec<Rational>> {
        r.iter().map(|row| row.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn feasible_convex_combination() {
        // λ1 + λ2 = 1, λ1·0 + λ2·2 = 1 → λ = (1/2, 1/2)
        let a = rows(&[&[0, 2], &[1, 1]]);
        let c = vec![int(1), int(1)];
        assert_eq!(feasibility(&a, &c), Feasibility::Feasible(vec![ratio(1, 2), ratio(1, 2)]));
    }

    #[test]
    fn infeasible_yields_farkas_vector() {
        let a = rows(&[&[0, 2], &[1, 1]]);
        let c = vec![int(3), int(1)];
        let Feasibility::Infeasible(y) = feasibility(&a, &c) else { panic!("expected infeasible") };
        for j in 0..2 {
            let col: Vec<Rational> = a.iter().map(|r| r[j].clone()).collect();
            assert!(dot(&y, &col) <= Rational::zero());
        }
        assert!(dot(&y, &c) > Rational::zero());
    }

    #[test]
    fn negative_rhs_rows() {
        let a = rows(&[&[-1, -3], &[1, 1]]);
        let c = vec![int(-2), int(1)];
        let Feasibility::Feasible(x) = feasibility(&a, &c) else { panic!() };
        assert_eq!(x, vec![ratio(1, 2), ratio(1, 2)]);
        let c = vec![int(-4), int(1)];
        let Feasibility::Infeasible(y) = feasibility(&a, &c) else { panic!() };
        assert!(dot(&y, &c) > Rational::zero());
    }

    #[test]
    fn redundant_rows_are_fine() {
        let a = rows(&[&[1, 0], &[1, 0], &[1, 1]]);
        let c = vec![int(1), int(1), int(1)];
        assert_eq!(feasibility(&a, &c), Feasibility::Feasible(vec![int(1), int(0)]));
    }
}
