//! The complete family of full-correlation facets for `(N, 2, 2)`.
//!
//! With two settings per party a settings tuple is an `N`-bit string `s`.
//! The parity transform `f̂(s) = Σ_r f(r) (−1)^{⟨r,s⟩}` (no prefactor; the
//! inverse carries `2^{−N}`) maps each of the `2^(2^N)` sign vectors to the
//! coefficients of one facet. In transformed coordinates the local polytope
//! is the cross-polytope `Σ_r |ξ̂(r)| ≤ 2^N`, whose vertices `±2^N e_r` are
//! exactly the images of the deterministic correlation vectors.

use num_bigint::BigUint;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Inequality;
use crate::rational::{int, Rational};
use crate::scenario::{Behavior, Representation, Scenario};

/// Default cap on `2^(2^n)` for [`ww_enumerate`]: admits `n ≤ 4`.
pub const DEFAULT_WW_CAP: u64 = 1 << 16;

/// ℓ1 threshold of the cross-polytope in transformed coordinates, as a
/// function of `n`. Guarded by an LP test against the vertex set.
pub fn membership_threshold(n: usize) -> Rational {
    int(1i64 << n)
}

/// Signs indexed by settings tuples `r ∈ {0,1}^N` (party 0 is the top bit).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignVector {
    signs: Vec<i8>,
}

impl SignVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if !signs.len().is_power_of_two() || signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidInput("sign vector needs 2^N entries, each ±1".into()));
        }
        Ok(SignVector { signs })
    }

    /// Bit `r` of `bits` (most significant first over `2^n` positions) set means `−1`.
    pub fn from_bits(n: usize, bits: u64) -> Result<Self> {
        let len = 1usize << n;
        if len > 64 || (len < 64 && bits >> len != 0) {
            return Err(Error::InvalidInput(format!("bit pattern out of range for n = {n}")));
        }
        let signs = (0..len).map(|r| if bits >> (len - 1 - r) & 1 == 1 { -1 } else { 1 }).collect();
        Ok(SignVector { signs })
    }

    /// Bit-string form, `0` for `+` and `1` for `-`; e.g. `0001` for `+++-`.
    pub fn to_bit_string(&self) -> String {
        self.signs.iter().map(|&s| if s > 0 { '0' } else { '1' }).collect()
    }

    pub fn n_parties(&self) -> usize {
        self.signs.len().trailing_zeros() as usize
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }
}

impl std::str::FromStr for SignVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let signs = s
            .chars()
            .map(|c| match c {
                '0' | '+' => Ok(1),
                '1' | '-' => Ok(-1),
                other => Err(Error::InvalidInput(format!("bad sign character {other:?}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        SignVector::new(signs)
    }
}

/// Parity transform without prefactor: `out(s) = Σ_r f(r)(−1)^{popcount(r & s)}`.
pub fn parity_transform(f: &[Rational]) -> Vec<Rational> {
    let mut out = f.to_vec();
    let mut h = 1;
    while h < out.len() {
        for block in out.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let sum = &*a + &*b;
                let diff = &*a - &*b;
                *a = sum;
                *b = diff;
            }
        }
        h *= 2;
    }
    out
}

/// Inverse of [`parity_transform`].
pub fn inverse_parity_transform(f: &[Rational]) -> Vec<Rational> {
    let scale = Rational::new(1.into(), (f.len() as i64).into());
    parity_transform(f).into_iter().map(|x| x * &scale).collect()
}

/// Transformed coordinates of a correlation vector.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedCorrelation {
    pub coefficients: Vec<Rational>,
}

impl TransformedCorrelation {
    pub fn of(xi: &[Rational]) -> Self {
        TransformedCorrelation { coefficients: parity_transform(xi) }
    }

    pub fn l1(&self) -> Rational {
        self.coefficients.iter().map(|c| c.abs()).sum()
    }

    pub fn invert(&self) -> Vec<Rational> {
        inverse_parity_transform(&self.coefficients)
    }
}

fn ww_scenario(n: usize) -> Result<Scenario> {
    if n == 0 || n > 20 {
        return Err(Error::InvalidInput(format!("n = {n} out of range")));
    }
    Scenario::new(n, 2, 2)
}

/// Facet associated with a sign vector, normalized.
pub fn ww_inequality(sign_vector: &SignVector, n: usize) -> Result<Inequality> {
    if sign_vector.signs.len() != 1 << n {
        return Err(Error::DimensionMismatch { expected: 1 << n, found: sign_vector.signs.len() });
    }
    let scenario = ww_scenario(n)?;
    let f: Vec<Rational> = sign_vector.signs.iter().map(|&s| int(s as i64)).collect();
    let beta = parity_transform(&f);
    Ok(Inequality::new(scenario, Representation::FullCorrelation, beta, membership_threshold(n))?.normalized())
}

/// All `2^(2^n)` facets, sign vectors in lexicographic order (`+` before `-`).
pub fn ww_enumerate(n: usize, cap: u64) -> Result<impl Iterator<Item = Inequality>> {
    ww_scenario(n)?;
    let count = BigUint::from(2u32).pow(1 << n);
    let total = match count.to_u64() {
        Some(c) if c <= cap => c,
        _ => return Err(Error::CapExceeded { what: "correlation family member", count: count.to_string(), cap }),
    };
    Ok((0..total).map(move |bits| {
        let sv = SignVector::from_bits(n, bits).expect("bits within range");
        ww_inequality(&sv, n).expect("valid sign vector")
    }))
}

/// Single nonlinear test: inside iff `Σ_r |ξ̂(r)| ≤ 2^n`.
pub fn ww_membership(xi: &Behavior) -> Result<(bool, Rational)> {
    let s = xi.scenario;
    if xi.representation != Representation::FullCorrelation || s.n_settings != 2 || s.n_outcomes != 2 {
        return Err(Error::RepresentationMismatch(format!(
            "needs a full-correlation behavior of an (n,2,2) scenario, got {} {}",
            s,
            xi.representation.tag()
        )));
    }
    let l1 = TransformedCorrelation::of(&xi.entries).l1();
    Ok((l1 <= membership_threshold(s.n_parties), l1))
}

/// The sign vector whose facet is tightest at `xi`: `sign(ξ̂(r))`, with `+` at zeros.
pub fn most_violated(xi: &[Rational]) -> Result<SignVector> {
    let t = parity_transform(xi);
    SignVector::new(t.iter().map(|c| if c.is_negative() { -1 } else { 1 }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{classical_bound, is_facet};
    use crate::rational::ratio;
    use crate::scenario::{enumerate_vertices, DEFAULT_STRATEGY_CAP};

    fn sv(s: &str) -> SignVector {
        s.parse().unwrap()
    }

    #[test]
    fn transform_is_an_involution_up_to_scale() {
        let x: Vec<Rational> = vec![ratio(1, 3), int(-2), ratio(5, 7), int(0), int(1), ratio(-1, 2), int(3), int(4)];
        assert_eq!(inverse_parity_transform(&parity_transform(&x)), x);
        assert_eq!(parity_transform(&[int(1), int(1), int(1), int(1)]), vec![int(4), int(0), int(0), int(0)]);
    }

    #[test]
    fn two_party_examples() {
        let s = Scenario::new(2, 2, 2).unwrap();
        let e = ww_inequality(&sv("++++"), 2).unwrap();
        assert_eq!(e, Inequality::from_ints(s, Representation::FullCorrelation, &[1, 0, 0, 0], 1).unwrap());
        let chsh = ww_inequality(&sv("+++-"), 2).unwrap();
        assert_eq!(chsh, Inequality::from_ints(s, Representation::FullCorrelation, &[1, 1, 1, -1], 2).unwrap());
        assert_eq!(classical_bound(&chsh.coefficients, &s, Representation::FullCorrelation, DEFAULT_STRATEGY_CAP).unwrap(), int(2));
    }

    #[test]
    fn square_case() {
        let s = Scenario::new(1, 2, 2).unwrap();
        let mut all: Vec<Inequality> = ww_enumerate(1, DEFAULT_WW_CAP).unwrap().collect();
        all.sort();
        let expected: Vec<Inequality> = [([-1, 0], 1), ([0, -1], 1), ([0, 1], 1), ([1, 0], 1)]
            .iter()
            .map(|(c, b)| Inequality::from_ints(s, Representation::FullCorrelation, c, *b).unwrap())
            .collect();
        assert_eq!(all, expected);
    }

    #[test]
    fn counts_and_distinctness() {
        for (n, count) in [(1, 4usize), (2, 16), (3, 256)] {
            let mut all: Vec<Inequality> = ww_enumerate(n, DEFAULT_WW_CAP).unwrap().collect();
            assert_eq!(all.len(), count);
            all.sort();
            all.dedup();
            assert_eq!(all.len(), count);
        }
        assert!(matches!(ww_enumerate(5, DEFAULT_WW_CAP), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn every_inequality_is_a_facet_with_the_threshold_bound() {
        for n in 1..=3 {
            let s = Scenario::new(n, 2, 2).unwrap();
            let v = enumerate_vertices(&s, Representation::FullCorrelation, DEFAULT_STRATEGY_CAP).unwrap();
            for bits in 0..(1u64 << (1 << n)) {
                let sv = SignVector::from_bits(n, bits).unwrap();
                let f: Vec<Rational> = sv.signs().iter().map(|&x| int(x as i64)).collect();
                let beta = parity_transform(&f);
                // The bound of every unnormalized facet is the fixed threshold.
                let b = classical_bound(&beta, &s, Representation::FullCorrelation, DEFAULT_STRATEGY_CAP).unwrap();
                assert_eq!(b, membership_threshold(n));
                let ineq = ww_inequality(&sv, n).unwrap();
                assert_eq!(is_facet(&ineq, &v).unwrap(), crate::geometry::FacetStatus::Facet);
            }
        }
    }

    #[test]
    fn membership_examples() {
        let s = Scenario::new(2, 2, 2).unwrap();
        let zero = Behavior::new(s, Representation::FullCorrelation, vec![int(0); 4]).unwrap();
        assert_eq!(ww_membership(&zero).unwrap(), (true, int(0)));
        for v in enumerate_vertices(&s, Representation::FullCorrelation, DEFAULT_STRATEGY_CAP).unwrap() {
            assert_eq!(ww_membership(&v).unwrap(), (true, int(4)));
        }
        let q = ratio(985, 1393);
        let x = Behavior::new(s, Representation::FullCorrelation, vec![q.clone(), q.clone(), q.clone(), -q]).unwrap();
        assert!(!ww_membership(&x).unwrap().0);
        assert_eq!(most_violated(&x.entries).unwrap(), sv("+++-"));
        let prob = Behavior::new(s, Representation::FullProbability, vec![int(0); 16]).unwrap();
        assert!(ww_membership(&prob).is_err());
    }

    #[test]
    fn sign_vector_parsing() {
        assert_eq!(sv("0001"), sv("+++-"));
        assert_eq!(sv("+++-").to_bit_string(), "0001");
        assert_eq!(sv("+-").n_parties(), 1);
        assert!("++-".parse::<SignVector>().is_err());
        assert!("+x".parse::<SignVector>().is_err());
        assert_eq!(SignVector::from_bits(2, 1).unwrap(), sv("+++-"));
        assert!(SignVector::from_bits(1, 4).is_err());
    }
}
