//! Exact convex geometry of vertex-described polytopes: affine hulls, facet
//! enumeration, facet tests and LP membership with separating certificates.

mod dd;
mod hull;
pub mod lp;

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use dd::DdProgress;
pub use hull::{affine_hull, AffineHull};

use crate::error::{check_len, Error, Result};
use crate::rational::{dot, primitive_scale, serde_rational, serde_rational_vec, Rational};
use crate::scenario::{enumerate_strategies, strategy_to_behavior, Behavior, Representation, Scenario};

/// Linear inequality `coefficients · x ≤ bound` on a scenario's behaviors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Inequality {
    pub scenario: Scenario,
    pub representation: Representation,
    #[serde(with = "serde_rational")]
    pub bound: Rational,
    #[serde(with = "serde_rational_vec")]
    pub coefficients: Vec<Rational>,
}

impl Inequality {
    pub fn new(
        scenario: Scenario,
        representation: Representation,
        coefficients: Vec<Rational>,
        bound: Rational,
    ) -> Result<Self> {
        scenario.check_representation(representation)?;
        check_len(scenario.vector_len(representation), coefficients.len())?;
        Ok(Inequality { scenario, representation, bound, coefficients })
    }

    pub fn from_ints(
        scenario: Scenario,
        representation: Representation,
        coefficients: &[i64],
        bound: i64,
    ) -> Result<Self> {
        let c = coefficients.iter().map(|&x| crate::rational::int(x)).collect();
        Self::new(scenario, representation, c, crate::rational::int(bound))
    }

    pub fn value(&self, x: &[Rational]) -> Rational {
        dot(&self.coefficients, x)
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        self.value(x) <= self.bound
    }

    /// Positive rescaling to primitive integers (coefficients and bound share gcd 1).
    pub fn normalized(&self) -> Inequality {
        let mut all = self.coefficients.clone();
        all.push(self.bound.clone());
        let s = primitive_scale(&all);
        Inequality {
            scenario: self.scenario,
            representation: self.representation,
            bound: &self.bound * &s,
            coefficients: self.coefficients.iter().map(|c| c * &s).collect(),
        }
    }

    /// Normalized representative modulo the hull's affine equalities: the
    /// coefficients are supported on the hull's chart coordinates.
    pub fn reduced(&self, hull: &AffineHull) -> Inequality {
        let (coefficients, shift) = hull.reduce_functional(&self.coefficients);
        Inequality {
            scenario: self.scenario,
            representation: self.representation,
            bound: &self.bound - shift,
            coefficients,
        }
        .normalized()
    }
}

/// Canonical order: coefficients lexicographically, then bound.
impl Ord for Inequality {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coefficients
            .cmp(&other.coefficients)
            .then_with(|| self.bound.cmp(&other.bound))
            .then_with(|| self.scenario.cmp(&other.scenario))
            .then_with(|| self.representation.cmp(&other.representation))
    }
}

impl PartialOrd for Inequality {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_vertices: usize,
    pub max_dim: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_vertices: 256, max_dim: 30 }
    }
}

#[derive(Debug, Clone)]
pub struct PolytopeDescription {
    pub vertices: Vec<Behavior>,
    pub affine_dim: usize,
    pub facets: Vec<Inequality>,
}

impl PolytopeDescription {
    pub fn from_vertices(vertices: Vec<Behavior>, limits: Limits) -> Result<Self> {
        let hull = behavior_hull(&vertices)?;
        let facets = enumerate_facets(&vertices, limits)?;
        Ok(PolytopeDescription { vertices, affine_dim: hull.dim, facets })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FacetStatus {
    Facet,
    ValidNotFacet,
    Invalid,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MembershipCertificate {
    /// Convex weights, one per vertex, reproducing the point.
    Inside { weights: Vec<Rational> },
    /// Inequality valid on every vertex and violated by the point.
    Outside { separator: Inequality },
}

impl MembershipCertificate {
    pub fn is_inside(&self) -> bool {
        matches!(self, MembershipCertificate::Inside { .. })
    }
}

fn check_vertices(vertices: &[Behavior]) -> Result<(Scenario, Representation, usize)> {
    let first = vertices
        .first()
        .ok_or_else(|| Error::InvalidInput("empty vertex list".into()))?;
    let len = first.entries.len();
    for v in vertices {
        if v.scenario != first.scenario || v.representation != first.representation {
            return Err(Error::RepresentationMismatch("vertices from different scenarios".into()));
        }
        check_len(len, v.entries.len())?;
    }
    Ok((first.scenario, first.representation, len))
}

fn check_compatible(ineq: &Inequality, vertices: &[Behavior]) -> Result<()> {
    let (scenario, rep, len) = check_vertices(vertices)?;
    check_len(len, ineq.coefficients.len())?;
    if ineq.scenario != scenario || ineq.representation != rep {
        return Err(Error::RepresentationMismatch(format!(
            "inequality is for {} {}, vertices for {} {}",
            ineq.scenario,
            ineq.representation.tag(),
            scenario,
            rep.tag()
        )));
    }
    Ok(())
}

pub fn behavior_hull(vertices: &[Behavior]) -> Result<AffineHull> {
    check_vertices(vertices)?;
    let pts: Vec<Vec<Rational>> = vertices.iter().map(|v| v.entries.clone()).collect();
    affine_hull(&pts)
}

/// All facets of `conv(vertices)` relative to its affine hull, normalized,
/// reduced to the hull chart, and sorted.
pub fn enumerate_facets(vertices: &[Behavior], limits: Limits) -> Result<Vec<Inequality>> {
    enumerate_facets_with_progress(vertices, limits, &mut |_| {})
}

/// [`enumerate_facets`] with a callback invoked after each vertex insertion.
pub fn enumerate_facets_with_progress(
    vertices: &[Behavior],
    limits: Limits,
    progress: &mut dyn FnMut(DdProgress),
) -> Result<Vec<Inequality>> {
    let (scenario, rep, _) = check_vertices(vertices)?;
    if vertices.len() > limits.max_vertices {
        return Err(Error::LimitExceeded { what: "vertex count", value: vertices.len(), limit: limits.max_vertices });
    }
    let hull = behavior_hull(vertices)?;
    if hull.dim > limits.max_dim {
        return Err(Error::LimitExceeded { what: "affine dimension", value: hull.dim, limit: limits.max_dim });
    }
    let points: Vec<&[Rational]> = vertices.iter().map(|v| v.entries.as_slice()).collect();
    let mut facets: Vec<Inequality> = facets_in_chart(&points, &hull, progress)?
        .into_iter()
        .map(|(coefficients, bound)| Inequality { scenario, representation: rep, bound, coefficients }.normalized())
        .collect();
    facets.sort();
    facets.dedup();
    Ok(facets)
}

/// Facets as `(coefficients, bound)` pairs supported on the chart coordinates.
pub(crate) fn facets_in_chart(
    points: &[&[Rational]],
    hull: &AffineHull,
    progress: &mut dyn FnMut(DdProgress),
) -> Result<Vec<(Vec<Rational>, Rational)>> {
    if hull.dim == 0 {
        return Ok(Vec::new());
    }
    // Valid inequalities a·x ≤ b correspond to w = (b, −a) with (1, x)·w ≥ 0.
    let rows: Vec<Vec<Rational>> = points
        .iter()
        .map(|p| {
            let mut r = vec![Rational::one()];
            r.extend(hull.project(p));
            r
        })
        .collect();
    let rays = dd::extreme_rays_with_progress(&rows, progress)?;
    let len = hull.ambient_len();
    Ok(rays
        .into_iter()
        .map(|w| {
            let mut coefficients = vec![Rational::zero(); len];
            for (k, &p) in hull.pivots.iter().enumerate() {
                coefficients[p] = Rational::from_integer(-w[k + 1].clone());
            }
            (coefficients, Rational::from_integer(w[0].clone()))
        })
        .collect())
}

pub fn is_valid(ineq: &Inequality, vertices: &[Behavior]) -> Result<bool> {
    check_compatible(ineq, vertices)?;
    Ok(vertices.iter().all(|v| ineq.is_satisfied_by(&v.entries)))
}

/// First vertex violating the inequality, if any.
pub fn violating_vertex<'a>(ineq: &Inequality, vertices: &'a [Behavior]) -> Result<Option<&'a Behavior>> {
    check_compatible(ineq, vertices)?;
    Ok(vertices.iter().find(|v| !ineq.is_satisfied_by(&v.entries)))
}

pub fn is_facet(ineq: &Inequality, vertices: &[Behavior]) -> Result<FacetStatus> {
    check_compatible(ineq, vertices)?;
    let hull = behavior_hull(vertices)?;
    is_facet_with_hull(ineq, vertices, &hull)
}

pub(crate) fn is_facet_with_hull(ineq: &Inequality, vertices: &[Behavior], hull: &AffineHull) -> Result<FacetStatus> {
    let mut tight = Vec::new();
    for v in vertices {
        match ineq.value(&v.entries).cmp(&ineq.bound) {
            Ordering::Greater => return Ok(FacetStatus::Invalid),
            Ordering::Equal => tight.push(v.entries.clone()),
            Ordering::Less => {}
        }
    }
    if tight.is_empty() || hull.dim == 0 {
        return Ok(FacetStatus::ValidNotFacet);
    }
    let tight_dim = affine_hull(&tight)?.dim;
    Ok(if tight_dim + 1 == hull.dim { FacetStatus::Facet } else { FacetStatus::ValidNotFacet })
}

/// Exact LP membership of `point` in `conv(vertices)`.
pub fn membership(point: &Behavior, vertices: &[Behavior]) -> Result<MembershipCertificate> {
    let (scenario, rep, len) = check_vertices(vertices)?;
    check_len(len, point.entries.len())?;
    if point.scenario != scenario || point.representation != rep {
        return Err(Error::RepresentationMismatch("point and vertices differ in scenario".into()));
    }
    let points: Vec<&[Rational]> = vertices.iter().map(|v| v.entries.as_slice()).collect();
    match membership_raw(&point.entries, &points)? {
        RawMembership::Inside(weights) => Ok(MembershipCertificate::Inside { weights }),
        RawMembership::Outside(coefficients, bound) => Ok(MembershipCertificate::Outside {
            separator: Inequality { scenario, representation: rep, bound, coefficients }.normalized(),
        }),
    }
}

pub(crate) enum RawMembership {
    Inside(Vec<Rational>),
    Outside(Vec<Rational>, Rational),
}

pub(crate) fn membership_raw(x: &[Rational], vertices: &[&[Rational]]) -> Result<RawMembership> {
    let len = x.len();
    // Rows: one per coordinate, plus Σλ = 1.
    let mut a: Vec<Vec<Rational>> = (0..len).map(|j| vertices.iter().map(|v| v[j].clone()).collect()).collect();
    a.push(vec![Rational::one(); vertices.len()]);
    let mut c = x.to_vec();
    c.push(Rational::one());

    match lp::feasibility(&a, &c) {
        lp::Feasibility::Feasible(weights) => {
            let mut combo = vec![Rational::zero(); len];
            for (w, v) in weights.iter().zip(vertices) {
                if w.is_zero() {
                    continue;
                }
                for (cj, vj) in combo.iter_mut().zip(v.iter()) {
                    *cj += w * vj;
                }
            }
            let total: Rational = weights.iter().sum();
            if combo != x || !total.is_one() || weights.iter().any(|w| w.is_negative()) {
                return Err(Error::Invariant("convex weights do not reproduce the point".into()));
            }
            Ok(RawMembership::Inside(weights))
        }
        lp::Feasibility::Infeasible(y) => {
            // y = (a, a0): a·v + a0 ≤ 0 on vertices, a·x + a0 > 0.
            let coefficients = y[..len].to_vec();
            let bound = -y[len].clone();
            let margin = dot(&coefficients, x) - &bound;
            let valid = vertices.iter().all(|v| dot(&coefficients, v) <= bound);
            if !valid || !margin.is_positive() {
                return Err(Error::Invariant("Farkas certificate does not separate".into()));
            }
            Ok(RawMembership::Outside(coefficients, bound))
        }
    }
}

/// Maximum of `coefficients · v` over all deterministic strategies.
pub fn classical_bound(
    coefficients: &[Rational],
    scenario: &Scenario,
    rep: Representation,
    cap: u64,
) -> Result<Rational> {
    scenario.check_representation(rep)?;
    check_len(scenario.vector_len(rep), coefficients.len())?;
    let mut best: Option<Rational> = None;
    for st in enumerate_strategies(scenario, cap)? {
        let v = strategy_to_behavior(scenario, &st, rep)?;
        let val = dot(coefficients, &v.entries);
        if best.as_ref().is_none_or(|b| val > *b) {
            best = Some(val);
        }
    }
    Ok(best.expect("at least one strategy"))
}

/// Inequality with the tight classical bound for the given coefficients.
pub fn tight_inequality(
    coefficients: Vec<Rational>,
    scenario: &Scenario,
    rep: Representation,
    cap: u64,
) -> Result<Inequality> {
    let bound = classical_bound(&coefficients, scenario, rep, cap)?;
    Inequality::new(*scenario, rep, coefficients, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::scenario::{enumerate_vertices, DEFAULT_STRATEGY_CAP};

    fn corr222() -> (Scenario, Vec<Behavior>) {
        let s = Scenario::new(2, 2, 2).unwrap();
        let v = enumerate_vertices(&s, Representation::FullCorrelation, DEFAULT_STRATEGY_CAP).unwrap();
        (s, v)
    }

    fn corr(s: Scenario, c: &[i64], b: i64) -> Inequality {
        Inequality::from_ints(s, Representation::FullCorrelation, c, b).unwrap()
    }

    #[test]
    fn normalization() {
        let s = Scenario::new(1, 2, 2).unwrap();
        let f = Inequality::new(s, Representation::FullCorrelation, vec![ratio(1, 2), ratio(-3, 2)], ratio(3, 4)).unwrap();
        let n = f.normalized();
        assert_eq!(n.coefficients, vec![int(2), int(-6)]);
        assert_eq!(n.bound, int(3));
        assert_eq!(n.normalized(), n);
        // Negative bound keeps its direction.
        let g = corr(s, &[-2, 0], -4).normalized();
        assert_eq!((g.coefficients, g.bound), (vec![int(-1), int(0)], int(-2)));
    }

    #[test]
    fn affine_dims() {
        let (s, v) = corr222();
        assert_eq!(behavior_hull(&v).unwrap().dim, 4);
        let p = enumerate_vertices(&s, Representation::FullProbability, DEFAULT_STRATEGY_CAP).unwrap();
        assert_eq!(behavior_hull(&p).unwrap().dim, 8);
        assert_eq!(behavior_hull(&v[..1]).unwrap().dim, 0);
    }

    #[test]
    fn square_facets() {
        let s = Scenario::new(1, 2, 2).unwrap();
        let v = enumerate_vertices(&s, Representation::FullCorrelation, DEFAULT_STRATEGY_CAP).unwrap();
        let f = enumerate_facets(&v, Limits::default()).unwrap();
        let expected = vec![corr(s, &[-1, 0], 1), corr(s, &[0, -1], 1), corr(s, &[0, 1], 1), corr(s, &[1, 0], 1)];
        assert_eq!(f, expected);
    }

    #[test]
    fn chsh_validity_and_facets() {
        let (s, v) = corr222();
        let chsh = corr(s, &[1, 1, 1, -1], 2);
        assert!(is_valid(&chsh, &v).unwrap());
        assert!(!is_valid(&corr(s, &[1, 1, 1, -1], 1), &v).unwrap());
        assert!(is_valid(&corr(s, &[0, 0, 0, 0], 0), &v).unwrap());
        assert_eq!(is_facet(&chsh, &v).unwrap(), FacetStatus::Facet);
        assert_eq!(is_facet(&corr(s, &[1, 0, 0, 0], 1), &v).unwrap(), FacetStatus::Facet);
        assert_eq!(is_facet(&corr(s, &[1, 1, 0, 0], 2), &v).unwrap(), FacetStatus::ValidNotFacet);
        assert_eq!(is_facet(&corr(s, &[1, 1, 1, -1], 3), &v).unwrap(), FacetStatus::ValidNotFacet);
        assert_eq!(is_facet(&corr(s, &[1, 1, 1, -1], 1), &v).unwrap(), FacetStatus::Invalid);
        let witness = violating_vertex(&corr(s, &[1, 1, 1, -1], 1), &v).unwrap().unwrap();
        assert!(corr(s, &[1, 1, 1, -1], 1).value(&witness.entries) > int(1));
    }

    #[test]
    fn mismatched_inequality() {
        let (s, v) = corr222();
        let p = Inequality::from_ints(s, Representation::FullProbability, &[0; 16], 0).unwrap();
        assert!(is_valid(&p, &v).is_err());
        let small = Scenario::new(1, 2, 2).unwrap();
        assert!(is_facet(&corr(small, &[1, 0], 1), &v).is_err());
    }

    #[test]
    fn chsh_classical_bound() {
        let (s, _) = corr222();
        let b = classical_bound(&[int(1), int(1), int(1), int(-1)], &s, Representation::FullCorrelation, DEFAULT_STRATEGY_CAP);
        assert_eq!(b.unwrap(), int(2));
    }

    #[test]
    fn membership_of_vertex_and_origin() {
        let (s, v) = corr222();
        match membership(&v[3], &v).unwrap() {
            MembershipCertificate::Inside { weights } => {
                assert_eq!(weights[3], int(1));
                assert!(weights.iter().enumerate().all(|(i, w)| i == 3 || w.is_zero()));
            }
            other => panic!("{other:?}"),
        }
        let origin = Behavior::new(s, Representation::FullCorrelation, vec![int(0); 4]).unwrap();
        assert!(membership(&origin, &v).unwrap().is_inside());
    }

    #[test]
    fn quantum_chsh_point_is_outside() {
        let (s, v) = corr222();
        let q = ratio(985, 1393);
        let x = Behavior::new(s, Representation::FullCorrelation, vec![q.clone(), q.clone(), q.clone(), -q]).unwrap();
        let MembershipCertificate::Outside { separator } = membership(&x, &v).unwrap() else {
            panic!("expected outside");
        };
        assert!(is_valid(&separator, &v).unwrap());
        assert!(!separator.is_satisfied_by(&x.entries));
    }

    #[test]
    fn facet_counts_for_two_by_two() {
        let (s, v) = corr222();
        let f = enumerate_facets(&v, Limits::default()).unwrap();
        assert_eq!(f.len(), 16);
        assert!(f.contains(&corr(s, &[1, 1, 1, -1], 2)));
        for facet in &f {
            assert_eq!(is_facet(facet, &v).unwrap(), FacetStatus::Facet);
        }
        let p = enumerate_vertices(&s, Representation::FullProbability, DEFAULT_STRATEGY_CAP).unwrap();
        let f = enumerate_facets(&p, Limits::default()).unwrap();
        assert_eq!(f.len(), 24);
        for facet in &f {
            assert_eq!(is_facet(facet, &p).unwrap(), FacetStatus::Facet);
        }
    }

    #[test]
    fn limits_are_enforced() {
        let (_, v) = corr222();
        let tight = Limits { max_vertices: 4, max_dim: 30 };
        assert!(matches!(enumerate_facets(&v, tight), Err(Error::LimitExceeded { .. })));
        let flat = Limits { max_vertices: 256, max_dim: 3 };
        assert!(matches!(enumerate_facets(&v, flat), Err(Error::LimitExceeded { .. })));
    }
}
