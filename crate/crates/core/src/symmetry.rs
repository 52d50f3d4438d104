//! Relabeling symmetries of a Bell scenario and canonical forms of inequalities.
//!
//! A relabeling moves party `i` to position `party_perm[i]`, renames its
//! setting `x` to `setting_perms[i][x]` and, for that setting, renames outcome
//! `a` to `outcome_perms[i][x][a]`. On full-correlation vectors an outcome swap
//! acts as a sign flip of the observable.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{behavior_hull, AffineHull, Inequality};
use crate::rational::Rational;
use crate::scenario::{enumerate_vertices, Behavior, Representation, Scenario, DEFAULT_STRATEGY_CAP};

pub const DEFAULT_GROUP_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relabeling {
    pub party_perm: Vec<usize>,
    pub setting_perms: Vec<Vec<usize>>,
    pub outcome_perms: Vec<Vec<Vec<usize>>>,
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    p.len() == n && p.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// All permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
    }
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `N! · (M!)^N · (K!)^(N·M)`
pub fn group_order(scenario: &Scenario) -> BigUint {
    let n = scenario.n_parties as u32;
    factorial(scenario.n_parties)
        * factorial(scenario.n_settings).pow(n)
        * factorial(scenario.n_outcomes).pow(n * scenario.n_settings as u32)
}

impl Relabeling {
    pub fn identity(scenario: &Scenario) -> Self {
        let (n, m, k) = (scenario.n_parties, scenario.n_settings, scenario.n_outcomes);
        Relabeling {
            party_perm: (0..n).collect(),
            setting_perms: vec![(0..m).collect(); n],
            outcome_perms: vec![vec![(0..k).collect(); m]; n],
        }
    }

    pub fn new(
        scenario: &Scenario,
        party_perm: Vec<usize>,
        setting_perms: Vec<Vec<usize>>,
        outcome_perms: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let (n, m, k) = (scenario.n_parties, scenario.n_settings, scenario.n_outcomes);
        let ok = is_permutation(&party_perm, n)
            && setting_perms.len() == n
            && setting_perms.iter().all(|p| is_permutation(p, m))
            && outcome_perms.len() == n
            && outcome_perms.iter().all(|per| per.len() == m && per.iter().all(|p| is_permutation(p, k)));
        if !ok {
            return Err(Error::InvalidInput(format!("relabeling is not a valid permutation set for {scenario}")));
        }
        Ok(Relabeling { party_perm, setting_perms, outcome_perms })
    }

    /// Swaps the two outcomes of a single observable (a sign flip for K = 2).
    pub fn flip(scenario: &Scenario, party: usize, setting: usize) -> Self {
        let mut g = Self::identity(scenario);
        g.outcome_perms[party][setting].reverse();
        g
    }

    pub fn swap_parties(scenario: &Scenario, a: usize, b: usize) -> Self {
        let mut g = Self::identity(scenario);
        g.party_perm.swap(a, b);
        g
    }

    fn dims(&self) -> (usize, usize, usize) {
        let n = self.party_perm.len();
        let m = self.setting_perms.first().map_or(0, |p| p.len());
        let k = self.outcome_perms.first().and_then(|p| p.first()).map_or(0, |p| p.len());
        (n, m, k)
    }

    fn check_scenario(&self, scenario: &Scenario) -> Result<()> {
        if self.dims() != (scenario.n_parties, scenario.n_settings, scenario.n_outcomes) {
            return Err(Error::RepresentationMismatch(format!("relabeling does not act on {scenario}")));
        }
        Ok(())
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Relabeling) -> Relabeling {
        let (n, m, _) = self.dims();
        let mut party_perm = vec![0; n];
        let mut setting_perms = vec![vec![0; m]; n];
        let mut outcome_perms = other.outcome_perms.clone();
        for i in 0..n {
            let j = other.party_perm[i];
            party_perm[i] = self.party_perm[j];
            for x in 0..m {
                let y = other.setting_perms[i][x];
                setting_perms[i][x] = self.setting_perms[j][y];
                outcome_perms[i][x] = other.outcome_perms[i][x]
                    .iter()
                    .map(|&a| self.outcome_perms[j][y][a])
                    .collect();
            }
        }
        Relabeling { party_perm, setting_perms, outcome_perms }
    }

    pub fn inverse(&self) -> Relabeling {
        let (n, m, _) = self.dims();
        let party_perm = invert(&self.party_perm);
        let mut setting_perms = vec![vec![0; m]; n];
        let mut outcome_perms = self.outcome_perms.clone();
        for i in 0..n {
            let j = self.party_perm[i];
            setting_perms[j] = invert(&self.setting_perms[i]);
            for x in 0..m {
                let y = self.setting_perms[i][x];
                outcome_perms[j][y] = invert(&self.outcome_perms[i][x]);
            }
        }
        Relabeling { party_perm, setting_perms, outcome_perms }
    }

    /// The group element with the given index in mixed radix over
    /// (party perm, setting perms, outcome perms), each in lexicographic order.
    pub fn from_index(scenario: &Scenario, index: u64) -> Result<Relabeling> {
        let order = group_order(scenario);
        if BigUint::from(index) >= order {
            return Err(Error::InvalidInput(format!("group index {index} out of range")));
        }
        Ok(GroupTables::new(scenario).element(index))
    }

    pub fn signed_permutation(&self, scenario: &Scenario, rep: Representation) -> Result<SignedPermutation> {
        self.check_scenario(scenario)?;
        scenario.check_representation(rep)?;
        let n = scenario.n_parties;
        let len = scenario.vector_len(rep);
        let mut target = vec![0; len];
        let mut negate = vec![false; len];
        for s in 0..scenario.settings_tuples() {
            let settings = scenario.settings_tuple(s);
            let mut new_settings = vec![0; n];
            for i in 0..n {
                new_settings[self.party_perm[i]] = self.setting_perms[i][settings[i]];
            }
            let s2 = scenario.settings_index(&new_settings);
            match rep {
                Representation::FullCorrelation => {
                    let flips = (0..n).filter(|&i| self.outcome_perms[i][settings[i]][0] == 1).count();
                    target[s] = s2;
                    negate[s] = flips % 2 == 1;
                }
                Representation::FullProbability => {
                    let block = scenario.outcome_tuples();
                    for o in 0..block {
                        let outcomes = scenario.outcome_tuple(o);
                        let mut new_outcomes = vec![0; n];
                        for i in 0..n {
                            new_outcomes[self.party_perm[i]] = self.outcome_perms[i][settings[i]][outcomes[i]];
                        }
                        target[s * block + o] = s2 * block + scenario.outcome_index(&new_outcomes);
                    }
                }
            }
        }
        Ok(SignedPermutation { target, negate })
    }
}

/// Coordinate action `y[target[i]] = ±x[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedPermutation {
    target: Vec<usize>,
    negate: Vec<bool>,
}

impl SignedPermutation {
    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        let mut y = x.to_vec();
        for (i, v) in x.iter().enumerate() {
            y[self.target[i]] = if self.negate[i] { -v.clone() } else { v.clone() };
        }
        y
    }
}

struct GroupTables {
    n: usize,
    m: usize,
    party: Vec<Vec<usize>>,
    setting: Vec<Vec<usize>>,
    outcome: Vec<Vec<usize>>,
}

impl GroupTables {
    fn new(scenario: &Scenario) -> Self {
        GroupTables {
            n: scenario.n_parties,
            m: scenario.n_settings,
            party: permutations(scenario.n_parties),
            setting: permutations(scenario.n_settings),
            outcome: permutations(scenario.n_outcomes),
        }
    }

    fn element(&self, mut index: u64) -> Relabeling {
        let mut take = |radix: usize| {
            let d = (index % radix as u64) as usize;
            index /= radix as u64;
            d
        };
        let mut outcome_perms = vec![vec![Vec::new(); self.m]; self.n];
        for i in (0..self.n).rev() {
            for x in (0..self.m).rev() {
                outcome_perms[i][x] = self.outcome[take(self.outcome.len())].clone();
            }
        }
        let mut setting_perms = vec![Vec::new(); self.n];
        for i in (0..self.n).rev() {
            setting_perms[i] = self.setting[take(self.setting.len())].clone();
        }
        let party_perm = self.party[take(self.party.len())].clone();
        Relabeling { party_perm, setting_perms, outcome_perms }
    }
}

/// Objects the relabeling group acts on.
pub trait Relabel: Sized {
    fn relabeled(&self, g: &Relabeling) -> Result<Self>;
}

impl Relabel for Behavior {
    fn relabeled(&self, g: &Relabeling) -> Result<Self> {
        let p = g.signed_permutation(&self.scenario, self.representation)?;
        Ok(Behavior { entries: p.apply(&self.entries), ..self.clone() })
    }
}

impl Relabel for Inequality {
    fn relabeled(&self, g: &Relabeling) -> Result<Self> {
        let p = g.signed_permutation(&self.scenario, self.representation)?;
        Ok(Inequality { coefficients: p.apply(&self.coefficients), ..self.clone() })
    }
}

pub fn apply<T: Relabel>(g: &Relabeling, x: &T) -> Result<T> {
    x.relabeled(g)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityClass {
    pub canonical: Inequality,
    pub orbit_size: usize,
    pub members_seen: usize,
}

/// The full relabeling group of one scenario/representation, with the affine
/// hull used to reduce inequalities to a unique representative.
pub struct SymmetryGroup {
    scenario: Scenario,
    rep: Representation,
    order: u64,
    tables: GroupTables,
    hull: AffineHull,
    full_dimensional: bool,
}

impl SymmetryGroup {
    pub fn new(scenario: &Scenario, rep: Representation, group_cap: u64) -> Result<Self> {
        scenario.check_representation(rep)?;
        let order_big = group_order(scenario);
        let order = match order_big.to_u64() {
            Some(o) if o <= group_cap => o,
            _ => return Err(Error::CapExceeded { what: "group order", count: order_big.to_string(), cap: group_cap }),
        };
        let vertices = enumerate_vertices(scenario, rep, DEFAULT_STRATEGY_CAP)?;
        let hull = behavior_hull(&vertices)?;
        let full_dimensional = hull.dim == hull.ambient_len();
        Ok(SymmetryGroup { scenario: *scenario, rep, order, tables: GroupTables::new(scenario), hull, full_dimensional })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn element(&self, index: u64) -> Relabeling {
        self.tables.element(index)
    }

    pub fn hull(&self) -> &AffineHull {
        &self.hull
    }

    /// Normalized representative on the hull chart.
    pub fn representative(&self, ineq: &Inequality) -> Inequality {
        if self.full_dimensional {
            ineq.normalized()
        } else {
            ineq.reduced(&self.hull)
        }
    }

    fn check(&self, ineq: &Inequality) -> Result<()> {
        if ineq.scenario != self.scenario || ineq.representation != self.rep {
            return Err(Error::RepresentationMismatch("inequality belongs to a different scenario".into()));
        }
        Ok(())
    }

    fn for_each_image(&self, ineq: &Inequality, mut f: impl FnMut(Inequality)) -> Result<()> {
        self.check(ineq)?;
        let base = self.representative(ineq);
        for idx in 0..self.order {
            let p = self.element(idx).signed_permutation(&self.scenario, self.rep)?;
            let img = Inequality { coefficients: p.apply(&base.coefficients), ..base.clone() };
            f(self.representative(&img));
        }
        Ok(())
    }

    /// Lexicographically least representative over the orbit.
    pub fn canonical_form(&self, ineq: &Inequality) -> Result<Inequality> {
        let mut best: Option<Inequality> = None;
        self.for_each_image(ineq, |img| {
            if best.as_ref().is_none_or(|b| img < *b) {
                best = Some(img);
            }
        })?;
        Ok(best.expect("group has an identity"))
    }

    /// Distinct representatives in the orbit, sorted.
    pub fn orbit(&self, ineq: &Inequality) -> Result<Vec<Inequality>> {
        let mut seen = std::collections::BTreeSet::new();
        self.for_each_image(ineq, |img| {
            seen.insert(img);
        })?;
        Ok(seen.into_iter().collect())
    }

    /// Groups facets into orbits; classes are ordered by canonical form.
    pub fn classify(&self, facets: &[Inequality]) -> Result<Vec<InequalityClass>> {
        let mut class_of: HashMap<Inequality, usize> = HashMap::new();
        let mut classes: Vec<InequalityClass> = Vec::new();
        for f in facets {
            self.check(f)?;
            let rep = self.representative(f);
            if let Some(&c) = class_of.get(&rep) {
                classes[c].members_seen += 1;
                continue;
            }
            let orbit = self.orbit(&rep)?;
            let c = classes.len();
            classes.push(InequalityClass { canonical: orbit[0].clone(), orbit_size: orbit.len(), members_seen: 1 });
            for member in orbit {
                class_of.insert(member, c);
            }
        }
        let sorted: BTreeMap<Inequality, InequalityClass> =
            classes.into_iter().map(|c| (c.canonical.clone(), c)).collect();
        Ok(sorted.into_values().collect())
    }
}

pub fn canonical_form(ineq: &Inequality, group_cap: u64) -> Result<Inequality> {
    SymmetryGroup::new(&ineq.scenario, ineq.representation, group_cap)?.canonical_form(ineq)
}

pub fn classify(facets: &[Inequality], group_cap: u64) -> Result<Vec<InequalityClass>> {
    let Some(first) = facets.first() else {
        return Ok(Vec::new());
    };
    SymmetryGroup::new(&first.scenario, first.representation, group_cap)?.classify(facets)
}
