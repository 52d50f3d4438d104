//! Bell scenarios `(N, M, K)`, deterministic strategies and their images as
//! polytope vertices.
//!
//! Index conventions used throughout the crate:
//! * settings tuple `(s_0, …, s_{N-1})` ↦ `Σ s_i M^{N-1-i}` (party 0 most significant),
//! * outcome tuples likewise in base `K`,
//! * a full-probability entry lives at `settings_index · K^N + outcome_index`,
//! * for `K = 2`, outcome 0 is the value `+1` and outcome 1 is `-1`.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::rational::{int, Rational};

pub const DEFAULT_STRATEGY_CAP: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Scenario {
    pub n_parties: usize,
    pub n_settings: usize,
    pub n_outcomes: usize,
}

impl Scenario {
    pub fn new(n_parties: usize, n_settings: usize, n_outcomes: usize) -> Result<Self> {
        if n_parties < 1 || n_settings < 1 || n_outcomes < 2 {
            return Err(Error::InvalidScenario(format!(
                "({n_parties},{n_settings},{n_outcomes}) needs N >= 1, M >= 1, K >= 2"
            )));
        }
        let s = Scenario { n_parties, n_settings, n_outcomes };
        // Keep the index arithmetic in `usize`.
        let width = BigUint::from(n_settings * n_outcomes).pow(n_parties as u32);
        if width.to_usize().is_none() || width > BigUint::from(1u64 << 40) {
            return Err(Error::InvalidScenario(format!("({n_parties},{n_settings},{n_outcomes}) is too large to index")));
        }
        Ok(s)
    }

    /// `K^(N·M)`, exactly.
    pub fn strategy_count(&self) -> BigUint {
        BigUint::from(self.n_outcomes).pow((self.n_parties * self.n_settings) as u32)
    }

    pub fn observable_count(&self) -> usize {
        self.n_parties * self.n_settings
    }

    /// `M^N`
    pub fn settings_tuples(&self) -> usize {
        self.n_settings.pow(self.n_parties as u32)
    }

    /// `K^N`
    pub fn outcome_tuples(&self) -> usize {
        self.n_outcomes.pow(self.n_parties as u32)
    }

    pub fn vector_len(&self, rep: Representation) -> usize {
        match rep {
            Representation::FullProbability => self.settings_tuples() * self.outcome_tuples(),
            Representation::FullCorrelation => self.settings_tuples(),
        }
    }

    pub fn check_representation(&self, rep: Representation) -> Result<()> {
        if rep == Representation::FullCorrelation && self.n_outcomes != 2 {
            return Err(Error::RepresentationMismatch(format!(
                "full-correlation representation needs K = 2, scenario has K = {}",
                self.n_outcomes
            )));
        }
        Ok(())
    }

    /// Digits of a settings-tuple index, party 0 first.
    pub fn settings_tuple(&self, index: usize) -> Vec<usize> {
        digits(index, self.n_settings, self.n_parties)
    }

    pub fn settings_index(&self, tuple: &[usize]) -> usize {
        undigits(tuple, self.n_settings)
    }

    pub fn outcome_tuple(&self, index: usize) -> Vec<usize> {
        digits(index, self.n_outcomes, self.n_parties)
    }

    pub fn outcome_index(&self, tuple: &[usize]) -> usize {
        undigits(tuple, self.n_outcomes)
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.n_parties, self.n_settings, self.n_outcomes)
    }
}

pub(crate) fn digits(mut index: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    out
}

pub(crate) fn undigits(tuple: &[usize], base: usize) -> usize {
    tuple.iter().fold(0, |acc, &d| acc * base + d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Representation {
    #[serde(rename = "prob")]
    FullProbability,
    #[serde(rename = "corr")]
    FullCorrelation,
}

impl Representation {
    pub fn tag(&self) -> &'static str {
        match self {
            Representation::FullProbability => "prob",
            Representation::FullCorrelation => "corr",
        }
    }
}

impl std::str::FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prob" => Ok(Representation::FullProbability),
            "corr" => Ok(Representation::FullCorrelation),
            other => Err(Error::InvalidInput(format!("unknown representation {other:?} (expected corr|prob)"))),
        }
    }
}

/// One outcome per observable; entry `party · M + setting`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeterministicStrategy {
    assignment: Vec<usize>,
}

impl DeterministicStrategy {
    pub fn new(scenario: &Scenario, assignment: Vec<usize>) -> Result<Self> {
        check_len(scenario.observable_count(), assignment.len())?;
        if let Some(bad) = assignment.iter().find(|&&o| o >= scenario.n_outcomes) {
            return Err(Error::InvalidInput(format!("outcome {bad} out of range for K = {}", scenario.n_outcomes)));
        }
        Ok(DeterministicStrategy { assignment })
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn outcome(&self, scenario: &Scenario, party: usize, setting: usize) -> usize {
        self.assignment[party * scenario.n_settings + setting]
    }
}

/// Lexicographic stream over all `K^(N·M)` strategies.
pub struct Strategies {
    scenario: Scenario,
    next: u64,
    count: u64,
}

impl Iterator for Strategies {
    type Item = DeterministicStrategy;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.count {
            return None;
        }
        let assignment = digits(self.next as usize, self.scenario.n_outcomes, self.scenario.observable_count());
        self.next += 1;
        Some(DeterministicStrategy { assignment })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.count - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Strategies {}

pub fn enumerate_strategies(scenario: &Scenario, cap: u64) -> Result<Strategies> {
    let count = scenario.strategy_count();
    match count.to_u64() {
        Some(c) if c <= cap => Ok(Strategies { scenario: *scenario, next: 0, count: c }),
        _ => Err(Error::CapExceeded { what: "strategy", count: count.to_string(), cap }),
    }
}

/// A point of the polytope's ambient space; entries are exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Behavior {
    pub scenario: Scenario,
    pub representation: Representation,
    pub entries: Vec<Rational>,
}

impl Behavior {
    pub fn new(scenario: Scenario, representation: Representation, entries: Vec<Rational>) -> Result<Self> {
        scenario.check_representation(representation)?;
        check_len(scenario.vector_len(representation), entries.len())?;
        Ok(Behavior { scenario, representation, entries })
    }

    /// Checks the physical constraints: box bounds and, for probabilities,
    /// normalization of each settings block.
    pub fn validate(&self) -> Result<()> {
        let one = Rational::one();
        match self.representation {
            Representation::FullProbability => {
                let block = self.scenario.outcome_tuples();
                for (s, chunk) in self.entries.chunks(block).enumerate() {
                    if chunk.iter().any(|p| *p < Rational::zero() || *p > one) {
                        return Err(Error::InvalidInput(format!("probability outside [0,1] in settings block {s}")));
                    }
                    let total: Rational = chunk.iter().sum();
                    if total != one {
                        return Err(Error::InvalidInput(format!("settings block {s} sums to {total}")));
                    }
                }
            }
            Representation::FullCorrelation => {
                if self.entries.iter().any(|e| *e < -one.clone() || *e > one) {
                    return Err(Error::InvalidInput("correlation outside [-1,1]".into()));
                }
            }
        }
        Ok(())
    }
}

pub fn strategy_to_behavior(
    scenario: &Scenario,
    strategy: &DeterministicStrategy,
    rep: Representation,
) -> Result<Behavior> {
    scenario.check_representation(rep)?;
    check_len(scenario.observable_count(), strategy.assignment.len())?;
    let n = scenario.n_parties;
    let mut entries = vec![Rational::zero(); scenario.vector_len(rep)];
    for s in 0..scenario.settings_tuples() {
        let settings = scenario.settings_tuple(s);
        let outcomes: Vec<usize> = (0..n).map(|i| strategy.outcome(scenario, i, settings[i])).collect();
        match rep {
            Representation::FullProbability => {
                entries[s * scenario.outcome_tuples() + scenario.outcome_index(&outcomes)] = Rational::one();
            }
            Representation::FullCorrelation => {
                let minus = outcomes.iter().filter(|&&o| o == 1).count();
                entries[s] = int(if minus % 2 == 0 { 1 } else { -1 });
            }
        }
    }
    Ok(Behavior { scenario: *scenario, representation: rep, entries })
}

/// Distinct strategy images, sorted lexicographically by entries.
pub fn enumerate_vertices(scenario: &Scenario, rep: Representation, cap: u64) -> Result<Vec<Behavior>> {
    scenario.check_representation(rep)?;
    let mut seen = BTreeSet::new();
    for strategy in enumerate_strategies(scenario, cap)? {
        seen.insert(strategy_to_behavior(scenario, &strategy, rep)?.entries);
    }
    Ok(seen
        .into_iter()
        .map(|entries| Behavior { scenario: *scenario, representation: rep, entries })
        .collect())
}
