//! GrAnt: a MIN-MAX ant system over rewrite rules.
//!
//! Each rule carries a pheromone level. One ant per iteration builds a tree
//! depth-first, picking rules with probability proportional to pheromone.
//! After scoring, every level evaporates, the rules of the iteration tree are
//! reinforced by the fitness, and the ceiling rises to any fitness above it.
//! The floor is hard; the ceiling is soft and never falls.

use rand::Rng;

use super::{resolve_depth_cap, SearchBudget, SearchError, SearchResult, Tracker};
use crate::grammar::{DerivationTree, Grammar};
use crate::semantics::Objective;

#[derive(Debug, Clone, PartialEq)]
pub struct GrAntParams {
    pub tau_min: f64,
    /// Initial level of every rule and initial ceiling.
    pub tau_init: f64,
    /// Evaporation rate in `[0, 1)`.
    pub rho: f64,
    pub depth_cap: Option<usize>,
}

impl Default for GrAntParams {
    fn default() -> Self {
        GrAntParams {
            tau_min: 0.01,
            tau_init: 1.0,
            rho: 0.1,
            depth_cap: None,
        }
    }
}

impl GrAntParams {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |msg: &str| Err(SearchError::InvalidParameter(msg.to_string()));
        if !(self.tau_min.is_finite() && self.tau_min > 0.0) {
            return bad("tau_min must be positive");
        }
        if !(self.tau_init.is_finite() && self.tau_init >= self.tau_min) {
            return bad("tau_init must be at least tau_min");
        }
        if !(0.0..1.0).contains(&self.rho) {
            return bad("rho must lie in [0, 1)");
        }
        Ok(())
    }
}

/// Pheromone level per rule, indexed like [`Grammar::rules`].
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneTable {
    levels: Vec<f64>,
    tau_min: f64,
    tau_max: f64,
}

impl PheromoneTable {
    pub fn new(grammar: &Grammar, tau_min: f64, tau_init: f64) -> Self {
        PheromoneTable {
            levels: vec![tau_init; grammar.rules().len()],
            tau_min,
            tau_max: tau_init,
        }
    }

    pub fn tau_min(&self) -> f64 {
        self.tau_min
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn level(&self, rule: usize) -> f64 {
        self.levels[rule]
    }

    pub fn level_of(&self, grammar: &Grammar, label: &str) -> Option<f64> {
        grammar.rule_index(label).map(|i| self.levels[i])
    }

    pub fn set_level(&mut self, rule: usize, level: f64) {
        self.levels[rule] = level.clamp(self.tau_min, self.tau_max);
    }

    /// True when every level lies within `[tau_min, tau_max]`.
    pub fn within_bounds(&self) -> bool {
        self.levels
            .iter()
            .all(|&l| self.tau_min <= l && l <= self.tau_max)
    }

    /// Roulette-wheel choice among `candidates`, proportional to level.
    pub fn select<R: Rng + ?Sized>(
        &self,
        candidates: &[usize],
        rng: &mut R,
    ) -> Result<usize, SearchError> {
        match candidates {
            [] => Err(SearchError::EmptyCandidates),
            [only] => Ok(*only),
            _ => {
                let total: f64 = candidates.iter().map(|&c| self.levels[c]).sum();
                let mut ticket = rng.gen::<f64>() * total;
                for &c in candidates {
                    ticket -= self.levels[c];
                    if ticket < 0.0 {
                        return Ok(c);
                    }
                }
                // rounding can leave a sliver at the end of the wheel
                Ok(*candidates.last().expect("non-empty"))
            }
        }
    }

    /// One iteration's update: evaporate everything (floored at `tau_min`),
    /// deposit `max(fitness, 0)` on every distinct rule of the tree, raise the ceiling
    /// to the fitness if it was exceeded, then clamp to the ceiling.
    pub fn update(&mut self, grammar: &Grammar, tree: &DerivationTree, fitness: f64, rho: f64) {
        for level in &mut self.levels {
            *level = (*level * (1.0 - rho)).max(self.tau_min);
        }
        let deposit = if fitness.is_finite() {
            fitness.max(0.0)
        } else {
            0.0
        };
        if deposit > 0.0 {
            for label in tree.rules_used().keys() {
                if let Some(i) = grammar.rule_index(label) {
                    self.levels[i] += deposit;
                }
            }
        }
        if fitness.is_finite() && fitness > self.tau_max {
            self.tau_max = fitness;
        }
        let (lo, hi) = (self.tau_min, self.tau_max);
        for level in &mut self.levels {
            *level = level.clamp(lo, hi);
        }
    }
}

/// Builds one tree of `sort` depth-first, choosing each rule by pheromone
/// among the rules that still fit under the depth cap.
pub fn ant_construct<R: Rng + ?Sized>(
    grammar: &Grammar,
    sort: &str,
    table: &PheromoneTable,
    depth_cap: usize,
    rng: &mut R,
) -> Result<DerivationTree, SearchError> {
    grammar.check_constructible(sort, depth_cap)?;
    build(grammar, sort, table, depth_cap, rng)
}

fn build<R: Rng + ?Sized>(
    grammar: &Grammar,
    sort: &str,
    table: &PheromoneTable,
    remaining: usize,
    rng: &mut R,
) -> Result<DerivationTree, SearchError> {
    let candidates = grammar.applicable_rules(sort, remaining);
    let rule = grammar.rule(table.select(&candidates, rng)?);
    let children = rule
        .nonterminals()
        .map(|child| build(grammar, child, table, remaining - 1, rng))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DerivationTree::new(rule.label.clone(), children))
}

pub fn grant<R: Rng + ?Sized>(
    grammar: &Grammar,
    objective: &mut dyn Objective,
    budget: SearchBudget,
    params: &GrAntParams,
    rng: &mut R,
) -> Result<SearchResult, SearchError> {
    grant_observed(grammar, objective, budget, params, rng, |_| {})
}

/// [`grant`] with a hook that sees the pheromone table after every iteration.
pub fn grant_observed<R: Rng + ?Sized>(
    grammar: &Grammar,
    objective: &mut dyn Objective,
    budget: SearchBudget,
    params: &GrAntParams,
    rng: &mut R,
    mut observe: impl FnMut(&PheromoneTable),
) -> Result<SearchResult, SearchError> {
    params.validate()?;
    let cap = resolve_depth_cap(grammar, params.depth_cap)?;
    let mut table = PheromoneTable::new(grammar, params.tau_min, params.tau_init);
    let mut tracker = Tracker::new(objective, budget);
    while !tracker.exhausted() {
        let tree = build(grammar, grammar.start(), &table, cap, rng)?;
        let fitness = tracker.evaluate(&tree);
        table.update(grammar, &tree, fitness, params.rho);
        observe(&table);
    }
    Ok(tracker.finish())
}
