//! Search strategies over derivation trees.
//!
//! All three heuristics share the same contract: they draw candidate trees of
//! the grammar's start sort, score each with exactly one objective call, stop
//! when the evaluation budget is spent and return the best tree seen.

mod grant;
mod grevo;
mod random;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::{DerivationTree, Grammar, GrammarError};
use crate::semantics::Objective;

pub use grant::{ant_construct, grant, grant_observed, GrAntParams, PheromoneTable};
pub use grevo::{genotype_to_tree, grevo, Genotype, GrEvoParams};
pub use random::random_search;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("evaluation budget must be at least 1")]
    ZeroBudget,
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("cannot select from an empty candidate set")]
    EmptyCandidates,
    #[error("population size {0} is below 2")]
    PopulationTooSmall(usize),
    #[error("population {population} x generations {generations} exceeds the budget of {budget} evaluations")]
    BudgetExceeded {
        population: usize,
        generations: usize,
        budget: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown heuristic {0:?} (expected grant, grevo or random)")]
    UnknownHeuristic(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Heuristic {
    #[serde(rename = "grant")]
    GrAnt,
    #[serde(rename = "grevo")]
    GrEvo,
    Random,
}

impl Heuristic {
    pub const ALL: [Heuristic; 3] = [Heuristic::GrAnt, Heuristic::GrEvo, Heuristic::Random];

    pub fn name(self) -> &'static str {
        match self {
            Heuristic::GrAnt => "grant",
            Heuristic::GrEvo => "grevo",
            Heuristic::Random => "random",
        }
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Heuristic {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "grant" => Ok(Heuristic::GrAnt),
            "grevo" => Ok(Heuristic::GrEvo),
            "random" | "rand" => Ok(Heuristic::Random),
            _ => Err(SearchError::UnknownHeuristic(s.to_string())),
        }
    }
}

/// Hard cap on objective invocations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    max_evaluations: usize,
    used: usize,
}

impl SearchBudget {
    pub fn new(max_evaluations: usize) -> Result<Self, SearchError> {
        if max_evaluations == 0 {
            return Err(SearchError::ZeroBudget);
        }
        Ok(SearchBudget {
            max_evaluations,
            used: 0,
        })
    }

    pub fn max_evaluations(&self) -> usize {
        self.max_evaluations
    }

    pub fn used(&self) -> usize {
        self.used
    }

    pub fn remaining(&self) -> usize {
        self.max_evaluations - self.used
    }

    pub fn is_exhausted(&self) -> bool {
        self.used == self.max_evaluations
    }

    fn consume(&mut self) {
        assert!(!self.is_exhausted(), "evaluation budget overrun");
        self.used += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_tree: DerivationTree,
    pub best_fitness: f64,
    pub evaluations_used: usize,
    /// `(evaluation index, best-so-far fitness)`, one entry per improvement.
    pub history: Vec<(usize, f64)>,
}

/// Depth cap used when none is configured: `max(min_depth(start) + 16, 32)`.
pub fn default_depth_cap(grammar: &Grammar) -> usize {
    grammar
        .min_depth(grammar.start())
        .map_or(32, |d| (d + 16).max(32))
}

pub(crate) fn resolve_depth_cap(
    grammar: &Grammar,
    cap: Option<usize>,
) -> Result<usize, SearchError> {
    let cap = cap.unwrap_or_else(|| default_depth_cap(grammar));
    grammar.check_constructible(grammar.start(), cap)?;
    Ok(cap)
}

/// Scores candidates against the budget and remembers the best one.
pub(crate) struct Tracker<'o> {
    objective: &'o mut dyn Objective,
    budget: SearchBudget,
    best: Option<(DerivationTree, f64)>,
    history: Vec<(usize, f64)>,
}

impl<'o> Tracker<'o> {
    pub(crate) fn new(objective: &'o mut dyn Objective, budget: SearchBudget) -> Self {
        Tracker {
            objective,
            budget,
            best: None,
            history: Vec::new(),
        }
    }

    pub(crate) fn exhausted(&self) -> bool {
        self.budget.is_exhausted()
    }

    pub(crate) fn remaining(&self) -> usize {
        self.budget.remaining()
    }

    pub(crate) fn evaluate(&mut self, tree: &DerivationTree) -> f64 {
        self.budget.consume();
        let raw = self.objective.evaluate(tree);
        let fitness = if raw.is_nan() { f64::NEG_INFINITY } else { raw };
        let improved = self.best.as_ref().is_none_or(|(_, best)| fitness > *best);
        if improved {
            self.best = Some((tree.clone(), fitness));
            self.history.push((self.budget.used(), fitness));
        }
        fitness
    }

    pub(crate) fn finish(self) -> SearchResult {
        let (best_tree, best_fitness) = self.best.expect("at least one evaluation");
        SearchResult {
            best_tree,
            best_fitness,
            evaluations_used: self.budget.used(),
            history: self.history,
        }
    }
}

/// A heuristic together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum HeuristicConfig {
    GrAnt(GrAntParams),
    GrEvo(GrEvoParams),
    Random { depth_cap: Option<usize> },
}

impl HeuristicConfig {
    /// Default parameters for `heuristic` under `budget` evaluations.
    pub fn defaults(heuristic: Heuristic, budget: usize) -> Self {
        match heuristic {
            Heuristic::GrAnt => HeuristicConfig::GrAnt(GrAntParams::default()),
            Heuristic::GrEvo => HeuristicConfig::GrEvo(GrEvoParams::for_budget(budget)),
            Heuristic::Random => HeuristicConfig::Random { depth_cap: None },
        }
    }

    pub fn heuristic(&self) -> Heuristic {
        match self {
            HeuristicConfig::GrAnt(_) => Heuristic::GrAnt,
            HeuristicConfig::GrEvo(_) => Heuristic::GrEvo,
            HeuristicConfig::Random { .. } => Heuristic::Random,
        }
    }

    pub fn with_depth_cap(mut self, cap: Option<usize>) -> Self {
        match &mut self {
            HeuristicConfig::GrAnt(p) => p.depth_cap = cap,
            HeuristicConfig::GrEvo(p) => p.depth_cap = cap,
            HeuristicConfig::Random { depth_cap } => *depth_cap = cap,
        }
        self
    }
}

/// Runs the configured heuristic on the grammar's start sort.
pub fn search<R: Rng + ?Sized>(
    config: &HeuristicConfig,
    grammar: &Grammar,
    objective: &mut dyn Objective,
    max_evaluations: usize,
    rng: &mut R,
) -> Result<SearchResult, SearchError> {
    let budget = SearchBudget::new(max_evaluations)?;
    match config {
        HeuristicConfig::GrAnt(p) => grant(grammar, objective, budget, p, rng),
        HeuristicConfig::GrEvo(p) => grevo(grammar, objective, budget, p, rng),
        HeuristicConfig::Random { depth_cap } => {
            random_search(grammar, objective, budget, *depth_cap, rng)
        }
    }
}
