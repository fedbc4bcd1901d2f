//! Uniform random search baseline.

use rand::Rng;

use super::{resolve_depth_cap, SearchBudget, SearchError, SearchResult, Tracker};
use crate::grammar::Grammar;
use crate::semantics::Objective;

/// Draws `budget` independent random trees of the start sort and keeps the best.
pub fn random_search<R: Rng + ?Sized>(
    grammar: &Grammar,
    objective: &mut dyn Objective,
    budget: SearchBudget,
    depth_cap: Option<usize>,
    rng: &mut R,
) -> Result<SearchResult, SearchError> {
    let cap = resolve_depth_cap(grammar, depth_cap)?;
    let mut tracker = Tracker::new(objective, budget);
    while !tracker.exhausted() {
        let tree = grammar.random_tree(grammar.start(), cap, rng)?;
        tracker.evaluate(&tree);
    }
    Ok(tracker.finish())
}
