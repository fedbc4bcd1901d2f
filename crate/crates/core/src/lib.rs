//! Grammatical optimization: search over derivation trees of labeled BNF
//! grammars with ant-colony, evolutionary and random heuristics.

pub mod benchmarks;
pub mod grammar;
pub mod harness;
pub mod heuristics;
pub mod registry;
pub mod semantics;

pub use grammar::{DerivationTree, Grammar, GrammarError, Rule, Symbol};
pub use heuristics::{search, Heuristic, HeuristicConfig, SearchBudget, SearchError, SearchResult};
pub use registry::{create, greedy_instantiate, ComponentModule, RegistryError};
pub use semantics::{
    compose_objective, Objective, Problem, SearchProblem, SemanticError, SemanticMap, SemanticValue,
};
