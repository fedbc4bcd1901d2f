//! Component registries compiled to grammars.
//!
//! A [`ComponentModule`] lists constructors (factories with typed parameters)
//! and constants. Compiling it yields a grammar whose nonterminals are the
//! component types and whose rules are the constructors and constants, plus
//! the semantics that runs the factories.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grammar::{DerivationTree, Grammar, GrammarError, Rule, Symbol};
use crate::heuristics::{search, Heuristic, HeuristicConfig, SearchError};
use crate::semantics::{Binding, SemanticError, SemanticMap, SemanticValue};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegistryError {
    #[error("no constructors")]
    NoConstructors,
    #[error("duplicate component label {0}")]
    DuplicateLabel(String),
    #[error("{label} depends on {sort}, which nothing provides")]
    UnprovidedSort { label: String, sort: String },
    #[error("target sort {0} cannot be instantiated")]
    UnproductiveTarget(String),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Semantic(#[from] SemanticError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

pub struct ConstructorEntry<V> {
    pub label: String,
    pub result_sort: String,
    pub param_sorts: Vec<String>,
    pub factory: Binding<V>,
}

pub struct ConstantEntry<V> {
    pub label: String,
    pub sort: String,
    pub value: V,
}

enum Entry<V> {
    Constructor(ConstructorEntry<V>),
    Constant(ConstantEntry<V>),
}

impl<V> Entry<V> {
    fn label(&self) -> &str {
        match self {
            Entry::Constructor(c) => &c.label,
            Entry::Constant(c) => &c.label,
        }
    }

    fn sort(&self) -> &str {
        match self {
            Entry::Constructor(c) => &c.result_sort,
            Entry::Constant(c) => &c.sort,
        }
    }
}

/// Declarative registry of factories and constants for one target type.
/// Declaration order is rule order.
pub struct ComponentModule<V> {
    target_sort: String,
    entries: Vec<Entry<V>>,
}

impl<V: Clone + Send + Sync + 'static> ComponentModule<V> {
    pub fn new(target_sort: impl Into<String>) -> Self {
        ComponentModule {
            target_sort: target_sort.into(),
            entries: Vec::new(),
        }
    }

    pub fn constructor<S: Into<String>>(
        mut self,
        label: impl Into<String>,
        result_sort: impl Into<String>,
        param_sorts: impl IntoIterator<Item = S>,
        factory: impl Fn(Vec<V>) -> Result<V, String> + Send + Sync + 'static,
    ) -> Self {
        self.entries.push(Entry::Constructor(ConstructorEntry {
            label: label.into(),
            result_sort: result_sort.into(),
            param_sorts: param_sorts.into_iter().map(Into::into).collect(),
            factory: Arc::new(factory),
        }));
        self
    }

    pub fn constant(mut self, label: impl Into<String>, sort: impl Into<String>, value: V) -> Self {
        self.entries.push(Entry::Constant(ConstantEntry {
            label: label.into(),
            sort: sort.into(),
            value,
        }));
        self
    }

    pub fn target_sort(&self) -> &str {
        &self.target_sort
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn validate(&self) -> Result<(), RegistryError> {
        if self.entries.is_empty() {
            return Err(RegistryError::NoConstructors);
        }
        let mut seen = HashSet::new();
        for e in &self.entries {
            if !seen.insert(e.label()) {
                return Err(RegistryError::DuplicateLabel(e.label().to_string()));
            }
        }
        let provided: HashSet<&str> = self.entries.iter().map(Entry::sort).collect();
        for e in &self.entries {
            if let Entry::Constructor(c) = e {
                if let Some(missing) = c
                    .param_sorts
                    .iter()
                    .find(|s| !provided.contains(s.as_str()))
                {
                    return Err(RegistryError::UnprovidedSort {
                        label: c.label.clone(),
                        sort: missing.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Compiles to `label. <T> ::= label <T1> ... <Tn>` per constructor and
    /// `label. <S> ::= label` per constant, with the target as start sort.
    pub fn compile(&self) -> Result<(Grammar, SemanticMap<V>), RegistryError> {
        self.validate()?;
        let nonterminals: BTreeSet<String> =
            self.entries.iter().map(|e| e.sort().to_string()).collect();
        let terminals: BTreeSet<String> =
            self.entries.iter().map(|e| e.label().to_string()).collect();
        let rules = self
            .entries
            .iter()
            .map(|e| {
                let mut rhs = vec![Symbol::terminal(e.label())];
                if let Entry::Constructor(c) = e {
                    rhs.extend(c.param_sorts.iter().map(Symbol::nonterminal));
                }
                Rule::new(e.label(), e.sort(), rhs)
            })
            .collect();
        let grammar = Grammar::new(terminals, nonterminals, self.target_sort.clone(), rules)?;
        let mut builder = SemanticMap::builder(&grammar);
        for e in &self.entries {
            builder = match e {
                Entry::Constructor(c) => {
                    builder.bind_shared(c.label.clone(), Arc::clone(&c.factory))
                }
                Entry::Constant(c) => builder.constant(c.label.clone(), c.value.clone()),
            };
        }
        let semantics = builder.build()?;
        Ok((grammar, semantics))
    }
}

/// Builds the shallowest tree of `sort` (first-declared rule among ties) and
/// evaluates it. `None` when the sort cannot be satisfied or a factory fails.
pub fn greedy_instantiate<V: Clone + Send + Sync + 'static>(
    module: &ComponentModule<V>,
    sort: &str,
) -> Option<SemanticValue<V>> {
    let (grammar, semantics) = module.compile_for(sort).ok()?;
    let tree = grammar.shallowest_tree(sort)?;
    semantics.evaluate(&tree).ok()
}

impl<V: Clone + Send + Sync + 'static> ComponentModule<V> {
    fn compile_for(&self, sort: &str) -> Result<(Grammar, SemanticMap<V>), RegistryError> {
        if sort == self.target_sort {
            return self.compile();
        }
        let retargeted = ComponentModule {
            target_sort: sort.to_string(),
            entries: self
                .entries
                .iter()
                .map(|e| match e {
                    Entry::Constructor(c) => Entry::Constructor(ConstructorEntry {
                        label: c.label.clone(),
                        result_sort: c.result_sort.clone(),
                        param_sorts: c.param_sorts.clone(),
                        factory: Arc::clone(&c.factory),
                    }),
                    Entry::Constant(c) => Entry::Constant(ConstantEntry {
                        label: c.label.clone(),
                        sort: c.sort.clone(),
                        value: c.value.clone(),
                    }),
                })
                .collect(),
        };
        retargeted.compile()
    }
}

/// Outcome of a heuristic-guided instantiation.
#[derive(Debug, Clone, PartialEq)]
pub struct Creation<V> {
    pub value: SemanticValue<V>,
    pub tree: DerivationTree,
    pub fitness: f64,
    pub evaluations: usize,
}

/// Searches the module's design space for the instance maximizing `fitness`.
pub fn create<V: Clone + Send + Sync + 'static>(
    module: &ComponentModule<V>,
    fitness: impl Fn(&V) -> f64,
    heuristic: Heuristic,
    budget: usize,
    seed: u64,
) -> Result<Creation<V>, RegistryError> {
    create_with(
        module,
        fitness,
        &HeuristicConfig::defaults(heuristic, budget),
        budget,
        seed,
    )
}

pub fn create_with<V: Clone + Send + Sync + 'static>(
    module: &ComponentModule<V>,
    fitness: impl Fn(&V) -> f64,
    config: &HeuristicConfig,
    budget: usize,
    seed: u64,
) -> Result<Creation<V>, RegistryError> {
    let (grammar, semantics) = module.compile()?;
    if !grammar.is_productive(grammar.start()) {
        return Err(RegistryError::UnproductiveTarget(
            module.target_sort.clone(),
        ));
    }
    let mut objective = crate::semantics::compose_objective(&semantics, fitness);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let result = search(config, &grammar, &mut objective, budget, &mut rng)?;
    let value = semantics.evaluate(&result.best_tree)?;
    Ok(Creation {
        value,
        tree: result.best_tree,
        fitness: result.best_fitness,
        evaluations: objective.evaluations(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[derive(Debug, Clone, PartialEq)]
    enum Val {
        Int(i64),
        Set(Vec<i64>),
    }

    fn subset_module(weights: &[i64]) -> ComponentModule<Val> {
        let mut m = ComponentModule::new("Set")
            .constructor("empty", "Set", Vec::<String>::new(), |_| {
                Ok(Val::Set(Vec::new()))
            })
            .constructor("add", "Set", ["Int", "Set"], |args| match args.as_slice() {
                [Val::Int(x), Val::Set(s)] => {
                    let mut s = s.clone();
                    if !s.contains(x) {
                        s.push(*x);
                    }
                    Ok(Val::Set(s))
                }
                _ => Err("ill-typed".into()),
            });
        for &w in weights {
            m = m.constant(w.to_string(), "Int", Val::Int(w));
        }
        m
    }

    fn sum_fitness(target: i64) -> impl Fn(&Val) -> f64 {
        move |v| match v {
            Val::Set(s) => {
                let d = (target - s.iter().sum::<i64>()).abs();
                if d == 0 {
                    2.0
                } else {
                    1.0 / d as f64
                }
            }
            Val::Int(_) => f64::NEG_INFINITY,
        }
    }

    #[test]
    fn constant_becomes_terminal_rule() {
        let m = ComponentModule::new("Int").constant("15", "Int", 15i64);
        let (g, s) = m.compile().unwrap();
        assert_eq!(g.rules()[0].to_string(), "15. <Int> ::= 15");
        assert_eq!(s.evaluate_payload(&DerivationTree::leaf("15")).unwrap(), 15);
    }

    #[test]
    fn subset_module_compiles_to_the_expected_grammar() {
        let (g, _) = subset_module(&[15, 22]).compile().unwrap();
        let text = g.to_string();
        assert!(text.contains("add. <Set> ::= add <Int> <Set>"), "{text}");
        assert!(text.contains("empty. <Set> ::= empty"));
        assert_eq!(g.start(), "Set");
    }

    #[test]
    fn empty_module_is_rejected() {
        let m: ComponentModule<Val> = ComponentModule::new("Set");
        assert_eq!(m.compile().unwrap_err().to_string(), "no constructors");
    }

    #[test]
    fn invariant_violations() {
        let dup = subset_module(&[1]).constant("1", "Int", Val::Int(1));
        assert_eq!(
            dup.compile().unwrap_err(),
            RegistryError::DuplicateLabel("1".into())
        );
        let orphan = ComponentModule::new("T").constructor("mk", "T", ["U"], |_| Ok(0i64));
        assert!(matches!(
            orphan.compile(),
            Err(RegistryError::UnprovidedSort { .. })
        ));
    }

    #[test]
    fn greedy_picks_the_shallowest_instance() {
        let m = subset_module(&[15, 22]);
        assert_eq!(
            greedy_instantiate(&m, "Set").unwrap().payload,
            Val::Set(vec![])
        );
        assert_eq!(greedy_instantiate(&m, "Int").unwrap().payload, Val::Int(15));
        assert!(greedy_instantiate(&m, "Nope").is_none());
    }

    #[test]
    fn self_dependent_constructor_is_absent() {
        let m = ComponentModule::new("T").constructor("loop", "T", ["T"], |mut a| Ok(a.remove(0)));
        assert!(greedy_instantiate(&m, "T").is_none());
        assert!(matches!(
            create(&m, |_: &i64| 0.0, Heuristic::Random, 10, 0),
            Err(RegistryError::UnproductiveTarget(_))
        ));
    }

    #[test]
    fn single_constant_module() {
        let m = ComponentModule::new("Int").constant("7", "Int", 7i64);
        assert_eq!(greedy_instantiate(&m, "Int").unwrap().payload, 7);
    }

    #[test]
    fn create_solves_a_small_subset_instance() {
        let m = subset_module(&[15, 22, 14, 26, 32, 9, 16, 8]);
        let c = create(&m, sum_fitness(53), Heuristic::GrAnt, 1000, 3).unwrap();
        assert!(c.evaluations <= 1000);
        assert_eq!(sum_fitness(53)(&c.value.payload), c.fitness);
    }

    #[test]
    fn create_budget_one() {
        let m = subset_module(&[1, 2]);
        for h in Heuristic::ALL {
            if h == Heuristic::GrEvo {
                continue;
            }
            let c = create(&m, sum_fitness(3), h, 1, 9).unwrap();
            assert_eq!(c.evaluations, 1);
        }
    }

    #[test]
    fn create_is_deterministic() {
        let m = subset_module(&[15, 22, 14, 26]);
        for h in Heuristic::ALL {
            let a = create(&m, sum_fitness(40), h, 200, 11).unwrap();
            let b = create(&m, sum_fitness(40), h, 200, 11).unwrap();
            assert_eq!(a, b);
        }
    }

    fn random_module() -> impl Strategy<Value = Vec<(usize, Vec<usize>)>> {
        // (result sort, parameter sorts) over sorts S0..S3
        prop::collection::vec((0usize..4, prop::collection::vec(0usize..4, 0..3)), 1..8)
    }

    proptest! {
        #[test]
        fn greedy_agrees_with_productivity(spec in random_module()) {
            let provided: HashSet<usize> = spec.iter().map(|(r, _)| *r).collect();
            let mut m = ComponentModule::new(format!("S{}", spec[0].0));
            for (i, (result, params)) in spec.iter().enumerate() {
                let params: Vec<String> = params.iter().filter(|p| provided.contains(p)).map(|p| format!("S{p}")).collect();
                m = m.constructor(format!("c{i}"), format!("S{result}"), params, |a: Vec<i64>| Ok(a.iter().sum::<i64>() + 1));
            }
            let (g, _) = m.compile().unwrap();
            for sort in g.nonterminals().clone() {
                prop_assert_eq!(greedy_instantiate(&m, &sort).is_some(), g.is_productive(&sort));
            }
        }

        #[test]
        fn created_tree_witnesses_the_value(seed in any::<u64>()) {
            let m = subset_module(&[3, 5, 7, 11]);
            let c = create(&m, sum_fitness(15), Heuristic::GrAnt, 50, seed).unwrap();
            let (_, s) = m.compile().unwrap();
            prop_assert_eq!(s.evaluate(&c.tree).unwrap(), c.value);
        }
    }
}
