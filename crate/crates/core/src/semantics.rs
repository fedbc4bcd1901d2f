//! Compositional meaning of derivation trees.
//!
//! A [`SemanticMap`] binds every rule label to a function from the meanings of
//! a node's children to the meaning of the node. Evaluation is post-order, so
//! a tree's value depends only on its rule and its direct subtrees.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::grammar::{DerivationTree, Grammar};

/// A rule's meaning: children values in, node value out. `Err` carries a
/// domain-level failure message.
pub type Binding<V> = Arc<dyn Fn(Vec<V>) -> Result<V, String> + Send + Sync>;

/// Domain objective over the meaning of a start-sort tree.
pub type Fitness<V> = Arc<dyn Fn(&V) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticError {
    #[error("no binding for rule {label} at {path:?}")]
    MissingBinding { label: String, path: Vec<usize> },
    #[error("rule {label} at {path:?} failed: {message}")]
    Domain {
        label: String,
        path: Vec<usize>,
        message: String,
    },
    #[error("rule {0} is not part of the grammar")]
    UnknownRule(String),
    #[error("rules without a binding: {}", .0.join(", "))]
    Incomplete(Vec<String>),
}

/// A meaning tagged with the sort it was produced for.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticValue<V> {
    pub sort: String,
    pub payload: V,
}

struct BoundRule<V> {
    lhs: String,
    apply: Binding<V>,
}

pub struct SemanticMap<V> {
    bindings: HashMap<String, BoundRule<V>>,
}

impl<V> fmt::Debug for SemanticMap<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut labels: Vec<&String> = self.bindings.keys().collect();
        labels.sort();
        f.debug_struct("SemanticMap")
            .field("labels", &labels)
            .finish()
    }
}

impl<V> SemanticMap<V> {
    pub fn builder(grammar: &Grammar) -> SemanticMapBuilder<'_, V> {
        SemanticMapBuilder {
            grammar,
            bindings: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn binds(&self, label: &str) -> bool {
        self.bindings.contains_key(label)
    }

    /// Evaluates `tree` bottom-up. The result is tagged with the root rule's
    /// left-hand side.
    pub fn evaluate(&self, tree: &DerivationTree) -> Result<SemanticValue<V>, SemanticError> {
        let mut path = Vec::new();
        let (sort, payload) = self.eval_node(tree, &mut path)?;
        Ok(SemanticValue {
            sort: sort.to_string(),
            payload,
        })
    }

    pub fn evaluate_payload(&self, tree: &DerivationTree) -> Result<V, SemanticError> {
        let mut path = Vec::new();
        self.eval_node(tree, &mut path).map(|(_, v)| v)
    }

    fn eval_node(
        &self,
        tree: &DerivationTree,
        path: &mut Vec<usize>,
    ) -> Result<(&str, V), SemanticError> {
        let bound =
            self.bindings
                .get(&tree.label)
                .ok_or_else(|| SemanticError::MissingBinding {
                    label: tree.label.clone(),
                    path: path.clone(),
                })?;
        let mut args = Vec::with_capacity(tree.children.len());
        for (i, child) in tree.children.iter().enumerate() {
            path.push(i);
            args.push(self.eval_node(child, path)?.1);
            path.pop();
        }
        let value = (bound.apply)(args).map_err(|message| SemanticError::Domain {
            label: tree.label.clone(),
            path: path.clone(),
            message,
        })?;
        Ok((&bound.lhs, value))
    }
}

pub struct SemanticMapBuilder<'g, V> {
    grammar: &'g Grammar,
    bindings: HashMap<String, Binding<V>>,
}

impl<V> SemanticMapBuilder<'_, V> {
    pub fn bind(
        mut self,
        label: impl Into<String>,
        f: impl Fn(Vec<V>) -> Result<V, String> + Send + Sync + 'static,
    ) -> Self {
        self.bindings.insert(label.into(), Arc::new(f));
        self
    }

    pub fn bind_shared(mut self, label: impl Into<String>, f: Binding<V>) -> Self {
        self.bindings.insert(label.into(), f);
        self
    }

    /// Binds a terminal-only rule to a fixed value.
    pub fn constant(self, label: impl Into<String>, value: V) -> Self
    where
        V: Clone + Send + Sync + 'static,
    {
        self.bind(label, move |_| Ok(value.clone()))
    }

    /// Finishes the map, requiring exactly one binding per grammar rule.
    pub fn build(self) -> Result<SemanticMap<V>, SemanticError> {
        if let Some(stray) = self
            .bindings
            .keys()
            .find(|l| self.grammar.rule_by_label(l).is_none())
        {
            return Err(SemanticError::UnknownRule(stray.clone()));
        }
        let missing: Vec<String> = self
            .grammar
            .rules()
            .iter()
            .filter(|r| !self.bindings.contains_key(&r.label))
            .map(|r| r.label.clone())
            .collect();
        if !missing.is_empty() {
            return Err(SemanticError::Incomplete(missing));
        }
        let grammar = self.grammar;
        let bindings = self
            .bindings
            .into_iter()
            .map(|(label, apply)| {
                let lhs = grammar
                    .rule_by_label(&label)
                    .expect("checked above")
                    .lhs
                    .clone();
                (label, BoundRule { lhs, apply })
            })
            .collect();
        Ok(SemanticMap { bindings })
    }
}

/// Anything a search heuristic can score. Higher is better.
pub trait Objective {
    fn evaluate(&mut self, tree: &DerivationTree) -> f64;
}

impl<F: FnMut(&DerivationTree) -> f64> Objective for F {
    fn evaluate(&mut self, tree: &DerivationTree) -> f64 {
        self(tree)
    }
}

/// `tree ↦ fitness(evaluate(tree))` with an invocation counter.
///
/// Every call counts, including repeated trees and calls whose evaluation
/// fails; failures score `f64::NEG_INFINITY`.
type Scorer<'a> = Box<dyn Fn(&DerivationTree) -> Result<f64, SemanticError> + 'a>;

pub struct ComposedObjective<'a> {
    score: Scorer<'a>,
    evaluations: usize,
    failures: usize,
}

impl ComposedObjective<'_> {
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub fn failures(&self) -> usize {
        self.failures
    }
}

impl Objective for ComposedObjective<'_> {
    fn evaluate(&mut self, tree: &DerivationTree) -> f64 {
        self.evaluations += 1;
        match (self.score)(tree) {
            Ok(v) if !v.is_nan() => v,
            _ => {
                self.failures += 1;
                f64::NEG_INFINITY
            }
        }
    }
}

pub fn compose_objective<'a, V>(
    semantics: &'a SemanticMap<V>,
    fitness: impl Fn(&V) -> f64 + 'a,
) -> ComposedObjective<'a> {
    ComposedObjective {
        score: Box::new(move |tree| semantics.evaluate_payload(tree).map(|v| fitness(&v))),
        evaluations: 0,
        failures: 0,
    }
}

/// A grammatical optimization instance: design space, meaning and objective.
pub struct Problem<V> {
    pub grammar: Grammar,
    pub semantics: SemanticMap<V>,
    pub fitness: Fitness<V>,
}

impl<V> Problem<V> {
    pub fn new(
        grammar: Grammar,
        semantics: SemanticMap<V>,
        fitness: impl Fn(&V) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Problem {
            grammar,
            semantics,
            fitness: Arc::new(fitness),
        }
    }

    /// A fresh counted objective, one per search run.
    pub fn objective(&self) -> ComposedObjective<'_> {
        let fitness = &self.fitness;
        compose_objective(&self.semantics, move |v| fitness(v))
    }

    pub fn evaluate(&self, tree: &DerivationTree) -> Result<V, SemanticError> {
        self.semantics.evaluate_payload(tree)
    }

    /// Objective value without touching any counter.
    pub fn score(&self, tree: &DerivationTree) -> f64 {
        match self.evaluate(tree) {
            Ok(v) => {
                let f = (self.fitness)(&v);
                if f.is_nan() {
                    f64::NEG_INFINITY
                } else {
                    f
                }
            }
            Err(_) => f64::NEG_INFINITY,
        }
    }
}

/// Type-erased view of a [`Problem`], so runners can hold cases with
/// different value types.
pub trait SearchProblem: Send + Sync {
    fn grammar(&self) -> &Grammar;
    fn objective(&self) -> ComposedObjective<'_>;
    fn score(&self, tree: &DerivationTree) -> f64;
}

impl<V: 'static> SearchProblem for Problem<V>
where
    SemanticMap<V>: Send + Sync,
{
    fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    fn objective(&self) -> ComposedObjective<'_> {
        Problem::objective(self)
    }

    fn score(&self, tree: &DerivationTree) -> f64 {
        Problem::score(self, tree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::samples;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    #[derive(Debug, Clone, PartialEq)]
    enum Val {
        Int(i64),
        Set(BTreeSet<i64>),
    }

    fn subset_problem(target: i64) -> Problem<Val> {
        let g = Grammar::parse(
            "empty. <Set> ::= empty\nadd. <Set> ::= add <Int> <Set>\n15. <Int> ::= 15\n22. <Int> ::= 22\n16. <Int> ::= 16\n",
        )
        .unwrap();
        let m = SemanticMap::builder(&g)
            .bind("empty", |_| Ok(Val::Set(BTreeSet::new())))
            .bind("add", |mut args| match (args.remove(0), args.remove(0)) {
                (Val::Int(x), Val::Set(mut s)) => {
                    s.insert(x);
                    Ok(Val::Set(s))
                }
                other => Err(format!("ill-typed arguments {other:?}")),
            })
            .constant("15", Val::Int(15))
            .constant("22", Val::Int(22))
            .constant("16", Val::Int(16))
            .build()
            .unwrap();
        Problem::new(g, m, move |v| match v {
            Val::Set(s) => {
                let sum: i64 = s.iter().sum();
                if sum == target {
                    2.0
                } else {
                    1.0 / (target - sum).abs() as f64
                }
            }
            Val::Int(_) => f64::NEG_INFINITY,
        })
    }

    fn add(x: &str, rest: DerivationTree) -> DerivationTree {
        DerivationTree::new("add", vec![DerivationTree::leaf(x), rest])
    }

    #[test]
    fn evaluates_subset_semantics() {
        let p = subset_problem(53);
        let empty = DerivationTree::leaf("empty");
        let v = p.semantics.evaluate(&empty).unwrap();
        assert_eq!(v.sort, "Set");
        assert_eq!(v.payload, Val::Set(BTreeSet::new()));
        let two = add("15", add("22", empty.clone()));
        assert_eq!(
            p.evaluate(&two).unwrap(),
            Val::Set(BTreeSet::from([15, 22]))
        );
        let int = p.semantics.evaluate(&DerivationTree::leaf("22")).unwrap();
        assert_eq!(int.sort, "Int");
    }

    #[test]
    fn constant_rule_evaluates_to_its_value() {
        let g = Grammar::parse("x. <s> ::= x").unwrap();
        let m = SemanticMap::builder(&g).constant("x", 42).build().unwrap();
        assert_eq!(m.evaluate_payload(&DerivationTree::leaf("x")).unwrap(), 42);
    }

    #[test]
    fn composed_objective_counts_calls() {
        let p = subset_problem(53);
        let mut obj = p.objective();
        let hit = add("15", add("22", add("16", DerivationTree::leaf("empty"))));
        assert_eq!(obj.evaluate(&hit), 2.0);
        let miss = add("15", DerivationTree::leaf("empty"));
        assert_eq!(obj.evaluate(&miss), 1.0 / 38.0);
        assert_eq!(obj.evaluate(&miss), 1.0 / 38.0);
        assert_eq!(obj.evaluations(), 3);

        let g = Grammar::parse("x. <s> ::= x").unwrap();
        let m = SemanticMap::builder(&g).constant("x", ()).build().unwrap();
        let mut seven = compose_objective(&m, |_| 7.0);
        assert_eq!(seven.evaluate(&DerivationTree::leaf("x")), 7.0);
        assert_eq!(seven.evaluations(), 1);
    }

    #[test]
    fn failures_score_negative_infinity_and_still_count() {
        let g = Grammar::parse("bad. <s> ::= bad").unwrap();
        let m: SemanticMap<i32> = SemanticMap::builder(&g)
            .bind("bad", |_| Err("boom".into()))
            .build()
            .unwrap();
        let mut obj = compose_objective(&m, |v| *v as f64);
        assert_eq!(
            obj.evaluate(&DerivationTree::leaf("bad")),
            f64::NEG_INFINITY
        );
        assert_eq!(
            obj.evaluate(&DerivationTree::leaf("unbound")),
            f64::NEG_INFINITY
        );
        assert_eq!(obj.evaluations(), 2);
        assert_eq!(obj.failures(), 2);
        let err = m.evaluate(&DerivationTree::leaf("bad")).unwrap_err();
        assert!(matches!(err, SemanticError::Domain { ref message, .. } if message == "boom"));
        assert!(matches!(
            m.evaluate(&DerivationTree::leaf("zzz")).unwrap_err(),
            SemanticError::MissingBinding { .. }
        ));
    }

    #[test]
    fn builder_requires_totality() {
        let g = samples::binary_strings();
        let err = SemanticMap::<u8>::builder(&g)
            .constant("e", 0)
            .build()
            .unwrap_err();
        assert_eq!(err, SemanticError::Incomplete(vec!["0".into(), "1".into()]));
        let err = SemanticMap::<u8>::builder(&g)
            .constant("zz", 0)
            .build()
            .unwrap_err();
        assert_eq!(err, SemanticError::UnknownRule("zz".into()));
    }

    fn bits_map() -> (Grammar, SemanticMap<String>) {
        let g = samples::binary_strings();
        let m = SemanticMap::builder(&g)
            .bind("0", |a| Ok(format!("0{}", a[0])))
            .bind("1", |a| Ok(format!("1{}", a[0])))
            .constant("e", String::new())
            .build()
            .unwrap();
        (g, m)
    }

    proptest! {
        #[test]
        fn evaluation_is_compositional(seed in any::<u64>()) {
            let (g, m) = bits_map();
            let tree = g.random_tree("s", 12, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let whole = m.evaluate_payload(&tree).unwrap();
            let expected = match tree.label.as_str() {
                "e" => String::new(),
                d => format!("{d}{}", m.evaluate_payload(&tree.children[0]).unwrap()),
            };
            prop_assert_eq!(&whole, &expected);
            prop_assert_eq!(whole.len() + 1, tree.size());
            prop_assert_eq!(m.evaluate_payload(&tree).unwrap(), whole);
        }
    }
}
