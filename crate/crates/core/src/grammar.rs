//! Labeled BNF grammars and their derivation trees.
//!
//! A grammar is a set of terminals, a pointed set of nonterminals (sorts) and
//! an ordered list of labeled rewrite rules `label. <lhs> ::= rhs`. Candidate
//! solutions are derivation trees, built directly from rule applications
//! rather than recovered by parsing sentences.
//!
//! Tree height is counted in nodes: a leaf has height 1.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default result-count guard for [`Grammar::enumerate_trees`].
pub const DEFAULT_ENUMERATION_LIMIT: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("line {line}: malformed rule: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("grammar has no rules")]
    Empty,
    #[error("duplicate rule label {0}")]
    DuplicateLabel(String),
    #[error("undefined nonterminal {0}")]
    UndefinedNonterminal(String),
    #[error("undeclared terminal {0}")]
    UndeclaredTerminal(String),
    #[error("invalid symbol name {0:?}")]
    InvalidName(String),
    #[error("{0} is declared both as terminal and nonterminal")]
    Overlap(String),
    #[error("start symbol {0} is not a declared nonterminal")]
    UnknownStart(String),
    #[error("unknown sort {0}")]
    UnknownSort(String),
    #[error("sort {0} is unproductive")]
    Unproductive(String),
    #[error("depth cap {cap} is below the minimum depth {min} of sort {sort}")]
    DepthCapTooSmall {
        sort: String,
        cap: usize,
        min: usize,
    },
    #[error("enumeration exceeded the limit of {0} trees")]
    TooManyTrees(usize),
}

/// True when `name` is usable as a symbol or label: non-empty, no whitespace,
/// no angle brackets.
pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name
            .chars()
            .any(|c| c.is_whitespace() || c == '<' || c == '>')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    Terminal(String),
    Nonterminal(String),
}

impl Symbol {
    pub fn terminal(name: impl Into<String>) -> Self {
        Symbol::Terminal(name.into())
    }

    pub fn nonterminal(name: impl Into<String>) -> Self {
        Symbol::Nonterminal(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Symbol::Terminal(n) | Symbol::Nonterminal(n) => n,
        }
    }

    pub fn is_nonterminal(&self) -> bool {
        matches!(self, Symbol::Nonterminal(_))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Terminal(n) => f.write_str(n),
            Symbol::Nonterminal(n) => write!(f, "<{n}>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub label: String,
    pub lhs: String,
    pub rhs: Vec<Symbol>,
}

impl Rule {
    pub fn new(label: impl Into<String>, lhs: impl Into<String>, rhs: Vec<Symbol>) -> Self {
        Rule {
            label: label.into(),
            lhs: lhs.into(),
            rhs,
        }
    }

    /// Nonterminals of the right-hand side, left to right. These are the sorts
    /// of a node's children.
    pub fn nonterminals(&self) -> impl Iterator<Item = &str> {
        self.rhs.iter().filter_map(|s| match s {
            Symbol::Nonterminal(n) => Some(n.as_str()),
            Symbol::Terminal(_) => None,
        })
    }

    pub fn arity(&self) -> usize {
        self.nonterminals().count()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}. <{}> ::=", self.label, self.lhs)?;
        for sym in &self.rhs {
            write!(f, " {sym}")?;
        }
        Ok(())
    }
}

/// A validated labeled-BNF grammar.
///
/// Rule order is significant: genotype decoding and enumeration index rules
/// positionally in declaration order.
#[derive(Debug, Clone)]
pub struct Grammar {
    terminals: BTreeSet<String>,
    nonterminals: BTreeSet<String>,
    start: String,
    rules: Vec<Rule>,
    label_index: HashMap<String, usize>,
    by_lhs: HashMap<String, Vec<usize>>,
    sort_depth: BTreeMap<String, Option<usize>>,
    rule_depth: Vec<Option<usize>>,
}

impl PartialEq for Grammar {
    fn eq(&self, other: &Self) -> bool {
        self.terminals == other.terminals
            && self.nonterminals == other.nonterminals
            && self.start == other.start
            && self.rules == other.rules
    }
}

impl Eq for Grammar {}

impl Grammar {
    /// Builds a grammar from explicit symbol sets. Declared nonterminals
    /// without rules are allowed; they are simply unproductive.
    pub fn new(
        terminals: BTreeSet<String>,
        nonterminals: BTreeSet<String>,
        start: impl Into<String>,
        rules: Vec<Rule>,
    ) -> Result<Self, GrammarError> {
        let start = start.into();
        if rules.is_empty() {
            return Err(GrammarError::Empty);
        }
        for name in terminals.iter().chain(nonterminals.iter()) {
            if !is_valid_name(name) {
                return Err(GrammarError::InvalidName(name.clone()));
            }
        }
        if let Some(both) = terminals.intersection(&nonterminals).next() {
            return Err(GrammarError::Overlap(both.clone()));
        }
        if !nonterminals.contains(&start) {
            return Err(GrammarError::UnknownStart(start));
        }

        let mut label_index = HashMap::with_capacity(rules.len());
        let mut by_lhs: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, rule) in rules.iter().enumerate() {
            if !is_valid_name(&rule.label) {
                return Err(GrammarError::InvalidName(rule.label.clone()));
            }
            if label_index.insert(rule.label.clone(), i).is_some() {
                return Err(GrammarError::DuplicateLabel(rule.label.clone()));
            }
            if !nonterminals.contains(&rule.lhs) {
                return Err(GrammarError::UndefinedNonterminal(rule.lhs.clone()));
            }
            for sym in &rule.rhs {
                match sym {
                    Symbol::Terminal(t) if !terminals.contains(t) => {
                        return Err(GrammarError::UndeclaredTerminal(t.clone()))
                    }
                    Symbol::Nonterminal(n) if !nonterminals.contains(n) => {
                        return Err(GrammarError::UndefinedNonterminal(n.clone()))
                    }
                    _ => {}
                }
            }
            by_lhs.entry(rule.lhs.clone()).or_default().push(i);
        }

        let mut grammar = Grammar {
            terminals,
            nonterminals,
            start,
            rules,
            label_index,
            by_lhs,
            sort_depth: BTreeMap::new(),
            rule_depth: Vec::new(),
        };
        grammar.compute_depths();
        Ok(grammar)
    }

    /// Builds a grammar whose symbol sets are inferred from the rules: every
    /// left-hand side is a nonterminal, every other right-hand name a
    /// terminal, and the first rule's left-hand side is the start symbol.
    pub fn from_rules(rules: Vec<Rule>) -> Result<Self, GrammarError> {
        let start = rules.first().ok_or(GrammarError::Empty)?.lhs.clone();
        let nonterminals: BTreeSet<String> = rules.iter().map(|r| r.lhs.clone()).collect();
        let mut terminals = BTreeSet::new();
        for rule in &rules {
            for sym in &rule.rhs {
                match sym {
                    Symbol::Terminal(t) => {
                        terminals.insert(t.clone());
                    }
                    Symbol::Nonterminal(n) if !nonterminals.contains(n) => {
                        return Err(GrammarError::UndefinedNonterminal(n.clone()))
                    }
                    Symbol::Nonterminal(_) => {}
                }
            }
        }
        Grammar::new(terminals, nonterminals, start, rules)
    }

    /// Parses the textual format, one rule per line:
    ///
    /// ```text
    /// # comment
    /// 0. <s> ::= 0 <s>
    /// e. <s> ::= e
    /// ```
    pub fn parse(text: &str) -> Result<Self, GrammarError> {
        let mut rules = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            rules.push(parse_rule(line, n + 1)?);
        }
        Grammar::from_rules(rules)
    }

    pub fn terminals(&self) -> &BTreeSet<String> {
        &self.terminals
    }

    pub fn nonterminals(&self) -> &BTreeSet<String> {
        &self.nonterminals
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, index: usize) -> &Rule {
        &self.rules[index]
    }

    pub fn rule_index(&self, label: &str) -> Option<usize> {
        self.label_index.get(label).copied()
    }

    pub fn rule_by_label(&self, label: &str) -> Option<&Rule> {
        self.rule_index(label).map(|i| &self.rules[i])
    }

    /// Indices of the rules rewriting `sort`, in declaration order.
    pub fn rules_for(&self, sort: &str) -> &[usize] {
        self.by_lhs.get(sort).map(Vec::as_slice).unwrap_or(&[])
    }

    // Least fixpoint: a rule's depth is 1 + the deepest child sort, a sort's
    // depth the shallowest of its rules. Unproductive entries stay `None`.
    fn compute_depths(&mut self) {
        let mut sort_depth: BTreeMap<String, Option<usize>> = self
            .nonterminals
            .iter()
            .map(|n| (n.clone(), None))
            .collect();
        let mut rule_depth = vec![None; self.rules.len()];
        loop {
            let mut changed = false;
            for (i, rule) in self.rules.iter().enumerate() {
                let mut deepest = 0;
                let mut complete = true;
                for child in rule.nonterminals() {
                    match sort_depth[child] {
                        Some(d) => deepest = deepest.max(d),
                        None => {
                            complete = false;
                            break;
                        }
                    }
                }
                if !complete {
                    continue;
                }
                let depth = deepest + 1;
                if rule_depth[i].is_none_or(|d| depth < d) {
                    rule_depth[i] = Some(depth);
                    changed = true;
                }
                let slot = sort_depth.get_mut(&rule.lhs).expect("lhs is declared");
                if slot.is_none_or(|d| depth < d) {
                    *slot = Some(depth);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.sort_depth = sort_depth;
        self.rule_depth = rule_depth;
    }

    /// Sorts from which some finite derivation tree exists.
    pub fn productive_sorts(&self) -> BTreeSet<String> {
        self.sort_depth
            .iter()
            .filter(|(_, d)| d.is_some())
            .map(|(s, _)| s.clone())
            .collect()
    }

    pub fn is_productive(&self, sort: &str) -> bool {
        self.min_depth(sort).is_some()
    }

    /// Height of the shallowest tree of every sort; `None` means unproductive.
    pub fn min_depths(&self) -> &BTreeMap<String, Option<usize>> {
        &self.sort_depth
    }

    pub fn min_depth(&self, sort: &str) -> Option<usize> {
        self.sort_depth.get(sort).copied().flatten()
    }

    /// Height of the shallowest tree rooted in the given rule.
    pub fn rule_min_depth(&self, index: usize) -> Option<usize> {
        self.rule_depth[index]
    }

    /// Rules of `sort` that can complete a tree of height at most `remaining`.
    ///
    /// When `remaining` equals the sort's minimum depth this is exactly the set
    /// of depth-minimizing rules, which is what keeps construction finite.
    pub fn applicable_rules(&self, sort: &str, remaining: usize) -> Vec<usize> {
        self.rules_for(sort)
            .iter()
            .copied()
            .filter(|&i| self.rule_depth[i].is_some_and(|d| d <= remaining))
            .collect()
    }

    /// Checks that a tree of `sort` with height at most `cap` can be built.
    pub fn check_constructible(&self, sort: &str, cap: usize) -> Result<usize, GrammarError> {
        if !self.nonterminals.contains(sort) {
            return Err(GrammarError::UnknownSort(sort.to_string()));
        }
        let min = self
            .min_depth(sort)
            .ok_or_else(|| GrammarError::Unproductive(sort.to_string()))?;
        if cap < min {
            return Err(GrammarError::DepthCapTooSmall {
                sort: sort.to_string(),
                cap,
                min,
            });
        }
        Ok(min)
    }

    /// The shallowest tree of `sort`, taking the first declared rule among ties.
    pub fn shallowest_tree(&self, sort: &str) -> Option<DerivationTree> {
        let depth = self.min_depth(sort)?;
        let rule = self
            .rules_for(sort)
            .iter()
            .copied()
            .find(|&i| self.rule_depth[i] == Some(depth))?;
        let r = &self.rules[rule];
        let children = r
            .nonterminals()
            .map(|c| self.shallowest_tree(c))
            .collect::<Option<Vec<_>>>()?;
        Some(DerivationTree::new(r.label.clone(), children))
    }

    /// Samples a tree of `sort` with height at most `depth_cap`, choosing
    /// uniformly among the applicable rules at every node.
    pub fn random_tree<R: Rng + ?Sized>(
        &self,
        sort: &str,
        depth_cap: usize,
        rng: &mut R,
    ) -> Result<DerivationTree, GrammarError> {
        self.check_constructible(sort, depth_cap)?;
        Ok(self.random_subtree(sort, depth_cap, rng))
    }

    fn random_subtree<R: Rng + ?Sized>(
        &self,
        sort: &str,
        remaining: usize,
        rng: &mut R,
    ) -> DerivationTree {
        let candidates = self.applicable_rules(sort, remaining);
        let rule = &self.rules[candidates[rng.gen_range(0..candidates.len())]];
        let children = rule
            .nonterminals()
            .map(|c| self.random_subtree(c, remaining - 1, rng))
            .collect();
        DerivationTree::new(rule.label.clone(), children)
    }

    /// All trees of `sort` with height at most `max_depth`, in canonical order:
    /// rules in declaration order, children varying lexicographically with the
    /// first child slowest. Fails once more than `limit` trees would result.
    pub fn enumerate_trees(
        &self,
        sort: &str,
        max_depth: usize,
        limit: usize,
    ) -> Result<Vec<DerivationTree>, GrammarError> {
        if !self.nonterminals.contains(sort) {
            return Err(GrammarError::UnknownSort(sort.to_string()));
        }
        let mut memo = HashMap::new();
        self.enumerate_into(sort, max_depth, limit, &mut memo)
    }

    fn enumerate_into(
        &self,
        sort: &str,
        depth: usize,
        limit: usize,
        memo: &mut HashMap<(String, usize), Vec<DerivationTree>>,
    ) -> Result<Vec<DerivationTree>, GrammarError> {
        if depth == 0 {
            return Ok(Vec::new());
        }
        if let Some(hit) = memo.get(&(sort.to_string(), depth)) {
            return Ok(hit.clone());
        }
        let mut out = Vec::new();
        for &i in self.rules_for(sort) {
            if self.rule_depth[i].is_none_or(|d| d > depth) {
                continue;
            }
            let rule = &self.rules[i];
            let mut child_sets = Vec::new();
            for child in rule.nonterminals() {
                child_sets.push(self.enumerate_into(child, depth - 1, limit, memo)?);
            }
            let count = child_sets
                .iter()
                .try_fold(1usize, |acc, s| acc.checked_mul(s.len()));
            match count {
                Some(c) if out.len() + c <= limit => {}
                _ => return Err(GrammarError::TooManyTrees(limit)),
            }
            let mut combos: Vec<Vec<DerivationTree>> = vec![Vec::new()];
            for set in &child_sets {
                combos = combos
                    .into_iter()
                    .flat_map(|prefix| {
                        set.iter().map(move |t| {
                            let mut next = prefix.clone();
                            next.push(t.clone());
                            next
                        })
                    })
                    .collect();
            }
            out.extend(
                combos
                    .into_iter()
                    .map(|children| DerivationTree::new(rule.label.clone(), children)),
            );
        }
        memo.insert((sort.to_string(), depth), out.clone());
        Ok(out)
    }

    /// Validates `tree` as a derivation tree of the start sort.
    pub fn validate_tree(&self, tree: &DerivationTree) -> TreeReport {
        self.validate_tree_of(&self.start, tree)
    }

    pub fn validate_tree_of(&self, sort: &str, tree: &DerivationTree) -> TreeReport {
        let mut path = Vec::new();
        TreeReport {
            violation: self.check_node(sort, tree, &mut path),
        }
    }

    fn check_node(
        &self,
        sort: &str,
        tree: &DerivationTree,
        path: &mut Vec<usize>,
    ) -> Option<TreeViolation> {
        let violation = |kind| {
            Some(TreeViolation {
                path: path.clone(),
                kind,
            })
        };
        let Some(rule) = self.rule_by_label(&tree.label) else {
            return violation(ViolationKind::UnknownRule(tree.label.clone()));
        };
        if rule.lhs != sort {
            return violation(ViolationKind::SortMismatch {
                label: rule.label.clone(),
                expected: sort.to_string(),
                found: rule.lhs.clone(),
            });
        }
        let arity = rule.arity();
        if arity != tree.children.len() {
            return violation(ViolationKind::ArityMismatch {
                label: rule.label.clone(),
                expected: arity,
                found: tree.children.len(),
            });
        }
        for (i, (child_sort, child)) in rule.nonterminals().zip(&tree.children).enumerate() {
            path.push(i);
            if let Some(v) = self.check_node(child_sort, child, path) {
                return Some(v);
            }
            path.pop();
        }
        None
    }
}

fn parse_rule(line: &str, line_no: usize) -> Result<Rule, GrammarError> {
    let malformed = |reason: &str| GrammarError::Malformed {
        line: line_no,
        reason: reason.to_string(),
    };
    let (head, body) = line
        .split_once("::=")
        .ok_or_else(|| malformed("missing `::=`"))?;
    let head: Vec<&str> = head.split_whitespace().collect();
    let [label, lhs] = head.as_slice() else {
        return Err(malformed("expected `Label. <LHS>` before `::=`"));
    };
    let label = label
        .strip_suffix('.')
        .ok_or_else(|| malformed("label must end with `.`"))?;
    if label.is_empty() {
        return Err(malformed("empty label"));
    }
    let lhs = lhs
        .strip_prefix('<')
        .and_then(|s| s.strip_suffix('>'))
        .ok_or_else(|| malformed("left-hand side must be an angle-bracketed nonterminal"))?;
    if !is_valid_name(label) {
        return Err(GrammarError::InvalidName(label.to_string()));
    }
    if !is_valid_name(lhs) {
        return Err(GrammarError::InvalidName(lhs.to_string()));
    }
    let rhs = body
        .split_whitespace()
        .map(parse_symbol)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Rule::new(label, lhs, rhs))
}

fn parse_symbol(token: &str) -> Result<Symbol, GrammarError> {
    match token.strip_prefix('<').and_then(|s| s.strip_suffix('>')) {
        Some(name) if is_valid_name(name) => Ok(Symbol::nonterminal(name)),
        Some(_) => Err(GrammarError::InvalidName(token.to_string())),
        None if is_valid_name(token) => Ok(Symbol::terminal(token)),
        None => Err(GrammarError::InvalidName(token.to_string())),
    }
}

impl FromStr for Grammar {
    type Err = GrammarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Grammar::parse(s)
    }
}

/// Canonical textual form: one rule per line in declaration order. Parsing
/// it back yields the same grammar whenever the start symbol is the first
/// rule's left-hand side and the symbol sets are exactly those used by rules.
impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in &self.rules {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}

/// A rule application together with one subtree per nonterminal of its
/// right-hand side.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DerivationTree {
    pub label: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<DerivationTree>,
}

impl DerivationTree {
    pub fn new(label: impl Into<String>, children: Vec<DerivationTree>) -> Self {
        DerivationTree {
            label: label.into(),
            children,
        }
    }

    pub fn leaf(label: impl Into<String>) -> Self {
        DerivationTree::new(label, Vec::new())
    }

    pub fn height(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(DerivationTree::height)
            .max()
            .unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(DerivationTree::size)
            .sum::<usize>()
    }

    /// Rule labels in pre-order, one per node.
    pub fn labels(&self) -> Vec<&str> {
        let mut out = Vec::with_capacity(self.size());
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels<'a>(&'a self, out: &mut Vec<&'a str>) {
        out.push(&self.label);
        for child in &self.children {
            child.collect_labels(out);
        }
    }

    /// Multiset of rule labels used by the tree.
    pub fn rules_used(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for label in self.labels() {
            *counts.entry(label.to_string()).or_insert(0) += 1;
        }
        counts
    }
}

/// Renders as `label` for leaves and `label(child, child)` otherwise.
impl fmt::Display for DerivationTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, child) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{child}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    UnknownRule(String),
    ArityMismatch {
        label: String,
        expected: usize,
        found: usize,
    },
    SortMismatch {
        label: String,
        expected: String,
        found: String,
    },
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::UnknownRule(l) => write!(f, "unknown rule {l}"),
            ViolationKind::ArityMismatch {
                label,
                expected,
                found,
            } => {
                write!(
                    f,
                    "arity mismatch at {label}: expected {expected} children, found {found}"
                )
            }
            ViolationKind::SortMismatch {
                label,
                expected,
                found,
            } => {
                write!(
                    f,
                    "sort mismatch at {label}: expected <{expected}>, found <{found}>"
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeViolation {
    /// Child indices from the root down to the offending node.
    pub path: Vec<usize>,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeReport {
    pub violation: Option<TreeViolation>,
}

impl TreeReport {
    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }
}

impl fmt::Display for TreeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.violation {
            None => f.write_str("valid"),
            Some(v) => write!(f, "invalid at {:?}: {}", v.path, v.kind),
        }
    }
}

/// Grammars used throughout the tests and examples.
pub mod samples {
    use super::Grammar;

    pub const BINARY_STRINGS: &str = "0. <s> ::= 0 <s>\n1. <s> ::= 1 <s>\ne. <s> ::= e\n";

    pub fn binary_strings() -> Grammar {
        Grammar::parse(BINARY_STRINGS).expect("valid grammar")
    }

    /// One terminal-only rule per element: trees correspond to elements.
    pub fn finite_set(elements: &[&str]) -> Grammar {
        let text: String = elements
            .iter()
            .map(|e| format!("{e}. <s> ::= {e}\n"))
            .collect();
        Grammar::parse(&text).expect("valid grammar")
    }
}
