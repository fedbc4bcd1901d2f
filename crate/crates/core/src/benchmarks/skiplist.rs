//! Skiplists with a configurable promotion-probability sequence.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::BenchmarkError;
use crate::registry::ComponentModule;
use crate::semantics::Problem;

pub const LOAD_INSERTS: usize = 1000;
pub const LOAD_LOOKUPS: usize = 100;
pub const VALUE_RANGE: u64 = 1_000_000;
const PROMOTION_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

/// `P_k`: promotion to level `k` happens with probability `1 / P_k`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbabilitySequence {
    /// `a^k`, `a > 1`.
    Geometric(f64),
    /// `1 + k*a`, `a > 0`.
    Arithmetic(f64),
    Sum(Box<ProbabilitySequence>, Box<ProbabilitySequence>),
}

impl ProbabilitySequence {
    pub fn geometric(a: f64) -> Result<Self, BenchmarkError> {
        if a > 1.0 && a.is_finite() {
            Ok(ProbabilitySequence::Geometric(a))
        } else {
            Err(BenchmarkError::InvalidSequence(format!(
                "geometric needs a > 1, got {a}"
            )))
        }
    }

    pub fn arithmetic(a: f64) -> Result<Self, BenchmarkError> {
        if a > 0.0 && a.is_finite() {
            Ok(ProbabilitySequence::Arithmetic(a))
        } else {
            Err(BenchmarkError::InvalidSequence(format!(
                "arithmetic needs a > 0, got {a}"
            )))
        }
    }

    pub fn sum(left: ProbabilitySequence, right: ProbabilitySequence) -> Self {
        ProbabilitySequence::Sum(Box::new(left), Box::new(right))
    }

    pub fn term(&self, k: usize) -> f64 {
        match self {
            ProbabilitySequence::Geometric(a) => a.powi(k as i32),
            ProbabilitySequence::Arithmetic(a) => 1.0 + k as f64 * a,
            ProbabilitySequence::Sum(l, r) => l.term(k) + r.term(k),
        }
    }
}

impl fmt::Display for ProbabilitySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbabilitySequence::Geometric(a) => write!(f, "geom({a})"),
            ProbabilitySequence::Arithmetic(a) => write!(f, "arit({a})"),
            ProbabilitySequence::Sum(l, r) => write!(f, "sum({l}, {r})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkiplistConfig {
    pub max_height: usize,
    pub sequence: ProbabilitySequence,
}

impl SkiplistConfig {
    pub fn reference() -> Self {
        SkiplistConfig {
            max_height: 4,
            sequence: ProbabilitySequence::Geometric(2.0),
        }
    }

    pub fn validate(&self) -> Result<(), BenchmarkError> {
        if self.max_height == 0 {
            return Err(BenchmarkError::InvalidSequence(
                "max height must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

struct Node {
    key: u64,
    next: Vec<Option<usize>>,
}

/// Ordered set of keys counting every key comparison.
///
/// Levels run `0..max_height`; every node sits on level 0 and is promoted to
/// level `k` (while `k < max_height`) whenever a fresh uniform draw falls
/// below `1 / P_k`.
pub struct SkipList {
    config: SkiplistConfig,
    head: Vec<Option<usize>>,
    nodes: Vec<Node>,
    rng: ChaCha8Rng,
    comparisons: u64,
}

impl SkipList {
    pub fn new(config: SkiplistConfig, promotion_seed: u64) -> Result<Self, BenchmarkError> {
        config.validate()?;
        Ok(SkipList {
            head: vec![None; config.max_height],
            config,
            nodes: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(promotion_seed),
            comparisons: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn comparisons(&self) -> u64 {
        self.comparisons
    }

    fn forward(&self, from: Option<usize>, level: usize) -> Option<usize> {
        match from {
            None => self.head[level],
            Some(n) => self.nodes[n].next[level],
        }
    }

    /// Rightmost predecessor of `key` on each level, plus whether the key is present.
    fn locate(&mut self, key: u64) -> (Vec<Option<usize>>, bool) {
        let mut preds = vec![None; self.config.max_height];
        let mut at = None;
        for level in (0..self.config.max_height).rev() {
            while let Some(n) = self.forward(at, level) {
                self.comparisons += 1;
                if self.nodes[n].key < key {
                    at = Some(n);
                } else {
                    break;
                }
            }
            preds[level] = at;
        }
        let found = match self.forward(at, 0) {
            Some(n) => {
                self.comparisons += 1;
                self.nodes[n].key == key
            }
            None => false,
        };
        (preds, found)
    }

    pub fn contains(&mut self, key: u64) -> bool {
        self.locate(key).1
    }

    /// Inserts `key`; false when it was already present.
    pub fn insert(&mut self, key: u64) -> bool {
        let (preds, found) = self.locate(key);
        if found {
            return false;
        }
        let mut height = 1;
        while height < self.config.max_height
            && self.rng.gen::<f64>() < 1.0 / self.config.sequence.term(height)
        {
            height += 1;
        }
        let id = self.nodes.len();
        let next = (0..height)
            .map(|level| self.forward(preds[level], level))
            .collect();
        self.nodes.push(Node { key, next });
        for (level, pred) in preds.iter().enumerate().take(height) {
            match pred {
                None => self.head[level] = Some(id),
                Some(p) => self.nodes[*p].next[level] = Some(id),
            }
        }
        true
    }

    /// Keys on `level` in link order.
    pub fn level_keys(&self, level: usize) -> Vec<u64> {
        let mut out = Vec::new();
        let mut at = self.head[level];
        while let Some(n) = at {
            out.push(self.nodes[n].key);
            at = self.nodes[n].next[level];
        }
        out
    }

    /// Each level is strictly increasing and contained in the level below.
    pub fn is_well_formed(&self) -> bool {
        let mut below: Option<Vec<u64>> = None;
        for level in 0..self.config.max_height {
            let keys = self.level_keys(level);
            if keys.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
            if let Some(lower) = &below {
                if keys.iter().any(|k| lower.binary_search(k).is_err()) {
                    return false;
                }
            }
            below = Some(keys);
        }
        true
    }
}

/// Comparisons spent on `LOAD_INSERTS` inserts and `LOAD_LOOKUPS` lookups of
/// uniform values drawn from `seed`. Promotion draws use a separate stream.
pub fn skiplist_run_load(config: &SkiplistConfig, seed: u64) -> Result<u64, BenchmarkError> {
    let mut values = ChaCha8Rng::seed_from_u64(seed);
    let mut list = SkipList::new(config.clone(), seed ^ PROMOTION_STREAM)?;
    for _ in 0..LOAD_INSERTS {
        list.insert(values.gen_range(0..VALUE_RANGE));
    }
    for _ in 0..LOAD_LOOKUPS {
        list.contains(values.gen_range(0..VALUE_RANGE));
    }
    Ok(list.comparisons())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkiplistPools {
    pub heights: Vec<usize>,
    pub reals: Vec<f64>,
}

impl Default for SkiplistPools {
    fn default() -> Self {
        SkiplistPools {
            heights: vec![1, 2, 4, 6, 8, 10, 12, 16],
            reals: vec![1.25, 1.5, 2.0, 3.0, 4.0, 8.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SkipValue {
    Height(usize),
    Real(f64),
    Sequence(ProbabilitySequence),
    Config(SkiplistConfig),
}

pub fn skiplist_module(pools: &SkiplistPools) -> ComponentModule<SkipValue> {
    let mut m = ComponentModule::new("Skiplist")
        .constructor(
            "skiplist",
            "Skiplist",
            ["Height", "Prob"],
            |args| match args.as_slice() {
                [SkipValue::Height(h), SkipValue::Sequence(p)] => {
                    Ok(SkipValue::Config(SkiplistConfig {
                        max_height: *h,
                        sequence: p.clone(),
                    }))
                }
                _ => Err("skiplist expects a height and a sequence".into()),
            },
        )
        .constructor("geom", "Prob", ["Double"], |args| match args.as_slice() {
            [SkipValue::Real(a)] => ProbabilitySequence::geometric(*a)
                .map(SkipValue::Sequence)
                .map_err(|e| e.to_string()),
            _ => Err("geom expects a real".into()),
        })
        .constructor("arit", "Prob", ["Double"], |args| match args.as_slice() {
            [SkipValue::Real(a)] => ProbabilitySequence::arithmetic(*a)
                .map(SkipValue::Sequence)
                .map_err(|e| e.to_string()),
            _ => Err("arit expects a real".into()),
        })
        .constructor("sum", "Prob", ["Prob", "Prob"], |args| {
            match args.as_slice() {
                [SkipValue::Sequence(l), SkipValue::Sequence(r)] => Ok(SkipValue::Sequence(
                    ProbabilitySequence::sum(l.clone(), r.clone()),
                )),
                _ => Err("sum expects two sequences".into()),
            }
        });
    for &h in &pools.heights {
        m = m.constant(format!("height={h}"), "Height", SkipValue::Height(h));
    }
    for &a in &pools.reals {
        m = m.constant(format!("a={a}"), "Double", SkipValue::Real(a));
    }
    m
}

pub struct SkiplistObjective {
    seed: u64,
    reference: u64,
}

impl SkiplistObjective {
    pub fn new(seed: u64) -> Result<Self, BenchmarkError> {
        Ok(SkiplistObjective {
            seed,
            reference: skiplist_run_load(&SkiplistConfig::reference(), seed)?,
        })
    }

    /// `reference comparisons / comparisons`.
    pub fn fitness(&self, config: &SkiplistConfig) -> f64 {
        match skiplist_run_load(config, self.seed) {
            Ok(0) => f64::INFINITY,
            Ok(n) => self.reference as f64 / n as f64,
            Err(_) => f64::NEG_INFINITY,
        }
    }
}

pub fn skiplist_case(
    seed: u64,
    pools: &SkiplistPools,
) -> Result<Problem<SkipValue>, BenchmarkError> {
    if pools.heights.is_empty() {
        return Err(BenchmarkError::EmptyPool("heights"));
    }
    if pools.reals.is_empty() {
        return Err(BenchmarkError::EmptyPool("reals"));
    }
    let (grammar, semantics) = skiplist_module(pools).compile()?;
    let objective = SkiplistObjective::new(seed)?;
    Ok(Problem::new(grammar, semantics, move |v| match v {
        SkipValue::Config(c) => objective.fitness(c),
        _ => f64::NEG_INFINITY,
    }))
}
