//! Subset sum as set construction.

use std::collections::BTreeMap;
use std::str::FromStr;

use super::BenchmarkError;
use crate::registry::ComponentModule;
use crate::semantics::Problem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSumInstance {
    pub weights: Vec<i64>,
    pub target: i64,
}

impl SubsetSumInstance {
    pub fn new(weights: Vec<i64>, target: i64) -> Result<Self, BenchmarkError> {
        if weights.is_empty() {
            return Err(BenchmarkError::InvalidInstance("no weights".into()));
        }
        Ok(SubsetSumInstance { weights, target })
    }

    /// Burkardt's P01.
    pub fn p01() -> Self {
        SubsetSumInstance {
            weights: vec![15, 22, 14, 26, 32, 9, 16, 8],
            target: 53,
        }
    }

    /// Burkardt's P02.
    pub fn p02() -> Self {
        SubsetSumInstance {
            weights: vec![267, 493, 869, 961, 1000, 1153, 1246, 1598, 1766, 1922],
            target: 5842,
        }
    }

    pub fn bundled(name: &str) -> Option<Self> {
        match name.to_ascii_uppercase().as_str() {
            "P01" => Some(Self::p01()),
            "P02" => Some(Self::p02()),
            _ => None,
        }
    }

    /// Best fitness over all `2^n` subsets.
    pub fn optimum(&self) -> f64 {
        assert!(self.weights.len() < 31, "too many weights to enumerate");
        (0u32..1 << self.weights.len())
            .map(|mask| {
                let sum = self
                    .weights
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, w)| w)
                    .sum();
                subset_fitness(sum, self.target)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// First line holds the target, the rest whitespace-separated weights.
impl FromStr for SubsetSumInstance {
    type Err = BenchmarkError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let target = lines
            .next()
            .ok_or_else(|| BenchmarkError::InvalidInstance("missing target".into()))?
            .trim()
            .parse()
            .map_err(|e| BenchmarkError::InvalidInstance(format!("target: {e}")))?;
        let weights = lines
            .flat_map(str::split_whitespace)
            .map(|w| {
                w.parse()
                    .map_err(|e| BenchmarkError::InvalidInstance(format!("weight {w:?}: {e}")))
            })
            .collect::<Result<Vec<i64>, _>>()?;
        SubsetSumInstance::new(weights, target)
    }
}

pub fn subset_fitness(sum: i64, target: i64) -> f64 {
    if sum == target {
        2.0
    } else {
        1.0 / (target - sum).unsigned_abs() as f64
    }
}

/// Items are keyed by position so equal weights stay distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubsetValue {
    Item { index: usize, weight: i64 },
    Set(BTreeMap<usize, i64>),
}

impl SubsetValue {
    pub fn sum(&self) -> i64 {
        match self {
            SubsetValue::Item { weight, .. } => *weight,
            SubsetValue::Set(items) => items.values().sum(),
        }
    }
}

/// Rule labels of the weight constants; repeats of a weight get a `_2`, `_3`,
/// ... suffix.
pub fn weight_labels(weights: &[i64]) -> Vec<String> {
    let mut seen: BTreeMap<i64, usize> = BTreeMap::new();
    weights
        .iter()
        .map(|w| {
            let n = seen.entry(*w).or_default();
            *n += 1;
            if *n == 1 {
                w.to_string()
            } else {
                format!("{w}_{n}")
            }
        })
        .collect()
}

pub fn subset_module(instance: &SubsetSumInstance) -> ComponentModule<SubsetValue> {
    let mut m = ComponentModule::new("Set")
        .constructor("empty", "Set", Vec::<String>::new(), |_| {
            Ok(SubsetValue::Set(BTreeMap::new()))
        })
        .constructor("add", "Set", ["Int", "Set"], |args| match args.as_slice() {
            [SubsetValue::Item { index, weight }, SubsetValue::Set(items)] => {
                let mut items = items.clone();
                items.insert(*index, *weight);
                Ok(SubsetValue::Set(items))
            }
            _ => Err("add expects an item and a set".into()),
        });
    for (index, (label, &weight)) in weight_labels(&instance.weights)
        .into_iter()
        .zip(&instance.weights)
        .enumerate()
    {
        m = m.constant(label, "Int", SubsetValue::Item { index, weight });
    }
    m
}

pub fn subset_case(instance: &SubsetSumInstance) -> Result<Problem<SubsetValue>, BenchmarkError> {
    let (grammar, semantics) = subset_module(instance).compile()?;
    let target = instance.target;
    Ok(Problem::new(grammar, semantics, move |v| match v {
        SubsetValue::Set(_) => subset_fitness(v.sum(), target),
        SubsetValue::Item { .. } => f64::NEG_INFINITY,
    }))
}
