//! The built-in case studies.

pub mod branin;
pub mod dheap;
pub mod skiplist;
pub mod subset;
pub mod syntax;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::registry::RegistryError;
use crate::semantics::SearchProblem;

pub use branin::{branin_case, branin_value, BraninGrid};
pub use dheap::{heap_case, heap_run_load, DaryHeap, HeapConfig, HeapGrid, HeapOp};
pub use skiplist::{
    skiplist_case, skiplist_run_load, ProbabilitySequence, SkipList, SkiplistConfig, SkiplistPools,
};
pub use subset::{subset_case, SubsetSumInstance};
pub use syntax::{contrast_ratio, scheme_case, ColorScheme, Rgb};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchmarkError {
    #[error("grid step {0} does not give at least two points per axis")]
    DegenerateGrid(f64),
    #[error("invalid subset-sum instance: {0}")]
    InvalidInstance(String),
    #[error("unknown bundled instance {0:?} (expected P01 or P02)")]
    UnknownInstance(String),
    #[error("invalid heap configuration {0:?}")]
    InvalidHeapConfig(HeapConfig),
    #[error("invalid heap load: {0}")]
    InvalidLoad(String),
    #[error("invalid probability sequence: {0}")]
    InvalidSequence(String),
    #[error("{0} must not be empty")]
    EmptyPool(&'static str),
    #[error("invalid color {0:?} (expected RRGGBB)")]
    InvalidColor(String),
    #[error("unknown case {0:?} (expected branin, subset, dheap, skiplist or syntax)")]
    UnknownCase(String),
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Branin,
    Subset,
    #[serde(rename = "dheap")]
    DHeap,
    Skiplist,
    Syntax,
}

impl Case {
    pub const ALL: [Case; 5] = [
        Case::Branin,
        Case::Subset,
        Case::DHeap,
        Case::Skiplist,
        Case::Syntax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Case::Branin => "branin",
            Case::Subset => "subset",
            Case::DHeap => "dheap",
            Case::Skiplist => "skiplist",
            Case::Syntax => "syntax",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Case {
    type Err = BenchmarkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Case::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| BenchmarkError::UnknownCase(s.to_string()))
    }
}

pub const DEFAULT_LOAD_SEED: u64 = 1;

/// Instance-level knobs of the cases; each case reads only its own.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseOptions {
    pub grid_step: f64,
    pub instance: SubsetSumInstance,
    pub heap_grid: HeapGrid,
    pub skiplist_pools: SkiplistPools,
    pub load_seed: u64,
    pub background: Rgb,
    pub class_count: usize,
}

impl Default for CaseOptions {
    fn default() -> Self {
        CaseOptions {
            grid_step: branin::DEFAULT_GRID_STEP,
            instance: SubsetSumInstance::p01(),
            heap_grid: HeapGrid::default(),
            skiplist_pools: SkiplistPools::default(),
            load_seed: DEFAULT_LOAD_SEED,
            background: Rgb::BLACK,
            class_count: syntax::TOKEN_CLASSES.len(),
        }
    }
}

pub fn build_case(
    case: Case,
    options: &CaseOptions,
) -> Result<Box<dyn SearchProblem>, BenchmarkError> {
    Ok(match case {
        Case::Branin => Box::new(branin_case(&BraninGrid::new(options.grid_step)?)?),
        Case::Subset => Box::new(subset_case(&options.instance)?),
        Case::DHeap => Box::new(heap_case(options.load_seed, &options.heap_grid)?),
        Case::Skiplist => Box::new(skiplist_case(options.load_seed, &options.skiplist_pools)?),
        Case::Syntax => Box::new(scheme_case(options.background, options.class_count)?),
    })
}
