//! Array-backed D-ary min-heap instrumented with an array access counter.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::BenchmarkError;
use crate::registry::ComponentModule;
use crate::semantics::Problem;

pub const DEFAULT_LOAD_OPS: usize = 5000;
pub const KEY_RANGE: u64 = 1_000_000;
pub const REFERENCE_CONFIG: HeapConfig = HeapConfig {
    arity: 2,
    initial_size: 16,
    growth: 2.0,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeapConfig {
    pub arity: usize,
    pub initial_size: usize,
    pub growth: f64,
}

impl HeapConfig {
    pub fn validate(&self) -> Result<(), BenchmarkError> {
        if self.arity < 2
            || self.initial_size < 1
            || !(self.growth > 1.0 && self.growth.is_finite())
        {
            return Err(BenchmarkError::InvalidHeapConfig(*self));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeapOp {
    /// The element gets the next handle, counting from 0.
    Insert {
        key: u64,
    },
    DecreaseKey {
        handle: usize,
        key: u64,
    },
    ExtractMin,
}

const ABSENT: usize = usize::MAX;

/// Min-heap of `(key, handle)` pairs; children of slot `i` sit at
/// `i*D + 1 ..= i*D + D`.
///
/// Each read or write of a backing-array slot counts one access. Growing the
/// array to `max(cap + 1, ceil(cap * growth))` counts two accesses per copied
/// slot. Handle bookkeeping is not counted.
#[derive(Debug, Clone)]
pub struct DaryHeap {
    config: HeapConfig,
    slots: Vec<(u64, usize)>,
    capacity: usize,
    position: Vec<usize>,
    accesses: u64,
}

impl DaryHeap {
    pub fn new(config: HeapConfig) -> Result<Self, BenchmarkError> {
        config.validate()?;
        Ok(DaryHeap {
            config,
            slots: Vec::with_capacity(config.initial_size),
            capacity: config.initial_size,
            position: Vec::new(),
            accesses: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn accesses(&self) -> u64 {
        self.accesses
    }

    pub fn contains(&self, handle: usize) -> bool {
        self.position.get(handle).is_some_and(|&p| p != ABSENT)
    }

    pub fn key_of(&self, handle: usize) -> Option<u64> {
        self.contains(handle)
            .then(|| self.slots[self.position[handle]].0)
    }

    fn read(&mut self, i: usize) -> (u64, usize) {
        self.accesses += 1;
        self.slots[i]
    }

    fn write(&mut self, i: usize, item: (u64, usize)) {
        self.accesses += 1;
        if i == self.slots.len() {
            self.slots.push(item);
        } else {
            self.slots[i] = item;
        }
        self.position[item.1] = i;
    }

    fn grow(&mut self) {
        let scaled = (self.capacity as f64 * self.config.growth).ceil() as usize;
        self.capacity = scaled.max(self.capacity + 1);
        self.accesses += 2 * self.slots.len() as u64;
    }

    /// Inserts `key` and returns its handle.
    pub fn insert(&mut self, key: u64) -> usize {
        let handle = self.position.len();
        self.position.push(ABSENT);
        if self.slots.len() == self.capacity {
            self.grow();
        }
        let hole = self.slots.len();
        self.sift_up(hole, (key, handle));
        handle
    }

    pub fn decrease_key(&mut self, handle: usize, key: u64) -> Result<(), BenchmarkError> {
        if !self.contains(handle) {
            return Err(BenchmarkError::InvalidLoad(format!(
                "handle {handle} is not in the heap"
            )));
        }
        let at = self.position[handle];
        let (current, _) = self.read(at);
        if key > current {
            return Err(BenchmarkError::InvalidLoad(format!(
                "key {key} exceeds the current key {current}"
            )));
        }
        self.sift_up(at, (key, handle));
        Ok(())
    }

    pub fn extract_min(&mut self) -> Option<(u64, usize)> {
        if self.slots.is_empty() {
            return None;
        }
        let top = self.read(0);
        let last_index = self.slots.len() - 1;
        let last = self.read(last_index);
        self.slots.pop();
        self.position[top.1] = ABSENT;
        if last_index > 0 {
            self.sift_down(0, last);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut hole: usize, item: (u64, usize)) {
        let d = self.config.arity;
        while hole > 0 {
            let parent = (hole - 1) / d;
            let above = self.read(parent);
            if item >= above {
                break;
            }
            self.write(hole, above);
            hole = parent;
        }
        self.write(hole, item);
    }

    fn sift_down(&mut self, mut hole: usize, item: (u64, usize)) {
        let d = self.config.arity;
        let len = self.slots.len();
        loop {
            let first = hole * d + 1;
            if first >= len {
                break;
            }
            let mut best = (first, self.read(first));
            for child in first + 1..(first + d).min(len) {
                let c = self.read(child);
                if c < best.1 {
                    best = (child, c);
                }
            }
            if best.1 >= item {
                break;
            }
            self.write(hole, best.1);
            hole = best.0;
        }
        self.write(hole, item);
    }

    /// True when every slot is no smaller than its parent. Not counted.
    pub fn is_heap(&self) -> bool {
        (1..self.slots.len()).all(|i| self.slots[(i - 1) / self.config.arity] <= self.slots[i])
    }

    pub fn apply(&mut self, op: HeapOp) -> Result<(), BenchmarkError> {
        match op {
            HeapOp::Insert { key } => {
                self.insert(key);
            }
            HeapOp::DecreaseKey { handle, key } => self.decrease_key(handle, key)?,
            HeapOp::ExtractMin => {
                self.extract_min().ok_or_else(|| {
                    BenchmarkError::InvalidLoad("extract from an empty heap".into())
                })?;
            }
        }
        Ok(())
    }
}

/// Seeded mix of 60% inserts, 30% decrease-keys and 10% extract-mins. An
/// operation that the current heap cannot take becomes an insert.
pub fn generate_load(seed: u64, ops: usize) -> Vec<HeapOp> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut live: Vec<(usize, u64)> = Vec::new();
    let mut next_handle = 0;
    let mut load = Vec::with_capacity(ops);
    for _ in 0..ops {
        let roll = rng.gen_range(0..10);
        let decreasable = live.iter().any(|&(_, k)| k > 0);
        let op = if (6..9).contains(&roll) && decreasable {
            let i = loop {
                let i = rng.gen_range(0..live.len());
                if live[i].1 > 0 {
                    break i;
                }
            };
            let key = rng.gen_range(0..live[i].1);
            live[i].1 = key;
            HeapOp::DecreaseKey {
                handle: live[i].0,
                key,
            }
        } else if roll == 9 && !live.is_empty() {
            let (i, _) = live
                .iter()
                .enumerate()
                .min_by_key(|(_, &(h, k))| (k, h))
                .expect("non-empty");
            live.swap_remove(i);
            HeapOp::ExtractMin
        } else {
            let key = rng.gen_range(0..KEY_RANGE);
            live.push((next_handle, key));
            next_handle += 1;
            HeapOp::Insert { key }
        };
        load.push(op);
    }
    load
}

/// Total array accesses of `config` over `load`.
pub fn heap_run_load(config: HeapConfig, load: &[HeapOp]) -> Result<u64, BenchmarkError> {
    let mut heap = DaryHeap::new(config)?;
    for &op in load {
        heap.apply(op)?;
    }
    Ok(heap.accesses())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeapGrid {
    pub arities: Vec<usize>,
    pub initial_sizes: Vec<usize>,
    pub growths: Vec<f64>,
}

impl Default for HeapGrid {
    fn default() -> Self {
        HeapGrid {
            arities: (2..=8).collect(),
            initial_sizes: vec![16, 128, 1024],
            growths: vec![1.25, 2.0, 4.0],
        }
    }
}

impl HeapGrid {
    pub fn configs(&self) -> Vec<HeapConfig> {
        let mut out = Vec::new();
        for &arity in &self.arities {
            for &initial_size in &self.initial_sizes {
                for &growth in &self.growths {
                    out.push(HeapConfig {
                        arity,
                        initial_size,
                        growth,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeapValue {
    Arity(usize),
    Size(usize),
    Growth(f64),
    Config(HeapConfig),
}

pub fn heap_module(grid: &HeapGrid) -> ComponentModule<HeapValue> {
    let mut m = ComponentModule::new("Heap").constructor(
        "heap",
        "Heap",
        ["Arity", "Size", "Growth"],
        |args| match args.as_slice() {
            [HeapValue::Arity(arity), HeapValue::Size(initial_size), HeapValue::Growth(growth)] => {
                Ok(HeapValue::Config(HeapConfig {
                    arity: *arity,
                    initial_size: *initial_size,
                    growth: *growth,
                }))
            }
            _ => Err("heap expects arity, size and growth".into()),
        },
    );
    for &d in &grid.arities {
        m = m.constant(format!("arity={d}"), "Arity", HeapValue::Arity(d));
    }
    for &s in &grid.initial_sizes {
        m = m.constant(format!("size={s}"), "Size", HeapValue::Size(s));
    }
    for &g in &grid.growths {
        m = m.constant(format!("growth={g}"), "Growth", HeapValue::Growth(g));
    }
    m
}

/// Fitness of a configuration relative to [`REFERENCE_CONFIG`] on the same
/// seeded load: `reference accesses / accesses`.
pub struct HeapObjective {
    load: Vec<HeapOp>,
    reference: u64,
}

impl HeapObjective {
    pub fn new(seed: u64, ops: usize) -> Result<Self, BenchmarkError> {
        let load = generate_load(seed, ops);
        let reference = heap_run_load(REFERENCE_CONFIG, &load)?;
        Ok(HeapObjective { load, reference })
    }

    pub fn load(&self) -> &[HeapOp] {
        &self.load
    }

    pub fn fitness(&self, config: HeapConfig) -> f64 {
        match heap_run_load(config, &self.load) {
            Ok(0) => f64::INFINITY,
            Ok(n) => self.reference as f64 / n as f64,
            Err(_) => f64::NEG_INFINITY,
        }
    }
}

pub fn heap_case(seed: u64, grid: &HeapGrid) -> Result<Problem<HeapValue>, BenchmarkError> {
    if grid.configs().is_empty() {
        return Err(BenchmarkError::EmptyPool("heap grid"));
    }
    for config in grid.configs() {
        config.validate()?;
    }
    let (grammar, semantics) = heap_module(grid).compile()?;
    let objective = HeapObjective::new(seed, DEFAULT_LOAD_OPS)?;
    Ok(Problem::new(grammar, semantics, move |v| match v {
        HeapValue::Config(c) => objective.fitness(*c),
        _ => f64::NEG_INFINITY,
    }))
}
