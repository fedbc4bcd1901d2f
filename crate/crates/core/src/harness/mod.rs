//! Repeated seeded runs of the built-in cases.

pub mod output;
pub mod stats;

use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchmarks::syntax::scheme_of;
use crate::benchmarks::{
    build_case, scheme_case, BenchmarkError, Case, CaseOptions, ColorScheme, Rgb, SubsetSumInstance,
};
use crate::grammar::DerivationTree;
use crate::heuristics::{Heuristic, HeuristicConfig, SearchError};
use crate::semantics::SearchProblem;

pub use output::{PValue, ResultsDocument};
pub use stats::{rank_test, summarize, SummaryStats};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
    #[error("unknown parameter {0:?}")]
    UnknownParameter(String),
    #[error("parameter {key}={value:?}: {reason}")]
    InvalidParameter {
        key: String,
        value: String,
        reason: String,
    },
    #[error(transparent)]
    Benchmark(#[from] BenchmarkError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("run {heuristic}#{run} used {used} evaluations, over the budget of {budget}")]
    BudgetOverrun {
        heuristic: Heuristic,
        run: usize,
        used: usize,
        budget: usize,
    },
    #[error("{0}")]
    Io(String),
    #[error("cannot parse results: {0}")]
    Parse(String),
    #[error("no values to summarize")]
    EmptySample,
    #[error("rank test needs at least 3 values per sample, got {a} and {b}")]
    InsufficientSamples { a: usize, b: usize },
}

/// Keys accepted in [`ExperimentSpec::params`].
pub const PARAMETER_KEYS: [&str; 15] = [
    "grid_step",
    "instance",
    "instance_file",
    "background",
    "load_seed",
    "class_count",
    "depth_cap",
    "grevo_ratio",
    "tau_min",
    "tau_init",
    "rho",
    "genotype_length",
    "crossover_prob",
    "mutation_prob",
    "tournament_size",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentSpec {
    pub case: Case,
    pub heuristics: Vec<Heuristic>,
    pub runs: usize,
    pub budget: usize,
    pub base_seed: u64,
    pub params: BTreeMap<String, String>,
}

impl ExperimentSpec {
    pub fn new(
        case: Case,
        heuristics: Vec<Heuristic>,
        runs: usize,
        budget: usize,
        base_seed: u64,
    ) -> Self {
        ExperimentSpec {
            case,
            heuristics,
            runs,
            budget,
            base_seed,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<String>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    fn param<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, HarnessError>
    where
        T::Err: std::fmt::Display,
    {
        self.params
            .get(key)
            .map(|v| {
                v.trim()
                    .parse::<T>()
                    .map_err(|e| HarnessError::InvalidParameter {
                        key: key.to_string(),
                        value: v.clone(),
                        reason: e.to_string(),
                    })
            })
            .transpose()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.runs == 0 {
            return Err(HarnessError::InvalidSpec("runs must be at least 1".into()));
        }
        if self.budget == 0 {
            return Err(HarnessError::InvalidSpec(
                "budget must be at least 1".into(),
            ));
        }
        if self.heuristics.is_empty() {
            return Err(HarnessError::InvalidSpec("no heuristics selected".into()));
        }
        for (i, h) in self.heuristics.iter().enumerate() {
            if self.heuristics[..i].contains(h) {
                return Err(HarnessError::InvalidSpec(format!(
                    "heuristic {h} listed twice"
                )));
            }
        }
        if let Some(key) = self
            .params
            .keys()
            .find(|k| !PARAMETER_KEYS.contains(&k.as_str()))
        {
            return Err(HarnessError::UnknownParameter(key.clone()));
        }
        for &h in &self.heuristics {
            match self.heuristic_config(h)? {
                HeuristicConfig::GrAnt(p) => p.validate()?,
                HeuristicConfig::GrEvo(p) => p.validate(self.budget)?,
                HeuristicConfig::Random { .. } => {}
            }
        }
        Ok(())
    }

    pub fn case_options(&self) -> Result<CaseOptions, HarnessError> {
        let mut options = CaseOptions::default();
        if let Some(step) = self.param::<f64>("grid_step")? {
            options.grid_step = step;
        }
        if let Some(name) = self.params.get("instance") {
            options.instance = SubsetSumInstance::bundled(name)
                .ok_or_else(|| BenchmarkError::UnknownInstance(name.clone()))?;
        }
        if let Some(path) = self.params.get("instance_file") {
            let text = std::fs::read_to_string(path)
                .map_err(|e| HarnessError::Io(format!("{path}: {e}")))?;
            options.instance = text.parse()?;
        }
        if let Some(bg) = self.param::<Rgb>("background")? {
            options.background = bg;
        }
        if let Some(seed) = self.param("load_seed")? {
            options.load_seed = seed;
        }
        if let Some(count) = self.param("class_count")? {
            options.class_count = count;
        }
        Ok(options)
    }

    pub fn heuristic_config(&self, heuristic: Heuristic) -> Result<HeuristicConfig, HarnessError> {
        let mut config = HeuristicConfig::defaults(heuristic, self.budget)
            .with_depth_cap(self.param("depth_cap")?);
        match &mut config {
            HeuristicConfig::GrAnt(p) => {
                if let Some(v) = self.param("tau_min")? {
                    p.tau_min = v;
                }
                if let Some(v) = self.param("tau_init")? {
                    p.tau_init = v;
                }
                if let Some(v) = self.param("rho")? {
                    p.rho = v;
                }
            }
            HeuristicConfig::GrEvo(p) => {
                if let Some(ratio) = self.params.get("grevo_ratio") {
                    let (pop, gens) = parse_ratio(ratio)?;
                    p.population_size = pop;
                    p.generations = gens;
                }
                if let Some(v) = self.param("genotype_length")? {
                    p.genotype_length = v;
                }
                if let Some(v) = self.param("crossover_prob")? {
                    p.crossover_prob = v;
                }
                if let Some(v) = self.param("mutation_prob")? {
                    p.mutation_prob = Some(v);
                }
                if let Some(v) = self.param("tournament_size")? {
                    p.tournament_size = v;
                }
            }
            HeuristicConfig::Random { .. } => {}
        }
        Ok(config)
    }
}

/// `P:G` population and generation counts.
pub fn parse_ratio(text: &str) -> Result<(usize, usize), HarnessError> {
    let bad = |reason: &str| HarnessError::InvalidParameter {
        key: "grevo_ratio".into(),
        value: text.to_string(),
        reason: reason.to_string(),
    };
    let (p, g) = text.split_once(':').ok_or_else(|| bad("expected P:G"))?;
    let p = p
        .trim()
        .parse()
        .map_err(|_| bad("population is not a positive integer"))?;
    let g = g
        .trim()
        .parse()
        .map_err(|_| bad("generations is not a positive integer"))?;
    Ok((p, g))
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(FNV_PRIME)
    })
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `splitmix64(splitmix64(base ^ fnv1a64(name)) ^ run)`.
pub fn run_seed(base_seed: u64, heuristic: Heuristic, run: usize) -> u64 {
    splitmix64(splitmix64(base_seed ^ fnv1a64(heuristic.name().as_bytes())) ^ run as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunRecord {
    pub heuristic: Heuristic,
    pub run: usize,
    pub seed: u64,
    #[serde(with = "output::fitness_repr")]
    pub best_fitness: f64,
    pub best_tree: String,
    pub evaluations: usize,
    pub wall_ms: u64,
}

/// One run: fresh counted objective, seeded RNG, configured heuristic.
pub fn run_once(
    problem: &dyn SearchProblem,
    config: &HeuristicConfig,
    budget: usize,
    run: usize,
    seed: u64,
) -> Result<(RunRecord, DerivationTree), HarnessError> {
    let started = Instant::now();
    let mut objective = problem.objective();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let result =
        crate::heuristics::search(config, problem.grammar(), &mut objective, budget, &mut rng)?;
    let used = objective.evaluations();
    if used > budget {
        return Err(HarnessError::BudgetOverrun {
            heuristic: config.heuristic(),
            run,
            used,
            budget,
        });
    }
    let record = RunRecord {
        heuristic: config.heuristic(),
        run,
        seed,
        best_fitness: result.best_fitness,
        best_tree: result.best_tree.to_string(),
        evaluations: used,
        wall_ms: started.elapsed().as_millis() as u64,
    };
    Ok((record, result.best_tree))
}

/// Every heuristic × run of `spec` on an already built problem, executed in
/// parallel, returned in `(heuristic order, run index)` order.
pub fn run_problem(
    problem: &dyn SearchProblem,
    spec: &ExperimentSpec,
) -> Result<Vec<(RunRecord, DerivationTree)>, HarnessError> {
    let configs = spec
        .heuristics
        .iter()
        .map(|&h| spec.heuristic_config(h))
        .collect::<Result<Vec<_>, _>>()?;
    let jobs: Vec<(usize, usize)> = (0..configs.len())
        .flat_map(|h| (0..spec.runs).map(move |r| (h, r)))
        .collect();
    jobs.par_iter()
        .map(|&(h, run)| {
            let config = &configs[h];
            run_once(
                problem,
                config,
                spec.budget,
                run,
                run_seed(spec.base_seed, config.heuristic(), run),
            )
        })
        .collect()
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<RunRecord>, HarnessError> {
    spec.validate()?;
    let problem = build_case(spec.case, &spec.case_options()?)?;
    Ok(run_problem(problem.as_ref(), spec)?
        .into_iter()
        .map(|(r, _)| r)
        .collect())
}

/// Runs a syntax experiment and returns the best scheme found over all runs,
/// with the record of the run that found it (earliest on ties).
pub fn best_scheme(spec: &ExperimentSpec) -> Result<(ColorScheme, RunRecord), HarnessError> {
    if spec.case != Case::Syntax {
        return Err(HarnessError::InvalidSpec(format!(
            "color schemes come from the syntax case, not {}",
            spec.case
        )));
    }
    spec.validate()?;
    let options = spec.case_options()?;
    let problem = scheme_case(options.background, options.class_count)?;
    let runs = run_problem(&problem, spec)?;
    let (record, tree) = runs
        .into_iter()
        .reduce(|best, next| {
            if next.0.best_fitness > best.0.best_fitness {
                next
            } else {
                best
            }
        })
        .ok_or_else(|| HarnessError::InvalidSpec("no runs".into()))?;
    let scheme = scheme_of(&problem, &tree).ok_or_else(|| {
        HarnessError::InvalidSpec(format!("best tree {tree} does not denote a scheme"))
    })?;
    Ok((scheme, record))
}

/// Best fitness per heuristic, in record order.
pub fn fitness_by_heuristic(records: &[RunRecord]) -> BTreeMap<Heuristic, Vec<f64>> {
    let mut out: BTreeMap<Heuristic, Vec<f64>> = BTreeMap::new();
    for r in records {
        out.entry(r.heuristic).or_default().push(r.best_fitness);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_subset_experiment() {
        let spec = ExperimentSpec::new(Case::Subset, vec![Heuristic::GrAnt], 2, 10, 1);
        let records = run_experiment(&spec).unwrap();
        assert_eq!(records.len(), 2);
        assert!(records.iter().all(|r| r.evaluations <= 10));
        assert_eq!((records[0].run, records[1].run), (0, 1));
    }

    #[test]
    fn repeated_spec_is_identical() {
        let spec = ExperimentSpec::new(Case::Subset, Heuristic::ALL.to_vec(), 3, 50, 7);
        let strip = |mut rs: Vec<RunRecord>| {
            rs.iter_mut().for_each(|r| r.wall_ms = 0);
            rs
        };
        assert_eq!(
            strip(run_experiment(&spec).unwrap()),
            strip(run_experiment(&spec).unwrap())
        );
    }

    #[test]
    fn grevo_product_over_budget_is_rejected() {
        let spec = ExperimentSpec::new(Case::Subset, vec![Heuristic::GrEvo], 1, 100, 0)
            .with_param("grevo_ratio", "100:10");
        assert!(matches!(
            run_experiment(&spec),
            Err(HarnessError::Search(SearchError::BudgetExceeded { .. }))
        ));
    }

    #[test]
    fn best_scheme_matches_its_record() {
        let spec = ExperimentSpec::new(Case::Syntax, vec![Heuristic::Random], 2, 30, 3)
            .with_param("background", "ffffff");
        let (scheme, record) = best_scheme(&spec).unwrap();
        assert_eq!(scheme.background, Rgb::WHITE);
        assert_eq!(scheme.class_colors.len(), 27);
        assert_eq!(scheme.readability(), record.best_fitness);
        let records = run_experiment(&spec).unwrap();
        let top = records
            .iter()
            .map(|r| r.best_fitness)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(record.best_fitness, top);
        assert!(best_scheme(&ExperimentSpec {
            case: Case::Branin,
            ..spec
        })
        .is_err());
    }

    #[test]
    fn spec_validation() {
        let base = ExperimentSpec::new(Case::Branin, vec![Heuristic::Random], 1, 10, 0);
        assert!(base.validate().is_ok());
        assert!(ExperimentSpec {
            runs: 0,
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(ExperimentSpec {
            budget: 0,
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(ExperimentSpec {
            heuristics: vec![],
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(matches!(
            base.clone().with_param("nope", "1").validate(),
            Err(HarnessError::UnknownParameter(_))
        ));
        assert!(matches!(
            base.clone().with_param("depth_cap", "x").validate(),
            Err(HarnessError::InvalidParameter { .. })
        ));
        assert!(parse_ratio("40:25").unwrap() == (40, 25));
        assert!(parse_ratio("40").is_err());
    }

    #[test]
    fn seeds_differ_across_heuristics_and_runs() {
        let mut seen = std::collections::HashSet::new();
        for h in Heuristic::ALL {
            for run in 0..100 {
                assert!(seen.insert(run_seed(42, h, run)));
            }
        }
        assert_eq!(
            run_seed(42, Heuristic::GrAnt, 3),
            run_seed(42, Heuristic::GrAnt, 3)
        );
    }

    #[test]
    fn mixing_reference_values() {
        // published splitmix64 outputs for state 0: first draw is mix(0 + golden)
        assert_eq!(splitmix64(0), 0xe220_a839_7b1d_cdaf);
        assert_eq!(fnv1a64(b""), FNV_OFFSET);
        assert_eq!(fnv1a64(b"a"), 0xaf63_dc4c_8601_ec8c);
    }
}
