//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fail.

use std::collections::{BTreeSet, HashMap};
use std::process::Command;
use std::time::Instant;

use gramopt::benchmarks::syntax::contrast_ratio;
use gramopt::benchmarks::{
    heap_case, Case, HeapGrid, ProbabilitySequence, Rgb, SkipList, SkiplistConfig,
    SubsetSumInstance, DEFAULT_LOAD_SEED,
};
use gramopt::harness::{
    best_scheme, rank_test, run_experiment, summarize, ExperimentSpec, RunRecord,
};
use gramopt::heuristics::{grant, grant_observed, GrAntParams, HeuristicConfig, SearchBudget};
use gramopt::{DerivationTree, Grammar, Heuristic, Rule, Symbol};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn fitness_of(records: &[RunRecord], h: Heuristic) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.heuristic == h)
        .map(|r| r.best_fitness)
        .collect()
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn branin_oracle(x1: f64, x2: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let b = 5.1 / (4.0 * pi * pi);
    let c = 5.0 / pi;
    let t = 1.0 / (8.0 * pi);
    (x2 - b * x1 * x1 + c * x1 - 6.0).powi(2) + 10.0 * (1.0 - t) * x1.cos() + 10.0
}

fn branin_optimum() -> Outcome {
    let started = Instant::now();
    let step = 0.05;
    let axis = |lo: f64, hi: f64| -> Vec<f64> {
        (0..=300)
            .map(|i| lo + i as f64 * (hi - lo) / 300.0)
            .collect()
    };
    let (xs, ys) = (axis(-5.0, 10.0), axis(0.0, 15.0));
    let oracle = xs
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| 1.0 / branin_oracle(x, y)))
        .fold(f64::NEG_INFINITY, f64::max);
    let spec = ExperimentSpec::new(Case::Branin, vec![Heuristic::GrAnt], 100, 1000, SEED)
        .with_param("grid_step", step.to_string());
    let records = run_experiment(&spec).expect("branin experiment");
    let max = fitness_of(&records, Heuristic::GrAnt)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let secs = started.elapsed().as_secs_f64();
    let equal = (max - oracle).abs() <= 1e-9 * oracle;
    outcome(
        equal && (2.4..=2.52).contains(&max) && secs < 120.0,
        format!("GrAnt max {max:.6}, grid optimum {oracle:.6}, {secs:.1}s"),
    )
}

fn subset_exactness() -> Outcome {
    let instance = SubsetSumInstance::p01();
    let weights = &instance.weights;
    let exact = (0u32..1 << weights.len()).any(|mask| {
        (0..weights.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| weights[i])
            .sum::<i64>()
            == instance.target
    });
    let spec = ExperimentSpec::new(
        Case::Subset,
        vec![Heuristic::GrAnt, Heuristic::Random],
        100,
        1000,
        SEED,
    )
    .with_param("instance", "P01");
    let records = run_experiment(&spec).expect("subset experiment");
    let ant = fitness_of(&records, Heuristic::GrAnt);
    let random = fitness_of(&records, Heuristic::Random);
    let hits = ant.iter().filter(|&&f| f == 2.0).count();
    let (ant_mean, random_mean) = (mean(&ant), mean(&random));
    outcome(
        exact && hits >= 50 && random_mean < ant_mean,
        format!(
            "exact subset exists: {exact}; GrAnt hits {hits}/100; mean GrAnt {ant_mean:.4} vs random {random_mean:.4}"
        ),
    )
}

fn dheap_convergence() -> Outcome {
    let grid = HeapGrid::default();
    let problem = heap_case(DEFAULT_LOAD_SEED, &grid).expect("heap case");
    let trees = problem
        .grammar
        .enumerate_trees(problem.grammar.start(), 2, 1000)
        .expect("finite grid");
    let optimum = trees
        .iter()
        .map(|t| problem.score(t))
        .fold(f64::NEG_INFINITY, f64::max);
    let spec = ExperimentSpec::new(Case::DHeap, vec![Heuristic::GrAnt], 10, 1000, SEED);
    let records = run_experiment(&spec).expect("heap experiment");
    let ant = fitness_of(&records, Heuristic::GrAnt);
    let at_optimum = ant.iter().filter(|&&f| f == optimum).count();
    let var = summarize(&ant).expect("ten runs").var;
    outcome(
        trees.len() <= 63 && at_optimum == 10 && var == 0.0,
        format!("{} configurations, optimum {optimum:.6}; {at_optimum}/10 runs at optimum, var {var:.3e}", trees.len()),
    )
}

fn skiplist_direction() -> Outcome {
    let spec = ExperimentSpec::new(
        Case::Skiplist,
        vec![Heuristic::GrAnt, Heuristic::Random],
        100,
        100,
        SEED,
    );
    let records = run_experiment(&spec).expect("skiplist experiment");
    let (ant, random) = (
        mean(&fitness_of(&records, Heuristic::GrAnt)),
        mean(&fitness_of(&records, Heuristic::Random)),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut dictionary_ok = 0;
    for seed in 0..100u64 {
        let height = rng.gen_range(1..=16);
        let sequence = match rng.gen_range(0..3) {
            0 => ProbabilitySequence::geometric(rng.gen_range(1.1..8.0)).unwrap(),
            1 => ProbabilitySequence::arithmetic(rng.gen_range(0.1..4.0)).unwrap(),
            _ => ProbabilitySequence::sum(
                ProbabilitySequence::geometric(2.0).unwrap(),
                ProbabilitySequence::arithmetic(1.0).unwrap(),
            ),
        };
        let mut list = SkipList::new(
            SkiplistConfig {
                max_height: height,
                sequence,
            },
            seed,
        )
        .unwrap();
        let mut reference = BTreeSet::new();
        let mut values = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..1000 {
            let v = values.gen_range(0..1_000_000u64);
            assert_eq!(list.insert(v), reference.insert(v));
        }
        let members = reference.iter().all(|&v| list.contains(v));
        let strangers = (0..200).all(|_| {
            let v = values.gen_range(0..1_000_000u64);
            list.contains(v) == reference.contains(&v)
        });
        if members && strangers && list.len() == reference.len() && list.is_well_formed() {
            dictionary_ok += 1;
        }
    }
    outcome(
        ant >= random && dictionary_ok == 100,
        format!("mean GrAnt {ant:.6} vs random {random:.6}; dictionary checks {dictionary_ok}/100"),
    )
}

fn parse_css_colors(css: &str) -> Option<(Rgb, Vec<(String, Rgb)>)> {
    let mut background = None;
    let mut classes = Vec::new();
    for line in css.lines() {
        let (selector, body) = line.split_once('{')?;
        let body = body.trim().strip_suffix('}')?.trim().strip_suffix(';')?;
        let (property, value) = body.split_once(':')?;
        let color: Rgb = value.trim().parse().ok()?;
        match (selector.trim(), property.trim()) {
            ("body", "background-color") => background = Some(color),
            (s, "color") if s.starts_with('.') => classes.push((s[1..].to_string(), color)),
            _ => return None,
        }
    }
    Some((background?, classes))
}

fn syntax_direction() -> Outcome {
    let spec = ExperimentSpec::new(Case::Syntax, Heuristic::ALL.to_vec(), 100, 1000, SEED);
    let records = run_experiment(&spec).expect("syntax experiment");
    let ant = mean(&fitness_of(&records, Heuristic::GrAnt));
    let evo = mean(&fitness_of(&records, Heuristic::GrEvo));
    let random = mean(&fitness_of(&records, Heuristic::Random));

    let (scheme, _) = best_scheme(&spec).expect("best scheme");
    let parsed = parse_css_colors(&scheme.to_css());
    let readable = parsed.as_ref().is_some_and(|(bg, classes)| {
        classes.len() == 27 && classes.iter().all(|(_, c)| contrast_ratio(*c, *bg) >= 4.5)
    });
    outcome(
        ant > random && evo > random && readable,
        format!(
            "mean GrAnt {ant:.4}, GrEvo {evo:.4}, random {random:.4}; style sheet parses: {}, all contrasts >= 4.5: {readable} (min {:.2})",
            parsed.is_some(),
            scheme.min_contrast()
        ),
    )
}

fn budget_exactness() -> Outcome {
    let mut problems = Vec::new();
    for case in Case::ALL {
        for budget in [4, 7, 100, 1000] {
            let spec = ExperimentSpec::new(case, Heuristic::ALL.to_vec(), 2, budget, SEED);
            let records = run_experiment(&spec).expect("budget experiment");
            let grevo = match spec.heuristic_config(Heuristic::GrEvo).unwrap() {
                HeuristicConfig::GrEvo(p) => p.evaluations(),
                _ => unreachable!(),
            };
            for r in &records {
                if r.evaluations > budget
                    || (r.heuristic == Heuristic::GrEvo && r.evaluations != grevo)
                {
                    problems.push(format!(
                        "{case}/{}/{budget}: {}",
                        r.heuristic, r.evaluations
                    ));
                }
            }
        }
    }
    for (p, g) in [(100, 10), (40, 25), (25, 40), (10, 100)] {
        for case in Case::ALL {
            let spec = ExperimentSpec::new(case, vec![Heuristic::GrEvo], 1, 1000, SEED)
                .with_param("grevo_ratio", format!("{p}:{g}"));
            let r = &run_experiment(&spec).expect("ratio experiment")[0];
            if r.evaluations != p * g {
                problems.push(format!("{case}/grevo {p}:{g}: {}", r.evaluations));
            }
        }
    }
    let pass = problems.is_empty();
    outcome(
        pass,
        if pass {
            "all counters within cap; GrEvo exactly P x G".into()
        } else {
            problems.join(", ")
        },
    )
}

/// Acyclic grammar over `N0..N3` plus an unproductive sort `D`.
fn random_grammar(rng: &mut ChaCha8Rng) -> Grammar {
    let sorts = ["N0", "N1", "N2", "N3"];
    let mut rules = Vec::new();
    let mut terminals = BTreeSet::from(["d".to_string()]);
    for (i, sort) in sorts.iter().enumerate() {
        for j in 0..rng.gen_range(1..=3) {
            let t = format!("t{i}x{j}");
            terminals.insert(t.clone());
            let mut rhs = vec![Symbol::terminal(t)];
            for _ in 0..rng.gen_range(0..=2) {
                if rng.gen_bool(0.08) {
                    rhs.push(Symbol::nonterminal("D"));
                } else if i + 1 < sorts.len() {
                    rhs.push(Symbol::nonterminal(
                        sorts[rng.gen_range(i + 1..sorts.len())],
                    ));
                }
            }
            rules.push(Rule::new(format!("r{i}x{j}"), *sort, rhs));
        }
    }
    rules.push(Rule::new(
        "dead",
        "D",
        vec![Symbol::terminal("d"), Symbol::nonterminal("D")],
    ));
    let nonterminals = sorts
        .iter()
        .map(|s| s.to_string())
        .chain(["D".to_string()])
        .collect();
    Grammar::new(terminals, nonterminals, "N0", rules).expect("well-formed random grammar")
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut grammars, mut runs, mut matched, mut productive_agree) = (0, 0, 0, 0);
    while grammars < 50 {
        let g = random_grammar(&mut rng);
        let Ok(trees) = g.enumerate_trees("N0", 16, 64) else {
            continue;
        };
        if trees.is_empty() {
            continue;
        }
        grammars += 1;
        let by_enumeration: BTreeSet<String> = g
            .nonterminals()
            .iter()
            .filter(|s| {
                !g.enumerate_trees(s, 16, 100_000)
                    .map(|t| t.is_empty())
                    .unwrap_or(false)
            })
            .cloned()
            .collect();
        if by_enumeration == g.productive_sorts() {
            productive_agree += 1;
        }
        let values: Vec<f64> = (0..trees.len()).map(|_| rng.gen::<f64>()).collect();
        let optimum = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let table: HashMap<String, f64> = trees.iter().map(|t| t.to_string()).zip(values).collect();
        for _ in 0..4 {
            let mut objective = |t: &DerivationTree| {
                table
                    .get(&t.to_string())
                    .copied()
                    .unwrap_or(f64::NEG_INFINITY)
            };
            let budget = SearchBudget::new(20 * trees.len()).unwrap();
            let result = grant(
                &g,
                &mut objective,
                budget,
                &GrAntParams::default(),
                &mut rng,
            )
            .expect("grant run");
            runs += 1;
            if result.best_fitness == optimum {
                matched += 1;
            }
        }
    }
    let rate = matched as f64 / runs as f64;
    outcome(
        rate >= 0.95 && productive_agree == 50,
        format!("{matched}/{runs} runs found the enumerated optimum; productive sorts agree on {productive_agree}/50"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let bin = env!("CARGO_BIN_EXE_gramopt");
    let strip = |text: &str| -> String {
        text.lines()
            .filter(|l| !l.contains("\"wallMs\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let mut identical = 0;
    let invocations: [&[&str]; 3] = [
        &["subset", "--runs", "5", "--budget", "300", "--seed", "11"],
        &[
            "branin",
            "--runs",
            "3",
            "--budget",
            "200",
            "--seed",
            "4",
            "--grid-step",
            "0.1",
            "--grevo-ratio",
            "10:20",
        ],
        &[
            "syntax",
            "--heuristics",
            "grant,random",
            "--runs",
            "4",
            "--budget",
            "150",
            "--seed",
            "9",
        ],
    ];
    for (i, args) in invocations.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("run{i}_{rep}.json"));
            let status = Command::new(bin)
                .arg("bench")
                .args(*args)
                .args(["--format", "json", "--out"])
                .arg(&out)
                .status()
                .expect("spawn gramopt");
            assert!(status.success(), "bench {args:?} failed");
            outputs.push(strip(&std::fs::read_to_string(&out).unwrap()));
        }
        if outputs[0] == outputs[1] {
            identical += 1;
        }
    }
    outcome(
        identical == invocations.len(),
        format!(
            "{identical}/{} invocations byte-identical",
            invocations.len()
        ),
    )
}

fn bound_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut iterations, mut violations) = (0usize, 0usize);
    while iterations < 100_000 {
        let g = if rng.gen_bool(0.5) {
            gramopt::grammar::samples::binary_strings()
        } else {
            random_grammar(&mut rng)
        };
        if !g.is_productive(g.start()) {
            continue;
        }
        let params = GrAntParams {
            tau_min: rng.gen_range(0.001..0.5),
            tau_init: rng.gen_range(0.5..3.0),
            rho: rng.gen_range(0.01..0.9),
            depth_cap: Some(rng.gen_range(8..16)),
        };
        let noise = rng.gen_range(0.1..50.0);
        let mut fitness_rng = ChaCha8Rng::seed_from_u64(rng.gen());
        let mut objective = |t: &DerivationTree| match fitness_rng.gen_range(0..20) {
            0 => f64::NEG_INFINITY,
            1 => -fitness_rng.gen_range(0.0..noise),
            _ => t.size() as f64 * fitness_rng.gen_range(0.0..noise),
        };
        let mut previous_max = 0.0f64;
        let budget = SearchBudget::new(2000).unwrap();
        grant_observed(&g, &mut objective, budget, &params, &mut rng, |table| {
            iterations += 1;
            let bounded = table
                .levels()
                .iter()
                .all(|&l| table.tau_min() <= l && l <= table.tau_max());
            if !bounded || table.tau_max() < previous_max {
                violations += 1;
            }
            previous_max = table.tau_max();
        })
        .expect("fuzzed grant run");
    }
    outcome(
        violations == 0,
        format!("{iterations} iterations, {violations} violations"),
    )
}

/// Two-sided exact permutation p-value of the rank-sum statistic.
fn exact_rank_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let ranks: Vec<f64> = pooled
        .iter()
        .map(|&v| {
            let below = pooled.iter().filter(|&&w| w < v).count() as f64;
            let equal = pooled.iter().filter(|&&w| w == v).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let na = a.len();
    let u_of = |members: &[usize]| {
        members.iter().map(|&i| ranks[i]).sum::<f64>() - (na * (na + 1)) as f64 / 2.0
    };
    let centre = (na * (n - na)) as f64 / 2.0;
    let observed = (u_of(&(0..na).collect::<Vec<_>>()) - centre).abs();
    let (mut extreme, mut total) = (0usize, 0usize);
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize != na {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        total += 1;
        if (u_of(&members) - centre).abs() >= observed - 1e-9 {
            extreme += 1;
        }
    }
    extreme as f64 / total as f64
}

fn multisets(size: usize, from: usize) -> Vec<Vec<f64>> {
    if size == 0 {
        return vec![vec![]];
    }
    (from..=6)
        .flat_map(|v| {
            multisets(size - 1, v).into_iter().map(move |mut rest| {
                rest.insert(0, v as f64);
                rest
            })
        })
        .collect()
}

fn rank_test_oracle() -> Outcome {
    let samples: Vec<Vec<f64>> = (3..=5).flat_map(|k| multisets(k, 1)).collect();
    let (mut pairs, mut within, mut worst, mut worst_pair) =
        (0usize, 0usize, 0.0f64, String::new());
    for a in &samples {
        for b in &samples {
            pairs += 1;
            let diff = (rank_test(a, b).unwrap() - exact_rank_p(a, b)).abs();
            if diff <= 0.05 {
                within += 1;
            }
            if diff > worst {
                worst = diff;
                worst_pair = format!("{a:?} vs {b:?}");
            }
        }
    }
    outcome(
        within == pairs,
        format!("{within}/{pairs} pairs within 0.05; largest gap {worst:.4} at {worst_pair}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 branin optimum", branin_optimum),
        ("2 subset-sum exactness", subset_exactness),
        ("3 d-ary heap convergence", dheap_convergence),
        ("4 skiplist direction", skiplist_direction),
        ("5 syntax highlighting direction", syntax_direction),
        ("6 budget exactness", budget_exactness),
        ("7 oracle equivalence", oracle_equivalence),
        ("8 determinism", determinism),
        ("9 pheromone bounds", bound_invariants),
        ("10 rank test oracle", rank_test_oracle),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
