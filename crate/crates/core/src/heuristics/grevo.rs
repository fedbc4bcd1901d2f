//! GrEvo: grammatical evolution with fixed-length integer genotypes.

use rand::Rng;

use super::{resolve_depth_cap, SearchBudget, SearchError, SearchResult, Tracker};
use crate::grammar::{DerivationTree, Grammar, GrammarError};
use crate::semantics::Objective;

#[derive(Debug, Clone, PartialEq)]
pub struct GrEvoParams {
    pub population_size: usize,
    /// Number of evaluated generations, the initial population included.
    pub generations: usize,
    pub genotype_length: usize,
    pub crossover_prob: f64,
    /// Per-gene reset probability; `None` means `1 / genotype_length`.
    pub mutation_prob: Option<f64>,
    pub tournament_size: usize,
    pub depth_cap: Option<usize>,
}

impl Default for GrEvoParams {
    fn default() -> Self {
        GrEvoParams {
            population_size: 100,
            generations: 10,
            genotype_length: 64,
            crossover_prob: 0.9,
            mutation_prob: None,
            tournament_size: 2,
            depth_cap: None,
        }
    }
}

impl GrEvoParams {
    pub fn with_ratio(population_size: usize, generations: usize) -> Self {
        GrEvoParams {
            population_size,
            generations,
            ..GrEvoParams::default()
        }
    }

    /// Keeps the 10:1 population-to-generation shape of (100:10) and fits it
    /// under `budget`: population `floor(sqrt(10 * budget))`, as many whole
    /// generations as fit.
    pub fn for_budget(budget: usize) -> Self {
        let population = ((10.0 * budget as f64).sqrt().floor() as usize).clamp(2, budget.max(2));
        let generations = (budget / population).max(1);
        GrEvoParams::with_ratio(population, generations)
    }

    pub fn evaluations(&self) -> usize {
        self.population_size.saturating_mul(self.generations)
    }

    pub fn mutation_rate(&self) -> f64 {
        self.mutation_prob
            .unwrap_or(1.0 / self.genotype_length as f64)
    }

    pub fn validate(&self, budget: usize) -> Result<(), SearchError> {
        if self.population_size < 2 {
            return Err(SearchError::PopulationTooSmall(self.population_size));
        }
        if self.generations == 0 {
            return Err(SearchError::InvalidParameter(
                "generations must be at least 1".into(),
            ));
        }
        if self.evaluations() > budget {
            return Err(SearchError::BudgetExceeded {
                population: self.population_size,
                generations: self.generations,
                budget,
            });
        }
        if self.genotype_length == 0 {
            return Err(SearchError::InvalidParameter(
                "genotype length must be positive".into(),
            ));
        }
        if self.tournament_size == 0 {
            return Err(SearchError::InvalidParameter(
                "tournament size must be positive".into(),
            ));
        }
        let unit = 0.0..=1.0;
        if !unit.contains(&self.crossover_prob) || !unit.contains(&self.mutation_rate()) {
            return Err(SearchError::InvalidParameter(
                "probabilities must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Genotype {
    pub genes: Vec<u32>,
}

impl Genotype {
    pub fn new(genes: Vec<u32>) -> Self {
        Genotype { genes }
    }

    pub fn random<R: Rng + ?Sized>(length: usize, rng: &mut R) -> Self {
        Genotype {
            genes: (0..length).map(|_| rng.gen()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }
}

// Reads genes front to back, wrapping to the start once.
struct GeneReader<'a> {
    genes: &'a [u32],
    pos: usize,
    wrapped: bool,
}

impl GeneReader<'_> {
    fn next(&mut self) -> Option<u32> {
        if self.pos == self.genes.len() {
            if self.wrapped || self.genes.is_empty() {
                return None;
            }
            self.wrapped = true;
            self.pos = 0;
        }
        let g = self.genes[self.pos];
        self.pos += 1;
        Some(g)
    }
}

/// Decodes a genotype into a tree of `sort`.
///
/// Every node consumes one gene and takes rule `gene mod k` among its `k`
/// applicable rules (declaration order, restricted to rules that fit under the
/// remaining depth). Once the genes run out a second time, each remaining node
/// takes its first depth-minimizing rule. The mapping is total on productive
/// sorts.
pub fn genotype_to_tree(
    grammar: &Grammar,
    genotype: &Genotype,
    sort: &str,
    depth_cap: usize,
) -> Result<DerivationTree, GrammarError> {
    grammar.check_constructible(sort, depth_cap)?;
    let mut reader = GeneReader {
        genes: &genotype.genes,
        pos: 0,
        wrapped: false,
    };
    Ok(decode(grammar, sort, depth_cap, &mut reader))
}

fn decode(
    grammar: &Grammar,
    sort: &str,
    remaining: usize,
    reader: &mut GeneReader<'_>,
) -> DerivationTree {
    let candidates = grammar.applicable_rules(sort, remaining);
    let choice = match reader.next() {
        Some(gene) => candidates[gene as usize % candidates.len()],
        None => {
            let shallowest = grammar.min_depth(sort).expect("productive");
            *candidates
                .iter()
                .find(|&&i| grammar.rule_min_depth(i) == Some(shallowest))
                .expect("a depth-minimizing rule exists")
        }
    };
    let rule = grammar.rule(choice);
    let children = rule
        .nonterminals()
        .map(|c| decode(grammar, c, remaining - 1, reader))
        .collect();
    DerivationTree::new(rule.label.clone(), children)
}

struct Individual {
    genotype: Genotype,
    fitness: f64,
}

fn tournament<'p, R: Rng + ?Sized>(
    population: &'p [Individual],
    size: usize,
    rng: &mut R,
) -> &'p Individual {
    let mut best = &population[rng.gen_range(0..population.len())];
    for _ in 1..size {
        let other = &population[rng.gen_range(0..population.len())];
        if other.fitness > best.fitness {
            best = other;
        }
    }
    best
}

/// Generational GA: random initial population, tournament selection,
/// one-point crossover, per-gene uniform reset, one elite carried over.
/// Every generation evaluates the full population, so a run costs exactly
/// `population_size * generations` objective calls.
pub fn grevo<R: Rng + ?Sized>(
    grammar: &Grammar,
    objective: &mut dyn Objective,
    budget: SearchBudget,
    params: &GrEvoParams,
    rng: &mut R,
) -> Result<SearchResult, SearchError> {
    params.validate(budget.max_evaluations())?;
    let cap = resolve_depth_cap(grammar, params.depth_cap)?;
    let start = grammar.start();
    let mutation = params.mutation_rate();
    let mut tracker = Tracker::new(objective, budget);

    let mut genotypes: Vec<Genotype> = (0..params.population_size)
        .map(|_| Genotype::random(params.genotype_length, rng))
        .collect();
    let mut population: Vec<Individual> = Vec::with_capacity(params.population_size);

    for generation in 0..params.generations {
        population.clear();
        for genotype in genotypes.drain(..) {
            let tree = genotype_to_tree(grammar, &genotype, start, cap)?;
            let fitness = tracker.evaluate(&tree);
            population.push(Individual { genotype, fitness });
        }
        if generation + 1 == params.generations {
            break;
        }

        let elite = population
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.fitness.total_cmp(&b.fitness).then(ib.cmp(ia)))
            .map(|(_, ind)| ind.genotype.clone())
            .expect("population is non-empty");
        genotypes.push(elite);
        while genotypes.len() < params.population_size {
            let mother = tournament(&population, params.tournament_size, rng);
            let father = tournament(&population, params.tournament_size, rng);
            let mut genes = mother.genotype.genes.clone();
            if genes.len() > 1 && rng.gen::<f64>() < params.crossover_prob {
                let cut = rng.gen_range(1..genes.len());
                genes[cut..].copy_from_slice(&father.genotype.genes[cut..]);
            }
            for gene in &mut genes {
                if rng.gen::<f64>() < mutation {
                    *gene = rng.gen();
                }
            }
            genotypes.push(Genotype::new(genes));
        }
    }
    let _ = tracker.remaining();
    Ok(tracker.finish())
}
