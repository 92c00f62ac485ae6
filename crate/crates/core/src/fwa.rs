//! Reference fireworks search over tour permutations.
//!
//! The three operators below are the seed critical part for the TSP task:
//! explosion sparks are single 2-opt reversals whose reach shrinks for
//! fitter parents, mutation sparks relocate a short block (or-opt), and
//! selection keeps the best firework plus distance-diverse survivors.
//! The engine recomputes every fitness from the tour itself, so operators
//! (and later, evolved candidates) cannot inflate scores.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::tsp::{tour_length, LengthMode, Tour, TspInstance};

const FITNESS_EPS: f64 = 1e-9;
/// Spatial neighbors consulted when steering a spark's reversal endpoint.
const NEIGHBOR_K: usize = 12;
/// Fraction of sparks whose reversal reconnects a long tour edge to a
/// near neighbor; the rest reverse a uniformly random segment.
const GUIDED_FRACTION: f64 = 0.8;

#[derive(Debug, thiserror::Error)]
pub enum FwaError {
    #[error("explosion requires a nonempty population")]
    EmptyPopulation,
    #[error("mutation requires at least 4 cities, got {0}")]
    TooShort(usize),
    #[error("selection asked for {wanted} fireworks from {available} candidates")]
    NotEnoughCandidates { wanted: usize, available: usize },
    #[error("eval budget {budget} is smaller than the population size {population}")]
    BudgetTooSmall { budget: u64, population: usize },
    #[error("operator `{operator}` produced an invalid permutation")]
    InvalidPermutation { operator: &'static str },
    #[error(transparent)]
    Tsp(#[from] crate::tsp::TspError),
}

/// One individual: a tour plus its engine-computed fitness.
#[derive(Debug, Clone)]
pub struct Firework {
    pub tour: Tour,
    pub fitness: f64,
}

/// Engine parameters. `eval_budget` counts tour evaluations, including the
/// initial population.
#[derive(Debug, Clone)]
pub struct FwaParams {
    pub population_size: usize,
    pub spark_budget: usize,
    pub mutation_sparks: usize,
    pub rng_seed: u64,
    pub eval_budget: u64,
    pub mode: LengthMode,
}

impl Default for FwaParams {
    fn default() -> Self {
        Self {
            population_size: 8,
            spark_budget: 40,
            mutation_sparks: 4,
            rng_seed: 0,
            eval_budget: 10_000,
            mode: LengthMode::Rounded,
        }
    }
}

pub type ExplosionFn =
    dyn FnMut(&[Firework], &FwaParams, &mut ChaCha8Rng) -> Result<Vec<Tour>, FwaError>;
pub type MutationFn = dyn FnMut(&Firework, &mut ChaCha8Rng) -> Result<Tour, FwaError>;
pub type SelectionFn =
    dyn FnMut(&[Firework], usize, &mut ChaCha8Rng) -> Result<Vec<Firework>, FwaError>;

/// The pluggable operator triple acted on by the evolution loop.
pub struct OperatorSuite {
    pub explosion: Box<ExplosionFn>,
    pub mutation: Box<MutationFn>,
    pub selection: Box<SelectionFn>,
}

impl OperatorSuite {
    /// The reference operators described at module level. The explosion
    /// operator captures a nearest-neighbor table of the instance.
    pub fn reference(inst: &TspInstance) -> Self {
        let neighbors = NeighborTable::build(inst, NEIGHBOR_K);
        Self {
            explosion: Box::new(move |pop, params, rng| {
                default_explosion(pop, params, rng, &neighbors)
            }),
            mutation: Box::new(default_mutation),
            selection: Box::new(default_selection),
        }
    }
}

/// Per-city nearest neighbors plus raw edge lengths, precomputed once per
/// instance and shared by every explosion call.
#[derive(Debug, Clone)]
pub struct NeighborTable {
    coords: Vec<(f64, f64)>,
    lists: Vec<Vec<usize>>,
}

impl NeighborTable {
    pub fn build(inst: &TspInstance, k: usize) -> Self {
        let n = inst.dimension;
        let lists = (0..n)
            .map(|i| {
                let mut idx: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                idx.sort_by(|&a, &b| {
                    let da = Self::dist(&inst.coords, i, a);
                    let db = Self::dist(&inst.coords, i, b);
                    da.partial_cmp(&db).unwrap().then(a.cmp(&b))
                });
                idx.truncate(k.min(n.saturating_sub(1)));
                idx
            })
            .collect();
        Self {
            coords: inst.coords.clone(),
            lists,
        }
    }

    fn dist(coords: &[(f64, f64)], a: usize, b: usize) -> f64 {
        (coords[a].0 - coords[b].0).hypot(coords[a].1 - coords[b].1)
    }

    fn edge_len(&self, a: usize, b: usize) -> f64 {
        Self::dist(&self.coords, a, b)
    }

    fn neighbors(&self, city: usize) -> &[usize] {
        &self.lists[city]
    }
}

/// Fitness ranks, best (lowest fitness) first; ties by creation order.
fn fitness_ranks(population: &[Firework]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..population.len()).collect();
    idx.sort_by(|&a, &b| {
        population[a]
            .fitness
            .partial_cmp(&population[b].fitness)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut rank = vec![0usize; population.len()];
    for (r, &i) in idx.iter().enumerate() {
        rank[i] = r;
    }
    rank
}

/// Spark counts for the whole population: `max(1, round(budget * w_i / W))`
/// with `w_i = f_max - f_i + eps`, adjusted to sum exactly to the budget by
/// trimming the worst fireworks and topping up the best ones.
fn spark_allocation(population: &[Firework], budget: usize, ranks: &[usize]) -> Vec<usize> {
    let f_max = population
        .iter()
        .map(|f| f.fitness)
        .fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = population
        .iter()
        .map(|f| f_max - f.fitness + FITNESS_EPS)
        .collect();
    let total_w: f64 = weights.iter().sum();
    let mut alloc: Vec<usize> = weights
        .iter()
        .map(|w| ((budget as f64 * w / total_w).round() as usize).max(1))
        .collect();

    let mut by_rank: Vec<usize> = (0..population.len()).collect();
    by_rank.sort_by_key(|&i| ranks[i]);
    let mut total: usize = alloc.iter().sum();
    while total > budget {
        for &i in by_rank.iter().rev() {
            if total == budget {
                break;
            }
            if alloc[i] > 0 {
                alloc[i] -= 1;
                total -= 1;
            }
        }
    }
    while total < budget {
        for &i in by_rank.iter() {
            if total == budget {
                break;
            }
            alloc[i] += 1;
            total += 1;
        }
    }
    alloc
}

/// Maximum reversal length for a firework: from about n/2 for the best
/// rank up to the whole tour for the worst (the amplitude analogue).
fn reversal_cap(rank: usize, pop: usize, n: usize) -> usize {
    let span = n as f64 / 2.0;
    let cap = span + span * (rank + 1) as f64 / pop as f64;
    (cap as usize).clamp(2, n - 1)
}

/// Rank-proportional spark allocation plus one random 2-opt reversal per
/// spark. Fitter fireworks get more sparks and a shorter maximum reversal.
/// Most reversals are steered: the first cut falls on a tour edge drawn by
/// length-roulette and reconnects to a spatial near neighbor, which keeps
/// random sparks productive on metric instances.
pub fn default_explosion(
    population: &[Firework],
    params: &FwaParams,
    rng: &mut ChaCha8Rng,
    neighbors: &NeighborTable,
) -> Result<Vec<Tour>, FwaError> {
    if population.is_empty() {
        return Err(FwaError::EmptyPopulation);
    }
    let ranks = fitness_ranks(population);
    let alloc = spark_allocation(population, params.spark_budget, &ranks);

    let pop_count = population.len();
    let mut sparks = Vec::with_capacity(params.spark_budget);
    let mut position = vec![0usize; neighbors.coords.len()];
    for (i, fw) in population.iter().enumerate() {
        let n = fw.tour.len();
        if alloc[i] == 0 {
            continue;
        }
        let cap = reversal_cap(ranks[i], pop_count, n);
        let order = &fw.tour.order;
        for (p, &city) in order.iter().enumerate() {
            position[city] = p;
        }
        let edge_lens: Vec<f64> = (0..n)
            .map(|k| neighbors.edge_len(order[k], order[(k + 1) % n]))
            .collect();
        let edge_total: f64 = edge_lens.iter().sum();

        for _ in 0..alloc[i] {
            let mut child = order.clone();
            let mut reversed = false;
            if edge_total > 0.0 && rng.random::<f64>() < GUIDED_FRACTION {
                // Cut a tour edge drawn by length-roulette, then try to
                // reconnect its tail to one of the city's near neighbors.
                let mut pick = rng.random::<f64>() * edge_total;
                let mut cut = n - 1;
                for (k, len) in edge_lens.iter().enumerate() {
                    pick -= len;
                    if pick < 0.0 {
                        cut = k;
                        break;
                    }
                }
                // Roulette over the feasible reconnections, weighted by the
                // edge-length gain of the implied reversal (non-improving
                // candidates keep a tiny floor weight).
                let list = neighbors.neighbors(order[cut]);
                let mut feasible: Vec<(usize, usize, f64)> = Vec::with_capacity(list.len());
                let mut weight_total = 0.0;
                for &target in list {
                    let j = position[target];
                    let (lo, hi) = if j < cut { (j, cut) } else { (cut, j) };
                    let seg = hi - lo;
                    if seg < 2 || seg > cap {
                        continue;
                    }
                    let gain = neighbors.edge_len(order[lo], order[(lo + 1) % n])
                        + neighbors.edge_len(order[hi], order[(hi + 1) % n])
                        - neighbors.edge_len(order[lo], order[hi])
                        - neighbors.edge_len(order[(lo + 1) % n], order[(hi + 1) % n]);
                    let weight = gain.max(0.0) + FITNESS_EPS;
                    weight_total += weight;
                    feasible.push((lo, hi, weight));
                }
                if !feasible.is_empty() {
                    let mut pick = rng.random::<f64>() * weight_total;
                    let mut chosen = feasible.len() - 1;
                    for (idx, (_, _, w)) in feasible.iter().enumerate() {
                        pick -= w;
                        if pick < 0.0 {
                            chosen = idx;
                            break;
                        }
                    }
                    let (lo, hi, _) = feasible[chosen];
                    child[lo + 1..=hi].reverse();
                    reversed = true;
                }
            }
            if !reversed {
                let len = rng.random_range(2..=cap.min(n - 1));
                let start = rng.random_range(0..=n - len);
                child[start..start + len].reverse();
            }
            sparks.push(Tour::new(child));
        }
    }
    Ok(sparks)
}

/// Or-opt move: relocate a random block of 1-3 consecutive cities to a
/// different position. The output always differs from the input.
pub fn default_mutation(fw: &Firework, rng: &mut ChaCha8Rng) -> Result<Tour, FwaError> {
    let n = fw.tour.len();
    if n < 4 {
        return Err(FwaError::TooShort(n));
    }
    let block_len = rng.random_range(1..=3usize.min(n - 2));
    let start = rng.random_range(0..=n - block_len);
    let mut rest = fw.tour.order.clone();
    let block: Vec<usize> = rest.drain(start..start + block_len).collect();
    // Reinserting at the original position would reproduce the input.
    let slots = rest.len(); // valid insertion points: 0..=slots, minus `start`
    let pick = rng.random_range(0..slots);
    let insert_at = if pick >= start { pick + 1 } else { pick };
    for (offset, city) in block.into_iter().enumerate() {
        rest.insert(insert_at + offset, city);
    }
    Ok(Tour::new(rest))
}

/// Positions at which two equal-length tours disagree.
pub fn position_disagreement(a: &Tour, b: &Tour) -> usize {
    a.order
        .iter()
        .zip(&b.order)
        .filter(|(x, y)| x != y)
        .count()
}

/// Elitist + diversity selection: the single best survives, the rest are
/// drawn without replacement with probability proportional to their mean
/// position-disagreement from the already-selected members.
pub fn default_selection(
    candidates: &[Firework],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Firework>, FwaError> {
    if candidates.len() < k {
        return Err(FwaError::NotEnoughCandidates {
            wanted: k,
            available: candidates.len(),
        });
    }
    let mut best = 0usize;
    for i in 1..candidates.len() {
        if candidates[i].fitness < candidates[best].fitness {
            best = i;
        }
    }
    let mut selected_idx = vec![best];
    let mut remaining: Vec<usize> = (0..candidates.len()).filter(|&i| i != best).collect();

    while selected_idx.len() < k {
        let weights: Vec<f64> = remaining
            .iter()
            .map(|&j| {
                let sum: usize = selected_idx
                    .iter()
                    .map(|&s| position_disagreement(&candidates[j].tour, &candidates[s].tour))
                    .sum();
                sum as f64 / selected_idx.len() as f64
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let pick = if total <= 0.0 {
            rng.random_range(0..remaining.len())
        } else {
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = remaining.len() - 1;
            for (slot, w) in weights.iter().enumerate() {
                acc += w;
                if u < acc {
                    chosen = slot;
                    break;
                }
            }
            chosen
        };
        selected_idx.push(remaining.remove(pick));
    }

    Ok(selected_idx
        .into_iter()
        .map(|i| candidates[i].clone())
        .collect())
}

/// Result of a fireworks run: the best tour ever evaluated plus the
/// per-generation best-so-far monitor sequence.
#[derive(Debug, Clone)]
pub struct FwaRun {
    pub best_tour: Tour,
    pub best_length: f64,
    pub evals: u64,
    pub best_per_generation: Vec<f64>,
}

/// Run the fireworks loop until the evaluation budget is consumed.
/// Fully deterministic for a fixed `rng_seed` and deterministic suite.
pub fn run_fwa(
    inst: &TspInstance,
    params: &FwaParams,
    suite: &mut OperatorSuite,
) -> Result<FwaRun, FwaError> {
    if params.eval_budget < params.population_size as u64 {
        return Err(FwaError::BudgetTooSmall {
            budget: params.eval_budget,
            population: params.population_size,
        });
    }
    let n = inst.dimension;
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);

    let evaluate = |order: Vec<usize>| -> Result<Firework, FwaError> {
        let tour = Tour::new(order);
        let fitness = tour_length(inst, &tour, params.mode)?;
        Ok(Firework { tour, fitness })
    };

    let mut population = Vec::with_capacity(params.population_size);
    for _ in 0..params.population_size {
        let mut order: Vec<usize> = (0..n).collect();
        // Fisher-Yates
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            order.swap(i, j);
        }
        population.push(evaluate(order)?);
    }
    let mut evals = params.population_size as u64;
    let eval_cap = params.eval_budget + params.population_size as u64;

    let mut best = population
        .iter()
        .min_by(|a, b| a.fitness.partial_cmp(&b.fitness).unwrap())
        .cloned()
        .expect("population is nonempty");
    let mut history = vec![best.fitness];

    while evals < params.eval_budget {
        let sparks = (suite.explosion)(&population, params, &mut rng)?;
        for s in &sparks {
            if !s.is_permutation_of(n) {
                return Err(FwaError::InvalidPermutation {
                    operator: "explosion",
                });
            }
        }
        let mut mutated = Vec::with_capacity(params.mutation_sparks);
        if n >= 4 {
            let best_idx = population
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| a.fitness.partial_cmp(&b.fitness).unwrap())
                .map(|(i, _)| i)
                .unwrap_or(0);
            for m in 0..params.mutation_sparks {
                // Or-opt relocations complement the explosion's reversals;
                // half of them work the incumbent, the rest explore.
                let parent = if m % 2 == 0 {
                    &population[best_idx]
                } else {
                    &population[rng.random_range(0..population.len())]
                };
                let t = (suite.mutation)(parent, &mut rng)?;
                if !t.is_permutation_of(n) {
                    return Err(FwaError::InvalidPermutation {
                        operator: "mutation",
                    });
                }
                mutated.push(t);
            }
        }

        let allowance = (eval_cap - evals) as usize;
        let mut candidates = population.clone();
        for tour in sparks
            .into_iter()
            .chain(mutated)
            .take(allowance)
        {
            let fw = evaluate(tour.order)?;
            evals += 1;
            if fw.fitness < best.fitness {
                best = fw.clone();
            }
            candidates.push(fw);
        }

        population = (suite.selection)(&candidates, params.population_size, &mut rng)?;
        if population.len() != params.population_size {
            return Err(FwaError::InvalidPermutation {
                operator: "selection",
            });
        }
        for fw in &population {
            if !fw.tour.is_permutation_of(n) {
                return Err(FwaError::InvalidPermutation {
                    operator: "selection",
                });
            }
        }
        history.push(best.fitness);
    }

    Ok(FwaRun {
        best_tour: best.tour,
        best_length: best.fitness,
        evals,
        best_per_generation: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tsp::TspInstance;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn ring(n: usize) -> TspInstance {
        let coords = (0..n)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                (100.0 * a.cos(), 100.0 * a.sin())
            })
            .collect();
        TspInstance::new("ring", coords)
    }

    fn fw(order: Vec<usize>, fitness: f64) -> Firework {
        Firework {
            tour: Tour::new(order),
            fitness,
        }
    }

    #[test]
    fn explosion_splits_budget_evenly_on_ties() {
        let inst = ring(4);
        let table = NeighborTable::build(&inst, NEIGHBOR_K);
        let pop = vec![fw(vec![0, 1, 2, 3], 10.0), fw(vec![1, 0, 2, 3], 10.0)];
        let params = FwaParams {
            spark_budget: 10,
            ..FwaParams::default()
        };
        let sparks = default_explosion(&pop, &params, &mut rng(1), &table).unwrap();
        assert_eq!(sparks.len(), 10);
        let alloc = spark_allocation(&pop, 10, &fitness_ranks(&pop));
        assert_eq!(alloc, vec![5, 5]);
    }

    #[test]
    fn explosion_single_firework_gets_everything() {
        let inst = ring(5);
        let table = NeighborTable::build(&inst, NEIGHBOR_K);
        let pop = vec![fw(vec![0, 1, 2, 3, 4], 10.0)];
        let params = FwaParams {
            spark_budget: 12,
            ..FwaParams::default()
        };
        let sparks = default_explosion(&pop, &params, &mut rng(2), &table).unwrap();
        assert_eq!(sparks.len(), 12);
        for s in sparks {
            assert!(s.is_permutation_of(5));
        }
    }

    #[test]
    fn explosion_best_gets_at_least_as_many_as_worst() {
        let pop = vec![
            fw((0..8).collect(), 5.0),
            fw((0..8).rev().collect(), 50.0),
            fw((0..8).map(|i| (i + 3) % 8).collect(), 20.0),
        ];
        let alloc = spark_allocation(&pop, 10, &fitness_ranks(&pop));
        assert_eq!(alloc.iter().sum::<usize>(), 10);
        assert!(alloc[0] >= alloc[2]);
        assert!(alloc[2] >= alloc[1]);
    }

    #[test]
    fn reversal_cap_shrinks_with_rank() {
        for n in [8usize, 51, 200] {
            let caps: Vec<usize> = (0..8).map(|r| reversal_cap(r, 8, n)).collect();
            for w in caps.windows(2) {
                assert!(w[0] <= w[1], "caps not monotone: {caps:?}");
            }
            assert!(caps[7] < n);
            assert!(caps[0] >= 2);
        }
    }

    #[test]
    fn explosion_rejects_empty_population() {
        let inst = ring(4);
        let table = NeighborTable::build(&inst, NEIGHBOR_K);
        let params = FwaParams::default();
        assert!(matches!(
            default_explosion(&[], &params, &mut rng(0), &table),
            Err(FwaError::EmptyPopulation)
        ));
    }

    #[test]
    fn mutation_outputs_valid_and_different() {
        let base = fw(vec![0, 1, 2, 3], 1.0);
        for seed in 0..50 {
            let out = default_mutation(&base, &mut rng(seed)).unwrap();
            assert!(out.is_permutation_of(4));
            assert_ne!(out, base.tour);
        }
    }

    #[test]
    fn mutation_is_deterministic_under_seed() {
        let base = fw((0..12).collect(), 1.0);
        let a = default_mutation(&base, &mut rng(7)).unwrap();
        let b = default_mutation(&base, &mut rng(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mutation_rejects_short_tours() {
        let base = fw(vec![0, 1, 2], 1.0);
        assert!(matches!(
            default_mutation(&base, &mut rng(0)),
            Err(FwaError::TooShort(3))
        ));
    }

    #[test]
    fn selection_keeps_best_and_size() {
        let cands = vec![
            fw(vec![0, 1, 2, 3], 9.0),
            fw(vec![1, 0, 2, 3], 3.0),
            fw(vec![2, 1, 0, 3], 5.0),
            fw(vec![3, 1, 2, 0], 7.0),
        ];
        let out = default_selection(&cands, 2, &mut rng(4)).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out.iter().any(|f| f.fitness == 3.0));
    }

    #[test]
    fn selection_exhausts_all_candidates() {
        let cands = vec![
            fw(vec![0, 1, 2, 3], 9.0),
            fw(vec![1, 0, 2, 3], 3.0),
            fw(vec![2, 1, 0, 3], 5.0),
        ];
        let out = default_selection(&cands, 3, &mut rng(5)).unwrap();
        assert_eq!(out.len(), 3);
        let mut fits: Vec<f64> = out.iter().map(|f| f.fitness).collect();
        fits.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(fits, vec![3.0, 5.0, 9.0]);
    }

    #[test]
    fn selection_rejects_underfull() {
        let cands = vec![fw(vec![0, 1, 2, 3], 9.0)];
        assert!(matches!(
            default_selection(&cands, 2, &mut rng(0)),
            Err(FwaError::NotEnoughCandidates { .. })
        ));
    }

    #[test]
    fn run_is_deterministic_and_monotone() {
        let inst = ring(12);
        let params = FwaParams {
            eval_budget: 2_000,
            rng_seed: 11,
            ..FwaParams::default()
        };
        let a = run_fwa(&inst, &params, &mut OperatorSuite::reference(&inst)).unwrap();
        let b = run_fwa(&inst, &params, &mut OperatorSuite::reference(&inst)).unwrap();
        assert_eq!(a.best_tour, b.best_tour);
        assert_eq!(a.best_length, b.best_length);
        for w in a.best_per_generation.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert!(a.evals <= params.eval_budget + params.population_size as u64);
    }

    #[test]
    fn budget_equal_to_population_evaluates_initial_only() {
        let inst = ring(10);
        let params = FwaParams {
            eval_budget: 8,
            population_size: 8,
            rng_seed: 3,
            ..FwaParams::default()
        };
        let run = run_fwa(&inst, &params, &mut OperatorSuite::reference(&inst)).unwrap();
        assert_eq!(run.evals, 8);
        assert_eq!(run.best_per_generation.len(), 1);
    }

    #[test]
    fn budget_too_small_rejected() {
        let inst = ring(10);
        let params = FwaParams {
            eval_budget: 4,
            population_size: 8,
            ..FwaParams::default()
        };
        assert!(matches!(
            run_fwa(&inst, &params, &mut OperatorSuite::reference(&inst)),
            Err(FwaError::BudgetTooSmall { .. })
        ));
    }

    #[test]
    fn null_suite_terminates_within_budget() {
        // Operators that do as little as their contracts allow.
        let mut suite = OperatorSuite {
            explosion: Box::new(|pop: &[Firework], params: &FwaParams, _rng: &mut ChaCha8Rng| {
                Ok((0..params.spark_budget)
                    .map(|i| pop[i % pop.len()].tour.clone())
                    .collect())
            }),
            mutation: Box::new(|fw: &Firework, _rng: &mut ChaCha8Rng| {
                let mut order = fw.tour.order.clone();
                order.swap(0, 1);
                Ok(Tour::new(order))
            }),
            selection: Box::new(|cands: &[Firework], k: usize, _rng: &mut ChaCha8Rng| {
                Ok(cands[..k].to_vec())
            }),
        };
        let inst = ring(8);
        let params = FwaParams {
            eval_budget: 500,
            rng_seed: 9,
            ..FwaParams::default()
        };
        let run = run_fwa(&inst, &params, &mut suite).unwrap();
        assert!(run.evals <= params.eval_budget + params.population_size as u64);
    }

    #[test]
    fn bad_operator_output_names_the_operator() {
        let inst = ring(8);
        let mut suite = OperatorSuite::reference(&inst);
        suite.mutation = Box::new(|fw: &Firework, _rng: &mut ChaCha8Rng| {
            let mut order = fw.tour.order.clone();
            order[0] = order[1]; // duplicate index
            Ok(Tour::new(order))
        });
        let params = FwaParams {
            eval_budget: 100,
            rng_seed: 1,
            ..FwaParams::default()
        };
        match run_fwa(&inst, &params, &mut suite) {
            Err(FwaError::InvalidPermutation { operator }) => assert_eq!(operator, "mutation"),
            other => panic!("expected InvalidPermutation, got {other:?}"),
        }
    }
}
