//! Steady-state genetic algorithm used as the comparison baseline.
//!
//! A chromosome is a permutation of the request indices plus `K − 1` shift
//! separators (genes `n..n+K−1`); cutting it at the separators gives the
//! routes of shifts `0..K` in order. Each generation picks two distinct
//! parents uniformly, builds one child by order crossover, relocates one
//! gene with the configured probability and lets the child replace the
//! worst individual.

use crate::config::SolverConfig;
use crate::model::Solution;
use crate::objective::Evaluator;
use crate::orchestrate::{single_phase, Algorithm, PhaseKind, RunBudget, RunOutput, Search};
use crate::rng::RngStream;
use crate::selection::Outcome;

pub type Chromosome = Vec<usize>;

/// Routes of each shift, cut at the separator genes.
pub fn decode(genes: &[usize], request_count: usize, shift_count: usize) -> Vec<Vec<usize>> {
    let mut routes = vec![Vec::new(); shift_count];
    let mut k = 0;
    for &g in genes {
        if g >= request_count {
            k += 1;
        } else {
            routes[k].push(g);
        }
    }
    routes
}

pub fn encode(routes: &[Vec<usize>], request_count: usize) -> Chromosome {
    let mut genes = Vec::with_capacity(request_count + routes.len());
    for (k, route) in routes.iter().enumerate() {
        if k > 0 {
            genes.push(request_count + k - 1);
        }
        genes.extend_from_slice(route);
    }
    genes
}

/// Order crossover: keeps `p1[i..=j]` in place and fills the other slots
/// with the remaining genes in the order they follow `j` in `p2`.
pub fn order_crossover(p1: &[usize], p2: &[usize], rng: &mut RngStream) -> Chromosome {
    let len = p1.len();
    if len < 2 {
        return p1.to_vec();
    }
    let a = rng.below(len);
    let b = rng.below(len);
    let (i, j) = (a.min(b), a.max(b));
    let mut taken = vec![false; len];
    let mut child = vec![usize::MAX; len];
    for p in i..=j {
        child[p] = p1[p];
        taken[p1[p]] = true;
    }
    let mut fill = (j + 1) % len;
    for t in 0..len {
        let g = p2[(j + 1 + t) % len];
        if taken[g] {
            continue;
        }
        child[fill] = g;
        taken[g] = true;
        fill = (fill + 1) % len;
    }
    child
}

/// Moves one random gene to a random position.
pub fn relocate(genes: &mut Chromosome, rng: &mut RngStream) {
    if genes.len() < 2 {
        return;
    }
    let from = rng.below(genes.len());
    let g = genes.remove(from);
    let to = rng.below(genes.len() + 1);
    genes.insert(to, g);
}

struct Individual {
    genes: Chromosome,
    solution: Solution,
}

pub fn run_ssga(ev: Evaluator<'_>, config: &SolverConfig, budget: &RunBudget) -> RunOutput {
    let mut search = Search::new(ev, config, budget);
    let phase = single_phase(&search, budget);
    let mut rng = search.open_phase(PhaseKind::Genetic, 0, phase);
    let n = ev.instance.request_count();
    let k = ev.instance.shift_count();
    let params = config.ga;
    let build = |genes: Chromosome| {
        let solution = Solution::from_routes(ev, decode(&genes, n, k));
        Individual { genes, solution }
    };

    let mut population = Vec::with_capacity(params.population_size);
    population.push(build(encode(&search.current.routes(), n)));
    while population.len() < params.population_size {
        let mut genes: Chromosome = (0..n + k - 1).collect();
        rng.shuffle(&mut genes);
        population.push(build(genes));
    }
    for ind in &population {
        if ind.solution.total() < search.best.total() {
            search.best = ind.solution.clone();
        }
    }

    while !search.phase_exhausted(phase) {
        let a = rng.below(population.len());
        let mut b = rng.below(population.len() - 1);
        if b >= a {
            b += 1;
        }
        let mut genes = order_crossover(&population[a].genes, &population[b].genes, &mut rng);
        if rng.chance(params.mutation_probability) {
            relocate(&mut genes, &mut rng);
        }
        let child = build(genes);
        let worst = population.iter().enumerate().fold(0, |w, (i, ind)| {
            if ind.solution.total() > population[w].solution.total() {
                i
            } else {
                w
            }
        });
        let outcome = if child.solution.total() < search.best.total() {
            Outcome::NewGlobalBest
        } else {
            Outcome::Accepted
        };
        search.conclude(child.solution.clone(), outcome, Vec::new());
        population[worst] = child;
    }
    search.close_phase();
    search.finish(Algorithm::Genetic)
}
