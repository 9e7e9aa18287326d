//! Population initialisation and the genetic operators.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::individual::{ExprIndividual, MAX_DEPTH};
use super::primitives::{Function, Symbol, Terminal, EPHEMERAL_MAX};
use super::tree::ExprTree;
use crate::error::{contract, Result};

/// Depth-violating crossovers are retried this many times.
pub const CROSSOVER_ATTEMPTS: usize = 10;
/// Shallowest tree produced by [`init_population`].
pub const MIN_INIT_DEPTH: usize = 2;

/// Evolution parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GpParams {
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub tournament_size: usize,
    pub max_depth: usize,
}

impl Default for GpParams {
    fn default() -> Self {
        GpParams {
            population: 1500,
            generations: 100,
            crossover_rate: 0.8,
            mutation_rate: 0.1,
            tournament_size: 5,
            max_depth: MAX_DEPTH,
        }
    }
}

impl GpParams {
    /// Small run that fits on a desktop.
    pub fn desk() -> Self {
        GpParams { population: 30, generations: 8, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(contract("population must hold at least 2 individuals"));
        }
        if self.generations == 0 {
            return Err(contract("at least one generation is required"));
        }
        if self.tournament_size == 0 {
            return Err(contract("tournament size must be positive"));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) || !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(contract("rates must lie in [0, 1]"));
        }
        if self.max_depth < MIN_INIT_DEPTH || self.max_depth > MAX_DEPTH {
            return Err(contract(format!("max depth must lie in [{MIN_INIT_DEPTH}, {MAX_DEPTH}]")));
        }
        Ok(())
    }
}

fn random_terminal<R: Rng + ?Sized>(rng: &mut R) -> Symbol {
    let i = rng.gen_range(0..=Terminal::ALL.len());
    match Terminal::ALL.get(i) {
        Some(t) => Symbol::Term(*t),
        None => Symbol::Const(rng.gen_range(0.0..=EPHEMERAL_MAX)),
    }
}

fn random_function<R: Rng + ?Sized>(rng: &mut R) -> Function {
    *Function::ALL.choose(rng).expect("function set is non-empty")
}

fn grow<R: Rng + ?Sized>(rng: &mut R, depth: usize, height: usize, full: bool, out: &mut Vec<Symbol>) {
    let n_term = Terminal::ALL.len() + 1;
    let n_func = Function::ALL.len();
    let leaf = depth == height
        || (!full && depth >= MIN_INIT_DEPTH && rng.gen_bool(n_term as f64 / (n_term + n_func) as f64));
    if leaf {
        out.push(random_terminal(rng));
        return;
    }
    let f = random_function(rng);
    out.push(Symbol::Func(f));
    for _ in 0..f.arity() {
        grow(rng, depth + 1, height, full, out);
    }
}

/// Random tree of depth exactly `height` (`full`) or between
/// `MIN_INIT_DEPTH` and `height` (grow).
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, height: usize, full: bool) -> ExprTree {
    let mut nodes = Vec::new();
    grow(rng, 0, height, full, &mut nodes);
    ExprTree::from_prefix_unchecked(nodes)
}

/// Ramped half-and-half over depths `MIN_INIT_DEPTH..=max_depth`.
pub fn init_population<R: Rng + ?Sized>(size: usize, max_depth: usize, rng: &mut R) -> Result<Vec<ExprIndividual>> {
    if size < 2 {
        return Err(contract("population must hold at least 2 individuals"));
    }
    let max_depth = max_depth.clamp(MIN_INIT_DEPTH, MAX_DEPTH);
    let ramp = max_depth - MIN_INIT_DEPTH + 1;
    Ok((0..size)
        .map(|i| {
            let full = i % 2 == 0;
            let height = MIN_INIT_DEPTH + (i / 2) % ramp;
            ExprIndividual {
                primary: random_tree(rng, height, full),
                tiebreak: random_tree(rng, height, full),
                fitness: None,
            }
        })
        .collect())
}

/// Index of the tournament winner among `k` draws with replacement.
/// Lowest fitness wins, then smaller size, then earlier draw.
pub fn tournament_select<R: Rng + ?Sized>(population: &[ExprIndividual], k: usize, rng: &mut R) -> Result<usize> {
    if population.is_empty() || k == 0 {
        return Err(contract("tournament needs a non-empty pool and k >= 1"));
    }
    if population.iter().any(|ind| ind.fitness.is_none()) {
        return Err(contract("tournament pool contains an unevaluated individual"));
    }
    let score = |i: usize| (population[i].fitness.unwrap_or(f64::INFINITY), population[i].size());
    let mut best = rng.gen_range(0..population.len());
    for _ in 1..k {
        let cand = rng.gen_range(0..population.len());
        let (fc, sc) = score(cand);
        let (fb, sb) = score(best);
        if fc.total_cmp(&fb).then(sc.cmp(&sb)).is_lt() {
            best = cand;
        }
    }
    Ok(best)
}

fn cross_tree<R: Rng + ?Sized>(a: &ExprTree, b: &ExprTree, max_depth: usize, rng: &mut R) -> ExprTree {
    // Material swapped between identical trees changes nothing.
    if a == b {
        return a.clone();
    }
    for _ in 0..CROSSOVER_ATTEMPTS {
        let i = rng.gen_range(0..a.size());
        let j = rng.gen_range(0..b.size());
        let child = a.splice(i, b, j);
        if child.depth() <= max_depth {
            return child;
        }
    }
    a.clone()
}

/// Child of `p1` with, per component and with probability `rate`, one
/// subtree replaced by a subtree of `p2`.
pub fn subtree_crossover<R: Rng + ?Sized>(
    p1: &ExprIndividual,
    p2: &ExprIndividual,
    rate: f64,
    max_depth: usize,
    rng: &mut R,
) -> ExprIndividual {
    let primary = if rng.gen_bool(rate) {
        cross_tree(&p1.primary, &p2.primary, max_depth, rng)
    } else {
        p1.primary.clone()
    };
    let tiebreak = if rng.gen_bool(rate) {
        cross_tree(&p1.tiebreak, &p2.tiebreak, max_depth, rng)
    } else {
        p1.tiebreak.clone()
    };
    let unchanged = primary == p1.primary && tiebreak == p1.tiebreak;
    ExprIndividual {
        primary,
        tiebreak,
        fitness: if unchanged { p1.fitness } else { None },
    }
}

fn mutate_tree<R: Rng + ?Sized>(tree: &mut ExprTree, rate: f64, rng: &mut R) -> bool {
    let mut changed = false;
    for node in tree.nodes_mut() {
        if !rng.gen_bool(rate) {
            continue;
        }
        let replacement = match *node {
            Symbol::Func(f) => {
                let pool: &[Function] = if f.arity() == 1 { &Function::UNARY } else { &Function::BINARY };
                Symbol::Func(*pool.choose(rng).expect("arity pools are non-empty"))
            }
            _ => random_terminal(rng),
        };
        changed |= replacement != *node;
        *node = replacement;
    }
    changed
}

/// Replaces each node with probability `rate` by a primitive of equal
/// arity. Shape is preserved.
pub fn point_mutate<R: Rng + ?Sized>(ind: &ExprIndividual, rate: f64, rng: &mut R) -> ExprIndividual {
    let mut out = ind.clone();
    let a = mutate_tree(&mut out.primary, rate, rng);
    let b = mutate_tree(&mut out.tiebreak, rate, rng);
    if a || b {
        out.fitness = None;
    }
    out
}
