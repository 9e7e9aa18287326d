//! Genetic programming over expression-tree G-heuristics.

pub mod individual;
pub mod ops;
pub mod primitives;
pub mod tree;

pub use individual::{ExprIndividual, MAX_DEPTH};
pub use ops::{init_population, point_mutate, random_tree, subtree_crossover, tournament_select, GpParams};
pub use primitives::{EdgeContext, Function, Symbol, Terminal};
pub use tree::ExprTree;
