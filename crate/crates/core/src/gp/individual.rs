//! Candidate G-heuristics: a primary and a tiebreak expression tree.

use std::fmt;
use std::path::Path as FsPath;

use super::primitives::EdgeContext;
use super::tree::ExprTree;
use crate::error::{Error, Result};
use crate::planner::key::Key;

/// Deepest node any tree may hold, counting the root as depth 0.
pub const MAX_DEPTH: usize = 4;

/// Primary component of the evolved GIT* key.
pub const WINNER_PRIMARY: &str =
    "(MUL (SUB G_HAT_T CONST_PI) (PDIV (PLOG1P (SUB U_T U_S)) (ADD CONST_ONE W_DYN)))";
/// Tiebreak component of the evolved GIT* key.
pub const WINNER_TIEBREAK: &str =
    "(MUL (PSQRT (ADD E_BAR_S E_BAR_EDGE)) (PLOG1P (SUB (MAX D_BAR_T CONST_ONE) CONST_ONE)))";
pub const BASELINE_PRIMARY: &str = "(ADD (ADD G_HAT_T C_HAT) H_HAT_T)";
pub const BASELINE_TIEBREAK: &str = "(ADD E_BAR_S E_BAR_EDGE)";

#[derive(Debug, Clone, PartialEq)]
pub struct ExprIndividual {
    pub primary: ExprTree,
    pub tiebreak: ExprTree,
    /// Lower is better; `None` until evaluated.
    pub fitness: Option<f64>,
}

impl ExprIndividual {
    pub fn new(primary: ExprTree, tiebreak: ExprTree) -> Result<Self> {
        for tree in [&primary, &tiebreak] {
            if tree.depth() > MAX_DEPTH {
                return Err(Error::Expression(format!(
                    "tree depth {} exceeds {MAX_DEPTH}",
                    tree.depth()
                )));
            }
        }
        Ok(ExprIndividual { primary, tiebreak, fitness: None })
    }

    pub fn parse(primary: &str, tiebreak: &str) -> Result<Self> {
        Self::new(primary.parse()?, tiebreak.parse()?)
    }

    pub fn winner() -> Self {
        Self::parse(WINNER_PRIMARY, WINNER_TIEBREAK).expect("built-in winner is well formed")
    }

    pub fn baseline() -> Self {
        Self::parse(BASELINE_PRIMARY, BASELINE_TIEBREAK).expect("built-in baseline is well formed")
    }

    /// A key that ignores the edge entirely.
    pub fn constant() -> Self {
        Self::parse("CONST_ONE", "CONST_ONE").expect("constant key is well formed")
    }

    pub fn key(&self, ctx: &EdgeContext) -> Key {
        Key::new(self.primary.eval(ctx), self.tiebreak.eval(ctx))
    }

    /// Total node count of both trees.
    pub fn size(&self) -> usize {
        self.primary.size() + self.tiebreak.size()
    }

    /// Cache key identifying the genotype.
    pub fn genotype(&self) -> String {
        format!("{}\n{}", self.primary, self.tiebreak)
    }

    /// Reads the two-line heuristic text form. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn from_heuristic_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        match lines.as_slice() {
            [p, t] => Self::parse(p, t),
            _ => Err(Error::Expression(format!(
                "heuristic text needs 2 expression lines, found {}",
                lines.len()
            ))),
        }
    }

    pub fn to_heuristic_text(&self) -> String {
        format!("{}\n{}\n", self.primary, self.tiebreak)
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Self> {
        Self::from_heuristic_text(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<FsPath>) -> Result<()> {
        std::fs::write(path, self.to_heuristic_text())?;
        Ok(())
    }
}

impl fmt::Display for ExprIndividual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} | {}]", self.primary, self.tiebreak)
    }
}
