//! Prefix-encoded expression trees and their S-expression text form.

use std::fmt;
use std::str::FromStr;

use super::primitives::{sanitize, EdgeContext, Symbol};
use crate::error::{Error, Result};

/// An expression tree stored in prefix order. A subtree rooted at node `i`
/// occupies the contiguous range `i..subtree_end(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprTree {
    nodes: Vec<Symbol>,
}

impl ExprTree {
    /// Wraps a prefix sequence, rejecting anything that is not exactly one
    /// complete tree.
    pub fn from_prefix(nodes: Vec<Symbol>) -> Result<Self> {
        let tree = ExprTree { nodes };
        tree.validate()?;
        Ok(tree)
    }

    pub(crate) fn from_prefix_unchecked(nodes: Vec<Symbol>) -> Self {
        ExprTree { nodes }
    }

    pub fn nodes(&self) -> &[Symbol] {
        &self.nodes
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn validate(&self) -> Result<()> {
        let mut open = 1usize;
        for (i, s) in self.nodes.iter().enumerate() {
            if open == 0 {
                return Err(Error::Expression(format!("trailing symbols from position {i}")));
            }
            if let Symbol::Const(c) = s {
                if !c.is_finite() {
                    return Err(Error::Expression("non-finite constant".into()));
                }
            }
            open = open - 1 + s.arity();
        }
        if open != 0 {
            return Err(Error::Expression("incomplete expression".into()));
        }
        Ok(())
    }

    /// One past the last node of the subtree rooted at `i`.
    pub fn subtree_end(&self, i: usize) -> usize {
        let mut open = 1usize;
        let mut j = i;
        while open > 0 {
            open = open - 1 + self.nodes[j].arity();
            j += 1;
        }
        j
    }

    /// Depth of the deepest node; a lone terminal has depth 0.
    pub fn depth(&self) -> usize {
        let mut pending: Vec<usize> = Vec::new();
        let mut max = 0;
        let mut depth = 0;
        for s in &self.nodes {
            max = max.max(depth);
            let arity = s.arity();
            if arity > 0 {
                pending.push(arity);
                depth += 1;
            } else {
                while let Some(top) = pending.last_mut() {
                    *top -= 1;
                    if *top > 0 {
                        break;
                    }
                    pending.pop();
                    depth -= 1;
                }
            }
        }
        max
    }

    /// Depth of node `i` below the root.
    pub fn node_depth(&self, i: usize) -> usize {
        let mut pending: Vec<usize> = Vec::new();
        for s in &self.nodes[..i] {
            let arity = s.arity();
            if arity > 0 {
                pending.push(arity);
            } else {
                while let Some(top) = pending.last_mut() {
                    *top -= 1;
                    if *top > 0 {
                        break;
                    }
                    pending.pop();
                }
            }
        }
        pending.len()
    }

    /// Evaluates the tree. Always finite for a finite context.
    pub fn eval(&self, ctx: &EdgeContext) -> f64 {
        self.eval_at(0, ctx).0
    }

    fn eval_at(&self, i: usize, ctx: &EdgeContext) -> (f64, usize) {
        match self.nodes[i] {
            Symbol::Term(t) => (sanitize(ctx.get(t)), i + 1),
            Symbol::Const(c) => (sanitize(c), i + 1),
            Symbol::Func(f) => {
                let (a, next) = self.eval_at(i + 1, ctx);
                if f.arity() == 1 {
                    (f.apply(a, 0.0), next)
                } else {
                    let (b, end) = self.eval_at(next, ctx);
                    (f.apply(a, b), end)
                }
            }
        }
    }

    /// Replaces the subtree at `i` with `donor`'s subtree at `j`.
    pub fn splice(&self, i: usize, donor: &ExprTree, j: usize) -> ExprTree {
        let end_i = self.subtree_end(i);
        let end_j = donor.subtree_end(j);
        let mut nodes = Vec::with_capacity(self.nodes.len() - (end_i - i) + (end_j - j));
        nodes.extend_from_slice(&self.nodes[..i]);
        nodes.extend_from_slice(&donor.nodes[j..end_j]);
        nodes.extend_from_slice(&self.nodes[end_i..]);
        ExprTree { nodes }
    }

    pub(crate) fn nodes_mut(&mut self) -> &mut [Symbol] {
        &mut self.nodes
    }

    fn write_at(&self, i: usize, out: &mut String) -> usize {
        let s = self.nodes[i];
        match s {
            Symbol::Func(f) => {
                out.push('(');
                out.push_str(f.name());
                let mut next = i + 1;
                for _ in 0..f.arity() {
                    out.push(' ');
                    next = self.write_at(next, out);
                }
                out.push(')');
                next
            }
            _ => {
                out.push_str(&s.to_string());
                i + 1
            }
        }
    }
}

impl fmt::Display for ExprTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.write_at(0, &mut out);
        f.write_str(&out)
    }
}

impl FromStr for ExprTree {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let spaced = text.replace('(', " ( ").replace(')', " ) ");
        let tokens: Vec<&str> = spaced.split_whitespace().collect();
        let mut nodes = Vec::new();
        let mut pos = 0;
        parse_node(&tokens, &mut pos, &mut nodes)?;
        if pos != tokens.len() {
            return Err(Error::Expression(format!("unexpected `{}` after expression", tokens[pos])));
        }
        ExprTree::from_prefix(nodes)
    }
}

fn parse_node(tokens: &[&str], pos: &mut usize, out: &mut Vec<Symbol>) -> Result<()> {
    let tok = *tokens
        .get(*pos)
        .ok_or_else(|| Error::Expression("unexpected end of expression".into()))?;
    *pos += 1;
    if tok == ")" {
        return Err(Error::Expression("unbalanced `)`".into()));
    }
    if tok != "(" {
        let sym: Symbol = tok.parse()?;
        if sym.arity() != 0 {
            return Err(Error::Expression(format!("operator `{tok}` must be parenthesised")));
        }
        out.push(sym);
        return Ok(());
    }
    let head = *tokens
        .get(*pos)
        .ok_or_else(|| Error::Expression("unexpected end of expression".into()))?;
    *pos += 1;
    let sym: Symbol = head.parse()?;
    let Symbol::Func(f) = sym else {
        return Err(Error::Expression(format!("`{head}` is not an operator")));
    };
    out.push(sym);
    for _ in 0..f.arity() {
        parse_node(tokens, pos, out)?;
    }
    match tokens.get(*pos) {
        Some(&")") => {
            *pos += 1;
            Ok(())
        }
        _ => Err(Error::Expression(format!("`{head}` takes {} operands", f.arity()))),
    }
}
