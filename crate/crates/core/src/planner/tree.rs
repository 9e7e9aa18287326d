//! Search trees over sample-store vertex ids.

use std::collections::VecDeque;

use rustc_hash::FxHashSet;

use crate::error::{contract, Result};

/// A forest of vertices keyed by sample-store id, with a cost label and an
/// effort label accumulated from the roots.
///
/// Re-parenting a vertex recomputes the labels of its whole subtree, so
/// `cost(v) == cost(parent(v)) + edge_cost(v)` holds after every call.
#[derive(Debug, Clone, Default)]
pub struct SearchTree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    cost: Vec<f64>,
    effort: Vec<f64>,
    edge_cost: Vec<f64>,
    edge_effort: Vec<f64>,
    members: Vec<bool>,
    count: usize,
}

impl SearchTree {
    pub fn new() -> Self {
        Self::default()
    }

    /// Grows the per-vertex tables to hold ids `0..len`.
    pub fn ensure_len(&mut self, len: usize) {
        if self.parent.len() < len {
            self.parent.resize(len, None);
            self.children.resize_with(len, Vec::new);
            self.cost.resize(len, f64::INFINITY);
            self.effort.resize(len, f64::INFINITY);
            self.edge_cost.resize(len, 0.0);
            self.edge_effort.resize(len, 0.0);
            self.members.resize(len, false);
        }
    }

    /// Empties the tree while keeping its capacity.
    pub fn clear(&mut self) {
        for v in 0..self.parent.len() {
            if self.members[v] {
                self.parent[v] = None;
                self.children[v].clear();
                self.cost[v] = f64::INFINITY;
                self.effort[v] = f64::INFINITY;
                self.members[v] = false;
            }
        }
        self.count = 0;
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.get(v).copied().unwrap_or(false)
    }

    /// Cost-to-root label, infinite for vertices outside the tree.
    pub fn cost(&self, v: usize) -> f64 {
        self.cost.get(v).copied().unwrap_or(f64::INFINITY)
    }

    /// Effort-to-root label, infinite for vertices outside the tree.
    pub fn effort(&self, v: usize) -> f64 {
        self.effort.get(v).copied().unwrap_or(f64::INFINITY)
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent.get(v).copied().flatten()
    }

    pub fn children(&self, v: usize) -> &[usize] {
        self.children.get(v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, m)| m.then_some(i))
    }

    pub fn add_root(&mut self, v: usize) {
        self.ensure_len(v + 1);
        if self.members[v] {
            self.detach(v);
        } else {
            self.members[v] = true;
            self.count += 1;
        }
        self.parent[v] = None;
        self.edge_cost[v] = 0.0;
        self.edge_effort[v] = 0.0;
        self.cost[v] = 0.0;
        self.effort[v] = 0.0;
        self.refresh_subtree(v);
    }

    fn detach(&mut self, v: usize) {
        if let Some(p) = self.parent[v].take() {
            self.children[p].retain(|&c| c != v);
        }
    }

    /// Hangs `child` below `parent`, moving it (and its subtree) if it was
    /// already in the tree. The caller guarantees `parent` is not a
    /// descendant of `child`, which holds whenever the new cost is lower.
    /// Returns the vertices whose labels changed, `child` first.
    pub fn attach(&mut self, child: usize, parent: usize, edge_cost: f64, edge_effort: f64) -> Vec<usize> {
        self.ensure_len(child.max(parent) + 1);
        debug_assert!(self.members[parent], "parent must be in the tree");
        if self.members[child] {
            self.detach(child);
        } else {
            self.members[child] = true;
            self.count += 1;
        }
        self.parent[child] = Some(parent);
        self.children[parent].push(child);
        self.edge_cost[child] = edge_cost;
        self.edge_effort[child] = edge_effort;
        self.refresh_subtree(child)
    }

    fn refresh_subtree(&mut self, v: usize) -> Vec<usize> {
        let mut touched = Vec::new();
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            if let Some(p) = self.parent[u] {
                self.cost[u] = self.cost[p] + self.edge_cost[u];
                self.effort[u] = self.effort[p] + self.edge_effort[u];
            }
            touched.push(u);
            queue.extend(self.children[u].iter().copied());
        }
        touched
    }

    /// Removes `v` and its whole subtree. Returns the removed ids.
    pub fn remove_subtree(&mut self, v: usize) -> Vec<usize> {
        if !self.contains(v) {
            return Vec::new();
        }
        self.detach(v);
        let mut removed = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            stack.append(&mut self.children[u]);
            self.parent[u] = None;
            self.cost[u] = f64::INFINITY;
            self.effort[u] = f64::INFINITY;
            self.members[u] = false;
            self.count -= 1;
            removed.push(u);
        }
        removed
    }

    /// Vertex ids from `v` up to its root, inclusive.
    pub fn branch(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            out.push(p);
            cur = p;
        }
        out
    }

    /// Checks parent/child consistency, acyclicity and label consistency.
    pub fn check_invariants(&self) -> Result<()> {
        let mut seen = 0;
        for v in self.vertices() {
            seen += 1;
            match self.parent[v] {
                None => {
                    if self.cost[v] != 0.0 {
                        return Err(contract(format!("root {v} has nonzero cost")));
                    }
                }
                Some(p) => {
                    if !self.members[p] || !self.children[p].contains(&v) {
                        return Err(contract(format!("parent link {p} -> {v} is one-sided")));
                    }
                    if self.cost[v] != self.cost[p] + self.edge_cost[v] {
                        return Err(contract(format!("cost label of {v} is stale")));
                    }
                }
            }
            for &c in &self.children[v] {
                if self.parent[c] != Some(v) {
                    return Err(contract(format!("child link {v} -> {c} is one-sided")));
                }
            }
            // Walking up must terminate within `count` steps.
            let mut cur = v;
            let mut steps = 0;
            while let Some(p) = self.parent[cur] {
                cur = p;
                steps += 1;
                if steps > self.count {
                    return Err(contract(format!("cycle through {v}")));
                }
            }
        }
        if seen != self.count {
            return Err(contract("member count out of sync"));
        }
        Ok(())
    }
}

/// Undirected set of edges known to be in collision.
#[derive(Debug, Clone, Default)]
pub struct EdgeSet {
    edges: FxHashSet<(usize, usize)>,
}

impl EdgeSet {
    fn ordered(a: usize, b: usize) -> (usize, usize) {
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Returns `true` if the edge was not present before.
    pub fn insert(&mut self, a: usize, b: usize) -> bool {
        self.edges.insert(Self::ordered(a, b))
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&Self::ordered(a, b))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}
