//! Min-priority edge queue with insertion-order tie breaking.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::key::Key;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Entry {
    key: Key,
    seq: u64,
    source: usize,
    target: usize,
}

/// Edges `(source, target)` ordered by key, then by insertion order.
#[derive(Debug, Clone, Default)]
pub struct EdgeQueue {
    heap: BinaryHeap<Reverse<Entry>>,
    next_seq: u64,
}

impl EdgeQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: Key, source: usize, target: usize) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Reverse(Entry { key, seq, source, target }));
    }

    pub fn pop(&mut self) -> Option<(Key, usize, usize)> {
        self.heap.pop().map(|Reverse(e)| (e.key, e.source, e.target))
    }

    pub fn peek_key(&self) -> Option<Key> {
        self.heap.peek().map(|Reverse(e)| e.key)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn clear(&mut self) {
        self.heap.clear();
    }
}
