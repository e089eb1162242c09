//! Logarithmic-time tracking of the globally extremal (minimal or maximal)
//! value under single-element updates.
//!
//! A brute-force scan for the poorest agent costs O(N) per trade; a
//! tournament tree brings that to O(log N) per update with an O(1) query.
//! Every slot stores the winning (key, leaf index) pair of its subtree, so
//! walking up the tree touches two adjacent nodes per level with no
//! indirection, and the walk stops as soon as a parent stops changing.
//! Ties break toward the smaller index so replayed runs are reproducible.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TreeError {
    #[error("cannot build a tree over an empty value array")]
    Empty,
    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("index {index} out of range for {n} leaves")]
    IndexOutOfRange { index: usize, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremalMode {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    key: f64,
    idx: u32,
}

/// Complete binary tournament tree over `n` keys, padded to a power-of-two
/// capacity. Padding leaves hold +inf (Min) or -inf (Max) and can never win.
///
/// Layout: `nodes[capacity + i]` is leaf `i`; `nodes[1..capacity]` are the
/// internal nodes; `nodes[1]` is the root. Slot 0 is unused.
#[derive(Debug, Clone)]
pub struct TournamentTree {
    mode: ExtremalMode,
    n: usize,
    capacity: usize,
    nodes: Vec<Node>,
}

impl TournamentTree {
    pub fn build(values: &[f64], mode: ExtremalMode) -> Result<Self, TreeError> {
        if values.is_empty() {
            return Err(TreeError::Empty);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(TreeError::NonFinite { index, value });
        }
        let capacity = values.len().next_power_of_two();
        let pad = match mode {
            ExtremalMode::Min => f64::INFINITY,
            ExtremalMode::Max => f64::NEG_INFINITY,
        };
        let mut nodes = vec![Node { key: pad, idx: 0 }; 2 * capacity];
        for (i, &v) in values.iter().enumerate() {
            nodes[capacity + i] = Node {
                key: v,
                idx: i as u32,
            };
        }
        for (i, node) in nodes.iter_mut().enumerate().skip(capacity + values.len()) {
            node.idx = (i - capacity) as u32;
        }
        let mut tree = TournamentTree {
            mode,
            n: values.len(),
            capacity,
            nodes,
        };
        for k in (1..capacity).rev() {
            tree.nodes[k] = tree.winner_of(k);
        }
        Ok(tree)
    }

    pub fn mode(&self) -> ExtremalMode {
        self.mode
    }

    pub fn n_leaves(&self) -> usize {
        self.n
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    #[inline]
    pub fn key(&self, index: usize) -> f64 {
        self.nodes[self.capacity + index].key
    }

    /// Winner of the two children of internal node `k`; the left child wins
    /// ties, which globally selects the smallest leaf index.
    ///
    /// Safety: `k` is in `1..capacity`, so `2k + 1 < 2 * capacity`.
    #[inline]
    fn winner_of(&self, k: usize) -> Node {
        let l = unsafe { *self.nodes.get_unchecked(2 * k) };
        let r = unsafe { *self.nodes.get_unchecked(2 * k + 1) };
        let r_wins = match self.mode {
            ExtremalMode::Min => r.key < l.key,
            ExtremalMode::Max => r.key > l.key,
        };
        if r_wins {
            r
        } else {
            l
        }
    }

    /// Replaces the key at `index` and restores the tree invariant by
    /// recomputing exactly the ancestors of that leaf.
    pub fn update(&mut self, index: usize, value: f64) -> Result<(), TreeError> {
        if index >= self.n {
            return Err(TreeError::IndexOutOfRange { index, n: self.n });
        }
        if !value.is_finite() {
            return Err(TreeError::NonFinite { index, value });
        }
        self.set(index, value);
        Ok(())
    }

    #[inline]
    fn refresh(&mut self, k: usize) {
        let w = self.winner_of(k);
        unsafe {
            *self.nodes.get_unchecked_mut(k) = w;
        }
    }

    /// Unchecked hot-path update; callers guarantee `index < n` and a finite
    /// value (the engine always does).
    #[inline]
    pub fn set(&mut self, index: usize, value: f64) {
        unsafe {
            self.nodes.get_unchecked_mut(self.capacity + index).key = value;
        }
        let mut k = (self.capacity + index) >> 1;
        while k >= 1 {
            self.refresh(k);
            k >>= 1;
        }
    }

    /// Updates two leaves at once, walking the two ancestor paths and
    /// merging where they meet. On neighbor trades the paths share almost
    /// every level, which roughly halves the work of two separate updates.
    #[inline]
    pub fn set_pair(&mut self, a: usize, b: usize, va: f64, vb: f64) {
        unsafe {
            self.nodes.get_unchecked_mut(self.capacity + a).key = va;
            self.nodes.get_unchecked_mut(self.capacity + b).key = vb;
        }
        let mut x = (self.capacity + a) >> 1;
        let mut y = (self.capacity + b) >> 1;
        while x != y {
            self.refresh(x);
            self.refresh(y);
            x >>= 1;
            y >>= 1;
        }
        while x >= 1 {
            self.refresh(x);
            x >>= 1;
        }
    }

    /// Root winner and its key. Constant time. (With capacity 1 slot 1 is
    /// the single leaf itself.)
    #[inline]
    pub fn query_extremal(&self) -> (usize, f64) {
        let root = self.nodes[1];
        (root.idx as usize, root.key)
    }

    /// Like [`TournamentTree::update`] but reports how many nodes (leaf plus
    /// internal) were recomputed; used to verify the O(log N) bound.
    pub fn update_counting(&mut self, index: usize, value: f64) -> Result<usize, TreeError> {
        if index >= self.n {
            return Err(TreeError::IndexOutOfRange { index, n: self.n });
        }
        if !value.is_finite() {
            return Err(TreeError::NonFinite { index, value });
        }
        self.nodes[self.capacity + index].key = value;
        let mut touched = 1;
        let mut k = (self.capacity + index) >> 1;
        while k >= 1 {
            self.refresh(k);
            touched += 1;
            k >>= 1;
        }
        Ok(touched)
    }
}

/// Linear-scan reference: arg-extremum with smallest-index tie-break.
/// Kept public so property suites can replay against the tree.
pub fn brute_force_extremal(values: &[f64], mode: ExtremalMode) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        best = match best {
            None => Some((i, v)),
            Some((bi, bv)) => {
                let wins = match mode {
                    ExtremalMode::Min => v < bv,
                    ExtremalMode::Max => v > bv,
                };
                if wins {
                    Some((i, v))
                } else {
                    Some((bi, bv))
                }
            }
        };
    }
    best
}
