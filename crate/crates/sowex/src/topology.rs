//! Interaction graphs the dynamics runs on: periodic ring, periodic square
//! lattice, Barabási–Albert scale-free graph, and the complete graph.
//!
//! Topologies are immutable after construction. Adjacency is stored in
//! compressed form (offsets + flat neighbor list) so a simulation step can
//! pick a random partner with two array lookups.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TopologyError {
    #[error("invalid size for {kind}: {reason}")]
    InvalidSize { kind: &'static str, reason: String },
    #[error("distance is not defined on a {0} topology")]
    UnsupportedDistance(&'static str),
    #[error("agent index {index} out of range for {n} agents")]
    IndexOutOfRange { index: usize, n: usize },
}

/// Which of the four interaction graphs a [`Topology`] is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyKind {
    /// 1d chain with periodic boundary condition.
    Ring,
    /// 2d square lattice with periodic boundary condition, von Neumann
    /// neighborhood. `side` is the linear extent; `n_agents = side * side`.
    Torus { side: usize },
    /// Barabási–Albert preferential attachment graph; `m` edges per added
    /// node, seeded from a complete core of `m + 1` nodes.
    Ba { m: usize },
    /// Complete graph.
    Clique,
}

impl TopologyKind {
    pub fn name(&self) -> &'static str {
        match self {
            TopologyKind::Ring => "ring",
            TopologyKind::Torus { .. } => "torus",
            TopologyKind::Ba { .. } => "ba",
            TopologyKind::Clique => "clique",
        }
    }
}

/// Immutable neighbor-list graph over `n_agents` agents, indexed `0..N-1`.
/// Torus agents are laid out row-major: index = row * side + col.
#[derive(Debug, Clone)]
pub struct Topology {
    kind: TopologyKind,
    n_agents: usize,
    offsets: Vec<u32>,
    neighbors: Vec<u32>,
}

impl Topology {
    /// Linear chain of `n >= 3` sites with periodic boundary condition;
    /// the neighbors of `i` are `i - 1` and `i + 1` modulo `n`.
    pub fn ring(n: usize) -> Result<Self, TopologyError> {
        if n < 3 {
            return Err(TopologyError::InvalidSize {
                kind: "ring",
                reason: format!("need n >= 3, got {n} (a ring of 2 duplicates a neighbor)"),
            });
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::with_capacity(2 * n);
        for i in 0..n {
            offsets.push(neighbors.len() as u32);
            neighbors.push(((i + n - 1) % n) as u32);
            neighbors.push(((i + 1) % n) as u32);
        }
        offsets.push(neighbors.len() as u32);
        Ok(Topology {
            kind: TopologyKind::Ring,
            n_agents: n,
            offsets,
            neighbors,
        })
    }

    /// Periodic square lattice of `side * side` agents with 4-neighbor
    /// (von Neumann) adjacency. Requires `side >= 3` so wraparound does not
    /// duplicate neighbors.
    pub fn torus(side: usize) -> Result<Self, TopologyError> {
        if side < 3 {
            return Err(TopologyError::InvalidSize {
                kind: "torus",
                reason: format!("need side >= 3, got {side} (wraparound duplicates neighbors)"),
            });
        }
        let n = side * side;
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::with_capacity(4 * n);
        for r in 0..side {
            for c in 0..side {
                offsets.push(neighbors.len() as u32);
                let up = (r + side - 1) % side;
                let down = (r + 1) % side;
                let left = (c + side - 1) % side;
                let right = (c + 1) % side;
                neighbors.push((up * side + c) as u32);
                neighbors.push((down * side + c) as u32);
                neighbors.push((r * side + left) as u32);
                neighbors.push((r * side + right) as u32);
            }
        }
        offsets.push(neighbors.len() as u32);
        Ok(Topology {
            kind: TopologyKind::Torus { side },
            n_agents: n,
            offsets,
            neighbors,
        })
    }

    /// Complete graph on `n >= 2` agents.
    pub fn clique(n: usize) -> Result<Self, TopologyError> {
        if n < 2 {
            return Err(TopologyError::InvalidSize {
                kind: "clique",
                reason: format!("need n >= 2, got {n}"),
            });
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::with_capacity(n * (n - 1));
        for i in 0..n {
            offsets.push(neighbors.len() as u32);
            for j in 0..n {
                if j != i {
                    neighbors.push(j as u32);
                }
            }
        }
        offsets.push(neighbors.len() as u32);
        Ok(Topology {
            kind: TopologyKind::Clique,
            n_agents: n,
            offsets,
            neighbors,
        })
    }

    /// Barabási–Albert preferential-attachment graph on `n > m` nodes.
    ///
    /// Starts from a complete core on `m + 1` nodes; each later node attaches
    /// to `m` distinct existing nodes picked with probability proportional to
    /// their current degree. The result is connected and symmetric.
    pub fn barabasi_albert<R: Rng>(n: usize, m: usize, rng: &mut R) -> Result<Self, TopologyError> {
        if m < 1 {
            return Err(TopologyError::InvalidSize {
                kind: "ba",
                reason: format!("need m >= 1, got {m}"),
            });
        }
        if n <= m {
            return Err(TopologyError::InvalidSize {
                kind: "ba",
                reason: format!("need n > m, got n={n}, m={m}"),
            });
        }
        let core = m + 1;
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        // Degree-proportional sampling via the endpoint list: every endpoint
        // of every edge appears once, so a uniform pick is degree-weighted.
        let mut endpoints: Vec<u32> = Vec::with_capacity(2 * (core * (core - 1) / 2 + m * n));
        for i in 0..core.min(n) {
            for j in (i + 1)..core {
                adj[i].push(j as u32);
                adj[j].push(i as u32);
                endpoints.push(i as u32);
                endpoints.push(j as u32);
            }
        }
        let mut targets: Vec<u32> = Vec::with_capacity(m);
        for v in core..n {
            targets.clear();
            while targets.len() < m {
                let t = endpoints[rng.random_range(0..endpoints.len())];
                if !targets.contains(&t) {
                    targets.push(t);
                }
            }
            for &t in &targets {
                adj[v].push(t);
                adj[t as usize].push(v as u32);
                endpoints.push(v as u32);
                endpoints.push(t);
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        for list in &adj {
            offsets.push(neighbors.len() as u32);
            neighbors.extend_from_slice(list);
        }
        offsets.push(neighbors.len() as u32);
        Ok(Topology {
            kind: TopologyKind::Ba { m },
            n_agents: n,
            offsets,
            neighbors,
        })
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    /// Torus side length, if this is a torus.
    pub fn side_length(&self) -> Option<usize> {
        match self.kind {
            TopologyKind::Torus { side } => Some(side),
            _ => None,
        }
    }

    /// Attachment parameter, if this is a BA graph.
    pub fn ba_m(&self) -> Option<usize> {
        match self.kind {
            TopologyKind::Ba { m } => Some(m),
            _ => None,
        }
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        let lo = self.offsets[i] as usize;
        let hi = self.offsets[i + 1] as usize;
        &self.neighbors[lo..hi]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        (self.offsets[i + 1] - self.offsets[i]) as usize
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Shortest separation between agents `i` and `j` under periodic
    /// boundary conditions. Defined for ring (chain distance) and torus
    /// (Manhattan distance with per-axis wraparound) only.
    pub fn minimal_image_distance(&self, i: usize, j: usize) -> Result<usize, TopologyError> {
        for index in [i, j] {
            if index >= self.n_agents {
                return Err(TopologyError::IndexOutOfRange {
                    index,
                    n: self.n_agents,
                });
            }
        }
        match self.kind {
            TopologyKind::Ring => {
                let d = i.abs_diff(j);
                Ok(d.min(self.n_agents - d))
            }
            TopologyKind::Torus { side } => {
                let (ri, ci) = (i / side, i % side);
                let (rj, cj) = (j / side, j % side);
                let dr = ri.abs_diff(rj);
                let dc = ci.abs_diff(cj);
                Ok(dr.min(side - dr) + dc.min(side - dc))
            }
            TopologyKind::Ba { .. } => Err(TopologyError::UnsupportedDistance("ba")),
            TopologyKind::Clique => Err(TopologyError::UnsupportedDistance("clique")),
        }
    }

    /// Largest value [`Topology::minimal_image_distance`] can take, if
    /// defined for this topology.
    pub fn max_distance(&self) -> Option<usize> {
        match self.kind {
            TopologyKind::Ring => Some(self.n_agents / 2),
            TopologyKind::Torus { side } => Some(2 * (side / 2)),
            _ => None,
        }
    }

    /// Writes the edge list as text, one `i j` pair per line with `i < j`,
    /// ascending. Used for debugging and graph reproducibility checks.
    pub fn write_edge_list<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut row = Vec::new();
        for i in 0..self.n_agents {
            row.clear();
            row.extend(self.neighbors(i).iter().map(|&j| j as usize).filter(|&j| j > i));
            row.sort_unstable();
            for &j in &row {
                writeln!(w, "{i} {j}")?;
            }
        }
        Ok(())
    }
}
