use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Structural shape of a graph, detected from its labeled edge set. Fast
/// solvers key off this: `Path` and `Complete` have exact closed-form or
/// linear-time decisions, everything else is brute-forced.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GraphKind {
    Path,
    Cycle,
    Complete,
    General,
}

/// A simple connected graph on vertices 1..=n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    kind: GraphKind,
}

impl Graph {
    /// The path 1 - 2 - ... - n.
    pub fn path(n: usize) -> Result<Graph> {
        if n == 0 {
            return Err(Error::domain("path: need at least one vertex"));
        }
        let edges: Vec<(usize, usize)> = (1..n).map(|v| (v, v + 1)).collect();
        Graph::from_edges(n, &edges)
    }

    /// The cycle 1 - 2 - ... - n - 1.
    pub fn cycle(n: usize) -> Result<Graph> {
        if n < 3 {
            return Err(Error::domain("cycle: need at least three vertices"));
        }
        let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (v, v + 1)).collect();
        edges.push((1, n));
        Graph::from_edges(n, &edges)
    }

    /// The complete graph on n vertices.
    pub fn complete(n: usize) -> Result<Graph> {
        if n == 0 {
            return Err(Error::domain("complete: need at least one vertex"));
        }
        let mut edges = Vec::new();
        for u in 1..=n {
            for v in (u + 1)..=n {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges)
    }

    /// Builds and validates a graph from an edge list: simple, connected,
    /// endpoints in 1..=n.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        if n == 0 {
            return Err(Error::domain("graph: need at least one vertex"));
        }
        // A connected graph carries at least n - 1 edges; reject before
        // sizing the adjacency list to an attacker-claimed n.
        if n > edges.len() + 1 {
            return Err(Error::domain("graph: not connected"));
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut seen = std::collections::BTreeSet::new();
        for &(u, v) in edges {
            if u < 1 || u > n || v < 1 || v > n {
                return Err(Error::domain(format!("graph: edge ({u},{v}) out of range")));
            }
            if u == v {
                return Err(Error::domain(format!("graph: loop at vertex {u}")));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::domain(format!("graph: duplicate edge ({u},{v})")));
            }
            adj[u - 1].push(v);
            adj[v - 1].push(u);
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        let g = Graph {
            n,
            adj,
            kind: GraphKind::General,
        };
        if !g.is_connected() {
            return Err(Error::domain("graph: not connected"));
        }
        let kind = g.detect_kind();
        Ok(Graph { kind, ..g })
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![1usize];
        seen[0] = true;
        let mut found = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v - 1] {
                if !seen[w - 1] {
                    seen[w - 1] = true;
                    found += 1;
                    stack.push(w);
                }
            }
        }
        found == self.n
    }

    /// Shape detection is on labeled edges: only the canonical labelings
    /// (path i - i+1, cycle with the extra 1 - n edge) unlock fast solvers.
    fn detect_kind(&self) -> GraphKind {
        let m: usize = self.adj.iter().map(|a| a.len()).sum::<usize>() / 2;
        let is_path = m == self.n.saturating_sub(1) && (1..self.n).all(|v| self.has_edge(v, v + 1));
        if is_path {
            return GraphKind::Path;
        }
        if self.n >= 3 {
            let is_cycle = m == self.n
                && (1..self.n).all(|v| self.has_edge(v, v + 1))
                && self.has_edge(1, self.n);
            if is_cycle {
                return GraphKind::Cycle;
            }
        }
        if m == self.n * (self.n - 1) / 2 {
            return GraphKind::Complete;
        }
        GraphKind::General
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    /// Neighbors of v, sorted ascending.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        assert!(v >= 1 && v <= self.n, "vertex out of range");
        &self.adj[v - 1]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u >= 1 && u <= self.n && v >= 1 && v <= self.n && self.adj[u - 1].binary_search(&v).is_ok()
    }

    /// Edges as (low, high) pairs in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 1..=self.n {
            for &v in &self.adj[u - 1] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct GraphWire {
    n: u64,
    edges: Vec<(usize, usize)>,
}

impl Serialize for Graph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphWire {
            n: self.n as u64,
            edges: self.edges(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = GraphWire::deserialize(d)?;
        let n = usize::try_from(wire.n).map_err(|_| D::Error::custom("n out of range"))?;
        Graph::from_edges(n, &wire.edges).map_err(D::Error::custom)
    }
}
