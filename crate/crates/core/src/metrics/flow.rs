//! Dinic's maximum flow on integer capacities.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: u64,
}

/// A flow network; edges are stored in pairs so that `e ^ 1` is the reverse
/// of edge `e`.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self { edges: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: u64) {
        self.adj[from].push(self.edges.len());
        self.edges.push(Edge { to, cap });
        self.adj[to].push(self.edges.len());
        self.edges.push(Edge { to: from, cap: 0 });
    }

    fn levels(&self, s: usize, t: usize) -> Option<Vec<u32>> {
        let mut level = vec![u32::MAX; self.adj.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.edges[e].to;
                if self.edges[e].cap > 0 && level[v] == u32::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        (level[t] != u32::MAX).then_some(level)
    }

    /// Saturate one blocking flow of the level graph, iteratively.
    fn blocking_flow(&mut self, s: usize, t: usize, level: &[u32]) -> u64 {
        let mut next = vec![0usize; self.adj.len()];
        let mut total = 0u64;
        let mut path: Vec<usize> = Vec::new();
        let mut u = s;
        loop {
            if u == t {
                let push = path.iter().map(|&e| self.edges[e].cap).min().unwrap_or(0);
                for &e in &path {
                    self.edges[e].cap -= push;
                    self.edges[e ^ 1].cap += push;
                }
                total += push;
                // Back up to the tail of the first saturated edge.
                let cut = path.iter().position(|&e| self.edges[e].cap == 0).unwrap_or(0);
                path.truncate(cut);
                u = if cut == 0 { s } else { self.edges[path[cut - 1]].to };
                continue;
            }
            let mut advanced = false;
            while next[u] < self.adj[u].len() {
                let e = self.adj[u][next[u]];
                let v = self.edges[e].to;
                if self.edges[e].cap > 0 && level[v] == level[u] + 1 {
                    path.push(e);
                    u = v;
                    advanced = true;
                    break;
                }
                next[u] += 1;
            }
            if advanced {
                continue;
            }
            // Dead end: retreat and skip the edge that led here.
            match path.pop() {
                None => return total,
                Some(e) => {
                    u = self.edges[e ^ 1].to;
                    next[u] += 1;
                }
            }
        }
    }

    /// Value of a maximum `s`-`t` flow. The network keeps the residual
    /// capacities afterwards.
    pub fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut total = 0;
        while let Some(level) = self.levels(s, t) {
            total += self.blocking_flow(s, t, &level);
        }
        total
    }
}
