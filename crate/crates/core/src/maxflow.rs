//! Capacitated flow networks with Dinic's max flow and residual min-cut
//! extraction.
//!
//! Capacities are `f64`. Arcs declared infinite are given a finite sentinel
//! at solve time, one more than the sum of all finite capacities, so they can
//! never lie on a minimum cut. Residual capacities at or below
//! [`RESIDUAL_EPS`] times the largest capacity are treated as saturated.

use crate::error::{Error, Result};

/// Relative threshold below which a residual capacity is considered zero.
pub const RESIDUAL_EPS: f64 = 1e-12;

/// Maximum flow value together with the source side of a minimum cut.
#[derive(Debug, Clone, PartialEq)]
pub struct CutResult {
    pub flow: f64,
    /// Nodes reachable from the source in the final residual graph, sorted,
    /// excluding the source itself. Never contains the sink.
    pub source_side: Vec<usize>,
}

/// A directed flow network. Arc `2k` is the k-th inserted arc and `2k + 1` its
/// paired reverse arc of capacity zero.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    source: usize,
    sink: usize,
    head: Vec<usize>,
    capacity: Vec<f64>,
    residual: Vec<f64>,
    infinite: Vec<bool>,
    adjacency: Vec<Vec<usize>>,
    solved: bool,
}

impl FlowNetwork {
    pub fn new(node_count: usize, source: usize, sink: usize) -> Result<Self> {
        if source >= node_count || sink >= node_count {
            return Err(Error::input(format!(
                "terminals ({source}, {sink}) outside a network of {node_count} nodes"
            )));
        }
        if source == sink {
            return Err(Error::input("source and sink must differ"));
        }
        Ok(FlowNetwork {
            source,
            sink,
            head: Vec::new(),
            capacity: Vec::new(),
            residual: Vec::new(),
            infinite: Vec::new(),
            adjacency: vec![Vec::new(); node_count],
            solved: false,
        })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    /// Number of inserted arcs, not counting reverse arcs.
    pub fn arc_count(&self) -> usize {
        self.head.len() / 2
    }

    /// Adds a directed arc `from -> to` with the given capacity.
    pub fn add_arc(&mut self, from: usize, to: usize, capacity: f64) -> Result<()> {
        if !(capacity >= 0.0 && capacity.is_finite()) {
            return Err(Error::input(format!(
                "arc capacity must be finite and non-negative, got {capacity}"
            )));
        }
        self.push_arc(from, to, capacity, false)
    }

    /// Adds a directed arc that no finite cut may sever.
    pub fn add_infinite_arc(&mut self, from: usize, to: usize) -> Result<()> {
        self.push_arc(from, to, 0.0, true)
    }

    /// Makes `u -- v` traversable in both directions with capacity `c`, as two
    /// directed arcs.
    pub fn add_undirected_capacity(&mut self, u: usize, v: usize, c: f64) -> Result<()> {
        if u == v {
            return Err(Error::input(format!(
                "undirected capacity needs distinct endpoints, got {u}"
            )));
        }
        self.add_arc(u, v, c)?;
        self.add_arc(v, u, c)
    }

    fn push_arc(&mut self, from: usize, to: usize, capacity: f64, infinite: bool) -> Result<()> {
        if self.solved {
            return Err(Error::State(
                "flow network modified after it was solved".into(),
            ));
        }
        let n = self.node_count();
        if from >= n || to >= n {
            return Err(Error::input(format!(
                "arc ({from}, {to}) outside a network of {n} nodes"
            )));
        }
        let id = self.head.len();
        self.head.extend([to, from]);
        self.capacity.extend([capacity, 0.0]);
        self.residual.extend([capacity, 0.0]);
        self.infinite.extend([infinite, false]);
        self.adjacency[from].push(id);
        self.adjacency[to].push(id + 1);
        Ok(())
    }

    /// Computes a maximum source-to-sink flow with Dinic's algorithm and
    /// returns it with the residual-reachable source side. A network can be
    /// solved once.
    pub fn max_flow(&mut self) -> Result<CutResult> {
        if self.solved {
            return Err(Error::State("flow network already solved".into()));
        }
        self.solved = true;

        let finite_total: f64 = self
            .capacity
            .iter()
            .zip(&self.infinite)
            .filter(|(_, &inf)| !inf)
            .map(|(c, _)| c)
            .sum();
        let sentinel = 1.0 + finite_total;
        for a in 0..self.head.len() {
            if self.infinite[a] {
                self.capacity[a] = sentinel;
                self.residual[a] = sentinel;
            }
        }
        let largest = self.capacity.iter().copied().fold(0.0, f64::max);
        let eps = RESIDUAL_EPS * largest;

        let n = self.node_count();
        let mut level = vec![usize::MAX; n];
        let mut next_arc = vec![0usize; n];
        let mut path: Vec<usize> = Vec::new();
        let mut flow = 0.0;
        while self.build_levels(eps, &mut level) {
            next_arc.iter_mut().for_each(|i| *i = 0);
            flow += self.blocking_flow(eps, &mut level, &mut next_arc, &mut path);
        }

        Ok(CutResult {
            flow,
            source_side: self.residual_reachable(eps),
        })
    }

    fn build_levels(&self, eps: f64, level: &mut [usize]) -> bool {
        level.iter_mut().for_each(|l| *l = usize::MAX);
        let mut queue = std::collections::VecDeque::new();
        level[self.source] = 0;
        queue.push_back(self.source);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adjacency[u] {
                let v = self.head[a];
                if self.residual[a] > eps && level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level[self.sink] != usize::MAX
    }

    /// Saturates the level graph with an iterative DFS using current-arc
    /// pointers. Nodes with no way forward are removed from the level graph.
    fn blocking_flow(
        &mut self,
        eps: f64,
        level: &mut [usize],
        next_arc: &mut [usize],
        path: &mut Vec<usize>,
    ) -> f64 {
        let mut pushed = 0.0;
        path.clear();
        let mut u = self.source;
        loop {
            if u == self.sink {
                let bottleneck = path
                    .iter()
                    .map(|&a| self.residual[a])
                    .fold(f64::INFINITY, f64::min);
                for &a in path.iter() {
                    self.residual[a] -= bottleneck;
                    self.residual[a ^ 1] += bottleneck;
                }
                pushed += bottleneck;
                // Retreat to the tail of the first arc this augmentation saturated.
                let cut = path
                    .iter()
                    .position(|&a| self.residual[a] <= eps)
                    .unwrap_or(0);
                path.truncate(cut);
                u = path.last().map_or(self.source, |&a| self.head[a]);
                continue;
            }

            let mut advanced = false;
            while next_arc[u] < self.adjacency[u].len() {
                let a = self.adjacency[u][next_arc[u]];
                let v = self.head[a];
                if self.residual[a] > eps && level[v] == level[u] + 1 {
                    path.push(a);
                    u = v;
                    advanced = true;
                    break;
                }
                next_arc[u] += 1;
            }
            if advanced {
                continue;
            }
            if u == self.source {
                return pushed;
            }
            level[u] = usize::MAX;
            let a = path.pop().expect("non-source node on the DFS path");
            u = self.head[a ^ 1];
            next_arc[u] += 1;
        }
    }

    fn residual_reachable(&self, eps: f64) -> Vec<usize> {
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![self.source];
        seen[self.source] = true;
        while let Some(u) = stack.pop() {
            for &a in &self.adjacency[u] {
                let v = self.head[a];
                if self.residual[a] > eps && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        (0..self.node_count())
            .filter(|&v| seen[v] && v != self.source)
            .collect()
    }

    /// Total capacity of arcs leaving `source_side ∪ {source}`. Equals the flow
    /// value on a correctly solved network.
    pub fn verify_cut(&self, cut: &CutResult) -> Result<f64> {
        if !self.solved {
            return Err(Error::State(
                "cut verification requires a solved network".into(),
            ));
        }
        let mut inside = vec![false; self.node_count()];
        inside[self.source] = true;
        for &v in &cut.source_side {
            inside[v] = true;
        }
        Ok((0..self.head.len())
            .step_by(2)
            .filter(|&a| inside[self.head[a ^ 1]] && !inside[self.head[a]])
            .map(|a| self.capacity[a])
            .sum())
    }

    /// Flow currently carried by inserted arc `k`.
    pub fn arc_flow(&self, k: usize) -> f64 {
        self.capacity[2 * k] - self.residual[2 * k]
    }

    /// Largest absolute inflow/outflow imbalance over non-terminal nodes.
    pub fn conservation_violation(&self) -> f64 {
        let mut balance = vec![0.0f64; self.node_count()];
        for k in 0..self.arc_count() {
            let f = self.arc_flow(k);
            balance[self.head[2 * k]] += f;
            balance[self.head[2 * k + 1]] -= f;
        }
        balance
            .iter()
            .enumerate()
            .filter(|&(v, _)| v != self.source && v != self.sink)
            .map(|(_, b)| b.abs())
            .fold(0.0, f64::max)
    }

    /// Smallest residual capacity over all arcs; negative only on a defect.
    pub fn min_residual(&self) -> f64 {
        self.residual.iter().copied().fold(f64::INFINITY, f64::min)
    }
}
