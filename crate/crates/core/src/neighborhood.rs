//! Hop neighborhoods over the nonzero-edge topology of either graph.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph_pair::{GraphPair, Side};
use crate::NodeIndex;

/// Distance of a node not reachable from the source set. Larger than any
/// real hop count.
pub const UNREACHABLE: usize = usize::MAX;

/// Hop distances from a source set in each graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distances {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl Distances {
    /// `min(d_A(u), d_B(u))`.
    pub fn min(&self, node: NodeIndex) -> usize {
        self.a[node].min(self.b[node])
    }
}

/// Multi-source BFS distances from `sources` in `G_A` and in `G_B`.
pub fn distances(pair: &GraphPair, sources: &[NodeIndex]) -> Result<Distances> {
    check_sources(pair, sources)?;
    Ok(Distances {
        a: bfs(pair, Side::A, sources, UNREACHABLE),
        b: bfs(pair, Side::B, sources, UNREACHABLE),
    })
}

/// `N_r(s)`: every node within `radius` hops of `sources` in either graph,
/// sorted by index. Always contains `sources`.
pub fn neighbors(pair: &GraphPair, sources: &[NodeIndex], radius: usize) -> Result<Vec<NodeIndex>> {
    check_sources(pair, sources)?;
    let da = bfs(pair, Side::A, sources, radius);
    let db = bfs(pair, Side::B, sources, radius);
    Ok((0..pair.node_count())
        .filter(|&u| da[u] <= radius || db[u] <= radius)
        .collect())
}

fn check_sources(pair: &GraphPair, sources: &[NodeIndex]) -> Result<()> {
    if sources.is_empty() {
        return Err(Error::input("neighborhood source set is empty"));
    }
    if let Some(&bad) = sources.iter().find(|&&s| s >= pair.node_count()) {
        return Err(Error::input(format!(
            "node index {bad} outside universe of {}",
            pair.node_count()
        )));
    }
    Ok(())
}

/// BFS that stops expanding past `limit` hops.
fn bfs(pair: &GraphPair, side: Side, sources: &[NodeIndex], limit: usize) -> Vec<usize> {
    let mut dist = vec![UNREACHABLE; pair.node_count()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s] != 0 {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        if next > limit {
            continue;
        }
        for &(v, _) in pair.neighbors(side, u) {
            if dist[v] == UNREACHABLE {
                dist[v] = next;
                queue.push_back(v);
            }
        }
    }
    dist
}
