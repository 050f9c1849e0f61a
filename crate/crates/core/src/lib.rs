//! Contrast subgraph mining over a pair of weighted undirected graphs that
//! share one node set.
//!
//! Mining runs in two phases. A *coherent core* is grown around the seed
//! nodes by maximizing edge-coherence density inside their radius-`r`
//! neighborhood; a *contrast subgraph* is then grown from that core by
//! maximizing edge-contrast density inside the core's neighborhood. Both
//! phases are instances of the same anchored density problem, solved exactly
//! by binary search over the density with a min-cut feasibility check
//! ([`solver`]), backed by Dinic's max flow ([`maxflow`]).
//!
//! ```
//! use contrast_core::{GraphPair, MetricSet, miner::{mine, MineOptions}};
//!
//! let pair = GraphPair::from_edges(
//!     &[("a", "b", 2.0), ("a", "c", 2.0), ("b", "c", 2.0), ("a", "d", 4.0)],
//!     &[("a", "b", 2.0), ("a", "c", 2.0), ("b", "c", 2.0)],
//! )
//! .unwrap();
//! let seeds = pair.indices_of(&["a"]).unwrap();
//! let outcome = mine(&pair, &MetricSet::default(), &seeds, &MineOptions::new(1)).unwrap();
//! assert_eq!(pair.labels_of(&outcome.core), vec!["a", "b", "c"]);
//! ```

pub mod datagen;
pub mod error;
pub mod export;
pub mod graph_pair;
pub mod maxflow;
pub mod metrics;
pub mod miner;
pub mod neighborhood;
pub mod solver;

pub use error::{Error, Result};
pub use graph_pair::{EdgeEvent, GraphPair, Side, WeightTransform};
pub use metrics::MetricSet;
pub use solver::{DensityInstance, DensityResult};

/// Dense internal node index in `[0, |V|)`.
pub type NodeIndex = usize;
