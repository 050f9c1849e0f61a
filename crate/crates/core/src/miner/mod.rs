//! The two-phase pipeline: a coherent core around the seeds, then contrast
//! subgraphs grown from that core, extracted one after another without
//! overlap.

mod oracle;

pub use oracle::{brute_force, greedy_peel, BRUTE_FORCE_CAP};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph_pair::GraphPair;
use crate::metrics::{EdgeMetric, MetricSet};
use crate::neighborhood;
use crate::solver::{Bounds, DensityInstance, DensityResult, SolveOptions, StopReason};
use crate::NodeIndex;

/// Pipeline knobs. `radius_grow` defaults to `radius`.
#[derive(Debug, Clone)]
pub struct MineOptions {
    pub radius: usize,
    pub radius_grow: Option<usize>,
    /// Maximum number of contrast subgraphs to extract.
    pub max_subgraphs: usize,
    /// Skip the core phase and anchor the growth phase at the seeds.
    pub no_core: bool,
    /// Let the growth phase range over every node instead of `N_r(core)`.
    pub no_neighbor: bool,
    pub solve: SolveOptions,
}

impl MineOptions {
    pub fn new(radius: usize) -> Self {
        MineOptions {
            radius,
            radius_grow: None,
            max_subgraphs: 1,
            no_core: false,
            no_neighbor: false,
            solve: SolveOptions::default(),
        }
    }

    pub fn grow_radius(&self) -> usize {
        self.radius_grow.unwrap_or(self.radius)
    }
}

/// Solver bookkeeping for one phase.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveSummary {
    pub candidates: usize,
    pub iterations: usize,
    pub refinements: usize,
    pub stop: StopReason,
    pub final_window: f64,
    pub bounds: Option<Bounds>,
}

impl SolveSummary {
    fn of(instance: &DensityInstance, r: &DensityResult) -> Self {
        SolveSummary {
            candidates: instance.candidates().len(),
            iterations: r.iterations,
            refinements: r.refinements,
            stop: r.stop,
            final_window: r.final_window,
            bounds: r.bounds,
        }
    }
}

/// Result of one density phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseResult {
    pub nodes: Vec<NodeIndex>,
    pub score: f64,
    pub summary: SolveSummary,
}

/// One extracted contrast subgraph `ĝᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastSubgraph {
    pub nodes: Vec<NodeIndex>,
    /// `ĝᵢ ∖ ĉ`.
    pub added: Vec<NodeIndex>,
    pub score: f64,
    pub summary: SolveSummary,
}

/// Weights and scores of one node pair with an edge in either graph.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeAnnotation {
    pub u: NodeIndex,
    pub v: NodeIndex,
    pub weight_a: f64,
    pub weight_b: f64,
    pub coherence: f64,
    pub contrast: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiningOutcome {
    pub seeds: Vec<NodeIndex>,
    pub core: Vec<NodeIndex>,
    pub core_score: f64,
    /// `None` when the core phase was skipped.
    pub core_summary: Option<SolveSummary>,
    pub subgraphs: Vec<ContrastSubgraph>,
    /// Pairs inside `ĝ₁` with an edge in either graph, ordered by `(u, v)`.
    pub edges: Vec<EdgeAnnotation>,
    pub warnings: Vec<String>,
}

/// Builds the density instance for one phase over `candidates` (sorted) with
/// `anchor` fixed, scoring each pair by `metric`.
pub fn build_instance(
    pair: &GraphPair,
    metric: &EdgeMetric,
    penalty: &crate::metrics::NodePenalty,
    candidates: &[NodeIndex],
    anchor: &[NodeIndex],
) -> Result<DensityInstance> {
    if metric.score(0.0, 0.0)? != 0.0 {
        return Err(Error::input(format!(
            "edge metric `{}` must score a pair with no edge in either graph as 0",
            metric.name()
        )));
    }
    let n = pair.node_count();
    let mut inside = vec![false; n];
    for &u in candidates {
        inside[u] = true;
    }
    let mut scores = Vec::new();
    for &u in candidates {
        for v in merged_neighbors(pair, u) {
            if v > u && inside[v] {
                let (wa, wb) = pair.weights(u, v);
                scores.push((u, v, metric.score(wa, wb)?));
            }
        }
    }

    let mut universe = Vec::with_capacity(n);
    for u in 0..n {
        universe.push(penalty.penalty(u)?);
    }
    let sum = universe.iter().sum();
    let min = universe.iter().copied().fold(f64::INFINITY, f64::min);
    DensityInstance::new(candidates, anchor, &scores, |u| universe[u])?
        .with_universe_penalty(sum, min)
}

/// Sorted, deduplicated neighbors of `u` in either graph.
fn merged_neighbors(pair: &GraphPair, u: NodeIndex) -> Vec<NodeIndex> {
    use crate::graph_pair::Side;
    let mut out: Vec<NodeIndex> = pair
        .neighbors(Side::A, u)
        .iter()
        .chain(pair.neighbors(Side::B, u))
        .map(|&(v, _)| v)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn normalize(pair: &GraphPair, nodes: &[NodeIndex], what: &str) -> Result<Vec<NodeIndex>> {
    if let Some(&bad) = nodes.iter().find(|&&u| u >= pair.node_count()) {
        return Err(Error::input(format!(
            "{what} node index {bad} outside universe of {}",
            pair.node_count()
        )));
    }
    let mut v = nodes.to_vec();
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

fn run(instance: &DensityInstance, opts: &SolveOptions) -> Result<PhaseResult> {
    let r = instance.maximize_with(opts)?;
    Ok(PhaseResult {
        summary: SolveSummary::of(instance, &r),
        nodes: r.subset,
        score: r.score,
    })
}

/// Instance for the core phase: seeds anchored inside `N_r(seeds)`, or every
/// node unanchored when there are no seeds.
pub fn core_instance(
    pair: &GraphPair,
    metrics: &MetricSet,
    seeds: &[NodeIndex],
    radius: usize,
) -> Result<DensityInstance> {
    let seeds = normalize(pair, seeds, "seed")?;
    let candidates = if seeds.is_empty() {
        (0..pair.node_count()).collect()
    } else {
        neighborhood::neighbors(pair, &seeds, radius)?
    };
    build_instance(
        pair,
        &metrics.coherence,
        &metrics.penalty,
        &candidates,
        &seeds,
    )
}

/// Densest coherent set with `seeds ⊆ c ⊆ N_r(seeds)`.
pub fn find_core(
    pair: &GraphPair,
    metrics: &MetricSet,
    seeds: &[NodeIndex],
    radius: usize,
) -> Result<PhaseResult> {
    find_core_with(pair, metrics, seeds, radius, &SolveOptions::default())
}

pub fn find_core_with(
    pair: &GraphPair,
    metrics: &MetricSet,
    seeds: &[NodeIndex],
    radius: usize,
    opts: &SolveOptions,
) -> Result<PhaseResult> {
    run(&core_instance(pair, metrics, seeds, radius)?, opts)
}

/// Instance for the growth phase. `pool` masks out nodes taken by earlier
/// extractions; `unbounded` lifts the `N_r(core)` restriction.
pub fn contrast_instance(
    pair: &GraphPair,
    metrics: &MetricSet,
    core: &[NodeIndex],
    radius: usize,
    pool: Option<&[bool]>,
    unbounded: bool,
) -> Result<DensityInstance> {
    let core = normalize(pair, core, "core")?;
    if core.is_empty() {
        return Err(Error::input("contrast growth needs a non-empty core"));
    }
    let reach = if unbounded {
        (0..pair.node_count()).collect()
    } else {
        neighborhood::neighbors(pair, &core, radius)?
    };
    let candidates: Vec<NodeIndex> = reach
        .into_iter()
        .filter(|&u| pool.is_none_or(|p| p[u]) || core.binary_search(&u).is_ok())
        .collect();
    build_instance(
        pair,
        &metrics.contrast,
        &metrics.penalty,
        &candidates,
        &core,
    )
}

/// Densest contrast set with `core ⊆ g ⊆ N_r(core)`.
pub fn find_contrast(
    pair: &GraphPair,
    metrics: &MetricSet,
    core: &[NodeIndex],
    radius: usize,
) -> Result<PhaseResult> {
    run(
        &contrast_instance(pair, metrics, core, radius, None, false)?,
        &SolveOptions::default(),
    )
}

/// Runs the full pipeline: one core, then up to `max_subgraphs` contrast
/// subgraphs. Each extraction removes its added nodes from the pool; the loop
/// ends early once an extraction adds nothing.
pub fn mine(
    pair: &GraphPair,
    metrics: &MetricSet,
    seeds: &[NodeIndex],
    opts: &MineOptions,
) -> Result<MiningOutcome> {
    if opts.max_subgraphs == 0 {
        return Err(Error::input(
            "the number of contrast subgraphs must be at least 1",
        ));
    }
    let seeds = normalize(pair, seeds, "seed")?;
    let mut warnings: Vec<String> = pair.scale_warning().into_iter().collect();

    let (core, core_score, core_summary) = if opts.no_core {
        let score = if seeds.is_empty() {
            0.0
        } else {
            core_instance(pair, metrics, &seeds, opts.radius)?.evaluate(&seeds)?
        };
        (seeds.clone(), score, None)
    } else {
        let found = find_core_with(pair, metrics, &seeds, opts.radius, &opts.solve)?;
        if found.score > 0.0 {
            (found.nodes, found.score, Some(found.summary))
        } else {
            warnings.push(
                "no coherent signal around the seeds; using the seeds as the core".to_string(),
            );
            (seeds.clone(), 0.0, Some(found.summary))
        }
    };
    if core.is_empty() {
        return Err(Error::input(
            "no coherent core found without seeds; supply at least one seed label",
        ));
    }

    let mut pool = vec![true; pair.node_count()];
    let mut subgraphs: Vec<ContrastSubgraph> = Vec::new();
    let radius = opts.grow_radius();
    while subgraphs.len() < opts.max_subgraphs {
        let instance =
            contrast_instance(pair, metrics, &core, radius, Some(&pool), opts.no_neighbor)?;
        let found = run(&instance, &opts.solve)?;
        let added: Vec<NodeIndex> = found
            .nodes
            .iter()
            .copied()
            .filter(|u| core.binary_search(u).is_err())
            .collect();
        if added.is_empty() && !subgraphs.is_empty() {
            break;
        }
        for &u in &added {
            pool[u] = false;
        }
        let stop = added.is_empty();
        subgraphs.push(ContrastSubgraph {
            nodes: found.nodes,
            added,
            score: found.score,
            summary: found.summary,
        });
        if stop {
            break;
        }
    }

    let edges = annotate(pair, metrics, &subgraphs[0].nodes)?;
    Ok(MiningOutcome {
        seeds,
        core,
        core_score,
        core_summary,
        subgraphs,
        edges,
        warnings,
    })
}

/// Annotations for every pair inside `nodes` (sorted) with an edge in either graph.
pub fn annotate(
    pair: &GraphPair,
    metrics: &MetricSet,
    nodes: &[NodeIndex],
) -> Result<Vec<EdgeAnnotation>> {
    let mut out = Vec::new();
    for &u in nodes {
        for v in merged_neighbors(pair, u) {
            if v > u && nodes.binary_search(&v).is_ok() {
                let (wa, wb) = pair.weights(u, v);
                out.push(EdgeAnnotation {
                    u,
                    v,
                    weight_a: wa,
                    weight_b: wb,
                    coherence: metrics.coherence.score(wa, wb)?,
                    contrast: metrics.contrast.score(wa, wb)?,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
