//! Exact maximization of edge-score density over anchored node subsets.
//!
//! Given candidates `N`, an anchor `c ⊆ N`, symmetric non-negative edge scores
//! and positive node penalties, find `c ⊆ g ⊆ N` maximizing
//!
//! ```text
//! density(g) = Σ_{u<v ∈ g} score(u,v) / Σ_{u ∈ g} penalty(u)
//! ```
//!
//! The search bisects on the target density `δ`. For each `δ` a flow network
//! is built whose minimum cut, offset by `|N|·U`, equals
//! `h_δ(g) = Σ_{u∈g} (2δ·penalty(u) − d(u)) + Σ_{u∈g, v∉g} score(u,v)`
//! minimized over anchored `g`; `h_δ(g) ≤ 0` exactly when `density(g) ≥ δ`.
//! After the bisection window closes, a few Dinkelbach steps (re-solving at
//! the density of the best witness) lift the result to the exact optimum even
//! when scores are not commensurate.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::maxflow::FlowNetwork;
use crate::NodeIndex;

/// Hard cap on bisection steps.
pub const MAX_ITERATIONS: usize = 200;
/// Bisection also stops once the window is below this fraction of the upper end.
pub const WINDOW_FLOOR: f64 = 1e-12;
/// Cap on post-bisection refinement steps.
pub const MAX_REFINEMENTS: usize = 64;

/// One anchored density-maximization problem.
#[derive(Debug, Clone)]
pub struct DensityInstance {
    candidates: Vec<NodeIndex>,
    local: HashMap<NodeIndex, usize>,
    is_anchor: Vec<bool>,
    anchor: Vec<NodeIndex>,
    scores: Vec<Vec<(usize, f64)>>,
    penalty: Vec<f64>,
    degree: Vec<f64>,
    total_score: f64,
    min_score: Option<f64>,
    universe_penalty_sum: f64,
    universe_penalty_min: f64,
}

/// Search interval and termination width for the bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
    pub epsilon: f64,
    /// Smallest nonzero edge score.
    pub min_score: f64,
    /// Smallest node penalty over the universe.
    pub min_penalty: f64,
}

impl Bounds {
    /// Number of bisection steps the epsilon criterion allows.
    pub fn iteration_bound(&self) -> usize {
        let ratio = (self.upper - self.lower) / self.epsilon;
        if ratio <= 1.0 {
            1
        } else {
            ratio.log2().ceil() as usize + 1
        }
    }
}

/// Which condition ended the bisection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The window shrank to at most epsilon.
    Epsilon,
    /// [`MAX_ITERATIONS`] reached.
    IterationCap,
    /// The window fell below [`WINDOW_FLOOR`] times the upper end.
    WindowFloor,
    /// Every edge score is zero; the anchor is returned unchanged.
    NoSignal,
}

/// Outcome of one min-cut feasibility check at density `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityCheck {
    pub delta: f64,
    /// Max-flow value of the constructed network.
    pub flow: f64,
    /// `|candidates| · U`.
    pub offset: f64,
    /// Residual source side of the minimum cut, as node indices.
    pub source_side: Vec<NodeIndex>,
    /// The source side when it is non-empty and reaches density `delta`.
    pub witness: Option<Vec<NodeIndex>>,
    /// `|verify_cut − flow|` when audited.
    pub duality_error: Option<f64>,
    /// Largest flow-conservation imbalance when audited.
    pub conservation_error: Option<f64>,
}

impl FeasibilityCheck {
    /// `flow − |candidates|·U`, the minimum of `h_δ` over anchored subsets.
    pub fn gap(&self) -> f64 {
        self.flow - self.offset
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Bisection,
    Refinement,
}

/// Per-check diagnostics kept when [`SolveOptions::trace`] is set.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub phase: Phase,
    pub check: FeasibilityCheck,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub max_iterations: usize,
    /// Run Dinkelbach refinement after the bisection.
    pub refine: bool,
    /// Keep an [`IterationRecord`] per feasibility check.
    pub trace: bool,
    /// Verify cut duality and flow conservation on every check.
    pub audit: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iterations: MAX_ITERATIONS,
            refine: true,
            trace: false,
            audit: false,
        }
    }
}

/// The optimal anchored subset with its density and solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityResult {
    pub subset: Vec<NodeIndex>,
    pub score: f64,
    /// Bisection steps taken.
    pub iterations: usize,
    /// Refinement steps that improved the bisection result.
    pub refinements: usize,
    /// `upper − lower` when the bisection stopped.
    pub final_window: f64,
    pub stop: StopReason,
    pub bounds: Option<Bounds>,
    pub trace: Vec<IterationRecord>,
}

impl DensityInstance {
    /// Builds an instance. `scores` lists each unordered candidate pair at most
    /// once; zero scores are dropped. The penalty universe defaults to the
    /// candidate set, see [`DensityInstance::with_universe_penalty`].
    pub fn new(
        candidates: &[NodeIndex],
        anchor: &[NodeIndex],
        scores: &[(NodeIndex, NodeIndex, f64)],
        penalty: impl Fn(NodeIndex) -> f64,
    ) -> Result<Self> {
        let mut cand = candidates.to_vec();
        cand.sort_unstable();
        if cand.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::input("candidate set contains duplicates"));
        }
        let local: HashMap<NodeIndex, usize> =
            cand.iter().enumerate().map(|(i, &u)| (u, i)).collect();

        let mut is_anchor = vec![false; cand.len()];
        for &a in anchor {
            let &i = local
                .get(&a)
                .ok_or_else(|| Error::input(format!("anchor node {a} is not a candidate")))?;
            is_anchor[i] = true;
        }
        let anchor: Vec<NodeIndex> = cand
            .iter()
            .zip(&is_anchor)
            .filter(|(_, &a)| a)
            .map(|(&u, _)| u)
            .collect();

        let mut pen = Vec::with_capacity(cand.len());
        for &u in &cand {
            let p = penalty(u);
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::input(format!(
                    "penalty of node {u} must be positive and finite, got {p}"
                )));
            }
            pen.push(p);
        }

        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); cand.len()];
        let mut total = 0.0;
        let mut min_score: Option<f64> = None;
        for &(u, v, s) in scores {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::input(format!(
                    "score of ({u}, {v}) must be finite and non-negative, got {s}"
                )));
            }
            if u == v {
                return Err(Error::input(format!("self-pair score on node {u}")));
            }
            let (&i, &j) = match (local.get(&u), local.get(&v)) {
                (Some(i), Some(j)) => (i, j),
                _ => {
                    return Err(Error::input(format!(
                        "scored pair ({u}, {v}) is not within the candidates"
                    )))
                }
            };
            if s == 0.0 {
                continue;
            }
            adj[i].push((j, s));
            adj[j].push((i, s));
            total += s;
            min_score = Some(min_score.map_or(s, |m: f64| m.min(s)));
        }
        for row in &mut adj {
            row.sort_unstable_by_key(|&(j, _)| j);
            if row.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::input("scored pairs contain duplicates"));
            }
        }
        let degree = adj
            .iter()
            .map(|row| row.iter().map(|&(_, s)| s).sum())
            .collect();
        let universe_penalty_sum = pen.iter().sum();
        let universe_penalty_min = pen.iter().copied().fold(f64::INFINITY, f64::min);

        Ok(DensityInstance {
            candidates: cand,
            local,
            is_anchor,
            anchor,
            scores: adj,
            penalty: pen,
            degree,
            total_score: total,
            min_score,
            universe_penalty_sum,
            universe_penalty_min,
        })
    }

    /// Takes the penalty sum and minimum for the bounds from the full node
    /// universe instead of the candidates.
    pub fn with_universe_penalty(mut self, sum: f64, min: f64) -> Result<Self> {
        let cand_sum: f64 = self.penalty.iter().sum();
        let cand_min = self.penalty.iter().copied().fold(f64::INFINITY, f64::min);
        if !(sum.is_finite() && min > 0.0) || sum < cand_sum * (1.0 - 1e-12) || min > cand_min {
            return Err(Error::input(format!(
                "universe penalty (sum {sum}, min {min}) cannot cover candidates (sum {cand_sum}, min {cand_min})"
            )));
        }
        self.universe_penalty_sum = sum;
        self.universe_penalty_min = min;
        Ok(self)
    }

    pub fn candidates(&self) -> &[NodeIndex] {
        &self.candidates
    }

    pub fn anchor(&self) -> &[NodeIndex] {
        &self.anchor
    }

    pub fn is_anchor(&self, node: NodeIndex) -> bool {
        self.local.get(&node).is_some_and(|&i| self.is_anchor[i])
    }

    /// Candidates outside the anchor.
    pub fn free_nodes(&self) -> Vec<NodeIndex> {
        self.candidates
            .iter()
            .zip(&self.is_anchor)
            .filter(|(_, &a)| !a)
            .map(|(&u, _)| u)
            .collect()
    }

    pub fn score(&self, u: NodeIndex, v: NodeIndex) -> f64 {
        let (Some(&i), Some(&j)) = (self.local.get(&u), self.local.get(&v)) else {
            return 0.0;
        };
        let row = &self.scores[i];
        row.binary_search_by_key(&j, |&(k, _)| k)
            .map_or(0.0, |k| row[k].1)
    }

    /// Nonzero-score neighbors of a candidate, as node indices.
    pub fn scored_neighbors(&self, node: NodeIndex) -> impl Iterator<Item = (NodeIndex, f64)> + '_ {
        let row = self
            .local
            .get(&node)
            .map_or(&[][..], |&i| &self.scores[i][..]);
        row.iter().map(|&(j, s)| (self.candidates[j], s))
    }

    /// Nonzero scored pairs `(u, v, score)` with `u < v`.
    pub fn scored_pairs(&self) -> Vec<(NodeIndex, NodeIndex, f64)> {
        let mut out = Vec::new();
        for (i, row) in self.scores.iter().enumerate() {
            for &(j, s) in row {
                if i < j {
                    out.push((self.candidates[i], self.candidates[j], s));
                }
            }
        }
        out
    }

    pub fn penalty(&self, node: NodeIndex) -> f64 {
        self.penalty[self.local[&node]]
    }

    /// `d(u)`: sum of scores between `u` and all candidates.
    pub fn degree(&self, node: NodeIndex) -> f64 {
        self.degree[self.local[&node]]
    }

    /// `U`: sum of all scores over candidate pairs.
    pub fn total_score(&self) -> f64 {
        self.total_score
    }

    pub fn universe_penalty_sum(&self) -> f64 {
        self.universe_penalty_sum
    }

    /// Density of `subset`: internal score sum over penalty sum.
    pub fn evaluate(&self, subset: &[NodeIndex]) -> Result<f64> {
        if subset.is_empty() {
            return Err(Error::input(
                "cannot evaluate the density of an empty subset",
            ));
        }
        let mut inside = vec![false; self.candidates.len()];
        for &u in subset {
            let &i = self
                .local
                .get(&u)
                .ok_or_else(|| Error::input(format!("node {u} is not a candidate")))?;
            if inside[i] {
                return Err(Error::input(format!("node {u} listed twice")));
            }
            inside[i] = true;
        }
        Ok(self.density_of(&inside))
    }

    fn density_of(&self, inside: &[bool]) -> f64 {
        let (mut weight, mut pen) = (0.0, 0.0);
        for (i, row) in self.scores.iter().enumerate() {
            if !inside[i] {
                continue;
            }
            pen += self.penalty[i];
            weight += row
                .iter()
                .filter(|&&(j, _)| j > i && inside[j])
                .map(|&(_, s)| s)
                .sum::<f64>();
        }
        weight / pen
    }

    /// Bisection interval and termination width, or `None` when every score is
    /// zero.
    pub fn compute_bounds(&self) -> Option<Bounds> {
        let min_score = self.min_score?;
        let total_pen = self.universe_penalty_sum;
        Some(Bounds {
            lower: min_score / total_pen,
            upper: self.total_score / self.universe_penalty_min,
            epsilon: min_score / (total_pen * total_pen),
            min_score,
            min_penalty: self.universe_penalty_min,
        })
    }

    /// Decides whether some anchored subset reaches density `delta` via one
    /// min-cut computation.
    pub fn feasibility(&self, delta: f64) -> Result<FeasibilityCheck> {
        self.feasibility_with(delta, false)
    }

    fn feasibility_with(&self, delta: f64, audit: bool) -> Result<FeasibilityCheck> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::input(format!(
                "target density must be finite and non-negative, got {delta}"
            )));
        }
        let m = self.candidates.len();
        let (source, sink) = (m, m + 1);
        let big_u = self.total_score;
        let mut net = FlowNetwork::new(m + 2, source, sink)?;
        for i in 0..m {
            if self.is_anchor[i] {
                net.add_infinite_arc(source, i)?;
            } else {
                net.add_arc(source, i, big_u)?;
            }
        }
        for i in 0..m {
            let mut cap = big_u + 2.0 * delta * self.penalty[i] - self.degree[i];
            if cap < 0.0 {
                // d(u) ≤ U holds exactly; only summation-order rounding can undershoot.
                if cap < -1e-9 * big_u.max(1.0) {
                    return Err(Error::invariant(format!(
                        "sink capacity {cap} negative for node {}",
                        self.candidates[i]
                    )));
                }
                cap = 0.0;
            }
            net.add_arc(i, sink, cap)?;
        }
        for (i, row) in self.scores.iter().enumerate() {
            for &(j, s) in row {
                if i < j {
                    net.add_undirected_capacity(i, j, s)?;
                }
            }
        }

        let cut = net.max_flow()?;
        let (duality_error, conservation_error) = if audit {
            (
                Some((net.verify_cut(&cut)? - cut.flow).abs()),
                Some(net.conservation_violation()),
            )
        } else {
            (None, None)
        };

        let mut inside = vec![false; m];
        for &i in &cut.source_side {
            inside[i] = true;
        }
        if let Some(i) = (0..m).find(|&i| self.is_anchor[i] && !inside[i]) {
            return Err(Error::invariant(format!(
                "anchor node {} fell on the sink side of a finite cut",
                self.candidates[i]
            )));
        }
        let source_side: Vec<NodeIndex> = cut
            .source_side
            .iter()
            .map(|&i| self.candidates[i])
            .collect();
        // h_δ(side) ≤ 0  ⇔  internal score ≥ δ · penalty; evaluated directly
        // rather than through flow − |N|·U, which cancels catastrophically.
        let witness = (!source_side.is_empty() && {
            let (weight, pen) = self.weight_and_penalty(&inside);
            weight >= delta * pen
        })
        .then(|| source_side.clone());

        Ok(FeasibilityCheck {
            delta,
            flow: cut.flow,
            offset: m as f64 * big_u,
            source_side,
            witness,
            duality_error,
            conservation_error,
        })
    }

    fn weight_and_penalty(&self, inside: &[bool]) -> (f64, f64) {
        let (mut weight, mut pen) = (0.0, 0.0);
        for (i, row) in self.scores.iter().enumerate() {
            if inside[i] {
                pen += self.penalty[i];
                weight += row
                    .iter()
                    .filter(|&&(j, _)| j > i && inside[j])
                    .map(|&(_, s)| s)
                    .sum::<f64>();
            }
        }
        (weight, pen)
    }

    /// Maximizes density over anchored subsets with default options.
    pub fn maximize(&self) -> Result<DensityResult> {
        self.maximize_with(&SolveOptions::default())
    }

    pub fn maximize_with(&self, opts: &SolveOptions) -> Result<DensityResult> {
        if self.candidates.is_empty() {
            return Err(Error::input("density instance has no candidates"));
        }
        let mut trace = Vec::new();
        let Some(bounds) = self.compute_bounds() else {
            return Ok(DensityResult {
                subset: self.anchor.clone(),
                score: 0.0,
                iterations: 0,
                refinements: 0,
                final_window: 0.0,
                stop: StopReason::NoSignal,
                bounds: None,
                trace,
            });
        };

        let (mut lo, mut hi) = (bounds.lower, bounds.upper);
        let mut best = self.anchor.clone();
        let mut iterations = 0;
        let stop = loop {
            let window = hi - lo;
            if window <= bounds.epsilon {
                break StopReason::Epsilon;
            }
            if iterations >= opts.max_iterations {
                break StopReason::IterationCap;
            }
            if window < WINDOW_FLOOR * hi {
                break StopReason::WindowFloor;
            }
            let mid = 0.5 * (lo + hi);
            let check = self.feasibility_with(mid, opts.audit)?;
            iterations += 1;
            match &check.witness {
                Some(w) => {
                    lo = mid;
                    best = w.clone();
                }
                None => hi = mid,
            }
            if opts.trace {
                trace.push(IterationRecord {
                    phase: Phase::Bisection,
                    check,
                });
            }
        };
        let final_window = hi - lo;

        let mut score = if best.is_empty() {
            0.0
        } else {
            self.evaluate(&best)?
        };
        let mut refinements = 0;
        if opts.refine {
            for _ in 0..MAX_REFINEMENTS {
                let check = self.feasibility_with(score, opts.audit)?;
                let improved = if check.source_side.is_empty() {
                    None
                } else {
                    let s = self.evaluate(&check.source_side)?;
                    (s > score + 1e-12 * score.max(f64::MIN_POSITIVE)).then_some(s)
                };
                let side = check.source_side.clone();
                if opts.trace {
                    trace.push(IterationRecord {
                        phase: Phase::Refinement,
                        check,
                    });
                }
                match improved {
                    Some(s) => {
                        best = side;
                        score = s;
                        refinements += 1;
                    }
                    None => break,
                }
            }
        }

        Ok(DensityResult {
            subset: best,
            score,
            iterations,
            refinements,
            final_window,
            stop,
            bounds: Some(bounds),
            trace,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit(_: NodeIndex) -> f64 {
        1.0
    }

    fn path_instance(anchor: &[NodeIndex]) -> DensityInstance {
        DensityInstance::new(
            &[1, 2, 3],
            anchor,
            &[(1, 2, 3.0), (2, 3, 3.0), (1, 3, 0.0)],
            unit,
        )
        .unwrap()
    }

    /// Every anchored subset with its density; exponential, test only.
    fn enumerate(inst: &DensityInstance) -> Vec<(Vec<NodeIndex>, f64)> {
        let free = inst.free_nodes();
        (0u32..1 << free.len())
            .filter_map(|mask| {
                let mut s = inst.anchor().to_vec();
                s.extend(
                    free.iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &u)| u),
                );
                s.sort_unstable();
                (!s.is_empty()).then(|| {
                    let pen: f64 = s.iter().map(|&u| inst.penalty(u)).sum();
                    let mut w = 0.0;
                    for (a, &u) in s.iter().enumerate() {
                        for &v in &s[a + 1..] {
                            w += inst.score(u, v);
                        }
                    }
                    (s, w / pen)
                })
            })
            .collect()
    }

    fn enumerated_max(inst: &DensityInstance) -> f64 {
        enumerate(inst)
            .iter()
            .map(|e| e.1)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn evaluate_examples() {
        let inst = path_instance(&[1]);
        assert_eq!(inst.evaluate(&[1, 2, 3]).unwrap(), 2.0);
        assert_eq!(inst.evaluate(&[2]).unwrap(), 0.0);
        assert!(inst.evaluate(&[]).is_err());
        assert!(inst.evaluate(&[9]).is_err());
        assert!(inst.evaluate(&[1, 1]).is_err());

        let doubled =
            DensityInstance::new(&[1, 2, 3], &[1], &[(1, 2, 3.0), (2, 3, 3.0)], |_| 2.0).unwrap();
        assert_eq!(doubled.evaluate(&[1, 2, 3]).unwrap(), 1.0);
    }

    #[test]
    fn bounds_examples() {
        let b = path_instance(&[1]).compute_bounds().unwrap();
        assert_eq!((b.min_score, b.lower, b.upper), (3.0, 1.0, 6.0));
        assert!((b.epsilon - 1.0 / 3.0).abs() < 1e-15);

        let n = 7;
        let nodes: Vec<_> = (0..n).collect();
        let single = DensityInstance::new(&nodes, &[], &[(2, 5, 2.5)], unit).unwrap();
        let b = single.compute_bounds().unwrap();
        assert_eq!(b.lower, 2.5 / n as f64);
        assert_eq!(b.upper, 2.5);
        assert_eq!(b.epsilon, 2.5 / (n * n) as f64);

        let silent = DensityInstance::new(&[1, 2], &[1], &[(1, 2, 0.0)], unit).unwrap();
        assert!(silent.compute_bounds().is_none());
    }

    #[test]
    fn bounds_use_universe_penalty() {
        let b = path_instance(&[1])
            .with_universe_penalty(6.0, 0.5)
            .unwrap()
            .compute_bounds()
            .unwrap();
        assert_eq!((b.lower, b.upper, b.epsilon), (0.5, 12.0, 3.0 / 36.0));
        assert!(path_instance(&[1]).with_universe_penalty(2.0, 1.0).is_err());
        assert!(path_instance(&[1]).with_universe_penalty(5.0, 2.0).is_err());
    }

    #[test]
    fn no_density_difference_below_epsilon() {
        let inst = path_instance(&[1]);
        let eps = inst.compute_bounds().unwrap().epsilon;
        let all = enumerate(
            &DensityInstance::new(&[1, 2, 3], &[], &[(1, 2, 3.0), (2, 3, 3.0)], unit).unwrap(),
        );
        for (_, x) in &all {
            for (_, y) in &all {
                let d = (x - y).abs();
                assert!(d == 0.0 || d >= eps, "difference {d} below epsilon {eps}");
            }
        }
    }

    #[test]
    fn feasibility_examples() {
        let inst = path_instance(&[1]);
        let check = inst.feasibility(1.0).unwrap();
        assert_eq!(check.witness, Some(vec![1, 2, 3]));
        assert!(inst.feasibility(2.5).unwrap().witness.is_none());
        assert!(inst.feasibility(0.0).unwrap().witness.is_some());
        assert!(inst.feasibility(-1.0).is_err());
        assert!(inst.feasibility(f64::NAN).is_err());
    }

    #[test]
    fn maximize_examples() {
        let r = path_instance(&[1]).maximize().unwrap();
        assert_eq!((r.subset.as_slice(), r.score), (&[1, 2, 3][..], 2.0));
        assert_eq!(r.stop, StopReason::Epsilon);

        let inst =
            DensityInstance::new(&[1, 2, 3], &[1], &[(1, 2, 4.0), (2, 3, 1.0)], unit).unwrap();
        let r = inst.maximize().unwrap();
        assert_eq!((r.subset.as_slice(), r.score), (&[1, 2][..], 2.0));

        let full = path_instance(&[1, 2, 3]);
        let r = full.maximize().unwrap();
        assert_eq!(r.subset, vec![1, 2, 3]);
        assert_eq!(r.score, full.evaluate(&[1, 2, 3]).unwrap());
    }

    #[test]
    fn no_signal_returns_anchor() {
        let inst = DensityInstance::new(&[1, 2, 3], &[2], &[], unit).unwrap();
        let r = inst.maximize().unwrap();
        assert_eq!(
            (r.subset, r.score, r.stop),
            (vec![2], 0.0, StopReason::NoSignal)
        );
    }

    #[test]
    fn seedless_finds_densest_block() {
        // clique on {0,1,2,3} with weight 1, a pendant edge elsewhere
        let mut scores = Vec::new();
        for u in 0..4 {
            for v in u + 1..4 {
                scores.push((u, v, 1.0));
            }
        }
        scores.push((4, 5, 1.0));
        let inst = DensityInstance::new(&[0, 1, 2, 3, 4, 5], &[], &scores, unit).unwrap();
        let r = inst.maximize().unwrap();
        assert_eq!(r.subset, vec![0, 1, 2, 3]);
        assert_eq!(r.score, 1.5);
    }

    #[test]
    fn construction_errors() {
        assert!(DensityInstance::new(&[1, 1], &[], &[], unit).is_err());
        assert!(DensityInstance::new(&[1, 2], &[3], &[], unit).is_err());
        assert!(DensityInstance::new(&[1, 2], &[], &[(1, 3, 1.0)], unit).is_err());
        assert!(DensityInstance::new(&[1, 2], &[], &[(1, 1, 1.0)], unit).is_err());
        assert!(DensityInstance::new(&[1, 2], &[], &[(1, 2, -1.0)], unit).is_err());
        assert!(DensityInstance::new(&[1, 2], &[], &[(1, 2, 1.0), (2, 1, 1.0)], unit).is_err());
        assert!(DensityInstance::new(&[1, 2], &[], &[], |_| 0.0).is_err());
        let empty = DensityInstance::new(&[], &[], &[], unit).unwrap();
        assert!(empty.maximize().is_err());
    }

    #[test]
    fn refinement_closes_the_epsilon_gap() {
        // Two disjoint pairs whose densities differ by far less than epsilon.
        let scores = [(1, 2, 1.0), (3, 4, 1.0 + 1e-7)];
        let inst = DensityInstance::new(&[1, 2, 3, 4], &[], &scores, unit).unwrap();
        let exact = enumerated_max(&inst);
        let r = inst.maximize().unwrap();
        assert_eq!(r.subset, vec![3, 4]);
        assert!((r.score - exact).abs() <= 1e-12, "{} vs {exact}", r.score);
        let loose = inst
            .maximize_with(&SolveOptions {
                refine: false,
                ..SolveOptions::default()
            })
            .unwrap();
        let eps = loose.bounds.unwrap().epsilon;
        assert!(exact - loose.score <= eps);
    }

    #[derive(Debug, Clone)]
    struct Case {
        n: usize,
        anchor: Vec<NodeIndex>,
        scores: Vec<(NodeIndex, NodeIndex, f64)>,
        penalties: Vec<f64>,
    }

    fn arb_case() -> impl Strategy<Value = Case> {
        (2usize..11).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .collect();
            let np = pairs.len();
            (
                Just(n),
                prop::collection::vec(prop::bool::weighted(0.3), n),
                prop::collection::vec(
                    prop_oneof![Just(0.0), (1u32..6).prop_map(f64::from), 0.01f64..5.0],
                    np,
                ),
                prop::collection::vec(prop_oneof![Just(1.0), 0.5f64..3.0], n),
            )
                .prop_map(move |(n, anchor, w, penalties)| Case {
                    n,
                    anchor: (0..n).filter(|&u| anchor[u]).collect(),
                    scores: pairs
                        .iter()
                        .zip(&w)
                        .map(|(&(u, v), &s)| (u, v, s))
                        .collect(),
                    penalties,
                })
        })
    }

    fn build(c: &Case) -> DensityInstance {
        let nodes: Vec<_> = (0..c.n).collect();
        let pen = c.penalties.clone();
        DensityInstance::new(&nodes, &c.anchor, &c.scores, move |u| pen[u]).unwrap()
    }

    /// `h_δ(g)` straight from its definition.
    fn h_delta(inst: &DensityInstance, g: &[NodeIndex], delta: f64) -> f64 {
        let inside = |u: NodeIndex| g.contains(&u);
        let mut h = 0.0;
        for &u in g {
            let d: f64 = inst.candidates().iter().map(|&v| inst.score(u, v)).sum();
            h += 2.0 * delta * inst.penalty(u) - d;
            h += inst
                .candidates()
                .iter()
                .filter(|&&v| !inside(v))
                .map(|&v| inst.score(u, v))
                .sum::<f64>();
        }
        h
    }

    proptest! {
        #[test]
        fn matches_enumeration(c in arb_case()) {
            let inst = build(&c);
            let exact = enumerated_max(&inst);
            let r = inst.maximize().unwrap();
            prop_assert!((r.score - exact).abs() <= 1e-9 * exact.abs().max(1.0), "{} vs {}", r.score, exact);
            if r.subset.is_empty() {
                prop_assert_eq!(r.stop, StopReason::NoSignal);
            } else {
                prop_assert!((inst.evaluate(&r.subset).unwrap() - r.score).abs() <= 1e-12);
            }
            for a in inst.anchor() {
                prop_assert!(r.subset.contains(a));
            }
        }

        #[test]
        fn every_check_is_sound(c in arb_case()) {
            let inst = build(&c);
            let r = inst.maximize_with(&SolveOptions { trace: true, audit: true, ..SolveOptions::default() }).unwrap();
            for rec in &r.trace {
                let chk = &rec.check;
                prop_assert!(chk.duality_error.unwrap() <= 1e-9 * chk.flow.max(1.0));
                prop_assert!(chk.conservation_error.unwrap() <= 1e-9);
                let h = h_delta(&inst, &chk.source_side, chk.delta);
                prop_assert!((chk.gap() - h).abs() <= 1e-6, "gap {} vs h {}", chk.gap(), h);
                if let Some(w) = &chk.witness {
                    prop_assert!(inst.evaluate(w).unwrap() >= chk.delta - 1e-9);
                }
            }
            if r.stop == StopReason::Epsilon {
                prop_assert!(r.iterations <= r.bounds.unwrap().iteration_bound());
            }
        }

        #[test]
        fn scaling_scores_scales_optimum(c in arb_case(), lambda in 0.1f64..10.0) {
            let inst = build(&c);
            let mut scaled = c.clone();
            scaled.scores.iter_mut().for_each(|s| s.2 *= lambda);
            let r1 = inst.maximize().unwrap();
            let r2 = build(&scaled).maximize().unwrap();
            prop_assert!((r2.score - lambda * r1.score).abs() <= 1e-9 * r2.score.abs().max(1.0));
        }

        #[test]
        fn commensurate_scores_respect_epsilon(c in arb_case()) {
            // integer scores with uniform penalties: distinct densities differ by ≥ ε
            let mut c = c;
            c.scores.iter_mut().for_each(|s| s.2 = s.2.round());
            c.penalties.iter_mut().for_each(|p| *p = 1.0);
            let inst = build(&c);
            prop_assume!(inst.compute_bounds().is_some());
            let b = inst.compute_bounds().unwrap();
            prop_assume!(b.min_score == 1.0);
            let all = enumerate(&inst);
            for (_, x) in &all {
                for (_, y) in &all {
                    let d = (x - y).abs();
                    prop_assert!(d <= 1e-12 || d >= b.epsilon * (1.0 - 1e-12));
                }
            }
            // Without refinement the bisection alone is exact once any midpoint
            // was feasible; an optimum sitting on the lower bound is never probed.
            let plain = inst.maximize_with(&SolveOptions { refine: false, trace: true, ..SolveOptions::default() }).unwrap();
            if plain.trace.iter().any(|r| r.check.witness.is_some()) {
                prop_assert!((plain.score - enumerated_max(&inst)).abs() <= 1e-9);
            }
        }
    }
}
