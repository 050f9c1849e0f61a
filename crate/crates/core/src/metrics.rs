//! Edge coherence, edge contrast and node penalty: the three functions that
//! define one mining problem.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::NodeIndex;

/// Smaller of the two weights: an edge is only as coherent as its weaker side.
pub fn default_coherence(wa: f64, wb: f64) -> f64 {
    wa.min(wb)
}

/// Absolute weight difference.
pub fn default_contrast(wa: f64, wb: f64) -> f64 {
    (wa - wb).abs()
}

/// Uniform node penalty.
pub fn default_penalty(_node: NodeIndex) -> f64 {
    1.0
}

/// A named per-edge score over the pair of weights `(E_A(u,v), E_B(u,v))`.
#[derive(Clone)]
pub struct EdgeMetric {
    name: String,
    f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl EdgeMetric {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        EdgeMetric {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// Built-in metrics: `min` and `absdiff`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "min" => Ok(Self::new("min", default_coherence)),
            "absdiff" => Ok(Self::new("absdiff", default_contrast)),
            other => Err(Error::input(format!(
                "unknown edge metric {other:?} (expected min|absdiff)"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Scores one edge, rejecting negative or non-finite outputs.
    pub fn score(&self, wa: f64, wb: f64) -> Result<f64> {
        let s = (self.f)(wa, wb);
        if s >= 0.0 && s.is_finite() {
            Ok(s)
        } else {
            Err(Error::input(format!(
                "edge metric {:?} returned {s} for weights ({wa}, {wb}); scores must be finite and non-negative",
                self.name
            )))
        }
    }

    pub fn as_fn(&self) -> impl Fn(f64, f64) -> f64 + '_ {
        move |a, b| (self.f)(a, b)
    }
}

impl fmt::Debug for EdgeMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("EdgeMetric").field(&self.name).finish()
    }
}

/// A named positive per-node penalty.
#[derive(Clone)]
pub struct NodePenalty {
    name: String,
    f: Arc<dyn Fn(NodeIndex) -> f64 + Send + Sync>,
}

impl NodePenalty {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(NodeIndex) -> f64 + Send + Sync + 'static,
    ) -> Self {
        NodePenalty {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// Built-in penalties: `uniform`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "uniform" => Ok(Self::new("uniform", default_penalty)),
            other => Err(Error::input(format!(
                "unknown node penalty {other:?} (expected uniform)"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn penalty(&self, node: NodeIndex) -> Result<f64> {
        let p = (self.f)(node);
        if p > 0.0 && p.is_finite() {
            Ok(p)
        } else {
            Err(Error::input(format!(
                "node penalty {:?} returned {p} for node {node}; penalties must be finite and positive",
                self.name
            )))
        }
    }
}

impl fmt::Debug for NodePenalty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("NodePenalty").field(&self.name).finish()
    }
}

/// The `(coherence, contrast, penalty)` triple defining one problem instance.
#[derive(Clone, Debug)]
pub struct MetricSet {
    pub coherence: EdgeMetric,
    pub contrast: EdgeMetric,
    pub penalty: NodePenalty,
}

impl MetricSet {
    pub fn by_names(coherence: &str, contrast: &str, penalty: &str) -> Result<Self> {
        Ok(MetricSet {
            coherence: EdgeMetric::by_name(coherence)?,
            contrast: EdgeMetric::by_name(contrast)?,
            penalty: NodePenalty::by_name(penalty)?,
        })
    }
}

impl Default for MetricSet {
    /// `min` coherence, `absdiff` contrast, `uniform` penalty.
    fn default() -> Self {
        MetricSet::by_names("min", "absdiff", "uniform").expect("built-in metrics")
    }
}

/// Outcome of one axiom probe. A failure always carries the offending input.
#[derive(Debug, Clone, PartialEq)]
pub enum AxiomOutcome {
    Pass,
    Fail { input: (f64, f64), detail: String },
}

impl AxiomOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, AxiomOutcome::Pass)
    }
}

/// Results of probing an edge-contrast function for the three requirements
/// every contrast metric should meet.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    /// `f(a, b) == f(b, a)`.
    pub symmetric: AxiomOutcome,
    /// `f(x, x) == 0`.
    pub zero: AxiomOutcome,
    /// With `a <= b`, raising `b` or lowering `a` strictly raises `f`.
    pub monotone: AxiomOutcome,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.symmetric.passed() && self.zero.passed() && self.monotone.passed()
    }
}

/// Relative perturbation used by the monotonicity probe.
pub const MONOTONE_STEP: f64 = 1e-3;

/// Probes `metric` on every sample. Only the first counterexample per axiom is
/// kept.
pub fn check_axioms(
    metric: impl Fn(f64, f64) -> f64,
    samples: &[(f64, f64)],
) -> Result<AxiomReport> {
    if samples.is_empty() {
        return Err(Error::input("axiom check needs at least one sample"));
    }
    if let Some(&s) = samples.iter().find(|(a, b)| !(*a >= 0.0 && *b >= 0.0)) {
        return Err(Error::input(format!(
            "axiom samples must be non-negative, got {s:?}"
        )));
    }

    let mut symmetric = AxiomOutcome::Pass;
    let mut zero = AxiomOutcome::Pass;
    let mut monotone = AxiomOutcome::Pass;
    for &(a, b) in samples {
        if symmetric.passed() {
            let (ab, ba) = (metric(a, b), metric(b, a));
            if ab != ba {
                symmetric = AxiomOutcome::Fail {
                    input: (a, b),
                    detail: format!("f({a}, {b}) = {ab} but f({b}, {a}) = {ba}"),
                };
            }
        }
        for x in [a, b] {
            let v = metric(x, x);
            if zero.passed() && v != 0.0 {
                zero = AxiomOutcome::Fail {
                    input: (x, x),
                    detail: format!("f({x}, {x}) = {v}"),
                };
            }
        }
        if monotone.passed() {
            if let Some(fail) = probe_monotone(&metric, a, b) {
                monotone = fail;
            }
        }
    }
    Ok(AxiomReport {
        symmetric,
        zero,
        monotone,
    })
}

fn probe_monotone(metric: impl Fn(f64, f64) -> f64, a: f64, b: f64) -> Option<AxiomOutcome> {
    // Probe in the sample's own argument order; the smaller weight may be
    // either argument.
    let a_is_low = a <= b;
    let (lo, hi) = if a_is_low { (a, b) } else { (b, a) };
    let call = |lo: f64, hi: f64| {
        if a_is_low {
            metric(lo, hi)
        } else {
            metric(hi, lo)
        }
    };
    let step = if hi > 0.0 {
        MONOTONE_STEP * hi
    } else {
        MONOTONE_STEP
    };
    let base = call(lo, hi);

    let raised = call(lo, hi + step);
    if raised <= base || raised.is_nan() {
        return Some(AxiomOutcome::Fail {
            input: (a, b),
            detail: format!(
                "raising the larger weight {hi} by {step} moved f from {base} to {raised}"
            ),
        });
    }
    if lo - step >= 0.0 {
        let lowered = call(lo - step, hi);
        if lowered <= base || lowered.is_nan() {
            return Some(AxiomOutcome::Fail {
                input: (a, b),
                detail: format!(
                    "lowering the smaller weight {lo} by {step} moved f from {base} to {lowered}"
                ),
            });
        }
    }
    None
}

/// An `n x n` grid of weight pairs over `[0, max]`, including both axes.
pub fn sample_grid(n: usize, max: f64) -> Vec<(f64, f64)> {
    let step = if n > 1 { max / (n - 1) as f64 } else { 0.0 };
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i as f64 * step, j as f64 * step)))
        .collect()
}
