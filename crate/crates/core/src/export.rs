//! Serializations of a [`MiningOutcome`]: JSON, Graphviz DOT and the
//! weight-matrix CSV pair.
//!
//! Node sets are written as labels sorted lexicographically, so output does
//! not depend on the order in which labels were first read.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph_pair::{GraphPair, Side};
use crate::metrics::MetricSet;
use crate::miner::{MineOptions, MiningOutcome, SolveSummary};
use crate::NodeIndex;

/// Value of the `format` field in JSON reports.
pub const FORMAT_TAG: &str = "contrast-outcome/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub format: String,
    pub parameters: Parameters,
    pub seeds: Vec<String>,
    pub core: CoreReport,
    pub subgraphs: Vec<SubgraphReport>,
    pub edges: Vec<EdgeReport>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    pub radius: usize,
    pub radius_grow: usize,
    pub max_subgraphs: usize,
    pub no_core: bool,
    pub no_neighbor: bool,
    pub coherence: String,
    pub contrast: String,
    pub penalty: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoreReport {
    pub nodes: Vec<String>,
    pub score: f64,
    pub solver: Option<SolverReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgraphReport {
    pub rank: usize,
    pub nodes: Vec<String>,
    pub added: Vec<String>,
    pub score: f64,
    pub solver: SolverReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverReport {
    pub candidates: usize,
    pub iterations: usize,
    pub refinements: usize,
    pub stop: String,
    pub final_window: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeReport {
    pub u: String,
    pub v: String,
    pub weight_a: f64,
    pub weight_b: f64,
    pub coherence: f64,
    pub contrast: f64,
}

impl From<&SolveSummary> for SolverReport {
    fn from(s: &SolveSummary) -> Self {
        let stop = serde_json::to_value(s.stop)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        SolverReport {
            candidates: s.candidates,
            iterations: s.iterations,
            refinements: s.refinements,
            stop,
            final_window: s.final_window,
            lower: s.bounds.map(|b| b.lower),
            upper: s.bounds.map(|b| b.upper),
            epsilon: s.bounds.map(|b| b.epsilon),
        }
    }
}

fn names(pair: &GraphPair, nodes: &[NodeIndex]) -> Vec<String> {
    let mut v: Vec<String> = nodes.iter().map(|&u| pair.label(u).to_owned()).collect();
    v.sort();
    v
}

impl Report {
    pub fn new(
        pair: &GraphPair,
        metrics: &MetricSet,
        opts: &MineOptions,
        outcome: &MiningOutcome,
    ) -> Self {
        let mut edges: Vec<EdgeReport> = outcome
            .edges
            .iter()
            .map(|e| {
                let (mut u, mut v) = (pair.label(e.u).to_owned(), pair.label(e.v).to_owned());
                if v < u {
                    std::mem::swap(&mut u, &mut v);
                }
                EdgeReport {
                    u,
                    v,
                    weight_a: e.weight_a,
                    weight_b: e.weight_b,
                    coherence: e.coherence,
                    contrast: e.contrast,
                }
            })
            .collect();
        edges.sort_by(|a, b| (&a.u, &a.v).cmp(&(&b.u, &b.v)));
        Report {
            format: FORMAT_TAG.to_owned(),
            parameters: Parameters {
                radius: opts.radius,
                radius_grow: opts.grow_radius(),
                max_subgraphs: opts.max_subgraphs,
                no_core: opts.no_core,
                no_neighbor: opts.no_neighbor,
                coherence: metrics.coherence.name().to_owned(),
                contrast: metrics.contrast.name().to_owned(),
                penalty: metrics.penalty.name().to_owned(),
            },
            seeds: names(pair, &outcome.seeds),
            core: CoreReport {
                nodes: names(pair, &outcome.core),
                score: outcome.core_score,
                solver: outcome.core_summary.as_ref().map(SolverReport::from),
            },
            subgraphs: outcome
                .subgraphs
                .iter()
                .enumerate()
                .map(|(i, g)| SubgraphReport {
                    rank: i + 1,
                    nodes: names(pair, &g.nodes),
                    added: names(pair, &g.added),
                    score: g.score,
                    solver: SolverReport::from(&g.summary),
                })
                .collect(),
            edges,
            warnings: outcome.warnings.clone(),
        }
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Net weight shift of `u` towards the core, `Σ_c E_A(u,c) − E_B(u,c)`.
pub fn shift_toward(pair: &GraphPair, u: NodeIndex, core: &[NodeIndex]) -> f64 {
    core.iter()
        .map(|&c| pair.weight(Side::A, u, c) - pair.weight(Side::B, u, c))
        .sum()
}

/// `-` when the node is tied to the core more strongly in graph A, `+` when
/// more strongly in graph B, empty when balanced.
pub fn shift_mark(shift: f64) -> &'static str {
    if shift > 0.0 {
        "-"
    } else if shift < 0.0 {
        "+"
    } else {
        ""
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering of the first contrast subgraph. Core nodes are boxes;
/// added nodes carry a `+`/`-` mark and a color for the sign of their shift
/// toward the core. Edges are labelled `wA/wB`.
pub fn to_dot(pair: &GraphPair, outcome: &MiningOutcome) -> String {
    let mut out = String::from("graph contrast {\n  node [shape=ellipse];\n");
    let Some(first) = outcome.subgraphs.first() else {
        out.push_str("}\n");
        return out;
    };
    let mut nodes: Vec<NodeIndex> = first.nodes.clone();
    nodes.sort_by(|&a, &b| pair.label(a).cmp(pair.label(b)));
    for &u in &nodes {
        let name = pair.label(u);
        if outcome.core.binary_search(&u).is_ok() {
            let _ = writeln!(out, "  {} [shape=box];", quote(name));
        } else {
            let mark = shift_mark(shift_toward(pair, u, &outcome.core));
            let color = match mark {
                "+" => "firebrick",
                "-" => "steelblue",
                _ => "gray",
            };
            let _ = writeln!(
                out,
                "  {} [label={}, color={color}];",
                quote(name),
                quote(&format!("{name}{mark}"))
            );
        }
    }
    let mut edges: Vec<(&str, &str, f64, f64)> = outcome
        .edges
        .iter()
        .map(|e| {
            let (a, b) = (pair.label(e.u), pair.label(e.v));
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            (a, b, e.weight_a, e.weight_b)
        })
        .collect();
    edges.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
    for (a, b, wa, wb) in edges {
        let _ = writeln!(out, "  {} -- {} [label=\"{wa}/{wb}\"];", quote(a), quote(b));
    }
    out.push_str("}\n");
    out
}

/// Order for matrix exports: added nodes by descending graph-A weight
/// inside the subgraph, then core nodes, ties broken by label.
pub fn matrix_order(pair: &GraphPair, outcome: &MiningOutcome) -> Vec<String> {
    let Some(first) = outcome.subgraphs.first() else {
        return Vec::new();
    };
    let strength = |u: NodeIndex| -> f64 {
        first
            .nodes
            .iter()
            .map(|&v| pair.weight(Side::A, u, v))
            .sum()
    };
    let mut added: Vec<(f64, &str)> = first
        .added
        .iter()
        .map(|&u| (strength(u), pair.label(u)))
        .collect();
    added.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(y.1)));
    let mut out: Vec<String> = added.into_iter().map(|(_, l)| l.to_owned()).collect();
    out.extend(names(pair, &outcome.core));
    out
}

/// Weight matrices of the first contrast subgraph in graph A and graph B.
pub fn to_matrices(pair: &GraphPair, outcome: &MiningOutcome) -> Result<(String, String)> {
    pair.export_matrix(&matrix_order(pair, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::miner::mine;

    fn sample() -> (GraphPair, MiningOutcome, MineOptions) {
        let shared = [("a", "b", 2.0), ("b", "c", 2.0), ("a", "c", 2.0)];
        let mut a = shared.to_vec();
        a.extend([("a", "x", 4.0), ("b", "x", 4.0)]);
        let mut b = shared.to_vec();
        b.extend([("c", "y", 5.0), ("b", "y", 5.0)]);
        let pair = GraphPair::from_edges(&a, &b).unwrap();
        let opts = MineOptions::new(1);
        let seeds = pair.indices_of(&["a"]).unwrap();
        let out = mine(&pair, &MetricSet::default(), &seeds, &opts).unwrap();
        (pair, out, opts)
    }

    #[test]
    fn json_round_trips_and_sorts_labels() {
        let (pair, out, opts) = sample();
        let report = Report::new(&pair, &MetricSet::default(), &opts, &out);
        assert_eq!(report.core.nodes, vec!["a", "b", "c"]);
        assert_eq!(report.subgraphs[0].added, vec!["x", "y"]);
        assert_eq!(report.subgraphs[0].rank, 1);
        let text = report.to_json();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        assert!(report
            .edges
            .windows(2)
            .all(|w| (&w[0].u, &w[0].v) < (&w[1].u, &w[1].v)));
        assert_eq!(report.edges.len(), 7);
        assert_eq!(report.subgraphs[0].solver.stop, "epsilon");
    }

    #[test]
    fn dot_marks_direction() {
        let (pair, out, _) = sample();
        let dot = to_dot(&pair, &out);
        assert!(dot.starts_with("graph contrast {"));
        assert!(dot.contains("\"a\" [shape=box];"));
        assert!(dot.contains("\"x\" [label=\"x-\""));
        assert!(dot.contains("\"y\" [label=\"y+\""));
        assert!(dot.contains("\"a\" -- \"x\" [label=\"4/0\"];"));
        assert!(dot.contains("\"b\" -- \"y\" [label=\"0/5\"];"));
    }

    #[test]
    fn quoting() {
        assert_eq!(quote("a\"b\\"), "\"a\\\"b\\\\\"");
    }

    #[test]
    fn matrix_rows_follow_order() {
        let (pair, out, _) = sample();
        assert_eq!(matrix_order(&pair, &out), vec!["x", "y", "a", "b", "c"]);
        let (ma, mb) = to_matrices(&pair, &out).unwrap();
        assert_eq!(ma.lines().next().unwrap(), "x,y,a,b,c");
        assert_eq!(ma.lines().nth(1).unwrap(), "0,0,4,4,0");
        assert_eq!(mb.lines().nth(2).unwrap(), "0,0,0,5,5");
    }

    #[test]
    fn marks() {
        assert_eq!(
            (shift_mark(1.0), shift_mark(-1.0), shift_mark(0.0)),
            ("-", "+", "")
        );
    }
}
