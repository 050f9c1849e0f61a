//! Synthetic graph pairs with a planted coherent core and contrast block.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_pair::{GraphPair, Side};
use crate::NodeIndex;

/// Shape of a planted instance.
///
/// The core is a clique of weight `w_core` in both graphs. Each contrast node
/// links to one core node and to every other contrast node with weight
/// `w_con`, in graph A only. Background edges appear independently in each
/// graph with probability `p_bg` and a weight drawn uniformly from
/// `bg_weight`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantSpec {
    pub n: usize,
    pub core_size: usize,
    pub contrast_size: usize,
    pub p_bg: f64,
    pub bg_weight: (f64, f64),
    pub w_core: f64,
    pub w_con: f64,
    pub seed: u64,
}

impl PlantSpec {
    /// Noiseless spec with `w_core = 2`, `w_con = 3`.
    pub fn new(n: usize, core_size: usize, contrast_size: usize, seed: u64) -> Self {
        PlantSpec {
            n,
            core_size,
            contrast_size,
            p_bg: 0.0,
            bg_weight: (0.1, 0.3),
            w_core: 2.0,
            w_con: 3.0,
            seed,
        }
    }

    pub fn with_noise(mut self, p_bg: f64, lo: f64, hi: f64) -> Self {
        self.p_bg = p_bg;
        self.bg_weight = (lo, hi);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.core_size == 0 && self.contrast_size > 0 {
            return Err(Error::input(
                "a contrast block needs a core to attach to (core size is 0)",
            ));
        }
        if self.core_size + self.contrast_size > self.n {
            return Err(Error::input(format!(
                "core ({}) plus contrast ({}) exceeds the universe ({})",
                self.core_size, self.contrast_size, self.n
            )));
        }
        if !(0.0..=1.0).contains(&self.p_bg) {
            return Err(Error::input(format!(
                "background probability {} outside [0, 1]",
                self.p_bg
            )));
        }
        let (lo, hi) = self.bg_weight;
        for (name, w) in [
            ("core weight", self.w_core),
            ("contrast weight", self.w_con),
            ("background weight", lo),
        ] {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::input(format!(
                    "{name} must be positive and finite, got {w}"
                )));
            }
        }
        if !(hi >= lo && hi.is_finite()) {
            return Err(Error::input(format!(
                "background weight range ({lo}, {hi}) is empty"
            )));
        }
        Ok(())
    }
}

/// A generated pair with its ground truth, as labels.
#[derive(Debug, Clone)]
pub struct Planted {
    pub pair: GraphPair,
    pub core: Vec<String>,
    pub contrast: Vec<String>,
    pub spec: PlantSpec,
}

#[derive(Serialize)]
struct Truth<'a> {
    spec: std::borrow::Cow<'a, PlantSpec>,
    core: Vec<&'a str>,
    contrast: Vec<&'a str>,
}

impl Planted {
    pub fn core_indices(&self) -> Result<Vec<NodeIndex>> {
        sorted(self.pair.indices_of(&self.core)?)
    }

    pub fn contrast_indices(&self) -> Result<Vec<NodeIndex>> {
        sorted(self.pair.indices_of(&self.contrast)?)
    }

    pub fn truth_json(&self) -> String {
        let truth = Truth {
            spec: std::borrow::Cow::Borrowed(&self.spec),
            core: self.core.iter().map(String::as_str).collect(),
            contrast: self.contrast.iter().map(String::as_str).collect(),
        };
        serde_json::to_string_pretty(&truth).expect("ground truth serializes") + "\n"
    }

    /// Writes `<stem>_a.tsv`, `<stem>_b.tsv` and `<stem>_truth.json` into
    /// `dir`, returning the three paths.
    pub fn write_files(&self, dir: &Path, stem: &str) -> Result<[PathBuf; 3]> {
        let paths = [
            dir.join(format!("{stem}_a.tsv")),
            dir.join(format!("{stem}_b.tsv")),
            dir.join(format!("{stem}_truth.json")),
        ];
        for (side, path) in [(Side::A, &paths[0]), (Side::B, &paths[1])] {
            let file = File::create(path).map_err(|e| Error::io(path, e))?;
            let mut out = BufWriter::new(file);
            self.pair
                .write_edge_list(side, &mut out)
                .map_err(|e| Error::io(path, e))?;
            out.flush().map_err(|e| Error::io(path, e))?;
        }
        std::fs::write(&paths[2], self.truth_json()).map_err(|e| Error::io(&paths[2], e))?;
        Ok(paths)
    }
}

fn sorted(mut v: Vec<NodeIndex>) -> Result<Vec<NodeIndex>> {
    v.sort_unstable();
    Ok(v)
}

fn label(i: usize) -> String {
    format!("v{i}")
}

/// Builds the planted instance. Deterministic in `spec`. Nodes without any
/// edge do not appear in the pair.
pub fn generate(spec: &PlantSpec) -> Result<Planted> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut order: Vec<usize> = (0..spec.n).collect();
    order.shuffle(&mut rng);
    let core = &order[..spec.core_size];
    let block = &order[spec.core_size..spec.core_size + spec.contrast_size];

    let mut planted: HashSet<(usize, usize)> = HashSet::new();
    let key = |u: usize, v: usize| (u.min(v), u.max(v));
    let mut a: Vec<(usize, usize, f64)> = Vec::new();
    let mut b: Vec<(usize, usize, f64)> = Vec::new();
    for (i, &u) in core.iter().enumerate() {
        for &v in &core[i + 1..] {
            planted.insert(key(u, v));
            a.push((u, v, spec.w_core));
            b.push((u, v, spec.w_core));
        }
    }
    for (i, &u) in block.iter().enumerate() {
        let anchor = core[i % core.len()];
        planted.insert(key(u, anchor));
        a.push((anchor, u, spec.w_con));
        for &v in &block[i + 1..] {
            planted.insert(key(u, v));
            a.push((u, v, spec.w_con));
        }
    }
    for edges in [&mut a, &mut b] {
        for (u, v) in sample_pairs(&mut rng, spec.n, spec.p_bg) {
            if !planted.contains(&(u, v)) {
                let (lo, hi) = spec.bg_weight;
                let w = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
                edges.push((u, v, w));
            }
        }
    }

    let names: Vec<String> = (0..spec.n).map(label).collect();
    let view = |edges: &[(usize, usize, f64)]| -> Vec<(&str, &str, f64)> {
        edges
            .iter()
            .map(|&(u, v, w)| (names[u].as_str(), names[v].as_str(), w))
            .collect()
    };
    let pair = GraphPair::from_edges(&view(&a), &view(&b))?;
    let mut core_labels: Vec<String> = core.iter().map(|&u| label(u)).collect();
    let mut block_labels: Vec<String> = block.iter().map(|&u| label(u)).collect();
    core_labels.sort();
    block_labels.sort();
    Ok(Planted {
        pair,
        core: core_labels,
        contrast: block_labels,
        spec: spec.clone(),
    })
}

/// Each unordered pair `u < v` of `0..n` independently with probability `p`,
/// in lexicographic order. Uses geometric skips, so the cost follows the
/// number of pairs drawn.
fn sample_pairs(rng: &mut impl Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if p <= 0.0 || n < 2 {
        return out;
    }
    let log_q = (1.0 - p).ln();
    let (mut u, mut offset) = (0usize, 0usize);
    loop {
        let mut step = if p >= 1.0 {
            0
        } else {
            let x: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let s = (x.ln() / log_q).floor();
            if s >= usize::MAX as f64 / 4.0 {
                return out;
            }
            s as usize
        };
        // advance `step` pairs past the current position
        loop {
            let row = n - 1 - u;
            if offset + step < row {
                offset += step;
                break;
            }
            step -= row - offset;
            offset = 0;
            u += 1;
            if u + 1 >= n {
                return out;
            }
        }
        out.push((u, u + 1 + offset));
        offset += 1;
        if offset == n - 1 - u {
            offset = 0;
            u += 1;
            if u + 1 >= n {
                return out;
            }
        }
    }
}

/// Weight regimes for [`random_pair`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// Integers in `1..=5`.
    Integer,
    /// `ln(x) + 1` for integer `x` in `1..=20`.
    LogScaled,
}

/// Small unstructured pair over `n` labelled nodes `n0..`: each pair gets an
/// edge in A with probability `p`, independently in B, and with probability
/// `p_shared` in both. Used for oracle trials.
pub fn random_pair(
    rng: &mut impl Rng,
    n: usize,
    p: f64,
    p_shared: f64,
    kind: WeightKind,
) -> Result<GraphPair> {
    let draw = |rng: &mut dyn rand::RngCore| -> f64 {
        match kind {
            WeightKind::Integer => rng.gen_range(1..=5) as f64,
            WeightKind::LogScaled => (rng.gen_range(1..=20) as f64).ln() + 1.0,
        }
    };
    let names: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for u in 0..n {
        for v in u + 1..n {
            let (nu, nv) = (names[u].as_str(), names[v].as_str());
            if rng.gen_bool(p_shared) {
                a.push((nu, nv, draw(rng)));
                b.push((nu, nv, draw(rng)));
                continue;
            }
            if rng.gen_bool(p) {
                a.push((nu, nv, draw(rng)));
            }
            if rng.gen_bool(p) {
                b.push((nu, nv, draw(rng)));
            }
        }
    }
    if a.is_empty() && b.is_empty() {
        a.push((names[0].as_str(), names[1].as_str(), draw(rng)));
    }
    GraphPair::from_edges(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::MetricSet;
    use crate::miner::{find_contrast, find_core, mine, MineOptions};

    #[test]
    fn noiseless_block_scores_match_closed_form() {
        let mut spec = PlantSpec::new(50, 5, 8, 11);
        spec.w_core = 2.0;
        spec.w_con = 3.0;
        let p = generate(&spec).unwrap();
        let core = p.core_indices().unwrap();
        let block = p.contrast_indices().unwrap();
        assert_eq!((core.len(), block.len()), (5, 8));

        let metrics = MetricSet::default();
        let inst = crate::miner::core_instance(&p.pair, &metrics, &core, 0).unwrap();
        // 2 * C(5,2) / 5
        assert_eq!(inst.evaluate(&core).unwrap(), 4.0);

        // every planted contrast pair is in A only, with weight 3
        let mut contrast_pairs = 0;
        let mut all = core.clone();
        all.extend(&block);
        for (i, &u) in all.iter().enumerate() {
            for &v in &all[i + 1..] {
                let (wa, wb) = p.pair.weights(u, v);
                if wa != wb {
                    assert_eq!((wa, wb), (3.0, 0.0));
                    contrast_pairs += 1;
                }
            }
        }
        // 8 core links plus C(8,2) block edges
        assert_eq!(contrast_pairs, 8 + 28);
    }

    #[test]
    fn no_block_gives_identical_graphs() {
        let p = generate(&PlantSpec::new(30, 6, 0, 3)).unwrap();
        let a: Vec<_> = p.pair.edges(Side::A).collect();
        let b: Vec<_> = p.pair.edges(Side::B).collect();
        assert_eq!(a, b);
        let metrics = MetricSet::default();
        let core = find_core(&p.pair, &metrics, &p.core_indices().unwrap()[..1], 1).unwrap();
        assert_eq!(core.nodes, p.core_indices().unwrap());
        let grown = find_contrast(&p.pair, &metrics, &core.nodes, 1).unwrap();
        assert_eq!((grown.nodes, grown.score), (core.nodes, 0.0));
    }

    #[test]
    fn same_seed_same_bytes() {
        let spec = PlantSpec::new(120, 6, 9, 42).with_noise(0.05, 0.1, 0.4);
        let dump = |p: &Planted| {
            let mut a = Vec::new();
            let mut b = Vec::new();
            p.pair.write_edge_list(Side::A, &mut a).unwrap();
            p.pair.write_edge_list(Side::B, &mut b).unwrap();
            (a, b, p.truth_json())
        };
        let first = dump(&generate(&spec).unwrap());
        assert_eq!(first, dump(&generate(&spec).unwrap()));
        let other = PlantSpec { seed: 43, ..spec };
        assert_ne!(first, dump(&generate(&other).unwrap()));
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&PlantSpec::new(20, 0, 5, 1)).is_err());
        assert!(generate(&PlantSpec::new(10, 6, 5, 1)).is_err());
        assert!(generate(&PlantSpec::new(20, 3, 3, 1).with_noise(1.5, 0.1, 0.2)).is_err());
        assert!(generate(&PlantSpec::new(20, 3, 3, 1).with_noise(0.1, 0.3, 0.2)).is_err());
        let mut bad = PlantSpec::new(20, 3, 3, 1);
        bad.w_con = 0.0;
        assert!(generate(&bad).is_err());
    }

    #[test]
    fn noiseless_recovery() {
        for seed in 0..5 {
            let p = generate(&PlantSpec::new(60, 5, 7, seed)).unwrap();
            let core = p.core_indices().unwrap();
            let out = mine(
                &p.pair,
                &MetricSet::default(),
                &core[..1],
                &MineOptions::new(1),
            )
            .unwrap();
            assert_eq!(out.core, core);
            assert_eq!(out.subgraphs[0].added, p.contrast_indices().unwrap());
        }
    }

    #[test]
    fn sampled_pairs_match_rate_and_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 300;
        let total = n * (n - 1) / 2;
        let pairs = sample_pairs(&mut rng, n, 0.1);
        assert!(pairs.windows(2).all(|w| w[0] < w[1]));
        assert!(pairs.iter().all(|&(u, v)| u < v && v < n));
        let rate = pairs.len() as f64 / total as f64;
        assert!((rate - 0.1).abs() < 0.01, "rate {rate}");
        assert_eq!(sample_pairs(&mut rng, 5, 1.0).len(), 10);
        assert!(sample_pairs(&mut rng, 5, 0.0).is_empty());
        assert!(sample_pairs(&mut rng, 1, 1.0).is_empty());
    }

    #[test]
    fn random_pairs_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for kind in [WeightKind::Integer, WeightKind::LogScaled] {
            let p = random_pair(&mut rng, 12, 0.3, 0.2, kind).unwrap();
            assert!(p.node_count() <= 12);
            for (_, _, wa, wb) in p.union_edges() {
                assert!(wa >= 0.0 && wb >= 0.0 && wa + wb > 0.0);
            }
        }
    }
}
