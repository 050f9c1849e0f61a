use super::*;
use crate::datagen::{random_pair, WeightKind};
use crate::graph_pair::GraphPair;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ids(p: &GraphPair, labels: &[&str]) -> Vec<NodeIndex> {
    let mut v = p.indices_of(labels).unwrap();
    v.sort_unstable();
    v
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn core_is_the_shared_triangle() {
    let tri = [
        ("a", "b", 2.0),
        ("b", "c", 2.0),
        ("a", "c", 2.0),
        ("c", "d", 1.0),
    ];
    let mut only_a = tri.to_vec();
    only_a.push(("d", "e", 7.0));
    let p = GraphPair::from_edges(&only_a, &tri).unwrap();
    let got = find_core(&p, &MetricSet::default(), &ids(&p, &["a"]), 1).unwrap();
    assert_eq!(got.nodes, ids(&p, &["a", "b", "c"]));
    assert_eq!(got.score, 2.0);
}

#[test]
fn core_without_coherence_is_the_seed() {
    let p = GraphPair::from_edges(&[("a", "b", 5.0)], &[]).unwrap();
    let got = find_core(&p, &MetricSet::default(), &ids(&p, &["a"]), 1).unwrap();
    assert_eq!((got.nodes, got.score), (ids(&p, &["a"]), 0.0));
}

#[test]
fn seedless_core_is_the_clique() {
    // a 4-clique shared by both graphs; e and f only carry A-side weight
    let clique = [
        ("a", "b", 1.0),
        ("a", "c", 1.0),
        ("a", "d", 1.0),
        ("b", "c", 1.0),
        ("b", "d", 1.0),
        ("c", "d", 1.0),
    ];
    let mut a = clique.to_vec();
    a.extend([("e", "f", 9.0), ("d", "e", 9.0)]);
    let p = GraphPair::from_edges(&a, &clique).unwrap();
    let metrics = MetricSet::default();
    let got = find_core(&p, &metrics, &[], 1).unwrap();
    assert_eq!(got.nodes, ids(&p, &["a", "b", "c", "d"]));
    let inst = core_instance(&p, &metrics, &[], 1).unwrap();
    assert_eq!(brute_force(&inst).unwrap(), (got.nodes.clone(), got.score));
    assert_eq!(got.score, 1.5);
}

#[test]
fn contrast_examples() {
    let same = [("a", "b", 1.0), ("b", "c", 2.0)];
    let p = GraphPair::from_edges(&same, &same).unwrap();
    let got = find_contrast(&p, &MetricSet::default(), &ids(&p, &["a"]), 2).unwrap();
    assert_eq!((got.nodes, got.score), (ids(&p, &["a"]), 0.0));

    let p = GraphPair::from_edges(&[("a", "b", 4.0)], &[("a", "c", 0.5)]).unwrap();
    let got = find_contrast(&p, &MetricSet::default(), &ids(&p, &["a"]), 1).unwrap();
    // {a,b} at 2.0 beats {a,b,c} at 4.5/3
    assert_eq!((got.nodes, got.score), (ids(&p, &["a", "b"]), 2.0));
    let swapped = find_contrast(&p.swapped(), &MetricSet::default(), &ids(&p, &["a"]), 1).unwrap();
    assert_eq!(swapped.score, 2.0);
}

#[test]
fn contrast_needs_a_core() {
    let p = GraphPair::from_edges(&[("a", "b", 4.0)], &[]).unwrap();
    assert!(find_contrast(&p, &MetricSet::default(), &[], 1).is_err());
    assert!(find_core(&p, &MetricSet::default(), &[9], 1).is_err());
}

#[test]
fn single_extraction_is_the_two_phase_result() {
    let p = GraphPair::from_edges(
        &[
            ("a", "b", 3.0),
            ("b", "c", 3.0),
            ("a", "c", 3.0),
            ("c", "x", 5.0),
            ("x", "y", 1.0),
        ],
        &[
            ("a", "b", 3.0),
            ("b", "c", 3.0),
            ("a", "c", 3.0),
            ("y", "z", 2.0),
        ],
    )
    .unwrap();
    let m = MetricSet::default();
    let seeds = ids(&p, &["a"]);
    let out = mine(&p, &m, &seeds, &MineOptions::new(2)).unwrap();
    let core = find_core(&p, &m, &seeds, 2).unwrap();
    let grown = find_contrast(&p, &m, &core.nodes, 2).unwrap();
    assert_eq!(out.core, core.nodes);
    assert_eq!(out.core_score, core.score);
    assert_eq!(out.subgraphs.len(), 1);
    assert_eq!(out.subgraphs[0].nodes, grown.nodes);
    assert_eq!(out.subgraphs[0].score, grown.score);
    assert_eq!(out.seeds, seeds);
}

/// Core {c0, c1} shared by both graphs. Block X = {x1,x2,x3} hangs off c0 with
/// A-only weight 6, block Y = {y1,y2,y3} off c1 with weight 3. Two filler
/// nodes carry only coherent edges.
fn two_blocks() -> GraphPair {
    let shared = [("c0", "c1", 5.0), ("c1", "z1", 1.0), ("z1", "z2", 1.0)];
    let mut a = shared.to_vec();
    for (hub, names, w) in [
        ("c0", ["x1", "x2", "x3"], 6.0),
        ("c1", ["y1", "y2", "y3"], 3.0),
    ] {
        for (i, u) in names.iter().enumerate() {
            a.push((hub, u, w));
            for v in &names[i + 1..] {
                a.push((u, v, w));
            }
        }
    }
    GraphPair::from_edges(&a, &shared).unwrap()
}

#[test]
fn iterative_extraction_takes_blocks_in_order() {
    let p = two_blocks();
    let m = MetricSet::default();
    let mut opts = MineOptions::new(2);
    opts.max_subgraphs = 5;
    let out = mine(&p, &m, &ids(&p, &["c0"]), &opts).unwrap();
    assert_eq!(out.core, ids(&p, &["c0", "c1"]));
    assert_eq!(out.subgraphs.len(), 2);
    assert_eq!(out.subgraphs[0].added, ids(&p, &["x1", "x2", "x3"]));
    assert_eq!(out.subgraphs[1].added, ids(&p, &["y1", "y2", "y3"]));

    // each step agrees with exhaustive search over the remaining pool
    let mut pool = vec![true; p.node_count()];
    for g in &out.subgraphs {
        let inst = contrast_instance(&p, &m, &out.core, 2, Some(&pool), false).unwrap();
        let (set, score) = brute_force(&inst).unwrap();
        assert_eq!(set, g.nodes);
        assert!(close(score, g.score));
        for &u in &g.added {
            pool[u] = false;
        }
    }
    assert_eq!(out.subgraphs[0].score, 36.0 / 5.0);
    assert_eq!(out.subgraphs[1].score, 18.0 / 5.0);
    // the pairs inside the first subgraph with an edge in either graph
    assert_eq!(out.edges.len(), 7);
    assert!(out.edges.iter().all(|e| e.u < e.v));
}

#[test]
fn max_subgraphs_caps_the_loop() {
    let p = two_blocks();
    let mut opts = MineOptions::new(2);
    opts.max_subgraphs = 1;
    assert_eq!(
        mine(&p, &MetricSet::default(), &ids(&p, &["c0"]), &opts)
            .unwrap()
            .subgraphs
            .len(),
        1
    );
    opts.max_subgraphs = 0;
    assert!(mine(&p, &MetricSet::default(), &ids(&p, &["c0"]), &opts).is_err());
}

#[test]
fn ablations() {
    let p = two_blocks();
    let m = MetricSet::default();
    let seeds = ids(&p, &["c1"]);

    let mut opts = MineOptions::new(1);
    opts.no_core = true;
    let out = mine(&p, &m, &seeds, &opts).unwrap();
    assert_eq!(out.core, seeds);
    assert!(out.core_summary.is_none());

    // from c1 alone with radius 1, the X block is out of reach
    let bounded = mine(&p, &m, &seeds, &opts).unwrap();
    assert!(bounded.subgraphs[0]
        .added
        .iter()
        .all(|u| !p.label(*u).starts_with('x')));
    opts.no_neighbor = true;
    let free = mine(&p, &m, &seeds, &opts).unwrap();
    assert!(free.subgraphs[0].added.contains(&p.index_of("x1").unwrap()));
    assert!(free.subgraphs[0].score >= bounded.subgraphs[0].score);
}

#[test]
fn zero_coherence_falls_back_to_seeds() {
    let p = GraphPair::from_edges(&[("a", "b", 5.0), ("b", "c", 1.0)], &[("c", "d", 1.0)]).unwrap();
    let out = mine(
        &p,
        &MetricSet::default(),
        &ids(&p, &["a"]),
        &MineOptions::new(1),
    )
    .unwrap();
    assert_eq!(out.core, ids(&p, &["a"]));
    assert_eq!(out.core_score, 0.0);
    assert!(out.warnings.iter().any(|w| w.contains("coherent")));
    assert_eq!(out.subgraphs[0].nodes, ids(&p, &["a", "b"]));

    let p = GraphPair::from_edges(&[("a", "b", 5.0)], &[("c", "d", 1.0)]).unwrap();
    assert!(mine(&p, &MetricSet::default(), &[], &MineOptions::new(1))
        .unwrap_err()
        .is_input());
}

#[test]
fn metrics_must_vanish_off_edges() {
    let p = GraphPair::from_edges(&[("a", "b", 1.0)], &[]).unwrap();
    let m = MetricSet {
        contrast: EdgeMetric::new("shifted", |a: f64, b: f64| (a - b).abs() + 1.0),
        ..MetricSet::default()
    };
    assert!(find_contrast(&p, &m, &[0], 1).unwrap_err().is_input());
}

#[test]
fn seeded_random_instances_match_brute_force() {
    let m = MetricSet::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    while checked < 200 {
        let n = rng.gen_range(4..=16);
        let kind = if rng.gen_bool(0.5) {
            WeightKind::Integer
        } else {
            WeightKind::LogScaled
        };
        let (dens, shared) = (rng.gen_range(0.05..0.4), rng.gen_range(0.0..0.4));
        let p = random_pair(&mut rng, n, dens, shared, kind).unwrap();
        let seed = rng.gen_range(0..p.node_count());
        let r = rng.gen_range(1..=2);
        let inst = core_instance(&p, &m, &[seed], r).unwrap();
        let core = find_core(&p, &m, &[seed], r).unwrap();
        let (_, exact) = brute_force(&inst).unwrap();
        assert!(close(core.score, exact), "core {} vs {exact}", core.score);
        assert!(close(inst.evaluate(&core.nodes).unwrap(), core.score));

        let inst = contrast_instance(&p, &m, &core.nodes, r, None, false).unwrap();
        if inst.free_nodes().len() > BRUTE_FORCE_CAP {
            continue;
        }
        let grown = find_contrast(&p, &m, &core.nodes, r).unwrap();
        let (_, exact) = brute_force(&inst).unwrap();
        assert!(
            close(grown.score, exact),
            "contrast {} vs {exact}",
            grown.score
        );
        let (_, greedy) = greedy_peel(&inst).unwrap();
        assert!(greedy <= grown.score + 1e-9);
        checked += 1;
    }
}

fn arb_case() -> impl Strategy<Value = (u64, usize, usize, usize, usize, bool)> {
    (
        any::<u64>(),
        5usize..18,
        0usize..3,
        1usize..4,
        0usize..64,
        any::<bool>(),
    )
}

fn subset(a: &[NodeIndex], b: &[NodeIndex]) -> bool {
    a.iter().all(|u| b.binary_search(u).is_ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pipeline_invariants((seed, n, r, k, pick, log) in arb_case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kind = if log { WeightKind::LogScaled } else { WeightKind::Integer };
        let p = random_pair(&mut rng, n, 0.25, 0.2, kind).unwrap();
        let m = MetricSet::default();
        let seeds = vec![pick % p.node_count()];
        let mut opts = MineOptions::new(r);
        opts.max_subgraphs = k;
        let out = mine(&p, &m, &seeds, &opts).unwrap();

        prop_assert!(subset(&seeds, &out.core));
        prop_assert!(subset(&out.core, &neighborhood::neighbors(&p, &seeds, r).unwrap()));
        let reach = neighborhood::neighbors(&p, &out.core, r).unwrap();
        let mut taken: Vec<NodeIndex> = Vec::new();
        for (i, g) in out.subgraphs.iter().enumerate() {
            prop_assert!(subset(&out.core, &g.nodes));
            prop_assert!(subset(&g.nodes, &reach));
            prop_assert!(g.added.iter().all(|u| !taken.contains(u)));
            taken.extend(&g.added);
            if i > 0 {
                prop_assert!(g.score <= out.subgraphs[i - 1].score * (1.0 + 1e-9) + 1e-12);
                prop_assert!(!g.added.is_empty());
            }
        }
        prop_assert!(out.subgraphs.len() <= k);

        let flipped = mine(&p.swapped(), &m, &seeds, &opts).unwrap();
        prop_assert_eq!(flipped.subgraphs.len(), out.subgraphs.len());
        prop_assert!(close(flipped.core_score, out.core_score));
        for (x, y) in flipped.subgraphs.iter().zip(&out.subgraphs) {
            prop_assert!(close(x.score, y.score), "{} vs {}", x.score, y.score);
        }
    }

    #[test]
    fn greedy_never_beats_the_solver(seed in any::<u64>(), n in 3usize..30, anchored in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_pair(&mut rng, n, 0.3, 0.1, WeightKind::LogScaled).unwrap();
        let m = MetricSet::default();
        let anchor = if anchored { vec![0] } else { vec![] };
        let all: Vec<NodeIndex> = (0..p.node_count()).collect();
        let inst = build_instance(&p, &m.contrast, &m.penalty, &all, &anchor).unwrap();
        let exact = inst.maximize().unwrap();
        let (set, greedy) = greedy_peel(&inst).unwrap();
        prop_assert!(greedy <= exact.score + 1e-9);
        prop_assert!(subset(inst.anchor(), &set));
    }
}
