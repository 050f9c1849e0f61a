//! Reference solvers for checking [`DensityInstance::maximize`]: exhaustive
//! enumeration and greedy peeling.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::solver::DensityInstance;
use crate::NodeIndex;

/// Largest number of free (non-anchor) candidates [`brute_force`] accepts.
pub const BRUTE_FORCE_CAP: usize = 24;

/// Exhaustive maximum over every anchored subset. Ties go to the smaller set,
/// then to the lexicographically smaller sorted node list. With no nonzero
/// score the anchor is returned with density zero.
pub fn brute_force(instance: &DensityInstance) -> Result<(Vec<NodeIndex>, f64)> {
    let free = instance.free_nodes();
    if free.len() > BRUTE_FORCE_CAP {
        return Err(Error::input(format!(
            "brute force supports at most {BRUTE_FORCE_CAP} free candidates, instance has {}",
            free.len()
        )));
    }
    let anchor = instance.anchor();
    if instance.compute_bounds().is_none() {
        return Ok((anchor.to_vec(), 0.0));
    }

    // Free-node adjacency in free-index space, plus each free node's score
    // into the anchor.
    let k = free.len();
    let mut to_anchor = vec![0.0; k];
    let mut links: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k];
    for (i, &u) in free.iter().enumerate() {
        for (v, s) in instance.scored_neighbors(u) {
            if instance.is_anchor(v) {
                to_anchor[i] += s;
            } else if let Ok(j) = free.binary_search(&v) {
                links[i].push((j, s));
            }
        }
    }
    let pen: Vec<f64> = free.iter().map(|&u| instance.penalty(u)).collect();
    let anchor_pen: f64 = anchor.iter().map(|&u| instance.penalty(u)).sum();
    let anchor_weight = internal_weight(instance, anchor);

    let mut member = vec![false; k];
    let (mut weight, mut penalty, mut size) = (anchor_weight, anchor_pen, 0usize);
    let mut best: Option<(f64, u32)> =
        (!anchor.is_empty()).then_some((anchor_weight / anchor_pen, 0));
    let mut mask: u32 = 0;
    // Gray-code walk: each step toggles one free node.
    for step in 1u32..(1u32 << k) {
        let bit = step.trailing_zeros() as usize;
        let delta_w = to_anchor[bit]
            + links[bit]
                .iter()
                .filter(|&&(j, _)| member[j])
                .map(|&(_, s)| s)
                .sum::<f64>();
        if member[bit] {
            weight -= delta_w;
            penalty -= pen[bit];
            size -= 1;
        } else {
            weight += delta_w;
            penalty += pen[bit];
            size += 1;
        }
        member[bit] = !member[bit];
        mask ^= 1 << bit;
        if size == 0 && anchor.is_empty() {
            continue;
        }
        let density = weight / penalty;
        best = match best {
            None => Some((density, mask)),
            Some((b, bm)) => {
                let tol = 1e-12 * b.abs().max(1e-300);
                if density > b + tol
                    || ((density - b).abs() <= tol && tie_order(&free, mask, bm) == Ordering::Less)
                {
                    Some((density, mask))
                } else {
                    Some((b, bm))
                }
            }
        };
    }

    let (_, mask) = best.expect("at least one non-empty anchored subset");
    let subset = with_mask(anchor, &free, mask);
    let score = instance.evaluate(&subset)?;
    Ok((subset, score))
}

fn with_mask(anchor: &[NodeIndex], free: &[NodeIndex], mask: u32) -> Vec<NodeIndex> {
    let mut s = anchor.to_vec();
    s.extend(
        free.iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &u)| u),
    );
    s.sort_unstable();
    s
}

/// Anchor membership is shared, so compare by size, then by sorted free nodes.
fn tie_order(free: &[NodeIndex], a: u32, b: u32) -> Ordering {
    a.count_ones().cmp(&b.count_ones()).then_with(|| {
        let pick = |m: u32| {
            free.iter()
                .enumerate()
                .filter(move |(i, _)| m >> i & 1 == 1)
                .map(|(_, &u)| u)
        };
        pick(a).cmp(pick(b))
    })
}

fn internal_weight(instance: &DensityInstance, nodes: &[NodeIndex]) -> f64 {
    let mut w = 0.0;
    for &u in nodes {
        for (v, s) in instance.scored_neighbors(u) {
            if u < v && nodes.binary_search(&v).is_ok() {
                w += s;
            }
        }
    }
    w
}

#[derive(PartialEq)]
struct Key(f64, NodeIndex);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Greedy peeling baseline: starting from all candidates, repeatedly drop the
/// free node with the smallest score degree inside the current set, and keep
/// the densest set seen. Never better than the exact optimum.
pub fn greedy_peel(instance: &DensityInstance) -> Result<(Vec<NodeIndex>, f64)> {
    let cand = instance.candidates();
    if cand.is_empty() {
        return Err(Error::input("density instance has no candidates"));
    }
    let m = cand.len();
    let pos = |u: NodeIndex| cand.binary_search(&u).expect("candidate");
    let mut alive = vec![true; m];
    let mut degree: Vec<f64> = cand.iter().map(|&u| instance.degree(u)).collect();
    let mut weight = instance.total_score();
    let mut penalty: f64 = cand.iter().map(|&u| instance.penalty(u)).sum();

    let mut heap: BinaryHeap<Reverse<Key>> = (0..m)
        .filter(|&i| !instance.is_anchor(cand[i]))
        .map(|i| Reverse(Key(degree[i], i)))
        .collect();
    let mut removed: Vec<usize> = Vec::new();
    let (mut best_density, mut best_removed) = (weight / penalty, 0usize);

    while let Some(Reverse(Key(d, i))) = heap.pop() {
        if !alive[i] || d != degree[i] {
            continue;
        }
        alive[i] = false;
        removed.push(i);
        weight -= degree[i];
        penalty -= instance.penalty(cand[i]);
        for (v, s) in instance.scored_neighbors(cand[i]) {
            let j = pos(v);
            if alive[j] {
                degree[j] -= s;
                if !instance.is_anchor(v) {
                    heap.push(Reverse(Key(degree[j], j)));
                }
            }
        }
        if alive.iter().any(|&a| a) && penalty > 0.0 {
            let density = weight.max(0.0) / penalty;
            if density > best_density {
                best_density = density;
                best_removed = removed.len();
            }
        }
    }

    let mut keep = vec![true; m];
    for &i in &removed[..best_removed] {
        keep[i] = false;
    }
    let subset: Vec<NodeIndex> = (0..m).filter(|&i| keep[i]).map(|i| cand[i]).collect();
    let score = instance.evaluate(&subset)?;
    Ok((subset, score))
}
