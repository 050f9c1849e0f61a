//! The `check` subcommand: solver against exhaustive search and greedy peeling.

use std::process::ExitCode;

use contrast_core::datagen::{random_pair, WeightKind};
use contrast_core::miner::{brute_force, contrast_instance, core_instance, greedy_peel};
use contrast_core::{DensityInstance, MetricSet, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::commands::load;
use crate::CheckArgs;

const REL_TOL: f64 = 1e-6;

/// Scores of one phase solved three ways.
struct Phase {
    candidates: usize,
    solver: f64,
    brute: f64,
    greedy: f64,
    pass: bool,
}

/// One trial: the core phase and, when a core exists, the growth phase.
struct Row {
    trial: usize,
    phases: Vec<Phase>,
}

impl Row {
    fn pass(&self) -> bool {
        self.phases.iter().all(|p| p.pass)
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Solves one instance three ways. Returns the row and the solver's subset.
fn compare(inst: &DensityInstance, fault: bool) -> Result<(Phase, Vec<usize>)> {
    let (brute_set, brute) = brute_force(inst)?;
    let (_, greedy) = greedy_peel(inst)?;
    let found = inst.maximize()?;
    let mut solver = found.score;
    if fault {
        solver *= 0.5;
    }
    let attained = if found.subset.is_empty() {
        solver == 0.0
    } else {
        close(inst.evaluate(&found.subset)?, solver)
    };
    let pass = close(solver, brute) && attained && greedy <= solver + 1e-9;
    let subset = if found.subset.is_empty() {
        brute_set
    } else {
        found.subset
    };
    Ok((
        Phase {
            candidates: inst.candidates().len(),
            solver,
            brute,
            greedy,
            pass,
        },
        subset,
    ))
}

/// Core phase then growth phase, each checked.
fn pipeline(
    pair: &contrast_core::GraphPair,
    metrics: &MetricSet,
    seeds: &[usize],
    radius: usize,
    grow: usize,
    trial: usize,
    fault: bool,
) -> Result<Row> {
    let inst = core_instance(pair, metrics, seeds, radius)?;
    let (core_phase, core) = compare(&inst, fault)?;
    let mut phases = vec![core_phase];
    if !core.is_empty() {
        let inst = contrast_instance(pair, metrics, &core, grow, None, false)?;
        phases.push(compare(&inst, fault)?.0);
    }
    Ok(Row { trial, phases })
}

fn random_trial(base: u64, trial: usize, max_nodes: usize, fault: bool) -> Result<Row> {
    let mut rng = ChaCha8Rng::seed_from_u64(base.wrapping_add(trial as u64));
    let n = rng.gen_range(4..=max_nodes.max(4));
    let kind = if rng.gen_bool(0.5) {
        WeightKind::Integer
    } else {
        WeightKind::LogScaled
    };
    let (p, shared) = (rng.gen_range(0.05..0.4), rng.gen_range(0.0..0.4));
    let pair = random_pair(&mut rng, n, p, shared, kind)?;
    let seeds = if rng.gen_bool(0.1) {
        vec![]
    } else {
        vec![rng.gen_range(0..pair.node_count())]
    };
    let radius = rng.gen_range(1..=2);
    pipeline(
        &pair,
        &MetricSet::default(),
        &seeds,
        radius,
        radius,
        trial,
        fault,
    )
}

pub fn run(args: &CheckArgs, _verbose: u8) -> Result<ExitCode> {
    let rows: Vec<Row> = match args.trials {
        Some(n) => (0..n)
            .into_par_iter()
            .map(|t| random_trial(args.rng_seed, t, args.max_nodes, args.inject_fault))
            .collect::<Result<_>>()?,
        None => {
            let loaded = load(&args.pair)?;
            let grow = args.pair.radius_grow.unwrap_or(args.pair.radius);
            vec![pipeline(
                &loaded.pair,
                &loaded.metrics,
                &loaded.seeds,
                args.pair.radius,
                grow,
                0,
                args.inject_fault,
            )?]
        }
    };

    println!(
        "{:>5}  {:<8}  {:>5}  {:>15}  {:>15}  {:>15}  result",
        "trial", "phase", "cand", "solver", "brute_force", "greedy_peel"
    );
    for row in &rows {
        for (i, p) in row.phases.iter().enumerate() {
            let verdict = match (i + 1 == row.phases.len(), row.pass()) {
                (false, _) => "",
                (true, true) => "PASS",
                (true, false) => "FAIL",
            };
            let line = format!(
                "{:>5}  {:<8}  {:>5}  {:>15.9}  {:>15.9}  {:>15.9}  {verdict}",
                if i == 0 {
                    row.trial.to_string()
                } else {
                    String::new()
                },
                ["core", "contrast"][i],
                p.candidates,
                p.solver,
                p.brute,
                p.greedy,
            );
            println!("{}", line.trim_end());
        }
    }
    let passed = rows.iter().filter(|r| r.pass()).count();
    println!("{passed}/{} trials passed", rows.len());
    Ok(if passed == rows.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}
