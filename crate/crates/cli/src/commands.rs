use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use contrast_core::datagen::{generate, PlantSpec};
use contrast_core::export::{to_dot, to_matrices, Report};
use contrast_core::graph_pair::load_events;
use contrast_core::miner::{mine as run_mine, MineOptions, SolveSummary};
use contrast_core::{Error, GraphPair, MetricSet, Result, Side, WeightTransform};

use crate::{Format, GenArgs, MineArgs, PairArgs, SplitArgs};

/// Loaded pair, resolved seeds and metrics shared by `mine` and `check`.
pub struct Loaded {
    pub pair: GraphPair,
    pub seeds: Vec<usize>,
    pub metrics: MetricSet,
}

pub fn load(args: &PairArgs) -> Result<Loaded> {
    let (Some(a), Some(b)) = (&args.graph_a, &args.graph_b) else {
        return Err(Error::Input(
            "both --graph-a and --graph-b are required".into(),
        ));
    };
    let pair = GraphPair::load_pair(a, b)?;
    let seeds = pair.indices_of(&args.seeds)?;
    let metrics = MetricSet::by_names(&args.coherence, &args.contrast, &args.penalty)?;
    Ok(Loaded {
        pair,
        seeds,
        metrics,
    })
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(io_err(path)),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(io_err(Path::new("<stdout>")))
        }
    }
}

fn describe(phase: &str, s: &SolveSummary) {
    eprintln!(
        "{phase}: {} candidates, {} bisection steps, {} refinements, stop {:?}, window {:.3e}",
        s.candidates, s.iterations, s.refinements, s.stop, s.final_window
    );
}

pub fn mine(args: &MineArgs, verbose: u8) -> Result<ExitCode> {
    let loaded = load(&args.pair)?;
    let opts = MineOptions {
        radius: args.pair.radius,
        radius_grow: args.pair.radius_grow,
        max_subgraphs: args.k,
        no_core: args.no_core,
        no_neighbor: args.no_neighbor,
        ..MineOptions::new(args.pair.radius)
    };
    let outcome = run_mine(&loaded.pair, &loaded.metrics, &loaded.seeds, &opts)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    if verbose > 0 {
        if let Some(s) = &outcome.core_summary {
            describe("core", s);
        }
        for (i, g) in outcome.subgraphs.iter().enumerate() {
            describe(&format!("subgraph {}", i + 1), &g.summary);
        }
    }

    let text = match args.format {
        Format::Json => Report::new(&loaded.pair, &loaded.metrics, &opts, &outcome).to_json(),
        Format::Dot => to_dot(&loaded.pair, &outcome),
        Format::Csv => {
            let (a, b) = to_matrices(&loaded.pair, &outcome)?;
            format!("# graph A\n{a}# graph B\n{b}")
        }
    };
    emit(args.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

pub fn gen(args: &GenArgs) -> Result<ExitCode> {
    let spec = PlantSpec {
        n: args.n,
        core_size: args.core,
        contrast_size: args.contrast,
        p_bg: args.p_bg,
        bg_weight: (args.bg_min, args.bg_max),
        w_core: args.w_core,
        w_con: args.w_con,
        seed: args.seed,
    };
    let planted = generate(&spec)?;
    fs::create_dir_all(&args.out_dir).map_err(io_err(&args.out_dir))?;
    for path in planted.write_files(&args.out_dir, &args.stem)? {
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

pub fn split(args: &SplitArgs) -> Result<ExitCode> {
    let transform: WeightTransform = args.transform.parse()?;
    let events = load_events(&args.events)?;
    let pair = GraphPair::build_from_events(&events, args.split_at, transform)?;
    for (side, path) in [(Side::A, &args.out_a), (Side::B, &args.out_b)] {
        let file = fs::File::create(path).map_err(io_err(path))?;
        let mut out = BufWriter::new(file);
        pair.write_edge_list(side, &mut out)
            .and_then(|_| out.flush())
            .map_err(io_err(path))?;
    }
    println!(
        "{} nodes; graph A {} edges -> {}; graph B {} edges -> {}",
        pair.node_count(),
        pair.edge_count(Side::A),
        args.out_a.display(),
        pair.edge_count(Side::B),
        args.out_b.display()
    );
    Ok(ExitCode::SUCCESS)
}
