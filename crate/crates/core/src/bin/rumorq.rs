//! Command-line front end: experiment runs, bound tables, centrality
//! inspection, and topology generation.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use rumorq::centrality::{rumor_center, rumor_centrality_all};
use rumorq::diffusion::DiffusionSnapshot;
use rumorq::experiment::{emit_csv, emit_svg_plot, run_experiment, ExperimentConfig};
use rumorq::{bounds, Graph, GraphKind, LazyRegularTree, NodeId};

#[derive(Parser)]
#[command(name = "rumorq", version, about = "Rumor-source detection under noisy querying")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a Monte Carlo experiment described by a config file.
    Run {
        config: PathBuf,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the trial count.
        #[arg(long)]
        trials: Option<u32>,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write an SVG plot of the sweep.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Evaluate one analytic bound; prints a TSV row.
    Bounds {
        #[command(subcommand)]
        formula: BoundsCmd,
    },
    /// Print log rumor centralities for a dumped snapshot.
    Centrality {
        snapshot: PathBuf,
        /// Edge list of the underlying graph; when omitted the graph is
        /// reconstructed from the snapshot's parent edges.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Generate a topology and write it as an edge list.
    Gen {
        #[command(subcommand)]
        topology: GenCmd,
    },
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Sufficient budget for batch querying at failure probability delta.
    BudgetBatch {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        delta: f64,
    },
    /// Sufficient budget for interactive querying.
    BudgetInteractive {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        delta: f64,
    },
    /// Batch detection-probability lower bound.
    Prop1 {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        d: u32,
    },
    /// Interactive detection-probability lower bound.
    Prop2 {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        d: u32,
    },
    /// Exact majority-filter success probability.
    Majority {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        r: u32,
    },
    /// Majority-filter lower bound.
    Lemma1 {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        r: u32,
    },
    /// Local-center lower bound.
    Lemma2 {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        r: u32,
    },
    /// Designation-vote success lower bound.
    GD {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        d: u32,
    },
    /// Suspect-set detection lower bound.
    Phi {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        d: u32,
    },
    /// Regularized incomplete beta function.
    Beta {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
    },
}

#[derive(Subcommand)]
enum GenCmd {
    /// Ball of the given hop radius on a d-regular tree.
    RegularTree {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        hops: u32,
        out: PathBuf,
    },
    /// Largest component of an Erdos-Renyi graph.
    Er {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        avg_degree: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        out: PathBuf,
    },
    /// Preferential-attachment scale-free graph.
    ScaleFree {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ratio: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.cmd {
        Cmd::Run {
            config,
            seed,
            trials,
            out,
            svg,
        } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| format!("cannot read {}: {e}", config.display()))?;
            let mut cfg = ExperimentConfig::parse(&text)?;
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            let output = run_experiment(&cfg)?;
            for err in &output.errors {
                eprintln!("warning: {err}");
            }
            match &out {
                Some(path) => {
                    let file = std::fs::File::create(path)?;
                    emit_csv(&output.rows, std::io::BufWriter::new(file))?;
                }
                None => emit_csv(&output.rows, std::io::stdout().lock())?,
            }
            if let Some(path) = svg {
                let file = std::fs::File::create(path)?;
                emit_svg_plot(&output.rows, cfg.sweep, std::io::BufWriter::new(file))?;
            }
        }
        Cmd::Bounds { formula } => {
            let (name, inputs, value) = eval_bound(formula)?;
            println!("{name}\t{inputs}\t{value}");
        }
        Cmd::Centrality { snapshot, graph } => {
            let text = std::fs::read_to_string(&snapshot)
                .map_err(|e| format!("cannot read {}: {e}", snapshot.display()))?;
            let g = match graph {
                Some(path) => {
                    let file = std::fs::File::open(&path)
                        .map_err(|e| format!("cannot open {}: {e}", path.display()))?;
                    let (g, _) = rumorq::graph::load_edge_list(std::io::BufReader::new(file))?;
                    Arc::new(g)
                }
                None => Arc::new(graph_from_snapshot_dump(&text)?),
            };
            let snap = DiffusionSnapshot::restore(g, text.as_bytes())?;
            let table = rumor_centrality_all(&snap)?;
            let center = rumor_center(&table, 0);
            println!("center\t{center}");
            let mut nodes: Vec<NodeId> = table.nodes().to_vec();
            nodes.sort_by(|a, b| {
                table
                    .log_r(*b)
                    .partial_cmp(&table.log_r(*a))
                    .expect("finite centralities")
                    .then(a.cmp(b))
            });
            let mut out = std::io::stdout().lock();
            for v in nodes {
                writeln!(out, "{v}\t{}", table.log_r(v).expect("infected node"))?;
            }
        }
        Cmd::Gen { topology } => {
            let (graph, out) = match topology {
                GenCmd::RegularTree { d, hops, out } => {
                    let mut tree = LazyRegularTree::new(d)?;
                    tree.materialize_ball(hops);
                    (tree.freeze(), out)
                }
                GenCmd::Er {
                    n,
                    avg_degree,
                    seed,
                    out,
                } => (rumorq::graph::gen_er(n, avg_degree, seed)?, out),
                GenCmd::ScaleFree { n, ratio, seed, out } => {
                    (rumorq::graph::gen_scale_free(n, ratio, seed)?, out)
                }
            };
            let file = std::fs::File::create(&out)
                .map_err(|e| format!("cannot create {}: {e}", out.display()))?;
            graph.write_edge_list(std::io::BufWriter::new(file))?;
            eprintln!(
                "wrote {} nodes, {} edges to {}",
                graph.node_count(),
                graph.edge_count(),
                out.display()
            );
        }
    }
    Ok(())
}

/// Reconstructs the infected tree from a snapshot dump's parent edges so
/// `centrality` works without a separate edge list.
fn graph_from_snapshot_dump(text: &str) -> rumorq::Result<Graph> {
    let mut edges = Vec::new();
    let mut max_id = 0u32;
    for line in text.lines().skip(2) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() == 3 {
            if let (Ok(w), Ok(p)) = (toks[0].parse::<u32>(), toks[1].parse::<u32>()) {
                max_id = max_id.max(w).max(p);
                edges.push((w, p));
            }
        }
    }
    if let Some(first) = text.lines().next() {
        if let Some(id) = first.strip_prefix("source ") {
            if let Ok(id) = id.trim().parse::<u32>() {
                max_id = max_id.max(id);
            }
        }
    }
    Ok(Graph::from_edges(
        max_id as usize + 1,
        &edges,
        GraphKind::Imported,
    ))
}

fn eval_bound(cmd: BoundsCmd) -> rumorq::Result<(String, String, f64)> {
    Ok(match cmd {
        BoundsCmd::BudgetBatch { p, d, delta } => (
            "budget-batch".into(),
            format!("p={p} d={d} delta={delta}"),
            bounds::budget_bound_batch(delta, p, d)?,
        ),
        BoundsCmd::BudgetInteractive { q, d, delta } => (
            "budget-interactive".into(),
            format!("q={q} d={d} delta={delta}"),
            bounds::budget_bound_interactive(delta, q, d)?,
        ),
        BoundsCmd::Prop1 { k, r, p, d } => (
            "prop1".into(),
            format!("k={k} r={r} p={p} d={d}"),
            bounds::prop1_lower(k, r, p, d),
        ),
        BoundsCmd::Prop2 { k, r, q, d } => (
            "prop2".into(),
            format!("k={k} r={r} q={q} d={d}"),
            bounds::prop2_lower(k, r, q, d),
        ),
        BoundsCmd::Majority { p, r } => (
            "majority".into(),
            format!("p={p} r={r}"),
            bounds::majority_success_prob(p, r),
        ),
        BoundsCmd::Lemma1 { p, r } => (
            "lemma1".into(),
            format!("p={p} r={r}"),
            bounds::lemma1_lower(p, r),
        ),
        BoundsCmd::Lemma2 { p, r } => (
            "lemma2".into(),
            format!("p={p} r={r}"),
            bounds::lemma2_lower(p, r),
        ),
        BoundsCmd::GD { r, q, d } => (
            "g-d".into(),
            format!("r={r} q={q} d={d}"),
            bounds::g_d(r, q, d),
        ),
        BoundsCmd::Phi { k, d } => (
            "phi".into(),
            format!("k={k} d={d}"),
            bounds::phi_suspect_lower(k, d),
        ),
        BoundsCmd::Beta { x, a, b } => (
            "beta".into(),
            format!("x={x} a={a} b={b}"),
            bounds::reg_inc_beta(x, a, b)?,
        ),
    })
}
