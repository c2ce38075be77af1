//! Experiment harness: declarative sweep configuration, seeded parallel
//! Monte Carlo runs, CSV emission, and SVG plots.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;

use crate::diffusion::{pick_random_source, simulate_si, DiffusionSnapshot};
use crate::error::Error;
use crate::estimators::{
    idq, idq_mle_baseline, no_query_baseline, r_star_batch, r_star_interactive, sbq,
    sbq_mle_baseline, EstimationResult,
};
use crate::graph::{Graph, LazyRegularTree, NodeId};
use crate::querying::TruthModel;
use crate::seed;
use crate::Result;

pub const CSV_HEADER: &str =
    "estimator,topology,N,K,p,q,r,trials,hits,detection_prob,stderr,mean_budget,wall_ms";

#[derive(Debug, Clone, PartialEq)]
pub enum TopologySpec {
    RegularTree { degree: u32 },
    ErdosRenyi { n: usize, avg_degree: f64 },
    ScaleFree { n: usize, ratio: f64 },
    EdgeList { path: PathBuf },
}

impl TopologySpec {
    fn label(&self) -> String {
        match self {
            TopologySpec::RegularTree { degree } => format!("regular-tree-d{degree}"),
            TopologySpec::ErdosRenyi { n, .. } => format!("er-n{n}"),
            TopologySpec::ScaleFree { n, .. } => format!("scale-free-n{n}"),
            TopologySpec::EdgeList { path } => format!(
                "edge-list-{}",
                path.file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "file".into())
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    NoQuery,
    Sbq,
    SbqMle,
    Idq,
    IdqMle,
}

impl EstimatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::NoQuery => "no-query",
            EstimatorKind::Sbq => "sbq",
            EstimatorKind::SbqMle => "sbq-mle",
            EstimatorKind::Idq => "idq",
            EstimatorKind::IdqMle => "idq-mle",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "no-query" => Ok(EstimatorKind::NoQuery),
            "sbq" => Ok(EstimatorKind::Sbq),
            "sbq-mle" => Ok(EstimatorKind::SbqMle),
            "idq" => Ok(EstimatorKind::Idq),
            "idq-mle" => Ok(EstimatorKind::IdqMle),
            other => Err(Error::Config(format!("unknown estimator kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RPolicy {
    RStar,
    Fixed(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EstimatorSpec {
    pub kind: EstimatorKind,
    pub r_policy: RPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    P,
    Q,
    K,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::P => "p",
            SweepAxis::Q => "q",
            SweepAxis::K => "K",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub topology: TopologySpec,
    pub n_infected: usize,
    pub trials: u32,
    pub estimators: Vec<EstimatorSpec>,
    pub sweep: SweepAxis,
    pub grid: Vec<f64>,
    pub k_budget: u64,
    pub p: f64,
    pub q: f64,
    /// Reference degree for formulas; defaults to the tree degree or the
    /// rounded mean degree of the generated/imported graph.
    pub d_override: Option<u32>,
    pub master_seed: u64,
    /// Off by default so re-runs are byte-identical.
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            topology: TopologySpec::RegularTree { degree: 3 },
            n_infected: 400,
            trials: 200,
            estimators: vec![EstimatorSpec {
                kind: EstimatorKind::Sbq,
                r_policy: RPolicy::RStar,
            }],
            sweep: SweepAxis::P,
            grid: vec![0.55, 0.7, 0.85, 1.0],
            k_budget: 766,
            p: 0.7,
            q: 0.9,
            d_override: None,
            master_seed: 1,
            record_timing: false,
        }
    }
}

impl ExperimentConfig {
    /// Parses the INI-style config grammar: `[experiment]` key-value
    /// lines plus one `[estimator]` section per estimator; `#` and `;`
    /// start comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig {
            estimators: Vec::new(),
            ..Default::default()
        };
        let err = |line: usize, msg: String| Error::Config(format!("line {line}: {msg}"));

        #[derive(PartialEq)]
        enum Section {
            Experiment,
            Estimator,
        }
        let mut section = Section::Experiment;
        let mut topology_kind: Option<String> = None;
        let mut topo_keys: std::collections::HashMap<String, String> = Default::default();
        let mut current_est: Option<(Option<EstimatorKind>, RPolicy)> = None;

        let flush_est = |est: &mut Option<(Option<EstimatorKind>, RPolicy)>,
                             out: &mut Vec<EstimatorSpec>|
         -> Result<()> {
            if let Some((kind, r_policy)) = est.take() {
                let kind =
                    kind.ok_or_else(|| Error::Config("estimator section without kind".into()))?;
                out.push(EstimatorSpec { kind, r_policy });
            }
            Ok(())
        };

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw
                .split(['#', ';'])
                .next()
                .unwrap_or("")
                .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                match name.trim() {
                    "experiment" => {
                        flush_est(&mut current_est, &mut cfg.estimators)?;
                        section = Section::Experiment;
                    }
                    "estimator" => {
                        flush_est(&mut current_est, &mut cfg.estimators)?;
                        section = Section::Estimator;
                        current_est = Some((None, RPolicy::RStar));
                    }
                    other => return Err(err(line_no, format!("unknown section `{other}`"))),
                }
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(line_no, "expected `key = value`".into()))?;
            let key = key.trim();
            let value = value.trim();
            let parse_f64 = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| err(line_no, format!("bad number `{v}`")))
            };
            let parse_u64 = |v: &str| {
                v.parse::<u64>()
                    .map_err(|_| err(line_no, format!("bad integer `{v}`")))
            };
            match section {
                Section::Experiment => match key {
                    "topology" => topology_kind = Some(value.to_string()),
                    "degree" | "n" | "avg_degree" | "ratio" | "path" => {
                        topo_keys.insert(key.to_string(), value.to_string());
                    }
                    "n_infected" => cfg.n_infected = parse_u64(value)? as usize,
                    "trials" => cfg.trials = parse_u64(value)? as u32,
                    "sweep" => {
                        cfg.sweep = match value {
                            "p" => SweepAxis::P,
                            "q" => SweepAxis::Q,
                            "K" | "k" => SweepAxis::K,
                            other => {
                                return Err(err(line_no, format!("unknown sweep axis `{other}`")))
                            }
                        }
                    }
                    "grid" => {
                        cfg.grid = value
                            .split_whitespace()
                            .map(parse_f64)
                            .collect::<Result<Vec<f64>>>()?;
                    }
                    "k" | "K" => cfg.k_budget = parse_u64(value)?,
                    "p" => cfg.p = parse_f64(value)?,
                    "q" => cfg.q = parse_f64(value)?,
                    "d" => cfg.d_override = Some(parse_u64(value)? as u32),
                    "seed" => cfg.master_seed = parse_u64(value)?,
                    "timing" => {
                        cfg.record_timing = match value {
                            "on" | "true" => true,
                            "off" | "false" => false,
                            other => {
                                return Err(err(line_no, format!("bad timing value `{other}`")))
                            }
                        }
                    }
                    other => return Err(err(line_no, format!("unknown key `{other}`"))),
                },
                Section::Estimator => {
                    let est = current_est
                        .as_mut()
                        .ok_or_else(|| err(line_no, "key outside a section".into()))?;
                    match key {
                        "kind" => est.0 = Some(EstimatorKind::parse(value)?),
                        "r" => {
                            est.1 = if value == "r-star" {
                                RPolicy::RStar
                            } else {
                                RPolicy::Fixed(parse_u64(value)? as u32)
                            }
                        }
                        other => return Err(err(line_no, format!("unknown key `{other}`"))),
                    }
                }
            }
        }
        flush_est(&mut current_est, &mut cfg.estimators)?;
        if cfg.estimators.is_empty() {
            cfg.estimators = ExperimentConfig::default().estimators;
        }

        if let Some(kind) = topology_kind {
            let get = |k: &str| {
                topo_keys
                    .get(k)
                    .ok_or_else(|| Error::Config(format!("topology `{kind}` needs key `{k}`")))
            };
            cfg.topology = match kind.as_str() {
                "regular-tree" => TopologySpec::RegularTree {
                    degree: get("degree")?.parse().map_err(|_| {
                        Error::Config("bad degree".into())
                    })?,
                },
                "er" => TopologySpec::ErdosRenyi {
                    n: get("n")?.parse().map_err(|_| Error::Config("bad n".into()))?,
                    avg_degree: get("avg_degree")?
                        .parse()
                        .map_err(|_| Error::Config("bad avg_degree".into()))?,
                },
                "scale-free" => TopologySpec::ScaleFree {
                    n: get("n")?.parse().map_err(|_| Error::Config("bad n".into()))?,
                    ratio: get("ratio")?
                        .parse()
                        .map_err(|_| Error::Config("bad ratio".into()))?,
                },
                "edge-list" => TopologySpec::EdgeList {
                    path: PathBuf::from(get("path")?),
                },
                other => return Err(Error::Config(format!("unknown topology `{other}`"))),
            };
        }

        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        if !self.grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config("sweep grid must be strictly increasing".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        if self.n_infected == 0 {
            return Err(Error::Config("n_infected must be positive".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("no estimators configured".into()));
        }
        Ok(())
    }
}

/// One CSV record: detection probability for one estimator at one grid
/// point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub estimator: String,
    pub topology: String,
    pub n: usize,
    pub k_budget: u64,
    pub p: f64,
    pub q: f64,
    pub r: u32,
    pub trials: u32,
    pub hits: u32,
    pub detection_prob: f64,
    pub stderr: f64,
    pub mean_budget: f64,
    pub wall_ms: f64,
}

impl ResultRow {
    fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.estimator,
            self.topology,
            self.n,
            self.k_budget,
            self.p,
            self.q,
            self.r,
            self.trials,
            self.hits,
            self.detection_prob,
            self.stderr,
            self.mean_budget,
            self.wall_ms
        )
    }

    fn from_csv_line(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 13 {
            return Err(Error::Config(format!(
                "expected 13 CSV fields, got {}",
                f.len()
            )));
        }
        let bad = |what: &str| Error::Config(format!("bad CSV field `{what}`"));
        Ok(ResultRow {
            estimator: f[0].to_string(),
            topology: f[1].to_string(),
            n: f[2].parse().map_err(|_| bad("N"))?,
            k_budget: f[3].parse().map_err(|_| bad("K"))?,
            p: f[4].parse().map_err(|_| bad("p"))?,
            q: f[5].parse().map_err(|_| bad("q"))?,
            r: f[6].parse().map_err(|_| bad("r"))?,
            trials: f[7].parse().map_err(|_| bad("trials"))?,
            hits: f[8].parse().map_err(|_| bad("hits"))?,
            detection_prob: f[9].parse().map_err(|_| bad("detection_prob"))?,
            stderr: f[10].parse().map_err(|_| bad("stderr"))?,
            mean_budget: f[11].parse().map_err(|_| bad("mean_budget"))?,
            wall_ms: f[12].parse().map_err(|_| bad("wall_ms"))?,
        })
    }
}

/// Rows plus non-fatal per-row error records.
#[derive(Debug)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub errors: Vec<String>,
}

enum BaseTopology {
    Lazy { degree: u32 },
    Static(Arc<Graph>),
}

fn build_topology(spec: &TopologySpec, master_seed: u64) -> Result<BaseTopology> {
    Ok(match spec {
        TopologySpec::RegularTree { degree } => {
            LazyRegularTree::new(*degree)?; // validate degree eagerly
            BaseTopology::Lazy { degree: *degree }
        }
        TopologySpec::ErdosRenyi { n, avg_degree } => BaseTopology::Static(Arc::new(
            crate::graph::gen_er(*n, *avg_degree, seed::derive(master_seed, &[0x90]))?,
        )),
        TopologySpec::ScaleFree { n, ratio } => BaseTopology::Static(Arc::new(
            crate::graph::gen_scale_free(*n, *ratio, seed::derive(master_seed, &[0x91]))?,
        )),
        TopologySpec::EdgeList { path } => {
            let file = std::fs::File::open(path)?;
            let (graph, _) = crate::graph::load_edge_list(std::io::BufReader::new(file))?;
            BaseTopology::Static(Arc::new(graph))
        }
    })
}

fn mean_degree(g: &Graph) -> f64 {
    2.0 * g.edge_count() as f64 / g.node_count() as f64
}

fn resolve_r(spec: &EstimatorSpec, k_budget: u64, p: f64, q: f64, d: u32) -> u32 {
    match (spec.r_policy, spec.kind) {
        (RPolicy::Fixed(r), _) => r,
        (RPolicy::RStar, EstimatorKind::Idq | EstimatorKind::IdqMle) => {
            r_star_interactive(k_budget, q, d)
        }
        (RPolicy::RStar, _) => r_star_batch(k_budget, p, d),
    }
}

fn run_one(
    spec: &EstimatorSpec,
    snap: &DiffusionSnapshot,
    model: &TruthModel,
    k_budget: u64,
    r: u32,
    est_seed: u64,
) -> Result<EstimationResult> {
    match spec.kind {
        EstimatorKind::NoQuery => Ok(no_query_baseline(snap, est_seed)),
        EstimatorKind::Sbq => sbq(snap, model, k_budget, Some(r), est_seed),
        EstimatorKind::SbqMle => sbq_mle_baseline(snap, model, k_budget, r, est_seed),
        EstimatorKind::Idq => idq(snap, model, k_budget, Some(r), est_seed),
        EstimatorKind::IdqMle => idq_mle_baseline(snap, model, k_budget, r, est_seed),
    }
}

/// Runs the configured sweep: per grid point, `trials` independent
/// seeded trials, each simulating one diffusion and running every
/// configured estimator on it. Trials execute in parallel; per-trial
/// seeds are derived from (master_seed, grid index, trial index), so the
/// output is identical for any worker count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let base = build_topology(&cfg.topology, cfg.master_seed)?;
    let d = cfg.d_override.unwrap_or(match &base {
        BaseTopology::Lazy { degree } => *degree,
        BaseTopology::Static(g) => (mean_degree(g).round() as u32).max(3),
    });
    let topo_label = cfg.topology.label();

    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for (gi, &gval) in cfg.grid.iter().enumerate() {
        let (k_budget, p, q) = match cfg.sweep {
            SweepAxis::P => (cfg.k_budget, gval, cfg.q),
            SweepAxis::Q => (cfg.k_budget, cfg.p, gval),
            SweepAxis::K => (gval as u64, cfg.p, cfg.q),
        };
        let model = match TruthModel::new(p, q, d) {
            Ok(m) => m,
            Err(e) => {
                errors.push(format!("grid point {}={gval}: {e}", cfg.sweep.name()));
                continue;
            }
        };
        let start = std::time::Instant::now();

        // (hit, budget) per (trial, estimator); None records a failure.
        let trial_results: Vec<(Vec<Option<(bool, u64)>>, Vec<String>)> = (0..cfg.trials)
            .into_par_iter()
            .map(|ti| {
                let trial_seed = seed::derive(cfg.master_seed, &[gi as u64, ti as u64]);
                let snap = match &base {
                    BaseTopology::Lazy { degree } => {
                        let tree = LazyRegularTree::new(*degree).expect("validated degree");
                        simulate_si(
                            tree,
                            NodeId(0),
                            cfg.n_infected,
                            seed::derive(trial_seed, &[1]),
                        )
                    }
                    BaseTopology::Static(g) => {
                        let source = pick_random_source(g, seed::derive(trial_seed, &[0]));
                        simulate_si(
                            Arc::clone(g),
                            source,
                            cfg.n_infected,
                            seed::derive(trial_seed, &[1]),
                        )
                    }
                };
                let snap = match snap {
                    Ok(s) => s,
                    Err(e) => {
                        return (
                            vec![None; cfg.estimators.len()],
                            vec![format!("trial {ti}: {e}")],
                        )
                    }
                };
                let mut outcomes = Vec::with_capacity(cfg.estimators.len());
                let mut trial_errors = Vec::new();
                for (ei, spec) in cfg.estimators.iter().enumerate() {
                    let r = resolve_r(spec, k_budget, p, q, d);
                    let est_seed = seed::derive(trial_seed, &[2, ei as u64]);
                    match run_one(spec, &snap, &model, k_budget, r, est_seed) {
                        Ok(res) => outcomes
                            .push(Some((res.estimate == snap.source(), res.budget_spent))),
                        Err(e) => {
                            trial_errors
                                .push(format!("trial {ti} {}: {e}", spec.kind.name()));
                            outcomes.push(None);
                        }
                    }
                }
                (outcomes, trial_errors)
            })
            .collect();

        let wall_ms = if cfg.record_timing {
            start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        };

        for (ei, spec) in cfg.estimators.iter().enumerate() {
            let r = resolve_r(spec, k_budget, p, q, d);
            let mut trials_done = 0u32;
            let mut hits = 0u32;
            let mut budget_total = 0u64;
            for (outcomes, _) in &trial_results {
                if let Some((hit, budget)) = outcomes[ei] {
                    trials_done += 1;
                    hits += hit as u32;
                    budget_total += budget;
                }
            }
            if trials_done == 0 {
                errors.push(format!(
                    "grid point {}={gval}: estimator {} produced no trials",
                    cfg.sweep.name(),
                    spec.kind.name()
                ));
                continue;
            }
            let prob = hits as f64 / trials_done as f64;
            rows.push(ResultRow {
                estimator: spec.kind.name().to_string(),
                topology: topo_label.clone(),
                n: cfg.n_infected,
                k_budget,
                p,
                q,
                r,
                trials: trials_done,
                hits,
                detection_prob: prob,
                stderr: (prob * (1.0 - prob) / trials_done as f64).sqrt(),
                mean_budget: budget_total as f64 / trials_done as f64,
                wall_ms,
            });
        }
        for (_, trial_errors) in &trial_results {
            errors.extend(trial_errors.iter().cloned());
        }
    }
    rows.sort_by(|a, b| a.estimator.cmp(&b.estimator).then(a.cmp_grid(b)));
    Ok(RunOutput { rows, errors })
}

impl ResultRow {
    fn cmp_grid(&self, other: &ResultRow) -> std::cmp::Ordering {
        (self.k_budget, self.p, self.q)
            .partial_cmp(&(other.k_budget, other.p, other.q))
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Writes the CSV with the fixed header; errors on an empty row set.
pub fn emit_csv<W: Write>(rows: &[ResultRow], mut out: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::NoRows);
    }
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.to_csv_line())?;
    }
    Ok(())
}

/// Parses a CSV produced by [`emit_csv`] (round-trip property).
pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        _ => return Err(Error::Config("missing or wrong CSV header".into())),
    }
    lines.map(ResultRow::from_csv_line).collect()
}

/// Writes a self-contained SVG line plot of detection probability versus
/// the sweep axis, one polyline per estimator, with +-2 stderr whiskers.
pub fn emit_svg_plot<W: Write>(rows: &[ResultRow], axis: SweepAxis, mut out: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::NoRows);
    }
    const W_PX: f64 = 640.0;
    const H_PX: f64 = 420.0;
    const ML: f64 = 60.0;
    const MR: f64 = 20.0;
    const MT: f64 = 20.0;
    const MB: f64 = 50.0;
    const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

    let xval = |row: &ResultRow| match axis {
        SweepAxis::P => row.p,
        SweepAxis::Q => row.q,
        SweepAxis::K => row.k_budget as f64,
    };
    let xs: Vec<f64> = rows.iter().map(xval).collect();
    let (xmin, xmax) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    let span = if xmax > xmin { xmax - xmin } else { 1.0 };
    let px = |x: f64| ML + (x - xmin) / span * (W_PX - ML - MR);
    let py = |y: f64| MT + (1.0 - y.clamp(0.0, 1.0)) * (H_PX - MT - MB);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W_PX}\" height=\"{H_PX}\" \
         viewBox=\"0 0 {W_PX} {H_PX}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{W_PX}\" height=\"{H_PX}\" fill=\"white\"/>"
    );
    // Axes and gridlines.
    for i in 0..=5 {
        let y = i as f64 / 5.0;
        let _ = writeln!(
            svg,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#ddd\"/>",
            ML,
            py(y),
            W_PX - MR,
            py(y)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{y:.1}</text>",
            ML - 6.0,
            py(y) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
        (ML + W_PX - MR) / 2.0,
        H_PX - 12.0,
        axis.name()
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{}\" transform=\"rotate(-90 16 {})\" \
         text-anchor=\"middle\">detection probability</text>",
        H_PX / 2.0,
        H_PX / 2.0
    );

    let mut estimators: Vec<&str> = rows.iter().map(|r| r.estimator.as_str()).collect();
    estimators.dedup();
    estimators.sort_unstable();
    estimators.dedup();
    for (ci, est) in estimators.iter().enumerate() {
        let color = COLORS[ci % COLORS.len()];
        let mut series: Vec<&ResultRow> =
            rows.iter().filter(|r| r.estimator == *est).collect();
        series.sort_by(|a, b| {
            xval(a)
                .partial_cmp(&xval(b))
                .expect("finite axis values")
        });
        let points: Vec<String> = series
            .iter()
            .map(|r| format!("{:.2},{:.2}", px(xval(r)), py(r.detection_prob)))
            .collect();
        let _ = writeln!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            points.join(" ")
        );
        for r in &series {
            let x = px(xval(r));
            let lo = py(r.detection_prob - 2.0 * r.stderr);
            let hi = py(r.detection_prob + 2.0 * r.stderr);
            let _ = writeln!(
                svg,
                "<line x1=\"{x:.2}\" y1=\"{lo:.2}\" x2=\"{x:.2}\" y2=\"{hi:.2}\" \
                 stroke=\"{color}\"/>"
            );
            let _ = writeln!(
                svg,
                "<circle cx=\"{x:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>",
                py(r.detection_prob)
            );
        }
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" fill=\"{color}\">{est}</text>",
            W_PX - MR - 120.0,
            MT + 16.0 * (ci as f64 + 1.0)
        );
    }
    let _ = writeln!(svg, "</svg>");
    out.write_all(svg.as_bytes())?;
    Ok(())
}
