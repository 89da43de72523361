use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use labelleak::graph::{load_attributes, load_edge_list, AplMode, GraphMetrics, IdStyle};
use labelleak::labeling::{assign_labels, estimate_params, LabelingParams};
use labelleak::pipeline::{
    emit_reports, emit_sweep, load_graph, run_attack_on, sweep_grid, ExperimentConfig, GraphSource,
    LabelingSection,
};
use labelleak::split::{recursive_split, SplitConfig};
use labelleak::stats::TTestKind;
use labelleak::{Error, Graph};
use log::info;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "labelleak", version, about = "Node re-identification risk of binary attributes in graphs")]
struct Cli {
    /// Log progress (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print density, transitivity, assortativity and average path length.
    Metrics {
        #[arg(long)]
        graph: PathBuf,
        /// Sample this many BFS sources instead of the exact mean.
        #[arg(long, requires = "seed")]
        apl_sources: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Write sanitized/auxiliary graphs with a BFS-HD overlap.
    Split {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        attributes: Option<PathBuf>,
        #[arg(long, default_value_t = 0.2)]
        alpha: f64,
        #[arg(long, default_value_t = 1)]
        depth: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Assign attraction-model labels.
    Label {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        max_iters: Option<u64>,
        /// Attribute file to write (`<node> <R|B>` per line).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate attraction parameters of a labeled graph.
    Estimate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        attributes: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run one GS vs GS(LBL) attack.
    Attack(RunArgs),
    /// Run an attack per (p, tau) cell on one topology.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        p_values: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        tau_values: Vec<f64>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    attributes: Option<PathBuf>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long)]
    subsamples: Option<usize>,
    #[arg(long)]
    subsample_size: Option<usize>,
    #[arg(long)]
    trees: Option<usize>,
    #[arg(long, value_parser = parse_test)]
    test: Option<TTestKind>,
    #[arg(long)]
    threads: Option<usize>,
    /// Master seed; required unless the config sets one.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_test(s: &str) -> Result<TTestKind, String> {
    match s {
        "paired" => Ok(TTestKind::Paired),
        "welch" => Ok(TTestKind::Welch),
        _ => Err(format!("expected paired or welch, got {s}")),
    }
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

type CliResult = Result<(), Failure>;

impl RunArgs {
    fn resolve(&self) -> Result<(ExperimentConfig, PathBuf), Failure> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(g) = &self.graph {
            cfg.graph = Some(GraphSource {
                edges: g.clone(),
                attributes: cfg.graph.take().and_then(|s| s.attributes),
            });
        }
        if let Some(a) = &self.attributes {
            match cfg.graph.as_mut() {
                Some(g) => g.attributes = Some(a.clone()),
                None => return Err(Failure::Usage("--attributes needs a graph".into())),
            }
        }
        match (self.p, self.tau, cfg.labeling.as_mut()) {
            (None, None, _) => {}
            (p, tau, Some(l)) => {
                l.p = p.unwrap_or(l.p);
                l.tau = tau.unwrap_or(l.tau);
            }
            (Some(p), Some(tau), None) => {
                cfg.labeling = Some(LabelingSection { p, tau, max_iters: None });
            }
            _ => return Err(Failure::Usage("--p and --tau go together".into())),
        }
        if let Some(v) = self.alpha {
            cfg.split.alpha = v;
        }
        if let Some(v) = self.depth {
            cfg.split.depth = v;
        }
        if let Some(v) = self.subsamples {
            cfg.sampling.subsamples = v;
        }
        if let Some(v) = self.subsample_size {
            cfg.sampling.subsample_size = v;
        }
        if let Some(v) = self.trees {
            cfg.forest.n_trees = v;
        }
        if let Some(v) = self.test {
            cfg.stats.test = v;
        }
        if let Some(v) = self.threads {
            cfg.runtime.threads = Some(v);
        }
        if let Some(v) = self.seed {
            cfg.seeds.master = Some(v);
        }
        if cfg.graph.is_none() {
            return Err(Failure::Usage("no graph: pass --graph or set [graph] in the config".into()));
        }
        if let Err(e @ Error::Config(_)) = cfg.seeds.resolve() {
            return Err(Failure::Usage(format!("{e}; pass --seed")));
        }
        let out = self
            .out
            .clone()
            .or_else(|| cfg.output.dir.clone())
            .ok_or_else(|| Failure::Usage("no output directory: pass --out or set output.dir".into()))?;
        cfg.validate()?;
        if let Some(n) = cfg.runtime.threads {
            // fails only if a pool already exists, which keeps its size
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        Ok((cfg, out))
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |x| x.to_string())
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    File::create(path).map(BufWriter::new).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn metrics(graph: &Path, apl_sources: Option<usize>, seed: Option<u64>, json: bool) -> CliResult {
    let (g, _) = load_edge_list(graph)?;
    let mode = match (apl_sources, seed) {
        (Some(sources), Some(seed)) => AplMode::Sampled { sources, seed },
        _ => AplMode::Exact,
    };
    let m = GraphMetrics::compute(&g, mode)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&m).expect("metrics serialize"));
    } else {
        println!("nodes {}", g.node_count());
        println!("edges {}", g.edge_count());
        println!("density {}", m.density);
        println!("transitivity {}", m.transitivity);
        println!("assortativity {}", fmt_opt(m.assortativity));
        println!("avg_path_length {}", fmt_opt(m.avg_path_length));
        println!("exact_apl {}", m.exact_apl);
        println!("disconnected_fraction {}", m.disconnected_fraction);
    }
    Ok(())
}

fn split(
    graph: &Path,
    attributes: Option<&Path>,
    alpha: f64,
    depth: u32,
    seed: u64,
    out: &Path,
) -> CliResult {
    let (mut g, _) = load_edge_list(graph)?;
    if let Some(a) = attributes {
        g = load_attributes(g, a)?;
    }
    let splits = recursive_split(&g, &SplitConfig { alpha, seed, depth })?;
    for s in &splits {
        let dir = if splits.len() == 1 {
            out.to_path_buf()
        } else {
            out.join(s.lineage.replace('/', "_"))
        };
        s.export(&dir)?;
        println!(
            "{}: san {} nodes, aux {} nodes, overlap {} -> {}",
            s.lineage,
            s.san.node_count(),
            s.aux.node_count(),
            s.overlap.len(),
            dir.display()
        );
    }
    Ok(())
}

fn label(graph: &Path, params: LabelingParams, out: Option<&Path>) -> CliResult {
    let (g, _) = load_edge_list(graph)?;
    params.validate()?;
    let r = assign_labels(&g, &params)?;
    println!("target_delta {}", r.target_delta);
    println!("achieved_cross_ties {}", r.achieved_cross_ties);
    println!("iterations {}", r.iterations);
    println!("accepted_swaps {}", r.accepted_swaps);
    println!("converged {}", r.converged);
    if !r.converged {
        return Err(Error::NotConverged(Box::new(r)).into());
    }
    if let Some(path) = out {
        let labeled: Graph = g.with_attributes(r.assignment)?;
        let mut w = create(path)?;
        labeled.write_attributes(&mut w, IdStyle::Source)?;
        w.flush().map_err(|e| io_error(path, e))?;
    }
    Ok(())
}

fn estimate(graph: &Path, attributes: &Path, json: bool) -> CliResult {
    let (g, _) = load_edge_list(graph)?;
    let g = load_attributes(g, attributes)?;
    let e = estimate_params(&g)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&e).expect("estimate serialize"));
    } else {
        println!("p {}", e.p);
        println!("tau {}", e.tau);
        println!("cross_fraction {}", e.cross_fraction);
        println!("clamped {}", e.clamped);
    }
    Ok(())
}

fn attack(args: &RunArgs) -> CliResult {
    let (cfg, out) = args.resolve()?;
    let graph = load_graph(&cfg)?;
    let report = run_attack_on(&graph, &cfg)?;
    let files = emit_reports(&report, &out)?;
    println!(
        "GS mean F1 {:.4}, GS(LBL) mean F1 {:.4}, t {}",
        report.gs_mean_f1,
        report.gs_lbl_mean_f1,
        fmt_opt(report.t_statistic())
    );
    info!("wrote {} files to {}", files.len(), out.display());
    Ok(())
}

fn sweep(args: &RunArgs, p_values: &[f64], tau_values: &[f64]) -> CliResult {
    let (cfg, out) = args.resolve()?;
    let graph = load_graph(&cfg)?;
    let result = sweep_grid(&graph, &cfg, p_values, tau_values)?;
    emit_sweep(&result, &out)?;
    result
        .write_grid_csv(std::io::stdout().lock())
        .map_err(|e| io_error(Path::new("<stdout>"), e))?;
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Metrics {
            graph,
            apl_sources,
            seed,
            json,
        } => metrics(&graph, apl_sources, seed, json),
        Command::Split {
            graph,
            attributes,
            alpha,
            depth,
            seed,
            out,
        } => split(&graph, attributes.as_deref(), alpha, depth, seed, &out),
        Command::Label {
            graph,
            p,
            tau,
            seed,
            max_iters,
            out,
        } => label(
            &graph,
            LabelingParams {
                p,
                tau,
                seed,
                max_iters,
            },
            out.as_deref(),
        ),
        Command::Estimate {
            graph,
            attributes,
            json,
        } => estimate(&graph, &attributes, json),
        Command::Attack(args) => attack(&args),
        Command::Sweep {
            run,
            p_values,
            tau_values,
        } => sweep(&run, &p_values, &tau_values),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("usage: labelleak <metrics|split|label|estimate|attack|sweep> [options]; see --help");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            match e.root() {
                Error::NotConverged(r) => {
                    eprintln!(
                        "feasibility: target {} cross ties, reached {} after {} swap attempts",
                        r.target_delta, r.achieved_cross_ties, r.iterations
                    );
                    ExitCode::from(EXIT_NOT_CONVERGED)
                }
                Error::Config(_) => ExitCode::from(EXIT_USAGE),
                _ => ExitCode::from(EXIT_DATA),
            }
        }
    }
}
