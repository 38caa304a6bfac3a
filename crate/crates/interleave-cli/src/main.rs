//! Command-line driver: bounds, pairwise matrices, classification, fixture
//! generation, LP export and import, and graph validation.
//!
//! Exit codes: 0 success, 1 input error, 2 infinite bound, 3 budget
//! exceeded without a proven result.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use interleave_core::cloud::{build_mapper, CoverSpec};
use interleave_core::gen::{counterexample_pair, line_mapper, torus_mapper};
use interleave_core::ilp::build_model;
use interleave_core::{search_over_n, solve_exact, Budget, Bundle, MapperGraph, Value};
use interleave_cli::format::{
    self, read_cloud_csv, read_graph, read_labels, write_graph, write_labels, DistanceMatrix,
};
use interleave_cli::img::read_image;
use interleave_cli::knn::{confusion_csv, Dataset};
use interleave_cli::letters;
use serde_json::json;

const EXIT_INFINITE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "interleave", version, about = "Interleaving-distance bounds for mapper graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct SolveOpts {
    /// Fixed shift; solves a single bound at this n.
    #[arg(long, conflicts_with = "search")]
    n: Option<u64>,
    /// Optimize the bound over n (default when --n is absent).
    #[arg(long)]
    search: bool,
    /// Node budget for the assignment search.
    #[arg(long, default_value_t = 20_000_000)]
    budget_nodes: u64,
    /// Wall-clock budget in seconds; 0 disables the clock.
    #[arg(long, default_value_t = 120)]
    budget_seconds: u64,
    /// Largest shift the search may visit (default twice the half range).
    #[arg(long)]
    n_cap: Option<u64>,
}

impl SolveOpts {
    fn budget(&self) -> Budget {
        Budget {
            max_nodes: self.budget_nodes,
            max_seconds: (self.budget_seconds > 0).then_some(self.budget_seconds),
        }
    }
}

#[derive(Args, Clone)]
struct OutputOpts {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Omit run metadata (timestamps) so outputs are byte-stable.
    #[arg(long)]
    deterministic: bool,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl OutputOpts {
    fn emit(&self, mut body: serde_json::Value) -> Result<()> {
        if !self.deterministic {
            if let Some(obj) = body.as_object_mut() {
                obj.insert("generated_unix".into(), json!(unix_now()));
            }
        }
        let text = serde_json::to_string_pretty(&body)? + "\n";
        self.write(&text)
    }

    fn write(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(path) => fs::write(path, text)
                .with_context(|| format!("writing {}", path.display()))?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[derive(Subcommand)]
enum Cmd {
    /// Bound the interleaving distance between two graph files.
    Bound {
        graph_a: PathBuf,
        graph_b: PathBuf,
        #[command(flatten)]
        solve: SolveOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Pairwise bound matrix over every graph JSON file in a directory.
    Pairwise {
        dir: PathBuf,
        #[command(flatten)]
        solve: SolveOpts,
        #[command(flatten)]
        out: OutputOpts,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// KNN classification from a distance matrix and a label file.
    Classify {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        /// Fixed neighbor count; cross-validates over 1..=30 when absent.
        #[arg(long)]
        k: Option<usize>,
        /// Write the leave-one-out confusion matrix CSV here.
        #[arg(long)]
        confusion: Option<PathBuf>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Write fixture graphs (and label files where applicable).
    Generate {
        #[command(subcommand)]
        what: GenCmd,
    },
    /// Export the fixed-n assignment program in LP format.
    ExportLp {
        graph_a: PathBuf,
        graph_b: PathBuf,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Score an externally solved LP assignment.
    ImportSolution {
        graph_a: PathBuf,
        graph_b: PathBuf,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        solution: PathBuf,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Check a graph file against the format invariants.
    Validate { graph: PathBuf },
}

#[derive(Subcommand)]
enum GenCmd {
    /// Path graph with one vertex per level.
    Line {
        #[arg(long, default_value_t = 0)]
        lo: i64,
        #[arg(long, default_value_t = 20)]
        hi: i64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Path-cycle-path graph with a centered loop of the given height.
    Torus {
        #[arg(long)]
        h: i64,
        #[arg(long, default_value_t = 0)]
        lo: i64,
        #[arg(long, default_value_t = 20)]
        hi: i64,
        #[arg(long)]
        output: PathBuf,
    },
    /// The fixed pair where the bound at n=1 overshoots the distance.
    Counterexample {
        /// Directory receiving counterexample_f.json and counterexample_g.json.
        #[arg(long)]
        output: PathBuf,
    },
    /// 54 letter-shaped mapper graphs (6 classes) plus labels.csv.
    Letters {
        /// Output directory for the graph files and labels.csv.
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 10)]
        intervals: usize,
        #[arg(long, default_value_t = 0.3)]
        overlap: f64,
        #[arg(long, default_value_t = 0.12)]
        epsilon: f64,
        #[arg(long, default_value_t = 20)]
        resolution: i64,
    },
    /// Mapper graph of an annulus point cloud (one loop).
    Annulus {
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 600)]
        points: usize,
    },
    /// Mapper graph from a point-cloud CSV or a PBM/PGM bitmap.
    Cloud {
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 10)]
        intervals: usize,
        #[arg(long, default_value_t = 0.3)]
        overlap: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 20)]
        resolution: i64,
        /// Foreground threshold for bitmaps.
        #[arg(long, default_value_t = 128)]
        threshold: u8,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("INTERLEAVE_LOG")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Bound { graph_a, graph_b, solve, out } => bound(&graph_a, &graph_b, &solve, &out),
        Cmd::Pairwise { dir, solve, out, jobs } => pairwise(&dir, &solve, &out, jobs),
        Cmd::Classify { matrix, labels, k, confusion, out } => {
            classify(&matrix, &labels, k, confusion.as_deref(), &out)
        }
        Cmd::Generate { what } => generate(what),
        Cmd::ExportLp { graph_a, graph_b, n, output } => export_lp(&graph_a, &graph_b, n, &output),
        Cmd::ImportSolution { graph_a, graph_b, n, solution, out } => {
            import_solution(&graph_a, &graph_b, n, &solution, &out)
        }
        Cmd::Validate { graph } => validate(&graph),
    }
}

fn bound(a: &Path, b: &Path, solve: &SolveOpts, out: &OutputOpts) -> Result<ExitCode> {
    let f = read_graph(a)?;
    let g = read_graph(b)?;
    let budget = solve.budget();
    let (body, bound, proven) = match solve.n {
        Some(n) => {
            let s = solve_exact(&Bundle::new(f, g, n), &budget)
                .map_err(|e| anyhow::anyhow!("infeasible at n={n}: {e}"))?;
            let bound = s.report.bound();
            let proven = s.proven_optimal;
            (json!({ "mode": "fixed", "n": n, "result": format::solved_json(&s) }), bound, proven)
        }
        None => {
            let t = search_over_n(&f, &g, &budget, solve.n_cap);
            let bound = t.bound;
            let proven = t.proven;
            (json!({ "mode": "search", "result": format::trace_json(&t) }), bound, proven)
        }
    };
    out.emit(body)?;
    Ok(exit_for(bound, proven))
}

fn exit_for(bound: Value, proven: bool) -> ExitCode {
    if bound == Value::Unbounded {
        ExitCode::from(EXIT_INFINITE)
    } else if !proven {
        ExitCode::from(EXIT_BUDGET)
    } else {
        ExitCode::SUCCESS
    }
}

fn graph_files(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "json") {
            let stem = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            files.push((stem, path));
        }
    }
    files.sort();
    Ok(files)
}

fn pairwise(dir: &Path, solve: &SolveOpts, out: &OutputOpts, jobs: Option<usize>) -> Result<ExitCode> {
    use rayon::prelude::*;

    let files = graph_files(dir)?;
    if files.len() < 2 {
        bail!("need at least two graph files in {}", dir.display());
    }
    let graphs: Vec<(String, MapperGraph)> = files
        .iter()
        .map(|(stem, path)| Ok((stem.clone(), read_graph(path)?)))
        .collect::<Result<_>>()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .context("building worker pool")?;
    let budget = solve.budget();
    let n_cap = solve.n_cap;

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..graphs.len() {
        for j in (i + 1)..graphs.len() {
            pairs.push((i, j));
        }
    }
    // The bound search is not orientation-symmetric; take the better of the
    // two roles for each unordered pair.
    let computed: Vec<(usize, usize, Value, bool)> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(i, j)| {
                let fwd = search_over_n(&graphs[i].1, &graphs[j].1, &budget, n_cap);
                let rev = search_over_n(&graphs[j].1, &graphs[i].1, &budget, n_cap);
                let bound = fwd.bound.min(rev.bound);
                (i, j, bound, fwd.proven || rev.proven)
            })
            .collect()
    });

    let n = graphs.len();
    let mut values = vec![vec![Value::Fin(0); n]; n];
    let mut all_proven = true;
    let mut any_infinite = false;
    for (i, j, bound, proven) in computed {
        values[i][j] = bound;
        values[j][i] = bound;
        all_proven &= proven;
        any_infinite |= bound == Value::Unbounded;
    }
    let matrix = DistanceMatrix { labels: graphs.iter().map(|(s, _)| s.clone()).collect(), values };

    match out.format {
        Format::Csv => out.write(&matrix.to_csv())?,
        Format::Json => out.emit(json!({
            "labels": matrix.labels,
            "values": matrix
                .values
                .iter()
                .map(|row| row.iter().map(|&v| format::value_json(v)).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        }))?,
    }
    Ok(if any_infinite {
        ExitCode::from(EXIT_INFINITE)
    } else if !all_proven {
        ExitCode::from(EXIT_BUDGET)
    } else {
        ExitCode::SUCCESS
    })
}

fn classify(
    matrix: &Path,
    labels: &Path,
    k: Option<usize>,
    confusion: Option<&Path>,
    out: &OutputOpts,
) -> Result<ExitCode> {
    let m = DistanceMatrix::from_csv(
        &fs::read_to_string(matrix).with_context(|| format!("reading {}", matrix.display()))?,
    )?;
    let pairs = read_labels(labels)?;
    let data = Dataset::new(m, &pairs)?;
    let (k, cv_accuracy) = match k {
        Some(k) => (k, data.fold_accuracy(k, 5)),
        None => data.select_k(30, 5),
    };
    let loo = data.loo_accuracy(k);
    let (classes, cm) = data.confusion(k);
    if let Some(path) = confusion {
        fs::write(path, confusion_csv(&classes, &cm))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    out.emit(json!({
        "samples": data.len(),
        "classes": classes,
        "k": k,
        "cv_accuracy": cv_accuracy,
        "loo_accuracy": loo,
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn generate(what: GenCmd) -> Result<ExitCode> {
    match what {
        GenCmd::Line { lo, hi, output } => {
            if lo >= hi {
                bail!("need lo < hi");
            }
            write_graph(&output, &line_mapper(lo, hi))?;
        }
        GenCmd::Torus { h, lo, hi, output } => {
            if h < 1 || h > hi - lo - 2 {
                bail!("loop height {h} does not fit in [{lo}, {hi}] with tails");
            }
            let mid = (lo + hi) / 2;
            let loop_lo = mid - h / 2;
            write_graph(&output, &torus_mapper(lo, hi, loop_lo, loop_lo + h))?;
        }
        GenCmd::Counterexample { output } => {
            fs::create_dir_all(&output)?;
            let (f, g) = counterexample_pair();
            write_graph(&output.join("counterexample_f.json"), &f)?;
            write_graph(&output.join("counterexample_g.json"), &g)?;
        }
        GenCmd::Letters { output, intervals, overlap, epsilon, resolution } => {
            fs::create_dir_all(&output)?;
            let spec =
                CoverSpec { intervals, overlap, epsilon, resolution: Some(resolution) };
            let mut pairs = Vec::new();
            for (name, class, cloud) in letters::corpus() {
                let (g, info) = build_mapper(&cloud, &spec)
                    .map_err(|e| anyhow::anyhow!("building {name}: {e}"))?;
                if info.trimmed {
                    log::warn!("{name}: kept largest component, dropped {} vertices", info.dropped_vertices);
                }
                write_graph(&output.join(format!("{name}.json")), &g)?;
                pairs.push((name, class));
            }
            write_labels(&output.join("labels.csv"), &pairs)?;
        }
        GenCmd::Annulus { output, points } => {
            let mut cloud = Vec::with_capacity(points);
            for i in 0..points {
                let a = core::f64::consts::TAU * i as f64 / points as f64;
                cloud.push([a.cos(), a.sin()]);
            }
            let spec = CoverSpec { intervals: 10, overlap: 0.3, epsilon: 0.25, resolution: Some(20) };
            let (g, _) = build_mapper(&interleave_core::cloud::PointCloud2D::new(cloud), &spec)
                .map_err(|e| anyhow::anyhow!("building annulus: {e}"))?;
            write_graph(&output, &g)?;
        }
        GenCmd::Cloud { input, output, intervals, overlap, epsilon, resolution, threshold } => {
            let cloud = if input.extension().is_some_and(|e| e == "csv") {
                read_cloud_csv(&input)?
            } else {
                let img = read_image(&input)?;
                interleave_core::cloud::image_to_cloud(img.width, img.height, &img.pixels, threshold)
            };
            let spec = CoverSpec { intervals, overlap, epsilon, resolution: Some(resolution) };
            let (g, info) = build_mapper(&cloud, &spec)
                .map_err(|e| anyhow::anyhow!("building mapper: {e}"))?;
            if info.trimmed {
                log::warn!("kept largest component, dropped {} vertices", info.dropped_vertices);
            }
            write_graph(&output, &g)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn export_lp(a: &Path, b: &Path, n: u64, output: &Path) -> Result<ExitCode> {
    let f = read_graph(a)?;
    let g = read_graph(b)?;
    let model = build_model(&Bundle::new(f, g, n))
        .map_err(|e| anyhow::anyhow!("building model: {e}"))?;
    fs::write(output, model.export_lp())
        .with_context(|| format!("writing {}", output.display()))?;
    Ok(ExitCode::SUCCESS)
}

fn import_solution(a: &Path, b: &Path, n: u64, solution: &Path, out: &OutputOpts) -> Result<ExitCode> {
    let f = read_graph(a)?;
    let g = read_graph(b)?;
    let bundle = Bundle::new(f, g, n);
    let model = build_model(&bundle).map_err(|e| anyhow::anyhow!("building model: {e}"))?;
    let text = fs::read_to_string(solution)
        .with_context(|| format!("reading {}", solution.display()))?;
    let (assignment, objective) = model
        .import_solution(&text)
        .map_err(|e| anyhow::anyhow!("parsing solution: {e}"))?;
    let report = interleave_core::loss::evaluate_loss(&bundle, &assignment);
    if report.loss != objective {
        log::warn!("solver objective {objective} differs from evaluated loss {}", report.loss);
    }
    out.emit(json!({
        "n": n,
        "objective": format::value_json(objective),
        "report": format::report_json(&report),
    }))?;
    Ok(exit_for(report.bound(), true))
}

fn validate(path: &Path) -> Result<ExitCode> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: interleave_cli::format::GraphFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let grid = interleave_core::Grid::new(file.delta, file.half_range)
        .map_err(|e| anyhow::anyhow!("bad grid: {e}"))?;
    let vertices: Vec<(String, i64)> =
        file.vertices.iter().map(|v| (v.id.clone(), v.level)).collect();
    let edges: Vec<(String, String, String)> = file
        .edges
        .iter()
        .map(|e| (e.id.clone(), e.lower.clone(), e.upper.clone()))
        .collect();
    let d = interleave_core::graph::diagnose(&grid, &vertices, &edges);
    for v in &d.violations {
        println!("violation: {v}");
    }
    println!("connected: {}", d.connected);
    if d.violations.is_empty() {
        println!("ok");
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}
