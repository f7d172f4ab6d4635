//! The `gyr` binary: scene-driven gyration computations.
//!
//! Exit codes are stable: 0 success, 2 scene parse/consistency failures,
//! 3 domain errors, 4 enumeration over the cap, 5 I/O failures.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gyr_cli::SceneFile;
use gyr_core::{
    apply_permutation, degree_weighted_rg, estimate_expectation_with, symmetrized_rg_closed,
    symmetrized_rg_exact, symmetrized_rg_monte_carlo, DirectedMultigraph, EmbeddingError,
    EnsembleError, GroupPermutation, GroupedDisplacements, StructureEmbedding, SubdivisionGraph,
    SymmetrizationMethod, SymmetrizationReport, SymmetryError, WeightedPointCloud,
    DEFAULT_ENUMERATION_CAP,
};

#[derive(Parser)]
#[command(
    name = "gyr",
    about = "Gyration measures for embedded subdivision graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the derived graph's vertex/edge counts and its edge table.
    Subdivide { scene: PathBuf },
    /// Squared radius of gyration of the scene's junction cloud (or, with
    /// --full, of the whole derived cloud).
    Rg {
        scene: PathBuf,
        /// Vertex weighting of the junction cloud.
        #[arg(long, value_enum, default_value_t = Weighting::Uniform)]
        weighted: Weighting,
        /// Measure the full derived cloud; needs disp lines.
        #[arg(long)]
        full: bool,
    },
    /// Average gyration over all reorderings of the displacement tables.
    Symmetrize {
        scene: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        /// Sample count for --method mc.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// RNG seed for --method mc.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Enumeration bound for --method exact.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u128,
        /// Emit a single-line JSON record instead of text.
        #[arg(long)]
        json: bool,
        /// Stand in for missing disp lines with even splits w'/n.
        #[arg(long)]
        straight: bool,
    },
    /// Phantom-ensemble estimate of the expected gyration (pos/disp unused).
    Sample {
        scene: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Variance of each displacement coordinate.
        #[arg(long, default_value_t = 1.0)]
        var: f64,
        /// Also write one CSV row per sample to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Weighting {
    Uniform,
    Deg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Closed,
    Exact,
    Mc,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }

    fn domain(message: impl ToString) -> Self {
        Failure::new(3, message)
    }

    fn io(path: &Path, error: std::io::Error) -> Self {
        Failure::new(5, format!("{}: {error}", path.display()))
    }
}

fn from_embedding(error: EmbeddingError) -> Failure {
    let code = match error {
        EmbeddingError::Inconsistent { .. } => 2,
        EmbeddingError::CapExceeded { .. } => 4,
        _ => 3,
    };
    Failure::new(code, error)
}

fn from_symmetry(error: SymmetryError) -> Failure {
    match error {
        SymmetryError::Embedding(inner) => from_embedding(inner),
        other => Failure::domain(other),
    }
}

fn from_ensemble(error: EnsembleError) -> Failure {
    match error {
        EnsembleError::Embedding(inner) => from_embedding(inner),
        EnsembleError::Symmetry(inner) => from_symmetry(inner),
        other => Failure::domain(other),
    }
}

fn fmt_float(value: f64) -> String {
    format!("{value:.16e}")
}

fn load_scene(path: &Path) -> Result<SceneFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|error| Failure::io(path, error))?;
    SceneFile::parse(&text).map_err(|error| Failure::new(2, error))
}

fn build_graph(scene: &SceneFile) -> Result<DirectedMultigraph, Failure> {
    DirectedMultigraph::new(scene.vertices, scene.edges.clone()).map_err(Failure::domain)
}

fn build_subdivision(scene: &SceneFile) -> Result<SubdivisionGraph, Failure> {
    build_graph(scene)?
        .subdivide(scene.n)
        .map_err(Failure::domain)
}

/// The scene's displacement table, or the even-split stand-in under
/// --straight. Supplying both is ambiguous and refused.
fn displacement_table(scene: &SceneFile, straight: bool) -> Result<Vec<f64>, Failure> {
    match (&scene.displacements, straight) {
        (Some(_), true) => Err(Failure::domain(
            "scene already has disp lines; drop --straight or remove them",
        )),
        (Some(table), false) => Ok(table.clone()),
        (None, true) => Ok(scene.straight_displacements()),
        (None, false) => Err(Failure::domain(
            "scene has no disp lines; add them or pass --straight for even splits",
        )),
    }
}

fn cmd_subdivide(path: &Path) -> Result<(), Failure> {
    let scene = load_scene(path)?;
    let sub = build_subdivision(&scene)?;
    println!("v={} e={}", sub.vertex_count(), sub.edge_count());
    for (i, j) in sub.edge_pairs() {
        println!(
            "edge {i},{j} tail {} head {}",
            sub.tail(i, j),
            sub.head(i, j)
        );
    }
    Ok(())
}

fn cmd_rg(path: &Path, weighted: Weighting, full: bool) -> Result<(), Failure> {
    let scene = load_scene(path)?;
    let graph = build_graph(&scene)?;
    let value = if full {
        if weighted == Weighting::Deg {
            return Err(Failure::domain(
                "the full derived cloud is uniform; --full cannot combine with --weighted deg",
            ));
        }
        let sub = build_subdivision(&scene)?;
        let table = displacement_table(&scene, false)?;
        let x_prime = StructureEmbedding::new(graph, scene.dim, scene.positions.clone())
            .map_err(from_embedding)?;
        let w = GroupedDisplacements::new(sub, scene.dim, table).map_err(from_embedding)?;
        let identity = GroupPermutation::identity(scene.edges.len(), scene.n);
        apply_permutation(&x_prime, &w, &identity)
            .map_err(from_embedding)?
            .rg2()
    } else {
        match weighted {
            Weighting::Uniform => WeightedPointCloud::uniform(scene.dim, scene.positions.clone())
                .map_err(Failure::domain)?
                .rg2(),
            Weighting::Deg => {
                degree_weighted_rg(&graph, scene.dim, &scene.positions).map_err(Failure::domain)?
            }
        }
    };
    println!("{}", fmt_float(value));
    Ok(())
}

fn json_line(report: &SymmetrizationReport) -> String {
    let method = match report.method {
        SymmetrizationMethod::Closed => "closed",
        SymmetrizationMethod::Exact => "exact",
        SymmetrizationMethod::MonteCarlo => "mc",
    };
    let stderr = report
        .stderr
        .map(fmt_float)
        .unwrap_or_else(|| "null".to_string());
    let samples = report
        .samples
        .map(|count| count.to_string())
        .unwrap_or_else(|| "null".to_string());
    format!(
        "{{\"method\":\"{method}\",\"value\":{},\"stderr\":{stderr},\"samples\":{samples},\
         \"terms\":{{\"reweighted_rg2\":{},\"displacement_term\":{},\"group_sum_term\":{}}}}}",
        fmt_float(report.value),
        fmt_float(report.terms.reweighted_rg2),
        fmt_float(report.terms.displacement_term),
        fmt_float(report.terms.group_sum_term),
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_symmetrize(
    path: &Path,
    method: Method,
    samples: u64,
    seed: u64,
    cap: u128,
    json: bool,
    straight: bool,
) -> Result<(), Failure> {
    let scene = load_scene(path)?;
    let graph = build_graph(&scene)?;
    let sub = build_subdivision(&scene)?;
    let table = displacement_table(&scene, straight)?;
    let x_prime = StructureEmbedding::new(graph, scene.dim, scene.positions.clone())
        .map_err(from_embedding)?;
    let w = GroupedDisplacements::new(sub, scene.dim, table).map_err(from_embedding)?;
    let report = match method {
        Method::Closed => symmetrized_rg_closed(&x_prime, &w),
        Method::Exact => symmetrized_rg_exact(&x_prime, &w, cap),
        Method::Mc => symmetrized_rg_monte_carlo(&x_prime, &w, samples, seed),
    }
    .map_err(from_symmetry)?;

    if json {
        println!("{}", json_line(&report));
    } else {
        println!("value={}", fmt_float(report.value));
        if let Some(stderr) = report.stderr {
            println!("stderr={}", fmt_float(stderr));
        }
        if let Some(count) = report.samples {
            println!("samples={count}");
        }
    }
    Ok(())
}

fn cmd_sample(
    path: &Path,
    samples: u64,
    seed: u64,
    var: f64,
    csv: Option<&Path>,
) -> Result<(), Failure> {
    let scene = load_scene(path)?;
    let sub = build_subdivision(&scene)?;
    let mut rows = csv.map(|_| String::from("index,rg2_direct,rg2_closed\n"));
    let stats =
        estimate_expectation_with(&sub, scene.dim, samples, seed, var, |k, direct, closed| {
            if let Some(rows) = &mut rows {
                let _ = writeln!(rows, "{k},{},{}", fmt_float(direct), fmt_float(closed));
            }
        })
        .map_err(from_ensemble)?;
    if let (Some(path), Some(rows)) = (csv, rows) {
        std::fs::write(path, rows).map_err(|error| Failure::io(path, error))?;
    }
    println!("samples={}", stats.samples);
    println!("seed={}", stats.seed);
    println!("mean_direct={}", fmt_float(stats.mean_direct));
    println!("mean_closed={}", fmt_float(stats.mean_closed));
    println!("stderr_direct={}", fmt_float(stats.stderr_direct));
    println!("stderr_diff={}", fmt_float(stats.stderr_diff));
    Ok(())
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Subdivide { scene } => cmd_subdivide(&scene),
        Command::Rg {
            scene,
            weighted,
            full,
        } => cmd_rg(&scene, weighted, full),
        Command::Symmetrize {
            scene,
            method,
            samples,
            seed,
            cap,
            json,
            straight,
        } => cmd_symmetrize(&scene, method, samples, seed, cap, json, straight),
        Command::Sample {
            scene,
            samples,
            seed,
            var,
            csv,
        } => cmd_sample(&scene, samples, seed, var, csv.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
