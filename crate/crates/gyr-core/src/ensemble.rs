//! Random phantom ensembles over a subdivision graph.
//!
//! A phantom sample draws an independent centered Gaussian vector for every
//! derived edge and then finds the embedding whose edge displacements are as
//! close as possible to the draw, by least squares on the derived graph's
//! incidence matrix. The residual is orthogonal to every realizable
//! displacement set, so the projected sample is a consistent embedding and
//! inherits the draw's exchangeability within each subdivided edge. The
//! estimator runs the direct gyration and the closed-form reordering average
//! side by side and tracks the paired difference, whose mean is zero for
//! this ensemble.
//!
//! Sampling is reproducible: sample `k` of a run seeded with `s` uses stream
//! `k` of a ChaCha generator seeded with `s`, so results do not depend on
//! execution order and a rerun with the same seed is bit-identical.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::embedding::{EmbeddingError, FullEmbedding};
use crate::graph::SubdivisionGraph;
use crate::stats::RunningStats;
use crate::symmetry::{symmetrized_rg_closed, SymmetryError};

#[derive(Debug, Error, PartialEq)]
pub enum EnsembleError {
    #[error("dimension must be at least 1")]
    ZeroDim,
    #[error("estimation needs at least {min} samples, got {got}")]
    TooFewSamples { got: u64, min: u64 },
    #[error("variance must be finite and non-negative, got {0}")]
    BadVariance(f64),
    #[error("least squares solve failed: {0}")]
    Solve(String),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
}

/// Fewest samples accepted by [`estimate_expectation`]; below this the
/// standard errors are too noisy to report.
pub const MIN_SAMPLES: u64 = 10;

/// Summary of a paired ensemble run: the direct gyration mean, the
/// closed-form reordering-average mean, and their spreads. `stderr_diff` is
/// the standard error of the per-sample difference, the right yardstick for
/// testing that the two means agree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleStats {
    pub samples: u64,
    pub seed: u64,
    pub mean_direct: f64,
    pub mean_closed: f64,
    pub stderr_direct: f64,
    pub stderr_diff: f64,
}

/// Which degree of freedom the solver pins down. Displacements only
/// determine positions up to a shift per connected component; the gyration
/// of a connected graph is the same in every gauge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Gauge {
    /// Minimum-norm solution: coordinates sum to zero on every component.
    MeanZero,
    /// The lowest-indexed vertex of every component sits at the origin.
    /// Only the tests solve in this gauge, to show gyration doesn't care.
    #[cfg_attr(not(test), allow(dead_code))]
    PinFirst,
}

/// Signed incidence matrix of the derived graph: one row per derived edge,
/// `−1` at the tail and `+1` at the head, so `D·x` lists the displacements.
fn incidence(sub: &SubdivisionGraph) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(sub.edge_count(), sub.vertex_count());
    for (row, (i, j)) in sub.edge_pairs().enumerate() {
        let tail = sub.vertex_index(sub.tail(i, j));
        let head = sub.vertex_index(sub.head(i, j));
        // A derived edge never closes on itself (interiors split any loop),
        // so the two entries land in distinct columns.
        d[(row, tail)] -= 1.0;
        d[(row, head)] += 1.0;
    }
    d
}

/// Connected components of the derived graph; entry `p` is the component id
/// of flat vertex `p`, ids numbered by lowest member.
fn components(sub: &SubdivisionGraph) -> Vec<usize> {
    let v = sub.vertex_count();
    let mut adjacency = vec![Vec::new(); v];
    for (i, j) in sub.edge_pairs() {
        let tail = sub.vertex_index(sub.tail(i, j));
        let head = sub.vertex_index(sub.head(i, j));
        adjacency[tail].push(head);
        adjacency[head].push(tail);
    }
    let mut component = vec![usize::MAX; v];
    let mut next = 0;
    let mut queue = Vec::new();
    for start in 0..v {
        if component[start] != usize::MAX {
            continue;
        }
        component[start] = next;
        queue.push(start);
        while let Some(p) = queue.pop() {
            for &q in &adjacency[p] {
                if component[q] == usize::MAX {
                    component[q] = next;
                    queue.push(q);
                }
            }
        }
        next += 1;
    }
    component
}

fn min_norm_solve(d: &DMatrix<f64>, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>, EnsembleError> {
    let svd = d.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = if sigma_max > 0.0 {
        1e-12 * sigma_max
    } else {
        1e-12
    };
    svd.solve(rhs, eps)
        .map_err(|message| EnsembleError::Solve(message.to_string()))
}

/// Solves `min ‖D·x − w‖` and returns the positions flat (vertex-major).
/// `w` is one drawn vector per derived edge, edge-major.
fn solve_positions(
    sub: &SubdivisionGraph,
    dim: usize,
    w: &[f64],
    gauge: Gauge,
) -> Result<Vec<f64>, EnsembleError> {
    let v = sub.vertex_count();
    let e = sub.edge_count();
    debug_assert_eq!(w.len(), e * dim);
    if e == 0 {
        return Ok(vec![0.0; v * dim]);
    }
    let rhs = DMatrix::from_fn(e, dim, |r, c| w[r * dim + c]);
    let d = incidence(sub);
    let x = match gauge {
        Gauge::MeanZero => min_norm_solve(&d, &rhs)?,
        Gauge::PinFirst => {
            // Drop one column per component and solve the reduced full-rank
            // problem; the dropped vertices stay at the origin.
            let component = components(sub);
            let mut pinned = vec![false; v];
            let mut seen = vec![false; component.iter().copied().max().unwrap_or(0) + 1];
            for p in 0..v {
                if !seen[component[p]] {
                    seen[component[p]] = true;
                    pinned[p] = true;
                }
            }
            let kept: Vec<usize> = (0..v).filter(|&p| !pinned[p]).collect();
            let reduced = DMatrix::from_fn(e, kept.len(), |r, c| d[(r, kept[c])]);
            let solved = min_norm_solve(&reduced, &rhs)?;
            let mut x = DMatrix::zeros(v, dim);
            for (c, &p) in kept.iter().enumerate() {
                for col in 0..dim {
                    x[(p, col)] = solved[(c, col)];
                }
            }
            x
        }
    };
    let mut flat = vec![0.0; v * dim];
    for p in 0..v {
        for c in 0..dim {
            flat[p * dim + c] = x[(p, c)];
        }
    }
    Ok(flat)
}

/// Draws the raw displacement targets for one sample: an independent
/// `N(0, var)` value per derived edge per coordinate, edge-major.
fn draw_targets(rng: &mut ChaCha8Rng, count: usize, var: f64) -> Vec<f64> {
    let scale = var.sqrt();
    (0..count)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            z * scale
        })
        .collect()
}

fn check_domain(dim: usize, var: f64) -> Result<(), EnsembleError> {
    if dim == 0 {
        return Err(EnsembleError::ZeroDim);
    }
    if !var.is_finite() || var < 0.0 {
        return Err(EnsembleError::BadVariance(var));
    }
    Ok(())
}

fn sample_with_gauge(
    sub: &SubdivisionGraph,
    dim: usize,
    seed: u64,
    var: f64,
    gauge: Gauge,
) -> Result<FullEmbedding, EnsembleError> {
    check_domain(dim, var)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    let targets = draw_targets(&mut rng, sub.edge_count() * dim, var);
    let positions = solve_positions(sub, dim, &targets, gauge)?;
    Ok(FullEmbedding::from_positions(sub.clone(), dim, positions)?)
}

/// Draws one phantom sample: Gaussian displacement targets projected onto
/// the consistent embeddings, in the mean-zero gauge. Equals sample `0` of
/// [`estimate_expectation`] run with the same seed and variance.
pub fn sample_phantom(
    sub: &SubdivisionGraph,
    dim: usize,
    seed: u64,
    var: f64,
) -> Result<FullEmbedding, EnsembleError> {
    sample_with_gauge(sub, dim, seed, var, Gauge::MeanZero)
}

/// Runs `samples` phantom draws and reports paired statistics for the direct
/// gyration and the closed-form reordering average. See
/// [`estimate_expectation_with`] for a per-sample hook.
pub fn estimate_expectation(
    sub: &SubdivisionGraph,
    dim: usize,
    samples: u64,
    seed: u64,
    var: f64,
) -> Result<EnsembleStats, EnsembleError> {
    estimate_expectation_with(sub, dim, samples, seed, var, |_, _, _| {})
}

/// Same as [`estimate_expectation`], invoking `visit(index, direct, closed)`
/// for every sample in index order.
pub fn estimate_expectation_with(
    sub: &SubdivisionGraph,
    dim: usize,
    samples: u64,
    seed: u64,
    var: f64,
    mut visit: impl FnMut(u64, f64, f64),
) -> Result<EnsembleStats, EnsembleError> {
    check_domain(dim, var)?;
    if samples < MIN_SAMPLES {
        return Err(EnsembleError::TooFewSamples {
            got: samples,
            min: MIN_SAMPLES,
        });
    }

    let e = sub.edge_count();
    let factored = if e > 0 {
        let d = incidence(sub);
        let svd = d.svd(true, true);
        let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let eps = if sigma_max > 0.0 {
            1e-12 * sigma_max
        } else {
            1e-12
        };
        Some((svd, eps))
    } else {
        None
    };

    let mut direct = RunningStats::new();
    let mut closed = RunningStats::new();
    let mut diff = RunningStats::new();
    for index in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let targets = draw_targets(&mut rng, e * dim, var);
        let positions = match &factored {
            Some((svd, eps)) => {
                let rhs = DMatrix::from_fn(e, dim, |r, c| targets[r * dim + c]);
                let x = svd
                    .solve(&rhs, *eps)
                    .map_err(|message| EnsembleError::Solve(message.to_string()))?;
                let v = sub.vertex_count();
                let mut flat = vec![0.0; v * dim];
                for p in 0..v {
                    for c in 0..dim {
                        flat[p * dim + c] = x[(p, c)];
                    }
                }
                flat
            }
            None => vec![0.0; sub.vertex_count() * dim],
        };
        let x = FullEmbedding::from_positions(sub.clone(), dim, positions)?;
        let direct_value = x.rg2();
        let closed_value =
            symmetrized_rg_closed(&x.structure_embedding(), &x.displacements())?.value;
        direct.push(direct_value);
        closed.push(closed_value);
        diff.push(direct_value - closed_value);
        visit(index, direct_value, closed_value);
    }

    Ok(EnsembleStats {
        samples,
        seed,
        mean_direct: direct.mean(),
        mean_closed: closed.mean(),
        stderr_direct: direct.standard_error(),
        stderr_diff: diff.standard_error(),
    })
}
