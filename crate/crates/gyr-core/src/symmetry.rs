//! Averages of the squared radius of gyration over the reordering group.
//!
//! Reordering the displacement vectors within each subdivided edge changes
//! the interior vertex positions but not the junctions. Averaging Rg² over
//! all `(n!)^{e'}` reorderings has a closed form: a reweighted junction
//! gyration (vertex weight `deg + 2/(n−1)`) plus one term proportional to
//! `‖W‖²` (all displacement vectors) minus one proportional to `‖W′‖²` (the
//! per-edge sums). This module provides that closed form, an exhaustive
//! enumeration average, and a seeded Monte Carlo estimate of the same
//! quantity, together with the per-group building blocks: the average
//! interior gyration over one group's orderings, the gyration of the cloud
//! of interior centroids, the pooled interior cloud, the average squared
//! centroid separation of two groups, and a junction/interior decomposition
//! of a single embedding's gyration.

use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cloud::{self, squared_distance, RgMethod};
use crate::embedding::{
    apply_permutation_unchecked, enumerate_group, random_group_element, EmbeddingError,
    FullEmbedding, GroupedDisplacements, Permutation, StructureEmbedding, DEFAULT_ENUMERATION_CAP,
};
use crate::stats::{KahanSum, RunningStats};

#[derive(Debug, Error, PartialEq)]
pub enum SymmetryError {
    #[error("dimension must be at least 1")]
    ZeroDim,
    #[error("group length {len} is not a multiple of dimension {dim}")]
    GroupShape { len: usize, dim: usize },
    #[error("group must hold at least two vectors, got {0}")]
    GroupTooSmall(usize),
    #[error("groups have different sizes: {0} vs {1}")]
    GroupSizeMismatch(usize, usize),
    #[error("midpoint has {got} coordinates, expected {dim}")]
    MidpointShape { got: usize, dim: usize },
    #[error("vertex {0} is isolated; the reweighted gyration needs every vertex on an edge")]
    IsolatedVertex(usize),
    #[error("monte carlo needs at least two samples, got {0}")]
    TooFewSamples(u64),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

/// How a symmetrized gyration value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetrizationMethod {
    Closed,
    Exact,
    MonteCarlo,
}

/// The three summands of the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetrizedTerms {
    /// Junction gyration with vertex weights `deg + 2/(n−1)`.
    pub reweighted_rg2: f64,
    /// `(n+1)(2v−n)/(12v²) · ‖W‖²`.
    pub displacement_term: f64,
    /// `−(n+1)(2v−1)/(12v²) · ‖W′‖²` (carries its sign).
    pub group_sum_term: f64,
}

impl SymmetrizedTerms {
    pub fn sum(&self) -> f64 {
        self.reweighted_rg2 + self.displacement_term + self.group_sum_term
    }
}

/// Result of a symmetrized-gyration computation. The closed-form summands are
/// reported for every method; `stderr` and `samples` are present for Monte
/// Carlo only.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrizationReport {
    pub method: SymmetrizationMethod,
    pub value: f64,
    pub stderr: Option<f64>,
    pub samples: Option<u64>,
    pub terms: SymmetrizedTerms,
}

/// Junction/interior split of one embedding's gyration: the within-group and
/// junction-cloud contributions plus the spread of the group centroids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionReport {
    /// `(n−1)/v · Σᵢ Rg²(interior cloud i)`.
    pub interior_term: f64,
    /// `v'/v · Rg²(junction cloud)`.
    pub junction_term: f64,
    /// `(n−1)²/(2v²) · Σᵢ Σⱼ ‖μᵢ − μⱼ‖²` over interior centroids.
    pub center_spread_term: f64,
    /// `(n−1)v'/v² · Σᵢ ‖μᵢ − μ'‖²` against the junction centroid.
    pub center_junction_term: f64,
    /// Gyration of the full vertex cloud, computed directly.
    pub total: f64,
}

impl DecompositionReport {
    /// Sum of the four terms; agrees with `total` up to rounding.
    pub fn reconstructed(&self) -> f64 {
        let mut sum = KahanSum::new();
        sum.add(self.interior_term);
        sum.add(self.junction_term);
        sum.add(self.center_spread_term);
        sum.add(self.center_junction_term);
        sum.value()
    }
}

/// Splits an embedding's gyration into junction and per-edge interior
/// contributions. The identity `total = interior + junction + center terms`
/// holds exactly in exact arithmetic; `total` is evaluated independently so
/// tests can compare the two routes.
pub fn decompose_rg(x: &FullEmbedding) -> DecompositionReport {
    let sub = x.subdivision();
    let dim = x.dim();
    let n = sub.subdivisions() as f64;
    let v = sub.vertex_count() as f64;
    let v_prime = sub.structure().vertex_count();
    let groups = sub.structure().edge_count();

    let junctions = &x.positions()[..v_prime * dim];
    let junction_term = (v_prime as f64 / v) * cloud::unit_rg2(dim, junctions);

    let mut interior_sum = KahanSum::new();
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(groups);
    for i in 1..=groups {
        let interior = x.interior_positions(i);
        interior_sum.add(cloud::unit_rg2(dim, interior));
        centers.push(cloud::unit_mean(dim, interior));
    }
    let interior_term = (n - 1.0) / v * interior_sum.value();

    let mut pair_sum = KahanSum::new();
    for (a, center_a) in centers.iter().enumerate() {
        for (b, center_b) in centers.iter().enumerate() {
            if a != b {
                pair_sum.add(squared_distance(center_a, center_b));
            }
        }
    }
    let center_spread_term = (n - 1.0) * (n - 1.0) / (2.0 * v * v) * pair_sum.value();

    let junction_center = cloud::unit_mean(dim, junctions);
    let mut junction_gap_sum = KahanSum::new();
    for center in &centers {
        junction_gap_sum.add(squared_distance(center, &junction_center));
    }
    let center_junction_term = (n - 1.0) * v_prime as f64 / (v * v) * junction_gap_sum.value();

    DecompositionReport {
        interior_term,
        junction_term,
        center_spread_term,
        center_junction_term,
        total: x.rg2(),
    }
}

fn group_shape(dim: usize, group: &[f64]) -> Result<usize, SymmetryError> {
    if dim == 0 {
        return Err(SymmetryError::ZeroDim);
    }
    if !group.len().is_multiple_of(dim) {
        return Err(SymmetryError::GroupShape {
            len: group.len(),
            dim,
        });
    }
    let n = group.len() / dim;
    if n < 2 {
        return Err(SymmetryError::GroupTooSmall(n));
    }
    Ok(n)
}

fn group_sum_norm_sq(dim: usize, group: &[f64]) -> f64 {
    let n = group.len() / dim;
    let mut sum = vec![0.0; dim];
    for j in 0..n {
        for c in 0..dim {
            sum[c] += group[j * dim + c];
        }
    }
    sum.iter().map(|&x| x * x).sum()
}

/// Average interior gyration of one group over all `n!` orderings of its
/// vectors: `n(n+1)(n−2)/(12(n−1)²) · Rg²(W) + (n−2)/(12n) · ‖Σⱼ wⱼ‖²`.
/// `group` is `n` vectors of dimension `dim`, flat.
pub fn ordering_average_rg(dim: usize, group: &[f64]) -> Result<f64, SymmetryError> {
    let n = group_shape(dim, group)? as f64;
    let rg_w = cloud::unit_rg2(dim, group);
    let coeff_rg = n * (n + 1.0) * (n - 2.0) / (12.0 * (n - 1.0) * (n - 1.0));
    let coeff_sum = (n - 2.0) / (12.0 * n);
    Ok(coeff_rg * rg_w + coeff_sum * group_sum_norm_sq(dim, group))
}

/// Gyration of the cloud of interior centroids over all orderings of one
/// group: `n²(n+1)/(12(n−1)²) · Rg²(W)`. This is the variance of the interior
/// centroid under a uniform random ordering.
pub fn center_cloud_rg(dim: usize, group: &[f64]) -> Result<f64, SymmetryError> {
    let n = group_shape(dim, group)? as f64;
    let rg_w = cloud::unit_rg2(dim, group);
    Ok(n * n * (n + 1.0) / (12.0 * (n - 1.0) * (n - 1.0)) * rg_w)
}

/// Gyration of the pooled interior cloud (all interior positions over all
/// orderings): `n(n+1)/(6(n−1)) · Rg²(W) + (n−2)/(12n) · ‖Σⱼ wⱼ‖²`. Equals
/// [`ordering_average_rg`] + [`center_cloud_rg`] (within/between split).
pub fn parent_cloud_rg(dim: usize, group: &[f64]) -> Result<f64, SymmetryError> {
    let n = group_shape(dim, group)? as f64;
    let rg_w = cloud::unit_rg2(dim, group);
    let coeff_rg = n * (n + 1.0) / (6.0 * (n - 1.0));
    let coeff_sum = (n - 2.0) / (12.0 * n);
    Ok(coeff_rg * rg_w + coeff_sum * group_sum_norm_sq(dim, group))
}

/// Average squared distance between the interior centroids of two distinct
/// groups under independent uniform orderings:
/// `‖mᵢ − mⱼ‖² + n²(n+1)/(12(n−1)²) · (Rg²(Wᵢ) + Rg²(Wⱼ))`,
/// where `mᵢ`, `mⱼ` are the groups' edge midpoints.
pub fn center_separation_average(
    dim: usize,
    group_i: &[f64],
    group_j: &[f64],
    midpoint_i: &[f64],
    midpoint_j: &[f64],
) -> Result<f64, SymmetryError> {
    let n_i = group_shape(dim, group_i)?;
    let n_j = group_shape(dim, group_j)?;
    if n_i != n_j {
        return Err(SymmetryError::GroupSizeMismatch(n_i, n_j));
    }
    for m in [midpoint_i, midpoint_j] {
        if m.len() != dim {
            return Err(SymmetryError::MidpointShape { got: m.len(), dim });
        }
    }
    let n = n_i as f64;
    let coeff = n * n * (n + 1.0) / (12.0 * (n - 1.0) * (n - 1.0));
    Ok(squared_distance(midpoint_i, midpoint_j)
        + coeff * (cloud::unit_rg2(dim, group_i) + cloud::unit_rg2(dim, group_j)))
}

/// Writes the `n − 1` interior points `tail + Σ_{k ≤ j} w_{σ(k)}` (ascending
/// `k`) for one group under one ordering into `out`.
fn interior_points_for(
    dim: usize,
    tail: &[f64],
    group: &[f64],
    sigma: &Permutation,
    out: &mut Vec<f64>,
) {
    out.clear();
    let n = sigma.len();
    let mut acc = tail.to_vec();
    for k in 1..n {
        let j = sigma.apply(k) - 1;
        for c in 0..dim {
            acc[c] += group[j * dim + c];
        }
        out.extend_from_slice(&acc);
    }
}

/// Enumerates every ordering of every group and measures how far the average
/// interior centroid (both the mean of per-ordering centroids and the pooled
/// mean) drifts from the edge midpoint `½(x'_head + x'_tail)`; both means
/// equal the midpoint exactly in exact arithmetic. Returns the largest gap.
pub fn cloud_center_consistency(
    x_prime: &StructureEmbedding,
    w: &GroupedDisplacements,
) -> Result<f64, SymmetryError> {
    w.check_consistency(x_prime)?;
    let dim = x_prime.dim();
    let n = w.group_size();
    let cardinality = crate::embedding::group_cardinality(n, 1);
    if cardinality > DEFAULT_ENUMERATION_CAP {
        return Err(SymmetryError::Embedding(EmbeddingError::CapExceeded {
            cardinality,
            cap: DEFAULT_ENUMERATION_CAP,
        }));
    }

    let mut worst = 0.0f64;
    let mut points = Vec::with_capacity((n - 1) * dim);
    for i in 1..=w.group_count() {
        let tail = x_prime.position(x_prime.graph().tail(i));
        let midpoint = x_prime.edge_midpoint(i);
        let group = w.group(i);

        let mut centroid_mean = vec![KahanSum::new(); dim];
        let mut pooled = vec![KahanSum::new(); dim];
        let mut orderings = 0u64;
        let mut sigma = Permutation::identity(n);
        loop {
            interior_points_for(dim, tail, group, &sigma, &mut points);
            let centroid = cloud::unit_mean(dim, &points);
            for c in 0..dim {
                centroid_mean[c].add(centroid[c]);
                for p in 0..n - 1 {
                    pooled[c].add(points[p * dim + c]);
                }
            }
            orderings += 1;
            if !sigma.advance_lex() {
                break;
            }
        }

        let count = orderings as f64;
        let mut centroid_gap = 0.0;
        let mut pooled_gap = 0.0;
        for c in 0..dim {
            let mean_c = centroid_mean[c].value() / count;
            let pooled_c = pooled[c].value() / (count * (n - 1) as f64);
            centroid_gap += (mean_c - midpoint[c]) * (mean_c - midpoint[c]);
            pooled_gap += (pooled_c - midpoint[c]) * (pooled_c - midpoint[c]);
        }
        worst = worst.max(centroid_gap.sqrt()).max(pooled_gap.sqrt());
    }
    Ok(worst)
}

fn closed_terms(
    x_prime: &StructureEmbedding,
    w: &GroupedDisplacements,
    reject_isolated: bool,
) -> Result<SymmetrizedTerms, SymmetryError> {
    w.check_consistency(x_prime)?;
    let degrees = x_prime.graph().degrees();
    if reject_isolated {
        if let Some(v) = degrees.iter().position(|&d| d == 0) {
            return Err(SymmetryError::IsolatedVertex(v + 1));
        }
    }
    let n = w.group_size() as f64;
    let v = w.subdivision().vertex_count() as f64;

    let weights: Vec<f64> = degrees
        .iter()
        .map(|&d| d as f64 + 2.0 / (n - 1.0))
        .collect();
    let reweighted_rg2 = cloud::rg2_by_method(
        x_prime.dim(),
        x_prime.positions(),
        &weights,
        RgMethod::SecondMoment,
    );

    let mut structure_norm = KahanSum::new();
    for i in 1..=w.group_count() {
        structure_norm.add(x_prime.displacement(i).iter().map(|&x| x * x).sum::<f64>());
    }

    let scale = (n + 1.0) / (12.0 * v * v);
    Ok(SymmetrizedTerms {
        reweighted_rg2,
        displacement_term: scale * (2.0 * v - n) * w.norm_sq(),
        group_sum_term: -scale * (2.0 * v - 1.0) * structure_norm.value(),
    })
}

/// Closed form of the gyration averaged over all displacement reorderings:
/// reweighted junction gyration plus the `‖W‖²` term minus the `‖W′‖²` term.
/// Rejects inconsistent inputs and graphs with isolated vertices (a vertex
/// off every edge has no degree weight to carry).
pub fn symmetrized_rg_closed(
    x_prime: &StructureEmbedding,
    w: &GroupedDisplacements,
) -> Result<SymmetrizationReport, SymmetryError> {
    let terms = closed_terms(x_prime, w, true)?;
    Ok(SymmetrizationReport {
        method: SymmetrizationMethod::Closed,
        value: terms.sum(),
        stderr: None,
        samples: None,
        terms,
    })
}

/// The same average by full enumeration of `(n!)^{e'}` reorderings, each
/// rebuilt and measured; accumulation is compensated and in enumeration
/// order. Fails when the cardinality exceeds `cap` (the error carries it).
pub fn symmetrized_rg_exact(
    x_prime: &StructureEmbedding,
    w: &GroupedDisplacements,
    cap: u128,
) -> Result<SymmetrizationReport, SymmetryError> {
    let terms = closed_terms(x_prime, w, false)?;
    let mut sum = KahanSum::new();
    let count = enumerate_group(w.subdivision(), cap, |sigma| {
        sum.add(apply_permutation_unchecked(x_prime, w, sigma).rg2());
    })?;
    Ok(SymmetrizationReport {
        method: SymmetrizationMethod::Exact,
        value: sum.value() / count as f64,
        stderr: None,
        samples: None,
        terms,
    })
}

/// The same average by uniform sampling of reorderings. Each sample draws
/// from its own RNG stream derived from `(seed, sample index)`, so the result
/// is reproducible and independent of execution order; values accumulate in
/// sample-index order. Requires at least two samples for a standard error.
pub fn symmetrized_rg_monte_carlo(
    x_prime: &StructureEmbedding,
    w: &GroupedDisplacements,
    samples: u64,
    seed: u64,
) -> Result<SymmetrizationReport, SymmetryError> {
    if samples < 2 {
        return Err(SymmetryError::TooFewSamples(samples));
    }
    let terms = closed_terms(x_prime, w, false)?;
    let mut stats = RunningStats::new();
    for index in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let sigma = random_group_element(w.subdivision(), &mut rng);
        stats.push(apply_permutation_unchecked(x_prime, w, &sigma).rg2());
    }
    Ok(SymmetrizationReport {
        method: SymmetrizationMethod::MonteCarlo,
        value: stats.mean(),
        stderr: Some(stats.standard_error()),
        samples: Some(samples),
        terms,
    })
}

/// Closed forms of the two index sums that appear when averaging interior
/// gyrations: `s1 = Σ_{1≤j,k≤n−1} |j−k| / n = (n−1)(n−2)/3` and
/// `s2 = Σ_{1≤j,k≤n−1} (|j−k|−1)|j−k| / ((n−1)n) = (n−2)(n−3)/6`.
///
/// The quadratic forms hold for `n ≥ 2`; at `n = 1` both sums are empty and
/// this returns `(0, 0)` (the `s2` quadratic would give 1/3 there, which is
/// why it is not evaluated).
pub fn hockey_stick_sums(n: u64) -> (Rational64, Rational64) {
    assert!(n >= 1, "sums are defined for n >= 1");
    if n == 1 {
        return (Rational64::from_integer(0), Rational64::from_integer(0));
    }
    let n = n as i64;
    (
        Rational64::new((n - 1) * (n - 2), 3),
        Rational64::new((n - 2) * (n - 3), 6),
    )
}

/// The same sums by explicit double loop over `1 ≤ j, k ≤ n−1`, in exact
/// rational arithmetic. Matches [`hockey_stick_sums`] for every `n ≥ 1`.
pub fn hockey_stick_sums_by_loop(n: u64) -> (Rational64, Rational64) {
    assert!(n >= 1, "sums are defined for n >= 1");
    let n = n as i64;
    let mut s1 = Rational64::from_integer(0);
    let mut s2 = Rational64::from_integer(0);
    for j in 1..n {
        for k in 1..n {
            let gap = (j - k).abs();
            s1 += Rational64::new(gap, n);
            s2 += Rational64::new((gap - 1) * gap, (n - 1) * n);
        }
    }
    (s1, s2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{apply_permutation, GroupPermutation};
    use crate::zoo;

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        let scale = expected.abs().max(1.0);
        assert!(
            (actual - expected).abs() <= tol * scale,
            "expected {expected}, got {actual}"
        );
    }

    fn consistent_single_edge(
        x: [f64; 2],
        w: [f64; 2],
    ) -> (StructureEmbedding, GroupedDisplacements) {
        let sub = zoo::single_edge().subdivide(2).unwrap();
        (
            StructureEmbedding::new(zoo::single_edge(), 1, x.to_vec()).unwrap(),
            GroupedDisplacements::new(sub, 1, w.to_vec()).unwrap(),
        )
    }

    #[test]
    fn ordering_average_fixtures() {
        assert_eq!(ordering_average_rg(1, &[1.0, 3.0]).unwrap(), 0.0);
        assert_close(
            ordering_average_rg(1, &[1.0, 1.0, 1.0]).unwrap(),
            0.25,
            1e-12,
        );
        assert_close(
            ordering_average_rg(1, &[0.0, 0.0, 3.0]).unwrap(),
            0.75,
            1e-12,
        );
    }

    #[test]
    fn center_cloud_fixtures() {
        assert_eq!(
            center_cloud_rg(2, &[0.5, -1.0, 0.5, -1.0, 0.5, -1.0]).unwrap(),
            0.0
        );
        assert_close(center_cloud_rg(1, &[1.0, 3.0]).unwrap(), 1.0, 1e-12);
        assert_close(center_cloud_rg(1, &[0.0, 0.0, 3.0]).unwrap(), 1.5, 1e-12);
    }

    #[test]
    fn parent_cloud_fixtures() {
        assert_close(parent_cloud_rg(1, &[1.0, 3.0]).unwrap(), 1.0, 1e-12);
        assert_close(parent_cloud_rg(1, &[0.0, 0.0, 3.0]).unwrap(), 2.25, 1e-12);
        assert_eq!(parent_cloud_rg(3, &[0.0; 9]).unwrap(), 0.0);
    }

    #[test]
    fn pooled_cloud_splits_into_within_and_between() {
        let groups: [&[f64]; 4] = [
            &[1.0, 3.0, -0.5, 2.0],
            &[0.25, 0.5, 0.75, 1.0, -2.0, 0.0],
            &[1.0, 0.0, 0.0, 1.0, 2.0, -1.0, 0.5, 0.5],
            &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
        ];
        let dims = [1usize, 1, 2, 3];
        for (group, dim) in groups.into_iter().zip(dims) {
            let within = ordering_average_rg(dim, group).unwrap();
            let between = center_cloud_rg(dim, group).unwrap();
            let pooled = parent_cloud_rg(dim, group).unwrap();
            assert_close(within + between, pooled, 1e-12);
        }
    }

    #[test]
    fn separation_average_fixtures() {
        // Internally constant groups: centroids are pinned at the midpoints.
        assert_close(
            center_separation_average(1, &[2.0, 2.0, 2.0], &[-1.0, -1.0, -1.0], &[0.0], &[3.0])
                .unwrap(),
            9.0,
            1e-12,
        );
        assert_close(
            center_separation_average(1, &[1.0, 3.0], &[2.0, 2.0], &[5.0], &[5.0]).unwrap(),
            1.0,
            1e-12,
        );
        assert_close(
            center_separation_average(1, &[0.0, 0.0, 3.0], &[0.0, 0.0, 3.0], &[0.0], &[2.0])
                .unwrap(),
            7.0,
            1e-12,
        );
    }

    #[test]
    fn group_validation_errors() {
        assert_eq!(
            ordering_average_rg(1, &[1.0]).unwrap_err(),
            SymmetryError::GroupTooSmall(1)
        );
        assert_eq!(
            ordering_average_rg(2, &[1.0, 2.0, 3.0]).unwrap_err(),
            SymmetryError::GroupShape { len: 3, dim: 2 }
        );
        assert_eq!(
            ordering_average_rg(0, &[]).unwrap_err(),
            SymmetryError::ZeroDim
        );
        assert_eq!(
            center_separation_average(1, &[1.0, 2.0], &[1.0, 2.0, 3.0], &[0.0], &[0.0])
                .unwrap_err(),
            SymmetryError::GroupSizeMismatch(2, 3)
        );
        assert_eq!(
            center_separation_average(2, &[1.0; 4], &[1.0; 4], &[0.0], &[0.0, 0.0]).unwrap_err(),
            SymmetryError::MidpointShape { got: 1, dim: 2 }
        );
    }

    #[test]
    fn centroid_means_sit_at_edge_midpoints() {
        let (x_prime, w) = consistent_single_edge([0.0, 4.0], [1.0, 3.0]);
        let gap = cloud_center_consistency(&x_prime, &w).unwrap();
        assert!(gap <= 1e-12 * 4.0);

        // Loop edge: the midpoint is the vertex itself.
        let sub = zoo::loop_graph().subdivide(3).unwrap();
        let x_prime = StructureEmbedding::new(zoo::loop_graph(), 1, vec![2.5]).unwrap();
        let w = GroupedDisplacements::new(sub, 1, vec![1.0, -3.0, 2.0]).unwrap();
        let gap = cloud_center_consistency(&x_prime, &w).unwrap();
        assert!(gap <= 1e-12 * 3.0);
    }

    #[test]
    fn worked_single_edge_values() {
        let (x_prime, w) = consistent_single_edge([0.0, 2.0], [1.0, 1.0]);
        let closed = symmetrized_rg_closed(&x_prime, &w).unwrap();
        assert_close(closed.value, 2.0 / 3.0, 1e-12);
        assert_close(closed.terms.sum(), closed.value, 1e-12);
        let exact = symmetrized_rg_exact(&x_prime, &w, 100).unwrap();
        assert_close(exact.value, 2.0 / 3.0, 1e-12);
        // Equal vectors: every ordering rebuilds the same cloud bit for bit,
        // so the estimate is exact and its spread is zero.
        let mc = symmetrized_rg_monte_carlo(&x_prime, &w, 64, 9).unwrap();
        assert_close(mc.value, 2.0 / 3.0, 1e-12);
        assert_eq!(mc.stderr, Some(0.0));
        assert_eq!(mc.samples, Some(64));

        let (x_prime, w) = consistent_single_edge([0.0, 4.0], [1.0, 3.0]);
        let closed = symmetrized_rg_closed(&x_prime, &w).unwrap();
        assert_close(closed.value, 26.0 / 9.0, 1e-12);
        let exact = symmetrized_rg_exact(&x_prime, &w, 100).unwrap();
        assert_close(exact.value, 26.0 / 9.0, 1e-12);
        let mc = symmetrized_rg_monte_carlo(&x_prime, &w, 64, 9).unwrap();
        assert_close(mc.value, 26.0 / 9.0, 1e-11);
    }

    #[test]
    fn zero_scene_symmetrizes_to_zero() {
        let sub = zoo::double_edge().subdivide(3).unwrap();
        let x_prime = StructureEmbedding::new(zoo::double_edge(), 2, vec![0.0; 4]).unwrap();
        let w = GroupedDisplacements::new(sub, 2, vec![0.0; 12]).unwrap();
        assert_eq!(symmetrized_rg_closed(&x_prime, &w).unwrap().value, 0.0);
        assert_eq!(symmetrized_rg_exact(&x_prime, &w, 1000).unwrap().value, 0.0);
        assert_eq!(
            symmetrized_rg_monte_carlo(&x_prime, &w, 10, 1)
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn closed_matches_exact_on_a_triangle() {
        let sub = zoo::triangle().subdivide(2).unwrap();
        let x_prime =
            StructureEmbedding::new(zoo::triangle(), 2, vec![0.0, 0.0, 1.0, 0.25, -0.5, 1.0])
                .unwrap();
        let mut vectors = vec![0.0; 12];
        for i in 1..=3usize {
            let target = x_prime.displacement(i);
            for c in 0..2 {
                vectors[((i - 1) * 2) * 2 + c] = 0.3 * i as f64 - 0.2 * c as f64;
                vectors[((i - 1) * 2 + 1) * 2 + c] = target[c] - vectors[((i - 1) * 2) * 2 + c];
            }
        }
        let w = GroupedDisplacements::new(sub, 2, vectors).unwrap();
        let closed = symmetrized_rg_closed(&x_prime, &w).unwrap().value;
        let exact = symmetrized_rg_exact(&x_prime, &w, 1000).unwrap().value;
        assert_close(exact, closed, 1e-11);
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let (x_prime, w) = consistent_single_edge([0.0, 4.0], [1.5, 2.5]);
        let a = symmetrized_rg_monte_carlo(&x_prime, &w, 500, 21).unwrap();
        let b = symmetrized_rg_monte_carlo(&x_prime, &w, 500, 21).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.stderr.unwrap().to_bits(), b.stderr.unwrap().to_bits());
        assert_eq!(
            symmetrized_rg_monte_carlo(&x_prime, &w, 1, 21).unwrap_err(),
            SymmetryError::TooFewSamples(1)
        );
    }

    #[test]
    fn closed_form_rejects_isolated_vertices() {
        let g = crate::graph::DirectedMultigraph::new(3, vec![(1, 2)]).unwrap();
        let sub = g.subdivide(2).unwrap();
        let x_prime = StructureEmbedding::new(g, 1, vec![0.0, 2.0, 5.0]).unwrap();
        let w = GroupedDisplacements::new(sub, 1, vec![1.0, 1.0]).unwrap();
        assert_eq!(
            symmetrized_rg_closed(&x_prime, &w).unwrap_err(),
            SymmetryError::IsolatedVertex(3)
        );
        // Enumeration has no degree weights and still works.
        assert!(symmetrized_rg_exact(&x_prime, &w, 100).is_ok());
    }

    #[test]
    fn rigid_motions_leave_the_closed_form_alone() {
        let sub = zoo::theta().subdivide(3).unwrap();
        let x_prime = StructureEmbedding::new(zoo::theta(), 2, vec![0.2, -0.4, 1.3, 0.9]).unwrap();
        let mut vectors: Vec<f64> = (0..18).map(|k| (k as f64 * 0.71).cos() * 0.5).collect();
        for i in 1..=3usize {
            let target = x_prime.displacement(i);
            for c in 0..2 {
                let partial: f64 = (0..2).map(|j| vectors[((i - 1) * 3 + j) * 2 + c]).sum();
                vectors[((i - 1) * 3 + 2) * 2 + c] = target[c] - partial;
            }
        }
        let w = GroupedDisplacements::new(sub.clone(), 2, vectors.clone()).unwrap();
        let reference = symmetrized_rg_closed(&x_prime, &w).unwrap().value;

        let (sin, cos) = 0.83f64.sin_cos();
        let rotate = |p: &[f64], shift: bool| -> Vec<f64> {
            p.chunks(2)
                .flat_map(|xy| {
                    let x = cos * xy[0] - sin * xy[1] + if shift { 3.7 } else { 0.0 };
                    let y = sin * xy[0] + cos * xy[1] + if shift { -1.2 } else { 0.0 };
                    [x, y]
                })
                .collect()
        };
        let moved_x =
            StructureEmbedding::new(zoo::theta(), 2, rotate(x_prime.positions(), true)).unwrap();
        let moved_w = GroupedDisplacements::new(sub, 2, rotate(&vectors, false)).unwrap();
        let moved = symmetrized_rg_closed(&moved_x, &moved_w).unwrap().value;
        assert_close(moved, reference, 1e-11);
    }

    #[test]
    fn single_edge_closed_form_collapses_to_norm_combination() {
        let n = 3;
        let sub = zoo::single_edge().subdivide(n).unwrap();
        let x_prime =
            StructureEmbedding::new(zoo::single_edge(), 3, vec![0.0, 0.0, 0.0, 1.0, -2.0, 0.5])
                .unwrap();
        let mut vectors = vec![0.4, 0.1, -0.3, -0.2, 0.6, 0.9, 0.0, 0.0, 0.0];
        for c in 0..3 {
            let partial: f64 = (0..2).map(|j| vectors[j * 3 + c]).sum();
            vectors[2 * 3 + c] = x_prime.displacement(1)[c] - partial;
        }
        let w = GroupedDisplacements::new(sub, 3, vectors).unwrap();
        let closed = symmetrized_rg_closed(&x_prime, &w).unwrap().value;
        let w_norm = w.norm_sq();
        let w_prime_norm: f64 = x_prime.displacement(1).iter().map(|&x| x * x).sum();
        let nf = n as f64;
        let reduced = (nf + 2.0) / (12.0 * (nf + 1.0)) * (w_norm + w_prime_norm);
        assert_close(closed, reduced, 1e-12);
    }

    #[test]
    fn decomposition_fixtures() {
        let sub = zoo::single_edge().subdivide(2).unwrap();
        let coincident =
            FullEmbedding::from_positions(sub.clone(), 2, vec![1.0, -2.0, 1.0, -2.0, 1.0, -2.0])
                .unwrap();
        let dec = decompose_rg(&coincident);
        assert_eq!(dec.total, 0.0);
        assert_eq!(dec.reconstructed(), 0.0);

        let x = FullEmbedding::from_positions(sub, 1, vec![0.0, 4.0, 1.0]).unwrap();
        let dec = decompose_rg(&x);
        assert_close(dec.total, 26.0 / 9.0, 1e-12);
        assert_close(dec.junction_term, 8.0 / 3.0, 1e-12);
        assert_eq!(dec.interior_term, 0.0);
        assert_eq!(dec.center_spread_term, 0.0);
        assert_close(dec.center_junction_term, 2.0 / 9.0, 1e-12);
        assert_close(dec.reconstructed(), dec.total, 1e-12);
    }

    #[test]
    fn decomposition_matches_direct_rg_on_reordered_embeddings() {
        let sub = zoo::figure_eight().subdivide(4).unwrap();
        let x_prime = StructureEmbedding::new(zoo::figure_eight(), 2, vec![0.6, -0.8]).unwrap();
        let mut vectors: Vec<f64> = (0..16).map(|k| ((k * 5 % 7) as f64 - 3.0) * 0.4).collect();
        for i in 1..=2usize {
            for c in 0..2 {
                let partial: f64 = (0..3).map(|j| vectors[((i - 1) * 4 + j) * 2 + c]).sum();
                vectors[((i - 1) * 4 + 3) * 2 + c] = -partial;
            }
        }
        let w = GroupedDisplacements::new(sub, 2, vectors).unwrap();
        let sigma = GroupPermutation::from_parts(vec![
            Permutation::from_one_line(vec![3, 1, 4, 2]).unwrap(),
            Permutation::from_one_line(vec![2, 4, 1, 3]).unwrap(),
        ])
        .unwrap();
        let x = apply_permutation(&x_prime, &w, &sigma).unwrap();
        let dec = decompose_rg(&x);
        assert_close(dec.reconstructed(), dec.total, 1e-11);
    }

    #[test]
    fn index_sum_fixtures() {
        assert_eq!(
            hockey_stick_sums(2),
            (Rational64::from_integer(0), Rational64::from_integer(0))
        );
        assert_eq!(
            hockey_stick_sums(3),
            (Rational64::new(2, 3), Rational64::from_integer(0))
        );
        assert_eq!(
            hockey_stick_sums(5),
            (Rational64::from_integer(4), Rational64::from_integer(1))
        );
        for n in 1..=64 {
            assert_eq!(
                hockey_stick_sums_by_loop(n),
                hockey_stick_sums(n),
                "n = {n}"
            );
        }
    }
}
