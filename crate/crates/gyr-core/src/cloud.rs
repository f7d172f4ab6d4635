//! Weighted point clouds in ℝᵈ: center of mass, the squared radius of
//! gyration through three equivalent formulas, a within/between splitting
//! identity over weight partitions, degree-weighted gyration for graph
//! embeddings, and the edge-midpoint cloud.
//!
//! Positions are stored flat and row-major: point `k` occupies
//! `positions[k*dim .. (k+1)*dim]`. Weights are strictly positive at the type
//! level; only the splitting operation accepts zero entries inside individual
//! parts, since parts are indicator-like restrictions of the full weights.

use thiserror::Error;

use crate::graph::DirectedMultigraph;
use crate::stats::KahanSum;

#[derive(Debug, Error, PartialEq)]
pub enum CloudError {
    #[error("cloud needs at least one point")]
    Empty,
    #[error("dimension must be at least 1")]
    ZeroDim,
    #[error("positions length {len} does not hold {points} points of dimension {dim}")]
    PositionShape {
        len: usize,
        points: usize,
        dim: usize,
    },
    #[error("weight {index} must be strictly positive, got {value}")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("need at least one weight part")]
    NoParts,
    #[error("part {part} has {len} weights, expected {expected}")]
    PartLength {
        part: usize,
        len: usize,
        expected: usize,
    },
    #[error("part {part} has a negative weight {value} at index {index}")]
    NegativePartWeight {
        part: usize,
        index: usize,
        value: f64,
    },
    #[error("part {part} has no positive weight")]
    EmptyPart { part: usize },
    #[error("parts do not sum to the cloud weights (residual {residual:e} at index {index})")]
    PartSumMismatch { index: usize, residual: f64 },
    #[error("positions cover {got} vertices but the graph has {expected}")]
    VertexCountMismatch { got: usize, expected: usize },
    #[error("vertex {vertex} is isolated; degree weighting needs every vertex on an edge")]
    IsolatedVertex { vertex: usize },
    #[error("midpoint cloud needs at least one edge")]
    NoEdges,
}

/// Which of the three equivalent gyration formulas to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RgMethod {
    /// Half the weighted mean squared pairwise distance, `O(N²)`; kept as the
    /// independent oracle for the other two.
    Pairwise,
    /// Weighted mean squared distance to the center of mass.
    AboutMean,
    /// Weighted second moment minus `‖μ‖²`, single pass.
    SecondMoment,
}

/// Points in ℝᵈ with strictly positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPointCloud {
    dim: usize,
    positions: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedPointCloud {
    pub fn new(dim: usize, positions: Vec<f64>, weights: Vec<f64>) -> Result<Self, CloudError> {
        if dim == 0 {
            return Err(CloudError::ZeroDim);
        }
        if weights.is_empty() {
            return Err(CloudError::Empty);
        }
        if positions.len() != weights.len() * dim {
            return Err(CloudError::PositionShape {
                len: positions.len(),
                points: weights.len(),
                dim,
            });
        }
        for (index, &value) in weights.iter().enumerate() {
            if value.is_nan() || value <= 0.0 {
                return Err(CloudError::NonPositiveWeight { index, value });
            }
        }
        Ok(Self {
            dim,
            positions,
            weights,
        })
    }

    /// Unit-weight cloud over `positions.len() / dim` points.
    pub fn uniform(dim: usize, positions: Vec<f64>) -> Result<Self, CloudError> {
        if dim == 0 {
            return Err(CloudError::ZeroDim);
        }
        if positions.is_empty() {
            return Err(CloudError::Empty);
        }
        if !positions.len().is_multiple_of(dim) {
            return Err(CloudError::PositionShape {
                len: positions.len(),
                points: positions.len() / dim,
                dim,
            });
        }
        let count = positions.len() / dim;
        Self::new(dim, positions, vec![1.0; count])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Coordinates of point `k` (0-based).
    pub fn point(&self, k: usize) -> &[f64] {
        &self.positions[k * self.dim..(k + 1) * self.dim]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        let mut sum = KahanSum::new();
        for &w in &self.weights {
            sum.add(w);
        }
        sum.value()
    }

    /// Weighted center of mass `μ = (1/|Ω|) Σ ωₖ xₖ`.
    pub fn center_of_mass(&self) -> Vec<f64> {
        weighted_mean(self.dim, &self.positions, &self.weights)
    }

    /// Squared radius of gyration with the default single-pass formula,
    /// guarded against cancellation (see [`RgMethod::SecondMoment`]).
    pub fn rg2(&self) -> f64 {
        self.rg2_with(RgMethod::SecondMoment)
    }

    /// Squared radius of gyration via an explicitly chosen formula. The
    /// second-moment form can lose all significance when the cloud is tiny
    /// relative to its distance from the origin; a negative result falls back
    /// to the about-mean form and is clamped to zero.
    pub fn rg2_with(&self, method: RgMethod) -> f64 {
        rg2_by_method(self.dim, &self.positions, &self.weights, method)
    }

    /// Splits the cloud's weights into parts and returns the within/between
    /// decomposition: the total gyration is the weight-fraction mix of the
    /// parts' gyrations plus the pairwise spread of the parts' centers.
    ///
    /// Parts must be elementwise nonnegative with positive totals and must
    /// sum to the cloud's weights (elementwise, relative 1e−12).
    pub fn split_rg(&self, parts: &[Vec<f64>]) -> Result<RgDecomposition, CloudError> {
        if parts.is_empty() {
            return Err(CloudError::NoParts);
        }
        for (p, part) in parts.iter().enumerate() {
            if part.len() != self.len() {
                return Err(CloudError::PartLength {
                    part: p + 1,
                    len: part.len(),
                    expected: self.len(),
                });
            }
            let mut total = 0.0;
            for (index, &value) in part.iter().enumerate() {
                if value < 0.0 {
                    return Err(CloudError::NegativePartWeight {
                        part: p + 1,
                        index,
                        value,
                    });
                }
                total += value;
            }
            if total.is_nan() || total <= 0.0 {
                return Err(CloudError::EmptyPart { part: p + 1 });
            }
        }
        for index in 0..self.len() {
            let sum: f64 = parts.iter().map(|part| part[index]).sum();
            let residual = (sum - self.weights[index]).abs();
            if residual > PART_SUM_TOLERANCE * self.weights[index].abs().max(1.0) {
                return Err(CloudError::PartSumMismatch { index, residual });
            }
        }

        let grand_total = self.total_weight();
        let mut totals = Vec::with_capacity(parts.len());
        let mut means = Vec::with_capacity(parts.len());
        let mut within_terms = Vec::with_capacity(parts.len());
        for part in parts {
            let total: f64 = part.iter().sum();
            let mean = weighted_mean(self.dim, &self.positions, part);
            let rg2 = rg2_by_method(self.dim, &self.positions, part, RgMethod::SecondMoment);
            within_terms.push((total / grand_total, rg2));
            totals.push(total);
            means.push(mean);
        }

        let mut between = KahanSum::new();
        for (a, mean_a) in means.iter().enumerate() {
            for (b, mean_b) in means.iter().enumerate() {
                if a != b {
                    between.add(totals[a] * totals[b] * squared_distance(mean_a, mean_b));
                }
            }
        }
        let between_term = between.value() / (2.0 * grand_total * grand_total);

        Ok(RgDecomposition {
            within_terms,
            between_term,
            total: self.rg2(),
        })
    }
}

/// Elementwise tolerance for part sums, relative to `max(1, |weight|)`.
pub const PART_SUM_TOLERANCE: f64 = 1e-12;

/// Within/between decomposition of a cloud's squared radius of gyration.
#[derive(Debug, Clone, PartialEq)]
pub struct RgDecomposition {
    /// Per part: (weight fraction `|Ωᵢ|/|Ω|`, part gyration `Rg²(X, Ωᵢ)`).
    pub within_terms: Vec<(f64, f64)>,
    /// `(1/2|Ω|²) Σᵢ Σⱼ |Ωᵢ||Ωⱼ| ‖μᵢ − μⱼ‖²` over part centers.
    pub between_term: f64,
    /// The cloud's gyration, computed directly (not from the terms).
    pub total: f64,
}

impl RgDecomposition {
    /// `Σᵢ fractionᵢ · Rg²ᵢ + between`; agrees with `total` up to rounding.
    pub fn reconstructed(&self) -> f64 {
        let mut sum = KahanSum::new();
        for &(fraction, rg2) in &self.within_terms {
            sum.add(fraction * rg2);
        }
        sum.add(self.between_term);
        sum.value()
    }
}

/// Gyration of a structure embedding with each vertex weighted by its degree
/// (loops count twice). Total weight is `2 e'`; isolated vertices would get
/// weight zero and are rejected.
pub fn degree_weighted_rg(
    graph: &DirectedMultigraph,
    dim: usize,
    positions: &[f64],
) -> Result<f64, CloudError> {
    check_vertex_positions(graph, dim, positions)?;
    let degrees = graph.degrees();
    if let Some(v) = degrees.iter().position(|&d| d == 0) {
        return Err(CloudError::IsolatedVertex { vertex: v + 1 });
    }
    let weights: Vec<f64> = degrees.iter().map(|&d| d as f64).collect();
    Ok(rg2_by_method(
        dim,
        positions,
        &weights,
        RgMethod::SecondMoment,
    ))
}

/// Unit-weight cloud of edge midpoints `½(x'_head + x'_tail)`, one per edge.
///
/// Its gyration relates to the degree-weighted one by
/// `Rg²(midpoints) = Rg²(X', deg) − (1/4e') Σᵢ ‖w'ᵢ‖²`.
pub fn midpoint_cloud(
    graph: &DirectedMultigraph,
    dim: usize,
    positions: &[f64],
) -> Result<WeightedPointCloud, CloudError> {
    check_vertex_positions(graph, dim, positions)?;
    if graph.edge_count() == 0 {
        return Err(CloudError::NoEdges);
    }
    let mut midpoints = Vec::with_capacity(graph.edge_count() * dim);
    for &(tail, head) in graph.edges() {
        let t = &positions[(tail - 1) * dim..tail * dim];
        let h = &positions[(head - 1) * dim..head * dim];
        for c in 0..dim {
            midpoints.push(0.5 * (h[c] + t[c]));
        }
    }
    WeightedPointCloud::uniform(dim, midpoints)
}

/// Squared distance between two segment midpoints expressed through the six
/// pairwise endpoint distances (the quadrilateral bimedian identity):
/// `‖mᵢ − mⱼ‖² = ¼(‖hᵢ−hⱼ‖² + ‖tᵢ−tⱼ‖² + ‖hᵢ−tⱼ‖² + ‖tᵢ−hⱼ‖²)
///             − ¼(‖hᵢ−tᵢ‖² + ‖hⱼ−tⱼ‖²)`.
pub fn midpoint_distance_sq_via_endpoints(
    h_i: &[f64],
    t_i: &[f64],
    h_j: &[f64],
    t_j: &[f64],
) -> f64 {
    assert!(
        h_i.len() == t_i.len() && h_i.len() == h_j.len() && h_i.len() == t_j.len(),
        "endpoint dimensions differ"
    );
    0.25 * (squared_distance(h_i, h_j)
        + squared_distance(t_i, t_j)
        + squared_distance(h_i, t_j)
        + squared_distance(t_i, h_j))
        - 0.25 * (squared_distance(h_i, t_i) + squared_distance(h_j, t_j))
}

fn check_vertex_positions(
    graph: &DirectedMultigraph,
    dim: usize,
    positions: &[f64],
) -> Result<(), CloudError> {
    if dim == 0 {
        return Err(CloudError::ZeroDim);
    }
    if positions.len() != graph.vertex_count() * dim {
        return Err(CloudError::VertexCountMismatch {
            got: positions.len() / dim,
            expected: graph.vertex_count(),
        });
    }
    Ok(())
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// Weighted mean over a flat position buffer; tolerates zero weights as long
/// as the total is positive.
pub(crate) fn weighted_mean(dim: usize, positions: &[f64], weights: &[f64]) -> Vec<f64> {
    let mut acc = vec![KahanSum::new(); dim];
    let mut total = KahanSum::new();
    for (k, &w) in weights.iter().enumerate() {
        total.add(w);
        let point = &positions[k * dim..(k + 1) * dim];
        for (c, &x) in point.iter().enumerate() {
            acc[c].add(w * x);
        }
    }
    let total = total.value();
    acc.iter().map(|s| s.value() / total).collect()
}

pub(crate) fn rg2_by_method(
    dim: usize,
    positions: &[f64],
    weights: &[f64],
    method: RgMethod,
) -> f64 {
    match method {
        RgMethod::Pairwise => {
            let mut total = KahanSum::new();
            for &w in weights {
                total.add(w);
            }
            let total = total.value();
            let mut sum = KahanSum::new();
            for (a, &wa) in weights.iter().enumerate() {
                let pa = &positions[a * dim..(a + 1) * dim];
                for (b, &wb) in weights.iter().enumerate() {
                    if a != b {
                        let pb = &positions[b * dim..(b + 1) * dim];
                        sum.add(wa * wb * squared_distance(pa, pb));
                    }
                }
            }
            sum.value() / (2.0 * total * total)
        }
        RgMethod::AboutMean => rg2_about_mean(dim, positions, weights),
        RgMethod::SecondMoment => {
            let mean = weighted_mean(dim, positions, weights);
            let mut total = KahanSum::new();
            let mut moment = KahanSum::new();
            for (k, &w) in weights.iter().enumerate() {
                total.add(w);
                let point = &positions[k * dim..(k + 1) * dim];
                moment.add(w * point.iter().map(|&x| x * x).sum::<f64>());
            }
            let value = moment.value() / total.value() - mean.iter().map(|&m| m * m).sum::<f64>();
            if value < 0.0 {
                rg2_about_mean(dim, positions, weights).max(0.0)
            } else {
                value
            }
        }
    }
}

fn rg2_about_mean(dim: usize, positions: &[f64], weights: &[f64]) -> f64 {
    let mean = weighted_mean(dim, positions, weights);
    let mut total = KahanSum::new();
    let mut sum = KahanSum::new();
    for (k, &w) in weights.iter().enumerate() {
        total.add(w);
        let point = &positions[k * dim..(k + 1) * dim];
        sum.add(w * squared_distance(point, &mean));
    }
    sum.value() / total.value()
}

/// Mean of unit-weight points in a flat buffer.
pub(crate) fn unit_mean(dim: usize, positions: &[f64]) -> Vec<f64> {
    let count = positions.len() / dim;
    let mut acc = vec![KahanSum::new(); dim];
    for k in 0..count {
        for c in 0..dim {
            acc[c].add(positions[k * dim + c]);
        }
    }
    acc.iter().map(|s| s.value() / count as f64).collect()
}

/// Guarded default gyration of unit-weight points in a flat buffer.
pub(crate) fn unit_rg2(dim: usize, positions: &[f64]) -> f64 {
    let count = positions.len() / dim;
    let mean = unit_mean(dim, positions);
    let mut moment = KahanSum::new();
    for k in 0..count {
        let point = &positions[k * dim..(k + 1) * dim];
        moment.add(point.iter().map(|&x| x * x).sum::<f64>());
    }
    let value = moment.value() / count as f64 - mean.iter().map(|&m| m * m).sum::<f64>();
    if value < 0.0 {
        let mut sum = KahanSum::new();
        for k in 0..count {
            let point = &positions[k * dim..(k + 1) * dim];
            sum.add(squared_distance(point, &mean));
        }
        (sum.value() / count as f64).max(0.0)
    } else {
        value
    }
}
