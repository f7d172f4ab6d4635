//! Embeddings of a structure graph and of its subdivision, displacement
//! vectors grouped by subdivided edge, and the action of the product of
//! symmetric groups that reorders displacements within each group.
//!
//! A [`FullEmbedding`] carries both vertex positions and its per-edge
//! displacement table. Embeddings built from raw positions derive the table
//! by subtraction once; embeddings built by [`apply_permutation`] store the
//! reordered input vectors verbatim. That makes the round trip
//! `displacements(apply_permutation(x', w, id)) == w` exact at the bit level,
//! which position subtraction alone cannot guarantee, while positions and
//! table always agree to rounding.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::cloud::{self, CloudError, WeightedPointCloud};
use crate::graph::{DerivedVertex, DirectedMultigraph, SubdivisionGraph};
use crate::stats::KahanSum;

/// Relative tolerance for user-supplied displacement groups: each group must
/// sum to its edge's endpoint difference within this fraction of the group's
/// scale. Internally generated data is consistent to rounding.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-9;

/// Default ceiling on `(n!)^{ e'}` for full enumerations.
pub const DEFAULT_ENUMERATION_CAP: u128 = 2_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum EmbeddingError {
    #[error("dimension must be at least 1")]
    ZeroDim,
    #[error("positions length {len} does not hold {vertices} vertices of dimension {dim}")]
    PositionShape {
        len: usize,
        vertices: usize,
        dim: usize,
    },
    #[error(
        "vectors length {len} does not hold {groups} groups of {group_size} vectors of dimension {dim}"
    )]
    VectorShape {
        len: usize,
        groups: usize,
        group_size: usize,
        dim: usize,
    },
    #[error("{notation:?} is not a permutation of 1..={n} in one-line notation")]
    NotAPermutation { notation: Vec<usize>, n: usize },
    #[error("permutation parts have unequal sizes {sizes:?}")]
    UnequalParts { sizes: Vec<usize> },
    #[error("permutation has {got} parts of size {got_size}, expected {expected} of size {expected_size}")]
    PartShapeMismatch {
        got: usize,
        got_size: usize,
        expected: usize,
        expected_size: usize,
    },
    #[error("displacement groups belong to a different graph than the embedding")]
    GraphMismatch,
    #[error("embedding is {left}-dimensional but displacements are {right}-dimensional")]
    DimMismatch { left: usize, right: usize },
    #[error(
        "group {group}: displacement sum misses the edge displacement by {residual:e} (allowed {allowed:e})"
    )]
    Inconsistent {
        group: usize,
        residual: f64,
        allowed: f64,
    },
    #[error("enumeration cardinality {cardinality} exceeds the cap {cap}")]
    CapExceeded { cardinality: u128, cap: u128 },
}

/// Positions for the vertices of a structure graph.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureEmbedding {
    graph: DirectedMultigraph,
    dim: usize,
    positions: Vec<f64>,
}

impl StructureEmbedding {
    pub fn new(
        graph: DirectedMultigraph,
        dim: usize,
        positions: Vec<f64>,
    ) -> Result<Self, EmbeddingError> {
        if dim == 0 {
            return Err(EmbeddingError::ZeroDim);
        }
        if positions.len() != graph.vertex_count() * dim {
            return Err(EmbeddingError::PositionShape {
                len: positions.len(),
                vertices: graph.vertex_count(),
                dim,
            });
        }
        Ok(Self {
            graph,
            dim,
            positions,
        })
    }

    pub fn graph(&self) -> &DirectedMultigraph {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Coordinates of vertex `j` (1-based).
    pub fn position(&self, j: usize) -> &[f64] {
        &self.positions[(j - 1) * self.dim..j * self.dim]
    }

    /// Edge displacements `w'ᵢ = x'_head(i) − x'_tail(i)`, flat in edge order.
    pub fn displacements(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.graph.edge_count() * self.dim);
        for &(tail, head) in self.graph.edges() {
            let t = self.position(tail);
            let h = self.position(head);
            for c in 0..self.dim {
                out.push(h[c] - t[c]);
            }
        }
        out
    }

    /// Displacement of edge `i` (1-based).
    pub fn displacement(&self, i: usize) -> Vec<f64> {
        let t = self.position(self.graph.tail(i));
        let h = self.position(self.graph.head(i));
        h.iter().zip(t).map(|(&a, &b)| a - b).collect()
    }

    /// Midpoint `½(x'_head(i) + x'_tail(i))` of edge `i` (1-based).
    pub fn edge_midpoint(&self, i: usize) -> Vec<f64> {
        let t = self.position(self.graph.tail(i));
        let h = self.position(self.graph.head(i));
        h.iter().zip(t).map(|(&a, &b)| 0.5 * (a + b)).collect()
    }

    /// Gyration of the vertex cloud with degree weights.
    pub fn degree_weighted_rg2(&self) -> Result<f64, CloudError> {
        cloud::degree_weighted_rg(&self.graph, self.dim, &self.positions)
    }

    /// Unit-weight cloud of the edge midpoints.
    pub fn midpoint_cloud(&self) -> Result<WeightedPointCloud, CloudError> {
        cloud::midpoint_cloud(&self.graph, self.dim, &self.positions)
    }

    /// Gyration of the vertex cloud with unit weights.
    pub fn rg2(&self) -> f64 {
        cloud::unit_rg2(self.dim, &self.positions)
    }
}

/// Displacement vectors of a subdivision, grouped by structure edge:
/// group `i` holds the `n` vectors `w_{i,1} .. w_{i,n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedDisplacements {
    subdivision: SubdivisionGraph,
    dim: usize,
    vectors: Vec<f64>,
}

impl GroupedDisplacements {
    /// `vectors` is flat and group-major: vector `(i, j)` occupies the slice
    /// at `((i−1)·n + (j−1))·dim`.
    pub fn new(
        subdivision: SubdivisionGraph,
        dim: usize,
        vectors: Vec<f64>,
    ) -> Result<Self, EmbeddingError> {
        if dim == 0 {
            return Err(EmbeddingError::ZeroDim);
        }
        let groups = subdivision.structure().edge_count();
        let group_size = subdivision.subdivisions();
        if vectors.len() != groups * group_size * dim {
            return Err(EmbeddingError::VectorShape {
                len: vectors.len(),
                groups,
                group_size,
                dim,
            });
        }
        Ok(Self {
            subdivision,
            dim,
            vectors,
        })
    }

    pub fn subdivision(&self) -> &SubdivisionGraph {
        &self.subdivision
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn group_count(&self) -> usize {
        self.subdivision.structure().edge_count()
    }

    pub fn group_size(&self) -> usize {
        self.subdivision.subdivisions()
    }

    pub fn vectors(&self) -> &[f64] {
        &self.vectors
    }

    /// All `n` vectors of group `i` (1-based), flat.
    pub fn group(&self, i: usize) -> &[f64] {
        let stride = self.group_size() * self.dim;
        &self.vectors[(i - 1) * stride..i * stride]
    }

    /// Vector `w_{i,j}` (both indices 1-based).
    pub fn vector(&self, i: usize, j: usize) -> &[f64] {
        let offset = self.subdivision.edge_index(i, j) * self.dim;
        &self.vectors[offset..offset + self.dim]
    }

    /// `Σⱼ w_{i,j}`, summed in ascending `j`.
    pub fn group_sum(&self, i: usize) -> Vec<f64> {
        let mut acc = vec![0.0; self.dim];
        for j in 1..=self.group_size() {
            for (c, &x) in self.vector(i, j).iter().enumerate() {
                acc[c] += x;
            }
        }
        acc
    }

    /// `‖W‖² = Σᵢ Σⱼ ‖w_{i,j}‖²`.
    pub fn norm_sq(&self) -> f64 {
        let mut sum = KahanSum::new();
        for &x in &self.vectors {
            sum.add(x * x);
        }
        sum.value()
    }

    /// Verifies that every group sums to its edge's endpoint difference
    /// within [`CONSISTENCY_TOLERANCE`], relative to the group's scale.
    /// On failure reports the group with the worst relative residual.
    pub fn check_consistency(&self, x_prime: &StructureEmbedding) -> Result<(), EmbeddingError> {
        if self.subdivision.structure() != x_prime.graph() {
            return Err(EmbeddingError::GraphMismatch);
        }
        if self.dim != x_prime.dim() {
            return Err(EmbeddingError::DimMismatch {
                left: x_prime.dim(),
                right: self.dim,
            });
        }
        let mut worst: Option<(usize, f64, f64)> = None;
        for i in 1..=self.group_count() {
            let sum = self.group_sum(i);
            let target = x_prime.displacement(i);
            let residual = cloud::squared_distance(&sum, &target).sqrt();
            let mut magnitude = 0.0;
            for j in 1..=self.group_size() {
                magnitude += self.vector(i, j).iter().map(|&x| x * x).sum::<f64>().sqrt();
            }
            let scale = target
                .iter()
                .map(|&x| x * x)
                .sum::<f64>()
                .sqrt()
                .max(magnitude)
                .max(1.0);
            let ratio = residual / scale;
            if worst.is_none_or(|(_, _, w)| ratio > w) {
                worst = Some((i, residual, ratio));
            }
        }
        match worst {
            Some((group, residual, ratio)) if ratio > CONSISTENCY_TOLERANCE => {
                Err(EmbeddingError::Inconsistent {
                    group,
                    residual,
                    allowed: CONSISTENCY_TOLERANCE * (residual / ratio),
                })
            }
            _ => Ok(()),
        }
    }
}

/// Positions for every vertex of a subdivision, together with the
/// displacement table that generated (or is derived from) them.
#[derive(Debug, Clone, PartialEq)]
pub struct FullEmbedding {
    subdivision: SubdivisionGraph,
    dim: usize,
    positions: Vec<f64>,
    displacements: Vec<f64>,
}

impl FullEmbedding {
    /// Builds an embedding from flat positions (junctions first, then
    /// interior vertices in `(i, j)` order); the displacement table is
    /// derived by endpoint subtraction.
    pub fn from_positions(
        subdivision: SubdivisionGraph,
        dim: usize,
        positions: Vec<f64>,
    ) -> Result<Self, EmbeddingError> {
        if dim == 0 {
            return Err(EmbeddingError::ZeroDim);
        }
        if positions.len() != subdivision.vertex_count() * dim {
            return Err(EmbeddingError::PositionShape {
                len: positions.len(),
                vertices: subdivision.vertex_count(),
                dim,
            });
        }
        let mut displacements = Vec::with_capacity(subdivision.edge_count() * dim);
        for (i, j) in subdivision.edge_pairs() {
            let t = subdivision.vertex_index(subdivision.tail(i, j)) * dim;
            let h = subdivision.vertex_index(subdivision.head(i, j)) * dim;
            for c in 0..dim {
                displacements.push(positions[h + c] - positions[t + c]);
            }
        }
        Ok(Self {
            subdivision,
            dim,
            positions,
            displacements,
        })
    }

    pub fn subdivision(&self) -> &SubdivisionGraph {
        &self.subdivision
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Flat positions in the subdivision's vertex order.
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn position(&self, vertex: DerivedVertex) -> &[f64] {
        let offset = self.subdivision.vertex_index(vertex) * self.dim;
        &self.positions[offset..offset + self.dim]
    }

    /// The `n − 1` interior positions of group `i`, contiguous.
    pub fn interior_positions(&self, i: usize) -> &[f64] {
        let start = self.subdivision.vertex_index(DerivedVertex::Interior(i, 1)) * self.dim;
        let len = self.subdivision.interior_count() * self.dim;
        &self.positions[start..start + len]
    }

    /// The junction restriction; always bit-equal to the embedding the
    /// positions were built over.
    pub fn structure_embedding(&self) -> StructureEmbedding {
        let v_prime = self.subdivision.structure().vertex_count();
        StructureEmbedding {
            graph: self.subdivision.structure().clone(),
            dim: self.dim,
            positions: self.positions[..v_prime * self.dim].to_vec(),
        }
    }

    /// The per-edge displacement table, grouped by structure edge.
    pub fn displacements(&self) -> GroupedDisplacements {
        GroupedDisplacements {
            subdivision: self.subdivision.clone(),
            dim: self.dim,
            vectors: self.displacements.clone(),
        }
    }

    /// Gyration of the full vertex cloud with unit weights.
    pub fn rg2(&self) -> f64 {
        cloud::unit_rg2(self.dim, &self.positions)
    }
}

/// A permutation of `1..=n`, stored in one-line notation with its inverse
/// cached (the inverse sits in the inner loop of the placement indicator).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "permutation needs at least one element");
        let forward: Vec<usize> = (1..=n).collect();
        Self {
            inverse: forward.clone(),
            forward,
        }
    }

    /// Builds from one-line notation: `one_line[j-1] = σ(j)`, entries 1-based.
    pub fn from_one_line(one_line: Vec<usize>) -> Result<Self, EmbeddingError> {
        let n = one_line.len();
        let mut inverse = vec![0usize; n];
        for (j, &image) in one_line.iter().enumerate() {
            if n == 0 || image == 0 || image > n || inverse[image - 1] != 0 {
                return Err(EmbeddingError::NotAPermutation {
                    notation: one_line.clone(),
                    n,
                });
            }
            inverse[image - 1] = j + 1;
        }
        if n == 0 {
            return Err(EmbeddingError::NotAPermutation {
                notation: one_line,
                n,
            });
        }
        Ok(Self {
            forward: one_line,
            inverse,
        })
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `σ(j)`, 1-based. Panics if out of range.
    pub fn apply(&self, j: usize) -> usize {
        self.forward[j - 1]
    }

    /// `σ⁻¹(k)`, 1-based. Panics if out of range.
    pub fn inverse(&self, k: usize) -> usize {
        self.inverse[k - 1]
    }

    pub fn one_line(&self) -> &[usize] {
        &self.forward
    }

    /// `(self ∘ inner)(j) = self(inner(j))`.
    pub fn compose(&self, inner: &Permutation) -> Permutation {
        assert_eq!(self.len(), inner.len(), "permutation sizes differ");
        let forward: Vec<usize> = (1..=self.len())
            .map(|j| self.apply(inner.apply(j)))
            .collect();
        Permutation::from_one_line(forward).unwrap()
    }

    /// Steps to the lexicographic successor in one-line order; wraps back to
    /// the identity and returns false after the last (descending) word.
    pub(crate) fn advance_lex(&mut self) -> bool {
        let f = &mut self.forward;
        let n = f.len();
        let mut a = n.wrapping_sub(2);
        while a != usize::MAX && f[a] >= f[a + 1] {
            a = a.wrapping_sub(1);
        }
        let advanced = if a == usize::MAX {
            f.sort_unstable();
            false
        } else {
            let mut b = n - 1;
            while f[b] <= f[a] {
                b -= 1;
            }
            f.swap(a, b);
            f[a + 1..].reverse();
            true
        };
        for (j, &image) in self.forward.iter().enumerate() {
            self.inverse[image - 1] = j + 1;
        }
        advanced
    }
}

/// An element of the product group `(Sₙ)^{e'}`: one permutation per
/// displacement group, acting by `σ(i, j) = (i, σᵢ(j))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPermutation {
    parts: Vec<Permutation>,
}

impl GroupPermutation {
    pub fn identity(group_count: usize, group_size: usize) -> Self {
        Self {
            parts: (0..group_count)
                .map(|_| Permutation::identity(group_size))
                .collect(),
        }
    }

    /// Parts must all act on the same index range.
    pub fn from_parts(parts: Vec<Permutation>) -> Result<Self, EmbeddingError> {
        if let Some(first) = parts.first() {
            if parts.iter().any(|p| p.len() != first.len()) {
                return Err(EmbeddingError::UnequalParts {
                    sizes: parts.iter().map(Permutation::len).collect(),
                });
            }
        }
        Ok(Self { parts })
    }

    pub fn group_count(&self) -> usize {
        self.parts.len()
    }

    /// Size of each part; panics for the empty product.
    pub fn group_size(&self) -> usize {
        self.parts[0].len()
    }

    pub fn parts(&self) -> &[Permutation] {
        &self.parts
    }

    /// Part `σᵢ` (1-based).
    pub fn part(&self, i: usize) -> &Permutation {
        &self.parts[i - 1]
    }

    /// The action on a displacement index: `(i, j) ↦ (i, σᵢ(j))`.
    pub fn apply(&self, i: usize, j: usize) -> (usize, usize) {
        (i, self.part(i).apply(j))
    }
}

/// True when the vector originally indexed `k` in group `i` lands among the
/// first `j` summands after reordering by `sigma`, i.e. `σᵢ⁻¹(k) ≤ j`.
/// Panics on out-of-range indices.
pub fn lands_within(sigma: &GroupPermutation, i: usize, j: usize, k: usize) -> bool {
    let part = sigma.part(i);
    assert!(
        j >= 1 && j <= part.len(),
        "index {j} out of range 1..={}",
        part.len()
    );
    part.inverse(k) <= j
}

/// Rebuilds the full embedding whose displacement table is `w` reordered by
/// `sigma` within each group: junctions keep the structure positions, and
/// interior vertex `(i, j)` is `x'_tail(i) + Σ_{k ≤ j} w_{i, σᵢ(k)}` with the
/// sum taken in ascending `k`.
///
/// `w` must satisfy the group consistency invariant against `x_prime`.
pub fn apply_permutation(
    x_prime: &StructureEmbedding,
    w: &GroupedDisplacements,
    sigma: &GroupPermutation,
) -> Result<FullEmbedding, EmbeddingError> {
    w.check_consistency(x_prime)?;
    check_sigma_shape(w, sigma)?;
    Ok(apply_permutation_unchecked(x_prime, w, sigma))
}

pub(crate) fn check_sigma_shape(
    w: &GroupedDisplacements,
    sigma: &GroupPermutation,
) -> Result<(), EmbeddingError> {
    let got_size = if sigma.group_count() == 0 {
        w.group_size()
    } else {
        sigma.group_size()
    };
    if sigma.group_count() != w.group_count() || got_size != w.group_size() {
        return Err(EmbeddingError::PartShapeMismatch {
            got: sigma.group_count(),
            got_size,
            expected: w.group_count(),
            expected_size: w.group_size(),
        });
    }
    Ok(())
}

pub(crate) fn apply_permutation_unchecked(
    x_prime: &StructureEmbedding,
    w: &GroupedDisplacements,
    sigma: &GroupPermutation,
) -> FullEmbedding {
    let subdivision = w.subdivision().clone();
    let dim = x_prime.dim();
    let n = subdivision.subdivisions();
    let v_prime = x_prime.graph().vertex_count();

    let mut positions = vec![0.0; subdivision.vertex_count() * dim];
    positions[..v_prime * dim].copy_from_slice(x_prime.positions());

    let mut displacements = vec![0.0; subdivision.edge_count() * dim];
    for i in 1..=w.group_count() {
        for j in 1..=n {
            let source = w.vector(i, sigma.part(i).apply(j));
            let offset = subdivision.edge_index(i, j) * dim;
            displacements[offset..offset + dim].copy_from_slice(source);
        }
        let mut acc = x_prime.position(subdivision.structure().tail(i)).to_vec();
        for j in 1..n {
            let offset = subdivision.edge_index(i, j) * dim;
            for c in 0..dim {
                acc[c] += displacements[offset + c];
            }
            let target = subdivision.vertex_index(DerivedVertex::Interior(i, j)) * dim;
            positions[target..target + dim].copy_from_slice(&acc);
        }
    }

    FullEmbedding {
        subdivision,
        dim,
        positions,
        displacements,
    }
}

/// Saturating `(n!)^{e'}`.
pub fn group_cardinality(group_size: usize, group_count: usize) -> u128 {
    let mut factorial: u128 = 1;
    for k in 2..=group_size as u128 {
        factorial = factorial.saturating_mul(k);
    }
    let mut cardinality: u128 = 1;
    for _ in 0..group_count {
        cardinality = cardinality.saturating_mul(factorial);
    }
    cardinality
}

/// Visits every element of `(Sₙ)^{e'}` exactly once and returns the count.
///
/// Order is mixed-radix lexicographic: the last group's permutation varies
/// fastest, and each group steps through Sₙ in lexicographic one-line order.
/// Visiting is sequential; the visitor sees each element by reference.
pub fn enumerate_group<F: FnMut(&GroupPermutation)>(
    subdivision: &SubdivisionGraph,
    cap: u128,
    mut visit: F,
) -> Result<u64, EmbeddingError> {
    let group_size = subdivision.subdivisions();
    let group_count = subdivision.structure().edge_count();
    let cardinality = group_cardinality(group_size, group_count);
    if cardinality > cap {
        return Err(EmbeddingError::CapExceeded { cardinality, cap });
    }
    let mut sigma = GroupPermutation::identity(group_count, group_size);
    let mut count = 0u64;
    loop {
        visit(&sigma);
        count += 1;
        let mut idx = group_count;
        loop {
            if idx == 0 {
                return Ok(count);
            }
            if sigma.parts[idx - 1].advance_lex() {
                break;
            }
            idx -= 1;
        }
    }
}

/// Draws a uniform element of `(Sₙ)^{e'}`: each part is an independent
/// Fisher–Yates shuffle, so all `n!` orderings are equally likely per group.
pub fn random_group_element<R: Rng + ?Sized>(
    subdivision: &SubdivisionGraph,
    rng: &mut R,
) -> GroupPermutation {
    let n = subdivision.subdivisions();
    let parts = (0..subdivision.structure().edge_count())
        .map(|_| {
            let mut one_line: Vec<usize> = (1..=n).collect();
            one_line.shuffle(rng);
            Permutation::from_one_line(one_line).unwrap()
        })
        .collect();
    GroupPermutation { parts }
}
