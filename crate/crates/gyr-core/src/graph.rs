//! Directed multigraphs and their n-fold edge subdivisions.
//!
//! A structure graph holds `v'` vertices and `e'` ordered (tail, head) edges;
//! loops and parallel edges are allowed, and connectivity is deliberately not
//! enforced (no computation here needs it). Subdividing every edge into `n`
//! segments yields a derived graph on `(n-1)e' + v'` vertices and `n e'`
//! edges. Derived vertices are addressed as pairs: `(0, j)` is junction `j`
//! (an original vertex), `(i, j)` with `j ∈ 1..n-1` is the j-th interior
//! vertex along edge `i`. Derived edges are pairs `(i, j)` with `j ∈ 1..n`.
//!
//! All indices at the API surface are 1-based; both index spaces also carry a
//! bijection onto flat 0-based ranges (junctions first in `j` order, then
//! interior vertices in lexicographic `(i, j)` order) for array-backed work.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph needs at least one vertex")]
    NoVertices,
    #[error("edge {edge}: endpoint {endpoint} is out of range 1..={vertex_count}")]
    EndpointOutOfRange {
        edge: usize,
        endpoint: usize,
        vertex_count: usize,
    },
    #[error("subdivision count must be at least 2, got {0}")]
    TooFewSubdivisions(usize),
}

/// A finite directed multigraph with stable edge order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedMultigraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl DirectedMultigraph {
    /// Builds a graph from a vertex count and ordered (tail, head) pairs.
    /// Edge indices are 1-based and follow the given order.
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::NoVertices);
        }
        for (idx, &(tail, head)) in edges.iter().enumerate() {
            for endpoint in [tail, head] {
                if endpoint == 0 || endpoint > vertex_count {
                    return Err(GraphError::EndpointOutOfRange {
                        edge: idx + 1,
                        endpoint,
                        vertex_count,
                    });
                }
            }
        }
        Ok(Self {
            vertex_count,
            edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Tail vertex of edge `i` (1-based). Panics if `i` is out of range.
    pub fn tail(&self, i: usize) -> usize {
        self.edges[i - 1].0
    }

    /// Head vertex of edge `i` (1-based). Panics if `i` is out of range.
    pub fn head(&self, i: usize) -> usize {
        self.edges[i - 1].1
    }

    /// Number of edge endpoints incident to `v`; a loop at `v` counts twice,
    /// so degrees always sum to `2 e'`. Panics if `v` is out of range.
    pub fn degree(&self, v: usize) -> usize {
        assert!(
            v >= 1 && v <= self.vertex_count,
            "vertex {v} out of range 1..={}",
            self.vertex_count
        );
        self.edges
            .iter()
            .map(|&(tail, head)| usize::from(tail == v) + usize::from(head == v))
            .sum()
    }

    /// Degrees of all vertices, indexed by vertex − 1.
    pub fn degrees(&self) -> Vec<usize> {
        let mut degrees = vec![0usize; self.vertex_count];
        for &(tail, head) in &self.edges {
            degrees[tail - 1] += 1;
            degrees[head - 1] += 1;
        }
        degrees
    }

    /// Replaces every edge by a path of `n` edges through `n − 1` new
    /// interior vertices. `n = 1` is rejected: downstream weights of the form
    /// `deg + 2/(n−1)` are singular there, and the unsubdivided graph is
    /// already available as `self`.
    pub fn subdivide(&self, n: usize) -> Result<SubdivisionGraph, GraphError> {
        if n < 2 {
            return Err(GraphError::TooFewSubdivisions(n));
        }
        Ok(SubdivisionGraph {
            structure: self.clone(),
            n,
        })
    }
}

/// A vertex of the derived graph: junction `(0, j)` or interior `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DerivedVertex {
    /// Original vertex `j` of the structure graph, 1-based.
    Junction(usize),
    /// The j-th interior vertex along structure edge `i`; `j ∈ 1..=n−1`.
    Interior(usize, usize),
}

impl std::fmt::Display for DerivedVertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            DerivedVertex::Junction(j) => write!(f, "0,{j}"),
            DerivedVertex::Interior(i, j) => write!(f, "{i},{j}"),
        }
    }
}

/// A structure graph together with a subdivision count `n ≥ 2`.
///
/// The derived graph is never materialized; head/tail maps and the flat index
/// bijections are computed from `(i, j)` arithmetic, so identical inputs
/// always produce identical index maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubdivisionGraph {
    structure: DirectedMultigraph,
    n: usize,
}

impl SubdivisionGraph {
    pub fn structure(&self) -> &DirectedMultigraph {
        &self.structure
    }

    /// Segments per structure edge.
    pub fn subdivisions(&self) -> usize {
        self.n
    }

    /// Derived vertex count `(n−1) e' + v'`.
    pub fn vertex_count(&self) -> usize {
        (self.n - 1) * self.structure.edge_count() + self.structure.vertex_count()
    }

    /// Derived edge count `n e'`.
    pub fn edge_count(&self) -> usize {
        self.n * self.structure.edge_count()
    }

    /// Interior vertices per structure edge (`n − 1`).
    pub fn interior_count(&self) -> usize {
        self.n - 1
    }

    fn assert_edge(&self, i: usize, j: usize) {
        assert!(
            i >= 1 && i <= self.structure.edge_count(),
            "derived edge group {i} out of range 1..={}",
            self.structure.edge_count()
        );
        assert!(
            j >= 1 && j <= self.n,
            "derived edge index {j} out of range 1..={}",
            self.n
        );
    }

    /// Tail of derived edge `(i, j)`: junction `tail(i)` for `j = 1`, else
    /// interior `(i, j−1)`. Panics on out-of-range indices.
    pub fn tail(&self, i: usize, j: usize) -> DerivedVertex {
        self.assert_edge(i, j);
        if j == 1 {
            DerivedVertex::Junction(self.structure.tail(i))
        } else {
            DerivedVertex::Interior(i, j - 1)
        }
    }

    /// Head of derived edge `(i, j)`: junction `head(i)` for `j = n`, else
    /// interior `(i, j)`. Panics on out-of-range indices.
    pub fn head(&self, i: usize, j: usize) -> DerivedVertex {
        self.assert_edge(i, j);
        if j == self.n {
            DerivedVertex::Junction(self.structure.head(i))
        } else {
            DerivedVertex::Interior(i, j)
        }
    }

    /// Flat 0-based position of a derived vertex: junctions first in `j`
    /// order, then interior vertices in lexicographic `(i, j)` order.
    pub fn vertex_index(&self, vertex: DerivedVertex) -> usize {
        let v_prime = self.structure.vertex_count();
        match vertex {
            DerivedVertex::Junction(j) => {
                assert!(j >= 1 && j <= v_prime, "junction {j} out of range");
                j - 1
            }
            DerivedVertex::Interior(i, j) => {
                assert!(
                    i >= 1 && i <= self.structure.edge_count(),
                    "interior group {i} out of range"
                );
                assert!(j >= 1 && j < self.n, "interior index {j} out of range");
                v_prime + (i - 1) * (self.n - 1) + (j - 1)
            }
        }
    }

    /// Inverse of [`vertex_index`](Self::vertex_index).
    pub fn vertex_at(&self, index: usize) -> DerivedVertex {
        let v_prime = self.structure.vertex_count();
        assert!(
            index < self.vertex_count(),
            "flat index {index} out of range"
        );
        if index < v_prime {
            DerivedVertex::Junction(index + 1)
        } else {
            let offset = index - v_prime;
            let per_edge = self.n - 1;
            DerivedVertex::Interior(offset / per_edge + 1, offset % per_edge + 1)
        }
    }

    /// Flat 0-based position of derived edge `(i, j)`, lexicographic.
    pub fn edge_index(&self, i: usize, j: usize) -> usize {
        self.assert_edge(i, j);
        (i - 1) * self.n + (j - 1)
    }

    /// Inverse of [`edge_index`](Self::edge_index).
    pub fn edge_at(&self, index: usize) -> (usize, usize) {
        assert!(
            index < self.edge_count(),
            "flat edge index {index} out of range"
        );
        (index / self.n + 1, index % self.n + 1)
    }

    /// All derived vertices in flat order.
    pub fn vertices(&self) -> impl Iterator<Item = DerivedVertex> + '_ {
        (0..self.vertex_count()).map(|k| self.vertex_at(k))
    }

    /// All derived edges `(i, j)` in flat order.
    pub fn edge_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.edge_count()).map(|k| self.edge_at(k))
    }
}
