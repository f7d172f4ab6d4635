//! Input builders shared by the benchmarks: seeded random clouds and
//! consistent (structure embedding, displacement table) pairs.

use gyr_core::{DirectedMultigraph, GroupedDisplacements, StructureEmbedding, WeightedPointCloud};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_cloud(dim: usize, count: usize, seed: u64) -> WeightedPointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = (0..count * dim)
        .map(|_| rng.random_range(-3.0..3.0))
        .collect();
    let weights = (0..count).map(|_| rng.random_range(0.1..4.0)).collect();
    WeightedPointCloud::new(dim, positions, weights).expect("valid cloud")
}

/// Random junction positions plus displacement vectors whose group sums are
/// forced onto the structure displacements, so every routine accepts them.
pub fn consistent_instance(
    graph: &DirectedMultigraph,
    n: usize,
    dim: usize,
    seed: u64,
) -> (StructureEmbedding, GroupedDisplacements) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sub = graph.clone().subdivide(n).expect("n >= 2");
    let positions = (0..graph.vertex_count() * dim)
        .map(|_| rng.random_range(-2.0..2.0))
        .collect();
    let x = StructureEmbedding::new(graph.clone(), dim, positions).expect("valid embedding");
    let mut vectors: Vec<f64> = (0..sub.edge_count() * dim)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    for i in 1..=graph.edge_count() {
        let target = x.displacement(i);
        for c in 0..dim {
            let partial: f64 = (0..n - 1)
                .map(|j| vectors[((i - 1) * n + j) * dim + c])
                .sum();
            vectors[((i - 1) * n + (n - 1)) * dim + c] = target[c] - partial;
        }
    }
    let w = GroupedDisplacements::new(sub, dim, vectors).expect("consistent table");
    (x, w)
}
