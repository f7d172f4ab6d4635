//! Shared generators and independent brute-force oracles for the
//! integration tests. The oracles deliberately reimplement gyration and the
//! ordering averages from scratch (plain two-pass formulas, explicit
//! permutation lists) so that agreement with the library is meaningful.

use gyr_core::{DirectedMultigraph, GroupedDisplacements, StructureEmbedding};
use rand::Rng;

pub fn uniform_vec(rng: &mut impl Rng, count: usize, half_width: f64) -> Vec<f64> {
    (0..count)
        .map(|_| rng.random_range(-half_width..half_width))
        .collect()
}

/// Random structure positions plus a displacement table whose group sums are
/// forced onto the corresponding structure displacements, so the pair always
/// passes the consistency check.
pub fn consistent_instance(
    graph: &DirectedMultigraph,
    n: usize,
    dim: usize,
    rng: &mut impl Rng,
) -> (StructureEmbedding, GroupedDisplacements) {
    let sub = graph.clone().subdivide(n).unwrap();
    let positions = uniform_vec(rng, graph.vertex_count() * dim, 2.0);
    let x = StructureEmbedding::new(graph.clone(), dim, positions).unwrap();
    let mut vectors = uniform_vec(rng, sub.edge_count() * dim, 1.0);
    for i in 1..=graph.edge_count() {
        let target = x.displacement(i);
        for c in 0..dim {
            let partial: f64 = (0..n - 1)
                .map(|j| vectors[((i - 1) * n + j) * dim + c])
                .sum();
            vectors[((i - 1) * n + (n - 1)) * dim + c] = target[c] - partial;
        }
    }
    (x, GroupedDisplacements::new(sub, dim, vectors).unwrap())
}

/// All permutations of `1..=n` in one-line form.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    let mut used = vec![false; n + 1];
    fn go(n: usize, prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for value in 1..=n {
            if !used[value] {
                used[value] = true;
                prefix.push(value);
                go(n, prefix, used, out);
                prefix.pop();
                used[value] = false;
            }
        }
    }
    go(n, &mut prefix, &mut used, &mut out);
    out
}

/// Uniform-weight squared radius of gyration by the plain two-pass formula.
pub fn plain_rg2(dim: usize, flat: &[f64]) -> f64 {
    let count = flat.len() / dim;
    let mut mean = vec![0.0; dim];
    for p in 0..count {
        for c in 0..dim {
            mean[c] += flat[p * dim + c];
        }
    }
    for m in &mut mean {
        *m /= count as f64;
    }
    let mut sum = 0.0;
    for p in 0..count {
        for c in 0..dim {
            let gap = flat[p * dim + c] - mean[c];
            sum += gap * gap;
        }
    }
    sum / count as f64
}

fn centroid(dim: usize, flat: &[f64]) -> Vec<f64> {
    let count = flat.len() / dim;
    let mut mean = vec![0.0; dim];
    for p in 0..count {
        for c in 0..dim {
            mean[c] += flat[p * dim + c];
        }
    }
    for m in &mut mean {
        *m /= count as f64;
    }
    mean
}

/// Interior points of one group under one ordering, starting from `tail`:
/// the partial sums of the reordered vectors, all but the last.
pub fn interior_points(dim: usize, tail: &[f64], group: &[f64], sigma: &[usize]) -> Vec<f64> {
    let n = sigma.len();
    let mut acc = tail.to_vec();
    let mut out = Vec::with_capacity((n - 1) * dim);
    for &slot in &sigma[..n - 1] {
        for c in 0..dim {
            acc[c] += group[(slot - 1) * dim + c];
        }
        out.extend_from_slice(&acc);
    }
    out
}

/// Ordering average of the interior gyration, by explicit enumeration.
pub fn oracle_ordering_average(dim: usize, group: &[f64]) -> f64 {
    let n = group.len() / dim;
    let tail = vec![0.0; dim];
    let orderings = permutations(n);
    let mut sum = 0.0;
    for sigma in &orderings {
        sum += plain_rg2(dim, &interior_points(dim, &tail, group, sigma));
    }
    sum / orderings.len() as f64
}

/// Gyration of the cloud of per-ordering interior centroids, by enumeration.
pub fn oracle_center_cloud(dim: usize, group: &[f64]) -> f64 {
    let n = group.len() / dim;
    let tail = vec![0.0; dim];
    let mut centers = Vec::new();
    for sigma in permutations(n) {
        centers.extend(centroid(dim, &interior_points(dim, &tail, group, &sigma)));
    }
    plain_rg2(dim, &centers)
}

/// Gyration of all interior points pooled across every ordering.
pub fn oracle_parent_cloud(dim: usize, group: &[f64]) -> f64 {
    let n = group.len() / dim;
    let tail = vec![0.0; dim];
    let mut pooled = Vec::new();
    for sigma in permutations(n) {
        pooled.extend(interior_points(dim, &tail, group, &sigma));
    }
    plain_rg2(dim, &pooled)
}

/// Average squared distance between two groups' interior centroids under
/// independent orderings, by full double enumeration.
pub fn oracle_separation_average(
    dim: usize,
    group_i: &[f64],
    group_j: &[f64],
    tail_i: &[f64],
    tail_j: &[f64],
) -> f64 {
    let n = group_i.len() / dim;
    let orderings = permutations(n);
    let mut sum = 0.0;
    for sigma in &orderings {
        let center_i = centroid(dim, &interior_points(dim, tail_i, group_i, sigma));
        for tau in &orderings {
            let center_j = centroid(dim, &interior_points(dim, tail_j, group_j, tau));
            sum += center_i
                .iter()
                .zip(&center_j)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>();
        }
    }
    sum / (orderings.len() * orderings.len()) as f64
}

/// Midpoint of a standalone group laid out from `tail`: halfway along the
/// total displacement.
pub fn group_midpoint(dim: usize, tail: &[f64], group: &[f64]) -> Vec<f64> {
    let n = group.len() / dim;
    let mut m = tail.to_vec();
    for j in 0..n {
        for c in 0..dim {
            m[c] += 0.5 * group[j * dim + c];
        }
    }
    m
}
