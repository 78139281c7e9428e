//! k-means with k-means++ seeding over document embeddings.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const MAX_ITERATIONS: usize = 300;
pub const RELATIVE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KMeansError {
    #[error("vector {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("{docs} documents cannot form {k} clusters")]
    TooFewDocs { docs: usize, k: usize },
    #[error("k must be positive")]
    ZeroClusters,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid, lowest index on ties.
fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    centroids
        .iter()
        .enumerate()
        .map(|(i, c)| (i, sq_dist(point, c)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

fn seed_centroids(vectors: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids = vec![vectors[rng.random_range(0..vectors.len())].clone()];
    let mut d2: Vec<f64> = vectors.iter().map(|v| sq_dist(v, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            super::sample_index(&d2, rng.random::<f64>())
        } else {
            rng.random_range(0..vectors.len())
        };
        centroids.push(vectors[next].clone());
        for (d, v) in d2.iter_mut().zip(vectors) {
            *d = d.min(sq_dist(v, centroids.last().expect("just pushed")));
        }
    }
    centroids
}

/// Cluster labels in `0..k` for each vector. Deterministic for a fixed seed.
pub fn cluster_embeddings(vectors: &[Vec<f64>], k: usize, seed: u64) -> Result<Vec<usize>, KMeansError> {
    if k == 0 {
        return Err(KMeansError::ZeroClusters);
    }
    if vectors.len() < k {
        return Err(KMeansError::TooFewDocs {
            docs: vectors.len(),
            k,
        });
    }
    let dim = vectors[0].len();
    if let Some((index, v)) = vectors.iter().enumerate().find(|(_, v)| v.len() != dim) {
        return Err(KMeansError::DimensionMismatch {
            index,
            expected: dim,
            found: v.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_centroids(vectors, k, &mut rng);
    let mut labels = vec![0usize; vectors.len()];
    let mut reseeded = vec![false; k];
    let mut prev_inertia = f64::INFINITY;

    for _ in 0..MAX_ITERATIONS {
        let mut inertia = 0.0;
        let mut dists = Vec::with_capacity(vectors.len());
        for (label, v) in labels.iter_mut().zip(vectors) {
            let (c, d) = nearest(v, &centroids);
            *label = c;
            inertia += d;
            dists.push(d);
        }

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (&label, v) in labels.iter().zip(vectors) {
            counts[label] += 1;
            for (s, x) in sums[label].iter_mut().zip(v) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            } else if !reseeded[c] {
                // Move an empty cluster onto the worst-fit point, once.
                reseeded[c] = true;
                let far = dists
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |b, (i, &d)| if d > b.1 { (i, d) } else { b })
                    .0;
                centroids[c] = vectors[far].clone();
            }
        }

        let converged = prev_inertia.is_finite()
            && (prev_inertia == 0.0 || (prev_inertia - inertia).abs() / prev_inertia < RELATIVE_TOLERANCE);
        prev_inertia = inertia;
        if converged {
            break;
        }
    }
    for (label, v) in labels.iter_mut().zip(vectors) {
        *label = nearest(v, &centroids).0;
    }
    Ok(labels)
}
