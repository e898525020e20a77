//! Support estimation and geometry diagnostics for particle configurations.

use serde::{Deserialize, Serialize};

use crate::measure::{distance, DiscreteMeasure};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub count: usize,
    /// Mass-weighted centroid of each cluster, ordered by lowest member index.
    pub representatives: Vec<Vec<f64>>,
    pub masses: Vec<f64>,
    /// Largest distance from an atom to its cluster representative.
    pub max_intra_radius: f64,
}

/// Single-linkage clustering: atoms closer than `eps` (inclusive) share a cluster.
///
/// Zero-mass atoms are clustered like any other; a cluster made only of
/// such atoms gets the plain mean as representative.
pub fn cluster_support(mu: &DiscreteMeasure, eps: f64) -> ClusterSummary {
    let k = mu.len();
    let mut parent: Vec<usize> = (0..k).collect();
    for i in 0..k {
        for j in (i + 1)..k {
            if distance(mu.point(i), mu.point(j)) <= eps {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    // Keep the lower index as root so the labelling is canonical.
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }

    let mut label = vec![usize::MAX; k];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for i in 0..k {
        let root = find(&mut parent, i);
        if label[root] == usize::MAX {
            label[root] = members.len();
            members.push(Vec::new());
        }
        members[label[root]].push(i);
    }

    let dim = mu.dim();
    let w = mu.weights();
    let mut representatives = Vec::with_capacity(members.len());
    let mut masses = Vec::with_capacity(members.len());
    let mut max_intra_radius: f64 = 0.0;
    for group in &members {
        let mass: f64 = group.iter().map(|&i| w[i]).sum();
        let mut centre = vec![0.0; dim];
        for &i in group {
            let coef = if mass > 0.0 { w[i] / mass } else { 1.0 / group.len() as f64 };
            for (c, x) in centre.iter_mut().zip(mu.point(i)) {
                *c += coef * x;
            }
        }
        for &i in group {
            max_intra_radius = max_intra_radius.max(distance(&centre, mu.point(i)));
        }
        representatives.push(centre);
        masses.push(mass);
    }
    ClusterSummary { count: members.len(), representatives, masses, max_intra_radius }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellDiagnostics {
    pub centroid: Vec<f64>,
    pub radial_mean: f64,
    pub radial_std: f64,
}

/// Mass-weighted centroid, and mean and standard deviation of the distance to it.
pub fn shell_diagnostics(mu: &DiscreteMeasure) -> ShellDiagnostics {
    let centroid = mu.centroid();
    let w = mu.weights();
    let radii: Vec<f64> = mu.points().map(|x| distance(x, &centroid)).collect();
    let radial_mean: f64 = radii.iter().zip(w).map(|(r, wi)| wi * r).sum();
    let var: f64 = radii.iter().zip(w).map(|(r, wi)| wi * (r - radial_mean).powi(2)).sum();
    ShellDiagnostics { centroid, radial_mean, radial_std: var.max(0.0).sqrt() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexDiagnostics {
    pub cluster_count: usize,
    /// `max |d - 1|` over representative pairs; `None` with fewer than two clusters.
    pub max_distance_deviation: Option<f64>,
}

pub fn simplex_diagnostics(mu: &DiscreteMeasure, eps: f64) -> SimplexDiagnostics {
    let clusters = cluster_support(mu, eps);
    let reps = &clusters.representatives;
    let mut worst: Option<f64> = None;
    for i in 0..reps.len() {
        for j in (i + 1)..reps.len() {
            let dev = (distance(&reps[i], &reps[j]) - 1.0).abs();
            worst = Some(worst.map_or(dev, |m| m.max(dev)));
        }
    }
    SimplexDiagnostics { cluster_count: clusters.count, max_distance_deviation: worst }
}
