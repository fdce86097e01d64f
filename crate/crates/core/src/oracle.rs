//! Brute-force references used to check the chain computations.
//!
//! Everything here sums over every configuration of the block, straight from
//! the site-level energy, without the column factorization.

use crate::bp::BlockModel;

/// Largest block that [`brute_force_block`] will enumerate.
pub const BRUTE_FORCE_CAP: usize = 22;

#[derive(Clone, Debug)]
pub struct BruteBlock {
    /// Indexed by configuration: column `c` occupies bits `c*N_b..(c+1)*N_b`,
    /// row `k` of a column is bit `k` within that range.
    pub probs: Vec<f64>,
    pub log_weights: Vec<f64>,
    pub log_partition: f64,
    pub entropy: f64,
    pub edge_moment: f64,
    pub top_magnetization: Vec<f64>,
    pub bottom_magnetization: Vec<f64>,
}

fn site_spin(cfg: usize, n_rows: usize, row: usize, col: usize) -> f64 {
    if cfg >> (col * n_rows + row) & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

pub fn brute_force_block(model: &BlockModel) -> BruteBlock {
    let (n, w) = (model.n_rows(), model.width());
    assert!(n * w <= BRUTE_FORCE_CAP, "block too large to enumerate");
    let theta = model.theta_star();
    let configs = 1usize << (n * w);

    let mut log_weights = Vec::with_capacity(configs);
    let mut edge_sums = Vec::with_capacity(configs);
    for cfg in 0..configs {
        let x = |r: usize, c: usize| site_spin(cfg, n, r, c);
        let mut edges = 0.0;
        for r in 0..n {
            for c in 0..w {
                if c + 1 < w {
                    edges += x(r, c) * x(r, c + 1);
                }
                if r + 1 < n {
                    edges += x(r, c) * x(r + 1, c);
                }
            }
        }
        let mut energy = theta * edges;
        for c in 0..w {
            energy += model.top_field()[c] * x(0, c) + model.bottom_field()[c] * x(n - 1, c);
        }
        log_weights.push(energy);
        edge_sums.push(edges);
    }
    let max = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = log_weights.iter().map(|l| (l - max).exp()).sum();
    let log_partition = max + z.ln();
    let probs: Vec<f64> = log_weights.iter().map(|l| (l - log_partition).exp()).collect();

    let entropy = probs.iter().filter(|&&p| p > 0.0).map(|p| -p * p.ln()).sum();
    let edge_moment = probs.iter().zip(&edge_sums).map(|(p, e)| p * e).sum();
    let magnetization = |row: usize| -> Vec<f64> {
        (0..w)
            .map(|c| probs.iter().enumerate().map(|(cfg, p)| p * site_spin(cfg, n, row, c)).sum())
            .collect()
    };
    BruteBlock {
        top_magnetization: magnetization(0),
        bottom_magnetization: magnetization(n - 1),
        probs,
        log_weights,
        log_partition,
        entropy,
        edge_moment,
    }
}

/// Total-variation distance between two distributions on the same support.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// `D(p || q)` in nats.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| a * (a / b).ln())
        .sum()
}
