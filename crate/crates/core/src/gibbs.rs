//! Raster-scan Gibbs sampling of the uniform Ising field.
//!
//! The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`, which
//! is portable across platforms, so a corpus is reproducible from its seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{BinaryImage, ImageDims, IsingParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GibbsSettings {
    pub burn_in_sweeps: usize,
    pub sweeps_between_samples: usize,
    pub rng_seed: u64,
}

impl Default for GibbsSettings {
    fn default() -> Self {
        Self { burn_in_sweeps: 2000, sweeps_between_samples: 100, rng_seed: 0 }
    }
}

impl GibbsSettings {
    pub fn with_seed(seed: u64) -> Self {
        Self { rng_seed: seed, ..Self::default() }
    }
}

/// A single Gibbs chain on one lattice.
pub struct GibbsChain {
    state: BinaryImage,
    rng: ChaCha8Rng,
    // P(x = +1 | neighbor sum = 2k - 4), k = 0..=8 (odd entries unused)
    plus_prob: [f64; 9],
}

impl GibbsChain {
    pub fn new(dims: ImageDims, params: IsingParams, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pixels = (0..dims.sites())
            .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
            .collect();
        let state = BinaryImage::from_spins(dims, pixels).expect("spins are valid");
        let mut plus_prob = [0.0; 9];
        for (k, p) in plus_prob.iter_mut().enumerate() {
            let field = k as f64 - 4.0;
            *p = 1.0 / (1.0 + (-2.0 * params.theta * field).exp());
        }
        Self { state, rng, plus_prob }
    }

    pub fn state(&self) -> &BinaryImage {
        &self.state
    }

    pub fn sweep(&mut self) {
        let (h, w) = (self.state.height(), self.state.width());
        for r in 0..h {
            for c in 0..w {
                let mut field = 0i32;
                if r > 0 {
                    field += self.state.get(r - 1, c) as i32;
                }
                if r + 1 < h {
                    field += self.state.get(r + 1, c) as i32;
                }
                if c > 0 {
                    field += self.state.get(r, c - 1) as i32;
                }
                if c + 1 < w {
                    field += self.state.get(r, c + 1) as i32;
                }
                let p = self.plus_prob[(field + 4) as usize];
                let spin = if self.rng.gen::<f64>() < p { 1 } else { -1 };
                self.state.set(r, c, spin);
            }
        }
    }
}

/// Runs one chain: burn-in, then `count` retained states separated by
/// `sweeps_between_samples` sweeps.
pub fn gibbs_sample(
    dims: ImageDims,
    params: IsingParams,
    settings: GibbsSettings,
    count: usize,
) -> Vec<BinaryImage> {
    assert!(count >= 1, "sample count must be positive");
    let mut chain = GibbsChain::new(dims, params, settings.rng_seed);
    for _ in 0..settings.burn_in_sweeps {
        chain.sweep();
    }
    let mut out = Vec::with_capacity(count);
    out.push(chain.state().clone());
    for _ in 1..count {
        for _ in 0..settings.sweeps_between_samples.max(1) {
            chain.sweep();
        }
        out.push(chain.state().clone());
    }
    out
}
