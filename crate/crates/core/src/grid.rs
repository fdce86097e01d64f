//! The uniform Ising field on a rectangular lattice with free boundary.

use crate::error::{Error, Result};

/// Largest grid that [`enumerate_exact`] will tabulate.
pub const ENUMERATION_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ImageDims {
    pub height: usize,
    pub width: usize,
}

impl ImageDims {
    pub fn new(height: usize, width: usize) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidDims { height, width });
        }
        Ok(Self { height, width })
    }

    pub fn sites(&self) -> usize {
        self.height * self.width
    }

    /// Number of lattice edges, `M(W-1) + (M-1)W`.
    pub fn edge_count(&self) -> usize {
        self.height * (self.width - 1) + (self.height - 1) * self.width
    }
}

/// An `M x W` configuration of spins in `{-1, +1}`, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryImage {
    dims: ImageDims,
    pixels: Vec<i8>,
}

impl BinaryImage {
    pub fn filled(dims: ImageDims, spin: i8) -> Self {
        assert!(spin == 1 || spin == -1, "spin must be +1 or -1");
        Self { dims, pixels: vec![spin; dims.sites()] }
    }

    pub fn from_spins(dims: ImageDims, pixels: Vec<i8>) -> Result<Self> {
        if pixels.len() != dims.sites() {
            return Err(Error::Image(format!(
                "expected {} pixels, got {}",
                dims.sites(),
                pixels.len()
            )));
        }
        if let Some(bad) = pixels.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::Image(format!("pixel value {bad} is not a spin")));
        }
        Ok(Self { dims, pixels })
    }

    /// Builds an image from a site-indexed bit pattern: bit `k` set means
    /// site `k` (row-major) is `+1`.
    pub fn from_bits(dims: ImageDims, bits: u64) -> Self {
        let pixels = (0..dims.sites())
            .map(|k| if bits >> k & 1 == 1 { 1 } else { -1 })
            .collect();
        Self { dims, pixels }
    }

    pub fn dims(&self) -> ImageDims {
        self.dims
    }

    pub fn height(&self) -> usize {
        self.dims.height
    }

    pub fn width(&self) -> usize {
        self.dims.width
    }

    pub fn pixels(&self) -> &[i8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.pixels[row * self.dims.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, spin: i8) {
        debug_assert!(spin == 1 || spin == -1);
        self.pixels[row * self.dims.width + col] = spin;
    }

    pub fn row(&self, row: usize) -> &[i8] {
        let w = self.dims.width;
        &self.pixels[row * w..(row + 1) * w]
    }

    pub fn negated(&self) -> Self {
        Self { dims: self.dims, pixels: self.pixels.iter().map(|s| -s).collect() }
    }

    /// Sum of `x_i x_j` over all lattice edges.
    pub fn edge_agreement(&self) -> i64 {
        let (h, w) = (self.dims.height, self.dims.width);
        let mut sum = 0i64;
        for r in 0..h {
            for c in 0..w {
                let s = self.get(r, c) as i64;
                if c + 1 < w {
                    sum += s * self.get(r, c + 1) as i64;
                }
                if r + 1 < h {
                    sum += s * self.get(r + 1, c) as i64;
                }
            }
        }
        sum
    }
}

/// Edge correlation parameter of the uniform model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsingParams {
    pub theta: f64,
}

impl IsingParams {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || theta < 0.0 {
            return Err(Error::Scheme(format!("theta must be finite and nonnegative, got {theta}")));
        }
        Ok(Self { theta })
    }
}

/// Horizontal then vertical lattice edges as row-major site index pairs.
pub fn grid_edges(dims: ImageDims) -> Vec<(usize, usize)> {
    let (h, w) = (dims.height, dims.width);
    let mut edges = Vec::with_capacity(dims.edge_count());
    for r in 0..h {
        for c in 0..w - 1 {
            edges.push((r * w + c, r * w + c + 1));
        }
    }
    for r in 0..h - 1 {
        for c in 0..w {
            edges.push((r * w + c, (r + 1) * w + c));
        }
    }
    edges
}

pub fn log_unnormalized_prob(img: &BinaryImage, params: IsingParams) -> f64 {
    params.theta * img.edge_agreement() as f64
}

/// Full probability table of a small grid. Entry `k` is the probability of
/// the configuration whose site bits are the bits of `k`.
#[derive(Clone, Debug)]
pub struct ExactDistribution {
    pub dims: ImageDims,
    pub probs: Vec<f64>,
}

impl ExactDistribution {
    pub fn image(&self, index: usize) -> BinaryImage {
        BinaryImage::from_bits(self.dims, index as u64)
    }

    pub fn entropy_nats(&self) -> f64 {
        self.probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
    }
}

pub fn enumerate_exact(dims: ImageDims, params: IsingParams) -> Result<ExactDistribution> {
    let n = dims.sites();
    if n > ENUMERATION_CAP {
        return Err(Error::DimsTooLarge { sites: n, cap: ENUMERATION_CAP });
    }
    let edges = grid_edges(dims);
    let mut log_weights: Vec<f64> = (0..1usize << n)
        .map(|k| {
            let agree: i64 = edges
                .iter()
                .map(|&(a, b)| if (k >> a & 1) == (k >> b & 1) { 1 } else { -1 })
                .sum();
            params.theta * agree as f64
        })
        .collect();
    let max = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for lw in log_weights.iter_mut() {
        *lw = (*lw - max).exp();
        total += *lw;
    }
    for w in log_weights.iter_mut() {
        *w /= total;
    }
    Ok(ExactDistribution { dims, probs: log_weights })
}
