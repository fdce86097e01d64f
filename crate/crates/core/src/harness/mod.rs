//! Experiment orchestration: corpora, rate sweeps, redundancy estimates and
//! exact checks on narrow grids.

pub mod exact;
pub mod experiment;
pub mod lemma;
pub mod rates;

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::gibbs::{gibbs_sample, GibbsSettings};
use crate::grid::{BinaryImage, ImageDims, IsingParams};
use crate::pbm::{read_pbm, write_pbm};

pub use experiment::{run_experiment, ExperimentConfig, ExperimentResults};
pub use rates::{band_rate, band_rates, sweep_rates, RateReport};

/// A set of same-sized images from one source.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub id: String,
    pub theta: f64,
    pub images: Vec<BinaryImage>,
}

impl Corpus {
    /// Images from a single Gibbs chain.
    pub fn generate(dims: ImageDims, params: IsingParams, count: usize, settings: GibbsSettings) -> Self {
        Self {
            id: format!("gibbs-theta{}-{}x{}-n{}-seed{}", params.theta, dims.height, dims.width, count, settings.rng_seed),
            theta: params.theta,
            images: gibbs_sample(dims, params, settings, count),
        }
    }

    pub fn dims(&self) -> Option<ImageDims> {
        self.images.first().map(|i| i.dims())
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Writes `img_000.pbm`, `img_001.pbm`, ... and returns the paths.
    pub fn save_dir(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir.as_ref())?;
        self.images
            .iter()
            .enumerate()
            .map(|(i, img)| {
                let path = dir.as_ref().join(format!("img_{i:03}.pbm"));
                write_pbm(&path, img)?;
                Ok(path)
            })
            .collect()
    }

    /// Reads every `.pbm` file of a directory in name order.
    pub fn load_dir(dir: impl AsRef<Path>, theta: f64) -> Result<Self> {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir.as_ref())?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "pbm"))
            .collect();
        paths.sort();
        let images = paths.iter().map(read_pbm).collect::<Result<Vec<_>>>()?;
        if let Some(first) = images.first() {
            if images.iter().any(|i| i.dims() != first.dims()) {
                return Err(Error::Image("corpus images differ in size".into()));
            }
        }
        Ok(Self { id: dir.as_ref().display().to_string(), theta, images })
    }
}

/// Mean of per-image values with its standard error across images.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let stderr = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
        } else {
            f64::NAN
        };
        Self { mean, stderr }
    }

    /// Per-image differences `a - b`.
    pub fn paired_difference(a: &[f64], b: &[f64]) -> Self {
        assert_eq!(a.len(), b.len(), "paired samples differ in length");
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        Self::from_samples(&d)
    }

    /// Number of standard errors the mean lies above zero.
    pub fn z(&self) -> f64 {
        self.mean / self.stderr
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimates() {
        let e = Estimate::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        assert!((e.stderr - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-12);
        let d = Estimate::paired_difference(&[2.0, 3.0, 5.0], &[1.0, 2.0, 3.0]);
        assert!((d.mean - 4.0 / 3.0).abs() < 1e-12);
        assert!(Estimate::from_samples(&[1.0]).stderr.is_nan());
    }

    #[test]
    fn corpus_dir_round_trip() {
        let dir = std::env::temp_dir().join(format!("rowcode-corpus-{}", std::process::id()));
        let c = Corpus::generate(ImageDims::new(5, 9).unwrap(), IsingParams::new(0.3).unwrap(), 3, GibbsSettings { burn_in_sweeps: 3, sweeps_between_samples: 1, rng_seed: 4 });
        c.save_dir(&dir).unwrap();
        let back = Corpus::load_dir(&dir, 0.3).unwrap();
        assert_eq!(back.images, c.images);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
