//! Rate measurement over a corpus.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::bp::{backward_pass, build_block_model, next_column_distribution, ColumnState};
use crate::error::{Error, Result};
use crate::grid::BinaryImage;
use crate::harness::{Corpus, Estimate};
use crate::schemes::empirical::ContextTable;
use crate::schemes::{encode, measure, CodingReport, ParamSource, SchemeSpec, Sidedness};

/// Rates of one scheme on one corpus, in bits per pixel over all `M*W` pixels.
#[derive(Clone, Debug)]
pub struct RateReport {
    pub spec: SchemeSpec,
    pub corpus_id: String,
    /// Mean `-log2` code length per pixel.
    pub ideal_bpp: f64,
    /// Mean range coder output per pixel; absent when the coder was not run.
    pub actual_bpp: Option<f64>,
    pub stderr: f64,
    pub per_image_ideal: Vec<f64>,
    pub per_image_actual: Option<Vec<f64>>,
    /// Per-image rate of the 0-, 1- and 2-sided blocks taken separately
    /// (lines and strips for RCC). Empty for classes the scheme lacks.
    pub per_image_class: [Vec<f64>; 3],
}

impl RateReport {
    pub fn ideal(&self) -> Estimate {
        Estimate::from_samples(&self.per_image_ideal)
    }

    pub fn class(&self, sidedness: Sidedness) -> Option<Estimate> {
        let v = &self.per_image_class[sidedness.index()];
        (!v.is_empty()).then(|| Estimate::from_samples(v))
    }

    fn from_reports(spec: SchemeSpec, corpus_id: &str, reports: &[CodingReport], coded: bool) -> Self {
        let per_image_ideal: Vec<f64> = reports.iter().map(|r| r.ideal_bpp()).collect();
        let per_image_actual = coded.then(|| reports.iter().map(|r| r.actual_bpp()).collect::<Vec<f64>>());
        let per_image_class = std::array::from_fn(|k| {
            if reports.iter().all(|r| r.by_sidedness[k].pixels > 0) {
                reports.iter().map(|r| r.by_sidedness[k].model_bpp()).collect()
            } else {
                Vec::new()
            }
        });
        let est = Estimate::from_samples(&per_image_ideal);
        Self {
            spec,
            corpus_id: corpus_id.to_string(),
            ideal_bpp: est.mean,
            actual_bpp: per_image_actual.as_ref().map(|v| v.iter().sum::<f64>() / v.len() as f64),
            stderr: est.stderr,
            per_image_ideal,
            per_image_actual,
            per_image_class,
        }
    }
}

/// One report per scheme. Empirical schemes look up their table by context
/// size. With `run_coder` every image is actually encoded; otherwise only
/// the ideal code length is computed.
pub fn sweep_rates(
    corpus: &Corpus,
    specs: &[SchemeSpec],
    params: &(dyn ParamSource + Sync),
    tables: &BTreeMap<usize, ContextTable>,
    run_coder: bool,
) -> Result<Vec<RateReport>> {
    specs
        .iter()
        .map(|&spec| {
            let table = match spec {
                SchemeSpec::Empirical1 { context } => Some(
                    tables.get(&context).ok_or_else(|| Error::Scheme(format!("no context table for c={context}")))?,
                ),
                _ => None,
            };
            let reports = corpus
                .images
                .par_iter()
                .map(|img| {
                    if run_coder {
                        encode(img, spec, corpus.theta, params, table, false).map(|e| e.report)
                    } else {
                        measure(img, spec, params, table)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RateReport::from_reports(spec, &corpus.id, &reports, run_coder))
        })
        .collect()
}

/// Code length per pixel of a `k`-sided block at every valid position of the
/// image, averaged. Positions are `0..=M-N` (0-sided), `1..=M-N` (1-sided)
/// or `1..=M-N-1` (2-sided). This estimates the same per-block rate as the
/// tiled layouts but does not depend on where block boundaries fall.
pub fn band_rate(img: &BinaryImage, sidedness: Sidedness, n_rows: usize, theta_star: f64) -> Result<f64> {
    let (h, w) = (img.height(), img.width());
    let first = if sidedness == Sidedness::Zero { 0 } else { 1 };
    let last = match sidedness {
        Sidedness::Two => h.checked_sub(n_rows + 1),
        _ => h.checked_sub(n_rows),
    };
    let last = last.filter(|&l| l >= first).ok_or_else(|| {
        Error::Scheme(format!("no {}-sided position for {n_rows} rows in {h} rows", sidedness.index()))
    })?;
    let mut bits = 0.0;
    for r in first..=last {
        let top = (sidedness != Sidedness::Zero).then(|| img.row(r - 1));
        let bottom = (sidedness == Sidedness::Two).then(|| img.row(r + n_rows));
        let model = build_block_model(n_rows, w, theta_star, top, bottom)?;
        let messages = backward_pass(&model);
        let mut prev = None;
        for col in 0..w {
            let state = ColumnState::from_spins((r..r + n_rows).map(|rr| img.get(rr, col)));
            let dist = next_column_distribution(&model, &messages, col, prev)?;
            bits -= dist.prob(state).log2();
            prev = Some(state);
        }
    }
    Ok(bits / ((last - first + 1) * n_rows * w) as f64)
}

/// [`band_rate`] for every image of a corpus.
pub fn band_rates(corpus: &Corpus, sidedness: Sidedness, n_rows: usize, theta_star: f64) -> Result<Vec<f64>> {
    corpus.images.par_iter().map(|img| band_rate(img, sidedness, n_rows, theta_star)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gibbs::GibbsSettings;
    use crate::grid::{ImageDims, IsingParams};
    use crate::schemes::empirical::train_context_table;
    use crate::schemes::FixedTheta;

    fn corpus(theta: f64) -> Corpus {
        Corpus::generate(
            ImageDims::new(12, 16).unwrap(),
            IsingParams::new(theta).unwrap(),
            3,
            GibbsSettings { burn_in_sweeps: 20, sweeps_between_samples: 2, rng_seed: 8 },
        )
    }

    #[test]
    fn independent_source_costs_one_bit() {
        let c = corpus(0.0);
        let mut tables = BTreeMap::new();
        tables.insert(1, train_context_table(&c.images, 1).unwrap());
        let specs = [
            SchemeSpec::Model0 { n_rows: 2 },
            SchemeSpec::Model1 { n_rows: 3 },
            SchemeSpec::Rcc02 { line_rows: 2, strip_rows: 1 },
        ];
        for r in sweep_rates(&c, &specs, &FixedTheta(0.0), &tables, true).unwrap() {
            assert!((r.ideal_bpp - 1.0).abs() < 1e-12, "{:?}", r.spec);
            assert!(r.actual_bpp.unwrap() >= r.ideal_bpp);
        }
        for s in [Sidedness::Zero, Sidedness::One, Sidedness::Two] {
            for v in band_rates(&c, s, 2, 0.0).unwrap() {
                assert!((v - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rcc_classes_and_missing_table() {
        let c = corpus(0.4);
        let r = &sweep_rates(&c, &[SchemeSpec::Rcc02 { line_rows: 2, strip_rows: 2 }], &FixedTheta(0.4), &BTreeMap::new(), false).unwrap()[0];
        assert!(r.actual_bpp.is_none());
        let (lines, strips) = (r.class(Sidedness::Zero).unwrap(), r.class(Sidedness::Two).unwrap());
        assert!(strips.mean < lines.mean);
        assert!(r.class(Sidedness::One).is_none());
        assert!(sweep_rates(&c, &[SchemeSpec::Empirical1 { context: 3 }], &FixedTheta(0.4), &BTreeMap::new(), false).is_err());
    }

    #[test]
    fn band_rate_matches_tiled_layout_when_aligned() {
        // one 0-sided band covering the whole image is the whole-image code
        let c = corpus(0.4);
        let img = &c.images[0];
        let tiled = measure(img, SchemeSpec::Model0 { n_rows: 12 }, &FixedTheta(0.5), None).unwrap();
        let band = band_rate(img, Sidedness::Zero, 12, 0.5).unwrap();
        assert!((tiled.ideal_bpp() - band).abs() < 1e-12);
        assert!(band_rate(img, Sidedness::Two, 11, 0.4).is_err());
    }
}
