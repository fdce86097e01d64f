//! The rate-comparison experiment on a Gibbs corpus: calibration, rate
//! curves of every scheme, redundancy estimates, and plot data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::calibrate::{calibrate_grid, CalibrationSettings, CalibrationTable};
use crate::error::{Error, Result};
use crate::gibbs::GibbsSettings;
use crate::grid::{ImageDims, IsingParams};
use crate::harness::rates::{band_rates, sweep_rates, RateReport};
use crate::harness::{Corpus, Estimate};
use crate::schemes::empirical::{train_context_table, ContextTable};
use crate::schemes::{block_layout, ParamSource, SchemeSpec, Sidedness};

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub theta: f64,
    pub height: usize,
    pub width: usize,
    pub images: usize,
    pub corpus_seed: u64,
    /// Seed of the separate corpus the context tables are trained on.
    pub training_seed: u64,
    pub burn_in_sweeps: usize,
    pub sweeps_between_samples: usize,
    /// Block heights `1..=max_rows` for every model scheme.
    pub max_rows: usize,
    pub contexts: Vec<usize>,
    pub max_boundaries: usize,
    /// Also run the range coder (otherwise ideal code lengths only).
    pub run_coder: bool,
    /// Calibrate 2-sided blocks too instead of using the source parameter.
    pub calibrate_two_sided: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            theta: 0.4,
            height: 200,
            width: 200,
            images: 17,
            corpus_seed: 0,
            training_seed: 1,
            burn_in_sweeps: 2000,
            sweeps_between_samples: 100,
            max_rows: 8,
            contexts: (1..=8).collect(),
            max_boundaries: 256,
            run_coder: false,
            calibrate_two_sided: false,
        }
    }
}

impl ExperimentConfig {
    pub fn dims(&self) -> Result<ImageDims> {
        ImageDims::new(self.height, self.width)
    }

    pub fn params(&self) -> Result<IsingParams> {
        IsingParams::new(self.theta)
    }

    fn gibbs(&self, seed: u64) -> GibbsSettings {
        GibbsSettings { burn_in_sweeps: self.burn_in_sweeps, sweeps_between_samples: self.sweeps_between_samples, rng_seed: seed }
    }

    pub fn corpus(&self) -> Result<Corpus> {
        Ok(Corpus::generate(self.dims()?, self.params()?, self.images, self.gibbs(self.corpus_seed)))
    }

    pub fn training_corpus(&self) -> Result<Corpus> {
        Ok(Corpus::generate(self.dims()?, self.params()?, self.images, self.gibbs(self.training_seed)))
    }

    pub fn model_specs(&self) -> [Vec<SchemeSpec>; 3] {
        let ns = 1..=self.max_rows;
        [
            ns.clone().map(|n| SchemeSpec::Model0 { n_rows: n }).collect(),
            ns.clone().map(|n| SchemeSpec::Model1 { n_rows: n }).collect(),
            ns.map(|n| SchemeSpec::Rcc02 { line_rows: n, strip_rows: n }).collect(),
        ]
    }

    /// Every `(sidedness, height)` the model schemes and band estimators use.
    pub fn calibration_keys(&self) -> Vec<(Sidedness, usize)> {
        let mut keys = BTreeSet::new();
        for specs in self.model_specs() {
            for spec in specs {
                for b in block_layout(spec, self.height) {
                    if b.sidedness != Sidedness::Two || self.calibrate_two_sided {
                        keys.insert((b.sidedness, b.n_rows));
                    }
                }
            }
        }
        for n in 1..=self.max_rows {
            keys.insert((Sidedness::Zero, n));
            keys.insert((Sidedness::One, n));
            if self.calibrate_two_sided {
                keys.insert((Sidedness::Two, n));
            }
        }
        keys.into_iter().collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.dims()?;
        self.params()?;
        if self.images < 2 {
            return Err(Error::Scheme("at least two images are needed for standard errors".into()));
        }
        if self.max_rows == 0 || self.max_rows + 2 > self.height {
            return Err(Error::Scheme(format!("max_rows {} does not fit {} rows", self.max_rows, self.height)));
        }
        Ok(())
    }
}

/// Calibrates every block shape of the experiment.
pub fn calibrate_corpus(config: &ExperimentConfig, corpus: &Corpus) -> Result<CalibrationTable> {
    let settings = CalibrationSettings { max_boundaries: config.max_boundaries, stat_tolerance_per_term: None };
    let mut table = CalibrationTable::new(config.theta);
    for (_, r) in calibrate_grid(&corpus.images, &config.calibration_keys(), &settings) {
        table.insert(r?);
    }
    Ok(table)
}

/// Redundancy estimates in bits per pixel.
#[derive(Clone, Debug)]
pub struct RedundancyEstimates {
    /// Height of the 2-sided blocks whose rate bounds `H_inf` from below.
    pub bound_rows: usize,
    pub h_inf_lower: Estimate,
    /// `R0M_1 - R0E_1` with the left-pixel context table as `R0E_1`.
    pub div_0m: Estimate,
    /// `R0E_1` minus the lower bound: bounds `I(R1; R0) / W` from above.
    pub info_adjacent: Estimate,
    /// Information across a strip of `N` rows, `I(R0; R_{N+1}) / W`.
    /// Only the single-row strip is estimable from coding rates.
    pub info_gap: Vec<(usize, Option<Estimate>)>,
}

#[derive(Clone, Debug)]
pub struct ExperimentResults {
    pub config: ExperimentConfig,
    pub corpus_id: String,
    pub calibration: CalibrationTable,
    pub model0: Vec<RateReport>,
    pub model1: Vec<RateReport>,
    pub rcc: Vec<RateReport>,
    pub empirical: Vec<RateReport>,
    /// Per-image sliding-band rates, indexed `[sidedness][n_rows - 1]`.
    pub band: [Vec<Vec<f64>>; 3],
    pub redundancy: RedundancyEstimates,
}

/// One statistical check: the estimate is oriented so the claim is
/// `mean > 0`, asserted when it exceeds `sigmas` standard errors.
#[derive(Clone, Debug)]
pub struct OrderingCheck {
    pub name: String,
    pub estimate: Estimate,
    pub sigmas: f64,
}

impl OrderingCheck {
    pub fn passed(&self) -> bool {
        self.estimate.mean > self.sigmas * self.estimate.stderr
    }
}

/// A reproduced value against a reference with an absolute tolerance.
#[derive(Clone, Debug)]
pub struct ValueCheck {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
}

impl ValueCheck {
    pub fn passed(&self) -> bool {
        (self.value - self.target).abs() <= self.tolerance
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResults> {
    config.validate()?;
    let corpus = config.corpus()?;
    let calibration = calibrate_corpus(config, &corpus)?;
    run_on_corpus(config, &corpus, &calibration)
}

/// Runs every sweep on a given corpus with a given calibration.
pub fn run_on_corpus(config: &ExperimentConfig, corpus: &Corpus, calibration: &CalibrationTable) -> Result<ExperimentResults> {
    config.validate()?;
    let training = config.training_corpus()?;
    let tables: BTreeMap<usize, ContextTable> = config
        .contexts
        .iter()
        .map(|&c| Ok((c, train_context_table(&training.images, c)?)))
        .collect::<Result<_>>()?;

    let [m0, m1, rc] = config.model_specs();
    let sweep = |specs: &[SchemeSpec]| sweep_rates(corpus, specs, calibration, &tables, config.run_coder);
    let model0 = sweep(&m0)?;
    let model1 = sweep(&m1)?;
    let rcc = sweep(&rc)?;
    let empirical = sweep(&config.contexts.iter().map(|&c| SchemeSpec::Empirical1 { context: c }).collect::<Vec<_>>())?;

    let band: [Vec<Vec<f64>>; 3] = [Sidedness::Zero, Sidedness::One, Sidedness::Two].map(|s| {
        (1..=config.max_rows)
            .map(|n| band_rates(corpus, s, n, calibration.theta_star(s, n)?))
            .collect::<Result<Vec<_>>>()
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?
    .try_into()
    .expect("three sidedness classes");

    let left_only = empirical
        .iter()
        .find(|r| r.spec == SchemeSpec::Empirical1 { context: 1 })
        .ok_or_else(|| Error::Scheme("redundancy estimates need the c=1 context table".into()))?;
    let bound = &band[2][config.max_rows - 1];
    let r0e = &left_only.per_image_ideal;
    let strip1: Vec<f64> = r0e.iter().zip(&band[2][0]).zip(bound).map(|((e, s), b)| e + s - 2.0 * b).collect();
    let redundancy = RedundancyEstimates {
        bound_rows: config.max_rows,
        h_inf_lower: Estimate::from_samples(bound),
        div_0m: Estimate::paired_difference(&model0[0].per_image_ideal, r0e),
        info_adjacent: Estimate::paired_difference(r0e, bound),
        info_gap: (1..=config.max_rows).map(|n| (n, (n == 1).then(|| Estimate::from_samples(&strip1)))).collect(),
    };

    Ok(ExperimentResults {
        config: config.clone(),
        corpus_id: corpus.id.clone(),
        calibration: calibration.clone(),
        model0,
        model1,
        rcc,
        empirical,
        band,
        redundancy,
    })
}

impl ExperimentResults {
    fn band_of(&self, s: Sidedness, n: usize) -> &[f64] {
        &self.band[s.index()][n - 1]
    }

    fn empirical_at(&self, c: usize) -> Option<&RateReport> {
        self.empirical.iter().find(|r| r.spec == SchemeSpec::Empirical1 { context: c })
    }

    /// Orderings of the sliding-band rates, each asserted at `sigmas`
    /// standard errors of the paired per-image difference.
    pub fn orderings(&self, sigmas: f64) -> Vec<OrderingCheck> {
        use Sidedness::*;
        let n_max = self.config.max_rows;
        let mut out = Vec::new();
        let mut push = |name: String, a: &[f64], b: &[f64]| {
            out.push(OrderingCheck { name, estimate: Estimate::paired_difference(a, b), sigmas });
        };
        for n in 1..n_max {
            push(format!("R1M_{} > R1M_{}", n, n + 1), self.band_of(One, n), self.band_of(One, n + 1));
        }
        for n in 1..=n_max {
            push(format!("R0M_{n} > R1M_{n}"), self.band_of(Zero, n), self.band_of(One, n));
        }
        for n in 1..n_max {
            push(format!("R0M_{} > R0M_{}", n, n + 1), self.band_of(Zero, n), self.band_of(Zero, n + 1));
        }
        for n in 1..n_max {
            push(format!("R2M_{} > R2M_{}", n + 1, n), self.band_of(Two, n + 1), self.band_of(Two, n));
        }
        for n in 1..=n_max {
            for m in 1..=n_max {
                push(format!("R1M_{n} > R2M_{m}"), self.band_of(One, n), self.band_of(Two, m));
            }
        }
        for n in 1..=n_max {
            for m in 1..=n_max {
                push(format!("R0M_{n} > R2M_{m}"), self.band_of(Zero, n), self.band_of(Two, m));
            }
        }
        out
    }

    /// Comparison of headline numbers with the reference values.
    pub fn reproduction_checks(&self) -> Result<Vec<ValueCheck>> {
        let missing = |what: &str| Error::Scheme(format!("experiment lacks {what}"));
        let bound = self.redundancy.h_inf_lower.mean;
        let r1m = |n: usize| self.model1.get(n - 1).ok_or_else(|| missing(&format!("1-sided N={n}")));
        let rcc = |n: usize| self.rcc.get(n - 1).ok_or_else(|| missing(&format!("0/2-sided N={n}")));
        let e5 = self.empirical_at(5).ok_or_else(|| missing("context size 5"))?;
        let excess = |r: f64| 100.0 * (r - bound) / bound;
        let close = Estimate::paired_difference(&r1m(1)?.per_image_ideal, &rcc(7)?.per_image_ideal);
        Ok(vec![
            ValueCheck { name: "1-sided model N=3 excess over 2-sided bound (%)".into(), value: excess(r1m(3)?.ideal_bpp), target: 3.5, tolerance: 1.5 },
            ValueCheck { name: "1-sided table c=5 excess over 2-sided bound (%)".into(), value: excess(e5.ideal_bpp), target: 4.0, tolerance: 1.5 },
            ValueCheck { name: "table c=5 minus model N=1, 1-sided (bpp)".into(), value: e5.ideal_bpp - r1m(1)?.ideal_bpp, target: 0.0025, tolerance: 0.002 },
            ValueCheck { name: "divergence estimate R0M_1 - R0E_1 (bpp)".into(), value: self.redundancy.div_0m.mean, target: 0.1, tolerance: 0.03 },
            ValueCheck { name: "adjacent-row information bound (bpp)".into(), value: self.redundancy.info_adjacent.mean, target: 0.041, tolerance: 0.015 },
            ValueCheck { name: "R1M_1 - R02_7 within one standard error (bpp)".into(), value: close.mean, target: 0.0, tolerance: close.stderr },
        ])
    }

    /// `scheme,sidedness,param,ideal_bpp,actual_bpp,stderr`.
    pub fn rates_csv(&self) -> String {
        let mut out = String::from("scheme,sidedness,param,ideal_bpp,actual_bpp,stderr\n");
        let mut row = |scheme: &str, side: &str, param: usize, ideal: f64, actual: Option<f64>, se: f64| {
            let actual = actual.map_or(String::new(), |a| a.to_string());
            writeln!(out, "{scheme},{side},{param},{ideal},{actual},{se}").unwrap();
        };
        for (name, side, reports) in [("model", "0", &self.model0), ("model", "1", &self.model1), ("rcc", "0/2", &self.rcc)] {
            for (i, r) in reports.iter().enumerate() {
                row(name, side, i + 1, r.ideal_bpp, r.actual_bpp, r.stderr);
            }
        }
        for r in &self.empirical {
            let SchemeSpec::Empirical1 { context } = r.spec else { continue };
            row("empirical", "1", context, r.ideal_bpp, r.actual_bpp, r.stderr);
        }
        for (k, side) in ["0", "1", "2"].iter().enumerate() {
            for (i, v) in self.band[k].iter().enumerate() {
                let e = Estimate::from_samples(v);
                row("model-band", side, i + 1, e.mean, None, e.stderr);
            }
        }
        out
    }

    /// `sidedness,n_rows,theta_star,target,achieved,stderr`, 2-sided rows
    /// showing the parameter in use.
    pub fn fig2_params_csv(&self) -> String {
        let mut out = String::from("sidedness,n_rows,theta_star,target,achieved,stderr\n");
        for side in [Sidedness::Zero, Sidedness::One, Sidedness::Two] {
            for n in 1..=self.config.max_rows {
                match self.calibration.entries.get(&(side, n)) {
                    Some(r) => writeln!(out, "{},{n},{},{},{},{}", side.index(), r.theta_star, r.target_moment, r.achieved_moment, r.stderr),
                    None => writeln!(out, "{},{n},{},,,", side.index(), self.calibration.theta),
                }
                .unwrap();
            }
        }
        out
    }

    /// Model-based rate curves against block height.
    pub fn fig3_model_rates_csv(&self) -> String {
        let mut out = String::from("n,r0m,r0m_se,r02,r02_se,r1m,r1m_se,r2m,r2m_se\n");
        for n in 1..=self.config.max_rows {
            let (a, b, c) = (&self.model0[n - 1], &self.rcc[n - 1], &self.model1[n - 1]);
            let d = Estimate::from_samples(self.band_of(Sidedness::Two, n));
            writeln!(out, "{n},{},{},{},{},{},{},{},{}", a.ideal_bpp, a.stderr, b.ideal_bpp, b.stderr, c.ideal_bpp, c.stderr, d.mean, d.stderr).unwrap();
        }
        out
    }

    /// 1-sided table rates against context size, with the single-row
    /// 1-sided model rate as a reference line.
    pub fn fig4_1sided_csv(&self) -> String {
        let m = &self.model1[0];
        let mut out = String::from("c,r1e,r1e_se,r1m_1,r1m_1_se\n");
        for r in &self.empirical {
            let SchemeSpec::Empirical1 { context } = r.spec else { continue };
            writeln!(out, "{context},{},{},{},{}", r.ideal_bpp, r.stderr, m.ideal_bpp, m.stderr).unwrap();
        }
        out
    }

    /// `quantity,value,stderr` for the redundancy estimates.
    pub fn redundancy_csv(&self) -> String {
        let r = &self.redundancy;
        let mut out = String::from("quantity,value,stderr\n");
        let mut row = |k: &str, e: Option<Estimate>| {
            match e {
                Some(e) => writeln!(out, "{k},{},{}", e.mean, e.stderr),
                None => writeln!(out, "{k},unavailable,"),
            }
            .unwrap()
        };
        row(&format!("h_inf_lower_r2m_{}", r.bound_rows), Some(r.h_inf_lower));
        row("div_0m", Some(r.div_0m));
        row("info_adjacent", Some(r.info_adjacent));
        for (n, e) in &r.info_gap {
            row(&format!("info_gap_{n}"), *e);
        }
        out
    }
}
