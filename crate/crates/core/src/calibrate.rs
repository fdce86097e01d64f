//! Moment-matching block parameters.
//!
//! The block models form an exponential family in `theta*` whose sufficient
//! statistic `T` is the in-block edge agreement sum, plus the agreement with
//! the boundary row(s) for 1- and 2-sided blocks. The member closest in
//! divergence to the true block distribution is the one whose expected `T`
//! equals the true expectation, so calibration estimates the true `E[T]` and
//! bisects on `theta*` until the block model reproduces it.
//!
//! For conditioned blocks the model moment is averaged over boundary rows
//! drawn from the same source as the target.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::bp::{block_statistics, build_block_model};
use crate::error::{Error, Result};
use crate::grid::{enumerate_exact, BinaryImage, ImageDims, IsingParams};
use crate::oracle::{brute_force_block, kl_divergence};
use crate::schemes::{ParamSource, Sidedness};

pub const BRACKET: (f64, f64) = (0.0, 4.0);
pub const MAX_ITERATIONS: usize = 200;
/// Default number of boundary rows (or row pairs) averaged over per solve.
pub const DEFAULT_MAX_BOUNDARIES: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationResult {
    pub sidedness: Sidedness,
    pub n_rows: usize,
    pub theta_star: f64,
    pub target_moment: f64,
    pub achieved_moment: f64,
    pub iterations: usize,
    /// Standard error of the target; zero for exact targets.
    pub stderr: f64,
}

/// Estimated true moment of the block statistic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentTarget {
    pub moment: f64,
    pub stderr: f64,
    /// Number of terms in the statistic.
    pub terms: usize,
}

/// Number of terms in the statistic of an `n_rows x width` block.
pub fn statistic_terms(n_rows: usize, width: usize, sidedness: Sidedness) -> usize {
    n_rows * (width - 1) + (n_rows - 1) * width + sidedness.index() * width
}

fn band_rows(height: usize, n_rows: usize, sidedness: Sidedness) -> std::ops::RangeInclusive<usize> {
    match sidedness {
        Sidedness::Zero => 0..=height - n_rows,
        Sidedness::One => 1..=height - n_rows,
        Sidedness::Two => 1..=height - n_rows - 1,
    }
}

fn check_band(height: usize, n_rows: usize, sidedness: Sidedness) -> Result<()> {
    if n_rows == 0 || n_rows + sidedness.index() > height {
        return Err(Error::Scheme(format!(
            "a {n_rows}-row band with {} boundary rows does not fit in {height} rows",
            sidedness.index()
        )));
    }
    Ok(())
}

/// Statistic `T` of the band starting at `first` in a full configuration.
fn band_statistic(img: &BinaryImage, first: usize, n_rows: usize, sidedness: Sidedness) -> f64 {
    let w = img.width();
    let mut t = 0i64;
    for r in first..first + n_rows {
        for c in 0..w {
            let s = img.get(r, c) as i64;
            if c + 1 < w {
                t += s * img.get(r, c + 1) as i64;
            }
            if r + 1 < first + n_rows {
                t += s * img.get(r + 1, c) as i64;
            }
        }
    }
    if sidedness != Sidedness::Zero {
        t += (0..w).map(|c| (img.get(first - 1, c) * img.get(first, c)) as i64).sum::<i64>();
    }
    if sidedness == Sidedness::Two {
        let last = first + n_rows - 1;
        t += (0..w).map(|c| (img.get(last, c) * img.get(last + 1, c)) as i64).sum::<i64>();
    }
    t as f64
}

/// Monte-Carlo estimate of the true `E[T]`, averaged over every band position
/// of every image. The standard error is taken across images. Fails when it
/// exceeds a third of `stat_tolerance`.
pub fn estimate_target_moment(
    corpus: &[BinaryImage],
    n_rows: usize,
    sidedness: Sidedness,
    stat_tolerance: Option<f64>,
) -> Result<MomentTarget> {
    let first = corpus.first().ok_or_else(|| Error::Scheme("empty corpus".into()))?;
    let (height, width) = (first.height(), first.width());
    check_band(height, n_rows, sidedness)?;
    let per_image: Vec<f64> = corpus
        .iter()
        .map(|img| {
            let rows = band_rows(img.height(), n_rows, sidedness);
            let n = rows.clone().count() as f64;
            rows.map(|r| band_statistic(img, r, n_rows, sidedness)).sum::<f64>() / n
        })
        .collect();
    let k = per_image.len() as f64;
    let moment = per_image.iter().sum::<f64>() / k;
    let stderr = if per_image.len() > 1 {
        (per_image.iter().map(|x| (x - moment).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt()
    } else {
        f64::INFINITY
    };
    if let Some(tol) = stat_tolerance {
        if !(stderr <= tol / 3.0) {
            return Err(Error::InsufficientSamples { stderr, tolerance: tol });
        }
    }
    Ok(MomentTarget { moment, stderr, terms: statistic_terms(n_rows, width, sidedness) })
}

/// One boundary conditioning with its weight.
#[derive(Clone, Debug)]
pub struct BoundarySample {
    pub weight: f64,
    pub top: Option<Vec<i8>>,
    pub bottom: Option<Vec<i8>>,
}

/// A block shape together with the distribution of its boundary rows.
#[derive(Clone, Debug)]
pub struct CalibrationProblem {
    pub width: usize,
    pub n_rows: usize,
    pub sidedness: Sidedness,
    pub boundaries: Vec<BoundarySample>,
}

impl CalibrationProblem {
    /// Boundary rows taken from the corpus at every band position, thinned by
    /// a fixed stride to at most `max_boundaries`.
    pub fn from_corpus(corpus: &[BinaryImage], n_rows: usize, sidedness: Sidedness, max_boundaries: usize) -> Result<Self> {
        let first = corpus.first().ok_or_else(|| Error::Scheme("empty corpus".into()))?;
        check_band(first.height(), n_rows, sidedness)?;
        let width = first.width();
        let boundaries = if sidedness == Sidedness::Zero {
            vec![BoundarySample { weight: 1.0, top: None, bottom: None }]
        } else {
            let all: Vec<(usize, usize)> = corpus
                .iter()
                .enumerate()
                .flat_map(|(i, img)| band_rows(img.height(), n_rows, sidedness).map(move |r| (i, r)))
                .collect();
            let stride = all.len().div_ceil(max_boundaries.max(1));
            let picked: Vec<_> = all.into_iter().step_by(stride).collect();
            let w = 1.0 / picked.len() as f64;
            picked
                .into_iter()
                .map(|(i, r)| BoundarySample {
                    weight: w,
                    top: Some(corpus[i].row(r - 1).to_vec()),
                    bottom: (sidedness == Sidedness::Two).then(|| corpus[i].row(r + n_rows).to_vec()),
                })
                .collect()
        };
        Ok(Self { width, n_rows, sidedness, boundaries })
    }

    /// Exact target and boundary distribution for a grid small enough to
    /// enumerate, pooled over all band positions.
    pub fn exact(dims: ImageDims, params: IsingParams, n_rows: usize, sidedness: Sidedness) -> Result<(Self, MomentTarget)> {
        check_band(dims.height, n_rows, sidedness)?;
        let table = enumerate_exact(dims, params)?;
        let positions: Vec<usize> = band_rows(dims.height, n_rows, sidedness).collect();
        let mut boundary_mass: BTreeMap<(Vec<i8>, Vec<i8>), f64> = BTreeMap::new();
        let mut moment = 0.0;
        for (k, &p) in table.probs.iter().enumerate() {
            let img = table.image(k);
            for &r in &positions {
                let share = p / positions.len() as f64;
                moment += share * band_statistic(&img, r, n_rows, sidedness);
                if sidedness != Sidedness::Zero {
                    let top = img.row(r - 1).to_vec();
                    let bottom = if sidedness == Sidedness::Two { img.row(r + n_rows).to_vec() } else { Vec::new() };
                    *boundary_mass.entry((top, bottom)).or_insert(0.0) += share;
                }
            }
        }
        let boundaries = if sidedness == Sidedness::Zero {
            vec![BoundarySample { weight: 1.0, top: None, bottom: None }]
        } else {
            boundary_mass
                .into_iter()
                .map(|((top, bottom), weight)| BoundarySample {
                    weight,
                    top: Some(top),
                    bottom: (!bottom.is_empty()).then_some(bottom),
                })
                .collect()
        };
        let target = MomentTarget { moment, stderr: 0.0, terms: statistic_terms(n_rows, dims.width, sidedness) };
        Ok((Self { width: dims.width, n_rows, sidedness, boundaries }, target))
    }

    /// Block-model expectation of `T`, averaged over the boundary samples.
    pub fn achieved_moment(&self, theta_star: f64) -> Result<f64> {
        let mut total = 0.0;
        for b in &self.boundaries {
            let model = build_block_model(self.n_rows, self.width, theta_star, b.top.as_deref(), b.bottom.as_deref())?;
            let stats = block_statistics(&model);
            let mut t = stats.edge_moment();
            if let Some(top) = &b.top {
                t += top.iter().zip(&stats.top_magnetization).map(|(&s, m)| s as f64 * m).sum::<f64>();
            }
            if let Some(bottom) = &b.bottom {
                t += bottom.iter().zip(&stats.bottom_magnetization).map(|(&s, m)| s as f64 * m).sum::<f64>();
            }
            total += b.weight * t;
        }
        Ok(total)
    }

    pub fn statistic_terms(&self) -> usize {
        statistic_terms(self.n_rows, self.width, self.sidedness)
    }
}

/// True conditional law of a block given its boundary rows, pooled over band
/// positions of an enumerable grid. Used to check that the moment-matched
/// parameter minimizes divergence.
#[derive(Clone, Debug)]
pub struct EnumeratedBlockLaw {
    pub n_rows: usize,
    pub width: usize,
    /// `(weight, boundary, P(block | boundary))`, the block indexed as in
    /// [`crate::oracle::brute_force_block`].
    pub cases: Vec<(f64, BoundarySample, Vec<f64>)>,
}

impl EnumeratedBlockLaw {
    pub fn from_grid(dims: ImageDims, params: IsingParams, n_rows: usize, sidedness: Sidedness) -> Result<Self> {
        check_band(dims.height, n_rows, sidedness)?;
        let table = enumerate_exact(dims, params)?;
        let positions: Vec<usize> = band_rows(dims.height, n_rows, sidedness).collect();
        let w = dims.width;
        let mut joint: BTreeMap<(usize, Vec<i8>, Vec<i8>), Vec<f64>> = BTreeMap::new();
        for (k, &p) in table.probs.iter().enumerate() {
            let img = table.image(k);
            for &r in &positions {
                let top = if sidedness != Sidedness::Zero { img.row(r - 1).to_vec() } else { Vec::new() };
                let bottom = if sidedness == Sidedness::Two { img.row(r + n_rows).to_vec() } else { Vec::new() };
                let mut cfg = 0usize;
                for c in 0..w {
                    for j in 0..n_rows {
                        if img.get(r + j, c) == 1 {
                            cfg |= 1 << (c * n_rows + j);
                        }
                    }
                }
                joint.entry((r, top, bottom)).or_insert_with(|| vec![0.0; 1 << (n_rows * w)])[cfg] += p;
            }
        }
        let cases = joint
            .into_iter()
            .map(|((_, top, bottom), probs)| {
                let mass: f64 = probs.iter().sum();
                let boundary = BoundarySample {
                    weight: mass / positions.len() as f64,
                    top: (!top.is_empty()).then_some(top),
                    bottom: (!bottom.is_empty()).then_some(bottom),
                };
                (boundary.weight, boundary, probs.into_iter().map(|p| p / mass).collect())
            })
            .collect();
        Ok(Self { n_rows, width: w, cases })
    }

    /// Boundary-averaged `D(true block law || block model)` in nats.
    pub fn divergence(&self, theta_star: f64) -> Result<f64> {
        let mut total = 0.0;
        for (weight, b, truth) in &self.cases {
            let model = build_block_model(self.n_rows, self.width, theta_star, b.top.as_deref(), b.bottom.as_deref())?;
            total += weight * kl_divergence(truth, &brute_force_block(&model).probs);
        }
        Ok(total)
    }
}

/// Default bisection tolerance: `1e-4` per statistic term.
pub fn default_tolerance(problem: &CalibrationProblem) -> f64 {
    1e-4 * problem.statistic_terms() as f64
}

/// Bisection on `theta*` in [`BRACKET`] until the achieved moment is within
/// `tolerance` of the target.
pub fn solve_theta_star(problem: &CalibrationProblem, target: MomentTarget, tolerance: f64) -> Result<CalibrationResult> {
    let result = |theta_star: f64, achieved: f64, iterations: usize| CalibrationResult {
        sidedness: problem.sidedness,
        n_rows: problem.n_rows,
        theta_star,
        target_moment: target.moment,
        achieved_moment: achieved,
        iterations,
        stderr: target.stderr,
    };
    let (mut lo, mut hi) = BRACKET;
    let at_lo = problem.achieved_moment(lo)?;
    if (at_lo - target.moment).abs() <= tolerance {
        return Ok(result(lo, at_lo, 0));
    }
    // a Monte-Carlo target just below the zero-coupling moment is noise
    if target.moment < at_lo && at_lo - target.moment <= 3.0 * target.stderr {
        return Ok(result(lo, at_lo, 0));
    }
    let at_hi = problem.achieved_moment(hi)?;
    if target.moment < at_lo || target.moment > at_hi {
        return Err(Error::BracketFailure { target: target.moment, lo: at_lo, hi: at_hi });
    }
    let mut best = (hi, at_hi);
    for iteration in 1..=MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        let achieved = problem.achieved_moment(mid)?;
        best = (mid, achieved);
        if (achieved - target.moment).abs() <= tolerance {
            return Ok(result(mid, achieved, iteration));
        }
        if achieved < target.moment {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(result(best.0, best.1, MAX_ITERATIONS))
}

/// Calibrated parameters keyed by `(sidedness, n_rows)`. 2-sided blocks fall
/// back to the source parameter when not calibrated.
#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationTable {
    pub theta: f64,
    pub entries: BTreeMap<(Sidedness, usize), CalibrationResult>,
}

const CSV_HEADER: &str = "sidedness,n_rows,theta_star,target,achieved,stderr,iterations";

impl CalibrationTable {
    pub fn new(theta: f64) -> Self {
        Self { theta, entries: BTreeMap::new() }
    }

    pub fn insert(&mut self, r: CalibrationResult) {
        self.entries.insert((r.sidedness, r.n_rows), r);
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# theta={}\n{CSV_HEADER}\n", self.theta);
        for r in self.entries.values() {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.sidedness.index(),
                r.n_rows,
                r.theta_star,
                r.target_moment,
                r.achieved_moment,
                r.stderr,
                r.iterations
            )
            .unwrap();
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |m: String| Error::Calibration(m);
        let mut theta = None;
        let mut entries = BTreeMap::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line == CSV_HEADER {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("theta=") {
                    theta = Some(v.parse::<f64>().map_err(|e| bad(format!("line {}: {e}", ln + 1)))?);
                }
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(bad(format!("line {}: expected 7 fields", ln + 1)));
            }
            let num = |i: usize| f[i].trim().parse::<f64>().map_err(|e| bad(format!("line {}: {e}", ln + 1)));
            let sidedness = Sidedness::from_index(num(0)? as u8).map_err(|e| bad(e.to_string()))?;
            let r = CalibrationResult {
                sidedness,
                n_rows: num(1)? as usize,
                theta_star: num(2)?,
                target_moment: num(3)?,
                achieved_moment: num(4)?,
                stderr: num(5)?,
                iterations: num(6)? as usize,
            };
            entries.insert((sidedness, r.n_rows), r);
        }
        let theta = theta.ok_or_else(|| bad("missing '# theta=' line".into()))?;
        Ok(Self { theta, entries })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

impl ParamSource for CalibrationTable {
    fn theta_star(&self, sidedness: Sidedness, n_rows: usize) -> Result<f64> {
        match self.entries.get(&(sidedness, n_rows)) {
            Some(r) => Ok(r.theta_star),
            None if sidedness == Sidedness::Two => Ok(self.theta),
            None => Err(Error::MissingCalibration { sidedness: sidedness.index() as u8, n_rows }),
        }
    }
}

/// Settings for calibrating a grid of block shapes from a corpus.
#[derive(Clone, Debug)]
pub struct CalibrationSettings {
    pub max_boundaries: usize,
    /// Statistical tolerance per statistic term; the target's standard error
    /// must be below a third of it.
    pub stat_tolerance_per_term: Option<f64>,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        Self { max_boundaries: DEFAULT_MAX_BOUNDARIES, stat_tolerance_per_term: None }
    }
}

pub fn calibrate_one(
    corpus: &[BinaryImage],
    sidedness: Sidedness,
    n_rows: usize,
    settings: &CalibrationSettings,
) -> Result<CalibrationResult> {
    let terms = statistic_terms(n_rows, corpus.first().map_or(1, |i| i.width()), sidedness);
    let stat_tol = settings.stat_tolerance_per_term.map(|t| t * terms as f64);
    let target = estimate_target_moment(corpus, n_rows, sidedness, stat_tol)?;
    let problem = CalibrationProblem::from_corpus(corpus, n_rows, sidedness, settings.max_boundaries)?;
    solve_theta_star(&problem, target, default_tolerance(&problem))
}

/// Calibrates every `(sidedness, n_rows)` pair. Pairs are independent and
/// solved in parallel; each entry carries its own error.
pub fn calibrate_grid(
    corpus: &[BinaryImage],
    keys: &[(Sidedness, usize)],
    settings: &CalibrationSettings,
) -> Vec<((Sidedness, usize), Result<CalibrationResult>)> {
    keys.par_iter().map(|&(s, n)| ((s, n), calibrate_one(corpus, s, n, settings))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gibbs::{gibbs_sample, GibbsSettings};

    #[test]
    fn zero_target_gives_zero_theta() {
        let dims = ImageDims::new(3, 4).unwrap();
        for side in [Sidedness::Zero, Sidedness::One] {
            let (problem, target) = CalibrationProblem::exact(dims, IsingParams::new(0.0).unwrap(), 1, side).unwrap();
            assert!(target.moment.abs() < 1e-12);
            let r = solve_theta_star(&problem, target, default_tolerance(&problem)).unwrap();
            assert_eq!(r.theta_star, 0.0);
        }
    }

    #[test]
    fn exact_single_row_band() {
        // one row of a 1x2 grid: the band is the whole grid
        let dims = ImageDims::new(1, 2).unwrap();
        let (problem, target) = CalibrationProblem::exact(dims, IsingParams::new(0.4).unwrap(), 1, Sidedness::Zero).unwrap();
        assert!((target.moment - 0.4f64.tanh()).abs() < 1e-12);
        let r = solve_theta_star(&problem, target, 1e-10).unwrap();
        assert!((r.theta_star - 0.4).abs() < 1e-8);
    }

    #[test]
    fn lone_row_overweights_coupling() {
        for w in [3, 4, 5] {
            let dims = ImageDims::new(3, w).unwrap();
            let (problem, target) = CalibrationProblem::exact(dims, IsingParams::new(0.4).unwrap(), 1, Sidedness::Zero).unwrap();
            let r = solve_theta_star(&problem, target, default_tolerance(&problem)).unwrap();
            assert!(r.theta_star > 0.4, "w={w}: {}", r.theta_star);
        }
    }

    #[test]
    fn bracket_failure() {
        let dims = ImageDims::new(2, 3).unwrap();
        let (problem, mut target) = CalibrationProblem::exact(dims, IsingParams::new(0.4).unwrap(), 1, Sidedness::Zero).unwrap();
        target.moment = 100.0;
        assert!(matches!(solve_theta_star(&problem, target, 1e-6), Err(Error::BracketFailure { .. })));
        target.moment = -1.0;
        assert!(matches!(solve_theta_star(&problem, target, 1e-6), Err(Error::BracketFailure { .. })));
    }

    #[test]
    fn moment_is_increasing() {
        let img = gibbs_sample(ImageDims::new(12, 10).unwrap(), IsingParams::new(0.4).unwrap(), GibbsSettings { burn_in_sweeps: 50, sweeps_between_samples: 5, rng_seed: 2 }, 3);
        for side in [Sidedness::Zero, Sidedness::One, Sidedness::Two] {
            let p = CalibrationProblem::from_corpus(&img, 2, side, 16).unwrap();
            let mut prev = f64::NEG_INFINITY;
            for k in 0..=40 {
                let m = p.achieved_moment(k as f64 * 0.05).unwrap();
                assert!(m > prev);
                prev = m;
            }
        }
    }

    #[test]
    fn zero_coupling_corpus() {
        let corpus = gibbs_sample(ImageDims::new(40, 40).unwrap(), IsingParams::new(0.0).unwrap(), GibbsSettings { burn_in_sweeps: 1, sweeps_between_samples: 1, rng_seed: 3 }, 6);
        let t = estimate_target_moment(&corpus, 2, Sidedness::Zero, None).unwrap();
        assert!(t.moment.abs() < 4.0 * t.stderr.max(1e-9));
        assert!(estimate_target_moment(&corpus, 2, Sidedness::Zero, Some(1e-6)).is_err());
        assert!(estimate_target_moment(&corpus, 40, Sidedness::One, None).is_err());
    }

    #[test]
    fn noisy_target_below_zero_clamps() {
        let corpus = gibbs_sample(ImageDims::new(30, 30).unwrap(), IsingParams::new(0.0).unwrap(), GibbsSettings { burn_in_sweeps: 1, sweeps_between_samples: 1, rng_seed: 3 }, 4);
        let problem = CalibrationProblem::from_corpus(&corpus, 2, Sidedness::Zero, 16).unwrap();
        let terms = problem.statistic_terms();
        let noisy = MomentTarget { moment: -1.0, stderr: 0.5, terms };
        assert_eq!(solve_theta_star(&problem, noisy, 1e-6).unwrap().theta_star, 0.0);
        let far = MomentTarget { moment: -1.0, stderr: 0.1, terms };
        assert!(matches!(solve_theta_star(&problem, far, 1e-6), Err(Error::BracketFailure { .. })));
    }

    #[test]
    fn matched_parameter_minimizes_divergence() {
        let dims = ImageDims::new(3, 3).unwrap();
        let params = IsingParams::new(0.5).unwrap();
        for side in [Sidedness::Zero, Sidedness::One] {
            let (problem, target) = CalibrationProblem::exact(dims, params, 1, side).unwrap();
            let r = solve_theta_star(&problem, target, 1e-10).unwrap();
            let law = EnumeratedBlockLaw::from_grid(dims, params, 1, side).unwrap();
            let d = law.divergence(r.theta_star).unwrap();
            for delta in [-0.01, 0.01] {
                assert!(law.divergence(r.theta_star + delta).unwrap() > d);
            }
        }
        // a 2-sided row is exactly the block model at the source parameter
        let law = EnumeratedBlockLaw::from_grid(dims, params, 1, Sidedness::Two).unwrap();
        assert!(law.divergence(0.5).unwrap().abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip() {
        let mut t = CalibrationTable::new(0.4);
        t.insert(CalibrationResult { sidedness: Sidedness::One, n_rows: 3, theta_star: 0.4512, target_moment: 1234.5, achieved_moment: 1234.49, iterations: 14, stderr: 0.7 });
        t.insert(CalibrationResult { sidedness: Sidedness::Zero, n_rows: 1, theta_star: 0.7, target_moment: 120.0, achieved_moment: 120.01, iterations: 12, stderr: 0.2 });
        let back = CalibrationTable::from_csv(&t.to_csv()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.theta_star(Sidedness::Two, 5).unwrap(), 0.4);
        assert!(back.theta_star(Sidedness::Zero, 2).is_err());
        assert!(CalibrationTable::from_csv("sidedness\n1,2,3").is_err());
    }
}
