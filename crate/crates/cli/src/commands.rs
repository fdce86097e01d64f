use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};

use rowcode::calibrate::CalibrationTable;
use rowcode::coder::Bitstream;
use rowcode::coder::SchemeId;
use rowcode::gibbs::GibbsSettings;
use rowcode::harness::exact::{identity_checks, strip_information_curve, ExactRates, RowProcess, DEFAULT_MARGIN};
use rowcode::harness::experiment::{calibrate_corpus, run_on_corpus};
use rowcode::harness::lemma::random_lemma_cases;
use rowcode::harness::{Corpus, ExperimentConfig, ExperimentResults};
use rowcode::pbm::{read_pbm, write_pbm};
use rowcode::schemes::empirical::{train_context_table, ContextTable};
use rowcode::schemes::{decode, encode, CodingReport, FixedTheta, ParamSource, SchemeSpec};
use rowcode::IsingParams;

use crate::config::{ConfigError, RunConfig};

/// Failed checks of `verify`.
#[derive(Debug)]
pub struct VerificationFailed(pub usize);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} checks failed", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn out_dir(cfg: &RunConfig) -> anyhow::Result<PathBuf> {
    let dir = cfg.required_path("out")?;
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(dir.join("config.txt"), cfg.echo("")).context("writing config.txt")?;
    Ok(dir)
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// The configured corpus directory, or a corpus generated from the settings.
fn corpus(cfg: &RunConfig, exp: &ExperimentConfig) -> anyhow::Result<Corpus> {
    match cfg.path("corpus") {
        Some(dir) => {
            let c = Corpus::load_dir(&dir, exp.theta)?;
            if c.is_empty() {
                bail!(ConfigError(format!("no .pbm images in {}", dir.display())));
            }
            Ok(c)
        }
        None => Ok(exp.corpus()?),
    }
}

fn calibration(cfg: &RunConfig, exp: &ExperimentConfig, corpus: &Corpus) -> anyhow::Result<CalibrationTable> {
    match cfg.path("calibration") {
        Some(path) => Ok(CalibrationTable::load(path)?),
        None => Ok(calibrate_corpus(exp, corpus)?),
    }
}

fn context_table(cfg: &RunConfig, context: usize) -> anyhow::Result<ContextTable> {
    if let Some(path) = cfg.path("table") {
        let table = ContextTable::from_bytes(&fs::read(&path).with_context(|| format!("reading {}", path.display()))?)?;
        if table.context_size() != context {
            bail!(ConfigError(format!("table has context size {}, scheme needs {context}", table.context_size())));
        }
        return Ok(table);
    }
    let training = match cfg.path("training_corpus") {
        Some(dir) => Corpus::load_dir(dir, cfg.f64("theta")?)?,
        None => {
            let exp = ExperimentConfig {
                theta: cfg.f64("theta")?,
                height: cfg.usize("height")?,
                width: cfg.usize("width")?,
                images: cfg.usize("images")?,
                training_seed: cfg.u64("training_seed")?,
                burn_in_sweeps: cfg.usize("burn_in")?,
                sweeps_between_samples: cfg.usize("spacing")?,
                ..ExperimentConfig::default()
            };
            exp.training_corpus()?
        }
    };
    Ok(train_context_table(&training.images, context)?)
}

fn report_line(r: &CodingReport) -> String {
    format!(
        "scheme={} pixels={} ideal_bits={:.3} coded_bits={} ideal_bpp={:.6} actual_bpp={:.6}",
        r.spec.label(),
        r.pixels,
        r.tally.model_bits,
        r.coded_bits,
        r.ideal_bpp(),
        r.actual_bpp()
    )
}

pub fn sample(cfg: &RunConfig) -> anyhow::Result<()> {
    let exp = ExperimentConfig { max_rows: 1, ..cfg.experiment()? };
    let dir = out_dir(cfg)?;
    let settings = GibbsSettings {
        burn_in_sweeps: exp.burn_in_sweeps,
        sweeps_between_samples: exp.sweeps_between_samples,
        rng_seed: exp.corpus_seed,
    };
    let corpus = Corpus::generate(exp.dims()?, IsingParams::new(exp.theta)?, exp.images, settings);
    let paths = corpus.save_dir(&dir)?;
    println!("wrote {} images to {}", paths.len(), dir.display());
    Ok(())
}

pub fn calibrate(cfg: &RunConfig) -> anyhow::Result<()> {
    let exp = cfg.experiment()?;
    let out = cfg.required_path("out")?;
    let corpus = corpus(cfg, &exp)?;
    let table = calibrate_corpus(&exp, &corpus)?;
    write(&out, &format!("{}{}", cfg.echo("# config "), table.to_csv()))?;
    for r in table.entries.values() {
        println!("sidedness={} n_rows={} theta_star={:.6}", r.sidedness.index(), r.n_rows, r.theta_star);
    }
    Ok(())
}

pub fn encode_cmd(cfg: &RunConfig) -> anyhow::Result<()> {
    let spec = cfg.scheme()?;
    let input = cfg.required_path("input")?;
    let out = cfg.required_path("out")?;
    let img = read_pbm(&input)?;
    let theta = cfg.f64("theta")?;
    let (params, table): (Box<dyn ParamSource>, Option<ContextTable>) = match spec {
        SchemeSpec::Empirical1 { context } => (Box::new(FixedTheta(0.0)), Some(context_table(cfg, context)?)),
        _ => match (cfg.path("calibration"), cfg.opt_f64("theta_star")?) {
            (Some(path), _) => (Box::new(CalibrationTable::load(path)?), None),
            (None, Some(t)) => (Box::new(FixedTheta(t)), None),
            (None, None) => bail!(ConfigError("model schemes need a calibration file or theta_star".into())),
        },
    };
    let enc = encode(&img, spec, theta, params.as_ref(), table.as_ref(), cfg.bool("embed_table")?)?;
    fs::write(&out, enc.to_bytes()).with_context(|| format!("writing {}", out.display()))?;
    println!("{}", report_line(&enc.report));
    Ok(())
}

pub fn decode_cmd(cfg: &RunConfig) -> anyhow::Result<()> {
    let input = cfg.required_path("input")?;
    let out = cfg.required_path("out")?;
    let data = fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
    let stream = Bitstream::from_bytes(&data)?;
    let table = if stream.header.scheme == SchemeId::Empirical1 && stream.table.is_none() {
        Some(context_table(cfg, stream.header.context as usize)?)
    } else {
        None
    };
    let (img, report) = decode(&data, table.as_ref())?;
    write_pbm(&out, &img)?;
    println!("{}", report_line(&report));
    Ok(())
}

fn experiment(cfg: &RunConfig) -> anyhow::Result<ExperimentResults> {
    let exp = cfg.experiment()?;
    let corpus = corpus(cfg, &exp)?;
    let cal = calibration(cfg, &exp, &corpus)?;
    Ok(run_on_corpus(&exp, &corpus, &cal)?)
}

pub fn sweep(cfg: &RunConfig) -> anyhow::Result<()> {
    let dir = out_dir(cfg)?;
    let results = experiment(cfg)?;
    write(&dir.join("calibration.csv"), &results.calibration.to_csv())?;
    write(&dir.join("rates.csv"), &results.rates_csv())?;
    write(&dir.join("fig2_params.csv"), &results.fig2_params_csv())?;
    write(&dir.join("fig3_model_rates.csv"), &results.fig3_model_rates_csv())?;
    write(&dir.join("fig4_1sided.csv"), &results.fig4_1sided_csv())?;
    println!("corpus={} rates written to {}", results.corpus_id, dir.display());
    Ok(())
}

pub fn analyze(cfg: &RunConfig) -> anyhow::Result<()> {
    let dir = out_dir(cfg)?;
    let results = experiment(cfg)?;
    write(&dir.join("redundancy.csv"), &results.redundancy_csv())?;

    // the information across wider strips is only available exactly, on a
    // narrow strip of the same source
    let width = results.config.width.min(rowcode::harness::exact::MAX_EXACT_WIDTH);
    let curve = strip_information_curve(width, results.config.params()?, results.config.max_rows, DEFAULT_MARGIN)?;
    let mut text = format!("# exact, width {width}\ngap_rows,info_bpp\n");
    for (k, v) in curve.iter().enumerate() {
        text.push_str(&format!("{},{v}\n", k + 1));
    }
    write(&dir.join("info_gap_exact.csv"), &text)?;

    let r = &results.redundancy;
    println!("h_inf_lower={:.6} stderr={:.6}", r.h_inf_lower.mean, r.h_inf_lower.stderr);
    println!("div_0m={:.6} stderr={:.6}", r.div_0m.mean, r.div_0m.stderr);
    println!("info_adjacent={:.6} stderr={:.6}", r.info_adjacent.mean, r.info_adjacent.stderr);
    let mut checks = String::from("check,value,target,tolerance,passed\n");
    if let Ok(values) = results.reproduction_checks() {
        for c in values {
            checks.push_str(&format!("{},{},{},{},{}\n", c.name, c.value, c.target, c.tolerance, c.passed()));
        }
    }
    write(&dir.join("reference_checks.csv"), &checks)?;
    Ok(())
}

pub fn verify(cfg: &RunConfig) -> anyhow::Result<()> {
    let theta = cfg.f64("theta")?;
    let params = IsingParams::new(theta)?;
    let mut ledger = String::new();
    let mut failed = 0;
    let mut record = |ok: bool, line: String| {
        if !ok {
            failed += 1;
        }
        ledger.push_str(&format!("{} {line}\n", if ok { "PASS" } else { "FAIL" }));
    };

    for width in cfg.list("widths")? {
        let process = RowProcess::new(width, params, DEFAULT_MARGIN)?;
        // the identities hold for any block parameters
        let rates = ExactRates::compute(&process, theta + 0.15, theta + 0.05, 3.min(width))?;
        for c in identity_checks(&rates, width, 1e-8) {
            record(c.passed(), format!("{}: {:.12} vs {:.12}", c.name, c.lhs, c.rhs));
        }
    }
    let cases = random_lemma_cases(cfg.usize("lemma_cases")?, 5, cfg.u64("seed")?);
    let worst = cases.iter().map(|c| (c.lhs - c.rhs).abs()).fold(0.0, f64::max);
    record(worst <= 1e-10, format!("divergence decomposition on {} random chains: max gap {worst:.3e}", cases.len()));

    if cfg.bool("orderings")? {
        let results = experiment(cfg)?;
        for c in results.orderings(3.0) {
            record(c.passed(), format!("{}: {:.6} +- {:.6}", c.name, c.estimate.mean, c.estimate.stderr));
        }
    }

    print!("{ledger}");
    if let Some(out) = cfg.path("out") {
        write(&out, &format!("{}{ledger}", cfg.echo("# config ")))?;
    }
    if failed > 0 {
        bail!(VerificationFailed(failed));
    }
    Ok(())
}
