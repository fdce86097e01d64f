//! `key=value` run configuration: defaults, then a config file, then flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use rowcode::harness::ExperimentConfig;
use rowcode::schemes::SchemeSpec;

/// Every recognized key with its default ("" means unset).
pub const KEYS: &[(&str, &str, &str)] = &[
    ("theta", "0.4", "source coupling"),
    ("height", "200", "image rows"),
    ("width", "200", "image columns"),
    ("images", "17", "corpus size"),
    ("seed", "0", "Gibbs chain seed of the corpus"),
    ("training_seed", "1", "Gibbs chain seed of the context-table training corpus"),
    ("burn_in", "2000", "burn-in sweeps"),
    ("spacing", "100", "sweeps between retained samples"),
    ("corpus", "", "directory of PBM images (generated from the settings above when unset)"),
    ("training_corpus", "", "directory of PBM training images (generated when unset)"),
    ("scheme", "model1", "model0 | model1 | rcc | empirical"),
    ("n_rows", "1", "block height of model0/model1"),
    ("line_rows", "1", "line height of rcc"),
    ("strip_rows", "1", "strip height of rcc"),
    ("context", "5", "context size of empirical"),
    ("calibration", "", "calibration CSV with the block parameters"),
    ("theta_star", "", "one block parameter for every block (instead of a calibration)"),
    ("table", "", "serialized context table (trained from the training corpus when unset)"),
    ("embed_table", "false", "store the context table in the stream"),
    ("max_rows", "8", "block heights 1..=max_rows in sweeps and calibration"),
    ("contexts", "1-8", "context sizes of the empirical sweep"),
    ("max_boundaries", "256", "boundary rows averaged over per calibration solve"),
    ("run_coder", "false", "also run the range coder in sweeps"),
    ("calibrate_two_sided", "false", "calibrate 2-sided blocks instead of using theta"),
    ("widths", "2-8", "strip widths of the exact checks"),
    ("lemma_cases", "100", "random chains for the divergence decomposition check"),
    ("orderings", "false", "also check the rate orderings on the corpus"),
    ("input", "", "input file"),
    ("out", "", "output file or directory"),
];

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

type Result<T> = std::result::Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConfigError(msg.into()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

fn parse_line(line: &str) -> Result<Option<(String, String)>> {
    let line = line.split('#').next().unwrap_or("").trim();
    if line.is_empty() {
        return Ok(None);
    }
    let (k, v) = line.split_once('=').ok_or_else(|| ConfigError(format!("expected key=value, got {line:?}")))?;
    Ok(Some((k.trim().to_string(), v.trim().to_string())))
}

impl RunConfig {
    pub fn defaults() -> Self {
        Self { values: KEYS.iter().map(|(k, v, _)| (k.to_string(), v.to_string())).collect() }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match self.values.get_mut(key) {
            Some(slot) => {
                *slot = value.to_string();
                Ok(())
            }
            None => err(format!("unknown key {key:?}")),
        }
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            if let Some((k, v)) = parse_line(line).map_err(|e| ConfigError(format!("line {}: {e}", n + 1)))? {
                self.set(&k, &v).map_err(|e| ConfigError(format!("line {}: {e}", n + 1)))?;
            }
        }
        Ok(())
    }

    /// Defaults, then the file, then `key=value` overrides in order.
    pub fn load(file: Option<&Path>, overrides: &[(String, String)]) -> anyhow::Result<Self> {
        let mut cfg = Self::defaults();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        for (k, v) in overrides {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    /// `key=value` lines, each prefixed by `prefix`.
    pub fn echo(&self, prefix: &str) -> String {
        self.values.iter().map(|(k, v)| format!("{prefix}{k}={v}\n")).collect()
    }

    fn raw(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).expect("known key")
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        let v = self.raw(key);
        v.parse().map_err(|e| ConfigError(format!("{key}={v:?}: {e}")))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        self.parse(key)
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        self.parse(key)
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        self.parse(key)
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        self.parse(key)
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        if self.raw(key).is_empty() {
            Ok(None)
        } else {
            self.f64(key).map(Some)
        }
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        let v = self.raw(key);
        (!v.is_empty()).then(|| PathBuf::from(v))
    }

    pub fn required_path(&self, key: &str) -> Result<PathBuf> {
        self.path(key).ok_or_else(|| ConfigError(format!("{key} is required")))
    }

    /// `1-8`, `1,3,5` or a mix such as `1-3,8`.
    pub fn list(&self, key: &str) -> Result<Vec<usize>> {
        let v = self.raw(key);
        let bad = |part: &str| ConfigError(format!("{key}: cannot read {part:?} as a number or range"));
        let mut out = Vec::new();
        for part in v.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.split_once('-') {
                Some((a, b)) => {
                    let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad(part))?, b.trim().parse().map_err(|_| bad(part))?);
                    if a > b {
                        return Err(bad(part));
                    }
                    out.extend(a..=b);
                }
                None => out.push(part.parse().map_err(|_| bad(part))?),
            }
        }
        if out.is_empty() {
            return err(format!("{key} is empty"));
        }
        Ok(out)
    }

    pub fn scheme(&self) -> Result<SchemeSpec> {
        let spec = match self.raw("scheme") {
            "model0" => SchemeSpec::Model0 { n_rows: self.usize("n_rows")? },
            "model1" => SchemeSpec::Model1 { n_rows: self.usize("n_rows")? },
            "rcc" | "rcc02" => SchemeSpec::Rcc02 { line_rows: self.usize("line_rows")?, strip_rows: self.usize("strip_rows")? },
            "empirical" | "empirical1" => SchemeSpec::Empirical1 { context: self.usize("context")? },
            other => return err(format!("unknown scheme {other:?}")),
        };
        spec.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(spec)
    }

    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let cfg = ExperimentConfig {
            theta: self.f64("theta")?,
            height: self.usize("height")?,
            width: self.usize("width")?,
            images: self.usize("images")?,
            corpus_seed: self.u64("seed")?,
            training_seed: self.u64("training_seed")?,
            burn_in_sweeps: self.usize("burn_in")?,
            sweeps_between_samples: self.usize("spacing")?,
            max_rows: self.usize("max_rows")?,
            contexts: self.list("contexts")?,
            max_boundaries: self.usize("max_boundaries")?,
            run_coder: self.bool("run_coder")?,
            calibrate_two_sided: self.bool("calibrate_two_sided")?,
        };
        cfg.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layering_and_errors() {
        let mut cfg = RunConfig::defaults();
        cfg.apply_text("# comment\ntheta = 0.2  # trailing\n\nscheme=rcc\nline_rows=2\n").unwrap();
        cfg.set("theta", "0.3").unwrap();
        assert_eq!(cfg.f64("theta").unwrap(), 0.3);
        assert_eq!(cfg.scheme().unwrap(), SchemeSpec::Rcc02 { line_rows: 2, strip_rows: 1 });
        assert!(cfg.set("thetta", "1").is_err());
        assert!(cfg.apply_text("no equals sign").is_err());
        cfg.set("n_rows", "x").unwrap();
        cfg.set("scheme", "model0").unwrap();
        assert!(cfg.scheme().is_err());
    }

    #[test]
    fn lists() {
        let mut cfg = RunConfig::defaults();
        assert_eq!(cfg.list("contexts").unwrap(), (1..=8).collect::<Vec<_>>());
        cfg.set("contexts", "1-3, 8").unwrap();
        assert_eq!(cfg.list("contexts").unwrap(), vec![1, 2, 3, 8]);
        cfg.set("contexts", "3-1").unwrap();
        assert!(cfg.list("contexts").is_err());
    }

    #[test]
    fn echo_reloads() {
        let mut cfg = RunConfig::defaults();
        cfg.set("out", "/tmp/x").unwrap();
        let mut back = RunConfig::defaults();
        back.apply_text(&cfg.echo("")).unwrap();
        assert_eq!(back, cfg);
    }
}
