//! Run configuration: defaults, `key = value` files and command-line
//! overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};
use zeta_strips::contour::TraceParams;
use zeta_strips::strips::T_LIMIT;
use zeta_strips::EvalParams;

use crate::exit::{coded, ExitKind};

pub const DEFAULT_T_MAX: f64 = 1e4;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub t_max: f64,
    /// Upper bound on the strip count; `None` keeps every strip whose top
    /// lies at or below `t_max`.
    pub m_max: Option<usize>,
    pub threads: usize,
    pub out_dir: PathBuf,
    pub cache_dir: PathBuf,
    pub eval: EvalParams,
    pub trace: TraceParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            t_max: DEFAULT_T_MAX,
            m_max: None,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            out_dir: PathBuf::from("out"),
            cache_dir: PathBuf::from("out/cache"),
            eval: EvalParams::default(),
            trace: TraceParams::default(),
        }
    }
}

/// Values given on the command line; `None` means "not given".
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub t_max: Option<f64>,
    pub m_max: Option<usize>,
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub precision: Option<f64>,
    pub config: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    coded(ExitKind::Usage, msg)
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected `key = value`", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| usage(format!("config key `{key}`: cannot parse `{value}`")))
}

impl RunConfig {
    /// Applies config-file entries on top of `self`.
    pub fn apply_file_entries(&mut self, entries: &BTreeMap<String, String>) -> Result<()> {
        for (k, v) in entries {
            match k.as_str() {
                "t_max" => self.t_max = parse(k, v)?,
                "m_max" => self.m_max = Some(parse(k, v)?),
                "threads" => self.threads = parse(k, v)?,
                "out" | "out_dir" => self.out_dir = PathBuf::from(v),
                "cache" | "cache_dir" => self.cache_dir = PathBuf::from(v),
                "precision" | "target_abs_error" => self.eval.target_abs_error = parse(k, v)?,
                "em_terms_factor" => self.eval.em_terms_factor = parse(k, v)?,
                "bernoulli_order" => self.eval.bernoulli_order = parse(k, v)?,
                "sigma_start" => self.trace.sigma_start = parse(k, v)?,
                "sigma_min" => self.trace.sigma_min = parse(k, v)?,
                "step" => self.trace.step = parse(k, v)?,
                "newton_tol" => self.trace.newton_tol = parse(k, v)?,
                "zero_radius" => self.trace.zero_radius = parse(k, v)?,
                "max_steps" => self.trace.max_steps = parse(k, v)?,
                other => return Err(usage(format!("unknown config key `{other}`"))),
            }
        }
        Ok(())
    }

    /// Defaults, then the config file, then command-line flags.
    pub fn resolve(over: &Overrides) -> Result<Self> {
        let mut cfg = Self::default();
        let mut cache_given = false;
        if let Some(path) = &over.config {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))
                .map_err(|e| coded(ExitKind::MissingInputs, format!("{e:#}")))?;
            let entries = parse_key_values(&text)?;
            cache_given = entries.contains_key("cache") || entries.contains_key("cache_dir");
            cfg.apply_file_entries(&entries)?;
        }
        if let Some(v) = over.t_max {
            cfg.t_max = v;
        }
        if let Some(v) = over.m_max {
            cfg.m_max = Some(v);
        }
        if let Some(v) = over.threads {
            cfg.threads = v;
        }
        if let Some(v) = &over.out_dir {
            cfg.out_dir = v.clone();
        }
        if let Some(v) = &over.cache_dir {
            cfg.cache_dir = v.clone();
            cache_given = true;
        }
        if !cache_given {
            cfg.cache_dir = cfg.out_dir.join("cache");
        }
        if let Some(v) = over.precision {
            cfg.eval.target_abs_error = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0 && self.t_max <= T_LIMIT) {
            return Err(usage(format!("t_max must lie in (0, {T_LIMIT}], got {}", self.t_max)));
        }
        if self.threads < 1 {
            return Err(usage("threads must be >= 1"));
        }
        if self.m_max == Some(0) {
            return Err(usage("m_max must be >= 1"));
        }
        self.trace.validate()?;
        Ok(())
    }

    /// Evaluator parameters for the strip pipeline; targets looser than the
    /// strict bound are refused there.
    pub fn strict_eval(&self) -> Result<EvalParams> {
        self.eval.validate()?;
        Ok(self.eval)
    }

    /// Hash of every setting that changes computed results. Thread count and
    /// directories are excluded.
    pub fn fingerprint(&self) -> String {
        let e = &self.eval;
        let p = &self.trace;
        let canonical = format!(
            "t_max={:?};m_max={:?};em={:?};K={};target={:?};sigma_start={:?};sigma_min={:?};step={:?};newton_tol={:?};zero_radius={:?};max_steps={}",
            self.t_max,
            self.m_max,
            e.em_terms_factor,
            e.bernoulli_order,
            e.target_abs_error,
            p.sigma_start,
            p.sigma_min,
            p.step,
            p.newton_tol,
            p.zero_radius,
            p.max_steps
        );
        hex(&Sha256::digest(canonical.as_bytes()))
    }

    pub fn out_path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn ensure_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).with_context(|| format!("creating directory {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exit::exit_kind;

    #[test]
    fn key_value_parsing() {
        let kv = parse_key_values("# comment\n t_max = 500 \n\nthreads=2 # trailing\n").unwrap();
        assert_eq!(kv["t_max"], "500");
        assert_eq!(kv["threads"], "2");
        assert!(parse_key_values("no equals sign").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "t_max = 500\nthreads = 3\nstep = 0.01\n").unwrap();
        let over = Overrides {
            t_max: Some(200.0),
            config: Some(path),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(&over).unwrap();
        assert_eq!(cfg.t_max, 200.0);
        assert_eq!(cfg.threads, 3);
        assert_eq!(cfg.trace.step, 0.01);
        assert_eq!(cfg.cache_dir, PathBuf::from("out/cache"));
    }

    #[test]
    fn invalid_values_are_usage_errors() {
        for over in [
            Overrides { t_max: Some(2e4), ..Default::default() },
            Overrides { threads: Some(0), ..Default::default() },
            Overrides { m_max: Some(0), ..Default::default() },
        ] {
            let err = RunConfig::resolve(&over).unwrap_err();
            assert_eq!(exit_kind(&err), ExitKind::Usage);
        }
        let mut cfg = RunConfig::default();
        let bad = parse_key_values("colour = blue").unwrap();
        assert!(cfg.apply_file_entries(&bad).is_err());
    }

    #[test]
    fn fingerprint_ignores_threads_and_paths() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.threads = 8;
        b.out_dir = PathBuf::from("elsewhere");
        assert_eq!(a.fingerprint(), b.fingerprint());
        b.t_max = 500.0;
        assert_ne!(a.fingerprint(), b.fingerprint());
    }
}
