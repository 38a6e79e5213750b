//! Pipeline configuration: defaults, `key = value` config files and flag
//! overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use citeclass::{Format, LayoutOptions, Measure, Transform};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    None,
    Log,
    Arcsinh,
}

impl FromStr for TransformKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "raw" => Ok(TransformKind::None),
            "log" => Ok(TransformKind::Log),
            "arcsinh" | "asinh" => Ok(TransformKind::Arcsinh),
            other => bail!("unknown transform `{other}` (expected none, log or arcsinh)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorCount {
    /// Retain components with eigenvalue above 1.
    Kaiser,
    Fixed(usize),
}

impl FromStr for FactorCount {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("kaiser") {
            return Ok(FactorCount::Kaiser);
        }
        match s.parse::<usize>() {
            Ok(k) if k > 0 => Ok(FactorCount::Fixed(k)),
            _ => bail!("factor count must be `kaiser` or a positive integer, got `{s}`"),
        }
    }
}

impl fmt::Display for FactorCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorCount::Kaiser => f.write_str("kaiser"),
            FactorCount::Fixed(k) => write!(f, "{k}"),
        }
    }
}

/// Layout starts per component. Lower than the library default because each
/// start on a strongly correlated matrix can run to the relaxation cap.
pub const CLI_RESTARTS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input: Option<PathBuf>,
    /// Guessed from the input extension when unset.
    pub format: Option<Format>,
    pub transform: TransformKind,
    pub log_base: f64,
    pub offset: f64,
    pub measure: Measure,
    pub factors: FactorCount,
    pub rotate: bool,
    pub suppress: f64,
    pub decimals: usize,
    /// Minimum similarity for an edge of the map.
    pub threshold: f64,
    pub powerlaw_base: f64,
    pub exclude_head: usize,
    pub head_threshold: f64,
    /// Layout seed; also seeds `demo` when set.
    pub seed: Option<u64>,
    pub grad_tol: f64,
    /// Layout starts per component.
    pub restarts: usize,
    /// Node relaxations per start.
    pub max_outer: usize,
    pub out_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let layout = LayoutOptions::default();
        PipelineConfig {
            input: None,
            format: None,
            transform: TransformKind::Log,
            log_base: 10.0,
            offset: 1.0,
            measure: Measure::Pearson,
            factors: FactorCount::Kaiser,
            rotate: true,
            suppress: 0.1,
            decimals: 3,
            threshold: 0.0,
            powerlaw_base: 10.0,
            exclude_head: 0,
            head_threshold: citeclass::powerlaw::DEFAULT_HEAD_THRESHOLD,
            seed: None,
            grad_tol: layout.grad_tol,
            restarts: CLI_RESTARTS,
            max_outer: layout.max_outer,
            out_dir: PathBuf::from("out"),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow!("invalid value `{value}` for `{key}`: {e}"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => bail!("invalid value `{value}` for `{key}`: expected true or false"),
    }
}

impl PipelineConfig {
    /// Sets one field from its config-file key. Dashes and underscores are
    /// interchangeable in keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.replace('-', "_");
        match key.as_str() {
            "input" => self.input = Some(PathBuf::from(value)),
            "format" => self.format = Some(parse(&key, value)?),
            "transform" => self.transform = parse(&key, value)?,
            "log_base" => self.log_base = parse(&key, value)?,
            "offset" => self.offset = parse(&key, value)?,
            "measure" => self.measure = parse(&key, value)?,
            "factors" => self.factors = parse(&key, value)?,
            "rotate" => self.rotate = parse_bool(&key, value)?,
            "suppress" => self.suppress = parse(&key, value)?,
            "decimals" => self.decimals = parse(&key, value)?,
            "threshold" => self.threshold = parse(&key, value)?,
            "powerlaw_base" => self.powerlaw_base = parse(&key, value)?,
            "exclude_head" => self.exclude_head = parse(&key, value)?,
            "head_threshold" => self.head_threshold = parse(&key, value)?,
            "seed" => self.seed = Some(parse(&key, value)?),
            "grad_tol" => self.grad_tol = parse(&key, value)?,
            "restarts" => self.restarts = parse(&key, value)?,
            "max_outer" => self.max_outer = parse(&key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            _ => bail!("unknown config key `{key}`"),
        }
        Ok(())
    }

    /// Reads `key = value` lines. Blank lines and `#` comments are ignored;
    /// values may be wrapped in double quotes. Relative paths resolve against
    /// the file's directory.
    pub fn apply_text(&mut self, text: &str, base_dir: Option<&Path>) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", n + 1))?;
            let key = key.trim();
            let value = value.trim();
            let value = value
                .strip_prefix('"')
                .and_then(|v| v.strip_suffix('"'))
                .unwrap_or(value);
            self.set(key, value)
                .with_context(|| format!("line {}", n + 1))?;
            if let Some(dir) = base_dir {
                let k = key.replace('-', "_");
                if k == "input" || k == "out_dir" {
                    let p = PathBuf::from(value);
                    if p.is_relative() {
                        let joined = dir.join(p);
                        if k == "input" {
                            self.input = Some(joined);
                        } else {
                            self.out_dir = joined;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg = PipelineConfig::default();
        cfg.apply_text(&text, path.parent())
            .with_context(|| format!("in config {}", path.display()))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.log_base > 1.0 && self.log_base.is_finite()) {
            bail!(
                "log base must be a finite number above 1, got {}",
                self.log_base
            );
        }
        if !(self.offset >= 0.0 && self.offset.is_finite()) {
            bail!(
                "log offset must be finite and non-negative, got {}",
                self.offset
            );
        }
        if !(self.powerlaw_base > 1.0 && self.powerlaw_base.is_finite()) {
            bail!("powerlaw base must be above 1, got {}", self.powerlaw_base);
        }
        if self.suppress.is_nan() || self.suppress < 0.0 {
            bail!(
                "suppression threshold must be non-negative, got {}",
                self.suppress
            );
        }
        if !self.threshold.is_finite() {
            bail!("edge threshold must be finite");
        }
        if self.grad_tol.is_nan() || self.grad_tol <= 0.0 {
            bail!("layout tolerance must be positive");
        }
        Ok(())
    }

    pub fn transform(&self) -> Transform {
        match self.transform {
            TransformKind::None => Transform::None,
            TransformKind::Log => Transform::Log {
                base: self.log_base,
                offset: Some(self.offset),
            },
            TransformKind::Arcsinh => Transform::Arcsinh,
        }
    }

    /// The untransformed variant, followed by the transformed one unless the
    /// transform is `none`.
    pub fn variants(&self) -> Vec<Transform> {
        let t = self.transform();
        if t.is_none() {
            vec![Transform::None]
        } else {
            vec![Transform::None, t]
        }
    }

    pub fn layout_options(&self) -> LayoutOptions {
        let mut opts = LayoutOptions {
            grad_tol: self.grad_tol,
            restarts: self.restarts.max(1),
            max_outer: self.max_outer,
            ..LayoutOptions::default()
        };
        if let Some(seed) = self.seed {
            opts.seed = seed;
        }
        opts
    }

    pub fn input_format(&self, path: &Path) -> Result<Format> {
        match self.format {
            Some(f) => Ok(f),
            None => Format::from_path(path).ok_or_else(|| {
                anyhow!(
                    "cannot tell the format of {}; pass --format csv|tsv|pajek",
                    path.display()
                )
            }),
        }
    }
}
