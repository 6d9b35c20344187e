//! Run configuration: defaults, `key = value` files, and command-line overrides.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use cavity_ghz::hilbert::Sign;
use cavity_ghz::protocol::{EprVariant, GhzMode, RecipeParams};
use serde::Serialize;

use crate::failure::Failure;

pub const DEFAULT_ALPHA: f64 = 2.0;
pub const DEFAULT_DIM: usize = 64;
pub const DEFAULT_CONVERGENCE_DIM: usize = 16;
pub const DEFAULT_SHOTS: u64 = 10_000;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_POINTS: usize = 33;

/// Every setting a subcommand may read. `None` means "not given"; defaults are
/// applied in [`RunConfig::resolve`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub alpha: Option<f64>,
    pub dim: Option<usize>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub gt: Option<f64>,
    pub gt_max: Option<f64>,
    pub phi: Option<f64>,
    pub delta_over_g: Option<Vec<f64>>,
    pub dispersive_phi: Option<f64>,
    pub points: Option<usize>,
    pub variant: Option<EprVariant>,
    pub sign: Option<Sign>,
    pub mode: Option<GhzMode>,
    pub output: Option<PathBuf>,
}

impl Overrides {
    /// Fills every unset field from `lower`.
    pub fn or(self, lower: Overrides) -> Overrides {
        Overrides {
            alpha: self.alpha.or(lower.alpha),
            dim: self.dim.or(lower.dim),
            shots: self.shots.or(lower.shots),
            seed: self.seed.or(lower.seed),
            gt: self.gt.or(lower.gt),
            gt_max: self.gt_max.or(lower.gt_max),
            phi: self.phi.or(lower.phi),
            delta_over_g: self.delta_over_g.or(lower.delta_over_g),
            dispersive_phi: self.dispersive_phi.or(lower.dispersive_phi),
            points: self.points.or(lower.points),
            variant: self.variant.or(lower.variant),
            sign: self.sign.or(lower.sign),
            mode: self.mode.or(lower.mode),
            output: self.output.or(lower.output),
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, Failure>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Failure::validation(key, format!("cannot parse {value:?}: {e}")))
}

/// Comma- or whitespace-separated list of reals.
pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, Failure> {
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

/// Parses flat `key = value` text; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Overrides, Failure> {
    let mut seen = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Failure::validation("config", format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim().to_ascii_lowercase().replace('-', "_");
        let value = value.trim().trim_matches('"').to_string();
        if seen.insert(key.clone(), value).is_some() {
            return Err(Failure::validation("config", format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
    }
    let mut o = Overrides::default();
    for (key, value) in &seen {
        let v = value.as_str();
        match key.as_str() {
            "alpha" => o.alpha = Some(parse_value(key, v)?),
            "dim" => o.dim = Some(parse_value(key, v)?),
            "shots" => o.shots = Some(parse_value(key, v)?),
            "seed" => o.seed = Some(parse_value(key, v)?),
            "gt" => o.gt = Some(parse_value(key, v)?),
            "gt_max" => o.gt_max = Some(parse_value(key, v)?),
            "phi" => o.phi = Some(parse_value(key, v)?),
            "delta_over_g" => o.delta_over_g = Some(parse_list(key, v)?),
            "dispersive_phi" => o.dispersive_phi = Some(parse_value(key, v)?),
            "points" => o.points = Some(parse_value(key, v)?),
            "variant" => o.variant = Some(parse_value(key, v)?),
            "sign" => o.sign = Some(parse_value(key, v)?),
            "mode" => o.mode = Some(parse_value(key, v)?),
            "output" => o.output = Some(PathBuf::from(v)),
            _ => return Err(Failure::validation("config", format!("unknown key `{key}`"))),
        }
    }
    Ok(o)
}

pub fn load_config(path: &Path) -> Result<Overrides, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::validation("config", format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Fully resolved and validated settings, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub alpha: f64,
    pub dim: usize,
    pub shots: u64,
    pub seed: u64,
    /// `None` selects the optimal probe time for the injected field.
    pub gt: Option<f64>,
    pub gt_max: Option<f64>,
    pub phi: f64,
    pub delta_over_g: Vec<f64>,
    pub dispersive_phi: f64,
    pub points: usize,
    pub variant: EprVariant,
    pub sign: Sign,
    pub mode: GhzMode,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

fn positive(name: &'static str, x: f64) -> Result<(), Failure> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Failure::validation(name, format!("must be positive and finite, got {x}")))
    }
}

impl RunConfig {
    pub fn resolve(o: Overrides, default_dim: usize) -> Result<RunConfig, Failure> {
        let cfg = RunConfig {
            alpha: o.alpha.unwrap_or(DEFAULT_ALPHA),
            dim: o.dim.unwrap_or(default_dim),
            shots: o.shots.unwrap_or(DEFAULT_SHOTS),
            seed: o.seed.unwrap_or(DEFAULT_SEED),
            gt: o.gt,
            gt_max: o.gt_max,
            phi: o.phi.unwrap_or(PI),
            delta_over_g: o.delta_over_g.unwrap_or_else(|| vec![50.0, 100.0, 200.0]),
            dispersive_phi: o.dispersive_phi.unwrap_or(PI / 16.0),
            points: o.points.unwrap_or(DEFAULT_POINTS),
            variant: o.variant.unwrap_or(EprVariant::PhiPlus),
            sign: o.sign.unwrap_or(Sign::Plus),
            mode: o.mode.unwrap_or(GhzMode::Atomic),
            output: o.output,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), Failure> {
        if self.alpha == 0.0 {
            return Err(Failure::validation("alpha", "the odd cat state at alpha = 0 is the zero vector"));
        }
        positive("alpha", self.alpha)?;
        if self.dim < 2 {
            return Err(Failure::validation("dim", format!("need at least 2 Fock levels, got {}", self.dim)));
        }
        if self.shots == 0 {
            return Err(Failure::validation("shots", "must be at least 1"));
        }
        if let Some(gt) = self.gt {
            positive("gt", gt)?;
        }
        if let Some(gt) = self.gt_max {
            positive("gt_max", gt)?;
        }
        if !self.phi.is_finite() {
            return Err(Failure::validation("phi", "must be finite"));
        }
        if self.delta_over_g.is_empty() {
            return Err(Failure::validation("delta_over_g", "list is empty"));
        }
        if let Some(bad) = self.delta_over_g.iter().find(|&&r| !r.is_finite() || r < 10.0) {
            return Err(Failure::validation("delta_over_g", format!("each entry must be >= 10, got {bad}")));
        }
        positive("dispersive_phi", self.dispersive_phi)?;
        if self.points < 2 {
            return Err(Failure::validation("points", format!("need at least 2, got {}", self.points)));
        }
        Ok(())
    }

    pub fn recipe(&self) -> RecipeParams {
        let mut p = RecipeParams::new(self.alpha, self.dim).with_phi(self.phi);
        p.gt = self.gt;
        p
    }
}
