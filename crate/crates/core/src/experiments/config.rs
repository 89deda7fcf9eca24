use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cadlag::TargetSet;
use crate::error::{config, Error, Result};
use crate::estimate::DEFAULT_BATCH_SIZE;
use crate::jump_opt::Corridor;
use crate::levy_model::{LevyModel, SlowVar, SmallJump, TailModel};
use crate::simulate::IncrementModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    ModerateJumps,
    OuBarrier,
    MultipleOptima,
    LdpSlope,
    Corridor,
    Subordination,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::ModerateJumps => "moderate_jumps",
            Scenario::OuBarrier => "ou_barrier",
            Scenario::MultipleOptima => "multiple_optima",
            Scenario::LdpSlope => "ldp_slope",
            Scenario::Corridor => "corridor",
            Scenario::Subordination => "subordination",
        }
    }
}

fn default_slowvar() -> String {
    "constant".into()
}

fn default_batch() -> u64 {
    DEFAULT_BATCH_SIZE
}

fn default_limit_samples() -> u64 {
    1_000_000
}

fn default_dump() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosConfig {
    pub c: f64,
    pub alpha: f64,
    #[serde(default = "default_slowvar")]
    pub slowvar: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NegConfig {
    pub c: f64,
    pub beta: f64,
    #[serde(default = "default_slowvar")]
    pub slowvar: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmallJumpConfig {
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncrementConfig {
    pub c_plus: f64,
    pub alpha: f64,
    pub c_minus: f64,
    pub beta: f64,
    pub x0: f64,
}

/// Parameters of the scenario's target set; each scenario reads its own keys.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub kappa: Option<f64>,
    pub a_plus: Option<f64>,
    pub a_minus: Option<f64>,
    pub kind: Option<String>,
    pub level: Option<f64>,
    pub strict: Option<bool>,
    pub knots: Option<Vec<f64>>,
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
    pub corridor_csv: Option<String>,
    pub max_j: Option<u32>,
    pub max_k: Option<u32>,
}

/// Acceptance bands; a missing key means the check is skipped.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bands {
    pub ratio_min: Option<f64>,
    pub ratio_max: Option<f64>,
    #[serde(default)]
    pub monotone: bool,
    pub slope_min: Option<f64>,
    pub slope_max: Option<f64>,
    pub ks_max: Option<f64>,
    pub constant_sigmas: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub seed: u64,
    #[serde(default)]
    pub n_list: Vec<u64>,
    #[serde(default)]
    pub samples_per_n: u64,
    pub output_dir: String,
    #[serde(default = "default_batch")]
    pub batch_size: u64,
    pub grid: Option<usize>,
    #[serde(default = "default_limit_samples")]
    pub limit_samples: u64,
    #[serde(default = "default_dump")]
    pub dump_paths: usize,
    pub ks_samples: Option<u64>,
    pub pos: Option<PosConfig>,
    pub neg: Option<NegConfig>,
    #[serde(default)]
    pub drift: f64,
    #[serde(default)]
    pub sigma: f64,
    pub smalljump: Option<SmallJumpConfig>,
    pub increments: Option<IncrementConfig>,
    #[serde(default)]
    pub target: TargetConfig,
    #[serde(default)]
    pub bands: Bands,
    /// Directory of the config file; relative paths inside it resolve here.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// `"constant"` or `"log_power:p"`.
pub fn parse_slowvar(s: &str) -> Result<SlowVar> {
    let s = s.trim();
    if s == "constant" {
        return Ok(SlowVar::Constant);
    }
    if let Some(p) = s.strip_prefix("log_power:") {
        let p: f64 = p.trim().parse().map_err(|_| config(format!("bad log_power exponent in {s:?}")))?;
        return Ok(SlowVar::LogPower(p));
    }
    Err(config(format!("slowvar must be \"constant\" or \"log_power:<p>\", got {s:?}")))
}

fn as_config(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| config(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn resolve(&self, rel: &str) -> PathBuf {
        let p = Path::new(rel);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Checks the invariants shared by the sampling scenarios.
    pub fn validate_sampling(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(config("n_list must be nonempty"));
        }
        if self.n_list.iter().any(|&n| n == 0) || self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config("n_list must be positive and strictly increasing"));
        }
        if self.samples_per_n == 0 {
            return Err(config("samples_per_n must be >= 1"));
        }
        if self.batch_size == 0 {
            return Err(config("batch_size must be >= 1"));
        }
        Ok(())
    }

    pub fn grid_for(&self, n: u64) -> usize {
        self.grid.unwrap_or(0).max(crate::simulate::default_grid(n))
    }

    pub fn levy_model(&self) -> Result<LevyModel> {
        let pos = self.pos.as_ref().ok_or_else(|| config("missing [pos] table"))?;
        let pos = TailModel::new(pos.c, pos.alpha, parse_slowvar(&pos.slowvar)?).map_err(as_config)?;
        let neg = match &self.neg {
            Some(n) => Some(TailModel::new(n.c, n.beta, parse_slowvar(&n.slowvar)?).map_err(as_config)?),
            None => None,
        };
        let small = match &self.smalljump {
            Some(s) => SmallJump::GaussianApprox(s.eps),
            None => SmallJump::None,
        };
        LevyModel::new(pos, neg, self.drift, self.sigma, small).map_err(as_config)
    }

    pub fn increment_model(&self) -> Result<IncrementModel> {
        let i = self.increments.as_ref().ok_or_else(|| config("missing [increments] table"))?;
        IncrementModel::new(i.c_plus, i.alpha, i.c_minus, i.beta, i.x0).map_err(as_config)
    }

    pub fn corridor(&self) -> Result<Corridor> {
        let t = &self.target;
        match (&t.corridor_csv, &t.knots, &t.lower, &t.upper) {
            (Some(path), None, None, None) => {
                let p = self.resolve(path);
                let text = std::fs::read_to_string(&p).map_err(|e| config(format!("{}: {e}", p.display())))?;
                Corridor::from_csv(&text).map_err(as_config)
            }
            (None, Some(k), Some(l), Some(u)) => Corridor::new(k.clone(), l.clone(), u.clone()).map_err(as_config),
            _ => Err(config("corridor needs either target.corridor_csv or target.knots/lower/upper")),
        }
    }

    pub fn need(&self, v: Option<f64>, key: &str) -> Result<f64> {
        v.ok_or_else(|| config(format!("missing target.{key}")))
    }

    /// Target set for `ldp_slope`: `kind` is `terminal_above`, `corridor`
    /// (the interior is used, since the set must be open) or `all`.
    pub fn ldp_set(&self) -> Result<TargetSet> {
        match self.target.kind.as_deref().unwrap_or("terminal_above") {
            "terminal_above" => {
                let level = self.need(self.target.level, "level")?;
                Ok(TargetSet::terminal_above(level, self.target.strict.unwrap_or(true)))
            }
            "corridor" => Ok(TargetSet::corridor(self.corridor()?, true)),
            "all" => Ok(TargetSet::all()),
            other => Err(config(format!("unknown target.kind {other:?}"))),
        }
    }
}

/// A list of scenario configs checked together by `verify`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub configs: Vec<String>,
}

impl SuiteConfig {
    pub fn load(path: &Path) -> Result<Vec<ScenarioConfig>> {
        let text = std::fs::read_to_string(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
        let suite: SuiteConfig = toml::from_str(&text).map_err(|e| config(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        suite.configs.iter().map(|c| ScenarioConfig::load(&base.join(c))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
scenario = "ldp_slope"
seed = 3
n_list = [10, 20]
samples_per_n = 100
output_dir = "out"

[pos]
c = 1.0
alpha = 2.0

[target]
level = 1.0
"#;

    #[test]
    fn parses_and_builds_model() {
        let cfg = ScenarioConfig::from_toml(BASIC).unwrap();
        assert_eq!(cfg.scenario, Scenario::LdpSlope);
        assert_eq!(cfg.batch_size, DEFAULT_BATCH_SIZE);
        cfg.validate_sampling().unwrap();
        let m = cfg.levy_model().unwrap();
        assert!(m.neg.is_none());
        assert!(cfg.ldp_set().unwrap().terminal_only());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = BASIC.replace("seed = 3", "seed = 3\nsede = 4");
        assert!(matches!(ScenarioConfig::from_toml(&bad), Err(Error::Config(_))));
        let bad = BASIC.replace("alpha = 2.0", "alpha = 2.0\nbeta = 3.0");
        assert!(ScenarioConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn slowvar_strings() {
        assert_eq!(parse_slowvar("constant").unwrap(), SlowVar::Constant);
        assert_eq!(parse_slowvar("log_power:1.5").unwrap(), SlowVar::LogPower(1.5));
        assert!(parse_slowvar("log").is_err());
    }

    #[test]
    fn sampling_invariants() {
        let mut cfg = ScenarioConfig::from_toml(BASIC).unwrap();
        cfg.n_list = vec![20, 10];
        assert!(cfg.validate_sampling().is_err());
        cfg.n_list = vec![10];
        cfg.samples_per_n = 0;
        assert!(cfg.validate_sampling().is_err());
    }

    #[test]
    fn model_errors_become_config_errors() {
        let bad = BASIC.replace("alpha = 2.0", "alpha = 0.5");
        let cfg = ScenarioConfig::from_toml(&bad).unwrap();
        assert!(matches!(cfg.levy_model(), Err(Error::Config(_))));
    }
}
