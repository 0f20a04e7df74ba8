//! Experiment configuration, TOML.
//!
//! ```toml
//! kind = "pg-exact"          # optional; must agree with the CLI kind
//! seeds = [1, 2, 3]          # optional; `--seeds` overrides
//! out = "runs/pg-exact"      # optional; `--out` overrides
//!
//! [instance]                 # exactly one of preset, file, inline
//! preset = "four-dim"        # one-step-scalar | scalar-five-step | four-dim
//! # file = "instance.toml"   # relative to this file
//! # [instance.inline]        # the lqr-core instance schema
//!
//! [ac]                       # Almgren-Chriss parameters, for liquidation
//! gamma = 7.27e-6            # kinds or as an LQR instance source
//! beta = 1.03e-5
//! sigma = 0.107
//! phi = 5e-6
//! epsilon = 1e-8
//! horizon = 10
//! q0 = 500.0
//! q0_sd = 1.0
//! s0 = 200.0
//!
//! [policy0]
//! constant = 0.05            # every gain entry
//! jitter = 0.0               # optional N(0, jitter²) per entry, seeded
//!
//! [descent]                  # step_size, max_iters, line_search, ...
//! [smoothing]                # radius, trajectories
//! [projection]               # kind = "unconstrained" | "liquidation" | "box"
//! [lob]                      # synthetic book, eval_paths, train_paths, csv
//! [qlearn]                   # state_bins, action_bins, eta, sweeps, eval_every, eval_rollouts
//! [sweep]                    # horizons, paths
//! [estimate]                 # trades | synthetic, tick, mean_queue
//! ```

use std::path::{Path, PathBuf};

use lqrlab_core::config::InstanceConfig;
use lqrlab_core::{presets, LqrInstance, Mat, PolicySequence};
use lqrlab_liquidation::{ac_to_lqr, AcParams, SyntheticBookConfig};
use lqrlab_opt::{DescentConfig, ProjectionSet};
use lqrlab_zo::SmoothingConfig;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Riccati,
    PgExact,
    PgZeroth,
    PpgExact,
    PpgZeroth,
    LiquidateLqr,
    LiquidateLob,
    EstimateParams,
    QlearnCompare,
    DeadlineSweep,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Riccati => "riccati",
            ExperimentKind::PgExact => "pg-exact",
            ExperimentKind::PgZeroth => "pg-zeroth",
            ExperimentKind::PpgExact => "ppg-exact",
            ExperimentKind::PpgZeroth => "ppg-zeroth",
            ExperimentKind::LiquidateLqr => "liquidate-lqr",
            ExperimentKind::LiquidateLob => "liquidate-lob",
            ExperimentKind::EstimateParams => "estimate-params",
            ExperimentKind::QlearnCompare => "qlearn-compare",
            ExperimentKind::DeadlineSweep => "deadline-sweep",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSection {
    pub preset: Option<String>,
    pub file: Option<PathBuf>,
    pub inline: Option<InstanceConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyInit {
    pub constant: f64,
    #[serde(default)]
    pub jitter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LobSection {
    pub synthetic: SyntheticBookConfig,
    /// Fixed paths averaged by the training monitor.
    #[serde(default = "default_train_paths")]
    pub train_paths: usize,
    /// Held-out paths for the AC comparison.
    #[serde(default = "default_eval_paths")]
    pub eval_paths: usize,
    /// Optional recorded snapshots, replayed in windows of `T+1` for evaluation.
    pub csv: Option<PathBuf>,
}

fn default_train_paths() -> usize {
    64
}
fn default_eval_paths() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QlearnSection {
    pub state_bins: usize,
    pub action_bins: usize,
    pub eta: f64,
    pub sweeps: usize,
    #[serde(default = "default_eval_every")]
    pub eval_every: usize,
    #[serde(default = "default_eval_rollouts")]
    pub eval_rollouts: usize,
}

fn default_eval_every() -> usize {
    10
}
fn default_eval_rollouts() -> usize {
    20_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub horizons: Vec<usize>,
    #[serde(default = "default_eval_paths")]
    pub paths: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticTrades {
    pub gamma: f64,
    pub sigma: f64,
    pub mfi_sd: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateSection {
    /// CSV with header `delta_s,mfi`.
    pub trades: Option<PathBuf>,
    pub synthetic: Option<SyntheticTrades>,
    pub tick: f64,
    pub mean_queue: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Option<ExperimentKind>,
    pub seeds: Option<Vec<u64>>,
    pub out: Option<PathBuf>,
    pub instance: Option<InstanceSection>,
    pub ac: Option<AcParams>,
    pub policy0: Option<PolicyInit>,
    pub descent: Option<DescentConfig>,
    pub smoothing: Option<SmoothingConfig>,
    pub projection: Option<ProjectionSet>,
    pub lob: Option<LobSection>,
    pub qlearn: Option<QlearnSection>,
    pub sweep: Option<SweepSection>,
    pub estimate: Option<EstimateSection>,
    /// Directory that relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

pub fn require<'a, T>(v: &'a Option<T>, section: &str) -> Result<&'a T, HarnessError> {
    v.as_ref().ok_or_else(|| HarnessError::config(format!("missing [{section}] section")))
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self, HarnessError> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| HarnessError::config(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// The LQR instance from `[instance]` or, failing that, from `[ac]`.
    pub fn lqr_instance(&self) -> Result<LqrInstance, HarnessError> {
        match (&self.instance, &self.ac) {
            (Some(_), Some(_)) => Err(HarnessError::config("give either [instance] or [ac], not both")),
            (None, Some(ac)) => Ok(ac_to_lqr(ac)?),
            (None, None) => Err(HarnessError::config("missing [instance] section")),
            (Some(sec), None) => match (&sec.preset, &sec.file, &sec.inline) {
                (Some(name), None, None) => presets::by_name(name).ok_or_else(|| {
                    HarnessError::config(format!("unknown preset {name:?}, known: {:?}", presets::NAMES))
                }),
                (None, Some(file), None) => {
                    let path = self.resolve(file);
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| HarnessError::config(format!("{}: {e}", path.display())))?;
                    Ok(LqrInstance::from_toml_str(&text)?)
                }
                (None, None, Some(inline)) => Ok(inline.build()?),
                _ => Err(HarnessError::config("[instance] needs exactly one of preset, file, inline")),
            },
        }
    }

    pub fn descent(&self) -> Result<DescentConfig, HarnessError> {
        let d = require(&self.descent, "descent")?.clone();
        d.validate()?;
        Ok(d)
    }

    pub fn projection(&self) -> ProjectionSet {
        self.projection.clone().unwrap_or(ProjectionSet::Unconstrained)
    }

    /// Initial policy for `seed`, shaped like `inst` gains.
    pub fn policy0(&self, inst: &LqrInstance, seed: u64) -> Result<PolicySequence, HarnessError> {
        let init = require(&self.policy0, "policy0")?;
        policy_from_init(init, inst.horizon(), inst.control_dim(), inst.state_dim(), seed)
    }
}

pub fn policy_from_init(
    init: &PolicyInit,
    horizon: usize,
    k: usize,
    d: usize,
    seed: u64,
) -> Result<PolicySequence, HarnessError> {
    if !(init.constant.is_finite() && init.jitter >= 0.0 && init.jitter.is_finite()) {
        return Err(HarnessError::config("policy0 constant and jitter must be finite, jitter >= 0"));
    }
    let mut rng = lqrlab_core::rng_for(lqrlab_core::derive_seed(seed, &[0x5eed]));
    let gains = (0..horizon)
        .map(|_| {
            Mat::from_fn(k, d, |_, _| {
                let z: f64 = if init.jitter > 0.0 { rng.sample(StandardNormal) } else { 0.0 };
                init.constant + init.jitter * z
            })
        })
        .collect();
    Ok(PolicySequence::new(gains)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_pg_config() {
        let text = r#"
            seeds = [1, 2]
            [instance]
            preset = "four-dim"
            [policy0]
            constant = 0.05
            [descent]
            step_size = 5e-4
            max_iters = 80
        "#;
        let cfg = ExperimentConfig::from_toml_str(text, Path::new(".")).unwrap();
        let inst = cfg.lqr_instance().unwrap();
        assert_eq!(inst.state_dim(), 4);
        let k0 = cfg.policy0(&inst, 1).unwrap();
        assert_eq!(k0.shape(), (2, 4));
        assert_eq!(k0[3][(1, 2)], 0.05);
        assert_eq!(cfg.descent().unwrap().max_iters, 80);
    }

    #[test]
    fn rejects_unknown_fields_and_double_sources() {
        assert!(ExperimentConfig::from_toml_str("bogus = 1", Path::new(".")).is_err());
        let text = r#"
            [instance]
            preset = "four-dim"
            [ac]
            gamma = 1e-6
            beta = 1e-5
            sigma = 0.1
            phi = 0.0
            epsilon = 0.0
            horizon = 3
            q0 = 10.0
            s0 = 1.0
        "#;
        let cfg = ExperimentConfig::from_toml_str(text, Path::new(".")).unwrap();
        assert!(matches!(cfg.lqr_instance(), Err(HarnessError::Config(_))));
    }

    #[test]
    fn jitter_depends_on_seed() {
        let init = PolicyInit { constant: 0.0, jitter: 0.1 };
        let a = policy_from_init(&init, 3, 1, 2, 1).unwrap();
        let b = policy_from_init(&init, 3, 1, 2, 2).unwrap();
        assert_ne!(a, b);
        assert_eq!(a, policy_from_init(&init, 3, 1, 2, 1).unwrap());
    }
}
