//! TOML form of [`LqrInstance`]. Matrices are row-major nested arrays.
//!
//! ```toml
//! horizon = 2          # required with Q_stage/R_stage, implied by Q/R lists otherwise
//! A = [[1.0]]
//! B = [[0.2]]
//! Q_stage = [[0.2]]    # or Q = [[[..]], ...] with T+1 entries
//! Q_terminal = [[0.4]]
//! R = [[[0.1]], [[0.2]]]   # or R_stage = [[..]]
//! state_cost = "definite"  # "semidefinite" waives Q_t > 0
//!
//! [noise]
//! kind = "gaussian"    # gaussian | uniform-scaled | zero
//! factor = [[1.0]]     # default identity
//! scale = 0.316
//!
//! [init]
//! kind = "point-mass"  # gaussian | uniform-scaled | point-mass
//! mean = [1.0]         # default zeros
//! factor = [[1.0]]     # default identity
//! scale = 0.0
//! ```

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::instance::{InitKind, InitialStateModel, InstanceParts, LqrInstance, NoiseKind, NoiseModel, StateCostCheck};
use crate::linalg::{from_rows, to_rows, Mat};

pub type Rows = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(rename = "A")]
    pub a: Rows,
    #[serde(rename = "B")]
    pub b: Rows,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Rows>>,
    #[serde(rename = "Q_stage", default, skip_serializing_if = "Option::is_none")]
    pub q_stage: Option<Rows>,
    #[serde(rename = "Q_terminal", default, skip_serializing_if = "Option::is_none")]
    pub q_terminal: Option<Rows>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<Rows>>,
    #[serde(rename = "R_stage", default, skip_serializing_if = "Option::is_none")]
    pub r_stage: Option<Rows>,
    #[serde(default)]
    pub state_cost: StateCostCheck,
    pub noise: NoiseConfig,
    pub init: InitConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub kind: NoiseKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<Rows>,
    #[serde(default)]
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitConfig {
    pub kind: InitKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<Rows>,
    #[serde(default)]
    pub scale: f64,
}

fn mat(rows: &Rows, name: &str) -> Result<Mat, CoreError> {
    from_rows(rows).map_err(|e| CoreError::Config(format!("{name}: {e}")))
}

impl InstanceConfig {
    pub fn build(&self) -> Result<LqrInstance, CoreError> {
        let a = mat(&self.a, "A")?;
        let b = mat(&self.b, "B")?;
        let d = a.nrows();
        let q = match (&self.q, &self.q_stage, &self.q_terminal) {
            (Some(list), None, None) => list.iter().map(|m| mat(m, "Q")).collect::<Result<Vec<_>, _>>()?,
            (None, Some(stage), terminal) => {
                let horizon =
                    self.horizon.ok_or_else(|| CoreError::Config("horizon is required with Q_stage".into()))?;
                let stage = mat(stage, "Q_stage")?;
                let term = terminal.as_ref().map(|m| mat(m, "Q_terminal")).transpose()?;
                let mut q = vec![stage.clone(); horizon];
                q.push(term.unwrap_or(stage));
                q
            }
            _ => return Err(CoreError::Config("give either Q or Q_stage (+Q_terminal)".into())),
        };
        let r = match (&self.r, &self.r_stage) {
            (Some(list), None) => list.iter().map(|m| mat(m, "R")).collect::<Result<Vec<_>, _>>()?,
            (None, Some(stage)) => {
                let horizon = self.horizon.unwrap_or(q.len().saturating_sub(1));
                vec![mat(stage, "R_stage")?; horizon]
            }
            _ => return Err(CoreError::Config("give either R or R_stage".into())),
        };
        if let Some(h) = self.horizon {
            if r.len() != h || q.len() != h + 1 {
                return Err(CoreError::Config(format!(
                    "horizon {h} does not match {} Q and {} R matrices",
                    q.len(),
                    r.len()
                )));
            }
        }
        let factor = |f: &Option<Rows>, name| match f {
            Some(rows) => mat(rows, name),
            None => Ok(Mat::identity(d, d)),
        };
        let noise = NoiseModel {
            kind: self.noise.kind,
            factor: match self.noise.kind {
                NoiseKind::Zero => Mat::zeros(d, d),
                _ => factor(&self.noise.factor, "noise.factor")?,
            },
            scale: self.noise.scale,
        };
        let mean = DVector::from_vec(self.init.mean.clone().unwrap_or_else(|| vec![0.0; d]));
        let init = InitialStateModel {
            kind: self.init.kind,
            factor: match self.init.kind {
                InitKind::PointMass => Mat::zeros(d, d),
                _ => factor(&self.init.factor, "init.factor")?,
            },
            mean,
            scale: self.init.scale,
        };
        LqrInstance::new(InstanceParts { a, b, q, r, noise, init, state_cost: self.state_cost })
    }

    /// Explicit per-step form of an instance.
    pub fn from_instance(inst: &LqrInstance) -> Self {
        let p = inst.parts();
        let listed = |ms: &[Mat]| ms.iter().map(to_rows).collect::<Vec<_>>();
        Self {
            horizon: Some(inst.horizon()),
            a: to_rows(&p.a),
            b: to_rows(&p.b),
            q: Some(listed(&p.q)),
            q_stage: None,
            q_terminal: None,
            r: Some(listed(&p.r)),
            r_stage: None,
            state_cost: p.state_cost,
            noise: NoiseConfig {
                kind: p.noise.kind,
                factor: (p.noise.kind != NoiseKind::Zero).then(|| to_rows(&p.noise.factor)),
                scale: p.noise.scale,
            },
            init: InitConfig {
                kind: p.init.kind,
                mean: Some(p.init.mean.iter().copied().collect()),
                factor: (p.init.kind != InitKind::PointMass).then(|| to_rows(&p.init.factor)),
                scale: p.init.scale,
            },
        }
    }
}

impl LqrInstance {
    pub fn from_toml_str(s: &str) -> Result<Self, CoreError> {
        let cfg: InstanceConfig = toml::from_str(s).map_err(|e| CoreError::Config(e.to_string()))?;
        cfg.build()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&InstanceConfig::from_instance(self)).expect("instance config serializes")
    }
}

/// Used by downstream configs that embed `DMatrix` values.
pub fn rows_to_matrix(rows: &Rows) -> Result<DMatrix<f64>, CoreError> {
    mat(rows, "matrix")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn round_trip_presets() {
        for name in presets::NAMES {
            let inst = presets::by_name(name).unwrap();
            let text = inst.to_toml_string();
            let back = LqrInstance::from_toml_str(&text).unwrap();
            assert_eq!(back, inst, "{name}");
        }
    }

    #[test]
    fn stage_form_parses() {
        let text = r#"
            horizon = 2
            A = [[1.0]]
            B = [[0.2]]
            Q_stage = [[0.2]]
            Q_terminal = [[0.4]]
            R_stage = [[0.1]]
            [noise]
            kind = "gaussian"
            scale = 0.5
            [init]
            kind = "point-mass"
            mean = [1.0]
        "#;
        let inst = LqrInstance::from_toml_str(text).unwrap();
        assert_eq!(inst.horizon(), 2);
        assert_eq!(inst.q(2)[(0, 0)], 0.4);
        assert_eq!(inst.w()[(0, 0)], 0.25);
        assert_eq!(inst.sigma0()[(0, 0)], 1.0);
    }

    #[test]
    fn config_errors_are_reported() {
        let missing_horizon = r#"
            A = [[1.0]]
            B = [[1.0]]
            Q_stage = [[1.0]]
            R_stage = [[1.0]]
            [noise]
            kind = "zero"
            [init]
            kind = "point-mass"
        "#;
        assert!(matches!(LqrInstance::from_toml_str(missing_horizon), Err(CoreError::Config(_))));
        let unknown = "A = [[1.0]]\nB = [[1.0]]\nbogus = 1\n";
        assert!(matches!(LqrInstance::from_toml_str(unknown), Err(CoreError::Config(_))));
    }
}
