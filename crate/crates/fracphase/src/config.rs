//! Run configuration: JSON in, validated simulation description out.
//!
//! The fractional order, time step, and scheme have no defaults on purpose;
//! only the auxiliary-variable shift and the snapshot cadence may be
//! omitted.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::caputo::TimeGrid;
use crate::coeff::Alpha;
use crate::error::{Error, Result};
use crate::schemes::SchemeKind;
use crate::spectral::{Grid2D, Model, ModelSpec};

/// Which periodic box the run lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainSpec {
    /// `[0, 2pi]^2` (coarsening examples)
    #[serde(rename = "zero_2pi")]
    Zero2Pi,
    /// `[-pi, pi]^2` (manufactured-solution example)
    #[serde(rename = "centered_pi")]
    CenteredPi,
}

/// Initial-condition selector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    Zero,
    SevenCircles,
    UniformRandom { lo: f64, hi: f64, seed: u64 },
    /// Zero initial data plus the manufactured source; the run tracks the
    /// error against the exact solution.
    Manufactured,
}

fn default_c0_shift() -> f64 {
    1.0
}

fn default_snapshots() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Model,
    pub scheme: SchemeKind,
    pub alpha: f64,
    pub epsilon: f64,
    pub nx: usize,
    pub ny: usize,
    pub domain: DomainSpec,
    pub dt: f64,
    pub t_final: f64,
    pub initial_condition: InitialCondition,
    #[serde(default = "default_c0_shift")]
    pub c0_shift: f64,
    /// 2/3-rule truncation of the transformed nonlinear terms; the
    /// reference setup runs plain collocation.
    #[serde(default)]
    pub dealias: bool,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_snapshots")]
    pub snapshots: usize,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run configs serialize")
    }

    pub fn validate(&self) -> Result<()> {
        Alpha::new(self.alpha)?;
        ModelSpec::new(self.model, self.epsilon)?;
        if self.scheme == SchemeKind::Imex && self.model != Model::AllenCahn {
            return Err(Error::config(
                "the implicit-explicit scheme supports the Allen-Cahn model only",
            ));
        }
        if self.initial_condition == InitialCondition::Manufactured {
            if self.model != Model::AllenCahn {
                return Err(Error::config(
                    "the manufactured problem is an Allen-Cahn configuration",
                ));
            }
            if self.domain != DomainSpec::CenteredPi {
                return Err(Error::config(
                    "the manufactured problem lives on the centered [-pi,pi]^2 box",
                ));
            }
        }
        if self.initial_condition == InitialCondition::SevenCircles
            && self.domain != DomainSpec::Zero2Pi
        {
            return Err(Error::config(
                "the seven-circle initial condition lives on [0, 2pi]^2",
            ));
        }
        if !(self.dt > 0.0 && self.t_final > 0.0) {
            return Err(Error::config("dt and t_final must be positive"));
        }
        let steps = self.t_final / self.dt;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) || steps.round() < 1.0 {
            return Err(Error::config(format!(
                "t_final/dt = {steps} must be a whole number of steps"
            )));
        }
        if !(self.c0_shift >= 0.0) {
            return Err(Error::config("c0_shift must be nonnegative"));
        }
        self.grid()?;
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    pub fn grid(&self) -> Result<Grid2D> {
        let two_pi = 2.0 * std::f64::consts::PI;
        match self.domain {
            DomainSpec::Zero2Pi => Grid2D::new(self.nx, self.ny, two_pi, two_pi, 0.0, 0.0),
            DomainSpec::CenteredPi => Grid2D::new(
                self.nx,
                self.ny,
                two_pi,
                two_pi,
                -std::f64::consts::PI,
                -std::f64::consts::PI,
            ),
        }
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.dt, self.n_steps())
    }

    pub fn model_spec(&self) -> Result<ModelSpec> {
        ModelSpec::new(self.model, self.epsilon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_json() -> String {
        r#"{
            "model": "allen_cahn",
            "scheme": "imex",
            "alpha": 0.9,
            "epsilon": 0.1,
            "nx": 64, "ny": 64,
            "domain": "zero_2pi",
            "dt": 0.01,
            "t_final": 1.0,
            "initial_condition": "seven_circles"
        }"#
        .to_string()
    }

    #[test]
    fn parses_with_defaults() {
        let cfg = RunConfig::from_json(&base_json()).unwrap();
        assert_eq!(cfg.c0_shift, 1.0);
        assert_eq!(cfg.snapshots, 10);
        assert_eq!(cfg.n_steps(), 100);
    }

    #[test]
    fn round_trips_semantically() {
        let cfg = RunConfig::from_json(&base_json()).unwrap();
        let again = RunConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn rejects_imex_cahn_hilliard() {
        let text = base_json().replace("allen_cahn", "cahn_hilliard");
        assert!(RunConfig::from_json(&text).is_err());
    }

    #[test]
    fn rejects_misplaced_manufactured() {
        // manufactured data on the [0,2pi]^2 box: wrong domain
        let text = base_json().replace("\"seven_circles\"", "\"manufactured\"");
        assert!(RunConfig::from_json(&text).is_err());
    }

    #[test]
    fn manufactured_on_centered_box_is_valid() {
        let text = base_json()
            .replace("\"seven_circles\"", "\"manufactured\"")
            .replace("zero_2pi", "centered_pi");
        assert!(RunConfig::from_json(&text).is_ok());
    }

    #[test]
    fn rejects_fractional_step_count() {
        let text = base_json().replace("\"dt\": 0.01", "\"dt\": 0.013");
        assert!(RunConfig::from_json(&text).is_err());
    }

    #[test]
    fn rejects_unknown_fields_and_missing_alpha() {
        let text = base_json().replace("\"alpha\": 0.9,", "\"alpha\": 0.9, \"bogus\": 1,");
        assert!(RunConfig::from_json(&text).is_err());
        let text = base_json().replace("\"alpha\": 0.9,", "");
        assert!(RunConfig::from_json(&text).is_err());
    }

    #[test]
    fn random_initial_condition_parses() {
        let text = base_json().replace(
            "\"seven_circles\"",
            r#"{"uniform_random": {"lo": -0.5, "hi": 0.5, "seed": 42}}"#,
        );
        let cfg = RunConfig::from_json(&text).unwrap();
        match cfg.initial_condition {
            InitialCondition::UniformRandom { seed, .. } => assert_eq!(seed, 42),
            other => panic!("unexpected initial condition {other:?}"),
        }
    }
}
