//! Scenario configuration files (strict JSON).

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::entanglement::{product_state, ProductKind};
use crate::hamiltonian::SystemParams;
use crate::manifold::{TorusPoint, DEFAULT_DEGENERACY_TOL};
use crate::qstate::PureState2Q;

/// Amplitudes in a config may be off unit norm by this much; they are then
/// rescaled exactly.
pub const CONFIG_NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub initial: InitialSpec,
    pub params: SystemParams,
    pub grid: GridSpec,
    pub outputs: Vec<OutputKind>,
    /// Seed for sampled points; defaults to [`crate::manifold::FLATNESS_SEED`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Classification threshold on metric components.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degeneracy_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// `[[re, im]; 4]` over `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩`.
    Amplitudes([[f64; 2]; 4]),
    ProductState(ProductSpec),
}

/// Bloch angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductSpec {
    #[serde(default)]
    pub chi: f64,
    #[serde(default)]
    pub gamma_az: f64,
    pub kind: ProductKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Angles(AngleGrid),
    Time(TimeGrid),
}

/// Inclusive grids `θ ∈ [0, π]`, `φ ∈ [0, 2π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleGrid {
    pub theta_steps: usize,
    pub phi_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub time: TimeSpan,
    /// Replaces `params.h_z` for this sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_z: Option<f64>,
}

/// Inclusive `[t0, t1]` with `steps` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpan {
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Metric,
    Classify,
    ConcurrenceProfile,
    EvolvedStates,
}

fn invalid(path: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::ConfigInvalid { path: path.to_string(), message: message.into() }
}

fn finite(path: &str, v: f64) -> Result<(), ScenarioError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(path, "must be a finite number"))
    }
}

/// `n ≥ 2` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n).map(|i| lo + (hi - lo) * (i as f64 / last)).collect()
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            invalid(&path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ScenarioError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        finite("params.j", self.params.j)?;
        finite("params.h_z", self.params.h_z)?;
        finite("params.gamma", self.params.gamma)?;
        if self.params.gamma <= 0.0 {
            return Err(invalid("params.gamma", "must be positive"));
        }
        self.initial_state()?;
        match &self.grid {
            GridSpec::Angles(g) => {
                if g.theta_steps < 2 {
                    return Err(invalid("grid.theta_steps", "must be at least 2"));
                }
                if g.phi_steps < 2 {
                    return Err(invalid("grid.phi_steps", "must be at least 2"));
                }
            }
            GridSpec::Time(g) => {
                finite("grid.time.t0", g.time.t0)?;
                finite("grid.time.t1", g.time.t1)?;
                if g.time.steps < 2 {
                    return Err(invalid("grid.time.steps", "must be at least 2"));
                }
                if let Some(h) = g.h_z {
                    finite("grid.h_z", h)?;
                }
            }
        }
        for (i, kind) in self.outputs.iter().enumerate() {
            if self.outputs[..i].contains(kind) {
                return Err(invalid(&format!("outputs[{i}]"), "duplicate output kind"));
            }
        }
        if let Some(tol) = self.degeneracy_tol {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(invalid("degeneracy_tol", "must be a positive number"));
            }
        }
        Ok(())
    }

    pub fn initial_state(&self) -> Result<PureState2Q, ScenarioError> {
        match &self.initial {
            InitialSpec::Amplitudes(pairs) => {
                let amps = pairs.map(|[re, im]| Complex64::new(re, im));
                PureState2Q::with_tolerance(amps, CONFIG_NORM_TOL)
                    .and_then(|s| PureState2Q::normalized(s.amplitudes()))
                    .map_err(|e| invalid("initial.amplitudes", e.to_string()))
            }
            InitialSpec::ProductState(spec) => {
                finite("initial.product_state.chi", spec.chi)?;
                finite("initial.product_state.gamma_az", spec.gamma_az)?;
                Ok(product_state(spec.kind, spec.chi, spec.gamma_az))
            }
        }
    }

    /// Parameters actually used for the sweep, with any grid override applied.
    pub fn effective_params(&self) -> SystemParams {
        match &self.grid {
            GridSpec::Time(TimeGrid { h_z: Some(h), .. }) => SystemParams { h_z: *h, ..self.params },
            _ => self.params,
        }
    }

    pub fn degeneracy_tol(&self) -> f64 {
        self.degeneracy_tol.unwrap_or(DEFAULT_DEGENERACY_TOL)
    }

    /// Grid points in evaluation order (`θ` outer, `φ` inner for angle grids).
    pub fn grid_points(&self) -> Vec<TorusPoint> {
        match &self.grid {
            GridSpec::Angles(g) => {
                let phis = linspace(0.0, 2.0 * PI, g.phi_steps);
                linspace(0.0, PI, g.theta_steps)
                    .into_iter()
                    .flat_map(|th| phis.iter().map(move |&ph| TorusPoint::new(th, ph)))
                    .collect()
            }
            GridSpec::Time(g) => {
                let p = self.effective_params();
                linspace(g.time.t0, g.time.t1, g.time.steps)
                    .into_iter()
                    .map(|t| TorusPoint::new(2.0 * p.j * t, 2.0 * p.h_z * t))
                    .collect()
            }
        }
    }

    /// `θ` values of the concurrence profile.
    pub fn profile_thetas(&self) -> Vec<f64> {
        match &self.grid {
            GridSpec::Angles(g) => linspace(0.0, PI, g.theta_steps),
            GridSpec::Time(_) => self.grid_points().into_iter().map(|pt| pt.theta).collect(),
        }
    }
}
