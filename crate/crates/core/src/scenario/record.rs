use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::config::{OutputKind, ScenarioConfig};
use super::ScenarioError;
use crate::entanglement::{concurrence, concurrence_profile, ConcurrenceProfile};
use crate::manifold::{
    classify_seeded, evolve_family, family_invariants, metric_analytic, metric_numeric, sample_points, shear,
    ManifoldReport, MetricTensor2, DEFAULT_FD_STEP, FLATNESS_SEED,
};
use crate::qstate::PureState2Q;

pub const SCHEMA_VERSION: &str = "spin-torus.run-record/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRecord {
    pub schema_version: String,
    pub config: ScenarioConfig,
    pub results: Vec<OutputResult>,
    /// Non-fatal annotations, such as an undefined shear.
    pub warnings: Vec<String>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub library_version: String,
    pub seed: u64,
    /// Seconds since the Unix epoch. Not part of the reproducible content.
    pub generated_at_unix: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputResult {
    Metric(MetricOutput),
    Classify(ManifoldReport),
    ConcurrenceProfile(ConcurrenceProfile),
    EvolvedStates(Vec<GridSample>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricOutput {
    pub analytic: MetricTensor2,
    /// Finite-difference estimate at `sample_point`.
    pub numeric: MetricTensor2,
    pub sample_point: [f64; 2],
    /// Largest component difference between `analytic` and `numeric`.
    pub oracle_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSample {
    pub theta: f64,
    pub phi: f64,
    pub state: PureState2Q,
    pub concurrence: f64,
}

impl RunRecord {
    /// The reproducible part of the record: everything except the timestamp.
    pub fn canonical_json(&self) -> String {
        let mut stripped = self.clone();
        stripped.provenance.generated_at_unix = 0;
        serde_json::to_string(&stripped).expect("record serializes")
    }

    pub fn results_json(&self) -> String {
        serde_json::to_string(&(&self.results, &self.warnings)).expect("results serialize")
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("record serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| ScenarioError::ConfigInvalid {
            path: e.path().to_string(),
            message: e.into_inner().to_string(),
        })
    }

    pub fn metric(&self) -> Option<&MetricOutput> {
        self.results.iter().find_map(|r| match r {
            OutputResult::Metric(m) => Some(m),
            _ => None,
        })
    }

    pub fn classification(&self) -> Option<&ManifoldReport> {
        self.results.iter().find_map(|r| match r {
            OutputResult::Classify(c) => Some(c),
            _ => None,
        })
    }

    pub fn profile(&self) -> Option<&ConcurrenceProfile> {
        self.results.iter().find_map(|r| match r {
            OutputResult::ConcurrenceProfile(p) => Some(p),
            _ => None,
        })
    }

    pub fn evolved_states(&self) -> Option<&[GridSample]> {
        self.results.iter().find_map(|r| match r {
            OutputResult::EvolvedStates(s) => Some(s.as_slice()),
            _ => None,
        })
    }
}

/// Runs every requested output, in the order the config lists them.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunRecord, ScenarioError> {
    config.validate()?;
    let initial = config.initial_state()?;
    let gamma = config.params.gamma;
    let seed = config.seed.unwrap_or(FLATNESS_SEED);
    let mut warnings = Vec::new();

    let results = config
        .outputs
        .iter()
        .map(|kind| match kind {
            OutputKind::Metric => {
                let analytic = metric_analytic(&initial, gamma);
                if let Err(e) = shear(&family_invariants(&initial)) {
                    warnings.push(format!("metric: {e}; diagonal form omitted"));
                }
                let pt = sample_points(seed, 1)[0];
                let numeric = metric_numeric(&initial, pt, gamma, DEFAULT_FD_STEP).expect("default step is in range");
                OutputResult::Metric(MetricOutput {
                    oracle_residual: analytic.max_component_diff(&numeric),
                    analytic,
                    numeric,
                    sample_point: [pt.theta, pt.phi],
                })
            }
            OutputKind::Classify => {
                OutputResult::Classify(classify_seeded(&initial, gamma, config.degeneracy_tol(), seed))
            }
            OutputKind::ConcurrenceProfile => {
                OutputResult::ConcurrenceProfile(concurrence_profile(&initial, &config.profile_thetas()))
            }
            OutputKind::EvolvedStates => OutputResult::EvolvedStates(
                config
                    .grid_points()
                    .into_iter()
                    .map(|pt| {
                        let state = evolve_family(&initial, pt);
                        GridSample { theta: pt.theta, phi: pt.phi, state, concurrence: concurrence(&state) }
                    })
                    .collect(),
            ),
        })
        .collect();

    let generated_at_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(RunRecord {
        schema_version: SCHEMA_VERSION.to_string(),
        config: config.clone(),
        results,
        warnings,
        provenance: Provenance { library_version: env!("CARGO_PKG_VERSION").to_string(), seed, generated_at_unix },
    })
}
