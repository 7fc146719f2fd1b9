//! Geometry of the evolved-state family `ψ(θ, φ)`.
//!
//! Evolution under `H` from a fixed initial state sweeps a two-parameter
//! family with `θ = 2Jt` and `φ = 2h_z t`. Its Fubini–Study metric has
//! constant components fixed by three numbers `A`, `B`, `D` of the initial
//! amplitudes, so the family is a flat torus, or a circle/point when one or
//! both directions degenerate.
//!
//! Closed forms live next to a finite-difference oracle ([`metric_numeric`])
//! that only sees the state family through [`fs_distance_sq`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonian::SystemParams;
use crate::qstate::{fs_distance_sq, PureState2Q, I};

/// `A - D²` at or below this is treated as zero when forming the shear.
pub const SHEAR_DEGENERACY_TOL: f64 = 1e-12;
/// Metric components at or below this are structural zeros for classification.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-10;
/// Default finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-4;
pub const MIN_FD_STEP: f64 = 1e-6;
pub const MAX_FD_STEP: f64 = 1e-2;
/// Seed for the sample points behind [`ManifoldReport::flatness_residual`].
pub const FLATNESS_SEED: u64 = 0x5EED_7025;
pub const FLATNESS_SAMPLES: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ManifoldError {
    #[error("shear k = BD/(A - D^2) is undefined: A - D^2 = {a_minus_d_sq:e}, BD = {bd:e}")]
    DegenerateShear { a_minus_d_sq: f64, bd: f64 },
    #[error("finite-difference step {h:e} is below the noise floor {min:e}")]
    StepTooSmall { h: f64, min: f64 },
    #[error("finite-difference step {h:e} exceeds {max:e}")]
    StepTooLarge { h: f64, max: f64 },
}

/// Coordinates `(θ, φ)` on the evolution manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    pub theta: f64,
    pub phi: f64,
}

impl TorusPoint {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    /// Maps into `θ ∈ [0, π)`, `φ ∈ [0, 2π)`.
    ///
    /// This identifies rays, not vectors: shifting `θ` by `π` flips the sign
    /// of the state. Use [`TorusPoint::canonical_with_sign`] to keep it.
    pub fn canonical(&self) -> Self {
        self.canonical_with_sign().0
    }

    /// Canonical point plus the sign `s` with `ψ(self) = s·ψ(canonical)`.
    pub fn canonical_with_sign(&self) -> (Self, f64) {
        let turns = (self.theta / PI).floor();
        let sign = if turns.rem_euclid(2.0) == 0.0 { 1.0 } else { -1.0 };
        let pt = Self { theta: wrap(self.theta, PI), phi: wrap(self.phi, 2.0 * PI) };
        (pt, sign)
    }
}

fn wrap(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

/// `θ = 2Jt`, `φ = 2h_z t`, canonicalized.
pub fn params_to_point(p: &SystemParams, t: f64) -> TorusPoint {
    raw_point(p, t).canonical()
}

/// `θ = 2Jt`, `φ = 2h_z t` without wrapping.
pub fn raw_point(p: &SystemParams, t: f64) -> TorusPoint {
    TorusPoint::new(2.0 * p.j * t, 2.0 * p.h_z * t)
}

/// Closed-form `ψ(θ, φ) = U(t)ψ_i`:
///
/// `a e^{-i(φ+θ)}|↑↑⟩ + (b cosθ - i c sinθ)|↑↓⟩ + (-i b sinθ + c cosθ)|↓↑⟩ + d e^{i(φ-θ)}|↓↓⟩`
pub fn evolve_family(initial: &PureState2Q, pt: TorusPoint) -> PureState2Q {
    let (a, b, c, d) = (initial.a(), initial.b(), initial.c(), initial.d());
    let (s, co) = pt.theta.sin_cos();
    PureState2Q::from_raw([
        a * Complex64::from_polar(1.0, -(pt.phi + pt.theta)),
        b * co - I * c * s,
        -I * b * s + c * co,
        d * Complex64::from_polar(1.0, pt.phi - pt.theta),
    ])
}

/// The family in sheared coordinates `θ' = θ`, `φ' = φ + kθ`:
///
/// `a e^{-i(φ'+(1-k)θ')}|↑↑⟩ + … + d e^{i(φ'-(1+k)θ')}|↓↓⟩`
pub fn evolve_family_sheared(initial: &PureState2Q, k: f64, theta_p: f64, phi_p: f64) -> PureState2Q {
    let (a, b, c, d) = (initial.a(), initial.b(), initial.c(), initial.d());
    let (s, co) = theta_p.sin_cos();
    PureState2Q::from_raw([
        a * Complex64::from_polar(1.0, -(phi_p + (1.0 - k) * theta_p)),
        b * co - I * c * s,
        -I * b * s + c * co,
        d * Complex64::from_polar(1.0, phi_p - (1.0 + k) * theta_p),
    ])
}

/// `A = |a|²+|d|²`, `B = |b-c|²`, `D = |a|²-|d|²` of the initial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyInvariants {
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

impl FamilyInvariants {
    /// `A - D²`, the `φφ` weight.
    pub fn a_minus_d_sq(&self) -> f64 {
        self.a - self.d * self.d
    }

    /// `B(2 - B)`, the `θθ` weight.
    pub fn theta_weight(&self) -> f64 {
        self.b * (2.0 - self.b)
    }

    /// `B(2A - 2D² - AB)`, numerator of the diagonalized `θ'θ'` weight.
    pub fn sheared_theta_numerator(&self) -> f64 {
        self.b * (2.0 * self.a - 2.0 * self.d * self.d - self.a * self.b)
    }
}

pub fn family_invariants(initial: &PureState2Q) -> FamilyInvariants {
    let a2 = initial.a().norm_sqr();
    let d2 = initial.d().norm_sqr();
    FamilyInvariants { a: a2 + d2, b: (initial.b() - initial.c()).norm_sqr(), d: a2 - d2 }
}

/// Both sides of the two sum-of-squares identities that make the diagonal
/// metric weights nonnegative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityIdentities {
    /// `B(2A - 2D² - AB)`
    pub sheared_lhs: f64,
    /// `(|a|²+|d|²)|b²-c²|² + 8|a|²|d|²|b-c|²`
    pub sheared_rhs: f64,
    /// `A - D²`
    pub phi_lhs: f64,
    /// `|a|²(1-|a|²) + |d|²(1-|d|²) + 2|a|²|d|²`
    pub phi_rhs: f64,
}

impl PositivityIdentities {
    pub fn max_residual(&self) -> f64 {
        (self.sheared_lhs - self.sheared_rhs).abs().max((self.phi_lhs - self.phi_rhs).abs())
    }
}

pub fn positivity_identities(initial: &PureState2Q) -> PositivityIdentities {
    let inv = family_invariants(initial);
    let (a, b, c, d) = (initial.a(), initial.b(), initial.c(), initial.d());
    let (a2, d2) = (a.norm_sqr(), d.norm_sqr());
    PositivityIdentities {
        sheared_lhs: inv.sheared_theta_numerator(),
        sheared_rhs: (a2 + d2) * (b * b - c * c).norm_sqr() + 8.0 * a2 * d2 * (b - c).norm_sqr(),
        phi_lhs: inv.a_minus_d_sq(),
        phi_rhs: a2 * (1.0 - a2) + d2 * (1.0 - d2) + 2.0 * a2 * d2,
    }
}

/// Metric in `(θ, φ)` plus its diagonal form in `(θ', φ') = (θ, φ + kθ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricTensor2 {
    pub g_tt: f64,
    pub g_tp: f64,
    pub g_pp: f64,
    /// Shear `k`; `None` when it is undefined.
    pub k: Option<f64>,
    /// `θ'θ'` component; `None` when `k` is undefined.
    pub g_tt_diag: Option<f64>,
    pub g_pp_diag: f64,
}

impl MetricTensor2 {
    /// Builds the diagonal form from raw components: `k = g_tp/g_pp` and
    /// `g_θ'θ' = g_tt - g_tp²/g_pp`.
    pub fn from_components(g_tt: f64, g_tp: f64, g_pp: f64, zero_tol: f64) -> Self {
        let (k, g_tt_diag) = if g_pp > zero_tol {
            let k = g_tp / g_pp;
            (Some(k), Some(g_tt - k * g_tp))
        } else if g_tp.abs() <= zero_tol {
            (Some(0.0), Some(g_tt))
        } else {
            (None, None)
        };
        Self { g_tt, g_tp, g_pp, k, g_tt_diag, g_pp_diag: g_pp }
    }

    pub fn determinant(&self) -> f64 {
        self.g_tt * self.g_pp - self.g_tp * self.g_tp
    }

    pub fn components(&self) -> [f64; 3] {
        [self.g_tt, self.g_tp, self.g_pp]
    }

    /// Largest absolute difference of `(g_tt, g_tp, g_pp)`.
    pub fn max_component_diff(&self, other: &Self) -> f64 {
        self.components().iter().zip(other.components()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }
}

/// Closed-form metric
/// `ds² = γ²[B(2-B)dθ² + (A-D²)dφ² + 2BD dθdφ]`, with
/// `k = BD/(A-D²)` and `g_θ'θ' = γ²B(2A-2D²-AB)/(A-D²)`.
///
/// When `A - D² ≤ 1e-12` the shear is `0` if `BD = 0` and undefined
/// otherwise (see [`shear`]).
pub fn metric_analytic(initial: &PureState2Q, gamma: f64) -> MetricTensor2 {
    let inv = family_invariants(initial);
    let g2 = gamma * gamma;
    let g_tt = g2 * inv.theta_weight();
    let g_pp = g2 * inv.a_minus_d_sq();
    let g_tp = g2 * inv.b * inv.d;
    let (k, g_tt_diag) = match shear(&inv) {
        Ok(k) if inv.a_minus_d_sq() > SHEAR_DEGENERACY_TOL => {
            (Some(k), Some(g2 * inv.sheared_theta_numerator() / inv.a_minus_d_sq()))
        }
        Ok(k) => (Some(k), Some(g_tt)),
        Err(_) => (None, None),
    };
    MetricTensor2 { g_tt, g_tp, g_pp, k, g_tt_diag, g_pp_diag: g_pp }
}

/// `k = BD/(A - D²)`.
pub fn shear(inv: &FamilyInvariants) -> Result<f64, ManifoldError> {
    let den = inv.a_minus_d_sq();
    let bd = inv.b * inv.d;
    if den > SHEAR_DEGENERACY_TOL {
        Ok(bd / den)
    } else if bd == 0.0 {
        Ok(0.0)
    } else {
        Err(ManifoldError::DegenerateShear { a_minus_d_sq: den, bd })
    }
}

fn check_step(h: f64) -> Result<(), ManifoldError> {
    if h.is_nan() || h < MIN_FD_STEP {
        return Err(ManifoldError::StepTooSmall { h, min: MIN_FD_STEP });
    }
    if h > MAX_FD_STEP {
        return Err(ManifoldError::StepTooLarge { h, max: MAX_FD_STEP });
    }
    Ok(())
}

/// Finite-difference metric of an arbitrary two-parameter family at `(x, y)`.
///
/// For a direction `v`, `q(v, h) = [d²(ψ, ψ(+hv)) + d²(ψ, ψ(-hv))] / (2h²)`
/// equals `vᵀgv + O(h²)`; one Richardson step over `(h, h/2)` leaves
/// `O(h⁴)`. The cross term comes from polarization along `v = (1, 1)`.
pub fn numeric_metric_of<F>(family: F, x: f64, y: f64, gamma: f64, h: f64) -> Result<[f64; 3], ManifoldError>
where
    F: Fn(f64, f64) -> PureState2Q,
{
    check_step(h)?;
    let base = family(x, y);
    let quad = |vx: f64, vy: f64, step: f64| {
        let fwd = family(x + step * vx, y + step * vy);
        let bwd = family(x - step * vx, y - step * vy);
        (fs_distance_sq(&base, &fwd, gamma) + fs_distance_sq(&base, &bwd, gamma)) / (2.0 * step * step)
    };
    let richardson = |vx: f64, vy: f64| (4.0 * quad(vx, vy, h / 2.0) - quad(vx, vy, h)) / 3.0;
    let g_xx = richardson(1.0, 0.0);
    let g_yy = richardson(0.0, 1.0);
    let g_xy = (richardson(1.0, 1.0) - g_xx - g_yy) / 2.0;
    Ok([g_xx, g_xy, g_yy])
}

/// Finite-difference estimate of the metric of `ψ(θ, φ)` at `pt`.
pub fn metric_numeric(
    initial: &PureState2Q,
    pt: TorusPoint,
    gamma: f64,
    h: f64,
) -> Result<MetricTensor2, ManifoldError> {
    let [g_tt, g_tp, g_pp] =
        numeric_metric_of(|th, ph| evolve_family(initial, TorusPoint::new(th, ph)), pt.theta, pt.phi, gamma, h)?;
    Ok(MetricTensor2::from_components(g_tt, g_tp, g_pp, SHEAR_DEGENERACY_TOL * gamma * gamma))
}

/// Points at which [`diagonalize_check`] probes the sheared family.
pub const DIAGONALIZE_PROBES: [(f64, f64); 2] = [(0.4, 1.3), (2.2, 5.1)];

/// Numerically measures the cross term of the metric after the shear
/// `φ' = φ + kθ`. Returns the largest `|g_θ'φ'|` over [`DIAGONALIZE_PROBES`].
pub fn diagonalize_check(initial: &PureState2Q, gamma: f64) -> Result<f64, ManifoldError> {
    let inv = family_invariants(initial);
    if inv.a_minus_d_sq() <= SHEAR_DEGENERACY_TOL {
        return Err(ManifoldError::DegenerateShear { a_minus_d_sq: inv.a_minus_d_sq(), bd: inv.b * inv.d });
    }
    let k = shear(&inv)?;
    sheared_cross_term(initial, k, gamma)
}

/// Largest `|g_θ'φ'|` of the family sheared by an arbitrary `k`.
pub fn sheared_cross_term(initial: &PureState2Q, k: f64, gamma: f64) -> Result<f64, ManifoldError> {
    let mut worst = 0.0_f64;
    for (tp, pp) in DIAGONALIZE_PROBES {
        let [_, cross, _] =
            numeric_metric_of(|th, ph| evolve_family_sheared(initial, k, th, ph), tp, pp, gamma, DEFAULT_FD_STEP)?;
        worst = worst.max(cross.abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ManifoldKind {
    FlatTorus,
    Circle,
    Point,
}

/// Which coordinate a one-dimensional orbit runs along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircleDirection {
    /// `φ'` survives; radius `γ√(A - D²)`.
    Phi,
    /// Only `θ` survives (`A - D² = 0`); radius `γ√(B(2 - B))`.
    Theta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldReport {
    pub dimension: u8,
    pub kind: ManifoldKind,
    pub invariants: FamilyInvariants,
    pub metric: MetricTensor2,
    pub circle_radius: Option<f64>,
    pub circle_direction: Option<CircleDirection>,
    /// Set for the `θ`-circle radius, which extends the `γ√(A - D²)`
    /// circle-radius formula to the case where the `φ` direction collapses.
    pub radius_extrapolated: bool,
    /// Max deviation of the numeric metric components over
    /// [`FLATNESS_SAMPLES`] seeded points from their mean.
    pub flatness_residual: f64,
}

pub fn classify(initial: &PureState2Q, gamma: f64) -> ManifoldReport {
    classify_with_tolerance(initial, gamma, DEFAULT_DEGENERACY_TOL)
}

pub fn classify_with_tolerance(initial: &PureState2Q, gamma: f64, tol: f64) -> ManifoldReport {
    classify_seeded(initial, gamma, tol, FLATNESS_SEED)
}

/// [`classify_with_tolerance`] with a caller-chosen seed for the flatness
/// sample points.
pub fn classify_seeded(initial: &PureState2Q, gamma: f64, tol: f64, seed: u64) -> ManifoldReport {
    let invariants = family_invariants(initial);
    let metric = metric_analytic(initial, gamma);
    // Without a shear the raw components are already diagonal.
    let tt = metric.g_tt_diag.unwrap_or(metric.g_tt);
    let pp = metric.g_pp_diag;
    let (kind, dimension, direction) = match (tt > tol, pp > tol) {
        (true, true) => (ManifoldKind::FlatTorus, 2, None),
        (false, true) => (ManifoldKind::Circle, 1, Some(CircleDirection::Phi)),
        (true, false) => (ManifoldKind::Circle, 1, Some(CircleDirection::Theta)),
        (false, false) => (ManifoldKind::Point, 0, None),
    };
    let circle_radius = direction.map(|dir| match dir {
        CircleDirection::Phi => gamma * invariants.a_minus_d_sq().max(0.0).sqrt(),
        CircleDirection::Theta => gamma * invariants.theta_weight().max(0.0).sqrt(),
    });
    ManifoldReport {
        dimension,
        kind,
        invariants,
        metric,
        circle_radius,
        circle_direction: direction,
        radius_extrapolated: direction == Some(CircleDirection::Theta),
        flatness_residual: flatness_residual(initial, gamma, seed),
    }
}

/// Seeded sample points in `[0, π) × [0, 2π)`.
pub fn sample_points(seed: u64, count: usize) -> Vec<TorusPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| TorusPoint::new(rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI))).collect()
}

/// Componentwise max deviation of the numeric metric from its mean over
/// [`FLATNESS_SAMPLES`] points drawn with `seed`.
pub fn flatness_residual(initial: &PureState2Q, gamma: f64, seed: u64) -> f64 {
    let samples: Vec<[f64; 3]> = sample_points(seed, FLATNESS_SAMPLES)
        .into_iter()
        .map(|pt| metric_numeric(initial, pt, gamma, DEFAULT_FD_STEP).expect("default step is in range").components())
        .collect();
    component_spread(&samples)
}

/// Max over components of `max_i |x_i - mean(x)|`.
pub fn component_spread(samples: &[[f64; 3]]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let n = samples.len() as f64;
    let mut worst = 0.0_f64;
    for c in 0..3 {
        let mean = samples.iter().map(|s| s[c]).sum::<f64>() / n;
        for s in samples {
            worst = worst.max((s[c] - mean).abs());
        }
    }
    worst
}
