//! Concurrence of pure two-qubit states along the evolution manifold.

use std::f64::consts::PI;

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonian::SystemParams;
use crate::manifold::family_invariants;
use crate::qstate::{PureState2Q, I};

/// Grid resolution of [`maximize_concurrence`] over one `θ` period.
pub const MAX_SEARCH_GRID: usize = 4096;
/// Initial states with concurrence below this count as product states.
pub const PRODUCT_STATE_TOL: f64 = 1e-10;
/// Concurrence may leave `[0, 1]` by at most this much before it is an error.
pub const RANGE_SLACK: f64 = 1e-9;
const THETA_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntanglementError {
    #[error("initial state has concurrence {0:e}; a product state is required")]
    NotDisentangled(f64),
    #[error("coupling J is zero, so theta never leaves 0")]
    ZeroCoupling,
    #[error("concurrence {0} is outside [0, 1]")]
    OutOfRange(f64),
}

/// The single-spin states entering a product initial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProductKind {
    /// `|+⟩ ⊗ |−⟩`
    #[serde(rename = "pm")]
    PlusMinus,
    /// `|+⟩ ⊗ |+⟩`
    #[serde(rename = "pp")]
    PlusPlus,
    /// `|−⟩ ⊗ |−⟩`
    #[serde(rename = "mm")]
    MinusMinus,
    /// `|↑↓⟩`; the Bloch angles are ignored.
    #[serde(rename = "updown")]
    UpDown,
}

/// Spin-up/down components of `|+⟩ = cos(χ/2)|↑⟩ + sin(χ/2)e^{iγ}|↓⟩` and
/// `|−⟩ = -sin(χ/2)|↑⟩ + cos(χ/2)e^{iγ}|↓⟩`, the eigenstates of spin
/// projection on `n = (sinχ cosγ, sinχ sinγ, cosχ)`.
pub fn bloch_pair(chi: f64, gamma_az: f64) -> ([Complex64; 2], [Complex64; 2]) {
    let (s, c) = (chi / 2.0).sin_cos();
    let phase = Complex64::from_polar(1.0, gamma_az);
    let plus = [Complex64::new(c, 0.0), phase * s];
    let minus = [Complex64::new(-s, 0.0), phase * c];
    (plus, minus)
}

pub fn product_state(kind: ProductKind, chi: f64, gamma_az: f64) -> PureState2Q {
    let (plus, minus) = bloch_pair(chi, gamma_az);
    let (first, second) = match kind {
        ProductKind::PlusMinus => (plus, minus),
        ProductKind::PlusPlus => (plus, plus),
        ProductKind::MinusMinus => (minus, minus),
        ProductKind::UpDown => return PureState2Q::up_down(),
    };
    PureState2Q::from_raw([first[0] * second[0], first[0] * second[1], first[1] * second[0], first[1] * second[1]])
}

fn checked_unit(value: f64) -> Result<f64, EntanglementError> {
    if !(-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&value) {
        return Err(EntanglementError::OutOfRange(value));
    }
    Ok(value.clamp(0.0, 1.0))
}

/// `2|ad - bc|`, or [`EntanglementError::OutOfRange`] if the state is so far
/// from normalized that the value leaves `[0, 1]`.
pub fn try_concurrence(state: &PureState2Q) -> Result<f64, EntanglementError> {
    checked_unit(2.0 * (state.a() * state.d() - state.b() * state.c()).norm())
}

/// `C = 2|ad - bc|`, clamped to `[0, 1]`.
///
/// # Panics
///
/// If the raw value is outside `[0, 1]` by more than [`RANGE_SLACK`], which
/// only happens for a state that is not normalized.
pub fn concurrence(state: &PureState2Q) -> f64 {
    try_concurrence(state).expect("concurrence of a normalized state lies in [0, 1]")
}

fn pauli_yy() -> Matrix4<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let mut m = Matrix4::zeros();
    m[(0, 3)] = -one;
    m[(1, 2)] = one;
    m[(2, 1)] = one;
    m[(3, 0)] = -one;
    m
}

/// Square root of a Hermitian positive semidefinite matrix. Eigenvalues below
/// `1e-14` of the largest are rounding noise and are set to zero.
fn psd_sqrt(rho: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let eig = rho.symmetric_eigen();
    let top = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let floor = 1e-14 * top.max(1.0);
    let mut out = Matrix4::zeros();
    for (k, &mu) in eig.eigenvalues.iter().enumerate() {
        if mu <= floor {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        out += (v * v.adjoint()) * Complex64::new(mu.sqrt(), 0.0);
    }
    out
}

/// Wootters concurrence of a two-qubit density matrix:
/// `max(0, √λ₁ - √λ₂ - √λ₃ - √λ₄)` over the eigenvalues of `ρρ̃`,
/// `ρ̃ = (σ_y⊗σ_y)ρ*(σ_y⊗σ_y)`, in decreasing order.
///
/// `√λ_i` are the singular values of `√ρ √ρ̃`, whose Gram matrix is the
/// Hermitian `√ρ ρ̃ √ρ`. Reading them off an SVD keeps the small ones accurate
/// to rounding rather than to its square root.
pub fn wootters_concurrence(rho: &Matrix4<Complex64>) -> f64 {
    let yy = pauli_yy();
    let root = psd_sqrt(rho);
    let root_tilde = yy * root.conjugate() * yy;
    let mut sv: Vec<f64> = (root * root_tilde).singular_values().iter().cloned().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    (sv[0] - sv[1] - sv[2] - sv[3]).max(0.0)
}

/// `|ψ⟩⟨ψ|`
pub fn density_matrix(state: &PureState2Q) -> Matrix4<Complex64> {
    let v = state.amplitudes();
    Matrix4::from_fn(|i, j| v[i] * v[j].conj())
}

/// Concurrence through the general mixed-state route, as an independent
/// check on [`concurrence`].
pub fn concurrence_wootters_oracle(state: &PureState2Q) -> f64 {
    wootters_concurrence(&density_matrix(state))
}

/// `F(θ) = ad e^{-2iθ} - (bc cos2θ - (i/2)(b² + c²) sin2θ)`, so that the
/// evolved concurrence is `2|F(θ)|`. Also returns `dF/dθ`.
fn evolved_amplitude(initial: &PureState2Q, theta: f64) -> (Complex64, Complex64) {
    let (a, b, c, d) = (initial.a(), initial.b(), initial.c(), initial.d());
    let (s2, c2) = (2.0 * theta).sin_cos();
    let ad = a * d;
    let bc = b * c;
    let sq = b * b + c * c;
    let rot = Complex64::from_polar(1.0, -2.0 * theta);
    let f = ad * rot - (bc * c2 - I * 0.5 * sq * s2);
    let df = -2.0 * I * ad * rot + 2.0 * bc * s2 + I * sq * c2;
    (f, df)
}

/// Closed-form concurrence of `ψ(θ, φ)`; it does not depend on `φ`.
pub fn concurrence_evolved(initial: &PureState2Q, theta: f64) -> f64 {
    let (f, _) = evolved_amplitude(initial, theta);
    (2.0 * f.norm()).clamp(0.0, 1.0)
}

/// `|b - c|² |sin 2θ|`, valid when the initial state is a product state.
pub fn concurrence_disentangled(initial: &PureState2Q, theta: f64) -> Result<f64, EntanglementError> {
    let c0 = concurrence(initial);
    if c0 >= PRODUCT_STATE_TOL {
        return Err(EntanglementError::NotDisentangled(c0));
    }
    Ok((initial.b() - initial.c()).norm_sqr() * (2.0 * theta).sin().abs())
}

/// Concurrence at `θ` and the radius `γ√(A - D²)` of the constant-`θ` circle
/// through it.
pub fn constant_entanglement_circle(initial: &PureState2Q, theta: f64, gamma: f64) -> (f64, f64) {
    let radius = gamma * family_invariants(initial).a_minus_d_sq().max(0.0).sqrt();
    (concurrence_evolved(initial, theta), radius)
}

/// Location and value of the largest concurrence over one `θ` period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcurrencePeak {
    /// Every maximizing `θ ∈ [0, π)`, ascending.
    pub thetas: [Option<f64>; 2],
    pub c_max: f64,
}

impl ConcurrencePeak {
    pub fn first(&self) -> f64 {
        self.thetas[0].unwrap_or(0.0)
    }

    pub fn last(&self) -> f64 {
        self.thetas.iter().rev().flatten().next().copied().unwrap_or(0.0)
    }
}

/// Maximizes [`concurrence_evolved`] over `θ ∈ [0, π)`.
///
/// `|F(θ)|²` is a trigonometric polynomial of degree 2 in `2θ`, so it has at
/// most two maxima per period, and a [`MAX_SEARCH_GRID`]-point grid brackets
/// each one. Every bracketed peak is refined by bisection on the sign of
/// `d|F|²/dθ = 2 Re(F* F')`, falling back to golden-section search if the
/// bracket has no sign change.
pub fn maximize_concurrence(initial: &PureState2Q) -> ConcurrencePeak {
    let n = MAX_SEARCH_GRID;
    let step = PI / n as f64;
    let f = |theta: f64| evolved_amplitude(initial, theta).0.norm_sqr();
    let values: Vec<f64> = (0..n).map(|i| f(i as f64 * step)).collect();
    let top = values.iter().cloned().fold(f64::MIN, f64::max);
    let bottom = values.iter().cloned().fold(f64::MAX, f64::min);
    if top - bottom <= 1e-15 {
        return ConcurrencePeak { thetas: [Some(0.0), None], c_max: (2.0 * top.sqrt()).clamp(0.0, 1.0) };
    }

    let mut peaks: Vec<(f64, f64)> = Vec::new();
    for i in 0..n {
        let prev = values[(i + n - 1) % n];
        let next = values[(i + 1) % n];
        if values[i] > prev && values[i] >= next {
            let centre = i as f64 * step;
            let theta = refine_peak(initial, centre - step, centre + step);
            peaks.push((canonical_theta(theta), f(theta)));
        }
    }
    let best = peaks.iter().map(|p| p.1).fold(f64::MIN, f64::max);
    let mut winners: Vec<f64> = peaks.iter().filter(|p| p.1 >= best - 1e-13).map(|p| p.0).collect();
    winners.sort_by(f64::total_cmp);
    winners.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
    let mut thetas = [None, None];
    for (slot, th) in thetas.iter_mut().zip(winners) {
        *slot = Some(th);
    }
    ConcurrencePeak { thetas, c_max: (2.0 * best.sqrt()).clamp(0.0, 1.0) }
}

fn canonical_theta(theta: f64) -> f64 {
    let r = theta.rem_euclid(PI);
    if r < THETA_TOL || PI - r < THETA_TOL {
        0.0
    } else {
        r
    }
}

fn refine_peak(initial: &PureState2Q, mut lo: f64, mut hi: f64) -> f64 {
    let slope = |theta: f64| {
        let (f, df) = evolved_amplitude(initial, theta);
        (f.conj() * df).re
    };
    if slope(lo) > 0.0 && slope(hi) < 0.0 {
        while hi - lo > THETA_TOL {
            let mid = 0.5 * (lo + hi);
            let s = slope(mid);
            if s == 0.0 {
                return mid;
            }
            if s > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }
    golden_section_max(|th| evolved_amplitude(initial, th).0.norm_sqr(), lo, hi, 1e-10)
}

fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Earliest moment of maximal entanglement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxEntanglement {
    pub t: f64,
    pub theta: f64,
    pub c_max: f64,
}

/// Smallest `t ≥ 0` at which the evolution under `p` reaches the maximal
/// concurrence, with `θ = 2Jt` reported in `[0, π)`.
pub fn max_entanglement_time(initial: &PureState2Q, p: &SystemParams) -> Result<MaxEntanglement, EntanglementError> {
    if p.j == 0.0 {
        return Err(EntanglementError::ZeroCoupling);
    }
    let peak = maximize_concurrence(initial);
    // θ decreases in time when J < 0, so the earliest hit is the last peak.
    let (theta, t) = if p.j > 0.0 {
        let th = peak.first();
        (th, th / (2.0 * p.j))
    } else {
        let th = peak.last();
        let t = if th == 0.0 { 0.0 } else { (th - PI) / (2.0 * p.j) };
        (th, t)
    };
    Ok(MaxEntanglement { t, theta, c_max: peak.c_max })
}

/// Concurrence sampled along `θ` (at any fixed `φ`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceProfile {
    pub initial: PureState2Q,
    pub samples: Vec<(f64, f64)>,
    pub theta_max: f64,
    pub c_max: f64,
}

pub fn concurrence_profile(initial: &PureState2Q, thetas: &[f64]) -> ConcurrenceProfile {
    let samples = thetas.iter().map(|&th| (th, concurrence_evolved(initial, th))).collect();
    let peak = maximize_concurrence(initial);
    ConcurrenceProfile { initial: *initial, samples, theta_max: peak.first(), c_max: peak.c_max }
}
