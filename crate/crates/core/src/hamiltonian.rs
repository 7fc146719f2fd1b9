//! The isotropic Heisenberg Hamiltonian of two spins in a z-directed field,
//! its eigensystem, and the evolution operator.
//!
//! `H = H_int + H_mf` with `H_int = J(σ¹·σ² + 1)` and
//! `H_mf = h_z(σ_z¹ + σ_z²)`; ħ = 1 throughout.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qstate::{Operator4, PureState2Q, I, ONE, ZERO};

/// Below this value of `|2Jt|` the coefficient `sin(2Jt)/(2J)` is evaluated
/// from its Taylor series.
pub const SINC_SERIES_CUTOFF: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("parameter `{0}` must be finite")]
    NonFinite(&'static str),
    #[error("metric scale gamma must be positive, got {0}")]
    NonPositiveGamma(f64),
}

/// Coupling `J`, field strength `h_z` (both in frequency units) and the
/// Fubini–Study scale factor `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    pub j: f64,
    pub h_z: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
}

fn default_gamma() -> f64 {
    1.0
}

impl SystemParams {
    pub fn new(j: f64, h_z: f64, gamma: f64) -> Result<Self, ParamsError> {
        let p = Self { j, h_z, gamma };
        p.validate()?;
        Ok(p)
    }

    /// `gamma = 1`
    pub fn with_unit_gamma(j: f64, h_z: f64) -> Self {
        Self { j, h_z, gamma: 1.0 }
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        for (name, v) in [("j", self.j), ("h_z", self.h_z), ("gamma", self.gamma)] {
            if !v.is_finite() {
                return Err(ParamsError::NonFinite(name));
            }
        }
        if self.gamma <= 0.0 {
            return Err(ParamsError::NonPositiveGamma(self.gamma));
        }
        Ok(())
    }
}

/// Eigenpairs of `H` in the fixed order
/// `|↑↑⟩, |↓↓⟩, (|↑↓⟩+|↓↑⟩)/√2, (|↑↓⟩-|↓↑⟩)/√2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub pairs: [(f64, PureState2Q); 4],
}

impl EigenSystem {
    pub fn eigenvalues(&self) -> [f64; 4] {
        self.pairs.map(|(e, _)| e)
    }
}

pub(crate) fn pauli() -> [[[Complex64; 2]; 2]; 4] {
    let id = [[ONE, ZERO], [ZERO, ONE]];
    let x = [[ZERO, ONE], [ONE, ZERO]];
    let y = [[ZERO, -I], [I, ZERO]];
    let z = [[ONE, ZERO], [ZERO, -ONE]];
    [id, x, y, z]
}

/// `J(σ¹·σ² + 1)`, assembled from Kronecker products of Pauli matrices.
pub fn build_h_int(p: &SystemParams) -> Operator4 {
    let [_, x, y, z] = pauli();
    let dot = Operator4::kron(&x, &x) + Operator4::kron(&y, &y) + Operator4::kron(&z, &z);
    (dot + Operator4::identity()).scale(Complex64::new(p.j, 0.0))
}

/// `h_z(σ_z¹ + σ_z²) = diag(2h_z, 0, 0, -2h_z)`
pub fn build_h_mf(p: &SystemParams) -> Operator4 {
    let [id, _, _, z] = pauli();
    (Operator4::kron(&z, &id) + Operator4::kron(&id, &z)).scale(Complex64::new(p.h_z, 0.0))
}

pub fn build_h(p: &SystemParams) -> Operator4 {
    build_h_int(p) + build_h_mf(p)
}

/// Exact eigensystem. `H_int` and `H_mf` commute, so the triplet/singlet
/// basis diagonalizes both; the order never depends on parameter values.
pub fn eigensystem(p: &SystemParams) -> EigenSystem {
    let (j, h) = (p.j, p.h_z);
    EigenSystem {
        pairs: [
            (2.0 * (j + h), PureState2Q::up_up()),
            (2.0 * (j - h), PureState2Q::down_down()),
            (2.0 * j, PureState2Q::triplet_zero()),
            (-2.0 * j, PureState2Q::singlet()),
        ],
    }
}

/// `sin(x)/x`, with a series branch near zero.
fn sinc(x: f64) -> f64 {
    if x.abs() < SINC_SERIES_CUTOFF {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `e^{-iH_int t} = cos(2Jt) - i (sin(2Jt)/(2J)) H_int`.
///
/// The coefficient `sin(2Jt)/(2J)` is written as `t·sinc(2Jt)`, which stays
/// finite at `J = 0`.
pub fn interaction_propagator(p: &SystemParams, t: f64) -> Operator4 {
    let x = 2.0 * p.j * t;
    let coeff = t * sinc(x);
    Operator4::identity().scale(Complex64::new(x.cos(), 0.0)) + build_h_int(p).scale(Complex64::new(0.0, -coeff))
}

/// `e^{-i h_z σ_z¹ t} e^{-i h_z σ_z² t} = diag(e^{-2ih_z t}, 1, 1, e^{2ih_z t})`
pub fn field_propagator(p: &SystemParams, t: f64) -> Operator4 {
    let w = p.h_z * t;
    Operator4::diagonal([Complex64::from_polar(1.0, -2.0 * w), ONE, ONE, Complex64::from_polar(1.0, 2.0 * w)])
}

/// Closed-form `U(t)` as the product of the interaction and field factors.
pub fn propagator_analytic(p: &SystemParams, t: f64) -> Operator4 {
    interaction_propagator(p, t) * field_propagator(p, t)
}

/// `U(t) = Σ_k e^{-iλ_k t} |v_k⟩⟨v_k|` over the exact eigensystem.
pub fn propagator_spectral(p: &SystemParams, t: f64) -> Operator4 {
    eigensystem(p).pairs.iter().fold(Operator4::zero(), |acc, (lambda, v)| {
        acc + Operator4::outer(v, v).scale(Complex64::from_polar(1.0, -lambda * t))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::apply;
    use std::f64::consts::PI;

    fn max_diff(a: &[Complex64; 4], b: &[Complex64; 4]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn h_int_zero_coupling_is_zero() {
        let p = SystemParams::with_unit_gamma(0.0, 0.3);
        assert_eq!(build_h_int(&p).max_abs(), 0.0);
    }

    #[test]
    fn h_int_on_singlet() {
        let p = SystemParams::with_unit_gamma(0.7, 0.0);
        let s = PureState2Q::singlet();
        let hv = build_h_int(&p).mul_vec(&s.amplitudes());
        let expect = s.amplitudes().map(|z| z * -1.4);
        assert!(max_diff(&hv, &expect) < 1e-12);
    }

    #[test]
    fn h_int_squares_to_scalar() {
        let p = SystemParams::with_unit_gamma(0.7, 0.0);
        let h = build_h_int(&p);
        let sq = h * h;
        assert!(sq.max_abs_diff(&Operator4::identity().scale(Complex64::new(4.0 * 0.49, 0.0))) < 1e-12);
        assert!(h.hermiticity_residual() < 1e-15);
    }

    #[test]
    fn h_mf_is_diagonal() {
        let p = SystemParams::with_unit_gamma(0.0, 1.0);
        let expect = Operator4::diagonal([2.0, 0.0, 0.0, -2.0].map(|x| Complex64::new(x, 0.0)));
        assert_eq!(build_h_mf(&p), expect);
        let p0 = SystemParams::with_unit_gamma(1.0, 0.0);
        assert_eq!(build_h_mf(&p0).max_abs(), 0.0);
    }

    #[test]
    fn field_and_interaction_commute() {
        let p = SystemParams::with_unit_gamma(1.3, 0.4);
        assert!(build_h_int(&p).commutator(&build_h_mf(&p)).max_abs() < 1e-12);
    }

    #[test]
    fn eigenvalue_examples() {
        let e = eigensystem(&SystemParams::with_unit_gamma(1.0, 0.5)).eigenvalues();
        assert_eq!(e, [3.0, 1.0, 2.0, -2.0]);
        let e = eigensystem(&SystemParams::with_unit_gamma(0.0, 0.0)).eigenvalues();
        assert!(e.iter().all(|&x| x == 0.0));
        let e = eigensystem(&SystemParams::with_unit_gamma(1.0, 1.0)).eigenvalues();
        assert_eq!(e, [4.0, 0.0, 2.0, -2.0]);
    }

    #[test]
    fn eigenpairs_satisfy_h() {
        let p = SystemParams::with_unit_gamma(-0.8, 1.7);
        let h = build_h(&p);
        for (lambda, v) in eigensystem(&p).pairs {
            let hv = h.mul_vec(&v.amplitudes());
            assert!(max_diff(&hv, &v.amplitudes().map(|z| z * lambda)) < 1e-12);
        }
    }

    #[test]
    fn propagator_at_zero_time_is_identity() {
        let p = SystemParams::with_unit_gamma(1.2, -0.4);
        assert!(propagator_analytic(&p, 0.0).max_abs_diff(&Operator4::identity()) < 1e-15);
        assert!(propagator_spectral(&p, 0.0).max_abs_diff(&Operator4::identity()) < 1e-15);
    }

    #[test]
    fn explicit_matrix_entries() {
        let (j, h, t) = (0.9, 0.3, 0.7);
        let u = propagator_analytic(&SystemParams::with_unit_gamma(j, h), t);
        let x = 2.0 * j * t;
        let expect = Operator4::from_rows([
            [Complex64::from_polar(1.0, -2.0 * (h + j) * t), ZERO, ZERO, ZERO],
            [ZERO, Complex64::new(x.cos(), 0.0), Complex64::new(0.0, -x.sin()), ZERO],
            [ZERO, Complex64::new(0.0, -x.sin()), Complex64::new(x.cos(), 0.0), ZERO],
            [ZERO, ZERO, ZERO, Complex64::from_polar(1.0, 2.0 * (h - j) * t)],
        ]);
        assert!(u.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn quarter_swap_block() {
        let t = 0.5;
        let p = SystemParams::with_unit_gamma(PI / 4.0 / t, 0.37);
        let u = propagator_analytic(&p, t);
        assert!((u.entry(1, 1)).norm() < 1e-15);
        assert!((u.entry(2, 2)).norm() < 1e-15);
        assert!((u.entry(1, 2) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((u.entry(2, 1) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn group_property() {
        let p = SystemParams::with_unit_gamma(0.9, 0.3);
        let lhs = propagator_analytic(&p, 0.2) * propagator_analytic(&p, 0.5);
        assert!(lhs.max_abs_diff(&propagator_analytic(&p, 0.7)) < 1e-14);
        let back = propagator_analytic(&p, -0.7) * propagator_analytic(&p, 0.7);
        assert!(back.max_abs_diff(&Operator4::identity()) < 1e-14);
    }

    #[test]
    fn spectral_matches_analytic_at_reference_point() {
        let p = SystemParams::with_unit_gamma(1.1, 0.7);
        let diff = propagator_analytic(&p, 0.37).max_abs_diff(&propagator_spectral(&p, 0.37));
        assert!(diff < 1e-10, "{diff}");
    }

    #[test]
    fn singlet_eigenphase() {
        let (j, t) = (0.6, 1.3);
        let u = propagator_spectral(&SystemParams::with_unit_gamma(j, 0.2), t);
        let s = PureState2Q::singlet();
        let out = apply(&u, &s);
        let expect = s.with_global_phase(2.0 * j * t);
        assert!(out.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn up_down_evolution() {
        let (j, t) = (0.8, 0.45);
        let out = apply(&propagator_analytic(&SystemParams::with_unit_gamma(j, 1.1), t), &PureState2Q::up_down());
        let x = 2.0 * j * t;
        let expect = [ZERO, Complex64::new(x.cos(), 0.0), Complex64::new(0.0, -x.sin()), ZERO];
        assert!(max_diff(&out.amplitudes(), &expect) < 1e-15);
    }

    #[test]
    fn zero_coupling_and_series_branch() {
        let p0 = SystemParams::with_unit_gamma(0.0, 0.5);
        let u = propagator_analytic(&p0, 2.0);
        assert!(u.max_abs_diff(&field_propagator(&p0, 2.0)) < 1e-15);
        // |2Jt| = 4e-7, inside the series branch
        let p = SystemParams::with_unit_gamma(2e-7, 0.5);
        let diff = propagator_analytic(&p, 1.0).max_abs_diff(&propagator_spectral(&p, 1.0));
        assert!(diff < 1e-15, "{diff}");
    }

    #[test]
    fn params_validation() {
        assert!(SystemParams::new(1.0, 0.0, 1.0).is_ok());
        assert_eq!(SystemParams::new(1.0, 0.0, 0.0), Err(ParamsError::NonPositiveGamma(0.0)));
        assert_eq!(SystemParams::new(f64::NAN, 0.0, 1.0), Err(ParamsError::NonFinite("j")));
        assert!(SystemParams::new(-1.0, 0.0, 1.0).is_ok());
    }
}
