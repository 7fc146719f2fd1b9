//! Pure two-qubit states and 4x4 operators.
//!
//! Every vector and matrix in this crate uses the single basis ordering
//! `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩` (index 0..4). Amplitudes are called `a, b, c, d`
//! in that order.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A single complex amplitude.
pub type ComplexAmp = Complex64;

/// Tolerance on `|ψ|² - 1` accepted by [`PureState2Q::new`].
pub const NORM_TOL: f64 = 1e-12;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("amplitudes contain NaN or infinity")]
    NonFinite,
    #[error("state is not normalized: |psi|^2 = {norm_sq} (tolerance {tol})")]
    NotNormalized { norm_sq: f64, tol: f64 },
    #[error("cannot normalize the zero vector")]
    ZeroNorm,
}

/// Pure state of two spin-1/2 particles with unit norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "[[f64; 2]; 4]", try_from = "[[f64; 2]; 4]")]
pub struct PureState2Q {
    amps: [Complex64; 4],
}

impl PureState2Q {
    /// Builds a state from amplitudes that must already be normalized
    /// within [`NORM_TOL`].
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self, StateError> {
        Self::from_amplitudes([a, b, c, d])
    }

    pub fn from_amplitudes(amps: [Complex64; 4]) -> Result<Self, StateError> {
        Self::with_tolerance(amps, NORM_TOL)
    }

    /// Like [`Self::from_amplitudes`] but with a caller-chosen norm tolerance.
    pub fn with_tolerance(amps: [Complex64; 4], tol: f64) -> Result<Self, StateError> {
        check_finite(&amps)?;
        let norm_sq = norm_sq(&amps);
        if (norm_sq - 1.0).abs() > tol {
            return Err(StateError::NotNormalized { norm_sq, tol });
        }
        Ok(Self { amps })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amps: [Complex64; 4]) -> Result<Self, StateError> {
        check_finite(&amps)?;
        let n = norm_sq(&amps).sqrt();
        if n == 0.0 {
            return Err(StateError::ZeroNorm);
        }
        Ok(Self { amps: amps.map(|z| z / n) })
    }

    /// Wraps amplitudes without checking the norm. Used for products with
    /// operators that are unitary by construction.
    pub(crate) fn from_raw(amps: [Complex64; 4]) -> Self {
        Self { amps }
    }

    pub fn basis(index: usize) -> Self {
        let mut amps = [ZERO; 4];
        amps[index] = ONE;
        Self { amps }
    }

    pub fn up_up() -> Self {
        Self::basis(0)
    }

    pub fn up_down() -> Self {
        Self::basis(1)
    }

    pub fn down_up() -> Self {
        Self::basis(2)
    }

    pub fn down_down() -> Self {
        Self::basis(3)
    }

    /// `(|↑↓⟩ + |↓↑⟩)/√2`
    pub fn triplet_zero() -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { amps: [ZERO, s, s, ZERO] }
    }

    /// `(|↑↓⟩ - |↓↑⟩)/√2`
    pub fn singlet() -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { amps: [ZERO, s, -s, ZERO] }
    }

    pub fn a(&self) -> Complex64 {
        self.amps[0]
    }

    pub fn b(&self) -> Complex64 {
        self.amps[1]
    }

    pub fn c(&self) -> Complex64 {
        self.amps[2]
    }

    pub fn d(&self) -> Complex64 {
        self.amps[3]
    }

    pub fn amplitudes(&self) -> [Complex64; 4] {
        self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.amps)
    }

    /// Multiplies every amplitude by `e^{iα}`.
    pub fn with_global_phase(&self, alpha: f64) -> Self {
        let phase = Complex64::from_polar(1.0, alpha);
        Self { amps: self.amps.map(|z| z * phase) }
    }

    /// Largest entrywise modulus of `self - other` (amplitude level, no phase
    /// freedom).
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps.iter().zip(other.amps.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Neg for PureState2Q {
    type Output = Self;

    fn neg(self) -> Self {
        Self { amps: self.amps.map(|z| -z) }
    }
}

impl From<PureState2Q> for [[f64; 2]; 4] {
    fn from(s: PureState2Q) -> Self {
        s.amps.map(|z| [z.re, z.im])
    }
}

impl TryFrom<[[f64; 2]; 4]> for PureState2Q {
    type Error = StateError;

    fn try_from(pairs: [[f64; 2]; 4]) -> Result<Self, StateError> {
        Self::from_amplitudes(pairs.map(|[re, im]| Complex64::new(re, im)))
    }
}

impl fmt::Display for PureState2Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const LABELS: [&str; 4] = ["↑↑", "↑↓", "↓↑", "↓↓"];
        for (k, (z, label)) in self.amps.iter().zip(LABELS).enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:+.6}{:+.6}i)|{}⟩", z.re, z.im, label)?;
        }
        Ok(())
    }
}

fn check_finite(amps: &[Complex64; 4]) -> Result<(), StateError> {
    if amps.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(StateError::NonFinite)
    }
}

fn norm_sq(amps: &[Complex64; 4]) -> f64 {
    amps.iter().map(|z| z.norm_sqr()).sum()
}

/// `⟨lhs|rhs⟩`, conjugate-linear in `lhs`.
pub fn inner(lhs: &PureState2Q, rhs: &PureState2Q) -> Complex64 {
    lhs.amps.iter().zip(rhs.amps.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Applies `op` to `state`. The result has unit norm whenever `op` is unitary;
/// no renormalization is performed.
pub fn apply(op: &Operator4, state: &PureState2Q) -> PureState2Q {
    PureState2Q::from_raw(op.mul_vec(&state.amps))
}

/// Squared Fubini–Study distance `γ²(1 - |⟨x|y⟩|²)`.
///
/// Evaluated through the Lagrange identity
/// `‖x‖²‖y‖² - |⟨x|y⟩|² = Σ_{i<j} |x_i y_j - x_j y_i|²`, which has no
/// cancellation for nearby states. This is what lets finite-difference
/// metric estimates work at small step sizes.
pub fn fs_distance_sq(x: &PureState2Q, y: &PureState2Q, gamma: f64) -> f64 {
    let (xa, ya) = (&x.amps, &y.amps);
    let mut acc = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            acc += (xa[i] * ya[j] - xa[j] * ya[i]).norm_sqr();
        }
    }
    gamma * gamma * acc
}

/// True iff `x` and `y` are the same ray: `|⟨x|y⟩|² ≥ 1 - tol`.
pub fn ray_equal(x: &PureState2Q, y: &PureState2Q, tol: f64) -> bool {
    inner(x, y).norm_sqr() >= 1.0 - tol
}

/// Dense 4x4 complex matrix, row-major in the canonical basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Operator4 {
    m: [[Complex64; 4]; 4],
}

impl Operator4 {
    pub fn from_rows(m: [[Complex64; 4]; 4]) -> Self {
        Self { m }
    }

    pub fn zero() -> Self {
        Self { m: [[ZERO; 4]; 4] }
    }

    pub fn identity() -> Self {
        Self::diagonal([ONE; 4])
    }

    pub fn diagonal(diag: [Complex64; 4]) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (k, z) in diag.into_iter().enumerate() {
            m[k][k] = z;
        }
        Self { m }
    }

    /// `|ket⟩⟨bra|`
    pub fn outer(ket: &PureState2Q, bra: &PureState2Q) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = ket.amps[i] * bra.amps[j].conj();
            }
        }
        Self { m }
    }

    /// Kronecker product `left ⊗ right` of two single-qubit operators,
    /// with `left` acting on the first spin.
    pub fn kron(left: &[[Complex64; 2]; 2], right: &[[Complex64; 2]; 2]) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = left[i / 2][j / 2] * right[i % 2][j % 2];
            }
        }
        Self { m }
    }

    pub fn rows(&self) -> &[[Complex64; 4]; 4] {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn set_entry(&mut self, row: usize, col: usize, value: Complex64) {
        self.m[row][col] = value;
    }

    pub fn adjoint(&self) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = self.m[j][i].conj();
            }
        }
        Self { m }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { m: self.m.map(|row| row.map(|z| z * s)) }
    }

    pub fn mul_vec(&self, v: &[Complex64; 4]) -> [Complex64; 4] {
        let mut out = [ZERO; 4];
        for (o, row) in out.iter_mut().zip(self.m.iter()) {
            *o = row.iter().zip(v.iter()).map(|(x, y)| x * y).sum();
        }
        out
    }

    /// Entrywise max modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_diff(&Self::zero())
    }

    /// Entrywise max of `|U†U - I|`.
    pub fn unitarity_residual(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Self::identity())
    }

    /// Entrywise max of `|H - H†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `[self, other]`
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }
}

impl Mul for Operator4 {
    type Output = Operator4;

    fn mul(self, rhs: Operator4) -> Operator4 {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = (0..4).map(|k| self.m[i][k] * rhs.m[k][j]).sum();
            }
        }
        Operator4 { m }
    }
}

impl Add for Operator4 {
    type Output = Operator4;

    fn add(self, rhs: Operator4) -> Operator4 {
        let mut m = self.m;
        for (row, rrow) in m.iter_mut().zip(rhs.m.iter()) {
            for (z, r) in row.iter_mut().zip(rrow.iter()) {
                *z += r;
            }
        }
        Operator4 { m }
    }
}

impl Sub for Operator4 {
    type Output = Operator4;

    fn sub(self, rhs: Operator4) -> Operator4 {
        self + rhs.scale(-ONE)
    }
}
