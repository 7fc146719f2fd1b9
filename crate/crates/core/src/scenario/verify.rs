//! The full invariant and oracle battery, as one report.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::entanglement::{concurrence, concurrence_evolved, concurrence_wootters_oracle};
use crate::hamiltonian::{
    build_h, build_h_int, build_h_mf, eigensystem, propagator_analytic, propagator_spectral, SystemParams,
};
use crate::manifold::{
    component_spread, diagonalize_check, evolve_family, evolve_family_sheared, family_invariants, metric_analytic,
    metric_numeric, positivity_identities, shear, TorusPoint, DEFAULT_FD_STEP, SHEAR_DEGENERACY_TOL,
};
use crate::qstate::{apply, Operator4, PureState2Q};

pub const DEFAULT_VERIFY_SEED: u64 = 2017;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Negative control: flips the sign of one entry of every propagator the
    /// battery builds.
    pub corrupt_propagator: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{verdict}  {:<32} residual {:.3e}  (tol {:.0e})", c.name, c.residual, c.tolerance)?;
        }
        let n_pass = self.checks.iter().filter(|c| c.passed).count();
        write!(f, "{n_pass}/{} checks passed (seed {})", self.checks.len(), self.seed)
    }
}

/// Uniform-in-box amplitudes, normalized.
pub fn random_state<R: Rng>(rng: &mut R) -> PureState2Q {
    let mut amps = [Complex64::new(0.0, 0.0); 4];
    for z in &mut amps {
        *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    PureState2Q::normalized(amps).expect("random amplitudes are nonzero")
}

fn random_point<R: Rng>(rng: &mut R) -> TorusPoint {
    TorusPoint::new(rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI))
}

/// 100 `(J, h_z, t)` draws covering `J = 0` and the `|2Jt| < 1e-6` series
/// branch alongside generic values.
pub fn propagator_draws<R: Rng>(rng: &mut R) -> Vec<(SystemParams, f64)> {
    (0..100)
        .map(|i| {
            let h = rng.gen_range(-2.0..2.0);
            let t: f64 = rng.gen_range(-3.0..3.0);
            let j = match i % 10 {
                0 => 0.0,
                1 => rng.gen_range(-4e-7..4e-7) / t.abs().max(1.0),
                _ => rng.gen_range(-2.0..2.0),
            };
            (SystemParams::with_unit_gamma(j, h), t)
        })
        .collect()
}

struct Battery {
    checks: Vec<CheckOutcome>,
}

impl Battery {
    fn record(&mut self, name: &str, residual: f64, tolerance: f64) {
        let passed = residual.is_finite() && residual < tolerance;
        self.checks.push(CheckOutcome { name: name.to_string(), residual, tolerance, passed });
    }
}

fn propagator(p: &SystemParams, t: f64, corrupt: bool) -> Operator4 {
    let mut u = propagator_analytic(p, t);
    if corrupt {
        u.set_entry(1, 2, -u.entry(1, 2));
    }
    u
}

pub fn verify_all(seed: u64) -> VerifyReport {
    verify_with(VerifyOptions { seed, corrupt_propagator: false })
}

pub fn verify_with(opts: VerifyOptions) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut b = Battery { checks: Vec::new() };
    let gamma = 1.0;

    // Hamiltonian structure
    let mut eig_res = 0.0_f64;
    let mut struct_res = 0.0_f64;
    for i in 0..20 {
        let p = if i == 0 {
            SystemParams::with_unit_gamma(1.0, 0.5)
        } else {
            SystemParams::with_unit_gamma(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
        };
        let h = build_h(&p);
        for (lambda, v) in eigensystem(&p).pairs {
            let hv = h.mul_vec(&v.amplitudes());
            for (x, y) in hv.iter().zip(v.amplitudes()) {
                eig_res = eig_res.max((x - y * lambda).norm());
            }
        }
        let hi = build_h_int(&p);
        let sq = (hi * hi).max_abs_diff(&Operator4::identity().scale(Complex64::new(4.0 * p.j * p.j, 0.0)));
        struct_res = struct_res.max(sq).max(hi.commutator(&build_h_mf(&p)).max_abs());
    }
    b.record("eigenpairs", eig_res, 1e-12);
    b.record("h_int_square_and_commutator", struct_res, 1e-12);

    // Propagators
    let mut unit_res = 0.0_f64;
    let mut cross_res = 0.0_f64;
    let mut norm_res = 0.0_f64;
    let mut family_res = 0.0_f64;
    for (p, t) in propagator_draws(&mut rng) {
        let u = propagator(&p, t, opts.corrupt_propagator);
        unit_res = unit_res.max(u.unitarity_residual());
        cross_res = cross_res.max(u.max_abs_diff(&propagator_spectral(&p, t)));
        let psi = random_state(&mut rng);
        let out = apply(&u, &psi);
        norm_res = norm_res.max((out.norm_sq() - 1.0).abs());
        let fam = evolve_family(&psi, TorusPoint::new(2.0 * p.j * t, 2.0 * p.h_z * t));
        family_res = family_res.max(fam.max_abs_diff(&out));
    }
    b.record("propagator_unitarity", unit_res, 1e-12);
    b.record("propagator_analytic_vs_spectral", cross_res, 1e-10);
    b.record("norm_preservation", norm_res, 1e-12);
    b.record("family_vs_propagator", family_res, 1e-12);

    // Geometry
    let mut oracle_res = 0.0_f64;
    let mut spread_res = 0.0_f64;
    let mut diag_res = 0.0_f64;
    let mut pos_res = 0.0_f64;
    let mut sign_res = 0.0_f64;
    for _ in 0..50 {
        let psi = random_state(&mut rng);
        let analytic = metric_analytic(&psi, gamma);
        let samples: Vec<[f64; 3]> = (0..3)
            .map(|_| {
                let m = metric_numeric(&psi, random_point(&mut rng), gamma, DEFAULT_FD_STEP).expect("step in range");
                oracle_res = oracle_res.max(m.max_component_diff(&analytic));
                m.components()
            })
            .collect();
        spread_res = spread_res.max(component_spread(&samples));
        if family_invariants(&psi).a_minus_d_sq() > SHEAR_DEGENERACY_TOL {
            diag_res = diag_res.max(diagonalize_check(&psi, gamma).expect("non-degenerate"));
        }
        let ids = positivity_identities(&psi);
        pos_res = pos_res.max(ids.max_residual());
        if analytic.g_tt < 0.0 || analytic.g_pp < 0.0 || analytic.determinant() < -1e-15 {
            sign_res = f64::INFINITY;
        }
    }
    b.record("metric_oracle", oracle_res, 1e-6);
    b.record("metric_flatness", spread_res, 1e-6);
    b.record("diagonalization_cross_term", diag_res, 1e-8);
    b.record("positivity_identities", pos_res, 1e-10);
    b.record("metric_nonnegative", sign_res, 1e-12);

    // Periodicity
    let mut period_res = 0.0_f64;
    let mut sheared_res = 0.0_f64;
    for _ in 0..50 {
        let psi = random_state(&mut rng);
        let pt = random_point(&mut rng);
        let base = evolve_family(&psi, pt);
        let flipped = evolve_family(&psi, TorusPoint::new(pt.theta + PI, pt.phi));
        let wound = evolve_family(&psi, TorusPoint::new(pt.theta, pt.phi + 2.0 * PI));
        period_res = period_res.max(flipped.max_abs_diff(&-base)).max(wound.max_abs_diff(&base));
        if let Ok(k) = shear(&family_invariants(&psi)) {
            let s0 = evolve_family_sheared(&psi, k, pt.theta, pt.phi);
            let s1 = evolve_family_sheared(&psi, k, pt.theta + PI, pt.phi + k * PI);
            sheared_res = sheared_res.max(s1.max_abs_diff(&-s0));
        }
    }
    b.record("periodicity", period_res, 1e-12);
    b.record("sheared_periodicity", sheared_res, 1e-10);

    // Entanglement
    let mut conc_res = 0.0_f64;
    let mut phi_res = 0.0_f64;
    for _ in 0..100 {
        let psi = random_state(&mut rng);
        let theta = rng.gen_range(0.0..PI);
        conc_res = conc_res.max((concurrence(&psi) - concurrence_wootters_oracle(&psi)).abs());
        let evolved = evolve_family(&psi, TorusPoint::new(theta, 0.0));
        let closed = concurrence_evolved(&psi, theta);
        conc_res = conc_res.max((closed - concurrence(&evolved)).abs());
        conc_res = conc_res.max((concurrence_wootters_oracle(&evolved) - closed).abs());
        for _ in 0..5 {
            let phi = rng.gen_range(0.0..2.0 * PI);
            let moved = concurrence(&evolve_family(&psi, TorusPoint::new(theta, phi)));
            phi_res = phi_res.max((moved - concurrence(&evolved)).abs());
        }
    }
    b.record("concurrence_oracles", conc_res, 1e-10);
    b.record("concurrence_phi_independence", phi_res, 1e-12);

    VerifyReport { seed: opts.seed, checks: b.checks }
}
