//! Acceptance criteria, one PASS/FAIL line each.
//!
//! The report is printed on every run; every criterion runs even if an
//! earlier one fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};
use std::io::Write;
use std::path::Path;
use std::process::Command;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spin_torus::entanglement::{
    concurrence_evolved, concurrence_wootters_oracle, max_entanglement_time, product_state,
};
use spin_torus::hamiltonian::{build_h, eigensystem, propagator_analytic, propagator_spectral, SystemParams};
use spin_torus::manifold::{
    classify, component_spread, diagonalize_check, evolve_family, evolve_family_sheared, family_invariants,
    metric_analytic, metric_numeric, positivity_identities, shear, CircleDirection, ManifoldKind, TorusPoint,
    DEFAULT_FD_STEP, SHEAR_DEGENERACY_TOL,
};
use spin_torus::qstate::{ray_equal, PureState2Q};
use spin_torus::scenario::RunRecord;
use spin_torus::{concurrence, ProductKind};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SEED: u64 = 0x00AC_CE97;

fn rng(offset: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED + offset)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_state<R: Rng>(rng: &mut R) -> PureState2Q {
    let amps = [(); 4].map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    PureState2Q::normalized(amps).unwrap()
}

fn random_point<R: Rng>(rng: &mut R) -> TorusPoint {
    TorusPoint::new(rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI))
}

fn eigenvalues() -> Outcome {
    let p = SystemParams::with_unit_gamma(1.0, 0.5);
    let sys = eigensystem(&p);
    let mut got = sys.eigenvalues();
    got.sort_by(f64::total_cmp);
    let value_err = got.iter().zip([-2.0, 1.0, 2.0, 3.0]).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let h = build_h(&p);
    let mut residual = 0.0_f64;
    for (lambda, v) in sys.pairs {
        for (hv, vi) in h.mul_vec(&v.amplitudes()).iter().zip(v.amplitudes()) {
            residual = residual.max((hv - vi * lambda).norm());
        }
    }
    check(
        value_err < 1e-12 && residual < 1e-12,
        format!("eigenvalues {got:?}, value error {value_err:.1e}, |Hv-λv| {residual:.1e}"),
    )
}

fn propagator_cross_check() -> Outcome {
    let mut rng = rng(2);
    let mut cross = 0.0_f64;
    let mut unitarity = 0.0_f64;
    let (mut zero_j, mut series) = (0, 0);
    for i in 0..100 {
        let h = rng.gen_range(-2.0..2.0);
        let t: f64 = rng.gen_range(-3.0..3.0);
        let j = match i % 10 {
            0 => 0.0,
            1 | 2 => rng.gen_range(-4e-7..4e-7) / t.abs().max(1.0),
            _ => rng.gen_range(-2.5..2.5),
        };
        if j == 0.0 {
            zero_j += 1;
        } else if (2.0 * j * t).abs() < 1e-6 {
            series += 1;
        }
        let p = SystemParams::with_unit_gamma(j, h);
        let u = propagator_analytic(&p, t);
        cross = cross.max(u.max_abs_diff(&propagator_spectral(&p, t)));
        unitarity = unitarity.max(u.unitarity_residual());
    }
    check(
        cross < 1e-10 && unitarity < 1e-12 && zero_j > 0 && series > 0,
        format!("analytic vs spectral {cross:.1e}, unitarity {unitarity:.1e} ({zero_j} J=0, {series} series draws)"),
    )
}

fn metric_oracle() -> Outcome {
    let mut rng = rng(3);
    let mut oracle = 0.0_f64;
    let mut spread = 0.0_f64;
    for _ in 0..50 {
        let psi = random_state(&mut rng);
        let analytic = metric_analytic(&psi, 1.0);
        let samples: Vec<[f64; 3]> = (0..3)
            .map(|_| {
                let m = metric_numeric(&psi, random_point(&mut rng), 1.0, DEFAULT_FD_STEP).unwrap();
                oracle = oracle.max(m.max_component_diff(&analytic));
                m.components()
            })
            .collect();
        spread = spread.max(component_spread(&samples));
    }
    check(oracle < 1e-6 && spread < 1e-6, format!("analytic vs finite difference {oracle:.1e}, spread {spread:.1e}"))
}

fn diagonalization() -> Outcome {
    let mut rng = rng(4);
    let mut worst = 0.0_f64;
    let mut tested = 0;
    while tested < 50 {
        let psi = random_state(&mut rng);
        if family_invariants(&psi).a_minus_d_sq() <= SHEAR_DEGENERACY_TOL {
            continue;
        }
        worst = worst.max(diagonalize_check(&psi, 1.0).map_err(|e| e.to_string())?);
        tested += 1;
    }
    check(worst < 1e-8, format!("sheared cross term {worst:.1e} over {tested} states"))
}

fn positivity() -> Outcome {
    let mut rng = rng(5);
    let mut worst = 0.0_f64;
    let mut negative = 0;
    for _ in 0..200 {
        let ids = positivity_identities(&random_state(&mut rng));
        worst = worst.max(ids.max_residual());
        if ids.sheared_rhs < 0.0 || ids.phi_rhs < 0.0 {
            negative += 1;
        }
    }
    check(worst < 1e-10 && negative == 0, format!("identity residual {worst:.1e}"))
}

fn plus_minus_scenario() -> Outcome {
    let mut metric_err = 0.0_f64;
    for chi in [0.3, FRAC_PI_3, FRAC_PI_2] {
        for gamma in [1.0, 1.7] {
            let psi = product_state(ProductKind::PlusMinus, chi, 0.4);
            let m = metric_analytic(&psi, gamma);
            let g2 = gamma * gamma;
            let want = [g2, 0.0, g2 * chi.sin().powi(2) / 2.0];
            for (x, y) in m.components().iter().zip(want) {
                metric_err = metric_err.max((x - y).abs());
            }
        }
    }

    let psi = product_state(ProductKind::PlusMinus, 0.9, 0.2);
    let mut profile_err = 0.0_f64;
    for i in 0..4096 {
        let theta = PI * i as f64 / 4095.0;
        let cc = concurrence(&evolve_family(&psi, TorusPoint::new(theta, 0.0)));
        profile_err = profile_err.max((cc - (2.0 * theta).sin().abs()).abs());
        profile_err = profile_err.max((concurrence_evolved(&psi, theta) - (2.0 * theta).sin().abs()).abs());
    }

    let mut time_err = 0.0_f64;
    for j in [0.5, 1.0, 2.0] {
        let found = max_entanglement_time(&psi, &SystemParams::with_unit_gamma(j, 0.3)).map_err(|e| e.to_string())?;
        time_err = time_err.max((found.t - PI / (8.0 * j)).abs());
    }
    check(
        metric_err < 1e-10 && profile_err < 1e-12 && time_err < 1e-10,
        format!("metric {metric_err:.1e}, profile {profile_err:.1e}, t_max {time_err:.1e}"),
    )
}

fn up_down_scenario() -> Outcome {
    let psi = PureState2Q::up_down();
    let mut radius_err = 0.0_f64;
    let mut kind_ok = true;
    for gamma in [1.0, 2.5] {
        let r = classify(&psi, gamma);
        kind_ok &= r.kind == ManifoldKind::Circle && r.dimension == 1;
        radius_err = radius_err.max((r.circle_radius.unwrap_or(f64::INFINITY) - gamma).abs());
    }
    let c_quarter = concurrence(&evolve_family(&psi, TorusPoint::new(FRAC_PI_4, 0.0)));
    let target = PureState2Q::new(c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0), c(0.0, -FRAC_1_SQRT_2), c(0.0, 0.0)).unwrap();
    let mut ray_ok = true;
    for phi in [0.0, 1.1, 4.0] {
        ray_ok &= ray_equal(&evolve_family(&psi, TorusPoint::new(FRAC_PI_4, phi)), &target, 1e-10);
    }
    check(
        kind_ok && radius_err < 1e-12 && (c_quarter - 1.0).abs() < 1e-12 && ray_ok,
        format!("circle radius error {radius_err:.1e}, C(π/4) = {c_quarter}, ray-equal {ray_ok}"),
    )
}

fn plus_plus_scenario() -> Outcome {
    let mut radius_err = 0.0_f64;
    let mut kind_ok = true;
    let mut c_max = 0.0_f64;
    for kind in [ProductKind::PlusPlus, ProductKind::MinusMinus] {
        for (chi, gamma_az, gamma) in [(0.3, 0.0, 1.0), (FRAC_PI_3, 0.7, 2.0), (FRAC_PI_2, -1.2, 1.0), (2.6, 2.0, 0.5)]
        {
            let psi = product_state(kind, chi, gamma_az);
            let r = classify(&psi, gamma);
            kind_ok &= r.kind == ManifoldKind::Circle && r.circle_direction == Some(CircleDirection::Phi);
            let want = gamma * chi.sin() / 2f64.sqrt();
            radius_err = radius_err.max((r.circle_radius.unwrap_or(f64::INFINITY) - want).abs());
            for i in 0..64 {
                for jj in 0..16 {
                    let pt = TorusPoint::new(PI * i as f64 / 64.0, 2.0 * PI * jj as f64 / 16.0);
                    c_max = c_max.max(concurrence(&evolve_family(&psi, pt)));
                }
            }
        }
    }
    check(
        kind_ok && radius_err < 1e-10 && c_max < 1e-12,
        format!("circle radius error {radius_err:.1e}, max C on orbit {c_max:.1e}"),
    )
}

fn concurrence_oracles() -> Outcome {
    let mut rng = rng(9);
    let mut agree = 0.0_f64;
    let mut phi_dep = 0.0_f64;
    for _ in 0..100 {
        let psi = random_state(&mut rng);
        let theta = rng.gen_range(0.0..PI);
        let evolved = evolve_family(&psi, TorusPoint::new(theta, 0.0));
        let closed = concurrence(&evolved);
        let family = concurrence_evolved(&psi, theta);
        let wootters = concurrence_wootters_oracle(&evolved);
        agree = agree.max((closed - family).abs()).max((closed - wootters).abs()).max((family - wootters).abs());
        for _ in 0..5 {
            let phi = rng.gen_range(0.0..2.0 * PI);
            phi_dep = phi_dep.max((concurrence(&evolve_family(&psi, TorusPoint::new(theta, phi))) - closed).abs());
        }
    }
    check(agree < 1e-10 && phi_dep < 1e-12, format!("oracle disagreement {agree:.1e}, φ-dependence {phi_dep:.1e}"))
}

fn periodicity() -> Outcome {
    let mut rng = rng(10);
    let mut plain = 0.0_f64;
    let mut sheared = 0.0_f64;
    for _ in 0..100 {
        let psi = random_state(&mut rng);
        let pt = random_point(&mut rng);
        let base = evolve_family(&psi, pt);
        plain = plain
            .max(evolve_family(&psi, TorusPoint::new(pt.theta + PI, pt.phi)).max_abs_diff(&-base))
            .max(evolve_family(&psi, TorusPoint::new(pt.theta, pt.phi + 2.0 * PI)).max_abs_diff(&base));
        let k = shear(&family_invariants(&psi)).map_err(|e| e.to_string())?;
        let s0 = evolve_family_sheared(&psi, k, pt.theta, pt.phi);
        let s1 = evolve_family_sheared(&psi, k, pt.theta + PI, pt.phi + k * PI);
        sheared = sheared.max(s1.max_abs_diff(&-s0));
    }
    check(plain < 1e-12 && sheared < 1e-10, format!("amplitude periodicity {plain:.1e}, sheared {sheared:.1e}"))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spin-torus"))
}

fn strip_timestamp(text: &str) -> String {
    text.lines().filter(|l| !l.contains("\"generated_at_unix\"")).collect::<Vec<_>>().join("\n")
}

fn run_record(config: &Path, out: &Path) -> Result<String, String> {
    let status = bin().arg("run").arg(config).arg("--out").arg(out).output().map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!("run exited {:?}: {}", status.status.code(), String::from_utf8_lossy(&status.stderr)));
    }
    std::fs::read_to_string(out).map_err(|e| e.to_string())
}

fn cli_determinism() -> Outcome {
    let verify = bin().arg("verify").output().map_err(|e| e.to_string())?;
    let verify_code = verify.status.code();

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("generic.json");
    std::fs::write(
        &config,
        r#"{"initial": {"amplitudes": [[0.5, 0.1], [0.2, 0.5], [0.3, -0.3], [0.1, 0.5099019513592785]]},
            "params": {"j": 0.8, "h_z": 0.3, "gamma": 2.0},
            "grid": {"theta_steps": 17, "phi_steps": 9},
            "outputs": ["metric", "classify", "concurrence_profile", "evolved_states"]}"#,
    )
    .map_err(|e| e.to_string())?;
    let first = run_record(&config, &dir.path().join("a.json"))?;
    let second = run_record(&config, &dir.path().join("b.json"))?;
    let (ra, rb) = (
        RunRecord::from_json(&first).map_err(|e| e.to_string())?,
        RunRecord::from_json(&second).map_err(|e| e.to_string())?,
    );
    let identical = strip_timestamp(&first) == strip_timestamp(&second) && ra.results_json() == rb.results_json();

    let corrupt = bin().args(["verify", "--corrupt-propagator"]).output().map_err(|e| e.to_string())?;
    let corrupt_code = corrupt.status.code();
    check(
        verify_code == Some(0) && identical && corrupt_code == Some(1),
        format!("verify exit {verify_code:?}, reruns identical {identical}, negative control exit {corrupt_code:?}"),
    )
}

/// Writes to the stdout handle directly so the report is not swallowed by
/// the test harness's output capture.
fn report(line: String) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 11] = [
        ("eigenvalues", eigenvalues),
        ("propagator cross-check", propagator_cross_check),
        ("metric oracle and flatness", metric_oracle),
        ("diagonalization", diagonalization),
        ("positivity identities", positivity),
        ("|+-> scenario", plus_minus_scenario),
        ("|ud> scenario", up_down_scenario),
        ("|++> scenario", plus_plus_scenario),
        ("concurrence oracles", concurrence_oracles),
        ("periodicity", periodicity),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        match run() {
            Ok(detail) => report(format!("PASS {n:>2} {name}: {detail}")),
            Err(detail) => {
                report(format!("FAIL {n:>2} {name}: {detail}"));
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
