//! Acceptance gate: one test per shipped guarantee, each printing a
//! criterion line. Sampled configs use fixed seeds; sampler bounds encode
//! conditioning limits of f64 arithmetic, not physics.

use std::f64::consts::PI;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kposc::cli::{build_verify_report, map_request, stability_csv, StabilityMapArgs};
use kposc::observables::ModeFunction;
use kposc::oracle::{self, IntegratorSettings};
use kposc::oscillator::{mode_basis, DampingRegime, OscillatorConfig};
use kposc::sweep::{self, StabilityClass};
use kposc::tolerances;
use kposc::transfer::{chebyshev_u, closed_form_power, propagate_direct, step_matrix, TransferMatrix};

fn criterion<F: FnOnce() + std::panic::UnwindSafe>(n: u32, label: &str, body: F) {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(()) => println!("criterion {n} ({label}): PASS"),
        Err(cause) => {
            println!("criterion {n} ({label}): FAIL");
            resume_unwind(cause);
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sample_config(rng: &mut ChaCha8Rng, regime: DampingRegime, n_kicks: u32) -> OscillatorConfig {
    let omega0 = 10f64.powf(rng.gen_range(-1.0..1.0));
    let gamma = match regime {
        DampingRegime::Undamped => 0.0,
        DampingRegime::Weak => omega0 * rng.gen_range(0.05..0.95),
        DampingRegime::Strong => omega0 * rng.gen_range(1.05..3.0),
    };
    let tau = rng.gen_range(0.3..2.5) / omega0;
    let kappa = omega0 * rng.gen_range(-1.0..1.0);
    OscillatorConfig::new(omega0, gamma, kappa, tau, n_kicks).unwrap()
}

fn any_regime(rng: &mut ChaCha8Rng) -> DampingRegime {
    match rng.gen_range(0..3) {
        0 => DampingRegime::Undamped,
        1 => DampingRegime::Weak,
        _ => DampingRegime::Strong,
    }
}

/// Rejection-sample into a half-trace window; the strong-regime guard keeps
/// e^{Omega tau (n+1)} inside f64 range.
fn sample_with_chi(
    rng: &mut ChaCha8Rng,
    regime: DampingRegime,
    lo: f64,
    hi: f64,
    n: u32,
) -> OscillatorConfig {
    loop {
        let config = sample_config(rng, regime, n);
        let basis = mode_basis(&config).unwrap();
        if regime == DampingRegime::Strong
            && basis.big_omega * config.tau * f64::from(n + 1) > 40.0
        {
            continue;
        }
        let x = basis.chi_half.re.abs();
        if x >= lo && x <= hi {
            return config;
        }
    }
}

#[test]
fn criterion_1_free_oscillator_identity() {
    criterion(1, "free-oscillator identity", || {
        let config = OscillatorConfig::new(1.0, 0.0, 0.0, 1.0, 0).unwrap();
        let mode = ModeFunction::new(&config).unwrap();
        let canonical = mode.sample_grid(50.0, 1000).unwrap();
        assert_eq!(canonical.len(), 1000);
        for sample in &canonical {
            assert!(
                (sample.k_coeff - 1.0).abs() <= 1e-12,
                "canonical K({}) = {}",
                sample.t,
                sample.k_coeff
            );
        }
        let basis = mode_basis(&config).unwrap();
        let settings = IntegratorSettings::new(50.0)
            .with_steps(10_000)
            .with_stride(500);
        let oracle_samples = oracle::integrate_trajectory(&config, &basis, &settings).unwrap();
        assert!(oracle_samples.len() >= 1000, "got {}", oracle_samples.len());
        for sample in &oracle_samples {
            assert!(
                (sample.k_coeff - 1.0).abs() <= 1e-8,
                "oracle K({}) = {}",
                sample.t,
                sample.k_coeff
            );
        }
    });
}

#[test]
fn criterion_2_single_kick_regression() {
    criterion(2, "single-kick regression", || {
        let config = OscillatorConfig::new(1.0, 0.0, 0.5, PI / 2.0, 1).unwrap();
        let mode = ModeFunction::new(&config).unwrap();
        let expected = Complex64::new(-1.0, 1.0);
        let eps = mode.epsilon_at(PI).unwrap();
        assert!((eps - expected).norm() <= 1e-9, "canonical eps(pi) = {eps}");
        let k = mode.squeeze_coefficient(PI).unwrap();
        assert!((k - 2.0).abs() <= 1e-9, "canonical K(pi) = {k}");

        let basis = mode_basis(&config).unwrap();
        let settings = IntegratorSettings::new(PI).with_steps(10_000);
        let samples = oracle::integrate_trajectory(&config, &basis, &settings).unwrap();
        let last = samples.last().unwrap();
        assert!((last.t - PI).abs() <= 1e-12);
        let eps_o = last.epsilon;
        assert!((eps_o - expected).norm() <= 1e-6, "oracle eps(pi) = {eps_o}");
        assert!((last.k_coeff - 2.0).abs() <= 1e-6, "oracle K(pi) = {}", last.k_coeff);
    });
}

#[test]
fn criterion_3_canonical_vs_oracle_sweep() {
    criterion(3, "canonical vs oracle sweep", || {
        let started = Instant::now();
        let mut rng = rng(101);
        let mut worst = 0.0f64;
        for case in 0..100 {
            // conditioning: the tolerance is absolute, so cap the peak
            // canonical K; resonant growth would otherwise push K beyond
            // what any fixed-step comparison can resolve
            let (config, mode, t_end) = loop {
                let regime = any_regime(&mut rng);
                let n_kicks = rng.gen_range(0..=20u32);
                let config = sample_config(&mut rng, regime, n_kicks);
                let basis = mode_basis(&config).unwrap();
                if basis.chi_half.norm() > 1.5 {
                    continue;
                }
                let t_end = f64::from(config.n_kicks + 5) * config.tau;
                let mode = ModeFunction::new(&config).unwrap();
                let peak = mode
                    .sample_grid(t_end, 200)
                    .unwrap()
                    .iter()
                    .map(|s| s.k_coeff)
                    .fold(0.0, f64::max);
                if peak <= 1e4 {
                    break (config, mode, t_end);
                }
            };
            let basis = mode_basis(&config).unwrap();
            let settings = IntegratorSettings::new(t_end)
                .with_steps(10_000)
                .with_stride(1_000);
            let samples = oracle::integrate_trajectory(&config, &basis, &settings).unwrap();
            for sample in &samples {
                let k = mode.squeeze_coefficient(sample.t).unwrap();
                let dev = (k - sample.k_coeff).abs();
                worst = worst.max(dev);
                assert!(
                    dev <= tolerances::ORACLE_VS_CLOSED_ABS,
                    "case {case}: |dK| = {dev:e} at t = {} for {config:?}",
                    sample.t
                );
            }
        }
        let elapsed = started.elapsed();
        assert!(elapsed.as_secs() <= 120, "sweep took {elapsed:?}");
        println!("  100 configs, max |K_canonical - K_oracle| = {worst:e}, {elapsed:?}");
    });
}

#[test]
fn criterion_4_closed_form_matrix_power() {
    criterion(4, "closed-form matrix power", || {
        let mut rng = rng(102);
        // elliptic tier: 100 configs, n up to 1000, relative 1e-9
        for i in 0..100 {
            let regime = if i % 2 == 0 {
                DampingRegime::Undamped
            } else {
                DampingRegime::Weak
            };
            let n = rng.gen_range(1..=1000u32);
            let config = sample_with_chi(&mut rng, regime, 0.0, 1.0 - 1e-6, n);
            let basis = mode_basis(&config).unwrap();
            let direct = propagate_direct(&basis, config.kappa, config.tau, n).unwrap();
            let power = closed_form_power(&basis, config.kappa, config.tau, n).unwrap();
            let (a, b) = power.apply(basis.a0, basis.b0);
            let dev = ((direct.a - a).norm_sqr() + (direct.b - b).norm_sqr()).sqrt();
            let scale = direct.norm().max(1.0);
            assert!(
                dev <= tolerances::DIRECT_VS_CLOSED_ELLIPTIC_REL * scale,
                "elliptic dev {dev:e} at n = {n} for {config:?}"
            );
        }
        // hyperbolic tier: 100 configs, n up to 100, relative 1e-6
        for _ in 0..100 {
            let regime = any_regime(&mut rng);
            let n = rng.gen_range(1..=100u32);
            let config = sample_with_chi(&mut rng, regime, 1.0 + 1e-6, 2.0, n);
            let basis = mode_basis(&config).unwrap();
            let direct = propagate_direct(&basis, config.kappa, config.tau, n).unwrap();
            let power = closed_form_power(&basis, config.kappa, config.tau, n).unwrap();
            let (a, b) = power.apply(basis.a0, basis.b0);
            let dev = ((direct.a - a).norm_sqr() + (direct.b - b).norm_sqr()).sqrt();
            let scale = direct.norm().max(1.0);
            assert!(
                dev <= tolerances::DIRECT_VS_CLOSED_HYPERBOLIC_REL * scale,
                "hyperbolic dev {dev:e} at n = {n} for {config:?}"
            );
        }
    });
}

#[test]
fn criterion_5_conservation_suite() {
    criterion(5, "conservation suite", || {
        let mut rng = rng(103);
        // determinant of the accumulated step product, n up to 1000. The
        // 1e-10 absolute budget needs bounded entries, so stay on the
        // elliptic band away from its edge and keep the kick ratio tame.
        for _ in 0..20 {
            let config = loop {
                let omega0 = 10f64.powf(rng.gen_range(-1.0..1.0));
                let gamma = if rng.gen_bool(0.5) {
                    0.0
                } else {
                    omega0 * rng.gen_range(0.05..0.6)
                };
                let tau = rng.gen_range(0.3..2.5) / omega0;
                let kappa = omega0 * rng.gen_range(-0.8..0.8);
                let config = OscillatorConfig::new(omega0, gamma, kappa, tau, 1000).unwrap();
                if mode_basis(&config).unwrap().chi_half.re.abs() <= 0.9 {
                    break config;
                }
            };
            let basis = mode_basis(&config).unwrap();
            let mut product = TransferMatrix::identity();
            let mut max_residual = 0.0f64;
            for k in 1..=1000u32 {
                product = step_matrix(&basis, config.kappa, config.tau, k).unwrap() * product;
                let residual = (product.det() - Complex64::new(1.0, 0.0)).norm();
                max_residual = max_residual.max(residual);
            }
            assert!(
                max_residual <= tolerances::PRODUCT_DET_ABS,
                "det residual {max_residual:e} for {config:?}"
            );
        }
        // Wronskian along integrated trajectories
        for _ in 0..20 {
            let regime = any_regime(&mut rng);
            let n = rng.gen_range(1..=10u32);
            let config = sample_with_chi(&mut rng, regime, 0.0, 1.3, n);
            let basis = mode_basis(&config).unwrap();
            let t_end = match regime {
                DampingRegime::Strong => {
                    (7.0 / basis.big_omega).min(f64::from(n + 2) * config.tau)
                }
                _ => f64::from(n + 2) * config.tau,
            };
            let settings = IntegratorSettings::new(t_end)
                .with_steps(2_000)
                .with_stride(200);
            let samples = oracle::integrate_trajectory(&config, &basis, &settings).unwrap();
            for sample in &samples {
                let residual = oracle::wronskian_residual(sample, config.gamma, basis.big_omega);
                assert!(
                    residual <= tolerances::WRONSKIAN_ABS,
                    "Wronskian residual {residual:e} at t = {} for {config:?}",
                    sample.t
                );
            }
        }
        // Pell identity on the closed elliptic band
        for _ in 0..20 {
            let regime = any_regime(&mut rng);
            let config = sample_with_chi(&mut rng, regime, 0.0, 1.0, 1);
            let x = mode_basis(&config).unwrap().chi_half;
            for n in 1..=200i64 {
                let u1 = chebyshev_u(n - 1, x);
                let u2 = chebyshev_u(n - 2, x);
                let residual =
                    (u1 * u1 + u2 * u2 - 2.0 * x * u1 * u2 - Complex64::new(1.0, 0.0)).norm();
                assert!(
                    residual <= tolerances::PELL_ABS,
                    "Pell residual {residual:e} at n = {n}, chi/2 = {x}"
                );
            }
        }
    });
}

#[test]
fn criterion_6_regime_limits() {
    criterion(6, "regime limits", || {
        // weak -> undamped at gamma = 1e-8, t <= 20; one free and one
        // kicked comparison. The kick strength stays small because the
        // deviation floor is 2 gamma t times the peak K.
        for (kappa, tau, n_kicks) in [(0.0, 1.0, 0u32), (0.1, 1.5, 13u32)] {
            let undamped = OscillatorConfig::new(1.0, 0.0, kappa, tau, n_kicks).unwrap();
            let weak = OscillatorConfig::new(
                1.0,
                tolerances::WEAK_LIMIT_GAMMA,
                kappa,
                tau,
                n_kicks,
            )
            .unwrap();
            let mode_u = ModeFunction::new(&undamped).unwrap();
            let mode_w = ModeFunction::new(&weak).unwrap();
            assert_eq!(weak.regime().unwrap(), DampingRegime::Weak);
            let mut max_dev = 0.0f64;
            for i in 0..=2000 {
                let t = 20.0 * f64::from(i) / 2000.0;
                let dev =
                    (mode_u.squeeze_coefficient(t).unwrap() - mode_w.squeeze_coefficient(t).unwrap())
                        .abs();
                max_dev = max_dev.max(dev);
            }
            assert!(
                max_dev <= tolerances::WEAK_LIMIT_K_ABS,
                "weak limit dev {max_dev:e} for kappa = {kappa}"
            );
        }
        // strong kick-free tail: K e^{-2 mu1 t} settles on |A0|^2 at t = 30/Omega
        let mut rng = rng(104);
        for _ in 0..10 {
            let mut config = sample_config(&mut rng, DampingRegime::Strong, 0);
            config.kappa = 0.0;
            let basis = mode_basis(&config).unwrap();
            let mode = ModeFunction::new(&config).unwrap();
            let t = 30.0 / basis.big_omega;
            let rescaled =
                mode.squeeze_coefficient(t).unwrap() * (-2.0 * basis.mu1.re * t).exp();
            assert!(
                (rescaled - basis.a0.norm_sqr()).abs() <= tolerances::STRONG_TAIL_REL,
                "strong tail {rescaled} vs {} for {config:?}",
                basis.a0.norm_sqr()
            );
        }
    });
}

#[test]
fn criterion_7_stability_map() {
    criterion(7, "stability map", || {
        let started = Instant::now();
        let args = StabilityMapArgs {
            omega0: 1.0,
            gamma: 0.0,
            x_min: None,
            x_max: None,
            x_count: 400,
            y_min: 0.0,
            y_max: 1.0,
            y_count: 200,
            out: None,
        };
        let request = map_request(&args).unwrap();

        // bit-identical output across concurrency degrees
        let csv_serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| stability_csv(&request).unwrap());
        let csv_parallel = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| stability_csv(&request).unwrap());
        assert_eq!(csv_serial, csv_parallel, "map differs across thread counts");

        let cells = sweep::stability_map(&request).unwrap();
        let (nx, ny) = (request.x.count, request.y.count);
        assert_eq!(cells.len(), nx * ny);
        let class_at = |xi: usize, yi: usize| cells[xi * ny + yi].as_ref().unwrap().class;

        // columns where a hyperbolic cell reaches kappa/omega0 <= 2/(ny-1)
        let low_r = 2.0 / (ny - 1) as f64;
        let mut touching = Vec::new();
        for xi in 0..nx {
            if (0..3).any(|yi| class_at(xi, yi) == StabilityClass::Hyperbolic) {
                touching.push(xi);
            }
        }
        let dx = (request.x.max - request.x.min) / (nx - 1) as f64;
        for &xi in &touching {
            let theta = request.x.value(xi);
            let m = (theta / PI).round();
            assert!(
                (theta - m * PI).abs() <= dx + 1e-12,
                "tongue touches axis at omega0 tau = {theta}, not near a multiple of pi"
            );
        }
        // independent 1-D boundary: the resonance edge sits at
        // r = tan(theta/2) above even multiples of pi and at
        // r = tan((theta - pi)/2) to the right of odd ones
        let mut predicted = Vec::new();
        for xi in 0..nx {
            let theta = request.x.value(xi);
            let boundary = if theta < PI {
                (theta / 2.0).tan()
            } else if theta > PI && theta < 1.5 * PI {
                ((theta - PI) / 2.0).tan()
            } else {
                f64::INFINITY
            };
            if boundary <= low_r {
                predicted.push(xi);
            }
        }
        assert_eq!(
            touching, predicted,
            "touching columns disagree with the analytic tongue boundary"
        );
        assert!(!touching.is_empty(), "no tongue reached the kappa = 0 axis");

        // classes sanity: the pi column is degenerate, interior is mixed
        assert!(cells.iter().all(|c| c.is_ok()));
        assert!(cells
            .iter()
            .any(|c| c.as_ref().unwrap().class == StabilityClass::Elliptic));
        let elapsed = started.elapsed();
        assert!(elapsed.as_secs() <= 30, "map took {elapsed:?}");
        println!("  touching columns {touching:?}, {elapsed:?}");
    });
}

#[test]
fn criterion_8_typo_documentation() {
    criterion(8, "typo documentation", || {
        let config = OscillatorConfig::new(1.0, 0.0, 0.5, PI / 2.0, 1).unwrap();
        let report = build_verify_report(&config, PI, 10_000).unwrap();
        let last = report.rows.last().unwrap();
        assert!((last.t - PI).abs() <= 1e-12);
        assert!(
            (last.k_canonical - 2.0).abs() <= 1e-9,
            "canonical K(pi) = {}",
            last.k_canonical
        );
        let printed = last.k_closed.expect("undamped closed form is evaluated");
        assert!((printed - 1.0).abs() <= 1e-9, "printed K(pi) = {printed}");
        let closed = report.closed_form.as_ref().expect("closed-form section");
        assert!(
            closed.max_dev > 0.9,
            "recorded deviation {} does not expose the discrepancy",
            closed.max_dev
        );
        assert!(!closed.offsets.is_empty());
        assert!(
            report.max_canonical_vs_oracle <= report.oracle_tolerance,
            "oracle comparison broke: {}",
            report.max_canonical_vs_oracle
        );
        assert!(report.pass, "verify must not fail on the printed-form gap");
    });
}

#[test]
fn criterion_9_integrator_order() {
    criterion(9, "integrator order", || {
        let config = OscillatorConfig::new(1.0, 0.6, 0.0, 1.0, 0).unwrap();
        let basis = mode_basis(&config).unwrap();
        let mode = ModeFunction::new(&config).unwrap();
        let mut errors = Vec::new();
        for steps in [100u32, 200, 400, 800] {
            let settings = IntegratorSettings::new(5.0)
                .with_steps(steps)
                .with_stride(steps / 10);
            let samples = oracle::integrate_trajectory(&config, &basis, &settings).unwrap();
            let err = samples
                .iter()
                .map(|s| (s.k_coeff - mode.squeeze_coefficient(s.t).unwrap()).abs())
                .fold(0.0, f64::max);
            errors.push(err);
        }
        for pair in errors.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!(
                ratio >= tolerances::RK4_ORDER_RATIO_MIN,
                "convergence ratio {ratio} from errors {errors:?}"
            );
        }
        println!("  step-halving errors {errors:?}");
    });
}
