//! The piecewise mode function eps(t), squeezing coefficient K = |eps|^2,
//! coordinate variance, closed-form K diagnostics, and the squeezing-onset
//! detector.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oscillator::{mode_basis, DampingRegime, ModeBasis, OscillatorConfig};
use crate::tolerances;
use crate::transfer::{chebyshev_u, propagate_states, CoefficientState};

/// One trajectory record, produced by the analytic path or the integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub epsilon: Complex64,
    pub epsilon_dot: Complex64,
    /// |epsilon|^2, the squeezing coefficient.
    pub k_coeff: f64,
    /// hbar/(2 m Omega) * k_coeff.
    pub sigma_x: f64,
}

/// The piecewise-exponential mode function: the config, its basis, and one
/// coefficient pair per inter-kick interval.
#[derive(Debug, Clone)]
pub struct ModeFunction {
    config: OscillatorConfig,
    basis: ModeBasis,
    states: Vec<CoefficientState>,
}

impl ModeFunction {
    pub fn new(config: &OscillatorConfig) -> Result<Self> {
        config.validate()?;
        let basis = mode_basis(config)?;
        let states = propagate_states(&basis, config.kappa, config.tau, config.n_kicks)?;
        Ok(Self {
            config: *config,
            basis,
            states,
        })
    }

    pub fn config(&self) -> &OscillatorConfig {
        &self.config
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    pub fn states(&self) -> &[CoefficientState] {
        &self.states
    }

    /// Kicks applied at or before t. A sample exactly at a kick instant uses
    /// the post-kick coefficients; eps is continuous there, so only the
    /// reported eps_dot depends on this convention.
    pub fn kicks_before(&self, t: f64) -> u32 {
        let k = (t / self.config.tau).floor();
        if k <= 0.0 {
            0
        } else if k >= f64::from(self.config.n_kicks) {
            self.config.n_kicks
        } else {
            k as u32
        }
    }

    /// 1-based interval label used by the closed-form diagnostics.
    pub fn interval_index(&self, t: f64) -> u32 {
        self.kicks_before(t) + 1
    }

    fn state_at(&self, t: f64) -> Result<&CoefficientState> {
        if !(t >= 0.0) {
            return Err(Error::OutOfRange {
                what: "t",
                message: format!("time must be >= 0, got {t}"),
            });
        }
        Ok(&self.states[self.kicks_before(t) as usize])
    }

    pub fn epsilon_at(&self, t: f64) -> Result<Complex64> {
        let s = self.state_at(t)?;
        Ok(s.a * (self.basis.mu1 * t).exp() + s.b * (self.basis.mu2 * t).exp())
    }

    pub fn epsilon_dot_at(&self, t: f64) -> Result<Complex64> {
        let s = self.state_at(t)?;
        Ok(s.a * self.basis.mu1 * (self.basis.mu1 * t).exp()
            + s.b * self.basis.mu2 * (self.basis.mu2 * t).exp())
    }

    pub fn squeeze_coefficient(&self, t: f64) -> Result<f64> {
        Ok(self.epsilon_at(t)?.norm_sqr())
    }

    /// K via the four-term exponential cross expansion
    /// |A|^2 e^{(mu1+mu1*)t} + |B|^2 e^{(mu2+mu2*)t} + 2 Re[A B* e^{(mu1+mu2*)t}].
    /// Algebraically identical to |eps|^2; kept as a second route for the
    /// property suite.
    pub fn squeeze_expanded(&self, t: f64) -> Result<f64> {
        let s = self.state_at(t)?;
        let m1 = self.basis.mu1;
        let m2 = self.basis.mu2;
        let direct = s.a.norm_sqr() * ((m1 + m1.conj()) * t).exp().re
            + s.b.norm_sqr() * ((m2 + m2.conj()) * t).exp().re;
        let cross = s.a * s.b.conj() * ((m1 + m2.conj()) * t).exp();
        Ok(direct + 2.0 * cross.re)
    }

    pub fn coordinate_variance(&self, t: f64) -> Result<f64> {
        Ok(self.variance_scale() * self.squeeze_coefficient(t)?)
    }

    /// hbar / (2 m Omega), the variance per unit K.
    pub fn variance_scale(&self) -> f64 {
        self.config.hbar / (2.0 * self.config.mass * self.basis.big_omega)
    }

    pub fn sample(&self, t: f64) -> Result<TrajectorySample> {
        let epsilon = self.epsilon_at(t)?;
        let epsilon_dot = self.epsilon_dot_at(t)?;
        let k_coeff = epsilon.norm_sqr();
        Ok(TrajectorySample {
            t,
            epsilon,
            epsilon_dot,
            k_coeff,
            sigma_x: self.variance_scale() * k_coeff,
        })
    }

    /// Uniform grid of `samples` points over [0, t_end], both ends included.
    pub fn sample_grid(&self, t_end: f64, samples: usize) -> Result<Vec<TrajectorySample>> {
        grid_times(t_end, samples)?
            .into_iter()
            .map(|t| self.sample(t))
            .collect()
    }
}

/// Uniform time grid [0, t_end] with both endpoints.
pub fn grid_times(t_end: f64, samples: usize) -> Result<Vec<f64>> {
    if !t_end.is_finite() || t_end <= 0.0 {
        return Err(Error::Validation {
            field: "t_end",
            message: format!("must be finite and > 0, got {t_end}"),
        });
    }
    if samples < 2 {
        return Err(Error::Validation {
            field: "samples",
            message: format!("need at least 2 grid points, got {samples}"),
        });
    }
    let last = (samples - 1) as f64;
    Ok((0..samples)
        .map(|i| t_end * i as f64 / last)
        .collect())
}

fn require_regime(
    config: &OscillatorConfig,
    operation: &'static str,
    expected: DampingRegime,
) -> Result<ModeBasis> {
    let actual = config.regime()?;
    if actual != expected {
        return Err(Error::WrongRegime {
            operation,
            expected: expected.name(),
            actual: actual.name(),
        });
    }
    mode_basis(config)
}

fn check_interval(t: f64, n: u32) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::OutOfRange {
            what: "t",
            message: format!("time must be >= 0, got {t}"),
        });
    }
    if n < 1 {
        return Err(Error::OutOfRange {
            what: "n",
            message: "interval index is 1-based".into(),
        });
    }
    Ok(())
}

/// Undamped closed form for K in interval n, transcribed term for term from
/// its published statement. Diagnostic only: a hand-checked single-kick case
/// gives 1 here where the canonical path (confirmed by the integrator) gives
/// 2, so deviations are measured and reported, never corrected.
pub fn k_closed_undamped(config: &OscillatorConfig, t: f64, n: u32) -> Result<f64> {
    k_closed_undamped_shifted(config, t, n, 0.0)
}

/// Same form with every interval-indexed time offset (n-1), (n-1/2)
/// shifted by `shift` intervals; the verify report sweeps candidate shifts
/// instead of silently re-deriving the formula.
pub fn k_closed_undamped_shifted(
    config: &OscillatorConfig,
    t: f64,
    n: u32,
    shift: f64,
) -> Result<f64> {
    let basis = require_regime(config, "k_closed_undamped", DampingRegime::Undamped)?;
    check_interval(t, n)?;
    let w = config.omega0;
    let q = config.kappa / w;
    let chi = 2.0 * basis.chi_half.re;
    let u_top = chebyshev_u(i64::from(n) - 1, basis.chi_half).re;
    let u_low = chebyshev_u(i64::from(n) - 2, basis.chi_half).re;
    let nf = f64::from(n);
    let t1 = t - (nf - 1.0 + shift) * config.tau;
    let t2 = t - (nf - 0.5 + shift) * config.tau;
    Ok(u_top * u_top + u_low * u_low + 2.0 * q * u_top * u_top * (2.0 * w * t1).sin()
        - chi * u_top * u_low
        + 4.0 * q * q * u_top * u_top * (w * t1).sin().powi(2)
        - 2.0 * q * u_top * u_low * (2.0 * w * t2).sin())
}

/// Weak-damping closed form for K in interval n, transcribed term for term.
/// The undamped factor inside it is evaluated at the effective frequency
/// Omega with this regime's half-trace; that reading makes the one-kick
/// variant below exact. Diagnostic only, like [`k_closed_undamped`].
pub fn k_closed_weak(config: &OscillatorConfig, t: f64, n: u32) -> Result<f64> {
    k_closed_weak_shifted(config, t, n, 0.0)
}

/// [`k_closed_weak`] with all interval-indexed time offsets shifted by
/// `shift` intervals (the fixed cos/sin(Omega tau) terms carry no offset).
pub fn k_closed_weak_shifted(
    config: &OscillatorConfig,
    t: f64,
    n: u32,
    shift: f64,
) -> Result<f64> {
    let basis = require_regime(config, "k_closed_weak", DampingRegime::Weak)?;
    check_interval(t, n)?;
    let om = basis.big_omega;
    let q = config.kappa / om;
    let g = config.gamma / om;
    let chi = 2.0 * basis.chi_half.re;
    let u1 = chebyshev_u(i64::from(n) - 1, basis.chi_half).re;
    let u2 = chebyshev_u(i64::from(n) - 2, basis.chi_half).re;
    let nf = f64::from(n);
    // offsets are (n + a + shift) tau with a in {-2, -3/2, -1, -1/2, 0}
    let off = |a: f64| (nf + a + shift) * config.tau;
    let s = |a: f64| (2.0 * om * (t - off(a))).sin();
    let c = |a: f64| (2.0 * om * (t - off(a))).cos();

    let sh = (om * (t - off(-1.0))).sin();
    let k0 = u1 * u1 + u2 * u2 + 2.0 * q * u1 * u1 * s(-1.0) - chi * u1 * u2
        + 4.0 * q * q * u1 * u1 * sh * sh
        - 2.0 * q * u1 * u2 * s(-0.5);

    let c2t = (2.0 * om * config.tau).cos();
    let s2t = (2.0 * om * config.tau).sin();
    let ct = (om * config.tau).cos();
    let st = (om * config.tau).sin();

    let b1 = 2.0 * q * u1 * u1 * c2t + 2.0 * q * q * u1 * u1 * s2t - 2.0 * q * u1 * u2 * ct
        + (1.0 - q * q) * u1 * u1 * s(-2.0)
        + u2 * u2 * s(-1.0)
        - 2.0 * q * u1 * u1 * c(-2.0)
        - 2.0 * u1 * u2 * s(-1.5)
        + 2.0 * q * u1 * u2 * c(-1.5)
        + q * q * u1 * u1 * s(0.0);

    let b2 = (1.0 + 2.0 * q * q) * u1 * u1 + u2 * u2 - chi * u1 * u2
        + 2.0 * q * u1 * u1 * (s2t - q * c2t)
        - 2.0 * q * u1 * u2 * st
        + 2.0 * q * u1 * u1 * s(-1.0)
        - 2.0 * q * q * u1 * u1 * c(-1.0)
        - 2.0 * q * u1 * u2 * s(-0.5)
        + q * q * u1 * u1 * c(0.0)
        - (1.0 - q * q) * u1 * u1 * c(-2.0)
        - 2.0 * q * u1 * u1 * s(-2.0)
        - u2 * u2 * c(-1.0)
        + 2.0 * u1 * u2 * c(-1.5)
        + 2.0 * q * u1 * u2 * s(-1.5);

    Ok((-2.0 * config.gamma * t).exp() * (k0 + g * b1 + 0.5 * g * g * b2))
}

/// One-kick closed form with the kick at t = 0 (weak damping): the jump is
/// folded into the initial velocity, there is no kick at tau. The ambiguous
/// trailing bracket is read as closing after the sin^2 term; under that
/// reading the expression is exactly |eps|^2 for this schedule, which the
/// property suite checks.
pub fn k_single_kick(config: &OscillatorConfig, t: f64) -> Result<f64> {
    let basis = require_regime(config, "k_single_kick", DampingRegime::Weak)?;
    if !(t >= 0.0) {
        return Err(Error::OutOfRange {
            what: "t",
            message: format!("time must be >= 0, got {t}"),
        });
    }
    let om = basis.big_omega;
    let q = config.kappa / om;
    let s2 = (2.0 * om * t).sin();
    let ssq = (om * t).sin().powi(2);
    let k0 = 1.0 + 2.0 * q * s2 + 4.0 * q * q * ssq;
    let bracket = s2 + 4.0 / om * (config.kappa + config.gamma / 4.0) * ssq;
    Ok((-2.0 * config.gamma * t).exp() * (k0 + config.gamma / om * bracket))
}

/// Canonical |eps|^2 for the kick-at-zero schedule: eps(0) = 1,
/// eps'(0+) = i Omega + 2 kappa, no later kicks. Valid in every regime.
pub fn k_single_kick_canonical(config: &OscillatorConfig, t: f64) -> Result<f64> {
    Ok(single_kick_epsilon(config, t)?.norm_sqr())
}

/// eps(t) for the kick-at-zero schedule.
pub fn single_kick_epsilon(config: &OscillatorConfig, t: f64) -> Result<Complex64> {
    if !(t >= 0.0) {
        return Err(Error::OutOfRange {
            what: "t",
            message: format!("time must be >= 0, got {t}"),
        });
    }
    let basis = mode_basis(config)?;
    let (a, b) = single_kick_coefficients(config, &basis);
    Ok(a * (basis.mu1 * t).exp() + b * (basis.mu2 * t).exp())
}

/// Coefficients solving eps(0) = 1, eps'(0) = i Omega + 2 kappa.
pub fn single_kick_coefficients(config: &OscillatorConfig, basis: &ModeBasis) -> (Complex64, Complex64) {
    let v0 = Complex64::new(2.0 * config.kappa, basis.big_omega);
    let a = (v0 - basis.mu2) / (basis.mu1 - basis.mu2);
    (a, Complex64::new(1.0, 0.0) - a)
}

/// First time K dips strictly below 1, refined between the bracketing
/// samples by bisection to a width of 1e-9 * tau. `None` when no sample
/// dips below 1; grazing contact (including roundoff-level wiggle of a
/// constant K = 1, which computes to 1 +- one ulp) also reports `None`.
pub fn squeezing_onset(
    mode: &ModeFunction,
    samples: &[TrajectorySample],
) -> Result<Option<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("samples"));
    }
    let threshold = 1.0 - tolerances::ONSET_GRAZING_ABS;
    let Some(i) = samples.iter().position(|s| s.k_coeff < threshold) else {
        return Ok(None);
    };
    if i == 0 {
        return Ok(Some(samples[0].t));
    }
    let mut lo = samples[i - 1].t; // K >= threshold
    let mut hi = samples[i].t; // K < threshold
    let width = tolerances::ONSET_WIDTH_REL * mode.config().tau;
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if mode.squeeze_coefficient(mid)? < threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
