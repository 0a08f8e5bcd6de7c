//! Independent ground truth: fixed-step RK4 integration of
//! eps'' + 2 gamma eps' + omega0^2 eps = 0 between kicks, with the exact
//! velocity jump eps' += 2 kappa eps applied at each kick instant. Kicks are
//! never smeared into narrow pulses; the jump itself is the delta's exact
//! integral. The step is tau / steps_per_interval so every kick lands on a
//! step boundary.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::observables::TrajectorySample;
use crate::oscillator::{ModeBasis, OscillatorConfig};
use crate::tolerances;

#[derive(Debug, Clone, Copy)]
pub struct IntegratorSettings {
    pub steps_per_interval: u32,
    pub t_end: f64,
    /// Keep every stride-th step as a sample; kick instants and the final
    /// point are always kept.
    pub sample_stride: u32,
}

impl IntegratorSettings {
    pub fn new(t_end: f64) -> Self {
        Self {
            steps_per_interval: 10_000,
            t_end,
            sample_stride: 1,
        }
    }

    pub fn with_steps(mut self, steps_per_interval: u32) -> Self {
        self.steps_per_interval = steps_per_interval;
        self
    }

    pub fn with_stride(mut self, sample_stride: u32) -> Self {
        self.sample_stride = sample_stride.max(1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps_per_interval < tolerances::MIN_STEPS_PER_INTERVAL {
            return Err(Error::StepTooCoarse {
                steps: self.steps_per_interval,
                min: tolerances::MIN_STEPS_PER_INTERVAL,
            });
        }
        if !self.t_end.is_finite() || self.t_end <= 0.0 {
            return Err(Error::Validation {
                field: "t_end",
                message: format!("must be finite and > 0, got {}", self.t_end),
            });
        }
        if self.sample_stride == 0 {
            return Err(Error::Validation {
                field: "sample_stride",
                message: "must be >= 1".into(),
            });
        }
        Ok(())
    }
}

// state layout: [Re eps, Im eps, Re eps', Im eps']
type State = [f64; 4];

fn deriv(gamma: f64, w0_sq: f64, s: &State) -> State {
    [
        s[2],
        s[3],
        -2.0 * gamma * s[2] - w0_sq * s[0],
        -2.0 * gamma * s[3] - w0_sq * s[1],
    ]
}

fn rk4_step(gamma: f64, w0_sq: f64, s: &State, h: f64) -> State {
    let k1 = deriv(gamma, w0_sq, s);
    let mid1 = advanced(s, &k1, 0.5 * h);
    let k2 = deriv(gamma, w0_sq, &mid1);
    let mid2 = advanced(s, &k2, 0.5 * h);
    let k3 = deriv(gamma, w0_sq, &mid2);
    let end = advanced(s, &k3, h);
    let k4 = deriv(gamma, w0_sq, &end);
    let sixth = h / 6.0;
    [
        s[0] + sixth * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        s[1] + sixth * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        s[2] + sixth * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        s[3] + sixth * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
    ]
}

fn advanced(s: &State, d: &State, h: f64) -> State {
    [
        s[0] + h * d[0],
        s[1] + h * d[1],
        s[2] + h * d[2],
        s[3] + h * d[3],
    ]
}

fn to_sample(config: &OscillatorConfig, basis: &ModeBasis, t: f64, s: &State) -> TrajectorySample {
    let epsilon = Complex64::new(s[0], s[1]);
    let k_coeff = epsilon.norm_sqr();
    TrajectorySample {
        t,
        epsilon,
        epsilon_dot: Complex64::new(s[2], s[3]),
        k_coeff,
        sigma_x: config.hbar / (2.0 * config.mass * basis.big_omega) * k_coeff,
    }
}

/// Ground-truth trajectory for the periodic schedule (kicks at k*tau,
/// k = 1..=n_kicks, those with k*tau <= t_end applied).
pub fn integrate_trajectory(
    config: &OscillatorConfig,
    basis: &ModeBasis,
    settings: &IntegratorSettings,
) -> Result<Vec<TrajectorySample>> {
    let v0 = Complex64::new(0.0, basis.big_omega);
    integrate_with_initial(config, basis, settings, v0, true)
}

/// Ground truth for the kick-at-zero schedule: the jump is folded into the
/// initial velocity (eps'(0+) = i Omega + 2 kappa) and no later kicks fire.
pub fn integrate_single_kick(
    config: &OscillatorConfig,
    basis: &ModeBasis,
    settings: &IntegratorSettings,
) -> Result<Vec<TrajectorySample>> {
    let v0 = Complex64::new(2.0 * config.kappa, basis.big_omega);
    integrate_with_initial(config, basis, settings, v0, false)
}

fn integrate_with_initial(
    config: &OscillatorConfig,
    basis: &ModeBasis,
    settings: &IntegratorSettings,
    v0: Complex64,
    kicks: bool,
) -> Result<Vec<TrajectorySample>> {
    config.validate()?;
    settings.validate()?;
    let gamma = config.gamma;
    let w0_sq = config.omega0 * config.omega0;
    let tau = config.tau;
    let steps = settings.steps_per_interval;
    let h = tau / f64::from(steps);
    let t_end = settings.t_end;
    // slack for deciding whether a boundary is within the horizon
    let slack = 1e-9 * h;

    let mut out = Vec::new();
    let mut s: State = [1.0, 0.0, v0.re, v0.im];
    out.push(to_sample(config, basis, 0.0, &s));

    let mut segment_start = 0.0;
    let mut global_step: u64 = 0;
    let stride = u64::from(settings.sample_stride);

    if kicks {
        for k in 1..=config.n_kicks {
            let t_kick = f64::from(k) * tau;
            if t_kick > t_end + slack {
                break;
            }
            for j in 1..=steps {
                s = rk4_step(gamma, w0_sq, &s, h);
                global_step += 1;
                let t = segment_start + f64::from(j) * h;
                if j < steps && global_step % stride == 0 {
                    out.push(to_sample(config, basis, t, &s));
                }
            }
            // exact velocity jump, then record the post-kick state
            s[2] += 2.0 * config.kappa * s[0];
            s[3] += 2.0 * config.kappa * s[1];
            out.push(to_sample(config, basis, t_kick, &s));
            segment_start = t_kick;
        }
    }

    // tail from the last applied kick (or t = 0) to t_end
    let remaining = t_end - segment_start;
    if remaining > slack {
        let full = (remaining / h + 1e-9).floor() as u64;
        for j in 1..=full {
            s = rk4_step(gamma, w0_sq, &s, h);
            global_step += 1;
            let t = segment_start + j as f64 * h;
            if global_step % stride == 0 && t < t_end - slack {
                out.push(to_sample(config, basis, t, &s));
            }
        }
        let reached = segment_start + full as f64 * h;
        let h_last = t_end - reached;
        if h_last > slack {
            s = rk4_step(gamma, w0_sq, &s, h_last);
        }
        out.push(to_sample(config, basis, t_end, &s));
    }
    Ok(out)
}

/// |(eps' eps* - eps eps'*) e^{2 gamma t} - 2 i Omega|. The damped Wronskian
/// is exactly conserved between kicks and across jumps (the jump term
/// 2 kappa (|eps|^2 - |eps|^2) cancels), so this measures integration error.
pub fn wronskian_residual(sample: &TrajectorySample, gamma: f64, big_omega: f64) -> f64 {
    let w = (sample.epsilon_dot * sample.epsilon.conj()
        - sample.epsilon * sample.epsilon_dot.conj())
        * (2.0 * gamma * sample.t).exp();
    (w - Complex64::new(0.0, 2.0 * big_omega)).norm()
}
