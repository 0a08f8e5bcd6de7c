//! Physical configuration, damping-regime classification, and the
//! regime-dependent mode basis.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances;
use crate::transfer::{free_matrix, kick_matrix};

/// Physical parameters of the kicked, damped oscillator.
///
/// Kicks hit at `t = k*tau` for `k = 1..=n_kicks`. `hbar` and `mass` only
/// enter the variance normalization; natural units are the defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorConfig {
    pub omega0: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub tau: f64,
    pub n_kicks: u32,
    pub hbar: f64,
    pub mass: f64,
}

impl OscillatorConfig {
    /// Validated constructor in natural units (`hbar = mass = 1`).
    pub fn new(omega0: f64, gamma: f64, kappa: f64, tau: f64, n_kicks: u32) -> Result<Self> {
        let config = Self {
            omega0,
            gamma,
            kappa,
            tau,
            n_kicks,
            hbar: 1.0,
            mass: 1.0,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(field: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Validation {
                    field,
                    message: format!("must be finite and > 0, got {v}"),
                })
            }
        }
        positive("omega0", self.omega0)?;
        positive("tau", self.tau)?;
        positive("hbar", self.hbar)?;
        positive("mass", self.mass)?;
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(Error::Validation {
                field: "gamma",
                message: format!("must be finite and >= 0, got {}", self.gamma),
            });
        }
        if !self.kappa.is_finite() {
            return Err(Error::Validation {
                field: "kappa",
                message: format!("must be finite, got {}", self.kappa),
            });
        }
        if self.n_kicks > tolerances::MAX_KICKS {
            return Err(Error::Validation {
                field: "n_kicks",
                message: format!(
                    "must be <= {}, got {} (coefficient products overflow beyond that)",
                    tolerances::MAX_KICKS,
                    self.n_kicks
                ),
            });
        }
        classify_regime(self.omega0, self.gamma).map(|_| ())
    }

    pub fn regime(&self) -> Result<DampingRegime> {
        classify_regime(self.omega0, self.gamma)
    }

    /// Kick instants `k*tau`, `k = 1..=n_kicks`.
    pub fn kick_times(&self) -> impl Iterator<Item = f64> + '_ {
        let tau = self.tau;
        (1..=self.n_kicks).map(move |k| f64::from(k) * tau)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DampingRegime {
    Undamped,
    Weak,
    Strong,
}

impl DampingRegime {
    pub fn name(self) -> &'static str {
        match self {
            DampingRegime::Undamped => "undamped",
            DampingRegime::Weak => "weak",
            DampingRegime::Strong => "strong",
        }
    }
}

impl std::fmt::Display for DampingRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Damping regime from the bare parameters. Critical damping is rejected:
/// the two-exponential basis collapses there and D = mu2 - mu1 vanishes.
pub fn classify_regime(omega0: f64, gamma: f64) -> Result<DampingRegime> {
    if !omega0.is_finite() || omega0 <= 0.0 {
        return Err(Error::Validation {
            field: "omega0",
            message: format!("must be finite and > 0, got {omega0}"),
        });
    }
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::Validation {
            field: "gamma",
            message: format!("must be finite and >= 0, got {gamma}"),
        });
    }
    if (gamma - omega0).abs() <= tolerances::CRITICAL_DAMPING_REL * omega0 {
        return Err(Error::CriticalDamping {
            omega0,
            gamma,
            rel: tolerances::CRITICAL_DAMPING_REL,
        });
    }
    Ok(if gamma == 0.0 {
        DampingRegime::Undamped
    } else if gamma < omega0 {
        DampingRegime::Weak
    } else {
        DampingRegime::Strong
    })
}

/// Regime-dependent data for the inter-kick solution
/// `eps(t) = A e^{mu1 t} + B e^{mu2 t}` with `eps(0) = 1`, `eps'(0) = i Omega`.
#[derive(Debug, Clone, Copy)]
pub struct ModeBasis {
    pub mu1: Complex64,
    pub mu2: Complex64,
    /// mu2 - mu1. Every kick matrix divides by this gap.
    pub big_d: Complex64,
    /// Effective frequency Omega; real in all three regimes.
    pub big_omega: f64,
    pub a0: Complex64,
    pub b0: Complex64,
    /// Half-trace of the one-period matrix M*T.
    pub chi_half: Complex64,
}

/// Builds the basis for a validated config.
///
/// Undamped: mu = +-i omega0, A0 = 1, B0 = 0.
/// Weak (gamma < omega0): Omega = sqrt(omega0^2 - gamma^2), mu = -gamma +- i Omega,
/// A0 = 1 - i gamma/(2 Omega), B0 = i gamma/(2 Omega).
/// Strong (gamma > omega0): Omega = sqrt(gamma^2 - omega0^2), mu = -gamma +- Omega,
/// A0 = 1/2 + i/2 + gamma/(2 Omega), B0 = 1/2 - i/2 - gamma/(2 Omega).
pub fn mode_basis(config: &OscillatorConfig) -> Result<ModeBasis> {
    config.validate()?;
    let regime = classify_regime(config.omega0, config.gamma)?;
    let (mu1, mu2, big_omega, a0, b0) = match regime {
        DampingRegime::Undamped => {
            let w = config.omega0;
            (
                Complex64::new(0.0, w),
                Complex64::new(0.0, -w),
                w,
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
            )
        }
        DampingRegime::Weak => {
            let g = config.gamma;
            let om = (config.omega0 * config.omega0 - g * g).sqrt();
            let half = g / (2.0 * om);
            (
                Complex64::new(-g, om),
                Complex64::new(-g, -om),
                om,
                Complex64::new(1.0, -half),
                Complex64::new(0.0, half),
            )
        }
        DampingRegime::Strong => {
            let g = config.gamma;
            let om = (g * g - config.omega0 * config.omega0).sqrt();
            let half = g / (2.0 * om);
            (
                Complex64::new(-g + om, 0.0),
                Complex64::new(-g - om, 0.0),
                om,
                Complex64::new(0.5 + half, 0.5),
                Complex64::new(0.5 - half, -0.5),
            )
        }
    };
    let mut basis = ModeBasis {
        mu1,
        mu2,
        big_d: mu2 - mu1,
        big_omega,
        a0,
        b0,
        chi_half: Complex64::new(0.0, 0.0),
    };
    basis.chi_half = chi_half(&basis, config.tau, config.kappa)?;
    Ok(basis)
}

/// Half-trace of M*T from the transfer matrices themselves. Must agree with
/// [`chi_half_closed`] to 1e-12 relative; the property suite enforces that.
pub fn chi_half(basis: &ModeBasis, tau: f64, kappa: f64) -> Result<Complex64> {
    let mt = kick_matrix(basis, kappa)? * free_matrix(basis, tau);
    Ok(0.5 * mt.trace())
}

/// Regime closed form for the half-trace: cos/cosh(Omega tau) plus
/// (kappa/Omega) sin/sinh(Omega tau).
pub fn chi_half_closed(regime: DampingRegime, big_omega: f64, tau: f64, kappa: f64) -> f64 {
    let x = big_omega * tau;
    match regime {
        DampingRegime::Undamped | DampingRegime::Weak => {
            x.cos() + kappa / big_omega * x.sin()
        }
        DampingRegime::Strong => x.cosh() + kappa / big_omega * x.sinh(),
    }
}
