//! Parameter sweeps: stability classification over a grid of (omega0 tau,
//! kappa / omega0) and squeezing profiles over arbitrary parameter pairs.
//!
//! The n-kick product stays bounded as n grows exactly when the one-period
//! trace satisfies |chi/2| <= 1 with chi/2 real, so classification reduces to
//! where chi/2 sits relative to the unit interval.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::observables::ModeFunction;
use crate::oscillator::{mode_basis, OscillatorConfig};
use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityClass {
    /// |chi/2| < 1 on the real axis: coefficients stay bounded for all n.
    Elliptic,
    /// real chi/2 with |chi/2| > 1: exponential growth of A_n, B_n.
    Hyperbolic,
    /// on the band edge (or complex chi/2 under damping): marginal case.
    Parabolic,
}

impl StabilityClass {
    pub fn name(&self) -> &'static str {
        match self {
            StabilityClass::Elliptic => "elliptic",
            StabilityClass::Hyperbolic => "hyperbolic",
            StabilityClass::Parabolic => "parabolic",
        }
    }
}

impl std::fmt::Display for StabilityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Classify from the half-trace of the one-period matrix. The band edge gets
/// a small tolerance strip so grids hit the parabolic lines exactly instead
/// of flickering between the two open classes.
pub fn classify_stability(chi_half: Complex64) -> Result<StabilityClass> {
    if !chi_half.re.is_finite() || !chi_half.im.is_finite() {
        return Err(Error::NonFinite("chi/2"));
    }
    let band = tolerances::PARABOLIC_BAND;
    if chi_half.im.abs() > band {
        return Ok(StabilityClass::Parabolic);
    }
    let r = chi_half.re.abs();
    if r < 1.0 - band {
        Ok(StabilityClass::Elliptic)
    } else if r > 1.0 + band {
        Ok(StabilityClass::Hyperbolic)
    } else {
        Ok(StabilityClass::Parabolic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityCell {
    pub omega0_tau: f64,
    pub kappa_over_omega0: f64,
    pub chi_half: Complex64,
    pub class: StabilityClass,
}

/// A cell whose configuration failed validation; the sweep keeps going and
/// reports these alongside the good cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CellError {
    pub x: f64,
    pub y: f64,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        let axis = Self { min, max, count };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::Validation {
                field: "axis",
                message: "endpoints must be finite".into(),
            });
        }
        if self.count < 2 {
            return Err(Error::Validation {
                field: "axis",
                message: format!("need at least 2 grid points, got {}", self.count),
            });
        }
        if self.max <= self.min {
            return Err(Error::Validation {
                field: "axis",
                message: format!("max ({}) must exceed min ({})", self.max, self.min),
            });
        }
        Ok(())
    }

    pub fn value(&self, i: usize) -> f64 {
        self.min + (self.max - self.min) * (i as f64) / ((self.count - 1) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// dimensionless kick spacing; sets tau = v / omega0
    Omega0Tau,
    /// dimensionless kick strength; sets kappa = v * omega0
    KappaOverOmega0,
    Omega0,
    Gamma,
    Kappa,
    Tau,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::Omega0Tau => "omega0_tau",
            SweepParam::KappaOverOmega0 => "kappa_over_omega0",
            SweepParam::Omega0 => "omega0",
            SweepParam::Gamma => "gamma",
            SweepParam::Kappa => "kappa",
            SweepParam::Tau => "tau",
        }
    }

    pub fn apply(&self, config: &mut OscillatorConfig, v: f64) {
        match self {
            SweepParam::Omega0Tau => config.tau = v / config.omega0,
            SweepParam::KappaOverOmega0 => config.kappa = v * config.omega0,
            SweepParam::Omega0 => config.omega0 = v,
            SweepParam::Gamma => config.gamma = v,
            SweepParam::Kappa => config.kappa = v,
            SweepParam::Tau => config.tau = v,
        }
    }
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega0_tau" => Ok(SweepParam::Omega0Tau),
            "kappa_over_omega0" => Ok(SweepParam::KappaOverOmega0),
            "omega0" => Ok(SweepParam::Omega0),
            "gamma" => Ok(SweepParam::Gamma),
            "kappa" => Ok(SweepParam::Kappa),
            "tau" => Ok(SweepParam::Tau),
            other => Err(Error::Validation {
                field: "param",
                message: format!(
                    "unknown sweep parameter '{other}' (expected omega0_tau, \
                     kappa_over_omega0, omega0, gamma, kappa or tau)"
                ),
            }),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRequest {
    pub base: OscillatorConfig,
    pub x_param: SweepParam,
    pub x: SweepAxis,
    pub y_param: SweepParam,
    pub y: SweepAxis,
}

impl SweepRequest {
    pub fn validate(&self) -> Result<()> {
        self.x.validate()?;
        self.y.validate()?;
        if self.x_param == self.y_param {
            return Err(Error::Validation {
                field: "param",
                message: format!("both axes sweep {}", self.x_param.name()),
            });
        }
        Ok(())
    }
}

fn cell_config(request: &SweepRequest, xi: usize, yi: usize) -> (f64, f64, OscillatorConfig) {
    let xv = request.x.value(xi);
    let yv = request.y.value(yi);
    let mut config = request.base;
    request.x_param.apply(&mut config, xv);
    request.y_param.apply(&mut config, yv);
    (xv, yv, config)
}

/// Classify every grid cell. Rows are x-major: all y values for x_0, then
/// for x_1, and so on, matching the CSV layout. Cells are independent, so
/// the grid is evaluated in parallel; collect preserves index order, which
/// keeps the output bit-identical regardless of thread count.
pub fn stability_map(request: &SweepRequest) -> Result<Vec<std::result::Result<StabilityCell, CellError>>> {
    request.validate()?;
    let ok = matches!(
        (request.x_param, request.y_param),
        (SweepParam::Omega0Tau, SweepParam::KappaOverOmega0)
    );
    if !ok {
        return Err(Error::Validation {
            field: "param",
            message: "stability map sweeps omega0_tau on x and kappa_over_omega0 on y".into(),
        });
    }
    let nx = request.x.count;
    let ny = request.y.count;
    let cells: Vec<_> = (0..nx * ny)
        .into_par_iter()
        .map(|flat| {
            let (xi, yi) = (flat / ny, flat % ny);
            let (xv, yv, config) = cell_config(request, xi, yi);
            let fail = |message: String| CellError { x: xv, y: yv, message };
            config.validate().map_err(|e| fail(e.to_string()))?;
            let basis = mode_basis(&config).map_err(|e| fail(e.to_string()))?;
            let class = classify_stability(basis.chi_half).map_err(|e| fail(e.to_string()))?;
            Ok(StabilityCell {
                omega0_tau: xv,
                kappa_over_omega0: yv,
                chi_half: basis.chi_half,
                class,
            })
        })
        .collect();
    Ok(cells)
}

#[derive(Debug, Clone)]
pub struct SqueezeCell {
    pub x: f64,
    pub y: f64,
    pub result: std::result::Result<Vec<(f64, f64)>, String>,
}

/// Squeezing coefficient K(t) over the given time grid for every cell of a
/// two-parameter sweep. Invalid cells carry their error message instead of
/// aborting the whole sweep.
pub fn squeezing_sweep(request: &SweepRequest, time_grid: &[f64]) -> Result<Vec<SqueezeCell>> {
    request.validate()?;
    if time_grid.is_empty() {
        return Err(Error::EmptyInput("time grid"));
    }
    let nx = request.x.count;
    let ny = request.y.count;
    let cells: Vec<_> = (0..nx * ny)
        .into_par_iter()
        .map(|flat| {
            let (xi, yi) = (flat / ny, flat % ny);
            let (xv, yv, config) = cell_config(request, xi, yi);
            let result = evaluate_cell(&config, time_grid).map_err(|e| e.to_string());
            SqueezeCell { x: xv, y: yv, result }
        })
        .collect();
    Ok(cells)
}

fn evaluate_cell(config: &OscillatorConfig, time_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    let mode = ModeFunction::new(config)?;
    time_grid
        .iter()
        .map(|&t| Ok((t, mode.squeeze_coefficient(t)?)))
        .collect()
}
