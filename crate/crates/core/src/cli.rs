//! Command-line front end: flag and config-file parsing, CSV emission, and
//! the verify report that cross-checks the canonical transfer-matrix path
//! against the closed-form expressions and the numerical integrator.
//!
//! Exit code contract: 0 success, 1 validation error, 2 verify found the
//! canonical path and the integrator in disagreement, 3 I/O error. Deviations
//! of the closed-form expressions are always reported and never fatal; the
//! integrator is the arbiter.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::observables::{self, ModeFunction};
use crate::oracle::{self, IntegratorSettings};
use crate::oscillator::{DampingRegime, OscillatorConfig};
use crate::sweep::{self, SweepAxis, SweepParam, SweepRequest};
use crate::tolerances;
use crate::transfer;

#[derive(Debug, Parser)]
#[command(
    name = "kposc",
    version,
    about = "Damped oscillator with periodically kicked frequency: exact dynamics, squeezing, stability maps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the canonical trajectory on a uniform time grid
    Simulate(SimulateArgs),
    /// Cross-check canonical, closed-form and integrator paths
    Verify(VerifyArgs),
    /// Classify an (omega0 tau, kappa / omega0) grid by coefficient growth
    StabilityMap(StabilityMapArgs),
    /// Squeezing coefficient over a two-parameter grid
    Sweep(SweepArgs),
    /// Closed-form K(t) next to the canonical value on a time grid
    ClosedForms(ClosedFormsArgs),
}

/// Oscillator parameters, each optional on the command line; missing values
/// fall back to the config file, then to defaults (gamma, kappa, n_kicks
/// zero; hbar, mass one). omega0 and tau have no default.
#[derive(Debug, Args)]
pub struct ConfigOpts {
    /// Natural frequency (> 0)
    #[arg(long)]
    pub omega0: Option<f64>,
    /// Damping rate (>= 0, away from omega0)
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Kick strength; negative values soften the potential
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    /// Kick spacing (> 0); kicks fire at tau, 2 tau, ...
    #[arg(long)]
    pub tau: Option<f64>,
    /// Number of kicks
    #[arg(long)]
    pub n_kicks: Option<u32>,
    /// Planck constant in the chosen units
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Oscillator mass
    #[arg(long)]
    pub mass: Option<f64>,
    /// key=value file; flags given here override file entries
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl ConfigOpts {
    pub fn resolve(&self) -> Result<OscillatorConfig> {
        let file = match &self.config {
            Some(path) => parse_config_text(&std::fs::read_to_string(path)?)?,
            None => ConfigOverlay::default(),
        };
        let flags = ConfigOverlay {
            omega0: self.omega0,
            gamma: self.gamma,
            kappa: self.kappa,
            tau: self.tau,
            n_kicks: self.n_kicks,
            hbar: self.hbar,
            mass: self.mass,
        };
        flags.merge_under(file).into_config()
    }
}

/// Partial config from one source. Sources stack: flags over file over
/// defaults.
#[derive(Debug, Default, Clone, Copy, PartialEq)]
pub struct ConfigOverlay {
    pub omega0: Option<f64>,
    pub gamma: Option<f64>,
    pub kappa: Option<f64>,
    pub tau: Option<f64>,
    pub n_kicks: Option<u32>,
    pub hbar: Option<f64>,
    pub mass: Option<f64>,
}

impl ConfigOverlay {
    /// Values present in `self` win; holes are filled from `fallback`.
    pub fn merge_under(self, fallback: ConfigOverlay) -> ConfigOverlay {
        ConfigOverlay {
            omega0: self.omega0.or(fallback.omega0),
            gamma: self.gamma.or(fallback.gamma),
            kappa: self.kappa.or(fallback.kappa),
            tau: self.tau.or(fallback.tau),
            n_kicks: self.n_kicks.or(fallback.n_kicks),
            hbar: self.hbar.or(fallback.hbar),
            mass: self.mass.or(fallback.mass),
        }
    }

    pub fn into_config(self) -> Result<OscillatorConfig> {
        let required = |field: &'static str, v: Option<f64>| {
            v.ok_or(Error::Validation {
                field,
                message: format!("required: pass --{field} or a config file entry"),
            })
        };
        let config = OscillatorConfig {
            omega0: required("omega0", self.omega0)?,
            gamma: self.gamma.unwrap_or(0.0),
            kappa: self.kappa.unwrap_or(0.0),
            tau: required("tau", self.tau)?,
            n_kicks: self.n_kicks.unwrap_or(0),
            hbar: self.hbar.unwrap_or(1.0),
            mass: self.mass.unwrap_or(1.0),
        };
        config.validate()?;
        Ok(config)
    }
}

/// Flat key=value text, '#' starts a comment, commas separate pairs on one
/// line so a whole config fits on a single line if wanted.
pub fn parse_config_text(text: &str) -> Result<ConfigOverlay> {
    let mut overlay = ConfigOverlay::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        for piece in content.split(',') {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            let Some((key, value)) = piece.split_once('=') else {
                return Err(Error::ConfigParse {
                    line,
                    message: format!("expected key=value, got '{piece}'"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            let number = || {
                value.parse::<f64>().map_err(|e| Error::ConfigParse {
                    line,
                    message: format!("{key}: {e}"),
                })
            };
            match key {
                "omega0" => overlay.omega0 = Some(number()?),
                "gamma" => overlay.gamma = Some(number()?),
                "kappa" => overlay.kappa = Some(number()?),
                "tau" => overlay.tau = Some(number()?),
                "hbar" => overlay.hbar = Some(number()?),
                "mass" => overlay.mass = Some(number()?),
                "n_kicks" => {
                    overlay.n_kicks =
                        Some(value.parse::<u32>().map_err(|e| Error::ConfigParse {
                            line,
                            message: format!("n_kicks: {e}"),
                        })?)
                }
                _ => {
                    return Err(Error::UnknownKey {
                        key: key.to_string(),
                        line,
                    })
                }
            }
        }
    }
    Ok(overlay)
}

pub fn emit_config(config: &OscillatorConfig) -> String {
    format!(
        "omega0={}\ngamma={}\nkappa={}\ntau={}\nn_kicks={}\nhbar={}\nmass={}\n",
        fmt_f64(config.omega0),
        fmt_f64(config.gamma),
        fmt_f64(config.kappa),
        fmt_f64(config.tau),
        config.n_kicks,
        fmt_f64(config.hbar),
        fmt_f64(config.mass),
    )
}

/// Single formatting policy for all CSV numbers: Rust's Display for f64 is
/// the shortest string that parses back to the identical bits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Comment header written before every CSV body, recording the resolved
/// inputs of the run.
#[derive(Debug, Clone)]
pub struct RunManifest {
    tool: String,
    subcommand: &'static str,
    entries: Vec<(String, String)>,
}

impl RunManifest {
    pub fn new(subcommand: &'static str) -> Self {
        Self {
            tool: format!("kposc {}", env!("CARGO_PKG_VERSION")),
            subcommand,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.push((key.into(), value.into()));
    }

    pub fn push_config(&mut self, config: &OscillatorConfig) {
        self.push("omega0", fmt_f64(config.omega0));
        self.push("gamma", fmt_f64(config.gamma));
        self.push("kappa", fmt_f64(config.kappa));
        self.push("tau", fmt_f64(config.tau));
        self.push("n_kicks", config.n_kicks.to_string());
        self.push("hbar", fmt_f64(config.hbar));
        self.push("mass", fmt_f64(config.mass));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# tool = {}", self.tool);
        let _ = writeln!(out, "# subcommand = {}", self.subcommand);
        for (key, value) in &self.entries {
            let _ = writeln!(out, "# {key} = {value}");
        }
        out
    }
}

fn write_output(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(Error::from),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub config: ConfigOpts,
    /// End of the sampled window
    #[arg(long)]
    pub t_end: f64,
    /// Number of grid points, endpoints included
    #[arg(long, default_value_t = 1001)]
    pub samples: usize,
    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn simulate_csv(config: &OscillatorConfig, t_end: f64, samples: usize) -> Result<String> {
    let mode = ModeFunction::new(config)?;
    let rows = mode.sample_grid(t_end, samples)?;
    let mut manifest = RunManifest::new("simulate");
    manifest.push_config(config);
    manifest.push("t_end", fmt_f64(t_end));
    manifest.push("samples", samples.to_string());
    let mut out = manifest.render();
    out.push_str("t,re_eps,im_eps,k_coeff,sigma_x\n");
    for row in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(row.t),
            fmt_f64(row.epsilon.re),
            fmt_f64(row.epsilon.im),
            fmt_f64(row.k_coeff),
            fmt_f64(row.sigma_x),
        );
    }
    Ok(out)
}

pub fn run_simulate(args: &SimulateArgs) -> Result<()> {
    let config = args.config.resolve()?;
    let csv = simulate_csv(&config, args.t_end, args.samples)?;
    write_output(args.out.as_deref(), &csv)
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub config: ConfigOpts,
    /// End of the checked window; defaults to (n_kicks + 5) tau
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Integrator resolution
    #[arg(long, default_value_t = 10_000)]
    pub steps_per_interval: u32,
    /// CSV with the per-time comparison; the text report goes to stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyRow {
    pub t: f64,
    pub k_canonical: f64,
    pub k_oracle: f64,
    pub k_closed: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct OffsetDeviation {
    pub shift: f64,
    pub max_dev: f64,
}

/// Deviation of the regime's closed-form K(t) from the canonical path, as
/// printed and under small shifts of the interval index, since the original
/// statement of the form is ambiguous about which interval `n` refers to.
#[derive(Debug, Clone)]
pub struct ClosedFormReport {
    pub label: &'static str,
    pub max_dev: f64,
    pub offsets: Vec<OffsetDeviation>,
}

#[derive(Debug, Clone, Copy)]
pub struct SingleKickReport {
    pub max_dev_vs_canonical: f64,
    pub max_dev_vs_oracle: f64,
}

/// The alternative S-matrix indexing differs from the canonical product by
/// one free-evolution step; both distances are reported.
#[derive(Debug, Clone, Copy)]
pub struct AltSReport {
    pub n: u32,
    pub dev_vs_canonical: f64,
    pub dev_vs_shifted: f64,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub config: OscillatorConfig,
    pub regime: DampingRegime,
    pub t_end: f64,
    pub steps_per_interval: u32,
    pub rows: Vec<VerifyRow>,
    pub max_canonical_vs_oracle: f64,
    pub oracle_tolerance: f64,
    pub max_wronskian: f64,
    pub max_det_residual: f64,
    pub max_pell: f64,
    pub closed_form: Option<ClosedFormReport>,
    pub single_kick: Option<SingleKickReport>,
    pub alt_s: Option<AltSReport>,
    pub pass: bool,
}

pub fn build_verify_report(
    config: &OscillatorConfig,
    t_end: f64,
    steps_per_interval: u32,
) -> Result<VerifyReport> {
    let mode = ModeFunction::new(config)?;
    let basis = *mode.basis();
    let regime = config.regime()?;
    let settings = IntegratorSettings::new(t_end)
        .with_steps(steps_per_interval)
        .with_stride((steps_per_interval / 100).max(1));
    let oracle_samples = oracle::integrate_trajectory(config, &basis, &settings)?;

    let closed_at = |t: f64, shift: f64| -> Result<Option<f64>> {
        let n = mode.interval_index(t);
        match regime {
            DampingRegime::Undamped => {
                observables::k_closed_undamped_shifted(config, t, n, shift).map(Some)
            }
            DampingRegime::Weak => {
                observables::k_closed_weak_shifted(config, t, n, shift).map(Some)
            }
            DampingRegime::Strong => Ok(None),
        }
    };

    let mut rows = Vec::with_capacity(oracle_samples.len());
    let mut max_canonical_vs_oracle = 0.0f64;
    let mut max_wronskian = 0.0f64;
    let mut max_closed = 0.0f64;
    for sample in &oracle_samples {
        let k_canonical = mode.squeeze_coefficient(sample.t)?;
        max_canonical_vs_oracle = max_canonical_vs_oracle.max((k_canonical - sample.k_coeff).abs());
        max_wronskian = max_wronskian
            .max(oracle::wronskian_residual(sample, config.gamma, basis.big_omega));
        let k_closed = closed_at(sample.t, 0.0)?;
        if let Some(k) = k_closed {
            max_closed = max_closed.max((k - k_canonical).abs());
        }
        rows.push(VerifyRow {
            t: sample.t,
            k_canonical,
            k_oracle: sample.k_coeff,
            k_closed,
        });
    }

    let closed_form = if regime == DampingRegime::Strong {
        None
    } else {
        let mut offsets = Vec::new();
        for shift in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let mut max_dev = 0.0f64;
            for row in &rows {
                if let Some(k) = closed_at(row.t, shift)? {
                    max_dev = max_dev.max((k - row.k_canonical).abs());
                }
            }
            offsets.push(OffsetDeviation { shift, max_dev });
        }
        Some(ClosedFormReport {
            label: match regime {
                DampingRegime::Undamped => "undamped closed form",
                _ => "weak-damping closed form",
            },
            max_dev: max_closed,
            offsets,
        })
    };

    // determinant of the accumulated step product; each factor has det 1
    let mut max_det_residual = 0.0f64;
    let mut product = transfer::TransferMatrix::identity();
    for k in 1..=config.n_kicks {
        product = transfer::step_matrix(&basis, config.kappa, config.tau, k)? * product;
        max_det_residual =
            max_det_residual.max((product.det() - Complex64::new(1.0, 0.0)).norm());
    }

    // Pell identity along the Chebyshev recurrence; the walk stops early if
    // the polynomials blow up (hyperbolic argument), which is itself the
    // expected behavior, not an error
    let mut max_pell = 0.0f64;
    {
        let x = basis.chi_half;
        let mut u_prev = Complex64::new(0.0, 0.0);
        let mut u = Complex64::new(1.0, 0.0);
        for _ in 1..=200 {
            let residual = (u * u + u_prev * u_prev - 2.0 * x * u * u_prev
                - Complex64::new(1.0, 0.0))
            .norm();
            max_pell = max_pell.max(residual);
            let next = 2.0 * x * u - u_prev;
            if next.norm() > 1e100 {
                break;
            }
            u_prev = u;
            u = next;
        }
    }

    let single_kick = if regime == DampingRegime::Weak {
        let sk = oracle::integrate_single_kick(config, &basis, &settings)?;
        let mut vs_canonical = 0.0f64;
        let mut vs_oracle = 0.0f64;
        for sample in &sk {
            let printed = observables::k_single_kick(config, sample.t)?;
            let canonical = observables::k_single_kick_canonical(config, sample.t)?;
            vs_canonical = vs_canonical.max((printed - canonical).abs());
            vs_oracle = vs_oracle.max((printed - sample.k_coeff).abs());
        }
        Some(SingleKickReport {
            max_dev_vs_canonical: vs_canonical,
            max_dev_vs_oracle: vs_oracle,
        })
    } else {
        None
    };

    let alt_s = if config.n_kicks >= 1 {
        let n = config.n_kicks;
        let canonical = transfer::closed_form_power(&basis, config.kappa, config.tau, n)?;
        let alt = transfer::alt_s_matrix(&basis, config.kappa, config.tau, n)?;
        let shifted = transfer::free_matrix(&basis, config.tau) * canonical;
        Some(AltSReport {
            n,
            dev_vs_canonical: alt.max_entry_distance(&canonical),
            dev_vs_shifted: alt.max_entry_distance(&shifted),
        })
    } else {
        None
    };

    let oracle_tolerance = tolerances::ORACLE_VS_CLOSED_ABS;
    let pass = max_canonical_vs_oracle <= oracle_tolerance;
    Ok(VerifyReport {
        config: *config,
        regime,
        t_end,
        steps_per_interval,
        rows,
        max_canonical_vs_oracle,
        oracle_tolerance,
        max_wronskian,
        max_det_residual,
        max_pell,
        closed_form,
        single_kick,
        alt_s,
        pass,
    })
}

pub fn render_verify_text(report: &VerifyReport) -> String {
    let c = &report.config;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "verify: omega0={} gamma={} kappa={} tau={} n_kicks={} ({} damping regime)",
        fmt_f64(c.omega0),
        fmt_f64(c.gamma),
        fmt_f64(c.kappa),
        fmt_f64(c.tau),
        c.n_kicks,
        report.regime,
    );
    let _ = writeln!(
        out,
        "grid: {} times in [0, {}], {} integrator steps per interval",
        report.rows.len(),
        fmt_f64(report.t_end),
        report.steps_per_interval,
    );
    let _ = writeln!(
        out,
        "canonical vs integrator: max |dK| = {:.3e} (tolerance {:.0e})",
        report.max_canonical_vs_oracle, report.oracle_tolerance,
    );
    let _ = writeln!(
        out,
        "integrator Wronskian residual: max {:.3e}",
        report.max_wronskian
    );
    let _ = writeln!(
        out,
        "step-product determinant: max |det - 1| = {:.3e} over n = 1..={}",
        report.max_det_residual, c.n_kicks,
    );
    let _ = writeln!(
        out,
        "Pell identity residual: max {:.3e} (n <= 200)",
        report.max_pell
    );
    match &report.closed_form {
        Some(closed) => {
            let _ = writeln!(
                out,
                "{} vs canonical: max |dK| = {:.3e} as printed",
                closed.label, closed.max_dev,
            );
            let _ = writeln!(out, "  interval-index offset sweep:");
            for offset in &closed.offsets {
                let _ = writeln!(
                    out,
                    "    shift {:+.1}: max |dK| = {:.3e}{}",
                    offset.shift,
                    offset.max_dev,
                    if offset.shift == 0.0 { "  (as printed)" } else { "" },
                );
            }
        }
        None => {
            let _ = writeln!(
                out,
                "closed form: none available in the strong-damping regime, skipped"
            );
        }
    }
    if let Some(sk) = &report.single_kick {
        let _ = writeln!(
            out,
            "single-kick closed form (kick at t=0): max |dK| vs canonical = {:.3e}, vs integrator = {:.3e}",
            sk.max_dev_vs_canonical, sk.max_dev_vs_oracle,
        );
    }
    if let Some(alt) = &report.alt_s {
        let _ = writeln!(
            out,
            "alternative S-matrix indexing (n = {}): max entry gap vs canonical = {:.3e}, vs canonical shifted by one free step = {:.3e}",
            alt.n, alt.dev_vs_canonical, alt.dev_vs_shifted,
        );
    }
    if report.pass {
        let _ = writeln!(out, "result: PASS");
    } else {
        let _ = writeln!(
            out,
            "result: FAIL (canonical vs integrator exceeded {:.0e})",
            report.oracle_tolerance
        );
    }
    out
}

pub fn render_verify_csv(report: &VerifyReport) -> String {
    let mut manifest = RunManifest::new("verify");
    manifest.push_config(&report.config);
    manifest.push("t_end", fmt_f64(report.t_end));
    manifest.push("steps_per_interval", report.steps_per_interval.to_string());
    manifest.push(
        "oracle_tolerance",
        fmt_f64(report.oracle_tolerance),
    );
    manifest.push("pass", if report.pass { "true" } else { "false" });
    let mut out = manifest.render();
    out.push_str("t,k_canonical,k_oracle,k_closed,dev_oracle,dev_closed\n");
    for row in &report.rows {
        let dev_oracle = (row.k_canonical - row.k_oracle).abs();
        let (closed, dev_closed) = match row.k_closed {
            Some(k) => (fmt_f64(k), fmt_f64((k - row.k_canonical).abs())),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(row.t),
            fmt_f64(row.k_canonical),
            fmt_f64(row.k_oracle),
            closed,
            fmt_f64(dev_oracle),
            dev_closed,
        );
    }
    out
}

pub fn run_verify(args: &VerifyArgs) -> Result<VerifyReport> {
    let config = args.config.resolve()?;
    let t_end = args
        .t_end
        .unwrap_or_else(|| (f64::from(config.n_kicks) + 5.0) * config.tau);
    let report = build_verify_report(&config, t_end, args.steps_per_interval)?;
    print!("{}", render_verify_text(&report));
    if let Some(path) = &args.out {
        std::fs::write(path, render_verify_csv(&report))?;
    }
    Ok(report)
}

#[derive(Debug, Args)]
pub struct StabilityMapArgs {
    /// Scale frequency of the base config; the axes are dimensionless
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,
    /// Damping rate of the base config
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// omega0*tau axis start; defaults to one grid spacing above zero
    #[arg(long)]
    pub x_min: Option<f64>,
    /// omega0*tau axis end
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long, default_value_t = 400)]
    pub x_count: usize,
    /// kappa/omega0 axis start
    #[arg(long, default_value_t = 0.0)]
    pub y_min: f64,
    /// kappa/omega0 axis end
    #[arg(long, default_value_t = 1.0)]
    pub y_max: f64,
    #[arg(long, default_value_t = 200)]
    pub y_count: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn map_request(args: &StabilityMapArgs) -> Result<SweepRequest> {
    let x_max = args.x_max.unwrap_or(std::f64::consts::TAU);
    let x_min = args.x_min.unwrap_or(x_max / args.x_count.max(1) as f64);
    let base = OscillatorConfig {
        omega0: args.omega0,
        gamma: args.gamma,
        kappa: 0.0,
        tau: 1.0,
        n_kicks: 1,
        hbar: 1.0,
        mass: 1.0,
    };
    base.validate()?;
    Ok(SweepRequest {
        base,
        x_param: SweepParam::Omega0Tau,
        x: SweepAxis::new(x_min, x_max, args.x_count)?,
        y_param: SweepParam::KappaOverOmega0,
        y: SweepAxis::new(args.y_min, args.y_max, args.y_count)?,
    })
}

pub fn stability_csv(request: &SweepRequest) -> Result<String> {
    let cells = sweep::stability_map(request)?;
    let mut manifest = RunManifest::new("stability-map");
    manifest.push("omega0", fmt_f64(request.base.omega0));
    manifest.push("gamma", fmt_f64(request.base.gamma));
    for (name, axis) in [("x", &request.x), ("y", &request.y)] {
        manifest.push(format!("{name}_param"), if name == "x" {
            request.x_param.name()
        } else {
            request.y_param.name()
        });
        manifest.push(format!("{name}_min"), fmt_f64(axis.min));
        manifest.push(format!("{name}_max"), fmt_f64(axis.max));
        manifest.push(format!("{name}_count"), axis.count.to_string());
    }
    let mut out = manifest.render();
    out.push_str("omega0_tau,kappa_over_omega0,re_chi_half,im_chi_half,class\n");
    for cell in &cells {
        match cell {
            Ok(c) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    fmt_f64(c.omega0_tau),
                    fmt_f64(c.kappa_over_omega0),
                    fmt_f64(c.chi_half.re),
                    fmt_f64(c.chi_half.im),
                    c.class,
                );
            }
            Err(e) => {
                let _ = writeln!(
                    out,
                    "# cell error at omega0_tau={}, kappa_over_omega0={}: {}",
                    fmt_f64(e.x),
                    fmt_f64(e.y),
                    e.message,
                );
            }
        }
    }
    Ok(out)
}

pub fn run_stability_map(args: &StabilityMapArgs) -> Result<()> {
    let request = map_request(args)?;
    let csv = stability_csv(&request)?;
    write_output(args.out.as_deref(), &csv)
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub config: ConfigOpts,
    /// First swept parameter: omega0_tau, kappa_over_omega0, omega0, gamma,
    /// kappa or tau
    #[arg(long)]
    pub x_param: String,
    #[arg(long, allow_negative_numbers = true)]
    pub x_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 10)]
    pub x_count: usize,
    /// Second swept parameter, distinct from the first
    #[arg(long)]
    pub y_param: String,
    #[arg(long, allow_negative_numbers = true)]
    pub y_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub y_max: f64,
    #[arg(long, default_value_t = 10)]
    pub y_count: usize,
    /// End of the time grid evaluated in every cell
    #[arg(long)]
    pub t_end: f64,
    /// Time grid points per cell
    #[arg(long, default_value_t = 11)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn sweep_csv(request: &SweepRequest, times: &[f64], t_end: f64, samples: usize) -> Result<String> {
    let cells = sweep::squeezing_sweep(request, times)?;
    let mut manifest = RunManifest::new("sweep");
    manifest.push_config(&request.base);
    manifest.push("x_param", request.x_param.name());
    manifest.push("x_min", fmt_f64(request.x.min));
    manifest.push("x_max", fmt_f64(request.x.max));
    manifest.push("x_count", request.x.count.to_string());
    manifest.push("y_param", request.y_param.name());
    manifest.push("y_min", fmt_f64(request.y.min));
    manifest.push("y_max", fmt_f64(request.y.max));
    manifest.push("y_count", request.y.count.to_string());
    manifest.push("t_end", fmt_f64(t_end));
    manifest.push("samples", samples.to_string());
    let mut out = manifest.render();
    let _ = writeln!(
        out,
        "{},{},t,k_coeff",
        request.x_param.name(),
        request.y_param.name()
    );
    for cell in &cells {
        match &cell.result {
            Ok(profile) => {
                for (t, k) in profile {
                    let _ = writeln!(
                        out,
                        "{},{},{},{}",
                        fmt_f64(cell.x),
                        fmt_f64(cell.y),
                        fmt_f64(*t),
                        fmt_f64(*k),
                    );
                }
            }
            Err(message) => {
                let _ = writeln!(
                    out,
                    "# cell error at {}={}, {}={}: {}",
                    request.x_param.name(),
                    fmt_f64(cell.x),
                    request.y_param.name(),
                    fmt_f64(cell.y),
                    message,
                );
            }
        }
    }
    Ok(out)
}

pub fn run_sweep(args: &SweepArgs) -> Result<()> {
    let base = args.config.resolve()?;
    let request = SweepRequest {
        base,
        x_param: args.x_param.parse()?,
        x: SweepAxis::new(args.x_min, args.x_max, args.x_count)?,
        y_param: args.y_param.parse()?,
        y: SweepAxis::new(args.y_min, args.y_max, args.y_count)?,
    };
    let times = observables::grid_times(args.t_end, args.samples)?;
    let csv = sweep_csv(&request, &times, args.t_end, args.samples)?;
    write_output(args.out.as_deref(), &csv)
}

#[derive(Debug, Args)]
pub struct ClosedFormsArgs {
    #[command(flatten)]
    pub config: ConfigOpts,
    #[arg(long)]
    pub t_end: f64,
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    /// Evaluate the kick-at-zero forms instead of the periodic schedule
    #[arg(long)]
    pub single_kick: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn closed_forms_csv(
    config: &OscillatorConfig,
    t_end: f64,
    samples: usize,
    single_kick: bool,
) -> Result<String> {
    let times = observables::grid_times(t_end, samples)?;
    let regime = config.regime()?;
    let mut rows = Vec::with_capacity(times.len());
    if single_kick {
        for &t in &times {
            let canonical = observables::k_single_kick_canonical(config, t)?;
            let closed = observables::k_single_kick(config, t)?;
            rows.push((t, canonical, closed));
        }
    } else {
        let mode = ModeFunction::new(config)?;
        for &t in &times {
            let canonical = mode.squeeze_coefficient(t)?;
            let n = mode.interval_index(t);
            let closed = match regime {
                DampingRegime::Undamped => observables::k_closed_undamped(config, t, n)?,
                DampingRegime::Weak => observables::k_closed_weak(config, t, n)?,
                DampingRegime::Strong => {
                    return Err(Error::WrongRegime {
                        operation: "closed-forms",
                        expected: "undamped or weak damping",
                        actual: "strong",
                    })
                }
            };
            rows.push((t, canonical, closed));
        }
    }
    let mut manifest = RunManifest::new("closed-forms");
    manifest.push_config(config);
    manifest.push("t_end", fmt_f64(t_end));
    manifest.push("samples", samples.to_string());
    manifest.push("single_kick", if single_kick { "true" } else { "false" });
    let mut out = manifest.render();
    out.push_str("t,k_canonical,k_closed,dev\n");
    for (t, canonical, closed) in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(t),
            fmt_f64(canonical),
            fmt_f64(closed),
            fmt_f64((closed - canonical).abs()),
        );
    }
    Ok(out)
}

pub fn run_closed_forms(args: &ClosedFormsArgs) -> Result<()> {
    let config = args.config.resolve()?;
    let csv = closed_forms_csv(&config, args.t_end, args.samples, args.single_kick)?;
    write_output(args.out.as_deref(), &csv)
}

/// Dispatch; the u8 is the process exit code for successful control flow
/// (verify reports disagreement through code 2 rather than an Err).
pub fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Simulate(args) => run_simulate(args).map(|_| 0),
        Command::Verify(args) => {
            let report = run_verify(args)?;
            Ok(if report.pass { 0 } else { 2 })
        }
        Command::StabilityMap(args) => run_stability_map(args).map(|_| 0),
        Command::Sweep(args) => run_sweep(args).map(|_| 0),
        Command::ClosedForms(args) => run_closed_forms(args).map(|_| 0),
    }
}
