//! C ABI over the kposc core. Handles are opaque pointers created and
//! destroyed here; every fallible call returns a `KposcStatus` and writes
//! results through out-pointers only on `Ok`. The header `include/kposc.h`
//! is regenerated by the build script.

use std::ffi::c_char;

use num_complex::Complex64;

use kposc::oscillator::mode_basis;
use kposc::sweep::classify_stability;
use kposc::{DampingRegime, Error, ModeFunction, OscillatorConfig, StabilityClass};

/// Opaque oscillator configuration handle.
pub struct KposcConfig(OscillatorConfig);

/// Opaque trajectory evaluator handle, built from a config.
pub struct KposcMode(ModeFunction);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KposcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    CriticalDamping = 3,
    DegenerateBasis = 4,
    OutOfRange = 5,
    WrongRegime = 6,
    NonFinite = 7,
    ParseError = 8,
    IoError = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KposcRegime {
    Undamped = 0,
    Weak = 1,
    Strong = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KposcStabilityClass {
    Elliptic = 0,
    Hyperbolic = 1,
    Parabolic = 2,
}

fn status_of(e: &Error) -> KposcStatus {
    match e {
        Error::CriticalDamping { .. } => KposcStatus::CriticalDamping,
        Error::DegenerateBasis { .. } => KposcStatus::DegenerateBasis,
        Error::OutOfRange { .. } => KposcStatus::OutOfRange,
        Error::WrongRegime { .. } => KposcStatus::WrongRegime,
        Error::NonFinite(_) => KposcStatus::NonFinite,
        Error::UnknownKey { .. } | Error::ConfigParse { .. } => KposcStatus::ParseError,
        Error::Io(_) => KposcStatus::IoError,
        Error::Validation { .. } | Error::EmptyInput(_) | Error::StepTooCoarse { .. } => {
            KposcStatus::InvalidArgument
        }
    }
}

/// Create a config handle in natural units (hbar = mass = 1). On success the
/// new handle is written through `out`; on failure nothing is written.
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn kposc_config_new(
    omega0: f64,
    gamma: f64,
    kappa: f64,
    tau: f64,
    n_kicks: u32,
    out: *mut *mut KposcConfig,
) -> KposcStatus {
    if out.is_null() {
        return KposcStatus::NullPointer;
    }
    match OscillatorConfig::new(omega0, gamma, kappa, tau, n_kicks) {
        Ok(config) => {
            *out = Box::into_raw(Box::new(KposcConfig(config)));
            KposcStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Override hbar and mass on an existing config.
///
/// # Safety
/// `config` must be a live handle from `kposc_config_new`.
#[no_mangle]
pub unsafe extern "C" fn kposc_config_set_units(
    config: *mut KposcConfig,
    hbar: f64,
    mass: f64,
) -> KposcStatus {
    let Some(config) = config.as_mut() else {
        return KposcStatus::NullPointer;
    };
    let mut updated = config.0;
    updated.hbar = hbar;
    updated.mass = mass;
    match updated.validate() {
        Ok(()) => {
            config.0 = updated;
            KposcStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Destroy a config handle. Null is a no-op.
///
/// # Safety
/// `config` must be null or a handle from `kposc_config_new` that has not
/// been freed already.
#[no_mangle]
pub unsafe extern "C" fn kposc_config_free(config: *mut KposcConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Half-trace of the one-period matrix for this config.
///
/// # Safety
/// `config` must be a live handle; `out_re` and `out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kposc_config_chi_half(
    config: *const KposcConfig,
    out_re: *mut f64,
    out_im: *mut f64,
) -> KposcStatus {
    let Some(config) = config.as_ref() else {
        return KposcStatus::NullPointer;
    };
    if out_re.is_null() || out_im.is_null() {
        return KposcStatus::NullPointer;
    }
    match mode_basis(&config.0) {
        Ok(basis) => {
            *out_re = basis.chi_half.re;
            *out_im = basis.chi_half.im;
            KposcStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Damping regime of the config.
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kposc_config_regime(
    config: *const KposcConfig,
    out: *mut KposcRegime,
) -> KposcStatus {
    let Some(config) = config.as_ref() else {
        return KposcStatus::NullPointer;
    };
    if out.is_null() {
        return KposcStatus::NullPointer;
    }
    match config.0.regime() {
        Ok(regime) => {
            *out = match regime {
                DampingRegime::Undamped => KposcRegime::Undamped,
                DampingRegime::Weak => KposcRegime::Weak,
                DampingRegime::Strong => KposcRegime::Strong,
            };
            KposcStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Classify a half-trace value by the bounded-growth criterion.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kposc_stability_class(
    chi_half_re: f64,
    chi_half_im: f64,
    out: *mut KposcStabilityClass,
) -> KposcStatus {
    if out.is_null() {
        return KposcStatus::NullPointer;
    }
    match classify_stability(Complex64::new(chi_half_re, chi_half_im)) {
        Ok(class) => {
            *out = match class {
                StabilityClass::Elliptic => KposcStabilityClass::Elliptic,
                StabilityClass::Hyperbolic => KposcStabilityClass::Hyperbolic,
                StabilityClass::Parabolic => KposcStabilityClass::Parabolic,
            };
            KposcStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Build a trajectory evaluator; propagates all kick coefficients up front.
///
/// # Safety
/// `config` must be a live handle; `out` must be writable. The mode handle
/// is independent of the config afterwards.
#[no_mangle]
pub unsafe extern "C" fn kposc_mode_new(
    config: *const KposcConfig,
    out: *mut *mut KposcMode,
) -> KposcStatus {
    let Some(config) = config.as_ref() else {
        return KposcStatus::NullPointer;
    };
    if out.is_null() {
        return KposcStatus::NullPointer;
    }
    match ModeFunction::new(&config.0) {
        Ok(mode) => {
            *out = Box::into_raw(Box::new(KposcMode(mode)));
            KposcStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Destroy a mode handle. Null is a no-op.
///
/// # Safety
/// `mode` must be null or a handle from `kposc_mode_new` not freed already.
#[no_mangle]
pub unsafe extern "C" fn kposc_mode_free(mode: *mut KposcMode) {
    if !mode.is_null() {
        drop(Box::from_raw(mode));
    }
}

/// Mode function value at time t.
///
/// # Safety
/// `mode` must be a live handle; `out_re` and `out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kposc_mode_epsilon(
    mode: *const KposcMode,
    t: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> KposcStatus {
    let Some(mode) = mode.as_ref() else {
        return KposcStatus::NullPointer;
    };
    if out_re.is_null() || out_im.is_null() {
        return KposcStatus::NullPointer;
    }
    match mode.0.epsilon_at(t) {
        Ok(eps) => {
            *out_re = eps.re;
            *out_im = eps.im;
            KposcStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Squeezing coefficient K(t) = |eps(t)|^2.
///
/// # Safety
/// `mode` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kposc_mode_squeeze(
    mode: *const KposcMode,
    t: f64,
    out: *mut f64,
) -> KposcStatus {
    let Some(mode) = mode.as_ref() else {
        return KposcStatus::NullPointer;
    };
    if out.is_null() {
        return KposcStatus::NullPointer;
    }
    match mode.0.squeeze_coefficient(t) {
        Ok(k) => {
            *out = k;
            KposcStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Coordinate variance at time t in the config's units.
///
/// # Safety
/// `mode` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kposc_mode_variance(
    mode: *const KposcMode,
    t: f64,
    out: *mut f64,
) -> KposcStatus {
    let Some(mode) = mode.as_ref() else {
        return KposcStatus::NullPointer;
    };
    if out.is_null() {
        return KposcStatus::NullPointer;
    }
    match mode.0.coordinate_variance(t) {
        Ok(v) => {
            *out = v;
            KposcStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kposc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn kposc_status_message(status: KposcStatus) -> *const c_char {
    let bytes: &'static [u8] = match status {
        KposcStatus::Ok => b"ok\0",
        KposcStatus::NullPointer => b"null pointer argument\0",
        KposcStatus::InvalidArgument => b"invalid argument\0",
        KposcStatus::CriticalDamping => b"critical damping: exponential basis degenerates\0",
        KposcStatus::DegenerateBasis => b"degenerate basis: exponent gap underflowed\0",
        KposcStatus::OutOfRange => b"argument out of range\0",
        KposcStatus::WrongRegime => b"operation not defined in this damping regime\0",
        KposcStatus::NonFinite => b"non-finite value\0",
        KposcStatus::ParseError => b"parse error\0",
        KposcStatus::IoError => b"i/o error\0",
    };
    bytes.as_ptr().cast()
}
