//! Central numeric tolerances. Every comparison threshold used by the
//! library or its test suites lives here so a change in one place is a
//! change everywhere.
//!
//! Rationale in brief: identities that are pure algebra at fixed size
//! (coefficient sums, determinants, similarity transforms) sit near machine
//! epsilon and get 1e-12..1e-14. Quantities accumulated over up to 1e3
//! matrix multiplications or a trig-identity chain get 1e-9. Anything
//! involving exponential growth (hyperbolic regime) or a finite-step
//! integrator gets 1e-6..1e-7.

/// Relative gap below which gamma is considered critically close to omega0.
pub const CRITICAL_DAMPING_REL: f64 = 1e-12;

/// Minimum |mu2 - mu1| accepted before kick matrices are declared singular.
pub const DEGENERATE_GAP_ABS: f64 = 1e-12;

/// |A0 + B0 - 1|: exact algebra, two or three rounding steps.
pub const COEFF_SUM_ABS: f64 = 1e-14;

/// |mu1*A0 + mu2*B0 - i*Omega| relative to Omega.
pub const INIT_VELOCITY_REL: f64 = 1e-12;

/// Trace route vs closed-form route for chi/2, relative.
pub const CHI_HALF_REL: f64 = 1e-12;

/// |det - 1| for single transfer matrices, relative.
pub const UNIT_DET_REL: f64 = 1e-12;

/// Step matrix vs its free/kick similarity factorization, relative.
pub const STEP_FACTORIZATION_REL: f64 = 1e-12;

/// Direct product vs Chebyshev closed form, elliptic (|chi/2| <= 1), n <= 1e3.
pub const DIRECT_VS_CLOSED_ELLIPTIC_REL: f64 = 1e-9;

/// Direct product vs Chebyshev closed form, hyperbolic (|chi/2| > 1), n <= 1e2.
pub const DIRECT_VS_CLOSED_HYPERBOLIC_REL: f64 = 1e-6;

/// Chebyshev normalization U_{n-1}^2 + U_{n-2}^2 - chi * U_{n-1} U_{n-2} = 1.
pub const PELL_ABS: f64 = 1e-9;

/// Recurrence-evaluated U_n vs sin((n+1)theta)/sin(theta), n <= 1e3.
pub const CHEBYSHEV_TRIG_ABS: f64 = 1e-9;

/// |eps| mismatch across a kick instant (eps itself is continuous).
pub const CONTINUITY_ABS: f64 = 1e-10;

/// Velocity jump 2*kappa*eps(k tau) across a kick, relative.
pub const VELOCITY_JUMP_REL: f64 = 1e-9;

/// K(t) = |eps|^2 and sigma_x = hbar/(2 m Omega) K, definitional, relative.
pub const OBSERVABLE_DEF_REL: f64 = 1e-12;

/// Four-term exponential expansion of K vs |eps|^2, relative.
pub const K_EXPANSION_REL: f64 = 1e-12;

/// kappa = 0 damped trajectory vs analytic envelope, relative.
pub const DAMPED_ENVELOPE_REL: f64 = 1e-10;

/// Strong-damping tail |eps(t)|^2 / e^{2(Omega-gamma)t} -> |A|^2, relative.
pub const STRONG_TAIL_REL: f64 = 1e-6;

/// gamma used for the weak -> undamped continuity check.
pub const WEAK_LIMIT_GAMMA: f64 = 1e-8;

/// Coefficient agreement in the weak -> undamped limit, absolute.
pub const WEAK_LIMIT_COEFF_ABS: f64 = 1e-7;

/// K agreement in the weak -> undamped limit, absolute.
pub const WEAK_LIMIT_K_ABS: f64 = 1e-6;

/// Squeezing onset bisection width, relative to tau.
pub const ONSET_WIDTH_REL: f64 = 1e-9;

/// K values this close to 1 count as grazing, not squeezing: a constant
/// K = 1 computes to 1 +- one ulp and must not trigger the onset detector.
pub const ONSET_GRAZING_ABS: f64 = 1e-12;

/// Closed-form K vs RK4 oracle with kicks, absolute on K.
pub const ORACLE_VS_CLOSED_ABS: f64 = 1e-6;

/// Kick-free analytic solution vs RK4 oracle, absolute on eps.
pub const ORACLE_FREE_ABS: f64 = 1e-8;

/// Wronskian drift |(eps' eps* - eps eps'*) e^{2 gamma t} - 2 i Omega|.
pub const WRONSKIAN_ABS: f64 = 1e-7;

/// Wronskian change across one kick instant (it is exactly conserved).
pub const WRONSKIAN_KICK_ABS: f64 = 1e-10;

/// Half-width of the parabolic band around |Re chi/2| = 1.
pub const PARABOLIC_BAND: f64 = 1e-9;

/// |det(product) - 1| after up to 1e3 unimodular factors, absolute.
pub const PRODUCT_DET_ABS: f64 = 1e-10;

/// Error-ratio floor per step halving for the RK4 order check (2^4 = 16,
/// with 25% slack for error-constant wobble).
pub const RK4_ORDER_RATIO_MIN: f64 = 12.0;

/// Kick-count cap; beyond this the closed form is the only sensible route.
pub const MAX_KICKS: u32 = 100_000;

/// Minimum integrator steps per kick interval.
pub const MIN_STEPS_PER_INTERVAL: u32 = 100;
