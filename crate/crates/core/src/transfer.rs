//! Per-kick transfer matrices, coefficient propagation, and the Chebyshev
//! closed form for the accumulated product.
//!
//! One kick at t = k*tau maps the coefficient pair by
//!
//! ```text
//! Q_k = [ 1 - g   -g e^{D tau k} ]        g = 2 kappa / D
//!       [ g e^{-D tau k}   1 + g ]
//! ```
//!
//! `Q_k` is the similarity transform `T^{-k} M T^k` of the constant kick
//! matrix `M` by the free half-step diagonal `T = diag(e^{-D tau/2}, e^{D tau/2})`,
//! so the n-kick product telescopes to `T^{-n} (M T)^n` and Cayley-Hamilton
//! (det MT = 1) turns the power into two Chebyshev polynomials of the second
//! kind evaluated at the half-trace chi/2.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oscillator::ModeBasis;
use crate::tolerances;

/// 2x2 complex matrix acting on coefficient pairs (A, B).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl TransferMatrix {
    pub const fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::new(one, zero, zero, one)
    }

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> Complex64 {
        self.m11 + self.m22
    }

    pub fn apply(&self, a: Complex64, b: Complex64) -> (Complex64, Complex64) {
        (self.m11 * a + self.m12 * b, self.m21 * a + self.m22 * b)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.m11 * s, self.m12 * s, self.m21 * s, self.m22 * s)
    }

    /// Largest entrywise |self - other|; used by the verify diagnostics.
    pub fn max_entry_distance(&self, other: &Self) -> f64 {
        [
            (self.m11 - other.m11).norm(),
            (self.m12 - other.m12).norm(),
            (self.m21 - other.m21).norm(),
            (self.m22 - other.m22).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Largest entry magnitude; scales relative comparisons.
    pub fn max_entry_norm(&self) -> f64 {
        [
            self.m11.norm(),
            self.m12.norm(),
            self.m21.norm(),
            self.m22.norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl std::ops::Mul for TransferMatrix {
    type Output = TransferMatrix;

    fn mul(self, rhs: TransferMatrix) -> TransferMatrix {
        TransferMatrix::new(
            self.m11 * rhs.m11 + self.m12 * rhs.m21,
            self.m11 * rhs.m12 + self.m12 * rhs.m22,
            self.m21 * rhs.m11 + self.m22 * rhs.m21,
            self.m21 * rhs.m12 + self.m22 * rhs.m22,
        )
    }
}

impl std::ops::Sub for TransferMatrix {
    type Output = TransferMatrix;

    fn sub(self, rhs: TransferMatrix) -> TransferMatrix {
        TransferMatrix::new(
            self.m11 - rhs.m11,
            self.m12 - rhs.m12,
            self.m21 - rhs.m21,
            self.m22 - rhs.m22,
        )
    }
}

/// Coefficient pair after k kicks; k = 0 is the initial (A0, B0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientState {
    pub k: u32,
    pub a: Complex64,
    pub b: Complex64,
}

impl CoefficientState {
    /// Euclidean norm of the pair.
    pub fn norm(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr()).sqrt()
    }
}

/// Free diagonal over one interval: diag(e^{-D tau/2}, e^{D tau/2}).
pub fn free_matrix(basis: &ModeBasis, tau: f64) -> TransferMatrix {
    free_matrix_pow(basis, tau, 1)
}

/// k-th power of the free diagonal; k may be negative.
pub fn free_matrix_pow(basis: &ModeBasis, tau: f64, k: i64) -> TransferMatrix {
    let half = basis.big_d * (0.5 * tau * k as f64);
    let zero = Complex64::new(0.0, 0.0);
    TransferMatrix::new((-half).exp(), zero, zero, half.exp())
}

fn kick_ratio(basis: &ModeBasis, kappa: f64) -> Result<Complex64> {
    let gap = basis.big_d.norm();
    if gap <= tolerances::DEGENERATE_GAP_ABS {
        return Err(Error::DegenerateBasis {
            gap,
            min: tolerances::DEGENERATE_GAP_ABS,
        });
    }
    Ok(Complex64::new(2.0 * kappa, 0.0) / basis.big_d)
}

/// Constant kick matrix M = [[1-g, -g], [g, 1+g]] with g = 2 kappa / D.
/// det M = (1-g)(1+g) + g^2 = 1 for any g.
pub fn kick_matrix(basis: &ModeBasis, kappa: f64) -> Result<TransferMatrix> {
    let g = kick_ratio(basis, kappa)?;
    let one = Complex64::new(1.0, 0.0);
    Ok(TransferMatrix::new(one - g, -g, g, one + g))
}

/// Transfer matrix of the kick at t = k*tau acting on raw coefficient pairs.
/// Equals `T^{-k} M T^{k}`; the factorization is property-tested.
pub fn step_matrix(basis: &ModeBasis, kappa: f64, tau: f64, k: u32) -> Result<TransferMatrix> {
    let g = kick_ratio(basis, kappa)?;
    let one = Complex64::new(1.0, 0.0);
    let phase = (basis.big_d * (tau * f64::from(k))).exp();
    Ok(TransferMatrix::new(
        one - g,
        -g * phase,
        g / phase,
        one + g,
    ))
}

/// All coefficient states 0..=n from iterated application of the step
/// matrices. This is the canonical propagation path.
pub fn propagate_states(
    basis: &ModeBasis,
    kappa: f64,
    tau: f64,
    n: u32,
) -> Result<Vec<CoefficientState>> {
    let mut states = Vec::with_capacity(n as usize + 1);
    states.push(CoefficientState {
        k: 0,
        a: basis.a0,
        b: basis.b0,
    });
    for k in 1..=n {
        let q = step_matrix(basis, kappa, tau, k)?;
        let prev = states[k as usize - 1];
        let (a, b) = q.apply(prev.a, prev.b);
        states.push(CoefficientState { k, a, b });
    }
    Ok(states)
}

/// Final coefficient pair after n kicks (canonical path).
pub fn propagate_direct(
    basis: &ModeBasis,
    kappa: f64,
    tau: f64,
    n: u32,
) -> Result<CoefficientState> {
    Ok(*propagate_states(basis, kappa, tau, n)?
        .last()
        .expect("propagate_states returns at least the initial state"))
}

/// Chebyshev polynomial of the second kind by the three-term recurrence:
/// U_{-1} = 0, U_0 = 1, U_k = 2x U_{k-1} - U_{k-2}. The recurrence (rather
/// than the trigonometric form) keeps |x| > 1 free of branch cuts; growth
/// there is exponential in n.
pub fn chebyshev_u(n: i64, x: Complex64) -> Complex64 {
    assert!(n >= -1, "chebyshev_u defined for n >= -1, got {n}");
    let mut prev = Complex64::new(0.0, 0.0); // U_{-1}
    let mut cur = Complex64::new(1.0, 0.0); // U_0
    if n == -1 {
        return prev;
    }
    for _ in 0..n {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Accumulated n-kick matrix via the closed form
/// `T^{-n} (MT)^n = T^{-n} [ U_{n-1}(chi/2) MT - U_{n-2}(chi/2) I ]`.
/// Must match the iterated step product; the acceptance suite enforces the
/// tiered tolerances.
pub fn closed_form_power(
    basis: &ModeBasis,
    kappa: f64,
    tau: f64,
    n: u32,
) -> Result<TransferMatrix> {
    if n == 0 {
        // empty product; keeps the kick-free call sites uniform
        kick_ratio(basis, kappa)?;
        return Ok(TransferMatrix::identity());
    }
    let mt = kick_matrix(basis, kappa)? * free_matrix(basis, tau);
    let x = basis.chi_half;
    let u_top = chebyshev_u(i64::from(n) - 1, x);
    let u_low = chebyshev_u(i64::from(n) - 2, x);
    let power = mt.scale(u_top) - TransferMatrix::identity().scale(u_low);
    Ok(free_matrix_pow(basis, tau, -i64::from(n)) * power)
}

/// The same closed form under an off-by-one index convention in which one
/// free factor is left unabsorbed; equals `free_matrix * closed_form_power`.
/// Kept as a diagnostic: the verify report measures its entrywise distance
/// from the canonical product, it is never used for propagation.
///
/// The (2,2) entry is written with an ambiguous parenthesis in the source
/// formula; this reads it as `(1 + g) U_{n-1} e^{-D(n-2)tau/2} - U_{n-2} e^{-D(n-1)tau/2}`,
/// mirroring the (1,1) entry.
pub fn alt_s_matrix(basis: &ModeBasis, kappa: f64, tau: f64, n: u32) -> Result<TransferMatrix> {
    if n == 0 {
        return Err(Error::OutOfRange {
            what: "n",
            message: "alt_s_matrix needs n >= 1".into(),
        });
    }
    let g = kick_ratio(basis, kappa)?;
    let one = Complex64::new(1.0, 0.0);
    let x = basis.chi_half;
    let u_top = chebyshev_u(i64::from(n) - 1, x);
    let u_low = chebyshev_u(i64::from(n) - 2, x);
    let nf = f64::from(n);
    let e = |p: f64| (basis.big_d * (0.5 * tau * p)).exp();
    Ok(TransferMatrix::new(
        (one - g) * u_top * e(nf - 2.0) - u_low * e(nf - 1.0),
        -g * u_top * e(nf),
        g * u_top * e(-nf),
        (one + g) * u_top * e(-(nf - 2.0)) - u_low * e(-(nf - 1.0)),
    ))
}
