//! Chebyshev polynomials of the second kind and the spectral data of 2x2
//! transfer matrices.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::counting::{count_cascade_free, GpkDecomposition};
use crate::error::{Error, Result};

pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// `U_n(x)` by the forward recurrence `U_n = 2x U_{n-1} - U_{n-2}`.
pub fn chebyshev_u(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for _ in 1..n {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Coupling parameter `trace / (2 sqrt(det))`; infinite when `det = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Finite(f64),
    Infinite,
}

impl Coupling {
    pub fn value(&self) -> f64 {
        match self {
            Coupling::Finite(x) => *x,
            Coupling::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Coupling::Finite(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub trace: BigInt,
    pub det: BigInt,
    /// `trace^2 - 4 det`, exact.
    pub discriminant: BigInt,
    pub lambda1: f64,
    pub lambda2: f64,
    pub coupling: Coupling,
    pub degenerate: bool,
}

impl SpectralData {
    /// Spectrum of a 2x2 matrix from its trace and determinant. Requires a
    /// nonnegative discriminant and determinant.
    pub fn from_trace_det(trace: BigInt, det: BigInt) -> Result<Self> {
        let discriminant = &trace * &trace - BigInt::from(4u8) * &det;
        if discriminant < BigInt::zero() || det < BigInt::zero() {
            return Err(Error::NotApplicable(format!(
                "complex or negative spectrum (trace {trace}, det {det})"
            )));
        }
        let tr = trace.to_f64().unwrap_or(f64::INFINITY);
        let root = discriminant.to_f64().unwrap_or(f64::INFINITY).sqrt();
        let degenerate = discriminant.is_zero();
        let (lambda1, lambda2) = if degenerate {
            (tr / 2.0, tr / 2.0)
        } else {
            ((tr + root) / 2.0, (tr - root) / 2.0)
        };
        let coupling = if det.is_zero() {
            Coupling::Infinite
        } else if degenerate {
            Coupling::Finite(1.0)
        } else {
            Coupling::Finite(tr / (2.0 * det.to_f64().unwrap_or(f64::INFINITY).sqrt()))
        };
        Ok(SpectralData {
            trace,
            det,
            discriminant,
            lambda1,
            lambda2,
            coupling,
            degenerate,
        })
    }
}

pub fn spectral_data(gpk: &GpkDecomposition) -> SpectralData {
    SpectralData::from_trace_det(BigInt::from(gpk.alphabet()), BigInt::from(gpk.det()))
        .expect("N^2 >= 4d holds for every decomposition")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevReport {
    pub max_rel_error: f64,
    /// Index attaining `max_rel_error`.
    pub worst_len: usize,
    pub tol: f64,
    pub pass: bool,
}

/// Compares exact `a(l)` with `sqrt(d)^l U_l(x)` for `0 <= l <= len`.
pub fn verify_chebyshev_representation(
    gpk: &GpkDecomposition,
    len: usize,
    tol: f64,
) -> Result<ChebyshevReport> {
    if gpk.det() == 0 {
        return Err(Error::NotApplicable(
            "Chebyshev form needs g * t > 0".into(),
        ));
    }
    let exact = count_cascade_free(gpk, len);
    let scale = (gpk.det() as f64).sqrt();
    let x = gpk.alphabet() as f64 / (2.0 * scale);
    let mut max_rel_error = 0.0f64;
    let mut worst_len = 0;
    for (l, a) in exact.iter().enumerate() {
        let a = a.to_f64().unwrap_or(f64::INFINITY);
        let approx = scale.powi(l as i32) * chebyshev_u(l, x);
        let rel = ((approx - a) / a).abs();
        if rel > max_rel_error || rel.is_nan() {
            max_rel_error = rel;
            worst_len = l;
        }
    }
    Ok(ChebyshevReport {
        max_rel_error,
        worst_len,
        tol,
        pass: max_rel_error <= tol,
    })
}
