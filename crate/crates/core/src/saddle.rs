//! Saddle points of the integrand G(z)/z^(n+1) for G = exp(m·e^(bz) + r·e^(dz) + s):
//! positive roots of f(z) = z·(b·m·e^(bz) + d·r·e^(dz)) − n = 0.
//!
//! Three routes with increasing accuracy: the Lambert main term
//! z₀ = W(n/m)/b, a single Newton step in closed form (algebraically equal
//! to `newton_refine` at z₀ after eliminating e^W), and damped Newton
//! iteration to a residual target.

use crate::numerics::{lambert_w0, NumericError, PrecisionContext, Real};
use crate::params::{EgfParams, Rational};

pub const DEFAULT_MAX_ITER: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SaddleError {
    #[error("saddle derivative vanishes at z = {z}")]
    DerivativeVanishes { z: String },
    #[error("no convergence for n = {n} after {iterations} iterations (last residual {last_residual})")]
    NoConvergence {
        n: u64,
        iterations: usize,
        last_residual: String,
    },
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaddleMethod {
    MainTerm,
    NewtonOnce,
    NewtonConverged,
}

/// A solved (or approximated) saddle for one n.
#[derive(Debug, Clone)]
pub struct SaddlePoint {
    pub n: u64,
    /// Lambert main term W(n/m)/b.
    pub z0: Real,
    /// Refined point actually used downstream.
    pub z: Real,
    /// f(z) at the refined point.
    pub residual: Real,
    pub method: SaddleMethod,
    /// Newton iterations spent (0 for the non-iterative routes).
    pub iterations: usize,
}

/// Parameters lifted to big-floats at one working precision.
struct Lifted {
    m: Real,
    b: Real,
    d: Real,
    r: Real,
}

fn lift(params: &EgfParams, bits: usize) -> Lifted {
    Lifted {
        m: Real::from_rational(params.m(), bits),
        b: Real::from_rational(params.b(), bits),
        d: Real::from_rational(params.d(), bits),
        r: Real::from_rational(params.r(), bits),
    }
}

/// f(z) and f′(z), sharing the two exponentials:
/// f(z) = z·(b·m·e^(bz) + d·r·e^(dz)) − n,
/// f′(z) = b·m·e^(bz)·(1+bz) + d·r·e^(dz)·(1+dz).
pub(crate) fn saddle_f(params: &EgfParams, n: u64, z: &Real, bits: usize) -> (Real, Real) {
    let p = lift(params, bits);
    let one = Real::one(bits);
    let bz = &p.b * z;
    let dz = &p.d * z;
    let bt = &p.b * &p.m * bz.exp();
    let dt = &p.d * &p.r * dz.exp();
    let f = z * (&bt + &dt) - Real::from_u64(n, bits);
    let df = &bt * (&one + &bz) + &dt * (&one + &dz);
    (f, df)
}

/// W(n/m)/b.
pub fn saddle_main_term(
    params: &EgfParams,
    n: u64,
    ctx: &PrecisionContext,
) -> Result<Real, SaddleError> {
    let bits = ctx.bits();
    let x = Rational::from_integer(n.into()) / params.m();
    let w = lambert_w0(&Real::from_rational(&x, bits), ctx)?;
    Ok(w / Real::from_rational(params.b(), bits))
}

/// One raw Newton step z − f(z)/f′(z) from an arbitrary positive point.
pub fn saddle_newton_refine(
    params: &EgfParams,
    n: u64,
    z_in: &Real,
    ctx: &PrecisionContext,
) -> Result<Real, SaddleError> {
    let bits = ctx.bits();
    let z = z_in.with_bits(bits);
    let (f, df) = saddle_f(params, n, &z, bits);
    if df.is_zero() {
        return Err(SaddleError::DerivativeVanishes { z: z.to_sci(8) });
    }
    Ok(&z - f / df)
}

/// The closed-form single-refinement saddle
/// z = W/b − 1/( b²·m^(d/b)·n^(1−d/b)·(W+1)·W^(d/b−2)/(d·r) + b/W + d ),
/// W = W(n/m); fractional powers are exp(q·ln) of positive bases.
pub fn saddle_closed_form(
    params: &EgfParams,
    n: u64,
    ctx: &PrecisionContext,
) -> Result<Real, SaddleError> {
    let bits = ctx.bits();
    let p = lift(params, bits);
    let x = Rational::from_integer(n.into()) / params.m();
    let w = lambert_w0(&Real::from_rational(&x, bits), ctx)?;

    let q = Rational::new(params.d().numer() * params.b().denom(), params.d().denom() * params.b().numer());
    let qf = Real::from_rational(&q, bits);
    let one = Real::one(bits);
    let nf = Real::from_u64(n, bits);

    // m^{d/b} · n^{1−d/b} · W^{d/b−2}
    let frac = ((&qf * p.m.ln()) + (&one - &qf) * nf.ln() + (&qf - Real::from_u64(2, bits)) * w.ln()).exp();
    let lead = &p.b * &p.b * frac * (&w + &one) / (&p.d * &p.r);
    let denom = lead + &p.b / &w + &p.d;
    Ok(&w / &p.b - denom.recip())
}

/// Damped Newton iteration from z₀ until |f(z)| ≤ 10^(−tol_digits)·n.
/// `tol_digits` defaults to half the context digits. Steps leaving (0, ∞)
/// are bisected back toward the current iterate.
pub fn saddle_solve(
    params: &EgfParams,
    n: u64,
    tol_digits: Option<u32>,
    ctx: &PrecisionContext,
    max_iter: usize,
) -> Result<SaddlePoint, SaddleError> {
    let bits = ctx.bits();
    let tol_digits = tol_digits.unwrap_or(ctx.digits() / 2);
    let target = Real::from_u64(n, bits)
        * Real::from_u64(10, bits).powi(tol_digits as usize).recip();

    let z0 = saddle_main_term(params, n, ctx)?;
    let mut z = z0.clone();
    let mut residual = saddle_f(params, n, &z, bits).0;
    if residual.abs().cmp(&target).is_le() {
        return Ok(SaddlePoint {
            n,
            z0,
            z,
            residual,
            method: SaddleMethod::NewtonConverged,
            iterations: 0,
        });
    }
    for it in 1..=max_iter {
        let (f, df) = saddle_f(params, n, &z, bits);
        if df.is_zero() {
            return Err(SaddleError::DerivativeVanishes { z: z.to_sci(8) });
        }
        let mut step = f / df;
        let mut cand = &z - &step;
        let mut halvings = 0;
        while !cand.is_positive() {
            // bisect the step toward the current iterate (and hence toward
            // the z0 side of the axis on the first step)
            step = step / Real::from_u64(2, bits);
            cand = &z - &step;
            halvings += 1;
            if halvings > 128 {
                return Err(SaddleError::NoConvergence {
                    n,
                    iterations: it,
                    last_residual: residual.to_sci(8),
                });
            }
        }
        z = cand;
        residual = saddle_f(params, n, &z, bits).0;
        if residual.abs().cmp(&target).is_le() {
            return Ok(SaddlePoint {
                n,
                z0,
                z,
                residual,
                method: SaddleMethod::NewtonConverged,
                iterations: it,
            });
        }
    }
    Err(SaddleError::NoConvergence {
        n,
        iterations: max_iter,
        last_residual: residual.to_sci(8),
    })
}

impl SaddlePoint {
    /// Saddle data with z = z₀ (no refinement).
    pub fn main_term(
        params: &EgfParams,
        n: u64,
        ctx: &PrecisionContext,
    ) -> Result<Self, SaddleError> {
        let z0 = saddle_main_term(params, n, ctx)?;
        let residual = saddle_f(params, n, &z0, ctx.bits()).0;
        Ok(SaddlePoint {
            n,
            z0: z0.clone(),
            z: z0,
            residual,
            method: SaddleMethod::MainTerm,
            iterations: 0,
        })
    }

    /// Saddle data with the closed-form single refinement.
    pub fn newton_once(
        params: &EgfParams,
        n: u64,
        ctx: &PrecisionContext,
    ) -> Result<Self, SaddleError> {
        let z0 = saddle_main_term(params, n, ctx)?;
        let z = saddle_closed_form(params, n, ctx)?;
        let residual = saddle_f(params, n, &z, ctx.bits()).0;
        Ok(SaddlePoint {
            n,
            z0,
            z,
            residual,
            method: SaddleMethod::NewtonOnce,
            iterations: 0,
        })
    }
}
