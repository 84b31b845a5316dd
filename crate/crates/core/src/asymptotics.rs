//! Log-space asymptotic estimators for a(n): the Hayman estimate at an
//! arbitrary saddle, the full closed-form-saddle formula, and the
//! simplified b/d ≥ 2 formula with its regime constant c.
//!
//! Estimates are carried as natural logs end to end; a(10000) has ≈35000
//! decimal digits, so values are materialized only at output boundaries.

use crate::numerics::{lambert_w0, log_factorial, PrecisionContext, Real};
use crate::params::{EgfParams, Rational, Regime};
use crate::saddle::{saddle_closed_form, saddle_solve, SaddleError, DEFAULT_MAX_ITER};
use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AsympError {
    #[error("variance factor b(z) is not positive at n = {n}, z = {z}: invalid saddle or parameters")]
    NegativeVariance { n: u64, z: String },
    #[error("simplified formula requires b/d ≥ 2; these parameters have {regime} — use the full formula")]
    FullFormulaRequired { regime: Regime },
    #[error(transparent)]
    Saddle(#[from] SaddleError),
}

/// Which estimator produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    /// General saddle-point estimate at an explicitly supplied (usually
    /// fully converged) saddle.
    Hayman,
    /// Closed-form-saddle formula, valid in every regime.
    Full,
    /// b/d ≥ 2 formula in terms of W(n/m) alone.
    Simplified,
}

impl std::fmt::Display for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Formula::Hayman => "hayman",
            Formula::Full => "full",
            Formula::Simplified => "simplified",
        })
    }
}

/// How ln(n!) enters the Hayman estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorialMode {
    Exact,
    Stirling,
}

/// One asymptotic value in log space.
#[derive(Debug, Clone)]
pub struct AsympEstimate {
    pub n: u64,
    pub formula: Formula,
    /// Natural log of the estimate; always finite.
    pub log_value: Real,
    pub ctx: PrecisionContext,
}

impl AsympEstimate {
    /// Base-10 log of the estimate.
    pub fn log10(&self) -> Real {
        &self.log_value / Real::ln_10(self.ctx.bits())
    }

    /// Decimal rendering `<mantissa>e<exponent>` with a ctx.digits-long
    /// mantissa; equals exp(log_value) to the context precision.
    pub fn rendered(&self) -> String {
        let bits = self.ctx.bits();
        let l10 = self.log10();
        let e10 = l10.floor();
        let mant = ((&l10 - &e10) * Real::ln_10(bits)).exp();
        let (_, ds, me) = mant.decimal_parts(self.ctx.digits() as usize);
        let exp_total = e10.floor_i64() + me - 1;
        let mut s = String::with_capacity(ds.len() + 8);
        s.push((b'0' + ds[0]) as char);
        if ds.len() > 1 {
            s.push('.');
            for &d in &ds[1..] {
                s.push((b'0' + d) as char);
            }
        }
        s.push('e');
        s.push_str(&exp_total.to_string());
        s
    }
}

struct Lifted {
    m: Real,
    b: Real,
    d: Real,
    r: Real,
    s: Real,
}

fn lift(params: &EgfParams, bits: usize) -> Lifted {
    Lifted {
        m: Real::from_rational(params.m(), bits),
        b: Real::from_rational(params.b(), bits),
        d: Real::from_rational(params.d(), bits),
        r: Real::from_rational(params.r(), bits),
        s: Real::from_rational(params.s(), bits),
    }
}

/// ln n! per the chosen mode; the Stirling branch stays in log space.
fn ln_factorial(n: u64, mode: FactorialMode, ctx: &PrecisionContext) -> Real {
    let bits = ctx.bits();
    match mode {
        FactorialMode::Exact => log_factorial(n, ctx),
        FactorialMode::Stirling => {
            let nf = Real::from_u64(n, bits);
            let tau_n = Real::pi(bits) * Real::from_u64(2 * n, bits);
            let half = Real::from_u64(2, bits).recip();
            &nf * nf.ln() - &nf + half * tau_n.ln()
        }
    }
}

/// Saddle-point estimate at a caller-chosen z:
/// ln est = (m·e^(bz) + r·e^(dz) + s) − n·ln z − ½·ln(2π·b(z)) + ln n!,
/// with b(z) = z·(b·m·e^(bz)(1+bz) + d·r·e^(dz)(1+dz)).
pub fn hayman_estimate(
    params: &EgfParams,
    n: u64,
    z: &Real,
    ctx: &PrecisionContext,
    factorial_mode: FactorialMode,
) -> Result<AsympEstimate, AsympError> {
    let bits = ctx.bits();
    let p = lift(params, bits);
    let z = z.with_bits(bits);
    let one = Real::one(bits);
    let bz = &p.b * &z;
    let dz = &p.d * &z;
    let ebz = bz.exp();
    let edz = dz.exp();
    let variance = &z
        * (&p.b * &p.m * &ebz * (&one + &bz) + &p.d * &p.r * &edz * (&one + &dz));
    if !variance.is_positive() {
        return Err(AsympError::NegativeVariance {
            n,
            z: z.to_sci(8),
        });
    }
    let g_exponent = &p.m * &ebz + &p.r * &edz + &p.s;
    let half = Real::from_u64(2, bits).recip();
    let tau = Real::pi(bits) * Real::from_u64(2, bits);
    let log_value = g_exponent - Real::from_u64(n, bits) * z.ln() - &half * (tau * variance).ln()
        + ln_factorial(n, factorial_mode, ctx);
    Ok(AsympEstimate {
        n,
        formula: Formula::Hayman,
        log_value,
        ctx: *ctx,
    })
}

fn full_at(params: &EgfParams, n: u64, z: &Real, ctx: &PrecisionContext) -> Result<Real, AsympError> {
    let bits = ctx.bits();
    let p = lift(params, bits);
    let one = Real::one(bits);
    let half = Real::from_u64(2, bits).recip();
    let nf = Real::from_u64(n, bits);
    let bz = &p.b * z;
    let dz = &p.d * z;
    let ebz = bz.exp();
    let edz = dz.exp();
    let v = &p.b * &p.m * &ebz * (&bz + &one) + &p.d * &p.r * &edz * (&dz + &one);
    if !v.is_positive() {
        return Err(AsympError::NegativeVariance {
            n,
            z: z.to_sci(8),
        });
    }
    Ok((&nf + &half) * (nf.ln() - z.ln()) + &p.m * &ebz + &p.r * &edz - &nf + &p.s
        - half * v.ln())
}

/// The closed-form-saddle estimate:
/// ln est = (n+½)(ln n − ln z) + m·e^(bz) + r·e^(dz) − n + s
///          − ½·ln(b·m·e^(bz)(bz+1) + d·r·e^(dz)(dz+1)),
/// with z from [`saddle_closed_form`]. Valid in every b/d regime.
pub fn asymp_full(
    params: &EgfParams,
    n: u64,
    ctx: &PrecisionContext,
) -> Result<AsympEstimate, AsympError> {
    let z = saddle_closed_form(params, n, ctx)?;
    let log_value = full_at(params, n, &z, ctx)?;
    Ok(AsympEstimate {
        n,
        formula: Formula::Full,
        log_value,
        ctx: *ctx,
    })
}

/// ln c as an exact rational: 0 when b/d > 2, −r²/(8m) when b/d = 2.
pub fn correction_constant(params: &EgfParams) -> Result<Rational, AsympError> {
    match params.regime() {
        Regime::Super => Ok(Rational::from_integer(0.into())),
        Regime::Boundary => {
            let r2 = params.r() * params.r();
            Ok(-(r2 / (Rational::from_integer(BigInt::from(8)) * params.m())))
        }
        Regime::FullOnly => Err(AsympError::FullFormulaRequired {
            regime: Regime::FullOnly,
        }),
    }
}

/// The b/d ≥ 2 estimate in terms of W = W(n/m) alone:
/// ln est = ln c + n(ln b + ln n − ln W) + r·(n/(mW))^(d/b) + n/W − n + s
///          − ½·ln(W+1).
pub fn asymp_simplified(
    params: &EgfParams,
    n: u64,
    ctx: &PrecisionContext,
) -> Result<AsympEstimate, AsympError> {
    let log_c = correction_constant(params)?;
    let bits = ctx.bits();
    let p = lift(params, bits);
    let one = Real::one(bits);
    let half = Real::from_u64(2, bits).recip();
    let nf = Real::from_u64(n, bits);

    let x = Rational::from_integer(n.into()) / params.m();
    let w = lambert_w0(&Real::from_rational(&x, bits), ctx).map_err(SaddleError::from)?;

    let q = Rational::new(
        params.d().numer() * params.b().denom(),
        params.d().denom() * params.b().numer(),
    );
    let qf = Real::from_rational(&q, bits);
    // (n/(m·W))^{d/b} on a positive base
    let base = &nf / (&p.m * &w);
    let middle = &p.r * (qf * base.ln()).exp();

    let log_value = Real::from_rational(&log_c, bits)
        + &nf * (p.b.ln() + nf.ln() - w.ln())
        + middle
        + &nf / &w
        - &nf
        + &p.s
        - half * (&w + &one).ln();
    Ok(AsympEstimate {
        n,
        formula: Formula::Simplified,
        log_value,
        ctx: *ctx,
    })
}

/// Dispatch on the formula selector. `Hayman` solves the saddle to
/// convergence and evaluates there (Stirling factorial, making it the
/// best-saddle analog of `Full`); the returned z is the saddle used, absent
/// for `Simplified` which never forms one.
pub fn estimate_with_z(
    params: &EgfParams,
    n: u64,
    formula: Formula,
    ctx: &PrecisionContext,
) -> Result<(AsympEstimate, Option<Real>), AsympError> {
    match formula {
        Formula::Full => {
            let z = saddle_closed_form(params, n, ctx)?;
            let log_value = full_at(params, n, &z, ctx)?;
            Ok((
                AsympEstimate {
                    n,
                    formula,
                    log_value,
                    ctx: *ctx,
                },
                Some(z),
            ))
        }
        Formula::Simplified => Ok((asymp_simplified(params, n, ctx)?, None)),
        Formula::Hayman => {
            let sp = saddle_solve(params, n, None, ctx, DEFAULT_MAX_ITER)?;
            let est = hayman_estimate(params, n, &sp.z, ctx, FactorialMode::Stirling)?;
            Ok((est, Some(sp.z)))
        }
    }
}

/// [`estimate_with_z`] without the saddle report.
pub fn estimate(
    params: &EgfParams,
    n: u64,
    formula: Formula,
    ctx: &PrecisionContext,
) -> Result<AsympEstimate, AsympError> {
    estimate_with_z(params, n, formula, ctx).map(|(e, _)| e)
}
