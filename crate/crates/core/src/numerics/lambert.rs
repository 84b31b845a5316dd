//! Lambert W, principal branch, for nonnegative real arguments.

use super::{NumericError, PrecisionContext, Real};

/// Iteration cap; Halley converges cubically from the seeds below, so even
/// thousands of digits need well under 60 steps.
const MAX_ITER: usize = 60;

/// Solves `w·e^w = x` for `x ≥ 0` to the context's precision.
///
/// Seed: `ln x − ln ln x` for `x ≥ e`, `w = x` below, then Halley steps
/// until the update falls under one unit in the last requested digit.
pub fn lambert_w0(x: &Real, ctx: &PrecisionContext) -> Result<Real, NumericError> {
    lambert_w0_seeded(x, None, ctx)
}

/// [`lambert_w0`] with an optional starting point, letting sweeps over an
/// increasing argument grid reuse the previous root as the seed.
pub fn lambert_w0_seeded(
    x: &Real,
    seed: Option<&Real>,
    ctx: &PrecisionContext,
) -> Result<Real, NumericError> {
    if x.is_negative() {
        return Err(NumericError::NegativeArgument(x.to_string()));
    }
    let bits = ctx.bits();
    if x.is_zero() {
        return Ok(Real::zero(bits));
    }
    let x = x.with_bits(bits);
    let one = Real::one(bits);
    let e = Real::euler_e(bits);

    let mut w = match seed {
        Some(s) if s.is_positive() => s.with_bits(bits),
        _ => {
            if x.cmp(&e).is_ge() {
                // ln x - ln ln x; at x = e this is exactly 1
                let lx = x.ln();
                if lx.cmp(&one).is_gt() {
                    &lx - lx.ln()
                } else {
                    lx
                }
            } else {
                x.clone()
            }
        }
    };

    // |Δw| ≤ tol·|w| with tol one decimal digit under the full working
    // precision; an extra safeguard stops once updates no longer shrink.
    let tol = Real::from_u64(10, bits)
        .powi((ctx.digits() + ctx.guard()) as usize)
        .recip();
    let two = Real::from_u64(2, bits);
    let mut last_delta: Option<Real> = None;

    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = &w * &ew - &x;
        if f.is_zero() {
            return Ok(w);
        }
        let wp1 = &w + &one;
        // Halley: w ← w − f / (e^w(w+1) − (w+2)·f / (2w+2))
        let denom = &ew * &wp1 - (&w + &two) * &f / (&two * &wp1);
        let delta = &f / &denom;
        w = &w - &delta;
        let d = delta.abs();
        let bound = &tol * w.abs();
        if d.cmp(&bound).is_le() {
            return Ok(w);
        }
        if let Some(prev) = &last_delta {
            if d.cmp(prev).is_ge() {
                // rounding floor reached
                return Ok(w);
            }
        }
        last_delta = Some(d);
    }
    Err(NumericError::NoConvergence {
        what: "Lambert W Halley iteration".into(),
        detail: format!(
            "no convergence after {MAX_ITER} iterations (last step {})",
            last_delta.map_or_else(|| "?".into(), |d| d.to_sci(3))
        ),
    })
}
