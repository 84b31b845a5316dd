//! Stirling's formula and high-precision log-factorials.

use super::{PrecisionContext, Real};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::sync::{Mutex, OnceLock};

/// Largest n for which ln(n!) is taken from the exact integer factorial;
/// beyond this the Stirling series with exact Bernoulli coefficients is used.
const EXACT_LIMIT: u64 = 10_000;

/// `n^n · e^{−n} · √(2πn)` at context precision.
pub fn stirling_factorial(n: u64, ctx: &PrecisionContext) -> Real {
    assert!(n >= 1);
    let bits = ctx.bits();
    let nf = Real::from_u64(n, bits);
    let power = nf.powi(n as usize);
    let expm = Real::from_i64(-(n as i64), bits).exp();
    let tau_n = Real::pi(bits) * Real::from_u64(2 * n, bits);
    power * expm * tau_n.sqrt()
}

/// `ln(n!)` at context precision: exact integer route for `n ≤ 10⁴`,
/// Stirling series beyond.
pub fn log_factorial(n: u64, ctx: &PrecisionContext) -> Real {
    if n <= 1 {
        return Real::zero(ctx.bits());
    }
    if n <= EXACT_LIMIT {
        let bits = ctx.bits();
        Real::from_bigint(&factorial_bigint(n), bits).ln()
    } else {
        log_factorial_series(n, ctx)
    }
}

/// Exact `n!` as a big integer.
#[allow(dead_code)]
pub(crate) fn factorial_bigint(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

static BERNOULLI: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();

/// `B_idx` (convention `B_1 = −1/2`), memoized; the recurrence
/// `B_m = −(Σ_{j<m} C(m+1,j)·B_j)/(m+1)` is exact in rational arithmetic.
fn bernoulli(idx: usize) -> BigRational {
    let cell = BERNOULLI.get_or_init(|| Mutex::new(vec![BigRational::one()]));
    let mut v = cell.lock().expect("bernoulli cache");
    while v.len() <= idx {
        let m = v.len();
        let mut binom = BigInt::one();
        let mut acc = BigRational::zero();
        for (j, bj) in v.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * bj;
            // C(m+1, j+1) from C(m+1, j); the division is exact
            binom = binom * (m + 1 - j) / (j + 1);
        }
        let bm = -acc / BigRational::from_integer(BigInt::from(m + 1));
        v.push(bm);
    }
    v[idx].clone()
}

/// Stirling series `(n+½)ln n − n + ½ln(2π) + Σ B_{2k}/(2k(2k−1)n^{2k−1})`,
/// truncated once terms drop below the working precision. The series is
/// asymptotic: accumulation also stops at the smallest term.
pub(crate) fn log_factorial_series(n: u64, ctx: &PrecisionContext) -> Real {
    let bits = ctx.bits();
    let nf = Real::from_u64(n, bits);
    let ln_n = nf.ln();
    let half = Real::from_u64(2, bits).recip();
    let tau = Real::pi(bits) * Real::from_u64(2, bits);
    let mut sum = (&nf + &half) * &ln_n - &nf + &half * tau.ln();

    let inv_n2 = (&nf * &nf).recip();
    let threshold = &sum * Real::from_u64(10, bits)
        .powi((ctx.digits() + ctx.guard() + 2) as usize)
        .recip();
    let mut scale = nf.recip(); // n^{-(2k-1)}
    let mut last_mag: Option<Real> = None;
    for k in 1..10_000usize {
        let coeff = bernoulli(2 * k)
            / BigRational::from_integer(BigInt::from(2 * k) * BigInt::from(2 * k - 1));
        let term = Real::from_rational(&coeff, bits) * &scale;
        let mag = term.abs();
        if let Some(prev) = &last_mag {
            if mag.cmp(prev).is_ge() {
                break; // asymptotic floor
            }
        }
        sum = &sum + &term;
        if mag.cmp(&threshold.abs()).is_le() {
            break;
        }
        last_mag = Some(mag);
        scale = scale * &inv_n2;
    }
    sum
}
