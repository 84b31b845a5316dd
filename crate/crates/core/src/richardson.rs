//! Ratio-series verification: f(n) = a(n)/est(n) sampled along 1..L and
//! Richardson-extrapolated toward its limit 1.
//!
//! The order-m rule samples f at j·⌊L/m⌋ for j = 1..m with exact rational
//! weights (−1)^(m+j)·j^(m−1)/((j−1)!·(m−j)!); it annihilates 1/n…1/n^(m−1)
//! error terms exactly and its weights sum to 1. The weights grow combinatorially,
//! so the float path accumulates at max(requested, 2m) digits.

use crate::asymptotics::{estimate, AsympError, Formula};
use crate::numerics::{PrecisionContext, Real};
use crate::params::Rational;
use crate::series::{CoeffMode, CoeffTable, SeriesError};
use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RichardsonError {
    #[error("extrapolation order must be at least 1")]
    OrderZero,
    #[error("extrapolation order {order} exceeds the series length {len}")]
    OrderTooLarge { order: usize, len: usize },
    #[error("coefficient table carries {table} digits but the ratio stage needs {needed}")]
    InsufficientCoefficientPrecision { table: u32, needed: u32 },
    #[error(transparent)]
    Asymp(#[from] AsympError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Exact weights of the order-m rule, indexed j = 1..=m.
pub fn richardson_weights(m: usize) -> Vec<Rational> {
    assert!(m >= 1, "order must be at least 1");
    // factorials 0!..(m-1)!
    let mut fact = Vec::with_capacity(m);
    fact.push(BigInt::one());
    for k in 1..m {
        let prev = fact[k - 1].clone();
        fact.push(prev * k);
    }
    (1..=m)
        .map(|j| {
            let numer = BigInt::from(j).pow((m - 1) as u32);
            let sign = if (m + j).is_multiple_of(2) { 1 } else { -1 };
            Rational::new(numer * sign, &fact[j - 1] * &fact[m - j])
        })
        .collect()
}

fn step(len: usize, m: usize) -> Result<usize, RichardsonError> {
    if m == 0 {
        return Err(RichardsonError::OrderZero);
    }
    if m > len {
        return Err(RichardsonError::OrderTooLarge { order: m, len });
    }
    Ok(len / m)
}

/// Order-m extrapolant of `f`, where `f[i]` holds f(i+1). Samples at
/// n = j·⌊len/m⌋ and accumulates at max(ctx digits, 2m) digits.
pub fn richardson_extrapolate(
    f: &[Real],
    m: usize,
    ctx: &PrecisionContext,
) -> Result<Real, RichardsonError> {
    let h = step(f.len(), m)?;
    let wide = PrecisionContext::with_guard(ctx.digits().max(2 * m as u32), ctx.guard());
    let bits = wide.bits();
    let mut acc = Real::zero(bits);
    for (j, w) in richardson_weights(m).into_iter().enumerate() {
        let sample = f[(j + 1) * h - 1].with_bits(bits);
        acc = acc + Real::from_rational(&w, bits) * sample;
    }
    Ok(acc)
}

/// Exact-rational counterpart of [`richardson_extrapolate`]; the rule is
/// linear with rational weights, so rational inputs stay rational.
pub fn richardson_extrapolate_exact(
    f: &[Rational],
    m: usize,
) -> Result<Rational, RichardsonError> {
    let h = step(f.len(), m)?;
    let mut acc = Rational::zero();
    for (j, w) in richardson_weights(m).into_iter().enumerate() {
        acc += w * &f[(j + 1) * h - 1];
    }
    Ok(acc)
}

/// f(n) = a(n)/est(n) for n = 1..=L, with the normalization prefactor
/// e^(m+r+s) folded back in so the numerator is the true coefficient.
#[derive(Debug, Clone)]
pub struct RatioSeries {
    pub formula: Formula,
    /// entries[i] = f(i+1); length L.
    pub entries: Vec<Real>,
    pub ctx: PrecisionContext,
}

impl RatioSeries {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// f at a 1-based index.
    pub fn at(&self, n: usize) -> &Real {
        &self.entries[n - 1]
    }
}

/// Build the ratio series from a coefficient table, fanning the estimator
/// evaluations out over `jobs` threads. The table must carry at least the
/// requested precision when in float mode.
pub fn ratio_series(
    table: &CoeffTable,
    formula: Formula,
    ctx: &PrecisionContext,
    jobs: usize,
) -> Result<RatioSeries, RichardsonError> {
    if let CoeffMode::Float { digits } = table.mode() {
        if digits < ctx.digits() {
            return Err(RichardsonError::InsufficientCoefficientPrecision {
                table: digits,
                needed: ctx.digits(),
            });
        }
    }
    let len = table.n_max();
    let bits = ctx.bits();
    let params = table.params();
    let prefactor = Real::from_rational(&table.prefactor_exponent(), bits);

    let jobs = jobs.clamp(1, len.max(1));
    let chunk = len.div_ceil(jobs);
    let mut results: Vec<Result<Vec<Real>, RichardsonError>> = Vec::new();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for t in 0..jobs {
            let lo = t * chunk + 1;
            let hi = ((t + 1) * chunk).min(len);
            if lo > hi {
                break;
            }
            let prefactor = &prefactor;
            handles.push(scope.spawn(move || {
                let mut out = Vec::with_capacity(hi - lo + 1);
                for n in lo..=hi {
                    let est = estimate(params, n as u64, formula, ctx)?;
                    let log_a = prefactor + table.value_as_real(n, bits).ln();
                    out.push((log_a - est.log_value).exp());
                }
                Ok(out)
            }));
        }
        for h in handles {
            results.push(h.join().expect("ratio worker panicked"));
        }
    });

    let mut entries = Vec::with_capacity(len);
    for r in results {
        entries.extend(r?);
    }
    Ok(RatioSeries {
        formula,
        entries,
        ctx: *ctx,
    })
}

/// Extrapolants of one ratio series at several orders.
#[derive(Debug, Clone)]
pub struct ExtrapolationReport {
    pub orders: Vec<usize>,
    pub extrapolants: Vec<Real>,
    pub ctx: PrecisionContext,
}

pub fn extrapolation_table(
    series: &RatioSeries,
    orders: &[usize],
    ctx: &PrecisionContext,
) -> Result<ExtrapolationReport, RichardsonError> {
    let mut extrapolants = Vec::with_capacity(orders.len());
    for &m in orders {
        extrapolants.push(richardson_extrapolate(&series.entries, m, ctx)?);
    }
    Ok(ExtrapolationReport {
        orders: orders.to_vec(),
        extrapolants,
        ctx: *ctx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::EgfParams;
    use crate::series::egf_coefficients;

    fn fam(m: &str, b: &str, d: &str, r: &str, s: &str) -> EgfParams {
        EgfParams::from_strs(m, b, d, r, s).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn weights_sum_to_one() {
        for m in (1..=12).chain([50, 120, 200]) {
            let total: Rational = richardson_weights(m).into_iter().sum();
            assert!(total.is_one(), "weight sum ≠ 1 at order {m}");
        }
    }

    #[test]
    fn low_order_weights_match_hand_values() {
        assert_eq!(richardson_weights(1), vec![q(1, 1)]);
        assert_eq!(richardson_weights(2), vec![q(-1, 1), q(2, 1)]);
        // m = 3: j²/((j−1)!(3−j)!)·(−1)^(3+j) → 1/2, −4, 9/2
        assert_eq!(richardson_weights(3), vec![q(1, 2), q(-4, 1), q(9, 2)]);
    }

    #[test]
    fn order_one_and_two_reduce_to_endpoint_rules() {
        let f: Vec<Rational> = (1..=10).map(|n| q(n * n, 1)).collect();
        // m = 1: f(10)
        assert_eq!(richardson_extrapolate_exact(&f, 1).unwrap(), q(100, 1));
        // m = 2, h = 5: 2·f(10) − f(5)
        assert_eq!(richardson_extrapolate_exact(&f, 2).unwrap(), q(175, 1));
    }

    #[test]
    fn annihilates_inverse_powers_exactly() {
        // f(n) = 7 + 3/n − 5/n²: order 3 must return exactly 7
        let f: Vec<Rational> = (1..=300)
            .map(|n| q(7, 1) + q(3, n) - q(5, n * n))
            .collect();
        assert_eq!(richardson_extrapolate_exact(&f, 3).unwrap(), q(7, 1));
        // order 5 kills through 1/n⁴
        let f: Vec<Rational> = (1..=300)
            .map(|n| q(7, 1) + q(3, n) - q(5, n * n) + q(11, n * n * n) - q(2, n * n * n * n))
            .collect();
        assert_eq!(richardson_extrapolate_exact(&f, 5).unwrap(), q(7, 1));
        // ...but not 1/n⁵
        let f: Vec<Rational> = (1..=300).map(|n: i64| q(7, 1) + q(3, n.pow(5))).collect();
        assert_ne!(richardson_extrapolate_exact(&f, 5).unwrap(), q(7, 1));
    }

    #[test]
    fn float_path_matches_exact_path() {
        let ctx = PrecisionContext::new(60);
        // inputs at the widened accumulation precision for the top order
        let bits = PrecisionContext::new(2 * 40).bits();
        let exact: Vec<Rational> = (1..=400).map(|n| q(7, 1) + q(3, n) - q(5, n * n)).collect();
        let float: Vec<Real> = exact.iter().map(|v| Real::from_rational(v, bits)).collect();
        for m in [1usize, 2, 3, 8, 40] {
            let e = richardson_extrapolate_exact(&exact, m).unwrap();
            let f = richardson_extrapolate(&float, m, &ctx).unwrap();
            let diff = (f - Real::from_rational(&e, bits)).abs();
            assert!(
                diff < Real::from_f64(1e-45, bits),
                "paths diverge at order {m}: {diff}"
            );
        }
    }

    #[test]
    fn order_bounds_are_enforced() {
        let f = vec![Real::one(64); 10];
        assert!(matches!(
            richardson_extrapolate(&f, 0, &PrecisionContext::new(32)),
            Err(RichardsonError::OrderZero)
        ));
        assert!(matches!(
            richardson_extrapolate(&f, 11, &PrecisionContext::new(32)),
            Err(RichardsonError::OrderTooLarge { order: 11, len: 10 })
        ));
    }

    #[test]
    fn ratio_series_matches_single_evaluations() {
        let ctx = PrecisionContext::new(48);
        let bits = ctx.bits();
        let p = fam("1", "2", "1", "-1", "0");
        let table = egf_coefficients(&p, 60, CoeffMode::Exact).unwrap();
        let series = ratio_series(&table, Formula::Full, &ctx, 1).unwrap();
        assert_eq!(series.len(), 60);
        for n in [1usize, 7, 60] {
            let est = estimate(&p, n as u64, Formula::Full, &ctx).unwrap();
            let direct = (table.value_as_real(n, bits).ln() - est.log_value).exp();
            assert_eq!(series.at(n).cmp(&direct), std::cmp::Ordering::Equal);
        }
    }

    #[test]
    fn ratio_series_is_jobs_invariant() {
        let ctx = PrecisionContext::new(40);
        let p = fam("1/3", "3", "1", "1", "-4/3");
        let table = egf_coefficients(&p, 50, CoeffMode::Exact).unwrap();
        let one = ratio_series(&table, Formula::Simplified, &ctx, 1).unwrap();
        let four = ratio_series(&table, Formula::Simplified, &ctx, 4).unwrap();
        let many = ratio_series(&table, Formula::Simplified, &ctx, 64).unwrap();
        for n in 1..=50 {
            assert_eq!(one.at(n).cmp(four.at(n)), std::cmp::Ordering::Equal);
            assert_eq!(one.at(n).cmp(many.at(n)), std::cmp::Ordering::Equal);
        }
    }

    #[test]
    fn ratio_series_folds_the_prefactor_back_in() {
        // s ≠ −(m+r): normalized coefficients are scaled by e^(m+r+s)
        let ctx = PrecisionContext::new(40);
        let bits = ctx.bits();
        let p = fam("1", "2", "1", "-1", "3");
        assert_eq!(p.prefactor_exponent(), q(3, 1));
        let table = egf_coefficients(&p, 10, CoeffMode::Exact).unwrap();
        let series = ratio_series(&table, Formula::Full, &ctx, 1).unwrap();

        let zero_s = fam("1", "2", "1", "-1", "0");
        let table0 = egf_coefficients(&zero_s, 10, CoeffMode::Exact).unwrap();
        let series0 = ratio_series(&table0, Formula::Full, &ctx, 1).unwrap();
        // e^s cancels between numerator and estimate: identical ratios
        for n in 1..=10 {
            let diff = ((series.at(n) - series0.at(n)) / series0.at(n)).abs();
            assert!(diff < Real::from_f64(1e-38, bits), "prefactor mishandled at {n}");
        }
    }

    #[test]
    fn insufficient_float_precision_is_rejected() {
        let p = fam("1", "2", "1", "-1", "0");
        let table = egf_coefficients(&p, 30, CoeffMode::Float { digits: 30 }).unwrap();
        let err = ratio_series(&table, Formula::Full, &PrecisionContext::new(50), 1).unwrap_err();
        assert!(matches!(
            err,
            RichardsonError::InsufficientCoefficientPrecision { table: 30, needed: 50 }
        ));
    }

    // Cancellation guard: order-50 weights span ~20 orders of magnitude
    // with alternating signs. Accumulating 20-digit inputs at the default
    // max(p, 2m) digits must agree with a 4m-digit accumulation to
    // 10^(-p/2).
    #[test]
    fn widened_accumulation_is_already_converged_at_order_50() {
        let p_digits = 20u32;
        let bits = PrecisionContext::new(p_digits).bits();
        let f: Vec<Real> = (1..=200u64)
            .map(|n| Real::from_u64(n, bits).recip().exp())
            .collect();
        let narrow = richardson_extrapolate(&f, 50, &PrecisionContext::new(p_digits)).unwrap();
        let wide = richardson_extrapolate(&f, 50, &PrecisionContext::new(200)).unwrap();
        let gap = (&narrow - &wide).abs();
        let tol = Real::from_u64(10, bits).powi((p_digits / 2) as usize).recip();
        assert!(
            gap.cmp(&tol).is_le(),
            "accumulation widths disagree by {}",
            gap.to_sci(5)
        );
    }

    #[test]
    fn mini_extrapolation_lands_near_one() {
        let ctx = PrecisionContext::new(48);
        let bits = ctx.bits();
        let p = fam("1", "2", "1", "-1", "0");
        let table = egf_coefficients(&p, 300, CoeffMode::Exact).unwrap();
        let series = ratio_series(&table, Formula::Simplified, &ctx, 4).unwrap();
        let report = extrapolation_table(&series, &[4, 8, 16], &ctx).unwrap();
        assert_eq!(report.orders, vec![4, 8, 16]);
        for (m, ext) in report.orders.iter().zip(&report.extrapolants) {
            assert!(
                ext > &Real::from_f64(0.9, bits) && ext < &Real::from_f64(1.2, bits),
                "order {m} extrapolant {ext} far from 1"
            );
        }
    }
}
