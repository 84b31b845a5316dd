//! Coefficients a(n) = n!·[xⁿ] exp(m·e^(bx) + r·e^(dx) + s).
//!
//! Tables are normalized: a(0) = 1 and the scalar prefactor e^(m+r+s) is
//! carried as the exact exponent m+r+s, so Exact mode stays purely rational
//! even when m+r+s ≠ 0. For all the bundled OEIS families m+r+s = 0 and the
//! normalized values are the published integer terms.

use crate::numerics::{PrecisionContext, Real};
use crate::params::{EgfParams, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::io::{self, Write};

/// Hard cap on the number of computed terms (the recurrence is O(N²)).
pub const MAX_TERMS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("requested {requested} terms exceeds the table capacity limit {limit}")]
    CapacityExceeded { requested: usize, limit: usize },
}

/// Arithmetic carrier for one coefficient table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffMode {
    Exact,
    Float { digits: u32 },
}

#[derive(Debug, Clone)]
enum Values {
    Exact(Vec<Rational>),
    Float(Vec<Real>),
}

/// Normalized coefficient table for one parameter set.
#[derive(Debug, Clone)]
pub struct CoeffTable {
    params: EgfParams,
    mode: CoeffMode,
    values: Values,
    normalized: bool,
}

/// Minimal scalar interface the recurrence runs over; instantiated with
/// exact rationals (integers when the weights allow) and with big-floats.
trait Scalar: Clone + Send + Sync {
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
}

impl Scalar for Rational {
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

impl Scalar for BigInt {
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

impl Scalar for Real {
    fn add(&self, rhs: &Self) -> Self {
        Real::add(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Real::mul(self, rhs)
    }
}

/// Recurrence weights w(k) = m·b^(k+1) + r·d^(k+1) for k = 0..count-1.
fn weights(params: &EgfParams, count: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(count);
    let mut bp = params.b().clone();
    let mut dp = params.d().clone();
    for _ in 0..count {
        out.push(params.m() * &bp + params.r() * &dp);
        bp = &bp * params.b();
        dp = &dp * params.d();
    }
    out
}

/// Inner sums longer than this are split into fixed blocks; blocks (not the
/// job count) define the partial-sum association, so results are identical
/// for every `jobs` value.
const PAR_BLOCK: usize = 512;

fn blocked_inner_sum<T: Scalar>(pascal: &[T], w: &[T], values: &[T], n: usize, jobs: usize) -> T {
    let blocks = (n + 1).div_ceil(PAR_BLOCK);
    let mut partials: Vec<Option<T>> = vec![None; blocks];
    let fill = |bi: usize| -> T {
        let lo = bi * PAR_BLOCK;
        let hi = ((bi + 1) * PAR_BLOCK - 1).min(n);
        let mut acc = pascal[lo].mul(&w[lo]).mul(&values[n - lo]);
        for k in lo + 1..=hi {
            acc = acc.add(&pascal[k].mul(&w[k]).mul(&values[n - k]));
        }
        acc
    };
    if jobs <= 1 {
        for (bi, slot) in partials.iter_mut().enumerate() {
            *slot = Some(fill(bi));
        }
    } else {
        std::thread::scope(|scope| {
            let lanes = jobs.min(blocks);
            let mut queues: Vec<Vec<(usize, &mut Option<T>)>> =
                (0..lanes).map(|_| Vec::new()).collect();
            for (bi, slot) in partials.iter_mut().enumerate() {
                queues[bi % lanes].push((bi, slot));
            }
            for queue in queues {
                let fill = &fill;
                scope.spawn(move || {
                    for (bi, slot) in queue {
                        *slot = Some(fill(bi));
                    }
                });
            }
        });
    }
    let mut total: Option<T> = None;
    for p in partials {
        let p = p.expect("every block was filled");
        total = Some(match total {
            Some(t) => t.add(&p),
            None => p,
        });
    }
    total.expect("at least one block")
}

/// a(n+1) = Σ_{k=0}^{n} C(n,k)·w(k)·a(n−k), a(0) = 1; the binomial row is
/// updated in place, so the whole run is O(N²) scalar operations.
fn run_recurrence<T: Scalar>(w: &[T], one: T, n_max: usize, jobs: usize) -> Vec<T> {
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(one.clone());
    let mut pascal = vec![one.clone()];
    for n in 0..n_max {
        let acc = if n + 1 >= 2 * PAR_BLOCK {
            blocked_inner_sum(&pascal, w, &values, n, jobs)
        } else {
            let mut acc = w[0].mul(&values[n]);
            for k in 1..=n {
                acc = acc.add(&pascal[k].mul(&w[k]).mul(&values[n - k]));
            }
            acc
        };
        values.push(acc);
        pascal.push(one.clone());
        for k in (1..=n).rev() {
            let s = pascal[k].add(&pascal[k - 1]);
            pascal[k] = s;
        }
    }
    values
}

/// Computes the normalized table a(0..n_max) by the binomial recurrence.
pub fn egf_coefficients(
    params: &EgfParams,
    n_max: usize,
    mode: CoeffMode,
) -> Result<CoeffTable, SeriesError> {
    egf_coefficients_with_jobs(params, n_max, mode, 1)
}

/// [`egf_coefficients`] with the long inner sums fanned out over `jobs`
/// threads. The result is identical for every `jobs` value, floats included.
pub fn egf_coefficients_with_jobs(
    params: &EgfParams,
    n_max: usize,
    mode: CoeffMode,
    jobs: usize,
) -> Result<CoeffTable, SeriesError> {
    if n_max > MAX_TERMS {
        return Err(SeriesError::CapacityExceeded {
            requested: n_max,
            limit: MAX_TERMS,
        });
    }
    let jobs = jobs.max(1);
    let w = weights(params, n_max.max(1));
    let values = match mode {
        // integral weights (every bundled family) admit a pure-integer run,
        // skipping per-operation gcd normalization
        CoeffMode::Exact if w.iter().all(Rational::is_integer) => {
            let wi: Vec<BigInt> = w.iter().map(|q| q.numer().clone()).collect();
            let ints = run_recurrence(&wi, BigInt::one(), n_max, jobs);
            Values::Exact(ints.into_iter().map(Rational::from_integer).collect())
        }
        CoeffMode::Exact => Values::Exact(run_recurrence(&w, Rational::one(), n_max, jobs)),
        CoeffMode::Float { digits } => {
            let bits = PrecisionContext::new(digits).bits();
            let wf: Vec<Real> = w.iter().map(|q| Real::from_rational(q, bits)).collect();
            Values::Float(run_recurrence(&wf, Real::one(bits), n_max, jobs))
        }
    };
    Ok(CoeffTable {
        params: params.clone(),
        mode,
        values,
        normalized: true,
    })
}

/// Independent oracle for small n: exponentiates the truncated inner series
/// u(x) = Σ_{k=1..N} (m·b^k + r·d^k)/k!·xᵏ by exp-of-series composition
/// (Σ uʲ/j!, polynomial powers), sharing no code with the recurrence.
///
/// Panics if `n_max > 24`; the polynomial-power route is O(N³) and meant
/// only as a cross-check.
pub fn taylor_oracle(params: &EgfParams, n_max: usize) -> CoeffTable {
    assert!(n_max <= 24, "taylor_oracle is restricted to n ≤ 24");
    let deg = n_max;
    // u[k] = (m·b^k + r·d^k)/k!, u[0] = 0
    let mut u = vec![Rational::zero(); deg + 1];
    let mut bp = Rational::one();
    let mut dp = Rational::one();
    let mut kfact = BigInt::one();
    for (k, slot) in u.iter_mut().enumerate().take(deg + 1).skip(1) {
        bp = &bp * params.b();
        dp = &dp * params.d();
        kfact *= k as u64;
        *slot = (params.m() * &bp + params.r() * &dp) / Rational::from_integer(kfact.clone());
    }

    let truncated_mul = |a: &[Rational], b: &[Rational]| -> Vec<Rational> {
        let mut out = vec![Rational::zero(); deg + 1];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if i + j > deg {
                    break;
                }
                out[i + j] = &out[i + j] + ai * bj;
            }
        }
        out
    };

    // h = Σ_{j=0..deg} uʲ/j!
    let mut h = vec![Rational::zero(); deg + 1];
    h[0] = Rational::one();
    let mut upow = h.clone();
    let mut jfact = BigInt::one();
    for j in 1..=deg {
        upow = truncated_mul(&upow, &u);
        jfact *= j as u64;
        let inv = Rational::from_integer(jfact.clone());
        for (slot, c) in h.iter_mut().zip(&upow) {
            *slot = &*slot + c / &inv;
        }
    }

    // a(n) = n!·h[n]
    let mut nfact = BigInt::one();
    let values = h
        .into_iter()
        .enumerate()
        .map(|(n, c)| {
            if n > 0 {
                nfact *= n as u64;
            }
            c * Rational::from_integer(nfact.clone())
        })
        .collect();

    CoeffTable {
        params: params.clone(),
        mode: CoeffMode::Exact,
        values: Values::Exact(values),
        normalized: true,
    }
}

impl CoeffTable {
    pub fn params(&self) -> &EgfParams {
        &self.params
    }

    pub fn mode(&self) -> CoeffMode {
        self.mode
    }

    /// Number of stored coefficients (n_max + 1).
    pub fn len(&self) -> usize {
        match &self.values {
            Values::Exact(v) => v.len(),
            Values::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false // a(0) always present
    }

    pub fn n_max(&self) -> usize {
        self.len() - 1
    }

    /// True when values assume a(0) = 1 with the prefactor carried apart.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Exponent of the prefactor e^(m+r+s) relating normalized values to
    /// the actual EGF coefficients.
    pub fn prefactor_exponent(&self) -> Rational {
        self.params.prefactor_exponent()
    }

    pub fn exact_values(&self) -> Option<&[Rational]> {
        match &self.values {
            Values::Exact(v) => Some(v),
            Values::Float(_) => None,
        }
    }

    pub fn float_values(&self) -> Option<&[Real]> {
        match &self.values {
            Values::Float(v) => Some(v),
            Values::Exact(_) => None,
        }
    }

    /// a(n) as a big-float at the given precision, whatever the mode.
    pub fn value_as_real(&self, n: usize, bits: usize) -> Real {
        match &self.values {
            Values::Exact(v) => Real::from_rational(&v[n], bits),
            Values::Float(v) => v[n].with_bits(bits),
        }
    }

    /// a(n) as a display string: exact values print as plain integers or
    /// `p/q`, float values in scientific notation at the table's digits.
    pub fn rendered_value(&self, n: usize) -> String {
        match &self.values {
            Values::Exact(v) => {
                let q = &v[n];
                if q.is_integer() {
                    q.numer().to_string()
                } else {
                    format!("{}/{}", q.numer(), q.denom())
                }
            }
            Values::Float(v) => {
                let digits = match self.mode {
                    CoeffMode::Float { digits } => digits,
                    CoeffMode::Exact => unreachable!(),
                };
                v[n].to_sci(digits as usize)
            }
        }
    }

    /// CSV rows `n,value`; Exact-mode values are plain integers or `p/q`,
    /// never scientific notation.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,value")?;
        for n in 0..self.len() {
            writeln!(out, "{},{}", n, self.rendered_value(n))?;
        }
        Ok(())
    }

    /// JSON-lines rows with string-encoded values.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for n in 0..self.len() {
            let row = serde_json::json!({ "n": n, "value": self.rendered_value(n) });
            writeln!(out, "{row}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::parse_rational;
    use num_traits::Signed;

    fn family(m: &str, b: &str, d: &str, r: &str, s: &str) -> EgfParams {
        EgfParams::from_strs(m, b, d, r, s).unwrap()
    }

    // exp(e^{2x} − e^x): 1, 1, 4, 17, ...
    fn a143405() -> EgfParams {
        family("1", "2", "1", "-1", "0")
    }

    fn exact(params: &EgfParams, n: usize) -> Vec<Rational> {
        egf_coefficients(params, n, CoeffMode::Exact)
            .unwrap()
            .exact_values()
            .unwrap()
            .to_vec()
    }

    fn ints(values: &[Rational]) -> Vec<i64> {
        values
            .iter()
            .map(|q| {
                assert!(q.is_integer(), "non-integer coefficient {q}");
                i64::try_from(q.numer().clone()).unwrap()
            })
            .collect()
    }

    #[test]
    fn hand_expanded_prefixes() {
        assert_eq!(ints(&exact(&a143405(), 3)), vec![1, 1, 4, 17]);
        // exp(e^{2x} + e^x − 2)
        let p = family("1", "2", "1", "1", "-2");
        assert_eq!(ints(&exact(&p, 3)), vec![1, 3, 14, 81]);
        // exp((e^{2x} − 3)/2 + e^x)
        let p = family("1/2", "2", "1", "1", "-3/2");
        assert_eq!(ints(&exact(&p, 4)), vec![1, 2, 7, 31, 164]);
        // exp((e^{3x} − 4)/3 + e^x)
        let p = family("1/3", "3", "1", "1", "-4/3");
        assert_eq!(ints(&exact(&p, 3)), vec![1, 2, 8, 42]);
    }

    #[test]
    fn zero_terms_gives_unit_table() {
        let t = egf_coefficients(&a143405(), 0, CoeffMode::Exact).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t.exact_values().unwrap()[0].is_one());
        assert!(t.is_normalized());
        assert!(t.prefactor_exponent().is_zero());
    }

    #[test]
    fn capacity_limit_is_enforced() {
        let err = egf_coefficients(&a143405(), MAX_TERMS + 1, CoeffMode::Exact).unwrap_err();
        assert_eq!(
            err,
            SeriesError::CapacityExceeded {
                requested: MAX_TERMS + 1,
                limit: MAX_TERMS
            }
        );
    }

    #[test]
    fn integrality_of_half_weight_family() {
        // m=1/2, b=2: weights 2^k + 1 are integers, so all a(n) are integers
        let p = family("1/2", "2", "1", "1", "-3/2");
        for q in exact(&p, 20) {
            assert!(q.is_integer(), "expected integer, got {q}");
        }
    }

    #[test]
    fn oracle_matches_recurrence_exactly() {
        let families = [
            a143405(),
            family("1", "2", "1", "1", "-2"),
            family("1/2", "2", "1", "1", "-3/2"),
            family("1/3", "3", "1", "1", "-4/3"),
            family("2", "5/2", "3/2", "-7", "1/4"),
        ];
        for p in &families {
            let rec = exact(p, 24);
            let orc = taylor_oracle(p, 24);
            assert_eq!(rec, orc.exact_values().unwrap(), "divergence for {p}");
        }
    }

    #[test]
    fn oracle_smallest_cases() {
        let t = taylor_oracle(&a143405(), 0);
        assert_eq!(t.len(), 1);
        assert!(t.exact_values().unwrap()[0].is_one());
        let t = taylor_oracle(&a143405(), 2);
        assert_eq!(ints(t.exact_values().unwrap()), vec![1, 1, 4]);
    }

    #[test]
    fn float_mode_tracks_exact_mode() {
        let p = a143405();
        let n = 500;
        let digits = 50;
        let exact_t = egf_coefficients(&p, n, CoeffMode::Exact).unwrap();
        let float_t = egf_coefficients(&p, n, CoeffMode::Float { digits }).unwrap();
        let bits = PrecisionContext::new(digits).bits();
        // agreement to at least digits − 10 significant decimal digits
        let tol = Real::from_u64(10, bits).powi((digits - 10) as usize).recip();
        for k in (0..=n).step_by(25) {
            let e = exact_t.value_as_real(k, bits);
            let f = float_t.value_as_real(k, bits);
            let rel = ((&e - &f) / &e).abs();
            assert!(
                rel.cmp(&tol).is_le(),
                "float drift at n = {k}: {}",
                rel.to_sci(3)
            );
        }
    }

    #[test]
    fn positive_weights_give_positive_terms() {
        let p = family("3/7", "7/2", "1", "2", "0");
        for q in exact(&p, 60) {
            assert!(q.is_positive());
        }
    }

    #[test]
    fn ratio_grows_monotonically_in_paper_families() {
        for p in [
            a143405(),
            family("1", "2", "1", "1", "-2"),
            family("1/2", "2", "1", "1", "-3/2"),
            family("1/3", "3", "1", "1", "-4/3"),
        ] {
            let v = exact(&p, 200);
            let mut prev: Option<Rational> = None;
            for n in 2..200 {
                let ratio = &v[n + 1] / &v[n];
                if let Some(pr) = prev {
                    assert!(ratio > pr, "ratio not increasing at n = {n} for {p}");
                }
                prev = Some(ratio);
            }
        }
    }

    #[test]
    fn csv_is_plain_decimal_in_exact_mode() {
        let t = egf_coefficients(&a143405(), 3, CoeffMode::Exact).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n,value\n0,1\n1,1\n2,4\n3,17\n");

        // rational (non-integer) values print as p/q, still not scientific
        let p = family("1/7", "2", "1", "1", "0");
        let t = egf_coefficients(&p, 1, CoeffMode::Exact).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = s.lines().skip(1).collect();
        assert_eq!(rows, ["0,1", "1,9/7"]);
    }

    #[test]
    fn jsonl_encodes_values_as_strings() {
        let t = egf_coefficients(&a143405(), 2, CoeffMode::Exact).unwrap();
        let mut buf = Vec::new();
        t.write_jsonl(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let rows: Vec<serde_json::Value> = s
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(rows[2]["n"], 2);
        assert_eq!(rows[2]["value"], "4");
    }

    #[test]
    fn results_are_identical_for_any_job_count() {
        // n crosses the blocked-summation threshold; block structure (not
        // thread count) fixes the association, so floats match bitwise
        let p = a143405();
        let n = 1500;
        let mode = CoeffMode::Float { digits: 40 };
        let one = egf_coefficients_with_jobs(&p, n, mode, 1).unwrap();
        let four = egf_coefficients_with_jobs(&p, n, mode, 4).unwrap();
        let seven = egf_coefficients_with_jobs(&p, n, mode, 7).unwrap();
        let bits = PrecisionContext::new(40).bits();
        for k in (0..=n).step_by(125) {
            let a = one.value_as_real(k, bits);
            assert_eq!(a.cmp(&four.value_as_real(k, bits)), std::cmp::Ordering::Equal);
            assert_eq!(a.cmp(&seven.value_as_real(k, bits)), std::cmp::Ordering::Equal);
        }
    }

    #[test]
    fn integer_fast_path_agrees_with_rational_path() {
        // m=1/2, b=2 has integral weights (fast path); m=1/2, b=3 does not
        // (w(0) = 3/2 + 1). Both must match the independent oracle.
        for p in [family("1/2", "2", "1", "1", "-3/2"), family("1/2", "3", "1", "1", "-2")] {
            let got = exact(&p, 20);
            let want = taylor_oracle(&p, 20);
            assert_eq!(got, want.exact_values().unwrap(), "mismatch for {p}");
        }
    }

    #[test]
    fn weights_match_closed_forms() {
        // A143405: w(k) = 2^{k+1} − 1
        let w = weights(&a143405(), 6);
        for (k, q) in w.iter().enumerate() {
            assert_eq!(*q, parse_rational(&((1i64 << (k + 1)) - 1).to_string()).unwrap());
        }
    }
}
