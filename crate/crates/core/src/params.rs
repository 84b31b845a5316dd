//! Parameter domain for the generating function family
//! `exp(m*e^(b*x) + r*e^(d*x) + s)`.
//!
//! All five parameters are exact rationals. The validity constraints
//! (`m > 0`, `b > d >= 1`, `r != 0`) and the `b/d` regime classification
//! are decided with exact rational comparisons so that the boundary case
//! `b = 2d` is never misclassified by rounding.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;

/// Exact rational scalar used for parameters, weights and constants.
pub type Rational = BigRational;

/// Errors from parameter validation and rational parsing.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamError {
    #[error("m must be positive, got {0}")]
    NonPositiveM(String),
    #[error("parameters must satisfy b > d >= 1, got b = {b}, d = {d}")]
    OrderViolation { b: String, d: String },
    #[error("r must be nonzero")]
    ZeroR,
    #[error("cannot parse {0:?} as a rational (expected \"p/q\", an integer, or a finite decimal)")]
    ParseRational(String),
}

/// Parses a rational literal: `"p/q"`, an integer string, or a finite
/// decimal string (`"-1.5"` becomes -3/2).
pub fn parse_rational(s: &str) -> Result<Rational, ParamError> {
    let t = s.trim();
    let err = || ParamError::ParseRational(s.to_string());
    if t.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = t.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.strip_prefix(['-', '+']).unwrap_or(int_part);
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) || int_digits.is_empty() {
            return Err(err());
        }
        let scale = BigUint::from(10u32).pow(frac_part.len() as u32);
        let numer = BigUint::from_str(int_digits).map_err(|_| err())? * &scale
            + BigUint::from_str(frac_part).map_err(|_| err())?;
        let mut numer = BigInt::from(numer);
        if negative {
            numer = -numer;
        }
        return Ok(Rational::new(numer, BigInt::from(scale)));
    }
    let n = BigInt::from_str(t).map_err(|_| err())?;
    Ok(Rational::from_integer(n))
}

/// Which asymptotic formula applies, decided by the exact ratio `b/d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `b/d < 2`: only the full formula is valid.
    FullOnly,
    /// `b/d = 2`: simplified formula with constant `c = e^(-r^2/(8m))`.
    Boundary,
    /// `b/d > 2`: simplified formula with constant `c = 1`.
    Super,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::FullOnly => write!(f, "b/d < 2 (full formula only)"),
            Regime::Boundary => write!(f, "b/d = 2"),
            Regime::Super => write!(f, "b/d > 2"),
        }
    }
}

/// Validated parameters `(m, b, d, r, s)` of the generating function
/// `exp(m*e^(b*x) + r*e^(d*x) + s)`.
///
/// Immutable after construction; construct through [`EgfParams::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgfParams {
    m: Rational,
    b: Rational,
    d: Rational,
    r: Rational,
    s: Rational,
}

impl EgfParams {
    /// Checks `m > 0`, `b > d >= 1`, `r != 0` and returns the validated set.
    pub fn validate(
        m: Rational,
        b: Rational,
        d: Rational,
        r: Rational,
        s: Rational,
    ) -> Result<Self, ParamError> {
        if !m.is_positive() {
            return Err(ParamError::NonPositiveM(m.to_string()));
        }
        if b <= d || d < Rational::one() {
            return Err(ParamError::OrderViolation {
                b: b.to_string(),
                d: d.to_string(),
            });
        }
        if r.is_zero() {
            return Err(ParamError::ZeroR);
        }
        Ok(EgfParams { m, b, d, r, s })
    }

    /// Parses the five parameters from rational literals and validates them.
    pub fn from_strs(m: &str, b: &str, d: &str, r: &str, s: &str) -> Result<Self, ParamError> {
        Self::validate(
            parse_rational(m)?,
            parse_rational(b)?,
            parse_rational(d)?,
            parse_rational(r)?,
            parse_rational(s)?,
        )
    }

    pub fn m(&self) -> &Rational {
        &self.m
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn d(&self) -> &Rational {
        &self.d
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    pub fn s(&self) -> &Rational {
        &self.s
    }

    /// Exact classification of `b/d` against 2.
    pub fn regime(&self) -> Regime {
        let two_d = &self.d * Rational::from_integer(BigInt::from(2));
        match self.b.cmp(&two_d) {
            std::cmp::Ordering::Less => Regime::FullOnly,
            std::cmp::Ordering::Equal => Regime::Boundary,
            std::cmp::Ordering::Greater => Regime::Super,
        }
    }

    /// Exponent of the scalar prefactor `e^(m+r+s)` relating normalized
    /// coefficients (with `a(0) = 1`) to the actual series coefficients.
    pub fn prefactor_exponent(&self) -> Rational {
        &self.m + &self.r + &self.s
    }

    /// True when `b` or `d` is not an integer. The worked examples all use
    /// integer `b`, `d`; other rationals are accepted but reported as
    /// outside the worked examples.
    pub fn outside_worked_examples(&self) -> bool {
        !self.b.is_integer() || !self.d.is_integer()
    }
}

impl fmt::Display for EgfParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "m={} b={} d={} r={} s={}",
            self.m, self.b, self.d, self.r, self.s
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn params(m: &str, b: &str, d: &str, r: &str, s: &str) -> Result<EgfParams, ParamError> {
        EgfParams::from_strs(m, b, d, r, s)
    }

    #[test]
    fn parses_rational_literals() {
        assert_eq!(rat("3"), Rational::from_integer(3.into()));
        assert_eq!(rat("-1/3"), Rational::new((-1).into(), 3.into()));
        assert_eq!(rat("-1.5"), Rational::new((-3).into(), 2.into()));
        assert_eq!(rat("0.25"), Rational::new(1.into(), 4.into()));
        assert_eq!(rat(" 7/2 "), Rational::new(7.into(), 2.into()));
        for bad in ["", "x", "1/0", "1.2.3", "1e5", ".5", "1.", "2/a"] {
            assert!(parse_rational(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn accepts_the_worked_parameter_sets() {
        // exp(e^(2x) - e^x): m=1 b=2 d=1 r=-1 s=0
        let p = params("1", "2", "1", "-1", "0").unwrap();
        assert_eq!(p.regime(), Regime::Boundary);
        assert!(!p.outside_worked_examples());
        // exp((e^(3x) - 4)/3 + e^x): m=1/3 b=3 d=1 r=1 s=-4/3
        let p = params("1/3", "3", "1", "1", "-4/3").unwrap();
        assert_eq!(p.regime(), Regime::Super);
        assert!(p.prefactor_exponent().is_zero());
    }

    #[test]
    fn rejects_constraint_violations() {
        assert_eq!(
            params("1", "1", "1", "1", "0").unwrap_err(),
            ParamError::OrderViolation {
                b: "1".into(),
                d: "1".into()
            }
        );
        assert!(matches!(
            params("0", "2", "1", "1", "0").unwrap_err(),
            ParamError::NonPositiveM(_)
        ));
        assert!(matches!(
            params("-1/2", "2", "1", "1", "0").unwrap_err(),
            ParamError::NonPositiveM(_)
        ));
        assert_eq!(params("1", "2", "1", "0", "0").unwrap_err(), ParamError::ZeroR);
        // d < 1 violates the order hypothesis even with b > d
        assert!(matches!(
            params("1", "2", "1/2", "1", "0").unwrap_err(),
            ParamError::OrderViolation { .. }
        ));
    }

    #[test]
    fn classifies_all_three_regimes() {
        assert_eq!(params("1", "2", "1", "1", "0").unwrap().regime(), Regime::Boundary);
        assert_eq!(params("1", "3", "1", "1", "0").unwrap().regime(), Regime::Super);
        assert_eq!(params("1", "3", "2", "1", "0").unwrap().regime(), Regime::FullOnly);
    }

    #[test]
    fn flags_non_integer_orders() {
        let p = params("1", "5/2", "1", "1", "0").unwrap();
        assert!(p.outside_worked_examples());
        assert_eq!(p.regime(), Regime::Super);
    }

    proptest! {
        // Regime depends only on b/d: scaling both by a positive rational
        // leaves it unchanged (as long as d stays >= 1).
        #[test]
        fn regime_is_scale_invariant(bn in 2i64..60, dn in 1i64..30, kn in 1i64..20, kd in 1i64..20) {
            prop_assume!(bn > dn);
            let k = Rational::new(kn.into(), kd.into());
            let b = Rational::from_integer(bn.into());
            let d = Rational::from_integer(dn.into());
            let one = Rational::one();
            let base = EgfParams::validate(one.clone(), b.clone(), d.clone(), one.clone(), Rational::zero()).unwrap();
            let (sb, sd) = (&b * &k, &d * &k);
            prop_assume!(sd >= one);
            let scaled = EgfParams::validate(one.clone(), sb, sd, one, Rational::zero()).unwrap();
            prop_assert_eq!(base.regime(), scaled.regime());
        }

        // Re-validating already accepted values returns the same params.
        #[test]
        fn validate_is_idempotent(m in 1i64..50, b in 2i64..50, d in 1i64..50, r in -20i64..20, s in -20i64..20) {
            prop_assume!(b > d && r != 0);
            let q = |v: i64| Rational::from_integer(v.into());
            let p1 = EgfParams::validate(q(m), q(b), q(d), q(r), q(s)).unwrap();
            let p2 = EgfParams::validate(
                p1.m().clone(), p1.b().clone(), p1.d().clone(), p1.r().clone(), p1.s().clone(),
            ).unwrap();
            prop_assert_eq!(p1, p2);
        }
    }
}
