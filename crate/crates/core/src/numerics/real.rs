//! Arbitrary-precision real numbers.
//!
//! [`Real`] wraps a binary big-float together with the bit precision it was
//! produced at. Binary operations evaluate at the larger of the two operand
//! precisions, so precision decisions stay at value-construction sites.
//! Mathematical constants (pi, e, ln 2, ln 10) are served from a per-thread
//! cache; results are identical across threads at equal precision.

use astro_float::{BigFloat, Consts, Exponent, Radix, RoundingMode, Word, WORD_BIT_SIZE};
use num_bigint::{BigInt, BigUint, Sign as IntSign};
use num_rational::BigRational;
use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache allocation"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Big-float value tagged with the binary precision it carries.
#[derive(Clone)]
pub struct Real {
    x: BigFloat,
    bits: usize,
}

fn biguint_words(u: &BigUint) -> Vec<Word> {
    if WORD_BIT_SIZE == 64 {
        u.iter_u64_digits().map(|d| d as Word).collect()
    } else {
        u.iter_u32_digits().map(|d| d as Word).collect()
    }
}

impl Real {
    fn wrap(x: BigFloat, bits: usize) -> Self {
        debug_assert!(!x.is_nan(), "NaN produced in Real arithmetic");
        debug_assert!(!x.is_inf(), "Inf produced in Real arithmetic");
        Real { x, bits }
    }

    /// Binary precision carried by this value.
    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn zero(bits: usize) -> Self {
        Real {
            x: BigFloat::new(bits),
            bits,
        }
    }

    pub fn one(bits: usize) -> Self {
        Self::from_u64(1, bits)
    }

    pub fn from_u64(v: u64, bits: usize) -> Self {
        Real {
            x: BigFloat::from_u64(v, bits),
            bits,
        }
    }

    pub fn from_i64(v: i64, bits: usize) -> Self {
        Real {
            x: BigFloat::from_i64(v, bits),
            bits,
        }
    }

    pub fn from_f64(v: f64, bits: usize) -> Self {
        Real {
            x: BigFloat::from_f64(v, bits),
            bits,
        }
    }

    /// Exact-to-precision conversion of a big integer: the top `bits` of the
    /// magnitude become the mantissa, the bit length becomes the exponent.
    pub fn from_bigint(v: &BigInt, bits: usize) -> Self {
        let mag = v.magnitude();
        let nbits = mag.bits();
        if nbits == 0 {
            return Self::zero(bits);
        }
        assert!(nbits <= i32::MAX as u64, "integer exceeds exponent range");
        // One extra word so truncation error stays below the target precision.
        let words = bits / WORD_BIT_SIZE + 2;
        let total = (words * WORD_BIT_SIZE) as u64;
        let shifted: BigUint = if total >= nbits {
            mag << (total - nbits) as usize
        } else {
            mag >> (nbits - total) as usize
        };
        let m = biguint_words(&shifted);
        debug_assert_eq!(m.len(), words);
        let sign = match v.sign() {
            IntSign::Minus => astro_float::Sign::Neg,
            _ => astro_float::Sign::Pos,
        };
        Real::wrap(BigFloat::from_words(&m, sign, nbits as Exponent), bits)
    }

    pub fn from_rational(v: &BigRational, bits: usize) -> Self {
        let num = Self::from_bigint(v.numer(), bits + WORD_BIT_SIZE);
        let den = Self::from_bigint(v.denom(), bits + WORD_BIT_SIZE);
        Real::wrap(num.x.div(&den.x, bits, RM), bits)
    }

    pub fn pi(bits: usize) -> Self {
        Real {
            x: with_consts(|cc| cc.pi(bits, RM)),
            bits,
        }
    }

    pub fn euler_e(bits: usize) -> Self {
        Real {
            x: with_consts(|cc| cc.e(bits, RM)),
            bits,
        }
    }

    pub fn ln_2(bits: usize) -> Self {
        Real {
            x: with_consts(|cc| cc.ln_2(bits, RM)),
            bits,
        }
    }

    pub fn ln_10(bits: usize) -> Self {
        Real {
            x: with_consts(|cc| cc.ln_10(bits, RM)),
            bits,
        }
    }

    /// Re-rounds (or exactly extends) to `bits` precision.
    pub fn with_bits(&self, bits: usize) -> Self {
        let mut x = self.x.clone();
        x.set_precision(bits, RM).expect("precision change");
        Real { x, bits }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let p = self.bits.max(rhs.bits);
        Real::wrap(self.x.add(&rhs.x, p, RM), p)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let p = self.bits.max(rhs.bits);
        Real::wrap(self.x.sub(&rhs.x, p, RM), p)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let p = self.bits.max(rhs.bits);
        Real::wrap(self.x.mul(&rhs.x, p, RM), p)
    }

    pub fn div(&self, rhs: &Self) -> Self {
        let p = self.bits.max(rhs.bits);
        Real::wrap(self.x.div(&rhs.x, p, RM), p)
    }

    pub fn neg(&self) -> Self {
        Real {
            x: self.x.neg(),
            bits: self.bits,
        }
    }

    pub fn abs(&self) -> Self {
        Real {
            x: self.x.abs(),
            bits: self.bits,
        }
    }

    pub fn recip(&self) -> Self {
        Real::wrap(self.x.reciprocal(self.bits, RM), self.bits)
    }

    pub fn sqrt(&self) -> Self {
        Real::wrap(self.x.sqrt(self.bits, RM), self.bits)
    }

    /// Natural log; argument must be positive.
    pub fn ln(&self) -> Self {
        Real::wrap(with_consts(|cc| self.x.ln(self.bits, RM, cc)), self.bits)
    }

    pub fn exp(&self) -> Self {
        Real::wrap(with_consts(|cc| self.x.exp(self.bits, RM, cc)), self.bits)
    }

    /// `self^e` for positive `self` (computed via exp of log).
    pub fn pow(&self, e: &Self) -> Self {
        let p = self.bits.max(e.bits);
        Real::wrap(with_consts(|cc| self.x.pow(&e.x, p, RM, cc)), p)
    }

    pub fn powi(&self, n: usize) -> Self {
        Real::wrap(self.x.powi(n, self.bits, RM), self.bits)
    }

    pub fn floor(&self) -> Self {
        Real::wrap(self.x.floor(), self.bits)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.x.is_negative() && !self.x.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.x.is_positive() && !self.x.is_zero()
    }

    /// Total order; arithmetic never produces NaN under the library's
    /// domain guards, so ordering is always defined. Named after
    /// [`Ord::cmp`] deliberately — the trait itself is unimplementable
    /// because the underlying float type admits NaN.
    #[allow(clippy::should_implement_trait)]
    pub fn cmp(&self, rhs: &Self) -> Ordering {
        self.x
            .cmp(&rhs.x)
            .map(|v| v.cmp(&0))
            .expect("NaN in Real comparison")
    }

    /// Closest double; overflows to infinity for huge exponents.
    pub fn to_f64(&self) -> f64 {
        if self.x.is_zero() {
            return 0.0;
        }
        let e = self.x.exponent().expect("finite value");
        let words = self.x.mantissa_digits().expect("finite value");
        let top = words[words.len() - 1];
        let next = if words.len() > 1 { words[words.len() - 2] } else { 0 };
        let scale = (WORD_BIT_SIZE as f64).exp2();
        // value = (fraction in [1/2, 1)) * 2^e
        let frac = (top as f64 + next as f64 / scale) / scale;
        let v = frac * (e as f64).exp2();
        if self.x.is_negative() {
            -v
        } else {
            v
        }
    }

    /// Largest integer ≤ self, as i64; caller guarantees range.
    pub fn floor_i64(&self) -> i64 {
        let f = self.floor().to_f64();
        debug_assert!(f.abs() < 2f64.powi(53), "floor_i64 out of exact range");
        f as i64
    }

    /// Splits into (negative, significant digits, base-10 exponent) with
    /// `sig` digits after rounding: value = ±0.d₁d₂… × 10^exp10.
    pub fn decimal_parts(&self, sig: usize) -> (bool, Vec<u8>, i64) {
        assert!(sig > 0);
        if self.x.is_zero() {
            return (false, vec![0; sig], 0);
        }
        let (sign, mut ds, e10) = with_consts(|cc| self.x.convert_to_radix(Radix::Dec, RoundingMode::None, cc))
            .expect("decimal conversion of finite value");
        let mut e10 = e10 as i64;
        let mut lead = 0usize;
        while lead < ds.len() && ds[lead] == 0 {
            lead += 1;
        }
        ds.drain(..lead);
        e10 -= lead as i64;
        if ds.is_empty() {
            return (false, vec![0; sig], 0);
        }
        let round_up = ds.get(sig).is_some_and(|&d| d >= 5);
        ds.truncate(sig);
        while ds.len() < sig {
            ds.push(0);
        }
        if round_up {
            let mut i = sig;
            loop {
                if i == 0 {
                    // 9.99… rolled over
                    ds.insert(0, 1);
                    ds.truncate(sig);
                    e10 += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        (sign == astro_float::Sign::Neg, ds, e10)
    }

    /// Scientific rendering `d.dd…e±k` with `sig` significant digits.
    pub fn to_sci(&self, sig: usize) -> String {
        let (neg, ds, e10) = self.decimal_parts(sig);
        if self.x.is_zero() {
            return if sig > 1 {
                format!("0.{}e0", "0".repeat(sig - 1))
            } else {
                "0e0".to_string()
            };
        }
        let mut s = String::new();
        if neg {
            s.push('-');
        }
        s.push((b'0' + ds[0]) as char);
        if ds.len() > 1 {
            s.push('.');
            for &d in &ds[1..] {
                s.push((b'0' + d) as char);
            }
        }
        s.push('e');
        s.push_str(&(e10 - 1).to_string());
        s
    }

    /// Decimal digits this precision supports (conservative).
    pub fn sig_digits(&self) -> usize {
        ((self.bits as f64) / std::f64::consts::LOG2_10).floor() as usize
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci(self.sig_digits().clamp(1, 50)))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({}, {} bits)", self.to_sci(20.min(self.sig_digits().max(1))), self.bits)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real::$method(self, rhs)
            }
        }
        impl std::ops::$trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                Real::$method(&self, &rhs)
            }
        }
        impl std::ops::$trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real::$method(&self, rhs)
            }
        }
        impl std::ops::$trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                Real::$method(self, &rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl std::ops::Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::neg(self)
    }
}

impl std::ops::Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::neg(&self)
    }
}
