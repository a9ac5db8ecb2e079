use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default exponent-span budget for guarded additions, in bits.
pub const DEFAULT_SPAN_GUARD_BITS: u64 = 1 << 20;

static SPAN_GUARD_BITS: AtomicU64 = AtomicU64::new(DEFAULT_SPAN_GUARD_BITS);

/// Current exponent-span guard used by [`dy_add`] and friends.
pub fn span_guard_bits() -> u64 {
    SPAN_GUARD_BITS.load(AtomicOrdering::Relaxed)
}

/// Replace the process-wide exponent-span guard. Returns the previous value.
pub fn set_span_guard_bits(bits: u64) -> u64 {
    SPAN_GUARD_BITS.swap(bits, AtomicOrdering::Relaxed)
}

/// Fails with `GuardExceeded` if two exponents are further apart than the guard.
pub fn check_span(e1: i64, e2: i64) -> Result<()> {
    let span = e1.abs_diff(e2);
    let guard = span_guard_bits();
    if span > guard {
        Err(Error::GuardExceeded { span, guard })
    } else {
        Ok(())
    }
}

/// An exact dyadic rational `mantissa * 2^exponent`.
///
/// Always kept canonical: the mantissa is odd, or the value is zero and
/// stored as `0 * 2^0`. Two equal values therefore have identical fields.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        if mantissa.is_zero() {
            return Self::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        let exponent = exponent
            .checked_add(tz as i64)
            .expect("dyadic exponent overflow");
        Dyadic {
            mantissa: mantissa >> tz,
            exponent,
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int<T: Into<BigInt>>(v: T) -> Self {
        Self::new(v.into(), 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic {
            mantissa: BigInt::one(),
            exponent: e,
        }
    }

    /// `numerator * 2^-shift`, handy for literals such as 75/128.
    pub fn ratio_pow2<T: Into<BigInt>>(numerator: T, shift: i64) -> Self {
        Self::new(numerator.into(), -shift)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// Multiply by `2^e`.
    pub fn mul_pow2(&self, e: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Dyadic {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent.checked_add(e).expect("dyadic exponent overflow"),
        }
    }

    pub fn is_integer(&self) -> bool {
        self.exponent >= 0 || self.is_zero()
    }

    /// The value as a big integer, if it is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        if self.is_integer() {
            Some(&self.mantissa << self.exponent as usize)
        } else {
            None
        }
    }

    /// If the value is `2^e` for some `e`, returns `e`.
    pub fn log2_exact(&self) -> Option<i64> {
        if self.mantissa.is_one() {
            Some(self.exponent)
        } else {
            None
        }
    }

    /// Smallest `e` with `|self| <= 2^e`; `None` for zero.
    pub fn ceil_log2(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let bits = self.mantissa.magnitude().bits() as i64;
        let pow = if self.mantissa.magnitude().is_one() {
            0
        } else {
            bits
        };
        Some(self.exponent + pow)
    }

    pub fn floor(&self) -> BigInt {
        if self.exponent >= 0 {
            &self.mantissa << self.exponent as usize
        } else {
            // Arithmetic shift right rounds toward negative infinity.
            &self.mantissa >> (-self.exponent) as usize
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// Both mantissas scaled to the smaller exponent.
    fn aligned(&self, other: &Self) -> (BigInt, BigInt, i64) {
        if self.is_zero() {
            return (BigInt::zero(), other.mantissa.clone(), other.exponent);
        }
        if other.is_zero() {
            return (self.mantissa.clone(), BigInt::zero(), self.exponent);
        }
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as usize;
        let b = &other.mantissa << (other.exponent - e) as usize;
        (a, b, e)
    }

    /// Rendering in positional decimal, offered only for exponents `>= -64`.
    pub fn to_decimal(&self) -> Option<String> {
        if self.exponent >= 0 {
            return Some(self.floor().to_string());
        }
        if self.exponent < -64 {
            return None;
        }
        let digits = (-self.exponent) as u32;
        let scaled = &self.mantissa * BigInt::from(5u32).pow(digits);
        let negative = scaled.is_negative();
        let s = scaled.magnitude().to_string();
        let s = if s.len() <= digits as usize {
            format!("{}{}", "0".repeat(digits as usize - s.len() + 1), s)
        } else {
            s
        };
        let (int_part, frac_part) = s.split_at(s.len() - digits as usize);
        let frac_part = frac_part.trim_end_matches('0');
        let sign = if negative { "-" } else { "" };
        if frac_part.is_empty() {
            Some(format!("{sign}{int_part}"))
        } else {
            Some(format!("{sign}{int_part}.{frac_part}"))
        }
    }

    /// Lossy conversion for diagnostics only.
    pub fn to_f64_lossy(&self) -> f64 {
        let bits = self.mantissa.bits() as i64;
        let keep = bits.min(60);
        let m = (&self.mantissa >> (bits - keep) as usize).to_f64().unwrap_or(0.0);
        m * 2f64.powi((self.exponent + bits - keep).clamp(-2000, 2000) as i32)
    }
}

/// Guarded addition: fails instead of materialising a mantissa wider than
/// the configured exponent-span budget.
pub fn dy_add(a: &Dyadic, b: &Dyadic) -> Result<Dyadic> {
    if !a.is_zero() && !b.is_zero() {
        check_span(a.exponent, b.exponent)?;
    }
    Ok(a + b)
}

pub fn dy_sub(a: &Dyadic, b: &Dyadic) -> Result<Dyadic> {
    dy_add(a, &-b)
}

pub fn dy_mul(a: &Dyadic, b: &Dyadic) -> Dyadic {
    a * b
}

/// Exact quotient `a / b`; `NotExact` when the quotient is not dyadic.
pub fn dy_div_exact(a: &Dyadic, b: &Dyadic) -> Result<Dyadic> {
    if b.is_zero() {
        return Err(Error::InvalidArgument("division by zero".into()));
    }
    if a.is_zero() {
        return Ok(Dyadic::zero());
    }
    let (q, r) = a.mantissa.div_rem(&b.mantissa);
    if !r.is_zero() {
        return Err(Error::NotExact(format!("{a} / {b}")));
    }
    Ok(Dyadic::new(q, a.exponent - b.exponent))
}

/// `(q, r)` with `a = q*b + r` and `0 <= r < b`. Requires `b > 0`.
pub fn dy_floor_ratio(a: &Dyadic, b: &Dyadic) -> (BigInt, Dyadic) {
    assert!(b.is_positive(), "dy_floor_ratio requires a positive divisor");
    let (am, bm, _) = a.aligned(b);
    let q = am.div_floor(&bm);
    let r = a - &(b * &q);
    (q, r)
}

/// `ceil(a / b)` for `b > 0`.
pub fn dy_ceil_ratio(a: &Dyadic, b: &Dyadic) -> BigInt {
    let (q, r) = dy_floor_ratio(a, b);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_int(v)
    }
}

impl From<BigInt> for Dyadic {
    fn from(v: BigInt) -> Self {
        Dyadic::new(v, 0)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (s1, s2) = (self.mantissa.sign(), other.mantissa.sign());
        let rank = |s: Sign| match s {
            Sign::Minus => 0,
            Sign::NoSign => 1,
            Sign::Plus => 2,
        };
        match rank(s1).cmp(&rank(s2)) {
            Ordering::Equal => {}
            ord => return ord,
        }
        if s1 == Sign::NoSign {
            return Ordering::Equal;
        }
        // Same sign: compare magnitudes by their leading bit first.
        let top1 = self.mantissa.bits() as i64 + self.exponent;
        let top2 = other.mantissa.bits() as i64 + other.exponent;
        let mag = match top1.cmp(&top2) {
            Ordering::Equal => {
                let (a, b, _) = self.aligned(other);
                a.abs().cmp(&b.abs())
            }
            ord => ord,
        };
        if s1 == Sign::Minus {
            mag.reverse()
        } else {
            mag
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &'a Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a + b, e)
    }
}

impl<'a> Sub<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &'a Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &'a Dyadic) -> Dyadic {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mantissa: &self.mantissa * &rhs.mantissa,
            exponent: self
                .exponent
                .checked_add(rhs.exponent)
                .expect("dyadic exponent overflow"),
        }
    }
}

impl<'a> Mul<&'a BigInt> for &'a Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &'a BigInt) -> Dyadic {
        Dyadic::new(&self.mantissa * rhs, self.exponent)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: &'a Dyadic) -> Dyadic {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Dyadic> for &'a Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&Dyadic> for Dyadic {
    fn add_assign(&mut self, rhs: &Dyadic) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Dyadic> for Dyadic {
    fn sub_assign(&mut self, rhs: &Dyadic) {
        *self = &*self - rhs;
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Self {
        iter.fold(Dyadic::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_decimal() {
            Some(d) if d.len() <= 40 => write!(f, "{self} (={d})"),
            _ => write!(f, "{self}"),
        }
    }
}

fn parse_bigint(s: &str) -> Result<BigInt> {
    s.trim()
        .parse::<BigInt>()
        .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Accepts `m*2^e`, `2^e`, integers, finite decimals that denote dyadics
    /// (`15.5`), and fractions with a power-of-two denominator (`3/4`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((m, e)) = s.split_once("*2^") {
            let e = e.trim().trim_start_matches('(').trim_end_matches(')');
            let e: i64 = e
                .parse()
                .map_err(|err| Error::Parse(format!("exponent in {s:?}: {err}")))?;
            return Ok(Dyadic::new(parse_bigint(m)?, e));
        }
        if s.starts_with("2^") {
            return format!("1*{s}").parse();
        }
        if let Some((p, q)) = s.split_once('/') {
            let num: Dyadic = p.parse()?;
            let den = parse_bigint(q)?;
            if !den.is_positive() {
                return Err(Error::Parse(format!("non-positive denominator in {s:?}")));
            }
            let den = Dyadic::from(den);
            return dy_div_exact(&num, &den).map_err(|_| {
                Error::Parse(format!("{s:?} is not a dyadic rational"))
            });
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let negative = int_part.trim_start().starts_with('-');
            let digits = frac_part.len() as u32;
            if digits == 0 || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Parse(format!("bad decimal {s:?}")));
            }
            let int_str = int_part.trim().trim_start_matches(['-', '+']);
            let int_abs = if int_str.is_empty() {
                BigInt::zero()
            } else {
                parse_bigint(int_str)?
            };
            let frac = parse_bigint(frac_part)?;
            let mut n = int_abs * BigInt::from(10u32).pow(digits) + frac;
            if negative {
                n = -n;
            }
            let five = BigInt::from(5u32).pow(digits);
            let (q, r) = n.div_rem(&five);
            if !r.is_zero() {
                return Err(Error::Parse(format!("{s:?} is not a dyadic rational")));
            }
            return Ok(Dyadic::new(q, -(digits as i64)));
        }
        Ok(Dyadic::from(parse_bigint(s)?))
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(Dyadic::ratio_pow2(3, 3) + Dyadic::ratio_pow2(1, 3), Dyadic::pow2(-1));
        let x = d("1995*2^-7");
        assert_eq!(&x + &Dyadic::zero(), x);
        // 15 + 160*(2^-8 - 2^-12) by repeated addition.
        let gap = Dyadic::pow2(-8) - Dyadic::pow2(-12);
        let mut acc = Dyadic::from_int(15);
        for _ in 0..160 {
            acc = dy_add(&acc, &gap).unwrap();
        }
        assert_eq!(acc, d("1995*2^-7"));
        assert_eq!(acc, Dyadic::from_int(15) + Dyadic::ratio_pow2(75, 7));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(dy_mul(&Dyadic::pow2(-4), &Dyadic::pow2(-4)), Dyadic::pow2(-8));
        let a = d("13*2^-9");
        assert_eq!(dy_mul(&a, &Dyadic::one()), a);
        assert_eq!(
            dy_mul(&Dyadic::from_int(7), &Dyadic::pow2(-4)),
            d("7*2^-4")
        );
    }

    #[test]
    fn div_exact_examples() {
        let num = d("31.5") - d("1995*2^-7");
        assert_eq!(dy_div_exact(&num, &Dyadic::pow2(-9)).unwrap(), Dyadic::from_int(8148));
        // Independent count of 2^-9 steps from 15+75/128 up to 31.5.
        let mut steps = 0;
        let mut cur = d("1995*2^-7");
        while cur < d("31.5") {
            cur += &Dyadic::pow2(-9);
            steps += 1;
        }
        assert_eq!(cur, d("31.5"));
        assert_eq!(steps, 8148);
        assert_eq!(dy_div_exact(&Dyadic::zero(), &d("3")).unwrap(), Dyadic::zero());
        assert!(matches!(
            dy_div_exact(&Dyadic::one(), &Dyadic::from_int(3)),
            Err(Error::NotExact(_))
        ));
    }

    #[test]
    fn floor_ratio_examples() {
        let (q, r) = dy_floor_ratio(&Dyadic::ratio_pow2(11, 12), &Dyadic::pow2(-12));
        assert_eq!((q, r), (BigInt::from(11), Dyadic::zero()));
        let (q, r) = dy_floor_ratio(&d("0.375"), &d("0.5"));
        assert_eq!((q, r), (BigInt::zero(), d("0.375")));
        let (q, r) = dy_floor_ratio(&d("7/8"), &d("1/4"));
        assert_eq!((q, r), (BigInt::from(3), d("1/8")));
        let (q, r) = dy_floor_ratio(&d("-7/8"), &d("1/4"));
        assert_eq!((q, r), (BigInt::from(-4), d("1/8")));
    }

    #[test]
    fn guard_rejects_wide_spans() {
        let huge = Dyadic::pow2(10);
        let tiny = Dyadic::pow2(-(DEFAULT_SPAN_GUARD_BITS as i64) - 10);
        assert!(matches!(dy_add(&huge, &tiny), Err(Error::GuardExceeded { .. })));
        assert!(dy_add(&huge, &Dyadic::zero()).is_ok());
    }

    #[test]
    fn canonical_form_and_parsing() {
        let x = Dyadic::new(BigInt::from(12), -5);
        assert_eq!(x.mantissa(), &BigInt::from(3));
        assert_eq!(x.exponent(), -3);
        assert_eq!(x.to_string(), "3*2^-3");
        assert_eq!(Dyadic::new(BigInt::zero(), 17).to_string(), "0*2^0");
        assert_eq!(d("0.375"), x);
        assert_eq!(d("3/8"), x);
        assert_eq!(d("3*2^(-3)"), x);
        assert_eq!(d("-2.5"), Dyadic::ratio_pow2(-5, 1));
        assert!("0.1".parse::<Dyadic>().is_err());
        assert!("1/3".parse::<Dyadic>().is_err());
        assert_eq!(d("1995*2^-7").to_decimal().unwrap(), "15.5859375");
        assert_eq!(Dyadic::pow2(-65).to_decimal(), None);
        assert_eq!(d("-0.5").to_decimal().unwrap(), "-0.5");
    }

    #[test]
    fn ordering_across_exponents() {
        assert!(d("1995*2^-7") > d("15.5625"));
        assert!(d("-1") < d("-0.5"));
        assert!(Dyadic::pow2(-300) > Dyadic::zero());
        assert!(Dyadic::pow2(-300) < Dyadic::pow2(-299));
        assert_eq!(d("4").cmp(&Dyadic::pow2(2)), Ordering::Equal);
    }

    #[test]
    fn floor_ceil_log2() {
        assert_eq!(d("-7/8").floor(), BigInt::from(-1));
        assert_eq!(d("-7/8").ceil(), BigInt::zero());
        assert_eq!(d("5").ceil_log2(), Some(3));
        assert_eq!(d("4").ceil_log2(), Some(2));
        assert_eq!(d("3/8").ceil_log2(), Some(-1));
    }
}
