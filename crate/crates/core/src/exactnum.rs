//! Exact arithmetic in the quadratic field Q(√3).
//!
//! Every vertex coordinate, gradient entry and displacement value of the
//! microstructure is of the form `a + b√3` with `a`, `b` rational, so the
//! whole construction can be checked with exact equality. Rationals are
//! arbitrary precision: `t^(2k)` has coefficients that grow like `14^k`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The exact number `a + b·√3`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QScalar {
    a: BigRational,
    b: BigRational,
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl QScalar {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QScalar { a, b }
    }

    pub fn zero() -> Self {
        QScalar::default()
    }

    pub fn one() -> Self {
        QScalar::int(1)
    }

    pub fn int(n: i64) -> Self {
        QScalar::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    /// The rational `n/d`. Panics if `d == 0`.
    pub fn frac(n: i64, d: i64) -> Self {
        QScalar::new(ratio(n, d), BigRational::zero())
    }

    /// `(an/ad) + (bn/bd)·√3`, handy for writing table entries.
    pub fn from_parts(an: i64, ad: i64, bn: i64, bd: i64) -> Self {
        QScalar::new(ratio(an, ad), ratio(bn, bd))
    }

    pub fn rational(r: BigRational) -> Self {
        QScalar::new(r, BigRational::zero())
    }

    /// `√3` itself.
    pub fn sqrt3() -> Self {
        QScalar::from_parts(0, 1, 1, 1)
    }

    /// Exact value of a finite `f64`.
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(QScalar::rational)
    }

    /// Rational part `a`.
    pub fn a(&self) -> &BigRational {
        &self.a
    }

    /// Coefficient `b` of √3.
    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Exact sign of `a + b√3`, decided without floating point.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (s, t) if s == t => s,
            // opposite signs: the larger of a² and 3b² wins
            (sa, _) => {
                let a2 = &self.a * &self.a;
                let b2 = &self.b * &self.b * BigInt::from(3);
                match a2.cmp(&b2) {
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Galois conjugate `a − b√3`.
    pub fn conj(&self) -> Self {
        QScalar::new(self.a.clone(), -self.b.clone())
    }

    /// Field norm `(a + b√3)(a − b√3) = a² − 3b²`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigInt::from(3)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // the norm of a nonzero element is nonzero because √3 is irrational
        let n = self.norm();
        Ok(QScalar::new(&self.a / &n, -&self.b / &n))
    }

    pub fn checked_div(&self, rhs: &QScalar) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = QScalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Square root inside Q(√3), when it exists there.
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        if self.is_zero() {
            return Some(QScalar::zero());
        }
        if self.b.is_zero() {
            // either (p)² = a or (q√3)² = 3q² = a
            if let Some(p) = rational_sqrt(&self.a) {
                return Some(QScalar::rational(p));
            }
            return rational_sqrt(&(&self.a / BigInt::from(3)))
                .map(|q| QScalar::new(BigRational::zero(), q));
        }
        // (p + q√3)² = p² + 3q² + 2pq√3, so p² solves z² − a z + 3b²/4 = 0
        let disc = rational_sqrt(&self.norm())?;
        let two = BigRational::from_integer(BigInt::from(2));
        for p2 in [(&self.a + &disc) / &two, (&self.a - &disc) / &two] {
            if p2.is_negative() || p2.is_zero() {
                continue;
            }
            if let Some(p) = rational_sqrt(&p2) {
                let q = &self.b / (&two * &p);
                let cand = QScalar::new(p, q);
                if cand.is_positive() && &(&cand * &cand) == self {
                    return Some(cand);
                }
                let neg = -cand;
                if neg.is_positive() && &(&neg * &neg) == self {
                    return Some(neg);
                }
            }
        }
        None
    }

    /// Nearest-ish `f64` of `a + b√3` (a few ulp), free of cancellation.
    pub fn to_f64(&self) -> f64 {
        let s3 = 3f64.sqrt();
        let af = self.a.to_f64().unwrap_or(f64::NAN);
        let bf = self.b.to_f64().unwrap_or(f64::NAN);
        if self.a.is_zero() || self.b.is_zero() || self.a.is_positive() == self.b.is_positive() {
            return af + bf * s3;
        }
        // opposite signs: a + b√3 = (a² − 3b²)/(a − b√3); the denominator adds like signs
        let n = self.norm().to_f64().unwrap_or(f64::NAN);
        n / (af - bf * s3)
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer();
    let d = r.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

/// `t = tan(π/12) = 2 − √3`, the contraction ratio of the tiling.
pub fn t() -> QScalar {
    QScalar::from_parts(2, 1, -1, 1)
}

/// `t^k`, exactly.
pub fn t_power(k: u32) -> QScalar {
    t().pow(k)
}

impl PartialOrd for QScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

macro_rules! forward_binop {
    ($Tr:ident, $m:ident, $body:expr) => {
        impl<'a> $Tr<&'a QScalar> for &'a QScalar {
            type Output = QScalar;
            fn $m(self, rhs: &'a QScalar) -> QScalar {
                let f: fn(&QScalar, &QScalar) -> QScalar = $body;
                f(self, rhs)
            }
        }
        impl $Tr<QScalar> for QScalar {
            type Output = QScalar;
            fn $m(self, rhs: QScalar) -> QScalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $Tr<&'a QScalar> for QScalar {
            type Output = QScalar;
            fn $m(self, rhs: &'a QScalar) -> QScalar {
                (&self).$m(rhs)
            }
        }
        impl<'a> $Tr<QScalar> for &'a QScalar {
            type Output = QScalar;
            fn $m(self, rhs: QScalar) -> QScalar {
                self.$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |x, y| QScalar::new(&x.a + &y.a, &x.b + &y.b));
forward_binop!(Sub, sub, |x, y| QScalar::new(&x.a - &y.a, &x.b - &y.b));
forward_binop!(Mul, mul, |x, y| {
    let three = BigInt::from(3);
    QScalar::new(&x.a * &y.a + &x.b * &y.b * three, &x.a * &y.b + &x.b * &y.a)
});
// panics on a zero divisor, like the rationals underneath; see `checked_div`
forward_binop!(Div, div, |x, y| x.checked_div(y).expect("division by zero in Q(√3)"));

impl Neg for QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar::new(-self.a, -self.b)
    }
}

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        -self.clone()
    }
}

impl AddAssign<&QScalar> for QScalar {
    fn add_assign(&mut self, rhs: &QScalar) {
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl SubAssign<&QScalar> for QScalar {
    fn sub_assign(&mut self, rhs: &QScalar) {
        self.a -= &rhs.a;
        self.b -= &rhs.b;
    }
}

impl MulAssign<&QScalar> for QScalar {
    fn mul_assign(&mut self, rhs: &QScalar) {
        *self = &*self * rhs;
    }
}

impl From<i64> for QScalar {
    fn from(n: i64) -> Self {
        QScalar::int(n)
    }
}

impl From<BigRational> for QScalar {
    fn from(r: BigRational) -> Self {
        QScalar::rational(r)
    }
}

impl fmt::Display for QScalar {
    /// `a+b√3` with reduced rationals, e.g. `7-4√3`, `1/2√3`, `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coef = |r: &BigRational| -> String {
            if r.is_one() {
                String::new()
            } else {
                r.to_string()
            }
        };
        match (self.a.is_zero(), self.b.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.a),
            (true, false) => {
                if self.b.is_negative() {
                    write!(f, "-{}√3", coef(&-self.b.clone()))
                } else {
                    write!(f, "{}√3", coef(&self.b))
                }
            }
            (false, false) => {
                if self.b.is_negative() {
                    write!(f, "{}-{}√3", self.a, coef(&-self.b.clone()))
                } else {
                    write!(f, "{}+{}√3", self.a, coef(&self.b))
                }
            }
        }
    }
}

impl fmt::Debug for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (≈{})", self, self.to_f64())
    }
}

/// Parses a decimal (`0.156`, `1e-3`) or fraction (`3/2`) into a rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    let s = s.trim();
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(n / d);
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse::<BigInt>().map_err(|_| bad())? / 10;
    let shift = exp - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let scale = if shift >= 0 {
        num_traits::pow(ten, shift as usize)
    } else {
        num_traits::pow(ten, (-shift) as usize).recip()
    };
    let r = BigRational::from_integer(digits) * scale;
    Ok(if neg { -r } else { r })
}

impl FromStr for QScalar {
    type Err = Error;

    /// Accepts `a`, `b√3`, `a+b√3`; `√3` may also be spelled `sqrt3`,
    /// `sqrt(3)` or `s3`, with an optional `*` (`3*sqrt3/2`).
    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .replace("sqrt(3)", "r")
            .replace("sqrt3", "r")
            .replace("√3", "r")
            .replace("s3", "r")
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '*')
            .collect();
        if norm.is_empty() {
            return Err(Error::Parse("empty number".into()));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = norm.as_bytes();
        for i in 1..bytes.len() {
            let prev = bytes[i - 1];
            if (bytes[i] == b'+' || bytes[i] == b'-') && prev != b'e' && prev != b'E' && prev != b'/' {
                terms.push(&norm[start..i]);
                start = i;
            }
        }
        terms.push(&norm[start..]);
        let mut out = QScalar::zero();
        for term in terms {
            if term.contains('r') {
                let rest = term.replacen('r', "", 1);
                let rest = match rest.as_str() {
                    "" | "+" => "1".to_string(),
                    "-" => "-1".to_string(),
                    r if r.starts_with('/') => format!("1{r}"),
                    r if r.starts_with("-/") => format!("-1{}", &r[1..]),
                    r if r.starts_with("+/") => format!("1{}", &r[1..]),
                    r => r.to_string(),
                };
                out += &QScalar::new(BigRational::zero(), parse_rational(&rest)?);
            } else {
                out += &QScalar::rational(parse_rational(term)?);
            }
        }
        Ok(out)
    }
}

/// Arithmetic backend shared by the exact and the floating-point paths.
pub trait Scalar:
    Clone
    + PartialOrd
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_q(q: &QScalar) -> Self;
    fn to_f64(&self) -> f64;
    fn zero() -> Self;
    fn from_i64(n: i64) -> Self;
}

impl Scalar for QScalar {
    fn from_q(q: &QScalar) -> Self {
        q.clone()
    }
    fn to_f64(&self) -> f64 {
        QScalar::to_f64(self)
    }
    fn zero() -> Self {
        QScalar::zero()
    }
    fn from_i64(n: i64) -> Self {
        QScalar::int(n)
    }
}

impl Scalar for f64 {
    fn from_q(q: &QScalar) -> Self {
        q.to_f64()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn zero() -> Self {
        0.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> QScalar {
        s.parse().unwrap()
    }

    #[test]
    fn tan_pi_over_12_is_two_minus_sqrt3() {
        let tan = (std::f64::consts::PI / 12.0).tan();
        assert!((tan - t().to_f64()).abs() < 1e-14, "{tan} vs {}", t().to_f64());
    }

    #[test]
    fn conjugate_product_and_square() {
        assert_eq!(q("2-√3") * q("2+√3"), QScalar::one());
        assert_eq!(q("2-√3").pow(2), q("7-4√3"));
        assert_eq!(QScalar::one() / q("2-√3"), q("2+√3"));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(matches!(QScalar::one().checked_div(&QScalar::zero()), Err(Error::DivisionByZero)));
        assert!(QScalar::zero().inv().is_err());
    }

    #[test]
    fn t_powers() {
        assert_eq!(t_power(0), QScalar::one());
        assert_eq!(t_power(1), q("2-√3"));
        assert_eq!(t_power(4), q("97-56√3"));
        assert!((t_power(1).to_f64() - 0.2679491924311227).abs() < 1e-15);
        assert!((t_power(4).to_f64() - 0.2679491924311227f64.powi(4)).abs() < 1e-15);
        for k in 0..=64u32 {
            assert_eq!(t_power(2 * k) * t_power(2), t_power(2 * k + 2));
        }
    }

    #[test]
    fn float_conversion() {
        assert_eq!(QScalar::sqrt3().to_f64(), 1.7320508075688772);
        assert!((q("7-4√3").to_f64() - 0.0717967697244908).abs() < 1e-16);
        assert!((q("-2+√3").to_f64() + 0.2679491924311227).abs() < 1e-16);
        // deep powers stay accurate in relative terms
        let big = t_power(60);
        let expect = 0.2679491924311227f64.powi(60);
        assert!(((big.to_f64() - expect) / expect).abs() < 1e-13);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(q("3/2√3"), QScalar::from_parts(0, 1, 3, 2));
        assert_eq!(q("3*sqrt3/2"), QScalar::from_parts(0, 1, 3, 2));
        assert_eq!(q("-1/2 + 3/4*sqrt(3)"), QScalar::from_parts(-1, 2, 3, 4));
        assert_eq!(q("0.156"), QScalar::frac(39, 250));
        assert_eq!(q("1e-3"), QScalar::frac(1, 1000));
        assert_eq!(q("-√3"), QScalar::from_parts(0, 1, -1, 1));
        assert_eq!(q("7-4√3").to_string(), "7-4√3");
        assert_eq!(QScalar::from_parts(1, 2, 1, 3).to_string(), "1/2+1/3√3");
        assert!("abc".parse::<QScalar>().is_err());
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(q("7-4√3").sqrt_exact(), Some(q("2-√3")));
        assert_eq!(q("3").sqrt_exact(), Some(QScalar::sqrt3()));
        assert_eq!(q("3/4").sqrt_exact(), Some(q("1/2√3")));
        assert_eq!(q("1/4").sqrt_exact(), Some(q("1/2")));
        assert_eq!(q("2").sqrt_exact(), None);
        assert_eq!(q("-1").sqrt_exact(), None);
    }

    fn arb_q() -> impl Strategy<Value = QScalar> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20)
            .prop_map(|(an, ad, bn, bd)| QScalar::from_parts(an, ad, bn, bd))
    }

    proptest! {
        #[test]
        fn field_axioms(x in arb_q(), y in arb_q(), z in arb_q()) {
            prop_assert_eq!((&x * &y) * &z, &x * (&y * &z));
            prop_assert_eq!(&x * (&y + &z), &x * &y + &x * &z);
            prop_assert_eq!(&x + &y, &y + &x);
            if !x.is_zero() {
                prop_assert_eq!(&x * x.inv().unwrap(), QScalar::one());
                prop_assert_eq!((&y / &x) * &x, y.clone());
            }
        }

        #[test]
        fn exact_sign_matches_float(x in arb_q()) {
            let f = x.to_f64();
            if f.abs() > 1e-9 {
                prop_assert_eq!(x.is_positive(), f > 0.0);
            }
        }

        #[test]
        fn display_parse_roundtrip(x in arb_q()) {
            prop_assert_eq!(x.to_string().parse::<QScalar>().unwrap(), x);
        }
    }
}
