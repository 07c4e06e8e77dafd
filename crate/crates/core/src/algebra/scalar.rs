//! Gaussian rationals `a + b·i` with arbitrary-precision parts.
//!
//! Every coefficient in the crate is one of these. `BigRational` keeps both
//! parts reduced with a positive denominator, so equality is structural.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    pub re: BigRational,
    pub im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_i64(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        Self::new(
            BigRational::new(BigInt::from(p), BigInt::from(q)),
            BigRational::zero(),
        )
    }

    pub fn gaussian(re: i64, im: i64) -> Self {
        Self::new(
            BigRational::from_integer(BigInt::from(re)),
            BigRational::from_integer(BigInt::from(im)),
        )
    }

    pub fn from_rational(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|²`, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm_sqr();
        Ok(Self::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Integer value if this scalar is a real integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        if self.im.is_zero() && self.re.is_integer() {
            Some(self.re.to_integer())
        } else {
            None
        }
    }

    /// Nearest Gaussian rational with denominator dividing `den`.
    pub fn round_complex(z: Complex64, den: i64) -> Self {
        let r = (z.re * den as f64).round() as i64;
        let i = (z.im * den as f64).round() as i64;
        Self::new(
            BigRational::new(BigInt::from(r), BigInt::from(den)),
            BigRational::new(BigInt::from(i), BigInt::from(den)),
        )
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Scale down huge numerators/denominators before converting.
    let n = r.numer();
    let d = r.denom();
    let shift = (n.bits() as i64).max(d.bits() as i64) - 900;
    if shift <= 0 {
        return f64::NAN;
    }
    let n = n >> shift as usize;
    let d = d >> shift as usize;
    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    /// `p/q` for reals, `p/q+r/s*i` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rat(&self.re));
        }
        let sign = if self.im.is_negative() { "-" } else { "+" };
        let im_abs = self.im.abs();
        write!(f, "{}{}{}*i", fmt_rat(&self.re), sign, fmt_rat(&im_abs))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_rat(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse(format!("empty rational in {s:?}")));
    }
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `p`, `p/q`, `p/q*i`, `i`, `-i` and `p/q+r/s*i`.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        if !s.ends_with('i') {
            return Ok(Self::from_rational(parse_rat(&s)?));
        }
        let body = &s[..s.len() - 1];
        let body = body.strip_suffix('*').unwrap_or(body);
        // split at the last sign that is not the leading one
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(k, _)| k)
            .last();
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            other => parse_rat(other.strip_prefix('+').unwrap_or(other))?,
        };
        Ok(Self::new(parse_rat(re)?, im))
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(Scalar::from_i64(n)),
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.im.is_zero() && o.im.is_zero() {
            return Scalar::from_rational(&self.re * &o.re);
        }
        Scalar::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    /// Panics on division by zero; use [`Scalar::inv`] for a fallible path.
    fn div(self, o: &Scalar) -> Scalar {
        if o.im.is_zero() {
            return Scalar::new(&self.re / &o.re, &self.im / &o.re);
        }
        self * &o.inv().expect("division by zero scalar")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re, -self.im)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re.clone(), -self.im.clone())
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = &*self * o;
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_i64(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_round_trip() {
        for s in ["0", "3", "-7/2", "1/2+3/4*i", "-1/3-2*i", "5*i", "0-1*i"] {
            let z: Scalar = s.parse().unwrap();
            let back: Scalar = z.to_string().parse().unwrap();
            assert_eq!(z, back, "{s}");
        }
        assert_eq!("1/2+3/4*i".parse::<Scalar>().unwrap().to_string(), "1/2+3/4*i");
        assert_eq!("i".parse::<Scalar>().unwrap(), Scalar::i());
        assert_eq!("-i".parse::<Scalar>().unwrap(), -Scalar::i());
    }

    #[test]
    fn canonical_form() {
        let a = Scalar::from_ratio(2, -4);
        assert_eq!(a.to_string(), "-1/2");
        assert_eq!(a, Scalar::from_ratio(-1, 2));
    }

    #[test]
    fn field_ops_exact() {
        let a: Scalar = "1/2+1/3*i".parse().unwrap();
        let b: Scalar = "-2+5/7*i".parse().unwrap();
        let q = &a / &b;
        assert_eq!(&q * &b, a);
        assert_eq!(&a * &a.inv().unwrap(), Scalar::one());
        assert!(Scalar::zero().inv().is_err());
        assert_eq!(&Scalar::i() * &Scalar::i(), Scalar::from_i64(-1));
    }

    #[test]
    fn rejects_garbage() {
        assert!("abc".parse::<Scalar>().is_err());
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("".parse::<Scalar>().is_err());
    }
}
