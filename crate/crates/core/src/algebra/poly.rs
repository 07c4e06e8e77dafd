//! Dense univariate polynomials over [`Scalar`] and reduced rational functions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// `coeffs[k]` multiplies `v^k`; no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    /// The variable itself.
    pub fn x() -> Self {
        Self::monomial(Scalar::one(), 1)
    }

    pub fn monomial(c: Scalar, k: usize) -> Self {
        let mut v = vec![Scalar::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// Parse `2 - 3/2*v + v^3` in the variable `var`.
    pub fn parse(s: &str, var: char) -> Result<Self> {
        let t = super::parse::parse_terms(s, var)?;
        if t.terms.iter().any(|x| x.0 < 0) || t.big_o.is_some() {
            return Err(Error::Parse(format!("not a polynomial: {s:?}")));
        }
        let deg = t.terms.iter().map(|x| x.0).max().unwrap_or(0);
        let mut c = vec![Scalar::zero(); deg as usize + 1];
        for (e, a) in t.terms {
            c[e as usize] += &a;
        }
        Ok(Poly::new(c))
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| Scalar::from_i64(c)).collect())
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Scalar {
        self.coeffs.last().cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let lc = self.leading().inv().expect("nonzero leading coefficient");
        self.scale(&lc)
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn eval_c64(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_complex();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &Scalar::from_i64(k as i64))
                .collect(),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Substitute another polynomial for the variable.
    pub fn compose(&self, inner: &Poly) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Self::constant(c.clone());
        }
        acc
    }

    /// `v^e p(1/v)` for `e >= deg p`.
    pub fn reversed(&self, e: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(e + 1, Scalar::zero());
        c.reverse();
        Self::new(c)
    }

    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let dd = d.degree().unwrap();
        let lc_inv = d.leading().inv()?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut q = vec![Scalar::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                let t = &c * dc;
                r[k + j] -= &t;
            }
            q[k] = c;
        }
        r.truncate(dd);
        Ok((Self::new(q), Self::new(r)))
    }

    /// Exact division; errors if there is a remainder.
    pub fn div_exact(&self, d: &Poly) -> Result<Poly> {
        let (q, r) = self.div_rem(d)?;
        if !r.is_zero() {
            return Err(Error::Invalid("inexact polynomial division".into()));
        }
        Ok(q)
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.degree().unwrap_or(0) >= 4 && b.degree().unwrap_or(0) >= 4 {
            if let Some(g) = super::modgcd::gcd(a, b) {
                return g;
            }
        }
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Product of the distinct monic irreducible factors.
    pub fn squarefree_part(&self) -> Poly {
        if self.is_constant() {
            return Self::one();
        }
        let g = Self::gcd(self, &self.derivative());
        self.div_exact(&g).expect("gcd divides").monic()
    }

    pub fn to_string_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let coeff = if c.is_real() { c.to_string() } else { format!("({c})") };
            parts.push(match k {
                0 => coeff,
                1 => format!("{coeff}*{var}"),
                _ => format!("{coeff}*{var}^{k}"),
            });
        }
        parts.join(" + ")
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_in("v"))
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| &self.coeff(k) - &o.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// `num / den` with `gcd(num, den) = 1` and monic `den`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = Poly::gcd(&num, &den);
        let num = num.div_exact(&g)?;
        let den = den.div_exact(&g)?;
        let lc = den.leading().inv()?;
        Ok(Self { num: num.scale(&lc), den: den.scale(&lc) })
    }

    pub fn zero() -> Self {
        Self { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        Self { num: p, den: Poly::one() }
    }

    pub fn constant(c: Scalar) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    /// Exact zero test: the numerator is the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn eval(&self, x: &Scalar) -> Result<Scalar> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(&self.num.eval(x) / &d)
    }

    pub fn eval_c64(&self, x: Complex64) -> Complex64 {
        self.num.eval_c64(x) / self.den.eval_c64(x)
    }

    pub fn div(&self, o: &RatFn) -> Result<RatFn> {
        Ok(self * &o.inv()?)
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "({:?})/({:?})", self.num, self.den)
        }
    }
}

impl<'a> Add<&'a RatFn> for &'a RatFn {
    type Output = RatFn;
    fn add(self, o: &RatFn) -> RatFn {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RatFn::new(&self.num + &o.num, self.den.clone()).unwrap();
        }
        let num = &(&self.num * &o.den) + &(&o.num * &self.den);
        RatFn::new(num, &self.den * &o.den).unwrap()
    }
}

impl<'a> Sub<&'a RatFn> for &'a RatFn {
    type Output = RatFn;
    fn sub(self, o: &RatFn) -> RatFn {
        self + &(-o)
    }
}

impl<'a> Mul<&'a RatFn> for &'a RatFn {
    type Output = RatFn;
    fn mul(self, o: &RatFn) -> RatFn {
        if self.is_zero() || o.is_zero() {
            return RatFn::zero();
        }
        if self.den.is_constant() && o.den.is_constant() {
            return RatFn::from_poly(&self.num * &o.num);
        }
        RatFn::new(&self.num * &o.num, &self.den * &o.den).unwrap()
    }
}

impl Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn { num: -&self.num, den: self.den.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_and_gcd() {
        // (v-1)(v+2) and (v-1)(v-3)
        let a = &Poly::from_i64s(&[-1, 1]) * &Poly::from_i64s(&[2, 1]);
        let b = &Poly::from_i64s(&[-1, 1]) * &Poly::from_i64s(&[-3, 1]);
        assert_eq!(Poly::gcd(&a, &b), Poly::from_i64s(&[-1, 1]));
        let (q, r) = a.div_rem(&Poly::from_i64s(&[2, 1])).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, Poly::from_i64s(&[-1, 1]));
    }

    #[test]
    fn squarefree() {
        let l = Poly::from_i64s(&[-1, 1]);
        let p = &(&l * &l) * &Poly::from_i64s(&[5, 1]);
        assert_eq!(p.squarefree_part(), &l * &Poly::from_i64s(&[5, 1]));
    }

    #[test]
    fn ratfn_reduces() {
        let l = Poly::from_i64s(&[-1, 1]);
        let f = RatFn::new(&l * &Poly::from_i64s(&[0, 2]), &l * &l).unwrap();
        assert_eq!(f.den(), &l);
        assert_eq!(f.num(), &Poly::from_i64s(&[0, 2]));
        let g = &f - &f;
        assert!(g.is_zero());
        let h = &f * &f.inv().unwrap();
        assert_eq!(h, RatFn::one());
    }

    #[test]
    fn compose_and_reverse() {
        let p = Poly::from_i64s(&[1, 2, 3]);
        let q = p.compose(&Poly::from_i64s(&[1, 1]));
        assert_eq!(q, Poly::from_i64s(&[6, 8, 3]));
        assert_eq!(p.reversed(3), Poly::from_i64s(&[0, 3, 2, 1]));
    }
}
