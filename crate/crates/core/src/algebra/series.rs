//! Truncated Laurent series with pessimistic precision tracking.
//!
//! A series knows its coefficients exactly for every exponent strictly below
//! `prec`; everything from `prec` on is unknown. The public truncation order
//! `K` is `prec - 1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use super::parse::parse_terms;
use super::scalar::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Var {
    T,
    U,
    V,
}

impl Var {
    pub fn symbol(self) -> char {
        match self {
            Var::T => 't',
            Var::U => 'u',
            Var::V => 'v',
        }
    }
}

/// Invariants: `coeffs` has no leading or trailing zeros; an empty series is
/// zero to its precision and has `start == prec`. Coefficients between the
/// stored ones and `prec` are zero.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    var: Var,
    start: i64,
    coeffs: Vec<Scalar>,
    prec: i64,
}

impl TruncatedSeries {
    /// Builds from `(exponent, coefficient)` pairs known to truncation `k`.
    pub fn from_terms(var: Var, terms: &[(i64, Scalar)], k: i64) -> Self {
        let prec = k + 1;
        let lo = terms.iter().map(|t| t.0).min().unwrap_or(prec).min(prec);
        let hi = terms.iter().map(|t| t.0 + 1).max().unwrap_or(lo).min(prec);
        let mut coeffs = vec![Scalar::zero(); (hi - lo).max(0) as usize];
        for (e, c) in terms {
            if *e < prec {
                coeffs[(e - lo) as usize] += c;
            }
        }
        Self::normalized(var, lo, coeffs, prec)
    }

    pub fn zero(var: Var, k: i64) -> Self {
        Self { var, start: k + 1, coeffs: Vec::new(), prec: k + 1 }
    }

    pub fn one(var: Var, k: i64) -> Self {
        Self::monomial(var, Scalar::one(), 0, k)
    }

    pub fn monomial(var: Var, c: Scalar, e: i64, k: i64) -> Self {
        Self::from_terms(var, &[(e, c)], k)
    }

    pub fn constant(var: Var, c: Scalar, k: i64) -> Self {
        Self::monomial(var, c, 0, k)
    }

    fn normalized(var: Var, mut start: i64, mut coeffs: Vec<Scalar>, prec: i64) -> Self {
        let lead = coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => Self { var, start: prec, coeffs: Vec::new(), prec },
            Some(k) => {
                coeffs.drain(..k);
                start += k as i64;
                let keep = (prec - start).max(0) as usize;
                coeffs.truncate(keep);
                while coeffs.last().is_some_and(Scalar::is_zero) {
                    coeffs.pop();
                }
                Self { var, start, coeffs, prec }
            }
        }
    }

    pub fn var(&self) -> Var {
        self.var
    }

    /// Largest exponent whose coefficient is certified.
    pub fn truncation(&self) -> i64 {
        self.prec - 1
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// `None` when the series is zero to its truncation.
    pub fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.start)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `var^e`; `None` if `e` is beyond the truncation.
    pub fn coeff(&self, e: i64) -> Option<Scalar> {
        if e >= self.prec {
            return None;
        }
        if e < self.start {
            return Some(Scalar::zero());
        }
        Some(self.coeffs.get((e - self.start) as usize).cloned().unwrap_or_else(Scalar::zero))
    }

    /// Certified nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.start + k as i64, c))
    }

    pub fn leading_coeff(&self) -> Option<&Scalar> {
        self.coeffs.first()
    }

    /// Lower the truncation to `k` (never raises it).
    pub fn truncate(&self, k: i64) -> Self {
        let prec = self.prec.min(k + 1);
        Self::normalized(self.var, self.start, self.coeffs.clone(), prec)
    }

    /// Multiply by `var^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self { var: self.var, start: self.start + k, coeffs: self.coeffs.clone(), prec: self.prec + k }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.var, self.truncation());
        }
        Self { coeffs: self.coeffs.iter().map(|a| a * c).collect(), ..self.clone() }
    }

    /// Substitute `var^k` for `var` (`k >= 1`).
    pub fn substitute_power(&self, k: i64) -> Self {
        assert!(k >= 1);
        let terms: Vec<_> = self.terms().map(|(e, c)| (e * k, c.clone())).collect();
        let prec = self.prec * k;
        if self.is_zero() {
            return Self::zero(self.var, prec - 1);
        }
        Self::from_terms(self.var, &terms, prec - 1)
    }

    /// Multiplicative inverse; precision drops to `prec - 2·val`.
    pub fn invert(&self) -> Result<Self> {
        let v = self.valuation().ok_or(Error::ZeroSeries)?;
        // an exactly known monomial inverts exactly; otherwise cap the work
        let rel = if self.coeffs.len() == 1 { self.prec - v } else { (self.prec - v).min(1 << 16) };
        let n = if self.coeffs.len() == 1 { 1 } else { rel as usize };
        let a0_inv = self.coeffs[0].inv()?;
        let mut out: Vec<Scalar> = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = if k == 0 { Scalar::one() } else { Scalar::zero() };
            for j in 1..=k {
                if let Some(a) = self.coeffs.get(j) {
                    if !a.is_zero() {
                        acc -= &(a * &out[k - j]);
                    }
                }
            }
            out.push(&acc * &a0_inv);
        }
        Ok(Self::normalized(self.var, -v, out, -v + rel))
    }

    /// Evaluate the certified part at a complex point (numeric helper).
    pub fn eval_c64(&self, t: num_complex::Complex64) -> num_complex::Complex64 {
        self.terms().map(|(e, c)| c.to_complex() * t.powi(e as i32)).sum()
    }

    fn check_var(&self, o: &Self) {
        assert_eq!(self.var, o.var, "series in different variables");
    }
}

impl<'a> Add<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, o: &TruncatedSeries) -> TruncatedSeries {
        self.check_var(o);
        let prec = self.prec.min(o.prec);
        let lo = self.start.min(o.start).min(prec);
        let hi = [self, o]
            .iter()
            .filter(|s| !s.coeffs.is_empty())
            .map(|s| s.start + s.coeffs.len() as i64)
            .max()
            .unwrap_or(lo)
            .min(prec);
        let mut c = vec![Scalar::zero(); (hi - lo).max(0) as usize];
        for s in [self, o] {
            for (k, a) in s.coeffs.iter().enumerate() {
                let e = s.start + k as i64;
                if e < prec {
                    c[(e - lo) as usize] += a;
                }
            }
        }
        TruncatedSeries::normalized(self.var, lo, c, prec)
    }
}

impl<'a> Sub<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, o: &TruncatedSeries) -> TruncatedSeries {
        self + &(-o)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|c| -c).collect(), ..self.clone() }
    }
}

impl<'a> Mul<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, o: &TruncatedSeries) -> TruncatedSeries {
        self.check_var(o);
        // a = O(t^pa) when zero; b's valuation shifts the unknown tail
        let prec = match (self.valuation(), o.valuation()) {
            (Some(va), Some(vb)) => (va + o.prec).min(vb + self.prec),
            (None, Some(vb)) => self.prec + vb,
            (Some(va), None) => o.prec + va,
            (None, None) => self.prec + o.prec,
        };
        if self.is_zero() || o.is_zero() {
            return TruncatedSeries::zero(self.var, prec - 1);
        }
        let lo = self.start + o.start;
        let n = ((prec - lo).max(0) as usize).min(self.coeffs.len() + o.coeffs.len() - 1);
        let mut c = vec![Scalar::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= n || a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                if !b.is_zero() {
                    c[i + j] += &(a * b);
                }
            }
        }
        TruncatedSeries::normalized(self.var, lo, c, prec)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.var.symbol();
        let mut parts: Vec<String> = self
            .terms()
            .map(|(e, c)| {
                let c = if c.is_real() { c.to_string() } else { format!("({c})") };
                if e == 0 {
                    c
                } else {
                    format!("{c}*{v}^{e}")
                }
            })
            .collect();
        parts.push(format!("O({v}^{})", self.prec));
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl TruncatedSeries {
    /// Parse with a default truncation `k`, overridden by an explicit `O(t^N)` term.
    pub fn parse(s: &str, var: Var, k: i64) -> Result<Self> {
        let t = parse_terms(s, var.symbol())?;
        let k = t.big_o.map_or(k, |n| n - 1);
        Ok(Self::from_terms(var, &t.terms, k))
    }
}

impl FromStr for TruncatedSeries {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = parse_terms(s, 't')?;
        let n = t.big_o.ok_or_else(|| Error::Parse("series needs an O(t^N) term".into()))?;
        Ok(Self::from_terms(Var::T, &t.terms, n - 1))
    }
}
