//! Homogeneous forms in `n + 1` variables with exact coefficients.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ring::Ring;
use super::scalar::Scalar;
use crate::error::{Error, Result};

pub type Exponent = Vec<u32>;

#[derive(Clone, PartialEq, Eq)]
pub struct HomogeneousForm {
    nvars: usize,
    degree: u32,
    coeffs: BTreeMap<Exponent, Scalar>,
}

/// All exponent vectors of total degree `d` in `nvars` variables, in
/// lexicographically decreasing order (`x0^d` first).
pub fn monomials(nvars: usize, d: u32) -> Vec<Exponent> {
    fn rec(nvars: usize, d: u32, prefix: &mut Exponent, out: &mut Vec<Exponent>) {
        if prefix.len() + 1 == nvars {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=d).rev() {
            prefix.push(a);
            rec(nvars, d - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        return out;
    }
    rec(nvars, d, &mut Vec::with_capacity(nvars), &mut out);
    out
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

impl HomogeneousForm {
    pub fn zero(nvars: usize, degree: u32) -> Self {
        Self { nvars, degree, coeffs: BTreeMap::new() }
    }

    pub fn from_terms(nvars: usize, degree: u32, terms: impl IntoIterator<Item = (Exponent, Scalar)>) -> Result<Self> {
        let mut f = Self::zero(nvars, degree);
        for (e, c) in terms {
            if e.len() != nvars || e.iter().sum::<u32>() != degree {
                return Err(Error::DimensionMismatch(format!(
                    "exponent {e:?} does not have {nvars} entries summing to {degree}"
                )));
            }
            f.add_term(e, &c);
        }
        Ok(f)
    }

    /// The coordinate form `x_i`.
    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::from_terms(nvars, 1, [(e, Scalar::one())]).unwrap()
    }

    pub fn linear(coeffs: &[Scalar]) -> Self {
        let n = coeffs.len();
        let terms = coeffs.iter().enumerate().map(|(i, c)| {
            let mut e = vec![0; n];
            e[i] = 1;
            (e, c.clone())
        });
        Self::from_terms(n, 1, terms).unwrap()
    }

    pub fn monomial(exp: Exponent, c: Scalar) -> Self {
        let n = exp.len();
        let d = exp.iter().sum();
        Self::from_terms(n, d, [(exp, c)]).unwrap()
    }

    fn add_term(&mut self, e: Exponent, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let vanished = {
            let entry = self.coeffs.entry(e.clone()).or_insert_with(Scalar::zero);
            *entry += c;
            entry.is_zero()
        };
        if vanished {
            self.coeffs.remove(&e);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, e: &[u32]) -> Scalar {
        self.coeffs.get(e).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient vector in the [`monomials`] basis.
    pub fn to_vector(&self) -> Vec<Scalar> {
        monomials(self.nvars, self.degree).iter().map(|e| self.coeff(e)).collect()
    }

    pub fn from_vector(nvars: usize, degree: u32, v: &[Scalar]) -> Self {
        let terms = monomials(nvars, degree).into_iter().zip(v.iter().cloned());
        Self::from_terms(nvars, degree, terms).unwrap()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars, self.degree);
        }
        Self {
            coeffs: self.coeffs.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        let mut out = self.clone();
        for (e, c) in &o.coeffs {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&Scalar::from_i64(-1)))
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.nvars != o.nvars {
            return Err(Error::DimensionMismatch("forms in different numbers of variables".into()));
        }
        let mut out = Self::zero(self.nvars, self.degree + o.degree);
        for (ea, a) in &self.coeffs {
            for (eb, b) in &o.coeffs {
                let e: Exponent = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, &(a * b));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::from_terms(self.nvars, 0, [(vec![0; self.nvars], Scalar::one())]).unwrap();
        for _ in 0..k {
            acc = acc.mul(self).unwrap();
        }
        acc
    }

    fn check_same(&self, o: &Self) -> Result<()> {
        if self.nvars != o.nvars || (self.degree != o.degree && !self.is_zero() && !o.is_zero()) {
            return Err(Error::DimensionMismatch(format!(
                "forms of shape ({}, {}) and ({}, {})",
                self.nvars, self.degree, o.nvars, o.degree
            )));
        }
        Ok(())
    }

    /// Evaluate at values in any ring; `vals.len()` must equal `nvars`.
    pub fn eval<R: Ring>(&self, vals: &[R]) -> R {
        assert_eq!(vals.len(), self.nvars, "wrong number of values");
        let zero = vals[0].zero_like();
        let one = vals[0].one_like();
        // power tables
        let maxd = self.degree as usize;
        let pows: Vec<Vec<R>> = vals
            .iter()
            .map(|x| {
                let mut p = Vec::with_capacity(maxd + 1);
                p.push(one.clone());
                for k in 1..=maxd {
                    let next = p[k - 1].mul(x);
                    p.push(next);
                }
                p
            })
            .collect();
        let mut acc = zero;
        for (e, c) in &self.coeffs {
            let mut term = one.scale(c);
            for (i, &a) in e.iter().enumerate() {
                if a > 0 {
                    term = term.mul(&pows[i][a as usize]);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Partial derivative in variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        if self.degree == 0 {
            return Self::zero(self.nvars, 0);
        }
        let mut out = Self::zero(self.nvars, self.degree - 1);
        for (e, c) in &self.coeffs {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, &(c * &Scalar::from_i64(e[i] as i64)));
            }
        }
        out
    }

    /// Substitute linear forms: `x_i -> Σ_j m[i][j] x_j`.
    pub fn linear_substitute(&self, m: &[Vec<Scalar>]) -> Result<Self> {
        if m.len() != self.nvars {
            return Err(Error::DimensionMismatch("substitution size".into()));
        }
        let lins: Vec<HomogeneousForm> = m.iter().map(|row| HomogeneousForm::linear(row)).collect();
        let mut out = Self::zero(self.nvars, self.degree);
        for (e, c) in &self.coeffs {
            let mut term = HomogeneousForm::from_terms(self.nvars, 0, [(vec![0; self.nvars], c.clone())])?;
            for (i, &a) in e.iter().enumerate() {
                for _ in 0..a {
                    term = term.mul(&lins[i])?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Parse text such as `x*z - y^2 + 1/2*x^2`. Variables are `x0, x1, ...`;
    /// with at most three variables `x, y, z` are accepted too.
    pub fn parse(s: &str, nvars: usize) -> Result<Self> {
        let names: Vec<String> = if nvars <= 3 {
            ["x", "y", "z"][..nvars].iter().map(|s| s.to_string()).collect()
        } else {
            (0..nvars).map(|i| format!("x{i}")).collect()
        };
        let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut terms: Vec<(Exponent, Scalar)> = Vec::new();
        let mut cur = String::new();
        let mut depth = 0;
        let mut pieces = Vec::new();
        for (k, c) in src.chars().enumerate() {
            if c == '(' {
                depth += 1;
            }
            if c == ')' {
                depth -= 1;
            }
            let prev = if k > 0 { src.chars().nth(k - 1) } else { None };
            if (c == '+' || c == '-') && depth == 0 && !cur.is_empty() && cur != "+" && cur != "-" && prev != Some('^') && prev != Some('(') {
                pieces.push(std::mem::take(&mut cur));
            }
            cur.push(c);
        }
        if !cur.is_empty() {
            pieces.push(cur);
        }
        for piece in pieces {
            let mut neg = false;
            let mut body = piece.as_str();
            while let Some(c) = body.chars().next().filter(|c| *c == '+' || *c == '-') {
                neg ^= c == '-';
                body = &body[1..];
            }
            let mut coef = Scalar::one();
            let mut exp = vec![0u32; nvars];
            for factor in body.split('*') {
                if factor.is_empty() {
                    continue;
                }
                let (base, pow) = match factor.split_once('^') {
                    Some((b, p)) => (b, p.parse::<u32>().map_err(|_| Error::Parse(format!("bad power in {factor:?}")))?),
                    None => (factor, 1),
                };
                let indexed = base.strip_prefix('x').and_then(|k| k.parse::<usize>().ok()).filter(|&k| k < nvars);
                if let Some(i) = names.iter().position(|n| n == base).or(indexed) {
                    exp[i] += pow;
                } else {
                    let c: Scalar = base.trim_start_matches('(').trim_end_matches(')').parse()?;
                    coef = &coef * &c.pow(pow);
                }
            }
            if neg {
                coef = -coef;
            }
            terms.push((exp, coef));
        }
        let degree = terms.iter().map(|(e, _)| e.iter().sum::<u32>()).max().unwrap_or(0);
        Self::from_terms(nvars, degree, terms)
    }

    pub fn to_text(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let names: Vec<String> = if self.nvars <= 3 {
            ["x", "y", "z"][..self.nvars].iter().map(|s| s.to_string()).collect()
        } else {
            (0..self.nvars).map(|i| format!("x{i}")).collect()
        };
        let mut parts = Vec::new();
        for (e, c) in self.coeffs.iter().rev() {
            let mut factors = Vec::new();
            if !c.is_one() || e.iter().all(|&a| a == 0) {
                factors.push(if c.is_real() { c.to_string() } else { format!("({c})") });
            }
            for (i, &a) in e.iter().enumerate() {
                match a {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    _ => factors.push(format!("{}^{a}", names[i])),
                }
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }
}

impl fmt::Debug for HomogeneousForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// JSON shape `{"degree": d, "coeffs": {"a0,a1,...": "p/q"}}`.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct FormJson {
    pub degree: u32,
    pub coeffs: BTreeMap<String, Scalar>,
}

impl From<&HomogeneousForm> for FormJson {
    fn from(f: &HomogeneousForm) -> Self {
        FormJson {
            degree: f.degree,
            coeffs: f
                .coeffs
                .iter()
                .map(|(e, c)| (e.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(","), c.clone()))
                .collect(),
        }
    }
}

impl TryFrom<&FormJson> for HomogeneousForm {
    type Error = Error;
    fn try_from(j: &FormJson) -> Result<Self> {
        let mut terms = Vec::new();
        let mut nvars = None;
        for (k, c) in &j.coeffs {
            let e: Exponent = k
                .split(',')
                .map(|a| a.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent key {k:?}"))))
                .collect::<Result<_>>()?;
            if *nvars.get_or_insert(e.len()) != e.len() {
                return Err(Error::Parse("exponent keys of different lengths".into()));
            }
            terms.push((e, c.clone()));
        }
        let nvars = nvars.ok_or_else(|| Error::Parse("form has no coefficients".into()))?;
        HomogeneousForm::from_terms(nvars, j.degree, terms)
    }
}

impl Serialize for HomogeneousForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for HomogeneousForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = FormJson::deserialize(d)?;
        HomogeneousForm::try_from(&j).map_err(serde::de::Error::custom)
    }
}
