//! Power series in `u` whose coefficients are exact rational functions of `v`,
//! and the Newton solver for `F(x(v,u), t) = 0`.

use std::fmt;

use super::form::HomogeneousForm;
use super::poly::{Poly, RatFn};
use super::ring::Ring;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// `Σ_{k < prec} c_k(v) u^k + O(u^prec)`.
#[derive(Clone, PartialEq, Eq)]
pub struct BivariateSeries {
    coeffs: Vec<RatFn>,
}

impl BivariateSeries {
    /// Zero known through `u^k`.
    pub fn zero(k: usize) -> Self {
        Self { coeffs: vec![RatFn::zero(); k + 1] }
    }

    pub fn from_coeffs(coeffs: Vec<RatFn>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one certified coefficient");
        Self { coeffs }
    }

    /// `p(v)·u^e` known through `u^k`.
    pub fn monomial(p: RatFn, e: usize, k: usize) -> Self {
        let mut s = Self::zero(k);
        if e <= k {
            s.coeffs[e] = p;
        }
        s
    }

    pub fn constant(p: RatFn, k: usize) -> Self {
        Self::monomial(p, 0, k)
    }

    /// Truncation order `K`: coefficients of `u^0..=u^K` are certified.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Option<&RatFn> {
        self.coeffs.get(k)
    }

    pub fn coeffs(&self) -> &[RatFn] {
        &self.coeffs
    }

    /// First `k` with a nonzero coefficient, `None` if zero to truncation.
    pub fn u_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, k: usize) -> Self {
        let n = (k + 1).min(self.coeffs.len());
        Self { coeffs: self.coeffs[..n].to_vec() }
    }

    /// Divide by `u^k`; the first `k` coefficients must vanish. Truncation drops by `k`.
    pub fn div_u_power(&self, k: usize) -> Result<Self> {
        if k > self.truncation() {
            return Err(Error::TruncationExceeded(self.truncation()));
        }
        if self.coeffs[..k].iter().any(|c| !c.is_zero()) {
            return Err(Error::Invalid("series does not vanish to the requested u-order".into()));
        }
        Ok(Self { coeffs: self.coeffs[k..].to_vec() })
    }

    /// Inverse of a series with nonzero constant coefficient.
    pub fn invert(&self) -> Result<Self> {
        let c0 = self.coeffs[0].inv().map_err(|_| Error::ZeroSeries)?;
        let n = self.coeffs.len();
        let mut out: Vec<RatFn> = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = if k == 0 { RatFn::one() } else { RatFn::zero() };
            for j in 1..=k {
                if !self.coeffs[j].is_zero() && !out[k - j].is_zero() {
                    acc = &acc - &(&self.coeffs[j] * &out[k - j]);
                }
            }
            out.push(&acc * &c0);
        }
        Ok(Self { coeffs: out })
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().min(o.coeffs.len());
        Self { coeffs: (0..n).map(|k| &self.coeffs[k] - &o.coeffs[k]).collect() }
    }

    /// Evaluate the first few coefficients numerically (used by continuation checks).
    pub fn eval_c64(&self, v: num_complex::Complex64, u: num_complex::Complex64) -> num_complex::Complex64 {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * u + c.eval_c64(v);
        }
        acc
    }
}

impl Ring for BivariateSeries {
    fn zero_like(&self) -> Self {
        Self::zero(self.truncation())
    }
    fn one_like(&self) -> Self {
        Self::constant(RatFn::one(), self.truncation())
    }
    fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().min(o.coeffs.len());
        Self { coeffs: (0..n).map(|k| &self.coeffs[k] + &o.coeffs[k]).collect() }
    }
    fn mul(&self, o: &Self) -> Self {
        // both series start at u^0, so precision is the smaller one
        let n = self.coeffs.len().min(o.coeffs.len());
        let mut out = vec![RatFn::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n - i) {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        Self { coeffs: out }
    }
    fn scale(&self, c: &Scalar) -> Self {
        Self { coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect() }
    }
}

impl fmt::Debug for BivariateSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                write!(f, "[{c:?}]*u^{k} + ")?;
            }
        }
        write!(f, "O(u^{})", self.coeffs.len())
    }
}

/// A path `x(v,u) = base(v) + u·direction(v)` into affine coordinates.
#[derive(Clone, Debug)]
pub struct Path {
    pub base: Vec<Poly>,
    pub direction: Vec<Poly>,
}

impl Path {
    pub fn new(base: Vec<Poly>, direction: Vec<Poly>) -> Result<Self> {
        if base.len() != direction.len() {
            return Err(Error::DimensionMismatch("path base and direction lengths differ".into()));
        }
        Ok(Self { base, direction })
    }

    /// Coordinates as bivariate series known through `u^k`.
    pub fn coords(&self, k: usize) -> Vec<BivariateSeries> {
        self.base
            .iter()
            .zip(&self.direction)
            .map(|(b, d)| {
                let mut s = BivariateSeries::constant(RatFn::from_poly(b.clone()), k);
                if k >= 1 {
                    s.coeffs[1] = RatFn::from_poly(d.clone());
                }
                s
            })
            .collect()
    }
}

/// A polynomial equation in `x` and `t`: `Σ_j t^j F_j(x)`.
pub fn eval_t_polynomial(parts: &[HomogeneousForm], x: &[BivariateSeries], t: &BivariateSeries) -> BivariateSeries {
    let mut acc = t.zero_like();
    let mut tp = t.one_like();
    for (j, f) in parts.iter().enumerate() {
        if j > 0 {
            tp = tp.mul(t);
        }
        if f.is_zero() {
            continue;
        }
        acc = acc.add(&f.eval(x).mul(&tp));
    }
    acc
}

/// Solve `Σ_j t^j F_j(x(v,u)) = 0` for `t(v,u)` with `t(v,0) = 0`, certified
/// through `u^k`. Newton iteration doubling the certified order each step.
pub fn implicit_series_solve(parts: &[HomogeneousForm], path: &Path, k: usize) -> Result<BivariateSeries> {
    if parts.is_empty() {
        return Err(Error::Invalid("empty family".into()));
    }
    if parts[0].nvars() != path.base.len() {
        return Err(Error::DimensionMismatch("path length differs from number of variables".into()));
    }
    let x = path.coords(k);
    let g0 = parts[0].eval(&x);
    if !g0.coeffs[0].is_zero() {
        return Err(Error::NotOnComponent(format!("F_0(path(v,0)) = {:?}", g0.coeffs[0])));
    }
    let dt0 = match parts.get(1) {
        Some(f1) if !f1.is_zero() => f1.eval(&x).coeffs[0].clone(),
        _ => RatFn::zero(),
    };
    if dt0.is_zero() {
        return Err(Error::DegenerateTransversal);
    }

    let deriv: Vec<HomogeneousForm> = parts
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, f)| f.scale(&Scalar::from_i64(j as i64)))
        .collect();

    let mut t = BivariateSeries::zero(0);
    let mut known = 1usize; // t is certified modulo u^known
    while known < k + 1 {
        let next = (2 * known).min(k + 1);
        let xk: Vec<BivariateSeries> = x.iter().map(|c| c.truncate(next - 1)).collect();
        let mut tk = BivariateSeries::zero(next - 1);
        tk.coeffs[..known].clone_from_slice(&t.coeffs[..known]);
        let g = eval_t_polynomial(parts, &xk, &tk);
        let dg = eval_t_polynomial(&deriv, &xk, &tk);
        let step = g.mul(&dg.invert()?);
        t = tk.sub(&step);
        known = next;
    }
    let residual = eval_t_polynomial(parts, &x, &t);
    if residual.u_order().is_some() {
        return Err(Error::Invalid("Newton iteration left a nonzero residual".into()));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conic_path() -> Path {
        Path::new(
            vec![Poly::from_i64s(&[1]), Poly::from_i64s(&[0, 1]), Poly::from_i64s(&[0, 0, 1])],
            vec![Poly::zero(), Poly::zero(), Poly::one()],
        )
        .unwrap()
    }

    fn form(s: &str) -> HomogeneousForm {
        HomogeneousForm::parse(s, 3).unwrap()
    }

    #[test]
    fn linear_in_t_closed_form() {
        // P + t z^2 = 0  =>  t = -P/z^2 along the path
        let parts = vec![form("x*z - y^2"), form("z^2")];
        let k = 5;
        let t = implicit_series_solve(&parts, &conic_path(), k).unwrap();
        let x = conic_path().coords(k);
        let closed = form("x*z - y^2").eval(&x).mul(&form("z^2").eval(&x).invert().unwrap());
        assert_eq!(t, closed.scale(&Scalar::from_i64(-1)));
        assert!(t.coeff(0).unwrap().is_zero());
    }

    #[test]
    fn cubic_residual_vanishes() {
        let parts = vec![form("x*z^2 - y^2*z"), form("x^3 + y^3 + z^3")];
        let k = 6;
        let t = implicit_series_solve(&parts, &conic_path(), k).unwrap();
        assert!(t.coeff(0).unwrap().is_zero());
        let res = eval_t_polynomial(&parts, &conic_path().coords(k), &t);
        assert_eq!(res.u_order(), None);
        assert_eq!(res.truncation(), k);
    }

    #[test]
    fn degenerate_transversal() {
        let parts = vec![form("x*z - y^2"), HomogeneousForm::zero(3, 2), form("x^2")];
        assert_eq!(implicit_series_solve(&parts, &conic_path(), 4), Err(Error::DegenerateTransversal));
    }

    #[test]
    fn off_component() {
        let parts = vec![form("x*z - 2*y^2"), form("z^2")];
        assert!(matches!(implicit_series_solve(&parts, &conic_path(), 4), Err(Error::NotOnComponent(_))));
    }
}
