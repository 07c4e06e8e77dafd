use std::collections::BTreeMap;

use num_rational::Rational64;
use serde::Serialize;

use super::{smith_factorize, ArcMatrix, EXACT};
use crate::algebra::form::Exponent;
use crate::algebra::ring::Ring;
use crate::algebra::{monomials, HomogeneousForm, Scalar, TruncatedSeries, Var};
use crate::error::{Error, Result};

/// Polynomial with truncated-series coefficients; absent monomials are exactly zero.
#[derive(Clone, Debug)]
struct SeriesPoly {
    nvars: usize,
    terms: BTreeMap<Exponent, TruncatedSeries>,
}

impl Ring for SeriesPoly {
    fn zero_like(&self) -> Self {
        Self { nvars: self.nvars, terms: BTreeMap::new() }
    }
    fn one_like(&self) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; self.nvars], TruncatedSeries::one(Var::T, EXACT));
        Self { nvars: self.nvars, terms }
    }
    fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (e, c) in &o.terms {
            let v = match terms.get(e) {
                Some(a) => a + c,
                None => c.clone(),
            };
            terms.insert(e.clone(), v);
        }
        Self { nvars: self.nvars, terms }
    }
    fn mul(&self, o: &Self) -> Self {
        let mut out = self.zero_like();
        for (ea, a) in &self.terms {
            for (eb, b) in &o.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let p = a * b;
                let v = match out.terms.get(&e) {
                    Some(c) => c + &p,
                    None => p,
                };
                out.terms.insert(e, v);
            }
        }
        out
    }
    fn scale(&self, c: &Scalar) -> Self {
        Self { nvars: self.nvars, terms: self.terms.iter().map(|(e, s)| (e.clone(), s.scale(c))).collect() }
    }
}

/// Coefficients of `F(g(t)^{-1} x)` in the monomial basis (lex-decreasing order).
pub fn act_arc_on_form(g: &ArcMatrix, f: &HomogeneousForm) -> Result<Vec<TruncatedSeries>> {
    let q = g.q();
    if f.nvars() != q {
        return Err(Error::DimensionMismatch(format!("arc of size {q} acting on a form in {} variables", f.nvars())));
    }
    let ginv = g.inverse()?;
    let lins: Vec<SeriesPoly> = (0..q)
        .map(|i| {
            let terms = (0..q)
                .map(|j| {
                    let mut e = vec![0; q];
                    e[j] = 1;
                    (e, ginv.entry(i, j).clone())
                })
                .collect();
            SeriesPoly { nvars: q, terms }
        })
        .collect();
    let out = f.eval(&lins);
    let floor = out.terms.values().map(TruncatedSeries::truncation).min().unwrap_or(g.truncation());
    Ok(monomials(q, f.degree())
        .into_iter()
        .map(|e| out.terms.get(&e).cloned().unwrap_or_else(|| TruncatedSeries::zero(Var::T, floor)))
        .collect())
}

/// Pole order of a coefficient vector: `max(−valuation)`, certified against
/// coefficients that are zero only to their truncation.
pub(crate) fn pole_order(coeffs: &[TruncatedSeries]) -> Result<i64> {
    let nu = coeffs
        .iter()
        .filter_map(TruncatedSeries::valuation)
        .map(|v| -v)
        .max()
        .ok_or_else(|| Error::InsufficientTruncation("every coefficient is zero to truncation".into()))?;
    if coeffs.iter().any(|c| c.is_zero() && -c.prec() > nu) {
        return Err(Error::InsufficientTruncation("an uncertified coefficient could dominate the pole order".into()));
    }
    Ok(nu)
}

/// Flat limit of `g(t)·F` as `t → 0`: the coefficient of `t^{−ν}`, with `ν`.
pub fn flat_limit(g: &ArcMatrix, f: &HomogeneousForm) -> Result<(HomogeneousForm, i64)> {
    let coeffs = act_arc_on_form(g, f)?;
    let nu = pole_order(&coeffs)?;
    let lead: Vec<Scalar> = coeffs
        .iter()
        .map(|c| c.coeff(-nu).ok_or_else(|| Error::InsufficientTruncation("leading coefficient not certified".into())))
        .collect::<Result<_>>()?;
    Ok((HomogeneousForm::from_vector(f.nvars(), f.degree(), &lead), nu))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArcInvariants {
    pub nu: i64,
    pub norm: i64,
    /// `nu / norm`; absent for arcs of norm zero.
    #[serde(serialize_with = "ser_ratio")]
    pub psi: Option<Rational64>,
    pub trace: i64,
    pub weights: Vec<i64>,
}

fn ser_ratio<S: serde::Serializer>(r: &Option<Rational64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
        None => s.serialize_none(),
    }
}

pub fn nu_of_arc(g: &ArcMatrix, f: &HomogeneousForm) -> Result<ArcInvariants> {
    let nu = pole_order(&act_arc_on_form(g, f)?)?;
    let fac = smith_factorize(g)?;
    let norm = fac.flag.norm();
    let psi = (norm > 0).then(|| Rational64::new(nu, norm));
    Ok(ArcInvariants { nu, norm, psi, trace: fac.weight_sum(), weights: fac.weights })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(rows: &[&[&str]]) -> ArcMatrix {
        let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
        ArcMatrix::parse(&rows, 10).unwrap()
    }

    fn binary(s: &str) -> HomogeneousForm {
        HomogeneousForm::parse(s, 2).unwrap()
    }

    fn series(s: &str) -> TruncatedSeries {
        TruncatedSeries::parse(s, Var::T, 10).unwrap()
    }

    #[test]
    fn identity_gives_constants() {
        let f = binary("x0^2 + 3*x0*x1 - x1^2");
        let v = act_arc_on_form(&ArcMatrix::identity(2, 10), &f).unwrap();
        assert!(v.iter().all(|c| c.valuation().is_none_or(|e| e == 0) && c.terms().count() <= 1));
        assert_eq!(v[1].leading_coeff(), Some(&Scalar::from_i64(3)));
    }

    #[test]
    fn diagonal_action() {
        let g = arc(&[&["t", "0"], &["0", "t^-1"]]);
        let v = act_arc_on_form(&g, &binary("x0^2")).unwrap();
        assert_eq!(v[0].valuation(), Some(-2));
        assert_eq!(v[0].leading_coeff(), Some(&Scalar::one()));
        assert!(v[1].is_zero() && v[2].is_zero());
    }

    #[test]
    fn unipotent_action() {
        let g = arc(&[&["1", "0"], &["t^-1", "1"]]);
        let v = act_arc_on_form(&g, &binary("x1^2")).unwrap();
        assert!((&v[0] - &series("t^-2")).is_zero());
        assert!((&v[1] - &series("-2*t^-1")).is_zero());
        assert!((&v[2] - &series("1")).is_zero());
    }

    #[test]
    fn limit_of_unipotent_arc() {
        let g = arc(&[&["1", "0"], &["t^-1", "1"]]);
        let (l, nu) = flat_limit(&g, &binary("x1^2")).unwrap();
        assert_eq!((l, nu), (binary("x0^2"), 2));
    }

    #[test]
    fn invariants_of_diagonal_arc() {
        let g = arc(&[&["t", "0"], &["0", "t^-1"]]);
        let a = nu_of_arc(&g, &binary("x0*x1")).unwrap();
        assert_eq!((a.nu, a.norm, a.psi), (0, 1, Some(Rational64::from_integer(0))));
        let b = nu_of_arc(&g, &binary("x0^2")).unwrap();
        assert_eq!((b.nu, b.psi), (2, Some(Rational64::from_integer(2))));
        let c = nu_of_arc(&g, &binary("7/3*x0^2")).unwrap();
        assert_eq!(c.nu, 2);
    }
}
