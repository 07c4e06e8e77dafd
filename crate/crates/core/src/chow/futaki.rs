use num_complex::Complex64;
use serde::Serialize;

use super::quadrature::chow_number;
use super::{cpoly_mul, CPoly, CurveComponent, HermitianEndomorphism, ParametrizedCycle, PointComponent, QuadratureSpec};
use crate::algebra::{monomials, HomogeneousForm, Scalar};
use crate::arcs::linear_factors_through_point;
use crate::error::{Error, Result};
use crate::numeric::extrapolate_to_zero;

#[derive(Clone, Debug, Serialize)]
pub struct FutakiTerm {
    pub p: u32,
    pub chow: f64,
    /// `p^{-n}·Ch(W_p, A_p)`.
    pub scaled: f64,
    pub error: f64,
    /// Set when `p ≥ deg W`, where the full symmetric power overcounts sections.
    pub beyond_degree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FutakiSequence {
    pub terms: Vec<FutakiTerm>,
    /// Polynomial extrapolation in `1/p` to `p = ∞`.
    pub extrapolated: f64,
    /// Difference from the extrapolation that omits the smallest `p`.
    pub spread: f64,
}

fn weight(w: &[i64], e: &[u32]) -> i64 {
    e.iter().zip(w).map(|(&a, &b)| a as i64 * b).sum()
}

/// Parametrize `V(F)` when it is a union of lines through a coordinate point.
pub fn lines_cycle(f: &HomogeneousForm) -> Result<ParametrizedCycle> {
    if f.nvars() != 3 {
        return Err(Error::UnparametrizableComponent("plane curves only".into()));
    }
    for k in 0..3 {
        if f.terms().any(|(e, _)| e[k] > 0) {
            continue;
        }
        let mut o = vec![Scalar::zero(); 3];
        o[k] = Scalar::one();
        if let Some((_, lines)) = linear_factors_through_point(f, &o)? {
            return ParametrizedCycle::from_linear_factors(&lines);
        }
    }
    Err(Error::UnparametrizableComponent(format!("{} is not a union of rational concurrent lines", f.to_text())))
}

fn veronese(z: &ParametrizedCycle, p: u32) -> ParametrizedCycle {
    let mons = monomials(z.ambient, p);
    let curves = z
        .curves
        .iter()
        .map(|c| {
            let param = mons
                .iter()
                .map(|a| {
                    let mut acc: CPoly = vec![Complex64::new(1.0, 0.0)];
                    for (i, &k) in a.iter().enumerate() {
                        for _ in 0..k {
                            acc = cpoly_mul(&acc, &c.param[i]);
                        }
                    }
                    acc
                })
                .collect();
            CurveComponent { param, mult: c.mult }
        })
        .collect();
    let points = z
        .points
        .iter()
        .map(|pt| PointComponent {
            coords: mons.iter().map(|a| a.iter().zip(&pt.coords).map(|(&k, x)| x.powu(k)).product()).collect(),
            mult: pt.mult,
        })
        .collect();
    ParametrizedCycle { ambient: mons.len(), curves, points }
}

/// Trace-free diagonal action of `t^w` on degree-`p` monomials.
fn induced_action(w: &[i64], p: u32) -> HermitianEndomorphism {
    let ws: Vec<f64> = monomials(w.len(), p).iter().map(|a| weight(w, a) as f64).collect();
    let mean = ws.iter().sum::<f64>() / ws.len() as f64;
    HermitianEndomorphism::diagonal(&ws.iter().map(|x| x - mean).collect::<Vec<_>>())
}

pub fn futaki_sequence(w: &[i64], f0: &HomogeneousForm, p_list: &[u32], spec: &QuadratureSpec) -> Result<FutakiSequence> {
    if w.len() != f0.nvars() {
        return Err(Error::DimensionMismatch("weight vector length".into()));
    }
    let mut ws = f0.terms().map(|(e, _)| weight(w, e));
    let first = ws.next().ok_or_else(|| Error::Invalid("zero form".into()))?;
    if ws.any(|x| x != first) {
        return Err(Error::NotInvariant);
    }
    let cycle = lines_cycle(f0)?;
    futaki_sequence_for_cycle(w, &cycle, f0.degree(), p_list, spec)
}

/// As [`futaki_sequence`] for an explicitly parametrized invariant cycle of degree `d`.
pub fn futaki_sequence_for_cycle(w: &[i64], cycle: &ParametrizedCycle, d: u32, p_list: &[u32], spec: &QuadratureSpec) -> Result<FutakiSequence> {
    if p_list.is_empty() || p_list.contains(&0) {
        return Err(Error::Invalid("powers must be positive".into()));
    }
    let n = cycle.dimension() as i32;
    let mut terms = Vec::new();
    for &p in p_list {
        let a = induced_action(w, p);
        let ch = if a.operator_norm() == 0.0 { None } else { Some(chow_number(&veronese(cycle, p), &a, spec)?) };
        let (chow, error) = ch.map_or((0.0, 0.0), |c| (c.value, c.error));
        terms.push(FutakiTerm { p, chow, scaled: chow / (p as f64).powi(n), error, beyond_degree: p >= d });
    }
    let h: Vec<f64> = terms.iter().map(|t| 1.0 / t.p as f64).collect();
    let f: Vec<f64> = terms.iter().map(|t| t.scaled).collect();
    let extrapolated = extrapolate_to_zero(&h, &f);
    let spread = if f.len() >= 2 { (extrapolated - extrapolate_to_zero(&h[1..], &f[1..])).abs() } else { 0.0 };
    Ok(FutakiSequence { terms, extrapolated, spread })
}

/// Exact `Ch(W_p, A_p)` for `W = V(x^a)`, a union of coordinate lines in `P^2`:
/// each line's Veronese image pushes its measure to the uniform measure on the
/// segment of its endpoint weights.
pub fn weight_oracle(w: &[i64], a: &[u32], p: u32) -> f64 {
    let total: i64 = w.iter().sum();
    let d: u32 = a.iter().sum();
    let avg: f64 = a.iter().zip(w).map(|(&ai, &wi)| ai as f64 * p as f64 * (total - wi) as f64 / 2.0).sum::<f64>() / d as f64;
    avg - p as f64 * total as f64 / w.len() as f64
}
