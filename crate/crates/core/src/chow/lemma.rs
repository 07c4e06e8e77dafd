use serde::Serialize;

use super::quadrature::{chow_number, integrate};
use super::{HermitianEndomorphism, ParametrizedCycle, QuadratureSpec};
use crate::algebra::HomogeneousForm;
use crate::arcs::{nu_of_arc, smith_factorize, ArcMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct Lemma1Report {
    pub nu: i64,
    pub weights: Vec<i64>,
    /// `⟨M(y), iA⟩` for the hypersurface point `y`, normalized so that a
    /// torus-fixed monomial hypersurface pairs to its weight.
    pub pairing: f64,
    pub margin: f64,
    pub quadrature_error: f64,
}

/// Compare the pole order of `g` on `F` with the moment-map pairing at the
/// limit cycle, using the self-adjoint endomorphism compatible with the flag of `g`.
///
/// For a hypersurface `Y ⊂ P^n` of degree `d` the pairing is `d·Tr A − n·∫_Y H dμ`.
pub fn lemma1_check(g: &ArcMatrix, f: &HomogeneousForm, limit_cycle: &ParametrizedCycle, spec: &QuadratureSpec) -> Result<Lemma1Report> {
    let q = g.q();
    if !(2..=3).contains(&q) || limit_cycle.ambient != q {
        return Err(Error::DimensionMismatch("binary forms and plane curves only".into()));
    }
    let inv = nu_of_arc(g, f)?;
    let fac = smith_factorize(g)?;
    let a = HermitianEndomorphism::compatible_with_flag(&fac.flag)?;
    let integral = integrate(limit_cycle, &a, spec)?;
    let d = f.degree() as f64;
    if (integral.volume - d).abs() > 1e-6 * d {
        return Err(Error::Invalid(format!("limit cycle has volume {} but the form has degree {d}", integral.volume)));
    }
    let n = (q - 1) as f64;
    let pairing = d * a.trace() - n * integral.h_integral;
    Ok(Lemma1Report {
        nu: inv.nu,
        weights: fac.weights,
        pairing,
        margin: pairing - inv.nu as f64,
        quadrature_error: n * integral.error,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeValue {
    pub chow: f64,
    pub norm: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PsiBound {
    /// `Vol(Y) · max Ch(Y,A)/‖A‖` over the probes only.
    pub value: f64,
    pub volume: f64,
    pub probes: Vec<ProbeValue>,
    pub label: &'static str,
}

pub fn psi_upper_bound(y: &ParametrizedCycle, probes: &[HermitianEndomorphism], spec: &QuadratureSpec) -> Result<PsiBound> {
    if probes.is_empty() {
        return Err(Error::Invalid("no probe endomorphisms".into()));
    }
    let mut vals = Vec::new();
    let mut volume = 0.0;
    for a in probes {
        if a.trace_free().operator_norm() < 1e-12 {
            return Err(Error::Invalid("scalar probe endomorphism".into()));
        }
        let ch = chow_number(y, a, spec)?;
        volume = ch.volume;
        let norm = a.operator_norm();
        vals.push(ProbeValue { chow: ch.value, norm, ratio: ch.value / norm });
    }
    let best = vals.iter().map(|v| v.ratio).fold(f64::NEG_INFINITY, f64::max);
    Ok(PsiBound { value: volume * best, volume, probes: vals, label: "probe-restricted upper-bound value" })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn coordinate_line_bound() {
        let line = ParametrizedCycle::curve(vec![vec![c(1.0)], vec![c(0.0), c(1.0)], vec![]], 1);
        let a = HermitianEndomorphism::diagonal(&[1.0, 1.0, -2.0]);
        let spec = QuadratureSpec::default();
        let b = psi_upper_bound(&line, &[a.clone()], &spec).unwrap();
        assert!((b.value - 0.5).abs() < 1e-10);
        let b2 = psi_upper_bound(&line, &[a.clone(), a.scaled(2.0)], &spec).unwrap();
        assert!((b2.probes[0].ratio - b2.probes[1].ratio).abs() < 1e-12);
    }

    #[test]
    fn equivariant_conic_equality() {
        // xz − y² + x² under diag(t, 1/t, 1): limit x², a doubled line
        let f = HomogeneousForm::parse("x*z - y^2 + x^2", 3).unwrap();
        let g = ArcMatrix::diagonal_powers(&[1, -1, 0], 8);
        let limit = ParametrizedCycle::curve(vec![vec![], vec![c(1.0)], vec![c(0.0), c(1.0)]], 2);
        let r = lemma1_check(&g, &f, &limit, &QuadratureSpec::default()).unwrap();
        assert_eq!(r.nu, 2);
        assert!(r.margin.abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn identity_arc() {
        let f = HomogeneousForm::parse("x0*x1", 2).unwrap();
        let y = ParametrizedCycle {
            ambient: 2,
            curves: vec![],
            points: vec![
                super::super::PointComponent { coords: vec![c(1.0), c(0.0)], mult: 1 },
                super::super::PointComponent { coords: vec![c(0.0), c(1.0)], mult: 1 },
            ],
        };
        let r = lemma1_check(&ArcMatrix::identity(2, 6), &f, &y, &QuadratureSpec::default()).unwrap();
        assert_eq!(r.nu, 0);
        assert!(r.margin >= -1e-12);
    }
}
