//! Finite prefixes of a web of descendants and the bracket on `F_b`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use super::family::{ComponentB, PlaneCurveFamily};
use super::record::{descendant, DescendOptions, DescendantRecord};
use crate::algebra::linalg::nullspace;
use crate::algebra::{monomials, Poly, Scalar};
use crate::arcs::{nu_of_arc, ArcInput};
use crate::chow::{psi_upper_bound, weight_oracle, CurveComponent, HermitianEndomorphism, ParametrizedCycle, PsiBound, QuadratureSpec};
use crate::error::{Error, Result};

/// An arc acting on the ambient space of `W′_p`, with the form it acts on.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuppliedArc {
    pub p: u32,
    #[serde(flatten)]
    pub input: ArcInput,
}

fn ser_lower<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if *v == f64::NEG_INFINITY {
        s.serialize_str("-infinity")
    } else {
        s.serialize_f64(*v)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WebTerm {
    pub p: u32,
    pub ratio: f64,
    pub admissible: bool,
    /// `max ψ` over the supplied arcs at this power, `-∞` when there are none.
    #[serde(serialize_with = "ser_lower")]
    pub psi_lower: f64,
    pub probe: Option<PsiBound>,
    pub record: DescendantRecord,
}

#[derive(Clone, Debug, Serialize)]
pub struct Bracket {
    #[serde(serialize_with = "ser_lower")]
    pub lower: f64,
    pub upper: Option<f64>,
    pub label: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct WebPrefix {
    pub base_ratio: f64,
    pub base_admissible: bool,
    pub terms: Vec<WebTerm>,
    pub ratios_nondecreasing: bool,
    /// Per power, `psi_lower ≤ probe value` where both are known.
    pub consistent: Vec<Option<bool>>,
    pub bracket: Bracket,
}

/// `E_ii − I/N` for each `i`, preceded by the trace-free weight endomorphism when nonzero.
pub fn default_probes(weights: &[usize]) -> Vec<HermitianEndomorphism> {
    let n = weights.len();
    let mut out = Vec::new();
    let mean = weights.iter().sum::<usize>() as f64 / n as f64;
    if weights.iter().any(|&w| w as f64 != mean) {
        out.push(HermitianEndomorphism::diagonal(&weights.iter().map(|&w| w as f64 - mean).collect::<Vec<_>>()));
    }
    if n > 1 {
        for i in 0..n {
            out.push(HermitianEndomorphism::diagonal(&(0..n).map(|j| if i == j { 1.0 } else { 0.0 } - 1.0 / n as f64).collect::<Vec<_>>()));
        }
    }
    out
}

fn to_cpoly(p: &Poly) -> Vec<Complex64> {
    p.coeffs().iter().map(Scalar::to_complex).collect()
}

/// The limit cycle as far as it is known exactly: `B′` plus the image of a
/// linear residual that is not collapsed.
pub fn limit_cycle(b: &ComponentB, rec: &DescendantRecord) -> Option<ParametrizedCycle> {
    let mut cyc = ParametrizedCycle::from_exact_curve(rec.curve.coords(), 1);
    match (rec.summary.extra_degree, rec.summary.collapsed_residual) {
        (_, true) | (Some(0), _) => {}
        (Some(_), false) if b.residual.degree() == 1 => {
            let ker = nullspace(&vec![b.residual.to_vector()], 3);
            let line: Vec<Poly> = (0..3).map(|i| Poly::new(vec![ker[0][i].clone(), ker[1][i].clone()])).collect();
            let param = rec.sections.iter().map(|s| if s.mu == 0 { to_cpoly(&s.parts[0].eval(&line)) } else { Vec::new() }).collect();
            cyc.curves.push(CurveComponent { param, mult: 1 });
        }
        _ => return None,
    }
    Some(cyc)
}

pub fn web_prefix(fam: &PlaneCurveFamily, b: &ComponentB, p_list: &[u32], arcs: &[SuppliedArc], opts: &DescendOptions, spec: &QuadratureSpec) -> Result<WebPrefix> {
    if p_list.is_empty() || p_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("p_list must be nonempty and strictly ascending".into()));
    }
    let d = fam.degree();
    let records: Vec<DescendantRecord> = p_list.par_iter().map(|&p| descendant(fam, b, p, opts)).collect::<Result<_>>()?;
    let mut terms = Vec::new();
    for (p, record) in p_list.iter().copied().zip(records) {
        let mut psi_lower = f64::NEG_INFINITY;
        for a in arcs.iter().filter(|a| a.p == p) {
            let form = a.input.form.as_ref().ok_or_else(|| Error::Invalid("supplied arc has no form".into()))?;
            if let Some(psi) = nu_of_arc(&a.input.arc_matrix()?, form)?.psi {
                psi_lower = psi_lower.max(*psi.numer() as f64 / *psi.denom() as f64);
            }
        }
        let probe = match limit_cycle(b, &record) {
            Some(cyc) => {
                let probes = default_probes(&record.filtration.weights);
                if probes.is_empty() { None } else { Some(psi_upper_bound(&cyc, &probes, spec)?) }
            }
            None => None,
        };
        let s = &record.summary;
        terms.push(WebTerm { p, ratio: s.deg_b_prime as f64 / s.deg_w_prime as f64, admissible: 2 * s.deg_b_prime > s.deg_w_prime, psi_lower, probe, record });
    }
    let consistent = terms.iter().map(|t| t.probe.as_ref().filter(|_| t.psi_lower.is_finite()).map(|pr| t.psi_lower <= pr.value + 1e-9)).collect();
    // n = 1, so p^{1-n} = 1
    let lower = terms.iter().map(|t| t.psi_lower).fold(f64::NEG_INFINITY, f64::max);
    let upper = terms.iter().filter_map(|t| t.probe.as_ref().map(|p| p.value)).reduce(f64::max);
    Ok(WebPrefix {
        base_ratio: b.p.degree() as f64 / d as f64,
        base_admissible: 2 * b.p.degree() > d,
        ratios_nondecreasing: terms.windows(2).all(|w| w[0].ratio <= w[1].ratio),
        consistent,
        terms,
        bracket: Bracket { lower, upper, label: "bracket over the computed prefix only; the limsup is not computed" },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivariantTerm {
    pub p: u32,
    pub norm: f64,
    pub nu: f64,
    /// `p^{-1}·ν(W_p)/‖A_p‖`.
    pub scaled: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivariantCheck {
    pub terms: Vec<EquivariantTerm>,
    /// `‖A_p‖ = p‖A_1‖` exactly for every `p`.
    pub norm_scaling: bool,
    pub scaled_constant: bool,
}

/// Exact `N·max|weight|` of the trace-free action induced on degree-`p` monomials.
fn scaled_norm(w: &[i64], p: u32) -> i64 {
    let n = w.len() as i64;
    let total: i64 = w.iter().sum();
    let wf: Vec<i64> = w.iter().map(|&x| n * x - total).collect();
    monomials(w.len(), p).iter().map(|m| m.iter().zip(&wf).map(|(&a, &x)| a as i64 * x).sum::<i64>().abs()).max().unwrap_or(0)
}

/// For `W = V(x^a)` under the weights `w`: the Chow weight of `W_p` from the
/// exact oracle against `‖A_p‖`.
pub fn equivariant_cross_check(w: &[i64], a: &[u32], p_list: &[u32]) -> EquivariantCheck {
    let n = w.len() as f64;
    let d: u32 = a.iter().sum();
    let n1 = scaled_norm(w, 1);
    let terms: Vec<EquivariantTerm> = p_list
        .iter()
        .map(|&p| {
            let norm = scaled_norm(w, p) as f64 / n;
            let nu = (p * d) as f64 * weight_oracle(w, a, p);
            EquivariantTerm { p, norm, nu, scaled: nu / (p as f64 * norm) }
        })
        .collect();
    let first = terms.first().map_or(0.0, |t| t.scaled);
    EquivariantCheck {
        norm_scaling: p_list.iter().all(|&p| scaled_norm(w, p) == p as i64 * n1),
        scaled_constant: terms.iter().all(|t| (t.scaled - first).abs() <= 1e-12 * (1.0 + first.abs())),
        terms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::HomogeneousForm;

    fn form(s: &str) -> HomogeneousForm {
        HomogeneousForm::parse(s, 3).unwrap()
    }

    #[test]
    fn worked_prefix() {
        let fam = PlaneCurveFamily::new(vec![form("x^2*z - x*z^2 - x*y^2 + y^2*z"), form("x^3 + y^3 + z^3")]).unwrap();
        let b = ComponentB::new(&fam, form("x*z - y^2"), vec![Poly::from_i64s(&[1]), Poly::from_i64s(&[0, 1]), Poly::from_i64s(&[0, 0, 1])], vec![Scalar::zero(), Scalar::zero(), Scalar::one()]).unwrap();
        let opts = DescendOptions { samples: 0, ..Default::default() };
        let web = web_prefix(&fam, &b, &[1, 2], &[], &opts, &QuadratureSpec::default()).unwrap();
        assert!(web.base_admissible && web.terms.iter().all(|t| t.admissible));
        assert!(web.ratios_nondecreasing);
        assert_eq!(web.bracket.lower, f64::NEG_INFINITY);
        assert!(web.bracket.upper.is_some_and(f64::is_finite));
    }

    #[test]
    fn equivariant_norms() {
        let c = equivariant_cross_check(&[1, 1, -2], &[0, 1, 0], &[1, 2, 3, 4]);
        assert!(c.norm_scaling && c.scaled_constant);
    }
}
