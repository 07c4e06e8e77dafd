use serde::Serialize;

use super::curve::RationalCurve;
use crate::algebra::dense2::{resultant_y, Dense2};
use crate::algebra::linalg::{determinant, inverse};
use crate::algebra::{linear_solve_exact, monomials, HomogeneousForm, LinearSolution, Poly, Scalar};
use crate::error::{Error, Result};

/// Record of the smoothness test on one nonzero fibre.
#[derive(Clone, Debug, Serialize)]
pub struct SmoothFibre {
    pub t: Scalar,
    pub smooth: bool,
}

/// `F = Σ_j t^j F_j` with all `F_j` plane forms of one degree.
#[derive(Clone, Debug, Serialize)]
pub struct PlaneCurveFamily {
    pub parts: Vec<HomogeneousForm>,
    pub sampled_fibre: SmoothFibre,
}

impl PlaneCurveFamily {
    pub fn new(parts: Vec<HomogeneousForm>) -> Result<Self> {
        let Some(f0) = parts.first() else { return Err(Error::Invalid("empty family".into())) };
        if f0.is_zero() {
            return Err(Error::Invalid("central fibre F_0 is zero".into()));
        }
        let d = f0.degree();
        if parts.iter().any(|f| f.nvars() != 3 || (f.degree() != d && !f.is_zero())) {
            return Err(Error::DimensionMismatch("family parts must be plane forms of one degree".into()));
        }
        let parts: Vec<HomogeneousForm> = parts.into_iter().map(|f| if f.is_zero() { HomogeneousForm::zero(3, d) } else { f }).collect();
        let mut fam = Self { parts, sampled_fibre: SmoothFibre { t: Scalar::zero(), smooth: false } };
        for t in [Scalar::from_ratio(1, 2), Scalar::from_ratio(1, 3), Scalar::from_ratio(2, 7), Scalar::from_i64(3)] {
            if plane_curve_is_smooth(&fam.fibre(&t)) {
                fam.sampled_fibre = SmoothFibre { t, smooth: true };
                return Ok(fam);
            }
        }
        Err(Error::Invalid("sampled nonzero fibres are singular".into()))
    }

    pub fn degree(&self) -> u32 {
        self.parts[0].degree()
    }

    pub fn central(&self) -> &HomogeneousForm {
        &self.parts[0]
    }

    pub fn fibre(&self, t: &Scalar) -> HomogeneousForm {
        let mut acc = HomogeneousForm::zero(3, self.degree());
        let mut tp = Scalar::one();
        for f in &self.parts {
            acc = acc.add(&f.scale(&tp)).expect("same ring");
            tp = &tp * t;
        }
        acc
    }

    /// `h^0(V_t, O(k))` for a smooth plane curve of degree `d`.
    pub fn sections(&self, k: u32) -> usize {
        let d = self.degree() as i64;
        let k = k as i64;
        let c2 = |n: i64| if n < 0 { 0 } else { ((n + 2) * (n + 1) / 2) as usize };
        c2(k) - c2(k - d)
    }
}

/// `f / g` when `g` divides `f`.
pub fn divide_form(f: &HomogeneousForm, g: &HomogeneousForm) -> Result<Option<HomogeneousForm>> {
    if g.degree() > f.degree() {
        return Ok(None);
    }
    let mons = monomials(f.nvars(), f.degree() - g.degree());
    let target = monomials(f.nvars(), f.degree());
    let cols: Vec<Vec<Scalar>> = mons.iter().map(|m| g.mul(&HomogeneousForm::monomial(m.clone(), Scalar::one())).map(|h| h.to_vector())).collect::<Result<_>>()?;
    let a: Vec<Vec<Scalar>> = (0..target.len()).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
    match linear_solve_exact(&a, &f.to_vector(), mons.len())? {
        LinearSolution::Solved { particular, .. } => Ok(Some(HomogeneousForm::from_vector(f.nvars(), f.degree() - g.degree(), &particular))),
        LinearSolution::Inconsistent => Ok(None),
    }
}

fn affine_dense(f: &HomogeneousForm) -> Dense2 {
    let mut out = Dense2::zero();
    for (e, c) in f.terms() {
        out.add_term(e[0] as usize, e[1] as usize, c);
    }
    out
}

/// No singular point of `V(F)` lies off the line `z = 0`, tested with
/// `gcd(Res_y(F_x, F_y), Res_y(F, F_x))` after dehomogenizing.
fn affine_chart_smooth(f: &HomogeneousForm) -> Option<bool> {
    let d = f.degree() as usize;
    let fx = f.derivative(0);
    let fy = f.derivative(1);
    let (a, ax, ay) = (affine_dense(f), affine_dense(&fx), affine_dense(&fy));
    if a.y_degree() != d || ax.y_degree() + 1 != d || ay.y_degree() + 1 != d {
        return None;
    }
    let g = Poly::gcd(&resultant_y(&ax, &ay), &resultant_y(&a, &ax));
    Some(g.is_constant())
}

/// Exact smoothness test via three coordinate charts whose lines at infinity
/// are not concurrent.
pub fn plane_curve_is_smooth(f: &HomogeneousForm) -> bool {
    if f.degree() <= 1 {
        return !f.is_zero();
    }
    let mats: Vec<Vec<Vec<Scalar>>> = (0..12)
        .map(|k| {
            let a = |i: i64| Scalar::from_i64(((k * 5 + i * 3) % 7) - 3);
            vec![vec![Scalar::one(), a(1), a(2)], vec![a(3), Scalar::one(), a(4)], vec![a(5), a(6), Scalar::from_i64(2)]]
        })
        .filter(|m| !determinant(m).is_zero())
        .collect();
    let mut lines: Vec<Vec<Scalar>> = Vec::new();
    let mut checked = 0;
    let mut failures = 0;
    for m in &mats {
        let row = inverse(m).expect("invertible")[2].clone();
        let mut with = lines.clone();
        with.push(row.clone());
        if crate::algebra::linalg::rank(&with) < with.len() {
            continue;
        }
        let g = f.linear_substitute(m).expect("square substitution");
        match affine_chart_smooth(&g) {
            Some(true) => {
                lines.push(row);
                checked += 1;
                if checked == 3 {
                    return true;
                }
            }
            Some(false) => {
                failures += 1;
                if failures >= 3 {
                    return false;
                }
            }
            None => {}
        }
    }
    false
}

/// The component `B = V(P)` of the central fibre with its parametrization and transversal.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentB {
    #[serde(rename = "P")]
    pub p: HomogeneousForm,
    #[serde(serialize_with = "ser_polys")]
    pub param: Vec<Poly>,
    pub transversal: Vec<Scalar>,
    /// `F_0 / P`.
    pub residual: HomogeneousForm,
}

fn ser_polys<S: serde::Serializer>(p: &[Poly], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(p.len()))?;
    for q in p {
        seq.serialize_element(&q.to_string_in("v"))?;
    }
    seq.end()
}

impl ComponentB {
    pub fn new(fam: &PlaneCurveFamily, p: HomogeneousForm, param: Vec<Poly>, transversal: Vec<Scalar>) -> Result<Self> {
        if param.len() != 3 || transversal.len() != 3 || p.nvars() != 3 {
            return Err(Error::DimensionMismatch("plane component needs three coordinates".into()));
        }
        let residual = divide_form(fam.central(), &p)?.ok_or_else(|| Error::Invalid(format!("{} does not divide F_0", p.to_text())))?;
        let on_b = |f: &HomogeneousForm| f.eval(&param);
        if !on_b(&p).is_zero() {
            return Err(Error::NotOnComponent("P(b(v)) is not identically zero".into()));
        }
        if on_b(&residual).is_zero() {
            return Err(Error::Invalid("P has multiplicity > 1 in F_0".into()));
        }
        let curve = RationalCurve::from_polys(param.clone())?;
        if curve.degree() != p.degree() as usize || curve.map_degree() != 1 {
            return Err(Error::Invalid("parametrization is not birational onto B".into()));
        }
        if fam.parts.get(1).is_none_or(|f1| on_b(f1).is_zero()) {
            return Err(Error::DegenerateTransversal);
        }
        let dw: Poly = (0..3).fold(Poly::zero(), |acc, i| &acc + &on_b(&p.derivative(i)).scale(&transversal[i]));
        if dw.is_zero() {
            return Err(Error::DegenerateTransversal);
        }
        Ok(Self { p, param, transversal, residual })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(s: &str) -> HomogeneousForm {
        HomogeneousForm::parse(s, 3).unwrap()
    }

    #[test]
    fn smoothness() {
        assert!(plane_curve_is_smooth(&form("x^3 + y^3 + z^3")));
        assert!(plane_curve_is_smooth(&form("x*z - y^2")));
        assert!(!plane_curve_is_smooth(&form("y^2*z - x^3 - x^2*z")));
        assert!(!plane_curve_is_smooth(&form("x*y")));
        // node at [0:0:1] only, i.e. not at a point of z = 0
        assert!(!plane_curve_is_smooth(&form("x*y*z + x^3 + y^3")));
    }

    #[test]
    fn division() {
        let f = form("x^2*z - x*z^2 - x*y^2 + y^2*z");
        assert_eq!(divide_form(&f, &form("x*z - y^2")).unwrap().unwrap(), form("x - z"));
        assert!(divide_form(&f, &form("x + y")).unwrap().is_none());
    }

    #[test]
    fn worked_family_is_valid() {
        let fam = PlaneCurveFamily::new(vec![form("x^2*z - x*z^2 - x*y^2 + y^2*z"), form("x^3 + y^3 + z^3")]).unwrap();
        assert!(fam.sampled_fibre.smooth);
        assert_eq!(fam.sections(2), 6);
        assert_eq!(fam.sections(4), 12);
        let b = ComponentB::new(&fam, form("x*z - y^2"), vec![Poly::from_i64s(&[1]), Poly::from_i64s(&[0, 1]), Poly::from_i64s(&[0, 0, 1])], vec![Scalar::zero(), Scalar::zero(), Scalar::one()]).unwrap();
        assert_eq!(b.residual, form("x - z"));
    }
}
