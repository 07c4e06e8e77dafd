use serde::Serialize;

use super::limits::{one_ps_limit, Direction};
use crate::algebra::linalg::Matrix;
use crate::algebra::{HomogeneousForm, Poly, Scalar};
use crate::error::{Error, Result};
use crate::numeric::rational_roots;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Stable,
    StrictlySemistable,
    Unstable,
}

impl Verdict {
    fn from_margin(m: i64) -> Self {
        match m.signum() {
            1 => Verdict::Stable,
            0 => Verdict::StrictlySemistable,
            _ => Verdict::Unstable,
        }
    }
}

/// A destabilizing (or balancing) 1-PS: conjugate by `conjugation`, then use
/// diagonal weights `w`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    /// The root `[a:b]` sent to a coordinate point.
    pub root: (Scalar, Scalar),
    pub conjugation: Matrix,
    pub w: Vec<i64>,
    pub nu: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub degree: u32,
    pub max_multiplicity: usize,
    /// Root-multiplicity criterion via squarefree decomposition.
    pub squarefree_verdict: Verdict,
    /// Minimum of `nu` over conjugated diagonal 1-PS; absent when a root is irrational.
    pub one_ps_verdict: Option<Verdict>,
    pub witness: Option<Witness>,
    pub notice: Option<String>,
}

impl StabilityReport {
    pub fn verdict(&self) -> Verdict {
        self.squarefree_verdict
    }

    pub fn oracles_agree(&self) -> bool {
        self.one_ps_verdict.is_none_or(|v| v == self.squarefree_verdict)
    }
}

/// `F(s, 1)` and the multiplicity of the root `[1:0]`.
fn dehomogenize(f: &HomogeneousForm) -> (Poly, usize) {
    let d = f.degree() as usize;
    let mut c = vec![Scalar::zero(); d + 1];
    for (e, a) in f.terms() {
        c[e[0] as usize] = a.clone();
    }
    let p = Poly::new(c);
    let deficit = d - p.degree().unwrap_or(0);
    (p, deficit)
}

/// Yun's squarefree decomposition; returns `(i, P_i)` with `p = c·∏ P_i^i`.
fn squarefree_decomposition(p: &Poly) -> Vec<(usize, Poly)> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let dp = p.derivative();
    let a = Poly::gcd(p, &dp);
    let mut b = p.div_exact(&a).unwrap();
    let c = dp.div_exact(&a).unwrap();
    let mut d = &c - &b.derivative();
    let mut out = Vec::new();
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let ai = Poly::gcd(&b, &d);
        b = b.div_exact(&ai).unwrap();
        let c = d.div_exact(&ai).unwrap();
        d = &c - &b.derivative();
        if ai.degree().unwrap_or(0) > 0 {
            out.push((i, ai));
        }
        i += 1;
    }
    out
}

/// Roots `[a:b]` with multiplicities when all lie in `P^1(Q(i))`, together with
/// `c` such that `F = c·∏(b·x0 − a·x1)^m`.
pub(crate) fn binary_roots(f: &HomogeneousForm) -> Result<Option<(Scalar, Vec<((Scalar, Scalar), usize)>)>> {
    if f.nvars() != 2 || f.is_zero() {
        return Err(Error::Invalid("nonzero binary form expected".into()));
    }
    let (p, inf) = dehomogenize(f);
    let finite = rational_roots(&p);
    let count: usize = finite.iter().map(|r| r.1).sum();
    if count != p.degree().unwrap_or(0) {
        return Ok(None);
    }
    let mut roots = Vec::new();
    let mut lead = p.leading();
    if inf > 0 {
        roots.push(((Scalar::one(), Scalar::zero()), inf));
        if inf % 2 == 1 {
            lead = -lead;
        }
    }
    roots.extend(finite.into_iter().map(|(r, m)| ((r, Scalar::one()), m)));
    Ok(Some((lead, roots)))
}

pub fn binary_form_stability(f: &HomogeneousForm) -> Result<StabilityReport> {
    if f.nvars() != 2 || f.is_zero() {
        return Err(Error::Invalid("nonzero binary form expected".into()));
    }
    let d = f.degree();
    let (p, inf) = dehomogenize(f);
    let max_mult = squarefree_decomposition(&p).iter().map(|(i, _)| *i).max().unwrap_or(0).max(inf);
    let squarefree_verdict = Verdict::from_margin(d as i64 - 2 * max_mult as i64);

    let mut report =
        StabilityReport { degree: d, max_multiplicity: max_mult, squarefree_verdict, one_ps_verdict: None, witness: None, notice: None };

    let finite = rational_roots(&p);
    if finite.iter().map(|r| r.1).sum::<usize>() != p.degree().unwrap_or(0) {
        report.notice = Some("irrational roots present; 1-PS check skipped".into());
        return Ok(report);
    }
    let mut best: Option<Witness> = None;
    let mut candidates: Vec<(Scalar, Scalar, Matrix, Vec<i64>)> = Vec::new();
    if inf > 0 {
        // root [1:0] is x1 = 0; weight (1,-1) pushes towards it
        candidates.push((Scalar::one(), Scalar::zero(), crate::algebra::linalg::identity(2), vec![1, -1]));
    }
    for (r, _) in &finite {
        // x0 ↦ x0 + r·x1 sends the root [r:1] to [0:1]
        let h = vec![vec![Scalar::one(), r.clone()], vec![Scalar::zero(), Scalar::one()]];
        candidates.push((r.clone(), Scalar::one(), h, vec![-1, 1]));
    }
    for (a, b, h, w) in candidates {
        let g = f.linear_substitute(&h)?;
        let (_, nu) = one_ps_limit(&g, &w, Direction::Plus)?;
        if best.as_ref().is_none_or(|x| nu < x.nu) {
            best = Some(Witness { root: (a, b), conjugation: h, w, nu });
        }
    }
    report.one_ps_verdict = Some(Verdict::from_margin(best.as_ref().map_or(d as i64, |w| w.nu)));
    report.witness = best;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary(s: &str) -> HomogeneousForm {
        HomogeneousForm::parse(s, 2).unwrap()
    }

    #[test]
    fn four_distinct_roots() {
        let r = binary_form_stability(&binary("x0^3*x1 - x0*x1^3")).unwrap();
        assert_eq!(r.verdict(), Verdict::Stable);
        assert_eq!(r.one_ps_verdict, Some(Verdict::Stable));
    }

    #[test]
    fn double_double() {
        let r = binary_form_stability(&binary("x0^2*x1^2")).unwrap();
        assert_eq!(r.verdict(), Verdict::StrictlySemistable);
        let w = r.witness.unwrap();
        assert_eq!((w.w, w.nu), (vec![1, -1], 0));
    }

    #[test]
    fn triple_root() {
        let r = binary_form_stability(&binary("x0^3*x1")).unwrap();
        assert_eq!(r.verdict(), Verdict::Unstable);
        assert_eq!(r.one_ps_verdict, Some(Verdict::Unstable));
        assert_eq!(r.witness.unwrap().w, vec![-1, 1]);
    }

    #[test]
    fn irrational_roots_skip_one_ps() {
        let r = binary_form_stability(&binary("x0^4 - 2*x1^4")).unwrap();
        assert_eq!(r.verdict(), Verdict::Stable);
        assert!(r.one_ps_verdict.is_none() && r.notice.is_some());
    }

    #[test]
    fn yun_multiplicities() {
        let l = Poly::from_i64s(&[-1, 1]);
        let m = Poly::from_i64s(&[2, 1]);
        let p = (&l.pow(3) * &m).scale(&Scalar::from_i64(5));
        let sq = squarefree_decomposition(&p);
        assert_eq!(sq.iter().map(|x| x.0).collect::<Vec<_>>(), vec![1, 3]);
    }

}
