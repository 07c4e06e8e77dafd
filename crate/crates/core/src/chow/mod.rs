//! Fubini–Study quadrature on parametrized cycles: Hamiltonians, Chow numbers,
//! monotonicity scans, the moment-map pairing bound and Futaki sequences.

mod futaki;
mod lemma;
mod quadrature;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::linalg::{nullspace, Matrix};
use crate::algebra::{HomogeneousForm, Poly, Scalar};
use crate::arcs::WeightedFlag;
use crate::error::{Error, Result};

pub use futaki::{futaki_sequence, futaki_sequence_for_cycle, lines_cycle, weight_oracle, FutakiSequence, FutakiTerm};
pub use lemma::{lemma1_check, psi_upper_bound, Lemma1Report, PsiBound};
pub use quadrature::{chow_number, hamiltonian, integrate, monotonicity_scan, ChartIntegral, ChowValue, CycleIntegral, ScanResult};

/// A self-adjoint endomorphism of `C^q`.
#[derive(Clone, Debug)]
pub struct HermitianEndomorphism {
    m: DMatrix<Complex64>,
    exact: Option<Matrix>,
}

impl HermitianEndomorphism {
    pub fn from_complex(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch("endomorphism must be square".into()));
        }
        let scale = m.iter().map(|x| x.norm()).fold(1.0, f64::max);
        if (&m - m.adjoint()).iter().any(|x| x.norm() > 1e-12 * scale) {
            return Err(Error::Invalid("endomorphism is not self-adjoint".into()));
        }
        Ok(Self { m, exact: None })
    }

    pub fn from_exact(a: &Matrix) -> Result<Self> {
        let q = a.len();
        if a.iter().any(|r| r.len() != q) {
            return Err(Error::DimensionMismatch("endomorphism must be square".into()));
        }
        for i in 0..q {
            for j in 0..q {
                if a[i][j] != a[j][i].conj() {
                    return Err(Error::Invalid("endomorphism is not self-adjoint".into()));
                }
            }
        }
        let m = DMatrix::from_fn(q, q, |i, j| a[i][j].to_complex());
        Ok(Self { m, exact: Some(a.clone()) })
    }

    pub fn diagonal(w: &[f64]) -> Self {
        let q = w.len();
        Self { m: DMatrix::from_fn(q, q, |i, j| if i == j { Complex64::new(w[i], 0.0) } else { Complex64::new(0.0, 0.0) }), exact: None }
    }

    pub fn diagonal_exact(w: &[Scalar]) -> Self {
        let q = w.len();
        let a: Matrix = (0..q).map(|i| (0..q).map(|j| if i == j { w[i].clone() } else { Scalar::zero() }).collect()).collect();
        Self::from_exact(&a).expect("real diagonal is self-adjoint")
    }

    /// The unique self-adjoint `A` whose eigenspaces are the successive
    /// orthogonal complements `U_i ⊖ U_{i−1}` of the flag, with eigenvalue `λ_i`.
    pub fn compatible_with_flag(flag: &WeightedFlag) -> Result<Self> {
        let q = flag.dim();
        let mut ortho: Vec<Vec<Scalar>> = Vec::new();
        let mut a: Matrix = vec![vec![Scalar::zero(); q]; q];
        for (lam, basis) in flag.weights.iter().zip(&flag.subspaces) {
            let lam = Scalar::from_i64(*lam);
            for v in basis {
                // exact Gram–Schmidt against the vectors already placed
                let mut u = v.clone();
                for o in &ortho {
                    let c = &herm(o, &u) / &herm(o, o);
                    for (x, y) in u.iter_mut().zip(o) {
                        *x -= &(&c * y);
                    }
                }
                if u.iter().all(Scalar::is_zero) {
                    continue;
                }
                let n = herm(&u, &u);
                for i in 0..q {
                    for j in 0..q {
                        let t = &(&(&u[i] * &u[j].conj()) * &lam) / &n;
                        a[i][j] += &t;
                    }
                }
                ortho.push(u);
            }
        }
        if ortho.len() != q {
            return Err(Error::RankDeficient { rank: ortho.len(), expected: q });
        }
        Self::from_exact(&a)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn exact(&self) -> Option<&Matrix> {
        self.exact.as_ref()
    }

    pub fn trace(&self) -> f64 {
        self.m.diagonal().iter().map(|x| x.re).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(self.m.clone()).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    /// Largest `|eigenvalue|`.
    pub fn operator_norm(&self) -> f64 {
        self.eigenvalues().iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    pub fn trace_free(&self) -> Self {
        let c = self.trace() / self.dim() as f64;
        let m = &self.m - DMatrix::from_diagonal_element(self.dim(), self.dim(), Complex64::new(c, 0.0));
        Self { m, exact: None }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { m: &self.m * Complex64::new(s, 0.0), exact: None }
    }

    /// `e^{sA}` through the eigendecomposition.
    pub fn exp(&self, s: f64) -> DMatrix<Complex64> {
        let eig = SymmetricEigen::new(self.m.clone());
        let v = &eig.eigenvectors;
        let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new((l * s).exp(), 0.0)));
        v * d * v.adjoint()
    }
}

fn herm(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter().zip(b).fold(Scalar::zero(), |acc, (x, y)| &acc + &(&x.conj() * y))
}

/// Polynomial with complex coefficients, lowest degree first.
pub type CPoly = Vec<Complex64>;

pub(crate) fn cpoly_mul(a: &CPoly, b: &CPoly) -> CPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// A rational curve `u ↦ [φ_0(u) : ... : φ_N(u)]` counted with multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveComponent {
    pub param: Vec<CPoly>,
    pub mult: u32,
}

impl CurveComponent {
    /// Degree of the parametrization (largest coordinate degree).
    pub fn degree(&self) -> usize {
        self.param.iter().map(|p| p.iter().rposition(|c| c.norm() != 0.0).unwrap_or(0)).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointComponent {
    pub coords: Vec<Complex64>,
    pub mult: u32,
}

/// An algebraic cycle of dimension one (or zero) given by parametrizations.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametrizedCycle {
    /// Number of homogeneous coordinates `N + 1`.
    pub ambient: usize,
    pub curves: Vec<CurveComponent>,
    pub points: Vec<PointComponent>,
}

impl ParametrizedCycle {
    pub fn curve(param: Vec<CPoly>, mult: u32) -> Self {
        Self { ambient: param.len(), curves: vec![CurveComponent { param, mult }], points: Vec::new() }
    }

    pub fn point(coords: Vec<Complex64>, mult: u32) -> Self {
        Self { ambient: coords.len(), curves: Vec::new(), points: vec![PointComponent { coords, mult }] }
    }

    pub fn from_exact_curve(param: &[Poly], mult: u32) -> Self {
        Self::curve(param.iter().map(|p| p.coeffs().iter().map(Scalar::to_complex).collect()).collect(), mult)
    }

    /// Union of lines in `P^N` given by linear forms (for `N = 2`) or point
    /// sets (for `N = 1`); repeated factors add multiplicity.
    pub fn from_linear_factors(factors: &[HomogeneousForm]) -> Result<Self> {
        let n = factors.first().map(HomogeneousForm::nvars).ok_or_else(|| Error::Invalid("no factors".into()))?;
        let mut cyc = Self { ambient: n, curves: Vec::new(), points: Vec::new() };
        for l in factors {
            if l.degree() != 1 || l.nvars() != n {
                return Err(Error::UnparametrizableComponent(format!("{} is not linear", l.to_text())));
            }
            let ker = nullspace(&vec![l.to_vector()], n);
            let to_c = |v: &Vec<Scalar>| -> Vec<Complex64> { v.iter().map(Scalar::to_complex).collect() };
            match ker.len() {
                1 => cyc.add_point(to_c(&ker[0]), 1),
                2 => {
                    let (p, q) = (to_c(&ker[0]), to_c(&ker[1]));
                    cyc.add_curve((0..n).map(|i| vec![p[i], q[i]]).collect(), 1);
                }
                k => return Err(Error::UnparametrizableComponent(format!("linear space of dimension {k}"))),
            }
        }
        Ok(cyc)
    }

    fn add_curve(&mut self, param: Vec<CPoly>, mult: u32) {
        if let Some(c) = self.curves.iter_mut().find(|c| c.param == param) {
            c.mult += mult;
        } else {
            self.curves.push(CurveComponent { param, mult });
        }
    }

    fn add_point(&mut self, coords: Vec<Complex64>, mult: u32) {
        if let Some(p) = self.points.iter_mut().find(|p| p.coords == coords) {
            p.mult += mult;
        } else {
            self.points.push(PointComponent { coords, mult });
        }
    }

    /// Algebraic degree `Σ m·deg`.
    pub fn degree(&self) -> usize {
        self.curves.iter().map(|c| c.mult as usize * c.degree()).sum::<usize>() + self.points.iter().map(|p| p.mult as usize).sum::<usize>()
    }

    pub fn dimension(&self) -> usize {
        usize::from(!self.curves.is_empty())
    }

    /// Image under a linear map of `C^{N+1}`.
    pub fn transform(&self, g: &DMatrix<Complex64>) -> Self {
        let n = self.ambient;
        let curves = self
            .curves
            .iter()
            .map(|c| {
                let len = c.param.iter().map(Vec::len).max().unwrap_or(0);
                let param = (0..n)
                    .map(|i| {
                        (0..len)
                            .map(|k| (0..n).map(|j| g[(i, j)] * c.param[j].get(k).copied().unwrap_or_default()).sum())
                            .collect()
                    })
                    .collect();
                CurveComponent { param, mult: c.mult }
            })
            .collect();
        let points = self
            .points
            .iter()
            .map(|p| PointComponent { coords: (0..n).map(|i| (0..n).map(|j| g[(i, j)] * p.coords[j]).sum()).collect(), mult: p.mult })
            .collect();
        Self { ambient: n, curves, points }
    }
}

/// JSON form: `{"components": [{"param": ["1", "u", "u^2"], "mult": 1}], "points": [{"coords": ["1", "1"]}]}`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct CycleJson {
    #[serde(default)]
    pub components: Vec<ComponentJson>,
    #[serde(default)]
    pub points: Vec<PointJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentJson {
    pub param: Vec<String>,
    #[serde(default = "one")]
    pub mult: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointJson {
    pub coords: Vec<Scalar>,
    #[serde(default = "one")]
    pub mult: u32,
}

fn one() -> u32 {
    1
}

/// Parse a polynomial in `u` such as `"1 + 2*u - u^3"`.
pub fn parse_poly_u(s: &str) -> Result<Poly> {
    Poly::parse(s, 'u')
}

impl TryFrom<&CycleJson> for ParametrizedCycle {
    type Error = Error;
    fn try_from(j: &CycleJson) -> Result<Self> {
        let ambient = j.components.first().map(|c| c.param.len()).or(j.points.first().map(|p| p.coords.len()));
        let ambient = ambient.ok_or_else(|| Error::Invalid("empty cycle".into()))?;
        let mut cyc = Self { ambient, curves: Vec::new(), points: Vec::new() };
        for c in &j.components {
            if c.param.len() != ambient {
                return Err(Error::DimensionMismatch("component coordinate counts differ".into()));
            }
            let polys = c.param.iter().map(|s| parse_poly_u(s)).collect::<Result<Vec<_>>>()?;
            cyc.curves.push(Self::from_exact_curve(&polys, c.mult).curves.remove(0));
        }
        for p in &j.points {
            if p.coords.len() != ambient {
                return Err(Error::DimensionMismatch("point coordinate counts differ".into()));
            }
            cyc.points.push(PointComponent { coords: p.coords.iter().map(Scalar::to_complex).collect(), mult: p.mult });
        }
        Ok(cyc)
    }
}

/// Quadrature resolution and stopping rule. `radial × angular` sets the
/// initial node grid per chart (in blocks of an 8-point rule).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radial: usize,
    pub angular: usize,
    pub tol: f64,
    /// Maximum number of local halvings of a cell.
    pub max_refinements: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { radial: 24, angular: 48, tol: 1e-10, max_refinements: 30 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.radial == 0 || self.angular == 0 {
            return Err(Error::Invalid("quadrature needs positive grid sizes and tolerance".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arcs::{smith_factorize, ArcMatrix};

    #[test]
    fn exponential_of_diagonal() {
        let a = HermitianEndomorphism::diagonal(&[1.0, -1.0]);
        let e = a.exp(0.5);
        assert!((e[(0, 0)].re - 0.5f64.exp()).abs() < 1e-12);
        assert!(e[(0, 1)].norm() < 1e-14);
        assert_eq!(a.operator_norm(), 1.0);
    }

    #[test]
    fn flag_endomorphism_of_diagonal_arc() {
        let g = ArcMatrix::diagonal_powers(&[2, -1, 0], 6);
        let f = smith_factorize(&g).unwrap();
        let a = HermitianEndomorphism::compatible_with_flag(&f.flag).unwrap();
        let w = [2, -1, 0].map(Scalar::from_i64);
        assert_eq!(a.exact().unwrap(), HermitianEndomorphism::diagonal_exact(&w).exact().unwrap());
    }

    #[test]
    fn non_orthogonal_flag() {
        // U_1 = span(1,1), weights (0, 1)
        let flag = WeightedFlag {
            subspaces: vec![vec![vec![Scalar::one(), Scalar::one()]], vec![vec![Scalar::one(), Scalar::zero()], vec![Scalar::zero(), Scalar::one()]]],
            weights: vec![0, 1],
            multiplicities: vec![1, 1],
        };
        let a = HermitianEndomorphism::compatible_with_flag(&flag).unwrap();
        let half = Scalar::from_ratio(1, 2);
        assert_eq!(a.exact().unwrap(), &vec![vec![half.clone(), -&half], vec![-&half, half.clone()]]);
    }

    #[test]
    fn cycle_json() {
        let j: CycleJson = serde_json::from_str(r#"{"components": [{"param": ["1", "u", "u^2"], "mult": 2}]}"#).unwrap();
        let c = ParametrizedCycle::try_from(&j).unwrap();
        assert_eq!(c.degree(), 4);
        assert_eq!(c.ambient, 3);
    }
}
