//! Meromorphic arcs in `GL(q)`, their Smith-type factorization into weighted
//! flags, and the induced stability invariants on spaces of forms.

mod action;
mod binary;
pub mod examples;
mod limits;
mod smith;

use serde::{Deserialize, Serialize};

use crate::algebra::linalg::Matrix;
use crate::algebra::{HomogeneousForm, Scalar, TruncatedSeries, Var};
use crate::error::{Error, Result};

pub use action::{act_arc_on_form, flat_limit, nu_of_arc, ArcInvariants};
pub use binary::{binary_form_stability, StabilityReport, Verdict, Witness};
pub use limits::{linear_factors_through_point, one_ps_limit, two_step_limit, Direction, TwoStepLimit};
pub use smith::{smith_factorize, smith_factorize_with, PivotStrategy, SmithFactorization, WeightedFlag};

/// Precision used for exactly known constants.
pub(crate) const EXACT: i64 = 1 << 30;

/// A `q×q` matrix of truncated Laurent series in `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcMatrix {
    entries: Vec<Vec<TruncatedSeries>>,
}

impl ArcMatrix {
    pub fn new(entries: Vec<Vec<TruncatedSeries>>) -> Result<Self> {
        let q = entries.len();
        if q == 0 || entries.iter().any(|r| r.len() != q) {
            return Err(Error::DimensionMismatch("arc matrix must be square and nonempty".into()));
        }
        Ok(Self { entries })
    }

    pub fn identity(q: usize, k: i64) -> Self {
        Self::diagonal_powers(&vec![0; q], k)
    }

    /// `diag(t^{w_0}, ..., t^{w_{q-1}})` known to truncation `k`.
    pub fn diagonal_powers(w: &[i64], k: i64) -> Self {
        let q = w.len();
        let entries = (0..q)
            .map(|i| {
                (0..q)
                    .map(|j| {
                        if i == j {
                            TruncatedSeries::monomial(Var::T, Scalar::one(), w[i], k + w[i])
                        } else {
                            TruncatedSeries::zero(Var::T, k)
                        }
                    })
                    .collect()
            })
            .collect();
        Self { entries }
    }

    /// A constant matrix viewed as an arc.
    pub fn constant(m: &Matrix, k: i64) -> Self {
        Self {
            entries: m.iter().map(|row| row.iter().map(|c| TruncatedSeries::constant(Var::T, c.clone(), k)).collect()).collect(),
        }
    }

    /// Parse rows of series strings such as `"1 + 2*t - t^-1"`, truncated at `k`
    /// unless an entry carries its own `O(t^N)`.
    pub fn parse(rows: &[Vec<String>], k: i64) -> Result<Self> {
        let entries = rows
            .iter()
            .map(|r| r.iter().map(|s| TruncatedSeries::parse(s, Var::T, k)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn q(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &TruncatedSeries {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<TruncatedSeries>] {
        &self.entries
    }

    /// Smallest truncation over the entries.
    pub fn truncation(&self) -> i64 {
        self.entries.iter().flatten().map(TruncatedSeries::truncation).min().unwrap_or(0)
    }

    /// Most negative valuation over nonzero entries (0 if none are negative).
    pub fn min_valuation(&self) -> Option<i64> {
        self.entries.iter().flatten().filter_map(TruncatedSeries::valuation).min()
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.q() != o.q() {
            return Err(Error::DimensionMismatch("arc sizes differ".into()));
        }
        let q = self.q();
        let entries = (0..q)
            .map(|i| {
                (0..q)
                    .map(|j| {
                        let mut acc = &self.entries[i][0] * &o.entries[0][j];
                        for l in 1..q {
                            acc = &acc + &(&self.entries[i][l] * &o.entries[l][j]);
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Ok(Self { entries })
    }

    /// `g(t^k)`.
    pub fn substitute_power(&self, k: i64) -> Self {
        Self { entries: self.entries.iter().map(|r| r.iter().map(|s| s.substitute_power(k)).collect()).collect() }
    }

    /// Value at `t = 0`; every entry must be holomorphic.
    pub fn at_zero(&self) -> Result<Matrix> {
        self.entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| match s.valuation() {
                        Some(v) if v < 0 => Err(Error::Invalid("arc has a pole at t = 0".into())),
                        _ => s.coeff(0).ok_or(Error::InsufficientTruncation("constant term not certified".into())),
                    })
                    .collect()
            })
            .collect()
    }

    /// Determinant by elimination over the Laurent field.
    pub fn det(&self) -> TruncatedSeries {
        let q = self.q();
        let mut m = self.entries.clone();
        let mut det = TruncatedSeries::one(Var::T, EXACT);
        for k in 0..q {
            let piv = (k..q).filter(|&i| !m[i][k].is_zero()).min_by_key(|&i| m[i][k].valuation().unwrap());
            let Some(p) = piv else {
                // column is zero to truncation: so is the determinant
                let mut z = TruncatedSeries::zero(Var::T, EXACT);
                for i in k..q {
                    z = &z + &m[i][k];
                }
                return &det * &z;
            };
            if p != k {
                m.swap(p, k);
                det = -&det;
            }
            det = &det * &m[k][k];
            let inv = m[k][k].invert().expect("pivot is nonzero");
            for i in k + 1..q {
                if m[i][k].is_zero() {
                    continue;
                }
                let c = &m[i][k] * &inv;
                for j in k + 1..q {
                    let t = &c * &m[k][j];
                    m[i][j] = &m[i][j] - &t;
                }
            }
        }
        det
    }

    /// Inverse over the Laurent field by Gauss–Jordan elimination.
    pub fn inverse(&self) -> Result<Self> {
        let q = self.q();
        let mut m = self.entries.clone();
        let mut inv = Self::identity(q, EXACT).entries;
        for c in 0..q {
            let p = (c..q)
                .filter(|&i| !m[i][c].is_zero())
                .min_by_key(|&i| m[i][c].valuation().unwrap())
                .ok_or(Error::SingularArc)?;
            m.swap(p, c);
            inv.swap(p, c);
            let pinv = m[c][c].invert()?;
            for j in 0..q {
                m[c][j] = &m[c][j] * &pinv;
                inv[c][j] = &inv[c][j] * &pinv;
            }
            for i in 0..q {
                if i == c || m[i][c].is_zero() {
                    continue;
                }
                let f = m[i][c].clone();
                for j in 0..q {
                    let a = &f * &m[c][j];
                    m[i][j] = &m[i][j] - &a;
                    let b = &f * &inv[c][j];
                    inv[i][j] = &inv[i][j] - &b;
                }
            }
        }
        Ok(Self { entries: inv })
    }

    /// Whether two arcs agree on every coefficient both certify.
    pub fn certified_eq(&self, o: &Self) -> bool {
        self.q() == o.q()
            && self.entries.iter().flatten().zip(o.entries.iter().flatten()).all(|(a, b)| (a - b).is_zero())
    }
}

/// JSON input shared by the arc commands.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArcInput {
    #[serde(default)]
    pub arc: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub form: Option<HomogeneousForm>,
    #[serde(default)]
    pub weights: Option<Vec<i64>>,
    #[serde(default)]
    pub truncation: Option<i64>,
}

impl ArcInput {
    pub fn arc_matrix(&self) -> Result<ArcMatrix> {
        let rows = self.arc.as_ref().ok_or_else(|| Error::Invalid("input has no \"arc\" field".into()))?;
        ArcMatrix::parse(rows, self.truncation.unwrap_or(16))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(rows: &[&[&str]]) -> ArcMatrix {
        let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
        ArcMatrix::parse(&rows, 8).unwrap()
    }

    #[test]
    fn inverse_roundtrip() {
        let g = arc(&[&["1 + t", "t^-1"], &["2", "t^2 - 3"]]);
        let prod = g.mul(&g.inverse().unwrap()).unwrap();
        assert!(prod.certified_eq(&ArcMatrix::identity(2, EXACT)));
    }

    #[test]
    fn determinant_of_triangular() {
        let g = arc(&[&["t", "1"], &["0", "t"]]);
        assert_eq!(g.det().valuation(), Some(2));
        assert_eq!(g.det().leading_coeff(), Some(&Scalar::one()));
    }
}
