use serde::Serialize;

use super::{ArcMatrix, EXACT};
use crate::algebra::linalg::{determinant, row_space_basis, same_span, Matrix};
use crate::algebra::{Scalar, TruncatedSeries, Var};
use crate::error::{Error, Result};

/// Which minimal-valuation entry becomes the next pivot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotStrategy {
    /// First in row-major order.
    RowMajor,
    /// Last in column-major order.
    ColumnMajorLast,
}

/// Nested subspaces `U_1 ⊂ ... ⊂ U_s = C^q` with strictly increasing weights.
/// Each subspace is stored by its reduced row-echelon basis, so equal spans
/// compare equal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedFlag {
    pub subspaces: Vec<Vec<Vec<Scalar>>>,
    pub weights: Vec<i64>,
    pub multiplicities: Vec<usize>,
}

impl WeightedFlag {
    /// Weight of each basis vector, ascending.
    pub fn weight_multiset(&self) -> Vec<i64> {
        self.weights
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&w, &m)| std::iter::repeat(w).take(m))
            .collect()
    }

    pub fn same_flag(&self, o: &Self) -> bool {
        self.weights == o.weights
            && self.multiplicities == o.multiplicities
            && self.subspaces.iter().zip(&o.subspaces).all(|(a, b)| same_span(a, b))
    }

    pub fn dim(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// `|Γ| = max |λ_i|`.
    pub fn norm(&self) -> i64 {
        self.weights.iter().map(|w| w.abs()).max().unwrap_or(0)
    }
}

/// `g = L · t^A · R` with `L`, `R` holomorphic and invertible at `t = 0`.
#[derive(Clone, Debug)]
pub struct SmithFactorization {
    pub l: ArcMatrix,
    /// Diagonal of `A`, ascending.
    pub weights: Vec<i64>,
    pub r: ArcMatrix,
    pub flag: WeightedFlag,
}

impl SmithFactorization {
    /// `L · t^A · R`.
    pub fn reconstruct(&self) -> ArcMatrix {
        let k = self.l.truncation().max(self.r.truncation());
        let d = ArcMatrix::diagonal_powers(&self.weights, k);
        self.l.mul(&d).and_then(|ld| ld.mul(&self.r)).expect("square factors of equal size")
    }

    pub fn weight_sum(&self) -> i64 {
        self.weights.iter().sum()
    }
}

pub fn smith_factorize(g: &ArcMatrix) -> Result<SmithFactorization> {
    smith_factorize_with(g, PivotStrategy::RowMajor)
}

pub fn smith_factorize_with(g: &ArcMatrix, strategy: PivotStrategy) -> Result<SmithFactorization> {
    let q = g.q();
    let det = g.det();
    let Some(det_order) = det.valuation() else {
        return Err(Error::SingularArc);
    };
    let shift = (-g.min_valuation().unwrap_or(0)).max(0);
    let mut m: Vec<Vec<TruncatedSeries>> = g.entries().iter().map(|r| r.iter().map(|s| s.shift(shift)).collect()).collect();
    let mut l = ArcMatrix::identity(q, EXACT).entries;
    let mut r = ArcMatrix::identity(q, EXACT).entries;

    for k in 0..q {
        let block: Vec<(usize, usize)> = match strategy {
            PivotStrategy::RowMajor => (k..q).flat_map(|i| (k..q).map(move |j| (i, j))).collect(),
            PivotStrategy::ColumnMajorLast => (k..q).rev().flat_map(|j| (k..q).rev().map(move |i| (i, j))).collect(),
        };
        let best = block.iter().filter_map(|&(i, j)| m[i][j].valuation()).min();
        let Some(v) = best else {
            return Err(Error::InsufficientTruncation(format!("no certified pivot at step {k}")));
        };
        if block.iter().any(|&(i, j)| m[i][j].is_zero() && m[i][j].prec() <= v) {
            return Err(Error::InsufficientTruncation(format!("pivot valuation {v} not certified at step {k}")));
        }
        let &(pi, pj) = block.iter().find(|&&(i, j)| m[i][j].valuation() == Some(v)).unwrap();
        m.swap(k, pi);
        for row in l.iter_mut() {
            row.swap(k, pi);
        }
        for row in m.iter_mut() {
            row.swap(k, pj);
        }
        r.swap(k, pj);

        let pinv = m[k][k].invert()?;
        for i in k + 1..q {
            if m[i][k].is_zero() {
                continue;
            }
            let c = &m[i][k] * &pinv;
            for j in k..q {
                let t = &c * &m[k][j];
                m[i][j] = &m[i][j] - &t;
            }
            // L ← L·(I + c e_i e_kᵀ)
            for row in l.iter_mut() {
                let t = &c * &row[i];
                row[k] = &row[k] + &t;
            }
        }
        for j in k + 1..q {
            if m[k][j].is_zero() {
                continue;
            }
            let c = &m[k][j] * &pinv;
            m[k][j] = TruncatedSeries::zero(Var::T, EXACT);
            // R ← (I + c e_k e_jᵀ)·R
            let rj = r[j].clone();
            for (x, y) in r[k].iter_mut().zip(&rj) {
                *x = &*x + &(&c * y);
            }
        }
    }

    // m is now diagonal: m_kk = t^{a_k}·unit_k
    let mut weights = Vec::with_capacity(q);
    for k in 0..q {
        let a = m[k][k].valuation().ok_or_else(|| Error::InsufficientTruncation("diagonal entry lost".into()))?;
        let unit = m[k][k].shift(-a);
        for x in r[k].iter_mut() {
            *x = &unit * &*x;
        }
        weights.push(a - shift);
    }

    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by_key(|&i| (weights[i], i));
    let l: Vec<Vec<TruncatedSeries>> = l.iter().map(|row| order.iter().map(|&i| row[i].clone()).collect()).collect();
    let r: Vec<Vec<TruncatedSeries>> = order.iter().map(|&i| r[i].clone()).collect();
    let weights: Vec<i64> = order.iter().map(|&i| weights[i]).collect();
    let l = ArcMatrix::new(l)?;
    let r = ArcMatrix::new(r)?;

    if weights.iter().sum::<i64>() != det_order {
        return Err(Error::InsufficientTruncation("weight sum disagrees with order of det".into()));
    }
    let l0 = l.at_zero()?;
    let r0 = r.at_zero()?;
    if determinant(&l0).is_zero() || determinant(&r0).is_zero() {
        return Err(Error::InsufficientTruncation("factor not invertible at t = 0".into()));
    }
    let flag = flag_from(&l0, &weights);
    Ok(SmithFactorization { l, weights, r, flag })
}

/// `U_i = L(0)·span(e_j : λ_j ≤ λ_i)`.
fn flag_from(l0: &Matrix, weights: &[i64]) -> WeightedFlag {
    let mut distinct: Vec<i64> = weights.to_vec();
    distinct.dedup();
    let q = weights.len();
    let mut subspaces = Vec::new();
    let mut multiplicities = Vec::new();
    for &lam in &distinct {
        let cols: Vec<Vec<Scalar>> =
            (0..q).filter(|&j| weights[j] <= lam).map(|j| (0..q).map(|i| l0[i][j].clone()).collect()).collect();
        subspaces.push(row_space_basis(&cols));
        multiplicities.push(weights.iter().filter(|&&w| w == lam).count());
    }
    WeightedFlag { subspaces, weights: distinct, multiplicities }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(rows: &[&[&str]], k: i64) -> ArcMatrix {
        let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
        ArcMatrix::parse(&rows, k).unwrap()
    }

    #[test]
    fn identity_has_zero_weights() {
        let f = smith_factorize(&ArcMatrix::identity(3, 8)).unwrap();
        assert_eq!(f.weights, vec![0, 0, 0]);
        assert!(f.l.certified_eq(&ArcMatrix::identity(3, EXACT)));
        assert!(f.r.certified_eq(&ArcMatrix::identity(3, EXACT)));
        assert_eq!(f.flag.weights, vec![0]);
    }

    #[test]
    fn diagonal_arc() {
        let g = arc(&[&["t^2", "0"], &["0", "t^-1"]], 8);
        let f = smith_factorize(&g).unwrap();
        assert_eq!(f.weights, vec![-1, 2]);
        let e2 = vec![Scalar::zero(), Scalar::one()];
        assert!(same_span(&f.flag.subspaces[0], &[e2]));
        assert_eq!(f.flag.multiplicities, vec![1, 1]);
        assert!(f.reconstruct().certified_eq(&g));
    }

    #[test]
    fn jordan_block() {
        // hand reduction: swap columns, clear with the unit entry, leaving diag(1, -t^2)
        let g = arc(&[&["t", "1"], &["0", "t"]], 8);
        for s in [PivotStrategy::RowMajor, PivotStrategy::ColumnMajorLast] {
            let f = smith_factorize_with(&g, s).unwrap();
            assert_eq!(f.weights, vec![0, 2]);
            assert!(f.reconstruct().certified_eq(&g));
        }
    }

    #[test]
    fn singular_arc() {
        let g = arc(&[&["1 + t", "2 + 2*t"], &["1", "2"]], 6);
        assert_eq!(smith_factorize(&g).unwrap_err(), Error::SingularArc);
    }
}
