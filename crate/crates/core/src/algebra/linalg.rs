//! Exact dense linear algebra over [`Scalar`].

use super::scalar::Scalar;
use crate::error::{Error, Result};

pub type Matrix = Vec<Vec<Scalar>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Scalar::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Scalar::one();
    }
    m
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    let mut out = zeros(n, m);
    for i in 0..n {
        for l in 0..k {
            let x = &a[i][l];
            if x.is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[l][j].is_zero() {
                    out[i][j] += &(x * &b[l][j]);
                }
            }
        }
    }
    out
}

pub fn mat_vec(a: &Matrix, x: &[Scalar]) -> Vec<Scalar> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(Scalar::zero(), |acc, (r, v)| &acc + &(r * v)))
        .collect()
}

pub fn transpose(a: &Matrix) -> Matrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Conjugate transpose.
pub fn adjoint(a: &Matrix) -> Matrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|row| row[j].conj()).collect()).collect()
}

/// Reduced row echelon form and pivot columns.
pub fn rref(a: &Matrix) -> (Matrix, Vec<usize>) {
    let mut m = a.clone();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().unwrap();
        for x in m[r].iter_mut().skip(c) {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    if !m[r][j].is_zero() {
                        let t = &f * &m[r][j];
                        m[i][j] -= &t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank(a: &Matrix) -> usize {
    rref(a).1.len()
}

/// Basis of `{x : a·x = 0}`.
pub fn nullspace(a: &Matrix, cols: usize) -> Vec<Vec<Scalar>> {
    let (r, pivots) = rref(a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Scalar::zero(); cols];
            v[f] = Scalar::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -&r[row][f];
            }
            v
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum LinearSolution {
    /// `particular` solves the system; `nullspace` spans the kernel.
    Solved { particular: Vec<Scalar>, nullspace: Vec<Vec<Scalar>> },
    Inconsistent,
}

impl LinearSolution {
    pub fn is_consistent(&self) -> bool {
        matches!(self, LinearSolution::Solved { .. })
    }
}

/// Solve `a·x = b` exactly.
pub fn linear_solve_exact(a: &Matrix, b: &[Scalar], cols: usize) -> Result<LinearSolution> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!("{} rows vs rhs of length {}", a.len(), b.len())));
    }
    if a.iter().any(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch("ragged matrix".into()));
    }
    let aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.contains(&cols) {
        return Ok(LinearSolution::Inconsistent);
    }
    let mut x = vec![Scalar::zero(); cols];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = r[row][cols].clone();
    }
    Ok(LinearSolution::Solved { particular: x, nullspace: nullspace(a, cols) })
}

pub fn determinant(a: &Matrix) -> Scalar {
    let n = a.len();
    let mut m = a.clone();
    let mut det = Scalar::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Scalar::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det = &det * &m[c][c];
        let inv = m[c][c].inv().unwrap();
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..n {
                let t = &f * &m[c][j];
                m[i][j] -= &t;
            }
        }
    }
    det
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.len();
    let aug: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(Error::DivisionByZero);
    }
    Ok(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Rows spanning the same space, in reduced echelon form (nonzero rows only).
pub fn row_space_basis(vectors: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let (r, pivots) = rref(&vectors.to_vec());
    r.into_iter().take(pivots.len()).collect()
}

/// Whether two families of vectors span the same subspace.
pub fn same_span(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> bool {
    row_space_basis(a) == row_space_basis(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| Scalar::from_i64(x)).collect()).collect()
    }

    #[test]
    fn identity_solve() {
        let b: Vec<Scalar> = [3, -1, 4].iter().map(|&x| Scalar::from_i64(x)).collect();
        match linear_solve_exact(&identity(3), &b, 3).unwrap() {
            LinearSolution::Solved { particular, nullspace } => {
                assert_eq!(particular, b);
                assert!(nullspace.is_empty());
            }
            LinearSolution::Inconsistent => panic!(),
        }
    }

    #[test]
    fn rank_one_case() {
        let a = m(&[&[1, 1], &[2, 2]]);
        let b = vec![Scalar::from_i64(1), Scalar::from_i64(2)];
        match linear_solve_exact(&a, &b, 2).unwrap() {
            LinearSolution::Solved { particular, nullspace } => {
                assert_eq!(particular, vec![Scalar::one(), Scalar::zero()]);
                assert_eq!(nullspace.len(), 1);
                assert!(same_span(&nullspace, &[vec![Scalar::one(), Scalar::from_i64(-1)]]));
            }
            LinearSolution::Inconsistent => panic!(),
        }
        let b = vec![Scalar::from_i64(1), Scalar::from_i64(3)];
        assert_eq!(linear_solve_exact(&a, &b, 2).unwrap(), LinearSolution::Inconsistent);
    }

    #[test]
    fn det_and_inverse() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(determinant(&a), Scalar::from_i64(18));
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(3));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_err());
    }
}
