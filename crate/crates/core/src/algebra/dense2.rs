//! Dense polynomials in two variables and resultants by evaluation and interpolation.

use super::linalg::determinant;
use super::poly::Poly;
use super::scalar::Scalar;

/// `Σ c[i][j] X^i Y^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense2 {
    pub c: Vec<Vec<Scalar>>,
}

impl Dense2 {
    pub fn zero() -> Self {
        Self { c: Vec::new() }
    }

    pub fn add_term(&mut self, i: usize, j: usize, a: &Scalar) {
        if a.is_zero() {
            return;
        }
        if self.c.len() <= i {
            self.c.resize(i + 1, Vec::new());
        }
        let row = &mut self.c[i];
        if row.len() <= j {
            row.resize(j + 1, Scalar::zero());
        }
        row[j] += a;
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|r| r.iter().all(Scalar::is_zero))
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.c.iter().enumerate().flat_map(|(i, r)| r.iter().enumerate().filter(|x| !x.1.is_zero()).map(move |(j, a)| (i, j, a)))
    }

    pub fn total_degree(&self) -> usize {
        self.terms().map(|(i, j, _)| i + j).max().unwrap_or(0)
    }

    pub fn y_degree(&self) -> usize {
        self.terms().map(|(_, j, _)| j).max().unwrap_or(0)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (i, j, a) in self.terms() {
            for (k, l, b) in o.terms() {
                out.add_term(i + k, j + l, &(a * b));
            }
        }
        out
    }

    pub fn scaled_add(&mut self, o: &Self, s: &Scalar) {
        for (i, j, a) in o.terms() {
            self.add_term(i, j, &(a * s));
        }
    }

    /// Specialize `X = x`, giving a polynomial in `Y`.
    pub fn at_x(&self, x: &Scalar) -> Poly {
        let ny = self.c.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = vec![Scalar::zero(); ny];
        let mut xp = Scalar::one();
        for row in &self.c {
            for (j, a) in row.iter().enumerate() {
                if !a.is_zero() {
                    out[j] += &(a * &xp);
                }
            }
            xp = &xp * x;
        }
        Poly::new(out)
    }
}

/// Sylvester resultant of two polynomials with formal degrees `m`, `n`.
pub fn sylvester(f: &Poly, m: usize, g: &Poly, n: usize) -> Scalar {
    if m + n == 0 {
        return Scalar::one();
    }
    let size = m + n;
    let mut s = vec![vec![Scalar::zero(); size]; size];
    for r in 0..n {
        for k in 0..=m {
            s[r][r + m - k] = f.coeff(k);
        }
    }
    for r in 0..m {
        for k in 0..=n {
            s[n + r][r + n - k] = g.coeff(k);
        }
    }
    determinant(&s)
}

/// `Res_Y(f, g)` as a polynomial in `X`, with formal `Y`-degrees taken from the inputs.
pub fn resultant_y(f: &Dense2, g: &Dense2) -> Poly {
    let (m, n) = (f.y_degree(), g.y_degree());
    let bound = f.total_degree() * g.total_degree();
    let xs: Vec<Scalar> = (0..=bound).map(|k| Scalar::from_i64(k as i64)).collect();
    let ys: Vec<Scalar> = xs.iter().map(|x| sylvester(&f.at_x(x), m, &g.at_x(x), n)).collect();
    interpolate(&xs, &ys)
}

/// Newton interpolation through `(x_k, y_k)`.
pub fn interpolate(xs: &[Scalar], ys: &[Scalar]) -> Poly {
    let n = xs.len();
    let mut d = ys.to_vec();
    for k in 1..n {
        for i in (k..n).rev() {
            d[i] = &(&d[i] - &d[i - 1]) / &(&xs[i] - &xs[i - k]);
        }
    }
    let mut p = Poly::constant(d[n - 1].clone());
    for i in (0..n - 1).rev() {
        let lin = Poly::new(vec![-&xs[i], Scalar::one()]);
        p = &(&p * &lin) + &Poly::constant(d[i].clone());
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resultant_of_lines() {
        // f = Y - X, g = Y + X - 2: common root at X = 1
        let mut f = Dense2::zero();
        f.add_term(0, 1, &Scalar::one());
        f.add_term(1, 0, &Scalar::from_i64(-1));
        let mut g = Dense2::zero();
        g.add_term(0, 1, &Scalar::one());
        g.add_term(1, 0, &Scalar::one());
        g.add_term(0, 0, &Scalar::from_i64(-2));
        let r = resultant_y(&f, &g);
        assert!(r.eval(&Scalar::one()).is_zero());
        assert_eq!(r.degree(), Some(1));
    }

    #[test]
    fn interpolation_recovers_cubic() {
        let p = Poly::from_i64s(&[3, 0, -2, 5]);
        let xs: Vec<Scalar> = (0..4).map(Scalar::from_i64).collect();
        let ys: Vec<Scalar> = xs.iter().map(|x| p.eval(x)).collect();
        assert_eq!(interpolate(&xs, &ys), p);
    }
}
