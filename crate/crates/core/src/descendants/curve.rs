//! Polynomial parametrizations `v ↦ [f_0(v) : … : f_N(v)]` and their double points.

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::dense2::{resultant_y, Dense2};
use crate::algebra::{Poly, RatFn, Scalar};
use crate::error::{Error, Result};
use crate::numeric::{exact_poly_roots, poly_roots, rational_roots};

/// A parametrization with polynomial coordinates without common factor.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalCurve {
    coords: Vec<Poly>,
}

/// Sine of the angle between two lines in `C^N`.
pub fn projective_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let na: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    let ip: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    (1.0 - ip.norm_sqr() / (na * nb)).max(0.0).sqrt()
}

/// Scale so that the largest coordinate equals 1.
pub fn normalize_point(p: &[Complex64]) -> Vec<Complex64> {
    let m = p.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or_default();
    if m.norm() == 0.0 {
        return p.to_vec();
    }
    p.iter().map(|z| z / m).collect()
}

fn poly_gcd_all<'a>(ps: impl IntoIterator<Item = &'a Poly>) -> Poly {
    ps.into_iter().fold(Poly::zero(), |g, p| if g.is_zero() { p.monic() } else { Poly::gcd(&g, p) })
}

impl RationalCurve {
    pub fn from_polys(coords: Vec<Poly>) -> Result<Self> {
        let g = poly_gcd_all(&coords);
        if g.is_zero() {
            return Err(Error::ZeroVector);
        }
        let coords = coords.iter().map(|p| p.div_exact(&g)).collect::<Result<Vec<_>>>()?;
        Ok(Self { coords })
    }

    /// Clear denominators and common factors.
    pub fn from_ratfns(f: &[RatFn]) -> Result<Self> {
        let mut lcm = Poly::one();
        for r in f {
            let g = Poly::gcd(&lcm, r.den());
            lcm = &lcm * &r.den().div_exact(&g)?;
        }
        let coords = f.iter().map(|r| Ok(&r.num().clone() * &lcm.div_exact(r.den())?)).collect::<Result<Vec<_>>>()?;
        Self::from_polys(coords)
    }

    pub fn coords(&self) -> &[Poly] {
        &self.coords
    }

    pub fn ambient(&self) -> usize {
        self.coords.len()
    }

    pub fn degree(&self) -> usize {
        self.coords.iter().filter_map(Poly::degree).max().unwrap_or(0)
    }

    pub fn eval(&self, v: &Scalar) -> Vec<Scalar> {
        self.coords.iter().map(|p| p.eval(v)).collect()
    }

    pub fn eval_c64(&self, v: Complex64) -> Vec<Complex64> {
        self.coords.iter().map(|p| p.eval_c64(v)).collect()
    }

    /// The point `v = ∞`.
    pub fn at_infinity(&self) -> Vec<Scalar> {
        let d = self.degree();
        self.coords.iter().map(|p| p.coeff(d)).collect()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(|p| p.to_string_in("v")).collect()
    }

    /// Finite parameters whose image is proportional to `q`.
    fn finite_preimage(&self, q: &[Scalar]) -> Poly {
        let i0 = q.iter().position(|c| !c.is_zero()).expect("nonzero point");
        let eqs: Vec<Poly> =
            (0..q.len()).filter(|&j| j != i0).map(|j| &self.coords[j].scale(&q[i0]) - &self.coords[i0].scale(&q[j])).collect();
        poly_gcd_all(&eqs)
    }

    /// Number of parameter values over a generic image point.
    pub fn map_degree(&self) -> usize {
        let inf = self.at_infinity();
        let trials = [Scalar::from_ratio(7, 3), Scalar::from_ratio(-5, 4), Scalar::from_ratio(11, 7), Scalar::from_ratio(-13, 9)];
        trials
            .iter()
            .filter_map(|v| {
                let q = self.eval(v);
                let g = self.finite_preimage(&q);
                let at_inf = crate::algebra::linalg::rank(&vec![q.clone(), inf.clone()]) < 2;
                (!at_inf).then(|| g.squarefree_part().degree().unwrap_or(0))
            })
            .min()
            .unwrap_or(1)
    }

    /// `(f_i(v1) f_j(v2) − f_j(v1) f_i(v2)) / (v1 − v2)` written in `e1 = v1 + v2`, `e2 = v1 v2`.
    fn symmetric_minor(&self, i: usize, j: usize, complete: &[Dense2]) -> Dense2 {
        let (fi, fj) = (&self.coords[i], &self.coords[j]);
        let n = self.degree() + 1;
        let mut out = Dense2::zero();
        for a in 0..n {
            for b in a + 1..n {
                let c = &(&fi.coeff(a) * &fj.coeff(b)) - &(&fj.coeff(a) * &fi.coeff(b));
                if c.is_zero() {
                    continue;
                }
                // (v1 v2)^a (v1^a' v2^b' − v1^b' v2^a') / (v1 − v2) = −e2^a h_{b−a−1}
                let mut e2a = Dense2::zero();
                e2a.add_term(0, a, &Scalar::one());
                out.scaled_add(&e2a.mul(&complete[b - a - 1]), &-&c);
            }
        }
        out
    }

    /// Pairs of distinct parameters with the same image, grouped by image point.
    pub fn double_points(&self) -> Result<Vec<DoublePoint>> {
        let d = self.degree();
        if d < 2 {
            return Ok(Vec::new());
        }
        if self.map_degree() != 1 {
            return Err(Error::Invalid("parametrization is not birational onto its image".into()));
        }
        // complete homogeneous symmetric polynomials h_k in (e1, e2)
        let mut complete = vec![Dense2::zero(); d];
        complete[0].add_term(0, 0, &Scalar::one());
        for k in 1..d {
            let mut h = Dense2::zero();
            for (i, j, a) in complete[k - 1].terms() {
                h.add_term(i + 1, j, a);
            }
            if k >= 2 {
                for (i, j, a) in complete[k - 2].terms() {
                    h.add_term(i, j + 1, &-a);
                }
            }
            complete[k] = h;
        }
        let n = self.coords.len();
        let minors: Vec<Dense2> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| self.symmetric_minor(i, j, &complete)).filter(|m| !m.is_zero()).collect();
        if minors.is_empty() {
            return Err(Error::Invalid("constant parametrization".into()));
        }

        let combo = |seed: i64| {
            let mut h = Dense2::zero();
            for (k, m) in minors.iter().enumerate() {
                let c = ((k as i64 + 1) * (seed * 7 + 3)) % 11 - 5;
                h.scaled_add(m, &Scalar::from_i64(if c == 0 { 1 } else { c }));
            }
            h
        };
        let (h1, h2, h3) = (combo(1), combo(2), combo(4));
        let candidates = Poly::gcd(&resultant_y(&h1, &h2), &resultant_y(&h1, &h3));
        if minors.len() < 2 || candidates.is_zero() {
            return Err(Error::Invalid("double-point elimination degenerated".into()));
        }

        let mut pairs: Vec<(Param, Param)> = Vec::new();
        let push_e = |e1: Complex64, e2: Complex64, pairs: &mut Vec<(Param, Param)>| {
            let disc = (e1 * e1 - 4.0 * e2).sqrt();
            if disc.norm() < 1e-7 * (1.0 + e1.norm()) {
                return;
            }
            let (v1, v2) = ((e1 + disc) / 2.0, (e1 - disc) / 2.0);
            pairs.push((Param::Finite(v1), Param::Finite(v2)));
        };
        let exact: Vec<(Scalar, usize)> = if candidates.is_constant() { Vec::new() } else { rational_roots(&candidates) };
        let mut rest = candidates.squarefree_part();
        for (r, _) in &exact {
            rest = rest.div_exact(&Poly::new(vec![-r, Scalar::one()]))?;
            let g = poly_gcd_all(&minors.iter().map(|m| m.at_x(r)).collect::<Vec<_>>());
            if g.is_constant() {
                continue;
            }
            let e1 = r.to_complex();
            for e2 in exact_poly_roots(&g) {
                push_e(e1, e2, &mut pairs);
            }
        }
        if !rest.is_constant() {
            for e1 in exact_poly_roots(&rest) {
                for e2 in numeric_y_roots(&h1, e1) {
                    let worst = minors.iter().map(|m| eval_dense_c64(m, e1, e2) / dense_scale(m, e1, e2)).fold(0.0, f64::max);
                    if worst < 1e-7 {
                        push_e(e1, e2, &mut pairs);
                    }
                }
            }
        }
        // partners of v = ∞
        let inf = self.at_infinity();
        let g = self.finite_preimage(&inf);
        for v in exact_poly_roots(&g) {
            pairs.push((Param::Infinity, Param::Finite(v)));
        }

        let mut out: Vec<DoublePoint> = Vec::new();
        for (a, b) in pairs {
            let pa = self.image(&a);
            if projective_distance(&pa, &self.image(&b)) > 1e-6 {
                continue;
            }
            match out.iter_mut().find(|dp| projective_distance(&dp.point_c64(), &pa) < 1e-6) {
                Some(dp) => {
                    for p in [a, b] {
                        if !dp.params.iter().any(|q| q.close(&p)) {
                            dp.params.push(p);
                        }
                    }
                }
                None => out.push(DoublePoint::new(vec![a, b], &pa)),
            }
        }
        for dp in &mut out {
            dp.exact = dp.params.iter().find_map(|p| p.rational()).map(|v| normalize_exact(&self.eval(&v)));
            if dp.exact.is_none() && dp.params.iter().any(|p| matches!(p, Param::Infinity)) {
                dp.exact = Some(normalize_exact(&inf));
            }
        }
        Ok(out)
    }

    /// Closest curve point to `y` among the solutions of a generic
    /// combination of the `2×2` minors of `(y, C(v))`, with its parameter.
    pub fn nearest(&self, y: &[Complex64]) -> (f64, Param) {
        let j = (0..y.len()).max_by(|&a, &b| y[a].norm().total_cmp(&y[b].norm())).unwrap_or(0);
        let n = self.degree() + 1;
        let mut g = vec![Complex64::new(0.0, 0.0); n];
        for i in (0..y.len()).filter(|&i| i != j) {
            let c = Complex64::from_polar(1.0, 0.7 + 1.3 * i as f64);
            for (k, gk) in g.iter_mut().enumerate() {
                *gk += c * (y[j] * self.coords[i].coeff(k).to_complex() - y[i] * self.coords[j].coeff(k).to_complex());
            }
        }
        let mut cands: Vec<Param> = poly_roots(&g).into_iter().map(Param::Finite).collect();
        cands.push(Param::Infinity);
        cands.push(Param::Finite(Complex64::new(0.0, 0.0)));
        cands
            .into_iter()
            .map(|p| (projective_distance(y, &self.image(&p)), p))
            .filter(|(d, _)| d.is_finite())
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap_or((f64::INFINITY, Param::Infinity))
    }

    pub fn image(&self, p: &Param) -> Vec<Complex64> {
        match p {
            Param::Finite(v) => self.eval_c64(*v),
            Param::Infinity => self.at_infinity().iter().map(Scalar::to_complex).collect(),
        }
    }
}

fn normalize_exact(p: &[Scalar]) -> Vec<Scalar> {
    let i = p.iter().position(|c| !c.is_zero()).expect("nonzero point");
    let inv = p[i].inv().expect("nonzero");
    p.iter().map(|c| c * &inv).collect()
}

fn eval_dense_c64(m: &Dense2, x: Complex64, y: Complex64) -> f64 {
    m.terms().map(|(i, j, a)| a.to_complex() * x.powu(i as u32) * y.powu(j as u32)).sum::<Complex64>().norm()
}

fn dense_scale(m: &Dense2, x: Complex64, y: Complex64) -> f64 {
    m.terms().map(|(i, j, a)| a.to_complex().norm() * x.norm().powi(i as i32) * y.norm().powi(j as i32)).sum::<f64>().max(1e-300)
}

fn numeric_y_roots(m: &Dense2, x: Complex64) -> Vec<Complex64> {
    let ny = m.y_degree() + 1;
    let mut c = vec![Complex64::new(0.0, 0.0); ny];
    for (i, j, a) in m.terms() {
        c[j] += a.to_complex() * x.powu(i as u32);
    }
    poly_roots(&c)
}

#[derive(Clone, Copy, Debug)]
pub enum Param {
    Finite(Complex64),
    Infinity,
}

impl Param {
    fn close(&self, o: &Param) -> bool {
        match (self, o) {
            (Param::Finite(a), Param::Finite(b)) => (a - b).norm() < 1e-6 * (1.0 + a.norm()),
            (Param::Infinity, Param::Infinity) => true,
            _ => false,
        }
    }

    fn rational(&self) -> Option<Scalar> {
        match self {
            Param::Finite(z) => crate::numeric::gaussian_approx(*z, 10_000),
            Param::Infinity => None,
        }
    }
}

impl Serialize for Param {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Param::Finite(z) => [z.re, z.im].serialize(s),
            Param::Infinity => "infinity".serialize(s),
        }
    }
}

/// An image point with two or more parameter values.
#[derive(Clone, Debug, Serialize)]
pub struct DoublePoint {
    pub params: Vec<Param>,
    /// Normalized so the largest coordinate is 1, as `[re, im]` pairs.
    pub point: Vec<[f64; 2]>,
    /// Exact coordinates (first nonzero coordinate 1) when a parameter is rational.
    pub exact: Option<Vec<Scalar>>,
}

impl DoublePoint {
    fn new(params: Vec<Param>, p: &[Complex64]) -> Self {
        Self { params, point: normalize_point(p).iter().map(|z| [z.re, z.im]).collect(), exact: None }
    }

    pub fn point_c64(&self) -> Vec<Complex64> {
        self.point.iter().map(|z| Complex64::new(z[0], z[1])).collect()
    }
}
