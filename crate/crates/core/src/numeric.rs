//! Floating-point helpers: polynomial roots and rational reconstruction.

use num_complex::Complex64;

use crate::algebra::{Poly, Scalar};

/// All complex roots of `Σ c_k z^k` by Aberth–Ehrlich iteration.
/// Leading coefficient must be nonzero. Deterministic starting points.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.norm() == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let monic: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    // Cauchy bound for the initial circle
    let radius = 1.0 + monic[..n].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let r0 = radius.min(1e6).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r0 * 0.5 + 0.1, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for a in monic.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * sum);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Roots of an exact polynomial.
pub fn exact_poly_roots(p: &Poly) -> Vec<Complex64> {
    let c: Vec<Complex64> = p.coeffs().iter().map(Scalar::to_complex).collect();
    poly_roots(&c)
}

/// Best rational approximation with denominator at most `max_den`.
pub fn rational_approx(x: f64, max_den: i64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a as f64;
        if frac.abs() < 1e-12 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 == 0 {
        None
    } else {
        Some((h1, k1))
    }
}

/// Gaussian-rational guess for a complex number.
pub fn gaussian_approx(z: Complex64, max_den: i64) -> Option<Scalar> {
    let (a, b) = rational_approx(z.re, max_den)?;
    let (c, d) = rational_approx(z.im, max_den)?;
    Some(&Scalar::from_ratio(a, b) + &(&Scalar::from_ratio(c, d) * &Scalar::i()))
}

/// Exact roots in `Q(i)` of `p` found by numeric search and verified by
/// evaluation; returns `(root, multiplicity)` pairs. Irrational roots are skipped.
pub fn rational_roots(p: &Poly) -> Vec<(Scalar, usize)> {
    let sf = p.squarefree_part();
    let mut out: Vec<(Scalar, usize)> = Vec::new();
    for z in exact_poly_roots(&sf) {
        let Some(r) = gaussian_approx(z, 10_000) else { continue };
        if !sf.eval(&r).is_zero() || out.iter().any(|(s, _)| *s == r) {
            continue;
        }
        let lin = Poly::new(vec![-&r, Scalar::one()]);
        let mut m = 0;
        let mut q = p.clone();
        while let Ok((quo, rem)) = q.div_rem(&lin) {
            if !rem.is_zero() {
                break;
            }
            q = quo;
            m += 1;
        }
        out.push((r, m));
    }
    out
}

/// Tree-shaped summation with a fixed layout, independent of thread count.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n if n <= 8 => v.iter().sum(),
        n => {
            let mid = n / 2;
            pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
        }
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wt = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = 0.5 * wt;
        w[n - 1 - i] = 0.5 * wt;
    }
    (x, w)
}

/// Polynomial extrapolation in `h` to `h = 0` (Neville) from samples `(h_i, f_i)`.
pub fn extrapolate_to_zero(h: &[f64], f: &[f64]) -> f64 {
    let mut p = f.to_vec();
    let n = p.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (h[i] * p[i + 1] - h[i + k] * p[i]) / (h[i] - h[i + k]);
        }
    }
    p.first().copied().unwrap_or(f64::NAN)
}

/// Complex version of [`extrapolate_to_zero`].
pub fn extrapolate_to_zero_c64(h: &[f64], f: &[Complex64]) -> Complex64 {
    let mut p = f.to_vec();
    let n = p.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (h[i] * p[i + 1] - h[i + k] * p[i]) / (h[i] - h[i + k]);
        }
    }
    p.first().copied().unwrap_or(Complex64::new(f64::NAN, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_cubic() {
        // (z-1)(z+2)(z-3i)
        let p = &(&Poly::from_i64s(&[-1, 1]) * &Poly::from_i64s(&[2, 1])) * &Poly::new(vec![Scalar::gaussian(0, -3), Scalar::one()]);
        let mut r = rational_roots(&p);
        r.sort_by(|a, b| a.0.to_string().cmp(&b.0.to_string()));
        assert_eq!(r.len(), 3);
        assert!(r.iter().any(|(s, m)| *s == Scalar::from_i64(-2) && *m == 1));
        assert!(r.iter().any(|(s, _)| *s == Scalar::gaussian(0, 3)));
    }

    #[test]
    fn multiplicities() {
        let l = Poly::from_i64s(&[-1, 2]);
        let p = &(&l * &l) * &(&l * &Poly::from_i64s(&[5, 1]));
        let r = rational_roots(&p);
        assert!(r.contains(&(Scalar::from_ratio(1, 2), 3)));
        assert!(r.contains(&(Scalar::from_i64(-5), 1)));
    }

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        let i: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((i - 1.0 / 13.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn neville_recovers_linear_in_h() {
        let h = [1.0, 0.5, 0.25];
        let f: Vec<f64> = h.iter().map(|h| 3.0 + 2.0 * h - h * h).collect();
        assert!((extrapolate_to_zero(&h, &f) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn continued_fraction() {
        assert_eq!(rational_approx(0.75, 100), Some((3, 4)));
        assert_eq!(rational_approx(-2.5, 100), Some((-5, 2)));
    }
}
