//! Multi-modular gcd for polynomials with rational coefficients.
//!
//! Monic gcds modulo 62-bit primes are combined by CRT and lifted back with
//! rational reconstruction; a candidate is accepted only after exact trial
//! division, so the answer never depends on luck.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Poly, Scalar};

const MAX_PRIMES: usize = 400;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'wit: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'wit;
            }
        }
        return false;
    }
    true
}

struct Primes(u64);

impl Iterator for Primes {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        loop {
            self.0 -= 2;
            if is_prime(self.0) {
                return Some(self.0);
            }
        }
    }
}

/// Integer coefficients of a nonzero multiple of `p`, or `None` if `p` is not real.
fn integer_coeffs(p: &Poly) -> Option<Vec<BigInt>> {
    if !p.coeffs().iter().all(Scalar::is_real) {
        return None;
    }
    let l = p.coeffs().iter().fold(BigInt::one(), |l, c| l.lcm(c.re.denom()));
    Some(p.coeffs().iter().map(|c| c.re.numer() * (&l / c.re.denom())).collect())
}

fn reduce(c: &[BigInt], p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    c.iter().map(|x| x.mod_floor(&pb).to_u64().unwrap()).collect()
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn monic_mod(v: &mut [u64], p: u64) {
    let inv = pow_mod(*v.last().unwrap(), p - 2, p);
    for x in v.iter_mut() {
        *x = mul_mod(*x, inv, p);
    }
}

fn gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        monic_mod(&mut b, p);
        let db = b.len() - 1;
        while a.len() > db {
            let c = *a.last().unwrap();
            let off = a.len() - 1 - db;
            if c != 0 {
                for (j, &bj) in b.iter().enumerate() {
                    a[off + j] = (a[off + j] + p - mul_mod(c, bj, p)) % p;
                }
            }
            a.pop();
        }
        trim(&mut a);
        std::mem::swap(&mut a, &mut b);
    }
    monic_mod(&mut a, p);
    a
}

fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

fn divides(g: &Poly, a: &Poly) -> bool {
    a.div_rem(g).map(|(_, r)| r.is_zero()).unwrap_or(false)
}

/// Monic gcd of two nonzero real-rational polynomials; `None` to fall back to Euclid.
pub(crate) fn gcd(a: &Poly, b: &Poly) -> Option<Poly> {
    let (ia, ib) = (integer_coeffs(a)?, integer_coeffs(b)?);
    let (la, lb) = (ia.last()?.clone(), ib.last()?.clone());
    let mut best: Option<(usize, BigInt, Vec<BigInt>)> = None;
    let mut last: Option<Poly> = None;
    for p in Primes((1u64 << 62) + 1).take(MAX_PRIMES) {
        let pb = BigInt::from(p);
        if (&la % &pb).is_zero() || (&lb % &pb).is_zero() {
            continue;
        }
        let g = gcd_mod(reduce(&ia, p), reduce(&ib, p), p);
        let deg = g.len() - 1;
        if deg == 0 {
            return Some(Poly::one());
        }
        match &mut best {
            Some((d, _, _)) if deg > *d => continue,
            Some((d, m, c)) if deg == *d => {
                // CRT: x ≡ c (mod m), x ≡ g (mod p)
                let minv = BigInt::from(pow_mod((&*m % &pb).to_u64().unwrap(), p - 2, p));
                for (ci, &gi) in c.iter_mut().zip(&g) {
                    let diff = (BigInt::from(gi) - &*ci).mod_floor(&pb);
                    *ci += &*m * ((diff * &minv) % &pb);
                }
                *m *= &pb;
            }
            _ => best = Some((deg, pb.clone(), g.iter().map(|&x| BigInt::from(x)).collect())),
        }
        let (_, m, c) = best.as_ref().unwrap();
        let Some(q) = c.iter().map(|x| rational_reconstruct(x, m)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        let cand = Poly::new(q.into_iter().map(Scalar::from_rational).collect());
        if last.as_ref() == Some(&cand) && divides(&cand, a) && divides(&cand, b) {
            return Some(cand);
        }
        last = Some(cand);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agrees_with_known_factor() {
        let g = Poly::from_i64s(&[3, -7, 0, 2, 5]);
        let a = &g * &Poly::from_i64s(&[1, 1, 0, 0, 0, -4, 9]);
        let b = &g * &Poly::from_i64s(&[-2, 0, 11, 1, 6]);
        assert_eq!(gcd(&a, &b).unwrap(), g.monic());
        let c = Poly::from_i64s(&[5, 0, 0, 0, 1, 1]);
        assert_eq!(gcd(&a, &c).unwrap(), Poly::one());
    }
}
