use orbitforge::algebra::linalg::mat_vec;
use orbitforge::algebra::{linear_solve_exact, LinearSolution, Poly, Scalar, TruncatedSeries, Var};
use proptest::prelude::*;

fn scalar() -> impl Strategy<Value = Scalar> {
    (-9i64..=9, 1i64..=5, -3i64..=3).prop_map(|(p, q, im)| &Scalar::from_ratio(p, q) + &Scalar::gaussian(0, im))
}

fn real_poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(-6i64..=6, 1..=max_deg + 1).prop_map(|c| Poly::from_i64s(&c))
}

fn series(k: i64) -> impl Strategy<Value = TruncatedSeries> {
    (-2i64..=2, prop::collection::vec(scalar(), 1..8)).prop_map(move |(v, cs)| {
        let terms: Vec<(i64, Scalar)> = cs.into_iter().enumerate().map(|(i, c)| (v + i as i64, c)).collect();
        TruncatedSeries::from_terms(Var::T, &terms, k)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_field_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert!(&(&a + &b) * &c == &(&a * &c) + &(&b * &c));
        prop_assert!(&a * &b == &b * &a);
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn poly_ring_laws(a in real_poly(5), b in real_poly(5), c in real_poly(3)) {
        prop_assert!(&(&a + &b) * &c == &(&a * &c) + &(&b * &c));
        prop_assert!(&(&a * &b) * &c == &a * &(&b * &c));
        if !b.is_zero() {
            let (q, r) = a.div_rem(&b).unwrap();
            prop_assert!(&(&q * &b) + &r == a);
            prop_assert!(r.is_zero() || r.degree() < b.degree());
        }
    }

    #[test]
    fn gcd_divides_and_recovers_common_factor(a in real_poly(4), b in real_poly(4), c in real_poly(3)) {
        prop_assume!(!c.is_zero() && !a.is_zero() && !b.is_zero());
        let (ac, bc) = (&a * &c, &b * &c);
        let g = Poly::gcd(&ac, &bc);
        prop_assert!(ac.div_rem(&g).unwrap().1.is_zero());
        prop_assert!(bc.div_rem(&g).unwrap().1.is_zero());
        prop_assert!(g.div_rem(&c).unwrap().1.is_zero());
    }

    #[test]
    fn series_inverse_roundtrip(s in series(10)) {
        prop_assume!(!s.is_zero());
        let inv = s.invert().unwrap();
        let one = &s * &inv;
        prop_assert_eq!(one.valuation(), Some(0));
        for e in 0..one.prec() {
            let want = if e == 0 { Scalar::one() } else { Scalar::zero() };
            prop_assert!(one.coeff(e).unwrap() == want);
        }
    }

    #[test]
    fn series_mul_commutes(a in series(8), b in series(8)) {
        prop_assert!(&a * &b == &b * &a);
    }

    #[test]
    fn linear_solve_has_zero_residual(rows in prop::collection::vec(prop::collection::vec(scalar(), 4), 1..5), x in prop::collection::vec(scalar(), 4)) {
        let b = mat_vec(&rows, &x);
        match linear_solve_exact(&rows, &b, 4).unwrap() {
            LinearSolution::Solved { particular, nullspace } => {
                prop_assert!(mat_vec(&rows, &particular) == b);
                for v in &nullspace {
                    prop_assert!(mat_vec(&rows, v).iter().all(Scalar::is_zero));
                }
            }
            LinearSolution::Inconsistent => prop_assert!(false, "consistent system reported inconsistent"),
        }
    }
}
