use num_rational::Rational64;
use orbitforge::algebra::{HomogeneousForm, Scalar, TruncatedSeries, Var};
use orbitforge::arcs::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_series(rng: &mut ChaCha8Rng, lo: i64, k: i64) -> TruncatedSeries {
    let v = rng.gen_range(lo..=2);
    let terms: Vec<(i64, Scalar)> = (v..=k)
        .map(|e| {
            let c = if e == v { [-2, -1, 1, 2, 3][rng.gen_range(0..5)] } else { rng.gen_range(-3..=3) };
            (e, Scalar::from_i64(c))
        })
        .collect();
    TruncatedSeries::from_terms(Var::T, &terms, k)
}

fn random_arc(rng: &mut ChaCha8Rng, q: usize, lo: i64, k: i64) -> ArcMatrix {
    ArcMatrix::new((0..q).map(|_| (0..q).map(|_| random_series(rng, lo, k)).collect()).collect()).unwrap()
}

/// Holomorphic with invertible value at 0: identity plus a random multiple of t.
fn random_holomorphic(rng: &mut ChaCha8Rng, q: usize, k: i64) -> ArcMatrix {
    let mut rows = Vec::new();
    for i in 0..q {
        let mut row = Vec::new();
        for j in 0..q {
            let mut terms: Vec<(i64, Scalar)> = (1..=k).map(|e| (e, Scalar::from_i64(rng.gen_range(-2..=2)))).collect();
            let c0 = if i == j { rng.gen_range(1..=3) } else if j > i { rng.gen_range(-2..=2) } else { 0 };
            terms.push((0, Scalar::from_i64(c0)));
            row.push(TruncatedSeries::from_terms(Var::T, &terms, k));
        }
        rows.push(row);
    }
    ArcMatrix::new(rows).unwrap()
}

#[test]
fn factorization_roundtrip_and_flag_uniqueness() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let g = random_arc(&mut rng, 3, -2, 16);
        let a = smith_factorize_with(&g, PivotStrategy::RowMajor).unwrap();
        let b = smith_factorize_with(&g, PivotStrategy::ColumnMajorLast).unwrap();
        assert!(a.reconstruct().certified_eq(&g));
        assert!(b.reconstruct().certified_eq(&g));
        assert_eq!(a.weight_sum(), g.det().valuation().unwrap());
        assert_eq!(a.weights, b.weights);
        assert!(a.flag.same_flag(&b.flag));
        assert_eq!(a.flag.dim(), 3);
    }
}

#[test]
fn structured_flags_agree() {
    // arcs with separated weights: h·t^A·k for holomorphic h, k
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let w = [rng.gen_range(-2..=2), rng.gen_range(-2..=2), rng.gen_range(-2..=2)];
        let g = random_holomorphic(&mut rng, 3, 16)
            .mul(&ArcMatrix::diagonal_powers(&w, 16))
            .unwrap()
            .mul(&random_holomorphic(&mut rng, 3, 16))
            .unwrap();
        let a = smith_factorize_with(&g, PivotStrategy::RowMajor).unwrap();
        let b = smith_factorize_with(&g, PivotStrategy::ColumnMajorLast).unwrap();
        let mut sorted = w.to_vec();
        sorted.sort();
        assert_eq!(a.weights, sorted);
        assert!(a.flag.same_flag(&b.flag));
    }
}

#[test]
fn equivalence_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let f = HomogeneousForm::parse("x0^2", 2).unwrap();
    let g = ArcMatrix::diagonal_powers(&[1, -1], 16);
    for _ in 0..50 {
        let h = random_holomorphic(&mut rng, 2, 16);
        let hg = h.mul(&g).unwrap();
        assert_eq!(nu_of_arc(&hg, &f).unwrap().nu, 2);
    }
    let f = HomogeneousForm::parse("x^2*y + 2*y*z^2 - x*z^2 + z^3", 3).unwrap();
    for _ in 0..20 {
        let g = random_arc(&mut rng, 3, -1, 12);
        let base = nu_of_arc(&g, &f).unwrap();
        let h = random_holomorphic(&mut rng, 3, 12);
        assert_eq!(nu_of_arc(&h.mul(&g).unwrap(), &f).unwrap().nu, base.nu);
    }
}

#[test]
fn reparametrization_keeps_psi() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let f = HomogeneousForm::parse("x^3 + y^3 + z^3 - x*y*z", 3).unwrap();
    for _ in 0..10 {
        let g = random_arc(&mut rng, 3, -1, 10);
        let base = nu_of_arc(&g, &f).unwrap();
        for k in [2, 3] {
            let gk = g.substitute_power(k);
            let inv = nu_of_arc(&gk, &f).unwrap();
            assert_eq!(inv.psi, base.psi);
            assert_eq!(inv.nu, k * base.nu);
        }
    }
}

#[test]
fn nu_unchanged_by_scaling_form() {
    let g = ArcMatrix::diagonal_powers(&[2, 0, -1], 10);
    let f = HomogeneousForm::parse("x*z + y^2 - 3*z^2", 3).unwrap();
    let a = nu_of_arc(&g, &f).unwrap();
    let b = nu_of_arc(&g, &f.scale(&Scalar::from_ratio(-5, 7))).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.psi, Some(Rational64::new(a.nu, 2)));
}

#[test]
fn binary_oracles_agree_on_grid() {
    let grid: Vec<Option<i64>> = vec![None, Some(0), Some(1), Some(-1), Some(2)];
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut checked = 0;
    for d in 1..=6 {
        for _ in 0..40 {
            let mut f = HomogeneousForm::parse("1", 2).unwrap();
            for _ in 0..d {
                // root [r:1] -> x0 - r x1, root at infinity -> x1
                let lin = match grid[rng.gen_range(0..grid.len())] {
                    None => HomogeneousForm::parse("x1", 2).unwrap(),
                    Some(r) => HomogeneousForm::linear(&[Scalar::one(), Scalar::from_i64(-r)]),
                };
                f = f.mul(&lin).unwrap();
            }
            let rep = binary_form_stability(&f).unwrap();
            assert!(rep.one_ps_verdict.is_some());
            assert!(rep.oracles_agree(), "{f:?}");
            checked += 1;
        }
    }
    assert_eq!(checked, 240);
}

#[test]
fn sextic_two_step_degeneration() {
    // z·∏(x − λ_i y) + x^6 + y^6
    let mut f = HomogeneousForm::parse("z", 3).unwrap();
    for lam in [0, 1, -1, 2, 3] {
        f = f.mul(&HomogeneousForm::linear(&[Scalar::one(), Scalar::from_i64(-lam), Scalar::zero()])).unwrap();
    }
    f = f.add(&HomogeneousForm::parse("x^6 + y^6", 3).unwrap()).unwrap();

    // the inverse subgroup: weights −(1,1,−2)
    let (first, _) = one_ps_limit(&f, &[-1, -1, 2], Direction::Plus).unwrap();
    assert_eq!(first, one_ps_limit(&f, &[1, 1, -2], Direction::Minus).unwrap().0);
    assert!(first.terms().all(|(e, _)| e[2] == 1));

    // h moves z = 0 to x − 5y = z
    let mu = 5;
    let h_inv = vec![
        vec![Scalar::one(), Scalar::zero(), Scalar::zero()],
        vec![Scalar::zero(), Scalar::one(), Scalar::zero()],
        vec![Scalar::one(), Scalar::from_i64(-mu), Scalar::from_i64(-1)],
    ];
    let h = orbitforge::algebra::linalg::inverse(&h_inv).unwrap();
    let r = two_step_limit(&f, &[-1, -1, 2], &h, &[1, 1, -2]).unwrap();
    assert!(r.last.terms().all(|(e, _)| e[2] == 0));
    let o = [Scalar::zero(), Scalar::zero(), Scalar::one()];
    let (_, lines) = linear_factors_through_point(&r.last, &o).unwrap().unwrap();
    assert_eq!(lines.len(), 6);
    let five_y = HomogeneousForm::linear(&[Scalar::one(), Scalar::from_i64(-mu), Scalar::zero()]);
    assert!(lines.iter().any(|l| orbitforge::algebra::linalg::same_span(&[l.to_vector()], &[five_y.to_vector()])));
}

#[test]
fn two_step_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..10 {
        let terms = orbitforge::algebra::monomials(3, 4).into_iter().map(|e| (e, Scalar::from_i64(rng.gen_range(1..=5))));
        let f = HomogeneousForm::from_terms(3, 4, terms).unwrap();
        let h: Vec<Vec<Scalar>> =
            (0..3).map(|i| (0..3).map(|j| Scalar::from_i64(if i == j { 2 } else { rng.gen_range(-1..=1) })).collect()).collect();
        let r = two_step_limit(&f, &[1, 1, -2], &h, &[1, 1, -2]).unwrap();
        let (again, _) = one_ps_limit(&r.last, &[1, 1, -2], Direction::Plus).unwrap();
        assert_eq!(again, r.last);
    }
}
