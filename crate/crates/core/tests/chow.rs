use nalgebra::DMatrix;
use num_complex::Complex64;
use orbitforge::algebra::{HomogeneousForm, Scalar, TruncatedSeries, Var};
use orbitforge::arcs::{flat_limit, ArcMatrix};
use orbitforge::chow::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_hermitian(rng: &mut ChaCha8Rng, q: usize) -> HermitianEndomorphism {
    let mut m = DMatrix::from_element(q, q, c(0.0, 0.0));
    for i in 0..q {
        m[(i, i)] = c(rng.gen_range(-1.5..1.5), 0.0);
        for j in i + 1..q {
            let z = c(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianEndomorphism::from_complex(m).unwrap()
}

fn random_conic(rng: &mut ChaCha8Rng) -> ParametrizedCycle {
    // image of (1, u, u²) under a random linear map
    let base = ParametrizedCycle::curve(vec![vec![c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]], 1);
    let g = DMatrix::from_fn(3, 3, |i, j| c(rng.gen_range(-1.0..1.0) + if i == j { 1.5 } else { 0.0 }, rng.gen_range(-0.5..0.5)));
    base.transform(&g)
}

#[test]
fn degree_self_check_and_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let spec = QuadratureSpec::default();
    for _ in 0..10 {
        let z = random_conic(&mut rng);
        let a = random_hermitian(&mut rng, 3);
        let i = integrate(&z, &a, &spec).unwrap();
        assert!((i.volume - 2.0).abs() < 1e-8, "{}", i.volume);
        let ch = chow_number(&z, &a, &spec).unwrap().value;
        let ev = a.eigenvalues();
        let shift = a.trace() / 3.0;
        assert!(ch >= ev[0] - shift - 1e-9 && ch <= ev[2] - shift + 1e-9);
    }
}

#[test]
fn random_conic_scans_are_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let spec = QuadratureSpec::default();
    let grid: Vec<f64> = (0..41).map(|k| -2.0 + 0.1 * k as f64).collect();
    for _ in 0..3 {
        let z = random_conic(&mut rng);
        let a = random_hermitian(&mut rng, 3);
        let scan = monotonicity_scan(&z, &a, &grid, &spec).unwrap();
        assert!(scan.min_forward_difference >= -1e-7, "{}", scan.min_forward_difference);
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let z = random_conic(&mut rng);
    let a = random_hermitian(&mut rng, 3);
    let spec = QuadratureSpec::default();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| chow_number(&z, &a, &spec).unwrap().value)
    };
    let one = run(1);
    assert_eq!(one.to_bits(), run(4).to_bits());
    assert_eq!(one.to_bits(), run(7).to_bits());
}

fn lin(c: &[i64]) -> HomogeneousForm {
    HomogeneousForm::linear(&c.iter().map(|&x| Scalar::from_i64(x)).collect::<Vec<_>>())
}

fn series(rng: &mut ChaCha8Rng, lo: i64, k: i64) -> TruncatedSeries {
    let v = rng.gen_range(lo..=1);
    let terms: Vec<(i64, Scalar)> = (v..=v + 3).map(|e| (e, Scalar::from_i64(rng.gen_range(-2..=2)))).collect();
    TruncatedSeries::from_terms(Var::T, &terms, k)
}

/// Unipotent upper-triangular Laurent matrix times `t^w`.
fn unipotent_diag(rng: &mut ChaCha8Rng, w: &[i64], k: i64) -> ArcMatrix {
    let q = w.len();
    let rows = (0..q)
        .map(|i| {
            (0..q)
                .map(|j| match i.cmp(&j) {
                    std::cmp::Ordering::Equal => TruncatedSeries::one(Var::T, k),
                    std::cmp::Ordering::Less => series(rng, -1, k),
                    std::cmp::Ordering::Greater => TruncatedSeries::zero(Var::T, k),
                })
                .collect()
        })
        .collect();
    ArcMatrix::new(rows).unwrap().mul(&ArcMatrix::diagonal_powers(w, k)).unwrap()
}

fn limit_cycle(g: &ArcMatrix, lines: &[HomogeneousForm]) -> (HomogeneousForm, ParametrizedCycle) {
    let mut f = lines[0].clone();
    for l in &lines[1..] {
        f = f.mul(l).unwrap();
    }
    let limits: Vec<HomogeneousForm> = lines.iter().map(|l| flat_limit(g, l).unwrap().0).collect();
    (f, ParametrizedCycle::from_linear_factors(&limits).unwrap())
}

#[test]
fn equivariant_arcs_attain_equality() {
    let spec = QuadratureSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..8 {
        let w: Vec<i64> = (0..3).map(|_| rng.gen_range(-2..=2)).collect();
        let g = ArcMatrix::diagonal_powers(&w, 12);
        let lines: Vec<HomogeneousForm> = (0..2).map(|_| lin(&[rng.gen_range(-3..=3), rng.gen_range(-3..=3), rng.gen_range(1..=3)])).collect();
        let (f, y) = limit_cycle(&g, &lines);
        let r = lemma1_check(&g, &f, &y, &spec).unwrap();
        assert!(r.margin.abs() < 1e-6, "{r:?}");
    }
}

#[test]
fn non_equivariant_arcs_satisfy_inequality() {
    let spec = QuadratureSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let mut strict = 0;
    for _ in 0..20 {
        let w: Vec<i64> = (0..3).map(|_| rng.gen_range(-2..=2)).collect();
        let g = unipotent_diag(&mut rng, &w, 14);
        let lines: Vec<HomogeneousForm> = (0..2).map(|_| lin(&[rng.gen_range(-3..=3), rng.gen_range(1..=3), rng.gen_range(-3..=3)])).collect();
        let (f, y) = limit_cycle(&g, &lines);
        let r = lemma1_check(&g, &f, &y, &spec).unwrap();
        assert!(r.margin >= -1e-6, "{r:?} for weights {w:?}");
        if r.margin > 1e-3 {
            strict += 1;
        }
    }
    assert!(strict > 0);
}

#[test]
fn binary_lemma_check() {
    let spec = QuadratureSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for _ in 0..20 {
        let w: Vec<i64> = (0..2).map(|_| rng.gen_range(-2..=2)).collect();
        let g = unipotent_diag(&mut rng, &w, 14);
        let lines: Vec<HomogeneousForm> = (0..3).map(|_| lin(&[rng.gen_range(1..=3), rng.gen_range(-3..=3)])).collect();
        let (f, y) = limit_cycle(&g, &lines);
        let r = lemma1_check(&g, &f, &y, &spec).unwrap();
        assert!(r.margin >= -1e-9, "{r:?}");
    }
}

#[test]
fn futaki_sequence_on_concurrent_lines() {
    use orbitforge::arcs::examples::*;
    use orbitforge::arcs::two_step_limit;
    let f = concurrent_sextic(&DEFAULT_LAMBDAS);
    let w = two_step_limit(&f, &FIRST_WEIGHTS, &shear(5), &SECOND_WEIGHTS).unwrap().last;
    let spec = QuadratureSpec::default();
    let seq = futaki_sequence(&SECOND_WEIGHTS, &w, &[1, 2, 3], &spec).unwrap();
    assert!(seq.terms.iter().all(|t| !t.beyond_degree));
    assert!(seq.extrapolated.is_finite() && seq.spread.is_finite());
    // lines through the fixed point: the measure is the cone over the pencil
    for t in &seq.terms {
        assert!((t.chow - weight_oracle(&SECOND_WEIGHTS, &[0, 1, 0], t.p)).abs() < 1e-8, "{t:?}");
    }

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/futaki_concurrent_lines.json");
    let golden: Vec<f64> = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let got: Vec<f64> = seq.terms.iter().map(|t| t.scaled).chain([seq.extrapolated]).collect();
    assert_eq!(golden.len(), got.len());
    for (g, x) in golden.iter().zip(&got) {
        assert!((g - x).abs() < 1e-8, "{golden:?} vs {got:?}");
    }
}
