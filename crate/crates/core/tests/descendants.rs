use orbitforge::algebra::{HomogeneousForm, Poly, RatFn, Scalar};
use orbitforge::descendants::chart::{vanishing_order, Section};
use orbitforge::descendants::filtration::{compute_filtration, plane_kernel, KernelSpec, OrderSystem, Valuation};
use orbitforge::descendants::input::FamilyInput;
use orbitforge::descendants::record::*;
use orbitforge::descendants::chart::ChartSource;

fn form(s: &str) -> HomogeneousForm {
    HomogeneousForm::parse(s, 3).unwrap()
}

#[test]
fn valuations_on_worked_family() {
    let (fam, b) = FamilyInput::worked_example().build().unwrap();
    assert_eq!(vanishing_order(&Section::plain(form("z^2")), &fam, &b, 12).unwrap(), 0);
    assert_eq!(vanishing_order(&Section::plain(form("x*z - y^2")), &fam, &b, 12).unwrap(), 1);
    assert_eq!(vanishing_order(&Section::plain(form("x*z - y^2").pow(2)), &fam, &b, 12).unwrap(), 2);
    // F itself vanishes on the total space
    let f = Section { mu: 0, parts: fam.parts.clone() };
    assert!(vanishing_order(&f, &fam, &b, 12).is_err());

    let mut sys = OrderSystem::new(ChartSource::Plane { fam: fam.clone(), b: b.clone() }, 2).unwrap();
    let zero = vec![Scalar::zero(); 6];
    assert_eq!(sys.max_extension(&zero, &[], 60).unwrap().nu_bar, Valuation::Infinite);
    let e = sys.max_extension(&form("x*z - y^2").to_vector(), &[], 60).unwrap();
    assert_eq!(e.nu_bar, Valuation::Finite(1));
    assert!(e.witness.unwrap().parts.len() == 1);
}

#[test]
fn kernel_elements_extend_forever() {
    let (fam, b) = FamilyInput::worked_example().build().unwrap();
    let k = plane_kernel(&fam, 3);
    assert_eq!(k.len(), 1);
    let mut sys = OrderSystem::new(ChartSource::Plane { fam, b }, 3).unwrap();
    assert_eq!(sys.max_extension(&k[0], &k, 60).unwrap().nu_bar, Valuation::Infinite);
    let filt = compute_filtration(&mut sys, KernelSpec::Known(k), 90, None).unwrap();
    assert_eq!(filt.dims[0], 9);
}

#[test]
fn worked_example_descendant() {
    let (fam, b) = FamilyInput::worked_example().build().unwrap();
    let rec = descendant(&fam, &b, 2, &DescendOptions::default()).unwrap();
    assert_eq!(rec.filtration.complement_dims, vec![5, 1]);
    assert_eq!(rec.summary.deg_b_prime, 6);
    assert_eq!(rec.nodes.len(), 1);
    assert_eq!(rec.samples.len(), 50);
    assert!(rec.samples.iter().any(|s| s.component == SampleSource::R));
    for s in &rec.samples {
        assert!(s.distance < 1e-6, "{s:?}");
    }
    assert_eq!(rec.summary.conserved, Some(true));
    // f for the weight-one section is -G/L on B
    let g = Poly::from_i64s(&[1, 0, 0, 1, 0, 0, 1]);
    let l = Poly::from_i64s(&[1, 0, -1]);
    assert_eq!(rec.f[5], ratfn_text(&RatFn::new(-&g, l).unwrap()));
    let csv = rec.samples_csv();
    assert_eq!(csv.lines().count(), 51);
}

#[test]
fn second_order_family() {
    let (fam, b) = FamilyInput::second_order_example().build().unwrap();
    let rec = descendant(&fam, &b, 2, &DescendOptions { samples: 15, ..Default::default() }).unwrap();
    assert_eq!(rec.filtration.complement_dims, vec![5, 0, 1]);
    assert_eq!(rec.summary.conserved, Some(true));
    assert!(rec.summary.samples_within_tolerance, "{:?}", rec.samples);
    assert!(prop4_checks(&rec, 2, 3).holds);
}

#[test]
fn power_one_is_the_original_curve() {
    let (fam, b) = FamilyInput::worked_example().build().unwrap();
    let rec = descendant(&fam, &b, 1, &DescendOptions { samples: 12, ..Default::default() }).unwrap();
    assert!(rec.filtration.weights.iter().all(|&w| w == 0));
    // B′ is the conic itself, up to the basis of linear forms
    let conic = orbitforge::descendants::curve::RationalCurve::from_polys(b.param.clone()).unwrap();
    assert!(linear_match(&rec.curve, &conic).unwrap().is_some());
    assert!(rec.summary.samples_within_tolerance);
    let p4 = prop4_checks(&rec, 2, 3);
    assert!(p4.holds && !p4.strict);
}

#[test]
fn choices_of_complements_and_extensions_do_not_matter() {
    let (fam, b) = FamilyInput::worked_example().build().unwrap();
    let opts = DescendOptions { samples: 0, ..Default::default() };
    let base = descendant(&fam, &b, 2, &opts).unwrap();
    for seed in 1..=3 {
        let alt = descendant(&fam, &b, 2, &DescendOptions { alt_seed: Some(seed), ..opts.clone() }).unwrap();
        assert!(linear_match(&alt.curve, &base.curve).unwrap().is_some(), "seed {seed}");
    }
    let (fam, b) = FamilyInput::second_order_example().build().unwrap();
    let base = descendant(&fam, &b, 2, &opts).unwrap();
    let alt = descendant(&fam, &b, 2, &DescendOptions { alt_seed: Some(9), ..opts.clone() }).unwrap();
    assert!(linear_match(&alt.curve, &base.curve).unwrap().is_some());
}

#[test]
fn composition_of_descendants() {
    let (fam, b) = FamilyInput::worked_example().build().unwrap();
    let r = composition_check(&fam, &b, 2, 2, None).unwrap();
    assert!(r.invariants_agree, "{r:?}");
}

#[test]
fn strict_inequality_when_b_is_a_line() {
    // W = line ∪ conic with B the line: B′ gains degree from the collapse
    let fam = orbitforge::descendants::family::PlaneCurveFamily::new(vec![form("x^2*z - x*z^2 - x*y^2 + y^2*z"), form("x^3 + y^3 + z^3")]).unwrap();
    let b = orbitforge::descendants::family::ComponentB::new(&fam, form("x - z"), vec![Poly::from_i64s(&[1]), Poly::from_i64s(&[0, 1]), Poly::from_i64s(&[1])], vec![Scalar::one(), Scalar::zero(), Scalar::zero()]).unwrap();
    let rec = descendant(&fam, &b, 2, &DescendOptions { samples: 0, ..Default::default() }).unwrap();
    let p4 = prop4_checks(&rec, 1, 3);
    assert!(p4.holds, "{p4:?}");
    if let Some(c) = rec.summary.conserved {
        assert!(c, "{:?}", rec.summary);
    }
}
