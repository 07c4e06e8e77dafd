//! The descendant at power `p`: limit component `B′`, numeric samples of
//! `W′`, degree bookkeeping and the comparison checks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chart::{ChartSource, Section};
use super::curve::{normalize_point, projective_distance, DoublePoint, RationalCurve};
use super::family::{divide_form, ComponentB, PlaneCurveFamily};
use super::filtration::{compute_filtration, plane_kernel, restricted_sections, Filtration, KernelSpec, OrderSystem};
use crate::algebra::linalg::{determinant, rank};
use crate::algebra::{linear_solve_exact, monomials, HomogeneousForm, LinearSolution, Poly, RatFn, Scalar};
use crate::error::{Error, Result};
use crate::numeric::{extrapolate_to_zero_c64, poly_roots};

/// `t_k = base^k` for `k = 1..=count`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TSequence {
    pub base: Scalar,
    pub count: usize,
}

impl Default for TSequence {
    fn default() -> Self {
        Self { base: Scalar::from_ratio(1, 2), count: 20 }
    }
}

impl TSequence {
    pub fn values(&self) -> Vec<f64> {
        let b = self.base.to_complex().re;
        (1..=self.count).map(|k| b.powi(k as i32)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct DescendOptions {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    /// Defaults to `10·p·d`.
    pub cap: Option<usize>,
    /// Seed for randomized complements and extensions.
    pub alt_seed: Option<u64>,
    pub t_sequence: TSequence,
}

impl Default for DescendOptions {
    fn default() -> Self {
        Self { samples: 50, seed: 0, tol: 1e-6, cap: None, alt_seed: None, t_sequence: TSequence::default() }
    }
}

pub fn ratfn_text(r: &RatFn) -> String {
    if r.den().is_constant() {
        r.num().scale(&r.den().coeff(0).inv().expect("nonzero")).to_string_in("v")
    } else {
        format!("({})/({})", r.num().to_string_in("v"), r.den().to_string_in("v"))
    }
}

/// One application of the construction on a chart.
pub struct DescentStep {
    pub p: u32,
    pub filtration: Filtration,
    pub sections: Vec<Section>,
    pub f: Vec<RatFn>,
    pub curve: RationalCurve,
    pub map_degree: usize,
    pub nodes: Vec<DoublePoint>,
    pub system: OrderSystem,
}

pub fn descend_step(source: ChartSource, p: u32, kernel: KernelSpec, cap: usize, alt_seed: Option<u64>) -> Result<DescentStep> {
    let mut system = OrderSystem::new(source, p)?;
    let filtration = compute_filtration(&mut system, kernel, cap, alt_seed)?;
    let r = restricted_sections(&mut system, &filtration, alt_seed)?;
    let curve = RationalCurve::from_ratfns(&r.f)?;
    let map_degree = curve.map_degree();
    let nodes = if map_degree == 1 { curve.double_points()? } else { Vec::new() };
    Ok(DescentStep { p, filtration, sections: r.sections, f: r.f, curve, map_degree, nodes, system })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SampleSource {
    B,
    R,
}

#[derive(Clone, Debug, Serialize)]
pub struct Sample {
    pub index: usize,
    pub component: SampleSource,
    /// Extrapolated limit, normalized so the largest coordinate is 1.
    pub point: Vec<[f64; 2]>,
    pub predicted: Vec<[f64; 2]>,
    /// Distance of the limit to `B′`.
    pub distance: f64,
    pub predicted_distance: f64,
    pub extrapolation_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub deg_b_prime: usize,
    pub deg_w_prime: usize,
    /// Degree of the image of the residual `R = F_0/P`; `None` when not determined exactly.
    pub extra_degree: Option<usize>,
    pub collapsed_residual: bool,
    pub conserved: Option<bool>,
    pub node_count: usize,
    pub max_distance: f64,
    pub max_extrapolation_error: f64,
    pub samples_within_tolerance: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DescendantRecord {
    pub p: u32,
    pub filtration: Filtration,
    pub sections: Vec<Section>,
    pub f: Vec<String>,
    pub b_prime: Vec<String>,
    pub map_degree: usize,
    pub nodes: Vec<DoublePoint>,
    pub samples: Vec<Sample>,
    pub summary: Summary,
    #[serde(skip)]
    pub curve: RationalCurve,
}

impl DescendantRecord {
    pub fn samples_csv(&self) -> String {
        let mut out = String::from("sample,component,distance,extrapolation_error\n");
        for s in &self.samples {
            out.push_str(&format!("{},{:?},{:e},{:e}\n", s.index, s.component, s.distance, s.extrapolation_error));
        }
        out
    }
}

/// Truncation cap used when none is given.
pub fn default_cap(p: u32, d: u32) -> usize {
    (10 * p * d).max(10) as usize
}

/// Degree of the image of `R` in the descendant, with a collapse flag.
fn residual_image(b: &ComponentB, filt: &Filtration) -> Result<(Option<usize>, bool)> {
    let r = &b.residual;
    let e = r.degree();
    if e == 0 {
        return Ok((Some(0), true));
    }
    let p = filt.p;
    let on_r = |v: &Vec<Scalar>| -> Result<bool> { Ok(divide_form(&filt.form(v), r)?.is_none()) };
    let mut top = None;
    for (v, &mu) in filt.basis.iter().zip(&filt.weights) {
        if on_r(v)? {
            top = Some(top.map_or(mu, |t: usize| t.max(mu)));
        }
    }
    let Some(top) = top else { return Ok((Some(0), true)) };
    let kernel: Vec<Vec<Scalar>> = if p >= e {
        monomials(3, p - e).into_iter().map(|m| r.mul(&HomogeneousForm::monomial(m, Scalar::one())).map(|f| f.to_vector())).collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let mut rows = kernel.clone();
    rows.extend(filt.basis.iter().zip(&filt.weights).filter(|(_, &mu)| mu == top).map(|(v, _)| v.clone()));
    let k = if kernel.is_empty() { 0 } else { rank(&kernel) };
    let restricted = rank(&rows) - k;
    if restricted == 1 {
        return Ok((Some(0), true));
    }
    let full = monomials(3, p).len() - k;
    Ok(((top == 0 && restricted == full).then_some(p as usize * e as usize), false))
}

fn eval_section(s: &Section, x: &[Complex64], t: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut tp = 1.0;
    for f in &s.parts {
        if !f.is_zero() {
            acc += f.eval(x) * tp;
        }
        tp *= t;
    }
    acc
}

fn to_pairs(p: &[Complex64]) -> Vec<[f64; 2]> {
    p.iter().map(|z| [z.re, z.im]).collect()
}

struct LineSamples {
    samples: Vec<(SampleSource, Vec<Complex64>, Vec<Complex64>, f64)>,
}

/// Limits along one line `a + s·c` through the fibres, or `None` when the
/// line is degenerate (missing roots, roots near `B ∩ R`, ambiguous tracking).
fn line_samples(fam: &PlaneCurveFamily, b: &ComponentB, step: &DescentStep, ts: &[f64], a: &[Scalar], c: &[Scalar]) -> Option<LineSamples> {
    let vals: Vec<Poly> = (0..3).map(|i| Poly::new(vec![a[i].clone(), c[i].clone()])).collect();
    let restricted: Vec<Vec<Complex64>> = fam.parts.iter().map(|f| f.eval(&vals).coeffs().iter().map(Scalar::to_complex).collect()).collect();
    let d = fam.degree() as usize;
    let coeffs_at = |t: f64| -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); d + 1];
        let mut tp = 1.0;
        for r in &restricted {
            for (o, x) in out.iter_mut().zip(r) {
                *o += x * tp;
            }
            tp *= t;
        }
        out
    };
    let c0 = coeffs_at(0.0);
    if c0.len() <= d || c0[d].norm() < 1e-9 {
        return None;
    }
    let point = |s: Complex64| -> Vec<Complex64> { (0..3).map(|i| a[i].to_complex() + s * c[i].to_complex()).collect() };
    let roots0 = poly_roots(&c0);
    for (i, r) in roots0.iter().enumerate() {
        if roots0.iter().skip(i + 1).any(|q| (q - r).norm() < 1e-3) {
            return None;
        }
    }
    // track from t = 0 outward
    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.sort_by(|&i, &j| ts[i].total_cmp(&ts[j]));
    let mut tracked = vec![vec![Complex64::new(0.0, 0.0); ts.len()]; d];
    let mut prev = roots0.clone();
    for &k in &order {
        let roots = poly_roots(&coeffs_at(ts[k]));
        let mut used = vec![false; roots.len()];
        for (r, pr) in prev.iter_mut().enumerate() {
            let (j, _) = roots.iter().enumerate().filter(|(j, _)| !used[*j]).min_by(|x, y| (x.1 - *pr).norm().total_cmp(&(y.1 - *pr).norm()))?;
            used[j] = true;
            *pr = roots[j];
            tracked[r][k] = roots[j];
        }
    }
    let bcurve = RationalCurve::from_polys(b.param.clone()).ok()?;
    let mut out = Vec::new();
    for (r, s0) in roots0.iter().enumerate() {
        let x0 = normalize_point(&point(*s0));
        let pv = b.p.eval(&x0).norm();
        let rv = b.residual.eval(&x0).norm();
        if pv < 1e-7 && rv < 1e-7 {
            return None;
        }
        let (source, predicted) = if pv <= rv {
            let (_, v0) = bcurve.nearest(&x0);
            (SampleSource::B, step.curve.image(&v0))
        } else {
            let vals: Vec<Complex64> = step.sections.iter().map(|s| s.parts[0].eval(&x0)).collect();
            let scale = vals.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let top = step.sections.iter().zip(&vals).filter(|(_, z)| z.norm() > 1e-9 * scale).map(|(s, _)| s.mu).max().unwrap_or(0);
            let pred = step.sections.iter().zip(&vals).map(|(s, z)| if s.mu == top { *z } else { Complex64::new(0.0, 0.0) }).collect();
            (SampleSource::R, pred)
        };
        let idx = (0..predicted.len()).max_by(|&i, &j| predicted[i].norm().total_cmp(&predicted[j].norm())).unwrap_or(0);
        let ys: Vec<Vec<Complex64>> = (0..ts.len())
            .map(|k| {
                let x = point(tracked[r][k]);
                let y: Vec<Complex64> = step.sections.iter().map(|s| eval_section(s, &x, ts[k]) / ts[k].powi(s.mu as i32)).collect();
                let den = y[idx];
                y.iter().map(|z| z / den).collect()
            })
            .collect();
        let (limit, err) = extrapolate(ts, &ys)?;
        out.push((source, limit, predicted, err));
    }
    Some(LineSamples { samples: out })
}

/// Neville extrapolation on windows of five consecutive `t`, choosing the
/// window that agrees best with its neighbour.
fn extrapolate(ts: &[f64], ys: &[Vec<Complex64>]) -> Option<(Vec<Complex64>, f64)> {
    const W: usize = 5;
    if ts.len() < W + 1 {
        return None;
    }
    let n = ys[0].len();
    let est: Vec<Vec<Complex64>> = (0..=ts.len() - W)
        .map(|w| (0..n).map(|i| extrapolate_to_zero_c64(&ts[w..w + W], &ys[w..w + W].iter().map(|y| y[i]).collect::<Vec<_>>())).collect())
        .collect();
    let (w, err) = (0..est.len() - 1)
        .map(|w| (w, est[w].iter().zip(&est[w + 1]).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)))
        .filter(|(_, e)| e.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    Some((est[w].clone(), err))
}

fn random_line(rng: &mut ChaCha8Rng) -> (Vec<Scalar>, Vec<Scalar>) {
    let mut pick = || (0..3).map(|_| Scalar::from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect::<Vec<_>>();
    (pick(), pick())
}

fn sample_w_prime(fam: &PlaneCurveFamily, b: &ComponentB, step: &DescentStep, opts: &DescendOptions) -> Result<Vec<Sample>> {
    let ts = opts.t_sequence.values();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut samples: Vec<Sample> = Vec::new();
    let d = fam.degree() as usize;
    let mut attempts = 0;
    while samples.len() < opts.samples {
        let need = (opts.samples - samples.len()).div_ceil(d) + 2;
        attempts += need;
        if attempts > 50 * opts.samples + 100 {
            return Err(Error::LimitUnresolved(format!("only {} usable samples", samples.len())));
        }
        let lines: Vec<_> = (0..need).map(|_| random_line(&mut rng)).collect();
        let got: Vec<Option<LineSamples>> = lines.par_iter().map(|(a, c)| line_samples(fam, b, step, &ts, a, c)).collect();
        for ls in got.into_iter().flatten() {
            for (component, limit, predicted, err) in ls.samples {
                if samples.len() == opts.samples {
                    break;
                }
                let (distance, _) = step.curve.nearest(&limit);
                samples.push(Sample {
                    index: samples.len(),
                    component,
                    predicted_distance: projective_distance(&limit, &predicted),
                    point: to_pairs(&normalize_point(&limit)),
                    predicted: to_pairs(&normalize_point(&predicted)),
                    distance,
                    extrapolation_error: err,
                });
            }
        }
    }
    Ok(samples)
}

/// The descendant of a plane family at power `p`.
pub fn descendant(fam: &PlaneCurveFamily, b: &ComponentB, p: u32, opts: &DescendOptions) -> Result<DescendantRecord> {
    if p == 0 {
        return Err(Error::Invalid("power p must be at least 1".into()));
    }
    let cap = opts.cap.unwrap_or_else(|| default_cap(p, fam.degree()));
    let source = ChartSource::Plane { fam: fam.clone(), b: b.clone() };
    let step = descend_step(source, p, KernelSpec::Known(plane_kernel(fam, p)), cap, opts.alt_seed)?;
    let samples = if opts.samples > 0 { sample_w_prime(fam, b, &step, opts)? } else { Vec::new() };
    let (extra_degree, collapsed_residual) = residual_image(b, &step.filtration)?;
    let deg_b_prime = step.curve.degree();
    let deg_w_prime = p as usize * fam.degree() as usize;
    let summary = Summary {
        deg_b_prime,
        deg_w_prime,
        extra_degree,
        collapsed_residual,
        conserved: extra_degree.map(|e| e + deg_b_prime == deg_w_prime),
        node_count: step.nodes.len(),
        max_distance: samples.iter().map(|s| s.distance).fold(0.0, f64::max),
        max_extrapolation_error: samples.iter().map(|s| s.extrapolation_error).fold(0.0, f64::max),
        samples_within_tolerance: samples.iter().all(|s| s.distance <= opts.tol || (!collapsed_residual && s.component == SampleSource::R && s.predicted_distance <= opts.tol)),
    };
    Ok(DescendantRecord {
        p,
        f: step.f.iter().map(ratfn_text).collect(),
        b_prime: step.curve.to_strings(),
        map_degree: step.map_degree,
        nodes: step.nodes.clone(),
        sections: step.sections.clone(),
        filtration: step.filtration.clone(),
        curve: step.curve.clone(),
        samples,
        summary,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop4Report {
    pub deg_b_prime: usize,
    pub deg_w_prime: usize,
    pub deg_b: u32,
    pub deg_w: u32,
    pub ratio: f64,
    pub base_ratio: f64,
    pub holds: bool,
    pub strict: bool,
    pub reduced: bool,
}

pub fn prop4_checks(rec: &DescendantRecord, deg_b: u32, deg_w: u32) -> Prop4Report {
    let (bp, wp) = (rec.summary.deg_b_prime, rec.summary.deg_w_prime);
    let lhs = bp as u64 * deg_w as u64;
    let rhs = deg_b as u64 * wp as u64;
    Prop4Report {
        deg_b_prime: bp,
        deg_w_prime: wp,
        deg_b,
        deg_w,
        ratio: bp as f64 / wp as f64,
        base_ratio: deg_b as f64 / deg_w as f64,
        holds: lhs >= rhs,
        strict: lhs > rhs,
        reduced: rec.map_degree == 1,
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Invariants {
    pub ambient: usize,
    pub degree: usize,
    pub map_degree: usize,
    pub nodes: usize,
    /// Components of the limit cycle, when determined.
    pub components: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompositionReport {
    pub p: u32,
    pub q: u32,
    pub composed: Invariants,
    pub direct: Invariants,
    pub invariants_agree: bool,
    /// `None` when the ambient dimensions differ and no map is sought.
    pub linear_match: Option<bool>,
}

/// `T` with `T·a(v) = b(v)` identically and `det T ≠ 0`.
pub fn linear_match(a: &RationalCurve, b: &RationalCurve) -> Result<Option<Vec<Vec<Scalar>>>> {
    let n = a.ambient();
    if b.ambient() != n || a.degree() != b.degree() {
        return Ok(None);
    }
    let top = a.degree();
    let m: Vec<Vec<Scalar>> = (0..=top).map(|k| a.coords().iter().map(|p| p.coeff(k)).collect()).collect();
    let mut t = Vec::new();
    for bj in b.coords() {
        let rhs: Vec<Scalar> = (0..=top).map(|k| bj.coeff(k)).collect();
        match linear_solve_exact(&m, &rhs, n)? {
            LinearSolution::Solved { particular, .. } => t.push(particular),
            LinearSolution::Inconsistent => return Ok(None),
        }
    }
    Ok((!determinant(&t).is_zero()).then_some(t))
}

fn invariants(step: &DescentStep, components: Option<usize>) -> Invariants {
    Invariants { ambient: step.curve.ambient(), degree: step.curve.degree(), map_degree: step.map_degree, nodes: step.nodes.len(), components }
}

fn components(b: &ComponentB, step: &DescentStep) -> Result<Option<usize>> {
    Ok(match residual_image(b, &step.filtration)? {
        (_, true) => Some(1),
        (Some(_), false) if b.residual.degree() == 1 => Some(2),
        _ => None,
    })
}

/// Compare the descendant at power `q` of `W′_p` with `W′_{pq}`.
pub fn composition_check(fam: &PlaneCurveFamily, b: &ComponentB, p: u32, q: u32, alt_seed: Option<u64>) -> Result<CompositionReport> {
    let plane = ChartSource::Plane { fam: fam.clone(), b: b.clone() };
    let d = fam.degree();
    let first = descend_step(plane.clone(), p, KernelSpec::Known(plane_kernel(fam, p)), default_cap(p, d), alt_seed)?;
    let first_components = components(b, &first)?;
    let direct = descend_step(plane.clone(), p * q, KernelSpec::Known(plane_kernel(fam, p * q)), default_cap(p * q, d), alt_seed)?;
    let direct_inv = invariants(&direct, components(b, &direct)?);
    let composed_inv = if q == 1 {
        invariants(&first, first_components)
    } else {
        let source = ChartSource::Descended { base: Box::new(plane), sections: first.sections.clone() };
        let second = descend_step(source, q, KernelSpec::Quotient(fam.sections(p * q)), default_cap(p * q, d), alt_seed)?;
        // with M = 0 the modified family is a linear re-embedding of the original
        let comps = if first.filtration.weights.iter().all(|&w| w == 0) {
            direct_inv.components
        } else if first_components == Some(1) {
            Some(1)
        } else {
            None
        };
        let inv = invariants(&second, comps);
        let lm = linear_match(&second.curve, &direct.curve)?.is_some();
        let agree = inv == direct_inv;
        return Ok(CompositionReport { p, q, composed: inv, direct: direct_inv, invariants_agree: agree, linear_match: (second.curve.ambient() == direct.curve.ambient()).then_some(lm) });
    };
    let lm = linear_match(&first.curve, &direct.curve)?.is_some();
    Ok(CompositionReport { p, q, invariants_agree: composed_inv == direct_inv, composed: composed_inv, direct: direct_inv, linear_match: Some(lm) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(s: &str) -> HomogeneousForm {
        HomogeneousForm::parse(s, 3).unwrap()
    }

    fn worked() -> (PlaneCurveFamily, ComponentB) {
        let fam = PlaneCurveFamily::new(vec![form("x^2*z - x*z^2 - x*y^2 + y^2*z"), form("x^3 + y^3 + z^3")]).unwrap();
        let b = ComponentB::new(&fam, form("x*z - y^2"), vec![Poly::from_i64s(&[1]), Poly::from_i64s(&[0, 1]), Poly::from_i64s(&[0, 0, 1])], vec![Scalar::zero(), Scalar::zero(), Scalar::one()]).unwrap();
        (fam, b)
    }

    #[test]
    fn worked_descendant() {
        let (fam, b) = worked();
        let opts = DescendOptions { samples: 12, ..Default::default() };
        let rec = descendant(&fam, &b, 2, &opts).unwrap();
        assert_eq!(rec.summary.deg_b_prime, 6);
        assert_eq!(rec.summary.node_count, 1);
        assert_eq!(rec.summary.extra_degree, Some(0));
        assert_eq!(rec.summary.conserved, Some(true));
        assert!(rec.summary.samples_within_tolerance, "{:?}", rec.samples);
        let p4 = prop4_checks(&rec, 2, 3);
        assert!(p4.holds && p4.strict && p4.reduced);
    }

    #[test]
    fn power_one_keeps_w() {
        let (fam, b) = worked();
        let rec = descendant(&fam, &b, 1, &DescendOptions { samples: 9, ..Default::default() }).unwrap();
        assert_eq!(rec.summary.deg_b_prime, 2);
        assert_eq!(rec.summary.extra_degree, Some(1));
        assert_eq!(rec.filtration.dims, vec![3]);
        let p4 = prop4_checks(&rec, 2, 3);
        assert!(p4.holds && !p4.strict);
    }

    #[test]
    fn node_sits_at_the_weight_one_coordinate() {
        let (fam, b) = worked();
        let rec = descendant(&fam, &b, 2, &DescendOptions { samples: 0, ..Default::default() }).unwrap();
        let node = rec.nodes[0].exact.clone().expect("rational node");
        let top: Vec<usize> = rec.filtration.weights.iter().enumerate().filter(|(_, &w)| w == 1).map(|(i, _)| i).collect();
        assert_eq!(top.len(), 1);
        for (i, c) in node.iter().enumerate() {
            assert_eq!(c.is_zero(), i != top[0]);
        }
    }

    #[test]
    fn composition_cases() {
        let (fam, b) = worked();
        let r = composition_check(&fam, &b, 2, 1, None).unwrap();
        assert!(r.invariants_agree && r.linear_match == Some(true));
        let r = composition_check(&fam, &b, 1, 2, None).unwrap();
        assert!(r.invariants_agree && r.linear_match == Some(true), "{r:?}");
    }
}
