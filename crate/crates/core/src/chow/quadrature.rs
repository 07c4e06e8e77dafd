use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{CPoly, CurveComponent, HermitianEndomorphism, ParametrizedCycle, QuadratureSpec};
use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre, pairwise_sum};

/// `H(x) = ⟨x, Ax⟩ / |x|²`.
pub fn hamiltonian(a: &HermitianEndomorphism, x: &[Complex64]) -> Result<f64> {
    if x.len() != a.dim() {
        return Err(Error::DimensionMismatch(format!("point in C^{} for an endomorphism of C^{}", x.len(), a.dim())));
    }
    let n2: f64 = x.iter().map(|c| c.norm_sqr()).sum();
    if n2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(quadratic(a.matrix(), x) / n2)
}

fn quadratic(m: &DMatrix<Complex64>, x: &[Complex64]) -> f64 {
    let n = x.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let mut ax = Complex64::new(0.0, 0.0);
        for j in 0..n {
            ax += m[(i, j)] * x[j];
        }
        acc += x[i].conj() * ax;
    }
    acc.re
}

/// Volume and `∫ H dμ` over a cycle, with the change between the last two
/// resolutions as error estimate.
#[derive(Clone, Debug, Serialize)]
pub struct CycleIntegral {
    pub volume: f64,
    pub h_integral: f64,
    pub error: f64,
    pub degree: usize,
    /// One entry per curve component and chart, before multiplicities.
    pub charts: Vec<ChartIntegral>,
}

/// Contribution of one chart: `|u| <= 1` or its inversion `|w| <= 1`, `w = 1/u`.
#[derive(Clone, Debug, Serialize)]
pub struct ChartIntegral {
    pub component: usize,
    pub chart: &'static str,
    pub mass: f64,
    pub h_integral: f64,
    pub error: f64,
}

fn eval_with_derivative(p: &CPoly, u: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for c in p.iter().rev() {
        d = d * u + v;
        v = v * u + c;
    }
    (v, d)
}

/// Fubini–Study density (w.r.t. Lebesgue measure on the chart) and Hamiltonian at `u`.
fn density_and_h(param: &[CPoly], m: &DMatrix<Complex64>, u: Complex64, phi: &mut Vec<Complex64>) -> (f64, f64) {
    phi.clear();
    let mut n2 = 0.0;
    let mut d2 = 0.0;
    let mut cross = Complex64::new(0.0, 0.0);
    for p in param {
        let (v, d) = eval_with_derivative(p, u);
        n2 += v.norm_sqr();
        d2 += d.norm_sqr();
        cross += v.conj() * d;
        phi.push(v);
    }
    let rho = ((n2 * d2 - cross.norm_sqr()) / (PI * n2 * n2)).max(0.0);
    (rho, quadratic(m, phi) / n2)
}

/// A polar cell `[r0,r1] × [t0,t1]` of the unit disk with its tensor Gauss rule values.
#[derive(Clone, Copy)]
struct Cell {
    r0: f64,
    r1: f64,
    t0: f64,
    t1: f64,
    depth: usize,
    mass: f64,
    h: f64,
    err: f64,
}

struct Rules {
    fine: (Vec<f64>, Vec<f64>),
    coarse: (Vec<f64>, Vec<f64>),
}

impl Rules {
    fn new() -> Self {
        Self { fine: gauss_legendre(8), coarse: gauss_legendre(6) }
    }
}

fn tensor_rule(param: &[CPoly], m: &DMatrix<Complex64>, (x, w): &(Vec<f64>, Vec<f64>), b: [f64; 4], phi: &mut Vec<Complex64>) -> (f64, f64) {
    let [r0, r1, t0, t1] = b;
    let (dr, dt) = (r1 - r0, t1 - t0);
    let mut mass = Vec::with_capacity(x.len());
    let mut h = Vec::with_capacity(x.len());
    for (xi, wi) in x.iter().zip(w) {
        let r = r0 + dr * xi;
        let mut rm = Vec::with_capacity(x.len());
        let mut rh = Vec::with_capacity(x.len());
        for (xj, wj) in x.iter().zip(w) {
            let u = Complex64::from_polar(r, t0 + dt * xj);
            let (rho, hv) = density_and_h(param, m, u, phi);
            rm.push(wj * rho);
            rh.push(wj * rho * hv);
        }
        let f = wi * r * dr * dt;
        mass.push(f * pairwise_sum(&rm));
        h.push(f * pairwise_sum(&rh));
    }
    (pairwise_sum(&mass), pairwise_sum(&h))
}

fn make_cell(param: &[CPoly], m: &DMatrix<Complex64>, rules: &Rules, b: [f64; 4], depth: usize, scale: f64) -> Cell {
    let mut phi = Vec::with_capacity(param.len());
    let (mass, h) = tensor_rule(param, m, &rules.fine, b, &mut phi);
    let (mc, hc) = tensor_rule(param, m, &rules.coarse, b, &mut phi);
    let err = (mass - mc).abs() + (h - hc).abs() / scale;
    Cell { r0: b[0], r1: b[1], t0: b[2], t1: b[3], depth, mass, h, err }
}

#[derive(PartialEq)]
struct Key(f64, usize);
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Key {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&o.0).then(o.1.cmp(&self.1))
    }
}

const MAX_CELLS: usize = 400_000;

/// `(mass, ∫H, error)` over the unit disk in one chart. Cells with the largest
/// local error estimate are halved in both directions until the summed
/// estimate drops below `tol`. The loop is sequential and leaves are summed in
/// creation order, so the result does not depend on the thread pool.
fn disk_integral(param: &[CPoly], m: &DMatrix<Complex64>, spec: &QuadratureSpec, scale: f64) -> (f64, f64, f64) {
    let rules = Rules::new();
    let nr = spec.radial.div_ceil(8);
    let nt = spec.angular.div_ceil(8);
    let dt = 2.0 * PI / nt as f64;
    let mut cells: Vec<Cell> = (0..nr * nt)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / nt, k % nt);
            let b = [i as f64 / nr as f64, (i + 1) as f64 / nr as f64, j as f64 * dt, (j + 1) as f64 * dt];
            make_cell(param, m, &rules, b, 0, scale)
        })
        .collect();
    let mut alive = vec![true; cells.len()];
    let mut heap: std::collections::BinaryHeap<Key> = cells.iter().enumerate().map(|(k, c)| Key(c.err, k)).collect();
    let mut total: f64 = cells.iter().map(|c| c.err).sum();
    while total > spec.tol && cells.len() + 4 <= MAX_CELLS {
        let Some(Key(_, k)) = heap.pop() else { break };
        let c = cells[k];
        if c.depth >= spec.max_refinements {
            continue;
        }
        let rm = 0.5 * (c.r0 + c.r1);
        let tm = 0.5 * (c.t0 + c.t1);
        let bs = [[c.r0, rm, c.t0, tm], [c.r0, rm, tm, c.t1], [rm, c.r1, c.t0, tm], [rm, c.r1, tm, c.t1]];
        let kids: Vec<Cell> = bs.par_iter().map(|&b| make_cell(param, m, &rules, b, c.depth + 1, scale)).collect();
        alive[k] = false;
        total -= c.err;
        for kid in kids {
            total += kid.err;
            heap.push(Key(kid.err, cells.len()));
            cells.push(kid);
            alive.push(true);
        }
        // guard against drift in the running sum
        if heap.len() % 1024 == 0 {
            total = cells.iter().zip(&alive).filter(|x| *x.1).map(|x| x.0.err).sum();
        }
    }
    let leaves: Vec<&Cell> = cells.iter().zip(&alive).filter(|x| *x.1).map(|x| x.0).collect();
    let mass: Vec<f64> = leaves.iter().map(|c| c.mass).collect();
    let h: Vec<f64> = leaves.iter().map(|c| c.h).collect();
    let err: Vec<f64> = leaves.iter().map(|c| c.err).collect();
    (pairwise_sum(&mass), pairwise_sum(&h), pairwise_sum(&err))
}

fn curve_integral(c: &CurveComponent, m: &DMatrix<Complex64>, spec: &QuadratureSpec, scale: f64) -> [(f64, f64, f64); 2] {
    let e = c.degree();
    let reversed: Vec<CPoly> =
        c.param.iter().map(|p| (0..=e).map(|k| p.get(e - k).copied().unwrap_or_default()).collect()).collect();
    let half = QuadratureSpec { tol: 0.5 * spec.tol, ..spec.clone() };
    [disk_integral(&c.param, m, &half, scale), disk_integral(&reversed, m, &half, scale)]
}

pub fn integrate(z: &ParametrizedCycle, a: &HermitianEndomorphism, spec: &QuadratureSpec) -> Result<CycleIntegral> {
    spec.validate()?;
    if z.ambient != a.dim() {
        return Err(Error::DimensionMismatch(format!("cycle in C^{} for an endomorphism of C^{}", z.ambient, a.dim())));
    }
    let m = a.matrix();
    let scale = a.operator_norm().max(1.0);
    let mut volume = 0.0;
    let mut h_integral = 0.0;
    let mut error = 0.0;
    let mut charts = Vec::with_capacity(2 * z.curves.len());
    for (k, c) in z.curves.iter().enumerate() {
        let deg = c.degree();
        if deg == 0 {
            return Err(Error::UnparametrizableComponent("constant parametrization".into()));
        }
        let parts = curve_integral(c, m, spec, scale);
        for (chart, &(mass, h_integral, error)) in ["u", "w"].into_iter().zip(&parts) {
            charts.push(ChartIntegral { component: k, chart, mass, h_integral, error: error * scale });
        }
        let [(m1, h1, e1), (m2, h2, e2)] = parts;
        let (mass, h, err) = (m1 + m2, h1 + h2, e1 + e2);
        let check = (100.0 * spec.tol).max(1e-8) * deg as f64;
        if (mass - deg as f64).abs() > check || !h.is_finite() {
            return Err(Error::QuadratureDivergence(format!("mass {mass} for a curve of degree {deg}")));
        }
        volume += c.mult as f64 * mass;
        h_integral += c.mult as f64 * h;
        error += c.mult as f64 * err * scale;
    }
    for p in &z.points {
        volume += p.mult as f64;
        h_integral += p.mult as f64 * hamiltonian(a, &p.coords)?;
    }
    Ok(CycleIntegral { volume, h_integral, error, degree: z.degree(), charts })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChowValue {
    pub value: f64,
    pub error: f64,
    pub volume: f64,
}

/// Average of `H` over the cycle minus the average eigenvalue of `A`.
pub fn chow_number(z: &ParametrizedCycle, a: &HermitianEndomorphism, spec: &QuadratureSpec) -> Result<ChowValue> {
    let i = integrate(z, a, spec)?;
    let value = i.h_integral / i.volume - a.trace() / a.dim() as f64;
    Ok(ChowValue { value, error: i.error / i.volume, volume: i.volume })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub s: f64,
    pub ch: f64,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
    pub min_forward_difference: f64,
}

impl ScanResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,Ch,error_estimate\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:.15e},{:.3e}\n", r.s, r.ch, r.error));
        }
        out
    }
}

/// `Ch(e^{sA} Z, A)` along a grid of `s`.
pub fn monotonicity_scan(z: &ParametrizedCycle, a: &HermitianEndomorphism, s_grid: &[f64], spec: &QuadratureSpec) -> Result<ScanResult> {
    let rows = s_grid
        .iter()
        .map(|&s| {
            let zs = z.transform(&a.exp(s));
            chow_number(&zs, a, spec).map(|c| ScanRow { s, ch: c.value, error: c.error })
        })
        .collect::<Result<Vec<_>>>()?;
    let min_forward_difference = rows.windows(2).map(|w| w[1].ch - w[0].ch).fold(f64::INFINITY, f64::min);
    Ok(ScanResult { rows, min_forward_difference })
}
