//! Vanishing orders along `B`, maximal extensions and the filtration
//! `J = J_0 ⊇ J_1 ⊇ …` with chosen complements `I_μ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use super::chart::{Chart, ChartSource, Section};
use super::family::PlaneCurveFamily;
use crate::algebra::bivariate::BivariateSeries;
use crate::algebra::form::Exponent;
use crate::algebra::linalg::{nullspace, rank, row_space_basis, rref};
use crate::algebra::ring::Ring;
use crate::algebra::{linear_solve_exact, monomials, HomogeneousForm, LinearSolution, Matrix, Poly, RatFn, Scalar};
use crate::error::{Error, Result};

const INITIAL_TRUNCATION: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(usize),
    Infinite,
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(n) => s.serialize_u64(*n as u64),
            Valuation::Infinite => s.serialize_str("infinity"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Extension {
    pub nu_bar: Valuation,
    /// Witness of order exactly `nu_bar` (absent for the infinite case).
    pub witness: Option<Section>,
}

/// Rows `Σ_j x_j c_j(v) = 0` as scalar equations on the coefficients of `v^r`.
fn cond_rows(cols: &[RatFn]) -> Vec<Vec<Scalar>> {
    let mut l = Poly::one();
    for c in cols.iter().filter(|c| !c.is_zero()) {
        let g = Poly::gcd(&l, c.den());
        l = &l * &c.den().div_exact(&g).expect("gcd divides");
    }
    let nums: Vec<Poly> = cols
        .iter()
        .map(|c| if c.is_zero() { Poly::zero() } else { c.num() * &l.div_exact(c.den()).expect("lcm") })
        .collect();
    let top = nums.iter().filter_map(Poly::degree).max();
    let Some(top) = top else { return Vec::new() };
    (0..=top).map(|r| nums.iter().map(|p| p.coeff(r)).collect()).filter(|row: &Vec<Scalar>| row.iter().any(|x| !x.is_zero())).collect()
}

fn solve(a: &Matrix, b: &[Scalar], cols: usize) -> Result<Option<(Vec<Scalar>, Vec<Vec<Scalar>>)>> {
    if a.is_empty() {
        let basis = (0..cols).map(|i| (0..cols).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect()).collect();
        return Ok(Some((vec![Scalar::zero(); cols], basis)));
    }
    if cols == 0 {
        return Ok(b.iter().all(Scalar::is_zero).then(|| (Vec::new(), Vec::new())));
    }
    Ok(match linear_solve_exact(a, b, cols)? {
        LinearSolution::Solved { particular, nullspace } => Some((particular, nullspace)),
        LinearSolution::Inconsistent => None,
    })
}

fn combine(coeffs: &[Scalar], basis: &[Vec<Scalar>], n: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); n];
    for (c, v) in coeffs.iter().zip(basis) {
        if !c.is_zero() {
            for (o, x) in out.iter_mut().zip(v) {
                *o += &(c * x);
            }
        }
    }
    out
}

fn in_span(v: &[Scalar], basis: &[Vec<Scalar>]) -> bool {
    if v.iter().all(Scalar::is_zero) {
        return true;
    }
    let mut with = basis.to_vec();
    with.push(v.to_vec());
    rank(&with) == rank(&basis.to_vec())
}

fn random_ints(rng: &mut ChaCha8Rng, n: usize) -> Vec<Scalar> {
    (0..n).map(|_| Scalar::from_i64(rng.gen_range(-3..=3))).collect()
}

/// Linear conditions for sections of degree `p` on a chart, rebuilt at larger
/// truncation on demand.
pub struct OrderSystem {
    source: ChartSource,
    chart: Chart,
    pub p: u32,
    pub monomials: Vec<Exponent>,
    /// `prods[i][β]` is the pullback of `t^i·x^β`.
    prods: Vec<Vec<BivariateSeries>>,
}

impl OrderSystem {
    pub fn new(source: ChartSource, p: u32) -> Result<Self> {
        let chart = source.build(INITIAL_TRUNCATION)?;
        let monomials = monomials(source.nvars(), p);
        let mut s = Self { source, chart, p, monomials, prods: Vec::new() };
        s.reset_products();
        Ok(s)
    }

    pub fn nvars(&self) -> usize {
        self.source.nvars()
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn source(&self) -> &ChartSource {
        &self.source
    }

    fn reset_products(&mut self) {
        let row = self.monomials.iter().map(|e| self.chart.pullback(&HomogeneousForm::monomial(e.clone(), Scalar::one()))).collect();
        self.prods = vec![row];
    }

    /// Make coefficients through `u^k` available.
    pub fn ensure(&mut self, k: usize) -> Result<()> {
        if self.chart.truncation() >= k {
            return Ok(());
        }
        let target = (2 * self.chart.truncation()).max(k + 2);
        self.chart = self.source.build(target)?;
        self.reset_products();
        Ok(())
    }

    fn coeff(&mut self, i: usize, beta: usize, k: usize) -> RatFn {
        if i > k {
            return RatFn::zero();
        }
        while self.prods.len() <= i {
            let last = self.prods.last().expect("nonempty");
            let next = last.iter().map(|s| s.mul(&self.chart.t)).collect();
            self.prods.push(next);
        }
        self.prods[i][beta].coeff(k).cloned().unwrap_or_else(RatFn::zero)
    }

    fn vector_coeff(&mut self, i: usize, v: &[Scalar], k: usize) -> RatFn {
        let mut acc = RatFn::zero();
        for (beta, c) in v.iter().enumerate() {
            if !c.is_zero() {
                acc = &acc + &self.coeff(i, beta, k).scale(c);
            }
        }
        acc
    }

    /// Rows of "`Σ_j a_j s_j + Σ_{i<μ} t^i τ_i` vanishes to order `μ`" in the
    /// unknowns `(a, τ_1, …, τ_{μ-1})`.
    fn conditions(&mut self, s_cols: &[Vec<Scalar>], mu: usize) -> Result<Matrix> {
        self.ensure(mu)?;
        let n = self.dim();
        let mut rows = Vec::new();
        for k in 0..mu {
            let mut cols: Vec<RatFn> = s_cols.iter().map(|s| self.vector_coeff(0, s, k)).collect();
            for i in 1..mu {
                for beta in 0..n {
                    cols.push(self.coeff(i, beta, k));
                }
            }
            rows.extend(cond_rows(&cols));
        }
        Ok(rows)
    }

    /// The members of `span(basis)` that extend to order at least `mu`.
    pub fn extendable(&mut self, basis: &[Vec<Scalar>], mu: usize) -> Result<Vec<Vec<Scalar>>> {
        if mu == 0 || basis.is_empty() {
            return Ok(row_space_basis(basis));
        }
        let m = basis.len();
        let cols = m + (mu - 1) * self.dim();
        let a = self.conditions(basis, mu)?;
        let null = if a.is_empty() { (0..cols).map(|i| (0..cols).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect()).collect() } else { nullspace(&a, cols) };
        let proj: Vec<Vec<Scalar>> = null.iter().map(|x| combine(&x[..m], basis, self.dim())).filter(|v| v.iter().any(|c| !c.is_zero())).collect();
        Ok(row_space_basis(&proj))
    }

    /// `τ_1, …, τ_{μ-1}` making `s + Σ t^i τ_i` vanish to order `μ`, with the
    /// homogeneous solutions.
    pub fn extend(&mut self, s: &[Scalar], mu: usize) -> Result<Option<(Vec<Vec<Scalar>>, Vec<Vec<Scalar>>)>> {
        let n = self.dim();
        let a = self.conditions(&[s.to_vec()], mu)?;
        let b: Vec<Scalar> = a.iter().map(|r| -&r[0]).collect();
        let rest: Matrix = a.iter().map(|r| r[1..].to_vec()).collect();
        let cols = (mu.saturating_sub(1)) * n;
        let Some((x, null)) = solve(&rest, &b, cols)? else { return Ok(None) };
        let taus = x.chunks(n.max(1)).map(<[Scalar]>::to_vec).collect();
        Ok(Some((taus, null)))
    }

    /// Vanishing order of the pullback of `σ`, searching up to `u^cap`.
    pub fn order_of(&mut self, sigma: &Section, cap: usize) -> Result<usize> {
        loop {
            if let Some(k) = self.chart.pullback_section(sigma).u_order() {
                return Ok(k);
            }
            if self.chart.truncation() >= cap {
                return Err(Error::TruncationExceeded(self.chart.truncation()));
            }
            self.ensure((2 * self.chart.truncation()).min(cap))?;
        }
    }

    /// `ν̄(s)`: largest order reachable by `s + Σ t^i τ_i`. Sections in the
    /// span of `kernel` vanish identically and get `Infinite`.
    pub fn max_extension(&mut self, s: &[Scalar], kernel: &[Vec<Scalar>], cap: usize) -> Result<Extension> {
        if in_span(s, kernel) {
            return Ok(Extension { nu_bar: Valuation::Infinite, witness: None });
        }
        let (nv, p) = (self.nvars(), self.p);
        let form = |v: &[Scalar]| HomogeneousForm::from_vector(nv, p, v);
        let mut best: Vec<Vec<Scalar>> = Vec::new();
        for mu in 1..=cap {
            match self.extend(s, mu)? {
                Some((taus, _)) => best = taus,
                None => {
                    let nu = mu - 1;
                    let mut parts = vec![form(s)];
                    parts.extend(best.iter().map(|t| form(t)));
                    return Ok(Extension { nu_bar: Valuation::Finite(nu), witness: Some(Section { mu: nu, parts }) });
                }
            }
        }
        Err(Error::NoStabilization { cap })
    }
}

/// `F_0·S^{p-d}` inside `S^p`.
pub fn plane_kernel(fam: &PlaneCurveFamily, p: u32) -> Vec<Vec<Scalar>> {
    let d = fam.degree();
    if p < d {
        return Vec::new();
    }
    let vs: Vec<Vec<Scalar>> = monomials(3, p - d)
        .into_iter()
        .map(|e| fam.central().mul(&HomogeneousForm::monomial(e, Scalar::one())).expect("same ring").to_vector())
        .collect();
    row_space_basis(&vs)
}

/// How the restriction kernel `K_0` is obtained.
#[derive(Clone, Debug)]
pub enum KernelSpec {
    Known(Vec<Vec<Scalar>>),
    /// `dim S^p / K_0` is known; `K_0` is found as the stable member of the full filtration.
    Quotient(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct Filtration {
    pub p: u32,
    pub nvars: usize,
    #[serde(skip)]
    pub kernel: Vec<Vec<Scalar>>,
    /// `J_μ` for `μ = 0..=top`.
    #[serde(skip)]
    pub levels: Vec<Vec<Vec<Scalar>>>,
    #[serde(skip)]
    pub complements: Vec<Vec<Vec<Scalar>>>,
    pub dims: Vec<usize>,
    pub complement_dims: Vec<usize>,
    #[serde(skip)]
    pub basis: Vec<Vec<Scalar>>,
    pub weights: Vec<usize>,
}

impl Filtration {
    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn form(&self, v: &[Scalar]) -> HomogeneousForm {
        HomogeneousForm::from_vector(self.nvars, self.p, v)
    }

    pub fn complement_forms(&self, mu: usize) -> Vec<HomogeneousForm> {
        self.complements.get(mu).map(|c| c.iter().map(|v| self.form(v)).collect()).unwrap_or_default()
    }
}

/// Unit vectors on the non-pivot columns of `RREF(K_0)`.
fn monomial_complement(kernel: &[Vec<Scalar>], n: usize) -> Vec<Vec<Scalar>> {
    let pivots = if kernel.is_empty() { Vec::new() } else { rref(&kernel.to_vec()).1 };
    (0..n).filter(|c| !pivots.contains(c)).map(|c| (0..n).map(|j| if j == c { Scalar::one() } else { Scalar::zero() }).collect()).collect()
}

/// Project along `K_0` onto its monomial complement.
fn reduce(v: &[Scalar], kernel_rref: &(Matrix, Vec<usize>)) -> Vec<Scalar> {
    let mut out = v.to_vec();
    for (row, &p) in kernel_rref.0.iter().zip(&kernel_rref.1) {
        if !out[p].is_zero() {
            let f = out[p].clone();
            for (o, x) in out.iter_mut().zip(row) {
                *o -= &(&f * x);
            }
        }
    }
    out
}

pub fn compute_filtration(sys: &mut OrderSystem, kernel: KernelSpec, cap: usize, alt_seed: Option<u64>) -> Result<Filtration> {
    let n = sys.dim();
    let unit = monomial_complement(&[], n);
    let (kernel, levels) = match kernel {
        KernelSpec::Known(k) => {
            let k = row_space_basis(&k);
            let mut levels = vec![monomial_complement(&k, n)];
            loop {
                let mu = levels.len();
                if mu > cap {
                    return Err(Error::NoStabilization { cap });
                }
                let next = sys.extendable(levels.last().expect("nonempty"), mu)?;
                if next.is_empty() {
                    break;
                }
                levels.push(next);
            }
            (k, levels)
        }
        KernelSpec::Quotient(h) => {
            if h > n {
                return Err(Error::DimensionMismatch(format!("quotient dimension {h} exceeds {n}")));
            }
            let mut full = vec![unit];
            loop {
                let cur = full.last().expect("nonempty");
                if cur.len() == n - h {
                    break;
                }
                if cur.len() < n - h {
                    return Err(Error::Invalid(format!("restriction kernel has dimension {} < {}", cur.len(), n - h)));
                }
                let mu = full.len();
                if mu > cap {
                    return Err(Error::NoStabilization { cap });
                }
                let next = sys.extendable(cur, mu)?;
                full.push(next);
            }
            let k = full.pop().expect("nonempty");
            let kr = rref(&if k.is_empty() { vec![vec![Scalar::zero(); n]] } else { k.clone() });
            let mut levels = vec![monomial_complement(&k, n)];
            for lvl in full.iter().skip(1) {
                let red: Vec<Vec<Scalar>> = lvl.iter().map(|v| reduce(v, &kr)).filter(|v| v.iter().any(|c| !c.is_zero())).collect();
                let b = row_space_basis(&red);
                if b.is_empty() {
                    break;
                }
                levels.push(b);
            }
            (k, levels)
        }
    };

    let top = levels.len() - 1;
    let mut rng = alt_seed.map(ChaCha8Rng::seed_from_u64);
    let mut complements = vec![Vec::new(); top + 1];
    for mu in (0..=top).rev() {
        let above: &[Vec<Scalar>] = if mu < top { &levels[mu + 1] } else { &[] };
        let mut span = above.to_vec();
        let mut chosen = Vec::new();
        for v in &levels[mu] {
            if in_span(v, &span) {
                continue;
            }
            span.push(v.clone());
            let v = match rng.as_mut() {
                Some(r) if !above.is_empty() => {
                    let c = random_ints(r, above.len());
                    let shift = combine(&c, above, n);
                    v.iter().zip(&shift).map(|(a, b)| a + b).collect()
                }
                _ => v.clone(),
            };
            chosen.push(v);
        }
        complements[mu] = chosen;
    }
    let mut basis = Vec::new();
    let mut weights = Vec::new();
    for (mu, c) in complements.iter().enumerate() {
        for v in c {
            basis.push(v.clone());
            weights.push(mu);
        }
    }
    Ok(Filtration {
        p: sys.p,
        nvars: sys.nvars(),
        dims: levels.iter().map(Vec::len).collect(),
        complement_dims: complements.iter().map(Vec::len).collect(),
        kernel,
        levels,
        complements,
        basis,
        weights,
    })
}

/// The sections `σ_α` extending the filtration basis and the limit map
/// `f_α = [σ_α]_{μ_α} / t_1^{μ_α}` on `B`.
#[derive(Clone, Debug)]
pub struct RestrictedSections {
    pub sections: Vec<Section>,
    pub f: Vec<RatFn>,
    pub rank: usize,
}

pub fn restricted_sections(sys: &mut OrderSystem, filt: &Filtration, alt_seed: Option<u64>) -> Result<RestrictedSections> {
    let n = sys.dim();
    let mut rng = alt_seed.map(|s| ChaCha8Rng::seed_from_u64(s ^ 0x5eed));
    let top = filt.weights.iter().copied().max().unwrap_or(0);
    sys.ensure(top)?;
    let t1 = sys.chart().t.coeff(1).cloned().ok_or(Error::TruncationExceeded(0))?;
    let mut sections = Vec::new();
    let mut f = Vec::new();
    for (v, &mu) in filt.basis.iter().zip(&filt.weights) {
        let mut parts = vec![v.clone()];
        if mu > 0 {
            let (taus, null) = sys.extend(v, mu)?.ok_or_else(|| Error::Invalid(format!("basis vector does not extend to order {mu}")))?;
            let mut taus: Vec<Vec<Scalar>> = taus;
            if let Some(r) = rng.as_mut() {
                let c = random_ints(r, null.len());
                let shift = combine(&c, &null, (mu - 1) * n);
                for (i, t) in taus.iter_mut().enumerate() {
                    for (a, b) in t.iter_mut().zip(&shift[i * n..(i + 1) * n]) {
                        *a += b;
                    }
                }
                taus.push(random_ints(r, n));
            } else {
                taus.push(vec![Scalar::zero(); n]);
            }
            parts.extend(taus);
        }
        let mut lead = RatFn::zero();
        for (i, part) in parts.iter().enumerate() {
            lead = &lead + &sys.vector_coeff(i, part, mu);
        }
        let mut val = lead;
        for _ in 0..mu {
            val = val.div(&t1)?;
        }
        if val.is_zero() {
            return Err(Error::Invalid(format!("section of weight {mu} vanishes to higher order")));
        }
        f.push(val);
        sections.push(Section { mu, parts: parts.iter().map(|x| filt.form(x)).collect() });
    }
    let rows: Vec<Vec<Scalar>> = {
        let mut l = Poly::one();
        for c in &f {
            let g = Poly::gcd(&l, c.den());
            l = &l * &c.den().div_exact(&g)?;
        }
        let nums: Vec<Poly> = f.iter().map(|c| c.num() * &l.div_exact(c.den()).expect("lcm")).collect();
        let top = nums.iter().filter_map(Poly::degree).max().unwrap_or(0);
        nums.iter().map(|p| (0..=top).map(|r| p.coeff(r)).collect()).collect()
    };
    let r = if rows.is_empty() { 0 } else { rank(&rows) };
    if r < f.len() {
        return Err(Error::RankDeficient { rank: r, expected: f.len() });
    }
    Ok(RestrictedSections { sections, f, rank: r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descendants::family::ComponentB;

    fn form(s: &str) -> HomogeneousForm {
        HomogeneousForm::parse(s, 3).unwrap()
    }

    fn worked() -> ChartSource {
        let fam = PlaneCurveFamily::new(vec![form("x^2*z - x*z^2 - x*y^2 + y^2*z"), form("x^3 + y^3 + z^3")]).unwrap();
        let b = ComponentB::new(&fam, form("x*z - y^2"), vec![Poly::from_i64s(&[1]), Poly::from_i64s(&[0, 1]), Poly::from_i64s(&[0, 0, 1])], vec![Scalar::zero(), Scalar::zero(), Scalar::one()]).unwrap();
        ChartSource::Plane { fam, b }
    }

    #[test]
    fn orders_on_worked_family() {
        let mut sys = OrderSystem::new(worked(), 2).unwrap();
        let v = |s: &str| form(s).to_vector();
        assert_eq!(sys.order_of(&Section::plain(form("z^2")), 40).unwrap(), 0);
        assert_eq!(sys.order_of(&Section::plain(form("x*z - y^2")), 40).unwrap(), 1);
        let mut sys4 = OrderSystem::new(worked(), 4).unwrap();
        assert_eq!(sys4.order_of(&Section::plain(form("x*z - y^2").pow(2)), 40).unwrap(), 2);
        assert_eq!(sys.max_extension(&v("x^2"), &[], 60).unwrap().nu_bar, Valuation::Finite(0));
        let e = sys.max_extension(&v("x*z - y^2"), &[], 60).unwrap();
        assert_eq!(e.nu_bar, Valuation::Finite(1));
    }

    #[test]
    fn worked_filtration() {
        let mut sys = OrderSystem::new(worked(), 2).unwrap();
        let filt = compute_filtration(&mut sys, KernelSpec::Known(Vec::new()), 60, None).unwrap();
        assert_eq!(filt.dims, vec![6, 1]);
        assert_eq!(filt.complement_dims, vec![5, 1]);
        assert_eq!(filt.complement_forms(1)[0], form("x*z - y^2"));
        let r = restricted_sections(&mut sys, &filt, None).unwrap();
        assert_eq!(r.rank, 6);
        // f_P = -G(b)/L(b) with G = x³+y³+z³, L = x - z
        let g = Poly::from_i64s(&[1, 0, 0, 1, 0, 0, 1]);
        let l = Poly::from_i64s(&[1, 0, -1]);
        let expect = RatFn::new(-&g, l).unwrap();
        assert_eq!(r.f[5], expect);
    }

    #[test]
    fn second_order_variant() {
        let fam = PlaneCurveFamily::new(vec![form("x^2*z - x*z^2 - x*y^2 + y^2*z"), form("x*y*z - y^3 + x^3 - x^2*z")]).unwrap();
        let b = ComponentB::new(&fam, form("x*z - y^2"), vec![Poly::from_i64s(&[1]), Poly::from_i64s(&[0, 1]), Poly::from_i64s(&[0, 0, 1])], vec![Scalar::zero(), Scalar::zero(), Scalar::one()]).unwrap();
        let mut sys = OrderSystem::new(ChartSource::Plane { fam, b }, 2).unwrap();
        let e = sys.max_extension(&form("x*z - y^2").to_vector(), &[], 60).unwrap();
        assert_eq!(e.nu_bar, Valuation::Finite(2));
        let filt = compute_filtration(&mut sys, KernelSpec::Known(Vec::new()), 60, None).unwrap();
        assert_eq!(filt.complement_dims, vec![5, 0, 1]);
        let alt = compute_filtration(&mut sys, KernelSpec::Known(Vec::new()), 60, Some(3)).unwrap();
        assert_eq!(alt.dims, filt.dims);
        assert_eq!(restricted_sections(&mut sys, &alt, Some(3)).unwrap().rank, 6);
    }
}
