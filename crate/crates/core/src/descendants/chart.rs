//! Local coordinates `(v, u)` on the total space near the generic point of `B`,
//! with `u = 0` along `B` and `t = t(v, u)` from the implicit solver.

use serde::{Deserialize, Serialize};

use super::family::{ComponentB, PlaneCurveFamily};
use crate::algebra::bivariate::{implicit_series_solve, BivariateSeries, Path};
use crate::algebra::ring::Ring;
use crate::algebra::{HomogeneousForm, Poly};
use crate::error::{Error, Result};

/// `σ = Σ_i t^i parts[i]`, with `parts[0] = s` the section being extended.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub mu: usize,
    pub parts: Vec<HomogeneousForm>,
}

impl Section {
    pub fn plain(s: HomogeneousForm) -> Self {
        Self { mu: 0, parts: vec![s] }
    }
}

#[derive(Clone, Debug)]
pub struct Chart {
    pub coords: Vec<BivariateSeries>,
    pub t: BivariateSeries,
}

impl Chart {
    pub fn truncation(&self) -> usize {
        self.coords.iter().map(BivariateSeries::truncation).min().unwrap_or(0).min(self.t.truncation())
    }

    pub fn pullback(&self, f: &HomogeneousForm) -> BivariateSeries {
        f.eval(&self.coords)
    }

    pub fn pullback_section(&self, s: &Section) -> BivariateSeries {
        let mut acc = self.t.zero_like();
        let mut tp = self.t.one_like();
        for (i, f) in s.parts.iter().enumerate() {
            if i > 0 {
                tp = tp.mul(&self.t);
            }
            if !f.is_zero() {
                acc = acc.add(&self.pullback(f).mul(&tp));
            }
        }
        acc
    }

    /// Coordinates `y_α = t^{−μ_α} σ_α` of the modified family.
    pub fn descend(&self, sections: &[Section]) -> Result<Chart> {
        let u_over_t = self.t.div_u_power(1)?.invert()?;
        let coords = sections
            .iter()
            .map(|s| {
                let mut y = self.pullback_section(s).div_u_power(s.mu)?;
                for _ in 0..s.mu {
                    y = y.mul(&u_over_t);
                }
                Ok(y)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Chart { coords, t: self.t.clone() })
    }
}

/// Recipe for a chart at any requested truncation.
#[derive(Clone, Debug)]
pub enum ChartSource {
    Plane { fam: PlaneCurveFamily, b: ComponentB },
    Descended { base: Box<ChartSource>, sections: Vec<Section> },
}

impl ChartSource {
    pub fn nvars(&self) -> usize {
        match self {
            ChartSource::Plane { .. } => 3,
            ChartSource::Descended { sections, .. } => sections.len(),
        }
    }

    /// Truncation lost between the plane chart and this one.
    fn shift(&self) -> usize {
        match self {
            ChartSource::Plane { .. } => 0,
            ChartSource::Descended { base, sections } => base.shift() + 1 + sections.iter().map(|s| s.mu).max().unwrap_or(0),
        }
    }

    /// A chart certified at least through `u^k`.
    pub fn build(&self, k: usize) -> Result<Chart> {
        match self {
            ChartSource::Plane { fam, b } => plane_chart(fam, b, k),
            ChartSource::Descended { base, sections } => {
                let c = base.build(k + self.shift())?.descend(sections)?;
                if c.truncation() < k {
                    return Err(Error::InsufficientTruncation(format!("descended chart reached u^{} of u^{k}", c.truncation())));
                }
                Ok(c)
            }
        }
    }
}

pub fn plane_chart(fam: &PlaneCurveFamily, b: &ComponentB, k: usize) -> Result<Chart> {
    let dir: Vec<Poly> = b.transversal.iter().map(|c| Poly::constant(c.clone())).collect();
    let path = Path::new(b.param.clone(), dir)?;
    let t = implicit_series_solve(&fam.parts, &path, k)?;
    if !t.coeff(0).is_some_and(|c| c.is_zero()) || t.coeff(1).is_none_or(|c| c.is_zero()) {
        return Err(Error::DegenerateTransversal);
    }
    Ok(Chart { coords: path.coords(k), t })
}

/// Least `k` with a nonzero `u^k` coefficient of `σ(b(v) + u·w, t(v,u))`.
pub fn vanishing_order(sigma: &Section, fam: &PlaneCurveFamily, b: &ComponentB, k: usize) -> Result<usize> {
    let chart = plane_chart(fam, b, k)?;
    chart.pullback_section(sigma).u_order().ok_or(Error::TruncationExceeded(k))
}
