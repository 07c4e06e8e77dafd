use serde::Serialize;

use super::binary::binary_roots;
use crate::algebra::linalg::{determinant, inverse, Matrix};
use crate::algebra::{HomogeneousForm, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// Keep the monomials of largest weight `⟨w,a⟩`.
    Plus,
    /// Keep the monomials of smallest weight.
    Minus,
}

/// Flat limit of `t ↦ F(t^{∓w} x)` as `t → 0` together with the extremal
/// weight. Under the action `F ↦ F∘g^{-1}` the `+` direction is the arc
/// `t^w`, whose pole order on `F` is the returned value.
pub fn one_ps_limit(f: &HomogeneousForm, w: &[i64], dir: Direction) -> Result<(HomogeneousForm, i64)> {
    if w.len() != f.nvars() {
        return Err(Error::DimensionMismatch(format!("{} weights for {} variables", w.len(), f.nvars())));
    }
    if f.is_zero() {
        return Err(Error::Invalid("limit of the zero form".into()));
    }
    let weight = |e: &[u32]| -> i64 { e.iter().zip(w).map(|(&a, &b)| a as i64 * b).sum() };
    let weights = f.terms().map(|(e, _)| weight(e));
    let ext = match dir {
        Direction::Plus => weights.max(),
        Direction::Minus => weights.min(),
    }
    .unwrap();
    let limit = HomogeneousForm::from_terms(
        f.nvars(),
        f.degree(),
        f.terms().filter(|(e, _)| weight(e) == ext).map(|(e, c)| (e.clone(), c.clone())),
    )?;
    Ok((limit, ext))
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoStepLimit {
    pub first: HomogeneousForm,
    pub first_nu: i64,
    /// First limit moved by `h`.
    pub moved: HomogeneousForm,
    pub last: HomogeneousForm,
    pub last_nu: i64,
}

/// Limit under `t^{w1}`, move by the point transformation `h` (forms go to
/// `F∘h^{-1}`), then limit under `t^{w2}`. Both limits use [`Direction::Plus`].
pub fn two_step_limit(f: &HomogeneousForm, w1: &[i64], h: &Matrix, w2: &[i64]) -> Result<TwoStepLimit> {
    let (first, first_nu) = one_ps_limit(f, w1, Direction::Plus)?;
    let hinv = inverse(h)?;
    let moved = first.linear_substitute(&hinv)?;
    let (last, last_nu) = one_ps_limit(&moved, w2, Direction::Plus)?;
    Ok(TwoStepLimit { first, first_nu, moved, last, last_nu })
}

/// If the plane curve `F = 0` is a union of lines through `o`, all defined over
/// `Q(i)`, return `(c, ℓ_1, ..., ℓ_d)` with `F = c·∏ℓ_i` verified exactly.
pub fn linear_factors_through_point(f: &HomogeneousForm, o: &[Scalar]) -> Result<Option<(Scalar, Vec<HomogeneousForm>)>> {
    if f.nvars() != 3 || o.len() != 3 {
        return Err(Error::DimensionMismatch("plane curves and points of P^2 only".into()));
    }
    // complete o to a basis: columns (e_a, e_b, o)
    let k = o.iter().position(|c| !c.is_zero()).ok_or(Error::ZeroVector)?;
    let others: Vec<usize> = (0..3).filter(|&i| i != k).collect();
    let mut t = vec![vec![Scalar::zero(); 3]; 3];
    t[others[0]][0] = Scalar::one();
    t[others[1]][1] = Scalar::one();
    for i in 0..3 {
        t[i][2] = o[i].clone();
    }
    debug_assert!(!determinant(&t).is_zero());
    let g = f.linear_substitute(&t)?;
    if g.terms().any(|(e, _)| e[2] > 0) {
        return Ok(None);
    }
    let binary = HomogeneousForm::from_terms(2, g.degree(), g.terms().map(|(e, c)| (vec![e[0], e[1]], c.clone())))?;
    let Some((lead, roots)) = binary_roots(&binary)? else {
        return Ok(None);
    };
    let tinv = inverse(&t)?;
    let mut lines = Vec::new();
    for (root, mult) in &roots {
        // root [a:b] of the binary form gives the line b·X - a·Y in the new coordinates
        let (a, b) = root;
        let new_coords = [b.clone(), -a, Scalar::zero()];
        let old: Vec<Scalar> = (0..3).map(|j| (0..3).fold(Scalar::zero(), |acc, i| &acc + &(&new_coords[i] * &tinv[i][j]))).collect();
        for _ in 0..*mult {
            lines.push(HomogeneousForm::linear(&old));
        }
    }
    let mut prod = HomogeneousForm::from_terms(3, 0, [(vec![0, 0, 0], lead.clone())])?;
    for l in &lines {
        prod = prod.mul(l)?;
    }
    if prod != *f {
        return Err(Error::Invalid("linear factorization failed exact verification".into()));
    }
    Ok(Some((lead, lines)))
}
