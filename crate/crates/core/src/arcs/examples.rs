//! The plane sextic with a five-fold concurrent degeneration and its moving matrix.

use crate::algebra::{linalg, HomogeneousForm, Matrix, Scalar};

/// `z·∏(x − λy) + x^6 + y^6` for five distinct integers `λ`.
pub fn concurrent_sextic(lambdas: &[i64]) -> HomogeneousForm {
    let mut f = HomogeneousForm::parse("z", 3).expect("literal");
    for &lam in lambdas {
        f = f.mul(&HomogeneousForm::linear(&[Scalar::one(), Scalar::from_i64(-lam), Scalar::zero()])).expect("same ring");
    }
    f.add(&HomogeneousForm::parse("x^6 + y^6", 3).expect("literal")).expect("same ring")
}

pub const DEFAULT_LAMBDAS: [i64; 5] = [0, 1, -1, 2, 3];

/// Matrix `h` acting on points with `h⁻¹ = [[1,0,0],[0,1,0],[1,−μ,−1]]`,
/// so that substitution by `h⁻¹` sends `z` to `x − μy − z`.
pub fn shear(mu: i64) -> Matrix {
    let h_inv = vec![
        vec![Scalar::one(), Scalar::zero(), Scalar::zero()],
        vec![Scalar::zero(), Scalar::one(), Scalar::zero()],
        vec![Scalar::one(), Scalar::from_i64(-mu), Scalar::from_i64(-1)],
    ];
    linalg::inverse(&h_inv).expect("involution")
}

pub const FIRST_WEIGHTS: [i64; 3] = [-1, -1, 2];
pub const SECOND_WEIGHTS: [i64; 3] = [1, 1, -2];
