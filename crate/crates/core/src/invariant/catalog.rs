//! Shipped models.

use num_rational::BigRational;
use num_traits::One;

use crate::basis::Mask;

use super::form::ExactForm;
use super::model::LieModel;

fn build(name: &str, dim: usize, terms: &[(usize, Mask, i64)]) -> LieModel {
    let mut diff = vec![ExactForm::zero(dim); dim];
    for &(k, mask, c) in terms {
        diff[k] = diff[k].add(&ExactForm::from_ints(dim, mask, c, 0));
    }
    LieModel::new(name, dim, diff, BigRational::one()).expect("catalog model is valid")
}

fn pair(a: usize, b: usize) -> Mask {
    (1 << a) | (1 << b)
}

/// Flat complex torus `T_d`.
pub fn torus(dim: usize) -> LieModel {
    build(&format!("torus{dim}"), dim, &[])
}

/// Iwasawa manifold: `dφ1 = dφ2 = 0`, `dφ3 = −φ1∧φ2`.
pub fn iwasawa() -> LieModel {
    build("iwasawa", 3, &[(2, pair(0, 1), -1)])
}

/// Complex-parallelizable 5-dimensional nilmanifold:
/// `dφ3 = −φ1∧φ2`, `dφ4 = φ1∧φ3`, `dφ5 = φ2∧φ3`.
pub fn nil5() -> LieModel {
    build(
        "nil5",
        5,
        &[
            (2, pair(0, 1), -1),
            (3, pair(0, 2), 1),
            (4, pair(1, 2), 1),
        ],
    )
}

/// Nilmanifold with a mixed structure constant: `dφ3 = φ1∧φ̄1`.
pub fn heis_mixed() -> LieModel {
    build("heis_mixed", 3, &[(2, (1 << 0) | (1 << 3), 1)])
}

pub fn models() -> Vec<LieModel> {
    vec![torus(1), torus(2), torus(3), iwasawa(), nil5(), heis_mixed()]
}

pub fn model_by_name(name: &str) -> Option<LieModel> {
    models().into_iter().find(|m| m.name() == name)
}
