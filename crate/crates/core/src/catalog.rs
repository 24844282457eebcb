//! Named built-in systems.

use crate::dynamics::DynamicalSystem;
use crate::error::{AlgebraError, Result};
use crate::gaussian::Gaussian;
use crate::group::BaseGroup;
use crate::semigroup::Semigroup;

/// Names accepted by [`system`], in a stable order.
pub const NAMES: &[&str] = &[
    "z-2-3",
    "z-neg2-3",
    "z-2-neg3",
    "z-neg2-neg3",
    "z-neg1-2-3",
    "zi-1+i-2+i",
    "zi-i-1+i-2+i",
    "shift-z2-n",
    "shift-z2-f2",
    "shift-z2-n2",
    "shift-z-n",
    "trivial-f2",
    "trivial-n2",
    "z-sign",
    "z-unit",
];

pub fn system(name: &str) -> Result<DynamicalSystem> {
    let gauss = |gs: &[(i64, i64)]| gs.iter().map(|&(a, b)| Gaussian::new(a, b)).collect::<Vec<_>>();
    match name {
        "z-2-3" => DynamicalSystem::int_mult(&[2, 3]),
        "z-neg2-3" => DynamicalSystem::int_mult(&[-2, 3]),
        "z-2-neg3" => DynamicalSystem::int_mult(&[2, -3]),
        "z-neg2-neg3" => DynamicalSystem::int_mult(&[-2, -3]),
        "z-neg1-2-3" => DynamicalSystem::int_mult(&[-1, 2, 3]),
        "zi-1+i-2+i" => DynamicalSystem::gauss_mult(&gauss(&[(1, 1), (2, 1)])),
        "zi-i-1+i-2+i" => DynamicalSystem::gauss_mult(&gauss(&[(0, 1), (1, 1), (2, 1)])),
        "shift-z2-n" => DynamicalSystem::shift(BaseGroup::Cyclic(2), Semigroup::free_abelian(1)),
        "shift-z2-f2" => DynamicalSystem::shift(BaseGroup::Cyclic(2), Semigroup::free_monoid(2)),
        "shift-z2-n2" => DynamicalSystem::shift(BaseGroup::Cyclic(2), Semigroup::free_abelian(2)),
        "shift-z-n" => DynamicalSystem::shift(BaseGroup::Integers, Semigroup::free_abelian(1)),
        "trivial-f2" => DynamicalSystem::trivial_group(Semigroup::free_monoid(2)),
        "trivial-n2" => DynamicalSystem::trivial_group(Semigroup::free_abelian(2)),
        "z-sign" => DynamicalSystem::int_mult(&[-1]),
        "z-unit" => DynamicalSystem::int_mult(&[]),
        _ => Err(AlgebraError::Parse(format!(
            "unknown built-in system {name:?}; known: {}",
            NAMES.join(", ")
        ))),
    }
}
