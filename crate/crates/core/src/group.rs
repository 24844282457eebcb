//! Group elements for the built-in dynamical systems.
//!
//! Every built-in group is abelian; the group law is written additively in the
//! integer-like families and as pointwise addition for shift groups.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, Integer, Signed};

use crate::gaussian::Gaussian;
use crate::semigroup::SemigroupElement;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Int(BigInt),
    Gauss(Gaussian),
    Residue(u64),
    /// Finitely supported function `P → G₀`; zero values are never stored.
    Shift(BTreeMap<SemigroupElement, BigInt>),
    Trivial,
}

impl GroupElement {
    pub fn int(v: i64) -> Self {
        GroupElement::Int(BigInt::from(v))
    }

    pub fn gauss(re: i64, im: i64) -> Self {
        GroupElement::Gauss(Gaussian::new(re, im))
    }

    /// The point mass `value·δ_position`.
    pub fn point_mass(position: SemigroupElement, value: i64) -> Self {
        let mut m = BTreeMap::new();
        if value != 0 {
            m.insert(position, BigInt::from(value));
        }
        GroupElement::Shift(m)
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            GroupElement::Int(v) => Some(v),
            _ => None,
        }
    }

    pub(crate) fn family(&self) -> &'static str {
        match self {
            GroupElement::Int(_) => "integer",
            GroupElement::Gauss(_) => "Gaussian integer",
            GroupElement::Residue(_) => "residue",
            GroupElement::Shift(_) => "finitely supported function",
            GroupElement::Trivial => "trivial",
        }
    }
}

/// The coefficient group `G₀` of a shift system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseGroup {
    Cyclic(u64),
    Integers,
}

impl BaseGroup {
    pub fn name(&self) -> String {
        match self {
            BaseGroup::Cyclic(n) => format!("Z/{n}"),
            BaseGroup::Integers => "Z".to_string(),
        }
    }

    pub fn reduce(&self, v: BigInt) -> BigInt {
        match self {
            BaseGroup::Cyclic(n) => v.mod_floor(&BigInt::from(*n)),
            BaseGroup::Integers => v,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, BaseGroup::Cyclic(_))
    }

    /// The `i`-th nonzero element: `1, 2, …, n−1` or `1, −1, 2, −2, …`.
    pub fn nonzero(&self, i: usize) -> Option<BigInt> {
        match self {
            BaseGroup::Cyclic(n) => ((i as u64) + 1 < *n).then(|| BigInt::from(i + 1)),
            BaseGroup::Integers => {
                let m = BigInt::from(i / 2 + 1);
                Some(if i.is_multiple_of(2) { m } else { -m })
            }
        }
    }
}

pub(crate) fn display_shift(
    f: &BTreeMap<SemigroupElement, BigInt>,
    show_pos: impl Fn(&SemigroupElement) -> String,
) -> String {
    if f.is_empty() {
        return "0".to_string();
    }
    f.iter()
        .map(|(x, v)| {
            if v == &BigInt::from(1) {
                format!("δ[{}]", show_pos(x))
            } else {
                format!("{v}δ[{}]", show_pos(x))
            }
        })
        .collect::<Vec<_>>()
        .join("+")
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Int(v) => write!(f, "{v}"),
            GroupElement::Gauss(z) => write!(f, "{z}"),
            GroupElement::Residue(r) => write!(f, "{r}"),
            GroupElement::Shift(m) => f.write_str(&display_shift(m, |x| format!("{x:?}"))),
            GroupElement::Trivial => f.write_str("1"),
        }
    }
}

/// Least nonnegative residue modulo `|modulus|`.
pub(crate) fn least_residue(g: &BigInt, modulus: &BigInt) -> BigInt {
    g.mod_floor(&modulus.abs())
}
