//! Exact computations with right LCM semigroups, algebraic dynamical systems
//! `(G, P, θ)` and the operator algebras built from them.

pub mod catalog;
pub mod dynamics;
pub mod error;
pub mod gaussian;
pub mod group;
pub mod monomial;
pub mod morphism;
pub mod product_system;
pub mod regular_rep;
pub mod report;
pub mod sample;
pub mod scalar;
pub mod semidirect;
pub mod semigroup;

pub use dynamics::{Action, DynamicalSystem};
pub use error::{AlgebraError, Result};
pub use gaussian::Gaussian;
pub use group::{BaseGroup, GroupElement};
pub use monomial::{AlgebraElement, Monomial, MonomialAlgebra};
pub use morphism::{AdsMorphism, GroupMap, ImageFindings, SemigroupMap};
pub use product_system::{FibreVector, FockVector, GroupAlgebraElement, ProductSystem, RankOne};
pub use regular_rep::{PartialInjection, RegularRep};
pub use report::Report;
pub use sample::SampleSpec;
pub use scalar::Scalar;
pub use semidirect::{IdealOutcome, SdElement};
pub use semigroup::{RightLcm, Semigroup, SemigroupElement};
