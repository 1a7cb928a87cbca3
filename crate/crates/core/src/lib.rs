//! Periods of abelian integrals on genus-2 curves w² = R(λ) with R a
//! degree-6 polynomial split as (λ−a₁)(λ−a₂)(λ−a₃)(λ³+h₁λ+h₂).
//!
//! The crate computes the five basic periods J_i = ∮ λ^{i-1} dλ/w by
//! adaptive contour quadrature, the exact connection matrices governing
//! their derivatives in the branch points (M_k) and in the moduli (U₁,U₂),
//! parallel transport of period vectors along moduli paths, numerical
//! monodromy around the discriminant, and action variables of the
//! mechanical system attached to the curve family. A complete-elliptic
//! baseline (K, Ē against AGM) anchors the quadrature machinery.
//!
//! Numerical routines are generic over the scalar through [`scalar::Real`];
//! the algebraic cores are generic over any commutative ring through
//! [`scalar::Ring`] so tests can run them over exact rationals.

pub mod contour;
pub mod curve;
pub mod error;
pub mod gauss_manin;
pub mod json;
pub mod legendre;
pub mod linalg;
pub mod neumann;
pub mod path;
pub mod periods;
pub mod picard_fuchs;
pub mod scalar;
pub mod transport;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Real, Ring};

/// Concrete double-precision aliases for the main types.
pub type C64 = num_complex::Complex64;
pub type Curve = curve::CurveSpec<C64>;
pub type Branches = curve::BranchSet<C64>;
pub type Periods = periods::PeriodVector<f64>;
pub type CycleF = periods::Cycle<f64>;
pub type PathF = path::ModuliPath<f64>;
