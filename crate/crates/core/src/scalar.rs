//! Scalar abstractions: a commutative-ring bound for the exact algebraic
//! layer and a floating-point bound for the analytic layer.
//!
//! The algebraic pieces (symmetric functions, connection-matrix assembly,
//! root identities) only ever add, subtract, multiply, and divide by exact
//! small integers, so they are written over [`Ring`] and work equally for
//! `f64`, `Complex<f64>`, or an exact rational type. The quadrature and
//! transport layers need `sqrt`, `exp`, and friends and are written over
//! [`Real`] with `Complex<R>` values.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, Num, NumAssign};

/// Commutative ring with division (every scalar the algebraic layer meets).
///
/// Implemented automatically for any `Num + Neg` type: floats, complexes,
/// and exact rationals alike.
pub trait Ring: Num + NumAssign + Clone + std::ops::Neg<Output = Self> {
    /// The integer `n` as a ring element (`1 + 1 + ...`).
    fn from_int(n: u32) -> Self {
        let mut acc = Self::zero();
        for _ in 0..n {
            acc += Self::one();
        }
        acc
    }

    /// Exact division by two. Rationals divide exactly; floats halve.
    fn half(self) -> Self {
        self / Self::from_int(2)
    }
}

impl<T: Num + NumAssign + Clone + std::ops::Neg<Output = T>> Ring for T {}

/// Floating-point scalar for the analytic layer (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + std::fmt::Debug + std::fmt::Display + 'static
{
    /// Shorthand for converting literal tolerances and tableau constants.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over the analytic scalar.
pub type Cx<R> = Complex<R>;

/// Hypot-free magnitude used in tolerance tests; `|re| + |im|` would change
/// thresholds, so this is the true Euclidean norm.
pub fn cabs<R: Real>(z: Cx<R>) -> R {
    z.norm()
}

/// Principal square root of a complex number.
pub fn csqrt<R: Real>(z: Cx<R>) -> Cx<R> {
    z.sqrt()
}

/// Scale a complex number by a real factor, componentwise. Unlike
/// multiplication by `Complex::new(s, 0)` this commutes bitwise with
/// negation of `z`, which the orientation-reversal guarantee relies on.
pub fn cscale<R: Real>(z: Cx<R>, s: R) -> Cx<R> {
    Cx::new(z.re * s, z.im * s)
}
