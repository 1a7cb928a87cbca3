//! Constrained mechanical system on the unit sphere S² with a separable
//! quartic potential: elliptic coordinates, the classical Hamiltonian, and
//! action variables as period integrals (λ³+h₁λ+h₂)dλ/w on the associated
//! genus-2 curve, each action computed by two independent routes.

use crate::curve::{BranchSet, CurveSpec};
use crate::error::{Error, Result};
use crate::linalg::Vec5;
use crate::periods::{integrate_cycle, period_vector, Cycle};
use crate::picard_fuchs::pf_matrices;
use crate::scalar::{cabs, Cx, Real};

/// Tolerance on the unit-sphere constraint Σx_i² = 1.
pub const SPHERE_TOL: f64 = 1e-12;
/// Distance (relative to the a-scale) below which an elliptic coordinate
/// counts as sitting on a branch value a_i.
pub const BOUNDARY_REL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct NeumannConfig<R: Real> {
    pub a: [R; 3],
    pub x: [R; 3],
    pub y: [R; 3],
}

impl<R: Real> NeumannConfig<R> {
    pub fn new(a: [R; 3], x: [R; 3], y: [R; 3]) -> Result<Self> {
        if !(a[0] < a[1] && a[1] < a[2]) {
            return Err(Error::InvalidInput(
                "constants a must be strictly increasing".into(),
            ));
        }
        let s: R = x.iter().map(|v| *v * *v).fold(R::zero(), |p, q| p + q);
        if (s - R::one()).abs() > R::of(SPHERE_TOL) {
            return Err(Error::InvalidInput(format!(
                "point is off the unit sphere: sum of squares {}",
                s
            )));
        }
        Ok(NeumannConfig { a, x, y })
    }
}

/// Squared Cartesian coordinates from elliptic ones:
/// x_i² = (a_i-λ₁)(a_i-λ₂)/∏_{j≠i}(a_i-a_j). The three values sum to 1
/// identically; they may be negative or complex off the interlacing
/// region and are returned as written.
pub fn cartesian_squares<R: Real>(l1: Cx<R>, l2: Cx<R>, a: &[R; 3]) -> [Cx<R>; 3] {
    std::array::from_fn(|i| {
        let ai = Cx::new(a[i], R::zero());
        let mut denom = R::one();
        for j in 0..3 {
            if j != i {
                denom = denom * (a[i] - a[j]);
            }
        }
        (ai - l1) * (ai - l2) / Cx::new(denom, R::zero())
    })
}

/// Elliptic coordinates of a sphere point: the two roots λ₁ ≤ λ₂ of
/// Σ_i x_i²/(a_i-λ) = 0. The flag marks λ landing on a branch value a_i
/// (x on a coordinate plane).
pub fn elliptic_coordinates<R: Real>(x: &[R; 3], a: &[R; 3]) -> Result<(R, R, bool)> {
    let s: R = x.iter().map(|v| *v * *v).fold(R::zero(), |p, q| p + q);
    if (s - R::one()).abs() > R::of(SPHERE_TOL) {
        return Err(Error::InvalidInput(
            "elliptic coordinates require a unit-sphere point".into(),
        ));
    }
    let tr = a[0] + a[1] + a[2];
    // numerator quadratic λ² - Bλ + C of Σ x_i²/(a_i-λ)
    let mut b = R::zero();
    let mut c = R::zero();
    for i in 0..3 {
        let xi2 = x[i] * x[i];
        b = b + xi2 * (tr - a[i]);
        let mut prod = R::one();
        for j in 0..3 {
            if j != i {
                prod = prod * a[j];
            }
        }
        c = c + xi2 * prod;
    }
    let scale = a.iter().fold(R::one(), |m, v| m.max(v.abs()));
    let mut disc = b * b - R::of(4.0) * c;
    if disc < R::zero() {
        if disc > -R::of(1e-12) * scale * scale {
            disc = R::zero();
        } else {
            return Err(Error::Internal(
                "elliptic coordinate discriminant is negative".into(),
            ));
        }
    }
    let root = disc.sqrt();
    // cancellation-safe quadratic roots
    let (l1, l2) = if b >= R::zero() {
        let r = (b + root) * R::of(0.5);
        if r == R::zero() {
            (R::zero(), R::zero())
        } else {
            (c / r, r)
        }
    } else {
        let r = (b - root) * R::of(0.5);
        (r, c / r)
    };
    let (l1, l2) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
    let near = |l: R| a.iter().any(|ai| (l - *ai).abs() <= R::of(BOUNDARY_REL) * scale);
    Ok((l1, l2, near(l1) || near(l2)))
}

/// H = ½(|y|²|x|² - ⟨y,x⟩²) + ½⟨x,Ax⟩.
pub fn hamiltonian_classical<R: Real>(x: &[R; 3], y: &[R; 3], a: &[R; 3]) -> R {
    let dot = |u: &[R; 3], v: &[R; 3]| {
        u.iter()
            .zip(v)
            .map(|(p, q)| *p * *q)
            .fold(R::zero(), |s, t| s + t)
    };
    let xx = dot(x, x);
    let yy = dot(y, y);
    let xy = dot(x, y);
    let ax: R = x
        .iter()
        .zip(a)
        .map(|(xi, ai)| *ai * *xi * *xi)
        .fold(R::zero(), |s, t| s + t);
    R::of(0.5) * (yy * xx - xy * xy) + R::of(0.5) * ax
}

/// U(x) = ⟨x,Ax⟩² - 2TrA·⟨x,Ax⟩ - ⟨x,A*x⟩ with A* = det A · A⁻¹.
pub fn quartic_potential<R: Real>(x: &[R; 3], a: &[R; 3]) -> R {
    let ax: R = x
        .iter()
        .zip(a)
        .map(|(xi, ai)| *ai * *xi * *xi)
        .fold(R::zero(), |s, t| s + t);
    let tr = a[0] + a[1] + a[2];
    let astar = [a[1] * a[2], a[0] * a[2], a[0] * a[1]];
    let asx: R = x
        .iter()
        .zip(&astar)
        .map(|(xi, si)| *si * *xi * *xi)
        .fold(R::zero(), |s, t| s + t);
    ax * ax - R::of(2.0) * tr * ax - asx
}

/// Difference between the quartic potential and the elliptic-coordinate
/// expression λ₁²+λ₁λ₂+λ₂² at the same point; recorded as a diagnostic
/// (observed constant on the sphere), not asserted.
pub fn elliptic_potential_diff<R: Real>(x: &[R; 3], a: &[R; 3]) -> Result<R> {
    let (l1, l2, _) = elliptic_coordinates(x, a)?;
    Ok(quartic_potential(x, a) - (l1 * l1 + l1 * l2 + l2 * l2))
}

#[derive(Debug, Clone)]
pub struct ActionResult<R: Real> {
    /// One action per requested cycle, from the combination route.
    pub actions: Vec<Cx<R>>,
    /// Largest relative disagreement between the direct-quadrature route
    /// and the period-combination route.
    pub route_agreement: R,
    /// Largest |Im 𝒥| over the cycles.
    pub imag_residual: R,
    pub h1: Cx<R>,
    pub h2: Cx<R>,
}

/// Action variables 𝒥 = (1/2π)∮(λ³+h₁λ+h₂)dλ/w over the given cycles,
/// computed by direct quadrature of the combined integrand and
/// independently as (J₄+h₁J₂+h₂J₁)/(2π) from the period vector.
pub fn action_integrals<R: Real>(
    curve: &CurveSpec<Cx<R>>,
    cycles: &[Cycle<R>],
    tol: R,
) -> Result<ActionResult<R>> {
    let bs = BranchSet::from_curve(curve)?;
    let two_pi = R::of(2.0) * R::PI();
    let inv = Cx::new(two_pi.recip(), R::zero());
    let mut actions = Vec::with_capacity(cycles.len());
    let mut agree = R::zero();
    let mut imag = R::zero();
    for cycle in cycles {
        let direct = {
            let h1 = curve.h1;
            let h2 = curve.h2;
            let f = move |lambda: Cx<R>, w: Cx<R>, out: &mut [Cx<R>; 1]| {
                let p = ((lambda * lambda) * lambda) + h1 * lambda + h2;
                out[0] = p / w;
            };
            let (v, _, _) = integrate_cycle(&bs, cycle, tol, &f)?;
            v[0] * inv
        };
        let pv = period_vector(&bs, cycle, tol)?;
        let combined = (pv.j[3] + curve.h1 * pv.j[1] + curve.h2 * pv.j[0]) * inv;
        let denom = cabs(combined).max(R::of(1e-6));
        agree = agree.max(cabs(direct - combined) / denom);
        imag = imag.max(combined.im.abs());
        actions.push(combined);
    }
    Ok(ActionResult {
        actions,
        route_agreement: agree,
        imag_residual: imag,
        h1: curve.h1,
        h2: curve.h2,
    })
}

/// (∂𝒥/∂h₁, ∂𝒥/∂h₂) per cycle: the connection applied to the period
/// vector plus the explicit h-dependence of the combination,
/// ∂𝒥/∂h₁ = (½(U₁J)₄ + J₂ + h₁·½(U₁J)₂ + h₂·½(U₁J)₁)/(2π) and the same
/// with U₂ and J₁ in place of U₁ and J₂.
pub fn action_derivatives<R: Real>(
    curve: &CurveSpec<Cx<R>>,
    cycles: &[Cycle<R>],
    tol: R,
) -> Result<Vec<(Cx<R>, Cx<R>)>> {
    let bs = BranchSet::from_curve(curve)?;
    let sys = pf_matrices(curve)?;
    let two_pi = R::of(2.0) * R::PI();
    let inv = Cx::new(two_pi.recip(), R::zero());
    let half = Cx::new(R::of(0.5), R::zero());
    let mut out = Vec::with_capacity(cycles.len());
    for cycle in cycles {
        let pv = period_vector(&bs, cycle, tol)?;
        let j = Vec5(pv.j);
        let u1j = sys.u1.entries.matvec(&j);
        let u2j = sys.u2.entries.matvec(&j);
        let d1 = (half * u1j.0[3] + pv.j[1] + curve.h1 * half * u1j.0[1]
            + curve.h2 * half * u1j.0[0])
            * inv;
        let d2 = (half * u2j.0[3] + pv.j[0] + curve.h1 * half * u2j.0[1]
            + curve.h2 * half * u2j.0[0])
            * inv;
        out.push((d1, d2));
    }
    Ok(out)
}
