//! Connection matrices for period derivatives with respect to the moduli:
//! 2 ∂J/∂h₁ = U₁J and 2 ∂J/∂h₂ = U₂J, built two independent ways.
//!
//! The closed form writes U_i as a sum of three rank-one matrices, one per
//! cubic root ρ_α, plus a sparse lower-triangular addend. The transform
//! route instead pushes the three branch-point matrices M_α through the
//! chain rule ∂ρ_α/∂h_m = -ρ_α^{p_m}/P'(ρ_α). Both must agree entrywise,
//! and that agreement is one of the library's standing cross-checks.

use crate::curve::{moduli_scale, roots_from_moduli, CurveSpec};
use crate::error::{Error, Result};
use crate::gauss_manin::{gm_matrix, ConnectionMatrix, Label, Rank1};
use crate::linalg::Mat5;
use crate::scalar::{cabs, Cx, Real, Ring};

/// Relative guard on cubic-root gaps and on Φ(ρ_α); the rank-one weights
/// carry second-order poles in these quantities.
pub const PF_GUARD_REL: f64 = 1e-8;

/// Which construction produced a PF system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    ClosedForm,
    Transform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PFSystem<T> {
    pub u1: ConnectionMatrix<T>,
    pub u2: ConnectionMatrix<T>,
    pub route: Route,
}

/// Closed-form U₁, U₂ from the roots and the fixed branch points. Assumes
/// the roots sum to zero; no degeneracy guards at this layer (see
/// [`pf_matrices`] for the guarded float entry point).
pub fn pf_matrices_from_roots<T: Ring>(rho: &[T; 3], a: &[T; 3]) -> PFSystem<T> {
    let s1 = a[0].clone() + a[1].clone() + a[2].clone();
    let s2 = a[0].clone() * a[1].clone()
        + a[0].clone() * a[2].clone()
        + a[1].clone() * a[2].clone();
    let s3 = a[0].clone() * a[1].clone() * a[2].clone();
    let h1 = rho[0].clone() * rho[1].clone()
        + rho[0].clone() * rho[2].clone()
        + rho[1].clone() * rho[2].clone();
    let h2 = -(rho[0].clone() * rho[1].clone() * rho[2].clone());

    let two = T::from_int(2);
    let three = T::from_int(3);
    let mut parts1 = Vec::with_capacity(3);
    let mut parts2 = Vec::with_capacity(3);
    for alpha in 0..3 {
        let r = rho[alpha].clone();
        let beta = rho[(alpha + 1) % 3].clone();
        let gamma = rho[(alpha + 2) % 3].clone();
        let pprime = (r.clone() - beta) * (r.clone() - gamma);
        let phi = (r.clone() - a[0].clone())
            * (r.clone() - a[1].clone())
            * (r.clone() - a[2].clone());
        let r2 = r.clone() * r.clone();
        let r3 = r2.clone() * r.clone();
        let r4 = r3.clone() * r.clone();

        // Coefficient row at ρ_α, written through the moduli. These agree
        // identically with coefficient_row evaluated at e_k = ρ_α.
        let b = r.clone() - three.clone() * s1.clone().half();
        let c = h1.clone() - (s1.clone() * r.clone()).half() + s2.clone();
        let d = (r2.clone() * s1.clone() - two.clone() * r3.clone() + h2.clone()
            - h1.clone() * s1.clone()
            - s3.clone())
        .half();
        let g = -(r.clone() * phi.clone())
            + (h2.clone() * r.clone() - s3.clone() * r.clone() - h2.clone() * s1.clone()).half();
        let row = [g, d, c, b, two.clone()];
        let col = [T::one(), r.clone(), r2, r3, r4];

        let pole = T::one() / (phi * pprime.clone() * pprime);
        let w1 = -(two.clone() * r.clone() * pole.clone());
        let w2 = -(two.clone() * pole.clone());
        parts1.push(Rank1 {
            weight: w1,
            pole: pole.clone(),
            col: col.clone(),
            row: row.clone(),
        });
        parts2.push(Rank1 {
            weight: w2,
            pole,
            col,
            row,
        });
    }

    // Sparse lower addends of the constrained (h₃ = 0) family.
    let mut l1 = Mat5::zero();
    l1.0[2][0] = -T::one();
    l1.0[3][1] = -T::one();
    l1.0[4][0] = h1.clone();
    l1.0[4][2] = -T::one();
    let mut l2 = Mat5::zero();
    l2.0[3][0] = -T::one();
    l2.0[4][1] = -T::one();

    PFSystem {
        u1: ConnectionMatrix::new(Label::U1, parts1, l1),
        u2: ConnectionMatrix::new(Label::U2, parts2, l2),
        route: Route::ClosedForm,
    }
}

fn guarded_roots<R: Real>(
    curve: &CurveSpec<Cx<R>>,
    hint: Option<&[Cx<R>; 3]>,
) -> Result<[Cx<R>; 3]> {
    let rho = roots_from_moduli(curve.h1, curve.h2, hint)?;
    let scale = moduli_scale(curve.h1, curve.h2).max(R::of(1e-300));
    for alpha in 0..3 {
        for beta in alpha + 1..3 {
            let gap = cabs(rho[alpha] - rho[beta]);
            if gap < R::of(PF_GUARD_REL) * scale {
                return Err(Error::DegenerateModuli {
                    disc: gap.to_f64().unwrap_or(f64::NAN),
                    threshold: (R::of(PF_GUARD_REL) * scale).to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    let mut ascale = scale;
    for ai in &curve.a {
        ascale = ascale.max(cabs(*ai));
    }
    for r in &rho {
        let phi = (r - curve.a[0]) * (r - curve.a[1]) * (r - curve.a[2]);
        if cabs(phi) < R::of(PF_GUARD_REL) * ascale.powi(3) {
            return Err(Error::DegenerateCurve {
                i: 0,
                j: 0,
                gap: cabs(phi).to_f64().unwrap_or(f64::NAN),
                threshold: (R::of(PF_GUARD_REL) * ascale.powi(3))
                    .to_f64()
                    .unwrap_or(f64::NAN),
            });
        }
    }
    Ok(rho)
}

/// Guarded closed-form construction over complex floats.
pub fn pf_matrices<R: Real>(curve: &CurveSpec<Cx<R>>) -> Result<PFSystem<Cx<R>>> {
    let rho = guarded_roots(curve, None)?;
    Ok(pf_matrices_from_roots(&rho, &curve.a))
}

/// As [`pf_matrices`] but with the roots tracked against a hint, for use
/// along moduli paths.
pub fn pf_matrices_tracked<R: Real>(
    curve: &CurveSpec<Cx<R>>,
    hint: &[Cx<R>; 3],
) -> Result<PFSystem<Cx<R>>> {
    let rho = guarded_roots(curve, Some(hint))?;
    Ok(pf_matrices_from_roots(&rho, &curve.a))
}

/// Chain-rule weights t_α = -ρ_α^p / P'(ρ_α) for differentiating through
/// the root positions; p = 1 for h₁, p = 0 for h₂, p = 2 for the h₃
/// diagnostic direction.
fn transform_weights<T: Ring>(rho: &[T; 3], power: usize) -> [T; 3] {
    std::array::from_fn(|alpha| {
        let r = rho[alpha].clone();
        let beta = rho[(alpha + 1) % 3].clone();
        let gamma = rho[(alpha + 2) % 3].clone();
        let pprime = (r.clone() - beta) * (r.clone() - gamma);
        let mut num = T::one();
        for _ in 0..power {
            num = num * r.clone();
        }
        -(num / pprime)
    })
}

fn combine_gm<T: Ring>(
    label: Label,
    ms: &[ConnectionMatrix<T>; 3],
    ts: &[T; 3],
) -> ConnectionMatrix<T> {
    let mut parts = Vec::with_capacity(3);
    let mut lower = Mat5::zero();
    for alpha in 0..3 {
        let m = &ms[alpha];
        for p in &m.parts {
            parts.push(Rank1 {
                weight: p.weight.clone() * ts[alpha].clone(),
                pole: p.pole.clone(),
                col: p.col.clone(),
                row: p.row.clone(),
            });
        }
        lower = lower.add(&m.lower.scale(&ts[alpha]));
    }
    ConnectionMatrix::new(label, parts, lower)
}

/// U₁, U₂ obtained by pushing the three root matrices M_α through the
/// change of variables from branch points to moduli. Generic core; assumes
/// zero-sum roots.
pub fn pf_from_gm_roots<T: Ring>(rho: &[T; 3], a: &[T; 3]) -> PFSystem<T> {
    let e: [T; 6] = [
        rho[0].clone(),
        rho[1].clone(),
        rho[2].clone(),
        a[0].clone(),
        a[1].clone(),
        a[2].clone(),
    ];
    let ms = [gm_matrix(&e, 0), gm_matrix(&e, 1), gm_matrix(&e, 2)];
    let t1 = transform_weights(rho, 1);
    let t2 = transform_weights(rho, 0);
    PFSystem {
        u1: combine_gm(Label::U1, &ms, &t1),
        u2: combine_gm(Label::U2, &ms, &t2),
        route: Route::Transform,
    }
}

/// Guarded transform route over complex floats.
pub fn pf_from_gm<R: Real>(curve: &CurveSpec<Cx<R>>) -> Result<PFSystem<Cx<R>>> {
    let rho = guarded_roots(curve, None)?;
    Ok(pf_from_gm_roots(&rho, &curve.a))
}

/// The would-be ∂/∂h₃ matrix of the unconstrained family, exposed only as
/// a diagnostic; the library models the constrained family with h₃ = 0.
pub fn pf_h3_diagnostic<R: Real>(curve: &CurveSpec<Cx<R>>) -> Result<Mat5<Cx<R>>> {
    let rho = guarded_roots(curve, None)?;
    let e = [
        rho[0], rho[1], rho[2], curve.a[0], curve.a[1], curve.a[2],
    ];
    let ms = [gm_matrix(&e, 0), gm_matrix(&e, 1), gm_matrix(&e, 2)];
    let t3 = transform_weights(&rho, 2);
    Ok(combine_gm(Label::U1, &ms, &t3).entries)
}

/// Largest relative entrywise difference between the two construction
/// routes.
pub fn route_equivalence_residual<R: Real>(curve: &CurveSpec<Cx<R>>) -> Result<R> {
    let closed = pf_matrices(curve)?;
    let transformed = pf_from_gm(curve)?;
    let scale = closed
        .u1
        .entries
        .norm()
        .max(closed.u2.entries.norm())
        .max(R::min_positive_value());
    let d1 = closed.u1.entries.sub(&transformed.u1.entries).norm();
    let d2 = closed.u2.entries.sub(&transformed.u2.entries).norm();
    Ok(d1.max(d2) / scale)
}

/// Signed residuals f_k - closed_form(k) for the four root identities
/// f_k = ρ₁^k(ρ₂-ρ₃) + ρ₂^k(ρ₃-ρ₁) + ρ₃^k(ρ₁-ρ₂), k = 1..4, valid for
/// arbitrary triples (not only zero-sum ones):
/// 0, Δ, -Δh₃, Δ(h₃² - h₁), with Δ = (ρ₁-ρ₂)(ρ₃-ρ₁)(ρ₃-ρ₂),
/// h₃ = -(ρ₁+ρ₂+ρ₃), h₁ = ρ₁ρ₂+ρ₁ρ₃+ρ₂ρ₃.
pub fn root_identity_residuals<T: Ring>(rho: &[T; 3]) -> [T; 4] {
    let [r1, r2, r3] = rho.clone();
    let delta = (r1.clone() - r2.clone()) * (r3.clone() - r1.clone()) * (r3.clone() - r2.clone());
    let h3 = -(r1.clone() + r2.clone() + r3.clone());
    let h1 = r1.clone() * r2.clone() + r1.clone() * r3.clone() + r2.clone() * r3.clone();
    let closed = [
        T::zero(),
        delta.clone(),
        -(delta.clone() * h3.clone()),
        delta * (h3.clone() * h3 - h1),
    ];
    std::array::from_fn(|idx| {
        let k = idx + 1;
        let pow = |r: &T| {
            let mut p = T::one();
            for _ in 0..k {
                p = p * r.clone();
            }
            p
        };
        let f = pow(&r1) * (r2.clone() - r3.clone())
            + pow(&r2) * (r3.clone() - r1.clone())
            + pow(&r3) * (r1.clone() - r2.clone());
        f - closed[idx].clone()
    })
}

/// Absolute residuals of the four root identities at a float triple.
pub fn verify_root_identities<R: Real>(rho: &[Cx<R>; 3]) -> [R; 4] {
    let res = root_identity_residuals(rho);
    std::array::from_fn(|i| cabs(res[i]))
}

/// Normalized zero-curvature residual of the moduli system at a point:
/// ‖∂_{h₂}U₁ - ∂_{h₁}U₂ + ½(U₁U₂ - U₂U₁)‖ / (‖U₁‖(1 + ‖U₂‖)), with the
/// matrix derivatives taken by centered differences of step `delta`.
pub fn zero_curvature_residual<R: Real>(curve: &CurveSpec<Cx<R>>, delta: R) -> Result<R> {
    let d = Cx::new(delta, R::zero());
    let shift = |dh1: Cx<R>, dh2: Cx<R>| CurveSpec {
        a: curve.a,
        h1: curve.h1 + dh1,
        h2: curve.h2 + dh2,
    };
    let zero = Cx::new(R::zero(), R::zero());
    let base = pf_matrices(curve)?;
    let u1_p = pf_matrices(&shift(zero, d))?.u1.entries;
    let u1_m = pf_matrices(&shift(zero, -d))?.u1.entries;
    let u2_p = pf_matrices(&shift(d, zero))?.u2.entries;
    let u2_m = pf_matrices(&shift(-d, zero))?.u2.entries;
    let inv2d = Cx::new((R::of(2.0) * delta).recip(), R::zero());
    let du1 = u1_p.sub(&u1_m).scale(&inv2d);
    let du2 = u2_p.sub(&u2_m).scale(&inv2d);
    let u1 = &base.u1.entries;
    let u2 = &base.u2.entries;
    let comm = u1.matmul(u2).sub(&u2.matmul(u1));
    let half = Cx::new(R::of(0.5), R::zero());
    let z = du1.sub(&du2).add(&comm.scale(&half));
    Ok(z.norm() / (u1.norm() * (R::one() + u2.norm())))
}

/// Ratio of smallest to largest singular value of the 5x6 matrix of period
/// vectors over six independent cycles; a diagnostic for "no linear
/// relation among the periods", reported but not asserted.
pub fn period_rank_ratio<R: Real>(columns: &[[Cx<R>; 5]]) -> f64
where
    R: Real,
{
    let rows = 5;
    let cols = columns.len();
    let mut m = nalgebra::DMatrix::<num_complex::Complex<f64>>::zeros(rows, cols);
    for (c, col) in columns.iter().enumerate() {
        for r in 0..rows {
            m[(r, c)] = num_complex::Complex::new(
                col[r].re.to_f64().unwrap_or(f64::NAN),
                col[r].im.to_f64().unwrap_or(f64::NAN),
            );
        }
    }
    let svd = m.svd(false, false);
    let mut smin = f64::INFINITY;
    let mut smax = 0.0f64;
    for s in svd.singular_values.iter() {
        smin = smin.min(*s);
        smax = smax.max(*s);
    }
    if smax == 0.0 {
        0.0
    } else {
        smin / smax
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::coefficient_row;
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn fixture() -> CurveSpec<Complex64> {
        CurveSpec {
            a: [c(4.0), c(5.0), c(6.0)],
            h1: c(-7.0),
            h2: c(6.0),
        }
    }

    #[test]
    fn routes_agree() {
        let r = route_equivalence_residual(&fixture()).unwrap();
        assert!(r < 1e-14, "route residual {r:.3e}");
    }

    #[test]
    fn closed_form_rows_match_generic_coefficients() {
        let curve = fixture();
        let rho = roots_from_moduli(curve.h1, curve.h2, None).unwrap();
        let e = [
            rho[0], rho[1], rho[2], curve.a[0], curve.a[1], curve.a[2],
        ];
        let sys = pf_matrices(&curve).unwrap();
        for alpha in 0..3 {
            let generic = coefficient_row(&e, alpha);
            let row = &sys.u1.parts[alpha].row;
            assert!((row[0] - generic.g).norm() < 1e-12);
            assert!((row[1] - generic.d).norm() < 1e-12);
            assert!((row[2] - generic.c).norm() < 1e-12);
            assert!((row[3] - generic.b).norm() < 1e-12);
            assert_eq!(row[4], c(2.0));
        }
    }

    #[test]
    fn lower_addend_entries() {
        let sys = pf_matrices(&fixture()).unwrap();
        assert_eq!(sys.u1.lower.0[4][0], c(-7.0));
        assert_eq!(sys.u1.lower.0[2][0], c(-1.0));
        assert_eq!(sys.u1.lower.0[3][0], c(0.0));
        assert_eq!(sys.u2.lower.0[3][0], c(-1.0));
        assert_eq!(sys.u2.lower.0[4][1], c(-1.0));
    }

    #[test]
    fn root_identities_vanish() {
        let zero = root_identity_residuals(&[c(1.0), c(2.0), c(-3.0)]);
        for r in zero {
            assert_eq!(r, c(0.0));
        }
        let sym = verify_root_identities(&[
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.3, -0.1),
            Complex64::new(0.0, 0.0),
        ]);
        for r in sym {
            assert!(r < 1e-13);
        }
    }

    #[test]
    fn curvature_residual_small() {
        let r = zero_curvature_residual(&fixture(), 1e-5).unwrap();
        assert!(r < 1e-4, "curvature residual {r:.3e}");
    }

    #[test]
    fn degenerate_moduli_rejected() {
        let mut curve = fixture();
        curve.h1 = c(-3.0);
        curve.h2 = c(2.0);
        assert!(pf_matrices(&curve).is_err());
    }
}
