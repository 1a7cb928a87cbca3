//! Curve data: branch points, moduli, and the per-branch-point rows that
//! feed the connection matrices.
//!
//! The curve is `w^2 = R(lambda)` with
//! `R = (lambda - a1)(lambda - a2)(lambda - a3)(lambda^3 + h1*lambda + h2)`,
//! so the six branch points are the three fixed roots `a_i` together with the
//! three roots `rho_alpha` of the cubic factor. The cubic has no quadratic
//! term, hence `rho_1 + rho_2 + rho_3 = 0` identically; every root routine
//! here re-centers to keep that sum exactly zero.

use crate::error::{Error, Result};
use crate::scalar::{cabs, csqrt, Cx, Real, Ring};

/// Relative gap below which two branch points count as collided.
pub const BRANCH_GAP_REL: f64 = 1e-10;
/// Relative threshold on the cubic discriminant below which the moduli are
/// treated as degenerate.
pub const MODULI_DISC_REL: f64 = 1e-20;
/// Relative margin required between the best and second-best root matching.
pub const ROOT_MATCH_MARGIN_REL: f64 = 1e-9;

/// Curve parameters: the three fixed branch points and the two moduli of the
/// cubic factor.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec<T> {
    pub a: [T; 3],
    pub h1: T,
    pub h2: T,
}

impl<T: Ring> CurveSpec<T> {
    /// Elementary symmetric functions of the fixed branch points.
    pub fn sigma(&self) -> (T, T, T) {
        let [a1, a2, a3] = self.a.clone();
        let s1 = a1.clone() + a2.clone() + a3.clone();
        let s2 = a1.clone() * a2.clone() + a1.clone() * a3.clone() + a2.clone() * a3.clone();
        let s3 = a1 * a2 * a3;
        (s1, s2, s3)
    }
}

/// Moduli `(h1, h2)` of the monic centered cubic with the given roots:
/// `z^3 + h1*z + h2 = (z - rho1)(z - rho2)(z - rho3)` when the roots sum to
/// zero. The quadratic coefficient is dropped, so callers must center first.
pub fn moduli_from_roots<T: Ring>(rho: &[T; 3]) -> (T, T) {
    let [r1, r2, r3] = rho.clone();
    let h1 = r1.clone() * r2.clone() + r1.clone() * r3.clone() + r2.clone() * r3.clone();
    let h2 = -(r1 * r2 * r3);
    (h1, h2)
}

/// Discriminant of `z^3 + h1*z + h2`, namely `-4 h1^3 - 27 h2^2`.
pub fn cubic_discriminant<T: Ring>(h1: &T, h2: &T) -> T {
    let four = T::from_int(4);
    let twenty_seven = T::from_int(27);
    -(four * h1.clone() * h1.clone() * h1.clone())
        - twenty_seven * h2.clone() * h2.clone()
}

/// Natural scale of the moduli point, used to normalize degeneracy and
/// matching thresholds. Homogeneous of degree one in the roots.
pub fn moduli_scale<R: Real>(h1: Cx<R>, h2: Cx<R>) -> R {
    cabs(h1).sqrt().max(cabs(h2).cbrt())
}

fn cube_root<R: Real>(z: Cx<R>) -> Cx<R> {
    if z.re == R::zero() && z.im == R::zero() {
        return z;
    }
    z.cbrt()
}

/// Roots of `z^3 + h1*z + h2`, re-centered so their sum is exactly zero.
///
/// Without a hint the roots come back in a canonical order (lexicographic by
/// real then imaginary part). With a hint, the permutation closest to the
/// hint is chosen; if the second-best permutation is nearly as close the
/// matching is ambiguous (two roots have effectively collided) and an error
/// is returned instead of a silent branch swap.
pub fn roots_from_moduli<R: Real>(
    h1: Cx<R>,
    h2: Cx<R>,
    hint: Option<&[Cx<R>; 3]>,
) -> Result<[Cx<R>; 3]> {
    let scale = moduli_scale(h1, h2);
    let disc = cubic_discriminant(&h1, &h2);
    let threshold = R::of(MODULI_DISC_REL) * scale.powi(6);
    if cabs(disc) <= threshold {
        return Err(Error::DegenerateModuli {
            disc: cabs(disc).to_f64().unwrap_or(f64::NAN),
            threshold: threshold.to_f64().unwrap_or(f64::NAN),
        });
    }

    // Cardano: pick the larger of the two cube-root candidates for stability.
    let half = Cx::new(R::of(0.5), R::zero());
    let third = Cx::new(R::one() / R::of(3.0), R::zero());
    let d = (h2 * half) * (h2 * half) + (h1 * third) * (h1 * third) * (h1 * third);
    let sq = csqrt(d);
    let c1 = -h2 * half + sq;
    let c2 = -h2 * half - sq;
    let c = if cabs(c1) >= cabs(c2) { c1 } else { c2 };
    let u = cube_root(c);
    let v = -h1 * third / u;
    let omega = Cx::new(-R::of(0.5), R::of(0.75).sqrt());
    let omega2 = omega * omega;
    let mut roots = [u + v, omega * u + omega2 * v, omega2 * u + omega * v];

    // Newton polish; the discriminant check above keeps f' away from zero.
    for z in roots.iter_mut() {
        for _ in 0..3 {
            let f = (*z * *z + h1) * *z + h2;
            let fp = Cx::new(R::of(3.0), R::zero()) * *z * *z + h1;
            if cabs(fp) > R::zero() {
                *z -= f / fp;
            }
        }
    }

    // Exact re-centering: the computed roots should sum to ~0 already, this
    // removes the rounding residue so downstream identities hold tightly.
    let mean = (roots[0] + roots[1] + roots[2]) * third;
    for z in roots.iter_mut() {
        *z -= mean;
    }

    match hint {
        None => {
            roots.sort_by(|p, q| {
                p.re.partial_cmp(&q.re)
                    .unwrap()
                    .then(p.im.partial_cmp(&q.im).unwrap())
            });
            Ok(roots)
        }
        Some(h) => {
            const PERMS: [[usize; 3]; 6] = [
                [0, 1, 2],
                [0, 2, 1],
                [1, 0, 2],
                [1, 2, 0],
                [2, 0, 1],
                [2, 1, 0],
            ];
            let mut best = (R::infinity(), 0usize);
            let mut second = R::infinity();
            for (pi, p) in PERMS.iter().enumerate() {
                let mut cost = R::zero();
                for i in 0..3 {
                    cost += cabs(roots[p[i]] - h[i]);
                }
                if cost < best.0 {
                    second = best.0;
                    best = (cost, pi);
                } else if cost < second {
                    second = cost;
                }
            }
            let margin = R::of(ROOT_MATCH_MARGIN_REL) * scale;
            if second - best.0 <= margin {
                return Err(Error::RootTrackingAmbiguity {
                    margin: (second - best.0).to_f64().unwrap_or(f64::NAN),
                });
            }
            let p = PERMS[best.1];
            Ok([roots[p[0]], roots[p[1]], roots[p[2]]])
        }
    }
}

/// The six branch points as an ordered list: the three cubic roots in
/// canonical order followed by the three fixed points in the order given.
/// Everything indexed by `k` downstream refers to positions in this list.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchSet<T> {
    pub e: [T; 6],
}

impl<R: Real> BranchSet<Cx<R>> {
    /// Assemble the branch points of a curve, rejecting collided pairs.
    pub fn from_curve(curve: &CurveSpec<Cx<R>>) -> Result<Self> {
        let rho = roots_from_moduli(curve.h1, curve.h2, None)?;
        let e = [
            rho[0], rho[1], rho[2], curve.a[0], curve.a[1], curve.a[2],
        ];
        let set = BranchSet { e };
        set.check_distinct()?;
        Ok(set)
    }

    /// Branch set from explicitly given points, kept in the given order.
    pub fn from_points(e: [Cx<R>; 6]) -> Result<Self> {
        let set = BranchSet { e };
        set.check_distinct()?;
        Ok(set)
    }

    pub fn max_abs(&self) -> R {
        let mut m = R::zero();
        for z in &self.e {
            m = m.max(cabs(*z));
        }
        m
    }

    pub fn min_gap(&self) -> R {
        let mut g = R::infinity();
        for i in 0..6 {
            for j in i + 1..6 {
                g = g.min(cabs(self.e[i] - self.e[j]));
            }
        }
        g
    }

    fn check_distinct(&self) -> Result<()> {
        let threshold = R::of(BRANCH_GAP_REL) * self.max_abs();
        for i in 0..6 {
            for j in i + 1..6 {
                let gap = cabs(self.e[i] - self.e[j]);
                if gap <= threshold {
                    return Err(Error::DegenerateCurve {
                        i: i + 1,
                        j: j + 1,
                        gap: gap.to_f64().unwrap_or(f64::NAN),
                        threshold: threshold.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        Ok(())
    }

    /// Evaluate `R(lambda)` as the product over branch points.
    pub fn eval(&self, lambda: Cx<R>) -> Cx<R> {
        let mut acc = Cx::new(R::one(), R::zero());
        for z in &self.e {
            acc *= lambda - *z;
        }
        acc
    }

    /// Evaluate `R'(lambda)` via the logarithmic-derivative sum. Only valid
    /// away from the branch points.
    pub fn eval_derivative(&self, lambda: Cx<R>) -> Cx<R> {
        let r = self.eval(lambda);
        let mut acc = Cx::new(R::zero(), R::zero());
        for z in &self.e {
            acc += Cx::new(R::one(), R::zero()) / (lambda - *z);
        }
        r * acc
    }
}

/// Coefficients of the quotient `R(lambda)/(lambda - e_k)` written as
/// `lambda^5 + delta[0] lambda^4 + ... + delta[4]`, plus `R'(e_k)` as the
/// product over the other branch points.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaRow<T> {
    /// 0-based index of the distinguished branch point.
    pub k: usize,
    pub delta: [T; 5],
    pub rprime: T,
}

/// Expand `prod_{i != k} (lambda - e_i)` by a Horner cascade: each root `o`
/// maps coefficients `s` to `s[j] - o*s[j-1]` from the top down.
pub fn delta_row<T: Ring>(e: &[T; 6], k: usize) -> DeltaRow<T> {
    assert!(k < 6, "branch index out of range");
    let mut s = [
        T::one(),
        T::zero(),
        T::zero(),
        T::zero(),
        T::zero(),
        T::zero(),
    ];
    let mut deg = 0usize;
    let mut rprime = T::one();
    for (i, o) in e.iter().enumerate() {
        if i == k {
            continue;
        }
        deg += 1;
        for j in (1..=deg).rev() {
            let sub = o.clone() * s[j - 1].clone();
            s[j] = s[j].clone() - sub;
        }
        rprime = rprime * (e[k].clone() - o.clone());
    }
    DeltaRow {
        k,
        delta: [
            s[1].clone(),
            s[2].clone(),
            s[3].clone(),
            s[4].clone(),
            s[5].clone(),
        ],
        rprime,
    }
}

impl<T: Ring> DeltaRow<T> {
    /// `R'(e_k)` evaluated through the quotient polynomial instead of the
    /// product; equals `rprime` identically and serves as a cross-check.
    pub fn rprime_via_quotient(&self, ek: &T) -> T {
        let mut acc = T::one();
        for d in &self.delta {
            acc = acc * ek.clone() + d.clone();
        }
        acc
    }
}

/// The five coefficients `(g, d, c, b, a)` attached to branch point `e_k`.
/// They encode the exact division
/// `R'(e_k) * lambda^j = Q_j(lambda) + 2 (lambda - e_k) * (a_j lambda^4 + ... + g_j) * something`
/// used to reduce derivative integrands back to the period basis; see the
/// connection-matrix module for the assembled statement.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientRow<T> {
    pub g: T,
    pub d: T,
    pub c: T,
    pub b: T,
    pub a: T,
}

impl<T: Ring> CoefficientRow<T> {
    pub fn as_vec(&self) -> [T; 5] {
        [
            self.g.clone(),
            self.d.clone(),
            self.c.clone(),
            self.b.clone(),
            self.a.clone(),
        ]
    }
}

/// Coefficient row at branch point `e_k`, in terms of the delta row.
pub fn coefficient_row<T: Ring>(e: &[T; 6], k: usize) -> CoefficientRow<T> {
    let dr = delta_row(e, k);
    coefficient_row_from_delta(&e[k], &dr)
}

pub fn coefficient_row_from_delta<T: Ring>(ek: &T, dr: &DeltaRow<T>) -> CoefficientRow<T> {
    let [d1, d2, d3, _d4, _d5] = dr.delta.clone();
    let ek1 = ek.clone();
    let ek2 = ek1.clone() * ek1.clone();
    let ek3 = ek2.clone() * ek1.clone();
    let ek4 = ek3.clone() * ek1.clone();
    let three = T::from_int(3);
    let two = T::from_int(2);
    let a = two.clone();
    let b = -(ek1.clone() - three * d1.clone()).half();
    let c = -(ek2.clone() + ek1.clone() * d1.clone() - two * d2.clone()).half();
    let d = -(ek3.clone() + ek2.clone() * d1.clone() + ek1.clone() * d2.clone() - d3.clone())
        .half();
    let g = -(ek4 + ek3 * d1 + ek2 * d2 + ek1 * d3).half();
    CoefficientRow { g, d, c, b, a }
}

/// Product of squared differences over all branch-point pairs.
pub fn discriminant<T: Ring>(e: &[T; 6]) -> T {
    let mut acc = T::one();
    for i in 0..6 {
        for j in i + 1..6 {
            let d = e[i].clone() - e[j].clone();
            acc = acc * d.clone() * d;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn fixture_moduli_round_trip() {
        let rho = [c(-3.0), c(1.0), c(2.0)];
        let (h1, h2) = moduli_from_roots(&rho);
        assert_eq!(h1, c(-7.0));
        assert_eq!(h2, c(6.0));
        let back = roots_from_moduli(h1, h2, None).unwrap();
        for (r, want) in back.iter().zip(rho.iter()) {
            assert!((r - want).norm() < 1e-13);
        }
    }

    #[test]
    fn root_hint_follows_permutation() {
        let (h1, h2) = (c(-7.0), c(6.0));
        let hint = [c(2.1), c(-3.1), c(0.9)];
        let rho = roots_from_moduli(h1, h2, Some(&hint)).unwrap();
        assert!((rho[0] - c(2.0)).norm() < 1e-13);
        assert!((rho[1] - c(-3.0)).norm() < 1e-13);
        assert!((rho[2] - c(1.0)).norm() < 1e-13);
    }

    #[test]
    fn degenerate_moduli_detected() {
        // disc = -4*(-3)^3 - 27*4 = 108 - 108 = 0 at (h1, h2) = (-3, 2)
        let err = roots_from_moduli(c(-3.0), c(2.0), None).unwrap_err();
        assert!(matches!(err, Error::DegenerateModuli { .. }));
    }

    #[test]
    fn delta_row_examples() {
        let e = [c(1.0), c(2.0), c(3.0), c(4.0), c(5.0), c(6.0)];
        let dr = delta_row(&e, 0);
        assert_eq!(dr.delta[0], c(-20.0));
        assert_eq!(dr.delta[4], c(-720.0));
        assert_eq!(dr.rprime, c(-120.0));
        assert_eq!(dr.rprime_via_quotient(&e[0]), c(-120.0));
        let row = coefficient_row(&e, 0);
        assert_eq!(row.a, c(2.0));
        assert_eq!(row.b, c(-30.5));
    }

    #[test]
    fn discriminant_example() {
        let e = [c(1.0), c(2.0), c(3.0), c(4.0), c(5.0), c(6.0)];
        assert_eq!(discriminant(&e), c(1194393600.0));
    }
}
