//! Genus-1 baseline: complete elliptic integrals K(k) and the variant
//! second-kind integral Ē(k) = ∫₀¹ z²dz/√((1-z²)(1-k²z²)), the first-order
//! system they satisfy in k, and the scalar second-order equation for K.
//! Quadrature values are cross-checked against arithmetic-geometric-mean
//! oracles, mirroring in miniature the period/connection split of the
//! genus-2 modules.

use crate::error::{Error, Result};
use crate::scalar::{cabs, csqrt, Cx, Real};

/// Minimum allowed distance of the modulus from the singular set {-1,0,1}.
pub const MODULUS_CLEARANCE: f64 = 1e-10;
const FIRST_NODES: usize = 16;
const MAX_NODES: usize = 1 << 20;
/// Relative convergence target of the doubling trapezoid rule; pushed near
/// machine precision so finite-difference consumers are not noise-limited.
const QUAD_REL: f64 = 1e-15;

/// A validated elliptic modulus. Real moduli must lie strictly inside the
/// unit interval; arbitrary complex moduli are accepted away from the
/// singular points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulus<R: Real> {
    pub k: Cx<R>,
}

impl<R: Real> EllipticModulus<R> {
    pub fn new(k: Cx<R>) -> Result<Self> {
        let clearance = R::of(MODULUS_CLEARANCE);
        for s in [-1.0, 0.0, 1.0] {
            if cabs(k - Cx::new(R::of(s), R::zero())) <= clearance {
                return Err(Error::InvalidInput(format!(
                    "modulus too close to the singular point {s}"
                )));
            }
        }
        if k.im.abs() <= R::of(1e-14) * cabs(k) && k.re.abs() >= R::one() {
            return Err(Error::InvalidInput(
                "real modulus must lie inside the unit interval".into(),
            ));
        }
        Ok(EllipticModulus { k })
    }
}

/// Doubling trapezoid rule for a π-periodic analytic integrand, applied to
/// ½∫₀^π f(θ)dθ.
fn periodic_half<R: Real, F: Fn(R) -> Cx<R>>(f: F) -> Result<Cx<R>> {
    let pi = R::PI();
    let mut n = FIRST_NODES;
    let mut prev: Option<Cx<R>> = None;
    while n <= MAX_NODES {
        let mut acc = Cx::new(R::zero(), R::zero());
        for m in 0..n {
            let theta = pi * R::of(m as f64) / R::of(n as f64);
            acc = acc + f(theta);
        }
        let val = acc * Cx::new(pi / R::of(n as f64) * R::of(0.5), R::zero());
        if let Some(p) = prev {
            let diff = cabs(val - p);
            if diff <= R::of(QUAD_REL) * (R::one() + cabs(val)) {
                return Ok(val);
            }
        }
        prev = Some(val);
        n *= 2;
    }
    Err(Error::QuadratureNonConvergence {
        err: f64::NAN,
        tol: QUAD_REL,
        nodes: MAX_NODES,
    })
}

/// K(k) = ∫₀¹ dz/√((1-z²)(1-k²z²)), the endpoint singularity removed by
/// z = sin θ.
pub fn k_complete<R: Real>(modulus: &EllipticModulus<R>) -> Result<Cx<R>> {
    let k2 = modulus.k * modulus.k;
    periodic_half(move |theta: R| {
        let s = theta.sin();
        let den = Cx::new(R::one(), R::zero()) - k2 * Cx::new(s * s, R::zero());
        Cx::new(R::one(), R::zero()) / csqrt(den)
    })
}

/// Ē(k) = ∫₀¹ z²dz/√((1-z²)(1-k²z²)), same substitution.
pub fn ebar_complete<R: Real>(modulus: &EllipticModulus<R>) -> Result<Cx<R>> {
    let k2 = modulus.k * modulus.k;
    periodic_half(move |theta: R| {
        let s = theta.sin();
        let s2 = Cx::new(s * s, R::zero());
        let den = Cx::new(R::one(), R::zero()) - k2 * s2;
        s2 / csqrt(den)
    })
}

fn agm_pair<R: Real>(k: Cx<R>) -> Result<(Cx<R>, Vec<Cx<R>>)> {
    let one = Cx::new(R::one(), R::zero());
    let mut a = one;
    let mut b = csqrt(one - k * k);
    let mut cs = vec![k];
    for _ in 0..64 {
        if cabs(a - b) <= R::of(1e-15) * cabs(a) {
            return Ok((a, cs));
        }
        let an = (a + b) * Cx::new(R::of(0.5), R::zero());
        let mut bn = csqrt(a * b);
        // right-choice branch: keep the mean and the root on the same side
        if cabs(an - bn) > cabs(an + bn) {
            bn = -bn;
        }
        cs.push((a - b) * Cx::new(R::of(0.5), R::zero()));
        a = an;
        b = bn;
    }
    Err(Error::QuadratureNonConvergence {
        err: f64::NAN,
        tol: 1e-15,
        nodes: 64,
    })
}

/// AGM oracle K = π/(2·AGM(1, √(1-k²))).
pub fn k_agm<R: Real>(modulus: &EllipticModulus<R>) -> Result<Cx<R>> {
    let (m, _) = agm_pair(modulus.k)?;
    Ok(Cx::new(R::PI() * R::of(0.5), R::zero()) / m)
}

/// AGM-family oracle for the canonical second-kind integral:
/// E = K·(1 - Σ_{n≥0} 2^{n-1} c_n²) with c₀ = k, c_{n+1} = (a_n - b_n)/2.
pub fn e_agm<R: Real>(modulus: &EllipticModulus<R>) -> Result<Cx<R>> {
    let (m, cs) = agm_pair(modulus.k)?;
    let kk = Cx::new(R::PI() * R::of(0.5), R::zero()) / m;
    let mut sum = Cx::new(R::zero(), R::zero());
    let mut w = R::of(0.5);
    for c in cs {
        sum = sum + Cx::new(w, R::zero()) * c * c;
        w = w * R::of(2.0);
    }
    Ok(kk * (Cx::new(R::one(), R::zero()) - sum))
}

/// AGM oracle for Ē through k²Ē = K - E.
pub fn ebar_agm<R: Real>(modulus: &EllipticModulus<R>) -> Result<Cx<R>> {
    let kk = k_agm(modulus)?;
    let e = e_agm(modulus)?;
    Ok((kk - e) / (modulus.k * modulus.k))
}

/// Partial sum of the Gauss series K = (π/2)·Σ ((2m)!/(2^{2m}(m!)²))²k^{2m}.
pub fn k_power_series<R: Real>(k: Cx<R>, terms: usize) -> Cx<R> {
    let mut coeff = R::one();
    let mut pow = Cx::new(R::one(), R::zero());
    let mut sum = Cx::new(R::zero(), R::zero());
    for m in 0..terms {
        if m > 0 {
            let mm = R::of(m as f64);
            let ratio = (R::of(2.0) * mm - R::one()) / (R::of(2.0) * mm);
            coeff = coeff * ratio;
            pow = pow * k * k;
        }
        sum = sum + Cx::new(coeff * coeff, R::zero()) * pow;
    }
    sum * Cx::new(R::PI() * R::of(0.5), R::zero())
}

fn values_at<R: Real>(k: Cx<R>) -> Result<(Cx<R>, Cx<R>)> {
    let m = EllipticModulus::new(k)?;
    Ok((k_complete(&m)?, ebar_complete(&m)?))
}

/// Absolute residuals of the first-order system
/// dK/dk = k(K-Ē)/(1-k²), dĒ/dk = (K-(2-k²)Ē)/(k(1-k²)),
/// with centered finite differences of step `delta` on the left-hand
/// sides.
pub fn legendre_system_residual<R: Real>(
    modulus: &EllipticModulus<R>,
    delta: R,
) -> Result<(R, R)> {
    let k = modulus.k;
    let d = Cx::new(delta, R::zero());
    let (kp, ep) = values_at(k + d)?;
    let (km, em) = values_at(k - d)?;
    let (kk, ee) = values_at(k)?;
    let inv2d = Cx::new((R::of(2.0) * delta).recip(), R::zero());
    let dk_fd = (kp - km) * inv2d;
    let de_fd = (ep - em) * inv2d;
    let one = Cx::new(R::one(), R::zero());
    let two = Cx::new(R::of(2.0), R::zero());
    let dk_rhs = k * (kk - ee) / (one - k * k);
    let de_rhs = (kk - (two - k * k) * ee) / (k * (one - k * k));
    Ok((cabs(dk_fd - dk_rhs), cabs(de_fd - de_rhs)))
}

/// Absolute residual of the second-order equation
/// k(1-k²)y″ + (1-3k²)y′ - ky = 0 for y = K, derivatives by fourth-order
/// centered finite differences over {k±δ, k±2δ}. The higher-order stencil
/// keeps the truncation error of y″ below the rounding noise of the
/// quadrature values even near the ends of the modulus range, where the
/// derivatives of K grow fast.
pub fn hyper_residual<R: Real>(modulus: &EllipticModulus<R>, delta: R) -> Result<R> {
    let k = modulus.k;
    let d = Cx::new(delta, R::zero());
    let two = Cx::new(R::of(2.0), R::zero());
    let (kp2, _) = values_at(k + two * d)?;
    let (kp1, _) = values_at(k + d)?;
    let (kk, _) = values_at(k)?;
    let (km1, _) = values_at(k - d)?;
    let (km2, _) = values_at(k - two * d)?;
    let s = |x: f64| Cx::new(R::of(x), R::zero());
    let ypp = (-kp2 + s(16.0) * kp1 - s(30.0) * kk + s(16.0) * km1 - km2)
        * Cx::new((R::of(12.0) * delta * delta).recip(), R::zero());
    let yp = (-kp2 + s(8.0) * kp1 - s(8.0) * km1 + km2)
        * Cx::new((R::of(12.0) * delta).recip(), R::zero());
    let one = Cx::new(R::one(), R::zero());
    let three = Cx::new(R::of(3.0), R::zero());
    let res = k * (one - k * k) * ypp + (one - three * k * k) * yp - k * kk;
    Ok(cabs(res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn m(k: f64) -> EllipticModulus<f64> {
        EllipticModulus::new(Complex64::new(k, 0.0)).unwrap()
    }

    #[test]
    fn half_modulus_reference_values() {
        let kk = k_complete(&m(0.5)).unwrap();
        assert!((kk.re - 1.685750354812596).abs() < 1e-13);
        assert!(kk.im.abs() < 1e-14);
        let eb = ebar_complete(&m(0.5)).unwrap();
        assert!((eb.re - 0.87315258189267555).abs() < 1e-13);
    }

    #[test]
    fn quadrature_agrees_with_agm() {
        // 20 points strictly inside (0.05, 0.95)
        for i in 0..20 {
            let k = 0.05 + 0.9 * (2.0 * (i as f64) + 1.0) / 40.0;
            let q = k_complete(&m(k)).unwrap();
            let a = k_agm(&m(k)).unwrap();
            assert!((q - a).norm() < 1e-11, "k={k}: {:.3e}", (q - a).norm());
            let qe = ebar_complete(&m(k)).unwrap();
            let ae = ebar_agm(&m(k)).unwrap();
            assert!((qe - ae).norm() < 1e-11);
        }
    }

    #[test]
    fn near_zero_limit() {
        let kk = k_complete(&m(1e-6)).unwrap();
        assert!((kk.re - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
        let eb = ebar_complete(&m(1e-6)).unwrap();
        assert!((eb.re - std::f64::consts::FRAC_PI_4).abs() < 1e-11);
    }

    #[test]
    fn gauss_series_partial_sums() {
        for k in [0.2, 0.3, 0.5] {
            let q = k_complete(&m(k)).unwrap();
            let s = k_power_series(Complex64::new(k, 0.0), 60);
            assert!((q - s).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn ebar_increases_on_real_interval() {
        let mut prev = 0.0;
        for i in 1..=9 {
            let k = 0.1 * i as f64;
            let v = ebar_complete(&m(k)).unwrap().re;
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn first_order_system_residuals() {
        for k in [0.3, 0.5, 0.7] {
            let (rk, re) = legendre_system_residual(&m(k), 1e-5).unwrap();
            assert!(rk < 1e-8 && re < 1e-8, "k={k}: {rk:.2e} {re:.2e}");
        }
        // centered differences: residual drops quadratically in delta
        let (r3, _) = legendre_system_residual(&m(0.5), 1e-3).unwrap();
        let (r4, _) = legendre_system_residual(&m(0.5), 1e-4).unwrap();
        assert!(r4 < r3 * 1e-1);
    }

    #[test]
    fn second_order_residual() {
        for k in [0.2, 0.5] {
            let r = hyper_residual(&m(k), 1e-4).unwrap();
            assert!(r < 1e-6, "k={k}: {r:.2e}");
        }
    }

    #[test]
    fn complex_modulus_supported() {
        let ms = EllipticModulus::new(Complex64::new(0.4, 0.3)).unwrap();
        let q = k_complete(&ms).unwrap();
        let a = k_agm(&ms).unwrap();
        assert!((q - a).norm() < 1e-11);
    }

    #[test]
    fn singular_moduli_rejected() {
        for k in [0.0, 1.0, -1.0, 1.0 + 1e-12] {
            assert!(EllipticModulus::new(Complex64::new(k, 0.0)).is_err());
        }
        assert!(EllipticModulus::new(Complex64::new(1.5, 0.0)).is_err());
    }
}
