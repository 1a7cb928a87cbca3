//! Paths in moduli space. A path lives either in h-space, where a point is
//! (h₁,h₂) with the branch points a₁,a₂,a₃ held fixed, or in e-space, where
//! a point is the full branch-point tuple (e₁,…,e₆). Legs are analytic arcs
//! chained end to end; the safety check keeps every path away from the
//! discriminant locus where branch points collide.

use crate::error::{Error, Result};
use crate::scalar::{cabs, Cx, Real};

/// Relative tolerance for leg-to-leg joints.
pub const JOINT_TOL_REL: f64 = 1e-12;
/// Relative tolerance for closure of a closed path.
pub const CLOSURE_TOL_REL: f64 = 1e-14;
/// Clearance factor: the sextic discriminant (degree 30 in the branch
/// points) must stay above 1e-8 times the 30th power of the RMS
/// branch-point scale.
pub const SAFETY_REL: f64 = 1e-8;
const SAFETY_SAMPLES: usize = 513;
const REFINE_SAMPLES: usize = 129;
const REFINE_ROUNDS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    /// Coordinates (h₁,h₂); dimension 2.
    H,
    /// Coordinates (e₁,…,e₆); dimension 6.
    E,
}

impl Space {
    pub fn dim(self) -> usize {
        match self {
            Space::H => 2,
            Space::E => 6,
        }
    }
}

/// One analytic arc. `Line` moves every coordinate linearly. `Arc` moves a
/// single coordinate along a circular arc (θ from `theta0` to `theta1`,
/// radians, counterclockwise when increasing) while the others sit at
/// their `center` values; a full circle is an arc with |θ₁-θ₀| = 2π·turns.
#[derive(Debug, Clone, PartialEq)]
pub enum Leg<R: Real> {
    Line {
        from: Vec<Cx<R>>,
        to: Vec<Cx<R>>,
    },
    Arc {
        center: Vec<Cx<R>>,
        radius: R,
        theta0: R,
        theta1: R,
        component: usize,
    },
}

impl<R: Real> Leg<R> {
    fn dim(&self) -> usize {
        match self {
            Leg::Line { from, .. } => from.len(),
            Leg::Arc { center, .. } => center.len(),
        }
    }

    /// Position at leg-local parameter s ∈ [0,1].
    fn point(&self, s: R) -> Vec<Cx<R>> {
        match self {
            Leg::Line { from, to } => from
                .iter()
                .zip(to)
                .map(|(f, t)| {
                    let d = *t - *f;
                    *f + Cx::new(d.re * s, d.im * s)
                })
                .collect(),
            Leg::Arc {
                center,
                radius,
                theta0,
                theta1,
                component,
            } => {
                let theta = *theta0 + (*theta1 - *theta0) * s;
                let mut p = center.clone();
                p[*component] = p[*component]
                    + Cx::new(*radius * theta.cos(), *radius * theta.sin());
                p
            }
        }
    }

    /// Derivative with respect to the leg-local parameter.
    fn velocity(&self, s: R) -> Vec<Cx<R>> {
        match self {
            Leg::Line { from, to } => from.iter().zip(to).map(|(f, t)| *t - *f).collect(),
            Leg::Arc {
                center,
                radius,
                theta0,
                theta1,
                component,
            } => {
                let sweep = *theta1 - *theta0;
                let theta = *theta0 + sweep * s;
                let mut v = vec![Cx::new(R::zero(), R::zero()); center.len()];
                let speed = *radius * sweep;
                v[*component] = Cx::new(-speed * theta.sin(), speed * theta.cos());
                v
            }
        }
    }

    fn start(&self) -> Vec<Cx<R>> {
        self.point(R::zero())
    }

    fn end(&self) -> Vec<Cx<R>> {
        self.point(R::one())
    }

    fn control_scale(&self) -> R {
        let mut s = R::zero();
        let scan = |s: &mut R, pts: &[Cx<R>]| {
            for p in pts {
                *s = s.max(cabs(*p));
            }
        };
        match self {
            Leg::Line { from, to } => {
                scan(&mut s, from);
                scan(&mut s, to);
            }
            Leg::Arc { center, radius, .. } => {
                scan(&mut s, center);
                s = s.max(radius.abs());
            }
        }
        s
    }
}

/// A chained path t ∈ [0,1] → moduli point, each leg covering an equal
/// parameter share.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuliPath<R: Real> {
    pub space: Space,
    legs: Vec<Leg<R>>,
    pub closed: bool,
}

fn points_close<R: Real>(x: &[Cx<R>], y: &[Cx<R>], tol: R) -> bool {
    x.iter().zip(y).all(|(a, b)| cabs(*a - *b) <= tol)
}

impl<R: Real> ModuliPath<R> {
    pub fn new(space: Space, legs: Vec<Leg<R>>, closed: bool) -> Result<Self> {
        if legs.is_empty() {
            return Err(Error::InvalidInput("path has no segments".into()));
        }
        let dim = space.dim();
        let mut scale = R::one();
        for leg in &legs {
            if leg.dim() != dim {
                return Err(Error::InvalidInput(format!(
                    "segment dimension {} does not match space dimension {dim}",
                    leg.dim()
                )));
            }
            scale = scale.max(leg.control_scale());
        }
        for w in legs.windows(2) {
            if !points_close(&w[0].end(), &w[1].start(), R::of(JOINT_TOL_REL) * scale) {
                return Err(Error::InvalidInput(
                    "path segments do not chain continuously".into(),
                ));
            }
        }
        if closed {
            let first = legs.first().unwrap().start();
            let last = legs.last().unwrap().end();
            if !points_close(&first, &last, R::of(CLOSURE_TOL_REL) * scale) {
                return Err(Error::InvalidInput(
                    "closed path does not return to its start point".into(),
                ));
            }
        }
        Ok(ModuliPath {
            space,
            legs,
            closed,
        })
    }

    pub fn legs(&self) -> &[Leg<R>] {
        &self.legs
    }

    pub fn leg_count(&self) -> usize {
        self.legs.len()
    }

    fn locate(&self, t: R) -> (usize, R) {
        let n = self.legs.len();
        let u = t * R::of(n as f64);
        let mut idx = u.floor().to_f64().unwrap_or(0.0) as usize;
        if idx >= n {
            idx = n - 1;
        }
        (idx, u - R::of(idx as f64))
    }

    /// Moduli point at global parameter t ∈ [0,1].
    pub fn point(&self, t: R) -> Vec<Cx<R>> {
        let (idx, s) = self.locate(t);
        self.legs[idx].point(s)
    }

    /// d(point)/dt at global parameter t (leg velocity times leg count).
    pub fn velocity(&self, t: R) -> Vec<Cx<R>> {
        let (idx, s) = self.locate(t);
        let n = R::of(self.legs.len() as f64);
        self.legs[idx]
            .velocity(s)
            .into_iter()
            .map(|v| Cx::new(v.re * n, v.im * n))
            .collect()
    }

    pub fn start(&self) -> Vec<Cx<R>> {
        self.legs.first().unwrap().start()
    }

    pub fn end(&self) -> Vec<Cx<R>> {
        self.legs.last().unwrap().end()
    }

    /// The same geometric path traversed backwards.
    pub fn reversed(&self) -> Self {
        let legs = self
            .legs
            .iter()
            .rev()
            .map(|leg| match leg {
                Leg::Line { from, to } => Leg::Line {
                    from: to.clone(),
                    to: from.clone(),
                },
                Leg::Arc {
                    center,
                    radius,
                    theta0,
                    theta1,
                    component,
                } => Leg::Arc {
                    center: center.clone(),
                    radius: *radius,
                    theta0: *theta1,
                    theta1: *theta0,
                    component: *component,
                },
            })
            .collect();
        ModuliPath {
            space: self.space,
            legs,
            closed: self.closed,
        }
    }

    /// Concatenation with another path starting where this one ends.
    pub fn then(&self, other: &Self) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::InvalidInput("cannot chain paths across spaces".into()));
        }
        let mut legs = self.legs.clone();
        legs.extend(other.legs.iter().cloned());
        let closed = points_close(
            &self.start(),
            &other.end(),
            R::of(CLOSURE_TOL_REL) * R::one().max(self.control_scale()),
        );
        ModuliPath::new(self.space, legs, closed)
    }

    fn control_scale(&self) -> R {
        let mut s = R::zero();
        for leg in &self.legs {
            s = s.max(leg.control_scale());
        }
        s
    }
}

/// Convenience: straight h-space segment.
pub fn h_line<R: Real>(from: (Cx<R>, Cx<R>), to: (Cx<R>, Cx<R>)) -> Leg<R> {
    Leg::Line {
        from: vec![from.0, from.1],
        to: vec![to.0, to.1],
    }
}

/// Convenience: arc of the h₁ coordinate around `center` with h₂ fixed.
pub fn h1_arc<R: Real>(center: (Cx<R>, Cx<R>), radius: R, theta0: R, theta1: R) -> Leg<R> {
    Leg::Arc {
        center: vec![center.0, center.1],
        radius,
        theta0,
        theta1,
        component: 0,
    }
}

/// Convenience: full counterclockwise circle of the h₁ coordinate,
/// `turns` times around `center`, starting at angle 0.
pub fn h1_circle<R: Real>(center: (Cx<R>, Cx<R>), radius: R, turns: i32) -> Leg<R> {
    let tau = R::of(2.0) * R::PI() * R::of(turns as f64);
    Leg::Arc {
        center: vec![center.0, center.1],
        radius,
        theta0: R::zero(),
        theta1: tau,
        component: 0,
    }
}

/// Sextic discriminant ∏_{i<j}(e_i-e_j)² expressed through h-space data:
/// the cubic discriminant times ∏_j P(a_j)² times ∏_{i<j}(a_i-a_j)², with
/// P(z) = z³+h₁z+h₂. No root extraction involved.
pub fn sextic_discriminant_h<R: Real>(h1: Cx<R>, h2: Cx<R>, a: &[Cx<R>; 3]) -> Cx<R> {
    let four = Cx::new(R::of(4.0), R::zero());
    let twenty_seven = Cx::new(R::of(27.0), R::zero());
    let disc3 = -four * h1 * h1 * h1 - twenty_seven * h2 * h2;
    let mut cross = Cx::new(R::one(), R::zero());
    for i in 0..3 {
        for j in i + 1..3 {
            let d = a[i] - a[j];
            cross = cross * d * d;
        }
    }
    let mut pa = Cx::new(R::one(), R::zero());
    for aj in a {
        let p = *aj * *aj * *aj + h1 * *aj + h2;
        pa = pa * p * p;
    }
    disc3 * cross * pa
}

fn sextic_discriminant_e<R: Real>(e: &[Cx<R>]) -> Cx<R> {
    let mut d = Cx::new(R::one(), R::zero());
    for i in 0..6 {
        for j in i + 1..6 {
            let g = e[i] - e[j];
            d = d * g * g;
        }
    }
    d
}

/// RMS branch-point scale at one moduli point; for h-space Σ|ρ_i|² is
/// estimated by 2|h₁| (exact for real zero-sum roots).
fn rms_scale<R: Real>(space: Space, coords: &[Cx<R>], a: &[Cx<R>; 3]) -> R {
    let six = R::of(6.0);
    match space {
        Space::H => {
            let mut s = R::of(2.0) * cabs(coords[0]);
            for ai in a {
                s = s + cabs(*ai) * cabs(*ai);
            }
            (s / six).sqrt()
        }
        Space::E => {
            let mut s = R::zero();
            for ei in coords {
                s = s + cabs(*ei) * cabs(*ei);
            }
            (s / six).sqrt()
        }
    }
}

fn disc_at<R: Real>(path: &ModuliPath<R>, a: &[Cx<R>; 3], t: R) -> (R, R) {
    let coords = path.point(t);
    let disc = match path.space {
        Space::H => sextic_discriminant_h(coords[0], coords[1], a),
        Space::E => sextic_discriminant_e(&coords),
    };
    let s = rms_scale(path.space, &coords, a).max(R::of(1e-300));
    (cabs(disc), R::of(SAFETY_REL) * s.powi(30))
}

/// Minimum |discriminant| along the path, sampled on a grid refined around
/// the dip. Errors with the offending parameter when the minimum falls
/// below the clearance threshold.
pub fn path_safety<R: Real>(path: &ModuliPath<R>, a: &[Cx<R>; 3]) -> Result<R> {
    let mut lo = R::zero();
    let mut hi = R::one();
    let mut best_t = R::zero();
    let mut best = R::infinity();
    let mut best_threshold = R::zero();
    let mut samples = SAFETY_SAMPLES;
    for round in 0..=REFINE_ROUNDS {
        let mut arg = 0usize;
        let mut round_best = R::infinity();
        for i in 0..samples {
            let t = lo + (hi - lo) * R::of(i as f64) / R::of((samples - 1) as f64);
            let (d, th) = disc_at(path, a, t);
            if d < round_best {
                round_best = d;
                arg = i;
            }
            if d < best {
                best = d;
                best_t = t;
                best_threshold = th;
            }
        }
        if round == REFINE_ROUNDS {
            break;
        }
        let step = (hi - lo) / R::of((samples - 1) as f64);
        let t_arg = lo + step * R::of(arg as f64);
        lo = (t_arg - step).max(R::zero());
        hi = (t_arg + step).min(R::one());
        samples = REFINE_SAMPLES;
    }
    if best < best_threshold {
        return Err(Error::PathUnsafe {
            t: best_t.to_f64().unwrap_or(f64::NAN),
            disc: best.to_f64().unwrap_or(f64::NAN),
            threshold: best_threshold.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn fixture_a() -> [Complex64; 3] {
        [c(4.0), c(5.0), c(6.0)]
    }

    #[test]
    fn constant_path_reports_curve_discriminant() {
        let leg = h_line((c(-7.0), c(6.0)), (c(-7.0), c(6.0)));
        let path = ModuliPath::new(Space::H, vec![leg], false).unwrap();
        let d = path_safety(&path, &fixture_a()).unwrap();
        let expected = sextic_discriminant_h(c(-7.0), c(6.0), &fixture_a()).norm();
        assert!((d - expected).abs() < 1e-3 * expected);
    }

    #[test]
    fn segment_into_degenerate_endpoint_rejected() {
        let leg = h_line((c(-7.0), c(6.0)), (c(-3.0), c(2.0)));
        let path = ModuliPath::new(Space::H, vec![leg], false).unwrap();
        match path_safety(&path, &fixture_a()) {
            Err(Error::PathUnsafe { t, .. }) => assert!(t > 0.9),
            other => panic!("expected unsafe path, got {other:?}"),
        }
    }

    #[test]
    fn small_circle_around_regular_point_is_safe() {
        let leg = h1_circle((c(-7.0), c(6.0)), 0.2, 1);
        let path = ModuliPath::new(Space::H, vec![leg], true).unwrap();
        assert!(path_safety(&path, &fixture_a()).unwrap() > 0.0);
    }

    #[test]
    fn straight_crossing_of_cubic_discriminant_rejected() {
        let leg = h_line((c(-7.0), c(6.0)), (c(-6.0), c(6.0)));
        let path = ModuliPath::new(Space::H, vec![leg], false).unwrap();
        assert!(matches!(
            path_safety(&path, &fixture_a()),
            Err(Error::PathUnsafe { .. })
        ));
    }

    #[test]
    fn chaining_validation() {
        let l1 = h_line((c(-7.0), c(6.0)), (c(-6.5), c(6.0)));
        let gap = h_line((c(-6.4), c(6.0)), (c(-6.0), c(6.0)));
        assert!(ModuliPath::new(Space::H, vec![l1.clone(), gap], false).is_err());
        let l2 = h_line((c(-6.5), c(6.0)), (c(-7.0), c(6.0)));
        let closed = ModuliPath::new(Space::H, vec![l1, l2], true).unwrap();
        assert_eq!(closed.leg_count(), 2);
        let p = closed.point(0.25);
        assert!((p[0] - c(-6.75)).norm() < 1e-15);
    }

    #[test]
    fn reversal_and_arcs() {
        let arc = h1_arc((c(-6.24), c(6.0)), 0.3, std::f64::consts::PI, 0.0);
        let path = ModuliPath::new(Space::H, vec![arc], false).unwrap();
        let rev = path.reversed();
        let p = path.point(0.3);
        let q = rev.point(0.7);
        assert!((p[0] - q[0]).norm() < 1e-14);
        let v = path.velocity(0.3);
        let w = rev.velocity(0.7);
        assert!((v[0] + w[0]).norm() < 1e-12);
    }
}
