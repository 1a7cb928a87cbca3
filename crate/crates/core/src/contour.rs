//! Contours in the lambda plane: parameterized arcs, closed chains of arcs,
//! and the automatic construction of branch-pair ellipses and stadiums.
//!
//! All arcs are analytic in the parameter, which is what lets the closed
//! single-arc contours reach spectral accuracy under the trapezoid rule.

use crate::error::{Error, Result};
use crate::scalar::{cabs, Cx, Real};

/// Default relative clearance a contour must keep from every branch point.
pub const CLEARANCE_REL: f64 = 1e-6;
/// Samples per arc used by the clearance scan.
const CLEARANCE_SAMPLES: usize = 256;

/// One analytic arc, parameterized by t in [0,1].
#[derive(Debug, Clone, PartialEq)]
pub enum Arc<R: Real> {
    /// Full ellipse: center + u*(a cos θ + i b sin θ) with θ = 2πt + phase,
    /// closed, positively oriented; `u` is the unit direction of the major
    /// axis. A nonzero phase keeps the basepoint off the symmetry axes,
    /// where the square-root branch reference would sit on its cut for
    /// curves with real branch points.
    Ellipse {
        center: Cx<R>,
        u: Cx<R>,
        a: R,
        b: R,
        phase: R,
    },
    /// Full circle, positively oriented, closed.
    Circle { center: Cx<R>, radius: R },
    /// Straight segment.
    Segment { from: Cx<R>, to: Cx<R> },
    /// Circular arc from angle theta0 to theta1 (radians, either direction).
    CircArc {
        center: Cx<R>,
        radius: R,
        theta0: R,
        theta1: R,
    },
}

impl<R: Real> Arc<R> {
    pub fn is_closed(&self) -> bool {
        matches!(self, Arc::Ellipse { .. } | Arc::Circle { .. })
    }

    pub fn point(&self, t: R) -> Cx<R> {
        match self {
            Arc::Ellipse {
                center,
                u,
                a,
                b,
                phase,
            } => {
                let th = R::TAU() * t + *phase;
                *center + *u * Cx::new(*a * th.cos(), *b * th.sin())
            }
            Arc::Circle { center, radius } => {
                let th = R::TAU() * t;
                *center + Cx::new(*radius * th.cos(), *radius * th.sin())
            }
            Arc::Segment { from, to } => *from + (*to - *from) * Cx::new(t, R::zero()),
            Arc::CircArc {
                center,
                radius,
                theta0,
                theta1,
            } => {
                let th = *theta0 + (*theta1 - *theta0) * t;
                *center + Cx::new(*radius * th.cos(), *radius * th.sin())
            }
        }
    }

    /// d(point)/dt.
    pub fn velocity(&self, t: R) -> Cx<R> {
        match self {
            Arc::Ellipse { u, a, b, phase, .. } => {
                let th = R::TAU() * t + *phase;
                *u * Cx::new(-*a * th.sin(), *b * th.cos()) * Cx::new(R::TAU(), R::zero())
            }
            Arc::Circle { radius, .. } => {
                let th = R::TAU() * t;
                Cx::new(-*radius * th.sin(), *radius * th.cos()) * Cx::new(R::TAU(), R::zero())
            }
            Arc::Segment { from, to } => *to - *from,
            Arc::CircArc {
                radius,
                theta0,
                theta1,
                ..
            } => {
                let span = *theta1 - *theta0;
                let th = *theta0 + span * t;
                Cx::new(-*radius * th.sin(), *radius * th.cos()) * Cx::new(span, R::zero())
            }
        }
    }
}

/// A closed contour: either one closed arc or a chain of open arcs whose
/// endpoints match up and whose last endpoint returns to the first start.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour<R: Real> {
    pub arcs: Vec<Arc<R>>,
}

impl<R: Real> Contour<R> {
    pub fn closed(arcs: Vec<Arc<R>>) -> Result<Self> {
        if arcs.is_empty() {
            return Err(Error::CycleConstruction("empty contour".into()));
        }
        if arcs.len() == 1 && arcs[0].is_closed() {
            return Ok(Contour { arcs });
        }
        let mut scale = R::zero();
        for a in &arcs {
            scale = scale.max(cabs(a.point(R::zero())));
            if a.is_closed() {
                return Err(Error::CycleConstruction(
                    "closed arc inside a multi-arc chain".into(),
                ));
            }
        }
        let tol = R::of(1e-12) * scale.max(R::one());
        for w in 0..arcs.len() {
            let next = (w + 1) % arcs.len();
            let gap = cabs(arcs[next].point(R::zero()) - arcs[w].point(R::one()));
            if gap > tol {
                return Err(Error::CycleConstruction(format!(
                    "arc chain is not closed at joint {w} (gap {:.3e})",
                    gap.to_f64().unwrap_or(f64::NAN)
                )));
            }
        }
        Ok(Contour { arcs })
    }

    pub fn basepoint(&self) -> Cx<R> {
        self.arcs[0].point(R::zero())
    }

    /// Minimum sampled distance from the contour to a set of points.
    pub fn min_distance(&self, points: &[Cx<R>]) -> R {
        let mut d = R::infinity();
        for arc in &self.arcs {
            for s in 0..CLEARANCE_SAMPLES {
                let t = R::of(s as f64) / R::of(CLEARANCE_SAMPLES as f64);
                let z = arc.point(t);
                for p in points {
                    d = d.min(cabs(z - *p));
                }
            }
        }
        d
    }

    /// Error unless the contour keeps the default clearance from every
    /// point; `scale` normalizes the threshold.
    pub fn check_clearance(&self, points: &[Cx<R>], scale: R) -> Result<()> {
        let required = R::of(CLEARANCE_REL) * scale.max(R::one());
        for (idx, p) in points.iter().enumerate() {
            let mut d = R::infinity();
            for arc in &self.arcs {
                for s in 0..CLEARANCE_SAMPLES {
                    let t = R::of(s as f64) / R::of(CLEARANCE_SAMPLES as f64);
                    d = d.min(cabs(arc.point(t) - *p));
                }
            }
            if d < required {
                return Err(Error::Clearance {
                    index: idx + 1,
                    dist: d.to_f64().unwrap_or(f64::NAN),
                    required: required.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(())
    }
}

/// Ellipse functional (x/a)^2 + (y/b)^2 - 1 of a point in the rotated frame.
fn ellipse_functional<R: Real>(z: Cx<R>, center: Cx<R>, u: Cx<R>, a: R, b: R) -> R {
    let loc = (z - center) * u.conj();
    (loc.re / a).powi(2) + (loc.im / b).powi(2) - R::one()
}

/// Basepoint angle used for generated pair ellipses, in radians. Any value
/// away from multiples of π/2 works; it only has to avoid the axes.
const ELLIPSE_PHASE: f64 = 0.5;

/// Ellipse through the pair (e[i], e[j]) that enclosing exactly those two
/// branch points. The major axis lies along the pair, with semi-major
/// 0.6 times the gap; the semi-minor axis shrinks to exclude every other
/// branch point, with a 25% safety factor.
pub fn ellipse_for_pair<R: Real>(e: &[Cx<R>; 6], i: usize, j: usize) -> Result<Arc<R>> {
    if i >= 6 || j >= 6 || i == j {
        return Err(Error::InvalidInput(format!(
            "branch pair indices ({}, {}) out of range or equal",
            i + 1,
            j + 1
        )));
    }
    let d = e[j] - e[i];
    let gap = cabs(d);
    let mut scale = R::one();
    for z in e {
        scale = scale.max(cabs(*z));
    }
    if gap <= R::of(CLEARANCE_REL) * scale {
        return Err(Error::CycleConstruction(format!(
            "branch pair ({}, {}) too close to enclose",
            i + 1,
            j + 1
        )));
    }
    let center = (e[i] + e[j]) * Cx::new(R::of(0.5), R::zero());
    let u = d / Cx::new(gap, R::zero());
    let a = R::of(0.6) * gap;
    let mut b = a;
    for (m, z) in e.iter().enumerate() {
        if m == i || m == j {
            continue;
        }
        let loc = (*z - center) * u.conj();
        let (x, y) = (loc.re, loc.im);
        if x.abs() < a {
            // semi-minor of the ellipse through this point at fixed a
            let bm = y.abs() / (R::one() - (x / a).powi(2)).sqrt();
            b = b.min(bm);
        }
    }
    b = R::of(0.75) * b;
    if !(b > R::of(CLEARANCE_REL) * scale) {
        return Err(Error::CycleConstruction(format!(
            "no room for an ellipse around branch pair ({}, {})",
            i + 1,
            j + 1
        )));
    }
    let arc = Arc::Ellipse {
        center,
        u,
        a,
        b,
        phase: R::of(ELLIPSE_PHASE),
    };
    // Exclusion and enclosure verification with an explicit margin.
    for (m, z) in e.iter().enumerate() {
        let f = ellipse_functional(*z, center, u, a, b);
        if m == i || m == j {
            if f >= -R::of(0.2) {
                return Err(Error::CycleConstruction(format!(
                    "branch point {} not safely enclosed",
                    m + 1
                )));
            }
        } else if f <= R::of(1e-3) {
            return Err(Error::CycleConstruction(format!(
                "branch point {} not safely excluded by the pair ellipse",
                m + 1
            )));
        }
    }
    let contour = Contour {
        arcs: vec![arc.clone()],
    };
    contour.check_clearance(e, scale)?;
    Ok(arc)
}

/// Stadium around the segment [e[i], e[j]]: two straight sides at offset r
/// and two semicircular caps, positively oriented. Used as a homotopic
/// alternative to the pair ellipse in deformation-invariance checks.
pub fn stadium_for_pair<R: Real>(e: &[Cx<R>; 6], i: usize, j: usize) -> Result<Contour<R>> {
    if i >= 6 || j >= 6 || i == j {
        return Err(Error::InvalidInput(format!(
            "branch pair indices ({}, {}) out of range or equal",
            i + 1,
            j + 1
        )));
    }
    let d = e[j] - e[i];
    let gap = cabs(d);
    let u = d / Cx::new(gap, R::zero());
    // Distance from every other branch point to the segment bounds r.
    let mut limit = R::of(0.45) * gap;
    for (m, z) in e.iter().enumerate() {
        if m == i || m == j {
            continue;
        }
        let loc = (*z - e[i]) * u.conj();
        let dist = if loc.re < R::zero() {
            cabs(*z - e[i])
        } else if loc.re > gap {
            cabs(*z - e[j])
        } else {
            loc.im.abs()
        };
        limit = limit.min(R::of(0.6) * dist);
    }
    let mut scale = R::one();
    for z in e {
        scale = scale.max(cabs(*z));
    }
    if !(limit > R::of(CLEARANCE_REL) * scale) {
        return Err(Error::CycleConstruction(format!(
            "no room for a stadium around branch pair ({}, {})",
            i + 1,
            j + 1
        )));
    }
    let r = limit;
    let n = u * Cx::new(R::zero(), R::one());
    let rr = Cx::new(r, R::zero());
    let phi = n.im.atan2(n.re);
    let pi = R::PI();
    let arcs = vec![
        Arc::Segment {
            from: e[i] - n * rr,
            to: e[j] - n * rr,
        },
        Arc::CircArc {
            center: e[j],
            radius: r,
            theta0: phi - pi,
            theta1: phi,
        },
        Arc::Segment {
            from: e[j] + n * rr,
            to: e[i] + n * rr,
        },
        Arc::CircArc {
            center: e[i],
            radius: r,
            theta0: phi,
            theta1: phi + pi,
        },
    ];
    let contour = Contour::closed(arcs)?;
    contour.check_clearance(e, scale)?;
    Ok(contour)
}
