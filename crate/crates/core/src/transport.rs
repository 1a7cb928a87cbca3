//! Transport of period vectors along moduli paths by integrating the
//! linear connection systems: dJ/dt = ½(U₁ḣ₁ + U₂ḣ₂)J in h-space, or
//! dJ/dt = ½ Σ_k M_k ė_k J in e-space. A fundamental-matrix variant
//! propagates Φ(t) with Φ(0) = I and carries the trace integral alongside
//! so Liouville's determinant law det Φ = exp(∫ tr A dt) is checked on
//! every run. Monodromy around a closed loop is expressed in a basis of
//! quadrature periods at the basepoint.

use std::cmp::Ordering;

use crate::curve::{roots_from_moduli, BranchSet, CurveSpec};
use crate::error::{Error, Result};
use crate::gauss_manin::gm_matrix;
use crate::linalg::{Mat5, Vec5, DIM};
use crate::path::{path_safety, ModuliPath, Space};
use crate::periods::{continue_sqrt, period_vector, r_eval, Cycle, PeriodVector};
use crate::picard_fuchs::pf_matrices_tracked;
use crate::scalar::{cabs, cscale, csqrt, Cx, Real};

/// Hard cap on accepted plus rejected integration steps.
pub const MAX_TRANSPORT_STEPS: usize = 1_000_000;
/// Step-size floor as a fraction of the unit path parameter; reaching it
/// aborts rather than silently degrading.
pub const STEP_FLOOR: f64 = 1e-12;

/// Dormand-Prince 5(4) tableau.
const C2: f64 = 0.2;
const C3: f64 = 0.3;
const C4: f64 = 0.8;
const C5: f64 = 8.0 / 9.0;
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B5: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
/// b - b̂, the error weights (seventh entry from b̂₇ = 1/40).
const EW: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Time-dependent coefficient matrix A(t) of a linear system y' = A(t)y,
/// with optional state threading between accepted steps.
trait CoefficientSystem<R: Real> {
    fn matrix(&self, t: R) -> Result<Mat5<Cx<R>>>;
    fn accepted(&mut self, _t: R) -> Result<()> {
        Ok(())
    }
    fn legs(&self) -> usize;
    fn root_state(&self) -> Option<[Cx<R>; 3]> {
        None
    }
}

struct HSystem<'p, R: Real> {
    a: [Cx<R>; 3],
    path: &'p ModuliPath<R>,
    hint: [Cx<R>; 3],
}

impl<'p, R: Real> HSystem<'p, R> {
    fn new(a: &[Cx<R>; 3], path: &'p ModuliPath<R>) -> Result<Self> {
        let p = path.start();
        let hint = roots_from_moduli(p[0], p[1], None)?;
        Ok(HSystem {
            a: *a,
            path,
            hint,
        })
    }
}

impl<R: Real> CoefficientSystem<R> for HSystem<'_, R> {
    fn matrix(&self, t: R) -> Result<Mat5<Cx<R>>> {
        let p = self.path.point(t);
        let v = self.path.velocity(t);
        let curve = CurveSpec {
            a: self.a,
            h1: p[0],
            h2: p[1],
        };
        let sys = pf_matrices_tracked(&curve, &self.hint)?;
        let half = R::of(0.5);
        let c1 = cscale(v[0], half);
        let c2 = cscale(v[1], half);
        Ok(sys.u1.entries.scale(&c1).add(&sys.u2.entries.scale(&c2)))
    }

    fn accepted(&mut self, t: R) -> Result<()> {
        let p = self.path.point(t);
        self.hint = roots_from_moduli(p[0], p[1], Some(&self.hint))?;
        Ok(())
    }

    fn legs(&self) -> usize {
        self.path.leg_count()
    }

    fn root_state(&self) -> Option<[Cx<R>; 3]> {
        Some(self.hint)
    }
}

struct ESystem<'p, R: Real> {
    path: &'p ModuliPath<R>,
}

impl<R: Real> CoefficientSystem<R> for ESystem<'_, R> {
    fn matrix(&self, t: R) -> Result<Mat5<Cx<R>>> {
        let p = self.path.point(t);
        let v = self.path.velocity(t);
        let e: [Cx<R>; 6] = p
            .try_into()
            .map_err(|_| Error::Internal("e-space point is not 6-dimensional".into()))?;
        let bs = BranchSet::from_points(e)?;
        let half = R::of(0.5);
        let mut acc = Mat5::zero();
        for k in 0..6 {
            if v[k].re == R::zero() && v[k].im == R::zero() {
                continue;
            }
            let m = gm_matrix(&bs.e, k);
            acc = acc.add(&m.entries.scale(&cscale(v[k], half)));
        }
        Ok(acc)
    }

    fn legs(&self) -> usize {
        self.path.leg_count()
    }
}

struct OdeRun<R: Real> {
    y: Vec<Cx<R>>,
    steps: usize,
    max_local_error: R,
    err_accum: R,
    samples: Vec<(R, [Cx<R>; DIM])>,
}

fn apply<R: Real>(
    sys: &dyn CoefficientSystem<R>,
    t: R,
    y: &[Cx<R>],
    cols: usize,
    trace: bool,
    out: &mut [Cx<R>],
) -> Result<()> {
    let a = sys.matrix(t)?;
    for c in 0..cols {
        for r in 0..DIM {
            let mut acc = Cx::new(R::zero(), R::zero());
            for m in 0..DIM {
                acc = acc + a.0[r][m] * y[c * DIM + m];
            }
            out[c * DIM + r] = acc;
        }
    }
    if trace {
        out[cols * DIM] = a.trace();
    }
    Ok(())
}

fn combine<R: Real>(y: &[Cx<R>], h: R, ks: &[&[Cx<R>]], ws: &[f64]) -> Vec<Cx<R>> {
    let mut out = y.to_vec();
    for (k, w) in ks.iter().zip(ws) {
        if *w == 0.0 {
            continue;
        }
        let c = h * R::of(*w);
        for (o, ki) in out.iter_mut().zip(*k) {
            *o = *o + cscale(*ki, c);
        }
    }
    out
}

/// Smallest leg boundary strictly ahead of t.
fn next_boundary<R: Real>(t: R, legs: usize) -> R {
    let n = R::of(legs as f64);
    let eps = R::of(1e-14);
    let mut i = (t * n).floor().to_f64().unwrap_or(0.0) as usize + 1;
    loop {
        let b = R::of(i as f64) / n;
        if b >= R::one() {
            return R::one();
        }
        if b > t + eps {
            return b;
        }
        i += 1;
    }
}

fn dopri5<R: Real>(
    sys: &mut dyn CoefficientSystem<R>,
    y0: &[Cx<R>],
    cols: usize,
    trace: bool,
    tol: R,
    record: bool,
) -> Result<OdeRun<R>> {
    let dim = cols * DIM + usize::from(trace);
    debug_assert_eq!(y0.len(), dim);
    let legs = sys.legs();
    let floor = R::of(STEP_FLOOR);
    let zero = Cx::new(R::zero(), R::zero());

    let mut t = R::zero();
    let mut y = y0.to_vec();
    let mut h = R::of(0.05).min(R::of(0.25) / R::of(legs as f64));
    let mut steps = 0usize;
    let mut attempts = 0usize;
    let mut max_local = R::zero();
    let mut err_accum = R::zero();
    let mut samples = Vec::new();
    if record {
        samples.push((R::zero(), std::array::from_fn(|i| y[i])));
    }
    let mut k1: Option<Vec<Cx<R>>> = None;

    while t < R::one() - R::of(1e-15) {
        attempts += 1;
        if attempts > MAX_TRANSPORT_STEPS {
            return Err(Error::TransportNonConvergence {
                max_steps: MAX_TRANSPORT_STEPS,
            });
        }
        if k1.is_none() {
            let mut buf = vec![zero; dim];
            apply(sys, t, &y, cols, trace, &mut buf)?;
            k1 = Some(buf);
        }
        let boundary = next_boundary(t, legs);
        let clamped = h >= boundary - t;
        let h_eff = if clamped { boundary - t } else { h };
        if h_eff < floor {
            return Err(Error::StepUnderflow {
                t: t.to_f64().unwrap_or(f64::NAN),
                step: h_eff.to_f64().unwrap_or(f64::NAN),
            });
        }

        let stages = (|| -> Result<(Vec<Cx<R>>, Vec<Cx<R>>, Vec<Cx<R>>)> {
            let kk1 = k1.as_ref().unwrap().as_slice();
            let mut k2 = vec![zero; dim];
            let y2 = combine(&y, h_eff, &[kk1], &A2);
            apply(sys, t + h_eff * R::of(C2), &y2, cols, trace, &mut k2)?;
            let mut k3 = vec![zero; dim];
            let y3 = combine(&y, h_eff, &[kk1, &k2], &A3);
            apply(sys, t + h_eff * R::of(C3), &y3, cols, trace, &mut k3)?;
            let mut k4 = vec![zero; dim];
            let y4 = combine(&y, h_eff, &[kk1, &k2, &k3], &A4);
            apply(sys, t + h_eff * R::of(C4), &y4, cols, trace, &mut k4)?;
            let mut k5 = vec![zero; dim];
            let y5s = combine(&y, h_eff, &[kk1, &k2, &k3, &k4], &A5);
            apply(sys, t + h_eff * R::of(C5), &y5s, cols, trace, &mut k5)?;
            let mut k6 = vec![zero; dim];
            let y6 = combine(&y, h_eff, &[kk1, &k2, &k3, &k4, &k5], &A6);
            apply(sys, t + h_eff, &y6, cols, trace, &mut k6)?;
            let ynew = combine(&y, h_eff, &[kk1, &k2, &k3, &k4, &k5, &k6], &B5);
            let mut k7 = vec![zero; dim];
            apply(sys, t + h_eff, &ynew, cols, trace, &mut k7)?;
            let errv = combine(
                &vec![zero; dim],
                h_eff,
                &[kk1, &k2, &k3, &k4, &k5, &k6, &k7],
                &EW,
            );
            Ok((ynew, k7, errv))
        })();

        let (ynew, k7, errv) = match stages {
            Ok(v) => v,
            Err(e) => {
                // A trial stage stepped somewhere the coefficient matrix
                // could not be built; shrink and retry while possible.
                if h_eff * R::of(0.25) >= floor * R::of(1e3) {
                    h = h_eff * R::of(0.25);
                    continue;
                }
                return Err(e);
            }
        };

        let mut errn_sq = R::zero();
        for i in 0..dim {
            let sc = tol * (R::one() + cabs(y[i]).max(cabs(ynew[i])));
            let q = cabs(errv[i]) / sc;
            errn_sq = errn_sq + q * q;
        }
        let errn = (errn_sq / R::of(dim as f64)).sqrt();

        if errn <= R::one() {
            t = if clamped { boundary } else { t + h_eff };
            y = ynew;
            steps += 1;
            max_local = max_local.max(errn * tol);
            err_accum = err_accum + errn * tol;
            sys.accepted(t)?;
            k1 = Some(k7);
            if record {
                samples.push((t, std::array::from_fn(|i| y[i])));
            }
            let factor = if errn == R::zero() {
                R::of(5.0)
            } else {
                (R::of(0.9) * errn.powf(-R::of(0.2))).max(R::of(0.2)).min(R::of(5.0))
            };
            if !clamped {
                h = h_eff * factor;
            } else {
                h = (h_eff * factor).max(h);
            }
        } else {
            let factor = (R::of(0.9) * errn.powf(-R::of(0.2))).max(R::of(0.2));
            h = h_eff * factor;
        }
    }

    Ok(OdeRun {
        y,
        steps,
        max_local_error: max_local,
        err_accum,
        samples,
    })
}

fn make_system<'p, R: Real>(
    a: &[Cx<R>; 3],
    path: &'p ModuliPath<R>,
) -> Result<Box<dyn CoefficientSystem<R> + 'p>> {
    match path.space {
        Space::H => Ok(Box::new(HSystem::new(a, path)?)),
        Space::E => Ok(Box::new(ESystem { path })),
    }
}

#[derive(Debug, Clone)]
pub struct TransportResult<R: Real> {
    pub j_end: Vec5<Cx<R>>,
    pub steps: usize,
    pub max_local_error: R,
    /// Accumulated per-step error estimate (sum of accepted local errors).
    pub err_estimate: R,
    /// Final cubic-root triple for h-space paths.
    pub root_track: Option<[Cx<R>; 3]>,
    /// (t, J(t)) at every accepted step when sampling was requested.
    pub samples: Vec<(R, [Cx<R>; DIM])>,
}

/// Transport a period vector along a path. The path is safety-checked
/// first; `record` keeps per-step samples for tabular output.
pub fn propagate<R: Real>(
    a: &[Cx<R>; 3],
    path: &ModuliPath<R>,
    j0: &Vec5<Cx<R>>,
    tol: R,
    record: bool,
) -> Result<TransportResult<R>> {
    if !(tol > R::zero()) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    path_safety(path, a)?;
    let mut sys = make_system(a, path)?;
    let run = dopri5(sys.as_mut(), &j0.0, 1, false, tol, record)?;
    Ok(TransportResult {
        j_end: Vec5(std::array::from_fn(|i| run.y[i])),
        steps: run.steps,
        max_local_error: run.max_local_error,
        err_estimate: run.err_accum,
        root_track: sys.root_state(),
        samples: run.samples,
    })
}

#[derive(Debug, Clone)]
pub struct FundamentalResult<R: Real> {
    pub phi_end: Mat5<Cx<R>>,
    pub steps: usize,
    pub max_local_error: R,
    /// |det Φ - exp(∫ tr A dt)| / |exp(∫ tr A dt)|, integrals taken along
    /// the same adaptive grid.
    pub liouville_residual: R,
    pub root_track: Option<[Cx<R>; 3]>,
}

/// Transport the fundamental matrix Φ (Φ(0) = I) along a path.
pub fn fundamental_transport<R: Real>(
    a: &[Cx<R>; 3],
    path: &ModuliPath<R>,
    tol: R,
) -> Result<FundamentalResult<R>> {
    if !(tol > R::zero()) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    path_safety(path, a)?;
    fundamental_core(a, path, tol)
}

fn fundamental_core<R: Real>(
    a: &[Cx<R>; 3],
    path: &ModuliPath<R>,
    tol: R,
) -> Result<FundamentalResult<R>> {
    let zero = Cx::new(R::zero(), R::zero());
    let mut y0 = vec![zero; DIM * DIM + 1];
    for c in 0..DIM {
        y0[c * DIM + c] = Cx::new(R::one(), R::zero());
    }
    let mut sys = make_system(a, path)?;
    let run = dopri5(sys.as_mut(), &y0, DIM, true, tol, false)?;
    let mut phi = Mat5::zero();
    for c in 0..DIM {
        for r in 0..DIM {
            phi.0[r][c] = run.y[c * DIM + r];
        }
    }
    let det = phi.det();
    let expz = run.y[DIM * DIM].exp();
    let liouville = cabs(det - expz) / cabs(expz).max(R::min_positive_value());
    Ok(FundamentalResult {
        phi_end: phi,
        steps: run.steps,
        max_local_error: run.max_local_error,
        liouville_residual: liouville,
        root_track: sys.root_state(),
    })
}

#[derive(Debug, Clone)]
pub struct MonodromyResult<R: Real> {
    /// Monodromy in the basepoint period basis: continued basis columns
    /// expand as B₀·M.
    pub m: Mat5<Cx<R>>,
    /// Basis period vectors (columns), one per cycle in `basis_cycles`.
    pub basis: Mat5<Cx<R>>,
    /// Branch-point index pairs of the basis cycles, in column order.
    pub basis_cycles: [(usize, usize); 5],
    pub det_m: Cx<R>,
    pub liouville_residual: R,
    /// Residual against an independent deformation oracle; not computed.
    pub residual_vs_oracle: Option<R>,
    pub steps: usize,
    pub max_local_error: R,
}

fn basepoint_branch_set<R: Real>(
    a: &[Cx<R>; 3],
    path: &ModuliPath<R>,
) -> Result<BranchSet<Cx<R>>> {
    let p = path.start();
    match path.space {
        Space::H => BranchSet::from_curve(&CurveSpec {
            a: *a,
            h1: p[0],
            h2: p[1],
        }),
        Space::E => {
            let e: [Cx<R>; 6] = p
                .try_into()
                .map_err(|_| Error::Internal("e-space point is not 6-dimensional".into()))?;
            BranchSet::from_points(e)
        }
    }
}

fn canonical_order<R: Real>(e: &[Cx<R>; 6]) -> [usize; 6] {
    let mut idx = [0usize, 1, 2, 3, 4, 5];
    idx.sort_by(|&p, &q| {
        e[p].re
            .partial_cmp(&e[q].re)
            .unwrap_or(Ordering::Equal)
            .then(e[p].im.partial_cmp(&e[q].im).unwrap_or(Ordering::Equal))
    });
    idx
}

/// Monodromy matrix of a closed path, expressed in the deterministic basis
/// of periods over the five cycles pairing canonically consecutive branch
/// points at the basepoint.
pub fn monodromy<R: Real>(
    a: &[Cx<R>; 3],
    path: &ModuliPath<R>,
    tol: R,
) -> Result<MonodromyResult<R>> {
    if !path.closed {
        return Err(Error::InvalidInput("monodromy requires a closed path".into()));
    }
    path_safety(path, a)?;
    let bs = basepoint_branch_set(a, path)?;
    let order = canonical_order(&bs.e);
    let basis_cycles: [(usize, usize); 5] = std::array::from_fn(|m| (order[m], order[m + 1]));
    let oracle_tol = tol.min(R::of(1e-10));
    let mut basis = Mat5::zero();
    for (m, (i, j)) in basis_cycles.iter().enumerate() {
        let pv = period_vector(
            &bs,
            &Cycle::BranchPair {
                i: *i,
                j: *j,
                winding: 1,
                sheet: 1,
            },
            oracle_tol,
        )
        .map_err(|e| {
            Error::CycleConstruction(format!(
                "basis cycle over branch pair ({},{}) failed: {e}",
                i, j
            ))
        })?;
        for r in 0..DIM {
            basis.0[r][m] = pv.j[r];
        }
    }
    let fund = fundamental_core(a, path, tol)?;
    let phi_b = fund.phi_end.matmul(&basis);
    let m = basis.solve(&phi_b).ok_or_else(|| {
        Error::CycleConstruction("monodromy basis is numerically singular".into())
    })?;
    let det_m = m.det();
    if cabs(det_m) <= R::of(1e-8) {
        return Err(Error::Internal(
            "monodromy matrix is numerically singular".into(),
        ));
    }
    Ok(MonodromyResult {
        m,
        basis,
        basis_cycles,
        det_m,
        liouville_residual: fund.liouville_residual,
        residual_vs_oracle: None,
        steps: fund.steps,
        max_local_error: fund.max_local_error,
    })
}

/// Independent endpoint oracle: carries a branch-pair cycle along the path
/// by rebuilding its contour at sampled moduli points, tracking the
/// square-root sheet at the moving basepoint, and integrating the periods
/// directly at the endpoint on the matched sheet.
pub fn deformed_endpoint_period<R: Real>(
    a: &[Cx<R>; 3],
    path: &ModuliPath<R>,
    cycle: &Cycle<R>,
    tol: R,
) -> Result<PeriodVector<R>> {
    let Cycle::BranchPair {
        i,
        j,
        winding,
        sheet,
    } = *cycle
    else {
        return Err(Error::InvalidInput(
            "the deformation oracle supports branch-pair cycles only".into(),
        ));
    };
    if winding == 0 {
        return Ok(PeriodVector::zero());
    }
    path_safety(path, a)?;

    let branch_points = |t: R, hint: &mut Option<[Cx<R>; 3]>| -> Result<[Cx<R>; 6]> {
        let p = path.point(t);
        match path.space {
            Space::E => Ok(p
                .try_into()
                .map_err(|_| Error::Internal("e-space point is not 6-dimensional".into()))?),
            Space::H => {
                let rho = roots_from_moduli(p[0], p[1], hint.as_ref())?;
                *hint = Some(rho);
                Ok([rho[0], rho[1], rho[2], a[0], a[1], a[2]])
            }
        }
    };

    let mut samples = 256usize;
    let mut last_err: Option<Error> = None;
    while samples <= 4096 {
        let attempt = (|| -> Result<Option<PeriodVector<R>>> {
            let mut hint: Option<[Cx<R>; 3]> = None;
            let mut e_prev = branch_points(R::zero(), &mut hint)?;
            let arc0 = crate::contour::ellipse_for_pair(&e_prev, i, j)?;
            let mut b_prev = arc0.point(R::zero());
            let mut w = csqrt(r_eval(&e_prev, b_prev));
            if sheet < 0 {
                w = -w;
            }
            for m in 1..=samples {
                let t = R::of(m as f64) / R::of(samples as f64);
                let e_now = branch_points(t, &mut hint)?;
                // Move the curve under the old basepoint, matching the
                // nearer square root; a large jump means the sampling is
                // too coarse.
                let cand = csqrt(r_eval(&e_now, b_prev));
                let d = cand.re * w.re + cand.im * w.im;
                let s = if d >= R::zero() { cand } else { -cand };
                if cabs(s - w) > R::of(0.5) * cabs(w) {
                    return Ok(None);
                }
                // Then slide the basepoint to the new contour.
                let arc = crate::contour::ellipse_for_pair(&e_now, i, j)?;
                let b_now = arc.point(R::zero());
                w = continue_sqrt(&e_now, b_prev, s, b_now)?;
                e_prev = e_now;
                b_prev = b_now;
            }
            let principal = csqrt(r_eval(&e_prev, b_prev));
            let matched: i8 = if cabs(w - principal) <= cabs(w + principal) {
                1
            } else {
                -1
            };
            let bs = BranchSet::from_points(e_prev)?;
            let pv = period_vector(
                &bs,
                &Cycle::BranchPair {
                    i,
                    j,
                    winding,
                    sheet: matched,
                },
                tol,
            )?;
            Ok(Some(pv))
        })();
        match attempt {
            Ok(Some(pv)) => return Ok(pv),
            Ok(None) => {
                samples *= 2;
            }
            Err(e @ Error::CycleConstruction(_)) => return Err(e),
            Err(e) => {
                last_err = Some(e);
                samples *= 2;
            }
        }
    }
    Err(last_err.unwrap_or_else(|| {
        Error::BranchTracking {
            jump: f64::NAN,
            node: 0,
            nodes: 4096,
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::{h1_circle, h_line, ModuliPath, Space};
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn fixture_a() -> [Complex64; 3] {
        [c(4.0), c(5.0), c(6.0)]
    }

    fn fixture_bs() -> BranchSet<Complex64> {
        BranchSet::from_curve(&CurveSpec {
            a: fixture_a(),
            h1: c(-7.0),
            h2: c(6.0),
        })
        .unwrap()
    }

    fn pair01() -> Cycle<f64> {
        Cycle::BranchPair {
            i: 0,
            j: 1,
            winding: 1,
            sheet: 1,
        }
    }

    fn segment() -> ModuliPath<f64> {
        let leg = h_line((c(-7.0), c(6.0)), (c(-6.5), c(6.0)));
        ModuliPath::new(Space::H, vec![leg], false).unwrap()
    }

    #[test]
    fn zero_length_path_returns_input() {
        let leg = h_line((c(-7.0), c(6.0)), (c(-7.0), c(6.0)));
        let path = ModuliPath::new(Space::H, vec![leg], false).unwrap();
        let j0 = Vec5([
            Complex64::new(0.1, 0.2),
            Complex64::new(-0.3, 0.4),
            Complex64::new(0.5, -0.6),
            Complex64::new(-0.7, -0.8),
            Complex64::new(0.9, 1.0),
        ]);
        let out = propagate(&fixture_a(), &path, &j0, 1e-10, false).unwrap();
        for (a, b) in out.j_end.0.iter().zip(&j0.0) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn reversal_returns_start_vector() {
        let path = segment();
        let j0v = period_vector(&fixture_bs(), &pair01(), 1e-12).unwrap();
        let j0 = Vec5(j0v.j);
        let fwd = propagate(&fixture_a(), &path, &j0, 1e-11, false).unwrap();
        let back = propagate(&fixture_a(), &path.reversed(), &fwd.j_end, 1e-11, false).unwrap();
        let mut diff: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (a, b) in back.j_end.0.iter().zip(&j0.0) {
            diff = diff.max((a - b).norm());
            scale = scale.max(b.norm());
        }
        assert!(diff <= 1e-9 * scale, "round trip drift {diff:.3e}");
    }

    #[test]
    fn fundamental_matrix_matches_vector_transport() {
        let path = segment();
        let j0v = period_vector(&fixture_bs(), &pair01(), 1e-12).unwrap();
        let j0 = Vec5(j0v.j);
        let fwd = propagate(&fixture_a(), &path, &j0, 1e-11, false).unwrap();
        let fund = fundamental_transport(&fixture_a(), &path, 1e-11).unwrap();
        assert!(fund.liouville_residual < 1e-8);
        let applied = fund.phi_end.matvec(&j0);
        for (a, b) in applied.0.iter().zip(&fwd.j_end.0) {
            assert!((a - b).norm() <= 1e-9 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn homotopic_paths_agree() {
        let straight = segment();
        let up = Complex64::new(-6.75, 0.35);
        let l1 = h_line((c(-7.0), c(6.0)), (up, c(6.0)));
        let l2 = h_line((up, c(6.0)), (c(-6.5), c(6.0)));
        let dogleg = ModuliPath::new(Space::H, vec![l1, l2], false).unwrap();
        let j0v = period_vector(&fixture_bs(), &pair01(), 1e-12).unwrap();
        let j0 = Vec5(j0v.j);
        let a_end = propagate(&fixture_a(), &straight, &j0, 1e-11, false).unwrap();
        let b_end = propagate(&fixture_a(), &dogleg, &j0, 1e-11, false).unwrap();
        let mut diff: f64 = 0.0;
        for (x, y) in a_end.j_end.0.iter().zip(&b_end.j_end.0) {
            diff = diff.max((x - y).norm() / (1.0 + y.norm()));
        }
        assert!(diff <= 1e-8, "homotopy drift {diff:.3e}");
    }

    #[test]
    fn transport_matches_deformation_oracle() {
        let path = segment();
        let j0v = period_vector(&fixture_bs(), &pair01(), 1e-12).unwrap();
        let fwd = propagate(&fixture_a(), &path, &Vec5(j0v.j), 1e-12, false).unwrap();
        let oracle = deformed_endpoint_period(&fixture_a(), &path, &pair01(), 1e-12).unwrap();
        for (a, b) in fwd.j_end.0.iter().zip(&oracle.j) {
            assert!(
                (a - b).norm() <= 1e-7 * b.norm().max(1e-3),
                "endpoint mismatch {a} vs {b}"
            );
        }
    }

    #[test]
    fn contractible_loop_gives_identity() {
        let loop_path = ModuliPath::new(
            Space::H,
            vec![h1_circle((c(-7.0), c(6.0)), 0.2, 1)],
            true,
        )
        .unwrap();
        let res = monodromy(&fixture_a(), &loop_path, 1e-11).unwrap();
        let dev = res.m.sub(&Mat5::identity()).norm();
        assert!(dev <= 1e-8, "contractible loop deviation {dev:.3e}");
        assert!(res.residual_vs_oracle.is_none());
    }

    #[test]
    fn open_path_rejected_for_monodromy() {
        assert!(matches!(
            monodromy(&fixture_a(), &segment(), 1e-10),
            Err(Error::InvalidInput(_))
        ));
    }
}
