//! Direct contour quadrature of the periods J_i = ∮ λ^{i-1} dλ / w on the
//! curve w² = R(λ). This module is the ground truth the connection-matrix
//! formulas are tested against, so it leans on nothing but the geometry:
//! a parameterized contour, continuous tracking of the square-root branch,
//! and node doubling until the result stops moving.

use crate::contour::{ellipse_for_pair, Arc, Contour};
use crate::curve::BranchSet;
use crate::error::{Error, Result};
use crate::scalar::{cabs, cscale, csqrt, Cx, Real};

/// Hard ceiling on quadrature nodes for a single integral.
pub const MAX_NODES: usize = 1 << 20;
const FIRST_NODES: usize = 64;
/// Step-to-step amplitude jump treated as an unresolved branch (keeps the
/// phase increment safely under π/2 for comparable magnitudes).
const TRACK_JUMP_REL: f64 = 1.2;

/// A homology class represented concretely: which contour, how many times
/// around, and which square-root branch at the contour's basepoint.
///
/// `sheet = +1` starts with the principal square root of R at the
/// basepoint; `sheet = -1` with its negative. Branch-pair indices are
/// 0-based positions in the [`BranchSet`] ordering.
#[derive(Debug, Clone, PartialEq)]
pub enum Cycle<R: Real> {
    BranchPair {
        i: usize,
        j: usize,
        winding: i32,
        sheet: i8,
    },
    BigLoop {
        radius: R,
        sheet: i8,
    },
    Explicit {
        contour: Contour<R>,
        winding: i32,
        sheet: i8,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodVector<R: Real> {
    pub j: [Cx<R>; 5],
    /// Achieved mixed bound: max over components of |ΔJ_c| / (1 + |J_c|)
    /// between the last two refinement levels.
    pub err: R,
    pub nodes: usize,
}

impl<R: Real> PeriodVector<R> {
    pub fn zero() -> Self {
        PeriodVector {
            j: [Cx::new(R::zero(), R::zero()); 5],
            err: R::zero(),
            nodes: 0,
        }
    }

    pub fn norm(&self) -> R {
        let mut acc = R::zero();
        for z in &self.j {
            acc += z.norm_sqr();
        }
        acc.sqrt()
    }
}

pub fn r_eval<R: Real>(e: &[Cx<R>; 6], lambda: Cx<R>) -> Cx<R> {
    let mut acc = Cx::new(R::one(), R::zero());
    for z in e {
        acc *= lambda - *z;
    }
    acc
}

pub fn rprime_eval<R: Real>(e: &[Cx<R>; 6], lambda: Cx<R>) -> Cx<R> {
    let r = r_eval(e, lambda);
    let mut acc = Cx::new(R::zero(), R::zero());
    for z in e {
        acc += Cx::new(R::one(), R::zero()) / (lambda - *z);
    }
    r * acc
}

/// Balanced pairwise sum. The split point depends only on slice length, so
/// summing elementwise-negated terms yields the exactly negated total.
fn pairwise<R: Real>(xs: &[Cx<R>]) -> Cx<R> {
    match xs.len() {
        0 => Cx::new(R::zero(), R::zero()),
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise(&xs[..mid]) + pairwise(&xs[mid..])
        }
    }
}

/// One quadrature node in traversal order: position, velocity (already
/// orientation-signed), weight, and the storage slot that keeps summation
/// order independent of traversal direction.
struct Node<R: Real> {
    lambda: Cx<R>,
    vel: Cx<R>,
    weight: R,
    slot: usize,
}

enum LevelOutcome<R: Real, const NF: usize> {
    Done([Cx<R>; NF]),
    /// Branch tracking could not resolve the phase at this node count.
    Unresolved { jump: f64, node: usize },
}

/// Walk the schedule tracking w along it, assemble the weighted terms into
/// slot order, and pairwise-sum each field. `w_start` must square to R at
/// the first node. The closure test compares the sign continued over the
/// full circuit against the starting sign.
fn track_and_sum<R: Real, const NF: usize>(
    schedule: &[Node<R>],
    e: &[Cx<R>; 6],
    w_start: Cx<R>,
    f: &dyn Fn(Cx<R>, Cx<R>, &mut [Cx<R>; NF]),
) -> LevelOutcome<R, NF> {
    let n = schedule.len();
    let mut terms = vec![[Cx::new(R::zero(), R::zero()); NF]; n];
    let mut buf = [Cx::new(R::zero(), R::zero()); NF];
    let mut prev = w_start;
    for (step, node) in schedule.iter().enumerate() {
        let w = if step == 0 {
            w_start
        } else {
            let rt = csqrt(r_eval(e, node.lambda));
            let d = rt.re * prev.re + rt.im * prev.im;
            let s = if d >= R::zero() { rt } else { -rt };
            let jump = cabs(s - prev);
            let bound = R::of(TRACK_JUMP_REL) * cabs(s).min(cabs(prev));
            if d == R::zero() || jump > bound {
                return LevelOutcome::Unresolved {
                    jump: (jump / cabs(prev).max(R::min_positive_value()))
                        .to_f64()
                        .unwrap_or(f64::NAN),
                    node: step,
                };
            }
            s
        };
        f(node.lambda, w, &mut buf);
        for c in 0..NF {
            terms[node.slot][c] = cscale(buf[c] * node.vel, node.weight);
        }
        prev = w;
    }
    // Closure: continuing the branch back to the first node must recover
    // the starting sign, which requires an even number of enclosed branch
    // points and adequate resolution.
    let r0 = csqrt(r_eval(e, schedule[0].lambda));
    let d = r0.re * prev.re + r0.im * prev.im;
    let s_end = if d >= R::zero() { r0 } else { -r0 };
    let jump = cabs(s_end - prev);
    let bound = R::of(TRACK_JUMP_REL) * cabs(s_end).min(cabs(prev));
    if d == R::zero() || jump > bound || cabs(s_end - w_start) > R::zero() {
        return LevelOutcome::Unresolved {
            jump: (cabs(s_end - w_start) / cabs(w_start))
                .to_f64()
                .unwrap_or(f64::NAN),
            node: n,
        };
    }
    let mut out = [Cx::new(R::zero(), R::zero()); NF];
    let mut column = vec![Cx::new(R::zero(), R::zero()); n];
    for (c, slot) in out.iter_mut().enumerate() {
        for (i, t) in terms.iter().enumerate() {
            column[i] = t[c];
        }
        *slot = pairwise(&column);
    }
    LevelOutcome::Done(out)
}

/// Trapezoid schedule over one closed analytic arc. Node positions are
/// computed from the node index alone, so forward and reversed traversal
/// see bitwise-identical points.
fn trapezoid_schedule<R: Real>(arc: &Arc<R>, n: usize, reverse: bool) -> Vec<Node<R>> {
    let hn = R::one() / R::of(n as f64);
    let mut nodes = Vec::with_capacity(n);
    for step in 0..n {
        let idx = if reverse && step > 0 { n - step } else { step };
        let t = R::of(idx as f64) * hn;
        let mut vel = arc.velocity(t);
        if reverse {
            vel = -vel;
        }
        nodes.push(Node {
            lambda: arc.point(t),
            vel,
            weight: hn,
            slot: idx,
        });
    }
    nodes
}

/// 16-point Gauss-Legendre nodes and weights on (-1, 1).
fn gauss16() -> &'static ([f64; 16], [f64; 16]) {
    use std::sync::OnceLock;
    static CACHE: OnceLock<([f64; 16], [f64; 16])> = OnceLock::new();
    CACHE.get_or_init(|| {
        let n = 16usize;
        let mut xs = [0.0f64; 16];
        let mut ws = [0.0f64; 16];
        for i in 0..n {
            // Chebyshev initial guess, then Newton on P_16.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0f64, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            xs[n - 1 - i] = x;
            ws[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (xs, ws)
    })
}

/// Composite Gauss-Legendre schedule over a chain of open arcs, `panels`
/// panels of 16 points on each arc.
fn gauss_schedule<R: Real>(contour: &Contour<R>, panels: usize, reverse: bool) -> Vec<Node<R>> {
    let (xs, ws) = gauss16();
    let per_arc = panels * 16;
    let total = contour.arcs.len() * per_arc;
    let mut nodes = Vec::with_capacity(total);
    let arc_order: Vec<usize> = if reverse {
        (0..contour.arcs.len()).rev().collect()
    } else {
        (0..contour.arcs.len()).collect()
    };
    for (pos_a, &ai) in arc_order.iter().enumerate() {
        let arc = &contour.arcs[ai];
        for q in 0..per_arc {
            let qq = if reverse { per_arc - 1 - q } else { q };
            let panel = qq / 16;
            let m = qq % 16;
            let t = (R::of(panel as f64) + (R::of(xs[m]) + R::one()) * R::of(0.5))
                / R::of(panels as f64);
            let mut vel = arc.velocity(t);
            if reverse {
                vel = -vel;
            }
            nodes.push(Node {
                lambda: arc.point(t),
                vel,
                weight: R::of(ws[m]) / R::of(2.0 * panels as f64),
                slot: pos_a * per_arc + q,
            });
        }
    }
    nodes
}

/// Integrate `f(λ, w) · dλ` over the closed contour with node doubling
/// until the mixed bound err_c ≤ tol · (1 + |I_c|) holds per component.
fn integrate_tracked<R: Real, const NF: usize>(
    contour: &Contour<R>,
    e: &[Cx<R>; 6],
    sheet: i8,
    reverse: bool,
    tol: R,
    f: &dyn Fn(Cx<R>, Cx<R>, &mut [Cx<R>; NF]),
) -> Result<([Cx<R>; NF], R, usize)> {
    let single_closed = contour.arcs.len() == 1 && contour.arcs[0].is_closed();
    let mut prev_result: Option<[Cx<R>; NF]> = None;
    let mut last_unresolved = (f64::NAN, 0usize);
    let mut level = 0usize;
    loop {
        let (schedule, n_nodes) = if single_closed {
            let n = FIRST_NODES << level;
            if n > MAX_NODES {
                break;
            }
            (trapezoid_schedule(&contour.arcs[0], n, reverse), n)
        } else {
            let panels = 1usize << level;
            let n = contour.arcs.len() * panels * 16;
            if n > MAX_NODES {
                break;
            }
            (gauss_schedule(contour, panels, reverse), n)
        };
        let base = schedule[0].lambda;
        let r0 = csqrt(r_eval(e, base));
        let w_start = if sheet >= 0 { r0 } else { -r0 };
        match track_and_sum(&schedule, e, w_start, f) {
            LevelOutcome::Unresolved { jump, node } => {
                last_unresolved = (jump, node);
                prev_result = None;
            }
            LevelOutcome::Done(out) => {
                if let Some(prev) = prev_result {
                    let mut worst = R::zero();
                    let mut ok = true;
                    for c in 0..NF {
                        let err = cabs(out[c] - prev[c]);
                        let scale = R::one() + cabs(out[c]);
                        worst = worst.max(err / scale);
                        if err > tol * scale {
                            ok = false;
                        }
                    }
                    if ok {
                        return Ok((out, worst, n_nodes));
                    }
                }
                prev_result = Some(out);
            }
        }
        level += 1;
    }
    if prev_result.is_none() && !last_unresolved.0.is_nan() {
        return Err(Error::BranchTracking {
            jump: last_unresolved.0,
            node: last_unresolved.1,
            nodes: MAX_NODES,
        });
    }
    Err(Error::QuadratureNonConvergence {
        err: f64::NAN,
        tol: tol.to_f64().unwrap_or(f64::NAN),
        nodes: MAX_NODES,
    })
}

fn check_sheet(sheet: i8) -> Result<()> {
    if sheet == 1 || sheet == -1 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "sheet must be +1 or -1, got {sheet}"
        )))
    }
}

fn max_abs<R: Real>(e: &[Cx<R>; 6]) -> R {
    let mut m = R::zero();
    for z in e {
        m = m.max(cabs(*z));
    }
    m
}

/// Resolve a cycle against a branch set: build its contour, validate
/// clearance, and normalize winding bookkeeping.
fn resolve_cycle<R: Real>(
    bs: &BranchSet<Cx<R>>,
    cycle: &Cycle<R>,
) -> Result<Option<(Contour<R>, i32, i8)>> {
    match cycle {
        Cycle::BranchPair {
            i,
            j,
            winding,
            sheet,
        } => {
            check_sheet(*sheet)?;
            if *winding == 0 {
                return Ok(None);
            }
            let arc = ellipse_for_pair(&bs.e, *i, *j)?;
            Ok(Some((Contour { arcs: vec![arc] }, *winding, *sheet)))
        }
        Cycle::BigLoop { radius, sheet } => {
            check_sheet(*sheet)?;
            let need = R::of(2.0) * max_abs(&bs.e);
            if !(*radius > need) {
                return Err(Error::InvalidInput(format!(
                    "big-loop radius {:.6e} must exceed twice the largest branch point modulus {:.6e}",
                    radius.to_f64().unwrap_or(f64::NAN),
                    (need * R::of(0.5)).to_f64().unwrap_or(f64::NAN)
                )));
            }
            let arc = Arc::Circle {
                center: Cx::new(R::zero(), R::zero()),
                radius: *radius,
            };
            Ok(Some((Contour { arcs: vec![arc] }, 1, *sheet)))
        }
        Cycle::Explicit {
            contour,
            winding,
            sheet,
        } => {
            check_sheet(*sheet)?;
            if *winding == 0 {
                return Ok(None);
            }
            let scale = max_abs(&bs.e).max(R::one());
            contour.check_clearance(&bs.e, scale)?;
            Ok(Some((contour.clone(), *winding, *sheet)))
        }
    }
}

/// Integrate an arbitrary tracked integrand over a cycle. Returns the
/// per-field integrals, the achieved mixed error bound, and the node count.
pub fn integrate_cycle<R: Real, const NF: usize>(
    bs: &BranchSet<Cx<R>>,
    cycle: &Cycle<R>,
    tol: R,
    f: &dyn Fn(Cx<R>, Cx<R>, &mut [Cx<R>; NF]),
) -> Result<([Cx<R>; NF], R, usize)> {
    let Some((contour, winding, sheet)) = resolve_cycle(bs, cycle)? else {
        return Ok(([Cx::new(R::zero(), R::zero()); NF], R::zero(), 0));
    };
    let reverse = winding < 0;
    let (mut out, err, nodes) = integrate_tracked(&contour, &bs.e, sheet, reverse, tol, f)?;
    let mult = R::of(winding.unsigned_abs() as f64);
    for v in out.iter_mut() {
        *v = cscale(*v, mult);
    }
    Ok((out, err * mult, nodes))
}

/// The five periods of λ^{i-1} dλ / w over the cycle.
pub fn period_vector<R: Real>(
    bs: &BranchSet<Cx<R>>,
    cycle: &Cycle<R>,
    tol: R,
) -> Result<PeriodVector<R>> {
    let f = |lambda: Cx<R>, w: Cx<R>, out: &mut [Cx<R>; 5]| {
        let mut p = Cx::new(R::one(), R::zero()) / w;
        for o in out.iter_mut() {
            *o = p;
            p = p * lambda;
        }
    };
    let (j, err, nodes) = integrate_cycle(bs, cycle, tol, &f)?;
    Ok(PeriodVector { j, err, nodes })
}

/// Periods over the circle |λ| = radius on one sheet. For any admissible
/// radius the Laurent expansion of λ^{i-1}/w at infinity makes these exact:
/// (0, 0, ±2πi, ±πi·S₁, ±(πi/4)(3S₁² − 4S₂)) with S₁ = Σe_i and
/// S₂ = Σ_{i<j} e_i e_j.
pub fn big_loop_periods<R: Real>(
    bs: &BranchSet<Cx<R>>,
    radius: R,
    sheet: i8,
    tol: R,
) -> Result<PeriodVector<R>> {
    period_vector(bs, &Cycle::BigLoop { radius, sheet }, tol)
}

/// The limiting big-loop values for the branch set, for the `+1` sheet.
pub fn big_loop_expected<R: Real>(bs: &BranchSet<Cx<R>>) -> [Cx<R>; 5] {
    let zero = Cx::new(R::zero(), R::zero());
    let mut s1 = zero;
    let mut s2 = zero;
    for i in 0..6 {
        s1 += bs.e[i];
        for j in i + 1..6 {
            s2 += bs.e[i] * bs.e[j];
        }
    }
    let tau_i = Cx::new(R::zero(), R::TAU());
    let pi_i = Cx::new(R::zero(), R::PI());
    [
        zero,
        zero,
        tau_i,
        pi_i * s1,
        cscale(pi_i, R::of(0.25)) * (cscale(s1 * s1, R::of(3.0)) - cscale(s2, R::of(4.0))),
    ]
}

/// Integrates the exact differential d(w/(λ−e_k)) over the cycle and
/// returns the absolute value, which must vanish for any closed cycle kept
/// clear of e_k.
pub fn exactness_check<R: Real>(
    bs: &BranchSet<Cx<R>>,
    cycle: &Cycle<R>,
    k: usize,
    tol: R,
) -> Result<R> {
    if k >= 6 {
        return Err(Error::InvalidInput(format!(
            "branch index {} out of range",
            k + 1
        )));
    }
    let e = bs.e;
    let ek = e[k];
    let half = R::of(0.5);
    let f = |lambda: Cx<R>, w: Cx<R>, out: &mut [Cx<R>; 1]| {
        let d = lambda - ek;
        let rp = rprime_eval(&e, lambda);
        out[0] = cscale(rp / (w * d), half) - w / (d * d);
    };
    let (v, _, _) = integrate_cycle(bs, cycle, tol, &f)?;
    Ok(cabs(v[0]))
}

/// Tracked square-root samples along a contour: w(λ(t)) at `samples`
/// equally spaced nodes with w² = R and continuous phase, the first sample
/// matching the sheet flag.
pub fn track_sqrt<R: Real>(
    contour: &Contour<R>,
    e: &[Cx<R>; 6],
    sheet: i8,
    samples: usize,
) -> Result<Vec<Cx<R>>> {
    check_sheet(sheet)?;
    if samples < 4 {
        return Err(Error::InvalidInput("need at least 4 samples".into()));
    }
    let scale = max_abs(e).max(R::one());
    let points: Vec<Cx<R>> = e.to_vec();
    let contour_scale = scale;
    {
        let c = Contour {
            arcs: contour.arcs.clone(),
        };
        c.check_clearance(&points, contour_scale)?;
    }
    let single_closed = contour.arcs.len() == 1 && contour.arcs[0].is_closed();
    let schedule = if single_closed {
        trapezoid_schedule(&contour.arcs[0], samples, false)
    } else {
        let per = (samples / (16 * contour.arcs.len())).max(1);
        gauss_schedule(contour, per, false)
    };
    let r0 = csqrt(r_eval(e, schedule[0].lambda));
    let w_start = if sheet >= 0 { r0 } else { -r0 };
    let mut ws = Vec::with_capacity(schedule.len());
    let mut prev = w_start;
    for (step, node) in schedule.iter().enumerate() {
        let w = if step == 0 {
            w_start
        } else {
            let rt = csqrt(r_eval(e, node.lambda));
            let d = rt.re * prev.re + rt.im * prev.im;
            let s = if d >= R::zero() { rt } else { -rt };
            let jump = cabs(s - prev);
            let bound = R::of(TRACK_JUMP_REL) * cabs(s).min(cabs(prev));
            if d == R::zero() || jump > bound {
                return Err(Error::BranchTracking {
                    jump: (jump / cabs(prev)).to_f64().unwrap_or(f64::NAN),
                    node: step,
                    nodes: schedule.len(),
                });
            }
            s
        };
        ws.push(w);
        prev = w;
    }
    Ok(ws)
}

/// Continue a square-root value along the straight segment from `from`
/// (where it equals `w_from`) to `to`; returns the continued value at `to`.
/// Refines until two successive samplings agree on the final sign.
pub fn continue_sqrt<R: Real>(
    e: &[Cx<R>; 6],
    from: Cx<R>,
    w_from: Cx<R>,
    to: Cx<R>,
) -> Result<Cx<R>> {
    let scale = max_abs(e).max(R::one());
    let required = R::of(crate::contour::CLEARANCE_REL) * scale;
    let mut result: Option<Cx<R>> = None;
    let mut n = FIRST_NODES;
    while n <= MAX_NODES {
        let mut prev = w_from;
        let mut ok = true;
        for step in 1..=n {
            let t = R::of(step as f64) / R::of(n as f64);
            let lambda = from + (to - from) * Cx::new(t, R::zero());
            for p in e {
                if cabs(lambda - *p) < required {
                    return Err(Error::Clearance {
                        index: 0,
                        dist: cabs(lambda - *p).to_f64().unwrap_or(f64::NAN),
                        required: required.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
            let rt = csqrt(r_eval(e, lambda));
            let d = rt.re * prev.re + rt.im * prev.im;
            let s = if d >= R::zero() { rt } else { -rt };
            let jump = cabs(s - prev);
            let bound = R::of(TRACK_JUMP_REL) * cabs(s).min(cabs(prev));
            if d == R::zero() || jump > bound {
                ok = false;
                break;
            }
            prev = s;
        }
        if ok {
            match result {
                Some(r) if cabs(r - prev) < cabs(prev) => return Ok(prev),
                _ => result = Some(prev),
            }
        } else {
            result = None;
        }
        n *= 2;
    }
    Err(Error::BranchTracking {
        jump: f64::NAN,
        node: 0,
        nodes: MAX_NODES,
    })
}

/// Sign (+1/-1) of the branch at the basepoint of the pair-(i,j) ellipse,
/// relative to a reference value `w_anchor` of the square root at `anchor`,
/// continued along an elevated polyline that stays clear of the branch
/// points. Used to give several pair cycles a mutually consistent sheet.
pub fn sheet_relative_to_anchor<R: Real>(
    bs: &BranchSet<Cx<R>>,
    i: usize,
    j: usize,
    anchor: Cx<R>,
    w_anchor: Cx<R>,
) -> Result<i8> {
    let arc = ellipse_for_pair(&bs.e, i, j)?;
    let bp = arc.point(R::zero());
    let mut height = R::zero();
    for z in &bs.e {
        height = height.max(z.im.abs());
    }
    let h = height + R::of(2.0) * max_abs(&bs.e).max(R::one());
    let up1 = Cx::new(anchor.re, h);
    let up2 = Cx::new(bp.re, h);
    let w1 = continue_sqrt(&bs.e, anchor, w_anchor, up1)?;
    let w2 = continue_sqrt(&bs.e, up1, w1, up2)?;
    let w3 = continue_sqrt(&bs.e, up2, w2, bp)?;
    let principal = csqrt(r_eval(&bs.e, bp));
    let d = principal.re * w3.re + principal.im * w3.im;
    Ok(if d >= R::zero() { 1 } else { -1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveSpec;
    use num_complex::Complex64;

    fn fixture() -> BranchSet<Complex64> {
        let curve = CurveSpec {
            a: [4.0, 5.0, 6.0].map(|x| Complex64::new(x, 0.0)),
            h1: Complex64::new(-7.0, 0.0),
            h2: Complex64::new(6.0, 0.0),
        };
        BranchSet::from_curve(&curve).unwrap()
    }

    #[test]
    fn fixture_pair_periods_match_reference() {
        // computed with 60-digit arithmetic by two independent routes
        // (tanh-sinh on the segment and a sine substitution removing the
        // endpoint singularities); defined up to one global sheet sign
        let reference = [
            Complex64::new(0.0, 0.3469811511935332),
            Complex64::new(0.0, -0.04481734492121208),
            Complex64::new(0.0, 0.5441185242623761),
            Complex64::new(0.0, -0.9021849946225820),
            Complex64::new(0.0, 2.7003051626407993),
        ];
        let bs = fixture();
        let cycle = Cycle::BranchPair {
            i: 0,
            j: 1,
            winding: 1,
            sheet: 1,
        };
        let p = period_vector(&bs, &cycle, 1e-12).unwrap();
        let mut plus = 0.0f64;
        let mut minus = 0.0f64;
        for c in 0..5 {
            plus = plus.max((p.j[c] - reference[c]).norm());
            minus = minus.max((p.j[c] + reference[c]).norm());
        }
        assert!(
            plus.min(minus) < 1e-10,
            "periods off: +{plus:.3e} -{minus:.3e}"
        );
    }

    #[test]
    fn reversal_negates_exactly() {
        let bs = fixture();
        let fwd = period_vector(
            &bs,
            &Cycle::BranchPair {
                i: 0,
                j: 1,
                winding: 1,
                sheet: 1,
            },
            1e-10,
        )
        .unwrap();
        let rev = period_vector(
            &bs,
            &Cycle::BranchPair {
                i: 0,
                j: 1,
                winding: -1,
                sheet: 1,
            },
            1e-10,
        )
        .unwrap();
        for c in 0..5 {
            assert_eq!(fwd.j[c] + rev.j[c], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn sheet_flip_negates_exactly() {
        let bs = fixture();
        let plus = period_vector(
            &bs,
            &Cycle::BranchPair {
                i: 0,
                j: 1,
                winding: 1,
                sheet: 1,
            },
            1e-10,
        )
        .unwrap();
        let minus = period_vector(
            &bs,
            &Cycle::BranchPair {
                i: 0,
                j: 1,
                winding: 1,
                sheet: -1,
            },
            1e-10,
        )
        .unwrap();
        for c in 0..5 {
            assert_eq!(plus.j[c] + minus.j[c], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn zero_winding_is_zero() {
        let bs = fixture();
        let p = period_vector(
            &bs,
            &Cycle::BranchPair {
                i: 0,
                j: 1,
                winding: 0,
                sheet: 1,
            },
            1e-10,
        )
        .unwrap();
        assert_eq!(p.j, PeriodVector::zero().j);
    }

    #[test]
    fn big_loop_matches_residues() {
        let bs = fixture();
        let p = big_loop_periods(&bs, 20.0, 1, 1e-12).unwrap();
        let want = big_loop_expected(&bs);
        let mut plus = 0.0f64;
        let mut minus = 0.0f64;
        for c in 0..5 {
            plus = plus.max((p.j[c] - want[c]).norm());
            minus = minus.max((p.j[c] + want[c]).norm());
        }
        assert!(plus.min(minus) < 1e-9, "+{plus:.3e} -{minus:.3e}");
        // radius independence
        let q = big_loop_periods(&bs, 35.0, 1, 1e-12).unwrap();
        for c in 0..5 {
            assert!((p.j[c] - q.j[c]).norm() < 1e-9);
        }
    }

    #[test]
    fn exact_differential_integrates_to_zero() {
        let bs = fixture();
        for k in [0usize, 3, 5] {
            let r = exactness_check(
                &bs,
                &Cycle::BranchPair {
                    i: 0,
                    j: 1,
                    winding: 1,
                    sheet: 1,
                },
                k,
                1e-12,
            )
            .unwrap();
            assert!(r < 1e-10, "k={k}: {r:.3e}");
        }
    }

    #[test]
    fn track_sqrt_squares_back() {
        let bs = fixture();
        let arc = ellipse_for_pair(&bs.e, 0, 1).unwrap();
        let contour = Contour { arcs: vec![arc] };
        let ws = track_sqrt(&contour, &bs.e, 1, 512).unwrap();
        for (s, w) in ws.iter().enumerate() {
            let t = s as f64 / 512.0;
            let lam = contour.arcs[0].point(t);
            let r = r_eval(&bs.e, lam);
            assert!((w * w - r).norm() <= 1e-12 * r.norm());
        }
    }
}
