//! Argument-principle zero counting for the characteristic function.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::shooting::characteristic;
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::resolvent::BoundaryCondition;

/// Required distance between a contour and `[0, ∞)`.
pub const CUT_CLEARANCE: f64 = 1e-3;
/// Smallest `|F|` accepted on a contour.
pub const MIN_ABS_ON_CONTOUR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Rect { re_min, re_max, im_min, im_max }
    }

    pub fn is_empty(&self) -> bool {
        !(self.re_max > self.re_min && self.im_max > self.im_min)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn diameter(&self) -> f64 {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }

    /// Four children split at fractions `(fx, fy)` of the width and height.
    pub fn split(&self, fx: f64, fy: f64) -> [Rect; 4] {
        let xm = self.re_min + fx * (self.re_max - self.re_min);
        let ym = self.im_min + fy * (self.im_max - self.im_min);
        [
            Rect::new(self.re_min, xm, self.im_min, ym),
            Rect::new(xm, self.re_max, self.im_min, ym),
            Rect::new(xm, self.re_max, ym, self.im_max),
            Rect::new(self.re_min, xm, ym, self.im_max),
        ]
    }

    fn clear_of_cut(&self) -> bool {
        self.re_max <= -CUT_CLEARANCE || self.im_min >= CUT_CLEARANCE || self.im_max <= -CUT_CLEARANCE
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Contour {
    Rect(Rect),
    Circle { center: Complex64, radius: f64 },
}

impl Contour {
    fn check_clearance(&self) -> Result<()> {
        let ok = match self {
            Contour::Rect(r) => !r.is_empty() && r.clear_of_cut(),
            Contour::Circle { center, radius } => {
                let d = if center.re >= 0.0 { center.im.abs() } else { center.norm() };
                *radius > 0.0 && d >= radius + CUT_CLEARANCE
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("contour {self:?} meets the cut [0, inf) or is degenerate")))
        }
    }
}

/// `F(λ)` with a memo keyed by the quantized spectral parameter, so edges
/// shared between neighboring boxes are evaluated once.
pub struct CharFn<'a> {
    pub q: &'a Potential,
    pub bc: BoundaryCondition,
    pub l: f64,
    pub rtol: f64,
    quantum: f64,
    cache: HashMap<(i64, i64), Complex64>,
    pub evaluations: usize,
}

impl<'a> CharFn<'a> {
    /// `scale` sets the cache resolution (`1e-13 · scale`).
    pub fn new(q: &'a Potential, bc: BoundaryCondition, l: f64, rtol: f64, scale: f64) -> Self {
        CharFn { q, bc, l, rtol, quantum: 1e-13 * scale.max(1.0), cache: HashMap::new(), evaluations: 0 }
    }

    pub fn eval(&mut self, z: Complex64) -> Result<Complex64> {
        let key = ((z.re / self.quantum).round() as i64, (z.im / self.quantum).round() as i64);
        if let Some(v) = self.cache.get(&key) {
            return Ok(*v);
        }
        let v = characteristic(self.q, z, self.l, self.bc, self.rtol)?;
        self.evaluations += 1;
        self.cache.insert(key, v);
        Ok(v)
    }

    /// Uncached evaluation, for Newton steps that are never revisited.
    pub fn eval_fresh(&mut self, z: Complex64) -> Result<Complex64> {
        self.evaluations += 1;
        characteristic(self.q, z, self.l, self.bc, self.rtol)
    }
}

struct Tracker {
    total_arg: f64,
    min_abs: f64,
}

const MAX_REFINE_DEPTH: usize = 40;

/// Adds the phase change of `F` along the path piece `t ↦ z(t)` from
/// `t0` to `t1`, bisecting until consecutive samples differ in phase by
/// less than π/4 and in modulus by at most a factor 2.
fn track_piece<P: Fn(f64) -> Complex64>(
    f: &mut CharFn,
    z: &P,
    (t0, f0): (f64, Complex64),
    (t1, f1): (f64, Complex64),
    depth: usize,
    tr: &mut Tracker,
) -> Result<()> {
    let darg = (f1 / f0).arg();
    let (a0, a1) = (f0.norm(), f1.norm());
    let ratio = a0.max(a1) / a0.min(a1);
    if darg.abs() < PI / 4.0 && ratio <= 2.0 {
        tr.total_arg += darg;
        return Ok(());
    }
    if depth >= MAX_REFINE_DEPTH {
        return Err(Error::ContourThroughZero { min_abs: tr.min_abs.min(a0).min(a1) });
    }
    let tm = 0.5 * (t0 + t1);
    let fm = f.eval(z(tm))?;
    let am = fm.norm();
    tr.min_abs = tr.min_abs.min(am);
    if !(am > MIN_ABS_ON_CONTOUR) {
        return Err(Error::ContourThroughZero { min_abs: am });
    }
    track_piece(f, z, (t0, f0), (tm, fm), depth + 1, tr)?;
    track_piece(f, z, (tm, fm), (t1, f1), depth + 1, tr)
}

/// Relative sample spacing along a contour: consecutive initial samples
/// are at most `SPACING · |z|` apart, so zeros close to the origin are
/// resolved on edges passing near it.
const SPACING: f64 = 0.1;
const MIN_SAMPLES: usize = 8;

fn track_path<P: Fn(f64) -> Complex64>(f: &mut CharFn, z: P, length: f64, tr: &mut Tracker) -> Result<()> {
    let mut ts = vec![0.0];
    let mut t = 0.0;
    while t < 1.0 {
        let local = SPACING * z(t).norm().max(CUT_CLEARANCE);
        let dt = (local / length).min(1.0 / MIN_SAMPLES as f64);
        t = (t + dt).min(1.0);
        ts.push(t);
    }
    let mut prev = (0.0, f.eval(z(0.0))?);
    tr.min_abs = tr.min_abs.min(prev.1.norm());
    for &t in &ts[1..] {
        let v = f.eval(z(t))?;
        tr.min_abs = tr.min_abs.min(v.norm());
        if !(tr.min_abs > MIN_ABS_ON_CONTOUR) {
            return Err(Error::ContourThroughZero { min_abs: tr.min_abs });
        }
        // one look-ahead midpoint per initial interval
        let tm = 0.5 * (prev.0 + t);
        let fm = f.eval(z(tm))?;
        tr.min_abs = tr.min_abs.min(fm.norm());
        if !(tr.min_abs > MIN_ABS_ON_CONTOUR) {
            return Err(Error::ContourThroughZero { min_abs: tr.min_abs });
        }
        track_piece(f, &z, prev, (tm, fm), 0, tr)?;
        track_piece(f, &z, (tm, fm), (t, v), 0, tr)?;
        prev = (t, v);
    }
    Ok(())
}

/// Number of zeros of `F` enclosed by the contour.
pub fn count_with(f: &mut CharFn, contour: &Contour) -> Result<usize> {
    contour.check_clearance()?;
    let mut tr = Tracker { total_arg: 0.0, min_abs: f64::INFINITY };
    match *contour {
        Contour::Rect(r) => {
            let c = r.corners();
            for k in 0..4 {
                let (a, b) = (c[k], c[(k + 1) % 4]);
                track_path(f, |t| a + (b - a) * t, (b - a).norm(), &mut tr)?;
            }
        }
        Contour::Circle { center, radius } => {
            for k in 0..4 {
                let phi0 = k as f64 * PI / 2.0;
                track_path(f, |t| center + Complex64::from_polar(radius, phi0 + t * PI / 2.0), radius * PI / 2.0, &mut tr)?;
            }
        }
    }
    let winding = tr.total_arg / (2.0 * PI);
    let n = winding.round();
    if (winding - n).abs() > 0.05 || n < 0.0 {
        return Err(Error::Convergence(format!("non-integer winding number {winding}")));
    }
    Ok(n as usize)
}

/// Zero count of the characteristic function inside `contour`
/// (truncation `L = 40`, counting tolerance `1e-8`).
pub fn count_in_contour(q: &Potential, contour: &Contour, bc: BoundaryCondition) -> Result<usize> {
    let scale = match contour {
        Contour::Rect(r) => r.diameter(),
        Contour::Circle { radius, .. } => *radius,
    };
    let mut f = CharFn::new(q, bc, 40.0, 1e-8, scale);
    count_with(&mut f, contour)
}
