//! Independent eigensolver for `H_σ = -d²/dx² + q` on the half-line.
//!
//! Eigenvalues are zeros of the Jost-normalized characteristic function
//! `F(λ)`, located by argument-principle quadrisection and refined by
//! Newton iteration. A dense finite-difference solver serves as a
//! cross-check.

pub mod contour;
pub mod fd;
pub mod ode;
pub mod shooting;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use contour::{count_in_contour, Contour, Rect};
pub use fd::{dense_fd_eigs, dense_fd_eigs_with, FdEigenvalue, FdOptions};
pub use shooting::shoot_characteristic;

use contour::{count_with, CharFn};
use crate::error::{Error, Result};
use crate::potential::{Potential, Tail};
use crate::resolvent::BoundaryCondition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Shooting,
    DenseFD,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub lambda: Complex64,
    /// `|F(λ)|` at convergence.
    pub residual: f64,
    pub method: Method,
    pub truncation_l: f64,
    /// Movement of `λ` under the last doubling of `L`.
    pub truncation_delta: f64,
    pub bc: BoundaryCondition,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Initial truncation length.
    pub l: f64,
    pub count_rtol: f64,
    pub newton_rtol: f64,
    pub residual_tol: f64,
    /// Candidates closer than this to `[0, ∞)` are discarded.
    pub margin: f64,
    /// Accepted eigenvalue movement when `L` doubles.
    pub truncation_tol: f64,
    pub max_l_doublings: usize,
    pub max_depth: usize,
    pub max_count: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            l: 40.0,
            count_rtol: 1e-6,
            newton_rtol: 1e-11,
            residual_tol: 1e-10,
            margin: 1e-3,
            truncation_tol: 1e-9,
            max_l_doublings: 3,
            max_depth: 40,
            max_count: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSearch {
    pub eigenvalues: Vec<Eigenvalue>,
    /// Set when `max_count` stopped the search early.
    pub truncated: bool,
    /// Candidates dropped by the essential-spectrum margin.
    pub discarded: Vec<Complex64>,
    pub evaluations: usize,
}

/// `|Re λ| ≤ 10 R`, `|Im λ| ≤ 10 R`.
pub fn default_search_box(r_max: f64) -> Rect {
    let x = 10.0 * r_max;
    Rect::new(-x, x, -x, x)
}

/// Splits a box into pieces that keep the given clearance from `[0, ∞)`.
/// The left piece is stretched slightly upward so its splits avoid `Im λ = 0`.
pub fn split_search_box(b: &Rect, clearance: f64) -> Vec<Rect> {
    let mut out = Vec::new();
    let height = b.im_max - b.im_min;
    let left = Rect::new(b.re_min, b.re_max.min(-clearance), b.im_min, b.im_max + 0.0123 * height);
    let re_lo = b.re_min.max(-clearance);
    let upper = Rect::new(re_lo, b.re_max, b.im_min.max(clearance), b.im_max);
    let lower = Rect::new(re_lo, b.re_max, b.im_min, b.im_max.min(-clearance));
    for r in [left, upper, lower] {
        if !r.is_empty() {
            out.push(r);
        }
    }
    out
}

/// Eigenvalues inside `search_box` with default options.
pub fn find_eigenvalues(q: &Potential, search_box: &Rect, bc: BoundaryCondition, max_count: usize) -> Result<EigenSearch> {
    let opts = SolverOptions { max_count, ..SolverOptions::default() };
    find_eigenvalues_with(q, search_box, bc, &opts)
}

struct Search<'a> {
    counter: CharFn<'a>,
    refiner: CharFn<'a>,
    opts: SolverOptions,
    roots: Vec<(Complex64, f64)>,
    truncated: bool,
}

const SPLIT_FRACTIONS: [f64; 5] = [0.5, 0.4713, 0.5291, 0.4417, 0.5573];

impl Search<'_> {
    fn count(&mut self, r: &Rect) -> Result<usize> {
        count_with(&mut self.counter, &Contour::Rect(*r))
    }

    fn newton(&mut self, r: &Rect) -> Result<Option<(Complex64, f64)>> {
        let grow = 1e-9 * r.diameter().max(1e-12);
        let inside = |z: Complex64| {
            z.re >= r.re_min - grow && z.re <= r.re_max + grow && z.im >= r.im_min - grow && z.im <= r.im_max + grow
        };
        let mut z = r.center();
        let mut fz = self.refiner.eval_fresh(z)?;
        for _ in 0..60 {
            let h = 1e-7 * (1.0 + z.norm());
            let df = (self.refiner.eval_fresh(z + h)? - self.refiner.eval_fresh(z - h)?) / (2.0 * h);
            if df.norm() == 0.0 {
                return Ok(None);
            }
            let step = fz / df;
            let z_new = z - step;
            if !inside(z_new) {
                return Ok(None);
            }
            z = z_new;
            fz = self.refiner.eval_fresh(z)?;
            if step.norm() <= 1e-14 * (1.0 + z.norm()) || fz.norm() == 0.0 {
                break;
            }
        }
        if fz.norm() <= self.opts.residual_tol {
            Ok(Some((z, fz.norm())))
        } else {
            Ok(None)
        }
    }

    fn explore(&mut self, r: Rect, n: usize, depth: usize) -> Result<()> {
        if n == 0 || self.truncated {
            return Ok(());
        }
        if n == 1 {
            if let Some(root) = self.newton(&r)? {
                self.push(root);
                return Ok(());
            }
        }
        if depth >= self.opts.max_depth {
            return Err(Error::Convergence(format!("{n} zeros not isolated in {r:?}")));
        }
        for (k, &fx) in SPLIT_FRACTIONS.iter().enumerate() {
            let fy = SPLIT_FRACTIONS[(k + 2) % SPLIT_FRACTIONS.len()];
            let children = r.split(fx, fy);
            let mut counts = [0usize; 4];
            let mut ok = true;
            for (c, child) in counts.iter_mut().zip(children.iter()) {
                match self.count(child) {
                    Ok(v) => *c = v,
                    Err(Error::ContourThroughZero { .. }) => {
                        ok = false;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if !ok {
                continue;
            }
            if counts.iter().sum::<usize>() != n {
                log::warn!("winding additivity failed in {r:?}: {counts:?} vs {n}");
                continue;
            }
            for (child, c) in children.into_iter().zip(counts) {
                self.explore(child, c, depth + 1)?;
            }
            return Ok(());
        }
        Err(Error::Convergence(format!("no admissible split of {r:?}")))
    }

    fn push(&mut self, root: (Complex64, f64)) {
        if self.roots.len() >= self.opts.max_count {
            self.truncated = true;
            return;
        }
        self.roots.push(root);
    }

    /// Counts zeros in a top-level box, nudging its edges outward when a
    /// zero sits on the contour.
    fn count_top(&mut self, r: &Rect) -> Result<(Rect, usize)> {
        let mut b = *r;
        for k in 0..6 {
            match self.count(&b) {
                Ok(n) => return Ok((b, n)),
                Err(Error::ContourThroughZero { min_abs }) => {
                    log::debug!("top box {b:?} passes near a zero ({min_abs}); attempt {k}");
                    let eps = 1.7e-3 * (k + 1) as f64 * b.diameter();
                    // only edges away from the cut may move
                    b.re_min -= eps;
                    if r.im_min >= 0.0 {
                        b.im_max += eps;
                    } else if r.im_max <= 0.0 {
                        b.im_min -= eps;
                    } else {
                        b.im_min -= eps;
                        b.im_max += eps;
                    }
                }
                Err(e) => return Err(e),
            }
        }
        Err(Error::ContourThroughZero { min_abs: 0.0 })
    }
}

/// Refines `z` at truncation length `l`.
fn polish(q: &Potential, bc: BoundaryCondition, l: f64, z: Complex64, opts: &SolverOptions) -> Result<(Complex64, f64)> {
    let mut f = CharFn::new(q, bc, l, opts.newton_rtol, 1.0);
    let mut z = z;
    let mut fz = f.eval_fresh(z)?;
    for _ in 0..30 {
        let h = 1e-7 * (1.0 + z.norm());
        let df = (f.eval_fresh(z + h)? - f.eval_fresh(z - h)?) / (2.0 * h);
        let step = fz / df;
        z -= step;
        fz = f.eval_fresh(z)?;
        if !step.is_finite() || step.norm() <= 1e-14 * (1.0 + z.norm()) {
            break;
        }
    }
    Ok((z, fz.norm()))
}

pub fn find_eigenvalues_with(
    q: &Potential,
    search_box: &Rect,
    bc: BoundaryCondition,
    opts: &SolverOptions,
) -> Result<EigenSearch> {
    if search_box.is_empty() {
        return Err(Error::Domain(format!("empty search box {search_box:?}")));
    }
    let scale = search_box.diameter();
    let mut s = Search {
        counter: CharFn::new(q, bc, opts.l, opts.count_rtol, scale),
        refiner: CharFn::new(q, bc, opts.l, opts.newton_rtol, scale),
        opts: *opts,
        roots: Vec::new(),
        truncated: false,
    };
    if !q.is_zero() {
        for b in split_search_box(search_box, opts.margin) {
            let (b, n) = s.count_top(&b)?;
            s.explore(b, n, 0)?;
        }
    }
    let evaluations = s.counter.evaluations + s.refiner.evaluations;
    let mut eigenvalues = Vec::new();
    let mut discarded = Vec::new();
    for (z, residual) in s.roots {
        let dist = if z.re >= 0.0 { z.im.abs() } else { z.norm() };
        if dist <= opts.margin {
            log::info!("discarding {z}: within {} of [0, inf)", opts.margin);
            discarded.push(z);
            continue;
        }
        let (mut lam, mut res, mut l, mut delta) = (z, residual, opts.l, 0.0);
        // F is exact once L covers a compact support
        let exact = matches!(q.tail(), Tail::Compact(w) if w <= opts.l);
        for _ in 0..if exact { 0 } else { opts.max_l_doublings } {
            let (z2, r2) = polish(q, bc, 2.0 * l, lam, opts)?;
            delta = (z2 - lam).norm();
            lam = z2;
            res = r2;
            l *= 2.0;
            if delta < opts.truncation_tol * (1.0 + lam.norm()) {
                break;
            }
        }
        eigenvalues.push(Eigenvalue { lambda: lam, residual: res, method: Method::Shooting, truncation_l: l, truncation_delta: delta, bc });
    }
    eigenvalues.sort_by(|a, b| a.lambda.norm().total_cmp(&b.lambda.norm()));
    Ok(EigenSearch { eigenvalues, truncated: s.truncated, discarded, evaluations })
}
