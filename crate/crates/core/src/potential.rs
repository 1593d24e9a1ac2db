//! Complex potentials on the half-line, their factorizations `q = a b`, and
//! Lebesgue, weighted, weak and Lorentz norms.
//!
//! Closed-form families carry enough structure (a modulus profile and a tail
//! model) for exact norms; everything else goes through adaptive quadrature
//! on `[0, support_hint]` plus an analytic tail.

use std::f64::consts::LN_10;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// Relative level below which a potential counts as negligible.
const NEGLIGIBLE: f64 = 1e-16;
const QUAD_ABS_TOL: f64 = 1e-12;
const QUAD_REL_TOL: f64 = 1e-10;

/// One term `c e^{i phi} e^{-kappa x}` of an exponential sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpTerm {
    pub c: f64,
    #[serde(default)]
    pub phi: f64,
    pub kappa: f64,
}

/// Multiplicative weight applied to a base potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Weight {
    /// `(1 + x)^tau`
    Power(f64),
    /// `e^{tau x}`
    Exp(f64),
}

impl Weight {
    fn at(self, x: f64) -> f64 {
        match self {
            Weight::Power(t) => (1.0 + x).powf(t),
            Weight::Exp(t) => (t * x).exp(),
        }
    }
}

/// Large-x behavior of `|f(x)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// Identically zero beyond the given point.
    Compact(f64),
    /// `|f| ~ e^{-rate x}`.
    Exp(f64),
    /// `|f| ~ (1+x)^{-rho}`.
    Power(f64),
    /// Not decaying.
    Unbounded,
}

/// Tail extrapolation rule for sampled data beyond the last grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TailModel {
    #[default]
    Zero,
    Exp,
    Power,
}

/// A potential known only on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPotential {
    xs: Vec<f64>,
    values: Vec<Complex64>,
    tail: TailModel,
    tail_exponent: f64,
}

impl SampledPotential {
    pub fn new(xs: Vec<f64>, values: Vec<Complex64>, tail: TailModel, tail_exponent: f64) -> Result<Self> {
        if xs.len() < 2 || xs.len() != values.len() {
            return Err(Error::Domain("sampled potential needs >= 2 points and matching lengths".into()));
        }
        if xs[0] < 0.0 || xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("sample grid must be non-negative and strictly increasing".into()));
        }
        if tail != TailModel::Zero && !(tail_exponent > 0.0) {
            return Err(Error::Domain("tail exponent must be positive".into()));
        }
        Ok(Self { xs, values, tail, tail_exponent })
    }

    /// Reads two-column (x, Re q) or three-column (x, Re q, Im q) text.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn from_text(text: &str, tail: TailModel, tail_exponent: f64) -> Result<Self> {
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<f64> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config(format!("sample line {}: {e}", lineno + 1)))?;
            match cols.as_slice() {
                [x, re] => {
                    xs.push(*x);
                    values.push(Complex64::new(*re, 0.0));
                }
                [x, re, im] => {
                    xs.push(*x);
                    values.push(Complex64::new(*re, *im));
                }
                _ => return Err(Error::Config(format!("sample line {}: expected 2 or 3 columns", lineno + 1))),
            }
        }
        Self::new(xs, values, tail, tail_exponent)
    }

    pub fn from_file(path: &Path, tail: TailModel, tail_exponent: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text, tail, tail_exponent)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    fn eval(&self, x: f64) -> Complex64 {
        let n = self.xs.len();
        let last = self.xs[n - 1];
        if x <= self.xs[0] {
            return self.values[0];
        }
        if x >= last {
            let v = self.values[n - 1];
            return match self.tail {
                TailModel::Zero => {
                    if x == last {
                        v
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }
                TailModel::Exp => v * (-self.tail_exponent * (x - last)).exp(),
                TailModel::Power => v * ((1.0 + x) / (1.0 + last)).powf(-self.tail_exponent),
            };
        }
        let i = self.xs.partition_point(|&g| g <= x) - 1;
        let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }
}

/// The family a potential belongs to.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    Zero,
    /// `c e^{i phi} e^{-kappa x}`
    Exponential { c: f64, phi: f64, kappa: f64 },
    /// `-v0 e^{i phi}` on `[0, width]`, zero beyond.
    SquareWell { v0: f64, phi: f64, width: f64 },
    /// `c e^{i phi} (1+x)^{-rho}`
    PowerDecay { c: f64, phi: f64, rho: f64 },
    /// Sum of exponential terms.
    ExpSum(Vec<ExpTerm>),
    Sampled(SampledPotential),
    /// `|q|^{1/2}` or, when `signed`, `sgn(q) |q|^{1/2}`.
    Root { base: Box<Potential>, signed: bool },
    /// `w(x) q(x)`
    Weighted { base: Box<Potential>, weight: Weight },
}

/// Closed-form description of `|f|`, used for exact norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    Zero,
    /// `amp e^{-rate x}`
    Exp { amp: f64, rate: f64 },
    /// `amp` on `[0, width]`
    Box { amp: f64, width: f64 },
    /// `amp (1+x)^{-rho}`
    Power { amp: f64, rho: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub kind: PotentialKind,
    /// Radius beyond which `|q| < 1e-16 max|q|`; may be infinite.
    pub support_hint: f64,
}

impl Potential {
    pub fn new(kind: PotentialKind) -> Self {
        let mut p = Potential { kind, support_hint: 0.0 };
        p.support_hint = p.default_support_hint();
        p
    }

    pub fn zero() -> Self {
        Self::new(PotentialKind::Zero)
    }

    pub fn exponential(c: f64, phi: f64, kappa: f64) -> Self {
        Self::new(PotentialKind::Exponential { c, phi, kappa })
    }

    pub fn square_well(v0: f64, phi: f64, width: f64) -> Self {
        Self::new(PotentialKind::SquareWell { v0, phi, width })
    }

    pub fn power_decay(c: f64, phi: f64, rho: f64) -> Self {
        Self::new(PotentialKind::PowerDecay { c, phi, rho })
    }

    pub fn exp_sum(terms: Vec<ExpTerm>) -> Self {
        Self::new(PotentialKind::ExpSum(terms))
    }

    pub fn sampled(s: SampledPotential) -> Self {
        Self::new(PotentialKind::Sampled(s))
    }

    pub fn root(base: Potential, signed: bool) -> Self {
        Self::new(PotentialKind::Root { base: Box::new(base), signed })
    }

    pub fn weighted(base: Potential, weight: Weight) -> Self {
        Self::new(PotentialKind::Weighted { base: Box::new(base), weight })
    }

    pub fn with_support_hint(mut self, hint: f64) -> Self {
        self.support_hint = hint;
        self
    }

    /// `q(x)`; errors for `x < 0`.
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("potential evaluated at x = {x}")));
        }
        Ok(self.value(x))
    }

    /// Unchecked evaluation for `x >= 0`.
    pub fn value(&self, x: f64) -> Complex64 {
        match &self.kind {
            PotentialKind::Zero => Complex64::new(0.0, 0.0),
            PotentialKind::Exponential { c, phi, kappa } => Complex64::from_polar(*c, *phi) * (-kappa * x).exp(),
            PotentialKind::SquareWell { v0, phi, width } => {
                if x <= *width {
                    -Complex64::from_polar(*v0, *phi)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            PotentialKind::PowerDecay { c, phi, rho } => Complex64::from_polar(*c, *phi) * (1.0 + x).powf(-rho),
            PotentialKind::ExpSum(terms) => terms
                .iter()
                .map(|t| Complex64::from_polar(t.c, t.phi) * (-t.kappa * x).exp())
                .sum(),
            PotentialKind::Sampled(s) => s.eval(x),
            PotentialKind::Root { base, signed } => {
                let q = base.value(x);
                let m = q.norm();
                if m == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else if *signed {
                    q / m.sqrt()
                } else {
                    Complex64::new(m.sqrt(), 0.0)
                }
            }
            PotentialKind::Weighted { base, weight } => base.value(x) * weight.at(x),
        }
    }

    /// Points where the potential (or its derivative) jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            PotentialKind::SquareWell { width, .. } => vec![*width],
            PotentialKind::Sampled(s) if s.xs.len() <= 2000 => s.xs.clone(),
            PotentialKind::Sampled(s) => vec![s.xs[0], s.xs[s.xs.len() - 1]],
            PotentialKind::Root { base, .. } | PotentialKind::Weighted { base, .. } => base.breakpoints(),
            _ => Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.profile(), Some(Profile::Zero))
    }

    /// Closed-form modulus, when the family admits one.
    pub fn profile(&self) -> Option<Profile> {
        let p = match &self.kind {
            PotentialKind::Zero => Profile::Zero,
            PotentialKind::Exponential { c, kappa, .. } => Profile::Exp { amp: c.abs(), rate: *kappa },
            PotentialKind::SquareWell { v0, width, .. } => Profile::Box { amp: v0.abs(), width: *width },
            PotentialKind::PowerDecay { c, rho, .. } => Profile::Power { amp: c.abs(), rho: *rho },
            PotentialKind::ExpSum(terms) => {
                let k0 = terms.first()?.kappa;
                if terms.iter().any(|t| t.kappa != k0) {
                    return None;
                }
                let amp: Complex64 = terms.iter().map(|t| Complex64::from_polar(t.c, t.phi)).sum();
                Profile::Exp { amp: amp.norm(), rate: k0 }
            }
            PotentialKind::Sampled(_) => return None,
            PotentialKind::Root { base, .. } => match base.profile()? {
                Profile::Zero => Profile::Zero,
                Profile::Exp { amp, rate } => Profile::Exp { amp: amp.sqrt(), rate: rate / 2.0 },
                Profile::Box { amp, width } => Profile::Box { amp: amp.sqrt(), width },
                Profile::Power { amp, rho } => Profile::Power { amp: amp.sqrt(), rho: rho / 2.0 },
            },
            PotentialKind::Weighted { base, weight } => match (base.profile()?, *weight) {
                (Profile::Zero, _) => Profile::Zero,
                (Profile::Exp { amp, rate }, Weight::Exp(t)) => Profile::Exp { amp, rate: rate - t },
                (Profile::Power { amp, rho }, Weight::Power(t)) => Profile::Power { amp, rho: rho - t },
                _ => return None,
            },
        };
        Some(match p {
            Profile::Exp { amp, .. } | Profile::Box { amp, .. } | Profile::Power { amp, .. } if amp == 0.0 => {
                Profile::Zero
            }
            Profile::Box { width, .. } if width <= 0.0 => Profile::Zero,
            other => other,
        })
    }

    /// Asymptotic decay of `|f|`.
    pub fn tail(&self) -> Tail {
        match &self.kind {
            PotentialKind::Zero => Tail::Compact(0.0),
            PotentialKind::Exponential { kappa, .. } => rate_tail(*kappa),
            PotentialKind::SquareWell { width, .. } => Tail::Compact(width.max(0.0)),
            PotentialKind::PowerDecay { rho, .. } => power_tail(*rho),
            PotentialKind::ExpSum(terms) => {
                rate_tail(terms.iter().map(|t| t.kappa).fold(f64::INFINITY, f64::min))
            }
            PotentialKind::Sampled(s) => match s.tail {
                TailModel::Zero => Tail::Compact(s.xs[s.xs.len() - 1]),
                TailModel::Exp => Tail::Exp(s.tail_exponent),
                TailModel::Power => Tail::Power(s.tail_exponent),
            },
            PotentialKind::Root { base, .. } => match base.tail() {
                Tail::Exp(r) => Tail::Exp(r / 2.0),
                Tail::Power(r) => Tail::Power(r / 2.0),
                t => t,
            },
            PotentialKind::Weighted { base, weight } => match (base.tail(), *weight) {
                (Tail::Compact(w), _) => Tail::Compact(w),
                (Tail::Exp(r), Weight::Exp(t)) => rate_tail(r - t),
                (Tail::Exp(r), Weight::Power(_)) => Tail::Exp(r),
                (Tail::Power(r), Weight::Power(t)) => power_tail(r - t),
                (Tail::Power(_), Weight::Exp(t)) if t > 0.0 => Tail::Unbounded,
                (Tail::Power(r), Weight::Exp(_)) => Tail::Power(r),
                (Tail::Unbounded, _) => Tail::Unbounded,
            },
        }
    }

    fn default_support_hint(&self) -> f64 {
        let bp = self.breakpoints().into_iter().fold(0.0, f64::max);
        let t = match self.tail() {
            Tail::Compact(w) => w,
            Tail::Exp(rate) => -NEGLIGIBLE.ln() / rate,
            Tail::Power(rho) => (16.0 * LN_10 / rho).exp().min(1e8),
            Tail::Unbounded => f64::INFINITY,
        };
        bp.max(t)
    }

    /// Supremum of `|f|`, exact for closed forms and a grid maximum otherwise.
    pub fn max_abs(&self) -> f64 {
        match self.profile() {
            Some(Profile::Zero) => 0.0,
            Some(Profile::Exp { amp, rate }) if rate >= 0.0 => amp,
            Some(Profile::Box { amp, .. }) => amp,
            Some(Profile::Power { amp, rho }) if rho >= 0.0 => amp,
            Some(_) => f64::INFINITY,
            None => ModulusTable::new(self).max,
        }
    }
}

fn rate_tail(rate: f64) -> Tail {
    if rate > 0.0 {
        Tail::Exp(rate)
    } else {
        Tail::Unbounded
    }
}

fn power_tail(rho: f64) -> Tail {
    if rho > 0.0 {
        Tail::Power(rho)
    } else {
        Tail::Unbounded
    }
}

// ---------------------------------------------------------------------------
// Norms

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NormKind {
    Lebesgue(f64),
    Weighted { tau: f64, r: f64 },
    Weak(f64),
    Lorentz { p: f64, r: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    pub kind: NormKind,
    pub quadrature_error_estimate: f64,
}

fn check_exponent(r: f64, allow_inf: bool) -> Result<()> {
    if r > 0.0 && (allow_inf || r.is_finite()) {
        Ok(())
    } else {
        Err(Error::Exponent(format!("exponent {r} outside the admissible range")))
    }
}

/// `∫ |f|^r` with its error estimate, closed form when available.
pub fn power_integral(f: &Potential, r: f64) -> Result<(f64, f64)> {
    check_exponent(r, false)?;
    match f.profile() {
        Some(Profile::Zero) => Ok((0.0, 0.0)),
        Some(Profile::Exp { amp, rate }) => {
            if rate <= 0.0 {
                Err(Error::NormDiverges(format!("exponential with rate {rate}")))
            } else {
                Ok((amp.powf(r) / (rate * r), 0.0))
            }
        }
        Some(Profile::Box { amp, width }) => Ok((amp.powf(r) * width, 0.0)),
        Some(Profile::Power { amp, rho }) => {
            if rho * r <= 1.0 {
                Err(Error::NormDiverges(format!("power decay rho = {rho} with r = {r}")))
            } else {
                Ok((amp.powf(r) / (rho * r - 1.0), 0.0))
            }
        }
        None => power_integral_quadrature(f, r),
    }
}

/// `∫ |f|^r` by adaptive quadrature on `[0, support_hint]` plus the analytic
/// tail integral implied by [`Potential::tail`].
pub fn power_integral_quadrature(f: &Potential, r: f64) -> Result<(f64, f64)> {
    check_exponent(r, false)?;
    let tail = f.tail();
    match tail {
        Tail::Unbounded => return Err(Error::NormDiverges("potential does not decay".into())),
        Tail::Power(rho) if rho * r <= 1.0 => {
            return Err(Error::NormDiverges(format!("power tail rho = {rho} with r = {r}")))
        }
        _ => {}
    }
    let x_max = f.support_hint;
    if !x_max.is_finite() {
        return Err(Error::NormDiverges("infinite support hint".into()));
    }
    if x_max <= 0.0 {
        return Ok((0.0, 0.0));
    }
    let parts = quad::graded_partition(x_max, &f.breakpoints());
    let res = quad::integrate_partition(|x| f.value(x).norm().powf(r), &parts, QUAD_ABS_TOL, QUAD_REL_TOL);
    let edge = f.value(x_max).norm().powf(r);
    let tail_value = match tail {
        Tail::Compact(_) | Tail::Unbounded => 0.0,
        Tail::Exp(rate) => edge / (rate * r),
        Tail::Power(rho) => edge * (1.0 + x_max) / (rho * r - 1.0),
    };
    Ok((res.value + tail_value, res.error))
}

fn integral_to_norm(integral: (f64, f64), r: f64, kind: NormKind) -> NormValue {
    let (i, e) = integral;
    let value = i.max(0.0).powf(1.0 / r);
    let err = if i > 0.0 { value * e / (r * i) } else { e.powf(1.0 / r) };
    NormValue { value, kind, quadrature_error_estimate: err }
}

/// `‖f‖_r` for `r ∈ (0, ∞]`.
pub fn lebesgue_norm(f: &Potential, r: f64) -> Result<NormValue> {
    check_exponent(r, true)?;
    if r.is_infinite() {
        let m = f.max_abs();
        if !m.is_finite() {
            return Err(Error::NormDiverges("unbounded potential".into()));
        }
        return Ok(NormValue { value: m, kind: NormKind::Lebesgue(r), quadrature_error_estimate: 0.0 });
    }
    Ok(integral_to_norm(power_integral(f, r)?, r, NormKind::Lebesgue(r)))
}

/// Quadrature-only variant of [`lebesgue_norm`] (finite r).
pub fn lebesgue_norm_quadrature(f: &Potential, r: f64) -> Result<NormValue> {
    Ok(integral_to_norm(power_integral_quadrature(f, r)?, r, NormKind::Lebesgue(r)))
}

/// `‖w f‖_r` for the power weight `(1+x)^tau`.
pub fn weighted_norm(f: &Potential, tau: f64, r: f64) -> Result<NormValue> {
    let wf = Potential::weighted(f.clone(), Weight::Power(tau));
    let mut n = lebesgue_norm(&wf, r)?;
    n.kind = NormKind::Weighted { tau, r };
    Ok(n)
}

// ---------------------------------------------------------------------------
// Distribution function

/// `|f|` sampled on a graded grid, with the tail model for extrapolation.
struct ModulusTable {
    xs: Vec<f64>,
    mods: Vec<f64>,
    tail: Tail,
    max: f64,
    /// Source for locating level crossings inside a cell; `None` when the
    /// data is piecewise linear already.
    source: Option<Potential>,
}

impl ModulusTable {
    fn new(f: &Potential) -> Self {
        let tail = f.tail();
        let x_max = match tail {
            Tail::Compact(w) => w.max(f.breakpoints().into_iter().fold(0.0, f64::max)),
            _ => f.support_hint.min(1e8),
        };
        let mut xs: Vec<f64> = match &f.kind {
            PotentialKind::Sampled(s) => {
                let mut v = s.xs.clone();
                if v[0] > 0.0 {
                    v.insert(0, 0.0);
                }
                v
            }
            _ => {
                let uniform_end = x_max.min(40.0);
                let n_uniform = 8000;
                let mut v: Vec<f64> = (0..=n_uniform).map(|i| uniform_end * i as f64 / n_uniform as f64).collect();
                if x_max > uniform_end {
                    let n_geo = 4000;
                    let ratio = (x_max / uniform_end).ln() / n_geo as f64;
                    v.extend((1..=n_geo).map(|i| uniform_end * (ratio * i as f64).exp()));
                }
                for b in f.breakpoints() {
                    let eps = 1e-12 * (1.0 + b);
                    v.push(b - eps);
                    v.push(b);
                    v.push(b + eps);
                }
                v.retain(|&x| x >= 0.0 && x <= x_max);
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            }
        };
        if xs.len() < 2 {
            xs = vec![0.0, x_max.max(1e-300)];
        }
        let mods: Vec<f64> = xs.iter().map(|&x| f.value(x).norm()).collect();
        let max = mods.iter().copied().fold(0.0, f64::max);
        let source = match f.kind {
            PotentialKind::Sampled(_) => None,
            _ => Some(f.clone()),
        };
        ModulusTable { xs, mods, tail, max, source }
    }

    /// Length of the part of cell `i` where `|f| > t`, for a cell whose
    /// endpoints straddle the level.
    fn above_in_cell(&self, i: usize, t: f64) -> f64 {
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (a, b) = (self.mods[i], self.mods[i + 1]);
        let Some(f) = &self.source else {
            return (x1 - x0) * (a.max(b) - t) / (a - b).abs();
        };
        // bisect on the crossing, keeping `lo` on the side of x0
        let (mut lo, mut hi) = (x0, x1);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (f.value(mid).norm() > t) == (a > t) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = 0.5 * (lo + hi);
        if a > t { x - x0 } else { x1 - x }
    }

    fn measure_above(&self, t: f64) -> f64 {
        let mut m = 0.0;
        for i in 0..self.xs.len() - 1 {
            let (a, b) = (self.mods[i], self.mods[i + 1]);
            let h = self.xs[i + 1] - self.xs[i];
            if a > t && b > t {
                m += h;
            } else if a > t || b > t {
                m += self.above_in_cell(i, t);
            }
        }
        let last_x = self.xs[self.xs.len() - 1];
        let last = self.mods[self.mods.len() - 1];
        if last > t {
            m += match self.tail {
                Tail::Compact(_) => 0.0,
                Tail::Exp(k) => (last / t).ln() / k,
                Tail::Power(rho) => (1.0 + last_x) * ((last / t).powf(1.0 / rho) - 1.0),
                Tail::Unbounded => f64::INFINITY,
            };
        } else if matches!(self.tail, Tail::Unbounded) {
            return f64::INFINITY;
        }
        m
    }
}

fn profile_distribution(p: Profile, t: f64) -> f64 {
    match p {
        Profile::Zero => 0.0,
        Profile::Exp { amp, rate } => {
            if rate <= 0.0 {
                if t < amp { f64::INFINITY } else { 0.0 }
            } else if t < amp {
                (amp / t).ln() / rate
            } else {
                0.0
            }
        }
        Profile::Box { amp, width } => {
            if t < amp {
                width
            } else {
                0.0
            }
        }
        Profile::Power { amp, rho } => {
            if rho <= 0.0 {
                if t < amp { f64::INFINITY } else { 0.0 }
            } else if t < amp {
                (amp / t).powf(1.0 / rho) - 1.0
            } else {
                0.0
            }
        }
    }
}

/// `λ_f(t) = |{x ≥ 0 : |f(x)| > t}|`; may be `+∞`.
pub fn distribution_function(f: &Potential, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("distribution function at t = {t}")));
    }
    Ok(match f.profile() {
        Some(p) => profile_distribution(p, t),
        None => ModulusTable::new(f).measure_above(t),
    })
}

/// Grid-measure variant of [`distribution_function`], ignoring closed forms.
pub fn distribution_function_grid(f: &Potential, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("distribution function at t = {t}")));
    }
    Ok(ModulusTable::new(f).measure_above(t))
}

/// Distribution function prepared once for repeated evaluation.
enum Distribution {
    Closed(Profile),
    Table(ModulusTable),
}

impl Distribution {
    fn new(f: &Potential) -> Self {
        match f.profile() {
            Some(p) => Distribution::Closed(p),
            None => Distribution::Table(ModulusTable::new(f)),
        }
    }

    fn at(&self, t: f64) -> f64 {
        match self {
            Distribution::Closed(p) => profile_distribution(*p, t),
            Distribution::Table(tab) => tab.measure_above(t),
        }
    }

    fn max(&self) -> f64 {
        match self {
            Distribution::Closed(Profile::Zero) => 0.0,
            Distribution::Closed(Profile::Exp { amp, .. })
            | Distribution::Closed(Profile::Box { amp, .. })
            | Distribution::Closed(Profile::Power { amp, .. }) => *amp,
            Distribution::Table(t) => t.max,
        }
    }
}

/// `sup_t t^r λ_f(t)`, the r-th power of the weak norm.
pub fn weak_norm_power(f: &Potential, r: f64) -> Result<f64> {
    check_exponent(r, false)?;
    let dist = Distribution::new(f);
    let m = dist.max();
    if m == 0.0 {
        return Ok(0.0);
    }
    if !m.is_finite() {
        return Err(Error::NormDiverges("unbounded potential".into()));
    }
    // ln φ(t) with φ(t) = t^r λ(t), parametrized by s = ln t.
    let log_phi = |s: f64| {
        let lam = dist.at(s.exp());
        if lam > 0.0 { r * s + lam.ln() } else { f64::NEG_INFINITY }
    };
    let ln_m = m.ln();
    let lo = ln_m + (1e-8f64).ln();
    let deep = ln_m - 690.0;
    let mut grid: Vec<f64> = (0..200).map(|i| deep + (lo - deep) * i as f64 / 200.0).collect();
    grid.extend((0..400).map(|i| lo + (ln_m - lo) * i as f64 / 399.0));
    grid.push(ln_m + (-1e-13f64).ln_1p());
    grid.sort_by(f64::total_cmp);
    let vals: Vec<f64> = grid.iter().map(|&s| log_phi(s)).collect();
    if vals.iter().any(|v| v.is_infinite() && *v > 0.0) {
        return Err(Error::NormDiverges("unbounded superlevel set".into()));
    }
    let (best, best_val) = vals
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    if best_val == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if best == 0 && vals[0] > vals[200] + 2f64.ln() {
        return Err(Error::NormDiverges("t^r λ(t) grows as t -> 0".into()));
    }
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(grid.len() - 1)];
    let (_, refined) = golden_max(&log_phi, a, b, 1e-13);
    Ok(best_val.max(refined).exp())
}

/// `‖f‖_{r,w} = sup_t (t^r λ_f(t))^{1/r}`.
pub fn weak_norm(f: &Potential, r: f64) -> Result<NormValue> {
    let v = weak_norm_power(f, r)?;
    Ok(NormValue { value: v.powf(1.0 / r), kind: NormKind::Weak(r), quadrature_error_estimate: 0.0 })
}

/// Lorentz norm `‖f‖_{p,r} = (r ∫_0^∞ t^{r-1} λ_f(t)^{r/p} dt)^{1/r}`, which
/// reduces to `‖f‖_r` at `p = r`. `p = ∞` means `L_∞`.
pub fn lorentz_norm(f: &Potential, p: f64, r: f64) -> Result<NormValue> {
    check_exponent(p, true)?;
    check_exponent(r, false)?;
    if p.is_infinite() {
        let mut n = lebesgue_norm(f, f64::INFINITY)?;
        n.kind = NormKind::Lorentz { p, r };
        return Ok(n);
    }
    let dist = Distribution::new(f);
    let m = dist.max();
    let kind = NormKind::Lorentz { p, r };
    if m == 0.0 {
        return Ok(NormValue { value: 0.0, kind, quadrature_error_estimate: 0.0 });
    }
    if !m.is_finite() {
        return Err(Error::NormDiverges("unbounded potential".into()));
    }
    // t = m e^{-u}
    let integrand = |u: f64| {
        let lam = dist.at(m * (-u).exp());
        if lam.is_infinite() {
            return f64::INFINITY;
        }
        (r * (m.ln() - u) + (r / p) * lam.max(f64::MIN_POSITIVE).ln()).exp() * if lam > 0.0 { 1.0 } else { 0.0 }
    };
    let mut total = 0.0;
    let mut err = 0.0;
    let (mut a, mut b) = (0.0, 1.0);
    loop {
        let res = quad::integrate(integrand, a, b, 1e-300, 1e-12);
        if !res.value.is_finite() {
            return Err(Error::NormDiverges("Lorentz integrand unbounded".into()));
        }
        total += res.value;
        err += res.error;
        if b >= 8.0 && res.value <= 1e-16 * total {
            break;
        }
        if b > 1400.0 {
            return Err(Error::NormDiverges("Lorentz integral does not converge".into()));
        }
        a = b;
        b *= 2.0;
    }
    Ok(integral_to_norm((r * total, r * err), r, kind))
}

/// Maximizes `f` on [a, b] by golden-section search; returns (argmax, max).
pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iters = 0;
    while (b - a).abs() > tol * (1.0 + a.abs().max(b.abs())) && iters < 200 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
        iters += 1;
    }
    if fc >= fd { (c, fc) } else { (d, fd) }
}

// ---------------------------------------------------------------------------
// Factorizations

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", content = "tau", rename_all = "snake_case")]
pub enum Scheme {
    /// `a = |q|^{1/2}`, `b = sgn(q)|q|^{1/2}`
    SqrtSplit,
    /// `a = (1+x)^{-tau}`, `b = (1+x)^{tau} q`
    PowerWeight(f64),
    /// `a = e^{-tau x}`, `b = e^{tau x} q`
    ExpWeight(f64),
}

/// A pair `(a, b)` with `a b = q` pointwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub a: Potential,
    pub b: Potential,
    pub scheme: Scheme,
}

impl Factorization {
    /// `(‖a‖_r, ‖b‖_s)`.
    pub fn norms(&self, r: f64, s: f64) -> Result<(NormValue, NormValue)> {
        Ok((lebesgue_norm(&self.a, r)?, lebesgue_norm(&self.b, s)?))
    }

    /// `(‖a‖_{r,w}, ‖b‖_{s,w})`.
    pub fn weak_norms(&self, r: f64, s: f64) -> Result<(NormValue, NormValue)> {
        Ok((weak_norm(&self.a, r)?, weak_norm(&self.b, s)?))
    }
}

pub fn factorize(q: &Potential, scheme: Scheme) -> Factorization {
    let (a, b) = match scheme {
        Scheme::SqrtSplit => (Potential::root(q.clone(), false), Potential::root(q.clone(), true)),
        Scheme::PowerWeight(tau) => (
            Potential::power_decay(1.0, 0.0, tau),
            Potential::weighted(q.clone(), Weight::Power(tau)),
        ),
        Scheme::ExpWeight(tau) => (
            Potential::exponential(1.0, 0.0, tau),
            Potential::weighted(q.clone(), Weight::Exp(tau)),
        ),
    };
    Factorization { a, b, scheme }
}

// ---------------------------------------------------------------------------
// Configuration documents

/// Serialized description of a potential (`[potential]` table).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    Zero,
    Exponential {
        c: f64,
        #[serde(default)]
        phi: f64,
        #[serde(default = "one")]
        kappa: f64,
    },
    SquareWell {
        v0: f64,
        #[serde(default)]
        phi: f64,
        width: f64,
    },
    PowerDecay {
        c: f64,
        #[serde(default)]
        phi: f64,
        rho: f64,
    },
    ExpSum {
        terms: Vec<ExpTerm>,
    },
    Sampled {
        path: String,
        #[serde(default)]
        tail: TailModel,
        #[serde(default)]
        tail_exponent: f64,
    },
}

fn one() -> f64 {
    1.0
}

/// A [`PotentialSpec`] plus an optional support-hint override.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialConfig {
    #[serde(flatten)]
    pub spec: PotentialSpec,
    #[serde(default)]
    pub support_hint: Option<f64>,
}

impl PotentialConfig {
    /// Builds the potential; relative sample paths resolve against `base_dir`.
    pub fn build(&self, base_dir: &Path) -> Result<Potential> {
        let p = match &self.spec {
            PotentialSpec::Zero => Potential::zero(),
            PotentialSpec::Exponential { c, phi, kappa } => Potential::exponential(*c, *phi, *kappa),
            PotentialSpec::SquareWell { v0, phi, width } => Potential::square_well(*v0, *phi, *width),
            PotentialSpec::PowerDecay { c, phi, rho } => Potential::power_decay(*c, *phi, *rho),
            PotentialSpec::ExpSum { terms } => Potential::exp_sum(terms.clone()),
            PotentialSpec::Sampled { path, tail, tail_exponent } => {
                let p = Path::new(path);
                let full = if p.is_absolute() { p.to_path_buf() } else { base_dir.join(p) };
                Potential::sampled(SampledPotential::from_file(&full, *tail, *tail_exponent)?)
            }
        };
        Ok(match self.support_hint {
            Some(h) => p.with_support_hint(h),
            None => p,
        })
    }
}

/// Named potentials used by invariant sweeps and tests.
pub fn catalog() -> Vec<(&'static str, Potential)> {
    use std::f64::consts::PI;
    vec![
        ("exp_real", Potential::exponential(-1.0, 0.0, 1.0)),
        ("exp_complex", Potential::exponential(-3.0, PI / 6.0, 1.0)),
        ("exp_steep", Potential::exponential(2.0, PI / 4.0, 2.0)),
        ("exp_complex_b", Potential::exponential(-5.0, PI / 4.0, 1.0)),
        ("exp_complex_c", Potential::exponential(-8.0, PI / 3.0, 1.0)),
        ("exp_imaginary", Potential::exponential(-10.0, PI / 2.0, 1.0)),
        ("square_well", Potential::square_well(1.0, 0.0, 2.0)),
        ("square_well_complex", Potential::square_well(2.0, 0.4, 1.5)),
        ("power_decay", Potential::power_decay(1.0, 0.0, 2.0)),
        ("power_decay_complex", Potential::power_decay(-2.0, 0.3, 3.0)),
        (
            "exp_sum",
            Potential::exp_sum(vec![
                ExpTerm { c: -2.0, phi: 0.2, kappa: 1.0 },
                ExpTerm { c: 1.0, phi: 0.0, kappa: 2.0 },
            ]),
        ),
        (
            "exp_sum_complex",
            Potential::exp_sum(vec![
                ExpTerm { c: -6.0, phi: 0.5, kappa: 1.5 },
                ExpTerm { c: -2.0, phi: -0.3, kappa: 0.75 },
            ]),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{E, PI};

    #[test]
    fn eval_examples() {
        let w = Potential::square_well(1.0, 0.0, 2.0);
        assert_eq!(w.eval(1.0).unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(w.eval(3.0).unwrap(), Complex64::new(0.0, 0.0));
        let e = Potential::exponential(2.0, PI / 4.0, 1.0);
        assert_relative_eq!((e.eval(0.0).unwrap() - Complex64::from_polar(2.0, PI / 4.0)).norm(), 0.0);
        assert!(matches!(e.eval(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn lebesgue_examples() {
        let e = Potential::exponential(1.0, 0.0, 1.0);
        assert_relative_eq!(lebesgue_norm(&e, 1.0).unwrap().value, 1.0, max_relative = 1e-14);
        let ind = Potential::square_well(-1.0, 0.0, 2.0);
        assert_relative_eq!(lebesgue_norm(&ind, 4.0).unwrap().value, 2f64.powf(0.25), max_relative = 1e-14);
        let pw = Potential::power_decay(1.0, 0.0, 2.0);
        assert_relative_eq!(lebesgue_norm(&pw, 1.0).unwrap().value, 1.0, max_relative = 1e-14);
        let quad = lebesgue_norm_quadrature(&pw, 1.0).unwrap().value;
        assert!((quad - 1.0).abs() < 1e-10, "{quad}");
    }

    #[test]
    fn quadrature_matches_closed_forms_on_catalog() {
        for (name, q) in catalog() {
            for r in [1.0, 2.0, 3.5] {
                let closed = lebesgue_norm(&q, r).unwrap().value;
                let numeric = lebesgue_norm_quadrature(&q, r).unwrap().value;
                assert!((closed - numeric).abs() <= 1e-9 * closed, "{name} r={r}: {closed} vs {numeric}");
            }
        }
    }

    #[test]
    fn divergence_is_an_error() {
        let pw = Potential::power_decay(1.0, 0.0, 0.5);
        assert!(matches!(lebesgue_norm(&pw, 1.0), Err(Error::NormDiverges(_))));
        assert!(matches!(lebesgue_norm_quadrature(&pw, 1.5), Err(Error::NormDiverges(_))));
        assert!(matches!(weak_norm(&pw, 1.0), Err(Error::NormDiverges(_))));
        assert!(matches!(lebesgue_norm(&pw, 0.0), Err(Error::Exponent(_))));
    }

    #[test]
    fn distribution_examples() {
        let ind = Potential::square_well(-1.0, 0.0, 2.0);
        assert_eq!(distribution_function(&ind, 0.5).unwrap(), 2.0);
        assert_eq!(distribution_function(&ind, 1.5).unwrap(), 0.0);
        let pw = Potential::power_decay(1.0, 0.0, 2.0);
        assert_relative_eq!(distribution_function(&pw, 0.25).unwrap(), 1.0, max_relative = 1e-14);
        let grid = distribution_function_grid(&pw, 0.25).unwrap();
        assert!((grid - 1.0).abs() < 1e-6, "{grid}");
        let grid = distribution_function_grid(&ind, 0.5).unwrap();
        assert!((grid - 2.0).abs() < 1e-9, "{grid}");
    }

    #[test]
    fn weak_examples() {
        let ind = Potential::square_well(-1.0, 0.0, 2.0);
        assert_relative_eq!(weak_norm(&ind, 3.0).unwrap().value, 2f64.powf(1.0 / 3.0), max_relative = 1e-10);
        let pw = Potential::power_decay(1.0, 0.0, 2.0);
        assert_relative_eq!(weak_norm(&pw, 0.5).unwrap().value, 1.0, max_relative = 1e-10);
        let e = Potential::exponential(1.0, 0.0, 1.0);
        assert_relative_eq!(weak_norm(&e, 1.0).unwrap().value, 1.0 / E, max_relative = 1e-10);
    }

    #[test]
    fn lorentz_examples() {
        let ind = Potential::square_well(-1.0, 0.0, 2.0);
        assert_relative_eq!(lorentz_norm(&ind, 2.0, 1.0).unwrap().value, 2f64.sqrt(), max_relative = 1e-10);
        assert_eq!(lorentz_norm(&Potential::zero(), 2.0, 3.0).unwrap().value, 0.0);
        for (name, q) in catalog() {
            for r in [1.0, 2.5] {
                let l = lorentz_norm(&q, r, r).unwrap().value;
                let s = lebesgue_norm(&q, r).unwrap().value;
                assert!((l - s).abs() < 1e-8 * s, "{name}: {l} vs {s}");
            }
        }
    }

    #[test]
    fn factorization_examples() {
        let q = Potential::exponential(-1.0, 0.0, 1.0);
        let f = factorize(&q, Scheme::SqrtSplit);
        for x in [0.0, 0.7, 3.0] {
            let ex = (-x / 2.0f64).exp();
            assert_relative_eq!((f.a.value(x) - ex).norm(), 0.0, epsilon = 1e-15);
            assert_relative_eq!((f.b.value(x) + ex).norm(), 0.0, epsilon = 1e-15);
        }
        let q = Potential::power_decay(1.0, 0.0, 3.0);
        let f = factorize(&q, Scheme::PowerWeight(1.0));
        assert_relative_eq!(f.a.value(1.0).re, 0.5);
        assert_relative_eq!(f.b.value(1.0).re, 0.25, max_relative = 1e-15);

        let c = 3.5;
        let q = Potential::exponential(c, 0.9, 1.0);
        let f = factorize(&q, Scheme::SqrtSplit);
        let a2 = lebesgue_norm_quadrature(&f.a, 2.0).unwrap().value.powi(2);
        assert!((a2 - c).abs() < 1e-9);
    }

    #[test]
    fn sampled_potential_parsing() {
        let s = SampledPotential::from_text("# x re im\n0 -1 0.5\n1 -0.5 0.25\n2 0 0\n", TailModel::Zero, 0.0).unwrap();
        let p = Potential::sampled(s);
        assert_relative_eq!((p.value(0.5) - Complex64::new(-0.75, 0.375)).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(p.value(5.0), Complex64::new(0.0, 0.0));
        let n = lebesgue_norm(&p, 1.0).unwrap().value;
        assert!((n - 1.25f64.sqrt()).abs() < 1e-9, "{n}");
        assert!(SampledPotential::from_text("0 1\n0 2\n", TailModel::Zero, 0.0).is_err());
    }
}
