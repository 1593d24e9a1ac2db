//! Eigenvalue enclosure bounds and the star-shaped regions they define.
//!
//! Every bound has the form `|λ| ≤ R(θ)` with `θ = arg λ ∈ (0, 2π)`.
//! Radii are computed in log space so that large exponents do not overflow.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{self, factorize, Potential, Scheme};
use crate::resolvent::{spectral_point, BoundaryCondition};
use crate::specfun;

/// `p' = p/(p-1)`, with `1' = ∞` and `∞' = 1`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn recip(x: f64) -> f64 {
    if x.is_infinite() { 0.0 } else { 1.0 / x }
}

/// `α = (1 - 1/r - 1/s)^{-1}`, or the extremal regime `1/r + 1/s = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Alpha {
    Finite(f64),
    Extremal,
}

impl Alpha {
    pub fn finite(self) -> Option<f64> {
        match self {
            Alpha::Finite(a) => Some(a),
            Alpha::Extremal => None,
        }
    }
}

pub fn alpha_exponent(r: f64, s: f64) -> Result<Alpha> {
    if !(r > 0.0 && s > 0.0) {
        return Err(Error::Exponent(format!("r = {r}, s = {s} must be positive")));
    }
    let sum = recip(r) + recip(s);
    if (sum - 1.0).abs() <= 1e-14 {
        Ok(Alpha::Extremal)
    } else if sum > 1.0 {
        Err(Error::InadmissibleExponents(format!("1/r + 1/s = {sum} > 1 (r = {r}, s = {s})")))
    } else {
        Ok(Alpha::Finite(1.0 / (1.0 - sum)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentConfig {
    pub p: f64,
    pub r: f64,
    pub s: f64,
    pub alpha: Alpha,
}

impl ExponentConfig {
    pub fn new(p: f64, r: f64, s: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Exponent(format!("p = {p} must be in (1, inf)")));
        }
        Ok(ExponentConfig { p, r, s, alpha: alpha_exponent(r, s)? })
    }

    pub fn p_conj(&self) -> f64 {
        conjugate(self.p)
    }

    /// The finite α of the Theorem 1 regime, requiring `p ≤ s`.
    pub fn thm1_alpha(&self) -> Result<f64> {
        let alpha = self
            .alpha
            .finite()
            .ok_or_else(|| Error::InadmissibleExponents("1/r + 1/s = 1 is the extremal regime".into()))?;
        if self.p > self.s {
            return Err(Error::InadmissibleExponents(format!("p = {} exceeds s = {}", self.p, self.s)));
        }
        Ok(alpha)
    }
}

/// `(β, γ)` with `1/β = (1-t) + t/α'` and `1/γ = (1-t)/α`, so that
/// `1/α + 1/β = 1/γ + 1`.
pub fn interpolation_exponents(alpha: f64, t: f64) -> Result<(f64, f64)> {
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::Exponent(format!("alpha = {alpha} must be in [1, inf)")));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("interpolation parameter {t} must be in (0, 1)")));
    }
    let inv_beta = (1.0 - t) + t * recip(conjugate(alpha));
    let inv_gamma = (1.0 - t) / alpha;
    Ok((1.0 / inv_beta, 1.0 / inv_gamma))
}

fn check_theta(theta: f64) -> Result<f64> {
    if theta > 0.0 && theta < 2.0 * PI {
        Ok((theta / 2.0).sin())
    } else {
        Err(Error::Domain(format!("theta = {theta} must be in (0, 2pi)")))
    }
}

fn check_norm(x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("norm value {x} must be finite and non-negative")))
    }
}

/// `exp(num / den)` where `num` may be `-∞` for a zero norm.
fn root_exp(num: f64, den: f64) -> f64 {
    if num == f64::NEG_INFINITY { 0.0 } else { (num / den).exp() }
}

/// Theorem 1: `R^{1+α} = (α sin(θ/2))^{-2} (‖a‖_r ‖b‖_s)^{2α}`.
pub fn bound_thm1(na: f64, nb: f64, cfg: &ExponentConfig, theta: f64) -> Result<f64> {
    let alpha = cfg.thm1_alpha()?;
    let sin = check_theta(theta)?;
    check_norm(na)?;
    check_norm(nb)?;
    let num = -2.0 * (alpha * sin).ln() + 2.0 * alpha * (na * nb).ln();
    Ok(root_exp(num, 1.0 + alpha))
}

/// Theorem 2: `R = (g(cot(θ/2)) ‖a‖_p ‖b‖_{p'} / 2)²`.
pub fn bound_thm2(na: f64, nb_conj: f64, theta: f64) -> Result<f64> {
    let sin = check_theta(theta)?;
    check_norm(na)?;
    check_norm(nb_conj)?;
    let g = specfun::g((theta / 2.0).cos() / sin).value;
    Ok((0.5 * g * na * nb_conj).powi(2))
}

/// Corollary 1 gate: `r > 2` and `r ≥ p`.
pub fn cor1_admissible(p: f64, r: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Exponent(format!("p = {p} must be in (1, inf)")));
    }
    if !(r > 2.0) || r < p {
        return Err(Error::InadmissibleExponents(format!("r = {r} with p = {p}: need r > 2 and r >= p")));
    }
    Ok(())
}

/// `R` from `R^{r-1} = K (r/(r-2) sin)^{2-r} J`, given `ln K` and `ln J`.
fn cor_radius(r: f64, sin: f64, ln_k: f64, ln_j: f64) -> f64 {
    let num = ln_k + (2.0 - r) * (r / (r - 2.0) * sin).ln() + ln_j;
    root_exp(num, r - 1.0)
}

/// Corollary 1: `R^{r-1} = (r/(r-2) sin(θ/2))^{2-r} ‖a‖_r^r ‖b‖_r^r`.
pub fn bound_cor1(na: f64, nb: f64, p: f64, r: f64, theta: f64) -> Result<f64> {
    cor1_admissible(p, r)?;
    let sin = check_theta(theta)?;
    check_norm(na)?;
    check_norm(nb)?;
    if r.is_infinite() {
        let cfg = ExponentConfig::new(p, r, r)?;
        return bound_thm1(na, nb, &cfg, theta);
    }
    Ok(cor_radius(r, sin, 0.0, r * (na * nb).ln()))
}

/// Whether the Corollary 2 gate holds, and whether it holds only with
/// equality (`2γ = p - 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cor2Gate {
    pub equality: bool,
}

/// `γ > 1/2` for `p ≤ 2`, `2γ ≥ p - 1` for `p > 2`.
pub fn cor2_admissible(p: f64, gamma: f64) -> Result<Cor2Gate> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Exponent(format!("p = {p} must be in (1, inf)")));
    }
    if !(gamma > 0.5 && gamma.is_finite()) {
        return Err(Error::InadmissibleExponents(format!("gamma = {gamma} must exceed 1/2")));
    }
    if p > 2.0 {
        let gap = 2.0 * gamma - (p - 1.0);
        if gap < -1e-14 {
            return Err(Error::InadmissibleExponents(format!("2 gamma = {} < p - 1 = {}", 2.0 * gamma, p - 1.0)));
        }
        return Ok(Cor2Gate { equality: gap.abs() <= 1e-14 });
    }
    Ok(Cor2Gate { equality: false })
}

/// Corollary 2: `R^γ = ((2γ+1)/(2γ-1) sin(θ/2))^{1/2-γ} ∫|q|^{γ+1/2}`.
pub fn bound_cor2(integral: f64, gamma: f64, p: f64, theta: f64) -> Result<f64> {
    cor2_admissible(p, gamma)?;
    let sin = check_theta(theta)?;
    check_norm(integral)?;
    let num = (0.5 - gamma) * ((2.0 * gamma + 1.0) / (2.0 * gamma - 1.0) * sin).ln() + integral.ln();
    Ok(root_exp(num, gamma))
}

/// Remark 1 (negative axis): `R^γ = ((2γ-1)/(2γ+1))^{γ-1/2} ∫|q|^{γ+1/2}`.
pub fn bound_rem1(integral: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.5 && gamma.is_finite()) {
        return Err(Error::InadmissibleExponents(format!("gamma = {gamma} must exceed 1/2")));
    }
    check_norm(integral)?;
    let num = (gamma - 0.5) * ((2.0 * gamma - 1.0) / (2.0 * gamma + 1.0)).ln() + integral.ln();
    Ok(root_exp(num, gamma))
}

/// Corollary 3: `R^{r-1} = (τr-1)^{-1} (r/(r-2) sin)^{2-r} ∫|(1+x)^τ q|^r`.
pub fn bound_cor3(integral: f64, r: f64, tau: f64, p: f64, theta: f64) -> Result<f64> {
    cor1_admissible(p, r)?;
    if !(r.is_finite() && tau * r > 1.0) {
        return Err(Error::InadmissibleExponents(format!("tau r = {} must exceed 1", tau * r)));
    }
    let sin = check_theta(theta)?;
    check_norm(integral)?;
    Ok(cor_radius(r, sin, -(tau * r - 1.0).ln(), integral.ln()))
}

/// Corollary 4: `R^{r-1} = (τr)^{-1} (r/(r-2) sin)^{2-r} ∫e^{τrx}|q|^r`.
pub fn bound_cor4(integral: f64, r: f64, tau: f64, p: f64, theta: f64) -> Result<f64> {
    cor1_admissible(p, r)?;
    if !(r.is_finite() && tau > 0.0) {
        return Err(Error::InadmissibleExponents(format!("tau = {tau} must be positive, r finite")));
    }
    let sin = check_theta(theta)?;
    check_norm(integral)?;
    Ok(cor_radius(r, sin, -(tau * r).ln(), integral.ln()))
}

/// Theorem 3 on the negative axis: `R^{1+α} = α^{-2} (‖a‖_r ‖b‖_s)^{2α}`.
pub fn bound_thm3_negative(na: f64, nb: f64, cfg: &ExponentConfig) -> Result<f64> {
    bound_thm1(na, nb, cfg, PI)
}

/// Which `b` norm enters Theorem 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Thm4Variant {
    /// `‖a‖_p ‖b‖_p` as printed.
    Printed,
    /// `‖a‖_p ‖b‖_{p'}`, matching Theorem 2.
    #[default]
    Holder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thm4Result {
    pub radius: f64,
    pub iterations: usize,
}

/// Theorem 4: the outermost `R` on the ray `arg λ = θ` with
/// `R^{1/2} ≤ g_σ(-cot(θ/2); μ) N / 2`, where `μ = R^{1/2} e^{iθ/2}`.
///
/// Since `1 ≤ g_σ ≤ 2`, every `R ≤ N²/4` satisfies the inequality and none
/// exceeds `N²`. The interval `[N²/4, N²]` is scanned downward for the first
/// admissible point and the crossing is refined by regula falsi.
pub fn bound_thm4(na: f64, nb: f64, sigma: f64, theta: f64) -> Result<f64> {
    Ok(bound_thm4_iter(na, nb, sigma, theta, 200)?.radius)
}

/// As [`bound_thm4`], also reporting the number of `g_σ` evaluations;
/// `max_iter` caps the refinement steps.
pub fn bound_thm4_iter(na: f64, nb: f64, sigma: f64, theta: f64, max_iter: usize) -> Result<Thm4Result> {
    check_theta(theta)?;
    check_norm(na)?;
    check_norm(nb)?;
    if !(sigma >= 0.0) {
        return Err(Error::Domain(format!("sigma = {sigma}")));
    }
    let n = na * nb;
    if n == 0.0 {
        return Ok(Thm4Result { radius: 0.0, iterations: 0 });
    }
    if sigma.is_infinite() {
        return Ok(Thm4Result { radius: bound_thm2(na, nb, theta)?, iterations: 0 });
    }
    let a = -(theta / 2.0).cos() / (theta / 2.0).sin();
    let mut iterations = 0;
    // ψ(R) = g N/2 - R^{1/2} ≥ 0 marks admissible radii
    let mut psi = |r: f64| -> Result<f64> {
        iterations += 1;
        let mu = Complex64::from_polar(r.sqrt(), theta / 2.0);
        Ok(0.5 * specfun::g_sigma(a, sigma, mu)? * n - r.sqrt())
    };
    let (lower, upper) = (0.25 * n * n, n * n);
    let f_upper = psi(upper)?;
    if f_upper >= 0.0 {
        return Ok(Thm4Result { radius: upper, iterations });
    }
    let steps = 48;
    let (mut hi, mut f_hi) = (upper, f_upper);
    let mut bracket = None;
    for k in 1..=steps {
        let x = upper - (upper - lower) * k as f64 / steps as f64;
        let v = if k == steps { 0.5 * n - x.sqrt() } else { psi(x)? };
        if v >= 0.0 {
            bracket = Some((x, v));
            break;
        }
        hi = x;
        f_hi = v;
    }
    // ψ(N²/4) ≥ 0 holds analytically, so a bracket always exists
    let (mut lo, mut f_lo) = bracket.unwrap_or((lower, 0.0));
    let mut side = 0;
    for _ in 0..max_iter {
        if hi - lo <= 1e-14 * hi {
            break;
        }
        let mut x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let v = psi(x)?;
        if v >= 0.0 {
            lo = x;
            f_lo = v;
            if side == 1 {
                f_hi *= 0.5;
            }
            side = 1;
        } else {
            hi = x;
            f_hi = v;
            if side == -1 {
                f_lo *= 0.5;
            }
            side = -1;
        }
    }
    Ok(Thm4Result { radius: lo, iterations })
}

/// Theorem 5: `R^{1+α} = C (α sin(θ/2))^{-2} (‖a‖_{r,w} ‖b‖_{s,w})^{2α}`.
pub fn bound_thm5_weak(naw: f64, nbw: f64, cfg: &ExponentConfig, theta: f64, c: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("constant C = {c} must be positive")));
    }
    let alpha = cfg.thm1_alpha()?;
    let sin = check_theta(theta)?;
    check_norm(naw)?;
    check_norm(nbw)?;
    let num = c.ln() - 2.0 * (alpha * sin).ln() + 2.0 * alpha * (naw * nbw).ln();
    Ok(root_exp(num, 1.0 + alpha))
}

/// Corollary 5 in the form induced by Theorem 5 with `r = s = 2γ+1` and the
/// square-root split: `R^γ = C^{(2γ-1)/4} (α sin(θ/2))^{1/2-γ} W` where
/// `W = sup_t t^{γ+1/2} λ_q(t)` and `α = (2γ+1)/(2γ-1)`.
pub fn bound_cor5(weak_sup: f64, gamma: f64, p: f64, theta: f64, c: f64) -> Result<f64> {
    cor2_admissible(p, gamma)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("constant C = {c} must be positive")));
    }
    let sin = check_theta(theta)?;
    check_norm(weak_sup)?;
    let alpha = (2.0 * gamma + 1.0) / (2.0 * gamma - 1.0);
    let num = (2.0 * gamma - 1.0) / 4.0 * c.ln() + (0.5 - gamma) * (alpha * sin).ln() + weak_sup.ln();
    Ok(root_exp(num, gamma))
}

/// Remark 3: `R = (g(cot(θ/2)) (p'τ-1)^{-1/p'} ‖(1+x)^τ q‖_p / 2)²`.
pub fn bound_rem3(weighted_norm: f64, tau: f64, p: f64, theta: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Exponent(format!("p = {p} must be in (1, inf)")));
    }
    let pc = conjugate(p);
    if !(pc * tau > 1.0) {
        return Err(Error::InadmissibleExponents(format!("p' tau = {} must exceed 1", pc * tau)));
    }
    bound_thm2((pc * tau - 1.0).powf(-1.0 / pc), weighted_norm, theta)
}

/// Smallest `C` for which Theorem 5 holds on the given samples:
/// the maximum of `R^{1+α} (α sin(θ/2))² / (‖a‖_{r,w}‖b‖_{s,w})^{2α}`.
/// Each sample is `(λ, ‖a‖_{r,w}, ‖b‖_{s,w}, α)`.
pub fn estimate_c_empirical(samples: &[(Complex64, f64, f64, f64)]) -> Result<f64> {
    let mut c = 0.0f64;
    for &(lambda, naw, nbw, alpha) in samples {
        let sp = spectral_point(lambda)?;
        let ln_ratio = (1.0 + alpha) * lambda.norm().ln() + 2.0 * (alpha * sp.sin_half()).ln()
            - 2.0 * alpha * (naw * nbw).ln();
        c = c.max(ln_ratio.exp());
    }
    Ok(c)
}

// ---------------------------------------------------------------------------
// Regions

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Thm1,
    Thm2,
    Thm3Neg,
    Thm4,
    Thm5Weak,
    Cor1,
    Cor2,
    Cor3,
    Cor4,
    Cor5,
    Rem1,
    Rem3,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::Thm1 => "thm1",
            Provenance::Thm2 => "thm2",
            Provenance::Thm3Neg => "thm3_neg",
            Provenance::Thm4 => "thm4",
            Provenance::Thm5Weak => "thm5_weak",
            Provenance::Cor1 => "cor1",
            Provenance::Cor2 => "cor2",
            Provenance::Cor3 => "cor3",
            Provenance::Cor4 => "cor4",
            Provenance::Cor5 => "cor5",
            Provenance::Rem1 => "rem1",
            Provenance::Rem3 => "rem3",
        };
        f.write_str(s)
    }
}

/// A bound with all norms evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Bound {
    Thm1 { na: f64, nb: f64, cfg: ExponentConfig },
    Thm2 { na: f64, nb: f64 },
    Thm3Neg { na: f64, nb: f64, cfg: ExponentConfig },
    Thm4 { na: f64, nb: f64, sigma: f64, variant: Thm4Variant },
    Thm5Weak { naw: f64, nbw: f64, cfg: ExponentConfig, c: f64 },
    Cor1 { na: f64, nb: f64, p: f64, r: f64 },
    Cor2 { integral: f64, gamma: f64, p: f64 },
    Cor3 { integral: f64, r: f64, tau: f64, p: f64 },
    Cor4 { integral: f64, r: f64, tau: f64, p: f64 },
    Cor5 { weak_sup: f64, gamma: f64, p: f64, c: f64 },
    Rem1 { integral: f64, gamma: f64 },
    Rem3 { weighted_norm: f64, tau: f64, p: f64 },
}

impl Bound {
    pub fn provenance(&self) -> Provenance {
        match self {
            Bound::Thm1 { .. } => Provenance::Thm1,
            Bound::Thm2 { .. } => Provenance::Thm2,
            Bound::Thm3Neg { .. } => Provenance::Thm3Neg,
            Bound::Thm4 { .. } => Provenance::Thm4,
            Bound::Thm5Weak { .. } => Provenance::Thm5Weak,
            Bound::Cor1 { .. } => Provenance::Cor1,
            Bound::Cor2 { .. } => Provenance::Cor2,
            Bound::Cor3 { .. } => Provenance::Cor3,
            Bound::Cor4 { .. } => Provenance::Cor4,
            Bound::Cor5 { .. } => Provenance::Cor5,
            Bound::Rem1 { .. } => Provenance::Rem1,
            Bound::Rem3 { .. } => Provenance::Rem3,
        }
    }

    /// Bounds that constrain only the negative real axis.
    pub fn negative_axis_only(&self) -> bool {
        matches!(self, Bound::Thm3Neg { .. } | Bound::Rem1 { .. })
    }

    /// Fails when the exponents are outside the bound's admissible range.
    pub fn check_admissible(&self) -> Result<()> {
        match self {
            Bound::Thm1 { cfg, .. } | Bound::Thm3Neg { cfg, .. } | Bound::Thm5Weak { cfg, .. } => {
                cfg.thm1_alpha().map(|_| ())
            }
            Bound::Cor1 { p, r, .. } => cor1_admissible(*p, *r),
            Bound::Cor2 { gamma, p, .. } | Bound::Cor5 { gamma, p, .. } => cor2_admissible(*p, *gamma).map(|_| ()),
            Bound::Cor3 { r, tau, p, .. } => bound_cor3(1.0, *r, *tau, *p, PI).map(|_| ()),
            Bound::Cor4 { r, tau, p, .. } => bound_cor4(1.0, *r, *tau, *p, PI).map(|_| ()),
            Bound::Rem1 { gamma, .. } => bound_rem1(1.0, *gamma).map(|_| ()),
            Bound::Rem3 { tau, p, .. } => bound_rem3(1.0, *tau, *p, PI).map(|_| ()),
            Bound::Thm2 { .. } | Bound::Thm4 { .. } => Ok(()),
        }
    }

    /// `R(θ)`; negative-axis bounds return their single radius for any θ.
    pub fn radius(&self, theta: f64) -> Result<f64> {
        match *self {
            Bound::Thm1 { na, nb, cfg } => bound_thm1(na, nb, &cfg, theta),
            Bound::Thm2 { na, nb } => bound_thm2(na, nb, theta),
            Bound::Thm3Neg { na, nb, cfg } => bound_thm3_negative(na, nb, &cfg),
            Bound::Thm4 { na, nb, sigma, .. } => bound_thm4(na, nb, sigma, theta),
            Bound::Thm5Weak { naw, nbw, cfg, c } => bound_thm5_weak(naw, nbw, &cfg, theta, c),
            Bound::Cor1 { na, nb, p, r } => bound_cor1(na, nb, p, r, theta),
            Bound::Cor2 { integral, gamma, p } => bound_cor2(integral, gamma, p, theta),
            Bound::Cor3 { integral, r, tau, p } => bound_cor3(integral, r, tau, p, theta),
            Bound::Cor4 { integral, r, tau, p } => bound_cor4(integral, r, tau, p, theta),
            Bound::Cor5 { weak_sup, gamma, p, c } => bound_cor5(weak_sup, gamma, p, theta, c),
            Bound::Rem1 { integral, gamma } => bound_rem1(integral, gamma),
            Bound::Rem3 { weighted_norm, tau, p } => bound_rem3(weighted_norm, tau, p, theta),
        }
    }

    /// Named scalar inputs, for reports.
    pub fn parameters(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: f64| {
            m.insert(k.to_string(), v);
        };
        match *self {
            Bound::Thm1 { na, nb, cfg } | Bound::Thm3Neg { na, nb, cfg } => {
                put("norm_a", na);
                put("norm_b", nb);
                put("p", cfg.p);
                put("r", cfg.r);
                put("s", cfg.s);
                if let Alpha::Finite(a) = cfg.alpha {
                    put("alpha", a);
                }
            }
            Bound::Thm2 { na, nb } => {
                put("norm_a", na);
                put("norm_b", nb);
            }
            Bound::Thm4 { na, nb, sigma, variant } => {
                put("norm_a", na);
                put("norm_b", nb);
                put("sigma", sigma);
                put("holder_variant", if variant == Thm4Variant::Holder { 1.0 } else { 0.0 });
            }
            Bound::Thm5Weak { naw, nbw, cfg, c } => {
                put("weak_norm_a", naw);
                put("weak_norm_b", nbw);
                put("p", cfg.p);
                put("r", cfg.r);
                put("s", cfg.s);
                put("c", c);
            }
            Bound::Cor1 { na, nb, p, r } => {
                put("norm_a", na);
                put("norm_b", nb);
                put("p", p);
                put("r", r);
            }
            Bound::Cor2 { integral, gamma, p } => {
                put("integral", integral);
                put("gamma", gamma);
                put("p", p);
            }
            Bound::Cor3 { integral, r, tau, p } | Bound::Cor4 { integral, r, tau, p } => {
                put("integral", integral);
                put("r", r);
                put("tau", tau);
                put("p", p);
            }
            Bound::Cor5 { weak_sup, gamma, p, c } => {
                put("weak_sup", weak_sup);
                put("gamma", gamma);
                put("p", p);
                put("c", c);
            }
            Bound::Rem1 { integral, gamma } => {
                put("integral", integral);
                put("gamma", gamma);
            }
            Bound::Rem3 { weighted_norm, tau, p } => {
                put("weighted_norm", weighted_norm);
                put("tau", tau);
                put("p", p);
            }
        }
        m
    }
}

/// Bound selector with exponents, evaluated against a concrete potential by
/// [`BoundSpec::resolve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "bound", rename_all = "snake_case")]
pub enum BoundSpec {
    Thm1 {
        #[serde(default = "two")]
        p: f64,
        r: f64,
        s: f64,
        #[serde(default = "sqrt_split")]
        scheme: Scheme,
    },
    Thm2 {
        #[serde(default = "two")]
        p: f64,
        #[serde(default = "sqrt_split")]
        scheme: Scheme,
    },
    Thm3Neg {
        #[serde(default = "two")]
        p: f64,
        r: f64,
        s: f64,
        #[serde(default = "sqrt_split")]
        scheme: Scheme,
    },
    Thm4 {
        #[serde(default = "two")]
        p: f64,
        #[serde(default = "sqrt_split")]
        scheme: Scheme,
        #[serde(default)]
        variant: Thm4Variant,
    },
    Thm5Weak {
        #[serde(default = "two")]
        p: f64,
        r: f64,
        s: f64,
        #[serde(default = "sqrt_split")]
        scheme: Scheme,
        #[serde(default = "one")]
        c: f64,
    },
    Cor1 {
        #[serde(default = "two")]
        p: f64,
        r: f64,
        #[serde(default = "sqrt_split")]
        scheme: Scheme,
    },
    Cor2 {
        #[serde(default = "two")]
        p: f64,
        gamma: f64,
    },
    Cor3 {
        #[serde(default = "two")]
        p: f64,
        r: f64,
        tau: f64,
    },
    Cor4 {
        #[serde(default = "two")]
        p: f64,
        r: f64,
        tau: f64,
    },
    Cor5 {
        #[serde(default = "two")]
        p: f64,
        gamma: f64,
        #[serde(default = "one")]
        c: f64,
    },
    Rem1 {
        gamma: f64,
    },
    Rem3 {
        #[serde(default = "two")]
        p: f64,
        tau: f64,
    },
}

fn two() -> f64 {
    2.0
}

fn one() -> f64 {
    1.0
}

fn sqrt_split() -> Scheme {
    Scheme::SqrtSplit
}

impl BoundSpec {
    pub fn provenance(&self) -> Provenance {
        match self {
            BoundSpec::Thm1 { .. } => Provenance::Thm1,
            BoundSpec::Thm2 { .. } => Provenance::Thm2,
            BoundSpec::Thm3Neg { .. } => Provenance::Thm3Neg,
            BoundSpec::Thm4 { .. } => Provenance::Thm4,
            BoundSpec::Thm5Weak { .. } => Provenance::Thm5Weak,
            BoundSpec::Cor1 { .. } => Provenance::Cor1,
            BoundSpec::Cor2 { .. } => Provenance::Cor2,
            BoundSpec::Cor3 { .. } => Provenance::Cor3,
            BoundSpec::Cor4 { .. } => Provenance::Cor4,
            BoundSpec::Cor5 { .. } => Provenance::Cor5,
            BoundSpec::Rem1 { .. } => Provenance::Rem1,
            BoundSpec::Rem3 { .. } => Provenance::Rem3,
        }
    }

    /// Exponent-only admissibility check, run before any norm is computed.
    pub fn check_admissible(&self) -> Result<()> {
        let placeholder = match *self {
            BoundSpec::Thm1 { p, r, s, .. } => Bound::Thm1 { na: 1.0, nb: 1.0, cfg: ExponentConfig::new(p, r, s)? },
            BoundSpec::Thm3Neg { p, r, s, .. } => {
                Bound::Thm3Neg { na: 1.0, nb: 1.0, cfg: ExponentConfig::new(p, r, s)? }
            }
            BoundSpec::Thm5Weak { p, r, s, c, .. } => {
                Bound::Thm5Weak { naw: 1.0, nbw: 1.0, cfg: ExponentConfig::new(p, r, s)?, c }
            }
            BoundSpec::Thm2 { p, .. } | BoundSpec::Thm4 { p, .. } => {
                if !(p > 1.0 && p.is_finite()) {
                    return Err(Error::Exponent(format!("p = {p} must be in (1, inf)")));
                }
                return Ok(());
            }
            BoundSpec::Cor1 { p, r, .. } => Bound::Cor1 { na: 1.0, nb: 1.0, p, r },
            BoundSpec::Cor2 { p, gamma } => Bound::Cor2 { integral: 1.0, gamma, p },
            BoundSpec::Cor3 { p, r, tau } => Bound::Cor3 { integral: 1.0, r, tau, p },
            BoundSpec::Cor4 { p, r, tau } => Bound::Cor4 { integral: 1.0, r, tau, p },
            BoundSpec::Cor5 { p, gamma, c } => Bound::Cor5 { weak_sup: 1.0, gamma, p, c },
            BoundSpec::Rem1 { gamma } => Bound::Rem1 { integral: 1.0, gamma },
            BoundSpec::Rem3 { p, tau } => Bound::Rem3 { weighted_norm: 1.0, tau, p },
        };
        placeholder.check_admissible()
    }

    /// Computes the norms the bound needs for `q` and returns the bound.
    pub fn resolve(&self, q: &Potential, bc: BoundaryCondition) -> Result<Bound> {
        self.check_admissible()?;
        use potential::{lebesgue_norm, power_integral, weak_norm, weak_norm_power, Weight};
        let bound = match *self {
            BoundSpec::Thm1 { p, r, s, scheme } | BoundSpec::Thm3Neg { p, r, s, scheme } => {
                let f = factorize(q, scheme);
                let cfg = ExponentConfig::new(p, r, s)?;
                let (na, nb) = f.norms(r, s)?;
                if matches!(self, BoundSpec::Thm1 { .. }) {
                    Bound::Thm1 { na: na.value, nb: nb.value, cfg }
                } else {
                    Bound::Thm3Neg { na: na.value, nb: nb.value, cfg }
                }
            }
            BoundSpec::Thm2 { p, scheme } => {
                let f = factorize(q, scheme);
                let (na, nb) = f.norms(p, conjugate(p))?;
                Bound::Thm2 { na: na.value, nb: nb.value }
            }
            BoundSpec::Thm4 { p, scheme, variant } => {
                let f = factorize(q, scheme);
                let s = match variant {
                    Thm4Variant::Printed => p,
                    Thm4Variant::Holder => conjugate(p),
                };
                let (na, nb) = f.norms(p, s)?;
                Bound::Thm4 { na: na.value, nb: nb.value, sigma: bc.sigma(), variant }
            }
            BoundSpec::Thm5Weak { p, r, s, scheme, c } => {
                let f = factorize(q, scheme);
                let cfg = ExponentConfig::new(p, r, s)?;
                Bound::Thm5Weak { naw: weak_norm(&f.a, r)?.value, nbw: weak_norm(&f.b, s)?.value, cfg, c }
            }
            BoundSpec::Cor1 { p, r, scheme } => {
                let f = factorize(q, scheme);
                let (na, nb) = f.norms(r, r)?;
                Bound::Cor1 { na: na.value, nb: nb.value, p, r }
            }
            BoundSpec::Cor2 { p, gamma } => Bound::Cor2 { integral: power_integral(q, gamma + 0.5)?.0, gamma, p },
            BoundSpec::Cor3 { p, r, tau } => {
                let wq = Potential::weighted(q.clone(), Weight::Power(tau));
                Bound::Cor3 { integral: power_integral(&wq, r)?.0, r, tau, p }
            }
            BoundSpec::Cor4 { p, r, tau } => {
                let wq = Potential::weighted(q.clone(), Weight::Exp(tau));
                Bound::Cor4 { integral: power_integral(&wq, r)?.0, r, tau, p }
            }
            BoundSpec::Cor5 { p, gamma, c } => {
                Bound::Cor5 { weak_sup: weak_norm_power(q, gamma + 0.5)?, gamma, p, c }
            }
            BoundSpec::Rem1 { gamma } => Bound::Rem1 { integral: power_integral(q, gamma + 0.5)?.0, gamma },
            BoundSpec::Rem3 { p, tau } => {
                let wq = Potential::weighted(q.clone(), Weight::Power(tau));
                Bound::Rem3 { weighted_norm: lebesgue_norm(&wq, p)?.value, tau, p }
            }
        };
        Ok(bound)
    }
}

/// Sampled boundary `θ ↦ R(θ)` of an enclosure region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnclosureRegion {
    pub thetas: Vec<f64>,
    /// `+∞` where the bound gives no constraint.
    pub radii: Vec<f64>,
    pub provenance: Provenance,
    pub parameters: BTreeMap<String, f64>,
    /// For bounds that only constrain the negative real axis.
    pub negative_axis_radius: Option<f64>,
    /// Theorem 5 / Corollary 5 regions built with the default `C = 1`.
    pub unscaled: bool,
}

/// `n` angles evenly spaced on `[exclusion, 2π - exclusion]`.
pub fn theta_grid(n: usize, exclusion: f64) -> Vec<f64> {
    let (a, b) = (exclusion, 2.0 * PI - exclusion);
    if n == 1 {
        return vec![PI];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

pub fn default_theta_grid() -> Vec<f64> {
    theta_grid(720, 1e-3)
}

pub fn enclosure_region(bound: &Bound, thetas: &[f64]) -> Result<EnclosureRegion> {
    bound.check_admissible()?;
    let unscaled = match bound {
        Bound::Thm5Weak { c, .. } | Bound::Cor5 { c, .. } => *c == 1.0,
        _ => false,
    };
    let (radii, negative_axis_radius) = if bound.negative_axis_only() {
        (vec![f64::INFINITY; thetas.len()], Some(bound.radius(PI)?))
    } else {
        let radii = thetas.iter().map(|&t| bound.radius(t)).collect::<Result<Vec<_>>>()?;
        (radii, None)
    };
    Ok(EnclosureRegion {
        thetas: thetas.to_vec(),
        radii,
        provenance: bound.provenance(),
        parameters: bound.parameters(),
        negative_axis_radius,
        unscaled,
    })
}

/// Relative tolerance on `|Im λ|/|λ|` for treating `λ` as negative real.
pub const NEGATIVE_AXIS_TOL: f64 = 1e-9;

impl EnclosureRegion {
    /// `R(θ(λ))` by linear interpolation in θ; `+∞` outside the sampled
    /// range or where the bound does not apply.
    pub fn radius_at(&self, lambda: Complex64) -> Result<f64> {
        let sp = spectral_point(lambda)?;
        if let Some(r) = self.negative_axis_radius {
            let on_axis = lambda.re < 0.0 && lambda.im.abs() <= NEGATIVE_AXIS_TOL * lambda.norm();
            return Ok(if on_axis { r } else { f64::INFINITY });
        }
        let t = sp.theta;
        let n = self.thetas.len();
        if n == 0 || t < self.thetas[0] || t > self.thetas[n - 1] {
            return Ok(f64::INFINITY);
        }
        let i = self.thetas.partition_point(|&x| x <= t).min(n - 1).max(1);
        let (t0, t1) = (self.thetas[i - 1], self.thetas[i]);
        let (r0, r1) = (self.radii[i - 1], self.radii[i]);
        if !r0.is_finite() || !r1.is_finite() {
            return Ok(f64::INFINITY);
        }
        let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        Ok(r0 + (r1 - r0) * w)
    }

    /// `(R(θ), R(θ) - |λ|)`.
    pub fn margin(&self, lambda: Complex64) -> Result<(f64, f64)> {
        let r = self.radius_at(lambda)?;
        Ok((r, r - lambda.norm()))
    }

    pub fn max_finite_radius(&self) -> f64 {
        self.radii
            .iter()
            .copied()
            .chain(self.negative_axis_radius)
            .filter(|r| r.is_finite())
            .fold(0.0, f64::max)
    }
}

/// `|λ| ≤ R(θ(λ))` (closed region).
pub fn contains(region: &EnclosureRegion, lambda: Complex64) -> Result<bool> {
    let (_, margin) = region.margin(lambda)?;
    Ok(margin >= 0.0)
}

/// Verification rule with tolerance: `margin ≥ -1e-9 (1 + R)`.
pub fn contains_with_tol(region: &EnclosureRegion, lambda: Complex64) -> Result<bool> {
    let (r, margin) = region.margin(lambda)?;
    Ok(passes(r, margin))
}

pub fn passes(radius: f64, margin: f64) -> bool {
    !radius.is_finite() || margin >= -1e-9 * (1.0 + radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_exponent(4.0, 4.0).unwrap(), Alpha::Finite(2.0));
        assert_eq!(alpha_exponent(2.0, 2.0).unwrap(), Alpha::Extremal);
        assert_eq!(alpha_exponent(3.0, 1.5).unwrap(), Alpha::Extremal);
        assert!(matches!(alpha_exponent(1.5, 1.5), Err(Error::InadmissibleExponents(_))));
        assert_eq!(alpha_exponent(f64::INFINITY, f64::INFINITY).unwrap(), Alpha::Finite(1.0));
    }

    #[test]
    fn interpolation_examples() {
        let (b, g) = interpolation_exponents(3.0, 1e-12).unwrap();
        assert!((b - 1.0).abs() < 1e-9 && (g - 3.0).abs() < 1e-9);
        let (b, g) = interpolation_exponents(3.0, 1.0 - 1e-12).unwrap();
        assert!((b - 1.5).abs() < 1e-9 && g > 1e11);
        assert!(interpolation_exponents(3.0, 1.0).is_err());
    }

    #[test]
    fn thm1_examples() {
        let cfg = ExponentConfig::new(2.0, 4.0, 4.0).unwrap();
        assert_relative_eq!(bound_thm1(1.0, 1.0, &cfg, PI).unwrap(), 0.25f64.powf(1.0 / 3.0), max_relative = 1e-14);
        let c = 1.7;
        let r1 = bound_thm1(1.0, 1.0, &cfg, 2.0).unwrap();
        let rc = bound_thm1(c, c, &cfg, 2.0).unwrap();
        assert_relative_eq!(rc / r1, c.powf(8.0 / 3.0), max_relative = 1e-13);
        assert!(bound_thm1(1.0, 1.0, &cfg, 1e-8).unwrap() > 1e4);
        let bad = ExponentConfig::new(3.0, 4.0, 2.5).unwrap();
        assert!(matches!(bound_thm1(1.0, 1.0, &bad, PI), Err(Error::InadmissibleExponents(_))));
    }

    #[test]
    fn thm2_examples() {
        assert_relative_eq!(bound_thm2(1.0, 1.0, PI).unwrap(), 0.25, max_relative = 1e-12);
        for t in [0.01, 1.0, 3.0, 5.0] {
            assert!(bound_thm2(1.3, 0.9, t).unwrap() <= (1.3f64 * 0.9).powi(2) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn corollary_examples() {
        let cfg = ExponentConfig::new(2.0, 4.0, 4.0).unwrap();
        assert_relative_eq!(bound_cor1(1.0, 1.0, 2.0, 4.0, PI).unwrap(), bound_thm1(1.0, 1.0, &cfg, PI).unwrap(), max_relative = 1e-14);
        assert_relative_eq!(bound_cor1(1.0, 1.0, 2.0, 3.0, PI).unwrap(), 1.0 / 3f64.sqrt(), max_relative = 1e-14);
        assert!(bound_cor1(1.0, 1.0, 2.0, 3.0, PI / 2.0).unwrap() >= bound_cor1(1.0, 1.0, 2.0, 3.0, PI).unwrap());
        assert_relative_eq!(bound_cor2(1.0, 1.5, 2.0, PI).unwrap(), 0.5f64.powf(2.0 / 3.0), max_relative = 1e-14);
        assert!(bound_cor3(1.0, 4.0, 0.25 + 1e-9, 2.0, PI).unwrap() > 1e2);
        let q = Potential::exponential(-1.0, 0.0, 1.0);
        let spec = BoundSpec::Cor4 { p: 2.0, r: 4.0, tau: 0.125 };
        assert!(spec.resolve(&q, BoundaryCondition::Dirichlet).unwrap().radius(PI).unwrap().is_finite());
        assert!(cor2_admissible(3.0, 1.0).unwrap().equality);
        assert!(cor2_admissible(3.0, 0.9).is_err());
    }

    #[test]
    fn thm3_and_thm4_examples() {
        let cfg = ExponentConfig::new(2.0, 4.0, 4.0).unwrap();
        assert_eq!(bound_thm3_negative(1.3, 0.7, &cfg).unwrap(), bound_thm1(1.3, 0.7, &cfg, PI).unwrap());
        assert_relative_eq!(bound_thm3_negative(1.0, 1.0, &cfg).unwrap(), 4f64.powf(-1.0 / 3.0), max_relative = 1e-14);
        for t in [0.3, PI, 4.0] {
            assert_eq!(bound_thm4(1.2, 0.8, f64::INFINITY, t).unwrap(), bound_thm2(1.2, 0.8, t).unwrap());
            assert_relative_eq!(bound_thm4(1.2, 0.8, 0.0, t).unwrap(), 0.96f64.powi(2), max_relative = 1e-12);
        }
        // σ = 1, θ = π: √R = N/2 for N ≤ 2 and N - 1 beyond.
        for n in [1.0f64, 1.8, 3.0, 7.5] {
            let m = if n <= 2.0 { n / 2.0 } else { n - 1.0 };
            let a = bound_thm4_iter(n, 1.0, 1.0, PI, 200).unwrap();
            let b = bound_thm4_iter(n, 1.0, 1.0, PI, 400).unwrap();
            assert_relative_eq!(a.radius, m * m, max_relative = 1e-9);
            assert_eq!(a.radius, b.radius);
        }
    }

    #[test]
    fn region_examples() {
        let cfg = ExponentConfig::new(2.0, 4.0, 4.0).unwrap();
        let reg = enclosure_region(&Bound::Thm1 { na: 1.0, nb: 1.0, cfg }, &default_theta_grid()).unwrap();
        let n = reg.radii.len();
        for i in 0..n {
            assert_relative_eq!(reg.radii[i], reg.radii[n - 1 - i], max_relative = 1e-12);
        }
        let r = reg.radius_at(Complex64::new(-1.0, 0.0)).unwrap();
        assert!((r - 4f64.powf(-1.0 / 3.0)).abs() < 1e-5);
        let reg2 = enclosure_region(&Bound::Thm2 { na: 1.0, nb: 2.0 }, &default_theta_grid()).unwrap();
        assert!(reg2.radii.iter().all(|&r| r <= 4.0 * (1.0 + 1e-12)));
        let z = enclosure_region(&Bound::Thm2 { na: 0.0, nb: 0.0 }, &default_theta_grid()).unwrap();
        assert!(z.radii.iter().all(|&r| r == 0.0));

        let theta = 2.0;
        let rt = reg.radius_at(Complex64::from_polar(1.0, theta)).unwrap();
        assert!(contains(&reg, Complex64::from_polar(rt / 2.0, theta)).unwrap());
        assert!(!contains(&reg, Complex64::from_polar(2.0 * rt, theta)).unwrap());
        let on = Complex64::from_polar(1.0, reg.thetas[100]);
        let lam = on * reg.radii[100];
        assert!(reg.radius_at(lam).unwrap() >= lam.norm() * (1.0 - 1e-15));
        assert!(matches!(contains(&reg, Complex64::new(1.0, 0.0)), Err(Error::EssentialSpectrum(_))));
    }

    proptest! {
        #[test]
        fn consistency_chain(r in 2.1f64..12.0, na in 0.05f64..5.0, nb in 0.05f64..5.0, theta in 0.01f64..6.27) {
            let cfg = ExponentConfig::new(2.0, r, r).unwrap();
            let c1 = bound_cor1(na, nb, 2.0, r, theta).unwrap();
            let t1 = bound_thm1(na, nb, &cfg, theta).unwrap();
            prop_assert!((c1 - t1).abs() <= 1e-12 * t1);
            let gamma = (r - 1.0) / 2.0;
            let c2 = bound_cor2(na.powf(r), gamma, 2.0, PI).unwrap();
            prop_assert!((c2 - bound_rem1(na.powf(r), gamma).unwrap()).abs() <= 1e-14 * c2);
            let mirrored = bound_thm1(na, nb, &cfg, 2.0 * PI - theta).unwrap();
            prop_assert!((mirrored - t1).abs() <= 1e-12 * t1);
        }

        #[test]
        fn interpolation_identity(alpha in 1.0f64..50.0, t in 0.001f64..0.999) {
            let (b, g) = interpolation_exponents(alpha, t).unwrap();
            prop_assert!((1.0 / alpha + 1.0 / b - 1.0 / g - 1.0).abs() < 1e-14);
        }
    }
}
