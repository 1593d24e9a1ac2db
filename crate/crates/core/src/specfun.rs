//! The extremal-case supremum functions
//! `g(a) = sup_{y ≥ 0} |e^{iay} - e^{-y}|` and its Robin analogue `g_σ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::golden_max;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GEval {
    /// The argument `a`, typically `cot(θ/2)`.
    pub argument: f64,
    pub value: f64,
    /// Where the supremum is attained; `+∞` when it is the `y → ∞` limit.
    pub maximizer_y: f64,
}

/// Robin reflection factor `w = (σ + iμ)/(σ - iμ)`; `σ = ∞` gives 1.
pub fn reflection_factor(sigma: f64, mu: Complex64) -> Result<Complex64> {
    if !(mu.im > 0.0) {
        return Err(Error::Branch(format!("Im mu = {} must be positive", mu.im)));
    }
    if !(sigma >= 0.0) {
        return Err(Error::Domain(format!("sigma = {sigma} must be in [0, inf]")));
    }
    if sigma.is_infinite() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let i_mu = Complex64::i() * mu;
    Ok((sigma + i_mu) / (sigma - i_mu))
}

/// `sup_{y ≥ 0} |e^{iay} - w e^{-y}|` for `|w| ≤ 1`, including the limit 1.
pub fn sup_modulus(a: f64, w: Complex64) -> GEval {
    // For real w the modulus is even in a; fold so that g(-a) = g(a) bitwise.
    let a_eff = if w.im == 0.0 { a.abs() } else { a };
    let h2 = |y: f64| {
        let e = (-y).exp();
        let (s, c) = (a_eff * y).sin_cos();
        1.0 + w.norm_sqr() * e * e - 2.0 * e * (w.re * c + w.im * s)
    };
    let abs_a = a_eff.abs();
    let y_max = if abs_a > 0.0 { 20f64.max(6.0 * PI / abs_a) } else { 20.0 };
    let n = 512usize.max((32.0 * abs_a * y_max / (2.0 * PI)).ceil() as usize);
    let step = y_max / n as f64;
    let vals: Vec<f64> = (0..=n).map(|i| h2(i as f64 * step)).collect();

    // |h2''| ≤ 4 + 2(1+|a|)², so a grid maximum is within M step²/8 of the
    // true local maximum; only peaks that could beat the leader are refined.
    let curvature = 4.0 + 2.0 * (1.0 + abs_a).powi(2);
    let slack = curvature * step * step / 4.0;
    let grid_best = vals.iter().copied().fold(1.0, f64::max);
    let mut best_y = f64::INFINITY;
    let mut best = 1.0;
    if vals[0] > best {
        best = vals[0];
        best_y = 0.0;
    }
    for i in 0..n {
        let peak = i == 0 || (vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1]);
        if peak && vals[i] >= grid_best - slack {
            let lo = i.saturating_sub(1) as f64 * step;
            let hi = (i + 1) as f64 * step;
            let (y, v) = golden_max(&h2, lo, hi, 1e-12);
            let (y, v) = if vals[i] > v { (i as f64 * step, vals[i]) } else { (y, v) };
            if v > best {
                best = v;
                best_y = y;
            }
        }
    }
    GEval { argument: a, value: best.sqrt(), maximizer_y: best_y }
}

/// `g(a) = sup_{y ≥ 0} |e^{iay} - e^{-y}|`.
pub fn g(a: f64) -> GEval {
    sup_modulus(a, Complex64::new(1.0, 0.0))
}

/// `g_σ(a) = sup_{y ≥ 0} |e^{iay} - w e^{-y}|` with `w = (σ+iμ)/(σ-iμ)`.
pub fn g_sigma(a: f64, sigma: f64, mu: Complex64) -> Result<f64> {
    Ok(g_sigma_eval(a, sigma, mu)?.value)
}

pub fn g_sigma_eval(a: f64, sigma: f64, mu: Complex64) -> Result<GEval> {
    let w = reflection_factor(sigma, mu)?;
    Ok(sup_modulus(a, w))
}

/// `g_σ(a; μ)` when `sigma` is given, otherwise `g(a)`.
pub fn g_eval_sigma_or_plain(a: f64, sigma: Option<f64>, mu: Complex64) -> Result<GEval> {
    match sigma {
        Some(s) => g_sigma_eval(a, s, mu),
        None => Ok(g(a)),
    }
}
