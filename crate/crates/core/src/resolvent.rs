//! Free resolvent kernels of `-d²/dx²` on the half-line with Dirichlet or
//! Robin conditions, their row norms, and an empirical probe of the
//! bordered resolvent `B R(λ; H₀) A`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::Factorization;
use crate::quad;
use crate::specfun;

/// `u'(0) = σ u(0)`; Dirichlet is the `σ = ∞` case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BcRepr", into = "BcRepr")]
pub enum BoundaryCondition {
    Dirichlet,
    Robin(f64),
}

impl BoundaryCondition {
    pub fn from_sigma(sigma: f64) -> Result<Self> {
        if sigma.is_infinite() && sigma > 0.0 {
            Ok(BoundaryCondition::Dirichlet)
        } else if sigma >= 0.0 {
            Ok(BoundaryCondition::Robin(sigma))
        } else {
            Err(Error::Domain(format!("sigma = {sigma} must be in [0, inf]")))
        }
    }

    pub fn neumann() -> Self {
        BoundaryCondition::Robin(0.0)
    }

    pub fn sigma(self) -> f64 {
        match self {
            BoundaryCondition::Dirichlet => f64::INFINITY,
            BoundaryCondition::Robin(s) => s,
        }
    }

    pub fn is_dirichlet(self) -> bool {
        matches!(self, BoundaryCondition::Dirichlet)
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryCondition::Dirichlet => write!(f, "dirichlet"),
            BoundaryCondition::Robin(s) => write!(f, "robin({s})"),
        }
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "dirichlet" | "inf" | "infinity" => Ok(BoundaryCondition::Dirichlet),
            "neumann" => Ok(BoundaryCondition::neumann()),
            _ => {
                let inner = t.strip_prefix("robin(").and_then(|r| r.strip_suffix(')')).unwrap_or(&t);
                let sigma: f64 = inner
                    .parse()
                    .map_err(|_| Error::Config(format!("unrecognized boundary condition '{s}'")))?;
                BoundaryCondition::from_sigma(sigma)
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BcRepr {
    Sigma(f64),
    Text(String),
}

impl TryFrom<BcRepr> for BoundaryCondition {
    type Error = Error;

    fn try_from(r: BcRepr) -> Result<Self> {
        match r {
            BcRepr::Sigma(s) => BoundaryCondition::from_sigma(s),
            BcRepr::Text(t) => t.parse(),
        }
    }
}

impl From<BoundaryCondition> for BcRepr {
    fn from(bc: BoundaryCondition) -> Self {
        match bc {
            BoundaryCondition::Dirichlet => BcRepr::Text("dirichlet".into()),
            BoundaryCondition::Robin(s) => BcRepr::Sigma(s),
        }
    }
}

/// `λ ∉ [0, ∞)` with `μ = λ^{1/2}`, `Im μ > 0`, and `θ = arg λ ∈ (0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub lambda: Complex64,
    pub mu: Complex64,
    pub theta: f64,
}

impl SpectralPoint {
    /// `λ = r e^{iθ}`, with `μ = r^{1/2} e^{iθ/2}` formed directly.
    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        if !(r > 0.0) || !(theta > 0.0 && theta < 2.0 * PI) {
            return Err(Error::EssentialSpectrum(format!("|lambda| = {r}, theta = {theta}")));
        }
        let mu = Complex64::from_polar(r.sqrt(), theta / 2.0);
        if !(mu.im > 0.0) {
            return Err(Error::EssentialSpectrum(format!("theta = {theta}")));
        }
        Ok(SpectralPoint { lambda: Complex64::from_polar(r, theta), mu, theta })
    }

    pub fn sin_half(&self) -> f64 {
        (self.theta / 2.0).sin()
    }

    pub fn cot_half(&self) -> f64 {
        let h = self.theta / 2.0;
        h.cos() / h.sin()
    }
}

/// Builds the spectral point for `λ`, rejecting `λ` within `1e-13` of `[0, ∞)`.
pub fn spectral_point(lambda: Complex64) -> Result<SpectralPoint> {
    let tol = 1e-13 * lambda.norm().max(1.0);
    if !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(Error::Domain(format!("lambda = {lambda}")));
    }
    if lambda.im.abs() <= tol && lambda.re >= -tol {
        return Err(Error::EssentialSpectrum(format!("{lambda}")));
    }
    let mut mu = lambda.sqrt();
    if mu.im < 0.0 {
        mu = -mu;
    }
    let mut theta = lambda.arg();
    if theta <= 0.0 {
        theta += 2.0 * PI;
    }
    Ok(SpectralPoint { lambda, mu, theta })
}

fn prefactor(sp: &SpectralPoint) -> Complex64 {
    -1.0 / (2.0 * Complex64::i() * sp.mu)
}

/// `k(x, y; λ) = -(1/2iμ)(e^{iμ|x-y|} - e^{iμ(x+y)})`.
pub fn kernel_dirichlet(x: f64, y: f64, sp: &SpectralPoint) -> Complex64 {
    let i_mu = Complex64::i() * sp.mu;
    prefactor(sp) * ((i_mu * (x - y).abs()).exp() - (i_mu * (x + y)).exp())
}

/// `k_σ(x, y; λ) = -(1/2iμ)(e^{iμ|x-y|} - w e^{iμ(x+y)})`, `w = (σ+iμ)/(σ-iμ)`.
pub fn kernel_robin(x: f64, y: f64, sp: &SpectralPoint, sigma: f64) -> Result<Complex64> {
    if sigma.is_infinite() && sigma > 0.0 {
        return Ok(kernel_dirichlet(x, y, sp));
    }
    let w = specfun::reflection_factor(sigma, sp.mu)?;
    let i_mu = Complex64::i() * sp.mu;
    Ok(prefactor(sp) * ((i_mu * (x - y).abs()).exp() - w * (i_mu * (x + y)).exp()))
}

pub fn kernel(x: f64, y: f64, sp: &SpectralPoint, bc: BoundaryCondition) -> Complex64 {
    match bc {
        BoundaryCondition::Dirichlet => kernel_dirichlet(x, y, sp),
        BoundaryCondition::Robin(s) => kernel_robin(x, y, sp, s).expect("sigma validated by BoundaryCondition"),
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Exponent(format!("alpha = {alpha} must be in [1, inf)")))
    }
}

/// `sup_x ‖k(x, ·; λ)‖_α ≤ 1/(|μ| (α Im μ)^{1/α})`.
pub fn row_norm_global_bound(sp: &SpectralPoint, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(1.0 / (sp.mu.norm() * (alpha * sp.mu.im).powf(1.0 / alpha)))
}

/// `(1/(2|μ|(α Im μ)^{1/α})) ((2 - e^{-α Im μ x})^{1/α} + e^{-Im μ x})`.
/// Valid for every boundary condition since `|w| ≤ 1`.
pub fn row_norm_closed_form(x: f64, sp: &SpectralPoint, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let im = sp.mu.im;
    let first = (2.0 - (-alpha * im * x).exp()).powf(1.0 / alpha);
    let second = (-im * x).exp();
    Ok((first + second) / (2.0 * sp.mu.norm() * (alpha * im).powf(1.0 / alpha)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowNorm {
    /// `(∫_0^∞ |k(x, y; λ)|^α dy)^{1/α}` by quadrature.
    pub quadrature: f64,
    pub closed_form_bound: f64,
    pub global_bound: f64,
}

/// `∫_a^∞ |f|^α` for `f` that behaves like `C e^{-Im μ y}` beyond `a`:
/// quadrature over a window followed by the exact exponential remainder.
fn exp_tail_integral<F: Fn(f64) -> f64>(g: F, a: f64, rate: f64) -> f64 {
    let width = 40.0 / rate;
    let body = quad::integrate(&g, a, a + width, 1e-300, 1e-13).value;
    body + g(a + width) / rate
}

/// Row norm of the kernel at `x` in `L_α(dy)`, split at the kink `y = x`.
pub fn kernel_row_norm(x: f64, sp: &SpectralPoint, alpha: f64, bc: BoundaryCondition) -> Result<RowNorm> {
    check_alpha(alpha)?;
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("x = {x}")));
    }
    if let BoundaryCondition::Robin(s) = bc {
        specfun::reflection_factor(s, sp.mu)?;
    }
    let f = |y: f64| kernel(x, y, sp, bc).norm().powf(alpha);
    let inner = if x > 0.0 {
        let periods = (sp.mu.re.abs() * x / PI).ceil().max(1.0) as usize;
        let pts: Vec<f64> = (0..=periods).map(|i| x * i as f64 / periods as f64).collect();
        quad::integrate_partition(f, &pts, 1e-300, 1e-13).value
    } else {
        0.0
    };
    let outer = exp_tail_integral(f, x, alpha * sp.mu.im);
    Ok(RowNorm {
        quadrature: (inner + outer).powf(1.0 / alpha),
        closed_form_bound: row_norm_closed_form(x, sp, alpha)?,
        global_bound: row_norm_global_bound(sp, alpha)?,
    })
}

/// The two integrals behind the closed-form row bound, by quadrature:
/// `(∫|e^{iμ|x-y|}|^α dy, ∫|e^{iμ(x+y)}|^α dy)`.
pub fn displayed_integrals_quadrature(x: f64, sp: &SpectralPoint, alpha: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    let i_mu = Complex64::i() * sp.mu;
    let rate = alpha * sp.mu.im;
    let near = |y: f64| (i_mu * (x - y).abs()).exp().norm().powf(alpha);
    let far = |y: f64| (i_mu * (x + y)).exp().norm().powf(alpha);
    let first = if x > 0.0 { quad::integrate(near, 0.0, x, 1e-300, 1e-13).value } else { 0.0 }
        + exp_tail_integral(near, x, rate);
    let second = exp_tail_integral(far, 0.0, rate);
    Ok((first, second))
}

/// Closed forms of [`displayed_integrals_quadrature`]:
/// `((2 - e^{-α Im μ x})/(α Im μ), e^{-α Im μ x}/(α Im μ))`.
pub fn displayed_integrals_closed(x: f64, sp: &SpectralPoint, alpha: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    let rate = alpha * sp.mu.im;
    let e = (-rate * x).exp();
    Ok(((2.0 - e) / rate, e / rate))
}

/// `sup_{x,y} |k(x, y; λ)| = g_σ(-cot(θ/2)) / (2|μ|)`.
///
/// On the diagonal, `2|μ| |k| = |1 - w e^{-Y} e^{iY cot(θ/2)}|` with
/// `Y = 2|μ| x sin(θ/2)`, which is `g_σ` at `-cot(θ/2)`; for Dirichlet
/// `g` is even and the sign is immaterial.
pub fn row_norm_sup_extremal(sp: &SpectralPoint, bc: BoundaryCondition) -> Result<f64> {
    let gv = specfun::g_sigma(-sp.cot_half(), bc.sigma(), sp.mu)?;
    Ok(gv / (2.0 * sp.mu.norm()))
}

// ---------------------------------------------------------------------------
// Bordered-resolvent probe

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    pub grid_size: usize,
    pub bc: BoundaryCondition,
    pub seed: u64,
    /// Random starting vectors in addition to the constant one.
    pub restarts: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { grid_size: 256, bc: BoundaryCondition::Dirichlet, seed: 0x5eed, restarts: 5 }
    }
}

/// Lower estimate of `‖B R(λ; H₀) A‖_{L_p → L_p}` (Dirichlet, default seed).
pub fn bordered_resolvent_norm_probe(f: &Factorization, sp: &SpectralPoint, p: f64, grid_size: usize) -> Result<f64> {
    bordered_resolvent_norm_probe_with(f, sp, p, &ProbeOptions { grid_size, ..ProbeOptions::default() })
}

const OUTPUT_CELLS: usize = 1024;
const FINE_CELLS: usize = 512;
const COARSEST: usize = 16;

fn graded_nodes(x_max: f64, n: usize) -> Vec<f64> {
    let s: f64 = 4.0;
    (0..=n).map(|j| x_max * ((s * j as f64 / n as f64).exp() - 1.0) / (s.exp() - 1.0)).collect()
}

fn gl_count(mu_abs: f64, cell: f64, min: usize, max: usize) -> usize {
    ((1.5 * mu_abs * cell).ceil() as usize + min).min(max)
}

/// Maximizes `‖T u‖_p / ‖u‖_p` for `T u = b ∫ k(·, y) a(y) u(y) dy` over
/// inputs that are piecewise constant on `grid_size` graded cells.
///
/// The discretization is built on the finest level and coarser levels are
/// obtained by merging cells, so the subspaces are nested and the estimate
/// never decreases with `grid_size`.
pub fn bordered_resolvent_norm_probe_with(
    f: &Factorization,
    sp: &SpectralPoint,
    p: f64,
    opts: &ProbeOptions,
) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Exponent(format!("p = {p} must be in (1, inf)")));
    }
    if opts.grid_size < 2 {
        return Err(Error::Domain("grid_size must be at least 2".into()));
    }
    if f.a.is_zero() || f.b.is_zero() {
        return Ok(0.0);
    }
    let w = specfun::reflection_factor(opts.bc.sigma(), sp.mu)?;
    let hint = f.a.support_hint.min(f.b.support_hint);
    let x_max = (5.0 * hint).min(50.0).max(1.0);
    let mu_abs = sp.mu.norm();
    let i_mu = Complex64::i() * sp.mu;
    let pre = prefactor(sp);

    // Level structure: fine = grid_size * 2^k >= FINE_CELLS.
    let mut fine = opts.grid_size;
    while fine < FINE_CELLS {
        fine *= 2;
    }
    let mut coarsest = opts.grid_size;
    while coarsest % 2 == 0 && coarsest / 2 >= COARSEST {
        coarsest /= 2;
    }

    // Input quadrature on fine cells.
    let in_edges = graded_nodes(x_max, fine);
    let max_in = in_edges[fine] - in_edges[fine - 1];
    let (gx, gw) = quad::gauss_legendre(gl_count(mu_abs, max_in, 4, 16));
    let mut in_nodes = Vec::new(); // (cell, y, weight * a(y))
    for j in 0..fine {
        let (lo, hi) = (in_edges[j], in_edges[j + 1]);
        let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for (x, wt) in gx.iter().zip(&gw) {
            let y = c + h * x;
            in_nodes.push((j, y, wt * h * f.a.value(y)));
        }
    }

    // Output quadrature.
    let out_edges = graded_nodes(x_max, OUTPUT_CELLS);
    let max_out = out_edges[OUTPUT_CELLS] - out_edges[OUTPUT_CELLS - 1];
    let (ox, ow) = quad::gauss_legendre(gl_count(mu_abs, max_out, 4, 16));
    let mut out_x = Vec::new();
    let mut out_w = Vec::new();
    for o in 0..OUTPUT_CELLS {
        let (lo, hi) = (out_edges[o], out_edges[o + 1]);
        let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for (x, wt) in ox.iter().zip(&ow) {
            out_x.push(c + h * x);
            out_w.push(wt * h);
        }
    }
    let b_out: Vec<Complex64> = out_x.iter().map(|&x| f.b.value(x)).collect();

    // Per-cell moments for the separable form of the kernel.
    let separable = sp.mu.im * x_max < 600.0;
    let mut below = vec![Complex64::new(0.0, 0.0); fine]; // Σ e^{-iμy} a w
    let mut above = vec![Complex64::new(0.0, 0.0); fine]; // Σ e^{iμy} a w
    for &(j, y, aw) in &in_nodes {
        if separable {
            below[j] += (-i_mu * y).exp() * aw;
        }
        above[j] += (i_mu * y).exp() * aw;
    }

    // G[o][j] = b(x_o) ∫_{cell j} k(x_o, y) a(y) dy, stored row-major.
    let n_out = out_x.len();
    let mut g = vec![Complex64::new(0.0, 0.0); n_out * fine];
    for (o, &x) in out_x.iter().enumerate() {
        let row = &mut g[o * fine..(o + 1) * fine];
        let ex = (i_mu * x).exp();
        let ex_inv = if separable { (-i_mu * x).exp() } else { Complex64::new(0.0, 0.0) };
        let home = in_edges.partition_point(|&e| e <= x).saturating_sub(1).min(fine - 1);
        for (j, entry) in row.iter_mut().enumerate() {
            if separable && j != home {
                let direct = if j < home { ex * below[j] } else { ex_inv * above[j] };
                *entry = pre * (direct - w * ex * above[j]);
            }
        }
        let cells: Vec<usize> = if separable { vec![home] } else { (0..fine).collect() };
        for j in cells {
            row[j] = Complex64::new(0.0, 0.0);
        }
        for &(j, y, aw) in &in_nodes {
            if !separable || j == home {
                row[j] += pre * ((i_mu * (x - y).abs()).exp() - w * (i_mu * (x + y)).exp()) * aw;
            }
        }
        for entry in row.iter_mut() {
            *entry *= b_out[o];
        }
    }

    let fine_len: Vec<f64> = in_edges.windows(2).map(|e| e[1] - e[0]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts: Vec<Vec<Complex64>> = vec![vec![Complex64::new(1.0, 0.0); coarsest]];
    for _ in 0..opts.restarts {
        starts.push(
            (0..coarsest)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect(),
        );
    }

    let mut best = 0.0f64;
    let mut level = coarsest;
    let mut iterates = starts;
    loop {
        let merge = fine / level;
        let h: Vec<f64> = (0..level).map(|j| fine_len[j * merge..(j + 1) * merge].iter().sum()).collect();
        let gl: Vec<Complex64> = (0..n_out)
            .flat_map(|o| {
                let row = &g[o * fine..(o + 1) * fine];
                (0..level).map(move |j| row[j * merge..(j + 1) * merge].iter().sum::<Complex64>())
            })
            .collect();
        let iters = if level == coarsest { 40 } else { 15 };
        for u in iterates.iter_mut() {
            let (ratio, next) = power_ascent(&gl, n_out, level, &h, &out_w, p, u, iters);
            best = best.max(ratio);
            *u = next;
        }
        if level == opts.grid_size {
            break;
        }
        level *= 2;
        for u in iterates.iter_mut() {
            *u = u.iter().flat_map(|&v| [v, v]).collect();
        }
    }
    Ok(best)
}

fn lp_norm(v: &[Complex64], weights: &[f64], p: f64) -> f64 {
    v.iter().zip(weights).map(|(z, w)| w * z.norm().powf(p)).sum::<f64>().powf(1.0 / p)
}

fn duality_map(z: Complex64, q: f64) -> Complex64 {
    let m = z.norm();
    if m == 0.0 { z } else { z * m.powf(q - 2.0) }
}

/// Nonlinear power iteration for the `p → p` norm of a dense matrix with
/// input cell measures `h` and output weights `ow`. Returns the best ratio
/// seen and the final iterate.
#[allow(clippy::too_many_arguments)]
fn power_ascent(
    g: &[Complex64],
    n_out: usize,
    n_in: usize,
    h: &[f64],
    ow: &[f64],
    p: f64,
    start: &[Complex64],
    iters: usize,
) -> (f64, Vec<Complex64>) {
    let q = p / (p - 1.0);
    let mut u = start.to_vec();
    let mut best = 0.0f64;
    let mut best_u = u.clone();
    let mut v = vec![Complex64::new(0.0, 0.0); n_out];
    for _ in 0..=iters {
        let nu = lp_norm(&u, h, p);
        if nu == 0.0 {
            break;
        }
        for (o, vo) in v.iter_mut().enumerate() {
            *vo = g[o * n_in..(o + 1) * n_in].iter().zip(&u).map(|(a, b)| a * b).sum();
        }
        let ratio = lp_norm(&v, ow, p) / nu;
        if ratio > best {
            best = ratio;
            best_u = u.clone();
        }
        // z = G^H (ow ⊙ ψ_p(v)); u ← ψ_{p'}(z / h)
        let mut z = vec![Complex64::new(0.0, 0.0); n_in];
        for (o, vo) in v.iter().enumerate() {
            let d = duality_map(*vo, p) * ow[o];
            for (zj, gj) in z.iter_mut().zip(&g[o * n_in..(o + 1) * n_in]) {
                *zj += gj.conj() * d;
            }
        }
        u = z.iter().zip(h).map(|(zj, hj)| duality_map(zj / hj, q)).collect();
    }
    (best, best_u)
}
